#include "ftdtw/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>
#include "json.hpp"

#include "ftdtw/error.hpp"

namespace ftdtw {

namespace {

void fill_marginals(ContingencyTable& ct) {
  const std::size_t v_count = ct.counts.empty() ? 0 : ct.counts.front().size();
  ct.cluster_sizes.assign(ct.counts.size(), 0);
  ct.class_sizes.assign(v_count, 0);
  ct.total = 0;
  for (std::size_t r = 0; r < ct.counts.size(); ++r) {
    if (ct.counts[r].size() != v_count) throw Error(ErrorCode::LengthMismatch, "ragged contingency table");
    for (std::size_t v = 0; v < v_count; ++v) {
      ct.cluster_sizes[r] += ct.counts[r][v];
      ct.class_sizes[v] += ct.counts[r][v];
      ct.total += ct.counts[r][v];
    }
  }
  for (std::size_t r = 0; r < ct.clusters(); ++r) {
    if (ct.cluster_sizes[r] == 0) throw Error(ErrorCode::BadFormat, fmt::format("cluster {} is empty", r));
  }
  for (std::size_t v = 0; v < ct.classes(); ++v) {
    if (ct.class_sizes[v] == 0) throw Error(ErrorCode::BadFormat, fmt::format("class {} is empty", v));
  }
  if (ct.total == 0) throw Error(ErrorCode::EmptyDataset, "empty contingency table");
}

}  // namespace

ContingencyTable contingency(const Partition& part, const std::vector<std::string>& labels) {
  if (part.assignment.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, fmt::format("{} assignments for {} labels",
                                                       part.assignment.size(), labels.size()));
  }
  ContingencyTable ct;
  std::unordered_map<std::string, std::size_t> class_index;
  for (const auto& l : labels) {
    if (class_index.emplace(l, ct.class_names.size()).second) ct.class_names.push_back(l);
  }
  std::size_t r_count = part.clusters;
  for (auto c : part.assignment) r_count = std::max(r_count, c + 1);
  ct.counts.assign(r_count, std::vector<std::uint64_t>(ct.class_names.size(), 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++ct.counts[part.assignment[i]][class_index.at(labels[i])];
  }
  fill_marginals(ct);
  return ct;
}

ContingencyTable table_from_counts(std::vector<std::vector<std::uint64_t>> counts) {
  ContingencyTable ct;
  ct.counts = std::move(counts);
  fill_marginals(ct);
  for (std::size_t v = 0; v < ct.classes(); ++v) ct.class_names.push_back(fmt::format("c{}", v));
  return ct;
}

double precision(const ContingencyTable& ct, std::size_t r, std::size_t v) {
  return static_cast<double>(ct.counts.at(r).at(v)) / static_cast<double>(ct.cluster_sizes[r]);
}

double recall(const ContingencyTable& ct, std::size_t r, std::size_t v) {
  return static_cast<double>(ct.counts.at(r).at(v)) / static_cast<double>(ct.class_sizes[v]);
}

double f_value(const ContingencyTable& ct, std::size_t r, std::size_t v) {
  const auto nrv = ct.counts.at(r).at(v);
  if (nrv == 0) return 0.0;
  // 2 RE PR / (RE + PR) reduces to 2 n_rv / (n_r + n_v): one rounding, and
  // exactly 1 when n_rv = n_r = n_v.
  return 2.0 * static_cast<double>(nrv) /
         static_cast<double>(ct.cluster_sizes[r] + ct.class_sizes[v]);
}

FMeasure f_measure(const ContingencyTable& ct) {
  FMeasure out;
  out.best_per_class.assign(ct.classes(), 0.0);
  out.best_cluster.assign(ct.classes(), 0);
  std::vector<double> terms(ct.classes());
  for (std::size_t v = 0; v < ct.classes(); ++v) {
    for (std::size_t r = 0; r < ct.clusters(); ++r) {
      const double f = f_value(ct, r, v);
      if (f > out.best_per_class[v]) {
        out.best_per_class[v] = f;
        out.best_cluster[v] = r;
      }
    }
    terms[v] = static_cast<double>(ct.class_sizes[v]) * out.best_per_class[v];
  }
  // Sorted so the result does not depend on class order.
  std::sort(terms.begin(), terms.end());
  double weighted = 0.0;
  for (double t : terms) weighted += t;
  out.overall = weighted / static_cast<double>(ct.total);
  return out;
}

NmiResult nmi(const ContingencyTable& ct, MiWeighting weighting, double log_base) {
  const double n = static_cast<double>(ct.total);
  const double scale = log_base > 0.0 ? 1.0 / std::log(log_base) : 1.0;
  auto lg = [&](double x) { return std::log(x) * scale; };

  // Terms are summed in sorted order: a perfect partition then yields the
  // same multiset of terms for I, H(G) and H(C), hence NMI == 1 exactly, and
  // the result does not depend on cluster or class order.
  auto sorted_sum = [](std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc;
  };
  auto entropy = [&](const std::vector<std::uint64_t>& sizes) {
    std::vector<double> terms;
    terms.reserve(sizes.size());
    for (auto k : sizes) {
      const double c = static_cast<double>(k);
      terms.push_back(c / n * lg(n / c));
    }
    return sorted_sum(std::move(terms));
  };

  NmiResult out;
  out.cluster_entropy = entropy(ct.cluster_sizes);
  out.class_entropy = entropy(ct.class_sizes);
  std::vector<double> terms;
  for (std::size_t r = 0; r < ct.clusters(); ++r) {
    const double nr = static_cast<double>(ct.cluster_sizes[r]);
    for (std::size_t v = 0; v < ct.classes(); ++v) {
      const auto nrv = ct.counts[r][v];
      if (nrv == 0) continue;  // 0 log 0 := 0
      const double nv = static_cast<double>(ct.class_sizes[v]);
      const double c = static_cast<double>(nrv);
      // n*n_rv / (n_r*n_v) is exact in the numerator and denominator, so an
      // independent table gives exactly log(1) = 0.
      const double ratio = (n * c) / (nr * nv);
      const double weight = weighting == MiWeighting::Joint ? c / n : (nr / n) * (nv / n);
      terms.push_back(weight * lg(ratio));
    }
  }
  out.mutual_information = sorted_sum(std::move(terms));
  const double denom = out.cluster_entropy + out.class_entropy;
  out.nmi = denom == 0.0 ? 1.0 : 2.0 * out.mutual_information / denom;
  return out;
}

EvaluationReport evaluate(const ContingencyTable& ct, MiWeighting weighting) {
  const auto f = f_measure(ct);
  const auto info = nmi(ct, weighting);
  EvaluationReport r;
  r.clusters = ct.clusters();
  r.classes = ct.classes();
  r.segments = ct.total;
  r.overall_f = f.overall;
  r.nmi = info.nmi;
  r.mutual_information = info.mutual_information;
  r.cluster_entropy = info.cluster_entropy;
  r.class_entropy = info.class_entropy;
  r.class_names = ct.class_names;
  r.best_f_per_class = f.best_per_class;
  r.weighting = weighting;
  return r;
}

namespace {

const char* weighting_name(MiWeighting w) { return w == MiWeighting::Joint ? "joint" : "as-printed"; }

}  // namespace

std::string to_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["R"] = r.clusters;
  j["V"] = r.classes;
  j["N"] = r.segments;
  j["f_measure"] = r.overall_f;
  j["nmi"] = r.nmi;
  j["mutual_information_nats"] = r.mutual_information;
  j["cluster_entropy_nats"] = r.cluster_entropy;
  j["class_entropy_nats"] = r.class_entropy;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (std::size_t v = 0; v < r.class_names.size(); ++v) per_class[r.class_names[v]] = r.best_f_per_class[v];
  j["best_f_per_class"] = per_class;
  j["f_aggregation"] = "class-weighted-best-match";
  j["log_base"] = "e";
  j["mi_weighting"] = weighting_name(r.weighting);
  return j.dump();
}

std::string to_key_value(const EvaluationReport& r) {
  std::string out;
  out += fmt::format("R = {}\n", r.clusters);
  out += fmt::format("V = {}\n", r.classes);
  out += fmt::format("N = {}\n", r.segments);
  out += fmt::format("f_measure = {}\n", r.overall_f);
  out += fmt::format("nmi = {}\n", r.nmi);
  out += fmt::format("mutual_information_nats = {}\n", r.mutual_information);
  out += fmt::format("cluster_entropy_nats = {}\n", r.cluster_entropy);
  out += fmt::format("class_entropy_nats = {}\n", r.class_entropy);
  out += "f_aggregation = class-weighted-best-match\n";
  out += fmt::format("mi_weighting = {}\n", weighting_name(r.weighting));
  return out;
}

}  // namespace ftdtw
