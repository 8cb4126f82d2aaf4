#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <fmt/format.h>

#include "ftdtw/error.hpp"
#include "ftdtw/pipeline.hpp"
#include "ftdtw/synthetic.hpp"

using namespace ftdtw;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class Pipeline : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           fmt::format("ftdtw_pipeline_{}", ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    SyntheticSpec spec;
    spec.classes = 4;
    spec.per_class = 6;
    spec.dims = 2;
    spec.min_length = 10;
    spec.max_length = 16;
    write_csv_dir(make_warped_dataset(spec), dir_ / "data", dir_ / "labels.tsv");
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunConfig config() const {
    RunConfig cfg;
    cfg.data.sources = {dir_ / "data"};
    cfg.data.labels = dir_ / "labels.tsv";
    cfg.counts = ClusterCounts::parse_sweep("2:6:2");
    cfg.out_dir = dir_ / "out";
    return cfg;
  }

  // Runs the CLI with stdout captured into dir_/stdout.txt; returns the exit code.
  int cli(const std::string& args) const {
    const auto cmd = fmt::format("{} {} > {} 2> {}", FTDTW_CLI_PATH, args, (dir_ / "stdout.txt").string(),
                                 (dir_ / "stderr.txt").string());
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string data_args() const {
    return fmt::format("--data {} --labels {}", (dir_ / "data").string(), (dir_ / "labels.tsv").string());
  }

  fs::path dir_;
};

}  // namespace

TEST(ClusterCounts, Parse) {
  EXPECT_EQ(ClusterCounts::parse_sweep("100:200:50").values, (std::vector<std::size_t>{100, 150, 200}));
  EXPECT_EQ(ClusterCounts::parse_sweep("5:9:3").values, (std::vector<std::size_t>{5, 8}));
  EXPECT_EQ(ClusterCounts::parse_sweep("1:1:1").values, (std::vector<std::size_t>{1}));
  for (const char* bad : {"1:2", "0:5:1", "5:1:1", "1:5:0", "a:b:c"}) {
    try {
      ClusterCounts::parse_sweep(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidConfig) << bad;
    }
  }
}

TEST(ClusterCounts, Check) {
  EXPECT_NO_THROW(ClusterCounts::single(1).check(5));
  EXPECT_NO_THROW(ClusterCounts::single(5).check(5));
  try {
    ClusterCounts::single(6).check(5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ROutOfRange);
  }
}

TEST(Peaks, SmallestRWinsTies) {
  const std::vector<SweepRow> rows{{2, 0.5, 0.1}, {4, 0.7, 0.3}, {6, 0.7, 0.3}, {8, 0.6, 0.2}};
  EXPECT_EQ(peak_f(rows).clusters, 4u);
  EXPECT_EQ(peak_nmi(rows).clusters, 4u);
  EXPECT_EQ(peak_f(rows).value, 0.7);
}

TEST_F(Pipeline, RunKey) {
  auto cfg = config();
  EXPECT_EQ(run_key(cfg), "ftdtw_full_seed1");
  cfg.measure.kind = MeasureKind::Classical;
  cfg.measure.distance = DistanceKind::Manhattan;
  cfg.measure.band = 3;
  cfg.data.subsample = SubsampleSpec::parse("fold:1/3");
  cfg.data.seed = 4;
  cfg.subset_name = "s1";
  EXPECT_EQ(run_key(cfg), "s1_classical-dtw-manhattan_band3_fold-1of3_seed4");
}

TEST_F(Pipeline, ProximityFileSize) {
  auto cfg = config();
  cfg.measure.kind = MeasureKind::Classical;
  cfg.measure.distance = DistanceKind::Manhattan;
  const auto r = run_proximity(cfg);
  const auto pm = load_proximity(r.matrix_file);
  EXPECT_EQ(pm.size(), 24u);
  EXPECT_EQ(pm.condensed().size(), 24u * 23u / 2u);
  EXPECT_EQ(pm.measure_tag(), "classical-dtw:manhattan");
  const auto [ids, classes] = read_labels(r.labels_file);
  EXPECT_EQ(ids, pm.ids());
  EXPECT_EQ(classes.size(), 24u);
}

TEST_F(Pipeline, SweepWritesAllArtifacts) {
  const auto cfg = config();
  const auto r = run_sweep(cfg);
  ASSERT_EQ(r.table.size(), 3u);
  EXPECT_EQ(r.table[0].clusters, 2u);
  EXPECT_EQ(r.table[2].clusters, 6u);
  const auto key = run_key(cfg);
  for (const auto& p : {proximity_dir(cfg.out_dir) / (key + ".ftpm"), dendrogram_dir(cfg.out_dir) / (key + ".tsv"),
                        partitions_dir(cfg.out_dir) / (key + "_R4.tsv"),
                        reports_dir(cfg.out_dir) / (key + ".jsonl"), reports_dir(cfg.out_dir) / (key + ".txt"),
                        reports_dir(cfg.out_dir) / (key + "_sweep.tsv"),
                        reports_dir(cfg.out_dir) / (key + "_peaks.tsv")}) {
    EXPECT_TRUE(fs::exists(p)) << p;
  }
  const auto sweep = slurp(r.sweep_file);
  EXPECT_EQ(sweep.rfind("# R\tF\tNMI\n", 0), 0u);
  EXPECT_EQ(line_count(sweep), 4u);
  EXPECT_EQ(line_count(slurp(reports_dir(cfg.out_dir) / (key + ".jsonl"))), 3u);
}

TEST_F(Pipeline, ClusterAtExtremes) {
  auto cfg = config();
  const auto prox = run_proximity(cfg);
  const auto out = run_cluster(prox.matrix_file, ClusterCounts{{1, 24}}, cfg.out_dir);
  ASSERT_EQ(out.partitions.size(), 2u);
  std::ifstream one(out.partitions[0].second), all(out.partitions[1].second);
  EXPECT_EQ(read_partition(one).partition.clusters, 1u);
  EXPECT_EQ(read_partition(all).partition.clusters, 24u);
  try {
    run_cluster(prox.matrix_file, ClusterCounts::single(25), cfg.out_dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ROutOfRange);
  }
}

TEST_F(Pipeline, EvaluateRejectsMismatchedInputs) {
  auto cfg = config();
  const auto prox = run_proximity(cfg);
  const auto cl = run_cluster(prox.matrix_file, ClusterCounts::single(3), cfg.out_dir);
  const auto part = cl.partitions.front().second;

  std::ofstream(dir_ / "short.tsv") << "# segment_id\tclass\nc0_n000\tc0\n";
  try {
    run_evaluate({part}, dir_ / "short.tsv", cfg.out_dir, "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }

  auto text = slurp(prox.labels_file);
  text.replace(text.find("c0_n000"), 7, "zz_n000");
  std::ofstream(dir_ / "renamed.tsv") << text;
  try {
    run_evaluate({part}, dir_ / "renamed.tsv", cfg.out_dir, "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownSegment);
  }

  try {
    run_evaluate({part, part}, prox.labels_file, cfg.out_dir, "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
}

TEST_F(Pipeline, CompareTable) {
  auto cfg = config();
  cfg.counts = ClusterCounts::single(4);
  std::vector<CompareSubset> subsets;
  for (std::size_t k = 0; k < 2; ++k) {
    auto m = cfg.data;
    m.subsample = SubsampleSpec{SubsampleKind::Fold, 0, k, 2};
    subsets.push_back({fmt::format("fold{}", k + 1), m});
  }
  const auto rows = run_compare(cfg, subsets);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].r_f_dtw, 4u);
  const auto table = slurp(reports_dir(cfg.out_dir) / "compare.tsv");
  EXPECT_EQ(line_count(table), 3u);
  EXPECT_NE(table.find("\nfold2\t"), std::string::npos);
}

TEST_F(Pipeline, CliSweepAndConfigEcho) {
  const auto out = dir_ / "cli";
  ASSERT_EQ(cli(fmt::format("sweep {} --measure classical --distance manhattan --sweep 2:4:1 --out {}", data_args(),
                            out.string())),
            0)
      << slurp(dir_ / "stderr.txt");
  const auto stdout_text = slurp(dir_ / "stdout.txt");
  EXPECT_EQ(stdout_text.rfind("# R\tF\tNMI\n", 0), 0u);
  EXPECT_EQ(line_count(stdout_text), 4u);
  const auto config = slurp(out / "config.toml");
  EXPECT_NE(config.find("manhattan"), std::string::npos) << config;
  EXPECT_TRUE(fs::exists(out / "proximity" / "classical-dtw-manhattan_full_seed1.ftpm"));
}

TEST_F(Pipeline, CliStagesChain) {
  const auto out = dir_ / "staged";
  ASSERT_EQ(cli(fmt::format("proximity {} --workers 2 --out {}", data_args(), out.string())), 0);
  const auto ftpm = out / "proximity" / "ftdtw_full_seed1.ftpm";
  ASSERT_EQ(cli(fmt::format("cluster --proximity {} --clusters 4 --out {}", ftpm.string(), out.string())), 0);
  const auto part = out / "partitions" / "ftdtw_full_seed1_R4.tsv";
  ASSERT_TRUE(fs::exists(part));
  ASSERT_EQ(cli(fmt::format("evaluate --partitions {} --labels {} --out {}", part.string(),
                            (out / "proximity" / "ftdtw_full_seed1.labels.tsv").string(), out.string())),
            0);
  EXPECT_TRUE(fs::exists(out / "reports" / "ftdtw_full_seed1_sweep.tsv"));
}

TEST_F(Pipeline, CliExitCodes) {
  const auto out = (dir_ / "codes").string();
  EXPECT_EQ(cli("--help"), 0);
  EXPECT_EQ(cli("nonsense"), 2);
  EXPECT_EQ(cli(fmt::format("sweep {} --clusters 100 --out {}", data_args(), out)), 2);  // R > N
  EXPECT_EQ(cli(fmt::format("sweep {} --subsample per-class:50 --clusters 2 --out {}", data_args(), out)), 2);
  EXPECT_EQ(cli(fmt::format("sweep --data {} --labels {} --clusters 2 --out {}", (dir_ / "none").string(),
                            (dir_ / "labels.tsv").string(), out)),
            4);
  EXPECT_EQ(cli(fmt::format("cluster --proximity {} --clusters 2 --out {}", (dir_ / "missing.ftpm").string(), out)),
            4);
  std::ofstream(dir_ / "data" / "extra.csv") << "1,2\n";
  EXPECT_EQ(cli(fmt::format("proximity {} --out {}", data_args(), out)), 3);  // unlabeled segment
}

TEST_F(Pipeline, CliAlignDump) {
  std::ofstream(dir_ / "x.csv") << "0\n1\n";
  std::ofstream(dir_ / "y.csv") << "1\n";
  ASSERT_EQ(cli(fmt::format("align --measure classical --x {} --y {}", (dir_ / "x.csv").string(),
                            (dir_ / "y.csv").string())),
            0);
  const auto text = slurp(dir_ / "stdout.txt");
  EXPECT_EQ(text.rfind("# K=2 cost=1", 0), 0u) << text;
}
