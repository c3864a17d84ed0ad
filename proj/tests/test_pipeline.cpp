#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gla/pipeline.hpp"
#include "gla/report.hpp"
#include "gla/synth.hpp"

using namespace gla;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::size_t count_occurrences(const std::string &text, const std::string &needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("gla_pipeline_" +
            std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()
                      ->current_test_info()
                      ->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  GlaConfig exp1_config(std::uint64_t seed) {
    const LabeledDataset data = gen_experiment1(seed);
    const fs::path events = dir_ / "events.txt";
    const fs::path labels = dir_ / "labels.csv";
    write_dataset(data, events.string(), labels.string());

    GlaConfig cfg;
    cfg.input_path = events.string();
    cfg.window_size = 20;
    cfg.shift = 20;  // the dataset is pre-cut: no overlap
    cfg.states = 10;
    cfg.gauge_count = 10;
    cfg.min_cluster_size = 20;
    cfg.seed = seed;
    cfg.gauge_seed = seed;
    cfg.tsne_seed = seed;
    cfg.labels_path = labels.string();
    return cfg;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(PipelineTest, ReportsAreByteIdenticalAcrossRuns) {
  GlaConfig cfg = exp1_config(1);
  cfg.out_dir = (dir_ / "out_a").string();
  run(cfg);
  cfg.out_dir = (dir_ / "out_b").string();
  run(cfg);
  const std::string a = slurp(dir_ / "out_a" / "report.json");
  const std::string b = slurp(dir_ / "out_b" / "report.json");
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_EQ(slurp(dir_ / "out_a" / "plot.svg"), slurp(dir_ / "out_b" / "plot.svg"));
}

TEST_F(PipelineTest, ThreadCountDoesNotChangeTheReport) {
  GlaConfig cfg = exp1_config(9);
  cfg.threads = 1;
  cfg.out_dir = (dir_ / "serial").string();
  run(cfg);
  cfg.threads = 2;
  cfg.out_dir = (dir_ / "parallel").string();
  run(cfg);
  EXPECT_EQ(slurp(dir_ / "serial" / "report.json"),
            slurp(dir_ / "parallel" / "report.json"));
}

TEST_F(PipelineTest, EmptyInputFailsBeforeWritingArtifacts) {
  const fs::path events = dir_ / "empty.txt";
  std::ofstream(events).close();
  GlaConfig cfg;
  cfg.input_path = events.string();
  cfg.out_dir = (dir_ / "out").string();
  EXPECT_THROW(run(cfg), InputError);
  EXPECT_FALSE(fs::exists(dir_ / "out" / "report.json"));
}

TEST_F(PipelineTest, RerunFromDumpedFeaturesReproducesEmbeddingAndLabels) {
  GlaConfig cfg = exp1_config(2);
  cfg.dump_features = true;
  cfg.out_dir = (dir_ / "full").string();
  run(cfg);

  GlaConfig from_features;
  from_features.features_in = (dir_ / "full" / "features.csv").string();
  from_features.perplexity = cfg.perplexity;
  from_features.tsne_iters = cfg.tsne_iters;
  from_features.learning_rate = cfg.learning_rate;
  from_features.tsne_seed = cfg.tsne_seed;
  from_features.min_cluster_size = cfg.min_cluster_size;
  from_features.out_dir = (dir_ / "partial").string();
  run(from_features);

  EXPECT_EQ(slurp(dir_ / "full" / "embedding.csv"),
            slurp(dir_ / "partial" / "embedding.csv"));
  EXPECT_EQ(slurp(dir_ / "full" / "clusters.csv"),
            slurp(dir_ / "partial" / "clusters.csv"));
}

TEST_F(PipelineTest, WindowRecordsMapBackToSourcePositions) {
  GlaConfig cfg = exp1_config(3);
  const OutlierReport report = run(cfg);
  ASSERT_EQ(report.windows.size(), 62u);
  for (std::size_t k = 0; k < report.windows.size(); ++k) {
    EXPECT_EQ(report.windows[k].id, static_cast<int>(k));
    EXPECT_EQ(report.windows[k].start, k * 20 + 1);
  }
  EXPECT_TRUE(report.metrics.has_value());
}

TEST_F(PipelineTest, ReportFlagsExactlyTheNoisePoints) {
  GlaConfig cfg = exp1_config(4);
  const OutlierReport report = run(cfg);
  std::vector<int> flagged;
  for (const auto &w : report.windows)
    if (w.anomaly) flagged.push_back(w.id);
  EXPECT_EQ(flagged, report.outlier_ids);
  for (const auto &w : report.windows)
    EXPECT_EQ(w.anomaly, w.cluster == kNoise);
}

TEST_F(PipelineTest, BadConfigurationIsRejected) {
  GlaConfig cfg = exp1_config(5);
  cfg.states = 0;
  EXPECT_THROW(run(cfg), ConfigError);
  cfg = exp1_config(6);
  cfg.window_size = 5000;
  EXPECT_THROW(run(cfg), ConfigError);
}

TEST_F(PipelineTest, SvgMarkersMatchTheReport) {
  GlaConfig cfg = exp1_config(7);
  cfg.out_dir = (dir_ / "svg").string();
  const OutlierReport report = run(cfg);
  const std::string svg = slurp(dir_ / "svg" / "plot.svg");
  const std::size_t crosses = count_occurrences(svg, "<path");
  const std::size_t dots = count_occurrences(svg, "<circle");
  EXPECT_EQ(crosses, report.outlier_ids.size());
  EXPECT_EQ(dots + crosses, 62u);
}

TEST(RenderSvg, SinglePointProducesOneMarker) {
  const std::string svg = render_svg({{0.0, 0.0}}, {0});
  EXPECT_EQ(count_occurrences(svg, "<circle"), 1u);
  EXPECT_EQ(count_occurrences(svg, "<path"), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(RenderSvg, NoisePointsBecomeCrosses) {
  const std::vector<Point2> pts = {{0, 0}, {1, 0}, {2, 3}, {5, 5}};
  const std::vector<int> labels = {0, 0, kNoise, 1};
  const std::string svg = render_svg(pts, labels);
  EXPECT_EQ(count_occurrences(svg, "<circle"), 3u);
  EXPECT_EQ(count_occurrences(svg, "<path"), 1u);
}

TEST(RenderSvg, DeterministicBytes) {
  const std::vector<Point2> pts = {{0.123, -4.5}, {3.14, 2.7}, {-1, -1}};
  const std::vector<int> labels = {0, kNoise, 0};
  EXPECT_EQ(render_svg(pts, labels), render_svg(pts, labels));
}

TEST(FeaturesCsv, RoundTripsExactly) {
  Matrix<double> f(3, 2);
  f(0, 0) = -123.456789012345;
  f(0, 1) = 0.0;
  f(1, 0) = -1e4;
  f(1, 1) = -0.3333333333333333;
  f(2, 0) = -987.123;
  f(2, 1) = -55.5;
  const fs::path path = fs::path(::testing::TempDir()) / "gla_features_rt.csv";
  write_features_csv(path.string(), f);
  const Matrix<double> g = read_features_csv(path.string());
  ASSERT_EQ(g.rows(), f.rows());
  ASSERT_EQ(g.cols(), f.cols());
  for (std::size_t r = 0; r < f.rows(); ++r)
    for (std::size_t c = 0; c < f.cols(); ++c) EXPECT_EQ(f(r, c), g(r, c));
  fs::remove(path);
}

TEST(LabelsCsv, RoundTripsAnomalousIds) {
  const fs::path path = fs::path(::testing::TempDir()) / "gla_labels_rt.csv";
  write_labels_csv(path.string(), {0, 1, 0, 0, 1});
  EXPECT_EQ(read_labels_csv(path.string()), (std::vector<int>{1, 4}));
  fs::remove(path);
}
