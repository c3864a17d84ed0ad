#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "gla/gauge.hpp"
#include "gla/synth.hpp"

using namespace gla;

namespace {

std::vector<Window> windows_from(const std::vector<std::vector<int>> &seqs) {
  std::vector<Window> out;
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    Window w;
    w.index = static_cast<int>(k + 1);
    w.start = k * seqs[k].size() + 1;
    w.codes = seqs[k];
    out.push_back(std::move(w));
  }
  return out;
}

EventAlphabet alphabet_of(std::size_t size) {
  EventAlphabet a;
  for (std::size_t i = 0; i < size; ++i) a.add(std::string(1, 'A' + char(i)));
  return a;
}

HmmParams certain_emitter() {
  // Single state that always emits symbol 0.
  HmmParams h;
  h.num_states = 1;
  h.num_symbols = 2;
  h.pi = {1.0};
  h.trans = Matrix<double>(1, 1, 1.0);
  h.emit = Matrix<double>(1, 2, 0.0);
  h.emit(0, 0) = 1.0;
  return h;
}

/// Applies a state permutation to the model; the distribution is unchanged.
HmmParams permute_states(const HmmParams &h, const std::vector<std::size_t> &perm) {
  HmmParams out = h;
  for (std::size_t i = 0; i < h.num_states; ++i) {
    out.pi[perm[i]] = h.pi[i];
    for (std::size_t j = 0; j < h.num_states; ++j)
      out.trans(perm[i], perm[j]) = h.trans(i, j);
    for (std::size_t a = 0; a < h.num_symbols; ++a)
      out.emit(perm[i], a) = h.emit(i, a);
  }
  return out;
}

}  // namespace

TEST(SelectGauges, SelfModeKeepsWindowOrder) {
  const auto windows = windows_from({{0, 1}, {1, 0}, {0, 0}});
  const GaugeSet g = select_gauges(windows, alphabet_of(2), GaugeMode::self, 0, 1);
  ASSERT_EQ(g.count(), 3u);
  EXPECT_EQ(g.sequences[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(g.sequences[1], (std::vector<int>{1, 0}));
  EXPECT_EQ(g.sequences[2], (std::vector<int>{0, 0}));
}

TEST(SelectGauges, SelfModeDeduplicates) {
  const auto windows = windows_from({{0, 1}, {0, 1}, {1, 1}});
  const GaugeSet g = select_gauges(windows, alphabet_of(2), GaugeMode::self, 0, 1);
  ASSERT_EQ(g.count(), 2u);
  EXPECT_EQ(g.sequences[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(g.sequences[1], (std::vector<int>{1, 1}));
}

TEST(SelectGauges, RandomModeIsReproducible) {
  const auto windows = windows_from({std::vector<int>(20, 0)});
  const EventAlphabet a = alphabet_of(4);
  const GaugeSet g1 = select_gauges(windows, a, GaugeMode::random, 10, 5);
  const GaugeSet g2 = select_gauges(windows, a, GaugeMode::random, 10, 5);
  ASSERT_EQ(g1.count(), 10u);
  EXPECT_EQ(g1.sequences, g2.sequences);
  for (const auto &seq : g1.sequences) {
    EXPECT_EQ(seq.size(), 20u);
    for (const int c : seq) {
      EXPECT_GE(c, 0);
      EXPECT_LT(c, 4);
    }
  }
}

TEST(SelectGauges, DifferentSeedsDiffer) {
  const auto windows = windows_from({std::vector<int>(20, 0)});
  const EventAlphabet a = alphabet_of(4);
  const GaugeSet g1 = select_gauges(windows, a, GaugeMode::random, 10, 1);
  const GaugeSet g2 = select_gauges(windows, a, GaugeMode::random, 10, 2);
  EXPECT_NE(g1.sequences, g2.sequences);
}

TEST(SelectGauges, EmptyWindowListIsAnError) {
  EXPECT_THROW(
      select_gauges({}, alphabet_of(2), GaugeMode::random, 10, 1),
      ConfigError);
}

TEST(GaugeVectorOp, CertainModelScoresItsOwnSequenceAtZero) {
  GaugeSet g;
  g.sequences = {std::vector<int>(5, 0)};
  const GaugeVector v = gauge_vector(certain_emitter(), g);
  ASSERT_EQ(v.values.size(), 1u);
  EXPECT_DOUBLE_EQ(v.values[0], 0.0);
}

TEST(GaugeVectorOp, ImpossibleSequenceGivesMinusInfinity) {
  GaugeSet g;
  g.sequences = {std::vector<int>(5, 0), {1, 0, 0, 0, 0}};
  const GaugeVector v = gauge_vector(certain_emitter(), g);
  ASSERT_EQ(v.values.size(), 2u);
  EXPECT_DOUBLE_EQ(v.values[0], 0.0);
  EXPECT_TRUE(std::isinf(v.values[1]));
  EXPECT_LT(v.values[1], 0.0);
}

TEST(GaugeVectorOp, InvariantUnderStatePermutation) {
  std::mt19937_64 gen(606);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t states = 2 + uniform_below(gen, 5);
    const std::size_t symbols = 2 + uniform_below(gen, 3);
    const HmmParams h = init_random(states, symbols, gen());
    std::vector<std::size_t> perm(states);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = states; i > 1; --i)
      std::swap(perm[i - 1], perm[uniform_below(gen, i)]);
    const HmmParams hp = permute_states(h, perm);

    GaugeSet g;
    for (int i = 0; i < 6; ++i) {
      std::vector<int> seq(20);
      for (auto &c : seq) c = static_cast<int>(uniform_below(gen, symbols));
      g.sequences.push_back(std::move(seq));
    }
    const GaugeVector a = gauge_vector(h, g);
    const GaugeVector b = gauge_vector(hp, g);
    for (std::size_t i = 0; i < a.values.size(); ++i)
      EXPECT_NEAR(a.values[i], b.values[i], 1e-12);
  }
}

TEST(FeatureMatrix, SingleWindowMatchesItsGaugeVector) {
  std::vector<int> seq(20);
  for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = int(i % 2);
  std::vector<FitReport> fits = {baum_welch(seq, 2, 2, 9)};
  GaugeSet g;
  g.sequences = {seq, std::vector<int>(20, 0)};
  const Matrix<double> f = feature_matrix(fits, g);
  ASSERT_EQ(f.rows(), 1u);
  ASSERT_EQ(f.cols(), 2u);
  const GaugeVector v = gauge_vector(fits[0].params, g);
  EXPECT_DOUBLE_EQ(f(0, 0), v.values[0]);
  EXPECT_DOUBLE_EQ(f(0, 1), v.values[1]);
}

TEST(FeatureMatrix, IdenticalWindowsWithIdenticalSeedsGiveIdenticalRows) {
  std::vector<int> seq(20);
  for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = int(i % 3);
  std::vector<FitReport> fits = {baum_welch(seq, 3, 3, 123),
                                 baum_welch(seq, 3, 3, 123)};
  GaugeSet g;
  g.sequences = {seq};
  const Matrix<double> f = feature_matrix(fits, g);
  EXPECT_DOUBLE_EQ(f(0, 0), f(1, 0));
}

TEST(FeatureMatrix, MismatchedSymbolCountsAreAnError) {
  std::vector<FitReport> fits(2);
  fits[0].params = init_random(2, 2, 1);
  fits[1].params = init_random(2, 3, 1);
  GaugeSet g;
  g.sequences = {{0, 1}};
  EXPECT_THROW(feature_matrix(fits, g), ConfigError);
}

TEST(FeatureMatrix, AnomalousRowsStandApartOnSyntheticData) {
  // Fit every sequence of the first synthetic experiment and check the two
  // anomalies sit farther from the normal centroid than any normal row does.
  const LabeledDataset data = gen_experiment1(3);
  const auto windows = windows_from(data.windows);
  std::vector<FitReport> fits(windows.size());
  for (std::size_t k = 0; k < windows.size(); ++k)
    fits[k] = baum_welch(windows[k].codes, 10, 4, 100 + k);
  const GaugeSet g =
      select_gauges(windows, data.alphabet, GaugeMode::random, 10, 7);
  Matrix<double> f = feature_matrix(fits, g);
  clamp_features(f);

  std::vector<double> centroid(f.cols(), 0.0);
  for (std::size_t k = 0; k < 60; ++k)
    for (std::size_t c = 0; c < f.cols(); ++c) centroid[c] += f(k, c) / 60.0;
  const auto dist_to_centroid = [&](std::size_t k) {
    double acc = 0.0;
    for (std::size_t c = 0; c < f.cols(); ++c) {
      const double d = f(k, c) - centroid[c];
      acc += d * d;
    }
    return std::sqrt(acc);
  };
  double max_normal = 0.0;
  for (std::size_t k = 0; k < 60; ++k)
    max_normal = std::max(max_normal, dist_to_centroid(k));
  EXPECT_GT(dist_to_centroid(60), max_normal);
  EXPECT_GT(dist_to_centroid(61), max_normal);
}

TEST(ClampFeatures, ReplacesEntriesBelowFloorAndCountsThem) {
  Matrix<double> f(2, 2, -1.0);
  f(0, 1) = -std::numeric_limits<double>::infinity();
  f(1, 0) = -2e4;
  EXPECT_EQ(clamp_features(f), 2u);
  EXPECT_DOUBLE_EQ(f(0, 1), kDefaultClampFloor);
  EXPECT_DOUBLE_EQ(f(1, 0), kDefaultClampFloor);
  EXPECT_DOUBLE_EQ(f(0, 0), -1.0);
}
