#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "gla/errors.hpp"
#include "gla/events.hpp"
#include "gla/hmm.hpp"
#include "gla/matrix.hpp"
#include "gla/random.hpp"

namespace gla {

enum class GaugeMode { random, self };

/// The fixed sequences every window's model is evaluated against. All gauges
/// share the window length; their log-likelihoods are the feature space.
struct GaugeSet {
  std::vector<std::vector<int>> sequences;
  GaugeMode mode = GaugeMode::random;

  std::size_t count() const { return sequences.size(); }
};

/// Per-window feature vector: log-likelihoods of each gauge sequence under
/// the window's model.
struct GaugeVector {
  int window_id = 0;
  std::vector<double> values;
};

constexpr double kDefaultClampFloor = -1e4;

/// Picks the gauge set. Random mode draws `gauge_count` iid uniform sequences
/// over the alphabet, deterministic by seed. Self mode uses the windows' own
/// code sequences in window order, keeping the first occurrence of
/// duplicates.
inline GaugeSet select_gauges(const std::vector<Window> &windows,
                              const EventAlphabet &alphabet, GaugeMode mode,
                              std::size_t gauge_count, std::uint64_t seed) {
  if (windows.empty()) throw ConfigError("empty window list");
  GaugeSet gauges;
  gauges.mode = mode;
  const std::size_t n = windows.front().codes.size();

  if (mode == GaugeMode::self) {
    std::set<std::vector<int>> seen;
    for (const auto &w : windows) {
      if (seen.insert(w.codes).second) gauges.sequences.push_back(w.codes);
    }
    return gauges;
  }

  if (gauge_count == 0) throw ConfigError("gauge count must be positive");
  std::mt19937_64 gen(seed);
  gauges.sequences.reserve(gauge_count);
  for (std::size_t g = 0; g < gauge_count; ++g) {
    std::vector<int> seq(n);
    for (auto &c : seq) c = static_cast<int>(uniform_below(gen, alphabet.size()));
    gauges.sequences.push_back(std::move(seq));
  }
  return gauges;
}

inline GaugeVector gauge_vector(const HmmParams &h, const GaugeSet &gauges,
                                int window_id = 0) {
  GaugeVector v;
  v.window_id = window_id;
  v.values.reserve(gauges.count());
  for (const auto &g : gauges.sequences) v.values.push_back(log_likelihood(h, g));
  return v;
}

/// K x m feature matrix: row k is window k's gauge vector.
inline Matrix<double> feature_matrix(const std::vector<FitReport> &fits,
                                     const GaugeSet &gauges) {
  if (fits.empty()) throw ConfigError("no fitted models");
  const std::size_t symbols = fits.front().params.num_symbols;
  for (const auto &f : fits) {
    if (f.params.num_symbols != symbols)
      throw ConfigError("dimension mismatch: models disagree on symbol count");
  }
  Matrix<double> features(fits.size(), gauges.count());
  for (std::size_t k = 0; k < fits.size(); ++k) {
    const GaugeVector v =
        gauge_vector(fits[k].params, gauges, static_cast<int>(k + 1));
    for (std::size_t i = 0; i < v.values.size(); ++i) features(k, i) = v.values[i];
  }
  return features;
}

/// Replaces entries below `floor` (notably -inf for probability-zero gauges)
/// with `floor` so the embedding sees finite coordinates. Returns how many
/// entries were clamped.
inline std::size_t clamp_features(Matrix<double> &features,
                                  double floor = kDefaultClampFloor) {
  std::size_t clamped = 0;
  for (double &v : features.data()) {
    if (v < floor) {
      v = floor;
      ++clamped;
    }
  }
  return clamped;
}

}  // namespace gla
