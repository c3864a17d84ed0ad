#pragma once

#include <cstddef>
#include <unordered_set>
#include <vector>

#include "gla/errors.hpp"

namespace gla {

struct Metrics {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  ///< a 0/0 ratio was resolved to 0 by convention
};

/// Confusion counts and derived scores of a detected-id set against a
/// labeled-id set over windows 0..total-1.
inline Metrics score(const std::vector<int> &detected,
                     const std::vector<int> &labeled, std::size_t total) {
  const auto check = [total](const std::vector<int> &ids) {
    for (const int id : ids)
      if (id < 0 || static_cast<std::size_t>(id) >= total)
        throw ConfigError("window id out of range");
  };
  check(detected);
  check(labeled);

  const std::unordered_set<int> det(detected.begin(), detected.end());
  const std::unordered_set<int> lab(labeled.begin(), labeled.end());

  Metrics m;
  for (const int id : det) {
    if (lab.count(id))
      ++m.true_positives;
    else
      ++m.false_positives;
  }
  for (const int id : lab)
    if (!det.count(id)) ++m.false_negatives;

  const double tp = static_cast<double>(m.true_positives);
  if (m.true_positives + m.false_positives > 0) {
    m.precision = tp / static_cast<double>(m.true_positives + m.false_positives);
  } else {
    m.degenerate = true;
  }
  if (m.true_positives + m.false_negatives > 0) {
    m.recall = tp / static_cast<double>(m.true_positives + m.false_negatives);
  } else {
    m.degenerate = true;
  }
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.degenerate = true;
  }
  return m;
}

}  // namespace gla
