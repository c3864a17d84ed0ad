#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gla/events.hpp"
#include "gla/matrix.hpp"
#include "gla/random.hpp"

namespace gla {

/// Pre-cut labeled sequences with ground truth, for end-to-end evaluation.
struct LabeledDataset {
  EventAlphabet alphabet;
  std::vector<std::vector<int>> windows;  ///< standalone sequences, equal length
  std::vector<int> labels;                ///< 1 = anomalous
  std::string description;
};

/// 60 noisy repetitions of (A, B, C, D) x 5 plus two anomalies: the reversed
/// pattern (D, C, B, A) x 5 and the constant sequence A x 20. Noise replaces
/// two distinct positions per normal sequence with uniform random symbols.
inline LabeledDataset gen_experiment1(std::uint64_t seed) {
  LabeledDataset data;
  data.description = "repeating-pattern sequences with two injected anomalies";
  for (const char *s : {"A", "B", "C", "D"}) data.alphabet.add(s);

  std::vector<int> pattern;
  for (int rep = 0; rep < 5; ++rep)
    for (int c = 0; c < 4; ++c) pattern.push_back(c);

  std::mt19937_64 gen(seed);
  for (int k = 0; k < 60; ++k) {
    std::vector<int> seq = pattern;
    const std::size_t p1 = uniform_below(gen, seq.size());
    std::size_t p2 = uniform_below(gen, seq.size() - 1);
    if (p2 >= p1) ++p2;
    seq[p1] = static_cast<int>(uniform_below(gen, 4));
    seq[p2] = static_cast<int>(uniform_below(gen, 4));
    data.windows.push_back(std::move(seq));
    data.labels.push_back(0);
  }

  std::vector<int> reversed;
  for (int rep = 0; rep < 5; ++rep)
    for (int c = 3; c >= 0; --c) reversed.push_back(c);
  data.windows.push_back(std::move(reversed));
  data.labels.push_back(1);

  data.windows.emplace_back(20, 0);  // constant A
  data.labels.push_back(1);
  return data;
}

/// 500 copies of t1 = (A, A, B, B) x 5 + A and a single t2 whose bigram
/// statistics match t1 exactly (both give the uniform 0.5 transition matrix)
/// while the longer-range structure differs. t2 is the labeled anomaly.
inline LabeledDataset gen_experiment2() {
  LabeledDataset data;
  data.description = "bigram-identical sequences distinguishable only by memory";
  data.alphabet.add("A");
  data.alphabet.add("B");

  std::vector<int> t1;
  for (int rep = 0; rep < 5; ++rep) {
    t1.insert(t1.end(), {0, 0, 1, 1});
  }
  t1.push_back(0);

  std::vector<int> t2 = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1,
                         1, 0, 1, 0, 1, 0, 1, 0, 1, 0};

  for (int k = 0; k < 500; ++k) {
    data.windows.push_back(t1);
    data.labels.push_back(0);
  }
  data.windows.push_back(t2);
  data.labels.push_back(1);
  return data;
}

/// First-order transition probabilities of one sequence (row-normalized
/// bigram counts over `symbols` states).
inline Matrix<double> bigram_transition_matrix(const std::vector<int> &seq,
                                               std::size_t symbols) {
  Matrix<double> counts(symbols, symbols, 0.0);
  for (std::size_t t = 0; t + 1 < seq.size(); ++t)
    counts(seq[t], seq[t + 1]) += 1.0;
  for (std::size_t i = 0; i < symbols; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < symbols; ++j) total += counts(i, j);
    if (total > 0.0)
      for (std::size_t j = 0; j < symbols; ++j) counts(i, j) /= total;
  }
  return counts;
}

}  // namespace gla
