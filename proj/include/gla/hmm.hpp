#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gla/errors.hpp"
#include "gla/matrix.hpp"
#include "gla/random.hpp"

namespace gla {

/// Discrete-emission HMM parameters. Every row of pi, trans, and emit is a
/// probability distribution.
struct HmmParams {
  std::size_t num_states = 0;
  std::size_t num_symbols = 0;
  std::vector<double> pi;  ///< length S
  Matrix<double> trans;    ///< S x S, trans(i, j) = P(j | i)
  Matrix<double> emit;     ///< S x A, emit(i, a) = P(a | i)
};

struct FitReport {
  HmmParams params;
  std::vector<double> log_likelihood_trace;  ///< one entry per evaluated model
  std::size_t iterations_run = 0;            ///< EM updates performed
  bool converged = false;
};

/// Random model: every row drawn as normalized uniform positives.
/// Deterministic for a given (states, symbols, seed).
inline HmmParams init_random(std::size_t states, std::size_t symbols,
                             std::uint64_t seed) {
  if (states == 0) throw ConfigError("state count must be positive");
  if (symbols == 0) throw ConfigError("symbol count must be positive");
  HmmParams p;
  p.num_states = states;
  p.num_symbols = symbols;
  p.pi.resize(states);
  p.trans = Matrix<double>(states, states);
  p.emit = Matrix<double>(states, symbols);
  std::mt19937_64 gen(seed);
  fill_stochastic_row(gen, p.pi);
  for (std::size_t i = 0; i < states; ++i) fill_stochastic_row(gen, p.trans.row(i));
  for (std::size_t i = 0; i < states; ++i) fill_stochastic_row(gen, p.emit.row(i));
  return p;
}

namespace detail {

inline void check_codes(const HmmParams &p, std::span<const int> seq) {
  for (const int c : seq) {
    if (c < 0 || static_cast<std::size_t>(c) >= p.num_symbols)
      throw ConfigError("symbol code out of range");
  }
}

/// Scaled forward pass. alpha(t, i) holds P(state_t = i | o_1..o_t) and
/// scale[t] the per-step normalizer, so that log P(o_1..o_T) = sum log scale.
/// Returns -inf (with scale[t] = 0 from the failing step on) for sequences of
/// probability zero.
inline double forward_scaled(const HmmParams &p, std::span<const int> seq,
                             Matrix<double> &alpha, std::vector<double> &scale) {
  const std::size_t S = p.num_states;
  const std::size_t T = seq.size();
  alpha = Matrix<double>(T, S);
  scale.assign(T, 0.0);

  double sum = 0.0;
  for (std::size_t i = 0; i < S; ++i) {
    alpha(0, i) = p.pi[i] * p.emit(i, seq[0]);
    sum += alpha(0, i);
  }
  scale[0] = sum;
  if (sum == 0.0) return -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < S; ++i) alpha(0, i) /= sum;
  double log_like = std::log(sum);

  for (std::size_t t = 1; t < T; ++t) {
    sum = 0.0;
    for (std::size_t i = 0; i < S; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < S; ++j) acc += alpha(t - 1, j) * p.trans(j, i);
      alpha(t, i) = acc * p.emit(i, seq[t]);
      sum += alpha(t, i);
    }
    scale[t] = sum;
    if (sum == 0.0) return -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < S; ++i) alpha(t, i) /= sum;
    log_like += std::log(sum);
  }
  return log_like;
}

/// Backward pass matching forward_scaled's normalization, so that
/// gamma(t, i) = alpha(t, i) * beta(t, i) without further scaling.
inline void backward_scaled(const HmmParams &p, std::span<const int> seq,
                            const std::vector<double> &scale,
                            Matrix<double> &beta) {
  const std::size_t S = p.num_states;
  const std::size_t T = seq.size();
  beta = Matrix<double>(T, S);
  for (std::size_t i = 0; i < S; ++i) beta(T - 1, i) = 1.0;
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t i = 0; i < S; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < S; ++j)
        acc += p.trans(i, j) * p.emit(j, seq[t + 1]) * beta(t + 1, j);
      beta(t, i) = acc / scale[t + 1];
    }
  }
}

/// Normalizes `row` after adding `floor` to each entry, so no re-estimated
/// row can collapse to all-zero when a symbol or transition is unused.
inline void normalize_with_floor(std::span<double> row, double floor) {
  double sum = 0.0;
  for (double &v : row) {
    v += floor;
    sum += v;
  }
  for (double &v : row) v /= sum;
}

}  // namespace detail

/// log P(seq | h) by the scaled forward algorithm; exactly -inf when the
/// model assigns the sequence probability zero.
inline double log_likelihood(const HmmParams &h, std::span<const int> seq) {
  if (seq.empty()) throw ConfigError("sequence must be nonempty");
  detail::check_codes(h, seq);
  Matrix<double> alpha;
  std::vector<double> scale;
  return detail::forward_scaled(h, seq, alpha, scale);
}

/// Baum-Welch EM on a single sequence from a seeded random start. Stops when
/// the log-likelihood improves by less than `tol` or after `max_iters`
/// updates. The trace holds the log-likelihood of each evaluated model,
/// starting with the initial one; EM guarantees it is non-decreasing.
inline FitReport baum_welch(std::span<const int> seq, std::size_t states,
                            std::size_t symbols, std::uint64_t seed,
                            std::size_t max_iters = 100, double tol = 1e-6,
                            double row_floor = 1e-10) {
  if (seq.size() < 2) throw ConfigError("sequence too short to train on");

  FitReport report;
  report.params = init_random(states, symbols, seed);
  HmmParams &p = report.params;
  detail::check_codes(p, seq);

  const std::size_t S = states;
  const std::size_t T = seq.size();
  Matrix<double> alpha, beta;
  std::vector<double> scale;
  std::vector<double> gamma(S);

  double log_like = detail::forward_scaled(p, seq, alpha, scale);
  report.log_likelihood_trace.push_back(log_like);

  Matrix<double> trans_num(S, S);
  Matrix<double> emit_num(S, symbols);

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    detail::backward_scaled(p, seq, scale, beta);

    trans_num = Matrix<double>(S, S);
    emit_num = Matrix<double>(S, symbols);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t i = 0; i < S; ++i) {
        gamma[i] = alpha(t, i) * beta(t, i);
        emit_num(i, seq[t]) += gamma[i];
      }
      if (t == 0)
        for (std::size_t i = 0; i < S; ++i) p.pi[i] = gamma[i];
      if (t + 1 < T) {
        for (std::size_t i = 0; i < S; ++i) {
          const double a_ti = alpha(t, i);
          for (std::size_t j = 0; j < S; ++j) {
            trans_num(i, j) += a_ti * p.trans(i, j) * p.emit(j, seq[t + 1]) *
                               beta(t + 1, j) / scale[t + 1];
          }
        }
      }
    }
    for (std::size_t i = 0; i < S; ++i) {
      detail::normalize_with_floor(trans_num.row(i), row_floor);
      detail::normalize_with_floor(emit_num.row(i), row_floor);
      for (std::size_t j = 0; j < S; ++j) p.trans(i, j) = trans_num(i, j);
      for (std::size_t a = 0; a < symbols; ++a) p.emit(i, a) = emit_num(i, a);
    }
    ++report.iterations_run;

    const double next = detail::forward_scaled(p, seq, alpha, scale);
    report.log_likelihood_trace.push_back(next);
    if (next - log_like < tol) {
      report.converged = true;
      break;
    }
    log_like = next;
  }
  return report;
}

/// Runs `restarts` independently seeded fits and keeps the best final
/// log-likelihood. Restart r reuses `seed` offset into a disjoint range.
inline FitReport fit_best(std::span<const int> seq, std::size_t states,
                          std::size_t symbols, std::uint64_t seed,
                          std::size_t restarts = 1, std::size_t max_iters = 100,
                          double tol = 1e-6) {
  if (restarts == 0) throw ConfigError("restart count must be positive");
  FitReport best;
  for (std::size_t r = 0; r < restarts; ++r) {
    FitReport fit = baum_welch(seq, states, symbols,
                               seed + r * 0x100000000ULL, max_iters, tol);
    if (r == 0 || fit.log_likelihood_trace.back() >
                      best.log_likelihood_trace.back()) {
      best = std::move(fit);
    }
  }
  return best;
}

}  // namespace gla
