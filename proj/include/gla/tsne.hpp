#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gla/errors.hpp"
#include "gla/matrix.hpp"
#include "gla/random.hpp"

namespace gla {

/// Symmetric joint input affinities for t-SNE.
struct AffinityMatrix {
  Matrix<double> joint;       ///< K x K, zero diagonal, off-diagonal sums to 1
  double perplexity = 0.0;
  std::vector<double> betas;  ///< per-row precisions found by the search
};

struct Embedding2D {
  std::vector<Point2> points;
  std::vector<double> kl_trace;  ///< KL divergence per iteration (index 0 = init)
};

struct TsneOptions {
  std::size_t iters = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_until = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::size_t momentum_switch = 250;
  double init_stddev = 1e-4;
};

namespace detail {

inline Matrix<double> squared_distances(const Matrix<double> &features) {
  const std::size_t n = features.rows();
  Matrix<double> d2(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < features.cols(); ++c) {
        const double diff = features(i, c) - features(j, c);
        acc += diff * diff;
      }
      d2(i, j) = acc;
      d2(j, i) = acc;
    }
  }
  return d2;
}

/// Entropy (nats) and conditional distribution of row i at precision beta.
/// Exponents are shifted by the row minimum to avoid underflow.
inline double row_entropy(const Matrix<double> &d2, std::size_t i, double beta,
                          std::vector<double> &probs) {
  const std::size_t n = d2.rows();
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j)
    if (j != i && d2(i, j) < min_d) min_d = d2(i, j);

  double sum_w = 0.0;
  double sum_wd = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      probs[j] = 0.0;
      continue;
    }
    const double shifted = d2(i, j) - min_d;
    const double w = std::exp(-beta * shifted);
    probs[j] = w;
    sum_w += w;
    sum_wd += w * shifted;
  }
  const double entropy = std::log(sum_w) + beta * sum_wd / sum_w;
  for (std::size_t j = 0; j < n; ++j) probs[j] /= sum_w;
  return entropy;
}

}  // namespace detail

/// Perplexity-calibrated joint affinities: each row's Gaussian bandwidth is
/// found by binary search until the conditional entropy matches
/// log(perplexity) within 1e-4, then P = (P_cond + P_cond^T) / 2K.
inline AffinityMatrix affinities(const Matrix<double> &features,
                                 double perplexity) {
  const std::size_t n = features.rows();
  if (n < 2) throw ConfigError("need at least two points");
  if (perplexity >= static_cast<double>(n))
    throw ConfigError("perplexity too large");
  if (perplexity <= 1.0) throw ConfigError("perplexity must exceed 1");

  const Matrix<double> d2 = detail::squared_distances(features);
  const double target = std::log(perplexity);
  constexpr double tol = 1e-4;
  constexpr int max_steps = 200;

  Matrix<double> conditional(n, n, 0.0);
  AffinityMatrix result;
  result.perplexity = perplexity;
  result.betas.assign(n, 1.0);

  std::vector<double> probs(n);
  for (std::size_t i = 0; i < n; ++i) {
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (int step = 0; step < max_steps; ++step) {
      const double entropy = detail::row_entropy(d2, i, beta, probs);
      const double diff = entropy - target;
      if (std::abs(diff) <= tol) break;
      if (diff > 0.0) {  // entropy too high: sharpen
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = (beta + lo) / 2.0;
      }
    }
    result.betas[i] = beta;
    for (std::size_t j = 0; j < n; ++j) conditional(i, j) = probs[j];
  }

  result.joint = Matrix<double>(n, n, 0.0);
  const double norm = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        result.joint(i, j) = (conditional(i, j) + conditional(j, i)) / norm;
  return result;
}

namespace detail {

/// Student-t kernel weights w_ij = 1 / (1 + |y_i - y_j|^2) and their total.
inline double student_weights(const std::vector<Point2> &y, Matrix<double> &w) {
  const std::size_t n = y.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y[i][0] - y[j][0];
      const double dy = y[i][1] - y[j][1];
      const double v = 1.0 / (1.0 + dx * dx + dy * dy);
      w(i, j) = v;
      w(j, i) = v;
      total += 2.0 * v;
    }
  }
  return total;
}

}  // namespace detail

/// KL(P || Q) of the embedding `y` under joint affinities `joint`.
inline double kl_divergence(const Matrix<double> &joint,
                            const std::vector<Point2> &y) {
  const std::size_t n = y.size();
  Matrix<double> w(n, n, 0.0);
  const double total = detail::student_weights(y, w);
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double p = joint(i, j);
      if (p <= 0.0) continue;
      const double q = std::max(w(i, j) / total, 1e-300);
      kl += p * std::log(p / q);
    }
  }
  return kl;
}

/// Analytic KL gradient: dC/dy_i = 4 sum_j (p_ij - q_ij) w_ij (y_i - y_j).
/// `exaggeration` scales p_ij; pass 1 for the plain objective.
inline std::vector<Point2> kl_gradient(const Matrix<double> &joint,
                                       const std::vector<Point2> &y,
                                       double exaggeration = 1.0) {
  const std::size_t n = y.size();
  Matrix<double> w(n, n, 0.0);
  const double total = detail::student_weights(y, w);
  std::vector<Point2> grad(n, Point2{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    double gx = 0.0;
    double gy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double q = w(i, j) / total;
      const double mult = (exaggeration * joint(i, j) - q) * w(i, j);
      gx += mult * (y[i][0] - y[j][0]);
      gy += mult * (y[i][1] - y[j][1]);
    }
    grad[i][0] = 4.0 * gx;
    grad[i][1] = 4.0 * gy;
  }
  return grad;
}

/// Exact t-SNE to 2D: gradient descent on KL(P || Q) with early
/// exaggeration, momentum, adaptive per-coordinate gains, and per-iteration
/// recentering. Deterministic for fixed inputs and seed.
inline Embedding2D tsne(const Matrix<double> &features, double perplexity,
                        std::uint64_t seed, const TsneOptions &opt = {}) {
  if (opt.iters == 0) throw ConfigError("iteration count must be positive");
  const AffinityMatrix aff = affinities(features, perplexity);
  const Matrix<double> &p = aff.joint;
  const std::size_t n = features.rows();

  Embedding2D emb;
  emb.points.assign(n, Point2{0.0, 0.0});
  std::mt19937_64 gen(seed);
  for (auto &pt : emb.points) {
    pt[0] = opt.init_stddev * gaussian(gen);
    pt[1] = opt.init_stddev * gaussian(gen);
  }
  emb.kl_trace.push_back(kl_divergence(p, emb.points));

  std::vector<Point2> velocity(n, Point2{0.0, 0.0});
  std::vector<Point2> gains(n, Point2{1.0, 1.0});

  for (std::size_t it = 0; it < opt.iters; ++it) {
    const double exag = it < opt.exaggeration_until ? opt.early_exaggeration : 1.0;
    const double momentum =
        it < opt.momentum_switch ? opt.initial_momentum : opt.final_momentum;
    const std::vector<Point2> grad = kl_gradient(p, emb.points, exag);

    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) {
        const bool same_sign = (grad[i][c] > 0.0) == (velocity[i][c] > 0.0);
        gains[i][c] = same_sign ? gains[i][c] * 0.8 : gains[i][c] + 0.2;
        if (gains[i][c] < 0.01) gains[i][c] = 0.01;
        velocity[i][c] =
            momentum * velocity[i][c] - opt.learning_rate * gains[i][c] * grad[i][c];
        emb.points[i][c] += velocity[i][c];
      }
      mean_x += emb.points[i][0];
      mean_y += emb.points[i][1];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    for (auto &pt : emb.points) {
      pt[0] -= mean_x;
      pt[1] -= mean_y;
      if (!std::isfinite(pt[0]) || !std::isfinite(pt[1]))
        throw NumericError("non-finite t-SNE update at iteration " +
                           std::to_string(it));
    }
    emb.kl_trace.push_back(kl_divergence(p, emb.points));
  }
  return emb;
}

inline Embedding2D tsne(const Matrix<double> &features, double perplexity,
                        std::size_t iters, double learning_rate,
                        std::uint64_t seed) {
  TsneOptions opt;
  opt.iters = iters;
  opt.learning_rate = learning_rate;
  return tsne(features, perplexity, seed, opt);
}

}  // namespace gla
