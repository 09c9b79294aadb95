#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "topiclabel/lda.hpp"

namespace topiclabel {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

inline constexpr double kDistributionTolerance = 1e-9;

namespace detail {

inline void check_distribution(std::span<const double> p, const char* name) {
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw Error(std::string("jsd: ") + name + " has a negative or NaN entry");
    s += v;
  }
  if (std::abs(s - 1.0) > kDistributionTolerance) {
    throw Error(std::string("jsd: ") + name + " does not sum to 1");
  }
}

}  // namespace detail

/// Jensen-Shannon divergence in bits, in [0, 1]; 0 log 0 is taken as 0.
inline double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error("jsd: length mismatch");
  detail::check_distribution(p, "p");
  detail::check_distribution(q, "q");
  double kl_p = 0.0, kl_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) kl_p += p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) kl_q += q[i] * std::log2(q[i] / m);
  }
  return std::clamp(0.5 * kl_p + 0.5 * kl_q, 0.0, 1.0);
}

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i pairs with values[i]
};

/// Cyclic Jacobi rotations for a symmetric matrix. Each eigenvector's
/// largest-magnitude component is made positive so output is deterministic.
inline EigenDecomposition symmetric_eigen(Matrix a, double tol = 1e-14, int max_sweeps = 100) {
  const std::size_t n = a.rows;
  if (a.cols != n) throw Error("symmetric_eigen: matrix not square");
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double scale = 0.0;
  for (double x : a.data) scale = std::max(scale, std::abs(x));
  for (int sweep = 0; sweep < max_sweeps && scale > 0.0; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= tol * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });
  EigenDecomposition out;
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.values.push_back(a(src, src));
    std::size_t arg = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (std::abs(v(r, src)) > std::abs(v(arg, src))) arg = r;
    }
    const double sign = v(arg, src) < 0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = sign * v(r, src);
  }
  return out;
}

/// Torgerson scaling: B = -1/2 J D^2 J, coordinates from the top `dim`
/// eigenpairs with negative eigenvalues clamped to zero. Columns beyond the
/// number of points are zero.
inline Matrix classical_mds(const Matrix& distance, std::size_t dim = 2) {
  const std::size_t n = distance.rows;
  if (distance.cols != n) throw Error("classical_mds: distance matrix not square");
  double scale = 0.0;
  for (double x : distance.data) scale = std::max(scale, std::abs(x));
  const double tol = 1e-9 * std::max(scale, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(distance(i, i)) > tol) throw Error("classical_mds: non-zero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      if (distance(i, j) < -tol) throw Error("classical_mds: negative distance");
      if (std::abs(distance(i, j) - distance(j, i)) > tol) {
        throw Error("classical_mds: distance matrix not symmetric");
      }
    }
  }
  Matrix coords(n, dim);
  if (n == 0) return coords;

  Matrix sq(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sq(i, j) = distance(i, j) * distance(i, j);
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += sq(i, j);
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      b(i, j) = -0.5 * (sq(i, j) - row_mean[i] - row_mean[j] + grand);

  const auto eig = symmetric_eigen(std::move(b));
  for (std::size_t c = 0; c < std::min(dim, n); ++c) {
    const double s = std::sqrt(std::max(eig.values[c], 0.0));
    for (std::size_t r = 0; r < n; ++r) coords(r, c) = s * eig.vectors(r, c);
  }
  for (std::size_t c = 0; c < dim; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += coords(r, c);
    mean /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) coords(r, c) -= mean;
  }
  return coords;
}

struct TopicMap {
  Matrix coords;                 // K x 2
  std::vector<double> prevalence;  // token-mass share per topic
  Matrix distance;               // K x K Jensen-Shannon divergence between phi rows
};

inline TopicMap intertopic_map(const LdaModel& model) {
  const auto K = static_cast<std::size_t>(model.num_topics);
  TopicMap map;
  map.distance = Matrix(K, K);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = i + 1; j < K; ++j) {
      map.distance(i, j) = map.distance(j, i) = jsd(model.phi_row(i), model.phi_row(j));
    }
  }
  map.coords = classical_mds(map.distance, 2);

  map.prevalence.assign(K, 0.0);
  double total = 0.0;
  for (std::size_t d = 0; d < model.num_docs(); ++d) {
    const double len = static_cast<double>(model.doc_lengths[d]);
    const auto row = model.theta_row(d);
    for (std::size_t k = 0; k < K; ++k) map.prevalence[k] += row[k] * len;
    total += len;
  }
  for (auto& p : map.prevalence) p = total > 0 ? p / total : 1.0 / static_cast<double>(K);
  return map;
}

}  // namespace topiclabel
