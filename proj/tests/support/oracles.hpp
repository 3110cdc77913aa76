#pragma once

// Reference implementations used as test oracles. They are written
// independently of the library code, favoring the textbook formulation over
// speed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "scsim/core/dataset.hpp"
#include "scsim/agent/records.hpp"
#include "scsim/query.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

/// Gaussian elimination with partial pivoting on a dense square system.
inline Vec solve(Mat a, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// PageRank as the solution of (I - d P^T) r = (1 - d)/n, with P the
/// row-stochastic transition matrix and dangling rows replaced by 1/n.
inline Vec pagerank(const std::vector<std::pair<int, int>>& edges, int n, double d = 0.85) {
  std::vector<std::set<int>> out(static_cast<std::size_t>(n));
  for (auto [u, v] : edges) out[static_cast<std::size_t>(u)].insert(v);
  Mat a(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
  for (int u = 0; u < n; ++u) {
    const auto& o = out[static_cast<std::size_t>(u)];
    for (int v = 0; v < n; ++v) {
      const double p = o.empty() ? 1.0 / n : (o.count(v) ? 1.0 / static_cast<double>(o.size()) : 0.0);
      a[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] -= d * p;
    }
  }
  return solve(a, Vec(static_cast<std::size_t>(n), (1.0 - d) / n));
}

/// Ordinary least squares with intercept via the normal equations on [1 X].
inline Vec ols_with_intercept(const Mat& X, const Vec& y) {
  const std::size_t n = X.size(), p = X.empty() ? 0 : X[0].size();
  Mat g(p + 1, Vec(p + 1, 0.0));
  Vec r(p + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Vec row{1.0};
    row.insert(row.end(), X[i].begin(), X[i].end());
    for (std::size_t a = 0; a <= p; ++a) {
      r[a] += row[a] * y[i];
      for (std::size_t b = 0; b <= p; ++b) g[a][b] += row[a] * row[b];
    }
  }
  return solve(g, r);
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix. Returns
/// eigenvalues (descending) and eigenvectors as columns in matching order.
inline std::pair<Vec, Mat> jacobi_eigen(Mat a) {
  const std::size_t n = a.size();
  Mat v(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
  Vec values;
  Mat vectors(n, Vec(n));
  for (std::size_t c = 0; c < n; ++c) {
    values.push_back(a[order[c]][order[c]]);
    for (std::size_t k = 0; k < n; ++k) vectors[k][c] = v[k][order[c]];
  }
  return {values, vectors};
}

/// Exact Shapley values by enumerating all coalitions; absent features take
/// their baseline value.
inline Vec shapley_exhaustive(const std::function<double(const Vec&)>& f, const Vec& x, const Vec& base) {
  const std::size_t n = x.size();
  std::vector<double> fact(n + 1, 1.0);
  for (std::size_t i = 1; i <= n; ++i) fact[i] = fact[i - 1] * static_cast<double>(i);
  auto eval = [&](unsigned mask) {
    Vec z = base;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) z[i] = x[i];
    return f(z);
  };
  Vec phi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (mask & (1u << i)) continue;
      const std::size_t s = static_cast<std::size_t>(__builtin_popcount(mask));
      const double w = fact[s] * fact[n - s - 1] / fact[n];
      phi[i] += w * (eval(mask | (1u << i)) - eval(mask));
    }
  return phi;
}

/// Gwet's AC1 written out term by term from the definition.
inline double gwet_ac1(const std::vector<std::vector<int>>& ratings, int K) {
  const double N = static_cast<double>(ratings.size());
  double pa = 0.0;
  std::vector<double> pi(static_cast<std::size_t>(K) + 1, 0.0);
  for (const auto& row : ratings) {
    const double R = static_cast<double>(row.size());
    for (int k = 1; k <= K; ++k) {
      double r = 0;
      for (int v : row) r += (v == k);
      pa += r * (r - 1.0) / (R * (R - 1.0));
      pi[static_cast<std::size_t>(k)] += r / R;
    }
  }
  pa /= N;
  double pe = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double p = pi[static_cast<std::size_t>(k)] / N;
    pe += p * (1.0 - p);
  }
  pe /= (K - 1);
  return (pa - pe) / (1.0 - pe);
}

/// Exhaustive candidate scoring: filter the pool, min-max normalize each
/// feature over it, score every firm and sort by (-score, id).
inline std::vector<scsim::Candidate> query(const scsim::Dataset& ds, const Eigen::MatrixXd& features,
                                           const scsim::QueryConstraint& q, const scsim::CompanySet& exclude,
                                           int k) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < ds.companies.size(); ++i) {
    const auto& c = ds.companies[i];
    if (exclude.count(c.id)) continue;
    if (!q.industrySet.empty() &&
        std::find(q.industrySet.begin(), q.industrySet.end(), c.industry) == q.industrySet.end())
      continue;
    pool.push_back(i);
  }
  std::vector<scsim::Candidate> all;
  for (std::size_t i : pool) {
    double score = 0.0;
    for (const auto& w : q.weightedScores) {
      const auto f = static_cast<Eigen::Index>(ds.feature_index(w.feature));
      double lo = 1e300, hi = -1e300;
      for (std::size_t j : pool) {
        lo = std::min(lo, features(static_cast<Eigen::Index>(j), f));
        hi = std::max(hi, features(static_cast<Eigen::Index>(j), f));
      }
      const double v = features(static_cast<Eigen::Index>(i), f);
      score += w.weight * (hi > lo ? (v - lo) / (hi - lo) : 0.5);
    }
    all.push_back({ds.companies[i].id, score});
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  if (static_cast<int>(all.size()) > k) all.resize(static_cast<std::size_t>(k));
  return all;
}

/// Committed edge set written as plain set algebra:
///   next = ((E u A) \ T) \ self
/// T holds every edge of E between a terminating pair (either direction), A
/// the edges of accepted replies.
inline scsim::EdgeSet commit(const scsim::EdgeSet& E, const std::vector<scsim::RequestRecord>& terminations,
                             const std::vector<std::pair<scsim::RequestRecord, scsim::ReplyRecord>>& replies) {
  using scsim::Edge;
  std::set<Edge> T, A;
  for (const auto& r : terminations)
    for (const auto& e : E)
      if ((e.supplier == r.requester && e.customer == r.target) || (e.supplier == r.target && e.customer == r.requester))
        T.insert(e);
  for (const auto& [q, p] : replies) {
    if (!p.accepted) continue;
    A.insert(p.direction == scsim::ReplyDirection::RequesterWantsToSupply ? Edge{q.requester, q.target}
                                                                          : Edge{q.target, q.requester});
  }
  std::set<Edge> uni(E.begin(), E.end());
  uni.insert(A.begin(), A.end());
  scsim::EdgeSet out;
  for (const auto& e : uni)
    if (!T.count(e) && e.supplier != e.customer) out.insert(e);
  return out;
}

}  // namespace oracle
