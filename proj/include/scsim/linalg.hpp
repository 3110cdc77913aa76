#pragma once

// Dense numeric kernels shared by the metric, forecasting, explanation and
// layout modules. Everything here is templated on the scalar type and works
// on Eigen expressions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace scsim::linalg {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct PageRankResult {
  Vector<Scalar> scores;
  int iterations = 0;
  bool converged = false;
};

/// Power iteration for PageRank on a directed adjacency matrix, where
/// adjacency(i, j) != 0 means an edge i -> j. Dangling nodes spread their mass
/// uniformly; teleport is uniform. Stops when the L1 change drops below `tol`.
template <typename Derived>
PageRankResult<typename Derived::Scalar> pagerank(const Eigen::MatrixBase<Derived>& adjacency,
                                                  typename Derived::Scalar damping,
                                                  typename Derived::Scalar tol, int maxIter) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = adjacency.rows();
  PageRankResult<Scalar> out;
  out.scores = Vector<Scalar>::Constant(n, Scalar(1) / Scalar(n));
  if (n == 0) return out;

  Vector<Scalar> outDegree(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar d = 0;
    for (Eigen::Index j = 0; j < n; ++j) d += adjacency(i, j) != Scalar(0) ? Scalar(1) : Scalar(0);
    outDegree(i) = d;
  }

  Vector<Scalar> next(n);
  for (int it = 0; it < maxIter; ++it) {
    Scalar dangling = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (outDegree(i) == Scalar(0)) dangling += out.scores(i);
    }
    next.setConstant((Scalar(1) - damping) / Scalar(n) + damping * dangling / Scalar(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (outDegree(i) == Scalar(0)) continue;
      const Scalar share = damping * out.scores(i) / outDegree(i);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (adjacency(i, j) != Scalar(0)) next(j) += share;
      }
    }
    // Renormalize against accumulated rounding so the sum stays at 1.
    next /= next.sum();
    const Scalar delta = (next - out.scores).cwiseAbs().sum();
    out.scores.swap(next);
    out.iterations = it + 1;
    if (delta < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

/// Column means and centered copy of X.
template <typename Derived>
std::pair<Vector<typename Derived::Scalar>, Matrix<typename Derived::Scalar>> center_columns(
    const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> mean = X.colwise().mean().transpose();
  Matrix<Scalar> centered = X.rowwise() - mean.transpose();
  return {std::move(mean), std::move(centered)};
}

template <typename Scalar>
struct LinearFit {
  Scalar intercept = 0;
  Vector<Scalar> coef;
  bool rankDeficient = false;
};

/// Ordinary least squares with an unpenalized intercept. Rank-deficient
/// designs get the minimum-norm solution (complete orthogonal decomposition)
/// and are flagged.
template <typename DerivedX, typename DerivedY>
LinearFit<typename DerivedX::Scalar> least_squares(const Eigen::MatrixBase<DerivedX>& X,
                                                   const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  auto [xMean, Xc] = center_columns(X);
  const Scalar yMean = y.mean();
  Vector<Scalar> yc = y.array() - yMean;
  LinearFit<Scalar> fit;
  if (X.cols() == 0) {
    fit.coef.resize(0);
    fit.intercept = yMean;
    return fit;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix<Scalar>> cod(Xc);
  fit.rankDeficient = cod.rank() < X.cols();
  fit.coef = cod.solve(yc);
  fit.intercept = yMean - xMean.dot(fit.coef);
  return fit;
}

/// Ridge regression with intercept: (Xc'Xc + alpha I) b = Xc'yc.
template <typename DerivedX, typename DerivedY>
LinearFit<typename DerivedX::Scalar> ridge(const Eigen::MatrixBase<DerivedX>& X,
                                           const Eigen::MatrixBase<DerivedY>& y,
                                           typename DerivedX::Scalar alpha) {
  using Scalar = typename DerivedX::Scalar;
  auto [xMean, Xc] = center_columns(X);
  const Scalar yMean = y.mean();
  Vector<Scalar> yc = y.array() - yMean;
  Matrix<Scalar> gram = Xc.transpose() * Xc;
  gram.diagonal().array() += alpha;
  LinearFit<Scalar> fit;
  fit.coef = gram.ldlt().solve(Xc.transpose() * yc);
  fit.intercept = yMean - xMean.dot(fit.coef);
  return fit;
}

template <typename Scalar>
inline Scalar soft_threshold(Scalar z, Scalar gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return Scalar(0);
}

template <typename Scalar>
struct LassoFit {
  Scalar intercept = 0;
  Vector<Scalar> coef;
  int sweeps = 0;
  bool converged = false;
};

/// Coordinate descent for
///   (1 / 2n) ||y - b0 - X b||^2 + lambda ||b||_1
/// with an unpenalized intercept. Covariance updates on the centered design;
/// stops when the largest coefficient change in a sweep is below `tol`.
template <typename DerivedX, typename DerivedY>
LassoFit<typename DerivedX::Scalar> lasso(const Eigen::MatrixBase<DerivedX>& X,
                                          const Eigen::MatrixBase<DerivedY>& y,
                                          typename DerivedX::Scalar lambda,
                                          typename DerivedX::Scalar tol = 1e-8, int maxSweeps = 10000) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  auto [xMean, Xc] = center_columns(X);
  const Scalar yMean = y.mean();
  Vector<Scalar> yc = y.array() - yMean;

  Matrix<Scalar> gram = (Xc.transpose() * Xc) / Scalar(n);
  Vector<Scalar> xty = (Xc.transpose() * yc) / Scalar(n);

  LassoFit<Scalar> fit;
  fit.coef = Vector<Scalar>::Zero(p);
  // grad(j) = (1/n) x_j' (y - X b)
  Vector<Scalar> grad = xty;
  for (int sweep = 0; sweep < maxSweeps; ++sweep) {
    Scalar maxDelta = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const Scalar gjj = gram(j, j);
      if (gjj <= Scalar(0)) continue;
      const Scalar old = fit.coef(j);
      const Scalar updated = soft_threshold(grad(j) + gjj * old, lambda) / gjj;
      const Scalar delta = updated - old;
      if (delta != Scalar(0)) {
        fit.coef(j) = updated;
        grad -= gram.col(j) * delta;
        maxDelta = std::max(maxDelta, std::abs(delta));
      }
    }
    fit.sweeps = sweep + 1;
    if (maxDelta < tol) {
      fit.converged = true;
      break;
    }
  }
  fit.intercept = yMean - xMean.dot(fit.coef);
  return fit;
}

/// Quantile by linear interpolation between order statistics, placing the
/// k-th smallest of n samples at probability (k - 0.5) / n. Probabilities
/// outside the first/last midpoint clamp to the extremes.
template <typename Scalar>
Scalar quantile(std::vector<Scalar> samples, Scalar p) {
  if (samples.empty()) return std::numeric_limits<Scalar>::quiet_NaN();
  std::sort(samples.begin(), samples.end());
  const Scalar n = static_cast<Scalar>(samples.size());
  Scalar pos = p * n - Scalar(0.5);
  pos = std::clamp(pos, Scalar(0), n - Scalar(1));
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  const Scalar frac = pos - static_cast<Scalar>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

template <typename Scalar>
struct PcaProjection {
  Matrix<Scalar> coords;        // rows x components
  Matrix<Scalar> loadings;      // cols x components
  Vector<Scalar> eigenvalues;   // descending
};

/// Principal-component projection of the (already standardized) rows of Z onto
/// the top `components` axes. Each axis is sign-fixed so its largest-magnitude
/// loading is positive. Missing components (rank deficit) project to zero.
template <typename Derived>
PcaProjection<typename Derived::Scalar> pca(const Eigen::MatrixBase<Derived>& Z, Eigen::Index components) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = Z.rows();
  const Eigen::Index d = Z.cols();
  PcaProjection<Scalar> out;
  out.coords = Matrix<Scalar>::Zero(n, components);
  out.loadings = Matrix<Scalar>::Zero(d, components);
  out.eigenvalues = Vector<Scalar>::Zero(components);
  if (d == 0 || n == 0) return out;

  Matrix<Scalar> cov = (Z.transpose() * Z) / Scalar(n);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(cov);
  const auto& values = eig.eigenvalues();   // ascending
  const auto& vectors = eig.eigenvectors();
  const Scalar scale = std::max(Scalar(1), values.cwiseAbs().maxCoeff());
  for (Eigen::Index c = 0; c < components && c < d; ++c) {
    const Eigen::Index src = d - 1 - c;
    if (values(src) <= Scalar(1e-12) * scale) break;
    Vector<Scalar> axis = vectors.col(src);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < Scalar(0)) axis = -axis;
    out.loadings.col(c) = axis;
    out.eigenvalues(c) = values(src);
    out.coords.col(c) = Z * axis;
  }
  return out;
}

}  // namespace scsim::linalg
