#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scsim {

/// Additive decomposition of one prediction: baseValue + sum(phi) == prediction.
struct Attribution {
  double baseValue = 0.0;
  double prediction = 0.0;
  Eigen::VectorXd phi;
  std::vector<std::string> names;

  /// Throws Errc::UnknownFeature.
  double phi_of(const std::string& name) const;
};

/// Exact Shapley values of an affine model against a baseline point:
/// phi_i = coef_i * (x_i - baseline_i). Throws Errc::DimensionMismatch.
Attribution linear_shapley(double intercept, const Eigen::VectorXd& coef, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& baseline);

inline constexpr int kDefaultShapleyPermutations = 2048;

/// Interventional Shapley estimate for an arbitrary model: features absent
/// from a coalition take their baseline value. Uses `permutations` random
/// orderings drawn in antithetic pairs (each ordering followed by its
/// reverse) from a seeded generator, so results are reproducible and every
/// estimate satisfies efficiency exactly. Throws Errc::DimensionMismatch.
Attribution sampled_shapley(const std::function<double(const Eigen::VectorXd&)>& model,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& baseline,
                            int permutations = kDefaultShapleyPermutations, std::uint64_t seed = 0);

}  // namespace scsim
