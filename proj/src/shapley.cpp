#include "scsim/shapley.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "scsim/error.hpp"

namespace scsim {

double Attribution::phi_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(Errc::UnknownFeature, name);
  return phi(static_cast<Eigen::Index>(it - names.begin()));
}

Attribution linear_shapley(double intercept, const Eigen::VectorXd& coef, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& baseline) {
  if (coef.size() != x.size() || baseline.size() != x.size()) {
    throw Error(Errc::DimensionMismatch, "coef " + std::to_string(coef.size()) + ", x " +
                                             std::to_string(x.size()) + ", baseline " +
                                             std::to_string(baseline.size()));
  }
  Attribution a;
  a.baseValue = intercept + coef.dot(baseline);
  a.phi = coef.cwiseProduct(x - baseline);
  a.prediction = intercept + coef.dot(x);
  return a;
}

Attribution sampled_shapley(const std::function<double(const Eigen::VectorXd&)>& model,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& baseline, int permutations,
                            std::uint64_t seed) {
  if (baseline.size() != x.size()) throw Error(Errc::DimensionMismatch, "x and baseline differ in size");
  if (permutations < 1) throw Error(Errc::InvalidConfig, "permutations must be >= 1");
  const auto d = x.size();
  Attribution a;
  a.baseValue = model(baseline);
  a.prediction = model(x);
  a.phi = Eigen::VectorXd::Zero(d);
  if (d == 0) return a;

  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  auto walk = [&](auto first, auto last) {
    Eigen::VectorXd z = baseline;
    double prev = a.baseValue;
    for (auto it = first; it != last; ++it) {
      z(*it) = x(*it);
      const double cur = model(z);
      a.phi(*it) += cur - prev;
      prev = cur;
    }
  };

  int done = 0;
  while (done < permutations) {
    std::shuffle(order.begin(), order.end(), rng);
    walk(order.begin(), order.end());
    ++done;
    if (done < permutations) {
      walk(order.rbegin(), order.rend());
      ++done;
    }
  }
  a.phi /= static_cast<double>(permutations);
  return a;
}

}  // namespace scsim
