#include "scsim/query.hpp"

#include <algorithm>
#include <cmath>

#include "scsim/core/network.hpp"
#include "scsim/error.hpp"

namespace scsim {

void validate_constraint(const Dataset& ds, const QueryConstraint& constraint) {
  for (const auto& ws : constraint.weightedScores) {
    ds.feature_index(ws.feature);
    if (!std::isfinite(ws.weight)) throw Error(Errc::NonFiniteValue, "weight for " + ws.feature);
  }
}

QueryResult query_candidates(const Dataset& ds, const Eigen::MatrixXd& features,
                             const QueryConstraint& constraint, const CompanySet& exclude, int k) {
  if (k < 1) throw Error(Errc::InvalidConfig, "k must be >= 1");
  validate_constraint(ds, constraint);

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < ds.companies.size(); ++i) {
    const auto& c = ds.companies[i];
    if (exclude.contains(c.id)) continue;
    if (!constraint.industrySet.empty() &&
        std::find(constraint.industrySet.begin(), constraint.industrySet.end(), c.industry) ==
            constraint.industrySet.end()) {
      continue;
    }
    pool.push_back(i);
  }
  QueryResult result;
  if (pool.empty()) {
    result.emptyPool = true;
    return result;
  }

  std::vector<double> scores(pool.size(), 0.0);
  for (const auto& ws : constraint.weightedScores) {
    const auto f = static_cast<Eigen::Index>(ds.feature_index(ws.feature));
    double lo = features(static_cast<Eigen::Index>(pool[0]), f);
    double hi = lo;
    for (auto i : pool) {
      lo = std::min(lo, features(static_cast<Eigen::Index>(i), f));
      hi = std::max(hi, features(static_cast<Eigen::Index>(i), f));
    }
    for (std::size_t p = 0; p < pool.size(); ++p) {
      const double v = features(static_cast<Eigen::Index>(pool[p]), f);
      const double normalized = hi > lo ? (v - lo) / (hi - lo) : 0.5;
      scores[p] += ws.weight * normalized;
    }
  }

  result.candidates.reserve(pool.size());
  for (std::size_t p = 0; p < pool.size(); ++p) {
    result.candidates.push_back(Candidate{ds.companies[pool[p]].id, scores[p]});
  }
  std::sort(result.candidates.begin(), result.candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  if (result.candidates.size() > static_cast<std::size_t>(k)) result.candidates.resize(static_cast<std::size_t>(k));
  return result;
}

QueryResult query_candidates(const Dataset& ds, int t, const QueryConstraint& constraint,
                             const CompanySet& exclude, int k) {
  return query_candidates(ds, ds.feature_matrix(t), constraint, exclude, k);
}

CompanySet exclusion_set(const EdgeSet& edges, const CompanyId& id) {
  auto out = partners_of(edges, id);
  out.insert(id);
  return out;
}

CompanySet exclusion_set(const Dataset& ds, const CompanyId& id, int t) {
  ds.index_of(id);
  return exclusion_set(*ds.network.at(t), id);
}

}  // namespace scsim
