#pragma once

#include <string>
#include <vector>

#include "scsim/core/dataset.hpp"

namespace scsim {

struct WeightedScore {
  std::string feature;
  double weight = 0.0;

  friend bool operator==(const WeightedScore&, const WeightedScore&) = default;
};

/// Stage-II partner requirement. An empty industry set is unconstrained.
/// Negative weights penalize a feature.
struct QueryConstraint {
  std::vector<std::string> industrySet;
  std::vector<WeightedScore> weightedScores;

  friend bool operator==(const QueryConstraint&, const QueryConstraint&) = default;
};

struct Candidate {
  CompanyId id;
  double score = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Descending score, ties by ascending id, at most k entries.
using CandidateList = std::vector<Candidate>;

struct QueryResult {
  CandidateList candidates;
  bool emptyPool = false;
};

inline constexpr int kDefaultCandidateCount = 5;

/// Throws Errc::UnknownFeature, Errc::NonFiniteValue.
void validate_constraint(const Dataset& ds, const QueryConstraint& constraint);

/// Ranks the pool (all firms outside `exclude` whose industry is in the
/// constraint's set, if any) by the weighted sum of per-feature min-max
/// normalized values. Normalization runs over the pool; a feature that is
/// constant across the pool normalizes to 0.5. `features` is N x F in dataset
/// company order. An empty pool yields an empty, flagged result.
/// Throws Errc::UnknownFeature, Errc::NonFiniteValue, Errc::InvalidConfig (k < 1).
QueryResult query_candidates(const Dataset& ds, const Eigen::MatrixXd& features,
                             const QueryConstraint& constraint, const CompanySet& exclude,
                             int k = kDefaultCandidateCount);

/// Same, over the stored historical features at t.
QueryResult query_candidates(const Dataset& ds, int t, const QueryConstraint& constraint,
                             const CompanySet& exclude, int k = kDefaultCandidateCount);

/// The firm itself plus its current suppliers and customers.
CompanySet exclusion_set(const EdgeSet& edges, const CompanyId& id);
/// Throws Errc::UnknownCompany, Errc::TimestampOutOfRange.
CompanySet exclusion_set(const Dataset& ds, const CompanyId& id, int t);

}  // namespace scsim
