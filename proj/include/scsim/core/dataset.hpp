#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "scsim/core/types.hpp"

namespace scsim {

/// Per-timestamp edge snapshots, indexed 0..size()-1.
class TemporalNetwork {
 public:
  TemporalNetwork() = default;
  explicit TemporalNetwork(std::vector<Snapshot> snapshots) : snapshots_(std::move(snapshots)) {}

  std::size_t size() const noexcept { return snapshots_.size(); }
  bool empty() const noexcept { return snapshots_.empty(); }

  /// Throws Errc::TimestampOutOfRange.
  const Snapshot& at(int t) const;

  /// Absent (rather than throwing) when t is outside the stored range.
  bool contains(const Edge& e, int t) const;

  void push_back(Snapshot s) { snapshots_.push_back(std::move(s)); }
  const std::vector<Snapshot>& snapshots() const noexcept { return snapshots_; }

 private:
  std::vector<Snapshot> snapshots_;
};

struct CompanyRecord {
  CompanyId id;
  std::string industry;
  std::string knowledge;
  /// rows = historical timestamps, cols = Dataset::featureNames; values in [0, 100]
  Eigen::MatrixXd features;
};

/// Immutable after load. Companies are kept sorted by id.
struct Dataset {
  std::vector<std::string> featureNames;
  std::vector<std::string> timestampLabels;
  std::vector<CompanyRecord> companies;
  TemporalNetwork network;
  std::string globalKnowledge;

  int horizon() const noexcept { return static_cast<int>(timestampLabels.size()); }
  std::size_t company_count() const noexcept { return companies.size(); }
  std::size_t feature_count() const noexcept { return featureNames.size(); }

  std::optional<std::size_t> find(const CompanyId& id) const;
  /// Throws Errc::UnknownCompany.
  std::size_t index_of(const CompanyId& id) const;
  const CompanyRecord& company(const CompanyId& id) const { return companies[index_of(id)]; }

  std::vector<CompanyId> ids() const;
  /// Throws Errc::UnknownFeature.
  std::size_t feature_index(const std::string& name) const;

  /// N x F matrix of all firms' features at historical timestamp t (rows in company order).
  Eigen::MatrixXd feature_matrix(int t) const;

  KnowledgeBase knowledge() const;
};

bool operator==(const Dataset& a, const Dataset& b);

/// Checks every Dataset invariant; throws the matching Errc on the first violation.
void validate(const Dataset& ds);

}  // namespace scsim
