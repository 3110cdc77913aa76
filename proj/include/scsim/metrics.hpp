#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scsim/core/dataset.hpp"

namespace scsim {

enum class MetricKind { CollaboratorCount, PageRank };

/// "collaborator_count" | "pagerank". Throws Errc::UnknownMetric.
MetricKind parse_metric_kind(std::string_view name);
std::string_view to_string(MetricKind kind) noexcept;

using PerformanceMap = std::map<CompanyId, double>;

/// Distinct counterparties (suppliers union customers).
int collaborator_count(const EdgeSet& edges, const CompanyId& id);
/// Throws Errc::UnknownCompany, Errc::TimestampOutOfRange.
int collaborator_count(const Dataset& ds, const CompanyId& id, int t);

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-9;
  int maxIter = 200;
};

struct PageRankOutcome {
  PerformanceMap scores;
  int iterations = 0;
  bool converged = false;
};

/// PageRank over the supplier -> customer direction, so rank accumulates
/// downstream. Edges touching ids outside `nodes` are ignored.
/// Throws Errc::EmptyNodeSet, Errc::InvalidConfig (damping outside (0,1), tol <= 0).
PageRankOutcome pagerank(const EdgeSet& edges, const std::vector<CompanyId>& nodes,
                         const PageRankOptions& options = {});

PerformanceMap performance(const EdgeSet& edges, const std::vector<CompanyId>& nodes, MetricKind kind);
PerformanceMap performance(const Dataset& ds, MetricKind kind, int t);

/// Named metric implementations; starts with the two built-in kinds.
class MetricRegistry {
 public:
  using Fn = std::function<PerformanceMap(const EdgeSet&, const std::vector<CompanyId>&)>;

  MetricRegistry();

  void add(std::string name, Fn fn);
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

  /// Throws Errc::UnknownMetric.
  PerformanceMap compute(std::string_view name, const EdgeSet& edges, const std::vector<CompanyId>& nodes) const;

 private:
  std::map<std::string, Fn, std::less<>> metrics_;
};

/// Dispatch by name through the built-in registry. Throws Errc::UnknownMetric.
PerformanceMap performance(const Dataset& ds, std::string_view kind, int t);

}  // namespace scsim
