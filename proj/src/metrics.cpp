#include "scsim/metrics.hpp"

#include <unordered_map>

#include "scsim/core/network.hpp"
#include "scsim/error.hpp"
#include "scsim/linalg.hpp"

namespace scsim {

MetricKind parse_metric_kind(std::string_view name) {
  if (name == "collaborator_count") return MetricKind::CollaboratorCount;
  if (name == "pagerank") return MetricKind::PageRank;
  throw Error(Errc::UnknownMetric, std::string(name));
}

std::string_view to_string(MetricKind kind) noexcept {
  return kind == MetricKind::PageRank ? "pagerank" : "collaborator_count";
}

int collaborator_count(const EdgeSet& edges, const CompanyId& id) {
  return static_cast<int>(partners_of(edges, id).size());
}

int collaborator_count(const Dataset& ds, const CompanyId& id, int t) {
  ds.index_of(id);
  return collaborator_count(*ds.network.at(t), id);
}

PageRankOutcome pagerank(const EdgeSet& edges, const std::vector<CompanyId>& nodes,
                         const PageRankOptions& options) {
  if (nodes.empty()) throw Error(Errc::EmptyNodeSet, "pagerank over zero nodes");
  if (!(options.damping > 0.0 && options.damping < 1.0) || !(options.tol > 0.0)) {
    throw Error(Errc::InvalidConfig, "pagerank needs damping in (0,1) and tol > 0");
  }
  std::unordered_map<CompanyId, Eigen::Index> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], static_cast<Eigen::Index>(i));

  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : edges) {
    auto s = index.find(e.supplier);
    auto c = index.find(e.customer);
    if (s == index.end() || c == index.end()) continue;
    adjacency(s->second, c->second) = 1.0;
  }
  auto result = linalg::pagerank(adjacency, options.damping, options.tol, options.maxIter);

  PageRankOutcome out;
  out.iterations = result.iterations;
  out.converged = result.converged;
  for (std::size_t i = 0; i < nodes.size(); ++i) out.scores[nodes[i]] = result.scores(static_cast<Eigen::Index>(i));
  return out;
}

PerformanceMap performance(const EdgeSet& edges, const std::vector<CompanyId>& nodes, MetricKind kind) {
  if (kind == MetricKind::PageRank) return pagerank(edges, nodes).scores;
  PerformanceMap out;
  for (const auto& id : nodes) out[id] = 0.0;
  for (const auto& e : edges) {
    // Edges are unique, so each endpoint gains one distinct counterparty per
    // edge unless the reverse edge also exists.
    if (auto it = out.find(e.supplier); it != out.end() && !edges.contains(Edge{e.customer, e.supplier})) {
      it->second += 1.0;
    }
    if (auto it = out.find(e.customer); it != out.end()) it->second += 1.0;
  }
  return out;
}

PerformanceMap performance(const Dataset& ds, MetricKind kind, int t) {
  return performance(*ds.network.at(t), ds.ids(), kind);
}

MetricRegistry::MetricRegistry() {
  add("collaborator_count", [](const EdgeSet& e, const std::vector<CompanyId>& n) {
    return performance(e, n, MetricKind::CollaboratorCount);
  });
  add("pagerank", [](const EdgeSet& e, const std::vector<CompanyId>& n) {
    return performance(e, n, MetricKind::PageRank);
  });
}

void MetricRegistry::add(std::string name, Fn fn) { metrics_[std::move(name)] = std::move(fn); }

bool MetricRegistry::contains(std::string_view name) const { return metrics_.find(name) != metrics_.end(); }

std::vector<std::string> MetricRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : metrics_) out.push_back(k);
  return out;
}

PerformanceMap MetricRegistry::compute(std::string_view name, const EdgeSet& edges,
                                       const std::vector<CompanyId>& nodes) const {
  auto it = metrics_.find(name);
  if (it == metrics_.end()) throw Error(Errc::UnknownMetric, std::string(name));
  return it->second(edges, nodes);
}

PerformanceMap performance(const Dataset& ds, std::string_view kind, int t) {
  static const MetricRegistry registry;
  return registry.compute(kind, *ds.network.at(t), ds.ids());
}

}  // namespace scsim
