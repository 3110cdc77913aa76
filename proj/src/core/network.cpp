#include "scsim/core/network.hpp"

#include "scsim/error.hpp"

namespace scsim {

Snapshot network_at(const Dataset& ds, int t) { return ds.network.at(t); }

CompanySet suppliers_of(const EdgeSet& edges, const CompanyId& id) {
  CompanySet out;
  for (const auto& e : edges) {
    if (e.customer == id) out.insert(e.supplier);
  }
  return out;
}

CompanySet customers_of(const EdgeSet& edges, const CompanyId& id) {
  // Edges are ordered by supplier first, so the customers of `id` are contiguous.
  CompanySet out;
  for (auto it = edges.lower_bound(Edge{id, CompanyId{}}); it != edges.end() && it->supplier == id; ++it) {
    out.insert(it->customer);
  }
  return out;
}

CompanySet suppliers_of(const Dataset& ds, const CompanyId& id, int t) {
  ds.index_of(id);
  return suppliers_of(*ds.network.at(t), id);
}

CompanySet customers_of(const Dataset& ds, const CompanyId& id, int t) {
  ds.index_of(id);
  return customers_of(*ds.network.at(t), id);
}

CompanySet partners_of(const EdgeSet& edges, const CompanyId& id) {
  auto out = suppliers_of(edges, id);
  out.merge(customers_of(edges, id));
  return out;
}

Lifecycle edge_lifecycle(const TemporalNetwork& network, const Edge& edge, int t) {
  if (!network.at(t)->contains(edge)) {
    throw Error(Errc::EdgeAbsent, edge.supplier.str() + "->" + edge.customer.str() + " at t=" +
                                      std::to_string(t));
  }
  const bool hasNext = static_cast<std::size_t>(t + 1) < network.size();
  if (hasNext && !network.contains(edge, t + 1)) return Lifecycle::Terminate;
  if (!network.contains(edge, t - 1)) return Lifecycle::Initiate;
  return Lifecycle::Maintain;
}

}  // namespace scsim
