#pragma once

#include "scsim/core/dataset.hpp"

namespace scsim {

/// Stored snapshot at t. Throws Errc::TimestampOutOfRange.
Snapshot network_at(const Dataset& ds, int t);

CompanySet suppliers_of(const EdgeSet& edges, const CompanyId& id);
CompanySet customers_of(const EdgeSet& edges, const CompanyId& id);

/// Checked variants: Errc::UnknownCompany, Errc::TimestampOutOfRange.
CompanySet suppliers_of(const Dataset& ds, const CompanyId& id, int t);
CompanySet customers_of(const Dataset& ds, const CompanyId& id, int t);

/// Union of suppliers and customers.
CompanySet partners_of(const EdgeSet& edges, const CompanyId& id);

/// Lifecycle of an edge present at t. When the edge is present for exactly one
/// step it both initiates and terminates; Terminate wins. Timestamps past the
/// end of the network carry no information, so the last stored step never
/// terminates. Throws Errc::EdgeAbsent, Errc::TimestampOutOfRange.
Lifecycle edge_lifecycle(const TemporalNetwork& network, const Edge& edge, int t);

}  // namespace scsim
