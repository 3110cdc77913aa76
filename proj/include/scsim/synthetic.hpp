#pragma once

#include <cstdint>

#include "scsim/core/dataset.hpp"

namespace scsim {

struct SyntheticConfig {
  int companies = 35;
  int quarters = 8;
  std::uint64_t seed = 7;
  /// Per-quarter probability that an existing edge survives, before the
  /// supplier-quality adjustment.
  double retention = 0.85;
  /// Expected new edges per firm and quarter.
  double formationRate = 0.25;
};

/// Tiered supply-chain panel: industries are ordered upstream to downstream
/// and edges run from one tier to the next. Features (Operation, Technology,
/// Reputation) follow clamped random walks in [0, 100]; weak suppliers lose
/// customers more often and strong ones gain them. Ids are "Company-NNNN",
/// labels "Q1".."QT". Deterministic in the seed. Throws Errc::InvalidConfig.
Dataset generate_synthetic(const SyntheticConfig& config = {});

}  // namespace scsim
