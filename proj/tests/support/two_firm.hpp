#pragma once

#include <filesystem>
#include <memory>

#include "fixtures.hpp"
#include "scsim/session/session.hpp"

namespace two_firm {

/// Company-0001 (Parts) and Company-0002 (Retail) over three quarters with a
/// single Q1 edge between them.
inline std::shared_ptr<const scsim::Dataset> dataset() {
  fixture::EdgeLists edges{{{0, 1}}, {}, {}};
  return std::make_shared<const scsim::Dataset>(fixture::build(
      2, 3, edges, {"Parts", "Retail"}, [](int c, int t, int f) { return 50.0 + 10.0 * c - 2.5 * t + 3.0 * f; }));
}

/// Replay configuration; "transcript" is resolved against the fixture dir.
inline scsim::SessionConfig config() {
  scsim::SessionConfig c;
  c.policy = "replay";
  c.transcriptDir = "transcript";
  c.performanceMetric = scsim::MetricKind::CollaboratorCount;
  c.referenceLength = 2;
  c.turns = 2;
  c.seed = 11;
  return c;
}

inline scsim::PolicyResolver replay_resolver(const std::filesystem::path& fixtureDir) {
  return [fixtureDir](const scsim::SessionConfig& c) -> scsim::PolicyFactory {
    auto transport = std::make_shared<scsim::ReplayTransport>(fixtureDir / c.transcriptDir);
    return [transport](const scsim::CompanyId&) { return scsim::llm_policy(transport); };
  };
}

}  // namespace two_firm
