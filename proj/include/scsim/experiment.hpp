#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "scsim/agent/engine.hpp"
#include "scsim/evaluation.hpp"

namespace scsim {

struct ExperimentConfig {
  int historyLen = 4;
  /// Total runs, split evenly over the focal firms.
  int runs = 80;
  std::uint64_t seedBase = 0;
  TurnConfig turn;
  CrPooling pooling = CrPooling::SlotMean;
  bool parallel = false;
};

/// One simulated step of one focal firm.
struct ExperimentRun {
  CompanyId focal;
  int run = 0;
  ConfusionMetrics metrics;
  std::map<Edge, EdgeDecision> decisions;  // over the slots seen in this run
  std::vector<AgentTurnRecord> records;
};

struct ExperimentResult {
  EvalReport report;
  std::vector<ExperimentRun> runs;
};

/// For every focal firm and run: the historyLen frames ending one before the
/// last observed frame are fed to the engine, only the focal firm plans (all
/// firms reply), and the simulated step is compared with the last observed
/// frame. Confusion metrics are macro-averaged over runs. Decision slots are
/// the focal firm's edges present before or after the step in any run; a slot
/// that stays absent in one run counts as Keep there (status quo).
/// Throws Errc::InsufficientHistory, Errc::InvalidConfig, Errc::UnknownCompany.
ExperimentResult run_experiment(std::shared_ptr<const Dataset> dataset, const PolicyFactory& factory,
                                const std::vector<CompanyId>& focalIds, const ExperimentConfig& config);

}  // namespace scsim
