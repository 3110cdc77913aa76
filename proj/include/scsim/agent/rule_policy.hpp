#pragma once

#include <memory>

#include "scsim/agent/policy.hpp"

namespace scsim {

/// Deterministic policy without a language model.
///   Plans: seek customers when performance fell over the reference window,
///          seek suppliers when the firm has fewer than minSuppliers, and
///          terminate partners whose mean feature score is below cutoff.
///   Constraints: no industry filter, uniform feature weights.
///   Requests: the top candidate is chosen, the rest are listed unchosen.
///   Replies: accept iff the requester's mean feature score is at least the
///            median mean score of the replier's current partners (accept all
///            when it has none).
struct RuleParams {
  int minSuppliers = 1;
  double cutoff = 30.0;
};

class RulePolicy final : public AgentPolicy {
 public:
  explicit RulePolicy(RuleParams params = {}) : params_(params) {}

  std::vector<PlanRecord> plan(const AgentView& view, AgentContext& ctx) override;
  std::vector<QueryConstraint> constrain(const AgentView& view, const std::vector<PlanRecord>& plans,
                                         AgentContext& ctx) override;
  std::vector<std::vector<RequestRecord>> request(const AgentView& view, const std::vector<PlanRecord>& plans,
                                                  const std::vector<QueryConstraint>& constraints,
                                                  const std::vector<std::vector<CandidateDetail>>& candidates,
                                                  AgentContext& ctx) override;
  std::vector<ReplyRecord> reply(const AgentView& view, const Inbox& inbox, AgentContext& ctx) override;

  const RuleParams& params() const noexcept { return params_; }

 private:
  RuleParams params_;
};

inline std::shared_ptr<AgentPolicy> rule_policy(RuleParams params = {}) {
  return std::make_shared<RulePolicy>(params);
}

}  // namespace scsim
