#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "scsim/agent/records.hpp"

namespace scsim {

struct AgentContext {
  std::uint64_t seed = 0;
  /// Prompt/response exchanges are appended here when non-null.
  std::vector<DialogueEntry>* dialogue = nullptr;
};

/// Decision maker behind one firm. Implementations are called from the turn
/// engine, possibly concurrently for different firms, never concurrently for
/// the same policy object.
class AgentPolicy {
 public:
  virtual ~AgentPolicy() = default;

  /// Stage I.
  virtual std::vector<PlanRecord> plan(const AgentView& view, AgentContext& ctx) = 0;

  /// Stage II, one constraint per plan.
  virtual std::vector<QueryConstraint> constrain(const AgentView& view, const std::vector<PlanRecord>& plans,
                                                 AgentContext& ctx) = 0;

  /// Stage III, one list per plan. Collaboration plans pick from
  /// `candidates[i]`; termination plans pick from current partners. The
  /// engine fills in requester and kind.
  virtual std::vector<std::vector<RequestRecord>> request(
      const AgentView& view, const std::vector<PlanRecord>& plans, const std::vector<QueryConstraint>& constraints,
      const std::vector<std::vector<CandidateDetail>>& candidates, AgentContext& ctx) = 0;

  /// Stage IV, one reply per inbox entry.
  virtual std::vector<ReplyRecord> reply(const AgentView& view, const Inbox& inbox, AgentContext& ctx) = 0;
};

using PolicyMap = std::map<CompanyId, std::shared_ptr<AgentPolicy>>;
using PolicyFactory = std::function<std::shared_ptr<AgentPolicy>(const CompanyId&)>;

PolicyMap make_policies(const std::vector<CompanyId>& ids, const PolicyFactory& factory);

}  // namespace scsim
