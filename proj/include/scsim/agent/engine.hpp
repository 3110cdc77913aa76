#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "scsim/agent/policy.hpp"
#include "scsim/core/timeline.hpp"
#include "scsim/horizon.hpp"
#include "scsim/metrics.hpp"

namespace scsim {

inline constexpr int kDefaultReferenceLength = 4;

struct TurnConfig {
  int referenceLength = kDefaultReferenceLength;
  int candidateCount = kDefaultCandidateCount;
  /// Metric behind AgentView::performanceWindow.
  MetricKind metric = MetricKind::CollaboratorCount;
  HorizonConfig horizon;
  bool parallel = false;
  /// Firms that run stages I-III. Unset: every firm with a policy.
  std::optional<CompanySet> planners;
  /// Order in which deliberations are started; empty means id order. Results
  /// never depend on it.
  std::vector<CompanyId> evaluationOrder;
};

/// Builds agent views against the last frame of a timeline.
class ViewBuilder {
 public:
  ViewBuilder(const Timeline& timeline, const KnowledgeBase& knowledge, const TurnConfig& config);

  /// Throws Errc::UnknownCompany.
  AgentView view(const CompanyId& id) const;
  PartnerInfo partner(const CompanyId& id) const;

 private:
  const Timeline& timeline_;
  const KnowledgeBase& knowledge_;
  int first_ = 0;
  std::vector<std::string> industries_;
  std::vector<PerformanceMap> perf_;
};

/// Stages I-III of one firm against the start-of-turn snapshot.
struct Deliberation {
  CompanyId id;
  std::vector<PlanRecord> plans;
  std::vector<QueryConstraint> constraints;
  std::vector<CandidateList> candidates;
  std::vector<RequestRecord> outgoing;
  std::vector<std::string> warnings;
  std::vector<DialogueEntry> dialogue;
  bool failed = false;
};

/// Runs the policy's planning stages, validates its requests and queries
/// candidates. Any policy exception makes the deliberation a logged no-op.
Deliberation deliberate(const Timeline& timeline, const ViewBuilder& views, const CompanyId& id, AgentPolicy& policy,
                        const TurnConfig& config, std::uint64_t seed);

/// Rebuilds a deliberation from a recorded turn.
Deliberation deliberation_from(const AgentTurnRecord& record);

/// Chosen collaboration requests grouped by target, deduplicated per
/// (requester, direction), entries ordered by requester.
std::map<CompanyId, Inbox> assemble_inbox(const std::vector<RequestRecord>& requests,
                                          const std::function<PartnerInfo(const CompanyId&)>& info = {});

struct CommitNote {
  CompanyId requester;
  std::string text;
};

struct CommitResult {
  EdgeSet edges;
  std::vector<AppliedDelta> deltas;
  std::vector<CommitNote> notes;
};

/// next = (E u A) \ T without self-edges, where T holds every existing edge
/// between a terminating pair and A the edges implied by accepted replies.
/// Termination wins over a same-turn re-add.
CommitResult commit_deltas(const EdgeSet& snapshot, const std::vector<RequestRecord>& terminations,
                           const std::vector<std::pair<RequestRecord, ReplyRecord>>& accepted);

/// (replier, requester, direction)
using ReplyKey = std::tuple<CompanyId, CompanyId, ReplyDirection>;

enum class OverrideMode { Rerun, ForceAccept, ForceDecline };

struct ReplyOverride {
  OverrideMode mode = OverrideMode::Rerun;
  std::string note;
};

/// Lets a re-resolution reuse earlier replies and re-run or force selected ones.
struct ResolveOptions {
  std::map<ReplyKey, ReplyRecord> cachedReplies;
  std::map<ReplyKey, ReplyOverride> overrides;
};

struct TurnOutcome {
  Frame next;
  std::vector<AgentTurnRecord> records;  // company id order
};

/// Stage IV and commit: inboxes, replies, edge deltas and the next frame.
TurnOutcome resolve(const Timeline& timeline, const KnowledgeBase& knowledge, const PolicyMap& policies,
                    std::vector<Deliberation> deliberations, const TurnConfig& config, std::uint64_t seed,
                    const ResolveOptions& options = {});

/// One full turn on the last frame of `timeline`.
TurnOutcome run_turn(const Timeline& timeline, const KnowledgeBase& knowledge, const PolicyMap& policies,
                     const TurnConfig& config, std::uint64_t seed);

}  // namespace scsim
