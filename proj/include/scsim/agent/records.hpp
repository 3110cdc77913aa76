#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "scsim/core/types.hpp"
#include "scsim/query.hpp"

namespace scsim {

/// Stage I output.
struct PlanRecord {
  std::string description;
  std::string reason;
  bool seekCollaboration = false;
  bool seekSuppliers = false;  // meaningful only when seekCollaboration
  bool userAuthored = false;

  friend bool operator==(const PlanRecord&, const PlanRecord&) = default;
};

/// Role the requester asks to take towards the target.
///   AddAsSupplier: requester would supply the target (edge requester -> target).
///   AddAsCustomer: requester would buy from the target (edge target -> requester).
///   Terminate:     requester drops its existing relationship(s) with the target.
enum class RequestKind { AddAsSupplier, AddAsCustomer, Terminate };

std::string_view to_string(RequestKind k) noexcept;
RequestKind parse_request_kind(std::string_view s);

/// Kind implied by a plan: seeking suppliers means asking to be the target's customer.
RequestKind request_kind_for(const PlanRecord& plan) noexcept;

/// Stage III output, one per (plan, target).
struct RequestRecord {
  CompanyId requester;
  int planIndex = 0;
  CompanyId target;
  bool chosen = false;
  std::string reason;
  std::string extraInfo;
  RequestKind kind = RequestKind::AddAsSupplier;
  bool userAuthored = false;

  friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

enum class ReplyDirection { RequesterWantsToSupply, RequesterWantsToBuy };

std::string_view to_string(ReplyDirection d) noexcept;
ReplyDirection parse_reply_direction(std::string_view s);

/// Direction a collaboration request arrives with at its target.
ReplyDirection direction_of(RequestKind k) noexcept;

/// Edge created when a request with this direction is accepted.
Edge accepted_edge(const CompanyId& requester, const CompanyId& target, ReplyDirection d);

/// Stage IV output, one per received request.
struct ReplyRecord {
  CompanyId requester;
  bool accepted = false;
  std::string reason;
  ReplyDirection direction = ReplyDirection::RequesterWantsToSupply;
  /// Set by a forced user override rather than the replier's policy.
  bool forced = false;
  std::string userNote;

  friend bool operator==(const ReplyRecord&, const ReplyRecord&) = default;
};

/// A firm as seen by another firm's agent at the current timestamp.
struct PartnerInfo {
  CompanyId id;
  std::string industry;
  Eigen::VectorXd features;           // at the current timestamp
  Eigen::MatrixXd window;             // reference window, rows = window labels
};

struct CandidateDetail {
  CompanyId id;
  double score = 0.0;
  std::string industry;
  Eigen::VectorXd features;
};

struct InboxEntry {
  CompanyId requester;
  ReplyDirection direction = ReplyDirection::RequesterWantsToSupply;
  std::string extraInfo;
  std::string userNote;
  PartnerInfo requesterInfo;
};

/// Received collaboration requests of one firm, split by direction.
struct Inbox {
  std::vector<InboxEntry> wantsToSupply;
  std::vector<InboxEntry> wantsToBuy;

  bool empty() const noexcept { return wantsToSupply.empty() && wantsToBuy.empty(); }
  std::size_t size() const noexcept { return wantsToSupply.size() + wantsToBuy.size(); }
};

/// Everything a firm's agent may see in one turn.
struct AgentView {
  CompanyId self;
  std::string industry;
  std::string globalKnowledge;
  std::string knowledge;
  int t = 0;
  std::string timestampLabel;
  std::vector<std::string> featureNames;
  std::vector<std::string> windowLabels;  // oldest first, last = timestampLabel
  Eigen::MatrixXd ownWindow;              // windowLabels x features
  std::vector<PartnerInfo> suppliers;
  std::vector<PartnerInfo> customers;
  std::vector<double> performanceWindow;  // own performance over the window
  std::vector<std::string> industries;    // all industries present in the dataset

  Eigen::VectorXd own_features() const { return ownWindow.row(ownWindow.rows() - 1).transpose(); }
};

enum class DeltaCause { Accepted, Terminated };

struct AppliedDelta {
  Edge edge;
  bool added = false;
  DeltaCause cause = DeltaCause::Accepted;
  CompanyId requester;
  int planIndex = 0;
  /// Set when the accepting reply was a forced user override.
  bool synthetic = false;

  friend bool operator==(const AppliedDelta&, const AppliedDelta&) = default;
};

struct DialogueEntry {
  std::string stage;
  int attempt = 0;
  nlohmann::json messages;
  std::string response;

  friend bool operator==(const DialogueEntry&, const DialogueEntry&) = default;
};

/// One firm's complete activity in one turn. Lists are aligned by plan index.
struct AgentTurnRecord {
  CompanyId companyId;
  int t = 0;
  std::string label;
  std::vector<PlanRecord> plans;
  std::vector<QueryConstraint> constraints;
  std::vector<CandidateList> candidates;
  std::vector<RequestRecord> outgoing;
  std::vector<ReplyRecord> incoming;
  std::vector<AppliedDelta> appliedDeltas;
  std::vector<std::string> warnings;
  std::vector<DialogueEntry> dialogue;

  friend bool operator==(const AgentTurnRecord&, const AgentTurnRecord&) = default;
};

std::string_view to_string(DeltaCause c) noexcept;

nlohmann::json to_json(const PlanRecord& p);
nlohmann::json to_json(const QueryConstraint& q);
nlohmann::json to_json(const RequestRecord& r);
nlohmann::json to_json(const ReplyRecord& r);
nlohmann::json to_json(const AppliedDelta& d);
nlohmann::json to_json(const AgentTurnRecord& r);

PlanRecord plan_from_json(const nlohmann::json& j);
QueryConstraint constraint_from_json(const nlohmann::json& j);
RequestRecord request_from_json(const nlohmann::json& j);
ReplyRecord reply_from_json(const nlohmann::json& j);
AgentTurnRecord turn_record_from_json(const nlohmann::json& j);

}  // namespace scsim
