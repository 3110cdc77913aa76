#include "scsim/agent/records.hpp"

#include "scsim/error.hpp"

namespace scsim {

using nlohmann::json;

std::string_view to_string(RequestKind k) noexcept {
  switch (k) {
    case RequestKind::AddAsSupplier: return "add_as_supplier";
    case RequestKind::AddAsCustomer: return "add_as_customer";
    case RequestKind::Terminate: return "terminate";
  }
  return "terminate";
}

RequestKind parse_request_kind(std::string_view s) {
  if (s == "add_as_supplier") return RequestKind::AddAsSupplier;
  if (s == "add_as_customer") return RequestKind::AddAsCustomer;
  if (s == "terminate") return RequestKind::Terminate;
  throw Error(Errc::ParseError, "unknown request kind '" + std::string(s) + "'");
}

RequestKind request_kind_for(const PlanRecord& plan) noexcept {
  if (!plan.seekCollaboration) return RequestKind::Terminate;
  return plan.seekSuppliers ? RequestKind::AddAsCustomer : RequestKind::AddAsSupplier;
}

std::string_view to_string(ReplyDirection d) noexcept {
  return d == ReplyDirection::RequesterWantsToSupply ? "wants_to_supply" : "wants_to_buy";
}

ReplyDirection parse_reply_direction(std::string_view s) {
  if (s == "wants_to_supply") return ReplyDirection::RequesterWantsToSupply;
  if (s == "wants_to_buy") return ReplyDirection::RequesterWantsToBuy;
  throw Error(Errc::ParseError, "unknown reply direction '" + std::string(s) + "'");
}

ReplyDirection direction_of(RequestKind k) noexcept {
  return k == RequestKind::AddAsCustomer ? ReplyDirection::RequesterWantsToBuy
                                         : ReplyDirection::RequesterWantsToSupply;
}

Edge accepted_edge(const CompanyId& requester, const CompanyId& target, ReplyDirection d) {
  if (d == ReplyDirection::RequesterWantsToSupply) return {requester, target};
  return {target, requester};
}

std::string_view to_string(DeltaCause c) noexcept {
  return c == DeltaCause::Accepted ? "accepted" : "terminated";
}

namespace {

DeltaCause parse_delta_cause(std::string_view s) {
  if (s == "accepted") return DeltaCause::Accepted;
  if (s == "terminated") return DeltaCause::Terminated;
  throw Error(Errc::ParseError, "unknown delta cause '" + std::string(s) + "'");
}

json edge_json(const Edge& e) { return json::array({e.supplier.str(), e.customer.str()}); }

Edge edge_from(const json& j) {
  return {CompanyId(j.at(0).get<std::string>()), CompanyId(j.at(1).get<std::string>())};
}

template <class T, class F>
json array_of(const std::vector<T>& xs, F&& f) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(f(x));
  return a;
}

template <class T, class F>
std::vector<T> vector_of(const json& a, F&& f) {
  std::vector<T> out;
  out.reserve(a.size());
  for (const auto& x : a) out.push_back(f(x));
  return out;
}

}  // namespace

json to_json(const PlanRecord& p) {
  return {{"description", p.description},
          {"reason", p.reason},
          {"seekCollaboration", p.seekCollaboration},
          {"seekSuppliers", p.seekSuppliers},
          {"userAuthored", p.userAuthored}};
}

json to_json(const QueryConstraint& q) {
  json scores = json::array();
  for (const auto& w : q.weightedScores) scores.push_back({{"feature", w.feature}, {"weight", w.weight}});
  return {{"industrySet", q.industrySet}, {"weightedScores", scores}};
}

json to_json(const RequestRecord& r) {
  return {{"requester", r.requester.str()}, {"planIndex", r.planIndex},   {"target", r.target.str()},
          {"chosen", r.chosen},             {"reason", r.reason},         {"extraInfo", r.extraInfo},
          {"kind", to_string(r.kind)},      {"userAuthored", r.userAuthored}};
}

json to_json(const ReplyRecord& r) {
  return {{"requester", r.requester.str()},   {"accepted", r.accepted}, {"reason", r.reason},
          {"direction", to_string(r.direction)}, {"forced", r.forced},    {"userNote", r.userNote}};
}

json to_json(const AppliedDelta& d) {
  return {{"edge", edge_json(d.edge)},     {"added", d.added},         {"cause", to_string(d.cause)},
          {"requester", d.requester.str()}, {"planIndex", d.planIndex}, {"synthetic", d.synthetic}};
}

json to_json(const AgentTurnRecord& r) {
  json candidates = json::array();
  for (const auto& list : r.candidates) {
    json l = json::array();
    for (const auto& c : list) l.push_back({{"id", c.id.str()}, {"score", c.score}});
    candidates.push_back(std::move(l));
  }
  json dialogue = json::array();
  for (const auto& d : r.dialogue)
    dialogue.push_back({{"stage", d.stage}, {"attempt", d.attempt}, {"messages", d.messages}, {"response", d.response}});
  return {{"companyId", r.companyId.str()},
          {"t", r.t},
          {"label", r.label},
          {"plans", array_of(r.plans, [](const auto& x) { return to_json(x); })},
          {"constraints", array_of(r.constraints, [](const auto& x) { return to_json(x); })},
          {"candidates", candidates},
          {"outgoing", array_of(r.outgoing, [](const auto& x) { return to_json(x); })},
          {"incoming", array_of(r.incoming, [](const auto& x) { return to_json(x); })},
          {"appliedDeltas", array_of(r.appliedDeltas, [](const auto& x) { return to_json(x); })},
          {"warnings", r.warnings},
          {"dialogue", dialogue}};
}

PlanRecord plan_from_json(const json& j) {
  PlanRecord p;
  p.description = j.at("description").get<std::string>();
  p.reason = j.at("reason").get<std::string>();
  p.seekCollaboration = j.at("seekCollaboration").get<bool>();
  p.seekSuppliers = j.at("seekSuppliers").get<bool>();
  p.userAuthored = j.value("userAuthored", false);
  return p;
}

QueryConstraint constraint_from_json(const json& j) {
  QueryConstraint q;
  q.industrySet = j.at("industrySet").get<std::vector<std::string>>();
  for (const auto& w : j.at("weightedScores"))
    q.weightedScores.push_back({w.at("feature").get<std::string>(), w.at("weight").get<double>()});
  return q;
}

RequestRecord request_from_json(const json& j) {
  RequestRecord r;
  r.requester = CompanyId(j.at("requester").get<std::string>());
  r.planIndex = j.at("planIndex").get<int>();
  r.target = CompanyId(j.at("target").get<std::string>());
  r.chosen = j.at("chosen").get<bool>();
  r.reason = j.at("reason").get<std::string>();
  r.extraInfo = j.value("extraInfo", std::string{});
  r.kind = parse_request_kind(j.at("kind").get<std::string>());
  r.userAuthored = j.value("userAuthored", false);
  return r;
}

ReplyRecord reply_from_json(const json& j) {
  ReplyRecord r;
  r.requester = CompanyId(j.at("requester").get<std::string>());
  r.accepted = j.at("accepted").get<bool>();
  r.reason = j.at("reason").get<std::string>();
  r.direction = parse_reply_direction(j.at("direction").get<std::string>());
  r.forced = j.value("forced", false);
  r.userNote = j.value("userNote", std::string{});
  return r;
}

AgentTurnRecord turn_record_from_json(const json& j) {
  try {
    AgentTurnRecord r;
    r.companyId = CompanyId(j.at("companyId").get<std::string>());
    r.t = j.at("t").get<int>();
    r.label = j.at("label").get<std::string>();
    r.plans = vector_of<PlanRecord>(j.at("plans"), plan_from_json);
    r.constraints = vector_of<QueryConstraint>(j.at("constraints"), constraint_from_json);
    for (const auto& l : j.at("candidates")) {
      CandidateList list;
      for (const auto& c : l) list.push_back({CompanyId(c.at("id").get<std::string>()), c.at("score").get<double>()});
      r.candidates.push_back(std::move(list));
    }
    r.outgoing = vector_of<RequestRecord>(j.at("outgoing"), request_from_json);
    r.incoming = vector_of<ReplyRecord>(j.at("incoming"), reply_from_json);
    for (const auto& d : j.at("appliedDeltas")) {
      AppliedDelta a;
      a.edge = edge_from(d.at("edge"));
      a.added = d.at("added").get<bool>();
      a.cause = parse_delta_cause(d.at("cause").get<std::string>());
      a.requester = CompanyId(d.at("requester").get<std::string>());
      a.planIndex = d.at("planIndex").get<int>();
      a.synthetic = d.value("synthetic", false);
      r.appliedDeltas.push_back(a);
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& d : j.at("dialogue"))
      r.dialogue.push_back({d.at("stage").get<std::string>(), d.at("attempt").get<int>(), d.at("messages"),
                            d.at("response").get<std::string>()});
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("turn record: ") + e.what());
  }
}

}  // namespace scsim
