#include "scsim/session/session.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <sstream>

#include "scsim/agent/llm_policy.hpp"
#include "scsim/core/hash.hpp"
#include "scsim/core/io.hpp"
#include "scsim/error.hpp"
#include "scsim/layout.hpp"

namespace scsim {

using nlohmann::json;

// ---------------------------------------------------------------- config

json to_json(const SessionConfig& c) {
  return {{"performanceMetric", to_string(c.performanceMetric)},
          {"explainModel", to_string(c.explainModel)},
          {"horizonModel", to_string(c.horizon.kind)},
          {"horizonWindow", c.horizon.window},
          {"horizonLambda", c.horizon.lambda},
          {"policy", c.policy},
          {"minSuppliers", c.rule.minSuppliers},
          {"cutoff", c.rule.cutoff},
          {"transcriptDir", c.transcriptDir},
          {"record", c.record},
          {"referenceLength", c.referenceLength},
          {"turns", c.turns},
          {"candidateCount", c.candidateCount},
          {"seed", c.seed},
          {"parallel", c.parallel}};
}

SessionConfig session_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "session config must be an object");
  SessionConfig c;
  try {
    if (j.contains("performanceMetric")) c.performanceMetric = parse_metric_kind(j["performanceMetric"].get<std::string>());
    if (j.contains("explainModel")) c.explainModel = parse_explain_model_kind(j["explainModel"].get<std::string>());
    if (j.contains("horizonModel")) c.horizon.kind = parse_series_model_kind(j["horizonModel"].get<std::string>());
    c.horizon.window = j.value("horizonWindow", c.horizon.window);
    c.horizon.lambda = j.value("horizonLambda", c.horizon.lambda);
    c.policy = j.value("policy", c.policy);
    c.rule.minSuppliers = j.value("minSuppliers", c.rule.minSuppliers);
    c.rule.cutoff = j.value("cutoff", c.rule.cutoff);
    c.transcriptDir = j.value("transcriptDir", c.transcriptDir);
    c.record = j.value("record", c.record);
    c.referenceLength = j.value("referenceLength", c.referenceLength);
    c.turns = j.value("turns", c.turns);
    c.candidateCount = j.value("candidateCount", c.candidateCount);
    c.seed = j.value("seed", c.seed);
    c.parallel = j.value("parallel", c.parallel);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("session config: ") + e.what());
  } catch (const Error& e) {
    throw Error(Errc::InvalidConfig, e.what());
  }
  return c;
}

void validate(const SessionConfig& c) {
  if (c.referenceLength < 1) throw Error(Errc::InvalidConfig, "referenceLength must be >= 1");
  if (c.turns < 1) throw Error(Errc::InvalidConfig, "turns must be >= 1");
  if (c.candidateCount < 1) throw Error(Errc::InvalidConfig, "candidateCount must be >= 1");
  if (c.horizon.window < 1) throw Error(Errc::InvalidConfig, "horizonWindow must be >= 1");
  if (c.horizon.lambda < 0) throw Error(Errc::InvalidConfig, "horizonLambda must be >= 0");
  if (c.policy != "rule" && c.policy != "replay" && c.policy != "llm")
    throw Error(Errc::InvalidConfig, "unknown policy '" + c.policy + "'");
  if (c.policy == "replay" && c.transcriptDir.empty())
    throw Error(Errc::InvalidConfig, "replay policy needs transcriptDir");
}

PolicyFactory offline_policy_factory(const SessionConfig& c) {
  if (c.policy == "rule") {
    const RuleParams params = c.rule;
    return [params](const CompanyId&) { return rule_policy(params); };
  }
  if (c.policy == "replay") {
    auto transport = std::make_shared<ReplayTransport>(c.transcriptDir);
    return [transport](const CompanyId&) { return llm_policy(transport); };
  }
  throw Error(Errc::InvalidConfig, "policy '" + c.policy + "' is not available offline");
}

// ---------------------------------------------------------------- enums

std::string_view to_string(NodeStatus s) noexcept {
  switch (s) {
    case NodeStatus::Historical: return "historical";
    case NodeStatus::Simulated: return "simulated";
    case NodeStatus::Active: return "active";
  }
  return "simulated";
}

std::string_view to_string(AdjustTarget t) noexcept {
  switch (t) {
    case AdjustTarget::Plan: return "plan";
    case AdjustTarget::Request: return "request";
    case AdjustTarget::Reply: return "reply";
  }
  return "request";
}

std::string_view to_string(AdjustAction a) noexcept {
  switch (a) {
    case AdjustAction::Negate: return "negate";
    case AdjustAction::Add: return "add";
    case AdjustAction::Delete: return "delete";
  }
  return "negate";
}

json to_json(const Adjustment& a) {
  return {{"target", to_string(a.target)}, {"action", to_string(a.action)}, {"company", a.company.str()},
          {"index", a.index},              {"payload", a.payload},          {"author", a.author}};
}

Adjustment adjustment_from_json(const json& j) {
  try {
    Adjustment a;
    const auto target = j.at("target").get<std::string>();
    if (target == "plan") a.target = AdjustTarget::Plan;
    else if (target == "request") a.target = AdjustTarget::Request;
    else if (target == "reply") a.target = AdjustTarget::Reply;
    else throw Error(Errc::InvalidReference, "unknown adjustment target '" + target + "'");
    const auto action = j.at("action").get<std::string>();
    if (action == "negate") a.action = AdjustAction::Negate;
    else if (action == "add") a.action = AdjustAction::Add;
    else if (action == "delete") a.action = AdjustAction::Delete;
    else throw Error(Errc::InvalidReference, "unknown adjustment action '" + action + "'");
    a.company = CompanyId(j.at("company").get<std::string>());
    a.index = j.value("index", -1);
    a.payload = j.value("payload", json::object());
    if (!a.payload.is_object()) throw Error(Errc::InvalidReference, "adjustment payload must be an object");
    a.author = j.value("author", std::string("user"));
    return a;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidReference, std::string("adjustment: ") + e.what());
  }
}

// ---------------------------------------------------------------- helpers

namespace {

json knowledge_json(const KnowledgeBase& kb) {
  json firm = json::object();
  for (const auto& [id, text] : kb.firm) firm[id.str()] = text;
  return {{"global", kb.global}, {"firm", firm}};
}

KnowledgeBase knowledge_from(const json& j) {
  KnowledgeBase kb;
  kb.global = j.at("global").get<std::string>();
  for (const auto& [k, v] : j.at("firm").items()) kb.firm[CompanyId(k)] = v.get<std::string>();
  return kb;
}

json edges_json(const EdgeSet& edges) {
  json a = json::array();
  for (const auto& e : edges) a.push_back({e.supplier.str(), e.customer.str()});
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& rows, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != static_cast<std::size_t>(cols)) throw Error(Errc::ParseError, "feature row width mismatch");
    for (Eigen::Index j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

const AgentTurnRecord* record_of(const SimulationNode& n, const CompanyId& id) {
  for (const auto& r : n.records)
    if (r.companyId == id) return &r;
  return nullptr;
}

TurnConfig turn_config(const SessionConfig& c) {
  TurnConfig t;
  t.referenceLength = c.referenceLength;
  t.candidateCount = c.candidateCount;
  t.metric = c.performanceMetric;
  t.horizon = c.horizon;
  t.parallel = c.parallel;
  return t;
}

std::string payload_string(const json& p, const char* key) {
  auto it = p.find(key);
  if (it == p.end() || it->is_null()) return {};
  if (!it->is_string()) throw Error(Errc::InvalidReference, std::string("payload field '") + key + "' must be a string");
  return it->get<std::string>();
}

bool payload_bool(const json& p, const char* key) {
  auto it = p.find(key);
  if (it == p.end() || it->is_null()) return false;
  if (!it->is_boolean()) throw Error(Errc::InvalidReference, std::string("payload field '") + key + "' must be a boolean");
  return it->get<bool>();
}

int payload_int(const json& p, const char* key) {
  auto it = p.find(key);
  if (it == p.end() || !it->is_number_integer())
    throw Error(Errc::InvalidReference, std::string("payload field '") + key + "' must be an integer");
  return it->get<int>();
}

const ReplyRecord* reply_to(const SimulationNode& n, const RequestRecord& req) {
  const auto* target = record_of(n, req.target);
  if (!target || req.kind == RequestKind::Terminate) return nullptr;
  for (const auto& r : target->incoming)
    if (r.requester == req.requester && r.direction == direction_of(req.kind)) return &r;
  return nullptr;
}

std::vector<SimulationNode> historical_chain(const std::shared_ptr<const Dataset>& ds) {
  const Timeline hist(ds);
  std::vector<SimulationNode> nodes;
  for (int t = 0; t < hist.size(); ++t) {
    SimulationNode n;
    n.id = t;
    if (t > 0) {
      n.parent = t - 1;
      nodes.back().children.push_back(t);
    }
    n.frame = hist.frame_ptr(t);
    nodes.push_back(std::move(n));
  }
  return nodes;
}

}  // namespace

// ---------------------------------------------------------------- session

Session::Session(std::string id, std::shared_ptr<const Dataset> dataset, SessionConfig config, PolicyResolver resolver)
    : id_(std::move(id)), dataset_(std::move(dataset)), config_(std::move(config)), resolver_(std::move(resolver)) {
  if (!dataset_) throw Error(Errc::InvalidConfig, "session needs a dataset");
  if (dataset_->horizon() < 1) throw Error(Errc::InvalidConfig, "dataset has no timestamps");
  validate(config_);
  knowledge_ = dataset_->knowledge();
  nodes_ = historical_chain(dataset_);
  active_ = static_cast<int>(nodes_.size()) - 1;
  journal_locked({{"event", "create"}, {"nodes", nodes_.size()}});
}

const SimulationNode& Session::node_locked(int id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size())) throw Error(Errc::UnknownNode, "node " + std::to_string(id));
  return nodes_[static_cast<std::size_t>(id)];
}

Timeline Session::timeline_locked(int id) const {
  std::vector<std::shared_ptr<const Frame>> frames;
  for (std::optional<int> cur = id; cur; cur = node_locked(*cur).parent) frames.push_back(node_locked(*cur).frame);
  std::reverse(frames.begin(), frames.end());
  return Timeline(dataset_, std::move(frames));
}

NodeStatus Session::status_locked(int id) const {
  if (id == active_) return NodeStatus::Active;
  return node_locked(id).simulated() ? NodeStatus::Simulated : NodeStatus::Historical;
}

void Session::journal_locked(json entry) {
  entry["seq"] = journal_.size();
  journal_.push_back(std::move(entry));
}

int Session::add_node_locked(SimulationNode n) {
  n.id = static_cast<int>(nodes_.size());
  if (n.parent) nodes_[static_cast<std::size_t>(*n.parent)].children.push_back(n.id);
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

int Session::active() const {
  std::shared_lock lock(mu_);
  return active_;
}

std::size_t Session::node_count() const {
  std::shared_lock lock(mu_);
  return nodes_.size();
}

SimulationNode Session::node(int id) const {
  std::shared_lock lock(mu_);
  return node_locked(id);
}

NodeStatus Session::status(int id) const {
  std::shared_lock lock(mu_);
  return status_locked(id);
}

Timeline Session::timeline_to(int id) const {
  std::shared_lock lock(mu_);
  return timeline_locked(id);
}

KnowledgeBase Session::knowledge() const {
  std::shared_lock lock(mu_);
  return knowledge_;
}

std::vector<int> Session::run(int fromNode, int turns) {
  if (turns < 1) throw Error(Errc::InvalidConfig, "turns must be >= 1");
  Timeline timeline = [&] {
    std::shared_lock lock(mu_);
    return timeline_locked(fromNode);
  }();
  const KnowledgeBase kb = knowledge();
  const auto policies = make_policies(dataset_->ids(), resolver_(config_));
  const TurnConfig turn = turn_config(config_);

  std::vector<int> created;
  int parent = fromNode;
  for (int k = 0; k < turns; ++k) {
    int nextId = 0;
    {
      std::shared_lock lock(mu_);
      nextId = static_cast<int>(nodes_.size());
    }
    // Concurrent writers may take the id first; the seed only needs to be
    // reproducible for a serial history.
    const auto seed = derive_seed(config_.seed, "node:" + std::to_string(nextId));
    auto outcome = run_turn(timeline, kb, policies, turn, seed);
    auto frame = std::make_shared<const Frame>(std::move(outcome.next));
    timeline.push_back(frame);

    std::unique_lock lock(mu_);
    SimulationNode n;
    n.parent = parent;
    n.frame = frame;
    n.records = std::move(outcome.records);
    n.knowledge = kb;
    n.seed = seed;
    parent = add_node_locked(std::move(n));
    created.push_back(parent);
  }
  std::unique_lock lock(mu_);
  active_ = created.back();
  journal_locked({{"event", "run"}, {"from", fromNode}, {"turns", turns}, {"nodes", created}});
  return created;
}

void Session::stage_adjustment(int nodeId, Adjustment adj) {
  std::unique_lock lock(mu_);
  const auto& n = node_locked(nodeId);
  if (!n.simulated()) throw Error(Errc::NodeNotSimulated, "node " + std::to_string(nodeId) + " is historical");
  const auto* rec = record_of(n, adj.company);
  if (!rec) throw Error(Errc::InvalidReference, "no turn record for " + adj.company.str());
  const auto bad = [&](const std::string& why) {
    return Error(Errc::InvalidReference, std::string(to_string(adj.action)) + " " + std::string(to_string(adj.target)) +
                                             " of " + adj.company.str() + ": " + why);
  };
  auto in_range = [&](std::size_t size) {
    if (adj.index < 0 || static_cast<std::size_t>(adj.index) >= size)
      throw bad("index " + std::to_string(adj.index) + " out of range (" + std::to_string(size) + ")");
  };
  switch (adj.target) {
    case AdjustTarget::Plan:
      if (adj.action == AdjustAction::Negate) throw bad("plans cannot be negated");
      if (adj.action == AdjustAction::Delete) in_range(rec->plans.size());
      if (adj.action == AdjustAction::Add) {
        if (payload_string(adj.payload, "description").empty()) throw bad("missing description");
        payload_string(adj.payload, "reason");
        payload_bool(adj.payload, "seekCollaboration");
        payload_bool(adj.payload, "seekSuppliers");
        if (auto it = adj.payload.find("requests"); it != adj.payload.end()) {
          if (!it->is_array()) throw bad("requests must be an array");
          for (const auto& r : *it) {
            if (!r.is_object()) throw bad("request entries must be objects");
            const CompanyId target(payload_string(r, "target"));
            if (!dataset_->find(target)) throw bad("unknown target " + target.str());
            if (target == adj.company) throw bad("request targets itself");
          }
        }
      }
      break;
    case AdjustTarget::Request:
      if (adj.action == AdjustAction::Add) {
        const int p = payload_int(adj.payload, "planIndex");
        if (p < 0 || static_cast<std::size_t>(p) >= rec->plans.size()) throw bad("planIndex out of range");
        const CompanyId target(payload_string(adj.payload, "target"));
        if (!dataset_->find(target)) throw bad("unknown target " + target.str());
        if (target == adj.company) throw bad("request targets itself");
      } else {
        in_range(rec->outgoing.size());
      }
      if (adj.action == AdjustAction::Negate) {
        payload_string(adj.payload, "note");
        payload_bool(adj.payload, "force");
      }
      break;
    case AdjustTarget::Reply:
      if (adj.action != AdjustAction::Negate) throw bad("replies can only be negated");
      in_range(rec->incoming.size());
      payload_string(adj.payload, "note");
      payload_bool(adj.payload, "force");
      break;
  }
  staged_[nodeId].push_back(std::move(adj));
}

std::vector<Adjustment> Session::staged(int node) const {
  std::shared_lock lock(mu_);
  node_locked(node);
  auto it = staged_.find(node);
  return it == staged_.end() ? std::vector<Adjustment>{} : it->second;
}

void Session::reset_adjustments(int node) {
  std::unique_lock lock(mu_);
  node_locked(node);
  staged_.erase(node);
}

Deliberation Session::adjusted_deliberation(const SimulationNode& n, const CompanyId& id,
                                            const std::vector<Adjustment>& adjs) const {
  const auto* rec = record_of(n, id);
  Deliberation d = deliberation_from(*rec);
  std::vector<bool> planGone(d.plans.size(), false);
  std::vector<bool> requestGone(d.outgoing.size(), false);

  for (const auto& a : adjs) {
    if (a.company != id) continue;
    if (a.target == AdjustTarget::Plan && a.action == AdjustAction::Delete) {
      planGone[static_cast<std::size_t>(a.index)] = true;
    } else if (a.target == AdjustTarget::Plan && a.action == AdjustAction::Add) {
      PlanRecord p;
      p.description = payload_string(a.payload, "description");
      p.reason = payload_string(a.payload, "reason");
      p.seekCollaboration = payload_bool(a.payload, "seekCollaboration");
      p.seekSuppliers = payload_bool(a.payload, "seekSuppliers");
      p.userAuthored = true;
      const int idx = static_cast<int>(d.plans.size());
      d.plans.push_back(p);
      d.constraints.emplace_back();
      d.candidates.emplace_back();
      planGone.push_back(false);
      if (auto it = a.payload.find("requests"); it != a.payload.end())
        for (const auto& r : *it) {
          RequestRecord req;
          req.requester = id;
          req.planIndex = idx;
          req.target = CompanyId(payload_string(r, "target"));
          req.chosen = true;
          req.reason = payload_string(r, "reason");
          req.extraInfo = payload_string(r, "extraInfo");
          req.kind = request_kind_for(p);
          req.userAuthored = true;
          d.outgoing.push_back(req);
          requestGone.push_back(false);
        }
    } else if (a.target == AdjustTarget::Request && a.action == AdjustAction::Delete) {
      requestGone[static_cast<std::size_t>(a.index)] = true;
    } else if (a.target == AdjustTarget::Request && a.action == AdjustAction::Add) {
      RequestRecord req;
      req.requester = id;
      req.planIndex = payload_int(a.payload, "planIndex");
      req.target = CompanyId(payload_string(a.payload, "target"));
      req.chosen = true;
      req.reason = payload_string(a.payload, "reason");
      req.extraInfo = payload_string(a.payload, "extraInfo");
      req.kind = request_kind_for(d.plans[static_cast<std::size_t>(req.planIndex)]);
      req.userAuthored = true;
      d.outgoing.push_back(req);
      requestGone.push_back(false);
    } else if (a.target == AdjustTarget::Request && a.action == AdjustAction::Negate) {
      auto& req = d.outgoing[static_cast<std::size_t>(a.index)];
      const auto* reply = reply_to(n, req);
      if (!req.chosen) {
        req.chosen = true;
        req.userAuthored = true;
      } else if (req.kind == RequestKind::Terminate || (reply && reply->accepted)) {
        req.chosen = false;
      }
      // A chosen, declined request is re-issued as is; its reply override is
      // set up by apply_adjustments.
    }
  }

  std::vector<int> remap(d.plans.size(), -1);
  Deliberation out;
  out.id = d.id;
  out.dialogue = std::move(d.dialogue);
  out.warnings = std::move(d.warnings);
  for (std::size_t i = 0; i < d.plans.size(); ++i) {
    if (planGone[i]) continue;
    remap[i] = static_cast<int>(out.plans.size());
    out.plans.push_back(d.plans[i]);
    out.constraints.push_back(i < d.constraints.size() ? d.constraints[i] : QueryConstraint{});
    out.candidates.push_back(i < d.candidates.size() ? d.candidates[i] : CandidateList{});
  }
  for (std::size_t k = 0; k < d.outgoing.size(); ++k) {
    if (requestGone[k]) continue;
    auto r = d.outgoing[k];
    const int p = remap[static_cast<std::size_t>(r.planIndex)];
    if (p < 0) continue;
    r.planIndex = p;
    out.outgoing.push_back(std::move(r));
  }
  return out;
}

int Session::apply_adjustments(int nodeId) {
  std::unique_lock lock(mu_);
  const SimulationNode& n = node_locked(nodeId);
  if (!n.simulated()) throw Error(Errc::NodeNotSimulated, "node " + std::to_string(nodeId) + " is historical");
  const std::vector<Adjustment> adjs = staged_.count(nodeId) ? staged_.at(nodeId) : std::vector<Adjustment>{};

  ResolveOptions options;
  for (const auto& rec : n.records)
    for (const auto& r : rec.incoming) options.cachedReplies[{rec.companyId, r.requester, r.direction}] = r;

  bool synthetic = false;
  auto override_for = [&](const CompanyId& replier, const ReplyRecord& r, const Adjustment& a) {
    ReplyOverride o;
    o.note = payload_string(a.payload, "note");
    if (payload_bool(a.payload, "force")) {
      o.mode = r.accepted ? OverrideMode::ForceDecline : OverrideMode::ForceAccept;
      synthetic = true;
    }
    options.overrides[{replier, r.requester, r.direction}] = o;
  };
  for (const auto& a : adjs) {
    const auto* rec = record_of(n, a.company);
    if (a.target == AdjustTarget::Reply) {
      override_for(a.company, rec->incoming[static_cast<std::size_t>(a.index)], a);
    } else if (a.target == AdjustTarget::Request && a.action == AdjustAction::Negate) {
      const auto& req = rec->outgoing[static_cast<std::size_t>(a.index)];
      const auto* reply = reply_to(n, req);
      if (req.chosen && reply && !reply->accepted) {
        override_for(req.target, *reply, a);
      } else if (!req.chosen && req.kind != RequestKind::Terminate) {
        ReplyOverride o;
        o.note = payload_string(a.payload, "note");
        if (payload_bool(a.payload, "force")) {
          o.mode = OverrideMode::ForceAccept;
          synthetic = true;
        }
        options.overrides[{req.target, req.requester, direction_of(req.kind)}] = o;
      }
    }
  }

  std::vector<Deliberation> ds;
  for (const auto& rec : n.records) ds.push_back(adjusted_deliberation(n, rec.companyId, adjs));

  const Timeline timeline = timeline_locked(*n.parent);
  const auto policies = make_policies(dataset_->ids(), resolver_(config_));
  auto outcome = resolve(timeline, n.knowledge, policies, std::move(ds), turn_config(config_), n.seed, options);

  SimulationNode branch;
  branch.parent = n.parent;
  branch.frame = std::make_shared<const Frame>(std::move(outcome.next));
  branch.records = std::move(outcome.records);
  branch.knowledge = n.knowledge;
  branch.seed = n.seed;
  branch.synthetic = synthetic || n.synthetic;
  const int created = add_node_locked(std::move(branch));
  active_ = created;
  staged_.erase(nodeId);
  json list = json::array();
  for (const auto& a : adjs) list.push_back(to_json(a));
  journal_locked({{"event", "apply"}, {"node", nodeId}, {"result", created}, {"synthetic", synthetic}, {"adjustments", list}});
  return created;
}

void Session::update_knowledge(const std::optional<CompanyId>& scope, std::string text) {
  std::unique_lock lock(mu_);
  if (scope) {
    dataset_->index_of(*scope);
    knowledge_.firm[*scope] = text;
  } else {
    knowledge_.global = text;
  }
  journal_locked({{"event", "knowledge"}, {"scope", scope ? scope->str() : std::string("global")}, {"text", text}});
}

void Session::set_active(int node) {
  std::unique_lock lock(mu_);
  node_locked(node);
  active_ = node;
  journal_locked({{"event", "activate"}, {"node", node}});
}

// ---------------------------------------------------------------- export

std::string Session::export_log() const {
  std::shared_lock lock(mu_);
  std::ostringstream out;
  out << json{{"type", "header"},
              {"format", "scsim-log/v1"},
              {"session", id_},
              {"config", to_json(config_)},
              {"dataset", dataset_to_json(*dataset_)}}
             .dump()
      << '\n';
  for (const auto& j : journal_) {
    json line = j;
    line["type"] = "journal";
    out << line.dump() << '\n';
  }
  // Historical nodes follow from the dataset in the header.
  for (const auto& n : nodes_) {
    if (!n.simulated()) continue;
    json line{{"type", "node"},
              {"id", n.id},
              {"parent", n.parent ? json(*n.parent) : json(nullptr)},
              {"label", n.frame->label},
              {"synthetic", n.synthetic},
              {"seed", n.seed},
              {"edges", edges_json(*n.frame->edges)},
              {"features", matrix_json(n.frame->features)},
              {"knowledge", knowledge_json(n.knowledge)}};
    out << line.dump() << '\n';
    for (const auto& r : n.records) out << json{{"type", "record"}, {"node", n.id}, {"record", to_json(r)}}.dump() << '\n';
  }
  out << json{{"type", "state"}, {"active", active_}, {"knowledge", knowledge_json(knowledge_)}}.dump() << '\n';
  return out.str();
}

std::unique_ptr<Session> Session::import_log(std::string_view text, PolicyResolver resolver) {
  std::unique_ptr<Session> s(new Session());
  s->resolver_ = std::move(resolver);
  std::size_t lineNo = 0;
  bool header = false, state = false;
  std::istringstream in{std::string(text)};
  std::string line;
  try {
    while (std::getline(in, line)) {
      ++lineNo;
      if (line.empty()) continue;
      const json j = json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "header") {
        if (j.at("format").get<std::string>() != "scsim-log/v1") throw Error(Errc::ParseError, "unsupported log format");
        s->id_ = j.at("session").get<std::string>();
        s->config_ = session_config_from_json(j.at("config"));
        auto ds = std::make_shared<Dataset>(dataset_from_json(j.at("dataset")));
        validate(*ds);
        s->dataset_ = std::move(ds);
        s->nodes_ = historical_chain(s->dataset_);
        header = true;
      } else if (!header) {
        throw Error(Errc::ParseError, "log must start with a header line");
      } else if (type == "journal") {
        json entry = j;
        entry.erase("type");
        s->journal_.push_back(std::move(entry));
      } else if (type == "node") {
        SimulationNode n;
        n.id = j.at("id").get<int>();
        if (n.id != static_cast<int>(s->nodes_.size())) throw Error(Errc::ParseError, "node ids must be sequential");
        if (!j.at("parent").is_null()) n.parent = j.at("parent").get<int>();
        if (n.parent && (*n.parent < 0 || *n.parent >= n.id)) throw Error(Errc::ParseError, "bad parent");
        n.synthetic = j.value("synthetic", false);
        {
          Frame f;
          f.label = j.at("label").get<std::string>();
          EdgeSet edges;
          for (const auto& e : j.at("edges"))
            edges.insert({CompanyId(e.at(0).get<std::string>()), CompanyId(e.at(1).get<std::string>())});
          f.edges = make_snapshot(std::move(edges));
          f.features = matrix_from(j.at("features"), static_cast<Eigen::Index>(s->dataset_->feature_count()));
          f.simulated = true;
          n.frame = std::make_shared<const Frame>(std::move(f));
          n.seed = j.at("seed").get<std::uint64_t>();
          n.knowledge = knowledge_from(j.at("knowledge"));
        }
        if (n.parent) s->nodes_[static_cast<std::size_t>(*n.parent)].children.push_back(n.id);
        s->nodes_.push_back(std::move(n));
      } else if (type == "record") {
        const int node = j.at("node").get<int>();
        if (node < 0 || node >= static_cast<int>(s->nodes_.size())) throw Error(Errc::ParseError, "record for unknown node");
        s->nodes_[static_cast<std::size_t>(node)].records.push_back(turn_record_from_json(j.at("record")));
      } else if (type == "state") {
        s->active_ = j.at("active").get<int>();
        s->knowledge_ = knowledge_from(j.at("knowledge"));
        state = true;
      } else {
        throw Error(Errc::ParseError, "unknown line type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, "line " + std::to_string(lineNo) + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::ParseError) throw;
    throw Error(Errc::ParseError, "line " + std::to_string(lineNo) + ": " + e.what());
  }
  if (!header || !state) throw Error(Errc::ParseError, "truncated log");
  if (s->active_ < 0 || s->active_ >= static_cast<int>(s->nodes_.size())) throw Error(Errc::ParseError, "bad active node");
  return s;
}

std::unique_ptr<Session> Session::replay_log(std::string_view text, PolicyResolver resolver) {
  const auto recorded = import_log(text, resolver);
  auto s = std::make_unique<Session>(recorded->id_, recorded->dataset_, recorded->config_, std::move(resolver));
  for (const auto& e : recorded->journal_) {
    const auto event = e.at("event").get<std::string>();
    if (event == "create") continue;
    if (event == "run") {
      s->run(e.at("from").get<int>(), e.at("turns").get<int>());
    } else if (event == "apply") {
      const int node = e.at("node").get<int>();
      for (const auto& a : e.at("adjustments")) s->stage_adjustment(node, adjustment_from_json(a));
      s->apply_adjustments(node);
    } else if (event == "knowledge") {
      const auto scope = e.at("scope").get<std::string>();
      s->update_knowledge(scope == "global" ? std::nullopt : std::optional<CompanyId>(CompanyId(scope)),
                          e.at("text").get<std::string>());
    } else if (event == "activate") {
      s->set_active(e.at("node").get<int>());
    } else {
      throw Error(Errc::ParseError, "unknown journal event '" + event + "'");
    }
  }
  return s;
}

// ---------------------------------------------------------------- views

json Session::tree_json() const {
  std::shared_lock lock(mu_);
  json nodes = json::array();
  for (const auto& n : nodes_) {
    int adds = 0, removals = 0;
    for (const auto& r : n.records)
      for (const auto& d : r.appliedDeltas) (d.added ? adds : removals) += 1;
    nodes.push_back({{"id", n.id},
                     {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                     {"children", n.children},
                     {"label", n.frame->label},
                     {"status", to_string(status_locked(n.id))},
                     {"simulated", n.simulated()},
                     {"synthetic", n.synthetic},
                     {"edges", n.frame->edges->size()},
                     {"added", adds},
                     {"removed", removals}});
  }
  return {{"session", id_}, {"active", active_}, {"nodes", nodes}};
}

json Session::adjustment_view(const SimulationNode& n, const ViewParams& params) const {
  auto it = params.find("company");
  if (it == params.end()) throw Error(Errc::InvalidReference, "adjustment view needs a company parameter");
  const CompanyId id(it->second);
  dataset_->index_of(id);
  json out{{"node", n.id}, {"company", id.str()}, {"label", n.frame->label}};
  out["knowledge"] = {{"global", n.simulated() ? n.knowledge.global : knowledge_.global},
                      {"firm", n.simulated() ? n.knowledge.of(id) : knowledge_.of(id)}};
  json outgoing = json::array();
  json incoming = json::array();
  json warnings = json::array();
  if (const auto* rec = record_of(n, id)) {
    for (std::size_t p = 0; p < rec->plans.size(); ++p) {
      json requests = json::array();
      for (std::size_t k = 0; k < rec->outgoing.size(); ++k) {
        const auto& r = rec->outgoing[k];
        if (r.planIndex != static_cast<int>(p)) continue;
        std::string outcome = "not sent";
        if (r.chosen && r.kind == RequestKind::Terminate) outcome = "terminated";
        else if (r.chosen) {
          const auto* reply = reply_to(n, r);
          outcome = reply ? (reply->accepted ? "accepted" : "declined") : "no reply";
        }
        json rj = to_json(r);
        rj["index"] = k;
        rj["outcome"] = outcome;
        requests.push_back(std::move(rj));
      }
      json cands = json::array();
      if (p < rec->candidates.size())
        for (const auto& c : rec->candidates[p]) cands.push_back({{"id", c.id.str()}, {"score", c.score}});
      outgoing.push_back({{"index", p},
                          {"plan", to_json(rec->plans[p])},
                          {"constraint", p < rec->constraints.size() ? to_json(rec->constraints[p]) : json(nullptr)},
                          {"candidates", cands},
                          {"requests", requests}});
    }
    for (std::size_t k = 0; k < rec->incoming.size(); ++k) {
      json rj = to_json(rec->incoming[k]);
      rj["index"] = k;
      incoming.push_back(std::move(rj));
    }
    warnings = rec->warnings;
  }
  json staged = json::array();
  if (auto s = staged_.find(n.id); s != staged_.end())
    for (const auto& a : s->second)
      if (a.company == id) staged.push_back(to_json(a));
  out["outgoing"] = outgoing;
  out["incoming"] = incoming;
  out["warnings"] = warnings;
  out["staged"] = staged;
  return out;
}

json Session::control_panel_view() const {
  json horizon = json::array();
  const auto box = [](const BoxStats& b) {
    return json{{"min", b.min}, {"q1", b.q1}, {"median", b.median}, {"q3", b.q3}, {"max", b.max}};
  };
  if (dataset_->horizon() >= 4) {
    const int folds = std::min(4, dataset_->horizon() - 2);
    if (folds >= 2) {
      const auto rep = model_selection_report(*dataset_, {SeriesModelKind::Linear, SeriesModelKind::Lasso}, folds,
                                              config_.horizon.window, config_.horizon.lambda);
      for (const auto& e : rep.entries)
        horizon.push_back({{"model", to_string(e.kind)}, {"error", box(e.errorBox)}, {"runtimeMicros", box(e.runtimeBox)}});
    }
  }
  json explain = json::array();
  try {
    const auto rep = explain_model_report(Timeline(dataset_), config_.performanceMetric,
                                          {ExplainModelKind::Linear, ExplainModelKind::Lasso});
    for (const auto& e : rep)
      explain.push_back({{"model", to_string(e.kind)},
                         {"error", box(box_stats(e.absErrors))},
                         {"runtimeMicros", box(box_stats(e.runtimesMicros))}});
  } catch (const Error&) {
    // Too little history for leave-one-out; the panel shows no explain data.
  }
  return {{"config", to_json(config_)},
          {"metrics", {"collaborator_count", "pagerank"}},
          {"explainModels", {"linear", "lasso"}},
          {"horizonModels", {"linear", "lasso"}},
          {"policies", {"rule", "replay", "llm"}},
          {"horizonSelection", horizon},
          {"explainSelection", explain}};
}

json Session::focus_view(int node, const ViewParams& params) const {
  const Timeline timeline = timeline_locked(node);
  std::vector<CompanyId> focal;
  if (auto it = params.find("focal"); it != params.end()) {
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) focal.emplace_back(tok);
  }
  if (focal.empty()) throw Error(Errc::InvalidReference, "focus view needs focal=<id>[,<id>...]");
  int first = 0, last = timeline.size() - 1;
  if (auto it = params.find("from"); it != params.end()) first = std::stoi(it->second);
  if (auto it = params.find("to"); it != params.end()) last = std::stoi(it->second);
  ExplainConfig ec;
  ec.metric = config_.performanceMetric;
  ec.kind = config_.explainModel;
  const ExplainModelSet models(timeline, ec);
  return focus_layout_json(focus_layout(timeline, models, focal, first, last), dataset_->featureNames);
}

json Session::view(int node, std::string_view kind, const ViewParams& params) const {
  std::shared_lock lock(mu_);
  const auto& n = node_locked(node);
  if (kind == "path") {
    lock.unlock();
    return tree_json();
  }
  if (kind == "global") return global_embedding_json(global_embedding(timeline_locked(node)));
  if (kind == "focus") return focus_view(node, params);
  if (kind == "adjustment") return adjustment_view(n, params);
  if (kind == "controlpanel") return control_panel_view();
  throw Error(Errc::UnknownView, "unknown view '" + std::string(kind) + "'");
}

}  // namespace scsim
