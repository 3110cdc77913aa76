#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "../support/oracles.hpp"
#include "../support/two_firm.hpp"
#include "scsim/core/io.hpp"
#include "scsim/session/api.hpp"
#include "scsim/synthetic.hpp"

using namespace scsim;
using nlohmann::json;

namespace {

std::shared_ptr<const Dataset> market() {
  return std::make_shared<const Dataset>(generate_synthetic({.companies = 35, .quarters = 6, .seed = 7}));
}

SessionConfig rule_config() {
  SessionConfig c;
  c.seed = 3;
  c.turns = 2;
  return c;
}

std::string node_bytes(const Session& s, int id) {
  const auto n = s.node(id);
  json j = json::array();
  for (const auto& r : n.records) j.push_back(to_json(r));
  json edges = json::array();
  for (const auto& e : *n.frame->edges) edges.push_back({e.supplier.str(), e.customer.str()});
  return json{{"records", j}, {"edges", edges}, {"children", n.children}, {"seed", n.seed}}.dump();
}

struct AcceptedReply {
  CompanyId replier;
  int index = -1;
  Edge edge;
};

/// An accepted reply whose edge is added by exactly one delta in the turn.
std::optional<AcceptedReply> find_accepted(const SimulationNode& n) {
  for (const auto& r : n.records)
    for (std::size_t i = 0; i < r.incoming.size(); ++i) {
      const auto& rep = r.incoming[i];
      if (!rep.accepted) continue;
      const Edge e = accepted_edge(rep.requester, r.companyId, rep.direction);
      int adds = 0;
      for (const auto& rr : n.records)
        for (const auto& d : rr.appliedDeltas) adds += d.added && d.edge == e;
      if (adds == 1) return AcceptedReply{r.companyId, static_cast<int>(i), e};
    }
  return std::nullopt;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ApiResponse call(Api& api, std::string method, std::string path, json body = nullptr) {
  ApiRequest r;
  r.method = std::move(method);
  r.path = std::move(path);
  if (!body.is_null()) r.body = body.dump();
  return api.handle(r);
}

}  // namespace

TEST_CASE("session starts with the historical chain") {
  Session s("s", market(), rule_config());
  CHECK(s.node_count() == 6);
  CHECK(s.active() == 5);
  CHECK(s.status(5) == NodeStatus::Active);
  CHECK(s.status(0) == NodeStatus::Historical);
  CHECK_FALSE(s.node(0).parent.has_value());
  CHECK(s.node(3).parent == 2);
  CHECK_THROWS_AS(s.node(99), Error);
  SessionConfig bad = rule_config();
  bad.referenceLength = 0;
  CHECK_THROWS_AS(Session("s", market(), bad), Error);
}

TEST_CASE("runs from the same node branch as siblings and leave earlier nodes intact") {
  Session s("s", market(), rule_config());
  const auto first = s.run(5, 2);
  CHECK(first == std::vector<int>{6, 7});
  CHECK(s.active() == 7);
  CHECK(s.status(6) == NodeStatus::Simulated);
  const auto before6 = node_bytes(s, 6), before7 = node_bytes(s, 7);
  const auto second = s.run(5, 1);
  CHECK(second == std::vector<int>{8});
  CHECK(s.node(5).children == std::vector<int>{6, 8});
  CHECK(s.node(8).parent == 5);
  CHECK(node_bytes(s, 6) == before6);
  CHECK(node_bytes(s, 7) == before7);
  // Same parent, same seed derivation input differs only by node id.
  CHECK(s.node(8).seed != s.node(6).seed);
  CHECK(s.timeline_to(7).size() == 8);
  CHECK(s.timeline_to(8).back().label == "Q7");
  const auto tree = s.tree_json();
  CHECK(tree["nodes"].size() == 9);
}

TEST_CASE("staging and resetting adjustments changes nothing") {
  Session s("s", market(), rule_config());
  s.run(5, 1);
  const auto before = s.export_log();
  const auto n = s.node(6);
  const auto acc = find_accepted(n);
  REQUIRE(acc);
  Adjustment a;
  a.target = AdjustTarget::Reply;
  a.company = acc->replier;
  a.index = acc->index;
  a.payload = {{"force", true}};
  s.stage_adjustment(6, a);
  CHECK(s.staged(6).size() == 1);
  s.reset_adjustments(6);
  CHECK(s.staged(6).empty());
  CHECK(s.export_log() == before);

  a.action = AdjustAction::Add;
  CHECK_THROWS_AS(s.stage_adjustment(6, a), Error);
  a.action = AdjustAction::Negate;
  a.index = 999;
  CHECK_THROWS_AS(s.stage_adjustment(6, a), Error);
  a.index = 0;
  try {
    s.stage_adjustment(2, a);
    FAIL("historical node accepted an adjustment");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NodeNotSimulated);
  }
}

TEST_CASE("forced reply negation removes exactly that edge in a new branch") {
  Session s("s", market(), rule_config());
  s.run(5, 1);
  const auto orig = s.node(6);
  const auto acc = find_accepted(orig);
  REQUIRE(acc);
  REQUIRE_FALSE(s.node(5).frame->edges->contains(acc->edge));
  const auto parentBytes = node_bytes(s, 5);
  const auto origBytes = node_bytes(s, 6);

  Adjustment a;
  a.target = AdjustTarget::Reply;
  a.action = AdjustAction::Negate;
  a.company = acc->replier;
  a.index = acc->index;
  a.payload = {{"force", true}, {"note", "blocked by regulation"}};
  s.stage_adjustment(6, a);
  const int created = s.apply_adjustments(6);
  CHECK(created == 7);
  CHECK(s.active() == 7);
  const auto n = s.node(7);
  CHECK(n.parent == 5);
  CHECK(n.synthetic);

  EdgeSet expect = *orig.frame->edges;
  expect.erase(acc->edge);
  CHECK(*n.frame->edges == expect);
  CHECK(node_bytes(s, 6) == origBytes);
  // The parent only gains a child.
  auto parent = json::parse(parentBytes);
  parent["children"].push_back(7);
  CHECK(node_bytes(s, 5) == parent.dump());
  CHECK(s.staged(6).empty());
}

TEST_CASE("forcing acceptance of a rejected reply matches the commit oracle") {
  Session s("s", market(), rule_config());
  s.run(5, 1);
  const auto orig = s.node(6);
  std::optional<std::pair<CompanyId, int>> rejected;
  for (const auto& r : orig.records)
    for (std::size_t i = 0; i < r.incoming.size() && !rejected; ++i)
      if (!r.incoming[i].accepted) rejected = {r.companyId, static_cast<int>(i)};
  REQUIRE(rejected);

  std::vector<RequestRecord> terminations;
  std::vector<std::pair<RequestRecord, ReplyRecord>> replies;
  Edge forcedEdge;
  std::size_t forcedAt = 0;
  for (const auto& r : orig.records) {
    for (const auto& q : r.outgoing)
      if (q.chosen && q.kind == RequestKind::Terminate) terminations.push_back(q);
    for (std::size_t i = 0; i < r.incoming.size(); ++i) {
      RequestRecord q;
      q.requester = r.incoming[i].requester;
      q.target = r.companyId;
      ReplyRecord rep = r.incoming[i];
      if (r.companyId == rejected->first && static_cast<int>(i) == rejected->second) {
        rep.accepted = true;
        forcedAt = replies.size();
        forcedEdge = rep.direction == ReplyDirection::RequesterWantsToSupply ? Edge{q.requester, q.target}
                                                                             : Edge{q.target, q.requester};
      }
      replies.emplace_back(q, rep);
    }
  }
  const auto expect = oracle::commit(*s.node(5).frame->edges, terminations, replies);
  // The oracle also reproduces the unadjusted turn.
  auto unforced = replies;
  unforced[forcedAt].second.accepted = false;
  CHECK(*orig.frame->edges == oracle::commit(*s.node(5).frame->edges, terminations, unforced));

  Adjustment a;
  a.target = AdjustTarget::Reply;
  a.action = AdjustAction::Negate;
  a.company = rejected->first;
  a.index = rejected->second;
  a.payload = {{"force", true}};
  s.stage_adjustment(6, a);
  const int created = s.apply_adjustments(6);
  const auto n = s.node(created);
  CHECK(n.synthetic);
  CHECK(*n.frame->edges == expect);
  CHECK(n.frame->edges->contains(forcedEdge));
}

TEST_CASE("deleting an accepted request drops its edge") {
  Session s("s", market(), rule_config());
  s.run(5, 1);
  const auto orig = s.node(6);
  const auto acc = find_accepted(orig);
  REQUIRE(acc);
  // Locate the requester's outgoing request behind the accepted reply.
  std::optional<Adjustment> del;
  for (const auto& r : orig.records)
    for (std::size_t i = 0; i < r.outgoing.size(); ++i) {
      const auto& q = r.outgoing[i];
      if (q.chosen && q.target == acc->replier && q.kind != RequestKind::Terminate &&
          accepted_edge(q.requester, q.target, direction_of(q.kind)) == acc->edge) {
        Adjustment a;
        a.target = AdjustTarget::Request;
        a.action = AdjustAction::Delete;
        a.company = r.companyId;
        a.index = static_cast<int>(i);
        del = a;
      }
    }
  REQUIRE(del);
  s.stage_adjustment(6, *del);
  const int created = s.apply_adjustments(6);
  EdgeSet expect = *orig.frame->edges;
  expect.erase(acc->edge);
  CHECK(*s.node(created).frame->edges == expect);
  CHECK_FALSE(s.node(created).synthetic);
}

TEST_CASE("knowledge edits apply to later turns and are journaled") {
  Session s("s", market(), rule_config());
  const auto firm = s.dataset().companies[0].id;
  s.update_knowledge(firm, "Expanding abroad.");
  s.update_knowledge(std::nullopt, "Tariffs rising.");
  CHECK(s.knowledge().of(firm) == "Expanding abroad.");
  CHECK(s.knowledge().global == "Tariffs rising.");
  CHECK_THROWS_AS(s.update_knowledge(CompanyId("ghost"), "x"), Error);
  s.run(5, 1);
  CHECK(s.node(6).knowledge.global == "Tariffs rising.");
  CHECK(s.node(5).knowledge.global != "Tariffs rising.");
  CHECK(s.export_log().find("\"event\":\"knowledge\"") != std::string::npos);
}

TEST_CASE("updated knowledge reaches later prompts only") {
  auto prompts = std::make_shared<std::vector<std::string>>();
  auto transport = std::make_shared<CallbackTransport>([prompts](const std::vector<ChatMessage>& m) {
    prompts->push_back(m.at(1).content);
    return std::string("[]");
  });
  PolicyResolver resolver = [transport](const SessionConfig&) -> PolicyFactory {
    return [transport](const CompanyId&) { return llm_policy(transport); };
  };
  Session s("s", market(), rule_config(), resolver);
  const auto firm = s.dataset().companies[4].id;
  s.run(5, 1);
  const auto firstDialogue = json(to_json(s.node(6).records.at(4))).dump();
  const std::string text = "Secured a long-term contract; avoid new suppliers.";
  s.update_knowledge(firm, text);
  prompts->clear();
  s.run(5, 1);
  int hits = 0;
  for (const auto& p : *prompts)
    if (p.find("You are company " + firm.str() + ".") != std::string::npos) hits += p.find(text) != std::string::npos;
  CHECK(hits == 1);
  CHECK(json(to_json(s.node(6).records.at(4))).dump() == firstDialogue);
  CHECK(firstDialogue.find(text) == std::string::npos);

  s.update_knowledge(firm, "");
  CHECK(s.knowledge().of(firm).empty());
}

TEST_CASE("a fresh session exports only header, journal and state") {
  Session s("s", market(), rule_config());
  std::istringstream in(s.export_log());
  std::vector<std::string> types;
  for (std::string line; std::getline(in, line);) types.push_back(json::parse(line).at("type"));
  CHECK(types == std::vector<std::string>{"header", "journal", "state"});
  CHECK(Session("s", market(), rule_config()).export_log() == s.export_log());
}

TEST_CASE("export, import and replay agree byte for byte") {
  Session s("s", market(), rule_config());
  s.run(5, 2);
  s.run(5, 1);
  const auto acc = find_accepted(s.node(6));
  REQUIRE(acc);
  Adjustment a;
  a.target = AdjustTarget::Reply;
  a.company = acc->replier;
  a.index = acc->index;
  a.payload = {{"force", true}};
  s.stage_adjustment(6, a);
  s.apply_adjustments(6);
  s.update_knowledge(std::nullopt, "New regime.");
  s.set_active(7);
  const auto log = s.export_log();
  CHECK(Session::import_log(log)->export_log() == log);
  CHECK(Session::replay_log(log)->export_log() == log);
  CHECK_THROWS_AS(Session::import_log("{not json"), Error);
  CHECK_THROWS_AS(Session::import_log(""), Error);
}

TEST_CASE("views") {
  Session s("s", market(), rule_config());
  s.run(5, 1);
  const auto firm = s.dataset().companies[3].id.str();
  CHECK(s.view(6, "path")["nodes"].size() == 7);
  CHECK(s.view(6, "global")["panels"].size() == 7);
  const auto adj = s.view(6, "adjustment", {{"company", firm}});
  CHECK(adj.contains("outgoing"));
  CHECK(adj.contains("incoming"));
  CHECK(s.view(6, "controlpanel")["config"]["policy"] == "rule");
  const auto focus = s.view(6, "focus", {{"focal", firm}});
  CHECK(focus.contains("panels"));
  CHECK_THROWS_AS(s.view(6, "sunburst"), Error);
  CHECK_THROWS_AS(s.view(6, "adjustment", {{"company", "ghost"}}), Error);
}

TEST_CASE("recorded two-firm session replays to the golden log") {
  const std::filesystem::path dir = SCSIM_FIXTURE_DIR;
  const auto golden = read_file(dir / "golden.jsonl");
  REQUIRE_FALSE(golden.empty());
  const auto ds = std::make_shared<const Dataset>(
      load_dataset(dir / "companies.csv", dir / "edges.csv", dir / "knowledge.txt"));
  CHECK(*ds == *two_firm::dataset());
  Session s("golden", ds, two_firm::config(), two_firm::replay_resolver(dir));
  s.run(s.active(), 2);
  CHECK(s.export_log() == golden);
  CHECK(Session::replay_log(golden, two_firm::replay_resolver(dir))->export_log() == golden);

  // The second turn needed one repair before the pair was terminated.
  const auto n = s.node(s.active());
  const auto& rec = n.records.at(0);
  REQUIRE(rec.dialogue.size() >= 2);
  CHECK(rec.dialogue[1].attempt == 1);
  CHECK(n.frame->edges->empty());
}

TEST_CASE("api routes") {
  SessionStore store;
  Api api(store);
  CHECK(call(api, "GET", "/health").status == 200);
  const auto ds = generate_synthetic({.companies = 10, .quarters = 4, .seed = 1});
  const auto created = call(api, "POST", "/datasets", {{"dataset", dataset_to_json(ds)}});
  REQUIRE(created.status == 201);
  CHECK(json::parse(created.body)["datasetId"] == "d1");
  const auto text = call(api, "POST", "/datasets",
                         {{"companies", companies_csv(ds)}, {"edges", edges_csv(ds)}, {"knowledge", ds.globalKnowledge}});
  CHECK(text.status == 201);
  const auto sess = call(api, "POST", "/sessions", {{"datasetId", "d1"}, {"config", {{"seed", 4}}}});
  REQUIRE(sess.status == 201);
  CHECK(json::parse(sess.body)["sessionId"] == "s1");
  const auto run = call(api, "POST", "/sessions/s1/run", {{"turns", 1}, {"wait", true}});
  REQUIRE(run.status == 200);
  CHECK(json::parse(run.body)["nodes"] == json::array({4}));

  const auto job = call(api, "POST", "/sessions/s1/run", {{"fromNode", 3}, {"turns", 1}});
  REQUIRE(job.status == 202);
  json state;
  for (int i = 0; i < 500; ++i) {
    state = json::parse(call(api, "GET", "/sessions/s1/jobs/1").body);
    if (state["status"] != "running") break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  CHECK(state["status"] == "done");
  CHECK(json::parse(call(api, "GET", "/sessions/s1/tree").body)["nodes"].size() == 6);
  CHECK(call(api, "GET", "/sessions/s1/nodes/4/view/path").status == 200);
  const auto exported = call(api, "GET", "/sessions/s1/export");
  CHECK(exported.contentType == "application/x-ndjson");
  ApiRequest imp{"POST", "/sessions:import", {}, exported.body, {}};
  CHECK(api.handle(imp).status == 201);

  CHECK(call(api, "GET", "/sessions/s9/tree").status == 404);
  CHECK(call(api, "GET", "/sessions/s1/nodes/2/adjustments").status == 200);
  CHECK(call(api, "POST", "/sessions/s1/nodes/2/adjustments:apply").status == 409);
  CHECK(call(api, "GET", "/sessions/s1/nodes/4/view/pie").status == 404);
  CHECK(call(api, "POST", "/sessions", {{"datasetId", "d1"}, {"config", {{"turns", 0}}}}).status == 400);
  const auto err = json::parse(call(api, "PUT", "/sessions/s1/knowledge", {{"scope", "ghost"}, {"text", "x"}}).body);
  CHECK(err["error"] == "UnknownCompany");
  CHECK(call(api, "PUT", "/sessions/s1/active", {{"node", 1}}).status == 200);

  Api guarded(store, "secret");
  CHECK(guarded.handle({"GET", "/health", {}, {}, {}}).status == 401);
  CHECK(guarded.handle({"GET", "/health", {}, {}, "Bearer secret"}).status == 200);
}

TEST_CASE("store persists sessions and loads them back") {
  const auto dir = std::filesystem::temp_directory_path() / "scsim_store_test";
  std::filesystem::remove_all(dir);
  std::string log;
  {
    SessionStore store(dir);
    const auto d = store.add_dataset(generate_synthetic({.companies = 8, .quarters = 3, .seed = 5}));
    const auto s = store.create_session(d, rule_config());
    store.session(s)->run(2, 1);
    store.persist(s);
    log = store.session(s)->export_log();
  }
  SessionStore reloaded(dir);
  CHECK(reloaded.dataset_ids() == std::vector<std::string>{"d1"});
  REQUIRE(reloaded.session_ids() == std::vector<std::string>{"s1"});
  CHECK(reloaded.session("s1")->export_log() == log);
  std::filesystem::remove_all(dir);
}
