#include "scsim/session/api.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "scsim/core/io.hpp"
#include "scsim/error.hpp"

namespace scsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_atomically(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::MissingFile, "cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error(Errc::MissingFile, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Numeric suffix of ids such as "s12"; 0 when there is none.
std::size_t id_number(const std::string& id) {
  if (id.size() < 2) return 0;
  std::size_t n = 0;
  for (std::size_t i = 1; i < id.size(); ++i) {
    if (id[i] < '0' || id[i] > '9') return 0;
    n = n * 10 + static_cast<std::size_t>(id[i] - '0');
  }
  return n;
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string seg;
  while (std::getline(ss, seg, '/'))
    if (!seg.empty()) parts.push_back(seg);
  return parts;
}

json parse_body(const ApiRequest& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("request body: ") + e.what());
  }
}

int parse_int(const std::string& s, Errc code) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(code, "'" + s + "' is not an integer");
}

ApiResponse reply(json body, int status = 200) {
  return {status, "application/json", body.dump()};
}

ApiResponse error_reply(int status, std::string_view code, const std::string& message) {
  return reply({{"error", code}, {"message", message}}, status);
}

}  // namespace

// ---------------------------------------------------------------- store

SessionStore::SessionStore(std::optional<fs::path> dataDir, PolicyResolver resolver)
    : dir_(std::move(dataDir)), resolver_(std::move(resolver)) {
  if (!dir_) return;
  fs::create_directories(*dir_ / "datasets");
  fs::create_directories(*dir_ / "sessions");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(*dir_ / "datasets"))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    auto ds = std::make_shared<Dataset>(dataset_from_json(json::parse(read_text_file(p))));
    validate(*ds);
    const auto id = p.stem().string();
    datasetSeq_ = std::max(datasetSeq_, id_number(id));
    datasets_[id] = std::move(ds);
  }
  files.clear();
  for (const auto& e : fs::directory_iterator(*dir_ / "sessions"))
    if (e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::shared_ptr<Session> s = Session::import_log(read_text_file(p), resolver_);
    sessionSeq_ = std::max(sessionSeq_, id_number(s->id()));
    sessions_[s->id()] = std::move(s);
  }
}

std::string SessionStore::next_id(char prefix, std::size_t count) const {
  return std::string(1, prefix) + std::to_string(count);
}

std::string SessionStore::add_dataset(Dataset ds) {
  validate(ds);
  auto ptr = std::make_shared<const Dataset>(std::move(ds));
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = next_id('d', ++datasetSeq_);
    datasets_[id] = ptr;
  }
  if (dir_) {
    std::lock_guard lock(diskMu_);
    write_atomically(*dir_ / "datasets" / (id + ".json"), dataset_to_json(*ptr).dump());
  }
  return id;
}

std::shared_ptr<const Dataset> SessionStore::dataset(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = datasets_.find(id);
  if (it == datasets_.end()) throw Error(Errc::UnknownSession, "unknown dataset '" + id + "'");
  return it->second;
}

std::vector<std::string> SessionStore::dataset_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : datasets_) out.push_back(id);
  return out;
}

std::string SessionStore::create_session(const std::string& datasetId, SessionConfig config) {
  auto ds = dataset(datasetId);
  validate(config);
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = next_id('s', sessionSeq_ + 1);
    sessions_[id] = std::make_shared<Session>(id, std::move(ds), std::move(config), resolver_);
    ++sessionSeq_;
  }
  persist(id);
  return id;
}

std::string SessionStore::import_session(std::string_view log) {
  const auto eol = log.find('\n');
  json header;
  try {
    header = json::parse(log.substr(0, eol));
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("line 1: ") + e.what());
  }
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = next_id('s', ++sessionSeq_);
  }
  header["session"] = id;
  std::string text = header.dump();
  if (eol != std::string_view::npos) text += log.substr(eol);
  std::shared_ptr<Session> s = Session::import_log(text, resolver_);
  {
    std::lock_guard lock(mu_);
    sessions_[id] = std::move(s);
  }
  persist(id);
  return id;
}

std::shared_ptr<Session> SessionStore::session(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(Errc::UnknownSession, "unknown session '" + id + "'");
  return it->second;
}

std::vector<std::string> SessionStore::session_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

void SessionStore::persist(const std::string& sessionId) const {
  if (!dir_) return;
  const auto s = session(sessionId);
  std::lock_guard lock(diskMu_);
  write_atomically(*dir_ / "sessions" / (sessionId + ".jsonl"), s->export_log());
}

// ---------------------------------------------------------------- api

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownSession:
    case Errc::UnknownNode:
    case Errc::UnknownView:
    case Errc::UnknownCompany:
    case Errc::UnknownModel:
      return 404;
    case Errc::NodeNotSimulated:
      return 409;
    case Errc::TransportError:
    case Errc::PolicyFailure:
      return 502;
    case Errc::MissingFile:
      return 500;
    default:
      return 400;
  }
}

Api::Api(SessionStore& store, std::string token) : store_(store), token_(std::move(token)) {}

Api::~Api() {
  std::lock_guard lock(jobsMu_);
  for (auto& [_, job] : jobs_) job.result.wait();
}

ApiResponse Api::handle(const ApiRequest& req) {
  if (!token_.empty() && req.authorization != "Bearer " + token_)
    return error_reply(401, "Unauthorized", "missing or wrong bearer token");
  try {
    return route(req);
  } catch (const Error& e) {
    return error_reply(http_status(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_reply(500, "Internal", e.what());
  }
}

json Api::job_json(int id, Job& job) {
  json out{{"job", id}, {"session", job.session}};
  if (job.result.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
    out["status"] = "running";
    return out;
  }
  try {
    out["nodes"] = job.result.get();
    out["status"] = "done";
  } catch (const std::exception& e) {
    out["status"] = "failed";
    out["message"] = e.what();
  }
  return out;
}

ApiResponse Api::route(const ApiRequest& req) {
  const auto p = split_path(req.path);
  const auto& m = req.method;
  const auto not_found = [&] { return error_reply(404, "NotFound", m + " " + req.path); };

  if (p.size() == 1 && p[0] == "health" && m == "GET") return reply({{"status", "ok"}});

  if (p.size() == 1 && p[0] == "datasets") {
    if (m == "GET") return reply({{"datasets", store_.dataset_ids()}});
    if (m != "POST") return not_found();
    const json body = parse_body(req);
    Dataset ds = body.contains("dataset")
                     ? dataset_from_json(body.at("dataset"))
                     : parse_dataset(body.value("companies", std::string()), body.value("edges", std::string()),
                                     body.value("knowledge", std::string()));
    const auto id = store_.add_dataset(std::move(ds));
    const auto stored = store_.dataset(id);
    return reply({{"datasetId", id},
                  {"companies", stored->company_count()},
                  {"timestamps", stored->timestampLabels},
                  {"features", stored->featureNames}},
                 201);
  }

  if (p.size() == 1 && p[0] == "sessions:import" && m == "POST") {
    const auto id = store_.import_session(req.body);
    return reply({{"sessionId", id}}, 201);
  }

  if (p.empty() || p[0] != "sessions") return not_found();
  if (p.size() == 1) {
    if (m == "GET") return reply({{"sessions", store_.session_ids()}});
    if (m != "POST") return not_found();
    const json body = parse_body(req);
    const auto id = store_.create_session(body.at("datasetId").get<std::string>(),
                                          session_config_from_json(body.value("config", json::object())));
    const auto s = store_.session(id);
    return reply({{"sessionId", id}, {"active", s->active()}, {"nodes", s->node_count()}}, 201);
  }

  const std::string& sid = p[1];
  const auto s = store_.session(sid);

  if (p.size() == 3 && p[2] == "tree" && m == "GET") return reply(s->tree_json());
  if (p.size() == 3 && p[2] == "export" && m == "GET") return {200, "application/x-ndjson", s->export_log()};

  if (p.size() == 3 && p[2] == "run" && m == "POST") {
    const json body = parse_body(req);
    const int from = body.value("fromNode", s->active());
    const int turns = body.value("turns", s->config().turns);
    if (turns < 1) throw Error(Errc::InvalidConfig, "turns must be >= 1");
    s->node(from);
    if (body.value("wait", false)) {
      const auto nodes = s->run(from, turns);
      store_.persist(sid);
      return reply({{"status", "done"}, {"nodes", nodes}, {"active", s->active()}});
    }
    SessionStore* store = &store_;
    auto fut = std::async(std::launch::async, [s, store, sid, from, turns] {
                 auto nodes = s->run(from, turns);
                 store->persist(sid);
                 return nodes;
               }).share();
    std::lock_guard lock(jobsMu_);
    const int jobId = static_cast<int>(jobs_.size()) + 1;
    jobs_[jobId] = Job{sid, std::move(fut)};
    return reply({{"job", jobId}, {"status", "running"}}, 202);
  }

  if (p.size() == 4 && p[2] == "jobs" && m == "GET") {
    const int id = parse_int(p[3], Errc::InvalidReference);
    std::lock_guard lock(jobsMu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end() || it->second.session != sid)
      throw Error(Errc::InvalidReference, "unknown job " + p[3]);
    return reply(job_json(id, it->second));
  }

  if (p.size() == 3 && p[2] == "knowledge" && m == "PUT") {
    const json body = parse_body(req);
    std::optional<CompanyId> scope;
    if (body.contains("scope") && !body["scope"].is_null() && body["scope"].get<std::string>() != "global")
      scope = CompanyId(body["scope"].get<std::string>());
    s->update_knowledge(scope, body.at("text").get<std::string>());
    store_.persist(sid);
    return reply({{"status", "ok"}});
  }

  if (p.size() == 3 && p[2] == "active" && m == "PUT") {
    const json body = parse_body(req);
    s->set_active(body.at("node").get<int>());
    store_.persist(sid);
    return reply({{"active", s->active()}});
  }

  if (p.size() >= 5 && p[2] == "nodes") {
    const int node = parse_int(p[3], Errc::UnknownNode);
    if (p.size() == 6 && p[4] == "view" && m == "GET") {
      ViewParams params(req.query.begin(), req.query.end());
      return reply(s->view(node, p[5], params));
    }
    if (p.size() == 5) {
      const auto staged_json = [&] {
        json a = json::array();
        for (const auto& adj : s->staged(node)) a.push_back(to_json(adj));
        return json{{"node", node}, {"staged", a}};
      };
      if (p[4] == "adjustments" && m == "GET") return reply(staged_json());
      if (p[4] == "adjustments" && m == "POST") {
        s->stage_adjustment(node, adjustment_from_json(parse_body(req)));
        return reply(staged_json());
      }
      if (p[4] == "adjustments:reset" && m == "POST") {
        s->reset_adjustments(node);
        return reply(staged_json());
      }
      if (p[4] == "adjustments:apply" && m == "POST") {
        const int created = s->apply_adjustments(node);
        store_.persist(sid);
        return reply({{"node", created}, {"active", s->active()}}, 201);
      }
    }
  }
  return not_found();
}

}  // namespace scsim
