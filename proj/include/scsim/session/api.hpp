#pragma once

#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scsim/error.hpp"
#include "scsim/session/session.hpp"

namespace scsim {

/// Datasets and sessions of one server process. With a data directory every
/// mutation is written through to disk:
///   <dir>/datasets/<id>.json   dataset documents
///   <dir>/sessions/<id>.jsonl  session logs (export_log), replaced atomically
/// and everything found there is loaded back on construction.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> dataDir = std::nullopt,
                        PolicyResolver resolver = offline_policy_factory);

  /// Validates; throws the dataset's Errc.
  std::string add_dataset(Dataset ds);
  /// Throws Errc::UnknownSession for an unknown id.
  std::shared_ptr<const Dataset> dataset(const std::string& id) const;
  std::vector<std::string> dataset_ids() const;

  std::string create_session(const std::string& datasetId, SessionConfig config);
  std::string import_session(std::string_view log);
  /// Throws Errc::UnknownSession.
  std::shared_ptr<Session> session(const std::string& id) const;
  std::vector<std::string> session_ids() const;

  /// Writes the session log when a data directory is configured.
  void persist(const std::string& sessionId) const;

 private:
  std::string next_id(char prefix, std::size_t count) const;

  std::optional<std::filesystem::path> dir_;
  PolicyResolver resolver_;
  mutable std::mutex mu_;
  mutable std::mutex diskMu_;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t datasetSeq_ = 0;
  std::size_t sessionSeq_ = 0;
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string authorization;
};

struct ApiResponse {
  int status = 200;
  std::string contentType = "application/json";
  std::string body;
};

/// Transport-independent JSON API. Routes:
///   GET  /health
///   GET  /datasets                      POST /datasets
///   GET  /sessions                      POST /sessions
///   POST /sessions:import               (body: exported log)
///   POST /sessions/{id}/run             {fromNode, turns, wait}
///   GET  /sessions/{id}/jobs/{job}
///   GET  /sessions/{id}/tree
///   GET  /sessions/{id}/nodes/{n}/view/{path|global|focus|adjustment|controlpanel}
///   GET  /sessions/{id}/nodes/{n}/adjustments
///   POST /sessions/{id}/nodes/{n}/adjustments
///   POST /sessions/{id}/nodes/{n}/adjustments:apply
///   POST /sessions/{id}/nodes/{n}/adjustments:reset
///   PUT  /sessions/{id}/knowledge       {scope, text}
///   PUT  /sessions/{id}/active          {node}
///   GET  /sessions/{id}/export
/// Errors come back as {"error": code, "message": text}.
class Api {
 public:
  /// A non-empty token requires "Authorization: Bearer <token>".
  explicit Api(SessionStore& store, std::string token = {});
  ~Api();

  Api(const Api&) = delete;
  Api& operator=(const Api&) = delete;

  ApiResponse handle(const ApiRequest& req);

 private:
  struct Job {
    std::string session;
    std::shared_future<std::vector<int>> result;
  };

  ApiResponse route(const ApiRequest& req);
  nlohmann::json job_json(int id, Job& job);

  SessionStore& store_;
  std::string token_;
  std::mutex jobsMu_;
  std::map<int, Job> jobs_;
};

/// HTTP status for an error code.
int http_status(Errc code) noexcept;

}  // namespace scsim
