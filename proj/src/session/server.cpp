#include "scsim/session/server.hpp"

#include <mutex>
#include <thread>

#include "scsim/agent/llm_policy.hpp"
#include "scsim/error.hpp"

// After Eigen: <resolv.h> defines a _res macro that breaks Eigen's kernels.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace scsim {

PolicyFactory network_policy_factory(const SessionConfig& config) {
  if (config.policy != "llm") return offline_policy_factory(config);
  std::shared_ptr<ChatTransport> transport = make_http_transport(LlmSettings::from_env());
  if (config.record) {
    if (config.transcriptDir.empty()) throw Error(Errc::InvalidConfig, "record needs transcriptDir");
    transport = std::make_shared<RecordingTransport>(transport, config.transcriptDir);
  }
  return [transport](const CompanyId&) { return llm_policy(transport); };
}

namespace {

std::mutex g_mu;
httplib::Server* g_server = nullptr;

void forward(Api& api, const httplib::Request& req, httplib::Response& res) {
  ApiRequest r;
  r.method = req.method;
  r.path = req.path;
  for (const auto& [k, v] : req.params) r.query[k] = v;
  r.body = req.body;
  r.authorization = req.get_header_value("Authorization");
  const auto out = api.handle(r);
  res.status = out.status;
  res.set_content(out.body, out.contentType);
}

}  // namespace

void serve(Api& api, const ServeOptions& options) {
  httplib::Server server;
  const auto handler = [&api](const httplib::Request& req, httplib::Response& res) { forward(api, req, res); };
  const char* pattern = R"(/.*)";
  server.Get(pattern, handler);
  server.Post(pattern, handler);
  server.Put(pattern, handler);
  server.Options(pattern, [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type, Authorization"}});

  int port = options.port;
  if (port == 0) {
    port = server.bind_to_any_port(options.host);
  } else if (!server.bind_to_port(options.host, port)) {
    throw Error(Errc::TransportError, "cannot bind " + options.host + ":" + std::to_string(port));
  }
  if (port < 0) throw Error(Errc::TransportError, "cannot bind " + options.host);
  {
    std::lock_guard lock(g_mu);
    g_server = &server;
  }
  if (options.onReady) {
    std::thread([&server, port, cb = options.onReady] {
      server.wait_until_ready();
      cb(port);
    }).detach();
  }
  server.listen_after_bind();
  std::lock_guard lock(g_mu);
  g_server = nullptr;
}

void stop_serving() {
  std::lock_guard lock(g_mu);
  if (g_server) g_server->stop();
}

}  // namespace scsim
