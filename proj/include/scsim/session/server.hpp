#pragma once

#include <functional>
#include <string>

#include "scsim/session/api.hpp"

namespace scsim {

/// offline_policy_factory plus "llm": an HTTP chat transport configured from
/// the environment, recorded into transcriptDir when config.record is set.
PolicyFactory network_policy_factory(const SessionConfig& config);

struct ServeOptions {
  std::string host = "127.0.0.1";
  /// 0 picks a free port.
  int port = 8080;
  /// Called with the bound port once the server accepts connections.
  std::function<void(int)> onReady;
};

/// Serves the API over HTTP until stop_serving() or process exit. CORS is
/// open so a browser client on another origin can call it.
void serve(Api& api, const ServeOptions& options);
void stop_serving();

}  // namespace scsim
