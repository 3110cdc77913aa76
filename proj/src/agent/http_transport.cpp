#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "scsim/agent/transport.hpp"
#include "scsim/error.hpp"

namespace scsim {

namespace {

class HttpChatTransport final : public ChatTransport {
 public:
  explicit HttpChatTransport(LlmSettings s) : settings_(std::move(s)) {
    const auto scheme = settings_.url.find("://");
    if (scheme == std::string::npos) throw Error(Errc::InvalidConfig, "LLM URL needs a scheme: " + settings_.url);
    const auto slash = settings_.url.find('/', scheme + 3);
    origin_ = settings_.url.substr(0, slash);
    path_ = slash == std::string::npos ? "" : settings_.url.substr(slash);
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += "/chat/completions";
  }

  std::string complete(const std::vector<ChatMessage>& messages) override {
    nlohmann::json body{{"model", settings_.model}, {"messages", messages_json(messages)}};
    if (settings_.temperature) body["temperature"] = *settings_.temperature;

    httplib::Client cli(origin_);
    cli.set_connection_timeout(settings_.timeoutSeconds);
    cli.set_read_timeout(settings_.timeoutSeconds);
    httplib::Headers headers;
    if (!settings_.apiKey.empty()) headers.emplace("Authorization", "Bearer " + settings_.apiKey);

    auto res = cli.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw Error(Errc::TransportError, "request to " + origin_ + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw Error(Errc::TransportError, "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
    try {
      return nlohmann::json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::TransportError, std::string("unexpected completion payload: ") + e.what());
    }
  }

 private:
  LlmSettings settings_;
  std::string origin_;
  std::string path_;
};

}  // namespace

std::shared_ptr<ChatTransport> make_http_transport(LlmSettings settings) {
  return std::make_shared<HttpChatTransport>(std::move(settings));
}

}  // namespace scsim
