#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace scsim {

struct ChatMessage {
  std::string role;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

nlohmann::json messages_json(const std::vector<ChatMessage>& messages);

/// One chat-completion call. Implementations must be safe to call from
/// several threads. Failures throw Errc::TransportError.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

/// Key of an exchange in a transcript directory: FNV-1a over the canonical
/// JSON of the messages, as 16 hex digits.
std::string transcript_key(const std::vector<ChatMessage>& messages);

struct LlmSettings {
  std::string url;  // base URL, e.g. https://api.example.com/v1
  std::string model;
  std::string apiKey;
  std::optional<double> temperature;
  int timeoutSeconds = 120;

  /// SCSIM_LLM_URL, SCSIM_LLM_MODEL, SCSIM_LLM_KEY. Throws Errc::InvalidConfig
  /// when URL or model is missing.
  static LlmSettings from_env();
};

/// OpenAI-compatible POST {url}/chat/completions.
std::shared_ptr<ChatTransport> make_http_transport(LlmSettings settings);

/// Answers from <dir>/<transcript_key>.json files ({"messages": [...],
/// "response": "..."}). A missing exchange throws Errc::TransportError.
class ReplayTransport final : public ChatTransport {
 public:
  explicit ReplayTransport(std::filesystem::path dir);
  std::string complete(const std::vector<ChatMessage>& messages) override;

 private:
  std::filesystem::path dir_;
};

/// Forwards to `inner` and writes every exchange into a transcript directory.
class RecordingTransport final : public ChatTransport {
 public:
  RecordingTransport(std::shared_ptr<ChatTransport> inner, std::filesystem::path dir);
  std::string complete(const std::vector<ChatMessage>& messages) override;

 private:
  std::shared_ptr<ChatTransport> inner_;
  std::filesystem::path dir_;
  std::mutex mu_;
};

/// Answers through a callback; used for tests and scripted runs.
class CallbackTransport final : public ChatTransport {
 public:
  using Fn = std::function<std::string(const std::vector<ChatMessage>&)>;
  explicit CallbackTransport(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const std::vector<ChatMessage>& messages) override;

 private:
  Fn fn_;
  std::mutex mu_;
};

void write_transcript_entry(const std::filesystem::path& dir, const std::vector<ChatMessage>& messages,
                            const std::string& response);

}  // namespace scsim
