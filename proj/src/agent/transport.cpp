#include "scsim/agent/transport.hpp"

#include <cstdlib>
#include <fstream>

#include "scsim/core/hash.hpp"
#include "scsim/core/io.hpp"
#include "scsim/error.hpp"

namespace scsim {

namespace fs = std::filesystem;
using nlohmann::json;

json messages_json(const std::vector<ChatMessage>& messages) {
  json a = json::array();
  for (const auto& m : messages) a.push_back({{"role", m.role}, {"content", m.content}});
  return a;
}

std::string transcript_key(const std::vector<ChatMessage>& messages) {
  return hex64(fnv1a64(messages_json(messages).dump()));
}

LlmSettings LlmSettings::from_env() {
  auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? v : "";
  };
  LlmSettings s;
  s.url = env("SCSIM_LLM_URL");
  s.model = env("SCSIM_LLM_MODEL");
  s.apiKey = env("SCSIM_LLM_KEY");
  if (s.url.empty()) throw Error(Errc::InvalidConfig, "SCSIM_LLM_URL is not set");
  if (s.model.empty()) throw Error(Errc::InvalidConfig, "SCSIM_LLM_MODEL is not set");
  return s;
}

ReplayTransport::ReplayTransport(fs::path dir) : dir_(std::move(dir)) {
  if (!fs::is_directory(dir_)) throw Error(Errc::MissingFile, "transcript directory " + dir_.string());
}

std::string ReplayTransport::complete(const std::vector<ChatMessage>& messages) {
  const fs::path file = dir_ / (transcript_key(messages) + ".json");
  if (!fs::exists(file))
    throw Error(Errc::TransportError, "no recorded exchange " + file.filename().string() + " in " + dir_.string());
  try {
    return json::parse(read_text_file(file)).at("response").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(Errc::TransportError, "bad transcript " + file.string() + ": " + e.what());
  }
}

void write_transcript_entry(const fs::path& dir, const std::vector<ChatMessage>& messages, const std::string& response) {
  fs::create_directories(dir);
  std::ofstream out(dir / (transcript_key(messages) + ".json"), std::ios::binary);
  out << json{{"messages", messages_json(messages)}, {"response", response}}.dump(2) << "\n";
  if (!out) throw Error(Errc::TransportError, "cannot write transcript in " + dir.string());
}

RecordingTransport::RecordingTransport(std::shared_ptr<ChatTransport> inner, fs::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

std::string RecordingTransport::complete(const std::vector<ChatMessage>& messages) {
  std::string response = inner_->complete(messages);
  std::lock_guard lock(mu_);
  write_transcript_entry(dir_, messages, response);
  return response;
}

std::string CallbackTransport::complete(const std::vector<ChatMessage>& messages) {
  std::lock_guard lock(mu_);
  return fn_(messages);
}

}  // namespace scsim
