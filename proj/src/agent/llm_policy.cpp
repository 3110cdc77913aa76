#include "scsim/agent/llm_policy.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "scsim/error.hpp"

namespace scsim {

using nlohmann::json;

namespace {

[[noreturn]] void violation(const std::string& msg) { throw Error(Errc::SchemaViolation, msg); }

std::string_view strip_fences(std::string_view text) {
  const auto open = text.find("```");
  if (open != std::string_view::npos) {
    auto body = text.find('\n', open);
    if (body == std::string_view::npos) return {};
    ++body;
    const auto close = text.find("```", body);
    return text.substr(body, close == std::string_view::npos ? std::string_view::npos : close - body);
  }
  const auto first = text.find_first_of("[{");
  const auto last = text.find_last_of("]}");
  if (first == std::string_view::npos || last == std::string_view::npos || last < first) return text;
  return text.substr(first, last - first + 1);
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string normalize(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  bool inString = false;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char c = in[i];
    if (inString) {
      out += c;
      if (c == '\\' && i + 1 < in.size()) out += in[++i];
      else if (c == '"') inString = false;
      continue;
    }
    if (c == '"') {
      inString = true;
      out += c;
      continue;
    }
    if (c == '/' && i + 1 < in.size() && in[i + 1] == '/') {
      while (i < in.size() && in[i] != '\n') ++i;
      out += '\n';
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) && (i == 0 || !ident_char(in[i - 1]))) {
      std::size_t j = i;
      while (j < in.size() && ident_char(in[j])) ++j;
      const std::string_view word = in.substr(i, j - i);
      if (word == "True") out += "true";
      else if (word == "False") out += "false";
      else if (word == "None") out += "null";
      else out += word;
      i = j - 1;
      continue;
    }
    if (c == ']' || c == '}') {
      auto k = out.find_last_not_of(" \t\r\n");
      if (k != std::string::npos && out[k] == ',') out.erase(k, 1);
    }
    out += c;
  }
  return out;
}

bool as_bool(const json& obj, const char* key, std::optional<bool> fallback = std::nullopt) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (fallback) return *fallback;
    violation(std::string("missing field \"") + key + "\"");
  }
  if (it->is_boolean()) return it->get<bool>();
  if (it->is_string()) {
    std::string s = it->get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true") return true;
    if (s == "false") return false;
  }
  violation(std::string("field \"") + key + "\" must be true or false");
}

std::string as_string(const json& obj, const char* key, std::optional<std::string> fallback = std::nullopt) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (fallback) return *fallback;
    violation(std::string("missing field \"") + key + "\"");
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number()) return it->dump();
  violation(std::string("field \"") + key + "\" must be a string");
}

const json& as_array(const json& j, const std::string& what) {
  if (!j.is_array()) violation(what + " must be a JSON array");
  return j;
}

const json& as_object(const json& j, const std::string& what) {
  if (!j.is_object()) violation(what + " must be a JSON object");
  return j;
}

json wrap_object(const json& j) { return j.is_object() ? json::array({j}) : j; }

}  // namespace

json parse_llm_json(std::string_view text) {
  const std::string cleaned = normalize(strip_fences(text));
  try {
    return json::parse(cleaned);
  } catch (const json::parse_error& e) {
    violation(std::string("response is not valid JSON (") + e.what() + ")");
  }
}

std::vector<PlanRecord> parse_plan_output(const json& raw) {
  const json j = wrap_object(raw);
  std::vector<PlanRecord> plans;
  std::size_t i = 0;
  for (const auto& item : as_array(j, "the plan list")) {
    const std::string where = "plan " + std::to_string(++i);
    as_object(item, where);
    PlanRecord p;
    p.description = as_string(item, "plan");
    p.reason = as_string(item, "reason");
    p.seekCollaboration = as_bool(item, "is_seek_collaboration");
    p.seekSuppliers = as_bool(item, "is_seek_suppliers", p.seekCollaboration ? std::nullopt : std::optional(false));
    if (p.description.empty()) violation(where + ": \"plan\" is empty");
    plans.push_back(std::move(p));
  }
  return plans;
}

std::vector<QueryConstraint> parse_query_output(const json& raw, std::size_t planCount,
                                                const std::vector<std::string>& featureNames) {
  const json j = wrap_object(raw);
  as_array(j, "the constraint list");
  if (j.size() != planCount)
    violation("expected " + std::to_string(planCount) + " constraint(s), one per plan, got " + std::to_string(j.size()));
  std::vector<QueryConstraint> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "constraint " + std::to_string(i + 1);
    const auto& item = as_object(j[i], where);
    QueryConstraint q;
    if (auto it = item.find("industry_set"); it != item.end() && !it->is_null()) {
      for (const auto& s : as_array(*it, where + " industry_set")) {
        if (!s.is_string()) violation(where + ": industry_set entries must be strings");
        q.industrySet.push_back(s.get<std::string>());
      }
    }
    auto ws = item.find("weighted_scores");
    if (ws == item.end()) violation(where + ": missing field \"weighted_scores\"");
    for (const auto& w : as_array(*ws, where + " weighted_scores")) {
      as_object(w, where + " weighted score");
      const std::string feature = as_string(w, "feature");
      if (std::find(featureNames.begin(), featureNames.end(), feature) == featureNames.end())
        violation(where + ": feature \"" + feature + "\" is not in feature_col_list");
      auto wt = w.find("weight");
      double weight = 0.0;
      if (wt != w.end() && wt->is_number()) weight = wt->get<double>();
      else if (wt != w.end() && wt->is_string()) {
        try {
          weight = std::stod(wt->get<std::string>());
        } catch (const std::exception&) {
          violation(where + ": weight of \"" + feature + "\" is not a number");
        }
      } else {
        violation(where + ": weight of \"" + feature + "\" is not a number");
      }
      q.weightedScores.push_back({feature, weight});
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<std::vector<RequestRecord>> parse_request_output(const json& raw, std::size_t planCount) {
  json j = raw;
  if (planCount == 1 && j.is_array() && !j.empty() && j.front().is_object()) j = json::array({j});
  as_array(j, "the request list");
  if (j.size() != planCount)
    violation("expected " + std::to_string(planCount) + " inner list(s), one per plan, got " + std::to_string(j.size()));
  std::vector<std::vector<RequestRecord>> out(planCount);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "plan " + std::to_string(i + 1);
    const json decisions = wrap_object(j[i]);
    for (const auto& item : as_array(decisions, where + " decisions")) {
      as_object(item, where + " decision");
      RequestRecord r;
      r.target = CompanyId(as_string(item, "company_id"));
      if (r.target.empty()) violation(where + ": empty company_id");
      r.chosen = as_bool(item, "is_chosen");
      r.reason = as_string(item, "reason", std::string{});
      r.extraInfo = as_string(item, "extra_info", std::string{});
      out[i].push_back(std::move(r));
    }
  }
  return out;
}

std::vector<ReplyRecord> parse_reply_output(const json& raw, const Inbox& inbox) {
  const json j = wrap_object(raw);
  std::map<CompanyId, std::pair<bool, std::string>> answers;
  for (const auto& item : as_array(j, "the reply list")) {
    as_object(item, "reply");
    const CompanyId id(as_string(item, "company_id"));
    answers[id] = {as_bool(item, "is_accepted"), as_string(item, "reason", std::string{})};
  }
  std::set<CompanyId> asked;
  for (const auto* list : {&inbox.wantsToSupply, &inbox.wantsToBuy})
    for (const auto& e : *list) asked.insert(e.requester);
  for (const auto& [id, _] : answers)
    if (!asked.contains(id)) violation("company " + id.str() + " did not send you a request");
  std::vector<ReplyRecord> out;
  for (const auto* list : {&inbox.wantsToSupply, &inbox.wantsToBuy})
    for (const auto& e : *list) {
      auto it = answers.find(e.requester);
      if (it == answers.end()) violation("missing reply to the request from company " + e.requester.str());
      ReplyRecord r;
      r.requester = e.requester;
      r.accepted = it->second.first;
      r.reason = it->second.second;
      r.direction = e.direction;
      out.push_back(std::move(r));
    }
  return out;
}

LlmPolicy::LlmPolicy(std::shared_ptr<ChatTransport> transport, LlmPolicyOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {
  if (!transport_) throw Error(Errc::InvalidConfig, "LLM policy needs a transport");
  if (options_.maxRepair < 0) throw Error(Errc::InvalidConfig, "maxRepair must be >= 0");
}

template <class T>
T LlmPolicy::exchange(std::string_view stage, const StagePrompt& prompt, AgentContext& ctx,
                      const std::function<T(const json&)>& parse) {
  std::vector<ChatMessage> messages{{"system", prompt.system}, {"user", prompt.user}};
  std::string lastError;
  for (int attempt = 0; attempt <= options_.maxRepair; ++attempt) {
    const std::string response = transport_->complete(messages);
    if (ctx.dialogue) ctx.dialogue->push_back({std::string(stage), attempt, messages_json(messages), response});
    try {
      return parse(parse_llm_json(response));
    } catch (const Error& e) {
      if (e.code() != Errc::SchemaViolation) throw;
      lastError = e.what();
      messages.push_back({"assistant", response});
      messages.push_back({"user", "Your previous response could not be used: " + lastError +
                                      ". Respond again with only the JSON in the required format."});
    }
  }
  throw Error(Errc::PolicyFailure, std::string(stage) + " stage failed after " +
                                       std::to_string(options_.maxRepair + 1) + " attempt(s): " + lastError);
}

std::vector<PlanRecord> LlmPolicy::plan(const AgentView& view, AgentContext& ctx) {
  return exchange<std::vector<PlanRecord>>("plan", options_.templates.plan(view), ctx, parse_plan_output);
}

std::vector<QueryConstraint> LlmPolicy::constrain(const AgentView& view, const std::vector<PlanRecord>& plans,
                                                  AgentContext& ctx) {
  if (plans.empty()) return {};
  return exchange<std::vector<QueryConstraint>>(
      "query", options_.templates.query(view, plans), ctx,
      [&](const json& j) { return parse_query_output(j, plans.size(), view.featureNames); });
}

std::vector<std::vector<RequestRecord>> LlmPolicy::request(const AgentView& view, const std::vector<PlanRecord>& plans,
                                                           const std::vector<QueryConstraint>& constraints,
                                                           const std::vector<std::vector<CandidateDetail>>& candidates,
                                                           AgentContext& ctx) {
  if (plans.empty()) return {};
  return exchange<std::vector<std::vector<RequestRecord>>>(
      "request", options_.templates.request(view, plans, constraints, candidates), ctx,
      [&](const json& j) { return parse_request_output(j, plans.size()); });
}

std::vector<ReplyRecord> LlmPolicy::reply(const AgentView& view, const Inbox& inbox, AgentContext& ctx) {
  if (inbox.empty()) return {};
  return exchange<std::vector<ReplyRecord>>("reply", options_.templates.reply(view, inbox), ctx,
                                            [&](const json& j) { return parse_reply_output(j, inbox); });
}

}  // namespace scsim
