#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "scsim/agent/policy.hpp"
#include "scsim/agent/prompts.hpp"
#include "scsim/agent/transport.hpp"

namespace scsim {

/// Extracts the JSON payload of a model answer: strips code fences and
/// surrounding prose, maps Python literals (True/False/None), drops //
/// comments and trailing commas. Throws Errc::SchemaViolation.
nlohmann::json parse_llm_json(std::string_view text);

/// Stage schema checks. Each throws Errc::SchemaViolation with a message that
/// is fed back to the model.
std::vector<PlanRecord> parse_plan_output(const nlohmann::json& j);
std::vector<QueryConstraint> parse_query_output(const nlohmann::json& j, std::size_t planCount,
                                                const std::vector<std::string>& featureNames);
std::vector<std::vector<RequestRecord>> parse_request_output(const nlohmann::json& j, std::size_t planCount);
std::vector<ReplyRecord> parse_reply_output(const nlohmann::json& j, const Inbox& inbox);

struct PromptTemplates {
  std::function<StagePrompt(const AgentView&)> plan = render_plan_prompt;
  std::function<StagePrompt(const AgentView&, const std::vector<PlanRecord>&)> query = render_query_prompt;
  std::function<StagePrompt(const AgentView&, const std::vector<PlanRecord>&, const std::vector<QueryConstraint>&,
                            const std::vector<std::vector<CandidateDetail>>&)>
      request = render_request_prompt;
  std::function<StagePrompt(const AgentView&, const Inbox&)> reply = render_reply_prompt;
};

inline constexpr int kDefaultMaxRepair = 3;

struct LlmPolicyOptions {
  int maxRepair = kDefaultMaxRepair;
  PromptTemplates templates;
};

/// Each stage sends one completion call, validates the answer and retries up
/// to maxRepair times with the validation error appended to the conversation.
/// Exhaustion throws Errc::PolicyFailure.
class LlmPolicy final : public AgentPolicy {
 public:
  LlmPolicy(std::shared_ptr<ChatTransport> transport, LlmPolicyOptions options = {});

  std::vector<PlanRecord> plan(const AgentView& view, AgentContext& ctx) override;
  std::vector<QueryConstraint> constrain(const AgentView& view, const std::vector<PlanRecord>& plans,
                                         AgentContext& ctx) override;
  std::vector<std::vector<RequestRecord>> request(const AgentView& view, const std::vector<PlanRecord>& plans,
                                                  const std::vector<QueryConstraint>& constraints,
                                                  const std::vector<std::vector<CandidateDetail>>& candidates,
                                                  AgentContext& ctx) override;
  std::vector<ReplyRecord> reply(const AgentView& view, const Inbox& inbox, AgentContext& ctx) override;

 private:
  template <class T>
  T exchange(std::string_view stage, const StagePrompt& prompt, AgentContext& ctx,
             const std::function<T(const nlohmann::json&)>& parse);

  std::shared_ptr<ChatTransport> transport_;
  LlmPolicyOptions options_;
};

inline std::shared_ptr<AgentPolicy> llm_policy(std::shared_ptr<ChatTransport> transport, LlmPolicyOptions options = {}) {
  return std::make_shared<LlmPolicy>(std::move(transport), std::move(options));
}

}  // namespace scsim
