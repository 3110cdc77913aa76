#pragma once

#include <string>
#include <vector>

#include "scsim/agent/records.hpp"

namespace scsim {

/// A rendered stage prompt. `system` holds the instructions and output schema,
/// `user` the firm information; their concatenation is the full template.
struct StagePrompt {
  std::string system;
  std::string user;
};

/// Python-style literals, matching how the templates print values.
std::string py_list(const std::vector<std::string>& items);
std::string py_number(double v);
/// {'<label>': {'<feature>': value, ...}, ...} over the rows of `window`.
std::string py_feature_window(const std::vector<std::string>& labels, const std::vector<std::string>& features,
                              const Eigen::MatrixXd& window);
std::string py_feature_dict(const std::vector<std::string>& features, const Eigen::VectorXd& values);

std::string render_company_info(const AgentView& view);
StagePrompt render_plan_prompt(const AgentView& view);
StagePrompt render_query_prompt(const AgentView& view, const std::vector<PlanRecord>& plans);
StagePrompt render_request_prompt(const AgentView& view, const std::vector<PlanRecord>& plans,
                                  const std::vector<QueryConstraint>& constraints,
                                  const std::vector<std::vector<CandidateDetail>>& candidates);
StagePrompt render_reply_prompt(const AgentView& view, const Inbox& inbox);

}  // namespace scsim
