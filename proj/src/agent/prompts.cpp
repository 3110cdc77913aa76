#include "scsim/agent/prompts.hpp"

#include <cmath>
#include <sstream>

#include "scsim/core/io.hpp"

namespace scsim {

namespace {

constexpr const char* kManagerIntro =
    "You are now an company manager and you are making decisions on the management of your supply chain in next "
    "timestampe.\n";

std::string py_str(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

std::vector<std::string> ids_of(const std::vector<PartnerInfo>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.id.str());
  return out;
}

std::string info_block_intro(bool colon) {
  return colon ? "The following is information about your company and its supply chain partners:\n"
               : "The following is information about your company and its supply chain partners.\n";
}

}  // namespace

std::string py_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += py_str(items[i]);
  }
  return out + "]";
}

std::string py_number(double v) {
  const double r = std::round(v * 100.0) / 100.0;
  std::string s = format_double(r == 0.0 ? 0.0 : r);
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

std::string py_feature_dict(const std::vector<std::string>& features, const Eigen::VectorXd& values) {
  std::string out = "{";
  for (std::size_t f = 0; f < features.size(); ++f) {
    if (f) out += ", ";
    out += py_str(features[f]) + ": " + py_number(values(static_cast<Eigen::Index>(f)));
  }
  return out + "}";
}

std::string py_feature_window(const std::vector<std::string>& labels, const std::vector<std::string>& features,
                              const Eigen::MatrixXd& window) {
  std::string out = "{";
  for (std::size_t r = 0; r < labels.size() && static_cast<Eigen::Index>(r) < window.rows(); ++r) {
    if (r) out += ", ";
    out += py_str(labels[r]) + ": " +
           py_feature_dict(features, window.row(static_cast<Eigen::Index>(r)).transpose());
  }
  return out + "}";
}

std::string render_company_info(const AgentView& v) {
  std::ostringstream o;
  o << "You are company " << v.self.str() << ".\n";
  o << "Your industry is " << v.industry << ".\n";
  o << "The following is global knowledge: " << v.globalKnowledge << "\n";
  o << "The following is your company-specific knowledge: " << v.knowledge << ".\n";
  o << "At " << v.timestampLabel
    << ", your feature info is: " << py_feature_window(v.windowLabels, v.featureNames, v.ownWindow) << "\n";
  o << "You have the following supply chain connections (supplier, customer):\n";
  o << "supplier: " << py_list(ids_of(v.suppliers)) << "\n";
  for (const auto& s : v.suppliers)
    o << "    Supplier " << s.id.str() << " industry is " << s.industry
      << ". feature info: " << py_feature_window(v.windowLabels, v.featureNames, s.window) << "\n";
  o << "customer: " << py_list(ids_of(v.customers)) << "\n";
  for (const auto& c : v.customers)
    o << "    Customer " << c.id.str() << " industry is " << c.industry
      << ". feature info: " << py_feature_window(v.windowLabels, v.featureNames, c.window) << "\n";
  return o.str();
}

StagePrompt render_plan_prompt(const AgentView& v) {
  StagePrompt p;
  p.system = std::string(kManagerIntro) +
             "The user will provide supply chain network and company information within this supply chain.\n"
             "You need to fully analyze the information provided by the user and propose plans. \n"
             "A plan should include you intention, you reason with step-by-step thinking, and whether you are plan "
             "to increase or decrease partners. \n"
             "If true as you plan to increase, you should provide query requirement for company query.\n"
             "You response should fully following the following content in strict JSON format:\n"
             "```json\n"
             "[\n"
             "    {\n"
             "        \"plan\": \"your plan' brief description\",\n"
             "        \"reason\": \"your reason for this Plan\"\n"
             "        \"is_seek_collaboration\": True/False \"whether you plan to increase collaboration or "
             "decrease\"\n"
             "        \"is_seek_suppliers\": True/False //if true, you are seek more suppliers otherwise you are seek "
             "more customers. Only work if is_seek_collaboration=True\n"
             "    },\n"
             "    ...\n"
             "]\n"
             "\n";
  p.user = info_block_intro(true) + render_company_info(v);
  return p;
}

StagePrompt render_query_prompt(const AgentView& v, const std::vector<PlanRecord>& plans) {
  StagePrompt p;
  p.system = std::string(kManagerIntro) +
             "The user will provide supply chain network and company information within this supply chain.\n"
             "You should fully analyze the information provided by the user and propose plans. Then, you should "
             "list the constrain of industry and the weighted score of each features. Those information will be used "
             "for querying potential company.\n"
             "You should response with the same number of plans as the user provided.\n"
             "You response should fully following the following content in strict JSON format:\n"
             "```json\n"
             "[\n"
             "    {\n"
             "        \"industry_set\": [industry1, ...],//the constrain on company industries, you may return a "
             "empty list to ignore this constrain\n"
             "        \"weighted_scores\": [{ feature: xxx, weight:xxx },{ feature: xxx, weight:xxx }] ,//weighted "
             "score of each feature,only output in feature_col_list: " +
             py_list(v.featureNames) +
             "\n"
             "    },\n"
             "    ...\n"
             "]\n"
             "\n";
  std::ostringstream u;
  u << info_block_intro(true) << render_company_info(v) << "\n";
  u << "The following is your plan list:\n";
  for (std::size_t i = 0; i < plans.size(); ++i)
    u << "    Plan " << i + 1 << ": " << plans[i].description << ". With reason: " << plans[i].reason << ".\n";
  p.user = u.str();
  return p;
}

namespace {

std::string py_weighted_scores(const std::vector<WeightedScore>& ws) {
  std::string out = "[";
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (i) out += ", ";
    out += "{'feature': " + py_str(ws[i].feature) + ", 'weight': " + format_double(ws[i].weight) + "}";
  }
  return out + "]";
}

}  // namespace

StagePrompt render_request_prompt(const AgentView& v, const std::vector<PlanRecord>& plans,
                                  const std::vector<QueryConstraint>& constraints,
                                  const std::vector<std::vector<CandidateDetail>>& candidates) {
  StagePrompt p;
  p.system =
      std::string(kManagerIntro) +
      "The user will provide supply chain information and plan list with potential candidate if he want to increase "
      "collaboration.\n"
      "You should fully analyze the information provided by the user and propose plan. Then, you should make detail "
      "decisions. Specifically, if the \"is_added\" is false, you should choose one or some company and cancel "
      "collaborations with them with step by step thinking. If ths \"is_added\" is true, you should check the "
      "candidate and determine one or some company and request collaborations with them,  with step by step "
      "thinking.\n"
      "You answer shoule include the list of id that you decided to cancel or request collaboration for the plan. "
      "For a plan that does not want to increase collaborators, you should choose companies from your existing "
      "supply chains to cancel. The outer dimension is plan and the inner is id\n"
      "You should strictly follow the format below.\n"
      "```json\n"
      "    [\n"
      "    [{\n"
      "          \"company_id\": \"the id of company\",\n"
      "      \"is_chosen\": True/False//  whether you determine to choose this candidate to build collaboration and "
      "output even if false.\n"
      "        \"reason\": \"the reason why you make such a decision\",\n"
      "        \"extra_info\": \"The information that would be sent to the company to facilitate collaboration. Only "
      "works when this plan is a seek collaboration plan and is_chosen is True.\n"
      "    },\n"
      "    ...],\n"
      "    ...]\n"
      "\n";
  const std::string info = render_company_info(v);
  std::ostringstream u;
  u << info_block_intro(false) << info << "\n";
  u << info_block_intro(false) << info << "\n";
  u << "The following is your plan list with potential companies:\n";
  for (std::size_t i = 0; i < plans.size(); ++i) {
    u << "    Plan " << i + 1 << ": " << plans[i].description << ". With reason: " << plans[i].reason << ".\n";
    if (i < constraints.size())
      u << "    Your query constrain is industry in " << py_list(constraints[i].industrySet)
        << " and feature weighted score is " << py_weighted_scores(constraints[i].weightedScores) << ".\n";
    if (plans[i].seekCollaboration) {
      u << "        The following is your candidate company list:\n";
      if (i < candidates.size())
        for (const auto& c : candidates[i])
          u << "        Candidate " << c.id.str() << " industry is " << c.industry
            << ". feature info: " << py_feature_dict(v.featureNames, c.features)
            << ". score: " << py_number(c.score) << "\n";
    }
  }
  p.user = u.str();
  return p;
}

StagePrompt render_reply_prompt(const AgentView& v, const Inbox& inbox) {
  StagePrompt p;
  p.system = std::string(kManagerIntro) +
             "The user will provide supply chain information and collaboration requests from other companies. You "
             "have to decide whether collaborate or not for each request one by one and give corresponding reasoning "
             "with step-by-step thinking.\n"
             "You response and fully follow the following content in strict JSON format:\n"
             "```json\n"
             "[\n"
             "    {\n"
             "      \"company_id\": \"the id of the company requesting\",\n"
             "      \"is_accepted\": True/False, // Do you accept this collaboration \n"
             "      \"reason\": \"the reason\"\n"
             "    },\n"
             "    ...\n"
             "]\n"
             "\n";
  std::vector<std::string> supply, buy;
  for (const auto& e : inbox.wantsToSupply) supply.push_back(e.requester.str());
  for (const auto& e : inbox.wantsToBuy) buy.push_back(e.requester.str());
  std::ostringstream u;
  u << info_block_intro(false) << render_company_info(v) << "\n";
  u << "The following is the collaboration requests you received:\n";
  u << "Request from company " << py_list(supply) << " to be your supplier.\n";
  u << "Request from company " << py_list(buy) << " to be your customer.\n";
  for (const auto* list : {&inbox.wantsToSupply, &inbox.wantsToBuy})
    for (const auto& e : *list) {
      if (!e.extraInfo.empty()) u << "Message from company " << e.requester.str() << ": " << e.extraInfo << "\n";
      if (!e.userNote.empty()) u << "Note on the request from company " << e.requester.str() << ": " << e.userNote << "\n";
    }
  p.user = u.str();
  return p;
}

}  // namespace scsim
