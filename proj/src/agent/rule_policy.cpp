#include "scsim/agent/rule_policy.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace scsim {

namespace {

double mean_score(const Eigen::VectorXd& f) { return f.size() == 0 ? 0.0 : f.mean(); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<const PartnerInfo*> distinct_partners(const AgentView& view) {
  std::vector<const PartnerInfo*> out;
  std::set<CompanyId> seen;
  for (const auto* list : {&view.suppliers, &view.customers})
    for (const auto& p : *list)
      if (seen.insert(p.id).second) out.push_back(&p);
  std::sort(out.begin(), out.end(), [](const PartnerInfo* a, const PartnerInfo* b) { return a->id < b->id; });
  return out;
}

}  // namespace

std::vector<PlanRecord> RulePolicy::plan(const AgentView& view, AgentContext&) {
  std::vector<PlanRecord> plans;
  const auto& perf = view.performanceWindow;
  if (perf.size() >= 2 && perf.back() < perf.front())
    plans.push_back({"Seek new customers",
                     "Performance fell from " + fmt(perf.front()) + " to " + fmt(perf.back()) +
                         " over the reference window",
                     true, false});
  if (static_cast<int>(view.suppliers.size()) < params_.minSuppliers)
    plans.push_back({"Seek new suppliers",
                     "Only " + std::to_string(view.suppliers.size()) + " supplier(s), fewer than " +
                         std::to_string(params_.minSuppliers),
                     true, true});
  for (const auto* p : distinct_partners(view)) {
    if (mean_score(p->features) < params_.cutoff) {
      plans.push_back({"Terminate weak partners",
                       "Some partners have a mean feature score below " + fmt(params_.cutoff), false, false});
      break;
    }
  }
  return plans;
}

std::vector<QueryConstraint> RulePolicy::constrain(const AgentView& view, const std::vector<PlanRecord>& plans,
                                                   AgentContext&) {
  QueryConstraint uniform;
  const double w = view.featureNames.empty() ? 0.0 : 1.0 / static_cast<double>(view.featureNames.size());
  for (const auto& f : view.featureNames) uniform.weightedScores.push_back({f, w});
  return std::vector<QueryConstraint>(plans.size(), uniform);
}

std::vector<std::vector<RequestRecord>> RulePolicy::request(const AgentView& view, const std::vector<PlanRecord>& plans,
                                                            const std::vector<QueryConstraint>&,
                                                            const std::vector<std::vector<CandidateDetail>>& candidates,
                                                            AgentContext&) {
  std::vector<std::vector<RequestRecord>> out(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (plans[i].seekCollaboration) {
      if (i >= candidates.size()) continue;
      for (std::size_t k = 0; k < candidates[i].size(); ++k) {
        const auto& c = candidates[i][k];
        RequestRecord r;
        r.target = c.id;
        r.chosen = k == 0;
        r.reason = k == 0 ? "Highest ranked candidate (score " + fmt(c.score) + ")"
                          : "Ranked " + std::to_string(k + 1) + " (score " + fmt(c.score) + ")";
        r.extraInfo = "Our mean feature score is " + fmt(mean_score(view.own_features()));
        out[i].push_back(std::move(r));
      }
    } else {
      for (const auto* p : distinct_partners(view)) {
        const double m = mean_score(p->features);
        if (m >= params_.cutoff) continue;
        RequestRecord r;
        r.target = p->id;
        r.chosen = true;
        r.reason = "Mean feature score " + fmt(m) + " is below " + fmt(params_.cutoff);
        out[i].push_back(std::move(r));
      }
    }
  }
  return out;
}

std::vector<ReplyRecord> RulePolicy::reply(const AgentView& view, const Inbox& inbox, AgentContext&) {
  std::vector<double> means;
  for (const auto* p : distinct_partners(view)) means.push_back(mean_score(p->features));
  std::sort(means.begin(), means.end());
  double median = 0.0;
  if (!means.empty()) {
    const std::size_t n = means.size();
    median = n % 2 ? means[n / 2] : 0.5 * (means[n / 2 - 1] + means[n / 2]);
  }

  std::vector<ReplyRecord> out;
  auto answer = [&](const InboxEntry& e) {
    ReplyRecord r;
    r.requester = e.requester;
    r.direction = e.direction;
    const double m = mean_score(e.requesterInfo.features);
    if (means.empty()) {
      r.accepted = true;
      r.reason = "No current partners";
    } else {
      r.accepted = m >= median;
      r.reason = "Requester mean score " + fmt(m) + (r.accepted ? " is at least" : " is below") +
                 " the partner median " + fmt(median);
    }
    out.push_back(std::move(r));
  };
  for (const auto& e : inbox.wantsToSupply) answer(e);
  for (const auto& e : inbox.wantsToBuy) answer(e);
  return out;
}

}  // namespace scsim
