#include "scsim/agent/engine.hpp"

#include <algorithm>
#include <future>
#include <set>

#include "scsim/core/hash.hpp"
#include "scsim/core/network.hpp"
#include "scsim/error.hpp"

namespace scsim {

PolicyMap make_policies(const std::vector<CompanyId>& ids, const PolicyFactory& factory) {
  PolicyMap out;
  for (const auto& id : ids) out.emplace(id, factory(id));
  return out;
}

ViewBuilder::ViewBuilder(const Timeline& timeline, const KnowledgeBase& knowledge, const TurnConfig& config)
    : timeline_(timeline), knowledge_(knowledge) {
  if (config.referenceLength < 1) throw Error(Errc::InvalidConfig, "reference length must be >= 1");
  const int t = timeline.size() - 1;
  first_ = std::max(0, t - config.referenceLength + 1);
  std::set<std::string> inds;
  for (const auto& c : timeline.dataset().companies) inds.insert(c.industry);
  industries_.assign(inds.begin(), inds.end());
  const auto ids = timeline.dataset().ids();
  for (int s = first_; s <= t; ++s) perf_.push_back(performance(*timeline.frame(s).edges, ids, config.metric));
}

PartnerInfo ViewBuilder::partner(const CompanyId& id) const {
  const Dataset& ds = timeline_.dataset();
  const std::size_t row = ds.index_of(id);
  const int t = timeline_.size() - 1;
  PartnerInfo p;
  p.id = id;
  p.industry = ds.companies[row].industry;
  p.features = timeline_.frame(t).features.row(static_cast<Eigen::Index>(row)).transpose();
  p.window.resize(t - first_ + 1, static_cast<Eigen::Index>(ds.feature_count()));
  for (int s = first_; s <= t; ++s) p.window.row(s - first_) = timeline_.frame(s).features.row(static_cast<Eigen::Index>(row));
  return p;
}

AgentView ViewBuilder::view(const CompanyId& id) const {
  const Dataset& ds = timeline_.dataset();
  const auto& rec = ds.company(id);
  const int t = timeline_.size() - 1;
  const Frame& frame = timeline_.frame(t);

  AgentView v;
  v.self = id;
  v.industry = rec.industry;
  v.globalKnowledge = knowledge_.global;
  v.knowledge = knowledge_.of(id);
  v.t = t;
  v.timestampLabel = frame.label;
  v.featureNames = ds.featureNames;
  for (int s = first_; s <= t; ++s) v.windowLabels.push_back(timeline_.frame(s).label);
  v.ownWindow = partner(id).window;
  for (const auto& s : suppliers_of(*frame.edges, id)) v.suppliers.push_back(partner(s));
  for (const auto& c : customers_of(*frame.edges, id)) v.customers.push_back(partner(c));
  for (const auto& p : perf_) {
    auto it = p.find(id);
    v.performanceWindow.push_back(it == p.end() ? 0.0 : it->second);
  }
  v.industries = industries_;
  return v;
}

namespace {

std::string describe(const std::exception& e) { return e.what(); }

void validate_requests(Deliberation& d, const AgentView& view, std::vector<std::vector<RequestRecord>> lists) {
  if (lists.size() != d.plans.size()) {
    d.warnings.push_back("request lists (" + std::to_string(lists.size()) + ") do not match plans (" +
                         std::to_string(d.plans.size()) + "); extra lists ignored");
    lists.resize(d.plans.size());
  }
  CompanySet partners;
  for (const auto& p : view.suppliers) partners.insert(p.id);
  for (const auto& p : view.customers) partners.insert(p.id);

  for (std::size_t i = 0; i < lists.size(); ++i) {
    const auto& plan = d.plans[i];
    for (auto r : lists[i]) {
      r.requester = d.id;
      r.planIndex = static_cast<int>(i);
      r.kind = request_kind_for(plan);
      if (r.target == d.id) {
        d.warnings.push_back("plan " + std::to_string(i) + ": dropped request targeting self");
        continue;
      }
      if (plan.seekCollaboration) {
        const auto& cands = d.candidates[i];
        const bool listed = std::any_of(cands.begin(), cands.end(), [&](const Candidate& c) { return c.id == r.target; });
        if (!listed && !r.userAuthored) {
          d.warnings.push_back("plan " + std::to_string(i) + ": dropped request to " + r.target.str() +
                               " (not a candidate)");
          continue;
        }
      } else if (!partners.contains(r.target)) {
        d.warnings.push_back("plan " + std::to_string(i) + ": dropped termination of " + r.target.str() +
                             " (not a current partner)");
        continue;
      }
      d.outgoing.push_back(std::move(r));
    }
  }
}

}  // namespace

Deliberation deliberate(const Timeline& timeline, const ViewBuilder& views, const CompanyId& id, AgentPolicy& policy,
                        const TurnConfig& config, std::uint64_t seed) {
  Deliberation d;
  d.id = id;
  AgentContext ctx{derive_seed(seed, "deliberate:" + id.str()), &d.dialogue};
  const Dataset& ds = timeline.dataset();
  const Frame& frame = timeline.back();
  try {
    const AgentView view = views.view(id);
    d.plans = policy.plan(view, ctx);
    d.constraints = policy.constrain(view, d.plans, ctx);
    if (d.constraints.size() != d.plans.size())
      throw Error(Errc::SchemaViolation, "constraints (" + std::to_string(d.constraints.size()) +
                                             ") do not match plans (" + std::to_string(d.plans.size()) + ")");

    const CompanySet exclude = exclusion_set(*frame.edges, id);
    std::vector<std::vector<CandidateDetail>> details(d.plans.size());
    d.candidates.assign(d.plans.size(), {});
    for (std::size_t i = 0; i < d.plans.size(); ++i) {
      if (!d.plans[i].seekCollaboration) continue;
      try {
        const auto result = query_candidates(ds, frame.features, d.constraints[i], exclude, config.candidateCount);
        if (result.emptyPool) d.warnings.push_back("plan " + std::to_string(i) + ": empty candidate pool");
        d.candidates[i] = result.candidates;
      } catch (const Error& e) {
        d.warnings.push_back("plan " + std::to_string(i) + ": constraint rejected: " + describe(e));
        continue;
      }
      for (const auto& c : d.candidates[i]) {
        const std::size_t row = ds.index_of(c.id);
        details[i].push_back({c.id, c.score, ds.companies[row].industry,
                              frame.features.row(static_cast<Eigen::Index>(row)).transpose()});
      }
    }
    validate_requests(d, view, policy.request(view, d.plans, d.constraints, details, ctx));
  } catch (const std::exception& e) {
    d.failed = true;
    d.outgoing.clear();
    d.warnings.push_back("policy failure, turn skipped: " + describe(e));
  }
  return d;
}

Deliberation deliberation_from(const AgentTurnRecord& record) {
  Deliberation d;
  d.id = record.companyId;
  d.plans = record.plans;
  d.constraints = record.constraints;
  d.candidates = record.candidates;
  d.outgoing = record.outgoing;
  d.dialogue = record.dialogue;
  for (const auto& w : record.warnings)
    if (w.rfind("reply:", 0) != 0 && w.rfind("commit:", 0) != 0) d.warnings.push_back(w);
  return d;
}

std::map<CompanyId, Inbox> assemble_inbox(const std::vector<RequestRecord>& requests,
                                          const std::function<PartnerInfo(const CompanyId&)>& info) {
  std::map<std::pair<CompanyId, CompanyId>, std::map<ReplyDirection, InboxEntry>> grouped;
  for (const auto& r : requests) {
    if (!r.chosen || r.kind == RequestKind::Terminate) continue;
    const auto dir = direction_of(r.kind);
    auto& slot = grouped[{r.target, r.requester}];
    auto it = slot.find(dir);
    if (it == slot.end()) {
      InboxEntry e;
      e.requester = r.requester;
      e.direction = dir;
      e.extraInfo = r.extraInfo;
      if (info) e.requesterInfo = info(r.requester);
      slot.emplace(dir, std::move(e));
    } else if (!r.extraInfo.empty() && it->second.extraInfo != r.extraInfo) {
      if (!it->second.extraInfo.empty()) it->second.extraInfo += "\n";
      it->second.extraInfo += r.extraInfo;
    }
  }
  std::map<CompanyId, Inbox> out;
  for (auto& [key, byDir] : grouped) {
    auto& inbox = out[key.first];
    for (auto& [dir, e] : byDir) {
      if (dir == ReplyDirection::RequesterWantsToSupply) inbox.wantsToSupply.push_back(std::move(e));
      else inbox.wantsToBuy.push_back(std::move(e));
    }
  }
  return out;
}

CommitResult commit_deltas(const EdgeSet& snapshot, const std::vector<RequestRecord>& terminations,
                           const std::vector<std::pair<RequestRecord, ReplyRecord>>& accepted) {
  CommitResult out;
  out.edges = snapshot;
  std::map<Edge, const RequestRecord*> removed;
  for (const auto& r : terminations) {
    bool any = false;
    for (const Edge& e : {Edge{r.requester, r.target}, Edge{r.target, r.requester}}) {
      if (!snapshot.contains(e)) continue;
      any = true;
      removed.emplace(e, &r);
    }
    if (!any) out.notes.push_back({r.requester, "termination " + r.requester.str() + " -> " + r.target.str() + " matches no edge"});
  }
  for (const auto& [e, r] : removed) {
    out.edges.erase(e);
    out.deltas.push_back({e, false, DeltaCause::Terminated, r->requester, r->planIndex, false});
  }
  std::set<Edge> added;
  for (const auto& [req, rep] : accepted) {
    if (!rep.accepted) continue;
    const Edge e = accepted_edge(req.requester, req.target, rep.direction);
    if (e.supplier == e.customer) {
      out.notes.push_back({req.requester, "self-edge " + e.supplier.str() + " dropped"});
      continue;
    }
    if (removed.contains(e)) {
      out.notes.push_back({req.requester, "edge " + e.supplier.str() + " -> " + e.customer.str() +
                                            " terminated and re-added in one turn; termination wins"});
      continue;
    }
    if (snapshot.contains(e) || !added.insert(e).second) continue;
    out.edges.insert(e);
    out.deltas.push_back({e, true, DeltaCause::Accepted, req.requester, req.planIndex, rep.forced});
  }
  return out;
}

namespace {

template <class Fn>
void for_each_maybe_parallel(const std::vector<CompanyId>& ids, bool parallel, Fn&& fn) {
  if (!parallel) {
    for (const auto& id : ids) fn(id);
    return;
  }
  std::vector<std::future<void>> jobs;
  jobs.reserve(ids.size());
  for (const auto& id : ids) jobs.push_back(std::async(std::launch::async, [&fn, id] { fn(id); }));
  for (auto& j : jobs) j.get();
}

ReplyRecord declined(const InboxEntry& e, std::string reason) {
  ReplyRecord r;
  r.requester = e.requester;
  r.accepted = false;
  r.reason = std::move(reason);
  r.direction = e.direction;
  r.userNote = e.userNote;
  return r;
}

struct ReplyJob {
  std::vector<ReplyRecord> replies;
  std::vector<std::string> warnings;
  std::vector<DialogueEntry> dialogue;
};

ReplyJob run_replies(const CompanyId& replier, const Inbox& inbox, AgentPolicy* policy, const ViewBuilder& views,
                     std::uint64_t seed, const ResolveOptions& options) {
  ReplyJob job;
  Inbox pending;
  std::map<std::pair<CompanyId, ReplyDirection>, ReplyRecord> decided;

  auto visit = [&](const InboxEntry& entry) {
    const ReplyKey key{replier, entry.requester, entry.direction};
    if (auto o = options.overrides.find(key); o != options.overrides.end()) {
      if (o->second.mode == OverrideMode::Rerun) {
        InboxEntry e = entry;
        e.userNote = o->second.note;
        (e.direction == ReplyDirection::RequesterWantsToSupply ? pending.wantsToSupply : pending.wantsToBuy)
            .push_back(std::move(e));
      } else {
        ReplyRecord r;
        r.requester = entry.requester;
        r.accepted = o->second.mode == OverrideMode::ForceAccept;
        r.reason = "forced by user";
        r.direction = entry.direction;
        r.forced = true;
        r.userNote = o->second.note;
        decided[{entry.requester, entry.direction}] = r;
      }
      return;
    }
    if (auto c = options.cachedReplies.find(key); c != options.cachedReplies.end()) {
      decided[{entry.requester, entry.direction}] = c->second;
      return;
    }
    (entry.direction == ReplyDirection::RequesterWantsToSupply ? pending.wantsToSupply : pending.wantsToBuy)
        .push_back(entry);
  };
  for (const auto& e : inbox.wantsToSupply) visit(e);
  for (const auto& e : inbox.wantsToBuy) visit(e);

  if (!pending.empty()) {
    std::vector<ReplyRecord> got;
    bool ok = policy != nullptr;
    if (!ok) job.warnings.push_back("reply: no agent for " + replier.str() + "; requests declined");
    if (ok) {
      try {
        AgentContext ctx{derive_seed(seed, "reply:" + replier.str()), &job.dialogue};
        got = policy->reply(views.view(replier), pending, ctx);
      } catch (const std::exception& e) {
        ok = false;
        job.warnings.push_back(std::string("reply: policy failure, requests declined: ") + e.what());
      }
    }
    auto settle = [&](const InboxEntry& entry) {
      const auto match = [&](const ReplyRecord& r) { return r.requester == entry.requester; };
      auto it = std::find_if(got.begin(), got.end(),
                             [&](const ReplyRecord& r) { return match(r) && r.direction == entry.direction; });
      if (it == got.end()) it = std::find_if(got.begin(), got.end(), match);
      if (!ok) {
        decided[{entry.requester, entry.direction}] = declined(entry, "no reply");
      } else if (it == got.end()) {
        job.warnings.push_back("reply: no answer to " + entry.requester.str() + "; treated as declined");
        decided[{entry.requester, entry.direction}] = declined(entry, "no reply");
      } else {
        ReplyRecord r = *it;
        r.direction = entry.direction;
        r.userNote = entry.userNote;
        r.forced = false;
        decided[{entry.requester, entry.direction}] = r;
      }
    };
    for (const auto& e : pending.wantsToSupply) settle(e);
    for (const auto& e : pending.wantsToBuy) settle(e);
  }

  for (const auto& e : inbox.wantsToSupply) job.replies.push_back(decided.at({e.requester, e.direction}));
  for (const auto& e : inbox.wantsToBuy) job.replies.push_back(decided.at({e.requester, e.direction}));
  return job;
}

}  // namespace

TurnOutcome resolve(const Timeline& timeline, const KnowledgeBase& knowledge, const PolicyMap& policies,
                    std::vector<Deliberation> deliberations, const TurnConfig& config, std::uint64_t seed,
                    const ResolveOptions& options) {
  const ViewBuilder views(timeline, knowledge, config);
  const Frame& frame = timeline.back();

  std::map<CompanyId, AgentTurnRecord> records;
  auto record_for = [&](const CompanyId& id) -> AgentTurnRecord& {
    auto [it, fresh] = records.try_emplace(id);
    if (fresh) {
      it->second.companyId = id;
      it->second.t = timeline.size() - 1;
      it->second.label = frame.label;
    }
    return it->second;
  };
  for (const auto& [id, _] : policies) record_for(id);

  std::vector<RequestRecord> outgoing;
  for (auto& d : deliberations) {
    auto& r = record_for(d.id);
    r.plans = std::move(d.plans);
    r.constraints = std::move(d.constraints);
    r.candidates = std::move(d.candidates);
    r.outgoing = std::move(d.outgoing);
    r.warnings = std::move(d.warnings);
    r.dialogue = std::move(d.dialogue);
    outgoing.insert(outgoing.end(), r.outgoing.begin(), r.outgoing.end());
  }

  const auto inboxes = assemble_inbox(outgoing, [&](const CompanyId& id) { return views.partner(id); });
  std::vector<CompanyId> repliers;
  for (const auto& [id, _] : inboxes) {
    repliers.push_back(id);
    record_for(id);
  }
  std::map<CompanyId, ReplyJob> jobs;
  for (const auto& id : repliers) jobs[id];
  for_each_maybe_parallel(repliers, config.parallel, [&](const CompanyId& id) {
    auto p = policies.find(id);
    jobs.at(id) = run_replies(id, inboxes.at(id), p == policies.end() ? nullptr : p->second.get(), views, seed, options);
  });

  std::vector<RequestRecord> terminations;
  std::vector<std::pair<RequestRecord, ReplyRecord>> accepted;
  for (const auto& r : outgoing)
    if (r.chosen && r.kind == RequestKind::Terminate) terminations.push_back(r);
  for (auto& [id, job] : jobs) {
    auto& rec = record_for(id);
    rec.incoming = job.replies;
    rec.warnings.insert(rec.warnings.end(), job.warnings.begin(), job.warnings.end());
    rec.dialogue.insert(rec.dialogue.end(), job.dialogue.begin(), job.dialogue.end());
    for (const auto& reply : job.replies) {
      if (!reply.accepted) continue;
      for (const auto& req : outgoing) {
        if (req.chosen && req.requester == reply.requester && req.target == id && req.kind != RequestKind::Terminate &&
            direction_of(req.kind) == reply.direction) {
          accepted.emplace_back(req, reply);
          break;
        }
      }
    }
  }

  auto commit = commit_deltas(*frame.edges, terminations, accepted);
  for (const auto& d : commit.deltas) record_for(d.requester).appliedDeltas.push_back(d);
  for (const auto& n : commit.notes) record_for(n.requester).warnings.push_back("commit: " + n.text);

  TurnOutcome out;
  out.next.label = next_label(frame.label);
  out.next.edges = make_snapshot(std::move(commit.edges));
  out.next.features = extend_features(timeline, config.horizon);
  out.next.simulated = true;
  out.records.reserve(records.size());
  for (auto& [id, rec] : records) out.records.push_back(std::move(rec));
  return out;
}

TurnOutcome run_turn(const Timeline& timeline, const KnowledgeBase& knowledge, const PolicyMap& policies,
                     const TurnConfig& config, std::uint64_t seed) {
  const ViewBuilder views(timeline, knowledge, config);
  std::vector<CompanyId> order = config.evaluationOrder;
  if (order.empty())
    for (const auto& [id, _] : policies) order.push_back(id);
  std::vector<CompanyId> planners;
  for (const auto& id : order) {
    if (!policies.contains(id)) continue;
    if (config.planners && !config.planners->contains(id)) continue;
    planners.push_back(id);
  }
  std::map<CompanyId, Deliberation> done;
  for (const auto& id : planners) done[id];
  for_each_maybe_parallel(planners, config.parallel, [&](const CompanyId& id) {
    done.at(id) = deliberate(timeline, views, id, *policies.at(id), config, seed);
  });
  std::vector<Deliberation> ds;
  ds.reserve(done.size());
  for (auto& [_, d] : done) ds.push_back(std::move(d));
  return resolve(timeline, knowledge, policies, std::move(ds), config, seed);
}

}  // namespace scsim
