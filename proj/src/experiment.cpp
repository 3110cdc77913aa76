#include "scsim/experiment.hpp"

#include <future>
#include <set>

#include "scsim/core/hash.hpp"
#include "scsim/core/network.hpp"
#include "scsim/error.hpp"

namespace scsim {

namespace {

EdgeSet incident(const EdgeSet& edges, const CompanyId& id) {
  EdgeSet out;
  for (const auto& e : edges)
    if (e.supplier == id || e.customer == id) out.insert(e);
  return out;
}

ExperimentRun simulate_once(const Timeline& history, const KnowledgeBase& kb, const PolicyFactory& factory,
                            const CompanyId& focal, int run, const EdgeSet& observed, const ExperimentConfig& config) {
  const Dataset& ds = history.dataset();
  TurnConfig turn = config.turn;
  turn.planners = CompanySet{focal};
  turn.evaluationOrder.clear();
  const auto seed = derive_seed(config.seedBase, focal.str() + "#" + std::to_string(run));
  auto outcome = run_turn(history, kb, make_policies(ds.ids(), factory), turn, seed);

  ExperimentRun r;
  r.focal = focal;
  r.run = run;
  CompanySet universe;
  for (const auto& id : ds.ids())
    if (id != focal) universe.insert(id);
  r.metrics = confusion_metrics(partners_of(*outcome.next.edges, focal), partners_of(observed, focal), universe);

  const EdgeSet& prev = *history.back().edges;
  EdgeSet slots = incident(prev, focal);
  for (const auto& e : incident(*outcome.next.edges, focal)) slots.insert(e);
  r.decisions = edge_dynamics(prev, *outcome.next.edges, slots);
  r.records = std::move(outcome.records);
  return r;
}

}  // namespace

ExperimentResult run_experiment(std::shared_ptr<const Dataset> dataset, const PolicyFactory& factory,
                                const std::vector<CompanyId>& focalIds, const ExperimentConfig& config) {
  if (!dataset) throw Error(Errc::InvalidConfig, "no dataset");
  if (focalIds.empty()) throw Error(Errc::InvalidConfig, "no focal firms");
  if (config.historyLen < 1) throw Error(Errc::InvalidConfig, "historyLen must be >= 1");
  if (config.runs < static_cast<int>(focalIds.size()) * 2 || config.runs % static_cast<int>(focalIds.size()) != 0)
    throw Error(Errc::InvalidConfig, std::to_string(config.runs) + " runs cannot be split evenly over " +
                                         std::to_string(focalIds.size()) + " focal firms with at least 2 each");
  const int T = dataset->horizon();
  if (T < config.historyLen + 1)
    throw Error(Errc::InsufficientHistory, "need " + std::to_string(config.historyLen + 1) + " observed steps, have " +
                                               std::to_string(T));
  for (const auto& id : focalIds) dataset->index_of(id);

  const Timeline full(dataset);
  const Timeline history = full.slice(T - 1 - config.historyLen, config.historyLen);
  const EdgeSet& observed = *full.back().edges;
  const KnowledgeBase kb = dataset->knowledge();
  const int perFirm = config.runs / static_cast<int>(focalIds.size());

  std::vector<std::pair<CompanyId, int>> jobs;
  for (const auto& f : focalIds)
    for (int r = 0; r < perFirm; ++r) jobs.emplace_back(f, r);

  ExperimentResult result;
  result.runs.resize(jobs.size());
  auto work = [&](std::size_t i) {
    result.runs[i] = simulate_once(history, kb, factory, jobs[i].first, jobs[i].second, observed, config);
  };
  if (config.parallel) {
    std::vector<std::future<void>> fs;
    for (std::size_t i = 0; i < jobs.size(); ++i) fs.push_back(std::async(std::launch::async, work, i));
    for (auto& f : fs) f.get();
  } else {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
  }

  EvalReport& rep = result.report;
  rep.runs = static_cast<int>(result.runs.size());
  for (const auto& r : result.runs) {
    rep.acc += r.metrics.acc;
    rep.precision += r.metrics.precision;
    rep.recall += r.metrics.recall;
    rep.f1 += r.metrics.f1;
  }
  rep.acc /= rep.runs;
  rep.precision /= rep.runs;
  rep.recall /= rep.runs;
  rep.f1 /= rep.runs;

  std::map<CompanyId, std::set<Edge>> slotUniverse;
  for (const auto& r : result.runs)
    for (const auto& [e, _] : r.decisions) slotUniverse[r.focal].insert(e);
  std::map<SlotKey, std::vector<EdgeDecision>> byslot;
  DecisionMatrix m;
  for (const auto& [focal, slots] : slotUniverse) {
    for (const auto& e : slots) {
      auto& ds = byslot[{focal, e}];
      std::vector<int> row;
      for (const auto& r : result.runs) {
        if (r.focal != focal) continue;
        auto it = r.decisions.find(e);
        const EdgeDecision d = it == r.decisions.end() ? EdgeDecision::Keep : it->second;
        ds.push_back(d);
        row.push_back(static_cast<int>(d));
      }
      m.ratings.push_back(std::move(row));
    }
  }
  rep.items = static_cast<int>(m.ratings.size());
  if (m.ratings.empty()) {
    rep.ac1 = 1.0;
    rep.notes.push_back("no decision slots in any run; AC1 reported as 1 (vacuous agreement)");
  } else {
    rep.ac1 = gwet_ac1(m);
    const auto cr = consistency_ratios(byslot, config.pooling);
    rep.crBands = cr.bands;
    rep.firmCr = cr.firmCr;
  }
  return result;
}

}  // namespace scsim
