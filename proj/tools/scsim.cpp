#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "scsim/core/io.hpp"
#include "scsim/error.hpp"
#include "scsim/experiment.hpp"
#include "scsim/layout.hpp"
#include "scsim/session/server.hpp"
#include "scsim/synthetic.hpp"

using namespace scsim;
namespace fs = std::filesystem;

namespace {

struct DataArgs {
  std::string dir;
  std::string companies, edges, knowledge;

  void add(CLI::App* cmd) {
    cmd->add_option("-d,--data", dir, "directory with companies.csv, edges.csv, knowledge.txt");
    cmd->add_option("--companies", companies, "companies file (CSV or JSON)");
    cmd->add_option("--edges", edges, "edges file");
    cmd->add_option("--knowledge", knowledge, "global knowledge file");
  }

  std::shared_ptr<const Dataset> load() const {
    const fs::path base = dir.empty() ? fs::path(".") : fs::path(dir);
    const auto pick = [&](const std::string& explicitPath, const char* name) {
      return explicitPath.empty() ? base / name : fs::path(explicitPath);
    };
    return std::make_shared<const Dataset>(
        load_dataset(pick(companies, "companies.csv"), pick(edges, "edges.csv"), pick(knowledge, "knowledge.txt")));
  }
};

struct PolicyArgs {
  std::string policy = "rule";
  std::string transcripts;
  bool record = false;
  int minSuppliers = 1;
  double cutoff = 30.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--policy", policy, "rule | replay | llm")->check(CLI::IsMember({"rule", "replay", "llm"}));
    cmd->add_option("--transcripts", transcripts, "transcript directory (replay source or record target)");
    cmd->add_flag("--record", record, "record LLM exchanges into --transcripts");
    cmd->add_option("--min-suppliers", minSuppliers, "rule policy: seek suppliers below this count");
    cmd->add_option("--cutoff", cutoff, "rule policy: terminate partners whose mean feature is below this");
  }

  void apply(SessionConfig& c) const {
    c.policy = policy;
    c.transcriptDir = transcripts;
    c.record = record;
    c.rule.minSuppliers = minSuppliers;
    c.rule.cutoff = cutoff;
  }
};

std::vector<CompanyId> split_ids(const std::string& csv) {
  std::vector<CompanyId> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.emplace_back(tok);
  return out;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::MissingFile, "cannot write " + path);
  out << text;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supply-chain multi-agent simulator"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
  SyntheticConfig synth;
  std::string genOut = "data";
  gen->add_option("-o,--out", genOut, "output directory");
  gen->add_option("--companies", synth.companies, "number of firms");
  gen->add_option("--quarters", synth.quarters, "number of quarters");
  gen->add_option("--seed", synth.seed, "random seed");

  // validate
  auto* val = app.add_subcommand("validate", "load a dataset and print a summary");
  DataArgs valData;
  valData.add(val);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run simulated turns from the last observed quarter");
  DataArgs simData;
  PolicyArgs simPolicy;
  SessionConfig simConfig;
  std::string simLog;
  std::string simMetric = "pagerank";
  simData.add(sim);
  simPolicy.add(sim);
  sim->add_option("-t,--turns", simConfig.turns, "turns to simulate");
  sim->add_option("-L,--reference-length", simConfig.referenceLength, "reference window length");
  sim->add_option("--candidates", simConfig.candidateCount, "candidates per query");
  sim->add_option("--seed", simConfig.seed, "base seed");
  sim->add_option("--metric", simMetric, "performance metric: collaborator_count | pagerank");
  sim->add_flag("--parallel", simConfig.parallel, "deliberate and reply concurrently");
  sim->add_option("-o,--log", simLog, "write the session log (JSON Lines) here");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "next-step prediction experiment against observed data");
  DataArgs evData;
  PolicyArgs evPolicy;
  ExperimentConfig evConfig;
  std::string evFocal, evFormat = "json";
  bool evPooled = false;
  evData.add(ev);
  evPolicy.add(ev);
  ev->add_option("--focal", evFocal, "comma-separated focal firm ids (default: all)");
  ev->add_option("--runs", evConfig.runs, "total runs, split evenly over the focal firms");
  ev->add_option("--history", evConfig.historyLen, "history length fed to the agents");
  ev->add_option("--seed", evConfig.seedBase, "base seed");
  ev->add_flag("--pooled-cr", evPooled, "consistency ratio per firm over pooled decisions");
  ev->add_flag("--parallel", evConfig.parallel, "run experiments concurrently");
  ev->add_option("--format", evFormat, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  // report
  auto* rep = app.add_subcommand("report", "model-selection reports for horizon and explain models");
  DataArgs repData;
  std::string repMetric = "pagerank";
  int repFolds = 4, repWindow = 4;
  double repLambda = 0.1;
  repData.add(rep);
  rep->add_option("--metric", repMetric, "performance metric for the explain models");
  rep->add_option("--folds", repFolds, "rolling-origin folds for the horizon models");
  rep->add_option("--window", repWindow, "horizon model window");
  rep->add_option("--lambda", repLambda, "horizon lasso penalty");

  // layout
  auto* lay = app.add_subcommand("layout", "emit a layout/v1 document");
  DataArgs layData;
  std::string layKind = "global", layFocal, layMetric = "pagerank", layModel = "lasso", layOut;
  layData.add(lay);
  lay->add_option("--kind", layKind, "global | focus")->check(CLI::IsMember({"global", "focus"}));
  lay->add_option("--focal", layFocal, "focus layout: comma-separated focal ids");
  lay->add_option("--metric", layMetric, "performance metric");
  lay->add_option("--model", layModel, "explain model: linear | lasso");
  lay->add_option("-o,--out", layOut, "output file (default stdout)");

  // serve
  auto* srv = app.add_subcommand("serve", "serve the HTTP JSON API");
  std::string srvHost = "127.0.0.1", srvDir = env_or("SCSIM_DATA_DIR", ""), srvToken = env_or("SCSIM_TOKEN", "");
  int srvPort = 8080;
  srv->add_option("--host", srvHost, "bind address");
  srv->add_option("--port", srvPort, "port (0 picks one)");
  srv->add_option("--data-dir", srvDir, "persistence directory (default $SCSIM_DATA_DIR)");
  srv->add_option("--token", srvToken, "bearer token required on every request (default $SCSIM_TOKEN)");

  // replay
  auto* rpl = app.add_subcommand("replay", "reload a session log and check it reproduces itself");
  std::string rplLog, rplTranscripts;
  bool rplRerun = false;
  rpl->add_option("log", rplLog, "session log (JSON Lines)")->required();
  rpl->add_flag("--rerun", rplRerun, "re-execute the journal instead of only reloading the stored turns");
  rpl->add_option("--transcripts", rplTranscripts, "transcript directory for replayed LLM exchanges");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto ds = generate_synthetic(synth);
      save_dataset(ds, genOut);
      std::cout << "wrote " << ds.company_count() << " companies, " << ds.horizon() << " quarters to " << genOut << "\n";
    } else if (val->parsed()) {
      const auto ds = valData.load();
      std::size_t edges = 0;
      for (const auto& s : ds->network.snapshots()) edges += s->size();
      std::cout << "companies:  " << ds->company_count() << "\n"
                << "timestamps: " << ds->horizon() << " (" << ds->timestampLabels.front() << ".."
                << ds->timestampLabels.back() << ")\n"
                << "features:   " << ds->feature_count() << "\n"
                << "edges:      " << edges << " over all timestamps\n";
    } else if (sim->parsed()) {
      simPolicy.apply(simConfig);
      simConfig.performanceMetric = parse_metric_kind(simMetric);
      Session session("cli", simData.load(), simConfig, network_policy_factory);
      const auto nodes = session.run(session.active(), simConfig.turns);
      for (int id : nodes) {
        const auto n = session.node(id);
        int warnings = 0;
        for (const auto& r : n.records) warnings += static_cast<int>(r.warnings.size());
        std::cout << n.frame->label << ": " << n.frame->edges->size() << " edges";
        if (warnings) std::cout << ", " << warnings << " warnings";
        std::cout << "\n";
      }
      if (!simLog.empty()) write_output(simLog, session.export_log());
    } else if (ev->parsed()) {
      SessionConfig c;
      evPolicy.apply(c);
      validate(c);
      const auto ds = evData.load();
      const auto focal = evFocal.empty() ? ds->ids() : split_ids(evFocal);
      evConfig.pooling = evPooled ? CrPooling::PooledFirm : CrPooling::SlotMean;
      const auto result = run_experiment(ds, network_policy_factory(c), focal, evConfig);
      std::cout << (evFormat == "csv" ? eval_report_csv(result.report) : eval_report_json(result.report).dump(2) + "\n");
    } else if (rep->parsed()) {
      const auto ds = repData.load();
      nlohmann::json out;
      const auto box = [](const BoxStats& b) {
        return nlohmann::json{{"min", b.min}, {"q1", b.q1}, {"median", b.median}, {"q3", b.q3}, {"max", b.max}};
      };
      const auto horizon = model_selection_report(*ds, {SeriesModelKind::Linear, SeriesModelKind::Lasso}, repFolds,
                                                  repWindow, repLambda);
      for (const auto& e : horizon.entries)
        out["horizon"].push_back({{"model", to_string(e.kind)}, {"error", box(e.errorBox)}, {"runtimeMicros", box(e.runtimeBox)}});
      out["horizonSkipped"] = horizon.skipped;
      const auto explain = explain_model_report(Timeline(ds), parse_metric_kind(repMetric),
                                                {ExplainModelKind::Linear, ExplainModelKind::Lasso});
      for (const auto& e : explain)
        out["explain"].push_back({{"model", to_string(e.kind)},
                                  {"error", box(box_stats(e.absErrors))},
                                  {"runtimeMicros", box(box_stats(e.runtimesMicros))}});
      std::cout << out.dump(2) << "\n";
    } else if (lay->parsed()) {
      const auto ds = layData.load();
      const Timeline timeline(ds);
      nlohmann::json doc;
      if (layKind == "global") {
        doc = global_embedding_json(global_embedding(timeline));
      } else {
        ExplainConfig ec;
        ec.metric = parse_metric_kind(layMetric);
        ec.kind = parse_explain_model_kind(layModel);
        const ExplainModelSet models(timeline, ec);
        const auto focal = split_ids(layFocal);
        if (focal.empty()) throw Error(Errc::InvalidConfig, "--focal is required for a focus layout");
        doc = focus_layout_json(focus_layout(timeline, models, focal, 0, timeline.size() - 1), ds->featureNames);
      }
      write_output(layOut, doc.dump(2) + "\n");
    } else if (srv->parsed()) {
      std::optional<fs::path> dir;
      if (!srvDir.empty()) dir = srvDir;
      SessionStore store(dir, network_policy_factory);
      Api api(store, srvToken);
      std::signal(SIGINT, [](int) { stop_serving(); });
      std::signal(SIGTERM, [](int) { stop_serving(); });
      ServeOptions opts;
      opts.host = srvHost;
      opts.port = srvPort;
      opts.onReady = [&](int port) { std::cout << "listening on http://" << srvHost << ":" << port << std::endl; };
      serve(api, opts);
    } else if (rpl->parsed()) {
      const auto text = read_text_file(rplLog);
      const PolicyResolver resolver = [&](const SessionConfig& c) {
        SessionConfig adjusted = c;
        if (!rplTranscripts.empty() && c.policy != "rule") {
          adjusted.policy = "replay";
          adjusted.transcriptDir = rplTranscripts;
        }
        return offline_policy_factory(adjusted);
      };
      const auto session = rplRerun ? Session::replay_log(text, resolver) : Session::import_log(text, resolver);
      const auto again = session->export_log();
      if (again != text) {
        std::cerr << "replay differs from " << rplLog << "\n";
        return 1;
      }
      std::cout << "replay identical: " << session->node_count() << " nodes, active " << session->active() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
