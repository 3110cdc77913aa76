#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scsim/agent/engine.hpp"
#include "scsim/agent/rule_policy.hpp"
#include "scsim/explain.hpp"

namespace scsim {

struct SessionConfig {
  MetricKind performanceMetric = MetricKind::PageRank;
  ExplainModelKind explainModel = ExplainModelKind::Lasso;
  HorizonConfig horizon;
  /// "rule", "replay" (transcriptDir) or "llm" (environment settings).
  std::string policy = "rule";
  RuleParams rule;
  std::string transcriptDir;
  /// With policy "llm": also record every exchange into transcriptDir.
  bool record = false;
  int referenceLength = kDefaultReferenceLength;
  int turns = 4;
  int candidateCount = kDefaultCandidateCount;
  std::uint64_t seed = 0;
  bool parallel = false;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

nlohmann::json to_json(const SessionConfig& c);
/// Missing keys keep their defaults. Throws Errc::InvalidConfig.
SessionConfig session_config_from_json(const nlohmann::json& j);
/// Throws Errc::InvalidConfig (L < 1, turns < 1, ...).
void validate(const SessionConfig& c);

/// Builds the per-firm policy factory for a session configuration.
using PolicyResolver = std::function<PolicyFactory(const SessionConfig&)>;

/// Supports "rule" and "replay"; other kinds throw Errc::InvalidConfig.
PolicyFactory offline_policy_factory(const SessionConfig& c);

enum class NodeStatus { Historical, Simulated, Active };
std::string_view to_string(NodeStatus s) noexcept;

struct SimulationNode {
  int id = 0;
  std::optional<int> parent;
  std::vector<int> children;
  std::shared_ptr<const Frame> frame;
  /// Turn that produced this node, one record per firm in id order.
  std::vector<AgentTurnRecord> records;
  /// Knowledge the producing turn ran with.
  KnowledgeBase knowledge;
  std::uint64_t seed = 0;
  /// Contains outcomes forced by the user rather than produced by a policy.
  bool synthetic = false;

  bool simulated() const noexcept { return frame && frame->simulated; }
};

enum class AdjustTarget { Plan, Request, Reply };
enum class AdjustAction { Negate, Add, Delete };

std::string_view to_string(AdjustTarget t) noexcept;
std::string_view to_string(AdjustAction a) noexcept;

/// A staged edit of one node's turn.
///   company: firm owning the referenced record
///   index:   plan index, outgoing request index or incoming reply index
///            (ignored for Add on plans)
///   payload: Add on plans     {description, reason, seekCollaboration,
///                              seekSuppliers, requests: [{target, extraInfo}]}
///            Add on requests  {planIndex, target, reason, extraInfo}
///            Negate           {note, force}
struct Adjustment {
  AdjustTarget target = AdjustTarget::Request;
  AdjustAction action = AdjustAction::Negate;
  CompanyId company;
  int index = -1;
  nlohmann::json payload = nlohmann::json::object();
  std::string author = "user";
};

nlohmann::json to_json(const Adjustment& a);
/// Throws Errc::InvalidReference on malformed input.
Adjustment adjustment_from_json(const nlohmann::json& j);

using ViewParams = std::map<std::string, std::string>;

/// One dataset, its branching simulation-path tree and its journal. Writes
/// are serialized, reads run concurrently.
class Session {
 public:
  /// Historical nodes are created for every observed timestamp; the last one
  /// is Active. Throws Errc::InvalidConfig.
  Session(std::string id, std::shared_ptr<const Dataset> dataset, SessionConfig config,
          PolicyResolver resolver = offline_policy_factory);

  const std::string& id() const noexcept { return id_; }
  const Dataset& dataset() const noexcept { return *dataset_; }
  const SessionConfig& config() const noexcept { return config_; }

  int active() const;
  std::size_t node_count() const;
  /// Copy of a node. Throws Errc::UnknownNode.
  SimulationNode node(int id) const;
  NodeStatus status(int id) const;
  /// Frames along the path root -> node.
  Timeline timeline_to(int id) const;
  KnowledgeBase knowledge() const;

  /// Appends `turns` simulated nodes below `fromNode` (a sibling branch when
  /// it already has children) and makes the last one Active.
  /// Throws Errc::UnknownNode, Errc::InvalidConfig.
  std::vector<int> run(int fromNode, int turns);

  /// Validates and stages; nothing else changes. Throws Errc::UnknownNode,
  /// Errc::NodeNotSimulated, Errc::InvalidReference.
  void stage_adjustment(int node, Adjustment adj);
  std::vector<Adjustment> staged(int node) const;
  void reset_adjustments(int node);
  /// Re-resolves the node's turn with the staged adjustments into a new
  /// branch under the node's parent and makes it Active. Throws
  /// Errc::UnknownNode, Errc::NodeNotSimulated, Errc::InvalidReference.
  int apply_adjustments(int node);

  /// Empty scope means global knowledge. Applies to later turns only.
  /// Throws Errc::UnknownCompany.
  void update_knowledge(const std::optional<CompanyId>& scope, std::string text);
  /// Throws Errc::UnknownNode.
  void set_active(int node);

  /// JSON-Lines log: session header (config, dataset), journal, nodes with
  /// frames, one line per (node, firm) record, then the active node.
  std::string export_log() const;
  /// Throws Errc::ParseError.
  static std::unique_ptr<Session> import_log(std::string_view text, PolicyResolver resolver = offline_policy_factory);
  /// Re-executes the journal of an exported log (runs, applied adjustments,
  /// knowledge edits, activations) on a fresh session built from its header.
  /// With deterministic policies the result exports to the same bytes.
  /// Throws Errc::ParseError plus whatever re-execution throws.
  static std::unique_ptr<Session> replay_log(std::string_view text, PolicyResolver resolver = offline_policy_factory);

  nlohmann::json tree_json() const;
  /// kind: path | global | focus | adjustment | controlpanel.
  /// Throws Errc::UnknownView, Errc::UnknownNode, Errc::UnknownCompany.
  nlohmann::json view(int node, std::string_view kind, const ViewParams& params = {}) const;

 private:
  Session() = default;

  const SimulationNode& node_locked(int id) const;
  Timeline timeline_locked(int id) const;
  NodeStatus status_locked(int id) const;
  void journal_locked(nlohmann::json entry);
  int add_node_locked(SimulationNode n);
  Deliberation adjusted_deliberation(const SimulationNode& n, const CompanyId& id,
                                     const std::vector<Adjustment>& adjs) const;
  nlohmann::json adjustment_view(const SimulationNode& n, const ViewParams& params) const;
  nlohmann::json control_panel_view() const;
  nlohmann::json focus_view(int node, const ViewParams& params) const;

  std::string id_;
  std::shared_ptr<const Dataset> dataset_;
  SessionConfig config_;
  PolicyResolver resolver_;

  mutable std::shared_mutex mu_;
  std::vector<SimulationNode> nodes_;
  int active_ = 0;
  KnowledgeBase knowledge_;
  std::vector<nlohmann::json> journal_;
  std::map<int, std::vector<Adjustment>> staged_;
};

}  // namespace scsim
