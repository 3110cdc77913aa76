#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scsim/core/types.hpp"

namespace scsim {

struct ConfusionMetrics {
  int tp = 0, fp = 0, fn = 0, tn = 0;
  double acc = 0, precision = 0, recall = 0, f1 = 0;
};

/// Binary partner prediction over `universe` (focal firm excluded by the
/// caller). Precision and recall are 0 when their denominators are 0; f1 is 0
/// when precision + recall is 0.
ConfusionMetrics confusion_metrics(const CompanySet& predicted, const CompanySet& observed,
                                   const CompanySet& universe);

/// Category indices used in decision matrices.
enum class EdgeDecision { Add = 1, Remove = 2, Keep = 3 };
inline constexpr int kEdgeDecisionCategories = 3;

std::string_view to_string(EdgeDecision d) noexcept;

/// Add: absent -> present, Remove: present -> absent, Keep: present -> present.
/// Absent -> absent slots are omitted.
std::map<Edge, EdgeDecision> edge_dynamics(const EdgeSet& prev, const EdgeSet& next, const EdgeSet& slots);

/// items x raters, entries are category indices in 1..categories.
struct DecisionMatrix {
  int categories = kEdgeDecisionCategories;
  std::vector<std::vector<int>> ratings;
};

/// Gwet's first-order agreement coefficient:
///   Pa = 1/N sum_i sum_k r_ik (r_ik - 1) / (R (R - 1))
///   pi_k = 1/N sum_i r_ik / R
///   Pe = 1/(K - 1) sum_k pi_k (1 - pi_k)
///   AC1 = (Pa - Pe) / (1 - Pe)
/// Throws Errc::InvalidConfig (empty, ragged, R < 2, K < 2, category out of
/// range), Errc::DegenerateChance (Pe == 1).
double gwet_ac1(const DecisionMatrix& m);

enum class CrBand { High, Medium, Low };
std::string_view to_string(CrBand b) noexcept;

/// High: CR > 0.8, Medium: 0.6 < CR <= 0.8, Low: CR <= 0.6.
CrBand cr_band(double cr) noexcept;

/// Slot-level: CR per slot, firm CR is the mean over its slots, bands are
/// counted over slots. Pooled: firm CR is the modal share of all the firm's
/// decisions pooled across slots, bands are counted over firms.
enum class CrPooling { SlotMean, PooledFirm };

struct BandShares {
  double high = 0, medium = 0, low = 0;
};

/// (focal firm, edge slot)
using SlotKey = std::pair<CompanyId, Edge>;

struct ConsistencyReport {
  std::map<SlotKey, double> slotCr;
  std::map<CompanyId, double> firmCr;
  BandShares bands;
};

/// Throws Errc::InvalidConfig when a slot has fewer than 2 decisions.
ConsistencyReport consistency_ratios(const std::map<SlotKey, std::vector<EdgeDecision>>& runDecisions,
                                     CrPooling pooling = CrPooling::SlotMean);

struct EvalReport {
  double acc = 0, precision = 0, recall = 0, f1 = 0;
  double ac1 = 0;
  BandShares crBands;
  std::map<CompanyId, double> firmCr;
  int runs = 0;
  int items = 0;
  std::vector<std::string> notes;
};

/// Columns: ACC, Precision, Recall, F1, AC1, HighCR, MediumCR, LowCR (fractions).
std::string eval_report_csv(const EvalReport& r);
nlohmann::json eval_report_json(const EvalReport& r);

}  // namespace scsim
