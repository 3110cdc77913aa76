#include "scsim/evaluation.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "scsim/core/io.hpp"
#include "scsim/error.hpp"

namespace scsim {

ConfusionMetrics confusion_metrics(const CompanySet& predicted, const CompanySet& observed,
                                   const CompanySet& universe) {
  ConfusionMetrics m;
  for (const auto& id : universe) {
    const bool p = predicted.contains(id);
    const bool o = observed.contains(id);
    if (p && o) ++m.tp;
    else if (p) ++m.fp;
    else if (o) ++m.fn;
    else ++m.tn;
  }
  const double n = static_cast<double>(universe.size());
  m.acc = n > 0 ? (m.tp + m.tn) / n : 0.0;
  m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
  m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

std::string_view to_string(EdgeDecision d) noexcept {
  switch (d) {
    case EdgeDecision::Add: return "add";
    case EdgeDecision::Remove: return "remove";
    case EdgeDecision::Keep: return "keep";
  }
  return "keep";
}

std::map<Edge, EdgeDecision> edge_dynamics(const EdgeSet& prev, const EdgeSet& next, const EdgeSet& slots) {
  std::map<Edge, EdgeDecision> out;
  for (const auto& slot : slots) {
    const bool before = prev.contains(slot);
    const bool after = next.contains(slot);
    if (before && after) out.emplace(slot, EdgeDecision::Keep);
    else if (before) out.emplace(slot, EdgeDecision::Remove);
    else if (after) out.emplace(slot, EdgeDecision::Add);
  }
  return out;
}

double gwet_ac1(const DecisionMatrix& m) {
  const int K = m.categories;
  if (K < 2) throw Error(Errc::InvalidConfig, "AC1 needs at least 2 categories");
  if (m.ratings.empty()) throw Error(Errc::InvalidConfig, "AC1 over zero items");
  const std::size_t R = m.ratings.front().size();
  if (R < 2) throw Error(Errc::InvalidConfig, "AC1 needs at least 2 raters");

  const double N = static_cast<double>(m.ratings.size());
  const double Rd = static_cast<double>(R);
  std::vector<double> pi(static_cast<std::size_t>(K), 0.0);
  double pa = 0.0;
  std::vector<double> counts(static_cast<std::size_t>(K));
  for (const auto& item : m.ratings) {
    if (item.size() != R) throw Error(Errc::InvalidConfig, "incomplete decision matrix");
    std::fill(counts.begin(), counts.end(), 0.0);
    for (int c : item) {
      if (c < 1 || c > K) throw Error(Errc::InvalidConfig, "category " + std::to_string(c) + " out of range");
      counts[static_cast<std::size_t>(c - 1)] += 1.0;
    }
    for (std::size_t k = 0; k < counts.size(); ++k) {
      pa += counts[k] * (counts[k] - 1.0) / (Rd * (Rd - 1.0));
      pi[k] += counts[k] / Rd;
    }
  }
  pa /= N;
  double pe = 0.0;
  for (double p : pi) {
    const double share = p / N;
    pe += share * (1.0 - share);
  }
  pe /= static_cast<double>(K - 1);
  if (pe == 1.0) throw Error(Errc::DegenerateChance, "chance agreement is 1");
  return (pa - pe) / (1.0 - pe);
}

std::string_view to_string(CrBand b) noexcept {
  switch (b) {
    case CrBand::High: return "high";
    case CrBand::Medium: return "medium";
    case CrBand::Low: return "low";
  }
  return "low";
}

CrBand cr_band(double cr) noexcept {
  if (cr > 0.8) return CrBand::High;
  if (cr > 0.6) return CrBand::Medium;
  return CrBand::Low;
}

namespace {

std::array<int, kEdgeDecisionCategories> tally(const std::vector<EdgeDecision>& ds) {
  std::array<int, kEdgeDecisionCategories> c{};
  for (auto d : ds) ++c[static_cast<std::size_t>(static_cast<int>(d) - 1)];
  return c;
}

void add_band(BandShares& b, double cr) {
  switch (cr_band(cr)) {
    case CrBand::High: b.high += 1; break;
    case CrBand::Medium: b.medium += 1; break;
    case CrBand::Low: b.low += 1; break;
  }
}

void to_shares(BandShares& b, std::size_t n) {
  if (n == 0) return;
  const double d = static_cast<double>(n);
  b.high /= d;
  b.medium /= d;
  b.low /= d;
}

}  // namespace

ConsistencyReport consistency_ratios(const std::map<SlotKey, std::vector<EdgeDecision>>& runDecisions,
                                     CrPooling pooling) {
  ConsistencyReport rep;
  std::map<CompanyId, std::pair<double, int>> slotSums;
  std::map<CompanyId, std::array<int, kEdgeDecisionCategories>> pooled;
  for (const auto& [key, decisions] : runDecisions) {
    if (decisions.size() < 2) throw Error(Errc::InvalidConfig, "consistency ratio needs at least 2 runs");
    const auto counts = tally(decisions);
    const double cr = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
                      static_cast<double>(decisions.size());
    rep.slotCr[key] = cr;
    auto& s = slotSums[key.first];
    s.first += cr;
    s.second += 1;
    auto& p = pooled[key.first];
    for (std::size_t k = 0; k < counts.size(); ++k) p[k] += counts[k];
  }
  if (pooling == CrPooling::SlotMean) {
    for (const auto& [firm, s] : slotSums) rep.firmCr[firm] = s.first / s.second;
    for (const auto& [key, cr] : rep.slotCr) add_band(rep.bands, cr);
    to_shares(rep.bands, rep.slotCr.size());
  } else {
    for (const auto& [firm, counts] : pooled) {
      int total = 0;
      for (int c : counts) total += c;
      rep.firmCr[firm] = static_cast<double>(*std::max_element(counts.begin(), counts.end())) / total;
      add_band(rep.bands, rep.firmCr[firm]);
    }
    to_shares(rep.bands, rep.firmCr.size());
  }
  return rep;
}

std::string eval_report_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "ACC,Precision,Recall,F1,AC1,HighCR,MediumCR,LowCR\n";
  out << format_double(r.acc) << ',' << format_double(r.precision) << ',' << format_double(r.recall) << ','
      << format_double(r.f1) << ',' << format_double(r.ac1) << ',' << format_double(r.crBands.high) << ','
      << format_double(r.crBands.medium) << ',' << format_double(r.crBands.low) << '\n';
  return out.str();
}

nlohmann::json eval_report_json(const EvalReport& r) {
  nlohmann::json firms = nlohmann::json::object();
  for (const auto& [id, cr] : r.firmCr) firms[id.str()] = cr;
  return {{"ACC", r.acc},
          {"Precision", r.precision},
          {"Recall", r.recall},
          {"F1", r.f1},
          {"AC1", r.ac1},
          {"HighCR", r.crBands.high},
          {"MediumCR", r.crBands.medium},
          {"LowCR", r.crBands.low},
          {"firmCR", firms},
          {"runs", r.runs},
          {"items", r.items}};
}

}  // namespace scsim
