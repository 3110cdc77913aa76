#include "scsim/layout.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "scsim/core/network.hpp"
#include "scsim/error.hpp"
#include "scsim/linalg.hpp"

namespace scsim {

using nlohmann::json;

Eigen::MatrixXd embedding_rows(const Timeline& timeline, std::vector<std::string>* columnNames) {
  const Dataset& ds = timeline.dataset();
  const auto N = static_cast<Eigen::Index>(ds.company_count());
  const auto F = static_cast<Eigen::Index>(ds.feature_count());
  Eigen::MatrixXd rows(N * timeline.size(), 3 * F + 2);
  for (int t = 0; t < timeline.size(); ++t) {
    const Frame& frame = timeline.frame(t);
    for (Eigen::Index i = 0; i < N; ++i) {
      const auto& id = ds.companies[static_cast<std::size_t>(i)].id;
      auto row = rows.row(t * N + i);
      row.segment(0, F) = frame.features.row(i);
      const auto sup = suppliers_of(*frame.edges, id);
      const auto cus = customers_of(*frame.edges, id);
      Eigen::RowVectorXd ms = Eigen::RowVectorXd::Zero(F), mc = Eigen::RowVectorXd::Zero(F);
      for (const auto& s : sup) ms += frame.features.row(static_cast<Eigen::Index>(ds.index_of(s)));
      for (const auto& c : cus) mc += frame.features.row(static_cast<Eigen::Index>(ds.index_of(c)));
      if (!sup.empty()) ms /= static_cast<double>(sup.size());
      if (!cus.empty()) mc /= static_cast<double>(cus.size());
      row.segment(F, F) = ms;
      row.segment(2 * F, F) = mc;
      row(3 * F) = std::log1p(static_cast<double>(sup.size()));
      row(3 * F + 1) = std::log1p(static_cast<double>(cus.size()));
    }
  }
  if (columnNames) {
    columnNames->clear();
    for (const char* prefix : {"", "supplier_mean:", "customer_mean:"})
      for (const auto& f : ds.featureNames) columnNames->push_back(prefix + f);
    columnNames->push_back("log1p_supplier_count");
    columnNames->push_back("log1p_customer_count");
  }
  return rows;
}

GlobalEmbedding global_embedding(const Timeline& timeline) {
  const Dataset& ds = timeline.dataset();
  if (ds.company_count() < 2) throw Error(Errc::InvalidConfig, "embedding needs at least 2 companies");
  if (timeline.size() < 1) throw Error(Errc::InvalidConfig, "embedding needs at least 1 frame");

  std::vector<std::string> names;
  const Eigen::MatrixXd raw = embedding_rows(timeline, &names);
  const Eigen::MatrixXd centered = linalg::center_columns(raw).second;

  GlobalEmbedding out;
  for (int t = 0; t < timeline.size(); ++t) out.labels.push_back(timeline.frame(t).label);

  std::vector<Eigen::Index> keep;
  std::vector<double> scale;
  const double n = static_cast<double>(raw.rows());
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    const double sd = std::sqrt(centered.col(j).squaredNorm() / n);
    const double mag = std::max(1.0, raw.col(j).cwiseAbs().maxCoeff());
    if (sd <= 1e-12 * mag) continue;
    keep.push_back(j);
    scale.push_back(sd);
    out.columns.push_back(names[static_cast<std::size_t>(j)]);
  }

  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(raw.rows(), 2);
  if (keep.empty()) {
    out.degenerate = true;
  } else {
    Eigen::MatrixXd Z(raw.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) Z.col(static_cast<Eigen::Index>(k)) = centered.col(keep[k]) / scale[k];
    const auto proj = linalg::pca(Z, 2);
    coords = proj.coords;
    out.eigenvalues = proj.eigenvalues;
  }

  const auto N = static_cast<Eigen::Index>(ds.company_count());
  for (int t = 0; t < timeline.size(); ++t)
    for (Eigen::Index i = 0; i < N; ++i)
      out.points.push_back({ds.companies[static_cast<std::size_t>(i)].id, t, coords(t * N + i, 0), coords(t * N + i, 1)});
  return out;
}

namespace {

struct Bounds {
  double lo = 0.0, hi = 0.0;
  double map(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.5; }
};

}  // namespace

json global_embedding_json(const GlobalEmbedding& e) {
  Bounds bx, by;
  if (!e.points.empty()) {
    bx = {e.points.front().x, e.points.front().x};
    by = {e.points.front().y, e.points.front().y};
    for (const auto& p : e.points) {
      bx.lo = std::min(bx.lo, p.x);
      bx.hi = std::max(bx.hi, p.x);
      by.lo = std::min(by.lo, p.y);
      by.hi = std::max(by.hi, p.y);
    }
  }
  json panels = json::array();
  for (std::size_t t = 0; t < e.labels.size(); ++t) {
    json pts = json::array();
    for (const auto& p : e.points) {
      if (p.t != static_cast<int>(t)) continue;
      pts.push_back({{"id", p.id.str()}, {"x", bx.map(p.x)}, {"y", by.map(p.y)}, {"rawX", p.x}, {"rawY", p.y}});
    }
    panels.push_back({{"t", t}, {"label", e.labels[t]}, {"points", pts}});
  }
  return {{"version", kLayoutVersion},
          {"kind", "global"},
          {"degenerate", e.degenerate},
          {"columns", e.columns},
          {"eigenvalues", {e.eigenvalues(0), e.eigenvalues(1)}},
          {"panels", panels}};
}

namespace {

std::vector<IndustryGroup> side_groups(const Timeline& timeline, const ExplainModelSet& models,
                                       const CompanyId& focal, const CompanySet& partners, bool supplierSide, int t,
                                       const std::optional<Attribution>& attr, const ExplainFeatureSpace* space,
                                       const TemporalNetwork& network) {
  const Dataset& ds = timeline.dataset();
  const auto& perf = models.performance().at(static_cast<std::size_t>(t));
  std::map<std::string, std::vector<Berry>> byIndustry;
  double maxAbs = 0.0;
  for (const auto& p : partners) {
    Berry b;
    b.id = p;
    b.performance = perf.at(p);
    const Edge e = supplierSide ? Edge{p, focal} : Edge{focal, p};
    b.lifecycle = edge_lifecycle(network, e, t);
    std::optional<std::size_t> col;
    if (attr && space) col = space->presence_column(p);
    if (col) {
      b.phi = attr->phi(static_cast<Eigen::Index>(*col));
      maxAbs = std::max(maxAbs, std::abs(b.phi));
    } else {
      b.missingAttribution = true;
    }
    byIndustry[ds.company(p).industry].push_back(b);
  }
  std::vector<IndustryGroup> groups;
  for (auto& [industry, berries] : byIndustry) {
    for (auto& b : berries) b.offset = maxAbs > 0 ? b.phi / maxAbs : 0.0;
    IndustryGroup g;
    g.industry = industry;
    std::vector<CompanyId> members;
    for (const auto& b : berries) members.push_back(b.id);
    g.soil = group_soil(models, focal, industry, members, t);
    g.berries = std::move(berries);
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace

FocusLayout focus_layout(const Timeline& timeline, const ExplainModelSet& models,
                         const std::vector<CompanyId>& focalIds, int tFirst, int tLast) {
  if (tFirst < 0 || tLast >= timeline.size() || tFirst > tLast)
    throw Error(Errc::TimestampOutOfRange, "focus range [" + std::to_string(tFirst) + ", " + std::to_string(tLast) +
                                               "] outside 0.." + std::to_string(timeline.size() - 1));
  const Dataset& ds = timeline.dataset();
  for (const auto& f : focalIds) ds.index_of(f);
  const TemporalNetwork network = timeline.network();

  FocusLayout out;
  double maxPerf = 0.0;
  for (const auto& focal : focalIds) {
    for (int t = tFirst; t <= tLast; ++t) {
      const Frame& frame = timeline.frame(t);
      FocusPanel panel;
      panel.focal = focal;
      panel.t = t;
      panel.label = frame.label;
      const auto row = static_cast<Eigen::Index>(ds.index_of(focal));
      for (Eigen::Index f = 0; f < frame.features.cols(); ++f) panel.glyph.featureArcs.push_back(frame.features(row, f) / 100.0);
      panel.glyph.performance = models.performance().at(static_cast<std::size_t>(t)).at(focal);
      maxPerf = std::max(maxPerf, panel.glyph.performance);

      const auto attr = models.attribution_at(focal, t);
      const auto* fe = models.find(focal);
      const ExplainFeatureSpace* space = fe ? &fe->design.space : nullptr;
      const auto sup = suppliers_of(*frame.edges, focal);
      const auto cus = customers_of(*frame.edges, focal);
      if (attr) {
        panel.glyph.xPosition = influence_ratio(*attr, *space, sup, cus);
      } else {
        panel.glyph.missingAttribution = true;
        out.warnings.push_back("no attribution for " + focal.str() + " at " + frame.label);
      }
      panel.supplierGroups = side_groups(timeline, models, focal, sup, true, t, attr, space, network);
      panel.customerGroups = side_groups(timeline, models, focal, cus, false, t, attr, space, network);

      std::vector<SoilSummary> soils;
      for (const auto* side : {&panel.supplierGroups, &panel.customerGroups})
        for (const auto& g : *side) soils.push_back(g.soil);
      normalize_soil(soils);
      std::size_t k = 0;
      for (auto* side : {&panel.supplierGroups, &panel.customerGroups})
        for (auto& g : *side) g.soil = soils[k++];
      out.panels.push_back(std::move(panel));
    }
  }
  for (auto& p : out.panels) p.glyph.performanceRadius = maxPerf > 0 ? p.glyph.performance / maxPerf : 0.0;

  for (int t = tFirst; t <= tLast; ++t) {
    const Frame& frame = timeline.frame(t);
    for (std::size_t a = 0; a < focalIds.size(); ++a)
      for (std::size_t b = a + 1; b < focalIds.size(); ++b) {
        const auto sa = suppliers_of(*frame.edges, focalIds[a]);
        const auto sb = suppliers_of(*frame.edges, focalIds[b]);
        for (const auto& s : sa)
          if (sb.contains(s)) out.sharedSupplierLinks.push_back({focalIds[a], focalIds[b], s, t});
      }
  }
  return out;
}

namespace {

json groups_json(const std::vector<IndustryGroup>& groups) {
  json out = json::array();
  for (const auto& g : groups) {
    json berries = json::array();
    for (const auto& b : g.berries)
      berries.push_back({{"id", b.id.str()},
                         {"performance", b.performance},
                         {"phi", b.phi},
                         {"offset", b.offset},
                         {"lifecycle", to_string(b.lifecycle)},
                         {"missingAttribution", b.missingAttribution}});
    json missing = json::array();
    for (const auto& m : g.soil.missingPredictors) missing.push_back(m.str());
    out.push_back({{"industry", g.industry},
                   {"soil",
                    {{"groupMeanPerformance", g.soil.groupMeanPerformance},
                     {"focalContribution", g.soil.focalContribution},
                     {"polarity", g.soil.polarity},
                     {"magnitude", g.soil.magnitude},
                     {"missingPredictors", missing}}},
                   {"berries", berries}});
  }
  return out;
}

}  // namespace

json focus_layout_json(const FocusLayout& layout, const std::vector<std::string>& featureNames) {
  json panels = json::array();
  for (const auto& p : layout.panels)
    panels.push_back({{"focal", p.focal.str()},
                      {"t", p.t},
                      {"label", p.label},
                      {"glyph",
                       {{"performance", p.glyph.performance},
                        {"performanceRadius", p.glyph.performanceRadius},
                        {"featureArcs", p.glyph.featureArcs},
                        {"xPosition", p.glyph.xPosition},
                        {"missingAttribution", p.glyph.missingAttribution}}},
                      {"supplierGroups", groups_json(p.supplierGroups)},
                      {"customerGroups", groups_json(p.customerGroups)}});
  json links = json::array();
  for (const auto& l : layout.sharedSupplierLinks)
    links.push_back({{"focalA", l.focalA.str()}, {"focalB", l.focalB.str()}, {"supplier", l.supplier.str()}, {"t", l.t}});
  return {{"version", kLayoutVersion},
          {"kind", "focus"},
          {"featureNames", featureNames},
          {"panels", panels},
          {"sharedSupplierLinks", links},
          {"warnings", layout.warnings}};
}

}  // namespace scsim
