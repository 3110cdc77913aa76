#include "scsim/explain.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "scsim/core/network.hpp"
#include "scsim/error.hpp"
#include "scsim/linalg.hpp"

namespace scsim {
namespace {

Eigen::MatrixXd drop_row(const Eigen::MatrixXd& X, Eigen::Index row) {
  Eigen::MatrixXd out(X.rows() - 1, X.cols());
  out.topRows(row) = X.topRows(row);
  out.bottomRows(X.rows() - row - 1) = X.bottomRows(X.rows() - row - 1);
  return out;
}

Eigen::VectorXd drop_row(const Eigen::VectorXd& y, Eigen::Index row) {
  Eigen::VectorXd out(y.size() - 1);
  out.head(row) = y.head(row);
  out.tail(y.size() - row - 1) = y.tail(y.size() - row - 1);
  return out;
}

}  // namespace

ExplainModelKind parse_explain_model_kind(std::string_view name) {
  if (name == "linear") return ExplainModelKind::Linear;
  if (name == "lasso") return ExplainModelKind::Lasso;
  throw Error(Errc::UnknownModel, std::string(name));
}

std::string_view to_string(ExplainModelKind kind) noexcept {
  return kind == ExplainModelKind::Linear ? "linear" : "lasso";
}

std::optional<std::size_t> ExplainFeatureSpace::presence_column(const CompanyId& partner) const {
  auto it = std::lower_bound(partners.begin(), partners.end(), partner);
  if (it == partners.end() || *it != partner) return std::nullopt;
  return ownCount + 2 + static_cast<std::size_t>(it - partners.begin());
}

std::vector<PerformanceMap> performance_series(const Timeline& timeline, MetricKind metric) {
  const auto ids = timeline.dataset().ids();
  std::vector<PerformanceMap> out;
  out.reserve(static_cast<std::size_t>(timeline.size()));
  for (int t = 0; t < timeline.size(); ++t) out.push_back(performance(*timeline.frame(t).edges, ids, metric));
  return out;
}

DesignMatrix build_design_matrix(const Timeline& timeline, const std::vector<PerformanceMap>& performance,
                                 const CompanyId& focal, const std::vector<int>& timestamps, int lag,
                                 const EmbeddingProvider* embedding) {
  const auto& ds = timeline.dataset();
  const auto focalIndex = static_cast<Eigen::Index>(ds.index_of(focal));

  std::vector<int> rows;
  for (int t : timestamps) {
    timeline.frame(t);
    if (t + lag >= 0 && t + lag < timeline.size()) rows.push_back(t);
  }
  if (rows.size() < 3) {
    throw Error(Errc::TooFewSamples, focal.str() + " has " + std::to_string(rows.size()) + " samples");
  }

  DesignMatrix dm;
  auto& space = dm.space;
  CompanySet partners;
  for (int t = 0; t < timeline.size(); ++t) partners.merge(partners_of(*timeline.frame(t).edges, focal));
  space.partners.assign(partners.begin(), partners.end());
  space.ownCount = ds.feature_count();
  space.names = ds.featureNames;
  space.names.push_back("supplier_count");
  space.names.push_back("customer_count");
  for (const auto& p : space.partners) space.names.push_back(presence_feature_name(p));
  if (embedding != nullptr) {
    space.embeddingCount = embedding->dimension;
    for (std::size_t k = 0; k < embedding->dimension; ++k) space.names.push_back("embedding:" + std::to_string(k));
  }

  const auto F = static_cast<Eigen::Index>(space.ownCount);
  dm.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(space.names.size()));
  dm.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int t = rows[r];
    const auto& frame = timeline.frame(t);
    const auto row = static_cast<Eigen::Index>(r);
    dm.X.row(row).head(F) = frame.features.row(focalIndex);
    const auto suppliers = suppliers_of(*frame.edges, focal);
    const auto customers = customers_of(*frame.edges, focal);
    dm.X(row, F) = static_cast<double>(suppliers.size());
    dm.X(row, F + 1) = static_cast<double>(customers.size());
    for (const auto* set : {&suppliers, &customers}) {
      for (const auto& p : *set) dm.X(row, static_cast<Eigen::Index>(*space.presence_column(p))) = 1.0;
    }
    if (embedding != nullptr) {
      const auto offset = static_cast<Eigen::Index>(space.names.size() - embedding->dimension);
      dm.X.row(row).segment(offset, static_cast<Eigen::Index>(embedding->dimension)) =
          embedding->embed(timeline, focal, t).transpose();
    }
    dm.y(row) = performance.at(static_cast<std::size_t>(t + lag)).at(focal);
  }
  dm.timestamps = std::move(rows);
  return dm;
}

double Predictor::predict(const Eigen::VectorXd& x) const {
  if (x.size() != coef.size()) throw Error(Errc::DimensionMismatch, "predict input size");
  return intercept + coef.dot(x);
}

Predictor fit_explainer(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, ExplainModelKind kind, double lambda) {
  if (lambda < 0.0) throw Error(Errc::InvalidConfig, "lambda must be >= 0");
  if (X.rows() != y.size() || X.rows() == 0) throw Error(Errc::DimensionMismatch, "X rows vs y");
  Predictor p;
  p.kind = kind;
  p.lambda = lambda;
  p.trainingMeans = X.colwise().mean().transpose();
  if (kind == ExplainModelKind::Linear) {
    auto fit = linalg::least_squares(X, y);
    if (fit.rankDeficient) {
      fit = linalg::ridge(X, y, kRidgeJitter);
      p.ridgeFallback = true;
    }
    p.intercept = fit.intercept;
    p.coef = std::move(fit.coef);
  } else {
    auto fit = linalg::lasso(X, y, lambda, 1e-8, 10000);
    p.intercept = fit.intercept;
    p.coef = std::move(fit.coef);
  }
  return p;
}

double select_lambda_loo(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<double>& grid) {
  if (grid.empty()) throw Error(Errc::InvalidConfig, "empty lambda grid");
  double best = grid.front();
  double bestErr = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    double err = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      auto fit = linalg::lasso(drop_row(X, i), drop_row(y, i), lambda, 1e-8, 10000);
      const double r = y(i) - (fit.intercept + fit.coef.dot(X.row(i).transpose()));
      err += r * r;
    }
    if (err < bestErr) {
      bestErr = err;
      best = lambda;
    }
  }
  return best;
}

Attribution shapley(const Predictor& predictor, const Eigen::VectorXd& x, const ExplainFeatureSpace& space) {
  if (static_cast<std::size_t>(x.size()) != space.names.size()) {
    throw Error(Errc::DimensionMismatch, "x has " + std::to_string(x.size()) + " entries, space has " +
                                             std::to_string(space.names.size()));
  }
  auto a = linear_shapley(predictor.intercept, predictor.coef, x, predictor.trainingMeans);
  a.names = space.names;
  return a;
}

double influence_ratio(const Attribution& attr, const ExplainFeatureSpace& space, const CompanySet& suppliers,
                       const CompanySet& customers) {
  auto sum = [&](const CompanySet& set) {
    double s = 0.0;
    for (const auto& p : set) {
      if (auto col = space.presence_column(p)) s += std::abs(attr.phi(static_cast<Eigen::Index>(*col)));
    }
    return s;
  };
  const double S = sum(suppliers);
  const double C = sum(customers);
  if (S + C == 0.0) return 0.5;
  return C / (S + C);
}

ExplainModelSet::ExplainModelSet(const Timeline& timeline, const ExplainConfig& config)
    : performance_(performance_series(timeline, config.metric)) {
  std::vector<int> all(static_cast<std::size_t>(timeline.size()));
  for (int t = 0; t < timeline.size(); ++t) all[static_cast<std::size_t>(t)] = t;
  for (const auto& c : timeline.dataset().companies) {
    try {
      FirmExplainer fe;
      fe.id = c.id;
      fe.design = build_design_matrix(timeline, performance_, c.id, all, config.lag, config.embedding);
      double lambda = 0.0;
      if (config.kind == ExplainModelKind::Lasso) {
        lambda = config.lambda ? *config.lambda : select_lambda_loo(fe.design.X, fe.design.y, config.lambdaGrid);
      }
      fe.predictor = fit_explainer(fe.design.X, fe.design.y, config.kind, lambda);
      fe.predictor.target = config.metric;
      models_.emplace(c.id, std::move(fe));
    } catch (const Error& e) {
      skipped_.push_back(c.id.str() + ": " + e.what());
    }
  }
}

const FirmExplainer* ExplainModelSet::find(const CompanyId& id) const {
  auto it = models_.find(id);
  return it == models_.end() ? nullptr : &it->second;
}

std::optional<Attribution> ExplainModelSet::attribution_at(const CompanyId& id, int t) const {
  const auto* fe = find(id);
  if (fe == nullptr) return std::nullopt;
  const auto& ts = fe->design.timestamps;
  auto it = std::find(ts.begin(), ts.end(), t);
  if (it == ts.end()) return std::nullopt;
  const auto row = static_cast<Eigen::Index>(it - ts.begin());
  return shapley(fe->predictor, fe->design.X.row(row).transpose(), fe->design.space);
}

SoilSummary group_soil(const ExplainModelSet& models, const CompanyId& focal, std::string industry,
                       const std::vector<CompanyId>& group, int t) {
  SoilSummary soil;
  soil.industry = std::move(industry);
  soil.members = group;
  if (group.empty()) return soil;
  const auto& perf = models.performance().at(static_cast<std::size_t>(t));
  double perfSum = 0.0;
  double contribution = 0.0;
  int counted = 0;
  for (const auto& m : group) {
    perfSum += perf.at(m);
    auto attr = models.attribution_at(m, t);
    if (!attr) {
      soil.missingPredictors.push_back(m);
      continue;
    }
    ++counted;
    if (auto col = models.find(m)->design.space.presence_column(focal)) {
      contribution += attr->phi(static_cast<Eigen::Index>(*col));
    }
  }
  soil.groupMeanPerformance = perfSum / static_cast<double>(group.size());
  soil.focalContribution = counted > 0 ? contribution / counted : 0.0;
  soil.polarity = soil.focalContribution > 0 ? 1 : (soil.focalContribution < 0 ? -1 : 0);
  soil.magnitude = std::abs(soil.focalContribution);
  return soil;
}

void normalize_soil(std::vector<SoilSummary>& groups) {
  double maxAbs = 0.0;
  for (const auto& g : groups) maxAbs = std::max(maxAbs, std::abs(g.focalContribution));
  for (auto& g : groups) g.magnitude = maxAbs > 0.0 ? std::abs(g.focalContribution) / maxAbs : 0.0;
}

std::vector<ExplainSelectionEntry> explain_model_report(const Timeline& timeline, MetricKind metric,
                                                        const std::vector<ExplainModelKind>& kinds, double lambda) {
  std::vector<ExplainSelectionEntry> out;
  for (auto k : kinds) out.push_back(ExplainSelectionEntry{k, {}, {}});
  const auto perf = performance_series(timeline, metric);
  std::vector<int> all(static_cast<std::size_t>(timeline.size()));
  for (int t = 0; t < timeline.size(); ++t) all[static_cast<std::size_t>(t)] = t;
  for (const auto& c : timeline.dataset().companies) {
    DesignMatrix dm;
    try {
      dm = build_design_matrix(timeline, perf, c.id, all);
    } catch (const Error&) {
      continue;
    }
    for (auto& entry : out) {
      for (Eigen::Index i = 0; i < dm.X.rows(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        auto p = fit_explainer(drop_row(dm.X, i), drop_row(dm.y, i), entry.kind, lambda);
        const double predicted = p.predict(dm.X.row(i).transpose());
        const auto stop = std::chrono::steady_clock::now();
        entry.absErrors.push_back(std::abs(predicted - dm.y(i)));
        entry.runtimesMicros.push_back(std::chrono::duration<double, std::micro>(stop - start).count());
      }
    }
  }
  return out;
}

}  // namespace scsim
