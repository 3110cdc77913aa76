#include "scsim/horizon.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "scsim/error.hpp"
#include "scsim/linalg.hpp"

namespace scsim {

SeriesModelKind parse_series_model_kind(std::string_view name) {
  if (name == "linear") return SeriesModelKind::Linear;
  if (name == "lasso") return SeriesModelKind::Lasso;
  throw Error(Errc::UnknownModel, std::string(name));
}

std::string_view to_string(SeriesModelKind kind) noexcept {
  return kind == SeriesModelKind::Lasso ? "lasso" : "linear";
}

ExtenderModel fit_extender(std::span<const double> series, SeriesModelKind kind, int w, double lambda) {
  if (w < 1 || series.size() < static_cast<std::size_t>(w) + 1) {
    throw Error(Errc::SeriesTooShort, "need at least " + std::to_string(w + 1) + " points, got " +
                                          std::to_string(series.size()));
  }
  if (lambda < 0.0) throw Error(Errc::InvalidConfig, "lambda must be >= 0");
  for (double v : series) {
    if (!std::isfinite(v)) throw Error(Errc::NonFiniteValue, "series value");
  }
  const auto samples = static_cast<Eigen::Index>(series.size()) - w;
  Eigen::MatrixXd X(samples, w);
  Eigen::VectorXd y(samples);
  for (Eigen::Index i = 0; i < samples; ++i) {
    for (int j = 0; j < w; ++j) X(i, j) = series[static_cast<std::size_t>(i + j)];
    y(i) = series[static_cast<std::size_t>(i + w)];
  }

  ExtenderModel model;
  model.kind = kind;
  model.window = w;
  model.lambda = lambda;
  if (kind == SeriesModelKind::Linear) {
    auto fit = linalg::least_squares(X, y);
    model.intercept = fit.intercept;
    model.coef = std::move(fit.coef);
  } else {
    auto fit = linalg::lasso(X, y, lambda, 1e-8, 10000);
    model.intercept = fit.intercept;
    model.coef = std::move(fit.coef);
  }
  return model;
}

double predict_next(const ExtenderModel& model, std::span<const double> series) {
  if (series.size() < static_cast<std::size_t>(model.window)) {
    throw Error(Errc::SeriesTooShort, "need " + std::to_string(model.window) + " points to predict");
  }
  auto tail = series.subspan(series.size() - static_cast<std::size_t>(model.window));
  double v = model.intercept;
  for (int j = 0; j < model.window; ++j) v += model.coef(j) * tail[static_cast<std::size_t>(j)];
  return v;
}

double extend(const ExtenderModel& model, std::span<const double> series) {
  return std::clamp(predict_next(model, series), 0.0, 100.0);
}

std::vector<double> extend_steps(const ExtenderModel& model, std::vector<double> series, int steps) {
  std::vector<double> out;
  for (int s = 0; s < steps; ++s) {
    const double next = extend(model, series);
    out.push_back(next);
    series.push_back(next);
  }
  return out;
}

Eigen::MatrixXd extend_features(const Timeline& timeline, const HorizonConfig& config) {
  const auto& ds = timeline.dataset();
  const int last = timeline.size() - 1;
  const auto N = static_cast<Eigen::Index>(ds.company_count());
  const auto F = static_cast<Eigen::Index>(ds.feature_count());
  Eigen::MatrixXd next(N, F);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index k = 0; k < F; ++k) {
      auto series = timeline.series(static_cast<std::size_t>(i), static_cast<std::size_t>(k), last);
      const int w = std::min(config.window, static_cast<int>(series.size()) - 1);
      if (w < 1) {
        next(i, k) = series.back();
        continue;
      }
      auto model = fit_extender(series, config.kind, w, config.lambda);
      next(i, k) = extend(model, series);
    }
  }
  return next;
}

BoxStats box_stats(const std::vector<double>& samples) {
  BoxStats b;
  if (samples.empty()) return b;
  b.min = *std::min_element(samples.begin(), samples.end());
  b.max = *std::max_element(samples.begin(), samples.end());
  b.q1 = linalg::quantile(samples, 0.25);
  b.median = linalg::quantile(samples, 0.5);
  b.q3 = linalg::quantile(samples, 0.75);
  return b;
}

ModelSelectionReport model_selection_report(const Dataset& ds, const std::vector<SeriesModelKind>& kinds,
                                            int folds, int window, double lambda) {
  if (folds < 2) throw Error(Errc::InvalidConfig, "folds must be >= 2");
  ModelSelectionReport report;
  for (auto kind : kinds) report.entries.push_back(ModelSelectionEntry{kind, {}, {}, {}, {}});

  const int n = ds.horizon();
  const int w = std::min(window, n - folds - 1);
  for (const auto& c : ds.companies) {
    for (std::size_t k = 0; k < ds.feature_count(); ++k) {
      if (w < 1) {
        report.skipped.push_back(c.id.str() + "/" + ds.featureNames[k] + ": " +
                                 std::string(to_string(Errc::SeriesTooShort)));
        continue;
      }
      std::vector<double> series(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t) series[static_cast<std::size_t>(t)] = c.features(t, static_cast<Eigen::Index>(k));
      for (auto& entry : report.entries) {
        for (int f = 1; f <= folds; ++f) {
          const auto train = std::span<const double>(series).first(static_cast<std::size_t>(n - f));
          const auto start = std::chrono::steady_clock::now();
          auto model = fit_extender(train, entry.kind, w, lambda);
          const double predicted = extend(model, train);
          const auto stop = std::chrono::steady_clock::now();
          entry.absErrors.push_back(std::abs(predicted - series[static_cast<std::size_t>(n - f)]));
          entry.runtimesMicros.push_back(std::chrono::duration<double, std::micro>(stop - start).count());
        }
      }
    }
  }
  for (auto& entry : report.entries) {
    entry.errorBox = box_stats(entry.absErrors);
    entry.runtimeBox = box_stats(entry.runtimesMicros);
  }
  return report;
}

}  // namespace scsim
