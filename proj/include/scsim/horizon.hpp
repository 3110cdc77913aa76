#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scsim/core/timeline.hpp"

namespace scsim {

enum class SeriesModelKind { Linear, Lasso };

/// "linear" | "lasso". Tree ensembles have no built-in implementation and
/// report Errc::UnknownModel like any other unregistered name.
SeriesModelKind parse_series_model_kind(std::string_view name);
std::string_view to_string(SeriesModelKind kind) noexcept;

/// Autoregressive one-step forecaster: next = intercept + coef . window.
struct ExtenderModel {
  SeriesModelKind kind = SeriesModelKind::Linear;
  int window = 1;
  double lambda = 0.0;
  double intercept = 0.0;
  Eigen::VectorXd coef;
};

/// Fits on all sliding windows of length w (inputs) and the value after each
/// (target). Linear is least squares (minimum-norm when under-determined);
/// Lasso is coordinate descent to 1e-8 with at most 10,000 sweeps.
/// Throws Errc::SeriesTooShort (fewer than w + 1 points or w < 1),
/// Errc::NonFiniteValue, Errc::InvalidConfig (lambda < 0).
ExtenderModel fit_extender(std::span<const double> series, SeriesModelKind kind, int w, double lambda = 0.0);

/// Unclamped prediction from the last `window` values of `series`.
double predict_next(const ExtenderModel& model, std::span<const double> series);

/// One-step prediction clamped to the [0, 100] feature scale.
/// Throws Errc::SeriesTooShort.
double extend(const ExtenderModel& model, std::span<const double> series);

/// Iterated extension: each prediction is appended before the next step.
std::vector<double> extend_steps(const ExtenderModel& model, std::vector<double> series, int steps);

struct HorizonConfig {
  SeriesModelKind kind = SeriesModelKind::Linear;
  int window = 4;
  double lambda = 0.1;
};

/// Forecast every firm's features one frame past the end of the timeline.
/// Series shorter than window + 1 shrink the window to fit; a single-point
/// series carries its value forward.
Eigen::MatrixXd extend_features(const Timeline& timeline, const HorizonConfig& config);

struct BoxStats {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

/// Box-plot five-number summary using linalg::quantile.
BoxStats box_stats(const std::vector<double>& samples);

struct ModelSelectionEntry {
  SeriesModelKind kind = SeriesModelKind::Linear;
  std::vector<double> absErrors;
  std::vector<double> runtimesMicros;
  BoxStats errorBox;
  BoxStats runtimeBox;
};

struct ModelSelectionReport {
  std::vector<ModelSelectionEntry> entries;
  /// "<company>/<feature>: reason" for series that could not be evaluated.
  std::vector<std::string> skipped;
};

/// Rolling-origin evaluation: for fold f = 1..folds, fit on the first n - f
/// points of each firm/feature series and score the absolute error at point
/// n - f. The window shrinks to n - folds - 1 when needed.
/// Throws Errc::InvalidConfig (folds < 2).
ModelSelectionReport model_selection_report(const Dataset& ds, const std::vector<SeriesModelKind>& kinds,
                                            int folds, int window = 4, double lambda = 0.1);

}  // namespace scsim
