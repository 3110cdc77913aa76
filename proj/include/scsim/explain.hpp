#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scsim/core/timeline.hpp"
#include "scsim/metrics.hpp"
#include "scsim/shapley.hpp"

namespace scsim {

enum class ExplainModelKind { Linear, Lasso };

/// "linear" | "lasso". Throws Errc::UnknownModel.
ExplainModelKind parse_explain_model_kind(std::string_view name);
std::string_view to_string(ExplainModelKind kind) noexcept;

/// Column layout of one firm's explain model:
///   [own features..., supplier_count, customer_count, partner:<id>..., embedding:<k>...]
/// Partner presence columns cover every firm that neighbors the focal firm at
/// any timestamp of the training timeline, in id order.
struct ExplainFeatureSpace {
  std::vector<std::string> names;
  std::size_t ownCount = 0;
  std::vector<CompanyId> partners;
  std::size_t embeddingCount = 0;

  std::size_t supplier_count_column() const { return ownCount; }
  std::size_t customer_count_column() const { return ownCount + 1; }
  std::optional<std::size_t> presence_column(const CompanyId& partner) const;
};

inline std::string presence_feature_name(const CompanyId& id) { return "partner:" + id.str(); }

/// Optional learned structural embedding appended after the presence columns.
/// Returns a vector of fixed length for every (firm, t).
struct EmbeddingProvider {
  std::size_t dimension = 0;
  std::function<Eigen::VectorXd(const Timeline&, const CompanyId&, int)> embed;
};

struct DesignMatrix {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  ExplainFeatureSpace space;
  std::vector<int> timestamps;  // row -> frame index
};

/// Per-frame performance of every firm.
std::vector<PerformanceMap> performance_series(const Timeline& timeline, MetricKind metric);

/// One row per requested timestamp. The target is the focal firm's performance
/// `lag` frames later (rows without a target are dropped).
/// Throws Errc::TooFewSamples (fewer than 3 rows), Errc::UnknownCompany.
DesignMatrix build_design_matrix(const Timeline& timeline, const std::vector<PerformanceMap>& performance,
                                 const CompanyId& focal, const std::vector<int>& timestamps, int lag = 0,
                                 const EmbeddingProvider* embedding = nullptr);

struct Predictor {
  ExplainModelKind kind = ExplainModelKind::Lasso;
  MetricKind target = MetricKind::PageRank;
  double lambda = 0.0;
  double intercept = 0.0;
  Eigen::VectorXd coef;
  Eigen::VectorXd trainingMeans;
  bool ridgeFallback = false;

  double predict(const Eigen::VectorXd& x) const;
};

inline constexpr double kRidgeJitter = 1e-8;

/// Linear: least squares, falling back to ridge with kRidgeJitter when the
/// centered design is rank deficient (flagged on the predictor).
/// Lasso: coordinate descent with the given lambda.
/// Throws Errc::InvalidConfig (lambda < 0), Errc::DimensionMismatch.
Predictor fit_explainer(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, ExplainModelKind kind,
                        double lambda = 0.0);

/// Lambda from `grid` minimizing leave-one-out squared error; ties keep the
/// earlier grid entry.
double select_lambda_loo(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<double>& grid);

/// Exact Shapley values of the (additive) predictor against its training means.
/// Throws Errc::DimensionMismatch.
Attribution shapley(const Predictor& predictor, const Eigen::VectorXd& x, const ExplainFeatureSpace& space);

/// Customer share C / (S + C) of summed |phi| over partner presence features,
/// where S covers current suppliers and C current customers. 0.5 when both are
/// zero. 0 means fully supplier-driven.
double influence_ratio(const Attribution& attr, const ExplainFeatureSpace& space, const CompanySet& suppliers,
                       const CompanySet& customers);

struct ExplainConfig {
  MetricKind metric = MetricKind::PageRank;
  ExplainModelKind kind = ExplainModelKind::Lasso;
  /// Unset: chosen per firm by leave-one-out over `lambdaGrid`.
  std::optional<double> lambda;
  std::vector<double> lambdaGrid{0.001, 0.01, 0.1, 1.0};
  int lag = 0;
  const EmbeddingProvider* embedding = nullptr;
};

struct FirmExplainer {
  CompanyId id;
  DesignMatrix design;
  Predictor predictor;
};

/// Fitted explain models for every firm over one timeline.
class ExplainModelSet {
 public:
  ExplainModelSet() = default;
  ExplainModelSet(const Timeline& timeline, const ExplainConfig& config);

  const std::vector<PerformanceMap>& performance() const noexcept { return performance_; }
  const FirmExplainer* find(const CompanyId& id) const;
  /// Attribution of the firm's prediction at frame t, if it has a model row there.
  std::optional<Attribution> attribution_at(const CompanyId& id, int t) const;
  /// "<id>: reason" for firms without a model.
  const std::vector<std::string>& skipped() const noexcept { return skipped_; }
  std::size_t size() const noexcept { return models_.size(); }

 private:
  std::vector<PerformanceMap> performance_;
  std::map<CompanyId, FirmExplainer> models_;
  std::vector<std::string> skipped_;
};

struct SoilSummary {
  std::string industry;
  std::vector<CompanyId> members;
  double groupMeanPerformance = 0.0;
  double focalContribution = 0.0;
  int polarity = 0;  // sign of focalContribution
  double magnitude = 0.0;
  std::vector<CompanyId> missingPredictors;
};

/// Focal firm's influence on a partner group at t: the mean, over members, of
/// the focal firm's presence contribution in each member's own attribution
/// (0 for members whose model has no such column). Members without a model
/// are skipped and listed. Magnitude is left at |contribution|; call
/// normalize_soil across all groups of the focal firm at t.
SoilSummary group_soil(const ExplainModelSet& models, const CompanyId& focal, std::string industry,
                       const std::vector<CompanyId>& group, int t);

/// Scales magnitudes by the largest |focalContribution| (all zero -> 0).
void normalize_soil(std::vector<SoilSummary>& groups);

struct ExplainSelectionEntry {
  ExplainModelKind kind = ExplainModelKind::Lasso;
  std::vector<double> absErrors;
  std::vector<double> runtimesMicros;
};

/// Leave-one-out absolute prediction errors and fit times per firm, for the
/// model-selection box plots.
std::vector<ExplainSelectionEntry> explain_model_report(const Timeline& timeline, MetricKind metric,
                                                        const std::vector<ExplainModelKind>& kinds,
                                                        double lambda = 0.1);

}  // namespace scsim
