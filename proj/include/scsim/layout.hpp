#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scsim/core/timeline.hpp"
#include "scsim/explain.hpp"

namespace scsim {

inline constexpr const char* kLayoutVersion = "layout/v1";

/// Raw embedding rows, one per (company, frame) in frame-major order:
///   own features, mean supplier features, mean customer features (zeros when
///   there are none), log(1 + supplier count), log(1 + customer count).
Eigen::MatrixXd embedding_rows(const Timeline& timeline, std::vector<std::string>* columnNames = nullptr);

struct EmbeddingPoint {
  CompanyId id;
  int t = 0;
  double x = 0.0;
  double y = 0.0;
};

struct GlobalEmbedding {
  std::vector<EmbeddingPoint> points;  // frame-major, companies in dataset order
  std::vector<std::string> labels;     // per frame
  std::vector<std::string> columns;    // standardized columns that were kept
  Eigen::Vector2d eigenvalues = Eigen::Vector2d::Zero();
  bool degenerate = false;
};

/// Columns are standardized (population variance) and constant ones dropped,
/// then all rows are projected jointly onto the top two principal axes, each
/// sign-fixed so its largest-magnitude loading is positive. When every row is
/// identical all coordinates are 0 and the result is flagged degenerate.
/// Throws Errc::InvalidConfig (fewer than 2 companies or no frames).
GlobalEmbedding global_embedding(const Timeline& timeline);

/// layout/v1 document. Coordinates are mapped to [0,1] using bounds shared by
/// all panels, so positions are comparable across timestamps.
nlohmann::json global_embedding_json(const GlobalEmbedding& e);

struct Berry {
  CompanyId id;
  double performance = 0.0;
  double phi = 0.0;
  /// phi / max|phi| over the side; positive moves toward the focal firm.
  double offset = 0.0;
  Lifecycle lifecycle = Lifecycle::Maintain;
  bool missingAttribution = false;
};

struct IndustryGroup {
  std::string industry;
  SoilSummary soil;
  std::vector<Berry> berries;
};

struct FocalGlyph {
  double performance = 0.0;
  double performanceRadius = 0.0;  // performance / largest focal performance in the layout
  std::vector<double> featureArcs; // features / 100, in feature order
  double xPosition = 0.5;          // influence ratio, 0 = supplier driven
  bool missingAttribution = false;
};

struct FocusPanel {
  CompanyId focal;
  int t = 0;
  std::string label;
  FocalGlyph glyph;
  std::vector<IndustryGroup> supplierGroups;
  std::vector<IndustryGroup> customerGroups;
};

struct SharedSupplierLink {
  CompanyId focalA;
  CompanyId focalB;
  CompanyId supplier;
  int t = 0;

  friend bool operator==(const SharedSupplierLink&, const SharedSupplierLink&) = default;
};

struct FocusLayout {
  std::vector<FocusPanel> panels;  // focal-major, then t
  std::vector<SharedSupplierLink> sharedSupplierLinks;
  std::vector<std::string> warnings;
};

/// Berry-orchard layout of each focal firm over frames [tFirst, tLast].
/// Partners are grouped by industry on the supplier (left) and customer
/// (right) side. Missing attributions leave berries at offset 0 and are
/// flagged. Throws Errc::UnknownCompany, Errc::TimestampOutOfRange.
FocusLayout focus_layout(const Timeline& timeline, const ExplainModelSet& models,
                         const std::vector<CompanyId>& focalIds, int tFirst, int tLast);

nlohmann::json focus_layout_json(const FocusLayout& layout, const std::vector<std::string>& featureNames);

}  // namespace scsim
