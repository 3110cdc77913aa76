#include "scsim/core/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "scsim/error.hpp"

namespace scsim {

std::string_view to_string(Lifecycle stage) noexcept {
  switch (stage) {
    case Lifecycle::Initiate: return "initiate";
    case Lifecycle::Maintain: return "maintain";
    case Lifecycle::Terminate: return "terminate";
  }
  return "maintain";
}

const Snapshot& TemporalNetwork::at(int t) const {
  if (t < 0 || static_cast<std::size_t>(t) >= snapshots_.size()) {
    throw Error(Errc::TimestampOutOfRange,
                "t=" + std::to_string(t) + " outside [0," + std::to_string(snapshots_.size()) + ")");
  }
  return snapshots_[static_cast<std::size_t>(t)];
}

bool TemporalNetwork::contains(const Edge& e, int t) const {
  if (t < 0 || static_cast<std::size_t>(t) >= snapshots_.size()) return false;
  return snapshots_[static_cast<std::size_t>(t)]->contains(e);
}

std::optional<std::size_t> Dataset::find(const CompanyId& id) const {
  auto it = std::lower_bound(companies.begin(), companies.end(), id,
                             [](const CompanyRecord& r, const CompanyId& key) { return r.id < key; });
  if (it == companies.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - companies.begin());
}

std::size_t Dataset::index_of(const CompanyId& id) const {
  if (auto i = find(id)) return *i;
  throw Error(Errc::UnknownCompany, id.str());
}

std::vector<CompanyId> Dataset::ids() const {
  std::vector<CompanyId> out;
  out.reserve(companies.size());
  for (const auto& c : companies) out.push_back(c.id);
  return out;
}

std::size_t Dataset::feature_index(const std::string& name) const {
  auto it = std::find(featureNames.begin(), featureNames.end(), name);
  if (it == featureNames.end()) throw Error(Errc::UnknownFeature, name);
  return static_cast<std::size_t>(it - featureNames.begin());
}

Eigen::MatrixXd Dataset::feature_matrix(int t) const {
  if (t < 0 || t >= horizon()) {
    throw Error(Errc::TimestampOutOfRange, "t=" + std::to_string(t));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(companies.size()),
                    static_cast<Eigen::Index>(featureNames.size()));
  for (std::size_t i = 0; i < companies.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = companies[i].features.row(t);
  }
  return m;
}

KnowledgeBase Dataset::knowledge() const {
  KnowledgeBase kb;
  kb.global = globalKnowledge;
  for (const auto& c : companies) {
    if (!c.knowledge.empty()) kb.firm[c.id] = c.knowledge;
  }
  return kb;
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.featureNames != b.featureNames || a.timestampLabels != b.timestampLabels ||
      a.globalKnowledge != b.globalKnowledge || a.companies.size() != b.companies.size() ||
      a.network.size() != b.network.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.companies.size(); ++i) {
    const auto& x = a.companies[i];
    const auto& y = b.companies[i];
    if (x.id != y.id || x.industry != y.industry || x.knowledge != y.knowledge ||
        x.features.rows() != y.features.rows() || x.features.cols() != y.features.cols() ||
        !(x.features.array() == y.features.array()).all()) {
      return false;
    }
  }
  for (std::size_t t = 0; t < a.network.size(); ++t) {
    if (*a.network.snapshots()[t] != *b.network.snapshots()[t]) return false;
  }
  return true;
}

void validate(const Dataset& ds) {
  const auto T = ds.horizon();
  if (static_cast<int>(ds.network.size()) != T) {
    throw Error(Errc::ParseError, "network has " + std::to_string(ds.network.size()) +
                                      " snapshots, expected " + std::to_string(T));
  }
  for (std::size_t i = 0; i < ds.companies.size(); ++i) {
    const auto& c = ds.companies[i];
    if (c.id.empty()) throw Error(Errc::ParseError, "empty company id");
    if (i > 0 && !(ds.companies[i - 1].id < c.id)) {
      throw Error(Errc::ParseError, "companies not unique/sorted at " + c.id.str());
    }
    if (c.industry.empty()) throw Error(Errc::ParseError, "empty industry for " + c.id.str());
    if (c.features.rows() != T || c.features.cols() != static_cast<Eigen::Index>(ds.feature_count())) {
      throw Error(Errc::ParseError, "feature matrix shape mismatch for " + c.id.str());
    }
    for (Eigen::Index r = 0; r < c.features.rows(); ++r) {
      for (Eigen::Index k = 0; k < c.features.cols(); ++k) {
        const double v = c.features(r, k);
        if (!std::isfinite(v) || v < 0.0 || v > 100.0) {
          throw Error(Errc::FeatureOutOfRange,
                      c.id.str() + " " + ds.featureNames[static_cast<std::size_t>(k)] + "@" +
                          ds.timestampLabels[static_cast<std::size_t>(r)] + " = " + std::to_string(v));
        }
      }
    }
  }
  for (int t = 0; t < T; ++t) {
    for (const auto& e : *ds.network.at(t)) {
      if (e.supplier == e.customer) throw Error(Errc::SelfEdge, e.supplier.str());
      if (!ds.find(e.supplier) || !ds.find(e.customer)) {
        throw Error(Errc::UnknownCompanyInEdge, e.supplier.str() + "->" + e.customer.str());
      }
    }
  }
}

}  // namespace scsim
