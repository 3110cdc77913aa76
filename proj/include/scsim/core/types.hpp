#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace scsim {

/// Opaque firm identifier, e.g. "Company-4838".
class CompanyId {
 public:
  CompanyId() = default;
  explicit CompanyId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const CompanyId&, const CompanyId&) = default;
  friend bool operator==(const CompanyId&, const CompanyId&) = default;

  friend std::ostream& operator<<(std::ostream& os, const CompanyId& id) { return os << id.value_; }

 private:
  std::string value_;
};

using CompanySet = std::set<CompanyId>;

/// Directed supplier -> customer relationship.
struct Edge {
  CompanyId supplier;
  CompanyId customer;

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;
};

using EdgeSet = std::set<Edge>;

/// Immutable edge set shared between timelines and path nodes.
using Snapshot = std::shared_ptr<const EdgeSet>;

inline Snapshot make_snapshot(EdgeSet edges) {
  return std::make_shared<const EdgeSet>(std::move(edges));
}

struct Timestamp {
  int index = 0;
  std::string label;
};

enum class Lifecycle { Initiate, Maintain, Terminate };

std::string_view to_string(Lifecycle stage) noexcept;

/// Global plus per-firm free-text guidance fed to agents.
struct KnowledgeBase {
  std::string global;
  std::map<CompanyId, std::string> firm;

  const std::string& of(const CompanyId& id) const {
    static const std::string kEmpty;
    auto it = firm.find(id);
    return it == firm.end() ? kEmpty : it->second;
  }

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

}  // namespace scsim

template <>
struct std::hash<scsim::CompanyId> {
  std::size_t operator()(const scsim::CompanyId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
