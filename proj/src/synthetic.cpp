#include "scsim/synthetic.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "scsim/error.hpp"

namespace scsim {

namespace {

struct Industry {
  const char* name;
  int tier;
};

constexpr Industry kIndustries[] = {
    {"Raw Materials", 0}, {"Chemicals", 1},   {"Components", 1}, {"Electronics", 2},
    {"Machinery", 2},     {"Automotive", 3},  {"Logistics", 3},  {"Retail", 4},
};

}  // namespace

Dataset generate_synthetic(const SyntheticConfig& config) {
  if (config.companies < 2) throw Error(Errc::InvalidConfig, "need at least 2 companies");
  if (config.companies > 9000) throw Error(Errc::InvalidConfig, "at most 9000 companies");
  if (config.quarters < 1) throw Error(Errc::InvalidConfig, "need at least 1 quarter");
  if (config.retention < 0 || config.retention > 1) throw Error(Errc::InvalidConfig, "retention must be in [0, 1]");
  if (config.formationRate < 0) throw Error(Errc::InvalidConfig, "formationRate must be >= 0");

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int N = config.companies;
  const int T = config.quarters;
  constexpr int F = 3;

  std::set<int> numbers;
  std::uniform_int_distribution<int> pick(1000, 9999);
  while (static_cast<int>(numbers.size()) < N) numbers.insert(pick(rng));

  Dataset ds;
  ds.featureNames = {"Operation", "Technology", "Reputation"};
  for (int t = 0; t < T; ++t) ds.timestampLabels.push_back("Q" + std::to_string(t + 1));
  ds.globalKnowledge =
      "Firms trade along a tiered chain from raw materials to retail. Demand is stable; "
      "supplier quality drives partner retention.";

  constexpr int kIndustryCount = static_cast<int>(std::size(kIndustries));
  std::vector<int> tier(static_cast<std::size_t>(N));
  std::normal_distribution<double> step(0.0, 4.0);
  int k = 0;
  for (int num : numbers) {
    CompanyRecord c;
    c.id = CompanyId("Company-" + std::to_string(num));
    const auto& ind = kIndustries[static_cast<std::size_t>(k % kIndustryCount)];
    c.industry = ind.name;
    tier[static_cast<std::size_t>(k)] = ind.tier;
    c.features.resize(T, F);
    for (int f = 0; f < F; ++f) {
      double v = 30.0 + 50.0 * unit(rng);
      const double drift = (unit(rng) - 0.5) * 3.0;
      for (int t = 0; t < T; ++t) {
        c.features(t, f) = std::round(v * 100.0) / 100.0;
        v = std::clamp(v + drift + step(rng), 0.0, 100.0);
      }
    }
    c.knowledge = c.id.str() + " operates in " + c.industry + ".";
    ds.companies.push_back(std::move(c));
    ++k;
  }

  auto quality = [&](int i, int t) { return ds.companies[static_cast<std::size_t>(i)].features.row(t).mean() / 100.0; };
  auto upstream_of = [&](int i) {
    std::vector<int> out;
    for (int j = 0; j < N; ++j)
      if (tier[static_cast<std::size_t>(j)] + 1 == tier[static_cast<std::size_t>(i)]) out.push_back(j);
    return out;
  };

  std::set<std::pair<int, int>> edges;
  for (int i = 0; i < N; ++i) {
    auto ups = upstream_of(i);
    std::shuffle(ups.begin(), ups.end(), rng);
    const int want = 1 + static_cast<int>(unit(rng) * 2.0);
    for (int s = 0; s < std::min<int>(want, static_cast<int>(ups.size())); ++s) edges.insert({ups[static_cast<std::size_t>(s)], i});
  }

  for (int t = 0; t < T; ++t) {
    if (t > 0) {
      std::set<std::pair<int, int>> next;
      for (const auto& e : edges) {
        const double keep = std::clamp(config.retention + 0.3 * (quality(e.first, t) - 0.55), 0.0, 1.0);
        if (unit(rng) < keep) next.insert(e);
      }
      for (int i = 0; i < N; ++i) {
        if (unit(rng) >= config.formationRate) continue;
        const auto ups = upstream_of(i);
        if (ups.empty()) continue;
        double total = 0.0;
        for (int j : ups) total += quality(j, t);
        double r = unit(rng) * total;
        for (int j : ups) {
          r -= quality(j, t);
          if (r <= 0.0) {
            next.insert({j, i});
            break;
          }
        }
      }
      edges = std::move(next);
    }
    EdgeSet snap;
    for (const auto& [s, c] : edges)
      snap.insert({ds.companies[static_cast<std::size_t>(s)].id, ds.companies[static_cast<std::size_t>(c)].id});
    ds.network.push_back(make_snapshot(std::move(snap)));
  }
  validate(ds);
  return ds;
}

}  // namespace scsim
