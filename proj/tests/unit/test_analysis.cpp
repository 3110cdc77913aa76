#include <doctest.h>

#include <random>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "../support/scenarios.hpp"
#include "scsim/core/network.hpp"
#include "scsim/evaluation.hpp"
#include "scsim/experiment.hpp"
#include "scsim/explain.hpp"
#include "scsim/layout.hpp"
#include "scsim/query.hpp"
#include "scsim/shapley.hpp"

using namespace scsim;

namespace {

Dataset tie_heavy(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> values;
  for (int i = 0; i < n * 3; ++i) values.push_back(static_cast<double>(rng() % 4) * 10.0);
  return fixture::build(n, 1, {}, {"A", "B", "C"}, [&](int c, int, int f) { return values[static_cast<std::size_t>(c * 3 + f)]; });
}

}  // namespace

TEST_CASE("query ranking matches exhaustive scoring, ties included") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  const std::vector<std::string> names{"Operation", "Technology", "Reputation"};
  for (int trial = 0; trial < 500; ++trial) {
    const auto ds = tie_heavy(12, static_cast<std::uint64_t>(trial));
    QueryConstraint q;
    for (const auto& name : names)
      if (rng() % 3 != 0) q.weightedScores.push_back({name, trial % 5 == 0 ? 1.0 : std::round(w(rng) * 4) / 4});
    if (rng() % 2) q.industrySet = {"A", "C"};
    const CompanySet exclude{fixture::id(static_cast<int>(rng() % 12)), fixture::id(static_cast<int>(rng() % 12))};
    const int k = 1 + static_cast<int>(rng() % 8);
    const Eigen::MatrixXd features = ds.feature_matrix(0);
    const auto got = query_candidates(ds, features, q, exclude, k);
    const auto want = oracle::query(ds, features, q, exclude, k);
    REQUIRE(got.candidates.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK(got.candidates[i].id == want[i].id);
      CHECK(got.candidates[i].score == doctest::Approx(want[i].score).epsilon(1e-12));
    }
  }
}

TEST_CASE("query edge cases") {
  const auto ds = tie_heavy(4, 1);
  QueryConstraint q{{"Nowhere"}, {{"Operation", 1.0}}};
  const auto empty = query_candidates(ds, 0, q, {});
  CHECK(empty.emptyPool);
  CHECK(empty.candidates.empty());
  CHECK_THROWS_AS(query_candidates(ds, 0, {{}, {{"Size", 1.0}}}, {}), Error);
  CHECK_THROWS_AS(query_candidates(ds, 0, {{}, {}}, {}, 0), Error);
  const auto ex = exclusion_set(EdgeSet{{fixture::id(0), fixture::id(1)}}, fixture::id(1));
  CHECK(ex == CompanySet{fixture::id(0), fixture::id(1)});
}

TEST_CASE("linear shapley is exact and efficient") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    Eigen::VectorXd coef(n), x(n), base(n);
    for (int i = 0; i < n; ++i) coef(i) = g(rng), x(i) = g(rng), base(i) = g(rng);
    const double b0 = g(rng);
    const auto attr = linear_shapley(b0, coef, x, base);
    auto f = [&](const oracle::Vec& z) {
      double s = b0;
      for (int i = 0; i < n; ++i) s += coef(i) * z[static_cast<std::size_t>(i)];
      return s;
    };
    const auto ref = oracle::shapley_exhaustive(f, {x.data(), x.data() + n}, {base.data(), base.data() + n});
    for (int i = 0; i < n; ++i) CHECK(attr.phi(i) == doctest::Approx(ref[static_cast<std::size_t>(i)]).epsilon(1e-12));
    CHECK(attr.baseValue + attr.phi.sum() == doctest::Approx(attr.prediction).epsilon(1e-12));
  }
  CHECK_THROWS_AS(linear_shapley(0, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)),
                  Error);
}

TEST_CASE("sampled shapley approaches the exhaustive values") {
  auto model = [](const Eigen::VectorXd& z) { return z(0) * z(1) + std::sin(z(2)) + z(3) * z(3) * z(4) - 0.5 * z(5); };
  Eigen::VectorXd x(6), base(6);
  x << 1.0, 2.0, 0.5, -1.0, 1.5, 2.0;
  base << 0.0, -0.5, 1.0, 0.5, 0.0, 1.0;
  const auto attr = sampled_shapley(model, x, base, kDefaultShapleyPermutations, 42);
  const auto ref = oracle::shapley_exhaustive(
      [&](const oracle::Vec& z) { return model(Eigen::Map<const Eigen::VectorXd>(z.data(), 6)); },
      {x.data(), x.data() + 6}, {base.data(), base.data() + 6});
  for (int i = 0; i < 6; ++i) CHECK(std::abs(attr.phi(i) - ref[static_cast<std::size_t>(i)]) < 0.02);
  CHECK(attr.baseValue + attr.phi.sum() == doctest::Approx(model(x)).epsilon(1e-12));
  const auto again = sampled_shapley(model, x, base, kDefaultShapleyPermutations, 42);
  CHECK(again.phi == attr.phi);
}

TEST_CASE("gwet ac1 matches the term-by-term definition") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int items = 1 + static_cast<int>(rng() % 12), raters = 2 + static_cast<int>(rng() % 6);
    DecisionMatrix m;
    for (int i = 0; i < items; ++i) {
      std::vector<int> row;
      for (int r = 0; r < raters; ++r) row.push_back(1 + static_cast<int>(rng() % 3));
      m.ratings.push_back(row);
    }
    CHECK(gwet_ac1(m) == doctest::Approx(oracle::gwet_ac1(m.ratings, 3)).epsilon(1e-12));

    // Category relabeling leaves the coefficient unchanged.
    DecisionMatrix p = m;
    for (auto& row : p.ratings)
      for (int& v : row) v = v % 3 + 1;
    CHECK(gwet_ac1(p) == doctest::Approx(gwet_ac1(m)).epsilon(1e-12));
  }
}

TEST_CASE("gwet ac1 edge cases") {
  DecisionMatrix all{3, {{3, 3, 3}, {3, 3, 3}}};
  CHECK(gwet_ac1(all) == 1.0);
  DecisionMatrix mixed{3, {{1, 1}, {2, 2}, {3, 3}}};
  CHECK(gwet_ac1(mixed) == doctest::Approx(1.0));
  CHECK_THROWS_AS(gwet_ac1(DecisionMatrix{3, {}}), Error);
  CHECK_THROWS_AS(gwet_ac1(DecisionMatrix{3, {{1}}}), Error);
  CHECK_THROWS_AS(gwet_ac1(DecisionMatrix{3, {{1, 4}}}), Error);
  CHECK_THROWS_AS(gwet_ac1(DecisionMatrix{3, {{1, 2}, {1}}}), Error);
}

TEST_CASE("consistency ratio bands") {
  CHECK(cr_band(1.0) == CrBand::High);
  CHECK(cr_band(0.81) == CrBand::High);
  CHECK(cr_band(0.8) == CrBand::Medium);
  CHECK(cr_band(0.61) == CrBand::Medium);
  CHECK(cr_band(0.6) == CrBand::Low);
  CHECK(cr_band(0.0) == CrBand::Low);

  using D = EdgeDecision;
  const CompanyId f = fixture::id(0);
  auto slot = [&](int j) { return SlotKey{f, Edge{f, fixture::id(j)}}; };
  std::map<SlotKey, std::vector<D>> m;
  m[slot(1)] = {D::Keep, D::Keep, D::Keep, D::Keep, D::Keep};       // 1.0
  m[slot(2)] = {D::Add, D::Add, D::Add, D::Add, D::Keep};           // 0.8
  m[slot(3)] = {D::Remove, D::Remove, D::Remove, D::Keep, D::Add};  // 0.6
  const auto rep = consistency_ratios(m);
  CHECK(rep.slotCr.at(slot(1)) == 1.0);
  CHECK(rep.slotCr.at(slot(2)) == doctest::Approx(0.8));
  CHECK(rep.slotCr.at(slot(3)) == doctest::Approx(0.6));
  CHECK(rep.bands.high == doctest::Approx(1.0 / 3));
  CHECK(rep.bands.medium == doctest::Approx(1.0 / 3));
  CHECK(rep.bands.low == doctest::Approx(1.0 / 3));
  CHECK(rep.firmCr.at(f) == doctest::Approx(0.8));

  const auto pooled = consistency_ratios(m, CrPooling::PooledFirm);
  CHECK(pooled.firmCr.at(f) == doctest::Approx(7.0 / 15));
  CHECK(pooled.bands.low == 1.0);
  CHECK_THROWS_AS(consistency_ratios({{slot(1), {D::Add}}}), Error);
}

TEST_CASE("confusion metrics and edge dynamics") {
  CompanySet universe;
  for (int i = 1; i <= 6; ++i) universe.insert(fixture::id(i));
  const CompanySet pred{fixture::id(1), fixture::id(2), fixture::id(3)}, obs{fixture::id(2), fixture::id(3), fixture::id(4)};
  const auto m = confusion_metrics(pred, obs, universe);
  CHECK(m.tp == 2);
  CHECK(m.fp == 1);
  CHECK(m.fn == 1);
  CHECK(m.tn == 2);
  CHECK(m.acc == doctest::Approx(4.0 / 6));
  CHECK(m.f1 == doctest::Approx(2.0 / 3));
  const auto none = confusion_metrics({}, {}, universe);
  CHECK(none.precision == 0);
  CHECK(none.recall == 0);
  CHECK(none.f1 == 0);
  CHECK(none.acc == 1);

  const Edge a{fixture::id(0), fixture::id(1)}, b{fixture::id(0), fixture::id(2)}, c{fixture::id(0), fixture::id(3)},
      d{fixture::id(0), fixture::id(4)};
  const auto dyn = edge_dynamics({a, b}, {b, c}, {a, b, c, d});
  CHECK(dyn.size() == 3);
  CHECK(dyn.at(a) == EdgeDecision::Remove);
  CHECK(dyn.at(b) == EdgeDecision::Keep);
  CHECK(dyn.at(c) == EdgeDecision::Add);
}

TEST_CASE("scripted experiment reproduces hand-computed metrics") {
  auto s = fixture::eval_scenario();
  const auto res = run_experiment(s.dataset, s.factory, s.focal, s.config);
  const auto& r = res.report;
  CHECK(r.runs == 3);
  CHECK(r.items == 5);
  CHECK(r.ac1 == doctest::Approx(29.0 / 59).epsilon(1e-12));
  CHECK(r.crBands.high == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r.crBands.medium == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.crBands.low == 0.0);
  CHECK(r.firmCr.at(fixture::id(0)) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.acc == doctest::Approx(11.0 / 15).epsilon(1e-12));
  CHECK(r.precision == doctest::Approx(7.0 / 9).epsilon(1e-12));
  CHECK(r.recall == doctest::Approx(7.0 / 9).epsilon(1e-12));
  CHECK(r.f1 == doctest::Approx(7.0 / 9).epsilon(1e-12));
  CHECK(eval_report_json(r).contains("AC1"));
  CHECK(eval_report_csv(r).rfind("ACC,Precision,Recall,F1,AC1", 0) == 0);
}

TEST_CASE("experiment argument checks") {
  auto s = fixture::eval_scenario();
  auto cfg = s.config;
  cfg.historyLen = 5;
  CHECK_THROWS_AS(run_experiment(s.dataset, s.factory, s.focal, cfg), Error);
  cfg = s.config;
  cfg.runs = 4;
  CHECK_THROWS_AS(run_experiment(s.dataset, s.factory, {fixture::id(0), fixture::id(1), fixture::id(2)}, cfg), Error);
  CHECK_THROWS_AS(run_experiment(s.dataset, s.factory, {CompanyId("ghost")}, s.config), Error);
}

TEST_CASE("explain design matrix, fit and attribution") {
  auto ds = std::make_shared<const Dataset>(fixture::random(6, 8, 0.3, 12));
  const Timeline tl(ds);
  const auto perf = performance_series(tl, MetricKind::PageRank);
  REQUIRE(perf.size() == 8);
  std::vector<int> ts(8);
  for (int t = 0; t < 8; ++t) ts[static_cast<std::size_t>(t)] = t;
  const auto focal = fixture::id(2);
  const auto dm = build_design_matrix(tl, perf, focal, ts);
  CHECK(dm.X.rows() == 8);
  CHECK(dm.space.ownCount == 3);
  CHECK(dm.space.names[3] == "supplier_count");
  CompanySet partners;
  for (int t = 0; t < 8; ++t)
    for (const auto& p : partners_of(*ds->network.at(t), focal)) partners.insert(p);
  CHECK(dm.space.partners == std::vector<CompanyId>(partners.begin(), partners.end()));
  for (int t = 0; t < 8; ++t) {
    CHECK(dm.y(t) == perf[static_cast<std::size_t>(t)].at(focal));
    CHECK(dm.X(t, 3) == static_cast<double>(suppliers_of(*ds->network.at(t), focal).size()));
  }

  const auto pred = fit_explainer(dm.X, dm.y, ExplainModelKind::Lasso, 0.001);
  const Eigen::VectorXd x = dm.X.row(4).transpose();
  const auto attr = shapley(pred, x, dm.space);
  CHECK(attr.baseValue + attr.phi.sum() == doctest::Approx(pred.predict(x)).epsilon(1e-12));
  const double ir = influence_ratio(attr, dm.space, suppliers_of(*ds->network.at(4), focal),
                                    customers_of(*ds->network.at(4), focal));
  CHECK(ir >= 0.0);
  CHECK(ir <= 1.0);
  CHECK_THROWS_AS(build_design_matrix(tl, perf, focal, {0, 1}), Error);
  CHECK_THROWS_AS(parse_explain_model_kind("gradient_boosting"), Error);
}

TEST_CASE("influence ratio splits partner attributions by side") {
  ExplainFeatureSpace space;
  space.ownCount = 1;
  space.partners = {CompanyId("C"), CompanyId("S")};
  space.names = {"Operation", "supplier_count", "customer_count", "partner:C", "partner:S"};
  Attribution a;
  a.names = space.names;
  a.phi = Eigen::VectorXd(5);
  a.phi << 9.0, 9.0, 9.0, -3.0, 1.0;
  CHECK(influence_ratio(a, space, {CompanyId("S")}, {CompanyId("C")}) == doctest::Approx(0.75));
  CHECK(influence_ratio(a, space, {}, {}) == 0.5);
}

TEST_CASE("global embedding is centered, deterministic and bounded") {
  auto ds = std::make_shared<const Dataset>(fixture::random(7, 4, 0.25, 30));
  const Timeline tl(ds);
  const auto e = global_embedding(tl);
  REQUIRE(e.points.size() == 28);
  double sx = 0, sy = 0;
  for (const auto& p : e.points) sx += p.x, sy += p.y;
  CHECK(std::abs(sx) < 1e-9);
  CHECK(std::abs(sy) < 1e-9);
  CHECK(e.eigenvalues(0) >= e.eigenvalues(1));
  CHECK(global_embedding_json(e).dump() == global_embedding_json(global_embedding(tl)).dump());
  const auto doc = global_embedding_json(e);
  REQUIRE(doc["panels"].size() == 4);
  std::size_t seen = 0;
  for (const auto& panel : doc["panels"])
    for (const auto& p : panel["points"]) {
      ++seen;
      CHECK(p["x"].get<double>() >= 0.0);
      CHECK(p["x"].get<double>() <= 1.0);
      CHECK(p["y"].get<double>() >= 0.0);
      CHECK(p["y"].get<double>() <= 1.0);
    }
  CHECK(seen == 28);

  auto flat = std::make_shared<const Dataset>(
      fixture::build(3, 2, {}, {"A"}, [](int, int, int) { return 5.0; }));
  CHECK(global_embedding(Timeline(flat)).degenerate);
}

TEST_CASE("focus layout shares suppliers by set intersection") {
  auto ds = std::make_shared<const Dataset>(fixture::random(8, 6, 0.3, 44));
  const Timeline tl(ds);
  ExplainConfig cfg;
  cfg.lambda = 0.01;
  const ExplainModelSet models(tl, cfg);
  const std::vector<CompanyId> focal{fixture::id(0), fixture::id(3), fixture::id(5)};
  const auto layout = focus_layout(tl, models, focal, 2, 5);
  CHECK(layout.panels.size() == 12);

  std::set<std::tuple<CompanyId, CompanyId, CompanyId, int>> want, got;
  for (int t = 2; t <= 5; ++t)
    for (std::size_t a = 0; a < focal.size(); ++a)
      for (std::size_t b = a + 1; b < focal.size(); ++b) {
        const auto sa = suppliers_of(*ds->network.at(t), focal[a]);
        const auto sb = suppliers_of(*ds->network.at(t), focal[b]);
        for (const auto& s : sa)
          if (sb.count(s)) want.insert(std::tuple{focal[a], focal[b], s, t});
      }
  for (const auto& l : layout.sharedSupplierLinks) got.insert(std::tuple{l.focalA, l.focalB, l.supplier, l.t});
  CHECK(got == want);
  CHECK(got.size() == layout.sharedSupplierLinks.size());

  for (const auto& panel : layout.panels) {
    CHECK(panel.glyph.xPosition >= 0.0);
    CHECK(panel.glyph.xPosition <= 1.0);
    for (const auto* side : {&panel.supplierGroups, &panel.customerGroups}) {
      double maxAbs = 0, maxPhi = 0;
      for (const auto& g : *side)
        for (const auto& b : g.berries) {
          maxAbs = std::max(maxAbs, std::abs(b.offset));
          maxPhi = std::max(maxPhi, std::abs(b.phi));
        }
      CHECK(maxAbs <= 1.0 + 1e-12);
      if (maxPhi > 0) {
        CHECK(maxAbs == doctest::Approx(1.0));
        // Offsets depend only on the ratio of attributions.
        for (const auto& g : *side)
          for (const auto& b : g.berries) CHECK(b.offset == doctest::Approx(b.phi / maxPhi));
      }
    }
  }
  CHECK(focus_layout_json(layout, ds->featureNames).dump() ==
        focus_layout_json(focus_layout(tl, models, focal, 2, 5), ds->featureNames).dump());
  CHECK_THROWS_AS(focus_layout(tl, models, {CompanyId("ghost")}, 0, 1), Error);
  CHECK_THROWS_AS(focus_layout(tl, models, focal, 0, 9), Error);
}
