#include <doctest.h>

#include <random>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "scsim/horizon.hpp"
#include "scsim/linalg.hpp"
#include "scsim/metrics.hpp"

using namespace scsim;

namespace {

std::vector<std::pair<int, int>> random_edges(int n, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && u(rng) < p) out.emplace_back(a, b);
  return out;
}

EdgeSet to_edges(const std::vector<std::pair<int, int>>& list) {
  EdgeSet s;
  for (auto [a, b] : list) s.insert({fixture::id(a), fixture::id(b)});
  return s;
}

std::vector<CompanyId> ids(int n) {
  std::vector<CompanyId> out;
  for (int i = 0; i < n; ++i) out.push_back(fixture::id(i));
  return out;
}

}  // namespace

TEST_CASE("pagerank matches the linear-system solution") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const auto list = random_edges(n, 0.3, rng);
    const auto out = pagerank(to_edges(list), ids(n));
    const auto expect = oracle::pagerank(list, n);
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      CHECK(out.scores.at(fixture::id(i)) == doctest::Approx(expect[static_cast<std::size_t>(i)]).epsilon(1e-8));
      sum += out.scores.at(fixture::id(i));
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    CHECK(out.converged);
  }
}

TEST_CASE("pagerank is uniform on a directed cycle and ignores foreign edges") {
  EdgeSet cycle;
  for (int i = 0; i < 6; ++i) cycle.insert({fixture::id(i), fixture::id((i + 1) % 6)});
  cycle.insert({fixture::id(0), CompanyId("outsider")});
  const auto out = pagerank(cycle, ids(6));
  for (const auto& [_, v] : out.scores) CHECK(v == doctest::Approx(1.0 / 6).epsilon(1e-12));
}

TEST_CASE("pagerank rejects bad options") {
  CHECK_THROWS_AS(pagerank({}, {}), Error);
  PageRankOptions bad;
  bad.damping = 1.0;
  CHECK_THROWS_AS(pagerank({}, ids(2), bad), Error);
}

TEST_CASE("collaborator count counts distinct partners") {
  const auto edges = to_edges({{0, 1}, {1, 0}, {2, 0}});
  CHECK(collaborator_count(edges, fixture::id(0)) == 2);
  CHECK(collaborator_count(edges, fixture::id(3)) == 0);
  MetricRegistry reg;
  CHECK(reg.contains("pagerank"));
  CHECK(reg.contains("collaborator_count"));
  CHECK_THROWS_AS(reg.compute("betweenness", edges, ids(3)), Error);
}

TEST_CASE("least squares agrees with the normal equations") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 8 + trial % 5, p = 1 + trial % 4;
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    oracle::Mat Xo(static_cast<std::size_t>(n), oracle::Vec(static_cast<std::size_t>(p)));
    oracle::Vec yo(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) Xo[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = X(i, j) = g(rng);
      yo[static_cast<std::size_t>(i)] = y(i) = g(rng);
    }
    const auto fit = linalg::least_squares(X, y);
    const auto ref = oracle::ols_with_intercept(Xo, yo);
    CHECK(fit.intercept == doctest::Approx(ref[0]).epsilon(1e-9));
    for (int j = 0; j < p; ++j) CHECK(fit.coef(j) == doctest::Approx(ref[static_cast<std::size_t>(j) + 1]).epsilon(1e-9));
  }
}

TEST_CASE("lasso solution satisfies the KKT conditions") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 1);
  for (double lambda : {0.01, 0.1, 0.5}) {
    const int n = 30, p = 6;
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) X(i, j) = g(rng);
    Eigen::VectorXd y = 2.0 * X.col(0) - 1.0 * X.col(2);
    for (int i = 0; i < n; ++i) y(i) += 0.1 * g(rng) + 3.0;
    const auto fit = linalg::lasso(X, y, lambda, 1e-12);
    REQUIRE(fit.converged);
    const Eigen::VectorXd r = y.array() - fit.intercept - (X * fit.coef).array();
    CHECK(std::abs(r.mean()) < 1e-9);
    const Eigen::VectorXd grad = X.transpose() * r / n;
    for (int j = 0; j < p; ++j) {
      if (fit.coef(j) != 0.0)
        CHECK(grad(j) == doctest::Approx(lambda * (fit.coef(j) > 0 ? 1 : -1)).epsilon(1e-6));
      else
        CHECK(std::abs(grad(j)) <= lambda + 1e-9);
    }
  }
}

TEST_CASE("quantiles use midpoint plotting positions") {
  const std::vector<double> s{1, 2, 3, 4};
  CHECK(linalg::quantile(s, 0.25) == doctest::Approx(1.5));
  CHECK(linalg::quantile(s, 0.5) == doctest::Approx(2.5));
  CHECK(linalg::quantile(s, 0.75) == doctest::Approx(3.5));
  CHECK(linalg::quantile(s, 0.0) == 1.0);
  CHECK(linalg::quantile(s, 1.0) == 4.0);
  const auto b = box_stats({4, 3, 2, 1});
  CHECK(b.q1 == doctest::Approx(1.5));
  CHECK(b.median == doctest::Approx(2.5));
  CHECK(b.q3 == doctest::Approx(3.5));
}

TEST_CASE("pca matches a Jacobi eigen decomposition") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 1);
  const int n = 40, d = 5;
  Eigen::MatrixXd Z(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) Z(i, j) = g(rng) * (j + 1);
  Z = linalg::center_columns(Z).second;
  const auto out = linalg::pca(Z, 2);
  oracle::Mat cov(d, oracle::Vec(d, 0.0));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) cov[a][b] = Z.col(a).dot(Z.col(b)) / n;
  const auto [values, vectors] = oracle::jacobi_eigen(cov);
  for (int c = 0; c < 2; ++c) {
    CHECK(out.eigenvalues(c) == doctest::Approx(values[static_cast<std::size_t>(c)]).epsilon(1e-9));
    // Same axis up to sign, then the sign convention: largest loading positive.
    double dot = 0;
    for (int k = 0; k < d; ++k) dot += out.loadings(k, c) * vectors[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
    CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-8));
    Eigen::Index arg = 0;
    out.loadings.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(out.loadings(arg, c) > 0);
  }
}

TEST_CASE("horizon models are exact on affine series") {
  std::vector<double> s;
  for (int t = 0; t < 10; ++t) s.push_back(10.0 + 3.0 * t);
  for (int w : {1, 2, 3}) {
    const auto m = fit_extender(s, SeriesModelKind::Linear, w);
    CHECK(predict_next(m, s) == doctest::Approx(40.0).epsilon(1e-9));
  }
  const auto lin = fit_extender(s, SeriesModelKind::Linear, 2);
  const auto las = fit_extender(s, SeriesModelKind::Lasso, 2, 0.0);
  CHECK(predict_next(las, s) == doctest::Approx(predict_next(lin, s)).epsilon(1e-6));
}

TEST_CASE("horizon lasso at zero penalty equals least squares on noisy series") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s;
    for (int t = 0; t < 16; ++t) s.push_back(50 + g(rng));
    const auto lin = fit_extender(s, SeriesModelKind::Linear, 3);
    const auto las = fit_extender(s, SeriesModelKind::Lasso, 3, 0.0);
    CHECK(std::abs(predict_next(las, s) - predict_next(lin, s)) < 1e-6);
  }
}

TEST_CASE("horizon output is clamped and short series fail") {
  std::vector<double> up{60, 80, 100};
  const auto m = fit_extender(up, SeriesModelKind::Linear, 1);
  CHECK(predict_next(m, up) > 100.0);
  CHECK(extend(m, up) == 100.0);
  std::vector<double> down{40, 20, 0};
  CHECK(extend(fit_extender(down, SeriesModelKind::Linear, 1), down) == 0.0);
  CHECK_THROWS_AS(fit_extender(up, SeriesModelKind::Linear, 3), Error);
  CHECK_THROWS_AS(fit_extender(up, SeriesModelKind::Lasso, 1, -1.0), Error);
  CHECK_THROWS_AS(parse_series_model_kind("random_forest"), Error);
}

TEST_CASE("extend_features shrinks the window and carries single points") {
  auto ds = std::make_shared<const Dataset>(fixture::random(3, 3, 0.2, 6));
  const Timeline tl(ds);
  const auto next = extend_features(tl, {SeriesModelKind::Linear, 4, 0.0});
  CHECK(next.rows() == 3);
  CHECK(next.minCoeff() >= 0.0);
  CHECK(next.maxCoeff() <= 100.0);
  const auto single = extend_features(tl.slice(2, 1), {});
  CHECK(single == tl.frame(2).features);
}

TEST_CASE("model selection report covers every series") {
  const auto ds = fixture::random(4, 8, 0.2, 10);
  const auto rep = model_selection_report(ds, {SeriesModelKind::Linear, SeriesModelKind::Lasso}, 3);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].absErrors.size() == 4 * 3 * 3);
  CHECK(rep.entries[0].errorBox.min <= rep.entries[0].errorBox.median);
  CHECK_THROWS_AS(model_selection_report(ds, {SeriesModelKind::Linear}, 1), Error);
}
