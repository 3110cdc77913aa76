#include <doctest.h>

#include "../support/fixtures.hpp"
#include "scsim/core/hash.hpp"
#include "scsim/core/io.hpp"
#include "scsim/core/network.hpp"
#include "scsim/core/timeline.hpp"
#include "scsim/error.hpp"
#include "scsim/synthetic.hpp"

using namespace scsim;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::ParseError;
}

const char* kCompanies =
    "id,industry,knowledge,Operation@0,Technology@0,Operation@1,Technology@1\n"
    "B,Retail,\"Sells, mostly\",10,20,11,21\n"
    "A,Parts,,30,40,31,41\n";

}  // namespace

TEST_CASE("csv dataset loads with integer timestamps and sorted companies") {
  const auto ds = parse_dataset(kCompanies, "supplier_id,customer_id,t\nA,B,0\nA,B,1\n", "global text");
  CHECK(ds.horizon() == 2);
  CHECK(ds.featureNames == std::vector<std::string>{"Operation", "Technology"});
  REQUIRE(ds.company_count() == 2);
  CHECK(ds.companies[0].id == CompanyId("A"));
  CHECK(ds.companies[1].knowledge == "Sells, mostly");
  CHECK(ds.companies[1].features(1, 1) == 21.0);
  CHECK(ds.network.contains({CompanyId("A"), CompanyId("B")}, 1));
  CHECK(ds.globalKnowledge == "global text");
}

TEST_CASE("dataset errors carry their codes") {
  const std::string edgesHeader = "supplier_id,customer_id,t\n";
  CHECK(code_of([&] { parse_dataset(kCompanies, edgesHeader + "A,Z,0\n", ""); }) == Errc::UnknownCompanyInEdge);
  CHECK(code_of([&] { parse_dataset(kCompanies, edgesHeader + "A,A,0\n", ""); }) == Errc::SelfEdge);
  CHECK(code_of([&] { parse_dataset(kCompanies, edgesHeader + "A,B,0\nA,B,0\n", ""); }) == Errc::DuplicateEdge);
  CHECK(code_of([&] {
          parse_dataset("id,industry,knowledge,Operation@0\nA,P,,101\n", edgesHeader, "");
        }) == Errc::FeatureOutOfRange);
  CHECK(code_of([&] { parse_dataset("id,industry\n\"A,P\n", edgesHeader, ""); }) == Errc::ParseError);
  CHECK(code_of([&] { load_dataset("/nonexistent/c.csv", "/nonexistent/e.csv", "/nonexistent/k.txt"); }) ==
        Errc::MissingFile);
}

TEST_CASE("dataset json and csv round trips") {
  const auto ds = generate_synthetic({.companies = 12, .quarters = 5, .seed = 3});
  CHECK(dataset_from_json(dataset_to_json(ds)) == ds);
  CHECK(parse_dataset(companies_csv(ds), edges_csv(ds), ds.globalKnowledge) == ds);
}

TEST_CASE("synthetic generator is deterministic and valid") {
  const auto a = generate_synthetic();
  const auto b = generate_synthetic();
  CHECK(a == b);
  CHECK(a.company_count() == 35);
  CHECK(a.horizon() == 8);
  CHECK(a.timestampLabels.front() == "Q1");
  CHECK(a.companies.front().id.str().rfind("Company-", 0) == 0);
  CHECK_FALSE(generate_synthetic({.seed = 8}) == a);
}

TEST_CASE("edge lifecycle") {
  // e present at 1..3; f present at 2 only.
  const auto ds = fixture::build(3, 5, {{}, {{0, 1}}, {{0, 1}, {1, 2}}, {{0, 1}}, {}}, {"A"},
                                 [](int, int, int) { return 50.0; });
  const Edge e{fixture::id(0), fixture::id(1)}, f{fixture::id(1), fixture::id(2)};
  CHECK(edge_lifecycle(ds.network, e, 1) == Lifecycle::Initiate);
  CHECK(edge_lifecycle(ds.network, e, 2) == Lifecycle::Maintain);
  CHECK(edge_lifecycle(ds.network, e, 3) == Lifecycle::Terminate);
  CHECK(edge_lifecycle(ds.network, f, 2) == Lifecycle::Terminate);
  CHECK(code_of([&] { edge_lifecycle(ds.network, e, 0); }) == Errc::EdgeAbsent);
  CHECK(code_of([&] { edge_lifecycle(ds.network, e, 9); }) == Errc::TimestampOutOfRange);

  const auto tail = fixture::build(2, 2, {{}, {{0, 1}}}, {"A"}, [](int, int, int) { return 1.0; });
  CHECK(edge_lifecycle(tail.network, {fixture::id(0), fixture::id(1)}, 1) == Lifecycle::Initiate);
}

TEST_CASE("partners and exclusions") {
  const auto ds = fixture::build(4, 1, {{{0, 1}, {2, 1}, {1, 3}}}, {"A"}, [](int, int, int) { return 1.0; });
  const auto& edges = *ds.network.at(0);
  CHECK(suppliers_of(edges, fixture::id(1)) == CompanySet{fixture::id(0), fixture::id(2)});
  CHECK(customers_of(edges, fixture::id(1)) == CompanySet{fixture::id(3)});
  CHECK(partners_of(edges, fixture::id(1)).size() == 3);
  CHECK(code_of([&] { suppliers_of(ds, CompanyId("nope"), 0); }) == Errc::UnknownCompany);
}

TEST_CASE("timeline labels and slices") {
  CHECK(next_label("Q8") == "Q9");
  CHECK(next_label("Q09") == "Q10");
  CHECK(next_label("7") == "8");
  CHECK(next_label("2024-Q4x") == "2024-Q4x+1");

  auto ds = std::make_shared<const Dataset>(fixture::random(4, 5, 0.3, 1));
  const Timeline tl(ds);
  CHECK(tl.size() == 5);
  const auto s = tl.slice(1, 3);
  CHECK(s.size() == 3);
  CHECK(s.frame(0).label == "Q2");
  CHECK(s.frame_ptr(0) == tl.frame_ptr(1));
  CHECK(tl.series(2, 1, 4).size() == 5);
  CHECK(code_of([&] { tl.frame(5); }) == Errc::TimestampOutOfRange);
}

TEST_CASE("seed derivation") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(derive_seed(1, "x") == derive_seed(1, "x"));
  CHECK(derive_seed(1, "x") != derive_seed(2, "x"));
  CHECK(derive_seed(1, "x") != derive_seed(1, "y"));
  CHECK(hex64(255) == "00000000000000ff");
}
