// Problem-file parsing, result serialization, and the command layer the CLI
// binary wraps.  Problems are built inline as JSON so the tests stay
// hermetic; the shipped fixture files mirror these shapes.

#include <catch2/catch_amalgamated.hpp>

#include "pcs/commands.hpp"
#include "testutil.hpp"

using pcs::io::json;
namespace io = pcs::io;

namespace {

// The four-state product space with a payoff coordinate and a binary
// attribute, uniform prior, plus the symmetric two-atom target.
json product_problem() {
  return json::parse(R"({
    "version": 1,
    "space": {
      "omega": ["x1t1", "x2t1", "x1t2", "x2t2"],
      "theta": ["t1", "t2"],
      "theta_map": {"x1t1": "t1", "x2t1": "t1", "x1t2": "t2", "x2t2": "t2"},
      "prior": ["1/4", "1/4", "1/4", "1/4"]
    },
    "privacy": {
      "single_bound": {"atoms": [
        {"posterior": ["3/4", "1/4"], "weight": "1/2"},
        {"posterior": ["1/4", "3/4"], "weight": "1/2"}
      ]}
    },
    "gamma": {"atoms": [
      {"posterior": ["3/4", "1/4"], "weight": "1/2"},
      {"posterior": ["1/4", "3/4"], "weight": "1/2"}
    ]},
    "gamma_b": {"atoms": [{"posterior": ["1/2", "1/2"], "weight": "1"}]}
  })");
}

// Attribute-only binary space under a ratio band of width two.
json band_problem() {
  return json::parse(R"({
    "version": 1,
    "space": {
      "omega": ["t1", "t2"],
      "theta": ["t1", "t2"],
      "theta_map": {"t1": "t1", "t2": "t2"},
      "prior": ["1/2", "1/2"]
    },
    "privacy": {"inferential": {"lambda": "2"}},
    "gamma": {"atoms": [
      {"posterior": ["2/3", "1/3"], "weight": "1/2"},
      {"posterior": ["1/3", "2/3"], "weight": "1/2"}
    ]}
  })");
}

json mean_problem() {
  return json::parse(R"({
    "version": 1,
    "space": {
      "omega": ["t0", "t1"],
      "theta": ["t0", "t1"],
      "theta_map": {"t0": "t0", "t1": "t1"},
      "prior": ["1/2", "1/2"]
    },
    "privacy": {"posterior_mean": {
      "f": ["0", "1"],
      "kappa_bar": {"atoms": [
        {"value": "1/4", "weight": "1/2"},
        {"value": "3/4", "weight": "1/2"}
      ]}
    }}
  })");
}

json interval_problem() {
  return json::parse(R"({
    "version": 1,
    "space": {
      "omega": ["t1", "t2"],
      "theta": ["t1", "t2"],
      "theta_map": {"t1": "t1", "t2": "t2"},
      "prior": ["1/2", "1/2"]
    },
    "privacy": {"ex_post": {"rows": [
      {"coeffs": ["1", "0"], "rel": "le", "rhs": "3/4"},
      {"coeffs": ["-1", "0"], "rel": "le", "rhs": "-1/4"}
    ]}}
  })");
}

pcs::Posterior p2(pcs::Rational a, pcs::Rational b) {
  return pcs::Posterior({std::move(a), std::move(b)});
}

const pcs::Rational q(long n, long d = 1) { return pcs::Rational(n, d); }

}  // namespace

TEST_CASE("belief distributions survive a serialize/parse round trip") {
  testutil::Rng rng(909313);
  for (int trial = 0; trial < 8; ++trial) {
    const auto space = testutil::random_space(rng);
    const auto original =
        testutil::random_plausible(rng, pcs::marginal_theta(space.prior(), space));
    const auto round = io::parse_belief(io::serialize_belief(original));
    REQUIRE(round == original);
  }
}

TEST_CASE("scalar distributions and dilations round trip") {
  const auto kappa = pcs::ScalarDistribution::make({{q(1, 4), q(1, 2)}, {q(3, 4), q(1, 2)}});
  REQUIRE(io::parse_scalar(io::serialize_scalar(kappa)) == kappa);

  pcs::Dilation dil;
  dil.rows = {{{0, q(1, 2)}, {1, q(1, 2)}}, {{2, q(1)}}};
  const auto round = io::parse_dilation(io::serialize_dilation(dil));
  REQUIRE(round.rows == dil.rows);
}

TEST_CASE("state spaces round trip with labels and blocks intact") {
  const auto pf = io::parse_problem_file(product_problem());
  const auto round = io::parse_space(io::serialize_space(pf.space));
  REQUIRE(round.num_omega() == 4);
  REQUIRE(round.num_theta() == 2);
  REQUIRE(round.omega_label(2) == "x1t2");
  REQUIRE(round.theta_of(1) == 0);
  REQUIRE(round.prior() == pf.space.prior());
}

TEST_CASE("composites round trip through their JSON form") {
  const auto pf = io::parse_problem_file(product_problem());
  const auto c = pcs::synthesize(*pf.gamma, pf.privacy, pf.space);
  const auto round = io::parse_composite(io::serialize_composite(c), pf.space);
  REQUIRE(round.extension.gamma == c.extension.gamma);
  REQUIRE(round.extension.extended_atoms == c.extension.extended_atoms);
  REQUIRE(round.extension.cond == c.extension.cond);
  for (std::size_t n = 0; n < c.branch_signals.size(); ++n) {
    REQUIRE(round.branch_signals[n].breakpoints == c.branch_signals[n].breakpoints);
    REQUIRE(round.branch_signals[n].density == c.branch_signals[n].density);
  }
  REQUIRE(pcs::verify_undominated(round, pf.privacy));
}

TEST_CASE("unknown fields are rejected at every level") {
  auto j = product_problem();
  j["extra"] = 1;
  REQUIRE_THROWS_AS(io::parse_problem_file(j), pcs::input_error);

  j = product_problem();
  j["space"]["comment"] = "hi";
  REQUIRE_THROWS_AS(io::parse_problem_file(j), pcs::input_error);

  j = product_problem();
  j["gamma"]["atoms"][0]["note"] = "hi";
  REQUIRE_THROWS_AS(io::parse_problem_file(j), pcs::input_error);

  j = band_problem();
  j["privacy"]["inferential"]["epsilon"] = "1";
  REQUIRE_THROWS_AS(io::parse_problem_file(j), pcs::input_error);
}

TEST_CASE("malformed problem files fail with file errors") {
  auto j = product_problem();
  j["version"] = 2;
  REQUIRE_THROWS_AS(io::parse_problem_file(j), pcs::input_error);

  j = product_problem();
  j["space"]["prior"][0] = "0.25";  // decimals are not exact input
  REQUIRE_THROWS_AS(io::parse_problem_file(j), pcs::input_error);

  j = product_problem();
  j["space"]["theta_map"].erase("x1t1");
  REQUIRE_THROWS_AS(io::parse_problem_file(j), pcs::input_error);

  j = product_problem();
  j["privacy"] = {{"single_bound", j["privacy"]["single_bound"]},
                  {"inferential", {{"lambda", "2"}}}};
  REQUIRE_THROWS_AS(io::parse_problem_file(j), pcs::input_error);

  j = interval_problem();
  j["privacy"]["ex_post"]["rows"][0]["rel"] = "ge";
  REQUIRE_THROWS_AS(io::parse_problem_file(j), pcs::input_error);

  j = band_problem();
  j["gamma"]["atoms"][0]["posterior"] = {"1/2", "1/4", "1/4"};
  REQUIRE_THROWS_AS(io::parse_problem_file(j), pcs::input_error);
}

TEST_CASE("dominance verb reports the relation with its witness") {
  const auto pf = io::parse_problem_file(product_problem());
  const auto payload = io::cmd_check_dominance(pf);
  REQUIRE(payload["relation"] == "dominates");
  const auto& row = payload["gamma_spread_of_gamma_b"]["rows"][0];
  REQUIRE(row.size() == 2);
  REQUIRE(row[0]["weight"] == "1/2");
  REQUIRE(row[1]["weight"] == "1/2");

  auto identical = product_problem();
  identical["gamma_b"] = identical["gamma"];
  REQUIRE(io::cmd_check_dominance(io::parse_problem_file(identical))["relation"] ==
          "equivalent");

  auto reversed = product_problem();
  std::swap(reversed["gamma"], reversed["gamma_b"]);
  REQUIRE(io::cmd_check_dominance(io::parse_problem_file(reversed))["relation"] == "dominated");

  auto missing = product_problem();
  missing.erase("gamma_b");
  REQUIRE_THROWS_AS(io::cmd_check_dominance(io::parse_problem_file(missing)),
                    pcs::input_error);
}

TEST_CASE("extension verb emits zero residuals and the full vertex list") {
  const auto pf = io::parse_problem_file(product_problem());

  const auto one = io::cmd_min_extension(pf, "one");
  for (const auto& r : one["extension"]["prior_residuals"]) REQUIRE(r == "0");

  const auto vertices = io::cmd_min_extension(pf, "vertices");
  REQUIRE(vertices["count"] == 4);
  // Canonical atom order puts (1/4,3/4) first, so its conditional is the
  // second coordinate pair: look for cond pattern (x1 | t1) = 0 and 2/3.
  bool found = false;
  for (const auto& ext : vertices["extensions"]) {
    found = found || (ext["cond"][0][0] == "0" && ext["cond"][1][0] == "2/3");
  }
  REQUIRE(found);

  REQUIRE_THROWS_AS(io::cmd_min_extension(pf, "all"), pcs::input_error);

  auto implausible = product_problem();
  implausible["gamma"] = {{"atoms", {{{"posterior", {"9/10", "1/10"}}, {"weight", "1"}}}}};
  REQUIRE_THROWS_AS(io::cmd_min_extension(io::parse_problem_file(implausible), "one"),
                    pcs::infeasible_error);
}

TEST_CASE("frontier verb reports support points per specification variant") {
  const auto band = io::cmd_frontier(io::parse_problem_file(band_problem()));
  REQUIRE(band["support"].size() == 2);
  REQUIRE(band["support"][0]["posterior"] == json({"2/3", "1/3"}));
  REQUIRE(band["support"][0]["subset_E"] == json({"t1"}));
  REQUIRE(band["support"][1]["posterior"] == json({"1/3", "2/3"}));
  REQUIRE(band["support"][1]["subset_E"] == json({"t2"}));
  REQUIRE(band["gamma"]["atoms"][0]["weight"] == "1/2");

  const auto interval = io::cmd_frontier(io::parse_problem_file(interval_problem()));
  REQUIRE(interval["support"].size() == 2);
  REQUIRE(interval["support"][0]["posterior"] == json({"1/4", "3/4"}));
  REQUIRE(interval["support"][1]["posterior"] == json({"3/4", "1/4"}));

  const auto menu = io::cmd_frontier(io::parse_problem_file(mean_problem()));
  REQUIRE(menu["gamma"]["atoms"].size() == 2);
  REQUIRE(menu["gamma"]["atoms"][0]["posterior"] == json({"1/4", "3/4"}));
  REQUIRE(menu["gamma"]["atoms"][1]["posterior"] == json({"3/4", "1/4"}));
}

TEST_CASE("synthesize verb returns a verified composite and refuses off-frontier targets") {
  const auto pf = io::parse_problem_file(product_problem());
  const auto payload = io::cmd_synthesize(pf, 0, {});
  REQUIRE(payload["verified"] == true);
  REQUIRE(payload["composite"]["branches"].size() == 2);

  auto off = band_problem();
  off["gamma"] = {{"atoms",
                   {{{"posterior", {"3/5", "2/5"}}, {"weight", "1/2"}},
                    {{"posterior", {"2/5", "3/5"}}, {"weight", "1/2"}}}}};
  try {
    io::cmd_synthesize(io::parse_problem_file(off), 0, {});
    FAIL("expected a refusal");
  } catch (const pcs::infeasible_error& e) {
    REQUIRE(std::string(e.what()).find("frontier_membership") != std::string::npos);
  }
}

TEST_CASE("verify verb runs the invariant suite per artifact") {
  // A synthesized composite, round-tripped through JSON, passes everything.
  auto problem = band_problem();
  const auto pf = io::parse_problem_file(problem);
  const auto c = pcs::synthesize(*pf.gamma, pf.privacy, pf.space);
  problem.erase("gamma");
  problem["composite"] = io::serialize_composite(c);
  const auto all = io::cmd_verify(io::parse_problem_file(problem));
  REQUIRE(all["artifact"] == "composite");
  REQUIRE(all["all_pass"] == true);

  // Doubling one branch density breaks the uniform-marginal requirement; the
  // report names that check.
  auto tampered = problem;
  tampered["composite"]["branches"][0]["density"][0][0] = "2";
  const auto report = io::cmd_verify(io::parse_problem_file(tampered));
  REQUIRE(report["all_pass"] == false);
  bool uniform_failed = false;
  for (const auto& check : report["checks"]) {
    if (check["name"] == "uniform_marginal") uniform_failed = !check["pass"].get<bool>();
  }
  REQUIRE(uniform_failed);

  // A plausible gamma outside the ratio band: permissible fails and the
  // offending atom is named.
  auto violating = band_problem();
  violating["gamma"] = {{"atoms",
                         {{{"posterior", {"3/4", "1/4"}}, {"weight", "1/4"}},
                          {{"posterior", {"5/12", "7/12"}}, {"weight", "3/4"}}}}};
  const auto gamma_report = io::cmd_verify(io::parse_problem_file(violating));
  REQUIRE(gamma_report["artifact"] == "gamma");
  for (const auto& check : gamma_report["checks"]) {
    if (check["name"] == "bayes_plausible") REQUIRE(check["pass"] == true);
    if (check["name"] == "permissible") {
      REQUIRE(check["pass"] == false);
      REQUIRE(check["offending_atom"]["posterior"] == json({"3/4", "1/4"}));
    }
  }

  // An extension artifact: tau plus its gamma.
  auto with_tau = product_problem();
  with_tau.erase("gamma_b");
  const auto pf2 = io::parse_problem_file(with_tau);
  const auto ext = pcs::lex_min_extension(*pf2.gamma, pf2.space);
  with_tau["tau"] = io::serialize_belief(pcs::extension_distribution(ext));
  const auto tau_report = io::cmd_verify(io::parse_problem_file(with_tau));
  REQUIRE(tau_report["artifact"] == "extension");
  REQUIRE(tau_report["all_pass"] == true);

  auto bare = mean_problem();
  REQUIRE_THROWS_AS(io::cmd_verify(io::parse_problem_file(bare)), pcs::input_error);
}

TEST_CASE("plot data lists atoms, or one row per branch cell") {
  auto problem = product_problem();
  const auto pf = io::parse_problem_file(problem);
  const auto gamma_csv = io::cmd_plot_data(pf, 0);
  REQUIRE(gamma_csv ==
          "index,weight,coord_0,coord_1\n"
          "0,1/2,1/4,3/4\n"
          "1,1/2,3/4,1/4\n");

  const auto c = pcs::synthesize(*pf.gamma, pf.privacy, pf.space);
  problem.erase("gamma");
  problem.erase("gamma_b");
  problem["composite"] = io::serialize_composite(c);
  const auto composite_csv = io::cmd_plot_data(io::parse_problem_file(problem), 0);
  std::size_t rows = 0, expected = 0;
  for (char ch : composite_csv) rows += ch == '\n';
  for (const auto& q2 : c.branch_signals) {
    for (std::size_t k = 0; k < q2.num_cells(); ++k) {
      bool positive = false;
      for (const auto& row : q2.density) positive = positive || row[k] > 0;
      expected += positive;
    }
  }
  REQUIRE(rows == expected + 1);  // header
  REQUIRE(composite_csv.rfind("branch,cell,lo,hi,weight,coord_0", 0) == 0);

  // No artifact at all: header only.
  const auto bare = io::cmd_plot_data(io::parse_problem_file(mean_problem()), 0);
  REQUIRE(bare == "index,weight,coord_0,coord_1\n");
}

TEST_CASE("decimal renderings are additive, never replacing the exact form") {
  const auto pf = io::parse_problem_file(band_problem());
  const auto payload = io::cmd_frontier(pf);
  const auto result = io::make_result({{"verb", "frontier"}}, "ok", payload, 3);
  REQUIRE(result["payload"] == payload);  // untouched
  REQUIRE(result["payload_decimal"]["support"][0]["posterior"][0] == "0.667");
  REQUIRE(result["payload_decimal"]["support"][0]["subset_E"][0] == "t1");  // labels verbatim

  const auto csv = io::cmd_plot_data(pf, 2);
  REQUIRE(csv.rfind("index,weight,coord_0,coord_1,weight_dec,coord_0_dec,coord_1_dec", 0) == 0);
  REQUIRE(csv.find("1/2,1/3,2/3,0.50,0.33,0.67") != std::string::npos);
}

TEST_CASE("reading files reports missing or broken input as file errors") {
  REQUIRE_THROWS_AS(io::load_problem_file("/nonexistent/problem.json"), pcs::input_error);
  REQUIRE_THROWS_AS(io::parse_reorder_assignment(json::parse(R"({"cells": []})")),
                    pcs::input_error);
}
