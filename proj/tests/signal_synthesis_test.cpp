#include <catch2/catch_amalgamated.hpp>

#include "pcs/composite.hpp"
#include "testutil.hpp"

using pcs::BeliefDistribution;
using pcs::CompositeSignal;
using pcs::Posterior;
using pcs::PrivacySpec;
using pcs::QuantileSignal;
using pcs::Rational;
using pcs::ReorderAssignment;
using pcs::SingleBound;

namespace {

Rational q(long num, long den = 1) { return Rational(num, den); }

// The running example: conditionals (2/3, 1/3) under t1 and (1/2, 1/2)
// under t2 on the product space, with attribute marginal (1/2, 1/2).
Posterior example_atom() {
  return Posterior({q(1, 3), q(1, 6), q(1, 4), q(1, 4)});
}

// Every state's realization mass moved to [0, 1] with flat density: keeps
// the attribute belief untouched but reveals nothing within a block.
QuantileSignal flat_signal(const pcs::StateSpace& space, const Posterior& mu) {
  QuantileSignal out{space, {q(0), q(1)}, {}};
  for (std::size_t i = 0; i < space.num_omega(); ++i) {
    out.density.push_back({mu[i] > 0 ? q(1) : q(0)});
  }
  return out;
}

}  // namespace

// --- quantile signals ---------------------------------------------------------

TEST_CASE("states tile the unit interval in declaration order per block") {
  auto space = testutil::product_space();
  auto sig = pcs::quantile_signal(example_atom(), space);
  REQUIRE(sig.breakpoints == std::vector<Rational>{q(0), q(1, 2), q(2, 3), q(1)});
  CHECK(sig.density[0] == std::vector<Rational>{q(3, 2), q(3, 2), q(0)});
  CHECK(sig.density[1] == std::vector<Rational>{q(0), q(0), q(3)});
  CHECK(sig.density[2] == std::vector<Rational>{q(2), q(0), q(0)});
  CHECK(sig.density[3] == std::vector<Rational>{q(0), q(2), q(2)});
  CHECK(pcs::conditional_privacy_check(sig, example_atom()));
  CHECK(pcs::conditionally_revealing_check(sig, example_atom()));
}

TEST_CASE("a single state per attribute value gets the whole interval") {
  auto space = testutil::attribute_only_space(testutil::half_half());
  auto sig = pcs::quantile_signal(testutil::half_half(), space);
  REQUIRE(sig.breakpoints == std::vector<Rational>{q(0), q(1)});
  CHECK(sig.density[0] == std::vector<Rational>{q(1)});
  CHECK(sig.density[1] == std::vector<Rational>{q(1)});
}

TEST_CASE("the uniform posterior cuts both blocks at one half") {
  auto space = testutil::product_space();
  Posterior uniform({q(1, 4), q(1, 4), q(1, 4), q(1, 4)});
  auto sig = pcs::quantile_signal(uniform, space);
  REQUIRE(sig.breakpoints == std::vector<Rational>{q(0), q(1, 2), q(1)});
  CHECK(sig.density[0] == std::vector<Rational>{q(2), q(0)});
  CHECK(sig.density[1] == std::vector<Rational>{q(0), q(2)});
  CHECK(sig.density[2] == std::vector<Rational>{q(2), q(0)});
  CHECK(sig.density[3] == std::vector<Rational>{q(0), q(2)});
  CHECK(pcs::conditional_privacy_check(sig, uniform));
}

TEST_CASE("zero-mass states and blocks get empty cell-sets") {
  auto space = testutil::product_space();
  Posterior no_x2t1({q(1, 2), q(0), q(1, 4), q(1, 4)});
  auto sig = pcs::quantile_signal(no_x2t1, space);
  REQUIRE(sig.breakpoints == std::vector<Rational>{q(0), q(1, 2), q(1)});
  CHECK(sig.density[0] == std::vector<Rational>{q(1), q(1)});
  CHECK(sig.density[1] == std::vector<Rational>{q(0), q(0)});

  Posterior no_t2({q(1, 2), q(1, 2), q(0), q(0)});
  auto block = pcs::quantile_signal(no_t2, space);
  REQUIRE(block.breakpoints == std::vector<Rational>{q(0), q(1, 2), q(1)});
  CHECK(block.density[2] == std::vector<Rational>{q(0), q(0)});
  CHECK(block.density[3] == std::vector<Rational>{q(0), q(0)});
  CHECK(pcs::conditional_privacy_check(block, no_t2));
  CHECK(pcs::conditionally_revealing_check(block, no_t2));
}

// --- reorderings ----------------------------------------------------------------

TEST_CASE("the identity assignment reproduces the signal") {
  auto space = testutil::product_space();
  auto sig = pcs::quantile_signal(example_atom(), space);
  ReorderAssignment identity{sig.breakpoints, {{0, 1}, {2}, {0}, {1, 2}}};
  auto moved = pcs::reorder(sig, identity);
  CHECK(moved.breakpoints == sig.breakpoints);
  CHECK(moved.density == sig.density);
}

TEST_CASE("swapping the two intervals of one block preserves all invariants") {
  auto space = testutil::product_space();
  auto sig = pcs::quantile_signal(example_atom(), space);
  // Grid {0, 1/3, 1/2, 2/3, 1}: x1 under t1 takes [1/3, 1], x2 takes [0, 1/3].
  ReorderAssignment swap{{q(0), q(1, 3), q(1, 2), q(2, 3), q(1)},
                         {{1, 2, 3}, {0}, {0, 1}, {2, 3}}};
  auto moved = pcs::reorder(sig, swap);
  CHECK(moved.density[0] == std::vector<Rational>{q(0), q(3, 2), q(3, 2), q(3, 2)});
  CHECK(moved.density[1] == std::vector<Rational>{q(3), q(0), q(0), q(0)});
  CHECK(moved.density[2] == std::vector<Rational>{q(2), q(2), q(0), q(0)});
  CHECK(moved.density[3] == std::vector<Rational>{q(0), q(0), q(2), q(2)});
  CHECK(pcs::conditional_privacy_check(moved, example_atom()));
  CHECK(pcs::conditionally_revealing_check(moved, example_atom()));
}

TEST_CASE("splitting a state's mass across disjoint pieces stays valid") {
  auto space = testutil::product_space();
  auto sig = pcs::quantile_signal(example_atom(), space);
  // x1 under t1 now occupies [0, 1/3] and [2/3, 1]; x2 fills the middle.
  ReorderAssignment split{{q(0), q(1, 3), q(1, 2), q(2, 3), q(1)},
                          {{0, 3}, {1, 2}, {0, 1}, {2, 3}}};
  auto moved = pcs::reorder(sig, split);
  CHECK(moved.density[0] == std::vector<Rational>{q(3, 2), q(0), q(0), q(3, 2)});
  CHECK(moved.density[1] == std::vector<Rational>{q(0), q(3), q(3), q(0)});
  CHECK(pcs::conditional_privacy_check(moved, example_atom()));
  CHECK(pcs::conditionally_revealing_check(moved, example_atom()));
  // Inside the middle piece the realization pins x2 whenever t1 holds.
  CHECK(moved.density[0][1] == 0);
  CHECK(moved.density[0][2] == 0);
  CHECK(moved.density[1][1] > 0);
}

TEST_CASE("rearrangements with broken bookkeeping are refused") {
  auto space = testutil::product_space();
  auto sig = pcs::quantile_signal(example_atom(), space);
  // Wrong total length for x1 under t1 (1/3 instead of 2/3).
  ReorderAssignment short_x1{{q(0), q(1, 3), q(1, 2), q(2, 3), q(1)},
                             {{0}, {1, 2, 3}, {0, 1}, {2, 3}}};
  CHECK_THROWS_AS(pcs::reorder(sig, short_x1), pcs::input_error);
  // Overlapping cells within one block.
  ReorderAssignment overlap{{q(0), q(1, 3), q(2, 3), q(1)},
                            {{0, 1}, {1}, {0}, {1, 2}}};
  CHECK_THROWS_AS(pcs::reorder(sig, overlap), pcs::input_error);
  // A zero-mass state must not receive cells.
  Posterior no_x2t1({q(1, 2), q(0), q(1, 4), q(1, 4)});
  auto zero_sig = pcs::quantile_signal(no_x2t1, space);
  ReorderAssignment to_zero{{q(0), q(1, 2), q(1)}, {{0}, {1}, {0}, {1}}};
  CHECK_THROWS_AS(pcs::reorder(zero_sig, to_zero), pcs::input_error);
  // Rows whose density varies over their support cannot be rearranged.
  auto attr = testutil::attribute_only_space(testutil::half_half());
  QuantileSignal lumpy{attr, {q(0), q(1, 2), q(1)}, {{q(3, 2), q(1, 2)}, {q(1), q(1)}}};
  pcs::validate_quantile_signal(lumpy);
  ReorderAssignment identity{{q(0), q(1, 2), q(1)}, {{0, 1}, {0, 1}}};
  CHECK_THROWS_AS(pcs::reorder(lumpy, identity), pcs::input_error);
}

// --- conditional checks on hand-built signals -------------------------------------

TEST_CASE("a block-skewed density leaks the attribute") {
  auto space = testutil::attribute_only_space(testutil::half_half());
  QuantileSignal skewed{space, {q(0), q(1, 2), q(1)}, {{q(2), q(0)}, {q(1), q(1)}}};
  pcs::validate_quantile_signal(skewed);
  CHECK_FALSE(pcs::conditional_privacy_check(skewed, testutil::half_half()));
}

TEST_CASE("a fully garbled signal is privacy-preserving but not revealing") {
  auto space = testutil::product_space();
  Posterior uniform({q(1, 4), q(1, 4), q(1, 4), q(1, 4)});
  auto flat = flat_signal(space, uniform);
  pcs::validate_quantile_signal(flat);
  CHECK(pcs::conditional_privacy_check(flat, uniform));
  CHECK_FALSE(pcs::conditionally_revealing_check(flat, uniform));
}

TEST_CASE("malformed signals are rejected outright") {
  auto space = testutil::attribute_only_space(testutil::half_half());
  QuantileSignal bad_grid{space, {q(0), q(2, 3)}, {{q(3, 2)}, {q(3, 2)}}};
  CHECK_THROWS_AS(pcs::validate_quantile_signal(bad_grid), pcs::input_error);
  QuantileSignal bad_mass{space, {q(0), q(1)}, {{q(1, 2)}, {q(1)}}};
  CHECK_THROWS_AS(pcs::validate_quantile_signal(bad_mass), pcs::input_error);
  QuantileSignal negative{space, {q(0), q(1, 2), q(1)}, {{q(3), q(-1)}, {q(1), q(1)}}};
  CHECK_THROWS_AS(pcs::validate_quantile_signal(negative), pcs::input_error);
}

// --- composite signals -------------------------------------------------------------

TEST_CASE("the privacy-preserving composite keeps the attribute belief silent") {
  auto space = testutil::product_space();
  auto gamma = pcs::point_mass(testutil::half_half());
  PrivacySpec spec{SingleBound{gamma}};
  auto c = pcs::synthesize(gamma, spec, space);
  REQUIRE(c.branch_signals.size() == 1);
  CHECK(pcs::verify_undominated(c, spec));

  auto belief = pcs::composite_belief_distribution(c);
  REQUIRE(belief.size() == 2);
  CHECK(belief.atom(0) == Posterior({q(0), q(1, 2), q(0), q(1, 2)}));
  CHECK(belief.atom(1) == Posterior({q(1, 2), q(0), q(1, 2), q(0)}));
  CHECK(pcs::marginal_theta_belief(belief, space) == gamma);
}

TEST_CASE("every extension of the symmetric bound composes to the bound") {
  auto space = testutil::product_space();
  auto bound = testutil::symmetric_bound();
  PrivacySpec spec{SingleBound{bound}};
  auto extensions = pcs::enumerate_min_extensions(bound, space);
  REQUIRE(extensions.size() == 4);
  for (std::size_t idx = 0; idx < extensions.size(); ++idx) {
    auto c = pcs::synthesize(bound, spec, space, idx);
    CHECK(pcs::verify_undominated(c, spec));
    auto belief = pcs::composite_belief_distribution(c);
    CHECK(pcs::marginal_theta_belief(belief, space) == bound);
    // Stage-2 contract: every cell posterior keeps its branch's attribute belief.
    for (std::size_t n = 0; n < c.branch_signals.size(); ++n) {
      const auto& sig = c.branch_signals[n];
      const Posterior& mu_n = c.extension.extended_atoms[n];
      for (std::size_t k = 0; k < sig.num_cells(); ++k) {
        Rational mass = 0;
        std::vector<Rational> w(space.num_omega());
        for (std::size_t i = 0; i < space.num_omega(); ++i) {
          w[i] = mu_n[i] * sig.density[i][k];
          mass += w[i];
        }
        REQUIRE(mass > 0);
        for (auto& wi : w) wi /= mass;
        CHECK(pcs::marginal_theta(Posterior(w), space) == bound.atom(n));
      }
    }
  }
}

TEST_CASE("synthesis accepts per-branch rearrangements") {
  auto space = testutil::product_space();
  auto gamma = pcs::point_mass(testutil::half_half());
  PrivacySpec spec{SingleBound{gamma}};
  ReorderAssignment swap_t1{{q(0), q(1, 2), q(1)}, {{1}, {0}, {0}, {1}}};
  auto c = pcs::synthesize(gamma, spec, space, 0, {swap_t1});
  CHECK(pcs::verify_undominated(c, spec));
  auto belief = pcs::composite_belief_distribution(c);
  REQUIRE(belief.size() == 2);
  CHECK(belief.atom(0) == Posterior({q(0), q(1, 2), q(1, 2), q(0)}));
  CHECK(belief.atom(1) == Posterior({q(1, 2), q(0), q(0), q(1, 2)}));
  CHECK(pcs::marginal_theta_belief(belief, space) == gamma);
}

TEST_CASE("identity attribute maps make the second stage uninformative") {
  auto space = testutil::attribute_only_space(testutil::half_half());
  auto support = pcs::inferential_frontier_support(testutil::half_half(), q(2));
  std::vector<Posterior> points{support[0].posterior, support[1].posterior};
  auto gamma = pcs::frontier_distribution(points, testutil::half_half());
  PrivacySpec spec{pcs::Inferential{q(2)}};
  auto c = pcs::synthesize(gamma, spec, space);
  CHECK(pcs::verify_undominated(c, spec));
  auto belief = pcs::composite_belief_distribution(c);
  CHECK(belief == pcs::extension_distribution(c.extension));
  CHECK(pcs::marginal_theta_belief(belief, space) == gamma);
}

TEST_CASE("garbling a branch strictly loses information and fails verification") {
  auto space = testutil::product_space();
  auto gamma = pcs::point_mass(testutil::half_half());
  PrivacySpec spec{SingleBound{gamma}};
  auto c = pcs::synthesize(gamma, spec, space);
  auto original = pcs::composite_belief_distribution(c);

  CompositeSignal garbled = c;
  garbled.branch_signals[0] = flat_signal(space, c.extension.extended_atoms[0]);
  pcs::validate_composite(garbled);
  auto weaker = pcs::composite_belief_distribution(garbled);
  CHECK(pcs::check_mps(original, weaker).has_value());
  CHECK(pcs::compare(original, weaker).relation == pcs::Relation::dominates);
  CHECK_FALSE(pcs::verify_undominated(garbled, spec));
}

TEST_CASE("off-frontier targets are refused and fail verification when forced") {
  auto space = testutil::product_space();
  auto silent = pcs::point_mass(testutil::half_half());
  PrivacySpec spec{SingleBound{testutil::symmetric_bound()}};
  CHECK_THROWS_AS(pcs::synthesize(silent, spec, space), pcs::infeasible_error);

  // Built by hand on the dominated target, the composite fails the frontier leg.
  CompositeSignal c{pcs::solve_min_extension(silent, space), {}};
  for (std::size_t n = 0; n < c.extension.gamma.size(); ++n) {
    c.branch_signals.push_back(pcs::quantile_signal(c.extension.extended_atoms[n], space));
  }
  CHECK_FALSE(pcs::verify_undominated(c, spec));
}

TEST_CASE("out-of-range choices are input errors") {
  auto space = testutil::product_space();
  auto bound = testutil::symmetric_bound();
  PrivacySpec spec{SingleBound{bound}};
  CHECK_THROWS_AS(pcs::synthesize(bound, spec, space, 99), pcs::input_error);
  std::vector<std::optional<ReorderAssignment>> too_few(1);
  CHECK_THROWS_AS(pcs::synthesize(bound, spec, space, 0, too_few), pcs::input_error);
}

TEST_CASE("the first stage is the kernel announcing the extended atom") {
  auto space = testutil::product_space();
  auto ext = pcs::enumerate_min_extensions(testutil::symmetric_bound(), space)[0];
  auto kernel = pcs::first_stage_kernel(ext);
  CHECK(pcs::induced_belief_distribution(kernel, space) == pcs::extension_distribution(ext));
}

TEST_CASE("round trip: synthesized composites reproduce their target exactly") {
  testutil::Rng rng(774201);
  for (int trial = 0; trial < 12; ++trial) {
    auto space = testutil::random_space(rng);
    Posterior prior_theta = pcs::marginal_theta(space.prior(), space);
    auto gamma = testutil::random_plausible(rng, prior_theta, 3);
    // Any plausible distribution is the frontier of its own single bound.
    PrivacySpec spec{SingleBound{gamma}};
    auto c = pcs::synthesize(gamma, spec, space);
    CHECK(pcs::verify_undominated(c, spec));
    auto belief = pcs::composite_belief_distribution(c);
    CHECK(pcs::marginal_theta_belief(belief, space) == gamma);
    CHECK(pcs::bayes_plausible(belief, space.prior()));
    for (std::size_t n = 0; n < c.branch_signals.size(); ++n) {
      CHECK(pcs::conditional_privacy_check(c.branch_signals[n],
                                           c.extension.extended_atoms[n]));
      CHECK(pcs::conditionally_revealing_check(c.branch_signals[n],
                                               c.extension.extended_atoms[n]));
    }
  }
}
