#include <cmath>
#include <random>

#include "doctest.h"
#include "infodesign/geometry.hpp"
#include "infodesign/icd.hpp"
#include "test_support.hpp"

using namespace infodesign;
using test_support::e1;
using test_support::e2;

namespace {

// Independent quadrature oracle for the closed-form CDF integrals.
double trapezoid_cdf_integral(const AffineIcd& g, double a, double b, int steps = 20000) {
    double total = 0.0;
    const double h = (b - a) / steps;
    for (int i = 0; i < steps; ++i) {
        const double x0 = a + i * h, x1 = x0 + h;
        total += 0.5 * (g.cdf(x0) + g.cdf(x1)) * h;
    }
    return total;
}

}  // namespace

TEST_CASE("is_icd examples") {
    const auto env1 = e1();
    const auto test1 = is_icd(env1, make_belief(env1, {0.5, 0.5}));
    CHECK(test1.is_icd);
    CHECK(test1.constant == doctest::Approx(1.0).epsilon(1e-12));

    const auto env2 = e2();
    const auto test2 = is_icd(env2, make_belief(env2, {2.0 / 3.0, 1.0 / 3.0}));
    CHECK(test2.is_icd);
    CHECK(test2.constant == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const auto test3 = is_icd(env2, make_belief(env2, {0.5, 0.5}));
    CHECK_FALSE(test3.is_icd);
}

TEST_CASE("greedy_icd recursion and Case 2 anchoring") {
    const auto env2 = e2();
    const Belief g2 = greedy_icd(env2, 1);
    CHECK(g2.weights[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(g2.weights[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const Belief g1 = greedy_icd(e1(), 1);
    CHECK(g1.weights[0] == doctest::Approx(0.5).epsilon(1e-12));

    const Belief point = greedy_icd(env2, 0);
    CHECK(point.weights[0] == 1.0);

    // An interior zero-gap point anchors the recursion below the top.
    const auto zero_gap = make_environment({1.0, 2.0, 3.0}, {0.3, 0.3, 0.4}, {0.0, 2.0, 1.0});
    const Belief anchored = greedy_icd(zero_gap, 2);
    CHECK(anchored.weights[2] == 0.0);
    CHECK(anchored.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(anchored.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    const auto t = is_icd(zero_gap, anchored);
    CHECK(t.is_icd);
    CHECK(t.constant == doctest::Approx(0.0).epsilon(1e-12));

    // Zero gap everywhere collapses to a point mass with constant zero.
    const auto all_zero = make_environment({1.0, 2.0}, {0.5, 0.5}, {1.0, 2.0});
    const Belief collapsed = greedy_icd(all_zero, 1);
    CHECK(collapsed.weights[0] == 1.0);
    CHECK(is_icd(all_zero, collapsed).is_icd);
}

TEST_CASE("icd_decompose worked example on E2") {
    const auto env = e2();
    const auto d = icd_decompose(env);
    REQUIRE(d.components.size() == 2);
    CHECK(d.components[0].weight == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(d.components[0].belief.weights[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(d.components[0].belief.weights[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(d.components[1].weight == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(d.components[1].belief.weights[1] == doctest::Approx(1.0).epsilon(1e-12));

    const auto d1 = icd_decompose(e1());
    REQUIRE(d1.components.size() == 1);
    CHECK(d1.components[0].weight == doctest::Approx(1.0).epsilon(1e-12));

    const auto point = make_environment({5.0}, {1.0}, {2.0});
    const auto dp = icd_decompose(point);
    REQUIRE(dp.components.size() == 1);
    CHECK(dp.components[0].constant == doctest::Approx(3.0));
}

TEST_CASE("icd_decompose invariants on random environments") {
    std::mt19937 rng(11);
    for (int rep = 0; rep < 40; ++rep) {
        const auto env = test_support::random_gft_env(rng);
        const auto d = icd_decompose(env);
        const auto opt_prior = seller_opt_prices(env, prior_belief(env));

        std::vector<double> total(env.size(), 0.0);
        double weight_sum = 0.0, profit_sum = 0.0;
        for (const auto& c : d.components) {
            weight_sum += c.weight;
            profit_sum += c.weight * c.constant;
            CHECK(is_icd(env, c.belief, 1e-9).is_icd);
            for (std::size_t i = 0; i < env.size(); ++i)
                total[i] += c.weight * c.belief.weights[i];
            const auto opt_component = seller_opt_prices(env, c.belief, 1e-9);
            for (double p : opt_prior) {
                bool found = false;
                for (double q : opt_component)
                    if (std::fabs(p - q) < 1e-9) found = true;
                CHECK(found);
            }
        }
        CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-9));
        for (std::size_t i = 0; i < env.size(); ++i)
            CHECK(total[i] == doctest::Approx(env.probs[i]).epsilon(1e-9));
        CHECK(profit_sum == doctest::Approx(seller_floor_fb(env).value).epsilon(1e-9));
    }
}

TEST_CASE("seller_opt_prices examples") {
    const auto env = e2();
    const auto prior = seller_opt_prices(env, prior_belief(env));
    REQUIRE(prior.size() == 1);
    CHECK(prior[0] == 2.0);
    const auto indifferent = seller_opt_prices(env, make_belief(env, {2.0 / 3.0, 1.0 / 3.0}));
    CHECK(indifferent.size() == 2);
    const auto point = seller_opt_prices(env, point_mass(env, 1));
    REQUIRE(point.size() == 1);
    CHECK(point[0] == 2.0);
}

TEST_CASE("affine ICD closed forms") {
    SUBCASE("monopoly branch: unit-elastic survival") {
        const auto g = make_affine_icd(0.0, 0.0, 1.0, 1.5, 2.0);
        CHECK(g.v_hi == doctest::Approx(std::exp(0.5)).epsilon(1e-10));
        CHECK(g.atom_mass == doctest::Approx(1.0 / g.v_hi).epsilon(1e-10));
        CHECK(g.cdf(1.2) == doctest::Approx(1.0 - 1.0 / 1.2).epsilon(1e-12));
        CHECK(g.mean() == doctest::Approx(1.5).epsilon(1e-10));
    }
    SUBCASE("degenerate member is a point mass at the mean") {
        const auto g = make_affine_icd(0.5, 0.0, 1.5, 1.5, 2.0);
        CHECK(g.atom_mass == 1.0);
        CHECK(g.v_lo == g.v_hi);
        CHECK(g.cdf(1.5) == 1.0);
        CHECK(g.cdf(1.5 - 1e-12) == 0.0);
    }
    SUBCASE("exponential branch at slope one") {
        const auto g = make_affine_icd(1.0, -1.0, 1.0, 1.5, 2.0);
        CHECK(g.v_hi == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-10));
        CHECK(g.atom_mass == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(g.mean() == doctest::Approx(1.5).epsilon(1e-10));
    }
    SUBCASE("seller is indifferent across the support") {
        for (double slope : {-0.5, 0.0, 0.3, 1.0, 1.6}) {
            const double intercept = slope >= 1.0 ? -1.5 : 0.2 - slope;
            const auto g = make_affine_icd(slope, intercept, 1.0, 1.4, 3.0);
            const double reference = g.seller_profit(g.v_lo);
            for (double p : {1.0, 1.1, 1.25}) {
                if (p > g.v_hi) continue;
                CHECK(g.seller_profit(p) == doctest::Approx(reference).epsilon(1e-9));
            }
            CHECK(g.seller_profit(g.v_hi) == doctest::Approx(reference).epsilon(1e-9));
            CHECK(reference >= -1e-12);
        }
    }
    SUBCASE("closed-form integral matches quadrature") {
        // Stay below v_hi: the CDF jumps there and the trapezoid rule would
        // smear the atom.
        const auto g = make_affine_icd(0.3, 0.1, 1.0, 1.6, 3.0);
        const double hi = g.v_hi - 1e-3;
        CHECK(g.integral_cdf(1.0, hi) ==
              doctest::Approx(trapezoid_cdf_integral(g, 1.0, hi)).epsilon(1e-6));
        CHECK(g.integral_cdf(0.5, 1.2) ==
              doctest::Approx(trapezoid_cdf_integral(g, 0.5, 1.2)).epsilon(1e-6));
    }
    SUBCASE("unreachable mean reports unbounded support") {
        // Slope one saturates at v_lo - gamma.
        CHECK_THROWS_AS(make_affine_icd(1.0, -0.1, 1.0, 1.5, 2.0), input_error);
    }
}

TEST_CASE("mpc_check examples") {
    const auto env = e2();
    const double mean = env.expected_value();
    // Point mass at the mean: the extreme contraction.
    const auto point = make_affine_icd(0.5, 0.0, mean, mean, 2.0);
    CHECK(mpc_check(env, point));
    CHECK(mpc_check(env, prior_belief(env)));

    // Equal mean but support poking below v_1: the integral test fails near
    // the lower endpoint.
    const auto wide = make_affine_icd(0.5, 0.0, 0.9, mean, 2.0);
    CHECK_FALSE(mpc_check(env, wide));

    const Belief shifted = make_belief(env, {0.4, 0.6});
    CHECK_FALSE(mpc_check(env, shifted));  // mean differs
}

TEST_CASE("detect_affine_costs") {
    CHECK(detect_affine_costs(e2()).affine);
    CHECK(detect_affine_costs(e2()).slope == doctest::Approx(0.5));
    const auto bent =
        make_environment({1.0, 2.0, 3.0}, {0.3, 0.3, 0.4}, {0.5, 1.8, 1.5});
    CHECK_FALSE(detect_affine_costs(bent).affine);
}

TEST_CASE("affine_p_star worked examples") {
    const auto ps2 = affine_p_star(e2());
    CHECK(ps2.p_star == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ps2.pi_us == doctest::Approx(0.25).epsilon(1e-9));

    const auto ps1 = affine_p_star(e1());
    CHECK(ps1.p_star == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ps1.pi_us == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ps1.clamped);

    const auto point = make_environment({5.0}, {1.0}, {2.0});
    const auto psp = affine_p_star(point);
    CHECK(psp.p_star == 5.0);
    CHECK(psp.pi_us == 3.0);
}

TEST_CASE("affine_p_star bisection certificate and family ordering") {
    std::mt19937 rng(23);
    for (int rep = 0; rep < 25; ++rep) {
        const auto env = test_support::random_binary_env(rng, false);
        const auto ps = affine_p_star(env);
        const double eps = 1e-6 * (env.expected_value() - env.min_value());
        const AffineCosts ac = detect_affine_costs(env);
        const auto above = make_affine_icd(ac.slope, ac.intercept, ps.p_star + eps,
                                           env.expected_value(), env.max_value());
        CHECK(mpc_check(env, above, 1e-9));
        if (!ps.clamped) {
            const auto below = make_affine_icd(ac.slope, ac.intercept, ps.p_star - eps,
                                               env.expected_value(), env.max_value());
            CHECK_FALSE(mpc_check(env, below, 1e-12));
        }
        CHECK(mpc_check(env, ps.witness, 1e-9));
    }

    // Nested supports and pointwise MPC order within the family.
    const auto env = e2();
    const AffineCosts ac = detect_affine_costs(env);
    const double Ev = env.expected_value();
    double prev_hi = std::numeric_limits<double>::infinity();
    for (double lo : {1.0, 1.1, 1.2, 1.3, 1.4}) {
        const auto g = make_affine_icd(ac.slope, ac.intercept, lo, Ev, env.max_value());
        CHECK(g.v_hi <= prev_hi + 1e-12);
        prev_hi = g.v_hi;
    }
    const auto wide_g = make_affine_icd(ac.slope, ac.intercept, 1.0, Ev, env.max_value());
    const auto narrow = make_affine_icd(ac.slope, ac.intercept, 1.2, Ev, env.max_value());
    // narrow is an MPC of wide: equal means and dominated integrated CDF.
    const double lo = wide_g.v_lo;
    for (int i = 0; i <= 100; ++i) {
        const double x = lo + (wide_g.v_hi - lo) * i / 100.0;
        CHECK(narrow.integral_cdf(lo, x) <= wide_g.integral_cdf(lo, x) + 1e-9);
    }
}

TEST_CASE("binary_p worked examples") {
    const auto bp2 = binary_p(e2());
    CHECK(bp2.price == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(bp2.pi_us == doctest::Approx(0.25).epsilon(1e-9));
    CHECK_FALSE(bp2.from_fallback);

    const auto bp1 = binary_p(e1());  // slope 0 degenerates the equation
    CHECK(bp1.from_fallback);
    CHECK(bp1.pi_us == doctest::Approx(1.0).epsilon(1e-9));

    const auto slope_one = make_environment({1.0, 2.0}, {0.5, 0.5}, {0.0, 1.0});
    const auto bps = binary_p(slope_one);
    const auto ps = affine_p_star(slope_one);
    CHECK(bps.pi_us == doctest::Approx(ps.pi_us).epsilon(1e-6));

    CHECK_THROWS_AS(binary_p(make_environment({1.0}, {1.0}, {0.0})), input_error);
}

TEST_CASE("binary_p agrees with affine_p_star") {
    std::mt19937 rng(31);
    for (int rep = 0; rep < 60; ++rep) {
        const auto env = test_support::random_binary_env(rng, true);
        const auto bp = binary_p(env);
        const auto ps = affine_p_star(env);
        CHECK(std::fabs(bp.pi_us - ps.pi_us) < 1e-6);
    }
}

TEST_CASE("linear identities hold with residual zero") {
    const auto env = e2();
    const AffineCosts ac = detect_affine_costs(env);

    const auto [rf, rg] =
        verify_linear_identities(env, make_belief(env, {2.0 / 3.0, 1.0 / 3.0}), 1.0, ac.slope,
                                 ac.intercept);
    CHECK(std::fabs(rf) < 1e-12);
    CHECK(std::fabs(rg) < 1e-12);

    const auto [rf2, rg2] = verify_linear_identities(
        env, make_belief(env, {2.0 / 3.0, 1.0 / 3.0}), 2.0, ac.slope, ac.intercept);
    CHECK(std::fabs(rf2) < 1e-12);
    CHECK(std::fabs(rg2) < 1e-12);

    // The identities are integration-by-parts facts: they hold for any
    // belief and interior price, not only ICDs.
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> values{1.0, 1.7, 2.4, 3.6, 5.0};
        std::vector<double> probs(5), weights(5);
        double tp = 0.0, tw = 0.0;
        for (int i = 0; i < 5; ++i) {
            probs[i] = frac(rng);
            weights[i] = frac(rng);
            tp += probs[i];
            tw += weights[i];
        }
        for (int i = 0; i < 5; ++i) {
            probs[i] /= tp;
            weights[i] /= tw;
        }
        const double slope = 0.4, intercept = 0.1;
        std::vector<double> costs(5);
        for (int i = 0; i < 5; ++i) costs[i] = slope * values[i] + intercept;
        const auto env5 = make_environment(values, probs, costs);
        const double p = 1.0 + 4.0 * frac(rng);
        const auto [r1, r2] = verify_linear_identities(env5, make_belief(env5, weights), p,
                                                       slope, intercept);
        CHECK(std::fabs(r1) < 1e-12);
        CHECK(std::fabs(r2) < 1e-12);
    }
}

TEST_CASE("decomposition exports to the documented schema") {
    const auto j = to_json(icd_decompose(e2()));
    REQUIRE(j.contains("components"));
    CHECK(j["components"].size() == 2);
    CHECK(j["components"][0].contains("q"));
    CHECK(j["components"][0].contains("weights"));
    CHECK(j["components"][0].contains("constant"));
}
