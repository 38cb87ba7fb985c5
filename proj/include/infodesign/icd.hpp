#ifndef INFODESIGN_ICD_HPP
#define INFODESIGN_ICD_HPP

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "infodesign/environment.hpp"
#include "json.hpp"

namespace infodesign {

/// Seller's profit from posting `price` against belief `nu`:
/// sum over v_i >= price of (price - c_i) * nu_i.
double belief_seller_profit(const Environment& env, const Belief& nu, double price);

struct IcdTest {
    bool is_icd = false;
    double constant = 0.0;  // common profit on the support when is_icd
};

/// A belief is an incentive-compatible distribution when the seller is
/// indifferent across all support prices and the common profit is
/// nonnegative. The tolerance is relative to the environment's value range.
IcdTest is_icd(const Environment& env, const Belief& nu, double tol = default_tol);

/// Greedy ICD supported on an upper segment of {v_1, ..., v_top}. When some
/// support point at or below top_index has v_i = c_i, the recursion anchors
/// at the lowest such point and the ICD has constant zero.
Belief greedy_icd(const Environment& env, std::size_t top_index);

struct IcdComponent {
    double weight = 0.0;
    Belief belief;
    double constant = 0.0;  // seller-indifference profit of this component
};

struct IcdDecomposition {
    std::vector<IcdComponent> components;
};

/// Splits the prior into a convex combination of ICDs by repeated greedy
/// construction and removal. Terminates in at most n steps.
IcdDecomposition icd_decompose(const Environment& env);

nlohmann::json to_json(const IcdDecomposition& d);

/// Argmax set of the seller's profit over support prices, ties included.
std::vector<double> seller_opt_prices(const Environment& env, const Belief& nu,
                                      double tol = 1e-12);

/// Closed-form ICD family for affine costs c(v) = slope*v + intercept,
/// supported on [v_lo, v_hi] with a mass point at v_hi. v_hi is pinned down
/// by the mean condition E_G[v] = prior mean.
struct AffineIcd {
    double cost_slope = 0.0;
    double cost_intercept = 0.0;
    double v_lo = 0.0;
    double v_hi = 0.0;
    double atom_mass = 0.0;  // 1 - G(v_hi^-)
    double target_mean = 0.0;

    double cost(double v) const { return cost_slope * v + cost_intercept; }
    double cdf(double v) const;       // right-continuous
    double cdf_left(double v) const;  // G(v^-)
    /// Integral of the CDF over [a, b].
    double integral_cdf(double a, double b) const;
    double mean() const;
    /// Integral of s over [p, v_hi] against dG (atom included).
    double partial_mean_above(double p) const;
    /// Seller profit from price p: integral over [p, v_hi] of (p - c(s)) dG.
    double seller_profit(double p) const;
};

/// Builds the closed-form ICD, solving for v_hi by bisection on the mean
/// condition. Throws input_error if no upper end below the cap matches the
/// target mean (unbounded-support failure).
AffineIcd make_affine_icd(double cost_slope, double cost_intercept, double v_lo,
                          double prior_mean, double v_support_max);

nlohmann::json to_json(const AffineIcd& g);
std::string affine_icd_cdf_csv(const AffineIcd& g, std::size_t samples = 200);

/// Mean-preserving-contraction test of a candidate against the prior:
/// equal means and integrated CDF of the candidate below the prior's at
/// every kink of either CDF.
bool mpc_check(const Environment& env, const Belief& candidate, double tol = default_tol);
bool mpc_check(const Environment& env, const AffineIcd& candidate, double tol = default_tol);

struct AffineCosts {
    bool affine = false;
    double slope = 0.0;
    double intercept = 0.0;
};

/// Detects whether the cost vector is affine in values within tol.
AffineCosts detect_affine_costs(const Environment& env, double tol = 1e-10);

struct PStarResult {
    double p_star = 0.0;
    double pi_us = 0.0;   // p_star - E[c]
    AffineIcd witness;
    bool clamped = false;  // p_star clamped at the family's lower domain end
};

/// Uninformed-seller payoff floor under affine costs: the most dispersed
/// family ICD that is still an MPC of the prior, found by bisection over the
/// family's MPC ordering.
PStarResult affine_p_star(const Environment& env);

struct BinaryPResult {
    double price = 0.0;
    double pi_us = 0.0;
    bool from_fallback = false;  // root bracketing failed; affine_p_star used
};

/// Binary-support closed form for the uninformed-seller floor. Falls back to
/// affine_p_star when the displayed equation degenerates.
BinaryPResult binary_p(const Environment& env);

/// Residuals of the two integration-by-parts identities at price p for the
/// prior CDF F (from env) and a candidate G, under affine costs.
std::pair<double, double> verify_linear_identities(const Environment& env, const Belief& g,
                                                   double p, double slope, double intercept);
std::pair<double, double> verify_linear_identities(const Environment& env, const AffineIcd& g,
                                                   double p, double slope, double intercept);

}  // namespace infodesign

#endif
