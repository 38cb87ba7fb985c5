#ifndef INFODESIGN_CONSTRUCT_HPP
#define INFODESIGN_CONSTRUCT_HPP

#include <vector>

#include "infodesign/common.hpp"
#include "infodesign/environment.hpp"
#include "infodesign/equilibrium.hpp"
#include "infodesign/geometry.hpp"
#include "infodesign/info_structure.hpp"

namespace infodesign {

struct Constructed {
    InformationStructure structure;
    StrategyProfile profile;
};

/// Trivial information structure plus a two-price profile hitting any
/// feasible, individually rational payoff pair exactly.
Constructed construct_any(const Environment& env, PayoffPoint target);

/// Fully informed buyer, seller told which ICD component of the prior she
/// faces; seller mixes the bottom (weight beta) and top of each component's
/// support. Payoffs (beta (S - fb floor), fb floor).
Constructed construct_fb(const Environment& env, double beta);

/// Full revelation to the buyer, uninformed seller posting her best price.
Constructed akerlof(const Environment& env);

/// No information on either side; seller extracts the full surplus.
Constructed no_information(const Environment& env);

/// Both sides learn the value; the seller prices at it.
Constructed full_information(const Environment& env);

struct GarbleDiagnostics {
    double z_star = 0.0;  // -infinity when no surplus is destroyed
    double beta = 0.0;
    double p_star = 0.0;
    double pool_fraction = 0.0;
};

struct Garbled {
    InformationStructure structure;
    StrategyProfile profile;
    GarbleDiagnostics diagnostics;
};

/// Pools buyer signals of an uninformed-seller base structure so that one
/// price p_star clears all non-excluded trade and yields the target payoffs.
Garbled garble_to_target(const Environment& env, const InformationStructure& base,
                         const StrategyProfile& base_profile, PayoffPoint target);

/// Max seller profit over grid prices other than p_star, under both extreme
/// tie-breaking rules for indifferent buyers.
double uniqueness_sweep(const Environment& env, const InformationStructure& s,
                        const StrategyProfile& profile, double p_star);

struct UniqueConstructed {
    InformationStructure structure;
    StrategyProfile profile;
    GarbleDiagnostics diagnostics;
    double base_payoff = 0.0;       // certified payoff of the garbled base
    double sweep_max_other = 0.0;   // uniqueness sweep over non-p_star prices
};

/// Garbles a profit-minimizing base so the target is the unique equilibrium
/// payoff: every other price earns at most the base payoff.
UniqueConstructed construct_us_unique(const Environment& env, PayoffPoint target,
                                      const MinProfitConfig& config = {});

/// Public signal splitting the support by the sign of the lambda-weighted
/// gain; trade at max{v_min, E[c | positive]} on the positive branch.
Constructed construct_negative(const Environment& env, double welfare_weight,
                               double tie_alpha);

struct WeightedComponent {
    double weight = 0.0;
    Constructed component;
};

/// Publicly randomizes over component structures sharing a price grid.
Constructed randomize_public(const Environment& env,
                             const std::vector<WeightedComponent>& components);

struct DiscreteConstructed {
    InformationStructure structure;
    StrategyProfile profile;
    TrembleSchedule trembles;
    PayoffPoint achieved;
    double eta = 0.0;
    double delta = 0.0;
    double sigma_h = 0.0;
    int branch = 0;  // 1: c(v_min) > E[c], 2: otherwise
};

/// Finite-grid sequential-equilibrium construction: the seller learns
/// whether v = v_min with small probability, on-path prices snap to the
/// grid, and beliefs come with a tremble schedule certifying consistency.
DiscreteConstructed construct_discrete(const Environment& env, PayoffPoint target,
                                       double epsilon, double grid_step);

/// Smallest half-plane margin of a point inside a region (negative outside).
double interior_margin(const PayoffRegion& region, PayoffPoint point);

}  // namespace infodesign

#endif
