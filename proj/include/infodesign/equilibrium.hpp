#ifndef INFODESIGN_EQUILIBRIUM_HPP
#define INFODESIGN_EQUILIBRIUM_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "infodesign/common.hpp"
#include "infodesign/environment.hpp"
#include "infodesign/info_structure.hpp"
#include "json.hpp"

namespace infodesign {

/// Ex-ante payoffs induced by a strategy profile.
PayoffPoint payoffs(const Environment& env, const InformationStructure& s,
                    const StrategyProfile& profile);

/// Seller's conditional expected profit from posting grid price index k
/// after signal t_s, given the buyer strategy.
double seller_price_profit(const Environment& env, const InformationStructure& s,
                           const StrategyProfile& profile, std::size_t t_s, std::size_t k);

struct TremblePoint {
    double n = 0.0;
    double on_path_distance = 0.0;
    double off_path_distance = 0.0;
};

struct VerificationReport {
    bool buyer_optimal = true;
    double buyer_gap = 0.0;  // worst expected-utility loss at an information set
    double buyer_gap_price = 0.0;
    std::size_t buyer_gap_signal = 0;

    bool seller_optimal = true;
    std::vector<double> seller_gaps;  // per seller signal

    bool bayes_on_path = true;
    double bayes_gap = 0.0;  // worst total-variation distance on path

    std::optional<bool> price_independent;
    double price_independent_gap = 0.0;

    std::optional<bool> consistent;
    std::vector<TremblePoint> tremble_trace;

    bool ok() const {
        return buyer_optimal && seller_optimal && bayes_on_path &&
               price_independent.value_or(true) && consistent.value_or(true);
    }
};

nlohmann::json to_json(const VerificationReport& r);

/// Checks the three weak-PBE conditions: buyer sequential rationality at
/// every (price, signal), seller optimality per signal over the grid, and
/// Bayes rule at on-path cells. Reports, never throws, on violations.
VerificationReport verify_wpbe(const Environment& env, const InformationStructure& s,
                               const StrategyProfile& profile, double tol = default_tol);

struct PriceIndependence {
    bool ok = false;
    double gap = 0.0;
};

/// Beliefs must match the signal-conditional posterior at every price.
PriceIndependence verify_price_independent(const InformationStructure& s,
                                           const StrategyProfile& profile,
                                           double tol = default_tol);

/// Full wPBE checks plus belief consistency along the tremble schedule:
/// exact Bayes posteriors under each fully mixed strategy must approach the
/// profile's beliefs, with the off-path limit checked analytically.
VerificationReport verify_sequential(const Environment& env, const InformationStructure& s,
                                     const StrategyProfile& profile,
                                     const TrembleSchedule& trembles,
                                     const std::vector<double>& n_list,
                                     double tol = default_tol);

enum class TieBreak { accept, reject };

/// Threshold acceptance rule from price-independent posterior means.
std::vector<std::vector<double>> buyer_best_response(const Environment& env,
                                                     const InformationStructure& s,
                                                     const std::vector<double>& grid,
                                                     TieBreak tie);

/// Per seller signal, the maximal conditional profit over the grid given a
/// fixed buyer acceptance rule.
std::vector<double> seller_best_response_value(const Environment& env,
                                               const InformationStructure& s,
                                               const std::vector<std::vector<double>>& alpha,
                                               const std::vector<double>& grid);

struct MinProfitConfig {
    std::size_t segments = 4;
    std::vector<double> price_grid;  // optional extra verification prices
    std::size_t restarts = 8;
};

struct MinProfitResult {
    double upper_bound = 0.0;
    InformationStructure structure;
    StrategyProfile profile;
    VerificationReport report;
    PayoffPoint achieved;
};

/// Heuristic upper bound on the uninformed-seller payoff floor: linear
/// programs over buyer segmentations with fixed posterior-mean targets, each
/// incumbent certified as a wPBE with tie-accept buyers before acceptance.
MinProfitResult min_seller_profit_search(const Environment& env,
                                         const MinProfitConfig& config = {});

}  // namespace infodesign

#endif
