#ifndef INFODESIGN_INFO_STRUCTURE_HPP
#define INFODESIGN_INFO_STRUCTURE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "infodesign/environment.hpp"
#include "json.hpp"

namespace infodesign {

/// Finite joint distribution over (seller signal, buyer signal, value) whose
/// value marginal equals the prior.
struct InformationStructure {
    std::vector<std::string> seller_signals;
    std::vector<std::string> buyer_signals;
    // joint[s][b][i] >= 0, sums to 1 over all cells
    std::vector<std::vector<std::vector<double>>> joint;

    std::size_t n_seller() const { return seller_signals.size(); }
    std::size_t n_buyer() const { return buyer_signals.size(); }
    std::size_t n_values() const;

    double seller_marginal(std::size_t s) const;
    double buyer_marginal(std::size_t b) const;
    std::vector<double> value_marginal() const;
    /// P(v | t_b); uniform over support if the signal has zero mass.
    Belief posterior_given_buyer(std::size_t b) const;
    double buyer_posterior_mean(const Environment& env, std::size_t b) const;
};

struct ClassTags {
    bool uninformed_seller = false;
    bool fully_informed_buyer = false;
    bool more_informed_buyer = false;
};

ClassTags classify(const InformationStructure& s, double tol = 1e-12);

/// Checks the Bayes-plausibility invariant (value marginal equals the prior)
/// plus shape and nonnegativity; throws input_error on failure.
void validate_structure(const Environment& env, const InformationStructure& s,
                        double tol = default_tol);

/// Seller price distributions, buyer acceptance probabilities, and buyer
/// beliefs on a shared finite price grid.
struct StrategyProfile {
    std::vector<double> price_grid;                    // sorted, deduplicated
    std::vector<std::vector<double>> seller_strategy;  // [t_s][price] rows sum to 1
    std::vector<std::vector<double>> buyer_strategy;   // [price][t_b] in [0,1]
    std::vector<std::vector<Belief>> beliefs;          // [price][t_b]

    std::size_t price_index(double p, double tol = 1e-9) const;
};

void validate_profile(const Environment& env, const InformationStructure& s,
                      const StrategyProfile& profile, double tol = default_tol);

/// Fully mixed seller strategies sigma_n(p|t_s) = (n^e - 1)/n^e sigma(p|t_s)
/// + n^-e / k, one exponent e per seller signal; converges to sigma.
struct TrembleSchedule {
    std::vector<int> exponents;

    std::vector<std::vector<double>> mixed(const StrategyProfile& profile, double n) const;
};

/// Default verification grid: support values, extra on-path prices, and
/// sentinel prices just outside the support hull.
std::vector<double> default_price_grid(const Environment& env,
                                       const std::vector<double>& extra = {});
double sentinel_step(const Environment& env);

nlohmann::json to_json(const InformationStructure& s);
InformationStructure structure_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StrategyProfile& p);
StrategyProfile profile_from_json(const nlohmann::json& j);

}  // namespace infodesign

#endif
