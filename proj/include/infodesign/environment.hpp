#ifndef INFODESIGN_ENVIRONMENT_HPP
#define INFODESIGN_ENVIRONMENT_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "infodesign/common.hpp"
#include "json.hpp"

namespace infodesign {

/// A trading environment: finite value support with prior probabilities and
/// per-value seller costs. Immutable after construction.
struct Environment {
    std::vector<double> values;  // strictly increasing
    std::vector<double> probs;   // positive, sums to 1
    std::vector<double> costs;
    bool gains_from_trade = false;  // computed: c_i <= v_i everywhere and positive surplus
    std::string name;

    std::size_t size() const { return values.size(); }
    double min_value() const { return values.front(); }
    double max_value() const { return values.back(); }
    double value_range() const { return values.back() - values.front(); }
    double expected_value() const;
    double expected_cost() const;
};

/// Validates and normalizes raw data into an Environment. Values within
/// 1e-12 of each other are merged into one support point (probability sums,
/// cost becomes the conditional mean).
Environment make_environment(std::vector<double> values, std::vector<double> probs,
                             std::vector<double> costs, std::string name = "");

Environment load_environment(const nlohmann::json& document);
Environment load_environment_file(const std::string& path);
nlohmann::json to_json(const Environment& env);

/// Expected surplus from trade, S = E[v - c(v)].
double surplus(const Environment& env);

struct BidimensionalRow {
    double value = 0.0;
    double cost = 0.0;
    double prob = 0.0;
};

/// Collapses a joint (value, cost) distribution to an Environment by setting
/// the cost at each value to E[c | v].
Environment reduce_bidimensional(const std::vector<BidimensionalRow>& rows,
                                 std::string name = "");
Environment load_bidimensional(const nlohmann::json& document, std::string name = "");

/// Samples an n-point environment from (value, density) pairs: values are
/// equally spaced over the supplied range, probabilities follow the
/// piecewise-linear density, costs come from the supplied function.
Environment grid_environment(std::vector<std::pair<double, double>> density_points,
                             std::size_t n, const std::function<double(double)>& cost,
                             std::string name = "");

/// A probability vector over the environment's value support.
struct Belief {
    std::vector<double> weights;

    double mean(const Environment& env) const;
    double mean_cost(const Environment& env) const;
    std::vector<std::size_t> support(double tol = 1e-15) const;
};

Belief make_belief(const Environment& env, std::vector<double> weights,
                   double tol = default_tol);
Belief point_mass(const Environment& env, std::size_t index);
Belief prior_belief(const Environment& env);

}  // namespace infodesign

#endif
