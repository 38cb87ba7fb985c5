#ifndef INFODESIGN_GEOMETRY_HPP
#define INFODESIGN_GEOMETRY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infodesign/common.hpp"
#include "infodesign/environment.hpp"
#include "infodesign/equilibrium.hpp"
#include "infodesign/icd.hpp"
#include "json.hpp"

namespace infodesign {

/// Convex polygon of implementable payoff pairs, vertices counterclockwise.
struct PayoffRegion {
    enum class Kind { triangle_all, triangle_us, triangle_fb, negative_envelope };

    Kind kind = Kind::triangle_all;
    std::vector<PayoffPoint> vertices;
    std::map<char, std::size_t> labels;
};

/// max{v_min - E[c], 0}: what the seller can secure under any information.
double seller_guarantee(const Environment& env);

struct FbFloor {
    double value = 0.0;
    std::vector<double> prices;  // argmax set over support prices
};

/// Seller's guaranteed profit against a fully informed buyer. Candidate
/// prices are exactly the support values (profit is piecewise linear with
/// upward jumps only at support points).
FbFloor seller_floor_fb(const Environment& env);

struct UsFloor {
    double value = 0.0;
    bool exact = false;
    std::optional<PStarResult> affine;          // set when exact via the affine closed form
    std::optional<MinProfitResult> search;      // set when bounded via equilibrium search
};

/// Uninformed-seller payoff floor: exact under affine costs, otherwise a
/// certified upper bound from min_seller_profit_search.
UsFloor seller_floor_us(const Environment& env, const MinProfitConfig& config = {});

PayoffRegion region_all(const Environment& env);
PayoffRegion region_us(const Environment& env);
PayoffRegion region_fb(const Environment& env);

bool region_contains(const PayoffRegion& region, PayoffPoint point, double tol = default_tol);
/// Largest half-plane violation (0 when inside).
double region_distance(const PayoffRegion& region, PayoffPoint point);
/// Inner region contained in the outer one (convex inclusion).
bool region_subset(const PayoffRegion& inner, const PayoffRegion& outer,
                   double tol = default_tol);

/// Weighted-payoff bound: sum of mu_i * max{v_min - c_i + lambda (v_i - v_min), 0}.
double s_lambda(const Environment& env, double lambda);

/// Seller profit from efficient trade at the lowest value, floored at zero.
double pi_hat_s(const Environment& env);

std::vector<double> default_lambda_grid();

/// Intersection of buyer/seller rationality half-planes with every
/// lambda-frontier on the grid.
PayoffRegion region_negative(const Environment& env, std::vector<double> lambda_grid);

nlohmann::json to_json(const PayoffRegion& region);
std::string region_to_csv(const PayoffRegion& region);
std::string regions_to_svg(const std::vector<PayoffRegion>& regions);

}  // namespace infodesign

#endif
