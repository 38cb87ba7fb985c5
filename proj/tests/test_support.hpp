#ifndef INFODESIGN_TEST_SUPPORT_HPP
#define INFODESIGN_TEST_SUPPORT_HPP

#include <random>
#include <vector>

#include "infodesign/environment.hpp"

namespace test_support {

inline infodesign::Environment e1() {
    return infodesign::make_environment({1.0, 2.0}, {0.5, 0.5}, {0.0, 0.0}, "E1");
}

inline infodesign::Environment e2() {
    return infodesign::make_environment({1.0, 2.0}, {0.5, 0.5}, {0.5, 1.0}, "E2");
}

inline infodesign::Environment e3() {
    return infodesign::make_environment({1.0, 2.0}, {0.5, 0.5}, {3.0, 0.0}, "E3");
}

/// Random environment with gains from trade: values in [0, 10], costs below
/// values, strictly positive surplus.
inline infodesign::Environment random_gft_env(std::mt19937& rng, std::size_t min_n = 2,
                                              std::size_t max_n = 8) {
    std::uniform_int_distribution<std::size_t> size_dist(min_n, max_n);
    std::uniform_real_distribution<double> unif(0.0, 10.0);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (;;) {
        const std::size_t n = size_dist(rng);
        std::vector<double> values;
        while (values.size() < n) {
            const double v = unif(rng);
            bool distinct = true;
            for (double w : values)
                if (std::fabs(w - v) < 1e-3) distinct = false;
            if (distinct) values.push_back(v);
        }
        std::sort(values.begin(), values.end());
        std::vector<double> probs(n), costs(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            probs[i] = 0.05 + frac(rng);
            total += probs[i];
            costs[i] = values[i] * frac(rng);
        }
        for (double& p : probs) p /= total;
        const auto env = infodesign::make_environment(values, probs, costs);
        if (env.gains_from_trade) return env;
    }
}

/// Random binary environment with affine (automatic) costs and gains from
/// trade; optionally bounded away from the degenerate slopes 0 and 1.
inline infodesign::Environment random_binary_env(std::mt19937& rng, bool nondegenerate) {
    std::uniform_real_distribution<double> unif(0.0, 10.0);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    for (;;) {
        double v1 = unif(rng), v2 = unif(rng);
        if (std::fabs(v1 - v2) < 0.1) continue;
        if (v1 > v2) std::swap(v1, v2);
        const double c1 = v1 * frac(rng);
        const double c2 = v2 * frac(rng);
        const double p1 = frac(rng);
        const auto out = infodesign::make_environment({v1, v2}, {p1, 1.0 - p1}, {c1, c2});
        if (!out.gains_from_trade) continue;
        if (nondegenerate) {
            const double slope = (c2 - c1) / (v2 - v1);
            if (std::fabs(slope) < 1e-3 || std::fabs(slope - 1.0) < 1e-3) continue;
        }
        return out;
    }
}

/// Barycentric lattice of a triangle with `levels` subdivisions per side:
/// (levels + 1)(levels + 2) / 2 points.
inline std::vector<infodesign::PayoffPoint> triangle_lattice(
    const std::vector<infodesign::PayoffPoint>& corners, int levels) {
    std::vector<infodesign::PayoffPoint> points;
    for (int i = 0; i <= levels; ++i) {
        for (int j = 0; j + i <= levels; ++j) {
            const int k = levels - i - j;
            const double wi = double(i) / levels, wj = double(j) / levels,
                         wk = double(k) / levels;
            points.push_back({corners[0].pi_b * wi + corners[1].pi_b * wj + corners[2].pi_b * wk,
                              corners[0].pi_s * wi + corners[1].pi_s * wj + corners[2].pi_s * wk});
        }
    }
    return points;
}

}  // namespace test_support

#endif
