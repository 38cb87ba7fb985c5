#include "infodesign/icd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace infodesign {

namespace {

double price_scale(const Environment& env) { return std::max(1.0, env.value_range()); }

// Shared inclusion rule for "v_i >= p" so atoms are never double counted
// between a profit sum and the matching CDF left limit.
bool sells_to(double v, double p, double scale) { return v >= p - 1e-12 * scale; }

// Integral of the step CDF over [a, b].
double step_integral_cdf(const Environment& env, const std::vector<double>& w, double a,
                         double b) {
    if (b <= a) return 0.0;
    double total = 0.0;
    double mass = 0.0;
    double prev = a;
    for (std::size_t i = 0; i < env.size(); ++i) {
        const double v = env.values[i];
        if (v <= a) {
            mass += w[i];
            continue;
        }
        if (v >= b) break;
        total += mass * (v - prev);
        mass += w[i];
        prev = v;
    }
    total += mass * (b - prev);
    return total;
}

// Greedy seller-indifference recursion on an ascending index subset of the
// support. Anchors at the lowest zero-gap index when one exists at or below
// the top (Case 2), else at the top.
Belief greedy_on_support(const Environment& env, const std::vector<std::size_t>& idx) {
    if (idx.empty()) throw input_error("greedy icd: empty support");
    const double ztol = 1e-12 * price_scale(env);

    std::size_t anchor_pos = idx.size() - 1;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (env.values[idx[k]] - env.costs[idx[k]] <= ztol) {
            anchor_pos = k;
            break;
        }
    }

    std::vector<double> w(env.size(), 0.0);
    w[idx[anchor_pos]] = 1.0;
    double tail = 1.0;
    for (std::size_t k = anchor_pos; k-- > 0;) {
        const std::size_t i = idx[k];
        const double gap = env.values[i] - env.costs[i];
        const double dv = env.values[idx[k + 1]] - env.values[i];
        w[i] = tail * dv / gap;
        tail += w[i];
    }
    for (double& x : w) x /= tail;
    return Belief{std::move(w)};
}

double solve_bisection(const std::function<double(double)>& f, double lo, double hi,
                       int iters = 200) {
    double flo = f(lo);
    for (int it = 0; it < iters && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm <= 0.0) == (flo <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double belief_seller_profit(const Environment& env, const Belief& nu, double price) {
    const double scale = price_scale(env);
    double profit = 0.0;
    for (std::size_t i = 0; i < env.size(); ++i)
        if (sells_to(env.values[i], price, scale))
            profit += (price - env.costs[i]) * nu.weights[i];
    return profit;
}

IcdTest is_icd(const Environment& env, const Belief& nu, double tol) {
    const auto supp = nu.support();
    if (supp.empty()) throw input_error("is_icd: belief has empty support");
    const double tol_abs = tol * price_scale(env);

    const double constant = belief_seller_profit(env, nu, env.values[supp.front()]);
    bool ok = constant >= -tol_abs;
    for (std::size_t k = 1; k < supp.size() && ok; ++k) {
        const double profit = belief_seller_profit(env, nu, env.values[supp[k]]);
        if (std::fabs(profit - constant) > tol_abs) ok = false;
    }
    return {ok, constant};
}

Belief greedy_icd(const Environment& env, std::size_t top_index) {
    if (top_index >= env.size()) throw input_error("greedy_icd: top_index out of range");
    std::vector<std::size_t> idx(top_index + 1);
    for (std::size_t i = 0; i <= top_index; ++i) idx[i] = i;
    return greedy_on_support(env, idx);
}

IcdDecomposition icd_decompose(const Environment& env) {
    if (!env.gains_from_trade)
        throw input_error("icd_decompose: environment must have gains from trade");

    IcdDecomposition out;
    std::vector<double> residual = env.probs;
    for (std::size_t round = 0; round <= env.size(); ++round) {
        std::vector<std::size_t> idx;
        double remaining = 0.0;
        for (std::size_t i = 0; i < env.size(); ++i) {
            if (residual[i] > 1e-14) {
                idx.push_back(i);
                remaining += residual[i];
            }
        }
        if (idx.empty()) break;

        Belief nu = greedy_on_support(env, idx);
        double q = std::numeric_limits<double>::infinity();
        for (std::size_t i : idx)
            if (nu.weights[i] > 0.0) q = std::min(q, residual[i] / nu.weights[i]);

        // Zero all coordinates tied at the minimum ratio simultaneously.
        for (std::size_t i : idx) {
            if (nu.weights[i] <= 0.0) continue;
            const double take = q * nu.weights[i];
            if (residual[i] <= take * (1.0 + 1e-12))
                residual[i] = 0.0;
            else
                residual[i] -= take;
        }
        out.components.push_back({q, nu, is_icd(env, nu).constant});
    }
    return out;
}

nlohmann::json to_json(const IcdDecomposition& d) {
    nlohmann::json components = nlohmann::json::array();
    for (const auto& c : d.components) {
        components.push_back(
            {{"q", c.weight}, {"weights", c.belief.weights}, {"constant", c.constant}});
    }
    return {{"components", components}};
}

std::vector<double> seller_opt_prices(const Environment& env, const Belief& nu, double tol) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> profits(env.size());
    for (std::size_t i = 0; i < env.size(); ++i) {
        profits[i] = belief_seller_profit(env, nu, env.values[i]);
        best = std::max(best, profits[i]);
    }
    std::vector<double> argmax;
    for (std::size_t i = 0; i < env.size(); ++i)
        if (profits[i] >= best - tol) argmax.push_back(env.values[i]);
    return argmax;
}

// --- affine family -----------------------------------------------------

namespace {

constexpr double slope_branch_tol = 1e-9;

struct AffineKernel {
    double a;      // 1 - slope
    double gamma;  // intercept
    double v_lo;
    double h_lo;  // v_lo - c(v_lo)

    double h(double v) const { return a * v - gamma; }

    // Survival 1 - G on [v_lo, v_hi).
    double survival(double v) const {
        if (v <= v_lo) return 1.0;
        if (std::fabs(a) < slope_branch_tol) return std::exp((v - v_lo) / gamma);
        return std::pow(std::max(h(v), 0.0) / h_lo, -1.0 / a);
    }

    // Integral of the survival function over [x, y] within the support.
    double integral_survival(double x, double y) const {
        if (y <= x) return 0.0;
        if (std::fabs(a) < slope_branch_tol)  // slope == 1, exponential branch
            return gamma * (survival(y) - survival(x));
        if (std::fabs(a - 1.0) < slope_branch_tol)  // slope == 0
            return h_lo * std::log(h(y) / h(x));
        const double e = (a - 1.0) / a;
        return std::pow(h_lo, 1.0 / a) * (std::pow(h(y), e) - std::pow(h(x), e)) / (a - 1.0);
    }

    // Largest admissible upper end: where h hits zero (slope > 1), else inf.
    double support_ceiling() const {
        if (a < -slope_branch_tol) return gamma / a;
        return std::numeric_limits<double>::infinity();
    }
};

AffineKernel kernel_of(const AffineIcd& g) {
    return {1.0 - g.cost_slope, g.cost_intercept, g.v_lo, g.v_lo - g.cost(g.v_lo)};
}

}  // namespace

double AffineIcd::cdf(double v) const {
    if (v < v_lo) return 0.0;
    if (v >= v_hi) return 1.0;
    return 1.0 - kernel_of(*this).survival(v);
}

double AffineIcd::cdf_left(double v) const {
    if (v <= v_lo) return 0.0;
    if (v > v_hi) return 1.0;
    return 1.0 - kernel_of(*this).survival(std::min(v, v_hi));
}

double AffineIcd::integral_cdf(double a, double b) const {
    if (b <= a) return 0.0;
    double total = 0.0;
    const double mid_a = std::clamp(a, v_lo, v_hi);
    const double mid_b = std::clamp(b, v_lo, v_hi);
    if (mid_b > mid_a)
        total += (mid_b - mid_a) - kernel_of(*this).integral_survival(mid_a, mid_b);
    if (b > v_hi) total += b - std::max(a, v_hi);
    return total;
}

double AffineIcd::mean() const {
    if (v_hi <= v_lo) return v_lo;
    return v_lo + kernel_of(*this).integral_survival(v_lo, v_hi);
}

double AffineIcd::partial_mean_above(double p) const {
    if (p > v_hi) return 0.0;
    if (p <= v_lo) return mean();
    return v_hi - p * cdf_left(p) - integral_cdf(p, v_hi);
}

double AffineIcd::seller_profit(double p) const {
    if (p > v_hi) return 0.0;
    return (p - cost_intercept) * (1.0 - cdf_left(p)) - cost_slope * partial_mean_above(p);
}

AffineIcd make_affine_icd(double cost_slope, double cost_intercept, double v_lo,
                          double prior_mean, double v_support_max) {
    const double scale = std::max({1.0, std::fabs(prior_mean), std::fabs(v_support_max)});
    AffineIcd g;
    g.cost_slope = cost_slope;
    g.cost_intercept = cost_intercept;
    g.target_mean = prior_mean;

    if (v_lo > prior_mean + 1e-12 * scale)
        throw input_error("affine icd: v_lo must not exceed the target mean");
    if (v_lo >= prior_mean - 1e-12 * scale) {
        // Degenerate member: point mass at the mean.
        g.v_lo = g.v_hi = prior_mean;
        g.atom_mass = 1.0;
        return g;
    }

    g.v_lo = v_lo;
    const AffineKernel k{1.0 - cost_slope, cost_intercept, v_lo,
                         v_lo - (cost_slope * v_lo + cost_intercept)};
    if (k.h_lo <= 0.0)
        throw input_error("affine icd: v_lo does not satisfy v > c(v)");

    const double cap = std::min(k.support_ceiling(), v_support_max * (1.0 + 1e6));
    auto mean_at = [&](double hi) { return v_lo + k.integral_survival(v_lo, hi); };

    // The mean is increasing in the upper end; expand then bisect.
    double lo = v_lo, hi = v_lo + std::max(prior_mean - v_lo, 1e-6 * scale);
    while (hi < cap && mean_at(std::min(hi, cap)) < prior_mean) {
        lo = hi;
        hi = std::min(cap, 2.0 * hi - v_lo + 1.0);
        if (hi >= cap) break;
    }
    hi = std::min(hi, cap);
    if (mean_at(hi) < prior_mean - 1e-12 * scale)
        throw input_error("affine icd: unbounded-support failure, no upper end matches the mean");

    for (int it = 0; it < 200 && hi - lo > 1e-15 * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mean_at(mid) < prior_mean)
            lo = mid;
        else
            hi = mid;
    }
    g.v_hi = 0.5 * (lo + hi);
    g.atom_mass = k.survival(g.v_hi);
    return g;
}

nlohmann::json to_json(const AffineIcd& g) {
    return {{"lambda", g.cost_slope},
            {"gamma", g.cost_intercept},
            {"v_lo", g.v_lo},
            {"v_hi", g.v_hi},
            {"atom_mass", g.atom_mass}};
}

std::string affine_icd_cdf_csv(const AffineIcd& g, std::size_t samples) {
    std::ostringstream out;
    out.precision(17);
    out << "v,G\n";
    const std::size_t m = std::max<std::size_t>(samples, 2);
    for (std::size_t i = 0; i < m; ++i) {
        const double v = g.v_lo + (g.v_hi - g.v_lo) * double(i) / double(m - 1);
        out << v << "," << g.cdf(v) << "\n";
    }
    return out.str();
}

// --- MPC ---------------------------------------------------------------

bool mpc_check(const Environment& env, const Belief& candidate, double tol) {
    const Belief prior = prior_belief(env);
    if (std::fabs(candidate.mean(env) - prior.mean(env)) > tol) return false;
    const double lo = env.min_value();
    for (double x : env.values) {
        const double dg = step_integral_cdf(env, candidate.weights, lo, x);
        const double df = step_integral_cdf(env, prior.weights, lo, x);
        if (dg > df + tol) return false;
    }
    return true;
}

bool mpc_check(const Environment& env, const AffineIcd& candidate, double tol) {
    if (std::fabs(candidate.mean() - env.expected_value()) > tol) return false;
    const double lo = std::min(env.min_value(), candidate.v_lo);
    std::vector<double> kinks = env.values;
    kinks.push_back(candidate.v_lo);
    kinks.push_back(candidate.v_hi);
    for (double x : kinks) {
        const double dg = candidate.integral_cdf(lo, x);
        const double df = step_integral_cdf(env, env.probs, lo, x);
        if (dg > df + tol) return false;
    }
    return true;
}

AffineCosts detect_affine_costs(const Environment& env, double tol) {
    AffineCosts out;
    if (env.size() == 1) {
        out.affine = true;
        out.slope = 0.0;
        out.intercept = env.costs[0];
        return out;
    }
    out.slope = (env.costs.back() - env.costs.front()) / (env.values.back() - env.values.front());
    out.intercept = env.costs.front() - out.slope * env.values.front();
    out.affine = true;
    for (std::size_t i = 0; i < env.size(); ++i) {
        if (std::fabs(env.costs[i] - (out.slope * env.values[i] + out.intercept)) > tol) {
            out.affine = false;
            break;
        }
    }
    return out;
}

PStarResult affine_p_star(const Environment& env) {
    const AffineCosts ac = detect_affine_costs(env);
    if (!ac.affine) throw input_error("affine_p_star: costs are not affine in values");

    const double Ev = env.expected_value();
    const double Ec = env.expected_cost();
    const double scale = price_scale(env);
    const double cap = env.max_value();

    PStarResult out;
    if (env.size() == 1) {
        out.p_star = env.values[0];
        out.pi_us = env.values[0] - env.costs[0];
        out.witness = make_affine_icd(ac.slope, ac.intercept, Ev, Ev, cap);
        out.clamped = true;
        return out;
    }

    // Family members below max{v_1, E[c]} are not ICDs (negative constant)
    // or not MPCs (support escapes below v_1).
    const double domain_lo = std::max(env.min_value(), Ec);
    const double mpc_tol = 1e-12 * scale;

    auto feasible = [&](double v_star) {
        if (v_star >= Ev) return true;  // point mass at the mean
        try {
            const AffineIcd g = make_affine_icd(ac.slope, ac.intercept, v_star, Ev, cap);
            return mpc_check(env, g, mpc_tol);
        } catch (const input_error&) {
            return false;
        }
    };

    double lo = domain_lo, hi = Ev;
    if (feasible(lo)) {
        out.p_star = lo;
        out.clamped = true;
    } else {
        for (int it = 0; it < 200 && hi - lo > 1e-13 * scale; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (feasible(mid))
                hi = mid;
            else
                lo = mid;
        }
        out.p_star = hi;  // feasible side of the final bracket
    }
    out.pi_us = out.p_star - Ec;
    out.witness = make_affine_icd(ac.slope, ac.intercept, out.p_star, Ev, cap);
    return out;
}

BinaryPResult binary_p(const Environment& env) {
    if (env.size() != 2) throw input_error("binary_p: environment must have binary support");
    const AffineCosts ac = detect_affine_costs(env);
    const double Ev = env.expected_value();
    const double Ec = env.expected_cost();
    const double v1 = env.values[0], v2 = env.values[1];
    const double lambda = ac.slope;

    auto fallback = [&]() {
        const PStarResult ps = affine_p_star(env);
        return BinaryPResult{ps.p_star, ps.pi_us, true};
    };
    if (std::fabs(lambda) < 1e-9) return fallback();  // displayed equation degenerates

    const double lo = std::max(Ec, v1 - 1e-9 * std::max(1.0, std::fabs(v1)));
    const double hi = Ev;
    auto f = [&](double p) {
        const double cp = ac.slope * p + ac.intercept;
        if (std::fabs(lambda - 1.0) < 1e-9)
            return -ac.intercept * std::exp((v2 - p) / ac.intercept) - (p - Ec);
        const double base = std::max(p - cp, 0.0);
        const double rhs = std::pow(std::max(v2 - (ac.slope * v2 + ac.intercept), 0.0),
                                    lambda / (lambda - 1.0));
        return std::pow(base, 1.0 / (lambda - 1.0)) * (p - Ec) - rhs;
    };

    const double flo = f(lo), fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo <= 0.0) == (fhi <= 0.0))
        return fallback();

    const double p = solve_bisection(f, lo, hi);
    return BinaryPResult{p, std::max(p, v1) - Ec, false};
}

// --- linear identities --------------------------------------------------

namespace {

// lambda * int_p^{vbar} F = Pi_F(p) - (1 - F(p-)) (p - c(p)) + lambda (vbar - p)
// for any CDF F; the residual is the difference of the two sides.
double identity_residual(double lambda, double intercept, double p, double vbar,
                         double integral_cdf_p_to_vbar, double cdf_left_p, double profit_p) {
    const double cp = lambda * p + intercept;
    const double rhs = profit_p - (1.0 - cdf_left_p) * (p - cp) + lambda * (vbar - p);
    return lambda * integral_cdf_p_to_vbar - rhs;
}

}  // namespace

std::pair<double, double> verify_linear_identities(const Environment& env, const Belief& g,
                                                   double p, double slope, double intercept) {
    const double vbar = env.max_value();
    const double scale = price_scale(env);

    auto residual_for = [&](const std::vector<double>& w) {
        double profit = 0.0, left = 0.0;
        for (std::size_t i = 0; i < env.size(); ++i) {
            if (sells_to(env.values[i], p, scale))
                profit += (p - env.costs[i]) * w[i];
            else
                left += w[i];
        }
        return identity_residual(slope, intercept, p, vbar,
                                 step_integral_cdf(env, w, p, vbar), left, profit);
    };
    return {residual_for(env.probs), residual_for(g.weights)};
}

std::pair<double, double> verify_linear_identities(const Environment& env, const AffineIcd& g,
                                                   double p, double slope, double intercept) {
    const double vbar = std::max(env.max_value(), g.v_hi);
    const double scale = price_scale(env);

    double profit_f = 0.0, left_f = 0.0;
    for (std::size_t i = 0; i < env.size(); ++i) {
        if (sells_to(env.values[i], p, scale))
            profit_f += (p - env.costs[i]) * env.probs[i];
        else
            left_f += env.probs[i];
    }
    double int_f = step_integral_cdf(env, env.probs, p, vbar);
    const double res_f = identity_residual(slope, intercept, p, vbar, int_f, left_f, profit_f);

    const double res_g = identity_residual(slope, intercept, p, vbar, g.integral_cdf(p, vbar),
                                           g.cdf_left(p), g.seller_profit(p));
    return {res_f, res_g};
}

}  // namespace infodesign
