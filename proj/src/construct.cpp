#include "infodesign/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "infodesign/icd.hpp"

namespace infodesign {

namespace {

double mean_band(const Environment& env) { return 1e-12 * std::max(1.0, env.value_range()); }

std::size_t grid_index_of(const std::vector<double>& grid, double p) {
    std::size_t best = 0;
    double err = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double e = std::fabs(grid[k] - p);
        if (e < err) {
            err = e;
            best = k;
        }
    }
    if (err > 1e-9) throw input_error("price not on the grid");
    return best;
}

// Threshold acceptance against the profile's own beliefs, tie-accept.
double accept_given_belief(const Environment& env, const Belief& nu, double p) {
    return nu.mean(env) >= p - mean_band(env) ? 1.0 : 0.0;
}

Belief delta_low(const Environment& env) { return point_mass(env, 0); }

// On-path Bayes posterior for a single-buyer-signal structure.
Belief bayes_posterior(const Environment& env, const InformationStructure& s,
                       const std::vector<std::vector<double>>& sigma, std::size_t k,
                       std::size_t tb) {
    std::vector<double> w(env.size(), 0.0);
    double mass = 0.0;
    for (std::size_t ts = 0; ts < s.n_seller(); ++ts) {
        for (std::size_t i = 0; i < env.size(); ++i) {
            w[i] += sigma[ts][k] * s.joint[ts][tb][i];
            mass += sigma[ts][k] * s.joint[ts][tb][i];
        }
    }
    if (mass <= 0.0) return delta_low(env);
    for (double& x : w) x /= mass;
    return Belief{std::move(w)};
}

}  // namespace

double interior_margin(const PayoffRegion& region, PayoffPoint point) {
    const auto& v = region.vertices;
    if (v.size() < 3) return -region_distance(region, point);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const PayoffPoint& a = v[i];
        const PayoffPoint& b = v[(i + 1) % v.size()];
        const double len = std::hypot(b.pi_b - a.pi_b, b.pi_s - a.pi_s);
        if (len < 1e-15) continue;
        const double cross = (b.pi_b - a.pi_b) * (point.pi_s - a.pi_s) -
                             (b.pi_s - a.pi_s) * (point.pi_b - a.pi_b);
        margin = std::min(margin, cross / len);
    }
    return margin;
}

Constructed construct_any(const Environment& env, PayoffPoint target) {
    if (!env.gains_from_trade)
        throw input_error("construct_any: environment must have gains from trade");
    const PayoffRegion region = region_all(env);
    if (!region_contains(region, target, default_tol))
        throw infeasible_error("construct_any: target outside the implementable region",
                               region_distance(region, target));

    const double total = surplus(env);
    const double Ev = env.expected_value();
    const double Ec = env.expected_cost();
    const double v_min = env.min_value();
    const double pi_s = std::clamp(target.pi_s, seller_guarantee(env), total);
    const double pi_b = std::clamp(target.pi_b, 0.0, total - pi_s);

    const double p_l = pi_s + Ec;
    const double p_h = Ev;
    const bool degenerate = total - pi_s <= 1e-12 * std::max(1.0, total);

    Constructed out;
    out.structure.seller_signals = {"s"};
    out.structure.buyer_signals = {"b"};
    out.structure.joint = {{env.probs}};

    StrategyProfile& prof = out.profile;
    prof.price_grid = default_price_grid(env, {p_l, p_h});
    const std::size_t np = prof.price_grid.size();
    const std::size_t kl = grid_index_of(prof.price_grid, p_l);
    const std::size_t kh = grid_index_of(prof.price_grid, p_h);

    prof.seller_strategy.assign(1, std::vector<double>(np, 0.0));
    if (degenerate) {
        prof.seller_strategy[0][kh] = 1.0;
    } else {
        const double sl = pi_b / (Ev - p_l);
        prof.seller_strategy[0][kl] = sl;
        prof.seller_strategy[0][kh] += 1.0 - sl;
    }

    const Belief prior = prior_belief(env);
    prof.buyer_strategy.assign(np, std::vector<double>(1, 0.0));
    prof.beliefs.assign(np, std::vector<Belief>(1, delta_low(env)));
    const double band = mean_band(env);
    for (std::size_t k = 0; k < np; ++k) {
        const double p = prof.price_grid[k];
        if (k == kl || k == kh) {
            prof.beliefs[k][0] = prior;
            if (k == kh && !degenerate)
                prof.buyer_strategy[k][0] = (p_l - Ec) / (p_h - Ec);
            else
                prof.buyer_strategy[k][0] = 1.0;
        } else {
            prof.buyer_strategy[k][0] = p <= v_min + band ? 1.0 : 0.0;
        }
    }
    return out;
}

Constructed construct_fb(const Environment& env, double beta) {
    if (!env.gains_from_trade)
        throw input_error("construct_fb: environment must have gains from trade");
    if (beta < 0.0 || beta > 1.0) throw input_error("construct_fb: beta must be in [0,1]");

    const IcdDecomposition decomposition = icd_decompose(env);
    const std::size_t J = decomposition.components.size();
    const std::size_t n = env.size();

    Constructed out;
    out.structure.seller_signals.resize(J);
    out.structure.buyer_signals.resize(n);
    for (std::size_t j = 0; j < J; ++j)
        out.structure.seller_signals[j] = "icd" + std::to_string(j);
    for (std::size_t i = 0; i < n; ++i) out.structure.buyer_signals[i] = "v" + std::to_string(i);
    out.structure.joint.assign(
        J, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t i = 0; i < n; ++i)
            out.structure.joint[j][i][i] =
                decomposition.components[j].weight * decomposition.components[j].belief.weights[i];

    StrategyProfile& prof = out.profile;
    prof.price_grid = default_price_grid(env);
    const std::size_t np = prof.price_grid.size();

    prof.seller_strategy.assign(J, std::vector<double>(np, 0.0));
    for (std::size_t j = 0; j < J; ++j) {
        const auto supp = decomposition.components[j].belief.support();
        const double lo = env.values[supp.front()];
        const double hi = env.values[supp.back()];
        prof.seller_strategy[j][grid_index_of(prof.price_grid, lo)] += beta;
        prof.seller_strategy[j][grid_index_of(prof.price_grid, hi)] += 1.0 - beta;
    }

    const double band = mean_band(env);
    prof.buyer_strategy.assign(np, std::vector<double>(n, 0.0));
    prof.beliefs.assign(np, std::vector<Belief>{});
    for (std::size_t k = 0; k < np; ++k) {
        prof.beliefs[k].reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            prof.buyer_strategy[k][i] = env.values[i] >= prof.price_grid[k] - band ? 1.0 : 0.0;
            prof.beliefs[k].push_back(point_mass(env, i));
        }
    }
    return out;
}

Constructed akerlof(const Environment& env) {
    if (!env.gains_from_trade)
        throw input_error("akerlof: environment must have gains from trade");
    const std::size_t n = env.size();

    Constructed out;
    out.structure.seller_signals = {"s"};
    out.structure.buyer_signals.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.structure.buyer_signals[i] = "v" + std::to_string(i);
    out.structure.joint.assign(1, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
    for (std::size_t i = 0; i < n; ++i) out.structure.joint[0][i][i] = env.probs[i];

    StrategyProfile& prof = out.profile;
    prof.price_grid = default_price_grid(env);
    const std::size_t np = prof.price_grid.size();
    prof.seller_strategy.assign(1, std::vector<double>(np, 0.0));
    prof.seller_strategy[0][grid_index_of(prof.price_grid, seller_floor_fb(env).prices.front())] =
        1.0;

    const double band = mean_band(env);
    prof.buyer_strategy.assign(np, std::vector<double>(n, 0.0));
    prof.beliefs.assign(np, std::vector<Belief>{});
    for (std::size_t k = 0; k < np; ++k) {
        prof.beliefs[k].reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            prof.buyer_strategy[k][i] = env.values[i] >= prof.price_grid[k] - band ? 1.0 : 0.0;
            prof.beliefs[k].push_back(point_mass(env, i));
        }
    }
    return out;
}

Constructed no_information(const Environment& env) {
    if (!env.gains_from_trade)
        throw input_error("no_information: environment must have gains from trade");
    Constructed out;
    out.structure.seller_signals = {"s"};
    out.structure.buyer_signals = {"b"};
    out.structure.joint = {{env.probs}};

    StrategyProfile& prof = out.profile;
    const double Ev = env.expected_value();
    prof.price_grid = default_price_grid(env, {Ev});
    const std::size_t np = prof.price_grid.size();
    prof.seller_strategy.assign(1, std::vector<double>(np, 0.0));
    prof.seller_strategy[0][grid_index_of(prof.price_grid, Ev)] = 1.0;

    const Belief prior = prior_belief(env);
    prof.buyer_strategy.assign(np, std::vector<double>(1, 0.0));
    prof.beliefs.assign(np, std::vector<Belief>(1, prior));
    for (std::size_t k = 0; k < np; ++k)
        prof.buyer_strategy[k][0] = accept_given_belief(env, prior, prof.price_grid[k]);
    return out;
}

Constructed full_information(const Environment& env) {
    if (!env.gains_from_trade)
        throw input_error("full_information: environment must have gains from trade");
    const std::size_t n = env.size();
    Constructed out;
    out.structure.seller_signals.resize(n);
    out.structure.buyer_signals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.structure.seller_signals[i] = "v" + std::to_string(i);
        out.structure.buyer_signals[i] = "v" + std::to_string(i);
    }
    out.structure.joint.assign(n, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
    for (std::size_t i = 0; i < n; ++i) out.structure.joint[i][i][i] = env.probs[i];

    StrategyProfile& prof = out.profile;
    prof.price_grid = default_price_grid(env);
    const std::size_t np = prof.price_grid.size();
    prof.seller_strategy.assign(n, std::vector<double>(np, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        prof.seller_strategy[i][grid_index_of(prof.price_grid, env.values[i])] = 1.0;

    const double band = mean_band(env);
    prof.buyer_strategy.assign(np, std::vector<double>(n, 0.0));
    prof.beliefs.assign(np, std::vector<Belief>{});
    for (std::size_t k = 0; k < np; ++k) {
        prof.beliefs[k].reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            prof.buyer_strategy[k][i] = env.values[i] >= prof.price_grid[k] - band ? 1.0 : 0.0;
            prof.beliefs[k].push_back(point_mass(env, i));
        }
    }
    return out;
}

Garbled garble_to_target(const Environment& env, const InformationStructure& base,
                         const StrategyProfile& base_profile, PayoffPoint target) {
    if (!classify(base).uninformed_seller)
        throw input_error("garble_to_target: base must have an uninformed seller");
    const PayoffRegion region = region_all(env);
    if (!region_contains(region, target, default_tol))
        throw infeasible_error("garble_to_target: target outside the implementable region",
                               region_distance(region, target));

    const std::size_t n = env.size();
    const std::size_t nb = base.n_buyer();
    const double band = mean_band(env);

    // Base seller payoff: best profit against tie-accept threshold buyers.
    // The base profile's grid is reused so the comparison covers its kinks.
    std::vector<double> sweep_grid = base_profile.price_grid;
    for (std::size_t b = 0; b < nb; ++b) sweep_grid.push_back(base.buyer_posterior_mean(env, b));
    std::sort(sweep_grid.begin(), sweep_grid.end());
    double base_payoff = 0.0;
    for (double p : sweep_grid) {
        double profit = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            if (base.buyer_posterior_mean(env, b) < p - band) continue;
            for (std::size_t i = 0; i < n; ++i)
                profit += base.joint[0][b][i] * (p - env.costs[i]);
        }
        base_payoff = std::max(base_payoff, profit);
    }
    if (target.pi_s < base_payoff - default_tol)
        throw input_error("garble_to_target: target seller payoff below the base payoff");

    // Group buyer signals into posterior-mean classes.
    std::vector<double> means(nb), masses(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        means[b] = base.buyer_posterior_mean(env, b);
        masses[b] = base.buyer_marginal(b);
    }
    std::vector<std::size_t> order(nb);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return means[a] < means[b]; });
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t b : order) {
        if (masses[b] <= 1e-15) continue;
        if (!classes.empty() && std::fabs(means[classes.back().front()] - means[b]) <= band)
            classes.back().push_back(b);
        else
            classes.push_back({b});
    }

    const double total = surplus(env);
    double gamma = total - target.pi_b - target.pi_s;
    gamma = std::max(gamma, 0.0);

    // Walk classes from the bottom: exclude whole classes while their surplus
    // fits in gamma, then a beta fraction of the crossing class.
    GarbleDiagnostics diag;
    diag.z_star = -std::numeric_limits<double>::infinity();
    std::vector<double> keep(classes.size(), 1.0);
    double remaining = gamma;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (remaining <= 1e-15) break;
        double class_surplus = 0.0;
        for (std::size_t b : classes[c])
            for (std::size_t i = 0; i < n; ++i)
                class_surplus += base.joint[0][b][i] * (env.values[i] - env.costs[i]);
        if (class_surplus <= remaining + 1e-15) {
            keep[c] = 0.0;
            remaining -= class_surplus;
            diag.beta = 1.0;
            diag.z_star = means[classes[c].front()];
        } else {
            diag.beta = remaining / class_surplus;
            diag.z_star = means[classes[c].front()];
            keep[c] = 1.0 - diag.beta;
            remaining = 0.0;
        }
    }

    double traded_mass = 0.0, traded_cost = 0.0, traded_value = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (std::size_t b : classes[c]) {
            traded_mass += keep[c] * masses[b];
            for (std::size_t i = 0; i < n; ++i) {
                traded_cost += keep[c] * base.joint[0][b][i] * env.costs[i];
                traded_value += keep[c] * base.joint[0][b][i] * env.values[i];
            }
        }
    }

    Garbled out;
    if (traded_mass <= 1e-14) {
        // Full exclusion: the no-trade profile.
        out.structure = base;
        out.profile.price_grid = default_price_grid(env);
        const std::size_t np = out.profile.price_grid.size();
        out.profile.seller_strategy.assign(1, std::vector<double>(np, 0.0));
        out.profile.seller_strategy[0][np - 1] = 1.0;
        out.profile.buyer_strategy.assign(np, std::vector<double>(nb, 0.0));
        out.profile.beliefs.assign(np, std::vector<Belief>{});
        for (std::size_t k = 0; k < np; ++k)
            for (std::size_t b = 0; b < nb; ++b) {
                out.profile.beliefs[k].push_back(base.posterior_given_buyer(b));
                out.profile.buyer_strategy[k][b] =
                    accept_given_belief(env, out.profile.beliefs[k].back(),
                                        out.profile.price_grid[k]);
            }
        diag.p_star = out.profile.price_grid[np - 1];
        out.diagnostics = diag;
        return out;
    }

    diag.p_star = (target.pi_s + traded_cost) / traded_mass;

    // Pool all traded signals with mean below p_star and a lambda fraction of
    // those above, so the pooled posterior mean is exactly p_star.
    double deficit = 0.0, excess = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const double m = means[classes[c].front()];
        for (std::size_t b : classes[c]) {
            double value_b = 0.0;
            for (std::size_t i = 0; i < n; ++i) value_b += base.joint[0][b][i] * env.values[i];
            if (m < diag.p_star - band)
                deficit += keep[c] * (diag.p_star * masses[b] - value_b);
            else
                excess += keep[c] * (value_b - diag.p_star * masses[b]);
        }
    }
    diag.pool_fraction = excess > 1e-15 ? std::clamp(deficit / excess, 0.0, 1.0) : 0.0;

    // Assemble the garbled joint: per signal, an excluded share keeps the
    // original label, a pooled share moves to t_pool, the rest stays.
    InformationStructure s;
    s.seller_signals = {"s"};
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::vector<double> pool_row(n, 0.0);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const double m = means[classes[c].front()];
        for (std::size_t b : classes[c]) {
            double pooled_share, kept_share;
            if (keep[c] <= 0.0) {
                pooled_share = 0.0;
                kept_share = 0.0;
            } else if (m < diag.p_star - band) {
                pooled_share = keep[c];
                kept_share = 0.0;
            } else {
                pooled_share = keep[c] * diag.pool_fraction;
                kept_share = keep[c] * (1.0 - diag.pool_fraction);
            }
            const double excluded_share = 1.0 - pooled_share - kept_share;
            std::vector<double> row(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                row[i] = (excluded_share + kept_share) * base.joint[0][b][i];
                pool_row[i] += pooled_share * base.joint[0][b][i];
            }
            double mass = std::accumulate(row.begin(), row.end(), 0.0);
            if (mass > 1e-15) {
                rows.push_back(std::move(row));
                labels.push_back(base.buyer_signals[b]);
            }
        }
    }
    if (std::accumulate(pool_row.begin(), pool_row.end(), 0.0) > 1e-15) {
        rows.push_back(pool_row);
        labels.push_back("pool");
    }
    s.buyer_signals = labels;
    s.joint.assign(1, rows);

    StrategyProfile prof;
    std::vector<double> extra = {diag.p_star};
    for (std::size_t b = 0; b < rows.size(); ++b) extra.push_back(s.buyer_posterior_mean(env, b));
    prof.price_grid = default_price_grid(env, extra);
    const std::size_t np = prof.price_grid.size();
    prof.seller_strategy.assign(1, std::vector<double>(np, 0.0));
    prof.seller_strategy[0][grid_index_of(prof.price_grid, diag.p_star)] = 1.0;
    prof.buyer_strategy.assign(np, std::vector<double>(rows.size(), 0.0));
    prof.beliefs.assign(np, std::vector<Belief>{});
    for (std::size_t k = 0; k < np; ++k) {
        for (std::size_t b = 0; b < rows.size(); ++b) {
            prof.beliefs[k].push_back(s.posterior_given_buyer(b));
            prof.buyer_strategy[k][b] =
                accept_given_belief(env, prof.beliefs[k].back(), prof.price_grid[k]);
        }
    }

    out.structure = std::move(s);
    out.profile = std::move(prof);
    out.diagnostics = diag;
    return out;
}

double uniqueness_sweep(const Environment& env, const InformationStructure& s,
                        const StrategyProfile& profile, double p_star) {
    // Under threshold buyers, a seller best response sits at a posterior-mean
    // kink or at the individual-rationality sentinel; prices between kinks
    // are dominated by the next kink up, so sweeping the kink set certifies
    // every candidate optimum.
    std::vector<double> grid;
    for (std::size_t b = 0; b < s.n_buyer(); ++b)
        if (s.buyer_marginal(b) > 1e-15) grid.push_back(s.buyer_posterior_mean(env, b));
    for (std::size_t ts = 0; ts < s.n_seller(); ++ts)
        for (std::size_t k = 0; k < profile.price_grid.size(); ++k)
            if (profile.seller_strategy[ts][k] > 0.0) grid.push_back(profile.price_grid[k]);
    const double h = sentinel_step(env);
    grid.push_back(env.min_value() - h);
    grid.push_back(env.max_value() + h);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
               grid.end());

    double worst = -std::numeric_limits<double>::infinity();
    for (TieBreak tie : {TieBreak::accept, TieBreak::reject}) {
        const auto alpha = buyer_best_response(env, s, grid, tie);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double p = grid[k];
            if (std::fabs(p - p_star) <= 1e-9) continue;
            for (std::size_t ts = 0; ts < s.n_seller(); ++ts) {
                double profit = 0.0;
                for (std::size_t tb = 0; tb < s.n_buyer(); ++tb) {
                    if (alpha[k][tb] <= 0.0) continue;
                    for (std::size_t i = 0; i < env.size(); ++i)
                        profit += s.joint[ts][tb][i] * alpha[k][tb] * (p - env.costs[i]);
                }
                const double mass = s.seller_marginal(ts);
                if (mass > 0.0) worst = std::max(worst, profit / mass);
            }
        }
    }
    return worst;
}

UniqueConstructed construct_us_unique(const Environment& env, PayoffPoint target,
                                      const MinProfitConfig& config) {
    if (!env.gains_from_trade)
        throw input_error("construct_us_unique: environment must have gains from trade");
    const UsFloor floor = seller_floor_us(env, config);
    if (target.pi_s <= floor.value + 1e-12)
        throw infeasible_error(
            "construct_us_unique: target seller payoff must be strictly above the floor");

    // Choose the lowest-payoff certified finite base available.
    Constructed base = akerlof(env);
    double base_payoff = payoffs(env, base.structure, base.profile).pi_s;
    if (base_payoff >= target.pi_s - 1e-12) {
        MinProfitResult searched = min_seller_profit_search(env, config);
        if (searched.upper_bound < base_payoff) {
            base.structure = std::move(searched.structure);
            base.profile = std::move(searched.profile);
            base_payoff = searched.upper_bound;
        }
    }
    if (base_payoff >= target.pi_s - 1e-12)
        throw infeasible_error(
            "construct_us_unique: no finite base structure earns strictly less than the target");

    Garbled g = garble_to_target(env, base.structure, base.profile, target);
    UniqueConstructed out;
    out.sweep_max_other = uniqueness_sweep(env, g.structure, g.profile, g.diagnostics.p_star);
    out.structure = std::move(g.structure);
    out.profile = std::move(g.profile);
    out.diagnostics = g.diagnostics;
    out.base_payoff = base_payoff;
    return out;
}

Constructed construct_negative(const Environment& env, double welfare_weight, double tie_alpha) {
    if (welfare_weight < 1.0) throw input_error("construct_negative: lambda must be >= 1");
    if (tie_alpha < 0.0 || tie_alpha > 1.0)
        throw input_error("construct_negative: alpha must be in [0,1]");

    const std::size_t n = env.size();
    const double v_min = env.min_value();
    const double ztol = 1e-12 * std::max(1.0, env.value_range());

    std::vector<double> branch(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double weighted = v_min - env.costs[i] + welfare_weight * (env.values[i] - v_min);
        branch[i] = weighted > ztol ? 1.0 : (weighted >= -ztol ? tie_alpha : 0.0);
    }

    Constructed out;
    out.structure.seller_signals = {"pos", "neg"};
    out.structure.buyer_signals = {"pos", "neg"};
    out.structure.joint.assign(
        2, std::vector<std::vector<double>>(2, std::vector<double>(n, 0.0)));
    double pos_mass = 0.0, pos_cost = 0.0, pos_value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.structure.joint[0][0][i] = env.probs[i] * branch[i];
        out.structure.joint[1][1][i] = env.probs[i] * (1.0 - branch[i]);
        pos_mass += env.probs[i] * branch[i];
        pos_cost += env.probs[i] * branch[i] * env.costs[i];
        pos_value += env.probs[i] * branch[i] * env.values[i];
    }

    StrategyProfile& prof = out.profile;
    const bool trading =
        pos_mass > 1e-14 && pos_value / std::max(pos_mass, 1e-300) >=
                                std::max(v_min, pos_cost / std::max(pos_mass, 1e-300)) - ztol;
    const double p_trade = trading ? std::max(v_min, pos_cost / pos_mass) : v_min;
    prof.price_grid = default_price_grid(env, {p_trade});
    const std::size_t np = prof.price_grid.size();
    const std::size_t k_trade = grid_index_of(prof.price_grid, p_trade);
    const std::size_t k_off = np - 1;  // above the top value: never accepted

    prof.seller_strategy.assign(2, std::vector<double>(np, 0.0));
    prof.seller_strategy[0][trading ? k_trade : k_off] = 1.0;
    prof.seller_strategy[1][k_off] = 1.0;

    Belief pos_post = delta_low(env);
    if (pos_mass > 1e-14) {
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) w[i] = env.probs[i] * branch[i] / pos_mass;
        pos_post = Belief{std::move(w)};
    }
    Belief neg_post = delta_low(env);
    if (pos_mass < 1.0 - 1e-14) {
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = env.probs[i] * (1.0 - branch[i]) / (1.0 - pos_mass);
        neg_post = Belief{std::move(w)};
    }

    const double band = mean_band(env);
    const std::size_t k_pos_play = trading ? k_trade : k_off;
    prof.buyer_strategy.assign(np, std::vector<double>(2, 0.0));
    prof.beliefs.assign(np, std::vector<Belief>{});
    for (std::size_t k = 0; k < np; ++k) {
        const double p = prof.price_grid[k];
        // Positive branch: branch posterior at the price its seller plays,
        // pessimistic off-path beliefs elsewhere.
        Belief pos_belief = k == k_pos_play ? pos_post : delta_low(env);
        prof.beliefs[k].push_back(pos_belief);
        prof.buyer_strategy[k][0] = pos_belief.mean(env) >= p - band ? 1.0 : 0.0;
        // Negative branch: price-independent posterior.
        prof.beliefs[k].push_back(neg_post);
        prof.buyer_strategy[k][1] = neg_post.mean(env) >= p - band ? 1.0 : 0.0;
    }
    return out;
}

Constructed randomize_public(const Environment& env,
                             const std::vector<WeightedComponent>& components) {
    if (components.empty()) throw input_error("randomize_public: no components");
    double total = 0.0;
    for (const auto& c : components) {
        if (c.weight < 0.0) throw input_error("randomize_public: negative weight");
        total += c.weight;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw input_error("randomize_public: weights must sum to 1");
    const auto& grid0 = components.front().component.profile.price_grid;
    for (const auto& c : components) {
        const auto& g = c.component.profile.price_grid;
        if (g.size() != grid0.size())
            throw input_error("randomize_public: mismatched price grids");
        for (std::size_t k = 0; k < g.size(); ++k)
            if (std::fabs(g[k] - grid0[k]) > 1e-12)
                throw input_error("randomize_public: mismatched price grids");
    }

    Constructed out;
    out.profile.price_grid = grid0;
    const std::size_t np = grid0.size();
    out.profile.buyer_strategy.assign(np, std::vector<double>{});
    out.profile.beliefs.assign(np, std::vector<Belief>{});

    for (std::size_t j = 0; j < components.size(); ++j) {
        const auto& comp = components[j].component;
        const std::string prefix = "c" + std::to_string(j) + ":";
        for (const auto& label : comp.structure.seller_signals)
            out.structure.seller_signals.push_back(prefix + label);
        for (const auto& label : comp.structure.buyer_signals)
            out.structure.buyer_signals.push_back(prefix + label);
        for (const auto& row : comp.profile.seller_strategy)
            out.profile.seller_strategy.push_back(row);
        for (std::size_t k = 0; k < np; ++k) {
            for (std::size_t tb = 0; tb < comp.structure.n_buyer(); ++tb) {
                out.profile.buyer_strategy[k].push_back(comp.profile.buyer_strategy[k][tb]);
                out.profile.beliefs[k].push_back(comp.profile.beliefs[k][tb]);
            }
        }
    }

    const std::size_t S = out.structure.n_seller();
    const std::size_t B = out.structure.n_buyer();
    out.structure.joint.assign(
        S, std::vector<std::vector<double>>(B, std::vector<double>(env.size(), 0.0)));
    std::size_t s_off = 0, b_off = 0;
    for (const auto& wc : components) {
        const auto& comp = wc.component;
        for (std::size_t ts = 0; ts < comp.structure.n_seller(); ++ts)
            for (std::size_t tb = 0; tb < comp.structure.n_buyer(); ++tb)
                for (std::size_t i = 0; i < env.size(); ++i)
                    out.structure.joint[s_off + ts][b_off + tb][i] =
                        wc.weight * comp.structure.joint[ts][tb][i];
        s_off += comp.structure.n_seller();
        b_off += comp.structure.n_buyer();
    }
    return out;
}

DiscreteConstructed construct_discrete(const Environment& env, PayoffPoint target,
                                       double epsilon, double grid_step) {
    if (!env.gains_from_trade)
        throw input_error("construct_discrete: environment must have gains from trade");
    if (epsilon <= 0.0) throw input_error("construct_discrete: epsilon must be positive");
    if (grid_step <= 0.0) throw input_error("construct_discrete: grid step must be positive");

    // The construction is an epsilon-net of the whole region: boundary
    // targets are approached from inside.
    const PayoffRegion region = region_all(env);
    if (!region_contains(region, target, default_tol))
        throw infeasible_error("construct_discrete: target outside the implementable region",
                               region_distance(region, target));

    const double v_min = env.min_value();
    const double Ev = env.expected_value();
    const double Ec = env.expected_cost();
    const double c_min = env.costs.front();
    const double mu_min = env.probs.front();
    const int branch = c_min > Ec ? 1 : 2;

    // Price grid of the stated step: one point below v_min, cover past v_max.
    std::vector<double> grid;
    for (double p = v_min - grid_step; p <= env.max_value() + grid_step + 1e-12; p += grid_step)
        grid.push_back(p);
    const std::size_t np = grid.size();

    struct Candidate {
        double err = std::numeric_limits<double>::infinity();
        double eta = 0.0, delta = 0.0, sigma_h = 0.0, p_l = 0.0, p_mix = 0.0, alpha_mix = 0.0;
    };
    Candidate best;

    for (int kd = 2; kd <= 6 && best.err > epsilon * 0.98; ++kd) {
        const double delta = std::pow(0.5, kd);
        for (int km = 2; km <= 14; ++km) {
            const double eta0 = std::pow(0.5, km);
            if (eta0 >= mu_min) continue;

            const double p_bar_raw = (Ev - eta0 * v_min) / (1.0 - eta0);
            double eta = eta0, p_bar = p_bar_raw;
            if (branch == 2) {
                // Snap E[v | h] onto the grid by shrinking eta.
                p_bar = grid.front() +
                        std::floor((p_bar_raw - grid.front()) / grid_step) * grid_step;
                if (p_bar <= Ev + 1e-9) continue;
                eta = (p_bar - Ev) / (p_bar - v_min);
            }
            const double c_h = (Ec - eta * c_min) / (1.0 - eta);
            const double lo_pl = std::max(c_h, v_min);
            const double hi_pl =
                (eta * v_min + (1.0 - eta) * delta * p_bar) / (eta + (1.0 - eta) * delta);
            if (hi_pl <= lo_pl + 1e-12) continue;

            for (double p_l : grid) {
                if (p_l < lo_pl - 1e-12 || p_l >= hi_pl) continue;
                if (branch == 2) {
                    const double pi_s = p_l - Ec;
                    const double denom = (Ev - p_l) - eta * (v_min - p_l);
                    if (denom <= 0.0) continue;
                    // Clamping covers targets near the region boundary where
                    // the exact mixing weight leaves [delta, 1 - delta].
                    const double sigma_h =
                        std::clamp(((Ev - p_l) - target.pi_b) / denom, delta, 1.0 - delta);
                    const double pi_b = eta * sigma_h * (v_min - p_l) +
                                        (1.0 - sigma_h) * (Ev - p_l);
                    const double err = std::hypot(pi_b - target.pi_b, pi_s - target.pi_s);
                    if (err < best.err)
                        best = {err, eta, delta, sigma_h, p_l, p_bar,
                                (p_l - c_h) / (p_bar - c_h)};
                } else {
                    for (double p_mix : grid) {
                        if (p_mix <= p_l + 1e-12 || p_mix >= p_bar - 1e-12) continue;
                        const double sigma_h =
                            eta * (p_mix - v_min) / ((1.0 - eta) * (p_bar - p_mix));
                        if (sigma_h < delta || sigma_h > 1.0 - delta) continue;
                        const double alpha_mix = (p_l - c_h) / (p_mix - c_h);
                        if (alpha_mix < 0.0 || alpha_mix > 1.0) continue;
                        const double pi_s = (1.0 - eta) * (p_l - c_h) +
                                            eta * alpha_mix * (p_mix - c_min);
                        const double pi_b =
                            (1.0 - eta) * (1.0 - sigma_h) * (p_bar - p_l);
                        const double err =
                            std::hypot(pi_b - target.pi_b, pi_s - target.pi_s);
                        if (err < best.err)
                            best = {err, eta, delta, sigma_h, p_l, p_mix, alpha_mix};
                    }
                }
            }
            if (best.err <= epsilon * 0.98) break;
        }
    }
    if (best.err > epsilon)
        throw infeasible_error("construct_discrete: epsilon too small for the chosen grid",
                               best.err);

    DiscreteConstructed out;
    out.branch = branch;
    out.eta = best.eta;
    out.delta = best.delta;
    out.sigma_h = best.sigma_h;

    InformationStructure& s = out.structure;
    s.seller_signals = {"l", "h"};
    s.buyer_signals = {"b"};
    s.joint.assign(2, std::vector<std::vector<double>>(1, std::vector<double>(env.size(), 0.0)));
    s.joint[0][0][0] = best.eta;
    for (std::size_t i = 0; i < env.size(); ++i)
        s.joint[1][0][i] = env.probs[i] - (i == 0 ? best.eta : 0.0);

    StrategyProfile& prof = out.profile;
    prof.price_grid = grid;
    const std::size_t kl = grid_index_of(grid, best.p_l);
    const std::size_t km = grid_index_of(grid, best.p_mix);
    prof.seller_strategy.assign(2, std::vector<double>(np, 0.0));
    if (branch == 2) {
        prof.seller_strategy[0][kl] = 1.0;  // l posts the low price
        prof.seller_strategy[1][km] = best.sigma_h;
        prof.seller_strategy[1][kl] += 1.0 - best.sigma_h;
    } else {
        prof.seller_strategy[0][km] = 1.0;  // l posts the mixing price
        prof.seller_strategy[1][km] = best.sigma_h;
        prof.seller_strategy[1][kl] += 1.0 - best.sigma_h;
    }

    const double band = mean_band(env);
    prof.buyer_strategy.assign(np, std::vector<double>(1, 0.0));
    prof.beliefs.assign(np, std::vector<Belief>(1, delta_low(env)));
    for (std::size_t k = 0; k < np; ++k) {
        if (k == kl || k == km) {
            prof.beliefs[k][0] = bayes_posterior(env, s, prof.seller_strategy, k, 0);
            prof.buyer_strategy[k][0] = k == km ? best.alpha_mix : 1.0;
        } else {
            prof.buyer_strategy[k][0] = grid[k] <= v_min + band ? 1.0 : 0.0;
        }
    }

    out.trembles.exponents = {2, 4};  // the low signal dominates off path
    out.achieved = payoffs(env, s, prof);
    return out;
}

}  // namespace infodesign
