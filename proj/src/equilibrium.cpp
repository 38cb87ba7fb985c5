#include "infodesign/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace infodesign {

namespace {

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::fabs(a[i] - b[i]);
    return 0.5 * d;
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

PayoffPoint payoffs(const Environment& env, const InformationStructure& s,
                    const StrategyProfile& profile) {
    PayoffPoint out;
    for (std::size_t ts = 0; ts < s.n_seller(); ++ts) {
        for (std::size_t k = 0; k < profile.price_grid.size(); ++k) {
            const double sigma = profile.seller_strategy[ts][k];
            if (sigma <= 0.0) continue;
            const double p = profile.price_grid[k];
            for (std::size_t tb = 0; tb < s.n_buyer(); ++tb) {
                const double alpha = profile.buyer_strategy[k][tb];
                if (alpha <= 0.0) continue;
                for (std::size_t i = 0; i < env.size(); ++i) {
                    const double mass = s.joint[ts][tb][i] * sigma * alpha;
                    out.pi_b += mass * (env.values[i] - p);
                    out.pi_s += mass * (p - env.costs[i]);
                }
            }
        }
    }
    return out;
}

double seller_price_profit(const Environment& env, const InformationStructure& s,
                           const StrategyProfile& profile, std::size_t t_s, std::size_t k) {
    const double mass = s.seller_marginal(t_s);
    if (mass <= 0.0) return 0.0;
    const double p = profile.price_grid[k];
    double profit = 0.0;
    for (std::size_t tb = 0; tb < s.n_buyer(); ++tb) {
        const double alpha = profile.buyer_strategy[k][tb];
        if (alpha <= 0.0) continue;
        for (std::size_t i = 0; i < env.size(); ++i)
            profit += s.joint[t_s][tb][i] * alpha * (p - env.costs[i]);
    }
    return profit / mass;
}

VerificationReport verify_wpbe(const Environment& env, const InformationStructure& s,
                               const StrategyProfile& profile, double tol) {
    VerificationReport report;
    const std::size_t np = profile.price_grid.size();

    // Condition 1: buyer sequential rationality, measured as the expected
    // utility forgone at each information set. Indifference is unconstrained.
    for (std::size_t k = 0; k < np; ++k) {
        const double p = profile.price_grid[k];
        for (std::size_t tb = 0; tb < s.n_buyer(); ++tb) {
            if (s.buyer_marginal(tb) <= 0.0) continue;
            const double m = profile.beliefs[k][tb].mean(env);
            const double alpha = profile.buyer_strategy[k][tb];
            const double loss = (1.0 - alpha) * relu(m - p) + alpha * relu(p - m);
            if (loss > report.buyer_gap) {
                report.buyer_gap = loss;
                report.buyer_gap_price = p;
                report.buyer_gap_signal = tb;
            }
        }
    }
    report.buyer_optimal = report.buyer_gap <= tol;

    // Condition 2: per-signal seller optimality over the grid.
    report.seller_gaps.assign(s.n_seller(), 0.0);
    for (std::size_t ts = 0; ts < s.n_seller(); ++ts) {
        if (s.seller_marginal(ts) <= 0.0) continue;
        double realized = 0.0;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < np; ++k) {
            const double pi = seller_price_profit(env, s, profile, ts, k);
            best = std::max(best, pi);
            realized += profile.seller_strategy[ts][k] * pi;
        }
        report.seller_gaps[ts] = relu(best - realized);
        if (report.seller_gaps[ts] > tol) report.seller_optimal = false;
    }

    // Condition 3: Bayes rule at on-path cells.
    const double on_path_threshold = tol / double(std::max<std::size_t>(np, 1));
    for (std::size_t k = 0; k < np; ++k) {
        for (std::size_t tb = 0; tb < s.n_buyer(); ++tb) {
            std::vector<double> posterior(env.size(), 0.0);
            double mass = 0.0;
            for (std::size_t ts = 0; ts < s.n_seller(); ++ts) {
                const double sigma = profile.seller_strategy[ts][k];
                if (sigma <= 0.0) continue;
                for (std::size_t i = 0; i < env.size(); ++i) {
                    posterior[i] += sigma * s.joint[ts][tb][i];
                    mass += sigma * s.joint[ts][tb][i];
                }
            }
            if (mass <= on_path_threshold) continue;
            for (double& w : posterior) w /= mass;
            const double d = tv_distance(posterior, profile.beliefs[k][tb].weights);
            report.bayes_gap = std::max(report.bayes_gap, d);
        }
    }
    report.bayes_on_path = report.bayes_gap <= tol;
    return report;
}

PriceIndependence verify_price_independent(const InformationStructure& s,
                                           const StrategyProfile& profile, double tol) {
    PriceIndependence out;
    for (std::size_t tb = 0; tb < s.n_buyer(); ++tb) {
        if (s.buyer_marginal(tb) <= 0.0) continue;
        const Belief marginal_posterior = s.posterior_given_buyer(tb);
        for (std::size_t k = 0; k < profile.price_grid.size(); ++k) {
            const double d =
                tv_distance(profile.beliefs[k][tb].weights, marginal_posterior.weights);
            out.gap = std::max(out.gap, d);
        }
    }
    out.ok = out.gap <= tol;
    return out;
}

VerificationReport verify_sequential(const Environment& env, const InformationStructure& s,
                                     const StrategyProfile& profile,
                                     const TrembleSchedule& trembles,
                                     const std::vector<double>& n_list, double tol) {
    VerificationReport report = verify_wpbe(env, s, profile, tol);
    const std::size_t np = profile.price_grid.size();
    const double grid_k = double(np);

    struct Cell {
        std::size_t k, tb;
        bool on_path;
    };
    std::vector<Cell> cells;
    for (std::size_t k = 0; k < np; ++k) {
        for (std::size_t tb = 0; tb < s.n_buyer(); ++tb) {
            if (s.buyer_marginal(tb) <= 0.0) continue;
            double mass = 0.0;
            for (std::size_t ts = 0; ts < s.n_seller(); ++ts) {
                double m = 0.0;
                for (double x : s.joint[ts][tb]) m += x;
                mass += m * profile.seller_strategy[ts][k];
            }
            cells.push_back({k, tb, mass > 1e-15});
        }
    }

    auto posterior_under = [&](const std::vector<std::vector<double>>& sigma, std::size_t k,
                               std::size_t tb) {
        std::vector<double> w(env.size(), 0.0);
        double mass = 0.0;
        for (std::size_t ts = 0; ts < s.n_seller(); ++ts) {
            for (std::size_t i = 0; i < env.size(); ++i) {
                w[i] += sigma[ts][k] * s.joint[ts][tb][i];
                mass += sigma[ts][k] * s.joint[ts][tb][i];
            }
        }
        if (mass > 0.0)
            for (double& x : w) x /= mass;
        return w;
    };

    // Finite-n trace.
    for (double n : n_list) {
        const auto sigma_n = trembles.mixed(profile, n);
        TremblePoint pt;
        pt.n = n;
        for (const Cell& c : cells) {
            const double d =
                tv_distance(posterior_under(sigma_n, c.k, c.tb), profile.beliefs[c.k][c.tb].weights);
            (c.on_path ? pt.on_path_distance : pt.off_path_distance) =
                std::max(c.on_path ? pt.on_path_distance : pt.off_path_distance, d);
        }
        report.tremble_trace.push_back(pt);
    }

    // Analytic n -> infinity posterior: the lowest tremble order present in a
    // cell dominates.
    double limit_gap = 0.0;
    for (const Cell& c : cells) {
        int min_order = std::numeric_limits<int>::max();
        for (std::size_t ts = 0; ts < s.n_seller(); ++ts) {
            double m = 0.0;
            for (double x : s.joint[ts][c.tb]) m += x;
            if (m <= 1e-15) continue;
            const int order =
                profile.seller_strategy[ts][c.k] > 1e-15 ? 0 : trembles.exponents[ts];
            min_order = std::min(min_order, order);
        }
        if (min_order == std::numeric_limits<int>::max()) continue;
        std::vector<double> w(env.size(), 0.0);
        double mass = 0.0;
        for (std::size_t ts = 0; ts < s.n_seller(); ++ts) {
            const int order =
                profile.seller_strategy[ts][c.k] > 1e-15 ? 0 : trembles.exponents[ts];
            if (order != min_order) continue;
            const double coef =
                order == 0 ? profile.seller_strategy[ts][c.k] : 1.0 / grid_k;
            for (std::size_t i = 0; i < env.size(); ++i) {
                w[i] += coef * s.joint[ts][c.tb][i];
                mass += coef * s.joint[ts][c.tb][i];
            }
        }
        if (mass <= 0.0) continue;
        for (double& x : w) x /= mass;
        limit_gap = std::max(limit_gap, tv_distance(w, profile.beliefs[c.k][c.tb].weights));
    }

    bool monotone = true;
    for (std::size_t j = 1; j < report.tremble_trace.size(); ++j) {
        if (report.tremble_trace[j].on_path_distance >
                report.tremble_trace[j - 1].on_path_distance + 1e-12 ||
            report.tremble_trace[j].off_path_distance >
                report.tremble_trace[j - 1].off_path_distance + 1e-12)
            monotone = false;
    }
    double final_distance = 0.0;
    if (!report.tremble_trace.empty())
        final_distance = std::max(report.tremble_trace.back().on_path_distance,
                                  report.tremble_trace.back().off_path_distance);
    report.consistent = monotone && limit_gap <= tol && final_distance <= tol;
    return report;
}

std::vector<std::vector<double>> buyer_best_response(const Environment& env,
                                                     const InformationStructure& s,
                                                     const std::vector<double>& grid,
                                                     TieBreak tie) {
    const double band = 1e-12 * std::max(1.0, env.value_range());
    std::vector<std::vector<double>> alpha(grid.size(), std::vector<double>(s.n_buyer(), 0.0));
    for (std::size_t tb = 0; tb < s.n_buyer(); ++tb) {
        const double m = s.buyer_posterior_mean(env, tb);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (std::fabs(m - grid[k]) <= band)
                alpha[k][tb] = tie == TieBreak::accept ? 1.0 : 0.0;
            else
                alpha[k][tb] = m > grid[k] ? 1.0 : 0.0;
        }
    }
    return alpha;
}

std::vector<double> seller_best_response_value(const Environment& env,
                                               const InformationStructure& s,
                                               const std::vector<std::vector<double>>& alpha,
                                               const std::vector<double>& grid) {
    std::vector<double> best(s.n_seller(), 0.0);
    for (std::size_t ts = 0; ts < s.n_seller(); ++ts) {
        const double mass = s.seller_marginal(ts);
        if (mass <= 0.0) continue;
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double profit = 0.0;
            for (std::size_t tb = 0; tb < s.n_buyer(); ++tb) {
                if (alpha[k][tb] <= 0.0) continue;
                for (std::size_t i = 0; i < env.size(); ++i)
                    profit += s.joint[ts][tb][i] * alpha[k][tb] * (grid[k] - env.costs[i]);
            }
            top = std::max(top, profit / mass);
        }
        best[ts] = top;
    }
    return best;
}

// --- dense simplex (max c'x s.t. Ax <= b, x >= 0) ------------------------

namespace {

struct Simplex {
    using vd = std::vector<double>;
    static constexpr double eps = 1e-11;

    int m, n;
    std::vector<int> N, B;
    std::vector<vd> D;

    Simplex(const std::vector<vd>& A, const vd& b, const vd& c)
        : m(int(b.size())), n(int(c.size())), N(n + 1), B(m), D(m + 2, vd(n + 2)) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) D[i][j] = A[i][j];
        for (int i = 0; i < m; ++i) {
            B[i] = n + i;
            D[i][n] = -1;
            D[i][n + 1] = b[i];
        }
        for (int j = 0; j < n; ++j) {
            N[j] = j;
            D[m][j] = -c[j];
        }
        N[n] = -1;
        D[m + 1][n] = 1;
    }

    void pivot(int r, int s) {
        double* a = D[r].data();
        double inv = 1.0 / a[s];
        for (int i = 0; i < m + 2; ++i) {
            if (i != r && std::fabs(D[i][s]) > eps) {
                double* b2 = D[i].data();
                double inv2 = b2[s] * inv;
                for (int j = 0; j < n + 2; ++j) b2[j] -= a[j] * inv2;
                b2[s] = a[s] * inv2;
            }
        }
        for (int j = 0; j < n + 2; ++j)
            if (j != s) D[r][j] *= inv;
        for (int i = 0; i < m + 2; ++i)
            if (i != r) D[i][s] *= -inv;
        D[r][s] = inv;
        std::swap(B[r], N[s]);
    }

    bool simplex(int phase) {
        int x = m + phase - 1;
        for (;;) {
            int s = -1;
            for (int j = 0; j < n + 1; ++j) {
                if (N[j] == -phase) continue;
                if (s == -1 || std::make_pair(D[x][j], N[j]) < std::make_pair(D[x][s], N[s]))
                    s = j;
            }
            if (D[x][s] >= -eps) return true;
            int r = -1;
            for (int i = 0; i < m; ++i) {
                if (D[i][s] <= eps) continue;
                if (r == -1 || std::make_pair(D[i][n + 1] / D[i][s], B[i]) <
                                   std::make_pair(D[r][n + 1] / D[r][s], B[r]))
                    r = i;
            }
            if (r == -1) return false;
            pivot(r, s);
        }
    }

    double solve(vd& x) {
        int r = 0;
        for (int i = 1; i < m; ++i)
            if (D[i][n + 1] < D[r][n + 1]) r = i;
        if (D[r][n + 1] < -eps) {
            pivot(r, n);
            if (!simplex(2) || D[m + 1][n + 1] < -eps)
                return -std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (B[i] != -1) continue;
                int s = 0;
                for (int j = 1; j <= n; ++j)
                    if (std::make_pair(D[i][j], N[j]) < std::make_pair(D[i][s], N[s])) s = j;
                pivot(i, s);
            }
        }
        const bool ok = simplex(1);
        x.assign(n, 0.0);
        for (int i = 0; i < m; ++i)
            if (B[i] < n) x[B[i]] = D[i][n + 1];
        return ok ? D[m][n + 1] : std::numeric_limits<double>::infinity();
    }
};

// Builds the uninformed-seller segment structure from LP masses and a
// tie-accept equilibrium at the seller's best grid price.
struct SegmentIncumbent {
    InformationStructure structure;
    StrategyProfile profile;
    PayoffPoint achieved;
    VerificationReport report;
    bool valid = false;
};

SegmentIncumbent build_segment_incumbent(const Environment& env,
                                         const std::vector<std::vector<double>>& masses,
                                         const std::vector<double>& extra_grid, double tol) {
    SegmentIncumbent out;
    const std::size_t n = env.size();

    std::vector<std::vector<double>> segs;
    for (const auto& seg : masses) {
        double w = std::accumulate(seg.begin(), seg.end(), 0.0);
        if (w > 1e-12) segs.push_back(seg);
    }
    if (segs.empty()) return out;

    // Repair marginal drift from the LP solution.
    std::vector<double> col(n, 0.0);
    for (const auto& seg : segs)
        for (std::size_t i = 0; i < n; ++i) col[i] += seg[i];
    for (std::size_t i = 0; i < n; ++i) {
        if (col[i] <= 0.0) return out;
        const double fix = env.probs[i] / col[i];
        for (auto& seg : segs) seg[i] *= fix;
    }

    InformationStructure s;
    s.seller_signals = {"s"};
    s.buyer_signals.resize(segs.size());
    s.joint.assign(1, segs);
    for (std::size_t b = 0; b < segs.size(); ++b) s.buyer_signals[b] = "b" + std::to_string(b);

    std::vector<double> means(segs.size());
    for (std::size_t b = 0; b < segs.size(); ++b) means[b] = s.buyer_posterior_mean(env, b);

    std::vector<double> grid_extra = means;
    grid_extra.insert(grid_extra.end(), extra_grid.begin(), extra_grid.end());
    StrategyProfile profile;
    profile.price_grid = default_price_grid(env, grid_extra);
    const std::size_t np = profile.price_grid.size();

    profile.buyer_strategy = buyer_best_response(env, s, profile.price_grid, TieBreak::accept);
    profile.beliefs.assign(np, std::vector<Belief>{});
    for (std::size_t k = 0; k < np; ++k)
        for (std::size_t b = 0; b < segs.size(); ++b)
            profile.beliefs[k].push_back(s.posterior_given_buyer(b));

    // Seller plays the lowest profit-maximizing grid price.
    profile.seller_strategy.assign(1, std::vector<double>(np, 0.0));
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < np; ++k) {
        double profit = 0.0;
        for (std::size_t b = 0; b < segs.size(); ++b) {
            if (profile.buyer_strategy[k][b] <= 0.0) continue;
            for (std::size_t i = 0; i < n; ++i)
                profit += segs[b][i] * (profile.price_grid[k] - env.costs[i]);
        }
        if (profit > best + 1e-12) {
            best = profit;
            best_k = k;
        }
    }
    profile.seller_strategy[0][best_k] = 1.0;

    out.structure = std::move(s);
    out.profile = std::move(profile);
    out.achieved = payoffs(env, out.structure, out.profile);
    out.report = verify_wpbe(env, out.structure, out.profile, tol);
    out.valid = out.report.ok();
    return out;
}

}  // namespace

MinProfitResult min_seller_profit_search(const Environment& env, const MinProfitConfig& config) {
    if (!env.gains_from_trade)
        throw input_error("min_seller_profit_search: environment must have gains from trade");
    if (config.segments < 1) throw input_error("min_seller_profit_search: segments must be >= 1");

    const std::size_t n = env.size();
    const double Ev = env.expected_value();
    const double tol = default_tol;

    MinProfitResult best;
    best.upper_bound = std::numeric_limits<double>::infinity();
    auto consider = [&](SegmentIncumbent&& cand) {
        if (!cand.valid) return;
        if (cand.achieved.pi_s < best.upper_bound) {
            best.upper_bound = cand.achieved.pi_s;
            best.structure = std::move(cand.structure);
            best.profile = std::move(cand.profile);
            best.report = std::move(cand.report);
            best.achieved = cand.achieved;
        }
    };

    // Akerlof seed: full revelation to the buyer.
    {
        std::vector<std::vector<double>> masses(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) masses[i][i] = env.probs[i];
        consider(build_segment_incumbent(env, masses, config.price_grid, tol));
    }

    const std::size_t K = config.segments;
    if (n > 1) {
        for (std::size_t r = 0; r < config.restarts; ++r) {
            const double frac = double(r + 1) / double(config.restarts);
            const double top = Ev + frac * (env.max_value() - Ev);

            std::vector<double> targets(K);
            if (K == 1) {
                targets[0] = Ev;
            } else {
                for (std::size_t k = 0; k < K; ++k)
                    targets[k] =
                        env.min_value() + (top - env.min_value()) * double(k) / double(K - 1);
            }

            // LP: minimize z subject to deviation profits at each target price
            // <= z, column marginals equal to the prior, segment means pinned
            // at the targets.
            const int nx = int(K * n);
            const int nv = nx + 1;
            std::vector<std::vector<double>> A;
            std::vector<double> bvec, cvec(nv, 0.0);
            cvec[nx] = -1.0;  // maximize -z
            auto xid = [&](std::size_t k, std::size_t i) { return int(k * n + i); };

            for (std::size_t j = 0; j < K; ++j) {
                std::vector<double> row(nv, 0.0);
                for (std::size_t k = 0; k < K; ++k) {
                    if (targets[k] < targets[j] - 1e-12) continue;
                    for (std::size_t i = 0; i < n; ++i)
                        row[xid(k, i)] = targets[j] - env.costs[i];
                }
                row[nx] = -1.0;
                A.push_back(row);
                bvec.push_back(0.0);
            }
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> row(nv, 0.0);
                for (std::size_t k = 0; k < K; ++k) row[xid(k, i)] = 1.0;
                A.push_back(row);
                bvec.push_back(env.probs[i]);
                for (double& x : row) x = -x;
                A.push_back(row);
                bvec.push_back(-env.probs[i]);
            }
            for (std::size_t k = 0; k < K; ++k) {
                std::vector<double> row(nv, 0.0);
                for (std::size_t i = 0; i < n; ++i) row[xid(k, i)] = env.values[i] - targets[k];
                A.push_back(row);
                bvec.push_back(0.0);
                for (double& x : row) x = -x;
                A.push_back(row);
                bvec.push_back(0.0);
            }

            std::vector<double> x;
            const double obj = Simplex(A, bvec, cvec).solve(x);
            if (!std::isfinite(obj)) continue;

            std::vector<std::vector<double>> masses(K, std::vector<double>(n, 0.0));
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t i = 0; i < n; ++i) masses[k][i] = std::max(0.0, x[xid(k, i)]);
            consider(build_segment_incumbent(env, masses, config.price_grid, tol));
        }
    }

    if (!std::isfinite(best.upper_bound))
        throw input_error("min_seller_profit_search: no certified incumbent found");
    return best;
}

nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json j;
    j["buyer_optimal"] = r.buyer_optimal;
    j["buyer_gap"] = r.buyer_gap;
    j["buyer_gap_price"] = r.buyer_gap_price;
    j["seller_optimal"] = r.seller_optimal;
    j["seller_gaps"] = r.seller_gaps;
    j["bayes_on_path"] = r.bayes_on_path;
    j["bayes_gap"] = r.bayes_gap;
    if (r.price_independent) {
        j["price_independent"] = *r.price_independent;
        j["price_independent_gap"] = r.price_independent_gap;
    }
    if (r.consistent) {
        j["consistent"] = *r.consistent;
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& t : r.tremble_trace)
            trace.push_back({{"n", t.n},
                             {"on_path_distance", t.on_path_distance},
                             {"off_path_distance", t.off_path_distance}});
        j["tremble_trace"] = trace;
    }
    j["verified"] = r.ok();
    return j;
}

}  // namespace infodesign
