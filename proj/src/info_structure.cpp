#include "infodesign/info_structure.hpp"

#include <algorithm>
#include <cmath>

namespace infodesign {

std::size_t InformationStructure::n_values() const {
    return joint.empty() || joint.front().empty() ? 0 : joint.front().front().size();
}

double InformationStructure::seller_marginal(std::size_t s) const {
    double total = 0.0;
    for (const auto& row : joint[s])
        for (double x : row) total += x;
    return total;
}

double InformationStructure::buyer_marginal(std::size_t b) const {
    double total = 0.0;
    for (const auto& per_seller : joint)
        for (double x : per_seller[b]) total += x;
    return total;
}

std::vector<double> InformationStructure::value_marginal() const {
    std::vector<double> m(n_values(), 0.0);
    for (const auto& per_seller : joint)
        for (const auto& row : per_seller)
            for (std::size_t i = 0; i < row.size(); ++i) m[i] += row[i];
    return m;
}

Belief InformationStructure::posterior_given_buyer(std::size_t b) const {
    std::vector<double> w(n_values(), 0.0);
    double total = 0.0;
    for (const auto& per_seller : joint)
        for (std::size_t i = 0; i < per_seller[b].size(); ++i) {
            w[i] += per_seller[b][i];
            total += per_seller[b][i];
        }
    if (total <= 0.0) {
        std::fill(w.begin(), w.end(), 1.0 / double(w.size()));
        return Belief{std::move(w)};
    }
    for (double& x : w) x /= total;
    return Belief{std::move(w)};
}

double InformationStructure::buyer_posterior_mean(const Environment& env, std::size_t b) const {
    return posterior_given_buyer(b).mean(env);
}

ClassTags classify(const InformationStructure& s, double tol) {
    ClassTags tags;
    tags.uninformed_seller = s.n_seller() == 1;

    // Fully informed: each buyer signal with mass concentrates on one value.
    tags.fully_informed_buyer = true;
    for (std::size_t b = 0; b < s.n_buyer() && tags.fully_informed_buyer; ++b) {
        const double mass = s.buyer_marginal(b);
        if (mass <= tol) continue;
        const Belief post = s.posterior_given_buyer(b);
        double top = *std::max_element(post.weights.begin(), post.weights.end());
        if (top < 1.0 - tol) tags.fully_informed_buyer = false;
    }

    // More informed buyer: v independent of t_s conditional on t_b, i.e.
    // P(s, b, v) * P(b) == P(s, b) * P(b, v) cell by cell.
    tags.more_informed_buyer = true;
    for (std::size_t b = 0; b < s.n_buyer() && tags.more_informed_buyer; ++b) {
        const double pb = s.buyer_marginal(b);
        if (pb <= tol) continue;
        for (std::size_t ts = 0; ts < s.n_seller() && tags.more_informed_buyer; ++ts) {
            double psb = 0.0;
            for (double x : s.joint[ts][b]) psb += x;
            for (std::size_t i = 0; i < s.n_values(); ++i) {
                double pbv = 0.0;
                for (std::size_t u = 0; u < s.n_seller(); ++u) pbv += s.joint[u][b][i];
                if (std::fabs(s.joint[ts][b][i] * pb - psb * pbv) > tol) {
                    tags.more_informed_buyer = false;
                    break;
                }
            }
        }
    }
    return tags;
}

void validate_structure(const Environment& env, const InformationStructure& s, double tol) {
    if (s.joint.size() != s.n_seller())
        throw input_error("structure: joint tensor does not match seller signals");
    for (const auto& per_seller : s.joint) {
        if (per_seller.size() != s.n_buyer())
            throw input_error("structure: joint tensor does not match buyer signals");
        for (const auto& row : per_seller) {
            if (row.size() != env.size())
                throw input_error("structure: joint tensor does not match value support");
            for (double x : row)
                if (x < -tol) throw input_error("structure: negative joint mass");
        }
    }
    const auto marginal = s.value_marginal();
    for (std::size_t i = 0; i < env.size(); ++i) {
        if (std::fabs(marginal[i] - env.probs[i]) > std::max(tol, 1e-12))
            throw input_error("structure: value marginal differs from the prior");
    }
}

std::size_t StrategyProfile::price_index(double p, double tol) const {
    for (std::size_t k = 0; k < price_grid.size(); ++k)
        if (std::fabs(price_grid[k] - p) <= tol) return k;
    throw input_error("profile: price not on the grid");
}

void validate_profile(const Environment& env, const InformationStructure& s,
                      const StrategyProfile& profile, double tol) {
    const std::size_t np = profile.price_grid.size();
    if (profile.seller_strategy.size() != s.n_seller())
        throw input_error("profile: seller strategy rows do not match seller signals");
    for (const auto& row : profile.seller_strategy) {
        if (row.size() != np) throw input_error("profile: seller strategy row length mismatch");
        double total = 0.0;
        for (double x : row) {
            if (x < -tol) throw input_error("profile: negative seller probability");
            total += x;
        }
        if (std::fabs(total - 1.0) > tol)
            throw input_error("profile: seller strategy row does not sum to 1");
    }
    if (profile.buyer_strategy.size() != np || profile.beliefs.size() != np)
        throw input_error("profile: buyer strategy/beliefs do not cover the price grid");
    for (std::size_t k = 0; k < np; ++k) {
        if (profile.buyer_strategy[k].size() != s.n_buyer() ||
            profile.beliefs[k].size() != s.n_buyer())
            throw input_error("profile: buyer dimension mismatch");
        for (double a : profile.buyer_strategy[k])
            if (a < -tol || a > 1.0 + tol)
                throw input_error("profile: acceptance probability outside [0,1]");
        for (const auto& nu : profile.beliefs[k])
            if (nu.weights.size() != env.size())
                throw input_error("profile: belief dimension mismatch");
    }
}

std::vector<std::vector<double>> TrembleSchedule::mixed(const StrategyProfile& profile,
                                                        double n) const {
    const double k = double(profile.price_grid.size());
    std::vector<std::vector<double>> out(profile.seller_strategy.size());
    for (std::size_t ts = 0; ts < out.size(); ++ts) {
        const double ne = std::pow(n, double(exponents.at(ts)));
        out[ts].resize(profile.price_grid.size());
        for (std::size_t p = 0; p < out[ts].size(); ++p)
            out[ts][p] = (ne - 1.0) / ne * profile.seller_strategy[ts][p] + 1.0 / (ne * k);
    }
    return out;
}

double sentinel_step(const Environment& env) {
    return 1e-3 * std::max(env.value_range(), 1.0);
}

std::vector<double> default_price_grid(const Environment& env, const std::vector<double>& extra) {
    std::vector<double> grid = env.values;
    grid.insert(grid.end(), extra.begin(), extra.end());
    const double h = sentinel_step(env);
    grid.push_back(env.min_value() - h);
    grid.push_back(env.max_value() + h);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
               grid.end());
    return grid;
}

nlohmann::json to_json(const InformationStructure& s) {
    nlohmann::json triples = nlohmann::json::array();
    for (std::size_t ts = 0; ts < s.n_seller(); ++ts)
        for (std::size_t tb = 0; tb < s.n_buyer(); ++tb)
            for (std::size_t i = 0; i < s.n_values(); ++i)
                if (s.joint[ts][tb][i] != 0.0)
                    triples.push_back({s.seller_signals[ts], s.buyer_signals[tb], i,
                                       s.joint[ts][tb][i]});
    const ClassTags tags = classify(s);
    nlohmann::json tag_list = nlohmann::json::array();
    if (tags.uninformed_seller) tag_list.push_back("uninformed_seller");
    if (tags.fully_informed_buyer) tag_list.push_back("fully_informed_buyer");
    if (tags.more_informed_buyer) tag_list.push_back("more_informed_buyer");
    return {{"seller_signals", s.seller_signals},
            {"buyer_signals", s.buyer_signals},
            {"n_values", s.n_values()},
            {"joint", triples},
            {"tags", tag_list}};
}

InformationStructure structure_from_json(const nlohmann::json& j) {
    InformationStructure s;
    try {
        s.seller_signals = j.at("seller_signals").get<std::vector<std::string>>();
        s.buyer_signals = j.at("buyer_signals").get<std::vector<std::string>>();
        const std::size_t n = j.at("n_values").get<std::size_t>();
        s.joint.assign(s.n_seller(),
                       std::vector<std::vector<double>>(s.n_buyer(), std::vector<double>(n, 0.0)));
        auto index_of = [](const std::vector<std::string>& labels, const std::string& x) {
            const auto it = std::find(labels.begin(), labels.end(), x);
            if (it == labels.end()) throw input_error("structure document: unknown signal " + x);
            return std::size_t(it - labels.begin());
        };
        for (const auto& t : j.at("joint")) {
            const std::size_t ts = index_of(s.seller_signals, t.at(0).get<std::string>());
            const std::size_t tb = index_of(s.buyer_signals, t.at(1).get<std::string>());
            const std::size_t i = t.at(2).get<std::size_t>();
            s.joint.at(ts).at(tb).at(i) = t.at(3).get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("structure document: ") + e.what());
    }
    return s;
}

nlohmann::json to_json(const StrategyProfile& p) {
    nlohmann::json beliefs = nlohmann::json::array();
    for (const auto& row : p.beliefs) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& nu : row) r.push_back(nu.weights);
        beliefs.push_back(r);
    }
    return {{"grid", p.price_grid},
            {"sigma", p.seller_strategy},
            {"alpha", p.buyer_strategy},
            {"beliefs", beliefs}};
}

StrategyProfile profile_from_json(const nlohmann::json& j) {
    StrategyProfile p;
    try {
        p.price_grid = j.at("grid").get<std::vector<double>>();
        p.seller_strategy = j.at("sigma").get<std::vector<std::vector<double>>>();
        p.buyer_strategy = j.at("alpha").get<std::vector<std::vector<double>>>();
        for (const auto& row : j.at("beliefs")) {
            std::vector<Belief> r;
            for (const auto& w : row) r.push_back(Belief{w.get<std::vector<double>>()});
            p.beliefs.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("profile document: ") + e.what());
    }
    return p;
}

}  // namespace infodesign
