#include "infodesign/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace infodesign {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double Environment::expected_value() const { return dot(probs, values); }
double Environment::expected_cost() const { return dot(probs, costs); }

Environment make_environment(std::vector<double> values, std::vector<double> probs,
                             std::vector<double> costs, std::string name) {
    const std::size_t n = values.size();
    if (n == 0) throw input_error("environment: empty value support");
    if (probs.size() != n || costs.size() != n)
        throw input_error("environment: values, probs, costs must have equal length");
    for (double p : probs) {
        if (!(p > 0.0)) throw input_error("environment: probabilities must be positive");
        if (!std::isfinite(p)) throw input_error("environment: non-finite probability");
    }
    for (double v : values)
        if (!std::isfinite(v)) throw input_error("environment: non-finite value");
    for (double c : costs)
        if (!std::isfinite(c)) throw input_error("environment: non-finite cost");

    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::fabs(total - 1.0) > 1e-9)
        throw input_error("environment: probabilities sum to " + std::to_string(total) +
                          ", expected 1");

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (values[i + 1] < values[i] - merge_tol)
            throw input_error("environment: values not increasing");
    }

    // Merge support points closer than merge_tol; cost becomes E[c | v].
    Environment env;
    env.name = std::move(name);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        double p = 0.0, pc = 0.0, pv = 0.0;
        while (j < n && values[j] - values[i] <= merge_tol) {
            p += probs[j];
            pc += probs[j] * costs[j];
            pv += probs[j] * values[j];
            ++j;
        }
        env.values.push_back(pv / p);
        env.probs.push_back(p / total);
        env.costs.push_back(pc / p);
        i = j;
    }

    bool all_below = true;
    for (std::size_t i = 0; i < env.size(); ++i)
        if (env.costs[i] > env.values[i]) all_below = false;
    env.gains_from_trade = all_below && surplus(env) > 0.0;
    return env;
}

Environment load_environment(const nlohmann::json& document) {
    if (!document.is_object()) throw input_error("environment document: expected an object");
    for (const char* key : {"values", "probs", "costs"}) {
        if (!document.contains(key) || !document.at(key).is_array())
            throw input_error(std::string("environment document: missing array key '") + key +
                              "'");
    }
    std::string name = document.value("name", "");
    try {
        return make_environment(document.at("values").get<std::vector<double>>(),
                                document.at("probs").get<std::vector<double>>(),
                                document.at("costs").get<std::vector<double>>(), name);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("environment document: ") + e.what());
    }
}

Environment load_environment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open environment file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("cannot parse " + path + ": " + e.what());
    }
    if (doc.contains("joint")) return load_bidimensional(doc, doc.value("name", ""));
    return load_environment(doc);
}

nlohmann::json to_json(const Environment& env) {
    nlohmann::json j;
    j["values"] = env.values;
    j["probs"] = env.probs;
    j["costs"] = env.costs;
    if (!env.name.empty()) j["name"] = env.name;
    return j;
}

double surplus(const Environment& env) {
    double s = 0.0;
    for (std::size_t i = 0; i < env.size(); ++i)
        s += env.probs[i] * (env.values[i] - env.costs[i]);
    return s;
}

Environment reduce_bidimensional(const std::vector<BidimensionalRow>& rows, std::string name) {
    if (rows.empty()) throw input_error("bidimensional: empty input");
    double total = 0.0;
    for (const auto& r : rows) {
        if (r.prob < 0.0) throw input_error("bidimensional: negative probability");
        total += r.prob;
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw input_error("bidimensional: probabilities sum to " + std::to_string(total));

    std::vector<BidimensionalRow> sorted = rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const BidimensionalRow& a, const BidimensionalRow& b) {
                  return a.value < b.value;
              });

    std::vector<double> values, probs, costs;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        double p = 0.0, pc = 0.0, pv = 0.0;
        while (j < sorted.size() && sorted[j].value - sorted[i].value <= merge_tol) {
            p += sorted[j].prob;
            pc += sorted[j].prob * sorted[j].cost;
            pv += sorted[j].prob * sorted[j].value;
            ++j;
        }
        if (p > 0.0) {
            values.push_back(pv / p);
            probs.push_back(p);
            costs.push_back(pc / p);
        }
        i = j;
    }
    if (values.empty()) throw input_error("bidimensional: no mass");
    return make_environment(std::move(values), std::move(probs), std::move(costs),
                            std::move(name));
}

Environment load_bidimensional(const nlohmann::json& document, std::string name) {
    if (!document.contains("joint") || !document.at("joint").is_array())
        throw input_error("bidimensional document: missing array key 'joint'");
    std::vector<BidimensionalRow> rows;
    for (const auto& entry : document.at("joint")) {
        if (!entry.is_array() || entry.size() != 3)
            throw input_error("bidimensional document: each joint entry must be [v, c, prob]");
        rows.push_back({entry[0].get<double>(), entry[1].get<double>(), entry[2].get<double>()});
    }
    if (name.empty()) name = document.value("name", "");
    return reduce_bidimensional(rows, name);
}

Environment grid_environment(std::vector<std::pair<double, double>> density_points,
                             std::size_t n, const std::function<double(double)>& cost,
                             std::string name) {
    if (density_points.size() < 2) throw input_error("grid environment: need at least two points");
    if (n < 1) throw input_error("grid environment: need at least one sample");
    std::sort(density_points.begin(), density_points.end());
    for (const auto& [v, d] : density_points) {
        (void)v;
        if (d < 0.0) throw input_error("grid environment: negative density");
    }

    const double lo = density_points.front().first;
    const double hi = density_points.back().first;
    auto density_at = [&](double v) {
        for (std::size_t k = 0; k + 1 < density_points.size(); ++k) {
            const auto& [v0, d0] = density_points[k];
            const auto& [v1, d1] = density_points[k + 1];
            if (v <= v1) {
                if (v1 <= v0) return d1;
                return d0 + (d1 - d0) * (v - v0) / (v1 - v0);
            }
        }
        return density_points.back().second;
    };

    std::vector<double> values, probs, costs;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * double(i) / double(n - 1);
        const double d = density_at(v);
        if (d <= 0.0) continue;  // support points need positive mass
        values.push_back(v);
        probs.push_back(d);
        costs.push_back(cost(v));
        total += d;
    }
    if (values.empty()) throw input_error("grid environment: density vanishes everywhere");
    for (double& p : probs) p /= total;
    return make_environment(std::move(values), std::move(probs), std::move(costs),
                            std::move(name));
}

double Belief::mean(const Environment& env) const { return dot(weights, env.values); }
double Belief::mean_cost(const Environment& env) const { return dot(weights, env.costs); }

std::vector<std::size_t> Belief::support(double tol) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] > tol) idx.push_back(i);
    return idx;
}

Belief make_belief(const Environment& env, std::vector<double> weights, double tol) {
    if (weights.size() != env.size())
        throw input_error("belief: weight vector length mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (w < -tol) throw input_error("belief: negative weight");
        total += w;
    }
    if (std::fabs(total - 1.0) > std::max(tol, 1e-12))
        throw input_error("belief: weights sum to " + std::to_string(total));
    for (double& w : weights) w = std::max(0.0, w / total);
    return Belief{std::move(weights)};
}

Belief point_mass(const Environment& env, std::size_t index) {
    std::vector<double> w(env.size(), 0.0);
    w.at(index) = 1.0;
    return Belief{std::move(w)};
}

Belief prior_belief(const Environment& env) { return Belief{env.probs}; }

}  // namespace infodesign
