#include "infodesign/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace infodesign {

namespace {

double payoff_scale(const Environment& env) {
    return std::max(1.0, std::fabs(env.expected_value()) + std::fabs(env.expected_cost()));
}

const char* kind_name(PayoffRegion::Kind k) {
    switch (k) {
        case PayoffRegion::Kind::triangle_all: return "triangle_all";
        case PayoffRegion::Kind::triangle_us: return "triangle_us";
        case PayoffRegion::Kind::triangle_fb: return "triangle_fb";
        case PayoffRegion::Kind::negative_envelope: return "negative_envelope";
    }
    return "unknown";
}

PayoffRegion make_triangle(const Environment& env, PayoffRegion::Kind kind, double floor_value,
                           char bottom_left, char bottom_right) {
    const double total = surplus(env);
    PayoffRegion region;
    region.kind = kind;
    if (total - floor_value <= 1e-12 * payoff_scale(env)) {
        region.vertices = {{0.0, total}};
        region.labels['A'] = 0;
        return region;
    }
    region.vertices = {{0.0, total}, {0.0, floor_value}, {total - floor_value, floor_value}};
    region.labels['A'] = 0;
    region.labels[bottom_left] = 1;
    region.labels[bottom_right] = 2;
    return region;
}

// Sutherland-Hodgman step: keep a*x + b*y <= c.
std::vector<PayoffPoint> clip_halfplane(const std::vector<PayoffPoint>& poly, double a, double b,
                                        double c, double tol) {
    std::vector<PayoffPoint> out;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
        const PayoffPoint& p = poly[i];
        const PayoffPoint& q = poly[(i + 1) % m];
        const double fp = a * p.pi_b + b * p.pi_s - c;
        const double fq = a * q.pi_b + b * q.pi_s - c;
        if (fp <= tol) out.push_back(p);
        if ((fp > tol) != (fq > tol) && std::fabs(fp - fq) > 0.0) {
            const double t = fp / (fp - fq);
            out.push_back({p.pi_b + t * (q.pi_b - p.pi_b), p.pi_s + t * (q.pi_s - p.pi_s)});
        }
    }
    // Drop consecutive duplicates introduced by clipping.
    std::vector<PayoffPoint> dedup;
    for (const auto& v : out) {
        if (!dedup.empty() && std::fabs(dedup.back().pi_b - v.pi_b) < 1e-12 &&
            std::fabs(dedup.back().pi_s - v.pi_s) < 1e-12)
            continue;
        dedup.push_back(v);
    }
    while (dedup.size() > 1 && std::fabs(dedup.front().pi_b - dedup.back().pi_b) < 1e-12 &&
           std::fabs(dedup.front().pi_s - dedup.back().pi_s) < 1e-12)
        dedup.pop_back();
    return dedup;
}

double segment_distance(PayoffPoint a, PayoffPoint b, PayoffPoint p) {
    const double dx = b.pi_b - a.pi_b, dy = b.pi_s - a.pi_s;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0)
        t = std::clamp(((p.pi_b - a.pi_b) * dx + (p.pi_s - a.pi_s) * dy) / len2, 0.0, 1.0);
    const double ex = a.pi_b + t * dx - p.pi_b, ey = a.pi_s + t * dy - p.pi_s;
    return std::sqrt(ex * ex + ey * ey);
}

}  // namespace

double seller_guarantee(const Environment& env) {
    return std::max(env.min_value() - env.expected_cost(), 0.0);
}

FbFloor seller_floor_fb(const Environment& env) {
    if (!env.gains_from_trade)
        throw input_error("seller_floor_fb: environment must have gains from trade");
    FbFloor out;
    std::vector<double> profits(env.size(), 0.0);
    out.value = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < env.size(); ++k) {
        const double p = env.values[k];
        double profit = 0.0;
        for (std::size_t i = k; i < env.size(); ++i)
            profit += (p - env.costs[i]) * env.probs[i];
        profits[k] = profit;
        out.value = std::max(out.value, profit);
    }
    for (std::size_t k = 0; k < env.size(); ++k)
        if (profits[k] >= out.value - 1e-12) out.prices.push_back(env.values[k]);
    return out;
}

UsFloor seller_floor_us(const Environment& env, const MinProfitConfig& config) {
    if (!env.gains_from_trade)
        throw input_error("seller_floor_us: environment must have gains from trade");
    UsFloor out;
    const AffineCosts ac = detect_affine_costs(env, 1e-10);
    if (ac.affine) {
        out.affine = affine_p_star(env);
        out.value = out.affine->pi_us;
        out.exact = true;
        return out;
    }
    out.search = min_seller_profit_search(env, config);
    out.value = out.search->upper_bound;
    out.exact = false;
    return out;
}

PayoffRegion region_all(const Environment& env) {
    if (!env.gains_from_trade)
        throw input_error("region_all: environment must have gains from trade");
    return make_triangle(env, PayoffRegion::Kind::triangle_all, seller_guarantee(env), 'F', 'G');
}

PayoffRegion region_us(const Environment& env) {
    const double floor_value = std::max(seller_floor_us(env).value, seller_guarantee(env));
    return make_triangle(env, PayoffRegion::Kind::triangle_us, floor_value, 'D', 'E');
}

PayoffRegion region_fb(const Environment& env) {
    const double floor_value = std::max(seller_floor_fb(env).value, seller_guarantee(env));
    return make_triangle(env, PayoffRegion::Kind::triangle_fb, floor_value, 'B', 'C');
}

bool region_contains(const PayoffRegion& region, PayoffPoint point, double tol) {
    const auto& v = region.vertices;
    if (v.empty()) return false;
    if (v.size() == 1)
        return std::hypot(v[0].pi_b - point.pi_b, v[0].pi_s - point.pi_s) <= tol;
    if (v.size() == 2) return segment_distance(v[0], v[1], point) <= tol;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const PayoffPoint& a = v[i];
        const PayoffPoint& b = v[(i + 1) % v.size()];
        const double len = std::hypot(b.pi_b - a.pi_b, b.pi_s - a.pi_s);
        if (len < 1e-15) continue;
        const double cross = (b.pi_b - a.pi_b) * (point.pi_s - a.pi_s) -
                             (b.pi_s - a.pi_s) * (point.pi_b - a.pi_b);
        if (cross / len < -tol) return false;
    }
    return true;
}

double region_distance(const PayoffRegion& region, PayoffPoint point) {
    const auto& v = region.vertices;
    if (v.empty()) return std::numeric_limits<double>::infinity();
    if (v.size() == 1) return std::hypot(v[0].pi_b - point.pi_b, v[0].pi_s - point.pi_s);
    if (v.size() == 2) return segment_distance(v[0], v[1], point);
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const PayoffPoint& a = v[i];
        const PayoffPoint& b = v[(i + 1) % v.size()];
        const double len = std::hypot(b.pi_b - a.pi_b, b.pi_s - a.pi_s);
        if (len < 1e-15) continue;
        const double cross = (b.pi_b - a.pi_b) * (point.pi_s - a.pi_s) -
                             (b.pi_s - a.pi_s) * (point.pi_b - a.pi_b);
        worst = std::max(worst, -cross / len);
    }
    return worst;
}

bool region_subset(const PayoffRegion& inner, const PayoffRegion& outer, double tol) {
    for (const auto& v : inner.vertices)
        if (!region_contains(outer, v, tol)) return false;
    return true;
}

double s_lambda(const Environment& env, double lambda) {
    if (lambda < 1.0) throw input_error("s_lambda: lambda must be >= 1");
    const double v_min = env.min_value();
    double total = 0.0;
    for (std::size_t i = 0; i < env.size(); ++i)
        total += env.probs[i] *
                 std::max(v_min - env.costs[i] + lambda * (env.values[i] - v_min), 0.0);
    return total;
}

double pi_hat_s(const Environment& env) {
    const double v_min = env.min_value();
    double total = 0.0;
    for (std::size_t i = 0; i < env.size(); ++i)
        if (env.values[i] >= env.costs[i]) total += env.probs[i] * (v_min - env.costs[i]);
    return std::max(total, 0.0);
}

std::vector<double> default_lambda_grid() {
    return {1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0, 1e4, 1e6};
}

PayoffRegion region_negative(const Environment& env, std::vector<double> lambda_grid) {
    if (lambda_grid.empty()) throw input_error("region_negative: empty lambda grid");
    if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end()))
        throw input_error("region_negative: lambda grid must be sorted");
    if (std::fabs(lambda_grid.front() - 1.0) > 1e-12)
        throw input_error("region_negative: lambda grid must start at 1");
    if (lambda_grid.back() < 1e4)
        throw input_error("region_negative: lambda grid must reach at least 1e4");

    const double guarantee = seller_guarantee(env);
    const double s1 = s_lambda(env, 1.0);
    const double x_hi = std::max(s1 - guarantee, 0.0) + 1.0;
    const double y_hi = s1 + 1.0;

    std::vector<PayoffPoint> poly = {
        {0.0, guarantee}, {x_hi, guarantee}, {x_hi, y_hi}, {0.0, y_hi}};
    for (double lambda : lambda_grid) {
        poly = clip_halfplane(poly, lambda, 1.0, s_lambda(env, lambda), 1e-12);
        if (poly.empty()) break;
    }
    if (poly.empty())
        throw std::runtime_error("region_negative: empty intersection (tolerance-driven)");

    PayoffRegion region;
    region.kind = PayoffRegion::Kind::negative_envelope;
    region.vertices = std::move(poly);
    return region;
}

nlohmann::json to_json(const PayoffRegion& region) {
    nlohmann::json vertices = nlohmann::json::array();
    for (const auto& v : region.vertices) vertices.push_back({v.pi_b, v.pi_s});
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [c, idx] : region.labels) labels[std::string(1, c)] = idx;
    return {{"kind", kind_name(region.kind)}, {"vertices", vertices}, {"labels", labels}};
}

std::string region_to_csv(const PayoffRegion& region) {
    std::ostringstream out;
    out.precision(17);
    out << "pi_b,pi_s\n";
    for (const auto& v : region.vertices) out << v.pi_b << "," << v.pi_s << "\n";
    return out.str();
}

std::string regions_to_svg(const std::vector<PayoffRegion>& regions) {
    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    bool any = false;
    for (const auto& r : regions) {
        for (const auto& v : r.vertices) {
            if (!any) {
                min_x = max_x = v.pi_b;
                min_y = max_y = v.pi_s;
                any = true;
            }
            min_x = std::min(min_x, v.pi_b);
            max_x = std::max(max_x, v.pi_b);
            min_y = std::min(min_y, v.pi_s);
            max_y = std::max(max_y, v.pi_s);
        }
    }
    min_x = std::min(min_x, 0.0);
    min_y = std::min(min_y, 0.0);
    const double span_x = std::max(max_x - min_x, 1e-9);
    const double span_y = std::max(max_y - min_y, 1e-9);
    const double margin = 60.0, side = 600.0;
    auto X = [&](double x) { return margin + (x - min_x) / span_x * (side - 2 * margin); };
    auto Y = [&](double y) { return side - margin - (y - min_y) / span_y * (side - 2 * margin); };

    static const char* fills[] = {"#9ecae1", "#a1d99b", "#fdae6b", "#fc9272"};
    std::ostringstream svg;
    svg.precision(10);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 600 600\">\n";
    svg << "  <rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
    svg << "  <line x1=\"" << X(min_x) << "\" y1=\"" << Y(0.0) << "\" x2=\"" << X(max_x)
        << "\" y2=\"" << Y(0.0) << "\" stroke=\"#444\"/>\n";
    svg << "  <line x1=\"" << X(0.0) << "\" y1=\"" << Y(min_y) << "\" x2=\"" << X(0.0)
        << "\" y2=\"" << Y(max_y) << "\" stroke=\"#444\"/>\n";
    svg << "  <text x=\"" << X(max_x) - 30 << "\" y=\"" << Y(0.0) + 25
        << "\" font-size=\"14\">pi_b</text>\n";
    svg << "  <text x=\"" << X(0.0) + 8 << "\" y=\"" << Y(max_y) + 4
        << "\" font-size=\"14\">pi_s</text>\n";
    int color = 0;
    for (const auto& r : regions) {
        if (r.vertices.empty()) continue;
        svg << "  <polygon points=\"";
        for (const auto& v : r.vertices) svg << X(v.pi_b) << "," << Y(v.pi_s) << " ";
        svg << "\" fill=\"" << fills[color % 4] << "\" fill-opacity=\"0.45\" stroke=\"#333\"/>\n";
        for (const auto& [c, idx] : r.labels) {
            const auto& v = r.vertices[idx];
            svg << "  <text x=\"" << X(v.pi_b) + 6 << "\" y=\"" << Y(v.pi_s) - 6
                << "\" font-size=\"15\">" << c << "</text>\n";
        }
        ++color;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace infodesign
