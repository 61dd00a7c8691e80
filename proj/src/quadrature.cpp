#include "cfm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace cfm {

GaussRule gauss_legendre(int n) {
    if (n < 1) throw Error("invalid-parameter", "Gauss rule needs n >= 1");
    GaussRule rule;
    rule.points.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    // Newton iteration on P_n from the Chebyshev-like initial guess; only the
    // lower half is computed, the rest follows by symmetry.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                // one polishing step
                p0 = 1.0; p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                x -= p1 / pp;
                break;
            }
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.points[static_cast<size_t>(i)] = -x;
        rule.points[static_cast<size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<size_t>(i)] = w;
        rule.weights[static_cast<size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) rule.points[static_cast<size_t>(n / 2)] = 0.0;
    return rule;
}

namespace {

TriangleRule build_triangle_rule(int order) {
    // Collapsed map (a,b) in [0,1]^2 -> (x,y) = (a(1-b), b) with Jacobian
    // (1-b). A degree-d integrand becomes degree <= d in a and <= d+1 in b.
    int na = (order + 2) / 2;
    int nb = (order + 3) / 2 + 1;
    GaussRule ga = gauss_legendre(na);
    GaussRule gb = gauss_legendre(nb);
    TriangleRule rule;
    rule.order = order;
    for (int ib = 0; ib < nb; ++ib) {
        double b = 0.5 * (gb.points[static_cast<size_t>(ib)] + 1.0);
        double wb = 0.5 * gb.weights[static_cast<size_t>(ib)];
        for (int ia = 0; ia < na; ++ia) {
            double a = 0.5 * (ga.points[static_cast<size_t>(ia)] + 1.0);
            double wa = 0.5 * ga.weights[static_cast<size_t>(ia)];
            rule.points.push_back({a * (1.0 - b), b});
            rule.weights.push_back(wa * wb * (1.0 - b));
        }
    }
    return rule;
}

std::map<int, TriangleRule> g_rules;
std::mutex g_rules_mutex;

}  // namespace

const TriangleRule& triangle_rule(int order) {
    std::lock_guard<std::mutex> lock(g_rules_mutex);
    auto it = g_rules.find(order);
    if (it == g_rules.end()) it = g_rules.emplace(order, build_triangle_rule(order)).first;
    return it->second;
}

}  // namespace cfm
