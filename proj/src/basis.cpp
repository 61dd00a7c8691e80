#include "cfm/basis.hpp"

#include <array>
#include <cmath>

namespace cfm {

namespace {

constexpr int kMaxPoly = HierarchicBasis::kMaxDegree + 1;

// Dense monomial-coefficient polynomials (low order first). Degrees stay
// <= 12 so double coefficients evaluated by Horner are accurate on [-1,1].
struct Poly {
    std::array<double, kMaxPoly + 2> c{};
    int deg = 0;

    double eval(double x) const {
        double r = c[static_cast<size_t>(deg)];
        for (int k = deg - 1; k >= 0; --k) r = r * x + c[static_cast<size_t>(k)];
        return r;
    }
    Poly deriv() const {
        Poly d;
        d.deg = deg > 0 ? deg - 1 : 0;
        for (int k = 1; k <= deg; ++k) d.c[static_cast<size_t>(k - 1)] = k * c[static_cast<size_t>(k)];
        return d;
    }
};

struct PolyTables {
    std::array<Poly, kMaxPoly + 1> legendre;      // P_0..P_13
    std::array<Poly, kMaxPoly + 1> legendre_d;    // P'_k
    std::array<Poly, kMaxPoly + 1> kernel;        // psi_m, m = 0..kMaxDegree-2
    std::array<Poly, kMaxPoly + 1> kernel_d;

    PolyTables() {
        legendre[0].deg = 0;
        legendre[0].c[0] = 1.0;
        legendre[1].deg = 1;
        legendre[1].c[1] = 1.0;
        for (int k = 2; k <= kMaxPoly; ++k) {
            // (k) P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}
            Poly pk;
            pk.deg = k;
            const Poly& a = legendre[static_cast<size_t>(k - 1)];
            const Poly& b = legendre[static_cast<size_t>(k - 2)];
            for (int i = 0; i <= a.deg; ++i)
                pk.c[static_cast<size_t>(i + 1)] += (2.0 * k - 1.0) / k * a.c[static_cast<size_t>(i)];
            for (int i = 0; i <= b.deg; ++i)
                pk.c[static_cast<size_t>(i)] -= (k - 1.0) / k * b.c[static_cast<size_t>(i)];
            legendre[static_cast<size_t>(k)] = pk;
        }
        for (int k = 0; k <= kMaxPoly; ++k)
            legendre_d[static_cast<size_t>(k)] = legendre[static_cast<size_t>(k)].deriv();

        // Integrated Legendre lo_k = (P_k - P_{k-2}) / sqrt(2(2k-1)) vanishes
        // at +-1; the edge kernel psi_{k-2} = -4 * lo_k / (x^2 - 1) is a
        // polynomial, obtained by exact synthetic division.
        for (int k = 2; k <= kMaxPoly; ++k) {
            Poly lo;
            lo.deg = k;
            double s = 1.0 / std::sqrt(2.0 * (2.0 * k - 1.0));
            for (int i = 0; i <= k; ++i)
                lo.c[static_cast<size_t>(i)] =
                    s * (legendre[static_cast<size_t>(k)].c[static_cast<size_t>(i)] -
                         (i <= k - 2 ? legendre[static_cast<size_t>(k - 2)].c[static_cast<size_t>(i)] : 0.0));
            // Divide lo by (x^2 - 1): process coefficients from the top.
            Poly q;
            q.deg = k - 2;
            std::array<double, kMaxPoly + 2> rem = lo.c;
            for (int i = k; i >= 2; --i) {
                double t = rem[static_cast<size_t>(i)];
                q.c[static_cast<size_t>(i - 2)] = t;
                rem[static_cast<size_t>(i)] = 0.0;
                rem[static_cast<size_t>(i - 2)] += t;  // subtract t*(x^2 - 1)*x^(i-2)
            }
            Poly psi;
            psi.deg = k - 2;
            for (int i = 0; i <= k - 2; ++i) psi.c[static_cast<size_t>(i)] = -4.0 * q.c[static_cast<size_t>(i)];
            kernel[static_cast<size_t>(k - 2)] = psi;
            kernel_d[static_cast<size_t>(k - 2)] = psi.deriv();
        }
    }
};

const PolyTables& tables() {
    static const PolyTables t;
    return t;
}

}  // namespace

HierarchicBasis::HierarchicBasis(int p) : p_(p) {
    if (p < 1 || p > kMaxDegree)
        throw Error("capability", "polynomial degree out of the implemented range 1.." +
                                      std::to_string(kMaxDegree));
    for (int v = 0; v < 3; ++v) modes_.push_back({ModeKind::Vertex, v, 1, 0});
    for (int e = 0; e < 3; ++e)
        for (int k = 2; k <= p_; ++k) modes_.push_back({ModeKind::Edge, e, k, k - 2});
    int bub = 0;
    for (int d = 3; d <= p_; ++d)
        for (int i = 0; i <= d - 3; ++i)
            modes_.push_back({ModeKind::Bubble, -1, d, bub++});
}

void HierarchicBasis::eval(double xi, double eta, double* values) const {
    const auto& T = tables();
    const double lambda[3] = {1.0 - xi - eta, xi, eta};
    int m = 0;
    for (int v = 0; v < 3; ++v) values[m++] = lambda[v];
    for (int e = 0; e < 3; ++e) {
        double la = lambda[kEdgeVertices[e][0]];
        double lb = lambda[kEdgeVertices[e][1]];
        double x = lb - la;
        double prod = la * lb;
        for (int k = 2; k <= p_; ++k)
            values[m++] = prod * T.kernel[static_cast<size_t>(k - 2)].eval(x);
    }
    double bubble = lambda[0] * lambda[1] * lambda[2];
    double x1 = lambda[1] - lambda[0];
    double x2 = 2.0 * lambda[2] - 1.0;
    for (int d = 3; d <= p_; ++d)
        for (int i = 0; i <= d - 3; ++i) {
            int j = d - 3 - i;
            values[m++] = bubble * T.legendre[static_cast<size_t>(i)].eval(x1) *
                          T.legendre[static_cast<size_t>(j)].eval(x2);
        }
}

void HierarchicBasis::eval_grad(double xi, double eta, Vec2* grads) const {
    const auto& T = tables();
    const double lambda[3] = {1.0 - xi - eta, xi, eta};
    const Vec2 dl[3] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    int m = 0;
    for (int v = 0; v < 3; ++v) grads[m++] = dl[v];
    for (int e = 0; e < 3; ++e) {
        int a = kEdgeVertices[e][0], b = kEdgeVertices[e][1];
        double la = lambda[a], lb = lambda[b];
        double x = lb - la;
        Vec2 dprod = dl[a] * lb + dl[b] * la;
        Vec2 dx = dl[b] - dl[a];
        double prod = la * lb;
        for (int k = 2; k <= p_; ++k) {
            double psi = T.kernel[static_cast<size_t>(k - 2)].eval(x);
            double dpsi = T.kernel_d[static_cast<size_t>(k - 2)].eval(x);
            grads[m++] = dprod * psi + dx * (prod * dpsi);
        }
    }
    double l0 = lambda[0], l1 = lambda[1], l2 = lambda[2];
    double bubble = l0 * l1 * l2;
    Vec2 dbubble = dl[0] * (l1 * l2) + dl[1] * (l0 * l2) + dl[2] * (l0 * l1);
    double x1 = l1 - l0;
    double x2 = 2.0 * l2 - 1.0;
    Vec2 dx1 = dl[1] - dl[0];
    Vec2 dx2 = dl[2] * 2.0;
    for (int d = 3; d <= p_; ++d)
        for (int i = 0; i <= d - 3; ++i) {
            int j = d - 3 - i;
            double pi = T.legendre[static_cast<size_t>(i)].eval(x1);
            double pj = T.legendre[static_cast<size_t>(j)].eval(x2);
            double dpi = T.legendre_d[static_cast<size_t>(i)].eval(x1);
            double dpj = T.legendre_d[static_cast<size_t>(j)].eval(x2);
            grads[m++] = dbubble * (pi * pj) + dx1 * (bubble * dpi * pj) +
                         dx2 * (bubble * pi * dpj);
        }
}

HierarchicBasis::Table HierarchicBasis::tabulate(const TriangleRule& rule) const {
    Table t;
    int nq = static_cast<int>(rule.points.size());
    int n = dim();
    t.value.resize(nq, n);
    t.dxi.resize(nq, n);
    t.deta.resize(nq, n);
    std::vector<double> vals(static_cast<size_t>(n));
    std::vector<Vec2> grads(static_cast<size_t>(n));
    for (int q = 0; q < nq; ++q) {
        eval(rule.points[static_cast<size_t>(q)].x, rule.points[static_cast<size_t>(q)].y, vals.data());
        eval_grad(rule.points[static_cast<size_t>(q)].x, rule.points[static_cast<size_t>(q)].y, grads.data());
        for (int i = 0; i < n; ++i) {
            t.value(q, i) = vals[static_cast<size_t>(i)];
            t.dxi(q, i) = grads[static_cast<size_t>(i)].x;
            t.deta(q, i) = grads[static_cast<size_t>(i)].y;
        }
    }
    return t;
}

}  // namespace cfm
