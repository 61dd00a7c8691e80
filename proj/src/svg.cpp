#include "cfm/svg.hpp"

#include <algorithm>
#include <cmath>

#include "cfm/jsonio.hpp"

namespace cfm {

namespace {

struct Canvas {
    std::string body;
    double x0, y0, x1, y1;  // world box
    double width, height;   // pixels

    Canvas(double wx0, double wy0, double wx1, double wy1, double px) {
        x0 = wx0; y0 = wy0; x1 = wx1; y1 = wy1;
        double aspect = (y1 - y0) / (x1 - x0);
        width = px;
        height = px * aspect;
    }
    double X(double x) const { return (x - x0) / (x1 - x0) * width; }
    double Y(double y) const { return height - (y - y0) / (y1 - y0) * height; }

    void polygon(const std::vector<Vec2>& pts, const std::string& fill,
                 const std::string& stroke, double stroke_width) {
        body += "<polygon points=\"";
        for (const auto& p : pts) {
            body += format_double(X(p.x)) + "," + format_double(Y(p.y)) + " ";
        }
        body += "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                format_double(stroke_width) + "\"/>\n";
    }
    void line(Vec2 a, Vec2 b, const std::string& stroke, double w,
              const std::string& dash = "") {
        body += "<line x1=\"" + format_double(X(a.x)) + "\" y1=\"" + format_double(Y(a.y)) +
                "\" x2=\"" + format_double(X(b.x)) + "\" y2=\"" + format_double(Y(b.y)) +
                "\" stroke=\"" + stroke + "\" stroke-width=\"" + format_double(w) + "\"";
        if (!dash.empty()) body += " stroke-dasharray=\"" + dash + "\"";
        body += "/>\n";
    }
    void text(Vec2 p, const std::string& s, int size = 12) {
        body += "<text x=\"" + format_double(X(p.x)) + "\" y=\"" + format_double(Y(p.y)) +
                "\" font-size=\"" + std::to_string(size) + "\" font-family=\"sans-serif\">" +
                s + "</text>\n";
    }
    std::string finish() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
               format_double(width) + "\" height=\"" + format_double(height) +
               "\" viewBox=\"0 0 " + format_double(width) + " " + format_double(height) +
               "\">\n" + body + "</svg>\n";
    }
};

}  // namespace

std::string svg_canonical(const CanonicalDomain& cd) {
    double mx = 0.08 * std::max(1.0, cd.h);
    Canvas c(-mx, -mx, 1.0 + mx, cd.h + mx, 640);
    c.polygon({{0, 0}, {1, 0}, {1, cd.h}, {0, cd.h}}, "white", "black", 1.5);
    for (const auto& s : cd.slits)
        c.line(s.zeta, {s.zeta.x + s.length, s.zeta.y}, "red", 2.0);
    return c.finish();
}

std::string svg_checkerboard(const Mesh& mesh, const std::vector<MapSample>& samples,
                             int density) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& n : mesh.nodes) {
        x0 = std::min(x0, n.x); y0 = std::min(y0, n.y);
        x1 = std::max(x1, n.x); y1 = std::max(y1, n.y);
    }
    double m = 0.03 * std::max(x1 - x0, y1 - y0);
    Canvas c(x0 - m, y0 - m, x1 + m, y1 + m, 800);

    // Samples per element form a barycentric grid; index (i,j), j inner.
    int per_element = (density + 1) * (density + 2) / 2;
    auto idx = [&](int base, int i, int j) {
        int off = 0;
        for (int k = 0; k < i; ++k) off += density - k + 1;
        return base + off + j;
    };
    for (int t = 0; t < mesh.element_count(); ++t) {
        int base = t * per_element;
        for (int i = 0; i < density; ++i)
            for (int j = 0; j < density - i; ++j) {
                const MapSample& a = samples[static_cast<size_t>(idx(base, i, j))];
                const MapSample& b = samples[static_cast<size_t>(idx(base, i + 1, j))];
                const MapSample& d = samples[static_cast<size_t>(idx(base, i, j + 1))];
                int parity = (a.checker + b.checker + d.checker) >= 2 ? 1 : 0;
                c.polygon({a.domain, b.domain, d.domain},
                          parity ? "#202020" : "#f2f2f2", "none", 0.0);
                if (i + j < density - 1) {
                    const MapSample& e = samples[static_cast<size_t>(idx(base, i + 1, j + 1))];
                    int par2 = (b.checker + e.checker + d.checker) >= 2 ? 1 : 0;
                    c.polygon({b.domain, e.domain, d.domain},
                              par2 ? "#202020" : "#f2f2f2", "none", 0.0);
                }
            }
    }
    for (const auto& be : mesh.boundary) {
        c.line(mesh.nodes[static_cast<size_t>(be.nodes[0])],
               mesh.nodes[static_cast<size_t>(be.nodes[1])],
               be.tag.kind == BoundaryTag::Kind::Gamma ? "black" : "red", 1.2);
    }
    return c.finish();
}

std::string svg_mesh(const Mesh& mesh) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& n : mesh.nodes) {
        x0 = std::min(x0, n.x); y0 = std::min(y0, n.y);
        x1 = std::max(x1, n.x); y1 = std::max(y1, n.y);
    }
    double m = 0.03 * std::max(x1 - x0, y1 - y0);
    Canvas c(x0 - m, y0 - m, x1 + m, y1 + m, 800);
    for (const auto& el : mesh.elements) {
        c.polygon({mesh.nodes[static_cast<size_t>(el[0])], mesh.nodes[static_cast<size_t>(el[1])],
                   mesh.nodes[static_cast<size_t>(el[2])]},
                  "none", "#888888", 0.5);
    }
    for (const auto& be : mesh.boundary)
        c.line(mesh.nodes[static_cast<size_t>(be.nodes[0])],
               mesh.nodes[static_cast<size_t>(be.nodes[1])],
               be.tag.kind == BoundaryTag::Kind::Cut ? "red" : "black", 1.2);
    return c.finish();
}

std::string svg_convergence(const std::vector<StudyRow>& rows) {
    // Collect (log10 N, log10 value) series.
    auto safe_log = [](double v) { return std::log10(std::max(v, 1e-300)); };
    std::vector<Vec2> reci, eta_u, eta_v;
    for (const auto& r : rows) {
        double x = safe_log(static_cast<double>(r.N));
        reci.push_back({x, safe_log(r.reci)});
        if (r.eta_primary >= 0) {
            eta_u.push_back({x, safe_log(r.eta_primary * r.eta_primary / r.M)});
            eta_v.push_back({x, safe_log(r.eta_conjugate * r.eta_conjugate / r.Mt)});
        }
    }
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto absorb = [&](const std::vector<Vec2>& s) {
        for (const auto& p : s) {
            x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
        }
    };
    absorb(reci);
    absorb(eta_u);
    absorb(eta_v);
    double mx = 0.08 * std::max(1e-6, x1 - x0), my = 0.08 * std::max(1e-6, y1 - y0);
    Canvas c(x0 - mx, y0 - my, x1 + mx, y1 + 3 * my, 720);
    // Axes box and decade ticks.
    c.polygon({{x0 - mx, y0 - my}, {x1 + mx, y0 - my}, {x1 + mx, y1 + 3 * my},
               {x0 - mx, y1 + 3 * my}},
              "none", "black", 1.0);
    for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d) {
        c.line({x0 - mx, static_cast<double>(d)}, {x1 + mx, static_cast<double>(d)}, "#dddddd", 0.6);
        c.text({x0 - 0.9 * mx, static_cast<double>(d)}, "1e" + std::to_string(d), 10);
    }
    auto polyline = [&](const std::vector<Vec2>& s, const std::string& color,
                        const std::string& dash) {
        for (size_t i = 0; i + 1 < s.size(); ++i) c.line(s[i], s[i + 1], color, 1.6, dash);
        for (const auto& p : s)
            c.polygon({{p.x - 0.01, p.y - 0.01 * 3}, {p.x + 0.01, p.y - 0.01 * 3},
                       {p.x, p.y + 0.02 * 3}},
                      color, "none", 0);
    };
    polyline(reci, "black", "");
    polyline(eta_u, "#1f77b4", "6,4");
    polyline(eta_v, "#d62728", "2,3");
    c.text({x0, y1 + 2.4 * my}, "solid: reciprocal error; dashed/dotted: relative "
                                "auxiliary estimates (primary/conjugate); x: log10 N", 11);
    return c.finish();
}

}  // namespace cfm
