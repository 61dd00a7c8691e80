#include "cfm/geometry.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace cfm {

Eigen::Matrix2d SurfaceChart::first_fundamental(double u, double v) const {
    Eigen::Matrix<double, 3, 2> J = jacobian(u, v);
    return J.transpose() * J;
}

Eigen::Matrix2d metric_coefficient(const SurfaceChart& chart, const Vec2& p) {
    if (chart.is_identity()) return Eigen::Matrix2d::Identity();
    Eigen::Matrix2d G = chart.first_fundamental(p.x, p.y);
    double det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
    if (!(det > 0.0) || !std::isfinite(det)) {
        std::ostringstream os;
        os << "first fundamental form singular at (" << p.x << ", " << p.y << ")";
        throw Error("metric-degenerate", os.str());
    }
    double s = std::sqrt(det);
    Eigen::Matrix2d M;
    M(0, 0) = G(1, 1) * s / det;
    M(1, 1) = G(0, 0) * s / det;
    M(0, 1) = -G(0, 1) * s / det;
    M(1, 0) = M(0, 1);
    return M;
}

// --- plane ---

Eigen::Vector3d PlaneChart::position(double u, double v) const {
    return {u, v, 0.0};
}

Eigen::Matrix<double, 3, 2> PlaneChart::jacobian(double, double) const {
    Eigen::Matrix<double, 3, 2> J;
    J << 1, 0, 0, 1, 0, 0;
    return J;
}

// --- torus ---

TorusChart::TorusChart(double inner_radius, double outer_radius) {
    if (!(inner_radius > 0.0) || !(outer_radius > inner_radius))
        throw Error("invalid-parameter", "torus radii must satisfy 0 < r < R");
    tube_ = 0.5 * (outer_radius - inner_radius);
    center_ = 0.5 * (outer_radius + inner_radius);
}

Eigen::Vector3d TorusChart::position(double u, double v) const {
    double ring = center_ + tube_ * std::cos(u);
    return {ring * std::cos(v), ring * std::sin(v), tube_ * std::sin(u)};
}

Eigen::Matrix<double, 3, 2> TorusChart::jacobian(double u, double v) const {
    double ring = center_ + tube_ * std::cos(u);
    double su = std::sin(u), cu = std::cos(u);
    double sv = std::sin(v), cv = std::cos(v);
    Eigen::Matrix<double, 3, 2> J;
    J(0, 0) = -tube_ * su * cv;
    J(0, 1) = -ring * sv;
    J(1, 0) = -tube_ * su * sv;
    J(1, 1) = ring * cv;
    J(2, 0) = tube_ * cu;
    J(2, 1) = 0.0;
    return J;
}

// --- hemisphere ---

HemisphereChart::HemisphereChart(const Vec2& rect_min, const Vec2& rect_max) {
    if (!(rect_max.x > rect_min.x) || !(rect_max.y > rect_min.y))
        throw Error("invalid-parameter", "hemisphere rectangle is degenerate");
    center_ = {0.5 * (rect_min.x + rect_max.x), 0.5 * (rect_min.y + rect_max.y)};
    radius_ = dist(center_, rect_max);
}

Eigen::Vector3d HemisphereChart::position(double u, double v) const {
    double du = u - center_.x, dv = v - center_.y;
    double h2 = radius_ * radius_ - du * du - dv * dv;
    if (h2 < 0.0) {
        std::ostringstream os;
        os << "point (" << u << ", " << v << ") outside the circumscribed disk";
        throw Error("domain-error", os.str());
    }
    return {u, v, std::sqrt(h2)};
}

Eigen::Matrix<double, 3, 2> HemisphereChart::jacobian(double u, double v) const {
    double du = u - center_.x, dv = v - center_.y;
    double h2 = radius_ * radius_ - du * du - dv * dv;
    if (!(h2 > 0.0)) {
        std::ostringstream os;
        os << "point (" << u << ", " << v << ") on or outside the equator";
        throw Error("domain-error", os.str());
    }
    double z = std::sqrt(h2);
    Eigen::Matrix<double, 3, 2> J;
    J << 1, 0, 0, 1, -du / z, -dv / z;
    return J;
}

std::shared_ptr<const SurfaceChart> make_plane_chart() {
    return std::make_shared<PlaneChart>();
}
std::shared_ptr<const SurfaceChart> make_torus_chart(double inner_radius,
                                                     double outer_radius) {
    return std::make_shared<TorusChart>(inner_radius, outer_radius);
}
std::shared_ptr<const SurfaceChart> make_hemisphere_chart(const Vec2& rect_min,
                                                          const Vec2& rect_max) {
    return std::make_shared<HemisphereChart>(rect_min, rect_max);
}

// ---------------------------------------------------------------------------
// Curve segments
// ---------------------------------------------------------------------------

CurveSegment CurveSegment::polyline(std::vector<Vec2> pts) {
    CurveSegment s;
    s.kind = SegmentKind::Polyline;
    s.points = std::move(pts);
    s.validate();
    return s;
}

CurveSegment CurveSegment::arc(Vec2 center, double radius, double theta0, double theta1) {
    CurveSegment s;
    s.kind = SegmentKind::Arc;
    s.center = center;
    s.radius = radius;
    s.theta0 = theta0;
    s.theta1 = theta1;
    s.validate();
    return s;
}

Vec2 CurveSegment::start() const {
    if (kind == SegmentKind::Polyline) return points.front();
    return center + radius * Vec2{std::cos(theta0), std::sin(theta0)};
}

Vec2 CurveSegment::end() const {
    if (kind == SegmentKind::Polyline) return points.back();
    return center + radius * Vec2{std::cos(theta1), std::sin(theta1)};
}

double CurveSegment::length() const {
    if (kind == SegmentKind::Polyline) {
        double L = 0;
        for (size_t i = 1; i < points.size(); ++i) L += dist(points[i - 1], points[i]);
        return L;
    }
    return radius * std::abs(theta1 - theta0);
}

Vec2 CurveSegment::start_tangent() const {
    if (kind == SegmentKind::Polyline) {
        Vec2 d = points[1] - points[0];
        double n = d.norm();
        return {d.x / n, d.y / n};
    }
    double sgn = theta1 >= theta0 ? 1.0 : -1.0;
    return {-sgn * std::sin(theta0), sgn * std::cos(theta0)};
}

Vec2 CurveSegment::end_tangent() const {
    if (kind == SegmentKind::Polyline) {
        Vec2 d = points[points.size() - 1] - points[points.size() - 2];
        double n = d.norm();
        return {d.x / n, d.y / n};
    }
    double sgn = theta1 >= theta0 ? 1.0 : -1.0;
    return {-sgn * std::sin(theta1), sgn * std::cos(theta1)};
}

void CurveSegment::validate() const {
    if (kind == SegmentKind::Polyline) {
        if (points.size() < 2)
            throw Error("invalid-parameter", "polyline needs at least 2 points");
        for (size_t i = 1; i < points.size(); ++i)
            if (dist(points[i - 1], points[i]) == 0.0)
                throw Error("invalid-parameter", "polyline has coincident consecutive points");
    } else {
        if (!(radius > 0.0)) throw Error("invalid-parameter", "arc radius must be positive");
        if (theta0 == theta1) throw Error("invalid-parameter", "arc has zero sweep");
        if (std::abs(theta1 - theta0) > 2.0 * M_PI + 1e-12)
            throw Error("invalid-parameter", "arc sweep exceeds a full turn");
    }
}

// ---------------------------------------------------------------------------
// DomainSpec
// ---------------------------------------------------------------------------

namespace {
const PlaneChart kPlane;
}

const SurfaceChart& DomainSpec::chart_or_plane() const {
    return chart ? *chart : kPlane;
}

Vec2 DomainSpec::corner_point(int k) const {
    return outer[static_cast<size_t>(corners[static_cast<size_t>(k)])].start();
}

int DomainSpec::gamma_of_segment(int seg) const {
    // gamma_k covers the half-open segment range [corners[k-1], corners[k]) in
    // cyclic order around the outer chain.
    int n = static_cast<int>(outer.size());
    for (int k = 0; k < 4; ++k) {
        int b = corners[static_cast<size_t>(k)];
        int e = corners[static_cast<size_t>((k + 1) % 4)];
        int span = (e - b + n) % n;
        if (span == 0) span = n;  // single corner listed first
        int off = (seg - b + n) % n;
        if (off < span) return k + 1;
    }
    throw Error("invalid-parameter", "segment not covered by any gamma arc");
}

void DomainSpec::validate() const {
    if (outer.empty()) throw Error("invalid-parameter", "outer chain is empty");
    int n = static_cast<int>(outer.size());
    for (int i = 0; i < n; ++i) {
        outer[static_cast<size_t>(i)].validate();
        Vec2 e = outer[static_cast<size_t>(i)].end();
        Vec2 s = outer[static_cast<size_t>((i + 1) % n)].start();
        if (dist(e, s) > 1e-9 * (1.0 + e.norm()))
            throw Error("invalid-parameter", "outer chain is not closed");
    }
    for (int k = 0; k < 4; ++k) {
        int c = corners[static_cast<size_t>(k)];
        if (c < 0 || c >= n) throw Error("invalid-parameter", "corner index out of range");
        int cn = corners[static_cast<size_t>((k + 1) % 4)];
        if (c == cn) throw Error("invalid-parameter", "corner indices must be distinct");
    }
    // Corners must appear in increasing cyclic order starting at corners[0].
    for (int k = 1; k < 4; ++k) {
        int a = (corners[static_cast<size_t>(k)] - corners[0] + n) % n;
        int b = (corners[static_cast<size_t>((k - 1) % 4)] - corners[0] + n) % n;
        if (k > 1 && a <= b)
            throw Error("invalid-parameter", "corner indices not in positive cyclic order");
    }
    for (const auto& chain : holes) {
        if (chain.empty()) throw Error("invalid-parameter", "hole chain is empty");
        int m = static_cast<int>(chain.size());
        for (int i = 0; i < m; ++i) {
            chain[static_cast<size_t>(i)].validate();
            Vec2 e = chain[static_cast<size_t>(i)].end();
            Vec2 s = chain[static_cast<size_t>((i + 1) % m)].start();
            if (dist(e, s) > 1e-9 * (1.0 + e.norm()))
                throw Error("invalid-parameter", "hole chain is not closed");
        }
    }
    for (const auto& sl : slits) {
        if (sl.size() < 2) throw Error("invalid-parameter", "slit needs at least 2 points");
        if (dist(sl.front(), sl.back()) == 0.0)
            throw Error("invalid-parameter", "slit endpoints must be distinct");
    }
}

// ---------------------------------------------------------------------------
// Random slits
// ---------------------------------------------------------------------------

std::vector<std::vector<Vec2>> generate_random_slits(int count, std::uint64_t seed,
                                                     Vec2 box_min, Vec2 box_max,
                                                     double len_min, double len_max) {
    std::mt19937_64 rng(seed);
    auto unif = [&rng]() { return unit_double(rng()); };
    std::vector<std::vector<Vec2>> slits;
    const double clearance =
        0.04 * std::max(box_max.x - box_min.x, box_max.y - box_min.y);

    auto seg_point_dist = [](Vec2 a, Vec2 b, Vec2 p) {
        Vec2 d = b - a;
        double l2 = d.dot(d);
        double t = l2 > 0 ? std::clamp((p - a).dot(d) / l2, 0.0, 1.0) : 0.0;
        return dist(a + t * d, p);
    };
    auto seg_seg_dist = [&](Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
        double m = seg_point_dist(a, b, c);
        m = std::min(m, seg_point_dist(a, b, d));
        m = std::min(m, seg_point_dist(c, d, a));
        m = std::min(m, seg_point_dist(c, d, b));
        return m;
    };

    int attempts = 0;
    while (static_cast<int>(slits.size()) < count) {
        if (++attempts > 100000)
            throw Error("invalid-parameter", "random slit placement did not converge");
        double cx = box_min.x + unif() * (box_max.x - box_min.x);
        double cy = box_min.y + unif() * (box_max.y - box_min.y);
        double len = len_min + unif() * (len_max - len_min);
        double ang = unif() * M_PI;
        Vec2 half{0.5 * len * std::cos(ang), 0.5 * len * std::sin(ang)};
        Vec2 p0 = Vec2{cx, cy} - half, p1 = Vec2{cx, cy} + half;
        auto inside = [&](const Vec2& p) {
            return p.x > box_min.x && p.x < box_max.x && p.y > box_min.y && p.y < box_max.y;
        };
        if (!inside(p0) || !inside(p1)) continue;
        bool clear = true;
        for (const auto& s : slits)
            if (seg_seg_dist(p0, p1, s.front(), s.back()) < clearance) { clear = false; break; }
        if (!clear) continue;
        slits.push_back({p0, p1});
    }
    return slits;
}

// ---------------------------------------------------------------------------
// JSON configuration
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

Vec2 read_vec2(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw Error("config-error", "expected a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

CurveSegment read_segment(const json& j) {
    std::string kind = j.value("kind", "polyline");
    if (kind == "polyline") {
        std::vector<Vec2> pts;
        for (const auto& p : j.at("points")) pts.push_back(read_vec2(p));
        return CurveSegment::polyline(std::move(pts));
    }
    if (kind == "arc") {
        return CurveSegment::arc(read_vec2(j.at("center")), j.at("radius").get<double>(),
                                 j.at("theta0").get<double>(), j.at("theta1").get<double>());
    }
    throw Error("config-error", "unknown segment kind '" + kind + "'");
}

std::shared_ptr<const SurfaceChart> read_chart(const json& j, const DomainSpec& spec) {
    std::string type = j.value("type", "plane");
    if (type == "plane") return make_plane_chart();
    if (type == "torus")
        return make_torus_chart(j.at("r").get<double>(), j.at("R").get<double>());
    if (type == "hemisphere") {
        // Rectangle inferred from the outer boundary's bounding box.
        double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
        auto absorb = [&](const Vec2& p) {
            x0 = std::min(x0, p.x); y0 = std::min(y0, p.y);
            x1 = std::max(x1, p.x); y1 = std::max(y1, p.y);
        };
        for (const auto& seg : spec.outer) {
            if (seg.kind == SegmentKind::Polyline) {
                for (const auto& p : seg.points) absorb(p);
            } else {
                absorb(seg.start());
                absorb(seg.end());
            }
        }
        return make_hemisphere_chart({x0, y0}, {x1, y1});
    }
    throw Error("config-error", "unknown chart type '" + type + "'");
}

}  // namespace

DomainSpec parse_domain_spec(const std::string& json_text, long seed_override) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw Error("config-error", std::string("domain config is not valid JSON: ") + e.what());
    }
    DomainSpec spec;
    try {
        for (const auto& s : j.at("outer")) spec.outer.push_back(read_segment(s));
        auto c = j.at("corners");
        if (!c.is_array() || c.size() != 4)
            throw Error("config-error", "corners must list 4 segment indices");
        for (int k = 0; k < 4; ++k) spec.corners[static_cast<size_t>(k)] = c[static_cast<size_t>(k)].get<int>();
        if (j.contains("holes"))
            for (const auto& chain : j["holes"]) {
                std::vector<CurveSegment> segs;
                for (const auto& s : chain) segs.push_back(read_segment(s));
                spec.holes.push_back(std::move(segs));
            }
        if (j.contains("slits"))
            for (const auto& sl : j["slits"]) {
                std::vector<Vec2> pts;
                for (const auto& p : sl) pts.push_back(read_vec2(p));
                spec.slits.push_back(std::move(pts));
            }
        if (j.contains("random_slits")) {
            const auto& r = j["random_slits"];
            std::uint64_t seed = r.at("seed").get<std::uint64_t>();
            if (seed_override >= 0) seed = static_cast<std::uint64_t>(seed_override);
            auto box = r.at("box");
            auto len = r.at("length");
            auto extra = generate_random_slits(
                r.at("count").get<int>(), seed,
                {box[0].get<double>(), box[2].get<double>()},
                {box[1].get<double>(), box[3].get<double>()},
                len[0].get<double>(), len[1].get<double>());
            for (auto& s : extra) spec.slits.push_back(std::move(s));
        }
        if (j.contains("singular_points"))
            for (const auto& p : j["singular_points"])
                spec.extra_singular_points.push_back(read_vec2(p));
        spec.chart = j.contains("chart") ? read_chart(j["chart"], spec) : make_plane_chart();
    } catch (const json::exception& e) {
        throw Error("config-error", std::string("domain config: ") + e.what());
    }
    spec.validate();
    return spec;
}

DomainSpec load_domain_spec(const std::string& path, long seed_override) {
    std::ifstream in(path);
    if (!in) throw Error("config-error", "cannot open domain config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_domain_spec(ss.str(), seed_override);
}

}  // namespace cfm
