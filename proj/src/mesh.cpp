#include "cfm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "cfm/jsonio.hpp"

namespace cfm {

double ArcGeom::segment_area() const {
    // Shoelace contribution of the arc minus that of its chord.
    Vec2 p0 = point(0.0), p1 = point(1.0);
    double sweep = theta1 - theta0;
    double arc_part = 0.5 * (radius * radius * sweep +
                             radius * (center.x * (std::sin(theta1) - std::sin(theta0)) -
                                       center.y * (std::cos(theta1) - std::cos(theta0))));
    double chord_part = 0.5 * p0.cross(p1);
    return arc_part - chord_part;
}

std::string tag_to_string(const BoundaryTag& tag) {
    switch (tag.kind) {
        case BoundaryTag::Kind::Gamma: return "gamma:" + std::to_string(tag.id);
        case BoundaryTag::Kind::Hole: return "hole:" + std::to_string(tag.id);
        case BoundaryTag::Kind::Cut:
            return "cut:" + std::to_string(tag.id) + (tag.side == 0 ? ":A" : ":B");
    }
    throw Error("internal", "unknown tag kind");
}

BoundaryTag tag_from_string(const std::string& s) {
    BoundaryTag tag;
    if (s.rfind("gamma:", 0) == 0) {
        tag.kind = BoundaryTag::Kind::Gamma;
        tag.id = std::stoi(s.substr(6));
        return tag;
    }
    if (s.rfind("hole:", 0) == 0) {
        tag.kind = BoundaryTag::Kind::Hole;
        tag.id = std::stoi(s.substr(5));
        return tag;
    }
    if (s.rfind("cut:", 0) == 0) {
        tag.kind = BoundaryTag::Kind::Cut;
        size_t second = s.find(':', 4);
        tag.id = std::stoi(s.substr(4, second - 4));
        tag.side = s.substr(second + 1) == "A" ? 0 : 1;
        return tag;
    }
    throw Error("mesh-format", "unknown boundary tag '" + s + "'");
}

double Mesh::element_area(int t) const {
    const auto& el = elements[static_cast<size_t>(t)];
    const Vec2& a = nodes[static_cast<size_t>(el[0])];
    const Vec2& b = nodes[static_cast<size_t>(el[1])];
    const Vec2& c = nodes[static_cast<size_t>(el[2])];
    return 0.5 * (b - a).cross(c - a);
}

double Mesh::domain_area() const {
    double area = 0;
    for (int t = 0; t < element_count(); ++t) area += element_area(t);
    for (const auto& be : boundary)
        if (be.arc) area += be.arc->segment_area();
    return area;
}

EdgeTable build_edge_table(const Mesh& mesh) {
    EdgeTable et;
    std::map<std::pair<int, int>, int> index;
    et.element_edges.resize(mesh.elements.size());
    for (int t = 0; t < mesh.element_count(); ++t) {
        const auto& el = mesh.elements[static_cast<size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            int a = el[static_cast<size_t>((k + 1) % 3)];
            int b = el[static_cast<size_t>((k + 2) % 3)];
            std::pair<int, int> key{std::min(a, b), std::max(a, b)};
            auto it = index.find(key);
            int e;
            if (it == index.end()) {
                e = static_cast<int>(et.edges.size());
                index.emplace(key, e);
                et.edges.push_back({key.first, key.second});
                et.edge_elements.push_back({t, -1});
            } else {
                e = it->second;
                if (et.edge_elements[static_cast<size_t>(e)][1] != -1)
                    throw Error("mesh-invalid", "edge shared by more than two elements");
                et.edge_elements[static_cast<size_t>(e)][1] = t;
            }
            et.element_edges[static_cast<size_t>(t)][static_cast<size_t>(k)] = e;
        }
    }
    return et;
}

int EdgeTable::find(int a, int b) const {
    for (int e = 0; e < static_cast<int>(edges.size()); ++e)
        if ((edges[static_cast<size_t>(e)][0] == std::min(a, b)) &&
            (edges[static_cast<size_t>(e)][1] == std::max(a, b)))
            return e;
    return -1;
}

void Mesh::validate() const {
    for (int t = 0; t < element_count(); ++t) {
        const auto& el = elements[static_cast<size_t>(t)];
        for (int k = 0; k < 3; ++k)
            if (el[static_cast<size_t>(k)] < 0 || el[static_cast<size_t>(k)] >= node_count())
                throw Error("mesh-invalid", "element references a missing node");
        if (!(element_area(t) > 0))
            throw Error("mesh-invalid", "element " + std::to_string(t) +
                                            " is not positively oriented");
    }
    EdgeTable et = build_edge_table(*this);
    std::map<std::pair<int, int>, int> boundary_count;
    for (const auto& be : boundary) {
        std::pair<int, int> key{std::min(be.nodes[0], be.nodes[1]),
                                std::max(be.nodes[0], be.nodes[1])};
        boundary_count[key]++;
    }
    for (size_t e = 0; e < et.edges.size(); ++e) {
        std::pair<int, int> key{et.edges[e][0], et.edges[e][1]};
        int adj = et.edge_elements[e][1] == -1 ? 1 : 2;
        auto it = boundary_count.find(key);
        int tags = it == boundary_count.end() ? 0 : it->second;
        if (adj == 2 && tags != 0)
            throw Error("mesh-invalid", "interior edge carries a boundary tag");
        if (adj == 1 && tags != 1)
            throw Error("mesh-invalid", "boundary edge must carry exactly one tag");
    }
    for (const auto& pair : cut_pairs) {
        for (int s = 0; s < 2; ++s)
            if (pair[static_cast<size_t>(s)] < 0 ||
                pair[static_cast<size_t>(s)] >= static_cast<int>(boundary.size()))
                throw Error("mesh-invalid", "cut pair references a missing boundary edge");
        const auto& ea = boundary[static_cast<size_t>(pair[0])];
        const auto& eb = boundary[static_cast<size_t>(pair[1])];
        if (ea.tag.kind != BoundaryTag::Kind::Cut || eb.tag.kind != BoundaryTag::Kind::Cut)
            throw Error("mesh-invalid", "cut pair must reference cut edges");
        if (ea.tag.id != eb.tag.id) throw Error("mesh-invalid", "cut pair spans two cuts");
        // Twins coincide geometrically.
        auto close = [&](int na, int nb) {
            return dist(nodes[static_cast<size_t>(na)], nodes[static_cast<size_t>(nb)]) == 0.0;
        };
        if (!((close(ea.nodes[0], eb.nodes[1]) && close(ea.nodes[1], eb.nodes[0]))))
            throw Error("mesh-invalid", "cut twins do not coincide");
    }
}

// ---------------------------------------------------------------------------
// Euler defect arithmetic
// ---------------------------------------------------------------------------

EulerReport euler_defect_check(const std::vector<int>& valences,
                               const std::vector<int>& face_sizes, int genus) {
    long long val_sum = 0, face_sum = 0;
    for (int v : valences) val_sum += v;
    for (int f : face_sizes) face_sum += f;
    if (val_sum != face_sum)
        throw Error("malformed-input",
                    "handshake failed: sum of valences " + std::to_string(val_sum) +
                        " != sum of face sizes " + std::to_string(face_sum));
    if (val_sum % 2 != 0)
        throw Error("malformed-input", "handshake sum must be even (2E)");
    EulerReport r;
    for (int v : valences) r.lhs += 4 - v;
    for (int f : face_sizes) r.lhs -= f - 4;
    r.rhs = 4LL * (2 - 2 * genus);
    r.valid = r.lhs == r.rhs;
    return r;
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

std::string mesh_to_json(const Mesh& mesh) {
    JsonWriter w;
    w.begin_object();
    w.key("nodes").begin_array();
    for (const auto& n : mesh.nodes) w.begin_array().value(n.x).value(n.y).end_array();
    w.end_array();
    w.key("elements").begin_array();
    for (const auto& el : mesh.elements)
        w.begin_array().value(el[0]).value(el[1]).value(el[2]).end_array();
    w.end_array();
    w.key("boundary").begin_array();
    for (const auto& be : mesh.boundary) {
        w.begin_object();
        w.key("nodes").begin_array().value(be.nodes[0]).value(be.nodes[1]).end_array();
        w.key("tag").value(tag_to_string(be.tag));
        if (be.arc) {
            w.key("arc").begin_object();
            w.key("center").begin_array().value(be.arc->center.x).value(be.arc->center.y).end_array();
            w.key("radius").value(be.arc->radius);
            w.key("theta0").value(be.arc->theta0);
            w.key("theta1").value(be.arc->theta1);
            w.end_object();
        }
        w.end_object();
    }
    w.end_array();
    w.key("cut_pairs").begin_array();
    for (const auto& p : mesh.cut_pairs) w.begin_array().value(p[0]).value(p[1]).end_array();
    w.end_array();
    w.key("corner_nodes").begin_array();
    for (int c : mesh.corner_nodes) w.value(c);
    w.end_array();
    w.key("singular_nodes").begin_array();
    for (int s : mesh.singular_nodes) w.value(s);
    w.end_array();
    w.key("num_holes").value(mesh.num_holes);
    w.end_object();
    return w.str();
}

Mesh mesh_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw Error("mesh-format", std::string("mesh file is not valid JSON: ") + e.what());
    }
    Mesh mesh;
    try {
        for (const auto& n : j.at("nodes"))
            mesh.nodes.push_back({n[0].get<double>(), n[1].get<double>()});
        for (const auto& el : j.at("elements"))
            mesh.elements.push_back({el[0].get<int>(), el[1].get<int>(), el[2].get<int>()});
        for (const auto& be : j.at("boundary")) {
            BoundaryEdge b;
            b.nodes = {be.at("nodes")[0].get<int>(), be.at("nodes")[1].get<int>()};
            b.tag = tag_from_string(be.at("tag").get<std::string>());
            if (be.contains("arc")) {
                ArcGeom g;
                g.center = {be["arc"]["center"][0].get<double>(), be["arc"]["center"][1].get<double>()};
                g.radius = be["arc"]["radius"].get<double>();
                g.theta0 = be["arc"]["theta0"].get<double>();
                g.theta1 = be["arc"]["theta1"].get<double>();
                b.arc = g;
            }
            mesh.boundary.push_back(b);
        }
        for (const auto& p : j.at("cut_pairs"))
            mesh.cut_pairs.push_back({p[0].get<int>(), p[1].get<int>()});
        auto corners = j.at("corner_nodes");
        for (int k = 0; k < 4; ++k) mesh.corner_nodes[static_cast<size_t>(k)] = corners[static_cast<size_t>(k)].get<int>();
        for (const auto& s : j.at("singular_nodes")) mesh.singular_nodes.push_back(s.get<int>());
        mesh.num_holes = j.at("num_holes").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("mesh-format", std::string("mesh file: ") + e.what());
    }
    mesh.validate();
    return mesh;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    write_text_file(path, mesh_to_json(mesh));
}

Mesh load_mesh(const std::string& path) { return mesh_from_json(read_text_file(path)); }

}  // namespace cfm
