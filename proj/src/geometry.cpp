#include "arealrisk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "arealrisk/csv.hpp"
#include "arealrisk/errors.hpp"

namespace arealrisk {

void Polygon::validate() const {
    auto check_ring = [](const Ring& ring, const char* what) {
        if (ring.size() < 4)
            throw InputError(std::string("degenerate polygon: ") + what + " has fewer than 3 distinct vertices");
        if (ring.front().x != ring.back().x || ring.front().y != ring.back().y)
            throw InputError(std::string("degenerate polygon: ") + what + " is not closed");
    };
    check_ring(exterior, "exterior ring");
    for (const auto& h : holes) check_ring(h, "hole ring");
}

BoundingBox Polygon::bbox() const {
    BoundingBox b{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
                  std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    for (const auto& p : exterior) {
        b.min_x = std::min(b.min_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_x = std::max(b.max_x, p.x);
        b.max_y = std::max(b.max_y, p.y);
    }
    return b;
}

namespace {

// Adds the crossing parity of one ring at point p.
bool ring_crossings_odd(const Ring& ring, const Point& p) {
    bool odd = false;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        const Point& a = ring[i];
        const Point& b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x_at = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x_at) odd = !odd;
        }
    }
    return odd;
}

}  // namespace

bool Polygon::contains(const Point& p) const {
    bool odd = ring_crossings_odd(exterior, p);
    for (const auto& h : holes)
        if (ring_crossings_odd(h, p)) odd = !odd;
    return odd;
}

BoundingBox AreaShape::bbox() const {
    BoundingBox b{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
                  std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    for (const auto& part : parts) {
        BoundingBox pb = part.bbox();
        b.min_x = std::min(b.min_x, pb.min_x);
        b.min_y = std::min(b.min_y, pb.min_y);
        b.max_x = std::max(b.max_x, pb.max_x);
        b.max_y = std::max(b.max_y, pb.max_y);
    }
    return b;
}

bool AreaShape::contains(const Point& p) const {
    for (const auto& part : parts)
        if (part.contains(p)) return true;
    return false;
}

double segment_point_distance_sq(const Point& a, const Point& b, const Point& p) {
    double dx = b.x - a.x, dy = b.y - a.y;
    double len_sq = dx * dx + dy * dy;
    double t = 0.0;
    if (len_sq > 0.0) {
        t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq;
        t = std::clamp(t, 0.0, 1.0);
    }
    double px = a.x + t * dx - p.x;
    double py = a.y + t * dy - p.y;
    return px * px + py * py;
}

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
    double d1 = cross(c, d, a);
    double d2 = cross(c, d, b);
    double d3 = cross(a, b, c);
    double d4 = cross(a, b, d);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

double segment_segment_distance(const Point& a, const Point& b, const Point& c, const Point& d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    double m = segment_point_distance_sq(a, b, c);
    m = std::min(m, segment_point_distance_sq(a, b, d));
    m = std::min(m, segment_point_distance_sq(c, d, a));
    m = std::min(m, segment_point_distance_sq(c, d, b));
    return std::sqrt(m);
}

namespace {

void collect_segments(const AreaShape& s, std::vector<std::pair<Point, Point>>& out) {
    auto add_ring = [&out](const Ring& ring) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) out.emplace_back(ring[i], ring[i + 1]);
    };
    for (const auto& part : s.parts) {
        add_ring(part.exterior);
        for (const auto& h : part.holes) add_ring(h);
    }
}

}  // namespace

double boundary_distance(const AreaShape& a, const AreaShape& b) {
    std::vector<std::pair<Point, Point>> sa, sb;
    collect_segments(a, sa);
    collect_segments(b, sb);
    double best = std::numeric_limits<double>::max();
    for (const auto& [p1, p2] : sa)
        for (const auto& [q1, q2] : sb) {
            best = std::min(best, segment_segment_distance(p1, p2, q1, q2));
            if (best == 0.0) return 0.0;
        }
    return best;
}

namespace {

using nlohmann::json;

Ring parse_ring(const json& coords) {
    Ring ring;
    for (const auto& pt : coords) {
        if (!pt.is_array() || pt.size() < 2) throw InputError("GeoJSON ring vertex is not an [x, y] pair");
        ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    return ring;
}

Polygon parse_polygon(const json& rings) {
    if (rings.empty()) throw InputError("GeoJSON Polygon with no rings");
    Polygon poly;
    poly.exterior = parse_ring(rings[0]);
    for (std::size_t i = 1; i < rings.size(); ++i) poly.holes.push_back(parse_ring(rings[i]));
    poly.validate();
    return poly;
}

std::string label_from_feature(const json& feature, const std::string& id_property) {
    if (feature.contains("properties") && feature["properties"].is_object()) {
        const auto& props = feature["properties"];
        if (props.contains(id_property)) {
            const auto& v = props[id_property];
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_integer()) return std::to_string(v.get<long long>());
            if (v.is_number()) return format_double(v.get<double>());
        }
    }
    if (feature.contains("id")) {
        const auto& v = feature["id"];
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
    }
    throw InputError("GeoJSON feature has no '" + id_property + "' property and no id");
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

}  // namespace

std::vector<AreaShape> load_geojson(const std::filesystem::path& path, const std::string& id_property) {
    json j = load_json_file(path);
    if (!j.contains("features") || !j["features"].is_array())
        throw InputError("not a GeoJSON FeatureCollection: " + path.string());

    std::vector<AreaShape> shapes;
    for (const auto& feature : j["features"]) {
        AreaShape shape;
        shape.label = label_from_feature(feature, id_property);
        const auto& geom = feature.at("geometry");
        std::string type = geom.at("type").get<std::string>();
        if (type == "Polygon") {
            shape.parts.push_back(parse_polygon(geom.at("coordinates")));
        } else if (type == "MultiPolygon") {
            for (const auto& rings : geom.at("coordinates")) shape.parts.push_back(parse_polygon(rings));
        } else {
            throw InputError("unsupported geometry type '" + type + "' for unit " + shape.label);
        }
        shapes.push_back(std::move(shape));
    }
    if (shapes.empty()) throw InputError("GeoJSON has no features: " + path.string());
    return shapes;
}

void augment_geojson(const std::filesystem::path& in_path, const std::filesystem::path& out_path,
                     const std::string& id_property,
                     const std::map<std::string, std::map<std::string, double>>& extra_properties) {
    using ordered = nlohmann::ordered_json;
    std::ifstream in(in_path);
    if (!in) throw InputError("cannot open file: " + in_path.string());
    ordered j;
    try {
        in >> j;
    } catch (const ordered::parse_error& e) {
        throw InputError("invalid JSON in " + in_path.string() + ": " + e.what());
    }
    for (auto& feature : j.at("features")) {
        std::string label;
        try {
            label = label_from_feature(json(feature), id_property);
        } catch (const InputError&) {
            continue;
        }
        auto it = extra_properties.find(label);
        if (it == extra_properties.end()) continue;
        for (const auto& [key, value] : it->second) feature["properties"][key] = value;
    }
    write_text_atomic(out_path, j.dump(2) + "\n");
}

}  // namespace arealrisk
