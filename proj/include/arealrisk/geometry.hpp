#ifndef AREALRISK_GEOMETRY_HPP
#define AREALRISK_GEOMETRY_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace arealrisk {

// All geometry is planar; inputs are assumed pre-projected to a common
// coordinate system with consistent linear units.

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct BoundingBox {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;

    void expand(double eps) {
        min_x -= eps;
        min_y -= eps;
        max_x += eps;
        max_y += eps;
    }
    bool intersects(const BoundingBox& o) const {
        return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
    }
};

// Closed ring: first vertex equals last, at least 4 stored vertices.
using Ring = std::vector<Point>;

struct Polygon {
    Ring exterior;
    std::vector<Ring> holes;

    // Throws InputError when a ring is open, degenerate, or too short.
    void validate() const;

    BoundingBox bbox() const;

    // Even-odd rule over all rings, so holes subtract automatically.
    bool contains(const Point& p) const;
};

// One areal unit; counties may be multipart (islands), hence several parts.
struct AreaShape {
    std::string label;
    std::vector<Polygon> parts;

    BoundingBox bbox() const;
    bool contains(const Point& p) const;
};

double segment_point_distance_sq(const Point& a, const Point& b, const Point& p);
double segment_segment_distance(const Point& a, const Point& b, const Point& c, const Point& d);

// Minimum distance between the boundaries (all ring segments) of two shapes.
double boundary_distance(const AreaShape& a, const AreaShape& b);

// GeoJSON FeatureCollection with Polygon/MultiPolygon geometries. The unit
// label is read from properties[id_property] (or the feature "id" member as a
// fallback).
std::vector<AreaShape> load_geojson(const std::filesystem::path& path,
                                    const std::string& id_property = "GEOID");

// Copies a GeoJSON file, adding the given numeric properties per unit label.
// Features whose label has no entry are passed through untouched.
void augment_geojson(const std::filesystem::path& in_path, const std::filesystem::path& out_path,
                     const std::string& id_property,
                     const std::map<std::string, std::map<std::string, double>>& extra_properties);

}  // namespace arealrisk

#endif
