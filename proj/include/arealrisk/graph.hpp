#ifndef AREALRISK_GRAPH_HPP
#define AREALRISK_GRAPH_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "arealrisk/geometry.hpp"

namespace arealrisk {

// Symmetric areal adjacency with no self-loops; every unit must end up with
// at least one neighbor (isolated units are a hard error, since downstream
// smoothing has nothing to borrow from).
struct NeighborGraph {
    std::vector<std::string> unit_labels;
    std::vector<std::vector<int>> neighbors;  // sorted adjacency lists

    long n_units() const { return static_cast<long>(unit_labels.size()); }
    long n_edges() const;  // undirected edge count
    double average_degree() const;
    void validate() const;
};

enum class WeightScheme { binary, row_standardized };

struct WeightMatrix {
    WeightScheme scheme = WeightScheme::binary;
    std::vector<std::string> unit_labels;
    // Sparse rows: (neighbor index, weight) pairs, sorted by index.
    std::vector<std::vector<std::pair<int, double>>> rows;
    double s0 = 0.0;  // sum of all weights

    long n_units() const { return static_cast<long>(rows.size()); }
    Eigen::MatrixXd dense() const;
};

NeighborGraph graph_from_edge_list(const std::vector<std::string>& units,
                                   const std::vector<std::pair<std::string, std::string>>& edges);

// Queen contiguity: two units are neighbors when their boundaries come within
// snap_tolerance of each other (shared edges and shared corners both count).
NeighborGraph queen_from_polygons(const std::vector<AreaShape>& shapes,
                                  double snap_tolerance = 1e-9);

WeightMatrix weights(const NeighborGraph& graph, WeightScheme scheme);

// Edge-list CSV: fips_a, fips_b. Unit universe is every label seen.
NeighborGraph load_graph_csv(const std::filesystem::path& path);
void write_graph_csv(const std::filesystem::path& path, const NeighborGraph& graph);

WeightScheme parse_weight_scheme(const std::string& name);

}  // namespace arealrisk

#endif
