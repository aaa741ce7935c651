#include "arealrisk/graph.hpp"

#include <algorithm>
#include <map>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "arealrisk/csv.hpp"
#include "arealrisk/errors.hpp"

namespace arealrisk {

long NeighborGraph::n_edges() const {
    long deg_sum = 0;
    for (const auto& adj : neighbors) deg_sum += static_cast<long>(adj.size());
    return deg_sum / 2;
}

double NeighborGraph::average_degree() const {
    if (unit_labels.empty()) return 0.0;
    return 2.0 * static_cast<double>(n_edges()) / static_cast<double>(n_units());
}

void NeighborGraph::validate() const {
    if (unit_labels.size() != neighbors.size())
        throw InputError("graph labels and adjacency size disagree");
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        if (neighbors[i].empty())
            throw InputError("isolated unit with no neighbors: " + unit_labels[i]);
        for (int j : neighbors[i]) {
            if (j < 0 || j >= static_cast<int>(neighbors.size()))
                throw InputError("adjacency index out of range");
            if (j == static_cast<int>(i)) throw InputError("self-loop at unit " + unit_labels[i]);
            if (!std::binary_search(neighbors[j].begin(), neighbors[j].end(), static_cast<int>(i)))
                throw InputError("asymmetric adjacency between " + unit_labels[i] + " and " +
                                 unit_labels[j]);
        }
    }
}

namespace {

NeighborGraph finish_graph(std::vector<std::string> labels, std::vector<std::set<int>>& adj) {
    NeighborGraph g;
    g.unit_labels = std::move(labels);
    g.neighbors.resize(adj.size());
    for (std::size_t i = 0; i < adj.size(); ++i) {
        if (adj[i].empty())
            throw InputError("isolated unit with no neighbors: " + g.unit_labels[i]);
        g.neighbors[i].assign(adj[i].begin(), adj[i].end());
    }
    return g;
}

}  // namespace

NeighborGraph graph_from_edge_list(const std::vector<std::string>& units,
                                   const std::vector<std::pair<std::string, std::string>>& edges) {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (!index.emplace(units[i], static_cast<int>(i)).second)
            throw InputError("duplicate unit label: " + units[i]);
    }
    std::vector<std::set<int>> adj(units.size());
    for (const auto& [a, b] : edges) {
        auto ia = index.find(a);
        auto ib = index.find(b);
        if (ia == index.end()) throw InputError("edge references unknown unit: " + a);
        if (ib == index.end()) throw InputError("edge references unknown unit: " + b);
        if (ia->second == ib->second) throw InputError("self-loop edge at unit " + a);
        adj[ia->second].insert(ib->second);
        adj[ib->second].insert(ia->second);
    }
    return finish_graph(units, adj);
}

NeighborGraph queen_from_polygons(const std::vector<AreaShape>& shapes, double snap_tolerance) {
    const int n = static_cast<int>(shapes.size());
    if (n < 2) throw InputError("need at least two polygons to build contiguity");
    for (const auto& s : shapes)
        for (const auto& part : s.parts) part.validate();

    std::vector<BoundingBox> boxes(n);
    for (int i = 0; i < n; ++i) {
        boxes[i] = shapes[i].bbox();
        boxes[i].expand(snap_tolerance);
    }

    // All-pairs boundary test with a bounding-box prefilter. Pair decisions
    // are independent, so the loop parallelizes without affecting results.
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (boxes[i].intersects(boxes[j])) pairs.emplace_back(i, j);

    std::vector<char> touching(pairs.size(), 0);
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < static_cast<long>(pairs.size()); ++k) {
        auto [i, j] = pairs[k];
        touching[k] = boundary_distance(shapes[i], shapes[j]) <= snap_tolerance ? 1 : 0;
    }

    std::vector<std::set<int>> adj(n);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (!touching[k]) continue;
        adj[pairs[k].first].insert(pairs[k].second);
        adj[pairs[k].second].insert(pairs[k].first);
    }
    std::vector<std::string> labels;
    for (const auto& s : shapes) labels.push_back(s.label);
    return finish_graph(std::move(labels), adj);
}

WeightMatrix weights(const NeighborGraph& graph, WeightScheme scheme) {
    graph.validate();
    WeightMatrix w;
    w.scheme = scheme;
    w.unit_labels = graph.unit_labels;
    w.rows.resize(graph.neighbors.size());
    double s0 = 0.0;
    for (std::size_t i = 0; i < graph.neighbors.size(); ++i) {
        const double value = scheme == WeightScheme::binary
                                 ? 1.0
                                 : 1.0 / static_cast<double>(graph.neighbors[i].size());
        for (int j : graph.neighbors[i]) {
            w.rows[i].emplace_back(j, value);
            s0 += value;
        }
    }
    w.s0 = s0;
    return w;
}

Eigen::MatrixXd WeightMatrix::dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_units(), n_units());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& [j, v] : rows[i]) m(static_cast<long>(i), j) = v;
    return m;
}

NeighborGraph load_graph_csv(const std::filesystem::path& path) {
    CsvTable t = read_csv(path);
    std::size_t a = t.column("fips_a"), b = t.column("fips_b");
    std::vector<std::string> units;
    std::set<std::string> seen;
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& r : t.rows) {
        for (const auto& u : {r[a], r[b]})
            if (seen.insert(u).second) units.push_back(u);
        edges.emplace_back(r[a], r[b]);
    }
    return graph_from_edge_list(units, edges);
}

void write_graph_csv(const std::filesystem::path& path, const NeighborGraph& graph) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < graph.neighbors.size(); ++i)
        for (int j : graph.neighbors[i])
            if (static_cast<int>(i) < j)
                rows.push_back({graph.unit_labels[i], graph.unit_labels[j]});
    write_csv(path, {"fips_a", "fips_b"}, rows);
}

WeightScheme parse_weight_scheme(const std::string& name) {
    if (name == "binary") return WeightScheme::binary;
    if (name == "row" || name == "row_standardized") return WeightScheme::row_standardized;
    throw InputError("unknown weight scheme '" + name + "' (expected binary or row_standardized)");
}

}  // namespace arealrisk
