#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace quivlap {

struct Edge {
    std::string id;
    int src = 0;
    int tgt = 0;
};

// Finite directed multigraph; self-loops and parallel edges are allowed.
class Quiver {
public:
    Quiver() = default;
    Quiver(int n_vertices, std::vector<Edge> edges);

    int n_vertices() const { return n_; }
    int n_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }

    std::optional<int> find_edge(std::string_view id) const;
    int edge_index(std::string_view id) const;

    bool is_loop(int e) const { return edge(e).src == edge(e).tgt; }
    std::vector<int> incident_edges(int v) const;
    std::vector<int> out_edges(int v) const;
    std::vector<int> in_edges(int v) const;
    // Connectivity of the underlying undirected graph.
    bool connected() const;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, int> index_;
};

// Named subsets of {0, ..., n_items-1}; items within a set are kept sorted.
struct Cover {
    int n_items = 0;
    std::vector<std::string> names;
    std::vector<std::vector<int>> sets;

    void validate() const;
    int set_index(std::string_view name) const;
};

Cover make_cover(int n_items, std::vector<std::pair<std::string, std::vector<int>>> sets);

struct NerveQuiver {
    Quiver quiver;
    // Sorted set indices of each vertex; vertices ordered lexicographically.
    std::vector<std::vector<int>> members;
    // Items in the intersection of each vertex's sets.
    std::vector<std::vector<int>> supports;
    std::vector<std::string> labels; // set names joined by '+'

    int vertex_of(const std::vector<int>& sets) const;
    int vertex_of_label(std::string_view label) const;
};

// Vertices are sets of at most max_order cover elements with nonempty
// intersection; an edge sigma -> tau exists whenever tau is a proper subset of sigma.
NerveQuiver nerve_quiver(const Cover& cover, int max_order = 2);

Quiver dual_quiver(const Quiver& q);

enum class FloretTag { LD, DL };

struct Floret {
    Quiver quiver;
    int center = 0;                 // vertex of the original quiver
    std::vector<int> petal_edge;    // per floret vertex: original outgoing edge, -1 for the center
    std::vector<int> origin_edge;   // per floret edge: original edge
    std::vector<FloretTag> tags;    // per floret edge
};

// Vertex 0 is the center; each outgoing edge e of u adds a vertex v_e and the
// two edges e_LD, e_DL from the center to v_e, in that order.
Floret floret(const Quiver& q, int u);

struct MergedQuiver {
    Quiver quiver;
    std::vector<int> left_vertices;  // vertex of the merge for each left vertex
    std::vector<int> right_vertices; // vertex of the merge for each right vertex
    std::vector<int> left_edges;
    std::vector<int> right_edges;
};

// Disjoint union modulo the equivalence generated by the pairs (left, right).
// Merged vertices are ordered by their smallest representative, left vertices first;
// edge ids are prefixed with the given side prefixes and must stay unique.
MergedQuiver merge(const Quiver& left, const Quiver& right, const std::vector<std::pair<int, int>>& identify,
                   const std::string& left_prefix = "L.", const std::string& right_prefix = "R.");

} // namespace quivlap
