#include "quivlap/quiver.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "quivlap/errors.hpp"

namespace quivlap {

Quiver::Quiver(int n_vertices, std::vector<Edge> edges) : n_(n_vertices), edges_(std::move(edges)) {
    if (n_ < 0) throw PreconditionViolation("negative vertex count");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.src < 0 || e.src >= n_ || e.tgt < 0 || e.tgt >= n_)
            throw PreconditionViolation("edge '" + e.id + "' has an endpoint out of range");
        if (!index_.emplace(e.id, static_cast<int>(i)).second)
            throw PreconditionViolation("duplicate edge id '" + e.id + "'");
    }
}

std::optional<int> Quiver::find_edge(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int Quiver::edge_index(std::string_view id) const {
    auto e = find_edge(id);
    if (!e) throw PreconditionViolation("unknown edge id '" + std::string(id) + "'");
    return *e;
}

std::vector<int> Quiver::incident_edges(int v) const {
    std::vector<int> out;
    for (int e = 0; e < n_edges(); ++e)
        if (edges_[e].src == v || edges_[e].tgt == v) out.push_back(e);
    return out;
}

std::vector<int> Quiver::out_edges(int v) const {
    std::vector<int> out;
    for (int e = 0; e < n_edges(); ++e)
        if (edges_[e].src == v) out.push_back(e);
    return out;
}

std::vector<int> Quiver::in_edges(int v) const {
    std::vector<int> out;
    for (int e = 0; e < n_edges(); ++e)
        if (edges_[e].tgt == v) out.push_back(e);
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent[b] = a;
    }
};

} // namespace

bool Quiver::connected() const {
    if (n_ <= 1) return true;
    UnionFind uf(n_);
    for (const Edge& e : edges_) uf.unite(e.src, e.tgt);
    for (int v = 1; v < n_; ++v)
        if (uf.find(v) != uf.find(0)) return false;
    return true;
}

// ---- covers ----

void Cover::validate() const {
    if (n_items <= 0) throw PreconditionViolation("cover must have at least one item");
    if (names.size() != sets.size()) throw PreconditionViolation("cover names and sets differ in length");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (!seen.insert(names[i]).second) throw PreconditionViolation("duplicate cover set name '" + names[i] + "'");
        if (sets[i].empty()) throw PreconditionViolation("cover set '" + names[i] + "' is empty");
        for (int x : sets[i])
            if (x < 0 || x >= n_items) throw PreconditionViolation("cover set '" + names[i] + "' has an item out of range");
        if (!std::is_sorted(sets[i].begin(), sets[i].end()) ||
            std::adjacent_find(sets[i].begin(), sets[i].end()) != sets[i].end())
            throw PreconditionViolation("cover set '" + names[i] + "' is not sorted and unique");
    }
}

int Cover::set_index(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw PreconditionViolation("unknown cover set '" + std::string(name) + "'");
}

Cover make_cover(int n_items, std::vector<std::pair<std::string, std::vector<int>>> sets) {
    Cover c;
    c.n_items = n_items;
    for (auto& [name, items] : sets) {
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
        c.names.push_back(name);
        c.sets.push_back(std::move(items));
    }
    c.validate();
    return c;
}

// ---- nerve ----

int NerveQuiver::vertex_of(const std::vector<int>& sets) const {
    for (std::size_t i = 0; i < members.size(); ++i)
        if (members[i] == sets) return static_cast<int>(i);
    return -1;
}

int NerveQuiver::vertex_of_label(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    throw PreconditionViolation("unknown nerve vertex '" + std::string(label) + "'");
}

namespace {

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

void enumerate_simplices(const Cover& cover, int max_order, std::vector<int>& current, const std::vector<int>& support,
                         int next, std::vector<std::pair<std::vector<int>, std::vector<int>>>& out) {
    for (int i = next; i < static_cast<int>(cover.sets.size()); ++i) {
        std::vector<int> sup = current.empty() ? cover.sets[i] : intersect(support, cover.sets[i]);
        if (sup.empty()) continue;
        current.push_back(i);
        out.emplace_back(current, sup);
        if (static_cast<int>(current.size()) < max_order) enumerate_simplices(cover, max_order, current, sup, i + 1, out);
        current.pop_back();
    }
}

} // namespace

NerveQuiver nerve_quiver(const Cover& cover, int max_order) {
    cover.validate();
    if (max_order < 1) throw PreconditionViolation("nerve order must be at least 1");
    std::vector<std::pair<std::vector<int>, std::vector<int>>> simplices;
    std::vector<int> current;
    enumerate_simplices(cover, max_order, current, {}, 0, simplices);
    std::sort(simplices.begin(), simplices.end());

    NerveQuiver nq;
    for (auto& [members, support] : simplices) {
        std::string label;
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i) label += "+";
            label += cover.names[members[i]];
        }
        nq.members.push_back(members);
        nq.supports.push_back(support);
        nq.labels.push_back(std::move(label));
    }
    std::vector<Edge> edges;
    const int n = static_cast<int>(nq.members.size());
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            const auto& a = nq.members[s];
            const auto& b = nq.members[t];
            if (b.size() >= a.size()) continue;
            if (std::includes(a.begin(), a.end(), b.begin(), b.end()))
                edges.push_back({nq.labels[s] + ">" + nq.labels[t], s, t});
        }
    }
    nq.quiver = Quiver(n, std::move(edges));
    return nq;
}

Quiver dual_quiver(const Quiver& q) {
    std::vector<Edge> edges;
    edges.reserve(q.edges().size());
    for (const Edge& e : q.edges()) edges.push_back({e.id, e.tgt, e.src});
    return Quiver(q.n_vertices(), std::move(edges));
}

Floret floret(const Quiver& q, int u) {
    if (u < 0 || u >= q.n_vertices()) throw PreconditionViolation("floret center out of range");
    Floret f;
    f.center = u;
    f.petal_edge.push_back(-1);
    std::vector<Edge> edges;
    for (int e : q.out_edges(u)) {
        int v = static_cast<int>(f.petal_edge.size());
        f.petal_edge.push_back(e);
        edges.push_back({q.edge(e).id + "_LD", 0, v});
        f.origin_edge.push_back(e);
        f.tags.push_back(FloretTag::LD);
        edges.push_back({q.edge(e).id + "_DL", 0, v});
        f.origin_edge.push_back(e);
        f.tags.push_back(FloretTag::DL);
    }
    f.quiver = Quiver(static_cast<int>(f.petal_edge.size()), std::move(edges));
    return f;
}

MergedQuiver merge(const Quiver& left, const Quiver& right, const std::vector<std::pair<int, int>>& identify,
                   const std::string& left_prefix, const std::string& right_prefix) {
    const int nl = left.n_vertices();
    const int nr = right.n_vertices();
    UnionFind uf(nl + nr);
    for (auto [a, b] : identify) {
        if (a < 0 || a >= nl || b < 0 || b >= nr) throw PreconditionViolation("identified vertex out of range");
        uf.unite(a, nl + b);
    }
    std::vector<int> cls(static_cast<std::size_t>(nl + nr), -1);
    std::vector<int> root_to_class(static_cast<std::size_t>(nl + nr), -1);
    int next = 0;
    for (int x = 0; x < nl + nr; ++x) {
        int r = uf.find(x);
        if (root_to_class[r] < 0) root_to_class[r] = next++;
        cls[x] = root_to_class[r];
    }
    MergedQuiver m;
    m.left_vertices.assign(cls.begin(), cls.begin() + nl);
    m.right_vertices.assign(cls.begin() + nl, cls.end());
    std::vector<Edge> edges;
    for (const Edge& e : left.edges()) {
        m.left_edges.push_back(static_cast<int>(edges.size()));
        edges.push_back({left_prefix + e.id, m.left_vertices[e.src], m.left_vertices[e.tgt]});
    }
    for (const Edge& e : right.edges()) {
        m.right_edges.push_back(static_cast<int>(edges.size()));
        edges.push_back({right_prefix + e.id, m.right_vertices[e.src], m.right_vertices[e.tgt]});
    }
    m.quiver = Quiver(next, std::move(edges));
    return m;
}

} // namespace quivlap
