#include <doctest.h>

#include <set>

#include "quivlap/quiver.hpp"
#include "support/oracles.hpp"

using namespace quivlap;

namespace {

bool has_edge(const Quiver& q, int s, int t) {
    for (const auto& e : q.edges())
        if (e.src == s && e.tgt == t) return true;
    return false;
}

} // namespace

TEST_CASE("nerve of two overlapping sets") {
    Cover c = make_cover(4, {{"U1", {0, 1, 2}}, {"U2", {2, 3}}});
    NerveQuiver n = nerve_quiver(c, 2);
    CHECK(n.quiver.n_vertices() == 3);
    CHECK(n.quiver.n_edges() == 2);
    int sigma = n.vertex_of_label("U1+U2");
    CHECK(has_edge(n.quiver, sigma, n.vertex_of_label("U1")));
    CHECK(has_edge(n.quiver, sigma, n.vertex_of_label("U2")));
    CHECK(n.supports[sigma] == std::vector<int>{2});
}

TEST_CASE("nerve of disjoint sets has no edges") {
    NerveQuiver n = nerve_quiver(make_cover(4, {{"U1", {0, 1}}, {"U2", {2, 3}}}), 2);
    CHECK(n.quiver.n_vertices() == 2);
    CHECK(n.quiver.n_edges() == 0);
}

TEST_CASE("nerve with a triple overlap") {
    Cover c = make_cover(4, {{"A", {0, 1, 3}}, {"B", {1, 2, 3}}, {"C", {0, 2, 3}}});
    NerveQuiver n = nerve_quiver(c, 3);
    CHECK(n.quiver.n_vertices() == 7);
    CHECK(n.quiver.n_edges() == 12);
    CHECK(nerve_quiver(c, 2).quiver.n_vertices() == 6);
    CHECK_THROWS_AS(nerve_quiver(c, 0), PreconditionViolation);
}

TEST_CASE("nerve edges are exactly strict containments, and compose transitively") {
    oracle::Rng rng(13);
    for (int t = 0; t < 30; ++t) {
        const int items = 8, sets = rng.integer(1, 5);
        std::vector<std::pair<std::string, std::vector<int>>> named;
        std::vector<int> hit(items, 0);
        for (int s = 0; s < sets; ++s) {
            std::vector<int> members;
            for (int x = 0; x < items; ++x)
                if (rng.integer(0, 2) == 0) members.push_back(x), hit[x] = 1;
            if (members.empty()) members.push_back(s % items), hit[s % items] = 1;
            named.emplace_back("S" + std::to_string(s), members);
        }
        for (int x = 0; x < items; ++x)
            if (!hit[x]) named[0].second.push_back(x);
        std::sort(named[0].second.begin(), named[0].second.end());
        Cover c = make_cover(items, named);
        const int order = rng.integer(1, sets);
        NerveQuiver n = nerve_quiver(c, order);

        // Brute force: every subset of set indices up to the order with nonempty intersection.
        std::vector<std::vector<int>> admissible;
        for (int mask = 1; mask < (1 << sets); ++mask) {
            std::vector<int> idx;
            for (int s = 0; s < sets; ++s)
                if (mask >> s & 1) idx.push_back(s);
            if (static_cast<int>(idx.size()) > order) continue;
            bool nonempty = false;
            for (int x = 0; x < items && !nonempty; ++x) {
                bool all = true;
                for (int s : idx) all = all && std::binary_search(c.sets[s].begin(), c.sets[s].end(), x);
                nonempty = all;
            }
            if (nonempty) admissible.push_back(idx);
        }
        REQUIRE(n.quiver.n_vertices() == static_cast<int>(admissible.size()));
        int expected_edges = 0;
        for (const auto& a : admissible)
            for (const auto& b : admissible)
                if (a.size() > b.size() && std::includes(a.begin(), a.end(), b.begin(), b.end())) {
                    ++expected_edges;
                    CHECK(has_edge(n.quiver, n.vertex_of(a), n.vertex_of(b)));
                }
        CHECK(n.quiver.n_edges() == expected_edges);
        for (const auto& e : n.quiver.edges()) {
            CHECK(std::includes(n.supports[e.tgt].begin(), n.supports[e.tgt].end(), n.supports[e.src].begin(),
                                n.supports[e.src].end()));
            for (int f : n.quiver.out_edges(e.tgt)) CHECK(has_edge(n.quiver, e.src, n.quiver.edge(f).tgt));
        }
        for (std::size_t v = 1; v < n.members.size(); ++v) CHECK(n.members[v - 1] < n.members[v]);
    }
}

TEST_CASE("dual quiver") {
    Quiver q(2, {{"e", 0, 1}, {"l", 1, 1}});
    Quiver d = dual_quiver(q);
    CHECK(d.edge(0).src == 1);
    CHECK(d.edge(0).tgt == 0);
    CHECK(d.edge(1).src == 1);
    CHECK(d.edge(1).tgt == 1);
    oracle::Rng rng(2);
    for (int t = 0; t < 10; ++t) {
        Quiver r = oracle::random_quiver(rng, 5, 8);
        Quiver dd = dual_quiver(dual_quiver(r));
        for (int e = 0; e < r.n_edges(); ++e) {
            CHECK(dd.edge(e).id == r.edge(e).id);
            CHECK(dd.edge(e).src == r.edge(e).src);
            CHECK(dd.edge(e).tgt == r.edge(e).tgt);
        }
    }
}

TEST_CASE("florets") {
    Quiver q(3, {{"p", 0, 1}, {"q", 0, 1}, {"r", 0, 2}, {"s", 1, 0}});
    Floret f = floret(q, 0);
    CHECK(f.quiver.n_vertices() == 4);
    CHECK(f.quiver.n_edges() == 6);
    CHECK(f.quiver.edge(0).id == "p_LD");
    CHECK(f.quiver.edge(1).id == "p_DL");
    CHECK(f.tags[1] == FloretTag::DL);
    CHECK(f.petal_edge[0] == -1);

    Quiver sink(2, {{"e", 0, 1}});
    CHECK(floret(sink, 1).quiver.n_vertices() == 1);
    CHECK(floret(sink, 1).quiver.n_edges() == 0);

    Quiver loop(1, {{"e", 0, 0}});
    Floret fl = floret(loop, 0);
    CHECK(fl.quiver.n_vertices() == 2);
    CHECK(fl.quiver.n_edges() == 2);
    CHECK(fl.quiver.edge(0).src == 0);
    CHECK(fl.quiver.edge(0).tgt == 1);
}

TEST_CASE("merging quivers") {
    Quiver a(2, {{"x", 0, 1}}), b(2, {{"y", 0, 1}});
    MergedQuiver disjoint = merge(a, b, {});
    CHECK(disjoint.quiver.n_vertices() == 4);
    CHECK(disjoint.quiver.n_edges() == 2);

    Quiver one(1, {});
    CHECK(merge(one, one, {{0, 0}}).quiver.n_vertices() == 1);

    MergedQuiver path = merge(a, b, {{1, 0}});
    CHECK(path.quiver.n_vertices() == 3);
    CHECK(path.quiver.n_edges() == 2);
    CHECK(path.left_vertices[1] == path.right_vertices[0]);
    CHECK(path.quiver.edge(path.right_edges[0]).id == "R.y");

    oracle::Rng rng(4);
    for (int t = 0; t < 10; ++t) {
        Quiver l = oracle::random_quiver(rng, 4, 5), r = oracle::random_quiver(rng, 3, 4);
        MergedQuiver m = merge(l, r, {{rng.integer(0, 3), rng.integer(0, 2)}, {rng.integer(0, 3), rng.integer(0, 2)}});
        CHECK(m.quiver.n_edges() == l.n_edges() + r.n_edges());
        CHECK(m.quiver.n_vertices() >= 5);
    }
}

TEST_CASE("quiver validation") {
    CHECK_THROWS_AS(Quiver(1, {{"e", 0, 1}}), PreconditionViolation);
    CHECK_THROWS_AS(Quiver(2, {{"e", 0, 1}, {"e", 1, 0}}), PreconditionViolation);
    CHECK_THROWS_AS(make_cover(2, {{"A", {}}}), PreconditionViolation);
    Quiver q(3, {{"a", 0, 1}, {"b", 2, 2}});
    CHECK_FALSE(q.connected());
    CHECK(Quiver(2, {{"a", 1, 0}}).connected());
    CHECK(q.edge_index("b") == 1);
    CHECK_THROWS_AS(q.edge_index("z"), PreconditionViolation);
}
