#include <doctest.h>

#include <algorithm>

#include "quivlap/selector.hpp"
#include "support/oracles.hpp"

using namespace quivlap;

namespace {

FeatureMatrix dense_to_columns(const std::vector<std::vector<int>>& rows) {
    FeatureMatrix m;
    m.n_cells = static_cast<int>(rows.size());
    const std::size_t nf = rows.empty() ? 0 : rows[0].size();
    m.columns.resize(nf);
    for (std::size_t j = 0; j < nf; ++j) {
        m.features.push_back("f" + std::to_string(j));
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i][j]) m.columns[j].push_back(static_cast<int>(i));
    }
    return m;
}

// Normal-equations form of pi_b iota_a for a Euclidean ambient space.
RMat projected_inclusion(const RMat& a, const RMat& b) {
    return (b.transpose() * b).ldlt().solve(b.transpose() * a);
}

RMat orthonormal_columns(const RMat& b) {
    Eigen::JacobiSVD<RMat> svd(b, Eigen::ComputeThinU);
    return svd.matrixU();
}

} // namespace

TEST_CASE("builtin selector ranks by frequency with ties to the lower index") {
    // Cells 0..3 form one set; features 1 and 2 tie at 3/4.
    FeatureMatrix m = dense_to_columns({{0, 1, 1, 1}, {1, 1, 1, 0}, {0, 1, 1, 0}, {0, 0, 0, 0}});
    NerveQuiver n = nerve_quiver(make_cover(4, {{"A", {0, 1, 2, 3}}}), 2);
    auto sel = builtin_selector(m, n, SelectorKind::TopFrequency, 2);
    CHECK(sel.selected[0] == std::vector<int>{1, 2});
    CHECK(sel.scores[0] == std::vector<double>{0.75, 0.75});
    // Columns 1 and 2 are identical, so only one enters the basis.
    CHECK(sel.assignment.bases[0].dim() == 1);

    auto var = builtin_selector(m, n, SelectorKind::TopVariance, 1);
    CHECK(var.selected[0] == std::vector<int>{0});
    CHECK(var.scores[0][0] == doctest::Approx(0.1875));
    CHECK_THROWS_AS(builtin_selector(m, n, SelectorKind::TopFrequency, 0), PreconditionViolation);
}

TEST_CASE("builtin selector matches a brute-force ranking") {
    oracle::Rng rng(31);
    for (int t = 0; t < 10; ++t) {
        std::vector<std::vector<int>> rows(20, std::vector<int>(10));
        for (auto& r : rows)
            for (auto& x : r) x = rng.integer(0, 2) == 0;
        FeatureMatrix m = dense_to_columns(rows);
        NerveQuiver n = nerve_quiver(make_cover(20, {{"A", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}},
                                                     {"B", {9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19}}}),
                                     2);
        const auto kind = t % 2 ? SelectorKind::TopVariance : SelectorKind::TopFrequency;
        const int k = rng.integer(1, 6);
        auto sel = builtin_selector(m, n, kind, k);
        for (int v = 0; v < n.quiver.n_vertices(); ++v) {
            const auto& sup = n.supports[v];
            std::vector<std::pair<double, int>> ranked;
            for (int j = 0; j < 10; ++j) {
                int hits = 0;
                for (int c : sup) hits += rows[c][j];
                double p = static_cast<double>(hits) / static_cast<double>(sup.size());
                ranked.emplace_back(-(kind == SelectorKind::TopFrequency ? p : p * (1 - p)), j);
            }
            std::sort(ranked.begin(), ranked.end());
            std::vector<int> want;
            for (int i = 0; i < k; ++i) want.push_back(ranked[i].second);
            CHECK(sel.selected[v] == want);

            // The basis spans the restricted selected columns.
            RMat restricted = RMat::Zero(20, k);
            for (int i = 0; i < k; ++i)
                for (int c : sup) restricted(c, i) = rows[c][want[i]];
            const RMat& b = sel.assignment.bases[v].basis();
            CHECK(b.cols() == oracle::gauss_rank(restricted));
            if (b.cols() > 0) {
                RMat q = orthonormal_columns(b);
                CHECK((restricted - q * (q.transpose() * restricted)).norm() < 1e-9);
            }
        }
    }
}

TEST_CASE("selector representation carries projected inclusions") {
    oracle::Rng rng(32);
    for (int t = 0; t < 20; ++t) {
        auto sel = oracle::random_selector(rng, 6, true);
        auto rep = selector_rep(sel);
        const Quiver& q = sel.nerve.quiver;
        for (int e = 0; e < q.n_edges(); ++e) {
            const RMat& a = sel.bases[q.edge(e).src].basis();
            const RMat& b = sel.bases[q.edge(e).tgt].basis();
            if (a.cols() == 0 || b.cols() == 0) {
                CHECK(rep.map(e).coeffs().size() == 0);
                continue;
            }
            CHECK((rep.map(e).coeffs() - projected_inclusion(a, b)).norm() < 1e-9);
        }
        auto dual = dual_rep(rep);
        for (int e = 0; e < q.n_edges(); ++e) {
            const RMat& a = sel.bases[q.edge(e).src].basis();
            const RMat& b = sel.bases[q.edge(e).tgt].basis();
            if (a.cols() == 0 || b.cols() == 0) continue;
            CHECK((dual.map(e).coeffs() - projected_inclusion(b, a)).norm() < 1e-9);
        }
    }
}

TEST_CASE("constant representation and inclusions") {
    auto sp = InnerProductSpace<double>::euclidean(3);
    Quiver q(2, {{"e", 0, 1}});
    auto c = constant_rep(q, sp);
    CHECK(c.map(0).coeffs().isIdentity());
    oracle::Rng rng(33);
    auto sel = oracle::random_selector(rng, 5, false, 0);
    auto inc = inclusion_transformation(sel);
    for (int v = 0; v < sel.nerve.quiver.n_vertices(); ++v)
        CHECK(inc.map(v).coeffs() == sel.bases[v].basis());
}

TEST_CASE("compatible subspaces give zero local incompatibility") {
    Cover cover = make_cover(6, {{"A", {0, 1, 2, 3}}, {"B", {3, 4, 5}}});
    SelectorAssignment sel;
    sel.nerve = nerve_quiver(cover, 2);
    sel.ambient = InnerProductSpace<double>::euclidean(6);
    RMat shared = RMat::Zero(6, 1);
    shared(3, 0) = 1;
    for (int v = 0; v < 3; ++v) sel.bases.emplace_back(sel.ambient, shared);
    for (double x : local_compatibility(sel)) CHECK(x < 1e-12);
    auto rep = selector_rep(sel);
    for (int e = 0; e < rep.quiver().n_edges(); ++e) CHECK(rep.map(e).coeffs()(0, 0) == doctest::Approx(1.0));
    CHECK(section_dimension(rep_to_sheaf(rep)) == 1);

    RMat other = RMat::Zero(6, 1);
    other(4, 0) = 1;
    sel.bases[sel.nerve.vertex_of_label("B")] = SubspaceBasis<double>(sel.ambient, other);
    auto lc = local_compatibility(sel);
    CHECK(*std::max_element(lc.begin(), lc.end()) == doctest::Approx(1.0));
}

TEST_CASE("local incompatibility equals the sine of the largest principal angle") {
    oracle::Rng rng(34);
    for (int t = 0; t < 30; ++t) {
        auto sel = oracle::random_selector(rng, 6, true);
        auto lc = local_compatibility(sel);
        const Quiver& q = sel.nerve.quiver;
        for (int e = 0; e < q.n_edges(); ++e) {
            const auto& sa = sel.bases[q.edge(e).src];
            const auto& sb = sel.bases[q.edge(e).tgt];
            if (sa.dim() == 0) {
                CHECK(lc[e] == 0.0);
                continue;
            }
            RMat qa = orthonormal_columns(sa.basis());
            RMat resid = qa;
            if (sb.dim() > 0) {
                RMat qb = orthonormal_columns(sb.basis());
                resid -= qb * (qb.transpose() * qa);
            }
            const double want = Eigen::JacobiSVD<RMat>(resid).singularValues()(0);
            CHECK(lc[e] == doctest::Approx(want).epsilon(1e-8).scale(1));
            if (sb.dim() >= sa.dim()) {
                RVec ang = principal_angles(sa, sb);
                CHECK(std::sin(ang.maxCoeff()) == doctest::Approx(want).epsilon(1e-8).scale(1));
            }
        }
    }
}

TEST_CASE("combined and mixed sheaves agree with the constraint oracle") {
    oracle::Rng rng(35);
    for (int t = 0; t < 20; ++t) {
        auto sel = oracle::random_selector(rng, 5, t % 2 == 1);
        auto comb = rep_to_sheaf(combined_rep(sel));
        auto mixed = rep_to_sheaf(mixed_rep(sel));
        CHECK(section_dimension(comb, 1e-9) == oracle::constraint_section_dim(comb));
        CHECK(section_dimension(mixed, 1e-9) == oracle::constraint_section_dim(mixed));
        CHECK(comb.quiver().n_vertices() == mixed.quiver().n_vertices());
    }
}

TEST_CASE("selector validation") {
    oracle::Rng rng(36);
    auto sel = oracle::random_selector(rng, 4, true, 0);
    sel.bases.pop_back();
    CHECK_THROWS(sel.validate());
    auto wrong = oracle::random_selector(rng, 4, true, 0);
    wrong.bases[0] = SubspaceBasis<double>(InnerProductSpace<double>::euclidean(3), RMat::Identity(3, 1));
    CHECK_THROWS(wrong.validate());
}
