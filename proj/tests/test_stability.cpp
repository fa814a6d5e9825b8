#include <doctest.h>

#include "quivlap/stability.hpp"
#include "support/generators.hpp"

using namespace quivlap;
using oracle::RMat;
using gen::random_morphism;
using gen::vertexwise;

TEST_CASE("defect examples") {
    Quiver q(2, {{"e", 0, 1}});
    oracle::Rng rng(1);
    auto rep = oracle::random_rep<double>(rng, q, 2, false);
    std::vector<RMat> ids{RMat::Identity(rep.space(0).dim(), rep.space(0).dim()), RMat::Identity(rep.space(1).dim(), rep.space(1).dim())};
    CHECK(defect(vertexwise<double>(rep, rep, ids)).total < 1e-12);

    auto sp = InnerProductSpace<double>::euclidean(1);
    QuiverRep<double> idrep(q, {sp, sp}, {LinearMap<double>::identity(sp)});
    auto d = defect(vertexwise<double>(idrep, idrep, {RMat::Identity(1, 1), RMat::Zero(1, 1)}));
    CHECK(d.total == doctest::Approx(1));

    for (int t = 0; t < 20; ++t) {
        Quiver r = oracle::random_quiver(rng, 3, 5);
        auto a = oracle::random_rep<cdouble>(rng, r, 3, false), b = oracle::random_rep<cdouble>(rng, r, 3, false);
        std::vector<Mat<cdouble>> m;
        for (int v = 0; v < 3; ++v) m.push_back(rng.cmatrix(b.space(v).dim(), a.space(v).dim()));
        auto rep2 = defect(vertexwise<cdouble>(a, b, m));
        double sq = 0.0;
        for (double x : rep2.per_edge) sq += x * x;
        CHECK(rep2.total == doctest::Approx(std::sqrt(sq)));
    }
}

TEST_CASE("morphisms have zero defect and commuting squares") {
    oracle::Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        Quiver q = oracle::random_quiver(rng, 3, 4);
        auto tau = random_morphism(rng, q);
        CHECK(defect(tau).total < 1e-10);
        for (int e = 0; e < q.n_edges(); ++e) {
            const auto& ed = q.edge(e);
            RMat lhs = tau.target().map(e).coeffs() * tau.map(ed.src).coeffs();
            RMat rhs = tau.map(ed.tgt).coeffs() * tau.source().map(e).coeffs();
            CHECK((lhs.size() == 0 || (lhs - rhs).cwiseAbs().maxCoeff() < 1e-10 * (1 + lhs.norm())));
        }
        auto tr = eigenvalue_transfer(tau);
        for (std::size_t k = 0; k < tr.morphism_bounds.size(); ++k)
            CHECK(tr.target_eigs(static_cast<Index>(k)) <= tr.morphism_bounds[k] + 1e-8 * std::max(1.0, tr.morphism_bounds[k]));
    }
}

TEST_CASE("eigenvalue transfer examples") {
    oracle::Rng rng(3);
    Quiver q = oracle::random_quiver(rng, 3, 4);
    auto rep = oracle::random_rep<double>(rng, q, 3, true);
    std::vector<RMat> u, twice;
    std::vector<LinearMap<double>> maps;
    for (int v = 0; v < 3; ++v) {
        Eigen::HouseholderQR<RMat> qr(rng.matrix(rep.space(v).dim(), rep.space(v).dim()));
        u.push_back(qr.householderQ());
        twice.push_back(2 * RMat::Identity(rep.space(v).dim(), rep.space(v).dim()));
    }
    for (int e = 0; e < q.n_edges(); ++e) {
        const auto& ed = q.edge(e);
        maps.emplace_back(rep.space(ed.src), rep.space(ed.tgt), RMat(u[ed.tgt] * rep.map(e).coeffs() * u[ed.src].transpose()));
    }
    QuiverRep<double> rot(q, rep.spaces(), maps);
    auto tr = eigenvalue_transfer(vertexwise<double>(rep, rot, u));
    CHECK(tr.kappa == doctest::Approx(1));
    CHECK(tr.nullity == 0);
    CHECK(tr.defect < 1e-10);
    for (std::size_t k = 0; k < tr.bounds.size(); ++k) {
        CHECK(tr.bounds[k] == doctest::Approx(tr.source_eigs(static_cast<Index>(k))).epsilon(1e-8).scale(1));
        CHECK(tr.target_eigs(static_cast<Index>(k)) == doctest::Approx(tr.source_eigs(static_cast<Index>(k))).epsilon(1e-8).scale(1));
    }
    auto sc = eigenvalue_transfer(vertexwise<double>(rep, rep, twice));
    CHECK(sc.kappa == doctest::Approx(1));
    CHECK(sc.violations() == 0);
}

TEST_CASE("eigenvalue transfer bound on random triples") {
    oracle::Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        Quiver q = oracle::random_quiver(rng, 3, rng.integer(1, 5));
        auto a = oracle::random_rep<double>(rng, q, 3, t % 2 == 0);
        auto b = oracle::random_rep<double>(rng, q, 3, t % 3 == 0);
        std::vector<RMat> m;
        for (int v = 0; v < 3; ++v) m.push_back(rng.matrix(b.space(v).dim(), a.space(v).dim()));
        auto tr = eigenvalue_transfer(vertexwise<double>(a, b, m));
        CHECK(tr.violations() == 0);
        CHECK(tr.bounds.size() == static_cast<std::size_t>(a.total_dim() - tr.nullity));
    }
}

TEST_CASE("spectral distance bound") {
    oracle::Rng rng(5);
    Quiver q(3, {{"a", 0, 1}, {"b", 1, 2}, {"c", 2, 0}});
    auto rep = oracle::random_rep<double>(rng, q, 3, true);
    std::vector<RMat> ids;
    for (int v = 0; v < 3; ++v) ids.push_back(RMat::Identity(rep.space(v).dim(), rep.space(v).dim()));
    if (rep.total_dim() > 0) {
        auto d = spectral_distance_bound(vertexwise<double>(rep, rep, ids));
        CHECK(d.coupling_cost < 1e-12);
        CHECK(d.w1 < 1e-12);
        CHECK(d.c == 0);
    }

    int tested = 0;
    for (int t = 0; t < 60; ++t) {
        Quiver r = oracle::random_quiver(rng, 3, rng.integer(1, 4));
        auto a = oracle::random_rep<double>(rng, r, 3, t % 2 == 0);
        auto b = oracle::random_rep<double>(rng, r, 3, true);
        std::vector<RMat> m;
        for (int v = 0; v < 3; ++v) m.push_back(rng.matrix(b.space(v).dim(), a.space(v).dim()));
        try {
            auto d = spectral_distance_bound(vertexwise<double>(a, b, m));
            ++tested;
            CHECK(d.coupling_valid);
            CHECK(d.w1 <= d.coupling_cost + 1e-10);
            CHECK(d.coupling_cost <= d.bound + 1e-10);
            std::vector<double> ea = oracle::to_vector(spectrum(rep_to_sheaf(a))), eb = oracle::to_vector(spectrum(rep_to_sheaf(b)));
            CHECK(d.w1 == doctest::Approx(oracle::w1_replicated(ea, eb)).epsilon(1e-9).scale(1));
        } catch (const PreconditionViolation&) {
        }
    }
    CHECK(tested >= 20);

    CHECK(distance_bound_value(5, 0, 1.0, 1.0, 0.0, 0.0, 10.0) == doctest::Approx(0).scale(1));
    CHECK(distance_bound_value(5, 0, 1.0 + 1e-9, 1.0, 1e-9, 1e-9, 10.0) < 1e-6);
}

TEST_CASE("distance bound preconditions") {
    Quiver q(2, {{"e", 0, 1}});
    auto sp = InnerProductSpace<double>::euclidean(1);
    QuiverRep<double> rep(q, {sp, sp}, {LinearMap<double>(sp, sp, RMat::Constant(1, 1, 2))});
    auto t = vertexwise<double>(rep, rep, {RMat::Identity(1, 1), RMat::Identity(1, 1)});
    CHECK_THROWS_AS(spectral_distance_bound(t, 1.0), PreconditionViolation);
    CHECK_NOTHROW(spectral_distance_bound(t, 3.0));
    auto zero = vertexwise<double>(rep, rep, {RMat::Zero(1, 1), RMat::Zero(1, 1)});
    CHECK_THROWS_AS(spectral_distance_bound(zero), PreconditionViolation);
}

TEST_CASE("coupling weights") {
    RVec s(4), t(3);
    s << 0, 1, 2, 3;
    t << 0, 1, 2;
    auto fixed = eigenvalue_coupling(s, t, 0, 3, false);
    CHECK(fixed.valid);
    CHECK(fixed.max_marginal_error < 1e-12);
    CHECK(fixed.weights.minCoeff() >= 0.0);
    CHECK_THROWS_AS(eigenvalue_coupling(t, s, 0, 3, false), PreconditionViolation);
}

TEST_CASE("selector stability bound") {
    CHECK(selector_stability_bound(0.0, 0, 10, 3) == doctest::Approx(0).scale(1));
    CHECK(selector_stability_bound(0.0, 10, 10, 3) == doctest::Approx(8.0 * 3));
    double prev = -1.0;
    for (int i = 0; i < 200; ++i) {
        double eps = i * (M_PI / 2 - 1e-3) / 200;
        double v = selector_stability_bound(eps, 2, 10, 4);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(selector_stability_bound(M_PI / 2, 0, 10, 3), PreconditionViolation);
    CHECK_THROWS_AS(selector_stability_bound(-0.1, 0, 10, 3), PreconditionViolation);
}
