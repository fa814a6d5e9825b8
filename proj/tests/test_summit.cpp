#include <doctest.h>

#include <cmath>

#include "quivlap/summit.hpp"
#include "support/generators.hpp"

using namespace quivlap;

namespace {

SummitAssignment two_set_summits(double bandwidth) {
    SummitAssignment sa;
    sa.nerve = nerve_quiver(make_cover(6, {{"A", {0, 1, 2, 3}}, {"B", {3, 4, 5}}}), 2);
    sa.bandwidth = bandwidth;
    sa.summits = {{{"chr1", 1000, 3}, {"chr1", 1500, 2}, {"chr2", 800, 1}},
                  {{"chr1", 1100, 2}},
                  {{"chr1", 1200, 5}, {"chr2", 900, 1}}};
    return sa;
}

std::vector<double> dense_generalized(const GeneralizedProblem& p) {
    Eigen::GeneralizedSelfAdjointEigenSolver<RMat> es(p.stiffness, p.mass);
    return oracle::to_vector(es.eigenvalues());
}

} // namespace

TEST_CASE("kernel Gram entries") {
    std::vector<Summit> a{{"chr1", 0, 1}, {"chr1", 1000, 1}, {"chr2", 0, 1}};
    RMat g = kernel_gram(a, a, 1000);
    CHECK(g(0, 0) == 1.0);
    CHECK(g(0, 1) == doctest::Approx(std::exp(-0.5)));
    CHECK(g(1, 0) == g(0, 1));
    CHECK(g(0, 2) == 0.0);
    CHECK(g(2, 2) == 1.0);
    CHECK_THROWS_AS(kernel_gram(a, a, 0), PreconditionViolation);
    CHECK_THROWS_AS(kernel_gram(a, a, -5), PreconditionViolation);
}

TEST_CASE("summit normalization") {
    std::vector<Summit> s{{"chr2", 10, 1}, {"chr1", 5, 3}, {"chr2", 10, 4}, {"chr1", 7, 3}, {"chr1", 2, 0.5}};
    auto n = normalize_summits(s, 3);
    REQUIRE(n.size() == 3);
    CHECK(n[0].chrom == "chr2");
    CHECK(n[0].score == 4);
    CHECK(n[1].position == 5);
    CHECK(n[2].position == 7);
    CHECK(normalize_summits(s, 100).size() == 4);
}

TEST_CASE("generalized and whitened assemblies agree") {
    oracle::Rng rng(51);
    for (int t = 0; t < 20; ++t) {
        auto sa = gen::random_summits(rng, t % 2);
        for (auto mode : {AssemblyMode::Mixed, AssemblyMode::Combined}) {
            const int s0 = rng.integer(0, sa.nerve.quiver.n_vertices() - 1);
            auto p = assemble_generalized(sa, mode, s0);
            CHECK(p.stiffness.rows() == p.mass.rows());
            CHECK(p.stiffness.isApprox(p.stiffness.transpose()));
            RMat w = assemble_whitened(sa, mode, s0);
            Eigen::SelfAdjointEigenSolver<RMat> es(w);
            auto dense = dense_generalized(p);
            REQUIRE(static_cast<Index>(dense.size()) == es.eigenvalues().size());
            for (std::size_t i = 0; i < dense.size(); ++i)
                CHECK(dense[i] == doctest::Approx(es.eigenvalues()(static_cast<Index>(i))).epsilon(1e-7).scale(1));

            auto sol = solve_generalized(p, -1, true);
            auto unsplit = solve_generalized(p, -1, false);
            REQUIRE(sol.values.size() == unsplit.values.size());
            for (Index i = 0; i < sol.values.size(); ++i) {
                CHECK(sol.values(i) == doctest::Approx(dense[static_cast<std::size_t>(i)]).epsilon(1e-7).scale(1));
                CHECK(sol.values(i) == doctest::Approx(unsplit.values(i)).epsilon(1e-7).scale(1));
            }
            RMat gram = sol.vectors.transpose() * p.mass * sol.vectors;
            CHECK((gram - RMat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-7);
            RMat resid = p.stiffness * sol.vectors - p.mass * sol.vectors * sol.values.asDiagonal();
            CHECK(resid.cwiseAbs().maxCoeff() < 1e-7);
        }
    }
}

TEST_CASE("far-apart summits give an identity mass matrix") {
    auto sa = two_set_summits(1e-3);
    auto p = assemble_generalized(sa, AssemblyMode::Mixed);
    CHECK((p.mass - RMat::Identity(p.mass.rows(), p.mass.rows())).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(p.offsets.back() == sa.total_dim());
    CHECK(sa.total_dim() == 6);
    // Every cross block vanishes, so each summit is its own pattern component.
    auto sol = solve_generalized(p, -1, true);
    CHECK(sol.n_components == 6);
}

TEST_CASE("truncated solves return the smallest pairs") {
    auto sa = two_set_summits(1000);
    auto p = assemble_generalized(sa, AssemblyMode::Mixed);
    auto all = solve_generalized(p);
    auto few = solve_generalized(p, 3);
    REQUIRE(few.values.size() == 3);
    for (Index i = 0; i < 3; ++i) CHECK(few.values(i) == doctest::Approx(all.values(i)).scale(1));
    CHECK(few.vectors.cols() == 3);
}

TEST_CASE("summit assignment validation") {
    auto sa = two_set_summits(1000);
    sa.summits.pop_back();
    CHECK_THROWS(sa.validate());
    auto bad = two_set_summits(0);
    CHECK_THROWS(bad.validate());
}
