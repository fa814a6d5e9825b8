#include <doctest.h>

#include <cmath>

#include "quivlap/surgery.hpp"
#include "support/generators.hpp"

using namespace quivlap;
using oracle::RMat;
using gen::identity_sheaf;

namespace {

void check_spectrum(const RVec& got, std::vector<double> want, double tol = 1e-10) {
    REQUIRE(got.size() == static_cast<Index>(want.size()));
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(got(static_cast<Index>(i)) == doctest::Approx(want[i]).epsilon(tol).scale(1));
}

const BoundCheck& find_check(const SurgeryReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c;
    FAIL("missing check " << name);
    return r.checks.front();
}

bool has_edge_id(const Quiver& q, const std::string& id, int s, int t) {
    for (const auto& e : q.edges())
        if (e.id == id) return e.src == s && e.tgt == t;
    return false;
}

const Quiver triangle(3, {{"a", 0, 1}, {"b", 2, 1}, {"c", 0, 2}});

} // namespace

TEST_CASE("edge removal examples") {
    auto r = remove_edges(identity_sheaf(triangle), {"b"});
    check_spectrum(r.report.before, {0, 3, 3});
    check_spectrum(r.report.after, {0, 1, 3});
    CHECK(r.sheaf.quiver().n_edges() == 2);
    CHECK(r.report.certified_ok());
    CHECK(find_check(r.report, "edge_operator_interlacing").holds);
    CHECK(find_check(r.report, "vertex_spectrum_decreases").holds);
    CHECK(r.report.constant("removed_edge_dim") == 1);

    auto all = remove_edges(identity_sheaf(triangle), {"a", "b", "c"});
    CHECK(laplacian_form(all.sheaf).norm() == 0.0);
    check_spectrum(all.report.after, {0, 0, 0});

    Quiver with_loop(2, {{"e", 0, 1}, {"l", 1, 1}});
    auto loop = remove_edges(identity_sheaf(with_loop), {"l"});
    check_spectrum(loop.report.after, {0, 2});
    CHECK_THROWS_AS(remove_edges(identity_sheaf(triangle), {"zz"}), PreconditionViolation);
}

TEST_CASE("vertex removal on a path") {
    auto r = remove_vertices(identity_sheaf(Quiver(3, {{"a", 0, 1}, {"b", 1, 2}})), {1});
    CHECK(r.sheaf.quiver().n_vertices() == 2);
    CHECK(r.sheaf.quiver().n_edges() == 0);
    check_spectrum(r.report.before, {0, 1, 3});
    check_spectrum(r.report.after, {0, 0});
    CHECK(r.report.certified_ok());
    CHECK(find_check(r.report, "vertex_removal").holds);
    CHECK(r.report.constant("removed_dim") == 1);
}

TEST_CASE("homotopy turns a star into a path") {
    Quiver star(4, {{"a", 0, 1}, {"b", 0, 2}, {"d", 0, 3}});
    auto r = homotopy(identity_sheaf(star), {{"a", "b", 0}});
    check_spectrum(r.report.before, {0, 1, 1, 4});
    const double s2 = std::sqrt(2.0);
    check_spectrum(r.report.after, {0, 2 - s2, 2, 2 + s2});
    CHECK(has_edge_id(r.sheaf.quiver(), "b'", 1, 2));
    CHECK(r.report.certified_ok());
    REQUIRE(r.report.relation.has_value());
    CHECK(r.report.relation->upper == doctest::Approx(kGoldenRatio * kGoldenRatio));

    CHECK_THROWS_AS(homotopy(identity_sheaf(star), {{"a", "a", 0}}), PreconditionViolation);
    CHECK_THROWS_AS(homotopy(identity_sheaf(star), {{"a", "b", 1}}), PreconditionViolation);

    auto sp = InnerProductSpace<double>::euclidean(1);
    std::vector<InnerProductSpace<double>> spaces(4, sp);
    std::vector<LinearMap<double>> maps{LinearMap<double>(sp, sp, RMat::Constant(1, 1, 2.0)),
                                        LinearMap<double>::identity(sp), LinearMap<double>::identity(sp)};
    auto mismatched = rep_to_sheaf(QuiverRep<double>(star, spaces, maps));
    CHECK_THROWS_AS(homotopy(mismatched, {{"a", "b", 0}}), PreconditionViolation);
}

TEST_CASE("the three-point energy ratio attains the golden ratio squared") {
    const double phi = kGoldenRatio;
    RVec x = RVec::Constant(1, 0.0), y = RVec::Constant(1, 1.0), z = RVec::Constant(1, 1.0 + phi);
    CHECK(homotopy_energy_ratio<double>(x, y, z) == doctest::Approx(phi * phi).epsilon(1e-12));
    oracle::Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        RVec a = rng.matrix(3, 1), b = rng.matrix(3, 1), c = rng.matrix(3, 1);
        CHECK(homotopy_energy_ratio<double>(a, b, c) <= phi * phi * (1 + 1e-12));
    }
}

TEST_CASE("identity and null loops") {
    Quiver tri_loop(3, {{"a", 0, 1}, {"b", 2, 1}, {"c", 0, 2}, {"l", 1, 1}});
    auto r = remove_identity_loops(identity_sheaf(tri_loop));
    CHECK(r.sheaf.quiver().n_edges() == 3);
    check_spectrum(r.report.after, {0, 3, 3});
    CHECK(r.report.constant("removed_loops") == 1);
    CHECK(find_check(r.report, "spectrum_unchanged").holds);

    auto sp = InnerProductSpace<double>::euclidean(1);
    Quiver loop(1, {{"l", 0, 0}});
    auto scaled = rep_to_sheaf(QuiverRep<double>(loop, {sp}, {LinearMap<double>(sp, sp, RMat::Constant(1, 1, 2.0))}));
    CHECK(remove_identity_loops(scaled).sheaf.quiver().n_edges() == 1);
    CHECK(remove_null_loops(scaled).sheaf.quiver().n_edges() == 1);

    QuiverSheaf<double> null_loop(loop, {sp}, {sp}, {LinearMap<double>(sp, sp, RMat::Constant(1, 1, 3.0))},
                                  {LinearMap<double>(sp, sp, RMat::Constant(1, 1, 3.0))});
    auto n = remove_null_loops(null_loop);
    CHECK(n.sheaf.quiver().n_edges() == 0);
    CHECK(n.report.certified_ok());
}

TEST_CASE("parallel edge removal") {
    Quiver doubled(2, {{"p", 0, 1}, {"q", 0, 1}});
    auto r = remove_parallel_edges<double>(identity_sheaf(doubled), {{"p", "q", std::nullopt}});
    check_spectrum(r.report.before, {0, 4});
    check_spectrum(r.report.after, {0, 2});
    CHECK(r.report.constant("gamma") == doctest::Approx(1.0));
    CHECK(r.report.certified_ok());

    auto sp = InnerProductSpace<double>::euclidean(1);
    QuiverSheaf<double> crossed(doubled, {sp, sp}, {sp, sp},
                                {LinearMap<double>::identity(sp), LinearMap<double>::identity(sp)},
                                {LinearMap<double>::identity(sp),
                                 LinearMap<double>(sp, sp, RMat::Constant(1, 1, -1.0))});
    CHECK_THROWS_AS(remove_parallel_edges<double>(crossed, {{"p", "q", std::nullopt}}), PreconditionViolation);
}

TEST_CASE("Kron reduction examples") {
    Quiver path(3, {{"a", 0, 1}, {"b", 1, 2}});
    auto r = kron_reduce(identity_sheaf(path), {1});
    RMat expected{{0.5, -0.5}, {-0.5, 0.5}};
    CHECK((laplacian_form(r.sheaf) - expected).cwiseAbs().maxCoeff() < 1e-12);
    check_spectrum(r.report.after, {0, 1});
    CHECK(r.report.certified_ok());
    CHECK(find_check(r.report, "schur_complement_entries").holds);
    CHECK(r.report.constant("eliminated_dim") == 1);

    auto none = kron_reduce(identity_sheaf(path), {});
    CHECK((laplacian_form(none.sheaf) - laplacian_form(identity_sheaf(path))).norm() < 1e-12);

    Quiver fan(3, {{"p", 0, 1}, {"q", 0, 1}, {"r", 1, 2}});
    auto f = kron_reduce(identity_sheaf(fan), {1});
    const Quiver& k = f.sheaf.quiver();
    CHECK(k.n_vertices() == 2);
    CHECK(has_edge_id(k, "p|p", 0, 0));
    CHECK(has_edge_id(k, "p|q", 0, 0));
    CHECK(has_edge_id(k, "q|q", 0, 0));
    CHECK(has_edge_id(k, "r|r", 1, 1));
    CHECK(has_edge_id(k, "p|r", 0, 1));
    CHECK(has_edge_id(k, "q|r", 0, 1));
    CHECK(f.report.certified_ok());

    CHECK_THROWS_AS(kron_reduce(identity_sheaf(path), {0, 1}), PreconditionViolation);
    auto sp = InnerProductSpace<double>::euclidean(1);
    auto uneven = rep_to_sheaf(QuiverRep<double>(
        path, {sp, sp, sp}, {LinearMap<double>::identity(sp), LinearMap<double>(sp, sp, RMat::Constant(1, 1, 2.0))}));
    CHECK_THROWS_AS(kron_reduce(uneven, {1}), PreconditionViolation);
}

TEST_CASE("random surgeries satisfy their certified bounds") {
    oracle::Rng rng(21);
    for (int t = 0; t < 15; ++t) {
        const bool euclid = t % 2 == 0;
        Quiver q = oracle::random_quiver(rng, 5, 8);
        auto sh = rep_to_sheaf(oracle::random_rep<double>(rng, q, 3, euclid));

        std::vector<std::string> ids;
        for (const auto& e : q.edges())
            if (rng.integer(0, 2) == 0) ids.push_back(e.id);
        auto re = remove_edges(sh, ids);
        CHECK(re.report.certified_ok());
        CHECK(re.sheaf.quiver().n_edges() == q.n_edges() - static_cast<int>(ids.size()));

        auto rv = remove_vertices(sh, {rng.integer(0, 4)});
        CHECK(rv.report.certified_ok());
        CHECK(rv.sheaf.quiver().n_vertices() == 4);

        auto csh = rep_to_sheaf(oracle::random_rep<cdouble>(rng, q, 2, euclid));
        CHECK(remove_edges(csh, ids).report.certified_ok());
    }
}

TEST_CASE("random homotopies stay within the golden-ratio band") {
    oracle::Rng rng(22);
    int tested = 0;
    for (int t = 0; t < 40 && tested < 15; ++t) {
        auto inst = gen::random_homotopy(rng, t % 2 == 0);
        if (!inst) continue;
        ++tested;
        auto r = homotopy(inst->sheaf, {inst->pair});
        CHECK(r.report.certified_ok());
        const double phi4 = std::pow(kGoldenRatio, 4);
        for (Index i = 0; i < r.report.before.size(); ++i) {
            CHECK(r.report.after(i) <= phi4 * r.report.before(i) + 1e-9);
            CHECK(r.report.before(i) <= phi4 * r.report.after(i) + 1e-9);
        }
    }
    CHECK(tested >= 10);
}

TEST_CASE("random parallel pairs with a witness") {
    oracle::Rng rng(23);
    for (int t = 0; t < 10; ++t) {
        auto inst = gen::random_parallel(rng);
        auto r = remove_parallel_edges<double>(inst.sheaf, {inst.pair});
        CHECK(r.report.certified_ok());
        CHECK(r.sheaf.quiver().n_edges() == 2);
        auto found = remove_parallel_edges<double>(inst.sheaf, {{"k", "x", std::nullopt}});
        CHECK(found.report.constant("gamma") == doctest::Approx(r.report.constant("gamma")).epsilon(1e-8));
    }
}

TEST_CASE("random Kron reductions match the Schur complement") {
    oracle::Rng rng(24);
    for (int t = 0; t < 10; ++t) {
        auto sh = gen::random_kron(rng);
        auto r = kron_reduce(sh, {0});
        CHECK(r.report.certified_ok());
        CHECK(r.report.constant("schur_max_abs_diff") < 1e-9);
        CHECK(section_dimension(r.sheaf, 1e-8) == section_dimension(sh, 1e-8));
    }
}

TEST_CASE("random identity loops leave the spectrum unchanged") {
    oracle::Rng rng(25);
    for (int t = 0; t < 10; ++t) {
        auto r = remove_identity_loops(gen::random_with_identity_loops(rng));
        CHECK(r.report.certified_ok());
        CHECK(r.report.constant("removed_loops") >= 1);
        CHECK((r.report.before - r.report.after).cwiseAbs().maxCoeff() < 1e-9);
    }
}
