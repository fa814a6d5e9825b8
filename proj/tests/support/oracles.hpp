#pragma once

// Reference computations that avoid the library's own solvers.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "quivlap/selector.hpp"
#include "quivlap/sheaf.hpp"

namespace oracle {

using quivlap::cdouble;
using quivlap::Index;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

// Cyclic Jacobi rotations on a real symmetric matrix; ascending eigenvalues.
inline std::vector<double> jacobi_eigenvalues(RMat a) {
    const Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
        for (Index p = 0; p < n; ++p)
            for (Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Real 2n embedding of a Hermitian matrix doubles every eigenvalue's multiplicity.
inline std::vector<double> jacobi_eigenvalues(const CMat& h) {
    const Index n = h.rows();
    RMat big(2 * n, 2 * n);
    big << h.real(), -h.imag(), h.imag(), h.real();
    auto all = jacobi_eigenvalues(big);
    std::vector<double> out;
    for (std::size_t i = 0; i < all.size(); i += 2) out.push_back(all[i]);
    return out;
}

inline double to_double(double x) { return x; }

// Rank by Gaussian elimination with complete pivoting.
template <class M>
Index gauss_rank(M a, double rel_tol = 1e-9) {
    const Index rows = a.rows(), cols = a.cols();
    double scale = 0.0;
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) scale = std::max(scale, std::abs(a(i, j)));
    if (scale == 0.0) return 0;
    Index rank = 0;
    for (Index step = 0; step < std::min(rows, cols); ++step) {
        Index pr = step, pc = step;
        double best = 0.0;
        for (Index i = step; i < rows; ++i)
            for (Index j = step; j < cols; ++j)
                if (std::abs(a(i, j)) > best) best = std::abs(a(i, j)), pr = i, pc = j;
        if (best <= rel_tol * scale) break;
        a.row(step).swap(a.row(pr));
        a.col(step).swap(a.col(pc));
        for (Index i = step + 1; i < rows; ++i) {
            auto f = a(i, step) / a(step, step);
            a.row(i) -= f * a.row(step);
        }
        ++rank;
    }
    return rank;
}

// Section dimension from the stacked per-edge constraints to_edge x_s = from_tgt x_t.
template <quivlap::Scalar S>
Index constraint_section_dim(const quivlap::QuiverSheaf<S>& sh) {
    const auto& q = sh.quiver();
    quivlap::Mat<S> c = quivlap::Mat<S>::Zero(sh.target_dim(), sh.total_dim());
    for (int e = 0; e < q.n_edges(); ++e) {
        const auto& ed = q.edge(e);
        const Index r0 = sh.edge_offset(e), de = sh.edge_space(e).dim();
        c.block(r0, sh.vertex_offset(ed.src), de, sh.vertex_space(ed.src).dim()) += sh.to_edge(e).coeffs();
        c.block(r0, sh.vertex_offset(ed.tgt), de, sh.vertex_space(ed.tgt).dim()) -= sh.from_tgt(e).coeffs();
    }
    return sh.total_dim() - gauss_rank(c);
}

inline RMat multigraph_laplacian(int n, const std::vector<std::pair<int, int>>& edges) {
    RMat l = RMat::Zero(n, n);
    for (auto [s, t] : edges) {
        if (s == t) continue;
        l(s, s) += 1;
        l(t, t) += 1;
        l(s, t) -= 1;
        l(t, s) -= 1;
    }
    return l;
}

// W1 between uniform measures: replicate atoms to a common count and pair in sorted order.
inline double w1_replicated(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> x, y;
    for (double v : a) x.insert(x.end(), b.size(), v);
    for (double v : b) y.insert(y.end(), a.size(), v);
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    return s / static_cast<double>(x.size());
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
    RMat matrix(Index r, Index c) {
        RMat m(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) m(i, j) = normal();
        return m;
    }
    CMat cmatrix(Index r, Index c) {
        CMat m(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) m(i, j) = cdouble(normal(), normal());
        return m;
    }
    template <quivlap::Scalar S>
    quivlap::Mat<S> mat(Index r, Index c) {
        if constexpr (std::is_same_v<S, double>) return matrix(r, c);
        else return cmatrix(r, c);
    }
};

inline quivlap::Quiver random_quiver(Rng& rng, int n, int m, bool loops = true) {
    std::vector<quivlap::Edge> edges;
    for (int e = 0; e < m; ++e) {
        int s = rng.integer(0, n - 1), t = rng.integer(0, n - 1);
        if (!loops)
            while (n > 1 && t == s) t = rng.integer(0, n - 1);
        edges.push_back({"e" + std::to_string(e), s, t});
    }
    return quivlap::Quiver(n, std::move(edges));
}

template <quivlap::Scalar S>
quivlap::InnerProductSpace<S> random_space(Rng& rng, Index d, bool euclidean) {
    if (euclidean) return quivlap::InnerProductSpace<S>::euclidean(d);
    quivlap::Mat<S> a = rng.mat<S>(d, d);
    quivlap::Mat<S> g = a * a.adjoint() + quivlap::Mat<S>::Identity(d, d);
    return quivlap::InnerProductSpace<S>(quivlap::Mat<S>((g + g.adjoint()) / 2.0));
}

template <quivlap::Scalar S>
quivlap::QuiverRep<S> random_rep(Rng& rng, const quivlap::Quiver& q, int max_dim, bool euclidean,
                                 double scale = 1.0) {
    std::vector<quivlap::InnerProductSpace<S>> spaces;
    for (int v = 0; v < q.n_vertices(); ++v) spaces.push_back(random_space<S>(rng, rng.integer(0, max_dim), euclidean));
    std::vector<quivlap::LinearMap<S>> maps;
    for (const auto& e : q.edges())
        maps.emplace_back(spaces[e.src], spaces[e.tgt],
                          quivlap::Mat<S>(scale * rng.mat<S>(spaces[e.tgt].dim(), spaces[e.src].dim())));
    return quivlap::QuiverRep<S>(q, std::move(spaces), std::move(maps));
}

// Random selector on one of a few small connected covers; bases share a pool of
// common vectors so that compatible features exist.
inline quivlap::SelectorAssignment random_selector(Rng& rng, int ambient_dim, bool euclidean, int design = -1) {
    using namespace quivlap;
    if (design < 0) design = rng.integer(0, 2);
    Cover cover;
    if (design == 0) cover = make_cover(6, {{"A", {0, 1, 2, 3}}, {"B", {3, 4, 5}}});
    else if (design == 1) cover = make_cover(8, {{"A", {0, 1, 2, 3}}, {"B", {3, 4, 5}}, {"C", {5, 6, 7}}});
    else cover = make_cover(8, {{"A", {0, 1, 2, 3, 4}}, {"B", {3, 4, 5, 6}}, {"C", {4, 6, 7}}});
    SelectorAssignment sel;
    sel.nerve = nerve_quiver(cover, 2);
    sel.ambient = random_space<double>(rng, ambient_dim, euclidean);
    const int pool = rng.integer(1, 2);
    RMat common = rng.matrix(ambient_dim, pool);
    for (int v = 0; v < sel.nerve.quiver.n_vertices(); ++v) {
        int shared = rng.integer(0, pool), extra = rng.integer(0, 2);
        if (rng.integer(0, 5) == 0) shared = extra = 0;
        extra = std::min(extra, ambient_dim - shared);
        RMat b(ambient_dim, shared + extra);
        for (int j = 0; j < shared; ++j) b.col(j) = common.col(j);
        if (extra) b.rightCols(extra) = rng.matrix(ambient_dim, extra);
        sel.bases.emplace_back(sel.ambient, std::move(b));
    }
    return sel;
}

inline std::vector<double> to_vector(const quivlap::RVec& v) { return {v.data(), v.data() + v.size()}; }

} // namespace oracle
