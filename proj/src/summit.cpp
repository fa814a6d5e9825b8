#include "quivlap/summit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace quivlap {

Index SummitAssignment::total_dim() const {
    Index n = 0;
    for (const auto& s : summits) n += static_cast<Index>(s.size());
    return n;
}

void SummitAssignment::validate() const {
    if (!(bandwidth > 0.0)) throw PreconditionViolation("kernel bandwidth must be positive");
    if (static_cast<int>(summits.size()) != nerve.quiver.n_vertices())
        throw DimensionMismatch("summit lists must match the nerve vertices");
    for (std::size_t v = 0; v < summits.size(); ++v) {
        std::vector<std::pair<std::string, long long>> keys;
        for (const auto& s : summits[v]) {
            if (s.position < 0) throw PreconditionViolation("negative summit position at " + nerve.labels[v]);
            keys.emplace_back(s.chrom, s.position);
        }
        std::sort(keys.begin(), keys.end());
        if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
            throw PreconditionViolation("duplicate summit at " + nerve.labels[v]);
    }
}

RMat kernel_gram(const std::vector<Summit>& a, const std::vector<Summit>& b, double bandwidth) {
    if (!(bandwidth > 0.0)) throw PreconditionViolation("kernel bandwidth must be positive");
    const double denom = 2.0 * bandwidth * bandwidth;
    RMat k = RMat::Zero(static_cast<Index>(a.size()), static_cast<Index>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (a[i].chrom != b[j].chrom) continue;
            double d = static_cast<double>(a[i].position - b[j].position);
            k(static_cast<Index>(i), static_cast<Index>(j)) = std::exp(-d * d / denom);
        }
    return k;
}

std::vector<Summit> normalize_summits(std::vector<Summit> summits, std::size_t max_count) {
    std::sort(summits.begin(), summits.end(), [](const Summit& x, const Summit& y) {
        return std::tie(x.chrom, x.position, y.score) < std::tie(y.chrom, y.position, x.score);
    });
    summits.erase(std::unique(summits.begin(), summits.end(),
                              [](const Summit& x, const Summit& y) { return x.chrom == y.chrom && x.position == y.position; }),
                  summits.end());
    std::stable_sort(summits.begin(), summits.end(), [](const Summit& x, const Summit& y) { return x.score > y.score; });
    if (summits.size() > max_count) summits.resize(max_count);
    return summits;
}

CrossGram summit_cross_gram(const SummitAssignment& sa) {
    return [&sa](int a, int b) -> RMat {
        RMat k = kernel_gram(sa.summits[a], sa.summits[b], sa.bandwidth);
        if (a == b) k.diagonal().array() += kGramRegularization;
        return k;
    };
}

GeneralizedProblem assemble_generalized(const SummitAssignment& sa, AssemblyMode mode, int sigma0) {
    sa.validate();
    GeneralizedProblem p;
    p.mode = mode;
    p.sigma0 = sigma0;
    BlockForms f = mode == AssemblyMode::Mixed ? mixed_block_forms(sa.nerve.quiver, summit_cross_gram(sa))
                                               : combined_block_forms(sa.nerve.quiver, sigma0, summit_cross_gram(sa));
    p.stiffness = std::move(f.stiffness);
    p.mass = std::move(f.mass);
    p.offsets = std::move(f.offsets);
    if (mode == AssemblyMode::Mixed) {
        for (int v = 0; v < sa.nerve.quiver.n_vertices(); ++v)
            for (Index i = p.offsets[v]; i < p.offsets[v + 1]; ++i) p.vertex_of_row.push_back(v);
    } else {
        p.vertex_of_row.assign(static_cast<std::size_t>(p.offsets.back()), sigma0);
    }
    return p;
}

RMat assemble_whitened(const SummitAssignment& sa, AssemblyMode mode, int sigma0) {
    sa.validate();
    const Quiver& q = sa.nerve.quiver;
    const int n = q.n_vertices();
    CrossGram cross = summit_cross_gram(sa);
    std::vector<RMat> w(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        RMat g = cross(v, v);
        Eigen::LLT<RMat> llt(g);
        if (g.size() && llt.info() != Eigen::Success) throw NumericalFailure("summit Gram is not positive definite");
        w[v] = g.size() ? RMat(llt.matrixU()) : RMat(0, 0);
    }
    // pi_a iota_b in orthonormal coordinates.
    auto t = [&](int a, int b) -> RMat {
        RMat m = cross(a, b);
        if (m.size() == 0) return m;
        RMat left = w[a].transpose().triangularView<Eigen::Lower>().solve(m);
        return w[b].triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(left);
    };
    if (mode == AssemblyMode::Combined) {
        const Index d0 = static_cast<Index>(sa.summits[sigma0].size());
        RMat k = RMat::Zero(d0, d0);
        for (int v = 0; v < n; ++v) {
            if (v == sigma0) continue;
            RMat t0v = t(sigma0, v);
            k += RMat::Identity(d0, d0) - t0v * t0v.transpose();
        }
        return k;
    }
    std::vector<Index> off{0};
    for (int v = 0; v < n; ++v) off.push_back(off.back() + static_cast<Index>(sa.summits[v].size()));
    RMat k = RMat::Zero(off.back(), off.back());
    for (const Edge& e : q.edges()) {
        const int s = e.src, g = e.tgt;
        const Index ds = off[s + 1] - off[s], dg = off[g + 1] - off[g];
        RMat tsg = t(s, g);
        k.block(off[s], off[s], ds, ds) += 2.0 * RMat::Identity(ds, ds) - tsg * tsg.transpose();
        k.block(off[g], off[g], dg, dg) += tsg.transpose() * tsg;
        k.block(off[s], off[g], ds, dg) -= tsg;
        k.block(off[g], off[s], dg, ds) -= tsg.transpose();
    }
    return k;
}

namespace {

std::vector<int> pattern_components(const RMat& k, const RMat& m, int& count) {
    const Index n = k.rows();
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    const double tk = 1e-14 * (k.size() ? k.cwiseAbs().maxCoeff() : 0.0);
    const double tm = 1e-14 * (m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
    for (Index j = 0; j < n; ++j)
        for (Index i = j + 1; i < n; ++i)
            if (std::abs(k(i, j)) > tk || std::abs(m(i, j)) > tm) {
                int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    std::map<int, int> label;
    for (Index i = 0; i < n; ++i) {
        int r = find(static_cast<int>(i));
        auto it = label.emplace(r, static_cast<int>(label.size())).first;
        comp[i] = it->second;
    }
    count = static_cast<int>(label.size());
    return comp;
}

} // namespace

GeneralizedSolution solve_generalized(const GeneralizedProblem& p, Index count, bool split) {
    const Index n = p.stiffness.rows();
    if (count < 0 || count > n) count = n;
    GeneralizedSolution out;
    if (!split) {
        EighOptions opt;
        opt.count = count;
        auto r = hermitian_eigh<double>(p.stiffness, p.mass, opt);
        out.values = r.values.head(count);
        out.vectors = r.vectors.leftCols(count);
        out.component.assign(static_cast<std::size_t>(count), -1);
        return out;
    }
    int nc = 0;
    std::vector<int> comp = pattern_components(p.stiffness, p.mass, nc);
    out.n_components = nc;
    std::vector<std::vector<Index>> rows(static_cast<std::size_t>(nc));
    for (Index i = 0; i < n; ++i) rows[comp[i]].push_back(i);

    struct Pair {
        double value;
        int comp;
        Index local;
    };
    std::vector<Pair> pairs;
    std::vector<RMat> vecs(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) {
        const auto& r = rows[c];
        const Index nr = static_cast<Index>(r.size());
        RMat kc(nr, nr), mc(nr, nr);
        for (Index a = 0; a < nr; ++a)
            for (Index b = 0; b < nr; ++b) {
                kc(a, b) = p.stiffness(r[a], r[b]);
                mc(a, b) = p.mass(r[a], r[b]);
            }
        EighOptions opt;
        opt.count = std::min(count, nr);
        auto res = hermitian_eigh<double>(kc, mc, opt);
        for (Index j = 0; j < opt.count; ++j) pairs.push_back({res.values(j), c, j});
        vecs[c] = std::move(res.vectors);
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return std::tie(a.value, a.comp) < std::tie(b.value, b.comp);
    });
    pairs.resize(static_cast<std::size_t>(std::min<Index>(count, static_cast<Index>(pairs.size()))));
    out.values.resize(static_cast<Index>(pairs.size()));
    out.vectors = RMat::Zero(n, static_cast<Index>(pairs.size()));
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const auto& pr = pairs[j];
        out.values(static_cast<Index>(j)) = pr.value;
        const auto& r = rows[pr.comp];
        for (std::size_t a = 0; a < r.size(); ++a)
            out.vectors(r[a], static_cast<Index>(j)) = vecs[pr.comp](static_cast<Index>(a), pr.local);
        out.component.push_back(pr.comp);
    }
    return out;
}

} // namespace quivlap
