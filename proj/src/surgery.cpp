#include "quivlap/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace quivlap {

bool SurgeryReport::certified_ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return !c.certified || c.holds; });
}

double SurgeryReport::constant(const std::string& name) const {
    for (const auto& [k, v] : constants)
        if (k == name) return v;
    throw PreconditionViolation("report has no constant '" + name + "'");
}

namespace {

double scale_of(const RVec& a, const RVec& b) {
    double s = 1.0;
    if (a.size()) s = std::max(s, a.cwiseAbs().maxCoeff());
    if (b.size()) s = std::max(s, b.cwiseAbs().maxCoeff());
    return s;
}

struct CheckBuilder {
    BoundCheck c;
    double tol;
    CheckBuilder(std::string name, bool certified, double tol_) : tol(tol_) {
        c.name = std::move(name);
        c.certified = certified;
    }
    void le(double lhs, double rhs) {
        ++c.checked;
        double slack = rhs - lhs;
        if (slack < -tol) c.holds = false;
        c.worst_margin = std::min(c.worst_margin, slack);
    }
    BoundCheck done() { return c; }
};

void finish(const SurgeryReport& r) {
    if (r.certified_ok()) return;
    std::ostringstream os;
    os << r.operation << " violated its certified bound:";
    for (const auto& c : r.checks)
        if (c.certified && !c.holds) os << " " << c.name << " (margin " << c.worst_margin << ")";
    throw ConsistencyError(os.str());
}

template <Scalar S>
bool coeffs_equal(const Mat<S>& a, const Mat<S>& b, double tol = 1e-12) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    if (a.size() == 0) return true;
    double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    return (a - b).cwiseAbs().maxCoeff() <= tol * scale;
}

// Restriction of a Euclidean sheaf to kept vertices and edges; kept edges must
// have kept endpoints.
template <Scalar S>
QuiverSheaf<S> restrict_sheaf(const QuiverSheaf<S>& sh, const std::vector<bool>& keep_v, const std::vector<bool>& keep_e) {
    const Quiver& q = sh.quiver();
    std::vector<int> newv(static_cast<std::size_t>(q.n_vertices()), -1);
    std::vector<InnerProductSpace<S>> vs;
    for (int v = 0; v < q.n_vertices(); ++v) {
        if (!keep_v[v]) continue;
        newv[v] = static_cast<int>(vs.size());
        vs.push_back(sh.vertex_space(v));
    }
    std::vector<Edge> edges;
    std::vector<InnerProductSpace<S>> es;
    std::vector<LinearMap<S>> to, from;
    for (int e = 0; e < q.n_edges(); ++e) {
        if (!keep_e[e]) continue;
        const Edge& ed = q.edge(e);
        edges.push_back({ed.id, newv[ed.src], newv[ed.tgt]});
        es.push_back(sh.edge_space(e));
        to.push_back(sh.to_edge(e));
        from.push_back(sh.from_tgt(e));
    }
    Quiver out(static_cast<int>(vs.size()), std::move(edges));
    return QuiverSheaf<S>(std::move(out), std::move(vs), std::move(es), std::move(to), std::move(from));
}

template <Scalar S>
RVec edge_operator_spectrum(const QuiverSheaf<S>& sh) {
    Mat<S> b = boundary(sh).coeffs();
    Mat<S> op = b * b.adjoint();
    return hermitian_eigh<S>(op).values.cwiseMax(0.0);
}

template <Scalar S>
RVec gram_eigs(const Mat<S>& a) {
    return hermitian_eigh<S>(Mat<S>(a.adjoint() * a)).values;
}

template <Scalar S>
Index kernel_dim(const RVec& eigs) {
    double thr = kDefaultTol * std::max(1.0, eigs.size() ? eigs(eigs.size() - 1) : 0.0);
    Index k = 0;
    while (k < eigs.size() && eigs(k) < thr) ++k;
    return k;
}

std::vector<bool> vertex_mask(int n, const std::vector<int>& vertices, const char* what) {
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    for (int v : vertices) {
        if (v < 0 || v >= n) throw PreconditionViolation(std::string(what) + ": vertex out of range");
        if (in[v]) throw PreconditionViolation(std::string(what) + ": vertex listed twice");
        in[v] = true;
    }
    return in;
}

} // namespace

template <Scalar S>
SurgeryResult<S> remove_edges(const QuiverSheaf<S>& input, const std::vector<std::string>& edge_ids) {
    QuiverSheaf<S> sh = whiten(input);
    const Quiver& q = sh.quiver();
    std::vector<bool> keep_e(static_cast<std::size_t>(q.n_edges()), true);
    Index r = 0;
    for (const auto& id : edge_ids) {
        int e = q.edge_index(id);
        if (!keep_e[e]) throw PreconditionViolation("edge '" + id + "' listed twice");
        keep_e[e] = false;
        r += sh.edge_space(e).dim();
    }
    QuiverSheaf<S> out = restrict_sheaf(sh, std::vector<bool>(static_cast<std::size_t>(q.n_vertices()), true), keep_e);

    SurgeryReport rep;
    rep.operation = "remove_edges";
    rep.before = spectrum(sh);
    rep.after = spectrum(out);
    RVec op_before = edge_operator_spectrum(sh);
    RVec op_after = edge_operator_spectrum(out);
    const double tol = kDefaultTol * scale_of(op_before, op_after);

    CheckBuilder inter("edge_operator_interlacing", true, tol);
    for (Index i = 0; i < op_after.size(); ++i) {
        inter.le(op_before(i), op_after(i));
        inter.le(op_after(i), op_before(i + r));
    }
    rep.checks.push_back(inter.done());

    CheckBuilder mono("vertex_spectrum_decreases", true, tol);
    for (Index i = 0; i < rep.before.size(); ++i) mono.le(rep.after(i), rep.before(i));
    rep.checks.push_back(mono.done());

    const Index k = kernel_dim<S>(rep.before);
    CheckBuilder vert("vertex_indexed_interlacing", false, tol);
    const Index n = rep.before.size();
    for (Index i = 0; k + r + i < n; ++i) {
        vert.le(rep.before(k + i), rep.after(k + i));
        vert.le(rep.after(k + i), rep.before(k + r + i));
    }
    rep.checks.push_back(vert.done());
    rep.constants = {{"removed_edge_dim", static_cast<double>(r)}, {"kernel_dim", static_cast<double>(k)}};
    finish(rep);
    return {std::move(out), std::move(rep)};
}

template <Scalar S>
SurgeryResult<S> remove_vertices(const QuiverSheaf<S>& input, const std::vector<int>& vertices) {
    QuiverSheaf<S> sh = whiten(input);
    const Quiver& q = sh.quiver();
    std::vector<bool> in_v = vertex_mask(q.n_vertices(), vertices, "remove_vertices");
    std::vector<bool> keep_v(in_v.size());
    for (std::size_t i = 0; i < in_v.size(); ++i) keep_v[i] = !in_v[i];
    std::vector<bool> keep_e(static_cast<std::size_t>(q.n_edges()));
    for (int e = 0; e < q.n_edges(); ++e) keep_e[e] = keep_v[q.edge(e).src] && keep_v[q.edge(e).tgt];
    QuiverSheaf<S> out = restrict_sheaf(sh, keep_v, keep_e);

    // Bounds from the coupling block between the kept and removed vertices: for
    // each kept u, the sum of A_{u~e}^* A_{u~e} over edges e joining u to the removed set.
    double w1 = 0.0, w2 = 0.0;
    bool any_kept = false;
    Index removed_dim = 0;
    for (int v = 0; v < q.n_vertices(); ++v) {
        if (in_v[v]) {
            removed_dim += sh.vertex_space(v).dim();
            continue;
        }
        const Index du = sh.vertex_space(v).dim();
        Mat<S> acc = Mat<S>::Zero(du, du);
        for (int e : q.incident_edges(v)) {
            const Edge& ed = q.edge(e);
            int other = ed.src == v ? ed.tgt : ed.src;
            if (other == v || !in_v[other]) continue;
            const Mat<S>& a = sh.endpoint_map(e, v).coeffs();
            acc += a.adjoint() * a;
        }
        if (du == 0) continue;
        RVec ev = hermitian_eigh<S>(acc).values;
        w1 = std::max(w1, ev(ev.size() - 1));
        w2 = any_kept ? std::min(w2, ev(0)) : ev(0);
        any_kept = true;
    }
    w2 = std::max(0.0, w2);

    // The same quantities computed from the maps at the removed vertices.
    double lw1 = 0.0, lw2 = 0.0;
    bool any_removed = false;
    for (int v : vertices) {
        double smax = 0.0, smin = 0.0;
        for (int e : q.incident_edges(v)) {
            const Edge& ed = q.edge(e);
            int other = ed.src == v ? ed.tgt : ed.src;
            if (other == v || in_v[other]) continue;
            const Mat<S>& a = sh.endpoint_map(e, v).coeffs();
            if (a.cols() == 0) continue;
            RVec ev = gram_eigs<S>(a);
            smax += ev(ev.size() - 1);
            smin += std::max(0.0, ev(0));
        }
        lw1 = std::max(lw1, smax);
        lw2 = any_removed ? std::min(lw2, smin) : smin;
        any_removed = true;
    }

    SurgeryReport rep;
    rep.operation = "remove_vertices";
    rep.before = spectrum(sh);
    rep.after = spectrum(out);
    const double tol = kDefaultTol * scale_of(rep.before, rep.after) * (1.0 + w1 + lw1);
    const Index kept_dim = out.total_dim();
    CheckBuilder cert("vertex_removal", true, tol);
    for (Index i = 0; i < kept_dim; ++i) {
        cert.le(rep.before(i) - w1, rep.after(i));
        cert.le(rep.after(i), rep.before(i + removed_dim) - w2);
    }
    rep.checks.push_back(cert.done());
    CheckBuilder lit("vertex_removal_removed_side_maps", false, tol);
    for (Index i = 0; i < std::min(removed_dim, kept_dim); ++i) {
        lit.le(rep.before(i) - lw1, rep.after(i));
        lit.le(rep.after(i), rep.before(kept_dim + i) - lw2);
    }
    rep.checks.push_back(lit.done());
    rep.constants = {{"w1", w1}, {"w2", w2}, {"removed_side_w1", lw1}, {"removed_side_w2", lw2},
                     {"removed_dim", static_cast<double>(removed_dim)}};
    finish(rep);
    return {std::move(out), std::move(rep)};
}

template <Scalar S>
SurgeryResult<S> homotopy(const QuiverSheaf<S>& input, const std::vector<EdgePairing>& pairs) {
    QuiverSheaf<S> sh = whiten(input);
    const Quiver& q = sh.quiver();
    std::vector<Edge> edges = q.edges();
    std::vector<InnerProductSpace<S>> es = sh.edge_spaces();
    std::vector<LinearMap<S>> to, from;
    for (int e = 0; e < q.n_edges(); ++e) {
        to.push_back(sh.to_edge(e));
        from.push_back(sh.from_tgt(e));
    }
    std::set<int> used;
    for (const auto& p : pairs) {
        int e1 = q.edge_index(p.first);
        int e2 = q.edge_index(p.second);
        if (e1 == e2) throw PreconditionViolation("homotopy pairs an edge with itself");
        if (!used.insert(e1).second || !used.insert(e2).second)
            throw PreconditionViolation("homotopy pairing repeats an edge");
        if (q.is_loop(e1) || q.is_loop(e2)) throw PreconditionViolation("homotopy pairs cannot contain self-loops");
        const int u = p.common_vertex;
        const Edge& a = q.edge(e1);
        const Edge& b = q.edge(e2);
        if ((a.src != u && a.tgt != u) || (b.src != u && b.tgt != u))
            throw PreconditionViolation("homotopy pair does not share the given vertex");
        if (!sh.edge_space(e1).same_as(sh.edge_space(e2)))
            throw PreconditionViolation("homotopy pair has different edge spaces");
        if (!coeffs_equal<S>(sh.endpoint_map(e1, u).coeffs(), sh.endpoint_map(e2, u).coeffs()))
            throw PreconditionViolation("homotopy pair has different maps at the common vertex");
        const int v = a.src == u ? a.tgt : a.src;
        const int w = b.src == u ? b.tgt : b.src;
        edges[e2] = {b.id + "'", v, w};
        to[e2] = sh.endpoint_map(e1, v);
        from[e2] = sh.endpoint_map(e2, w);
        es[e2] = sh.edge_space(e2);
    }
    QuiverSheaf<S> out(Quiver(q.n_vertices(), std::move(edges)), sh.vertex_spaces(), std::move(es), std::move(to),
                       std::move(from));
    SurgeryReport rep;
    rep.operation = "homotopy";
    rep.before = spectrum(sh);
    rep.after = spectrum(out);
    const double phi2 = kGoldenRatio * kGoldenRatio;
    const double tol = kDefaultTol * scale_of(rep.before, rep.after);
    CheckBuilder c("golden_ratio", true, tol);
    for (Index i = 0; i < rep.before.size(); ++i) {
        c.le(rep.before(i) / phi2, rep.after(i));
        c.le(rep.after(i), phi2 * rep.before(i));
    }
    rep.checks.push_back(c.done());
    rep.relation = SpectralRelation{1.0 / phi2, phi2, 0};
    rep.constants = {{"phi_squared", phi2}, {"pairs", static_cast<double>(pairs.size())}};
    finish(rep);
    return {std::move(out), std::move(rep)};
}

namespace {

template <Scalar S>
SurgeryResult<S> remove_loops_where(const QuiverSheaf<S>& input, bool identity_only, const char* name) {
    QuiverSheaf<S> sh = whiten(input);
    const Quiver& q = sh.quiver();
    std::vector<bool> keep_e(static_cast<std::size_t>(q.n_edges()), true);
    int removed = 0;
    for (int e = 0; e < q.n_edges(); ++e) {
        if (!q.is_loop(e)) continue;
        const Mat<S>& a = sh.to_edge(e).coeffs();
        const Mat<S>& b = sh.from_tgt(e).coeffs();
        bool drop;
        if (identity_only) {
            drop = a.rows() == a.cols() && coeffs_equal<S>(a, Mat<S>::Identity(a.rows(), a.cols())) &&
                   coeffs_equal<S>(b, Mat<S>::Identity(b.rows(), b.cols()));
        } else {
            drop = coeffs_equal<S>(a, b);
        }
        if (drop) {
            keep_e[e] = false;
            ++removed;
        }
    }
    QuiverSheaf<S> out = restrict_sheaf(sh, std::vector<bool>(static_cast<std::size_t>(q.n_vertices()), true), keep_e);
    SurgeryReport rep;
    rep.operation = name;
    rep.before = spectrum(sh);
    rep.after = spectrum(out);
    CheckBuilder c("spectrum_unchanged", true, kDefaultTol * scale_of(rep.before, rep.after));
    for (Index i = 0; i < rep.before.size(); ++i) {
        c.le(rep.before(i), rep.after(i));
        c.le(rep.after(i), rep.before(i));
    }
    rep.checks.push_back(c.done());
    rep.relation = SpectralRelation{1.0, 1.0, 0};
    rep.constants = {{"removed_loops", static_cast<double>(removed)}};
    finish(rep);
    return {std::move(out), std::move(rep)};
}

} // namespace

template <Scalar S>
SurgeryResult<S> remove_identity_loops(const QuiverSheaf<S>& sheaf) {
    return remove_loops_where(sheaf, true, "remove_identity_loops");
}

template <Scalar S>
SurgeryResult<S> remove_null_loops(const QuiverSheaf<S>& sheaf) {
    return remove_loops_where(sheaf, false, "remove_null_loops");
}

template <Scalar S>
SurgeryResult<S> remove_parallel_edges(const QuiverSheaf<S>& input, const std::vector<ParallelPair<S>>& pairs) {
    QuiverSheaf<S> sh = whiten(input);
    const Quiver& q = sh.quiver();
    std::vector<bool> keep_e(static_cast<std::size_t>(q.n_edges()), true);
    std::map<int, double> load; // kept edge -> sum of squared witness norms
    std::set<int> keepers;
    for (const auto& p : pairs) {
        int k = q.edge_index(p.keep);
        int d = q.edge_index(p.drop);
        if (k == d) throw PreconditionViolation("parallel pair uses one edge twice");
        if (!keep_e[d]) throw PreconditionViolation("edge '" + p.drop + "' dropped twice");
        keepers.insert(k);
        const Edge& ek = q.edge(k);
        const Edge& ed = q.edge(d);
        Mat<S> xk(sh.edge_space(k).dim(), 0), yd(sh.edge_space(d).dim(), 0);
        auto hcat = [](const Mat<S>& l, const Mat<S>& r) {
            Mat<S> out(l.rows(), l.cols() + r.cols());
            out << l, r;
            return out;
        };
        if (ed.src == ek.src && ed.tgt == ek.tgt) {
            xk = hcat(sh.to_edge(k).coeffs(), sh.from_tgt(k).coeffs());
            yd = hcat(sh.to_edge(d).coeffs(), sh.from_tgt(d).coeffs());
        } else if (ed.src == ek.tgt && ed.tgt == ek.src) {
            xk = hcat(sh.to_edge(k).coeffs(), sh.from_tgt(k).coeffs());
            yd = hcat(sh.from_tgt(d).coeffs(), sh.to_edge(d).coeffs());
        } else {
            throw PreconditionViolation("edges '" + p.keep + "' and '" + p.drop + "' are not parallel");
        }
        Mat<S> m = p.witness ? *p.witness : Mat<S>(yd * pseudoinverse<S>(xk, 1e-12));
        if (m.rows() != yd.rows() || m.cols() != xk.rows()) throw DimensionMismatch("witness has the wrong shape");
        double resid = yd.size() ? (m * xk - yd).cwiseAbs().maxCoeff() : 0.0;
        double ref = std::max(1.0, yd.size() ? yd.cwiseAbs().maxCoeff() : 0.0);
        if (resid > kDefaultTol * ref)
            throw PreconditionViolation("no witness factors edge '" + p.drop + "' through edge '" + p.keep + "'");
        double nm = m.size() ? hermitian_eigh<S>(Mat<S>(m.adjoint() * m)).values.maxCoeff() : 0.0;
        load[k] += std::max(0.0, nm);
        keep_e[d] = false;
    }
    for (int k : keepers)
        if (!keep_e[k]) throw PreconditionViolation("an edge is both kept and dropped");
    double gamma = 0.0;
    for (const auto& [k, v] : load) gamma = std::max(gamma, v);

    QuiverSheaf<S> out = restrict_sheaf(sh, std::vector<bool>(static_cast<std::size_t>(q.n_vertices()), true), keep_e);
    SurgeryReport rep;
    rep.operation = "remove_parallel_edges";
    rep.before = spectrum(sh);
    rep.after = spectrum(out);
    CheckBuilder c("parallel_edge_removal", true, kDefaultTol * scale_of(rep.before, rep.after));
    for (Index i = 0; i < rep.before.size(); ++i) {
        c.le(rep.before(i) / (1.0 + gamma), rep.after(i));
        c.le(rep.after(i), rep.before(i));
    }
    rep.checks.push_back(c.done());
    rep.relation = SpectralRelation{1.0 / (1.0 + gamma), 1.0, 0};
    rep.constants = {{"gamma", gamma}};
    finish(rep);
    return {std::move(out), std::move(rep)};
}

template <Scalar S>
SurgeryResult<S> kron_reduce(const QuiverSheaf<S>& input, const std::vector<int>& vertices) {
    QuiverSheaf<S> sh = whiten(input);
    const Quiver& q = sh.quiver();
    std::vector<bool> in_v = vertex_mask(q.n_vertices(), vertices, "kron_reduce");
    for (int e = 0; e < q.n_edges(); ++e)
        if (in_v[q.edge(e).src] && in_v[q.edge(e).tgt])
            throw PreconditionViolation("kron_reduce: edge '" + q.edge(e).id + "' joins two eliminated vertices");

    std::vector<int> newv(static_cast<std::size_t>(q.n_vertices()), -1);
    std::vector<InnerProductSpace<S>> vs;
    for (int v = 0; v < q.n_vertices(); ++v) {
        if (in_v[v]) continue;
        newv[v] = static_cast<int>(vs.size());
        vs.push_back(sh.vertex_space(v));
    }
    std::vector<Edge> edges;
    std::vector<InnerProductSpace<S>> es;
    std::vector<LinearMap<S>> to, from;
    for (int e = 0; e < q.n_edges(); ++e) {
        const Edge& ed = q.edge(e);
        if (in_v[ed.src] || in_v[ed.tgt]) continue;
        edges.push_back({ed.id, newv[ed.src], newv[ed.tgt]});
        es.push_back(sh.edge_space(e));
        to.push_back(sh.to_edge(e));
        from.push_back(sh.from_tgt(e));
    }

    Index r = 0;
    for (int v : vertices) {
        const Index dv = sh.vertex_space(v).dim();
        r += dv;
        std::vector<int> inc = q.incident_edges(v);
        double alpha = 1.0;
        for (std::size_t i = 0; i < inc.size(); ++i) {
            const Mat<S>& a = sh.endpoint_map(inc[i], v).coeffs();
            if (dv == 0) break;
            Mat<S> g = a.adjoint() * a;
            double ai = std::real(g(0, 0));
            if (i == 0) alpha = ai;
            double scale = std::max(1.0, std::abs(alpha));
            if ((g - Mat<S>::Identity(dv, dv) * S(alpha)).cwiseAbs().maxCoeff() > kDefaultTol * scale)
                throw PreconditionViolation("kron_reduce: maps at vertex " + std::to_string(v) +
                                            " are not a common multiple of an isometry");
        }
        const double d = static_cast<double>(inc.size());
        if (dv > 0 && (inc.empty() || !(alpha * d > 0.0)))
            throw PreconditionViolation("kron_reduce: vertex " + std::to_string(v) + " has a singular diagonal block");
        const double inv_sqrt = 1.0 / std::sqrt(std::max(d * alpha, 1e-300));
        for (std::size_t i = 0; i < inc.size(); ++i) {
            for (std::size_t j = i; j < inc.size(); ++j) {
                const int p = inc[i], pq = inc[j];
                const Edge& ep = q.edge(p);
                const Edge& eq = q.edge(pq);
                const int u = ep.src == v ? ep.tgt : ep.src;
                const int w = eq.src == v ? eq.tgt : eq.src;
                const LinearMap<S>& avp = sh.endpoint_map(p, v);
                const LinearMap<S>& aup = sh.endpoint_map(p, u);
                if (i == j) {
                    // Z_p = sqrt(id - alpha^{-1} A_{v~p} A_{v~p}^*)
                    const Index de = sh.edge_space(p).dim();
                    Mat<S> zz = Mat<S>::Identity(de, de);
                    if (dv > 0) zz -= avp.coeffs() * avp.coeffs().adjoint() / S(alpha);
                    Mat<S> z = psd_sqrt<S>(zz);
                    const auto& sp = sh.edge_space(p);
                    edges.push_back({ep.id + "|" + ep.id, newv[u], newv[u]});
                    es.push_back(sp);
                    to.emplace_back(vs[newv[u]], sp, z * aup.coeffs());
                    from.push_back(LinearMap<S>::zero(vs[newv[u]], sp));
                } else {
                    const LinearMap<S>& avq = sh.endpoint_map(pq, v);
                    const LinearMap<S>& awq = sh.endpoint_map(pq, w);
                    const auto& sp = sh.vertex_space(v);
                    edges.push_back({ep.id + "|" + eq.id, newv[u], newv[w]});
                    es.push_back(sp);
                    to.emplace_back(vs[newv[u]], sp, Mat<S>(avp.coeffs().adjoint() * aup.coeffs() * S(inv_sqrt)));
                    from.emplace_back(vs[newv[w]], sp, Mat<S>(avq.coeffs().adjoint() * awq.coeffs() * S(inv_sqrt)));
                }
            }
        }
    }
    Quiver reduced_quiver(static_cast<int>(vs.size()), std::move(edges));
    QuiverSheaf<S> out(std::move(reduced_quiver), std::move(vs), std::move(es), std::move(to), std::move(from));

    // Schur complement of the eliminated block, computed directly.
    Mat<S> l = laplacian_form(sh);
    std::vector<Index> keep_idx, elim_idx;
    for (int v = 0; v < q.n_vertices(); ++v)
        for (Index j = 0; j < sh.vertex_space(v).dim(); ++j)
            (in_v[v] ? elim_idx : keep_idx).push_back(sh.vertex_offset(v) + j);
    auto sub = [&](const std::vector<Index>& rows, const std::vector<Index>& cols) {
        Mat<S> m(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = l(rows[i], cols[j]);
        return m;
    };
    Mat<S> schur = sub(keep_idx, keep_idx);
    if (!elim_idx.empty()) {
        Mat<S> dblk = sub(elim_idx, elim_idx);
        Mat<S> y = sub(elim_idx, keep_idx);
        Eigen::LDLT<Mat<S>> ldlt(dblk);
        schur -= y.adjoint() * ldlt.solve(y);
    }
    Mat<S> reduced = laplacian_form(out);

    SurgeryReport rep;
    rep.operation = "kron_reduce";
    rep.before = spectrum(sh);
    rep.after = spectrum(out);
    const double scale = scale_of(rep.before, rep.after);
    CheckBuilder ent("schur_complement_entries", true, kDefaultTol * scale);
    double maxdiff = schur.size() ? (schur - reduced).cwiseAbs().maxCoeff() : 0.0;
    ent.le(maxdiff, 0.0);
    rep.checks.push_back(ent.done());
    CheckBuilder ker("kernel_dimension", true, 0.5);
    const double kb = static_cast<double>(kernel_dim<S>(rep.before));
    const double ka = static_cast<double>(kernel_dim<S>(rep.after));
    ker.le(kb, ka);
    ker.le(ka, kb);
    rep.checks.push_back(ker.done());
    CheckBuilder inter("interlacing", true, kDefaultTol * scale);
    for (Index i = 0; i < rep.after.size(); ++i) {
        inter.le(rep.before(i), rep.after(i));
        inter.le(rep.after(i), rep.before(i + r));
    }
    rep.checks.push_back(inter.done());
    rep.relation = SpectralRelation{1.0, 1.0, r};
    rep.constants = {{"eliminated_dim", static_cast<double>(r)}, {"schur_max_abs_diff", maxdiff}};
    finish(rep);
    return {std::move(out), std::move(rep)};
}

template <Scalar S>
double homotopy_energy_ratio(const Vec<S>& x, const Vec<S>& y, const Vec<S>& z) {
    double num = (x - z).squaredNorm() + (z - y).squaredNorm();
    double den = (x - y).squaredNorm() + (y - z).squaredNorm();
    if (den == 0.0) throw PreconditionViolation("degenerate configuration");
    return num / den;
}

#define QUIVLAP_INSTANTIATE(S)                                                                            \
    template SurgeryResult<S> remove_edges(const QuiverSheaf<S>&, const std::vector<std::string>&);       \
    template SurgeryResult<S> remove_vertices(const QuiverSheaf<S>&, const std::vector<int>&);            \
    template SurgeryResult<S> homotopy(const QuiverSheaf<S>&, const std::vector<EdgePairing>&);           \
    template SurgeryResult<S> remove_identity_loops(const QuiverSheaf<S>&);                               \
    template SurgeryResult<S> remove_null_loops(const QuiverSheaf<S>&);                                   \
    template SurgeryResult<S> remove_parallel_edges(const QuiverSheaf<S>&, const std::vector<ParallelPair<S>>&); \
    template SurgeryResult<S> kron_reduce(const QuiverSheaf<S>&, const std::vector<int>&);                \
    template double homotopy_energy_ratio(const Vec<S>&, const Vec<S>&, const Vec<S>&);

QUIVLAP_INSTANTIATE(double)
QUIVLAP_INSTANTIATE(cdouble)

#undef QUIVLAP_INSTANTIATE

} // namespace quivlap
