#include "quivlap/reduction.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace quivlap {

namespace {

struct Checker {
    BoundCheck c;
    double tol;
    Checker(std::string name, bool certified, double tol_) : tol(tol_) {
        c.name = std::move(name);
        c.certified = certified;
    }
    void le(double lhs, double rhs) {
        ++c.checked;
        double slack = rhs - lhs;
        if (slack < -tol) c.holds = false;
        c.worst_margin = std::min(c.worst_margin, slack);
    }
};

double top(const RVec& v) { return v.size() ? std::max(1.0, v.cwiseAbs().maxCoeff()) : 1.0; }
double max_abs(const RMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Index zero_count(const RVec& eigs) {
    double thr = kDefaultTol * std::max(1.0, eigs.size() ? eigs(eigs.size() - 1) : 0.0);
    Index k = 0;
    while (k < eigs.size() && eigs(k) < thr) ++k;
    return k;
}

bool all_hold(const std::vector<BoundCheck>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return !c.certified || c.holds; });
}

RMat solve_spd(const RMat& m, const RMat& rhs) {
    if (m.rows() == 0) return RMat::Zero(0, rhs.cols());
    Eigen::LLT<RMat> llt(m);
    if (llt.info() != Eigen::Success) throw NumericalFailure("Gram block is not positive definite");
    return llt.solve(rhs);
}

void raise_if_failed(const std::vector<BoundCheck>& checks, const std::string& what) {
    if (all_hold(checks)) return;
    std::string msg = what + " violated a certified check:";
    for (const auto& c : checks)
        if (c.certified && !c.holds) msg += " " + c.name;
    throw ConsistencyError(msg);
}

QuiverSheaf<double> add_edges(const QuiverSheaf<double>& sh, const std::vector<Edge>& extra,
                              const std::vector<InnerProductSpace<double>>& spaces,
                              const std::vector<LinearMap<double>>& to, const std::vector<LinearMap<double>>& from) {
    std::vector<Edge> edges = sh.quiver().edges();
    std::vector<InnerProductSpace<double>> es = sh.edge_spaces();
    std::vector<LinearMap<double>> t, f;
    for (int e = 0; e < sh.quiver().n_edges(); ++e) {
        t.push_back(sh.to_edge(e));
        f.push_back(sh.from_tgt(e));
    }
    edges.insert(edges.end(), extra.begin(), extra.end());
    es.insert(es.end(), spaces.begin(), spaces.end());
    t.insert(t.end(), to.begin(), to.end());
    f.insert(f.end(), from.begin(), from.end());
    return QuiverSheaf<double>(Quiver(sh.quiver().n_vertices(), std::move(edges)), sh.vertex_spaces(), std::move(es),
                               std::move(t), std::move(f));
}

// Single-vertex sheaf with one loop per nerve vertex tau != sigma0.
QuiverSheaf<double> direct_combined_sheaf(const SelectorAssignment& sel, int sigma0) {
    const auto& s0 = sel.bases[sigma0];
    LinearMap<double> i0 = inclusion(s0);
    std::vector<Edge> edges;
    std::vector<InnerProductSpace<double>> es;
    std::vector<LinearMap<double>> to, from;
    for (int t = 0; t < sel.nerve.quiver.n_vertices(); ++t) {
        if (t == sigma0) continue;
        LinearMap<double> back = inclusion(sel.bases[t]) * (orthogonal_projection(sel.bases[t]) * i0);
        edges.push_back({sel.nerve.labels[t], 0, 0});
        es.push_back(sel.ambient);
        to.push_back(i0 - back);
        from.push_back(LinearMap<double>::zero(s0.space(), sel.ambient));
    }
    return QuiverSheaf<double>(Quiver(1, std::move(edges)), {s0.space()}, std::move(es), std::move(to), std::move(from));
}

void record(ReductionTrace& tr, SurgeryResult<double>& res, QuiverSheaf<double>& cur) {
    SpectralRelation rel = res.report.relation.value_or(SpectralRelation{});
    tr.c1 *= rel.lower;
    tr.c2 *= rel.upper;
    tr.shift += rel.shift;
    tr.steps.push_back({res.report.operation, rel, std::move(res.report)});
    cur = std::move(res.sheaf);
}

QuiverSheaf<double> run_trace(const SelectorAssignment& sel, int sigma0, const QuiverSheaf<double>& combined,
                              ReductionTrace& tr) {
    const NerveQuiver& nv = sel.nerve;
    const Quiver& nq = nv.quiver;
    QuiverSheaf<double> cur = combined;
    if (nq.n_edges() == 0) return cur;
    auto idx = [&](const std::string& id) { return cur.quiver().edge_index(id); };

    // Doubled copies e#2 of every nerve edge, factoring through e by iota_tau.
    {
        std::vector<Edge> extra;
        std::vector<InnerProductSpace<double>> spaces;
        std::vector<LinearMap<double>> to, from;
        std::vector<ParallelPair<double>> undo;
        for (const Edge& e : nq.edges()) {
            int dl = idx(e.id + "_DL");
            const int petal = cur.quiver().edge(dl).tgt;
            const auto& amb = cur.vertex_space(petal);
            RMat iota_t = inclusion(sel.bases[e.tgt]).orthonormal_matrix();
            extra.push_back({e.id + "#2", e.src, e.tgt});
            spaces.push_back(amb);
            to.push_back(cur.to_edge(dl));
            from.emplace_back(cur.vertex_space(e.tgt), amb, iota_t);
            undo.push_back({e.id, e.id + "#2", iota_t});
        }
        QuiverSheaf<double> doubled = add_edges(cur, extra, spaces, to, from);
        SurgeryResult<double> check = remove_parallel_edges(doubled, undo);
        const double gamma = check.report.constant("gamma");
        SurgeryReport rep;
        rep.operation = "add_parallel_edges";
        rep.before = check.report.after;
        rep.after = check.report.before;
        rep.checks = check.report.checks;
        rep.constants = {{"gamma", gamma}};
        rep.relation = SpectralRelation{1.0, 1.0 + gamma, 0};
        SurgeryResult<double> res{std::move(doubled), std::move(rep)};
        record(tr, res, cur);
    }
    // Swing each DL edge onto the far end of its doubled copy.
    {
        std::vector<EdgePairing> pairs;
        for (const Edge& e : nq.edges()) pairs.push_back({e.id + "#2", e.id + "_DL", e.src});
        auto res = homotopy(cur, pairs);
        record(tr, res, cur);
    }
    // Swing it again through the petal, giving an edge sigma -> tau with (iota_sigma, iota_tau).
    {
        std::vector<EdgePairing> pairs;
        for (const Edge& e : nq.edges()) {
            int ld = idx(e.id + "_LD");
            pairs.push_back({e.id + "_LD", e.id + "_DL'", cur.quiver().edge(ld).tgt});
        }
        auto res = homotopy(cur, pairs);
        record(tr, res, cur);
    }
    // Both S-representation edges factor through the new one.
    {
        std::vector<ParallelPair<double>> pairs;
        for (const Edge& e : nq.edges()) {
            pairs.push_back({e.id + "_DL''", e.id, std::nullopt});
            pairs.push_back({e.id + "_DL''", e.id + "#2", std::nullopt});
        }
        auto res = remove_parallel_edges(cur, pairs);
        record(tr, res, cur);
    }
    // Petals now hang on a single isometric edge.
    {
        std::vector<int> petals;
        for (int v = nq.n_vertices(); v < cur.quiver().n_vertices(); ++v) petals.push_back(v);
        auto res = kron_reduce(cur, petals);
        record(tr, res, cur);
        auto clean = remove_null_loops(cur);
        record(tr, clean, cur);
    }
    // Pull every edge onto sigma0.
    for (int round = 0;; ++round) {
        const Quiver& q = cur.quiver();
        std::vector<EdgePairing> pairs;
        std::set<int> used;
        bool pending = false;
        for (int b = 0; b < q.n_edges(); ++b) {
            const Edge& eb = q.edge(b);
            if (eb.src == sigma0 || eb.tgt == sigma0) continue;
            pending = true;
            if (used.count(b)) continue;
            for (int u : {eb.src, eb.tgt}) {
                int partner = -1;
                for (int a : q.incident_edges(u)) {
                    const Edge& ea = q.edge(a);
                    if (a == b || used.count(a) || ea.src == ea.tgt) continue;
                    if (ea.src == sigma0 || ea.tgt == sigma0) {
                        partner = a;
                        break;
                    }
                }
                if (partner < 0) continue;
                used.insert(partner);
                used.insert(b);
                pairs.push_back({q.edge(partner).id, eb.id, u});
                break;
            }
        }
        if (!pending) break;
        if (pairs.empty()) throw NumericalFailure("reduction could not route an edge to the base vertex");
        if (round > 4 * nq.n_edges() + 4) throw NumericalFailure("reduction routing did not terminate");
        auto res = homotopy(cur, pairs);
        record(tr, res, cur);
    }
    // One edge per neighbour of sigma0.
    {
        const Quiver& q = cur.quiver();
        std::map<int, int> first;
        std::vector<ParallelPair<double>> pairs;
        for (int e = 0; e < q.n_edges(); ++e) {
            const Edge& ed = q.edge(e);
            int w = ed.src == sigma0 ? ed.tgt : ed.src;
            auto [it, fresh] = first.emplace(w, e);
            if (!fresh) pairs.push_back({q.edge(it->second).id, ed.id, std::nullopt});
        }
        if (!pairs.empty()) {
            auto res = remove_parallel_edges(cur, pairs);
            record(tr, res, cur);
        }
    }
    {
        std::vector<int> others;
        for (int v = 0; v < cur.quiver().n_vertices(); ++v)
            if (v != sigma0) others.push_back(v);
        auto res = kron_reduce(cur, others);
        record(tr, res, cur);
    }
    return cur;
}

} // namespace

bool CombinedReduction::certified_ok() const { return all_hold(checks); }
bool MixedReduction::certified_ok() const { return all_hold(checks); }

CrossGram selector_cross_gram(const SelectorAssignment& sel) {
    return [&sel](int a, int b) -> RMat {
        const RMat& ba = sel.bases[a].basis();
        const RMat& bb = sel.bases[b].basis();
        return ba.transpose() * sel.ambient.gram() * bb;
    };
}

BlockForms mixed_block_forms(const Quiver& nerve, const CrossGram& cross) {
    const int n = nerve.n_vertices();
    std::vector<RMat> gram(static_cast<std::size_t>(n));
    BlockForms f;
    f.offsets.push_back(0);
    for (int v = 0; v < n; ++v) {
        gram[v] = cross(v, v);
        f.offsets.push_back(f.offsets.back() + gram[v].rows());
    }
    const Index dim = f.offsets.back();
    f.stiffness = RMat::Zero(dim, dim);
    f.mass = RMat::Zero(dim, dim);
    for (int v = 0; v < n; ++v) f.mass.block(f.offsets[v], f.offsets[v], gram[v].rows(), gram[v].rows()) = gram[v];
    for (const Edge& e : nerve.edges()) {
        const int s = e.src, t = e.tgt;
        const Index ds = gram[s].rows(), dt = gram[t].rows();
        RMat mst = cross(s, t);
        RMat mts = mst.transpose();
        f.stiffness.block(f.offsets[s], f.offsets[s], ds, ds) += 2.0 * gram[s] - mst * solve_spd(gram[t], mts);
        f.stiffness.block(f.offsets[t], f.offsets[t], dt, dt) += mts * solve_spd(gram[s], mst);
        f.stiffness.block(f.offsets[s], f.offsets[t], ds, dt) -= mst;
        f.stiffness.block(f.offsets[t], f.offsets[s], dt, ds) -= mts;
    }
    return f;
}

BlockForms combined_block_forms(const Quiver& nerve, int sigma0, const CrossGram& cross) {
    if (sigma0 < 0 || sigma0 >= nerve.n_vertices()) throw PreconditionViolation("base vertex out of range");
    BlockForms f;
    RMat g0 = cross(sigma0, sigma0);
    f.offsets = {0, g0.rows()};
    f.mass = g0;
    f.stiffness = RMat::Zero(g0.rows(), g0.rows());
    for (int t = 0; t < nerve.n_vertices(); ++t) {
        if (t == sigma0) continue;
        RMat m0t = cross(sigma0, t);
        f.stiffness += g0 - m0t * solve_spd(cross(t, t), RMat(m0t.transpose()));
    }
    return f;
}

CombinedReduction reduce_combined(const SelectorAssignment& sel, int sigma0, bool execute_trace) {
    sel.validate();
    const Quiver& nq = sel.nerve.quiver;
    if (sigma0 < 0 || sigma0 >= nq.n_vertices()) throw PreconditionViolation("base vertex out of range");
    if (!nq.connected()) throw PreconditionViolation("combined reduction needs a connected nerve");

    CombinedReduction out;
    out.sigma0 = sigma0;
    out.sheaf = direct_combined_sheaf(sel, sigma0);
    out.spectrum = spectrum(out.sheaf);
    out.kernel_dim = zero_count(out.spectrum);

    QuiverSheaf<double> combined = whiten(rep_to_sheaf(combined_rep(sel)));
    out.full_spectrum = spectrum(combined);
    out.full_section_dim = zero_count(out.full_spectrum);

    Checker ker("kernel_dimension", true, 0.5);
    ker.le(static_cast<double>(out.kernel_dim), static_cast<double>(out.full_section_dim));
    ker.le(static_cast<double>(out.full_section_dim), static_cast<double>(out.kernel_dim));
    out.checks.push_back(ker.c);

    BlockForms bf = combined_block_forms(nq, sigma0, selector_cross_gram(sel));
    RMat direct = laplacian_form(out.sheaf);
    Checker blocks("block_assembly", true, kDefaultTol * std::max(1.0, max_abs(direct)));
    if (direct.size()) blocks.le((direct - bf.stiffness).cwiseAbs().maxCoeff(), 0.0);
    out.checks.push_back(blocks.c);

    if (execute_trace) {
        ReductionTrace tr;
        QuiverSheaf<double> reduced = run_trace(sel, sigma0, combined, tr);
        if (reduced.quiver().n_vertices() != 1) throw ConsistencyError("reduction did not end on a single vertex");
        RMat traced = laplacian_form(reduced);
        RMat expect = laplacian_form(whiten(out.sheaf));
        Checker ent("trace_matches_direct", true, kDefaultTol * std::max(1.0, max_abs(expect)));
        if (expect.size()) ent.le((traced - expect).cwiseAbs().maxCoeff(), 0.0);
        out.checks.push_back(ent.c);

        Checker rel("composed_relation", true, kDefaultTol * tr.c2 * top(out.full_spectrum));
        for (Index i = 0; i < out.spectrum.size(); ++i) {
            rel.le(tr.c1 * out.full_spectrum(i), out.spectrum(i));
            if (i + tr.shift < out.full_spectrum.size()) rel.le(out.spectrum(i), tr.c2 * out.full_spectrum(i + tr.shift));
        }
        out.checks.push_back(rel.c);
        Checker sh("shift", true, 0.5);
        const double expected = static_cast<double>(combined.total_dim() - sel.bases[sigma0].dim());
        sh.le(static_cast<double>(tr.shift), expected);
        sh.le(expected, static_cast<double>(tr.shift));
        out.checks.push_back(sh.c);
        out.trace = std::move(tr);
    }
    raise_if_failed(out.checks, "reduce_combined");
    return out;
}

MixedReduction reduce_mixed(const SelectorAssignment& sel) {
    sel.validate();
    const NerveQuiver& nv = sel.nerve;
    const Quiver& nq = nv.quiver;
    std::vector<Edge> edges;
    std::vector<InnerProductSpace<double>> vs, es;
    std::vector<LinearMap<double>> to, from;
    for (const auto& b : sel.bases) vs.push_back(b.space());
    for (const Edge& e : nq.edges()) {
        const auto& bs = sel.bases[e.src];
        const auto& bt = sel.bases[e.tgt];
        LinearMap<double> is = inclusion(bs);
        LinearMap<double> it = inclusion(bt);
        edges.push_back({e.id + "*", e.tgt, e.src});
        es.push_back(bs.space());
        to.push_back(orthogonal_projection(bs) * it);
        from.push_back(LinearMap<double>::identity(bs.space()));
        edges.push_back({e.id + "@", e.src, e.src});
        es.push_back(sel.ambient);
        to.push_back(is);
        from.push_back(it * (orthogonal_projection(bt) * is));
    }
    MixedReduction out;
    out.sheaf = QuiverSheaf<double>(Quiver(nq.n_vertices(), std::move(edges)), std::move(vs), std::move(es),
                                    std::move(to), std::move(from));
    out.spectrum = spectrum(out.sheaf);
    out.kernel_dim = zero_count(out.spectrum);

    QuiverSheaf<double> mixed = whiten(rep_to_sheaf(mixed_rep(sel)));
    out.full_spectrum = spectrum(mixed);
    out.full_section_dim = zero_count(out.full_spectrum);
    out.shift = mixed.total_dim() - out.sheaf.total_dim();

    Checker ker("kernel_dimension", true, 0.5);
    ker.le(static_cast<double>(out.kernel_dim), static_cast<double>(out.full_section_dim));
    ker.le(static_cast<double>(out.full_section_dim), static_cast<double>(out.kernel_dim));
    out.checks.push_back(ker.c);

    BlockForms bf = mixed_block_forms(nq, selector_cross_gram(sel));
    RMat form = laplacian_form(out.sheaf);
    Checker blocks("block_assembly", true, kDefaultTol * std::max(1.0, max_abs(form)));
    if (form.size()) blocks.le((form - bf.stiffness).cwiseAbs().maxCoeff(), 0.0);
    out.checks.push_back(blocks.c);

    const double tol = kDefaultTol * 2.0 * top(out.full_spectrum);
    Checker left("left_interlacing", true, tol);
    Checker upper("doubled_upper", true, tol);
    Checker display("displayed_upper", false, tol);
    for (Index i = 0; i < out.spectrum.size(); ++i) {
        left.le(out.full_spectrum(i), out.spectrum(i));
        if (i + out.shift < out.full_spectrum.size()) {
            upper.le(out.spectrum(i), 2.0 * out.full_spectrum(i + out.shift));
            display.le(out.spectrum(i), out.full_spectrum(i + out.shift));
        }
    }
    out.checks.push_back(left.c);
    out.checks.push_back(upper.c);
    out.checks.push_back(display.c);
    raise_if_failed(out.checks, "reduce_mixed");
    return out;
}

} // namespace quivlap
