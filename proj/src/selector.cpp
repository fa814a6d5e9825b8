#include "quivlap/selector.hpp"

#include <algorithm>
#include <numeric>

namespace quivlap {

void SelectorAssignment::validate() const {
    if (static_cast<int>(bases.size()) != nerve.quiver.n_vertices())
        throw DimensionMismatch("selector needs one subspace per nerve vertex");
    for (const auto& b : bases)
        if (!b.ambient().same_as(ambient)) throw DimensionMismatch("selector subspaces live in different ambient spaces");
}

QuiverRep<double> selector_rep(const SelectorAssignment& sel) {
    sel.validate();
    const Quiver& q = sel.nerve.quiver;
    std::vector<InnerProductSpace<double>> spaces;
    for (const auto& b : sel.bases) spaces.push_back(b.space());
    std::vector<LinearMap<double>> maps;
    for (const Edge& e : q.edges())
        maps.push_back(orthogonal_projection(sel.bases[e.tgt]) * inclusion(sel.bases[e.src]));
    return QuiverRep<double>(q, std::move(spaces), std::move(maps));
}

QuiverRep<double> constant_rep(const Quiver& q, const InnerProductSpace<double>& space) {
    std::vector<InnerProductSpace<double>> spaces(static_cast<std::size_t>(q.n_vertices()), space);
    std::vector<LinearMap<double>> maps(static_cast<std::size_t>(q.n_edges()), LinearMap<double>::identity(space));
    return QuiverRep<double>(q, std::move(spaces), std::move(maps));
}

Transformation<double> inclusion_transformation(const SelectorAssignment& sel) {
    std::vector<LinearMap<double>> maps;
    for (const auto& b : sel.bases) maps.push_back(inclusion(b));
    return Transformation<double>(selector_rep(sel), constant_rep(sel.nerve.quiver, sel.ambient), std::move(maps));
}

QuiverRep<double> floret_rep(const Transformation<double>& t, int u) {
    const Quiver& q = t.source().quiver();
    Floret f = floret(q, u);
    std::vector<InnerProductSpace<double>> spaces{t.source().space(u)};
    for (std::size_t i = 1; i < f.petal_edge.size(); ++i) spaces.push_back(t.target().space(q.edge(f.petal_edge[i]).tgt));
    std::vector<LinearMap<double>> maps;
    for (std::size_t i = 0; i < f.origin_edge.size(); ++i) {
        int e = f.origin_edge[i];
        if (f.tags[i] == FloretTag::LD) maps.push_back(t.target().map(e) * t.map(u));
        else maps.push_back(t.map(q.edge(e).tgt) * t.source().map(e));
    }
    return QuiverRep<double>(f.quiver, std::move(spaces), std::move(maps));
}

QuiverRep<double> merge_reps(const QuiverRep<double>& left, const QuiverRep<double>& right,
                             const std::vector<std::pair<int, int>>& identify, const std::string& left_prefix,
                             const std::string& right_prefix) {
    MergedQuiver m = merge(left.quiver(), right.quiver(), identify, left_prefix, right_prefix);
    std::vector<std::optional<InnerProductSpace<double>>> spaces(static_cast<std::size_t>(m.quiver.n_vertices()));
    auto place = [&](int cls, const InnerProductSpace<double>& s) {
        if (spaces[cls] && !spaces[cls]->same_as(s)) throw PreconditionViolation("merged vertices carry different spaces");
        if (!spaces[cls]) spaces[cls] = s;
    };
    for (int v = 0; v < left.quiver().n_vertices(); ++v) place(m.left_vertices[v], left.space(v));
    for (int v = 0; v < right.quiver().n_vertices(); ++v) place(m.right_vertices[v], right.space(v));
    std::vector<InnerProductSpace<double>> vs;
    for (auto& s : spaces) vs.push_back(*s);
    std::vector<LinearMap<double>> maps;
    auto retarget = [&](const LinearMap<double>& a, int src, int tgt) {
        return LinearMap<double>(vs[src], vs[tgt], a.coeffs());
    };
    for (int e = 0; e < left.quiver().n_edges(); ++e) {
        const Edge& ed = m.quiver.edge(m.left_edges[e]);
        maps.push_back(retarget(left.map(e), ed.src, ed.tgt));
    }
    for (int e = 0; e < right.quiver().n_edges(); ++e) {
        const Edge& ed = m.quiver.edge(m.right_edges[e]);
        maps.push_back(retarget(right.map(e), ed.src, ed.tgt));
    }
    return QuiverRep<double>(m.quiver, std::move(vs), std::move(maps));
}

namespace {

QuiverRep<double> glue_florets(QuiverRep<double> base, const SelectorAssignment& sel) {
    Transformation<double> iota = inclusion_transformation(sel);
    for (int v = 0; v < sel.nerve.quiver.n_vertices(); ++v) {
        QuiverRep<double> fl = floret_rep(iota, v);
        if (fl.quiver().n_edges() == 0) continue;
        base = merge_reps(base, fl, {{v, 0}}, "", "");
    }
    return base;
}

} // namespace

QuiverRep<double> combined_rep(const SelectorAssignment& sel) {
    return glue_florets(selector_rep(sel), sel);
}

QuiverRep<double> mixed_rep(const SelectorAssignment& sel) {
    return glue_florets(dual_rep(selector_rep(sel)), sel);
}

std::vector<double> local_compatibility(const SelectorAssignment& sel) {
    sel.validate();
    std::vector<double> out;
    for (const Edge& e : sel.nerve.quiver.edges()) {
        LinearMap<double> is = inclusion(sel.bases[e.src]);
        LinearMap<double> it = inclusion(sel.bases[e.tgt]);
        LinearMap<double> back = it * (orthogonal_projection(sel.bases[e.tgt]) * is);
        out.push_back(operator_norm(is - back));
    }
    return out;
}

Transformation<double> selector_transformation(const SelectorAssignment& large, const SelectorAssignment& small) {
    large.validate();
    small.validate();
    if (large.nerve.labels != small.nerve.labels) throw DimensionMismatch("selectors live on different nerves");
    if (!large.ambient.same_as(small.ambient)) throw DimensionMismatch("selectors use different ambient spaces");
    std::vector<LinearMap<double>> maps;
    for (std::size_t v = 0; v < large.bases.size(); ++v)
        maps.push_back(orthogonal_projection(small.bases[v]) * inclusion(large.bases[v]));
    return Transformation<double>(selector_rep(large), selector_rep(small), std::move(maps));
}

void FeatureMatrix::validate() const {
    if (n_cells <= 0) throw PreconditionViolation("feature matrix has no cells");
    if (features.size() != columns.size()) throw DimensionMismatch("feature names and columns differ in length");
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& c = columns[j];
        if (c.empty()) throw PreconditionViolation("feature '" + features[j] + "' has an empty column");
        if (!std::is_sorted(c.begin(), c.end()) || std::adjacent_find(c.begin(), c.end()) != c.end())
            throw PreconditionViolation("feature column is not sorted and unique");
        if (c.front() < 0 || c.back() >= n_cells) throw PreconditionViolation("feature column has a cell out of range");
    }
}

BuiltinSelection builtin_selector(const FeatureMatrix& m, const NerveQuiver& nerve, SelectorKind kind, int k) {
    m.validate();
    if (k <= 0) throw PreconditionViolation("selector needs k >= 1");
    BuiltinSelection out;
    out.assignment.nerve = nerve;
    out.assignment.ambient = InnerProductSpace<double>::euclidean(m.n_cells);
    const int nf = m.n_features();
    for (int v = 0; v < nerve.quiver.n_vertices(); ++v) {
        const auto& support = nerve.supports[v];
        std::vector<char> in(static_cast<std::size_t>(m.n_cells), 0);
        for (int c : support) in[c] = 1;
        const double ns = static_cast<double>(support.size());
        std::vector<double> score(static_cast<std::size_t>(nf));
        for (int j = 0; j < nf; ++j) {
            int hits = 0;
            for (int c : m.columns[j]) hits += in[c];
            double p = hits / ns;
            score[j] = kind == SelectorKind::TopFrequency ? p : p * (1.0 - p);
        }
        std::vector<int> order(static_cast<std::size_t>(nf));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });
        order.resize(static_cast<std::size_t>(std::min(k, nf)));
        std::vector<double> sc;
        for (int j : order) sc.push_back(score[j]);

        // Greedy independent subset of the restricted columns.
        std::vector<Eigen::VectorXd> ortho;
        std::vector<Eigen::VectorXd> cols;
        for (int j : order) {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(m.n_cells);
            for (int c : m.columns[j])
                if (in[c]) x(c) = 1.0;
            double n0 = x.norm();
            if (n0 == 0.0) continue;
            Eigen::VectorXd r = x;
            for (const auto& q : ortho) r -= q.dot(r) * q;
            for (const auto& q : ortho) r -= q.dot(r) * q;
            if (r.norm() <= 1e-10 * n0) continue;
            ortho.push_back(r / r.norm());
            cols.push_back(x);
        }
        RMat basis(m.n_cells, static_cast<Index>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i) basis.col(static_cast<Index>(i)) = cols[i];
        out.assignment.bases.emplace_back(out.assignment.ambient, std::move(basis));
        out.selected.push_back(std::move(order));
        out.scores.push_back(std::move(sc));
    }
    return out;
}

} // namespace quivlap
