#include "quivlap/sheaf.hpp"

#include <algorithm>
#include <cmath>

namespace quivlap {

template <Scalar S>
QuiverRep<S>::QuiverRep(Quiver quiver, std::vector<InnerProductSpace<S>> spaces, std::vector<LinearMap<S>> maps)
    : quiver_(std::move(quiver)), spaces_(std::move(spaces)), maps_(std::move(maps)) {
    if (static_cast<int>(spaces_.size()) != quiver_.n_vertices())
        throw DimensionMismatch("representation needs one space per vertex");
    if (static_cast<int>(maps_.size()) != quiver_.n_edges())
        throw DimensionMismatch("representation needs one map per edge");
    for (int e = 0; e < quiver_.n_edges(); ++e) {
        const Edge& ed = quiver_.edge(e);
        if (!maps_[e].domain().same_as(spaces_[ed.src]) || !maps_[e].codomain().same_as(spaces_[ed.tgt]))
            throw DimensionMismatch("map on edge '" + ed.id + "' does not match its endpoint spaces");
    }
}

template <Scalar S>
Index QuiverRep<S>::total_dim() const {
    Index n = 0;
    for (const auto& s : spaces_) n += s.dim();
    return n;
}

template <Scalar S>
double QuiverRep<S>::max_map_norm() const {
    double r = 0.0;
    for (const auto& m : maps_) r = std::max(r, operator_norm(m));
    return r;
}

template <Scalar S>
QuiverSheaf<S>::QuiverSheaf(Quiver quiver, std::vector<InnerProductSpace<S>> vertex_spaces,
                            std::vector<InnerProductSpace<S>> edge_spaces, std::vector<LinearMap<S>> to_edge,
                            std::vector<LinearMap<S>> from_tgt)
    : quiver_(std::move(quiver)), vspaces_(std::move(vertex_spaces)), espaces_(std::move(edge_spaces)),
      to_edge_(std::move(to_edge)), from_tgt_(std::move(from_tgt)) {
    const auto nv = static_cast<std::size_t>(quiver_.n_vertices());
    const auto ne = static_cast<std::size_t>(quiver_.n_edges());
    if (vspaces_.size() != nv) throw DimensionMismatch("sheaf needs one space per vertex");
    if (espaces_.size() != ne || to_edge_.size() != ne || from_tgt_.size() != ne)
        throw DimensionMismatch("sheaf needs one space and two maps per edge");
    for (std::size_t e = 0; e < ne; ++e) {
        const Edge& ed = quiver_.edge(static_cast<int>(e));
        if (!to_edge_[e].domain().same_as(vspaces_[ed.src]) || !to_edge_[e].codomain().same_as(espaces_[e]))
            throw DimensionMismatch("source map on edge '" + ed.id + "' does not match its spaces");
        if (!from_tgt_[e].domain().same_as(vspaces_[ed.tgt]) || !from_tgt_[e].codomain().same_as(espaces_[e]))
            throw DimensionMismatch("target map on edge '" + ed.id + "' does not match its spaces");
    }
    for (const auto& s : vspaces_) voff_.push_back(voff_.back() + s.dim());
    for (const auto& s : espaces_) eoff_.push_back(eoff_.back() + s.dim());
}

template <Scalar S>
const LinearMap<S>& QuiverSheaf<S>::endpoint_map(int e, int v) const {
    const Edge& ed = quiver_.edge(e);
    if (ed.src == ed.tgt) throw PreconditionViolation("endpoint map of a self-loop is ambiguous");
    if (ed.src == v) return to_edge(e);
    if (ed.tgt == v) return from_tgt(e);
    throw PreconditionViolation("vertex is not an endpoint of edge '" + ed.id + "'");
}

template <Scalar S>
bool QuiverSheaf<S>::is_euclidean() const {
    return std::all_of(vspaces_.begin(), vspaces_.end(), [](const auto& s) { return s.is_euclidean(); }) &&
           std::all_of(espaces_.begin(), espaces_.end(), [](const auto& s) { return s.is_euclidean(); });
}

template <Scalar S>
QuiverSheaf<S> rep_to_sheaf(const QuiverRep<S>& rep) {
    const Quiver& q = rep.quiver();
    std::vector<InnerProductSpace<S>> espaces;
    std::vector<LinearMap<S>> to_edge, from_tgt;
    for (int e = 0; e < q.n_edges(); ++e) {
        const auto& tgt = rep.space(q.edge(e).tgt);
        espaces.push_back(tgt);
        to_edge.push_back(rep.map(e));
        from_tgt.push_back(LinearMap<S>::identity(tgt));
    }
    return QuiverSheaf<S>(q, rep.spaces(), std::move(espaces), std::move(to_edge), std::move(from_tgt));
}

template <Scalar S>
QuiverRep<S> dual_rep(const QuiverRep<S>& rep) {
    std::vector<LinearMap<S>> maps;
    for (const auto& m : rep.maps()) maps.push_back(m.adjoint());
    return QuiverRep<S>(dual_quiver(rep.quiver()), rep.spaces(), std::move(maps));
}

template <Scalar S>
InnerProductSpace<S> total_space(const QuiverSheaf<S>& sheaf) {
    return direct_sum(sheaf.vertex_spaces());
}

template <Scalar S>
InnerProductSpace<S> target_space(const QuiverSheaf<S>& sheaf) {
    return direct_sum(sheaf.edge_spaces());
}

template <Scalar S>
LinearMap<S> boundary(const QuiverSheaf<S>& sheaf) {
    const Quiver& q = sheaf.quiver();
    Mat<S> b = Mat<S>::Zero(sheaf.target_dim(), sheaf.total_dim());
    for (int e = 0; e < q.n_edges(); ++e) {
        const Edge& ed = q.edge(e);
        const Index r0 = sheaf.edge_offset(e);
        const Index de = sheaf.edge_space(e).dim();
        const auto& a = sheaf.to_edge(e).coeffs();
        const auto& c = sheaf.from_tgt(e).coeffs();
        if (ed.src == ed.tgt) {
            b.block(r0, sheaf.vertex_offset(ed.src), de, a.cols()) = a - c;
        } else {
            b.block(r0, sheaf.vertex_offset(ed.src), de, a.cols()) = a;
            b.block(r0, sheaf.vertex_offset(ed.tgt), de, c.cols()) = -c;
        }
    }
    return LinearMap<S>(total_space(sheaf), target_space(sheaf), std::move(b));
}

template <Scalar S>
Mat<S> laplacian_form(const QuiverSheaf<S>& sheaf) {
    const Quiver& q = sheaf.quiver();
    Mat<S> k = Mat<S>::Zero(sheaf.total_dim(), sheaf.total_dim());
    for (int e = 0; e < q.n_edges(); ++e) {
        const Edge& ed = q.edge(e);
        const auto& es = sheaf.edge_space(e);
        const auto& a = sheaf.to_edge(e).coeffs();
        const auto& c = sheaf.from_tgt(e).coeffs();
        const Index s0 = sheaf.vertex_offset(ed.src);
        const Index t0 = sheaf.vertex_offset(ed.tgt);
        auto form = [&](const Mat<S>& x, const Mat<S>& y) -> Mat<S> {
            if (es.is_euclidean()) return x.adjoint() * y;
            return x.adjoint() * (es.gram() * y);
        };
        if (ed.src == ed.tgt) {
            Mat<S> d = a - c;
            k.block(s0, s0, a.cols(), a.cols()) += form(d, d);
        } else {
            k.block(s0, s0, a.cols(), a.cols()) += form(a, a);
            k.block(t0, t0, c.cols(), c.cols()) += form(c, c);
            Mat<S> st = form(a, c);
            k.block(s0, t0, a.cols(), c.cols()) -= st;
            k.block(t0, s0, c.cols(), a.cols()) -= st.adjoint();
        }
    }
    return k;
}

template <Scalar S>
LinearMap<S> laplacian(const QuiverSheaf<S>& sheaf) {
    auto tot = total_space(sheaf);
    Mat<S> k = laplacian_form(sheaf);
    if (!tot.is_euclidean()) k = tot.from_orthonormal(tot.dual_to_orthonormal(k));
    return LinearMap<S>(tot, tot, std::move(k));
}

template <Scalar S>
double dirichlet_energy(const QuiverSheaf<S>& sheaf, const Vec<S>& x) {
    if (x.size() != sheaf.total_dim()) throw DimensionMismatch("total vector has the wrong length");
    const Quiver& q = sheaf.quiver();
    double total = 0.0;
    for (int e = 0; e < q.n_edges(); ++e) {
        const Edge& ed = q.edge(e);
        Vec<S> xs = x.segment(sheaf.vertex_offset(ed.src), sheaf.vertex_space(ed.src).dim());
        Vec<S> xt = x.segment(sheaf.vertex_offset(ed.tgt), sheaf.vertex_space(ed.tgt).dim());
        Vec<S> d = sheaf.to_edge(e).apply(xs) - sheaf.from_tgt(e).apply(xt);
        double n = sheaf.edge_space(e).norm(d);
        total += n * n;
    }
    return total;
}

template <Scalar S>
EigenResult<S> laplacian_eigh(const QuiverSheaf<S>& sheaf, const EighOptions& opt) {
    Mat<S> k = laplacian_form(sheaf);
    auto tot = total_space(sheaf);
    if (tot.is_euclidean()) return hermitian_eigh<S>(k, opt);
    return hermitian_eigh<S>(k, tot.gram(), opt);
}

template <Scalar S>
RVec spectrum(const QuiverSheaf<S>& sheaf) {
    RVec v = laplacian_eigh(sheaf).values;
    return v.cwiseMax(0.0);
}

template <Scalar S>
SpectralMeasure spectral_measure(const QuiverSheaf<S>& sheaf) {
    return SpectralMeasure(spectrum(sheaf));
}

template <Scalar S>
SubspaceBasis<S> sections(const QuiverSheaf<S>& sheaf, double tol) {
    auto r = laplacian_eigh(sheaf);
    const Index n = r.values.size();
    double lmax = n ? r.values(n - 1) : 0.0;
    double thr = tol * std::max(1.0, lmax);
    Index k = 0;
    while (k < n && r.values(k) < thr) ++k;
    return SubspaceBasis<S>(total_space(sheaf), r.vectors.leftCols(k));
}

template <Scalar S>
Index section_dimension(const QuiverSheaf<S>& sheaf, double tol) {
    return sections(sheaf, tol).dim();
}

template <Scalar S>
EigenResult<S> approximate_sections(const QuiverSheaf<S>& sheaf, Index k) {
    if (k < 0 || k > sheaf.total_dim()) throw PreconditionViolation("requested more eigenpairs than the total dimension");
    EighOptions opt;
    opt.count = k;
    return laplacian_eigh(sheaf, opt);
}

template <Scalar S>
EigenResult<S> epsilon_sections(const QuiverSheaf<S>& sheaf, double eps) {
    auto r = laplacian_eigh(sheaf);
    Index k = 0;
    while (k < r.values.size() && r.values(k) <= eps) ++k;
    r.values.conservativeResize(k);
    r.vectors = r.vectors.leftCols(k).eval();
    return r;
}

template <Scalar S>
QuiverSheaf<S> whiten(const QuiverSheaf<S>& sheaf) {
    if (sheaf.is_euclidean()) return sheaf;
    const Quiver& q = sheaf.quiver();
    std::vector<InnerProductSpace<S>> vs, es;
    for (const auto& s : sheaf.vertex_spaces()) vs.push_back(InnerProductSpace<S>::euclidean(s.dim()));
    for (const auto& s : sheaf.edge_spaces()) es.push_back(InnerProductSpace<S>::euclidean(s.dim()));
    std::vector<LinearMap<S>> to_edge, from_tgt;
    for (int e = 0; e < q.n_edges(); ++e) {
        const Edge& ed = q.edge(e);
        to_edge.emplace_back(vs[ed.src], es[e], sheaf.to_edge(e).orthonormal_matrix());
        from_tgt.emplace_back(vs[ed.tgt], es[e], sheaf.from_tgt(e).orthonormal_matrix());
    }
    return QuiverSheaf<S>(q, std::move(vs), std::move(es), std::move(to_edge), std::move(from_tgt));
}

double laplacian_eigenvalue_bound(int n_edges, double r) {
    return static_cast<double>(n_edges) * (r + 1.0) * (r + 1.0);
}

#define QUIVLAP_INSTANTIATE(S)                                                           \
    template class QuiverRep<S>;                                                         \
    template class QuiverSheaf<S>;                                                       \
    template QuiverSheaf<S> rep_to_sheaf(const QuiverRep<S>&);                           \
    template QuiverRep<S> dual_rep(const QuiverRep<S>&);                                 \
    template InnerProductSpace<S> total_space(const QuiverSheaf<S>&);                    \
    template InnerProductSpace<S> target_space(const QuiverSheaf<S>&);                   \
    template LinearMap<S> boundary(const QuiverSheaf<S>&);                               \
    template Mat<S> laplacian_form(const QuiverSheaf<S>&);                               \
    template LinearMap<S> laplacian(const QuiverSheaf<S>&);                              \
    template double dirichlet_energy(const QuiverSheaf<S>&, const Vec<S>&);              \
    template EigenResult<S> laplacian_eigh(const QuiverSheaf<S>&, const EighOptions&);   \
    template RVec spectrum(const QuiverSheaf<S>&);                                       \
    template SpectralMeasure spectral_measure(const QuiverSheaf<S>&);                    \
    template SubspaceBasis<S> sections(const QuiverSheaf<S>&, double);                   \
    template Index section_dimension(const QuiverSheaf<S>&, double);                     \
    template EigenResult<S> approximate_sections(const QuiverSheaf<S>&, Index);          \
    template EigenResult<S> epsilon_sections(const QuiverSheaf<S>&, double);             \
    template QuiverSheaf<S> whiten(const QuiverSheaf<S>&);

QUIVLAP_INSTANTIATE(double)
QUIVLAP_INSTANTIATE(cdouble)

#undef QUIVLAP_INSTANTIATE

} // namespace quivlap
