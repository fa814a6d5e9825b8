#include "quivlap/stability.hpp"

#include <cmath>
#include <limits>

namespace quivlap {

template <Scalar S>
Transformation<S>::Transformation(QuiverRep<S> source, QuiverRep<S> target, std::vector<LinearMap<S>> maps)
    : source_(std::move(source)), target_(std::move(target)), maps_(std::move(maps)) {
    const Quiver& a = source_.quiver();
    const Quiver& b = target_.quiver();
    if (a.n_vertices() != b.n_vertices() || a.n_edges() != b.n_edges())
        throw DimensionMismatch("transformation between representations of different quivers");
    for (int e = 0; e < a.n_edges(); ++e)
        if (a.edge(e).src != b.edge(e).src || a.edge(e).tgt != b.edge(e).tgt)
            throw DimensionMismatch("transformation between representations of different quivers");
    if (static_cast<int>(maps_.size()) != a.n_vertices())
        throw DimensionMismatch("transformation needs one map per vertex");
    for (int v = 0; v < a.n_vertices(); ++v)
        if (!maps_[v].domain().same_as(source_.space(v)) || !maps_[v].codomain().same_as(target_.space(v)))
            throw DimensionMismatch("transformation component does not match vertex spaces");
}

template <Scalar S>
Transformation<S> Transformation<S>::adjoint() const {
    std::vector<LinearMap<S>> adj;
    for (const auto& m : maps_) adj.push_back(m.adjoint());
    return Transformation(target_, source_, std::move(adj));
}

template <Scalar S>
LinearMap<S> Transformation<S>::total_map() const {
    std::vector<Mat<S>> blocks;
    for (const auto& m : maps_) blocks.push_back(m.coeffs());
    return LinearMap<S>(direct_sum(source_.spaces()), direct_sum(target_.spaces()), block_diagonal(blocks));
}

template <Scalar S>
DefectReport defect(const Transformation<S>& t) {
    DefectReport r;
    const Quiver& q = t.source().quiver();
    double sq = 0.0;
    for (int e = 0; e < q.n_edges(); ++e) {
        const Edge& ed = q.edge(e);
        LinearMap<S> d = t.target().map(e) * t.map(ed.src) - t.map(ed.tgt) * t.source().map(e);
        double v = operator_norm(d);
        r.per_edge.push_back(v);
        sq += v * v;
    }
    r.total = std::sqrt(sq);
    return r;
}

double transfer_bound_value(double kappa, double pinv_norm, double defect, double lambda) {
    lambda = std::max(0.0, lambda);
    double dp = defect * pinv_norm;
    return kappa * kappa * lambda + dp * (2.0 * kappa * std::sqrt(lambda) + dp);
}

Index TransferReport::violations(double tol) const {
    Index bad = 0;
    for (std::size_t k = 0; k < bounds.size(); ++k) {
        double lhs = target_eigs(static_cast<Index>(k));
        if (lhs > bounds[k] + tol * std::max(1.0, bounds[k])) ++bad;
    }
    return bad;
}

template <Scalar S>
TransferReport eigenvalue_transfer(const Transformation<S>& t, double tol) {
    TransferReport r;
    r.source_eigs = spectrum(rep_to_sheaf(t.source()));
    r.target_eigs = spectrum(rep_to_sheaf(t.target()));
    SingularSummary s = singular_summary(t.total_map(), tol);
    r.nullity = s.nullity;
    r.kappa = s.rank ? s.sigma_max / s.sigma_min_nonzero : 0.0;
    r.pinv_norm = s.rank ? 1.0 / s.sigma_min_nonzero : 0.0;
    r.defect = defect(t).total;
    const Index n = r.source_eigs.size();
    for (Index k = 1; k <= n - r.nullity; ++k) {
        double lam = r.source_eigs(k + r.nullity - 1);
        r.bounds.push_back(transfer_bound_value(r.kappa, r.pinv_norm, r.defect, lam));
        r.morphism_bounds.push_back(r.kappa * r.kappa * std::max(0.0, lam));
    }
    return r;
}

CouplingReport eigenvalue_coupling(const RVec& source_eigs, const RVec& target_eigs, Index lower, Index upper,
                                   bool verbatim) {
    const Index n = source_eigs.size();
    const Index m = target_eigs.size();
    if (n < m) throw PreconditionViolation("coupling expects the source to be at least as large as the target");
    if (lower < 0 || upper < lower || upper > m) throw PreconditionViolation("coupling index range is invalid");
    const Index c = lower + (n - upper);
    CouplingReport out;
    out.weights = Eigen::MatrixXd::Zero(n, m);
    auto outer_row = [&](Index i) { return i < lower || i >= upper; };
    auto outer_col = [&](Index j) { return j < lower || j >= upper; };
    const double inv_n = 1.0 / static_cast<double>(n);
    const double inv_m = 1.0 / static_cast<double>(m);
    const double denom = verbatim ? static_cast<double>(n - c) : static_cast<double>(c);
    const double p2 = inv_m / denom;
    const double p3 = (inv_m - inv_n) / denom;
    for (Index i = 0; i < n; ++i) {
        if (!outer_row(i)) {
            out.weights(i, i) = inv_n;
            continue;
        }
        for (Index j = 0; j < m; ++j) out.weights(i, j) = outer_col(j) ? p2 : p3;
    }
    if (!out.weights.allFinite()) {
        out.valid = false;
        out.cost = std::numeric_limits<double>::quiet_NaN();
        out.max_marginal_error = std::numeric_limits<double>::infinity();
        return out;
    }
    double err = 0.0;
    for (Index i = 0; i < n; ++i) err = std::max(err, std::abs(out.weights.row(i).sum() - inv_n));
    for (Index j = 0; j < m; ++j) err = std::max(err, std::abs(out.weights.col(j).sum() - inv_m));
    out.max_marginal_error = err;
    out.valid = err <= 1e-12 && out.weights.minCoeff() >= 0.0;
    double cost = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j)
            if (out.weights(i, j) != 0.0) cost += out.weights(i, j) * std::abs(source_eigs(i) - target_eigs(j));
    out.cost = cost;
    return out;
}

double distance_bound_value(Index n, Index c, double kappa, double pinv_norm, double defect, double adjoint_defect,
                            double radius) {
    const double nn = static_cast<double>(n);
    const double cc = static_cast<double>(c);
    const double k2 = kappa * kappa;
    const double sr = std::sqrt(radius);
    double a = 2.0 / kappa * pinv_norm * adjoint_defect * sr + pinv_norm * pinv_norm * adjoint_defect * adjoint_defect / k2;
    double b = 2.0 * kappa * pinv_norm * defect * sr + pinv_norm * pinv_norm * defect * defect;
    return (cc * k2 * radius + (nn - 2.0 * cc) * (k2 - 1.0 / k2) * radius + (nn - cc) * (a + b) + cc * radius) / nn;
}

template <Scalar S>
DistanceReport spectral_distance_bound(const Transformation<S>& t_in, double r, double tol) {
    DistanceReport out;
    const bool swap = t_in.source().total_dim() < t_in.target().total_dim();
    const Transformation<S> t = swap ? t_in.adjoint() : t_in;
    out.swapped = swap;
    out.n = t.source().total_dim();
    out.m = t.target().total_dim();
    if (out.m == 0) throw PreconditionViolation("spectral distance needs nonzero representations");

    double rmax = std::max(t.source().max_map_norm(), t.target().max_map_norm());
    if (r < 0.0) r = rmax;
    if (r < rmax * (1.0 - 1e-12)) throw PreconditionViolation("radius is smaller than an edge map norm");
    out.r = r;
    out.radius = laplacian_eigenvalue_bound(t.source().quiver().n_edges(), r);

    SingularSummary s = singular_summary(t.total_map(), tol);
    if (s.rank == 0) throw PreconditionViolation("transformation is zero");
    out.nullity = s.nullity;
    out.adjoint_nullity = s.corank;
    if (s.rank < out.adjoint_nullity) throw PreconditionViolation("rank is smaller than the nullity of the adjoint");
    out.c = out.nullity + out.adjoint_nullity;
    out.kappa = s.sigma_max / s.sigma_min_nonzero;
    out.pinv_norm = 1.0 / s.sigma_min_nonzero;
    out.defect = defect(t).total;
    out.adjoint_defect = defect(t.adjoint()).total;

    const double k2 = out.kappa * out.kappa;
    const double sr = std::sqrt(out.radius);
    out.a = 2.0 / out.kappa * out.pinv_norm * out.adjoint_defect * sr +
            out.pinv_norm * out.pinv_norm * out.adjoint_defect * out.adjoint_defect / k2;
    out.b = 2.0 * out.kappa * out.pinv_norm * out.defect * sr + out.pinv_norm * out.pinv_norm * out.defect * out.defect;
    out.bound = distance_bound_value(out.n, out.c, out.kappa, out.pinv_norm, out.defect, out.adjoint_defect, out.radius);

    RVec ls = spectrum(rep_to_sheaf(t.source()));
    RVec lt = spectrum(rep_to_sheaf(t.target()));
    out.w1 = wasserstein1(SpectralMeasure(ls), SpectralMeasure(lt));
    const Index lower = out.adjoint_nullity;
    const Index upper = out.n - out.nullity;
    CouplingReport verb = eigenvalue_coupling(ls, lt, lower, upper, true);
    out.verbatim_coupling_valid = verb.valid;
    out.verbatim_coupling_cost = verb.cost;
    CouplingReport fixed = eigenvalue_coupling(ls, lt, lower, upper, false);
    out.coupling_valid = fixed.valid;
    out.coupling_cost = fixed.cost;
    if (!fixed.valid) throw ConsistencyError("eigenvalue coupling failed its marginal check");
    return out;
}

double selector_stability_bound(double eps, Index c, Index n, int n_edges) {
    if (!(eps >= 0.0) || eps >= M_PI / 2) throw PreconditionViolation("selector angle must lie in [0, pi/2)");
    if (n <= 0) throw PreconditionViolation("selector bound needs a positive dimension");
    const double co = std::cos(eps);
    const double se = 1.0 / co;
    const double ta = std::tan(eps);
    const double nn = static_cast<double>(n);
    const double cc = static_cast<double>(c);
    double outer = (1.0 + co * co) * cc;
    double inner = (2.0 * se * ta + (1.0 + se * se) * ta * ta + se * se - co * co) * (nn - cc);
    return 4.0 * n_edges / nn * (outer + inner);
}

#define QUIVLAP_INSTANTIATE(S)                                                             \
    template class Transformation<S>;                                                      \
    template DefectReport defect(const Transformation<S>&);                                \
    template TransferReport eigenvalue_transfer(const Transformation<S>&, double);         \
    template DistanceReport spectral_distance_bound(const Transformation<S>&, double, double);

QUIVLAP_INSTANTIATE(double)
QUIVLAP_INSTANTIATE(cdouble)

#undef QUIVLAP_INSTANTIATE

} // namespace quivlap
