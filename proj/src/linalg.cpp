#include "quivlap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace quivlap {

namespace {

template <Scalar S>
double max_abs(const Mat<S>& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

template <Scalar S>
S random_entry(std::mt19937_64& rng, std::normal_distribution<double>& nd) {
    if constexpr (std::is_same_v<S, double>) {
        return nd(rng);
    } else {
        double re = nd(rng);
        double im = nd(rng);
        return S(re, im);
    }
}

// Rotate each column so its largest-magnitude entry is real and positive.
template <Scalar S>
void fix_phase(Mat<S>& v) {
    for (Index j = 0; j < v.cols(); ++j) {
        Index arg = 0;
        double best = -1.0;
        for (Index i = 0; i < v.rows(); ++i) {
            double a = std::abs(v(i, j));
            if (a > best * (1.0 + 1e-9)) {
                best = a;
                arg = i;
            }
        }
        if (best <= 0.0) continue;
        S phase = v(arg, j) / best;
        v.col(j) /= phase;
    }
}

template <Scalar S>
void check_residuals(const Mat<S>& k, const Mat<S>* m, const EigenResult<S>& r, double tol) {
    double kn = k.norm();
    double mn = m ? m->norm() : std::sqrt(static_cast<double>(k.rows()));
    for (Index j = 0; j < r.values.size(); ++j) {
        Vec<S> x = r.vectors.col(j);
        Vec<S> res = k * x - (m ? Vec<S>(*m * x) : x) * S(r.values(j));
        double bound = tol * (kn + std::abs(r.values(j)) * mn);
        if (res.norm() > bound) {
            throw NumericalFailure("eigenpair residual " + std::to_string(res.norm()) +
                                   " exceeds " + std::to_string(bound));
        }
    }
}

template <Scalar S>
EigenResult<S> dense_eigh(const Mat<S>& k, const Mat<S>* m, Index count) {
    EigenResult<S> out;
    if (m) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat<S>> es(k, *m, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
        if (es.info() != Eigen::Success) throw NumericalFailure("generalized eigensolver failed");
        out.values = es.eigenvalues().head(count);
        out.vectors = es.eigenvectors().leftCols(count);
    } else {
        Eigen::SelfAdjointEigenSolver<Mat<S>> es(k);
        if (es.info() != Eigen::Success) throw NumericalFailure("eigensolver failed");
        out.values = es.eigenvalues().head(count);
        out.vectors = es.eigenvectors().leftCols(count);
    }
    return out;
}

// Shift-inverted block subspace iteration with Rayleigh-Ritz extraction.
// Block iteration handles eigenvalues of high multiplicity, which are common
// for Laplacians with large kernels.
template <Scalar S>
EigenResult<S> iterative_eigh(const Mat<S>& k, const Mat<S>* m, Index count, const EighOptions& opt) {
    const Index n = k.rows();
    const Index p = std::min(n, std::max<Index>(2 * count, count + 16));
    Mat<S> shifted = k;
    if (m) shifted += S(opt.shift) * *m;
    else shifted.diagonal().array() += S(opt.shift);
    Eigen::LLT<Mat<S>> llt(shifted);
    if (llt.info() != Eigen::Success) throw NumericalFailure("shifted operator is not positive definite");

    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> nd;
    Mat<S> x(n, p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < n; ++i) x(i, j) = random_entry<S>(rng, nd);

    const double kn = k.norm();
    const double mn = m ? m->norm() : std::sqrt(static_cast<double>(n));
    EigenResult<S> out;
    out.iterative = true;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        Mat<S> y = llt.solve(m ? Mat<S>(*m * x) : x);
        Mat<S> my = m ? Mat<S>(*m * y) : y;
        Mat<S> g = y.adjoint() * my;
        g = (g + g.adjoint()).eval() * S(0.5);
        Eigen::SelfAdjointEigenSolver<Mat<S>> ge(g);
        const RVec& gd = ge.eigenvalues();
        double gmax = gd.size() ? gd.maxCoeff() : 0.0;
        std::vector<Index> keep;
        for (Index j = 0; j < gd.size(); ++j)
            if (gd(j) > 1e-13 * gmax) keep.push_back(j);
        Mat<S> q(n, static_cast<Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j)
            q.col(static_cast<Index>(j)) = y * ge.eigenvectors().col(keep[j]) / S(std::sqrt(gd(keep[j])));
        if (q.cols() < count) {
            for (Index j = 0; j < p; ++j)
                for (Index i = 0; i < n; ++i) x(i, j) = random_entry<S>(rng, nd);
            continue;
        }
        Mat<S> h = q.adjoint() * k * q;
        h = (h + h.adjoint()).eval() * S(0.5);
        Eigen::SelfAdjointEigenSolver<Mat<S>> he(h);
        x = q * he.eigenvectors();
        bool done = true;
        for (Index j = 0; j < count && done; ++j) {
            double lam = he.eigenvalues()(j);
            Vec<S> xj = x.col(j);
            Vec<S> res = k * xj - (m ? Vec<S>(*m * xj) : xj) * S(lam);
            if (res.norm() > 0.1 * opt.residual_tol * (kn + std::abs(lam) * mn)) done = false;
        }
        if (done) {
            out.values = he.eigenvalues().head(count);
            out.vectors = x.leftCols(count);
            out.iterations = it;
            return out;
        }
        if (x.cols() < p) {
            Mat<S> wider(n, p);
            wider.leftCols(x.cols()) = x;
            for (Index j = x.cols(); j < p; ++j)
                for (Index i = 0; i < n; ++i) wider(i, j) = random_entry<S>(rng, nd);
            x = wider;
        }
    }
    throw NumericalFailure("subspace iteration did not converge in " + std::to_string(opt.max_iterations) +
                           " iterations");
}

} // namespace

// ---- InnerProductSpace ----

template <Scalar S>
InnerProductSpace<S>::InnerProductSpace() : d_(std::make_shared<Data>()) {}

template <Scalar S>
InnerProductSpace<S> InnerProductSpace<S>::euclidean(Index dim) {
    if (dim < 0) throw PreconditionViolation("negative dimension");
    auto d = std::make_shared<Data>();
    d->dim = dim;
    d->euclidean = true;
    d->gram = Mat<S>::Identity(dim, dim);
    d->whitener = Mat<S>::Identity(dim, dim);
    return InnerProductSpace(std::move(d));
}

template <Scalar S>
InnerProductSpace<S>::InnerProductSpace(Mat<S> gram) {
    if (gram.rows() != gram.cols()) throw DimensionMismatch("Gram matrix is not square");
    if (!is_hermitian(gram)) throw PreconditionViolation("Gram matrix is not Hermitian");
    auto d = std::make_shared<Data>();
    d->dim = gram.rows();
    d->euclidean = gram.isIdentity(0.0);
    gram = (gram + gram.adjoint()).eval() * S(0.5);
    if (d->euclidean) {
        d->whitener = Mat<S>::Identity(d->dim, d->dim);
    } else {
        Eigen::LLT<Mat<S>> llt(gram);
        if (llt.info() != Eigen::Success) throw PreconditionViolation("Gram matrix is not positive definite");
        d->whitener = llt.matrixU();
    }
    d->gram = std::move(gram);
    d_ = std::move(d);
}

template <Scalar S>
Mat<S> InnerProductSpace<S>::to_orthonormal(const Mat<S>& coords) const {
    if (coords.rows() != dim()) throw DimensionMismatch("coordinate rows do not match space dimension");
    if (is_euclidean()) return coords;
    return d_->whitener.template triangularView<Eigen::Upper>() * coords;
}

template <Scalar S>
Mat<S> InnerProductSpace<S>::from_orthonormal(const Mat<S>& coords) const {
    if (coords.rows() != dim()) throw DimensionMismatch("coordinate rows do not match space dimension");
    if (is_euclidean()) return coords;
    return d_->whitener.template triangularView<Eigen::Upper>().solve(coords);
}

template <Scalar S>
Mat<S> InnerProductSpace<S>::dual_to_orthonormal(const Mat<S>& coords) const {
    if (coords.rows() != dim()) throw DimensionMismatch("coordinate rows do not match space dimension");
    if (is_euclidean()) return coords;
    return d_->whitener.adjoint().template triangularView<Eigen::Lower>().solve(coords);
}

template <Scalar S>
S InnerProductSpace<S>::inner(const Vec<S>& a, const Vec<S>& b) const {
    if (a.size() != dim() || b.size() != dim()) throw DimensionMismatch("vector size does not match space");
    if (is_euclidean()) return a.dot(b);
    return a.dot(d_->gram * b);
}

template <Scalar S>
double InnerProductSpace<S>::norm(const Vec<S>& a) const {
    return std::sqrt(std::max(0.0, std::real(inner(a, a))));
}

template <Scalar S>
bool InnerProductSpace<S>::same_as(const InnerProductSpace& other, double tol) const {
    if (d_ == other.d_) return true;
    if (dim() != other.dim()) return false;
    if (is_euclidean() && other.is_euclidean()) return true;
    double scale = std::max(1.0, max_abs<S>(gram()));
    return max_abs<S>(Mat<S>(gram() - other.gram())) <= tol * scale;
}

// ---- LinearMap ----

template <Scalar S>
LinearMap<S>::LinearMap(InnerProductSpace<S> domain, InnerProductSpace<S> codomain, Mat<S> coeffs)
    : dom_(std::move(domain)), cod_(std::move(codomain)), a_(std::move(coeffs)) {
    if (a_.rows() != cod_.dim() || a_.cols() != dom_.dim())
        throw DimensionMismatch("map coefficients are " + std::to_string(a_.rows()) + "x" +
                                std::to_string(a_.cols()) + ", expected " + std::to_string(cod_.dim()) + "x" +
                                std::to_string(dom_.dim()));
}

template <Scalar S>
LinearMap<S> LinearMap<S>::identity(const InnerProductSpace<S>& space) {
    return LinearMap(space, space, Mat<S>::Identity(space.dim(), space.dim()));
}

template <Scalar S>
LinearMap<S> LinearMap<S>::zero(const InnerProductSpace<S>& domain, const InnerProductSpace<S>& codomain) {
    return LinearMap(domain, codomain, Mat<S>::Zero(codomain.dim(), domain.dim()));
}

template <Scalar S>
LinearMap<S> LinearMap<S>::adjoint() const {
    Mat<S> ah = a_.adjoint();
    if (!cod_.is_euclidean()) ah = ah * cod_.gram();
    if (!dom_.is_euclidean()) ah = dom_.from_orthonormal(dom_.dual_to_orthonormal(ah));
    return LinearMap(cod_, dom_, std::move(ah));
}

template <Scalar S>
Mat<S> LinearMap<S>::orthonormal_matrix() const {
    Mat<S> x = cod_.to_orthonormal(a_);
    if (dom_.is_euclidean()) return x;
    Mat<S> xh = x.adjoint();
    return dom_.dual_to_orthonormal(xh).adjoint();
}

template <Scalar S>
LinearMap<S> LinearMap<S>::operator+(const LinearMap& other) const {
    if (!dom_.same_as(other.dom_) || !cod_.same_as(other.cod_)) throw DimensionMismatch("sum of maps between different spaces");
    return LinearMap(dom_, cod_, a_ + other.a_);
}

template <Scalar S>
LinearMap<S> LinearMap<S>::operator-(const LinearMap& other) const {
    if (!dom_.same_as(other.dom_) || !cod_.same_as(other.cod_)) throw DimensionMismatch("difference of maps between different spaces");
    return LinearMap(dom_, cod_, a_ - other.a_);
}

template <Scalar S>
LinearMap<S> LinearMap<S>::scaled(S factor) const {
    return LinearMap(dom_, cod_, a_ * factor);
}

template <Scalar S>
LinearMap<S> operator*(const LinearMap<S>& a, const LinearMap<S>& b) {
    if (!a.domain().same_as(b.codomain())) throw DimensionMismatch("composition of incompatible maps");
    return LinearMap<S>(b.domain(), a.codomain(), a.coeffs() * b.coeffs());
}

// ---- singular values ----

template <Scalar S>
RVec singular_values(const LinearMap<S>& map) {
    Mat<S> t = map.orthonormal_matrix();
    if (t.size() == 0) return RVec();
    Eigen::BDCSVD<Mat<S>> svd(t);
    return svd.singularValues();
}

template <Scalar S>
SingularSummary singular_summary(const LinearMap<S>& map, double tol) {
    SingularSummary s;
    RVec sv = singular_values(map);
    s.sigma_max = sv.size() ? sv(0) : 0.0;
    if (s.sigma_max > 0.0) {
        double thr = tol * s.sigma_max;
        for (Index i = 0; i < sv.size(); ++i)
            if (sv(i) > thr) ++s.rank;
        s.sigma_min_nonzero = sv(s.rank - 1);
    }
    s.nullity = map.domain().dim() - s.rank;
    s.corank = map.codomain().dim() - s.rank;
    return s;
}

template <Scalar S>
double operator_norm(const LinearMap<S>& map) {
    RVec sv = singular_values(map);
    return sv.size() ? sv(0) : 0.0;
}

template <Scalar S>
double condition_number(const LinearMap<S>& map, double tol) {
    SingularSummary s = singular_summary(map, tol);
    if (s.rank == 0) return 0.0;
    return s.sigma_max / s.sigma_min_nonzero;
}

template <Scalar S>
Mat<S> pseudoinverse(const Mat<S>& a, double tol) {
    if (a.size() == 0) return Mat<S>::Zero(a.cols(), a.rows());
    Eigen::BDCSVD<Mat<S>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& sv = svd.singularValues();
    double thr = tol * (sv.size() ? sv(0) : 0.0);
    Mat<S> out = Mat<S>::Zero(a.cols(), a.rows());
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) <= thr || sv(i) == 0.0) break;
        out += svd.matrixV().col(i) * (svd.matrixU().col(i).adjoint() / S(sv(i)));
    }
    return out;
}

template <Scalar S>
LinearMap<S> pseudoinverse(const LinearMap<S>& map, double tol) {
    Mat<S> p = pseudoinverse<S>(map.orthonormal_matrix(), tol);
    Mat<S> c = map.domain().from_orthonormal(p);
    if (!map.codomain().is_euclidean()) c = c * map.codomain().whitener();
    return LinearMap<S>(map.codomain(), map.domain(), std::move(c));
}

// ---- subspaces ----

template <Scalar S>
SubspaceBasis<S>::SubspaceBasis(InnerProductSpace<S> ambient, Mat<S> basis)
    : ambient_(std::move(ambient)), basis_(std::move(basis)) {
    if (basis_.rows() != ambient_.dim()) throw DimensionMismatch("basis rows do not match ambient dimension");
    if (basis_.cols() > basis_.rows()) throw PreconditionViolation("more basis vectors than ambient dimension");
    if (basis_.cols() > 0) {
        Mat<S> w = ambient_.to_orthonormal(basis_);
        Eigen::BDCSVD<Mat<S>> svd(w);
        const RVec& sv = svd.singularValues();
        if (sv(0) == 0.0 || sv(sv.size() - 1) <= 1e-10 * sv(0))
            throw PreconditionViolation("basis columns are linearly dependent");
        Mat<S> g = w.adjoint() * w;
        space_ = InnerProductSpace<S>(Mat<S>((g + g.adjoint()) * S(0.5)));
    } else {
        space_ = InnerProductSpace<S>::euclidean(0);
    }
}

template <Scalar S>
Mat<S> SubspaceBasis<S>::orthonormal_basis() const {
    if (dim() == 0) return basis_;
    Mat<S> bh = basis_.adjoint();
    return space_.dual_to_orthonormal(bh).adjoint();
}

template <Scalar S>
LinearMap<S> inclusion(const SubspaceBasis<S>& sub) {
    return LinearMap<S>(sub.space(), sub.ambient(), sub.basis());
}

template <Scalar S>
LinearMap<S> orthogonal_projection(const SubspaceBasis<S>& sub) {
    return inclusion(sub).adjoint();
}

// ---- eigensolvers ----

template <Scalar S>
bool is_hermitian(const Mat<S>& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    if (a.size() == 0) return true;
    double scale = max_abs<S>(a);
    return max_abs<S>(Mat<S>(a - a.adjoint())) <= rel_tol * std::max(scale, 1e-300);
}

template <Scalar S>
EigenResult<S> hermitian_eigh(const Mat<S>& k_in, const Mat<S>& m_in, const EighOptions& opt) {
    if (k_in.rows() != k_in.cols()) throw DimensionMismatch("eigenproblem matrix is not square");
    const bool has_m = m_in.size() > 0;
    if (has_m && (m_in.rows() != k_in.rows() || m_in.cols() != k_in.cols()))
        throw DimensionMismatch("mass matrix does not match operator");
    if (!is_hermitian(k_in)) throw PreconditionViolation("operator is not Hermitian");
    if (has_m && !is_hermitian(m_in)) throw PreconditionViolation("mass matrix is not Hermitian");
    const Index n = k_in.rows();
    EigenResult<S> out;
    if (n == 0) {
        out.values = RVec();
        out.vectors = Mat<S>(0, 0);
        return out;
    }
    Mat<S> k = (k_in + k_in.adjoint()) * S(0.5);
    Mat<S> m;
    if (has_m) m = (m_in + m_in.adjoint()) * S(0.5);
    const Mat<S>* mp = has_m ? &m : nullptr;
    Index count = (opt.count < 0 || opt.count > n) ? n : opt.count;
    if (count == 0) {
        out.values = RVec();
        out.vectors = Mat<S>(n, 0);
        return out;
    }
    if (n >= opt.dense_limit && 3 * count <= n) {
        out = iterative_eigh(k, mp, count, opt);
    } else {
        if (has_m) {
            Eigen::LLT<Mat<S>> check(m);
            if (check.info() != Eigen::Success) throw PreconditionViolation("mass matrix is not positive definite");
        }
        out = dense_eigh(k, mp, count);
    }
    fix_phase(out.vectors);
    check_residuals(k, mp, out, opt.residual_tol);
    return out;
}

template <Scalar S>
EigenResult<S> hermitian_eigh(const Mat<S>& k, const EighOptions& opt) {
    return hermitian_eigh<S>(k, Mat<S>(), opt);
}

template <Scalar S>
EigenResult<S> hermitian_eigh(const LinearMap<S>& endo, const EighOptions& opt) {
    if (!endo.domain().same_as(endo.codomain())) throw DimensionMismatch("eigenproblem needs an endomorphism");
    const auto& sp = endo.domain();
    if (sp.is_euclidean()) return hermitian_eigh<S>(endo.coeffs(), opt);
    Mat<S> form = sp.gram() * endo.coeffs();
    return hermitian_eigh<S>(form, sp.gram(), opt);
}

// ---- principal angles ----

template <Scalar S>
RVec principal_angles(const SubspaceBasis<S>& a, const SubspaceBasis<S>& b) {
    if (!a.ambient().same_as(b.ambient())) throw DimensionMismatch("subspaces live in different ambient spaces");
    if (a.dim() == 0 && b.dim() == 0) return RVec();
    if (a.dim() == 0 || b.dim() == 0)
        throw PreconditionViolation("principal angles between a zero and a nonzero subspace are undefined");
    Mat<S> u1 = a.ambient().to_orthonormal(a.orthonormal_basis());
    Mat<S> u2 = b.ambient().to_orthonormal(b.orthonormal_basis());
    if (u1.cols() < u2.cols()) std::swap(u1, u2);
    const Index r = u2.cols();
    Mat<S> c = u1.adjoint() * u2;
    Eigen::BDCSVD<Mat<S>> cs(c);
    RVec cosv = cs.singularValues();           // descending
    Mat<S> resid = u2 - u1 * c;
    Eigen::BDCSVD<Mat<S>> ss(resid);
    RVec sinv = ss.singularValues().reverse(); // ascending
    RVec theta(r);
    for (Index i = 0; i < r; ++i) {
        double co = std::min(1.0, cosv(i));
        double si = std::min(1.0, sinv(i));
        theta(i) = (co * co >= 0.5) ? std::asin(si) : std::acos(co);
    }
    std::sort(theta.data(), theta.data() + r);
    return theta;
}

template <Scalar S>
double grassmann_distance(const SubspaceBasis<S>& a, const SubspaceBasis<S>& b) {
    RVec t = principal_angles(a, b);
    return t.size() ? t.norm() : 0.0;
}

template <Scalar S>
double max_angle_sine(const SubspaceBasis<S>& a, const SubspaceBasis<S>& b) {
    RVec t = principal_angles(a, b);
    return t.size() ? std::sin(t(t.size() - 1)) : 0.0;
}

// ---- spectral measures ----

SpectralMeasure::SpectralMeasure(std::vector<double> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end());
}

SpectralMeasure::SpectralMeasure(const RVec& atoms)
    : SpectralMeasure(std::vector<double>(atoms.data(), atoms.data() + atoms.size())) {}

double wasserstein1(const SpectralMeasure& a, const SpectralMeasure& b) {
    if (a.size() == 0 || b.size() == 0) throw PreconditionViolation("Wasserstein distance needs nonempty measures");
    const auto& x = a.atoms();
    const auto& y = b.atoms();
    const double na = static_cast<double>(x.size());
    const double nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double prev = std::min(x.front(), y.front());
    double total = 0.0;
    while (i < x.size() || j < y.size()) {
        double next;
        if (j >= y.size() || (i < x.size() && x[i] <= y[j])) next = x[i];
        else next = y[j];
        total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (next - prev);
        while (i < x.size() && x[i] == next) ++i;
        while (j < y.size() && y[j] == next) ++j;
        prev = next;
    }
    return total;
}

// ---- helpers ----

template <Scalar S>
Mat<S> block_diagonal(const std::vector<Mat<S>>& blocks) {
    Index r = 0, c = 0;
    for (const auto& b : blocks) {
        r += b.rows();
        c += b.cols();
    }
    Mat<S> out = Mat<S>::Zero(r, c);
    r = c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

template <Scalar S>
InnerProductSpace<S> direct_sum(const std::vector<InnerProductSpace<S>>& spaces) {
    Index total = 0;
    bool eu = true;
    for (const auto& s : spaces) {
        total += s.dim();
        eu = eu && s.is_euclidean();
    }
    if (eu) return InnerProductSpace<S>::euclidean(total);
    std::vector<Mat<S>> grams;
    grams.reserve(spaces.size());
    for (const auto& s : spaces) grams.push_back(s.gram());
    return InnerProductSpace<S>(block_diagonal(grams));
}

template <Scalar S>
Mat<S> psd_sqrt(const Mat<S>& a, double clamp) {
    if (a.size() == 0) return a;
    if (!is_hermitian(a)) throw PreconditionViolation("square root of a non-Hermitian matrix");
    Eigen::SelfAdjointEigenSolver<Mat<S>> es(Mat<S>((a + a.adjoint()) * S(0.5)));
    RVec d = es.eigenvalues();
    double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
    for (Index i = 0; i < d.size(); ++i) {
        if (d(i) < clamp * scale) throw PreconditionViolation("matrix is not positive semidefinite");
        d(i) = d(i) <= 1e-13 * scale ? 0.0 : std::sqrt(d(i));
    }
    return es.eigenvectors() * d.template cast<S>().asDiagonal() * es.eigenvectors().adjoint();
}

// ---- explicit instantiations ----

#define QUIVLAP_INSTANTIATE(S)                                                                  \
    template class InnerProductSpace<S>;                                                        \
    template class LinearMap<S>;                                                                \
    template class SubspaceBasis<S>;                                                            \
    template LinearMap<S> operator*(const LinearMap<S>&, const LinearMap<S>&);                  \
    template RVec singular_values(const LinearMap<S>&);                                         \
    template SingularSummary singular_summary(const LinearMap<S>&, double);                     \
    template double operator_norm(const LinearMap<S>&);                                         \
    template double condition_number(const LinearMap<S>&, double);                              \
    template Mat<S> pseudoinverse(const Mat<S>&, double);                                       \
    template LinearMap<S> pseudoinverse(const LinearMap<S>&, double);                           \
    template LinearMap<S> inclusion(const SubspaceBasis<S>&);                                   \
    template LinearMap<S> orthogonal_projection(const SubspaceBasis<S>&);                       \
    template bool is_hermitian(const Mat<S>&, double);                                          \
    template EigenResult<S> hermitian_eigh(const Mat<S>&, const Mat<S>&, const EighOptions&);   \
    template EigenResult<S> hermitian_eigh(const Mat<S>&, const EighOptions&);                  \
    template EigenResult<S> hermitian_eigh(const LinearMap<S>&, const EighOptions&);            \
    template RVec principal_angles(const SubspaceBasis<S>&, const SubspaceBasis<S>&);           \
    template double grassmann_distance(const SubspaceBasis<S>&, const SubspaceBasis<S>&);       \
    template double max_angle_sine(const SubspaceBasis<S>&, const SubspaceBasis<S>&);          \
    template Mat<S> block_diagonal(const std::vector<Mat<S>>&);                                 \
    template InnerProductSpace<S> direct_sum(const std::vector<InnerProductSpace<S>>&);         \
    template Mat<S> psd_sqrt(const Mat<S>&, double);

QUIVLAP_INSTANTIATE(double)
QUIVLAP_INSTANTIATE(cdouble)

#undef QUIVLAP_INSTANTIATE

} // namespace quivlap
