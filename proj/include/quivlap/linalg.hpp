#pragma once

#include <complex>
#include <concepts>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "quivlap/errors.hpp"

namespace quivlap {

using Index = Eigen::Index;
using cdouble = std::complex<double>;

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, cdouble>;

template <Scalar S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <Scalar S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
using RVec = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-8;

// Finite-dimensional space with a Hermitian positive-definite Gram matrix.
// Copies share one immutable payload, including the cached Cholesky factor.
template <Scalar S>
class InnerProductSpace {
public:
    InnerProductSpace();
    explicit InnerProductSpace(Mat<S> gram);
    static InnerProductSpace euclidean(Index dim);

    Index dim() const { return d_->dim; }
    bool is_euclidean() const { return d_->euclidean; }
    const Mat<S>& gram() const { return d_->gram; }
    // Upper-triangular W with gram = W^H W.
    const Mat<S>& whitener() const { return d_->whitener; }

    Mat<S> to_orthonormal(const Mat<S>& coords) const;
    Mat<S> from_orthonormal(const Mat<S>& coords) const;
    // W^{-H} applied on the left; maps dual coordinates to orthonormal ones.
    Mat<S> dual_to_orthonormal(const Mat<S>& coords) const;

    S inner(const Vec<S>& a, const Vec<S>& b) const;
    double norm(const Vec<S>& a) const;

    bool same_as(const InnerProductSpace& other, double tol = 1e-12) const;

private:
    struct Data {
        Index dim = 0;
        bool euclidean = true;
        Mat<S> gram;
        Mat<S> whitener;
    };
    explicit InnerProductSpace(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
    std::shared_ptr<const Data> d_;
};

template <Scalar S>
class LinearMap {
public:
    LinearMap() = default;
    LinearMap(InnerProductSpace<S> domain, InnerProductSpace<S> codomain, Mat<S> coeffs);
    static LinearMap identity(const InnerProductSpace<S>& space);
    static LinearMap zero(const InnerProductSpace<S>& domain, const InnerProductSpace<S>& codomain);

    const InnerProductSpace<S>& domain() const { return dom_; }
    const InnerProductSpace<S>& codomain() const { return cod_; }
    const Mat<S>& coeffs() const { return a_; }

    // Adjoint with respect to both Gram matrices: G_dom^{-1} A^H G_cod.
    LinearMap adjoint() const;
    // Coefficients in orthonormal coordinates of both spaces.
    Mat<S> orthonormal_matrix() const;
    Vec<S> apply(const Vec<S>& x) const { return a_ * x; }

    LinearMap operator+(const LinearMap& other) const;
    LinearMap operator-(const LinearMap& other) const;
    LinearMap scaled(S factor) const;

private:
    InnerProductSpace<S> dom_;
    InnerProductSpace<S> cod_;
    Mat<S> a_;
};

// Composition a∘b; requires b.codomain() == a.domain().
template <Scalar S>
LinearMap<S> operator*(const LinearMap<S>& a, const LinearMap<S>& b);

struct SingularSummary {
    double sigma_max = 0.0;
    double sigma_min_nonzero = 0.0; // 0 when the map is zero
    Index rank = 0;
    Index nullity = 0;   // dim domain - rank
    Index corank = 0;    // dim codomain - rank
};

template <Scalar S>
RVec singular_values(const LinearMap<S>& map);
// Rank threshold: tol * sigma_max.
template <Scalar S>
SingularSummary singular_summary(const LinearMap<S>& map, double tol = kDefaultTol);
template <Scalar S>
double operator_norm(const LinearMap<S>& map);
template <Scalar S>
double condition_number(const LinearMap<S>& map, double tol = kDefaultTol);

template <Scalar S>
Mat<S> pseudoinverse(const Mat<S>& a, double tol = kDefaultTol);
// Moore-Penrose inverse relative to the Gram matrices of both spaces.
template <Scalar S>
LinearMap<S> pseudoinverse(const LinearMap<S>& map, double tol = kDefaultTol);

// Linearly independent columns spanning a subspace of an ambient space.
template <Scalar S>
class SubspaceBasis {
public:
    SubspaceBasis() = default;
    SubspaceBasis(InnerProductSpace<S> ambient, Mat<S> basis);

    const InnerProductSpace<S>& ambient() const { return ambient_; }
    const Mat<S>& basis() const { return basis_; }
    Index dim() const { return basis_.cols(); }
    // The subspace in its own coordinates, with the pulled-back Gram B^H M B.
    const InnerProductSpace<S>& space() const { return space_; }
    // Columns orthonormal in the ambient inner product, spanning the same subspace.
    Mat<S> orthonormal_basis() const;

private:
    InnerProductSpace<S> ambient_;
    Mat<S> basis_;
    InnerProductSpace<S> space_;
};

template <Scalar S>
LinearMap<S> inclusion(const SubspaceBasis<S>& sub);
// Orthogonal projection from the ambient space onto the subspace coordinates:
// (B^H M B)^{-1} B^H M.
template <Scalar S>
LinearMap<S> orthogonal_projection(const SubspaceBasis<S>& sub);

template <Scalar S>
struct EigenResult {
    RVec values;   // ascending
    Mat<S> vectors; // columns normalized in the M inner product
    bool iterative = false;
    int iterations = 0;
};

struct EighOptions {
    Index count = -1;          // number of smallest eigenpairs, -1 for all
    Index dense_limit = 512;   // at or above this dimension, iterate when count is small
    double shift = 1e-6;
    double residual_tol = kDefaultTol;
    int max_iterations = 2000;
};

// Solves K x = lambda M x for Hermitian K and Hermitian positive-definite M.
// An empty M means the identity.
template <Scalar S>
EigenResult<S> hermitian_eigh(const Mat<S>& k, const Mat<S>& m, const EighOptions& opt = {});
template <Scalar S>
EigenResult<S> hermitian_eigh(const Mat<S>& k, const EighOptions& opt = {});
// Self-adjoint endomorphism of an inner product space.
template <Scalar S>
EigenResult<S> hermitian_eigh(const LinearMap<S>& endo, const EighOptions& opt = {});

template <Scalar S>
bool is_hermitian(const Mat<S>& a, double rel_tol = 1e-10);

// Principal angles in ascending order; both subspaces must share the ambient space.
template <Scalar S>
RVec principal_angles(const SubspaceBasis<S>& a, const SubspaceBasis<S>& b);
template <Scalar S>
double grassmann_distance(const SubspaceBasis<S>& a, const SubspaceBasis<S>& b);
template <Scalar S>
double max_angle_sine(const SubspaceBasis<S>& a, const SubspaceBasis<S>& b);

// Uniform empirical measure on a multiset of reals.
class SpectralMeasure {
public:
    SpectralMeasure() = default;
    explicit SpectralMeasure(std::vector<double> atoms);
    explicit SpectralMeasure(const RVec& atoms);
    const std::vector<double>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

private:
    std::vector<double> atoms_;
};

double wasserstein1(const SpectralMeasure& a, const SpectralMeasure& b);

// Helpers shared by the modules.
template <Scalar S>
Mat<S> block_diagonal(const std::vector<Mat<S>>& blocks);
template <Scalar S>
InnerProductSpace<S> direct_sum(const std::vector<InnerProductSpace<S>>& spaces);
// Eigenvalues within 1e-13 of zero, relative to the largest, are treated as zero.
template <Scalar S>
Mat<S> psd_sqrt(const Mat<S>& a, double clamp = -1e-10);

} // namespace quivlap
