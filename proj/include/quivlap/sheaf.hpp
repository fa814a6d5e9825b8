#pragma once

#include <vector>

#include "quivlap/linalg.hpp"
#include "quivlap/quiver.hpp"

namespace quivlap {

template <Scalar S>
class QuiverRep {
public:
    QuiverRep() = default;
    QuiverRep(Quiver quiver, std::vector<InnerProductSpace<S>> spaces, std::vector<LinearMap<S>> maps);

    const Quiver& quiver() const { return quiver_; }
    const InnerProductSpace<S>& space(int v) const { return spaces_.at(static_cast<std::size_t>(v)); }
    const LinearMap<S>& map(int e) const { return maps_.at(static_cast<std::size_t>(e)); }
    const std::vector<InnerProductSpace<S>>& spaces() const { return spaces_; }
    const std::vector<LinearMap<S>>& maps() const { return maps_; }
    Index total_dim() const;
    // Largest operator norm of an edge map.
    double max_map_norm() const;

private:
    Quiver quiver_;
    std::vector<InnerProductSpace<S>> spaces_;
    std::vector<LinearMap<S>> maps_;
};

// Each edge e carries a space and two maps into it, one from each endpoint.
template <Scalar S>
class QuiverSheaf {
public:
    QuiverSheaf() = default;
    QuiverSheaf(Quiver quiver, std::vector<InnerProductSpace<S>> vertex_spaces,
                std::vector<InnerProductSpace<S>> edge_spaces, std::vector<LinearMap<S>> to_edge,
                std::vector<LinearMap<S>> from_tgt);

    const Quiver& quiver() const { return quiver_; }
    const InnerProductSpace<S>& vertex_space(int v) const { return vspaces_.at(static_cast<std::size_t>(v)); }
    const InnerProductSpace<S>& edge_space(int e) const { return espaces_.at(static_cast<std::size_t>(e)); }
    // Source-side map A_{s(e)} -> A_e.
    const LinearMap<S>& to_edge(int e) const { return to_edge_.at(static_cast<std::size_t>(e)); }
    // Target-side map A_{t(e)} -> A_e.
    const LinearMap<S>& from_tgt(int e) const { return from_tgt_.at(static_cast<std::size_t>(e)); }
    // Map from endpoint v of a non-loop edge e into A_e.
    const LinearMap<S>& endpoint_map(int e, int v) const;

    const std::vector<InnerProductSpace<S>>& vertex_spaces() const { return vspaces_; }
    const std::vector<InnerProductSpace<S>>& edge_spaces() const { return espaces_; }

    Index total_dim() const { return voff_.back(); }
    Index target_dim() const { return eoff_.back(); }
    Index vertex_offset(int v) const { return voff_.at(static_cast<std::size_t>(v)); }
    Index edge_offset(int e) const { return eoff_.at(static_cast<std::size_t>(e)); }
    bool is_euclidean() const;

private:
    Quiver quiver_;
    std::vector<InnerProductSpace<S>> vspaces_;
    std::vector<InnerProductSpace<S>> espaces_;
    std::vector<LinearMap<S>> to_edge_;
    std::vector<LinearMap<S>> from_tgt_;
    std::vector<Index> voff_{0};
    std::vector<Index> eoff_{0};
};

// Edge space is the target vertex space, with A_e on the source side and the
// identity on the target side.
template <Scalar S>
QuiverSheaf<S> rep_to_sheaf(const QuiverRep<S>& rep);

// Dual quiver with the Gram-aware adjoint of every edge map.
template <Scalar S>
QuiverRep<S> dual_rep(const QuiverRep<S>& rep);

template <Scalar S>
InnerProductSpace<S> total_space(const QuiverSheaf<S>& sheaf);
template <Scalar S>
InnerProductSpace<S> target_space(const QuiverSheaf<S>& sheaf);

// Coboundary from the total vertex space to the total edge space.
template <Scalar S>
LinearMap<S> boundary(const QuiverSheaf<S>& sheaf);
// Hermitian form B^H M_tar B; the Laplacian is M_tot^{-1} times this form.
template <Scalar S>
Mat<S> laplacian_form(const QuiverSheaf<S>& sheaf);
template <Scalar S>
LinearMap<S> laplacian(const QuiverSheaf<S>& sheaf);
// Sum over edges of squared edge-space norms of the discrepancy.
template <Scalar S>
double dirichlet_energy(const QuiverSheaf<S>& sheaf, const Vec<S>& x);

template <Scalar S>
EigenResult<S> laplacian_eigh(const QuiverSheaf<S>& sheaf, const EighOptions& opt = {});
template <Scalar S>
RVec spectrum(const QuiverSheaf<S>& sheaf);
template <Scalar S>
SpectralMeasure spectral_measure(const QuiverSheaf<S>& sheaf);

// Kernel of the Laplacian: eigenvalues below tol * max(1, lambda_max).
template <Scalar S>
SubspaceBasis<S> sections(const QuiverSheaf<S>& sheaf, double tol = kDefaultTol);
template <Scalar S>
Index section_dimension(const QuiverSheaf<S>& sheaf, double tol = kDefaultTol);
// The k smallest eigenpairs.
template <Scalar S>
EigenResult<S> approximate_sections(const QuiverSheaf<S>& sheaf, Index k);
// All eigenpairs with eigenvalue at most eps.
template <Scalar S>
EigenResult<S> epsilon_sections(const QuiverSheaf<S>& sheaf, double eps);

// Unitarily equivalent sheaf with Euclidean vertex and edge spaces.
template <Scalar S>
QuiverSheaf<S> whiten(const QuiverSheaf<S>& sheaf);

// Upper bound |Q1| (r+1)^2 for Laplacian eigenvalues of representations whose
// edge maps have norm at most r.
double laplacian_eigenvalue_bound(int n_edges, double r);

} // namespace quivlap
