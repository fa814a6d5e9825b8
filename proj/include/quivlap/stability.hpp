#pragma once

#include <vector>

#include "quivlap/sheaf.hpp"

namespace quivlap {

// Vertexwise maps from one representation to another on the same quiver.
template <Scalar S>
class Transformation {
public:
    Transformation(QuiverRep<S> source, QuiverRep<S> target, std::vector<LinearMap<S>> maps);

    const QuiverRep<S>& source() const { return source_; }
    const QuiverRep<S>& target() const { return target_; }
    const LinearMap<S>& map(int v) const { return maps_.at(static_cast<std::size_t>(v)); }
    const std::vector<LinearMap<S>>& maps() const { return maps_; }

    // Componentwise adjoints, from the target back to the source.
    Transformation adjoint() const;
    // Block-diagonal map between total spaces.
    LinearMap<S> total_map() const;

private:
    QuiverRep<S> source_;
    QuiverRep<S> target_;
    std::vector<LinearMap<S>> maps_;
};

struct DefectReport {
    std::vector<double> per_edge;
    double total = 0.0; // l2 aggregate of the per-edge defects
};

template <Scalar S>
DefectReport defect(const Transformation<S>& t);

// kappa^2 lambda + defect ||tau^+|| (2 kappa sqrt(lambda) + defect ||tau^+||)
double transfer_bound_value(double kappa, double pinv_norm, double defect, double lambda);

struct TransferReport {
    RVec source_eigs;
    RVec target_eigs;
    double kappa = 0.0;
    double pinv_norm = 0.0;
    double defect = 0.0;
    Index nullity = 0;
    std::vector<double> bounds;          // bounds[k-1] for k = 1..n-q
    std::vector<double> morphism_bounds; // kappa^2 lambda_{k+q}
    Index violations(double tol = kDefaultTol) const;
};

template <Scalar S>
TransferReport eigenvalue_transfer(const Transformation<S>& t, double tol = kDefaultTol);

struct CouplingReport {
    Eigen::MatrixXd weights;
    double cost = 0.0;
    bool valid = false;
    double max_marginal_error = 0.0;
};

// Transport plan between the n source and m target eigenvalues (n >= m),
// matching indices lower < i <= upper and spreading the rest. The verbatim
// variant uses the published block weights, which are checked rather than trusted;
// the other variant normalizes the outer blocks by the outer mass instead.
CouplingReport eigenvalue_coupling(const RVec& source_eigs, const RVec& target_eigs, Index lower, Index upper,
                                   bool verbatim);

double distance_bound_value(Index n, Index c, double kappa, double pinv_norm, double defect, double adjoint_defect,
                            double radius);

struct DistanceReport {
    bool swapped = false; // the adjoint was used because the target was larger
    Index n = 0;
    Index m = 0;
    Index nullity = 0;
    Index adjoint_nullity = 0;
    Index c = 0;
    double kappa = 0.0;
    double pinv_norm = 0.0;
    double defect = 0.0;
    double adjoint_defect = 0.0;
    double r = 0.0;
    double radius = 0.0; // |Q1| (r+1)^2
    double a = 0.0;
    double b = 0.0;
    double bound = 0.0;
    double w1 = 0.0;
    double coupling_cost = 0.0;
    bool coupling_valid = false;
    double verbatim_coupling_cost = 0.0;
    bool verbatim_coupling_valid = false;
};

// r < 0 means: use the largest edge map norm of the two representations.
template <Scalar S>
DistanceReport spectral_distance_bound(const Transformation<S>& t, double r = -1.0, double tol = kDefaultTol);

// Trigonometric bound on the spectral distance of two selector representations
// whose subspaces are within Grassmann distance eps at every vertex.
double selector_stability_bound(double eps, Index c, Index n, int n_edges);

} // namespace quivlap
