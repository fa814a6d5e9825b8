#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quivlap/sheaf.hpp"

namespace quivlap {

// One inequality family verified on the spectra before and after a surgery.
// Certified checks are guaranteed by theory; a failure raises ConsistencyError.
struct BoundCheck {
    std::string name;
    bool certified = true;
    bool holds = true;
    double worst_margin = 0.0; // most negative slack observed, 0 when all hold
    Index checked = 0;
};

// lower * lambda_i(before) <= lambda_i(after) <= upper * lambda_{i+shift}(before)
struct SpectralRelation {
    double lower = 1.0;
    double upper = 1.0;
    Index shift = 0;
};

struct SurgeryReport {
    std::string operation;
    RVec before;
    RVec after;
    std::vector<BoundCheck> checks;
    std::vector<std::pair<std::string, double>> constants;
    std::optional<SpectralRelation> relation;

    bool certified_ok() const;
    double constant(const std::string& name) const;
};

template <Scalar S>
struct SurgeryResult {
    QuiverSheaf<S> sheaf;
    SurgeryReport report;
};

struct EdgePairing {
    std::string first;
    std::string second; // replaced by an edge joining the two far endpoints
    int common_vertex = 0;
};

template <Scalar S>
struct ParallelPair {
    std::string keep;
    std::string drop;
    // Map from the kept edge space to the dropped one with drop = witness * keep
    // on both endpoint maps; found by least squares when absent.
    std::optional<Mat<S>> witness;
};

// All surgeries whiten their input first; results live on Euclidean spaces.

// Cauchy interlacing is certified on the edge-indexed operator B B^*.
template <Scalar S>
SurgeryResult<S> remove_edges(const QuiverSheaf<S>& sheaf, const std::vector<std::string>& edge_ids);

// Drops the vertices and every edge touching them.
template <Scalar S>
SurgeryResult<S> remove_vertices(const QuiverSheaf<S>& sheaf, const std::vector<int>& vertices);

template <Scalar S>
SurgeryResult<S> homotopy(const QuiverSheaf<S>& sheaf, const std::vector<EdgePairing>& pairs);

// Self-loops whose two maps are both the identity.
template <Scalar S>
SurgeryResult<S> remove_identity_loops(const QuiverSheaf<S>& sheaf);
// Self-loops whose two maps coincide, so their boundary block vanishes.
template <Scalar S>
SurgeryResult<S> remove_null_loops(const QuiverSheaf<S>& sheaf);

template <Scalar S>
SurgeryResult<S> remove_parallel_edges(const QuiverSheaf<S>& sheaf, const std::vector<ParallelPair<S>>& pairs);

// Schur-complement elimination of an edge-independent vertex set.
template <Scalar S>
SurgeryResult<S> kron_reduce(const QuiverSheaf<S>& sheaf, const std::vector<int>& vertices);

// Energy ratio of the three-point inequality behind the homotopy bound:
// (|X-Z|^2 + |Z-Y|^2) / (|X-Y|^2 + |Y-Z|^2).
template <Scalar S>
double homotopy_energy_ratio(const Vec<S>& x, const Vec<S>& y, const Vec<S>& z);

inline constexpr double kGoldenRatio = 1.6180339887498948482;

} // namespace quivlap
