#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quivlap/selector.hpp"
#include "quivlap/surgery.hpp"

namespace quivlap {

struct ReductionStep {
    std::string operation;
    SpectralRelation relation; // after versus before
    SurgeryReport report;
};

// Surgeries carrying the combined sheaf down to a single vertex. The composed
// relation is C1 lambda_i(N) <= lambda_i(reduced) <= C2 lambda_{i+shift}(N).
struct ReductionTrace {
    std::vector<ReductionStep> steps;
    double c1 = 1.0;
    double c2 = 1.0;
    Index shift = 0;
};

struct CombinedReduction {
    int sigma0 = 0;
    // Single vertex S_{sigma0} with one loop per other nerve vertex tau carrying
    // iota_{sigma0} - iota_tau pi_tau iota_{sigma0} on one side and zero on the other.
    QuiverSheaf<double> sheaf;
    RVec spectrum;
    Index kernel_dim = 0;
    RVec full_spectrum;        // combined sheaf, whitened
    Index full_section_dim = 0;
    std::optional<ReductionTrace> trace;
    std::vector<BoundCheck> checks;

    bool certified_ok() const;
};

// The trace is executed surgery by surgery when requested; its final Laplacian
// is compared entrywise with the direct single-vertex assembly.
CombinedReduction reduce_combined(const SelectorAssignment& sel, int sigma0, bool execute_trace = true);

struct MixedReduction {
    // Nerve vertices; per nerve edge sigma -> tau a reversed edge carrying
    // (pi_sigma iota_tau, id) and a loop at sigma carrying
    // (iota_sigma, iota_tau pi_tau iota_sigma).
    QuiverSheaf<double> sheaf;
    RVec spectrum;
    Index kernel_dim = 0;
    RVec full_spectrum;        // mixed sheaf, whitened
    Index full_section_dim = 0;
    Index shift = 0;           // dim of the mixed sheaf minus dim of the reduced one
    std::vector<BoundCheck> checks;

    bool certified_ok() const;
};

MixedReduction reduce_mixed(const SelectorAssignment& sel);

// Laplacian forms assembled blockwise from the Gram blocks of the selected bases,
// in basis coordinates, with the block-diagonal Gram as mass matrix.
struct BlockForms {
    RMat stiffness;
    RMat mass;
    std::vector<Index> offsets; // per nerve vertex, plus the total at the end
};

// cross(a, b) returns B_a^* G B_b; cross(a, a) must be positive definite.
using CrossGram = std::function<RMat(int, int)>;

BlockForms mixed_block_forms(const Quiver& nerve, const CrossGram& cross);
BlockForms combined_block_forms(const Quiver& nerve, int sigma0, const CrossGram& cross);

CrossGram selector_cross_gram(const SelectorAssignment& sel);

} // namespace quivlap
