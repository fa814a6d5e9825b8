#pragma once

#include <string>
#include <vector>

#include "quivlap/sheaf.hpp"
#include "quivlap/stability.hpp"

namespace quivlap {

using RMat = Eigen::MatrixXd;

// A subspace of a common ambient feature space at every nerve vertex.
struct SelectorAssignment {
    NerveQuiver nerve;
    InnerProductSpace<double> ambient;
    std::vector<SubspaceBasis<double>> bases;

    void validate() const;
};

// Edges sigma -> tau carry pi_tau iota_sigma.
QuiverRep<double> selector_rep(const SelectorAssignment& sel);
// The ambient space at every vertex with identity maps.
QuiverRep<double> constant_rep(const Quiver& q, const InnerProductSpace<double>& space);
// Inclusions of the selected subspaces into the constant representation.
Transformation<double> inclusion_transformation(const SelectorAssignment& sel);

// Floret of a transformation at vertex u: the center carries the source space,
// each petal the target space at the head of its edge; e_LD carries
// A'_e tau_u and e_DL carries tau_{t(e)} A_e.
QuiverRep<double> floret_rep(const Transformation<double>& t, int u);

// Representation on the merged quiver; identified vertices must carry equal spaces.
QuiverRep<double> merge_reps(const QuiverRep<double>& left, const QuiverRep<double>& right,
                             const std::vector<std::pair<int, int>>& identify, const std::string& left_prefix,
                             const std::string& right_prefix);

// Selector representation glued to the florets of the inclusions at every vertex.
QuiverRep<double> combined_rep(const SelectorAssignment& sel);
// Same florets glued to the dual of the selector representation.
QuiverRep<double> mixed_rep(const SelectorAssignment& sel);

// Per nerve edge sigma -> tau: || iota_sigma - iota_tau pi_tau iota_sigma ||.
std::vector<double> local_compatibility(const SelectorAssignment& sel);

// Vertexwise pi^small iota^large between two selectors on the same nerve.
Transformation<double> selector_transformation(const SelectorAssignment& large, const SelectorAssignment& small);

// Binary cells-by-features matrix stored by column.
struct FeatureMatrix {
    int n_cells = 0;
    std::vector<std::string> features;
    std::vector<std::vector<int>> columns; // sorted cells with a 1 in each column

    int n_features() const { return static_cast<int>(features.size()); }
    void validate() const;
};

enum class SelectorKind { TopFrequency, TopVariance };

struct BuiltinSelection {
    std::vector<std::vector<int>> selected; // ranked feature indices per vertex
    std::vector<std::vector<double>> scores;
    SelectorAssignment assignment;          // span of the restricted columns
};

// Scores every column on the support of each nerve vertex and keeps the top k,
// ties broken by lower feature index. Columns are restricted to the support and
// extended by zero; linearly dependent restrictions are left out of the basis.
BuiltinSelection builtin_selector(const FeatureMatrix& m, const NerveQuiver& nerve, SelectorKind kind, int k);

} // namespace quivlap
