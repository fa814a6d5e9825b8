#pragma once

#include <string>
#include <vector>

#include "quivlap/reduction.hpp"

namespace quivlap {

struct Summit {
    std::string chrom;
    long long position = 0;
    double score = 0.0;
};

// Per nerve vertex, a list of summits spanning Gaussian bumps; no ambient coordinates.
struct SummitAssignment {
    NerveQuiver nerve;
    std::vector<std::vector<Summit>> summits;
    double bandwidth = 1000.0;

    Index total_dim() const;
    void validate() const;
};

inline constexpr double kGramRegularization = 1e-10;

// exp(-(p-q)^2 / (2 h^2)) on the same chromosome, 0 across chromosomes.
RMat kernel_gram(const std::vector<Summit>& a, const std::vector<Summit>& b, double bandwidth);

// Removes duplicate (chrom, position) entries keeping the best score, sorts by
// descending score (ties by chrom, position) and keeps at most max_count.
std::vector<Summit> normalize_summits(std::vector<Summit> summits, std::size_t max_count);

// Kernel cross Grams, with the regularization added on same-vertex blocks.
CrossGram summit_cross_gram(const SummitAssignment& sa);

enum class AssemblyMode { Mixed, Combined };

// K x = lambda M x with M the block-diagonal summit Gram.
struct GeneralizedProblem {
    AssemblyMode mode = AssemblyMode::Mixed;
    int sigma0 = 0;
    RMat stiffness;
    RMat mass;
    std::vector<Index> offsets;
    std::vector<int> vertex_of_row;
};

GeneralizedProblem assemble_generalized(const SummitAssignment& sa, AssemblyMode mode, int sigma0 = 0);

// The same operator in orthonormal coordinates, built from W_a^{-*} M_ab W_b^{-1}
// with the Cholesky factors of the vertex Grams.
RMat assemble_whitened(const SummitAssignment& sa, AssemblyMode mode, int sigma0 = 0);

struct GeneralizedSolution {
    RVec values;
    RMat vectors;                // mass-orthonormal columns
    std::vector<int> component;  // pattern component of each eigenpair, -1 when not split
    int n_components = 1;
};

// Smallest eigenpairs (count < 0 for all). With split, the sparsity pattern of
// K and M, ignoring entries below 1e-14 of the largest magnitude, is cut into
// connected blocks solved separately; pairs are merged by eigenvalue, then block.
GeneralizedSolution solve_generalized(const GeneralizedProblem& p, Index count = -1, bool split = true);

} // namespace quivlap
