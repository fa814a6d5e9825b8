#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quivlap/selector.hpp"
#include "quivlap/summit.hpp"

namespace quivlap {

// Undirected k-nearest-neighbour graph: each point links to its k closest
// points (Euclidean, ties by index) and the relation is symmetrized by union.
struct KnnGraph {
    std::vector<std::vector<int>> neighbours; // sorted
};

KnnGraph knn_graph(const RMat& points, int k);

// One set per distinct label, named by the label and sorted by name: the
// community together with every point sharing an edge with it.
Cover build_cover_from_graph(const KnnGraph& graph, const std::vector<std::string>& labels);

// Rows are cells; the leading singular direction is skipped.
RMat embed_features(const FeatureMatrix& m, int dims);

// "chrN:position" feature names.
Summit summit_from_feature(const std::string& name, double score);

struct SynthConfig {
    int communities = 4;
    int cells = 500;
    int features = 2000;
    std::uint64_t seed = 7;
    int embedding_dim = 5;
    double spacing = 3.5;
    int global_clusters = 8;
    int exclusive_clusters = 6; // per community
};

struct SynthData {
    std::vector<std::string> cells;
    std::vector<std::string> labels;
    std::vector<std::string> communities;
    FeatureMatrix matrix;
    RMat embedding;
    std::vector<std::string> global_features;
    std::map<std::string, std::vector<std::string>> exclusive_features;
};

SynthData synth_data(const SynthConfig& cfg);
// matrix.csv, labels.csv, embedding.csv, truth.json
void write_synth(const SynthData& data, const std::filesystem::path& dir);

enum class SelectorSource { TopFrequency, TopVariance, SummitFiles };

struct SelectorSpec {
    SelectorSource source = SelectorSource::TopFrequency;
    int k = 50;
    std::filesystem::path dir;
};

// "top_frequency:k=50", "top_variance:30", "summits:dir=path".
SelectorSpec parse_selector_spec(const std::string& text);

struct PipelineConfig {
    std::filesystem::path matrix;
    std::filesystem::path labels;
    std::optional<std::filesystem::path> embedding;
    int knn = 15;
    int embed_dims = 10;
    int max_order = 2;
    SelectorSpec selector;
    std::size_t max_summits = 1000;
    double bandwidth = 1000.0;
    AssemblyMode mode = AssemblyMode::Mixed;
    std::optional<std::string> sigma0;
    int n_eigs = 100;
    double support_tol = 1e-5;
};

struct PipelineResult {
    NerveQuiver nerve;
    SummitAssignment summits;
    GeneralizedSolution solution;
    // File name to content, written together by write_pipeline_outputs.
    std::map<std::string, std::string> artifacts;
};

// Failures are rethrown as Error with the failing stage named first.
PipelineResult run_pipeline(const PipelineConfig& cfg);
void write_pipeline_outputs(const PipelineResult& result, const std::filesystem::path& dir);

} // namespace quivlap
