#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "quivlap/selector.hpp"
#include "quivlap/summit.hpp"

namespace quivlap::io {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const fs::path& path, const std::string& content);

// Shortest text that reads back to the same double.
std::string format_double(double x);
std::string format_scalar(double x);
std::string format_scalar(cdouble x);
cdouble parse_complex(const std::string& text);

// Header line "rows,cols" then one row-major line per row.
template <Scalar S>
Mat<S> parse_matrix_csv(const std::string& text, const std::string& origin = "matrix");
template <Scalar S>
Mat<S> read_matrix_csv(const fs::path& path);
template <Scalar S>
std::string matrix_csv(const Mat<S>& m);

Quiver parse_quiver_json(const std::string& text);
std::string quiver_json(const Quiver& q);
Cover parse_cover_json(const std::string& text);
std::string cover_json(const Cover& c);

enum class Field { Real, Complex };

struct BundleHeader {
    bool is_sheaf = false;
    Field field = Field::Real;
};

BundleHeader read_bundle_header(const fs::path& path);

// Representation bundles become sheaves through rep_to_sheaf.
template <Scalar S>
QuiverRep<S> load_rep_bundle(const fs::path& path);
template <Scalar S>
QuiverSheaf<S> load_sheaf_bundle(const fs::path& path);

// {"maps": [matrix per vertex]} between two loaded representations.
template <Scalar S>
Transformation<S> load_transformation(const fs::path& path, const QuiverRep<S>& source, const QuiverRep<S>& target);

SelectorAssignment load_selector_bundle(const fs::path& path);

// Columns vertex,chrom,position,score; vertex is a nerve label.
std::vector<std::pair<std::string, Summit>> read_summits_csv(const fs::path& path);
std::string summits_csv(const std::vector<std::pair<std::string, Summit>>& rows);

// Columns cell,label; order of first appearance defines the cell index.
struct LabelTable {
    std::vector<std::string> cells;
    std::vector<std::string> labels;
};
LabelTable read_labels_csv(const fs::path& path);

// Columns cell,feature, one line per nonzero; cells must appear in the label table.
FeatureMatrix read_feature_matrix_csv(const fs::path& path, const LabelTable& cells);

} // namespace quivlap::io
