#include "quivlap/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace quivlap::io {

using nlohmann::json;

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw FormatError("short write to " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

std::string format_double(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string format_scalar(double x) { return format_double(x); }

std::string format_scalar(cdouble x) {
    std::string im = format_double(std::abs(x.imag()));
    return format_double(x.real()) + (std::signbit(x.imag()) ? "-" : "+") + im + "j";
}

namespace {

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(trim(cur));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_real(const std::string& t, const std::string& origin) {
    double v = 0.0;
    const char* b = t.data();
    const char* e = t.data() + t.size();
    if (!t.empty() && *b == '+') ++b;
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e || t.empty()) throw FormatError(origin + ": bad number '" + t + "'");
    return v;
}

long long parse_int(const std::string& t, const std::string& origin) {
    long long v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty())
        throw FormatError(origin + ": bad integer '" + t + "'");
    return v;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

template <Scalar S>
S parse_entry(const std::string& t, const std::string& origin) {
    if constexpr (std::is_same_v<S, double>) {
        return parse_real(t, origin);
    } else {
        return parse_complex(t);
    }
}

} // namespace

cdouble parse_complex(const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) throw FormatError("empty complex number");
    if (t.back() != 'j' && t.back() != 'i') return {parse_real(t, "complex"), 0.0};
    std::string body = t.substr(0, t.size() - 1);
    // Split at the last sign that is not part of an exponent.
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            std::string re = body.substr(0, k);
            std::string im = body.substr(k);
            if (im == "+" || im == "-") im += "1";
            return {parse_real(re, "complex"), parse_real(im, "complex")};
        }
    }
    if (body.empty() || body == "+" || body == "-") body += "1";
    return {0.0, parse_real(body, "complex")};
}

template <Scalar S>
Mat<S> parse_matrix_csv(const std::string& text, const std::string& origin) {
    auto lines = lines_of(text);
    if (lines.empty()) throw FormatError(origin + ": missing header");
    auto head = split(lines[0]);
    if (head.size() != 2) throw FormatError(origin + ": header must be rows,cols");
    long long rows = parse_int(head[0], origin), cols = parse_int(head[1], origin);
    if (rows < 0 || cols < 0) throw FormatError(origin + ": negative shape");
    Mat<S> m(rows, cols);
    if (cols == 0) {
        if (static_cast<long long>(lines.size()) - 1 > rows) throw FormatError(origin + ": too many rows");
        return m;
    }
    if (static_cast<long long>(lines.size()) - 1 != rows) throw FormatError(origin + ": row count differs from header");
    for (long long i = 0; i < rows; ++i) {
        auto cells = split(lines[static_cast<std::size_t>(i + 1)]);
        if (static_cast<long long>(cells.size()) != cols) throw FormatError(origin + ": row " + std::to_string(i) + " has the wrong length");
        for (long long j = 0; j < cols; ++j) m(i, j) = parse_entry<S>(cells[static_cast<std::size_t>(j)], origin);
    }
    return m;
}

template <Scalar S>
Mat<S> read_matrix_csv(const fs::path& path) {
    return parse_matrix_csv<S>(read_text(path), path.string());
}

template <Scalar S>
std::string matrix_csv(const Mat<S>& m) {
    std::string out = std::to_string(m.rows()) + "," + std::to_string(m.cols()) + "\n";
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += format_scalar(m(i, j));
        }
        out += '\n';
    }
    return out;
}

Quiver parse_quiver_json(const std::string& text) {
    try {
        json j = json::parse(text);
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) edges.push_back({e.at("id").get<std::string>(), e.at("src").get<int>(), e.at("tgt").get<int>()});
        return Quiver(j.at("n_vertices").get<int>(), std::move(edges));
    } catch (const json::exception& e) {
        throw FormatError(std::string("quiver json: ") + e.what());
    }
}

std::string quiver_json(const Quiver& q) {
    json j;
    j["n_vertices"] = q.n_vertices();
    j["edges"] = json::array();
    for (const Edge& e : q.edges()) j["edges"].push_back({{"id", e.id}, {"src", e.src}, {"tgt", e.tgt}});
    return j.dump(2) + "\n";
}

Cover parse_cover_json(const std::string& text) {
    try {
        json j = json::parse(text);
        std::vector<std::pair<std::string, std::vector<int>>> sets;
        for (auto it = j.at("sets").begin(); it != j.at("sets").end(); ++it)
            sets.emplace_back(it.key(), it.value().get<std::vector<int>>());
        Cover c = make_cover(j.at("n_items").get<int>(), std::move(sets));
        std::vector<char> hit(static_cast<std::size_t>(c.n_items), 0);
        for (const auto& s : c.sets)
            for (int x : s) hit[x] = 1;
        for (int x = 0; x < c.n_items; ++x)
            if (!hit[x]) throw PreconditionViolation("cover misses item " + std::to_string(x));
        return c;
    } catch (const json::exception& e) {
        throw FormatError(std::string("cover json: ") + e.what());
    }
}

std::string cover_json(const Cover& c) {
    json j;
    j["n_items"] = c.n_items;
    j["sets"] = json::object();
    for (std::size_t i = 0; i < c.sets.size(); ++i) j["sets"][c.names[i]] = c.sets[i];
    return j.dump(2) + "\n";
}

namespace {

json load_json(const fs::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

// A matrix given as a CSV file name relative to the bundle, or inline rows.
template <Scalar S>
Mat<S> matrix_field(const json& v, const fs::path& base, const std::string& what) {
    if (v.is_string()) return read_matrix_csv<S>(base / v.get<std::string>());
    if (!v.is_array()) throw FormatError(what + ": expected a file name or an array of rows");
    const Index rows = static_cast<Index>(v.size());
    const Index cols = rows ? static_cast<Index>(v[0].size()) : 0;
    Mat<S> m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw FormatError(what + ": ragged rows");
        for (Index j = 0; j < cols; ++j) {
            const json& x = row[static_cast<std::size_t>(j)];
            if (x.is_number()) {
                m(i, j) = S(x.get<double>());
            } else if (x.is_string()) {
                if constexpr (std::is_same_v<S, double>) {
                    m(i, j) = parse_real(x.get<std::string>(), what);
                } else {
                    m(i, j) = parse_complex(x.get<std::string>());
                }
            } else {
                throw FormatError(what + ": entries must be numbers or strings");
            }
        }
    }
    return m;
}

template <Scalar S>
InnerProductSpace<S> space_field(const json& v, const fs::path& base, const std::string& what) {
    const Index dim = v.at("dim").get<Index>();
    if (dim < 0) throw FormatError(what + ": negative dimension");
    if (!v.contains("gram")) return InnerProductSpace<S>::euclidean(dim);
    Mat<S> g = matrix_field<S>(v.at("gram"), base, what + " gram");
    if (g.rows() != dim || g.cols() != dim) throw DimensionMismatch(what + ": gram shape differs from dim");
    return InnerProductSpace<S>(std::move(g));
}

Quiver quiver_field(const json& v, const fs::path& base) {
    if (v.is_string()) return parse_quiver_json(read_text(base / v.get<std::string>()));
    return parse_quiver_json(v.dump());
}

template <Scalar S>
std::vector<InnerProductSpace<S>> vertex_spaces(const json& j, const Quiver& q, const fs::path& base) {
    const json& vs = j.at("vertices");
    if (static_cast<int>(vs.size()) != q.n_vertices()) throw DimensionMismatch("bundle lists the wrong number of vertices");
    std::vector<InnerProductSpace<S>> out;
    for (std::size_t v = 0; v < vs.size(); ++v) out.push_back(space_field<S>(vs[v], base, "vertex " + std::to_string(v)));
    return out;
}

const json& edge_entry(const json& j, const Edge& e) {
    const json& es = j.at("edges");
    if (!es.contains(e.id)) throw FormatError("bundle has no data for edge '" + e.id + "'");
    return es.at(e.id);
}

void check_kind(const json& j, bool sheaf) {
    std::string kind = j.value("kind", "representation");
    if (sheaf ? kind != "sheaf" : kind != "representation")
        throw FormatError("bundle kind is '" + kind + "'");
}

} // namespace

BundleHeader read_bundle_header(const fs::path& path) {
    json j = load_json(path);
    BundleHeader h;
    std::string kind = j.value("kind", "representation");
    if (kind == "sheaf") h.is_sheaf = true;
    else if (kind != "representation") throw FormatError("unknown bundle kind '" + kind + "'");
    std::string field = j.value("field", "real");
    if (field == "complex") h.field = Field::Complex;
    else if (field != "real") throw FormatError("unknown field '" + field + "'");
    return h;
}

template <Scalar S>
QuiverRep<S> load_rep_bundle(const fs::path& path) {
    json j = load_json(path);
    const fs::path base = path.parent_path();
    try {
        check_kind(j, false);
        Quiver q = quiver_field(j.at("quiver"), base);
        auto spaces = vertex_spaces<S>(j, q, base);
        std::vector<LinearMap<S>> maps;
        for (const Edge& e : q.edges()) {
            Mat<S> a = matrix_field<S>(edge_entry(j, e).at("map"), base, "edge " + e.id);
            maps.emplace_back(spaces[e.src], spaces[e.tgt], std::move(a));
        }
        return QuiverRep<S>(std::move(q), std::move(spaces), std::move(maps));
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

template <Scalar S>
QuiverSheaf<S> load_sheaf_bundle(const fs::path& path) {
    if (!read_bundle_header(path).is_sheaf) return rep_to_sheaf(load_rep_bundle<S>(path));
    json j = load_json(path);
    const fs::path base = path.parent_path();
    try {
        Quiver q = quiver_field(j.at("quiver"), base);
        auto vs = vertex_spaces<S>(j, q, base);
        std::vector<InnerProductSpace<S>> es;
        std::vector<LinearMap<S>> to, from;
        for (const Edge& e : q.edges()) {
            const json& d = edge_entry(j, e);
            es.push_back(space_field<S>(d, base, "edge " + e.id));
            to.emplace_back(vs[e.src], es.back(), matrix_field<S>(d.at("to_edge"), base, "edge " + e.id));
            from.emplace_back(vs[e.tgt], es.back(), matrix_field<S>(d.at("from_target"), base, "edge " + e.id));
        }
        return QuiverSheaf<S>(std::move(q), std::move(vs), std::move(es), std::move(to), std::move(from));
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

template <Scalar S>
Transformation<S> load_transformation(const fs::path& path, const QuiverRep<S>& source, const QuiverRep<S>& target) {
    json j = load_json(path);
    const fs::path base = path.parent_path();
    try {
        const json& ms = j.at("maps");
        if (static_cast<int>(ms.size()) != source.quiver().n_vertices())
            throw DimensionMismatch("transformation needs one map per vertex");
        std::vector<LinearMap<S>> maps;
        for (std::size_t v = 0; v < ms.size(); ++v) {
            const int vi = static_cast<int>(v);
            maps.emplace_back(source.space(vi), target.space(vi), matrix_field<S>(ms[v], base, "map " + std::to_string(v)));
        }
        return Transformation<S>(source, target, std::move(maps));
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

SelectorAssignment load_selector_bundle(const fs::path& path) {
    json j = load_json(path);
    const fs::path base = path.parent_path();
    try {
        if (j.value("kind", "") != "selector") throw FormatError("bundle kind must be 'selector'");
        const json& cv = j.at("cover");
        Cover cover = cv.is_string() ? parse_cover_json(read_text(base / cv.get<std::string>())) : parse_cover_json(cv.dump());
        SelectorAssignment sel;
        sel.nerve = nerve_quiver(cover, j.value("max_order", 2));
        sel.ambient = space_field<double>(j.at("ambient"), base, "ambient");
        const json& bs = j.at("bases");
        for (const auto& label : sel.nerve.labels) {
            if (!bs.contains(label)) throw FormatError("selector bundle has no basis for '" + label + "'");
            RMat b = matrix_field<double>(bs.at(label), base, "basis " + label);
            if (b.rows() != sel.ambient.dim() && b.cols() != 0)
                throw DimensionMismatch("basis '" + label + "' does not live in the ambient space");
            if (b.cols() == 0) b = RMat(sel.ambient.dim(), 0);
            sel.bases.emplace_back(sel.ambient, std::move(b));
        }
        return sel;
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::vector<std::pair<std::string, Summit>> read_summits_csv(const fs::path& path) {
    auto lines = lines_of(read_text(path));
    const std::string origin = path.string();
    if (lines.empty() || split(lines[0]) != std::vector<std::string>{"vertex", "chrom", "position", "score"})
        throw FormatError(origin + ": header must be vertex,chrom,position,score");
    std::vector<std::pair<std::string, Summit>> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto c = split(lines[i]);
        if (c.size() != 4) throw FormatError(origin + ": line " + std::to_string(i + 1) + " needs 4 columns");
        Summit s{c[1], parse_int(c[2], origin), parse_real(c[3], origin)};
        if (s.position < 0) throw FormatError(origin + ": negative position");
        out.emplace_back(c[0], std::move(s));
    }
    return out;
}

std::string summits_csv(const std::vector<std::pair<std::string, Summit>>& rows) {
    std::string out = "vertex,chrom,position,score\n";
    for (const auto& [v, s] : rows) out += v + "," + s.chrom + "," + std::to_string(s.position) + "," + format_double(s.score) + "\n";
    return out;
}

LabelTable read_labels_csv(const fs::path& path) {
    auto lines = lines_of(read_text(path));
    const std::string origin = path.string();
    if (lines.empty() || split(lines[0]) != std::vector<std::string>{"cell", "label"})
        throw FormatError(origin + ": header must be cell,label");
    LabelTable t;
    std::map<std::string, int> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto c = split(lines[i]);
        if (c.size() != 2 || c[0].empty()) throw FormatError(origin + ": line " + std::to_string(i + 1) + " needs cell,label");
        if (!seen.emplace(c[0], static_cast<int>(t.cells.size())).second) throw FormatError(origin + ": duplicate cell " + c[0]);
        t.cells.push_back(c[0]);
        t.labels.push_back(c[1]);
    }
    if (t.cells.empty()) throw FormatError(origin + ": no cells");
    return t;
}

FeatureMatrix read_feature_matrix_csv(const fs::path& path, const LabelTable& cells) {
    auto lines = lines_of(read_text(path));
    const std::string origin = path.string();
    if (lines.empty() || split(lines[0]) != std::vector<std::string>{"cell", "feature"})
        throw FormatError(origin + ": header must be cell,feature");
    std::map<std::string, int> cell_index;
    for (std::size_t i = 0; i < cells.cells.size(); ++i) cell_index.emplace(cells.cells[i], static_cast<int>(i));
    std::map<std::string, int> feature_index;
    FeatureMatrix m;
    m.n_cells = static_cast<int>(cells.cells.size());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto c = split(lines[i]);
        if (c.size() != 2) throw FormatError(origin + ": line " + std::to_string(i + 1) + " needs cell,feature");
        auto ci = cell_index.find(c[0]);
        if (ci == cell_index.end()) throw FormatError(origin + ": unknown cell " + c[0]);
        auto [fi, fresh] = feature_index.emplace(c[1], m.n_features());
        if (fresh) {
            m.features.push_back(c[1]);
            m.columns.emplace_back();
        }
        m.columns[fi->second].push_back(ci->second);
    }
    for (auto& col : m.columns) {
        std::sort(col.begin(), col.end());
        col.erase(std::unique(col.begin(), col.end()), col.end());
    }
    m.validate();
    return m;
}

#define QUIVLAP_INSTANTIATE(S)                                                                              \
    template Mat<S> parse_matrix_csv<S>(const std::string&, const std::string&);                            \
    template Mat<S> read_matrix_csv<S>(const fs::path&);                                                    \
    template std::string matrix_csv<S>(const Mat<S>&);                                                      \
    template QuiverRep<S> load_rep_bundle<S>(const fs::path&);                                              \
    template QuiverSheaf<S> load_sheaf_bundle<S>(const fs::path&);                                          \
    template Transformation<S> load_transformation<S>(const fs::path&, const QuiverRep<S>&, const QuiverRep<S>&);

QUIVLAP_INSTANTIATE(double)
QUIVLAP_INSTANTIATE(cdouble)

#undef QUIVLAP_INSTANTIATE

} // namespace quivlap::io
