#include "quivlap/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "quivlap/io.hpp"

namespace quivlap {

namespace fs = std::filesystem;
using nlohmann::json;

KnnGraph knn_graph(const RMat& points, int k) {
    const int n = static_cast<int>(points.rows());
    if (k < 1 || k >= n) throw PreconditionViolation("k_nn must satisfy 1 <= k < number of items");
    if (!points.allFinite()) throw PreconditionViolation("embedding has non-finite entries");
    KnnGraph g;
    g.neighbours.assign(static_cast<std::size_t>(n), {});
    std::vector<std::pair<double, int>> d(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (int j = 0; j < n; ++j)
            if (j != i) d[c++] = {(points.row(i) - points.row(j)).squaredNorm(), j};
        std::partial_sort(d.begin(), d.begin() + k, d.end());
        for (int t = 0; t < k; ++t) {
            int j = d[t].second;
            g.neighbours[i].push_back(j);
            g.neighbours[j].push_back(i);
        }
    }
    for (auto& nb : g.neighbours) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return g;
}

Cover build_cover_from_graph(const KnnGraph& graph, const std::vector<std::string>& labels) {
    const int n = static_cast<int>(graph.neighbours.size());
    if (static_cast<int>(labels.size()) != n) throw DimensionMismatch("label count differs from item count");
    std::map<std::string, std::set<int>> sets;
    for (int i = 0; i < n; ++i) {
        auto& s = sets[labels[i]];
        s.insert(i);
        s.insert(graph.neighbours[i].begin(), graph.neighbours[i].end());
    }
    std::vector<std::pair<std::string, std::vector<int>>> named;
    for (auto& [name, items] : sets) {
        if (items.size() < 2) throw PreconditionViolation("cover set '" + name + "' has a single item");
        named.emplace_back(name, std::vector<int>(items.begin(), items.end()));
    }
    return make_cover(n, std::move(named));
}

RMat embed_features(const FeatureMatrix& m, int dims) {
    m.validate();
    if (m.n_cells > 2000) throw PreconditionViolation("dense embedding is limited to 2000 cells; supply an embedding");
    if (dims < 1 || dims + 1 > std::min(m.n_cells, m.n_features()))
        throw PreconditionViolation("embedding dimension too large for the matrix");
    RMat x = RMat::Zero(m.n_cells, m.n_features());
    for (int j = 0; j < m.n_features(); ++j)
        for (int c : m.columns[j]) x(c, j) = 1.0;
    Eigen::BDCSVD<RMat> svd(x, Eigen::ComputeThinU);
    RMat out = svd.matrixU().middleCols(1, dims);
    for (int j = 0; j < dims; ++j) {
        out.col(j) *= svd.singularValues()(j + 1);
        Index arg;
        out.col(j).cwiseAbs().maxCoeff(&arg);
        if (out(arg, j) < 0) out.col(j) = -out.col(j);
    }
    return out;
}

Summit summit_from_feature(const std::string& name, double score) {
    auto colon = name.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == name.size())
        throw FormatError("feature '" + name + "' is not of the form chrom:position");
    Summit s;
    s.chrom = name.substr(0, colon);
    try {
        std::size_t used = 0;
        s.position = std::stoll(name.substr(colon + 1), &used);
        if (used != name.size() - colon - 1 || s.position < 0) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw FormatError("feature '" + name + "' has a bad position");
    }
    s.score = score;
    return s;
}

// ---- synthetic data ----

SynthData synth_data(const SynthConfig& cfg) {
    if (cfg.communities < 1 || cfg.cells < 2 * cfg.communities || cfg.embedding_dim < 1)
        throw PreconditionViolation("synthetic configuration is too small");
    std::mt19937_64 rng(cfg.seed);
    auto uniform = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto uniform_int = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
    std::normal_distribution<double> normal(0.0, 1.0);

    SynthData d;
    for (int c = 0; c < cfg.communities; ++c) d.communities.push_back("C" + std::to_string(c + 1));
    std::vector<int> community(static_cast<std::size_t>(cfg.cells));
    d.embedding = RMat::Zero(cfg.cells, cfg.embedding_dim);
    for (int i = 0; i < cfg.cells; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "cell%05d", i);
        d.cells.emplace_back(name);
        community[i] = static_cast<int>(static_cast<long long>(i) * cfg.communities / cfg.cells);
        d.labels.push_back(d.communities[community[i]]);
        for (int j = 0; j < cfg.embedding_dim; ++j) d.embedding(i, j) = normal(rng);
        d.embedding(i, 0) += cfg.spacing * community[i];
    }

    // Clusters: -1 global, c >= 0 exclusive to community c, -2 background singleton.
    struct Cluster {
        int kind;
        int size;
    };
    std::vector<Cluster> clusters;
    int used = 0;
    for (int g = 0; g < cfg.global_clusters; ++g) clusters.push_back({-1, uniform_int(1, 3)});
    for (int c = 0; c < cfg.communities; ++c)
        for (int e = 0; e < cfg.exclusive_clusters; ++e) clusters.push_back({c, uniform_int(1, 3)});
    for (const auto& cl : clusters) used += cl.size;
    if (used > cfg.features) throw PreconditionViolation("too few features for the planted clusters");
    for (int b = used; b < cfg.features; ++b) clusters.push_back({-2, 1});
    std::shuffle(clusters.begin(), clusters.end(), rng);

    struct Feature {
        int chrom;
        long long pos;
        int kind;
        double p;
    };
    std::vector<Feature> feats;
    long long cursor[3] = {10000, 10000, 10000};
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        const int chrom = static_cast<int>(i % 3);
        cursor[chrom] += uniform_int(15000, 40000);
        long long pos = cursor[chrom];
        const double bg = uniform(0.01, 0.08);
        for (int f = 0; f < clusters[i].size; ++f) {
            if (f) pos += uniform_int(200, 500);
            feats.push_back({chrom, pos, clusters[i].kind, bg});
        }
        cursor[chrom] = pos;
    }
    std::sort(feats.begin(), feats.end(),
              [](const Feature& a, const Feature& b) { return std::tie(a.chrom, a.pos) < std::tie(b.chrom, b.pos); });

    d.matrix.n_cells = cfg.cells;
    for (const auto& f : feats) {
        std::string name = "chr" + std::to_string(f.chrom + 1) + ":" + std::to_string(f.pos);
        std::vector<int> col;
        for (int i = 0; i < cfg.cells; ++i) {
            double p = f.kind == -1 ? 0.5 : f.kind >= 0 ? (community[i] == f.kind ? 0.5 : 0.01) : f.p;
            if (uniform(0.0, 1.0) < p) col.push_back(i);
        }
        if (col.empty()) col.push_back(uniform_int(0, cfg.cells - 1));
        if (f.kind == -1) d.global_features.push_back(name);
        if (f.kind >= 0) d.exclusive_features[d.communities[f.kind]].push_back(name);
        d.matrix.features.push_back(std::move(name));
        d.matrix.columns.push_back(std::move(col));
    }
    d.matrix.validate();
    return d;
}

void write_synth(const SynthData& d, const fs::path& dir) {
    fs::create_directories(dir);
    std::string matrix = "cell,feature\n";
    for (int j = 0; j < d.matrix.n_features(); ++j)
        for (int c : d.matrix.columns[j]) matrix += d.cells[c] + "," + d.matrix.features[j] + "\n";
    std::string labels = "cell,label\n";
    for (std::size_t i = 0; i < d.cells.size(); ++i) labels += d.cells[i] + "," + d.labels[i] + "\n";
    json truth;
    truth["communities"] = d.communities;
    truth["global"] = d.global_features;
    truth["exclusive"] = json::object();
    for (const auto& [c, fs_] : d.exclusive_features) truth["exclusive"][c] = fs_;
    io::write_text_atomic(dir / "matrix.csv", matrix);
    io::write_text_atomic(dir / "labels.csv", labels);
    io::write_text_atomic(dir / "embedding.csv", io::matrix_csv<double>(d.embedding));
    io::write_text_atomic(dir / "truth.json", truth.dump(2) + "\n");
}

// ---- pipeline ----

SelectorSpec parse_selector_spec(const std::string& text) {
    auto colon = text.find(':');
    std::string kind = text.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    SelectorSpec s;
    auto strip = [&](const std::string& key) {
        if (arg.rfind(key + "=", 0) == 0) return arg.substr(key.size() + 1);
        return arg;
    };
    if (kind == "top_frequency" || kind == "top_variance") {
        s.source = kind == "top_frequency" ? SelectorSource::TopFrequency : SelectorSource::TopVariance;
        std::string k = strip("k");
        if (!k.empty()) {
            try {
                std::size_t used = 0;
                s.k = std::stoi(k, &used);
                if (used != k.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw PreconditionViolation("selector count '" + k + "' is not an integer");
            }
        }
        if (s.k < 1) throw PreconditionViolation("selector count must be at least 1");
    } else if (kind == "summits") {
        s.source = SelectorSource::SummitFiles;
        s.dir = strip("dir");
        if (s.dir.empty()) throw PreconditionViolation("summits selector needs a directory");
    } else {
        throw PreconditionViolation("unknown selector '" + kind + "'");
    }
    return s;
}

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw Error(std::string(name) + ": " + e.what());
    }
}

std::string selector_text(const SelectorSpec& s) {
    switch (s.source) {
    case SelectorSource::TopFrequency: return "top_frequency:k=" + std::to_string(s.k);
    case SelectorSource::TopVariance: return "top_variance:k=" + std::to_string(s.k);
    case SelectorSource::SummitFiles: return "summits";
    }
    return "";
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    if (cfg.knn < 1 || cfg.n_eigs < 1 || !(cfg.bandwidth > 0.0) || !(cfg.support_tol >= 0.0) || cfg.max_summits == 0)
        throw PreconditionViolation("config: knn, n_eigs, bandwidth, max_summits and support_tol must be positive");

    auto [labels, matrix] = stage("load", [&] {
        io::LabelTable t = io::read_labels_csv(cfg.labels);
        FeatureMatrix m = io::read_feature_matrix_csv(cfg.matrix, t);
        return std::make_pair(t, m);
    });
    RMat points = stage("embed", [&] {
        if (cfg.embedding) {
            RMat e = io::read_matrix_csv<double>(*cfg.embedding);
            if (e.rows() != matrix.n_cells) throw DimensionMismatch("embedding rows differ from the cell count");
            return e;
        }
        return embed_features(matrix, cfg.embed_dims);
    });
    Cover cover = stage("cover", [&] { return build_cover_from_graph(knn_graph(points, cfg.knn), labels.labels); });
    PipelineResult res;
    res.nerve = stage("nerve", [&] { return nerve_quiver(cover, cfg.max_order); });
    const int nv = res.nerve.quiver.n_vertices();

    res.summits = stage("select", [&] {
        SummitAssignment sa;
        sa.nerve = res.nerve;
        sa.bandwidth = cfg.bandwidth;
        sa.summits.assign(static_cast<std::size_t>(nv), {});
        if (cfg.selector.source == SelectorSource::SummitFiles) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(cfg.selector.dir))
                if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            if (files.empty()) throw FormatError("no summit files in " + cfg.selector.dir.string());
            for (const auto& f : files)
                for (auto& [label, s] : io::read_summits_csv(f)) sa.summits[res.nerve.vertex_of_label(label)].push_back(s);
        } else {
            SelectorKind kind =
                cfg.selector.source == SelectorSource::TopFrequency ? SelectorKind::TopFrequency : SelectorKind::TopVariance;
            BuiltinSelection b = builtin_selector(matrix, res.nerve, kind, cfg.selector.k);
            for (int v = 0; v < nv; ++v)
                for (std::size_t i = 0; i < b.selected[v].size(); ++i)
                    sa.summits[v].push_back(summit_from_feature(matrix.features[b.selected[v][i]], b.scores[v][i]));
        }
        for (auto& s : sa.summits) s = normalize_summits(std::move(s), cfg.max_summits);
        sa.validate();
        return sa;
    });
    const int sigma0 = stage("assemble", [&] { return cfg.sigma0 ? res.nerve.vertex_of_label(*cfg.sigma0) : 0; });
    GeneralizedProblem prob = stage("assemble", [&] { return assemble_generalized(res.summits, cfg.mode, sigma0); });
    res.solution = stage("solve", [&] { return solve_generalized(prob, cfg.n_eigs, true); });

    stage("report", [&] {
        const auto& sol = res.solution;
        const Index n_found = sol.values.size();
        std::vector<const Summit*> row_summit;
        std::vector<int> row_vertex = prob.vertex_of_row;
        if (cfg.mode == AssemblyMode::Mixed) {
            for (int v = 0; v < nv; ++v)
                for (const auto& s : res.summits.summits[v]) row_summit.push_back(&s);
        } else {
            for (const auto& s : res.summits.summits[sigma0]) row_summit.push_back(&s);
        }
        std::string eig = "index,eigenvalue\n";
        std::string comp = "eig_index,vertex,chrom,position,coefficient\n";
        std::string support = "eig_index";
        for (const auto& l : res.nerve.labels) support += "," + l;
        support += "\n";
        std::string diam = "eig_index,eigenvalue,support_size,chromosomes,diameter\n";
        std::string extents = "eig_index,chrom,min_position,max_position,span\n";
        int all_vertices = 0;
        for (Index j = 0; j < n_found; ++j) {
            const double lam = sol.values(j);
            eig += std::to_string(j) + "," + io::format_double(lam) + "\n";
            std::vector<int> hit(static_cast<std::size_t>(nv), 0);
            std::map<std::string, std::pair<long long, long long>> span;
            int size = 0;
            for (Index r = 0; r < sol.vectors.rows(); ++r) {
                const double c = sol.vectors(r, j);
                if (!(std::abs(c) > cfg.support_tol)) continue;
                const Summit& s = *row_summit[r];
                const int v = row_vertex[r];
                comp += std::to_string(j) + "," + res.nerve.labels[v] + "," + s.chrom + "," + std::to_string(s.position) +
                        "," + io::format_double(c) + "\n";
                hit[v] = 1;
                ++size;
                auto it = span.find(s.chrom);
                if (it == span.end()) span.emplace(s.chrom, std::make_pair(s.position, s.position));
                else {
                    it->second.first = std::min(it->second.first, s.position);
                    it->second.second = std::max(it->second.second, s.position);
                }
            }
            support += std::to_string(j);
            for (int h : hit) support += h ? ",1" : ",0";
            support += "\n";
            if (std::all_of(hit.begin(), hit.end(), [](int h) { return h; })) ++all_vertices;
            std::string chroms, dtext = "0";
            for (const auto& [c, mm] : span) {
                chroms += (chroms.empty() ? "" : ";") + c;
                extents += std::to_string(j) + "," + c + "," + std::to_string(mm.first) + "," + std::to_string(mm.second) +
                           "," + std::to_string(mm.second - mm.first) + "\n";
            }
            if (span.size() > 1) dtext = "inf";
            else if (span.size() == 1) dtext = std::to_string(span.begin()->second.second - span.begin()->second.first);
            diam += std::to_string(j) + "," + io::format_double(lam) + "," + std::to_string(size) + "," + chroms + "," +
                    dtext + "\n";
        }
        std::vector<std::pair<std::string, Summit>> rows;
        for (int v = 0; v < nv; ++v)
            for (const auto& s : res.summits.summits[v]) rows.emplace_back(res.nerve.labels[v], s);

        json summary;
        summary["n_cells"] = matrix.n_cells;
        summary["n_features"] = matrix.n_features();
        summary["cover_sets"] = json::object();
        for (std::size_t i = 0; i < cover.names.size(); ++i) summary["cover_sets"][cover.names[i]] = cover.sets[i].size();
        summary["nerve_vertices"] = res.nerve.labels;
        summary["nerve_edges"] = res.nerve.quiver.n_edges();
        summary["selector"] = selector_text(cfg.selector);
        summary["mode"] = cfg.mode == AssemblyMode::Mixed ? "mixed" : "combined";
        if (cfg.mode == AssemblyMode::Combined) summary["sigma0"] = res.nerve.labels[sigma0];
        summary["bandwidth"] = cfg.bandwidth;
        summary["knn"] = cfg.knn;
        summary["total_dim"] = res.summits.total_dim();
        summary["problem_dim"] = prob.stiffness.rows();
        summary["eigenpairs"] = n_found;
        summary["pattern_components"] = sol.n_components;
        summary["support_tol"] = cfg.support_tol;
        summary["supported_on_all_vertices"] = all_vertices;

        res.artifacts["eigenvalues.csv"] = eig;
        res.artifacts["components.csv"] = comp;
        res.artifacts["support.csv"] = support;
        res.artifacts["diameters.csv"] = diam;
        res.artifacts["extents.csv"] = extents;
        res.artifacts["summits.csv"] = io::summits_csv(rows);
        res.artifacts["summary.json"] = summary.dump(2) + "\n";
        return 0;
    });
    return res;
}

void write_pipeline_outputs(const PipelineResult& result, const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<fs::path> staged;
    try {
        for (const auto& [name, content] : result.artifacts) {
            fs::path tmp = dir / (name + ".partial");
            staged.push_back(tmp);
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << content;
            out.close();
            if (!out) throw FormatError("cannot write " + tmp.string());
        }
        for (const auto& [name, content] : result.artifacts) fs::rename(dir / (name + ".partial"), dir / name);
    } catch (...) {
        std::error_code ec;
        for (const auto& p : staged) fs::remove(p, ec);
        for (const auto& [name, content] : result.artifacts) fs::remove(dir / name, ec);
        throw;
    }
}

} // namespace quivlap
