#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quivlap/io.hpp"
#include "quivlap/pipeline.hpp"
#include "quivlap/reduction.hpp"
#include "quivlap/stability.hpp"
#include "quivlap/surgery.hpp"

using namespace quivlap;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json vec_json(const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json checks_json(const std::vector<BoundCheck>& checks) {
    json out = json::array();
    for (const auto& c : checks)
        out.push_back({{"name", c.name},
                       {"certified", c.certified},
                       {"holds", c.holds},
                       {"worst_margin", c.worst_margin},
                       {"checked", c.checked}});
    return out;
}

json relation_json(const SpectralRelation& r) { return {{"lower", r.lower}, {"upper", r.upper}, {"shift", r.shift}}; }

json report_json(const SurgeryReport& r) {
    json j;
    j["operation"] = r.operation;
    j["before"] = vec_json(r.before);
    j["after"] = vec_json(r.after);
    j["checks"] = checks_json(r.checks);
    j["constants"] = json::object();
    for (const auto& [k, v] : r.constants) j["constants"][k] = v;
    if (r.relation) j["relation"] = relation_json(*r.relation);
    j["certified_ok"] = r.certified_ok();
    return j;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") std::cout << text;
    else io::write_text_atomic(out, text);
}

json load_args(const std::string& path) {
    if (path.empty()) return json::object();
    try {
        return json::parse(io::read_text(path));
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

template <Scalar S>
void run_laplacian(const std::string& bundle, const std::string& out) {
    auto sheaf = io::load_sheaf_bundle<S>(bundle);
    emit(io::matrix_csv<S>(laplacian(sheaf).coeffs()), out);
}

template <Scalar S>
void run_sections(const std::string& bundle, double tol, const std::string& out) {
    auto sheaf = io::load_sheaf_bundle<S>(bundle);
    auto basis = sections(sheaf, tol);
    std::cout << json{{"dimension", basis.dim()}, {"total_dim", sheaf.total_dim()}}.dump() << "\n";
    if (!out.empty()) io::write_text_atomic(out, io::matrix_csv<S>(basis.basis()));
}

template <Scalar S>
void run_spectrum(const std::string& bundle, Index k, const std::string& out) {
    auto sheaf = io::load_sheaf_bundle<S>(bundle);
    RVec values = k > 0 ? approximate_sections(sheaf, std::min(k, sheaf.total_dim())).values : spectrum(sheaf);
    std::string text = "index,eigenvalue\n";
    for (Index i = 0; i < values.size(); ++i) text += std::to_string(i) + "," + io::format_double(values(i)) + "\n";
    emit(text, out);
}

template <Scalar S>
void run_stability(const std::string& a, const std::string& b, const std::string& tau, double r, const std::string& out) {
    auto source = io::load_rep_bundle<S>(a);
    auto target = io::load_rep_bundle<S>(b);
    auto t = io::load_transformation<S>(tau, source, target);
    DefectReport d = defect(t);
    TransferReport tr = eigenvalue_transfer(t);
    json j;
    j["defect"] = d.total;
    j["defect_per_edge"] = d.per_edge;
    j["kappa"] = tr.kappa;
    j["pinv_norm"] = tr.pinv_norm;
    j["nullity"] = tr.nullity;
    j["source_eigenvalues"] = vec_json(tr.source_eigs);
    j["target_eigenvalues"] = vec_json(tr.target_eigs);
    j["transfer_bounds"] = tr.bounds;
    j["morphism_bounds"] = tr.morphism_bounds;
    j["transfer_violations"] = tr.violations();
    DistanceReport dr = spectral_distance_bound(t, r);
    j["distance"] = {{"swapped", dr.swapped},
                     {"n", dr.n},
                     {"m", dr.m},
                     {"nullity", dr.nullity},
                     {"adjoint_nullity", dr.adjoint_nullity},
                     {"c", dr.c},
                     {"kappa", dr.kappa},
                     {"defect", dr.defect},
                     {"adjoint_defect", dr.adjoint_defect},
                     {"r", dr.r},
                     {"radius", dr.radius},
                     {"W1", dr.w1},
                     {"C", dr.bound},
                     {"coupling_cost", dr.coupling_cost},
                     {"coupling_valid", dr.coupling_valid}};
    emit(j.dump(2) + "\n", out);
}

template <Scalar S>
SurgeryResult<S> run_surgery(const QuiverSheaf<S>& sheaf, const std::string& op, const json& args) {
    try {
        if (op == "edges") return remove_edges(sheaf, args.at("edges").get<std::vector<std::string>>());
        if (op == "vertices") return remove_vertices(sheaf, args.at("vertices").get<std::vector<int>>());
        if (op == "kron") return kron_reduce(sheaf, args.at("vertices").get<std::vector<int>>());
        if (op == "identity_loops") return remove_identity_loops(sheaf);
        if (op == "homotopy") {
            std::vector<EdgePairing> pairs;
            for (const auto& p : args.at("pairs"))
                pairs.push_back({p.at("first").get<std::string>(), p.at("second").get<std::string>(),
                                 p.at("common_vertex").get<int>()});
            return homotopy(sheaf, pairs);
        }
        if (op == "dedup") {
            std::vector<ParallelPair<S>> pairs;
            for (const auto& p : args.at("pairs"))
                pairs.push_back({p.at("keep").get<std::string>(), p.at("drop").get<std::string>(), std::nullopt});
            return remove_parallel_edges(sheaf, pairs);
        }
    } catch (const json::exception& e) {
        throw FormatError("reduce arguments: " + std::string(e.what()));
    }
    throw PreconditionViolation("unknown operation '" + op + "'");
}

template <Scalar S>
json run_reduce_sheaf(const std::string& bundle, const std::string& op, const json& args, const std::string& lap_out) {
    auto res = run_surgery(io::load_sheaf_bundle<S>(bundle), op, args);
    if (!lap_out.empty()) io::write_text_atomic(lap_out, io::matrix_csv<S>(laplacian(res.sheaf).coeffs()));
    json j = report_json(res.report);
    j["vertices"] = res.sheaf.quiver().n_vertices();
    j["edges"] = json::array();
    for (const Edge& e : res.sheaf.quiver().edges()) j["edges"].push_back({{"id", e.id}, {"src", e.src}, {"tgt", e.tgt}});
    return j;
}

json run_reduce_selector(const std::string& bundle, const std::string& op, const json& args, const std::string& lap_out) {
    SelectorAssignment sel = io::load_selector_bundle(bundle);
    json j;
    j["operation"] = op;
    if (op == "combined") {
        int sigma0 = 0;
        if (args.contains("sigma0")) {
            const json& s = args.at("sigma0");
            sigma0 = s.is_string() ? sel.nerve.vertex_of_label(s.get<std::string>()) : s.get<int>();
        }
        CombinedReduction r = reduce_combined(sel, sigma0, args.value("trace", true));
        j["sigma0"] = sel.nerve.labels.at(static_cast<std::size_t>(sigma0));
        j["spectrum"] = vec_json(r.spectrum);
        j["kernel_dim"] = r.kernel_dim;
        j["full_spectrum"] = vec_json(r.full_spectrum);
        j["full_section_dim"] = r.full_section_dim;
        j["checks"] = checks_json(r.checks);
        if (r.trace) {
            j["trace"] = {{"c1", r.trace->c1}, {"c2", r.trace->c2}, {"shift", r.trace->shift}, {"steps", json::array()}};
            for (const auto& s : r.trace->steps)
                j["trace"]["steps"].push_back({{"operation", s.operation}, {"relation", relation_json(s.relation)}});
        }
        j["certified_ok"] = r.certified_ok();
        if (!lap_out.empty()) io::write_text_atomic(lap_out, io::matrix_csv<double>(laplacian(r.sheaf).coeffs()));
    } else {
        MixedReduction r = reduce_mixed(sel);
        j["spectrum"] = vec_json(r.spectrum);
        j["kernel_dim"] = r.kernel_dim;
        j["full_spectrum"] = vec_json(r.full_spectrum);
        j["full_section_dim"] = r.full_section_dim;
        j["shift"] = r.shift;
        j["checks"] = checks_json(r.checks);
        j["certified_ok"] = r.certified_ok();
        if (!lap_out.empty()) io::write_text_atomic(lap_out, io::matrix_csv<double>(laplacian(r.sheaf).coeffs()));
    }
    return j;
}

AssemblyMode parse_mode(const std::string& s) {
    if (s == "mixed") return AssemblyMode::Mixed;
    if (s == "combined") return AssemblyMode::Combined;
    throw PreconditionViolation("mode must be 'mixed' or 'combined'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral analysis of quiver representations and sheaves"};
    app.require_subcommand(1);

    std::string bundle, out, tau, bundle_b, op, args_path, report, lap_out;
    double tol = kDefaultTol, r = -1.0;
    Index k = 0;

    auto* lap = app.add_subcommand("laplacian", "Write the Laplacian matrix of a bundle");
    lap->add_option("bundle", bundle)->required()->check(CLI::ExistingFile);
    lap->add_option("--out", out, "CSV path, stdout when omitted");

    auto* sec = app.add_subcommand("sections", "Section dimension and basis");
    sec->add_option("bundle", bundle)->required()->check(CLI::ExistingFile);
    sec->add_option("--tol", tol)->capture_default_str();
    sec->add_option("--out", out, "CSV path for the basis");

    auto* spec = app.add_subcommand("spectrum", "Smallest Laplacian eigenvalues");
    spec->add_option("bundle", bundle)->required()->check(CLI::ExistingFile);
    spec->add_option("-k", k, "number of eigenvalues, all when 0");
    spec->add_option("--out", out);

    auto* stab = app.add_subcommand("stability", "Transfer and distance bounds for a transformation");
    stab->add_option("source", bundle)->required()->check(CLI::ExistingFile);
    stab->add_option("target", bundle_b)->required()->check(CLI::ExistingFile);
    stab->add_option("--tau", tau)->required()->check(CLI::ExistingFile);
    stab->add_option("--r", r, "edge map norm bound, largest map norm when omitted");
    stab->add_option("--out", out);

    auto* red = app.add_subcommand("reduce", "Apply a section-preserving reduction");
    red->add_option("bundle", bundle)->required()->check(CLI::ExistingFile);
    red->add_option("--op", op)
        ->required()
        ->check(CLI::IsMember({"edges", "vertices", "homotopy", "dedup", "kron", "identity_loops", "combined", "mixed"}));
    red->add_option("--args", args_path)->check(CLI::ExistingFile);
    red->add_option("--report", report, "JSON path, stdout when omitted");
    red->add_option("--laplacian-out", lap_out, "CSV path for the reduced Laplacian");

    PipelineConfig cfg;
    std::string selector = "top_frequency:k=50", mode = "mixed", sigma0, embedding;
    auto* pipe = app.add_subcommand("pipeline", "Cover, selection and spectral analysis of a feature matrix");
    pipe->add_option("--matrix", cfg.matrix)->required()->check(CLI::ExistingFile);
    pipe->add_option("--labels", cfg.labels)->required()->check(CLI::ExistingFile);
    pipe->add_option("--embedding", embedding)->check(CLI::ExistingFile);
    pipe->add_option("--knn", cfg.knn)->capture_default_str();
    pipe->add_option("--embed-dims", cfg.embed_dims)->capture_default_str();
    pipe->add_option("--max-order", cfg.max_order)->capture_default_str();
    pipe->add_option("--selector", selector)->capture_default_str();
    pipe->add_option("--max-summits", cfg.max_summits)->capture_default_str();
    pipe->add_option("--bandwidth", cfg.bandwidth)->capture_default_str();
    pipe->add_option("--mode", mode)->capture_default_str()->check(CLI::IsMember({"mixed", "combined"}));
    pipe->add_option("--sigma0", sigma0, "nerve vertex label for the combined mode");
    pipe->add_option("--n-eigs", cfg.n_eigs)->capture_default_str();
    pipe->add_option("--support-tol", cfg.support_tol)->capture_default_str();
    pipe->add_option("--out", out)->required();

    SynthConfig sc;
    auto* syn = app.add_subcommand("synth", "Write a synthetic data set with planted regions");
    syn->add_option("--communities", sc.communities)->capture_default_str();
    syn->add_option("--cells", sc.cells)->capture_default_str();
    syn->add_option("--positions", sc.features)->capture_default_str();
    syn->add_option("--seed", sc.seed)->capture_default_str();
    syn->add_option("--spacing", sc.spacing)->capture_default_str();
    syn->add_option("--out", out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        auto field = [&] { return io::read_bundle_header(bundle).field; };
        if (*lap) {
            field() == io::Field::Real ? run_laplacian<double>(bundle, out) : run_laplacian<cdouble>(bundle, out);
        } else if (*sec) {
            field() == io::Field::Real ? run_sections<double>(bundle, tol, out) : run_sections<cdouble>(bundle, tol, out);
        } else if (*spec) {
            field() == io::Field::Real ? run_spectrum<double>(bundle, k, out) : run_spectrum<cdouble>(bundle, k, out);
        } else if (*stab) {
            field() == io::Field::Real ? run_stability<double>(bundle, bundle_b, tau, r, out)
                                       : run_stability<cdouble>(bundle, bundle_b, tau, r, out);
        } else if (*red) {
            json args = load_args(args_path);
            json j;
            if (op == "combined" || op == "mixed") j = run_reduce_selector(bundle, op, args, lap_out);
            else if (field() == io::Field::Real) j = run_reduce_sheaf<double>(bundle, op, args, lap_out);
            else j = run_reduce_sheaf<cdouble>(bundle, op, args, lap_out);
            emit(j.dump(2) + "\n", report);
        } else if (*pipe) {
            cfg.selector = parse_selector_spec(selector);
            cfg.mode = parse_mode(mode);
            if (!embedding.empty()) cfg.embedding = fs::path(embedding);
            if (!sigma0.empty()) cfg.sigma0 = sigma0;
            PipelineResult res = run_pipeline(cfg);
            write_pipeline_outputs(res, out);
            std::cerr << "nerve vertices: " << res.nerve.quiver.n_vertices() << ", eigenpairs: " << res.solution.values.size()
                      << "\n";
        } else if (*syn) {
            write_synth(synth_data(sc), out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
