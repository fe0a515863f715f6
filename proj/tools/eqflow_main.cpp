// Command-line front end: problem ingestion, run orchestration, report and
// plot-data emission.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "eqflow/problem.hpp"

namespace {

// Exit statuses: 0 success, 1 internal, 2 schema, 3 certification,
// 4 decomposition, 5 hypothesis violation, 6 domain/validation.
enum ExitCode {
    kOk = 0,
    kInternal = 1,
    kSchema = 2,
    kCertification = 3,
    kDecomposition = 4,
    kHypothesisViolated = 5,
    kDomain = 6,
};

struct CommonOptions {
    std::string input;
    std::string output;
    std::string tracks;
    std::string modes;
    std::string tolerance_overrides;
    int threads = 1;
    bool no_timings = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_modes) {
    cmd->add_option("--input,-i", opts.input, "problem file (JSON)")
        ->required();
    cmd->add_option("--output,-o", opts.output,
                    "report file (default: stdout)");
    cmd->add_option("--tracks", opts.tracks, "eigenvalue tracks CSV");
    if (with_modes)
        cmd->add_option("--modes", opts.modes, "per-mode contribution CSV");
    cmd->add_option("--threads", opts.threads, "worker threads")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tolerances", opts.tolerance_overrides,
                    "comma-separated key=value tolerance overrides");
    cmd->add_flag("--no-timings", opts.no_timings,
                  "omit the timings block from the report");
}

void emit_error(const char* kind, const std::string& message) {
    eqflow::OrderedJson err;
    err["error"] = {{"kind", kind}, {"message", message}};
    std::cout << err.dump(2) << std::endl;
    std::cerr << "eqflow: " << kind << ": " << message << std::endl;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw eqflow::Error("cannot write " + path);
    out << content;
}

eqflow::Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw eqflow::SchemaError("cannot open problem file " + path);
    try {
        eqflow::Json doc;
        in >> doc;
        return doc;
    } catch (const eqflow::Json::parse_error& e) {
        throw eqflow::SchemaError(std::string("problem file is not valid "
                                              "JSON: ") +
                                  e.what());
    }
}

int run_subcommand(const std::string& mode, const CommonOptions& opts) {
    eqflow::Json doc = load_json(opts.input);
    eqflow::Problem problem = eqflow::parse_problem(doc);
    if (problem.mode != mode)
        throw eqflow::SchemaError("problem file declares mode \"" +
                                  problem.mode + "\" but the subcommand is \"" +
                                  mode + "\"");
    if (!opts.output.empty()) problem.outputs.report = opts.output;
    if (!opts.tracks.empty()) problem.outputs.tracks = opts.tracks;
    if (!opts.modes.empty()) problem.outputs.modes_csv = opts.modes;
    eqflow::apply_tolerance_overrides(problem.tol, opts.tolerance_overrides);

    eqflow::RunOptions run_opts;
    run_opts.threads = opts.threads;
    run_opts.with_timings = !opts.no_timings;
    eqflow::RunOutput out = eqflow::run_problem(problem, run_opts);

    std::string body = out.report.dump(2) + "\n";
    if (problem.outputs.report.empty())
        std::cout << body;
    else
        write_file(problem.outputs.report, body);
    if (!problem.outputs.tracks.empty())
        write_file(problem.outputs.tracks, out.tracks_csv);
    if (!problem.outputs.modes_csv.empty() && !out.modes_csv.empty())
        write_file(problem.outputs.modes_csv, out.modes_csv);

    if (out.is_hamiltonian &&
        out.verdict == eqflow::Verdict::HypothesisViolated)
        return kHypothesisViolated;
    return kOk;
}

int run_validate(const CommonOptions& opts) {
    eqflow::Json doc = load_json(opts.input);
    std::vector<std::string> diags = eqflow::validate_problem(doc);
    eqflow::OrderedJson report;
    report["schema"] = eqflow::kReportSchema;
    report["mode"] = "validate";
    report["input_digest"] = eqflow::input_digest(doc);
    report["diagnostics"] = diags;
    report["clean"] = diags.empty();
    std::string body = report.dump(2) + "\n";
    if (opts.output.empty())
        std::cout << body;
    else
        write_file(opts.output, body);
    for (const std::string& d : diags) std::cerr << "diagnostic: " << d << "\n";
    return diags.empty() ? kOk : kDomain;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equivariant spectral flow engine"};
    app.require_subcommand(1);

    CommonOptions sfl_opts, ham_opts, demo_opts, val_opts;
    CLI::App* sfl = app.add_subcommand(
        "sfl", "classical and equivariant spectral flow of a matrix path");
    add_common(sfl, sfl_opts, false);
    CLI::App* ham = app.add_subcommand(
        "hamiltonian",
        "index formula and bifurcation verdict for a Hamiltonian family");
    add_common(ham, ham_opts, true);
    CLI::App* demo = app.add_subcommand(
        "demo-z2", "blockdiag(A, -A) example with the swap-sign Z2 action");
    add_common(demo, demo_opts, false);
    CLI::App* val = app.add_subcommand(
        "validate", "static invariant checks without flow computation");
    val->add_option("--input,-i", val_opts.input, "problem file (JSON)")
        ->required();
    val->add_option("--output,-o", val_opts.output,
                    "diagnostics file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sfl->parsed()) return run_subcommand("sfl", sfl_opts);
        if (ham->parsed()) return run_subcommand("hamiltonian", ham_opts);
        if (demo->parsed()) return run_subcommand("demo-z2", demo_opts);
        if (val->parsed()) return run_validate(val_opts);
    } catch (const eqflow::SchemaError& e) {
        emit_error("schema", e.what());
        return kSchema;
    } catch (const eqflow::CertificationError& e) {
        emit_error("certification", e.what());
        return kCertification;
    } catch (const eqflow::DecompositionError& e) {
        emit_error("decomposition", e.what());
        return kDecomposition;
    } catch (const eqflow::DomainError& e) {
        emit_error("domain", e.what());
        return kDomain;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return kInternal;
    }
    return kInternal;
}
