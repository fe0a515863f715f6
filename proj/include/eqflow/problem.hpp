#ifndef EQFLOW_PROBLEM_HPP
#define EQFLOW_PROBLEM_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqflow/hamiltonian.hpp"
#include "eqflow/specflow.hpp"

namespace eqflow {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kProblemSchema = "eqflow-problem/1";
inline constexpr const char* kReportSchema = "eqflow-report/1";

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

struct OutputTargets {
    std::string report;    // empty: stdout
    std::string tracks;    // empty: no eigenvalue tracks
    std::string modes_csv; // empty: no per-mode table (hamiltonian only)
};

/// A parsed and semantically validated problem file.
struct Problem {
    std::string mode;  // "sfl" | "hamiltonian" | "demo-z2"
    Tolerances tol;
    std::optional<MatrixPath> path;              // sfl / demo-z2
    std::optional<HamiltonianFamily> family;     // hamiltonian
    bool cross_check = false;  // also run the Galerkin oracle and compare
    OutputTargets outputs;
    std::string digest;
};

/// FNV-1a hash of the canonical (key-sorted) dump of the document.
std::string input_digest(const Json& doc);

/// Shape checks only (throws SchemaError); no numerics are run.
void check_schema(const Json& doc);

/// Full parse: schema first, then semantic construction of paths, groups
/// and families (any numerics failure surfaces as DomainError).
Problem parse_problem(const Json& doc);
Problem load_problem(const std::string& file_path);

/// Static diagnostics without any flow computation: schema shape, group
/// axioms, character orthogonality, path symmetry/equivariance residuals,
/// symplectic residuals. Empty result means clean.
std::vector<std::string> validate_problem(const Json& doc);

struct RunOptions {
    int threads = 1;
    bool with_timings = true;
};

struct RunOutput {
    OrderedJson report;
    Verdict verdict = Verdict::Inconclusive;  // hamiltonian only
    bool is_hamiltonian = false;
    std::string tracks_csv;  // filled when the problem requests tracks
    std::string modes_csv;
};

/// Dispatches to the requested pipeline and assembles the report document.
/// The report body is deterministic; timings live under the final "timings"
/// key and are the only nondeterministic content.
RunOutput run_problem(const Problem& problem, const RunOptions& opts);

OrderedJson virtual_rep_json(const VirtualRep& rep);
OrderedJson flow_result_json(const FlowResult& result);
OrderedJson index_report_json(const IndexReport& report);

/// Applies "key=value" overrides (comma separated) to a tolerance set.
void apply_tolerance_overrides(Tolerances& tol, const std::string& spec);

}  // namespace eqflow

#endif
