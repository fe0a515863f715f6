#include "eqflow/problem.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace eqflow {

std::string input_digest(const Json& doc) {
    std::string canonical = doc.dump();  // nlohmann::json sorts object keys
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    std::ostringstream os;
    os << "fnv1a:" << std::hex << std::setfill('0') << std::setw(16) << hash;
    return os.str();
}

namespace {

[[noreturn]] void schema_fail(const std::string& where,
                              const std::string& what) {
    throw SchemaError("problem file: " + where + ": " + what);
}

const Json& member(const Json& doc, const std::string& key,
                   const std::string& where) {
    if (!doc.is_object()) schema_fail(where, "expected an object");
    auto it = doc.find(key);
    if (it == doc.end()) schema_fail(where, "missing key \"" + key + "\"");
    return *it;
}

Matrix parse_matrix(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        schema_fail(where, "expected a non-empty array of rows");
    const size_t rows = j.size();
    size_t cols = 0;
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].empty())
            schema_fail(where, "row " + std::to_string(r) +
                                   " is not a non-empty array");
        if (r == 0)
            cols = j[r].size();
        else if (j[r].size() != cols)
            schema_fail(where, "ragged rows: row " + std::to_string(r) +
                                   " has " + std::to_string(j[r].size()) +
                                   " entries, expected " +
                                   std::to_string(cols));
    }
    Matrix m(static_cast<int>(rows), static_cast<int>(cols));
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) {
            const Json& v = j[r][c];
            if (!v.is_number())
                schema_fail(where, "entry (" + std::to_string(r) + ", " +
                                       std::to_string(c) +
                                       ") is not a number");
            m(static_cast<int>(r), static_cast<int>(c)) = v.get<double>();
        }
    return m;
}

struct RawPath {
    std::string kind;
    Matrix a0, a1;
    std::vector<Matrix> coefficients;
    std::vector<double> grid;
    std::vector<Matrix> values;
    int order = 0;
};

RawPath parse_raw_path(const Json& j, const std::string& where) {
    RawPath raw;
    const Json& kind = member(j, "kind", where);
    if (!kind.is_string()) schema_fail(where, "\"kind\" must be a string");
    raw.kind = kind.get<std::string>();
    auto require_square = [&](const Matrix& m, const std::string& w) {
        if (m.rows() != m.cols()) schema_fail(w, "matrix is not square");
    };
    if (raw.kind == "affine") {
        raw.a0 = parse_matrix(member(j, "a0", where), where + ".a0");
        raw.a1 = parse_matrix(member(j, "a1", where), where + ".a1");
        require_square(raw.a0, where + ".a0");
        require_square(raw.a1, where + ".a1");
        if (raw.a0.rows() != raw.a1.rows())
            schema_fail(where, "a0 and a1 have different orders");
        raw.order = static_cast<int>(raw.a0.rows());
    } else if (raw.kind == "polynomial") {
        const Json& cs = member(j, "coefficients", where);
        if (!cs.is_array() || cs.empty())
            schema_fail(where, "\"coefficients\" must be a non-empty array");
        for (size_t i = 0; i < cs.size(); ++i) {
            std::string w = where + ".coefficients[" + std::to_string(i) + "]";
            raw.coefficients.push_back(parse_matrix(cs[i], w));
            require_square(raw.coefficients.back(), w);
            if (raw.coefficients.back().rows() != raw.coefficients[0].rows())
                schema_fail(w, "coefficient orders differ");
        }
        raw.order = static_cast<int>(raw.coefficients[0].rows());
    } else if (raw.kind == "samples") {
        const Json& grid = member(j, "grid", where);
        const Json& values = member(j, "values", where);
        if (!grid.is_array() || grid.size() < 2)
            schema_fail(where, "\"grid\" must hold at least two numbers");
        for (const Json& g : grid) {
            if (!g.is_number())
                schema_fail(where, "grid entries must be numbers");
            raw.grid.push_back(g.get<double>());
        }
        if (raw.grid.front() != 0.0 || raw.grid.back() != 1.0)
            schema_fail(where, "grid must start at 0 and end at 1");
        for (size_t i = 1; i < raw.grid.size(); ++i)
            if (raw.grid[i] <= raw.grid[i - 1])
                schema_fail(where, "grid is not strictly increasing");
        if (!values.is_array() || values.size() != raw.grid.size())
            schema_fail(where, "\"values\" must match the grid length");
        for (size_t i = 0; i < values.size(); ++i) {
            std::string w = where + ".values[" + std::to_string(i) + "]";
            raw.values.push_back(parse_matrix(values[i], w));
            require_square(raw.values.back(), w);
            if (raw.values.back().rows() != raw.values[0].rows())
                schema_fail(w, "sample orders differ");
        }
        raw.order = static_cast<int>(raw.values[0].rows());
    } else {
        schema_fail(where, "unknown path kind \"" + raw.kind +
                               "\" (expected affine, polynomial or samples)");
    }
    return raw;
}

struct RawGroup {
    bool present = false;
    std::string kind;  // trivial | finite | s1 | product
    std::vector<Matrix> elements;
    std::vector<FiniteIrrep> irreps;
    Matrix generator;
    std::vector<int> extra_weights;
    std::optional<bool> nice;
};

std::vector<FiniteIrrep> parse_irreps(const Json& j, const std::string& where) {
    std::vector<FiniteIrrep> out;
    if (j.is_string()) return builtin_irrep_table(j.get<std::string>());
    if (!j.is_array() || j.empty())
        schema_fail(where,
                    "\"irreps\" must be a builtin name or a non-empty array");
    for (size_t i = 0; i < j.size(); ++i) {
        std::string w = where + "[" + std::to_string(i) + "]";
        const Json& e = j[i];
        FiniteIrrep ir;
        const Json& label = member(e, "label", w);
        if (!label.is_string()) schema_fail(w, "\"label\" must be a string");
        ir.label = label.get<std::string>();
        const Json& dim = member(e, "dim", w);
        if (!dim.is_number_integer())
            schema_fail(w, "\"dim\" must be an integer");
        ir.dim = dim.get<int>();
        const Json& schur = member(e, "schur", w);
        if (!schur.is_number_integer())
            schema_fail(w, "\"schur\" must be an integer");
        ir.schur = schur.get<int>();
        const Json& chars = member(e, "characters", w);
        if (!chars.is_array())
            schema_fail(w, "\"characters\" must be an array");
        for (const Json& c : chars) {
            if (!c.is_number()) schema_fail(w, "characters must be numbers");
            ir.characters.push_back(c.get<double>());
        }
        out.push_back(std::move(ir));
    }
    return out;
}

RawGroup parse_raw_group(const Json& j, const std::string& where) {
    RawGroup raw;
    raw.present = true;
    const Json& kind = member(j, "kind", where);
    if (!kind.is_string()) schema_fail(where, "\"kind\" must be a string");
    raw.kind = kind.get<std::string>();
    if (j.contains("nice")) {
        if (!j["nice"].is_boolean())
            schema_fail(where, "\"nice\" must be a boolean");
        raw.nice = j["nice"].get<bool>();
    }
    auto parse_elements = [&]() {
        const Json& es = member(j, "elements", where);
        if (!es.is_array() || es.empty())
            schema_fail(where, "\"elements\" must be a non-empty array");
        for (size_t i = 0; i < es.size(); ++i) {
            std::string w = where + ".elements[" + std::to_string(i) + "]";
            raw.elements.push_back(parse_matrix(es[i], w));
            if (raw.elements.back().rows() != raw.elements.back().cols())
                schema_fail(w, "matrix is not square");
            if (raw.elements.back().rows() != raw.elements[0].rows())
                schema_fail(w, "element orders differ");
        }
        raw.irreps = parse_irreps(member(j, "irreps", where), where + ".irreps");
    };
    auto parse_generator = [&]() {
        raw.generator =
            parse_matrix(member(j, "generator", where), where + ".generator");
        if (raw.generator.rows() != raw.generator.cols())
            schema_fail(where + ".generator", "matrix is not square");
        if (j.contains("extra_weights")) {
            const Json& ws = j["extra_weights"];
            if (!ws.is_array())
                schema_fail(where, "\"extra_weights\" must be an array");
            for (const Json& w : ws) {
                if (!w.is_number_integer())
                    schema_fail(where, "extra weights must be integers");
                raw.extra_weights.push_back(w.get<int>());
            }
        }
    };
    if (raw.kind == "trivial") {
        // nothing else to parse
    } else if (raw.kind == "finite") {
        parse_elements();
    } else if (raw.kind == "s1") {
        parse_generator();
    } else if (raw.kind == "product") {
        parse_elements();
        parse_generator();
    } else {
        schema_fail(where, "unknown group kind \"" + raw.kind + "\"");
    }
    return raw;
}

struct RawProblem {
    std::string mode;
    std::optional<RawPath> path;
    RawGroup group;
    // hamiltonian sub-document
    int n = 0;
    std::optional<RawPath> s;
    RawGroup g0;
    bool cross_check = false;
    Tolerances tol;
    OutputTargets outputs;
};

void parse_tolerances(const Json& j, Tolerances& tol,
                      const std::string& where) {
    static const std::set<std::string> known{
        "gap_rel",       "decomp_round",        "witness_points",
        "initial_subintervals", "max_bisections", "validation_samples",
        "action_commute", "jump_margin",        "coarse_first"};
    if (!j.is_object()) schema_fail(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (known.find(it.key()) == known.end())
            schema_fail(where, "unknown tolerance \"" + it.key() + "\"");
        const Json& v = it.value();
        auto number = [&]() {
            if (!v.is_number()) schema_fail(where, it.key() + " must be a number");
            return v.get<double>();
        };
        auto integer = [&]() {
            if (!v.is_number_integer())
                schema_fail(where, it.key() + " must be an integer");
            return v.get<int>();
        };
        if (it.key() == "gap_rel") tol.gap_rel = number();
        else if (it.key() == "decomp_round") tol.decomp_round = number();
        else if (it.key() == "action_commute") tol.action_commute = number();
        else if (it.key() == "jump_margin") tol.jump_margin = number();
        else if (it.key() == "witness_points") tol.witness_points = integer();
        else if (it.key() == "initial_subintervals")
            tol.initial_subintervals = integer();
        else if (it.key() == "max_bisections") tol.max_bisections = integer();
        else if (it.key() == "validation_samples")
            tol.validation_samples = integer();
        else if (it.key() == "coarse_first") {
            if (!v.is_boolean())
                schema_fail(where, "coarse_first must be a boolean");
            tol.coarse_first = v.get<bool>();
        }
    }
}

RawProblem parse_shapes(const Json& doc) {
    RawProblem raw;
    if (!doc.is_object()) schema_fail("$", "document must be an object");
    const Json& schema = member(doc, "schema", "$");
    if (!schema.is_string() || schema.get<std::string>() != kProblemSchema)
        schema_fail("$.schema", std::string("expected \"") + kProblemSchema +
                                    "\"");
    const Json& mode = member(doc, "mode", "$");
    if (!mode.is_string()) schema_fail("$.mode", "must be a string");
    raw.mode = mode.get<std::string>();
    if (raw.mode != "sfl" && raw.mode != "hamiltonian" &&
        raw.mode != "demo-z2")
        schema_fail("$.mode", "unknown mode \"" + raw.mode + "\"");

    if (doc.contains("tolerances"))
        parse_tolerances(doc["tolerances"], raw.tol, "$.tolerances");

    if (doc.contains("outputs")) {
        const Json& out = doc["outputs"];
        if (!out.is_object()) schema_fail("$.outputs", "expected an object");
        auto str = [&](const char* key) -> std::string {
            if (!out.contains(key)) return {};
            if (!out[key].is_string())
                schema_fail("$.outputs", std::string(key) + " must be a string");
            return out[key].get<std::string>();
        };
        raw.outputs.report = str("report");
        raw.outputs.tracks = str("tracks");
        raw.outputs.modes_csv = str("modes");
    }

    if (raw.mode == "hamiltonian") {
        const Json& h = member(doc, "hamiltonian", "$");
        const Json& n = member(h, "n", "$.hamiltonian");
        if (!n.is_number_integer() || n.get<int>() < 1)
            schema_fail("$.hamiltonian.n", "must be an integer >= 1");
        raw.n = n.get<int>();
        raw.s = parse_raw_path(member(h, "s", "$.hamiltonian"),
                               "$.hamiltonian.s");
        if (raw.s->order != 2 * raw.n)
            schema_fail("$.hamiltonian.s",
                        "S(lambda) must be 2n x 2n for n = " +
                            std::to_string(raw.n));
        if (h.contains("group")) {
            raw.g0 = parse_raw_group(h["group"], "$.hamiltonian.group");
            if (raw.g0.kind != "trivial" && raw.g0.kind != "finite")
                schema_fail("$.hamiltonian.group",
                            "G0 must be trivial or finite");
        }
        if (h.contains("cross_check")) {
            if (!h["cross_check"].is_boolean())
                schema_fail("$.hamiltonian.cross_check", "must be a boolean");
            raw.cross_check = h["cross_check"].get<bool>();
        }
    } else {
        raw.path = parse_raw_path(member(doc, "path", "$"), "$.path");
        if (raw.mode == "demo-z2" && doc.contains("group"))
            schema_fail("$.group",
                        "demo-z2 takes no group (the Z2 action is built in)");
        if (doc.contains("group"))
            raw.group = parse_raw_group(doc["group"], "$.group");
    }
    return raw;
}

GroupPtr build_group(const RawGroup& raw, int ambient_dim,
                     const Tolerances& tol) {
    if (!raw.present || raw.kind == "trivial")
        return GroupSpec::trivial(ambient_dim);
    if (raw.kind == "finite")
        return GroupSpec::finite(raw.elements, raw.irreps, raw.nice, tol);
    if (raw.kind == "s1")
        return GroupSpec::circle(raw.generator, raw.extra_weights, tol);
    return GroupSpec::product(raw.elements, raw.irreps, raw.generator,
                              raw.extra_weights, raw.nice, tol);
}

MatrixPath build_path(const RawPath& raw, GroupPtr group,
                      const Tolerances& tol) {
    if (raw.kind == "affine")
        return MatrixPath::affine(raw.a0, raw.a1, std::move(group), tol);
    if (raw.kind == "polynomial")
        return MatrixPath::polynomial(raw.coefficients, std::move(group), tol);
    return MatrixPath::samples(raw.grid, raw.values, std::move(group), tol);
}

}  // namespace

void check_schema(const Json& doc) { parse_shapes(doc); }

Problem parse_problem(const Json& doc) {
    RawProblem raw = parse_shapes(doc);
    Problem problem;
    problem.mode = raw.mode;
    problem.tol = raw.tol;
    problem.outputs = raw.outputs;
    problem.cross_check = raw.cross_check;
    problem.digest = input_digest(doc);
    if (raw.mode == "hamiltonian") {
        GroupPtr g0 = build_group(raw.g0, 2 * raw.n, raw.tol);
        MatrixPath s = build_path(*raw.s, std::move(g0), raw.tol);
        problem.family.emplace(raw.n, std::move(s), raw.tol);
    } else if (raw.mode == "sfl") {
        GroupPtr group = build_group(raw.group, raw.path->order, raw.tol);
        problem.path = build_path(*raw.path, std::move(group), raw.tol);
    } else {  // demo-z2: the base path carries no group action
        GroupPtr group = GroupSpec::trivial(raw.path->order);
        problem.path = build_path(*raw.path, std::move(group), raw.tol);
    }
    return problem;
}

Problem load_problem(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw SchemaError("cannot open problem file " + file_path);
    Json doc;
    try {
        in >> doc;
    } catch (const Json::parse_error& e) {
        throw SchemaError(std::string("problem file is not valid JSON: ") +
                          e.what());
    }
    return parse_problem(doc);
}

std::vector<std::string> validate_problem(const Json& doc) {
    std::vector<std::string> diags;
    RawProblem raw;
    try {
        raw = parse_shapes(doc);
    } catch (const SchemaError& e) {
        diags.push_back(e.what());
        return diags;
    }
    const Tolerances& tol = raw.tol;

    auto check_group = [&](const RawGroup& g, const std::string& where) {
        if (!g.present || g.kind == "trivial") return;
        if (g.kind == "finite" || g.kind == "product") {
            for (auto& d : GroupSpec::check_finite(g.elements, g.irreps, tol))
                diags.push_back(where + ": " + d);
        }
        if (g.kind == "s1" || g.kind == "product") {
            for (auto& d : GroupSpec::check_circle(g.generator, tol))
                diags.push_back(where + ": " + d);
        }
        if (g.kind == "product" && !g.elements.empty()) {
            double scale = std::max(1.0, max_abs(g.generator));
            for (size_t i = 0; i < g.elements.size(); ++i) {
                double defect = max_abs(g.generator * g.elements[i] -
                                        g.elements[i] * g.generator);
                if (defect > tol.action_commute * scale * 1e2) {
                    std::ostringstream os;
                    os << where << ": element " << i
                       << " does not commute with the circle generator "
                       << "(defect " << defect << ")";
                    diags.push_back(os.str());
                }
            }
        }
    };
    auto check_path = [&](const RawPath& rp, const RawGroup& rg,
                          const std::string& where) {
        GroupPtr group;
        try {
            group = build_group(rg, rp.order, tol);
        } catch (const Error&) {
            return;  // group diagnostics already collected
        }
        // Build without the factory so every sample failure is reported.
        try {
            MatrixPath path = build_path(rp, group, tol);
            (void)path;
        } catch (const Error& e) {
            diags.push_back(where + ": " + e.what());
        }
    };

    if (raw.mode == "hamiltonian") {
        check_group(raw.g0, "$.hamiltonian.group");
        check_path(*raw.s, raw.g0, "$.hamiltonian.s");
        // Symplectic compatibility of the declared action.
        if (raw.g0.present && raw.g0.kind == "finite" &&
            !raw.g0.elements.empty() &&
            raw.g0.elements[0].rows() == 2 * raw.n) {
            Matrix j = build_J(raw.n);
            for (size_t i = 0; i < raw.g0.elements.size(); ++i) {
                const Matrix& g = raw.g0.elements[i];
                double defect = max_abs(g.transpose() * j * g - j);
                if (defect > tol.symplectic) {
                    std::ostringstream os;
                    os << "$.hamiltonian.group: element " << i
                       << " is not symplectic (||g^T J g - J|| = " << defect
                       << ")";
                    diags.push_back(os.str());
                }
            }
        }
    } else {
        check_group(raw.group, "$.group");
        check_path(*raw.path, raw.group, "$.path");
    }
    return diags;
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

OrderedJson group_json(const GroupPtr& group) {
    OrderedJson out;
    out["kind"] = group->kind_name();
    OrderedJson irreps = OrderedJson::array();
    for (const Irrep& ir : group->irreps()) {
        OrderedJson e;
        e["label"] = ir.label;
        e["dim"] = ir.dim;
        if (group->has_circle_factor()) e["weight"] = ir.weight;
        irreps.push_back(std::move(e));
    }
    out["irreps"] = std::move(irreps);
    return out;
}

OrderedJson certificate_json(const PartitionCertificate& cert) {
    OrderedJson out;
    out["subintervals"] = cert.intervals.size();
    out["max_depth"] = cert.max_depth;
    if (!cert.intervals.empty()) {
        double rmin = cert.intervals[0].radius, rmax = rmin, jmax = 0.0;
        size_t witnesses = 0;
        for (const CertifiedInterval& iv : cert.intervals) {
            rmin = std::min(rmin, iv.radius);
            rmax = std::max(rmax, iv.radius);
            jmax = std::max(jmax, iv.max_jump);
            witnesses += iv.witnesses.size();
        }
        out["min_radius"] = rmin;
        out["max_radius"] = rmax;
        out["max_projection_jump"] = jmax;
        out["witness_count"] = witnesses;
    }
    // The witness grid is the trust boundary of the certificate; record it
    // so a reviewer can tighten it.
    OrderedJson intervals = OrderedJson::array();
    for (const CertifiedInterval& iv : cert.intervals) {
        OrderedJson e;
        e["lo"] = iv.lo;
        e["hi"] = iv.hi;
        e["radius"] = iv.radius;
        e["witnesses"] = iv.witnesses;
        e["max_jump"] = iv.max_jump;
        e["window_rank"] = iv.window_rank;
        intervals.push_back(std::move(e));
    }
    out["intervals"] = std::move(intervals);
    return out;
}

OrderedJson kernel_json(const KernelReport& k) {
    OrderedJson out;
    out["lambda"] = k.lambda;
    out["zero_mode"] = k.zero_mode;
    OrderedJson modes = OrderedJson::array();
    for (auto& [mode, dim] : k.modes)
        modes.push_back(OrderedJson::array({mode, dim}));
    out["modes"] = std::move(modes);
    out["total"] = k.total;
    return out;
}

}  // namespace

OrderedJson virtual_rep_json(const VirtualRep& rep) {
    OrderedJson out = OrderedJson::object();
    if (!rep.group()) return out;
    for (size_t i = 0; i < rep.multiplicities().size(); ++i)
        if (rep.multiplicities()[i] != 0)
            out[rep.group()->irreps()[i].label] = rep.multiplicities()[i];
    return out;
}

OrderedJson flow_result_json(const FlowResult& result) {
    OrderedJson out;
    out["equivariant"] = virtual_rep_json(result.equivariant);
    out["equivariant_str"] = result.equivariant.to_string();
    out["classical"] = result.classical;
    out["certificate"] = certificate_json(result.certificate);
    OrderedJson contribs = OrderedJson::array();
    for (const SubContribution& c : result.contributions) {
        OrderedJson e;
        e["lo"] = c.lo;
        e["hi"] = c.hi;
        e["radius"] = c.radius;
        e["dim_lo"] = c.dim_lo;
        e["dim_hi"] = c.dim_hi;
        e["delta"] = virtual_rep_json(c.delta);
        contribs.push_back(std::move(e));
    }
    out["contributions"] = std::move(contribs);
    out["warnings"] = result.warnings;
    return out;
}

OrderedJson index_report_json(const IndexReport& report) {
    OrderedJson out;
    out["m0"] = report.m0;
    out["group"] = group_json(report.group);
    out["zero_mode_term"] = virtual_rep_json(report.zero_mode_term);
    out["zero_neg_dim_0"] = report.zero_neg_dim_0;
    out["zero_neg_dim_1"] = report.zero_neg_dim_1;
    auto term_json = [](const ModeTerm& t) {
        OrderedJson e;
        e["k"] = t.k;
        e["neg_dim_0"] = t.neg_dim_0;
        e["neg_dim_1"] = t.neg_dim_1;
        e["delta"] = virtual_rep_json(t.delta);
        return e;
    };
    OrderedJson modes = OrderedJson::array();
    for (const ModeTerm& t : report.mode_terms) modes.push_back(term_json(t));
    out["mode_terms"] = std::move(modes);
    OrderedJson tail = OrderedJson::array();
    for (const ModeTerm& t : report.tail_terms) tail.push_back(term_json(t));
    out["tail_terms"] = std::move(tail);
    out["total"] = virtual_rep_json(report.total);
    out["total_str"] = report.total.to_string();
    out["classical"] = report.classical;
    out["kernels"][("lambda_0")] = kernel_json(report.kernel_0);
    out["kernels"][("lambda_1")] = kernel_json(report.kernel_1);
    out["nice"] = report.group_nice;
    out["verdict"] = verdict_name(report.verdict);
    out["warnings"] = report.warnings;
    return out;
}

namespace {

std::string tracks_csv_for(const MatrixPath& path,
                           const std::vector<double>& grid,
                           const Tolerances& tol) {
    std::ostringstream os;
    os << "lambda";
    for (int i = 1; i <= path.order(); ++i) os << ",mu_" << i;
    os << "\n";
    for (double lambda : grid) {
        EigenDecomposition eig = eigh(path(lambda), tol);
        os << fmt_double(lambda);
        for (int i = 0; i < eig.order(); ++i)
            os << "," << fmt_double(eig.eigenvalues(i));
        os << "\n";
    }
    return os.str();
}

std::vector<double> certificate_grid(const PartitionCertificate& cert) {
    std::set<double> grid;
    for (const CertifiedInterval& iv : cert.intervals)
        grid.insert(iv.witnesses.begin(), iv.witnesses.end());
    return {grid.begin(), grid.end()};
}

std::string modes_csv_for(const IndexReport& report) {
    auto kernel_at = [](const KernelReport& k, int mode) -> std::int64_t {
        if (mode == 0) return k.zero_mode;
        for (auto& [m, d] : k.modes)
            if (m == mode) return d;
        return 0;
    };
    std::ostringstream os;
    os << "k,neg_dim_0,neg_dim_1,kernel_0,kernel_1,contribution\n";
    os << 0 << "," << report.zero_neg_dim_0 << "," << report.zero_neg_dim_1
       << "," << kernel_at(report.kernel_0, 0) << ","
       << kernel_at(report.kernel_1, 0) << ","
       << report.zero_mode_term.to_string() << "\n";
    auto row = [&](const ModeTerm& t) {
        os << t.k << "," << t.neg_dim_0 << "," << t.neg_dim_1 << ","
           << kernel_at(report.kernel_0, t.k) << ","
           << kernel_at(report.kernel_1, t.k) << "," << t.delta.to_string()
           << "\n";
    };
    for (const ModeTerm& t : report.mode_terms) row(t);
    for (const ModeTerm& t : report.tail_terms) row(t);
    return os.str();
}

}  // namespace

RunOutput run_problem(const Problem& problem, const RunOptions& opts) {
    auto start = std::chrono::steady_clock::now();
    auto elapsed_us = [&start]() {
        return std::chrono::duration_cast<std::chrono::microseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    };
    RunOutput out;
    OrderedJson report;
    report["schema"] = kReportSchema;
    report["tool"] = {{"name", "eqflow"}, {"version", kToolVersion}};
    report["mode"] = problem.mode;
    report["input_digest"] = problem.digest;

    const Tolerances& tol = problem.tol;
    long long compute_us = 0;
    if (problem.mode == "sfl") {
        FlowResult flow = sfl_equivariant(*problem.path, tol, opts.threads);
        report["result"] = flow_result_json(flow);
        // Dual route: the Morse difference must reproduce the partition sum.
        FlowResult morse = sfl_morse_difference(*problem.path, tol);
        report["morse_difference"] = virtual_rep_json(morse.equivariant);
        report["morse_agrees"] =
            same_element(flow.equivariant, morse.equivariant);
        compute_us = elapsed_us();
        if (!problem.outputs.tracks.empty())
            out.tracks_csv = tracks_csv_for(
                *problem.path, certificate_grid(flow.certificate), tol);
    } else if (problem.mode == "demo-z2") {
        Z2ExampleResult z2 = z2_example(*problem.path, tol, opts.threads);
        report["result"]["phi"] =
            OrderedJson::array({z2.phi.first, z2.phi.second});
        report["result"]["base_classical"] = z2.base_classical;
        report["result"]["flow"] = flow_result_json(z2.flow);
        compute_us = elapsed_us();
        if (!problem.outputs.tracks.empty() && z2.block_path)
            out.tracks_csv = tracks_csv_for(
                *z2.block_path, certificate_grid(z2.flow.certificate), tol);
    } else {  // hamiltonian
        const HamiltonianFamily& family = *problem.family;
        IndexReport index = bifurcation_verdict(family, tol, opts.threads);
        report["result"] = index_report_json(index);
        out.verdict = index.verdict;
        out.is_hamiltonian = true;
        if (problem.cross_check) {
            FlowResult oracle =
                galerkin_oracle(family, index.m0 + 2, tol, opts.threads);
            report["cross_check"]["truncation"] = index.m0 + 2;
            report["cross_check"]["oracle"] =
                virtual_rep_json(oracle.equivariant);
            report["cross_check"]["agrees"] =
                same_element(index.total, oracle.equivariant);
        }
        compute_us = elapsed_us();
        if (!problem.outputs.tracks.empty()) {
            // Tracks of the truncated operator diag(S, A_1..A_m0).
            const int n = family.n();
            const int m0 = index.m0;
            const int order = 2 * n + 4 * n * std::max(0, m0);
            const MatrixPath& s = family.s();
            MatrixPath big = MatrixPath::composite(
                [s, n, m0, order](double t) {
                    Matrix block = Matrix::Zero(order, order);
                    Matrix st = s(t);
                    block.topLeftCorner(2 * n, 2 * n) = st;
                    for (int k = 1; k <= m0; ++k) {
                        int off = 2 * n + 4 * n * (k - 1);
                        block.block(off, off, 4 * n, 4 * n) =
                            mode_block_matrix(st, k, n);
                    }
                    return block;
                },
                order, GroupSpec::trivial(order));
            std::vector<double> grid;
            for (int i = 0; i <= 128; ++i) grid.push_back(i / 128.0);
            out.tracks_csv = tracks_csv_for(big, grid, tol);
        }
        if (!problem.outputs.modes_csv.empty())
            out.modes_csv = modes_csv_for(index);
    }

    if (opts.with_timings) {
        report["timings"] = {{"compute_us", compute_us},
                             {"emit_us", elapsed_us() - compute_us},
                             {"total_us", elapsed_us()}};
    }
    out.report = std::move(report);
    return out;
}

void apply_tolerance_overrides(Tolerances& tol, const std::string& spec) {
    if (spec.empty()) return;
    Json doc = Json::object();
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw SchemaError("tolerance override \"" + item +
                              "\" is not key=value");
        std::string key = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        try {
            if (key == "coarse_first")
                doc[key] = (value == "true" || value == "1");
            else if (key == "witness_points" || key == "initial_subintervals" ||
                     key == "max_bisections" || key == "validation_samples")
                doc[key] = std::stoi(value);
            else
                doc[key] = std::stod(value);
        } catch (const std::exception&) {
            throw SchemaError("tolerance override \"" + item +
                              "\" has a malformed value");
        }
    }
    parse_tolerances(doc, tol, "--tolerances");
}

}  // namespace eqflow
