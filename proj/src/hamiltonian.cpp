#include "eqflow/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqflow/parallel.hpp"

namespace eqflow {

Matrix build_J(int n) {
    if (n < 1) throw DomainError("build_J: n must be >= 1");
    Matrix j = Matrix::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = -Matrix::Identity(n, n);
    j.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
    return j;
}

HamiltonianFamily::HamiltonianFamily(int n, MatrixPath s_path,
                                     const Tolerances& tol)
    : n_(n), s_path_(std::move(s_path)) {
    if (n_ < 1) throw DomainError("HamiltonianFamily: n must be >= 1");
    if (s_path_.order() != 2 * n_)
        throw DomainError("HamiltonianFamily: S(lambda) must be 2n x 2n");
    const GroupPtr& g0 = s_path_.group();
    if (g0->kind() != GroupSpec::Kind::Finite)
        throw DomainError(
            "HamiltonianFamily: G0 must be a finite group acting on R^{2n}");
    Matrix j = build_J(n_);
    for (size_t i = 0; i < g0->elements().size(); ++i) {
        const Matrix& g = g0->elements()[i];
        double defect = max_abs(g.transpose() * j * g - j);
        if (defect > tol.symplectic) {
            std::ostringstream os;
            os << "HamiltonianFamily: element " << i
               << " is not symplectic (||g^T J g - J|| = " << defect << ")";
            throw DomainError(os.str());
        }
    }
}

Matrix mode_block_matrix(const Matrix& s, int k, int n) {
    if (k < 1) throw DomainError("mode_block_matrix: k must be >= 1");
    Matrix j = build_J(n);
    Matrix a = Matrix::Zero(4 * n, 4 * n);
    a.topLeftCorner(2 * n, 2 * n) = s / k;
    a.bottomRightCorner(2 * n, 2 * n) = s / k;
    a.topRightCorner(2 * n, 2 * n) = j;
    a.bottomLeftCorner(2 * n, 2 * n) = -j;
    return a;
}

namespace {

Matrix lift_diag(const Matrix& g) {
    const int m = static_cast<int>(g.rows());
    Matrix out = Matrix::Zero(2 * m, 2 * m);
    out.topLeftCorner(m, m) = g;
    out.bottomRightCorner(m, m) = g;
    return out;
}

/// Generator of the weight-k rotation action on V_k in the mode basis.
Matrix mode_generator(int k, int n) {
    Matrix gen = Matrix::Zero(4 * n, 4 * n);
    gen.topRightCorner(2 * n, 2 * n) = -k * Matrix::Identity(2 * n, 2 * n);
    gen.bottomLeftCorner(2 * n, 2 * n) = k * Matrix::Identity(2 * n, 2 * n);
    return gen;
}

/// Product group G0 x S^1 realized on the 4n-dimensional mode space.
GroupPtr mode_group(const GroupPtr& g0, int k, int n, const Tolerances& tol) {
    std::vector<Matrix> lifted;
    for (const Matrix& g : g0->elements()) lifted.push_back(lift_diag(g));
    return GroupSpec::product(std::move(lifted), g0->finite_table(),
                              mode_generator(k, n), {}, g0->nice_asserted(),
                              tol);
}

std::string product_label(const std::string& finite_label, int weight) {
    return finite_label + ".w" + std::to_string(weight);
}

double max_s_norm(const HamiltonianFamily& family, const Tolerances& tol) {
    int samples = std::max(2, tol.validation_samples);
    double norm = 0.0;
    for (int i = 0; i < samples; ++i) {
        double lambda = static_cast<double>(i) / (samples - 1);
        norm = std::max(norm, sym_norm2(family.s()(lambda)));
    }
    return norm;
}

}  // namespace

ModeBlock build_mode_block(const HamiltonianFamily& family, int k,
                           const Tolerances& tol) {
    if (k < 1) throw DomainError("build_mode_block: k must be >= 1");
    GroupPtr group = mode_group(family.g0(), k, family.n(), tol);
    const MatrixPath& s = family.s();
    const int n = family.n();
    // Only the S/k blocks depend on lambda.
    double lipschitz = s.lipschitz_bound() / k;
    MatrixPath path = MatrixPath::composite(
        [s, k, n](double t) { return mode_block_matrix(s(t), k, n); }, 4 * n,
        std::move(group), /*validate=*/true, tol, lipschitz);
    return ModeBlock{k, std::move(path)};
}

int cutoff_m0(const HamiltonianFamily& family, const Tolerances& tol) {
    double norm = max_s_norm(family, tol);
    int m0 = static_cast<int>(std::ceil(norm));
    // ||S/k||_2 < 1 for k > m0 keeps A_k invertible; verify the next few
    // modes on the grid.
    int samples = std::max(2, tol.validation_samples);
    for (int k = m0 + 1; k <= m0 + 3; ++k) {
        for (int i = 0; i < samples; ++i) {
            double lambda = static_cast<double>(i) / (samples - 1);
            EigenDecomposition eig = eigh(
                mode_block_matrix(family.s()(lambda), k, family.n()), tol);
            if (kernel_dim(eig, tol) > 0) {
                std::ostringstream os;
                os << "cutoff_m0: A_" << k << "(" << lambda
                   << ") is singular although k exceeds the cutoff " << m0;
                throw NumericError(os.str());
            }
        }
    }
    return m0;
}

KernelReport kernel_check(const HamiltonianFamily& family, double lambda,
                          const Tolerances& tol) {
    KernelReport report;
    report.lambda = lambda;
    report.zero_mode = kernel_dim(eigh(family.s()(lambda), tol), tol);
    report.total = report.zero_mode;
    int m0 = cutoff_m0(family, tol);
    for (int k = 1; k <= m0; ++k) {
        std::int64_t dim = kernel_dim(
            eigh(mode_block_matrix(family.s()(lambda), k, family.n()), tol),
            tol);
        report.modes.emplace_back(k, dim);
        report.total += dim;
    }
    return report;
}

namespace {

struct ModePiece {
    ModeTerm term;
    std::vector<std::string> warnings;
};

/// [E^-(A_k(0))] - [E^-(A_k(1))] over the master label space. The S^1
/// weight on mode k is structurally k, so only the G0 decomposition needs
/// character sums; tests cross-validate this against the generic product
/// decomposition.
ModePiece mode_term(const HamiltonianFamily& family, int k,
                    const GroupPtr& master, const Tolerances& tol) {
    const GroupPtr& g0 = family.g0();
    std::vector<Matrix> lifted;
    for (const Matrix& g : g0->elements()) lifted.push_back(lift_diag(g));

    ModePiece piece{ModeTerm{k, 0, 0, VirtualRep(master)}, {}};
    VirtualRep reps[2] = {VirtualRep(master), VirtualRep(master)};
    for (int end = 0; end < 2; ++end) {
        double lambda = static_cast<double>(end);
        EigenDecomposition eig = eigh(
            mode_block_matrix(family.s()(lambda), k, family.n()), tol);
        int kdim = kernel_dim(eig, tol);
        if (kdim > 0) {
            std::ostringstream os;
            os << "kernel of dimension " << kdim << " in A_" << k
               << "(" << lambda << "); excluded from E^-";
            piece.warnings.push_back(os.str());
        }
        Matrix neg = negative_subspace(eig, true, tol);
        std::int64_t dim = neg.cols();
        if (dim % 2 != 0) {
            std::ostringstream os;
            os << "mode " << k << ": E^- has odd dimension " << dim
               << "; the weight-" << k << " action admits no odd invariant "
               << "subspace";
            throw DecompositionError(os.str());
        }
        std::vector<std::int64_t> counts =
            finite_multiplicities(neg, lifted, g0->finite_table(), tol);
        for (size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] == 0) continue;
            const FiniteIrrep& ir = g0->finite_table()[i];
            if (ir.schur != 1) {
                std::ostringstream os;
                os << "mode " << k << ": unsupported combination: irrep "
                   << ir.label << " (Schur norm " << ir.schur
                   << ") occurs with nonzero weight";
                throw DecompositionError(os.str());
            }
            if (counts[i] % 2 != 0) {
                std::ostringstream os;
                os << "mode " << k << ": odd multiplicity " << counts[i]
                   << " of " << ir.label;
                throw DecompositionError(os.str());
            }
            reps[end].set_multiplicity(product_label(ir.label, k),
                                       counts[i] / 2);
        }
        (end == 0 ? piece.term.neg_dim_0 : piece.term.neg_dim_1) = dim;
    }
    piece.term.delta = rep_sub(reps[0], reps[1]);
    return piece;
}

}  // namespace

IndexReport index_formula(const HamiltonianFamily& family,
                          const Tolerances& tol, int threads,
                          int tail_check) {
    const GroupPtr& g0 = family.g0();
    int m0 = cutoff_m0(family, tol);
    int k_max = m0 + std::max(0, tail_check);

    // Master label space: G0 x S^1 with weights 0..k_max, realized on the
    // zero-mode space where S^1 acts trivially.
    std::vector<int> weights;
    for (int k = 1; k <= k_max; ++k) weights.push_back(k);
    GroupPtr master = GroupSpec::product(
        g0->elements(), g0->finite_table(),
        Matrix::Zero(2 * family.n(), 2 * family.n()), weights,
        g0->nice_asserted(), tol);

    IndexReport report;
    report.m0 = m0;
    report.group = master;
    report.zero_mode_term = VirtualRep(master);
    report.total = VirtualRep(master);

    // Zero mode: [E^-(S_0)] - [E^-(S_1)] with the S^1 action trivial.
    VirtualRep zero_reps[2] = {VirtualRep(master), VirtualRep(master)};
    for (int end = 0; end < 2; ++end) {
        double lambda = static_cast<double>(end);
        EigenDecomposition eig = eigh(family.s()(lambda), tol);
        int kdim = kernel_dim(eig, tol);
        if (kdim > 0) {
            std::ostringstream os;
            os << "kernel of dimension " << kdim << " in S(" << lambda
               << "); excluded from E^-";
            report.warnings.push_back(os.str());
        }
        Matrix neg = negative_subspace(eig, true, tol);
        (end == 0 ? report.zero_neg_dim_0 : report.zero_neg_dim_1) =
            neg.cols();
        std::vector<std::int64_t> counts = finite_multiplicities(
            neg, g0->elements(), g0->finite_table(), tol);
        for (size_t i = 0; i < counts.size(); ++i)
            if (counts[i] != 0)
                zero_reps[end].set_multiplicity(
                    product_label(g0->finite_table()[i].label, 0), counts[i]);
    }
    report.zero_mode_term = rep_sub(zero_reps[0], zero_reps[1]);

    // Modes 1..k_max in parallel, accumulated in ascending k.
    std::vector<ModePiece> pieces(static_cast<size_t>(k_max));
    parallel_for(k_max, threads, [&](int i) {
        pieces[static_cast<size_t>(i)] = mode_term(family, i + 1, master, tol);
    });

    report.total = report.zero_mode_term;
    for (int k = 1; k <= k_max; ++k) {
        ModePiece& piece = pieces[static_cast<size_t>(k - 1)];
        for (auto& w : piece.warnings) report.warnings.push_back(w);
        if (k <= m0) {
            report.total = rep_add(report.total, piece.term.delta);
            report.mode_terms.push_back(std::move(piece.term));
        } else {
            if (!piece.term.delta.is_zero()) {
                std::ostringstream os;
                os << "index_formula: mode term k = " << k
                   << " beyond the cutoff is nonzero: "
                   << piece.term.delta.to_string();
                throw NumericError(os.str());
            }
            report.tail_terms.push_back(std::move(piece.term));
        }
    }
    report.classical = forgetful_dim(report.total);

    report.kernel_0 = kernel_check(family, 0.0, tol);
    report.kernel_1 = kernel_check(family, 1.0, tol);
    report.group_nice = g0->is_nice();
    if (report.kernel_0.total != 0 || report.kernel_1.total != 0 ||
        !report.group_nice)
        report.verdict = Verdict::HypothesisViolated;
    else if (report.total.is_zero())
        report.verdict = Verdict::Inconclusive;
    else
        report.verdict = Verdict::BifurcationCertified;
    return report;
}

IndexReport bifurcation_verdict(const HamiltonianFamily& family,
                                const Tolerances& tol, int threads) {
    return index_formula(family, tol, threads);
}

FlowResult galerkin_oracle(const HamiltonianFamily& family, int k_trunc,
                           const Tolerances& tol, int threads) {
    int m0 = cutoff_m0(family, tol);
    if (k_trunc < m0) {
        std::ostringstream os;
        os << "galerkin_oracle: truncation " << k_trunc
           << " is below the cutoff " << m0;
        throw DomainError(os.str());
    }
    const int n = family.n();
    const GroupPtr& g0 = family.g0();
    const int order = 2 * n + 4 * n * k_trunc;

    std::vector<Matrix> elements;
    for (const Matrix& g : g0->elements()) {
        Matrix big = Matrix::Zero(order, order);
        big.topLeftCorner(2 * n, 2 * n) = g;
        for (int k = 1; k <= k_trunc; ++k) {
            int off = 2 * n + 4 * n * (k - 1);
            big.block(off, off, 4 * n, 4 * n) = lift_diag(g);
        }
        elements.push_back(std::move(big));
    }
    Matrix generator = Matrix::Zero(order, order);
    for (int k = 1; k <= k_trunc; ++k) {
        int off = 2 * n + 4 * n * (k - 1);
        generator.block(off, off, 4 * n, 4 * n) = mode_generator(k, n);
    }
    GroupPtr group =
        GroupSpec::product(std::move(elements), g0->finite_table(),
                           std::move(generator), {}, g0->nice_asserted(), tol);

    const MatrixPath& s = family.s();
    MatrixPath truncation = MatrixPath::composite(
        [s, n, k_trunc, order](double t) {
            Matrix big = Matrix::Zero(order, order);
            Matrix st = s(t);
            big.topLeftCorner(2 * n, 2 * n) = st;
            for (int k = 1; k <= k_trunc; ++k) {
                int off = 2 * n + 4 * n * (k - 1);
                big.block(off, off, 4 * n, 4 * n) =
                    mode_block_matrix(st, k, n);
            }
            return big;
        },
        order, std::move(group), /*validate=*/true, tol,
        s.lipschitz_bound());
    return sfl_equivariant(truncation, tol, threads);
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::BifurcationCertified: return "bifurcation-certified";
        case Verdict::Inconclusive: return "inconclusive";
        case Verdict::HypothesisViolated: return "hypothesis-violated";
    }
    return "?";
}

}  // namespace eqflow
