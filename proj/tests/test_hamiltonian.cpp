#include <doctest.h>

#include <cmath>

#include "eqflow/hamiltonian.hpp"
#include "support.hpp"

using namespace eqflow;
using testsupport::Rng;

namespace {

/// S(lambda) = (a + b lambda) I_2 with n = 1 and trivial G0.
HamiltonianFamily scalar_family(double a, double b) {
    Matrix s0 = a * Matrix::Identity(2, 2);
    Matrix s1 = (a + b) * Matrix::Identity(2, 2);
    MatrixPath s = MatrixPath::affine(s0, s1, GroupSpec::trivial(2));
    return HamiltonianFamily(1, std::move(s));
}

/// A Z2 action on R^{2n} by a duplicated sign pattern, which is symplectic.
GroupPtr symplectic_z2(const std::vector<int>& eps) {
    std::vector<int> doubled = eps;
    doubled.insert(doubled.end(), eps.begin(), eps.end());
    return testsupport::z2_diag(doubled);
}

}  // namespace

TEST_CASE("build_J") {
    Matrix j1 = build_J(1);
    Matrix expected(2, 2);
    expected << 0.0, -1.0, 1.0, 0.0;
    CHECK(max_abs(j1 - expected) == 0.0);
    for (int n = 1; n <= 4; ++n) {
        Matrix j = build_J(n);
        CHECK(max_abs(j * j + Matrix::Identity(2 * n, 2 * n)) == 0.0);
        CHECK(max_abs(j.transpose() + j) == 0.0);
    }
    CHECK_THROWS_AS(build_J(0), DomainError);
}

TEST_CASE("family validation") {
    // Order mismatch.
    MatrixPath bad = MatrixPath::affine(Matrix::Identity(2, 2),
                                        Matrix::Identity(2, 2),
                                        GroupSpec::trivial(2));
    CHECK_THROWS_AS(HamiltonianFamily(2, bad), DomainError);

    // A non-symplectic action: diag(1, -1) conjugates J to -J.
    GroupPtr bad_action = testsupport::z2_diag({1, -1});
    MatrixPath s = MatrixPath::affine(Matrix::Identity(2, 2),
                                      2.0 * Matrix::Identity(2, 2),
                                      bad_action);
    CHECK_THROWS_AS(HamiltonianFamily(1, s), DomainError);

    // Duplicated sign patterns are symplectic.
    GroupPtr good = symplectic_z2({1, -1});
    Matrix s0 = testsupport::average_over_group(Matrix::Identity(4, 4), *good);
    MatrixPath ok = MatrixPath::affine(s0, 2.0 * s0, good);
    CHECK_NOTHROW(HamiltonianFamily(2, ok));
}

TEST_CASE("mode block spectrum for scalar S") {
    // For S = s I_2, A_k has eigenvalues s/k -+ 1, each twice.
    for (double s : {0.0, 0.5, 2.0}) {
        for (int k : {1, 2, 3}) {
            Matrix a = mode_block_matrix(s * Matrix::Identity(2, 2), k, 1);
            EigenDecomposition eig = eigh(a);
            CHECK(eig.eigenvalues(0) == doctest::Approx(s / k - 1.0));
            CHECK(eig.eigenvalues(1) == doctest::Approx(s / k - 1.0));
            CHECK(eig.eigenvalues(2) == doctest::Approx(s / k + 1.0));
            CHECK(eig.eigenvalues(3) == doctest::Approx(s / k + 1.0));
        }
    }
    // S = 0: pure rotation part, E^- has dimension 2.
    Matrix a = mode_block_matrix(Matrix::Zero(2, 2), 5, 1);
    CHECK(negative_subspace(eigh(a)).cols() == 2);
}

TEST_CASE("mode blocks are equivariant under the product action") {
    Rng rng(11);
    GroupPtr g0 = symplectic_z2({1, -1});
    Matrix s0 = testsupport::average_over_group(
        testsupport::random_symmetric(4, rng), *g0);
    Matrix s1 = testsupport::average_over_group(
        testsupport::random_symmetric(4, rng), *g0);
    MatrixPath s = MatrixPath::affine(s0, s1, g0);
    HamiltonianFamily family(2, s);
    for (int k : {1, 2}) {
        // build_mode_block validates equivariance internally; re-check the
        // residuals directly.
        ModeBlock block = build_mode_block(family, k);
        Matrix a = block.path(0.3);
        CHECK(block.path.group()->commutation_defect(a) <= 1e-10);
        CHECK(block.path.order() == 8);
    }
}

TEST_CASE("cutoff_m0") {
    CHECK(cutoff_m0(scalar_family(0.0, 0.0)) == 0);
    CHECK(cutoff_m0(scalar_family(0.5, 2.0)) == 3);  // max ||S|| = 2.5
    CHECK(cutoff_m0(scalar_family(0.9, 0.0)) == 1);
}

TEST_CASE("kernel_check") {
    // S = I_2: A_1 has eigenvalues {0, 0, 2, 2}.
    KernelReport at_one = kernel_check(scalar_family(1.0, 0.0), 0.0);
    CHECK(at_one.zero_mode == 0);
    CHECK(at_one.total == 2);
    REQUIRE(at_one.modes.size() == 1);
    CHECK(at_one.modes[0] == std::pair<int, std::int64_t>{1, 2});

    CHECK(kernel_check(scalar_family(0.5, 0.0), 0.5).total == 0);

    // Singular S contributes through the zero mode.
    Matrix s_sing = Matrix::Zero(2, 2);
    s_sing(1, 1) = 2.0;
    MatrixPath sp = MatrixPath::affine(s_sing, s_sing, GroupSpec::trivial(2));
    KernelReport singular = kernel_check(HamiltonianFamily(1, sp), 0.0);
    CHECK(singular.zero_mode == 1);
}

TEST_CASE("index formula on the 0.5 -> 2.5 family") {
    HamiltonianFamily family = scalar_family(0.5, 2.0);
    IndexReport report = index_formula(family, {}, 1, 5);
    CHECK(report.m0 == 3);
    CHECK(report.classical == 4);
    CHECK(report.zero_mode_term.is_zero());
    CHECK(report.zero_neg_dim_0 == 0);
    CHECK(report.zero_neg_dim_1 == 0);

    REQUIRE(report.mode_terms.size() == 3);
    CHECK(report.mode_terms[0].neg_dim_0 == 2);  // s = 0.5 < 1
    CHECK(report.mode_terms[0].neg_dim_1 == 0);  // s = 2.5 > 1
    CHECK(report.mode_terms[0].delta.multiplicity("triv.w1") == 1);
    CHECK(report.mode_terms[1].neg_dim_0 == 2);
    CHECK(report.mode_terms[1].neg_dim_1 == 0);
    CHECK(report.mode_terms[1].delta.multiplicity("triv.w2") == 1);
    CHECK(report.mode_terms[2].delta.is_zero());  // s/3 < 1 throughout

    CHECK(report.total.multiplicity("triv.w1") == 1);
    CHECK(report.total.multiplicity("triv.w2") == 1);
    CHECK(report.total.multiplicity("triv.w0") == 0);
    CHECK(forgetful_dim(report.total) == 4);

    // Tail terms k = 4..8 vanish.
    CHECK(report.tail_terms.size() == 5);
    for (const ModeTerm& t : report.tail_terms) CHECK(t.delta.is_zero());

    CHECK(report.verdict == Verdict::BifurcationCertified);
    CHECK(report.kernel_0.total == 0);
    CHECK(report.kernel_1.total == 0);
    CHECK(report.group_nice);
}

TEST_CASE("constant invertible families are inconclusive") {
    IndexReport report = bifurcation_verdict(scalar_family(0.7, 0.0));
    CHECK(report.total.is_zero());
    CHECK(report.classical == 0);
    CHECK(report.verdict == Verdict::Inconclusive);
}

TEST_CASE("endpoint kernels violate the hypothesis") {
    // S(0) = I_2 makes A_1(0) singular.
    IndexReport report = bifurcation_verdict(scalar_family(1.0, 1.0));
    CHECK(report.kernel_0.total > 0);
    CHECK(report.verdict == Verdict::HypothesisViolated);
    CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("mode terms have even negative dimension") {
    Rng rng(21);
    GroupPtr g0 = symplectic_z2({1, -1, 1});
    Matrix s0 = testsupport::average_over_group(
        testsupport::random_symmetric(6, rng, 1.2), *g0);
    Matrix s1 = testsupport::average_over_group(
        testsupport::random_symmetric(6, rng, 1.2), *g0);
    MatrixPath s = MatrixPath::affine(s0, s1, g0);
    IndexReport report = index_formula(HamiltonianFamily(3, s));
    for (const ModeTerm& t : report.mode_terms) {
        CHECK(t.neg_dim_0 % 2 == 0);
        CHECK(t.neg_dim_1 % 2 == 0);
    }
    CHECK(forgetful_dim(report.total) == report.classical);
}

TEST_CASE("Z2-split mode terms against the generic product decomposition") {
    Rng rng(77);
    GroupPtr g0 = symplectic_z2({1, -1});
    Matrix s0 = testsupport::average_over_group(
        testsupport::random_symmetric(4, rng, 1.5), *g0);
    Matrix s1 = testsupport::average_over_group(
        testsupport::random_symmetric(4, rng, 1.5), *g0);
    MatrixPath s = MatrixPath::affine(s0, s1, g0);
    HamiltonianFamily family(2, s);
    IndexReport report = index_formula(family);

    // Cross-validate the structural weight shortcut: decompose E^- of each
    // endpoint through the generic product machinery on the mode space.
    for (const ModeTerm& term : report.mode_terms) {
        ModeBlock block = build_mode_block(family, term.k);
        VirtualRep e0 = decompose(InvariantSubspace(
            negative_subspace(eigh(block.path(0.0)), true),
            block.path.group()));
        VirtualRep e1 = decompose(InvariantSubspace(
            negative_subspace(eigh(block.path(1.0)), true),
            block.path.group()));
        VirtualRep delta = rep_sub(e0, e1);
        CHECK(same_element(delta, term.delta));
    }
}

TEST_CASE("galerkin oracle agrees with the index formula") {
    HamiltonianFamily family = scalar_family(0.5, 2.0);
    IndexReport report = index_formula(family);
    FlowResult oracle = galerkin_oracle(family, 5);
    CHECK(oracle.classical == 4);
    CHECK(oracle.equivariant.multiplicity("triv.w1") == 1);
    CHECK(oracle.equivariant.multiplicity("triv.w2") == 1);
    CHECK(same_element(report.total, oracle.equivariant));

    // Truncation level does not matter beyond the cutoff.
    FlowResult tight = galerkin_oracle(family, report.m0);
    FlowResult loose = galerkin_oracle(family, report.m0 + 3);
    CHECK(same_element(tight.equivariant, loose.equivariant));

    CHECK_THROWS_AS(galerkin_oracle(family, report.m0 - 1), DomainError);

    // Constant families flow to zero.
    FlowResult constant = galerkin_oracle(scalar_family(0.7, 0.0), 2);
    CHECK(constant.equivariant.is_zero());
}

TEST_CASE("verdict honors the niceness whitelist") {
    // An asserted-not-nice group forces a hypothesis violation even when
    // kernels are trivial and the flow is nonzero.
    std::vector<Matrix> elements{Matrix::Identity(4, 4),
                                 testsupport::diag_signs({1, -1, 1, -1})};
    GroupPtr declared_not_nice =
        GroupSpec::finite(elements, builtin_irrep_table("Z2"), false);
    Matrix s0 = 0.5 * Matrix::Identity(4, 4);
    Matrix s1 = 2.5 * Matrix::Identity(4, 4);
    MatrixPath s = MatrixPath::affine(s0, s1, declared_not_nice);
    IndexReport report = bifurcation_verdict(HamiltonianFamily(2, s));
    CHECK_FALSE(report.group_nice);
    CHECK(report.verdict == Verdict::HypothesisViolated);
    CHECK_FALSE(report.total.is_zero());
}
