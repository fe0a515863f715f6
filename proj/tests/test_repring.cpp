#include <doctest.h>

#include <cmath>

#include "eqflow/repring.hpp"
#include "support.hpp"

using namespace eqflow;
using testsupport::Rng;

namespace {

GroupPtr z2_r2() { return testsupport::z2_diag({1, -1}); }

VirtualRep make_rep(const GroupPtr& g, std::vector<std::int64_t> m) {
    return VirtualRep(g, std::move(m));
}

}  // namespace

TEST_CASE("RO(G) group laws") {
    GroupPtr g = z2_r2();
    VirtualRep x = make_rep(g, {1, 0});
    VirtualRep y = make_rep(g, {0, 2});
    VirtualRep zero(g);

    CHECK(rep_add(x, zero) == x);
    CHECK(rep_add(x, y) == make_rep(g, {1, 2}));
    CHECK(rep_add(rep_sub(x, y), rep_sub(y, x)).is_zero());
    CHECK(rep_add(x, y) == rep_add(y, x));

    VirtualRep neg = make_rep(g, {1, -2});
    CHECK(rep_neg(neg) == make_rep(g, {-1, 2}));
    CHECK(rep_neg(rep_neg(neg)) == neg);
    CHECK(rep_neg(zero).is_zero());

    GroupPtr other = testsupport::z3_blocks(1, 1);
    CHECK_THROWS_AS(rep_add(x, VirtualRep(other)), DomainError);
}

TEST_CASE("forgetful homomorphism") {
    GroupPtr g = z2_r2();
    CHECK(forgetful_dim(make_rep(g, {1, 1})) == 2);
    CHECK(forgetful_dim(VirtualRep(g)) == 0);
    CHECK(forgetful_dim(make_rep(g, {-2, 3})) == 1);

    GroupPtr s1 = testsupport::s1_weights({1, 2});
    VirtualRep rho12(s1);
    rho12.set_multiplicity("w1", 1);
    rho12.set_multiplicity("w2", 1);
    CHECK(forgetful_dim(rho12) == 4);

    // Additivity and negation compatibility.
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::int64_t> ma{static_cast<std::int64_t>(rng() % 7) - 3,
                                     static_cast<std::int64_t>(rng() % 7) - 3};
        std::vector<std::int64_t> mb{static_cast<std::int64_t>(rng() % 7) - 3,
                                     static_cast<std::int64_t>(rng() % 7) - 3};
        VirtualRep a = make_rep(g, ma), b = make_rep(g, mb);
        CHECK(forgetful_dim(rep_add(a, b)) ==
              forgetful_dim(a) + forgetful_dim(b));
        CHECK(forgetful_dim(rep_neg(a)) == -forgetful_dim(a));
    }
}

TEST_CASE("decompose_finite examples") {
    GroupPtr g = z2_r2();
    InvariantSubspace full(Matrix::Identity(2, 2), g);
    CHECK(decompose_finite(full) == make_rep(g, {1, 1}));

    GroupPtr triv = GroupSpec::trivial(4);
    InvariantSubspace all4(Matrix::Identity(4, 4), triv);
    CHECK(decompose(all4).multiplicity("triv") == 4);
}

TEST_CASE("decompose_finite against the eigenprojection oracle") {
    // Z2 by diag(1, 1, -1, -1) on R^4, V = span(e1, e3).
    GroupPtr g = testsupport::z2_diag({1, 1, -1, -1});
    Matrix basis = Matrix::Zero(4, 2);
    basis(0, 0) = 1.0;
    basis(2, 1) = 1.0;
    VirtualRep rep = decompose_finite(InvariantSubspace(basis, g));

    // Oracle: multiplicities are the ranks of (I +- rho)/2 restricted to V.
    const Matrix& rho = g->elements()[1];
    Matrix plus = 0.5 * (Matrix::Identity(4, 4) + rho) * basis;
    Matrix minus = 0.5 * (Matrix::Identity(4, 4) - rho) * basis;
    auto rank = [](const Matrix& m) {
        Eigen::ColPivHouseholderQR<Matrix> qr(m);
        qr.setThreshold(1e-10);
        return static_cast<std::int64_t>(qr.rank());
    };
    CHECK(rep.multiplicity("triv") == rank(plus));
    CHECK(rep.multiplicity("sign") == rank(minus));
    CHECK(rep == make_rep(g, {1, 1}));
}

TEST_CASE("decompose_finite error paths") {
    GroupPtr g = testsupport::z2_diag({1, 1, -1, -1});
    // A non-invariant subspace is rejected at construction.
    Matrix slanted = Matrix::Zero(4, 1);
    slanted(0, 0) = std::sqrt(0.5);
    slanted(2, 0) = std::sqrt(0.5);
    CHECK_THROWS_AS(InvariantSubspace(slanted, g), DomainError);
    // Non-orthonormal basis.
    Matrix stretched = Matrix::Zero(4, 1);
    stretched(0, 0) = 2.0;
    CHECK_THROWS_AS(InvariantSubspace(stretched, g), DomainError);
}

TEST_CASE("decompose_s1 examples") {
    SUBCASE("single weight-3 plane") {
        GroupPtr s1 = testsupport::s1_weights({3});
        VirtualRep rep =
            decompose_s1(InvariantSubspace(Matrix::Identity(2, 2), s1));
        CHECK(rep.multiplicity("w3") == 1);
        CHECK(rep.multiplicity("w0") == 0);
        CHECK(forgetful_dim(rep) == 2);
    }
    SUBCASE("zero generator gives trivial summands") {
        GroupPtr s1 = GroupSpec::circle(Matrix::Zero(3, 3));
        VirtualRep rep =
            decompose_s1(InvariantSubspace(Matrix::Identity(3, 3), s1));
        CHECK(rep.multiplicity("w0") == 3);
    }
    SUBCASE("mixed weight-1 and kernel") {
        GroupPtr s1 = testsupport::s1_weights({1}, 1);
        // Oracle: eigenvalues of K are {0, +-i}.
        VirtualRep rep =
            decompose_s1(InvariantSubspace(Matrix::Identity(3, 3), s1));
        CHECK(rep.multiplicity("w0") == 1);
        CHECK(rep.multiplicity("w1") == 1);
        CHECK(forgetful_dim(rep) == 3);
    }
}

TEST_CASE("decompose_product examples") {
    SUBCASE("trivial finite factor reduces to the weight split") {
        Matrix k = Matrix::Zero(4, 4);
        k(0, 1) = -1.0;
        k(1, 0) = 1.0;
        k(2, 3) = -2.0;
        k(3, 2) = 2.0;
        GroupPtr prod = GroupSpec::product(
            {Matrix::Identity(4, 4)}, builtin_irrep_table("trivial"), k);
        VirtualRep rep = decompose_product(
            InvariantSubspace(Matrix::Identity(4, 4), prod));
        CHECK(rep.multiplicity("triv.w1") == 1);
        CHECK(rep.multiplicity("triv.w2") == 1);

        GroupPtr s1 = GroupSpec::circle(k);
        VirtualRep plain =
            decompose_s1(InvariantSubspace(Matrix::Identity(4, 4), s1));
        CHECK(plain.multiplicity("w1") == rep.multiplicity("triv.w1"));
        CHECK(plain.multiplicity("w2") == rep.multiplicity("triv.w2"));
    }
    SUBCASE("trivial circle factor reduces to the finite decomposition") {
        GroupPtr prod = GroupSpec::product(
            {Matrix::Identity(2, 2), testsupport::diag_signs({1, -1})},
            builtin_irrep_table("Z2"), Matrix::Zero(2, 2));
        VirtualRep rep = decompose_product(
            InvariantSubspace(Matrix::Identity(2, 2), prod));
        CHECK(rep.multiplicity("triv.w0") == 1);
        CHECK(rep.multiplicity("sign.w0") == 1);
    }
    SUBCASE("Z2 x weight-1 on R^4") {
        // G0 = Z2 by diag(1, 1, -1, -1); K rotates both planes at weight 1.
        Matrix g = Matrix::Identity(4, 4);
        g(2, 2) = g(3, 3) = -1.0;
        Matrix k = Matrix::Zero(4, 4);
        k(0, 1) = -1.0;
        k(1, 0) = 1.0;
        k(2, 3) = -1.0;
        k(3, 2) = 1.0;
        GroupPtr prod = GroupSpec::product({Matrix::Identity(4, 4), g},
                                           builtin_irrep_table("Z2"), k);
        VirtualRep rep = decompose_product(
            InvariantSubspace(Matrix::Identity(4, 4), prod));
        CHECK(rep.multiplicity("triv.w1") == 1);
        CHECK(rep.multiplicity("sign.w1") == 1);
        CHECK(forgetful_dim(rep) == 4);

        // Simultaneous block-diagonalization oracle: each eigenspace of g is
        // K-invariant with squared restricted generator -I (weight 1).
        Matrix plus = Matrix::Zero(4, 2), minus = Matrix::Zero(4, 2);
        plus(0, 0) = plus(1, 1) = 1.0;
        minus(2, 0) = minus(3, 1) = 1.0;
        for (const Matrix& half : {plus, minus}) {
            Matrix kv = half.transpose() * k * half;
            CHECK(max_abs(kv * kv + Matrix::Identity(2, 2)) <= 1e-12);
        }
    }
}

TEST_CASE("phi_z2") {
    GroupPtr g = z2_r2();
    CHECK(phi_z2(make_rep(g, {0, 1})) ==
          std::pair<std::int64_t, std::int64_t>{1, 0});
    CHECK(phi_z2(VirtualRep(g)) ==
          std::pair<std::int64_t, std::int64_t>{0, 0});
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::int64_t a = static_cast<std::int64_t>(rng() % 9) - 4;
        std::int64_t b = static_cast<std::int64_t>(rng() % 9) - 4;
        auto [total, fixed] = phi_z2(make_rep(g, {a, b}));
        CHECK(total == a + b);
        CHECK(fixed == a);
    }
    // Homomorphism property.
    VirtualRep x = make_rep(g, {2, -1}), y = make_rep(g, {-3, 4});
    auto px = phi_z2(x), py = phi_z2(y), ps = phi_z2(rep_add(x, y));
    CHECK(ps.first == px.first + py.first);
    CHECK(ps.second == px.second + py.second);

    CHECK_THROWS_AS(phi_z2(VirtualRep(testsupport::z3_blocks(1, 1))),
                    DomainError);
}

TEST_CASE("non-invariant data yields non-integer multiplicities") {
    // Bypassing the InvariantSubspace guard: a slanted one-dimensional span
    // mixes the isotypic components and the raw character sums land between
    // integers.
    GroupPtr g = testsupport::z2_diag({1, 1, -1, -1});
    Matrix slanted = Matrix::Zero(4, 1);
    slanted(0, 0) = std::sqrt(0.5);
    slanted(2, 0) = std::sqrt(0.5);
    CHECK_THROWS_AS(finite_multiplicities(slanted, g->elements(),
                                          g->finite_table()),
                    DecompositionError);
}

TEST_CASE("window decomposition survives basis permutation") {
    // Conjugating by a permutation that commutes with the action must not
    // change the decomposition of a spectral window.
    Rng rng(5150);
    GroupPtr g = testsupport::z2_diag({1, 1, -1, -1});
    Matrix a = testsupport::average_over_group(
        testsupport::random_symmetric(4, rng), *g);
    // Swap coordinates 0<->1 and 2<->3: commutes with diag(1, 1, -1, -1).
    Matrix perm = Matrix::Zero(4, 4);
    perm(0, 1) = perm(1, 0) = perm(2, 3) = perm(3, 2) = 1.0;
    REQUIRE(max_abs(perm * g->elements()[1] - g->elements()[1] * perm) == 0.0);

    EigenDecomposition ea = eigh(a);
    EigenDecomposition ep = eigh(Matrix(perm.transpose() * a * perm));
    double cut = 0.5 * (ea.eigenvalues(1) + ea.eigenvalues(2));
    VirtualRep ra = decompose(InvariantSubspace(
        spectral_subspace(ea, ea.eigenvalues(0) - 1.0, cut), g));
    VirtualRep rp = decompose(InvariantSubspace(
        spectral_subspace(ep, ea.eigenvalues(0) - 1.0, cut), g));
    CHECK(ra == rp);
}

TEST_CASE("decomposition is basis independent") {
    Rng rng(99);
    GroupPtr g = testsupport::z2xz2_diag({1, 1, -1, -1, 1, -1},
                                         {1, -1, 1, -1, -1, 1});
    // An invariant 4-dimensional subspace spanned by coordinate axes.
    Matrix basis = Matrix::Zero(6, 4);
    basis(0, 0) = basis(2, 1) = basis(3, 2) = basis(5, 3) = 1.0;
    VirtualRep ref = decompose(InvariantSubspace(basis, g));
    for (int trial = 0; trial < 5; ++trial) {
        Matrix o = testsupport::random_orthogonal(4, rng);
        VirtualRep rotated = decompose(InvariantSubspace(basis * o, g));
        CHECK(rotated == ref);
    }
}

TEST_CASE("irrep table validation") {
    std::vector<Matrix> elements{Matrix::Identity(2, 2),
                                 testsupport::diag_signs({1, -1})};
    // Broken orthogonality: the "sign" characters are wrong.
    std::vector<FiniteIrrep> bad{FiniteIrrep{"triv", 1, 1, {1.0, 1.0}},
                                 FiniteIrrep{"sign", 1, 1, {1.0, 1.0}}};
    CHECK_THROWS_AS(GroupSpec::finite(elements, bad), DomainError);
    CHECK_FALSE(GroupSpec::check_finite(elements, bad).empty());

    // Non-closed element list: a rotation of infinite order.
    Matrix rot(2, 2);
    rot << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
    std::vector<Matrix> open{Matrix::Identity(2, 2), rot};
    CHECK_FALSE(
        GroupSpec::check_finite(open, builtin_irrep_table("Z2")).empty());

    // Non-orthogonal element.
    std::vector<Matrix> stretched{Matrix::Identity(2, 2),
                                  2.0 * Matrix::Identity(2, 2)};
    CHECK_FALSE(
        GroupSpec::check_finite(stretched, builtin_irrep_table("Z2")).empty());
}

TEST_CASE("builtin tables satisfy character orthogonality") {
    for (const char* name : {"trivial", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7",
                             "Z8", "D3", "D4", "D5", "D6", "S2", "S3", "S4",
                             "Z2xZ2"}) {
        std::vector<FiniteIrrep> table = builtin_irrep_table(name);
        REQUIRE_FALSE(table.empty());
        const size_t order = table[0].characters.size();
        for (size_t i = 0; i < table.size(); ++i) {
            REQUIRE(table[i].characters.size() == order);
            CHECK(table[i].characters[0] == doctest::Approx(table[i].dim));
            for (size_t j = i; j < table.size(); ++j) {
                double inner = 0.0;
                for (size_t e = 0; e < order; ++e)
                    inner += table[i].characters[e] * table[j].characters[e];
                inner /= static_cast<double>(order);
                double expected = (i == j) ? table[i].schur : 0.0;
                INFO(name << " <" << table[i].label << ", " << table[j].label
                          << ">");
                CHECK(inner == doctest::Approx(expected).epsilon(1e-10));
            }
        }
    }
    CHECK_THROWS_AS(builtin_irrep_table("Q8"), DomainError);
}

TEST_CASE("builtin tables match matrix realizations") {
    // Z3 as plane rotations decomposes R^2 into one rho1.
    GroupPtr z3 = testsupport::z3_blocks(0, 1);
    VirtualRep rep =
        decompose_finite(InvariantSubspace(Matrix::Identity(2, 2), z3));
    CHECK(rep.multiplicity("triv") == 0);
    CHECK(rep.multiplicity("rho1") == 1);

    // D3 realized on R^2 by rotations and reflections decomposes as E1.
    std::vector<Matrix> d3;
    for (int j = 0; j < 3; ++j) {
        double t = 2.0 * M_PI * j / 3.0;
        Matrix r(2, 2);
        r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        d3.push_back(r);
    }
    for (int j = 0; j < 3; ++j) {
        Matrix s(2, 2);
        s << 1.0, 0.0, 0.0, -1.0;
        d3.push_back(d3[static_cast<size_t>(j)] * s);
    }
    GroupPtr d3g = GroupSpec::finite(d3, builtin_irrep_table("D3"));
    VirtualRep drep =
        decompose_finite(InvariantSubspace(Matrix::Identity(2, 2), d3g));
    CHECK(drep.multiplicity("E1") == 1);
    CHECK(forgetful_dim(drep) == 2);
}

TEST_CASE("niceness policy") {
    CHECK(GroupSpec::trivial(3)->is_nice());
    CHECK(testsupport::z2_diag({1, -1})->is_nice());
    CHECK(testsupport::z3_blocks(1, 1)->is_nice());
    CHECK(testsupport::z2xz2_diag({1, -1, 1}, {1, 1, -1})->is_nice());
    CHECK(testsupport::s1_weights({1, 2})->is_nice());

    // D3 is not abelian, hence not auto-whitelisted; an explicit assertion
    // overrides.
    std::vector<Matrix> d3;
    for (int j = 0; j < 3; ++j) {
        double t = 2.0 * M_PI * j / 3.0;
        Matrix r(2, 2);
        r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        d3.push_back(r);
    }
    for (int j = 0; j < 3; ++j) {
        Matrix s(2, 2);
        s << 1.0, 0.0, 0.0, -1.0;
        d3.push_back(d3[static_cast<size_t>(j)] * s);
    }
    CHECK_FALSE(GroupSpec::finite(d3, builtin_irrep_table("D3"))->is_nice());
    CHECK(GroupSpec::finite(d3, builtin_irrep_table("D3"), true)->is_nice());
}

TEST_CASE("VirtualRep embedding and printing") {
    GroupPtr s1 = testsupport::s1_weights({1});
    GroupPtr wider = testsupport::s1_weights({1, 2});
    VirtualRep x(s1);
    x.set_multiplicity("w1", 2);
    x.set_multiplicity("w0", -1);
    VirtualRep embedded = x.embedded(wider);
    CHECK(embedded.multiplicity("w1") == 2);
    CHECK(embedded.multiplicity("w2") == 0);
    CHECK(same_element(x, embedded));
    CHECK(x.to_string() == "-w0 + 2*w1");
    CHECK(VirtualRep(s1).to_string() == "0");

    VirtualRep y(wider);
    y.set_multiplicity("w2", 1);
    CHECK_THROWS_AS(y.embedded(s1), DomainError);
    CHECK_FALSE(same_element(x, y));
}
