#ifndef EQFLOW_TESTS_SUPPORT_HPP
#define EQFLOW_TESTS_SUPPORT_HPP

#include <random>
#include <vector>

#include "eqflow/hamiltonian.hpp"
#include "eqflow/specflow.hpp"

namespace testsupport {

using namespace eqflow;
using Rng = std::mt19937_64;

inline Matrix random_symmetric(int m, Rng& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Matrix b(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) b(i, j) = dist(rng);
    return 0.5 * (b + b.transpose());
}

inline Matrix random_orthogonal(int m, Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix b(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) b(i, j) = dist(rng);
    Eigen::HouseholderQR<Matrix> qr(b);
    Matrix q = qr.householderQ();
    return q;
}

inline Matrix diag_signs(const std::vector<int>& signs) {
    Matrix d = Matrix::Identity(static_cast<int>(signs.size()),
                                static_cast<int>(signs.size()));
    for (size_t i = 0; i < signs.size(); ++i)
        d(static_cast<int>(i), static_cast<int>(i)) = signs[i];
    return d;
}

/// Z2 acting by a diagonal sign pattern.
inline GroupPtr z2_diag(const std::vector<int>& signs) {
    const int m = static_cast<int>(signs.size());
    std::vector<Matrix> elements{Matrix::Identity(m, m), diag_signs(signs)};
    return GroupSpec::finite(std::move(elements), builtin_irrep_table("Z2"));
}

/// Z3 acting by `fixed` trivial coordinates and `planes` rotation planes.
inline GroupPtr z3_blocks(int fixed, int planes) {
    const int m = fixed + 2 * planes;
    const double c = std::cos(2.0 * M_PI / 3.0), s = std::sin(2.0 * M_PI / 3.0);
    Matrix g = Matrix::Identity(m, m);
    for (int p = 0; p < planes; ++p) {
        int off = fixed + 2 * p;
        g(off, off) = c;
        g(off, off + 1) = -s;
        g(off + 1, off) = s;
        g(off + 1, off + 1) = c;
    }
    std::vector<Matrix> elements{Matrix::Identity(m, m), g, g * g};
    return GroupSpec::finite(std::move(elements), builtin_irrep_table("Z3"));
}

/// Z2 x Z2 acting by two commuting diagonal sign patterns.
inline GroupPtr z2xz2_diag(const std::vector<int>& a,
                           const std::vector<int>& b) {
    const int m = static_cast<int>(a.size());
    std::vector<int> ab(a.size());
    for (size_t i = 0; i < a.size(); ++i) ab[i] = a[i] * b[i];
    std::vector<Matrix> elements{Matrix::Identity(m, m), diag_signs(a),
                                 diag_signs(b), diag_signs(ab)};
    return GroupSpec::finite(std::move(elements),
                             builtin_irrep_table("Z2xZ2"));
}

/// S^1 acting trivially on `fixed` coordinates and by the listed weights on
/// rotation planes.
inline GroupPtr s1_weights(const std::vector<int>& weights, int fixed = 0) {
    const int m = fixed + 2 * static_cast<int>(weights.size());
    Matrix k = Matrix::Zero(m, m);
    for (size_t p = 0; p < weights.size(); ++p) {
        int off = fixed + 2 * static_cast<int>(p);
        k(off, off + 1) = -weights[p];
        k(off + 1, off) = weights[p];
    }
    return GroupSpec::circle(std::move(k));
}

/// Commutant projection: group-average a symmetric matrix so it commutes
/// with the realized action (exactly for finite groups, to quadrature
/// accuracy for S^1 with integer weights).
inline Matrix average_over_group(const Matrix& b, const GroupSpec& g) {
    Matrix acc = b;
    if (g.has_finite_factor() && g.elements().size() > 1) {
        acc = Matrix::Zero(b.rows(), b.cols());
        for (const Matrix& rho : g.elements())
            acc += rho * b * rho.transpose();
        acc /= static_cast<double>(g.elements().size());
    }
    if (g.has_circle_factor()) {
        int wmax = 0;
        for (int w : g.weights()) wmax = std::max(wmax, w);
        int points = 2 * wmax + 1;
        if (points > 1) {
            SkewCanonicalForm form = skew_canonical_form(g.generator());
            Matrix sum = Matrix::Zero(b.rows(), b.cols());
            for (int j = 0; j < points; ++j) {
                Matrix rot = skew_exponential(form, 2.0 * M_PI * j / points);
                sum += rot * acc * rot.transpose();
            }
            acc = sum / points;
        }
    }
    return 0.5 * (acc + acc.transpose());
}

/// Random affine path of matrices commuting with the action, with endpoints
/// kept away from singularity so the Morse difference is unambiguous.
inline MatrixPath random_commuting_affine(const GroupPtr& group, Rng& rng,
                                          double scale = 1.0) {
    const int m = group->ambient_dim();
    for (int attempt = 0; attempt < 64; ++attempt) {
        Matrix a0 = average_over_group(random_symmetric(m, rng, scale), *group);
        Matrix a1 = average_over_group(random_symmetric(m, rng, scale), *group);
        double min0 = 1e30, min1 = 1e30;
        for (double mu : eigh(a0).eigenvalues)
            min0 = std::min(min0, std::abs(mu));
        for (double mu : eigh(a1).eigenvalues)
            min1 = std::min(min1, std::abs(mu));
        if (min0 > 5e-3 * scale && min1 > 5e-3 * scale)
            return MatrixPath::affine(std::move(a0), std::move(a1), group);
    }
    throw std::runtime_error("random_commuting_affine: no well-conditioned "
                             "endpoints after 64 attempts");
}

/// Analytic spectral-flow oracle for a path with known affine eigenvalue
/// branches f_i(lambda) = start_i + (end_i - start_i) lambda: the classical
/// flow is #(start < 0) - #(end < 0), matching the strict-negative Morse
/// convention with kernels excluded.
inline std::int64_t branch_flow_oracle(
    const std::vector<std::pair<double, double>>& branches) {
    std::int64_t count0 = 0, count1 = 0;
    for (auto& [start, end] : branches) {
        if (start < 0.0) ++count0;
        if (end < 0.0) ++count1;
    }
    return count0 - count1;
}

}  // namespace testsupport

#endif
