#ifndef EQFLOW_EIGCORE_HPP
#define EQFLOW_EIGCORE_HPP

#include <Eigen/Dense>
#include <vector>

#include "eqflow/errors.hpp"
#include "eqflow/tolerances.hpp"

namespace eqflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest absolute entry; zero for empty matrices.
double max_abs(const Matrix& a);

/// Operator 2-norm of a symmetric matrix (largest |eigenvalue|).
double sym_norm2(const Matrix& a);

/// A validated dense real symmetric matrix. The constructor rejects
/// non-square inputs and symmetry defects above sym_defect_rel, then stores
/// the exactly symmetrized (A + A^T)/2.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(Matrix a, const Tolerances& tol = {});

    int order() const { return static_cast<int>(mat_.rows()); }
    const Matrix& mat() const { return mat_; }

private:
    Matrix mat_;
};

/// Full eigendecomposition with eigenvalues in ascending order and
/// orthonormal eigenvector columns.
struct EigenDecomposition {
    Vector eigenvalues;
    Matrix vectors;

    int order() const { return static_cast<int>(eigenvalues.size()); }
    // Spectral norm of the decomposed matrix.
    double spectral_norm() const;
    // eps_gap for this matrix under the given tolerances.
    double gap(const Tolerances& tol) const {
        double s = spectral_norm();
        return tol.gap_rel * (s > 1.0 ? s : 1.0);
    }
};

/// Dense symmetric eigensolve meeting the residual contract
/// ||A Q - Q diag(mu)|| <= eig_residual_rel * max(1, ||A||_2).
EigenDecomposition eigh(const SymmetricMatrix& a, const Tolerances& tol = {});
EigenDecomposition eigh(const Matrix& a, const Tolerances& tol = {});

/// Orthonormal basis (m x d, possibly d = 0) of the span of eigenvectors
/// with eigenvalues in [a, b]. Both endpoints must miss the spectrum by the
/// gap tolerance; a collision throws BoundaryCollisionError.
Matrix spectral_subspace(const EigenDecomposition& eig, double a, double b,
                         const Tolerances& tol = {});

/// Orthonormal basis of E^-: eigenvalues mu < -eps_gap. Without allow_kernel
/// an eigenvalue inside (-eps_gap, eps_gap) throws BoundaryCollisionError;
/// with it kernel vectors are silently excluded. The column count is the
/// Morse index.
Matrix negative_subspace(const EigenDecomposition& eig,
                         bool allow_kernel = false,
                         const Tolerances& tol = {});

/// Count of eigenvalues mu < -eps_gap (Morse index).
int morse_index(const EigenDecomposition& eig, const Tolerances& tol = {});

/// Count of eigenvalues with |mu| <= eps_gap (numerical kernel dimension).
int kernel_dim(const EigenDecomposition& eig, const Tolerances& tol = {});

/// Orthonormal basis of the flow window E(A, [0, a]): eigenvalues
/// mu > -eps_gap and mu < a. The certificate guarantees no eigenvalue sits
/// near a, so the window is unambiguous; the closed-at-zero convention makes
/// kernel vectors count.
Matrix zero_window_subspace(const EigenDecomposition& eig, double a,
                            const Tolerances& tol = {});

/// Orthogonal projection Q Q^T onto the span of the orthonormal columns.
Matrix projection_from_basis(const Matrix& basis, int ambient_dim);

/// Operator 2-norm of P - Q.
double projection_distance(const Matrix& p, const Matrix& q);

/// Witness of Lemma-style equivariant isomorphism between im(P) and im(Q):
/// U = P Q + (I - P)(I - Q) maps im(Q) onto im(P); injectivity is certified
/// through (Q P + (I - Q)(I - P)) U = I - (P - Q)^2.
struct ProjectionIsomorphism {
    Matrix u;                    // the full-space map
    double distance;             // ||P - Q||
    double certificate_residual; // ||(QP+(I-Q)(I-P))U - (I-(P-Q)^2)||
    double equivariance_defect;  // max over supplied actions of ||[U, rho]||
};

/// Requires ||P - Q|| < 1; otherwise throws CertificateUnavailableError.
/// `actions` are group matrices both projections commute with; the witness
/// records the worst commutator of U with them.
ProjectionIsomorphism projection_isomorphism(
    const Matrix& p, const Matrix& q,
    const std::vector<Matrix>& actions = {}, const Tolerances& tol = {});

/// Real canonical form of a skew-symmetric matrix: an orthogonal T with
/// T^T K T = blockdiag(w_1 R, ..., w_p R, 0, ..., 0), R = [[0,-1],[1,0]].
/// `weights` holds w_1..w_p > 0 followed by zeros for the kernel columns
/// (one zero per kernel dimension).
struct SkewCanonicalForm {
    Matrix t;
    std::vector<double> weights;  // size p: one entry per 2x2 block
    int kernel_dim;               // trailing zero columns of T
};

SkewCanonicalForm skew_canonical_form(const Matrix& k,
                                      const Tolerances& tol = {});

/// exp(theta * K) for skew-symmetric K, evaluated through the canonical
/// form (exact rotations per block, identity on the kernel).
Matrix skew_exponential(const SkewCanonicalForm& form, double theta);
Matrix skew_exponential(const Matrix& k, double theta,
                        const Tolerances& tol = {});

}  // namespace eqflow

#endif
