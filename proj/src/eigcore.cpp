#include "eqflow/eigcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eqflow {

double max_abs(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

double sym_norm2(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericError("sym_norm2: eigensolver failed to converge");
    double lo = es.eigenvalues()(0);
    double hi = es.eigenvalues()(es.eigenvalues().size() - 1);
    return std::max(std::abs(lo), std::abs(hi));
}

SymmetricMatrix::SymmetricMatrix(Matrix a, const Tolerances& tol) {
    if (a.rows() != a.cols()) {
        std::ostringstream os;
        os << "SymmetricMatrix: matrix is " << a.rows() << "x" << a.cols()
           << ", expected square";
        throw DomainError(os.str());
    }
    if (!a.allFinite())
        throw DomainError("SymmetricMatrix: non-finite entries");
    double defect = (a.size() == 0) ? 0.0 : max_abs(a - a.transpose());
    double bound = tol.sym_defect_rel * (1.0 + max_abs(a));
    if (defect > bound) {
        std::ostringstream os;
        os << "SymmetricMatrix: symmetry defect " << defect
           << " exceeds bound " << bound;
        throw DomainError(os.str());
    }
    mat_ = 0.5 * (a + a.transpose());
}

double EigenDecomposition::spectral_norm() const {
    if (eigenvalues.size() == 0) return 0.0;
    return std::max(std::abs(eigenvalues(0)),
                    std::abs(eigenvalues(eigenvalues.size() - 1)));
}

EigenDecomposition eigh(const SymmetricMatrix& a, const Tolerances& tol) {
    const Matrix& m = a.mat();
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success)
        throw NumericError("eigh: eigensolver failed to converge");
    EigenDecomposition out{es.eigenvalues(), es.eigenvectors()};
    // Residual contract; the Frobenius norm bounds the 2-norm from above.
    double norm = out.spectral_norm();
    double scale = std::max(1.0, norm);
    double resid =
        (m * out.vectors - out.vectors * out.eigenvalues.asDiagonal()).norm();
    if (resid > tol.eig_residual_rel * scale) {
        std::ostringstream os;
        os << "eigh: residual " << resid << " exceeds "
           << tol.eig_residual_rel * scale;
        throw NumericError(os.str());
    }
    return out;
}

EigenDecomposition eigh(const Matrix& a, const Tolerances& tol) {
    return eigh(SymmetricMatrix(a, tol), tol);
}

namespace {

Matrix select_columns(const EigenDecomposition& eig,
                      const std::vector<int>& idx) {
    Matrix out(eig.vectors.rows(), static_cast<int>(idx.size()));
    for (int j = 0; j < static_cast<int>(idx.size()); ++j)
        out.col(j) = eig.vectors.col(idx[j]);
    return out;
}

}  // namespace

Matrix spectral_subspace(const EigenDecomposition& eig, double a, double b,
                         const Tolerances& tol) {
    if (a > b) throw DomainError("spectral_subspace: interval with a > b");
    double gap = eig.gap(tol);
    std::vector<int> idx;
    for (int i = 0; i < eig.order(); ++i) {
        double mu = eig.eigenvalues(i);
        if (std::abs(mu - a) < gap || std::abs(mu - b) < gap) {
            std::ostringstream os;
            os << "spectral_subspace: eigenvalue " << mu
               << " within gap tolerance of window endpoint [" << a << ", "
               << b << "]";
            throw BoundaryCollisionError(os.str());
        }
        if (mu > a && mu < b) idx.push_back(i);
    }
    return select_columns(eig, idx);
}

Matrix negative_subspace(const EigenDecomposition& eig, bool allow_kernel,
                         const Tolerances& tol) {
    double gap = eig.gap(tol);
    std::vector<int> idx;
    for (int i = 0; i < eig.order(); ++i) {
        double mu = eig.eigenvalues(i);
        if (std::abs(mu) < gap) {
            if (!allow_kernel) {
                std::ostringstream os;
                os << "negative_subspace: eigenvalue " << mu
                   << " within gap tolerance of 0";
                throw BoundaryCollisionError(os.str());
            }
            continue;  // kernel vectors are excluded from E^-
        }
        if (mu < 0.0) idx.push_back(i);
    }
    return select_columns(eig, idx);
}

int morse_index(const EigenDecomposition& eig, const Tolerances& tol) {
    double gap = eig.gap(tol);
    int count = 0;
    for (int i = 0; i < eig.order(); ++i)
        if (eig.eigenvalues(i) < -gap) ++count;
    return count;
}

int kernel_dim(const EigenDecomposition& eig, const Tolerances& tol) {
    double gap = eig.gap(tol);
    int count = 0;
    for (int i = 0; i < eig.order(); ++i)
        if (std::abs(eig.eigenvalues(i)) <= gap) ++count;
    return count;
}

Matrix zero_window_subspace(const EigenDecomposition& eig, double a,
                            const Tolerances& tol) {
    double gap = eig.gap(tol);
    std::vector<int> idx;
    for (int i = 0; i < eig.order(); ++i) {
        double mu = eig.eigenvalues(i);
        if (mu > -gap && mu < a) idx.push_back(i);
    }
    return select_columns(eig, idx);
}

Matrix projection_from_basis(const Matrix& basis, int ambient_dim) {
    if (basis.cols() == 0) return Matrix::Zero(ambient_dim, ambient_dim);
    return basis * basis.transpose();
}

double projection_distance(const Matrix& p, const Matrix& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols())
        throw DomainError("projection_distance: order mismatch");
    return sym_norm2(p - q);
}

ProjectionIsomorphism projection_isomorphism(const Matrix& p, const Matrix& q,
                                             const std::vector<Matrix>& actions,
                                             const Tolerances& tol) {
    double dist = projection_distance(p, q);
    if (dist >= 1.0) {
        std::ostringstream os;
        os << "projection_isomorphism: ||P - Q|| = " << dist << " >= 1";
        throw CertificateUnavailableError(os.str());
    }
    const int m = static_cast<int>(p.rows());
    Matrix id = Matrix::Identity(m, m);
    // u restricts to an isomorphism im(P) -> im(Q); the reverse composition
    // certifies injectivity through v u = I - (P - Q)^2.
    Matrix u = q * p + (id - q) * (id - p);
    Matrix v = p * q + (id - p) * (id - q);
    Matrix diff = p - q;
    double resid = max_abs(v * u - (id - diff * diff));
    double defect = 0.0;
    for (const Matrix& rho : actions)
        defect = std::max(defect, max_abs(rho * u - u * rho));
    (void)tol;
    return ProjectionIsomorphism{u, dist, resid, defect};
}

SkewCanonicalForm skew_canonical_form(const Matrix& k, const Tolerances& tol) {
    const int m = static_cast<int>(k.rows());
    if (k.rows() != k.cols())
        throw DomainError("skew_canonical_form: matrix not square");
    double scale = std::max(1.0, max_abs(k));
    if (max_abs(k + k.transpose()) > tol.sym_defect_rel * 1e2 * scale)
        throw DomainError("skew_canonical_form: matrix not skew-symmetric");

    // -K^2 = K^T K is symmetric PSD with eigenvalues w^2.
    EigenDecomposition sq = eigh(Matrix(k.transpose() * k), tol);
    double wtol = 1e-6 * scale;

    std::vector<int> kernel_cols;
    std::vector<std::pair<double, std::vector<int>>> clusters;  // (w, columns)
    for (int i = 0; i < m; ++i) {
        double w = std::sqrt(std::max(0.0, sq.eigenvalues(i)));
        if (w <= wtol) {
            kernel_cols.push_back(i);
            continue;
        }
        if (!clusters.empty() && std::abs(clusters.back().first - w) <= wtol) {
            clusters.back().second.push_back(i);
        } else {
            clusters.emplace_back(w, std::vector<int>{i});
        }
    }

    Matrix t(m, m);
    std::vector<double> weights;
    int col = 0;
    for (auto& [w, cols] : clusters) {
        if (cols.size() % 2 != 0)
            throw NumericError(
                "skew_canonical_form: odd eigenvalue cluster for nonzero "
                "weight");
        // Peel off invariant 2-planes (u, K u / w) from the cluster span.
        Matrix span(m, static_cast<int>(cols.size()));
        for (int j = 0; j < span.cols(); ++j)
            span.col(j) = sq.vectors.col(cols[static_cast<size_t>(j)]);
        while (span.cols() > 0) {
            Vector u = span.col(0);
            u.normalize();
            Vector v = (k * u) / w;
            t.col(col) = u;
            t.col(col + 1) = v;
            weights.push_back(w);
            col += 2;
            // Orthonormal complement of (u, v) inside the cluster span.
            Matrix proj = span - u * (u.transpose() * span) -
                          v * (v.transpose() * span);
            Eigen::ColPivHouseholderQR<Matrix> qr(proj);
            int rank = static_cast<int>(span.cols()) - 2;
            if (rank <= 0) break;
            Matrix qfull = qr.householderQ();
            span = qfull.leftCols(rank);
        }
    }
    for (int i : kernel_cols) t.col(col++) = sq.vectors.col(i);
    SkewCanonicalForm out{t, weights, static_cast<int>(kernel_cols.size())};

    // One sided sanity check on the reconstruction.
    Matrix blocks = Matrix::Zero(m, m);
    int b = 0;
    for (double w : out.weights) {
        blocks(b, b + 1) = -w;
        blocks(b + 1, b) = w;
        b += 2;
    }
    if (max_abs(out.t * blocks * out.t.transpose() - k) > 1e-8 * scale)
        throw NumericError("skew_canonical_form: reconstruction failed");
    return out;
}

Matrix skew_exponential(const SkewCanonicalForm& form, double theta) {
    const int m = static_cast<int>(form.t.rows());
    Matrix rot = Matrix::Identity(m, m);
    int b = 0;
    for (double w : form.weights) {
        double c = std::cos(w * theta), s = std::sin(w * theta);
        rot(b, b) = c;
        rot(b, b + 1) = -s;
        rot(b + 1, b) = s;
        rot(b + 1, b + 1) = c;
        b += 2;
    }
    return form.t * rot * form.t.transpose();
}

Matrix skew_exponential(const Matrix& k, double theta, const Tolerances& tol) {
    return skew_exponential(skew_canonical_form(k, tol), theta);
}

}  // namespace eqflow
