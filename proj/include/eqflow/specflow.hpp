#ifndef EQFLOW_SPECFLOW_HPP
#define EQFLOW_SPECFLOW_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqflow/repring.hpp"

namespace eqflow {

/// A path lambda -> A(lambda) of symmetric matrices on [0,1] carrying a
/// commuting group action. Construction samples the path and verifies
/// symmetry and equivariance; evaluation returns the exactly symmetrized
/// matrix.
class MatrixPath {
public:
    enum class Kind { Affine, Polynomial, Samples, Composite };

    static MatrixPath affine(Matrix a0, Matrix a1, GroupPtr group,
                             const Tolerances& tol = {});
    /// sum_j lambda^j C_j.
    static MatrixPath polynomial(std::vector<Matrix> coefficients,
                                 GroupPtr group, const Tolerances& tol = {});
    /// Piecewise-linear through values at a strictly increasing grid
    /// covering [0,1].
    static MatrixPath samples(std::vector<double> grid,
                              std::vector<Matrix> values, GroupPtr group,
                              const Tolerances& tol = {});
    /// Wraps an arbitrary sampler; the caller vouches for its invariants
    /// unless validate is set. A nonnegative `lipschitz` is taken as the
    /// 2-norm Lipschitz bound of the sampler; otherwise it is estimated by
    /// finite differences.
    static MatrixPath composite(std::function<Matrix(double)> eval, int order,
                                GroupPtr group, bool validate = false,
                                const Tolerances& tol = {},
                                double lipschitz = -1.0);

    Matrix operator()(double lambda) const;
    /// Unsymmetrized sampler output, for defect measurement.
    Matrix eval_raw(double lambda) const;
    int order() const;
    Kind kind() const;
    const GroupPtr& group() const;
    /// Bound on ||A(s) - A(t)||_2 / |s - t|. Exact for affine and sampled
    /// paths, a coefficient-norm bound for polynomials, an estimate for
    /// composites constructed without one. Eigenvalue branches inherit it
    /// through Weyl's inequality, which is what makes witness-grid
    /// certificates sound between witnesses.
    double lipschitz_bound() const;

private:
    struct Impl;
    explicit MatrixPath(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

/// Concatenation p1 * p2 (p1 on [0,1/2], p2 on [1/2,1]); the endpoint
/// matrices must agree entrywise to endpoint_match.
MatrixPath concat(const MatrixPath& p1, const MatrixPath& p2,
                  const Tolerances& tol = {});

/// Orientation reversal lambda -> A(1 - lambda).
MatrixPath reverse(const MatrixPath& p);

/// Block-diagonal sum with the block-diagonal combined action. The groups
/// must have the same kind and identical irrep tables.
MatrixPath direct_sum(const MatrixPath& p1, const MatrixPath& p2,
                      const Tolerances& tol = {});

/// One certified subinterval: the radius a together with witnesses at which
/// +-a misses the spectrum and the window projection moves by less than 1.
struct CertifiedInterval {
    double lo = 0.0;
    double hi = 1.0;
    double radius = 0.0;
    std::vector<double> witnesses;
    double max_jump = 0.0;
    int window_rank = 0;
    int depth = 0;
};

struct PartitionCertificate {
    std::vector<CertifiedInterval> intervals;
    int max_depth = 0;
};

/// Adaptive certification of a partition 0 = lambda_0 < ... < lambda_N = 1
/// with radii a_i. Exceeding the bisection cap throws CertificationError;
/// a stretch with no eigenvalue above the gap threshold is reported as
/// identically degenerate.
PartitionCertificate certify_partition(const MatrixPath& path,
                                       const Tolerances& tol = {},
                                       int threads = 1);

struct SubContribution {
    double lo = 0.0;
    double hi = 0.0;
    double radius = 0.0;
    std::int64_t dim_lo = 0;
    std::int64_t dim_hi = 0;
    VirtualRep delta;
};

struct FlowResult {
    VirtualRep equivariant;
    std::int64_t classical = 0;
    PartitionCertificate certificate;
    std::vector<SubContribution> contributions;
    std::vector<std::string> warnings;
};

/// The classical spectral flow: sum over certified subintervals of
/// dim E(A_{hi}, [0, a]) - dim E(A_{lo}, [0, a]).
std::int64_t sfl_classical(const MatrixPath& path, const Tolerances& tol = {},
                           int threads = 1);
std::int64_t sfl_classical(const MatrixPath& path,
                           const PartitionCertificate& certificate,
                           const Tolerances& tol = {}, int threads = 1);

/// The G-equivariant spectral flow in RO(G), with the certificate and the
/// per-subinterval contribution table.
FlowResult sfl_equivariant(const MatrixPath& path, const Tolerances& tol = {},
                           int threads = 1);
FlowResult sfl_equivariant(const MatrixPath& path,
                           const PartitionCertificate& certificate,
                           const Tolerances& tol = {}, int threads = 1);

/// The Morse-difference fast path [E^-(A(0))] - [E^-(A(1))], valid for every
/// finite-dimensional path. Endpoint kernels are excluded from E^- and
/// reported as warnings.
FlowResult sfl_morse_difference(const MatrixPath& path,
                                const Tolerances& tol = {});

struct Z2ExampleResult {
    FlowResult flow;  // of blockdiag(A, -A) under the swap-sign Z2 action
    std::pair<std::int64_t, std::int64_t> phi;
    std::int64_t base_classical = 0;
    std::optional<MatrixPath> block_path;
};

/// Builds blockdiag(A(lambda), -A(lambda)) with the Z2 action
/// g(u, v) = (u, -v), computes the equivariant flow and its phi-image
/// (which equals (0, sfl(A))), and cross-checks both components.
Z2ExampleResult z2_example(const MatrixPath& base, const Tolerances& tol = {},
                           int threads = 1);

}  // namespace eqflow

#endif
