#ifndef EQFLOW_HAMILTONIAN_HPP
#define EQFLOW_HAMILTONIAN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "eqflow/specflow.hpp"

namespace eqflow {

/// The symplectic standard matrix [[0, -I_n], [I_n, 0]].
Matrix build_J(int n);

/// A family lambda -> S(lambda) of symmetric 2n x 2n matrices together with
/// a finite symplectic-orthogonal G0 action carried by the path's group.
/// Construction verifies g^T J g = J for every group element; commutation
/// g S(lambda) = S(lambda) g is enforced by the path itself.
class HamiltonianFamily {
public:
    HamiltonianFamily(int n, MatrixPath s_path, const Tolerances& tol = {});

    int n() const { return n_; }
    const MatrixPath& s() const { return s_path_; }
    const GroupPtr& g0() const { return s_path_.group(); }

private:
    int n_;
    MatrixPath s_path_;
};

/// The 4n x 4n mode matrix A_k(lambda) = [[S/k, J], [-J, S/k]].
Matrix mode_block_matrix(const Matrix& s, int k, int n);

/// The k-th mode block as a matrix path on R^{4n} carrying the product
/// action: G0 lifted as diag(g, g) and S^1 as the weight-k rotation.
struct ModeBlock {
    int k = 1;
    MatrixPath path;
};
ModeBlock build_mode_block(const HamiltonianFamily& family, int k,
                           const Tolerances& tol = {});

/// Cutoff m0 = ceil(max_lambda ||S(lambda)||_2): for k > m0 the rotation
/// part dominates S/k and A_k(lambda) stays invertible. The bound is
/// verified by checking k = m0+1 .. m0+3 on the sample grid.
int cutoff_m0(const HamiltonianFamily& family, const Tolerances& tol = {});

struct ModeTerm {
    int k = 0;
    std::int64_t neg_dim_0 = 0;  // dim E^-(A_k(0))
    std::int64_t neg_dim_1 = 0;  // dim E^-(A_k(1))
    VirtualRep delta;            // [E^-(A_k(0))] - [E^-(A_k(1))]
};

struct KernelReport {
    double lambda = 0.0;
    std::int64_t zero_mode = 0;  // dim ker S(lambda)
    std::vector<std::pair<int, std::int64_t>> modes;  // (k, dim ker A_k)
    std::int64_t total = 0;
};

/// dim ker S(lambda) + sum_{k <= m0} dim ker A_k(lambda); modes above the
/// cutoff contribute nothing.
KernelReport kernel_check(const HamiltonianFamily& family, double lambda,
                          const Tolerances& tol = {});

enum class Verdict { BifurcationCertified, Inconclusive, HypothesisViolated };
const char* verdict_name(Verdict v);

struct IndexReport {
    int m0 = 0;
    GroupPtr group;  // G0 x S^1 label space of all terms
    VirtualRep zero_mode_term;
    std::int64_t zero_neg_dim_0 = 0;  // dim E^-(S(0))
    std::int64_t zero_neg_dim_1 = 0;  // dim E^-(S(1))
    std::vector<ModeTerm> mode_terms;  // k = 1 .. m0
    std::vector<ModeTerm> tail_terms;  // k = m0+1 .. (verified zero)
    VirtualRep total;
    std::int64_t classical = 0;
    KernelReport kernel_0, kernel_1;
    bool group_nice = false;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> warnings;
};

/// The index formula: sfl_G = [E^-(S_0)] - [E^-(S_1)]
/// + sum_k ([E^-(A_k(0))] - [E^-(A_k(1))]) in RO(G0 x S^1), with the
/// zero mode at weight 0 and mode k at weight k. Tail terms beyond the
/// cutoff are computed for k = m0+1 .. m0+tail_check and must vanish.
IndexReport index_formula(const HamiltonianFamily& family,
                          const Tolerances& tol = {}, int threads = 1,
                          int tail_check = 3);

/// index_formula plus the bifurcation verdict: certified iff the linearized
/// problem has trivial kernels at lambda = 0, 1, the group is nice, and the
/// equivariant flow is nonzero; hypothesis-violated when kernels or
/// niceness fail; inconclusive when the flow vanishes.
IndexReport bifurcation_verdict(const HamiltonianFamily& family,
                                const Tolerances& tol = {}, int threads = 1);

/// Independent verification: assembles the block-diagonal truncation
/// diag(S(lambda), A_1(lambda), ..., A_K(lambda)) with the product action
/// and runs the generic partition-based equivariant spectral flow on it.
FlowResult galerkin_oracle(const HamiltonianFamily& family, int k_trunc,
                           const Tolerances& tol = {}, int threads = 1);

}  // namespace eqflow

#endif
