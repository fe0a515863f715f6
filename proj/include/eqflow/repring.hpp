#ifndef EQFLOW_REPRING_HPP
#define EQFLOW_REPRING_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eqflow/eigcore.hpp"
#include "eqflow/tolerances.hpp"

namespace eqflow {

/// One real irreducible of a finite group: label, real dimension, Schur norm
/// <chi,chi> in {1,2,4}, and character values indexed by group element.
struct FiniteIrrep {
    std::string label;
    int dim = 1;
    int schur = 1;
    std::vector<double> characters;
};

/// Entry of the RO(G) coordinate system attached to a GroupSpec.
/// For circle and product groups, `weight` is the S^1 weight (0 = trivial
/// action); `finite_index` points into the finite irrep table when there is
/// a finite factor.
struct Irrep {
    std::string label;
    int dim = 1;
    int weight = 0;
    int finite_index = -1;
};

class GroupSpec;
using GroupPtr = std::shared_ptr<const GroupSpec>;

/// A computable description of the acting compact group G together with one
/// orthogonal realization on the ambient space R^m. Construction validates
/// the group axioms; the irrep list fixes the coordinates of RO(G).
class GroupSpec {
public:
    enum class Kind { Finite, Circle, Product };

    static GroupPtr finite(std::vector<Matrix> elements,
                           std::vector<FiniteIrrep> table,
                           std::optional<bool> nice = std::nullopt,
                           const Tolerances& tol = {});
    /// The one-element group acting on R^m; its single irrep is "triv".
    static GroupPtr trivial(int ambient_dim);
    /// S^1 through exp(theta K) for a skew-symmetric integer-weight K. The
    /// label set is derived from the weights of K, optionally extended.
    static GroupPtr circle(Matrix generator,
                           std::vector<int> extra_weights = {},
                           const Tolerances& tol = {});
    /// G0 x S^1 with commuting realizations on the same ambient space.
    static GroupPtr product(std::vector<Matrix> elements,
                            std::vector<FiniteIrrep> table, Matrix generator,
                            std::vector<int> extra_weights = {},
                            std::optional<bool> nice = std::nullopt,
                            const Tolerances& tol = {});

    /// Runs every static invariant and returns human-readable diagnostics
    /// instead of throwing; empty means clean. The factories call this and
    /// throw DomainError on the first diagnostic.
    static std::vector<std::string> check_finite(
        const std::vector<Matrix>& elements,
        const std::vector<FiniteIrrep>& table, const Tolerances& tol = {});
    static std::vector<std::string> check_circle(const Matrix& generator,
                                                 const Tolerances& tol = {});

    Kind kind() const { return kind_; }
    const char* kind_name() const;
    int ambient_dim() const { return ambient_dim_; }

    const std::vector<Irrep>& irreps() const { return irreps_; }
    int irrep_index(const std::string& label) const;  // -1 when absent
    /// True when RO(G) coordinates coincide (same labels, dims, weights).
    bool labels_match(const GroupSpec& other) const;

    const std::vector<Matrix>& elements() const { return elements_; }
    const std::vector<FiniteIrrep>& finite_table() const { return table_; }
    const Matrix& generator() const { return generator_; }
    const std::vector<int>& weights() const { return weights_; }
    bool has_circle_factor() const { return kind_ != Kind::Finite; }
    bool has_finite_factor() const { return kind_ != Kind::Circle; }

    /// Worst commutator max-norm of `a` against the realized actions.
    double commutation_defect(const Matrix& a) const;
    /// Worst invariance residual ||(I - QQ^T) rho Q||_max of an orthonormal
    /// basis against the realized actions.
    double invariance_defect(const Matrix& basis) const;

    /// Whitelist policy for the bifurcation theorem's hypothesis: a user
    /// assertion wins; otherwise the finite factor must be abelian with
    /// exponent dividing 6 (a finite product of Z2 and Z3 factors). A pure
    /// S^1 group is always nice.
    bool is_nice() const;
    std::optional<bool> nice_asserted() const { return nice_; }

private:
    GroupSpec() = default;

    Kind kind_ = Kind::Finite;
    int ambient_dim_ = 0;
    std::vector<Matrix> elements_;
    std::vector<FiniteIrrep> table_;
    Matrix generator_;
    std::vector<int> weights_;
    std::vector<Irrep> irreps_;
    std::optional<bool> nice_;
};

/// An element of RO(G): a signed integer multiplicity vector over the
/// irreps of the attached GroupSpec.
class VirtualRep {
public:
    /// Unattached placeholder; any arithmetic on it is a domain error.
    VirtualRep() = default;
    explicit VirtualRep(GroupPtr group);
    VirtualRep(GroupPtr group, std::vector<std::int64_t> multiplicities);

    const GroupPtr& group() const { return group_; }
    const std::vector<std::int64_t>& multiplicities() const { return mult_; }
    std::int64_t multiplicity(const std::string& label) const;
    void set_multiplicity(const std::string& label, std::int64_t m);

    bool is_zero() const;
    /// Virtual dimension sum m_i * dim_i (the forgetful homomorphism).
    std::int64_t virtual_dim() const;
    /// Re-index over another label space; a nonzero multiplicity on a label
    /// the target lacks is a domain error.
    VirtualRep embedded(const GroupPtr& target) const;
    std::string to_string() const;

private:
    GroupPtr group_;
    std::vector<std::int64_t> mult_;
};

VirtualRep rep_add(const VirtualRep& x, const VirtualRep& y);
VirtualRep rep_sub(const VirtualRep& x, const VirtualRep& y);
VirtualRep rep_neg(const VirtualRep& x);
std::int64_t forgetful_dim(const VirtualRep& x);
/// Strict equality: identical label spaces and multiplicities.
bool operator==(const VirtualRep& a, const VirtualRep& b);
bool operator!=(const VirtualRep& a, const VirtualRep& b);
/// Equality as elements of RO(G) up to zero padding: labels present in only
/// one operand must carry multiplicity zero.
bool same_element(const VirtualRep& a, const VirtualRep& b);

/// The isomorphism RO(Z2) -> Z + Z of the two-element group:
/// (dim E - dim F, dim E_G - dim F_G). Requires a finite GroupSpec with
/// exactly the trivial and sign irreps.
std::pair<std::int64_t, std::int64_t> phi_z2(const VirtualRep& x);

/// An orthonormal basis spanning a G-invariant subspace of the ambient
/// space. Construction checks Q^T Q = I and the invariance residual.
class InvariantSubspace {
public:
    InvariantSubspace(Matrix basis, GroupPtr group, const Tolerances& tol = {});

    int ambient_dim() const { return static_cast<int>(basis_.rows()); }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Matrix& basis() const { return basis_; }
    const GroupPtr& group() const { return group_; }

private:
    Matrix basis_;
    GroupPtr group_;
};

/// Character-theoretic multiplicities of the finite table's irreps in the
/// span of `basis`, with `elements` realizing the group on that ambient
/// space (index-aligned with the table's characters). Non-integer
/// multiplicities beyond decomp_round and dimension mismatches throw
/// DecompositionError.
std::vector<std::int64_t> finite_multiplicities(
    const Matrix& basis, const std::vector<Matrix>& elements,
    const std::vector<FiniteIrrep>& table, const Tolerances& tol = {});

/// Isotypic decomposition of an invariant subspace, dispatching on the kind
/// of the attached group.
VirtualRep decompose(const InvariantSubspace& v, const Tolerances& tol = {});
VirtualRep decompose_finite(const InvariantSubspace& v,
                            const Tolerances& tol = {});
VirtualRep decompose_s1(const InvariantSubspace& v, const Tolerances& tol = {});
VirtualRep decompose_product(const InvariantSubspace& v,
                             const Tolerances& tol = {});

/// Built-in real character tables with a documented canonical element
/// order. Supported names: "trivial", "Z<n>" (n >= 1, powers of the
/// generator), "D<n>" (n >= 3, order 2n: e, r, ..., r^{n-1}, s, rs, ...,
/// r^{n-1}s), "S<n>" (n in 2..4, permutations in lexicographic one-line
/// order), "Z2xZ2" (e, a, b, ab).
std::vector<FiniteIrrep> builtin_irrep_table(const std::string& name);

}  // namespace eqflow

#endif
