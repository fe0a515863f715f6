#include "eqflow/repring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace eqflow {

namespace {

constexpr double kElementMatchTol = 1e-8;
constexpr double kOrthogonalityTol = 1e-10;
constexpr double kWeightIntTol = 1e-6;

std::string circle_label(int weight) {
    return "w" + std::to_string(weight);
}

std::string product_label(const std::string& finite_label, int weight) {
    return finite_label + ".w" + std::to_string(weight);
}

int find_element(const std::vector<Matrix>& elements, const Matrix& m) {
    for (int i = 0; i < static_cast<int>(elements.size()); ++i)
        if (max_abs(elements[static_cast<size_t>(i)] - m) <= kElementMatchTol)
            return i;
    return -1;
}

/// Distinct rounded weights of a skew generator, or a diagnostic.
std::vector<int> generator_weights(const Matrix& k, const Tolerances& tol,
                                   std::string* diag) {
    std::vector<int> out;
    SkewCanonicalForm form;
    try {
        form = skew_canonical_form(k, tol);
    } catch (const Error& e) {
        if (diag) *diag = e.what();
        return out;
    }
    for (double w : form.weights) {
        double r = std::round(w);
        if (std::abs(w - r) > kWeightIntTol) {
            if (diag) {
                std::ostringstream os;
                os << "generator weight " << w << " is not an integer";
                *diag = os.str();
            }
            return {};
        }
        int wi = static_cast<int>(r);
        if (std::find(out.begin(), out.end(), wi) == out.end())
            out.push_back(wi);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<std::string> GroupSpec::check_finite(
    const std::vector<Matrix>& elements, const std::vector<FiniteIrrep>& table,
    const Tolerances& tol) {
    std::vector<std::string> diags;
    if (elements.empty()) {
        diags.push_back("finite group: empty element list");
        return diags;
    }
    const int m = static_cast<int>(elements[0].rows());
    for (size_t i = 0; i < elements.size(); ++i) {
        const Matrix& g = elements[i];
        if (g.rows() != m || g.cols() != m) {
            diags.push_back("finite group: element " + std::to_string(i) +
                            " has inconsistent dimensions");
            return diags;
        }
        double defect = max_abs(g.transpose() * g - Matrix::Identity(m, m));
        if (defect > kOrthogonalityTol) {
            std::ostringstream os;
            os << "finite group: element " << i
               << " is not orthogonal (defect " << defect << ")";
            diags.push_back(os.str());
        }
    }
    if (find_element(elements, Matrix::Identity(m, m)) < 0)
        diags.push_back("finite group: identity element missing");
    // Closure under products and inverses, by table lookup.
    for (size_t i = 0; i < elements.size(); ++i) {
        for (size_t j = 0; j < elements.size(); ++j) {
            if (find_element(elements, elements[i] * elements[j]) < 0) {
                std::ostringstream os;
                os << "finite group: product of elements " << i << " and "
                   << j << " is not in the list (closure violated)";
                diags.push_back(os.str());
            }
        }
        if (find_element(elements, elements[i].transpose()) < 0) {
            std::ostringstream os;
            os << "finite group: inverse of element " << i
               << " is not in the list";
            diags.push_back(os.str());
        }
    }
    // Irrep table consistency.
    if (table.empty()) diags.push_back("finite group: empty irrep table");
    const int order = static_cast<int>(elements.size());
    int identity = find_element(elements, Matrix::Identity(m, m));
    for (size_t i = 0; i < table.size(); ++i) {
        const FiniteIrrep& ir = table[i];
        if (ir.label.empty())
            diags.push_back("irrep " + std::to_string(i) + ": empty label");
        if (ir.dim < 1)
            diags.push_back("irrep " + ir.label + ": dimension < 1");
        if (ir.schur != 1 && ir.schur != 2 && ir.schur != 4)
            diags.push_back("irrep " + ir.label +
                            ": Schur norm must be 1, 2 or 4");
        if (static_cast<int>(ir.characters.size()) != order) {
            diags.push_back("irrep " + ir.label +
                            ": character count does not match group order");
            return diags;
        }
        for (size_t j = i + 1; j < table.size(); ++j)
            if (table[j].label == ir.label)
                diags.push_back("duplicate irrep label " + ir.label);
        if (identity >= 0 &&
            std::abs(ir.characters[static_cast<size_t>(identity)] - ir.dim) >
                tol.char_ortho)
            diags.push_back("irrep " + ir.label +
                            ": character at identity differs from dimension");
    }
    // Character orthogonality (1/|G|) sum chi_i chi_j = schur_i delta_ij.
    for (size_t i = 0; i < table.size(); ++i) {
        for (size_t j = i; j < table.size(); ++j) {
            if (static_cast<int>(table[i].characters.size()) != order ||
                static_cast<int>(table[j].characters.size()) != order)
                continue;
            double inner = 0.0;
            for (int g = 0; g < order; ++g)
                inner += table[i].characters[static_cast<size_t>(g)] *
                         table[j].characters[static_cast<size_t>(g)];
            inner /= order;
            double expected = (i == j) ? table[i].schur : 0.0;
            if (std::abs(inner - expected) > tol.char_ortho) {
                std::ostringstream os;
                os << "character orthogonality violated for (" << table[i].label
                   << ", " << table[j].label << "): <chi_i, chi_j> = " << inner
                   << ", expected " << expected;
                diags.push_back(os.str());
            }
        }
    }
    return diags;
}

std::vector<std::string> GroupSpec::check_circle(const Matrix& generator,
                                                 const Tolerances& tol) {
    std::vector<std::string> diags;
    if (generator.rows() != generator.cols()) {
        diags.push_back("circle generator: matrix not square");
        return diags;
    }
    double scale = std::max(1.0, max_abs(generator));
    double skew_defect = max_abs(generator + generator.transpose());
    if (skew_defect > 1e-10 * scale) {
        std::ostringstream os;
        os << "circle generator: not skew-symmetric (defect " << skew_defect
           << ")";
        diags.push_back(os.str());
        return diags;
    }
    std::string diag;
    generator_weights(generator, tol, &diag);
    if (!diag.empty()) diags.push_back("circle generator: " + diag);
    return diags;
}

GroupPtr GroupSpec::finite(std::vector<Matrix> elements,
                           std::vector<FiniteIrrep> table,
                           std::optional<bool> nice, const Tolerances& tol) {
    auto diags = check_finite(elements, table, tol);
    if (!diags.empty()) throw DomainError("GroupSpec: " + diags.front());
    auto spec = std::shared_ptr<GroupSpec>(new GroupSpec());
    spec->kind_ = Kind::Finite;
    spec->ambient_dim_ = static_cast<int>(elements[0].rows());
    spec->elements_ = std::move(elements);
    spec->table_ = std::move(table);
    spec->nice_ = nice;
    for (int i = 0; i < static_cast<int>(spec->table_.size()); ++i) {
        const FiniteIrrep& ir = spec->table_[static_cast<size_t>(i)];
        spec->irreps_.push_back(Irrep{ir.label, ir.dim, 0, i});
    }
    return spec;
}

GroupPtr GroupSpec::trivial(int ambient_dim) {
    std::vector<Matrix> elements{Matrix::Identity(ambient_dim, ambient_dim)};
    std::vector<FiniteIrrep> table{FiniteIrrep{"triv", 1, 1, {1.0}}};
    return finite(std::move(elements), std::move(table), true);
}

GroupPtr GroupSpec::circle(Matrix generator, std::vector<int> extra_weights,
                           const Tolerances& tol) {
    auto diags = check_circle(generator, tol);
    if (!diags.empty()) throw DomainError("GroupSpec: " + diags.front());
    std::string diag;
    std::vector<int> weights = generator_weights(generator, tol, &diag);
    weights.push_back(0);
    for (int w : extra_weights) {
        if (w < 0) throw DomainError("GroupSpec: negative circle weight");
        weights.push_back(w);
    }
    std::sort(weights.begin(), weights.end());
    weights.erase(std::unique(weights.begin(), weights.end()), weights.end());

    auto spec = std::shared_ptr<GroupSpec>(new GroupSpec());
    spec->kind_ = Kind::Circle;
    spec->ambient_dim_ = static_cast<int>(generator.rows());
    spec->generator_ = std::move(generator);
    spec->weights_ = weights;
    spec->nice_ = true;  // S^1 is nice
    for (int w : weights)
        spec->irreps_.push_back(Irrep{circle_label(w), w == 0 ? 1 : 2, w, -1});
    return spec;
}

GroupPtr GroupSpec::product(std::vector<Matrix> elements,
                            std::vector<FiniteIrrep> table, Matrix generator,
                            std::vector<int> extra_weights,
                            std::optional<bool> nice, const Tolerances& tol) {
    auto diags = check_finite(elements, table, tol);
    auto cdiags = check_circle(generator, tol);
    diags.insert(diags.end(), cdiags.begin(), cdiags.end());
    if (!diags.empty()) throw DomainError("GroupSpec: " + diags.front());
    if (static_cast<int>(elements[0].rows()) != generator.rows())
        throw DomainError("GroupSpec: finite and circle factors act on "
                          "different ambient dimensions");
    double scale = std::max(1.0, max_abs(generator));
    for (size_t i = 0; i < elements.size(); ++i) {
        double defect =
            max_abs(generator * elements[i] - elements[i] * generator);
        if (defect > tol.action_commute * scale * 1e2) {
            std::ostringstream os;
            os << "GroupSpec: finite element " << i
               << " does not commute with the circle generator (defect "
               << defect << ")";
            throw DomainError(os.str());
        }
    }
    std::string diag;
    std::vector<int> weights = generator_weights(generator, tol, &diag);
    weights.push_back(0);
    for (int w : extra_weights) {
        if (w < 0) throw DomainError("GroupSpec: negative circle weight");
        weights.push_back(w);
    }
    std::sort(weights.begin(), weights.end());
    weights.erase(std::unique(weights.begin(), weights.end()), weights.end());

    auto spec = std::shared_ptr<GroupSpec>(new GroupSpec());
    spec->kind_ = Kind::Product;
    spec->ambient_dim_ = static_cast<int>(generator.rows());
    spec->elements_ = std::move(elements);
    spec->table_ = std::move(table);
    spec->generator_ = std::move(generator);
    spec->weights_ = weights;
    spec->nice_ = nice;
    for (int w : weights) {
        for (int i = 0; i < static_cast<int>(spec->table_.size()); ++i) {
            const FiniteIrrep& ir = spec->table_[static_cast<size_t>(i)];
            if (w == 0) {
                spec->irreps_.push_back(
                    Irrep{product_label(ir.label, 0), ir.dim, 0, i});
            } else if (ir.schur == 1) {
                // Real form of (absolutely irreducible) x (weight character).
                spec->irreps_.push_back(
                    Irrep{product_label(ir.label, w), 2 * ir.dim, w, i});
            }
            // Non-absolutely-irreducible factors with nonzero weight carry no
            // label; decompose_product rejects them when they occur.
        }
    }
    return spec;
}

const char* GroupSpec::kind_name() const {
    switch (kind_) {
        case Kind::Finite: return "finite";
        case Kind::Circle: return "s1";
        case Kind::Product: return "product";
    }
    return "?";
}

int GroupSpec::irrep_index(const std::string& label) const {
    for (int i = 0; i < static_cast<int>(irreps_.size()); ++i)
        if (irreps_[static_cast<size_t>(i)].label == label) return i;
    return -1;
}

bool GroupSpec::labels_match(const GroupSpec& other) const {
    if (irreps_.size() != other.irreps_.size()) return false;
    for (size_t i = 0; i < irreps_.size(); ++i) {
        const Irrep& a = irreps_[i];
        const Irrep& b = other.irreps_[i];
        if (a.label != b.label || a.dim != b.dim || a.weight != b.weight)
            return false;
    }
    return true;
}

double GroupSpec::commutation_defect(const Matrix& a) const {
    double defect = 0.0;
    for (const Matrix& g : elements_)
        defect = std::max(defect, max_abs(g * a - a * g));
    if (has_circle_factor())
        defect = std::max(defect, max_abs(generator_ * a - a * generator_));
    return defect;
}

double GroupSpec::invariance_defect(const Matrix& basis) const {
    if (basis.cols() == 0) return 0.0;
    const int m = ambient_dim_;
    Matrix residual = Matrix::Identity(m, m) - basis * basis.transpose();
    double defect = 0.0;
    for (const Matrix& g : elements_)
        defect = std::max(defect, max_abs(residual * (g * basis)));
    if (has_circle_factor())
        defect = std::max(defect, max_abs(residual * (generator_ * basis)));
    return defect;
}

bool GroupSpec::is_nice() const {
    if (nice_.has_value()) return *nice_;
    if (!has_finite_factor() || elements_.size() == 1) return true;
    // Auto-whitelist: abelian with exponent dividing 6 is exactly a finite
    // product of Z2 and Z3 factors.
    for (size_t i = 0; i < elements_.size(); ++i)
        for (size_t j = i + 1; j < elements_.size(); ++j)
            if (max_abs(elements_[i] * elements_[j] -
                        elements_[j] * elements_[i]) > kElementMatchTol)
                return false;
    const int m = ambient_dim_;
    for (const Matrix& g : elements_) {
        Matrix g2 = g * g;
        Matrix g6 = g2 * g2 * g2;
        if (max_abs(g6 - Matrix::Identity(m, m)) > kElementMatchTol)
            return false;
    }
    return true;
}

VirtualRep::VirtualRep(GroupPtr group)
    : group_(std::move(group)),
      mult_(group_ ? group_->irreps().size() : 0, 0) {
    if (!group_) throw DomainError("VirtualRep: null group");
}

VirtualRep::VirtualRep(GroupPtr group, std::vector<std::int64_t> multiplicities)
    : group_(std::move(group)), mult_(std::move(multiplicities)) {
    if (!group_) throw DomainError("VirtualRep: null group");
    if (mult_.size() != group_->irreps().size())
        throw DomainError(
            "VirtualRep: multiplicity vector does not match irrep count");
}

std::int64_t VirtualRep::multiplicity(const std::string& label) const {
    if (!group_) throw DomainError("VirtualRep: unattached");
    int i = group_->irrep_index(label);
    if (i < 0) throw DomainError("VirtualRep: unknown irrep label " + label);
    return mult_[static_cast<size_t>(i)];
}

void VirtualRep::set_multiplicity(const std::string& label, std::int64_t m) {
    if (!group_) throw DomainError("VirtualRep: unattached");
    int i = group_->irrep_index(label);
    if (i < 0) throw DomainError("VirtualRep: unknown irrep label " + label);
    mult_[static_cast<size_t>(i)] = m;
}

bool VirtualRep::is_zero() const {
    return std::all_of(mult_.begin(), mult_.end(),
                       [](std::int64_t m) { return m == 0; });
}

std::int64_t VirtualRep::virtual_dim() const {
    if (!group_) throw DomainError("VirtualRep: unattached");
    std::int64_t dim = 0;
    for (size_t i = 0; i < mult_.size(); ++i)
        dim += mult_[i] * group_->irreps()[i].dim;
    return dim;
}

VirtualRep VirtualRep::embedded(const GroupPtr& target) const {
    VirtualRep out(target);
    for (size_t i = 0; i < mult_.size(); ++i) {
        if (mult_[i] == 0) continue;
        const std::string& label = group_->irreps()[i].label;
        int j = target->irrep_index(label);
        if (j < 0)
            throw DomainError("VirtualRep::embedded: target lacks label " +
                              label);
        out.mult_[static_cast<size_t>(j)] += mult_[i];
    }
    return out;
}

std::string VirtualRep::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < mult_.size(); ++i) {
        if (mult_[i] == 0) continue;
        if (!first) os << (mult_[i] > 0 ? " + " : " - ");
        else if (mult_[i] < 0) os << "-";
        std::int64_t a = std::abs(mult_[i]);
        if (a != 1) os << a << "*";
        os << group_->irreps()[i].label;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

namespace {

void require_same_group(const VirtualRep& x, const VirtualRep& y,
                        const char* op) {
    if (!x.group() || !y.group())
        throw DomainError(std::string(op) + ": unattached operand");
    if (x.group() == y.group()) return;
    if (x.group()->labels_match(*y.group())) return;
    throw DomainError(std::string(op) +
                      ": operands over mismatched group specs");
}

}  // namespace

VirtualRep rep_add(const VirtualRep& x, const VirtualRep& y) {
    require_same_group(x, y, "rep_add");
    std::vector<std::int64_t> m = x.multiplicities();
    for (size_t i = 0; i < m.size(); ++i) m[i] += y.multiplicities()[i];
    return VirtualRep(x.group(), std::move(m));
}

VirtualRep rep_sub(const VirtualRep& x, const VirtualRep& y) {
    return rep_add(x, rep_neg(y));
}

VirtualRep rep_neg(const VirtualRep& x) {
    if (!x.group()) throw DomainError("rep_neg: unattached operand");
    std::vector<std::int64_t> m = x.multiplicities();
    for (auto& v : m) v = -v;
    return VirtualRep(x.group(), std::move(m));
}

std::int64_t forgetful_dim(const VirtualRep& x) { return x.virtual_dim(); }

bool operator==(const VirtualRep& a, const VirtualRep& b) {
    if (!a.group() || !b.group()) return !a.group() && !b.group();
    if (a.group() != b.group() && !a.group()->labels_match(*b.group()))
        return false;
    return a.multiplicities() == b.multiplicities();
}

bool operator!=(const VirtualRep& a, const VirtualRep& b) { return !(a == b); }

bool same_element(const VirtualRep& a, const VirtualRep& b) {
    for (size_t i = 0; i < a.multiplicities().size(); ++i) {
        std::int64_t ma = a.multiplicities()[i];
        if (ma == 0) continue;
        const std::string& label = a.group()->irreps()[i].label;
        int j = b.group()->irrep_index(label);
        if (j < 0 || b.multiplicities()[static_cast<size_t>(j)] != ma)
            return false;
    }
    for (size_t i = 0; i < b.multiplicities().size(); ++i) {
        std::int64_t mb = b.multiplicities()[i];
        if (mb == 0) continue;
        const std::string& label = b.group()->irreps()[i].label;
        int j = a.group()->irrep_index(label);
        if (j < 0 || a.multiplicities()[static_cast<size_t>(j)] != mb)
            return false;
    }
    return true;
}

std::pair<std::int64_t, std::int64_t> phi_z2(const VirtualRep& x) {
    const GroupSpec& g = *x.group();
    if (g.kind() != GroupSpec::Kind::Finite || g.elements().size() != 2 ||
        g.finite_table().size() != 2 || g.finite_table()[0].dim != 1 ||
        g.finite_table()[1].dim != 1)
        throw DomainError("phi_z2: group is not Z2 with (trivial, sign)");
    auto is_trivial = [](const FiniteIrrep& ir) {
        return std::abs(ir.characters[0] - 1.0) < 1e-9 &&
               std::abs(ir.characters[1] - 1.0) < 1e-9;
    };
    int triv;
    if (is_trivial(g.finite_table()[0]))
        triv = 0;
    else if (is_trivial(g.finite_table()[1]))
        triv = 1;
    else
        throw DomainError("phi_z2: no trivial irrep in the table");
    std::int64_t m_triv = x.multiplicities()[static_cast<size_t>(triv)];
    std::int64_t m_sign = x.multiplicities()[static_cast<size_t>(1 - triv)];
    return {m_triv + m_sign, m_triv};
}

InvariantSubspace::InvariantSubspace(Matrix basis, GroupPtr group,
                                     const Tolerances& tol)
    : basis_(std::move(basis)), group_(std::move(group)) {
    if (!group_) throw DomainError("InvariantSubspace: null group");
    if (basis_.rows() != group_->ambient_dim())
        throw DomainError(
            "InvariantSubspace: basis rows do not match ambient dimension");
    if (basis_.cols() > 0) {
        double ortho = max_abs(basis_.transpose() * basis_ -
                               Matrix::Identity(basis_.cols(), basis_.cols()));
        if (ortho > 1e-8)
            throw DomainError("InvariantSubspace: basis not orthonormal");
        double inv = group_->invariance_defect(basis_);
        if (inv > tol.projection_commute) {
            std::ostringstream os;
            os << "InvariantSubspace: invariance residual " << inv
               << " exceeds tolerance " << tol.projection_commute;
            throw DomainError(os.str());
        }
    }
}

std::vector<std::int64_t> finite_multiplicities(
    const Matrix& basis, const std::vector<Matrix>& elements,
    const std::vector<FiniteIrrep>& table, const Tolerances& tol) {
    if (elements.empty())
        throw DomainError("finite_multiplicities: no group elements");
    const int d = static_cast<int>(basis.cols());
    const int order = static_cast<int>(elements.size());
    std::vector<double> chi_v(static_cast<size_t>(order));
    for (int g = 0; g < order; ++g)
        chi_v[static_cast<size_t>(g)] =
            (basis.transpose() * elements[static_cast<size_t>(g)] * basis)
                .trace();

    std::vector<std::int64_t> mult;
    std::int64_t total_dim = 0;
    for (const FiniteIrrep& ir : table) {
        double inner = 0.0;
        for (int g = 0; g < order; ++g)
            inner += chi_v[static_cast<size_t>(g)] *
                     ir.characters[static_cast<size_t>(g)];
        double raw = inner / order / ir.schur;
        double rounded = std::round(raw);
        if (std::abs(raw - rounded) > tol.decomp_round) {
            std::ostringstream os;
            os << "decomposition: multiplicity of " << ir.label << " is "
               << raw << ", not an integer within " << tol.decomp_round;
            throw DecompositionError(os.str());
        }
        if (rounded < 0.0) {
            std::ostringstream os;
            os << "decomposition: negative multiplicity " << rounded << " of "
               << ir.label;
            throw DecompositionError(os.str());
        }
        mult.push_back(static_cast<std::int64_t>(rounded));
        total_dim += mult.back() * ir.dim;
    }
    if (total_dim != d) {
        std::ostringstream os;
        os << "decomposition: irrep dimensions sum to " << total_dim
           << " but the subspace has dimension " << d;
        throw DecompositionError(os.str());
    }
    return mult;
}

namespace {

struct WeightSplit {
    int weight;
    Matrix basis;  // ambient coordinates, orthonormal
};

/// Splits an invariant subspace into S^1 weight spaces through the spectrum
/// of the restricted generator.
std::vector<WeightSplit> split_by_weight(const Matrix& basis,
                                         const Matrix& generator,
                                         const Tolerances& tol) {
    const int d = static_cast<int>(basis.cols());
    std::vector<WeightSplit> out;
    if (d == 0) return out;
    Matrix kv = basis.transpose() * generator * basis;
    double scale = std::max(1.0, max_abs(generator));
    if (max_abs(kv + kv.transpose()) > 1e-8 * scale)
        throw DecompositionError(
            "decompose_s1: restricted generator is not skew-symmetric");
    EigenDecomposition sq = eigh(Matrix(kv.transpose() * kv), tol);
    // Eigenvalues of K^T K restricted are squared weights.
    std::vector<std::pair<int, std::vector<int>>> clusters;
    for (int i = 0; i < d; ++i) {
        double w = std::sqrt(std::max(0.0, sq.eigenvalues(i)));
        double r = std::round(w);
        if (std::abs(w - r) > kWeightIntTol * scale) {
            std::ostringstream os;
            os << "decompose_s1: non-integer weight " << w
               << " in the restricted generator";
            throw DecompositionError(os.str());
        }
        int wi = static_cast<int>(r);
        if (!clusters.empty() && clusters.back().first == wi)
            clusters.back().second.push_back(i);
        else
            clusters.push_back({wi, {i}});
    }
    for (auto& [w, cols] : clusters) {
        Matrix u(d, static_cast<int>(cols.size()));
        for (int j = 0; j < u.cols(); ++j)
            u.col(j) = sq.vectors.col(cols[static_cast<size_t>(j)]);
        out.push_back(WeightSplit{w, basis * u});
    }
    return out;
}

}  // namespace

VirtualRep decompose_finite(const InvariantSubspace& v, const Tolerances& tol) {
    const GroupSpec& g = *v.group();
    if (g.kind() != GroupSpec::Kind::Finite)
        throw DomainError("decompose_finite: group is not finite");
    return VirtualRep(v.group(), finite_multiplicities(
                                     v.basis(), g.elements(), g.finite_table(),
                                     tol));
}

VirtualRep decompose_s1(const InvariantSubspace& v, const Tolerances& tol) {
    const GroupSpec& g = *v.group();
    if (g.kind() != GroupSpec::Kind::Circle)
        throw DomainError("decompose_s1: group is not S^1");
    VirtualRep out(v.group());
    for (const WeightSplit& ws :
         split_by_weight(v.basis(), g.generator(), tol)) {
        int count = static_cast<int>(ws.basis.cols());
        if (ws.weight == 0) {
            out.set_multiplicity(circle_label(0), count);
            continue;
        }
        if (count % 2 != 0) {
            std::ostringstream os;
            os << "decompose_s1: odd multiplicity " << count << " of weight "
               << ws.weight;
            throw DecompositionError(os.str());
        }
        int idx = g.irrep_index(circle_label(ws.weight));
        if (idx < 0) {
            std::ostringstream os;
            os << "decompose_s1: weight " << ws.weight
               << " is outside the declared weight set";
            throw DecompositionError(os.str());
        }
        out.set_multiplicity(circle_label(ws.weight), count / 2);
    }
    return out;
}

VirtualRep decompose_product(const InvariantSubspace& v,
                             const Tolerances& tol) {
    const GroupSpec& g = *v.group();
    if (g.kind() != GroupSpec::Kind::Product)
        throw DomainError("decompose_product: group is not a product");
    VirtualRep out(v.group());
    std::int64_t total_dim = 0;
    for (const WeightSplit& ws :
         split_by_weight(v.basis(), g.generator(), tol)) {
        std::vector<std::int64_t> n = finite_multiplicities(
            ws.basis, g.elements(), g.finite_table(), tol);
        for (size_t i = 0; i < n.size(); ++i) {
            if (n[i] == 0) continue;
            const FiniteIrrep& ir = g.finite_table()[i];
            if (ws.weight == 0) {
                out.set_multiplicity(product_label(ir.label, 0), n[i]);
                total_dim += n[i] * ir.dim;
                continue;
            }
            if (ir.schur != 1) {
                std::ostringstream os;
                os << "decompose_product: unsupported combination: irrep "
                   << ir.label << " (Schur norm " << ir.schur
                   << ") occurs with nonzero weight " << ws.weight;
                throw DecompositionError(os.str());
            }
            if (n[i] % 2 != 0) {
                std::ostringstream os;
                os << "decompose_product: odd multiplicity " << n[i] << " of "
                   << ir.label << " in the weight-" << ws.weight << " space";
                throw DecompositionError(os.str());
            }
            int idx = g.irrep_index(product_label(ir.label, ws.weight));
            if (idx < 0) {
                std::ostringstream os;
                os << "decompose_product: weight " << ws.weight
                   << " is outside the declared weight set";
                throw DecompositionError(os.str());
            }
            out.set_multiplicity(product_label(ir.label, ws.weight), n[i] / 2);
            total_dim += n[i] * ir.dim;
        }
    }
    if (total_dim != v.dim())
        throw DecompositionError(
            "decompose_product: dimensions do not add up to dim V");
    return out;
}

VirtualRep decompose(const InvariantSubspace& v, const Tolerances& tol) {
    switch (v.group()->kind()) {
        case GroupSpec::Kind::Finite: return decompose_finite(v, tol);
        case GroupSpec::Kind::Circle: return decompose_s1(v, tol);
        case GroupSpec::Kind::Product: return decompose_product(v, tol);
    }
    throw DomainError("decompose: unknown group kind");
}

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<FiniteIrrep> cyclic_table(int n) {
    std::vector<FiniteIrrep> table;
    FiniteIrrep triv{"triv", 1, 1, std::vector<double>(static_cast<size_t>(n), 1.0)};
    table.push_back(triv);
    if (n % 2 == 0) {
        FiniteIrrep sign{"sign", 1, 1, {}};
        for (int j = 0; j < n; ++j)
            sign.characters.push_back(j % 2 == 0 ? 1.0 : -1.0);
        table.push_back(sign);
    }
    for (int k = 1; 2 * k < n; ++k) {
        FiniteIrrep rho{"rho" + std::to_string(k), 2, 2, {}};
        for (int j = 0; j < n; ++j)
            rho.characters.push_back(2.0 * std::cos(2.0 * kPi * k * j / n));
        table.push_back(rho);
    }
    return table;
}

std::vector<FiniteIrrep> dihedral_table(int n) {
    // Element order: e, r, ..., r^{n-1}, s, rs, ..., r^{n-1}s.
    const int order = 2 * n;
    std::vector<FiniteIrrep> table;
    table.push_back(FiniteIrrep{
        "triv", 1, 1, std::vector<double>(static_cast<size_t>(order), 1.0)});
    FiniteIrrep sgn{"sgn", 1, 1, {}};
    for (int j = 0; j < order; ++j) sgn.characters.push_back(j < n ? 1.0 : -1.0);
    table.push_back(sgn);
    if (n % 2 == 0) {
        FiniteIrrep b1{"b1", 1, 1, {}}, b2{"b2", 1, 1, {}};
        for (int j = 0; j < n; ++j) {
            double s = (j % 2 == 0) ? 1.0 : -1.0;
            b1.characters.push_back(s);
            b2.characters.push_back(s);
        }
        for (int j = 0; j < n; ++j) {
            double s = (j % 2 == 0) ? 1.0 : -1.0;
            b1.characters.push_back(s);
            b2.characters.push_back(-s);
        }
        table.push_back(b1);
        table.push_back(b2);
    }
    for (int k = 1; 2 * k < n; ++k) {
        FiniteIrrep e{"E" + std::to_string(k), 2, 1, {}};
        for (int j = 0; j < n; ++j)
            e.characters.push_back(2.0 * std::cos(2.0 * kPi * k * j / n));
        for (int j = 0; j < n; ++j) e.characters.push_back(0.0);
        table.push_back(e);
    }
    return table;
}

std::vector<std::vector<int>> lex_permutations(int n) {
    std::vector<int> p(static_cast<size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::vector<int> cycle_type(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    std::vector<bool> seen(static_cast<size_t>(n), false);
    std::vector<int> type;
    for (int i = 0; i < n; ++i) {
        if (seen[static_cast<size_t>(i)]) continue;
        int len = 0, j = i;
        while (!seen[static_cast<size_t>(j)]) {
            seen[static_cast<size_t>(j)] = true;
            j = perm[static_cast<size_t>(j)];
            ++len;
        }
        type.push_back(len);
    }
    std::sort(type.rbegin(), type.rend());
    return type;
}

std::vector<FiniteIrrep> symmetric_table(int n) {
    auto perms = lex_permutations(n);
    auto chars_for = [&](auto&& value) {
        std::vector<double> out;
        for (const auto& p : perms) out.push_back(value(cycle_type(p)));
        return out;
    };
    auto parity = [](const std::vector<int>& type) {
        int transpositions = 0;
        for (int len : type) transpositions += len - 1;
        return transpositions % 2 == 0 ? 1.0 : -1.0;
    };
    std::vector<FiniteIrrep> table;
    table.push_back(FiniteIrrep{"triv", 1, 1,
                                chars_for([](const auto&) { return 1.0; })});
    table.push_back(FiniteIrrep{"sign", 1, 1, chars_for(parity)});
    if (n == 2) return table;
    if (n == 3) {
        table.push_back(FiniteIrrep{
            "std", 2, 1, chars_for([](const std::vector<int>& t) {
                if (t == std::vector<int>{1, 1, 1}) return 2.0;
                if (t == std::vector<int>{2, 1}) return 0.0;
                return -1.0;  // 3-cycle
            })});
        return table;
    }
    // n == 4
    table.push_back(FiniteIrrep{
        "std", 3, 1, chars_for([](const std::vector<int>& t) {
            if (t == std::vector<int>{1, 1, 1, 1}) return 3.0;
            if (t == std::vector<int>{2, 1, 1}) return 1.0;
            if (t == std::vector<int>{2, 2}) return -1.0;
            if (t == std::vector<int>{3, 1}) return 0.0;
            return -1.0;  // 4-cycle
        })});
    table.push_back(FiniteIrrep{
        "std_sgn", 3, 1, chars_for([](const std::vector<int>& t) {
            if (t == std::vector<int>{1, 1, 1, 1}) return 3.0;
            if (t == std::vector<int>{2, 1, 1}) return -1.0;
            if (t == std::vector<int>{2, 2}) return -1.0;
            if (t == std::vector<int>{3, 1}) return 0.0;
            return 1.0;  // 4-cycle
        })});
    table.push_back(FiniteIrrep{
        "two", 2, 1, chars_for([](const std::vector<int>& t) {
            if (t == std::vector<int>{1, 1, 1, 1}) return 2.0;
            if (t == std::vector<int>{2, 1, 1}) return 0.0;
            if (t == std::vector<int>{2, 2}) return 2.0;
            if (t == std::vector<int>{3, 1}) return -1.0;
            return 0.0;  // 4-cycle
        })});
    return table;
}

std::vector<FiniteIrrep> z2xz2_table() {
    // Element order: e, a, b, ab.
    return {
        FiniteIrrep{"triv", 1, 1, {1, 1, 1, 1}},
        FiniteIrrep{"sign_a", 1, 1, {1, -1, 1, -1}},
        FiniteIrrep{"sign_b", 1, 1, {1, 1, -1, -1}},
        FiniteIrrep{"sign_ab", 1, 1, {1, -1, -1, 1}},
    };
}

}  // namespace

std::vector<FiniteIrrep> builtin_irrep_table(const std::string& name) {
    if (name == "trivial") return {FiniteIrrep{"triv", 1, 1, {1.0}}};
    if (name == "Z2xZ2") return z2xz2_table();
    if (name.size() >= 2 && name[0] == 'Z') {
        int n = std::stoi(name.substr(1));
        if (n < 1) throw DomainError("builtin_irrep_table: bad order in " + name);
        return cyclic_table(n);
    }
    if (name.size() >= 2 && name[0] == 'D') {
        int n = std::stoi(name.substr(1));
        if (n < 3) throw DomainError("builtin_irrep_table: dihedral needs n >= 3");
        return dihedral_table(n);
    }
    if (name.size() >= 2 && name[0] == 'S') {
        int n = std::stoi(name.substr(1));
        if (n < 2 || n > 4)
            throw DomainError("builtin_irrep_table: symmetric groups S2..S4 only");
        return symmetric_table(n);
    }
    throw DomainError("builtin_irrep_table: unknown table " + name);
}

}  // namespace eqflow
