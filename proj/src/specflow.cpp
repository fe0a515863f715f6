#include "eqflow/specflow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "eqflow/parallel.hpp"

namespace eqflow {

struct MatrixPath::Impl {
    Kind kind = Kind::Composite;
    int order = 0;
    GroupPtr group;
    std::function<Matrix(double)> eval;
    double lipschitz = 0.0;
};

MatrixPath::MatrixPath(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

Matrix MatrixPath::operator()(double lambda) const {
    Matrix m = impl_->eval(lambda);
    return 0.5 * (m + m.transpose());
}

int MatrixPath::order() const { return impl_->order; }
MatrixPath::Kind MatrixPath::kind() const { return impl_->kind; }
const GroupPtr& MatrixPath::group() const { return impl_->group; }
double MatrixPath::lipschitz_bound() const { return impl_->lipschitz; }

namespace {

void validate_path(const MatrixPath& path, const Tolerances& tol) {
    const GroupPtr& group = path.group();
    if (!group) throw DomainError("MatrixPath: null group");
    if (group->ambient_dim() != path.order())
        throw DomainError(
            "MatrixPath: group ambient dimension does not match path order");
    int n = std::max(2, tol.validation_samples);
    for (int i = 0; i < n; ++i) {
        double lambda = static_cast<double>(i) / (n - 1);
        // SymmetricMatrix enforces the symmetry defect bound.
        Matrix a = SymmetricMatrix(path.eval_raw(lambda), tol).mat();
        double scale = std::max(1.0, max_abs(a));
        double defect = group->commutation_defect(a);
        if (defect > tol.action_commute * scale) {
            std::ostringstream os;
            os << "MatrixPath: action does not commute with A(" << lambda
               << ") (defect " << defect << ")";
            throw DomainError(os.str());
        }
    }
}

}  // namespace

Matrix MatrixPath::eval_raw(double lambda) const {
    return impl_->eval(lambda);
}

MatrixPath MatrixPath::affine(Matrix a0, Matrix a1, GroupPtr group,
                              const Tolerances& tol) {
    if (a0.rows() != a1.rows() || a0.cols() != a1.cols())
        throw DomainError("MatrixPath::affine: endpoint orders differ");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Affine;
    impl->order = static_cast<int>(a0.rows());
    impl->group = std::move(group);
    impl->lipschitz = sym_norm2(0.5 * ((a1 - a0) + (a1 - a0).transpose()));
    impl->eval = [a0 = std::move(a0), a1 = std::move(a1)](double t) {
        return Matrix((1.0 - t) * a0 + t * a1);
    };
    MatrixPath path(impl);
    validate_path(path, tol);
    return path;
}

MatrixPath MatrixPath::polynomial(std::vector<Matrix> coefficients,
                                  GroupPtr group, const Tolerances& tol) {
    if (coefficients.empty())
        throw DomainError("MatrixPath::polynomial: no coefficients");
    for (const Matrix& c : coefficients)
        if (c.rows() != coefficients[0].rows() ||
            c.cols() != coefficients[0].cols())
            throw DomainError(
                "MatrixPath::polynomial: coefficient orders differ");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Polynomial;
    impl->order = static_cast<int>(coefficients[0].rows());
    impl->group = std::move(group);
    // sup over [0,1] of the derivative norm is at most sum_j j ||C_j||.
    for (size_t j = 1; j < coefficients.size(); ++j) {
        Matrix sym = 0.5 * (coefficients[j] + coefficients[j].transpose());
        impl->lipschitz += static_cast<double>(j) * sym_norm2(sym);
    }
    impl->eval = [cs = std::move(coefficients)](double t) {
        Matrix acc = cs.back();
        for (auto it = cs.rbegin() + 1; it != cs.rend(); ++it)
            acc = t * acc + *it;
        return acc;
    };
    MatrixPath path(impl);
    validate_path(path, tol);
    return path;
}

MatrixPath MatrixPath::samples(std::vector<double> grid,
                               std::vector<Matrix> values, GroupPtr group,
                               const Tolerances& tol) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw DomainError("MatrixPath::samples: need matching grid and "
                          "values with at least two samples");
    if (std::abs(grid.front()) > 0 || std::abs(grid.back() - 1.0) > 0)
        throw DomainError("MatrixPath::samples: grid must start at 0 and "
                          "end at 1");
    for (size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw DomainError(
                "MatrixPath::samples: grid not strictly increasing");
    for (const Matrix& v : values)
        if (v.rows() != values[0].rows() || v.cols() != values[0].cols())
            throw DomainError("MatrixPath::samples: value orders differ");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Samples;
    impl->order = static_cast<int>(values[0].rows());
    impl->group = std::move(group);
    for (size_t i = 1; i < grid.size(); ++i) {
        Matrix diff = values[i] - values[i - 1];
        Matrix sym = 0.5 * (diff + diff.transpose());
        impl->lipschitz = std::max(
            impl->lipschitz, sym_norm2(sym) / (grid[i] - grid[i - 1]));
    }
    impl->eval = [g = std::move(grid), v = std::move(values)](double t) {
        if (t <= g.front()) return v.front();
        if (t >= g.back()) return v.back();
        auto it = std::upper_bound(g.begin(), g.end(), t);
        size_t hi = static_cast<size_t>(it - g.begin());
        size_t lo = hi - 1;
        double s = (t - g[lo]) / (g[hi] - g[lo]);
        return Matrix((1.0 - s) * v[lo] + s * v[hi]);
    };
    MatrixPath path(impl);
    validate_path(path, tol);
    return path;
}

MatrixPath MatrixPath::composite(std::function<Matrix(double)> eval, int order,
                                 GroupPtr group, bool validate,
                                 const Tolerances& tol, double lipschitz) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Composite;
    impl->order = order;
    impl->group = std::move(group);
    impl->eval = std::move(eval);
    if (lipschitz >= 0.0) {
        impl->lipschitz = lipschitz;
    } else {
        // Finite-difference estimate with headroom; the witness grid remains
        // the documented trust boundary for estimated bounds.
        const int cells = 64;
        double worst = 0.0;
        Matrix prev = impl->eval(0.0);
        prev = 0.5 * (prev + prev.transpose());
        for (int i = 1; i <= cells; ++i) {
            Matrix cur = impl->eval(static_cast<double>(i) / cells);
            cur = 0.5 * (cur + cur.transpose());
            worst = std::max(worst, sym_norm2(cur - prev) * cells);
            prev = std::move(cur);
        }
        impl->lipschitz = 2.0 * worst;
    }
    MatrixPath path(impl);
    if (validate) validate_path(path, tol);
    return path;
}

MatrixPath concat(const MatrixPath& p1, const MatrixPath& p2,
                  const Tolerances& tol) {
    if (p1.order() != p2.order())
        throw DomainError("concat: path orders differ");
    if (!p1.group()->labels_match(*p2.group()))
        throw DomainError("concat: group specs do not match");
    double mismatch = max_abs(p1(1.0) - p2(0.0));
    if (mismatch > tol.endpoint_match) {
        std::ostringstream os;
        os << "concat: endpoint mismatch " << mismatch << " exceeds "
           << tol.endpoint_match;
        throw DomainError(os.str());
    }
    double lipschitz =
        2.0 * std::max(p1.lipschitz_bound(), p2.lipschitz_bound());
    return MatrixPath::composite(
        [p1, p2](double t) {
            return t <= 0.5 ? p1(2.0 * t) : p2(2.0 * t - 1.0);
        },
        p1.order(), p1.group(), false, tol, lipschitz);
}

MatrixPath reverse(const MatrixPath& p) {
    return MatrixPath::composite([p](double t) { return p(1.0 - t); },
                                 p.order(), p.group(), false, {},
                                 p.lipschitz_bound());
}

namespace {

Matrix block_diag(const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

bool tables_equal(const std::vector<FiniteIrrep>& a,
                  const std::vector<FiniteIrrep>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].label != b[i].label || a[i].dim != b[i].dim ||
            a[i].schur != b[i].schur ||
            a[i].characters.size() != b[i].characters.size())
            return false;
        for (size_t j = 0; j < a[i].characters.size(); ++j)
            if (std::abs(a[i].characters[j] - b[i].characters[j]) > 1e-9)
                return false;
    }
    return true;
}

GroupPtr direct_sum_group(const GroupPtr& a, const GroupPtr& b,
                          const Tolerances& tol) {
    if (a->kind() != b->kind())
        throw DomainError("direct_sum: group kinds differ");
    std::optional<bool> nice;
    if (a->nice_asserted() == b->nice_asserted()) nice = a->nice_asserted();
    switch (a->kind()) {
        case GroupSpec::Kind::Finite: {
            if (a->elements().size() != b->elements().size() ||
                !tables_equal(a->finite_table(), b->finite_table()))
                throw DomainError(
                    "direct_sum: finite groups are not index-aligned copies "
                    "of the same abstract group");
            std::vector<Matrix> elements;
            for (size_t i = 0; i < a->elements().size(); ++i)
                elements.push_back(
                    block_diag(a->elements()[i], b->elements()[i]));
            return GroupSpec::finite(std::move(elements), a->finite_table(),
                                     nice, tol);
        }
        case GroupSpec::Kind::Circle: {
            std::vector<int> weights = a->weights();
            weights.insert(weights.end(), b->weights().begin(),
                           b->weights().end());
            return GroupSpec::circle(
                block_diag(a->generator(), b->generator()), weights, tol);
        }
        case GroupSpec::Kind::Product: {
            if (a->elements().size() != b->elements().size() ||
                !tables_equal(a->finite_table(), b->finite_table()))
                throw DomainError(
                    "direct_sum: finite factors are not index-aligned copies "
                    "of the same abstract group");
            std::vector<Matrix> elements;
            for (size_t i = 0; i < a->elements().size(); ++i)
                elements.push_back(
                    block_diag(a->elements()[i], b->elements()[i]));
            std::vector<int> weights = a->weights();
            weights.insert(weights.end(), b->weights().begin(),
                           b->weights().end());
            return GroupSpec::product(
                std::move(elements), a->finite_table(),
                block_diag(a->generator(), b->generator()), weights, nice,
                tol);
        }
    }
    throw DomainError("direct_sum: unknown group kind");
}

}  // namespace

MatrixPath direct_sum(const MatrixPath& p1, const MatrixPath& p2,
                      const Tolerances& tol) {
    GroupPtr group = direct_sum_group(p1.group(), p2.group(), tol);
    int order = p1.order() + p2.order();
    return MatrixPath::composite(
        [p1, p2](double t) { return block_diag(p1(t), p2(t)); }, order,
        std::move(group), false, tol,
        std::max(p1.lipschitz_bound(), p2.lipschitz_bound()));
}

// ---------------------------------------------------------------------------
// Partition certification
// ---------------------------------------------------------------------------

namespace {

/// Per-subtree cache of eigendecompositions keyed by the sample parameter.
class EigAtlas {
public:
    EigAtlas(const MatrixPath& path, const Tolerances& tol)
        : path_(path), tol_(tol) {}

    const EigenDecomposition& at(double lambda) {
        auto it = cache_.find(lambda);
        if (it != cache_.end()) return it->second;
        auto [pos, inserted] =
            cache_.emplace(lambda, eigh(path_(lambda), tol_));
        return pos->second;
    }

private:
    const MatrixPath& path_;
    const Tolerances& tol_;
    std::map<double, EigenDecomposition> cache_;
};

std::vector<double> witness_grid(double lo, double hi, int count) {
    std::vector<double> out;
    for (int j = 0; j < count; ++j)
        out.push_back(lo + (hi - lo) * j / (count - 1));
    return out;
}

/// Candidate window radii from the merged |eigenvalue| profile at the
/// endpoint and midpoint samples: below the bottom level, inside the
/// spectral gaps, and above the top level.
std::vector<double> candidate_radii(const std::vector<double>& levels,
                                    double gap) {
    std::vector<double> out;
    if (levels.empty()) return out;
    out.push_back(levels.front() / 2.0);
    for (size_t j = 0; j + 1 < levels.size(); ++j)
        if (levels[j + 1] - levels[j] > 4.0 * gap)
            out.push_back(0.5 * (levels[j] + levels[j + 1]));
    out.push_back(2.0 * levels.back());
    return out;
}

struct WindowCheck {
    bool ok = false;
    double max_jump = 0.0;
    int rank = 0;
};

/// Verifies a radius on the witness grid. Every witness eigenvalue must
/// keep distance max(eps_gap, L h / 2) from +-a, where L is the path's
/// Lipschitz bound and h the witness spacing: by Weyl's inequality the
/// branches cannot reach +-a between witnesses, so the window rank is
/// constant on the whole subinterval. Consecutive window projections must
/// additionally move by less than 1.
WindowCheck check_radius(EigAtlas& atlas, const std::vector<double>& witnesses,
                         double radius, double lipschitz,
                         const Tolerances& tol) {
    WindowCheck res;
    double spacing = witnesses.size() > 1 ? witnesses[1] - witnesses[0] : 1.0;
    double travel = 0.5 * lipschitz * spacing;
    std::vector<Matrix> projections;
    int rank = -1;
    for (double w : witnesses) {
        const EigenDecomposition& eig = atlas.at(w);
        double margin = std::max(eig.gap(tol), travel);
        int count = 0;
        for (int i = 0; i < eig.order(); ++i) {
            double mu = eig.eigenvalues(i);
            if (std::abs(std::abs(mu) - radius) < margin) return res;
            if (mu > -radius && mu < radius) ++count;
        }
        if (rank < 0)
            rank = count;
        else if (count != rank)
            return res;  // rank jump: projections would be distance 1 apart
        Matrix basis = spectral_subspace(eig, -radius, radius, tol);
        projections.push_back(projection_from_basis(basis, eig.order()));
    }
    double max_jump = 0.0;
    for (size_t j = 1; j < projections.size(); ++j)
        max_jump = std::max(
            max_jump, projection_distance(projections[j], projections[j - 1]));
    if (max_jump >= 1.0 - tol.jump_margin) return res;
    res.ok = true;
    res.max_jump = max_jump;
    res.rank = rank;
    return res;
}

/// Attempts to certify [lo, hi] without bisecting.
bool try_certify(EigAtlas& atlas, double lo, double hi, int depth,
                 double lipschitz, const Tolerances& tol,
                 CertifiedInterval& out, bool& degenerate) {
    double mid = 0.5 * (lo + hi);
    std::vector<double> levels;
    double gap_max = 0.0;
    for (double s : {lo, mid, hi}) {
        const EigenDecomposition& eig = atlas.at(s);
        double gap = eig.gap(tol);
        gap_max = std::max(gap_max, gap);
        for (int i = 0; i < eig.order(); ++i) {
            double mu = std::abs(eig.eigenvalues(i));
            if (mu > gap) levels.push_back(mu);
        }
    }
    if (levels.empty()) {
        // No eigenvalue above the gap threshold at any sample: no radius
        // can be anchored to the spectrum.
        degenerate = true;
        return false;
    }
    degenerate = false;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(),
                             [](double x, double y) {
                                 return std::abs(x - y) <=
                                        1e-9 * std::max(1.0, std::abs(y));
                             }),
                 levels.end());
    std::vector<double> witnesses =
        witness_grid(lo, hi, std::max(2, tol.witness_points));
    for (double radius : candidate_radii(levels, gap_max)) {
        WindowCheck check =
            check_radius(atlas, witnesses, radius, lipschitz, tol);
        if (!check.ok) continue;
        out = CertifiedInterval{lo,           hi,         radius, witnesses,
                                check.max_jump, check.rank, depth};
        return true;
    }
    return false;
}

void certify_recursive(EigAtlas& atlas, double lo, double hi, int depth,
                       double lipschitz, const Tolerances& tol,
                       std::vector<CertifiedInterval>& out) {
    CertifiedInterval interval;
    bool degenerate = false;
    if (try_certify(atlas, lo, hi, depth, lipschitz, tol, interval,
                    degenerate)) {
        out.push_back(std::move(interval));
        return;
    }
    if (degenerate) {
        std::ostringstream os;
        os << "certify_partition: no eigenvalue above the gap threshold on ["
           << lo << ", " << hi << "]: identically degenerate path segment";
        throw CertificationError(os.str(), lo, hi, true);
    }
    if (depth >= tol.max_bisections) {
        std::ostringstream os;
        os << "certify_partition: bisection depth cap " << tol.max_bisections
           << " reached on [" << lo << ", " << hi
           << "]: an eigenvalue stays pinned near every admissible radius";
        throw CertificationError(os.str(), lo, hi, false);
    }
    double mid = 0.5 * (lo + hi);
    certify_recursive(atlas, lo, mid, depth + 1, lipschitz, tol, out);
    certify_recursive(atlas, mid, hi, depth + 1, lipschitz, tol, out);
}

}  // namespace

PartitionCertificate certify_partition(const MatrixPath& path,
                                       const Tolerances& tol, int threads) {
    PartitionCertificate cert;
    const double lipschitz = path.lipschitz_bound();
    if (tol.coarse_first) {
        EigAtlas atlas(path, tol);
        CertifiedInterval whole;
        bool degenerate = false;
        if (try_certify(atlas, 0.0, 1.0, 0, lipschitz, tol, whole,
                        degenerate)) {
            cert.intervals.push_back(std::move(whole));
            return cert;
        }
        if (degenerate)
            throw CertificationError(
                "certify_partition: no eigenvalue above the gap threshold on "
                "[0, 1]: identically degenerate path",
                0.0, 1.0, true);
    }
    int cells = std::max(1, tol.initial_subintervals);
    std::vector<std::vector<CertifiedInterval>> parts(
        static_cast<size_t>(cells));
    parallel_for(cells, threads, [&](int i) {
        double lo = static_cast<double>(i) / cells;
        double hi = static_cast<double>(i + 1) / cells;
        EigAtlas atlas(path, tol);
        certify_recursive(atlas, lo, hi, 0, lipschitz, tol,
                          parts[static_cast<size_t>(i)]);
    });
    for (auto& part : parts)
        for (auto& interval : part) {
            cert.max_depth = std::max(cert.max_depth, interval.depth);
            cert.intervals.push_back(std::move(interval));
        }
    return cert;
}

// ---------------------------------------------------------------------------
// Flow computation
// ---------------------------------------------------------------------------

namespace {

struct NodeData {
    std::int64_t dim = 0;
    Matrix basis;
};

NodeData window_at(const MatrixPath& path, double lambda, double radius,
                   const Tolerances& tol, bool with_basis) {
    EigenDecomposition eig = eigh(path(lambda), tol);
    NodeData out;
    if (with_basis) {
        out.basis = zero_window_subspace(eig, radius, tol);
        out.dim = out.basis.cols();
    } else {
        double gap = eig.gap(tol);
        for (int i = 0; i < eig.order(); ++i) {
            double mu = eig.eigenvalues(i);
            if (mu > -gap && mu < radius) ++out.dim;
        }
    }
    return out;
}

FlowResult flow_from_certificate(const MatrixPath& path,
                                 const PartitionCertificate& cert,
                                 const Tolerances& tol, int threads,
                                 bool equivariant) {
    const GroupPtr& group = path.group();
    const int n = static_cast<int>(cert.intervals.size());
    std::vector<SubContribution> contributions(
        static_cast<size_t>(n),
        SubContribution{0, 0, 0, 0, 0, VirtualRep(group)});
    parallel_for(n, threads, [&](int i) {
        const CertifiedInterval& iv = cert.intervals[static_cast<size_t>(i)];
        NodeData lo = window_at(path, iv.lo, iv.radius, tol, equivariant);
        NodeData hi = window_at(path, iv.hi, iv.radius, tol, equivariant);
        SubContribution c{iv.lo,  iv.hi,  iv.radius,
                          lo.dim, hi.dim, VirtualRep(group)};
        if (equivariant) {
            VirtualRep rep_lo =
                decompose(InvariantSubspace(lo.basis, group, tol), tol);
            VirtualRep rep_hi =
                decompose(InvariantSubspace(hi.basis, group, tol), tol);
            c.delta = rep_sub(rep_hi, rep_lo);
        }
        contributions[static_cast<size_t>(i)] = std::move(c);
    });
    FlowResult result{VirtualRep(group), 0, cert, {}, {}};
    for (auto& c : contributions) {
        result.classical += c.dim_hi - c.dim_lo;
        if (equivariant) result.equivariant = rep_add(result.equivariant, c.delta);
    }
    result.contributions = std::move(contributions);
    if (equivariant && forgetful_dim(result.equivariant) != result.classical)
        throw NumericError(
            "spectral flow: forgetful image disagrees with the classical "
            "count");
    return result;
}

}  // namespace

std::int64_t sfl_classical(const MatrixPath& path,
                           const PartitionCertificate& certificate,
                           const Tolerances& tol, int threads) {
    return flow_from_certificate(path, certificate, tol, threads, false)
        .classical;
}

std::int64_t sfl_classical(const MatrixPath& path, const Tolerances& tol,
                           int threads) {
    return sfl_classical(path, certify_partition(path, tol, threads), tol,
                         threads);
}

FlowResult sfl_equivariant(const MatrixPath& path,
                           const PartitionCertificate& certificate,
                           const Tolerances& tol, int threads) {
    return flow_from_certificate(path, certificate, tol, threads, true);
}

FlowResult sfl_equivariant(const MatrixPath& path, const Tolerances& tol,
                           int threads) {
    return sfl_equivariant(path, certify_partition(path, tol, threads), tol,
                           threads);
}

FlowResult sfl_morse_difference(const MatrixPath& path,
                                const Tolerances& tol) {
    const GroupPtr& group = path.group();
    FlowResult result{VirtualRep(group), 0, {}, {}, {}};
    EigenDecomposition eig0 = eigh(path(0.0), tol);
    EigenDecomposition eig1 = eigh(path(1.0), tol);
    auto warn_kernel = [&](const EigenDecomposition& eig, const char* name) {
        int k = kernel_dim(eig, tol);
        if (k > 0) {
            std::ostringstream os;
            os << "endpoint kernel of dimension " << k << " at " << name
               << "; kernel vectors are excluded from E^-";
            result.warnings.push_back(os.str());
        }
    };
    warn_kernel(eig0, "lambda = 0");
    warn_kernel(eig1, "lambda = 1");
    Matrix neg0 = negative_subspace(eig0, true, tol);
    Matrix neg1 = negative_subspace(eig1, true, tol);
    VirtualRep rep0 = decompose(InvariantSubspace(neg0, group, tol), tol);
    VirtualRep rep1 = decompose(InvariantSubspace(neg1, group, tol), tol);
    result.equivariant = rep_sub(rep0, rep1);
    result.classical = forgetful_dim(result.equivariant);
    return result;
}

Z2ExampleResult z2_example(const MatrixPath& base, const Tolerances& tol,
                           int threads) {
    const int m = base.order();
    Matrix flip = Matrix::Identity(2 * m, 2 * m);
    flip.bottomRightCorner(m, m) = -Matrix::Identity(m, m);
    std::vector<Matrix> elements{Matrix::Identity(2 * m, 2 * m), flip};
    std::vector<FiniteIrrep> table{FiniteIrrep{"triv", 1, 1, {1.0, 1.0}},
                                   FiniteIrrep{"sign", 1, 1, {1.0, -1.0}}};
    GroupPtr z2 = GroupSpec::finite(std::move(elements), std::move(table),
                                    true, tol);
    MatrixPath block = MatrixPath::composite(
        [base](double t) {
            Matrix a = base(t);
            return block_diag(a, Matrix(-a));
        },
        2 * m, z2, false, tol, base.lipschitz_bound());

    Z2ExampleResult out{sfl_equivariant(block, tol, threads), {0, 0}, 0, block};
    out.phi = phi_z2(out.flow.equivariant);
    GroupPtr trivial = GroupSpec::trivial(m);
    MatrixPath plain =
        MatrixPath::composite([base](double t) { return base(t); }, m,
                              trivial, false, tol, base.lipschitz_bound());
    out.base_classical = sfl_classical(plain, tol, threads);
    if (out.phi.first != out.flow.classical || out.phi.first != 0)
        throw NumericError(
            "z2_example: classical flow of the block path is nonzero");
    if (out.phi.second != out.base_classical)
        throw NumericError(
            "z2_example: phi-image disagrees with the base spectral flow");
    return out;
}

}  // namespace eqflow
