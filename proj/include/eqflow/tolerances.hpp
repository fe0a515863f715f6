#ifndef EQFLOW_TOLERANCES_HPP
#define EQFLOW_TOLERANCES_HPP

namespace eqflow {

/// Numerical thresholds used across the engine. The defaults are the
/// documented contract; problem files may override the adjustable ones.
struct Tolerances {
    // Symmetry defect bound, relative to 1 + max|A_ij|.
    double sym_defect_rel = 1e-12;

    // Eigendecomposition residual, relative to max(1, ||A||_2).
    double eig_residual_rel = 1e-10;

    // eps_gap = gap_rel * max(1, ||A||_2): minimum distance between a
    // window endpoint and the spectrum, and the kernel threshold.
    double gap_rel = 1e-8;

    // Commutation residual for declared group actions on path samples.
    double action_commute = 1e-10;

    // Commutation residual granted to spectral projections.
    double projection_commute = 1e-8;

    // Absolute rounding tolerance for irreducible multiplicities.
    // Stricter than the eigensolver tolerance so representation errors
    // surface as decomposition errors, not silent flow errors.
    double decomp_round = 1e-6;

    // Character orthogonality residual for supplied irrep tables.
    double char_ortho = 1e-8;

    // Entrywise endpoint match required by path concatenation.
    double endpoint_match = 1e-12;

    // Residual for g^T J g = J of declared symplectic actions.
    double symplectic = 1e-10;

    // Margin below 1 required of consecutive witness projection jumps.
    double jump_margin = 1e-6;

    // Witness grid density per certified subinterval (>= 2).
    int witness_points = 5;

    // Initial uniform split of [0,1] before adaptive bisection.
    int initial_subintervals = 16;

    // Bisection depth cap; exceeding it is a certification failure.
    int max_bisections = 32;

    // Number of sample points for validating path invariants
    // (symmetry, equivariance) along [0,1].
    int validation_samples = 17;

    // Try to certify [0,1] as a single subinterval before splitting.
    bool coarse_first = true;
};

}  // namespace eqflow

#endif
