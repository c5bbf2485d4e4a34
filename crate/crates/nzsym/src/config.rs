//! Centralized numeric configuration.
//!
//! Every floating-point check in the crate reads its thresholds from one
//! [`Tolerances`] record so that reports are reproducible and the CLI can
//! override individual knobs (`--tol-*` flags).  The defaults are the
//! contract values asserted by the integration suite.

use serde::Serialize;

/// All numeric thresholds and sampling knobs, in one serializable record.
///
/// Exact (integer) checks take no tolerances; everything here concerns the
/// complex-arithmetic layer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative error allowed when a kernel rescaling must leave the
    /// z-point unchanged.
    pub z_rescale: f64,
    /// Relative error allowed when a diagonal `SL(n)` action on all four
    /// flags must leave the z-point unchanged.
    pub sl_invariance: f64,
    /// Relative error allowed between z-points of different affine lifts of
    /// the same four-point configuration.
    pub lift_independence: f64,
    /// Determinant floor, relative to the Hadamard bound of the stacked
    /// matrix, below which a flag configuration counts as degenerate.
    pub degenerate: f64,
    /// Absolute bound on the dual form evaluated on pairs of unit tangent
    /// vectors of the flag locus.
    pub isotropy: f64,
    /// Minimal ratio between the retained and discarded singular values of
    /// the flag-locus Jacobian.
    pub lagrangian_gap: f64,
    /// Default number of random flag samples per degree.
    pub lagrangian_samples: usize,
    /// Central-difference step for tangents along the hyperbolic locus.
    pub nz_step: f64,
    /// Relative error allowed on the two-form proportionality ratio, and on
    /// its stability under step halving.
    pub nz_ratio_rel: f64,
    /// Multiplicative equation residual required of a solver solution.
    pub newton_residual: f64,
    /// Iteration budget of one Newton run.
    pub newton_max_iter: usize,
    /// Number of randomized Newton starts.
    pub newton_starts: usize,
    /// Coordinate distance under which two solutions are identified.
    pub dedupe: f64,
    /// Allowed deviation of peripheral eigenvalues from 1 at a complete
    /// solution.
    pub completeness: f64,
    /// Allowed face/edge residual when evaluating a z-assignment that is
    /// claimed to satisfy the gluing equations.
    pub solution_residual: f64,
    /// Allowed error in the holonomy shadow `z∘h = (peripheral eigenvalue)²`.
    pub z_shadow: f64,
    /// Singular values below this are treated as zero in rank decisions.
    pub svd_zero: f64,
    /// Minimal ratio between the smallest retained and largest discarded
    /// singular value in rank decisions; smaller gaps are inconclusive.
    pub rigidity_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            z_rescale: 1e-12,
            sl_invariance: 1e-10,
            lift_independence: 1e-10,
            degenerate: 1e-10,
            isotropy: 1e-9,
            lagrangian_gap: 1e6,
            lagrangian_samples: 20,
            nz_step: 1e-5,
            nz_ratio_rel: 1e-4,
            newton_residual: 1e-12,
            newton_max_iter: 60,
            newton_starts: 64,
            dedupe: 1e-8,
            completeness: 1e-8,
            solution_residual: 1e-10,
            z_shadow: 1e-8,
            svd_zero: 1e-7,
            rigidity_gap: 1e4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_serialize_with_all_fields() {
        let t = Tolerances::default();
        let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        let obj = v.as_object().unwrap();
        assert_eq!(obj.len(), 18);
        assert_eq!(obj["isotropy"], 1e-9);
        assert_eq!(obj["lagrangian_samples"], 20);
    }
}
