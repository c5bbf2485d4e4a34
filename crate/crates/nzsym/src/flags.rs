//! Complex-arithmetic layer over the lattice machinery.
//!
//! This module works with *affine flags*: a flag in `C^n` given with a
//! decoration, stored as the `n×(n−1)` matrix whose first `k` columns
//! generate the level-`k` multivector `F(k)` (their wedge).  A tetrahedron
//! of four such flags evaluates to a nonzero complex number `a_α` at every
//! lattice point `α`, and pushing `a` through the skew form gives the
//! z-point of the tetrahedron — the coordinates the gluing equations are
//! written in.
//!
//! On top of that sit the numeric verdicts: the flag locus is Lagrangian for
//! the dual form, the restriction of the dual form to the one-parameter
//! hyperbolic (Veronese) locus is a fixed multiple `n(n²−1)/6` of the
//! classical two-term shape form, the degree-2 gluing system is solvable by
//! Newton iteration and recovers the complete hyperbolic structure, and the
//! peripheral-holonomy differential at that structure has the expected rank.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::PI;
use thiserror::Error;

use crate::config::Tolerances;
use crate::intmat::IMat;
use crate::links::LinkError;
use crate::peripheral::{HConvention, Peripheral};
use crate::report::{CheckReport, Status};
use crate::tetra::{build_module, SkewModule, TetraLattice, Weights, FACE_VERTICES};
use crate::triangulation::{LinkKind, Triangulation};

type CMat = DMatrix<Complex64>;
type CVec = DVector<Complex64>;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Errors of the numeric layer.
#[derive(Debug, Error)]
pub enum FlagError {
    /// A stacked generator matrix has (numerically) vanishing determinant.
    #[error("degenerate flag configuration at point {point}")]
    Degenerate { point: String },
    /// The requested computation does not apply to this input.
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// Link surfaces could not be built.
    #[error(transparent)]
    Link(#[from] LinkError),
}

// ---------------------------------------------------------------------------
// Affine flags
// ---------------------------------------------------------------------------

/// Four affine flags in `C^n`, each stored as the `n×(n−1)` matrix of its
/// generating columns: the level-`k` multivector is the wedge of the first
/// `k` columns.
#[derive(Clone, Debug)]
pub struct AffineFlagTuple {
    pub n: usize,
    pub flags: [CMat; 4],
}

impl AffineFlagTuple {
    /// Wraps four generator matrices; panics unless every matrix is
    /// `n×(n−1)`.
    pub fn new(n: usize, flags: [CMat; 4]) -> AffineFlagTuple {
        assert!(n >= 2);
        for f in &flags {
            assert_eq!((f.nrows(), f.ncols()), (n, n - 1), "flag matrices must be n x (n-1)");
        }
        AffineFlagTuple { n, flags }
    }

    /// Four flags with independent uniform entries in the unit square; in
    /// general position with probability one.
    pub fn random(n: usize, rng: &mut impl Rng) -> AffineFlagTuple {
        let mut mk = || {
            CMat::from_fn(n, n - 1, |_, _| {
                c64(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
            })
        };
        let flags = [mk(), mk(), mk(), mk()];
        AffineFlagTuple { n, flags }
    }

    /// Applies one linear map to all four flags.
    pub fn transform(&self, g: &CMat) -> AffineFlagTuple {
        let flags = [
            g * &self.flags[0],
            g * &self.flags[1],
            g * &self.flags[2],
            g * &self.flags[3],
        ];
        AffineFlagTuple { n: self.n, flags }
    }

    /// Number of complex matrix entries, i.e. columns of the parameter
    /// Jacobians: `4·n·(n−1)`.
    pub fn param_count(&self) -> usize {
        4 * self.n * (self.n - 1)
    }

    /// The flag/column/row of a parameter index (inverse of
    /// [`param_index`]).
    pub fn param_of(&self, p: usize) -> (usize, usize, usize) {
        let n = self.n;
        (p / ((n - 1) * n), (p / n) % (n - 1), p % n)
    }

    /// Returns a copy with one matrix entry shifted by `delta`.
    pub fn perturbed(&self, param: usize, delta: Complex64) -> AffineFlagTuple {
        let (f, col, row) = self.param_of(param);
        let mut out = self.clone();
        out.flags[f][(row, col)] += delta;
        out
    }
}

/// Parameter index of entry `(row, col)` of flag `f` for degree `n`.
pub fn param_index(n: usize, f: usize, col: usize, row: usize) -> usize {
    (f * (n - 1) + col) * n + row
}

/// The support of a lattice point as an ordered list of `(vertex, weight)`.
///
/// Edge points put the less weighted vertex first, ties broken by vertex
/// index.  Interior face points use the boundary orientation of their
/// unique face as the canonical presentation; any fixed choice gives
/// coordinates differing only by signs that cancel in every pairing.
fn ordered_support(w: Weights) -> Vec<(usize, i64)> {
    let nz: Vec<usize> = (0..4).filter(|&v| w[v] != 0).collect();
    if nz.len() == 2 {
        let (i, j) = (nz[0], nz[1]);
        if w[j] < w[i] {
            vec![(j, w[j]), (i, w[i])]
        } else {
            vec![(i, w[i]), (j, w[j])]
        }
    } else {
        let f = (0..4).find(|&v| w[v] == 0).expect("face point has a zero weight");
        FACE_VERTICES[f].iter().map(|&v| (v, w[v])).collect()
    }
}

/// The `(flag, column)` occupying each column of the stacked evaluation
/// matrix of a point.
fn stacked_positions(w: Weights) -> Vec<(usize, usize)> {
    let mut pos = Vec::new();
    for (v, wt) in ordered_support(w) {
        for cc in 0..wt as usize {
            pos.push((v, cc));
        }
    }
    pos
}

// ---------------------------------------------------------------------------
// Evaluation context
// ---------------------------------------------------------------------------

/// Precomputed single-tetrahedron data for numeric evaluation at one degree:
/// the point lattice, the exact skew module, the form as sparse integer rows
/// and as a complex matrix, and a pseudo-inverse of the form for evaluating
/// the dual form on tangent vectors.
pub struct FlagContext {
    pub n: i64,
    pub lat: TetraLattice,
    pub module: SkewModule,
    form_rows: Vec<Vec<(usize, i32)>>,
    form_c: CMat,
    pinv_c: CMat,
}

impl FlagContext {
    pub fn new(n: i64) -> FlagContext {
        let (lat, module) = build_module(n);
        let total = lat.len();
        let mut form_rows = Vec::with_capacity(total);
        for r in 0..total {
            let mut row = Vec::new();
            for cc in 0..total {
                let v = module.form.get(r, cc).to_i32().expect("small form entry");
                if v != 0 {
                    row.push((cc, v));
                }
            }
            form_rows.push(row);
        }
        let ff = module.form.to_f64_rows();
        let form_f = DMatrix::from_fn(total, total, |r, cc| ff[r][cc]);
        let form_c = form_f.map(|x| c64(x, 0.0));
        let svd = form_f.svd(true, true);
        let smax = svd.singular_values[0];
        let pinv = svd.pseudo_inverse(1e-9 * smax).expect("pseudo-inverse exists");
        let pinv_c = pinv.map(|x| c64(x, 0.0));
        FlagContext { n, lat, module, form_rows, form_c, pinv_c }
    }

    /// The stacked `n×n` evaluation matrix of flags at a lattice point.
    fn stacked(&self, flags: &AffineFlagTuple, w: Weights) -> CMat {
        let n = self.n as usize;
        let pos = stacked_positions(w);
        CMat::from_fn(n, n, |r, s| {
            let (f, cc) = pos[s];
            flags.flags[f][(r, cc)]
        })
    }

    /// The exponent coordinate vector: the determinant of the stacked
    /// generator matrix at every lattice point, in lattice order.
    ///
    /// Fails with a degeneracy error when a determinant falls below
    /// `degenerate` relative to its Hadamard bound.
    pub fn a_coordinates(
        &self,
        flags: &AffineFlagTuple,
        degenerate: f64,
    ) -> Result<CVec, FlagError> {
        assert_eq!(flags.n as i64, self.n);
        let mut out = CVec::zeros(self.lat.len());
        for (pi, &w) in self.lat.points.iter().enumerate() {
            let m = self.stacked(flags, w);
            let det = m.determinant();
            let bound: f64 = (0..m.ncols()).map(|j| m.column(j).norm()).product();
            if det.norm() <= degenerate * bound.max(f64::MIN_POSITIVE) {
                return Err(FlagError::Degenerate { point: format!("{w:?}") });
            }
            out[pi] = det;
        }
        Ok(out)
    }

    /// The exponent coordinates together with the exact derivative of their
    /// logarithms: `jac[α][p] = ∂ log a_α / ∂(entry p)`, built from matrix
    /// inverses (no finite differences).
    pub fn a_jacobian(
        &self,
        flags: &AffineFlagTuple,
        degenerate: f64,
    ) -> Result<(CVec, CMat), FlagError> {
        assert_eq!(flags.n as i64, self.n);
        let n = self.n as usize;
        let mut a = CVec::zeros(self.lat.len());
        let mut jac = CMat::zeros(self.lat.len(), flags.param_count());
        for (pi, &w) in self.lat.points.iter().enumerate() {
            let m = self.stacked(flags, w);
            let bound: f64 = (0..m.ncols()).map(|j| m.column(j).norm()).product();
            let lu = m.clone().lu();
            let det = lu.determinant();
            if det.norm() <= degenerate * bound.max(f64::MIN_POSITIVE) {
                return Err(FlagError::Degenerate { point: format!("{w:?}") });
            }
            let inv = lu.try_inverse().expect("nonzero determinant");
            a[pi] = det;
            for (s, &(f, cc)) in stacked_positions(w).iter().enumerate() {
                for r in 0..n {
                    jac[(pi, param_index(n, f, cc, r))] += inv[(s, r)];
                }
            }
        }
        Ok((a, jac))
    }

    /// Pushes exponent coordinates through the skew form: the z-point with
    /// `z_β = ∏_α a_α^{ε_{βα}}`, computed multiplicatively (no branch
    /// choices involved).
    pub fn z_point(&self, a: &CVec) -> ZPoint {
        let mut values = CVec::from_element(self.lat.len(), ONE);
        for (b, row) in self.form_rows.iter().enumerate() {
            let mut acc = ONE;
            for &(al, e) in row {
                acc *= a[al].powi(e);
            }
            values[b] = acc;
        }
        ZPoint { n: self.n, values }
    }

    /// Convenience composition of [`Self::a_coordinates`] and
    /// [`Self::z_point`].
    pub fn z_of_flags(
        &self,
        flags: &AffineFlagTuple,
        degenerate: f64,
    ) -> Result<ZPoint, FlagError> {
        Ok(self.z_point(&self.a_coordinates(flags, degenerate)?))
    }

    /// The exact derivative of `log z` with respect to the flag entries
    /// (form matrix times the exponent-coordinate Jacobian), together with
    /// the exponent coordinates.
    pub fn z_log_jacobian(
        &self,
        flags: &AffineFlagTuple,
        degenerate: f64,
    ) -> Result<(CVec, CMat), FlagError> {
        let (a, ja) = self.a_jacobian(flags, degenerate)?;
        Ok((a, &self.form_c * ja))
    }

    /// Central-difference derivative of `log z`, via `δz/z` so that no
    /// logarithm branch is ever taken.  Second-order in `h`; used only to
    /// guard the exact Jacobian.
    pub fn fd_z_log_jacobian(
        &self,
        flags: &AffineFlagTuple,
        h: f64,
        degenerate: f64,
    ) -> Result<CMat, FlagError> {
        let z0 = self.z_of_flags(flags, degenerate)?.values;
        let mut jac = CMat::zeros(self.lat.len(), flags.param_count());
        for p in 0..flags.param_count() {
            let zp = self.z_of_flags(&flags.perturbed(p, c64(h, 0.0)), degenerate)?.values;
            let zm = self.z_of_flags(&flags.perturbed(p, c64(-h, 0.0)), degenerate)?.values;
            for b in 0..self.lat.len() {
                jac[(b, p)] = (zp[b] - zm[b]) / (2.0 * h * z0[b]);
            }
        }
        Ok(jac)
    }

    /// The dual form on two vectors in the image of the form: solves
    /// `form·x = ξ` by the precomputed pseudo-inverse and returns `xᵀ·η`
    /// (complex-bilinear, no conjugation).
    pub fn omega_star(&self, xi: &CVec, eta: &CVec) -> Complex64 {
        (&self.pinv_c * xi).dot(eta)
    }
}

/// The z-point of one tetrahedron: a nonzero complex value per lattice
/// point.  Pairing the values against any kernel vector of the form gives 1,
/// which is what makes the point independent of the affine lift.
#[derive(Clone, Debug)]
pub struct ZPoint {
    pub n: i64,
    pub values: CVec,
}

impl ZPoint {
    /// Evaluates `∏_β z_β^{e_β}` for an integer exponent column.
    pub fn eval(&self, exps: &IMat) -> Complex64 {
        eval_exponents(&self.values, exps)
    }

    /// Largest deviation of `∏ z^v − 1` over the columns of a kernel basis.
    pub fn kernel_defect(&self, kernel: &IMat) -> f64 {
        (0..kernel.cols())
            .map(|j| (eval_exponents(&self.values, &kernel.col(j)) - ONE).norm())
            .fold(0.0, f64::max)
    }
}

/// Evaluates `∏_β z_β^{e_β}` for an integer exponent column over any value
/// vector.
pub fn eval_exponents(values: &CVec, exps: &IMat) -> Complex64 {
    assert_eq!(exps.cols(), 1);
    assert_eq!(exps.rows(), values.len());
    let mut acc = ONE;
    for r in 0..exps.rows() {
        let e = exps.get(r, 0).to_i32().expect("small exponent");
        if e != 0 {
            acc *= values[r].powi(e);
        }
    }
    acc
}

/// The standardization sign of a lattice point.
///
/// The even-degree edge rule (put the less weighted vertex first) cannot
/// break the tie at edge midpoints, and a parity argument shows that *any*
/// tie convention leaves exactly one opposite-edge pair of a tetrahedron
/// whose z-coordinate is the negative of the classical edge parameter;
/// with ties broken by ascending vertex index that pair is `{02, 13}`.
/// Products of z-coordinates must therefore be compared against the
/// product of these signs rather than against 1.  At odd degrees every
/// sign is `+1`.
pub fn corner_sign(w: Weights) -> i64 {
    let nz: Vec<usize> = (0..4).filter(|&v| w[v] != 0).collect();
    if nz.len() == 2 && w[nz[0]] == w[nz[1]] {
        match (nz[0], nz[1]) {
            (0, 2) | (1, 3) => -1,
            _ => 1,
        }
    } else {
        1
    }
}

/// The standardization sign of an integer exponent row over the global
/// points of a glued complex: the product of [`corner_sign`] to the parity
/// of each exponent.
pub fn row_sign(lat: &TetraLattice, exps: &[(usize, i64)]) -> i64 {
    let per = lat.len();
    let mut sign = 1;
    for &(gi, e) in exps {
        if e.rem_euclid(2) == 1 && corner_sign(lat.points[gi % per]) < 0 {
            sign = -sign;
        }
    }
    sign
}

/// [`row_sign`] for a dense integer column over the global points.
pub fn row_sign_col(lat: &TetraLattice, col: &IMat) -> i64 {
    assert_eq!(col.cols(), 1);
    let per = lat.len();
    let mut sign = 1;
    for r in 0..col.rows() {
        let e = col.get(r, 0).to_i64().expect("small exponent");
        if e.rem_euclid(2) == 1 && corner_sign(lat.points[r % per]) < 0 {
            sign = -sign;
        }
    }
    sign
}

fn eval_sparse(values: &[Complex64], exps: &[(usize, i64)]) -> Complex64 {
    let mut acc = ONE;
    for &(i, e) in exps {
        acc *= values[i].powi(e as i32);
    }
    acc
}

fn log_sparse(values: &[Complex64], exps: &[(usize, i64)]) -> Complex64 {
    let mut acc = c64(0.0, 0.0);
    for &(i, e) in exps {
        acc += c64(e as f64, 0.0) * values[i].ln();
    }
    acc
}

// ---------------------------------------------------------------------------
// Veronese (hyperbolic) flags
// ---------------------------------------------------------------------------

/// Coefficients of `(aX + bY)^p` in the monomial basis `X^p, X^{p−1}Y, …`.
fn binomial_power(a: Complex64, b: Complex64, p: usize) -> Vec<Complex64> {
    let mut out = vec![ONE; p + 1];
    // binomial(p, i) * a^(p-i) * b^i, built incrementally.
    let mut coeff = a.powi(p as i32);
    let mut acc = Vec::with_capacity(p + 1);
    acc.push(coeff);
    for i in 1..=p {
        // multiply by b/a * (p - i + 1)/i — avoid dividing by a possibly
        // tiny `a` by recomputing directly instead.
        coeff = a.powi((p - i) as i32) * b.powi(i as i32) * c64(binom(p, i), 0.0);
        acc.push(coeff);
    }
    out.copy_from_slice(&acc);
    out
}

fn binom(p: usize, i: usize) -> f64 {
    let mut v = 1.0;
    for k in 0..i {
        v = v * (p - k) as f64 / (k + 1) as f64;
    }
    v
}

fn poly_mul(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c64(0.0, 0.0); u.len() + v.len() - 1];
    for (i, &x) in u.iter().enumerate() {
        for (j, &y) in v.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// The flags of the four points `∞, 0, 1, x` of the projective line, lifted
/// through the symmetric-power embedding into `C^n`: the flag of a point is
/// osculating to the rational normal curve, with generating column `j`
/// equal to the coefficient vector of `(aX+bY)^{n−1−j}(cX+dY)^j` where
/// `(a,b)` represents the point and `(c,d)` a transverse companion.
///
/// The ordering is chosen so that at `n = 2` the z-coordinate at edge `01`
/// is exactly the shape parameter `x` — the tetrahedron is positively
/// oriented precisely when `x` lies in the upper half plane.
///
/// `lifts[v] = [s, t, u]` rescales the point vector by `s` and replaces the
/// companion by `t·q + u·p`; these moves change the generator matrices by
/// triangular gauge only, so the z-point is unchanged.  At `n = 2` the flags
/// are the four point vectors themselves.
pub fn veronese_flags_lifted(
    cross_ratio: Complex64,
    n: i64,
    lifts: &[[Complex64; 3]; 4],
) -> Result<AffineFlagTuple, FlagError> {
    assert!(n >= 2);
    let x = cross_ratio;
    if x.norm() < 1e-12 || (x - ONE).norm() < 1e-12 {
        return Err(FlagError::Unsupported(format!("degenerate cross-ratio {x}")));
    }
    let nn = n as usize;
    let pts = [ONE, c64(0.0, 0.0), ONE, x];
    let dens = [c64(0.0, 0.0), ONE, ONE, ONE];
    let mut flags = Vec::with_capacity(4);
    for v in 0..4 {
        let p = (pts[v], dens[v]);
        let q0 = if p.1.norm() >= p.0.norm() { (ONE, c64(0.0, 0.0)) } else { (c64(0.0, 0.0), ONE) };
        let [s, t, u] = lifts[v];
        if s.norm() < 1e-12 || t.norm() < 1e-12 {
            return Err(FlagError::Unsupported("singular lift scaling".into()));
        }
        let ps = (s * p.0, s * p.1);
        let q = (t * q0.0 + u * p.0, t * q0.1 + u * p.1);
        let mut cols = Vec::with_capacity(nn - 1);
        for j in 0..nn - 1 {
            let pp = binomial_power(ps.0, ps.1, nn - 1 - j);
            let qq = binomial_power(q.0, q.1, j);
            let col = poly_mul(&pp, &qq);
            cols.push(CVec::from_vec(col));
        }
        flags.push(CMat::from_columns(&cols));
    }
    let flags: [CMat; 4] = flags.try_into().expect("four flags");
    Ok(AffineFlagTuple { n: nn, flags })
}

/// [`veronese_flags_lifted`] with the canonical lifts.
pub fn veronese_flags(cross_ratio: Complex64, n: i64) -> Result<AffineFlagTuple, FlagError> {
    let id = [ONE, ONE, c64(0.0, 0.0)];
    veronese_flags_lifted(cross_ratio, n, &[id, id, id, id])
}

// ---------------------------------------------------------------------------
// Lagrangian check
// ---------------------------------------------------------------------------

/// Result of sampling the flag locus: tangent rank and isotropy of the dual
/// form on the tangent spaces.
#[derive(Clone, Debug, Serialize)]
pub struct LagrangianReport {
    pub n: i64,
    pub samples: usize,
    pub resampled: usize,
    pub expected_rank: usize,
    /// Smallest ratio between retained and discarded singular values seen.
    pub min_gap: f64,
    /// Largest `|Ω*(u_i, u_j)|` over unit tangent pairs seen.
    pub max_isotropy: f64,
    pub failed: Vec<String>,
}

impl LagrangianReport {
    pub fn pass(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn report(&self) -> CheckReport {
        CheckReport::new(
            "lagrangian-locus",
            self.n,
            Status::from_bool(self.pass()),
            json!({
                "samples": self.samples,
                "resampled": self.resampled,
                "expected_rank": self.expected_rank,
                "min_gap": self.min_gap,
                "max_isotropy": self.max_isotropy,
                "failed": self.failed,
            }),
        )
    }
}

/// Samples random flag tetrahedra and verifies that the z-image has tangent
/// rank `(n−1)²` (with a hard singular-value gap) and that the dual form
/// vanishes on all pairs of unit tangent vectors.
pub fn lagrangian_check(n: i64, samples: usize, seed: u64, tol: &Tolerances) -> LagrangianReport {
    let ctx = FlagContext::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = ((n - 1) * (n - 1)) as usize;
    let mut report = LagrangianReport {
        n,
        samples,
        resampled: 0,
        expected_rank: r,
        min_gap: f64::INFINITY,
        max_isotropy: 0.0,
        failed: Vec::new(),
    };
    let budget = 10 * samples + 50;
    let mut done = 0;
    let mut attempts = 0;
    while done < samples && attempts < budget {
        attempts += 1;
        let flags = AffineFlagTuple::random(n as usize, &mut rng);
        let Ok((_, jz)) = ctx.z_log_jacobian(&flags, tol.degenerate) else {
            report.resampled += 1;
            continue;
        };
        let svd = jz.clone().svd(true, true);
        let sv = &svd.singular_values;
        let gap = sv[r - 1] / sv[r].max(f64::MIN_POSITIVE);
        report.min_gap = report.min_gap.min(gap);
        if gap < tol.lagrangian_gap {
            report.failed.push(format!("sample {done}: singular-value gap {gap:.3e}"));
        }
        let u = svd.u.expect("svd with u");
        for i in 0..r {
            for j in i + 1..r {
                let ui = CVec::from_column_slice(u.column(i).as_slice());
                let uj = CVec::from_column_slice(u.column(j).as_slice());
                let om = ctx.omega_star(&ui, &uj).norm();
                report.max_isotropy = report.max_isotropy.max(om);
                if om > tol.isotropy {
                    report
                        .failed
                        .push(format!("sample {done}: isotropy residual {om:.3e} at ({i},{j})"));
                }
            }
        }
        done += 1;
    }
    if done < samples {
        report.failed.push(format!("only {done}/{samples} nondegenerate samples within budget"));
    }
    report
}

// ---------------------------------------------------------------------------
// Two-form proportionality on the hyperbolic locus
// ---------------------------------------------------------------------------

/// Result of comparing the dual form against the classical two-term shape
/// form along the hyperbolic locus.
#[derive(Clone, Debug, Serialize)]
pub struct NzReport {
    pub n: i64,
    pub cross_ratio: [f64; 2],
    pub step: f64,
    /// Measured ratio (real/imaginary parts) at the halved step.
    pub ratio: [f64; 2],
    pub target: f64,
    pub rel_err: f64,
    /// Ratio agreed between the step and the halved step.
    pub stable: bool,
    /// Hermitian normalization `ω(ξ̄, ξ)/2i` of the two-term form;
    /// positive exactly for positively oriented (upper-half-plane) shapes.
    pub hermitian: f64,
    pub failed: Vec<String>,
}

impl NzReport {
    pub fn pass(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn report(&self) -> CheckReport {
        CheckReport::new(
            "nz-proportionality",
            self.n,
            Status::from_bool(self.pass()),
            json!({
                "cross_ratio": self.cross_ratio,
                "step": self.step,
                "ratio": self.ratio,
                "target": self.target,
                "rel_err": self.rel_err,
                "stable": self.stable,
                "hermitian": self.hermitian,
                "failed": self.failed,
            }),
        )
    }
}

/// Tangent of the z-logarithm along the cross-ratio direction, by central
/// differences of `δz/z` (branch-free).
fn hyperbolic_tangent(
    ctx: &FlagContext,
    x: Complex64,
    h: f64,
    degenerate: f64,
) -> Result<CVec, FlagError> {
    let z0 = ctx.z_of_flags(&veronese_flags(x, ctx.n)?, degenerate)?.values;
    let zp = ctx.z_of_flags(&veronese_flags(x + c64(h, 0.0), ctx.n)?, degenerate)?.values;
    let zm = ctx.z_of_flags(&veronese_flags(x - c64(h, 0.0), ctx.n)?, degenerate)?.values;
    Ok(CVec::from_fn(z0.len(), |i, _| (zp[i] - zm[i]) / (2.0 * h * z0[i])))
}

/// Evaluates the dual form on `(ξ, ξ̄)` for the hyperbolic tangent at `x`
/// and the classical two-term form `ω(a, b) = u″(a)·u(b) − u(a)·u″(b)` on
/// the shape log-tangents `u = d log x`, `u″ = d log((x−1)/x)`.  Returns
/// `(Ω*(ξ,ξ̄)/ω(ξ,ξ̄), ω(ξ̄,ξ)/2i)` — the second value is the Hermitian
/// normalization of the two-term form, positive exactly for positively
/// oriented shapes.
fn nz_ratio_at(
    ctx: &FlagContext,
    x: Complex64,
    h: f64,
    degenerate: f64,
) -> Result<(Complex64, Complex64), FlagError> {
    let xi = hyperbolic_tangent(ctx, x, h, degenerate)?;
    let xibar = xi.map(|z| z.conj());
    let om_star = ctx.omega_star(&xi, &xibar);
    let u = ONE / x;
    let u2 = ONE / (x - ONE) - ONE / x;
    let omega = u2 * u.conj() - u * u2.conj();
    let hermitian = -omega / c64(0.0, 2.0);
    Ok((om_star / omega, hermitian))
}

/// Verifies that the dual form restricted to the hyperbolic locus is
/// `n(n²−1)/6` times the classical two-term shape form, and that the
/// classical form is positive on `(ξ, ξ̄)` in the upper half plane.
pub fn nz_factor_check(n: i64, cross_ratio: Complex64, step: f64, tol: &Tolerances) -> NzReport {
    let target = (n * (n * n - 1)) as f64 / 6.0;
    let mut report = NzReport {
        n,
        cross_ratio: [cross_ratio.re, cross_ratio.im],
        step,
        ratio: [f64::NAN, f64::NAN],
        target,
        rel_err: f64::NAN,
        stable: false,
        hermitian: f64::NAN,
        failed: Vec::new(),
    };
    if cross_ratio.im <= 0.0 {
        report.failed.push("cross-ratio must lie in the upper half plane".into());
        return report;
    }
    let ctx = FlagContext::new(n);
    let coarse = nz_ratio_at(&ctx, cross_ratio, step, tol.degenerate);
    let fine = nz_ratio_at(&ctx, cross_ratio, step / 2.0, tol.degenerate);
    match (coarse, fine) {
        (Ok((r1, _)), Ok((r2, hermitian))) => {
            report.ratio = [r2.re, r2.im];
            report.hermitian = hermitian.re;
            report.rel_err = (r2 - c64(target, 0.0)).norm() / target;
            report.stable = (r1 - r2).norm() <= tol.nz_ratio_rel * target;
            if !report.stable {
                report.failed.push(format!(
                    "ratio unstable under step halving: {:.6e} vs {:.6e}",
                    r1.norm(),
                    r2.norm()
                ));
            }
            if report.rel_err > tol.nz_ratio_rel {
                report.failed.push(format!(
                    "ratio {:.8} + {:.2e}i differs from {target} by {:.3e}",
                    r2.re, r2.im, report.rel_err
                ));
            }
            if report.hermitian <= 0.0 {
                report.failed.push(format!(
                    "two-term form not positive: hermitian normalization = {:.3e}",
                    report.hermitian
                ));
            }
        }
        (Err(e), _) | (_, Err(e)) => report.failed.push(format!("tangent evaluation failed: {e}")),
    }
    report
}

// ---------------------------------------------------------------------------
// Degree-2 gluing solver
// ---------------------------------------------------------------------------

/// One peripheral eigenvalue evaluation at a solution.
#[derive(Clone, Debug, Serialize)]
pub struct CompletenessEval {
    /// Vertex class of the torus link.
    pub link: usize,
    /// Index of the homology generator on that link.
    pub generator: usize,
    /// The evaluated eigenvalue (level 1), normalized by the
    /// standardization sign of its exponent row so that unipotent
    /// holonomy reads `1`.
    pub value: [f64; 2],
}

/// One deduplicated solution of the degree-2 gluing system.
#[derive(Clone, Debug, Serialize)]
pub struct Solution {
    /// Cross-ratio (shape) of each tetrahedron.
    pub shapes: Vec<[f64; 2]>,
    /// Largest multiplicative equation residual.
    pub residual: f64,
    /// Value of every z-coordinate, in global point order.
    pub z: Vec<[f64; 2]>,
    /// Sign branch (`0 → +1, 1 → −1`) frozen for each imposed peripheral
    /// row.
    pub peripheral_parity: Vec<i64>,
    /// Eigenvalue evaluations for every torus generator.
    pub completeness: Vec<CompletenessEval>,
    /// Every peripheral eigenvalue equals 1 — the structure is complete,
    /// not merely unipotent along the imposed generators.
    pub unipotent: bool,
}

impl Solution {
    /// Are all shapes in the upper half plane?
    pub fn positively_oriented(&self) -> bool {
        self.shapes.iter().all(|s| s[1] > 0.0)
    }
}

/// Outcome of the randomized Newton search on the degree-2 gluing system.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub seed: u64,
    pub starts: usize,
    pub converged: usize,
    /// Deduplicated solutions, sorted by shape coordinates.
    pub solutions: Vec<Solution>,
    /// Ids of the global points, aligning with `Solution::z`.
    pub variables: Vec<String>,
    pub diagnostics: Vec<String>,
}

impl SolveReport {
    /// The complete hyperbolic solution: all shapes in the upper half
    /// plane and all peripheral eigenvalues 1, provided it is unique.
    pub fn geometric(&self) -> Option<&Solution> {
        let mut it = self.solutions.iter().filter(|s| s.positively_oriented() && s.unipotent);
        match (it.next(), it.next()) {
            (Some(s), None) => Some(s),
            _ => None,
        }
    }

    /// Builds the JSON export value, with a point-id → `[re, im]` map per
    /// solution in place of the bare coordinate array.
    pub fn to_value(&self) -> serde_json::Value {
        let mut doc = serde_json::to_value(self).expect("serializable");
        let vars = self.variables.clone();
        if let Some(sols) = doc.get_mut("solutions").and_then(|v| v.as_array_mut()) {
            for sol in sols {
                let zarr: Vec<serde_json::Value> =
                    sol["z"].as_array().expect("z array").to_vec();
                let mut map = serde_json::Map::new();
                for (id, z) in vars.iter().zip(zarr) {
                    map.insert(id.clone(), z);
                }
                sol["z"] = serde_json::Value::Object(map);
            }
        }
        doc
    }

    /// Serializes [`SolveReport::to_value`] as a string.
    pub fn to_json(&self, pretty: bool) -> String {
        let doc = self.to_value();
        if pretty {
            serde_json::to_string_pretty(&doc).expect("serializable")
        } else {
            serde_json::to_string(&doc).expect("serializable")
        }
    }

    pub fn report(&self) -> CheckReport {
        let geo = self.geometric();
        let details = json!({
            "starts": self.starts,
            "converged": self.converged,
            "solutions": self.solutions.len(),
            "geometric_shapes": geo.map(|s| s.shapes.clone()),
            "geometric_residual": geo.map(|s| s.residual),
            "diagnostics": self.diagnostics,
        });
        CheckReport::new("gluing-solver", 2, Status::from_bool(geo.is_some()), details)
    }
}

/// The degree-2 gluing system of a closed complex with torus links: the
/// multiplicative face/edge equations in the per-tetrahedron cross-ratio
/// parametrization, together with the frozen-branch unipotency rows.
struct GluingSystem {
    ctx: FlagContext,
    per: Peripheral,
    edge_rows: Vec<(String, Vec<(usize, i64)>)>,
    /// Standardization sign (right-hand side) of each edge row.
    edge_signs: Vec<i64>,
    imposed_rows: Vec<Vec<(usize, i64)>>,
    /// Every peripheral eigenvalue to evaluate at solutions.
    eval_rows: Vec<EvalRow>,
    tets: usize,
}

/// One peripheral eigenvalue evaluation: the holonomy exponent row of one
/// homology generator on one carrier link, with its standardization sign.
struct EvalRow {
    carrier: usize,
    generator: usize,
    exponents: Vec<(usize, i64)>,
    sign: i64,
}

impl GluingSystem {
    fn new(tri: &Triangulation) -> Result<GluingSystem, FlagError> {
        if !tri.is_closed() {
            return Err(FlagError::Unsupported("the complex must be closed".into()));
        }
        let per = Peripheral::new(tri, 2, HConvention::SignedSymmetric)?;
        if per.carriers.is_empty() {
            return Err(FlagError::Unsupported("no torus links".into()));
        }
        for cpos in 0..per.carriers.len() {
            if per.carrier_link(cpos).kind != LinkKind::Torus {
                return Err(FlagError::Unsupported("non-torus carrier link".into()));
            }
        }
        let ctx = FlagContext::new(2);
        let eqs = per.complex.equations();
        let edge_rows: Vec<(String, Vec<(usize, i64)>)> =
            eqs.rows.iter().map(|r| (r.label.clone(), r.exponents.clone())).collect();
        let edge_signs: Vec<i64> =
            edge_rows.iter().map(|(_, row)| row_sign(&ctx.lat, row)).collect();
        let mut imposed_rows = Vec::new();
        let mut eval_rows = Vec::new();
        for cpos in 0..per.carriers.len() {
            let link = per.carrier_link(cpos);
            let gens = link.h_d.free_rank;
            for gen in 0..gens {
                let cyc = link.h_d.free_generator_cycle(gen);
                let w = per.hol_exponents(cpos, &cyc).expect("generator is a cycle");
                let sparse: Vec<(usize, i64)> = (0..w[0].rows())
                    .filter_map(|r| {
                        let e = w[0].get(r, 0).to_i64().expect("small exponent");
                        (e != 0).then_some((r, e))
                    })
                    .collect();
                if gen == 0 {
                    imposed_rows.push(sparse.clone());
                }
                let sign = row_sign(&ctx.lat, &sparse);
                eval_rows.push(EvalRow { carrier: cpos, generator: gen, exponents: sparse, sign });
            }
        }
        let tets = tri.tet_count();
        Ok(GluingSystem { ctx, per, edge_rows, edge_signs, imposed_rows, eval_rows, tets })
    }

    /// All z-coordinates for the given log-shapes, in global point order.
    fn z_global(&self, u: &[Complex64], degenerate: f64) -> Result<Vec<Complex64>, FlagError> {
        let per_t = self.ctx.lat.len();
        let mut z = vec![ONE; self.tets * per_t];
        for t in 0..self.tets {
            let flags = veronese_flags(u[t].exp(), 2)?;
            let zp = self.ctx.z_of_flags(&flags, degenerate)?;
            for i in 0..per_t {
                z[t * per_t + i] = zp.values[i];
            }
        }
        Ok(z)
    }

    /// Largest multiplicative residual over the edge rows (against their
    /// standardization sign) and the imposed rows (against their frozen
    /// sign branch).
    fn residual(&self, z: &[Complex64], parities: &[i64]) -> f64 {
        let mut worst: f64 = 0.0;
        for ((_, row), &s) in self.edge_rows.iter().zip(&self.edge_signs) {
            let target = if s < 0 { -ONE } else { ONE };
            worst = worst.max((eval_sparse(z, row) - target).norm());
        }
        for (row, &p) in self.imposed_rows.iter().zip(parities) {
            let target = if p % 2 == 0 { ONE } else { -ONE };
            worst = worst.max((eval_sparse(z, row) - target).norm());
        }
        worst
    }

    /// Log-residual vector with frozen branch integers.
    fn log_residuals(&self, z: &[Complex64], branches: &[i64]) -> CVec {
        let rows = self.edge_rows.len() + self.imposed_rows.len();
        let mut g = CVec::zeros(rows);
        for (r, (_, row)) in self.edge_rows.iter().enumerate() {
            let phase = if self.edge_signs[r] < 0 { PI } else { 0.0 };
            g[r] = log_sparse(z, row) - c64(0.0, phase + 2.0 * PI * branches[r] as f64);
        }
        for (k, row) in self.imposed_rows.iter().enumerate() {
            let r = self.edge_rows.len() + k;
            g[r] = log_sparse(z, row) - c64(0.0, PI * branches[r] as f64);
        }
        g
    }

    /// Branch integers making the log residuals purely real at `z`.
    fn freeze_branches(&self, z: &[Complex64]) -> Vec<i64> {
        let mut out = Vec::new();
        for ((_, row), &s) in self.edge_rows.iter().zip(&self.edge_signs) {
            let phase = if s < 0 { PI } else { 0.0 };
            out.push(((log_sparse(z, row).im - phase) / (2.0 * PI)).round() as i64);
        }
        for row in &self.imposed_rows {
            out.push((log_sparse(z, row).im / PI).round() as i64);
        }
        out
    }

    /// One Newton run from the given start; `None` when it fails to reach
    /// the residual target.
    fn newton(&self, start: &[Complex64], tol: &Tolerances) -> Option<Solution> {
        let mut u = start.to_vec();
        let z0 = self.z_global(&u, tol.degenerate).ok()?;
        let branches = self.freeze_branches(&z0);
        let parities: Vec<i64> =
            branches[self.edge_rows.len()..].iter().map(|b| b.rem_euclid(2)).collect();
        let h = 1e-6;
        let rows = self.edge_rows.len() + self.imposed_rows.len();
        for _ in 0..tol.newton_max_iter {
            let z = self.z_global(&u, tol.degenerate).ok()?;
            let res = self.residual(&z, &parities);
            if res < tol.newton_residual {
                return Some(self.package(&u, &z, res, &parities, tol.completeness));
            }
            let g = self.log_residuals(&z, &branches);
            let mut jac = CMat::zeros(rows, self.tets);
            for t in 0..self.tets {
                let mut up = u.clone();
                up[t] += c64(h, 0.0);
                let mut um = u.clone();
                um[t] -= c64(h, 0.0);
                let zp = self.z_global(&up, tol.degenerate).ok()?;
                let zm = self.z_global(&um, tol.degenerate).ok()?;
                let dlog: Vec<Complex64> =
                    (0..z.len()).map(|i| (zp[i] - zm[i]) / (2.0 * h * z[i])).collect();
                for (r, (_, row)) in self.edge_rows.iter().enumerate() {
                    jac[(r, t)] = row.iter().map(|&(i, e)| c64(e as f64, 0.0) * dlog[i]).sum();
                }
                for (k, row) in self.imposed_rows.iter().enumerate() {
                    jac[(self.edge_rows.len() + k, t)] =
                        row.iter().map(|&(i, e)| c64(e as f64, 0.0) * dlog[i]).sum();
                }
            }
            let delta = jac.svd(true, true).solve(&(-g), 1e-13).ok()?;
            let mut step_norm: f64 = 0.0;
            for t in 0..self.tets {
                step_norm = step_norm.max(delta[t].norm());
            }
            let scale = if step_norm > 1.0 { 1.0 / step_norm } else { 1.0 };
            for t in 0..self.tets {
                u[t] += delta[t] * c64(scale, 0.0);
                if u[t].norm() > 20.0 {
                    return None;
                }
            }
            if step_norm < 1e-15 {
                return None;
            }
        }
        None
    }

    fn package(
        &self,
        u: &[Complex64],
        z: &[Complex64],
        res: f64,
        parities: &[i64],
        completeness_tol: f64,
    ) -> Solution {
        let shapes: Vec<[f64; 2]> = u
            .iter()
            .map(|v| {
                let x = v.exp();
                [x.re, x.im]
            })
            .collect();
        let completeness: Vec<CompletenessEval> = self
            .eval_rows
            .iter()
            .map(|row| {
                let v = eval_sparse(z, &row.exponents) * c64(row.sign as f64, 0.0);
                CompletenessEval {
                    link: self.per.carrier_link(row.carrier).class_id,
                    generator: row.generator,
                    value: [v.re, v.im],
                }
            })
            .collect();
        let unipotent = completeness
            .iter()
            .all(|e| (c64(e.value[0], e.value[1]) - ONE).norm() <= completeness_tol);
        Solution {
            shapes,
            residual: res,
            z: z.iter().map(|v| [v.re, v.im]).collect(),
            peripheral_parity: parities.to_vec(),
            completeness,
            unipotent,
        }
    }
}

/// Solves the degree-2 gluing equations of a closed complex with torus
/// links by randomized Newton iteration in log-shape space.
///
/// The unknowns are per-tetrahedron cross-ratios; in this parametrization
/// the per-tetrahedron branch constraint (the product of all six
/// z-coordinates of one tetrahedron is 1, i.e. the squared triple-product
/// relation) holds identically, and logarithm branches enter only as one
/// frozen integer per equation row, chosen at each random start.  Each edge
/// row is solved against its standardization sign (see [`corner_sign`]),
/// which makes the system equivalent to the classical shape equations.  The
/// edge system alone cuts a positive-dimensional deformation variety
/// whenever torus links are present, so the system additionally imposes
/// unipotency (eigenvalue `±1`, branch frozen per start) of the *first*
/// peripheral generator of each torus link; the eigenvalues of the
/// remaining generators are evaluated afterwards and reported, not
/// imposed.
///
/// Converged runs are kept when the multiplicative residual drops below
/// `tol.newton_residual`; solutions are deduplicated by shape distance
/// `tol.dedupe` and sorted.  A unique solution with all shapes in the upper
/// half plane is reported as the geometric one.
pub fn solve_gluing_n2(
    tri: &Triangulation,
    seed: u64,
    tol: &Tolerances,
) -> Result<SolveReport, FlagError> {
    let sys = GluingSystem::new(tri)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut solutions: Vec<Solution> = Vec::new();
    let mut converged = 0;
    let mut diagnostics = Vec::new();
    for _ in 0..tol.newton_starts {
        let start: Vec<Complex64> = (0..sys.tets)
            .map(|_| {
                let re = rng.random::<f64>() * 4.0 - 1.5;
                let im = (rng.random::<f64>() * 1.85 + 0.15)
                    * if rng.random::<bool>() { 1.0 } else { -1.0 };
                c64(re, im).ln()
            })
            .collect();
        let Some(sol) = sys.newton(&start, tol) else { continue };
        converged += 1;
        let dup = solutions.iter().any(|s| {
            s.shapes
                .iter()
                .zip(&sol.shapes)
                .all(|(a, b)| (c64(a[0], a[1]) - c64(b[0], b[1])).norm() < tol.dedupe)
        });
        if !dup {
            solutions.push(sol);
        }
    }
    if converged == 0 {
        diagnostics.push("no Newton run reached the residual target".into());
    }
    solutions.sort_by(|a, b| {
        let ka: Vec<(i64, i64)> =
            a.shapes.iter().map(|s| ((s[0] * 1e9) as i64, (s[1] * 1e9) as i64)).collect();
        let kb: Vec<(i64, i64)> =
            b.shapes.iter().map(|s| ((s[0] * 1e9) as i64, (s[1] * 1e9) as i64)).collect();
        ka.cmp(&kb)
    });
    let variables = (0..sys.per.complex.point_count())
        .map(|i| sys.per.complex.point_id(i))
        .collect();
    Ok(SolveReport {
        seed,
        starts: tol.newton_starts,
        converged,
        solutions,
        variables,
        diagnostics,
    })
}

/// The multiplicative face/edge residual of an arbitrary shape assignment —
/// used to confirm that non-solutions are rejected.
pub fn gluing_residual_n2(
    tri: &Triangulation,
    shapes: &[Complex64],
    tol: &Tolerances,
) -> Result<f64, FlagError> {
    let sys = GluingSystem::new(tri)?;
    assert_eq!(shapes.len(), sys.tets);
    let u: Vec<Complex64> = shapes.iter().map(|x| x.ln()).collect();
    let z = sys.z_global(&u, tol.degenerate)?;
    let mut worst: f64 = 0.0;
    for ((_, row), &s) in sys.edge_rows.iter().zip(&sys.edge_signs) {
        let target = if s < 0 { -ONE } else { ONE };
        worst = worst.max((eval_sparse(&z, row) - target).norm());
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Holonomy shadow at a solution
// ---------------------------------------------------------------------------

/// Numeric confirmation that the linearized peripheral map matches actual
/// eigenvalue evaluation: at a z-assignment built from per-tetrahedron
/// hyperbolic flags, the face/edge equations hold and evaluating z on the
/// image of `h` equals the squared eigenvalue evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct ShadowReport {
    pub n: i64,
    pub shapes: Vec<[f64; 2]>,
    /// Largest multiplicative face/edge residual of the assignment.
    pub equation_residual: f64,
    /// Largest `|z∘h − (eigenvalue)²|` over generators and levels.
    pub max_shadow_err: f64,
    /// Eigenvalue evaluations `(link, generator, level, value)`, each
    /// normalized by the standardization sign of its exponent row.
    pub eigenvalues: Vec<(usize, usize, i64, [f64; 2])>,
    pub failed: Vec<String>,
}

impl ShadowReport {
    pub fn pass(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn report(&self) -> CheckReport {
        CheckReport::new(
            "holonomy-shadow",
            self.n,
            Status::from_bool(self.pass()),
            json!({
                "shapes": self.shapes,
                "equation_residual": self.equation_residual,
                "max_shadow_err": self.max_shadow_err,
                "failed": self.failed,
            }),
        )
    }
}

/// Builds the z-assignment of per-tetrahedron hyperbolic flags at the given
/// shapes and verifies the equation residuals and the holonomy shadow
/// `z∘h = (eigenvalue)²` on every carrier generator and level.
pub fn z_shadow_check(
    tri: &Triangulation,
    n: i64,
    shapes: &[Complex64],
    tol: &Tolerances,
) -> Result<ShadowReport, FlagError> {
    let per = Peripheral::new(tri, n, HConvention::SignedSymmetric)?;
    let ctx = FlagContext::new(n);
    assert_eq!(shapes.len(), tri.tet_count());
    let per_t = ctx.lat.len();
    let mut z = vec![ONE; per.complex.point_count()];
    for (t, &x) in shapes.iter().enumerate() {
        let zp = ctx.z_of_flags(&veronese_flags(x, n)?, tol.degenerate)?;
        for i in 0..per_t {
            z[t * per_t + i] = zp.values[i];
        }
    }
    let zv = CVec::from_vec(z.clone());
    let mut report = ShadowReport {
        n,
        shapes: shapes.iter().map(|x| [x.re, x.im]).collect(),
        equation_residual: 0.0,
        max_shadow_err: 0.0,
        eigenvalues: Vec::new(),
        failed: Vec::new(),
    };
    for row in &per.complex.equations().rows {
        let target = if row_sign(&ctx.lat, &row.exponents) < 0 { -ONE } else { ONE };
        let r = (eval_sparse(&z, &row.exponents) - target).norm();
        report.equation_residual = report.equation_residual.max(r);
    }
    if report.equation_residual > tol.solution_residual {
        report.failed.push(format!(
            "face/edge residual {:.3e} above {:.1e}",
            report.equation_residual, tol.solution_residual
        ));
    }
    let h = per.h_matrix();
    for cpos in 0..per.carriers.len() {
        let link = per.carrier_link(cpos);
        for gen in 0..link.h_d.free_rank {
            let cyc = link.h_d.free_generator_cycle(gen);
            let ws = per.hol_exponents(cpos, &cyc).expect("generator is a cycle");
            for m in 1..n {
                let w = &ws[(m - 1) as usize];
                let cm = eval_exponents(&zv, w);
                let corrected = cm * c64(row_sign_col(&ctx.lat, w) as f64, 0.0);
                report.eigenvalues.push((link.class_id, gen, m, [corrected.re, corrected.im]));
                let chain = per.embed(cpos, &cyc, m);
                let hcol = h.mul(&chain);
                let lhs = eval_exponents(&zv, &hcol);
                let err = (lhs - cm * cm).norm();
                report.max_shadow_err = report.max_shadow_err.max(err);
                if err > tol.z_shadow {
                    report.failed.push(format!(
                        "shadow mismatch {:.3e} on link {} generator {gen} level {m}",
                        err, link.class_id
                    ));
                }
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Local rigidity
// ---------------------------------------------------------------------------

/// Rank data of the peripheral-holonomy differential at the complete
/// hyperbolic point.
#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub n: i64,
    /// Number of torus links.
    pub ell: usize,
    pub shapes: Vec<[f64; 2]>,
    /// Largest face/edge residual of the flag assignment (reported, not
    /// asserted: lift obstructions show up here).
    pub equation_residual: f64,
    /// Dimension of (tangent of the flag locus product) ∩ ker(linearized
    /// equations).
    pub intersection_dim: usize,
    /// Directions of the intersection killed by the peripheral
    /// differential.
    pub trivial_dim: usize,
    /// Rank of the peripheral differential on the intersection.
    pub peripheral_rank: usize,
    pub expected_rank: usize,
    /// Smallest tangent-space singular-value gap over the tetrahedra.
    pub tangent_gap: f64,
    /// Gap ratio at the rank cut of the kernel computation.
    pub kernel_gap: f64,
    /// Gap ratio at the rank cut of the peripheral differential.
    pub rank_gap: f64,
    /// All gap ratios cleared the threshold; otherwise the verdict is
    /// inconclusive rather than a failure.
    pub conclusive: bool,
    /// Corrupting one equation row changed the computed dimensions.
    pub mutation_detected: bool,
    pub failed: Vec<String>,
}

impl RigidityReport {
    pub fn pass(&self) -> bool {
        self.conclusive && self.failed.is_empty()
    }

    pub fn status(&self) -> Status {
        if !self.conclusive {
            Status::Skipped
        } else {
            Status::from_bool(self.failed.is_empty())
        }
    }

    pub fn report(&self) -> CheckReport {
        CheckReport::new(
            "rigidity-rank",
            self.n,
            self.status(),
            json!({
                "ell": self.ell,
                "shapes": self.shapes,
                "equation_residual": self.equation_residual,
                "intersection_dim": self.intersection_dim,
                "trivial_dim": self.trivial_dim,
                "peripheral_rank": self.peripheral_rank,
                "expected_rank": self.expected_rank,
                "tangent_gap": self.tangent_gap,
                "kernel_gap": self.kernel_gap,
                "rank_gap": self.rank_gap,
                "conclusive": self.conclusive,
                "mutation_detected": self.mutation_detected,
                "failed": self.failed,
            }),
        )
    }
}

/// Kernel dimension, kernel basis and rank-cut gap of a complex matrix, by
/// singular value decomposition with an absolute zero threshold.  The
/// matrix is padded with zero rows when wide, so the returned basis spans
/// the full kernel.
fn kernel_with_gap(m: &CMat, zero: f64) -> (CMat, f64) {
    let padded = if m.nrows() < m.ncols() {
        let mut p = CMat::zeros(m.ncols(), m.ncols());
        p.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(true, true);
    let sv = &svd.singular_values;
    let rank = sv.iter().filter(|&&s| s >= zero).count();
    let gap = gap_at(sv.as_slice(), rank, zero);
    let vt = svd.v_t.expect("svd with v");
    let k = vt.nrows() - rank;
    let mut basis = CMat::zeros(m.ncols(), k);
    for (j, r) in (rank..vt.nrows()).enumerate() {
        for cc in 0..m.ncols() {
            basis[(cc, j)] = vt[(r, cc)].conj();
        }
    }
    (basis, gap)
}

/// Rank and rank-cut gap of a complex matrix.
fn rank_with_gap(m: &CMat, zero: f64) -> (usize, f64) {
    let svd = m.clone().svd(false, false);
    let sv = &svd.singular_values;
    let rank = sv.iter().filter(|&&s| s >= zero).count();
    (rank, gap_at(sv.as_slice(), rank, zero))
}

/// Ratio between the smallest retained and the largest discarded singular
/// value; when nothing is discarded, the floor plays the discarded role.
fn gap_at(sv: &[f64], rank: usize, zero: f64) -> f64 {
    if rank == 0 {
        return f64::INFINITY;
    }
    let kept = sv[rank - 1];
    let dropped = if rank < sv.len() { sv[rank].max(f64::MIN_POSITIVE) } else { zero };
    kept / dropped
}

struct RigidityScene {
    b: CMat,
    eq: CMat,
    pmat: CMat,
    tangent_gap: f64,
}

/// Assembles the tangent-space basis, equation matrix and peripheral rows
/// at per-tetrahedron hyperbolic flags with the given shapes.
fn rigidity_scene(
    per: &Peripheral,
    ctx: &FlagContext,
    shapes: &[Complex64],
    tol: &Tolerances,
) -> Result<(RigidityScene, Vec<Complex64>), FlagError> {
    let n = ctx.n;
    let r = ((n - 1) * (n - 1)) as usize;
    let tets = shapes.len();
    let per_t = ctx.lat.len();
    let total = per.complex.point_count();
    let mut b = CMat::zeros(total, tets * r);
    let mut z = vec![ONE; total];
    let mut tangent_gap = f64::INFINITY;
    for (t, &x) in shapes.iter().enumerate() {
        let flags = veronese_flags(x, n)?;
        let (a, jz) = ctx.z_log_jacobian(&flags, tol.degenerate)?;
        let zp = ctx.z_point(&a);
        for i in 0..per_t {
            z[t * per_t + i] = zp.values[i];
        }
        let svd = jz.svd(true, true);
        let sv = &svd.singular_values;
        tangent_gap = tangent_gap.min(sv[r - 1] / sv[r].max(f64::MIN_POSITIVE));
        let u = svd.u.expect("svd with u");
        for k in 0..r {
            for i in 0..per_t {
                b[(t * per_t + i, t * r + k)] = u[(i, k)];
            }
        }
    }
    let eqs = per.complex.equations();
    let mut eq = CMat::zeros(eqs.rows.len(), total);
    for (ri, row) in eqs.rows.iter().enumerate() {
        for &(i, e) in &row.exponents {
            eq[(ri, i)] += c64(e as f64, 0.0);
        }
    }
    let levels = (n - 1) as usize;
    let mut pmat = CMat::zeros(per.carriers.len() * levels, total);
    for cpos in 0..per.carriers.len() {
        let link = per.carrier_link(cpos);
        let cyc = link.h_d.free_generator_cycle(0);
        let ws = per.hol_exponents(cpos, &cyc).expect("generator is a cycle");
        for (mi, w) in ws.iter().enumerate() {
            for i in 0..total {
                let e = w.get(i, 0).to_i64().expect("small exponent");
                if e != 0 {
                    pmat[(cpos * levels + mi, i)] = c64(e as f64, 0.0);
                }
            }
        }
    }
    Ok((RigidityScene { b, eq, pmat, tangent_gap }, z))
}

fn intersection_ranks(scene: &RigidityScene, eq: &CMat, zero: f64) -> (usize, f64, usize, f64) {
    let m = eq * &scene.b;
    let (kernel, kernel_gap) = kernel_with_gap(&m, zero);
    let k = kernel.ncols();
    if k == 0 {
        return (0, kernel_gap, 0, f64::INFINITY);
    }
    let d = &scene.pmat * &scene.b * &kernel;
    let (rank, rank_gap) = rank_with_gap(&d, zero);
    (k, kernel_gap, rank, rank_gap)
}

/// Verifies local rigidity at the complete hyperbolic point: the tangent
/// space of the product of flag loci, intersected with the kernel of the
/// linearized face/edge system, maps under the peripheral differential
/// with rank `(n−1)·ℓ`; the kernel directions of that map are reported as
/// trivial.  Degrees 2 and 3 are supported — the degree-2 shapes come from
/// the solver and are reused, lifted through the symmetric-power embedding,
/// at degree 3.
///
/// Ill-conditioned rank cuts (gap below `tol.rigidity_gap`) make the
/// verdict inconclusive rather than failed.  A deliberately corrupted
/// equation row must change the computed dimensions; this mutation check is
/// part of the verdict.
pub fn rigidity_rank_check(
    tri: &Triangulation,
    n: i64,
    seed: u64,
    tol: &Tolerances,
) -> Result<RigidityReport, FlagError> {
    if !(n == 2 || n == 3) {
        return Err(FlagError::Unsupported(format!("rigidity check supports n = 2, 3; got {n}")));
    }
    let solve = solve_gluing_n2(tri, seed, tol)?;
    let Some(geo) = solve.geometric() else {
        return Ok(RigidityReport {
            n,
            ell: 0,
            shapes: Vec::new(),
            equation_residual: f64::NAN,
            intersection_dim: 0,
            trivial_dim: 0,
            peripheral_rank: 0,
            expected_rank: 0,
            tangent_gap: f64::NAN,
            kernel_gap: f64::NAN,
            rank_gap: f64::NAN,
            conclusive: true,
            mutation_detected: false,
            failed: vec!["no geometric solution found at degree 2".into()],
        });
    };
    let shapes: Vec<Complex64> = geo.shapes.iter().map(|s| c64(s[0], s[1])).collect();
    let per = Peripheral::new(tri, n, HConvention::SignedSymmetric)?;
    let ctx = FlagContext::new(n);
    let ell = per.carriers.len();
    let expected_rank = ((n - 1) as usize) * ell;
    let (scene, z) = rigidity_scene(&per, &ctx, &shapes, tol)?;
    let mut equation_residual: f64 = 0.0;
    for row in &per.complex.equations().rows {
        let target = if row_sign(&ctx.lat, &row.exponents) < 0 { -ONE } else { ONE };
        equation_residual = equation_residual.max((eval_sparse(&z, &row.exponents) - target).norm());
    }
    let (k, kernel_gap, rank, rank_gap) = intersection_ranks(&scene, &scene.eq, tol.svd_zero);
    // Mutation: corrupt one exponent of the first equation row and require
    // the computed dimensions to move.
    let mut eq_mut = scene.eq.clone();
    let cols = eq_mut.ncols();
    let target = (0..cols).find(|&i| eq_mut[(0, i)].norm() > 0.5).unwrap_or(0);
    eq_mut[(0, target)] += ONE;
    let (k_mut, _, rank_mut, _) = intersection_ranks(&scene, &eq_mut, tol.svd_zero);
    let mutation_detected = (k_mut, rank_mut) != (k, rank);

    let conclusive = scene.tangent_gap >= tol.rigidity_gap
        && kernel_gap >= tol.rigidity_gap
        && (rank_gap >= tol.rigidity_gap || rank == 0);
    let mut failed = Vec::new();
    if rank != expected_rank {
        failed.push(format!("peripheral rank {rank}, expected {expected_rank}"));
    }
    if k < expected_rank {
        failed.push(format!("intersection dimension {k} below expected rank {expected_rank}"));
    }
    if !mutation_detected {
        failed.push("corrupted equation row was not detected".into());
    }
    Ok(RigidityReport {
        n,
        ell,
        shapes: geo.shapes.clone(),
        equation_residual,
        intersection_dim: k,
        trivial_dim: k - rank,
        peripheral_rank: rank,
        expected_rank,
        tangent_gap: scene.tangent_gap,
        kernel_gap,
        rank_gap,
        conclusive,
        mutation_detected,
        failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> Triangulation {
        Triangulation::fixture(name).expect("fixture exists")
    }

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    /// λ-rescaling of the level-m multivector of flag i: scale generator
    /// column m−1 by λ and column m (when present) by 1/λ, so only `F(m)`
    /// changes.
    fn rescale_level(flags: &AffineFlagTuple, i: usize, m: usize, lambda: Complex64) -> AffineFlagTuple {
        let mut out = flags.clone();
        let n = flags.n;
        for r in 0..n {
            out.flags[i][(r, m - 1)] *= lambda;
            if m <= n - 2 {
                out.flags[i][(r, m)] /= lambda;
            }
        }
        out
    }

    #[test]
    fn edge_point_at_degree_two_is_a_plain_determinant() {
        let ctx = FlagContext::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let flags = AffineFlagTuple::random(2, &mut rng);
        let a = ctx.a_coordinates(&flags, tols().degenerate).unwrap();
        let idx = ctx.lat.index_of([1, 1, 0, 0]).unwrap();
        let m = CMat::from_columns(&[
            flags.flags[0].column(0).into_owned(),
            flags.flags[1].column(0).into_owned(),
        ]);
        assert!(rel_close(a[idx], m.determinant(), 1e-14));
    }

    #[test]
    fn level_rescaling_scales_exactly_the_plane_of_the_kernel_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4i64 {
            let ctx = FlagContext::new(n);
            let flags = AffineFlagTuple::random(n as usize, &mut rng);
            let a = ctx.a_coordinates(&flags, tols().degenerate).unwrap();
            let lambda = c64(0.7, 1.3);
            for i in 0..4 {
                for m in 1..n {
                    let scaled = rescale_level(&flags, i, m as usize, lambda);
                    let a2 = ctx.a_coordinates(&scaled, tols().degenerate).unwrap();
                    for (pi, &w) in ctx.lat.points.iter().enumerate() {
                        let expect = if w[i] == m { a[pi] * lambda } else { a[pi] };
                        assert!(
                            rel_close(a2[pi], expect, 1e-10),
                            "n={n} i={i} m={m} point {w:?}: {} vs {}",
                            a2[pi],
                            expect
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn standard_tuple_with_generic_fourth_flag_is_nonzero_at_degree_three() {
        let ctx = FlagContext::new(3);
        let e = |k: usize| {
            CVec::from_fn(3, |r, _| if r == k { ONE } else { c64(0.0, 0.0) })
        };
        let f0 = CMat::from_columns(&[e(0), e(1)]);
        let f1 = CMat::from_columns(&[e(2), e(1)]);
        let f2 = CMat::from_columns(&[
            CVec::from_vec(vec![ONE, ONE, ONE]),
            CVec::from_vec(vec![ONE, -ONE, c64(2.0, 0.0)]),
        ]);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let f3 = CMat::from_fn(3, 2, |_, _| c64(rng.random::<f64>() + 0.2, rng.random::<f64>()));
        let flags = AffineFlagTuple::new(3, [f0, f1, f2, f3]);
        let a = ctx.a_coordinates(&flags, tols().degenerate).unwrap();
        assert_eq!(a.len(), 16);
        assert!(a.iter().all(|v| v.norm() > 1e-8));
    }

    #[test]
    fn z_point_is_invariant_under_level_rescaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 2..=4i64 {
            let ctx = FlagContext::new(n);
            let flags = AffineFlagTuple::random(n as usize, &mut rng);
            let z = ctx.z_of_flags(&flags, tols().degenerate).unwrap();
            let i = rng.random_range(0..4usize);
            let m = rng.random_range(1..n);
            let scaled = rescale_level(&flags, i, m as usize, c64(-1.4, 0.8));
            let z2 = ctx.z_of_flags(&scaled, tols().degenerate).unwrap();
            for b in 0..z.values.len() {
                assert!(
                    rel_close(z2.values[b], z.values[b], tols().z_rescale * 1e2),
                    "n={n} point {b}"
                );
            }
            assert!(z.kernel_defect(&ctx.module.kernel) < 1e-10);
        }
    }

    #[test]
    fn z_point_is_invariant_under_the_diagonal_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for n in 2..=4i64 {
            let ctx = FlagContext::new(n);
            let flags = AffineFlagTuple::random(n as usize, &mut rng);
            let z = ctx.z_of_flags(&flags, tols().degenerate).unwrap();
            let g0 = CMat::from_fn(n as usize, n as usize, |_, _| {
                c64(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
            });
            let det = g0.determinant();
            let g = g0.map(|v| v / det.powf(1.0 / n as f64));
            let z2 = ctx
                .z_of_flags(&flags.transform(&g), tols().degenerate)
                .unwrap();
            for b in 0..z.values.len() {
                assert!(
                    rel_close(z2.values[b], z.values[b], tols().sl_invariance * 1e2),
                    "n={n} point {b}: {} vs {}",
                    z2.values[b],
                    z.values[b]
                );
            }
        }
    }

    #[test]
    fn degree_two_z_reproduces_the_cross_ratio_triple() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let ctx = FlagContext::new(2);
        for _ in 0..5 {
            let flags = AffineFlagTuple::random(2, &mut rng);
            let z = ctx.z_of_flags(&flags, tols().degenerate).unwrap();
            // Opposite edges carry equal coordinates.
            let value = |w: Weights| z.values[ctx.lat.index_of(w).unwrap()];
            let pairs = [
                ([1, 1, 0, 0], [0, 0, 1, 1]),
                ([1, 0, 1, 0], [0, 1, 0, 1]),
                ([1, 0, 0, 1], [0, 1, 1, 0]),
            ];
            for (wa, wb) in pairs {
                assert!(
                    rel_close(value(wa), value(wb), 1e-9),
                    "opposite edges differ: {:?} {:?}",
                    value(wa),
                    value(wb)
                );
            }
            // The squared triple product is 1.
            let triple = value([1, 1, 0, 0]) * value([1, 0, 1, 0]) * value([1, 0, 0, 1]);
            assert!((triple * triple - ONE).norm() < 1e-9, "triple {:?}", triple);
            // Oracle: the classical cross-ratio of the four underlying
            // points, in the convention that the standard positions
            // (∞, 0, 1, x) give r = x.  The coordinate at edge 01 is
            // exactly r, edge 03 carries (r−1)/r, and edge 02 carries the
            // classical 1/(1−r) twisted by the standardization sign.
            let det2 = |i: usize, j: usize| {
                flags.flags[i][(0, 0)] * flags.flags[j][(1, 0)]
                    - flags.flags[j][(0, 0)] * flags.flags[i][(1, 0)]
            };
            let r = (det2(0, 2) * det2(1, 3)) / (det2(0, 3) * det2(1, 2));
            assert!(rel_close(value([1, 1, 0, 0]), r, 1e-8), "edge 01: {} vs {r}", value([1, 1, 0, 0]));
            assert!(
                rel_close(value([1, 0, 0, 1]), (r - ONE) / r, 1e-8),
                "edge 03: {} vs {}",
                value([1, 0, 0, 1]),
                (r - ONE) / r
            );
            let s02 = c64(corner_sign([1, 0, 1, 0]) as f64, 0.0);
            assert_eq!(corner_sign([1, 0, 1, 0]), -1);
            assert_eq!(corner_sign([0, 1, 0, 1]), -1);
            assert_eq!(corner_sign([1, 1, 0, 0]), 1);
            assert!(
                rel_close(value([1, 0, 1, 0]), s02 / (ONE - r), 1e-8),
                "edge 02: {} vs {}",
                value([1, 0, 1, 0]),
                s02 / (ONE - r)
            );
        }
    }

    #[test]
    fn veronese_flags_at_degree_two_are_the_four_points() {
        let x = c64(0.3, 1.7);
        let flags = veronese_flags(x, 2).unwrap();
        let expect = [
            [ONE, c64(0.0, 0.0)],
            [c64(0.0, 0.0), ONE],
            [ONE, ONE],
            [x, ONE],
        ];
        for (flag, exp) in flags.flags.iter().zip(&expect) {
            assert_eq!(flag.ncols(), 1);
            for (r, e) in exp.iter().enumerate() {
                assert!((flag[(r, 0)] - e).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn veronese_flags_are_general_position_and_lift_independent() {
        let x = c64(0.0, 1.0);
        for n in 2..=4i64 {
            let ctx = FlagContext::new(n);
            let z = ctx
                .z_of_flags(&veronese_flags(x, n).unwrap(), tols().degenerate)
                .unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(41);
            let mut lift = || {
                [
                    c64(rng.random::<f64>() + 0.5, rng.random::<f64>()),
                    c64(rng.random::<f64>() + 0.5, -rng.random::<f64>()),
                    c64(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>()),
                ]
            };
            let lifts = [lift(), lift(), lift(), lift()];
            let z2 = ctx
                .z_of_flags(&veronese_flags_lifted(x, n, &lifts).unwrap(), tols().degenerate)
                .unwrap();
            for b in 0..z.values.len() {
                assert!(
                    rel_close(z2.values[b], z.values[b], tols().lift_independence * 1e2),
                    "n={n} point {b}: {} vs {}",
                    z2.values[b],
                    z.values[b]
                );
            }
        }
    }

    #[test]
    fn exact_jacobian_matches_finite_differences_at_second_order() {
        let ctx = FlagContext::new(3);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let flags = AffineFlagTuple::random(3, &mut rng);
        let (_, exact) = ctx.z_log_jacobian(&flags, tols().degenerate).unwrap();
        let err = |h: f64| {
            let fd = ctx.fd_z_log_jacobian(&flags, h, tols().degenerate).unwrap();
            (&fd - &exact).norm() / exact.norm()
        };
        let e1 = err(1e-4);
        let e2 = err(5e-5);
        assert!(e1 < 1e-3, "coarse relative error {e1}");
        assert!(e2 < 5e-4, "fine relative error {e2}");
        let order = (e1 / e2).log2();
        assert!(
            (1.6..2.4).contains(&order),
            "convergence order {order} (errors {e1:.3e}, {e2:.3e})"
        );
    }

    #[test]
    fn flag_locus_is_lagrangian_of_the_expected_rank() {
        for (n, samples) in [(2i64, 5usize), (3, 3), (4, 2)] {
            let rep = lagrangian_check(n, samples, 97, &tols());
            assert!(rep.pass(), "n={n}: {:?}", rep.failed);
            assert_eq!(rep.expected_rank, ((n - 1) * (n - 1)) as usize);
            assert!(rep.min_gap >= tols().lagrangian_gap);
            assert!(rep.max_isotropy <= tols().isotropy);
        }
    }

    #[test]
    fn two_form_ratio_follows_the_degree() {
        for (n, want) in [(2i64, 1.0), (3, 4.0), (4, 10.0)] {
            let rep = nz_factor_check(n, c64(0.35, 1.1), tols().nz_step, &tols());
            assert!(rep.pass(), "n={n}: {:?}", rep.failed);
            assert!((rep.ratio[0] - want).abs() <= 1e-4 * want, "n={n} ratio {:?}", rep.ratio);
            assert!(rep.hermitian > 0.0);
        }
    }

    #[test]
    fn lower_half_plane_cross_ratio_is_rejected() {
        let rep = nz_factor_check(2, c64(0.3, -1.0), tols().nz_step, &tols());
        assert!(!rep.pass());
    }

    fn geometric_shape() -> Complex64 {
        c64(0.5, 3f64.sqrt() / 2.0)
    }

    #[test]
    fn standardization_signs_sit_on_the_middle_edge_pair() {
        let ctx = FlagContext::new(2);
        // Exactly one opposite-edge pair carries the sign.
        let negatives: Vec<Weights> = ctx
            .lat
            .points
            .iter()
            .copied()
            .filter(|&w| corner_sign(w) < 0)
            .collect();
        assert_eq!(negatives, vec![[0, 1, 0, 1], [1, 0, 1, 0]]);
        // Odd degrees carry no signs at all.
        let ctx3 = FlagContext::new(3);
        assert!(ctx3.lat.points.iter().all(|&w| corner_sign(w) == 1));
    }

    #[test]
    fn solver_finds_the_complete_structure_on_the_two_tetrahedron_census_manifold() {
        let tri = fixture("fig8");
        let tol = tols();
        let rep = solve_gluing_n2(&tri, 7, &tol).unwrap();
        assert!(rep.converged > 0);
        let geo = rep.geometric().expect("unique complete solution");
        let want = geometric_shape();
        for s in &geo.shapes {
            assert!((c64(s[0], s[1]) - want).norm() < 1e-8, "shape {s:?}");
        }
        assert!(geo.residual < tol.newton_residual);
        assert_eq!(geo.completeness.len(), 2);
        for ev in &geo.completeness {
            let c = c64(ev.value[0], ev.value[1]);
            assert!((c - ONE).norm() < tol.completeness, "eigenvalue {c} on {ev:?}");
        }
        // The mirror (all shapes conjugated) is also on the variety.
        let mirror = geo.shapes.iter().map(|s| [s[0], -s[1]]).collect::<Vec<_>>();
        assert!(rep.solutions.iter().any(|s| {
            s.shapes
                .iter()
                .zip(&mirror)
                .all(|(a, b)| (c64(a[0], a[1]) - c64(b[0], b[1])).norm() < 1e-8)
        }));
    }

    #[test]
    fn solver_reports_are_deterministic_per_seed() {
        let tri = fixture("fig8");
        let tol = tols();
        let a = solve_gluing_n2(&tri, 41, &tol).unwrap().to_json(true);
        let b = solve_gluing_n2(&tri, 41, &tol).unwrap().to_json(true);
        assert_eq!(a, b);
    }

    #[test]
    fn random_shape_assignments_are_rejected() {
        let tri = fixture("fig8");
        let res =
            gluing_residual_n2(&tri, &[c64(2.0, 0.5), c64(0.3, 0.8)], &tols()).unwrap();
        assert!(res > 1e-2, "residual {res}");
    }

    #[test]
    fn solver_requires_a_closed_complex_with_torus_links() {
        assert!(matches!(
            solve_gluing_n2(&fixture("pglue"), 3, &tols()),
            Err(FlagError::Unsupported(_))
        ));
        assert!(matches!(
            solve_gluing_n2(&fixture("annulus"), 3, &tols()),
            Err(FlagError::Unsupported(_))
        ));
    }

    #[test]
    fn holonomy_shadow_holds_at_the_complete_structure() {
        let tri = fixture("fig8");
        let tol = tols();
        for n in 2..=3i64 {
            let shapes = vec![geometric_shape(); 2];
            let sh = z_shadow_check(&tri, n, &shapes, &tol).unwrap();
            assert!(sh.pass(), "n={n}: {:?}", sh.failed);
            assert!(sh.equation_residual < 1e-10, "n={n} eq {:?}", sh.equation_residual);
            assert!(sh.max_shadow_err < 1e-10, "n={n} shadow {:?}", sh.max_shadow_err);
            assert_eq!(sh.eigenvalues.len(), 2 * (n as usize - 1));
            for (_, _, _, v) in &sh.eigenvalues {
                assert!((c64(v[0], v[1]) - ONE).norm() < 1e-9, "eigenvalue {v:?}");
            }
        }
    }

    #[test]
    fn rigidity_ranks_match_the_cusp_count() {
        let tri = fixture("fig8");
        let tol = tols();
        for n in 2..=3i64 {
            let rr = rigidity_rank_check(&tri, n, 7, &tol).unwrap();
            assert!(rr.pass(), "n={n}: {:?} (conclusive {})", rr.failed, rr.conclusive);
            assert_eq!(rr.peripheral_rank, (n as usize - 1), "n={n}");
            assert_eq!(rr.expected_rank, (n as usize - 1));
            assert_eq!(rr.intersection_dim, (n as usize - 1));
            assert_eq!(rr.trivial_dim, 0);
            assert!(rr.equation_residual < 1e-10, "n={n} lift obstruction?");
            assert!(rr.mutation_detected);
        }
        assert!(matches!(
            rigidity_rank_check(&tri, 4, 7, &tol),
            Err(FlagError::Unsupported(_))
        ));
    }
}
