//! The degree-`n` point lattice on a single tetrahedron and its skew form.
//!
//! Subdividing each face of a tetrahedron by lines at integer barycentric
//! levels `1..n-1` produces a finite point set `I_T`: for each face, the
//! interior crossings (face points), and on each edge the `n-1` integer
//! points shared by the two adjacent faces (edge points). Points are encoded
//! as weight quadruples `(a0, a1, a2, a3)` with sum `n` and exactly one zero
//! (face point) or two zeros (edge point); the four vertices themselves are
//! excluded, so `|I_T| = 2(n² − 1)`.
//!
//! The lines of each face are oriented parallel to its edges, and consecutive
//! crossings along a line give directed edges between points. The signed
//! count of directed edges defines the integer skew form
//! `Ω²(e_α, e_β) = ε_αβ` on `Z^{I_T}`. Its kernel is spanned (rationally) by
//! the `4(n−1)` plane sums `v_i(m)` (all points of weight `m` at vertex `i`),
//! its rank is `2(n−1)²`, and the quotient `J = Z^{I_T}/ker` carries a
//! nondegenerate skew form `Ω` — the building block of the global symplectic
//! machinery. All arithmetic here is exact.

use crate::intmat::{IMat, Quotient};
use num_bigint::BigInt;
use std::collections::HashMap;

/// Ordered vertex triples of the four faces of the standard oriented
/// tetrahedron `(0,1,2,3)`; entry `f` is the face opposite vertex `f`, with
/// the boundary orientation induced by the tetrahedron.
pub const FACE_VERTICES: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];

/// The three displacement steps generating directed edges in an oriented
/// face `(i, j, k)`, in that face's barycentric coordinates `(a_i, a_j, a_k)`.
///
/// Each step moves between consecutive crossings of a line parallel to one
/// of the edges. The overall direction of travel (this set versus its
/// negation) fixes the global sign of every skew form in the crate; it is
/// pinned by two downstream identities with no sign freedom — the pairing
/// `Ω²(h(c_ij ⊗ v_m), h(c_ik ⊗ v_m')) = +2[v_m, v_m']` on peripheral chains
/// and the proportionality `Ω* = n(n²−1)/6 · ω` against the two-term shape
/// form (whose Hermitian normalization `ω(ξ̄,ξ)/2i` is positive at
/// upper-half-plane cross-ratios) — both asserted by tests.
pub const FACE_STEPS: [[i64; 3]; 3] = [[1, -1, 0], [0, 1, -1], [-1, 0, 1]];

/// Weight quadruple of a lattice point on one tetrahedron.
pub type Weights = [i64; 4];

/// Does the quadruple lie in `I_T` for the given `n`?
pub fn is_point(n: i64, w: Weights) -> bool {
    let sum: i64 = w.iter().sum();
    let zeros = w.iter().filter(|&&x| x == 0).count();
    sum == n && w.iter().all(|&x| x >= 0) && (zeros == 1 || zeros == 2)
}

/// All points of `I_T` in lexicographic order on the weight quadruple.
///
/// Count is `2(n² − 1)`: `4·(n−1)(n−2)/2` face points plus `6·(n−1)` edge
/// points. Panics if `n < 2`.
pub fn enumerate_points(n: i64) -> Vec<Weights> {
    assert!(n >= 2, "lattice needs n >= 2");
    let mut pts = Vec::new();
    for a0 in 0..=n {
        for a1 in 0..=n - a0 {
            for a2 in 0..=n - a0 - a1 {
                let a3 = n - a0 - a1 - a2;
                let w = [a0, a1, a2, a3];
                if is_point(n, w) {
                    pts.push(w);
                }
            }
        }
    }
    pts
}

/// The point lattice of one tetrahedron at degree `n`, with index lookup.
pub struct TetraLattice {
    pub n: i64,
    pub points: Vec<Weights>,
    index: HashMap<Weights, usize>,
}

impl TetraLattice {
    pub fn new(n: i64) -> Self {
        let points = enumerate_points(n);
        let index = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        TetraLattice { n, points, index }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, w: Weights) -> Option<usize> {
        self.index.get(&w).copied()
    }

    /// The skew form `ε` on `Z^{I_T}`, generated face by face.
    ///
    /// For each oriented face and each point of that face (edge points
    /// included), each of the three [`FACE_STEPS`] that lands on another
    /// point of the face contributes one directed edge. Directed edges along
    /// a tetrahedron edge are produced by both adjacent faces with opposite
    /// directions and cancel; everything else is interior to a single face.
    pub fn epsilon_matrix(&self) -> IMat {
        let nn = self.len();
        let mut e = IMat::zeros(nn, nn);
        let one = BigInt::from(1);
        let neg = BigInt::from(-1);
        for (f, fv) in FACE_VERTICES.iter().enumerate() {
            let &[i, j, k] = fv;
            for (pi, p) in self.points.iter().enumerate() {
                if p[f] != 0 {
                    continue; // not on this face
                }
                let bc = [p[i], p[j], p[k]];
                for d in FACE_STEPS {
                    let q = [bc[0] + d[0], bc[1] + d[1], bc[2] + d[2]];
                    if q.iter().any(|&x| x < 0 || x >= self.n) {
                        continue; // outside the face or a vertex
                    }
                    let mut qw = [0i64; 4];
                    qw[i] = q[0];
                    qw[j] = q[1];
                    qw[k] = q[2];
                    let qi = self.index_of(qw).expect("step lands on a lattice point");
                    // one directed edge p -> q
                    e.add_at(pi, qi, &one);
                    e.add_at(qi, pi, &neg);
                }
            }
        }
        e
    }

    /// The `4(n−1)` plane sums `v_i(m)` as matrix columns, ordered by
    /// `(i, m)` lexicographically (`i` the vertex, `m = 1..n-1`).
    ///
    /// `v_i(m)` is the sum of `e_α` over all points `α` with weight `a_i = m`;
    /// these span the kernel of the skew form over the rationals.
    pub fn kernel_vectors(&self) -> IMat {
        let mut cols = Vec::new();
        for i in 0..4 {
            for m in 1..self.n {
                let col: Vec<BigInt> = self
                    .points
                    .iter()
                    .map(|p| if p[i] == m { BigInt::from(1) } else { BigInt::from(0) })
                    .collect();
                cols.push(col);
            }
        }
        IMat::from_cols(self.len(), &cols)
    }
}

/// A based free module with an integer skew form and its exact derived data:
/// the kernel lattice, the quotient `J` (with projection and section), the
/// nondegenerate quotient form `Ω`, and the image lattice `J*` of
/// `p(v) = Ω²(·, v)` with its dual form `Ω*`.
pub struct SkewModule {
    /// The skew Gram matrix on the based module (`ε` in the tetra case).
    pub form: IMat,
    /// Basis of the saturated kernel lattice, as columns.
    pub kernel: IMat,
    /// Projection `π: Z^N -> J` (rows = quotient coordinates).
    pub proj: IMat,
    /// Section `σ: J -> Z^N` with `π σ = id`.
    pub sect: IMat,
    /// The quotient form `Ω = σᵀ ε σ`, nondegenerate of size `dim J`.
    pub omega: IMat,
    /// Basis of the image lattice `J* = p(Z^N) ⊂ Z^N`, as columns.
    pub image: IMat,
    pub dim: usize,
}

impl SkewModule {
    /// Build the derived data from a skew integer form.
    pub fn from_form(form: IMat) -> Self {
        assert_eq!(form.rows(), form.cols());
        assert!(form.add(&form.transpose()).is_zero(), "form must be skew");
        let n = form.rows();
        let kernel = form.kernel_basis();
        let q = Quotient::by_saturated(n, &kernel);
        let omega = q.lift.transpose().mul(&form).mul(&q.lift);
        let image = form.image_lattice_basis();
        SkewModule { form, kernel, proj: q.proj, sect: q.lift, omega, image, dim: q.dim }
    }

    /// Apply `p(v) = Ω²(·, v)`, i.e. multiply by the form matrix.
    pub fn p(&self, v: &IMat) -> IMat {
        self.form.mul(v)
    }

    /// The dual form `Ω*` on the image: `Ω*(p(u), p(u')) = Ω²(u, u')`,
    /// evaluated exactly. Both arguments must lie in the image lattice.
    pub fn omega_star(&self, v: &IMat, w: &IMat) -> BigInt {
        let u = self.form.solve(v).expect("argument must lie in the image lattice");
        u.transpose().mul(w).get(0, 0).clone()
    }
}

/// [`SkewModule`] for a single tetrahedron at degree `n`.
pub fn build_module(n: i64) -> (TetraLattice, SkewModule) {
    let lat = TetraLattice::new(n);
    let eps = lat.epsilon_matrix();
    let module = SkewModule::from_form(eps);
    (lat, module)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn point_counts_match_closed_form() {
        for n in 2..=6 {
            let pts = enumerate_points(n);
            assert_eq!(pts.len() as i64, 2 * (n * n - 1), "n={n}");
            // lexicographic order
            let mut sorted = pts.clone();
            sorted.sort();
            assert_eq!(pts, sorted);
        }
    }

    #[test]
    fn n2_points_are_the_six_edge_midpoints() {
        let pts = enumerate_points(2);
        assert_eq!(pts.len(), 6);
        assert!(pts.iter().all(|p| p.iter().filter(|&&x| x == 1).count() == 2));
    }

    #[test]
    fn epsilon_is_skew_with_small_entries() {
        for n in 2..=5 {
            let lat = TetraLattice::new(n);
            let e = lat.epsilon_matrix();
            assert!(e.add(&e.transpose()).is_zero(), "skew, n={n}");
            for i in 0..e.rows() {
                for j in 0..e.cols() {
                    let v = i64::try_from(e.get(i, j)).unwrap();
                    assert!(v.abs() <= 2, "entry bound, n={n}");
                }
            }
        }
    }

    #[test]
    fn epsilon_rank_is_twice_square() {
        for n in 2..=5 {
            let lat = TetraLattice::new(n);
            assert_eq!(lat.epsilon_matrix().rank() as i64, 2 * (n - 1) * (n - 1), "n={n}");
        }
    }

    #[test]
    fn plane_sums_span_the_kernel_rationally() {
        for n in 2..=5 {
            let lat = TetraLattice::new(n);
            let e = lat.epsilon_matrix();
            let v = lat.kernel_vectors();
            assert_eq!(v.cols() as i64, 4 * (n - 1));
            assert!(e.mul(&v).is_zero(), "v_i(m) lie in the kernel, n={n}");
            // same rational span as the saturated kernel: ranks agree
            assert_eq!(v.rank(), e.kernel_basis().cols(), "v_i(m) span the kernel, n={n}");
        }
    }

    #[test]
    fn n2_kernel_vectors_are_vertex_stars() {
        let lat = TetraLattice::new(2);
        let v = lat.kernel_vectors();
        // v_0(1) = sum of the 3 edge points containing vertex 0
        for (idx, p) in lat.points.iter().enumerate() {
            let expect = if p[0] == 1 { 1 } else { 0 };
            assert_eq!(i64::try_from(v.get(idx, 0)).unwrap(), expect);
        }
    }

    #[test]
    fn module_dimensions_and_nondegeneracy() {
        for n in 2..=4 {
            let (_, m) = build_module(n);
            let d = (2 * (n - 1) * (n - 1)) as usize;
            assert_eq!(m.dim, d, "dim J, n={n}");
            assert_eq!(m.image.cols(), d, "dim J*, n={n}");
            assert_eq!(m.omega.rank(), d, "Ω nondegenerate, n={n}");
        }
    }

    #[test]
    fn quotient_form_is_independent_of_kernel_perturbation() {
        let (lat, m) = build_module(3);
        // Ω²(u, u') is unchanged when u is shifted by kernel vectors.
        let u = IMat::col_from(&(0..lat.len() as i64).map(|i| (i % 5) - 2).collect::<Vec<_>>());
        let w = IMat::col_from(&(0..lat.len() as i64).map(|i| (i % 3) - 1).collect::<Vec<_>>());
        let shift = m.kernel.mul(&IMat::col_from(&vec![3; m.kernel.cols()]));
        let lhs = u.transpose().mul(&m.form).mul(&w);
        let rhs = u.add(&shift).transpose().mul(&m.form).mul(&w);
        assert_eq!(lhs, rhs);
    }

    proptest! {
        #[test]
        fn omega_star_matches_duality(
            n in 2i64..4,
            seed in proptest::collection::vec(-3i64..4, 32)
        ) {
            let (lat, m) = build_module(n);
            let len = lat.len();
            let mk = |off: usize| {
                IMat::col_from(&(0..len).map(|i| seed[(i + off) % seed.len()]).collect::<Vec<_>>())
            };
            let (u, w) = (mk(0), mk(7));
            let (pu, pw) = (m.p(&u), m.p(&w));
            let direct = u.transpose().mul(&m.form).mul(&w).get(0, 0).clone();
            prop_assert_eq!(m.omega_star(&pu, &pw), direct);
        }
    }
}
