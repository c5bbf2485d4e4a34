//! Homology of a two-term integer chain complex
//! `C₂ --∂₂--> C₁ --∂₁--> C₀`, computed exactly via Smith normal form.
//!
//! Cycles are the (saturated) kernel lattice of `∂₁`; boundaries are the
//! image lattice of `∂₂` expressed in kernel coordinates; the quotient is
//! read off the Smith form of that coordinate matrix, which also yields
//! representative cycles for the free generators.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::intmat::IMat;

/// `H₁` of a two-term complex, with exact class arithmetic.
pub struct Homology {
    /// Columns: basis of the cycle lattice `ker ∂₁`.
    cycles: IMat,
    /// Row transform of the Smith form of boundaries-in-cycle-coordinates.
    u: IMat,
    uinv: IMat,
    diag: Vec<BigInt>,
    rank: usize,
    /// Rank of the free part of `H₁`.
    pub free_rank: usize,
    /// Torsion divisors `> 1`, each dividing the next.
    pub torsion: Vec<BigInt>,
}

/// A homology class in normalized coordinates: free coordinates plus one
/// residue per torsion divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HClass {
    pub free: Vec<BigInt>,
    /// `(modulus, residue)` pairs with `0 <= residue < modulus`.
    pub torsion: Vec<(BigInt, BigInt)>,
}

impl HClass {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|x| x.is_zero()) && self.torsion.iter().all(|(_, r)| r.is_zero())
    }

    pub fn scale(&self, k: i64) -> HClass {
        let k = BigInt::from(k);
        HClass {
            free: self.free.iter().map(|x| x * &k).collect(),
            torsion: self
                .torsion
                .iter()
                .map(|(m, r)| (m.clone(), (((r * &k) % m) + m) % m))
                .collect(),
        }
    }

    pub fn add(&self, other: &HClass) -> HClass {
        assert_eq!(self.free.len(), other.free.len());
        assert_eq!(self.torsion.len(), other.torsion.len());
        HClass {
            free: self
                .free
                .iter()
                .zip(&other.free)
                .map(|(a, b)| a + b)
                .collect(),
            torsion: self
                .torsion
                .iter()
                .zip(&other.torsion)
                .map(|((m, a), (_, b))| (m.clone(), ((a + b) % m + m) % m))
                .collect(),
        }
    }
}

impl Homology {
    /// Computes `H₁ = ker ∂₁ / im ∂₂`.  Panics unless `∂₁ ∘ ∂₂ = 0`.
    pub fn new(d1: &IMat, d2: &IMat) -> Homology {
        assert_eq!(d1.cols(), d2.rows(), "chain group dimensions must agree");
        assert!(d1.mul(d2).is_zero(), "∂₁ ∘ ∂₂ must vanish");
        let cycles = d1.kernel_basis();
        let k = cycles.cols();
        let mut coords = IMat::zeros(k, d2.cols());
        for c in 0..d2.cols() {
            let x = cycles
                .solve(&d2.col(c))
                .expect("every boundary is an integer cycle");
            for r in 0..k {
                coords.set(r, c, x.get(r, 0).clone());
            }
        }
        let s = coords.smith();
        let free_rank = k - s.rank;
        let torsion: Vec<BigInt> = s
            .diag
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect();
        Homology {
            cycles,
            u: s.u,
            uinv: s.uinv,
            diag: s.diag,
            rank: s.rank,
            free_rank,
            torsion,
        }
    }

    /// The normalized class of an integer cycle (a column vector in `C₁`).
    /// Panics if the vector is not a cycle.
    pub fn class_of(&self, z: &IMat) -> HClass {
        let x = self
            .cycles
            .solve(z)
            .expect("class_of requires an integer cycle");
        let y = self.u.mul(&x);
        let mut free = Vec::with_capacity(self.free_rank);
        let mut torsion = Vec::new();
        for i in 0..self.cycles.cols() {
            if i < self.rank {
                let m = &self.diag[i];
                if !m.is_one() {
                    let r = ((y.get(i, 0) % m) + m) % m;
                    torsion.push((m.clone(), r));
                }
            } else {
                free.push(y.get(i, 0).clone());
            }
        }
        HClass { free, torsion }
    }

    pub fn is_boundary(&self, z: &IMat) -> bool {
        self.class_of(z).is_zero()
    }

    /// A representative cycle for the `i`-th free generator, as a column in
    /// `C₁`.
    pub fn free_generator_cycle(&self, i: usize) -> IMat {
        assert!(i < self.free_rank);
        self.cycles.mul(&self.uinv.col(self.rank + i))
    }

    pub fn zero_class(&self) -> HClass {
        HClass {
            free: vec![BigInt::zero(); self.free_rank],
            torsion: self
                .torsion
                .iter()
                .map(|m| (m.clone(), BigInt::zero()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_homology() {
        // One vertex, one loop edge, no faces: H₁ = Z.
        let d1 = IMat::zeros(1, 1);
        let d2 = IMat::zeros(1, 0);
        let h = Homology::new(&d1, &d2);
        assert_eq!(h.free_rank, 1);
        assert!(h.torsion.is_empty());
        let z = IMat::col_from(&[3]);
        let c = h.class_of(&z);
        assert_eq!(c, h.class_of(&z));
        assert_eq!(c.scale(2), h.class_of(&IMat::col_from(&[6])));
        let g = h.free_generator_cycle(0);
        let cg = h.class_of(&g);
        assert!(!cg.is_zero());
    }

    #[test]
    fn torsion_quotient() {
        // Two loop edges at a vertex; faces glue 2x and 3y.
        let d1 = IMat::zeros(1, 2);
        let d2 = IMat::from_rows(&[vec![2, 0], vec![0, 3]]);
        let h = Homology::new(&d1, &d2);
        assert_eq!(h.free_rank, 0);
        // Z/2 ⊕ Z/3 ≅ Z/6 in Smith form.
        assert_eq!(h.torsion, vec![BigInt::from(6)]);
        let x = IMat::col_from(&[1, 0]);
        assert!(!h.class_of(&x).is_zero());
        assert!(h.class_of(&x.scale(2)).is_zero());
        let y = IMat::col_from(&[0, 1]);
        assert!(h.class_of(&y.scale(3)).is_zero());
        assert!(!h.class_of(&y.scale(2)).is_zero());
        assert!(h.is_boundary(&IMat::col_from(&[2, 3])));
    }

    #[test]
    fn free_generators_are_independent() {
        // Figure-eight graph: one vertex, two loops, no relations.
        let d1 = IMat::zeros(1, 2);
        let d2 = IMat::zeros(2, 0);
        let h = Homology::new(&d1, &d2);
        assert_eq!(h.free_rank, 2);
        let g0 = h.class_of(&h.free_generator_cycle(0));
        let g1 = h.class_of(&h.free_generator_cycle(1));
        assert_ne!(g0, g1);
        assert!(!g0.is_zero());
        // Classes form a group.
        assert_eq!(g0.add(&g1), h.class_of(&h.free_generator_cycle(0).add(&h.free_generator_cycle(1))));
    }

    #[test]
    #[should_panic(expected = "∂₁ ∘ ∂₂")]
    fn rejects_non_complex() {
        let d1 = IMat::from_rows(&[vec![1]]);
        let d2 = IMat::from_rows(&[vec![1]]);
        Homology::new(&d1, &d2);
    }
}
