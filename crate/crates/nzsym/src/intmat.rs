//! Exact integer linear algebra.
//!
//! Everything structural in this crate (kernels, images, quotient lattices,
//! saturations, lattice equality) is decided over the integers, never in
//! floating point. The workhorse is a Smith normal form with tracked
//! unimodular transforms `U A V = D`, from which the derived operations
//! follow:
//!
//! * [`IMat::kernel_basis`] — basis of the *saturated* kernel lattice,
//! * [`IMat::image_lattice_basis`] / [`IMat::image_saturation_basis`],
//! * [`IMat::solve`] — integer solutions of `A x = b`,
//! * [`IMat::in_span_q`] / [`IMat::in_lattice`] — membership tests over the
//!   rationals resp. over the integers,
//! * [`Quotient`] — projection/section pair for `Z^n / K` with `K` saturated.
//!
//! Entries are arbitrary-precision integers so intermediate growth during
//! elimination can never overflow; matrices in this crate stay small
//! (dimension a few hundred), so this costs little.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, row major, with arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq)]
pub struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl std::fmt::Debug for IMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IMat {
    /// Zero matrix of the given shape (either dimension may be zero).
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Build from rows of machine integers.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    /// Build from a list of column vectors (each of length `rows`).
    pub fn from_cols(rows: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = IMat::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Column vector from machine integers.
    pub fn col_from(entries: &[i64]) -> Self {
        IMat::from_rows(&entries.iter().map(|&x| vec![x]).collect::<Vec<_>>())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    /// Add `x` to entry `(i, j)`.
    pub fn add_at(&mut self, i: usize, j: usize, x: &BigInt) {
        let v = self.get(i, j) + x;
        self.set(i, j, v);
    }

    /// Add a machine integer to entry `(i, j)`.
    pub fn add_i64(&mut self, i: usize, j: usize, x: i64) {
        self.add_at(i, j, &BigInt::from(x));
    }

    pub fn transpose(&self) -> IMat {
        let mut t = IMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut out = IMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_at(i, j, &(a * b));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IMat) -> IMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.add_at(i, j, other.get(i, j));
            }
        }
        out
    }

    pub fn sub(&self, other: &IMat) -> IMat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> IMat {
        let mut out = self.clone();
        for x in &mut out.data {
            *x = -std::mem::take(x);
        }
        out
    }

    pub fn scale(&self, c: i64) -> IMat {
        let c = BigInt::from(c);
        let mut out = self.clone();
        for x in &mut out.data {
            *x = &*x * &c;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IMat) -> IMat {
        assert_eq!(self.rows, other.rows);
        let mut out = IMat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vstack(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.cols);
        let mut out = IMat::zeros(self.rows + other.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..self.cols {
                out.set(self.rows + i, j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Copy of column `j` as an `rows x 1` matrix.
    pub fn col(&self, j: usize) -> IMat {
        let mut out = IMat::zeros(self.rows, 1);
        for i in 0..self.rows {
            out.set(i, 0, self.get(i, j).clone());
        }
        out
    }

    /// Submatrix formed by the column range `lo..hi`.
    pub fn col_range(&self, lo: usize, hi: usize) -> IMat {
        assert!(lo <= hi && hi <= self.cols);
        let mut out = IMat::zeros(self.rows, hi - lo);
        for i in 0..self.rows {
            for j in lo..hi {
                out.set(i, j - lo, self.get(i, j).clone());
            }
        }
        out
    }

    /// Submatrix formed by the row range `lo..hi`.
    pub fn row_range(&self, lo: usize, hi: usize) -> IMat {
        assert!(lo <= hi && hi <= self.rows);
        let mut out = IMat::zeros(hi - lo, self.cols);
        for i in lo..hi {
            for j in 0..self.cols {
                out.set(i - lo, j, self.get(i, j).clone());
            }
        }
        out
    }

    /// Entries as `i64`, or `None` if any entry overflows.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                row.push(i64::try_from(self.get(i, j)).ok()?);
            }
            out.push(row);
        }
        Some(out)
    }

    /// Entries as `f64` (exact for small integers; used only for numerics).
    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_f64().unwrap()).collect())
            .collect()
    }

    /// Smith normal form with tracked transforms.
    pub fn smith(&self) -> Smith {
        Smith::of(self)
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        self.smith().rank
    }

    /// Basis of the kernel lattice `{x : A x = 0}` as matrix columns.
    ///
    /// The kernel of an integer matrix is automatically saturated, so these
    /// columns are a lattice basis of the full rational kernel intersected
    /// with `Z^n`.
    pub fn kernel_basis(&self) -> IMat {
        let s = self.smith();
        s.v.col_range(s.rank, self.cols)
    }

    /// Basis of the image lattice `A Z^n` as matrix columns.
    pub fn image_lattice_basis(&self) -> IMat {
        let s = self.smith();
        let mut cols = Vec::with_capacity(s.rank);
        for i in 0..s.rank {
            let c = s.uinv.col(i);
            cols.push((0..self.rows).map(|r| c.get(r, 0) * &s.diag[i]).collect());
        }
        IMat::from_cols(self.rows, &cols)
    }

    /// Basis of the saturation of the image: `(A Q^n) ∩ Z^m`.
    pub fn image_saturation_basis(&self) -> IMat {
        let s = self.smith();
        s.uinv.col_range(0, s.rank)
    }

    /// An integer solution of `A x = b` (`b` a column), if one exists.
    pub fn solve(&self, b: &IMat) -> Option<IMat> {
        assert_eq!(b.rows, self.rows);
        assert_eq!(b.cols, 1);
        let s = self.smith();
        let c = s.u.mul(b);
        let mut y = IMat::zeros(self.cols, 1);
        for i in 0..self.rows.min(self.cols) {
            let ci = c.get(i, 0);
            if i < s.rank {
                let q = ci / &s.diag[i];
                if (ci - &q * &s.diag[i]).is_zero() {
                    y.set(i, 0, q);
                } else {
                    return None;
                }
            } else if !ci.is_zero() {
                return None;
            }
        }
        for i in self.cols.min(self.rows)..self.rows {
            if !c.get(i, 0).is_zero() {
                return None;
            }
        }
        Some(s.v.mul(&y))
    }

    /// Does `b` (a column) lie in the rational column span of `self`?
    pub fn in_span_q(&self, b: &IMat) -> bool {
        self.hstack(b).rank() == self.rank()
    }

    /// Does `b` (a column) lie in the integer column span of `self`?
    pub fn in_lattice(&self, b: &IMat) -> bool {
        self.solve(b).is_some()
    }

    /// Do the columns of `self` and `other` generate the same lattice?
    pub fn lattice_equal(&self, other: &IMat) -> bool {
        assert_eq!(self.rows, other.rows);
        (0..other.cols).all(|j| self.in_lattice(&other.col(j)))
            && (0..self.cols).all(|j| other.in_lattice(&self.col(j)))
    }
}

/// Smith normal form `U A V = D` with `U`, `V` unimodular and `D` diagonal
/// with each diagonal entry positive and dividing the next.
pub struct Smith {
    pub u: IMat,
    pub uinv: IMat,
    pub v: IMat,
    pub vinv: IMat,
    /// Nonzero diagonal entries `d_0 | d_1 | ...` (length = rank).
    pub diag: Vec<BigInt>,
    pub rank: usize,
    /// `D` as a full matrix of the original shape.
    pub d: IMat,
}

impl Smith {
    fn of(a: &IMat) -> Smith {
        let mut m = a.clone();
        let (rows, cols) = (m.rows, m.cols);
        let mut u = IMat::identity(rows);
        let mut uinv = IMat::identity(rows);
        let mut v = IMat::identity(cols);
        let mut vinv = IMat::identity(cols);

        // Elementary operations, mirrored onto the transforms so that
        // `u * a * v = m` stays invariant.
        fn row_swap(m: &mut IMat, u: &mut IMat, uinv: &mut IMat, i: usize, j: usize) {
            if i == j {
                return;
            }
            for c in 0..m.cols {
                let (x, y) = (m.get(i, c).clone(), m.get(j, c).clone());
                m.set(i, c, y);
                m.set(j, c, x);
            }
            for c in 0..u.cols {
                let (x, y) = (u.get(i, c).clone(), u.get(j, c).clone());
                u.set(i, c, y);
                u.set(j, c, x);
            }
            for r in 0..uinv.rows {
                let (x, y) = (uinv.get(r, i).clone(), uinv.get(r, j).clone());
                uinv.set(r, i, y);
                uinv.set(r, j, x);
            }
        }
        fn col_swap(m: &mut IMat, v: &mut IMat, vinv: &mut IMat, i: usize, j: usize) {
            if i == j {
                return;
            }
            for r in 0..m.rows {
                let (x, y) = (m.get(r, i).clone(), m.get(r, j).clone());
                m.set(r, i, y);
                m.set(r, j, x);
            }
            for r in 0..v.rows {
                let (x, y) = (v.get(r, i).clone(), v.get(r, j).clone());
                v.set(r, i, y);
                v.set(r, j, x);
            }
            for c in 0..vinv.cols {
                let (x, y) = (vinv.get(i, c).clone(), vinv.get(j, c).clone());
                vinv.set(i, c, y);
                vinv.set(j, c, x);
            }
        }
        // row i += q * row j
        fn row_addmul(m: &mut IMat, u: &mut IMat, uinv: &mut IMat, i: usize, j: usize, q: &BigInt) {
            if q.is_zero() {
                return;
            }
            for c in 0..m.cols {
                let x = m.get(i, c) + q * m.get(j, c);
                m.set(i, c, x);
            }
            for c in 0..u.cols {
                let x = u.get(i, c) + q * u.get(j, c);
                u.set(i, c, x);
            }
            for r in 0..uinv.rows {
                let x = uinv.get(r, j) - q * uinv.get(r, i);
                uinv.set(r, j, x);
            }
        }
        // col i += q * col j
        fn col_addmul(m: &mut IMat, v: &mut IMat, vinv: &mut IMat, i: usize, j: usize, q: &BigInt) {
            if q.is_zero() {
                return;
            }
            for r in 0..m.rows {
                let x = m.get(r, i) + q * m.get(r, j);
                m.set(r, i, x);
            }
            for r in 0..v.rows {
                let x = v.get(r, i) + q * v.get(r, j);
                v.set(r, i, x);
            }
            for c in 0..vinv.cols {
                let x = vinv.get(j, c) - q * vinv.get(i, c);
                vinv.set(j, c, x);
            }
        }
        fn row_negate(m: &mut IMat, u: &mut IMat, uinv: &mut IMat, i: usize) {
            for c in 0..m.cols {
                let x = -m.get(i, c).clone();
                m.set(i, c, x);
            }
            for c in 0..u.cols {
                let x = -u.get(i, c).clone();
                u.set(i, c, x);
            }
            for r in 0..uinv.rows {
                let x = -uinv.get(r, i).clone();
                uinv.set(r, i, x);
            }
        }

        let n = rows.min(cols);
        for t in 0..n {
            'reduce: loop {
                // Minimal-absolute-value pivot in the trailing submatrix.
                let mut pivot: Option<(usize, usize)> = None;
                for i in t..rows {
                    for j in t..cols {
                        if !m.get(i, j).is_zero()
                            && pivot.is_none_or(|(pi, pj)| m.get(i, j).abs() < m.get(pi, pj).abs())
                        {
                            pivot = Some((i, j));
                        }
                    }
                }
                let Some((pi, pj)) = pivot else { break 'reduce };
                row_swap(&mut m, &mut u, &mut uinv, t, pi);
                col_swap(&mut m, &mut v, &mut vinv, t, pj);

                // Clear below and to the right of the pivot; a nonzero
                // remainder yields a strictly smaller pivot next round.
                let mut clean = true;
                for i in t + 1..rows {
                    if !m.get(i, t).is_zero() {
                        let q = -(m.get(i, t) / m.get(t, t));
                        row_addmul(&mut m, &mut u, &mut uinv, i, t, &q);
                        if !m.get(i, t).is_zero() {
                            clean = false;
                        }
                    }
                }
                if !clean {
                    continue 'reduce;
                }
                for j in t + 1..cols {
                    if !m.get(t, j).is_zero() {
                        let q = -(m.get(t, j) / m.get(t, t));
                        col_addmul(&mut m, &mut v, &mut vinv, j, t, &q);
                        if !m.get(t, j).is_zero() {
                            clean = false;
                        }
                    }
                }
                if !clean {
                    continue 'reduce;
                }

                // Enforce divisibility of the trailing submatrix by the pivot.
                let mut offender = None;
                'find: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if !(m.get(i, j) % m.get(t, t)).is_zero() {
                            offender = Some(i);
                            break 'find;
                        }
                    }
                }
                match offender {
                    Some(i) => {
                        row_addmul(&mut m, &mut u, &mut uinv, t, i, &BigInt::one());
                        continue 'reduce;
                    }
                    None => break 'reduce,
                }
            }
            if m.get(t, t).is_negative() {
                row_negate(&mut m, &mut u, &mut uinv, t);
            }
        }

        let mut diag = Vec::new();
        for t in 0..n {
            if m.get(t, t).is_zero() {
                break;
            }
            diag.push(m.get(t, t).clone());
        }
        let rank = diag.len();
        Smith { u, uinv, v, vinv, diag, rank, d: m }
    }
}

/// Projection/section pair describing `Z^n / K` for a saturated sublattice
/// `K` (given by basis columns).
///
/// `proj` maps a vector to its coordinates in the quotient; `lift` is a
/// section (`proj * lift = I`), so `lift * proj` is a projector onto a
/// complement of `K` and `x - lift(proj(x)) ∈ K` for all `x`.
pub struct Quotient {
    pub ambient: usize,
    pub dim: usize,
    pub proj: IMat,
    pub lift: IMat,
}

impl Quotient {
    /// Quotient of `Z^n` by the (saturated) lattice spanned by the columns
    /// of `kernel`. Panics if the span is not saturated, since then the
    /// quotient would have torsion and no basis.
    pub fn by_saturated(n: usize, kernel: &IMat) -> Quotient {
        assert_eq!(kernel.rows(), n);
        let k = kernel.cols();
        if k == 0 {
            return Quotient { ambient: n, dim: n, proj: IMat::identity(n), lift: IMat::identity(n) };
        }
        let s = kernel.smith();
        assert_eq!(s.rank, k, "kernel basis columns are dependent");
        assert!(s.diag.iter().all(|d| d.is_one()), "sublattice is not saturated");
        Quotient {
            ambient: n,
            dim: n - k,
            proj: s.u.row_range(k, n),
            lift: s.uinv.col_range(k, n),
        }
    }
}
