//! The two cell decompositions 𝒟 and 𝒟′ of a vertex link, the underlying
//! simplicial (Δ-complex) structure S, and canonical identifications of
//! their first homologies.
//!
//! For one link surface:
//! - 𝒟 has a vertex at each side midpoint, an edge for each corner segment
//!   (the counterclockwise turn cutting a corner of a link triangle), and a
//!   face for each medial triangle and each interior corner polygon.
//! - 𝒟′ (built for closed links) has a vertex at each triangle center and
//!   each corner point, an edge running from the center outward to each
//!   corner, and a quadrilateral face for each glued side.
//! - S is the link triangulation itself: vertices are corner classes, edges
//!   are side classes, faces are the link triangles.
//!
//! The corner segment at corner `j` of the link triangle of vertex `i`
//! realizes the turn `c_{ij}` around the edge `ij`; with `(i,j,k,l)` an even
//! permutation it runs from the side in face `l` to the side in face `k`.
//! Its dual edge `c′_{ij}` crosses it with intersection number
//! `ι(c_{ij}, c′_{ij}) = -1`.
//!
//! Both inclusions of 1-skeleta into the surface are realized by explicit
//! chain-level retractions φ: C(𝒟) → C(S) and φ′: C(𝒟′) → C(S) (midpoints
//! retract to a chosen endpoint of their side, centers to a chosen corner),
//! giving the canonical identification ψ = φ̄′⁻¹ ∘ φ̄ of H₁(𝒟) with H₁(𝒟′).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::homology::Homology;
use crate::intmat::IMat;
use crate::triangulation::{LinkKind, LinkSurface, Triangulation, LINK_CORNERS};
use crate::uf::UnionFind;

/// Errors raised while building link complexes.
#[derive(Debug, Error)]
pub enum LinkError {
    #[error("link {class_id} has unsupported kind {kind} (χ = {euler}, {circles} boundary circles)")]
    UnsupportedKind {
        class_id: usize,
        kind: LinkKind,
        euler: i64,
        circles: usize,
    },
}

/// A two-term chain complex `faces --d2--> edges --d1--> vertices`.
pub struct ChainComplex2 {
    pub d1: IMat,
    pub d2: IMat,
}

/// The cell decompositions of one vertex link.
pub struct LinkComplex {
    /// Id of the vertex class this link belongs to.
    pub class_id: usize,
    pub kind: LinkKind,
    /// Link triangles, ascending `(tet, vertex)`.
    pub triangles: Vec<(usize, usize)>,
    /// Corner `(tet, i, j)`: the corner of the link triangle of vertex `i`
    /// of tetrahedron `tet` on the edge `ij`.  Id = `3·triangle + slot`.
    pub corners: Vec<(usize, usize, usize)>,
    pub corner_class_of: Vec<usize>,
    /// Corner ids of each class, in edge-orbit order.
    pub corner_classes: Vec<Vec<usize>>,
    pub corner_class_interior: Vec<bool>,
    /// Side `(tet, v, f)`: the side of the link triangle of `v` lying in
    /// face `f`.  Id = `3·triangle + slot`.
    pub sides: Vec<(usize, usize, usize)>,
    pub side_class_of: Vec<usize>,
    /// Member side ids of each class (size 1 or 2); `[0]` is the canonical
    /// representative fixing the class orientation.
    pub side_classes: Vec<Vec<usize>>,
    /// 𝒟: vertices = side classes, edges = corner segments, faces =
    /// medial triangles then interior corner polygons.
    pub d: ChainComplex2,
    /// S: vertices = corner classes, edges = side classes, faces = triangles.
    pub s: ChainComplex2,
    /// 𝒟′ (closed links only): vertices = centers then corner classes,
    /// edges = dual segments, faces = side quadrilaterals.
    pub dprime: Option<ChainComplex2>,
    pub h_d: Homology,
    pub h_s: Homology,
    pub h_dprime: Option<Homology>,
    /// Chain retraction C₁(𝒟) → C₁(S) (rows: side classes).
    pub phi: IMat,
    /// Vertex part of φ (rows: corner classes, cols: side classes).
    pub phi0: IMat,
    /// Chain retraction C₁(𝒟′) → C₁(S), for closed links.
    pub phi_prime: Option<IMat>,
    pub phi_prime0: Option<IMat>,
    corner_idx: BTreeMap<(usize, usize, usize), usize>,
}

impl LinkComplex {
    /// The 𝒟-edge id of the corner segment `c_{ij}` in tetrahedron `tet`
    /// (the turn around edge `ij` seen in the link of `i`).
    pub fn corner_edge(&self, tet: usize, i: usize, j: usize) -> Option<usize> {
        self.corner_idx.get(&(tet, i, j)).copied()
    }

    /// Number of 𝒟-edges (= number of 𝒟′-edges).
    pub fn edge_count(&self) -> usize {
        self.corners.len()
    }

    /// The intersection pairing on basis edges: `ι(c, c′) = -1` when `c′` is
    /// the dual of `c`, else 0.
    pub fn iota(&self) -> IMat {
        IMat::identity(self.corners.len()).neg()
    }

    /// The canonical identification ψ: H₁(𝒟) → H₁(𝒟′) in the chosen free
    /// bases, induced by φ̄′⁻¹ ∘ φ̄.  Closed links only.
    pub fn psi(&self) -> IMat {
        let hdp = self.h_dprime.as_ref().expect("ψ requires a closed link");
        let phi_prime = self.phi_prime.as_ref().unwrap();
        let r = self.h_d.free_rank;
        assert_eq!(self.h_s.free_rank, r);
        assert_eq!(hdp.free_rank, r);
        let bar = |h: &Homology, map: &IMat| -> IMat {
            let mut m = IMat::zeros(r, r);
            for j in 0..r {
                let cls = self.h_s.class_of(&map.mul(&h.free_generator_cycle(j)));
                assert!(
                    cls.torsion.iter().all(|(_, x)| x == &num_bigint::BigInt::from(0)),
                    "image class must be torsion-free"
                );
                for i in 0..r {
                    m.set(i, j, cls.free[i].clone());
                }
            }
            m
        };
        let phibar = bar(&self.h_d, &self.phi);
        let phibar_prime = bar(hdp, phi_prime);
        let mut psi = IMat::zeros(r, r);
        for j in 0..r {
            let col = phibar_prime
                .solve(&phibar.col(j))
                .expect("φ̄′ is an isomorphism over Z");
            for i in 0..r {
                psi.set(i, j, col.get(i, 0).clone());
            }
        }
        assert_eq!(phibar_prime.mul(&psi), phibar);
        psi
    }

    /// Matrix of ι on free homology bases: `[ι(x_i, y_j)]` for the chosen
    /// generators `x_i` of H₁(𝒟) and `y_j` of H₁(𝒟′).
    pub fn iota_h1(&self) -> IMat {
        let hdp = self.h_dprime.as_ref().expect("requires a closed link");
        let r = self.h_d.free_rank;
        let mut m = IMat::zeros(r, hdp.free_rank);
        let iota = self.iota();
        for i in 0..r {
            let x = self.h_d.free_generator_cycle(i);
            let row = x.transpose().mul(&iota);
            for j in 0..hdp.free_rank {
                let y = hdp.free_generator_cycle(j);
                m.set(i, j, row.mul(&y).get(0, 0).clone());
            }
        }
        m
    }

    /// The intersection form ι carried to H₁(𝒟) along ψ.  On a torus this
    /// is a unimodular skew form, i.e. `[[0, ±1], [∓1, 0]]`.
    pub fn intersection_form(&self) -> IMat {
        self.iota_h1().mul(&self.psi())
    }
}

/// Builds the cell decompositions of every vertex link.  Fails if any link
/// is neither a disc, a torus, nor an annulus.
pub fn build_link_complexes(tri: &Triangulation) -> Result<Vec<LinkComplex>, LinkError> {
    let links = tri.vertex_links();
    let vclasses = tri.vertex_classes();
    let mut vclass_of = BTreeMap::new();
    for (ci, class) in vclasses.iter().enumerate() {
        for &(t, v) in class {
            vclass_of.insert((t, v), ci);
        }
    }
    let edges = tri.edge_classes();
    links
        .iter()
        .map(|link| {
            if link.kind == LinkKind::Other {
                return Err(LinkError::UnsupportedKind {
                    class_id: link.class_id,
                    kind: link.kind,
                    euler: link.euler,
                    circles: link.boundary_circles,
                });
            }
            Ok(build_one(tri, link, &edges, &vclass_of))
        })
        .collect()
}

/// Even completion of the directed pair `(i, j)`: the unique `(k, l)` with
/// `(i, j, k, l)` an even permutation of `(0,1,2,3)`.
pub fn even_completion(i: usize, j: usize) -> (usize, usize) {
    let others: Vec<usize> = (0..4).filter(|&v| v != i && v != j).collect();
    let (a, b) = (others[0], others[1]);
    if crate::triangulation::is_odd_permutation(&[i, j, a, b]) {
        (b, a)
    } else {
        (a, b)
    }
}

fn build_one(
    tri: &Triangulation,
    link: &LinkSurface,
    edges: &crate::triangulation::EdgeClasses,
    vclass_of: &BTreeMap<(usize, usize), usize>,
) -> LinkComplex {
    let triangles = link.triangles.clone();
    let t_count = triangles.len();
    let mut tri_idx = BTreeMap::new();
    for (q, &tv) in triangles.iter().enumerate() {
        tri_idx.insert(tv, q);
    }

    // Corners and sides share the id scheme 3·triangle + slot, the slot
    // running over LINK_CORNERS[v].
    let mut corners = Vec::with_capacity(3 * t_count);
    let mut sides = Vec::with_capacity(3 * t_count);
    let mut corner_idx = BTreeMap::new();
    let mut side_idx = BTreeMap::new();
    for (q, &(t, v)) in triangles.iter().enumerate() {
        for (slot, &w) in LINK_CORNERS[v].iter().enumerate() {
            corner_idx.insert((t, v, w), 3 * q + slot);
            corners.push((t, v, w));
            side_idx.insert((t, v, w), 3 * q + slot);
            sides.push((t, v, w));
        }
    }

    // Side classes via the face matchings.
    let mut uf = UnionFind::new(sides.len());
    for (&(t, v, f), &sid) in &side_idx {
        if let Some(g) = tri.gluing(t, f) {
            let partner = (g.to_tet, g.map[v], g.to_face(f));
            uf.union(sid, side_idx[&partner]);
        }
    }
    let mut side_classes = uf.classes();
    // Canonical representative: the least member id (members are ascending).
    for c in &side_classes {
        debug_assert!(c.len() <= 2);
        debug_assert!(c.windows(2).all(|w| w[0] < w[1]));
    }
    side_classes.sort_by_key(|c| c[0]);
    let mut side_class_of = vec![usize::MAX; sides.len()];
    for (ci, class) in side_classes.iter().enumerate() {
        for &sid in class {
            side_class_of[sid] = ci;
        }
    }

    // Corner classes: the two ends of each edge class, kept in orbit order.
    let mut corner_classes = Vec::new();
    let mut corner_class_interior = Vec::new();
    let mut corner_class_of = vec![usize::MAX; corners.len()];
    for class in &edges.classes {
        let r0 = class.reps[0];
        for end in 0..2 {
            let end_vertex = if end == 0 { r0.i } else { r0.j };
            if vclass_of[&(r0.tet, end_vertex)] != link.class_id {
                continue;
            }
            let ids: Vec<usize> = class
                .reps
                .iter()
                .map(|r| {
                    let key = if end == 0 { (r.tet, r.i, r.j) } else { (r.tet, r.j, r.i) };
                    corner_idx[&key]
                })
                .collect();
            let cci = corner_classes.len();
            for &c in &ids {
                corner_class_of[c] = cci;
            }
            corner_classes.push(ids);
            corner_class_interior.push(class.interior);
        }
    }
    assert!(corner_class_of.iter().all(|&c| c != usize::MAX));

    // --- 𝒟 ---
    let interior_polygons: Vec<usize> = (0..corner_classes.len())
        .filter(|&c| corner_class_interior[c])
        .collect();
    let mut d1_d = IMat::zeros(side_classes.len(), corners.len());
    for (cid, &(t, i, j)) in corners.iter().enumerate() {
        let (k, l) = even_completion(i, j);
        let a = side_idx[&(t, i, l)];
        let b = side_idx[&(t, i, k)];
        d1_d.add_i64(side_class_of[b], cid, 1);
        d1_d.add_i64(side_class_of[a], cid, -1);
    }
    let mut d2_d = IMat::zeros(corners.len(), t_count + interior_polygons.len());
    for q in 0..t_count {
        for slot in 0..3 {
            d2_d.add_i64(3 * q + slot, q, 1);
        }
    }
    for (p, &cc) in interior_polygons.iter().enumerate() {
        for &c in &corner_classes[cc] {
            d2_d.add_i64(c, t_count + p, -1);
        }
    }
    let d = ChainComplex2 { d1: d1_d, d2: d2_d };

    // --- S ---
    // Directed side in its triangle: side at slot q runs from the corner at
    // slot q+1 to the corner at slot q+2 (counterclockwise).
    let side_ends = |sid: usize| -> (usize, usize) {
        let (t, v, f) = sides[sid];
        let c = LINK_CORNERS[v];
        let q = c.iter().position(|&x| x == f).unwrap();
        let tail = corner_idx[&(t, v, c[(q + 1) % 3])];
        let head = corner_idx[&(t, v, c[(q + 2) % 3])];
        (tail, head)
    };
    let mut d1_s = IMat::zeros(corner_classes.len(), side_classes.len());
    for (sc, class) in side_classes.iter().enumerate() {
        let (tail, head) = side_ends(class[0]);
        d1_s.add_i64(corner_class_of[head], sc, 1);
        d1_s.add_i64(corner_class_of[tail], sc, -1);
    }
    let mut d2_s = IMat::zeros(side_classes.len(), t_count);
    for q in 0..t_count {
        for slot in 0..3 {
            let sid = 3 * q + slot;
            let sc = side_class_of[sid];
            let sgn = if side_classes[sc][0] == sid { 1 } else { -1 };
            d2_s.add_i64(sc, q, sgn);
        }
    }
    let s = ChainComplex2 { d1: d1_s, d2: d2_s };

    // --- φ: C(𝒟) → C(S) ---
    // Midpoint of each side class retracts to the tail corner class of its
    // canonical representative; a corner segment then maps to the induced
    // path along its two adjacent sides.
    let mut phi = IMat::zeros(side_classes.len(), corners.len());
    for (cid, &(t, i, j)) in corners.iter().enumerate() {
        let (k, l) = even_completion(i, j);
        let a = side_idx[&(t, i, l)];
        let b = side_idx[&(t, i, k)];
        let (sca, scb) = (side_class_of[a], side_class_of[b]);
        if side_classes[sca][0] == a {
            phi.add_i64(sca, cid, 1);
        }
        if side_classes[scb][0] != b {
            phi.add_i64(scb, cid, -1);
        }
    }
    let mut phi0 = IMat::zeros(corner_classes.len(), side_classes.len());
    for (sc, class) in side_classes.iter().enumerate() {
        let (tail, _) = side_ends(class[0]);
        phi0.add_i64(corner_class_of[tail], sc, 1);
    }

    // --- 𝒟′ and φ′ (closed links only) ---
    let closed = side_classes.iter().all(|c| c.len() == 2)
        && corner_class_interior.iter().all(|&b| b);
    let mut dprime = None;
    let mut h_dprime = None;
    let mut phi_prime = None;
    let mut phi_prime0 = None;
    if closed {
        let mut d1_p = IMat::zeros(t_count + corner_classes.len(), corners.len());
        for (cid, &class) in corner_class_of.iter().enumerate() {
            d1_p.add_i64(t_count + class, cid, 1);
            d1_p.add_i64(cid / 3, cid, -1);
        }
        let mut d2_p = IMat::zeros(corners.len(), side_classes.len());
        for (sc, class) in side_classes.iter().enumerate() {
            let s1 = class[0];
            let (t1, v1, f1) = sides[s1];
            let c = LINK_CORNERS[v1];
            let q = c.iter().position(|&x| x == f1).unwrap();
            let (a, b) = (c[(q + 1) % 3], c[(q + 2) % 3]);
            let g = tri.gluing(t1, f1).expect("closed link side is glued");
            let (t2, v2) = (g.to_tet, g.map[v1]);
            d2_p.add_i64(corner_idx[&(t1, v1, a)], sc, 1);
            d2_p.add_i64(corner_idx[&(t2, v2, g.map[a])], sc, -1);
            d2_p.add_i64(corner_idx[&(t2, v2, g.map[b])], sc, 1);
            d2_p.add_i64(corner_idx[&(t1, v1, b)], sc, -1);
        }
        let complex = ChainComplex2 { d1: d1_p, d2: d2_p };
        h_dprime = Some(Homology::new(&complex.d1, &complex.d2));
        dprime = Some(complex);

        // Center of each triangle retracts to its slot-0 corner class; the
        // dual segment to corner j maps to the path from that corner to j
        // along the triangle's sides.
        let mut pp = IMat::zeros(side_classes.len(), corners.len());
        for (cid, &(t, v, _w)) in corners.iter().enumerate() {
            let q = cid % 3;
            let c = LINK_CORNERS[v];
            match q {
                0 => {}
                1 => {
                    // Path corner₀ → corner₁ is the side at slot 2.
                    let sid = side_idx[&(t, v, c[2])];
                    let sc = side_class_of[sid];
                    let sgn = if side_classes[sc][0] == sid { 1 } else { -1 };
                    pp.add_i64(sc, cid, sgn);
                }
                2 => {
                    // Path corner₀ → corner₂ reverses the side at slot 1.
                    let sid = side_idx[&(t, v, c[1])];
                    let sc = side_class_of[sid];
                    let sgn = if side_classes[sc][0] == sid { 1 } else { -1 };
                    pp.add_i64(sc, cid, -sgn);
                }
                _ => unreachable!(),
            }
        }
        let mut pp0 = IMat::zeros(corner_classes.len(), t_count + corner_classes.len());
        for (q, &(t, v)) in triangles.iter().enumerate() {
            let c0 = corner_idx[&(t, v, LINK_CORNERS[v][0])];
            pp0.add_i64(corner_class_of[c0], q, 1);
        }
        for cc in 0..corner_classes.len() {
            pp0.add_i64(cc, t_count + cc, 1);
        }
        phi_prime = Some(pp);
        phi_prime0 = Some(pp0);
    }

    let h_d = Homology::new(&d.d1, &d.d2);
    let h_s = Homology::new(&s.d1, &s.d2);

    LinkComplex {
        class_id: link.class_id,
        kind: link.kind,
        triangles,
        corners,
        corner_class_of,
        corner_classes,
        corner_class_interior,
        sides,
        side_class_of,
        side_classes,
        d,
        s,
        dprime,
        h_d,
        h_s,
        h_dprime,
        phi,
        phi0,
        phi_prime,
        phi_prime0,
        corner_idx,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn fig8_link() -> LinkComplex {
        let tri = Triangulation::fixture("fig8").unwrap();
        let mut complexes = build_link_complexes(&tri).unwrap();
        assert_eq!(complexes.len(), 1);
        complexes.pop().unwrap()
    }

    #[test]
    fn fig8_cell_counts() {
        let lc = fig8_link();
        assert_eq!(lc.kind, LinkKind::Torus);
        assert_eq!(lc.triangles.len(), 8);
        assert_eq!(lc.corners.len(), 24);
        assert_eq!(lc.side_classes.len(), 12);
        assert_eq!(lc.corner_classes.len(), 4);
        assert!(lc.corner_class_interior.iter().all(|&b| b));
        // 𝒟: V=12, E=24, F=8 medial + 4 polygons → χ=0.
        assert_eq!(lc.d.d1.rows(), 12);
        assert_eq!(lc.d.d2.cols(), 12);
        // 𝒟′: V=8+4, E=24, F=12 → χ=0.
        let dp = lc.dprime.as_ref().unwrap();
        assert_eq!(dp.d1.rows(), 12);
        assert_eq!(dp.d2.cols(), 12);
        // S: V=4, E=12, F=8 → χ=0.
        assert_eq!(lc.s.d1.rows(), 4);
        assert_eq!(lc.s.d1.cols(), 12);
        assert_eq!(lc.s.d2.cols(), 8);
    }

    #[test]
    fn fig8_homology_ranks() {
        let lc = fig8_link();
        assert_eq!(lc.h_d.free_rank, 2);
        assert_eq!(lc.h_s.free_rank, 2);
        assert_eq!(lc.h_dprime.as_ref().unwrap().free_rank, 2);
        assert!(lc.h_d.torsion.is_empty());
        assert!(lc.h_s.torsion.is_empty());
        assert!(lc.h_dprime.as_ref().unwrap().torsion.is_empty());
    }

    #[test]
    fn retractions_are_chain_maps() {
        let lc = fig8_link();
        assert_eq!(lc.s.d1.mul(&lc.phi), lc.phi0.mul(&lc.d.d1));
        let pp = lc.phi_prime.as_ref().unwrap();
        let pp0 = lc.phi_prime0.as_ref().unwrap();
        assert_eq!(lc.s.d1.mul(pp), pp0.mul(&lc.dprime.as_ref().unwrap().d1));
        // Face boundaries map to boundaries: classes vanish in H₁(S).
        for f in 0..lc.d.d2.cols() {
            let z = lc.phi.mul(&lc.d.d2.col(f));
            assert!(lc.h_s.is_boundary(&z));
        }
        for f in 0..lc.dprime.as_ref().unwrap().d2.cols() {
            let z = pp.mul(&lc.dprime.as_ref().unwrap().d2.col(f));
            assert!(lc.h_s.is_boundary(&z));
        }
    }

    #[test]
    fn psi_is_unimodular_and_iota_descends() {
        let lc = fig8_link();
        let psi = lc.psi();
        let det = psi.get(0, 0) * psi.get(1, 1) - psi.get(0, 1) * psi.get(1, 0);
        assert_eq!(&det * &det, BigInt::from(1));

        // ι descends to homology: pairing any 𝒟-boundary against any
        // 𝒟′-cycle (and vice versa) gives zero.
        let iota = lc.iota();
        let hdp = lc.h_dprime.as_ref().unwrap();
        for f in 0..lc.d.d2.cols() {
            let b = lc.d.d2.col(f);
            for j in 0..hdp.free_rank {
                let z = hdp.free_generator_cycle(j);
                let v = b.transpose().mul(&iota).mul(&z);
                assert!(v.is_zero());
            }
        }
        let dp = lc.dprime.as_ref().unwrap();
        for f in 0..dp.d2.cols() {
            let b = dp.d2.col(f);
            for i in 0..lc.h_d.free_rank {
                let z = lc.h_d.free_generator_cycle(i);
                let v = z.transpose().mul(&iota).mul(&b);
                assert!(v.is_zero());
            }
        }
    }

    #[test]
    fn intersection_form_is_standard_symplectic() {
        let lc = fig8_link();
        let form = lc.intersection_form();
        assert_eq!(form.rows(), 2);
        let a = form.get(0, 0).clone();
        let b = form.get(0, 1).clone();
        let c = form.get(1, 0).clone();
        let d = form.get(1, 1).clone();
        assert_eq!(a, BigInt::from(0));
        assert_eq!(d, BigInt::from(0));
        assert_eq!(b, -c.clone());
        assert_eq!(&b * &b, BigInt::from(1));
        // In particular a basis with ι(l, m′) = 1 exists.
    }

    #[test]
    fn disc_links_have_trivial_h1() {
        for name in ["single", "pglue"] {
            let tri = Triangulation::fixture(name).unwrap();
            let complexes = build_link_complexes(&tri).unwrap();
            for lc in &complexes {
                assert_eq!(lc.kind, LinkKind::Disc);
                assert_eq!(lc.h_d.free_rank, 0);
                assert_eq!(lc.h_s.free_rank, 0);
                assert!(lc.h_d.torsion.is_empty());
                assert!(lc.dprime.is_none());
                assert_eq!(lc.s.d1.mul(&lc.phi), lc.phi0.mul(&lc.d.d1));
            }
        }
    }

    #[test]
    fn annulus_link_has_rank_one_h1() {
        let tri = Triangulation::fixture("annulus").unwrap();
        let complexes = build_link_complexes(&tri).unwrap();
        let ann = complexes
            .iter()
            .find(|lc| lc.kind == LinkKind::Annulus)
            .unwrap();
        assert_eq!(ann.h_d.free_rank, 1);
        assert_eq!(ann.h_s.free_rank, 1);
        assert!(ann.h_d.torsion.is_empty());
        assert!(ann.dprime.is_none());
        assert_eq!(ann.s.d1.mul(&ann.phi), ann.phi0.mul(&ann.d.d1));
    }

    #[test]
    fn corner_edge_lookup_matches_indexing() {
        let lc = fig8_link();
        for (cid, &(t, i, j)) in lc.corners.iter().enumerate() {
            assert_eq!(lc.corner_edge(t, i, j), Some(cid));
        }
        assert_eq!(lc.corner_edge(0, 0, 0), None);
    }
}
