//! Abstract ideal triangulations.
//!
//! A triangulation is a finite family of abstract tetrahedra together with a
//! partial matching of their faces by orientation-reversing simplicial
//! bijections.  This module parses and validates such data, computes the
//! induced identifications (edge classes, vertex classes), classifies the
//! links of vertices (disc / torus / annulus), and assembles the triangulated
//! boundary surface Σ formed by the unmatched faces.
//!
//! Conventions:
//! - Faces are labelled by their opposite vertex: face `f` of a tetrahedron
//!   with vertices `{0,1,2,3}` is the triangle spanned by the other three.
//! - The boundary orientation of face `f` is the vertex cycle
//!   [`crate::tetra::FACE_VERTICES`]`[f]`.
//! - A face matching must reverse the induced boundary orientation, which is
//!   equivalent to its vertex bijection being an odd permutation of
//!   `{0,1,2,3}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intmat::IMat;
use crate::tetra::FACE_VERTICES;
use crate::uf::UnionFind;

/// Corner order of the link triangle cut off at vertex `v`, counterclockwise
/// as seen from `v` in a positively oriented tetrahedron.  The corner labelled
/// `w` sits on the edge `vw`.  This is the reverse of the boundary
/// orientation of the face opposite `v`.
pub const LINK_CORNERS: [[usize; 3]; 4] = [[1, 3, 2], [0, 2, 3], [0, 3, 1], [0, 1, 2]];

/// Errors raised while building or validating a triangulation.
#[derive(Debug, Error)]
pub enum TriError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("unsupported format tag {0:?} (expected \"nz-tri-1\")")]
    BadFormat(String),
    #[error("gluing references tetrahedron {tet} or face {face} out of range")]
    IndexRange { tet: usize, face: usize },
    #[error("vertex_map {0:?} is not a permutation of 0..4")]
    NotBijection([usize; 4]),
    #[error("vertex_map {map:?} sends face {face} to {got}, but to_face is {want}")]
    FaceImageMismatch {
        map: [usize; 4],
        face: usize,
        got: usize,
        want: usize,
    },
    #[error("face ({0},{1}) glued to itself")]
    SelfGluing(usize, usize),
    #[error("face ({0},{1}) glued twice (inconsistent matchings)")]
    GluedTwice(usize, usize),
    #[error("orientation-preserving matching at face ({tet},{face}): vertex_map {map:?} is even")]
    OrientationPreserving {
        tet: usize,
        face: usize,
        map: [usize; 4],
    },
    #[error("orientation-inconsistent identifications around edge ({tet},{i},{j})")]
    OrientationInconsistent { tet: usize, i: usize, j: usize },
}

/// One side of a face matching: face `f` of some tetrahedron is glued to face
/// `map[f]` of tetrahedron `to_tet`, vertex `v ≠ f` going to `map[v]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceGluing {
    pub to_tet: usize,
    pub map: [usize; 4],
}

impl FaceGluing {
    /// The face of `to_tet` this gluing lands on, given the local face label.
    pub fn to_face(&self, face: usize) -> usize {
        self.map[face]
    }
}

/// A validated abstract triangulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    glue: Vec<[Option<FaceGluing>; 4]>,
}

/// A face matching given as `(tet, face, to_tet, to_face, vertex_map)`.
pub type Matching = (usize, usize, usize, usize, [usize; 4]);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TriDoc {
    format: String,
    tetrahedra: usize,
    gluings: Vec<GluingDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GluingDoc {
    tet: usize,
    face: usize,
    to_tet: usize,
    to_face: usize,
    vertex_map: [usize; 4],
}

/// True when `p` is an odd permutation of `{0,1,2,3}`.
pub fn is_odd_permutation(p: &[usize; 4]) -> bool {
    let mut inversions = 0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            if p[a] > p[b] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

fn is_permutation(p: &[usize; 4]) -> bool {
    let mut seen = [false; 4];
    for &v in p {
        if v >= 4 || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

impl Triangulation {
    /// Builds a triangulation of `n_tets` tetrahedra from face matchings and
    /// validates every invariant.  Each matching may be listed once or in
    /// both directions; listing both requires them to be mutually inverse.
    pub fn from_matchings(n_tets: usize, matchings: &[Matching]) -> Result<Self, TriError> {
        if n_tets == 0 {
            return Err(TriError::Malformed("tetrahedra count must be positive".into()));
        }
        let mut glue: Vec<[Option<FaceGluing>; 4]> = vec![[None; 4]; n_tets];
        for &(tet, face, to_tet, to_face, map) in matchings {
            if tet >= n_tets || face >= 4 || to_tet >= n_tets || to_face >= 4 {
                return Err(TriError::IndexRange { tet, face });
            }
            if !is_permutation(&map) {
                return Err(TriError::NotBijection(map));
            }
            if map[face] != to_face {
                return Err(TriError::FaceImageMismatch {
                    map,
                    face,
                    got: map[face],
                    want: to_face,
                });
            }
            if tet == to_tet && face == to_face {
                return Err(TriError::SelfGluing(tet, face));
            }
            if !is_odd_permutation(&map) {
                return Err(TriError::OrientationPreserving { tet, face, map });
            }
            let mut inv = [0usize; 4];
            for v in 0..4 {
                inv[map[v]] = v;
            }
            for (t, f, g) in [
                (tet, face, FaceGluing { to_tet, map }),
                (to_tet, to_face, FaceGluing { to_tet: tet, map: inv }),
            ] {
                match glue[t][f] {
                    None => glue[t][f] = Some(g),
                    Some(existing) if existing == g => {}
                    Some(_) => return Err(TriError::GluedTwice(t, f)),
                }
            }
        }
        let tri = Triangulation { glue };
        // Walking every edge orbit both detects orientation-inconsistent
        // identifications and checks the boundary-side orientation canary.
        let classes = tri.try_edge_classes()?;
        tri.check_sigma_orientations(&classes)?;
        Ok(tri)
    }

    /// Parses the JSON interchange format
    /// `{"format":"nz-tri-1","tetrahedra":N,"gluings":[...]}`.
    pub fn parse(text: &str) -> Result<Self, TriError> {
        let doc: TriDoc =
            serde_json::from_str(text).map_err(|e| TriError::Malformed(e.to_string()))?;
        if doc.format != "nz-tri-1" {
            return Err(TriError::BadFormat(doc.format));
        }
        let matchings: Vec<Matching> = doc
            .gluings
            .iter()
            .map(|g| (g.tet, g.face, g.to_tet, g.to_face, g.vertex_map))
            .collect();
        Self::from_matchings(doc.tetrahedra, &matchings)
    }

    /// Serializes to the JSON interchange format.  Each matching is listed
    /// once, from its lexicographically smaller `(tet, face)` side, in
    /// ascending order — the output is byte-stable.
    pub fn to_json(&self) -> String {
        let mut gluings = Vec::new();
        for tet in 0..self.tet_count() {
            for face in 0..4 {
                if let Some(g) = self.glue[tet][face] {
                    let to_face = g.to_face(face);
                    if (tet, face) <= (g.to_tet, to_face) {
                        gluings.push(GluingDoc {
                            tet,
                            face,
                            to_tet: g.to_tet,
                            to_face,
                            vertex_map: g.map,
                        });
                    }
                }
            }
        }
        let doc = TriDoc {
            format: "nz-tri-1".into(),
            tetrahedra: self.tet_count(),
            gluings,
        };
        serde_json::to_string(&doc).expect("triangulation document serializes")
    }

    /// A built-in fixture by name: `single` (one unglued tetrahedron),
    /// `fig8` (figure-eight knot complement, 2 tetrahedra), or `pglue`
    /// (two tetrahedra glued along one face).
    pub fn fixture(name: &str) -> Option<Triangulation> {
        let text = match name {
            "single" => SINGLE_JSON,
            "fig8" => FIG8_JSON,
            "pglue" => PGLUE_JSON,
            "annulus" => ANNULUS_JSON,
            _ => return None,
        };
        Some(Triangulation::parse(text).expect("built-in fixture is valid"))
    }

    pub fn tet_count(&self) -> usize {
        self.glue.len()
    }

    /// The gluing attached to face `face` of tetrahedron `tet`, if any.
    pub fn gluing(&self, tet: usize, face: usize) -> Option<&FaceGluing> {
        self.glue[tet][face].as_ref()
    }

    /// All unmatched `(tet, face)` pairs, ascending.
    pub fn free_faces(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for tet in 0..self.tet_count() {
            for face in 0..4 {
                if self.glue[tet][face].is_none() {
                    out.push((tet, face));
                }
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_faces().is_empty()
    }

    /// Edge classes of the complex.  Infallible on a validated triangulation.
    pub fn edge_classes(&self) -> EdgeClasses {
        self.try_edge_classes()
            .expect("validated triangulation has consistent edge orbits")
    }

    fn try_edge_classes(&self) -> Result<EdgeClasses, TriError> {
        let mut classes: Vec<EdgeClass> = Vec::new();
        let mut seen: BTreeMap<(usize, usize, usize), ()> = BTreeMap::new();
        for tet in 0..self.tet_count() {
            for i in 0..4 {
                for j in 0..4 {
                    if i == j || seen.contains_key(&(tet, i, j)) {
                        continue;
                    }
                    let class = self.walk_edge_orbit(EdgeRep::canonical(tet, i, j))?;
                    for r in &class.reps {
                        seen.insert((r.tet, r.i, r.j), ());
                        seen.insert((r.tet, r.j, r.i), ());
                    }
                    classes.push(class);
                }
            }
        }
        // Canonical order and start: the class whose lexicographically least
        // directed representative is smallest comes first, and that
        // representative starts its cycle (spec tie-breaking rule).
        for class in &mut classes {
            class.canonicalize();
        }
        classes.sort_by_key(|c| {
            let r = &c.reps[0];
            (r.tet, r.i, r.j)
        });
        let mut index = BTreeMap::new();
        for (ci, class) in classes.iter().enumerate() {
            for (pos, r) in class.reps.iter().enumerate() {
                index.insert((r.tet, r.i, r.j), (ci, pos, true));
                index.insert((r.tet, r.j, r.i), (ci, pos, false));
            }
        }
        Ok(EdgeClasses { classes, index })
    }

    /// Walks the full orbit of one directed edge.  Returns the orbit as a
    /// path (walked to its free ends) or a closed cycle.
    fn walk_edge_orbit(&self, start: EdgeRep) -> Result<EdgeClass, TriError> {
        let mut reps = vec![start];
        let mut interior = false;
        // Forward until the orbit closes or exits through a free face.
        loop {
            let cur = *reps.last().unwrap();
            match self.step_edge(cur) {
                None => break,
                Some(next) => {
                    if next == start {
                        interior = true;
                        break;
                    }
                    if reps
                        .iter()
                        .any(|r| r.tet == next.tet && r.i == next.j && r.j == next.i)
                    {
                        return Err(TriError::OrientationInconsistent {
                            tet: next.tet,
                            i: next.i,
                            j: next.j,
                        });
                    }
                    reps.push(next);
                }
            }
        }
        if !interior {
            // Walk backward (mirror direction from the reversed start state)
            // to reach the other free end, then stitch the full path.
            let mut back = Vec::new();
            let mut cur = start.reversed();
            while let Some(next) = self.step_edge(cur) {
                let fwd = next.reversed();
                if reps.iter().chain(back.iter()).any(|r: &EdgeRep| {
                    r.tet == fwd.tet && r.i == fwd.j && r.j == fwd.i
                }) {
                    return Err(TriError::OrientationInconsistent {
                        tet: fwd.tet,
                        i: fwd.i,
                        j: fwd.j,
                    });
                }
                back.push(fwd);
                cur = next;
            }
            back.reverse();
            back.extend(reps);
            reps = back;
        }
        Ok(EdgeClass { reps, interior })
    }

    /// One step of the orbit walk: exit through the face opposite `l` and
    /// transport the state by the face bijection.
    fn step_edge(&self, r: EdgeRep) -> Option<EdgeRep> {
        let g = self.glue[r.tet][r.l]?;
        Some(EdgeRep {
            tet: g.to_tet,
            i: g.map[r.i],
            j: g.map[r.j],
            k: g.map[r.l],
            l: g.map[r.k],
        })
    }

    /// Orbits of `(tet, vertex)` incidences under the face bijections,
    /// ordered by least member.
    pub fn vertex_classes(&self) -> Vec<Vec<(usize, usize)>> {
        let n = self.tet_count();
        let id = |tet: usize, v: usize| 4 * tet + v;
        let mut uf = UnionFind::new(4 * n);
        for tet in 0..n {
            for face in 0..4 {
                if let Some(g) = self.glue[tet][face] {
                    for v in 0..4 {
                        if v != face {
                            uf.union(id(tet, v), id(g.to_tet, g.map[v]));
                        }
                    }
                }
            }
        }
        uf.classes()
            .into_iter()
            .map(|c| c.into_iter().map(|x| (x / 4, x % 4)).collect())
            .collect()
    }

    /// One classified link surface per vertex class.
    pub fn vertex_links(&self) -> Vec<LinkSurface> {
        let vclasses = self.vertex_classes();
        let mut class_of = BTreeMap::new();
        for (ci, class) in vclasses.iter().enumerate() {
            for &(t, v) in class {
                class_of.insert((t, v), ci);
            }
        }
        let edges = self.edge_classes();

        // Boundary vertices of link surfaces: every non-interior edge class
        // end is a corner path whose two extreme corners lie on free sides;
        // connect those sides.  Free sides are 2-regular in this graph, so
        // its components are the boundary circles.
        let mut side_ids: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
        for tet in 0..self.tet_count() {
            for v in 0..4 {
                for f in 0..4 {
                    if f != v && self.glue[tet][f].is_none() {
                        let next = side_ids.len();
                        side_ids.insert((tet, v, f), next);
                    }
                }
            }
        }
        let mut boundary = UnionFind::new(side_ids.len());
        for class in &edges.classes {
            if class.interior {
                continue;
            }
            let s0 = class.reps[0];
            let sp = *class.reps.last().unwrap();
            for (a, b) in [
                ((s0.tet, s0.i, s0.k), (sp.tet, sp.i, sp.l)),
                ((s0.tet, s0.j, s0.k), (sp.tet, sp.j, sp.l)),
            ] {
                boundary.union(side_ids[&a], side_ids[&b]);
            }
        }
        let free_side_root: BTreeMap<(usize, usize, usize), usize> = side_ids
            .iter()
            .map(|(&side, &id)| (side, boundary.find(id)))
            .collect();

        vclasses
            .iter()
            .enumerate()
            .map(|(ci, class)| {
                self.build_link(ci, class, &class_of, &edges, &free_side_root)
            })
            .collect()
    }

    fn build_link(
        &self,
        class_id: usize,
        incidences: &[(usize, usize)],
        class_of: &BTreeMap<(usize, usize), usize>,
        edges: &EdgeClasses,
        free_side_root: &BTreeMap<(usize, usize, usize), usize>,
    ) -> LinkSurface {
        let faces = incidences.len() as i64;

        // Edges of the link surface: side classes.
        let mut edge_count = 0i64;
        for &(t, v) in incidences {
            for f in 0..4 {
                if f == v {
                    continue;
                }
                match self.glue[t][f] {
                    None => edge_count += 1,
                    Some(g) => {
                        let partner = (g.to_tet, g.map[v], g.to_face(f));
                        if (t, v, f) <= partner {
                            edge_count += 1;
                        }
                    }
                }
            }
        }

        // Vertices of the link surface: edge-class ends landing in this
        // vertex class (each end is one corner orbit).
        let mut vertex_count = 0i64;
        for class in &edges.classes {
            let r0 = class.reps[0];
            for end in [r0.i, r0.j] {
                if class_of[&(r0.tet, end)] == class_id {
                    vertex_count += 1;
                }
            }
        }

        let euler = vertex_count - edge_count + faces;

        // Boundary circles incident to this link.
        let mut roots = std::collections::BTreeSet::new();
        for (&(t, v, _f), &root) in free_side_root {
            if class_of[&(t, v)] == class_id {
                roots.insert(root);
            }
        }
        let boundary_circles = roots.len();

        let orientable = self.link_orientable(incidences);

        let kind = match (euler, boundary_circles, orientable) {
            (1, 1, true) => LinkKind::Disc,
            (0, 0, true) => LinkKind::Torus,
            (0, 2, true) => LinkKind::Annulus,
            _ => LinkKind::Other,
        };

        LinkSurface {
            class_id,
            triangles: incidences.to_vec(),
            kind,
            euler,
            boundary_circles,
            orientable,
        }
    }

    /// Checks whether the link surface over these incidences is orientable by
    /// propagating triangle orientations across glued sides.
    fn link_orientable(&self, incidences: &[(usize, usize)]) -> bool {
        let mut sign: BTreeMap<(usize, usize), i8> = BTreeMap::new();
        for &start in incidences {
            if sign.contains_key(&start) {
                continue;
            }
            sign.insert(start, 1);
            let mut stack = vec![start];
            while let Some((t, v)) = stack.pop() {
                let s = sign[&(t, v)];
                for f in 0..4 {
                    if f == v {
                        continue;
                    }
                    let Some(g) = self.glue[t][f] else { continue };
                    let (t2, v2, f2) = (g.to_tet, g.map[v], g.to_face(f));
                    // The side in face f runs c_{q+1} → c_{q+2} in the
                    // counterclockwise corner cycle, where f sits at
                    // position q.
                    let dir = side_direction(v, f);
                    let image = (g.map[dir.0], g.map[dir.1]);
                    let dir2 = side_direction(v2, f2);
                    let s2 = if image == (dir2.1, dir2.0) {
                        s
                    } else if image == dir2 {
                        -s
                    } else {
                        unreachable!("side image must land on the partner side");
                    };
                    match sign.get(&(t2, v2)) {
                        None => {
                            sign.insert((t2, v2), s2);
                            stack.push((t2, v2));
                        }
                        Some(&existing) if existing == s2 => {}
                        Some(_) => return false,
                    }
                }
            }
        }
        true
    }

    /// The triangulated boundary surface Σ: carrier triangles are the free
    /// faces, and each non-interior edge class glues two free sides with a
    /// directed correspondence.
    pub fn boundary_surface(&self) -> BoundarySurface {
        let edges = self.edge_classes();
        let mut sigma_edges = Vec::new();
        for class in &edges.classes {
            if class.interior {
                continue;
            }
            let s0 = class.reps[0];
            let sp = *class.reps.last().unwrap();
            sigma_edges.push(SigmaEdge {
                a: SigmaSide {
                    tet: s0.tet,
                    face: s0.k,
                    from: s0.i,
                    to: s0.j,
                },
                b: SigmaSide {
                    tet: sp.tet,
                    face: sp.l,
                    from: sp.i,
                    to: sp.j,
                },
            });
        }
        BoundarySurface {
            triangles: self.free_faces(),
            edges: sigma_edges,
        }
    }

    fn check_sigma_orientations(&self, edges: &EdgeClasses) -> Result<(), TriError> {
        for class in &edges.classes {
            if class.interior {
                continue;
            }
            let s0 = class.reps[0];
            let sp = *class.reps.last().unwrap();
            let sa = boundary_sign(s0.k, s0.i, s0.j);
            let sb = boundary_sign(sp.l, sp.i, sp.j);
            if sa == sb {
                return Err(TriError::OrientationInconsistent {
                    tet: s0.tet,
                    i: s0.i,
                    j: s0.j,
                });
            }
        }
        Ok(())
    }

    /// First homology of the dual spine: one 0-cell per tetrahedron, one
    /// 1-cell per matched face class, one 2-cell per interior edge class.
    /// For a closed complex this is H₁ of the underlying cusped manifold.
    /// Returns `(free_rank, torsion_divisors)`.
    pub fn first_homology(&self) -> (usize, Vec<u64>) {
        let mut face_ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for tet in 0..self.tet_count() {
            for face in 0..4 {
                if let Some(g) = self.glue[tet][face] {
                    let other = (g.to_tet, g.to_face(face));
                    if (tet, face) <= other {
                        let next = face_ids.len();
                        face_ids.insert((tet, face), next);
                    }
                }
            }
        }
        let canonical = |tet: usize, face: usize| -> (usize, bool) {
            match face_ids.get(&(tet, face)) {
                Some(&id) => (id, true),
                None => {
                    let g = self.glue[tet][face].unwrap();
                    (face_ids[&(g.to_tet, g.to_face(face))], false)
                }
            }
        };

        // ∂₁: 1-cell (tet,face)→(to_tet,·) maps to to_tet − tet.
        let one = num_bigint::BigInt::from(1);
        let minus_one = num_bigint::BigInt::from(-1);
        let mut d1 = IMat::zeros(self.tet_count(), face_ids.len());
        for (&(tet, face), &id) in &face_ids {
            let g = self.glue[tet][face].unwrap();
            d1.add_at(g.to_tet, id, &one);
            d1.add_at(tet, id, &minus_one);
        }

        // ∂₂: each interior edge class crosses one face per step.
        let edges = self.edge_classes();
        let interior: Vec<&EdgeClass> = edges.classes.iter().filter(|c| c.interior).collect();
        let mut d2 = IMat::zeros(face_ids.len(), interior.len());
        for (col, class) in interior.iter().enumerate() {
            for r in &class.reps {
                let (id, forward) = canonical(r.tet, r.l);
                d2.add_at(id, col, if forward { &one } else { &minus_one });
            }
        }

        // Express im ∂₂ in coordinates of the (saturated) kernel lattice of
        // ∂₁ and read H₁ off the Smith form of the coordinate matrix.
        let ker = d1.kernel_basis();
        let mut coords = IMat::zeros(ker.cols(), d2.cols());
        for c in 0..d2.cols() {
            let x = ker
                .solve(&d2.col(c))
                .expect("boundary of a 2-cell is a 1-cycle");
            for r in 0..ker.cols() {
                coords.set(r, c, x.get(r, 0).clone());
            }
        }
        let s = coords.smith();
        let free_rank = ker.cols() - s.rank;
        let torsion: Vec<u64> = s
            .diag
            .iter()
            .filter(|d| **d > one)
            .map(|d| d.to_string().parse().expect("torsion divisor fits in u64"))
            .collect();
        (free_rank, torsion)
    }
}

/// Sign of the directed pair `(i,j)` in the boundary cycle of face `f`:
/// `+1` when `i → j` occurs in the cycle, `-1` when `j → i` occurs.
fn boundary_sign(f: usize, i: usize, j: usize) -> i8 {
    let cyc = FACE_VERTICES[f];
    for q in 0..3 {
        if cyc[q] == i && cyc[(q + 1) % 3] == j {
            return 1;
        }
        if cyc[q] == j && cyc[(q + 1) % 3] == i {
            return -1;
        }
    }
    panic!("pair ({i},{j}) not on face {f}");
}

/// The directed side of the link triangle at vertex `v` lying in face `f`,
/// as an ordered corner pair following the counterclockwise corner cycle.
fn side_direction(v: usize, f: usize) -> (usize, usize) {
    let c = LINK_CORNERS[v];
    let q = c.iter().position(|&x| x == f).expect("face label is a corner");
    (c[(q + 1) % 3], c[(q + 2) % 3])
}

/// A directed incidence of an edge class: the directed edge `(i,j)` of
/// tetrahedron `tet`, with `(i,j,k,l)` an even permutation of `(0,1,2,3)`.
/// The orbit walk enters through the face opposite `k` and exits through the
/// face opposite `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeRep {
    pub tet: usize,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

impl EdgeRep {
    /// The representative for directed edge `(i,j)` with `(i,j,k,l)` even.
    pub fn canonical(tet: usize, i: usize, j: usize) -> EdgeRep {
        assert!(i < 4 && j < 4 && i != j);
        let others: Vec<usize> = (0..4).filter(|&v| v != i && v != j).collect();
        let (a, b) = (others[0], others[1]);
        if is_odd_permutation(&[i, j, a, b]) {
            EdgeRep { tet, i, j, k: b, l: a }
        } else {
            EdgeRep { tet, i, j, k: a, l: b }
        }
    }

    pub fn reversed(&self) -> EdgeRep {
        EdgeRep {
            tet: self.tet,
            i: self.j,
            j: self.i,
            k: self.l,
            l: self.k,
        }
    }

    /// The face through which the orbit walk enters this tetrahedron.
    pub fn entry_face(&self) -> usize {
        self.k
    }

    /// The face through which the orbit walk exits this tetrahedron.
    pub fn exit_face(&self) -> usize {
        self.l
    }
}

/// All incidences of one edge of the complex, in orbit order.  For interior
/// edges the list is a closed cycle (the step from the last representative
/// returns to the first); otherwise it is a path whose first representative
/// enters and whose last representative exits through a free face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    pub reps: Vec<EdgeRep>,
    pub interior: bool,
}

impl EdgeClass {
    pub fn size(&self) -> usize {
        self.reps.len()
    }

    /// Rotates / mirrors the representative list into canonical form: the
    /// lexicographically least directed representative `(tet, i, j)` over
    /// both walk directions comes first.
    fn canonicalize(&mut self) {
        let fwd_min = self
            .reps
            .iter()
            .map(|r| (r.tet, r.i, r.j))
            .min()
            .unwrap();
        let rev_min = self
            .reps
            .iter()
            .map(|r| (r.tet, r.j, r.i))
            .min()
            .unwrap();
        if self.interior {
            if rev_min < fwd_min {
                self.reps = self.reps.iter().rev().map(|r| r.reversed()).collect();
            }
            let start = self
                .reps
                .iter()
                .position(|r| {
                    (r.tet, r.i, r.j) == std::cmp::min(fwd_min, rev_min)
                })
                .unwrap();
            self.reps.rotate_left(start);
        } else {
            // A path cannot be rotated; only the direction is free.
            let first_fwd = {
                let r = &self.reps[0];
                (r.tet, r.i, r.j)
            };
            let first_rev = {
                let r = self.reps.last().unwrap();
                (r.tet, r.j, r.i)
            };
            if first_rev < first_fwd {
                self.reps = self.reps.iter().rev().map(|r| r.reversed()).collect();
            }
        }
    }
}

/// The edge classes of a triangulation with a directed lookup index.
pub struct EdgeClasses {
    pub classes: Vec<EdgeClass>,
    index: BTreeMap<(usize, usize, usize), (usize, usize, bool)>,
}

impl EdgeClasses {
    /// Locates the directed edge `(i,j)` of `tet`: returns
    /// `(class, position, forward)` where `forward` tells whether the stored
    /// representative at that position carries the same direction.
    pub fn lookup(&self, tet: usize, i: usize, j: usize) -> (usize, usize, bool) {
        self.index[&(tet, i, j)]
    }

    pub fn total_size(&self) -> usize {
        self.classes.iter().map(|c| c.size()).sum()
    }
}

/// Kind of a vertex link surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkKind {
    Disc,
    Torus,
    Annulus,
    Other,
}

impl std::fmt::Display for LinkKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LinkKind::Disc => "disc",
            LinkKind::Torus => "torus",
            LinkKind::Annulus => "annulus",
            LinkKind::Other => "other",
        };
        f.write_str(s)
    }
}

/// The link surface of one vertex class: one triangle per `(tet, vertex)`
/// incidence, classified by Euler characteristic and boundary circles.
#[derive(Clone, Debug)]
pub struct LinkSurface {
    pub class_id: usize,
    pub triangles: Vec<(usize, usize)>,
    pub kind: LinkKind,
    pub euler: i64,
    pub boundary_circles: usize,
    pub orientable: bool,
}

/// One directed free side of the boundary surface: the edge `from → to` of
/// the free face `face` of tetrahedron `tet`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SigmaSide {
    pub tet: usize,
    pub face: usize,
    pub from: usize,
    pub to: usize,
}

/// A gluing of two free sides of Σ.  The directed sides correspond: the
/// point at distance `m` from `a.from` is identified with the point at
/// distance `m` from `b.from`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SigmaEdge {
    pub a: SigmaSide,
    pub b: SigmaSide,
}

/// The triangulated boundary surface Σ assembled from the free faces.
#[derive(Clone, Debug)]
pub struct BoundarySurface {
    pub triangles: Vec<(usize, usize)>,
    pub edges: Vec<SigmaEdge>,
}

impl BoundarySurface {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

const SINGLE_JSON: &str = r#"{"format":"nz-tri-1","tetrahedra":1,"gluings":[]}"#;

const PGLUE_JSON: &str = r#"{"format":"nz-tri-1","tetrahedra":2,"gluings":[{"tet":0,"face":0,"to_tet":1,"to_face":0,"vertex_map":[0,2,1,3]}]}"#;

/// Two tetrahedra glued along two faces: the smallest complex with an
/// annulus link (one annulus, two discs).
const ANNULUS_JSON: &str = r#"{"format":"nz-tri-1","tetrahedra":2,"gluings":[{"tet":0,"face":0,"to_tet":1,"to_face":0,"vertex_map":[0,2,1,3]},{"tet":0,"face":1,"to_tet":1,"to_face":1,"vertex_map":[2,1,0,3]}]}"#;

/// Figure-eight knot complement: the standard two-tetrahedron decomposition,
/// recovered by exhaustive search over two-tetrahedron closed complexes (see
/// `fig8_search_provenance`) and frozen here.
const FIG8_JSON: &str = r#"{"format":"nz-tri-1","tetrahedra":2,"gluings":[{"tet":0,"face":0,"to_tet":1,"to_face":1,"vertex_map":[1,2,3,0]},{"tet":0,"face":1,"to_tet":1,"to_face":0,"vertex_map":[2,0,3,1]},{"tet":0,"face":2,"to_tet":1,"to_face":2,"vertex_map":[3,1,2,0]},{"tet":0,"face":3,"to_tet":1,"to_face":3,"vertex_map":[2,1,0,3]}]}"#;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_fixture_basics() {
        let tri = Triangulation::fixture("single").unwrap();
        assert_eq!(tri.tet_count(), 1);
        assert_eq!(tri.free_faces().len(), 4);
        assert!(!tri.is_closed());
        let edges = tri.edge_classes();
        assert_eq!(edges.classes.len(), 6);
        assert!(edges.classes.iter().all(|c| c.size() == 1 && !c.interior));
        assert_eq!(edges.total_size(), 6);
        let links = tri.vertex_links();
        assert_eq!(links.len(), 4);
        for link in &links {
            assert_eq!(link.kind, LinkKind::Disc);
            assert_eq!(link.triangles.len(), 1);
            assert_eq!(link.euler, 1);
            assert_eq!(link.boundary_circles, 1);
        }
        let sigma = tri.boundary_surface();
        assert_eq!(sigma.triangles.len(), 4);
        assert_eq!(sigma.edges.len(), 6);
    }

    #[test]
    fn pglue_fixture_counts() {
        let tri = Triangulation::fixture("pglue").unwrap();
        let edges = tri.edge_classes();
        assert_eq!(edges.total_size(), 12);
        let mut sizes: Vec<usize> = edges.classes.iter().map(|c| c.size()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 1, 1, 1, 1, 2, 2, 2]);
        assert!(edges.classes.iter().all(|c| !c.interior));
        let links = tri.vertex_links();
        assert_eq!(links.len(), 5);
        assert!(links.iter().all(|l| l.kind == LinkKind::Disc));
        let sigma = tri.boundary_surface();
        assert_eq!(sigma.triangles.len(), 6);
    }

    #[test]
    fn fig8_fixture_invariants() {
        let tri = Triangulation::fixture("fig8").unwrap();
        assert_eq!(tri.tet_count(), 2);
        assert!(tri.is_closed());
        let edges = tri.edge_classes();
        let mut sizes: Vec<usize> = edges.classes.iter().map(|c| c.size()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![6, 6]);
        assert!(edges.classes.iter().all(|c| c.interior));
        let links = tri.vertex_links();
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].kind, LinkKind::Torus);
        assert_eq!(links[0].triangles.len(), 8);
        assert!(tri.boundary_surface().is_empty());
        let (rank, torsion) = tri.first_homology();
        assert_eq!((rank, torsion), (1, vec![]));
    }

    #[test]
    fn annulus_fixture_links() {
        let tri = Triangulation::fixture("annulus").unwrap();
        let links = tri.vertex_links();
        let mut kinds: Vec<LinkKind> = links.iter().map(|l| l.kind).collect();
        kinds.sort_by_key(|k| format!("{k}"));
        assert_eq!(kinds, vec![LinkKind::Annulus, LinkKind::Disc, LinkKind::Disc]);
        let ann = links.iter().find(|l| l.kind == LinkKind::Annulus).unwrap();
        assert_eq!(ann.euler, 0);
        assert_eq!(ann.boundary_circles, 2);
        let sigma = tri.boundary_surface();
        assert_eq!(sigma.triangles.len(), 4);
    }

    #[test]
    fn json_round_trip() {
        for name in ["single", "pglue", "fig8", "annulus"] {
            let tri = Triangulation::fixture(name).unwrap();
            let text = tri.to_json();
            let again = Triangulation::parse(&text).unwrap();
            assert_eq!(tri, again);
            assert_eq!(text, again.to_json());
        }
    }

    #[test]
    fn parse_rejects_bad_documents() {
        let err = |text: &str| Triangulation::parse(text).unwrap_err();
        assert!(matches!(
            err(r#"{"format":"nz-tri-2","tetrahedra":1,"gluings":[]}"#),
            TriError::BadFormat(_)
        ));
        assert!(matches!(err("not json"), TriError::Malformed(_)));
        assert!(matches!(
            err(r#"{"format":"nz-tri-1","tetrahedra":0,"gluings":[]}"#),
            TriError::Malformed(_)
        ));
        // Self-gluing.
        assert!(matches!(
            err(r#"{"format":"nz-tri-1","tetrahedra":1,"gluings":[{"tet":0,"face":0,"to_tet":0,"to_face":0,"vertex_map":[0,2,1,3]}]}"#),
            TriError::SelfGluing(0, 0)
        ));
        // Even (orientation-preserving) vertex map.
        assert!(matches!(
            err(r#"{"format":"nz-tri-1","tetrahedra":2,"gluings":[{"tet":0,"face":0,"to_tet":1,"to_face":0,"vertex_map":[0,1,2,3]}]}"#),
            TriError::OrientationPreserving { .. }
        ));
        // Not a bijection.
        assert!(matches!(
            err(r#"{"format":"nz-tri-1","tetrahedra":2,"gluings":[{"tet":0,"face":0,"to_tet":1,"to_face":0,"vertex_map":[0,2,2,3]}]}"#),
            TriError::NotBijection(_)
        ));
        // vertex_map[face] must equal to_face.
        assert!(matches!(
            err(r#"{"format":"nz-tri-1","tetrahedra":2,"gluings":[{"tet":0,"face":0,"to_tet":1,"to_face":1,"vertex_map":[0,2,1,3]}]}"#),
            TriError::FaceImageMismatch { .. }
        ));
        // Face glued twice.
        assert!(matches!(
            err(r#"{"format":"nz-tri-1","tetrahedra":3,"gluings":[{"tet":0,"face":0,"to_tet":1,"to_face":0,"vertex_map":[0,2,1,3]},{"tet":0,"face":0,"to_tet":2,"to_face":0,"vertex_map":[0,2,1,3]}]}"#),
            TriError::GluedTwice(0, 0)
        ));
        // Out of range.
        assert!(matches!(
            err(r#"{"format":"nz-tri-1","tetrahedra":1,"gluings":[{"tet":0,"face":0,"to_tet":5,"to_face":0,"vertex_map":[0,2,1,3]}]}"#),
            TriError::IndexRange { .. }
        ));
    }

    #[test]
    fn explicit_inverse_listing_is_accepted() {
        let text = r#"{"format":"nz-tri-1","tetrahedra":2,"gluings":[{"tet":0,"face":0,"to_tet":1,"to_face":0,"vertex_map":[0,2,1,3]},{"tet":1,"face":0,"to_tet":0,"to_face":0,"vertex_map":[0,2,1,3]}]}"#;
        let tri = Triangulation::parse(text).unwrap();
        assert_eq!(tri, Triangulation::fixture("pglue").unwrap());
        // ... but an inconsistent double listing is rejected.
        let bad = r#"{"format":"nz-tri-1","tetrahedra":2,"gluings":[{"tet":0,"face":0,"to_tet":1,"to_face":0,"vertex_map":[0,2,1,3]},{"tet":1,"face":0,"to_tet":0,"to_face":0,"vertex_map":[0,3,2,1]}]}"#;
        assert!(matches!(
            Triangulation::parse(bad).unwrap_err(),
            TriError::GluedTwice(..)
        ));
    }

    #[test]
    fn edge_cycle_composition_is_identity_on_endpoints() {
        for name in ["fig8", "pglue", "single"] {
            let tri = Triangulation::fixture(name).unwrap();
            let edges = tri.edge_classes();
            for class in &edges.classes {
                if !class.interior {
                    continue;
                }
                // Composing the bijections around the cycle must return the
                // starting directed pair: the walk closes exactly at the
                // canonical start state.
                let mut state = class.reps[0];
                for _ in 0..class.size() {
                    state = tri.step_edge(state).expect("interior edge step");
                }
                assert_eq!(state, class.reps[0]);
            }
        }
    }

    #[test]
    fn canonical_start_is_least_directed_rep() {
        let tri = Triangulation::fixture("fig8").unwrap();
        let edges = tri.edge_classes();
        for class in &edges.classes {
            let first = (class.reps[0].tet, class.reps[0].i, class.reps[0].j);
            for r in &class.reps {
                assert!(first <= (r.tet, r.i, r.j));
                assert!(first <= (r.tet, r.j, r.i));
            }
        }
    }

    #[test]
    fn glued_link_sides_reverse_direction() {
        // Orientation canary: on every glued link side the face bijection
        // reverses the counterclockwise side direction, so all link
        // triangles are coherently oriented as written.
        for name in ["fig8", "pglue"] {
            let tri = Triangulation::fixture(name).unwrap();
            for t in 0..tri.tet_count() {
                for v in 0..4 {
                    for f in 0..4 {
                        if f == v {
                            continue;
                        }
                        let Some(g) = tri.gluing(t, f) else { continue };
                        let dir = side_direction(v, f);
                        let image = (g.map[dir.0], g.map[dir.1]);
                        let dir2 = side_direction(g.map[v], g.to_face(f));
                        assert_eq!(image, (dir2.1, dir2.0));
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_edges_glue_with_opposite_boundary_signs() {
        for name in ["single", "pglue"] {
            let tri = Triangulation::fixture(name).unwrap();
            let sigma = tri.boundary_surface();
            assert_eq!(sigma.edges.len() * 2, sigma.triangles.len() * 3);
            for e in &sigma.edges {
                let sa = boundary_sign(e.a.face, e.a.from, e.a.to);
                let sb = boundary_sign(e.b.face, e.b.from, e.b.to);
                assert_eq!(sa, -sb);
            }
        }
    }

    /// All two-tetrahedron closed complexes with every face of tetrahedron 0
    /// glued to a face of tetrahedron 1.
    fn all_two_tet_closed() -> Vec<Triangulation> {
        let perms4: Vec<[usize; 4]> = {
            let mut out = Vec::new();
            let mut p = [0usize, 1, 2, 3];
            heap_permutations(&mut p, 4, &mut out);
            out
        };
        let mut found = Vec::new();
        for sigma in &perms4 {
            // Choose an odd vertex map for each face pair independently.
            let choices: Vec<Vec<[usize; 4]>> = (0..4)
                .map(|f| {
                    perms4
                        .iter()
                        .copied()
                        .filter(|m| m[f] == sigma[f] && is_odd_permutation(m))
                        .collect()
                })
                .collect();
            assert!(choices.iter().all(|c| c.len() == 3));
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        for d in 0..3 {
                            let maps = [
                                choices[0][a],
                                choices[1][b],
                                choices[2][c],
                                choices[3][d],
                            ];
                            let matchings: Vec<Matching> = (0..4)
                                .map(|f| (0usize, f, 1usize, sigma[f], maps[f]))
                                .collect();
                            if let Ok(tri) = Triangulation::from_matchings(2, &matchings) {
                                found.push(tri);
                            }
                        }
                    }
                }
            }
        }
        found
    }

    fn heap_permutations(p: &mut [usize; 4], k: usize, out: &mut Vec<[usize; 4]>) {
        if k == 1 {
            out.push(*p);
            return;
        }
        for i in 0..k {
            heap_permutations(p, k - 1, out);
            if k.is_multiple_of(2) {
                p.swap(i, k - 1);
            } else {
                p.swap(0, k - 1);
            }
        }
    }

    #[test]
    fn fig8_search_provenance() {
        // The frozen fixture is recovered by exhaustive search over all
        // two-tetrahedron closed complexes: it is singled out by having two
        // interior edge classes of size 6, a single torus link, and first
        // homology Z (which separates the figure-eight complement from its
        // sibling census manifold with H₁ = Z ⊕ Z/5).
        let mut hits = Vec::new();
        for tri in all_two_tet_closed() {
            let edges = tri.edge_classes();
            let mut sizes: Vec<usize> = edges.classes.iter().map(|c| c.size()).collect();
            sizes.sort();
            if sizes != vec![6, 6] {
                continue;
            }
            let links = tri.vertex_links();
            if links.len() != 1 || links[0].kind != LinkKind::Torus {
                continue;
            }
            if tri.first_homology() != (1, vec![]) {
                continue;
            }
            hits.push(tri);
        }
        assert!(!hits.is_empty());
        let frozen = Triangulation::fixture("fig8").unwrap();
        assert!(hits.contains(&frozen));
    }

    proptest! {
        /// Random partial gluings with odd vertex maps: whenever validation
        /// succeeds, the global counting invariants hold.
        #[test]
        fn counting_invariants_on_random_complexes(
            n in 1usize..4,
            picks in proptest::collection::vec((0usize..4 * 3, 0usize..4 * 3, 0usize..24), 0..6),
        ) {
            let perms4: Vec<[usize; 4]> = {
                let mut out = Vec::new();
                let mut p = [0usize, 1, 2, 3];
                heap_permutations(&mut p, 4, &mut out);
                out
            };
            let mut used = std::collections::BTreeSet::new();
            let mut matchings: Vec<Matching> = Vec::new();
            for (a, b, pi) in picks {
                let (t1, f1) = (a / 4 % n, a % 4);
                let (t2, f2) = (b / 4 % n, b % 4);
                if (t1, f1) == (t2, f2) || used.contains(&(t1, f1)) || used.contains(&(t2, f2)) {
                    continue;
                }
                // Find an odd permutation sending f1 to f2.
                let map = perms4
                    .iter()
                    .copied()
                    .filter(|m| m[f1] == f2 && is_odd_permutation(m))
                    .nth(pi % 3)
                    .unwrap();
                used.insert((t1, f1));
                used.insert((t2, f2));
                matchings.push((t1, f1, t2, f2, map));
            }
            if let Ok(tri) = Triangulation::from_matchings(n, &matchings) {
                let edges = tri.edge_classes();
                prop_assert_eq!(edges.total_size(), 6 * n);
                let links = tri.vertex_links();
                let total_triangles: usize = links.iter().map(|l| l.triangles.len()).sum();
                prop_assert_eq!(total_triangles, 4 * n);
                let sigma = tri.boundary_surface();
                prop_assert_eq!(sigma.triangles.len(), tri.free_faces().len());
                prop_assert_eq!(sigma.edges.len() * 2, sigma.triangles.len() * 3);
                for link in &links {
                    prop_assert!(link.orientable);
                }
            }
        }
    }
}
