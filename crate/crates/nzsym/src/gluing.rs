//! Global assembly of the per-tetrahedron lattices over a triangulation.
//!
//! Gluing the tetrahedra identifies lattice points across matched faces. The
//! identification classes split into the *internal* set `I` (classes staying
//! in the interior of the complex: interior-face points in pairs, edge points
//! in one class per complex edge and level) and the boundary set `I_Σ`
//! (classes touching a free face). These drive the whole linear theory:
//!
//! * `F : Z^I → J²` maps a class to the sum of its members; dually `F*` and
//!   the global skew form `p = Ω²(·,·)` give the two exact-arithmetic
//!   complexes `Z^I → J → Z^I` (via `F′ = π∘F`, `G = F*∘p`) and
//!   `Z^I → J* → Z^I` whose middle homologies `𝓗(J)`, `𝓗(J*)` carry the
//!   induced symplectic forms.
//! * The face and edge gluing equations are exactly the rows of `F`
//!   transposed, read multiplicatively: `∏_{β∈α} z_β = 1`.
//! * The boundary classes index the surface module `J²_Σ` with its own form
//!   `Ω_Σ` (steps of the free faces) and the exponent relation
//!   `z^Σ_α · ∏_{β identified to α} z_β = 1`.
//!
//! All checks in [`GluedComplex::verify_complex`] are decided exactly over
//! the integers via Smith normal form.

use crate::homology::Homology;
use crate::intmat::IMat;
use crate::report::{CheckReport, Status};
use crate::tetra::{SkewModule, TetraLattice, Weights, FACE_STEPS, FACE_VERTICES};
use crate::triangulation::Triangulation;
use crate::uf::UnionFind;
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};
use std::collections::HashMap;

/// Where an identification class of lattice points sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    /// Interior point of a face (one zero weight).
    Face,
    /// Point on an edge of the complex (two zero weights): the edge-class id
    /// and the level `m` = weight at the source vertex of the canonical
    /// orbit direction (the "m-th point counting from the target vertex").
    Edge { class: usize, m: i64 },
}

/// One identification class of lattice points of the glued complex.
#[derive(Clone, Debug)]
pub struct PointClass {
    /// Members as `(tetrahedron, weight quadruple)`, in global point order.
    pub members: Vec<(usize, Weights)>,
    pub kind: ClassKind,
    /// Does the class stay in the interior of the complex (no member on a
    /// free face)?
    pub internal: bool,
    /// Row/column label: `face:{k}`, `edge:{c}/m={m}` or `sigma:{k}`.
    pub label: String,
}

impl PointClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// One multiplicative relation `∏ z_β^{exp} = 1` over the global points.
#[derive(Clone, Debug)]
pub struct EqRow {
    pub label: String,
    /// Sparse exponents as `(global point index, exponent)`, ascending.
    pub exponents: Vec<(usize, i64)>,
    pub rhs: i64,
}

/// The face/edge gluing equations as an integer exponent system.
#[derive(Clone, Debug)]
pub struct ExponentSystem {
    /// Point ids of all global variables, in global order.
    pub variables: Vec<String>,
    pub rows: Vec<EqRow>,
}

impl ExponentSystem {
    /// Dense exponent matrix, one row per equation.
    pub fn row_matrix(&self) -> IMat {
        let mut m = IMat::zeros(self.rows.len(), self.variables.len());
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, e) in &row.exponents {
                m.add_i64(r, c, e);
            }
        }
        m
    }

    /// Builds the JSON value
    /// `{"variables":[...],"rows":[{"label":...,"exponents":{id:exp},"rhs":1}]}`.
    pub fn to_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut exps = Map::new();
                for &(c, e) in &row.exponents {
                    exps.insert(self.variables[c].clone(), json!(e));
                }
                json!({"label": row.label, "exponents": Value::Object(exps), "rhs": row.rhs})
            })
            .collect();
        json!({"variables": self.variables, "rows": rows})
    }

    /// Serializes [`ExponentSystem::to_value`] as a string.
    pub fn to_json(&self, pretty: bool) -> String {
        let doc = self.to_value();
        if pretty {
            serde_json::to_string_pretty(&doc).expect("serializable")
        } else {
            serde_json::to_string(&doc).expect("serializable")
        }
    }
}

/// The boundary-surface module: the form `Ω_Σ` on `Z^{I_Σ}` with its derived
/// lattices, and the exponent relation tying `z^Σ` to the global `z`.
pub struct SigmaData {
    /// Skew module of `Ω_Σ` (so `dim J_Σ = module.dim`, `J*_Σ = module.image`).
    pub module: SkewModule,
    /// Rows = boundary classes `α`, columns = global points: the indicator
    /// of "β identified to α", so that `z^Σ_α · ∏_β z_β^{R_{αβ}} = 1`.
    pub relation: IMat,
}

impl SigmaData {
    /// Dimension of `J_Σ = J²_Σ / ker(Ω_Σ)`.
    pub fn dim_j_sigma(&self) -> usize {
        self.module.dim
    }
}

/// Exact verification report for the global complex identities.
#[derive(Clone, Debug)]
pub struct ComplexReport {
    pub n: i64,
    /// Total number of global lattice points.
    pub points: usize,
    pub face_classes: usize,
    pub edge_classes: usize,
    pub sigma_classes: usize,
    /// `F*∘p∘F = 0` holds exactly.
    pub fpf_is_zero: bool,
    /// `Ker(G) = Im(F′)^⊥Ω` as (saturated) lattices.
    pub ortho_holds: bool,
    pub rank_f: usize,
    pub rank_fprime: usize,
    pub rank_g: usize,
    pub dim_j: usize,
    /// Free rank of `𝓗(J) = Ker(G)/Im(F′)`.
    pub dim_hj: usize,
    /// Torsion divisors of `𝓗(J)` (diagnostic; the dimension formula is
    /// about the free part).
    pub hj_torsion: Vec<BigInt>,
    pub dim_hj_star: usize,
    /// `⟨G(u), e_α⟩ = Ω²(F(e_α), ũ)` for every basis pair and shifted lifts.
    pub duality_holds: bool,
    /// The form induced on `𝓗(J)` is unchanged under representative shifts.
    pub induced_form_well_defined: bool,
    /// Names of failed identities (empty iff the report passes).
    pub failed: Vec<String>,
}

impl ComplexReport {
    pub fn pass(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn report(&self) -> CheckReport {
        CheckReport::new(
            "complex-identities",
            self.n,
            Status::from_bool(self.pass()),
            json!({
                "points": self.points,
                "face_classes": self.face_classes,
                "edge_classes": self.edge_classes,
                "sigma_classes": self.sigma_classes,
                "fpf_is_zero": self.fpf_is_zero,
                "ortho_holds": self.ortho_holds,
                "rank_f": self.rank_f,
                "rank_fprime": self.rank_fprime,
                "rank_g": self.rank_g,
                "dim_j": self.dim_j,
                "dim_hj": self.dim_hj,
                "hj_torsion": self.hj_torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "dim_hj_star": self.dim_hj_star,
                "duality_holds": self.duality_holds,
                "induced_form_well_defined": self.induced_form_well_defined,
                "failures": self.failed,
            }),
        )
    }
}

/// A triangulation with its degree-`n` lattice machinery assembled.
pub struct GluedComplex {
    pub tri: Triangulation,
    pub n: i64,
    /// The per-tetrahedron lattice (identical for every tetrahedron).
    pub lattice: TetraLattice,
    /// Global skew module: `J² = ⊕_μ Z^{I_T}` with the block form `Ω²`.
    pub module: SkewModule,
    /// Internal classes `I`: face classes first (by least member), then edge
    /// classes ordered by `(edge class, level)`.
    pub internal: Vec<PointClass>,
    /// Boundary classes `I_Σ`, ordered by least member.
    pub sigma_points: Vec<PointClass>,
    f: IMat,
    fprime: IMat,
    g: IMat,
}

impl GluedComplex {
    /// Assembles the global machinery for a validated triangulation.
    pub fn new(tri: &Triangulation, n: i64) -> GluedComplex {
        let lattice = TetraLattice::new(n);
        let per = lattice.len();
        let tets = tri.tet_count();
        let total = per * tets;

        // Global block-diagonal form and its derived module.
        let eps = lattice.epsilon_matrix();
        let mut form = IMat::zeros(total, total);
        for t in 0..tets {
            for i in 0..per {
                for j in 0..per {
                    let v = eps.get(i, j);
                    if !v.is_zero() {
                        form.add_at(t * per + i, t * per + j, v);
                    }
                }
            }
        }
        let module = SkewModule::from_form(form);

        // Identify points across matched faces: a point with weight 0 at the
        // glued face transports by q[map[v]] = p[v].
        let mut uf = UnionFind::new(total);
        for tet in 0..tets {
            for face in 0..4 {
                let Some(g) = tri.gluing(tet, face) else { continue };
                for (li, p) in lattice.points.iter().enumerate() {
                    if p[face] != 0 {
                        continue;
                    }
                    let mut q = [0i64; 4];
                    for v in 0..4 {
                        q[g.map[v]] = p[v];
                    }
                    let qi = lattice.index_of(q).expect("transported point is a lattice point");
                    uf.union(tet * per + li, g.to_tet * per + qi);
                }
            }
        }

        let edge_classes = tri.edge_classes();
        let on_free_face = |tet: usize, w: Weights| {
            (0..4).any(|f| w[f] == 0 && tri.gluing(tet, f).is_none())
        };

        let mut face_classes: Vec<PointClass> = Vec::new();
        let mut edge_point_classes: Vec<((usize, i64), PointClass)> = Vec::new();
        let mut sigma_points: Vec<PointClass> = Vec::new();
        for ids in uf.classes() {
            let members: Vec<(usize, Weights)> =
                ids.iter().map(|&gi| (gi / per, lattice.points[gi % per])).collect();
            let (t0, w0) = members[0];
            let zeros = w0.iter().filter(|&&x| x == 0).count();
            let kind = if zeros == 1 {
                ClassKind::Face
            } else {
                let nz: Vec<usize> = (0..4).filter(|&v| w0[v] != 0).collect();
                let (i, j) = (nz[0], nz[1]);
                let (class, _, forward) = edge_classes.lookup(t0, i, j);
                let m = if forward { w0[i] } else { w0[j] };
                ClassKind::Edge { class, m }
            };
            // Level and edge class must agree across all members (the orbit
            // transport preserves both); spot-check the invariant.
            if let ClassKind::Edge { class, m } = kind {
                for &(t, w) in &members {
                    let nz: Vec<usize> = (0..4).filter(|&v| w[v] != 0).collect();
                    let (c2, _, fwd) = edge_classes.lookup(t, nz[0], nz[1]);
                    let m2 = if fwd { w[nz[0]] } else { w[nz[1]] };
                    debug_assert_eq!((c2, m2), (class, m), "inconsistent edge class transport");
                }
            }
            let internal = !members.iter().any(|&(t, w)| on_free_face(t, w));
            let class = PointClass { members, kind, internal, label: String::new() };
            if !internal {
                sigma_points.push(class);
            } else {
                match kind {
                    ClassKind::Face => face_classes.push(class),
                    ClassKind::Edge { class: c, m } => edge_point_classes.push(((c, m), class)),
                }
            }
        }
        edge_point_classes.sort_by_key(|(key, _)| *key);

        let mut internal = Vec::new();
        for (idx, mut c) in face_classes.into_iter().enumerate() {
            c.label = format!("face:{idx}");
            internal.push(c);
        }
        for ((ec, m), mut c) in edge_point_classes {
            c.label = format!("edge:{ec}/m={m}");
            internal.push(c);
        }
        for (idx, c) in sigma_points.iter_mut().enumerate() {
            c.label = format!("sigma:{idx}");
        }

        // F: one indicator column per internal class.
        let mut f = IMat::zeros(total, internal.len());
        for (col, class) in internal.iter().enumerate() {
            for &(t, w) in &class.members {
                let li = lattice.index_of(w).expect("member is a lattice point");
                f.add_i64(t * per + li, col, 1);
            }
        }
        let fprime = module.proj.mul(&f);
        let g = f.transpose().mul(&module.form).mul(&module.sect);

        GluedComplex {
            tri: tri.clone(),
            n,
            lattice,
            module,
            internal,
            sigma_points,
            f,
            fprime,
            g,
        }
    }

    /// Number of global lattice points (`ν · 2(n²−1)`).
    pub fn point_count(&self) -> usize {
        self.tri.tet_count() * self.lattice.len()
    }

    /// Global index of a point given by tetrahedron and weights.
    pub fn global_index(&self, tet: usize, w: Weights) -> Option<usize> {
        let li = self.lattice.index_of(w)?;
        (tet < self.tri.tet_count()).then_some(tet * self.lattice.len() + li)
    }

    /// `(tetrahedron, weights)` of a global point index.
    pub fn point_of(&self, idx: usize) -> (usize, Weights) {
        let per = self.lattice.len();
        (idx / per, self.lattice.points[idx % per])
    }

    /// Stable textual id of a global point: `T{tet}:{a0},{a1},{a2},{a3}`.
    pub fn point_id(&self, idx: usize) -> String {
        let (t, w) = self.point_of(idx);
        format!("T{}:{},{},{},{}", t, w[0], w[1], w[2], w[3])
    }

    /// `F : Z^I → J²`, the indicator of class membership.
    pub fn f_matrix(&self) -> &IMat {
        &self.f
    }

    /// `F′ = π∘F : Z^I → J` in quotient coordinates.
    pub fn f_prime(&self) -> &IMat {
        &self.fprime
    }

    /// `G : J → Z^I`, the map induced by `F*∘p` on the quotient.
    pub fn g_matrix(&self) -> &IMat {
        &self.g
    }

    /// `G* = p∘F : Z^I → J² ` (values lie in the image lattice `J*`).
    pub fn g_star(&self) -> IMat {
        self.module.form.mul(&self.f)
    }

    /// `𝓗(J) = Ker(G)/Im(F′)` with exact SNF bookkeeping.
    pub fn homology_j(&self) -> Homology {
        Homology::new(&self.g, &self.fprime)
    }

    /// `𝓗(J*) = Ker((F′)*)/Im(G*)` in coordinates of the image lattice `J*`.
    pub fn homology_j_star(&self) -> Homology {
        let b = &self.module.image;
        let d1 = self.f.transpose().mul(b);
        let gstar = self.g_star();
        let mut d2 = IMat::zeros(b.cols(), gstar.cols());
        for c in 0..gstar.cols() {
            let x = b.solve(&gstar.col(c)).expect("p∘F lands in the image lattice");
            for r in 0..b.cols() {
                d2.set(r, c, x.get(r, 0).clone());
            }
        }
        Homology::new(&d1, &d2)
    }

    /// Gram matrix of the induced form on the free part of `𝓗(J)`,
    /// evaluated on the stored free generator cycles.
    pub fn induced_form_j(&self, h: &Homology) -> IMat {
        let k = h.free_rank;
        let mut gram = IMat::zeros(k, k);
        let gens: Vec<IMat> = (0..k).map(|i| h.free_generator_cycle(i)).collect();
        for i in 0..k {
            for j in 0..k {
                let v = gens[i].transpose().mul(&self.module.omega).mul(&gens[j]);
                gram.set(i, j, v.get(0, 0).clone());
            }
        }
        gram
    }

    /// Gram matrix of `Ω*` on the free part of `𝓗(J*)` (coordinates of the
    /// image-lattice basis).
    pub fn induced_form_j_star(&self, h: &Homology) -> IMat {
        let b = &self.module.image;
        let k = h.free_rank;
        let mut gram = IMat::zeros(k, k);
        let gens: Vec<IMat> = (0..k).map(|i| b.mul(&h.free_generator_cycle(i))).collect();
        for i in 0..k {
            for j in 0..k {
                gram.set(i, j, self.module.omega_star(&gens[i], &gens[j]));
            }
        }
        gram
    }

    /// The face and edge gluing equations: one row per face class
    /// (`z_α z_α′ = 1`) and per edge class and level (`∏_γ z = 1`).
    pub fn equations(&self) -> ExponentSystem {
        let variables = (0..self.point_count()).map(|i| self.point_id(i)).collect();
        let rows = self
            .internal
            .iter()
            .map(|class| {
                let exponents = class
                    .members
                    .iter()
                    .map(|&(t, w)| (self.global_index(t, w).unwrap(), 1))
                    .collect();
                EqRow { label: class.label.clone(), exponents, rhs: 1 }
            })
            .collect();
        ExponentSystem { variables, rows }
    }

    /// The boundary-surface machinery: `Ω_Σ` on the boundary classes and the
    /// relation `z^Σ_α ∏_β z_β = 1`.  Empty (zero-dimensional) when the
    /// complex is closed.
    pub fn sigma(&self) -> SigmaData {
        let k = self.sigma_points.len();
        let mut class_of: HashMap<usize, usize> = HashMap::new();
        for (ci, class) in self.sigma_points.iter().enumerate() {
            for &(t, w) in &class.members {
                class_of.insert(self.global_index(t, w).unwrap(), ci);
            }
        }
        // Ω_Σ: the step form of each free face, transported to the classes.
        // Steps along glued boundary edges are produced by both adjacent
        // free faces with opposite directions and cancel, exactly as in the
        // single-tetrahedron form.
        let mut form = IMat::zeros(k, k);
        for tet in 0..self.tri.tet_count() {
            for face in 0..4 {
                if self.tri.gluing(tet, face).is_some() {
                    continue;
                }
                let [i, j, kk] = FACE_VERTICES[face];
                for p in &self.lattice.points {
                    if p[face] != 0 {
                        continue;
                    }
                    let bc = [p[i], p[j], p[kk]];
                    for d in FACE_STEPS {
                        let q = [bc[0] + d[0], bc[1] + d[1], bc[2] + d[2]];
                        if q.iter().any(|&x| x < 0 || x >= self.n) {
                            continue;
                        }
                        let mut qw = [0i64; 4];
                        qw[i] = q[0];
                        qw[j] = q[1];
                        qw[kk] = q[2];
                        let a = class_of[&self.global_index(tet, *p).unwrap()];
                        let b = class_of[&self.global_index(tet, qw).unwrap()];
                        form.add_i64(a, b, 1);
                        form.add_i64(b, a, -1);
                    }
                }
            }
        }
        let mut relation = IMat::zeros(k, self.point_count());
        for (ci, class) in self.sigma_points.iter().enumerate() {
            for &(t, w) in &class.members {
                relation.add_i64(ci, self.global_index(t, w).unwrap(), 1);
            }
        }
        SigmaData { module: SkewModule::from_form(form), relation }
    }

    /// Runs every exact identity of the linearized gluing theory and
    /// reports the ranks and homology dimensions.
    pub fn verify_complex(&self) -> ComplexReport {
        let mut failed = Vec::new();

        // F*∘p∘F = 0, exactly.
        let fpf = self.f.transpose().mul(&self.module.form).mul(&self.f);
        let fpf_is_zero = fpf.is_zero();
        if !fpf_is_zero {
            let col = (0..fpf.cols())
                .find(|&c| !(0..fpf.rows()).all(|r| fpf.get(r, c).is_zero()))
                .unwrap();
            failed.push(format!("F*pF(e_{}) != 0", self.internal[col].label));
        }

        // Ker(G) = Im(F′)^⊥Ω as lattices (both sides are kernels, hence
        // saturated; equality is then genuine lattice equality).
        let ker_g = self.g.kernel_basis();
        let perp = self.fprime.transpose().mul(&self.module.omega).kernel_basis();
        let ortho_holds = ker_g.lattice_equal(&perp);
        if !ortho_holds {
            failed.push("Ker(G) != Im(F')^perp".into());
        }

        let hj = self.homology_j();
        let hj_star = self.homology_j_star();
        if hj.free_rank != hj_star.free_rank {
            failed.push("dim H(J) != dim H(J*)".into());
        }

        // ⟨G(u), e_α⟩ = Ω²(F(e_α), ũ) for every basis pair, with the lift ũ
        // shifted by kernel vectors to exercise lift independence.
        let mut duality_holds = true;
        let dim_j = self.module.dim;
        'outer: for u in 0..dim_j {
            let mut lift = self.module.sect.col(u);
            if self.module.kernel.cols() > 0 {
                let shift = self.module.kernel.col(u % self.module.kernel.cols());
                lift = lift.add(&shift);
            }
            let paired = self.f.transpose().mul(&self.module.form).mul(&lift);
            for alpha in 0..self.internal.len() {
                if self.g.get(alpha, u) != paired.get(alpha, 0) {
                    duality_holds = false;
                    failed.push(format!(
                        "<G(u_{u}), e_{}> != Omega2(F(e), lift)",
                        self.internal[alpha].label
                    ));
                    break 'outer;
                }
            }
        }

        // Induced form well-definedness: shifting a Ker(G) representative by
        // Im(F′) leaves all pairings with Ker(G) unchanged.
        let mut induced_ok = true;
        if self.fprime.cols() > 0 && ker_g.cols() > 0 {
            for a in 0..ker_g.cols() {
                let x = IMat::col_from(
                    &(0..self.fprime.cols()).map(|i| ((a + i) % 3) as i64 - 1).collect::<Vec<_>>(),
                );
                let shifted = ker_g.col(a).add(&self.fprime.mul(&x));
                for b in 0..ker_g.cols() {
                    let before = ker_g.col(a).transpose().mul(&self.module.omega).mul(&ker_g.col(b));
                    let after = shifted.transpose().mul(&self.module.omega).mul(&ker_g.col(b));
                    if before != after {
                        induced_ok = false;
                        failed.push("induced form changed under representative shift".into());
                        break;
                    }
                }
                if !induced_ok {
                    break;
                }
            }
        }

        let (mut face_classes, mut edge_classes) = (0, 0);
        for c in &self.internal {
            match c.kind {
                ClassKind::Face => face_classes += 1,
                ClassKind::Edge { .. } => edge_classes += 1,
            }
        }

        ComplexReport {
            n: self.n,
            points: self.point_count(),
            face_classes,
            edge_classes,
            sigma_classes: self.sigma_points.len(),
            fpf_is_zero,
            ortho_holds,
            rank_f: self.f.rank(),
            rank_fprime: self.fprime.rank(),
            rank_g: self.g.rank(),
            dim_j,
            dim_hj: hj.free_rank,
            hj_torsion: hj.torsion.clone(),
            dim_hj_star: hj_star.free_rank,
            duality_holds,
            induced_form_well_defined: induced_ok,
            failed,
        }
    }

    /// CSV of `F` with point-id rows and class-label columns.
    pub fn csv_f(&self) -> String {
        let mut out = String::from("point");
        for c in &self.internal {
            out.push(',');
            out.push_str(&c.label);
        }
        out.push('\n');
        for i in 0..self.point_count() {
            out.push_str(&self.point_id(i));
            for j in 0..self.f.cols() {
                out.push(',');
                out.push_str(&self.f.get(i, j).to_string());
            }
            out.push('\n');
        }
        out
    }

    /// CSV of `G` with class-label rows and quotient-coordinate columns.
    pub fn csv_g(&self) -> String {
        let mut out = String::from("class");
        for j in 0..self.module.dim {
            out.push_str(&format!(",x{j}"));
        }
        out.push('\n');
        for (i, c) in self.internal.iter().enumerate() {
            out.push_str(&c.label);
            for j in 0..self.g.cols() {
                out.push(',');
                out.push_str(&self.g.get(i, j).to_string());
            }
            out.push('\n');
        }
        out
    }
}
