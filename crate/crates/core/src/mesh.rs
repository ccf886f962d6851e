//! Mesh categories of `ZA_n` and their orbit categories.
//!
//! Vertices of `ZA_n` are pairs `(m, i)` with `1 <= i <= n`; arrows go
//! `(m, i) -> (m, i+1)` and `(m, i+1) -> (m+1, i)`, and `τ(m, i) = (m-1, i)`.
//! The mesh ending at `w = (m, i)` starts at `τw` and passes through
//! `(m-1, i+1)` (sign `+1`) and `(m, i-1)` (sign `-1`).
//!
//! Hom spaces of the mesh category are computed from a fixed source `x` one
//! vertex at a time: for `w != x` every path into `w` ends in an arrow
//! `e -> w`, and the relations ending at `w` are generated by those ending at
//! the predecessors together with the mesh at `w`, so
//!
//! ```text
//! Hom(x, w) = (⊕_e Hom(x, e)) / image of Hom(x, τw) under the mesh map.
//! ```
//!
//! Basis vectors are residual paths, chosen greedily in lexicographic order
//! of their level sequences.
//!
//! The orbit category by an automorphism `φ = τ^a Σ^b` (Σ the suspension of
//! `D^b(kA_n)`, acting as the glide `(m, i) ↦ (m+i, n+1-i)`) has one object
//! per φ-orbit and `Hom(X, Y) = ⊕_k Hom(x, φ^k y)`. With `a = -1, b = 1` this
//! is the cluster category of type `A_n`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::category::{
    CategoryError, CategoryPresentation, CompositionEntry, Generators, MorphismMatrix, ObjectExpr,
    ObjectId, PresentationData, TrianglePresentation, Violation,
};
use crate::linalg::{Matrix, Scalar, Subspace};

/// A vertex `(m, level)` of `ZA_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub m: i64,
    pub level: i64,
}

impl Vertex {
    pub fn new(m: i64, level: i64) -> Self {
        Vertex { m, level }
    }

    /// Horizontal coordinate; every arrow increases it by one.
    pub fn x(&self) -> i64 {
        2 * self.m + self.level
    }
}

/// The identifying automorphism `φ = τ^tau_power ∘ Σ^shift_power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Identification {
    pub tau_power: i64,
    pub shift_power: i64,
}

impl Identification {
    /// `τ^{-1} Σ`, the identification giving the cluster category.
    pub const CLUSTER: Identification = Identification {
        tau_power: -1,
        shift_power: 1,
    };

    fn inverse(self) -> Self {
        Identification {
            tau_power: -self.tau_power,
            shift_power: -self.shift_power,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationQuiverSpec {
    /// `n` in `ZA_n`.
    pub rank: usize,
    pub identification: Identification,
    /// τ-steps searched for vanishing hom spaces; defaults to four times the
    /// number of orbit vertices.
    pub window: Option<usize>,
}

impl TranslationQuiverSpec {
    pub fn cluster(n: usize) -> Self {
        TranslationQuiverSpec {
            rank: n,
            identification: Identification::CLUSTER,
            window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeshError {
    #[error("rank must be at least 1")]
    EmptyQuiver,
    #[error("the identification does not move the quiver; the orbit quiver is infinite")]
    InfiniteOrbitQuiver,
    #[error("Hom({object}, -) does not vanish within {window} τ-steps")]
    WindowOverflow { object: String, window: usize },
    #[error("Hom({object}, S{object}) has dimension {dim}; no almost split triangle")]
    MissingConnectingMorphism { object: String, dim: usize },
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("built presentation is invalid: {0:?}")]
    Invalid(Vec<Violation>),
}

/// The translation quiver `ZA_n` with its automorphisms.
#[derive(Clone, Copy, Debug)]
pub struct ZQuiver {
    n: i64,
}

impl ZQuiver {
    pub fn new(n: usize) -> Self {
        ZQuiver { n: n as i64 }
    }

    pub fn rank(&self) -> usize {
        self.n as usize
    }

    pub fn tau(&self, v: Vertex, k: i64) -> Vertex {
        Vertex::new(v.m - k, v.level)
    }

    /// The suspension of `D^b(kA_n)` on the covering.
    pub fn shift(&self, v: Vertex) -> Vertex {
        Vertex::new(v.m + v.level, self.n + 1 - v.level)
    }

    pub fn shift_inverse(&self, v: Vertex) -> Vertex {
        let level = self.n + 1 - v.level;
        Vertex::new(v.m - level, level)
    }

    pub fn shift_pow(&self, mut v: Vertex, k: i64) -> Vertex {
        for _ in 0..k.abs() {
            v = if k > 0 { self.shift(v) } else { self.shift_inverse(v) };
        }
        v
    }

    pub fn apply(&self, phi: Identification, v: Vertex) -> Vertex {
        self.tau(self.shift_pow(v, phi.shift_power), phi.tau_power)
    }

    pub fn apply_pow(&self, phi: Identification, mut v: Vertex, k: i64) -> Vertex {
        let step = if k >= 0 { phi } else { phi.inverse() };
        for _ in 0..k.abs() {
            v = self.apply(step, v);
        }
        v
    }

    /// Horizontal displacement of φ.
    pub fn displacement(&self, phi: Identification) -> i64 {
        -2 * phi.tau_power + phi.shift_power * (self.n + 1)
    }

    /// Predecessors of `w` with their mesh signs.
    pub fn predecessors(&self, w: Vertex) -> Vec<(Vertex, i64)> {
        let mut out = Vec::with_capacity(2);
        if w.level < self.n {
            out.push((Vertex::new(w.m - 1, w.level + 1), 1));
        }
        if w.level > 1 {
            out.push((Vertex::new(w.m, w.level - 1), -1));
        }
        out
    }

    pub fn successors(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(2);
        if v.level < self.n {
            out.push(Vertex::new(v.m, v.level + 1));
        }
        if v.level > 1 {
            out.push(Vertex::new(v.m + 1, v.level - 1));
        }
        out
    }

    fn vertices_at(&self, x: i64) -> impl Iterator<Item = Vertex> + '_ {
        (1..=self.n)
            .filter(move |i| (x - i).rem_euclid(2) == 0)
            .map(move |i| Vertex::new((x - i).div_euclid(2), i))
    }
}

#[derive(Clone, Debug)]
struct VertexHom {
    /// Residual paths forming the basis of `Hom(source, w)`.
    basis: Vec<Vec<Vertex>>,
    /// For each predecessor `e`, the map `Hom(source, e) -> Hom(source, w)`
    /// induced by the arrow `e -> w`.
    arrows: Vec<(Vertex, Matrix)>,
}

impl VertexHom {
    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn arrow_from(&self, e: Vertex) -> Option<&Matrix> {
        self.arrows.iter().find(|(v, _)| *v == e).map(|(_, m)| m)
    }
}

/// `Hom(source, -)` on the covering, as far as it is nonzero.
#[derive(Clone, Debug)]
pub struct MeshHomTable {
    source: Vertex,
    entries: BTreeMap<Vertex, VertexHom>,
    /// Every vertex with `m >= horizon` has zero hom space.
    horizon: i64,
}

impl MeshHomTable {
    /// Computes `Hom(source, -)`, failing if it has not vanished on a whole
    /// τ-slice within `window` steps.
    pub fn compute(q: &ZQuiver, source: Vertex, window: usize) -> Option<MeshHomTable> {
        let mut table = MeshHomTable {
            source,
            entries: BTreeMap::new(),
            horizon: i64::MAX,
        };
        let last_m = source.m + window as i64;
        let mut xc = source.x();
        loop {
            for w in q.vertices_at(xc).collect::<Vec<_>>() {
                let entry = table.vertex_hom(q, w);
                if entry.dim() > 0 {
                    table.entries.insert(w, entry);
                }
            }
            // The slice m is complete once x reaches 2m + n.
            if (xc - q.n).rem_euclid(2) == 0 {
                let m = (xc - q.n).div_euclid(2);
                if m > source.m && (1..=q.n).all(|i| !table.entries.contains_key(&Vertex::new(m, i))) {
                    table.horizon = m;
                    return Some(table);
                }
                if m >= last_m {
                    return None;
                }
            }
            xc += 1;
        }
    }

    pub fn source(&self) -> Vertex {
        self.source
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    pub fn dim(&self, w: Vertex) -> usize {
        self.entries.get(&w).map_or(0, VertexHom::dim)
    }

    pub fn basis(&self, w: Vertex) -> &[Vec<Vertex>] {
        self.entries.get(&w).map_or(&[], |e| &e.basis)
    }

    /// Vertices with nonzero hom space, in order.
    pub fn support(&self) -> impl Iterator<Item = (Vertex, usize)> + '_ {
        self.entries.iter().map(|(v, e)| (*v, e.dim()))
    }

    /// Post-composes a class in `Hom(source, path[0])` with the path.
    pub fn push(&self, class: Vec<Scalar>, path: &[Vertex]) -> Vec<Scalar> {
        let mut v = class;
        for pair in path.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let Some(entry) = self.entries.get(&b) else {
                return Vec::new();
            };
            v = match entry.arrow_from(a) {
                Some(m) if m.cols() == v.len() => m.mul_vec(&v).expect("shape"),
                _ => vec![Scalar::zero(); entry.dim()],
            };
        }
        v
    }

    fn vertex_hom(&self, q: &ZQuiver, w: Vertex) -> VertexHom {
        if w == self.source {
            return VertexHom {
                basis: vec![vec![w]],
                arrows: Vec::new(),
            };
        }
        let preds = q.predecessors(w);
        let mut offsets = Vec::with_capacity(preds.len());
        let mut total = 0;
        for (e, _) in &preds {
            offsets.push(total);
            total += self.dim(*e);
        }
        if total == 0 {
            return VertexHom {
                basis: Vec::new(),
                arrows: Vec::new(),
            };
        }

        // Image of Hom(source, τw) under u ↦ (ε_e · (τw→e) ∘ u)_e.
        let tw = q.tau(w, 1);
        let mut relations = Vec::new();
        for u in 0..self.dim(tw) {
            let mut col = vec![Scalar::zero(); total];
            for ((e, sign), &off) in preds.iter().zip(&offsets) {
                let Some(a) = self.entries.get(e).and_then(|h| h.arrow_from(tw)) else {
                    continue;
                };
                for r in 0..a.rows() {
                    col[off + r] = &a[(r, u)] * Scalar::from_integer((*sign).into());
                }
            }
            relations.push(col);
        }

        // Candidate residual paths b·(e→w), one per coordinate of ⊕_e Hom(source, e).
        let mut candidates: Vec<(Vec<Vertex>, usize)> = Vec::with_capacity(total);
        for ((e, _), &off) in preds.iter().zip(&offsets) {
            for (b, path) in self.basis(*e).iter().enumerate() {
                let mut p = path.clone();
                p.push(w);
                candidates.push((p, off + b));
            }
        }
        candidates.sort_by_key(|(p, _)| p.iter().map(|v| v.level).collect::<Vec<_>>());

        let unit = |c: usize| {
            let mut v = vec![Scalar::zero(); total];
            v[c] = Scalar::one();
            v
        };
        let mut span = Subspace::span(total, relations.clone()).expect("length total");
        let mut chosen: Vec<(Vec<Vertex>, usize)> = Vec::new();
        for (path, coord) in candidates {
            let u = unit(coord);
            if !span.contains_vector(&u).expect("length total") {
                span = span
                    .sum(&Subspace::span(total, vec![u]).expect("length total"))
                    .expect("same ambient");
                chosen.push((path, coord));
            }
        }

        // Coordinates of each unit vector modulo the relations.
        let dim = chosen.len();
        let mut system_cols: Vec<Vec<Scalar>> = chosen.iter().map(|(_, c)| unit(*c)).collect();
        system_cols.extend(relations);
        let system = Matrix::from_columns(total, &system_cols).expect("length total");
        let mut arrows = Vec::with_capacity(preds.len());
        for ((e, _), &off) in preds.iter().zip(&offsets) {
            let de = self.dim(*e);
            let mut m = Matrix::zeros(dim, de);
            for b in 0..de {
                let y = system
                    .solve(&unit(off + b))
                    .expect("length total")
                    .expect("chosen paths and relations span everything");
                for r in 0..dim {
                    m[(r, b)] = y[r].clone();
                }
            }
            arrows.push((*e, m));
        }
        VertexHom {
            basis: chosen.into_iter().map(|(p, _)| p).collect(),
            arrows,
        }
    }
}

#[derive(Clone, Debug)]
struct Component {
    k: i64,
    target: Vertex,
    offset: usize,
    dim: usize,
}

/// An orbit category of the mesh category of `ZA_n`, with the data needed
/// to translate covering paths into morphisms of the presentation.
#[derive(Clone, Debug)]
pub struct MeshCategory {
    quiver: ZQuiver,
    phi: Identification,
    displacement: i64,
    reps: Vec<Vertex>,
    tables: Vec<MeshHomTable>,
    /// `components[x][y]`: nonzero summands `Hom(rep x, φ^k rep y)`.
    components: Vec<Vec<Vec<Component>>>,
    presentation: CategoryPresentation,
}

impl MeshCategory {
    pub fn build(spec: &TranslationQuiverSpec) -> Result<MeshCategory, MeshError> {
        if spec.rank == 0 {
            return Err(MeshError::EmptyQuiver);
        }
        let quiver = ZQuiver::new(spec.rank);
        let mut phi = spec.identification;
        let mut displacement = quiver.displacement(phi);
        if displacement == 0 {
            return Err(MeshError::InfiniteOrbitQuiver);
        }
        if displacement < 0 {
            phi = phi.inverse();
            displacement = -displacement;
        }

        // Fundamental domain: 1 <= x < 1 + displacement.
        let reps: Vec<Vertex> = (1..1 + displacement).flat_map(|x| quiver.vertices_at(x)).collect();
        let window = spec.window.unwrap_or(4 * reps.len());

        let provisional: Vec<String> = reps.iter().map(|v| format!("V{}_{}", v.m, v.level)).collect();
        let tables = reps
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                MeshHomTable::compute(&quiver, r, window).ok_or_else(|| MeshError::WindowOverflow {
                    object: provisional[i].clone(),
                    window,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut mesh = MeshCategory {
            quiver,
            phi,
            displacement,
            reps,
            tables,
            components: Vec::new(),
            presentation: CategoryPresentation::new(PresentationData::default())?,
        };
        mesh.components = mesh.compute_components();
        let data = mesh.assemble(spec)?;
        mesh.presentation = CategoryPresentation::new(data)?;
        let report = mesh.presentation.validate();
        if !report.is_valid() {
            return Err(MeshError::Invalid(report.violations.clone()));
        }
        Ok(mesh)
    }

    pub fn presentation(&self) -> &CategoryPresentation {
        &self.presentation
    }

    pub fn into_presentation(self) -> CategoryPresentation {
        self.presentation
    }

    pub fn quiver(&self) -> &ZQuiver {
        &self.quiver
    }

    /// Covering representative of an object.
    pub fn representative(&self, x: ObjectId) -> Vertex {
        self.reps[x]
    }

    pub fn table(&self, x: ObjectId) -> &MeshHomTable {
        &self.tables[x]
    }

    /// The object of `v` and the power `k` with `v = φ^k(rep)`.
    pub fn locate(&self, v: Vertex) -> (ObjectId, i64) {
        let k = (v.x() - 1).div_euclid(self.displacement);
        let rep = self.quiver.apply_pow(self.phi, v, -k);
        let obj = self.reps.iter().position(|&r| r == rep).expect("rep lies in the domain");
        (obj, k)
    }

    /// Arrows of the orbit quiver, one per arrow leaving a representative.
    pub fn arrows(&self) -> Vec<(ObjectId, ObjectId)> {
        self.reps
            .iter()
            .enumerate()
            .flat_map(|(x, &r)| {
                self.quiver
                    .successors(r)
                    .into_iter()
                    .map(move |s| (x, s))
            })
            .map(|(x, s)| (x, self.locate(s).0))
            .collect()
    }

    fn compute_components(&self) -> Vec<Vec<Vec<Component>>> {
        let d = self.displacement;
        self.reps
            .iter()
            .enumerate()
            .map(|(x, &rx)| {
                let table = &self.tables[x];
                let max_x = 2 * table.horizon() + self.quiver.n;
                self.reps
                    .iter()
                    .map(|&ry| {
                        let mut out = Vec::new();
                        let mut offset = 0;
                        let mut k = (rx.x() - ry.x()).div_euclid(d);
                        loop {
                            let v = self.quiver.apply_pow(self.phi, ry, k);
                            if v.x() > max_x {
                                break;
                            }
                            let dim = table.dim(v);
                            if dim > 0 {
                                out.push(Component {
                                    k,
                                    target: v,
                                    offset,
                                    dim,
                                });
                                offset += dim;
                            }
                            k += 1;
                        }
                        out
                    })
                    .collect()
            })
            .collect()
    }

    fn hom_dim(&self, x: ObjectId, y: ObjectId) -> usize {
        self.components[x][y].iter().map(|c| c.dim).sum()
    }

    /// Coordinates in `Hom(X, Y)` of a class in `Hom(rep x, target)`.
    fn coordinates(&self, x: ObjectId, target: Vertex, class: &[Scalar]) -> (ObjectId, Vec<Scalar>) {
        let (y, k) = self.locate(target);
        let mut out = vec![Scalar::zero(); self.hom_dim(x, y)];
        if let Some(c) = self.components[x][y].iter().find(|c| c.k == k) {
            debug_assert_eq!(c.target, target);
            for (i, v) in class.iter().enumerate() {
                out[c.offset + i] = v.clone();
            }
        } else {
            debug_assert!(class.iter().all(Zero::is_zero));
        }
        (y, out)
    }

    /// The morphism given by a path of the covering quiver.
    pub fn path_morphism(&self, path: &[Vertex]) -> MorphismMatrix {
        let (x, s) = self.locate(path[0]);
        let shifted: Vec<Vertex> = path
            .iter()
            .map(|&v| self.quiver.apply_pow(self.phi, v, -s))
            .collect();
        let class = self.tables[x].push(vec![Scalar::one()], &shifted);
        let (y, coords) = self.coordinates(x, *shifted.last().unwrap(), &class);
        self.presentation.morphism_from_vector(x, y, coords)
    }

    fn assemble(&self, spec: &TranslationQuiverSpec) -> Result<PresentationData, MeshError> {
        let n = self.reps.len();
        let q = &self.quiver;
        let hom_dims: Vec<Vec<usize>> = (0..n).map(|x| (0..n).map(|y| self.hom_dim(x, y)).collect()).collect();

        let mut composition = BTreeMap::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let entries = self.composition_entries(x, y, z);
                    if !entries.is_empty() {
                        composition.insert((x, y, z), entries);
                    }
                }
            }
        }

        let identities = (0..n)
            .map(|x| {
                let (_, v) = self.coordinates(x, self.reps[x], &[Scalar::one()]);
                v
            })
            .collect();

        let sigma_loc: Vec<(ObjectId, i64)> = self.reps.iter().map(|&r| self.locate(q.shift(r))).collect();
        let sigma: Vec<ObjectId> = sigma_loc.iter().map(|(o, _)| *o).collect();
        let mut sigma_maps = BTreeMap::new();
        for x in 0..n {
            let (sx, s) = sigma_loc[x];
            for y in 0..n {
                let sy = sigma[y];
                let mut m = Matrix::zeros(hom_dims[sx][sy], hom_dims[x][y]);
                for c in &self.components[x][y] {
                    for (b, path) in self.tables[x].basis(c.target).iter().enumerate() {
                        let image: Vec<Vertex> = path
                            .iter()
                            .map(|&v| q.apply_pow(self.phi, q.shift(v), -s))
                            .collect();
                        let class = self.tables[sx].push(vec![Scalar::one()], &image);
                        let (obj, coords) = self.coordinates(sx, *image.last().unwrap(), &class);
                        debug_assert_eq!(obj, sy);
                        for (r, v) in coords.into_iter().enumerate() {
                            m[(r, c.offset + b)] = v;
                        }
                    }
                }
                sigma_maps.insert((x, y), m);
            }
        }

        let objects = self.object_names(&sigma);
        let mut data = PresentationData {
            objects,
            hom_dims,
            composition,
            identities,
            sigma,
            sigma_maps,
            field: "QQ".into(),
            ..Default::default()
        };
        // Morphisms and triangles need hom dimensions and composition, so
        // they are built against a provisional presentation.
        let provisional = MeshCategory {
            presentation: CategoryPresentation::new(data.clone())?,
            ..self.clone()
        };
        data.period = Some(provisional.presentation.sigma_order());
        data.triangles = provisional.ar_triangles()?;
        data.morphisms = provisional.named_morphisms(&data.triangles);
        data.generators = Generators {
            // Every indecomposable of the cluster categories of type A_1 and
            // A_3 generates the whole category.
            every_indecomposable: spec.identification == Identification::CLUSTER
                && matches!(spec.rank, 1 | 3),
            objects: Vec::new(),
        };
        Ok(data)
    }

    fn composition_entries(&self, x: ObjectId, y: ObjectId, z: ObjectId) -> Vec<CompositionEntry> {
        let mut out = Vec::new();
        let table = &self.tables[x];
        for c1 in &self.components[x][y] {
            for c2 in &self.components[y][z] {
                for (gb, gpath) in self.tables[y].basis(c2.target).iter().enumerate() {
                    let shifted: Vec<Vertex> = gpath
                        .iter()
                        .map(|&v| self.quiver.apply_pow(self.phi, v, c1.k))
                        .collect();
                    let end = *shifted.last().unwrap();
                    for fb in 0..c1.dim {
                        let mut class = vec![Scalar::zero(); c1.dim];
                        class[fb] = Scalar::one();
                        let image = table.push(class, &shifted);
                        if image.iter().all(Zero::is_zero) {
                            continue;
                        }
                        let (obj, coords) = self.coordinates(x, end, &image);
                        debug_assert_eq!(obj, z);
                        for (h, coeff) in coords.into_iter().enumerate() {
                            if !coeff.is_zero() {
                                out.push(CompositionEntry {
                                    g: c2.offset + gb,
                                    f: c1.offset + fb,
                                    h,
                                    coeff,
                                });
                            }
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Names `T{i}` for the orbit of `(0, i)` and `S{k}T{i}` for its image
    /// under `Σ^k`, choosing the smallest `|k|`, then `i`, then `k`.
    fn object_names(&self, sigma: &[ObjectId]) -> Vec<String> {
        let n = self.reps.len();
        let mut best: Vec<Option<(i64, i64, i64)>> = vec![None; n];
        let order = n as i64;
        for i in 1..=self.quiver.n {
            let (base, _) = self.locate(Vertex::new(0, i));
            let mut forward = base;
            let mut backward = base;
            for k in 0..=order {
                for (obj, kk) in [(forward, k), (backward, -k)] {
                    let key = (kk.abs(), i, kk);
                    if best[obj].is_none_or(|b| key < b) {
                        best[obj] = Some(key);
                    }
                }
                forward = sigma[forward];
                backward = sigma.iter().position(|&s| s == backward).expect("permutation");
            }
        }
        best.iter()
            .zip(&self.reps)
            .map(|(b, r)| match b {
                Some((_, i, 0)) => format!("T{i}"),
                Some((_, i, k)) => format!("S{k}T{i}"),
                None => format!("V{}_{}", r.m, r.level),
            })
            .collect()
    }

    /// One almost split triangle `τZ → E → Z → ΣτZ` per object `Z`.
    fn ar_triangles(&self) -> Result<Vec<TrianglePresentation>, MeshError> {
        let q = &self.quiver;
        let p = &self.presentation;
        let mut out = Vec::with_capacity(self.reps.len());
        for (z, &rz) in self.reps.iter().enumerate() {
            let t = q.tau(rz, 1);
            let (x, _) = self.locate(t);
            let preds = q.predecessors(rz);
            let middle = ObjectExpr::new(preds.iter().map(|(e, _)| self.locate(*e).0).collect());
            let source = ObjectExpr::single(x);
            let target = ObjectExpr::single(z);

            let mut f = p.zero_morphism(&source, &middle);
            let mut g = p.zero_morphism(&middle, &target);
            for (j, (e, sign)) in preds.iter().enumerate() {
                let fj = self.path_morphism(&[t, *e]);
                f = set_block(f, j, 0, fj.block(0, 0).to_vec());
                let gj = self.path_morphism(&[*e, rz]);
                let signed: Vec<Scalar> = gj
                    .block(0, 0)
                    .iter()
                    .map(|c| c * Scalar::from_integer((*sign).into()))
                    .collect();
                g = set_block(g, 0, j, signed);
            }

            let socle = q.shift(t);
            let dim = self.tables[z].dim(socle);
            if dim != 1 {
                return Err(MeshError::MissingConnectingMorphism {
                    object: p.name(z).to_string(),
                    dim,
                });
            }
            let (sx, coords) = self.coordinates(z, socle, &[Scalar::one()]);
            debug_assert_eq!(sx, p.sigma(x));
            let h = p.morphism_from_vector(z, sx, coords);
            out.push(TrianglePresentation {
                name: format!("ar_{}", p.name(z)),
                f,
                g,
                h,
            });
        }
        Ok(out)
    }

    /// Irreducible maps `arr_X_Y` and connecting morphisms `conn_Z`.
    fn named_morphisms(&self, triangles: &[TrianglePresentation]) -> Vec<(String, MorphismMatrix)> {
        let p = &self.presentation;
        let mut out = Vec::new();
        for &r in &self.reps {
            for s in self.quiver.successors(r) {
                let m = self.path_morphism(&[r, s]);
                let name = format!(
                    "arr_{}_{}",
                    p.name(m.source().summands()[0]),
                    p.name(m.target().summands()[0])
                );
                out.push((name, m));
            }
        }
        for (z, t) in triangles.iter().enumerate() {
            out.push((format!("conn_{}", p.name(z)), t.h.clone()));
        }
        out
    }
}

fn set_block(m: MorphismMatrix, j: usize, i: usize, v: Vec<Scalar>) -> MorphismMatrix {
    let mut blocks = m.blocks().to_vec();
    blocks[j][i] = v;
    MorphismMatrix::new(m.source().clone(), m.target().clone(), blocks)
}

/// Builds and validates the orbit category described by `spec`.
pub fn build_mesh_category(spec: &TranslationQuiverSpec) -> Result<CategoryPresentation, MeshError> {
    MeshCategory::build(spec).map(MeshCategory::into_presentation)
}

/// The cluster category of type `A_n`.
pub fn cluster_category_an(n: usize) -> Result<CategoryPresentation, MeshError> {
    build_mesh_category(&TranslationQuiverSpec::cluster(n))
}
