//! Finitely presented Hom-finite Krull-Schmidt triangulated categories.
//!
//! A presentation lists the indecomposable objects, the dimension of every
//! hom space (with implicit bases `e_1..e_d`), the composition structure
//! constants, the identities, the suspension (a permutation of objects plus
//! one matrix per hom space) and a list of distinguished triangles.
//! Morphisms between direct sums are block matrices of coefficient vectors.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{is_zero_vec, Matrix, Scalar, Subspace};

pub type ObjectId = usize;

/// A formal direct sum of indecomposables. Equality ignores the order of
/// summands; block layouts of morphisms follow the stored order.
#[derive(Clone, Debug, Default, Eq)]
pub struct ObjectExpr(Vec<ObjectId>);

impl ObjectExpr {
    pub fn new(summands: Vec<ObjectId>) -> Self {
        ObjectExpr(summands)
    }

    pub fn zero() -> Self {
        ObjectExpr(Vec::new())
    }

    pub fn single(x: ObjectId) -> Self {
        ObjectExpr(vec![x])
    }

    pub fn summands(&self) -> &[ObjectId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn concat(&self, other: &ObjectExpr) -> ObjectExpr {
        ObjectExpr(self.0.iter().chain(&other.0).copied().collect())
    }

    fn sorted(&self) -> Vec<ObjectId> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v
    }

    /// For each summand of `self`, the position of the matching summand of
    /// `other` (duplicates matched in order). `None` if the multisets differ.
    fn matching(&self, other: &ObjectExpr) -> Option<Vec<usize>> {
        if self != other {
            return None;
        }
        let mut used = vec![false; other.len()];
        self.0
            .iter()
            .map(|x| {
                let j = (0..other.len()).find(|&j| !used[j] && other.0[j] == *x)?;
                used[j] = true;
                Some(j)
            })
            .collect()
    }
}

impl PartialEq for ObjectExpr {
    fn eq(&self, other: &Self) -> bool {
        self.sorted() == other.sorted()
    }
}

/// A morphism between formal direct sums. `blocks[j][i]` is the component
/// `source_i -> target_j` as a coefficient vector in the hom basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismMatrix {
    source: ObjectExpr,
    target: ObjectExpr,
    blocks: Vec<Vec<Vec<Scalar>>>,
}

impl MorphismMatrix {
    /// Unchecked constructor; shapes are checked against a presentation by
    /// [`CategoryPresentation::check_morphism`].
    pub fn new(source: ObjectExpr, target: ObjectExpr, blocks: Vec<Vec<Vec<Scalar>>>) -> Self {
        MorphismMatrix {
            source,
            target,
            blocks,
        }
    }

    pub fn source(&self) -> &ObjectExpr {
        &self.source
    }

    pub fn target(&self) -> &ObjectExpr {
        &self.target
    }

    pub fn blocks(&self) -> &[Vec<Vec<Scalar>>] {
        &self.blocks
    }

    pub fn block(&self, j: usize, i: usize) -> &[Scalar] {
        &self.blocks[j][i]
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().flatten().all(|b| is_zero_vec(b))
    }

    /// Sum of two morphisms with identical endpoints (blockwise).
    pub fn add(&self, other: &MorphismMatrix) -> Option<MorphismMatrix> {
        if self.source.0 != other.source.0 || self.target.0 != other.target.0 {
            return None;
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(ra, rb)| {
                ra.iter()
                    .zip(rb)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                    .collect()
            })
            .collect();
        Some(MorphismMatrix::new(self.source.clone(), self.target.clone(), blocks))
    }

    pub fn scale(&self, c: &Scalar) -> MorphismMatrix {
        let blocks = self
            .blocks
            .iter()
            .map(|r| r.iter().map(|b| b.iter().map(|x| x * c).collect()).collect())
            .collect();
        MorphismMatrix::new(self.source.clone(), self.target.clone(), blocks)
    }
}

/// A candidate distinguished triangle `X -f-> Y -g-> Z -h-> ΣX`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrianglePresentation {
    pub name: String,
    pub f: MorphismMatrix,
    pub g: MorphismMatrix,
    pub h: MorphismMatrix,
}

/// One structure constant: `(basis g of Hom(Y,Z)) ∘ (basis f of Hom(X,Y))`
/// contributes `coeff` to basis `h` of `Hom(X,Z)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CompositionEntry {
    pub g: usize,
    pub f: usize,
    pub h: usize,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Generators {
    pub every_indecomposable: bool,
    pub objects: Vec<ObjectId>,
}

impl Generators {
    pub fn is_known(&self) -> bool {
        self.every_indecomposable || !self.objects.is_empty()
    }
}

/// Raw presentation data, before structural checks.
#[derive(Clone, Debug, Default)]
pub struct PresentationData {
    pub objects: Vec<String>,
    /// `hom_dims[x][y] = dim Hom(x, y)`.
    pub hom_dims: Vec<Vec<usize>>,
    pub composition: BTreeMap<(ObjectId, ObjectId, ObjectId), Vec<CompositionEntry>>,
    pub identities: Vec<Vec<Scalar>>,
    pub sigma: Vec<ObjectId>,
    /// `Hom(x,y) -> Hom(σx,σy)`; pairs with zero hom space may be omitted.
    pub sigma_maps: BTreeMap<(ObjectId, ObjectId), Matrix>,
    pub triangles: Vec<TrianglePresentation>,
    pub morphisms: Vec<(String, MorphismMatrix)>,
    pub generators: Generators,
    pub field: String,
    pub period: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("duplicate object name {0}")]
    DuplicateObject(String),
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("malformed presentation: {0}")]
    Malformed(String),
}

/// Where in a triangle a composite failed to vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainPosition {
    /// `g ∘ f`
    GF,
    /// `h ∘ g`
    HG,
    /// `Σf ∘ h`
    SigmaFH,
}

impl fmt::Display for ChainPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainPosition::GF => "g∘f",
            ChainPosition::HG => "h∘g",
            ChainPosition::SigmaFH => "Σf∘h",
        })
    }
}

/// Middle term of a failing exactness check in
/// `Hom(W,X) → Hom(W,Y) → Hom(W,Z) → Hom(W,ΣX) → Hom(W,ΣY)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactnessPosition {
    AtY,
    AtZ,
    AtSigmaX,
}

impl fmt::Display for ExactnessPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExactnessPosition::AtY => "Hom(W,Y)",
            ExactnessPosition::AtZ => "Hom(W,Z)",
            ExactnessPosition::AtSigmaX => "Hom(W,ΣX)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangleViolation {
    #[error("maps do not chain: {0}")]
    NonComposableChain(String),
    #[error("composite {0} is nonzero")]
    CompositeNonzero(ChainPosition),
    #[error("Hom({witness},-) sequence is not exact at {position}")]
    HomExactnessFails {
        witness: String,
        position: ExactnessPosition,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("composition not associative on ({objects:?}) with basis indices {basis:?}")]
    AssociativityViolation {
        objects: [String; 4],
        basis: [usize; 3],
    },
    #[error("identity of {object} is not a unit for basis {basis} of Hom({from},{to})")]
    UnitViolation {
        object: String,
        from: String,
        to: String,
        basis: usize,
    },
    #[error("Σ is not functorial at {location}")]
    SigmaNotFunctorial { location: String },
    #[error("End({object}) has semisimple top of dimension {top_dim}, expected 1")]
    NotKSplit { object: String, top_dim: usize },
    #[error("triangle #{index} ({name}): {reason}")]
    BadTriangle {
        index: usize,
        name: String,
        reason: TriangleViolation,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Jacobson radical of `End(X)` for every object, as a subspace of `Hom(X,X)`.
    pub radicals: Vec<Subspace>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A structurally well-formed presentation. All operations are pure; the
/// validation result is computed once and cached.
#[derive(Debug)]
pub struct CategoryPresentation {
    data: PresentationData,
    index: BTreeMap<String, ObjectId>,
    /// Dense `[g][f][h]` structure constants per object triple.
    tensors: Vec<Option<Vec<Scalar>>>,
    validation: OnceLock<ValidationReport>,
}

impl Clone for CategoryPresentation {
    fn clone(&self) -> Self {
        CategoryPresentation {
            data: self.data.clone(),
            index: self.index.clone(),
            tensors: self.tensors.clone(),
            validation: OnceLock::new(),
        }
    }
}

impl PartialEq for CategoryPresentation {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (&self.data, &other.data);
        a.objects == b.objects
            && a.hom_dims == b.hom_dims
            && a.composition == b.composition
            && a.identities == b.identities
            && a.sigma == b.sigma
            && a.sigma_maps == b.sigma_maps
            && a.triangles == b.triangles
            && a.morphisms == b.morphisms
            && a.generators == b.generators
            && a.field == b.field
            && a.period == b.period
    }
}

impl Eq for CategoryPresentation {}

fn malformed(msg: impl Into<String>) -> CategoryError {
    CategoryError::Malformed(msg.into())
}

impl CategoryPresentation {
    /// Checks shapes and index ranges and canonicalizes the data (sorted and
    /// merged composition entries, explicit zero-size Σ matrices).
    pub fn new(mut data: PresentationData) -> Result<Self, CategoryError> {
        let n = data.objects.len();
        let mut index = BTreeMap::new();
        for (i, name) in data.objects.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(CategoryError::DuplicateObject(name.clone()));
            }
        }
        if data.hom_dims.len() != n || data.hom_dims.iter().any(|r| r.len() != n) {
            return Err(malformed("hom dimension table is not square over the objects"));
        }
        let dim = |x: usize, y: usize| data.hom_dims[x][y];

        if data.identities.len() != n {
            return Err(malformed("one identity per object required"));
        }
        for (x, id) in data.identities.iter().enumerate() {
            if id.len() != dim(x, x) {
                return Err(malformed(format!(
                    "identity of {} has length {}, expected {}",
                    data.objects[x],
                    id.len(),
                    dim(x, x)
                )));
            }
        }

        if data.sigma.len() != n {
            return Err(malformed("sigma must map every object"));
        }
        let mut seen = vec![false; n];
        for &s in &data.sigma {
            if s >= n || std::mem::replace(&mut seen[s], true) {
                return Err(malformed("sigma is not a permutation of the objects"));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let (sx, sy) = (data.sigma[x], data.sigma[y]);
                let (rows, cols) = (dim(sx, sy), dim(x, y));
                match data.sigma_maps.get(&(x, y)) {
                    Some(m) if m.rows() == rows && m.cols() == cols => {}
                    Some(_) => {
                        return Err(malformed(format!(
                            "sigma matrix for ({},{}) must be {rows}x{cols}",
                            data.objects[x], data.objects[y]
                        )))
                    }
                    None if rows == 0 && cols == 0 => {
                        data.sigma_maps.insert((x, y), Matrix::zeros(0, 0));
                    }
                    None => {
                        return Err(malformed(format!(
                            "missing sigma matrix for ({},{})",
                            data.objects[x], data.objects[y]
                        )))
                    }
                }
            }
        }
        if let Some(((x, y), _)) = data.sigma_maps.iter().find(|((x, y), _)| *x >= n || *y >= n) {
            return Err(malformed(format!("sigma matrix for unknown pair ({x},{y})")));
        }

        let mut tensors = vec![None; n * n * n];
        let mut canonical = BTreeMap::new();
        for (&(x, y, z), entries) in &data.composition {
            if x >= n || y >= n || z >= n {
                return Err(malformed(format!("composition triple ({x},{y},{z}) out of range")));
            }
            let (dg, df, dh) = (dim(y, z), dim(x, y), dim(x, z));
            let mut t = vec![Scalar::zero(); dg * df * dh];
            for e in entries {
                if e.g >= dg || e.f >= df || e.h >= dh {
                    return Err(malformed(format!(
                        "composition entry ({},{},{}) out of range for ({},{},{})",
                        e.g, e.f, e.h, data.objects[x], data.objects[y], data.objects[z]
                    )));
                }
                t[(e.g * df + e.f) * dh + e.h] += &e.coeff;
            }
            let merged: Vec<CompositionEntry> = (0..dg)
                .flat_map(|g| (0..df).flat_map(move |f| (0..dh).map(move |h| (g, f, h))))
                .filter_map(|(g, f, h)| {
                    let c = &t[(g * df + f) * dh + h];
                    (!c.is_zero()).then(|| CompositionEntry {
                        g,
                        f,
                        h,
                        coeff: c.clone(),
                    })
                })
                .collect();
            if !merged.is_empty() {
                canonical.insert((x, y, z), merged);
                tensors[(x * n + y) * n + z] = Some(t);
            }
        }
        data.composition = canonical;

        for &g in &data.generators.objects {
            if g >= n {
                return Err(malformed(format!("generator index {g} out of range")));
            }
        }

        let p = CategoryPresentation {
            data,
            index,
            tensors,
            validation: OnceLock::new(),
        };
        for t in &p.data.triangles {
            for m in [&t.f, &t.g, &t.h] {
                p.check_morphism(m)
                    .map_err(|e| malformed(format!("triangle {}: {e}", t.name)))?;
            }
        }
        for (name, m) in &p.data.morphisms {
            p.check_morphism(m)
                .map_err(|e| malformed(format!("morphism {name}: {e}")))?;
        }
        Ok(p)
    }

    pub fn data(&self) -> &PresentationData {
        &self.data
    }

    pub fn into_data(self) -> PresentationData {
        self.data
    }

    pub fn num_objects(&self) -> usize {
        self.data.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.data.objects
    }

    pub fn name(&self, x: ObjectId) -> &str {
        &self.data.objects[x]
    }

    pub fn object(&self, name: &str) -> Result<ObjectId, CategoryError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::UnknownObject(name.to_string()))
    }

    pub fn hom_dim(&self, x: ObjectId, y: ObjectId) -> usize {
        self.data.hom_dims[x][y]
    }

    /// `dim Hom(z, e)` summed over the summands of `e`.
    pub fn hom_dim_expr(&self, z: ObjectId, e: &ObjectExpr) -> usize {
        e.summands().iter().map(|&x| self.hom_dim(z, x)).sum()
    }

    pub fn sigma(&self, x: ObjectId) -> ObjectId {
        self.data.sigma[x]
    }

    pub fn sigma_inverse(&self, x: ObjectId) -> ObjectId {
        self.data.sigma.iter().position(|&s| s == x).expect("sigma is a permutation")
    }

    pub fn sigma_map(&self, x: ObjectId, y: ObjectId) -> &Matrix {
        &self.data.sigma_maps[&(x, y)]
    }

    pub fn sigma_expr(&self, e: &ObjectExpr) -> ObjectExpr {
        ObjectExpr::new(e.summands().iter().map(|&x| self.sigma(x)).collect())
    }

    pub fn triangles(&self) -> &[TrianglePresentation] {
        &self.data.triangles
    }

    pub fn morphisms(&self) -> &[(String, MorphismMatrix)] {
        &self.data.morphisms
    }

    pub fn morphism(&self, name: &str) -> Option<&MorphismMatrix> {
        self.data.morphisms.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn generators(&self) -> &Generators {
        &self.data.generators
    }

    pub fn period(&self) -> Option<usize> {
        self.data.period
    }

    /// Order of σ as a permutation of the objects.
    pub fn sigma_order(&self) -> usize {
        let n = self.num_objects();
        let mut order = 1usize;
        for x in 0..n {
            let mut len = 1;
            let mut y = self.sigma(x);
            while y != x {
                y = self.sigma(y);
                len += 1;
            }
            order = num_integer::lcm(order, len);
        }
        order
    }

    pub fn identity_vector(&self, x: ObjectId) -> &[Scalar] {
        &self.data.identities[x]
    }

    fn tensor(&self, x: ObjectId, y: ObjectId, z: ObjectId) -> Option<&Vec<Scalar>> {
        let n = self.num_objects();
        self.tensors[(x * n + y) * n + z].as_ref()
    }

    /// `g ∘ f` for `f ∈ Hom(x,y)`, `g ∈ Hom(y,z)` given as coefficient vectors.
    pub fn compose_vectors(
        &self,
        x: ObjectId,
        y: ObjectId,
        z: ObjectId,
        g: &[Scalar],
        f: &[Scalar],
    ) -> Vec<Scalar> {
        let (df, dh) = (self.hom_dim(x, y), self.hom_dim(x, z));
        let mut out = vec![Scalar::zero(); dh];
        let Some(t) = self.tensor(x, y, z) else {
            return out;
        };
        for (gi, gc) in g.iter().enumerate() {
            if gc.is_zero() {
                continue;
            }
            for (fi, fc) in f.iter().enumerate() {
                if fc.is_zero() {
                    continue;
                }
                let coeff = gc * fc;
                let base = (gi * df + fi) * dh;
                for (h, o) in out.iter_mut().enumerate() {
                    let c = &t[base + h];
                    if !c.is_zero() {
                        *o += &coeff * c;
                    }
                }
            }
        }
        out
    }

    pub fn unit_vector(&self, x: ObjectId, y: ObjectId, b: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.hom_dim(x, y)];
        v[b] = Scalar::one();
        v
    }

    /// Checks that a morphism's objects exist and its blocks have the right shapes.
    pub fn check_morphism(&self, m: &MorphismMatrix) -> Result<(), CategoryError> {
        let n = self.num_objects();
        for &x in m.source.summands().iter().chain(m.target.summands()) {
            if x >= n {
                return Err(CategoryError::UnknownObject(format!("#{x}")));
            }
        }
        if m.blocks.len() != m.target.len() {
            return Err(malformed(format!(
                "morphism has {} block rows, target has {} summands",
                m.blocks.len(),
                m.target.len()
            )));
        }
        for (j, row) in m.blocks.iter().enumerate() {
            if row.len() != m.source.len() {
                return Err(malformed(format!(
                    "block row {j} has {} entries, source has {} summands",
                    row.len(),
                    m.source.len()
                )));
            }
            for (i, b) in row.iter().enumerate() {
                let d = self.hom_dim(m.source.0[i], m.target.0[j]);
                if b.len() != d {
                    return Err(malformed(format!(
                        "block ({j},{i}) has length {}, Hom({},{}) has dimension {d}",
                        b.len(),
                        self.name(m.source.0[i]),
                        self.name(m.target.0[j])
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn zero_morphism(&self, source: &ObjectExpr, target: &ObjectExpr) -> MorphismMatrix {
        let blocks = target
            .summands()
            .iter()
            .map(|&y| {
                source
                    .summands()
                    .iter()
                    .map(|&x| vec![Scalar::zero(); self.hom_dim(x, y)])
                    .collect()
            })
            .collect();
        MorphismMatrix::new(source.clone(), target.clone(), blocks)
    }

    pub fn identity(&self, e: &ObjectExpr) -> MorphismMatrix {
        let mut m = self.zero_morphism(e, e);
        for (i, &x) in e.summands().iter().enumerate() {
            m.blocks[i][i] = self.identity_vector(x).to_vec();
        }
        m
    }

    /// The basis morphism `e_b ∈ Hom(x,y)`.
    pub fn basis_morphism(&self, x: ObjectId, y: ObjectId, b: usize) -> MorphismMatrix {
        MorphismMatrix::new(
            ObjectExpr::single(x),
            ObjectExpr::single(y),
            vec![vec![self.unit_vector(x, y, b)]],
        )
    }

    /// Morphism between indecomposables with the given coefficient vector.
    pub fn morphism_from_vector(&self, x: ObjectId, y: ObjectId, v: Vec<Scalar>) -> MorphismMatrix {
        debug_assert_eq!(v.len(), self.hom_dim(x, y));
        MorphismMatrix::new(ObjectExpr::single(x), ObjectExpr::single(y), vec![vec![v]])
    }

    /// Every basis morphism between indecomposables, in (source, target, index) order.
    pub fn basis_morphisms(&self) -> Vec<MorphismMatrix> {
        let n = self.num_objects();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for b in 0..self.hom_dim(x, y) {
                    out.push(self.basis_morphism(x, y, b));
                }
            }
        }
        out
    }

    /// Block-diagonal `f ⊕ g` with correctly sized zero blocks.
    pub fn direct_sum(&self, f: &MorphismMatrix, g: &MorphismMatrix) -> MorphismMatrix {
        let source = f.source.concat(&g.source);
        let target = f.target.concat(&g.target);
        let mut m = self.zero_morphism(&source, &target);
        let (fs, ft) = (f.source.len(), f.target.len());
        for (j, row) in f.blocks.iter().enumerate() {
            for (i, b) in row.iter().enumerate() {
                m.blocks[j][i] = b.clone();
            }
        }
        for (j, row) in g.blocks.iter().enumerate() {
            for (i, b) in row.iter().enumerate() {
                m.blocks[ft + j][fs + i] = b.clone();
            }
        }
        m
    }

    /// `g ∘ f`. The target of `f` and the source of `g` must agree as
    /// multisets; `g`'s columns are matched to `f`'s rows.
    pub fn compose(&self, g: &MorphismMatrix, f: &MorphismMatrix) -> Result<MorphismMatrix, CategoryError> {
        let Some(matching) = f.target.matching(&g.source) else {
            return Err(CategoryError::EndpointMismatch(format!(
                "cannot compose: target {:?} of f differs from source {:?} of g",
                self.expr_names(&f.target),
                self.expr_names(&g.source)
            )));
        };
        let mut out = self.zero_morphism(&f.source, &g.target);
        for (k, &z) in g.target.summands().iter().enumerate() {
            for (i, &x) in f.source.summands().iter().enumerate() {
                let acc = &mut out.blocks[k][i];
                for (j, &y) in f.target.summands().iter().enumerate() {
                    let v = self.compose_vectors(x, y, z, &g.blocks[k][matching[j]], &f.blocks[j][i]);
                    for (a, b) in acc.iter_mut().zip(v) {
                        *a += b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// The linear map `Hom(z, X) → Hom(z, Y)`, `φ ↦ f ∘ φ`, in the
    /// concatenated hom bases of the summands.
    pub fn hom_map(&self, z: ObjectId, f: &MorphismMatrix) -> Result<Matrix, CategoryError> {
        if z >= self.num_objects() {
            return Err(CategoryError::UnknownObject(format!("#{z}")));
        }
        let rows = self.hom_dim_expr(z, &f.target);
        let cols = self.hom_dim_expr(z, &f.source);
        let mut m = Matrix::zeros(rows, cols);
        let mut col = 0;
        for (i, &x) in f.source.summands().iter().enumerate() {
            for b in 0..self.hom_dim(z, x) {
                let phi = self.unit_vector(z, x, b);
                let mut row = 0;
                for (j, &y) in f.target.summands().iter().enumerate() {
                    let v = self.compose_vectors(z, x, y, &f.blocks[j][i], &phi);
                    for (r, val) in v.into_iter().enumerate() {
                        m[(row + r, col)] = val;
                    }
                    row += self.hom_dim(z, y);
                }
                col += 1;
            }
        }
        Ok(m)
    }

    /// `Σf`: σ on the endpoints and the Σ matrices on every block.
    pub fn apply_sigma(&self, f: &MorphismMatrix) -> MorphismMatrix {
        let blocks = f
            .target
            .summands()
            .iter()
            .zip(&f.blocks)
            .map(|(&y, row)| {
                f.source
                    .summands()
                    .iter()
                    .zip(row)
                    .map(|(&x, b)| self.sigma_map(x, y).mul_vec(b).expect("checked block shape"))
                    .collect()
            })
            .collect();
        MorphismMatrix::new(self.sigma_expr(&f.source), self.sigma_expr(&f.target), blocks)
    }

    pub fn expr_names(&self, e: &ObjectExpr) -> Vec<&str> {
        e.summands().iter().map(|&x| self.name(x)).collect()
    }

    /// Checks the chain conditions and Hom-exactness of a triangle; an empty
    /// result means the triangle passes.
    pub fn check_triangle(&self, t: &TrianglePresentation) -> Vec<TriangleViolation> {
        let mut out = Vec::new();
        for m in [&t.f, &t.g, &t.h] {
            if let Err(e) = self.check_morphism(m) {
                out.push(TriangleViolation::NonComposableChain(e.to_string()));
                return out;
            }
        }
        let sigma_x = self.sigma_expr(&t.f.source);
        if t.f.target != t.g.source || t.g.target != t.h.source || t.h.target != sigma_x {
            out.push(TriangleViolation::NonComposableChain(format!(
                "{:?} -> {:?} / {:?} -> {:?} / {:?} -> {:?} with ΣX = {:?}",
                self.expr_names(&t.f.source),
                self.expr_names(&t.f.target),
                self.expr_names(&t.g.source),
                self.expr_names(&t.g.target),
                self.expr_names(&t.h.source),
                self.expr_names(&t.h.target),
                self.expr_names(&sigma_x),
            )));
            return out;
        }
        // The checks above guarantee that composition succeeds.
        let sigma_f = self.apply_sigma(&t.f);
        let gf = self.compose(&t.g, &t.f).expect("chained");
        let hg = self.compose(&t.h, &t.g).expect("chained");
        let sfh = self.compose(&sigma_f, &t.h).expect("chained");
        for (m, pos) in [(gf, ChainPosition::GF), (hg, ChainPosition::HG), (sfh, ChainPosition::SigmaFH)] {
            if !m.is_zero() {
                out.push(TriangleViolation::CompositeNonzero(pos));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let maps = [&t.f, &t.g, &t.h, &sigma_f];
        let middles = [&t.f.target, &t.g.target, &t.h.target];
        let positions = [ExactnessPosition::AtY, ExactnessPosition::AtZ, ExactnessPosition::AtSigmaX];
        for w in 0..self.num_objects() {
            let ranks: Vec<usize> = maps
                .iter()
                .map(|m| self.hom_map(w, m).expect("w in range").rank())
                .collect();
            for k in 0..3 {
                // Composites vanish, so image ⊆ kernel; equality is a rank count.
                if ranks[k] + ranks[k + 1] != self.hom_dim_expr(w, middles[k]) {
                    out.push(TriangleViolation::HomExactnessFails {
                        witness: self.name(w).to_string(),
                        position: positions[k],
                    });
                }
            }
        }
        out
    }

    /// Validates every invariant of the presentation. The report (including
    /// the radicals of the endomorphism algebras) is computed once.
    pub fn validate(&self) -> &ValidationReport {
        self.validation.get_or_init(|| self.compute_validation())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    fn compute_validation(&self) -> ValidationReport {
        let mut violations = Vec::new();
        self.check_units(&mut violations);
        self.check_associativity(&mut violations);
        self.check_sigma(&mut violations);
        let radicals = (0..self.num_objects())
            .map(|x| {
                let rad = self.endomorphism_radical(x);
                let top = self.hom_dim(x, x) - rad.dim();
                if top != 1 {
                    violations.push(Violation::NotKSplit {
                        object: self.name(x).to_string(),
                        top_dim: top,
                    });
                }
                rad
            })
            .collect();
        // Triangle checks rely on a sound composition, so they only run on
        // otherwise valid data.
        if violations.is_empty() {
            for (index, t) in self.triangles().iter().enumerate() {
                for reason in self.check_triangle(t) {
                    violations.push(Violation::BadTriangle {
                        index,
                        name: t.name.clone(),
                        reason,
                    });
                }
            }
        }
        ValidationReport {
            violations,
            radicals,
        }
    }

    fn check_units(&self, out: &mut Vec<Violation>) {
        let n = self.num_objects();
        for x in 0..n {
            for y in 0..n {
                for b in 0..self.hom_dim(x, y) {
                    let f = self.unit_vector(x, y, b);
                    let left = self.compose_vectors(x, y, y, self.identity_vector(y), &f);
                    let right = self.compose_vectors(x, x, y, &f, self.identity_vector(x));
                    for (obj, v) in [(y, left), (x, right)] {
                        if v != f {
                            out.push(Violation::UnitViolation {
                                object: self.name(obj).to_string(),
                                from: self.name(x).to_string(),
                                to: self.name(y).to_string(),
                                basis: b,
                            });
                        }
                    }
                }
            }
        }
    }

    fn check_associativity(&self, out: &mut Vec<Violation>) {
        let n = self.num_objects();
        for w in 0..n {
            for x in 0..n {
                if self.hom_dim(w, x) == 0 {
                    continue;
                }
                for y in 0..n {
                    if self.hom_dim(x, y) == 0 {
                        continue;
                    }
                    for z in 0..n {
                        if self.hom_dim(y, z) == 0 {
                            continue;
                        }
                        self.check_associativity_at([w, x, y, z], out);
                    }
                }
            }
        }
    }

    fn check_associativity_at(&self, [w, x, y, z]: [ObjectId; 4], out: &mut Vec<Violation>) {
        for fb in 0..self.hom_dim(w, x) {
            let f = self.unit_vector(w, x, fb);
            for gb in 0..self.hom_dim(x, y) {
                let g = self.unit_vector(x, y, gb);
                let gf = self.compose_vectors(w, x, y, &g, &f);
                for hb in 0..self.hom_dim(y, z) {
                    let h = self.unit_vector(y, z, hb);
                    let left = self.compose_vectors(w, y, z, &h, &gf);
                    let hg = self.compose_vectors(x, y, z, &h, &g);
                    let right = self.compose_vectors(w, x, z, &hg, &f);
                    if left != right {
                        out.push(Violation::AssociativityViolation {
                            objects: [w, x, y, z].map(|o| self.name(o).to_string()),
                            basis: [fb, gb, hb],
                        });
                        return;
                    }
                }
            }
        }
    }

    fn check_sigma(&self, out: &mut Vec<Violation>) {
        let n = self.num_objects();
        for x in 0..n {
            let sx = self.sigma(x);
            let mapped = self.sigma_map(x, x).mul_vec(self.identity_vector(x)).expect("shape");
            if mapped != self.identity_vector(sx) {
                out.push(Violation::SigmaNotFunctorial {
                    location: format!("Σ(1_{}) ≠ 1_{}", self.name(x), self.name(sx)),
                });
            }
            for y in 0..n {
                let m = self.sigma_map(x, y);
                if m.rank() != self.hom_dim(x, y) || m.rows() != m.cols() {
                    out.push(Violation::SigmaNotFunctorial {
                        location: format!("Σ on Hom({},{}) is not invertible", self.name(x), self.name(y)),
                    });
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if let Some(loc) = self.sigma_composition_failure(x, y, z) {
                        out.push(Violation::SigmaNotFunctorial { location: loc });
                    }
                }
            }
        }
    }

    fn sigma_composition_failure(&self, x: ObjectId, y: ObjectId, z: ObjectId) -> Option<String> {
        let (sx, sy, sz) = (self.sigma(x), self.sigma(y), self.sigma(z));
        for fb in 0..self.hom_dim(x, y) {
            let f = self.unit_vector(x, y, fb);
            let sf = self.sigma_map(x, y).mul_vec(&f).expect("shape");
            for gb in 0..self.hom_dim(y, z) {
                let g = self.unit_vector(y, z, gb);
                let sg = self.sigma_map(y, z).mul_vec(&g).expect("shape");
                let lhs = self
                    .sigma_map(x, z)
                    .mul_vec(&self.compose_vectors(x, y, z, &g, &f))
                    .expect("shape");
                let rhs = self.compose_vectors(sx, sy, sz, &sg, &sf);
                if lhs != rhs {
                    return Some(format!(
                        "Σ(g∘f) ≠ Σg∘Σf for basis g={gb} of Hom({},{}), f={fb} of Hom({},{})",
                        self.name(y),
                        self.name(z),
                        self.name(x),
                        self.name(y)
                    ));
                }
            }
        }
        None
    }

    /// Left multiplication by `a` on `End(x)`, in the hom basis.
    fn left_multiplication(&self, x: ObjectId, a: &[Scalar]) -> Matrix {
        let d = self.hom_dim(x, x);
        let cols: Vec<Vec<Scalar>> = (0..d)
            .map(|b| self.compose_vectors(x, x, x, a, &self.unit_vector(x, x, b)))
            .collect();
        Matrix::from_columns(d, &cols).expect("square")
    }

    /// Radical of `End(x)` in characteristic zero: the kernel of the trace
    /// form `(a, b) ↦ tr(L_{a∘b})`.
    pub fn endomorphism_radical(&self, x: ObjectId) -> Subspace {
        let d = self.hom_dim(x, x);
        let mut gram = Matrix::zeros(d, d);
        for i in 0..d {
            let ei = self.unit_vector(x, x, i);
            for j in 0..d {
                let prod = self.compose_vectors(x, x, x, &ei, &self.unit_vector(x, x, j));
                let l = self.left_multiplication(x, &prod);
                gram[(i, j)] = (0..d).fold(Scalar::zero(), |acc, k| acc + &l[(k, k)]);
            }
        }
        Subspace::span(d, gram.kernel()).expect("kernel vectors have length d")
    }

    /// `rad(x, y)`: all of `Hom(x, y)` between distinct indecomposables.
    pub fn radical(&self, x: ObjectId, y: ObjectId) -> Subspace {
        if x == y {
            self.endomorphism_radical(x)
        } else {
            Subspace::full(self.hom_dim(x, y))
        }
    }

    /// `dim rad(x,y) / rad²(x,y)`, the number of irreducible maps `x → y`
    /// in a basis of the AR quiver.
    pub fn irreducible_dim(&self, x: ObjectId, y: ObjectId) -> usize {
        let rad = self.radical(x, y);
        let mut products = Vec::new();
        for w in 0..self.num_objects() {
            let left = self.radical(x, w).basis_vectors();
            if left.is_empty() {
                continue;
            }
            let right = self.radical(w, y).basis_vectors();
            for g in &right {
                for f in &left {
                    products.push(self.compose_vectors(x, w, y, g, f));
                }
            }
        }
        let rad2 = Subspace::span(self.hom_dim(x, y), products).expect("products lie in Hom(x,y)");
        rad.dim() - rad2.dim()
    }
}
