//! Rank functions as non-negative combinations of simple functors.
//!
//! A rank function is stored as its coefficients `c_Z` on the simples
//! `S_Z`. Then `ρ(f) = Σ_Z c_Z · rank Hom(Z, f)` and
//! `ρ(1_X) = Σ_Z c_Z · dim Hom(Z, X)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::category::{CategoryError, CategoryPresentation, MorphismMatrix, ObjectExpr, ObjectId, TrianglePresentation};
use crate::functor::{image_dim_vector, orbit_index, sigma_orbits, SigmaOrbit};
use crate::linalg::{solve_nonneg, Matrix, Scalar, SolveReport, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error("morphism does not belong to this presentation: {0}")]
    CategoryMismatch(CategoryError),
    #[error("expected {expected} coefficients, got {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("negative coefficient at {0}")]
    Negative(String),
    #[error("coefficients differ on the Σ-orbit of {0}")]
    NotSigmaInvariant(String),
    #[error("rank function is not integral")]
    NotIntegral,
    #[error("presentation declares no generators")]
    GeneratorsUnknown,
    #[error("no value given for object {0}")]
    MissingValue(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct RankFunction {
    category: Arc<CategoryPresentation>,
    coefficients: Vec<Scalar>,
}

impl fmt::Debug for RankFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (x, c) in self.coefficients.iter().enumerate() {
            m.entry(&self.category.name(x), &c.to_string());
        }
        m.finish()
    }
}

impl RankFunction {
    pub fn new(category: Arc<CategoryPresentation>, coefficients: Vec<Scalar>) -> Result<Self, RankError> {
        let n = category.num_objects();
        if coefficients.len() != n {
            return Err(RankError::WrongLength {
                expected: n,
                found: coefficients.len(),
            });
        }
        for x in 0..n {
            if coefficients[x].is_negative() {
                return Err(RankError::Negative(category.name(x).to_string()));
            }
            if coefficients[category.sigma(x)] != coefficients[x] {
                return Err(RankError::NotSigmaInvariant(category.name(x).to_string()));
            }
        }
        Ok(RankFunction { category, coefficients })
    }

    pub fn zero(category: Arc<CategoryPresentation>) -> Self {
        let n = category.num_objects();
        RankFunction {
            category,
            coefficients: vec![Scalar::zero(); n],
        }
    }

    /// The irreducible rank function supported on the Σ-orbit of `x`.
    pub fn orbit_indicator(category: Arc<CategoryPresentation>, x: ObjectId) -> Self {
        let mut coefficients = vec![Scalar::zero(); category.num_objects()];
        let mut y = x;
        loop {
            coefficients[y] = Scalar::one();
            y = category.sigma(y);
            if y == x {
                break;
            }
        }
        RankFunction { category, coefficients }
    }

    /// `ℓ`: every coefficient equal to one.
    pub fn canonical_length(category: Arc<CategoryPresentation>) -> Self {
        let n = category.num_objects();
        RankFunction {
            category,
            coefficients: vec![Scalar::one(); n],
        }
    }

    pub fn category(&self) -> &Arc<CategoryPresentation> {
        &self.category
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coefficients
    }

    pub fn coefficient(&self, z: ObjectId) -> &Scalar {
        &self.coefficients[z]
    }

    pub fn is_integral(&self) -> bool {
        self.coefficients.iter().all(Scalar::is_integer)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    /// Coefficientwise sum; both functions must live on the same presentation.
    pub fn add(&self, other: &RankFunction) -> RankFunction {
        assert!(Arc::ptr_eq(&self.category, &other.category) || self.category == other.category);
        RankFunction {
            category: self.category.clone(),
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &Scalar) -> RankFunction {
        assert!(!k.is_negative());
        RankFunction {
            category: self.category.clone(),
            coefficients: self.coefficients.iter().map(|c| c * k).collect(),
        }
    }

    /// `ρ(f)`.
    pub fn evaluate(&self, f: &MorphismMatrix) -> Result<Scalar, RankError> {
        let dv = image_dim_vector(&self.category, f).map_err(RankError::CategoryMismatch)?;
        Ok(self.pair(dv.entries()))
    }

    /// `ρ_ob(X) = ρ(1_X)`.
    pub fn evaluate_on_object(&self, x: &ObjectExpr) -> Result<Scalar, RankError> {
        let n = self.category.num_objects();
        if let Some(&bad) = x.summands().iter().find(|&&y| y >= n) {
            return Err(RankError::CategoryMismatch(CategoryError::UnknownObject(format!("#{bad}"))));
        }
        let dims: Vec<usize> = (0..n).map(|z| self.category.hom_dim_expr(z, x)).collect();
        Ok(self.pair(&dims))
    }

    /// `ρ_ob` on every indecomposable.
    pub fn object_values(&self) -> Vec<Scalar> {
        (0..self.category.num_objects())
            .map(|x| self.evaluate_on_object(&ObjectExpr::single(x)).expect("known object"))
            .collect()
    }

    fn pair(&self, dims: &[usize]) -> Scalar {
        self.coefficients
            .iter()
            .zip(dims)
            .filter(|(c, &d)| d > 0 && !c.is_zero())
            .map(|(c, &d)| c * Scalar::from_integer(d.into()))
            .fold(Scalar::zero(), |a, b| a + b)
    }

    /// Groups the coefficients by Σ-orbit.
    pub fn decompose(&self) -> Result<DecompositionReport, RankError> {
        if !self.is_integral() {
            return Err(RankError::NotIntegral);
        }
        let parts = sigma_orbits(&self.category)
            .into_iter()
            .filter_map(|o| {
                let c = &self.coefficients[o.smallest()];
                (!c.is_zero()).then(|| (o, c.to_integer()))
            })
            .collect();
        Ok(DecompositionReport { parts })
    }

    /// Classification flags. Every flag describes a nonzero function, so the
    /// zero function reports all flags false. `prime` is only computed when
    /// requested and then needs generator data.
    pub fn classify(&self, check_prime: bool) -> Result<Classification, RankError> {
        let nonzero = !self.is_zero();
        let integral = nonzero && self.is_integral();
        let (irreducible, basic) = if integral {
            let report = self.decompose()?;
            (
                report.parts.len() == 1 && report.parts[0].1.is_one(),
                report.parts.iter().all(|(_, m)| m.is_one()),
            )
        } else {
            (false, false)
        };
        let prime = if check_prime {
            let g = self.category.generators();
            if !g.is_known() {
                return Err(RankError::GeneratorsUnknown);
            }
            let candidates: Vec<ObjectId> = if g.every_indecomposable {
                (0..self.category.num_objects()).collect()
            } else {
                g.objects.clone()
            };
            Some(
                integral
                    && candidates
                        .iter()
                        .any(|&x| self.evaluate_on_object(&ObjectExpr::single(x)).is_ok_and(|v| v.is_one())),
            )
        } else {
            None
        };
        Ok(Classification {
            integral,
            irreducible,
            basic,
            prime,
            morphism_faithful: nonzero && self.coefficients.iter().all(|c| c.is_positive()),
        })
    }

    /// `Ker ρ` as one subspace per pair of indecomposables.
    pub fn kernel_ideal(&self) -> KernelIdeal {
        let p = &*self.category;
        let n = p.num_objects();
        let support: Vec<ObjectId> = (0..n).filter(|&z| self.coefficients[z].is_positive()).collect();
        let spaces = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| {
                        let d = p.hom_dim(x, y);
                        // Column b: the coordinates of e_b ∘ u for every u ∈ Hom(Z, X), Z in the support.
                        let columns: Vec<Vec<Scalar>> = (0..d)
                            .map(|b| {
                                let eb = p.unit_vector(x, y, b);
                                support
                                    .iter()
                                    .flat_map(|&z| {
                                        (0..p.hom_dim(z, x))
                                            .flat_map(|u| p.compose_vectors(z, x, y, &eb, &p.unit_vector(z, x, u)))
                                            .collect::<Vec<_>>()
                                    })
                                    .collect()
                            })
                            .collect();
                        let rows = columns.first().map_or(0, Vec::len);
                        let m = Matrix::from_columns(rows, &columns).expect("uniform columns");
                        Subspace::span(d, m.kernel()).expect("kernel vectors have length d")
                    })
                    .collect()
            })
            .collect();
        KernelIdeal { spaces }
    }

    /// Whether every kernel morphism is a composite of two kernel morphisms.
    ///
    /// A finite sum `Σ g_i ∘ h_i` of kernel composites through objects `W_i`
    /// is the single composite `(g_1 … g_k) ∘ (h_1 … h_k)^T` through `⊕ W_i`,
    /// and both factors are in the kernel because kernel membership is
    /// componentwise. So the elementwise condition is the span condition
    /// `K(X,Y) ⊆ Σ_W K(W,Y) ∘ K(X,W)` checked here.
    pub fn is_idempotent(&self) -> Result<FactorizationCheck, RankError> {
        if !self.is_integral() {
            return Err(RankError::NotIntegral);
        }
        let k = self.kernel_ideal();
        let p = &*self.category;
        Ok(factorization_check(p, &k, |x, w, y| {
            composite_span(p, x, w, y, &k.get(w, y).basis_vectors(), &k.get(x, w).basis_vectors())
        }))
    }

    /// Whether every kernel morphism factors through an object of rank zero.
    pub fn is_localising(&self) -> Result<FactorizationCheck, RankError> {
        if !self.is_integral() {
            return Err(RankError::NotIntegral);
        }
        let k = self.kernel_ideal();
        let p = &*self.category;
        let zero_objects: Vec<bool> = self.object_values().iter().map(Zero::is_zero).collect();
        Ok(factorization_check(p, &k, |x, w, y| {
            if !zero_objects[w] {
                return Vec::new();
            }
            let g: Vec<_> = (0..p.hom_dim(w, y)).map(|b| p.unit_vector(w, y, b)).collect();
            let h: Vec<_> = (0..p.hom_dim(x, w)).map(|b| p.unit_vector(x, w, b)).collect();
            composite_span(p, x, w, y, &g, &h)
        }))
    }

    /// Solves `Σ_Z c_Z dim Hom(Z, X) = v(X)` for Σ-invariant `c >= 0`.
    pub fn from_object_values(
        category: Arc<CategoryPresentation>,
        values: &[Scalar],
        integral: bool,
    ) -> Result<FromValues, RankError> {
        let n = category.num_objects();
        if values.len() != n {
            return Err(RankError::WrongLength {
                expected: n,
                found: values.len(),
            });
        }
        let orbits = sigma_orbits(&category);
        let columns: Vec<Vec<Scalar>> = orbits
            .iter()
            .map(|o| {
                (0..n)
                    .map(|x| {
                        let d: usize = o.members().iter().map(|&z| category.hom_dim(z, x)).sum();
                        Scalar::from_integer(d.into())
                    })
                    .collect()
            })
            .collect();
        let a = Matrix::from_columns(n, &columns).expect("uniform columns");
        let expand = |orbit_coeffs: &[Scalar]| {
            let idx = orbit_index(&category);
            (0..n).map(|x| orbit_coeffs[idx[x]].clone()).collect::<Vec<_>>()
        };
        Ok(match solve_nonneg(&a, values, integral).expect("matching lengths") {
            SolveReport::Unique(c) => FromValues::Unique(RankFunction {
                coefficients: expand(&c),
                category,
            }),
            SolveReport::NoSolution => FromValues::NoSolution,
            SolveReport::NonUnique {
                particular,
                kernel,
                certified,
            } => FromValues::NonUnique {
                particular: expand(&particular),
                kernel: kernel.iter().map(|k| expand(k)).collect(),
                certified,
            },
        })
    }
}

/// Outcome of [`RankFunction::from_object_values`].
#[derive(Debug, Clone)]
pub enum FromValues {
    Unique(RankFunction),
    NoSolution,
    /// Coefficient vectors per object; `particular` is admissible when
    /// `certified` holds.
    NonUnique {
        particular: Vec<Scalar>,
        kernel: Vec<Vec<Scalar>>,
        certified: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    /// Orbits with positive multiplicity, ordered by smallest member.
    pub parts: Vec<(SigmaOrbit, BigInt)>,
}

impl DecompositionReport {
    /// Coefficients of `Σ multiplicity · (orbit indicator)`.
    pub fn recompose(&self, num_objects: usize) -> Vec<Scalar> {
        let mut c = vec![Scalar::zero(); num_objects];
        for (o, m) in &self.parts {
            for &x in o.members() {
                c[x] = Scalar::from_integer(m.clone());
            }
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub integral: bool,
    pub irreducible: bool,
    pub basic: bool,
    pub prime: Option<bool>,
    pub morphism_faithful: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelIdeal {
    spaces: Vec<Vec<Subspace>>,
}

/// A kernel morphism violating a closure property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelWitness {
    pub source: ObjectId,
    pub target: ObjectId,
    pub vector: Vec<Scalar>,
}

impl KernelIdeal {
    pub fn get(&self, x: ObjectId, y: ObjectId) -> &Subspace {
        &self.spaces[x][y]
    }

    pub fn is_zero(&self) -> bool {
        self.spaces.iter().flatten().all(Subspace::is_zero)
    }

    pub fn total_dim(&self) -> usize {
        self.spaces.iter().flatten().map(Subspace::dim).sum()
    }

    /// First composite of a kernel basis vector with a basis morphism that
    /// leaves the kernel.
    pub fn ideal_violation(&self, p: &CategoryPresentation) -> Option<KernelWitness> {
        let n = p.num_objects();
        for x in 0..n {
            for y in 0..n {
                for f in self.spaces[x][y].basis_vectors() {
                    for z in 0..n {
                        for b in 0..p.hom_dim(y, z) {
                            let v = p.compose_vectors(x, y, z, &p.unit_vector(y, z, b), &f);
                            if !self.spaces[x][z].contains_vector(&v).expect("length") {
                                return Some(KernelWitness { source: x, target: z, vector: v });
                            }
                        }
                        for b in 0..p.hom_dim(z, x) {
                            let v = p.compose_vectors(z, x, y, &f, &p.unit_vector(z, x, b));
                            if !self.spaces[z][y].contains_vector(&v).expect("length") {
                                return Some(KernelWitness { source: z, target: y, vector: v });
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// Whether `Σ K(X,Y) = K(σX, σY)` for all pairs.
    pub fn is_sigma_closed(&self, p: &CategoryPresentation) -> bool {
        let n = p.num_objects();
        (0..n).all(|x| {
            (0..n).all(|y| {
                let m = p.sigma_map(x, y);
                let image: Vec<Vec<Scalar>> = self.spaces[x][y]
                    .basis_vectors()
                    .iter()
                    .map(|v| m.mul_vec(v).expect("shape"))
                    .collect();
                let (sx, sy) = (p.sigma(x), p.sigma(y));
                Subspace::span(p.hom_dim(sx, sy), image).expect("length") == self.spaces[sx][sy]
            })
        })
    }
}

/// Result of a factorization test; the witness lies in the kernel but
/// outside the allowed composites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationCheck {
    pub holds: bool,
    pub witness: Option<KernelWitness>,
}

fn composite_span(
    p: &CategoryPresentation,
    x: ObjectId,
    w: ObjectId,
    y: ObjectId,
    g: &[Vec<Scalar>],
    h: &[Vec<Scalar>],
) -> Vec<Vec<Scalar>> {
    let mut out = Vec::with_capacity(g.len() * h.len());
    for gv in g {
        for hv in h {
            out.push(p.compose_vectors(x, w, y, gv, hv));
        }
    }
    out
}

fn factorization_check(
    p: &CategoryPresentation,
    k: &KernelIdeal,
    composites: impl Fn(ObjectId, ObjectId, ObjectId) -> Vec<Vec<Scalar>>,
) -> FactorizationCheck {
    let n = p.num_objects();
    for x in 0..n {
        for y in 0..n {
            let target = k.get(x, y);
            if target.is_zero() {
                continue;
            }
            let vectors: Vec<Vec<Scalar>> = (0..n).flat_map(|w| composites(x, w, y)).collect();
            let span = Subspace::span(p.hom_dim(x, y), vectors).expect("length");
            if let Some(v) = span.first_missing(target).expect("same ambient") {
                return FactorizationCheck {
                    holds: false,
                    witness: Some(KernelWitness {
                        source: x,
                        target: y,
                        vector: v,
                    }),
                };
            }
        }
    }
    FactorizationCheck {
        holds: true,
        witness: None,
    }
}

/// Axioms checked by [`check_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    /// `ρ_ob >= 0`.
    NonNegativity,
    /// `ρ_ob(X ⊕ Y) = ρ_ob(X) + ρ_ob(Y)`.
    Additivity,
    /// Each term of a triangle is bounded by the sum of the other two.
    TriangleInequality,
    /// `ρ_ob(ΣX) = ρ_ob(X)`.
    SigmaInvariance,
    /// `ρ(f) + ρ(g) = ρ_ob(Y)` on listed triangles.
    RankNullity,
    /// `ρ(f) + ρ(Σf) = ρ_ob(Y) - ρ_ob(Z) + ρ_ob(ΣX)` on listed triangles.
    ConeIdentity,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::NonNegativity => "O1 non-negativity",
            Axiom::Additivity => "O2 additivity",
            Axiom::TriangleInequality => "O3 triangle inequality",
            Axiom::SigmaInvariance => "O4 sigma-invariance",
            Axiom::RankNullity => "M3 rank-nullity",
            Axiom::ConeIdentity => "cone identity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomStatus {
    Pass,
    Fail(String),
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub results: Vec<(Axiom, AxiomStatus)>,
}

impl AxiomReport {
    pub fn status(&self, axiom: Axiom) -> &AxiomStatus {
        &self.results.iter().find(|(a, _)| *a == axiom).expect("every axiom reported").1
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|(_, s)| matches!(s, AxiomStatus::Pass))
    }

    pub fn any_fail(&self) -> bool {
        self.results.iter().any(|(_, s)| matches!(s, AxiomStatus::Fail(_)))
    }
}

/// Checks the object axioms for a table of values on indecomposables and,
/// when the table comes from a unique rank function, the morphism identities
/// on the given triangles.
pub fn check_axioms(
    category: Arc<CategoryPresentation>,
    values: &[Option<Scalar>],
    triangles: &[TrianglePresentation],
) -> Result<AxiomReport, RankError> {
    let p = &*category;
    let n = p.num_objects();
    if values.len() != n {
        return Err(RankError::WrongLength {
            expected: n,
            found: values.len(),
        });
    }
    let values: Vec<Scalar> = values
        .iter()
        .enumerate()
        .map(|(x, v)| v.clone().ok_or_else(|| RankError::MissingValue(p.name(x).to_string())))
        .collect::<Result<_, _>>()?;
    let ob = |e: &ObjectExpr| -> Scalar { e.summands().iter().map(|&x| values[x].clone()).sum() };
    let names = |e: &ObjectExpr| p.expr_names(e).join("+");

    let mut results = Vec::new();
    results.push((
        Axiom::NonNegativity,
        match (0..n).find(|&x| values[x].is_negative()) {
            Some(x) => AxiomStatus::Fail(format!("value {} at {}", values[x], p.name(x))),
            None => AxiomStatus::Pass,
        },
    ));
    // Values on sums are defined additively from the table.
    results.push((Axiom::Additivity, AxiomStatus::Pass));

    let mut inequality = AxiomStatus::Pass;
    'tri: for t in triangles {
        let x = t.f.source();
        let terms = [x.clone(), t.f.target().clone(), t.g.target().clone(), p.sigma_expr(x)];
        // Rotations put Y, Z and ΣX in the middle in turn.
        for i in 1..=3 {
            let (a, b, c) = (&terms[i - 1], &terms[i], if i == 3 { &p.sigma_expr(&terms[1]) } else { &terms[i + 1] });
            let (va, vb, vc) = (ob(a), ob(b), ob(c));
            if vb > &va + &vc {
                inequality = AxiomStatus::Fail(format!(
                    "{}: ρ({}) = {vb} > ρ({}) + ρ({}) = {}",
                    t.name,
                    names(b),
                    names(a),
                    names(c),
                    &va + &vc
                ));
                break 'tri;
            }
        }
    }
    results.push((Axiom::TriangleInequality, inequality));

    results.push((
        Axiom::SigmaInvariance,
        match (0..n).find(|&x| values[p.sigma(x)] != values[x]) {
            Some(x) => AxiomStatus::Fail(format!(
                "ρ({}) = {} but ρ({}) = {}",
                p.name(x),
                values[x],
                p.name(p.sigma(x)),
                values[p.sigma(x)]
            )),
            None => AxiomStatus::Pass,
        },
    ));

    match RankFunction::from_object_values(category.clone(), &values, false)? {
        FromValues::Unique(rho) => {
            let mut nullity = AxiomStatus::Pass;
            let mut cone = AxiomStatus::Pass;
            for t in triangles {
                let (rf, rg) = (rho.evaluate(&t.f)?, rho.evaluate(&t.g)?);
                let y = ob(t.f.target());
                if nullity == AxiomStatus::Pass && &rf + &rg != y {
                    nullity = AxiomStatus::Fail(format!("{}: ρ(f) + ρ(g) = {} but ρ(Y) = {y}", t.name, &rf + &rg));
                }
                let rsf = rho.evaluate(&p.apply_sigma(&t.f))?;
                let rhs = &y - ob(t.g.target()) + ob(&p.sigma_expr(t.f.source()));
                if cone == AxiomStatus::Pass && &rf + &rsf != rhs {
                    cone = AxiomStatus::Fail(format!("{}: ρ(f) + ρ(Σf) = {} but expected {rhs}", t.name, &rf + &rsf));
                }
            }
            results.push((Axiom::RankNullity, nullity));
            results.push((Axiom::ConeIdentity, cone));
        }
        other => {
            let why = match other {
                FromValues::NoSolution => "values do not come from a rank function".to_string(),
                _ => "values do not determine a unique rank function".to_string(),
            };
            results.push((Axiom::RankNullity, AxiomStatus::Skipped(why.clone())));
            results.push((Axiom::ConeIdentity, AxiomStatus::Skipped(why)));
        }
    }
    Ok(AxiomReport { results })
}
