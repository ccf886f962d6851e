//! Rank functions valued in an ordered module `M` with a distinguished
//! ring element `q`, subject to `ρ(Σf) = q·ρ(f)`.
//!
//! Three modules are provided: `ℤ` with `q = 1`, `ℤ[x]/(x^d - 1)` and
//! `ℤ[x, x⁻¹]`, the latter two with `q = x`. Elements are integer
//! polynomials ordered coefficientwise.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::category::{CategoryError, CategoryPresentation, MorphismMatrix, ObjectExpr, TrianglePresentation};
use crate::functor::image_dim_vector;
use crate::linalg::Scalar;
use crate::rank::RankFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instance {
    /// `ℤ`, `q = 1`.
    Integers,
    /// `ℤ[x]/(x^d - 1)`, `q = x`.
    Periodic(usize),
    /// `ℤ[x, x⁻¹]`, `q = x`.
    Laurent,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Integers => f.write_str("integers"),
            Instance::Periodic(d) => write!(f, "periodic:{d}"),
            Instance::Laurent => f.write_str("laurent"),
        }
    }
}

impl FromStr for Instance {
    type Err = ParseInstanceError;

    /// Inverse of `Display`: `integers`, `periodic:d` or `laurent`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "integers" => Ok(Instance::Integers),
            "laurent" => Ok(Instance::Laurent),
            _ => s
                .strip_prefix("periodic:")
                .and_then(|d| d.parse().ok())
                .filter(|&d| d > 0)
                .map(Instance::Periodic)
                .ok_or_else(|| ParseInstanceError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown instance {0:?}; expected integers, periodic:<d> with d >= 1, or laurent")]
pub struct ParseInstanceError(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QRankError {
    #[error("morphism does not belong to this presentation: {0}")]
    CategoryMismatch(CategoryError),
    #[error("expected {expected} coefficients, got {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("coefficient at {0} is not non-negative")]
    Negative(String),
    #[error("coefficient at σ({0}) is not q times the coefficient at {0}")]
    NotTwisted(String),
    #[error("q + 1 is not regular on {0}")]
    NotRegular(Instance),
    #[error("{numerator} is not divisible by q + 1")]
    NotDivisible { numerator: String },
    #[error("quotient {quotient} is not non-negative")]
    NegativeQuotient { quotient: String },
    #[error("period must be at least 1")]
    ZeroPeriod,
}

/// A module element, stored as exponent ↦ nonzero integer coefficient and
/// kept reduced for its instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Element(BTreeMap<i64, BigInt>);

impl Element {
    pub fn zero() -> Self {
        Element(BTreeMap::new())
    }

    pub fn terms(&self) -> &BTreeMap<i64, BigInt> {
        &self.0
    }

    pub fn coefficient(&self, e: i64) -> BigInt {
        self.0.get(&e).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.values().all(|c| !c.is_negative())
    }

    /// The image under `x ↦ 1`.
    pub fn at_one(&self) -> BigInt {
        self.0.values().sum()
    }

    fn insert_add(&mut self, e: i64, c: BigInt) {
        let entry = self.0.entry(e).or_default();
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&e);
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.0.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            match *e {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}")?;
                    }
                    if *e == 1 {
                        f.write_str("x")?;
                    } else {
                        write!(f, "x^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Instance {
    pub fn validate(&self) -> Result<(), QRankError> {
        match self {
            Instance::Periodic(0) => Err(QRankError::ZeroPeriod),
            _ => Ok(()),
        }
    }

    /// Whether multiplication by `q + 1` is injective.
    pub fn q_plus_one_regular(&self) -> bool {
        match self {
            Instance::Integers | Instance::Laurent => true,
            Instance::Periodic(d) => d % 2 == 1,
        }
    }

    fn reduce_exponent(&self, e: i64) -> i64 {
        match self {
            Instance::Integers => 0,
            Instance::Periodic(d) => e.rem_euclid(*d as i64),
            Instance::Laurent => e,
        }
    }

    /// `Σ coeffs[e] x^e`, reduced.
    pub fn element(&self, terms: impl IntoIterator<Item = (i64, BigInt)>) -> Element {
        let mut out = Element::zero();
        for (e, c) in terms {
            out.insert_add(self.reduce_exponent(e), c);
        }
        out
    }

    pub fn constant(&self, c: impl Into<BigInt>) -> Element {
        self.element([(0, c.into())])
    }

    /// `q^k`.
    pub fn q_pow(&self, k: i64) -> Element {
        self.element([(k, BigInt::one())])
    }

    /// Dense coefficient list `[c_0, …, c_{d-1}]` for periodic elements.
    pub fn from_dense(&self, coeffs: &[BigInt]) -> Element {
        self.element(coeffs.iter().enumerate().map(|(e, c)| (e as i64, c.clone())))
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        let mut out = a.clone();
        for (e, c) in &b.0 {
            out.insert_add(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        let mut out = a.clone();
        for (e, c) in &b.0 {
            out.insert_add(*e, -c.clone());
        }
        out
    }

    pub fn scale(&self, a: &Element, k: &BigInt) -> Element {
        self.element(a.0.iter().map(|(e, c)| (*e, c * k)))
    }

    pub fn mul_q_pow(&self, a: &Element, k: i64) -> Element {
        self.element(a.0.iter().map(|(e, c)| (e + k, c.clone())))
    }

    /// The unique `z` with `(q + 1) z = n`.
    pub fn divide_by_q_plus_one(&self, n: &Element) -> Result<Element, QRankError> {
        let not_divisible = || QRankError::NotDivisible {
            numerator: n.to_string(),
        };
        let z = match self {
            Instance::Integers => {
                let (q, r) = n.coefficient(0).div_rem(&BigInt::from(2));
                if !r.is_zero() {
                    return Err(not_divisible());
                }
                self.constant(q)
            }
            Instance::Periodic(d) => {
                if d % 2 == 0 {
                    return Err(QRankError::NotRegular(*self));
                }
                let d = *d as i64;
                // Coefficient i of (1 + x) z is z_i + z_{i-1}; the alternating
                // sum of the n_i telescopes to 2 z_{d-1}.
                let alt: BigInt = (0..d)
                    .map(|i| if i % 2 == 0 { n.coefficient(i) } else { -n.coefficient(i) })
                    .sum();
                let (last, r) = alt.div_rem(&BigInt::from(2));
                if !r.is_zero() {
                    return Err(not_divisible());
                }
                let mut z = vec![BigInt::zero(); d as usize];
                let mut prev = last;
                for i in 0..d {
                    z[i as usize] = n.coefficient(i) - &prev;
                    prev = z[i as usize].clone();
                }
                self.from_dense(&z)
            }
            Instance::Laurent => {
                let (Some(&lo), Some(&hi)) = (n.0.keys().next(), n.0.keys().next_back()) else {
                    return Ok(Element::zero());
                };
                let mut z = Vec::new();
                let mut prev = BigInt::zero();
                for i in lo..hi {
                    let zi = n.coefficient(i) - &prev;
                    z.push((i, zi.clone()));
                    prev = zi;
                }
                if n.coefficient(hi) != prev {
                    return Err(not_divisible());
                }
                self.element(z)
            }
        };
        debug_assert_eq!(&self.add(&z, &self.mul_q_pow(&z, 1)), n);
        if !z.is_nonnegative() {
            return Err(QRankError::NegativeQuotient {
                quotient: z.to_string(),
            });
        }
        Ok(z)
    }
}

/// Convenience wrapper for [`Instance::q_plus_one_regular`].
pub fn q_plus_one_regular(inst: Instance) -> bool {
    inst.q_plus_one_regular()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QRankFunction {
    category: Arc<CategoryPresentation>,
    instance: Instance,
    coefficients: Vec<Element>,
}

impl QRankFunction {
    /// Coefficients must be non-negative with `c_{σZ} = q·c_Z`.
    pub fn new(
        category: Arc<CategoryPresentation>,
        instance: Instance,
        coefficients: Vec<Element>,
    ) -> Result<Self, QRankError> {
        instance.validate()?;
        let n = category.num_objects();
        if coefficients.len() != n {
            return Err(QRankError::WrongLength {
                expected: n,
                found: coefficients.len(),
            });
        }
        let coefficients: Vec<Element> = coefficients
            .into_iter()
            .map(|c| instance.element(c.0))
            .collect();
        for z in 0..n {
            if !coefficients[z].is_nonnegative() {
                return Err(QRankError::Negative(category.name(z).to_string()));
            }
            if coefficients[category.sigma(z)] != instance.mul_q_pow(&coefficients[z], 1) {
                return Err(QRankError::NotTwisted(category.name(z).to_string()));
            }
        }
        Ok(QRankFunction {
            category,
            instance,
            coefficients,
        })
    }

    /// An ordinary rank function viewed in `ℤ` with `q = 1`.
    pub fn from_rank_function(rho: &RankFunction) -> Result<Self, QRankError> {
        let coefficients = rho
            .coefficients()
            .iter()
            .enumerate()
            .map(|(z, c)| {
                if c.is_integer() {
                    Ok(Instance::Integers.constant(c.to_integer()))
                } else {
                    Err(QRankError::Negative(rho.category().name(z).to_string()))
                }
            })
            .collect::<Result<_, _>>()?;
        QRankFunction::new(rho.category().clone(), Instance::Integers, coefficients)
    }

    pub fn category(&self) -> &Arc<CategoryPresentation> {
        &self.category
    }

    pub fn instance(&self) -> Instance {
        self.instance
    }

    pub fn coefficients(&self) -> &[Element] {
        &self.coefficients
    }

    /// `ρ(f) = Σ_Z c_Z · rank Hom(Z, f)`.
    pub fn q_evaluate(&self, f: &MorphismMatrix) -> Result<Element, QRankError> {
        let dv = image_dim_vector(&self.category, f).map_err(QRankError::CategoryMismatch)?;
        Ok(self.pair(dv.entries()))
    }

    /// `ρ_ob(X) = ρ(1_X)`.
    pub fn objects_from_morphisms(&self, x: &ObjectExpr) -> Result<Element, QRankError> {
        self.q_evaluate(&self.category.identity(x))
    }

    /// `ρ_ob` on every indecomposable.
    pub fn object_values(&self) -> Vec<Element> {
        (0..self.category.num_objects())
            .map(|x| {
                self.objects_from_morphisms(&ObjectExpr::single(x))
                    .expect("known object")
            })
            .collect()
    }

    fn pair(&self, dims: &[usize]) -> Element {
        let inst = self.instance;
        dims.iter()
            .zip(&self.coefficients)
            .filter(|(&d, _)| d > 0)
            .fold(Element::zero(), |acc, (&d, c)| inst.add(&acc, &inst.scale(c, &BigInt::from(d))))
    }

    /// The ordinary rank function obtained by setting `x = 1`.
    pub fn specialize_to_rank(&self) -> RankFunction {
        let c = self
            .coefficients
            .iter()
            .map(|e| Scalar::from_integer(e.at_one()))
            .collect();
        RankFunction::new(self.category.clone(), c).expect("x = 1 preserves the invariants")
    }
}

/// `ρ(f) = (ρ_ob(Y) - ρ_ob(Z) + ρ_ob(ΣX)) / (q + 1)` for the triangle
/// `X -f-> Y -> Z -> ΣX`, from values on indecomposables.
pub fn morphisms_from_objects(
    p: &CategoryPresentation,
    instance: Instance,
    object_values: &[Element],
    t: &TrianglePresentation,
) -> Result<Element, QRankError> {
    instance.validate()?;
    if !instance.q_plus_one_regular() {
        return Err(QRankError::NotRegular(instance));
    }
    if object_values.len() != p.num_objects() {
        return Err(QRankError::WrongLength {
            expected: p.num_objects(),
            found: object_values.len(),
        });
    }
    p.check_morphism(&t.f).map_err(QRankError::CategoryMismatch)?;
    p.check_morphism(&t.g).map_err(QRankError::CategoryMismatch)?;
    let ob = |e: &ObjectExpr| {
        e.summands()
            .iter()
            .fold(Element::zero(), |acc, &x| instance.add(&acc, &object_values[x]))
    };
    let numerator = instance.add(
        &instance.sub(&ob(t.f.target()), &ob(t.g.target())),
        &ob(&p.sigma_expr(t.f.source())),
    );
    instance.divide_by_q_plus_one(&numerator)
}
