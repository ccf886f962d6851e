//! Finitely presented functors on a presentation, seen through their
//! dimension vectors.

use std::collections::BTreeMap;
use std::ops::Add;

use crate::category::{CategoryError, CategoryPresentation, MorphismMatrix, ObjectExpr, ObjectId};

/// `Z ↦ dim F(Z)` for a finitely presented functor `F`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DimensionVector(Vec<usize>);

impl DimensionVector {
    pub fn new(entries: Vec<usize>) -> Self {
        DimensionVector(entries)
    }

    pub fn zero(n: usize) -> Self {
        DimensionVector(vec![0; n])
    }

    /// The dimension vector of the simple functor at `z`.
    pub fn indicator(n: usize, z: ObjectId) -> Self {
        let mut v = vec![0; n];
        v[z] = 1;
        DimensionVector(v)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, z: ObjectId) -> usize {
        self.0[z]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }
}

impl Add for &DimensionVector {
    type Output = DimensionVector;

    fn add(self, rhs: &DimensionVector) -> DimensionVector {
        assert_eq!(self.len(), rhs.len(), "dimension vectors over different presentations");
        DimensionVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

/// The simple functor `Hom(-, Z) / rad(-, Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimpleFunctor {
    pub anchor: ObjectId,
}

/// Dimension vector of `Im Hom(-, f)`.
pub fn image_dim_vector(p: &CategoryPresentation, f: &MorphismMatrix) -> Result<DimensionVector, CategoryError> {
    p.check_morphism(f)?;
    (0..p.num_objects())
        .map(|z| p.hom_map(z, f).map(|m| m.rank()))
        .collect::<Result<_, _>>()
        .map(DimensionVector)
}

/// Dimension vector of the representable functor `Hom(-, X)`.
pub fn representable(p: &CategoryPresentation, x: &ObjectExpr) -> DimensionVector {
    DimensionVector((0..p.num_objects()).map(|z| p.hom_dim_expr(z, x)).collect())
}

/// Composition factors of a functor with the given dimension vector.
/// Over a k-split presentation `[F : S_Z] = dim F(Z)`.
pub fn composition_multiplicities(dv: &DimensionVector) -> BTreeMap<SimpleFunctor, usize> {
    dv.0.iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(z, &d)| (SimpleFunctor { anchor: z }, d))
        .collect()
}

/// Composition length.
pub fn length(dv: &DimensionVector) -> usize {
    dv.0.iter().sum()
}

/// A cycle of σ, starting at its smallest member.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SigmaOrbit(Vec<ObjectId>);

impl SigmaOrbit {
    pub fn members(&self) -> &[ObjectId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn smallest(&self) -> ObjectId {
        self.0[0]
    }

    pub fn contains(&self, x: ObjectId) -> bool {
        self.0.contains(&x)
    }
}

/// The σ-cycles, ordered by smallest member.
pub fn sigma_orbits(p: &CategoryPresentation) -> Vec<SigmaOrbit> {
    let n = p.num_objects();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let mut cycle = vec![x];
        seen[x] = true;
        let mut y = p.sigma(x);
        while y != x {
            seen[y] = true;
            cycle.push(y);
            y = p.sigma(y);
        }
        out.push(SigmaOrbit(cycle));
    }
    out
}

/// Index into [`sigma_orbits`] of the orbit of each object.
pub fn orbit_index(p: &CategoryPresentation) -> Vec<usize> {
    let mut idx = vec![0; p.num_objects()];
    for (i, o) in sigma_orbits(p).iter().enumerate() {
        for &x in o.members() {
            idx[x] = i;
        }
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities_and_length() {
        let dv = DimensionVector::indicator(4, 2);
        assert_eq!(
            composition_multiplicities(&dv),
            BTreeMap::from([(SimpleFunctor { anchor: 2 }, 1)])
        );
        assert_eq!(length(&dv), 1);
        let zero = DimensionVector::zero(4);
        assert!(composition_multiplicities(&zero).is_empty());
        assert_eq!(length(&zero), 0);
        let sum = &dv + &DimensionVector::new(vec![1, 0, 2, 0]);
        assert_eq!(sum.entries(), [1, 0, 3, 0]);
    }
}
