#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use trirank::category::{CategoryPresentation, ObjectExpr, ObjectId};
use trirank::functor::sigma_orbits;
use trirank::linalg::Scalar;
use trirank::mesh::cluster_category_an;
use trirank::rank::RankFunction;

pub fn cluster(n: usize) -> Arc<CategoryPresentation> {
    Arc::new(cluster_category_an(n).expect("cluster category builds"))
}

pub fn a3() -> Arc<CategoryPresentation> {
    cluster(3)
}

pub fn obj(p: &CategoryPresentation, name: &str) -> ObjectId {
    p.object(name).unwrap()
}

pub fn single(p: &CategoryPresentation, name: &str) -> ObjectExpr {
    ObjectExpr::single(obj(p, name))
}

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(v.into())
}

/// ρ₁, ρ₂ and ℓ on A₃.
pub fn a3_functions(p: &Arc<CategoryPresentation>) -> (RankFunction, RankFunction, RankFunction) {
    (
        RankFunction::orbit_indicator(p.clone(), obj(p, "T1")),
        RankFunction::orbit_indicator(p.clone(), obj(p, "T2")),
        RankFunction::canonical_length(p.clone()),
    )
}

/// Random Σ-invariant non-negative integral coefficients in `0..=max`.
pub fn random_rank_function(p: &Arc<CategoryPresentation>, rng: &mut ChaCha8Rng, max: i64) -> RankFunction {
    let mut c = vec![Scalar::from_integer(0.into()); p.num_objects()];
    for o in sigma_orbits(p) {
        let v = int(rng.gen_range(0..=max));
        for &x in o.members() {
            c[x] = v.clone();
        }
    }
    RankFunction::new(p.clone(), c).unwrap()
}

/// The triangle `T1 → T3 → Σ⁻¹T2 → ΣT1` on the connecting morphism `T1 → T3`.
pub fn a3_cone_triangle(p: &CategoryPresentation) -> trirank::TrianglePresentation {
    let (t3, m2, s1) = (obj(p, "T3"), obj(p, "S-1T2"), obj(p, "S1T1"));
    assert_eq!((p.hom_dim(t3, m2), p.hom_dim(m2, s1)), (1, 1));
    let t = trirank::TrianglePresentation {
        name: "cone_T1_T3".into(),
        f: p.morphism("conn_T1").unwrap().clone(),
        g: p.basis_morphism(t3, m2, 0),
        h: p.basis_morphism(m2, s1, 0),
    };
    assert!(p.check_triangle(&t).is_empty(), "{:?}", p.check_triangle(&t));
    t
}
