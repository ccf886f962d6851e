use std::collections::BTreeMap;

use trirank::mesh::{MeshCategory, TranslationQuiverSpec};

fn mesh_arrows(n: usize) -> (MeshCategory, BTreeMap<(usize, usize), usize>) {
    let m = MeshCategory::build(&TranslationQuiverSpec::cluster(n)).unwrap();
    let mut counts = BTreeMap::new();
    for a in m.arrows() {
        *counts.entry(a).or_insert(0) += 1;
    }
    (m, counts)
}

#[test]
fn irreducible_maps_recover_the_orbit_quiver() {
    for n in 1..=4 {
        let (m, arrows) = mesh_arrows(n);
        let p = m.presentation();
        let mut found = BTreeMap::new();
        for x in 0..p.num_objects() {
            for y in 0..p.num_objects() {
                let d = p.irreducible_dim(x, y);
                if d > 0 {
                    found.insert((x, y), d);
                }
            }
        }
        assert_eq!(found, arrows, "A{n}");
    }
}

#[test]
fn a3_quiver_has_twelve_arrows() {
    let (_, arrows) = mesh_arrows(3);
    assert_eq!(arrows.values().sum::<usize>(), 12);
}

#[test]
fn a1_has_no_irreducible_maps() {
    let (m, arrows) = mesh_arrows(1);
    assert!(arrows.is_empty());
    let p = m.presentation();
    assert_eq!(p.num_objects(), 2);
    assert_eq!(p.irreducible_dim(0, 0), 0);
}
