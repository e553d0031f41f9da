//! The Lie-geometric criteria and the direct front criteria give the same
//! class on random steered instances.

use std::collections::BTreeMap;

use liefront::classify::{classify_lie, classify_rank1, Tolerances};
use liefront::sampling;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn lie_and_direct_routes_agree_on_random_instances() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut counts = BTreeMap::new();
    let mut checked = 0;
    while checked < 150 {
        let inst = sampling::random_instance(&mut rng);
        let front = inst.problem().front_at(inst.point.0, inst.point.1, 7).unwrap();
        let direct = classify_rank1(&front, &tol)
            .unwrap_or_else(|e| panic!("{:?} at {:?}: {e}", inst.surface.components, inst.point));
        let lie = classify_lie(&inst.geometry.lift, &inst.geometry.pd, &inst.matrix, &tol).unwrap();
        assert_eq!(
            direct.class, lie.class,
            "surface {:?} at {:?}, {:?} mode\ndirect {:?}\nlie {:?}",
            inst.surface.components, inst.point, inst.mode, direct.margins, lie.margins
        );
        *counts.entry(direct.class).or_insert(0) += 1;
        checked += 1;
    }
    // the families exercise every generic rank-one class
    assert!(counts.len() >= 5, "{counts:?}");
}
