use mmwave::topology::{AssociationState, GnbId, UeId, Violation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng) -> AssociationState {
    let ues = rng.random_range(1..6);
    let gnbs = rng.random_range(1..6);
    let p = rng.random_range(0.1..0.9);
    let mut s = AssociationState::new(ues, gnbs);
    for u in 0..ues {
        for b in 0..gnbs {
            s.set_association(UeId(u as u32), GnbId(b as u32), rng.random_bool(p));
            s.set_clustering(UeId(u as u32), GnbId(b as u32), rng.random_bool(p));
        }
    }
    for b in 0..gnbs {
        s.set_activity(GnbId(b as u32), rng.random_bool(0.5));
    }
    s
}

/// A gNB is active iff some UE is both associated with and clustered to it.
fn existential_activity(s: &AssociationState) -> Vec<bool> {
    (0..s.gnb_count())
        .map(|b| {
            (0..s.ue_count()).any(|u| {
                s.association(UeId(u as u32), GnbId(b as u32)) && s.clustering(UeId(u as u32), GnbId(b as u32))
            })
        })
        .collect()
}

#[test]
fn derived_activity_equals_existential_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10_000 {
        let s = random_state(&mut rng);
        let derived = s.derive_activity();
        let expected = existential_activity(&s);
        for (b, &want) in expected.iter().enumerate() {
            assert_eq!(derived.activity(GnbId(b as u32)), want);
        }
    }
}

#[test]
fn constructed_violations_are_reported_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..10_000 {
        // Start from a consistent state where every UE is served, then break it.
        let mut s = random_state(&mut rng);
        let (ues, gnbs) = (s.ue_count(), s.gnb_count());
        for u in 0..ues {
            let b = rng.random_range(0..gnbs);
            s.set_association(UeId(u as u32), GnbId(b as u32), true);
            s.set_clustering(UeId(u as u32), GnbId(b as u32), true);
        }
        let mut s = s.derive_activity();
        assert!(s.validate_constraints().is_empty());

        let mut expected = Vec::new();
        let uncovered = rng.random_range(0..ues);
        if rng.random_bool(0.5) {
            for b in 0..gnbs {
                s.set_clustering(UeId(uncovered as u32), GnbId(b as u32), false);
            }
            s = s.derive_activity();
        } else {
            // Silence one gNB without touching the indicators that need it.
            let b = rng.random_range(0..gnbs);
            s.set_activity(GnbId(b as u32), false);
        }
        for u in 0..ues {
            for b in 0..gnbs {
                let (ue, gnb) = (UeId(u as u32), GnbId(b as u32));
                if s.association(ue, gnb) && s.clustering(ue, gnb) && !s.activity(gnb) {
                    expected.push(Violation::ActivityBound { ue, gnb });
                }
            }
        }
        for u in 0..ues {
            let ue = UeId(u as u32);
            if !(0..gnbs).any(|b| s.association(ue, GnbId(b as u32)) && s.clustering(ue, GnbId(b as u32))) {
                expected.push(Violation::Uncovered { ue });
            }
        }
        assert_eq!(s.validate_constraints(), expected);
    }
}

#[test]
fn single_pair_examples() {
    let s = AssociationState::from_indicators(vec![false], vec![vec![true]], vec![vec![true]]).unwrap();
    assert_eq!(
        s.validate_constraints(),
        vec![Violation::ActivityBound {
            ue: UeId(0),
            gnb: GnbId(0)
        }]
    );
    let s = AssociationState::from_indicators(vec![true, true], vec![vec![false, true]], vec![vec![true, false]]).unwrap();
    assert_eq!(s.validate_constraints(), vec![Violation::Uncovered { ue: UeId(0) }]);
}
