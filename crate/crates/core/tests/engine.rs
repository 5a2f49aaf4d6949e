use mmwave::engine::{run_scenario, run_single, Cause, RunSpec, Scenario, Scheme, SweepOptions, World};

fn short(seeds: u64) -> Scenario {
    Scenario {
        speed_sweep: vec![30.0, 90.0],
        seeds,
        total_slots: Some(3_000),
        ..Scenario::default()
    }
}

#[test]
fn identical_inputs_give_identical_sweeps() {
    let s = short(3);
    let a = run_scenario(&s, &SweepOptions { trace: true }).unwrap();
    let b = run_scenario(&s, &SweepOptions { trace: true }).unwrap();
    assert_eq!(a, b);
}

#[test]
fn base_seed_changes_results() {
    let a = run_scenario(&short(2), &SweepOptions::default()).unwrap();
    let b = run_scenario(
        &Scenario {
            seed: 99,
            ..short(2)
        },
        &SweepOptions::default(),
    )
    .unwrap();
    assert_ne!(a.runs, b.runs);
}

#[test]
fn partial_sweep_reproduces_full_rows() {
    let full = run_scenario(&short(3), &SweepOptions::default()).unwrap();
    let part = run_scenario(
        &Scenario {
            speed_sweep: vec![90.0],
            ..short(3)
        },
        &SweepOptions::default(),
    )
    .unwrap();
    for row in &part.rows {
        assert_eq!(Some(row), full.row(90.0, row.scheme));
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let s = short(4);
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_scenario(&s, &SweepOptions::default()).unwrap());
    let three = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(|| run_scenario(&s, &SweepOptions::default()).unwrap());
    assert_eq!(one, three);
}

#[test]
fn cluster_scheme_never_empty_and_never_interrupted() {
    let s = Scenario {
        total_slots: None,
        ..short(1)
    };
    for speed in [30.0, 90.0] {
        let mut w = World::new(&s, RunSpec::derive(s.seed, speed, Scheme::Multi, 0)).unwrap();
        while !w.is_finished() {
            let o = w.run_slot().unwrap();
            assert!(o.serving_count() >= 1);
            assert_ne!(o.cause, Cause::HandoverInterruption);
            if let Some(h) = &o.handover {
                assert_eq!(h.interruption_slots, 0);
            }
        }
    }
}

#[test]
fn single_link_interruptions_follow_handovers() {
    let s = Scenario {
        total_slots: None,
        seeds: 1,
        ..Scenario::default()
    };
    let mut handovers = 0;
    for run in 0..5 {
        let mut w = World::new(&s, RunSpec::derive(s.seed, 90.0, Scheme::Single, run)).unwrap();
        let mut window_end = None;
        while !w.is_finished() {
            let o = w.run_slot().unwrap();
            assert_eq!(o.serving_count(), 1);
            if let Some(h) = &o.handover {
                handovers += 1;
                window_end = Some(h.slot + h.interruption_slots);
            }
            let interrupted = window_end.is_some_and(|end| o.slot < end);
            assert_eq!(o.cause == Cause::HandoverInterruption, interrupted, "slot {}", o.slot);
        }
    }
    assert!(handovers >= 1, "the edge path crosses cell borders");
}

/// With no interruption, no cluster growth, sticky membership and no
/// handovers, both schemes reduce to the same fixed link.
#[test]
fn schemes_coincide_when_reduced_to_one_fixed_link() {
    let s = Scenario {
        handover_interruption_slots: 0,
        handover_hysteresis_db: 1e9,
        max_cluster_size: Some(1),
        enter_threshold_db: -999.0,
        exit_threshold_db: -1000.0,
        total_slots: Some(5_000),
        ..Scenario::default()
    };
    for run in 0..3 {
        for speed in [30.0, 75.0] {
            let (single, _) = run_single(&s, RunSpec::derive(0, speed, Scheme::Single, run), false).unwrap();
            let multi_spec = RunSpec {
                scheme: Scheme::Multi,
                ..RunSpec::derive(0, speed, Scheme::Single, run)
            };
            let (multi, _) = run_single(&s, multi_spec, false).unwrap();
            assert_eq!(single.succeeded, multi.succeeded);
            assert_eq!(multi.handovers, 0);
            assert_eq!(single.handovers, 0);
        }
    }
}

#[test]
fn stationary_ue_needs_explicit_slot_count() {
    let s = Scenario {
        speed_sweep: vec![0.0],
        ..Scenario::default()
    };
    assert!(run_scenario(&s, &SweepOptions::default()).is_err());
    let s = Scenario {
        total_slots: Some(100),
        seeds: 1,
        ..s
    };
    let r = run_scenario(&s, &SweepOptions::default()).unwrap();
    assert!(r.runs.iter().all(|m| m.transmitted == 100));
}
