use gaborbench::erasure::{
    alltop_mub_frame, audit_subframes, delta_p, gabor_nerf_bound, mub_nerf_bound, mub_trace_m1_via_partitions,
    retained_count, verify_mub, SubsetMode,
};
use gaborbench::{FrameSet, FrameSetSpec, Window, WindowKind};

#[test]
fn partition_estimate_equals_exhaustive_first_order_estimate() {
    let (phi, assignment) = alltop_mub_frame(5, false).unwrap();
    let profile = verify_mub(&phi, &assignment).unwrap();
    for j in (19..=25).chain(2..=6) {
        let audit = audit_subframes(&phi, j, SubsetMode::Exhaustive).unwrap();
        let via_partitions = mub_trace_m1_via_partitions(&profile, j).unwrap();
        let exhaustive = audit.trace_estimate(1);
        if exhaustive.is_infinite() {
            assert!(via_partitions.is_infinite(), "J={j}");
        } else {
            assert!((via_partitions - exhaustive).abs() <= 1e-9, "J={j}: {via_partitions} vs {exhaustive}");
        }
    }
}

#[test]
fn estimates_bound_the_true_worst_case_at_small_erasures() {
    let (phi, assignment) = alltop_mub_frame(5, false).unwrap();
    let profile = verify_mub(&phi, &assignment).unwrap();
    let alltop = Window::generate(WindowKind::Alltop, 5, None).unwrap();
    for p in [0.0, 0.04, 0.08, 0.12, 0.16, 0.2, 0.24] {
        let j = retained_count(p, 25);
        let audit = audit_subframes(&phi, j, SubsetMode::Exhaustive).unwrap();
        let chain = [
            audit.worst_cond,
            audit.trace_estimate(2),
            audit.trace_estimate(1),
            mub_nerf_bound(p, profile.alpha).unwrap(),
        ];
        assert!(chain.windows(2).all(|w| w[0] <= w[1] + 1e-12), "p={p}: {chain:?}");
        assert!(audit.worst_cond <= gabor_nerf_bound(&alltop, p).unwrap(), "p={p}");
    }
}

#[test]
fn sampled_audit_never_exceeds_exhaustive_worst_case() {
    let (phi, _) = alltop_mub_frame(5, false).unwrap();
    let exhaustive = audit_subframes(&phi, 15, SubsetMode::Exhaustive).unwrap();
    let sampled = audit_subframes(&phi, 15, SubsetMode::Sample { count: 2000, seed: 8 }).unwrap();
    assert_eq!(exhaustive.visited, 3_268_760);
    assert_eq!(sampled.visited, 2000);
    assert!(sampled.worst_cond <= exhaustive.worst_cond);
    assert!(sampled.max_delta[0] <= exhaustive.max_delta[0] && sampled.max_delta[1] <= exhaustive.max_delta[1]);
}

#[test]
fn one_erasure_from_a_full_steinhaus_frame() {
    for m in [3usize, 4, 5] {
        let g = Window::generate(WindowKind::Steinhaus, m, Some(m as u64)).unwrap();
        let lambda = FrameSet::build(m, &FrameSetSpec::Full).unwrap();
        let p = 1.0 / (m * m) as f64;
        let lower = delta_p(&g, &lambda, p, SubsetMode::Exhaustive).unwrap();
        assert!((lower - (m as f64 - 1.0)).abs() <= 1e-9, "M={m}: {lower}");
    }
}
