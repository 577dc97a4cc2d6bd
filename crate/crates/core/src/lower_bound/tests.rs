use super::*;
use crate::geometry::dist2;

#[test]
fn pair_construction() {
    let p = build_lecam_pair(1.0, 0.05, 1, 2).unwrap();
    assert_eq!(p.m0.reach(), 1.0);
    assert_eq!(p.m1.reach(), 1.0);
    assert!(matches!(build_lecam_pair(1.0, 1.0, 1, 2), Err(Error::PerturbationExceedsReach)));
    assert!(build_lecam_pair(1.0, 0.05, 2, 2).is_err());
    let flat = build_lecam_pair(1.0, 0.0, 2, 3).unwrap();
    let mut rng = crate::rng::stream_rng(1, 0);
    for _ in 0..200 {
        let y: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        assert_eq!(flat.m0.distance_to_manifold(&y).unwrap(), flat.m1.distance_to_manifold(&y).unwrap());
    }
}

#[test]
fn hausdorff_separation_is_gamma() {
    let p = build_lecam_pair(1.0, 0.1, 1, 2).unwrap();
    let h = pair_hausdorff(&p, 0.005).unwrap();
    assert!((h - 0.1).abs() <= 0.01, "{h}");
    // Height-difference oracle: the largest vertical gap between the top
    // sheets sampled on the same s grid.
    let gap = (0..=2000)
        .map(|i| {
            let s = 2.0 * i as f64 / 2000.0;
            bump_height(1.0, 0.1, s).unwrap() - saucer_height(1.0, s).unwrap()
        })
        .fold(0.0, f64::max);
    assert!((h - gap).abs() <= 0.01);
    assert!(pair_hausdorff(&p, 0.02).is_err());
    let flat = build_lecam_pair(1.0, 0.0, 1, 2).unwrap();
    assert!(pair_hausdorff(&flat, 0.01).unwrap() <= 0.02);
}

#[test]
fn sym_diff_box_contains_the_difference() {
    let p = build_lecam_pair(1.0, 0.1, 1, 2).unwrap();
    let sigma = 0.3;
    let bbox = p.sym_diff_box(sigma);
    let wide = p.m0.bounding_box(sigma);
    let mut rng = crate::rng::stream_rng(2, 0);
    for _ in 0..200_000 {
        let y: Vec<f64> =
            wide.lower().iter().zip(wide.upper()).map(|(l, u)| rng.random_range(*l..*u)).collect();
        let (a, b) = p.in_tubes(&y, sigma);
        if a != b {
            assert!(bbox.contains(&y), "{y:?}");
        }
    }
}

#[test]
fn sym_diff_zero_when_flat() {
    let p = build_lecam_pair(1.0, 0.0, 1, 2).unwrap();
    let v = symmetric_difference_volume(&p, 0.3, 100_000, 1).unwrap();
    assert_eq!(v.value, 0.0);
    let l1 = l1_distance_bound(&p, 0.3, 100_000, 1).unwrap();
    assert_eq!(l1.direct.value, 0.0);
    assert_eq!(l1.proxy.value, 0.0);
}

#[test]
fn sym_diff_matches_grid_quadrature() {
    let p = build_lecam_pair(1.0, 0.05, 1, 2).unwrap();
    let sigma = 0.3;
    let est = symmetric_difference_volume(&p, sigma, 1_000_000, 3).unwrap();
    let bbox = p.sym_diff_box(sigma);
    let h = 1e-3;
    let nx = ((bbox.upper()[0] - bbox.lower()[0]) / h).ceil() as usize;
    let ny = ((bbox.upper()[1] - bbox.lower()[1]) / h).ceil() as usize;
    let mut cells = 0usize;
    for i in 0..nx {
        for j in 0..ny {
            let y = [bbox.lower()[0] + (i as f64 + 0.5) * h, bbox.lower()[1] + (j as f64 + 0.5) * h];
            let (a, b) = p.in_tubes(&y, sigma);
            cells += (a != b) as usize;
        }
    }
    let quad = cells as f64 * h * h;
    assert!((est.value - quad).abs() <= 3.0 * est.std_error, "{} vs {quad}", est.value);
}

#[test]
fn sym_diff_scaling_and_monotonicity() {
    let gammas = [0.02, 0.04, 0.08, 0.16];
    let vols: Vec<McEstimate> = gammas
        .iter()
        .map(|&g| symmetric_difference_volume(&build_lecam_pair(1.0, g, 1, 2).unwrap(), 0.3, 300_000, 4).unwrap())
        .collect();
    for w in vols.windows(2) {
        assert!(w[1].value + 3.0 * w[1].std_error >= w[0].value - 3.0 * w[0].std_error);
    }
    let ys: Vec<f64> = vols.iter().map(|v| v.value).collect();
    let fit = fit_scaling_exponent(&gammas, &ys).unwrap();
    assert!((fit.slope - 1.5).abs() <= 0.2, "{}", fit.slope);
}

#[test]
fn l1_direct_and_proxy_agree_in_order() {
    for g in [0.02, 0.08] {
        let p = build_lecam_pair(1.0, g, 1, 2).unwrap();
        let e = l1_distance_bound(&p, 0.3, 300_000, 5).unwrap();
        let ratio = e.direct.value / e.proxy.value;
        assert!((0.2..=5.0).contains(&ratio), "gamma {g}: ratio {ratio}");
        assert!(e.direct.value <= 2.0);
    }
}

#[test]
fn estimates_are_reproducible() {
    let p = build_lecam_pair(1.0, 0.05, 1, 2).unwrap();
    let a = l1_distance_bound(&p, 0.3, 50_000, 8).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| l1_distance_bound(&p, 0.3, 50_000, 8).unwrap());
    assert_eq!(a.direct, b.direct);
    assert_eq!(a.proxy, b.proxy);
}

#[test]
fn noise_must_fit_inside_the_bump() {
    let p = build_lecam_pair(1.0, 0.2, 1, 2).unwrap();
    assert!(matches!(symmetric_difference_volume(&p, 0.8, 10_000, 1), Err(Error::NoiseExceedsReach)));
    assert!(symmetric_difference_volume(&p, 0.3, 10, 1).is_err());
}

#[test]
fn calibration() {
    let p = build_lecam_pair(1.0, 0.1, 1, 2).unwrap();
    let ok = calibration_check(&p, 0.3, 0.5, 200_000, 6).unwrap();
    assert!(ok.passed, "{ok:?}");
    let bad = calibration_check(&p, 0.3, 100.0, 200_000, 6).unwrap();
    assert!(!bad.passed);
    let flat = build_lecam_pair(1.0, 0.0, 1, 2).unwrap();
    let c = calibration_check(&flat, 0.3, 0.5, 20_000, 6).unwrap();
    assert!(c.passed && c.required == 0.0 && c.l1.value == 0.0);
}

#[test]
fn nets_of_pair_share_the_flat_part() {
    // Far from the bump both nets are made of the same points.
    let p = build_lecam_pair(1.0, 0.05, 1, 2).unwrap();
    let a = dense_net(&p.m0, 0.01, 0).unwrap();
    let b = dense_net(&p.m1, 0.01, 0).unwrap();
    let far = |x: &[f64]| x[0].abs() > 1.0;
    let fa: Vec<&[f64]> = a.iter().filter(|x| far(x)).collect();
    let fb: Vec<&[f64]> = b.iter().filter(|x| far(x)).collect();
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert!(dist2(x, y) < 1e-28);
    }
}

#[test]
fn higher_dimensional_pairs_reduce_to_the_profile() {
    for (d, dim) in [(2, 3), (1, 3), (3, 4)] {
        let p = build_lecam_pair(1.0, 0.05, d, dim).unwrap();
        let h = pair_hausdorff(&p, 0.0025).unwrap();
        assert!((h - 0.05).abs() <= 0.005, "d = {d}, D = {dim}: {h}");
    }
}

#[test]
fn calibrate_matches_check() {
    let p = build_lecam_pair(1.0, 0.1, 1, 2).unwrap();
    let c = calibration_check(&p, 0.3, 0.5, 50_000, 6).unwrap();
    let again = calibrate(2, c.l1, c.hausdorff, 0.5);
    assert_eq!(again.required, c.required);
    assert_eq!(again.passed, c.passed);
}
