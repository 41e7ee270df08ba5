mod common;

use common::{gaussian_rows, rng};
use robust_mean::linalg::{dist, dot, norm, sub};
use robust_mean::sdp::{solve_sdp, top_eigenvector, FactorSum, SdpOutcome, SolverOptions};
use robust_mean::{
    block_means, coordwise_median, descend, estimate, partition, rate_r, Data, DescentOptions,
    OutcomeKind, RateParams,
};

fn sample(n: usize, d: usize, mu: f64, seed: u64) -> Data {
    let rows: Vec<Vec<f64>> = gaussian_rows(&mut rng(seed), n, d)
        .into_iter()
        .map(|r| r.into_iter().map(|x| x + mu).collect())
        .collect();
    Data::from_rows(&rows).unwrap()
}

#[test]
fn estimate_is_translation_equivariant() {
    let data = sample(600, 3, 0.0, 1);
    let shift = vec![2.5, -1.0, 0.75];
    let moved = data.translated(&shift).unwrap();
    let (a, _) = estimate(&data, 30, 1, 5).unwrap();
    let (b, _) = estimate(&moved, 30, 1, 5).unwrap();
    let back = sub(&b, &shift);
    assert!(dist(&a, &back) <= 1e-9, "{a:?} vs {back:?}");
}

#[test]
fn far_start_direction_points_at_the_bulk() {
    let (n, d, k) = (2000, 5, 50);
    let data = sample(n, d, 0.0, 2);
    let means = block_means(&data, &partition(n, k, 3).unwrap()).unwrap();
    for (i, offset) in [[40.0, 0.0, 0.0, 0.0, 0.0], [-3.0, 7.0, 2.0, -5.0, 1.0]]
        .iter()
        .enumerate()
    {
        let x_c = offset.to_vec();
        match solve_sdp(&means, &x_c, 1, i as u64, &SolverOptions::default()).unwrap() {
            SdpOutcome::Direction(m) => {
                let v = top_eigenvector(
                    &FactorSum {
                        dim: d,
                        factors: &m.factors,
                    },
                    1000,
                    0,
                )
                .vector;
                let align = dot(&v, &x_c).abs() / norm(&x_c);
                assert!(align > 0.5, "alignment {align} at {x_c:?}");
            }
            other => panic!("expected a direction at offset {i}, got {other:?}"),
        }
    }
}

// The bisection cannot reach scales near 1 / |x_c|^2 within its budget once
// the start is this far out, so the step lands on the median of means.
#[test]
fn very_far_start_falls_back_to_the_median() {
    let (n, d, k) = (2000, 5, 50);
    let data = sample(n, d, 0.0, 2);
    let means = block_means(&data, &partition(n, k, 3).unwrap()).unwrap();
    let out = solve_sdp(
        &means,
        &[0.0, 0.0, 0.0, 0.0, 900.0],
        1,
        0,
        &SolverOptions::default(),
    )
    .unwrap();
    assert_eq!(out, SdpOutcome::Fallback(coordwise_median(&means)));
}

#[test]
fn steps_never_move_far_away() {
    let (n, d, k) = (4000, 8, 40);
    let r = rate_r(&RateParams::new(d as f64, 1.0, n, k).unwrap()).unwrap();
    for seed in 0..3 {
        let data = sample(n, d, 0.0, 10 + seed);
        let means = block_means(&data, &partition(n, k, seed).unwrap()).unwrap();
        let start = vec![25.0; d];
        let (est, trace) = descend(&means, start, 1, seed, &DescentOptions::default()).unwrap();
        let mut points = trace.iterates.clone();
        points.push(est);
        for pair in points.windows(2) {
            assert!(norm(&pair[1]) <= norm(&pair[0]) + 8.0 * r + 1e-6);
        }
        assert!(
            trace
                .outcome_kinds
                .iter()
                .all(|&o| o == OutcomeKind::Direction)
                || trace.iterations() > 0
        );
    }
}

#[test]
fn clean_gaussian_error_is_within_rate() {
    let (n, d, k) = (4000, 10, 40);
    let r = rate_r(&RateParams::new(d as f64, 1.0, n, k).unwrap()).unwrap();
    for seed in 0..3 {
        let data = sample(n, d, 5.0, 20 + seed);
        let (est, trace) = estimate(&data, k, 2, seed).unwrap();
        let err = dist(&est, &vec![5.0; d]);
        assert!(err <= r, "error {err} above rate {r}");
        assert!(trace.iterations() >= 1);
    }
}
