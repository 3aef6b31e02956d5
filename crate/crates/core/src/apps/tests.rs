use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::bellsim::{simulate, NoiseModel};
use crate::circuit::{Circuit, CircuitGate};
use crate::stats::full_statistics;
use crate::enumerate::{transversal, EnumConfig, Strategy};

const TOL: f64 = 1e-12;

fn random_vector(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let v: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
    let s: f64 = v.iter().sum();
    v.map(|x| x / s)
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
}

#[test]
fn bb84_rate_limits() {
    assert_eq!(bb84_rate([1.0, 0.0, 0.0, 0.0]), 1.0);
    // e_x = e_z = 1/2
    assert_eq!(bb84_rate([0.25; 4]), 0.0);
    assert_eq!(bb84_rate([0.5, 0.0, 0.0, 0.5]), 0.0);
    // only phase errors: e_z = 0, e_x = 0.11
    let r = bb84_rate([0.89, 0.0, 0.0, 0.11]);
    assert!((r - (1.0 - binary_entropy(0.11))).abs() < TOL);
}

#[test]
fn werner_threshold_matches_entropy_root() {
    // h(e) = 1/2 at e = 0.110027864..., and e = 2(1 - F)/3 for Werner pairs
    let (mut lo, mut hi) = (0.0, 0.5);
    for _ in 0..200 {
        let mid: f64 = 0.5 * (lo + hi);
        if binary_entropy(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let expected = 1.0 - 1.5 * lo;
    let f = werner_rate_threshold();
    assert!((f - expected).abs() < 1e-12);
    assert!((f - 0.835).abs() < 1e-3);
}

#[test]
fn best_correction_is_optimal_over_all_relabellings() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let perms = permutations();
    for _ in 0..300 {
        let c = random_vector(&mut rng);
        let best = best_correction(c);
        let brute = perms.iter().map(|p| bb84_rate(p.map(|i| c[i]))).fold(0.0, f64::max);
        let max_i = c.iter().cloned().fold(0.0, f64::max);
        assert!((bb84_rate(best) - brute).abs() < TOL);
        assert_eq!(best[0], max_i);
        let mut a = best.to_vec();
        let mut b = c.to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
    }
}

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|x| p.contains(&x)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn label_order_converts_to_letters() {
    let input = BellDiagonalInput::new(vec![[0.6, 0.1, 0.2, 0.1]]).unwrap();
    let t = bell_diagonal_table(&SymplecticMatrix::identity(1), 1, &input, SyndromeMode::All).unwrap();
    assert_eq!(letters_from_labels(&t.output_coefficients(0).unwrap()).unwrap(), [0.6, 0.1, 0.2, 0.1]);
    assert!(letters_from_labels(&[1.0]).is_err());
}

#[test]
fn trivial_protocol_rate_is_input_rate() {
    let stats = full_statistics(&SymplecticMatrix::identity(1), 1).unwrap();
    let grid = [0.8, 0.9, 0.95, 1.0];
    for r in binned_key_rate(&stats, &grid).unwrap() {
        let expected = bb84_rate(werner_coefficients(r.f_in));
        assert!((r.binned_rate - expected).abs() < TOL);
        assert!((r.detection_rate - expected).abs() < TOL);
        assert_eq!(r.bins.len(), 1);
    }
}

#[test]
fn binning_never_loses_key() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid: Vec<f64> = (0..=20).map(|i| 0.8 + 0.01 * i as f64).collect();
    for n in 2..=4 {
        for _ in 0..10 {
            let m = crate::symplectic::random_symplectic(n, &mut rng);
            let stats = full_statistics(&m, 1).unwrap();
            for r in binned_key_rate(&stats, &grid).unwrap() {
                assert!(r.detection_rate >= 0.0);
                assert!(r.binned_rate >= r.detection_rate - TOL);
                let p: f64 = r.bins.iter().map(|b| b.probability).sum();
                assert!((p - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn key_rate_needs_one_kept_pair() {
    let stats = full_statistics(&SymplecticMatrix::identity(2), 2).unwrap();
    assert!(matches!(binned_key_rate(&stats, &[0.9]), Err(Error::InvalidInput(_))));
    assert!(average_state_strategy(&stats, 0.9).is_err());
}

#[test]
fn average_state_of_perfect_pairs_is_perfect() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=4 {
        let m = crate::symplectic::random_symplectic(n, &mut rng);
        let stats = full_statistics(&m, 1).unwrap();
        assert!((average_state_strategy(&stats, 1.0).unwrap() - 1.0).abs() < TOL);
        let avg = average_state(&stats, 0.8).unwrap();
        assert!((avg.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

/// Closed-form DEJMPS map in the (Phi+, Psi-, Psi+, Phi-) convention.
fn dejmps_oracle(a: [f64; 4], b: [f64; 4]) -> (f64, [f64; 4]) {
    let bell = |c: [f64; 4]| (c[0], c[2], c[1], c[3]);
    let (a1, b1, c1, d1) = bell(a);
    let (a2, b2, c2, d2) = bell(b);
    let n = (a1 + b1) * (a2 + b2) + (c1 + d1) * (c2 + d2);
    let out_a = (a1 * a2 + b1 * b2) / n;
    let out_b = (c1 * d2 + d1 * c2) / n;
    let out_c = (c1 * c2 + d1 * d2) / n;
    let out_d = (a1 * b2 + b1 * a2) / n;
    (n, [out_a, out_c, out_b, out_d])
}

#[test]
fn dejmps_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let (a, b) = (random_vector(&mut rng), random_vector(&mut rng));
        let (p, out) = dejmps_step(a, b).unwrap();
        let (q, expected) = dejmps_oracle(a, b);
        assert!((p - q).abs() < TOL);
        assert!(close(&out, &expected, TOL));
    }
}

#[test]
fn dejmps_known_values() {
    let (p, out) = dejmps_step([1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]).unwrap();
    assert_eq!((p, out), (1.0, [1.0, 0.0, 0.0, 0.0]));
    let w = werner_coefficients(0.7);
    let (p, out) = dejmps_step(w, w).unwrap();
    assert!((p - 0.68).abs() < TOL);
    assert!((out[0] - 0.50 / 0.68).abs() < TOL);
}

#[test]
fn dejmps_rounds_keep_improving() {
    for i in 1..10 {
        let f = 0.5 + 0.05 * i as f64;
        let one = dejmps_iterate(f, 1).unwrap().1[0];
        let two = dejmps_iterate(f, 2).unwrap().1[0];
        assert!(one > f && two > one, "F={f}: {one} {two}");
    }
}

#[test]
fn dejmps_matches_noiseless_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let c = Circuit::new(2, 1, vec![CircuitGate::Cnot { control: 0, target: 1 }, CircuitGate::MeasureZ(1)]).unwrap();
    for _ in 0..50 {
        let (a, b) = (random_vector(&mut rng), random_vector(&mut rng));
        let input = BellDiagonalInput::new(vec![dejmps_rotation(a), dejmps_rotation(b)]).unwrap();
        let t = simulate(&c, &input, &NoiseModel::noiseless()).unwrap();
        let (p, out) = dejmps_step(a, b).unwrap();
        assert!((t.success_probability(0).unwrap() - p).abs() < TOL);
        assert!(close(&letters_from_labels(&t.output_coefficients(0).unwrap()).unwrap(), &out, TOL));
    }
}

#[test]
fn steane_lookup_is_exhaustive_and_consistent() {
    let code = SteaneFixture::new();
    for s in 0..64u32 {
        assert_eq!(code.syndrome(code.lookup[s as usize]), s);
        assert!(code.lookup[s as usize].count_ones() <= 2);
    }
    let stab = code.stabilizers();
    assert_eq!(stab.len(), 6);
    let form = |a: u32, b: u32| ((a & 0x7f) & (b >> 7)).count_ones() ^ ((a >> 7) & (b & 0x7f)).count_ones();
    for &s in &stab {
        assert_eq!(code.syndrome(s), 0);
        assert!(code.corrects(s));
        assert_eq!(form(s, code.logical_x) & 1, 0);
        assert_eq!(form(s, code.logical_z) & 1, 0);
    }
    assert_eq!(form(code.logical_x, code.logical_z) & 1, 1);
    assert!(!code.corrects(code.logical_x));
    assert!(!code.corrects(code.logical_z));
}

#[test]
fn steane_corrects_every_single_qubit_error() {
    let code = SteaneFixture::new();
    let mut count = 0;
    for q in 0..BLOCK {
        for (x, z) in [(1u32, 0u32), (0, 1), (1, 1)] {
            let e = x << q | z << (q + BLOCK);
            assert!(code.corrects(e));
            count += 1;
        }
    }
    assert_eq!(count, 21);
    // some weight-2 error must fail at distance 3
    assert!(!code.corrects(0b11));
}

#[test]
fn teleport_trivial_channels() {
    let perfect = vec![[1.0, 0.0, 0.0, 0.0]; BLOCK];
    assert_eq!(teleport_steane(&PairChannel::Independent(perfect.clone())).unwrap(), 0.0);
    let mut one_x = perfect;
    one_x[3] = [0.0, 1.0, 0.0, 0.0];
    assert_eq!(teleport_steane(&PairChannel::Independent(one_x)).unwrap(), 0.0);
    assert!(teleport_steane(&PairChannel::Independent(vec![[1.0, 0.0, 0.0, 0.0]; 6])).is_err());
    assert!(teleport_steane(&PairChannel::Correlated(vec![0.0; 10])).is_err());
    assert!(teleport_steane(&PairChannel::Correlated(vec![0.0; 1 << 14])).is_err());
}

/// Independent oracle for identical product channels: a transfer-matrix sweep
/// over (X syndrome, Z syndrome, X parity, Z parity) followed by the decoder's
/// parity rule (a non-zero syndrome flips one qubit, so one extra unit of weight).
fn product_oracle(c: [f64; 4]) -> f64 {
    let mut dp = vec![0.0; 256];
    dp[0] = 1.0;
    let letters = [(0u32, 0u32), (1, 0), (1, 1), (0, 1)];
    for q in 0..BLOCK {
        let col = (q + 1) as u32;
        let mut next = vec![0.0; 256];
        for (state, &p) in dp.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (l, &(x, z)) in letters.iter().enumerate() {
                let s = state as u32 ^ (x * col) ^ (z * col) << 3 ^ x << 6 ^ z << 7;
                next[s as usize] += p * c[l];
            }
        }
        dp = next;
    }
    dp.iter()
        .enumerate()
        .filter(|&(s, _)| {
            let s = s as u32;
            let px = (s >> 6 & 1) ^ u32::from(s & 7 != 0);
            let pz = (s >> 7 & 1) ^ u32::from(s >> 3 & 7 != 0);
            px == 1 || pz == 1
        })
        .map(|(_, p)| p)
        .sum()
}

#[test]
fn teleport_product_channel_matches_transfer_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for f in [0.7, 0.85, 0.95, 0.99] {
        let w = werner_coefficients(f);
        let direct = teleport_steane(&PairChannel::Independent(vec![w; BLOCK])).unwrap();
        assert!((direct - product_oracle(w)).abs() < TOL, "F={f}");
    }
    for _ in 0..5 {
        let c = random_vector(&mut rng);
        let direct = teleport_steane(&PairChannel::Independent(vec![c; BLOCK])).unwrap();
        assert!((direct - product_oracle(c)).abs() < TOL);
        let input = BellDiagonalInput::new(vec![c; BLOCK]).unwrap();
        let table: Vec<f64> = (0..1u32 << 14).map(|e| input.probability(e)).collect();
        let joint = teleport_steane(&PairChannel::Correlated(table)).unwrap();
        assert!((joint - direct).abs() < TOL);
    }
}

#[test]
fn resource_costs() {
    assert_eq!(resource_cost(1, 1.0).unwrap(), 1.0);
    assert!(matches!(resource_cost(3, 0.0), Err(Error::ZeroProbability(_))));
    assert!((dejmps_cost(1.0, 7, Accounting::Independent).unwrap() - 14.0).abs() < TOL);
    assert!((dejmps_cost(1.0, 7, Accounting::Joint).unwrap() - 14.0).abs() < TOL);
    let p = 0.68f64;
    assert!((dejmps_cost(0.7, 7, Accounting::Independent).unwrap() - 14.0 / p).abs() < 1e-9);
    assert!((dejmps_cost(0.7, 7, Accounting::Joint).unwrap() - 14.0 / p.powi(7)).abs() < 1e-6);
}

#[test]
fn ten_to_seven_cost_falls_with_fidelity() {
    let stats = ten_to_seven_statistics().unwrap();
    assert_eq!((stats.n, stats.k), (10, 7));
    let mut last = f64::INFINITY;
    for i in 0..=20 {
        let f = 0.8 + 0.01 * i as f64;
        let cost = resource_cost(stats.n, stats.success_probability_werner(0, f).unwrap()).unwrap();
        assert!(cost <= last + TOL);
        last = cost;
    }
    assert!((last - 10.0).abs() < TOL);
}

fn one_output_transversal(n: usize) -> Vec<DistillationStatistics> {
    transversal(Strategy::Graphs, n, 1, &EnumConfig::default())
        .unwrap()
        .iter()
        .map(|r| r.full_statistics().unwrap())
        .collect()
}

#[test]
fn averaging_helps_only_at_high_fidelity() {
    let threshold = werner_rate_threshold();
    for n in 2..=5 {
        let stats = one_output_transversal(n);
        for i in 0..=52 {
            let f = 0.6 + 0.005 * i as f64;
            for s in &stats {
                let avg = average_state(s, f).unwrap();
                assert!(avg[0] <= f + 1e-12, "n={n} F={f} improves to {}", avg[0]);
                if f < threshold {
                    assert_eq!(bb84_rate(avg), 0.0, "n={n} F={f}");
                }
            }
        }
    }
    let best = one_output_transversal(5).iter().map(|s| average_state_strategy(s, 0.9).unwrap()).fold(0.0, f64::max);
    assert!(best > 0.9);
}

#[test]
fn combined_key_rate_envelopes_coincide() {
    let grid: Vec<f64> = (0..=20).map(|i| 0.8 + 0.01 * i as f64).collect();
    let env = key_rate_envelopes(&[1, 2, 3], &grid).unwrap();
    for &f in &grid {
        let at = env.iter().filter(|e| e.f_in == f);
        let b = at.clone().map(|e| e.binned_rate).fold(0.0, f64::max);
        let d = at.map(|e| e.detection_rate).fold(0.0, f64::max);
        assert!(b >= d && b - d < 1e-9, "F={f}: {b} vs {d}");
    }
}
