//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach the console.
//! Criteria with a documented conflict are listed in `KNOWN_RED`;
//! they still print FAIL, and the run fails if any other criterion fails or if
//! a known-red criterion starts passing.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use distil::apps::{self, TeleportStrategy};
use distil::bellsim::{evaluate_fixture, simulate, NoiseModel};
use distil::circuit::{synthesize, Circuit, CircuitGate};
use distil::enumerate::{
    hull_gap, key_set, pareto_envelope, transversal, EnumConfig, ProtocolRecord, Strategy, SyndromePolicy,
};
use distil::evolve::{evolve, GaConfig};
use distil::fixtures;
use distil::graph::NKGraph;
use distil::pauli::PauliVector;
use distil::stats::{
    bell_diagonal_table, code_distance, code_enumerators, coset_weight_enumerator, macwilliams_transform,
    trivial_statistics, BellDiagonalInput, OutputTable, SyndromeMode, WeightEnumerator,
};
use distil::symplectic::{random_symplectic, SubgroupKind, SubgroupSpec};

/// Criteria expected to fail, with the reason recorded alongside the run.
const KNOWN_RED: &[(u32, &str)] = &[
    (4, "the transcribed [4,2,2] graph encodes a distance-1 code"),
    (6, "the two hulls separate at F ~ 0.8483, below 0.85"),
    (8, "10->7 beats undistilled pairs from F ~ 0.769; the 0.85 crossover is against DEJMPS"),
    (9, "the n >= 6 circuits were selected at p = 0.03, where they beat the noiseless optimum"),
];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "oracle equivalence", oracle_equivalence),
        (2, "MacWilliams identity", macwilliams_identity),
        (3, "cross-strategy enumeration", cross_strategy),
        (4, "shipped fixtures", shipped_fixtures),
        (5, "2 -> 1 values", two_to_one),
        (6, "syndrome-set envelopes", syndrome_set_envelopes),
        (7, "QKD", qkd),
        (8, "teleportation", teleportation),
        (9, "noisy-circuit fixtures", noisy_fixtures),
        (10, "GA recovery", ga_recovery),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = check();
        let secs = start.elapsed().as_secs_f64();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict} [{name}, {secs:.1}s] {}", out.detail);
        let red = KNOWN_RED.iter().find(|(r, _)| *r == id);
        match (out.pass, red) {
            (false, Some((_, why))) => println!("             known red: {why}"),
            (true, Some(_)) => unexpected.push(format!("criterion {id} passes but is listed as known red")),
            (false, None) => unexpected.push(format!("criterion {id} fails")),
            (true, None) => {}
        }
    }
    if !unexpected.is_empty() {
        for u in &unexpected {
            eprintln!("{u}");
        }
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// 1. Exact statistics, the Bell-diagonal simulator and a dense state oracle agree.

const ORACLE_TOL: f64 = 1e-12;

fn apply_gate(v: &mut [f64], g: CircuitGate, shift: usize) {
    let bit = |q: usize| 1usize << (q + shift);
    match g {
        CircuitGate::Cz(a, b) => {
            let m = bit(a) | bit(b);
            for (i, x) in v.iter_mut().enumerate() {
                if i & m == m {
                    *x = -*x;
                }
            }
        }
        CircuitGate::Cnot { control, target } => {
            let (c, t) = (bit(control), bit(target));
            for i in 0..v.len() {
                if i & c != 0 && i & t == 0 {
                    v.swap(i, i | t);
                }
            }
        }
        CircuitGate::H(a) => {
            let h = bit(a);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..v.len() {
                if i & h == 0 {
                    let (x, y) = (v[i], v[i | h]);
                    v[i] = s * (x + y);
                    v[i | h] = s * (x - y);
                }
            }
        }
        CircuitGate::MeasureZ(_) => unreachable!("measurements are deferred"),
    }
}

/// Joint `(syndrome, label)` masses from explicit two-party state vectors.
///
/// Alice's qubit `q` is bit `q` and Bob's is bit `n + q`. Every input Pauli
/// word contributes one pure state; all gates are real, so Bob applies the
/// same gate as Alice. Measurements commute to the end of the circuit.
fn dense_oracle(c: &Circuit, input: &BellDiagonalInput) -> Vec<f64> {
    let (n, k) = (c.n(), c.keep());
    let m = n - k;
    let mut measured = 0u32;
    let mut unitary = Vec::new();
    for &g in c.gates() {
        if let CircuitGate::MeasureZ(q) = g {
            measured |= 1 << q;
        } else {
            assert!(g.qubits().iter().all(|&q| measured >> q & 1 == 0), "gate after measurement");
            unitary.push(g);
        }
    }
    assert_eq!(measured, ((1u32 << n) - 1) & !((1u32 << k) - 1), "measured qubits are k..n");
    let dim = 1usize << (2 * n);
    let labels = 1usize << (2 * k);
    let mut mass = vec![0.0; labels << m];
    let kept = (1usize << k) - 1;
    for word in 0u32..1 << (2 * n) {
        let p = input.probability(word);
        if p == 0.0 {
            continue;
        }
        let (x, z) = ((word & ((1 << n) - 1)) as usize, (word >> n) as usize);
        let mut v = vec![0.0; dim];
        let amp = (0.5f64).powf(n as f64 / 2.0);
        for s in 0..1usize << n {
            let sign = if (z & s).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            v[(s ^ x) | s << n] = sign * amp;
        }
        for &g in &unitary {
            apply_gate(&mut v, g, 0);
            apply_gate(&mut v, g, n);
        }
        let bell = (0.5f64).powf(k as f64 / 2.0);
        for alpha in 0..1usize << m {
            for beta in 0..1usize << m {
                let syndrome = alpha ^ beta;
                for l in 0..labels {
                    let (lx, lz) = (l & kept, l >> k);
                    let mut a = 0.0;
                    for t in 0..1usize << k {
                        let sign = if (lz & t).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                        let idx = ((t ^ lx) | alpha << k) | (t | beta << k) << n;
                        a += sign * bell * v[idx];
                    }
                    mass[syndrome * labels + l] += p * a * a;
                }
            }
        }
    }
    mass
}

fn tables_agree(a: &OutputTable, b: &[f64], labels: usize) -> Result<(), String> {
    if a.mass.len() != b.len() {
        return Err(format!("{} vs {} entries", a.mass.len(), b.len()));
    }
    for (i, (x, y)) in a.mass.iter().zip(b).enumerate() {
        if (x - y).abs() > ORACLE_TOL {
            return Err(format!("joint entry {i}: {x} vs {y}"));
        }
    }
    for s in 0..b.len() / labels {
        let (ra, rb) = (&a.mass[s * labels..(s + 1) * labels], &b[s * labels..(s + 1) * labels]);
        let (pa, pb): (f64, f64) = (ra.iter().sum(), rb.iter().sum());
        if pa > 1e-3 && ra.iter().zip(rb).any(|(x, y)| (x / pa - y / pb).abs() > ORACLE_TOL) {
            return Err(format!("coefficients of syndrome {s}"));
        }
    }
    Ok(())
}

/// Per-syndrome success probability and identity coefficient only.
fn fidelities_agree(a: &OutputTable, b: &[f64], labels: usize) -> Result<(), String> {
    for s in 0..b.len() / labels {
        let (ra, rb) = (&a.mass[s * labels..(s + 1) * labels], &b[s * labels..(s + 1) * labels]);
        let (pa, pb): (f64, f64) = (ra.iter().sum(), rb.iter().sum());
        if (pa - pb).abs() > ORACLE_TOL || (ra[0] - rb[0]).abs() > ORACLE_TOL {
            return Err(format!("syndrome {s}: ({pa}, {}) vs ({pb}, {})", ra[0], rb[0]));
        }
    }
    Ok(())
}

fn random_input(n: usize, rng: &mut ChaCha8Rng) -> BellDiagonalInput {
    let pairs = (0..n)
        .map(|_| {
            let w: [f64; 4] = [rng.random_range(1.0..4.0), rng.random(), rng.random(), rng.random()];
            let t: f64 = w.iter().sum();
            w.map(|x| x / t)
        })
        .collect();
    BellDiagonalInput::new(pairs).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for total in 2..=5usize {
        for k in 1..=total / 2 {
            let n = total - k;
            let edges: Vec<(usize, usize)> = (0..total).flat_map(|a| (a + 1..total).map(move |b| (a, b))).collect();
            let inputs: Vec<usize> = (n..total).collect();
            for mask in 0u64..1 << edges.len() {
                let mut adj = vec![0u32; total];
                for (e, &(a, b)) in edges.iter().enumerate() {
                    if mask >> e & 1 == 1 {
                        adj[a] |= 1 << b;
                        adj[b] |= 1 << a;
                    }
                }
                let g = NKGraph::new(adj, &inputs).unwrap();
                if !g.is_valid_code() {
                    continue;
                }
                let labeling = g.find_valid_labeling().unwrap();
                let matrix = apps::graph_protocol(&g).unwrap();
                let circuit = synthesize(&g, &labeling).unwrap();
                // The synthesised circuit realises the graph protocol up to local
                // Cliffords, which relabel outputs but keep Werner p_succ and F.
                let circuit_matrix = circuit.to_symplectic();
                for (werner, input) in [(true, BellDiagonalInput::werner(n, 0.7).unwrap()), (false, random_input(n, &mut rng))] {
                    let dense = dense_oracle(&circuit, &input);
                    let labels = 1 << (2 * k);
                    let mut checks = vec![
                        ("circuit stats", tables_agree(&bell_diagonal_table(&circuit_matrix, k, &input, SyndromeMode::All).unwrap(), &dense, labels)),
                        ("simulator", tables_agree(&simulate(&circuit, &input, &NoiseModel::noiseless()).unwrap(), &dense, labels)),
                    ];
                    if werner {
                        let exact = bell_diagonal_table(&matrix, k, &input, SyndromeMode::All).unwrap();
                        checks.push(("graph stats", fidelities_agree(&exact, &dense, labels)));
                    }
                    for (what, res) in checks {
                        if let Err(e) = res {
                            return Outcome::new(false, format!("({n},{k}) graph {mask:#x}: {what} vs dense oracle, {e}"));
                        }
                    }
                }
                checked += 1;
            }
        }
    }
    Outcome::new(true, format!(
        "{checked} labelled graphs with n+k <= 5: circuit stats, simulator and dense oracle agree on every entry; \
         graph matrices agree on p_succ and F per syndrome (Werner); tolerance {ORACLE_TOL:e}"
    ))
}

// ---------------------------------------------------------------------------
// 2. MacWilliams transform against direct enumeration of the commutant coset.

fn macwilliams_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..100 {
        let n = rng.random_range(1..=6usize);
        let k = rng.random_range(1..=n);
        let m = random_symplectic(n, &mut rng);
        let id = PauliVector::identity(n).unwrap();
        let e_b = coset_weight_enumerator(&m, &SubgroupSpec::new(SubgroupKind::BkSpan, n, k).unwrap(), &id).unwrap();
        let direct = coset_weight_enumerator(&m, &SubgroupSpec::new(SubgroupKind::PkSpan, n, k).unwrap(), &id).unwrap();
        let transformed = macwilliams_transform(&e_b, n, k).unwrap();
        if transformed != direct {
            return Outcome::new(false, format!("trial {trial} (n={n}, k={k}): {transformed:?} vs {direct:?}"));
        }
    }
    Outcome::new(true, "100 seeded random symplectic matrices, n <= 6, exact")
}

// ---------------------------------------------------------------------------
// 3. Both enumeration strategies and both symmetry-breaking settings give one key set.

fn cross_strategy() -> Outcome {
    let cfg = EnumConfig::default();
    let mut sizes = Vec::new();
    for (n, k) in [(2, 1), (3, 1), (4, 1), (3, 2), (4, 2)] {
        let g = key_set(&transversal(Strategy::Graphs, n, k, &cfg).unwrap());
        let f = key_set(&transversal(Strategy::NormalForms, n, k, &cfg).unwrap());
        if g != f {
            return Outcome::new(false, format!("({n},{k}): {} graph classes vs {} normal-form classes", g.len(), f.len()));
        }
        sizes.push(format!("({n},{k}):{}", g.len()));
    }
    for total in 2..=6usize {
        for k in 1..=total / 2 {
            let n = total - k;
            let run = |on: bool| {
                let cfg = EnumConfig { symmetry_breaking: Some(on), ..EnumConfig::default() };
                key_set(&transversal(Strategy::NormalForms, n, k, &cfg).unwrap())
            };
            if run(true) != run(false) {
                return Outcome::new(false, format!("symmetry breaking changes the classes of ({n},{k})"));
            }
        }
    }
    Outcome::new(true, format!("classes {}; symmetry breaking neutral for n+k <= 6", sizes.join(" ")))
}

// ---------------------------------------------------------------------------
// 4. Gate counts, depth and code parameters of the transcribed fixtures.

fn graph_code(json: &str) -> (WeightEnumerator, WeightEnumerator) {
    let g = NKGraph::from_json(json).unwrap();
    code_enumerators(&apps::graph_protocol(&g).unwrap(), g.k_in()).unwrap()
}

fn shipped_fixtures() -> Outcome {
    let c = Circuit::from_json(fixtures::circuit("ten_to_seven").unwrap()).unwrap();
    let depth = c.depth();
    let circuit_ok = c.two_qubit_count() == 15 && depth.value == 6 && depth.exact;
    let (b4, p4) = graph_code(fixtures::FOUR_TWO_TWO);
    let d4 = code_distance(&b4, &p4);
    let (b5, p5) = graph_code(fixtures::FIVE_QUBIT_WHEEL);
    let d5 = code_distance(&b5, &p5);
    let five_ok = d5 == 3 && b5.0 == [1, 0, 0, 0, 15, 0] && p5.0 == [1, 0, 0, 30, 15, 18];
    let (ba, pa) = graph_code(fixtures::FOUR_TWO_TWO_ADJACENT);
    Outcome::new(
        circuit_ok && d4 == 2 && five_ok,
        format!(
            "10->7 circuit: {} two-qubit gates, depth {}; [4,2,2] graph: d={d4} (adjacent-input variant d={}); \
             five-qubit graph: d={d5}, E(B)={:?}, E(P)={:?}",
            c.two_qubit_count(),
            depth.value,
            code_distance(&ba, &pa),
            b5.0,
            p5.0
        ),
    )
}

// ---------------------------------------------------------------------------
// 5. The bilateral CNOT on Werner pairs.

fn two_to_one() -> Outcome {
    let s = trivial_statistics(&apps::bilateral_cnot(), 1).unwrap();
    let p = s.success_probability_werner(0, 0.7).unwrap();
    let f = s.fidelity_werner(0, 0.7).unwrap();
    Outcome::new(
        (p - 0.68).abs() < 1e-12 && (f - 0.50 / 0.68).abs() < 1e-12,
        format!("p_succ = {p:.15}, F_out = {f:.15} (expected 0.68, {:.15})", 0.50 / 0.68),
    )
}

// ---------------------------------------------------------------------------
// 6. Trivial-syndrome and syndrome-set hulls for n <= 5 -> 1.

fn n_to_one_records(max_n: usize) -> Vec<ProtocolRecord> {
    (1..=max_n).flat_map(|n| transversal(Strategy::Graphs, n, 1, &EnumConfig::default()).unwrap()).collect()
}

fn syndrome_set_envelopes() -> Outcome {
    let records = n_to_one_records(5);
    let grid = [0.6, 0.7, 0.8, 0.85, 0.95];
    let trivial = pareto_envelope(&records, &grid, SyndromePolicy::TrivialOnly).unwrap();
    let sets = pareto_envelope(&records, &grid, SyndromePolicy::AllSyndromeSets).unwrap();
    let gaps: Vec<f64> = trivial.iter().zip(&sets).map(|(a, b)| hull_gap(a, b)).collect();
    let equal_low = gaps[..4].iter().all(|&g| g <= 1e-9);
    let differ_high = gaps[4] > 1e-9;
    let shown: Vec<String> = grid.iter().zip(&gaps).map(|(f, g)| format!("{f}:{g:.2e}")).collect();
    Outcome::new(equal_low && differ_high, format!("{} protocols; hull gaps {}", records.len(), shown.join(" ")))
}

// ---------------------------------------------------------------------------
// 7. BB84 threshold and the binned versus trivial-syndrome key-rate envelope.

fn qkd() -> Outcome {
    let threshold = apps::werner_rate_threshold();
    let grid: Vec<f64> = (0..=20).map(|i| 0.80 + 0.01 * i as f64).collect();
    let points = apps::key_rate_envelopes(&[1, 2, 3, 4, 5], &grid).unwrap();
    let mut worst = 0.0f64;
    let mut per_n = 0.0f64;
    for &f in &grid {
        let at: Vec<_> = points.iter().filter(|p| p.f_in == f).collect();
        let binned = at.iter().map(|p| p.binned_rate).fold(0.0, f64::max);
        let detection = at.iter().map(|p| p.detection_rate).fold(0.0, f64::max);
        worst = worst.max((binned - detection).abs());
        per_n = at.iter().map(|p| p.binned_rate - p.detection_rate).fold(per_n, f64::max);
    }
    Outcome::new(
        (threshold - 0.835).abs() <= 0.001 && worst <= 1e-6,
        format!(
            "threshold F = {threshold:.6}; envelope over n <= 5 differs by {worst:.2e} \
             (largest fixed-n difference {per_n:.2e})"
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. Encoded teleportation through the 10 -> 7 protocol.

/// First upward zero crossing of `d` over the grid, linearly interpolated.
fn crossing(grid: &[f64], d: &[f64]) -> Option<f64> {
    (1..grid.len()).find(|&i| d[i - 1] < 0.0 && d[i] >= 0.0).map(|i| {
        let t = -d[i - 1] / (d[i] - d[i - 1]);
        grid[i - 1] + t * (grid[i] - grid[i - 1])
    })
}

fn teleportation() -> Outcome {
    let stats = apps::ten_to_seven_statistics().unwrap();
    let grid: Vec<f64> = (0..=300).map(|i| 0.70 + 0.001 * i as f64).collect();
    let curves = apps::teleportation_curves(&stats, &grid).unwrap();
    let series = |s: TeleportStrategy, pick: fn(&apps::TeleportPoint) -> f64| -> Vec<f64> {
        curves.iter().filter(|p| p.strategy == s).map(pick).collect()
    };
    let inf = |s| series(s, |p| p.infidelity);
    let cost = |s| series(s, |p| p.expected_pairs);
    let diff = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>();
    let vs_raw = crossing(&grid, &diff(inf(TeleportStrategy::Undistilled), inf(TeleportStrategy::TenToSeven)));
    let vs_dejmps = crossing(&grid, &diff(inf(TeleportStrategy::Dejmps), inf(TeleportStrategy::TenToSeven)));
    let vs_cost = crossing(&grid, &diff(cost(TeleportStrategy::Dejmps), cost(TeleportStrategy::TenToSeven)));
    let within = |x: Option<f64>, c: f64| x.is_some_and(|x| (x - c).abs() <= 0.02);
    let show = |x: Option<f64>| x.map_or("none".to_string(), |x| format!("{x:.4}"));
    Outcome::new(
        within(vs_raw, 0.85) && within(vs_cost, 0.95),
        format!(
            "infidelity crossover vs undistilled at F = {}, vs 7xDEJMPS at F = {}; \
             raw-pair cost crossover vs 7xDEJMPS at F = {}",
            show(vs_raw),
            show(vs_dejmps),
            show(vs_cost)
        ),
    )
}

// ---------------------------------------------------------------------------
// 9. Noiseless fixture circuits reach the enumerated optimum.

fn noisy_fixtures() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for &(n, name) in fixtures::N_TO_ONE {
        let records = match transversal(Strategy::Graphs, n, 1, &EnumConfig::default()) {
            Ok(r) => r,
            Err(e) => {
                notes.push(format!("n={n}: {e}"));
                pass = false;
                continue;
            }
        };
        for f in [0.7, 0.9, 0.95] {
            let best = records.iter().map(|r| r.point(f).1).fold(0.0, f64::max);
            let got = evaluate_fixture(name, f, &NoiseModel::noiseless()).unwrap();
            if (best - got).abs() > 1e-12 {
                pass = false;
                notes.push(format!("n={n} F={f}: fixture {got:.12} vs optimum {best:.12}"));
            }
        }
        let mut last = f64::INFINITY;
        for p in [0.0, 0.01, 0.02, 0.03, 0.04] {
            let f = evaluate_fixture(name, 0.9, &NoiseModel::new(p, p).unwrap()).unwrap();
            if f > last + 1e-12 {
                pass = false;
                notes.push(format!("n={n}: fidelity rises with noise at p={p}"));
            }
            last = f;
        }
    }
    let detail = if notes.is_empty() {
        "n = 4..9 fixtures match the optimum at F = 0.7, 0.9, 0.95 and degrade monotonically in p".to_string()
    } else {
        notes.join("; ")
    };
    Outcome::new(pass, detail)
}

// ---------------------------------------------------------------------------
// 10. Genetic search recovers the 2 -> 1 optimum.

fn ga_recovery() -> Outcome {
    let f = 0.7;
    let optimum = n_to_one_records(2).iter().filter(|r| r.n == 2).map(|r| r.point(f).1).fold(0.0, f64::max);
    let hits: BTreeSet<u64> = (0..5u64)
        .filter(|&seed| {
            let cfg = GaConfig { seed, max_generations: 100, ..GaConfig::default() };
            let m = evolve(2, 1, f, &NoiseModel::noiseless(), &cfg).unwrap();
            (m.best_fitness - optimum).abs() <= 1e-9
        })
        .collect();
    Outcome::new(hits.len() >= 4, format!("optimum {optimum:.12} reached by seeds {hits:?} of 0..5"))
}
