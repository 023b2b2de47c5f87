//! End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero exit
//! status if any criterion fails. The large chains take tens of minutes on a
//! single core.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use cagmps::analysis::fit_central_charge;
use cagmps::clifford::{canonical_gates, ConjugationTable, GateSet, GateWord, EXPECTED_COUNTS, PUBLISHED_WORDS};
use cagmps::dmrg::{conjugate_hamiltonian, run, run_from, RunOutput, SweepConfig};
use cagmps::gmps::Gmps;
use cagmps::{ed, GrassmannTensor, Leg, ModelSpec, Parity, C64};
use ndarray::{Array2, Ix2};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 1;

type Check = Result<String, String>;

fn solve(spec: &ModelSpec, chi: usize, sweeps: usize, clifford: bool) -> Result<RunOutput, String> {
    let config = SweepConfig { chi_max: chi, n_sweeps: sweeps, clifford_enabled: clifford, ..SweepConfig::default() };
    let out = run(spec, &config, SEED).map_err(|e| e.to_string())?;
    superselected(&out.state)?;
    Ok(out)
}

/// Every site tensor even, with no weight on odd coefficients.
fn superselected(state: &Gmps) -> Result<(), String> {
    for (k, t) in state.sites().iter().enumerate() {
        if !t.is_even_declared() || t.odd_weight() != 0.0 {
            return Err(format!("site {k} carries odd weight {:e}", t.odd_weight()));
        }
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gate_counts() -> Check {
    let set = GateSet::compute().map_err(|e| e.to_string())?;
    ensure(set.counts == EXPECTED_COUNTS && set.len() == 12, format!("stage counts {}", set.counts))
}

fn published_words() -> Check {
    let set = canonical_gates().map_err(|e| e.to_string())?;
    let mut hit = vec![0usize; set.len()];
    for w in PUBLISHED_WORDS {
        let word: GateWord = w.parse().map_err(|e: cagmps::Error| e.to_string())?;
        match set.class_of(&word.tensor()) {
            Some(c) => hit[c] += 1,
            None => return Err(format!("{w:?} lies outside every class")),
        }
    }
    ensure(hit.iter().all(|&h| h == 1), format!("class hits {hit:?}"))
}

fn exact_diagonalization() -> Check {
    let spec = ModelSpec::tv(8, 1.0, 2.0);
    let exact = ed::ground_energy(&spec).map_err(|e| e.to_string())?;
    let mut detail = format!("ED {exact:.12}");
    let mut ok = true;
    for clifford in [false, true] {
        let out = solve(&spec, 64, 10, clifford)?;
        let rel = ((out.report.energy - exact) / exact).abs();
        ok &= rel <= 1e-8;
        detail += &format!(", {} rel err {rel:.1e}", name(clifford));
    }
    ensure(ok, detail)
}

fn free_fermions() -> Check {
    let spec = ModelSpec::tight_binding(12, 1.0);
    let exact = ed::free_fermion_energy(12, 1.0);
    let mut detail = format!("exact {exact:.12}");
    let mut ok = true;
    for clifford in [false, true] {
        let out = solve(&spec, 32, 10, clifford)?;
        let err = (out.report.energy - exact).abs();
        ok &= err <= 1e-8;
        detail += &format!(", {} err {err:.1e}", name(clifford));
    }
    ensure(ok, detail)
}

fn energy_direction() -> Check {
    let spec = ModelSpec::tv(32, 1.0, 2.0);
    let mut never_worse = true;
    let mut clearly_better = false;
    let mut detail = Vec::new();
    for chi in [8, 16, 32, 64] {
        let off = solve(&spec, chi, 40, false)?.report.energy;
        let on = solve(&spec, chi, 40, true)?.report.energy;
        never_worse &= on <= off + 1e-10;
        clearly_better |= off - on > 1e-6;
        detail.push(format!("chi {chi}: E_cagmps - E_gmps = {:.2e}", on - off));
    }
    ensure(never_worse && clearly_better, detail.join(", "))
}

fn entropy_profile() -> Check {
    let spec = ModelSpec::tv(50, 1.0, 2.0);
    let off = mean(&solve(&spec, 64, 40, false)?.report.entropies);
    let on = mean(&solve(&spec, 64, 40, true)?.report.entropies);
    ensure(on < off, format!("mean bond entropy gmps {off:.5}, cagmps {on:.5}"))
}

fn central_charge() -> Check {
    let mut ok = true;
    let mut detail = Vec::new();
    for clifford in [false, true] {
        let mut pts = Vec::new();
        for l in [16usize, 24, 32, 48] {
            let out = solve(&ModelSpec::tight_binding(l, 1.0), 32, CENTRAL_CHARGE_SWEEPS, clifford)?;
            pts.push((l as f64, out.report.entropies[l / 2 - 1]));
        }
        let fit = fit_central_charge(&pts).map_err(|e| e.to_string())?;
        ok &= (fit.c - 1.0).abs() <= 0.1 && fit.rms < 0.02;
        detail.push(format!("{}: c = {:.4}, rms {:.1e}", name(clifford), fit.c, fit.rms));
    }
    ensure(ok, detail.join(", "))
}

const CENTRAL_CHARGE_SWEEPS: usize = 20;

fn property_suites() -> Check {
    let mut parts = Vec::new();

    let mut runner = TestRunner::new_with_rng(
        Config { cases: 1000, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    runner
        .run(&common::berezin::case_strategy(), |case| {
            let d = common::berezin::check(&case);
            proptest::prop_assert!(d <= 1e-12, "difference {d:e}");
            Ok(())
        })
        .map_err(|e| format!("Berezin oracle: {e}"))?;
    parts.push("1000 Berezin contractions".to_string());

    let worst = svd_round_trips(200)?;
    if worst > 1e-12 {
        return Err(format!("SVD reconstruction or isometry off by {worst:e}"));
    }
    parts.push(format!("200 SVDs within {worst:.0e}"));

    let set = canonical_gates().map_err(|e| e.to_string())?;
    for (id, g) in set.gates.iter().enumerate() {
        let m = g.matrix();
        let dev = (m.t().mapv(|z| z.conj()).dot(&m) - Array2::<C64>::eye(4)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > 1e-12 || !g.tableau.is_permutation() {
            return Err(format!("gate {id}: unitarity {dev:e}, signed permutation {}", g.tableau.is_permutation()));
        }
        if g.tableau.compose(&g.tableau.inverse()) != ConjugationTable::identity() {
            return Err(format!("gate {id}: tableau does not invert"));
        }
    }
    parts.push("12 gates unitary".into());

    let h = ModelSpec::tv(6, 1.0, 2.0).hamiltonian().map_err(|e| e.to_string())?;
    for g in &set.gates {
        for j in 0..5 {
            let there = conjugate_hamiltonian(&h, &g.tableau, j);
            if conjugate_hamiltonian(&there, &g.tableau.inverse(), j) != h {
                return Err(format!("conjugation by {} at bond {j} does not round-trip", g.word));
            }
        }
    }
    parts.push("conjugation round trips".into());

    let mut runs = 0;
    for l in 4..=8usize {
        for parity in [Parity::Even, Parity::Odd] {
            for clifford in [false, true] {
                let spec = ModelSpec::tv(l, 1.0, 2.0);
                let h = spec.hamiltonian().map_err(|e| e.to_string())?;
                let state = Gmps::random_init(l, 2, parity, 100 + l as u64).map_err(|e| e.to_string())?;
                let config = SweepConfig {
                    chi_max: 1 << (l / 2),
                    n_sweeps: 4,
                    clifford_enabled: clifford,
                    ..SweepConfig::default()
                };
                let out = run_from(state, h, &config).map_err(|e| e.to_string())?;
                superselected(&out.state)?;
                let v = out.state.dense_vector().map_err(|e| e.to_string())?;
                let wrong: f64 = v
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (i.count_ones() % 2 == 1) != parity.is_odd())
                    .map(|(_, z)| z.norm_sqr())
                    .sum();
                if wrong != 0.0 {
                    return Err(format!("L={l} {parity:?}: weight {wrong:e} in the wrong parity sector"));
                }
                if !out.report.is_monotone(1e-9) {
                    return Err(format!("L={l} {parity:?} {}: energies {:?}", name(clifford), out.report.energies));
                }
                runs += 1;
            }
        }
    }
    parts.push(format!("{runs} runs superselected and monotone"));
    Ok(parts.join(", "))
}

/// Worst reconstruction or isometry error over `n` random even tensors.
fn svd_round_trips(n: usize) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let rank = rng.gen_range(2..=4);
        let legs: Vec<Leg> = (0..rank).map(|_| Leg::new(rng.gen_range(1..=3), rng.gen_bool(0.5))).collect();
        let t = GrassmannTensor::random(legs, true, &mut rng);
        let rows: Vec<usize> = (0..rng.gen_range(1..rank)).collect();
        let svd = t.svd(&rows, 1 << 20, 0.0).map_err(|e| e.to_string())?;
        let back = GrassmannTensor::contract(&svd.u, rows.len(), &svd.sv(), 0).map_err(|e| e.to_string())?;
        worst = worst.max(back.max_abs_diff(&t));

        let u = svd.u.coeffs();
        let bond = *u.shape().last().unwrap();
        let u = u.to_shape((u.len() / bond, bond)).unwrap().into_dimensionality::<Ix2>().unwrap();
        let gram = u.t().mapv(|z| z.conj()).dot(&u);
        for a in 0..bond {
            for b in 0..bond {
                let want = if a == b && svd.s[a] > 0.0 { 1.0 } else { 0.0 };
                worst = worst.max((gram[[a, b]] - C64::new(want, 0.0)).norm());
            }
        }
    }
    Ok(worst)
}

fn name(clifford: bool) -> &'static str {
    if clifford {
        "cagmps"
    } else {
        "gmps"
    }
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("gate-count chain", gate_counts),
        ("published gate words", published_words),
        ("exact diagonalization, t-V L=8", exact_diagonalization),
        ("free fermions, L=12", free_fermions),
        ("energy direction, t-V L=32", energy_direction),
        ("entropy profile, t-V L=50", entropy_profile),
        ("central charge, tight binding", central_charge),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (k, (title, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t0.elapsed().as_secs_f64();
        match result {
            Ok(d) => println!("criterion {}: PASS  {title}: {d} ({secs:.1}s)", k + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {}: FAIL  {title}: {d} ({secs:.1}s)", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
