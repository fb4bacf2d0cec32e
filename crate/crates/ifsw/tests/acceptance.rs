//! Acceptance gate: fourteen numbered criteria, one test and one
//! PASS/FAIL line each, with every tolerance pinned in the assertion.
//!
//! Run with `cargo test -p ifsw --test acceptance -- --nocapture` to see
//! the verdict lines.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ifsw::config::{RunConfig, WeightSpec};
use ifsw::dictionary::standard_dictionary;
use ifsw::expr::parse;
use ifsw::grid::{Grid, GridFunction};
use ifsw::holonomic::{
    average_entropy, differential_integral, empirical_holonomic, holonomic_lift,
    positive_candidates, variational_entropy_upper,
};
use ifsw::ifs::{normalize, PotentialIFS};
use ifsw::markov::{chaos_game, eigen_measure, hutchinson_fixed_point, markov_apply};
use ifsw::pressure::{equilibrium, gateaux_probe, pressure, PressureMethod};
use ifsw::transfer::{
    eigen_discounted, eigen_power, log_pressure_sequence, power_apply, word_sum_oracle,
    DiscountSchedule,
};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn report(n: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {n:02} {tag} — {name}: {detail}");
    assert!(pass, "criterion {n:02} failed — {name}: {detail}");
}

fn dyadic_exp() -> PotentialIFS {
    let cfg = RunConfig::from_path(fixture("dyadic-exp.json")).unwrap();
    match cfg.build().unwrap() {
        ifsw::config::BuiltSystem::Potential(p) => p,
        _ => unreachable!("fixture defines a potential"),
    }
}

fn example26(psi: &str, m: usize) -> PotentialIFS {
    let grid = Grid::new(1, m).unwrap();
    let maps = vec![vec![parse("x").unwrap()], vec![parse("1 - x").unwrap()]];
    PotentialIFS::from_potential(grid, maps, parse(psi).unwrap()).unwrap()
}

#[test]
fn criterion_01_word_sum_equivalence() {
    let clock = Instant::now();
    // m − 1 divisible by 8 keeps all five probes on nodes.
    let grid = Grid::new(1, 4097).unwrap();
    let maps = vec![vec![parse("x / 2").unwrap()], vec![parse("x / 2 + 1 / 2").unwrap()]];
    let sys = PotentialIFS::from_potential(grid, maps, parse("exp(x)").unwrap()).unwrap();
    let ifs = sys.ifs();

    let iterates = power_apply(ifs, &GridFunction::constant(grid, 1.0), 10).unwrap();
    let mut worst = 0.0_f64;
    for n in 1..=10 {
        for x in [0.0, 0.125, 0.25, 0.5, 1.0] {
            let oracle = word_sum_oracle(ifs, &[x], n).unwrap();
            let rel = (iterates[n].eval(&[x]).unwrap() - oracle).abs() / oracle;
            worst = worst.max(rel);
        }
    }
    let elapsed = clock.elapsed();
    report(
        1,
        "word-sum equivalence",
        worst <= 1e-9 && elapsed.as_secs_f64() < 10.0,
        &format!("worst relative error {worst:.2e} (≤ 1e-9), N = 1..=10, 5 probes, {elapsed:.2?} (< 10 s)"),
    );
}

#[test]
fn criterion_02_balanced_family_exact() {
    let sys = example26("x + 1/2", 1025);
    let ifs = sys.ifs();

    let iterates = power_apply(ifs, &GridFunction::constant(ifs.grid(), 1.0), 30).unwrap();
    let mut worst = 0.0_f64;
    for (n, f) in iterates.iter().enumerate().skip(1) {
        let target = (n as f64).exp2();
        for v in f.values() {
            worst = worst.max((v - target).abs() / target);
        }
    }

    let pair = eigen_power(ifs, 1e-12, 100).unwrap();
    let h_dev = pair.h.values().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let ok = worst <= 1e-12
        && pair.converged
        && h_dev <= 1e-10
        && (pair.rho - 2.0).abs() <= 1e-10
        && pair.iterations <= 2;
    report(
        2,
        "balanced reflection family",
        ok,
        &format!(
            "Bᴺ1 vs 2ᴺ worst rel {worst:.1e} (≤ 1e-12, N ≤ 30); sup|h−1| = {h_dev:.1e} (≤ 1e-10); ρ = {} (±1e-10) in {} iteration(s) (≤ 2)",
            pair.rho, pair.iterations
        ),
    );
}

#[test]
fn criterion_03_unbalanced_family_honest_nonconvergence() {
    let sys = example26("exp(x)", 1025);
    let ifs = sys.ifs();

    // At N = 1 the growth average is exactly ln(ψ(x) + ψ(1−x)).
    let seq = log_pressure_sequence(ifs, 1).unwrap();
    let a1 = &seq.averages[0];
    let mut worst = 0.0_f64;
    for (k, p) in ifs.grid().nodes() {
        let x = p[0];
        let target = (x.exp() + (1.0 - x).exp()).ln();
        worst = worst.max((a1.values()[k] - target).abs());
    }

    let pair = eigen_power(ifs, 1e-10, 500).unwrap();
    let ok = worst <= 1e-6 && !pair.converged && pair.gap() >= 0.1;
    report(
        3,
        "unbalanced reflection family",
        ok,
        &format!(
            "max node error of a₁ vs ln(ψ(x)+ψ(1−x)) = {worst:.1e} (≤ 1e-6); non-convergence with Collatz–Wielandt gap {:.4} (≥ 0.1) after {} iterations",
            pair.gap(),
            pair.iterations
        ),
    );
}

#[test]
fn criterion_04_growth_average_rate() {
    let sys = dyadic_exp();
    let ifs = sys.ifs();
    let pair = eigen_power(ifs, 1e-10, 10_000).unwrap();
    assert!(pair.converged);
    let ln_rho = pair.rho.ln();

    let seq = log_pressure_sequence(ifs, 60).unwrap();
    let dev = seq.sup_deviation(ln_rho);
    let scaled: Vec<f64> = dev.iter().enumerate().map(|(i, d)| (i + 1) as f64 * d).collect();
    let budget = 2.0 * scaled[9]; // value at N = 10
    let worst = scaled[9..60].iter().cloned().fold(0.0, f64::max);
    report(
        4,
        "first-order rate of the growth averages",
        worst <= budget,
        &format!(
            "N·sup|a_N − ln ρ*| ≤ {worst:.4} for 10 ≤ N ≤ 60, budget 2·(N=10 value) = {budget:.4}"
        ),
    );
}

#[test]
fn criterion_05_cross_solver_agreement() {
    let sys = dyadic_exp();
    let ifs = sys.ifs();
    let power = eigen_power(ifs, 1e-10, 10_000).unwrap();
    let disc = eigen_discounted(ifs, &DiscountSchedule::default()).unwrap();
    let rel = (power.rho - disc.pair.rho).abs() / power.rho;
    let sup_gap = power
        .h
        .values()
        .iter()
        .zip(disc.pair.h.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let ok = power.converged && disc.pair.converged && rel <= 1e-6 && sup_gap <= 1e-5;
    report(
        5,
        "power vs discounted solver",
        ok,
        &format!("|Δρ|/ρ = {rel:.2e} (≤ 1e-6); sup|Δh| = {sup_gap:.2e} (≤ 1e-5)"),
    );
}

#[test]
fn criterion_06_eigenmeasure_consistency() {
    let sys = dyadic_exp();
    let ifs = sys.ifs();
    let power = eigen_power(ifs, 1e-10, 10_000).unwrap();
    let em = eigen_measure(ifs, 1e-6, 2_000).unwrap();

    // n · (extremes of a single weight) — the coarse growth envelope.
    let n = ifs.n() as f64;
    let (mut qmin, mut qmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..ifs.n() {
        qmin = qmin.min(ifs.weight_values(i).min_value());
        qmax = qmax.max(ifs.weight_values(i).max_value());
    }
    let in_bounds = em.rho >= n * qmin - 1e-9 && em.rho <= n * qmax + 1e-9;

    let rel = (em.rho - power.rho).abs() / power.rho;

    // Weak-sense eigen residual over the dictionary: |∫f dLμ − ρ∫f dμ|.
    let mut dict_residual = 0.0_f64;
    let pushed = markov_apply(ifs, &em.measure).unwrap();
    for t in standard_dictionary(1) {
        let lhs = pushed.integrate(|p| (t.f)(&p[..1]));
        let rhs = em.rho * em.measure.integrate(|p| (t.f)(&p[..1]));
        dict_residual = dict_residual.max((lhs - rhs).abs());
    }

    let ok = em.converged && in_bounds && rel <= 1e-3 && dict_residual <= 1e-3;
    report(
        6,
        "eigenmeasure consistency",
        ok,
        &format!(
            "ρ_measure = {:.9} ∈ [n·min q, n·max q] = [{:.4}, {:.4}]; |ρ_measure − ρ_pw|/ρ_pw = {rel:.2e} (≤ 1e-3); dictionary residual {dict_residual:.2e} (≤ 1e-3)",
            em.rho,
            n * qmin,
            n * qmax
        ),
    );
}

#[test]
fn criterion_07_normalization() {
    let sys = dyadic_exp();
    let pair = eigen_power(sys.ifs(), 1e-10, 10_000).unwrap();
    let nifs = normalize(sys.ifs(), &pair.h, pair.rho).unwrap();
    let dev_exp = nifs.sum_deviation();

    let balanced = example26("x + 1/2", 1025);
    let pair = eigen_power(balanced.ifs(), 1e-12, 100).unwrap();
    let nifs = normalize(balanced.ifs(), &pair.h, pair.rho).unwrap();
    let dev_bal = nifs.sum_deviation();

    let ok = dev_exp <= 1e-6 && dev_bal <= 1e-12;
    report(
        7,
        "eigenpair normalisation",
        ok,
        &format!("max|Σⱼ pⱼ − 1|: dyadic/exp {dev_exp:.2e} (≤ 1e-6), balanced {dev_bal:.2e} (≤ 1e-12)"),
    );
}

#[test]
fn criterion_08_holonomy_defect_identity() {
    let sys = dyadic_exp();
    let pair = eigen_power(sys.ifs(), 1e-10, 10_000).unwrap();
    let nifs = normalize(sys.ifs(), &pair.h, pair.rho).unwrap();

    let mut worst_identity = 0.0_f64;
    let mut bound_ok = true;
    let mut detail = String::new();
    for (steps, seed, x0) in [(100_000usize, 42u64, 0.2), (10_000, 7, 0.8)] {
        let orbit = chaos_game(&nifs, &[x0], steps, seed).unwrap();
        let mu = empirical_holonomic(&orbit, 0).unwrap();
        for t in standard_dictionary(1) {
            let f = GridFunction::from_fn(nifs.grid(), |p| Ok((t.f)(p))).unwrap();
            let lhs = differential_integral(&nifs, &f, &mu).unwrap();
            let rhs = (f.eval(&orbit.final_point()[..1]).unwrap()
                - f.eval(&orbit.points[0][..1]).unwrap())
                / steps as f64;
            worst_identity = worst_identity.max((lhs - rhs).abs());
            bound_ok &= lhs.abs() <= 2.0 * t.sup_norm / steps as f64 + 1e-12;
        }
        detail.push_str(&format!("N = {steps}: identity defect ≤ {worst_identity:.2e}; "));
    }
    let ok = worst_identity <= 1e-12 && bound_ok;
    report(
        8,
        "holonomy defect telescoping",
        ok,
        &format!("{detail}all dictionary integrals within 2·sup‖f‖/N"),
    );
}

#[test]
fn criterion_09_variational_principle() {
    let clock = Instant::now();
    let sys = dyadic_exp(); // m = 1025 from the fixture
    let pair = eigen_power(sys.ifs(), 1e-10, 10_000).unwrap();
    let nifs = normalize(sys.ifs(), &pair.h, pair.rho).unwrap();

    let orbit = chaos_game(&nifs, &[0.3], 1_000_000, 42).unwrap();
    let pairs = empirical_holonomic(&orbit, 0).unwrap();
    let d = pairs.disintegrate(nifs.grid()).unwrap();
    let h_a = average_entropy(&d);

    // ∫ ln ψ dμ over the orbit's x-marginal, with exact potential arithmetic.
    let mut energy = 0.0;
    let w = 1.0 / orbit.indices.len() as f64;
    for p in &orbit.points[..orbit.indices.len()] {
        energy += w * sys.psi_at(&p[..1]).unwrap().ln();
    }

    let residual = (h_a + energy - pair.rho.ln()).abs();
    let elapsed = clock.elapsed();
    let ok = residual <= 1e-3 && elapsed.as_secs_f64() < 120.0;
    report(
        9,
        "variational principle on a 10⁶-step orbit",
        ok,
        &format!(
            "|h_a + ∫ln ψ dμ − ln ρ| = {residual:.2e} (≤ 1e-3); h_a = {h_a:.6}, energy = {energy:.6}, ln ρ = {:.6}; {elapsed:.2?} (< 2 min)",
            pair.rho.ln()
        ),
    );
}

#[test]
fn criterion_10_entropy_sandwich_on_every_fixture() {
    let mut detail = String::new();
    let mut ok = true;

    for name in [
        "example26-balanced.json",
        "example26-exp.json",
        "dyadic-exp.json",
        "dyadic-uniform.json",
        "cantor.json",
        "reflection-2d.json",
    ] {
        let cfg = RunConfig::from_path(fixture(name)).unwrap();
        let built = cfg.build().unwrap();
        let mut opts = cfg.solve_options();
        opts.measure_tol = 1e-6;
        let ln_n = (built.ifs().n() as f64).ln();

        match &cfg.weights {
            WeightSpec::Potential { .. } => {
                let sys = built.potential().unwrap();
                let eq = equilibrium(sys, &opts).unwrap();
                if name == "example26-exp.json" {
                    // No positive eigenfunction exists, so no equilibrium
                    // state: the pipeline must say so rather than emit a
                    // sandwich for a fake measure.
                    ok &= !eq.converged;
                    detail.push_str(&format!("{name}: no equilibrium (flagged: {}); ", !eq.converged));
                    continue;
                }
                let h_a = eq.entropy_lower;
                let h_v = eq.entropy_upper.value;
                let sandwich = 0.0 <= h_a && h_a <= h_v + 1e-12 && h_v <= ln_n + 1e-9;
                let tight = h_v - h_a <= 1e-4; // g* = ψ·h is on the candidate list
                ok &= eq.converged && sandwich && tight;
                detail.push_str(&format!(
                    "{name}: 0 ≤ {h_a:.6} ≤ {h_v:.6} ≤ ln {} (gap {:.1e} ≤ 1e-4); ",
                    built.ifs().n(),
                    h_v - h_a
                ));
            }
            WeightSpec::List(_) => {
                let nifs = built.probability_system().unwrap();
                let fp = hutchinson_fixed_point(&nifs, opts.measure_tol, opts.measure_max_iter).unwrap();
                let lift = holonomic_lift(&nifs, &fp.measure).unwrap();
                let d = lift.disintegrate(nifs.grid()).unwrap();
                let h_a = average_entropy(&d);
                let bound =
                    variational_entropy_upper(&nifs, &d, &positive_candidates(nifs.grid())).unwrap();
                let h_v = bound.value;
                let sandwich = 0.0 <= h_a && h_a <= h_v + 1e-12 && h_v <= ln_n + 1e-9;
                ok &= fp.converged && sandwich;
                detail.push_str(&format!(
                    "{name}: 0 ≤ {h_a:.6} ≤ {h_v:.6} ≤ ln {}; ",
                    built.ifs().n()
                ));
            }
        }
    }
    report(10, "entropy sandwich on every fixture", ok, detail.trim_end_matches("; "));
}

#[test]
fn criterion_11_gibbs_inequality() {
    let mut rng = StdRng::seed_from_u64(1105);
    let mut worst_violation = f64::NEG_INFINITY;
    let mut worst_equality_gap = 0.0_f64;
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=8);
        let draw = |rng: &mut StdRng| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-12).collect();
            let s: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= s);
            v
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let h = -a.iter().map(|x| x * x.ln()).sum::<f64>();
        let cross = -a.iter().zip(&b).map(|(x, y)| x * y.ln()).sum::<f64>();
        worst_violation = worst_violation.max(h - cross);
        let self_cross = -a.iter().zip(&a).map(|(x, y)| x * y.ln()).sum::<f64>();
        worst_equality_gap = worst_equality_gap.max((h - self_cross).abs());
    }
    let ok = worst_violation <= 1e-12 && worst_equality_gap <= 1e-12;
    report(
        11,
        "Gibbs inequality over 10⁴ random pairs",
        ok,
        &format!(
            "max of (−Σa ln a) − (−Σa ln b) = {worst_violation:.2e} (≤ 1e-12); equality gap at b = a: {worst_equality_gap:.2e} (≤ 1e-12)"
        ),
    );
}

#[test]
fn criterion_12_hutchinson_moments() {
    let cfg = RunConfig::from_path(fixture("dyadic-uniform.json")).unwrap();
    let nifs = cfg.build().unwrap().probability_system().unwrap();
    let fp = hutchinson_fixed_point(&nifs, 1e-6, 2_000).unwrap();
    let m1 = fp.measure.integrate(|p| p[0]);
    let m2 = fp.measure.integrate(|p| p[0] * p[0]);
    let m3 = fp.measure.integrate(|p| p[0] * p[0] * p[0]);

    let cfg = RunConfig::from_path(fixture("cantor.json")).unwrap();
    let nifs = cfg.build().unwrap().probability_system().unwrap();
    let fp = hutchinson_fixed_point(&nifs, 1e-6, 2_000).unwrap();
    let c1 = fp.measure.integrate(|p| p[0]);

    let ok = (m1 - 0.5).abs() <= 1e-3
        && (m2 - 1.0 / 3.0).abs() <= 1e-3
        && (m3 - 0.25).abs() <= 1e-3
        && (c1 - 0.5).abs() <= 1e-3;
    report(
        12,
        "invariant moments",
        ok,
        &format!(
            "dyadic: ({m1:.6}, {m2:.6}, {m3:.6}) vs (1/2, 1/3, 1/4) ± 1e-3; Cantor m₁ = {c1:.6} vs 1/2 ± 1e-3"
        ),
    );
}

#[test]
fn criterion_13_pressure_shift_rule() {
    let mut detail = String::new();
    let mut ok = true;
    for (name, psi, shifted) in
        [("dyadic-exp", "exp(x)", "exp(x + 1)"), ("example26-balanced", "x + 1/2", "exp(1) * (x + 1/2)")]
    {
        let grid = Grid::new(1, 1025).unwrap();
        let maps: Vec<Vec<ifsw::expr::Expr>> = if name == "dyadic-exp" {
            vec![vec![parse("x / 2").unwrap()], vec![parse("x / 2 + 1 / 2").unwrap()]]
        } else {
            vec![vec![parse("x").unwrap()], vec![parse("1 - x").unwrap()]]
        };
        let base = PotentialIFS::from_potential(grid, maps.clone(), parse(psi).unwrap()).unwrap();
        let plus = PotentialIFS::from_potential(grid, maps, parse(shifted).unwrap()).unwrap();
        let opts = ifsw::pressure::SolveOptions { tol: 1e-10, ..Default::default() };
        let p0 = pressure(base.ifs(), PressureMethod::Power, &opts).unwrap();
        let p1 = pressure(plus.ifs(), PressureMethod::Power, &opts).unwrap();
        let defect = (p1.pressure - p0.pressure - 1.0).abs();
        ok &= defect <= 1e-8;
        detail.push_str(&format!("{name}: |P(e·ψ) − P(ψ) − 1| = {defect:.2e}; "));
    }
    report(13, "pressure shift rule on two fixtures", ok, detail.trim_end_matches("; "));
}

#[test]
fn criterion_14_gateaux_probe() {
    let sys = dyadic_exp();
    let mut opts = ifsw::pressure::SolveOptions::default();
    opts.tol = 1e-10;
    opts.measure_tol = 1e-6;
    let eta = parse("sin(pi * x)").unwrap();
    let table = gateaux_probe(&sys, &eta, &[1e-2, 1e-3, 1e-4], &opts).unwrap();
    let d: Vec<f64> = table.rows.iter().map(|r| r.discrepancy).collect();
    let monotone = d.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let ok = monotone && d[2] <= 5e-3 && table.rows.iter().all(|r| r.converged);
    report(
        14,
        "pressure derivative probe",
        ok,
        &format!(
            "discrepancies over t = (1e-2, 1e-3, 1e-4): ({:.2e}, {:.2e}, {:.2e}) — non-increasing, last ≤ 5e-3",
            d[0], d[1], d[2]
        ),
    );
}
