//! Acceptance harness: one line per criterion, nonzero exit on any failure.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use isoshape::energy::{evaluate, riesz_self, weighted_perimeter};
use isoshape::fuglede::{
    i1_i2_split, perimeter_deficit, random_perturbation, riesz_deficit, ComparisonBall, Perturbation,
};
use isoshape::geometry::{
    make_ball, make_grid, sphere_area, unit_volume_radius, Configuration, EnergyParams, SphereGrid,
};
use isoshape::optimize::{
    initial_configuration, minimize, scaling_identity, sweep_gamma, InitSpec, Minimization,
    OptimizerOptions,
};
use isoshape::oracle::{
    check_en_lower_bound, lipschitz_constant, lipschitz_corpus, mc_riesz, rel_isop_corpus, CorpusOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{gradient_error, random_shape};

const PERIMETER_TOL: f64 = 1e-10;
const SCALING_TOL: f64 = 1e-6;
const HOMOGENEITY_TOL: f64 = 1e-4;
const SIGMAS: f64 = 3.0;
const GRADIENT_TOL: f64 = 1e-4;
const GRADIENT_SHAPES: usize = 20;
const ASPHERICITY_TOL: f64 = 1e-3;
const BALL_ENERGY_TOL: f64 = 1e-4;
const RICHARDSON_TOL: f64 = 0.01;
const I2_FLOOR: f64 = -1e-12;
const C1_BOUND: f64 = 0.1;
const REL_ISOP_SPREAD: f64 = 0.10;
const EXPANSION_TOL: f64 = 0.02;
const SWEEP_TOL: f64 = 1e-6;
const MC_SAMPLES: usize = 2_000_000;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn grid(d: usize, n: usize) -> Arc<SphereGrid> {
    Arc::new(make_grid(d, n).unwrap())
}

fn closed_form_perimeter() -> Verdict {
    let mut worst: f64 = 0.0;
    for d in [2, 3] {
        let g = grid(d, if d == 2 { 64 } else { 16 });
        for r in [0.5, unit_volume_radius(d), 1.0, 2.0] {
            for p in [0.0, 1.0, 2.0, 3.0] {
                let b = make_ball(r, &vec![0.0; d], g.clone()).unwrap();
                let exact = sphere_area(d) * r.powf(d as f64 - 1.0 + p);
                worst = worst.max((weighted_perimeter(&b, p) / exact - 1.0).abs());
            }
        }
    }
    verdict(worst <= PERIMETER_TOL, format!("max rel. error {worst:.1e} (tol {PERIMETER_TOL:.0e})"))
}

fn scaling_correspondence() -> Verdict {
    let g = grid(2, 128);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for _ in 0..10 {
        let s = random_shape(&g, &[0.1, -0.05], 0.5, 0.3, &mut rng);
        let cfg = Configuration::single(s.dilate(s.volume().powf(-0.5)).unwrap());
        for p in [0.5, 1.0, 3.0] {
            for alpha in [0.5, 1.0] {
                let gamma = 10f64.powf(rng.gen_range(-2.0..2.0));
                let params = EnergyParams::new(2, p, alpha, gamma).unwrap();
                worst = worst.max(scaling_identity(&cfg, &params).unwrap().residual);
                cases += 1;
            }
        }
    }
    verdict(worst <= SCALING_TOL, format!("{cases} cases, max residual {worst:.1e} (tol {SCALING_TOL:.0e})"))
}

fn riesz_homogeneity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_h: f64 = 0.0;
    let mut worst_z: f64 = 0.0;
    let mut shapes = 0;
    for (d, n, alphas) in [(2, 128, vec![0.5, 1.0, 1.5]), (3, 16, vec![0.5, 1.0, 1.5, 2.0, 2.5])] {
        let g = grid(d, n);
        for &alpha in &alphas {
            for _ in 0..2 {
                let s = random_shape(&g, &vec![0.05; d], 0.6, 0.3, &mut rng);
                let v = riesz_self(&s, alpha).unwrap();
                let t = rng.gen_range(0.5..2.0);
                let vt = riesz_self(&s.dilate(t).unwrap(), alpha).unwrap().value;
                worst_h = worst_h.max((vt / v.value / t.powf(2.0 * d as f64 - alpha) - 1.0).abs());
                let mc = mc_riesz(&s, None, alpha, MC_SAMPLES, shapes as u64).unwrap();
                let slack = v.error.unwrap_or(0.0).abs();
                let z = ((v.value - mc.estimate).abs() - slack).max(0.0) / mc.std_error;
                worst_z = worst_z.max(z);
                shapes += 1;
            }
        }
    }
    verdict(
        worst_h <= HOMOGENEITY_TOL && worst_z <= SIGMAS,
        format!("{shapes} shapes, homogeneity {worst_h:.1e} (tol {HOMOGENEITY_TOL:.0e}), quadrature vs MC {worst_z:.2}σ (tol {SIGMAS}σ)"),
    )
}

fn gradient_correctness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    for d in [2, 3] {
        let g = grid(d, if d == 2 { 32 } else { 8 });
        for p in [0.0, 1.0, 2.0] {
            let alphas: &[f64] = if d == 2 { &[0.5, 1.0, 1.5] } else { &[0.5, 1.0, 1.5, 2.0, 2.5] };
            for &alpha in alphas {
                let params = EnergyParams::new(d, p, alpha, 1.0).unwrap();
                for k in 0..GRADIENT_SHAPES {
                    let cfg = if k % 4 == 3 {
                        let mut c = vec![0.0; d];
                        c[0] = -0.8;
                        let a = random_shape(&g, &c, 0.4, 0.3, &mut rng);
                        c[0] = 0.8;
                        let b = random_shape(&g, &c, 0.4, 0.3, &mut rng);
                        Configuration::new(vec![a, b]).unwrap()
                    } else {
                        let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.3..0.3)).collect();
                        Configuration::single(random_shape(&g, &c, 0.6, 0.3, &mut rng))
                    };
                    worst = worst.max(gradient_error(&cfg, &params));
                }
                cells += 1;
            }
        }
    }
    verdict(
        worst <= GRADIENT_TOL,
        format!("{cells} cells x {GRADIENT_SHAPES} shapes, max rel. error {worst:.1e} (tol {GRADIENT_TOL:.0e})"),
    )
}

fn small_gamma_ball() -> Verdict {
    let n = 128;
    let params = EnergyParams::new(2, 2.0, 1.0, 0.01).unwrap();
    let ball = Configuration::single(make_ball(unit_volume_radius(2), &[0.0, 0.0], grid(2, n)).unwrap());
    let e_ball = evaluate(&ball, &params).unwrap().total;
    let (mut asph, mut de): (f64, f64) = (0.0, 0.0);
    for mode in 2..=6 {
        let opts = OptimizerOptions {
            init: InitSpec::PerturbedBall { eps: 0.2, mode },
            seed: mode as u64,
            ..Default::default()
        };
        let init = initial_configuration(&opts.init, 2, n, 1.0, opts.seed).unwrap();
        let m = minimize(&init, &params, &opts).unwrap();
        asph = asph.max(m.record.asphericity);
        de = de.max((m.record.energy - e_ball).abs());
    }
    verdict(
        asph <= ASPHERICITY_TOL && de <= BALL_ENERGY_TOL,
        format!("modes 2-6: max asphericity {asph:.1e} (tol {ASPHERICITY_TOL:.0e}), max |E - E(ball)| {de:.1e} (tol {BALL_ENERGY_TOL:.0e})"),
    )
}

fn fuglede_suite() -> Verdict {
    let mut min_per = f64::INFINITY;
    let mut min_i2 = f64::INFINITY;
    let mut riesz_ok = true;
    let mut family = 0;
    for (d, n) in [(2, 128), (3, 24)] {
        let g = grid(d, n);
        for p in [1.0, 2.0, 3.0] {
            for seed in 0..10 {
                let c1 = C1_BOUND * (0.2 + 0.8 * (seed as f64 + 0.5) / 10.0);
                let u = random_perturbation(g.clone(), 1.0, p, c1, 4.0, 3, 100 * d as u64 + seed).unwrap();
                let per = perimeter_deficit(&u, ComparisonBall::VolumeMatched).unwrap();
                let (_, i2) = i1_i2_split(&u, ComparisonBall::VolumeMatched).unwrap();
                min_per = min_per.min(per);
                min_i2 = min_i2.min(i2);
                if p == 2.0 {
                    let rd = riesz_deficit(&u, 1.0).unwrap();
                    riesz_ok &= rd.value >= -rd.error;
                }
                family += 1;
            }
        }
    }
    let g = grid(2, 256);
    let mut residual: f64 = 0.0;
    for p in [1.0, 2.0, 3.0] {
        for k in 2..=5 {
            let q = |eps: f64| {
                let u = Perturbation::mode(g.clone(), k, eps, 1.0, p).unwrap();
                perimeter_deficit(&u, ComparisonBall::BaseRadius).unwrap() / (eps * eps)
            };
            let (a, b, c) = (q(1e-2), q(5e-3), q(2.5e-3));
            let (r1, r2) = ((4.0 * b - a) / 3.0, (4.0 * c - b) / 3.0);
            residual = residual.max((r2 - r1).abs() / r2.abs());
        }
    }
    verdict(
        min_per >= 0.0 && min_i2 >= I2_FLOOR && riesz_ok && residual <= RICHARDSON_TOL,
        format!(
            "{family} perturbations: min deficit {min_per:.2e}, min I2 {min_i2:.2e}, Riesz deficits {}; Richardson residual {residual:.1e} (tol {RICHARDSON_TOL})",
            if riesz_ok { "above their error bars" } else { "BELOW their error bars" }
        ),
    )
}

fn inequality_corpora() -> Verdict {
    let opts = CorpusOptions::default();
    let lip = lipschitz_corpus(&opts, 1.0).unwrap();
    let (rel, fitted) = rel_isop_corpus(&opts).unwrap();
    let lo = fitted.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = fitted.iter().copied().fold(0.0, f64::max);
    let spread = (hi - lo) / lo;
    verdict(
        lip.violations == 0 && lip.trials == opts.lipschitz_pairs && rel.violations == 0 && spread <= REL_ISOP_SPREAD,
        format!(
            "Lipschitz C = {:.3}: {} violations in {} pairs; fitted c_d per annulus {:?}, spread {:.1}% (tol {:.0}%)",
            lipschitz_constant(2, 1.0),
            lip.violations,
            lip.trials,
            fitted.map(|c| (c * 1e4).round() / 1e4),
            100.0 * spread,
            100.0 * REL_ISOP_SPREAD
        ),
    )
}

fn small_mass_expansion() -> Verdict {
    let c = check_en_lower_bound(1e-4, 2.0, 2).unwrap();
    let dev = (c.ratio - 1.0).abs();
    verdict(dev <= EXPANSION_TOL, format!("exact/(C̄ m) = {:.5} at m = 1e-4 (tol {EXPANSION_TOL})", c.ratio))
}

fn sweep_sanity() -> Verdict {
    let gammas: Vec<f64> = (0..=10).map(|k| 10f64.powf(-3.0 + 0.5 * k as f64)).collect();
    let params = EnergyParams::new(2, 2.0, 1.0, gammas[0]).unwrap();
    let opts = OptimizerOptions {
        init: InitSpec::PerturbedBall { eps: 0.2, mode: 2 },
        ..Default::default()
    };
    let runs = sweep_gamma(&gammas, &params, 128, &opts).unwrap();
    let e: Vec<f64> = runs.iter().map(|m| m.record.energy).collect();
    let scale = e.iter().copied().fold(0.0, |a: f64, b| a.max(b.abs()));
    let tol = SWEEP_TOL * scale;
    let mono = e.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let concave = runs
        .windows(3)
        .map(|w| {
            let (a, b, c) = (&w[0].record, &w[1].record, &w[2].record);
            b.energy - (a.energy + (c.energy - a.energy) * (b.gamma - a.gamma) / (c.gamma - a.gamma))
        })
        .fold(f64::INFINITY, f64::min);
    let asph = runs[0].record.asphericity;
    verdict(
        mono >= -tol && concave >= -tol && asph <= ASPHERICITY_TOL,
        format!(
            "min increment {mono:.2e}, min concavity margin {concave:.2e} (tol -{tol:.1e}), asphericity at 1e-3 {asph:.1e}"
        ),
    )
}

fn fragmentation() -> Verdict {
    let n = 128;
    let params = EnergyParams::new(2, 2.0, 1.0, 100.0).unwrap();
    let inits = [
        InitSpec::Ball,
        InitSpec::PerturbedBall { eps: 0.2, mode: 2 },
        InitSpec::PerturbedBall { eps: 0.3, mode: 3 },
        InitSpec::Multiball { count: 2, spacing: 1.0 },
        InitSpec::Multiball { count: 2, spacing: 1.5 },
    ];
    let mut best: [Option<Minimization>; 2] = [None, None];
    for (seed, init) in inits.iter().enumerate() {
        let opts = OptimizerOptions {
            init: *init,
            seed: seed as u64,
            ..Default::default()
        };
        let cfg = initial_configuration(init, 2, n, 1.0, opts.seed).unwrap();
        let m = minimize(&cfg, &params, &opts).unwrap();
        let slot = &mut best[m.record.n_components - 1];
        if slot.as_ref().is_none_or(|b| m.record.energy < b.record.energy) {
            *slot = Some(m);
        }
    }
    let [Some(one), Some(two)] = best else {
        return verdict(false, "missing a one- or two-component candidate".into());
    };
    let mut checks = Vec::new();
    for (k, m) in [&one, &two].into_iter().enumerate() {
        let quad = isoshape::energy::riesz_config(&m.config, 1.0).unwrap();
        let mc = mc_riesz(&m.config, None, 1.0, MC_SAMPLES, 10 + k as u64).unwrap();
        let slack = quad.error.unwrap_or(0.0).abs();
        let z = ((quad.value - mc.estimate).abs() - slack).max(0.0) / mc.std_error;
        let e_mc = m.record.perimeter + params.gamma * mc.estimate;
        checks.push((z, e_mc, params.gamma * mc.std_error));
    }
    let gap_sigma = (checks[0].2.powi(2) + checks[1].2.powi(2)).sqrt();
    let mc_gap = checks[0].1 - checks[1].1;
    let pass = two.record.energy < one.record.energy
        && checks.iter().all(|c| c.0 <= SIGMAS)
        && mc_gap > SIGMAS * gap_sigma;
    verdict(
        pass,
        format!(
            "E(one) = {:.4}, E(two) = {:.4}; MC agreement {:.2}σ / {:.2}σ; MC gap {mc_gap:.3} ± {gap_sigma:.3}",
            one.record.energy, two.record.energy, checks[0].0, checks[1].0
        ),
    )
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Verdict); 10] = [
        ("closed-form perimeter", Duration::from_secs(1), closed_form_perimeter),
        ("scaling correspondence", Duration::from_secs(60), scaling_correspondence),
        ("Riesz homogeneity and MC agreement", Duration::from_secs(300), riesz_homogeneity),
        ("gradient vs finite differences", Duration::from_secs(300), gradient_correctness),
        ("ball minimizes at small gamma", Duration::from_secs(600), small_gamma_ball),
        ("Fuglede deficits", Duration::from_secs(600), fuglede_suite),
        ("inequality corpora", Duration::from_secs(600), inequality_corpora),
        ("small-mass perimeter expansion", Duration::from_secs(1), small_mass_expansion),
        ("sweep monotone and concave", Duration::from_secs(1800), sweep_sanity),
        ("fragmentation at gamma = 100", Duration::from_secs(1800), fragmentation),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let took = start.elapsed();
        let pass = v.pass && took <= *budget;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<36} {}  {} [{:.1?} of {:?}]",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            took,
            budget
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
