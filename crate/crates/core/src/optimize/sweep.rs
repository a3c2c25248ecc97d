use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::minimize::{initial_configuration, minimize, Minimization, OptimizerOptions, Status};
use crate::energy::{evaluate, EnergyBreakdown};
use crate::geometry::{h1_norm_sq, Configuration, EnergyParams};
use crate::{Error, Result};

/// Energies closer than this are ties, broken by smaller asphericity.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// Summary of one minimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub gamma: f64,
    pub p: f64,
    pub alpha: f64,
    pub d: usize,
    pub energy: f64,
    pub perimeter: f64,
    pub riesz: f64,
    pub volume: f64,
    pub n_components: usize,
    pub asphericity: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SweepRecord {
    pub(crate) fn from_result(
        cfg: &Configuration,
        params: &EnergyParams,
        iterations: usize,
        converged: bool,
    ) -> Result<Self> {
        let e: EnergyBreakdown = evaluate(cfg, params)?;
        Ok(SweepRecord {
            gamma: params.gamma,
            p: params.p,
            alpha: params.alpha,
            d: params.d,
            energy: e.total,
            perimeter: e.perimeter,
            riesz: e.riesz,
            volume: e.volume,
            n_components: cfg.len(),
            asphericity: asphericity(cfg)?,
            iterations,
            converged,
        })
    }
}

pub const SWEEP_CSV_HEADER: &str =
    "gamma,p,alpha,d,energy,perimeter,riesz,volume,n_components,asphericity,iterations,converged";

/// One row per record; floats with 17 significant digits.
pub fn write_sweep_csv<W: std::io::Write>(records: &[SweepRecord], mut out: W) -> Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{},{}",
            r.gamma,
            r.p,
            r.alpha,
            r.d,
            r.energy,
            r.perimeter,
            r.riesz,
            r.volume,
            r.n_components,
            r.asphericity,
            r.iterations,
            r.converged
        )?;
    }
    Ok(())
}

/// `H¹` norm of `u = |x|/R − 1` over all boundary nodes, where `R` is the
/// mean distance of the boundary from the origin (so `u` has zero mean).
/// Zero exactly for an origin-centered ball.
pub fn asphericity(cfg: &Configuration) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    let mut dist = Vec::with_capacity(cfg.len());
    for s in cfg.components() {
        let dj: Vec<f64> = (0..s.grid().len())
            .map(|j| crate::geometry::vec3::norm(s.boundary_point(j)))
            .collect();
        num += s.grid().integrate(&dj);
        den += s.grid().area();
        dist.push(dj);
    }
    if den == 0.0 {
        return Ok(0.0);
    }
    let r_fit = num / den;
    let mut total = 0.0;
    for (s, dj) in cfg.components().iter().zip(dist) {
        let u: Vec<f64> = dj.iter().map(|x| x / r_fit - 1.0).collect();
        total += h1_norm_sq(&u, s.grid())?;
    }
    Ok(total.sqrt())
}

/// The preferred of two minimization results.
pub fn better(a: Minimization, b: Minimization) -> Minimization {
    let (ea, eb) = (a.record.energy, b.record.energy);
    if (ea - eb).abs() < TIE_TOLERANCE {
        if b.record.asphericity < a.record.asphericity {
            b
        } else {
            a
        }
    } else if eb < ea {
        b
    } else {
        a
    }
}

/// Minimizes at every `γ` and records the best candidate found.
///
/// 1. Fresh runs from the configured initial shape (independent, parallel).
/// 2. Forward warm starts from the previous `γ`'s result; the better is kept.
/// 3. Backward warm starts from the next `γ`'s result; the better is kept.
/// 4. Lower envelope: every recorded configuration has unit volume for all
///    `γ`, so each `γ` takes the candidate minimizing `P + γV` over the pool.
///    A substituted candidate keeps its source's iteration count and has its
///    convergence flag recomputed from the gradient at the new `γ`.
///
/// A failed minimization at one `γ` does not abort the sweep.
pub fn sweep_gamma(
    gammas: &[f64],
    params: &EnergyParams,
    n: usize,
    opts: &OptimizerOptions,
) -> Result<Vec<Minimization>> {
    if gammas.is_empty() {
        return Err(Error::InvalidParameter {
            name: "gammas",
            value: 0.0,
            constraint: "list must be nonempty",
        });
    }
    for w in gammas.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter {
                name: "gammas",
                value: w[1],
                constraint: "must be strictly increasing",
            });
        }
    }
    if !(gammas[0] > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gammas",
            value: gammas[0],
            constraint: "must be positive",
        });
    }
    let init = initial_configuration(&opts.init, params.d, n, opts.target_volume, opts.seed)?;
    let fresh: Vec<Result<Minimization>> = gammas
        .par_iter()
        .map(|&g| minimize(&init, &params.with_gamma(g), opts))
        .collect();
    let mut out: Vec<Option<Minimization>> = Vec::with_capacity(gammas.len());
    for (i, fresh) in fresh.into_iter().enumerate() {
        let p = params.with_gamma(gammas[i]);
        let warm = out
            .iter()
            .rev()
            .flatten()
            .next()
            .and_then(|prev| minimize(&prev.config, &p, opts).ok());
        out.push(keep_better(fresh.ok(), warm));
    }
    for i in (0..gammas.len().saturating_sub(1)).rev() {
        let p = params.with_gamma(gammas[i]);
        let warm = out[i + 1]
            .as_ref()
            .and_then(|next| minimize(&next.config, &p, opts).ok());
        out[i] = keep_better(out[i].take(), warm);
    }
    let pool: Vec<Minimization> = out.iter().flatten().cloned().collect();
    if pool.is_empty() {
        return Err(Error::Degenerate("every minimization in the sweep failed".into()));
    }
    let mut result = Vec::with_capacity(gammas.len());
    for (i, own) in out.into_iter().enumerate() {
        let g = gammas[i];
        let best = pool
            .iter()
            .min_by(|a, b| {
                let ea = a.record.perimeter + g * a.record.riesz;
                let eb = b.record.perimeter + g * b.record.riesz;
                ea.total_cmp(&eb)
            })
            .expect("pool is nonempty");
        let best_e = best.record.perimeter + g * best.record.riesz;
        let m = match own {
            Some(own) if own.record.energy <= best_e + TIE_TOLERANCE => own,
            _ => reassign(best, &params.with_gamma(g), opts)?,
        };
        result.push(m);
    }
    Ok(result)
}

fn keep_better(a: Option<Minimization>, b: Option<Minimization>) -> Option<Minimization> {
    match (a, b) {
        (Some(a), Some(b)) => Some(better(a, b)),
        (a, b) => a.or(b),
    }
}

/// Re-labels a candidate found at another `γ`.
fn reassign(m: &Minimization, params: &EnergyParams, opts: &OptimizerOptions) -> Result<Minimization> {
    let grad = super::gradient::shape_gradient(&m.config, params)?;
    let gnorm = super::minimize::stationarity(&m.config, &grad);
    let converged = gnorm <= opts.g_tol;
    let record = SweepRecord::from_result(&m.config, params, m.record.iterations, converged)?;
    Ok(Minimization {
        config: m.config.clone(),
        status: if converged { Status::Converged } else { m.status },
        objective_history: vec![record.energy],
        gradient_norm: gnorm,
        record,
    })
}
