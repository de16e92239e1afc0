use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ComplexField;
use crate::physics::{self, Nonlinearity};

use super::solvers::{kinetic_flow, minimize_fixed_momentum, minimize_sharp};
use super::{MinimizationProblem, ProblemKind, WaveSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveFamily {
    /// `q -> E_min(q)`.
    Momentum,
    /// `q -> E_min^sharp(q)`.
    Sharp,
    /// `k -> I_min(k)`.
    Kinetic,
}

#[derive(Clone, Debug)]
pub struct CurveResult {
    pub family: CurveFamily,
    pub abscissae: Vec<f64>,
    /// `E_min` or `I_min` at each abscissa (best iterate when not converged).
    pub values: Vec<f64>,
    pub speeds: Vec<f64>,
    pub converged: Vec<bool>,
    /// Smallest abscissa where the value separates from the linear bound
    /// (`v_s q` or `-k/v_s^2`) by more than ten times the tolerance.
    pub threshold: Option<f64>,
    /// Bubble threshold, when known, for kinetic curves.
    pub k_infinity: Option<f64>,
    pub solutions: Vec<Option<WaveSolution>>,
}

impl CurveResult {
    pub fn converged_points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.abscissae.len())
            .filter(|&i| self.converged[i])
            .map(|i| (self.abscissae[i], self.values[i], self.speeds[i]))
    }
}

/// Solution of one curve point, kept even when the solve hit its cap.
struct Point {
    value: f64,
    speed: f64,
    converged: bool,
    solution: Option<WaveSolution>,
    /// Iterate to warm-start the next point from.
    raw: Option<ComplexField>,
}

fn solve_point(
    family: CurveFamily,
    template: &MinimizationProblem,
    nl: &Nonlinearity,
    x: f64,
    seed: Option<ComplexField>,
) -> Result<Point> {
    let mut pb = template.clone();
    pb.seed = seed;
    let outcome = match family {
        CurveFamily::Momentum | CurveFamily::Sharp => {
            pb.kind = if family == CurveFamily::Momentum {
                ProblemKind::FixedMomentum { q: x }
            } else {
                ProblemKind::SharpLocal { q: x }
            };
            let r = if family == CurveFamily::Momentum {
                minimize_fixed_momentum(&pb, nl)
            } else {
                minimize_sharp(&pb, nl)
            };
            r.map(|w| (w.diagnostics.energy, w.psi.clone(), w))
        }
        CurveFamily::Kinetic => {
            pb.kind = ProblemKind::FixedKinetic {
                k: x,
                k_infinity: None,
            };
            let (raw, out) = kinetic_flow(&pb, nl, x)?;
            let converged = out.stop == super::flow::Stop::Converged;
            let theta = out.multiplier;
            let value = out.objective;
            if converged && theta < 0.0 {
                let c = 1.0 / (-theta).sqrt();
                let wave = WaveSolution::assemble(
                    raw.dilate(c, c)?,
                    nl,
                    super::ProblemLabel::Kinetic,
                    c,
                    x,
                    theta,
                    out.residual,
                    out.iterations,
                    true,
                );
                return Ok(Point {
                    value,
                    speed: c,
                    converged: true,
                    solution: Some(wave),
                    raw: Some(raw),
                });
            }
            return Ok(Point {
                value,
                speed: if theta < 0.0 { 1.0 / (-theta).sqrt() } else { f64::NAN },
                converged: false,
                solution: None,
                raw: Some(raw),
            });
        }
    };
    match outcome {
        Ok((value, raw, w)) => Ok(Point {
            value,
            speed: w.speed,
            converged: true,
            solution: Some(w),
            raw: Some(raw),
        }),
        Err(Error::NotConverged { best, .. }) => Ok(Point {
            value: best.diagnostics.energy,
            speed: best.speed,
            converged: false,
            raw: Some(best.psi.clone()),
            solution: Some(*best),
        }),
        Err(Error::PotentialBarrierStuck { barrier, .. }) => Ok(Point {
            value: physics::energy(&barrier, nl),
            speed: physics::extract_speed(&barrier, nl).unwrap_or(f64::NAN),
            converged: false,
            solution: None,
            raw: Some(*barrier),
        }),
        Err(e) => Err(e),
    }
}

/// Warm start for abscissa `next` from the iterate `psi` solved at `prev`.
fn rescale(family: CurveFamily, psi: &ComplexField, prev: f64, next: f64) -> Result<ComplexField> {
    let grid = psi.grid().clone();
    let moved = match family {
        CurveFamily::Momentum | CurveFamily::Sharp => {
            // Q(psi_{s,s}) = s Q(psi) in two dimensions
            let s = next / prev;
            psi.dilate(s, s)?
        }
        CurveFamily::Kinetic => {
            // dilate(psi, 1/t, t) has kinetic tau K1 + K2 / tau with tau = t^2
            let d1 = psi.derivative(crate::grid::Axis::X1);
            let k1 = d1.inner(&d1);
            let k2 = physics::kinetic(psi) - k1;
            let tau = kinetic_dilation_root(k1, k2, next);
            let t = tau.sqrt();
            psi.dilate(1.0 / t, t)?
        }
    };
    Ok(moved.resample(&grid))
}

/// Root nearest 1 of `tau K1 + K2 / tau = k`, or `1` when none is real.
pub(crate) fn kinetic_dilation_root(k1: f64, k2: f64, k: f64) -> f64 {
    // K1 tau^2 - k tau + K2 = 0
    let disc = k * k - 4.0 * k1 * k2;
    if k1 <= 0.0 || disc < 0.0 {
        return 1.0;
    }
    let r = disc.sqrt();
    let roots = [(k + r) / (2.0 * k1), (k - r) / (2.0 * k1)];
    roots
        .into_iter()
        .filter(|t| *t > 0.0)
        .min_by(|a, b| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()))
        .unwrap_or(1.0)
}

fn worker_count(points: usize) -> usize {
    let cap = std::env::var("NLSTW_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    cap.min(points).max(1)
}

/// Solves each abscissa in turn. With `warm_start` each point starts from the
/// previous solution rescaled to the next constraint; otherwise points are
/// independent and run on up to `NLSTW_THREADS` workers.
pub fn trace_curve(
    family: CurveFamily,
    abscissae: &[f64],
    nl: &Nonlinearity,
    template: &MinimizationProblem,
    warm_start: bool,
) -> Result<CurveResult> {
    if abscissae.is_empty() {
        return Err(Error::InvalidParameter("abscissa list is empty".into()));
    }
    if abscissae.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidParameter("abscissae must be positive".into()));
    }
    if abscissae.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("abscissae must be strictly increasing".into()));
    }
    let points: Vec<Point> = if warm_start {
        let mut out: Vec<Point> = Vec::with_capacity(abscissae.len());
        for (i, &x) in abscissae.iter().enumerate() {
            let seed = match (i, out.last().and_then(|p| p.raw.as_ref())) {
                (0, _) | (_, None) => template.seed.clone(),
                (_, Some(raw)) => Some(rescale(family, raw, abscissae[i - 1], x)?),
            };
            out.push(solve_point(family, template, nl, x, seed)?);
        }
        out
    } else {
        let workers = worker_count(abscissae.len());
        let mut slots: Vec<Option<Result<Point>>> = (0..abscissae.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            let chunks: Vec<_> = slots.chunks_mut(abscissae.len().div_ceil(workers)).collect();
            let mut start = 0;
            for chunk in chunks {
                let begin = start;
                start += chunk.len();
                scope.spawn(move || {
                    for (j, slot) in chunk.iter_mut().enumerate() {
                        let x = abscissae[begin + j];
                        *slot = Some(solve_point(family, template, nl, x, template.seed.clone()));
                    }
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.expect("every slot is filled"))
            .collect::<Result<_>>()?
    };

    let vs = nl.sound_speed();
    let tol = 10.0 * template.options.tol;
    let threshold = abscissae
        .iter()
        .zip(&points)
        .find(|(&x, p)| {
            p.converged
                && match family {
                    CurveFamily::Kinetic => -x / (vs * vs) - p.value > tol * p.value.abs().max(1.0),
                    _ => vs * x - p.value > tol * p.value.abs().max(1.0),
                }
        })
        .map(|(&x, _)| x);
    let k_infinity = match (family, &template.kind) {
        (CurveFamily::Kinetic, ProblemKind::FixedKinetic { k_infinity, .. }) => *k_infinity,
        _ => None,
    };
    Ok(CurveResult {
        family,
        abscissae: abscissae.to_vec(),
        values: points.iter().map(|p| p.value).collect(),
        speeds: points.iter().map(|p| p.speed).collect(),
        converged: points.iter().map(|p| p.converged).collect(),
        threshold,
        k_infinity,
        solutions: points.into_iter().map(|p| p.solution).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilation_root() {
        let t = kinetic_dilation_root(2.0, 3.0, 5.0);
        assert!((t * 2.0 + 3.0 / t - 5.0).abs() < 1e-12);
        assert!((t - 1.0).abs() < 1e-12);
        let t = kinetic_dilation_root(2.0, 3.0, 6.0);
        assert!((t * 2.0 + 3.0 / t - 6.0).abs() < 1e-12);
    }
}
