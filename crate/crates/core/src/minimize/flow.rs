//! Preconditioned projected nonlinear conjugate gradients with a retraction
//! onto a single equality constraint, and Armijo backtracking.

use crate::grid::{Axis, ComplexField, Grid, Spectrum};

use super::SolverOptions;

/// The problem-specific pieces the flow needs.
pub(crate) trait Landscape {
    fn objective(&self, psi: &ComplexField) -> f64;
    fn gradient(&self, psi: &ComplexField) -> ComplexField;
    /// Gradient of the constraint functional, `None` when unconstrained.
    fn constraint_gradient(&self, psi: &ComplexField) -> Option<ComplexField>;
    /// Maps a point back onto the constraint set; `None` rejects the trial.
    fn retract(&self, psi: ComplexField) -> Option<ComplexField>;
    /// Hard admissibility (barriers); rejected trials are backtracked.
    fn admissible(&self, _psi: &ComplexField) -> bool {
        true
    }
    /// Normalization of the convergence metric.
    fn gradient_scale(&self, _psi: &ComplexField, grad: &ComplexField) -> f64 {
        grad.norm_l2()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stop {
    Converged,
    IterationCap,
    /// Line search underflow; `barrier` tells whether admissibility caused it.
    Stalled { barrier: bool },
}

pub(crate) struct FlowOutcome {
    pub psi: ComplexField,
    pub objective: f64,
    pub iterations: usize,
    /// `||g - mu h|| / scale` with the least-squares multiplier `mu`.
    pub residual: f64,
    pub multiplier: f64,
    pub stop: Stop,
}

/// `(shift - Delta)^{-1}` on the derivative symbols.
pub(crate) fn precondition(u: &ComplexField, shift: f64) -> ComplexField {
    u.spectrum().apply_real(|a, b| 1.0 / (shift + a * a + b * b)).inverse()
}

/// Constraint `C(psi) = w sum c(xi) |psi_hat|^2 = target` for a real symbol `c`,
/// retracted along the preconditioned constraint gradient by solving the
/// exact quadratic in the step length.
pub(crate) struct QuadraticConstraint {
    symbol: Vec<f64>,
    direction: Vec<f64>,
    weight: f64,
    pub target: f64,
}

impl QuadraticConstraint {
    pub fn new(grid: &Grid, target: f64, shift: f64, c: impl Fn(f64, f64) -> f64) -> Self {
        let k1 = grid.derivative_wavenumbers(Axis::X1);
        let k2 = grid.derivative_wavenumbers(Axis::X2);
        let mut symbol = Vec::with_capacity(grid.len());
        let mut direction = Vec::with_capacity(grid.len());
        for &b in &k2 {
            for &a in &k1 {
                let c = c(a, b);
                symbol.push(c);
                direction.push(2.0 * c / (shift + a * a + b * b));
            }
        }
        QuadraticConstraint {
            symbol,
            direction,
            weight: grid.cell_area() / grid.len() as f64,
            target,
        }
    }

    /// Momentum `Q`, symbol `-xi1`.
    pub fn momentum(grid: &Grid, q: f64, shift: f64) -> Self {
        Self::new(grid, q, shift, |a, _| -a)
    }

    /// Kinetic energy, symbol `|xi|^2`.
    pub fn kinetic(grid: &Grid, k: f64, shift: f64) -> Self {
        Self::new(grid, k, shift, |a, b| a * a + b * b)
    }

    pub fn gradient(&self, psi: &ComplexField) -> ComplexField {
        let spec = psi.spectrum();
        let coefficients = spec
            .coefficients()
            .iter()
            .zip(&self.symbol)
            .map(|(z, c)| z * (2.0 * c))
            .collect();
        Spectrum {
            grid: psi.grid().clone(),
            coefficients,
        }
        .inverse()
    }

    pub fn retract(&self, psi: &ComplexField) -> Option<ComplexField> {
        let spec = psi.spectrum();
        let (mut a0, mut a1, mut a2) = (0.0, 0.0, 0.0);
        for ((z, c), s) in spec.coefficients().iter().zip(&self.symbol).zip(&self.direction) {
            let m = c * z.norm_sqr();
            a0 += m;
            a1 += m * s;
            a2 += m * s * s;
        }
        let (a0, a1, a2) = (a0 * self.weight - self.target, a1 * self.weight, a2 * self.weight);
        // a2 t^2 + 2 a1 t + a0 = 0, root of smallest magnitude
        let t = if a0 == 0.0 {
            0.0
        } else if a2.abs() <= 1e-300 {
            if a1 == 0.0 {
                return None;
            }
            -a0 / (2.0 * a1)
        } else {
            let disc = a1 * a1 - a2 * a0;
            if disc < 0.0 {
                return None;
            }
            let r = disc.sqrt();
            // stable form of the smaller root
            let q = -(a1 + a1.signum() * r);
            if q == 0.0 {
                return None;
            }
            let t1 = a0 / q;
            let t2 = q / a2;
            if t1.abs() <= t2.abs() {
                t1
            } else {
                t2
            }
        };
        if !t.is_finite() {
            return None;
        }
        let coefficients = spec
            .coefficients()
            .iter()
            .zip(&self.direction)
            .map(|(z, s)| z * (1.0 + t * s))
            .collect();
        Some(
            Spectrum {
                grid: psi.grid().clone(),
                coefficients,
            }
            .inverse(),
        )
    }
}

fn combine(a: &ComplexField, s: f64, b: &ComplexField) -> ComplexField {
    a.zip_map(b, |x, y| x - y * s)
}

pub(crate) fn run<L: Landscape>(land: &L, seed: ComplexField, opts: &SolverOptions) -> Option<FlowOutcome> {
    let mut psi = land.retract(seed)?;
    let mut f = land.objective(&psi);
    let mut step = opts.initial_step;
    let mut prev: Option<(ComplexField, ComplexField, f64)> = None; // (d, pg, <g,pg>)
    let mut iterations = 0;
    loop {
        let ge = land.gradient(&psi);
        let gc = land.constraint_gradient(&psi);
        let pe = precondition(&ge, opts.shift);
        let (g, pg, pc, mu) = match &gc {
            Some(gc) => {
                let pc = precondition(gc, opts.shift);
                let gc_pc = gc.inner(&pc);
                let mu_p = if gc_pc > 0.0 { ge.inner(&pc) / gc_pc } else { 0.0 };
                let gg = gc.inner(gc);
                let mu = if gg > 0.0 { ge.inner(gc) / gg } else { 0.0 };
                (combine(&ge, mu_p, gc), combine(&pe, mu_p, &pc), Some((pc, gc_pc)), mu)
            }
            None => (ge.clone(), pe, None, 0.0),
        };
        let residual_field = match &gc {
            Some(gc) => combine(&ge, mu, gc),
            None => ge.clone(),
        };
        let scale = land.gradient_scale(&psi, &ge);
        let residual = if scale > 0.0 {
            residual_field.norm_l2() / scale
        } else {
            residual_field.norm_l2()
        };
        if residual < opts.tol {
            return Some(FlowOutcome {
                psi,
                objective: f,
                iterations,
                residual,
                multiplier: mu,
                stop: Stop::Converged,
            });
        }
        if iterations >= opts.max_iter {
            return Some(FlowOutcome {
                psi,
                objective: f,
                iterations,
                residual,
                multiplier: mu,
                stop: Stop::IterationCap,
            });
        }
        let gn = g.inner(&pg);
        let steepest = pg.map(|z| -z);
        let mut d = steepest.clone();
        if let Some((dprev, pgprev, gnprev)) = &prev {
            let beta = ((gn - g.inner(pgprev)) / gnprev).max(0.0);
            if beta > 0.0 {
                d = d.axpy(beta, dprev);
                if let (Some(gc), Some((pc, gc_pc))) = (&gc, &pc) {
                    let s = gc.inner(&d) / gc_pc;
                    d = combine(&d, s, pc);
                }
                if g.inner(&d) >= 0.0 {
                    d = steepest.clone();
                }
            }
        }
        let mut accepted = None;
        let mut barrier_hit = false;
        // decreases below this are round-off in the objective
        let noise = 64.0 * f64::EPSILON * f.abs().max(f64::MIN_POSITIVE);
        for direction in [Some(d), None] {
            let (dir, mut st) = match direction {
                Some(d) => (d, step * opts.growth),
                None => (steepest.clone(), opts.initial_step),
            };
            let slope = g.inner(&dir);
            if !(slope < 0.0) {
                continue;
            }
            barrier_hit = false;
            while st >= opts.min_step && -st * slope > noise {
                if let Some(trial) = land.retract(psi.axpy(st, &dir)) {
                    if !trial.is_finite() {
                        st *= opts.backtrack;
                        continue;
                    }
                    if !land.admissible(&trial) {
                        barrier_hit = true;
                        st *= opts.backtrack;
                        continue;
                    }
                    let ft = land.objective(&trial);
                    if ft <= f + opts.armijo * st * slope {
                        accepted = Some((trial, ft, st, dir));
                        break;
                    }
                }
                st *= opts.backtrack;
            }
            if accepted.is_some() {
                break;
            }
        }
        match accepted {
            Some((trial, ft, st, dir)) => {
                psi = trial;
                f = ft;
                step = st;
                prev = Some((dir, pg, gn));
                iterations += 1;
            }
            None => {
                return Some(FlowOutcome {
                    psi,
                    objective: f,
                    iterations,
                    residual,
                    multiplier: mu,
                    stop: Stop::Stalled {
                        barrier: barrier_hit,
                    },
                });
            }
        }
    }
}
