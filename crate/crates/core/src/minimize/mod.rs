//! Constrained minimizers for the traveling-wave problems.
//!
//! Every solver runs the same preconditioned projected conjugate-gradient
//! flow. Equality constraints are restored exactly after each trial step, so
//! the objective is non-increasing over accepted iterates and the constraint
//! holds to round-off at every accepted iterate.

mod curve;
mod flow;
mod solvers;

use serde::{Deserialize, Serialize};

use crate::grid::{ComplexField, Grid};
use crate::physics::{self, Functionals, Nonlinearity};

pub use curve::{trace_curve, CurveFamily, CurveResult};
pub use solvers::{
    default_bubble_seed, minimize_bubble, minimize_fixed_kinetic, minimize_fixed_momentum,
    minimize_sharp, regularize, regularization_functional, solve,
};

/// Step policy, tolerances and iteration cap shared by all problems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Relative `L^2` norm of the projected gradient at which a solve stops.
    pub tol: f64,
    /// Relative accuracy of the constraint restoration.
    pub constraint_tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
    pub backtrack: f64,
    pub growth: f64,
    pub armijo: f64,
    /// `tau` in the `(tau - Delta)^{-1}` preconditioner.
    pub shift: f64,
    pub min_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-6,
            constraint_tol: 1e-8,
            max_iter: 200_000,
            initial_step: 1.0,
            backtrack: 0.5,
            growth: 1.1,
            armijo: 1e-4,
            shift: 1.0,
            min_step: 1e-14,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            ("tol", self.tol),
            ("constraint_tol", self.constraint_tol),
            ("initial_step", self.initial_step),
            ("growth", self.growth),
            ("armijo", self.armijo),
            ("shift", self.shift),
            ("min_step", self.min_step),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(crate::Error::InvalidParameter(format!(
                "backtrack must lie in (0, 1), got {}",
                self.backtrack
            )));
        }
        if self.max_iter == 0 {
            return Err(crate::Error::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemKind {
    /// Minimize `E` at `Q = q`.
    FixedMomentum { q: f64 },
    /// Minimize `I = -Q + int V` at prescribed kinetic energy `k`.
    /// `k_infinity` is the bubble threshold when already known.
    FixedKinetic { k: f64, k_infinity: Option<f64> },
    /// Minimize `E` at `Q = q` inside `int V >= 0`.
    SharpLocal { q: f64 },
    /// Minimize the kinetic energy at `int V = 0`.
    StationaryBubble,
    /// Minimize `E_GL(zeta) + ||zeta - target||^2 / h^2`.
    Regularize { h: f64, target: ComplexField },
}

impl ProblemKind {
    pub fn label(&self) -> ProblemLabel {
        match self {
            ProblemKind::FixedMomentum { .. } => ProblemLabel::Momentum,
            ProblemKind::FixedKinetic { .. } => ProblemLabel::Kinetic,
            ProblemKind::SharpLocal { .. } => ProblemLabel::Sharp,
            ProblemKind::StationaryBubble => ProblemLabel::Bubble,
            ProblemKind::Regularize { .. } => ProblemLabel::Regularize,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum ProblemLabel {
    Momentum,
    Kinetic,
    Sharp,
    Bubble,
    Regularize,
}

/// A problem instance: what to minimize, on which grid, with which options.
#[derive(Clone, Debug)]
pub struct MinimizationProblem {
    pub kind: ProblemKind,
    pub grid: Grid,
    pub options: SolverOptions,
    /// Starting field; a problem-specific default is used when absent.
    pub seed: Option<ComplexField>,
}

impl MinimizationProblem {
    pub fn new(kind: ProblemKind, grid: Grid) -> Self {
        MinimizationProblem {
            kind,
            grid,
            options: SolverOptions::default(),
            seed: None,
        }
    }

    pub fn with_options(mut self, options: SolverOptions) -> Self {
        self.options = options;
        self
    }

    pub fn with_seed(mut self, seed: ComplexField) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Scalar record attached to every solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveDiagnostics {
    pub energy: f64,
    pub momentum: f64,
    pub kinetic: f64,
    pub kinetic_x1: f64,
    pub potential: f64,
    pub gl_energy: f64,
    /// `|P_c| / |E|` in dimension two.
    pub pohozaev_residual: f64,
    /// `||tw_residual|| / ||Delta psi + F psi||` at the stored speed.
    pub tw_residual: f64,
    /// Convergence metric of the flow at exit.
    pub flow_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct WaveSolution {
    pub psi: ComplexField,
    pub problem: ProblemLabel,
    /// Speed `c`; zero for bubbles and regularized fields.
    pub speed: f64,
    /// Prescribed constraint value (`q` or `k`; `0` for bubbles).
    pub constraint: f64,
    /// Lagrange multiplier of the flow: `c` for momentum problems, `theta`
    /// for the kinetic problem, `mu` with `sigma^2 = -mu` for bubbles.
    pub multiplier: f64,
    pub diagnostics: WaveDiagnostics,
}

/// The JSON sidecar written next to a solved field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub problem: ProblemLabel,
    pub c: f64,
    pub q_or_k: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub kinetic: f64,
    pub potential: f64,
    #[serde(rename = "EGL")]
    pub egl: f64,
    pub pohozaev_residual: f64,
    pub tw_residual: f64,
    pub multiplier: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl WaveSolution {
    pub(crate) fn assemble(
        psi: ComplexField,
        nl: &Nonlinearity,
        problem: ProblemLabel,
        speed: f64,
        constraint: f64,
        multiplier: f64,
        flow_residual: f64,
        iterations: usize,
        converged: bool,
    ) -> WaveSolution {
        let f = Functionals::evaluate(&psi, nl);
        let energy = f.energy();
        let pohozaev_residual = match problem {
            ProblemLabel::Bubble => f.potential.abs() / f.kinetic().max(f64::MIN_POSITIVE),
            _ => {
                let pc = f.energy() - speed * f.momentum - 2.0 * f.kinetic_x2;
                pc.abs() / energy.abs().max(f64::MIN_POSITIVE)
            }
        };
        let tw_residual = match problem {
            ProblemLabel::Bubble => bubble_residual(&psi, nl, -multiplier),
            _ => physics::relative_tw_residual(&psi, nl, speed),
        };
        WaveSolution {
            problem,
            speed,
            constraint,
            multiplier,
            diagnostics: WaveDiagnostics {
                energy,
                momentum: f.momentum,
                kinetic: f.kinetic(),
                kinetic_x1: f.kinetic_x1,
                potential: f.potential,
                gl_energy: physics::gl_energy(&psi),
                pohozaev_residual,
                tw_residual,
                flow_residual,
                iterations,
                converged,
            },
            psi,
        }
    }

    pub fn converged(&self) -> bool {
        self.diagnostics.converged
    }

    pub fn sidecar(&self) -> Sidecar {
        let d = &self.diagnostics;
        Sidecar {
            problem: self.problem,
            c: self.speed,
            q_or_k: self.constraint,
            e: d.energy,
            q: d.momentum,
            kinetic: d.kinetic,
            potential: d.potential,
            egl: d.gl_energy,
            pohozaev_residual: d.pohozaev_residual,
            tw_residual: d.tw_residual,
            multiplier: self.multiplier,
            iterations: d.iterations,
            converged: d.converged,
        }
    }
}

/// `||Delta psi + sigma^2 F psi|| / ||Delta psi||`.
fn bubble_residual(psi: &ComplexField, nl: &Nonlinearity, sigma2: f64) -> f64 {
    let lap = psi.laplacian();
    let r = lap.zip_map(psi, |l, z| l + z * (sigma2 * nl.f(z.norm_sqr())));
    let s = lap.norm_l2();
    if s > 0.0 {
        r.norm_l2() / s
    } else {
        r.norm_l2()
    }
}
