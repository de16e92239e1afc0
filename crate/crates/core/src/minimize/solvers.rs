use num_complex::Complex64;

use crate::ansatz;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid};
use crate::physics::{self, CutoffPhi, Nonlinearity};

use super::flow::{self, precondition, FlowOutcome, Landscape, QuadraticConstraint, Stop};
use super::{MinimizationProblem, ProblemKind, ProblemLabel, SolverOptions, WaveSolution};

/// Margin kept below the bubble threshold for kinetic solves.
const K_INFINITY_MARGIN: f64 = 0.05;

struct MomentumLandscape<'a> {
    nl: &'a Nonlinearity,
    constraint: QuadraticConstraint,
    barrier: bool,
}

impl Landscape for MomentumLandscape<'_> {
    fn objective(&self, psi: &ComplexField) -> f64 {
        physics::energy(psi, self.nl)
    }
    fn gradient(&self, psi: &ComplexField) -> ComplexField {
        physics::grad_e(psi, self.nl)
    }
    fn constraint_gradient(&self, psi: &ComplexField) -> Option<ComplexField> {
        Some(self.constraint.gradient(psi))
    }
    fn retract(&self, psi: ComplexField) -> Option<ComplexField> {
        self.constraint.retract(&psi)
    }
    fn admissible(&self, psi: &ComplexField) -> bool {
        !self.barrier || physics::potential_integral(psi, self.nl) >= 0.0
    }
}

struct KineticLandscape<'a> {
    nl: &'a Nonlinearity,
    constraint: QuadraticConstraint,
}

impl Landscape for KineticLandscape<'_> {
    fn objective(&self, psi: &ComplexField) -> f64 {
        physics::functional_i(psi, self.nl)
    }
    fn gradient(&self, psi: &ComplexField) -> ComplexField {
        physics::grad_i(psi, self.nl)
    }
    fn constraint_gradient(&self, psi: &ComplexField) -> Option<ComplexField> {
        Some(self.constraint.gradient(psi))
    }
    fn retract(&self, psi: ComplexField) -> Option<ComplexField> {
        self.constraint.retract(&psi)
    }
}

struct BubbleLandscape<'a> {
    nl: &'a Nonlinearity,
    shift: f64,
    tol: f64,
}

impl Landscape for BubbleLandscape<'_> {
    fn objective(&self, psi: &ComplexField) -> f64 {
        physics::kinetic(psi)
    }
    fn gradient(&self, psi: &ComplexField) -> ComplexField {
        physics::grad_kinetic(psi)
    }
    fn constraint_gradient(&self, psi: &ComplexField) -> Option<ComplexField> {
        Some(physics::grad_potential(psi, self.nl))
    }
    /// Newton iteration for `int V(|psi + s v|^2) = 0` along the
    /// preconditioned constraint gradient `v`.
    fn retract(&self, psi: ComplexField) -> Option<ComplexField> {
        let nl = self.nl;
        let v = precondition(&physics::grad_potential(&psi, nl), self.shift);
        let area = psi.grid().cell_area();
        let scale: f64 = psi.values().iter().map(|z| nl.v(z.norm_sqr()).abs()).sum::<f64>() * area;
        let scale = scale.max(f64::MIN_POSITIVE);
        let mut s = 0.0;
        for _ in 0..50 {
            let (mut val, mut der) = (0.0, 0.0);
            for (z, dv) in psi.values().iter().zip(v.values()) {
                let p = z + dv * s;
                let r2 = p.norm_sqr();
                val += nl.v(r2);
                der += -2.0 * nl.f(r2) * (p.re * dv.re + p.im * dv.im);
            }
            val *= area;
            der *= area;
            if val.abs() <= self.tol * scale {
                return Some(psi.axpy(s, &v));
            }
            if der == 0.0 || !der.is_finite() {
                return None;
            }
            s -= val / der;
            if !s.is_finite() {
                return None;
            }
        }
        None
    }
}

struct RegularizeLandscape<'a> {
    target: &'a ComplexField,
    inv_h2: f64,
}

impl Landscape for RegularizeLandscape<'_> {
    fn objective(&self, zeta: &ComplexField) -> f64 {
        regularization_value(zeta, self.target, self.inv_h2)
    }
    fn gradient(&self, zeta: &ComplexField) -> ComplexField {
        let g = physics::grad_gl(zeta);
        let two = 2.0 * self.inv_h2;
        g.zip_map(&zeta.sub(self.target), |a, d| a + d * two)
    }
    fn constraint_gradient(&self, _zeta: &ComplexField) -> Option<ComplexField> {
        None
    }
    fn retract(&self, zeta: ComplexField) -> Option<ComplexField> {
        Some(zeta)
    }
    fn gradient_scale(&self, zeta: &ComplexField, _grad: &ComplexField) -> f64 {
        let lap = zeta.laplacian().norm_l2();
        let h = zeta.map(CutoffPhi::h).norm_l2();
        let d = zeta.sub(self.target).norm_l2();
        2.0 * (lap + h + self.inv_h2 * d)
    }
}

fn regularization_value(zeta: &ComplexField, target: &ComplexField, inv_h2: f64) -> f64 {
    let d = zeta.sub(target);
    physics::gl_energy(zeta) + inv_h2 * d.inner(&d)
}

/// `G(zeta) = E_GL(zeta) + ||zeta - psi||^2 / h^2`.
pub fn regularization_functional(zeta: &ComplexField, psi: &ComplexField, h: f64) -> f64 {
    regularization_value(zeta, psi, 1.0 / (h * h))
}

fn check_seed_grid(seed: &ComplexField, grid: &Grid) -> Result<()> {
    if seed.grid() != grid {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn default_bump_sizes(grid: &Grid) -> (f64, f64) {
    let lambda = grid.l1() / 4.0;
    let sigma = (grid.l2() / 2.0).max(lambda);
    (lambda, sigma)
}

fn momentum_seed(pb: &MinimizationProblem, q: f64) -> Result<ComplexField> {
    match &pb.seed {
        Some(s) => {
            check_seed_grid(s, &pb.grid)?;
            let gq = physics::grad_q(s);
            if gq.norm_l2() > 1e-12 {
                Ok(s.clone())
            } else {
                // grad Q vanishes: no multiplier is defined, nudge off the degenerate set
                let (l, sg) = default_bump_sizes(&pb.grid);
                let bump = ansatz::modulation_with_momentum(&pb.grid, 1.0, l, sg)?;
                Ok(s.zip_map(&bump, |a, b| a + (b - Complex64::new(1.0, 0.0)) * 1e-6))
            }
        }
        None => {
            let (l, sg) = default_bump_sizes(&pb.grid);
            ansatz::modulation_with_momentum(&pb.grid, q, l, sg)
        }
    }
}

fn not_converged(out: FlowOutcome, wave: WaveSolution) -> Error {
    Error::NotConverged {
        iterations: out.iterations,
        residual: out.residual,
        best: Box::new(wave),
    }
}

fn unreachable_constraint(what: &str) -> Error {
    Error::InvalidParameter(format!("the seed field cannot be moved onto the {what} constraint"))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidParameter(format!("{name} must be positive")));
    }
    Ok(())
}

fn run_momentum(
    pb: &MinimizationProblem,
    nl: &Nonlinearity,
    q: f64,
    barrier: bool,
) -> Result<WaveSolution> {
    pb.options.validate()?;
    let seed = momentum_seed(pb, q)?;
    let land = MomentumLandscape {
        nl,
        constraint: QuadraticConstraint::momentum(&pb.grid, q, pb.options.shift),
        barrier,
    };
    let out = flow::run(&land, seed, &pb.options).ok_or_else(|| unreachable_constraint("momentum"))?;
    let label = if barrier { ProblemLabel::Sharp } else { ProblemLabel::Momentum };
    let converged = out.stop == Stop::Converged;
    let speed = physics::extract_speed(&out.psi, nl).unwrap_or(out.multiplier);
    if let Stop::Stalled { barrier: true } = out.stop {
        if barrier {
            return Err(Error::PotentialBarrierStuck {
                iterations: out.iterations,
                barrier: Box::new(out.psi),
            });
        }
    }
    let wave = WaveSolution::assemble(
        out.psi.clone(),
        nl,
        label,
        speed,
        q,
        out.multiplier,
        out.residual,
        out.iterations,
        converged,
    );
    if converged {
        Ok(wave)
    } else {
        Err(not_converged(out, wave))
    }
}

/// Minimizes `E` at fixed momentum `q`; requires `V >= 0`.
pub fn minimize_fixed_momentum(pb: &MinimizationProblem, nl: &Nonlinearity) -> Result<WaveSolution> {
    let q = match pb.kind {
        ProblemKind::FixedMomentum { q } => q,
        _ => return Err(Error::InvalidParameter("expected a fixed-momentum problem".into())),
    };
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    let vmin = nl.sampled_min_potential();
    if vmin < 0.0 {
        return Err(Error::PotentialNotNonnegative(vmin));
    }
    run_momentum(pb, nl, q, false)
}

/// Minimizes `E` at fixed momentum inside `int V >= 0`. Falls back to the
/// plain momentum problem when `V` is nonnegative.
pub fn minimize_sharp(pb: &MinimizationProblem, nl: &Nonlinearity) -> Result<WaveSolution> {
    let q = match pb.kind {
        ProblemKind::SharpLocal { q } => q,
        _ => return Err(Error::InvalidParameter("expected a sharp problem".into())),
    };
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    if !nl.has_negative_potential() {
        let plain = MinimizationProblem {
            kind: ProblemKind::FixedMomentum { q },
            ..pb.clone()
        };
        return minimize_fixed_momentum(&plain, nl);
    }
    if let Some(s) = &pb.seed {
        if physics::potential_integral(s, nl) < 0.0 {
            return Err(Error::InvalidParameter("seed violates int V >= 0".into()));
        }
    }
    run_momentum(pb, nl, q, true)
}

/// Minimizes `I` at fixed kinetic energy `k`. The returned field is the
/// rescaled `psi(x / c)` with `c = 1/sqrt(-theta)`, a traveling wave of speed `c`.
pub fn minimize_fixed_kinetic(pb: &MinimizationProblem, nl: &Nonlinearity) -> Result<WaveSolution> {
    let (k, k_inf) = match pb.kind {
        ProblemKind::FixedKinetic { k, k_infinity } => (k, k_infinity),
        _ => return Err(Error::InvalidParameter("expected a fixed-kinetic problem".into())),
    };
    positive("k", k)?;
    pb.options.validate()?;
    if nl.has_negative_potential() {
        let limit = match k_inf {
            Some(t) => t,
            None => {
                let bubble = MinimizationProblem {
                    kind: ProblemKind::StationaryBubble,
                    seed: None,
                    ..pb.clone()
                };
                minimize_bubble(&bubble, nl)?.1
            }
        };
        if k >= (1.0 - K_INFINITY_MARGIN) * limit {
            return Err(Error::KineticAboveKInfinity { k, limit });
        }
    }
    let (raw, out) = kinetic_flow(pb, nl, k)?;
    let theta = out.multiplier;
    let converged = out.stop == Stop::Converged;
    if theta >= 0.0 || !theta.is_finite() {
        let wave = WaveSolution::assemble(
            raw,
            nl,
            ProblemLabel::Kinetic,
            0.0,
            k,
            theta,
            out.residual,
            out.iterations,
            converged,
        );
        if !converged {
            return Err(not_converged(out, wave));
        }
        return Err(Error::MultiplierNonnegative {
            theta,
            best: Box::new(wave),
        });
    }
    let c = 1.0 / (-theta).sqrt();
    let wave = WaveSolution::assemble(
        raw.dilate(c, c)?,
        nl,
        ProblemLabel::Kinetic,
        c,
        k,
        theta,
        out.residual,
        out.iterations,
        converged,
    );
    if converged {
        Ok(wave)
    } else {
        Err(not_converged(out, wave))
    }
}

/// The kinetic flow itself; returns the unscaled minimizer.
pub(crate) fn kinetic_flow(
    pb: &MinimizationProblem,
    nl: &Nonlinearity,
    k: f64,
) -> Result<(ComplexField, FlowOutcome)> {
    let seed = match &pb.seed {
        Some(s) => {
            check_seed_grid(s, &pb.grid)?;
            s.clone()
        }
        None => {
            let (l, sg) = default_bump_sizes(&pb.grid);
            ansatz::modulation_matching(&pb.grid, l, sg, k, physics::kinetic)?
        }
    };
    let land = KineticLandscape {
        nl,
        constraint: QuadraticConstraint::kinetic(&pb.grid, k, pb.options.shift),
    };
    let out = flow::run(&land, seed, &pb.options).ok_or_else(|| unreachable_constraint("kinetic"))?;
    Ok((out.psi.clone(), out))
}

/// Real radial seed `tanh` profile, vanishing at the origin, of radius `l/4`.
pub fn default_bubble_seed(grid: &Grid) -> ComplexField {
    let r0 = 0.25 * grid.l1().min(grid.l2());
    let width = (r0 / 4.0).max(grid.h1().max(grid.h2()) * 2.0);
    ComplexField::from_fn(grid, |x, y| {
        let r = (x * x + y * y).sqrt();
        let v = 0.5 * (1.0 + ((r - r0) / width).tanh());
        Complex64::new(v, 0.0)
    })
}

/// Minimizes the kinetic energy at `int V = 0`; returns the bubble and its
/// kinetic energy `T`.
pub fn minimize_bubble(pb: &MinimizationProblem, nl: &Nonlinearity) -> Result<(WaveSolution, f64)> {
    if !nl.has_negative_potential() {
        return Err(Error::PotentialNonnegativeEverywhere);
    }
    pb.options.validate()?;
    let seed = match &pb.seed {
        Some(s) => {
            check_seed_grid(s, &pb.grid)?;
            s.clone()
        }
        None => default_bubble_seed(&pb.grid),
    };
    let land = BubbleLandscape {
        nl,
        shift: pb.options.shift,
        tol: 1e-13,
    };
    let out = flow::run(&land, seed, &pb.options).ok_or_else(|| unreachable_constraint("potential"))?;
    let converged = out.stop == Stop::Converged;
    let t = physics::kinetic(&out.psi);
    let wave = WaveSolution::assemble(
        out.psi.clone(),
        nl,
        ProblemLabel::Bubble,
        0.0,
        0.0,
        out.multiplier,
        out.residual,
        out.iterations,
        converged,
    );
    if converged {
        Ok((wave, t))
    } else {
        Err(not_converged(out, wave))
    }
}

/// Minimizer of `G(zeta) = E_GL(zeta) + ||zeta - psi||^2 / h^2` reached by
/// monotone descent from `zeta = psi`.
pub fn regularize(psi: &ComplexField, h: f64, options: &SolverOptions) -> Result<ComplexField> {
    positive("h", h)?;
    options.validate()?;
    let inv_h2 = 1.0 / (h * h);
    let land = RegularizeLandscape { target: psi, inv_h2 };
    let opts = SolverOptions {
        shift: options.shift + inv_h2,
        ..options.clone()
    };
    let out = flow::run(&land, psi.clone(), &opts).expect("unconstrained retraction");
    if out.stop == Stop::Converged {
        Ok(out.psi)
    } else {
        let nl = Nonlinearity::GrossPitaevskii;
        let wave = WaveSolution::assemble(
            out.psi.clone(),
            &nl,
            ProblemLabel::Regularize,
            0.0,
            h,
            0.0,
            out.residual,
            out.iterations,
            false,
        );
        Err(not_converged(out, wave))
    }
}

/// Dispatches on the problem kind.
pub fn solve(pb: &MinimizationProblem, nl: &Nonlinearity) -> Result<WaveSolution> {
    match &pb.kind {
        ProblemKind::FixedMomentum { .. } => minimize_fixed_momentum(pb, nl),
        ProblemKind::FixedKinetic { .. } => minimize_fixed_kinetic(pb, nl),
        ProblemKind::SharpLocal { .. } => minimize_sharp(pb, nl),
        ProblemKind::StationaryBubble => minimize_bubble(pb, nl).map(|(w, _)| w),
        ProblemKind::Regularize { h, target } => {
            let zeta = regularize(target, *h, &pb.options)?;
            Ok(WaveSolution::assemble(
                zeta,
                nl,
                ProblemLabel::Regularize,
                0.0,
                *h,
                0.0,
                0.0,
                0,
                true,
            ))
        }
    }
}
