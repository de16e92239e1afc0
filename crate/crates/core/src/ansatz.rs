//! Explicit comparison fields: the slow-modulation family and the transonic
//! family built from a KP-I lump.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Axis, ComplexField, Grid, ScalarField};
use crate::physics::{self, Functionals, Nonlinearity};

/// `exp(1 - 1/(1 - |x|^2))` inside the unit disc, zero outside.
pub fn bump(x1: f64, x2: f64) -> f64 {
    let r2 = x1 * x1 + x2 * x2;
    if r2 < 1.0 {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

#[derive(Clone, Debug)]
pub struct ModulationParams {
    pub chi: ScalarField,
    pub eps: f64,
    pub lambda: f64,
    pub sigma: f64,
}

impl ModulationParams {
    pub fn new(chi: ScalarField, eps: f64, lambda: f64, sigma: f64) -> Result<Self> {
        for (name, v) in [("eps", eps), ("lambda", lambda), ("sigma", sigma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if lambda > sigma {
            return Err(Error::InvalidParameter(format!(
                "lambda ({lambda}) must not exceed sigma ({sigma})"
            )));
        }
        Ok(ModulationParams {
            chi,
            eps,
            lambda,
            sigma,
        })
    }

    /// Default bump sampled so that the resulting field lives on `target`.
    pub fn bump_on(target: &Grid, eps: f64, lambda: f64, sigma: f64) -> Result<Self> {
        if !(lambda > 0.0 && sigma > 0.0) {
            return Err(Error::InvalidParameter("lambda and sigma must be positive".into()));
        }
        let base = target.scaled(1.0 / lambda, 1.0 / sigma)?;
        if base.l1() <= 1.0 || base.l2() <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "grid half-lengths ({}, {}) cannot hold a bump dilated by ({lambda}, {sigma})",
                target.l1(),
                target.l2()
            )));
        }
        let chi = ScalarField::from_fn(&base, bump);
        ModulationParams::new(chi, eps, lambda, sigma)
    }
}

/// `rho e^{-i eps theta}` with `rho = 1 + eps/(sqrt2 lambda) chi_x1(x1/lambda, x2/sigma)`
/// and `theta = chi(x1/lambda, x2/sigma)`.
pub fn modulation_ansatz(p: &ModulationParams) -> Result<ComplexField> {
    let (rho, theta) = modulation_parts(p)?;
    let eps = p.eps;
    Ok(rho.zip_map_complex(&theta, |r, t| Complex64::from_polar(r, -eps * t)))
}

fn modulation_parts(p: &ModulationParams) -> Result<(ScalarField, ScalarField)> {
    let dchi = p.chi.derivative(Axis::X1);
    let a = p.eps / (SQRT_2 * p.lambda);
    let rho = dchi.map(|d| 1.0 + a * d).dilate(p.lambda, p.sigma)?;
    let min = rho.values().iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if min <= 0.0 {
        return Err(Error::RhoNonpositive(min));
    }
    let theta = p.chi.dilate(p.lambda, p.sigma)?;
    Ok((rho, theta))
}

/// One line of the small-amplitude asymptotics of the modulation family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsymptoticLine {
    pub name: String,
    pub computed: f64,
    pub predicted: f64,
}

impl AsymptoticLine {
    pub fn relative_error(&self) -> f64 {
        (self.computed - self.predicted).abs() / self.predicted.abs().max(1e-300)
    }
}

/// The `int |rho_x1|^2`, `int rho^2 |theta_x1|^2`, `int V` and `Q` lines, each
/// against its leading-order prediction in terms of `int |chi_x1|^2`.
pub fn modulation_asymptotics(p: &ModulationParams, nl: &Nonlinearity) -> Result<Vec<AsymptoticLine>> {
    let (rho, theta) = modulation_parts(p)?;
    let psi = modulation_ansatz(p)?;
    let chi_x = p.chi.derivative(Axis::X1);
    let chi_xx = chi_x.derivative(Axis::X1);
    let m1 = chi_x.map(|v| v * v).integrate();
    let m2 = chi_xx.map(|v| v * v).integrate();
    let (eps, lam, sig) = (p.eps, p.lambda, p.sigma);

    let rho_x = rho.derivative(Axis::X1);
    let theta_x = theta.derivative(Axis::X1);
    let lines = vec![
        AsymptoticLine {
            name: "rho_x1".into(),
            computed: rho_x.map(|v| v * v).integrate(),
            predicted: eps * eps * sig / (2.0 * lam.powi(3)) * m2,
        },
        AsymptoticLine {
            name: "rho2_theta_x1".into(),
            computed: rho.zip_map(&theta_x, |r, t| r * r * t * t).integrate(),
            predicted: sig / lam * m1,
        },
        AsymptoticLine {
            name: "potential".into(),
            computed: physics::potential_integral(&psi, nl),
            predicted: eps * eps * sig / lam * m1,
        },
        AsymptoticLine {
            name: "momentum".into(),
            computed: physics::momentum(&psi),
            predicted: SQRT_2 * eps * eps * sig / lam * m1,
        },
    ];
    Ok(lines)
}

/// Modulation field on `target` whose momentum equals `q`, found by bisection in `eps`.
pub fn modulation_with_momentum(target: &Grid, q: f64, lambda: f64, sigma: f64) -> Result<ComplexField> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    modulation_matching(target, lambda, sigma, q, physics::momentum)
}

/// Modulation field on `target` with `functional(psi) = value`, for a
/// functional increasing in `eps` from zero (momentum, kinetic energy).
pub fn modulation_matching(
    target: &Grid,
    lambda: f64,
    sigma: f64,
    value: f64,
    functional: impl Fn(&ComplexField) -> f64,
) -> Result<ComplexField> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::InvalidParameter(format!("target value must be positive, got {value}")));
    }
    let unit = ModulationParams::bump_on(target, 1.0, lambda, sigma)?;
    let eval = |eps: f64| -> Result<(f64, ComplexField)> {
        let mut p = unit.clone();
        p.eps = eps;
        let psi = modulation_ansatz(&p)?;
        Ok((functional(&psi), psi))
    };
    let (mut lo, mut hi) = (0.0, 1e-3);
    let mut grow = 0;
    while eval(hi)?.0 < value {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::InvalidParameter(format!("cannot reach value {value}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid)?.0 < value {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(eval(0.5 * (lo + hi))?.1)
}

#[derive(Clone, Debug)]
pub struct TransonicParams {
    pub w: ScalarField,
    pub gamma: f64,
    pub eps: f64,
}

/// `U = rho e^{-i theta}` with `rho = 1 + eps^2 w(eps x, eps^2 y)` and
/// `theta = eps v_s (d_x^{-1} w)(eps x, eps^2 y)`, on the grid of `w` with
/// half-lengths scaled by `(1/eps, 1/eps^2)`.
pub fn transonic_ansatz(p: &TransonicParams, nl: &Nonlinearity) -> Result<ComplexField> {
    if !(p.eps > 0.0 && p.eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {}", p.eps)));
    }
    if p.gamma == 0.0 || !p.gamma.is_finite() {
        return Err(Error::InvalidParameter("gamma must be nonzero".into()));
    }
    let e2 = p.eps * p.eps;
    let wmax = p.w.max_abs();
    let rho = p.w.map(|v| 1.0 + e2 * v);
    let min = rho.values().iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if min <= 0.0 {
        return Err(Error::RhoNonpositive(min));
    }
    if !(1.0 + e2 * wmax < 1.8 && 1.0 - e2 * wmax > 0.2) {
        return Err(Error::InvalidParameter(format!(
            "eps = {} too large for a lump of amplitude {wmax}",
            p.eps
        )));
    }
    let phase = p.w.antiderivative_x(1e-10)?;
    let scale = p.eps * nl.sound_speed();
    let theta = phase.map(|v| scale * v);
    let u = rho.zip_map_complex(&theta, |r, t| Complex64::from_polar(r, -t));
    u.dilate(1.0 / p.eps, 1.0 / e2)
}

/// One rung of the transonic energy–momentum ladder.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionRow {
    pub eps: f64,
    pub energy: f64,
    pub momentum: f64,
    pub gl_energy: f64,
    pub excess: f64,
    pub predicted_excess: f64,
    pub predicted_momentum: f64,
}

/// Predicted `eps^3` coefficient of `E - v_s Q`: `v_s^2 S (3/2 - (12 - 4 F''(1))/gamma)`.
pub fn predicted_cubic_coefficient(nl: &Nonlinearity, action: f64, gamma: f64) -> f64 {
    let vs2 = nl.sound_speed().powi(2);
    vs2 * action * (1.5 - (12.0 - 4.0 * nl.f_second_at_one()) / gamma)
}

/// Predicted `(eps, eps^3)` coefficients of `Q`: `(3 v_s^3 S, -(6/gamma) v_s S)`.
pub fn predicted_momentum_coefficients(nl: &Nonlinearity, action: f64, gamma: f64) -> (f64, f64) {
    let vs = nl.sound_speed();
    (3.0 * vs.powi(3) * action, -6.0 / gamma * vs * action)
}

pub fn transonic_expansion(
    w: &ScalarField,
    gamma: f64,
    action: f64,
    nl: &Nonlinearity,
    eps: &[f64],
) -> Result<Vec<ExpansionRow>> {
    let a3 = predicted_cubic_coefficient(nl, action, gamma);
    let (q1, q3) = predicted_momentum_coefficients(nl, action, gamma);
    let vs = nl.sound_speed();
    eps.iter()
        .map(|&e| {
            let u = transonic_ansatz(
                &TransonicParams {
                    w: w.clone(),
                    gamma,
                    eps: e,
                },
                nl,
            )?;
            let f = Functionals::evaluate(&u, nl);
            Ok(ExpansionRow {
                eps: e,
                energy: f.energy(),
                momentum: f.momentum,
                gl_energy: physics::gl_energy(&u),
                excess: f.energy() - vs * f.momentum,
                predicted_excess: a3 * e.powi(3),
                predicted_momentum: q1 * e + q3 * e.powi(3),
            })
        })
        .collect()
}

/// Fitted coefficients of a dyadic `eps` ladder.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionFit {
    /// Richardson limit of `(E - v_s Q)/eps^3` from the two finest rungs.
    pub cubic: f64,
    pub predicted_cubic: f64,
    /// `log2` ratio of the remainders `E - v_s Q - cubic eps^3` on the two coarsest rungs.
    pub remainder_order: f64,
    /// Least-squares fit `Q = q1 eps + q3 eps^3`.
    pub momentum_linear: f64,
    pub momentum_cubic: f64,
    pub predicted_momentum_linear: f64,
    pub predicted_momentum_cubic: f64,
}

/// Fits a ladder of at least three rungs sorted by decreasing `eps` with
/// exact halving between neighbours.
pub fn fit_expansion(
    rows: &[ExpansionRow],
    nl: &Nonlinearity,
    action: f64,
    gamma: f64,
) -> Result<ExpansionFit> {
    if rows.len() < 3 {
        return Err(Error::InvalidParameter("need at least three eps values".into()));
    }
    for pair in rows.windows(2) {
        if (pair[0].eps - 2.0 * pair[1].eps).abs() > 1e-14 * pair[0].eps {
            return Err(Error::InvalidParameter("eps ladder must halve exactly".into()));
        }
    }
    let n = rows.len();
    let f = |r: &ExpansionRow| r.excess / r.eps.powi(3);
    // f(eps) = a + b eps^2 + ...: eliminate b between eps and eps/2
    let cubic = (4.0 * f(&rows[n - 1]) - f(&rows[n - 2])) / 3.0;
    let rem = |r: &ExpansionRow| (r.excess - cubic * r.eps.powi(3)).abs();
    let remainder_order = (rem(&rows[0]) / rem(&rows[1])).log2();

    // least squares for Q/eps = q1 + q3 eps^2
    let (mut s00, mut s01, mut s11, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in rows {
        let x = r.eps * r.eps;
        let y = r.momentum / r.eps;
        s00 += 1.0;
        s01 += x;
        s11 += x * x;
        t0 += y;
        t1 += x * y;
    }
    let det = s00 * s11 - s01 * s01;
    let momentum_linear = (s11 * t0 - s01 * t1) / det;
    let momentum_cubic = (s00 * t1 - s01 * t0) / det;
    let (pq1, pq3) = predicted_momentum_coefficients(nl, action, gamma);
    Ok(ExpansionFit {
        cubic,
        predicted_cubic: predicted_cubic_coefficient(nl, action, gamma),
        remainder_order,
        momentum_linear,
        momentum_cubic,
        predicted_momentum_linear: pq1,
        predicted_momentum_cubic: pq3,
    })
}
