//! Nonlinearities, the Ginzburg–Landau cutoff, and the scalar functionals of
//! the traveling-wave problem together with their `L^2` gradients.
//!
//! Inner products are the real ones, `<a, b> = Re(a conj(b))` integrated over
//! the cell. With that convention the gradient `g` of a functional `Phi`
//! satisfies `d/dt Phi(psi + t phi)|_0 = <g, phi>`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Axis, ComplexField, ScalarField};

const NORMALIZATION_TOL: f64 = 1e-12;

/// The nonlinearity `F(|psi|^2)` normalized so that `F(1) = 0` and `F'(1) = -1`.
///
/// All variants are polynomials in `s`. They are stored through their Taylor
/// coefficients at `s = 1`, which gives the potential `V(s) = int_s^1 F` in
/// closed form without cancellation near the vacuum `s = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `F(s) = 1 - s`.
    GrossPitaevskii,
    /// `F(s) = -alpha1 + alpha3 s - alpha5 s^2`.
    CubicQuintic {
        alpha1: f64,
        alpha3: f64,
        alpha5: f64,
    },
    /// `F(s) = sum_k coefficients[k] s^k`.
    PolynomialInS { coefficients: Vec<f64> },
}

impl Nonlinearity {
    /// Cubic–quintic member with `alpha3 = 2 alpha5 - 1`, `alpha1 = alpha5 - 1`.
    pub fn cubic_quintic(alpha5: f64) -> Result<Self> {
        let nl = Nonlinearity::CubicQuintic {
            alpha1: alpha5 - 1.0,
            alpha3: 2.0 * alpha5 - 1.0,
            alpha5,
        };
        nl.validate()?;
        Ok(nl)
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        let nl = Nonlinearity::PolynomialInS { coefficients };
        nl.validate()?;
        Ok(nl)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::GrossPitaevskii => Ok(()),
            Nonlinearity::CubicQuintic {
                alpha1,
                alpha3,
                alpha5,
            } => {
                if !(alpha5.is_finite() && *alpha5 > 1.0) {
                    return Err(Error::InvalidNonlinearity(format!(
                        "alpha5 must exceed 1, got {alpha5}"
                    )));
                }
                if (alpha3 - (2.0 * alpha5 - 1.0)).abs() > NORMALIZATION_TOL
                    || (alpha1 - (alpha5 - 1.0)).abs() > NORMALIZATION_TOL
                {
                    return Err(Error::InvalidNonlinearity(
                        "cubic-quintic coefficients must satisfy alpha3 = 2 alpha5 - 1, alpha1 = alpha5 - 1"
                            .into(),
                    ));
                }
                Ok(())
            }
            Nonlinearity::PolynomialInS { coefficients } => {
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidNonlinearity("non-finite coefficient".into()));
                }
                let f1: f64 = coefficients.iter().sum();
                let df1: f64 = coefficients
                    .iter()
                    .enumerate()
                    .map(|(k, c)| k as f64 * c)
                    .sum();
                if f1.abs() > NORMALIZATION_TOL {
                    return Err(Error::InvalidNonlinearity(format!("F(1) = {f1}, expected 0")));
                }
                if (df1 + 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::InvalidNonlinearity(format!(
                        "F'(1) = {df1}, expected -1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Taylor coefficients `b_k` of `F` at `s = 1`: `F(s) = sum_k b_k (s - 1)^k`.
    pub fn taylor_at_one(&self) -> Vec<f64> {
        match self {
            Nonlinearity::GrossPitaevskii => vec![0.0, -1.0],
            Nonlinearity::CubicQuintic { alpha1, alpha3, alpha5 } => {
                // F(1+u) = (-a1 + a3 - a5) + (a3 - 2 a5) u - a5 u^2
                vec![-alpha1 + alpha3 - alpha5, alpha3 - 2.0 * alpha5, -alpha5]
            }
            Nonlinearity::PolynomialInS { coefficients } => shift_to_one(coefficients),
        }
    }

    fn horner(coeffs: &[f64], u: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    pub fn f(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::GrossPitaevskii => 1.0 - s,
            Nonlinearity::CubicQuintic { alpha1, alpha3, alpha5 } => {
                -alpha1 + s * (alpha3 - alpha5 * s)
            }
            Nonlinearity::PolynomialInS { coefficients } => Self::horner(coefficients, s),
        }
    }

    pub fn f_prime(&self, s: f64) -> f64 {
        let b = self.taylor_at_one();
        let d: Vec<f64> = b.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
        Self::horner(&d, s - 1.0)
    }

    /// `F''(1)`.
    pub fn f_second_at_one(&self) -> f64 {
        2.0 * self.taylor_at_one().get(2).copied().unwrap_or(0.0)
    }

    /// `V(s) = int_s^1 F(tau) d tau`.
    pub fn v(&self, s: f64) -> f64 {
        let u = s - 1.0;
        match self {
            Nonlinearity::GrossPitaevskii => 0.5 * u * u,
            Nonlinearity::CubicQuintic { alpha5, .. } => u * u * (0.5 + alpha5 * u / 3.0),
            Nonlinearity::PolynomialInS { .. } => {
                let b = self.taylor_at_one();
                let integrated: Vec<f64> = std::iter::once(0.0)
                    .chain(b.iter().enumerate().map(|(k, c)| -c / (k as f64 + 1.0)))
                    .collect();
                Self::horner(&integrated, u)
            }
        }
    }

    /// Sound speed `sqrt(-2 F'(1))`.
    pub fn sound_speed(&self) -> f64 {
        (-2.0 * self.f_prime(1.0)).sqrt()
    }

    /// Minimum of `V` sampled at `10^4` points of `[0, 10]`.
    pub fn sampled_min_potential(&self) -> f64 {
        let n = 10_000;
        (0..n)
            .map(|i| self.v(10.0 * i as f64 / (n - 1) as f64))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `V` takes negative values on the sampled range.
    pub fn has_negative_potential(&self) -> bool {
        self.sampled_min_potential() < 0.0
    }
}

/// Coefficients of `p(1 + u)` in powers of `u`, given `p(s)` in powers of `s`.
fn shift_to_one(coefficients: &[f64]) -> Vec<f64> {
    let mut out = coefficients.to_vec();
    let n = out.len();
    // repeated synthetic division by (s - 1)
    for i in 0..n {
        for j in (i..n - 1).rev() {
            out[j] += out[j + 1];
        }
    }
    out
}

/// The odd saturating cutoff used by the Ginzburg–Landau energy.
///
/// `phi(s) = s` on `[0, 2]`, `phi(s) = 2 + (s-2)/2 + sin(pi (s-2)/2)/pi` on
/// `[2, 4]` and `phi(s) = 3` beyond.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CutoffPhi;

impl CutoffPhi {
    pub fn phi(s: f64) -> f64 {
        let a = s.abs();
        let v = if a <= 2.0 {
            a
        } else if a < 4.0 {
            2.0 + (a - 2.0) / 2.0 + (PI * (a - 2.0) / 2.0).sin() / PI
        } else {
            3.0
        };
        v.copysign(s)
    }

    pub fn phi_prime(s: f64) -> f64 {
        let a = s.abs();
        if a <= 2.0 {
            1.0
        } else if a < 4.0 {
            0.5 * (1.0 + (PI * (a - 2.0) / 2.0).cos())
        } else {
            0.0
        }
    }

    /// `H(z) = (phi^2(|z|) - 1) phi(|z|) phi'(|z|) z / |z|`, with `H(0) = 0`.
    pub fn h(z: Complex64) -> Complex64 {
        let r = z.norm();
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let p = Self::phi(r);
        z * ((p * p - 1.0) * p * Self::phi_prime(r) / r)
    }

    /// Pointwise Ginzburg–Landau potential density `(phi^2(r) - 1)^2 / 2`.
    pub fn gl_density(r: f64) -> f64 {
        let p = Self::phi(r);
        0.5 * (p * p - 1.0).powi(2)
    }
}

/// The quadratic functionals of `psi` obtainable from its spectrum, plus the
/// potential integral. Evaluated with one forward transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Functionals {
    /// `int |d psi / d x1|^2`
    pub kinetic_x1: f64,
    /// `int |d psi / d x2|^2`, the functional `A`
    pub kinetic_x2: f64,
    /// `int V(|psi|^2)`
    pub potential: f64,
    /// `Q(psi) = int <i d psi/d x1, psi>`
    pub momentum: f64,
}

impl Functionals {
    pub fn evaluate(psi: &ComplexField, nl: &Nonlinearity) -> Self {
        let (kinetic_x1, kinetic_x2, momentum) = quadratic_parts(psi);
        Functionals {
            kinetic_x1,
            kinetic_x2,
            potential: potential_integral(psi, nl),
            momentum,
        }
    }

    pub fn kinetic(&self) -> f64 {
        self.kinetic_x1 + self.kinetic_x2
    }

    pub fn energy(&self) -> f64 {
        self.kinetic() + self.potential
    }
}

/// `(int |psi_x1|^2, int |psi_x2|^2, Q)` via Parseval on the derivative symbols.
fn quadratic_parts(psi: &ComplexField) -> (f64, f64, f64) {
    let g = psi.grid();
    let spec = psi.spectrum();
    let k1 = g.derivative_wavenumbers(Axis::X1);
    let k2 = g.derivative_wavenumbers(Axis::X2);
    let n1 = g.n1();
    let (mut a, mut b, mut q) = (0.0, 0.0, 0.0);
    for (j, &y) in k2.iter().enumerate() {
        let mut ra = 0.0;
        let mut rq = 0.0;
        let mut rn = 0.0;
        for (i, &x) in k1.iter().enumerate() {
            let m = spec.coefficients()[i + n1 * j].norm_sqr();
            ra += x * x * m;
            rq += x * m;
            rn += m;
        }
        a += ra;
        q += rq;
        b += y * y * rn;
    }
    let w = g.cell_area() / g.len() as f64;
    // <i psi_x, psi> = Re(i (i xi1) |c|^2) = -xi1 |c|^2
    (a * w, b * w, -q * w)
}

pub fn kinetic(psi: &ComplexField) -> f64 {
    let (a, b, _) = quadratic_parts(psi);
    a + b
}

pub fn kinetic_x1(psi: &ComplexField) -> f64 {
    quadratic_parts(psi).0
}

/// `A(psi) = int |d psi / d x2|^2`.
pub fn a_functional(psi: &ComplexField) -> f64 {
    quadratic_parts(psi).1
}

pub fn momentum(psi: &ComplexField) -> f64 {
    quadratic_parts(psi).2
}

pub fn potential_integral(psi: &ComplexField, nl: &Nonlinearity) -> f64 {
    let s: f64 = psi.values().iter().map(|z| nl.v(z.norm_sqr())).sum();
    s * psi.grid().cell_area()
}

pub fn energy(psi: &ComplexField, nl: &Nonlinearity) -> f64 {
    kinetic(psi) + potential_integral(psi, nl)
}

fn gl_potential(psi: &ComplexField) -> f64 {
    let s: f64 = psi.values().iter().map(|z| CutoffPhi::gl_density(z.norm())).sum();
    s * psi.grid().cell_area()
}

/// Ginzburg–Landau energy `int |grad psi|^2 + (phi^2(|psi|) - 1)^2 / 2`.
pub fn gl_energy(psi: &ComplexField) -> f64 {
    kinetic(psi) + gl_potential(psi)
}

/// `D(psi) = int |psi_x1|^2 + (phi^2(|psi|) - 1)^2 / 2`.
pub fn d_functional(psi: &ComplexField) -> f64 {
    kinetic_x1(psi) + gl_potential(psi)
}

/// `E_c = E - c Q`.
pub fn action_ec(psi: &ComplexField, nl: &Nonlinearity, c: f64) -> f64 {
    let f = Functionals::evaluate(psi, nl);
    f.energy() - c * f.momentum
}

/// `I = -Q + int V`.
pub fn functional_i(psi: &ComplexField, nl: &Nonlinearity) -> f64 {
    let f = Functionals::evaluate(psi, nl);
    f.potential - f.momentum
}

/// `B_c = int |psi_x1|^2 - c Q + int V`.
pub fn b_c(psi: &ComplexField, nl: &Nonlinearity, c: f64) -> f64 {
    let f = Functionals::evaluate(psi, nl);
    f.kinetic_x1 - c * f.momentum + f.potential
}

/// `P_c = E_c - 2 A / (N - 1)`.
pub fn p_c(psi: &ComplexField, nl: &Nonlinearity, c: f64, dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {dim}")));
    }
    let f = Functionals::evaluate(psi, nl);
    Ok(f.energy() - c * f.momentum - 2.0 * f.kinetic_x2 / (dim as f64 - 1.0))
}

fn f_psi(psi: &ComplexField, nl: &Nonlinearity) -> ComplexField {
    psi.map(|z| z * nl.f(z.norm_sqr()))
}

/// `-2 (Delta psi + F(|psi|^2) psi)`.
pub fn grad_e(psi: &ComplexField, nl: &Nonlinearity) -> ComplexField {
    let lap = psi.laplacian();
    lap.zip_map(psi, |l, z| -2.0 * (l + z * nl.f(z.norm_sqr())))
}

/// `2 i psi_x1`.
pub fn grad_q(psi: &ComplexField) -> ComplexField {
    psi.derivative(Axis::X1).map(|d| Complex64::new(0.0, 2.0) * d)
}

/// Gradient of the kinetic energy, `-2 Delta psi`.
pub fn grad_kinetic(psi: &ComplexField) -> ComplexField {
    psi.laplacian().scale(-2.0)
}

/// Gradient of `int V(|psi|^2)`, `-2 F(|psi|^2) psi`.
pub fn grad_potential(psi: &ComplexField, nl: &Nonlinearity) -> ComplexField {
    f_psi(psi, nl).scale(-2.0)
}

/// Gradient of `I = -Q + int V`.
pub fn grad_i(psi: &ComplexField, nl: &Nonlinearity) -> ComplexField {
    let dx = psi.derivative(Axis::X1);
    dx.zip_map(psi, |d, z| {
        Complex64::new(0.0, -2.0) * d - 2.0 * z * nl.f(z.norm_sqr())
    })
}

/// Gradient of the Ginzburg–Landau energy, `-2 Delta psi + 2 H(psi)`.
pub fn grad_gl(psi: &ComplexField) -> ComplexField {
    psi.laplacian()
        .zip_map(psi, |l, z| -2.0 * l + 2.0 * CutoffPhi::h(z))
}

/// `i c psi_x1 + Delta psi + F(|psi|^2) psi`.
pub fn tw_residual(psi: &ComplexField, nl: &Nonlinearity, c: f64) -> ComplexField {
    let spec = psi.spectrum();
    let dx = spec.derivative(Axis::X1).inverse();
    let lap = spec.laplacian().inverse();
    let mut out = lap;
    for ((o, d), z) in out.values_mut().iter_mut().zip(dx.values()).zip(psi.values()) {
        *o += Complex64::new(0.0, c) * d + z * nl.f(z.norm_sqr());
    }
    out
}

/// `||tw_residual|| / ||Delta psi + F psi||`, the scale-free residual.
pub fn relative_tw_residual(psi: &ComplexField, nl: &Nonlinearity, c: f64) -> f64 {
    let r = tw_residual(psi, nl, c).norm_l2();
    let s = grad_e(psi, nl).norm_l2() / 2.0;
    if s == 0.0 {
        r
    } else {
        r / s
    }
}

/// Least-squares speed `c = -int <i psi_x1, Delta psi + F psi> / int |psi_x1|^2`.
pub fn extract_speed(psi: &ComplexField, nl: &Nonlinearity) -> Result<f64> {
    let spec = psi.spectrum();
    let dx = spec.derivative(Axis::X1).inverse();
    let k1 = dx.inner(&dx);
    if !(k1 > 1e-12) {
        return Err(Error::DegenerateDirection(k1));
    }
    let lap = spec.laplacian().inverse();
    let rest = lap.zip_map(psi, |l, z| l + z * nl.f(z.norm_sqr()));
    let idx = dx.map(|d| Complex64::new(0.0, 1.0) * d);
    Ok(-idx.inner(&rest) / k1)
}

/// Polar decomposition `psi = rho e^{i theta}` with a periodic phase.
#[derive(Clone, Debug, PartialEq)]
pub struct Lifting {
    pub rho: ScalarField,
    pub theta: ScalarField,
    pub min_modulus: f64,
}

pub const DEFAULT_DELTA_MIN: f64 = 0.1;

impl Lifting {
    pub fn to_field(&self) -> ComplexField {
        ComplexField::from_polar(&self.rho, &self.theta).expect("lifting components share a grid")
    }

    /// Momentum in lifted form, `-int (rho^2 - 1) theta_x1`.
    pub fn momentum(&self) -> f64 {
        let tx = self.theta.derivative(Axis::X1);
        -self.rho.zip_map(&tx, |r, t| (r * r - 1.0) * t).integrate()
    }
}

/// Periodic phase `theta` with `psi = |psi| e^{i theta}`, anchored so that
/// `theta` equals `arg psi` in `(-pi, pi]` at the node nearest the origin.
pub fn lift(psi: &ComplexField, delta_min: f64) -> Result<Lifting> {
    let g = psi.grid().clone();
    let (n1, n2) = (g.n1(), g.n2());
    let min = psi.min_modulus();
    if !(min >= delta_min) {
        return Err(Error::ModulusTooSmall {
            min,
            threshold: delta_min,
        });
    }
    let spec = psi.spectrum();
    let d1 = spec.derivative(Axis::X1).inverse();
    let d2 = spec.derivative(Axis::X2).inverse();
    // phase one-form Im(conj(psi) d psi) / |psi|^2
    let omega = |d: &ComplexField| {
        let v = psi
            .values()
            .iter()
            .zip(d.values())
            .map(|(z, dz)| (z.conj() * dz).im / z.norm_sqr())
            .collect();
        ScalarField::new(g.clone(), v)
    };
    let w1 = omega(&d1)?;
    let w2 = omega(&d2)?;

    let winding = |mean: f64, l: f64| mean * 2.0 * l / (2.0 * PI);
    for m in w1.row_means() {
        let wnd = winding(m, g.l1()).round() as i64;
        if wnd != 0 {
            return Err(Error::NonzeroWinding { axis: 1, winding: wnd });
        }
    }
    let c0 = n1 / 2;
    let r0 = n2 / 2;
    let column: Vec<f64> = (0..n2).map(|j| w2.get(c0, j)).collect();
    let col_mean = column.iter().sum::<f64>() / n2 as f64;
    let wnd2 = winding(col_mean, g.l2()).round() as i64;
    if wnd2 != 0 {
        return Err(Error::NonzeroWinding { axis: 2, winding: wnd2 });
    }

    // periodic antiderivatives of the zero-mean parts
    let row_phase = w1.spectrum().antiderivative_x().inverse_real().into_values();
    let col_phase = periodic_antiderivative_1d(&column, g.h2());
    let anchor = psi.get(c0, r0).arg();
    let mut theta = vec![0.0; g.len()];
    for j in 0..n2 {
        let col_val = anchor + col_phase[j] - col_phase[r0];
        for i in 0..n1 {
            let guess = col_val + row_phase[i + n1 * j] - row_phase[c0 + n1 * j];
            let a = psi.get(i, j).arg();
            let turns = ((guess - a) / (2.0 * PI)).round();
            theta[i + n1 * j] = a + 2.0 * PI * turns;
        }
    }
    Ok(Lifting {
        rho: psi.modulus(),
        theta: ScalarField::new(g, theta)?,
        min_modulus: min,
    })
}

fn periodic_antiderivative_1d(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mean = f.iter().sum::<f64>() / n as f64;
    let mut planner = rustfft::FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    fwd.process(&mut buf);
    let l = h * n as f64 / 2.0;
    for (m, c) in buf.iter_mut().enumerate() {
        let signed = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
        let k = signed * PI / l;
        if m == 0 || m == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= Complex64::new(0.0, -1.0 / k);
        }
    }
    inv.process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn cq() -> Nonlinearity {
        Nonlinearity::cubic_quintic(3.0).unwrap()
    }

    #[test]
    fn normalizations() {
        for nl in [
            Nonlinearity::GrossPitaevskii,
            cq(),
            Nonlinearity::polynomial(vec![1.0, -1.0]).unwrap(),
            Nonlinearity::polynomial(vec![-2.0, 5.0, -3.0]).unwrap(),
        ] {
            assert!(nl.f(1.0).abs() < 1e-12);
            assert!((nl.f_prime(1.0) + 1.0).abs() < 1e-12);
            assert!((nl.sound_speed() - 2f64.sqrt()).abs() < 1e-12);
            assert_eq!(nl.v(1.0), 0.0);
        }
    }

    #[test]
    fn cubic_quintic_values() {
        let nl = cq();
        assert!((nl.v(0.0) + 0.5).abs() < 1e-15);
        assert!((nl.f_second_at_one() + 6.0).abs() < 1e-14);
        assert!((nl.f(0.3) - (-2.0 + 5.0 * 0.3 - 3.0 * 0.09)).abs() < 1e-14);
        assert!(nl.has_negative_potential());
        assert!(!Nonlinearity::GrossPitaevskii.has_negative_potential());
        assert!(Nonlinearity::cubic_quintic(1.0).is_err());
        assert!(Nonlinearity::polynomial(vec![1.0, -2.0]).is_err());
    }

    #[test]
    fn polynomial_potential_matches_cubic_quintic() {
        let p = Nonlinearity::polynomial(vec![-2.0, 5.0, -3.0]).unwrap();
        let c = cq();
        for s in [0.0, 0.25, 0.9, 1.7, 4.0] {
            assert!((p.v(s) - c.v(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn potential_is_antiderivative() {
        let nl = cq();
        let h = 1e-5;
        for s in [0.1, 0.6, 1.3, 2.2] {
            let dv = (nl.v(s + h) - nl.v(s - h)) / (2.0 * h);
            assert!((dv + nl.f(s)).abs() < 1e-8);
        }
    }

    #[test]
    fn cutoff_properties() {
        assert_eq!(CutoffPhi::phi(1.5), 1.5);
        assert_eq!(CutoffPhi::phi(5.0), 3.0);
        assert_eq!(CutoffPhi::phi(-5.0), -3.0);
        assert!((CutoffPhi::phi(4.0) - 3.0).abs() < 1e-15);
        for i in 0..10_000 {
            let s = -6.0 + 12.0 * i as f64 / 9999.0;
            let d = CutoffPhi::phi_prime(s);
            assert!((0.0..=1.0).contains(&d));
            assert!((CutoffPhi::phi(-s) + CutoffPhi::phi(s)).abs() < 1e-15);
        }
        let z = Complex64::new(0.6, -0.8);
        assert!((CutoffPhi::h(z) - (z.norm_sqr() - 1.0) * z).norm() < 1e-15);
    }

    #[test]
    fn trivial_fields() {
        let g = Grid::square(10.0, 16).unwrap();
        let one = ComplexField::constant(&g, Complex64::new(1.0, 0.0));
        assert_eq!(energy(&one, &Nonlinearity::GrossPitaevskii), 0.0);
        assert_eq!(gl_energy(&one), 0.0);
        let c11 = ComplexField::constant(&g, Complex64::new(1.1, 0.0));
        assert!((energy(&c11, &Nonlinearity::GrossPitaevskii) - 8.82).abs() < 1e-10);
        let five = ComplexField::constant(&g, Complex64::new(5.0, 0.0));
        assert!((gl_energy(&five) - 32.0 * 400.0).abs() < 1e-9);
        let zero = ComplexField::zeros(&g);
        assert!((potential_integral(&zero, &cq()) + 200.0).abs() < 1e-10);
        assert!(matches!(
            extract_speed(&one, &Nonlinearity::GrossPitaevskii),
            Err(Error::DegenerateDirection(_))
        ));
    }

    #[test]
    fn lift_constant_phase() {
        let g = Grid::square(5.0, 16).unwrap();
        let psi = ComplexField::constant(&g, Complex64::from_polar(1.0, 0.3));
        let l = lift(&psi, 0.1).unwrap();
        assert!(l.theta.values().iter().all(|t| (t - 0.3).abs() < 1e-15));
        assert!(l.rho.values().iter().all(|r| (r - 1.0).abs() < 1e-15));
    }

    #[test]
    fn lift_rejects_vortex_and_winding() {
        let g = Grid::square(5.0, 32).unwrap();
        let vortex = ComplexField::from_fn(&g, |x, y| {
            Complex64::new(x, y) / (x * x + y * y + 0.01).sqrt()
        });
        assert!(matches!(
            lift(&vortex, 0.1),
            Err(Error::ModulusTooSmall { .. }) | Err(Error::NonzeroWinding { .. })
        ));
        let wind = ComplexField::from_fn(&g, |x, _| Complex64::from_polar(1.0, PI * x / 5.0));
        assert!(matches!(
            lift(&wind, 0.1),
            Err(Error::NonzeroWinding { axis: 1, winding: 1 })
        ));
    }
}
