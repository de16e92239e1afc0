//! Integral identities satisfied by traveling waves, and shape checks on
//! energy-momentum curves.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{Axis, ComplexField, ScalarField};
use crate::minimize::{CurveFamily, CurveResult};
use crate::physics::{self, Functionals, Nonlinearity, DEFAULT_DELTA_MIN};

/// Tolerance for identities that only involve quadrature.
pub const QUADRATURE_TOL: f64 = 1e-3;
/// Tolerance for the Fourier multiplier relation.
pub const MULTIPLIER_TOL: f64 = 1e-2;
/// Relative tolerance for curve shape checks.
pub const CURVE_TOL: f64 = 1e-2;

const REL_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs: f64,
    pub rel: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    /// `lhs = rhs`, passing when the relative residual is below `tolerance`.
    pub fn equality(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs = (lhs - rhs).abs();
        let rel = abs / lhs.abs().max(rhs.abs()).max(REL_FLOOR);
        IdentityReport {
            name: name.into(),
            lhs,
            rhs,
            abs,
            rel,
            tolerance,
            pass: rel < tolerance,
        }
    }

    /// `lhs <= rhs` up to `tolerance * scale`.
    pub fn bound(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, scale: f64) -> Self {
        let mut r = Self::equality(name, lhs, rhs, tolerance);
        r.pass = lhs.is_finite() && rhs.is_finite() && lhs <= rhs + tolerance * scale.abs();
        r
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Joins reports as JSON lines, one object per line.
pub fn to_json_lines<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for it in items {
        out.push_str(&serde_json::to_string(it).expect("report serializes"));
        out.push('\n');
    }
    out
}

/// Pohozaev identities: the scaling form in dimension `dim`,
/// `-(N-2) int |grad psi|^2 + c (N-1) Q = N int V`, and the planar form
/// `int |d1 psi|^2 = int |d2 psi|^2 + int V`, in that order.
pub fn pohozaev(psi: &ComplexField, nl: &Nonlinearity, c: f64, dim: usize) -> [IdentityReport; 2] {
    let f = Functionals::evaluate(psi, nl);
    let n = dim as f64;
    let scaling = IdentityReport::equality(
        "pohozaev_scaling",
        -(n - 2.0) * f.kinetic() + c * (n - 1.0) * f.momentum,
        n * f.potential,
        QUADRATURE_TOL,
    );
    let planar = IdentityReport::equality(
        "pohozaev_planar",
        f.kinetic_x1,
        f.kinetic_x2 + f.potential,
        QUADRATURE_TOL,
    );
    [scaling, planar]
}

/// `E = c Q + 2 A / (N - 1)`, the vanishing of `P_c`, in dimension two.
pub fn pc_identity(psi: &ComplexField, nl: &Nonlinearity, c: f64) -> IdentityReport {
    let f = Functionals::evaluate(psi, nl);
    IdentityReport::equality("pc", f.energy(), c * f.momentum + 2.0 * f.kinetic_x2, QUADRATURE_TOL)
}

fn grad_sq(f: &ScalarField) -> ScalarField {
    let a = f.derivative(Axis::X1);
    let b = f.derivative(Axis::X2);
    a.zip_map(&b, |x, y| x * x + y * y)
}

/// The two Madelung integral identities on the lifting `psi = rho e^{i theta}`.
pub fn madelung_identities(psi: &ComplexField, nl: &Nonlinearity, c: f64) -> Result<[IdentityReport; 2]> {
    let lf = physics::lift(psi, DEFAULT_DELTA_MIN)?;
    let rho = &lf.rho;
    let tx = lf.theta.derivative(Axis::X1);
    let gt = grad_sq(&lf.theta);
    let gr = grad_sq(rho);
    let eta = rho.map(|r| r * r - 1.0);

    let lhs1 = 2.0 * rho.zip_map(&gt, |r, g| r * r * g).integrate();
    let rhs1 = -c * eta.zip_map(&tx, |e, t| e * t).integrate();

    let mut dens = Vec::with_capacity(rho.values().len());
    let mut flux = Vec::with_capacity(rho.values().len());
    for i in 0..rho.values().len() {
        let r = rho.values()[i];
        let e = r * r - 1.0;
        dens.push(2.0 * r * gr.values()[i] + r * e * gt.values()[i] - r * e * nl.f(r * r));
        flux.push(r * e * tx.values()[i]);
    }
    let g = rho.grid().clone();
    let lhs2 = ScalarField::new(g.clone(), dens)?.integrate();
    let rhs2 = -c * ScalarField::new(g, flux)?.integrate();
    Ok([
        IdentityReport::equality("madelung_phase", lhs1, rhs1, QUADRATURE_TOL),
        IdentityReport::equality("madelung_modulus", lhs2, rhs2, QUADRATURE_TOL),
    ])
}

/// `g(s) = v_s^2 s + 2 (1 + s) F(1 + s)`, quadratic at `s = 0`.
pub fn g_function(nl: &Nonlinearity, s: f64) -> f64 {
    let vs = nl.sound_speed();
    vs * vs * s + 2.0 * (1.0 + s) * nl.f(1.0 + s)
}

/// `|xi|^2 / (|xi|^4 + v_s^2 |xi|^2 - c^2 xi1^2)`.
pub fn lc_symbol(xi1: f64, xi2: f64, c: f64, vs: f64) -> f64 {
    let r2 = xi1 * xi1 + xi2 * xi2;
    r2 / (r2 * r2 + vs * vs * r2 - c * c * xi1 * xi1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierReport {
    pub c: f64,
    /// `||eta_hat - L_c Upsilon_hat|| / ||eta_hat||` over the retained modes.
    pub residual: f64,
    pub eta_norm: f64,
    /// `||d1 theta + c eta / 2||`.
    pub h_norm: f64,
    pub dtheta2_norm: f64,
    /// Modes with vanishing symbol `|xi|` (or a nonpositive denominator).
    pub excluded_modes: usize,
    /// Share of `||eta_hat||^2` carried by the excluded modes.
    pub excluded_mass: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl MultiplierReport {
    pub fn to_identity(&self) -> IdentityReport {
        IdentityReport {
            name: "fourier_multiplier".into(),
            lhs: self.residual,
            rhs: 0.0,
            abs: self.residual,
            rel: self.residual,
            tolerance: self.tolerance,
            pass: self.pass,
        }
    }
}

fn l2(f: &ScalarField) -> f64 {
    f.values().iter().map(|v| v * v).sum::<f64>().sqrt() * f.grid().cell_area().sqrt()
}

/// Fourier form of the hydrodynamic system: `eta_hat = L_c Upsilon_hat` with
/// `eta = rho^2 - 1`.
pub fn multiplier_relation(psi: &ComplexField, nl: &Nonlinearity, c: f64) -> Result<MultiplierReport> {
    let lf = physics::lift(psi, DEFAULT_DELTA_MIN)?;
    let grid = psi.grid().clone();
    let vs = nl.sound_speed();
    let rho = &lf.rho;
    let eta = rho.map(|r| r * r - 1.0);
    let t1 = lf.theta.derivative(Axis::X1);
    let t2 = lf.theta.derivative(Axis::X2);
    let grad_u = grad_sq(rho).zip_map(&rho.zip_map(&grad_sq(&lf.theta), |r, g| r * r * g), |a, b| a + b);

    let source = grad_u.zip_map(&eta, |gu, e| 2.0 * gu - g_function(nl, e)).spectrum();
    let flux1 = eta.zip_map(&t1, |e, t| e * t).spectrum();
    let flux2 = eta.zip_map(&t2, |e, t| e * t).spectrum();
    let eta_hat = eta.spectrum();

    let k1 = grid.derivative_wavenumbers(Axis::X1);
    let k2 = grid.derivative_wavenumbers(Axis::X2);
    let (mut num, mut den, mut excluded, mut excluded_sq) = (0.0, 0.0, 0usize, 0.0);
    let mut total_sq = 0.0;
    let n1 = grid.n1();
    for (i2, &b) in k2.iter().enumerate() {
        for (i1, &a) in k1.iter().enumerate() {
            let i = i1 + n1 * i2;
            let e = eta_hat.coefficients()[i];
            total_sq += e.norm_sqr();
            let r2 = a * a + b * b;
            let d = r2 * r2 + vs * vs * r2 - c * c * a * a;
            if r2 == 0.0 || d <= 0.0 {
                excluded += 1;
                excluded_sq += e.norm_sqr();
                continue;
            }
            let upsilon: Complex64 = -source.coefficients()[i]
                - flux1.coefficients()[i] * (2.0 * c * b * b / r2)
                + flux2.coefficients()[i] * (2.0 * c * a * b / r2);
            let diff = e - upsilon * (r2 / d);
            num += diff.norm_sqr();
            den += e.norm_sqr();
        }
    }
    let residual = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    let h = t1.zip_map(&eta, |t, e| t + 0.5 * c * e);
    Ok(MultiplierReport {
        c,
        residual,
        eta_norm: l2(&eta),
        h_norm: l2(&h),
        dtheta2_norm: l2(&t2),
        excluded_modes: excluded,
        excluded_mass: if total_sq > 0.0 { excluded_sq / total_sq } else { 0.0 },
        tolerance: MULTIPLIER_TOL,
        pass: residual < MULTIPLIER_TOL,
    })
}

/// Shape checks on the converged points of a curve: concavity, monotonicity,
/// the linear upper bound, slopes, and subadditivity on sampled pairs.
pub fn curve_checks(curve: &CurveResult, nl: &Nonlinearity) -> Vec<IdentityReport> {
    let pts: Vec<(f64, f64)> = curve.converged_points().map(|(x, v, _)| (x, v)).collect();
    let vs = nl.sound_speed();
    let kinetic = curve.family == CurveFamily::Kinetic;
    let mut out = Vec::new();
    if pts.len() < 3 {
        out.push(IdentityReport {
            name: "converged_points".into(),
            lhs: pts.len() as f64,
            rhs: 3.0,
            abs: (3 - pts.len().min(3)) as f64,
            rel: 1.0,
            tolerance: 0.0,
            pass: false,
        });
        return out;
    }
    let scale = pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max).max(REL_FLOOR);
    let slopes: Vec<f64> = pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let slope_scale = slopes.iter().map(|s| s.abs()).fold(0.0, f64::max).max(REL_FLOOR);

    // concavity: slopes are non-increasing
    let worst = slopes.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    out.push(IdentityReport::bound("concavity", worst, 0.0, CURVE_TOL, slope_scale));

    // monotone: increasing for E_min, decreasing for I_min
    let sign = if kinetic { -1.0 } else { 1.0 };
    let worst = pts
        .windows(2)
        .map(|w| -sign * (w[1].1 - w[0].1))
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(IdentityReport::bound("monotone", worst, 0.0, CURVE_TOL, scale));

    // linear bound
    let worst = pts
        .iter()
        .map(|&(x, v)| if kinetic { v + x / (vs * vs) } else { v - vs * x })
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(IdentityReport::bound("linear_bound", worst, 0.0, CURVE_TOL, scale));

    // slopes: in [0, v_s] for E_min, at most -1/v_s^2 for I_min
    let (lo, hi) = if kinetic {
        (f64::NEG_INFINITY, -1.0 / (vs * vs))
    } else {
        (0.0, vs)
    };
    let worst = slopes
        .iter()
        .map(|&s| (lo - s).max(s - hi))
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(IdentityReport::bound("slope_range", worst, 0.0, CURVE_TOL, slope_scale));

    // subadditivity where x_i + x_j is itself a curve point
    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0;
    for i in 0..pts.len() {
        for j in i..pts.len() {
            let s = pts[i].0 + pts[j].0;
            if let Some(k) = pts.iter().position(|p| (p.0 - s).abs() <= 1e-9 * s) {
                worst = worst.max(pts[k].1 - pts[i].1 - pts[j].1);
                pairs += 1;
            }
        }
    }
    if pairs > 0 {
        out.push(IdentityReport::bound("subadditivity", worst, 0.0, CURVE_TOL, scale));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn floor_in_relative_residual() {
        let r = IdentityReport::equality("z", 0.0, 0.0, 1e-3);
        assert_eq!(r.rel, 0.0);
        assert!(r.pass);
        let r = IdentityReport::equality("z", 1.0, 1.1, 1e-3);
        assert!((r.rel - 0.1 / 1.1).abs() < 1e-15);
        assert!(!r.pass);
    }

    #[test]
    fn constant_field_is_trivial() {
        let g = Grid::square(8.0, 16).unwrap();
        let one = ComplexField::constant(&g, Complex64::new(1.0, 0.0));
        let nl = Nonlinearity::GrossPitaevskii;
        for r in pohozaev(&one, &nl, 1.0, 2) {
            assert_eq!(r.abs, 0.0);
            assert!(r.pass);
        }
        let [a, b] = madelung_identities(&one, &nl, 1.0).unwrap();
        assert_eq!((a.lhs, a.rhs), (0.0, 0.0));
        assert!(b.pass);
    }

    #[test]
    fn real_field_has_no_phase_terms() {
        let g = Grid::square(8.0, 32).unwrap();
        let psi = ComplexField::from_fn(&g, |x, y| Complex64::new(1.0 - 0.3 * (-(x * x + y * y)).exp(), 0.0));
        let [a, _] = madelung_identities(&psi, &Nonlinearity::GrossPitaevskii, 1.2).unwrap();
        assert!(a.lhs.abs() < 1e-14 && a.rhs.abs() < 1e-14);
    }

    #[test]
    fn gp_g_is_minus_two_s_squared() {
        let nl = Nonlinearity::GrossPitaevskii;
        for s in [-0.5, 1e-3, 0.2, 2.0] {
            assert!((g_function(&nl, s) + 2.0 * s * s).abs() < 1e-14);
        }
        assert_eq!(g_function(&nl, 0.0), 0.0);
    }

    #[test]
    fn random_field_violates_pohozaev() {
        let g = Grid::square(8.0, 32).unwrap();
        let psi = ComplexField::from_fn(&g, |x, y| {
            let b = (-(x - 1.0).powi(2) - 0.5 * y * y).exp();
            Complex64::new(1.0 - 0.4 * b, 0.3 * b * x)
        });
        let [s, p] = pohozaev(&psi, &Nonlinearity::GrossPitaevskii, 1.0, 2);
        assert!(!s.pass || !p.pass);
        assert!(s.rel.max(p.rel) > 0.05);
    }
}
