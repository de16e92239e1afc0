//! KP-I lumps: solutions of
//! `v/vs^2 + (gamma/2) v^2 - v_xx/vs^2 + d_x^{-2} v_yy = 0`
//! computed by Petviashvili iteration, with the action and integral identities.
//!
//! Modes with `xi1 = 0` (including the Nyquist column of the derivative
//! symbol) are pinned to zero throughout, so `w` is always an x-derivative.
//!
//! Lumps decay like `1/r^2`, so on a torus of half-size `L` the integral
//! identities are violated at order `L^-2`. By default a companion solve on a
//! grid twice as large at the same spacing is used to extrapolate the four
//! integrals to the whole plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid, ScalarField, Spectrum};

const VS2: f64 = 2.0;
const MEAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KpOptions {
    /// Stop when the sup-norm change of the spectrum falls below `tol` times its size.
    pub tol: f64,
    pub max_iter: usize,
    /// Extrapolate the integrals with a companion solve on the doubled grid.
    pub extrapolate: bool,
}

impl Default for KpOptions {
    fn default() -> Self {
        KpOptions {
            tol: 1e-13,
            max_iter: 5000,
            extrapolate: true,
        }
    }
}

/// The four integrals entering the action and the identities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KpIntegrals {
    /// `int w^2`
    pub i2: f64,
    /// `int w^3`
    pub i3: f64,
    /// `int w_x^2`
    pub ix: f64,
    /// `int |d_x^{-1} w_y|^2`
    pub iy: f64,
}

impl KpIntegrals {
    pub fn of(w: &ScalarField) -> Result<Self> {
        let spec = zero_mean_checked(w)?;
        let wx = w.derivative(Axis::X1);
        let dy = inv_x_dy(&spec).inverse_real();
        Ok(KpIntegrals {
            i2: w.map(|v| v * v).integrate(),
            i3: w.map(|v| v * v * v).integrate(),
            ix: wx.map(|v| v * v).integrate(),
            iy: dy.map(|v| v * v).integrate(),
        })
    }

    pub fn action(&self, gamma: f64) -> f64 {
        (self.i2 + self.ix) / VS2 + self.iy + gamma / 3.0 * self.i3
    }

    /// The three identity left-hand sides (each vanishes for a lump).
    pub fn identities(&self, gamma: f64) -> [f64; 3] {
        let a = self.i2 / VS2;
        let x = self.ix / VS2;
        [
            a + gamma / 2.0 * self.i3 + x + self.iy,
            a + gamma / 3.0 * self.i3 - x + 3.0 * self.iy,
            a + gamma / 3.0 * self.i3 + x - self.iy,
        ]
    }

    /// Deviations of `IY/S`, `(I2/vs^2)/S`, `(Ix/vs^2)/S`, `(gamma/6) I3/S`
    /// from `1/2`, `3/2`, `1`, `-1`.
    pub fn action_relations(&self, gamma: f64) -> [f64; 4] {
        let s = self.action(gamma);
        [
            self.iy / s - 0.5,
            self.i2 / VS2 / s - 1.5,
            self.ix / VS2 / s - 1.0,
            gamma / 6.0 * self.i3 / s + 1.0,
        ]
    }

    /// `(4 fine - coarse) / 3`, the `L^-2` extrapolation.
    pub fn richardson(coarse: &KpIntegrals, fine: &KpIntegrals) -> KpIntegrals {
        let r = |a: f64, b: f64| (4.0 * b - a) / 3.0;
        KpIntegrals {
            i2: r(coarse.i2, fine.i2),
            i3: r(coarse.i3, fine.i3),
            ix: r(coarse.ix, fine.ix),
            iy: r(coarse.iy, fine.iy),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KpGroundState {
    pub w: ScalarField,
    pub gamma: f64,
    /// Action, from the extrapolated integrals when extrapolation is on.
    pub action: f64,
    /// `int |d_x^{-1} w_y|^2`, on the same footing as `action`.
    pub y_norm2: f64,
    /// Identity left-hand sides divided by the action.
    pub residuals: [f64; 3],
    pub integrals: KpIntegrals,
    /// Integrals of `w` on its own grid.
    pub grid_integrals: KpIntegrals,
    /// Relative residual of the lump equation on the grid.
    pub equation_residual: f64,
    pub iterations: usize,
    pub inv_x_w: ScalarField,
    pub inv_x_wy: ScalarField,
}

impl KpGroundState {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()))
    }
}

fn zero_mean_checked(w: &ScalarField) -> Result<Spectrum> {
    let scale = w.max_abs().max(f64::MIN_POSITIVE);
    let worst = w.row_means().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > MEAN_TOL * scale {
        return Err(Error::NonZeroXMean {
            mean: worst,
            tol: MEAN_TOL * scale,
        });
    }
    Ok(w.spectrum())
}

/// `d_x^{-1} d_y` with the `xi1 = 0` modes dropped.
fn inv_x_dy(spec: &Spectrum) -> Spectrum {
    spec.apply_real(|a, b| if a == 0.0 { 0.0 } else { b / a })
}

fn symbol(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        (1.0 + a * a) / VS2 + b * b / (a * a)
    }
}

fn pin_zero_modes(spec: &mut Spectrum) {
    let k1 = spec.grid().derivative_wavenumbers(Axis::X1);
    let n1 = spec.grid().n1();
    for (idx, c) in spec.coefficients.iter_mut().enumerate() {
        if k1[idx % n1] == 0.0 {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Default half-lengths `(l, sqrt2 l)` for a lump grid with `n x n` points.
pub fn default_grid(l: f64, n: usize) -> Result<Grid> {
    Grid::new(l, std::f64::consts::SQRT_2 * l, n, n)
}

fn seed(grid: &Grid, gamma: f64) -> ScalarField {
    let amp = -12.0 / gamma;
    let raw = ScalarField::from_fn(grid, |x, y| {
        let sx = 1.0 / (x / std::f64::consts::SQRT_2).cosh();
        let sy = 1.0 / (y / 2.0).cosh();
        amp * sx * sx * sy * sy
    });
    let mut s = raw.spectrum();
    pin_zero_modes(&mut s);
    s.inverse_real()
}

/// Petviashvili fixed point on `grid`; returns the lump and the iteration count.
pub fn petviashvili(gamma: f64, grid: &Grid, opts: &KpOptions) -> Result<(ScalarField, usize)> {
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(Error::InvalidParameter("gamma must be nonzero".into()));
    }
    let msym = Spectrum {
        grid: grid.clone(),
        coefficients: vec![Complex64::new(1.0, 0.0); grid.len()],
    }
    .apply_real(symbol);
    let m: Vec<f64> = msym.coefficients.iter().map(|c| c.re).collect();

    let w0 = seed(grid, gamma);
    let mut wh = w0.spectrum();
    for it in 1..=opts.max_iter {
        let w = wh.inverse_real();
        let mut nh = w.map(|v| -0.5 * gamma * v * v).spectrum();
        pin_zero_modes(&mut nh);
        let num: f64 = wh
            .coefficients
            .iter()
            .zip(&m)
            .map(|(c, mm)| mm * c.norm_sqr())
            .sum();
        let den: f64 = wh
            .coefficients
            .iter()
            .zip(&nh.coefficients)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let ratio = num / den;
        if !ratio.is_finite() || ratio <= 0.0 {
            return Err(Error::IterationDiverged(format!(
                "stabilizing factor {ratio} at iteration {it}"
            )));
        }
        let f = ratio * ratio;
        let mut change = 0.0f64;
        let mut size = 0.0f64;
        for ((c, n), mm) in wh.coefficients.iter_mut().zip(&nh.coefficients).zip(&m) {
            let new = if *mm == 0.0 { Complex64::new(0.0, 0.0) } else { n * (f / mm) };
            change = change.max((new - *c).norm());
            size = size.max(new.norm());
            *c = new;
        }
        if !size.is_finite() || size == 0.0 {
            return Err(Error::IterationDiverged(format!("iterate collapsed at iteration {it}")));
        }
        if change <= opts.tol * size {
            let w = wh.inverse_real();
            let scale = w.max_abs();
            let worst = w.row_means().iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if worst > MEAN_TOL * scale {
                return Err(Error::ZeroModeContamination(worst / scale));
            }
            return Ok((w, it));
        }
    }
    Err(Error::IterationDiverged(format!(
        "no fixed point within {} iterations",
        opts.max_iter
    )))
}

/// Lump on `grid` with action and identity residuals.
pub fn solve_kp_ground_state(gamma: f64, grid: &Grid, opts: &KpOptions) -> Result<KpGroundState> {
    let (w, iterations) = petviashvili(gamma, grid, opts)?;
    let grid_integrals = KpIntegrals::of(&w)?;
    let integrals = if opts.extrapolate {
        let big = Grid::new(2.0 * grid.l1(), 2.0 * grid.l2(), 2 * grid.n1(), 2 * grid.n2())?;
        let (wb, _) = petviashvili(gamma, &big, opts)?;
        KpIntegrals::richardson(&grid_integrals, &KpIntegrals::of(&wb)?)
    } else {
        grid_integrals
    };
    let action = integrals.action(gamma);
    let ids = integrals.identities(gamma);
    let spec = w.spectrum();
    let inv_x_w = w.antiderivative_x(MEAN_TOL)?;
    let inv_x_wy = inv_x_dy(&spec).inverse_real();
    let equation_residual = relative_residual(&w, gamma)?;
    Ok(KpGroundState {
        gamma,
        action,
        y_norm2: integrals.iy,
        residuals: [ids[0] / action, ids[1] / action, ids[2] / action],
        integrals,
        grid_integrals,
        equation_residual,
        iterations,
        inv_x_w,
        inv_x_wy,
        w,
    })
}

/// `S(v) = int v^2/vs^2 + v_x^2/vs^2 + |d_x^{-1} v_y|^2 + (gamma/3) int v^3`.
pub fn kp_action(v: &ScalarField, gamma: f64) -> Result<f64> {
    Ok(KpIntegrals::of(v)?.action(gamma))
}

/// Pointwise residual of the lump equation restricted to `xi1 != 0` modes
/// (the x-derivative of the equation holds on the dropped ones trivially).
pub fn kp_residual(w: &ScalarField, gamma: f64) -> Result<ScalarField> {
    let spec = zero_mean_checked(w)?;
    let lin = spec.apply_real(symbol);
    let mut nl = w.map(|v| 0.5 * gamma * v * v).spectrum();
    pin_zero_modes(&mut nl);
    let coefficients = lin
        .coefficients
        .iter()
        .zip(&nl.coefficients)
        .map(|(a, b)| a + b)
        .collect();
    Ok(Spectrum {
        grid: w.grid().clone(),
        coefficients,
    }
    .inverse_real())
}

/// `||kp_residual|| / ||(gamma/2) w^2||` on the retained modes.
pub fn relative_residual(w: &ScalarField, gamma: f64) -> Result<f64> {
    let r = kp_residual(w, gamma)?;
    let mut nl = w.map(|v| 0.5 * gamma * v * v).spectrum();
    pin_zero_modes(&mut nl);
    let scale = nl.parseval_integral().sqrt();
    let res = r.map(|v| v * v).integrate().sqrt();
    Ok(if scale == 0.0 { res } else { res / scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field() {
        let g = default_grid(8.0, 16).unwrap();
        let z = ScalarField::zeros(&g);
        assert_eq!(kp_action(&z, 6.0).unwrap(), 0.0);
        assert_eq!(kp_residual(&z, 6.0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn rejects_mean() {
        let g = default_grid(8.0, 16).unwrap();
        let one = ScalarField::constant(&g, 1.0);
        assert!(matches!(kp_action(&one, 6.0), Err(Error::NonZeroXMean { .. })));
    }

    #[test]
    fn small_lump_converges() {
        let g = default_grid(16.0, 64).unwrap();
        let opts = KpOptions {
            extrapolate: false,
            ..KpOptions::default()
        };
        let lump = solve_kp_ground_state(6.0, &g, &opts).unwrap();
        assert!(lump.action > 0.0);
        assert!(lump.integrals.i3 < 0.0);
        assert!(lump.equation_residual < 1e-8);
    }
}
