//! Periodic rectangular grids and the spectral operators defined on them.
//!
//! A [`Grid`] discretizes `[-L1, L1) x [-L2, L2)` with periodic identification.
//! Values are stored row-major with `x1` varying fastest, so the value at
//! `(i1, i2)` lives at `i1 + n1 * i2`.
//!
//! First derivatives use the wavenumber symbol `i xi` with the Nyquist mode
//! dropped. Every second-order operator in the crate is built by composing two
//! first derivatives, which keeps the discrete integration by parts exact.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Coordinate direction on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
        }
    }
}

struct FftPlans {
    forward: [Arc<dyn Fft<f64>>; 2],
    inverse: [Arc<dyn Fft<f64>>; 2],
}

/// A periodic rectangle with `n1 x n2` equispaced points.
#[derive(Clone)]
pub struct Grid {
    half_lengths: [f64; 2],
    points: [usize; 2],
    plans: Arc<FftPlans>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_lengths", &self.half_lengths)
            .field("points", &self.points)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.half_lengths == other.half_lengths && self.points == other.points
    }
}

impl Grid {
    pub fn new(l1: f64, l2: f64, n1: usize, n2: usize) -> Result<Self> {
        if !(l1.is_finite() && l2.is_finite() && l1 > 0.0 && l2 > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-lengths must be positive and finite, got ({l1}, {l2})"
            )));
        }
        for n in [n1, n2] {
            if n < 8 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "point counts must be even and at least 8, got {n}"
                )));
            }
        }
        let mut planner = FftPlanner::new();
        let plans = FftPlans {
            forward: [planner.plan_fft_forward(n1), planner.plan_fft_forward(n2)],
            inverse: [planner.plan_fft_inverse(n1), planner.plan_fft_inverse(n2)],
        };
        Ok(Grid {
            half_lengths: [l1, l2],
            points: [n1, n2],
            plans: Arc::new(plans),
        })
    }

    /// Square grid `[-l, l)^2` with `n x n` points.
    pub fn square(l: f64, n: usize) -> Result<Self> {
        Grid::new(l, l, n, n)
    }

    /// Same point counts, half-lengths multiplied by `(lambda, sigma)`.
    pub fn scaled(&self, lambda: f64, sigma: f64) -> Result<Self> {
        if !(lambda > 0.0 && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dilation factors must be positive, got ({lambda}, {sigma})"
            )));
        }
        let mut g = self.clone();
        g.half_lengths = [self.half_lengths[0] * lambda, self.half_lengths[1] * sigma];
        Ok(g)
    }

    pub fn l1(&self) -> f64 {
        self.half_lengths[0]
    }

    pub fn l2(&self) -> f64 {
        self.half_lengths[1]
    }

    pub fn n1(&self) -> usize {
        self.points[0]
    }

    pub fn n2(&self) -> usize {
        self.points[1]
    }

    pub fn half_length(&self, axis: Axis) -> f64 {
        self.half_lengths[axis.index()]
    }

    pub fn points(&self, axis: Axis) -> usize {
        self.points[axis.index()]
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.points[0] * self.points[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: Axis) -> f64 {
        let a = axis.index();
        2.0 * self.half_lengths[a] / self.points[a] as f64
    }

    pub fn h1(&self) -> f64 {
        self.spacing(Axis::X1)
    }

    pub fn h2(&self) -> f64 {
        self.spacing(Axis::X2)
    }

    pub fn cell_area(&self) -> f64 {
        self.h1() * self.h2()
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_lengths[0] * self.half_lengths[1]
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 + self.points[0] * i2
    }

    /// Coordinate of the `i`-th node along `axis`; nodes run from `-L` to `L - h`.
    pub fn coordinate(&self, axis: Axis, i: usize) -> f64 {
        -self.half_length(axis) + i as f64 * self.spacing(axis)
    }

    pub fn coordinates(&self, axis: Axis) -> Vec<f64> {
        (0..self.points(axis)).map(|i| self.coordinate(axis, i)).collect()
    }

    /// Wavenumbers in FFT order: `0, 1, .., n/2-1, -n/2, .., -1` times `pi/L`.
    pub fn wavenumbers(&self, axis: Axis) -> Vec<f64> {
        let n = self.points(axis);
        let k0 = std::f64::consts::PI / self.half_length(axis);
        (0..n)
            .map(|m| {
                let m = m as i64;
                let signed = if m < (n as i64) / 2 { m } else { m - n as i64 };
                signed as f64 * k0
            })
            .collect()
    }

    /// Wavenumbers used by first derivatives: as [`Grid::wavenumbers`] with
    /// the Nyquist entry set to zero.
    pub fn derivative_wavenumbers(&self, axis: Axis) -> Vec<f64> {
        let mut k = self.wavenumbers(axis);
        k[self.points(axis) / 2] = 0.0;
        k
    }

    fn fft_axis(&self, data: &mut [Complex64], axis: Axis, inverse: bool) {
        let [n1, n2] = self.points;
        let plan = if inverse {
            &self.plans.inverse[axis.index()]
        } else {
            &self.plans.forward[axis.index()]
        };
        match axis {
            Axis::X1 => plan.process(data),
            Axis::X2 => {
                let mut column = vec![Complex64::new(0.0, 0.0); n1 * n2];
                for i2 in 0..n2 {
                    for i1 in 0..n1 {
                        column[i2 + n2 * i1] = data[i1 + n1 * i2];
                    }
                }
                plan.process(&mut column);
                for i1 in 0..n1 {
                    for i2 in 0..n2 {
                        data[i1 + n1 * i2] = column[i2 + n2 * i1];
                    }
                }
            }
        }
    }

    /// Unnormalized forward 2D DFT in place.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.fft_axis(data, Axis::X1, false);
        self.fft_axis(data, Axis::X2, false);
    }

    /// Normalized inverse 2D DFT in place.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.fft_axis(data, Axis::X1, true);
        self.fft_axis(data, Axis::X2, true);
        let scale = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

fn check_len(grid: &Grid, found: usize) -> Result<()> {
    if found != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            found,
        });
    }
    Ok(())
}

/// Real-valued field on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub(crate) grid: Grid,
    pub(crate) values: Vec<f64>,
}

/// Complex-valued field on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    pub(crate) grid: Grid,
    pub(crate) values: Vec<Complex64>,
}

/// Fourier coefficients of a field, indexed like the grid in FFT order.
///
/// Coefficients are the unnormalized DFT: the inverse divides by `n1 n2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub(crate) grid: Grid,
    pub(crate) coefficients: Vec<Complex64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        ScalarField {
            values: vec![0.0; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        ScalarField {
            values: vec![value; grid.len()],
            grid: grid.clone(),
        }
    }

    /// Samples `f(x1, x2)` at the grid nodes.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let x1 = grid.coordinates(Axis::X1);
        let x2 = grid.coordinates(Axis::X2);
        let mut values = Vec::with_capacity(grid.len());
        for &y in &x2 {
            for &x in &x1 {
                values.push(f(x, y));
            }
        }
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i1: usize, i2: usize) -> f64 {
        self.values[self.grid.index(i1, i2)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        debug_assert_eq!(self.grid, other.grid);
        ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn zip_map_complex(
        &self,
        other: &ScalarField,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> ComplexField {
        debug_assert_eq!(self.grid, other.grid);
        ComplexField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn spectrum(&self) -> Spectrum {
        self.to_complex().spectrum()
    }

    /// Midpoint (equivalently trapezoid) rule on the periodic cell.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn derivative(&self, axis: Axis) -> ScalarField {
        self.spectrum().derivative(axis).inverse_real()
    }

    pub fn laplacian(&self) -> ScalarField {
        self.spectrum().laplacian().inverse_real()
    }

    /// Means over `x1` of each row of constant `x2`.
    pub fn row_means(&self) -> Vec<f64> {
        let n1 = self.grid.n1();
        self.values
            .chunks(n1)
            .map(|row| row.iter().sum::<f64>() / n1 as f64)
            .collect()
    }

    /// Spectral inverse of `d/dx1`, defined when every row has zero mean.
    ///
    /// `tol_mean` is relative to `max |f|`.
    pub fn antiderivative_x(&self, tol_mean: f64) -> Result<ScalarField> {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let worst = self.row_means().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if worst > tol_mean * scale {
            return Err(Error::NonZeroXMean {
                mean: worst,
                tol: tol_mean * scale,
            });
        }
        Ok(self.spectrum().antiderivative_x().inverse_real())
    }

    /// `x -> f(x1/lambda, x2/sigma)` on the grid with half-lengths `(lambda L1, sigma L2)`.
    pub fn dilate(&self, lambda: f64, sigma: f64) -> Result<ScalarField> {
        Ok(ScalarField {
            grid: self.grid.scaled(lambda, sigma)?,
            values: self.values.clone(),
        })
    }

    /// Trigonometric interpolation of this field onto `target`'s nodes.
    pub fn resample(&self, target: &Grid) -> ScalarField {
        let c = self.to_complex().resample(target);
        ScalarField {
            grid: target.clone(),
            values: c.values.iter().map(|z| z.re).collect(),
        }
    }
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexField { grid, values })
    }

    pub fn constant(grid: &Grid, value: Complex64) -> Self {
        ComplexField {
            values: vec![value; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let x1 = grid.coordinates(Axis::X1);
        let x2 = grid.coordinates(Axis::X2);
        let mut values = Vec::with_capacity(grid.len());
        for &y in &x2 {
            for &x in &x1 {
                values.push(f(x, y));
            }
        }
        ComplexField {
            grid: grid.clone(),
            values,
        }
    }

    /// `rho e^{i theta}` from modulus and phase fields on a common grid.
    pub fn from_polar(rho: &ScalarField, theta: &ScalarField) -> Result<Self> {
        rho.grid.check_same(&theta.grid)?;
        Ok(ComplexField {
            grid: rho.grid.clone(),
            values: rho
                .values
                .iter()
                .zip(&theta.values)
                .map(|(&r, &t)| Complex64::from_polar(r, t))
                .collect(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, i1: usize, i2: usize) -> Complex64 {
        self.values[self.grid.index(i1, i2)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn modulus(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|z| z.norm()).collect(),
        }
    }

    pub fn modulus_squared(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    pub fn real_part(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|z| z.re).collect(),
        }
    }

    pub fn imag_part(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|z| z.im).collect(),
        }
    }

    pub fn min_modulus(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, z| m.min(z.norm()))
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexField {
        ComplexField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn zip_map(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> ComplexField {
        debug_assert_eq!(self.grid, other.grid);
        ComplexField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> ComplexField {
        self.map(|z| z * s)
    }

    /// `self + t * direction`.
    pub fn axpy(&self, t: f64, direction: &ComplexField) -> ComplexField {
        self.zip_map(direction, |a, b| a + b * t)
    }

    pub fn sub(&self, other: &ComplexField) -> ComplexField {
        self.zip_map(other, |a, b| a - b)
    }

    /// Real `L^2` inner product `integral Re(a conj(b))`.
    pub fn inner(&self, other: &ComplexField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum::<f64>()
            * self.grid.cell_area()
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut coefficients = self.values.clone();
        self.grid.forward(&mut coefficients);
        Spectrum {
            grid: self.grid.clone(),
            coefficients,
        }
    }

    pub fn derivative(&self, axis: Axis) -> ComplexField {
        self.spectrum().derivative(axis).inverse()
    }

    pub fn laplacian(&self) -> ComplexField {
        self.spectrum().laplacian().inverse()
    }

    /// `x -> psi(x1/lambda, x2/sigma)` on the grid with half-lengths
    /// `(lambda L1, sigma L2)` and the same point counts.
    ///
    /// The dilated nodes are exactly the images of the original nodes, so the
    /// trigonometric interpolant is evaluated at its own nodes.
    pub fn dilate(&self, lambda: f64, sigma: f64) -> Result<ComplexField> {
        Ok(ComplexField {
            grid: self.grid.scaled(lambda, sigma)?,
            values: self.values.clone(),
        })
    }

    /// Evaluates the periodic trigonometric interpolant of this field at the
    /// nodes of `target`. Target nodes outside the source cell are wrapped
    /// periodically.
    pub fn resample(&self, target: &Grid) -> ComplexField {
        let src = &self.grid;
        let spec = self.spectrum();
        let (n1, n2) = (src.n1(), src.n2());
        let (m1, m2) = (target.n1(), target.n2());
        let basis1 = interpolation_basis(src, Axis::X1, &target.coordinates(Axis::X1));
        let basis2 = interpolation_basis(src, Axis::X2, &target.coordinates(Axis::X2));
        // Contract along x1: for each source wavenumber row k2, evaluate at target x1.
        let mut partial = vec![Complex64::new(0.0, 0.0); m1 * n2];
        for k2 in 0..n2 {
            let row = &spec.coefficients[k2 * n1..(k2 + 1) * n1];
            for t1 in 0..m1 {
                let b = &basis1[t1 * n1..(t1 + 1) * n1];
                let mut acc = Complex64::new(0.0, 0.0);
                for k1 in 0..n1 {
                    acc += row[k1] * b[k1];
                }
                partial[t1 + m1 * k2] = acc;
            }
        }
        let scale = 1.0 / src.len() as f64;
        let mut values = vec![Complex64::new(0.0, 0.0); m1 * m2];
        for t2 in 0..m2 {
            let b = &basis2[t2 * n2..(t2 + 1) * n2];
            for t1 in 0..m1 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k2 in 0..n2 {
                    acc += partial[t1 + m1 * k2] * b[k2];
                }
                values[t1 + m1 * t2] = acc * scale;
            }
        }
        ComplexField {
            grid: target.clone(),
            values,
        }
    }

    /// Reflections about `x2 = 0`: `Plus` keeps the upper half-plane and mirrors
    /// it into the lower one, `Minus` does the opposite.
    pub fn reflect(&self, sign: ReflectionSign) -> ComplexField {
        let (n1, n2) = (self.grid.n1(), self.grid.n2());
        let half = n2 / 2;
        let mut values = self.values.clone();
        for i2 in 0..n2 {
            // node i2 sits at x2 = (i2 - n2/2) h2; its mirror is n2 - i2 (mod n2)
            let mirror = (n2 - i2) % n2;
            let upper = i2 >= half;
            let take_mirror = match sign {
                ReflectionSign::Plus => !upper,
                ReflectionSign::Minus => upper && i2 != half,
            };
            if take_mirror {
                for i1 in 0..n1 {
                    values[i1 + n1 * i2] = self.values[i1 + n1 * mirror];
                }
            }
        }
        ComplexField {
            grid: self.grid.clone(),
            values,
        }
    }

    /// `psi(-x1, x2)` on the same grid.
    pub fn flip_x1(&self) -> ComplexField {
        let (n1, n2) = (self.grid.n1(), self.grid.n2());
        let mut values = self.values.clone();
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                values[i1 + n1 * i2] = self.values[(n1 - i1) % n1 + n1 * i2];
            }
        }
        ComplexField {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Periodic translation by whole grid cells.
    pub fn roll(&self, s1: isize, s2: isize) -> ComplexField {
        let (n1, n2) = (self.grid.n1() as isize, self.grid.n2() as isize);
        let mut values = self.values.clone();
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                let j1 = (i1 - s1).rem_euclid(n1);
                let j2 = (i2 - s2).rem_euclid(n2);
                values[(i1 + n1 * i2) as usize] = self.values[(j1 + n1 * j2) as usize];
            }
        }
        ComplexField {
            grid: self.grid.clone(),
            values,
        }
    }
}

/// Which half-plane a reflection about `x2 = 0` keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReflectionSign {
    Plus,
    Minus,
}

/// Row-major `targets x n` matrix of `e^{i k_m (x - x_0)}`, with the Nyquist
/// column replaced by its cosine so real data interpolates to real values.
fn interpolation_basis(src: &Grid, axis: Axis, targets: &[f64]) -> Vec<Complex64> {
    let n = src.points(axis);
    let k = src.wavenumbers(axis);
    let x0 = -src.half_length(axis);
    let mut out = Vec::with_capacity(targets.len() * n);
    for &x in targets {
        let dx = x - x0;
        for (m, &km) in k.iter().enumerate() {
            if m == n / 2 {
                out.push(Complex64::new((km * dx).cos(), 0.0));
            } else {
                out.push(Complex64::from_polar(1.0, km * dx));
            }
        }
    }
    out
}

impl Spectrum {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Multiplies each coefficient by `symbol(xi1, xi2)` evaluated on the
    /// derivative wavenumbers (Nyquist entries zero).
    pub fn apply(&self, symbol: impl Fn(f64, f64) -> Complex64) -> Spectrum {
        let k1 = self.grid.derivative_wavenumbers(Axis::X1);
        let k2 = self.grid.derivative_wavenumbers(Axis::X2);
        let n1 = self.grid.n1();
        let mut coefficients = self.coefficients.clone();
        for (j, &b) in k2.iter().enumerate() {
            for (i, &a) in k1.iter().enumerate() {
                coefficients[i + n1 * j] *= symbol(a, b);
            }
        }
        Spectrum {
            grid: self.grid.clone(),
            coefficients,
        }
    }

    pub fn apply_real(&self, symbol: impl Fn(f64, f64) -> f64) -> Spectrum {
        self.apply(|a, b| Complex64::new(symbol(a, b), 0.0))
    }

    pub fn derivative(&self, axis: Axis) -> Spectrum {
        match axis {
            Axis::X1 => self.apply(|a, _| Complex64::new(0.0, a)),
            Axis::X2 => self.apply(|_, b| Complex64::new(0.0, b)),
        }
    }

    pub fn laplacian(&self) -> Spectrum {
        self.apply_real(|a, b| -(a * a + b * b))
    }

    /// Division by `i xi1` with every `xi1 = 0` (and Nyquist) mode set to zero.
    pub fn antiderivative_x(&self) -> Spectrum {
        self.apply(|a, _| {
            if a == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0 / a)
            }
        })
    }

    pub fn inverse(&self) -> ComplexField {
        let mut values = self.coefficients.clone();
        self.grid.inverse(&mut values);
        ComplexField {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Inverse transform keeping the real part.
    pub fn inverse_real(&self) -> ScalarField {
        let c = self.inverse();
        ScalarField {
            grid: c.grid,
            values: c.values.into_iter().map(|z| z.re).collect(),
        }
    }

    /// `h1 h2 / (n1 n2) * sum |c|^2`, which equals `integral |f|^2` by Parseval.
    pub fn parseval_integral(&self) -> f64 {
        let w = self.grid.cell_area() / self.grid.len() as f64;
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>() * w
    }

    /// `h1 h2 / (n1 n2) * sum weight(xi) |c|^2` on derivative wavenumbers.
    pub fn weighted_integral(&self, weight: impl Fn(f64, f64) -> f64) -> f64 {
        let k1 = self.grid.derivative_wavenumbers(Axis::X1);
        let k2 = self.grid.derivative_wavenumbers(Axis::X2);
        let n1 = self.grid.n1();
        let mut acc = 0.0;
        for (j, &b) in k2.iter().enumerate() {
            for (i, &a) in k1.iter().enumerate() {
                acc += weight(a, b) * self.coefficients[i + n1 * j].norm_sqr();
            }
        }
        acc * self.grid.cell_area() / self.grid.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(10.0, 8.0, 64, 48).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1.0, 1.0, 7, 8).is_err());
        assert!(Grid::new(1.0, 1.0, 6, 8).is_err());
        assert!(Grid::new(0.0, 1.0, 8, 8).is_err());
        assert!(Grid::new(1.0, f64::NAN, 8, 8).is_err());
    }

    #[test]
    fn wavenumbers_have_one_zero() {
        let g = grid();
        for axis in [Axis::X1, Axis::X2] {
            let k = g.wavenumbers(axis);
            assert_eq!(k.iter().filter(|&&v| v == 0.0).count(), 1);
            assert!((k[1] - PI / g.half_length(axis)).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid();
        let l1 = g.l1();
        let f = ScalarField::from_fn(&g, |x, _| (PI * x / l1).sin());
        let d = f.derivative(Axis::X1);
        let expect = ScalarField::from_fn(&g, |x, _| PI / l1 * (PI * x / l1).cos());
        let err = d.zip_map(&expect, |a, b| a - b).max_abs();
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = grid();
        let f = ScalarField::constant(&g, 3.5);
        for axis in [Axis::X1, Axis::X2] {
            assert!(f.derivative(axis).max_abs() < 1e-14);
        }
    }

    #[test]
    fn integrate_constant_and_sine() {
        let g = Grid::square(10.0, 32).unwrap();
        assert!((ScalarField::constant(&g, 1.0).integrate() - 400.0).abs() < 1e-11);
        let s = ScalarField::from_fn(&g, |x, _| (PI * x / 10.0).sin());
        assert!(s.integrate().abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        let g = Grid::square(20.0, 128).unwrap();
        let f = ScalarField::from_fn(&g, |x, y| (-x * x - y * y).exp());
        assert!((f.integrate() - PI).abs() < 1e-10);
    }

    #[test]
    fn antiderivative_of_cosine() {
        let g = grid();
        let l1 = g.l1();
        let f = ScalarField::from_fn(&g, |x, y| (PI * x / l1).cos() * (1.0 + 0.1 * y));
        let a = f.antiderivative_x(1e-10).unwrap();
        let expect = ScalarField::from_fn(&g, |x, y| l1 / PI * (PI * x / l1).sin() * (1.0 + 0.1 * y));
        assert!(a.zip_map(&expect, |p, q| p - q).max_abs() < 1e-12);
    }

    #[test]
    fn antiderivative_rejects_mean() {
        let g = grid();
        let f = ScalarField::constant(&g, 1.0);
        assert!(matches!(f.antiderivative_x(1e-10), Err(Error::NonZeroXMean { .. })));
    }

    #[test]
    fn dilate_identity_is_exact() {
        let g = grid();
        let psi = ComplexField::from_fn(&g, |x, y| Complex64::new(x.cos(), y.sin()));
        assert_eq!(psi.dilate(1.0, 1.0).unwrap(), psi);
    }

    #[test]
    fn resample_band_limited() {
        let g = grid();
        let (l1, l2) = (g.l1(), g.l2());
        let f = |x: f64, y: f64| {
            Complex64::new((PI * x / l1).cos() * (2.0 * PI * y / l2).sin(), (3.0 * PI * x / l1).sin())
        };
        let psi = ComplexField::from_fn(&g, f);
        let target = Grid::new(l1 * 0.7, l2 * 0.9, 40, 36).unwrap();
        let r = psi.resample(&target);
        let expect = ComplexField::from_fn(&target, f);
        assert!(r.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn reflect_symmetric_field_is_identity() {
        let g = grid();
        let psi = ComplexField::from_fn(&g, |x, y| Complex64::new(x.cos() * (y * 0.3).cos(), x.sin()));
        for s in [ReflectionSign::Plus, ReflectionSign::Minus] {
            assert!(psi.reflect(s).max_abs_diff(&psi) < 1e-15);
        }
    }

    #[test]
    fn reflect_halves() {
        let g = grid();
        let psi = ComplexField::from_fn(&g, |x, y| Complex64::new(x + 2.0 * y, 0.0));
        let p = psi.reflect(ReflectionSign::Plus);
        let m = psi.reflect(ReflectionSign::Minus);
        let n2 = g.n2();
        for i2 in 0..n2 {
            let y = g.coordinate(Axis::X2, i2);
            let x = g.coordinate(Axis::X1, 5);
            let vp = p.get(5, i2).re;
            let vm = m.get(5, i2).re;
            assert!((vp - (x + 2.0 * y.abs())).abs() < 1e-12 || i2 == 0);
            if i2 != 0 {
                assert!((vm - (x - 2.0 * y.abs())).abs() < 1e-12);
            }
        }
    }
}
