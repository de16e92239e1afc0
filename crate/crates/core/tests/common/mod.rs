#![allow(dead_code)]

use nlstw::diagnostics;
use nlstw::physics::{self, Nonlinearity};
use nlstw::{Axis, ComplexField, Grid, ReflectionSign, ScalarField};
use num_complex::Complex64;
use proptest::prelude::*;

/// Gaussian perturbation of the vacuum, twisted by `e^{i k (x1 - c1)}`.
#[derive(Clone, Debug)]
pub struct Bump {
    pub amp: Complex64,
    pub c1: f64,
    pub c2: f64,
    pub w: f64,
    pub k: f64,
}

pub fn bump_field(grid: &Grid, bumps: &[Bump]) -> ComplexField {
    ComplexField::from_fn(grid, |x, y| {
        let mut z = Complex64::new(1.0, 0.0);
        for b in bumps {
            let r2 = (x - b.c1).powi(2) + (y - b.c2).powi(2);
            z += b.amp * (-r2 / (b.w * b.w)).exp() * Complex64::from_polar(1.0, b.k * (x - b.c1));
        }
        z
    })
}

/// Trigonometric polynomial with modes `|m1|, |m2| <= 3`.
pub fn trig_field(grid: &Grid, coeffs: &[(i32, i32, f64, f64)]) -> ComplexField {
    let (l1, l2) = (grid.l1(), grid.l2());
    ComplexField::from_fn(grid, |x, y| {
        coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &(m1, m2, a, b)| {
            let ph = std::f64::consts::PI * (m1 as f64 * x / l1 + m2 as f64 * y / l2);
            acc + Complex64::new(a, b) * Complex64::from_polar(1.0, ph)
        })
    })
}

pub fn real_trig_field(grid: &Grid, coeffs: &[(i32, i32, f64, f64)]) -> ScalarField {
    trig_field(grid, coeffs).real_part()
}

pub fn bump_strategy(max_amp: f64, c2: std::ops::Range<f64>, w: std::ops::Range<f64>) -> impl Strategy<Value = Bump> {
    (-max_amp..max_amp, -max_amp..max_amp, -3.0..3.0f64, c2, w, -2.0..2.0f64).prop_map(|(a, b, c1, c2, w, k)| Bump {
        amp: Complex64::new(a, b),
        c1,
        c2,
        w,
        k,
    })
}

pub fn coeff_strategy(max: usize) -> impl Strategy<Value = Vec<(i32, i32, f64, f64)>> {
    prop::collection::vec((-3..=3i32, -3..=3i32, -0.5..0.5f64, -0.5..0.5f64), 1..max)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-14)
}

/// `Q` differences relative to the larger value, floored at `1e-4` of
/// the bound `|Q| <= 2 ||d1 psi|| ||psi - 1||`.
pub fn rel_q(psi: &ComplexField, a: f64, b: f64) -> f64 {
    let d1 = psi.derivative(Axis::X1).norm_l2();
    let dev = psi.map(|z| z - 1.0).norm_l2();
    (a - b).abs() / a.abs().max(b.abs()).max(2e-4 * d1 * dev).max(1e-300)
}

/// Centered-difference error of the `E` gradient at steps `1e-3` and `1e-4`,
/// and the size of the directional derivative.
pub fn energy_fd_errors(psi: &ComplexField, phi: &ComplexField, nl: &Nonlinearity) -> (f64, f64, f64) {
    let exact = physics::grad_e(psi, nl).inner(phi);
    let fd = |t: f64| {
        (physics::energy(&psi.axpy(t, phi), nl) - physics::energy(&psi.axpy(-t, phi), nl)) / (2.0 * t)
    };
    ((fd(1e-3) - exact).abs(), (fd(1e-4) - exact).abs(), exact.abs())
}

/// Same for `Q`, which is quadratic so the centered difference is exact.
pub fn momentum_fd_error(psi: &ComplexField, phi: &ComplexField) -> (f64, f64) {
    let exact = physics::grad_q(psi).inner(phi);
    let t = 1e-3;
    let fd = (physics::momentum(&psi.axpy(t, phi)) - physics::momentum(&psi.axpy(-t, phi))) / (2.0 * t);
    ((fd - exact).abs(), exact.abs())
}

/// `|E(S+) + E(S-) - 2E|` and `|Q(S+) + Q(S-) - 2Q|`, relative.
pub fn reflection_defects(psi: &ComplexField, nl: &Nonlinearity) -> (f64, f64) {
    let p = psi.reflect(ReflectionSign::Plus);
    let m = psi.reflect(ReflectionSign::Minus);
    let e = rel(physics::energy(&p, nl) + physics::energy(&m, nl), 2.0 * physics::energy(psi, nl));
    // relative to the half-plane momenta
    let (qp, qm) = (physics::momentum(&p), physics::momentum(&m));
    let q = rel_q(psi, qp + qm, 2.0 * physics::momentum(psi)) * (qp + qm).abs().max(1e-300)
        / (qp.abs() + qm.abs()).max((qp + qm).abs()).max(1e-300);
    (e, q)
}

/// Relative defects of `Q(psi_{l,s}) = s Q`, `K(psi_{s,s}) = K`, `int V(psi_{s,s}) = s^2 int V`.
pub fn dilation_defects(psi: &ComplexField, nl: &Nonlinearity, l: f64, s: f64) -> [f64; 3] {
    let q = physics::momentum(&psi.dilate(l, s).unwrap());
    let iso = psi.dilate(s, s).unwrap();
    [
        rel_q(psi, q, s * physics::momentum(psi)),
        rel(physics::kinetic(&iso), physics::kinetic(psi)),
        rel(physics::potential_integral(&iso, nl), s * s * physics::potential_integral(psi, nl)),
    ]
}

pub fn parseval_defect(f: &ComplexField) -> f64 {
    let direct = f.modulus_squared().integrate();
    rel(direct, f.spectrum().parseval_integral())
}

/// `int f_j g + int f g_j`, relative to `||f|| ||g_j|| + ||f_j|| ||g||`.
pub fn by_parts_defect(f: &ScalarField, g: &ScalarField, axis: Axis) -> f64 {
    let fj = f.derivative(axis);
    let gj = g.derivative(axis);
    let a = fj.zip_map(g, |x, y| x * y).integrate();
    let b = f.zip_map(&gj, |x, y| x * y).integrate();
    let norm = |u: &ScalarField| u.zip_map(u, |x, y| x * y).integrate().sqrt();
    let scale = norm(f) * norm(&gj) + norm(&fj) * norm(g);
    (a + b).abs() / scale.max(1e-14)
}

pub fn mixed_partial_defect(f: &ScalarField) -> f64 {
    let a = f.derivative(Axis::X1).derivative(Axis::X2);
    let b = f.derivative(Axis::X2).derivative(Axis::X1);
    let diff = a.zip_map(&b, |x, y| x - y).max_abs();
    diff / f.max_abs().max(1e-14)
}

pub fn translation_defect(psi: &ComplexField, nl: &Nonlinearity, c: f64, s1: isize, s2: isize) -> f64 {
    let a = diagnostics::multiplier_relation(psi, nl, c).unwrap().residual;
    let b = diagnostics::multiplier_relation(&psi.roll(s1, s2), nl, c).unwrap().residual;
    rel(a, b)
}
