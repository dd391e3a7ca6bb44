//! Quadrature helpers shared by `verify` and `demo`.

use std::f64::consts::PI;

use gaunt_core::quadrature::QuadratureGrid;
use gaunt_core::sh::{coeff_count, order_of_len, real_sh_vector, Direction};
use gaunt_core::Basis;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;

pub type C = Complex64;

pub fn random_coeffs(order: usize, rng: &mut StdRng) -> Vec<C> {
    (0..coeff_count(order))
        .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn random_dir(rng: &mut StdRng) -> Direction {
    let z: f64 = rng.gen_range(-1.0..1.0);
    Direction::new(z.acos(), rng.gen_range(0.0..2.0 * PI)).expect("acos lies in [0, pi]")
}

/// `sum v_q R_q(u)`.
pub fn synth(v: &[C], u: &Direction) -> C {
    let order = order_of_len(v.len()).expect("square coefficient count");
    real_sh_vector(order, u)
        .iter()
        .zip(v)
        .map(|(r, a)| a * r)
        .sum()
}

pub fn plane(k: f64, u: &Direction, x: [f64; 3]) -> C {
    let v = u.unit_vector();
    C::from_polar(1.0, k * (v[0] * x[0] + v[1] * x[1] + v[2] * x[2]))
}

/// Real-basis projection of a sampled function.
pub fn project(grid: &QuadratureGrid, order: usize, f: impl Fn(&Direction) -> C) -> Vec<C> {
    let samples = grid.sample(f);
    grid.forward_sht(&samples, Basis::Real, order)
}

/// `int f(u) r(u) r(u)^T du` over the real basis of `order`.
pub fn weighted_gram(
    grid: &QuadratureGrid,
    order: usize,
    f: impl Fn(&Direction) -> C,
) -> DMatrix<C> {
    let size = coeff_count(order);
    let mut s = DMatrix::zeros(size, size);
    for (u, w) in grid.nodes().iter().zip(grid.weights()) {
        let r = real_sh_vector(order, u);
        let fw = f(u) * *w;
        for j in 0..size {
            for i in 0..size {
                s[(i, j)] += fw * (r[i] * r[j]);
            }
        }
    }
    s
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_diff_mat(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Angle between two vectors, stable near zero.
pub fn angle(a: [f64; 3], b: [f64; 3]) -> f64 {
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    norm3(cross).atan2(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
}
