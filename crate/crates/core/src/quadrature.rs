//! Product quadrature on the sphere and the spherical harmonic transform.
//!
//! Gauss-Legendre nodes in `cos(theta)` times equispaced azimuths. A grid
//! built for `max_band = B` integrates every spherical polynomial of degree
//! `<= B` exactly, so products of three order-`N` harmonics need `B >= 3N`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::basis::{CoeffVector, ConjugationMap};
use crate::error::{Error, Result};
use crate::sh::{coeff_count, complex_sh_vector, real_sh_vector, Direction};
use crate::Basis;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let n = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(count, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(count, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Compensated (Neumaier) accumulator, so grid sums do not depend on
/// anything but node order.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ComplexAccumulator {
    re: Accumulator,
    im: Accumulator,
}

impl ComplexAccumulator {
    fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    nodes: Vec<Direction>,
    weights: Vec<f64>,
    degree: usize,
}

impl QuadratureGrid {
    /// Grid exact for spherical polynomials of degree `<= max_band`.
    pub fn new(max_band: usize) -> Self {
        let rings = (max_band + 1).div_ceil(2);
        let azimuths = max_band + 1;
        let (xs, ws) = gauss_legendre(rings);
        let dphi = 2.0 * PI / azimuths as f64;
        let mut nodes = Vec::with_capacity(rings * azimuths);
        let mut weights = Vec::with_capacity(rings * azimuths);
        for (x, w) in xs.iter().zip(&ws) {
            let theta = x.clamp(-1.0, 1.0).acos();
            for j in 0..azimuths {
                nodes.push(Direction::new(theta, j as f64 * dphi).expect("theta from acos"));
                weights.push(w * dphi);
            }
        }
        QuadratureGrid {
            nodes,
            weights,
            degree: max_band,
        }
    }

    pub fn nodes(&self) -> &[Direction] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn require_degree(&self, required: usize) -> Result<()> {
        if self.degree < required {
            return Err(Error::UnderResolvedGrid {
                degree: self.degree,
                required,
            });
        }
        Ok(())
    }

    pub fn sample<T, F: FnMut(&Direction) -> T>(&self, f: F) -> Vec<T> {
        self.nodes.iter().map(f).collect()
    }

    /// Weighted sum of samples.
    pub fn integrate(&self, samples: &[Complex64]) -> Complex64 {
        assert_eq!(samples.len(), self.len());
        let mut acc = ComplexAccumulator::default();
        for (s, w) in samples.iter().zip(&self.weights) {
            acc.add(s * w);
        }
        acc.value()
    }

    pub fn integrate_real(&self, samples: &[f64]) -> f64 {
        assert_eq!(samples.len(), self.len());
        let mut acc = Accumulator::default();
        for (s, w) in samples.iter().zip(&self.weights) {
            acc.add(s * w);
        }
        acc.value()
    }

    /// Integrates `f` directly, without materialising samples.
    pub fn integrate_fn<F: FnMut(&Direction) -> Complex64>(&self, mut f: F) -> Complex64 {
        let mut acc = ComplexAccumulator::default();
        for (d, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(f(d) * *w);
        }
        acc.value()
    }

    /// Projection of sampled values onto the harmonics up to `order`:
    /// conjugated complex harmonics or real harmonics. Exact when the
    /// function is band-limited to `B` and `degree >= B + order`; otherwise
    /// the result is aliased.
    pub fn forward_sht(&self, samples: &[Complex64], basis: Basis, order: usize) -> Vec<Complex64> {
        assert_eq!(samples.len(), self.len());
        let mut acc = vec![ComplexAccumulator::default(); coeff_count(order)];
        for ((d, w), s) in self.nodes.iter().zip(&self.weights).zip(samples) {
            let ws = s * *w;
            match basis {
                Basis::Complex => {
                    for (a, y) in acc.iter_mut().zip(complex_sh_vector(order, d)) {
                        a.add(ws * y.conj());
                    }
                }
                Basis::Real => {
                    for (a, r) in acc.iter_mut().zip(real_sh_vector(order, d)) {
                        a.add(ws * r);
                    }
                }
            }
        }
        acc.iter().map(ComplexAccumulator::value).collect()
    }

    /// Real-basis transform of a real-valued function.
    pub fn forward_sht_real(&self, samples: &[f64], order: usize) -> CoeffVector {
        let widened: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let data = self
            .forward_sht(&widened, Basis::Real, order)
            .into_iter()
            .map(|c| c.re)
            .collect();
        CoeffVector::real(data).expect("square length")
    }

    pub fn forward_sht_complex(&self, samples: &[Complex64], order: usize) -> CoeffVector {
        CoeffVector::complex(self.forward_sht(samples, Basis::Complex, order))
            .expect("square length")
    }
}

/// Synthesis `f(u) = f^T y_N(u)` or `f_hat^T r_N(u)` at each direction.
pub fn inverse_sht(v: &CoeffVector, dirs: &[Direction]) -> Vec<Complex64> {
    dirs.iter()
        .map(|d| match v {
            CoeffVector::Complex { order, data } => complex_sh_vector(*order, d)
                .iter()
                .zip(data)
                .map(|(y, c)| y * c)
                .sum(),
            CoeffVector::Real { order, data } => Complex64::new(
                real_sh_vector(*order, d)
                    .iter()
                    .zip(data)
                    .map(|(r, c)| r * c)
                    .sum(),
                0.0,
            ),
        })
        .collect()
}

/// Synthesis of a complex-valued function from real-basis coefficients.
pub fn synthesize_real_basis(coeffs: &[Complex64], dir: &Direction) -> Complex64 {
    let order = crate::sh::order_of_len(coeffs.len()).expect("square length");
    real_sh_vector(order, dir)
        .iter()
        .zip(coeffs)
        .map(|(r, c)| c * r)
        .sum()
}

/// `int f^* g` and `int f g` over the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerProducts {
    pub hermitian: Complex64,
    pub plain: Complex64,
}

/// Both inner products from coefficients alone: `f^H g` and, for the
/// complex basis, `f^T T_N g` (real basis: `f^T g`).
pub fn inner_products(f: &CoeffVector, g: &CoeffVector) -> Result<InnerProducts> {
    if f.basis() != g.basis() {
        return Err(Error::BasisMismatch {
            expected: f.basis(),
            found: g.basis(),
        });
    }
    if f.order() != g.order() {
        return Err(Error::OrderMismatch {
            left: f.order(),
            right: g.order(),
        });
    }
    let fv = f.to_complex_vec();
    let gv = g.to_complex_vec();
    let hermitian = fv.iter().zip(&gv).map(|(a, b)| a.conj() * b).sum();
    let plain = match f.basis() {
        Basis::Real => fv.iter().zip(&gv).map(|(a, b)| a * b).sum(),
        Basis::Complex => {
            let tg = ConjugationMap::new(g.order()).apply(&gv);
            fv.iter().zip(&tg).map(|(a, b)| a * b).sum()
        }
    };
    Ok(InnerProducts { hermitian, plain })
}
