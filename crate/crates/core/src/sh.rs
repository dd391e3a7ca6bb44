//! Associated Legendre functions and spherical harmonics.
//!
//! Conventions: complex harmonics `Y_{n,m}` carry the Condon-Shortley phase
//! `(-1)^m`; real harmonics `R_{n,m}` do not, and use `sqrt(2) cos(m phi)` for
//! `m > 0` and `sqrt(2) sin(|m| phi)` for `m < 0`. Both are orthonormal (N3D).
//! Vectors of harmonics are stacked in ACN order, `q = n^2 + n + m`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::Basis;

/// A point on the unit sphere: inclination `theta` from +z and azimuth `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// Fails when `theta` lies outside `[0, pi]`; `phi` is wrapped to `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidInclination { theta });
        }
        Ok(Direction {
            theta,
            phi: wrap_azimuth(phi),
        })
    }

    /// Direction of a Cartesian vector. The zero vector maps to +z.
    pub fn from_cartesian(v: [f64; 3]) -> Self {
        let rho = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if rho == 0.0 {
            return Direction {
                theta: 0.0,
                phi: 0.0,
            };
        }
        let theta = (v[2] / rho).clamp(-1.0, 1.0).acos();
        let phi = wrap_azimuth(v[1].atan2(v[0]));
        Direction { theta, phi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// The antipodal direction.
    pub fn opposite(&self) -> Self {
        Direction {
            theta: PI - self.theta,
            phi: wrap_azimuth(self.phi + PI),
        }
    }
}

fn wrap_azimuth(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    // rem_euclid can round up to exactly 2 pi for tiny negative inputs
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Order `n` and degree `m` of a harmonic, `|m| <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShIndex {
    pub n: u32,
    pub m: i32,
}

impl ShIndex {
    pub fn new(n: u32, m: i32) -> Option<Self> {
        (m.unsigned_abs() <= n).then_some(ShIndex { n, m })
    }

    /// 0-based ACN channel number.
    pub fn acn(&self) -> usize {
        let n = self.n as i64;
        (n * n + n + self.m as i64) as usize
    }

    pub fn from_acn(q: usize) -> Self {
        let n = q.isqrt();
        ShIndex {
            n: n as u32,
            m: (q - n * n) as i32 - n as i32,
        }
    }
}

/// Number of coefficients of an order-`order` expansion, `(order + 1)^2`.
pub fn coeff_count(order: usize) -> usize {
    (order + 1) * (order + 1)
}

/// Recovers the order from a coefficient count, if it is a perfect square.
pub fn order_of_len(len: usize) -> Option<usize> {
    let r = len.isqrt();
    (r * r == len && r > 0).then(|| r - 1)
}

/// Iterator over all indices up to `order`, in ACN order.
pub fn indices(order: usize) -> impl Iterator<Item = ShIndex> {
    (0..coeff_count(order)).map(ShIndex::from_acn)
}

/// Unnormalised associated Legendre function `P_{n,m}(x)` without the
/// Condon-Shortley phase, via the three-term recursion in `n`.
pub fn assoc_legendre(n: u32, m: u32, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::LegendreDomain { x });
    }
    assert!(m <= n, "assoc_legendre requires m <= n (m={m}, n={n})");
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    // P_{m,m} = (2m-1)!! s^m
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64 * s;
    }
    if n == m {
        return Ok(pmm);
    }
    let mut prev = pmm;
    let mut cur = x * (2 * m + 1) as f64 * pmm;
    for l in (m + 2)..=n {
        let next = ((2 * l - 1) as f64 * x * cur - (l + m - 1) as f64 * prev) / (l - m) as f64;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Table of the normalised functions
/// `Theta_{n,m}(x) = sqrt((2n+1)(n-m)! / (4 pi (n+m)!)) P_{n,m}(x)` for
/// `0 <= m <= n <= order`, stored at `n (n + 1) / 2 + m`.
#[derive(Debug, Clone)]
pub struct NormalizedLegendre {
    order: usize,
    values: Vec<f64>,
}

impl NormalizedLegendre {
    pub fn new(order: usize, x: f64) -> Self {
        let x = x.clamp(-1.0, 1.0);
        let s = ((1.0 - x) * (1.0 + x)).sqrt();
        let mut values = vec![0.0; (order + 1) * (order + 2) / 2];
        let at = |n: usize, m: usize| n * (n + 1) / 2 + m;

        let mut diag = 1.0 / (4.0 * PI).sqrt();
        for m in 0..=order {
            if m > 0 {
                diag *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
            }
            values[at(m, m)] = diag;
            if m < order {
                values[at(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * diag;
            }
            for n in (m + 2)..=order {
                let nf = n as f64;
                let mf = m as f64;
                let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
                let b = (((nf - 1.0) * (nf - 1.0) - mf * mf)
                    / (4.0 * (nf - 1.0) * (nf - 1.0) - 1.0))
                    .sqrt();
                values[at(n, m)] = a * (x * values[at(n - 1, m)] - b * values[at(n - 2, m)]);
            }
        }
        NormalizedLegendre { order, values }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        debug_assert!(m <= n && n <= self.order);
        self.values[n * (n + 1) / 2 + m]
    }
}

fn sign(m: i32) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Complex spherical harmonic `Y_{n,m}(theta, phi)`.
pub fn sh_complex(idx: ShIndex, dir: &Direction) -> Complex64 {
    let leg = NormalizedLegendre::new(idx.n as usize, dir.theta.cos());
    complex_from_table(&leg, idx, dir.phi)
}

fn complex_from_table(leg: &NormalizedLegendre, idx: ShIndex, phi: f64) -> Complex64 {
    let am = idx.m.unsigned_abs() as usize;
    let theta_part = leg.get(idx.n as usize, am);
    let e = Complex64::from_polar(1.0, idx.m as f64 * phi);
    // negative degrees follow from Y*_{n,m} = (-1)^m Y_{n,-m}
    let phase = if idx.m >= 0 { sign(idx.m) } else { 1.0 };
    e * (phase * theta_part)
}

/// Real spherical harmonic `R_{n,m}(theta, phi)`.
pub fn sh_real(idx: ShIndex, dir: &Direction) -> f64 {
    let leg = NormalizedLegendre::new(idx.n as usize, dir.theta.cos());
    real_from_table(&leg, idx, dir.phi)
}

fn azimuth_factor(m: i32, phi: f64) -> f64 {
    match m {
        0 => 1.0,
        m if m > 0 => SQRT_2 * (m as f64 * phi).cos(),
        m => SQRT_2 * ((-m) as f64 * phi).sin(),
    }
}

fn real_from_table(leg: &NormalizedLegendre, idx: ShIndex, phi: f64) -> f64 {
    let am = idx.m.unsigned_abs() as usize;
    leg.get(idx.n as usize, am) * azimuth_factor(idx.m, phi)
}

/// All real harmonics up to `order`, ACN-ordered.
pub fn real_sh_vector(order: usize, dir: &Direction) -> Vec<f64> {
    let leg = NormalizedLegendre::new(order, dir.theta.cos());
    indices(order)
        .map(|idx| real_from_table(&leg, idx, dir.phi))
        .collect()
}

/// All complex harmonics up to `order`, ACN-ordered.
pub fn complex_sh_vector(order: usize, dir: &Direction) -> Vec<Complex64> {
    let leg = NormalizedLegendre::new(order, dir.theta.cos());
    indices(order)
        .map(|idx| complex_from_table(&leg, idx, dir.phi))
        .collect()
}

/// Harmonic vector in either basis; real values are returned with zero
/// imaginary part.
pub fn sh_vector(basis: Basis, order: usize, dir: &Direction) -> Vec<Complex64> {
    match basis {
        Basis::Complex => complex_sh_vector(order, dir),
        Basis::Real => real_sh_vector(order, dir)
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect(),
    }
}
