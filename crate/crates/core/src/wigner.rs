//! Factorials and Wigner 3-j symbols by Racah's formula.
//!
//! The exact path evaluates the whole symbol in arbitrary-precision rational
//! arithmetic and converts to `f64` once, at the end. The fast path sums the
//! same series in floating point using logarithms of factorials.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Which factorial arithmetic the 3-j evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FactorialPath {
    #[default]
    Exact,
    Fast,
}

/// `n!` exactly.
pub fn factorial_exact(n: u32) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

// covers 3-j symbols with order sums up to 255, well past order-30 tables
const CACHED_FACTORIALS: usize = 256;

fn cached_factorial(n: u32) -> BigInt {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(CACHED_FACTORIALS);
        let mut f = BigInt::one();
        t.push(f.clone());
        for k in 1..CACHED_FACTORIALS {
            f *= k;
            t.push(f.clone());
        }
        t
    });
    match table.get(n as usize) {
        Some(f) => f.clone(),
        None => BigInt::from(factorial_exact(n)),
    }
}

const SMALL_LN_FACTORIAL: usize = 16;

/// `ln(n!)`. Small arguments use the exact integer; larger ones use the
/// Stirling series with corrections through `n^-7`.
pub fn log_factorial(n: u32) -> f64 {
    if (n as usize) < SMALL_LN_FACTORIAL {
        let f: u64 = (2..=n as u64).product();
        return (f as f64).ln();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// Arguments of a 3-j symbol `(n1 n2 n3; m1 m2 m3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wigner3jArgs {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub m1: i32,
    pub m2: i32,
    pub m3: i32,
}

impl Wigner3jArgs {
    pub fn new(n1: u32, n2: u32, n3: u32, m1: i32, m2: i32, m3: i32) -> Self {
        Wigner3jArgs {
            n1,
            n2,
            n3,
            m1,
            m2,
            m3,
        }
    }

    /// True when the symbol vanishes by the selection rules alone: a degree
    /// larger than its order, nonzero degree sum, triangle violation, or the
    /// all-zero-degree row with odd order sum.
    pub fn is_structural_zero(&self) -> bool {
        let (j1, j2, j3) = (self.n1 as i64, self.n2 as i64, self.n3 as i64);
        if self.m1.unsigned_abs() > self.n1
            || self.m2.unsigned_abs() > self.n2
            || self.m3.unsigned_abs() > self.n3
        {
            return true;
        }
        if self.m1 as i64 + self.m2 as i64 + self.m3 as i64 != 0 {
            return true;
        }
        if j3 < (j1 - j2).abs() || j3 > j1 + j2 {
            return true;
        }
        self.m1 == 0 && self.m2 == 0 && self.m3 == 0 && (j1 + j2 + j3) % 2 == 1
    }
}

/// Integer quantities of Racah's series shared by both paths.
struct RacahTerms {
    /// Factorial arguments under the square root: numerator and denominator.
    sqrt_num: [u32; 9],
    sqrt_den: u32,
    /// Summation range and the linear forms of the six denominator factorials.
    k_min: i64,
    k_max: i64,
    a: [i64; 5],
    phase_odd: bool,
}

impl RacahTerms {
    fn new(w: &Wigner3jArgs) -> Self {
        let (j1, j2, j3) = (w.n1 as i64, w.n2 as i64, w.n3 as i64);
        let (m1, m2, m3) = (w.m1 as i64, w.m2 as i64, w.m3 as i64);
        let u = |v: i64| -> u32 {
            debug_assert!(v >= 0);
            v as u32
        };
        let sqrt_num = [
            u(j1 + j2 - j3),
            u(j1 - j2 + j3),
            u(-j1 + j2 + j3),
            u(j1 + m1),
            u(j1 - m1),
            u(j2 + m2),
            u(j2 - m2),
            u(j3 + m3),
            u(j3 - m3),
        ];
        let sqrt_den = u(j1 + j2 + j3 + 1);
        // denominators: k!, (j1+j2-j3-k)!, (j1-m1-k)!, (j2+m2-k)!,
        // (j3-j2+m1+k)!, (j3-j1-m2+k)!
        let k_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
        let k_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
        RacahTerms {
            sqrt_num,
            sqrt_den,
            k_min,
            k_max,
            a: [j1 + j2 - j3, j1 - m1, j2 + m2, j3 - j2 + m1, j3 - j1 - m2],
            phase_odd: (j1 - j2 - m3).rem_euclid(2) == 1,
        }
    }

    fn denominators(&self, k: i64) -> [u32; 6] {
        [
            k as u32,
            (self.a[0] - k) as u32,
            (self.a[1] - k) as u32,
            (self.a[2] - k) as u32,
            (self.a[3] + k) as u32,
            (self.a[4] + k) as u32,
        ]
    }
}

/// Wigner 3-j symbol. Invalid or selection-rule-violating arguments give 0.
pub fn wigner3j(args: Wigner3jArgs) -> f64 {
    wigner3j_with(args, FactorialPath::Exact)
}

pub fn wigner3j_with(args: Wigner3jArgs, path: FactorialPath) -> f64 {
    if args.is_structural_zero() {
        return 0.0;
    }
    // (j; -m) = (-1)^(j1+j2+j3) (j; m): evaluate one representative so both
    // signs of m round identically on the fast path
    let flip = args.m1 < 0 || (args.m1 == 0 && args.m2 < 0);
    let args = if flip {
        Wigner3jArgs::new(args.n1, args.n2, args.n3, -args.m1, -args.m2, -args.m3)
    } else {
        args
    };
    let terms = RacahTerms::new(&args);
    let v = match path {
        FactorialPath::Exact => wigner3j_exact(&terms),
        FactorialPath::Fast => wigner3j_fast(&terms),
    };
    if flip && (args.n1 + args.n2 + args.n3) % 2 == 1 {
        -v
    } else {
        v
    }
}

fn wigner3j_exact(t: &RacahTerms) -> f64 {
    let fact = cached_factorial;

    // sum_k (-1)^k / prod(denominators), accumulated over a running
    // common denominator and reduced once
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for k in t.k_min..=t.k_max {
        let d: BigInt = t.denominators(k).iter().map(|&v| fact(v)).product();
        let term_sign = if k % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        num = num * &d + term_sign * &den;
        den *= d;
    }
    if num.is_zero() {
        return 0.0;
    }
    let series_negative = num.is_negative() != den.is_negative();

    let sqrt_num: BigInt = t.sqrt_num.iter().map(|&v| fact(v)).product();
    let sqrt_den = fact(t.sqrt_den);
    let squared = BigRational::new(sqrt_num * &num * &num, sqrt_den * &den * &den);
    let magnitude = squared.to_f64().expect("3-j magnitude is finite").sqrt();
    if series_negative != t.phase_odd {
        -magnitude
    } else {
        magnitude
    }
}

fn wigner3j_fast(t: &RacahTerms) -> f64 {
    let half_log_prefactor = 0.5
        * (t.sqrt_num.iter().map(|&v| log_factorial(v)).sum::<f64>() - log_factorial(t.sqrt_den));
    let mut sum = 0.0;
    for k in t.k_min..=t.k_max {
        let log_den: f64 = t.denominators(k).iter().map(|&v| log_factorial(v)).sum();
        let term = (half_log_prefactor - log_den).exp();
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if t.phase_odd {
        -sum
    } else {
        sum
    }
}
