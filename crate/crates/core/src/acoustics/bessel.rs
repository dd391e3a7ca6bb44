//! Spherical Bessel functions of the first kind.

/// `j_0(x) ..= j_order(x)`.
///
/// Values come from Miller's downward recurrence, scaled to match whichever
/// of the closed forms `j_0`, `j_1` is larger in magnitude. Downward
/// recurrence is stable for every order, including `n > x`.
pub fn spherical_jn(order: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let start = order.max(ax.ceil() as usize) + 20 + (4.0 * ax.cbrt()).ceil() as usize;
    let mut next = 0.0; // j_{n+1}
    let mut cur = 1e-300; // j_n
    let (mut f0, mut f1) = (0.0, 0.0);
    for n in (0..=start).rev() {
        if n <= order {
            out[n] = cur;
        }
        if n == 1 {
            f1 = cur;
        }
        if n == 0 {
            f0 = cur;
            break;
        }
        let prev = (2 * n + 1) as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
            cur *= 1e-250;
            next *= 1e-250;
            f1 *= 1e-250;
        }
    }
    let (j0, j1) = closed_j0_j1(x);
    let scale = if j0.abs() >= j1.abs() {
        j0 / f0
    } else {
        j1 / f1
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

fn closed_j0_j1(x: f64) -> (f64, f64) {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        (
            1.0 - x2 / 6.0 + x2 * x2 / 120.0,
            x / 3.0 * (1.0 - x2 / 10.0),
        )
    } else {
        let (s, c) = x.sin_cos();
        (s / x, s / (x * x) - c / x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j2(x: f64) -> f64 {
        (3.0 / (x * x) - 1.0) * x.sin() / x - 3.0 * x.cos() / (x * x)
    }

    #[test]
    fn zero_argument() {
        assert_eq!(spherical_jn(3, 0.0), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn closed_forms() {
        for &x in &[0.3, 1.0, 2.5, std::f64::consts::PI, 7.0, 20.0] {
            let j = spherical_jn(2, x);
            let (j0, j1) = closed_j0_j1(x);
            assert!((j[0] - j0).abs() < 1e-15, "{x}");
            assert!((j[1] - j1).abs() < 1e-15, "{x}");
            assert!((j[2] - j2(x)).abs() < 1e-14, "{x}");
        }
    }

    #[test]
    fn sum_rule() {
        for &x in &[0.01, 0.7, 5.0, 40.0, 150.0] {
            let j = spherical_jn(x as usize + 40, x);
            let s: f64 = j
                .iter()
                .enumerate()
                .map(|(n, v)| (2 * n + 1) as f64 * v * v)
                .sum();
            assert!((s - 1.0).abs() < 1e-12, "{x}: {s}");
        }
    }

    #[test]
    fn high_orders_at_small_argument() {
        // leading term x^n / (2n+1)!!
        let x = 1e-3;
        let j = spherical_jn(6, x);
        let mut dfact = 1.0;
        for n in 1..=6 {
            dfact *= (2 * n + 1) as f64;
            let lead = x.powi(n as i32) / dfact;
            assert!((j[n] / lead - 1.0).abs() < 1e-5, "{n}");
        }
    }

    #[test]
    fn upward_recurrence_where_stable() {
        let x = 30.0;
        let j = spherical_jn(20, x);
        let (mut a, mut b) = closed_j0_j1(x);
        for n in 1..20 {
            let c = (2 * n + 1) as f64 / x * b - a;
            a = b;
            b = c;
            assert!((j[n + 1] - b).abs() < 1e-13, "{n}");
        }
    }
}
