use std::f64::consts::PI;

use gaunt_core::acoustics::*;
use gaunt_core::gaunt::build_table;
use gaunt_core::quadrature::QuadratureGrid;
use gaunt_core::sh::{coeff_count, real_sh_vector, Direction};
use gaunt_core::Basis;
use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn random_coeffs(order: usize, rng: &mut StdRng) -> Vec<C> {
    (0..coeff_count(order))
        .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn random_real(order: usize, rng: &mut StdRng) -> Vec<C> {
    (0..coeff_count(order))
        .map(|_| c(rng.gen_range(-1.0..1.0)))
        .collect()
}

fn random_dir(rng: &mut StdRng) -> Direction {
    let z: f64 = rng.gen_range(-1.0..1.0);
    Direction::new(z.acos(), rng.gen_range(0.0..2.0 * PI)).unwrap()
}

fn random_rotation(rng: &mut StdRng) -> Matrix3<f64> {
    let axis = random_dir(rng).unit_vector();
    axis_angle(axis, rng.gen_range(0.0..2.0 * PI))
}

/// `sum v_q R_q(u)`.
fn synth(v: &[C], u: &Direction) -> C {
    let order = gaunt_core::sh::order_of_len(v.len()).unwrap();
    real_sh_vector(order, u)
        .iter()
        .zip(v)
        .map(|(r, a)| a * r)
        .sum()
}

fn dot(u: [f64; 3], x: [f64; 3]) -> f64 {
    u[0] * x[0] + u[1] * x[1] + u[2] * x[2]
}

fn plane(k: f64, u: &Direction, x: [f64; 3]) -> C {
    C::from_polar(1.0, k * dot(u.unit_vector(), x))
}

/// Real-basis projection of a sampled function up to `order`.
fn project(grid: &QuadratureGrid, order: usize, f: impl Fn(&Direction) -> C) -> Vec<C> {
    let samples = grid.sample(f);
    grid.forward_sht(&samples, Basis::Real, order)
}

fn max_diff(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn max_diff_mat(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn angle(a: [f64; 3], b: [f64; 3]) -> f64 {
    let (va, vb) = (Vector3::from(a), Vector3::from(b));
    va.cross(&vb).norm().atan2(va.dot(&vb))
}

// plane waves and translation

#[test]
fn plane_wave_expansion_kd1_order4() {
    // the worst case sits at u parallel to x, led by 11 j_5(1) ~ 1.0e-3
    let bound = expansion_tail_bound(1.0, 4);
    assert!(bound <= 1.2e-3);
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let u = random_dir(&mut r);
        let x = random_dir(&mut r).unit_vector();
        let (ru, jr) = plane_wave_coeffs(&u, 1.0, x, 4);
        let approx: C = ru.iter().zip(&jr).map(|(a, b)| b * a).sum();
        worst = worst.max((approx - plane(1.0, &u, x)).norm());
    }
    assert!(worst <= bound);
    let (ru, jr) = plane_wave_coeffs(&Direction::new(0.0, 0.0).unwrap(), 1.0, [0.0, 0.0, 1.0], 4);
    let aligned: C = ru.iter().zip(&jr).map(|(a, b)| b * a).sum();
    assert!((aligned - C::from_polar(1.0, 1.0)).norm() >= 0.9 * bound);
    // two more orders bring the same geometry below 1e-4
    assert!(expansion_tail_bound(1.0, 6) <= 1e-4);
}

#[test]
fn default_truncation_secures_1e4_up_to_kd5() {
    let mut r = rng(2);
    for kd in [0.1, 0.5, 1.0, 2.0, 3.5, 5.0] {
        let order = default_expansion_order(kd);
        assert!(order >= truncation_order(kd) + 2);
        for _ in 0..30 {
            let u = random_dir(&mut r);
            let x = random_dir(&mut r).unit_vector().map(|v| v * kd);
            let (ru, jr) = plane_wave_coeffs(&u, 1.0, x, order);
            let approx: C = ru.iter().zip(&jr).map(|(a, b)| b * a).sum();
            assert!((approx - plane(1.0, &u, x)).norm() <= 1e-4, "kd={kd}");
        }
    }
}

#[test]
fn translate_by_zero_pads() {
    let t = build_table(Basis::Real, 3, 4).unwrap();
    let a = random_coeffs(3, &mut rng(3));
    let out = translate_coeffs(&a, 2.0, [0.0; 3], 4, &t).unwrap();
    assert_eq!(out.len(), 64);
    assert!(max_diff(&out[..16], &a) <= 1e-14);
    assert!(out[16..].iter().all(|z| z.norm() <= 1e-14));
}

#[test]
fn translate_matches_quadrature() {
    let mut r = rng(4);
    let t = build_table(Basis::Real, 3, 8).unwrap();
    let grid = QuadratureGrid::new(40);
    let a = random_coeffs(3, &mut r);
    let x = random_dir(&mut r).unit_vector();
    let k = 1.0;
    let got = translate_coeffs(&a, k, x, 8, &t).unwrap();
    let want = project(&grid, 11, |u| synth(&a, u) * plane(k, u, x));
    assert!(max_diff(&got, &want) <= 1e-6, "{}", max_diff(&got, &want));
}

#[test]
fn translate_round_trip() {
    let mut r = rng(5);
    let n = 3;
    let exp = n + 6;
    let t = build_table(Basis::Real, n + exp, exp).unwrap();
    let a = random_coeffs(n, &mut r);
    let x = random_dir(&mut r).unit_vector().map(|v| v * 0.5);
    let there = translate_coeffs(&a, 1.0, x, exp, &t).unwrap();
    let back = translate_coeffs(&there, 1.0, x.map(|v| -v), exp, &t).unwrap();
    let err: f64 = a
        .iter()
        .zip(&back)
        .map(|(p, q)| (p - q).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let norm: f64 = a.iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt();
    assert!(err / norm <= 1e-4, "{}", err / norm);
}

#[test]
fn translate_is_linear() {
    let mut r = rng(6);
    let t = build_table(Basis::Real, 2, 3).unwrap();
    let a = random_coeffs(2, &mut r);
    let b = random_coeffs(2, &mut r);
    let s: Vec<C> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
    let x = [0.1, 0.2, -0.3];
    let ta = translate_coeffs(&a, 2.0, x, 3, &t).unwrap();
    let tb = translate_coeffs(&b, 2.0, x, 3, &t).unwrap();
    let ts = translate_coeffs(&s, 2.0, x, 3, &t).unwrap();
    let sum: Vec<C> = ta.iter().zip(&tb).map(|(p, q)| p + q).collect();
    assert!(max_diff(&ts, &sum) <= 1e-14);
}

// pressure, velocity, intensity

#[test]
fn pressure_at_origin() {
    let a = random_coeffs(2, &mut rng(7));
    let p = pressure_at(&a, 3.0, [0.0; 3]).unwrap();
    assert!((p - a[0] * (4.0 * PI).sqrt()).norm() <= 1e-14);
}

#[test]
fn pressure_matches_quadrature() {
    let mut r = rng(8);
    let grid = QuadratureGrid::new(40);
    for n in 0..=3 {
        let a = random_coeffs(n, &mut r);
        let x = random_dir(&mut r).unit_vector().map(|v| v * 0.3);
        let k = 4.0;
        let got = pressure_at(&a, k, x).unwrap();
        let want = grid.integrate_fn(|u| synth(&a, u) * plane(k, u, x));
        assert!((got - want).norm() <= 1e-8);
    }
}

#[test]
fn plane_wave_pressure_converges() {
    let u0 = Direction::new(1.0, 0.5).unwrap();
    let x = [0.2, -0.1, 0.15];
    let k = 10.0;
    let want = plane(k, &u0, x);
    let errs: Vec<f64> = [2, 5, 10, 20]
        .iter()
        .map(|&n| {
            let a: Vec<C> = real_sh_vector(n, &u0).into_iter().map(c).collect();
            (pressure_at(&a, k, x).unwrap() - want).norm()
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[3] <= 1e-10);
}

#[test]
fn intensity_of_silence() {
    let t = build_table(Basis::Real, 2, 3).unwrap();
    let a = vec![c(0.0); 9];
    let i = intensity_at(&a, 1.0, [0.1, 0.0, 0.0], 3, Medium::default(), &t).unwrap();
    assert!(i.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn plane_wave_intensity_points_downstream() {
    let mut r = rng(9);
    let n = 6;
    let t = build_table(Basis::Real, n, 2).unwrap();
    for _ in 0..5 {
        let u0 = random_dir(&mut r);
        let a: Vec<C> = real_sh_vector(n, &u0).into_iter().map(c).collect();
        let i = intensity_at(&a, 1.0, [0.0; 3], 2, Medium::default(), &t).unwrap();
        let re = i.map(|z| z.re);
        let minus_u0 = u0.unit_vector().map(|v| -v);
        assert!(angle(re, minus_u0) <= 1e-6);
    }
}

#[test]
fn intensity_matches_quadrature() {
    let mut r = rng(10);
    let grid = QuadratureGrid::new(40);
    let t = build_table(Basis::Real, 2, 4).unwrap();
    let medium = Medium::default();
    let a = random_coeffs(2, &mut r);
    let x = random_dir(&mut r).unit_vector().map(|v| v * 0.4);
    let k = 2.0;
    let got = intensity_at(&a, k, x, 4, medium, &t).unwrap();
    let p = grid.integrate_fn(|u| synth(&a, u) * plane(k, u, x));
    let scale = -1.0 / (medium.sound_speed * medium.density);
    for (axis, g) in got.iter().enumerate() {
        let v =
            grid.integrate_fn(|u| synth(&a, u) * plane(k, u, x) * u.unit_vector()[axis]) * scale;
        let want = 0.5 * p.conj() * v;
        assert!(
            (g - want).norm() <= 1e-8 * want.norm().max(1e-3),
            "{axis}: {g} vs {want}"
        );
    }
}

// energy vector

#[test]
fn isotropic_energy_vector_vanishes() {
    let t = build_table(Basis::Real, 2, 2).unwrap();
    let mut a = vec![c(0.0); 9];
    a[0] = C::new(0.3, -0.2);
    assert_eq!(energy_vector(&a, &t).unwrap(), [0.0; 3]);
    assert!(matches!(
        energy_vector(&[c(0.0); 9], &t),
        Err(gaunt_core::Error::ZeroEnergy)
    ));
}

#[test]
fn plane_wave_energy_vector_aligns() {
    let mut r = rng(11);
    let t = build_table(Basis::Real, 4, 4).unwrap();
    for _ in 0..10 {
        let u0 = random_dir(&mut r);
        let a: Vec<C> = real_sh_vector(4, &u0).into_iter().map(c).collect();
        let e = energy_vector(&a, &t).unwrap();
        assert!(angle(e, u0.unit_vector()) <= 1e-9);
        assert!(dot(e, e).sqrt() < 1.0);
    }
}

#[test]
fn energy_vector_matches_quadrature() {
    let mut r = rng(12);
    let t = build_table(Basis::Real, 3, 3).unwrap();
    let grid = QuadratureGrid::new(8);
    let a = random_coeffs(3, &mut r);
    let e = energy_vector(&a, &t).unwrap();
    let total = grid.integrate_fn(|u| c(synth(&a, u).norm_sqr())).re;
    for (axis, v) in e.iter().enumerate() {
        let want = grid
            .integrate_fn(|u| c(synth(&a, u).norm_sqr() * u.unit_vector()[axis]))
            .re
            / total;
        assert!((v - want).abs() <= 1e-10);
    }
}

#[test]
fn energy_vector_rotation_equivariance() {
    let mut r = rng(13);
    let t = build_table(Basis::Real, 3, 3).unwrap();
    for _ in 0..5 {
        let a = random_coeffs(3, &mut r);
        let rot = random_rotation(&mut r);
        let m = sh_rotation_matrix(&rot, 3).unwrap();
        // a'(u) = a(R^T u) has coefficients M(R^T)^T a = M(R) a
        let rotated = m.apply(&a);
        let e = Vector3::from(energy_vector(&a, &t).unwrap());
        let er = Vector3::from(energy_vector(&rotated, &t).unwrap());
        assert!((rot * e - er).abs().max() <= 1e-10);
    }
}

// windowing and binaural beamforming

#[test]
fn window_matches_quadrature() {
    let mut r = rng(14);
    let t = build_table(Basis::Real, 1, 1).unwrap();
    let grid = QuadratureGrid::new(6);
    let a = random_coeffs(1, &mut r);
    let w = random_real(1, &mut r);
    let m = window_matrix(&w, 1, false, &t).unwrap();
    let got = apply_window(&a, &m).unwrap();
    let want = project(&grid, 2, |u| synth(&a, u) * synth(&w, u));
    assert!(max_diff(&got, &want) <= 1e-13);
}

#[test]
fn truncated_window_keeps_leading_channels() {
    let mut r = rng(15);
    let t = build_table(Basis::Real, 2, 2).unwrap();
    let a = random_coeffs(2, &mut r);
    let w = random_real(2, &mut r);
    let full = apply_window(&a, &window_matrix(&w, 2, false, &t).unwrap()).unwrap();
    let cut = apply_window(&a, &window_matrix(&w, 2, true, &t).unwrap()).unwrap();
    assert_eq!(cut.len(), 9);
    assert!(max_diff(&cut, &full[..9]) <= 1e-15);
}

#[test]
fn axisymmetric_window_steers_isotropic_field() {
    let t = build_table(Basis::Real, 2, 2).unwrap();
    let t4 = build_table(Basis::Real, 4, 4).unwrap();
    let u0 = Direction::new(2.0, -1.0).unwrap();
    let w: Vec<C> = axisymmetric_pattern(&[1.0, 0.8, 0.3], &u0)
        .into_iter()
        .map(c)
        .collect();
    let mut a = vec![c(0.0); 9];
    a[0] = c(1.0);
    let out = apply_window(&a, &window_matrix(&w, 2, false, &t).unwrap()).unwrap();
    let e = energy_vector(&out, &t4).unwrap();
    assert!(angle(e, u0.unit_vector()) <= 1e-12);
}

fn random_hrtf(order: usize, rng: &mut StdRng) -> DMatrix<C> {
    DMatrix::from_fn(2, coeff_count(order), |_, _| {
        C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

#[test]
fn binaural_beamforming_matches_triple_product() {
    let mut r = rng(16);
    let t = build_table(Basis::Real, 2, 2).unwrap();
    let grid = QuadratureGrid::new(6);
    let h = random_hrtf(2, &mut r);
    let a = random_coeffs(2, &mut r);
    let w = random_real(2, &mut r);
    let bf = BinauralBeamformer::new(&h, 2, &t).unwrap();
    let b = bf.apply(&a, &w).unwrap();
    for ear in 0..2 {
        let hrow: Vec<C> = h.row(ear).iter().copied().collect();
        let want = grid.integrate_fn(|u| synth(&a, u) * synth(&w, u) * synth(&hrow, u));
        assert!((b[ear] - want).norm() <= 1e-10);
    }
    let m = bf.matrix(&w).unwrap();
    let via = &m * nalgebra::DVector::from_column_slice(&a);
    assert!((via[0] - b[0]).norm() <= 1e-14 && (via[1] - b[1]).norm() <= 1e-14);
}

#[test]
fn unit_beam_is_plain_binaural_decoding() {
    let mut r = rng(17);
    let t = build_table(Basis::Real, 3, 2).unwrap();
    let grid = QuadratureGrid::new(8);
    let h = random_hrtf(3, &mut r);
    let a = random_coeffs(2, &mut r);
    let mut w = vec![c(0.0); 9];
    w[0] = c((4.0 * PI).sqrt());
    let b = BinauralBeamformer::new(&h, 2, &t)
        .unwrap()
        .apply(&a, &w)
        .unwrap();
    for ear in 0..2 {
        let hrow: Vec<C> = h.row(ear).iter().copied().collect();
        let want = grid.integrate_fn(|u| synth(&a, u) * synth(&hrow, u));
        assert!((b[ear] - want).norm() <= 1e-12);
    }
}

#[test]
fn omni_hrtf_gives_windowed_omni_pickup() {
    let mut r = rng(18);
    let t = build_table(Basis::Real, 2, 2).unwrap();
    let mut h = DMatrix::zeros(2, 9);
    h[(0, 0)] = c(1.0);
    h[(1, 0)] = c(2.0);
    let a = random_coeffs(2, &mut r);
    let w = random_real(2, &mut r);
    let b = BinauralBeamformer::new(&h, 2, &t)
        .unwrap()
        .apply(&a, &w)
        .unwrap();
    // int a w R_00 = (a.w) / sqrt(4 pi)
    let aw: C = a.iter().zip(&w).map(|(x, y)| x * y).sum::<C>() / (4.0 * PI).sqrt();
    assert!((b[0] - aw).norm() <= 1e-14);
    assert!((b[1] - 2.0 * aw).norm() <= 1e-14);
}

// rotations and array modelling

#[test]
fn rotation_matrix_rotates_harmonics() {
    let mut r = rng(19);
    for _ in 0..5 {
        let rot = random_rotation(&mut r);
        let m = sh_rotation_matrix(&rot, 6).unwrap();
        let dense = m.to_dense();
        for _ in 0..5 {
            let u = random_dir(&mut r);
            let ru = Direction::from_cartesian((rot * Vector3::from(u.unit_vector())).into());
            let lhs = nalgebra::DVector::from_vec(real_sh_vector(6, &ru));
            let rhs = &dense * nalgebra::DVector::from_vec(real_sh_vector(6, &u));
            assert!((lhs - rhs).abs().max() <= 1e-12);
        }
        for n in 0..=6 {
            let b = m.block(n);
            let err = (b * b.transpose() - DMatrix::identity(2 * n + 1, 2 * n + 1))
                .abs()
                .max();
            assert!(err <= 1e-12);
        }
    }
}

fn cardioid() -> Vec<C> {
    vec![
        c(0.5 * (4.0 * PI).sqrt()),
        c(0.0),
        c(0.5 * (4.0 * PI / 3.0).sqrt()),
        c(0.0),
    ]
}

#[test]
fn unrotated_sensor_at_origin() {
    let t = build_table(Basis::Real, 1, 3).unwrap();
    let s = Sensor::new([0.0; 3], Matrix3::identity(), cardioid()).unwrap();
    let h = array_sensor_coeffs(&s, 5.0, 3, 4, &t).unwrap();
    assert_eq!(h.len(), 25);
    assert!(max_diff(&h[..4], &cardioid()) <= 1e-14);
    assert!(h[4..].iter().all(|z| z.norm() <= 1e-14));
}

#[test]
fn omni_sensor_is_scaled_plane_wave_kernel() {
    let t = build_table(Basis::Real, 0, 6).unwrap();
    let x = [0.05, 0.02, -0.03];
    let d00 = C::new(1.3, 0.4);
    let s = Sensor::new(x, Matrix3::identity(), vec![d00]).unwrap();
    let h = array_sensor_coeffs(&s, 20.0, 6, 6, &t).unwrap();
    let want: Vec<C> = translation_kernel(20.0, x, 6)
        .into_iter()
        .map(|z| z * d00 / (4.0 * PI).sqrt())
        .collect();
    assert!(max_diff(&h, &want) <= 1e-14);
}

#[test]
fn rotated_translated_cardioid_matches_pointwise() {
    let mut r = rng(20);
    let k = 30.0;
    let x = [0.03, -0.04, 0.02];
    let kd = k * dot(x, x).sqrt();
    let exp = default_expansion_order(kd) + 8;
    let t = build_table(Basis::Real, 1, exp).unwrap();
    let rot = random_rotation(&mut r);
    let s = Sensor::new(x, rot, cardioid()).unwrap();
    let h = array_sensor_coeffs(&s, k, exp, exp + 1, &t).unwrap();
    let local = cardioid();
    for _ in 0..50 {
        let u = random_dir(&mut r);
        let back =
            Direction::from_cartesian((rot.transpose() * Vector3::from(u.unit_vector())).into());
        let want = synth(&local, &back) * plane(k, &u, x);
        assert!((synth(&h, &u) - want).norm() <= 1e-6);
    }
}

fn omni_pair(d: f64) -> ArrayModel {
    let omni = vec![c((4.0 * PI).sqrt())];
    ArrayModel::new(vec![
        Sensor::new([0.0, 0.0, 0.0], Matrix3::identity(), omni.clone()).unwrap(),
        Sensor::new([d, 0.0, 0.0], Matrix3::identity(), omni).unwrap(),
    ])
}

#[test]
fn spaced_omni_coherence_tends_to_sinc() {
    let k = 1.0;
    let d = 2.5;
    let mut errs = Vec::new();
    for exp in [1usize, 3, 6, 12] {
        let t = build_table(Basis::Real, 0, exp).unwrap();
        let h = array_coeff_matrix(&omni_pair(d), k, exp, exp, &t).unwrap();
        let s = scm_array_isotropic(&h, 1.0);
        let coh = s[(0, 1)] / (s[(0, 0)] * s[(1, 1)]).sqrt();
        errs.push((coh - c((k * d).sin() / (k * d))).norm());
    }
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
    assert!(errs[3] <= 1e-10, "{errs:?}");
}

// least-squares encoding

fn ls_objective(e: &DMatrix<C>, h: &DMatrix<C>, target: usize, lambda: f64) -> f64 {
    let rows = coeff_count(target);
    let id = DMatrix::<C>::identity(rows, h.ncols());
    (e * h - id).norm_squared() + lambda * lambda * e.norm_squared()
}

#[test]
fn ls_encoder_is_optimal() {
    let mut r = rng(21);
    let h = DMatrix::from_fn(6, 9, |_, _| {
        C::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
    });
    let lambda = 0.1;
    let e = encoding_filters_ls(&h, 1, lambda).unwrap();
    let best = ls_objective(&e, &h, 1, lambda);
    for _ in 0..1000 {
        let p = DMatrix::from_fn(4, 6, |_, _| {
            C::new(r.gen_range(-1e-3..1e-3), r.gen_range(-1e-3..1e-3))
        });
        assert!(ls_objective(&(&e + p), &h, 1, lambda) >= best);
    }
}

#[test]
fn ls_encoder_shrinks_with_regularization() {
    let mut r = rng(22);
    let h = DMatrix::from_fn(8, 9, |_, _| {
        C::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
    });
    let norms: Vec<f64> = [0.0, 0.1, 1.0, 10.0, 100.0, 1e4]
        .iter()
        .map(|&l| encoding_filters_ls(&h, 2, l).unwrap().norm())
        .collect();
    assert!(norms.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
    assert!(norms[5] < 1e-6);
}

#[test]
fn ls_encoder_inverts_modelled_array() {
    // four outward cardioids on a tetrahedron, encoded to first order
    let mut sensors = Vec::new();
    for v in [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ] {
        let v = Vector3::from(v).normalize();
        let rot = *nalgebra::Rotation3::rotation_between(&Vector3::z(), &v)
            .unwrap()
            .matrix();
        sensors.push(Sensor::new((v * 0.01).into(), rot, cardioid()).unwrap());
    }
    let model = ArrayModel::new(sensors);
    let t = build_table(Basis::Real, 1, 3).unwrap();
    let h = array_coeff_matrix(&model, 1.0, 3, 1, &t).unwrap();
    let e = encoding_filters_ls(&h, 1, 0.0).unwrap();
    assert!(max_diff_mat(&(&e * &h), &DMatrix::identity(4, 4)) <= 1e-10);
}

// covariance models

fn assert_hermitian(s: &DMatrix<C>) {
    assert!(max_diff_mat(s, &s.adjoint()) <= 1e-13);
}

#[test]
fn ideal_array_isotropic_scm() {
    let s = scm_array_isotropic(&DMatrix::identity(9, 9), 0.5);
    assert_eq!(s, scm_isotropic_field(0.5, 2));
}

/// Band-limited squared window centred at `u0`, as a density.
fn squared_window_psd(u0: &Direction) -> DirectionalPsd {
    let t = build_table(Basis::Real, 1, 1).unwrap();
    let w: Vec<C> = axisymmetric_pattern(&[1.0, 1.5], u0)
        .into_iter()
        .map(c)
        .collect();
    let sq = gaunt_core::gaunt::multiply_coeffs(&w, &w, &t).unwrap();
    DirectionalPsd::new(sq.into_iter().map(|z| z.re).collect()).unwrap()
}

#[test]
fn anisotropic_scm_matches_quadrature() {
    let u0 = Direction::new(0.7, 2.2).unwrap();
    let p = squared_window_psd(&u0);
    assert!(p.min_on_grid(20) >= -1e-12);
    let t = build_table(Basis::Real, 2, 2).unwrap();
    let s = scm_anisotropic_field(&p, 2, &t).unwrap();
    assert_hermitian(&s);
    let grid = QuadratureGrid::new(8);
    let pc: Vec<C> = p.coeffs().iter().map(|&v| c(v)).collect();
    for i in 0..9 {
        for j in 0..9 {
            let want = grid.integrate_fn(|u| {
                let r = real_sh_vector(2, u);
                synth(&pc, u) * r[i] * r[j]
            });
            assert!((s[(i, j)] - want).norm() <= 1e-11);
        }
    }
    let eig = s.map(|z| z.re).symmetric_eigenvalues();
    assert!(eig.min() >= -1e-10);

    let mut r = rng(23);
    let h = random_hrtf(2, &mut r);
    let sa = scm_array_anisotropic(&h, &p, &t).unwrap();
    assert_hermitian(&sa);
    assert!(max_diff_mat(&sa, &(&h * &s * h.adjoint())) <= 1e-13);
}

fn spaced_oracle(
    pd: &dyn Fn(&Direction) -> C,
    k: f64,
    x: [f64; 3],
    order: usize,
    grid: &QuadratureGrid,
) -> DMatrix<C> {
    let size = coeff_count(order);
    let mut s = DMatrix::zeros(size, size);
    for (u, w) in grid.nodes().iter().zip(grid.weights()) {
        let r = real_sh_vector(order, u);
        let f = pd(u) * plane(k, u, x).conj() * *w;
        for i in 0..size {
            for j in 0..size {
                s[(i, j)] += f * r[i] * r[j];
            }
        }
    }
    s
}

#[test]
fn spaced_isotropic_matches_quadrature() {
    let t = build_table(Basis::Real, 2, 2).unwrap();
    let x = [0.6, 0.0, 0.8];
    let s = scm_spaced_isotropic(1.5, 1.0, x, 2, 10, &t).unwrap();
    let want = spaced_oracle(&|_| c(1.5), 1.0, x, 2, &QuadratureGrid::new(40));
    assert!(max_diff_mat(&s, &want) <= 1e-8);
    assert!((s[(0, 0)] - c(1.5 * 1f64.sin())).norm() <= 1e-14);
}

#[test]
fn spaced_anisotropic_matches_quadrature() {
    let mut r = rng(24);
    let coeffs: Vec<f64> = (0..9).map(|_| r.gen_range(-1.0..1.0)).collect();
    let p = DirectionalPsd::new(coeffs).unwrap();
    let pc: Vec<C> = p.coeffs().iter().map(|&v| c(v)).collect();
    let x = random_dir(&mut r).unit_vector();
    let t = build_table(Basis::Real, 8, 2).unwrap();
    let s = scm_spaced_anisotropic(&p, 1.0, x, 2, 8, &t).unwrap();
    let want = spaced_oracle(&|u| synth(&pc, u), 1.0, x, 2, &QuadratureGrid::new(40));
    assert!(
        max_diff_mat(&s, &want) <= 1e-7,
        "{}",
        max_diff_mat(&s, &want)
    );
}

#[test]
fn spaced_anisotropic_special_cases() {
    let t = build_table(Basis::Real, 6, 2).unwrap();
    let x = [0.1, -0.5, 0.3];
    let iso = DirectionalPsd::isotropic(0.8);
    let a = scm_spaced_anisotropic(&iso, 2.0, x, 2, 6, &t).unwrap();
    let b = scm_spaced_isotropic(0.8, 2.0, x, 2, 6, &t).unwrap();
    assert!(max_diff_mat(&a, &b) <= 1e-14);

    let p = squared_window_psd(&Direction::new(1.0, 1.0).unwrap());
    let a = scm_spaced_anisotropic(&p, 2.0, [0.0; 3], 2, 6, &t).unwrap();
    let b = scm_anisotropic_field(&p, 2, &t).unwrap();
    assert!(max_diff_mat(&a, &b) <= 1e-14);
}

#[test]
fn scms_reject_small_tables() {
    let t = build_table(Basis::Real, 1, 1).unwrap();
    assert!(scm_spaced_isotropic(1.0, 1.0, [0.0, 0.0, 1.0], 2, 4, &t).is_err());
    let c_table = build_table(Basis::Complex, 2, 2).unwrap();
    assert!(scm_anisotropic_field(&DirectionalPsd::isotropic(1.0), 2, &c_table).is_err());
}
