use std::f64::consts::PI;

use gaunt_core::acoustics::{
    apply_window, axisymmetric_pattern, default_expansion_order, energy_vector,
    expansion_tail_bound, intensity_at, scm_spaced_isotropic, translate_coeffs, window_matrix,
    BinauralBeamformer, Medium,
};
use gaunt_core::gaunt::{build_table, GauntTable};
use gaunt_core::quadrature::QuadratureGrid;
use gaunt_core::sh::{coeff_count, real_sh_vector, Direction};
use gaunt_core::Basis;
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::oracle::{
    angle, max_diff, max_diff_mat, plane, project, random_coeffs, synth, weighted_gram, C,
};
use crate::{check_order, CliError, CliResult, DemoArgs, DemoName};

const SOUND_SPEED: f64 = 343.0;

struct Report {
    name: &'static str,
    inputs: Vec<(&'static str, Value)>,
    closed_form: Value,
    oracle: Value,
    discrepancy: f64,
    notes: Vec<String>,
}

fn cplx(z: C) -> Value {
    json!([z.re, z.im])
}

fn cvec(v: &[C]) -> Value {
    Value::Array(v.iter().map(|&z| cplx(z)).collect())
}

fn head(v: &[C]) -> Value {
    cvec(&v[..v.len().min(4)])
}

fn real_vec(v: &[f64]) -> Vec<C> {
    v.iter().map(|&x| C::new(x, 0.0)).collect()
}

pub fn run(args: &DemoArgs) -> CliResult<()> {
    let kd = match args.freq {
        Some(f) => 2.0 * PI * f * args.spacing / SOUND_SPEED,
        None => args.kd,
    };
    if !(kd.is_finite() && kd >= 0.0) {
        return Err(CliError::Config(format!(
            "kd must be finite and non-negative, got {kd}"
        )));
    }
    if !(args.spacing.is_finite() && args.spacing > 0.0) {
        return Err(CliError::Config(format!(
            "spacing must be positive, got {}",
            args.spacing
        )));
    }
    let expansion = args
        .expansion
        .unwrap_or_else(|| default_expansion_order(kd));
    check_order(args.order.max(expansion), args.allow_large)?;
    let (theta, phi) = args.direction.unwrap_or((1.0, 0.5));
    let dir = Direction::new(theta, phi)?;
    let mut rng = StdRng::seed_from_u64(args.seed);
    let n = args.order;
    let setup = Setup {
        n,
        kd,
        expansion,
        dir,
    };

    let report = match args.name {
        DemoName::Translate => translate(&setup, &mut rng)?,
        DemoName::Intensity => intensity(&setup)?,
        DemoName::EnergyVector => energy(&setup)?,
        DemoName::Window => window(&setup, &mut rng)?,
        DemoName::Beamform => beamform(&setup, &mut rng)?,
        DemoName::DiffuseScm => diffuse(&setup, args.spacing)?,
    };

    if args.json {
        let mut inputs = serde_json::Map::new();
        for (k, v) in &report.inputs {
            inputs.insert((*k).to_string(), v.clone());
        }
        let out = json!({
            "demo": report.name,
            "inputs": inputs,
            "closed_form": report.closed_form,
            "oracle": report.oracle,
            "discrepancy": report.discrepancy,
            "notes": report.notes,
        });
        out!(
            "{}",
            serde_json::to_string_pretty(&out).expect("report serializes")
        );
    } else {
        out!("demo: {}", report.name);
        for (k, v) in &report.inputs {
            out!("  {k:<12} {v}");
        }
        out!("closed form:  {}", report.closed_form);
        out!("oracle:       {}", report.oracle);
        out!("discrepancy:  {:.3e}", report.discrepancy);
        for note in &report.notes {
            out!("note: {note}");
        }
    }
    Ok(())
}

struct Setup {
    n: usize,
    kd: f64,
    expansion: usize,
    dir: Direction,
}

impl Setup {
    /// Unit wavenumber, so that `|x| = kd`.
    fn point(&self) -> [f64; 3] {
        self.dir.unit_vector().map(|v| v * self.kd)
    }

    fn base_inputs(&self) -> Vec<(&'static str, Value)> {
        vec![
            ("order", json!(self.n)),
            ("direction", json!([self.dir.theta(), self.dir.phi()])),
            ("kd", json!(self.kd)),
            ("expansion", json!(self.expansion)),
        ]
    }

    fn grid(&self) -> QuadratureGrid {
        QuadratureGrid::new(2 * (self.n + self.expansion) + 2 * self.kd.ceil() as usize + 20)
    }
}

fn real_table(n1: usize, n2: usize) -> CliResult<GauntTable> {
    Ok(build_table(Basis::Real, n1, n2)?)
}

fn translate(s: &Setup, rng: &mut StdRng) -> CliResult<Report> {
    let a = random_coeffs(s.n, rng);
    let x = s.point();
    let table = real_table(s.n, s.expansion)?;
    let got = translate_coeffs(&a, 1.0, x, s.expansion, &table)?;
    let want = project(&s.grid(), s.n + s.expansion, |u| {
        synth(&a, u) * plane(1.0, u, x)
    });
    let mut inputs = s.base_inputs();
    inputs.push(("x", json!(x)));
    Ok(Report {
        name: "translate",
        inputs,
        closed_form: json!({ "coeffs": got.len(), "leading": head(&got) }),
        oracle: json!({ "coeffs": want.len(), "leading": head(&want) }),
        discrepancy: max_diff(&got, &want),
        notes: vec![
            "oracle projects a(u) exp(i k u.x) by quadrature".into(),
            format!(
                "plane-wave truncation bound per unit coefficient: {:.3e}",
                expansion_tail_bound(s.kd, s.expansion)
            ),
        ],
    })
}

fn plane_wave(s: &Setup) -> Vec<C> {
    real_vec(&real_sh_vector(s.n, &s.dir))
}

fn intensity(s: &Setup) -> CliResult<Report> {
    let a = plane_wave(s);
    let x = s.dir.unit_vector().map(|v| v * 0.25 * s.kd);
    let medium = Medium::default();
    let table = real_table(s.n, s.expansion)?;
    let got = intensity_at(&a, 1.0, x, s.expansion, medium, &table)?;
    let grid = s.grid();
    let p = grid.integrate_fn(|u| synth(&a, u) * plane(1.0, u, x));
    let scale = -1.0 / (medium.sound_speed * medium.density);
    let want: Vec<C> = (0..3)
        .map(|axis| {
            let v = grid.integrate_fn(|u| synth(&a, u) * plane(1.0, u, x) * u.unit_vector()[axis])
                * scale;
            0.5 * p.conj() * v
        })
        .collect();
    let minus = s.dir.unit_vector().map(|v| -v);
    let mut inputs = s.base_inputs();
    inputs.push(("x", json!(x)));
    Ok(Report {
        name: "intensity",
        inputs,
        closed_form: cvec(&got),
        oracle: cvec(&want),
        discrepancy: max_diff(&got, &want),
        notes: vec![format!(
            "angle between active intensity and -u0: {:.3e} rad",
            angle(got.map(|z| z.re), minus)
        )],
    })
}

fn energy(s: &Setup) -> CliResult<Report> {
    let a = plane_wave(s);
    let table = real_table(s.n, s.n)?;
    let e = energy_vector(&a, &table)?;
    let grid = QuadratureGrid::new(2 * s.n + 2);
    let total = grid
        .integrate_fn(|u| C::new(synth(&a, u).norm_sqr(), 0.0))
        .re;
    let want: Vec<f64> = (0..3)
        .map(|axis| {
            grid.integrate_fn(|u| C::new(synth(&a, u).norm_sqr() * u.unit_vector()[axis], 0.0))
                .re
                / total
        })
        .collect();
    let discrepancy = e
        .iter()
        .zip(&want)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(Report {
        name: "energy-vector",
        inputs: vec![
            ("order", json!(s.n)),
            ("direction", json!([s.dir.theta(), s.dir.phi()])),
        ],
        closed_form: json!(e),
        oracle: json!(want),
        discrepancy,
        notes: vec![format!(
            "angle to the arrival direction: {:.3e} rad, |e| = {:.6}",
            angle(e, s.dir.unit_vector()),
            crate::oracle::norm3(e)
        )],
    })
}

fn window(s: &Setup, rng: &mut StdRng) -> CliResult<Report> {
    let a = random_coeffs(s.n, rng);
    let w = real_vec(&axisymmetric_pattern(&[1.0, 0.5], &s.dir));
    let table = real_table(s.n, 1)?;
    let m = window_matrix(&w, s.n, false, &table)?;
    let got = apply_window(&a, &m)?;
    let want = project(&QuadratureGrid::new(2 * s.n + 4), s.n + 1, |u| {
        synth(&a, u) * synth(&w, u)
    });
    Ok(Report {
        name: "window",
        inputs: vec![
            ("order", json!(s.n)),
            ("direction", json!([s.dir.theta(), s.dir.phi()])),
            ("pattern", json!([1.0, 0.5])),
        ],
        closed_form: json!({ "coeffs": got.len(), "leading": head(&got) }),
        oracle: json!({ "coeffs": want.len(), "leading": head(&want) }),
        discrepancy: max_diff(&got, &want),
        notes: vec![],
    })
}

fn beamform(s: &Setup, rng: &mut StdRng) -> CliResult<Report> {
    let size = coeff_count(s.n);
    let hrtf = DMatrix::from_fn(2, size, |_, _| {
        let v = random_coeffs(0, rng);
        v[0]
    });
    let a = random_coeffs(s.n, rng);
    let w = real_vec(&axisymmetric_pattern(&vec![1.0; s.n + 1], &s.dir));
    let table = real_table(s.n, s.n)?;
    let bf = BinauralBeamformer::new(&hrtf, s.n, &table)?;
    let got = bf.apply(&a, &w)?;
    let grid = QuadratureGrid::new(3 * s.n + 2);
    let want: Vec<C> = (0..2)
        .map(|ear| {
            let h: Vec<C> = hrtf.row(ear).iter().copied().collect();
            grid.integrate_fn(|u| synth(&h, u) * synth(&a, u) * synth(&w, u))
        })
        .collect();
    Ok(Report {
        name: "beamform",
        inputs: vec![
            ("order", json!(s.n)),
            ("direction", json!([s.dir.theta(), s.dir.phi()])),
        ],
        closed_form: cvec(&got),
        oracle: cvec(&want),
        discrepancy: max_diff(&got, &want),
        notes: vec!["oracle integrates h(u) a(u) w(u) per ear".into()],
    })
}

fn diffuse(s: &Setup, spacing: f64) -> CliResult<Report> {
    let k = s.kd / spacing;
    let x = s.dir.unit_vector().map(|v| v * spacing);
    let table = real_table(s.n.max(s.expansion), s.n)?;
    let got = scm_spaced_isotropic(1.0, k, x, s.n, s.expansion, &table)?;
    let want = weighted_gram(&s.grid(), s.n, |u| plane(k, u, x).conj());
    let sinc = if s.kd == 0.0 { 1.0 } else { s.kd.sin() / s.kd };
    let mut inputs = s.base_inputs();
    inputs.push(("spacing", json!(spacing)));
    inputs.push(("k", json!(k)));
    Ok(Report {
        name: "diffuse-scm",
        inputs,
        closed_form: json!({ "size": got.nrows(), "s00": cplx(got[(0, 0)]) }),
        oracle: json!({ "size": want.nrows(), "s00": cplx(want[(0, 0)]) }),
        discrepancy: max_diff_mat(&got, &want),
        notes: vec![format!(
            "isotropic coherence sinc(kd) = {sinc:.12}, |s00 - sinc| = {:.3e}",
            (got[(0, 0)] - sinc).norm()
        )],
    })
}
