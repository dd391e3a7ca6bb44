use gaunt_core::acoustics::{
    energy_vector, intensity_at, scm_anisotropic_field, scm_spaced_isotropic, translate_coeffs,
    translation_kernel, DirectionalPsd, Medium,
};
use gaunt_core::basis::{BasisMap, CoeffVector, ConjugationMap};
use gaunt_core::gaunt::{build_table_with, gaunt_complex, multiply_spherical, GauntTable};
use gaunt_core::quadrature::QuadratureGrid;
use gaunt_core::sh::{coeff_count, complex_sh_vector, real_sh_vector, ShIndex};
use gaunt_core::Basis;
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::json;

use crate::oracle::{
    angle, max_diff, max_diff_mat, plane, project, random_coeffs, random_dir, synth, weighted_gram,
    C,
};
use crate::{CliError, CliResult, Suite, VerifyArgs};

const SEED: u64 = 0x6a75;

struct Check {
    suite: &'static str,
    name: String,
    max_error: f64,
    tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        // NaN fails
        self.max_error <= self.tolerance
    }
}

struct Ctx {
    n1: usize,
    n2: usize,
    tolerance: f64,
    grid: QuadratureGrid,
    tables: Option<(GauntTable, GauntTable)>,
}

impl Ctx {
    fn complex(&self) -> &GauntTable {
        &self.tables.as_ref().expect("tables built for this suite").0
    }

    fn real(&self) -> &GauntTable {
        &self.tables.as_ref().expect("tables built for this suite").1
    }
}

pub fn run(args: &VerifyArgs) -> CliResult<()> {
    args.orders.check()?;
    if !(args.tolerance > 0.0 && args.tolerance.is_finite()) {
        return Err(CliError::Config(format!(
            "tolerance must be positive, got {}",
            args.tolerance
        )));
    }
    let (n1, n2) = (args.orders.n1, args.orders.n2);
    let band = args.grid_band.unwrap_or(3 * (n1 + n2));
    if band < 2 * (n1 + n2) {
        return Err(CliError::Config(format!(
            "grid band {band} cannot resolve triple products of degree {}",
            2 * (n1 + n2)
        )));
    }
    let suites = match args.suite {
        Suite::All => vec![
            Suite::SelectionRules,
            Suite::Symmetry,
            Suite::Unitarity,
            Suite::GauntOracle,
            Suite::Multiplication,
            Suite::Applications,
        ],
        one => vec![one],
    };
    let path = args.factorial_path.into();
    let tables = if suites.iter().any(|s| *s != Suite::Unitarity) {
        Some((
            build_table_with(Basis::Complex, n1, n2, path)?,
            build_table_with(Basis::Real, n1, n2, path)?,
        ))
    } else {
        None
    };
    let ctx = Ctx {
        n1,
        n2,
        tolerance: args.tolerance,
        grid: QuadratureGrid::new(band),
        tables,
    };

    let mut checks = Vec::new();
    for suite in suites {
        match suite {
            Suite::SelectionRules => selection_rules(&ctx, &mut checks),
            Suite::Symmetry => symmetry(&ctx, &mut checks),
            Suite::Unitarity => unitarity(&ctx, &mut checks),
            Suite::GauntOracle => gaunt_oracle(&ctx, &mut checks),
            Suite::Multiplication => multiplication(&ctx, &mut checks)?,
            Suite::Applications => applications(&ctx, &mut checks)?,
            Suite::All => unreachable!(),
        }
    }

    let ok = checks.iter().all(Check::passed);
    if args.json {
        let report = json!({
            "n1": n1,
            "n2": n2,
            "grid_band": band,
            "passed": ok,
            "checks": checks.iter().map(|c| json!({
                "suite": c.suite,
                "name": c.name,
                "max_error": c.max_error,
                "tolerance": c.tolerance,
                "passed": c.passed(),
            })).collect::<Vec<_>>(),
        });
        out!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        out!("verify N1 = {n1}, N2 = {n2}, grid band {band}");
        for c in &checks {
            out!(
                "[{}] {:<15} {:<44} max error {:.3e} (tol {:.1e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.max_error,
                c.tolerance
            );
        }
        let failed = checks.iter().filter(|c| !c.passed()).count();
        out!("{} checks, {} failed", checks.len(), failed);
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

fn push(
    out: &mut Vec<Check>,
    suite: &'static str,
    name: impl Into<String>,
    max_error: f64,
    tolerance: f64,
) {
    out.push(Check {
        suite,
        name: name.into(),
        max_error,
        tolerance,
    });
}

fn allowed_degrees(n1: u32, n2: u32, n: u32) -> bool {
    n1.abs_diff(n2) <= n && n <= n1 + n2 && (n1 + n2 + n).is_multiple_of(2)
}

fn allowed_complex(a: ShIndex, b: ShIndex, q: ShIndex) -> bool {
    allowed_degrees(a.n, b.n, q.n) && a.m + b.m == q.m
}

fn allowed_real(a: ShIndex, b: ShIndex, q: ShIndex) -> bool {
    let (x, y, z) = (a.m.abs(), b.m.abs(), q.m.abs());
    let negatives = [a.m, b.m, q.m].iter().filter(|&&m| m < 0).count();
    allowed_degrees(a.n, b.n, q.n)
        && (z == x + y || z == x.abs_diff(y) as i32)
        && negatives % 2 == 0
}

/// Largest stored value at a position the selection rules forbid, and the
/// largest Gaunt value over forbidden positions of the full index box.
fn selection_rules(ctx: &Ctx, out: &mut Vec<Check>) {
    for (table, rule, name) in [
        (
            ctx.complex(),
            allowed_complex as fn(ShIndex, ShIndex, ShIndex) -> bool,
            "complex",
        ),
        (ctx.real(), allowed_real, "real"),
    ] {
        let mut worst: f64 = 0.0;
        let mut explicit_zero = false;
        for m in table.matrices() {
            let q = m.target();
            for e in m.entries() {
                explicit_zero |= e.value == 0.0;
                let (a, b) = (
                    ShIndex::from_acn(e.row as usize),
                    ShIndex::from_acn(e.col as usize),
                );
                if !rule(a, b, q) {
                    worst = worst.max(e.value.abs());
                }
            }
        }
        push(
            out,
            "selection-rules",
            format!("{name} entries obey the rules"),
            worst,
            0.0,
        );
        push(
            out,
            "selection-rules",
            format!("{name} table stores no explicit zeros"),
            if explicit_zero { 1.0 } else { 0.0 },
            0.0,
        );
    }

    // the scalar formula on the forbidden part of the box, complex basis
    let mut worst: f64 = 0.0;
    for q in 0..coeff_count(ctx.n1 + ctx.n2) {
        let qi = ShIndex::from_acn(q);
        for a in 0..coeff_count(ctx.n1) {
            let ai = ShIndex::from_acn(a);
            for b in 0..coeff_count(ctx.n2) {
                let bi = ShIndex::from_acn(b);
                if !allowed_complex(ai, bi, qi) {
                    worst = worst.max(gaunt_complex(ai.n, ai.m, bi.n, bi.m, qi.n, qi.m).abs());
                }
            }
        }
    }
    push(
        out,
        "selection-rules",
        "scalar formula vanishes where forbidden",
        worst,
        0.0,
    );
}

fn symmetry(ctx: &Ctx, out: &mut Vec<Check>) {
    let common = coeff_count(ctx.n1.min(ctx.n2));

    // swapping the two factors transposes the shared block
    for (table, name) in [(ctx.complex(), "complex"), (ctx.real(), "real")] {
        let mut worst: f64 = 0.0;
        for m in table.matrices() {
            for e in m.entries() {
                let (r, c) = (e.row as usize, e.col as usize);
                if r < common && c < common {
                    worst = worst.max((e.value - m.get(c, r)).abs());
                }
            }
        }
        push(
            out,
            "symmetry",
            format!("{name} factor exchange"),
            worst,
            ctx.tolerance,
        );
    }

    // complex: G(-m1, -m2, -m) = G(m1, m2, m)
    let mut worst: f64 = 0.0;
    for m in ctx.complex().matrices() {
        let q = m.target();
        let mirror = ctx
            .complex()
            .matrix(q.n, -q.m)
            .expect("mirrored target in range");
        for e in m.entries() {
            let a = ShIndex::from_acn(e.row as usize);
            let b = ShIndex::from_acn(e.col as usize);
            let ra = ShIndex { n: a.n, m: -a.m }.acn();
            let rb = ShIndex { n: b.n, m: -b.m }.acn();
            worst = worst.max((e.value - mirror.get(ra, rb)).abs());
        }
    }
    push(
        out,
        "symmetry",
        "complex order reflection",
        worst,
        ctx.tolerance,
    );

    // real: the integral of three real harmonics is symmetric in all three
    let targets = ctx.real().matrices().len();
    let mut worst: f64 = 0.0;
    for m in ctx.real().matrices() {
        let q = m.target().acn();
        for e in m.entries() {
            let (a, b) = (e.row as usize, e.col as usize);
            if a < targets && q < coeff_count(ctx.n1) {
                worst = worst.max((e.value - ctx.real().matrix_acn(a).get(q, b)).abs());
            }
        }
    }
    push(
        out,
        "symmetry",
        "real index permutation",
        worst,
        ctx.tolerance,
    );
}

fn unitarity(ctx: &Ctx, out: &mut Vec<Check>) {
    let order = ctx.n1 + ctx.n2;
    let u = BasisMap::new(order).to_dense();
    let eye = DMatrix::<C>::identity(u.nrows(), u.ncols());
    push(
        out,
        "unitarity",
        "|U U^H - I|_inf",
        inf_norm(&(&u * u.adjoint() - &eye)),
        ctx.tolerance,
    );
    push(
        out,
        "unitarity",
        "|U^H U - I|_inf",
        inf_norm(&(u.adjoint() * &u - &eye)),
        ctx.tolerance,
    );

    let t = ConjugationMap::new(order);
    let mut conj_err: f64 = 0.0;
    let mut real_err: f64 = 0.0;
    for dir in ctx.grid.nodes().iter().step_by(7) {
        let y = complex_sh_vector(order, dir);
        let conj: Vec<C> = y.iter().map(|z| z.conj()).collect();
        conj_err = conj_err.max(max_diff(&t.apply(&y), &conj));
        let r: Vec<C> = real_sh_vector(order, dir)
            .into_iter()
            .map(|v| C::new(v, 0.0))
            .collect();
        real_err = real_err.max(max_diff(&BasisMap::new(order).apply(&y), &r));
    }
    push(out, "unitarity", "T y = conj(y)", conj_err, ctx.tolerance);
    push(out, "unitarity", "U y = r", real_err, ctx.tolerance);

    let gram = weighted_gram(&ctx.grid, order.min(ctx.grid.degree() / 2), |_| {
        C::new(1.0, 0.0)
    });
    let eye = DMatrix::<C>::identity(gram.nrows(), gram.ncols());
    push(
        out,
        "unitarity",
        "real harmonics orthonormal",
        max_diff_mat(&gram, &eye),
        ctx.tolerance,
    );
}

/// Largest absolute row sum.
fn inf_norm(m: &DMatrix<C>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Every table block against `int y_a y_b conj(y_q)` by quadrature.
fn gaunt_oracle(ctx: &Ctx, out: &mut Vec<Check>) {
    let order = ctx.n1 + ctx.n2;
    let (r1, r2) = (coeff_count(ctx.n1), coeff_count(ctx.n2));
    for (table, basis, name) in [
        (ctx.complex(), Basis::Complex, "complex"),
        (ctx.real(), Basis::Real, "real"),
    ] {
        let samples: Vec<(f64, Vec<C>)> = ctx
            .grid
            .nodes()
            .iter()
            .zip(ctx.grid.weights())
            .map(|(d, &w)| (w, gaunt_core::sh::sh_vector(basis, order, d)))
            .collect();
        let mut worst: f64 = 0.0;
        for m in table.matrices() {
            let q = m.target().acn();
            let mut want = DMatrix::<C>::zeros(r1, r2);
            for (w, y) in &samples {
                let f = y[q].conj() * *w;
                for b in 0..r2 {
                    let fb = f * y[b];
                    for a in 0..r1 {
                        want[(a, b)] += fb * y[a];
                    }
                }
            }
            let got = m.to_dense().map(|v| C::new(v, 0.0));
            worst = worst.max(max_diff_mat(&got, &want));
        }
        push(
            out,
            "gaunt-oracle",
            format!("{name} table vs quadrature"),
            worst,
            ctx.tolerance,
        );
    }
}

fn multiplication(ctx: &Ctx, out: &mut Vec<Check>) -> CliResult<()> {
    let mut rng = StdRng::seed_from_u64(SEED);
    let order = ctx.n1 + ctx.n2;
    for (table, basis, name) in [
        (ctx.complex(), Basis::Complex, "complex"),
        (ctx.real(), Basis::Real, "real"),
    ] {
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let f = random_coeffs(ctx.n1, &mut rng);
            let g = random_coeffs(ctx.n2, &mut rng);
            let (fv, gv) = match basis {
                Basis::Complex => (
                    CoeffVector::complex(f.clone())?,
                    CoeffVector::complex(g.clone())?,
                ),
                Basis::Real => (
                    CoeffVector::real(f.iter().map(|z| z.re).collect())?,
                    CoeffVector::real(g.iter().map(|z| z.re).collect())?,
                ),
            };
            let got = multiply_spherical(&fv, &gv, table)?.to_complex_vec();
            let (fc, gc) = (fv.to_complex_vec(), gv.to_complex_vec());
            let eval = |v: &[C], d: &gaunt_core::sh::Direction| -> C {
                let y = gaunt_core::sh::sh_vector(
                    basis,
                    gaunt_core::sh::order_of_len(v.len()).expect("square"),
                    d,
                );
                y.iter().zip(v).map(|(a, b)| a * b).sum()
            };
            let samples = ctx.grid.sample(|d| eval(&fc, d) * eval(&gc, d));
            let want = ctx.grid.forward_sht(&samples, basis, order);
            worst = worst.max(max_diff(&got, &want));
        }
        push(
            out,
            "multiplication",
            format!("{name} product vs pointwise"),
            worst,
            ctx.tolerance,
        );
    }
    Ok(())
}

/// Acoustic applications at order `min(N1, N2)`, each with a tolerance fixed
/// by its truncation or conditioning rather than `--tolerance`.
fn applications(ctx: &Ctx, out: &mut Vec<Check>) -> CliResult<()> {
    let mut rng = StdRng::seed_from_u64(SEED + 1);
    let n = ctx.n1.min(ctx.n2).max(1);
    let exp = 4;
    let k = 1.0;
    let table = build_table_with(
        Basis::Real,
        n.max(exp),
        n.max(exp),
        gaunt_core::wigner::FactorialPath::Exact,
    )?;
    let grid = QuadratureGrid::new(3 * (n + exp) + 2);

    // translation against the pointwise product with the truncated kernel
    let a = random_coeffs(n, &mut rng);
    let x = random_dir(&mut rng).unit_vector().map(|v| v * 0.5);
    let got = translate_coeffs(&a, k, x, exp, &table)?;
    let kernel = translation_kernel(k, x, exp);
    let want = project(&grid, n + exp, |u| synth(&a, u) * synth(&kernel, u));
    push(
        out,
        "applications",
        "translation vs quadrature",
        max_diff(&got, &want),
        1e-10,
    );

    // intensity of a plane wave points along its propagation
    let u0 = random_dir(&mut rng);
    let pw: Vec<C> = real_sh_vector(n, &u0)
        .into_iter()
        .map(|v| C::new(v, 0.0))
        .collect();
    let i = intensity_at(&pw, k, [0.0; 3], 2, Medium::default(), &table)?;
    let minus = u0.unit_vector().map(|v| -v);
    push(
        out,
        "applications",
        "plane-wave intensity direction (rad)",
        angle(i.map(|z| z.re), minus),
        1e-6,
    );

    // energy vector against quadrature
    let e = energy_vector(&a, &table)?;
    let total = grid
        .integrate_fn(|u| C::new(synth(&a, u).norm_sqr(), 0.0))
        .re;
    let mut worst: f64 = 0.0;
    for (axis, v) in e.iter().enumerate() {
        let want = grid
            .integrate_fn(|u| C::new(synth(&a, u).norm_sqr() * u.unit_vector()[axis], 0.0))
            .re
            / total;
        worst = worst.max((v - want).abs());
    }
    push(
        out,
        "applications",
        "energy vector vs quadrature",
        worst,
        1e-10,
    );

    // anisotropic diffuse SCM against int p r r^T
    let pc: Vec<f64> = random_coeffs(n, &mut rng).iter().map(|z| z.re).collect();
    let p = DirectionalPsd::new(pc.clone())?;
    let pcc: Vec<C> = pc.iter().map(|&v| C::new(v, 0.0)).collect();
    let s = scm_anisotropic_field(&p, n, &table)?;
    let want = weighted_gram(&grid, n, |u| synth(&pcc, u));
    push(
        out,
        "applications",
        "anisotropic SCM vs quadrature",
        max_diff_mat(&s, &want),
        1e-10,
    );

    // spaced isotropic SCM, leading entry is P_d sinc(kd)
    let d = [0.0, 0.0, 0.7];
    let s = scm_spaced_isotropic(1.0, k, d, n, exp, &table)?;
    let sinc = 0.7f64.sin() / 0.7;
    push(
        out,
        "applications",
        "spaced isotropic coherence = sinc(kd)",
        (s[(0, 0)] - sinc).norm(),
        1e-12,
    );

    // the truncated plane wave against the exact one
    let pw_exact = plane(k, &u0, x);
    let kernel = translation_kernel(k, x, 12);
    let approx = synth(&kernel, &u0);
    push(
        out,
        "applications",
        "plane-wave expansion at order 12",
        (approx - pw_exact).norm(),
        1e-12,
    );
    Ok(())
}
