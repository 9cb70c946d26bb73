use koopman_core::normalform::{run, NormalFormConfig, NormalFormSequence};
use koopman_core::numerics::{
    domain_check, inverse_asymptotics_study, residual_study, tau_inverse_pointwise, tau_pointwise, DomainReport,
    SlopeFit,
};
use koopman_core::observables::{density_demo, GridBox};
use koopman_core::polyalg::max_norm;
use koopman_core::spectrum::{check_resonance, Eigencoordinates};
use koopman_core::{Complex64, MultiIndex, Spectrum, VectorPoly};
use serde::Serialize;

use crate::args::{
    parse_alpha, parse_point, parse_radii, Cli, Command, Common, DensityArgs, Format, InverseOrderArgs, InvertArgs,
    NormalformArgs, PipelineOpts, ResidualArgs, ResonanceArgs, Target,
};
use crate::output::{csv, emit, json, num};
use crate::{parse_map, CliError, ParsedMap};

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Resonance(a) => resonance(a),
        Command::Normalform(a) => normalform(a),
        Command::Invert(a) => invert(a),
        Command::ResidualStudy(a) => residual(a),
        Command::InverseOrder(a) => inverse_order(a),
        Command::DensityDemo(a) => density(a),
    }
}

fn load(common: &Common, pipeline: bool) -> Result<ParsedMap, CliError> {
    let parsed = parse_map(&common.map)?;
    if pipeline && !common.allow_unstable {
        if let Err(e) = parsed.spectrum.check_stable() {
            return Err(CliError::Usage(format!("{e}; pass --allow-unstable to run anyway")));
        }
    }
    Ok(parsed)
}

fn alpha_label(a: &MultiIndex) -> String {
    a.to_string()
}

fn pipeline(
    parsed: &ParsedMap,
    common: &Common,
    opts: &PipelineOpts,
    m: usize,
) -> Result<NormalFormSequence, CliError> {
    if m < 2 {
        return Err(CliError::Usage(format!("-m must be at least 2, got {m}")));
    }
    let degree = opts.degree.unwrap_or(m);
    if degree < m {
        return Err(CliError::Usage(format!("-D {degree} is below the requested stage {m}")));
    }
    let cfg = NormalFormConfig {
        degree,
        beta: opts.beta,
        resonance_tol: opts.resonance_tol,
        norm_samples: opts.norm_samples,
        seed: opts.seed,
        require_stable: !common.allow_unstable,
        ..NormalFormConfig::default()
    };
    Ok(run(&parsed.map, &parsed.spectrum, &cfg)?)
}

#[derive(Serialize)]
struct ResonanceRow {
    /// 1-based.
    component: usize,
    alpha: MultiIndex,
    mu: Complex64,
    abs_mu: f64,
    class: &'static str,
}

#[derive(Serialize)]
struct ResonanceOutput {
    spectrum: Spectrum,
    max_order: usize,
    tol: f64,
    min_abs_mu: f64,
    non_resonant: bool,
    resonant: Vec<ResonanceRow>,
    near_resonant: Vec<ResonanceRow>,
    entries: Vec<ResonanceRow>,
}

fn resonance(a: ResonanceArgs) -> Result<(), CliError> {
    let parsed = load(&a.common, false)?;
    let report = check_resonance(&parsed.spectrum, a.order, a.tol)?;
    let classify = |mu: Complex64| {
        if mu.norm() <= report.tol {
            "resonant"
        } else if mu.norm() < koopman_core::spectrum::NEAR_RESONANCE_THRESHOLD {
            "near"
        } else {
            "ok"
        }
    };
    let rows = |v: &[koopman_core::spectrum::ResonanceEntry]| -> Vec<ResonanceRow> {
        v.iter()
            .map(|e| ResonanceRow {
                component: e.component + 1,
                alpha: e.alpha.clone(),
                mu: e.mu,
                abs_mu: e.mu.norm(),
                class: classify(e.mu),
            })
            .collect()
    };
    let text = match a.common.format.unwrap_or(Format::Json) {
        Format::Json => json(&ResonanceOutput {
            spectrum: parsed.spectrum.clone(),
            max_order: report.max_order,
            tol: report.tol,
            min_abs_mu: report.min_abs_mu,
            non_resonant: report.is_non_resonant(),
            resonant: rows(&report.resonant),
            near_resonant: rows(&report.near_resonant),
            entries: rows(&report.entries),
        }),
        Format::Csv => csv(
            &["component", "alpha", "mu_re", "mu_im", "abs_mu", "class"],
            &rows(&report.entries)
                .into_iter()
                .map(|r| {
                    vec![
                        r.component.to_string(),
                        alpha_label(&r.alpha),
                        num(r.mu.re),
                        num(r.mu.im),
                        num(r.abs_mu),
                        r.class.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
    };
    emit(a.common.out.as_deref(), &text)?;
    if report.is_non_resonant() {
        Ok(())
    } else {
        let list: Vec<String> = report
            .resonant
            .iter()
            .map(|e| format!("(j={}, alpha={})", e.component + 1, e.alpha))
            .collect();
        Err(CliError::Obstruction(format!("resonances found: {}", list.join(", "))))
    }
}

#[derive(Serialize)]
struct NormalformOutput<'a> {
    basis: Option<&'a Eigencoordinates>,
    sequence: &'a NormalFormSequence,
}

fn normalform(a: NormalformArgs) -> Result<(), CliError> {
    let parsed = load(&a.common, true)?;
    let opts = PipelineOpts {
        degree: Some(a.degree),
        beta: a.beta,
        resonance_tol: a.tol,
        norm_samples: a.samples,
        seed: a.seed,
    };
    let seq = pipeline(&parsed, &a.common, &opts, a.degree.max(2))?;
    let text = match a.common.format.unwrap_or(Format::Json) {
        Format::Json => json(&NormalformOutput {
            basis: parsed.basis.as_ref(),
            sequence: &seq,
        }),
        Format::Csv => {
            let mut rows = Vec::new();
            for s in &seq.stages {
                let mut any = false;
                for (j, p) in s.q.components().iter().enumerate() {
                    for (alpha, c) in p.terms() {
                        any = true;
                        rows.push(vec![
                            s.m.to_string(),
                            num(s.epsilon),
                            (j + 1).to_string(),
                            alpha_label(alpha),
                            num(c.re),
                            num(c.im),
                        ]);
                    }
                }
                if !any {
                    rows.push(vec![
                        s.m.to_string(),
                        num(s.epsilon),
                        String::new(),
                        String::new(),
                        num(0.0),
                        num(0.0),
                    ]);
                }
            }
            csv(&["m", "epsilon", "component", "alpha", "q_re", "q_im"], &rows)?
        }
    };
    emit(a.common.out.as_deref(), &text)
}

#[derive(Serialize)]
struct InvertOutput {
    m: usize,
    point: Vec<Complex64>,
    z: Vec<Complex64>,
    /// `‖τₘ(z) − x‖`.
    residual: f64,
    domain: DomainReport,
}

fn invert(a: InvertArgs) -> Result<(), CliError> {
    let parsed = load(&a.common, true)?;
    let x = parse_point(&a.point, parsed.spectrum.dim())?;
    let seq = pipeline(&parsed, &a.common, &a.pipeline, a.m)?;
    let z = tau_inverse_pointwise(&seq, a.m, &x, a.tol, a.max_iter)?;
    let back = tau_pointwise(&seq, a.m, &z)?;
    let residual = max_norm(&back.iter().zip(&x).map(|(u, v)| u - v).collect::<Vec<_>>());
    let domain = domain_check(&seq, a.m, &z)?;
    let text = match a.common.format.unwrap_or(Format::Json) {
        Format::Json => json(&InvertOutput {
            m: a.m,
            point: x,
            z,
            residual,
            domain,
        }),
        Format::Csv => csv(
            &["coordinate", "x_re", "x_im", "z_re", "z_im"],
            &x.iter()
                .zip(&z)
                .enumerate()
                .map(|(i, (xv, zv))| vec![(i + 1).to_string(), num(xv.re), num(xv.im), num(zv.re), num(zv.im)])
                .collect::<Vec<_>>(),
        )?,
    };
    emit(a.common.out.as_deref(), &text)
}

/// Rows `kind,radius,value`: one per radius, then the fit summary.
fn study_csv(
    value_kind: &str,
    radii: &[f64],
    values: &[f64],
    fit: Option<&SlopeFit>,
    extra: &[(&str, f64)],
) -> Result<String, CliError> {
    let mut rows: Vec<Vec<String>> = radii
        .iter()
        .zip(values)
        .map(|(r, v)| vec![value_kind.to_string(), num(*r), num(*v)])
        .collect();
    let (slope, r2, span) = fit.map_or((f64::NAN, f64::NAN, f64::NAN), |f| {
        (f.slope, f.r_squared, f.span_decades)
    });
    rows.push(vec!["fitted_slope".into(), String::new(), num(slope)]);
    rows.push(vec!["fit_rsquared".into(), String::new(), num(r2)]);
    rows.push(vec!["span_decades".into(), String::new(), num(span)]);
    for (k, v) in extra {
        rows.push(vec![k.to_string(), String::new(), num(*v)]);
    }
    csv(&["kind", "radius", "value"], &rows)
}

fn residual(a: ResidualArgs) -> Result<(), CliError> {
    let parsed = load(&a.common, true)?;
    let alpha = parse_alpha(&a.alpha, parsed.spectrum.dim())?;
    let radii = parse_radii(&a.radii)?;
    let seq = pipeline(&parsed, &a.common, &a.pipeline, a.m)?;
    let study = residual_study(
        &parsed.map,
        &seq,
        a.m,
        &alpha,
        &radii,
        a.samples,
        a.pipeline.seed,
        a.tol,
        a.max_iter,
    )?;
    let text = match a.common.format.unwrap_or(Format::Csv) {
        Format::Json => json(&study),
        Format::Csv => study_csv(
            "max_residual",
            &study.radii,
            &study.max_per_radius,
            study.fit.as_ref(),
            &[("skipped", study.skipped as f64), ("min_epsilon", study.min_epsilon)],
        )?,
    };
    emit(a.common.out.as_deref(), &text)
}

fn inverse_order(a: InverseOrderArgs) -> Result<(), CliError> {
    let parsed = load(&a.common, true)?;
    let radii = parse_radii(&a.radii)?;
    let seq = pipeline(&parsed, &a.common, &a.pipeline, a.m)?;
    let q: &VectorPoly = &seq.stage(a.m)?.q;
    let study = inverse_asymptotics_study(q, &radii, a.samples, a.pipeline.seed, a.tol, a.max_iter)?;
    let text = match a.common.format.unwrap_or(Format::Csv) {
        Format::Json => json(&study),
        Format::Csv => study_csv(
            "max_error",
            &study.radii,
            &study.max_per_radius,
            study.fit.as_ref(),
            &[("degenerate", if study.degenerate { 1.0 } else { 0.0 })],
        )?,
    };
    emit(a.common.out.as_deref(), &text)
}

fn density(a: DensityArgs) -> Result<(), CliError> {
    let parsed = load(&a.common, true)?;
    let n = parsed.spectrum.dim();
    if a.coord == 0 || a.coord > n {
        return Err(CliError::Usage(format!("--coord {} outside 1..={n}", a.coord)));
    }
    let seq = pipeline(&parsed, &a.common, &a.pipeline, a.m)?;
    let half_width = match a.half_width {
        Some(h) => h,
        None => 0.5 * seq.min_epsilon(a.m)?,
    };
    if half_width.is_nan() || half_width <= 0.0 {
        return Err(CliError::Usage("--box must be positive".into()));
    }
    let k = a.coord - 1;
    let f: fn(f64) -> f64 = match a.target {
        Target::Exp => f64::exp,
        Target::Sin => f64::sin,
        Target::Cos => f64::cos,
        Target::Abs => f64::abs,
        Target::One => |_| 1.0,
    };
    let target = |x: &[Complex64]| Complex64::new(f(x[k].re), 0.0);
    let region = GridBox::symmetric(n, half_width, a.grid);
    let table = density_demo(
        &target,
        &region,
        a.max_degree,
        &seq,
        a.m,
        !a.no_constant,
        a.tol,
        a.max_iter,
    )?;
    let text = match a.common.format.unwrap_or(Format::Csv) {
        Format::Json => json(&table),
        Format::Csv => csv(
            &["degree", "sup_error", "condition_flag"],
            &table
                .rows
                .iter()
                .map(|r| vec![r.degree.to_string(), num(r.sup_error), r.condition_flag.to_string()])
                .collect::<Vec<_>>(),
        )?,
    };
    emit(a.common.out.as_deref(), &text)
}
