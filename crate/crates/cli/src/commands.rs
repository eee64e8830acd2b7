use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use hilbert_bodies::classify::{verdict, BodyVerdict};
use hilbert_bodies::directions::directions;
use hilbert_bodies::geometry::{support_interval, SectionEvaluator, SectionOptions};
use hilbert_bodies::identities::{run_suite, IdentityReport, Suite};
use hilbert_bodies::{Body, BodyError, Direction, OutputFormat, RunConfig};
use serde_json::json;

use crate::output::{csv_preamble, csv_table, emit, json_document, num};

/// Exit codes shared by every command.
pub mod code {
    pub const OK: u8 = 0;
    pub const FAILED: u8 = 1;
    pub const NOT_ELLIPSOID: u8 = 1;
    pub const INVALID: u8 = 2;
    pub const MALFORMED: u8 = 3;
    pub const INCONSISTENT: u8 = 4;
    pub const NOISE_FLOOR: u8 = 5;
}

pub fn load_body(path: &Path) -> Result<Body, BodyError> {
    Body::from_path(path)
}

fn parse_direction(text: &str, body: &Body) -> Result<Direction, BodyError> {
    let dir = Direction::parse(text)?;
    if dir.dim() != body.dim() {
        return Err(BodyError::DimensionMismatch { expected: body.dim(), got: dir.dim() });
    }
    Ok(dir)
}

fn coords(dir: &Direction) -> String {
    dir.coords().iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
}

pub fn validate(path: &Path, seed: u64) -> Result<u8> {
    let body = load_body(path)?;
    let n = body.dim();
    println!("body: {} in dimension {n}", body.kind_name());
    println!("center: {:?}", body.center());
    println!("checks: parameters valid, body convex");
    println!("smooth: {}", if body.is_smooth() { "yes" } else { "no (section analysis will warn)" });

    // Gauge sanity: boundary points c + u/‖u‖ must touch, never cross, the support planes.
    let c = body.center();
    let centered = body.translated(&c.iter().map(|x| -x).collect::<Vec<_>>());
    let mut gauge_drift = 0.0_f64;
    let mut support_excess = 0.0_f64;
    for dir in directions(n, 16, seed)? {
        let g = centered.gauge(dir.coords())?;
        let edge: Vec<f64> = dir.coords().iter().map(|u| u / g).collect();
        gauge_drift = gauge_drift.max((centered.gauge(&edge)? - 1.0).abs());
        let iv = support_interval(&centered, &dir)?;
        support_excess = support_excess.max(dir.dot(&edge) - iv.h_plus);
    }
    println!("gauge sanity (16 directions): |gauge(boundary) - 1| <= {gauge_drift:.1e}, support excess {support_excess:.1e}");
    if gauge_drift > 1e-8 || support_excess > 1e-8 {
        println!("gauge sanity failed");
        return Ok(code::INVALID);
    }
    println!("valid");
    Ok(code::OK)
}

pub fn section(path: &Path, dir: &str, cfg: &RunConfig, out: Option<&Path>) -> Result<u8> {
    let body = load_body(path)?;
    let dir = parse_direction(dir, &body)?;
    let ev = SectionEvaluator::new(&body, &dir, SectionOptions::from(cfg))?;
    let profile = ev.profile(cfg.node_count)?;
    let iv = profile.interval;
    let text = match cfg.format {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = profile
                .nodes
                .iter()
                .zip(&profile.values)
                .enumerate()
                .map(|(j, (t, a))| {
                    let err = profile.stderr.as_ref().map(|e| num(e[j])).unwrap_or_default();
                    vec![num(*t), num(*a), profile.source.as_str().to_string(), err]
                })
                .collect();
            let preamble = csv_preamble(
                "section",
                cfg,
                &[
                    format!("body: {} dim={}", body.kind_name(), body.dim()),
                    format!("direction: {}", coords(&dir)),
                    format!("support: h_minus={} h_plus={}", num(iv.h_minus), num(iv.h_plus)),
                    "columns: t = level x.xi; area = section volume A(xi, t); source = closed-form|chord|monte-carlo; stderr = Monte Carlo standard error (empty otherwise)".into(),
                ],
            );
            preamble + &csv_table(&["t", "area", "source", "stderr"], &rows)?
        }
        OutputFormat::Json => {
            let rows: Vec<_> = profile
                .nodes
                .iter()
                .zip(&profile.values)
                .enumerate()
                .map(|(j, (t, a))| json!({ "t": t, "area": a, "stderr": profile.stderr.as_ref().map(|e| e[j]) }))
                .collect();
            json_document(
                "section",
                cfg,
                json!({ "body": body.spec().to_file(), "direction": dir.coords(), "support": iv,
                        "source": profile.source, "rows": rows }),
            )?
        }
    };
    emit(out, &text)?;
    Ok(code::OK)
}

pub fn identities(suites: &[Suite], seed: u64, cfg: &RunConfig, out: Option<&Path>) -> Result<u8> {
    let mut reports: Vec<IdentityReport> = Vec::new();
    println!("{:<11} {:<28} {:>6} {:>11} {:>9}  status", "suite", "case", "degree", "max error", "tol");
    for suite in suites {
        let r = run_suite(*suite, seed)?;
        for row in &r.rows {
            let degree = row.degree.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
            let status = if row.passed { "pass" } else { "FAIL" };
            println!("{:<11} {:<28} {degree:>6} {:>11.3e} {:>9.0e}  {status}", suite.name(), row.label, row.max_error, r.tolerance);
        }
        reports.push(r);
    }
    println!();
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{:<11} max error {:.3e} (tolerance {:.0e})  {status}", r.suite.name(), r.max_error, r.tolerance);
    }
    if out.is_some() {
        let text = match cfg.format {
            OutputFormat::Csv => {
                let rows: Vec<Vec<String>> = reports
                    .iter()
                    .flat_map(|r| {
                        r.rows.iter().map(move |row| {
                            vec![
                                r.suite.name().to_string(),
                                row.label.clone(),
                                row.degree.map(|d| d.to_string()).unwrap_or_default(),
                                num(row.max_error),
                                num(r.tolerance),
                                row.passed.to_string(),
                            ]
                        })
                    })
                    .collect();
                csv_preamble("identities", cfg, &[format!("suite seed: {seed}")])
                    + &csv_table(&["suite", "case", "degree", "max_error", "tolerance", "passed"], &rows)?
            }
            OutputFormat::Json => json_document("identities", cfg, json!({ "suite_seed": seed, "suites": reports }))?,
        };
        emit(out, &text)?;
    }
    Ok(if reports.iter().all(|r| r.passed) { code::OK } else { code::FAILED })
}

fn verdict_code(v: &BodyVerdict) -> u8 {
    if v.noise_limited() {
        code::NOISE_FLOOR
    } else if !v.consistent() {
        code::INCONSISTENT
    } else if v.ellipsoid_compatible {
        code::OK
    } else {
        code::NOT_ELLIPSOID
    }
}

fn direction_rows(v: &BodyVerdict) -> Vec<Vec<String>> {
    let warning = v.warnings.join("; ");
    let planar = v.dim == 2;
    let theta = |d: &Direction| if planar { num(d.coords()[1].atan2(d.coords()[0])) } else { String::new() };
    let mut rows: Vec<(usize, Vec<String>)> = v
        .directions
        .iter()
        .map(|d| {
            (
                d.index,
                vec![
                    d.index.to_string(),
                    theta(&d.direction),
                    coords(&d.direction),
                    d.source.as_str().to_string(),
                    num(d.tolerance),
                    num(d.residual_i),
                    num(d.residual_ii),
                    num(d.residual_iii),
                    d.degree_i.to_string(),
                    d.degree_ii.to_string(),
                    d.degree_iii.to_string(),
                    num(d.asymptotics.exponent_plus),
                    num(d.asymptotics.exponent_minus),
                    warning.clone(),
                ],
            )
        })
        .collect();
    for s in &v.skipped {
        let mut row = vec![s.index.to_string(), theta(&s.direction), coords(&s.direction), "skipped".into()];
        row.extend(std::iter::repeat_n(String::new(), 9));
        let reason = if warning.is_empty() { s.reason.clone() } else { format!("{warning}; {}", s.reason) };
        row.push(reason);
        rows.push((s.index, row));
    }
    rows.sort_by_key(|r| r.0);
    rows.into_iter().map(|r| r.1).collect()
}

const DIRECTION_COLUMNS: [&str; 14] = [
    "index",
    "theta",
    "xi",
    "source",
    "tolerance",
    "residual_i",
    "residual_ii",
    "residual_iii",
    "degree_i",
    "degree_ii",
    "degree_iii",
    "exponent_plus",
    "exponent_minus",
    "warning",
];

fn direction_csv(command: &str, v: &BodyVerdict, cfg: &RunConfig) -> Result<String> {
    let preamble = csv_preamble(
        command,
        cfg,
        &[
            format!("body: {} dim={}", v.kind, v.dim),
            "columns: theta = polar angle of xi (planar bodies only); xi = unit direction, ';'-separated; residual_* = relative sup residual of conditions (i)-(iii) at the fitted degree; exponent_* = boundary decay exponents at h_plus / h_minus".into(),
        ],
    );
    Ok(preamble + &csv_table(&DIRECTION_COLUMNS, &direction_rows(v))?)
}

fn print_summary(v: &BodyVerdict) {
    println!("body: {} in dimension {}", v.kind, v.dim);
    println!("directions: {} evaluated, {} skipped", v.directions.len(), v.skipped.len());
    let worst = |f: fn(&hilbert_bodies::classify::DirectionVerdict) -> f64| v.directions.iter().map(f).fold(0.0_f64, f64::max);
    println!(
        "condition (i): {}  (ii): {}  (iii): {}   worst residuals {:.2e} / {:.2e} / {:.2e}",
        v.pass_i,
        v.pass_ii,
        v.pass_iii,
        worst(|d| d.residual_i),
        worst(|d| d.residual_ii),
        worst(|d| d.residual_iii)
    );
    println!("ellipsoid compatible: {}", v.ellipsoid_compatible);
    for line in v.diagnostics.iter() {
        println!("diagnostic: {line}");
    }
    for line in v.warnings.iter() {
        println!("warning: {line}");
    }
    for line in v.notes.iter() {
        println!("note: {line}");
    }
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    match prefix.extension() {
        Some(e) if e == "json" || e == "csv" => prefix.with_extension(ext),
        _ => {
            let mut s = prefix.as_os_str().to_owned();
            s.push(".");
            s.push(ext);
            PathBuf::from(s)
        }
    }
}

pub fn classify(path: &Path, cfg: &RunConfig, out: Option<&Path>) -> Result<u8> {
    let body = load_body(path)?;
    let v = verdict(&body, cfg)?;
    print_summary(&v);
    if let Some(prefix) = out {
        let json = json_document("classify", cfg, json!({ "body": body.spec().to_file(), "verdict": &v }))?;
        emit(Some(&with_ext(prefix, "json")), &json)?;
        emit(Some(&with_ext(prefix, "csv")), &direction_csv("classify", &v, cfg)?)?;
    }
    let code = verdict_code(&v);
    if v.directions.is_empty() && code != code::NOISE_FLOOR {
        bail!("every direction failed: {}", v.skipped.first().map(|s| s.reason.as_str()).unwrap_or("no directions"));
    }
    if code == code::NOISE_FLOOR {
        eprintln!(
            "Monte Carlo noise is above the usable tolerance in {} direction(s); raise --samples (now {})",
            v.skipped.iter().filter(|s| s.noise_floor).count(),
            cfg.mc_samples
        );
    }
    Ok(code)
}

pub fn sweep(path: &Path, cfg: &RunConfig, out: Option<&Path>) -> Result<u8> {
    let body = load_body(path)?;
    let v = verdict(&body, cfg)?;
    let text = match cfg.format {
        OutputFormat::Csv => direction_csv("sweep", &v, cfg)?,
        OutputFormat::Json => json_document(
            "sweep",
            cfg,
            json!({ "body": body.spec().to_file(), "warnings": &v.warnings, "directions": &v.directions, "skipped": &v.skipped }),
        )?,
    };
    emit(out, &text)?;
    if v.directions.is_empty() {
        bail!("every direction failed: {}", v.skipped.first().map(|s| s.reason.as_str()).unwrap_or("no directions"));
    }
    Ok(code::OK)
}
