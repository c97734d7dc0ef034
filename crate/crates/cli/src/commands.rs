use std::path::Path;

use serde_json::Value;

use hexcmc::assembly::{self, AssemblyConfig, AssemblySolution};
use hexcmc::construct::wulff_prism;
use hexcmc::delaunay::{self, DelaunayKind, DelaunayParams, SolveConfig};
use hexcmc::isoperimetry::{
    annulus_ratio, first_variation_functional, verify_lemma, AnnulusSpec, FaceTestFunction, LemmaConfig, LemmaReport,
    Witness,
};
use hexcmc::obj::{export_obj, parse_obj};
use hexcmc::offset_surface::{realize, RealizedSurface};
use hexcmc::par::Execution;

use crate::json::{self, num, Record};
use crate::{
    AnnulusArgs, ChainKind, CliError, CurvatureArgs, LemmaArgs, MeshArgs, MeshKind, Report, SolveArgs, SolveKind,
    SweepArgs, VariationArgs, EXIT_FAIL, EXIT_OK, EXIT_SOLVER,
};

const VARIATION_TOL: f64 = 1e-12;

fn invalid<T>(m: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Invalid(m.into()))
}

fn failure(kind: &str, mut context: Record, error: impl ToString) -> CliError {
    let mut m = Record::new();
    m.insert("kind".into(), kind.into());
    m.append(&mut context);
    m.insert("status".into(), "failed".into());
    m.insert("error".into(), error.to_string().into());
    CliError::Solver(Value::Object(m))
}

fn one(key: &str, v: Value) -> Record {
    let mut m = Record::new();
    m.insert(key.into(), v);
    m
}

fn report(record: Record, code: i32) -> Report {
    Report { text: json::to_text(&Value::Object(record)), code }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn chain_kind(k: ChainKind) -> DelaunayKind {
    match k {
        ChainKind::Unduloid => DelaunayKind::Unduloid,
        ChainKind::Nodoid => DelaunayKind::Nodoid,
    }
}

fn check_r(r: f64, name: &str) -> Result<(), CliError> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        invalid(format!("--{name} must be a finite number >= 0, got {r}"))
    }
}

fn check_tolerance(t: f64) -> Result<(), CliError> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        invalid(format!("--tolerance must be positive, got {t}"))
    }
}

pub fn solve(a: &SolveArgs) -> Result<Report, CliError> {
    check_tolerance(a.tolerance)?;
    let kind = match a.kind {
        SolveKind::Assembly => return solve_assembly(a),
        SolveKind::Unduloid => DelaunayKind::Unduloid,
        SolveKind::Nodoid => DelaunayKind::Nodoid,
    };
    if a.fit || a.m_n.is_some() {
        return invalid("--fit and --m-n apply to --kind assembly only");
    }
    let Some(r) = a.r else { return invalid("--r is required") };
    check_r(r, "r")?;
    let sol = delaunay::solve(kind, r, None, &SolveConfig::default())
        .map_err(|e| failure(kind.name(), one("r", num(r)), e))?;
    let mut m = json::delaunay(&sol.params);
    m.insert("residual_norm".into(), num(sol.residual_norm));
    m.insert("iterations".into(), sol.iterations.into());
    m.insert("period_length".into(), num(sol.params.period_length()));
    if sol.residual_norm < a.tolerance {
        Ok(report(m, EXIT_OK))
    } else {
        Err(failure(kind.name(), m, format!("residual {:e} above tolerance {:e}", sol.residual_norm, a.tolerance)))
    }
}

fn solve_assembly(a: &SolveArgs) -> Result<Report, CliError> {
    if a.m_u == 0 || a.m_n == Some(0) {
        return invalid("--m-u and --m-n must be positive");
    }
    let cfg = AssemblyConfig::default();
    let (sol, fit_iterations) = if a.fit {
        if a.r.is_some() {
            return invalid("--fit chooses r1 itself; drop --r");
        }
        let fit = assembly::fit_closure(a.m_u, a.m_n, &cfg)
            .map_err(|e| failure("assembly", one("m_u", a.m_u.into()), e))?;
        (fit.solution, Some(fit.iterations))
    } else {
        let Some(r1) = a.r else { return invalid("--r or --fit is required") };
        check_r(r1, "r")?;
        let m_n = a.m_n.unwrap_or(2 * a.m_u + 1);
        let sol = assembly::solve_assembly(r1, a.m_u, m_n, &cfg).map_err(|e| failure("assembly", one("r1", num(r1)), e))?;
        (sol, None)
    };
    let mut m = json::assembly(&sol);
    m.insert("fitted".into(), (sol.mismatch().abs() < assembly::UNFITTED_TOL).into());
    if let Some(n) = fit_iterations {
        m.insert("fit_iterations".into(), n.into());
    }
    if sol.residual_norm < a.tolerance {
        Ok(report(m, EXIT_OK))
    } else {
        Err(failure("assembly", m, format!("residual {:e} above tolerance {:e}", sol.residual_norm, a.tolerance)))
    }
}

enum Loaded {
    Chain(DelaunayParams),
    Assembly(AssemblySolution),
}

fn load_params(path: &Path) -> Result<Loaded, CliError> {
    let v = json::parse(&crate::read_file(path)?, &path.display().to_string())?;
    match json::get_str(&v, "kind")? {
        "assembly" => Ok(Loaded::Assembly(json::assembly_from(&v)?)),
        _ => Ok(Loaded::Chain(json::delaunay_from(&v)?)),
    }
}

fn build_chain(p: &DelaunayParams) -> Result<RealizedSurface, CliError> {
    let mut ctx = json::delaunay(p);
    ctx.shift_remove("kind");
    delaunay::build_period(p).map_err(|e| failure(p.kind.name(), ctx, e))
}

fn build_fitted(sol: &AssemblySolution) -> Result<RealizedSurface, CliError> {
    assembly::build_assembly(sol)
        .map(|a| a.surface)
        .map_err(|e| failure("assembly", one("r1", num(sol.params.r1)), e))
}

fn wulff() -> Result<RealizedSurface, CliError> {
    realize(&wulff_prism()).map_err(|e| failure("wulff", Record::new(), e))
}

fn vector(v: hexcmc::hexnorm::Vec3) -> Value {
    Value::Array(vec![num(v.x), num(v.y), num(v.z)])
}

pub fn mesh(a: &MeshArgs) -> Result<Report, CliError> {
    let (name, surface) = match a.kind {
        MeshKind::Wulff => {
            if a.params.is_some() || a.r.is_some() {
                return invalid("--kind wulff takes no parameters");
            }
            ("wulff", wulff()?)
        }
        MeshKind::Unduloid | MeshKind::Nodoid => {
            let kind = if a.kind == MeshKind::Unduloid { DelaunayKind::Unduloid } else { DelaunayKind::Nodoid };
            let params = match (&a.params, a.r) {
                (Some(path), None) => match load_params(path)? {
                    Loaded::Chain(p) if p.kind == kind => p,
                    _ => return invalid(format!("{} does not hold {} parameters", path.display(), kind.name())),
                },
                (None, Some(r)) => {
                    check_r(r, "r")?;
                    delaunay::solve(kind, r, None, &SolveConfig::default())
                        .map_err(|e| failure(kind.name(), one("r", num(r)), e))?
                        .params
                }
                _ => return invalid("give exactly one of --params and --r"),
            };
            (kind.name(), build_chain(&params)?)
        }
        MeshKind::Assembly => {
            if a.r.is_some() {
                return invalid("--kind assembly takes a fitted --params file");
            }
            let Some(path) = &a.params else {
                return Err(failure("assembly", Record::new(), "no fitted parameters: run `solve --kind assembly --fit` and pass --params"));
            };
            match load_params(path)? {
                Loaded::Assembly(sol) => ("assembly", build_fitted(&sol)?),
                Loaded::Chain(_) => return invalid(format!("{} does not hold assembly parameters", path.display())),
            }
        }
    };
    let text = export_obj(&surface).map_err(|e| failure(name, Record::new(), e))?;
    let counts = parse_obj(&text).map_err(|e| failure(name, Record::new(), e))?;
    let mut side = Record::new();
    side.insert("kind".into(), name.into());
    side.insert("objects".into(), counts.objects.len().into());
    side.insert("vertices".into(), counts.vertices.len().into());
    side.insert("faces".into(), counts.faces.len().into());
    side.insert("E".into(), num(surface.energy));
    side.insert("V".into(), num(surface.volume));
    side.insert("closure".into(), num(surface.closure_vector().norm()));
    side.insert("period".into(), surface.topology.period.map_or(Value::Null, vector));
    crate::write_file(&a.out, &text)?;
    let mut sidecar = a.out.clone().into_os_string();
    sidecar.push(".json");
    crate::write_file(sidecar.as_ref(), &json::to_text(&Value::Object(side)))?;
    Ok(Report { text: String::new(), code: EXIT_OK })
}

fn annulus(a: &AnnulusArgs) -> Result<AnnulusSpec, CliError> {
    AnnulusSpec::new(a.x0.unwrap_or(a.hole), a.y0.unwrap_or(a.hole), a.x1, a.y1).map_err(|e| CliError::Invalid(e.to_string()))
}

fn annulus_record(a: &AnnulusSpec) -> Value {
    let mut m = Record::new();
    for (k, v) in [("x0", a.x0), ("y0", a.y0), ("x1", a.x1), ("y1", a.y1)] {
        m.insert(k.into(), num(v));
    }
    Value::Object(m)
}

fn witness_record(w: &Witness) -> Value {
    let mut m = Record::new();
    m.insert("source".into(), w.source.clone().into());
    let rects = w.rects.iter().map(|r| Value::Array(vec![num(r.xa), num(r.xb), num(r.ya), num(r.yb)])).collect();
    m.insert("rects".into(), Value::Array(rects));
    m.insert("perimeter".into(), num(w.perimeter));
    m.insert("area".into(), num(w.area));
    m.insert("ratio".into(), num(w.ratio));
    m.insert("margin".into(), num(w.margin));
    Value::Object(m)
}

fn lemma_record(r: &LemmaReport) -> Record {
    let mut m = Record::new();
    m.insert("annulus".into(), annulus_record(&r.annulus));
    m.insert("annulus_ratio".into(), num(r.annulus_ratio));
    m.insert("lemma_regime".into(), r.lemma_regime.into());
    m.insert("trials".into(), r.trials.into());
    m.insert("resolution".into(), r.resolution.into());
    m.insert("regions_checked".into(), r.regions_checked.into());
    m.insert("min_margin".into(), num(r.min_margin));
    m.insert("min_proper_margin".into(), num(r.min_proper_margin));
    m.insert("witness".into(), witness_record(&r.witness));
    m.insert("pass".into(), r.pass.into());
    m
}

pub fn lemma(a: &LemmaArgs) -> Result<Report, CliError> {
    let spec = annulus(&a.annulus)?;
    if !(1..=12).contains(&a.resolution) {
        return invalid("--resolution must be between 1 and 12");
    }
    let cfg = LemmaConfig { trials: a.trials, resolution: a.resolution, seed: a.seed, ..LemmaConfig::default() };
    let r = verify_lemma(&spec, &cfg, execution(a.sequential)).map_err(|e| CliError::Invalid(e.to_string()))?;
    let code = if r.pass { EXIT_OK } else { EXIT_FAIL };
    let mut m = lemma_record(&r);
    m.insert("seed".into(), a.seed.into());
    Ok(report(m, code))
}

pub fn variation(a: &VariationArgs) -> Result<Report, CliError> {
    let spec = annulus(&a.annulus)?;
    if a.grid == 0 || a.functions == 0 {
        return invalid("--grid and --functions must be positive");
    }
    let rho = annulus_ratio(&spec).map_err(|e| CliError::Invalid(e.to_string()))?;
    let err = |e: hexcmc::isoperimetry::IsoError| CliError::Invalid(e.to_string());
    let constant = first_variation_functional(&FaceTestFunction::constant(&spec, a.grid, 1.0).map_err(err)?).map_err(err)?;
    let seeds: Vec<u64> = (0..a.functions as u64).map(|i| a.seed.wrapping_add(i)).collect();
    let values = execution(a.sequential).map(&seeds, |&s| first_variation_functional(&FaceTestFunction::random(&spec, a.grid, s)));
    let mut worst = (f64::INFINITY, a.seed);
    for (v, &s) in values.into_iter().zip(&seeds) {
        let v = v.map_err(err)?;
        if v < worst.0 {
            worst = (v, s);
        }
    }
    let pass = constant == 0.0 && worst.0 >= -VARIATION_TOL;
    let mut m = Record::new();
    m.insert("annulus".into(), annulus_record(&spec));
    m.insert("rho".into(), num(rho));
    m.insert("grid".into(), a.grid.into());
    m.insert("functions".into(), a.functions.into());
    m.insert("seed".into(), a.seed.into());
    m.insert("I_constant".into(), num(constant));
    m.insert("min_I".into(), num(worst.0));
    m.insert("min_I_seed".into(), worst.1.into());
    m.insert("pass".into(), pass.into());
    Ok(report(m, if pass { EXIT_OK } else { EXIT_FAIL }))
}

pub fn curvature(a: &CurvatureArgs) -> Result<Report, CliError> {
    check_tolerance(a.tolerance)?;
    let (name, surface) = match (&a.surface, a.wulff) {
        (None, true) => ("wulff", wulff()?),
        (Some(path), false) => match load_params(path)? {
            Loaded::Chain(p) => (p.kind.name(), build_chain(&p)?),
            Loaded::Assembly(sol) => ("assembly", build_fitted(&sol)?),
        },
        _ => return invalid("give --surface or --wulff"),
    };
    let residuals = surface.mean_curvature_residual().map_err(|e| failure(name, Record::new(), e))?;
    let max = residuals.values().fold(0.0f64, |m, v| m.max(v.abs()));
    let closure = surface.closure_vector().norm();
    let pass = max < a.tolerance && closure < a.tolerance;
    let mut classes = Record::new();
    for (c, v) in &residuals {
        classes.insert(c.as_str().into(), num(*v));
    }
    let mut m = Record::new();
    m.insert("kind".into(), name.into());
    m.insert("residuals".into(), Value::Object(classes));
    m.insert("max_residual".into(), num(max));
    m.insert("closure".into(), num(closure));
    m.insert("tolerance".into(), num(a.tolerance));
    m.insert("pass".into(), pass.into());
    Ok(report(m, if pass { EXIT_OK } else { EXIT_FAIL }))
}

const MAX_SWEEP_ROWS: usize = 100_000;

/// `start:stop:step` (inclusive of `stop` up to rounding) or `a,b,c`.
pub fn parse_r_values(spec: &str) -> Result<Vec<f64>, CliError> {
    let number = |t: &str| -> Result<f64, CliError> {
        let x: f64 = t.trim().parse().map_err(|_| CliError::Invalid(format!("not a number: {t}")))?;
        check_r(x, "r")?;
        Ok(x)
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if step <= 0.0 || stop < start {
                return invalid(format!("empty range {spec}"));
            }
            let n = ((stop - start) / step + 1e-9).floor() + 1.0;
            if n > MAX_SWEEP_ROWS as f64 {
                return invalid(format!("range {spec} has more than {MAX_SWEEP_ROWS} values"));
            }
            (0..n as usize).map(|i| start + i as f64 * step).collect()
        }
        [list] => list.split(',').filter(|t| !t.trim().is_empty()).map(number).collect::<Result<Vec<_>, _>>()?,
        _ => return invalid(format!("expected start:stop:step or a comma-separated list, got {spec}")),
    };
    if values.is_empty() {
        return invalid("empty r list");
    }
    Ok(values)
}

fn e17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sweep(a: &SweepArgs) -> Result<Report, CliError> {
    let values = parse_r_values(&a.r)?;
    let rows = delaunay::sweep(chain_kind(a.kind), &values, &SolveConfig::default(), execution(a.sequential));
    let mut csv = String::from("r,Q,R,S,q,s,residual,period_length\n");
    let mut failed = false;
    for row in &rows {
        match &row.result {
            Ok(sol) => {
                let p = &sol.params;
                let cells = [p.r, p.Q, p.R, p.S, p.q, p.s, sol.residual_norm, p.period_length()].map(e17);
                csv.push_str(&cells.join(","));
            }
            Err(_) => {
                failed = true;
                csv.push_str(&format!("{},,,,,,failed,", e17(row.r)));
            }
        }
        csv.push('\n');
    }
    let code = if failed { EXIT_SOLVER } else { EXIT_OK };
    match &a.out {
        Some(path) => {
            crate::write_file(path, &csv)?;
            Ok(Report { text: String::new(), code })
        }
        None => Ok(Report { text: csv, code }),
    }
}
