//! Command-line front end: curves, tables and verification reports as CSV
//! or JSON.

use crate::beta_even::{self, AppendixACase, EvenBetaQuery, SystemSize};
use crate::correlations::{self, Rho2Identity};
use crate::error::{Error, Result};
use crate::{gap, painleve, sff, spacing};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "cbe", version, about = "Circular β-ensemble numerics: gap probabilities, spacings, form factors, two-point functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gap generating functions E₀, E₁ (bulk) or the finite-N CUE value.
    Gap(Opts),
    /// Spacing generating functions P₀, P₁.
    Spacing(Opts),
    /// Structure functions: bulk terms, finite-N exact values, small-τ series.
    Sff(Opts),
    /// Two-point functions and their 1/N² terms.
    Rho2(Opts),
    /// Differential identities with residuals against fixed tolerances.
    Verify(Opts),
    /// Exact P₁(s; 1) at β = 2 next to the surmise-based approximation.
    Fig1(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    #[arg(long, value_parser = ["1", "2", "4", "6"])]
    pub beta: Option<String>,
    /// Finite system size.
    #[arg(long = "N", conflicts_with = "limit")]
    pub n: Option<usize>,
    /// Bulk limit (default when --N is absent).
    #[arg(long)]
    pub limit: bool,
    #[arg(long)]
    pub xi: Option<f64>,
    /// Grid as lo:hi:count.
    #[arg(long, value_parser = parse_range)]
    pub range: Option<Range>,
    /// Single spacing or gap length.
    #[arg(long, conflicts_with_all = ["range", "tau", "x"])]
    pub s: Option<f64>,
    /// Single form-factor argument.
    #[arg(long, conflicts_with_all = ["range", "x"])]
    pub tau: Option<f64>,
    /// Single two-point separation.
    #[arg(long, conflicts_with = "range")]
    pub x: Option<f64>,
    #[arg(long)]
    pub order: Option<usize>,
    /// Quadrature order.
    #[arg(long)]
    pub quad: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Identity name for `verify` (default: all).
    #[arg(long)]
    pub identity: Option<String>,
    /// Multiplies every verification tolerance.
    #[arg(long, default_value_t = 1.0)]
    pub tol_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.lo + step * i as f64).collect()
    }
}

fn parse_range(s: &str) -> std::result::Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:count, got '{s}'"));
    }
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad number '{p}': {e}"));
    let (lo, hi) = (num(parts[0])?, num(parts[1])?);
    let count = parts[2].trim().parse::<usize>().map_err(|e| format!("bad count '{}': {e}", parts[2]))?;
    if count == 0 {
        return Err("range count must be positive".into());
    }
    if !(lo.is_finite() && hi.is_finite()) || (count > 1 && !(lo < hi)) {
        return Err(format!("range needs finite lo < hi, got {lo}:{hi}"));
    }
    Ok(Range { lo, hi, count })
}

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => t.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Int(i) => json!(i),
            Cell::Text(t) => json!(t),
        }
    }
}

/// 17 significant digits, no locale.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Rows of named columns plus run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub params: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub warnings: Vec<String>,
}

impl Table {
    fn new(command: &str, columns: &[&str]) -> Self {
        Table {
            command: command.to_string(),
            params: Map::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
            warnings: vec![],
        }
    }

    fn param(&mut self, key: &str, v: Value) {
        self.params.insert(key.to_string(), v);
    }

    fn push_nums(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&v| Cell::Num(v)).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for w in &self.warnings {
            out.push_str(&format!("# warning: {w}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "params": Value::Object(self.params.clone()),
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("table serialises");
                s.push('\n');
                s
            }
        }
    }
}

/// The JSON schema output files conform to.
pub const OUTPUT_SCHEMA: &str = include_str!("../schema/output.schema.json");

fn beta_of(o: &Opts, default: u32, allowed: &[u32]) -> Result<u32> {
    let b = match &o.beta {
        Some(s) => s.parse::<u32>().map_err(|_| Error::InvalidArgument(format!("bad beta '{s}'")))?,
        None => default,
    };
    if !allowed.contains(&b) {
        return Err(Error::InvalidArgument(format!("this command supports beta in {allowed:?}, got {b}")));
    }
    Ok(b)
}

fn grid(o: &Opts, single: Option<f64>, default: Range) -> Vec<f64> {
    match (single, o.range) {
        (Some(v), _) => vec![v],
        (None, Some(r)) => r.points(),
        (None, None) => default.points(),
    }
}

fn xi_of(o: &Opts) -> Result<f64> {
    let xi = o.xi.unwrap_or(1.0);
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::InvalidArgument(format!("xi must lie in [0, 1], got {xi}")));
    }
    Ok(xi)
}

fn orders(o: &Opts, max: usize) -> Result<Vec<usize>> {
    match o.order {
        Some(k) if k <= max => Ok(vec![k]),
        Some(k) => Err(Error::InvalidArgument(format!("order must be at most {max}, got {k}"))),
        None => Ok((0..=max).collect()),
    }
}

fn run_gap(o: &Opts) -> Result<Table> {
    let beta = beta_of(o, 2, &[1, 2, 4])?;
    let xi = xi_of(o)?;
    let s_grid = grid(o, o.s, Range { lo: 0.0, hi: 3.0, count: 31 });
    if s_grid.iter().any(|&s| s < 0.0) {
        return Err(Error::InvalidArgument("s must be nonnegative".into()));
    }
    let mut t;
    match o.n {
        Some(n) => {
            if beta != 2 {
                return Err(Error::InvalidArgument("finite-N gap probabilities are available for beta = 2".into()));
            }
            t = Table::new("gap", &["s", "E"]);
            t.param("N", json!(n));
            for &s in &s_grid {
                let phi = 2.0 * std::f64::consts::PI * s / n as f64;
                t.push_nums(&[s, gap::e_finite_cue(n, phi, xi)?]);
            }
        }
        None => {
            t = Table::new("gap", &["s", "E0", "E1"]);
            let quad = o.quad.unwrap_or(crate::numerics::DEFAULT_LEGENDRE_NODES);
            t.param("quad", json!(quad));
            for &s in &s_grid {
                let r = gap::gap_bulk(beta, s, xi, quad)?;
                if let Some(w) = r.warning {
                    t.warnings.push(format!("s = {s}: {w}"));
                }
                t.push_nums(&[s, r.e0, r.e1]);
            }
        }
    }
    t.param("beta", json!(beta));
    t.param("xi", json!(xi));
    Ok(t)
}

fn run_spacing(o: &Opts) -> Result<Table> {
    let beta = beta_of(o, 2, &[1, 2, 4])?;
    let xi = xi_of(o)?;
    let ords = orders(o, 1)?;
    let s_grid = grid(o, o.s, Range { lo: 0.0, hi: 3.0, count: 61 });
    if s_grid.iter().any(|&s| !(0.0..=spacing::SpacingCurve::S_MAX).contains(&s)) {
        return Err(Error::InvalidArgument("s must lie in [0, 4]".into()));
    }
    let names: Vec<String> = ords.iter().map(|k| format!("P{k}")).collect();
    let mut cols = vec!["s"];
    cols.extend(names.iter().map(String::as_str));
    let mut t = Table::new("spacing", &cols);
    let curves = if xi > 0.0 {
        ords.iter().map(|&k| spacing::SpacingCurve::new(beta, k, xi).map(Some)).collect::<Result<Vec<_>>>()?
    } else {
        vec![None; ords.len()]
    };
    for &s in &s_grid {
        let mut row = vec![s];
        for (&k, c) in ords.iter().zip(&curves) {
            row.push(match c {
                Some(c) => c.at(s),
                None => correlations::rho2_bulk_term(beta, k, s)?,
            });
        }
        t.push_nums(&row);
    }
    t.param("beta", json!(beta));
    t.param("xi", json!(xi));
    Ok(t)
}

fn run_sff(o: &Opts) -> Result<Table> {
    let beta = beta_of(o, 2, &[1, 2, 4, 6])?;
    let ords = orders(o, 2)?;
    let taus = grid(o, o.tau, Range { lo: 0.0, hi: 2.0, count: 41 });
    let mut cols: Vec<String> = vec!["tau".into()];
    cols.extend(ords.iter().map(|k| format!("S{k}")));
    if let Some(n) = o.n {
        cols.push(format!("S_N{n}"));
    }
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new("sff", &col_refs);
    let series = beta == 6;
    if series {
        if o.n.is_some() {
            return Err(Error::InvalidArgument("exact finite-N values need beta in {1, 2, 4}".into()));
        }
        if taus.iter().any(|t| t.abs() > 0.3) {
            t.warnings.push("small-tau series used beyond |tau| = 0.3".into());
        }
        t.param("source", json!("small-tau series"));
    }
    for &tau in &taus {
        let mut row = vec![tau];
        for &k in &ords {
            row.push(if series {
                sff::sff_series(beta as f64, k, tau)?
            } else {
                sff::sff_bulk_term(beta, k, tau)?
            });
        }
        if let Some(n) = o.n {
            row.push(sff::sff_scaled(beta, n, tau)?);
        }
        t.push_nums(&row);
    }
    t.param("beta", json!(beta));
    Ok(t)
}

fn run_rho2(o: &Opts) -> Result<Table> {
    let beta = beta_of(o, 2, &[1, 2, 4, 6])?;
    let xs = grid(o, o.x, Range { lo: 0.05, hi: 3.0, count: 60 });
    let mut t;
    match o.n {
        Some(n) => {
            t = Table::new("rho2", &["x", "rho2"]);
            t.param("N", json!(n));
            for &x in &xs {
                let v = if beta == 6 {
                    let r = beta_even::rho2_even_beta_with(
                        &EvenBetaQuery { beta, n: SystemSize::Finite(n as f64), x },
                        o.quad,
                    )?;
                    if let Some(w) = r.warning {
                        t.warnings.push(format!("x = {x}: {w}"));
                    }
                    r.value
                } else {
                    correlations::rho_n_bulk(beta, n, &[0.0, x])?
                };
                t.push_nums(&[x, v]);
            }
        }
        None if beta == 6 => {
            if o.order.unwrap_or(0) != 0 {
                return Err(Error::InvalidArgument("beta = 6 has only the leading term".into()));
            }
            t = Table::new("rho2", &["x", "rho0"]);
            for &x in &xs {
                let r = beta_even::rho2_even_beta_with(&EvenBetaQuery { beta, n: SystemSize::Limit, x }, o.quad)?;
                if let Some(w) = r.warning {
                    t.warnings.push(format!("x = {x}: {w}"));
                }
                t.push_nums(&[x, r.value]);
            }
        }
        None => {
            let ords = orders(o, if beta == 2 { 2 } else { 1 })?;
            let names: Vec<String> = ords.iter().map(|k| format!("rho{k}")).collect();
            let mut cols = vec!["x"];
            cols.extend(names.iter().map(String::as_str));
            t = Table::new("rho2", &cols);
            for &x in &xs {
                let mut row = vec![x];
                for &k in &ords {
                    row.push(correlations::rho2_bulk_term(beta, k, x)?);
                }
                t.push_nums(&row);
            }
        }
    }
    if beta == 4 && o.n.is_some() {
        t.param("units", json!("quaternion kernel scaling, density 1/2"));
    } else if beta == 4 {
        t.param("units", json!("density 1/2"));
    }
    t.param("beta", json!(beta));
    Ok(t)
}

/// A named identity with the β values it applies to and its tolerance.
struct IdentityCheck {
    name: &'static str,
    betas: &'static [u32],
    tol: fn(u32) -> f64,
    run: fn(u32) -> Result<f64>,
}

fn uniform(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    Range { lo, hi, count: n }.points()
}

fn identities() -> Vec<IdentityCheck> {
    vec![
        IdentityCheck {
            name: "gap-correction",
            betas: &[1, 2, 4],
            tol: |b| if b == 2 { 1e-6 } else { 1e-5 },
            run: |b| {
                let g = uniform(31, 0.1, 3.0);
                Ok(gap::verify_gap_identity(b, &g, 0.5)?.max(gap::verify_gap_identity(b, &g, 1.0)?))
            },
        },
        IdentityCheck {
            name: "gap-routes",
            betas: &[2],
            tol: |_| 1e-7,
            run: |_| {
                let s = [0.5, 1.0, 2.0];
                let mut worst: f64 = 0.0;
                for xi in [0.25, 0.5, 1.0] {
                    let tau = painleve::e_tau_grid(xi, &s, 1e-13)?;
                    for (&si, &(e0, e1)) in s.iter().zip(&tau) {
                        let r = gap::gap_bulk(2, si, xi, 64)?;
                        worst = worst.max((e0 - r.e0).abs()).max((e1 - r.e1).abs());
                    }
                }
                Ok(worst)
            },
        },
        IdentityCheck {
            name: "spacing-correction",
            betas: &[1, 2, 4],
            tol: |_| 1e-4,
            run: |b| spacing::verify_spacing_identity(b, &uniform(15, 0.2, 3.0), &[0.5, 1.0]),
        },
        IdentityCheck {
            name: "two-point-correction",
            betas: &[1, 2, 4],
            tol: |_| 1e-7,
            run: |b| correlations::verify_rho2_identity(b, Rho2Identity::FirstOrder, &uniform(25, 0.1, 2.5)),
        },
        IdentityCheck {
            name: "two-point-second-order",
            betas: &[2],
            tol: |_| 1e-7,
            run: |_| correlations::verify_rho2_identity(2, Rho2Identity::SecondOrderBeta2, &uniform(25, 0.1, 2.5)),
        },
        IdentityCheck {
            name: "sff-differential",
            betas: &[1, 4],
            tol: |_| 1e-10,
            run: |b| {
                let g: Vec<f64> = if b == 1 { uniform(9, 0.1, 0.9) } else { uniform(9, 0.1, 0.9).into_iter().chain(uniform(9, 1.1, 1.9)).collect() };
                Ok(sff::verify_x6(b, &g)?.0)
            },
        },
        IdentityCheck {
            name: "sff-antisymmetry",
            betas: &[2],
            tol: |_| 0.0,
            run: |_| {
                let r = sff::check_functional_symmetry_and_zeros()?;
                Ok(if r.antisymmetric.iter().all(|&a| a) { 0.0 } else { 1.0 })
            },
        },
        IdentityCheck {
            name: "sff-unit-circle-zeros",
            betas: &[2],
            tol: |_| 1e-10,
            run: |_| {
                let r = sff::check_functional_symmetry_and_zeros()?;
                Ok(r.max_modulus_deviation(&["p2", "p4", "q2", "q4", "r2", "r4"]))
            },
        },
        IdentityCheck {
            name: "even-beta-correction",
            betas: &[2, 4],
            tol: |b| if b == 2 { 5e-3 } else { 1e-2 },
            run: |b| beta_even::verify_421(b, &[0.3, 0.7, 1.2, 1.8], (16, 32)),
        },
        IdentityCheck {
            name: "moment-recurrence",
            betas: &[2, 4],
            tol: |_| 1e-8,
            run: |b| {
                let cases: Vec<AppendixACase> = [vec![2], vec![3], vec![3, 1], vec![2, 2]]
                    .into_iter()
                    .map(|e| AppendixACase::Recurrence { theta: 1.0, exponents: e })
                    .chain([AppendixACase::PowerSum { theta: 1.0, m: 2 }])
                    .collect();
                beta_even::verify_appendix_a(b, &cases)
            },
        },
    ]
}

/// Names accepted by `verify --identity`.
pub fn identity_names() -> Vec<&'static str> {
    identities().iter().map(|c| c.name).collect()
}

fn run_verify(o: &Opts) -> Result<(Table, bool)> {
    let checks = identities();
    let selected: Vec<&IdentityCheck> = match &o.identity {
        Some(name) => {
            let c = checks.iter().find(|c| c.name == name.as_str()).ok_or_else(|| {
                Error::InvalidArgument(format!("unknown identity '{name}'; known: {}", identity_names().join(", ")))
            })?;
            vec![c]
        }
        None => checks.iter().collect(),
    };
    let beta_filter = match &o.beta {
        Some(s) => Some(s.parse::<u32>().map_err(|_| Error::InvalidArgument(format!("bad beta '{s}'")))?),
        None => None,
    };
    if !(o.tol_scale > 0.0) {
        return Err(Error::InvalidArgument("tol-scale must be positive".into()));
    }
    let mut t = Table::new("verify", &["identity", "beta", "residual", "tolerance", "status"]);
    let mut ok = true;
    for c in selected {
        let betas: Vec<u32> = match beta_filter {
            Some(b) if c.betas.contains(&b) => vec![b],
            Some(b) if o.identity.is_some() => {
                return Err(Error::InvalidArgument(format!("identity '{}' is not defined for beta = {b}", c.name)))
            }
            Some(_) => continue,
            None => c.betas.to_vec(),
        };
        for b in betas {
            let tol = (c.tol)(b) * o.tol_scale;
            let (res, status) = match (c.run)(b) {
                Ok(r) if r <= tol => (r, "PASS"),
                Ok(r) => (r, "FAIL"),
                Err(e) => {
                    t.warnings.push(format!("{} at beta = {b}: {e}", c.name));
                    (f64::NAN, "FAIL")
                }
            };
            ok &= status == "PASS";
            t.rows.push(vec![
                Cell::Text(c.name.to_string()),
                Cell::Int(b as i64),
                Cell::Num(res),
                Cell::Num(tol),
                Cell::Text(status.to_string()),
            ]);
        }
    }
    t.param("tol_scale", json!(o.tol_scale));
    Ok((t, ok))
}

fn run_fig1(o: &Opts) -> Result<Table> {
    let s_grid = grid(o, o.s, Range { lo: 0.0, hi: 3.0, count: 61 });
    if s_grid.iter().any(|&s| !(0.0..=spacing::SpacingCurve::S_MAX).contains(&s)) {
        return Err(Error::InvalidArgument("s must lie in [0, 4]".into()));
    }
    let exact = spacing::SpacingCurve::new(2, 1, 1.0)?;
    let mut t = Table::new("fig1", &["s", "P1_exact", "P1_surmise"]);
    for &s in &s_grid {
        t.push_nums(&[s, exact.at(s), spacing::surmise_correction(s)]);
    }
    t.param("beta", json!(2));
    t.param("xi", json!(1.0));
    Ok(t)
}

fn emit(o: &Opts, table: &Table, stdout: &mut dyn Write) -> Result<()> {
    let text = table.render(o.format);
    let io = |e: std::io::Error| Error::InvalidArgument(format!("cannot write output: {e}"));
    match &o.out {
        Some(path) => std::fs::write(path, text).map_err(io),
        None => stdout.write_all(text.as_bytes()).map_err(io),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let (opts, result) = match &cli.command {
        Command::Gap(o) => (o, run_gap(o).map(|t| (t, true))),
        Command::Spacing(o) => (o, run_spacing(o).map(|t| (t, true))),
        Command::Sff(o) => (o, run_sff(o).map(|t| (t, true))),
        Command::Rho2(o) => (o, run_rho2(o).map(|t| (t, true))),
        Command::Verify(o) => (o, run_verify(o)),
        Command::Fig1(o) => (o, run_fig1(o).map(|t| (t, true))),
    };
    match result {
        Ok((table, ok)) => {
            if let Err(e) = emit(opts, &table, stdout) {
                let _ = writeln!(stderr, "error: {e}");
                return 1;
            }
            for w in &table.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            if ok {
                0
            } else {
                1
            }
        }
        Err(Error::InvalidArgument(msg)) | Err(Error::Domain(msg)) | Err(Error::OutOfRange(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("cbe").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn range_parsing() {
        let r = parse_range("0:1:5").unwrap();
        assert_eq!(r.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_range("2:2:1").unwrap().points(), vec![2.0]);
        assert!(parse_range("1:0:3").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1").is_err());
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_num(0.0), "0");
        let v = 1.0 / 3.0;
        assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn sff_cell() {
        let (code, out, _) = run_capture(&["sff", "--beta", "1", "--order", "0", "--tau", "0.5"]);
        assert_eq!(code, 0);
        let line = out.lines().nth(1).unwrap();
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - (1.0 - 0.5 * 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn gap_trivial() {
        let (code, out, _) = run_capture(&["gap", "--beta", "2", "--xi", "0", "--s", "0.0"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().next().unwrap(), "s,E0,E1");
        let v: f64 = out.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&["gap", "--beta", "3"]).0, 2);
        assert_eq!(run_capture(&["nonsense"]).0, 2);
        assert_eq!(run_capture(&["gap", "--xi", "2"]).0, 2);
        assert_eq!(run_capture(&["verify", "--identity", "no-such"]).0, 2);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }
}
