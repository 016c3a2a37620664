//! Command implementations behind the `lactoep` binary.
//!
//! Every command renders into a `String` so the binary only decides where the
//! bytes go. Floating point output uses 17 significant digits throughout.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use lactoep_core::{
    asymptotic_ratio, build_symbol_from_log_coeffs, build_symbol_from_samples, exact_ratio,
    factorize, fourier_coefficients, method_by_name, validate_and_normalize, verify_jump,
    AsymptoticRatio, AsymptoticsError, CoefficientTable, Lacuna, LacunaryError, QuadratureConfig,
    Symbol, SymbolError,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    NoConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::NoConvergence(_) => 3,
        }
    }
}

impl From<SymbolError> for CliError {
    fn from(e: SymbolError) -> Self {
        CliError::Invalid(format!("invalid symbol: {e}"))
    }
}

impl From<LacunaryError> for CliError {
    fn from(e: LacunaryError) -> Self {
        match e {
            LacunaryError::PlainSingular | LacunaryError::Linalg(_) => {
                CliError::NoConvergence(e.to_string())
            }
            LacunaryError::Symbol(e) => e.into(),
            other => CliError::Invalid(format!("invalid lacunary spec: {other}")),
        }
    }
}

impl From<AsymptoticsError> for CliError {
    fn from(e: AsymptoticsError) -> Self {
        match e {
            AsymptoticsError::Lacunary(e) => e.into(),
            AsymptoticsError::NoConvergence { .. }
            | AsymptoticsError::Linalg(_)
            | AsymptoticsError::WienerHopf(_) => CliError::NoConvergence(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

/// A real number printed as `{:.16e}` inside JSON; non-finite values become
/// `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            RawValue::from_string(fmt_real(self.0))
                .map_err(serde::ser::Error::custom)?
                .serialize(serializer)
        } else {
            serializer.serialize_none()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JsonComplex {
    pub re: Real,
    pub im: Real,
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        Self {
            re: Real(z.re),
            im: Real(z.im),
        }
    }
}

pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NaN".to_string()
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A symbol read from disk together with the SHA-256 of the file bytes.
pub struct LoadedSymbol {
    pub symbol: Symbol,
    pub hash: String,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolFile {
    log_coeffs: Option<std::collections::BTreeMap<String, [f64; 2]>>,
    samples: Option<Vec<[f64; 2]>>,
    tol: f64,
}

pub fn parse_symbol(text: &str) -> Result<Symbol, CliError> {
    let file: SymbolFile = serde_json::from_str(text)
        .map_err(|e| CliError::Invalid(format!("invalid symbol file: {e}")))?;
    match (file.log_coeffs, file.samples) {
        (Some(map), None) => {
            let mut pairs = Vec::with_capacity(map.len());
            for (key, [re, im]) in map {
                let n: i64 = key.trim().parse().map_err(|_| {
                    CliError::Invalid(format!("coefficient key {key:?} is not an integer"))
                })?;
                pairs.push((n, Complex64::new(re, im)));
            }
            if pairs.is_empty() {
                if !(file.tol > 0.0 && file.tol.is_finite()) {
                    return Err(SymbolError::InvalidTolerance(file.tol).into());
                }
                return Ok(Symbol::identity(file.tol));
            }
            Ok(build_symbol_from_log_coeffs(
                &CoefficientTable::from_pairs(pairs),
                file.tol,
            )?)
        }
        (None, Some(samples)) => {
            let values: Vec<Complex64> =
                samples.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            Ok(build_symbol_from_samples(&values, file.tol)?)
        }
        _ => Err(CliError::Invalid(
            "symbol file needs exactly one of \"log_coeffs\" or \"samples\"".into(),
        )),
    }
}

pub fn load_symbol(path: &Path) -> Result<LoadedSymbol, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| CliError::Invalid(format!("{} is not UTF-8", path.display())))?;
    let symbol = parse_symbol(text)?;
    let hash = Sha256::digest(&bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
    Ok(LoadedSymbol { symbol, hash })
}

/// An index that may refer to the matrix size: `5`, `N`, `N+1`, `N-2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexExpr {
    pub relative: bool,
    pub offset: i64,
}

impl IndexExpr {
    pub fn resolve(&self, size: usize) -> i64 {
        if self.relative {
            size as i64 + self.offset
        } else {
            self.offset
        }
    }
}

impl std::str::FromStr for IndexExpr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || format!("invalid index {s:?}; expected an integer or N, N+k, N-k");
        if let Some(rest) = s.strip_prefix('N') {
            let rest = rest.trim();
            let offset = if rest.is_empty() {
                0
            } else if let Some(k) = rest.strip_prefix('+') {
                k.trim().parse().map_err(|_| bad())?
            } else if let Some(k) = rest.strip_prefix('-') {
                -k.trim().parse::<i64>().map_err(|_| bad())?
            } else {
                return Err(bad());
            };
            Ok(Self {
                relative: true,
                offset,
            })
        } else {
            Ok(Self {
                relative: false,
                offset: s.parse().map_err(|_| bad())?,
            })
        }
    }
}

/// Lacunary data as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct SpecArgs {
    pub h: Vec<IndexExpr>,
    pub p: Vec<IndexExpr>,
    pub t: Vec<IndexExpr>,
    pub k: Vec<IndexExpr>,
}

impl SpecArgs {
    fn pairs(
        a: &[IndexExpr],
        b: &[IndexExpr],
        names: (&str, &str),
        size: usize,
    ) -> Result<Vec<Lacuna>, CliError> {
        if a.len() != b.len() {
            return Err(CliError::Invalid(format!(
                "--{} and --{} need the same number of entries ({} vs {})",
                names.0,
                names.1,
                a.len(),
                b.len()
            )));
        }
        Ok(a.iter()
            .zip(b)
            .map(|(x, y)| Lacuna::new(x.resolve(size), y.resolve(size)))
            .collect())
    }

    pub fn resolve(&self, size: usize) -> Result<lactoep_core::LacunarySpec, CliError> {
        let lines = Self::pairs(&self.h, &self.p, ("h", "p"), size)?;
        let rows = Self::pairs(&self.t, &self.k, ("t", "k"), size)?;
        Ok(validate_and_normalize(&lines, &rows, size)?)
    }

    fn describe(&self) -> SpecDescription {
        let show = |v: &[IndexExpr]| {
            v.iter()
                .map(|e| match (e.relative, e.offset) {
                    (false, k) => k.to_string(),
                    (true, 0) => "N".to_string(),
                    (true, k) if k > 0 => format!("N+{k}"),
                    (true, k) => format!("N{k}"),
                })
                .collect()
        };
        SpecDescription {
            h: show(&self.h),
            p: show(&self.p),
            t: show(&self.t),
            k: show(&self.k),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct SpecDescription {
    h: Vec<String>,
    p: Vec<String>,
    t: Vec<String>,
    k: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
struct ConfigDescription {
    method: String,
    eta_z: Option<Real>,
    eta_s: Option<Real>,
    nodes: usize,
    tol: Real,
    max_doublings: u32,
}

fn describe_config(config: &QuadratureConfig, method: &str) -> ConfigDescription {
    ConfigDescription {
        method: method.to_ascii_lowercase(),
        eta_z: config.eta_z.map(Real),
        eta_s: config.eta_s.map(Real),
        nodes: config.nodes,
        tol: Real(config.tol),
        max_doublings: config.max_doublings,
    }
}

pub fn cmd_coeffs(
    symbol: &Symbol,
    n_min: i64,
    n_max: i64,
    format: Format,
) -> Result<String, CliError> {
    let table = fourier_coefficients(symbol, n_min, n_max)?;
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("n,re,im\n");
            for (n, c) in table.iter() {
                let _ = writeln!(out, "{n},{},{}", fmt_real(c.re), fmt_real(c.im));
            }
            out
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Entry {
                n: i64,
                re: Real,
                im: Real,
            }
            let entries: Vec<Entry> = table
                .iter()
                .map(|(n, c)| Entry {
                    n,
                    re: Real(c.re),
                    im: Real(c.im),
                })
                .collect();
            to_json(&entries)
        }
    })
}

pub fn cmd_factorize(symbol: &Symbol, grid: usize) -> Result<String, CliError> {
    if grid < 8 || !grid.is_power_of_two() {
        return Err(CliError::Invalid(format!(
            "grid must be a power of two >= 8 (got {grid})"
        )));
    }
    let fact = factorize(symbol);
    let residual = verify_jump(&fact, symbol, grid);

    #[derive(Serialize)]
    struct Report {
        order: usize,
        annulus_inner: Real,
        annulus_outer: Real,
        /// Coefficients of `z^n`, `n >= 0`, in the interior exponent.
        plus: Vec<JsonComplex>,
        /// Coefficients of `z^{-n}`, `n >= 1`, in the exterior exponent.
        minus: Vec<JsonComplex>,
        grid: usize,
        residual: Real,
    }
    let annulus = fact.annulus();
    Ok(to_json(&Report {
        order: symbol.order(),
        annulus_inner: Real(annulus.inner),
        annulus_outer: Real(annulus.outer),
        plus: fact.plus_coeffs().iter().map(|&c| c.into()).collect(),
        minus: fact.minus_coeffs().iter().map(|&c| c.into()).collect(),
        grid,
        residual: Real(residual),
    }))
}

/// Exact and asymptotic ratio at one size.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub size: usize,
    pub exact: Complex64,
    pub exact_is_zero: bool,
    pub asymptotic: AsymptoticRatio,
}

impl Evaluation {
    pub fn abs_err(&self) -> f64 {
        (self.exact - self.asymptotic.value).norm()
    }
}

pub fn evaluate(
    symbol: &Symbol,
    spec_args: &SpecArgs,
    size: usize,
    config: &QuadratureConfig,
    method: &str,
) -> Result<Evaluation, CliError> {
    method_by_name(method)?;
    let spec = spec_args.resolve(size)?;
    let exact = exact_ratio(symbol, &spec)?;
    let fact = factorize(symbol);
    let asymptotic = asymptotic_ratio(&fact, &spec, config, method)?;
    Ok(Evaluation {
        size,
        exact: exact.value,
        exact_is_zero: exact.is_zero,
        asymptotic,
    })
}

pub fn cmd_ratio(
    symbol: &Symbol,
    spec_args: &SpecArgs,
    size: usize,
    config: &QuadratureConfig,
    method: &str,
) -> Result<String, CliError> {
    let ev = evaluate(symbol, spec_args, size, config, method)?;

    #[derive(Serialize)]
    struct Matrix {
        kind: String,
        size: usize,
        condition: Real,
        singular: bool,
        nodes: usize,
        change: Real,
    }
    #[derive(Serialize)]
    struct Report {
        #[serde(rename = "N")]
        size: usize,
        method: &'static str,
        exact: JsonComplex,
        exact_is_zero: bool,
        asymptotic: JsonComplex,
        abs_err: Real,
        condition: Real,
        singular: bool,
        matrices: Vec<Matrix>,
    }
    Ok(to_json(&Report {
        size,
        method: ev.asymptotic.method,
        exact: ev.exact.into(),
        exact_is_zero: ev.exact_is_zero,
        asymptotic: ev.asymptotic.value.into(),
        abs_err: Real(ev.abs_err()),
        condition: Real(ev.asymptotic.condition()),
        singular: ev.asymptotic.singular(),
        matrices: ev
            .asymptotic
            .matrices
            .iter()
            .map(|m| Matrix {
                kind: m.kind.to_string(),
                size: m.size(),
                condition: Real(m.condition),
                singular: m.singular,
                nodes: m.quadrature_report.nodes,
                change: Real(m.quadrature_report.change),
            })
            .collect(),
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub size: usize,
    pub exact_re: Real,
    pub exact_im: Real,
    pub asym_re: Real,
    pub asym_im: Real,
    pub abs_err: Real,
    pub nodes: usize,
    pub ms: Real,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepMetadata {
    symbol_sha256: String,
    spec: SpecDescription,
    config: ConfigDescription,
    version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub metadata: SweepMetadata,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,exact_re,exact_im,asym_re,asym_im,abs_err,nodes,ms\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.size,
                fmt_real(r.exact_re.0),
                fmt_real(r.exact_im.0),
                fmt_real(r.asym_re.0),
                fmt_real(r.asym_im.0),
                fmt_real(r.abs_err.0),
                r.nodes,
                fmt_real(r.ms.0),
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Runs every size in `sizes` (strictly ascending). Rows that failed to
/// converge are kept with NaN values; the first such failure is returned
/// alongside the report.
pub fn cmd_sweep(
    symbol: &LoadedSymbol,
    spec_args: &SpecArgs,
    sizes: &[usize],
    config: &QuadratureConfig,
    method: &str,
    timing: bool,
) -> Result<(SweepReport, Option<CliError>), CliError> {
    if sizes.is_empty() {
        return Err(CliError::Invalid("--N-list is empty".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(CliError::Invalid(
            "--N-list must be strictly ascending positive sizes".into(),
        ));
    }
    method_by_name(method)?;
    for &n in sizes {
        spec_args.resolve(n)?;
    }

    let results: Vec<(usize, Result<Evaluation, CliError>, f64)> = sizes
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let r = evaluate(&symbol.symbol, spec_args, n, config, method);
            let ms = if timing {
                start.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            (n, r, ms)
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut failure = None;
    for (n, r, ms) in results {
        match r {
            Ok(ev) => rows.push(SweepRow {
                size: n,
                exact_re: Real(ev.exact.re),
                exact_im: Real(ev.exact.im),
                asym_re: Real(ev.asymptotic.value.re),
                asym_im: Real(ev.asymptotic.value.im),
                abs_err: Real(ev.abs_err()),
                nodes: ev.asymptotic.nodes(),
                ms: Real(ms),
            }),
            Err(e @ CliError::NoConvergence(_)) => {
                rows.push(SweepRow {
                    size: n,
                    exact_re: Real(f64::NAN),
                    exact_im: Real(f64::NAN),
                    asym_re: Real(f64::NAN),
                    asym_im: Real(f64::NAN),
                    abs_err: Real(f64::NAN),
                    nodes: 0,
                    ms: Real(ms),
                });
                failure.get_or_insert(CliError::NoConvergence(format!("N = {n}: {e}")));
            }
            Err(e) => return Err(e),
        }
    }
    let report = SweepReport {
        metadata: SweepMetadata {
            symbol_sha256: symbol.hash.clone(),
            spec: spec_args.describe(),
            config: describe_config(config, method),
            version: VERSION,
        },
        rows,
    };
    Ok((report, failure))
}
