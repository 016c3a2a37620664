use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lactoep_cli::{
    cmd_coeffs, cmd_factorize, cmd_ratio, cmd_sweep, load_symbol, CliError, Format, IndexExpr,
    SpecArgs,
};
use lactoep_core::QuadratureConfig;

#[derive(Parser, Debug)]
#[command(name = "lactoep", version, about = "Lacunary Toeplitz determinants: exact ratios and their large-N asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fourier coefficients c_n of the symbol.
    Coeffs {
        symbol: PathBuf,
        #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
        n_min: i64,
        #[arg(long, default_value_t = 5, allow_hyphen_values = true)]
        n_max: i64,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wiener-Hopf exponents and the jump residual.
    Factorize {
        symbol: PathBuf,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact and asymptotic ratio at one size.
    Ratio {
        symbol: PathBuf,
        #[arg(long = "N")]
        size: usize,
        #[command(flatten)]
        spec: SpecFlags,
        #[command(flatten)]
        quad: QuadFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact and asymptotic ratio over a list of sizes.
    Sweep {
        symbol: PathBuf,
        #[arg(long = "N-list", value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[command(flatten)]
        spec: SpecFlags,
        #[command(flatten)]
        quad: QuadFlags,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write 0 in the ms column so reports are byte-reproducible.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Args, Debug)]
struct SpecFlags {
    /// Line positions h_a; integers or N, N+k, N-k.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    h: Vec<IndexExpr>,
    /// Line replacements p_a.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    p: Vec<IndexExpr>,
    /// Row positions t_b.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Vec<IndexExpr>,
    /// Row replacements k_b.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    k: Vec<IndexExpr>,
}

impl From<SpecFlags> for SpecArgs {
    fn from(f: SpecFlags) -> Self {
        SpecArgs {
            h: f.h,
            p: f.p,
            t: f.t,
            k: f.k,
        }
    }
}

#[derive(Args, Debug)]
struct QuadFlags {
    #[arg(long)]
    eta_z: Option<f64>,
    #[arg(long)]
    eta_s: Option<f64>,
    #[arg(long, default_value_t = 64)]
    quad_nodes: usize,
    #[arg(long, default_value_t = 1e-12)]
    quad_tol: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
}

impl QuadFlags {
    fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            eta_z: self.eta_z,
            eta_s: self.eta_s,
            nodes: self.quad_nodes,
            tol: self.quad_tol,
            ..QuadratureConfig::default()
        }
    }

    fn method(&self) -> &'static str {
        match self.method {
            MethodArg::Auto => "auto",
            MethodArg::Line => "line",
            MethodArg::General => "general",
            MethodArg::Split => "split",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Auto,
    Line,
    General,
    Split,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("LACTOEP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Invalid(format!("LACTOEP_THREADS must be a positive integer (got {value:?})")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Invalid(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Coeffs {
            symbol,
            n_min,
            n_max,
            format,
            out,
        } => {
            let loaded = load_symbol(&symbol)?;
            emit(&cmd_coeffs(&loaded.symbol, n_min, n_max, format.into())?, out.as_deref())
        }
        Command::Factorize { symbol, grid, out } => {
            let loaded = load_symbol(&symbol)?;
            emit(&cmd_factorize(&loaded.symbol, grid)?, out.as_deref())
        }
        Command::Ratio {
            symbol,
            size,
            spec,
            quad,
            out,
        } => {
            let loaded = load_symbol(&symbol)?;
            let text = cmd_ratio(&loaded.symbol, &spec.into(), size, &quad.config(), quad.method())?;
            emit(&text, out.as_deref())
        }
        Command::Sweep {
            symbol,
            sizes,
            spec,
            quad,
            format,
            out,
            no_timing,
        } => {
            let loaded = load_symbol(&symbol)?;
            let (report, failure) = cmd_sweep(
                &loaded,
                &spec.into(),
                &sizes,
                &quad.config(),
                quad.method(),
                !no_timing,
            )?;
            emit(&report.render(format.into()), out.as_deref())?;
            failure.map_or(Ok(()), Err)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
