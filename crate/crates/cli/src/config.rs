use std::path::PathBuf;

use anyhow::{bail, ensure, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rabi2p_core::{ModelParams, Parity, SymmetrySector};

#[derive(Debug, Parser)]
#[command(
    name = "rabi2p",
    version,
    about = "Spectral determinants of the two-photon quantum Rabi model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a G-function on an energy grid.
    Scan(ScanArgs),
    /// Zeros of a G-function in one sector, checked against the oracle.
    Spectrum(SpectrumArgs),
    /// Level spacings as omega approaches 2.
    Collapse(CollapseArgs),
    /// Run the cross-backend checks and print a pass/fail report.
    Validate(ValidateArgs),
    /// Eigenvalues of the truncated Hamiltonian.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Oscillator frequency; the discrete spectrum needs omega > 2.
    #[arg(long, default_value_t = 2.5)]
    pub omega: f64,
    /// Qubit splitting.
    #[arg(long, default_value_t = 0.7, allow_hyphen_values = true)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format; defaults to csv (text for `validate`).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = BackendChoice::Chen)]
    pub backend: BackendChoice,
    /// Symmetry sector: ++, +-, -+, -- (or pp, pm, mp, mm).
    #[arg(long, default_value = "++")]
    pub sector: SymmetrySector,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub e_min: f64,
    #[arg(long, default_value_t = 22.0, allow_hyphen_values = true)]
    pub e_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 2401)]
    pub points: usize,
    /// Real part of the forward-recursion evaluation point.
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub z0_re: f64,
    /// Imaginary part of the forward-recursion evaluation point.
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub z0_im: f64,
    /// Series terms of the forward recursion.
    #[arg(long, default_value_t = rabi2p_core::travenec::DEFAULT_TERMS)]
    pub terms: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Root-finding backend; `auto` picks chen for even sectors and zhang otherwise.
    #[arg(long, value_enum, default_value_t = BackendChoice::Auto)]
    pub backend: BackendChoice,
    #[arg(long, default_value = "++")]
    pub sector: SymmetrySector,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    pub e_max: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CollapseArgs {
    #[arg(long, default_value_t = 0.7)]
    pub delta: f64,
    /// Comma-separated frequencies, all above 2.
    #[arg(long, value_delimiter = ',', default_values_t = [2.5, 2.2, 2.1, 2.05])]
    pub omegas: Vec<f64>,
    /// Lowest levels per frequency.
    #[arg(long, default_value_t = 45)]
    pub levels: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Restrict to one sector; all four by default.
    #[arg(long)]
    pub sector: Option<SymmetrySector>,
    /// Lowest levels per sector.
    #[arg(long, default_value_t = 10, conflicts_with = "e_max")]
    pub levels: usize,
    /// All levels below this energy instead of a fixed count.
    #[arg(long, allow_hyphen_values = true)]
    pub e_max: Option<f64>,
    /// Convergence tolerance of the truncation doubling.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendChoice {
    Auto,
    Chen,
    Zhang,
    Travenec,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Scan,
    Spectrum,
    Collapse,
    Validate,
    Oracle,
}

/// Energy selection of the oracle command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    Lowest(usize),
    Below(f64),
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub omega: f64,
    pub delta: f64,
    pub sector: Option<SymmetrySector>,
    pub backend: BackendChoice,
    pub e_range: (f64, f64),
    pub grid: usize,
    pub tol: f64,
    pub selection: Selection,
    pub omegas: Vec<f64>,
    pub z0: Complex64,
    pub terms: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    fn base(
        command: CommandKind,
        omega: f64,
        delta: f64,
        out: OutputArgs,
        default_format: Format,
    ) -> Self {
        Self {
            command,
            omega,
            delta,
            sector: None,
            backend: BackendChoice::Auto,
            e_range: (f64::NEG_INFINITY, f64::INFINITY),
            grid: 0,
            tol: 1e-10,
            selection: Selection::Lowest(0),
            omegas: Vec::new(),
            z0: Complex64::new(5.0, 5.0),
            terms: rabi2p_core::travenec::DEFAULT_TERMS,
            output: out.output,
            format: out.format.unwrap_or(default_format),
        }
    }

    pub fn from_cli(cli: Cli) -> Self {
        match cli.command {
            Command::Scan(a) => Self {
                sector: Some(a.sector),
                backend: a.backend,
                e_range: (a.e_min, a.e_max),
                grid: a.points,
                z0: Complex64::new(a.z0_re, a.z0_im),
                terms: a.terms,
                ..Self::base(
                    CommandKind::Scan,
                    a.model.omega,
                    a.model.delta,
                    a.output,
                    Format::Csv,
                )
            },
            Command::Spectrum(a) => Self {
                sector: Some(a.sector),
                backend: a.backend,
                e_range: (f64::NEG_INFINITY, a.e_max),
                ..Self::base(
                    CommandKind::Spectrum,
                    a.model.omega,
                    a.model.delta,
                    a.output,
                    Format::Csv,
                )
            },
            Command::Collapse(a) => Self {
                omegas: a.omegas,
                selection: Selection::Lowest(a.levels),
                backend: BackendChoice::Chen,
                sector: Some(SymmetrySector::EVEN_PLUS),
                ..Self::base(
                    CommandKind::Collapse,
                    f64::NAN,
                    a.delta,
                    a.output,
                    Format::Csv,
                )
            },
            Command::Validate(a) => Self::base(
                CommandKind::Validate,
                a.model.omega,
                a.model.delta,
                a.output,
                Format::Text,
            ),
            Command::Oracle(a) => Self {
                sector: a.sector,
                backend: BackendChoice::Oracle,
                tol: a.tol,
                selection: a
                    .e_max
                    .map_or(Selection::Lowest(a.levels), Selection::Below),
                ..Self::base(
                    CommandKind::Oracle,
                    a.model.omega,
                    a.model.delta,
                    a.output,
                    Format::Csv,
                )
            },
        }
    }

    /// Rejects inconsistent settings with a message naming the fix.
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.delta.is_finite(),
            "delta must be finite, got {}",
            self.delta
        );
        match self.command {
            CommandKind::Validate => ensure!(
                self.format != Format::Csv,
                "validate writes a text or json report; pass --format text or --format json"
            ),
            _ => ensure!(
                self.format != Format::Text,
                "text output is only available for validate; pass --format csv or --format json"
            ),
        }
        if self.command == CommandKind::Collapse {
            ensure!(
                !self.omegas.is_empty(),
                "--omegas needs at least one frequency"
            );
            for &w in &self.omegas {
                require_above_two(w, "the collapse study")?;
            }
            ensure!(
                self.delta != 0.0,
                "collapse uses the squeezed-frame function, which needs delta != 0"
            );
            ensure!(
                matches!(self.selection, Selection::Lowest(n) if n >= 2),
                "--levels must be at least 2 to form spacings"
            );
            return Ok(());
        }
        require_above_two(self.omega, self.backend_name())?;
        let sector = self.sector.unwrap_or(SymmetrySector::EVEN_PLUS);
        match self.command {
            CommandKind::Scan => {
                ensure!(
                    !matches!(self.backend, BackendChoice::Oracle | BackendChoice::Auto),
                    "scan samples a G-function; pass --backend chen, zhang or travenec"
                );
                let (lo, hi) = self.e_range;
                ensure!(
                    lo.is_finite() && hi.is_finite() && lo < hi,
                    "empty energy range [{lo}, {hi}]; need --e-min < --e-max"
                );
                ensure!(self.grid >= 2, "--points must be at least 2");
                if self.backend == BackendChoice::Travenec {
                    ensure!(
                        self.z0.norm() > 0.0,
                        "the forward recursion needs a non-zero z0"
                    );
                    ensure!(self.terms >= 1, "--terms must be at least 1");
                }
            }
            CommandKind::Spectrum => {
                ensure!(
                    matches!(self.backend, BackendChoice::Auto | BackendChoice::Chen | BackendChoice::Zhang),
                    "spectrum finds zeros with chen or zhang; use the oracle command for diagonalization"
                );
                ensure!(self.e_range.1.is_finite(), "--e-max must be finite");
            }
            CommandKind::Oracle => {
                ensure!(self.tol > 0.0, "--tol must be positive");
                if let Selection::Lowest(n) = self.selection {
                    ensure!(n >= 1, "--levels must be at least 1");
                }
            }
            CommandKind::Validate | CommandKind::Collapse => {}
        }
        if self.backend == BackendChoice::Chen {
            ensure!(
                self.delta != 0.0,
                "delta = 0 lifts every pole of the squeezed-frame function; use --backend zhang or the oracle command"
            );
            ensure!(
                sector.parity == Parity::Even,
                "the squeezed-frame function covers even sectors only; use --backend zhang for sector {sector}"
            );
        }
        if self.command == CommandKind::Validate {
            ensure!(
                self.delta != 0.0,
                "validate compares against the squeezed-frame function, which needs delta != 0"
            );
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        Ok(ModelParams::new(self.omega, self.delta)?)
    }

    fn backend_name(&self) -> &'static str {
        match self.command {
            CommandKind::Oracle => "the oracle",
            CommandKind::Validate => "validate",
            _ => "every G-function backend",
        }
    }
}

fn require_above_two(omega: f64, who: &str) -> Result<()> {
    if !(omega.is_finite() && omega > 2.0) {
        bail!(
            "omega = {omega} is not above 2, but {who} requires the pure-point regime omega > 2 \
             (the spectrum is not discrete below it)"
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        let mut full = vec!["rabi2p"];
        full.extend_from_slice(args);
        RunConfig::from_cli(Cli::try_parse_from(full).unwrap())
    }

    #[test]
    fn defaults_are_valid() {
        for cmd in ["scan", "spectrum", "collapse", "validate", "oracle"] {
            parse(&[cmd]).validate().unwrap();
        }
    }

    #[test]
    fn rejects_subcritical_frequency() {
        let err = parse(&["scan", "--omega", "1.5"]).validate().unwrap_err();
        assert!(err.to_string().contains("omega > 2"));
    }

    #[test]
    fn rejects_zero_delta_with_chen() {
        let err = parse(&["scan", "--delta", "0"]).validate().unwrap_err();
        assert!(err.to_string().contains("--backend zhang"));
        parse(&["scan", "--delta", "0", "--backend", "zhang"])
            .validate()
            .unwrap();
    }

    #[test]
    fn rejects_odd_sector_with_chen() {
        assert!(parse(&["scan", "--sector", "mp"]).validate().is_err());
        parse(&["scan", "--sector", "mp", "--backend", "zhang"])
            .validate()
            .unwrap();
    }

    #[test]
    fn format_rules() {
        assert!(parse(&["validate", "--format", "csv"]).validate().is_err());
        assert!(parse(&["oracle", "--format", "text"]).validate().is_err());
        assert_eq!(parse(&["validate"]).format, Format::Text);
    }

    #[test]
    fn negative_energies_parse() {
        let c = parse(&["scan", "--e-min", "-3.5", "--e-max", "-1"]);
        assert_eq!(c.e_range, (-3.5, -1.0));
    }
}
