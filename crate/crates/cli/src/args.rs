//! Command-line definitions.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

/// Comma-separated floats.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", t.trim())))
            .collect::<Result<Vec<_>, _>>()?;
        if v.iter().any(|x| x.is_nan()) {
            return Err("NaN is not allowed".into());
        }
        Ok(FloatList(v))
    }
}

/// Comma-separated non-negative integers.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexList(pub Vec<u32>);

impl FromStr for IndexList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| format!("`{}` is not a non-negative integer", t.trim())))
            .collect::<Result<Vec<_>, _>>()
            .map(IndexList)
    }
}

/// Either `start:stop:step` (inclusive, `stop` rounded to the nearest step) or a list.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid(pub Vec<f64>);

const MAX_GRID: f64 = 1e7;

impl FromStr for LambdaGrid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let v = match parts.as_slice() {
            [single] => FloatList::from_str(single)?.0,
            [a, b, step] => {
                let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", t.trim()));
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if !(step > 0.0 && step.is_finite()) {
                    return Err("step must be positive".into());
                }
                let n = ((b - a) / step).round();
                if !(0.0..=MAX_GRID).contains(&n) {
                    return Err("range is empty or has more than 1e7 points".into());
                }
                (0..=n as usize).map(|i| a + i as f64 * step).collect()
            }
            _ => return Err("expected start:stop:step or a comma-separated list".into()),
        };
        if v.iter().any(|x| !x.is_finite()) {
            return Err("values must be finite".into());
        }
        Ok(LambdaGrid(v))
    }
}

/// The command-line spelling of an enum value.
pub fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map_or_else(String::new, |p| p.get_name().to_owned())
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be positive and finite".into()),
        Err(_) => Err(format!("`{s}` is not a number")),
    }
}

fn positive_or_inf(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 => Ok(v),
        Ok(_) => Err("must be positive".into()),
        Err(_) => Err(format!("`{s}` is not a number")),
    }
}

fn finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err("must be finite".into()),
        Err(_) => Err(format!("`{s}` is not a number")),
    }
}

#[derive(Debug, Parser)]
#[command(name = "diracspec", version, about = "Spectral experiments for massless Dirac operators")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment file; its flags are overridden by the command line.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $DIRACSPEC_OUT, else the current directory).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Stem of the output file names (default: the subcommand name).
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Validate the configuration and print the plan without computing.
    #[arg(long)]
    pub dry_run: bool,
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    /// `r` → radial, `t` → layered, otherwise Cartesian.
    Auto,
    Radial,
    Layered,
    Cartesian,
}

/// A potential `q` on `ℝ^d`.
#[derive(Debug, Args)]
pub struct PotentialArgs {
    /// Expression in x1..x3, r or t.
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = KindArg::Auto)]
    pub kind: KindArg,
    /// Direction of a layered potential; normalized (default e1).
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<FloatList>,
}

/// A radial profile `η(r)`: an expression in `r`, or `@FILE` with two columns `r, η`.
#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub eta: String,
    /// Dimension of the underlying operator.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    /// `⟨x⟩⁻² (I + iα·x) φ₀` for `q = -3/⟨x⟩²`, `d = 3`, `λ = 0`.
    ZeroMode,
    /// `⟨x⟩⁻¹ (I + iσ·x) φ₀` for `q = -2/⟨x⟩²`, `d = 2`, `λ = 0`.
    ZeroResonance,
    /// Layered eigensolution of `--q` at `--lambda`.
    Layered,
}

/// The eigensolution analysed by `schnol` and `mass-ratio`.
#[derive(Debug, Args)]
pub struct FieldArgs {
    #[arg(long, value_enum, default_value_t = FieldArg::ZeroMode)]
    pub field: FieldArg,
    /// Index of the basis spinor used as `φ₀` (closed-form fields).
    #[arg(long, default_value_t = 0)]
    pub phi0: usize,
    /// Layered profile in `t` (layered field).
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<FloatList>,
    #[arg(long, default_value_t = 0.0, value_parser = finite, allow_hyphen_values = true)]
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChiArg {
    Exp,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmoothingArg {
    None,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct WeylArgs {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[arg(long, default_value = "0.37,5.0", allow_hyphen_values = true)]
    pub lambda: LambdaGrid,
    /// Sequence indices; default `r_n = 4·2ⁿ`, or the indices of the `--element`s.
    #[arg(long)]
    pub n_list: Option<IndexList>,
    /// Explicit element `n=N;radius=R;eta=EXPR;direction=..;center=..` (repeatable).
    #[arg(long, action = clap::ArgAction::Append)]
    pub element: Vec<String>,
    #[arg(long, value_enum, default_value_t = ChiArg::Exp)]
    pub chi: ChiArg,
    /// Stencil spacing of the measured residual.
    #[arg(long, default_value_t = 0.05, value_parser = positive)]
    pub grid_h: f64,
    #[arg(long, value_enum, default_value_t = SmoothingArg::None)]
    pub smoothing: SmoothingArg,
    /// Mollifier deviation is `width-factor / r_n`.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub width_factor: f64,
    /// Multiplies the number of quadrature nodes.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub resolution: f64,
    #[arg(long, default_value_t = 0.005, value_parser = positive)]
    pub xi_step: f64,
    #[arg(long, default_value_t = 1e-12, value_parser = positive)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourth-order residual and norm of the 3-D zero mode.
    ZeroMode {
        #[arg(long, default_value_t = 0.05, value_parser = positive)]
        h: f64,
        /// Half-width of the grid box.
        #[arg(long = "L", default_value_t = 4.0, value_parser = positive)]
        l: f64,
        #[arg(long, default_value_t = 2)]
        margin: usize,
        #[arg(long, default_value_t = 0)]
        phi0: usize,
        #[arg(long, default_value_t = 1e-10, value_parser = positive)]
        tol: f64,
        /// Fail (exit 4) when the sup residual at `h` exceeds this.
        #[arg(long, value_parser = positive)]
        residual_tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Residual, logarithmic mass growth and weighted norms of the 2-D resonance.
    ZeroResonance {
        #[arg(long, default_value_t = 0.05, value_parser = positive)]
        h: f64,
        #[arg(long = "L", default_value_t = 4.0, value_parser = positive)]
        l: f64,
        #[arg(long, default_value_t = 2)]
        margin: usize,
        #[arg(long, default_value_t = 0)]
        phi0: usize,
        #[arg(long, default_value = "100,1000,10000,100000")]
        radii: FloatList,
        /// Weight exponent of the `⟨x⟩^{-s}` norm.
        #[arg(long, default_value_t = 0.5, value_parser = positive)]
        s: f64,
        #[arg(long, default_value_t = 1e-10, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Residual of the layered eigensolution on a grid.
    Layered {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 0.0, value_parser = finite, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0.05, value_parser = positive)]
        h: f64,
        #[arg(long = "L", default_value_t = 2.0, value_parser = positive)]
        l: f64,
        #[arg(long, default_value_t = 2)]
        margin: usize,
        #[arg(long, default_value_t = 0.005, value_parser = positive)]
        xi_step: f64,
        #[arg(long, default_value_t = 1e-12, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Discriminant and band/exceptional classification of a periodic profile.
    Bands {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Period.
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        p: f64,
        #[arg(long, default_value = "-3:3:0.01", allow_hyphen_values = true)]
        lambda_range: LambdaGrid,
        #[arg(long, default_value_t = 1e-12, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Monodromy matrices over chosen periods, against the closed form.
    Monodromy {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        p: f64,
        /// Angular index.
        #[arg(long, default_value_t = 0.0, value_parser = finite, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, default_value = "0.3,0.7,2.5", allow_hyphen_values = true)]
        lambda: LambdaGrid,
        /// Period indices `j` (interval `[(j-1)p, jp]`).
        #[arg(long, default_value = "1")]
        j: IndexList,
        #[arg(long, default_value_t = 1e-10, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Growth of the fundamental matrix on dyadic windows.
    Boundedness {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        p: f64,
        #[arg(long, default_value_t = 1.0, value_parser = finite, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, default_value = "1.2566370614359172", allow_hyphen_values = true)]
        lambda: LambdaGrid,
        #[arg(long, default_value_t = 1e4, value_parser = positive)]
        r_max: f64,
        #[arg(long, default_value_t = 1e-9, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Total variation of `1/(r(λ - η) - 1)` over a doubling ladder.
    BvCheck {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value = "5.0", allow_hyphen_values = true)]
        lambda: LambdaGrid,
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        r0: f64,
        #[arg(long, default_value_t = 2048.0, value_parser = positive)]
        r_max: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Histogram estimate of the limit range of `η`.
    LimitRange {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Window start radii, increasing.
        #[arg(long, default_value = "10,100,1000")]
        windows: FloatList,
        #[arg(long, default_value_t = 10.0, value_parser = positive)]
        window_len: f64,
        #[arg(long, default_value_t = 200)]
        bins: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Planar Weyl sequence residuals against the three-term bound.
    WeylPlanar {
        #[command(flatten)]
        weyl: WeylArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Distorted Weyl sequence with phase `(x - a)·k + φ_n(x)`.
    WeylDistorted {
        #[command(flatten)]
        weyl: WeylArgs,
        /// `quadratic` for `|x - a_n|²/r_n^exponent`, or a Cartesian expression.
        #[arg(long, default_value = "quadratic", allow_hyphen_values = true)]
        phi: String,
        #[arg(long, default_value_t = 1.5, value_parser = finite, allow_hyphen_values = true)]
        exponent: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Cutoff residuals `‖(H - λ) f_n‖` of an eigensolution.
    Schnol {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value = "8,16,32,64,128")]
        n_list: IndexList,
        #[arg(long, default_value_t = 1e-10, value_parser = positive)]
        tol: f64,
        /// Confirm `(H - λ) f = 0` on a grid of this spacing first.
        #[arg(long, value_parser = positive)]
        precheck_h: Option<f64>,
        #[arg(long, default_value_t = 2.0, value_parser = positive)]
        precheck_l: f64,
        #[arg(long, default_value_t = 1e-2, value_parser = positive)]
        precheck_tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Mass function `M(n)` and the ratio `(M(2n) - M(n))/(n² M(n))`.
    MassRatio {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value = "8,16,32,64")]
        n_list: IndexList,
        #[arg(long, default_value_t = 1e-8, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Virial bounds `[m_q, M_q]` and optionally the virial integral of a field.
    Virial {
        #[command(flatten)]
        potential: PotentialArgs,
        /// Radius of the search ball.
        #[arg(long, default_value_t = 10.0, value_parser = positive)]
        radius: f64,
        /// Coarsest grid density; 2× and 4× are also run.
        #[arg(long, default_value_t = 200)]
        density: usize,
        /// Field whose virial integral is computed.
        #[arg(long, value_enum)]
        integral: Option<FieldArg>,
        #[arg(long, default_value_t = 0)]
        phi0: usize,
        /// Integration radius for the virial integral (`inf` allowed).
        #[arg(long, default_value_t = f64::INFINITY, value_parser = positive_or_inf)]
        integral_radius: f64,
        #[arg(long, default_value_t = 1e-8, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Staggered discretization of one radial channel, with virial bounds and an L² probe.
    RadialEig {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value_t = 1.0, value_parser = finite, allow_hyphen_values = true)]
        k: f64,
        /// Truncation radius.
        #[arg(long = "R", default_value_t = 60.0, value_parser = positive)]
        r: f64,
        /// Nodes per component.
        #[arg(long = "N", default_value_t = 2000)]
        n: usize,
        /// Also compute the collocated (doubling) spectrum; needs N <= 400.
        #[arg(long)]
        collocated: bool,
        /// Spectral parameters for the L² solution probe.
        #[arg(long, allow_hyphen_values = true)]
        probe_lambda: Option<LambdaGrid>,
        #[arg(long, default_value_t = 1000.0, value_parser = positive)]
        probe_r_max: f64,
        #[arg(long, default_value_t = 1e-10, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Parse, print and differentiate an expression.
    ParseCheck {
        #[command(flatten)]
        potential: PotentialArgs,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub const NAMES: [&'static str; 15] = [
        "zero-mode",
        "zero-resonance",
        "layered",
        "bands",
        "monodromy",
        "boundedness",
        "bv-check",
        "limit-range",
        "weyl-planar",
        "weyl-distorted",
        "schnol",
        "mass-ratio",
        "virial",
        "radial-eig",
        "parse-check",
    ];

    pub fn common(&self) -> &Common {
        match self {
            Command::ZeroMode { common, .. }
            | Command::ZeroResonance { common, .. }
            | Command::Layered { common, .. }
            | Command::Bands { common, .. }
            | Command::Monodromy { common, .. }
            | Command::Boundedness { common, .. }
            | Command::BvCheck { common, .. }
            | Command::LimitRange { common, .. }
            | Command::WeylPlanar { common, .. }
            | Command::WeylDistorted { common, .. }
            | Command::Schnol { common, .. }
            | Command::MassRatio { common, .. }
            | Command::Virial { common, .. }
            | Command::RadialEig { common, .. }
            | Command::ParseCheck { common, .. } => common,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definitions_are_consistent() {
        Cli::command().debug_assert();
        let names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
        assert_eq!(names, Command::NAMES);
    }

    #[test]
    fn lambda_grids() {
        let g: LambdaGrid = "-3:3:0.5".parse().unwrap();
        assert_eq!(g.0.len(), 13);
        assert_eq!(g.0[12], 3.0);
        assert_eq!("0.3,0.7".parse::<LambdaGrid>().unwrap().0, [0.3, 0.7]);
        assert!("1:0:0.1".parse::<LambdaGrid>().is_err());
        assert!("0:1:0".parse::<LambdaGrid>().is_err());
        assert!("a,b".parse::<LambdaGrid>().is_err());
    }

    #[test]
    fn later_flags_win() {
        let cli = Cli::try_parse_from(["diracspec", "bands", "--eta", "0", "--p", "2", "--p", "3"]).unwrap();
        let Command::Bands { p, .. } = cli.command else { panic!() };
        assert_eq!(p, 3.0);
    }
}
