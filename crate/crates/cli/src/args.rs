use clap::{Args, Parser, Subcommand, ValueEnum};
use polymut_core::deform::Dilation;
use polymut_core::fano::WeightTriple;
use polymut_core::geom::Vec2;
use polymut_core::laurent::Variable;

#[derive(Debug, Parser)]
#[command(name = "polymut", version, about = "Exact mutations of Fano polygons")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

/// Inputs given inline as JSON, as a file path, or as `-` for stdin.
pub type Input = String;

#[derive(Debug, Args)]
pub struct PolygonArg {
    /// Polygon JSON `{"vertices": [["x","y"], ...]}`, a file, or `-`.
    #[arg(long)]
    pub polygon: Input,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Polygon JSON, a file, or `-`.
    #[arg(long)]
    pub polygon: Option<Input>,
    /// Weights `a,b,c` of a weighted projective plane.
    #[arg(long, value_parser = parse_weights)]
    pub weights: Option<WeightTriple>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convex hull of a point list.
    Hull {
        /// JSON array of points `[["x","y"], ...]`, a file, or `-`.
        #[arg(long)]
        points: Input,
    },
    /// Dual polygon.
    Dual(PolygonArg),
    /// Weights of a Fano triangle, in vertex order.
    Weights(PolygonArg),
    /// Multiplicity of a Fano triangle.
    Multiplicity(PolygonArg),
    /// Fano triangle of a weighted projective plane.
    Triangle {
        #[arg(long, value_parser = parse_weights)]
        weights: WeightTriple,
    },
    /// Mutation data of a Fano polygon, for one height function or all.
    Factors {
        #[command(flatten)]
        polygon: PolygonArg,
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        w: Option<Vec2>,
    },
    /// Mutates a Fano polygon and prints the certificate.
    Mutate {
        #[command(flatten)]
        polygon: PolygonArg,
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        w: Vec2,
        #[arg(long, default_value_t = 1)]
        t: u64,
    },
    /// Breadth-first mutation graph up to lattice equivalence.
    Graph {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        depth: usize,
    },
    /// Markov triples up to the given number of Vieta jumps.
    Markov {
        #[arg(long)]
        depth: usize,
    },
    /// Diophantine class of a weight triple.
    Diophantine {
        #[command(flatten)]
        source: Source,
    },
    /// Pulls a Laurent polynomial back along a cluster-type mutation.
    LaurentMutate {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, value_parser = parse_variable)]
        divide: Variable,
        /// Fail instead of warning when the Newton polygons disagree.
        #[arg(long)]
        strict: bool,
    },
    /// Constant terms of the powers of a Laurent polynomial.
    Period {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 8)]
        dmax: usize,
    },
    /// Divisorial polytope of a polygon, or the polygon of a divisorial
    /// polytope, with a validity report.
    Divpoly {
        #[command(flatten)]
        source: DivpolySource,
    },
    /// Runs the deformation pipeline for one mutation.
    Deform {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = parse_vec, allow_hyphen_values = true)]
        w: Option<Vec2>,
        #[arg(long, default_value_t = 1)]
        t: u64,
        #[arg(long, default_value = "auto")]
        dilation: Dilation,
    },
    /// Checks the two-piece shape of a decomposition or certificate.
    CheckCorollary {
        /// Decomposition JSON, or a deformation certificate.
        #[arg(long)]
        input: Input,
        /// Factor length to compare the slope jump against.
        #[arg(long)]
        t: Option<u64>,
    },
    /// Verifies every entry of a corpus directory.
    BatchVerify {
        #[arg(long)]
        corpus: std::path::PathBuf,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DivpolySource {
    #[arg(long)]
    pub polygon: Option<Input>,
    /// Divisorial polytope JSON `{"box", "coeffs"}`, a file, or `-`.
    #[arg(long)]
    pub divpoly: Option<Input>,
}

fn parse_ints<const N: usize>(s: &str) -> Result<[i64; N], String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<i64>| format!("expected {N} comma-separated integers, got {}", v.len()))
}

fn parse_vec(s: &str) -> Result<Vec2, String> {
    let [x, y] = parse_ints::<2>(s)?;
    Ok(Vec2::int(x, y))
}

fn parse_weights(s: &str) -> Result<WeightTriple, String> {
    let w = parse_ints::<3>(s)?;
    let w = w.map(|x| u64::try_from(x).unwrap_or(0));
    WeightTriple::new(w).map_err(|e| e.to_string())
}

fn parse_variable(s: &str) -> Result<Variable, String> {
    s.parse()
}
