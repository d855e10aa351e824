use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use toric_cox::io::{parse_input, Input};
use toric_cox::klyachko::ToricVectorBundle;
use toric_cox::lattice::Field;
use toric_cox::report::{self, Example, Options, Position, Report, MAX_BUDGET};

#[derive(Parser)]
#[command(name = "toric-cox", version, about = "Cox rings and Mori dream space checks for projectivized toric vector bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Characteristic of the ground field: 0 or a prime.
    #[arg(long = "char", global = true, default_value_t = 0)]
    characteristic: u64,
    /// Seed for sampled points.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Breadth-first depth of the (-1)-class search.
    #[arg(long, global = true, default_value_t = 5)]
    budget: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a fan or bundle file and certify compatibility.
    Validate { file: PathBuf },
    /// Print the Cox ring presentation of P(E).
    Cox { file: PathBuf },
    /// Decide whether P(E), or a blowup of projective space in points, is a Mori dream space.
    Mds {
        file: Option<PathBuf>,
        #[arg(long, requires_all = ["points", "position"], conflicts_with = "file")]
        rank: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
        /// general, very-general, collinear, rnc or unspecified.
        #[arg(long)]
        position: Option<String>,
    },
    /// Evidence that the pseudoeffective cone is not polyhedral.
    Effcone { file: PathBuf },
    /// Divisor class of the orbit closure of a hypersurface given by a form in z1..zr.
    Class {
        file: PathBuf,
        #[arg(long)]
        form: String,
    },
    /// Run the full pipeline on a built-in example.
    Example {
        /// p2-cotangent, example-1.5, example-4.2, theorem-1.4, kapranov, losev-manin or tangent.
        name: String,
        /// Fan file for the tangent example.
        fan: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        rank: Option<usize>,
    },
}

fn read_input(path: &PathBuf, opts: &Options) -> Result<Input, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let c = opts.field.characteristic();
    parse_input(&text, Some(c)).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_bundle(path: &PathBuf, opts: &Options) -> Result<ToricVectorBundle, String> {
    match read_input(path, opts)? {
        Input::Bundle(b) => Ok(b),
        Input::Fan(_) => Err(format!("{}: expected a bundle (no filtrations given)", path.display())),
    }
}

fn example(name: &str, fan: Option<&PathBuf>, dim: Option<usize>, rank: Option<usize>, opts: &Options) -> Result<Example, String> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| format!("example {name} needs {flag}"));
    Ok(match name {
        "p2-cotangent" => Example::P2Cotangent,
        "example-1.5" => Example::Example15,
        "example-4.2" => Example::Example42,
        "theorem-1.4" => Example::Theorem14 { dim: need(dim, "--dim")? },
        "kapranov" => Example::Kapranov { rank: need(rank, "--rank")? },
        "losev-manin" => Example::LosevManin { dim: need(dim, "--dim")? },
        "tangent" => {
            let path = fan.ok_or("example tangent needs a fan file")?;
            let f = read_input(path, opts)?.fan().clone();
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            Example::Tangent { fan: f, name }
        }
        other => {
            return Err(format!("unknown example {other:?}; known: {}", report::EXAMPLE_NAMES.join(", ")));
        }
    })
}

fn name_of(p: &PathBuf) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn run(cli: &Cli, opts: &Options) -> Result<Report, String> {
    let e = |e: toric_cox::Error| e.to_string();
    match &cli.command {
        Command::Validate { file } => {
            let input = read_input(file, opts)?;
            report::validate_report(&name_of(file), &input, opts).map_err(e)
        }
        Command::Cox { file } => report::cox_report(&name_of(file), &read_bundle(file, opts)?, opts).map_err(e),
        Command::Mds { file: Some(file), .. } => {
            report::mds_report(&name_of(file), &read_bundle(file, opts)?, opts).map_err(e)
        }
        Command::Mds { file: None, rank: Some(r), points: Some(s), position: Some(p) } => {
            let position: Position = p.parse().map_err(e)?;
            report::classify_report(*r, *s, position, opts).map_err(e)
        }
        Command::Mds { .. } => Err("mds needs a file or --rank, --points and --position".into()),
        Command::Effcone { file } => report::effcone_report(&name_of(file), &read_bundle(file, opts)?, opts).map_err(e),
        Command::Class { file, form } => {
            report::class_report(&name_of(file), &read_bundle(file, opts)?, form, opts).map_err(e)
        }
        Command::Example { name, fan, dim, rank } => {
            let ex = example(name, fan.as_ref(), *dim, *rank, opts)?;
            report::example_report(&ex, opts).map_err(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let field = match Field::from_characteristic(cli.characteristic) {
        Ok(f) => f,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    if cli.budget == 0 || cli.budget > MAX_BUDGET {
        eprintln!("error: --budget must be between 1 and {MAX_BUDGET}");
        return ExitCode::from(2);
    }
    let opts = Options { field, seed: cli.seed, budget: cli.budget };
    match run(&cli, &opts) {
        Ok(rep) => {
            match cli.format {
                Format::Text => print!("{}", rep.to_text()),
                Format::Json => print!("{}", rep.to_json()),
            }
            if rep.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
