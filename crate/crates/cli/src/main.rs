use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tsing_cli::app::{run_batch, run_file, EXIT_INPUT};
use tsing_cli::random::random_klt_divisors;
use tsing_cli::{serialize_divisor, Command, Flags, GroupQuery};
use tsing_core::grouppres::DEFAULT_MAX_COSETS;

#[derive(Parser)]
#[command(name = "tsing", version, about = "Exact invariants of klt complexity-one torus singularities")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Coset limit for Todd-Coxeter enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_COSETS)]
    max_cosets: usize,
    /// Process every file of a directory instead of a single file.
    #[arg(long, global = true, value_name = "DIR")]
    batch: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Properness and klt test.
    Check { file: Option<PathBuf> },
    /// Degree polyhedron, multiplicities and boundary divisor.
    Degree { file: Option<PathBuf> },
    /// Cox ring presentation and class group.
    Cox { file: Option<PathBuf> },
    /// Presentation and structure of the regional fundamental group.
    Pi1 { file: Option<PathBuf> },
    /// Derived series as iteration of Cox rings.
    Iterate { file: Option<PathBuf> },
    /// Simply connected factorial canonical cover.
    Scfc { file: Option<PathBuf> },
    /// Class group and Cox ring of a log pair on the projective line.
    P1 { file: Option<PathBuf> },
    /// Queries on a presented group (or on the group of a divisor).
    Group {
        query: Query,
        file: Option<PathBuf>,
    },
    /// Every stage of the pipeline.
    All { file: Option<PathBuf> },
    /// Write seeded random proper klt divisors.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Output directory; one file per divisor. Stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Query {
    Order,
    Abelianization,
    DerivedSeries,
    Solvable,
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn generate(seed: u64, count: usize, out: Option<PathBuf>) -> ExitCode {
    let divisors = random_klt_divisors(seed, count);
    match out {
        None => {
            for (i, d) in divisors.iter().enumerate() {
                println!("# random divisor {i} (seed {seed})");
                print!("{}", serialize_divisor(d));
                println!();
            }
        }
        Some(dir) => {
            if let Err(e) = fs::create_dir_all(&dir) {
                eprintln!("{}: {e}", dir.display());
                return exit(EXIT_INPUT);
            }
            for (i, d) in divisors.iter().enumerate() {
                let path = dir.join(format!("random_{seed}_{i:03}.toml"));
                if let Err(e) = fs::write(&path, serialize_divisor(d)) {
                    eprintln!("{}: {e}", path.display());
                    return exit(EXIT_INPUT);
                }
            }
        }
    }
    exit(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = Flags {
        json: cli.json,
        max_cosets: cli.max_cosets,
    };
    let (cmd, file) = match cli.command {
        Cmd::Check { file } => (Command::Check, file),
        Cmd::Degree { file } => (Command::Degree, file),
        Cmd::Cox { file } => (Command::Cox, file),
        Cmd::Pi1 { file } => (Command::Pi1, file),
        Cmd::Iterate { file } => (Command::Iterate, file),
        Cmd::Scfc { file } => (Command::Scfc, file),
        Cmd::P1 { file } => (Command::P1, file),
        Cmd::All { file } => (Command::All, file),
        Cmd::Group { query, file } => {
            let q = match query {
                Query::Order => GroupQuery::Order,
                Query::Abelianization => GroupQuery::Abelianization,
                Query::DerivedSeries => GroupQuery::DerivedSeries,
                Query::Solvable => GroupQuery::Solvable,
            };
            (Command::Group(q), file)
        }
        Cmd::Generate { seed, count, out } => return generate(seed, count, out),
    };
    let (code, output) = match (file, cli.batch) {
        (Some(f), None) => {
            let o = run_file(cmd, &f, flags);
            (o.code, o.render(flags.json))
        }
        (None, Some(dir)) => run_batch(cmd, &dir, flags),
        _ => {
            eprintln!("give exactly one of FILE and --batch DIR");
            return exit(EXIT_INPUT);
        }
    };
    print!("{output}");
    exit(code)
}
