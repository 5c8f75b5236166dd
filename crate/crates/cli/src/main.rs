use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polydg::{configure_threads, meshing, run_file, study, CliError};

/// Space-time dG solver for coupled poro-elastic and elastic waves.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a JSON or TOML file.
    Run { config: PathBuf },
    /// Run a convergence study on the manufactured solution.
    Verify {
        study: PathBuf,
        /// Write the rate table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the full table as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Generate or inspect polygonal meshes.
    #[command(subcommand)]
    Mesh(MeshCommand),
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Lloyd-relaxed Voronoi mesh of one or more tagged rectangles.
    Gen {
        /// xmin,ymin,xmax,ymax,region (region e or p); repeat for more.
        #[arg(long = "rect", required = true)]
        rects: Vec<String>,
        #[arg(long, short = 'n')]
        elements: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Validate a mesh file and print its statistics.
    Check { mesh: PathBuf },
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config } => {
            let report = run_file(&config)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
        Command::Verify { study: path, csv, json } => {
            let table = study::verify_file(&path, csv.as_deref(), json.as_deref())?;
            print!("{}", table.report());
        }
        Command::Mesh(MeshCommand::Gen { rects, elements, seed, output }) => {
            let rects = rects.iter().map(|r| meshing::parse_rect(r)).collect::<Result<Vec<_>, _>>()?;
            let mesh = meshing::generate(&rects, elements, seed)?;
            meshing::write(&mesh, &output)?;
            print!("{}", meshing::summary(&mesh));
        }
        Command::Mesh(MeshCommand::Check { mesh }) => {
            print!("{}", meshing::summary(&meshing::read(&mesh)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match configure_threads().and_then(|()| execute(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
