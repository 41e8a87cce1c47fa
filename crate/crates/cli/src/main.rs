use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dropwave_cli::commands::{self, ContinueArgs, Selector};
use dropwave_cli::{CliError, Result};
use dropwave_core::ContinuationConfig;

#[derive(Parser)]
#[command(
    name = "dropwave",
    version,
    about = "Rotating drop boundaries by spectral continuation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the bifurcation speeds c for k = 1..kmax.
    BifValues {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        kmax: usize,
    },
    /// Run the built-in checks; exits 1 if any fails.
    Verify {
        /// Also refine a branch point and run a short branch.
        #[arg(long)]
        full: bool,
    },
    /// Follow one branch and write it as JSON lines.
    Continue(ContinueOpts),
    /// Draw one point of a branch file as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, conflicts_with = "s", required_unless_present = "s")]
        index: Option<usize>,
        /// Pick the point whose arclength is closest to this value.
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the per-point diagnostics of a branch file as CSV.
    ExportCsv {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ContinueOpts {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    /// Kernel orientation, +1 or -1.
    #[arg(long = "dir", allow_negative_numbers = true, value_parser = parse_direction)]
    direction: i8,
    /// Number of points written, the trivial point included.
    #[arg(long)]
    steps: Option<usize>,
    /// JSON file with continuation settings; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "N")]
    modes: Option<usize>,
    #[arg(long = "M")]
    grid: Option<usize>,
    #[arg(long)]
    ds: Option<f64>,
    #[arg(long)]
    ds_min: Option<f64>,
    #[arg(long)]
    ds_max: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_newton: Option<usize>,
    #[arg(long)]
    c1_max: Option<f64>,
    #[arg(long)]
    chord_arc_max: Option<f64>,
    #[arg(long)]
    loop_eps: Option<f64>,
    #[arg(long)]
    loop_s_min: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_direction(s: &str) -> std::result::Result<i8, String> {
    match s {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        other => Err(format!("expected +1 or -1, got {other}")),
    }
}

impl ContinueOpts {
    fn into_args(self) -> Result<ContinueArgs> {
        let mut cfg = match &self.config {
            Some(path) => commands::load_config(path)?,
            None => ContinuationConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag { cfg.$field = v; })*
            };
        }
        set!(steps => max_steps, modes => modes, ds => ds_init, ds_min => ds_min,
             ds_max => ds_max, tol => tol_newton, max_newton => max_newton,
             c1_max => c1_max, chord_arc_max => chord_arc_max, loop_eps => loop_eps,
             loop_s_min => loop_s_min);
        if self.grid.is_some() {
            cfg.grid = self.grid;
        }
        Ok(ContinueArgs {
            m: self.m,
            k: self.k,
            direction: self.direction,
            config: cfg,
            out: self.out,
        })
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::BifValues { m, kmax } => commands::bif_values(m, kmax, &mut stdout),
        Command::Verify { full } => commands::verify(full, &mut stdout),
        Command::Continue(opts) => {
            let status = commands::continue_cmd(&opts.into_args()?)?;
            match status.note {
                Some(note) => eprintln!("status: {} ({note})", status.status),
                None => eprintln!("status: {}", status.status),
            }
            Ok(())
        }
        Command::Render {
            input,
            index,
            s,
            out,
        } => {
            let select = match (index, s) {
                (Some(i), _) => Selector::Index(i),
                (None, Some(s)) => Selector::Arclength(s),
                (None, None) => return Err(CliError::Usage("give --index or --s".into())),
            };
            commands::render_cmd(&input, select, &out)
        }
        Command::ExportCsv { input, out } => commands::export_csv(&input, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
