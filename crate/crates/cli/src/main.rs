use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use freeprod_cli::{run, Command, Options};

#[derive(Parser)]
#[command(name = "freeprod", version, about = "Subgroup graphs and Kurosh decompositions in free products of finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the subgroup graph and print its summary.
    Build(Common),
    /// Decide whether a word lies in the subgroup.
    Member {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Print a Kurosh decomposition of the subgroup.
    Kurosh(Common),
    /// Print a presentation of the subgroup.
    Present(Common),
}

#[derive(Args)]
struct Common {
    /// Problem files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Write the graph in DOT format here (build only).
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Also write the output record to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest group order or coset count to enumerate.
    #[arg(long)]
    cap: Option<usize>,
    /// Worker threads when several files are given.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::Build(c) => (Command::Build, c),
        Cmd::Member { common, word } => (Command::Member(word), common),
        Cmd::Kurosh(c) => (Command::Kurosh, c),
        Cmd::Present(c) => (Command::Present, c),
    };
    let opts = Options {
        dot: common.dot,
        out: common.out,
        cap: common.cap,
        jobs: common.jobs,
    };
    let results = run(&command, &common.files, &opts);
    let many = common.files.len() > 1;
    let mut code = 0;
    for (path, result) in common.files.iter().zip(results) {
        if many {
            println!("== {} ==", path.display());
        }
        match result {
            Ok(report) => {
                print!("{}", report.text);
                code = code.max(report.exit);
            }
            Err(e) => {
                eprintln!("error: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    ExitCode::from(code as u8)
}
