use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use holink_cli::{
    calibrate, load_scene, render, resolve_constants, run_scene, save_constants, scene_id, xcheck, CliError, Flags,
    Format, Method,
};

#[derive(Parser)]
#[command(
    name = "holink",
    version,
    about = "Gauss and holomorphic linking by integrals, closed forms and residues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one method on a scene and print its report.
    Run {
        scene: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[command(flatten)]
        flags: Flags,
    },
    /// Measure the normalization constants on the reference scene and write
    /// them to the constants file.
    Calibrate {
        #[command(flatten)]
        flags: Flags,
    },
    /// Run every applicable method on a scene and compare them.
    Xcheck {
        scene: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

fn execute(command: Command) -> Result<ExitCode, CliError> {
    let mut warnings = Vec::new();
    let result = match command {
        Command::Run { scene, method, flags } => {
            let s = load_scene(&scene)?;
            let needs = matches!(method, Method::HoloClosed);
            let k = resolve_constants(Some(&s), &flags, needs, &mut warnings);
            flush(&mut warnings);
            let r = run_scene(&s, &scene_id(&scene), method, &flags, &k?)?;
            print!("{}", render(&[r], flags.format));
            Ok(ExitCode::SUCCESS)
        }
        Command::Calibrate { flags } => {
            let cal = calibrate(&flags)?;
            save_constants(&flags.constants, &cal.constants)?;
            println!("{}", holink::geometry::constants_to_json(&cal.constants));
            Ok(ExitCode::SUCCESS)
        }
        Command::Xcheck { scene, flags } => {
            let s = load_scene(&scene)?;
            let (reports, verdict) = xcheck(&s, &scene_id(&scene), &flags, &mut warnings)?;
            print!("{}", render(&reports, flags.format));
            match flags.format {
                Format::Json => println!("{}", serde_json::to_string(&verdict).expect("verdict serializes")),
                Format::Csv => println!("{} {}", verdict.verdict, verdict.diagnostics.join("; ")),
            }
            Ok(if verdict.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            })
        }
    };
    flush(&mut warnings);
    result
}

fn flush(warnings: &mut Vec<String>) {
    for w in warnings.drain(..) {
        eprintln!("warning: {w}");
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
