//! `cayminor` command-line front end.
//!
//! Every invocation prints one report on standard output (JSON by default)
//! and logs to standard error. Failures print a JSON error object and exit
//! with a nonzero status.

mod args;
mod commands;
mod pattern;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, Format};
use commands::Report;

fn run(cli: &Cli) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Ball(a) => commands::ball(a),
        Command::Minor(a) => commands::minor(a),
        Command::Planar(a) => commands::planar(a),
        Command::Hadwiger(a) => commands::hadwiger(a),
        Command::Ends(a) => commands::ends(a),
        Command::Rays(a) => commands::rays(a),
        Command::Construct(a) => commands::construct(a),
        Command::Verify(a) => commands::verify(a),
        Command::Oracle(a) => commands::oracle(a),
    }
}

fn render_text(value: &Value) -> String {
    let Value::Object(map) = value else {
        return value.to_string();
    };
    let mut out = String::new();
    for (key, v) in map {
        let shown = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        out.push_str(&format!("{key}: {shown}\n"));
    }
    out
}

fn error_object(kind: &str, message: &str) -> Value {
    json!({"error": {"kind": kind, "message": message}})
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            println!("{}", error_object("usage", message.trim()));
            return ExitCode::from(2);
        }
    };

    match run(&cli) {
        Ok(report) => match cli.format {
            Format::Json => {
                println!("{}", report.json);
                ExitCode::SUCCESS
            }
            Format::Text => {
                print!("{}", render_text(&report.json));
                ExitCode::SUCCESS
            }
            Format::Dot => match report.dot {
                Some(dot) => {
                    print!("{dot}");
                    ExitCode::SUCCESS
                }
                None => {
                    println!(
                        "{}",
                        error_object("usage", "this command has no DOT output")
                    );
                    ExitCode::from(2)
                }
            },
        },
        Err(e) => {
            log::error!("{e:#}");
            println!("{}", error_object("failed", &format!("{e:#}")));
            ExitCode::FAILURE
        }
    }
}
