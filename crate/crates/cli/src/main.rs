use std::fs;
use std::process::ExitCode;

use clap::Parser;

use discrarr_cli::{run, CommandConfig, EXIT_USAGE};

fn main() -> ExitCode {
    let cfg = match CommandConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cfg.json {
        eprintln!("{}", cfg.echo());
    } else {
        println!("{}", cfg.echo());
    }
    let report = match run(&cfg) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return ExitCode::from(e.code);
        }
    };
    let json = serde_json::to_string(&report.json).expect("plain data");
    if let Some(path) = &cfg.output {
        let body = report.artifact.clone().unwrap_or_else(|| json.clone());
        if let Err(e) = fs::write(path, body) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if cfg.json {
        println!("{json}");
    } else {
        for line in &report.human {
            println!("{}", line.trim_end());
        }
        println!("{json}");
    }
    ExitCode::from(report.exit_code())
}
