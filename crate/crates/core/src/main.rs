use std::io::{Read, Write};
use std::process::ExitCode;

use clap::Parser;
use mulord::cli::{run, RunConfig, EXIT_IO};

fn read_input(config: &RunConfig) -> std::io::Result<String> {
    if !config.needs_formula() {
        return Ok(String::new());
    }
    if let Some(e) = &config.expr {
        return Ok(e.clone());
    }
    if let Some(path) = &config.file {
        return std::fs::read_to_string(path);
    }
    let mut buf = String::new();
    std::io::stdin().read_to_string(&mut buf)?;
    Ok(buf)
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let input = match read_input(&config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_IO as u8);
        }
    };
    let out = run(&config, &input);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
