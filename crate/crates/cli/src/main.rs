//! chowcalc command line: run .chow programs, run verification suites, list
//! suites. Exit codes: 0 all pass, 1 at least one failure, 2 usage or parse
//! error, 3 internal invariant violation.

use chowcalc_cli::report::{Report, ReportItem};
use chowcalc_cli::{parser, runner};
use std::process::ExitCode;

const USAGE: &str = "usage:
  chowcalc run <file.chow> [--json]
  chowcalc verify <suite|all> [--param k=v]... [--json]
  chowcalc suites";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("{message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(args: &[String]) -> Result<ExitCode, String> {
    let Some(command) = args.first() else {
        return Err(USAGE.to_string());
    };
    match command.as_str() {
        "run" => {
            let (positional, json, params) = split_flags(&args[1..])?;
            if !params.is_empty() {
                return Err("`run` takes no --param flags".into());
            }
            let [file] = positional.as_slice() else {
                return Err(USAGE.to_string());
            };
            cmd_run(file, json)
        }
        "verify" => {
            let (positional, json, params) = split_flags(&args[1..])?;
            let [suite] = positional.as_slice() else {
                return Err(USAGE.to_string());
            };
            cmd_verify(suite, &params, json)
        }
        "suites" => {
            for name in chowcalc::suites::suite_names() {
                println!("{name}");
            }
            println!("all");
            Ok(ExitCode::SUCCESS)
        }
        other => Err(format!("unknown subcommand `{other}`\n{USAGE}")),
    }
}

/// (positional arguments, --json, --param pairs)
type ParsedFlags = (Vec<String>, bool, Vec<(String, String)>);

fn split_flags(args: &[String]) -> Result<ParsedFlags, String> {
    let mut positional = Vec::new();
    let mut json = false;
    let mut params = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--json" => json = true,
            "--param" => {
                let kv = it.next().ok_or("--param needs an argument k=v")?;
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| format!("malformed --param `{kv}`, expected k=v"))?;
                params.push((k.to_string(), v.to_string()));
            }
            flag if flag.starts_with("--") => return Err(format!("unknown flag `{flag}`")),
            _ => positional.push(arg.clone()),
        }
    }
    Ok((positional, json, params))
}

fn cmd_run(file: &str, json: bool) -> Result<ExitCode, String> {
    let source = std::fs::read_to_string(file)
        .map_err(|e| format!("cannot read `{file}`: {e}"))?;
    let program = parser::parse(&source).map_err(|e| format!("{file}:{e}"))?;
    let report = runner::run_program(&program);
    emit(&report, json);
    Ok(exit_for(&report))
}

fn cmd_verify(suite: &str, params: &[(String, String)], json: bool) -> Result<ExitCode, String> {
    let mut plan: Vec<(String, chowcalc::suites::Params)> = Vec::new();
    if suite == "all" {
        plan.extend(chowcalc::suites::default_plan());
    } else {
        if !chowcalc::suites::suite_names().contains(&suite) {
            return Err(format!("unknown suite `{suite}`; see `chowcalc suites`"));
        }
        let params: chowcalc::suites::Params =
            params.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        if let Some(d) = params.get("d").and_then(|v| v.parse::<u32>().ok()) {
            let cap = runner::max_dim_cap();
            if d > cap {
                return Err(format!("d = {d} exceeds CHOWCALC_MAX_DIM = {cap}"));
            }
        }
        plan.push((suite.to_string(), params));
    }
    let mut report = Report::default();
    for (name, params) in plan {
        match chowcalc::suites::run_suite(&name, &params) {
            Ok(items) => {
                for it in items {
                    report.items.push(ReportItem::from_outcome(it.outcome, it.millis));
                }
            }
            Err(chowcalc::suites::SuiteError::UnknownSuite(s)) => {
                return Err(format!("unknown suite `{s}`"));
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    emit(&report, json);
    Ok(exit_for(&report))
}

fn emit(report: &Report, json: bool) {
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
}

fn exit_for(report: &Report) -> ExitCode {
    if report.any_internal() {
        ExitCode::from(3)
    } else if report.any_failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
