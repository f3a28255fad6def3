mod args;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use mcore::analysis::{analyze, study_orbit};
use mcore::checks::{run_all, CheckBudget, CheckContext};
use mcore::config::AnalysisConfig;
use mcore::fuzz::{run_campaign, ArchivedFailure, Campaign, FuzzSummary};
use mcore::io::{parse_channel, parse_operator, to_json, ChannelFile};
use mcore::posmap::MapDescriptor;
use mcore::registry::Params;
use mcore::report::{write_orbit_csv, CoreReport, OrbitReport};
use mcore::zoo::{families, DEFAULT_KINDS};
use mcore::Error;

use args::{Cli, Command, ConfigArgs, ZooAction, SEED_ENV};

/// Exit code for unusable input: bad files, flags or preconditions.
const INPUT_ERROR: u8 = 3;

/// Carries an exit code and a message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonStabilization { .. } | Error::Eigensolver(_) | Error::NonFinite { .. } => 1,
            _ => INPUT_ERROR,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: INPUT_ERROR,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| input_error(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config(args: &ConfigArgs) -> Result<AnalysisConfig, Failure> {
    let env = std::env::var(SEED_ENV).ok();
    args.resolve(env.as_deref()).map_err(input_error)
}

fn load_channel(
    path: &Path,
    config: &AnalysisConfig,
) -> Result<(MapDescriptor, mcore::analysis::Analysis), Failure> {
    let phi =
        parse_channel(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok(analyze(phi, config)?)
}

fn cmd_analyze(input: &Path, output: Option<&PathBuf>, args: &ConfigArgs) -> Outcome {
    let config = config(args)?;
    let (phi, an) = load_channel(input, &config)?;
    let records = run_all(&CheckContext {
        phi: &phi,
        analysis: &an,
        config: &config,
        budget: CheckBudget::default(),
    });
    let report = CoreReport::new(&phi, &an, &config, &records);
    emit(output, &to_json(&report)?)?;
    for r in records
        .iter()
        .filter(|r| r.outcome.status == mcore::checks::Status::Fail)
    {
        eprintln!("check {} failed: {}", r.name, r.outcome.note);
    }
    Ok(report.exit_code as u8)
}

fn cmd_orbit(
    input: &Path,
    operator: &Path,
    output: Option<&PathBuf>,
    csv: Option<&PathBuf>,
    args: &ConfigArgs,
) -> Outcome {
    let config = config(args)?;
    let a = parse_operator(&read(operator)?)
        .map_err(|e| input_error(format!("{}: {e}", operator.display())))?;
    let (phi, an) = load_channel(input, &config)?;
    let study = study_orbit(&phi, &an, &a, &config)?;
    let report = OrbitReport::new(&phi, &an, &config, &study);
    emit(output, &to_json(&report)?)?;
    if let Some(path) = csv {
        let file = fs::File::create(path)
            .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))?;
        write_orbit_csv(&study.trace, file)?;
    }
    Ok(report.exit_code() as u8)
}

fn cmd_zoo(action: &ZooAction) -> Outcome {
    match action {
        ZooAction::List => {
            for f in families().iter() {
                let params = if f.params().is_empty() {
                    "-".to_string()
                } else {
                    f.params().join(",")
                };
                println!("{:<22} {:<18} {}", f.name(), params, f.summary());
            }
            Ok(0)
        }
        ZooAction::Make {
            name,
            dim,
            params,
            output,
        } => {
            let params = Params::parse(params)?;
            let entry = mcore::zoo::make(name, *dim, &params)?;
            emit(
                output.as_ref(),
                &to_json(&ChannelFile::from_map(&entry.map))?,
            )?;
            Ok(0)
        }
    }
}

fn cmd_fuzz(
    count: usize,
    dims: &[usize],
    kinds: &[String],
    archive: Option<&PathBuf>,
    output: Option<&PathBuf>,
    args: &ConfigArgs,
) -> Outcome {
    let config = config(args)?;
    let campaign = Campaign {
        count,
        dims: dims.to_vec(),
        kinds: if kinds.is_empty() {
            DEFAULT_KINDS.iter().map(|s| s.to_string()).collect()
        } else {
            kinds.to_vec()
        },
        seed: config.seed,
    };
    let results = run_campaign(&campaign, &config, CheckBudget::default())?;
    let summary = FuzzSummary::new(&campaign, &config, &results);
    if let Some(dir) = archive {
        fs::create_dir_all(dir)
            .map_err(|e| input_error(format!("cannot create {}: {e}", dir.display())))?;
        for r in results.iter().filter(|r| r.failed()) {
            let path = dir.join(format!("failure_{:05}.json", r.index));
            fs::write(&path, to_json(&ArchivedFailure::new(r, &config))?)
                .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    emit(output, &to_json(&summary)?)?;
    eprintln!(
        "{} channels, {} with a faithful invariant state, {} failing",
        summary.count, summary.phi_finite, summary.failures
    );
    Ok(u8::from(summary.failures > 0))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Analyze {
            input,
            output,
            config,
        } => cmd_analyze(input, output.as_ref(), config),
        Command::Orbit {
            input,
            operator,
            output,
            csv,
            config,
        } => cmd_orbit(input, operator, output.as_ref(), csv.as_ref(), config),
        Command::Zoo { action } => cmd_zoo(action),
        Command::Fuzz {
            count,
            dims,
            kinds,
            archive_dir,
            output,
            config,
        } => cmd_fuzz(
            *count,
            dims,
            kinds,
            archive_dir.as_ref(),
            output.as_ref(),
            config,
        ),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
