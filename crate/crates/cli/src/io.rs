use std::fmt;
use std::fs;
use std::path::Path;

use shadowcut::constructions::Certificate;
use shadowcut::{Error, InstanceBundle};

/// A failed command. The exit code is documented in the README.
#[derive(Debug)]
pub enum CliError {
    /// A verification ran to completion and the claim did not hold.
    VerificationFailed(String),
    /// Reading, writing or decoding a file.
    Io(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Io(_) => 3,
            CliError::Core(e) => match e {
                Error::GenerationFailed(_) | Error::LimitExceeded { .. } => 2,
                Error::Tie(_) => 4,
                Error::StepCapExceeded { .. } => 5,
                Error::DegenerateProjection => 6,
                Error::NotInterior(_)
                | Error::EpsTooLarge { .. }
                | Error::BallNotInterior(_)
                | Error::DeltaUnderflow { .. }
                | Error::DegeneratePath(_)
                | Error::KSearchExhausted => 7,
                Error::NotRegular(_)
                | Error::InvalidNorm(_)
                | Error::InvalidRule(_)
                | Error::UncertifiableComparison { .. } => 8,
                _ => 9,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::VerificationFailed(m) => write!(f, "verification failed: {m}"),
            CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

pub fn read_bundle(path: &Path) -> CliResult<InstanceBundle> {
    let text = read_text(path)?;
    InstanceBundle::from_json(&text).map_err(|e| match e {
        Error::InvalidInput(m) => CliError::Io(format!("{}: {m}", path.display())),
        other => CliError::Core(other),
    })
}

pub fn read_certificate(path: &Path) -> CliResult<Certificate> {
    Certificate::from_json(&read_text(path)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
