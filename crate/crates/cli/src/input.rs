use std::fs;
use std::io::Read;
use std::path::Path;

use gels_core::datasets::ParseOptions;
use gels_core::{Dataset, Error};

/// CLI failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidParameters(_) | Error::Domain(_) => CliError::Usage(msg),
            Error::InvalidData(_) | Error::DegenerateData(_) => CliError::Data(msg),
            Error::BracketFailure { .. }
            | Error::NoConvergence { .. }
            | Error::MomentOverflow { .. }
            | Error::StencilFailure { .. }
            | Error::UncertaintyUnavailable(_)
            | Error::AllFitsFailed(_) => CliError::Numerical(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Loads a bundled data set by name or reads `path` (`-` is stdin).
pub fn load(path: Option<&Path>, bundled: Option<&str>, column: Option<usize>) -> CliResult<Dataset> {
    let data = match (path, bundled) {
        (_, Some(name)) => Dataset::bundled(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown data set {name:?}; choose ball_bearings, leukaemia or strength_10mm"
            ))
        })?,
        (Some(path), None) => {
            let text = if path.as_os_str() == "-" {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
                s
            } else {
                fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?
            };
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "stdin".into());
            Dataset::parse(&text, name, &ParseOptions { column })?
        }
        (None, None) => return Err(CliError::Usage("give an input file (or -) or --dataset".into())),
    };
    if data.len() < 2 {
        return Err(CliError::Data(format!("need at least 2 values, got {}", data.len())));
    }
    Ok(data)
}
