use std::fmt;

use dirac_spectra::{Error, ErrorClass};

/// A failure with the exit class it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub class: ErrorClass,
    pub message: String,
}

impl CliError {
    pub fn config(key: &str, message: impl fmt::Display) -> Self {
        CliError { class: ErrorClass::Config, message: format!("--{key}: {message}") }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class {
            ErrorClass::Config => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Invariant => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { class: e.class(), message: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Prefixes library errors with where they happened, e.g. `lambda = 0.37`.
pub trait Context<T> {
    fn at(self, place: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T, E: Into<CliError>> Context<T> for Result<T, E> {
    fn at(self, place: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|e| {
            let mut e = e.into();
            e.message = format!("{}: {}", place(), e.message);
            e
        })
    }
}
