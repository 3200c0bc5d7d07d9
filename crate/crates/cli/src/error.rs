use thiserror::Error;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_DIVERGENCE: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cortrieve::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        use cortrieve::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(E::InvalidArgument(_) | E::Unsupported(_)) => EXIT_USAGE,
            CliError::Core(E::Divergence(_)) => EXIT_DIVERGENCE,
            CliError::Core(_) => EXIT_DATA,
        }
    }
}

pub type CliResult<T = ()> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(CliError::usage("x").exit_code(), 2);
        let shape = cortrieve::Error::ShapeMismatch {
            left: "a".into(),
            right: "b".into(),
        };
        assert_eq!(CliError::from(shape).exit_code(), 3);
        assert_eq!(CliError::from(cortrieve::Error::Divergence("T[1]".into())).exit_code(), 4);
        assert_eq!(CliError::from(cortrieve::Error::invalid("alpha")).exit_code(), 2);
    }
}
