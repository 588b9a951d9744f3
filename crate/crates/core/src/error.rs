use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed weight or space spec; `pos` is a byte offset into `input`.
    #[error("parse error at position {pos} in `{input}`: {msg} (near `{token}`)")]
    Parse {
        input: String,
        pos: usize,
        token: String,
        msg: String,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(input: &str, pos: usize, msg: impl Into<String>) -> Self {
        let token: String = input
            .get(pos..)
            .unwrap_or("")
            .chars()
            .take_while(|c| *c != ':' && *c != ',')
            .collect();
        Error::Parse {
            input: input.to_string(),
            pos,
            token,
            msg: msg.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
