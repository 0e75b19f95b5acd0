use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown agent `{name}`")]
    UnknownAgent { line: usize, name: String },

    #[error("line {line}: agent `{agent}` appears more than once in the list of `{owner}`")]
    DuplicateAgent {
        line: usize,
        owner: String,
        agent: String,
    },

    #[error("line {line}: agent `{agent}` lists itself")]
    SelfReference { line: usize, agent: String },

    #[error("line {line}: agent `{name}` is declared twice")]
    DuplicateHeader { line: usize, name: String },

    #[error("invalid preference lists: {0}")]
    InvalidPreferences(String),

    #[error("agent `{agent}` is not acceptable to `{owner}`")]
    NotAcceptable { owner: String, agent: String },

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("{what} has size {size}, above the limit of {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
