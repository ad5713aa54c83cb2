use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl LexError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        LexError {
            line,
            col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("If without matching End If")]
    UnterminatedIf,
    #[error("Do without matching Loop")]
    UnterminatedDo,
    #[error("Exit Loop outside of a Do loop")]
    ExitOutsideLoop,
    #[error("{0}")]
    MalformedStatement(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuntimeError {
    #[error("statement budget of {0} exhausted")]
    FuelExhausted(u64),
    #[error("port P{0} is not bound to the machine")]
    UndefinedPinPort(u8),
}

/// Any failure from source text to finished run.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasicError {
    #[error("lex error: {0}")]
    Lex(#[from] LexError),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("runtime error: {0}")]
    Runtime(#[from] RuntimeError),
}
