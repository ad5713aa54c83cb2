use std::fmt;

/// A port bit such as `P3.2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pin {
    pub port: u8,
    pub bit: u8,
}

impl Pin {
    pub fn new(port: u8, bit: u8) -> Option<Self> {
        (port <= 3 && bit <= 7).then_some(Pin { port, bit })
    }
}

impl fmt::Display for Pin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}.{}", self.port, self.bit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    If,
    Then,
    Else,
    End,
    Do,
    Loop,
    Exit,
    Incr,
    Decr,
    Lcd,
    Locate,
    Deflcdchar,
    Cls,
    Waitms,
    Chr,
}

impl Keyword {
    pub fn lookup(word: &str) -> Option<Keyword> {
        Some(match word.to_ascii_lowercase().as_str() {
            "if" => Keyword::If,
            "then" => Keyword::Then,
            "else" => Keyword::Else,
            "end" => Keyword::End,
            "do" => Keyword::Do,
            "loop" => Keyword::Loop,
            "exit" => Keyword::Exit,
            "incr" => Keyword::Incr,
            "decr" => Keyword::Decr,
            "lcd" => Keyword::Lcd,
            "locate" => Keyword::Locate,
            "deflcdchar" => Keyword::Deflcdchar,
            "cls" => Keyword::Cls,
            "waitms" => Keyword::Waitms,
            "chr" => Keyword::Chr,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::If => "If",
            Keyword::Then => "Then",
            Keyword::Else => "Else",
            Keyword::End => "End",
            Keyword::Do => "Do",
            Keyword::Loop => "Loop",
            Keyword::Exit => "Exit",
            Keyword::Incr => "Incr",
            Keyword::Decr => "Decr",
            Keyword::Lcd => "Lcd",
            Keyword::Locate => "Locate",
            Keyword::Deflcdchar => "Deflcdchar",
            Keyword::Cls => "Cls",
            Keyword::Waitms => "Waitms",
            Keyword::Chr => "Chr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    /// Case-folded identifier.
    Ident(String),
    Pin(Pin),
    Int(i64),
    Str(String),
    Eq,
    Ne,
    Lt,
    Gt,
    Plus,
    Minus,
    LParen,
    RParen,
    Comma,
    Semicolon,
    Eol,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => f.write_str(k.as_str()),
            TokenKind::Ident(name) => f.write_str(name),
            TokenKind::Pin(p) => write!(f, "{p}"),
            TokenKind::Int(n) => write!(f, "{n}"),
            TokenKind::Str(s) => write!(f, "\"{s}\""),
            TokenKind::Eq => f.write_str("="),
            TokenKind::Ne => f.write_str("<>"),
            TokenKind::Lt => f.write_str("<"),
            TokenKind::Gt => f.write_str(">"),
            TokenKind::Plus => f.write_str("+"),
            TokenKind::Minus => f.write_str("-"),
            TokenKind::LParen => f.write_str("("),
            TokenKind::RParen => f.write_str(")"),
            TokenKind::Comma => f.write_str(","),
            TokenKind::Semicolon => f.write_str(";"),
            TokenKind::Eol => f.write_str("end of line"),
        }
    }
}
