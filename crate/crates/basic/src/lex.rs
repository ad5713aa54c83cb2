use crate::error::LexError;
use crate::token::{Keyword, Pin, Token, TokenKind};

/// Splits source into tokens. Line breaks are significant and become
/// [`TokenKind::Eol`]; other whitespace and `'` comments are skipped.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut tokens = Vec::new();
    for (line_idx, line) in source.lines().enumerate() {
        let line_no = line_idx + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let start = i;
            let kind = match c {
                ' ' | '\t' | '\r' => {
                    i += 1;
                    continue;
                }
                '\'' => break,
                '=' => {
                    i += 1;
                    TokenKind::Eq
                }
                '<' if chars.get(i + 1) == Some(&'>') => {
                    i += 2;
                    TokenKind::Ne
                }
                '<' => {
                    i += 1;
                    TokenKind::Lt
                }
                '>' => {
                    i += 1;
                    TokenKind::Gt
                }
                '+' => {
                    i += 1;
                    TokenKind::Plus
                }
                '-' => {
                    i += 1;
                    TokenKind::Minus
                }
                '(' => {
                    i += 1;
                    TokenKind::LParen
                }
                ')' => {
                    i += 1;
                    TokenKind::RParen
                }
                ',' => {
                    i += 1;
                    TokenKind::Comma
                }
                ';' => {
                    i += 1;
                    TokenKind::Semicolon
                }
                '"' => {
                    let close = chars[i + 1..]
                        .iter()
                        .position(|&ch| ch == '"')
                        .ok_or_else(|| LexError::new(line_no, col, "unterminated string literal"))?;
                    let text: String = chars[i + 1..i + 1 + close].iter().collect();
                    i += close + 2;
                    TokenKind::Str(text)
                }
                d if d.is_ascii_digit() => {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let digits: String = chars[start..i].iter().collect();
                    let value = digits
                        .parse::<i64>()
                        .map_err(|_| LexError::new(line_no, col, "integer literal too large"))?;
                    TokenKind::Int(value)
                }
                a if a.is_ascii_alphabetic() || a == '_' => {
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    if let Some(pin) = lex_pin(&word, &chars, &mut i, line_no, col)? {
                        TokenKind::Pin(pin)
                    } else if let Some(kw) = Keyword::lookup(&word) {
                        TokenKind::Keyword(kw)
                    } else {
                        TokenKind::Ident(word.to_ascii_lowercase())
                    }
                }
                other => {
                    return Err(LexError::new(
                        line_no,
                        col,
                        format!("illegal character '{other}'"),
                    ))
                }
            };
            tokens.push(Token {
                kind,
                lexeme: chars[start..i].iter().collect(),
                line: line_no,
                col,
            });
        }
        tokens.push(Token {
            kind: TokenKind::Eol,
            lexeme: String::new(),
            line: line_no,
            col: chars.len() + 1,
        });
    }
    Ok(tokens)
}

/// `P<port>` followed directly by `.<bit>` is a pin reference.
fn lex_pin(
    word: &str,
    chars: &[char],
    i: &mut usize,
    line: usize,
    col: usize,
) -> Result<Option<Pin>, LexError> {
    let bytes = word.as_bytes();
    let is_port_word = bytes.len() == 2 && bytes[0].eq_ignore_ascii_case(&b'p') && bytes[1].is_ascii_digit();
    if !is_port_word || chars.get(*i) != Some(&'.') {
        return Ok(None);
    }
    let bit_start = *i + 1;
    let mut end = bit_start;
    while end < chars.len() && chars[end].is_ascii_alphanumeric() {
        end += 1;
    }
    let bit: String = chars[bit_start..end].iter().collect();
    let port = bytes[1] - b'0';
    let pin = match bit.parse::<u8>() {
        Ok(bit) => Pin::new(port, bit),
        Err(_) => None,
    };
    match pin {
        Some(pin) => {
            *i = end;
            Ok(Some(pin))
        }
        None => Err(LexError::new(
            line,
            col,
            format!("invalid pin reference '{word}.{bit}'"),
        )),
    }
}
