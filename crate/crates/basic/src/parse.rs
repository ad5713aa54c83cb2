//! Recursive-descent parser over the line-oriented token stream.

use crate::ast::{ArithOp, CmpOp, Expr, LcdArg, Program, Stmt};
use crate::error::{ParseError, ParseErrorKind};
use crate::token::{Keyword, Token, TokenKind};

pub fn parse(tokens: &[Token]) -> Result<Program, ParseError> {
    let mut parser = Parser {
        tokens,
        pos: 0,
        loop_depth: 0,
    };
    let (body, end) = parser.block()?;
    match end {
        BlockEnd::Eof => Ok(Program { body }),
        other => Err(parser.malformed_at(other.line(), format!("unexpected {}", other.describe()))),
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    loop_depth: usize,
}

/// What stopped a block.
enum BlockEnd {
    Eof,
    Else(usize),
    EndIf(usize),
    Loop(usize),
}

impl BlockEnd {
    fn line(&self) -> usize {
        match self {
            BlockEnd::Eof => 0,
            BlockEnd::Else(l) | BlockEnd::EndIf(l) | BlockEnd::Loop(l) => *l,
        }
    }

    fn describe(&self) -> &'static str {
        match self {
            BlockEnd::Eof => "end of input",
            BlockEnd::Else(_) => "Else",
            BlockEnd::EndIf(_) => "End If",
            BlockEnd::Loop(_) => "Loop",
        }
    }
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'a TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn line(&self) -> usize {
        self.peek()
            .or_else(|| self.tokens.last())
            .map_or(1, |t| t.line)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let tok = self.tokens.get(self.pos);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn malformed_at(&self, line: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            kind: ParseErrorKind::MalformedStatement(message.into()),
        }
    }

    fn malformed(&self, message: impl Into<String>) -> ParseError {
        self.malformed_at(self.line(), message)
    }

    fn expect(&mut self, kind: &TokenKind) -> PResult<()> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {kind}")))
        }
    }

    fn unexpected(&self, context: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.malformed(format!("{context}, found {}", t.kind)),
            None => self.malformed(format!("{context}, found end of input")),
        }
    }

    fn end_of_statement(&mut self) -> PResult<()> {
        match self.peek_kind() {
            None => Ok(()),
            Some(TokenKind::Eol) => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(self.unexpected("expected end of line")),
        }
    }

    fn block(&mut self) -> PResult<(Vec<Stmt>, BlockEnd)> {
        let mut body = Vec::new();
        loop {
            let Some(tok) = self.peek() else {
                return Ok((body, BlockEnd::Eof));
            };
            let line = tok.line;
            match &tok.kind {
                TokenKind::Eol => {
                    self.pos += 1;
                }
                TokenKind::Keyword(Keyword::Else) => {
                    self.pos += 1;
                    self.end_of_statement()?;
                    return Ok((body, BlockEnd::Else(line)));
                }
                TokenKind::Keyword(Keyword::End) => {
                    self.pos += 1;
                    if !self.eat(&TokenKind::Keyword(Keyword::If)) {
                        return Err(self.unexpected("expected If after End"));
                    }
                    self.end_of_statement()?;
                    return Ok((body, BlockEnd::EndIf(line)));
                }
                TokenKind::Keyword(Keyword::Loop) => {
                    self.pos += 1;
                    self.end_of_statement()?;
                    return Ok((body, BlockEnd::Loop(line)));
                }
                _ => body.push(self.statement()?),
            }
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let tok = self.bump().expect("caller checked");
        let line = tok.line;
        let stmt = match &tok.kind {
            TokenKind::Keyword(Keyword::If) => return self.if_statement(line),
            TokenKind::Keyword(Keyword::Do) => return self.do_statement(line),
            TokenKind::Keyword(Keyword::Exit) => {
                if !(self.eat(&TokenKind::Keyword(Keyword::Loop))
                    || self.eat(&TokenKind::Keyword(Keyword::Do)))
                {
                    return Err(self.unexpected("expected Loop after Exit"));
                }
                if self.loop_depth == 0 {
                    return Err(ParseError {
                        line,
                        kind: ParseErrorKind::ExitOutsideLoop,
                    });
                }
                Stmt::ExitLoop
            }
            TokenKind::Keyword(Keyword::Incr) => Stmt::Incr(self.ident()?),
            TokenKind::Keyword(Keyword::Decr) => Stmt::Decr(self.ident()?),
            TokenKind::Keyword(Keyword::Cls) => Stmt::Cls,
            TokenKind::Keyword(Keyword::Waitms) => Stmt::Waitms(self.expr()?),
            TokenKind::Keyword(Keyword::Locate) => {
                let row = self.expr()?;
                self.expect(&TokenKind::Comma)?;
                Stmt::LcdLocate(row, self.expr()?)
            }
            TokenKind::Keyword(Keyword::Deflcdchar) => {
                let slot = self.expr()?;
                let mut rows = Vec::with_capacity(8);
                while self.eat(&TokenKind::Comma) {
                    rows.push(self.expr()?);
                }
                let rows: [Expr; 8] = rows
                    .try_into()
                    .map_err(|r: Vec<Expr>| self.malformed(format!("Deflcdchar needs 8 row values, found {}", r.len())))?;
                Stmt::DefChar(slot, Box::new(rows))
            }
            TokenKind::Keyword(Keyword::Lcd) => Stmt::LcdPrint(self.lcd_args()?),
            TokenKind::Ident(name) => {
                self.expect(&TokenKind::Eq)?;
                Stmt::Assign(name.clone(), self.expr()?)
            }
            other => return Err(self.malformed_at(line, format!("unexpected {other}"))),
        };
        self.end_of_statement()?;
        Ok(stmt)
    }

    fn if_statement(&mut self, line: usize) -> PResult<Stmt> {
        let cond = self.expr()?;
        self.expect(&TokenKind::Keyword(Keyword::Then))?;
        self.end_of_statement()?;
        let unterminated = ParseError {
            line,
            kind: ParseErrorKind::UnterminatedIf,
        };
        let (then_block, end) = self.block()?;
        let else_block = match end {
            BlockEnd::EndIf(_) => None,
            BlockEnd::Else(_) => match self.block()? {
                (block, BlockEnd::EndIf(_)) => Some(block),
                (_, BlockEnd::Eof) => return Err(unterminated),
                (_, other) => return Err(self.malformed_at(other.line(), format!("unexpected {}", other.describe()))),
            },
            BlockEnd::Eof => return Err(unterminated),
            BlockEnd::Loop(l) => return Err(self.malformed_at(l, "Loop closes an open If")),
        };
        Ok(Stmt::If {
            cond,
            then_block,
            else_block,
        })
    }

    fn do_statement(&mut self, line: usize) -> PResult<Stmt> {
        self.end_of_statement()?;
        self.loop_depth += 1;
        let result = self.block();
        self.loop_depth -= 1;
        match result? {
            (body, BlockEnd::Loop(_)) => Ok(Stmt::DoLoop(body)),
            (_, BlockEnd::Eof) => Err(ParseError {
                line,
                kind: ParseErrorKind::UnterminatedDo,
            }),
            (_, other) => Err(self.malformed_at(other.line(), format!("{} closes an open Do", other.describe()))),
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek_kind() {
            Some(TokenKind::Ident(name)) => {
                self.pos += 1;
                Ok(name.clone())
            }
            _ => Err(self.unexpected("expected variable name")),
        }
    }

    fn lcd_args(&mut self) -> PResult<Vec<LcdArg>> {
        let mut args = Vec::new();
        loop {
            let arg = match self.peek_kind() {
                Some(TokenKind::Str(s)) => {
                    self.pos += 1;
                    LcdArg::Text(s.clone())
                }
                Some(TokenKind::Keyword(Keyword::Chr)) => {
                    self.pos += 1;
                    self.expect(&TokenKind::LParen)?;
                    let e = self.expr()?;
                    self.expect(&TokenKind::RParen)?;
                    LcdArg::Chr(e)
                }
                _ => LcdArg::Number(self.expr()?),
            };
            args.push(arg);
            if !self.eat(&TokenKind::Semicolon) {
                return Ok(args);
            }
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let op = match self.peek_kind() {
            Some(TokenKind::Eq) => CmpOp::Eq,
            Some(TokenKind::Ne) => CmpOp::Ne,
            Some(TokenKind::Lt) => CmpOp::Lt,
            Some(TokenKind::Gt) => CmpOp::Gt,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.additive()?;
        Ok(Expr::Cmp(op, Box::new(lhs), Box::new(rhs)))
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => ArithOp::Add,
                Some(TokenKind::Minus) => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Arith(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if !self.eat(&TokenKind::Minus) {
            return self.primary();
        }
        // A minus directly before a literal is part of the literal.
        if let Some(TokenKind::Int(n)) = self.peek_kind() {
            self.pos += 1;
            return self.literal(-n);
        }
        Ok(Expr::Neg(Box::new(self.unary()?)))
    }

    fn literal(&self, value: i64) -> PResult<Expr> {
        i16::try_from(value)
            .map(Expr::Int)
            .map_err(|_| self.malformed(format!("integer {value} outside the 16-bit range")))
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek_kind() {
            Some(TokenKind::Int(n)) => {
                self.pos += 1;
                self.literal(*n)
            }
            Some(TokenKind::Ident(name)) => {
                self.pos += 1;
                Ok(Expr::Var(name.clone()))
            }
            Some(TokenKind::Pin(pin)) => {
                self.pos += 1;
                Ok(Expr::Pin(*pin))
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&TokenKind::RParen)?;
                Ok(e)
            }
            _ => Err(self.unexpected("expected expression")),
        }
    }
}
