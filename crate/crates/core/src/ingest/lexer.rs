//! A small Java tokenizer.
//!
//! Comments are dropped and string, text-block and character literals are
//! collapsed into opaque [`TokenKind::Literal`] tokens, so nothing inside them
//! can be mistaken for code. Offsets are character (Unicode scalar) indices
//! into the source text.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Punct(char),
    Literal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn ident(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Ident(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_punct(&self, c: char) -> bool {
        self.kind == TokenKind::Punct(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub offset: usize,
    pub message: &'static str,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at offset {}", self.message, self.offset)
    }
}

impl std::error::Error for LexError {}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_part(c: char) -> bool {
    is_ident_start(c) || c.is_numeric()
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let n = chars.len();

    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let next = chars.get(i + 1).copied();

        if c == '/' && next == Some('/') {
            while i < n && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && next == Some('*') {
            i += 2;
            loop {
                if i + 1 >= n {
                    return Err(LexError {
                        offset: start,
                        message: "unterminated block comment",
                    });
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            continue;
        }

        if c == '"' {
            if next == Some('"') && chars.get(i + 2) == Some(&'"') {
                i = skip_text_block(&chars, i)?;
            } else {
                i = skip_quoted(&chars, i, '"', "unterminated string literal")?;
            }
            tokens.push(Token {
                kind: TokenKind::Literal,
                start,
                end: i,
            });
            continue;
        }
        if c == '\'' {
            i = skip_quoted(&chars, i, '\'', "unterminated character literal")?;
            tokens.push(Token {
                kind: TokenKind::Literal,
                start,
                end: i,
            });
            continue;
        }

        if c.is_ascii_digit() || (c == '.' && next.is_some_and(|d| d.is_ascii_digit())) {
            i += 1;
            while i < n {
                let d = chars[i];
                let prev = chars[i - 1];
                let hex = chars[start] == '0' && matches!(chars.get(start + 1), Some('x' | 'X'));
                let exponent_sign = (d == '+' || d == '-')
                    && ((!hex && matches!(prev, 'e' | 'E')) || (hex && matches!(prev, 'p' | 'P')));
                if d.is_ascii_alphanumeric() || d == '_' || d == '.' || exponent_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            tokens.push(Token {
                kind: TokenKind::Literal,
                start,
                end: i,
            });
            continue;
        }

        if is_ident_start(c) {
            while i < n && is_ident_part(chars[i]) {
                i += 1;
            }
            tokens.push(Token {
                kind: TokenKind::Ident(chars[start..i].iter().collect()),
                start,
                end: i,
            });
            continue;
        }

        tokens.push(Token {
            kind: TokenKind::Punct(c),
            start,
            end: i + 1,
        });
        i += 1;
    }
    Ok(tokens)
}

fn skip_quoted(chars: &[char], start: usize, quote: char, message: &'static str) -> Result<usize, LexError> {
    let mut i = start + 1;
    while i < chars.len() {
        match chars[i] {
            '\\' => i += 2,
            '\n' => break,
            c if c == quote => return Ok(i + 1),
            _ => i += 1,
        }
    }
    Err(LexError {
        offset: start,
        message,
    })
}

fn skip_text_block(chars: &[char], start: usize) -> Result<usize, LexError> {
    let mut i = start + 3;
    while i + 2 < chars.len() {
        match chars[i] {
            '\\' => i += 2,
            '"' if chars[i + 1] == '"' && chars[i + 2] == '"' => return Ok(i + 3),
            _ => i += 1,
        }
    }
    Err(LexError {
        offset: start,
        message: "unterminated text block",
    })
}
