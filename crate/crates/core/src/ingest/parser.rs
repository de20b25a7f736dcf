//! Brace-structured extraction of method declarations and call sites.
//!
//! The parser is not a Java grammar. It walks the token stream keeping a
//! stack of class bodies, method bodies and plain blocks, recognises member
//! declarations by shape (`Type name(params) [throws ..] {` or `;`), and
//! records every `name(` / `new Type(` inside a method body as a raw call
//! site attributed to the innermost enclosing method.

use std::collections::{BTreeSet, HashSet};

use super::lexer::{tokenize, LexError, Token, TokenKind};
use crate::span::Span;

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null",
];

const TYPE_KEYWORDS: &[&str] = &[
    "boolean", "byte", "char", "double", "float", "int", "long", "short", "void",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// A declaration as found in one file, before project-wide id assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundDecl {
    pub class_name: String,
    pub method_name: String,
    pub arity: usize,
    pub varargs: bool,
    pub span: Span,
}

/// A call expression found inside a method body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundCall {
    /// Index into the unit's declaration list.
    pub caller: usize,
    pub callee_name: String,
    pub arg_count: Option<usize>,
    /// Identifier immediately before the `.` preceding the call, if any.
    pub qualifier: Option<String>,
    pub site: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedFile {
    pub decls: Vec<FoundDecl>,
    pub calls: Vec<FoundCall>,
    pub class_names: Vec<String>,
    /// Every identifier appearing in the file.
    pub referenced: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    Lex(LexError),
    Unbalanced { offset: usize },
    Unterminated,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseError::Lex(e) => write!(f, "{e}"),
            ParseError::Unbalanced { offset } => write!(f, "unbalanced '}}' at offset {offset}"),
            ParseError::Unterminated => write!(f, "unclosed braces at end of file"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug)]
enum Frame {
    File,
    Class {
        name: String,
        member_start: Option<usize>,
        paren_depth: usize,
        in_initializer: bool,
    },
    Method {
        decl: usize,
    },
    Block,
}

/// Lists the names declared by `class`, `interface`, `enum` and `record`.
pub fn declared_class_names(src: &str) -> Vec<String> {
    match tokenize(src) {
        Ok(tokens) => class_headers(&tokens).map(|(_, name)| name.to_string()).collect(),
        Err(_) => Vec::new(),
    }
}

fn class_headers(tokens: &[Token]) -> impl Iterator<Item = (usize, &str)> {
    (0..tokens.len()).filter_map(move |i| class_header_at(tokens, i).map(|name| (i, name)))
}

fn class_header_at(tokens: &[Token], i: usize) -> Option<&str> {
    let kw = tokens[i].ident()?;
    if !matches!(kw, "class" | "interface" | "enum" | "record") {
        return None;
    }
    if i > 0 && tokens[i - 1].is_punct('.') {
        return None;
    }
    let name = tokens.get(i + 1)?.ident()?;
    if is_keyword(name) {
        return None;
    }
    if kw == "record" {
        // contextual keyword: `record Name(` or `record Name<`
        let after = tokens.get(i + 2)?;
        if !(after.is_punct('(') || after.is_punct('<')) {
            return None;
        }
    }
    Some(name)
}

struct Parser<'t> {
    tokens: &'t [Token],
    stack: Vec<Frame>,
    out: ParsedFile,
    pending_class: Option<String>,
    /// Indices of `)` tokens closing the argument list of a `new` expression.
    new_arg_closers: HashSet<usize>,
}

pub fn parse_source(src: &str) -> Result<ParsedFile, ParseError> {
    let tokens = tokenize(src).map_err(ParseError::Lex)?;
    let mut parser = Parser {
        tokens: &tokens,
        stack: vec![Frame::File],
        out: ParsedFile::default(),
        pending_class: None,
        new_arg_closers: HashSet::new(),
    };
    parser.run()?;
    let mut out = parser.out;
    out.referenced = tokens
        .iter()
        .filter_map(|t| t.ident())
        .filter(|s| !is_keyword(s))
        .map(str::to_string)
        .collect();
    Ok(out)
}

impl<'t> Parser<'t> {
    fn prev(&self, i: usize) -> Option<&'t Token> {
        i.checked_sub(1).map(|p| &self.tokens[p])
    }

    fn enclosing_method(&self) -> Option<usize> {
        self.stack.iter().rev().find_map(|f| match f {
            Frame::Method { decl } => Some(*decl),
            _ => None,
        })
    }

    fn enclosing_class(&self) -> Option<&str> {
        self.stack.iter().rev().find_map(|f| match f {
            Frame::Class { name, .. } => Some(name.as_str()),
            _ => None,
        })
    }

    fn at_class_level(&self) -> bool {
        matches!(self.stack.last(), Some(Frame::Class { .. } | Frame::File))
    }

    fn run(&mut self) -> Result<(), ParseError> {
        let mut i = 0;
        while i < self.tokens.len() {
            i = self.step(i)?;
        }
        if self.stack.len() != 1 {
            return Err(ParseError::Unterminated);
        }
        Ok(())
    }

    fn step(&mut self, i: usize) -> Result<usize, ParseError> {
        let tok = &self.tokens[i];

        if let Some(Frame::Class { member_start, .. }) = self.stack.last_mut() {
            if member_start.is_none() && !tok.is_punct('}') && !tok.is_punct(';') {
                *member_start = Some(tok.start);
            }
        }

        if let Some(name) = class_header_at(self.tokens, i) {
            let name = name.to_string();
            self.out.class_names.push(name.clone());
            self.pending_class = Some(name);
            return Ok(i + 2);
        }

        if self.pending_class.is_some() {
            if tok.is_punct('{') {
                let name = self.pending_class.take().unwrap();
                self.push_class(name);
            } else if tok.is_punct(';') {
                self.pending_class = None;
                self.end_member();
            }
            return Ok(i + 1);
        }

        match &tok.kind {
            TokenKind::Punct('{') => {
                let anonymous = i > 0 && self.new_arg_closers.contains(&(i - 1));
                if anonymous {
                    let name = self.enclosing_class().unwrap_or_default().to_string();
                    self.push_class(name);
                } else {
                    self.stack.push(Frame::Block);
                }
                Ok(i + 1)
            }
            TokenKind::Punct('}') => {
                match self.stack.pop() {
                    None | Some(Frame::File) => return Err(ParseError::Unbalanced { offset: tok.start }),
                    Some(Frame::Method { decl }) => self.out.decls[decl].span.end = tok.end,
                    Some(_) => {}
                }
                if matches!(self.stack.last(), Some(Frame::Class { .. })) {
                    self.end_member();
                }
                Ok(i + 1)
            }
            TokenKind::Punct(';') => {
                if let Some(Frame::Class { paren_depth: 0, .. }) = self.stack.last() {
                    self.end_member();
                }
                Ok(i + 1)
            }
            TokenKind::Punct(c @ ('(' | ')' | '=')) => {
                if let Some(Frame::Class {
                    paren_depth,
                    in_initializer,
                    ..
                }) = self.stack.last_mut()
                {
                    match c {
                        '(' => *paren_depth += 1,
                        ')' => *paren_depth = paren_depth.saturating_sub(1),
                        _ if *paren_depth == 0 => *in_initializer = true,
                        _ => {}
                    }
                }
                Ok(i + 1)
            }
            TokenKind::Ident(word) if word == "new" => Ok(self.new_expression(i)),
            TokenKind::Ident(word) => {
                let next_is_paren = self.tokens.get(i + 1).is_some_and(|t| t.is_punct('('));
                if !next_is_paren {
                    return Ok(i + 1);
                }
                if self.at_class_level() {
                    if let Some(next) = self.member_declaration(i) {
                        return Ok(next);
                    }
                }
                self.call_expression(i, word);
                Ok(i + 1)
            }
            _ => Ok(i + 1),
        }
    }

    fn push_class(&mut self, name: String) {
        self.stack.push(Frame::Class {
            name,
            member_start: None,
            paren_depth: 0,
            in_initializer: false,
        });
    }

    fn end_member(&mut self) {
        if let Some(Frame::Class {
            member_start,
            paren_depth,
            in_initializer,
            ..
        }) = self.stack.last_mut()
        {
            *member_start = None;
            *paren_depth = 0;
            *in_initializer = false;
        }
    }

    /// Tries to read a method or constructor declaration whose name is at `i`.
    /// Returns the index to continue from when one is found.
    fn member_declaration(&mut self, i: usize) -> Option<usize> {
        let Some(Frame::Class {
            name: class_name,
            member_start,
            paren_depth: 0,
            in_initializer: false,
        }) = self.stack.last()
        else {
            return None;
        };
        let name = self.tokens[i].ident()?;
        if is_keyword(name) {
            return None;
        }
        let prev = self.prev(i);
        let is_constructor = name == class_name;
        let shaped = match prev {
            None => is_constructor,
            Some(p) => match &p.kind {
                TokenKind::Ident(w) => {
                    !is_keyword(w) || TYPE_KEYWORDS.contains(&w.as_str()) || is_constructor
                }
                TokenKind::Punct('>') | TokenKind::Punct(']') => true,
                TokenKind::Punct('{' | ';' | '}' | ')') => is_constructor,
                _ => false,
            },
        };
        if !shaped {
            return None;
        }
        if matches!(prev, Some(p) if p.is_punct('>')) && self.type_args_follow_dot(i - 1) {
            return None;
        }

        let (close, arity, varargs) = self.parameter_list(i + 1)?;
        let mut j = close + 1;
        while j + 1 < self.tokens.len() && self.tokens[j].is_punct('[') && self.tokens[j + 1].is_punct(']') {
            j += 2;
        }
        if self.tokens.get(j).and_then(Token::ident) == Some("throws") {
            j += 1;
            while j < self.tokens.len() && !self.tokens[j].is_punct('{') && !self.tokens[j].is_punct(';') {
                j += 1;
            }
        } else if self.tokens.get(j).and_then(Token::ident) == Some("default") {
            while j < self.tokens.len() && !self.tokens[j].is_punct(';') {
                j += 1;
            }
        }
        let terminator = self.tokens.get(j)?;
        let start = member_start.unwrap_or(self.tokens[i].start);
        let decl = FoundDecl {
            class_name: class_name.clone(),
            method_name: name.to_string(),
            arity,
            varargs,
            span: Span::new(start, terminator.end),
        };
        if terminator.is_punct('{') {
            self.out.decls.push(decl);
            self.stack.push(Frame::Method {
                decl: self.out.decls.len() - 1,
            });
            Some(j + 1)
        } else if terminator.is_punct(';') {
            self.out.decls.push(decl);
            self.end_member();
            Some(j + 1)
        } else {
            None
        }
    }

    /// For a `>` at `close`, whether the matching `<` directly follows a `.`
    /// (explicit type arguments on a call, as in `Collections.<T>empty()`).
    fn type_args_follow_dot(&self, close: usize) -> bool {
        let mut depth = 0usize;
        let mut k = close;
        loop {
            let t = &self.tokens[k];
            if t.is_punct('>') {
                depth += 1;
            } else if t.is_punct('<') {
                depth -= 1;
                if depth == 0 {
                    return k > 0 && self.tokens[k - 1].is_punct('.');
                }
            } else if t.is_punct(';') || t.is_punct('{') || t.is_punct('}') {
                return false;
            }
            if k == 0 {
                return false;
            }
            k -= 1;
        }
    }

    /// Reads a declaration's parameter list starting at the `(` at `open`.
    /// Returns the index of the matching `)`, the parameter count and whether
    /// the last parameter is variadic.
    fn parameter_list(&self, open: usize) -> Option<(usize, usize, bool)> {
        let mut depth = 0usize;
        let mut commas = 0usize;
        let mut any = false;
        let mut varargs = false;
        let mut k = open;
        while k < self.tokens.len() {
            let t = &self.tokens[k];
            match t.kind {
                TokenKind::Punct('(' | '<' | '[') => depth += 1,
                TokenKind::Punct(')' | '>' | ']') => {
                    depth = depth.checked_sub(1)?;
                    if depth == 0 {
                        let arity = if any { commas + 1 } else { 0 };
                        return Some((k, arity, varargs));
                    }
                }
                TokenKind::Punct('{' | '}' | ';') => return None,
                TokenKind::Punct(',') if depth == 1 => commas += 1,
                TokenKind::Punct('.')
                    if depth == 1
                        && self.tokens.get(k + 1).is_some_and(|n| n.is_punct('.'))
                        && self.tokens.get(k + 2).is_some_and(|n| n.is_punct('.')) =>
                {
                    varargs = true;
                    k += 2;
                }
                _ => {}
            }
            if k > open {
                any = true;
            }
            k += 1;
        }
        None
    }

    /// Counts call arguments for the `(` at `open`. `None` when the list is
    /// not closed before the enclosing block ends.
    fn argument_count(&self, open: usize) -> (Option<usize>, Option<usize>) {
        let mut depth = 0usize;
        let mut commas = 0usize;
        let mut any = false;
        let mut k = open;
        while k < self.tokens.len() {
            let t = &self.tokens[k];
            match t.kind {
                TokenKind::Punct('(' | '[' | '{') => depth += 1,
                TokenKind::Punct(')' | ']' | '}') => {
                    if depth == 0 {
                        return (None, None);
                    }
                    depth -= 1;
                    if depth == 0 {
                        if !t.is_punct(')') {
                            return (None, None);
                        }
                        let n = if any { commas + 1 } else { 0 };
                        return (Some(n), Some(k));
                    }
                }
                TokenKind::Punct(';') if depth == 1 => return (None, None),
                TokenKind::Punct(',') if depth == 1 => commas += 1,
                TokenKind::Punct('<') => {
                    // generic arguments: `new Map<K, V>(`, `.<T>call(`
                    let generic = k > 0
                        && (self.tokens[k - 1].is_punct('.')
                            || (k >= 2 && self.tokens[k - 2].ident() == Some("new")));
                    if generic {
                        if let Some(end) = self.skip_angles(k) {
                            k = end + 1;
                            any = true;
                            continue;
                        }
                    }
                }
                _ => {}
            }
            if k > open {
                any = true;
            }
            k += 1;
        }
        (None, None)
    }

    /// Index of the `>` matching the `<` at `open`.
    fn skip_angles(&self, open: usize) -> Option<usize> {
        let mut depth = 0usize;
        for k in open..self.tokens.len() {
            let t = &self.tokens[k];
            if t.is_punct('<') {
                depth += 1;
            } else if t.is_punct('>') {
                depth -= 1;
                if depth == 0 {
                    return Some(k);
                }
            } else if !matches!(t.kind, TokenKind::Ident(_))
                && !t.is_punct(',')
                && !t.is_punct('.')
                && !t.is_punct('?')
                && !t.is_punct('[')
                && !t.is_punct(']')
                && !t.is_punct('@')
            {
                return None;
            }
        }
        None
    }

    /// Handles `new Type(...)`, `new Type<..>(...)` and `new a.b.Type(...)`.
    /// Returns the index to continue scanning from.
    fn new_expression(&mut self, i: usize) -> usize {
        let mut j = i + 1;
        let mut type_name: Option<(&'t str, usize)> = None;
        while let Some(t) = self.tokens.get(j) {
            match t.ident() {
                Some(name) if !is_keyword(name) => {
                    type_name = Some((name, t.start));
                    j += 1;
                    if self.tokens.get(j).is_some_and(|d| d.is_punct('.')) {
                        j += 1;
                        continue;
                    }
                }
                _ => {}
            }
            break;
        }
        let Some((name, site)) = type_name else {
            return i + 1;
        };
        if self.tokens.get(j).is_some_and(|t| t.is_punct('<')) {
            match self.skip_angles(j) {
                Some(end) => j = end + 1,
                None => return j,
            }
        }
        if !self.tokens.get(j).is_some_and(|t| t.is_punct('(')) {
            return j;
        }
        let (arg_count, close) = self.argument_count(j);
        if let Some(close) = close {
            self.new_arg_closers.insert(close);
        }
        if let Some(caller) = self.enclosing_method() {
            self.out.calls.push(FoundCall {
                caller,
                callee_name: name.to_string(),
                arg_count,
                qualifier: None,
                site,
            });
        }
        if let Some(Frame::Class { paren_depth, .. }) = self.stack.last_mut() {
            *paren_depth += 1;
        }
        j + 1
    }

    fn call_expression(&mut self, i: usize, name: &str) {
        let prev = self.prev(i);
        let method_ref = prev.is_some_and(|p| p.is_punct(':')) && self.prev(i - 1).is_some_and(|q| q.is_punct(':'));
        if method_ref || prev.is_some_and(|p| p.is_punct('@')) {
            return;
        }
        let after_dot = prev.is_some_and(|p| p.is_punct('.'));
        let callee_name = match name {
            "this" if !after_dot => match self.enclosing_class() {
                Some(class) => class.to_string(),
                None => return,
            },
            _ if is_keyword(name) => return,
            _ => name.to_string(),
        };
        let qualifier = if name == "this" {
            Some("this".to_string())
        } else if after_dot {
            i.checked_sub(2)
                .and_then(|q| self.tokens[q].ident())
                .map(str::to_string)
        } else {
            None
        };
        let Some(caller) = self.enclosing_method() else {
            return;
        };
        let (arg_count, _) = self.argument_count(i + 1);
        self.out.calls.push(FoundCall {
            caller,
            callee_name,
            arg_count,
            qualifier,
            site: self.tokens[i].start,
        });
    }
}
