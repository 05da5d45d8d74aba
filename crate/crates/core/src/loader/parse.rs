//! Line-oriented book parser.
//!
//! One directive per line, tokens separated by whitespace, `#` starting a
//! comment that runs to the end of the line:
//!
//! ```text
//! defimpl NAME foundation=FND prims=EXP:LOGIC:EXEC:ARITY[,...] [non-executable]
//! defabs  NAME foundation=FND prims=EXP:LOGIC:EXEC:ARITY[,...] [attachable] [non-executable] [children=NAME,...]
//! attach  ST IMPL
//! include PATH
//! defun   FNAME on=OBJNAME calls=EXP[,...]
//! cache   FNAME exec=EXECOP[,...]
//! invoke  FNAME
//! ```

use std::fmt;

use thiserror::Error;

use crate::ident::Ident;
use crate::registry::{AbstractObjectSpec, PrimitiveSig};

use super::{Book, BookEvent, LocatedEvent};

/// Syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl fmt::Display) -> Self {
        Self { line, column, message: message.to_string() }
    }
}

/// A token with the column it starts at.
#[derive(Clone, Copy)]
struct Token<'a> {
    column: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = match line.find('#') {
        Some(idx) => &line[..idx],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token { column: s + 1, text: &body[s..i] });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token { column: s + 1, text: &body[s..] });
    }
    tokens
}

/// Normalize a book path: forward slashes, `.` segments dropped, `..` and
/// absolute paths rejected so a book set stays self-contained.
pub fn normalize_book_path(path: &str) -> Result<String, String> {
    if path.starts_with('/') || path.starts_with('\\') || path.contains(':') {
        return Err(format!("book path `{path}` must be relative"));
    }
    let mut parts = Vec::new();
    for part in path.split(['/', '\\']) {
        match part {
            "" | "." => continue,
            ".." => return Err(format!("book path `{path}` may not contain `..`")),
            p => parts.push(p),
        }
    }
    if parts.is_empty() {
        return Err(format!("book path `{path}` is empty"));
    }
    Ok(parts.join("/"))
}

struct LineParser<'a> {
    line_no: usize,
    tokens: &'a [Token<'a>],
    next: usize,
}

impl<'a> LineParser<'a> {
    fn err(&self, column: usize, message: impl fmt::Display) -> ParseError {
        ParseError::new(self.line_no, column, message)
    }

    fn end_column(&self) -> usize {
        self.tokens
            .last()
            .map(|t| t.column + t.text.chars().count())
            .unwrap_or(1)
    }

    fn take(&mut self, what: &str) -> Result<Token<'a>, ParseError> {
        match self.tokens.get(self.next) {
            Some(tok) => {
                self.next += 1;
                Ok(*tok)
            }
            None => Err(self.err(self.end_column(), format!("expected {what}"))),
        }
    }

    fn take_ident(&mut self, what: &str) -> Result<Ident, ParseError> {
        let tok = self.take(what)?;
        Ident::new(tok.text).map_err(|e| ParseError::new(self.line_no, tok.column, e))
    }

    /// Remaining tokens must be `key=value` pairs or bare flags; order-free,
    /// duplicates rejected.
    fn take_options(
        &mut self,
        keys: &[&str],
        flags: &[&str],
    ) -> Result<(Vec<(String, String, usize)>, Vec<String>), ParseError> {
        let mut kvs: Vec<(String, String, usize)> = Vec::new();
        let mut seen_flags: Vec<String> = Vec::new();
        while let Some(tok) = self.tokens.get(self.next) {
            self.next += 1;
            if let Some((key, value)) = tok.text.split_once('=') {
                if !keys.contains(&key) {
                    return Err(self.err(tok.column, format!("unknown option `{key}`")));
                }
                if kvs.iter().any(|(k, _, _)| k == key) {
                    return Err(self.err(tok.column, format!("duplicate option `{key}`")));
                }
                kvs.push((key.to_string(), value.to_string(), tok.column));
            } else if flags.contains(&tok.text) {
                if seen_flags.iter().any(|f| f == tok.text) {
                    return Err(self.err(tok.column, format!("duplicate flag `{}`", tok.text)));
                }
                seen_flags.push(tok.text.to_string());
            } else {
                return Err(self.err(tok.column, format!("unexpected token `{}`", tok.text)));
            }
        }
        Ok((kvs, seen_flags))
    }

    fn require_kv<'b>(
        &self,
        kvs: &'b [(String, String, usize)],
        key: &str,
    ) -> Result<(&'b str, usize), ParseError> {
        kvs.iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, col)| (v.as_str(), *col))
            .ok_or_else(|| self.err(self.end_column(), format!("missing `{key}=` option")))
    }

    fn ident_at(&self, text: &str, column: usize) -> Result<Ident, ParseError> {
        Ident::new(text).map_err(|e| ParseError::new(self.line_no, column, e))
    }

    fn ident_list(&self, text: &str, column: usize) -> Result<Vec<Ident>, ParseError> {
        text.split(',').map(|part| self.ident_at(part, column)).collect()
    }

    fn prim_list(&self, text: &str, column: usize) -> Result<Vec<PrimitiveSig>, ParseError> {
        text.split(',')
            .map(|item| {
                let fields: Vec<&str> = item.split(':').collect();
                if fields.len() != 4 {
                    return Err(self.err(
                        column,
                        format!("primitive `{item}` must be EXPORT:LOGIC:EXEC:ARITY"),
                    ));
                }
                let arity: u32 = fields[3]
                    .parse()
                    .map_err(|_| self.err(column, format!("bad arity `{}`", fields[3])))?;
                Ok(PrimitiveSig::new(
                    self.ident_at(fields[0], column)?,
                    self.ident_at(fields[1], column)?,
                    self.ident_at(fields[2], column)?,
                    arity,
                ))
            })
            .collect()
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.next) {
            Some(tok) => Err(self.err(tok.column, format!("unexpected token `{}`", tok.text))),
            None => Ok(()),
        }
    }

    fn object_spec(&mut self, allow_attachable: bool) -> Result<AbstractObjectSpec, ParseError> {
        let name = self.take_ident("object name")?;
        let mut flags: Vec<&str> = vec!["non-executable"];
        let mut keys: Vec<&str> = vec!["foundation", "prims"];
        if allow_attachable {
            flags.push("attachable");
            keys.push("children");
        }
        let (kvs, seen_flags) = self.take_options(&keys, &flags)?;
        let (foundation, fcol) = self.require_kv(&kvs, "foundation")?;
        let foundation = self.ident_at(foundation, fcol)?;
        let (prims, pcol) = self.require_kv(&kvs, "prims")?;
        let primitives = self.prim_list(prims, pcol)?;
        let children = match kvs.iter().find(|(k, _, _)| k == "children") {
            Some((_, v, col)) => self.ident_list(v, *col)?,
            None => Vec::new(),
        };
        let spec = AbstractObjectSpec::new(name, foundation, primitives)
            .map_err(|e| self.err(1, e))?
            .attachable(seen_flags.iter().any(|f| f == "attachable"))
            .non_executable(seen_flags.iter().any(|f| f == "non-executable"))
            .children(children);
        Ok(spec)
    }
}

fn parse_line(line_no: usize, tokens: &[Token<'_>]) -> Result<BookEvent, ParseError> {
    let mut p = LineParser { line_no, tokens, next: 0 };
    let head = p.take("directive")?;
    let column = head.column;
    let event = match head.text {
        "defimpl" => BookEvent::DefineObject(p.object_spec(false)?),
        "defabs" => BookEvent::DefineObject(p.object_spec(true)?),
        "attach" => {
            let attachable = p.take_ident("attachable name")?;
            let implementation = p.take_ident("implementation name")?;
            BookEvent::Attach { attachable, implementation }
        }
        "include" => {
            let tok = p.take("book path")?;
            let path = normalize_book_path(tok.text)
                .map_err(|e| ParseError::new(line_no, tok.column, e))?;
            BookEvent::Include(path)
        }
        "defun" => {
            let fname = p.take_ident("function name")?;
            let (kvs, _) = p.take_options(&["on", "calls"], &[])?;
            let (object, ocol) = p.require_kv(&kvs, "on")?;
            let object = p.ident_at(object, ocol)?;
            let (calls, ccol) = p.require_kv(&kvs, "calls")?;
            let calls = p.ident_list(calls, ccol)?;
            BookEvent::DefineFunction { fname, object, calls }
        }
        "cache" => {
            let fname = p.take_ident("function name")?;
            let (kvs, _) = p.take_options(&["exec"], &[])?;
            let (ops, ecol) = p.require_kv(&kvs, "exec")?;
            let exec_ops = p.ident_list(ops, ecol)?;
            BookEvent::CacheEntry { fname, exec_ops }
        }
        "invoke" => BookEvent::Invoke(p.take_ident("function name")?),
        other => {
            return Err(ParseError::new(line_no, column, format!("unknown directive `{other}`")))
        }
    };
    p.finish()?;
    Ok(event)
}

/// Parse book text into located events, in textual order.
pub fn parse_events(text: &str) -> Result<Vec<LocatedEvent>, ParseError> {
    let mut events = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = tokenize(raw.trim_end_matches('\r'));
        if tokens.is_empty() {
            continue;
        }
        events.push(LocatedEvent { line: line_no, event: parse_line(line_no, &tokens)? });
    }
    Ok(events)
}

impl Book {
    /// Parse `text` as the book stored at `path` (normalized before use).
    pub fn parse(path: &str, text: &str) -> Result<Self, ParseError> {
        let path = normalize_book_path(path).map_err(|e| ParseError::new(0, 0, e))?;
        Ok(Book { path, events: parse_events(text)? })
    }
}
