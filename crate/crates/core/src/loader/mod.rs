//! Book loading: definition scripts with include semantics, compiled-cache
//! handling, and dispatch tracing.
//!
//! A *book* is a file of events. Loading applies them in order against a
//! [`LoadContext`]: object definitions and attachments go to the registry;
//! `defun` computes a function's exec binding by mapping each called export
//! through the owning object's effective binding. A `cache` event models the
//! executable code a certified book ships with: it replaces the freshly
//! computed binding verbatim, *except* for functions over attached objects,
//! whose names sit in the rebind set and whose caches must be ignored so the
//! substituted exec ids win.
//!
//! Books are identified by normalized relative path and load at most once.

mod parse;

pub use parse::{normalize_book_path, parse_events, ParseError};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::ident::Ident;
use crate::registry::{AbstractObjectSpec, Provenance, RegistryError, RegistryState};

// ---------------------------------------------------------------------------
// Books and events
// ---------------------------------------------------------------------------

/// One loadable event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BookEvent {
    DefineObject(AbstractObjectSpec),
    Attach { attachable: Ident, implementation: Ident },
    Include(String),
    DefineFunction { fname: Ident, object: Ident, calls: Vec<Ident> },
    CacheEntry { fname: Ident, exec_ops: Vec<Ident> },
    Invoke(Ident),
}

/// An event with the line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedEvent {
    pub line: usize,
    pub event: BookEvent,
}

/// A parsed book: normalized path plus events in textual order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Book {
    pub path: String,
    pub events: Vec<LocatedEvent>,
}

// ---------------------------------------------------------------------------
// Book sources
// ---------------------------------------------------------------------------

/// Where book text comes from. Paths are normalized relative paths; the
/// source decides what they are relative to.
pub trait BookSource {
    fn read_book(&self, path: &str) -> io::Result<String>;
}

/// Books on disk under a root directory.
pub struct DirBookSource {
    root: PathBuf,
}

impl DirBookSource {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }
}

impl BookSource for DirBookSource {
    fn read_book(&self, path: &str) -> io::Result<String> {
        fs::read_to_string(self.root.join(path))
    }
}

/// In-memory book set, mainly for tests.
#[derive(Debug, Clone, Default)]
pub struct MemoryBookSource {
    books: BTreeMap<String, String>,
}

impl MemoryBookSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, path: &str, text: impl Into<String>) -> &mut Self {
        let path = normalize_book_path(path).expect("fixture path must be valid");
        self.books.insert(path, text.into());
        self
    }
}

impl BookSource for MemoryBookSource {
    fn read_book(&self, path: &str) -> io::Result<String> {
        self.books
            .get(path)
            .cloned()
            .ok_or_else(|| io::Error::new(io::ErrorKind::NotFound, path.to_string()))
    }
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Failure applying a single event, before book/line provenance is added.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("cache for `{fname}` has no preceding defun in the same book")]
    CacheWithoutFunction { fname: Ident },
    #[error("function `{fname}` is not defined")]
    UnknownFunction { fname: Ident },
    #[error("function `{fname}` calls `{export}`, which `{object}` does not export")]
    UnknownExport { fname: Ident, object: Ident, export: Ident },
}

/// Load failure with book (and, where it applies, line) provenance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("{book}: {source}")]
    Parse { book: String, source: ParseError },
    #[error("cannot read book `{book}`: {message}")]
    MissingBook { book: String, message: String },
    #[error("{book}, line {line}: including `{path}` forms a cycle")]
    IncludeCycle { book: String, line: usize, path: String },
    #[error("{book}, line {line}: {source}")]
    Event {
        book: String,
        line: usize,
        source: EventError,
    },
    #[error("invalid book path: {0}")]
    BadPath(String),
}

// ---------------------------------------------------------------------------
// Trace records
// ---------------------------------------------------------------------------

/// One invocation trace: the function and the exec ops it is bound to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub fname: Ident,
    pub exec_ops: Vec<Ident>,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ops: Vec<&str> = self.exec_ops.iter().map(|op| op.as_str()).collect();
        write!(f, "{} -> {}", self.fname, ops.join(","))
    }
}

// ---------------------------------------------------------------------------
// Load context
// ---------------------------------------------------------------------------

/// Session state built up by loading books.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadContext {
    registry: RegistryState,
    function_bindings: BTreeMap<Ident, Vec<Ident>>,
    loaded_books: BTreeSet<String>,
    trace_log: Vec<TraceRecord>,
    /// Functions over attached objects: their compiled caches must be
    /// ignored and the freshly computed binding kept.
    rebind_set: BTreeSet<Ident>,
}

impl LoadContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn registry(&self) -> &RegistryState {
        &self.registry
    }

    pub fn function_binding(&self, fname: &Ident) -> Option<&[Ident]> {
        self.function_bindings.get(fname).map(|v| v.as_slice())
    }

    pub fn function_names(&self) -> impl Iterator<Item = &Ident> {
        self.function_bindings.keys()
    }

    pub fn loaded_books(&self) -> impl Iterator<Item = &str> {
        self.loaded_books.iter().map(|s| s.as_str())
    }

    pub fn trace_log(&self) -> &[TraceRecord] {
        &self.trace_log
    }

    pub fn rebind_set(&self) -> impl Iterator<Item = &Ident> {
        self.rebind_set.iter()
    }

    /// Load the book at `path` from `source`, applying its events in order.
    /// Loading an already-loaded book is a no-op. On error the context may
    /// hold a prefix of the book's effects; callers wanting rollback should
    /// clone first.
    pub fn load_book(&mut self, source: &dyn BookSource, path: &str) -> Result<(), LoadError> {
        let path = normalize_book_path(path).map_err(LoadError::BadPath)?;
        let mut in_progress = Vec::new();
        self.load_normalized(source, &path, &mut in_progress, None)
    }

    fn load_normalized(
        &mut self,
        source: &dyn BookSource,
        path: &str,
        in_progress: &mut Vec<String>,
        include_site: Option<(&str, usize)>,
    ) -> Result<(), LoadError> {
        if self.loaded_books.contains(path) {
            return Ok(());
        }
        if in_progress.iter().any(|p| p == path) {
            let (book, line) = include_site.expect("cycles only arise from includes");
            return Err(LoadError::IncludeCycle {
                book: book.to_string(),
                line,
                path: path.to_string(),
            });
        }
        let text = source.read_book(path).map_err(|e| LoadError::MissingBook {
            book: path.to_string(),
            message: e.to_string(),
        })?;
        let book = Book::parse(path, &text)
            .map_err(|e| LoadError::Parse { book: path.to_string(), source: e })?;

        in_progress.push(path.to_string());
        // Functions introduced by this book; a cache may only follow one of
        // these.
        let mut own_functions: BTreeSet<Ident> = BTreeSet::new();
        for located in &book.events {
            let at_event = |e: EventError| LoadError::Event {
                book: path.to_string(),
                line: located.line,
                source: e,
            };
            match &located.event {
                BookEvent::DefineObject(spec) => {
                    self.registry = self
                        .registry
                        .define_object(spec.clone())
                        .map_err(|e| at_event(e.into()))?;
                }
                BookEvent::Attach { attachable, implementation } => {
                    self.registry = self
                        .registry
                        .attach(attachable.clone(), implementation.clone())
                        .map_err(|e| at_event(e.into()))?;
                }
                BookEvent::Include(inner) => {
                    self.load_normalized(source, inner, in_progress, Some((path, located.line)))?;
                }
                BookEvent::DefineFunction { fname, object, calls } => {
                    self.define_function(fname, object, calls).map_err(at_event)?;
                    own_functions.insert(fname.clone());
                }
                BookEvent::CacheEntry { fname, exec_ops } => {
                    if !own_functions.contains(fname) {
                        return Err(at_event(EventError::CacheWithoutFunction {
                            fname: fname.clone(),
                        }));
                    }
                    if !self.rebind_set.contains(fname) {
                        self.function_bindings.insert(fname.clone(), exec_ops.clone());
                    }
                    // Otherwise the cache is ignored: the binding computed at
                    // the defun event stands.
                }
                BookEvent::Invoke(fname) => {
                    self.invoke(fname).map_err(at_event)?;
                }
            }
        }
        in_progress.pop();
        self.loaded_books.insert(path.to_string());
        Ok(())
    }

    fn define_function(
        &mut self,
        fname: &Ident,
        object: &Ident,
        calls: &[Ident],
    ) -> Result<(), EventError> {
        let binding = self.registry.effective_binding(object)?;
        let spec = self.registry.spec(object).expect("bound objects are defined");
        let mut exec_ops = Vec::with_capacity(calls.len());
        for export in calls {
            let position = spec.export_position(export).ok_or_else(|| EventError::UnknownExport {
                fname: fname.clone(),
                object: object.clone(),
                export: export.clone(),
            })?;
            exec_ops.push(binding.effective_exec()[position].clone());
        }
        if matches!(binding.provenance(), Provenance::AttachedVia(_)) {
            self.rebind_set.insert(fname.clone());
        } else {
            self.rebind_set.remove(fname);
        }
        self.function_bindings.insert(fname.clone(), exec_ops);
        Ok(())
    }

    /// Record an invocation of `fname`: appends and returns a trace line
    /// listing its bound exec ops. No object state is touched.
    pub fn invoke(&mut self, fname: &Ident) -> Result<TraceRecord, EventError> {
        let exec_ops = self
            .function_bindings
            .get(fname)
            .ok_or_else(|| EventError::UnknownFunction { fname: fname.clone() })?
            .clone();
        let record = TraceRecord { fname: fname.clone(), exec_ops };
        self.trace_log.push(record.clone());
        Ok(record)
    }
}
