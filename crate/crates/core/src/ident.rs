//! Identifiers naming objects, primitives, and functions.
//!
//! An [`Ident`] is a nonempty token with no whitespace and none of the
//! characters reserved by the book file format (`#`, `,`, `=`). Colons are
//! permitted so that namespaced names like `bigmem::mem` stay expressible;
//! the primitive-list syntax rejects them locally where `:` is a separator.

use std::borrow::Borrow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Characters an identifier may never contain (beyond whitespace).
const RESERVED: &[char] = &['#', ',', '='];

/// A validated identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Ident(String);

/// Rejection reason for a would-be identifier.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidIdent {
    #[error("identifier is empty")]
    Empty,
    #[error("identifier `{0}` contains `{1}`")]
    ReservedChar(String, char),
}

impl Ident {
    pub fn new(s: impl Into<String>) -> Result<Self, InvalidIdent> {
        let s = s.into();
        if s.is_empty() {
            return Err(InvalidIdent::Empty);
        }
        if let Some(c) = s.chars().find(|c| c.is_whitespace() || RESERVED.contains(c)) {
            return Err(InvalidIdent::ReservedChar(s, c));
        }
        Ok(Ident(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Ident {
    type Err = InvalidIdent;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ident::new(s)
    }
}

impl TryFrom<String> for Ident {
    type Error = InvalidIdent;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Ident::new(s)
    }
}

impl From<Ident> for String {
    fn from(id: Ident) -> String {
        id.0
    }
}

impl AsRef<str> for Ident {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Ident {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl PartialEq<str> for Ident {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Ident {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}
