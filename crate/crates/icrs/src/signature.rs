//! Symbol tables.
//!
//! A [`Signature`] assigns every function symbol a fixed arity. Three symbols
//! are built in and reserved: the truncation filler `⊤`, the collapse marker
//! `⊥` used by hypercollapsing normalization, and an internal unary tracer
//! used to follow subterm occurrences through rewrite steps. User signatures
//! may not redeclare them.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a function symbol in its [`Signature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

/// Filler symbol for truncations, printed `⊤`.
pub const TOP: SymbolId = SymbolId(0);
/// Replacement symbol for collapsed subterms, printed `_|_`.
pub const BOTTOM: SymbolId = SymbolId(1);
/// Internal unary symbol used to trace descendants. Never printed in normal
/// output and rejected by the parser.
pub const TRACER: SymbolId = SymbolId(2);

pub(crate) const RESERVED: [(&str, usize); 3] = [("⊤", 0), ("_|_", 0), ("@trace", 1)];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("symbol {0:?} is reserved")]
    Reserved(String),
    #[error("symbol {0:?} declared twice")]
    Duplicate(String),
}

/// A finite first-order signature: symbol names with arities.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    names: Vec<String>,
    arities: Vec<usize>,
    index: HashMap<String, SymbolId>,
}

impl Signature {
    /// A signature containing only the reserved symbols.
    pub fn new() -> Self {
        let mut sig = Signature { names: Vec::new(), arities: Vec::new(), index: HashMap::new() };
        for (name, arity) in RESERVED {
            let id = SymbolId(sig.names.len() as u32);
            sig.names.push(name.to_string());
            sig.arities.push(arity);
            sig.index.insert(name.to_string(), id);
        }
        sig
    }

    /// Declares a user symbol. Reserved names and duplicates are rejected.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<SymbolId, SignatureError> {
        if RESERVED.iter().any(|(r, _)| *r == name) || name == "⊥" {
            return Err(SignatureError::Reserved(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(SignatureError::Duplicate(name.to_string()));
        }
        let id = SymbolId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.arities.push(arity);
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        // `⊥` is accepted in term syntax as an alias for the ASCII spelling.
        if name == "⊥" {
            return Some(BOTTOM);
        }
        self.index.get(name).copied()
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn arity(&self, id: SymbolId) -> usize {
        self.arities[id.0 as usize]
    }

    pub fn contains(&self, id: SymbolId) -> bool {
        (id.0 as usize) < self.names.len()
    }

    /// User-declared symbols, in declaration order.
    pub fn user_symbols(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (RESERVED.len()..self.names.len()).map(|i| SymbolId(i as u32))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for id in self.user_symbols() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}/{}", self.name(id), self.arity(id))?;
        }
        Ok(())
    }
}
