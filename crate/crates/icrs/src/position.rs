//! Positions in the unfolded tree of a term, and the depth-based distance
//! between terms.
//!
//! A position is a finite sequence of argument indices: `0` selects the body
//! of an abstraction, `1` through `n` select the arguments of a function or
//! meta-variable application. The fixed-point binders of the rational
//! representation are transparent: `mu a. f(a)` has positions `e`, `1`,
//! `1 1`, ... exactly as the infinite tree `f(f(...))` does.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A path into the unfolded tree. The root is the empty path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// The depth of the position, i.e. its length.
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn parent(&self) -> Option<Position> {
        if self.0.is_empty() {
            None
        } else {
            Some(Position(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// True if `self` is a prefix of `other` (including equality).
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// True if `self` is a strict prefix of `other`.
    pub fn is_strict_prefix_of(&self, other: &Position) -> bool {
        other.0.len() > self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// True if neither position is a prefix of the other.
    pub fn is_disjoint_from(&self, other: &Position) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    /// The suffix of `other` below `self`, if `self` is a prefix.
    pub fn suffix_of(&self, other: &Position) -> Option<Position> {
        if self.is_prefix_of(other) {
            Some(Position(other.0[self.0.len()..].to_vec()))
        } else {
            None
        }
    }

    pub fn concat(&self, suffix: &Position) -> Position {
        let mut v = self.0.clone();
        v.extend_from_slice(&suffix.0);
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let mut first = true;
        for i in &self.0 {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}", i)?;
            first = false;
        }
        Ok(())
    }
}

impl From<Vec<usize>> for Position {
    fn from(v: Vec<usize>) -> Self {
        Position(v)
    }
}

impl From<&[usize]> for Position {
    fn from(v: &[usize]) -> Self {
        Position(v.to_vec())
    }
}

/// A position that does not exist in the term it was applied to.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no subterm at position {position}: the path leaves the term after {valid_steps} steps")]
pub struct PositionError {
    pub position: Position,
    pub valid_steps: usize,
}

/// Distance between two terms in the complete ultrametric on terms:
/// `Zero` if they are equal (up to alpha and unfolding), otherwise
/// `2^-k` where `k` is the least depth at which they differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Distance {
    Zero,
    /// The distance `2^-k` for the contained `k`.
    Exponent(u32),
}

impl Distance {
    pub fn as_f64(self) -> f64 {
        match self {
            Distance::Zero => 0.0,
            Distance::Exponent(k) => 0.5f64.powi(k as i32),
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Distance::*;
        match (self, other) {
            (Zero, Zero) => std::cmp::Ordering::Equal,
            (Zero, Exponent(_)) => std::cmp::Ordering::Less,
            (Exponent(_), Zero) => std::cmp::Ordering::Greater,
            // Larger exponent means smaller distance.
            (Exponent(a), Exponent(b)) => b.cmp(a),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => write!(f, "0"),
            Distance::Exponent(k) => write!(f, "2^-{}", k),
        }
    }
}
