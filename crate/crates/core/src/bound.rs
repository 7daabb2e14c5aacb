//! Refinement depth `d` and grade `c`, both ranging over ℕ ∪ {∞}.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Number of refinement rounds (or GNN layers) to account for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Depth {
    Finite(usize),
    Infinite,
}

/// Multiplicity cap applied to neighbor multisets. `Grade::Infinite` is
/// ordinary (ungraded) refinement, `Grade::Finite(1)` is bisimulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[derive(Default)]
pub enum Grade {
    Finite(u64),
    #[default]
    Infinite,
}

impl Depth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Depth::Finite(d) => Some(d),
            Depth::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Depth::Infinite
    }
}

impl Grade {
    /// Builds a finite grade; zero is rejected since it would erase every neighbor.
    pub fn new(c: u64) -> Result<Self, Error> {
        if c == 0 {
            return Err(Error::InvalidArgument("grade must be at least 1".into()));
        }
        Ok(Grade::Finite(c))
    }

    /// `min(m, c)`.
    #[inline]
    pub fn cap(self, m: u64) -> u64 {
        match self {
            Grade::Finite(c) => m.min(c),
            Grade::Infinite => m,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Grade::Finite(c) => Some(c),
            Grade::Infinite => None,
        }
    }

    /// `self >= other` with ∞ as the top element.
    pub fn covers(self, other: Grade) -> bool {
        match (self, other) {
            (Grade::Infinite, _) => true,
            (Grade::Finite(_), Grade::Infinite) => false,
            (Grade::Finite(a), Grade::Finite(b)) => a >= b,
        }
    }
}


fn is_inf(s: &str) -> bool {
    matches!(s, "inf" | "infinity" | "∞")
}

impl FromStr for Depth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if is_inf(s) {
            return Ok(Depth::Infinite);
        }
        s.parse::<usize>()
            .map(Depth::Finite)
            .map_err(|_| Error::InvalidArgument(format!("invalid depth {s:?} (expected integer or 'inf')")))
    }
}

impl FromStr for Grade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if is_inf(s) {
            return Ok(Grade::Infinite);
        }
        let c = s
            .parse::<u64>()
            .map_err(|_| Error::InvalidArgument(format!("invalid grade {s:?} (expected integer or 'inf')")))?;
        Grade::new(c)
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(d) => write!(f, "{d}"),
            Depth::Infinite => f.write_str("inf"),
        }
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grade::Finite(c) => write!(f, "{c}"),
            Grade::Infinite => f.write_str("inf"),
        }
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Depth);
string_serde!(Grade);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!("inf".parse::<Depth>().unwrap(), Depth::Infinite);
        assert_eq!("3".parse::<Depth>().unwrap(), Depth::Finite(3));
        assert_eq!("2".parse::<Grade>().unwrap(), Grade::Finite(2));
        assert!("0".parse::<Grade>().is_err());
        assert!("x".parse::<Depth>().is_err());
        assert_eq!(Grade::Infinite.to_string(), "inf");
    }

    #[test]
    fn cap_and_covers() {
        assert_eq!(Grade::Finite(2).cap(5), 2);
        assert_eq!(Grade::Infinite.cap(5), 5);
        assert!(Grade::Infinite.covers(Grade::Finite(9)));
        assert!(!Grade::Finite(1).covers(Grade::Finite(2)));
        assert!(!Grade::Finite(1).covers(Grade::Infinite));
    }
}
