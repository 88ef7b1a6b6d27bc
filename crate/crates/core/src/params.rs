use std::fmt;

use crate::{Error, Result};

/// A search instance: `n1` unmarked (collective) basis states and `n2`
/// marked ones, `N = n1 + n2` in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchParams {
    n1: u64,
    n2: u64,
}

impl SearchParams {
    pub fn new(n1: u64, n2: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 || n1.checked_add(n2).is_none() {
            return Err(Error::InvalidParams { n1, n2 });
        }
        Ok(Self { n1, n2 })
    }

    /// `N = 2^log2_n` with `marked` marked states.
    pub fn from_log2(log2_n: u32, marked: u64) -> Result<Self> {
        if log2_n == 0 || log2_n > 62 {
            return Err(Error::InvalidSizing(format!(
                "log2-n must be in 1..=62, got {log2_n}"
            )));
        }
        let n_total = 1u64 << log2_n;
        if marked == 0 || marked >= n_total {
            return Err(Error::InvalidSizing(format!(
                "marked count {marked} must be in 1..{n_total}"
            )));
        }
        Self::new(n_total - marked, marked)
    }

    pub fn n1(&self) -> u64 {
        self.n1
    }

    pub fn n2(&self) -> u64 {
        self.n2
    }

    pub fn n_total(&self) -> u64 {
        self.n1 + self.n2
    }

    /// Exact rotation half-angle `arcsin(sqrt(n2 / N))`.
    pub fn theta(&self) -> f64 {
        (self.n2 as f64 / self.n_total() as f64).sqrt().asin()
    }

    pub fn regime(&self) -> Regime {
        let n = self.n_total() as u128;
        let quad = 4 * self.n2 as u128;
        let double = 2 * self.n2 as u128;
        if double >= n {
            Regime::Invalid
        } else if quad > n {
            Regime::Inefficient
        } else if quad == n {
            Regime::Boundary
        } else {
            Regime::Efficient
        }
    }
}

impl fmt::Display for SearchParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} (n1={}, n2={})", self.n_total(), self.n1, self.n2)
    }
}

/// How well the search works for a given marked fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `n2 < N/4`
    Efficient,
    /// `n2 = N/4`: certainty after a single iteration.
    Boundary,
    /// `N/4 < n2 < N/2`: ball 1 reverses on the first iteration.
    Inefficient,
    /// `n2 >= N/2`, including `n1 = n2`.
    Invalid,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Efficient => "efficient",
            Regime::Boundary => "boundary",
            Regime::Inefficient => "inefficient",
            Regime::Invalid => "invalid",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
