use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::Matching;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Problem {
    /// Minimise `|sat_m - sat_w|` over stable matchings.
    Sesm,
    /// Minimise `max(sat_m, sat_w)` over stable matchings.
    Bsm,
    /// Largest weakly stable matching.
    MaxSmt,
    /// Smallest weakly stable matching.
    MinSmt,
    /// The set of `(sat_m, sat_w)` pairs over stable matchings.
    Gsm,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Sesm => "sesm",
            Problem::Bsm => "bsm",
            Problem::MaxSmt => "max-smt",
            Problem::MinSmt => "min-smt",
            Problem::Gsm => "gsm",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "sesm" => Problem::Sesm,
            "bsm" => Problem::Bsm,
            "max-smt" | "maxsmt" => Problem::MaxSmt,
            "min-smt" | "minsmt" => Problem::MinSmt,
            "gsm" => Problem::Gsm,
            _ => return Err(format!("unknown problem '{s}'")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Xp,
    Fpt,
    Oracle,
    Gs,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Xp => "xp",
            Method::Fpt => "fpt",
            Method::Oracle => "oracle",
            Method::Gs => "gs",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "xp" => Method::Xp,
            "fpt" => Method::Fpt,
            "oracle" => Method::Oracle,
            "gs" => Method::Gs,
            _ => return Err(format!("unknown method '{s}'")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Optimum {
    Value(i64),
    /// Sorted `(sat_m, sat_w)` pairs.
    Pairs(Vec<(u64, u64)>),
}

impl Optimum {
    pub fn value(&self) -> Option<i64> {
        match self {
            Optimum::Value(v) => Some(*v),
            Optimum::Pairs(_) => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Decomposition nodes processed.
    pub nodes: usize,
    pub width: usize,
    /// Table rows materialised: one per (node, key) pair.
    pub rows: usize,
    /// Stored non-empty entries over all rows.
    pub entries: usize,
    /// Entries of the equivalent dense table, where one is defined; zero otherwise.
    pub dense_entries: u128,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub problem: Problem,
    pub method: Method,
    pub optimum: Optimum,
    pub witness: Option<Matching>,
    pub stats: Stats,
}
