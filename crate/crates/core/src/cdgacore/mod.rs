//! Commutative dg algebras over `G`: free presentations, bounded levelwise
//! expansions, axiom checks, cohomology and connectivity.

mod cohom;
mod free;
mod levelwise;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::repsemi::RepError;

pub use cohom::{
    cohomology, connectivity, indecomposables, CdgaMorphism, CohomologyGroup, ConnectivityReport,
    IndecomposableSpace,
};
pub use free::{poly_add, Atom, FreeAlgebra, FreeCdgaPresentation, Generator, Monomial, Poly};
pub use levelwise::{
    check_cdga, elem_add, elem_scaled, expand_free, BasisRef, CdgaReport, Component, Elem,
    LevelwiseCdga, Violation, ViolationKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CdgaError {
    #[error("invalid generator `{0}`: cohomological degree must be at least 1")]
    InvalidGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("bidegree {0} is outside the window")]
    OutOfWindow(Bidegree),
    #[error("algebra is not connected on the window")]
    NotConnected,
    #[error("algebra is not Adams connected on the window")]
    NotAdamsConnected,
    #[error("algebra is not cohomologically connected on the window")]
    NotCohConnected,
    #[error("not a cdga map: {0}")]
    NotCdgaMap(String),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// Cohomological degree `n` and Adams degree `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub n: i64,
    pub r: i64,
}

impl Bidegree {
    pub const fn new(n: i64, r: i64) -> Self {
        Bidegree { n, r }
    }

    pub fn zero() -> Self {
        Bidegree { n: 0, r: 0 }
    }

    pub fn shift(self, dn: i64, dr: i64) -> Self {
        Bidegree {
            n: self.n + dn,
            r: self.r + dr,
        }
    }
}

impl std::ops::Add for Bidegree {
    type Output = Bidegree;
    fn add(self, o: Bidegree) -> Bidegree {
        Bidegree {
            n: self.n + o.n,
            r: self.r + o.r,
        }
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.r)
    }
}

/// Inclusive bounds on cohomological and Adams degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub n_min: i64,
    pub n_max: i64,
    pub r_min: i64,
    pub r_max: i64,
}

impl Window {
    pub const fn new(n_min: i64, n_max: i64, r_min: i64, r_max: i64) -> Self {
        Window {
            n_min,
            n_max,
            r_min,
            r_max,
        }
    }

    pub fn contains(&self, bd: Bidegree) -> bool {
        (self.n_min..=self.n_max).contains(&bd.n) && (self.r_min..=self.r_max).contains(&bd.r)
    }

    pub fn bidegrees(&self) -> impl Iterator<Item = Bidegree> + '_ {
        (self.n_min..=self.n_max)
            .flat_map(move |n| (self.r_min..=self.r_max).map(move |r| Bidegree { n, r }))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{},{}:{}",
            self.n_min, self.n_max, self.r_min, self.r_max
        )
    }
}

impl FromStr for Window {
    type Err = String;
    /// `N0:N1,R0:R1`.
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected window `N0:N1,R0:R1`, got `{s}`");
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let range = |t: &str| -> Result<(i64, i64), String> {
            let (x, y) = t.trim().split_once(':').ok_or_else(bad)?;
            let x = x.trim().parse().map_err(|_| bad())?;
            let y = y.trim().parse().map_err(|_| bad())?;
            if x > y {
                return Err(bad());
            }
            Ok((x, y))
        };
        let (n_min, n_max) = range(a)?;
        let (r_min, r_max) = range(b)?;
        Ok(Window {
            n_min,
            n_max,
            r_min,
            r_max,
        })
    }
}
