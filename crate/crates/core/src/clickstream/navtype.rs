use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// How a request was triggered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NavType {
    /// Click inside the details tab of a concept.
    DE,
    /// Click on a concept in the tree explorer.
    DC,
    /// Request without a referrer.
    DU,
    /// Expansion of a concept's children.
    EX,
    /// Arrival from an external site that is not a search engine.
    EL,
    /// Arrival from an external search engine.
    ES,
    /// Final click of a local search.
    LS,
}

impl NavType {
    pub const ALL: [NavType; 7] = [
        NavType::DE,
        NavType::DC,
        NavType::DU,
        NavType::EX,
        NavType::EL,
        NavType::ES,
        NavType::LS,
    ];

    pub fn code(self) -> &'static str {
        match self {
            NavType::DE => "DE",
            NavType::DC => "DC",
            NavType::DU => "DU",
            NavType::EX => "EX",
            NavType::EL => "EL",
            NavType::ES => "ES",
            NavType::LS => "LS",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for NavType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for NavType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        NavType::ALL
            .into_iter()
            .find(|t| t.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown navigation type {s:?}")))
    }
}

/// A concrete navigation type or the aggregate of all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NavSelector {
    All,
    Only(NavType),
}

impl NavSelector {
    /// `ALL` followed by the seven concrete types.
    pub const EVERY: [NavSelector; 8] = [
        NavSelector::All,
        NavSelector::Only(NavType::DE),
        NavSelector::Only(NavType::DC),
        NavSelector::Only(NavType::DU),
        NavSelector::Only(NavType::EX),
        NavSelector::Only(NavType::EL),
        NavSelector::Only(NavType::ES),
        NavSelector::Only(NavType::LS),
    ];

    #[inline]
    pub fn matches(self, t: NavType) -> bool {
        match self {
            NavSelector::All => true,
            NavSelector::Only(x) => x == t,
        }
    }
}

impl fmt::Display for NavSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NavSelector::All => f.write_str("ALL"),
            NavSelector::Only(t) => t.fmt(f),
        }
    }
}

impl FromStr for NavSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.trim().eq_ignore_ascii_case("ALL") {
            Ok(NavSelector::All)
        } else {
            s.parse().map(NavSelector::Only)
        }
    }
}
