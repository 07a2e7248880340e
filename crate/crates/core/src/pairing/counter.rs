use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The six operation categories of the cost model.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum OpCategory {
    Pairing,
    Exponentiation,
    Multiplication,
    Hash,
    Division,
    Subtraction,
}

impl OpCategory {
    pub const ALL: [OpCategory; 6] = [
        OpCategory::Pairing,
        OpCategory::Exponentiation,
        OpCategory::Multiplication,
        OpCategory::Hash,
        OpCategory::Division,
        OpCategory::Subtraction,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            OpCategory::Pairing => "T_P",
            OpCategory::Exponentiation => "T_E",
            OpCategory::Multiplication => "T_M",
            OpCategory::Hash => "T_H",
            OpCategory::Division => "T_D",
            OpCategory::Subtraction => "T_S",
        }
    }

    pub fn from_symbol(s: &str) -> Option<OpCategory> {
        OpCategory::ALL.into_iter().find(|c| c.symbol() == s)
    }
}

/// Tally of group-level operations performed within one session.
///
/// Counting convention: group products in G1 or GT are multiplications,
/// GT quotients and scalar inversions are divisions, scalar subtractions are
/// subtractions. Scalar additions and multiplications are free. A k-term
/// pairing product counts k pairings and no multiplications.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct OpCounter {
    pub pairings: u64,
    pub exponentiations: u64,
    pub multiplications: u64,
    pub hashes: u64,
    pub divisions: u64,
    pub subtractions: u64,
}

impl OpCounter {
    pub fn get(&self, cat: OpCategory) -> u64 {
        match cat {
            OpCategory::Pairing => self.pairings,
            OpCategory::Exponentiation => self.exponentiations,
            OpCategory::Multiplication => self.multiplications,
            OpCategory::Hash => self.hashes,
            OpCategory::Division => self.divisions,
            OpCategory::Subtraction => self.subtractions,
        }
    }

    pub fn with(mut self, cat: OpCategory, n: u64) -> OpCounter {
        *self.slot(cat) = n;
        self
    }

    fn slot(&mut self, cat: OpCategory) -> &mut u64 {
        match cat {
            OpCategory::Pairing => &mut self.pairings,
            OpCategory::Exponentiation => &mut self.exponentiations,
            OpCategory::Multiplication => &mut self.multiplications,
            OpCategory::Hash => &mut self.hashes,
            OpCategory::Division => &mut self.divisions,
            OpCategory::Subtraction => &mut self.subtractions,
        }
    }

    pub(crate) fn bump(&mut self, cat: OpCategory, n: u64) {
        *self.slot(cat) += n;
    }

    /// Explicit aggregation across sessions.
    pub fn merge(&mut self, other: &OpCounter) {
        for cat in OpCategory::ALL {
            self.bump(cat, other.get(cat));
        }
    }

    /// Counts accumulated since `earlier`, a snapshot of the same session.
    pub fn since(&self, earlier: &OpCounter) -> OpCounter {
        let mut out = OpCounter::default();
        for cat in OpCategory::ALL {
            *out.slot(cat) = self.get(cat) - earlier.get(cat);
        }
        out
    }

    pub fn total(&self) -> u64 {
        OpCategory::ALL.iter().map(|c| self.get(*c)).sum()
    }
}

impl Add for OpCounter {
    type Output = OpCounter;

    fn add(mut self, rhs: OpCounter) -> OpCounter {
        self.merge(&rhs);
        self
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: OpCounter) {
        self.merge(&rhs);
    }
}

impl fmt::Display for OpCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = OpCategory::ALL
            .iter()
            .filter(|c| self.get(**c) > 0)
            .map(|c| match self.get(*c) {
                1 => c.symbol().to_string(),
                n => format!("{n}{}", c.symbol()),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

/// Parses the display form, e.g. `T_P+4T_E` or `0`. Repeated symbols add up.
impl FromStr for OpCounter {
    type Err = String;

    fn from_str(s: &str) -> Result<OpCounter, String> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut out = OpCounter::default();
        if compact == "0" {
            return Ok(out);
        }
        for term in compact.split('+') {
            let digits = term.chars().take_while(char::is_ascii_digit).count();
            let n = match digits {
                0 => 1,
                _ => term[..digits].parse().map_err(|_| format!("bad count in `{term}`"))?,
            };
            let cat = OpCategory::from_symbol(&term[digits..])
                .ok_or_else(|| format!("unknown operation `{term}`"))?;
            out.bump(cat, n);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_merge() {
        let a = OpCounter::default()
            .with(OpCategory::Exponentiation, 4)
            .with(OpCategory::Pairing, 1);
        assert_eq!(a.to_string(), "T_P+4T_E");
        let b = a + a;
        assert_eq!(b.pairings, 2);
        assert_eq!(b.since(&a), a);
        assert_eq!(OpCounter::default().to_string(), "0");
        assert_eq!("T_P+4T_E".parse::<OpCounter>().unwrap(), a);
        assert_eq!("T_E + T_P + 3T_E".parse::<OpCounter>().unwrap(), a);
        assert_eq!("0".parse::<OpCounter>().unwrap(), OpCounter::default());
        assert!("T_Q".parse::<OpCounter>().is_err());
        assert!("".parse::<OpCounter>().is_err());
    }
}
