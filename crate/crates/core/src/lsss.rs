//! Monotone access policies compiled to linear secret-sharing matrices.
//!
//! Policies are written with identifiers, `AND`, `OR` and parentheses;
//! `AND` binds tighter than `OR`. Compilation follows the Lewko-Waters
//! recursion: an OR gate hands its vector to both children, an AND gate
//! appends one column, giving the left child `v‖1` and the right child
//! `0…0‖−1`. Row x of the matrix belongs to leaf x in left-to-right order.
//!
//! ```
//! use fogsec::lsss::{compile, Policy};
//!
//! let s = compile(&"A AND B".parse::<Policy>().unwrap());
//! assert_eq!(s.matrix, vec![vec![1, 1], vec![0, -1]]);
//! assert_eq!(s.rho, vec!["A", "B"]);
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairing::{Scalar, ScalarField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LsssError {
    #[error("policy is empty")]
    Empty,
    #[error("negation makes a policy non-monotone (at offset {0})")]
    NonMonotone(usize),
    #[error("unexpected {found} at offset {offset}")]
    Syntax { found: String, offset: usize },
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Policy {
    Leaf(String),
    And(Box<Policy>, Box<Policy>),
    Or(Box<Policy>, Box<Policy>),
}

impl Policy {
    pub fn leaf(name: &str) -> Policy {
        Policy::Leaf(name.to_string())
    }

    pub fn and(a: Policy, b: Policy) -> Policy {
        Policy::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Policy, b: Policy) -> Policy {
        Policy::Or(Box::new(a), Box::new(b))
    }

    /// Leaf attribute names, left to right, repeats included.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Policy::Leaf(a) => out.push(a),
            Policy::And(l, r) | Policy::Or(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    pub fn evaluate<S: AsRef<str> + Ord>(&self, attrs: &BTreeSet<S>) -> bool {
        match self {
            Policy::Leaf(a) => attrs.iter().any(|x| x.as_ref() == a),
            Policy::And(l, r) => l.evaluate(attrs) && r.evaluate(attrs),
            Policy::Or(l, r) => l.evaluate(attrs) || r.evaluate(attrs),
        }
    }

    /// A random policy with exactly `leaves` leaves over `pool`.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R, leaves: usize, pool: &[&str]) -> Policy {
        assert!(leaves >= 1 && !pool.is_empty());
        if leaves == 1 {
            return Policy::leaf(pool.choose(rng).expect("non-empty pool"));
        }
        let left = rng.gen_range(1..leaves);
        let l = Policy::random(rng, left, pool);
        let r = Policy::random(rng, leaves - left, pool);
        if rng.gen_bool(0.5) {
            Policy::and(l, r)
        } else {
            Policy::or(l, r)
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent_and: bool) -> fmt::Result {
        match self {
            Policy::Leaf(a) => f.write_str(a),
            Policy::And(l, r) => {
                l.fmt_prec(f, true)?;
                f.write_str(" AND ")?;
                r.fmt_prec(f, true)
            }
            Policy::Or(l, r) => {
                if parent_and {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, false)?;
                f.write_str(" OR ")?;
                r.fmt_prec(f, false)?;
                if parent_and {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    And,
    Or,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, LsssError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' || c == ')' {
            chars.next();
            out.push((if c == '(' { Token::Open } else { Token::Close }, i));
        } else if c == '!' {
            return Err(LsssError::NonMonotone(i));
        } else if c.is_alphanumeric() || "_-.:@".contains(c) {
            let mut word = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_alphanumeric() || "_-.:@".contains(c) {
                    word.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            let tok = match word.to_ascii_uppercase().as_str() {
                "AND" => Token::And,
                "OR" => Token::Or,
                "NOT" => return Err(LsssError::NonMonotone(i)),
                _ => Token::Ident(word),
            };
            out.push((tok, i));
        } else {
            return Err(LsssError::Syntax {
                found: format!("`{c}`"),
                offset: i,
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn unexpected(&self) -> LsssError {
        match self.tokens.get(self.pos) {
            Some((t, offset)) => LsssError::Syntax {
                found: format!("{t:?}"),
                offset: *offset,
            },
            None => LsssError::Syntax {
                found: "end of input".into(),
                offset: self.end,
            },
        }
    }

    fn or_expr(&mut self) -> Result<Policy, LsssError> {
        let mut acc = self.and_expr()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            acc = Policy::or(acc, self.and_expr()?);
        }
        Ok(acc)
    }

    fn and_expr(&mut self) -> Result<Policy, LsssError> {
        let mut acc = self.atom()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            acc = Policy::and(acc, self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Policy, LsssError> {
        match self.peek().cloned() {
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(Policy::Leaf(name))
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.or_expr()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(self.unexpected());
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.unexpected()),
        }
    }
}

impl FromStr for Policy {
    type Err = LsssError;

    fn from_str(text: &str) -> Result<Policy, LsssError> {
        let tokens = tokenize(text)?;
        if tokens.is_empty() {
            return Err(LsssError::Empty);
        }
        let mut p = Parser {
            tokens,
            pos: 0,
            end: text.len(),
        };
        let policy = p.or_expr()?;
        if p.pos != p.tokens.len() {
            return Err(p.unexpected());
        }
        Ok(policy)
    }
}

/// An l×m share-generating matrix with its row labelling.
///
/// Lewko-Waters entries are always 0, 1 or −1, so they are stored as small
/// integers and lifted into Z_q on use.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AccessStructure {
    pub policy: String,
    pub matrix: Vec<Vec<i64>>,
    pub rho: Vec<String>,
}

/// Row index → coefficient c_x, with Σ c_x·A_x = (1, 0, …, 0).
pub type ReconCoefficients = BTreeMap<usize, Scalar>;

pub fn compile(policy: &Policy) -> AccessStructure {
    let mut rows: Vec<(Vec<i64>, String)> = Vec::new();
    let mut width = 1;
    lw(policy, vec![1], &mut width, &mut rows);
    let matrix = rows
        .iter()
        .map(|(v, _)| {
            let mut v = v.clone();
            v.resize(width, 0);
            v
        })
        .collect();
    AccessStructure {
        policy: policy.to_string(),
        matrix,
        rho: rows.into_iter().map(|(_, a)| a).collect(),
    }
}

fn lw(node: &Policy, v: Vec<i64>, width: &mut usize, rows: &mut Vec<(Vec<i64>, String)>) {
    match node {
        Policy::Leaf(a) => rows.push((v, a.clone())),
        Policy::Or(l, r) => {
            lw(l, v.clone(), width, rows);
            lw(r, v, width, rows);
        }
        Policy::And(l, r) => {
            let mut left = v;
            left.resize(*width, 0);
            left.push(1);
            let mut right = vec![0; *width];
            right.push(-1);
            *width += 1;
            lw(l, left, width, rows);
            lw(r, right, width, rows);
        }
    }
}

impl AccessStructure {
    /// Number of rows, l.
    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    /// Number of columns, m.
    pub fn cols(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn row(&self, field: &ScalarField, x: usize) -> Vec<Scalar> {
        self.matrix[x].iter().map(|e| field.from_i64(*e)).collect()
    }

    /// Canonical JSON of (A, ρ) for fixtures.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<AccessStructure> {
        serde_json::from_str(text)
    }

    /// Reconstruction coefficients over the rows whose attribute is in
    /// `attrs`, or `None` when (1, 0, …, 0) is outside their span.
    ///
    /// Gaussian elimination on the transposed system, taking the lowest
    /// eligible row index as each pivot; free rows get coefficient zero and
    /// are omitted.
    pub fn satisfy<S: AsRef<str>>(
        &self,
        field: &ScalarField,
        attrs: &[S],
    ) -> Option<ReconCoefficients> {
        let eligible: Vec<usize> = (0..self.rows())
            .filter(|x| attrs.iter().any(|a| a.as_ref() == self.rho[*x]))
            .collect();
        let m = self.cols();
        let k = eligible.len();
        // augmented m × (k + 1) system: column j is row eligible[j]
        let mut sys: Vec<Vec<Scalar>> = (0..m)
            .map(|i| {
                let mut line: Vec<Scalar> = eligible
                    .iter()
                    .map(|x| field.from_i64(self.matrix[*x][i]))
                    .collect();
                line.push(if i == 0 { field.one() } else { field.zero() });
                line
            })
            .collect();

        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut next_line = 0;
        for col in 0..k {
            let Some(p) = (next_line..m).find(|i| !sys[*i][col].is_zero()) else {
                continue;
            };
            sys.swap(next_line, p);
            let inv = field.inv(&sys[next_line][col]).expect("non-zero pivot");
            for e in sys[next_line].iter_mut() {
                *e = field.mul(e, &inv);
            }
            for i in 0..m {
                if i != next_line && !sys[i][col].is_zero() {
                    let factor = sys[i][col].clone();
                    for j in 0..=k {
                        let t = field.mul(&factor, &sys[next_line][j]);
                        sys[i][j] = field.sub(&sys[i][j], &t);
                    }
                }
            }
            pivots.push((next_line, col));
            next_line += 1;
            if next_line == m {
                break;
            }
        }
        if sys[next_line..].iter().any(|line| !line[k].is_zero()) {
            return None;
        }
        Some(
            pivots
                .into_iter()
                .filter(|(line, _)| !sys[*line][k].is_zero())
                .map(|(line, col)| (eligible[col], sys[line][k].clone()))
                .collect(),
        )
    }

    /// λ_x = A_x·v for v = (s, v2, …, vm), or v1 = 0 when `zero_target`.
    pub fn share<R: RngCore + ?Sized>(
        &self,
        field: &ScalarField,
        rng: &mut R,
        s: &Scalar,
        zero_target: bool,
    ) -> Vec<Scalar> {
        let mut v = vec![if zero_target { field.zero() } else { s.clone() }];
        v.extend((1..self.cols()).map(|_| field.random(rng)));
        self.share_vector(field, &v)
    }

    /// A·v for an explicit share vector.
    pub fn share_vector(&self, field: &ScalarField, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols(), "share vector width");
        (0..self.rows())
            .map(|x| {
                self.row(field, x)
                    .iter()
                    .zip(v)
                    .fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)))
            })
            .collect()
    }
}

/// Σ c_x·λ_x.
pub fn reconstruct(field: &ScalarField, coeffs: &ReconCoefficients, shares: &[Scalar]) -> Scalar {
    coeffs.iter().fold(field.zero(), |acc, (x, c)| {
        field.add(&acc, &field.mul(c, &shares[*x]))
    })
}
