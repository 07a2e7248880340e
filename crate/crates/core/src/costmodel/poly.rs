use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{CostError, Params};

/// Integer polynomial over named symbols, kept in written order.
///
/// Accepted forms: `n`, `n+1`, `2n`, `96n`, `n*m+96`, `1+4x`, `n-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    terms: Vec<(i64, Vec<String>)>,
}

impl Poly {
    pub fn eval(&self, p: &Params) -> Result<i64, CostError> {
        self.terms.iter().try_fold(0i64, |acc, (coeff, factors)| {
            let prod = factors.iter().try_fold(*coeff, |v, sym| {
                p.get(sym)
                    .map(|x| v * *x as i64)
                    .ok_or_else(|| CostError::MissingParam(sym.clone()))
            })?;
            Ok(acc + prod)
        })
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        self.terms.iter().flat_map(|(_, f)| f.iter().cloned()).collect()
    }
}

fn parse_term(text: &str, sign: i64) -> Result<(i64, Vec<String>), CostError> {
    let bad = || CostError::BadPoly(text.to_string());
    let digits = text.chars().take_while(char::is_ascii_digit).count();
    let coeff = if digits == 0 {
        1
    } else {
        text[..digits].parse::<i64>().map_err(|_| bad())?
    };
    let rest = text[digits..].trim_start_matches('*');
    let factors = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split('*')
            .map(|f| {
                if !f.is_empty() && f.chars().all(|c| c.is_ascii_lowercase()) {
                    Ok(f.to_string())
                } else {
                    Err(bad())
                }
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    if digits == 0 && factors.is_empty() {
        return Err(bad());
    }
    Ok((sign * coeff, factors))
}

impl FromStr for Poly {
    type Err = CostError;

    fn from_str(s: &str) -> Result<Poly, CostError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(CostError::BadPoly(s.to_string()));
        }
        let mut terms = Vec::new();
        let mut sign = 1;
        let mut start = 0;
        for (i, c) in compact.char_indices() {
            if c == '+' || c == '-' {
                if i > start {
                    terms.push(parse_term(&compact[start..i], sign)?);
                } else if i > 0 {
                    return Err(CostError::BadPoly(s.to_string()));
                }
                sign = if c == '-' { -1 } else { 1 };
                start = i + 1;
            }
        }
        terms.push(parse_term(&compact[start..], sign)?);
        Ok(Poly { terms })
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (coeff, factors)) in self.terms.iter().enumerate() {
            if *coeff < 0 {
                f.write_str("-")?;
            } else if i > 0 {
                f.write_str("+")?;
            }
            let mag = coeff.unsigned_abs();
            if factors.is_empty() || mag != 1 {
                write!(f, "{mag}")?;
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::params;

    #[test]
    fn parse_eval_display() {
        let p = params(&[("n", 7), ("m", 100), ("x", 3)]);
        for (text, value) in [
            ("n", 7),
            ("n+1", 8),
            ("n-1", 6),
            ("2n", 14),
            ("n*m+96n", 1372),
            ("n*m + 96", 796),
            ("1+4x", 13),
            ("640", 640),
        ] {
            let poly: Poly = text.parse().unwrap();
            assert_eq!(poly.eval(&p).unwrap(), value, "{text}");
            assert_eq!(poly.to_string().parse::<Poly>().unwrap(), poly);
        }
        for bad in ["", "+", "n+", "2N", "n**m", "3.5"] {
            assert!(bad.parse::<Poly>().is_err(), "{bad}");
        }
    }
}
