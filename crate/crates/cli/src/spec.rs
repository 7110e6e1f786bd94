//! On-disk formats: equation specs and candidate series.

use std::str::FromStr;

use fuchsian_core::equation::{FuchsianEquation, InvalidEquation, RawTerm};
use fuchsian_core::num::Coeff;
use fuchsian_core::series::{MultiIndex, SeriesTX};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Number;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad coefficient: {0}")]
    Coefficient(String),
    #[error("bad shape: {0}")]
    Shape(String),
}

/// `[num_re, den_re, num_im, den_im]`, arbitrary-size integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalPair(pub [Number; 4]);

fn big(n: &Number) -> Result<BigInt, InputError> {
    BigInt::from_str(&n.to_string()).map_err(|_| InputError::Coefficient(format!("{n} is not an integer")))
}

fn number(v: &BigInt) -> Number {
    Number::from_str(&v.to_string()).expect("integers are valid JSON numbers")
}

impl RationalPair {
    pub fn to_coeff(&self) -> Result<Coeff, InputError> {
        let [a, b, c, d] = &self.0;
        let (a, b, c, d) = (big(a)?, big(b)?, big(c)?, big(d)?);
        if b == BigInt::from(0) || d == BigInt::from(0) {
            return Err(InputError::Coefficient("zero denominator".into()));
        }
        Ok(Complex::new(BigRational::new(a, b), BigRational::new(c, d)))
    }

    pub fn from_coeff(c: &Coeff) -> Self {
        RationalPair([number(c.re.numer()), number(c.re.denom()), number(c.im.numer()), number(c.im.denom())])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZPow {
    pub i: u32,
    pub alpha: Vec<u32>,
    pub pow: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coeff: RationalPair,
    pub t_pow: u32,
    pub x_pows: Vec<u32>,
    #[serde(default)]
    pub z_pows: Vec<ZPow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    #[serde(rename = "K_t")]
    pub k_t: u32,
    #[serde(rename = "K_x")]
    pub k_x: u32,
    #[serde(rename = "K_z", default)]
    pub k_z: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    pub m: u32,
    pub n: usize,
    pub terms: Vec<Term>,
    pub truncation: Truncation,
}

impl EquationSpec {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn raw_terms(&self) -> Result<Vec<RawTerm>, InputError> {
        self.terms
            .iter()
            .map(|t| {
                Ok(RawTerm {
                    coeff: t.coeff.to_coeff()?,
                    t_pow: t.t_pow,
                    x_pows: t.x_pows.clone(),
                    z_pows: t.z_pows.iter().map(|z| (z.i, z.alpha.clone(), z.pow)).collect(),
                })
            })
            .collect()
    }

    /// Input errors are `Err`; assumption violations come back inside `Ok`.
    pub fn to_equation(&self) -> Result<Result<FuchsianEquation, InvalidEquation>, InputError> {
        let tr = self.truncation;
        let raw = self.raw_terms()?;
        Ok(FuchsianEquation::from_raw(self.m, self.n, (tr.k_t, tr.k_x, tr.k_z), &raw))
    }
}

/// A polynomial in `(t, x)`: candidates `w` and solution dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub n: usize,
    pub terms: Vec<Term>,
    pub truncation: Truncation,
}

impl SeriesSpec {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_series(&self) -> Result<SeriesTX, InputError> {
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.x_pows.len() != self.n {
                return Err(InputError::Shape(format!("x_pows has length {}, expected {}", t.x_pows.len(), self.n)));
            }
            if !t.z_pows.is_empty() {
                return Err(InputError::Shape("a series in (t, x) cannot carry z powers".into()));
            }
            terms.push(((t.t_pow, MultiIndex::new(t.x_pows.clone())), t.coeff.to_coeff()?));
        }
        Ok(SeriesTX::from_terms(self.n, self.truncation.k_t, self.truncation.k_x, terms))
    }

    pub fn from_series(s: &SeriesTX) -> Self {
        let (k_t, k_x) = s.caps();
        SeriesSpec {
            n: s.dim(),
            terms: s
                .terms()
                .map(|((k, a), c)| Term {
                    coeff: RationalPair::from_coeff(c),
                    t_pow: *k,
                    x_pows: a.as_slice().to_vec(),
                    z_pows: vec![],
                })
                .collect(),
            truncation: Truncation { k_t, k_x, k_z: 0 },
        }
    }
}

pub fn read_file(path: &str) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fuchsian_core::equation::examples::remark3;

    #[test]
    fn bundled_remark3_matches_builtin() {
        let spec = EquationSpec::parse(include_str!("../data/remark3.json")).unwrap();
        assert_eq!(spec.to_equation().unwrap().unwrap(), remark3((12, 24, 12)));
    }

    #[test]
    fn big_coefficients_round_trip() {
        let text = r#"{"n":1,"terms":[{"coeff":[123456789012345678901234567890,11,-1,3],"t_pow":1,"x_pows":[2]}],"truncation":{"K_t":4,"K_x":4}}"#;
        let s = SeriesSpec::parse(text).unwrap().to_series().unwrap();
        let back = SeriesSpec::from_series(&s);
        assert_eq!(back.to_series().unwrap(), s);
        assert_eq!(back.terms[0].coeff.0[0].to_string(), "123456789012345678901234567890");
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(EquationSpec::parse("{"), Err(InputError::Json(_))));
        let zero_den = r#"{"n":1,"terms":[{"coeff":[1,0,0,1],"t_pow":1,"x_pows":[2]}],"truncation":{"K_t":4,"K_x":4}}"#;
        assert!(matches!(SeriesSpec::parse(zero_den).unwrap().to_series(), Err(InputError::Coefficient(_))));
        let frac = r#"{"n":1,"terms":[{"coeff":[1.5,1,0,1],"t_pow":1,"x_pows":[2]}],"truncation":{"K_t":4,"K_x":4}}"#;
        assert!(matches!(SeriesSpec::parse(frac).unwrap().to_series(), Err(InputError::Coefficient(_))));
    }
}
