//! Sparse multivariate integer polynomials, used for the chamber polynomials
//! of the list chromatic function.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MPoly {
    names: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MPoly {
    pub fn zero(names: &[String]) -> Self {
        Self { names: names.to_vec(), terms: BTreeMap::new() }
    }

    pub fn constant(names: &[String], c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(names);
        p.add_term(vec![0; names.len()], c.into());
        p
    }

    pub fn var(names: &[String], i: usize) -> Self {
        let mut exps = vec![0; names.len()];
        exps[i] = 1;
        let mut p = Self::zero(names);
        p.add_term(exps, BigInt::one());
        p
    }

    /// `x_i + c`.
    pub fn linear(names: &[String], i: usize, c: i64) -> Self {
        Self::var(names, i).add(&Self::constant(names, c))
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let mut out = Self::zero(&self.names);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.names);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[i64]) -> BigInt {
        assert_eq!(x.len(), self.nvars(), "wrong number of arguments");
        let mut total = BigInt::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                term *= num_traits::pow(BigInt::from(*xi), k as usize);
            }
            total += term;
        }
        total
    }

    /// Terms as (exponents, coefficient), highest total degree first.
    pub fn terms(&self) -> Vec<(Vec<u32>, BigInt)> {
        let mut out: Vec<_> = self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        out.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in terms.iter().enumerate() {
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { self.names[j].clone() } else { format!("{}^{k}", self.names[j]) })
                .collect();
            let mag = c.abs();
            let body = if factors.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                factors.join("*")
            } else {
                format!("{mag}*{}", factors.join("*"))
            };
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["a".into(), "b".into()]
    }

    #[test]
    fn arithmetic_and_display() {
        let n = names();
        let p = MPoly::linear(&n, 0, 1).mul(&MPoly::linear(&n, 1, 1));
        assert_eq!(p.to_string(), "a*b + a + b + 1");
        assert_eq!(p.eval(&[2, 3]), BigInt::from(12));
        let q = p.sub(&MPoly::linear(&n, 0, 0));
        assert_eq!(q.to_string(), "a*b + b + 1");
        assert_eq!(q.degree_in(0), 1);
        assert_eq!(p.sub(&p), MPoly::zero(&n));
        assert_eq!(MPoly::var(&n, 0).mul(&MPoly::var(&n, 0)).scale(&BigInt::from(-3)).to_string(), "-3*a^2");
    }
}
