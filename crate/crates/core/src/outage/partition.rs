//! Multinomial expansion of (Σ_m t_m)^n by explicit enumeration of the
//! compositions {s_m} with Σ s_m = n.
//!
//! The engine raises polynomials to powers by repeated squaring with
//! like-term merging, which visits far fewer terms; this enumeration is
//! kept as the reference expansion it is checked against.

use crate::error::{OstnError, Result};
use crate::specfun::{ln_gamma, LogValue};

use super::expoly::{Atom, ExpPoly};

/// Default bound on the number of enumerated tuples.
pub const DEFAULT_PARTITION_CAP: u128 = 5_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSet {
    n: usize,
    len: usize,
    tuples: Vec<Vec<u32>>,
}

/// C(n + len - 1, len - 1), saturating.
pub fn composition_count(n: usize, len: usize) -> u128 {
    if len == 0 {
        return u128::from(n == 0);
    }
    let k = (len - 1) as u128;
    let mut c: u128 = 1;
    for i in 1..=k {
        c = match c.checked_mul(n as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    c
}

impl PartitionSet {
    /// All tuples (s_0, ..., s_(len-1)) of nonnegative integers with sum n.
    pub fn new(n: usize, len: usize, cap: u128) -> Result<Self> {
        let needed = composition_count(n, len);
        if needed > cap {
            return Err(OstnError::Capacity { what: format!("compositions of {n} into {len} parts"), needed, cap });
        }
        let mut tuples = Vec::with_capacity(needed as usize);
        if len > 0 {
            let mut cur = vec![0u32; len];
            Self::fill(&mut tuples, &mut cur, 0, n as u32);
        }
        Ok(Self { n, len, tuples })
    }

    fn fill(out: &mut Vec<Vec<u32>>, cur: &mut [u32], pos: usize, left: u32) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.to_vec());
            return;
        }
        for s in 0..=left {
            cur[pos] = s;
            Self::fill(out, cur, pos + 1, left - s);
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> usize {
        self.len
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.tuples.iter().map(Vec::as_slice)
    }

    /// n!/Π s_m!, exact while it fits in u128.
    pub fn multinomial(tuple: &[u32]) -> Option<u128> {
        let mut total: u128 = 0;
        let mut w: u128 = 1;
        for &s in tuple {
            for j in 1..=s as u128 {
                total += 1;
                w = w.checked_mul(total)? / j;
            }
        }
        Some(w)
    }

    pub fn ln_multinomial(tuple: &[u32]) -> f64 {
        let n: u32 = tuple.iter().sum();
        ln_gamma(n as f64 + 1.0).unwrap_or(f64::NAN)
            - tuple.iter().map(|&s| ln_gamma(s as f64 + 1.0).unwrap_or(f64::NAN)).sum::<f64>()
    }

    /// Σ_m f(m) s_m, e.g. the total power Σ m s_m.
    pub fn weighted_sum(tuple: &[u32], f: impl Fn(usize) -> f64) -> f64 {
        tuple.iter().enumerate().map(|(m, &s)| f(m) * s as f64).sum()
    }

    /// (Σ_m terms[m])^n expanded term by term.
    pub fn expand(terms: &[Atom], n: usize, cap: u128) -> Result<ExpPoly> {
        let set = PartitionSet::new(n, terms.len(), cap)?;
        let mut out = ExpPoly::zero();
        for t in set.iter() {
            let mut coef = LogValue::from_ln(Self::ln_multinomial(t));
            let (mut pow, mut rate) = (0.0, 0.0);
            for (a, &s) in terms.iter().zip(t) {
                if s == 0 {
                    continue;
                }
                let lc = LogValue { sign: a.coef.sign.powi(s as i32), ln_abs: a.coef.ln_abs * s as f64 };
                coef = coef * lc;
                pow += a.pow * s as f64;
                rate += a.rate * s as f64;
            }
            out.push(Atom::new(coef, pow, rate));
        }
        Ok(out)
    }
}
