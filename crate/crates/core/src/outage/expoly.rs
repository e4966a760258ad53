//! Finite sums of exponential-polynomial terms `c · x^p · e^(-r x)`.
//!
//! Every conditional cdf the outage engine needs is built from such terms,
//! so products, powers and integrals stay closed and the final expectation
//! over the interference reduces to one kernel per `(p, r)` pair.

use std::collections::HashMap;

use crate::error::{domain, Result};
use crate::fading::is_integer;
use crate::specfun::{ln_gamma, LogValue, NeumaierSum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub coef: LogValue,
    pub pow: f64,
    pub rate: f64,
}

impl Atom {
    pub fn new(coef: LogValue, pow: f64, rate: f64) -> Self {
        Self { coef, pow, rate }
    }

    /// ln |c x^p e^(-r x)| for x > 0.
    fn ln_abs_at(&self, x: f64) -> f64 {
        self.coef.ln_abs + self.pow * x.ln() - self.rate * x
    }
}

type Key = (i64, i64);

fn key(pow: f64, rate: f64) -> Key {
    let rk = if rate == 0.0 { i64::MIN } else { (rate.ln() * 1e11).round() as i64 };
    ((pow * 1e9).round() as i64, rk)
}

/// How many terms the positive incomplete-gamma series may use.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SeriesControl {
    pub cap: usize,
    pub tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { cap: 1500, tol: 1e-15 }
    }
}

/// Largest series length met and whether any series hit the cap.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SeriesReport {
    pub max_terms: usize,
    pub capped: bool,
    pub worst_tail: f64,
}

impl SeriesReport {
    pub fn merge(&mut self, other: SeriesReport) {
        self.max_terms = self.max_terms.max(other.max_terms);
        self.capped |= other.capped;
        self.worst_tail = self.worst_tail.max(other.worst_tail);
    }
}

/// Number of terms of Σ_k z^k / (a+1)_k needed so the tail after the last
/// kept term is below `tol` times the partial sum, for every argument up to
/// `z`. Returns the count and the relative tail estimate at the cut.
pub fn series_length(a: f64, z: f64, ctl: SeriesControl) -> (usize, f64) {
    if z <= 0.0 {
        return (1, 0.0);
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    // rescale to avoid overflow when z is large
    for k in 1..=ctl.cap {
        let ratio = z / (a + k as f64);
        term *= ratio;
        sum += term;
        if sum > 1e280 {
            term /= sum;
            sum = 1.0;
        }
        let next = z / (a + k as f64 + 1.0);
        if next < 1.0 {
            let tail = term * next / (1.0 - next);
            if tail <= ctl.tol * sum {
                return (k + 1, tail / sum);
            }
        }
    }
    let next = z / (a + ctl.cap as f64 + 1.0);
    let tail = if next < 1.0 { term * next / (1.0 - next) / sum } else { f64::INFINITY };
    (ctl.cap, tail)
}

/// A sum of [`Atom`]s with like terms merged.
#[derive(Debug, Clone, Default)]
pub struct ExpPoly {
    atoms: Vec<Atom>,
    index: HashMap<Key, usize>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.push(Atom::new(LogValue::from_f64(c), 0.0, 0.0));
        p
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut p = Self::zero();
        for a in atoms {
            p.push(a);
        }
        p
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn push(&mut self, atom: Atom) {
        if atom.coef.is_zero() {
            return;
        }
        let k = key(atom.pow, atom.rate);
        match self.index.get(&k) {
            Some(&i) => self.atoms[i].coef = self.atoms[i].coef.add(atom.coef),
            None => {
                self.index.insert(k, self.atoms.len());
                self.atoms.push(atom);
            }
        }
    }

    /// self + scale * other
    pub fn add_scaled(&mut self, other: &ExpPoly, scale: LogValue) {
        for a in &other.atoms {
            self.push(Atom::new(a.coef * scale, a.pow, a.rate));
        }
    }

    pub fn plus(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        out.add_scaled(other, LogValue::ONE);
        out
    }

    /// 1 - self
    pub fn one_minus(&self) -> ExpPoly {
        let mut out = ExpPoly::one();
        out.add_scaled(self, LogValue::from_f64(-1.0));
        out
    }

    pub fn scaled(&self, scale: LogValue) -> ExpPoly {
        let mut out = ExpPoly::zero();
        out.add_scaled(self, scale);
        out
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for a in &self.atoms {
            for b in &other.atoms {
                out.push(Atom::new(a.coef * b.coef, a.pow + b.pow, a.rate + b.rate));
            }
        }
        out.compact();
        out
    }

    pub fn pow(&self, n: usize) -> ExpPoly {
        let mut result = ExpPoly::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Drops atoms that cancelled to zero.
    fn compact(&mut self) {
        if self.atoms.iter().all(|a| !a.coef.is_zero()) {
            return;
        }
        let atoms = std::mem::take(&mut self.atoms);
        self.index.clear();
        for a in atoms {
            self.push(a);
        }
    }

    /// Substitutes x = t·u, giving a polynomial in u.
    pub fn rescale(&self, t: f64) -> ExpPoly {
        let lt = t.ln();
        ExpPoly::from_atoms(self.atoms.iter().map(|a| {
            Atom::new(LogValue { sign: a.coef.sign, ln_abs: a.coef.ln_abs + a.pow * lt }, a.pow, a.rate * t)
        }))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut s = NeumaierSum::new();
        if x == 0.0 {
            for a in &self.atoms {
                if a.pow == 0.0 {
                    s.add(a.coef.to_f64());
                } else if a.pow < 0.0 {
                    return f64::INFINITY * a.coef.sign;
                }
            }
            return s.value();
        }
        for a in &self.atoms {
            s.add(a.coef.sign * a.ln_abs_at(x).exp());
        }
        s.value()
    }

    /// ∫₀^s self(y) dy as a polynomial in s, accurate for s ∈ [lo, hi].
    ///
    /// Each term uses the finite incomplete-gamma form when it cannot
    /// cancel (r·lo ≥ p+1, p integer) and the positive power series
    /// otherwise.
    pub fn integral(&self, lo: f64, hi: f64, ctl: SeriesControl) -> Result<(ExpPoly, SeriesReport)> {
        let mut out = ExpPoly::zero();
        let mut report = SeriesReport::default();
        for a in &self.atoms {
            let p = a.pow;
            if !(p > -1.0) {
                return domain(format!("term x^{p} is not integrable at 0"));
            }
            let r = a.rate;
            if r == 0.0 {
                out.push(Atom::new(a.coef * LogValue::from_f64(1.0 / (p + 1.0)), p + 1.0, 0.0));
                continue;
            }
            let lg = ln_gamma(p + 1.0)?;
            let lr = r.ln();
            if is_integer(p) && r * lo >= p + 1.0 {
                let n = p.round() as usize;
                // Γ(p+1)/r^(p+1) [1 - e^(-rs) Σ_v (rs)^v / v!]
                let front = LogValue { sign: a.coef.sign, ln_abs: a.coef.ln_abs + lg - (p + 1.0) * lr };
                out.push(Atom::new(front, 0.0, 0.0));
                for v in 0..=n {
                    let lv = v as f64 * lr - ln_gamma(v as f64 + 1.0)?;
                    out.push(Atom::new(-front * LogValue::from_ln(lv), v as f64, r));
                }
            } else {
                // Γ(p+1) s^(p+1) e^(-rs) Σ_k r^k s^k / Γ(p+k+2)
                let (terms, tail) = series_length(p + 1.0, r * hi, ctl);
                report.merge(SeriesReport { max_terms: terms, capped: terms >= ctl.cap, worst_tail: tail });
                for k in 0..terms {
                    let kf = k as f64;
                    let l = a.coef.ln_abs + lg + kf * lr - ln_gamma(p + kf + 2.0)?;
                    out.push(Atom::new(LogValue { sign: a.coef.sign, ln_abs: l }, p + 1.0 + kf, r));
                }
            }
        }
        out.compact();
        Ok((out, report))
    }
}
