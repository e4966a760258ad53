use std::ops::{AddAssign, Mul, Neg};

/// Kahan–Babuška (Neumaier) compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// A signed real stored as `sign * exp(ln_abs)`.
///
/// Coefficients of the outage series routinely leave the f64 exponent range
/// (e.g. `Γ(101)/r^101` with `r ~ 1e-4`) while their products stay O(1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub sign: f64,
    pub ln_abs: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogValue = LogValue {
        sign: 1.0,
        ln_abs: 0.0,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: x.signum(),
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn from_ln(ln_abs: f64) -> Self {
        Self { sign: 1.0, ln_abs }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0 || self.ln_abs == f64::NEG_INFINITY
    }

    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    /// Signed log-sum-exp.
    pub fn add(self, other: LogValue) -> LogValue {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let d = small.ln_abs - big.ln_abs;
        let ln_m = if big.sign == small.sign {
            d.exp().ln_1p()
        } else {
            let m = -d.exp_m1();
            if m <= 0.0 {
                return Self::ZERO;
            }
            m.ln()
        };
        LogValue {
            sign: big.sign,
            ln_abs: big.ln_abs + ln_m,
        }
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogValue {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs + rhs.ln_abs,
        }
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue {
            sign: -self.sign,
            ln_abs: self.ln_abs,
        }
    }
}
