//! Truncated Laurent series in one variable.
//!
//! A [`Laurent`] stores coefficients of `s^val, s^(val+1), ..., s^(top-1)`;
//! orders at or above `top` are unknown. Arithmetic propagates the
//! truncation so that every stored coefficient is exact given the inputs.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    pub val: i32,
    pub c: Vec<f64>,
}

impl Laurent {
    pub fn new(val: i32, c: Vec<f64>) -> Self {
        Laurent { val, c }
    }

    /// Series in `s^2` multiplied by `s^shift`: `Σ_m coefs[m] s^(2m + shift)`,
    /// known up to (excluding) order `top`.
    pub fn even(coefs: &[f64], shift: i32, top: i32) -> Self {
        let n = (top - shift).max(0) as usize;
        let mut c = vec![0.0; n];
        for (m, &x) in coefs.iter().enumerate() {
            if 2 * m < n {
                c[2 * m] = x;
            }
        }
        Laurent { val: shift, c }
    }

    pub fn top(&self) -> i32 {
        self.val + self.c.len() as i32
    }

    pub fn truncate(&self, top: i32) -> Self {
        let n = (top - self.val).max(0) as usize;
        let mut c = vec![0.0; n];
        let m = n.min(self.c.len());
        c[..m].copy_from_slice(&self.c[..m]);
        Laurent { val: self.val, c }
    }

    /// Coefficient of `s^order`; `NaN` if beyond the truncation.
    pub fn coeff(&self, order: i32) -> f64 {
        if order < self.val {
            0.0
        } else if order < self.top() {
            self.c[(order - self.val) as usize]
        } else {
            f64::NAN
        }
    }

    pub fn add_scalar(&self, x: f64) -> Self {
        assert!(self.val <= 0, "scalar added to a series of positive valuation");
        let mut out = self.clone();
        let k = (-self.val) as usize;
        if k < out.c.len() {
            out.c[k] += x;
        }
        out
    }

    pub fn scale(&self, x: f64) -> Self {
        Laurent { val: self.val, c: self.c.iter().map(|v| v * x).collect() }
    }

    /// Multiplicative inverse; the leading coefficient must be nonzero.
    pub fn inv(&self) -> Self {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut c = vec![0.0; n];
        c[0] = 1.0 / a0;
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| self.c[j] * c[k - j]).sum();
            c[k] = -s / a0;
        }
        Laurent { val: -self.val, c }
    }

    pub fn div(&self, o: &Laurent) -> Self {
        self * &o.inv()
    }

    pub fn deriv(&self) -> Self {
        let c = self.c.iter().enumerate().map(|(k, x)| (self.val + k as i32) as f64 * x).collect();
        Laurent { val: self.val - 1, c }
    }

    /// Square root of a series with even valuation and positive leading coefficient.
    pub fn sqrt(&self) -> Self {
        assert!(self.val % 2 == 0, "odd valuation has no Laurent square root");
        let n = self.c.len();
        let mut c = vec![0.0; n];
        c[0] = self.c[0].sqrt();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| c[j] * c[k - j]).sum();
            c[k] = (self.c[k] - s) / (2.0 * c[0]);
        }
        Laurent { val: self.val / 2, c }
    }

    /// Value and first two derivatives of the polynomial obtained by keeping
    /// orders `<= max_order`.
    pub fn eval3(&self, s: f64, max_order: i32) -> (f64, f64, f64) {
        let (mut v, mut d, mut dd) = (0.0, 0.0, 0.0);
        for (k, &x) in self.c.iter().enumerate() {
            let n = self.val + k as i32;
            if n > max_order {
                break;
            }
            let nf = n as f64;
            v += x * s.powi(n);
            d += nf * x * s.powi(n - 1);
            dd += nf * (nf - 1.0) * x * s.powi(n - 2);
        }
        (v, d, dd)
    }
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, o: &Laurent) -> Laurent {
        let v = self.val.min(o.val);
        let t = self.top().min(o.top());
        let mut c = vec![0.0; (t - v).max(0) as usize];
        for x in [self, o] {
            for (k, &cc) in x.c.iter().enumerate() {
                let ord = x.val + k as i32;
                if ord < t {
                    c[(ord - v) as usize] += cc;
                }
            }
        }
        Laurent { val: v, c }
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        self.scale(-1.0)
    }
}

impl Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, o: &Laurent) -> Laurent {
        self + &(-o)
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, o: &Laurent) -> Laurent {
        let n = self.c.len().min(o.c.len());
        let mut c = vec![0.0; n];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = (0..=i).map(|j| self.c[j] * o.c[i - j]).sum();
        }
        Laurent { val: self.val + o.val, c }
    }
}
