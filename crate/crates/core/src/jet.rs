//! Truncated Taylor series in one complex variable.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub c: Vec<Complex64>,
}

impl Jet {
    pub fn zero(order: usize) -> Self {
        Self { c: vec![Complex64::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(x: Complex64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.c[0] = x;
        j
    }

    /// The identity h ↦ x₀ + h.
    pub fn variable(x0: Complex64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order >= 1 {
            j.c[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// First derivative at the expansion point.
    pub fn d1(&self) -> Complex64 {
        self.c.get(1).copied().unwrap_or_default()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for k in 1..=n {
            out.c[k - 1] = self.c[k] * k as f64;
        }
        // the top coefficient is unknown after differentiation; keep it zero
        out
    }

    pub fn recip(&self) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        out.c[0] = self.c[0].inv();
        for k in 1..=n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 1..=k {
                s += self.c[i] * out.c[k - i];
            }
            out.c[k] = -s * out.c[0];
        }
        out
    }

    /// sin and cos of a jet.
    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.order();
        let (s0, c0) = (self.c[0].sin(), self.c[0].cos());
        let mut s = Self::zero(n);
        let mut cc = Self::zero(n);
        s.c[0] = s0;
        cc.c[0] = c0;
        // s' = c·u', c' = −s·u'
        let du = self.derivative();
        for k in 1..=n {
            let mut a = Complex64::new(0.0, 0.0);
            let mut b = Complex64::new(0.0, 0.0);
            for i in 0..k {
                a += cc.c[i] * du.c[k - 1 - i];
                b -= s.c[i] * du.c[k - 1 - i];
            }
            s.c[k] = a / k as f64;
            cc.c[k] = b / k as f64;
        }
        (s, cc)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self { c: self.c[..=order.min(self.order())].to_vec() }
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { c: self.c.iter().map(|a| -a).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.order().min(o.order());
        let mut out = Jet::zero(n);
        for i in 0..=n {
            for j in 0..=n - i {
                out.c[i + j] += self.c[i] * o.c[j];
            }
        }
        out
    }
}

/// Coefficient functions of the round S⁴ metric in the radial variable,
/// expanded at a complex point s₀.
#[derive(Debug, Clone)]
pub struct TrigJets {
    pub one: Jet,
    pub tan: Jet,
    pub tan2: Jet,
    pub sec2: Jet,
    pub tan_sec: Jet,
    pub sec: Jet,
    pub cos: Jet,
}

impl TrigJets {
    pub fn at(s0: Complex64, order: usize) -> Self {
        let x = Jet::variable(s0, order);
        let (s, c) = x.sin_cos();
        let sec = c.recip();
        let tan = &s * &sec;
        Self {
            one: Jet::constant(Complex64::new(1.0, 0.0), order),
            tan2: &tan * &tan,
            sec2: &sec * &sec,
            tan_sec: &tan * &sec,
            tan,
            sec,
            cos: c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tan_series() {
        let t = TrigJets::at(Complex64::new(0.0, 0.0), 7);
        // tan h = h + h³/3 + 2h⁵/15 + 17h⁷/315
        let want = [0.0, 1.0, 0.0, 1.0 / 3.0, 0.0, 2.0 / 15.0, 0.0, 17.0 / 315.0];
        for (a, b) in t.tan.c.iter().zip(want) {
            assert!((a.re - b).abs() < 1e-15 && a.im.abs() < 1e-15);
        }
    }
}
