//! Integer Laurent polynomials in one variable `v`.
//!
//! This is the coefficient ring of everything else in the crate, so the
//! representation is kept deliberately compact: a dense coefficient band
//! together with the exponent of its first entry. Kazhdan-Lusztig entries are
//! short bands of small integers, so a dense band beats a hash map both in
//! memory and in iteration order stability.

use std::fmt;

/// A Laurent polynomial `sum coeffs[i] * v^(min + i)` with exact `i64`
/// coefficients.
///
/// Invariant: `coeffs` is empty (the zero polynomial) or both its first and
/// last entries are nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    min: i32,
    coeffs: Vec<i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, 1)
    }

    /// The monomial `c * v^exp` (zero if `c == 0`).
    pub fn monomial(exp: i32, c: i64) -> Self {
        if c == 0 {
            LaurentPoly::zero()
        } else {
            LaurentPoly { min: exp, coeffs: vec![c] }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exp: i32) -> i64 {
        if self.is_zero() || exp < self.min {
            return 0;
        }
        let i = (exp - self.min) as usize;
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Smallest exponent with nonzero coefficient; `None` for zero.
    pub fn min_exp(&self) -> Option<i32> {
        if self.is_zero() {
            None
        } else {
            Some(self.min)
        }
    }

    /// Largest exponent with nonzero coefficient; `None` for zero.
    pub fn max_exp(&self) -> Option<i32> {
        if self.is_zero() {
            None
        } else {
            Some(self.min + self.coeffs.len() as i32 - 1)
        }
    }

    /// Iterate `(exponent, coefficient)` pairs with nonzero coefficient, in
    /// increasing exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.min + i as i32, c))
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min += lead as i32;
        }
        if self.coeffs.is_empty() {
            self.min = 0;
        }
    }

    /// `self += scale * v^shift * other`.
    pub fn add_scaled(&mut self, other: &LaurentPoly, scale: i64, shift: i32) {
        if scale == 0 || other.is_zero() {
            return;
        }
        let omin = other.min + shift;
        let omax = omin + other.coeffs.len() as i32 - 1;
        if self.is_zero() {
            self.min = omin;
            self.coeffs = other.coeffs.iter().map(|&c| c * scale).collect();
            self.trim();
            return;
        }
        let smax = self.min + self.coeffs.len() as i32 - 1;
        let nmin = self.min.min(omin);
        let nmax = smax.max(omax);
        let mut coeffs = vec![0i64; (nmax - nmin + 1) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(self.min - nmin) as usize + i] = c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            coeffs[(omin - nmin) as usize + i] += c * scale;
        }
        self.min = nmin;
        self.coeffs = coeffs;
        self.trim();
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        r.add_scaled(other, 1, 0);
        r
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        r.add_scaled(other, -1, 0);
        r
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        let mut r = LaurentPoly { min: self.min + other.min, coeffs };
        r.trim();
        r
    }

    /// The image under `v -> v^-1`.
    pub fn negate_exponents(&self) -> LaurentPoly {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        let max = self.min + self.coeffs.len() as i32 - 1;
        LaurentPoly { min: -max, coeffs: self.coeffs.iter().rev().copied().collect() }
    }

    /// True iff the polynomial is a nonnegative integer constant (possibly 0).
    ///
    /// This is the per-coordinate condition in "KL-supported in degree 0".
    pub fn is_deg0_nonneg(&self) -> bool {
        match self.coeffs.len() {
            0 => true,
            1 => self.min == 0 && self.coeffs[0] > 0,
            _ => false,
        }
    }

    /// True iff all exponents are negative (triangularity of off-diagonal KL
    /// entries).
    pub fn all_exponents_negative(&self) -> bool {
        self.max_exp().map_or(true, |m| m < 0)
    }

    /// True iff all coefficients are positive.
    pub fn all_coeffs_positive(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0) && !self.is_zero()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Highest exponent first reads most naturally.
        for (e, c) in self.iter().collect::<Vec<_>>().into_iter().rev() {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let a = c.unsigned_abs();
            match (a, e) {
                (_, 0) => write!(f, "{}", a)?,
                (1, 1) => write!(f, "v")?,
                (1, _) => write!(f, "v^{}", e)?,
                (_, 1) => write!(f, "{}v", a)?,
                (_, _) => write!(f, "{}v^{}", a, e)?,
            }
        }
        Ok(())
    }
}

// Forward `Debug` to `Display`; KL tables are unreadable otherwise.
impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
