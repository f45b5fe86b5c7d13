//! Exact arithmetic in `Z[ω_d]` through integer polynomials reduced modulo the
//! cyclotomic polynomial Φ_d.

use std::fmt;

use crate::zmod::check_modulus;
use crate::{Error, Result};

/// Dense integer polynomial, coefficients in ascending degree. The zero
/// polynomial has no coefficients; otherwise the leading coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<i64> {
        self.coeffs.last().copied()
    }

    /// `x^n - 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut c = vec![0; n + 1];
        c[0] = -1;
        c[n] += 1;
        IntPoly::new(c)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::default();
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Quotient and remainder by a monic divisor; exact over the integers.
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> Result<(IntPoly, IntPoly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::domain("division by the zero polynomial"))?;
        if divisor.leading() != Some(1) {
            return Err(Error::domain("divisor must be monic"));
        }
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((IntPoly::default(), self.clone()));
        }
        let mut quot = vec![0i64; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k];
            if c == 0 {
                continue;
            }
            quot[k - dd] = c;
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + j] -= c * dc;
            }
        }
        rem.truncate(dd);
        Ok((IntPoly::new(quot), IntPoly::new(rem)))
    }

    /// Division that must leave no remainder.
    pub fn exact_div(&self, divisor: &IntPoly) -> Result<IntPoly> {
        let (q, r) = self.div_rem_monic(divisor)?;
        if !r.is_zero() {
            return Err(Error::Numeric(format!("{self} is not divisible by {divisor}")));
        }
        Ok(q)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            let coeff = if mag == 1 && k > 0 { String::new() } else { mag.to_string() };
            let var = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            write!(f, "{sign}{coeff}{var}")?;
            first = false;
        }
        Ok(())
    }
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|k| n.is_multiple_of(*k)).collect()
}

/// Φ_n, computed as `(x^n - 1) / ∏_{e | n, e < n} Φ_e` by exact division.
pub fn cyclotomic_poly(n: usize) -> Result<IntPoly> {
    if n == 0 {
        return Err(Error::domain("cyclotomic polynomials are indexed from 1"));
    }
    let mut table: Vec<IntPoly> = vec![IntPoly::default(); n + 1];
    for k in divisors(n) {
        let mut p = IntPoly::x_pow_minus_one(k);
        for e in divisors(k) {
            if e < k {
                p = p.exact_div(&table[e])?;
            }
        }
        table[k] = p;
    }
    Ok(std::mem::take(&mut table[n]))
}

/// `Σ_k coeffs[k] ω_d^k` as an element of `Z[ω_d]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    d: u32,
    coeffs: Vec<i64>,
}

impl CyclotomicInt {
    pub fn new(d: u32, coeffs: Vec<i64>) -> Result<Self> {
        check_modulus(d)?;
        if coeffs.len() != d as usize {
            return Err(Error::domain(format!("expected {d} coefficients, got {}", coeffs.len())));
        }
        Ok(CyclotomicInt { d, coeffs })
    }

    /// `Σ_i ω_d^{ν_i}` for exponents taken mod d.
    pub fn from_exponents(d: u32, exponents: impl IntoIterator<Item = i64>) -> Result<Self> {
        check_modulus(d)?;
        let mut coeffs = vec![0i64; d as usize];
        for e in exponents {
            coeffs[crate::zmod::reduce(e, d) as usize] += 1;
        }
        Ok(CyclotomicInt { d, coeffs })
    }

    pub fn modulus(&self) -> u32 {
        self.d
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Remainder of `Σ coeffs[k] x^k` modulo Φ_d: the canonical form of the
    /// element in `Z[x]/(Φ_d) ≅ Z[ω_d]`.
    pub fn reduced(&self) -> IntPoly {
        let phi = cyclotomic_poly(self.d as usize).expect("d >= 2");
        self.reduced_by(&phi)
    }

    /// As [`reduced`](Self::reduced), with `phi` the caller's precomputed Φ_d.
    pub fn reduced_by(&self, phi: &IntPoly) -> IntPoly {
        let (_, r) = IntPoly::new(self.coeffs.clone())
            .div_rem_monic(phi)
            .expect("cyclotomic polynomials are monic");
        r
    }

    /// Exact zero test of the complex number this element denotes.
    pub fn is_zero(&self) -> bool {
        self.reduced().is_zero()
    }

    /// Floating-point value, for diagnostics only.
    pub fn to_complex(&self) -> crate::weyl::C64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| crate::weyl::root_of_unity(k as i64, self.d) * c as f64)
            .sum()
    }
}

pub fn vanishing_sum_is_zero(c: &CyclotomicInt) -> bool {
    c.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::new(c.to_vec())
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1).unwrap(), poly(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2).unwrap(), poly(&[1, 1]));
        assert_eq!(cyclotomic_poly(3).unwrap(), poly(&[1, 1, 1]));
        assert_eq!(cyclotomic_poly(4).unwrap(), poly(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(5).unwrap(), poly(&[1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic_poly(6).unwrap(), poly(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(12).unwrap(), poly(&[1, 0, -1, 0, 1]));
        assert!(cyclotomic_poly(0).is_err());
    }

    #[test]
    fn phi_105_has_a_coefficient_minus_two() {
        let p = cyclotomic_poly(105).unwrap();
        assert_eq!(p.degree(), Some(48));
        assert_eq!(p.coeffs()[7], -2);
        assert_eq!(p.coeffs().iter().filter(|&&c| c == -2).count(), 2);
    }

    #[test]
    fn product_over_divisors_is_x_pow_minus_one() {
        for n in 1..=36 {
            let prod = divisors(n)
                .into_iter()
                .fold(IntPoly::new(vec![1]), |acc, e| acc.mul(&cyclotomic_poly(e).unwrap()));
            assert_eq!(prod, IntPoly::x_pow_minus_one(n), "n = {n}");
        }
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = poly(&[3, -2, 0, 5, 1, 7]);
        let b = poly(&[1, 1, 1]);
        let (q, r) = a.div_rem_monic(&b).unwrap();
        assert!(r.degree().unwrap_or(0) < 2);
        let mut back = q.mul(&b).coeffs().to_vec();
        back.resize(6, 0);
        for (k, c) in r.coeffs().iter().enumerate() {
            back[k] += c;
        }
        assert_eq!(IntPoly::new(back), a);
        assert!(a.div_rem_monic(&poly(&[1, 2])).is_err());
        assert!(a.div_rem_monic(&IntPoly::default()).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(poly(&[1, -1, 1]).to_string(), "x^2-x+1");
        assert_eq!(poly(&[-1, 1]).to_string(), "x-1");
        assert_eq!(IntPoly::default().to_string(), "0");
    }

    #[test]
    fn vanishing_examples() {
        let c = |d, v: &[i64]| CyclotomicInt::new(d, v.to_vec()).unwrap();
        assert!(vanishing_sum_is_zero(&c(3, &[1, 1, 1])));
        assert!(!vanishing_sum_is_zero(&c(3, &[3, 0, 0])));
        assert!(!vanishing_sum_is_zero(&c(4, &[1, 0, 2, 0])));
        assert!(vanishing_sum_is_zero(&c(4, &[1, 0, 1, 0])));
        // 1 + ω^2 + ω^4 = 0 at d = 6, with ω^3 = -1 pairs cancelling
        assert!(vanishing_sum_is_zero(&c(6, &[1, 0, 1, 0, 1, 0])));
        assert!(vanishing_sum_is_zero(&c(6, &[0, 1, 0, 0, 1, 0])));
        assert!(CyclotomicInt::new(4, vec![1, 2]).is_err());
    }

    #[test]
    fn exact_test_agrees_with_floating_point_on_small_multisets() {
        for d in 2..=8u32 {
            // every multiset of up to 4 exponents
            let mut stack = vec![Vec::<i64>::new()];
            while let Some(e) = stack.pop() {
                let c = CyclotomicInt::from_exponents(d, e.iter().copied()).unwrap();
                let numeric_zero = c.to_complex().norm() < 1e-9;
                assert_eq!(c.is_zero(), numeric_zero, "d={d} exps={e:?}");
                if e.len() < 4 {
                    let start = e.last().copied().unwrap_or(0);
                    for k in start..d as i64 {
                        let mut next = e.clone();
                        next.push(k);
                        stack.push(next);
                    }
                }
            }
        }
    }
}
