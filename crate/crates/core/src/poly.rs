//! Integer polynomials and exact factorization over ℤ[x] by Kronecker's method.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Polynomial with arbitrary-size integer coefficients, lowest degree first.
///
/// Trailing zero coefficients are never stored; the zero polynomial has no
/// coefficients at all.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        Self::new(vec![BigInt::one()])
    }

    /// `x - root`.
    fn linear_root(root: &BigInt) -> Self {
        Self::new(vec![-root.clone(), BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> &BigInt {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// `self / divisor` when the division is exact over ℤ.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        let dd = divisor.degree()?;
        let nd = self.degree()?;
        if nd < dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        let lead = divisor.lead();
        for i in (0..=nd - dd).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(Self::new(quot))
        } else {
            None
        }
    }

    /// Greatest common divisor of the coefficients (nonnegative).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Flip the sign so that the lowest nonzero coefficient is positive.
    fn normalized_sign(self) -> Self {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            Some(c) if c.is_negative() => self.neg(),
            _ => self,
        }
    }

    /// A divisor of degree between 1 and `deg/2`, found by exhausting the
    /// Kronecker candidates, or `None` when `self` is irreducible among
    /// primitive polynomials.
    pub fn kronecker_divisor(&self) -> Option<Self> {
        let n = self.degree()?;
        if n < 2 {
            return None;
        }
        let m = n / 2;
        let mut nodes: Vec<BigInt> = Vec::with_capacity(m + 1);
        let mut values: Vec<BigInt> = Vec::with_capacity(m + 1);
        for t in 0i64.. {
            let x = BigInt::from(if t % 2 == 1 { (t + 1) / 2 } else { -(t / 2) });
            let v = self.eval(&x);
            if v.is_zero() {
                return Some(Self::linear_root(&x));
            }
            nodes.push(x);
            values.push(v);
            if nodes.len() == m + 1 {
                break;
            }
        }
        let choices: Vec<Vec<BigInt>> = values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let pos = divisors(&v.magnitude().clone());
                if i == 0 {
                    // a divisor and its negative are equivalent candidates
                    pos.into_iter().map(BigInt::from).collect()
                } else {
                    pos.into_iter()
                        .flat_map(|p| {
                            let b = BigInt::from(p);
                            [b.clone(), -b]
                        })
                        .collect()
                }
            })
            .collect();
        let mut odometer = vec![0usize; choices.len()];
        loop {
            let targets: Vec<BigInt> = odometer
                .iter()
                .zip(&choices)
                .map(|(&i, c)| c[i].clone())
                .collect();
            if let Some(candidate) = interpolate(&nodes, &targets) {
                if candidate.degree().is_some_and(|d| d >= 1 && d < n)
                    && self.div_exact(&candidate).is_some()
                {
                    return Some(candidate.normalized_sign());
                }
            }
            let mut pos = 0;
            loop {
                if pos == odometer.len() {
                    return None;
                }
                odometer[pos] += 1;
                if odometer[pos] < choices[pos].len() {
                    break;
                }
                odometer[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Compact form without spaces, e.g. `1+3x` or `1-x+x^2`.
    pub fn compact_string(&self) -> String {
        format_terms(&self.coeffs, "")
    }
}

impl fmt::Display for IntPoly {
    /// Ascending terms joined by ` + ` / ` - `, e.g. `1 + 6x + x^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(&self.coeffs, " "))
    }
}

fn format_terms(coeffs: &[BigInt], pad: &str) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.magnitude();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            let _ = write!(out, "{pad}{}{pad}", if c.is_negative() { '-' } else { '+' });
        }
        let unit = mag.is_one();
        match k {
            0 => {
                let _ = write!(out, "{mag}");
            }
            1 if unit => out.push('x'),
            1 => {
                let _ = write!(out, "{mag}x");
            }
            _ if unit => {
                let _ = write!(out, "x^{k}");
            }
            _ => {
                let _ = write!(out, "{mag}x^{k}");
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Parse the forms produced by `Display` and `compact_string`.
pub fn parse_int_poly(text: &str) -> Result<IntPoly> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::PolynomialParse("empty input"));
    }
    let mut coeffs: Vec<BigInt> = Vec::new();
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let bytes = cleaned.as_bytes();
    let mut start = 0;
    let mut negative = false;
    if bytes[0] == b'-' || bytes[0] == b'+' {
        negative = bytes[0] == b'-';
        start = 1;
    }
    let mut i = start;
    while i <= bytes.len() {
        if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && i > start) {
            terms.push((negative, &cleaned[start..i]));
            if i < bytes.len() {
                negative = bytes[i] == b'-';
            }
            start = i + 1;
        }
        i += 1;
    }
    for (neg, term) in terms {
        if term.is_empty() {
            return Err(Error::PolynomialParse("empty term"));
        }
        let (coef_text, power) = match term.find('x') {
            None => (term, 0usize),
            Some(pos) => {
                let rest = &term[pos + 1..];
                let power = if rest.is_empty() {
                    1
                } else if let Some(p) = rest.strip_prefix('^') {
                    p.parse::<usize>()
                        .map_err(|_| Error::PolynomialParse("bad exponent"))?
                } else {
                    return Err(Error::PolynomialParse("unexpected text after x"));
                };
                (&term[..pos], power)
            }
        };
        let coef_text = coef_text.strip_suffix('*').unwrap_or(coef_text);
        let mut value = if coef_text.is_empty() {
            if power == 0 {
                return Err(Error::PolynomialParse("empty term"));
            }
            BigInt::one()
        } else {
            if !coef_text.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::PolynomialParse("coefficient is not an integer"));
            }
            coef_text
                .parse::<BigInt>()
                .map_err(|_| Error::PolynomialParse("bad coefficient"))?
        };
        if neg {
            value = -value;
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += value;
    }
    Ok(IntPoly::new(coeffs))
}

/// Prime factorization by trial division, dividing out each prime as it is found.
fn prime_factors(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut rest = n.clone();
    let mut out = Vec::new();
    let mut p = BigUint::from(2u32);
    while &p * &p <= rest {
        let mut e = 0;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += if p == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    if rest > BigUint::one() {
        out.push((rest, 1));
    }
    out
}

/// Positive divisors of `n` in increasing order (`n = 0` has none).
fn divisors(n: &BigUint) -> Vec<BigUint> {
    if n.is_zero() {
        return Vec::new();
    }
    let mut out = vec![BigUint::one()];
    for (p, e) in prime_factors(n) {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut power = d.clone();
            next.push(power.clone());
            for _ in 0..e {
                power *= &p;
                next.push(power.clone());
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Integer polynomial of degree `< nodes.len()` through the points, if one exists.
///
/// Newton divided differences over integer nodes stay integral exactly when
/// the interpolant has integer coefficients, so any inexact division rejects.
fn interpolate(nodes: &[BigInt], values: &[BigInt]) -> Option<IntPoly> {
    let n = nodes.len();
    let mut table: Vec<BigInt> = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = &table[i] - &table[i - 1];
            let den = &nodes[i] - &nodes[i - level];
            let (q, r) = num.div_rem(&den);
            if !r.is_zero() {
                return None;
            }
            table[i] = q;
        }
    }
    // Horner on the Newton form
    let mut poly = IntPoly::new(vec![table[n - 1].clone()]);
    for i in (0..n - 1).rev() {
        poly = poly.mul(&IntPoly::linear_root(&nodes[i]));
        let mut c = poly.coeffs.clone();
        if c.is_empty() {
            c.push(BigInt::zero());
        }
        c[0] += &table[i];
        poly = IntPoly::new(c);
    }
    Some(poly)
}

/// Complete factorization `unit · content · Π f_i^{e_i}` over ℤ[x].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    /// Signed integer constant; `1` for every entanglement polynomial.
    pub constant: BigInt,
    /// Irreducible primitive factors with positive lowest coefficient, sorted.
    pub factors: Vec<(IntPoly, usize)>,
}

impl Factorization {
    pub fn product(&self) -> IntPoly {
        let mut acc = IntPoly::new(vec![self.constant.clone()]);
        for (f, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(f);
            }
        }
        acc
    }

    /// Number of irreducible factors counted with multiplicity.
    pub fn factor_count(&self) -> usize {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    pub fn is_irreducible(&self) -> bool {
        self.constant.is_one() && self.factor_count() == 1
    }

    /// Flattened factor list with repeats, in sorted order.
    pub fn expanded(&self) -> Vec<IntPoly> {
        self.factors
            .iter()
            .flat_map(|(f, e)| core::iter::repeat_n(f.clone(), *e))
            .collect()
    }
}

impl fmt::Display for Factorization {
    /// `(1+x)^2(1+3x)`; a bare constant prints as the integer.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "{}", self.constant);
        }
        if !self.constant.is_one() {
            if self.constant == -BigInt::one() {
                f.write_str("-")?;
            } else {
                write!(f, "{}", self.constant)?;
            }
        }
        for (p, e) in &self.factors {
            write!(f, "({})", p.compact_string())?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Factor a nonzero integer polynomial into irreducibles over ℤ.
pub fn factorize(poly: &IntPoly) -> Result<Factorization> {
    if poly.is_zero() {
        return Err(Error::InvalidArgument("cannot factor the zero polynomial"));
    }
    let mut irreducible: Vec<IntPoly> = Vec::new();
    let mut coeffs = poly.coeffs.clone();
    let mut x_power = 0;
    while coeffs.first().is_some_and(|c| c.is_zero()) {
        coeffs.remove(0);
        x_power += 1;
    }
    for _ in 0..x_power {
        irreducible.push(IntPoly::from_i64s(&[0, 1]));
    }
    let rest = IntPoly::new(coeffs);
    let mut content = rest.content();
    if rest.coeffs[0].sign() == Sign::Minus {
        content = -content;
    }
    let primitive = IntPoly::new(rest.coeffs.iter().map(|c| c / &content).collect());
    let mut stack = vec![primitive];
    while let Some(p) = stack.pop() {
        match p.degree() {
            Some(0) => continue,
            Some(_) => {}
            None => unreachable!("nonzero by construction"),
        }
        match p.kronecker_divisor() {
            Some(divisor) => {
                let quotient = p
                    .div_exact(&divisor)
                    .expect("divisor divides")
                    .normalized_sign();
                stack.push(divisor);
                stack.push(quotient);
            }
            None => irreducible.push(p.normalized_sign()),
        }
    }
    irreducible.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs.cmp(&b.coeffs))
    });
    let mut factors: Vec<(IntPoly, usize)> = Vec::new();
    for f in irreducible {
        match factors.last_mut() {
            Some((last, e)) if *last == f => *e += 1,
            _ => factors.push((f, 1)),
        }
    }
    let out = Factorization {
        constant: content,
        factors,
    };
    debug_assert_eq!(out.product(), *poly);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn display_forms() {
        assert_eq!(p(&[1, 3]).to_string(), "1 + 3x");
        assert_eq!(p(&[1]).to_string(), "1");
        assert_eq!(p(&[1, 6, 1]).to_string(), "1 + 6x + x^2");
        assert_eq!(p(&[1, -1, 1]).to_string(), "1 - x + x^2");
        assert_eq!(p(&[0, -2]).to_string(), "-2x");
        assert_eq!(p(&[1, -1, 1]).compact_string(), "1-x+x^2");
        assert_eq!(p(&[]).to_string(), "0");
    }

    #[test]
    fn parse_round_trips() {
        for c in [
            &[1i64, 3][..],
            &[1],
            &[1, 6, 1],
            &[1, -1, 1],
            &[3, 0, 0, 7],
            &[0, -2],
        ] {
            let poly = p(c);
            assert_eq!(parse_int_poly(&poly.to_string()).unwrap(), poly);
            assert_eq!(parse_int_poly(&poly.compact_string()).unwrap(), poly);
        }
        assert!(parse_int_poly("1 + y").is_err());
        assert!(parse_int_poly("").is_err());
        assert!(parse_int_poly("1 + + x").is_err());
    }

    #[test]
    fn multiplication_and_exact_division() {
        let f = p(&[1, 1]).mul(&p(&[1, 3]));
        assert_eq!(f, p(&[1, 4, 3]));
        assert_eq!(f.div_exact(&p(&[1, 1])), Some(p(&[1, 3])));
        assert_eq!(p(&[1, 6, 1]).div_exact(&p(&[1, 1])), None);
        assert_eq!(p(&[1, 2]).div_exact(&p(&[0, 2])), None);
    }

    #[test]
    fn interpolation_recovers_integer_polynomials() {
        let nodes: Vec<BigInt> = [0, 1, -1, 2].iter().map(|&v| BigInt::from(v)).collect();
        let f = p(&[2, -3, 0, 5]);
        let values: Vec<BigInt> = nodes.iter().map(|x| f.eval(x)).collect();
        assert_eq!(interpolate(&nodes, &values), Some(f));
        // (x^2 + x)/2 takes integer values but has rational coefficients
        let values: Vec<BigInt> = [0, 1, 0].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(interpolate(&nodes[..3], &values), None);
    }

    #[test]
    fn divisor_lists() {
        let d: Vec<u64> = divisors(&BigUint::from(12u32))
            .iter()
            .map(|v| num_traits::ToPrimitive::to_u64(v).unwrap())
            .collect();
        assert_eq!(d, [1, 2, 3, 4, 6, 12]);
        assert!(divisors(&BigUint::zero()).is_empty());
        // 3 · 2^64 exceeds u64
        let big = BigUint::from(3u32) << 64;
        let d = divisors(&big);
        assert_eq!(d.len(), 2 * 65);
        assert_eq!(d.last(), Some(&big));
        assert_eq!(divisors(&BigUint::one()), [BigUint::one()]);
        assert_eq!(divisors(&BigUint::from(97u32)).len(), 2);
    }

    #[test]
    fn factorization_examples() {
        let f = factorize(&p(&[1, 4, 3])).unwrap();
        assert_eq!(f.expanded(), [p(&[1, 1]), p(&[1, 3])]);
        assert_eq!(f.to_string(), "(1+x)(1+3x)");

        let f = factorize(&p(&[1, 6, 1])).unwrap();
        assert!(f.is_irreducible());

        let f = factorize(&p(&[1, 7])).unwrap();
        assert!(f.is_irreducible());

        let f = factorize(&p(&[1, 3, 3, 1])).unwrap();
        assert_eq!(f.factors, [(p(&[1, 1]), 3)]);
        assert_eq!(f.to_string(), "(1+x)^3");

        let f = factorize(&p(&[1])).unwrap();
        assert!(f.factors.is_empty());
        assert_eq!(f.to_string(), "1");
    }

    #[test]
    fn factorization_with_negative_factors_and_content() {
        // 1 + x^3 = (1 + x)(1 - x + x^2)
        let f = factorize(&p(&[1, 0, 0, 1])).unwrap();
        assert_eq!(f.expanded(), [p(&[1, 1]), p(&[1, -1, 1])]);
        // -2 - 2x^2 = -2 (1 + x^2)
        let f = factorize(&p(&[-2, 0, -2])).unwrap();
        assert_eq!(f.constant, BigInt::from(-2));
        assert_eq!(f.expanded(), [p(&[1, 0, 1])]);
        // x^2 (1 - x)
        let f = factorize(&p(&[0, 0, 1, -1])).unwrap();
        assert_eq!(f.product(), p(&[0, 0, 1, -1]));
        assert_eq!(f.factor_count(), 3);
        // x^4 + 4 = (x^2 + 2x + 2)(x^2 - 2x + 2), no linear factors
        let f = factorize(&p(&[4, 0, 0, 0, 1])).unwrap();
        assert_eq!(f.expanded(), [p(&[2, -2, 1]), p(&[2, 2, 1])]);
        assert!(factorize(&p(&[])).is_err());
    }
}
