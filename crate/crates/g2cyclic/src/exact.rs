//! Exact arithmetic in the field Q(i, sqrt 2).
//!
//! An element is stored as `a + b i + c sqrt2 + d i sqrt2` with four reduced
//! big rationals. Internally it is handled as `p + q sqrt2` with `p, q` in
//! the Gaussian rationals, which makes the inverse a two-step norm descent.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero in Q(i, sqrt 2)")]
    DivisionByZero,
}

/// Element of Q(i, sqrt 2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    a: BigRational,
    b: BigRational,
    c: BigRational,
    d: BigRational,
}

// Gaussian rational helpers on (re, im) pairs.
fn g_mul(x: (&BigRational, &BigRational), y: (&BigRational, &BigRational)) -> (BigRational, BigRational) {
    let (xr, xi) = x;
    let (yr, yi) = y;
    let mut re = BigRational::zero();
    let mut im = BigRational::zero();
    if !xr.is_zero() {
        if !yr.is_zero() {
            re += xr * yr;
        }
        if !yi.is_zero() {
            im += xr * yi;
        }
    }
    if !xi.is_zero() {
        if !yi.is_zero() {
            re -= xi * yi;
        }
        if !yr.is_zero() {
            im += xi * yr;
        }
    }
    (re, im)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl ExactScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    /// The rational n/d. Panics if d = 0.
    pub fn ratio(n: i64, d: i64) -> Self {
        Self::real(rat(n, d))
    }

    pub fn real(a: BigRational) -> Self {
        Self { a, ..Self::default() }
    }

    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Self { a, b, c, d }
    }

    /// Shorthand with small integer fractions: (a, b, c, d) each given as (num, den).
    pub fn from_parts(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Self {
        Self::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1), rat(d.0, d.1))
    }

    pub fn i() -> Self {
        Self { b: BigRational::one(), ..Self::default() }
    }

    pub fn sqrt2() -> Self {
        Self { c: BigRational::one(), ..Self::default() }
    }

    /// 1/sqrt2 = sqrt2/2.
    pub fn inv_sqrt2() -> Self {
        Self { c: rat(1, 2), ..Self::default() }
    }

    pub fn parts(&self) -> [&BigRational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// True when the element lies in Q(sqrt 2), i.e. is a real number.
    pub fn is_real(&self) -> bool {
        self.b.is_zero() && self.d.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// Complex conjugation: fixes sqrt2, negates i.
    pub fn conj_i(&self) -> Self {
        Self { a: self.a.clone(), b: -&self.b, c: self.c.clone(), d: -&self.d }
    }

    /// Galois conjugation sqrt2 -> -sqrt2, fixing i.
    pub fn conj_sqrt2(&self) -> Self {
        Self { a: self.a.clone(), b: self.b.clone(), c: -&self.c, d: -&self.d }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        // x = p + q sqrt2, x * conj_sqrt2(x) = p^2 - 2 q^2 = n in Q(i).
        let p = (&self.a, &self.b);
        let q = (&self.c, &self.d);
        let (p2r, p2i) = g_mul(p, p);
        let (q2r, q2i) = g_mul(q, q);
        let two = rat(2, 1);
        let nr = p2r - &two * q2r;
        let ni = p2i - &two * q2i;
        let norm = &nr * &nr + &ni * &ni;
        // 1/n = conj(n) / |n|^2
        let inr = &nr / &norm;
        let ini = -(&ni / &norm);
        let conj = self.conj_sqrt2();
        Ok(conj * Self { a: inr, b: ini, ..Self::default() })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Real part `a + c sqrt2`.
    pub fn re_part(&self) -> Self {
        Self { a: self.a.clone(), c: self.c.clone(), ..Self::default() }
    }

    /// Imaginary part `b + d sqrt2` (a real element).
    pub fn im_part(&self) -> Self {
        Self { a: self.b.clone(), c: self.d.clone(), ..Self::default() }
    }

    /// Lossy conversion to a double-precision complex number.
    pub fn to_complex(&self) -> Complex64 {
        let s = std::f64::consts::SQRT_2;
        let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
        Complex64::new(f(&self.a) + s * f(&self.c), f(&self.b) + s * f(&self.d))
    }

    /// Exact sign of a real element of Q(sqrt 2). Returns `None` if the
    /// element has an imaginary part.
    pub fn real_sign(&self) -> Option<i8> {
        if !self.is_real() {
            return None;
        }
        let sa = sign_of(&self.a);
        let sc = sign_of(&self.c);
        if sc == 0 {
            return Some(sa);
        }
        if sa == 0 || sa == sc {
            return Some(sc);
        }
        let a2 = &self.a * &self.a;
        let c2 = &self.c * &self.c * rat(2, 1);
        Some(if a2 > c2 { sa } else { sc })
    }
}

/// Random element with small rational parts `n/d`, |n| <= bound, 1 <= d <= 4.
/// Each part is zero with probability 1/4 so that sparse values show up too.
pub fn random_scalar<R: rand::Rng + ?Sized>(rng: &mut R, bound: i64) -> ExactScalar {
    let part = |rng: &mut R| {
        if rng.gen_range(0..4) == 0 {
            BigRational::zero()
        } else {
            rat(rng.gen_range(-bound..=bound), rng.gen_range(1..=4))
        }
    };
    let a = part(rng);
    let b = part(rng);
    let c = part(rng);
    let d = part(rng);
    ExactScalar::new(a, b, c, d)
}

/// Random rational (real, no surd part) with the same distribution per part.
pub fn random_rational<R: rand::Rng + ?Sized>(rng: &mut R, bound: i64) -> ExactScalar {
    ExactScalar::ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=4))
}

fn sign_of(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for ExactScalar {
    fn from(r: BigRational) -> Self {
        Self::real(r)
    }
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar { a: &self.a + &o.a, b: &self.b + &o.b, c: &self.c + &o.c, d: &self.d + &o.d }
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar { a: &self.a - &o.a, b: &self.b - &o.b, c: &self.c - &o.c, d: &self.d - &o.d }
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, o: &ExactScalar) -> ExactScalar {
        // (p1 + q1 s)(p2 + q2 s) = p1 p2 + 2 q1 q2 + (p1 q2 + q1 p2) s
        let p1 = (&self.a, &self.b);
        let q1 = (&self.c, &self.d);
        let p2 = (&o.a, &o.b);
        let q2 = (&o.c, &o.d);
        let (mut a, mut b) = g_mul(p1, p2);
        let q1z = q1.0.is_zero() && q1.1.is_zero();
        let q2z = q2.0.is_zero() && q2.1.is_zero();
        if !q1z && !q2z {
            let (r, i) = g_mul(q1, q2);
            a += &r + &r;
            b += &i + &i;
        }
        let (mut c, mut d) = (BigRational::zero(), BigRational::zero());
        if !q2z {
            let (r, i) = g_mul(p1, q2);
            c += r;
            d += i;
        }
        if !q1z {
            let (r, i) = g_mul(q1, p2);
            c += r;
            d += i;
        }
        ExactScalar { a, b, c, d }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { a: -&self.a, b: -&self.b, c: -&self.c, d: -&self.d }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

/// Panics on division by zero; use [`ExactScalar::checked_div`] for a `Result`.
impl<'a> Div<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn div(self, o: &ExactScalar) -> ExactScalar {
        self.checked_div(o).expect("division by zero")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: ExactScalar) -> ExactScalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: &ExactScalar) -> ExactScalar {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: ExactScalar) -> ExactScalar {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, o: &ExactScalar) {
        self.a += &o.a;
        self.b += &o.b;
        self.c += &o.c;
        self.d += &o.d;
    }
}

impl AddAssign for ExactScalar {
    fn add_assign(&mut self, o: ExactScalar) {
        *self += &o;
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, o: &ExactScalar) {
        self.a -= &o.a;
        self.b -= &o.b;
        self.c -= &o.c;
        self.d -= &o.d;
    }
}

impl SubAssign for ExactScalar {
    fn sub_assign(&mut self, o: ExactScalar) {
        *self -= &o;
    }
}

impl MulAssign<&ExactScalar> for ExactScalar {
    fn mul_assign(&mut self, o: &ExactScalar) {
        *self = &*self * o;
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ExactScalar {
    /// Renders as `a+bi+c√2+di√2`, dropping zero terms and unit coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        let terms = [(&self.a, ""), (&self.b, "i"), (&self.c, "√2"), (&self.d, "i√2")];
        for (coef, unit) in terms {
            if coef.is_zero() {
                continue;
            }
            let neg = coef.is_negative();
            let mag = coef.abs();
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if unit.is_empty() || !mag.is_one() {
                out.push_str(&fmt_rat(&mag));
            }
            out.push_str(unit);
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_sqrt2_squared() {
        let x = ExactScalar::i() * ExactScalar::sqrt2();
        assert_eq!(&x * &x, ExactScalar::from_int(-2));
    }

    #[test]
    fn rationalized_inverse_sqrt2() {
        let h = ExactScalar::inv_sqrt2();
        assert_eq!(h.to_string(), "1/2√2");
        assert!((h * ExactScalar::sqrt2()).is_one());
        assert_eq!(ExactScalar::sqrt2().inv().unwrap(), ExactScalar::inv_sqrt2());
    }

    #[test]
    fn conj_of_minus_half_i() {
        let x = ExactScalar::from_parts((0, 1), (-1, 2), (0, 1), (0, 1));
        assert_eq!(x.conj_i(), ExactScalar::from_parts((0, 1), (1, 2), (0, 1), (0, 1)));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(ExactScalar::zero().inv(), Err(FieldError::DivisionByZero));
        assert!(ExactScalar::one().checked_div(&ExactScalar::zero()).is_err());
    }

    #[test]
    fn rendering() {
        let x = ExactScalar::from_parts((1, 2), (3, 1), (-2, 1), (1, 4));
        assert_eq!(x.to_string(), "1/2+3i-2√2+1/4i√2");
        assert_eq!((-ExactScalar::i()).to_string(), "-i");
        assert_eq!(ExactScalar::zero().to_string(), "0");
    }

    #[test]
    fn real_sign_of_surds() {
        let x = ExactScalar::from_parts((3, 1), (0, 1), (-2, 1), (0, 1)); // 3 - 2.83
        assert_eq!(x.real_sign(), Some(1));
        let y = ExactScalar::from_parts((-3, 2), (0, 1), (1, 1), (0, 1)); // -1.5 + 1.41
        assert_eq!(y.real_sign(), Some(-1));
        assert_eq!(ExactScalar::i().real_sign(), None);
    }

    #[test]
    fn to_complex_is_close() {
        let x = ExactScalar::from_parts((1, 1), (0, 1), (0, 1), (-1, 2));
        let z = x.to_complex();
        assert!((z.re - 1.0).abs() < 1e-15);
        assert!((z.im + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
