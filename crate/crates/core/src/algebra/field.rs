//! Exact scalar fields: prime fields `F_p`, small extensions `GF(p^k)` given by a
//! monic irreducible modulus, the rationals, and quadratic extensions of the
//! rationals.
//!
//! Scalars are plain values; every operation goes through the [`Field`] that owns
//! them. Finite-field elements are packed into a `u32` (base-`p` digits of the
//! coefficient vector, constant term first), so equality and hashing are
//! structural and a field element doubles as its index in `0..q`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest extension degree accepted for finite extensions; irreducibility is
/// checked by exhaustive factor search.
pub const MAX_EXTENSION_DEGREE: u32 = 4;

/// Finite fields with at most this many elements get precomputed add/mul tables.
const TABLE_LIMIT: u64 = 256;

/// Plain description of a field, as written in literals.
///
/// `modulus` holds the ascending coefficients `c_0, …, c_k` of a monic degree-`k`
/// polynomial; it is present iff `extension_degree > 1`. Over `F_p` the
/// coefficients are residues in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub characteristic: u64,
    pub extension_degree: u32,
    pub modulus: Option<Vec<BigRational>>,
}

impl FieldSpec {
    pub fn prime(p: u64) -> Self {
        FieldSpec {
            characteristic: p,
            extension_degree: 1,
            modulus: None,
        }
    }

    pub fn rationals() -> Self {
        Self::prime(0)
    }
}

/// A field element. The variant always matches the owning field's kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    /// Residue (prime field) or packed coefficient digits (finite extension).
    Finite(u32),
    Rational(BigRational),
    /// Coefficients of `1, t, …, t^(k-1)` in a rational extension.
    RationalExt(Vec<BigRational>),
}

#[derive(Debug)]
enum Kind {
    Prime {
        p: u64,
    },
    Extension {
        p: u64,
        k: u32,
        q: u64,
        /// Ascending, monic, length k+1.
        modulus: Vec<u64>,
        tables: Option<Tables>,
    },
    Rational,
    RationalExt {
        /// Ascending, monic, length 3.
        modulus: Vec<BigRational>,
    },
}

#[derive(Debug)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
}

#[derive(Debug)]
struct Inner {
    spec: FieldSpec,
    kind: Kind,
}

/// A validated field. Cheap to clone; two handles compare equal iff their specs do.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.spec.hash(state)
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({self})")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Prime { p } => write!(f, "F_{p}"),
            Kind::Extension { p, k, .. } => write!(f, "GF({p}^{k})"),
            Kind::Rational => write!(f, "Q"),
            Kind::RationalExt { modulus } => {
                write!(f, "Q[t]/(t^2")?;
                if !modulus[1].is_zero() {
                    write!(f, " + ({})t", modulus[1])?;
                }
                write!(f, " + ({}))", modulus[0])
            }
        }
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Remainder of `a` modulo a monic `m` over `F_p` (ascending coefficients).
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - lead * c % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Exhaustive search for a monic factor of degree `1..=deg/2`.
fn is_irreducible_mod_p(modulus: &[u64], p: u64) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                cand.push(x % p);
                x /= p;
            }
            cand.push(1);
            if poly_rem(modulus, &cand, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn rational_is_square(x: &BigRational) -> bool {
    if x.is_negative() {
        return false;
    }
    let is_sq = |n: &BigInt| {
        let r = n.sqrt();
        &(&r * &r) == n
    };
    is_sq(x.numer()) && is_sq(x.denom())
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if !rational_is_square(x) {
        return None;
    }
    Some(BigRational::new(x.numer().sqrt(), x.denom().sqrt()))
}

fn digits(mut v: u32, p: u64, k: u32) -> Vec<u64> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(v as u64 % p);
        v = (v as u64 / p) as u32;
    }
    out
}

fn pack(digits: &[u64], p: u64) -> u32 {
    digits.iter().rev().fold(0u64, |acc, &d| acc * p + d) as u32
}

fn ext_add(p: u64, k: u32, a: u32, b: u32) -> u32 {
    let s: Vec<u64> = digits(a, p, k)
        .iter()
        .zip(&digits(b, p, k))
        .map(|(x, y)| (x + y) % p)
        .collect();
    pack(&s, p)
}

fn ext_neg(p: u64, k: u32, a: u32) -> u32 {
    let d: Vec<u64> = digits(a, p, k).iter().map(|x| (p - x) % p).collect();
    pack(&d, p)
}

fn ext_mul(p: u64, k: u32, modulus: &[u64], a: u32, b: u32) -> u32 {
    let da = digits(a, p, k);
    let db = digits(b, p, k);
    let mut prod = vec![0u64; da.len() + db.len() - 1];
    for (i, x) in da.iter().enumerate() {
        for (j, y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let mut r = poly_rem(&prod, modulus, p);
    r.resize(k as usize, 0);
    pack(&r, p)
}

fn build_tables(p: u64, k: u32, modulus: &[u64]) -> Tables {
    let q = p.pow(k) as usize;
    let mut add = vec![0u32; q * q];
    let mut mul = vec![0u32; q * q];
    let mut neg = vec![0u32; q];
    for a in 0..q {
        neg[a] = ext_neg(p, k, a as u32);
        for b in 0..q {
            add[a * q + b] = ext_add(p, k, a as u32, b as u32);
            mul[a * q + b] = ext_mul(p, k, modulus, a as u32, b as u32);
        }
    }
    Tables { add, mul, neg }
}

impl Field {
    fn from_kind(spec: FieldSpec, kind: Kind) -> Self {
        Field(Arc::new(Inner { spec, kind }))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p >= 1 << 31 {
            return Err(Error::InvalidField(format!("prime {p} is too large")));
        }
        Ok(Self::from_kind(FieldSpec::prime(p), Kind::Prime { p }))
    }

    pub fn rationals() -> Self {
        Self::from_kind(FieldSpec::rationals(), Kind::Rational)
    }

    /// `F_p[t] / (modulus)` for a monic irreducible `modulus` of degree 2..=4,
    /// coefficients ascending.
    pub fn extension(p: u64, modulus: &[u64]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let modulus: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree >= 1".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        let k = (modulus.len() - 1) as u32;
        if k == 1 {
            return Self::prime(p);
        }
        if k > MAX_EXTENSION_DEGREE {
            return Err(Error::InvalidField(format!(
                "extension degree {k} exceeds {MAX_EXTENSION_DEGREE}"
            )));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q < 1 << 31)
            .ok_or_else(|| Error::InvalidField(format!("GF({p}^{k}) is too large")))?;
        if !is_irreducible_mod_p(&modulus, p) {
            return Err(Error::InvalidField(format!(
                "modulus {modulus:?} is reducible over F_{p}"
            )));
        }
        let spec = FieldSpec {
            characteristic: p,
            extension_degree: k,
            modulus: Some(
                modulus
                    .iter()
                    .map(|&c| BigRational::from_integer(BigInt::from(c)))
                    .collect(),
            ),
        };
        let tables = (q <= TABLE_LIMIT).then(|| build_tables(p, k, &modulus));
        Ok(Self::from_kind(
            spec,
            Kind::Extension {
                p,
                k,
                q,
                modulus,
                tables,
            },
        ))
    }

    /// `Q[t] / (t^2 + c_1 t + c_0)`; the quadratic must have no rational root.
    pub fn rational_extension(modulus: Vec<BigRational>) -> Result<Self> {
        if modulus.len() != 3 {
            return Err(Error::UnsupportedField(
                "only quadratic extensions of the rationals are supported".into(),
            ));
        }
        if !modulus[2].is_one() {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        // t^2 + b t + c irreducible over Q iff b^2 - 4c is not a rational square.
        let disc = &modulus[1] * &modulus[1] - BigRational::from_integer(4.into()) * &modulus[0];
        if rational_is_square(&disc) {
            return Err(Error::InvalidField(
                "modulus has a rational root".to_string(),
            ));
        }
        let spec = FieldSpec {
            characteristic: 0,
            extension_degree: 2,
            modulus: Some(modulus.clone()),
        };
        Ok(Self::from_kind(spec, Kind::RationalExt { modulus }))
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        match (spec.characteristic, spec.extension_degree, &spec.modulus) {
            (0, 1, None) => Ok(Self::rationals()),
            (p, 1, None) => Self::prime(p),
            (0, _, Some(m)) => Self::rational_extension(m.clone()),
            (p, k, Some(m)) if k > 1 => {
                if m.len() != k as usize + 1 {
                    return Err(Error::InvalidField(format!(
                        "modulus length {} does not match degree {k}",
                        m.len()
                    )));
                }
                let coeffs = m
                    .iter()
                    .map(|c| {
                        if !c.is_integer() {
                            return Err(Error::InvalidField(
                                "finite-field modulus coefficients must be integers".into(),
                            ));
                        }
                        let r = c.numer().mod_floor(&BigInt::from(p));
                        Ok(r.try_into().expect("residue fits u64"))
                    })
                    .collect::<Result<Vec<u64>>>()?;
                Self::extension(p, &coeffs)
            }
            _ => Err(Error::InvalidField(format!(
                "inconsistent field description {spec:?}"
            ))),
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn characteristic(&self) -> u64 {
        self.0.spec.characteristic
    }

    pub fn degree(&self) -> u32 {
        self.0.spec.extension_degree
    }

    /// Number of elements, or `None` for characteristic 0.
    pub fn order(&self) -> Option<u64> {
        match &self.0.kind {
            Kind::Prime { p } => Some(*p),
            Kind::Extension { q, .. } => Some(*q),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub(crate) fn require_finite(&self, what: &str) -> Result<u64> {
        self.order().ok_or_else(|| {
            Error::UnsupportedField(format!("{what} requires a finite field, got {self}"))
        })
    }

    pub fn zero(&self) -> Scalar {
        match &self.0.kind {
            Kind::Prime { .. } | Kind::Extension { .. } => Scalar::Finite(0),
            Kind::Rational => Scalar::Rational(BigRational::zero()),
            Kind::RationalExt { .. } => Scalar::RationalExt(vec![BigRational::zero(); 2]),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    /// Image of an integer under the unique ring map `Z -> F`.
    pub fn from_int(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match &self.0.kind {
            Kind::Prime { p } | Kind::Extension { p, .. } => {
                let r: u64 = n.mod_floor(&BigInt::from(*p)).try_into().unwrap();
                Scalar::Finite(r as u32)
            }
            Kind::Rational => Scalar::Rational(BigRational::from_integer(n.clone())),
            Kind::RationalExt { .. } => Scalar::RationalExt(vec![
                BigRational::from_integer(n.clone()),
                BigRational::zero(),
            ]),
        }
    }

    /// Embed a rational; errors when the denominator vanishes in `F`.
    pub fn from_rational(&self, x: &BigRational) -> Result<Scalar> {
        match &self.0.kind {
            Kind::Rational => Ok(Scalar::Rational(x.clone())),
            Kind::RationalExt { .. } => {
                Ok(Scalar::RationalExt(vec![x.clone(), BigRational::zero()]))
            }
            _ => {
                let num = self.from_bigint(x.numer());
                let den = self.from_bigint(x.denom());
                self.div(&num, &den)
            }
        }
    }

    /// The element with the given ascending coefficients over the prime field.
    /// Over a prime field or `Q` exactly one coefficient is expected.
    pub fn from_coefficients(&self, coeffs: &[BigRational]) -> Result<Scalar> {
        let k = self.degree() as usize;
        if coeffs.len() > k {
            return Err(Error::Literal(format!(
                "{} coefficients given for a degree-{k} field",
                coeffs.len()
            )));
        }
        match &self.0.kind {
            Kind::Prime { .. } | Kind::Rational => {
                self.from_rational(coeffs.first().unwrap_or(&BigRational::zero()))
            }
            Kind::Extension { p, .. } => {
                let base = Field::prime(*p)?;
                let mut packed = 0u64;
                for c in coeffs.iter().rev() {
                    let Scalar::Finite(d) = base.from_rational(c)? else {
                        unreachable!()
                    };
                    packed = packed * p + d as u64;
                }
                Ok(Scalar::Finite(packed as u32))
            }
            Kind::RationalExt { .. } => {
                let mut v = coeffs.to_vec();
                v.resize(k, BigRational::zero());
                Ok(Scalar::RationalExt(v))
            }
        }
    }

    /// Ascending coefficients over the prime field (length = extension degree).
    pub fn coefficients(&self, x: &Scalar) -> Vec<BigRational> {
        match (&self.0.kind, x) {
            (Kind::Prime { .. }, Scalar::Finite(v)) => {
                vec![BigRational::from_integer(BigInt::from(*v))]
            }
            (Kind::Extension { p, k, .. }, Scalar::Finite(v)) => digits(*v, *p, *k)
                .into_iter()
                .map(|d| BigRational::from_integer(BigInt::from(d)))
                .collect(),
            (Kind::Rational, Scalar::Rational(r)) => vec![r.clone()],
            (Kind::RationalExt { .. }, Scalar::RationalExt(c)) => c.clone(),
            _ => panic!("scalar {x:?} does not belong to {self}"),
        }
    }

    /// The class of `t` in an extension field.
    pub fn generator(&self) -> Result<Scalar> {
        match &self.0.kind {
            Kind::Extension { p, .. } => Ok(Scalar::Finite(*p as u32)),
            Kind::RationalExt { .. } => Ok(Scalar::RationalExt(vec![
                BigRational::zero(),
                BigRational::one(),
            ])),
            _ => Err(Error::UnsupportedField(format!("{self} has no generator"))),
        }
    }

    /// Map an element of the prime field (or `Q`) into this field.
    pub fn lift(&self, base: &Field, x: &Scalar) -> Result<Scalar> {
        if base.degree() != 1 || base.characteristic() != self.characteristic() {
            return Err(Error::MixedFields(format!("cannot embed {base} into {self}")));
        }
        let c = base.coefficients(x);
        self.from_coefficients(&c)
    }

    fn rext_mul(modulus: &[BigRational], a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        // (a0 + a1 t)(b0 + b1 t) with t^2 = -m1 t - m0
        let c0 = &a[0] * &b[0];
        let c1 = &a[0] * &b[1] + &a[1] * &b[0];
        let c2 = &a[1] * &b[1];
        vec![c0 - &c2 * &modulus[0], c1 - &c2 * &modulus[1]]
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&self.0.kind, a, b) {
            (Kind::Prime { p }, Scalar::Finite(x), Scalar::Finite(y)) => {
                Scalar::Finite(((*x as u64 + *y as u64) % p) as u32)
            }
            (Kind::Extension { p, k, q, tables, .. }, Scalar::Finite(x), Scalar::Finite(y)) => {
                Scalar::Finite(match tables {
                    Some(t) => t.add[*x as usize * *q as usize + *y as usize],
                    None => ext_add(*p, *k, *x, *y),
                })
            }
            (Kind::Rational, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            (Kind::RationalExt { .. }, Scalar::RationalExt(x), Scalar::RationalExt(y)) => {
                Scalar::RationalExt(x.iter().zip(y).map(|(u, v)| u + v).collect())
            }
            _ => panic!("scalars {a:?}, {b:?} do not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (&self.0.kind, a) {
            (Kind::Prime { p }, Scalar::Finite(x)) => Scalar::Finite(((p - *x as u64) % p) as u32),
            (Kind::Extension { p, k, tables, .. }, Scalar::Finite(x)) => Scalar::Finite(match tables {
                Some(t) => t.neg[*x as usize],
                None => ext_neg(*p, *k, *x),
            }),
            (Kind::Rational, Scalar::Rational(x)) => Scalar::Rational(-x),
            (Kind::RationalExt { .. }, Scalar::RationalExt(x)) => {
                Scalar::RationalExt(x.iter().map(|u| -u).collect())
            }
            _ => panic!("scalar {a:?} does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (&self.0.kind, a, b) {
            (Kind::Prime { p }, Scalar::Finite(x), Scalar::Finite(y)) => {
                Scalar::Finite((*x as u64 * *y as u64 % p) as u32)
            }
            (
                Kind::Extension {
                    p,
                    k,
                    q,
                    modulus,
                    tables,
                },
                Scalar::Finite(x),
                Scalar::Finite(y),
            ) => {
                Scalar::Finite(match tables {
                    Some(t) => t.mul[*x as usize * *q as usize + *y as usize],
                    None => ext_mul(*p, *k, modulus, *x, *y),
                })
            }
            (Kind::Rational, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            (Kind::RationalExt { modulus }, Scalar::RationalExt(x), Scalar::RationalExt(y)) => {
                Scalar::RationalExt(Self::rext_mul(modulus, x, y))
            }
            _ => panic!("scalars {a:?}, {b:?} do not belong to {self}"),
        }
    }

    pub fn pow(&self, a: &Scalar, mut e: u64) -> Scalar {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        if self.is_zero(a) {
            return Err(Error::ZeroInverse);
        }
        Ok(match (&self.0.kind, a) {
            (Kind::Prime { p }, Scalar::Finite(x)) => {
                Scalar::Finite(pow_mod(*x as u64, p - 2, *p) as u32)
            }
            (Kind::Extension { q, .. }, _) => self.pow(a, q - 2),
            (Kind::Rational, Scalar::Rational(x)) => Scalar::Rational(x.recip()),
            (Kind::RationalExt { modulus }, Scalar::RationalExt(x)) => {
                // x * conj(x) = a^2 - a b m1 + b^2 m0
                let (a0, a1) = (&x[0], &x[1]);
                let norm = a0 * a0 - a0 * a1 * &modulus[1] + a1 * a1 * &modulus[0];
                let conj = [a0 - a1 * &modulus[1], -a1];
                Scalar::RationalExt(conj.iter().map(|c| c / &norm).collect())
            }
            _ => panic!("scalar {a:?} does not belong to {self}"),
        })
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Finite(x) => *x == 0,
            Scalar::Rational(x) => x.is_zero(),
            Scalar::RationalExt(x) => x.iter().all(Zero::is_zero),
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        *a == self.one()
    }

    /// The `i`-th element in index order (finite fields only).
    pub fn element(&self, i: u64) -> Scalar {
        debug_assert!(self.order().is_some_and(|q| i < q));
        Scalar::Finite(i as u32)
    }

    /// Position of a finite-field element in index order.
    pub fn index_of(&self, a: &Scalar) -> u64 {
        match a {
            Scalar::Finite(x) => *x as u64,
            _ => panic!("index_of on an infinite field"),
        }
    }

    /// All elements in index order; empty for infinite fields.
    pub fn elements(&self) -> impl Iterator<Item = Scalar> + '_ {
        (0..self.order().unwrap_or(0)).map(|i| self.element(i))
    }

    /// Whether `a` is a square in the field. `None` for rational extensions.
    pub fn is_square(&self, a: &Scalar) -> Option<bool> {
        match (&self.0.kind, a) {
            (Kind::Rational, Scalar::Rational(x)) => Some(rational_is_square(x)),
            (Kind::RationalExt { .. }, _) => None,
            _ => Some(self.elements().any(|x| self.mul(&x, &x) == *a)),
        }
    }

    /// A square root of `a` inside the field, if one exists.
    pub fn sqrt(&self, a: &Scalar) -> Option<Scalar> {
        match (&self.0.kind, a) {
            (Kind::Rational, Scalar::Rational(x)) => rational_sqrt(x).map(Scalar::Rational),
            (Kind::RationalExt { .. }, _) => None,
            _ => self.elements().find(|x| self.mul(x, x) == *a),
        }
    }

    /// Human-readable form of a scalar.
    pub fn format(&self, a: &Scalar) -> String {
        match a {
            Scalar::Finite(x) if self.degree() == 1 => x.to_string(),
            Scalar::Rational(x) => x.to_string(),
            _ => {
                let c = self.coefficients(a);
                let terms: Vec<String> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(i, v)| match i {
                        0 => v.to_string(),
                        1 => format!("{v}t"),
                        _ => format!("{v}t^{i}"),
                    })
                    .collect();
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join("+")
                }
            }
        }
    }

    /// Table-backed `u32` arithmetic for scan loops; `None` for infinite fields.
    pub(crate) fn finite_arith(&self) -> Option<FiniteArith<'_>> {
        match &self.0.kind {
            Kind::Prime { p } => Some(FiniteArith::Prime(*p)),
            Kind::Extension { .. } => Some(FiniteArith::Ext(self)),
            _ => None,
        }
    }
}

/// Raw arithmetic on packed finite-field elements.
#[derive(Clone, Copy)]
pub(crate) enum FiniteArith<'a> {
    Prime(u64),
    Ext(&'a Field),
}

impl FiniteArith<'_> {
    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        match self {
            FiniteArith::Prime(p) => ((a as u64 + b as u64) % p) as u32,
            FiniteArith::Ext(f) => match f.add(&Scalar::Finite(a), &Scalar::Finite(b)) {
                Scalar::Finite(x) => x,
                _ => unreachable!(),
            },
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        match self {
            FiniteArith::Prime(p) => (a as u64 * b as u64 % p) as u32,
            FiniteArith::Ext(f) => match f.mul(&Scalar::Finite(a), &Scalar::Finite(b)) {
                Scalar::Finite(x) => x,
                _ => unreachable!(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn inverse_in_f5() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.inv(&f.from_int(4)).unwrap(), f.from_int(4));
    }

    #[test]
    fn inverse_of_rational() {
        let q = Field::rationals();
        let x = Scalar::Rational(rat(2, 3));
        assert_eq!(q.inv(&x).unwrap(), Scalar::Rational(rat(3, 2)));
    }

    #[test]
    fn inverse_in_gf4() {
        let f = Field::extension(2, &[1, 1, 1]).unwrap();
        let t = f.generator().unwrap();
        let inv = f.inv(&t).unwrap();
        // t^2 = t + 1, so t(t + 1) = 1
        let t_plus_1 = f.add(&t, &f.one());
        assert_eq!(inv, t_plus_1);
        assert!(f.is_one(&f.mul(&t, &inv)));
    }

    #[test]
    fn zero_has_no_inverse() {
        for f in [Field::prime(7).unwrap(), Field::rationals()] {
            assert!(matches!(f.inv(&f.zero()), Err(Error::ZeroInverse)));
        }
    }

    #[test]
    fn rejects_reducible_modulus() {
        // t^2 + 1 = (t + 1)^2 over F_2
        assert!(Field::extension(2, &[1, 0, 1]).is_err());
        // t^2 - 4 over F_5 has roots
        assert!(Field::extension(5, &[1, 0, 1]).is_err());
        // t^4 + t^2 + 1 = (t^2 + t + 1)^2 over F_2: no roots, still reducible
        assert!(Field::extension(2, &[1, 0, 1, 0, 1]).is_err());
        assert!(Field::extension(2, &[1, 1, 0, 0, 1]).is_ok());
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert!(Field::prime(4).is_err());
        assert!(Field::prime(1).is_err());
    }

    #[test]
    fn rational_extension_requires_nonsquare() {
        assert!(Field::rational_extension(vec![rat(-4, 1), rat(0, 1), rat(1, 1)]).is_err());
        let l = Field::rational_extension(vec![rat(-2, 1), rat(0, 1), rat(1, 1)]).unwrap();
        let t = l.generator().unwrap();
        assert_eq!(l.mul(&t, &t), l.from_int(2));
        let x = l.add(&t, &l.from_int(3));
        let y = l.inv(&x).unwrap();
        assert!(l.is_one(&l.mul(&x, &y)));
    }

    #[test]
    fn extension_arithmetic_without_tables_matches_tables() {
        // GF(3^5) is too large; compare a degree-4 field above the table limit
        // against direct reduction.
        let big = Field::extension(5, &[2, 0, 0, 0, 1]);
        // t^4 + 2 over F_5: check irreducibility decision is consistent
        if let Ok(f) = big {
            let t = f.generator().unwrap();
            let t4 = f.pow(&t, 4);
            assert_eq!(t4, f.from_int(-2));
        }
        let small = Field::extension(3, &[1, 2, 0, 1]).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                let Scalar::Finite(x) = a else { unreachable!() };
                let Scalar::Finite(y) = b else { unreachable!() };
                assert_eq!(small.mul(&a, &b), Scalar::Finite(ext_mul(3, 3, &[1, 2, 0, 1], x, y)));
                assert_eq!(small.add(&a, &b), Scalar::Finite(ext_add(3, 3, x, y)));
            }
        }
    }

    #[test]
    fn squares() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.is_square(&f.from_int(4)), Some(true));
        assert_eq!(f.is_square(&f.from_int(2)), Some(false));
        let q = Field::rationals();
        assert_eq!(q.is_square(&Scalar::Rational(rat(9, 4))), Some(true));
        assert_eq!(q.is_square(&Scalar::Rational(rat(2, 1))), Some(false));
    }

    #[test]
    fn field_axioms_on_all_fixture_fields() {
        let fields = [
            Field::prime(2).unwrap(),
            Field::prime(3).unwrap(),
            Field::prime(5).unwrap(),
            Field::prime(7).unwrap(),
            Field::extension(2, &[1, 1, 1]).unwrap(),
            Field::extension(5, &[3, 0, 1]).unwrap(),
        ];
        for f in &fields {
            let els: Vec<Scalar> = f.elements().collect();
            for a in &els {
                for b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in els.iter().step_by(3) {
                        assert_eq!(f.mul(a, &f.add(b, c)), f.add(&f.mul(a, b), &f.mul(a, c)));
                        assert_eq!(f.mul(&f.mul(a, b), c), f.mul(a, &f.mul(b, c)));
                        assert_eq!(f.add(&f.add(a, b), c), f.add(a, &f.add(b, c)));
                    }
                }
                if !f.is_zero(a) {
                    assert!(f.is_one(&f.mul(a, &f.inv(a).unwrap())));
                }
                assert!(f.is_zero(&f.add(a, &f.neg(a))));
            }
        }
    }
}
