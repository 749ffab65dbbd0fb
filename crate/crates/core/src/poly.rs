//! Exact sparse multivariate polynomials over the rationals.
//!
//! Every sign decision in the crate goes through this module. Coefficients
//! and evaluation points are [`Rat`] values; evaluation clears denominators
//! first and works over big integers, so the result is exact and a single
//! normalization happens at the end.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational scalar. Always in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// A point of `R^n` with exact coordinates.
pub type Point = Vec<Rat>;

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot parse rational {0:?}")]
    ParseRat(String),
    #[error("exponent vector of length {got} in a polynomial of {expected} variables")]
    BadExponents { expected: usize, got: usize },
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Convenience for building points from small integers.
pub fn point(coords: &[i64]) -> Point {
    coords.iter().map(|&c| rat(c)).collect()
}

/// Canonical `num/den` rendering. The denominator is always written, so the
/// string round-trips bit-exactly.
pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer. Decimal notation is rejected.
pub fn parse_rat(s: &str) -> Result<Rat, PolyError> {
    let err = || PolyError::ParseRat(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Rat::new(n, d))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: fall back to a scaled division.
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = (n.max(d) - 900).max(0) as usize;
        let nn = (r.numer() >> shift).to_f64().unwrap_or(0.0);
        let dd = (r.denom() >> shift).to_f64().unwrap_or(1.0);
        nn / dd
    })
}

/// Exact dyadic approximation `round(x * 2^bits) / 2^bits` of a float.
pub fn dyadic_from_f64(x: f64, bits: u32) -> Rat {
    let scaled = (x * (1u64 << bits) as f64).round();
    Rat::new(
        BigInt::from(scaled as i64),
        BigInt::one() << bits as usize,
    )
}

/// Sign of a real number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
    Zero,
}

impl Sign {
    pub const ALL: [Sign; 3] = [Sign::Plus, Sign::Minus, Sign::Zero];

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
            Sign::Zero => '0',
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            '0' => Some(Sign::Zero),
            _ => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
        }
    }

    /// Index in base-3 digit order used by sign-vector tables.
    pub fn digit(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
            Sign::Zero => 2,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

pub fn sign_of(v: &Rat) -> Sign {
    if v.is_positive() {
        Sign::Plus
    } else if v.is_negative() {
        Sign::Minus
    } else {
        Sign::Zero
    }
}

pub fn signs_to_string(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.as_char()).collect()
}

pub fn parse_signs(s: &str) -> Option<Vec<Sign>> {
    s.chars().map(Sign::from_char).collect()
}

/// Dense univariate polynomial, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn eval(&self, t: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + rat_to_f64(c))
    }

    fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return UniPoly::new(Vec::new());
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by dense exponent vectors, so
/// iteration and serialization order are deterministic. A cached integer
/// form (numerators over a common denominator) backs [`Polynomial::eval`].
#[derive(Clone)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Exponents, Rat>,
    int_terms: Vec<(Exponents, BigInt)>,
    common_denom: BigInt,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.num_vars, self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*v{}", i)?,
                    _ => write!(f, "*v{}^{}", i, e)?,
                }
            }
        }
        Ok(())
    }
}

impl Polynomial {
    /// Builds a polynomial, merging duplicate exponent vectors and dropping
    /// zero coefficients.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Exponents, Rat)>,
    {
        let mut map: BTreeMap<Exponents, Rat> = BTreeMap::new();
        for (exps, c) in terms {
            if exps.len() != num_vars {
                return Err(PolyError::BadExponents {
                    expected: num_vars,
                    got: exps.len(),
                });
            }
            *map.entry(exps).or_insert_with(Rat::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self::from_map(num_vars, map))
    }

    fn from_map(num_vars: usize, terms: BTreeMap<Exponents, Rat>) -> Self {
        let common_denom = terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let int_terms = terms
            .iter()
            .map(|(e, c)| (e.clone(), c.numer() * (&common_denom / c.denom())))
            .collect();
        Polynomial {
            num_vars,
            terms,
            int_terms,
            common_denom,
        }
    }

    pub fn zero(num_vars: usize) -> Self {
        Self::from_map(num_vars, BTreeMap::new())
    }

    pub fn constant(num_vars: usize, c: Rat) -> Self {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(vec![0; num_vars], c);
        }
        Self::from_map(num_vars, map)
    }

    /// The coordinate function `v_index`.
    pub fn var(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars, "variable index out of range");
        let mut e = vec![0; num_vars];
        e[index] = 1;
        let mut map = BTreeMap::new();
        map.insert(e, Rat::one());
        Self::from_map(num_vars, map)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    /// Maximum total degree over terms; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Maximum exponent of one variable; 0 if it does not occur.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        let map = self
            .terms
            .iter()
            .map(|(e, v)| (e.clone(), v * c))
            .collect();
        Self::from_map(self.num_vars, map)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.num_vars, Rat::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn check_dims(&self, len: usize) -> Result<(), PolyError> {
        if len != self.num_vars {
            return Err(PolyError::DimensionMismatch {
                expected: self.num_vars,
                got: len,
            });
        }
        Ok(())
    }

    /// Exact value at `point`.
    pub fn eval(&self, point: &[Rat]) -> Result<Rat, PolyError> {
        self.check_dims(point.len())?;
        if self.terms.is_empty() {
            return Ok(Rat::zero());
        }
        // x_i = n_i / D with D the lcm of the point's denominators.
        let denom = point.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let nums: Vec<BigInt> = point
            .iter()
            .map(|x| x.numer() * (&denom / x.denom()))
            .collect();
        let deg = self.degree().unwrap_or(0) as usize;
        let max_exp: Vec<u32> = (0..self.num_vars).map(|i| self.degree_in(i)).collect();
        let powers: Vec<Vec<BigInt>> = nums
            .iter()
            .zip(&max_exp)
            .map(|(n, &m)| power_table(n, m as usize))
            .collect();
        let dpow = power_table(&denom, deg);
        let mut acc = BigInt::zero();
        for (exps, k) in &self.int_terms {
            let mut term = k.clone();
            let mut total = 0usize;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term *= &powers[i][e as usize];
                    total += e as usize;
                }
            }
            if total < deg {
                term *= &dpow[deg - total];
            }
            acc += term;
        }
        Ok(Rat::new(acc, &self.common_denom * &dpow[deg]))
    }

    /// Floating-point evaluation, used only by search heuristics.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.num_vars);
        self.terms
            .iter()
            .map(|(exps, c)| {
                exps.iter()
                    .enumerate()
                    .fold(rat_to_f64(c), |acc, (i, &e)| acc * point[i].powi(e as i32))
            })
            .sum()
    }

    pub fn partial_derivative(&self, var: usize) -> Self {
        let mut map = BTreeMap::new();
        for (exps, c) in &self.terms {
            let e = exps[var];
            if e == 0 {
                continue;
            }
            let mut ne = exps.clone();
            ne[var] -= 1;
            map.insert(ne, c * rat(e as i64));
        }
        Self::from_map(self.num_vars, map)
    }

    /// Full gradient at a point.
    pub fn gradient(&self, point: &[Rat]) -> Result<Vec<Rat>, PolyError> {
        self.check_dims(point.len())?;
        (0..self.num_vars)
            .map(|i| self.partial_derivative(i).eval(point))
            .collect()
    }

    /// Gradient at `(a, b)` split into the x-block and the y-block.
    pub fn gradient_split(&self, a: &[Rat], b: &[Rat]) -> Result<(Vec<Rat>, Vec<Rat>), PolyError> {
        self.check_dims(a.len() + b.len())?;
        let joint: Vec<Rat> = a.iter().chain(b).cloned().collect();
        let mut g = self.gradient(&joint)?;
        let gb = g.split_off(a.len());
        Ok((g, gb))
    }

    /// Substitutes `values` for the leading variables and returns a
    /// polynomial in the remaining ones.
    pub fn fix_prefix(&self, values: &[Rat]) -> Result<Self, PolyError> {
        if values.len() > self.num_vars {
            return Err(PolyError::DimensionMismatch {
                expected: self.num_vars,
                got: values.len(),
            });
        }
        let k = values.len();
        let rest = self.num_vars - k;
        let mut map: BTreeMap<Exponents, Rat> = BTreeMap::new();
        for (exps, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in exps[..k].iter().enumerate() {
                if e > 0 {
                    v *= num_traits::pow(values[i].clone(), e as usize);
                }
            }
            *map.entry(exps[k..].to_vec()).or_insert_with(Rat::zero) += v;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self::from_map(rest, map))
    }

    /// Substitutes constants for an arbitrary subset of variables, keeping
    /// the variable count (substituted variables simply stop occurring).
    pub fn substitute(&self, values: &[(usize, Rat)]) -> Self {
        let mut map: BTreeMap<Exponents, Rat> = BTreeMap::new();
        for (exps, c) in &self.terms {
            let mut v = c.clone();
            let mut ne = exps.clone();
            for (idx, val) in values {
                let e = ne[*idx];
                if e > 0 {
                    v *= num_traits::pow(val.clone(), e as usize);
                    ne[*idx] = 0;
                }
            }
            *map.entry(ne).or_insert_with(Rat::zero) += v;
        }
        map.retain(|_, c| !c.is_zero());
        Self::from_map(self.num_vars, map)
    }

    /// Drops variables that must not occur, renumbering the rest.
    pub fn remove_vars(&self, drop: &[usize]) -> Result<Self, PolyError> {
        let keep: Vec<usize> = (0..self.num_vars).filter(|i| !drop.contains(i)).collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (exps, c) in &self.terms {
            if drop.iter().any(|&i| exps[i] != 0) {
                return Err(PolyError::BadExponents {
                    expected: keep.len(),
                    got: self.num_vars,
                });
            }
            terms.push((keep.iter().map(|&i| exps[i]).collect(), c.clone()));
        }
        Self::from_terms(keep.len(), terms)
    }

    /// Restriction to the line `base + t * dir` as a univariate polynomial in `t`.
    pub fn restrict_to_line(&self, base: &[Rat], dir: &[Rat]) -> Result<UniPoly, PolyError> {
        self.check_dims(base.len())?;
        self.check_dims(dir.len())?;
        let lines: Vec<UniPoly> = base
            .iter()
            .zip(dir)
            .map(|(p, w)| UniPoly::new(vec![p.clone(), w.clone()]))
            .collect();
        let tables: Vec<Vec<UniPoly>> = lines
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let mut t = vec![UniPoly::new(vec![Rat::one()])];
                for _ in 0..self.degree_in(i) {
                    let next = t.last().unwrap().mul(l);
                    t.push(next);
                }
                t
            })
            .collect();
        let deg = self.degree().unwrap_or(0) as usize;
        let mut out = vec![Rat::zero(); deg + 1];
        for (exps, c) in &self.terms {
            let mut term = UniPoly::new(vec![c.clone()]);
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&tables[i][e as usize]);
                }
            }
            for (k, v) in term.coeffs.into_iter().enumerate() {
                out[k] += v;
            }
        }
        Ok(UniPoly::new(out))
    }

    /// Taylor re-expansion at `center`: returns `Q` with `Q(h) = P(center + h)`.
    pub fn shift(&self, center: &[Rat]) -> Result<Self, PolyError> {
        self.check_dims(center.len())?;
        let n = self.num_vars;
        let mut acc: HashMap<Exponents, Rat> = HashMap::new();
        for (exps, c) in &self.terms {
            // Expand prod_i (center_i + h_i)^{e_i} by the binomial theorem.
            let mut partial: Vec<(Exponents, Rat)> = vec![(vec![0; n], c.clone())];
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for (pe, pc) in &partial {
                    for k in 0..=e {
                        let coef = binomial(e, k)
                            * num_traits::pow(center[i].clone(), (e - k) as usize);
                        if coef.is_zero() {
                            continue;
                        }
                        let mut ne = pe.clone();
                        ne[i] = k;
                        next.push((ne, pc * coef));
                    }
                }
                partial = next;
            }
            for (e, v) in partial {
                *acc.entry(e).or_insert_with(Rat::zero) += v;
            }
        }
        Self::from_terms(n, acc)
    }

    /// Serializable term list.
    pub fn to_term_list(&self) -> TermList {
        TermList(
            self.terms
                .iter()
                .map(|(e, c)| SerTerm {
                    exponents: e.clone(),
                    coeff: rat_to_string(c),
                })
                .collect(),
        )
    }

    pub fn from_term_list(num_vars: usize, list: &TermList) -> Result<Self, PolyError> {
        let mut terms = Vec::with_capacity(list.0.len());
        for t in &list.0 {
            terms.push((t.exponents.clone(), parse_rat(&t.coeff)?));
        }
        Self::from_terms(num_vars, terms)
    }
}

fn power_table(base: &BigInt, max: usize) -> Vec<BigInt> {
    let mut t = Vec::with_capacity(max + 1);
    t.push(BigInt::one());
    for i in 0..max {
        let next = &t[i] * base;
        t.push(next);
    }
    t
}

fn binomial(n: u32, k: u32) -> Rat {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rat::from_integer(r)
}

/// One serialized term: `{"exponents": [...], "coeff": "num/den"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerTerm {
    pub exponents: Vec<u32>,
    pub coeff: String,
}

/// Serialized polynomial: a plain list of terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TermList(pub Vec<SerTerm>);

fn merge(a: &Polynomial, b: &Polynomial, negate_b: bool) -> Polynomial {
    assert_eq!(a.num_vars, b.num_vars, "polynomials over different variable counts");
    let mut map = a.terms.clone();
    for (e, c) in &b.terms {
        let entry = map.entry(e.clone()).or_insert_with(Rat::zero);
        if negate_b {
            *entry -= c;
        } else {
            *entry += c;
        }
    }
    map.retain(|_, c| !c.is_zero());
    Polynomial::from_map(a.num_vars, map)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        merge(self, rhs, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        merge(self, rhs, true)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&rat(-1))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, rhs.num_vars, "polynomials over different variable counts");
        // Multiply integer numerators, divide by the product of the common
        // denominators once at the end.
        let mut acc: HashMap<Exponents, BigInt> =
            HashMap::with_capacity(self.int_terms.len().max(rhs.int_terms.len()));
        let mut key = vec![0u32; self.num_vars];
        for (ea, ka) in &self.int_terms {
            for (eb, kb) in &rhs.int_terms {
                for i in 0..key.len() {
                    key[i] = ea[i] + eb[i];
                }
                let prod = ka * kb;
                match acc.get_mut(&key) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(key.clone(), prod);
                    }
                }
            }
        }
        let denom = &self.common_denom * &rhs.common_denom;
        let map: BTreeMap<Exponents, Rat> = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(e, v)| (e, Rat::new(v, denom.clone())))
            .collect();
        Polynomial::from_map(self.num_vars, map)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
