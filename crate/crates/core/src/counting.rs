//! Upper and lower bound formulas, sampled counting of distinct labelings,
//! and an exact enumerator for one-dimensional order-type families.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::framework::{Configuration, EdgeLabeling, Family, FrameworkError};
use crate::poly::{rat, Point, Polynomial, Rat};
use crate::sampling::{random_point, rng_stream, SampleBox, SamplingError, SamplingOptions};

#[derive(Debug, Error)]
pub enum CountingError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("distinct count {distinct} exceeds the Warren bound {bound}")]
    BoundViolated { distinct: String, bound: String },
    #[error("family {0} is not determined by the order type of its scalar parameters")]
    NotOrderType(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Framework(#[from] FrameworkError),
}

fn big(n: usize) -> BigUint {
    BigUint::from(n)
}

/// `ceil((24 D l / m)^m)`, an integer relaxation of the `(8e D l / m)^m`
/// sign-pattern bound.
pub fn sign_pattern_bound(l: usize, m: usize, degree: usize) -> Result<BigUint, CountingError> {
    if m == 0 || degree == 0 || l < m {
        return Err(CountingError::Precondition(format!(
            "need l >= m >= 1 and D >= 1, got l={l}, m={m}, D={degree}"
        )));
    }
    let num = (big(24) * big(degree) * big(l)).pow(m as u32);
    let den = big(m).pow(m as u32);
    Ok(num.div_ceil(&den))
}

/// `(12 D k n)^(d n)` together with whether `C(n,2) k >= d n` holds. The
/// bound is only proven under that condition; the value is still returned
/// so small cases can be tabulated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WarrenBound {
    #[serde(serialize_with = "ser_big")]
    pub value: BigUint,
    pub precondition_holds: bool,
}

pub fn warren_bound(n: usize, d: usize, k: usize, degree: usize) -> Result<WarrenBound, CountingError> {
    if n == 0 || d == 0 || k == 0 || degree == 0 {
        return Err(CountingError::Precondition(format!(
            "n, d, k, D must be positive, got n={n}, d={d}, k={k}, D={degree}"
        )));
    }
    let value = (big(12) * big(degree) * big(k) * big(n)).pow((d * n) as u32);
    let l = n * (n - 1) / 2 * k;
    Ok(WarrenBound {
        value,
        precondition_holds: l >= d * n,
    })
}

/// Like [`warren_bound`] but fails unless `C(n,2) k >= d n`.
pub fn warren_bound_strict(n: usize, d: usize, k: usize, degree: usize) -> Result<BigUint, CountingError> {
    let w = warren_bound(n, d, k, degree)?;
    if !w.precondition_holds {
        return Err(CountingError::Precondition(format!(
            "C(n,2)*k = {} < d*n = {}",
            n * (n - 1) / 2 * k,
            d * n
        )));
    }
    Ok(w.value)
}

/// `m^(d (n - d m))`, valid for `1 <= m < n/d`.
pub fn lower_bound_formula(n: usize, m: usize, d: usize) -> Result<BigUint, CountingError> {
    if d == 0 || m == 0 || m * d >= n {
        return Err(CountingError::Precondition(format!("need 1 <= m < n/d, got n={n}, m={m}, d={d}")));
    }
    Ok(big(m).pow((d * (n - d * m)) as u32))
}

/// Largest `m^(d (n - d m))` over admissible `m`.
pub fn best_lower_bound(n: usize, d: usize) -> Option<(usize, BigUint)> {
    (1..)
        .take_while(|m| m * d < n)
        .map(|m| (m, lower_bound_formula(n, m, d).expect("m in range")))
        .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)))
}

/// `n` as u64 LE, then each label over pairs in lexicographic order as u16 LE.
pub fn canonical_bytes(l: &EdgeLabeling) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 2 * l.labels().len());
    out.extend_from_slice(&(l.n() as u64).to_le_bytes());
    for &x in l.labels() {
        let x = u16::try_from(x).expect("label index fits in u16");
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_big_opt<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub family: String,
    pub n: usize,
    pub trials: usize,
    pub strong_only: bool,
    #[serde(serialize_with = "ser_big")]
    pub distinct_count: BigUint,
    /// Trials that produced a kept labeling.
    pub kept: usize,
    /// No new labeling appeared in the final 20% of trials.
    pub saturated: bool,
    #[serde(serialize_with = "ser_big")]
    pub warren_value: BigUint,
    pub warren_precondition: bool,
    #[serde(serialize_with = "ser_big_opt")]
    pub lower_value: Option<BigUint>,
}

/// Distinct labelings found by sampling, keyed by canonical bytes and
/// mapped to the first trial index producing them.
#[derive(Debug, Clone, Default)]
pub struct SampleSet {
    pub first_seen: HashMap<Vec<u8>, usize>,
    pub kept: usize,
}

impl SampleSet {
    fn merge(mut self, other: SampleSet) -> SampleSet {
        for (k, t) in other.first_seen {
            self.first_seen.entry(k).and_modify(|e| *e = (*e).min(t)).or_insert(t);
        }
        self.kept += other.kept;
        self
    }
}

/// Labeling of one sampled configuration, or `None` if it was discarded.
pub fn sample_trial(
    fam: &Family,
    n: usize,
    seed: u64,
    trial: usize,
    bx: &SampleBox,
    strong_only: bool,
    opts: SamplingOptions,
) -> Result<Option<EdgeLabeling>, CountingError> {
    let mut rng = rng_stream(seed, &[trial as u64]);
    let points = (0..n)
        .map(|_| random_point(&fam.domain, &mut rng, bx, opts))
        .collect::<Result<Vec<Point>, _>>()?;
    let cfg = Configuration::new(points);
    if strong_only && !fam.strong_check(&cfg)? {
        return Ok(None);
    }
    Ok(Some(fam.label_configuration(&cfg)?))
}

/// Runs `trials` independent trials in parallel. Each trial has its own
/// RNG stream, and merging keeps minimal trial indices, so the result does
/// not depend on the number of workers.
pub fn sample_labelings(
    fam: &Family,
    n: usize,
    trials: usize,
    seed: u64,
    bx: &SampleBox,
    strong_only: bool,
    opts: SamplingOptions,
) -> Result<SampleSet, CountingError> {
    (0..trials)
        .into_par_iter()
        .try_fold(SampleSet::default, |mut acc, t| {
            if let Some(l) = sample_trial(fam, n, seed, t, bx, strong_only, opts)? {
                acc.first_seen.entry(canonical_bytes(&l)).and_modify(|e| *e = (*e).min(t)).or_insert(t);
                acc.kept += 1;
            }
            Ok::<_, CountingError>(acc)
        })
        .try_reduce(SampleSet::default, |a, b| Ok(a.merge(b)))
}

pub fn sample_count(
    fam: &Family,
    n: usize,
    trials: usize,
    seed: u64,
    bx: &SampleBox,
    strong_only: bool,
    opts: SamplingOptions,
) -> Result<CountReport, CountingError> {
    if trials == 0 || n == 0 {
        return Err(CountingError::Precondition("need trials >= 1 and n >= 1".into()));
    }
    let set = sample_labelings(fam, n, trials, seed, bx, strong_only, opts)?;
    let window_start = trials - trials / 5;
    let saturated = set.first_seen.values().all(|&t| t < window_start);
    let w = warren_bound(n, fam.d, fam.k(), fam.max_degree().max(1) as usize)?;
    let distinct = big(set.first_seen.len());
    if w.precondition_holds && distinct > w.value {
        return Err(CountingError::BoundViolated {
            distinct: distinct.to_string(),
            bound: w.value.to_string(),
        });
    }
    Ok(CountReport {
        family: fam.name.clone(),
        n,
        trials,
        strong_only,
        distinct_count: distinct,
        kept: set.kept,
        saturated,
        warren_value: w.value,
        warren_precondition: w.precondition_holds,
        lower_value: best_lower_bound(n, fam.d).map(|x| x.1),
    })
}

/// `(c, u, v)` with `p = c (x_u - x_v)`, if `p` has that shape.
fn as_difference(p: &Polynomial) -> Option<(Rat, usize, usize)> {
    if p.num_terms() != 2 {
        return None;
    }
    let mut pos = None;
    let mut neg = None;
    for (e, c) in p.terms() {
        if e.iter().sum::<u32>() != 1 {
            return None;
        }
        let var = e.iter().position(|&x| x == 1)?;
        if c.is_positive() {
            pos = Some((c.clone(), var));
        } else {
            neg = Some((c.clone(), var));
        }
    }
    let ((c, u), (c2, v)) = (pos?, neg?);
    (c == -c2).then_some((c, u, v))
}

/// True when every predicate and domain polynomial is `c (x_u - x_v)`, so
/// labels and membership depend only on the weak order of the scalars.
pub fn is_order_type_family(fam: &Family) -> bool {
    fam.preds.iter().all(|p| p.degree() == 1 && as_difference(p.polynomial()).is_some())
        && fam.domain.polys.iter().all(|q| as_difference(q).is_some())
}

/// Calls `f` with the rank vector of every weak order on `len` items.
fn for_each_weak_order(len: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(remaining: u32, rank: usize, ranks: &mut [usize], f: &mut dyn FnMut(&[usize])) {
        if remaining == 0 {
            f(ranks);
            return;
        }
        let mut sub = remaining;
        while sub != 0 {
            for (i, r) in ranks.iter_mut().enumerate() {
                if sub >> i & 1 == 1 {
                    *r = rank;
                }
            }
            rec(remaining & !sub, rank + 1, ranks, f);
            sub = (sub - 1) & remaining;
        }
    }
    assert!(len < 32, "too many scalars to enumerate");
    let mut ranks = vec![0; len];
    rec((1u32 << len) - 1, 0, &mut ranks, f);
}

/// Exact number of representable labelings on `n` vertices for a family
/// whose labels depend only on the order type of the scalar parameters.
/// Enumerates every weak order of the `d n` scalars.
pub fn brute_force_count_1d(fam: &Family, n: usize, strong_only: bool) -> Result<BigUint, CountingError> {
    if !is_order_type_family(fam) {
        return Err(CountingError::NotOrderType(fam.name.clone()));
    }
    let len = fam.d * n;
    if len > 12 {
        return Err(CountingError::Precondition(format!("{len} scalars is too many to enumerate")));
    }
    let mut seen = std::collections::HashSet::new();
    let mut err = None;
    for_each_weak_order(len, &mut |ranks| {
        if err.is_some() {
            return;
        }
        let points: Vec<Point> = (0..n).map(|v| ranks[v * fam.d..(v + 1) * fam.d].iter().map(|&r| rat(r as i64)).collect()).collect();
        let cfg = Configuration::new(points);
        let res = (|| -> Result<Option<EdgeLabeling>, FrameworkError> {
            for p in &cfg.points {
                if !fam.contains(p)? {
                    return Ok(None);
                }
            }
            if strong_only && !fam.strong_check(&cfg)? {
                return Ok(None);
            }
            Ok(Some(fam.label_configuration(&cfg)?))
        })();
        match res {
            Ok(Some(l)) => {
                seen.insert(canonical_bytes(&l));
            }
            Ok(None) => {}
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(big(seen.len()))
}

/// `log_n(count) / n`, the empirical exponent constant.
pub fn exponent_estimate(count: &BigUint, n: usize) -> Option<f64> {
    if n < 2 || count.is_zero() {
        return None;
    }
    let bits = count.bits() as f64;
    let lead = count.to_f64().filter(|x| x.is_finite()).map(f64::log2).unwrap_or(bits);
    Some(lead / (n as f64).log2() / n as f64)
}
