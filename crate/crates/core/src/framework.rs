//! Families of sign-defined edge labelings and the operations on them.
//!
//! A family is `(labels, d, P_1..P_k, phi, U)`: points of `U ⊆ R^d`, pair
//! predicates `P_s` in `2d` variables, and a table `phi` from sign vectors to
//! labels. The label of the pair `i < j` in a configuration is
//! `phi(sgn P_1(a_i, a_j), ..., sgn P_k(a_i, a_j))` for the ordered pair.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{sign_of, signs_to_string, Point, PolyError, Polynomial, Rat, Sign};
use crate::sampling::SampleBox;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameworkError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("point {index} lies outside the family's domain")]
    OutsideDomain { index: usize },
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("the two points coincide")]
    SamePoint,
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
}

/// Ordered list of distinct label names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelSet {
    labels: Vec<String>,
}

impl LabelSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, FrameworkError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(FrameworkError::InvalidFamily("empty label set".into()));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(FrameworkError::InvalidFamily("duplicate label names".into()));
        }
        Ok(LabelSet { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn names(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, name: &str) -> Result<usize, FrameworkError> {
        self.labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| FrameworkError::UnknownLabel(name.to_string()))
    }
}

/// Index of a sign vector in base-3 digit order, first sign most significant.
pub fn sign_vector_index(signs: &[Sign]) -> usize {
    signs.iter().fold(0, |acc, s| acc * 3 + s.digit())
}

/// Inverse of [`sign_vector_index`].
pub fn sign_vector_from_index(mut index: usize, k: usize) -> Vec<Sign> {
    let mut out = vec![Sign::Plus; k];
    for slot in out.iter_mut().rev() {
        *slot = Sign::ALL[index % 3];
        index /= 3;
    }
    out
}

/// Total function from `{+,-,0}^k` to label indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiTable {
    k: usize,
    table: Vec<usize>,
    defaulted: Vec<bool>,
}

impl PhiTable {
    pub fn from_fn(k: usize, mut f: impl FnMut(&[Sign]) -> usize) -> Self {
        let size = 3usize.pow(k as u32);
        let table = (0..size).map(|i| f(&sign_vector_from_index(i, k))).collect();
        PhiTable {
            k,
            table,
            defaulted: vec![false; size],
        }
    }

    /// Completes a partial table; entries not listed take `default` and are
    /// recorded as defaulted. Without a default every vector must be listed.
    pub fn from_entries(
        k: usize,
        entries: &BTreeMap<Vec<Sign>, usize>,
        default: Option<usize>,
    ) -> Result<Self, FrameworkError> {
        let size = 3usize.pow(k as u32);
        let mut table = Vec::with_capacity(size);
        let mut defaulted = Vec::with_capacity(size);
        for i in 0..size {
            let v = sign_vector_from_index(i, k);
            match (entries.get(&v), default) {
                (Some(&l), _) => {
                    table.push(l);
                    defaulted.push(false);
                }
                (None, Some(l)) => {
                    table.push(l);
                    defaulted.push(true);
                }
                (None, None) => {
                    return Err(FrameworkError::InvalidFamily(format!(
                        "phi has no entry for {} and no default",
                        signs_to_string(&v)
                    )))
                }
            }
        }
        if let Some(bad) = entries.keys().find(|v| v.len() != k) {
            return Err(FrameworkError::InvalidFamily(format!(
                "phi entry {} has length {}, expected {k}",
                signs_to_string(bad),
                bad.len()
            )));
        }
        Ok(PhiTable { k, table, defaulted })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, signs: &[Sign]) -> usize {
        debug_assert_eq!(signs.len(), self.k);
        self.table[sign_vector_index(signs)]
    }

    pub fn is_defaulted(&self, signs: &[Sign]) -> bool {
        self.defaulted[sign_vector_index(signs)]
    }

    /// All `(sign vector, label, defaulted)` rows in index order.
    pub fn rows(&self) -> impl Iterator<Item = (Vec<Sign>, usize, bool)> + '_ {
        (0..self.table.len())
            .map(move |i| (sign_vector_from_index(i, self.k), self.table[i], self.defaulted[i]))
    }

    pub fn max_label(&self) -> usize {
        self.table.iter().copied().max().unwrap_or(0)
    }
}

/// A set `U ⊆ R^d` given by polynomials `Q_1..Q_l` and accepted sign vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSpec {
    pub d: usize,
    pub polys: Vec<Polynomial>,
    pub accept: BTreeSet<Vec<Sign>>,
}

impl DomainSpec {
    pub fn new(d: usize, polys: Vec<Polynomial>, accept: BTreeSet<Vec<Sign>>) -> Result<Self, FrameworkError> {
        if let Some(p) = polys.iter().find(|p| p.num_vars() != d) {
            return Err(FrameworkError::InvalidFamily(format!(
                "domain polynomial in {} variables, expected {d}",
                p.num_vars()
            )));
        }
        if accept.iter().any(|v| v.len() != polys.len()) {
            return Err(FrameworkError::InvalidFamily(
                "accepted sign vector length differs from the number of domain polynomials".into(),
            ));
        }
        Ok(DomainSpec { d, polys, accept })
    }

    /// `U = R^d`: no polynomials, the empty sign vector accepted.
    pub fn whole_space(d: usize) -> Self {
        DomainSpec {
            d,
            polys: Vec::new(),
            accept: [Vec::new()].into_iter().collect(),
        }
    }

    /// `U = {Q_1 > 0, ..., Q_l > 0}`.
    pub fn all_positive(d: usize, polys: Vec<Polynomial>) -> Result<Self, FrameworkError> {
        let accept = [vec![Sign::Plus; polys.len()]].into_iter().collect();
        Self::new(d, polys, accept)
    }

    pub fn sign_vector(&self, p: &[Rat]) -> Result<Vec<Sign>, PolyError> {
        if p.len() != self.d {
            return Err(PolyError::DimensionMismatch {
                expected: self.d,
                got: p.len(),
            });
        }
        self.polys.iter().map(|q| q.eval(p).map(|v| sign_of(&v))).collect()
    }

    pub fn contains(&self, p: &[Rat]) -> Result<bool, PolyError> {
        Ok(self.accept.contains(&self.sign_vector(p)?))
    }
}

/// Membership of `p` in the domain.
pub fn membership(domain: &DomainSpec, p: &[Rat]) -> Result<bool, PolyError> {
    domain.contains(p)
}

/// Predicate given by a closed-form evaluator, with its expanded polynomial
/// built only on demand. Used where the expansion is very large.
pub struct KernelPredicate {
    pub name: &'static str,
    pub num_vars: usize,
    pub degree: u32,
    pub eval: fn(&[Rat]) -> Rat,
    pub expand: fn() -> &'static Polynomial,
}

/// One pair predicate `P_s`.
#[derive(Clone)]
pub enum Predicate {
    Poly(Arc<Polynomial>),
    Kernel(&'static KernelPredicate),
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Poly(p) => write!(f, "{p:?}"),
            Predicate::Kernel(k) => write!(f, "Kernel({}, vars={}, degree={})", k.name, k.num_vars, k.degree),
        }
    }
}

impl PartialEq for Predicate {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Predicate::Poly(a), Predicate::Poly(b)) => a == b,
            (Predicate::Kernel(a), Predicate::Kernel(b)) => std::ptr::eq(*a, *b),
            _ => false,
        }
    }
}

impl From<Polynomial> for Predicate {
    fn from(p: Polynomial) -> Self {
        Predicate::Poly(Arc::new(p))
    }
}

impl Predicate {
    pub fn num_vars(&self) -> usize {
        match self {
            Predicate::Poly(p) => p.num_vars(),
            Predicate::Kernel(k) => k.num_vars,
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            Predicate::Poly(p) => p.degree().unwrap_or(0),
            Predicate::Kernel(k) => k.degree,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Predicate::Poly(p) => p.is_zero(),
            Predicate::Kernel(_) => false,
        }
    }

    pub fn eval(&self, point: &[Rat]) -> Result<Rat, PolyError> {
        match self {
            Predicate::Poly(p) => p.eval(point),
            Predicate::Kernel(k) => {
                if point.len() != k.num_vars {
                    return Err(PolyError::DimensionMismatch {
                        expected: k.num_vars,
                        got: point.len(),
                    });
                }
                Ok((k.eval)(point))
            }
        }
    }

    /// The expanded polynomial. For kernel predicates this triggers (and
    /// caches) a possibly expensive symbolic expansion.
    pub fn polynomial(&self) -> &Polynomial {
        match self {
            Predicate::Poly(p) => p,
            Predicate::Kernel(k) => (k.expand)(),
        }
    }

    pub fn scaled(&self, c: &Rat) -> Predicate {
        Predicate::from(self.polynomial().scale(c))
    }
}

/// The tuple `(labels, d, P_1..P_k, phi, U)`.
#[derive(Debug, Clone)]
pub struct Family {
    pub name: String,
    pub d: usize,
    pub lambda: LabelSet,
    pub preds: Vec<Predicate>,
    pub phi: PhiTable,
    pub domain: DomainSpec,
    /// Known spanning-seed candidate; always re-certified before use.
    pub seed_hint: Option<SeedHint>,
}

/// Candidate `a*` and wall pairs `(b_i, s_i)` (0-based `s_i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedHint {
    pub a_star: Point,
    pub pairs: Vec<(Point, usize)>,
}

impl Family {
    pub fn new(
        name: impl Into<String>,
        d: usize,
        lambda: LabelSet,
        preds: Vec<Predicate>,
        phi: PhiTable,
        domain: DomainSpec,
    ) -> Result<Self, FrameworkError> {
        let name = name.into();
        if d == 0 {
            return Err(FrameworkError::InvalidFamily("d must be positive".into()));
        }
        if preds.is_empty() {
            return Err(FrameworkError::InvalidFamily("at least one predicate is required".into()));
        }
        for (s, p) in preds.iter().enumerate() {
            if p.num_vars() != 2 * d {
                return Err(FrameworkError::InvalidFamily(format!(
                    "predicate {} has {} variables, expected {}",
                    s + 1,
                    p.num_vars(),
                    2 * d
                )));
            }
            if p.is_zero() {
                return Err(FrameworkError::InvalidFamily(format!("predicate {} is the zero polynomial", s + 1)));
            }
        }
        if phi.k() != preds.len() {
            return Err(FrameworkError::InvalidFamily(format!(
                "phi is defined on {} signs but there are {} predicates",
                phi.k(),
                preds.len()
            )));
        }
        if phi.max_label() >= lambda.len() {
            return Err(FrameworkError::InvalidFamily("phi refers to a label outside the label set".into()));
        }
        if domain.d != d {
            return Err(FrameworkError::InvalidFamily(format!(
                "domain lives in dimension {}, expected {d}",
                domain.d
            )));
        }
        Ok(Family {
            name,
            d,
            lambda,
            preds,
            phi,
            domain,
            seed_hint: None,
        })
    }

    pub fn with_seed_hint(mut self, hint: SeedHint) -> Self {
        self.seed_hint = Some(hint);
        self
    }

    pub fn k(&self) -> usize {
        self.preds.len()
    }

    /// Maximum predicate degree.
    pub fn max_degree(&self) -> u32 {
        self.preds.iter().map(Predicate::degree).max().unwrap_or(0)
    }

    fn joint(&self, a: &[Rat], b: &[Rat]) -> Result<Point, PolyError> {
        for p in [a, b] {
            if p.len() != self.d {
                return Err(PolyError::DimensionMismatch {
                    expected: self.d,
                    got: p.len(),
                });
            }
        }
        Ok(a.iter().chain(b).cloned().collect())
    }

    /// Exact values `P_s(a, b)` (no domain check).
    pub fn pred_values(&self, a: &[Rat], b: &[Rat]) -> Result<Vec<Rat>, PolyError> {
        let x = self.joint(a, b)?;
        self.preds.iter().map(|p| p.eval(&x)).collect()
    }

    /// Sign vector `(sgn P_1(a,b), ..., sgn P_k(a,b))` (no domain check).
    pub fn sign_vector(&self, a: &[Rat], b: &[Rat]) -> Result<Vec<Sign>, PolyError> {
        Ok(self.pred_values(a, b)?.iter().map(sign_of).collect())
    }

    pub fn contains(&self, p: &[Rat]) -> Result<bool, PolyError> {
        self.domain.contains(p)
    }

    fn require_in_domain(&self, p: &[Rat], index: usize) -> Result<(), FrameworkError> {
        if self.contains(p)? {
            Ok(())
        } else {
            Err(FrameworkError::OutsideDomain { index })
        }
    }

    /// `Phi(a, b)` with both points checked against `U`.
    pub fn pair_label(&self, a: &[Rat], b: &[Rat]) -> Result<usize, FrameworkError> {
        self.require_in_domain(a, 0)?;
        self.require_in_domain(b, 1)?;
        Ok(self.phi.get(&self.sign_vector(a, b)?))
    }

    /// `Phi(a, b)` without the domain check, for hot loops over points that
    /// were already validated.
    pub fn pair_label_unchecked(&self, a: &[Rat], b: &[Rat]) -> Result<usize, PolyError> {
        Ok(self.phi.get(&self.sign_vector(a, b)?))
    }

    pub fn label_name(&self, index: usize) -> &str {
        self.lambda.name(index)
    }

    fn check_configuration(&self, cfg: &Configuration) -> Result<(), FrameworkError> {
        for (i, p) in cfg.points.iter().enumerate() {
            self.require_in_domain(p, i)?;
        }
        Ok(())
    }

    pub fn label_configuration(&self, cfg: &Configuration) -> Result<EdgeLabeling, FrameworkError> {
        self.check_configuration(cfg)?;
        let n = cfg.len();
        let mut labels = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                labels.push(self.pair_label_unchecked(&cfg.points[i], &cfg.points[j])?);
            }
        }
        Ok(EdgeLabeling { n, labels })
    }

    /// True iff every `P_s(a_i, a_j)`, `i < j`, is nonzero.
    pub fn strong_check(&self, cfg: &Configuration) -> Result<bool, FrameworkError> {
        self.check_configuration(cfg)?;
        for i in 0..cfg.len() {
            for j in i + 1..cfg.len() {
                let signs = self.sign_vector(&cfg.points[i], &cfg.points[j])?;
                if signs.contains(&Sign::Zero) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Searches for `b ∈ U` with all `P_s(a,b)`, `P_s(a',b)` nonzero and
    /// `Phi(a,b) != Phi(a',b)`. Deterministic probes around `a` and `a'`
    /// come first, then `budget` samples from `bx`. `None` means the search
    /// gave up, not that no witness exists.
    pub fn separation_witness<R: Rng>(
        &self,
        a: &[Rat],
        a2: &[Rat],
        rng: &mut R,
        bx: &SampleBox,
        budget: usize,
    ) -> Result<Option<SeparationWitness>, FrameworkError> {
        self.require_in_domain(a, 0)?;
        self.require_in_domain(a2, 1)?;
        if a == a2 {
            return Err(FrameworkError::SamePoint);
        }
        let test = |b: &Point| -> Result<Option<SeparationWitness>, FrameworkError> {
            if !self.contains(b)? {
                return Ok(None);
            }
            let sa = self.sign_vector(a, b)?;
            let sa2 = self.sign_vector(a2, b)?;
            if sa.contains(&Sign::Zero) || sa2.contains(&Sign::Zero) {
                return Ok(None);
            }
            let (la, la2) = (self.phi.get(&sa), self.phi.get(&sa2));
            if la == la2 {
                return Ok(None);
            }
            Ok(Some(SeparationWitness {
                b: b.clone(),
                signs_a: sa,
                signs_a2: sa2,
                label_a: la,
                label_a2: la2,
            }))
        };
        let half = Rat::new(1.into(), 2.into());
        let mid: Point = a.iter().zip(a2).map(|(x, y)| (x + y) * &half).collect();
        if let Some(w) = test(&mid)? {
            return Ok(Some(w));
        }
        for k in 0..12u32 {
            let step = Rat::new(1.into(), num_bigint::BigInt::from(1u64 << k));
            for base in [a, a2] {
                for c in 0..self.d {
                    for sgn in [1, -1] {
                        let mut b = base.to_vec();
                        b[c] += &step * Rat::from_integer(sgn.into());
                        if let Some(w) = test(&b)? {
                            return Ok(Some(w));
                        }
                    }
                }
            }
        }
        for _ in 0..budget {
            let b = bx.sample(rng, 16);
            if let Some(w) = test(&b)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

/// A point separating two others, with the sign vectors that certify it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationWitness {
    pub b: Point,
    pub signs_a: Vec<Sign>,
    pub signs_a2: Vec<Sign>,
    pub label_a: usize,
    pub label_a2: usize,
}

impl SeparationWitness {
    /// Re-checks the witness from scratch with exact evaluation.
    pub fn verify(&self, fam: &Family, a: &[Rat], a2: &[Rat]) -> Result<bool, FrameworkError> {
        if !fam.contains(&self.b)? {
            return Ok(false);
        }
        let sa = fam.sign_vector(a, &self.b)?;
        let sa2 = fam.sign_vector(a2, &self.b)?;
        Ok(!sa.contains(&Sign::Zero)
            && !sa2.contains(&Sign::Zero)
            && sa == self.signs_a
            && sa2 == self.signs_a2
            && fam.phi.get(&sa) != fam.phi.get(&sa2))
    }
}

/// `n` points of `R^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub points: Vec<Point>,
}

impl Configuration {
    pub fn new(points: Vec<Point>) -> Self {
        Configuration { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn without(&self, index: usize) -> Configuration {
        let mut points = self.points.clone();
        points.remove(index);
        Configuration { points }
    }
}

/// Position of the pair `i < j` (0-based) in lexicographic pair order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Labels of all pairs `i < j`, stored in lexicographic pair order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLabeling {
    n: usize,
    labels: Vec<usize>,
}

impl EdgeLabeling {
    pub fn from_labels(n: usize, labels: Vec<usize>) -> Self {
        assert_eq!(labels.len(), n * n.saturating_sub(1) / 2, "wrong number of pair labels");
        EdgeLabeling { n, labels }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Label of the pair `i < j`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.labels[pair_index(self.n, i, j)]
    }

    /// Labels in lexicographic pair order.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn without(&self, index: usize) -> EdgeLabeling {
        let mut labels = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if i != index && j != index {
                    labels.push(self.get(i, j));
                }
            }
        }
        EdgeLabeling {
            n: self.n - 1,
            labels,
        }
    }

    /// Serializable form with 1-based vertices and label names.
    pub fn to_record(&self, lambda: &LabelSet) -> EdgeLabelingRecord {
        let mut entries = Vec::with_capacity(self.labels.len());
        for i in 0..self.n {
            for j in i + 1..self.n {
                entries.push((i + 1, j + 1, lambda.name(self.get(i, j)).to_string()));
            }
        }
        EdgeLabelingRecord { n: self.n, entries }
    }

    pub fn from_record(rec: &EdgeLabelingRecord, lambda: &LabelSet) -> Result<Self, FrameworkError> {
        let n = rec.n;
        let total = n * n.saturating_sub(1) / 2;
        let mut labels = vec![None; total];
        for (i, j, name) in &rec.entries {
            if !(1 <= *i && i < j && *j <= n) {
                return Err(FrameworkError::InvalidFamily(format!("bad pair ({i},{j}) for n={n}")));
            }
            labels[pair_index(n, i - 1, j - 1)] = Some(lambda.index_of(name)?);
        }
        let labels: Option<Vec<usize>> = labels.into_iter().collect();
        let labels = labels.ok_or_else(|| FrameworkError::InvalidFamily("labeling misses some pairs".into()))?;
        Ok(EdgeLabeling { n, labels })
    }
}

/// `{n, entries: [[i, j, label], ...]}`, pairs sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeLabelingRecord {
    pub n: usize,
    pub entries: Vec<(usize, usize, String)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{point, rat};

    fn poset1() -> Family {
        let p = &Polynomial::var(2, 1) - &Polynomial::var(2, 0);
        let lambda = LabelSet::new(["prec", "succ", "incomparable"]).unwrap();
        let phi = PhiTable::from_fn(1, |s| match s[0] {
            Sign::Plus => 0,
            Sign::Minus => 1,
            Sign::Zero => 2,
        });
        Family::new("p1", 1, lambda, vec![p.into()], phi, DomainSpec::whole_space(1)).unwrap()
    }

    #[test]
    fn sign_vector_indexing_round_trips() {
        for k in 0..4 {
            for i in 0..3usize.pow(k as u32) {
                assert_eq!(sign_vector_index(&sign_vector_from_index(i, k)), i);
            }
        }
    }

    #[test]
    fn phi_from_entries_tracks_defaults() {
        let mut entries = BTreeMap::new();
        entries.insert(vec![Sign::Minus], 0);
        let phi = PhiTable::from_entries(1, &entries, Some(1)).unwrap();
        assert_eq!(phi.get(&[Sign::Minus]), 0);
        assert_eq!(phi.get(&[Sign::Plus]), 1);
        assert!(phi.is_defaulted(&[Sign::Zero]));
        assert!(!phi.is_defaulted(&[Sign::Minus]));
        assert!(PhiTable::from_entries(1, &entries, None).is_err());
    }

    #[test]
    fn family_validation() {
        let lambda = LabelSet::new(["x"]).unwrap();
        let phi = PhiTable::from_fn(1, |_| 0);
        let zero = Family::new(
            "z",
            1,
            lambda.clone(),
            vec![Polynomial::zero(2).into()],
            phi.clone(),
            DomainSpec::whole_space(1),
        );
        assert!(zero.is_err());
        let wrong_vars = Family::new(
            "w",
            1,
            lambda,
            vec![Polynomial::var(3, 0).into()],
            phi,
            DomainSpec::whole_space(1),
        );
        assert!(wrong_vars.is_err());
        assert!(LabelSet::new(["a", "a"]).is_err());
        assert!(LabelSet::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn poset_labels() {
        let f = poset1();
        assert_eq!(f.pair_label(&point(&[0]), &point(&[0])).unwrap(), 2);
        let cfg = Configuration::new(vec![point(&[1]), point(&[2]), point(&[3])]);
        let l = f.label_configuration(&cfg).unwrap();
        assert_eq!(l.labels(), &[0, 0, 0]);
        assert_eq!(f.label_configuration(&Configuration::new(vec![point(&[4])])).unwrap().labels().len(), 0);
    }

    #[test]
    fn separation_midpoint() {
        let f = poset1();
        let bx = SampleBox::cube_int(1, -5, 5).unwrap();
        let mut rng = crate::sampling::rng_stream(0, &[]);
        let w = f
            .separation_witness(&point(&[0]), &point(&[1]), &mut rng, &bx, 10)
            .unwrap()
            .unwrap();
        assert_eq!(w.b, vec![Rat::new(1.into(), 2.into())]);
        assert_eq!((w.label_a, w.label_a2), (0, 1));
        assert!(w.verify(&f, &point(&[0]), &point(&[1])).unwrap());
        assert_eq!(
            f.separation_witness(&point(&[0]), &point(&[0]), &mut rng, &bx, 10),
            Err(FrameworkError::SamePoint)
        );
    }

    #[test]
    fn labeling_records_round_trip() {
        let f = poset1();
        let cfg = Configuration::new(vec![point(&[3]), point(&[1]), point(&[1]), point(&[2])]);
        let l = f.label_configuration(&cfg).unwrap();
        let rec = l.to_record(&f.lambda);
        assert_eq!(rec.entries[0], (1, 2, "succ".to_string()));
        let json = serde_json::to_string(&rec).unwrap();
        let back: EdgeLabelingRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(EdgeLabeling::from_record(&back, &f.lambda).unwrap(), l);
    }

    #[test]
    fn restriction_drops_vertex() {
        let f = poset1();
        let cfg = Configuration::new(vec![point(&[3]), point(&[1]), point(&[5]), point(&[2])]);
        let full = f.label_configuration(&cfg).unwrap();
        for i in 0..4 {
            assert_eq!(full.without(i), f.label_configuration(&cfg.without(i)).unwrap());
        }
        let _ = rat(0);
    }
}
