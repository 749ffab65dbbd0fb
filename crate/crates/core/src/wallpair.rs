//! Search for exactly certified general wall pairs and spanning seeds.
//!
//! A general wall pair `(a, b)` has exactly one vanishing predicate `P_s`,
//! with `grad_b P_s(a, b) != 0` and `phi` changing when the sign at `s`
//! flips between `+` and `-`. The search brackets a sign change of `P_s`
//! along a segment in floating point, then snaps to an exact rational zero
//! by solving a linear or quadratic restriction exactly. Nothing leaves this
//! module without passing [`is_general_wall_pair`].

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::framework::{Family, FrameworkError};
use crate::linalg::{determinant, rank, Matrix};
use crate::poly::{dyadic_from_f64, rat, rat_to_f64, rat_to_string, sign_of, Point, PolyError, Rat, Sign, UniPoly};
use crate::sampling::{random_point, rng_stream, SampleBox, SamplingError, SamplingOptions};

#[derive(Debug, Error)]
pub enum WallPairError {
    #[error(transparent)]
    Framework(#[from] FrameworkError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(
        "no exact zero could be snapped: predicate {pred} restricts to degree {degree} along every tried line \
         (exact snapping handles degree <= 2)"
    )]
    UnsupportedDegree { pred: usize, degree: usize },
}

/// A certified general wall pair. `wall_index` is 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallPairSeed {
    pub a: Point,
    pub b: Point,
    pub wall_index: usize,
    /// Signs of all `P_t(a, b)`; zero exactly at `wall_index`.
    pub cert: Vec<Sign>,
    pub grad_a: Vec<Rat>,
    pub grad_b: Vec<Rat>,
    /// Labels with `+` resp. `-` substituted at `wall_index`.
    pub flip: (usize, usize),
}

/// `a*` with `d` wall pairs whose `grad_a` rows are linearly independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningSeed {
    pub a_star: Point,
    pub pairs: Vec<WallPairSeed>,
    pub grad_matrix: Matrix,
    pub det: Rat,
}

/// Exact test for a general wall pair; `None` covers every failure.
pub fn is_general_wall_pair(fam: &Family, a: &[Rat], b: &[Rat]) -> Result<Option<WallPairSeed>, FrameworkError> {
    if !fam.contains(a)? || !fam.contains(b)? {
        return Ok(None);
    }
    let cert = fam.sign_vector(a, b)?;
    let zeros: Vec<usize> = (0..cert.len()).filter(|&s| cert[s] == Sign::Zero).collect();
    let [s] = zeros[..] else {
        return Ok(None);
    };
    let mut plus = cert.clone();
    plus[s] = Sign::Plus;
    let mut minus = cert.clone();
    minus[s] = Sign::Minus;
    let flip = (fam.phi.get(&plus), fam.phi.get(&minus));
    if flip.0 == flip.1 {
        return Ok(None);
    }
    let (grad_a, grad_b) = fam.preds[s].polynomial().gradient_split(a, b)?;
    if grad_b.iter().all(Zero::is_zero) {
        return Ok(None);
    }
    Ok(Some(WallPairSeed {
        a: a.to_vec(),
        b: b.to_vec(),
        wall_index: s,
        cert,
        grad_a,
        grad_b,
        flip,
    }))
}

fn rational_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let sq = |n: &BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    Some(Rat::new(sq(x.numer())?, sq(x.denom())?))
}

/// Rational roots of a polynomial of degree at most 2, when they exist.
fn rational_roots(u: &UniPoly) -> Option<Vec<Rat>> {
    match u.degree() {
        Some(1) => Some(vec![-u.coeff(0) / u.coeff(1)]),
        Some(2) => {
            let (c0, c1, c2) = (u.coeff(0), u.coeff(1), u.coeff(2));
            let disc = &c1 * &c1 - rat(4) * &c0 * &c2;
            if disc.is_negative() {
                return Some(Vec::new());
            }
            let s = rational_sqrt(&disc)?;
            let two_a = rat(2) * &c2;
            Some(vec![(-&c1 - &s) / &two_a, (-&c1 + &s) / two_a])
        }
        _ => None,
    }
}

fn nearest<'a>(roots: &'a [Rat], target: f64) -> Option<&'a Rat> {
    roots.iter().min_by(|x, y| {
        let dx = (rat_to_f64(x) - target).abs();
        let dy = (rat_to_f64(y) - target).abs();
        dx.total_cmp(&dy)
    })
}

fn along(base: &[Rat], dir: &[Rat], t: &Rat) -> Point {
    base.iter().zip(dir).map(|(p, w)| p + w * t).collect()
}

/// Small line directions tried when snapping: coordinate axes, then a few
/// integer combinations of two axes.
fn snap_directions(d: usize) -> Vec<Vec<Rat>> {
    let mut out = Vec::new();
    for i in 0..d {
        out.push((0..d).map(|k| rat((k == i) as i64)).collect());
    }
    for i in 0..d {
        for j in i + 1..d {
            for (ci, cj) in [(1, 1), (1, -1), (3, 4), (4, 3), (3, -4), (4, -3)] {
                out.push((0..d).map(|k| rat(if k == i { ci } else if k == j { cj } else { 0 })).collect());
            }
        }
    }
    out
}

/// Outcome of one snapping attempt.
enum Snap {
    Found(Point),
    Missed,
    HighDegree(usize),
}

/// Finds an exact zero of `f(b) = P_s(a, b)` near `approx`.
fn snap_zero(fam: &Family, f: &crate::poly::Polynomial, approx: &[Rat], a: &[Rat]) -> Result<Snap, WallPairError> {
    let d = fam.d;
    let dirs = snap_directions(d);
    let mut max_deg = 0;
    let mut candidates: Vec<Point> = Vec::new();
    // Lines through the approximate zero.
    for w in &dirs {
        let h = f.restrict_to_line(approx, w)?;
        max_deg = max_deg.max(h.degree().unwrap_or(0));
        if let Some(roots) = rational_roots(&h) {
            if let Some(u) = nearest(&roots, 0.0) {
                candidates.push(along(approx, w, u));
            }
        }
    }
    // Secants through an exact anchor zero on a line through a.
    for w in &dirs {
        let h = f.restrict_to_line(a, w)?;
        let Some(roots) = rational_roots(&h) else { continue };
        for u in roots {
            let anchor = along(a, w, &u);
            let dir: Vec<Rat> = approx.iter().zip(&anchor).map(|(x, y)| x - y).collect();
            if dir.iter().all(Zero::is_zero) {
                candidates.push(anchor);
                continue;
            }
            let g = f.restrict_to_line(&anchor, &dir)?;
            // g(0) = 0, so a quadratic has the rational second root -g1/g2.
            match g.degree() {
                Some(2) => candidates.push(along(&anchor, &dir, &(-g.coeff(1) / g.coeff(2)))),
                Some(1) => candidates.push(anchor.clone()),
                _ => {}
            }
        }
    }
    let target: Vec<f64> = approx.iter().map(rat_to_f64).collect();
    let dist = |p: &Point| -> f64 { p.iter().zip(&target).map(|(x, t)| (rat_to_f64(x) - t).powi(2)).sum() };
    candidates.sort_by(|p, q| dist(p).total_cmp(&dist(q)));
    for c in candidates {
        if f.eval(&c)?.is_zero() && fam.contains(&c)? {
            return Ok(Snap::Found(c));
        }
    }
    if max_deg > 2 {
        Ok(Snap::HighDegree(max_deg))
    } else {
        Ok(Snap::Missed)
    }
}

/// Search tuning.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub sampling: SamplingOptions,
    /// Bits kept when rounding the floating-point bracket to a dyadic point.
    pub snap_bits: u32,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            sampling: SamplingOptions {
                bits: 8,
                max_retries: 1000,
            },
            snap_bits: 24,
        }
    }
}

/// One trial: sample `(a, b-, b+)`, bracket, snap, certify.
fn trial(
    fam: &Family,
    a_fixed: Option<&Point>,
    seed: u64,
    tags: &[u64],
    bx: &SampleBox,
    opts: &SearchOptions,
) -> Result<Result<WallPairSeed, Option<(usize, usize)>>, WallPairError> {
    let mut rng = rng_stream(seed, tags);
    let a = match a_fixed {
        Some(a) => a.clone(),
        None => random_point(&fam.domain, &mut rng, bx, opts.sampling)?,
    };
    let b0 = random_point(&fam.domain, &mut rng, bx, opts.sampling)?;
    let b1 = random_point(&fam.domain, &mut rng, bx, opts.sampling)?;
    let s0 = fam.sign_vector(&a, &b0)?;
    let s1 = fam.sign_vector(&a, &b1)?;
    if s0.contains(&Sign::Zero) || s1.contains(&Sign::Zero) {
        return Ok(Err(None));
    }
    let differ: Vec<usize> = (0..s0.len()).filter(|&s| s0[s] != s1[s]).collect();
    let [s] = differ[..] else {
        return Ok(Err(None));
    };
    let mut p0 = s0.clone();
    p0[s] = Sign::Plus;
    let mut p1 = s0.clone();
    p1[s] = Sign::Minus;
    if fam.phi.get(&p0) == fam.phi.get(&p1) {
        return Ok(Err(None));
    }
    let f = fam.preds[s].polynomial().fix_prefix(&a)?;
    let dir: Vec<Rat> = b1.iter().zip(&b0).map(|(x, y)| x - y).collect();
    let g = f.restrict_to_line(&b0, &dir)?;
    // Exact roots on the segment first.
    if let Some(roots) = rational_roots(&g) {
        for t in roots.iter().filter(|t| t.is_positive() && *t < &rat(1)) {
            let b = along(&b0, &dir, t);
            if let Some(w) = is_general_wall_pair(fam, &a, &b)? {
                return Ok(Ok(w));
            }
        }
    }
    // Floating-point bisection to 2^-40, then exact snapping nearby.
    let neg_at_zero = sign_of(&g.coeff(0)) == Sign::Minus;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1.0 / (1u64 << 40) as f64 {
        let mid = 0.5 * (lo + hi);
        let v = g.eval_f64(mid);
        if (v < 0.0) == neg_at_zero {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let approx: Point = b0
        .iter()
        .zip(&dir)
        .map(|(x, w)| dyadic_from_f64(rat_to_f64(x) + t * rat_to_f64(w), opts.snap_bits))
        .collect();
    match snap_zero(fam, &f, &approx, &a)? {
        Snap::Found(b) => match is_general_wall_pair(fam, &a, &b)? {
            Some(w) => Ok(Ok(w)),
            None => Ok(Err(None)),
        },
        Snap::Missed => Ok(Err(None)),
        Snap::HighDegree(deg) => Ok(Err(Some((s, deg)))),
    }
}

fn search(
    fam: &Family,
    a_fixed: Option<&Point>,
    seed: u64,
    stream: u64,
    bx: &SampleBox,
    budget: usize,
    opts: &SearchOptions,
    accept: &mut dyn FnMut(&WallPairSeed) -> bool,
) -> Result<Option<WallPairSeed>, WallPairError> {
    let mut degree_issue = None;
    for t in 0..budget {
        match trial(fam, a_fixed, seed, &[stream, t as u64], bx, opts)? {
            Ok(w) if accept(&w) => return Ok(Some(w)),
            Ok(_) | Err(None) => {}
            Err(Some(issue)) => degree_issue = Some(issue),
        }
    }
    match degree_issue {
        Some((pred, degree)) => Err(WallPairError::UnsupportedDegree { pred: pred + 1, degree }),
        None => Ok(None),
    }
}

/// Randomized search for a general wall pair inside `bx`. `None` after
/// `budget` trials only means the search gave up.
pub fn find_wall_pair(
    fam: &Family,
    seed: u64,
    bx: &SampleBox,
    budget: usize,
) -> Result<Option<WallPairSeed>, WallPairError> {
    search(fam, None, seed, 0, bx, budget, &SearchOptions::default(), &mut |_| true)
}

/// Same as [`find_wall_pair`] with the first point held fixed.
pub fn find_wall_pair_at(
    fam: &Family,
    a: &Point,
    seed: u64,
    bx: &SampleBox,
    budget: usize,
) -> Result<Option<WallPairSeed>, WallPairError> {
    search(fam, Some(a), seed, 1, bx, budget, &SearchOptions::default(), &mut |_| true)
}

fn assemble(a_star: Point, pairs: Vec<WallPairSeed>) -> Option<SpanningSeed> {
    let grad_matrix: Matrix = pairs.iter().map(|p| p.grad_a.clone()).collect();
    let det = determinant(&grad_matrix);
    (!det.is_zero()).then_some(SpanningSeed {
        a_star,
        pairs,
        grad_matrix,
        det,
    })
}

/// Certifies a family's built-in seed hint, if it has one.
pub fn seed_from_hint(fam: &Family) -> Result<Option<SpanningSeed>, FrameworkError> {
    let Some(h) = &fam.seed_hint else {
        return Ok(None);
    };
    if h.pairs.len() != fam.d {
        return Ok(None);
    }
    let mut pairs = Vec::new();
    for (b, s) in &h.pairs {
        match is_general_wall_pair(fam, &h.a_star, b)? {
            Some(w) if w.wall_index == *s => pairs.push(w),
            _ => return Ok(None),
        }
    }
    Ok(assemble(h.a_star.clone(), pairs))
}

/// Finds `a*` and `d` certified wall pairs at `a*` with independent
/// `grad_a` rows. A certified hint is used when available; otherwise pairs
/// are added greedily while they raise the rank, and `a*` is resampled
/// when a quarter of the budget passes without completing.
pub fn find_spanning_seed(
    fam: &Family,
    seed: u64,
    bx: &SampleBox,
    budget: usize,
) -> Result<Option<SpanningSeed>, WallPairError> {
    if let Some(s) = seed_from_hint(fam)? {
        return Ok(Some(s));
    }
    let opts = SearchOptions::default();
    let per_anchor = (budget / 4).max(1);
    let mut used = 0;
    let mut round = 0u64;
    while used < budget {
        let first = search(fam, None, seed, 2 + 2 * round, bx, per_anchor.min(budget - used), &opts, &mut |_| true)?;
        used += per_anchor;
        let Some(first) = first else { continue };
        let a_star = first.a.clone();
        let mut pairs = vec![first];
        let mut local = 0;
        while pairs.len() < fam.d && local < per_anchor && used < budget {
            let rows: Matrix = pairs.iter().map(|p| p.grad_a.clone()).collect();
            let current = rank(&rows);
            let mut accept = |w: &WallPairSeed| {
                let mut r = rows.clone();
                r.push(w.grad_a.clone());
                rank(&r) > current
            };
            let chunk = 16.min(per_anchor - local);
            let found = search(
                fam,
                Some(&a_star),
                seed,
                3 + 2 * round + ((local as u64) << 20),
                bx,
                chunk,
                &opts,
                &mut accept,
            )?;
            local += chunk;
            used += chunk;
            if let Some(w) = found {
                pairs.push(w);
            }
        }
        if pairs.len() == fam.d {
            if let Some(s) = assemble(a_star, pairs) {
                return Ok(Some(s));
            }
        }
        round += 1;
    }
    Ok(None)
}

/// Serializable view of a seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub a_star: Vec<String>,
    pub pairs: Vec<PairRecord>,
    pub grad_matrix: Vec<Vec<String>>,
    pub det: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub b: Vec<String>,
    /// 1-based predicate index.
    pub wall_index: usize,
    pub cert: String,
    pub grad_b: Vec<String>,
    pub flip: (String, String),
}

fn strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(rat_to_string).collect()
}

impl SpanningSeed {
    pub fn to_record(&self, fam: &Family) -> SeedRecord {
        SeedRecord {
            a_star: strings(&self.a_star),
            pairs: self
                .pairs
                .iter()
                .map(|p| PairRecord {
                    b: strings(&p.b),
                    wall_index: p.wall_index + 1,
                    cert: crate::poly::signs_to_string(&p.cert),
                    grad_b: strings(&p.grad_b),
                    flip: (fam.label_name(p.flip.0).to_string(), fam.label_name(p.flip.1).to_string()),
                })
                .collect(),
            grad_matrix: self.grad_matrix.iter().map(|r| strings(r)).collect(),
            det: rat_to_string(&self.det),
        }
    }

    /// Rebuilds a seed from its record, certifying every pair again. Only
    /// `a_star`, the `b` points and the wall indices are trusted.
    pub fn from_record(fam: &Family, rec: &SeedRecord) -> Result<Option<SpanningSeed>, WallPairError> {
        let parse = |v: &[String]| v.iter().map(|x| crate::poly::parse_rat(x)).collect::<Result<Point, _>>();
        let a_star = parse(&rec.a_star)?;
        let mut pairs = Vec::new();
        for p in &rec.pairs {
            let b = parse(&p.b)?;
            match is_general_wall_pair(fam, &a_star, &b)? {
                Some(w) if w.wall_index + 1 == p.wall_index => pairs.push(w),
                _ => return Ok(None),
            }
        }
        if pairs.len() != fam.d {
            return Ok(None);
        }
        Ok(assemble(a_star, pairs))
    }

    /// Re-certifies every pair and the determinant from scratch.
    pub fn verify(&self, fam: &Family) -> Result<bool, FrameworkError> {
        if self.pairs.len() != fam.d {
            return Ok(false);
        }
        for p in &self.pairs {
            match is_general_wall_pair(fam, &self.a_star, &p.b)? {
                Some(w) if w == *p => {}
                _ => return Ok(false),
            }
        }
        let m: Matrix = self.pairs.iter().map(|p| p.grad_a.clone()).collect();
        Ok(m == self.grad_matrix && determinant(&m) == self.det && !self.det.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, BuiltinFamilyId};
    use crate::poly::{point, ratio};

    #[test]
    fn wall_pair_examples() {
        let p = builtin(BuiltinFamilyId::PosetDim(1));
        let w = is_general_wall_pair(&p, &point(&[0]), &point(&[0])).unwrap().unwrap();
        assert_eq!(w.wall_index, 0);
        assert_eq!((p.label_name(w.flip.0), p.label_name(w.flip.1)), ("prec", "succ"));

        let disks = builtin(BuiltinFamilyId::Disks);
        let w = is_general_wall_pair(&disks, &point(&[0, 0, 1]), &point(&[2, 0, 1])).unwrap().unwrap();
        assert_eq!(w.grad_b, point(&[4, 0, -4]));
        assert_eq!((disks.label_name(w.flip.0), disks.label_name(w.flip.1)), ("non-edge", "edge"));
        assert!(is_general_wall_pair(&disks, &point(&[0, 0, 1]), &point(&[5, 0, 1])).unwrap().is_none());
    }

    #[test]
    fn two_vanishing_predicates_are_not_general() {
        let p = builtin(BuiltinFamilyId::PosetDim(2));
        assert!(is_general_wall_pair(&p, &point(&[0, 0]), &point(&[0, 0])).unwrap().is_none());
    }

    #[test]
    fn rational_roots_of_quadratics() {
        let u = UniPoly::new(vec![rat(-4), rat(0), rat(1)]);
        let mut r = rational_roots(&u).unwrap();
        r.sort();
        assert_eq!(r, vec![rat(-2), rat(2)]);
        assert!(rational_roots(&UniPoly::new(vec![rat(-2), rat(0), rat(1)])).is_none());
        assert_eq!(rational_roots(&UniPoly::new(vec![rat(1), rat(2)])).unwrap(), vec![ratio(-1, 2)]);
        assert_eq!(rational_sqrt(&ratio(9, 4)), Some(ratio(3, 2)));
    }

    #[test]
    fn hinted_seeds_certify() {
        let p2 = builtin(BuiltinFamilyId::PosetDim(2));
        let s = seed_from_hint(&p2).unwrap().unwrap();
        assert_eq!(s.a_star, point(&[0, 0]));
        assert_eq!(s.pairs[0].b, point(&[0, 7]));
        assert_eq!(s.pairs[1].b, point(&[7, 0]));
        assert_eq!(s.det, rat(1));

        let ud = builtin(BuiltinFamilyId::UnitDisks);
        let s = seed_from_hint(&ud).unwrap().unwrap();
        assert_eq!(s.grad_matrix, vec![point(&[-4, 0]), point(&[0, -4])]);

        let disks = builtin(BuiltinFamilyId::Disks);
        let s = seed_from_hint(&disks).unwrap().unwrap();
        assert_eq!(s.det, rat(-128));
        assert!(s.verify(&disks).unwrap());
        let rec = s.to_record(&disks);
        let json = serde_json::to_string(&rec).unwrap();
        let back: SeedRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(SpanningSeed::from_record(&disks, &back).unwrap(), Some(s));
    }

    #[test]
    fn searched_wall_pairs_certify() {
        for id in [BuiltinFamilyId::Disks, BuiltinFamilyId::UnitDisks, BuiltinFamilyId::CircleOrders, BuiltinFamilyId::Segments] {
            let fam = builtin(id);
            let bx = SampleBox::parse("0:4", fam.d).unwrap();
            let w = find_wall_pair(&fam, 11, &bx, 400).unwrap().unwrap_or_else(|| panic!("{id}: no wall pair"));
            assert!(is_general_wall_pair(&fam, &w.a, &w.b).unwrap().is_some());
        }
    }

    #[test]
    fn searched_spanning_seeds_certify() {
        for id in [BuiltinFamilyId::Disks, BuiltinFamilyId::UnitDisks, BuiltinFamilyId::PosetDim(3)] {
            let mut fam = builtin(id);
            fam.seed_hint = None;
            let bx = SampleBox::parse("1/2:4", fam.d).unwrap();
            let s = find_spanning_seed(&fam, 5, &bx, 2000)
                .unwrap()
                .unwrap_or_else(|| panic!("{id}: no spanning seed"));
            assert!(s.verify(&fam).unwrap(), "{id}");
        }
    }
}
