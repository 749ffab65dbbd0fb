//! Built-in geometric families and their polynomial encodings.

pub mod linking;
pub mod oracle;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::framework::{DomainSpec, Family, LabelSet, PhiTable, Predicate, SeedHint};
use crate::poly::{point, rat, Polynomial, Sign};
use crate::sampling::SampleBox;

pub use linking::{linking_predicate, CircleSpec, LinkDecision};
pub use oracle::{oracle_relation, OracleVerdict};

pub const EDGE: &str = "edge";
pub const NON_EDGE: &str = "non-edge";
pub const PREC: &str = "prec";
pub const SUCC: &str = "succ";
pub const INCOMPARABLE: &str = "incomparable";
pub const LINK: &str = "link";
pub const NO_LINK: &str = "no-link";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinFamilyId {
    /// Open disks `(x, y, r)`.
    Disks,
    /// Open unit disks, centers `(x, y)`.
    UnitDisks,
    /// Open balls in `R^m`, `(x_1..x_m, r)`.
    Balls(usize),
    /// Open unit balls in `R^m`, centers only.
    UnitBalls(usize),
    /// Closed intervals `(l, h)`.
    Intervals,
    /// Non-vertical closed segments `y = alpha x + beta`, `gamma <= x <= delta`.
    Segments,
    /// Closed axis-parallel boxes in `R^m`, `(l_1, h_1, ..., l_m, h_m)`.
    Boxes(usize),
    /// Circles in `R^3`, `(a, b, c, d, e, r)`.
    CircleLinks,
    /// Unit circles in `R^3`, `(a, b, c, d, e)`.
    UnitCircleLinks,
    /// Containment order of closed balls in `R^m`.
    BallOrders(usize),
    /// Containment order of closed disks.
    CircleOrders,
    /// Coordinatewise order on `R^d`.
    PosetDim(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyIdError {
    #[error("unknown built-in family {0:?}")]
    Unknown(String),
    #[error("family {0} needs a positive parameter")]
    BadParameter(String),
}

impl BuiltinFamilyId {
    pub fn all_examples() -> Vec<BuiltinFamilyId> {
        use BuiltinFamilyId::*;
        vec![
            Disks,
            UnitDisks,
            Balls(3),
            UnitBalls(3),
            Intervals,
            Segments,
            Boxes(2),
            CircleLinks,
            UnitCircleLinks,
            BallOrders(3),
            CircleOrders,
            PosetDim(1),
            PosetDim(2),
            PosetDim(3),
        ]
    }

    /// Dimension of the parameter space.
    pub fn dim(&self) -> usize {
        use BuiltinFamilyId::*;
        match *self {
            Disks => 3,
            UnitDisks => 2,
            Balls(m) => m + 1,
            UnitBalls(m) => m,
            Intervals => 2,
            Segments => 4,
            Boxes(m) => 2 * m,
            CircleLinks => 6,
            UnitCircleLinks => 5,
            BallOrders(m) => m + 1,
            CircleOrders => 3,
            PosetDim(d) => d,
        }
    }

    /// A sampling box in which every label of the family shows up often.
    pub fn default_box(&self) -> SampleBox {
        use BuiltinFamilyId::*;
        let (lo, hi): (Vec<i64>, Vec<i64>) = match *self {
            Disks | Balls(_) | BallOrders(_) | CircleOrders => {
                let m = self.dim() - 1;
                let (mut lo, mut hi) = (vec![0; m], vec![6; m]);
                lo.push(0);
                hi.push(if matches!(self, Disks | Balls(_)) { 2 } else { 4 });
                (lo, hi)
            }
            UnitDisks | UnitBalls(_) => (vec![0; self.dim()], vec![5; self.dim()]),
            Intervals | Boxes(_) | PosetDim(_) => (vec![0; self.dim()], vec![4; self.dim()]),
            Segments => (vec![-2, -2, 0, 0], vec![2, 2, 4, 4]),
            CircleLinks => (vec![-1, -1, -1, -2, -2, 0], vec![1, 1, 1, 2, 2, 2]),
            UnitCircleLinks => (vec![-1, -1, -1, -2, -2], vec![1, 1, 1, 2, 2]),
        };
        SampleBox::new(point(&lo), point(&hi)).expect("non-degenerate default box")
    }
}

impl fmt::Display for BuiltinFamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use BuiltinFamilyId::*;
        match self {
            Disks => write!(f, "DISKS"),
            UnitDisks => write!(f, "UNIT_DISKS"),
            Balls(m) => write!(f, "BALLS({m})"),
            UnitBalls(m) => write!(f, "UNIT_BALLS({m})"),
            Intervals => write!(f, "INTERVALS"),
            Segments => write!(f, "SEGMENTS"),
            Boxes(m) => write!(f, "BOXES({m})"),
            CircleLinks => write!(f, "CIRCLE_LINKS"),
            UnitCircleLinks => write!(f, "UNIT_CIRCLE_LINKS"),
            BallOrders(m) => write!(f, "BALL_ORDERS({m})"),
            CircleOrders => write!(f, "CIRCLE_ORDERS"),
            PosetDim(d) => write!(f, "POSET_DIM({d})"),
        }
    }
}

impl FromStr for BuiltinFamilyId {
    type Err = FamilyIdError;

    /// Accepts `NAME` or `NAME(k)`, case-insensitive, `-` allowed for `_`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use BuiltinFamilyId::*;
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        let (name, param) = match norm.split_once('(') {
            Some((n, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| FamilyIdError::Unknown(s.into()))?;
                let k: usize = inner.trim().parse().map_err(|_| FamilyIdError::BadParameter(s.into()))?;
                if k == 0 {
                    return Err(FamilyIdError::BadParameter(s.into()));
                }
                (n.to_string(), Some(k))
            }
            None => (norm.clone(), None),
        };
        let need = |p: Option<usize>| p.ok_or_else(|| FamilyIdError::BadParameter(s.into()));
        let none = |id: BuiltinFamilyId| match param {
            None => Ok(id),
            Some(_) => Err(FamilyIdError::Unknown(s.into())),
        };
        match name.as_str() {
            "DISKS" => none(Disks),
            "UNIT_DISKS" => none(UnitDisks),
            "BALLS" => Ok(Balls(need(param)?)),
            "UNIT_BALLS" => Ok(UnitBalls(need(param)?)),
            "INTERVALS" => none(Intervals),
            "SEGMENTS" => none(Segments),
            "BOXES" => Ok(Boxes(need(param)?)),
            "CIRCLE_LINKS" => none(CircleLinks),
            "UNIT_CIRCLE_LINKS" => none(UnitCircleLinks),
            "BALL_ORDERS" => Ok(BallOrders(need(param)?)),
            "CIRCLE_ORDERS" => none(CircleOrders),
            "POSET_DIM" => Ok(PosetDim(need(param)?)),
            _ => Err(FamilyIdError::Unknown(s.into())),
        }
    }
}

/// Variable `i` of the x-block or the y-block of a pair polynomial in `2d` variables.
fn xv(d: usize, i: usize) -> Polynomial {
    Polynomial::var(2 * d, i)
}

fn yv(d: usize, i: usize) -> Polynomial {
    Polynomial::var(2 * d, d + i)
}

fn konst(vars: usize, c: i64) -> Polynomial {
    Polynomial::constant(vars, rat(c))
}

/// `sum_i (x_i - y_i)^2` over the coordinates `range` of both blocks.
fn squared_distance(d: usize, range: std::ops::Range<usize>) -> Polynomial {
    range.fold(Polynomial::zero(2 * d), |acc, i| {
        let diff = &xv(d, i) - &yv(d, i);
        &acc + &(&diff * &diff)
    })
}

fn graph_labels() -> LabelSet {
    LabelSet::new([EDGE, NON_EDGE]).expect("static labels")
}

fn order_labels() -> LabelSet {
    LabelSet::new([PREC, SUCC, INCOMPARABLE]).expect("static labels")
}

/// Intersection of open objects: edge iff the single predicate is negative.
fn negative_means_edge() -> PhiTable {
    PhiTable::from_fn(1, |s| if s[0] == Sign::Minus { 0 } else { 1 })
}

/// Edge iff every predicate is non-negative.
fn all_nonnegative_means_edge(k: usize) -> PhiTable {
    PhiTable::from_fn(k, |s| if s.iter().all(|&x| x != Sign::Minus) { 0 } else { 1 })
}

fn positive_radius_domain(d: usize) -> DomainSpec {
    DomainSpec::all_positive(d, vec![Polynomial::var(d, d - 1)]).expect("static domain")
}

fn build(
    id: BuiltinFamilyId,
    lambda: LabelSet,
    preds: Vec<Predicate>,
    phi: PhiTable,
    domain: DomainSpec,
) -> Family {
    let d = id.dim();
    let fam = Family::new(id.to_string(), d, lambda, preds, phi, domain).expect("built-in family is well formed");
    match seed_hint(id) {
        Some(h) => fam.with_seed_hint(h),
        None => fam,
    }
}

fn open_balls(id: BuiltinFamilyId, m: usize) -> Family {
    let d = m + 1;
    let sum_r = &xv(d, m) + &yv(d, m);
    let p = &squared_distance(d, 0..m) - &(&sum_r * &sum_r);
    build(id, graph_labels(), vec![p.into()], negative_means_edge(), positive_radius_domain(d))
}

fn open_unit_balls(id: BuiltinFamilyId, m: usize) -> Family {
    let p = &squared_distance(m, 0..m) - &konst(2 * m, 4);
    build(id, graph_labels(), vec![p.into()], negative_means_edge(), DomainSpec::whole_space(m))
}

/// Closed boxes: per axis `h'_i - l_i >= 0` and `h_i - l'_i >= 0`.
fn boxes(id: BuiltinFamilyId, m: usize) -> Family {
    let d = 2 * m;
    let mut preds = Vec::new();
    for i in 0..m {
        let (l, h) = (2 * i, 2 * i + 1);
        preds.push((&yv(d, h) - &xv(d, l)).into());
        preds.push((&xv(d, h) - &yv(d, l)).into());
    }
    let domain_polys = (0..m)
        .map(|i| &Polynomial::var(d, 2 * i + 1) - &Polynomial::var(d, 2 * i))
        .collect();
    let domain = DomainSpec::all_positive(d, domain_polys).expect("static domain");
    build(id, graph_labels(), preds, all_nonnegative_means_edge(2 * m), domain)
}

/// Segments `(alpha, beta, gamma, delta)` with predicates
/// `alpha - alpha'`, `beta - beta'`, `t (alpha - alpha') + beta - beta'` for
/// `t` in `gamma, gamma', delta, delta'`, then `delta' - gamma`, `delta - gamma'`.
fn segments() -> Family {
    let d = 4;
    let (al, be, ga, de) = (xv(d, 0), xv(d, 1), xv(d, 2), xv(d, 3));
    let (al2, be2, ga2, de2) = (yv(d, 0), yv(d, 1), yv(d, 2), yv(d, 3));
    let da = &al - &al2;
    let db = &be - &be2;
    let at = |t: &Polynomial| &(t * &da) + &db;
    let preds: Vec<Predicate> = vec![
        da.clone().into(),
        db.clone().into(),
        at(&ga).into(),
        at(&ga2).into(),
        at(&de).into(),
        at(&de2).into(),
        (&de2 - &ga).into(),
        (&de - &ga2).into(),
    ];
    let phi = PhiTable::from_fn(8, |s| {
        use Sign::*;
        let le = |x: Sign| x != Plus;
        let ge = |x: Sign| x != Minus;
        // With x = alpha - alpha' > 0 the crossing abscissa (beta' - beta)/x
        // must lie in [max(gamma, gamma'), min(delta, delta')].
        let meets = match (s[0], s[1]) {
            (Plus, _) => le(s[2]) && le(s[3]) && ge(s[4]) && ge(s[5]),
            (Minus, _) => ge(s[2]) && ge(s[3]) && le(s[4]) && le(s[5]),
            (Zero, Zero) => ge(s[6]) && ge(s[7]),
            (Zero, _) => false,
        };
        if meets {
            0
        } else {
            1
        }
    });
    let domain = DomainSpec::all_positive(d, vec![&Polynomial::var(d, 3) - &Polynomial::var(d, 2)]).expect("static domain");
    build(BuiltinFamilyId::Segments, graph_labels(), preds, phi, domain)
}

fn link_phi() -> PhiTable {
    PhiTable::from_fn(4, |s| if linking::link_from_signs(s) { 0 } else { 1 })
}

fn link_labels() -> LabelSet {
    LabelSet::new([LINK, NO_LINK]).expect("static labels")
}

fn circle_links() -> Family {
    let d = 6;
    let preds = vec![
        (&xv(d, 3) - &yv(d, 3)).into(),
        (&xv(d, 4) - &yv(d, 4)).into(),
        Predicate::Kernel(&linking::P4_FULL),
        Predicate::Kernel(&linking::F_FULL),
    ];
    build(BuiltinFamilyId::CircleLinks, link_labels(), preds, link_phi(), positive_radius_domain(d))
}

fn unit_circle_links() -> Family {
    let d = 5;
    let preds = vec![
        (&xv(d, 3) - &yv(d, 3)).into(),
        (&xv(d, 4) - &yv(d, 4)).into(),
        Predicate::Kernel(&linking::P4_UNIT),
        Predicate::Kernel(&linking::F_UNIT),
    ];
    build(BuiltinFamilyId::UnitCircleLinks, link_labels(), preds, link_phi(), DomainSpec::whole_space(d))
}

/// Closed balls: `P_1 = (r - r')^2 - |c - c'|^2`, `P_2 = r - r'`.
/// `(+,0)` and `(0,0)` only occur for identical balls and map to incomparable.
fn ball_orders(id: BuiltinFamilyId, m: usize) -> Family {
    let d = m + 1;
    let dr = &xv(d, m) - &yv(d, m);
    let p1 = &(&dr * &dr) - &squared_distance(d, 0..m);
    use Sign::*;
    let listed = [
        ([Plus, Minus], 0),
        ([Zero, Minus], 0),
        ([Plus, Plus], 1),
        ([Zero, Plus], 1),
        ([Minus, Plus], 2),
        ([Minus, Zero], 2),
        ([Minus, Minus], 2),
    ];
    let entries = listed.iter().map(|(s, l)| (s.to_vec(), *l)).collect();
    let phi = PhiTable::from_entries(2, &entries, Some(2)).expect("static table");
    build(id, order_labels(), vec![p1.into(), dr.into()], phi, positive_radius_domain(d))
}

fn poset_dim(d: usize) -> Family {
    let preds = (0..d).map(|s| (&yv(d, s) - &xv(d, s)).into()).collect();
    let phi = PhiTable::from_fn(d, |s| {
        let nonzero = s.iter().any(|&x| x != Sign::Zero);
        if nonzero && s.iter().all(|&x| x != Sign::Minus) {
            0
        } else if nonzero && s.iter().all(|&x| x != Sign::Plus) {
            1
        } else {
            2
        }
    });
    build(BuiltinFamilyId::PosetDim(d), order_labels(), preds, phi, DomainSpec::whole_space(d))
}

/// Deterministic spanning-seed candidates for families where one is known.
fn seed_hint(id: BuiltinFamilyId) -> Option<SeedHint> {
    use BuiltinFamilyId::*;
    match id {
        PosetDim(d) => {
            let b = |s: usize| (0..d).map(|i| rat(if i == s { 0 } else { 7 })).collect();
            Some(SeedHint {
                a_star: vec![rat(0); d],
                pairs: (0..d).map(|s| (b(s), s)).collect(),
            })
        }
        UnitDisks => Some(SeedHint {
            a_star: point(&[0, 0]),
            pairs: vec![(point(&[2, 0]), 0), (point(&[0, 2]), 0)],
        }),
        Disks => Some(SeedHint {
            a_star: point(&[0, 0, 1]),
            pairs: vec![(point(&[2, 0, 1]), 0), (point(&[0, 2, 1]), 0), (point(&[-2, 0, 1]), 0)],
        }),
        _ => None,
    }
}

pub fn builtin(id: BuiltinFamilyId) -> Family {
    use BuiltinFamilyId::*;
    match id {
        Disks => open_balls(id, 2),
        UnitDisks => open_unit_balls(id, 2),
        Balls(m) => open_balls(id, m),
        UnitBalls(m) => open_unit_balls(id, m),
        Intervals => boxes(id, 1),
        Segments => segments(),
        Boxes(m) => boxes(id, m),
        CircleLinks => circle_links(),
        UnitCircleLinks => unit_circle_links(),
        BallOrders(m) => ball_orders(id, m),
        CircleOrders => ball_orders(id, 2),
        PosetDim(d) => poset_dim(d),
    }
}

/// Looks up a built-in family by name, e.g. `DISKS` or `POSET_DIM(2)`.
pub fn builtin_by_name(name: &str) -> Result<Family, FamilyIdError> {
    Ok(builtin(name.parse()?))
}
