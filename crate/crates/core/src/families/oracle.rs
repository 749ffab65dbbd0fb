//! Direct geometric answers for the built-in families, computed without the
//! pair predicates. Tests compare them with the sign-condition labels.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::families::BuiltinFamilyId;
use crate::poly::{rat_to_f64, Rat};

/// Verdict of an oracle; label indices follow the built-in family's label set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    Label(usize),
    Inconclusive,
}

const EDGE: usize = 0;
const NON_EDGE: usize = 1;
const PREC: usize = 0;
const SUCC: usize = 1;
const INCOMPARABLE: usize = 2;

fn dist2(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn intersect_flag(yes: bool) -> OracleVerdict {
    OracleVerdict::Label(if yes { EDGE } else { NON_EDGE })
}

pub fn oracle_relation(id: &BuiltinFamilyId, a: &[Rat], b: &[Rat]) -> OracleVerdict {
    match id {
        BuiltinFamilyId::Disks => open_balls(a, b, None),
        BuiltinFamilyId::Balls(_) => open_balls(a, b, None),
        BuiltinFamilyId::UnitDisks | BuiltinFamilyId::UnitBalls(_) => open_balls(a, b, Some(1)),
        BuiltinFamilyId::Intervals => intersect_flag(boxes_meet(a, b)),
        BuiltinFamilyId::Boxes(_) => intersect_flag(boxes_meet(a, b)),
        BuiltinFamilyId::Segments => intersect_flag(segments_meet(a, b)),
        BuiltinFamilyId::CircleLinks => link_verdict(a, b),
        BuiltinFamilyId::UnitCircleLinks => {
            let ext = |p: &[Rat]| {
                let mut v = p.to_vec();
                v.push(Rat::from_integer(1.into()));
                v
            };
            link_verdict(&ext(a), &ext(b))
        }
        BuiltinFamilyId::BallOrders(_) | BuiltinFamilyId::CircleOrders => containment(a, b),
        BuiltinFamilyId::PosetDim(_) => dominance(a, b),
    }
}

/// Open balls given as `(center..., radius)`, or centers only with a fixed radius.
fn open_balls(a: &[Rat], b: &[Rat], unit_radius: Option<i64>) -> OracleVerdict {
    let (ca, cb, reach) = match unit_radius {
        Some(r) => (a, b, Rat::from_integer((2 * r).into())),
        None => {
            let m = a.len() - 1;
            (&a[..m], &b[..m], &a[m] + &b[m])
        }
    };
    intersect_flag(dist2(ca, cb) < &reach * &reach)
}

/// Closed boxes `(l_1, h_1, ..., l_m, h_m)`; they meet iff every axis overlaps.
fn boxes_meet(a: &[Rat], b: &[Rat]) -> bool {
    a.chunks(2).zip(b.chunks(2)).all(|(p, q)| {
        let lo = if p[0] > q[0] { &p[0] } else { &q[0] };
        let hi = if p[1] < q[1] { &p[1] } else { &q[1] };
        lo <= hi
    })
}

fn orient(p: &(Rat, Rat), q: &(Rat, Rat), r: &(Rat, Rat)) -> Ordering {
    let v = (&q.0 - &p.0) * (&r.1 - &p.1) - (&q.1 - &p.1) * (&r.0 - &p.0);
    v.cmp(&Rat::from_integer(0.into()))
}

fn on_segment(p: &(Rat, Rat), q: &(Rat, Rat), r: &(Rat, Rat)) -> bool {
    // r collinear with p, q; check the bounding box.
    let within = |x: &Rat, u: &Rat, w: &Rat| (u <= x && x <= w) || (w <= x && x <= u);
    within(&r.0, &p.0, &q.0) && within(&r.1, &p.1, &q.1)
}

/// Closed segments `y = alpha x + beta`, `gamma <= x <= delta`, tested with
/// orientation predicates on their endpoints.
fn segments_meet(s: &[Rat], t: &[Rat]) -> bool {
    let ends = |v: &[Rat]| {
        let at = |x: &Rat| (x.clone(), &v[0] * x + &v[1]);
        (at(&v[2]), at(&v[3]))
    };
    let (p1, p2) = ends(s);
    let (q1, q2) = ends(t);
    let o1 = orient(&p1, &p2, &q1);
    let o2 = orient(&p1, &p2, &q2);
    let o3 = orient(&q1, &q2, &p1);
    let o4 = orient(&q1, &q2, &p2);
    if o1 != o2 && o3 != o4 && o1 != Ordering::Equal && o2 != Ordering::Equal && o3 != Ordering::Equal && o4 != Ordering::Equal {
        return true;
    }
    (o1 == Ordering::Equal && on_segment(&p1, &p2, &q1))
        || (o2 == Ordering::Equal && on_segment(&p1, &p2, &q2))
        || (o3 == Ordering::Equal && on_segment(&q1, &q2, &p1))
        || (o4 == Ordering::Equal && on_segment(&q1, &q2, &p2))
}

/// Closed balls `(center..., radius)`: `a` inside `b` iff `|c_a - c_b| <= r_b - r_a`.
fn containment(a: &[Rat], b: &[Rat]) -> OracleVerdict {
    let m = a.len() - 1;
    let d2 = dist2(&a[..m], &b[..m]);
    let inside = |x: &[Rat], y: &[Rat]| {
        let gap = &y[m] - &x[m];
        gap > Rat::from_integer(0.into()) && d2 <= &gap * &gap
    };
    OracleVerdict::Label(if inside(a, b) {
        PREC
    } else if inside(b, a) {
        SUCC
    } else {
        INCOMPARABLE
    })
}

fn dominance(a: &[Rat], b: &[Rat]) -> OracleVerdict {
    if a == b {
        return OracleVerdict::Label(INCOMPARABLE);
    }
    OracleVerdict::Label(if a.iter().zip(b).all(|(x, y)| x <= y) {
        PREC
    } else if a.iter().zip(b).all(|(x, y)| x >= y) {
        SUCC
    } else {
        INCOMPARABLE
    })
}

fn link_verdict(a: &[Rat], b: &[Rat]) -> OracleVerdict {
    let f = |p: &[Rat]| -> [f64; 6] { std::array::from_fn(|i| rat_to_f64(&p[i])) };
    match gauss_linking(&f(a), &f(b), GAUSS_NODES) {
        GaussResult::Conclusive(lk) => OracleVerdict::Label(if lk != 0 { EDGE } else { NON_EDGE }),
        GaussResult::Inconclusive => OracleVerdict::Inconclusive,
    }
}

pub const GAUSS_NODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussResult {
    Conclusive(i64),
    Inconclusive,
}

type V3 = [f64; 3];

fn cross(u: V3, v: V3) -> V3 {
    [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

fn dot(u: V3, v: V3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn unit(u: V3) -> V3 {
    let n = dot(u, u).sqrt();
    [u[0] / n, u[1] / n, u[2] / n]
}

/// Points and tangents of a circle `(a,b,c,d,e,r)` at `nodes` equally spaced angles.
fn sample_circle(c: &[f64; 6], nodes: usize) -> (Vec<V3>, Vec<V3>) {
    let normal = unit([c[3], c[4], 1.0]);
    // (d,e,1) x (1,0,0) = (0, 1, -e) is never zero.
    let u = unit(cross([c[3], c[4], 1.0], [1.0, 0.0, 0.0]));
    let w = cross(normal, u);
    let r = c[5];
    let mut pts = Vec::with_capacity(nodes);
    let mut tan = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let t = 2.0 * PI * k as f64 / nodes as f64;
        let (s, co) = t.sin_cos();
        pts.push(std::array::from_fn(|i| [c[0], c[1], c[2]][i] + r * (co * u[i] + s * w[i])));
        tan.push(std::array::from_fn(|i| r * (-s * u[i] + co * w[i])));
    }
    (pts, tan)
}

/// Gauss linking integral by the product trapezoidal rule. Inconclusive when
/// the value is within 0.2 of a half-integer or the circles come closer than
/// four node spacings (the rule is unreliable there).
pub fn gauss_linking(c1: &[f64; 6], c2: &[f64; 6], nodes: usize) -> GaussResult {
    let (p1, t1) = sample_circle(c1, nodes);
    let (p2, t2) = sample_circle(c2, nodes);
    let h = 2.0 * PI / nodes as f64;
    let spacing = h * c1[5].max(c2[5]);
    let mut total = 0.0;
    let mut min_d2 = f64::INFINITY;
    for (x, dx) in p1.iter().zip(&t1) {
        for (y, dy) in p2.iter().zip(&t2) {
            let diff = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
            let d2 = dot(diff, diff);
            min_d2 = min_d2.min(d2);
            total += dot(cross(*dx, *dy), diff) / (d2 * d2.sqrt());
        }
    }
    if min_d2.sqrt() < 4.0 * spacing {
        return GaussResult::Inconclusive;
    }
    let lk = total * h * h / (4.0 * PI);
    let frac = lk - lk.floor();
    if (frac - 0.5).abs() < 0.2 || !lk.is_finite() {
        return GaussResult::Inconclusive;
    }
    GaussResult::Conclusive(lk.round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::point;

    #[test]
    fn gauss_detects_hopf_link() {
        let a = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let b = [1.0, 0.0, 0.0, 0.0, 1.0, 1.0];
        match gauss_linking(&a, &b, 512) {
            GaussResult::Conclusive(lk) => assert_eq!(lk.abs(), 1),
            GaussResult::Inconclusive => panic!("inconclusive on a clean link"),
        }
        let far = [100.0, 0.0, 0.0, 0.0, 1.0, 1.0];
        assert_eq!(gauss_linking(&a, &far, 512), GaussResult::Conclusive(0));
    }

    #[test]
    fn segment_oracle_cases() {
        // Crossing diagonals.
        assert!(segments_meet(&point(&[1, 0, 0, 2]), &point(&[-1, 2, 0, 2])));
        // Collinear on y = x, overlapping and disjoint.
        assert!(segments_meet(&point(&[1, 0, 0, 2]), &point(&[1, 0, 1, 3])));
        assert!(!segments_meet(&point(&[1, 0, 0, 1]), &point(&[1, 0, 2, 3])));
        // Parallel, distinct lines.
        assert!(!segments_meet(&point(&[1, 0, 0, 2]), &point(&[1, 1, 0, 2])));
        // Touching at an endpoint.
        assert!(segments_meet(&point(&[0, 0, 0, 1]), &point(&[1, -1, 1, 2])));
    }

    #[test]
    fn disk_and_order_oracles() {
        assert_eq!(open_balls(&point(&[0, 0, 1]), &point(&[1, 0, 1]), None), OracleVerdict::Label(EDGE));
        assert_eq!(open_balls(&point(&[0, 0, 1]), &point(&[2, 0, 1]), None), OracleVerdict::Label(NON_EDGE));
        assert_eq!(containment(&point(&[0, 0, 1]), &point(&[0, 1, 3])), OracleVerdict::Label(PREC));
        assert_eq!(containment(&point(&[0, 1, 3]), &point(&[0, 0, 1])), OracleVerdict::Label(SUCC));
        assert_eq!(dominance(&point(&[1, 2]), &point(&[2, 1])), OracleVerdict::Label(INCOMPARABLE));
    }
}
