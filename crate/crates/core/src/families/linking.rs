//! Sign conditions deciding whether two circles in `R^3` are linked.
//!
//! A circle is `(a, b, c, d, e, r)`: center `(a, b, c)`, plane normal
//! `(d, e, 1)`, radius `r`. For non-parallel planes let `l` be their common
//! line and `L = (p_1, p_2, p_3) / q` the foot of the center of `C` on `l`.
//! `C` meets the plane of `C'` in two points iff `p_4 > 0`, and the circles
//! are linked iff exactly one of those points lies inside `C'`, which is the
//! sign of `F = 4 p_4 q W^2 - V^2`.
//!
//! The kernel is written once over a generic ring, so the same code yields
//! exact values (over [`Rat`]) and the expanded polynomials (over
//! [`Polynomial`]).

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use crate::framework::KernelPredicate;
use crate::poly::{rat, sign_of, Point, Polynomial, Rat, Sign};

pub trait KernelRing: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    /// Integer constant living in the same ring as `self`.
    fn konst(&self, c: i64) -> Self;
}

impl KernelRing for Rat {
    fn konst(&self, c: i64) -> Self {
        rat(c)
    }
}

impl KernelRing for Polynomial {
    fn konst(&self, c: i64) -> Self {
        Polynomial::constant(self.num_vars(), rat(c))
    }
}

/// Intermediate quantities for one ordered pair of circles.
#[derive(Debug, Clone)]
pub struct LinkKernel<T> {
    pub q: T,
    pub tau: [T; 3],
    pub p: [T; 3],
    pub p4: T,
    pub w: T,
    pub v: T,
    pub f: T,
}

fn sq<T: KernelRing>(x: &T) -> T {
    x.clone() * x.clone()
}

/// Line direction `l`, `tau`, `q`, and `N * tau` (so `p_i = q*center_i + (N*tau)_i`).
struct Foot<T> {
    line: [T; 3],
    tau: [T; 3],
    q: T,
    offset: [T; 3],
}

fn foot<T: KernelRing>(c1: &[T; 6], c2: &[T; 6]) -> Foot<T> {
    let [a, b, c, d, e, _] = c1.clone();
    let [a2, b2, c_2, d2, e2, _] = c2.clone();
    let zero = a.konst(0);
    let dd = d.clone() - d2.clone();
    let de = e.clone() - e2.clone();
    let cross = d.clone() * e2.clone() - d2.clone() * e.clone();
    // Direction of l: (d,e,1) x (d',e',1).
    let line = [de.clone(), zero.clone() - dd.clone(), cross.clone()];
    // Direction of l_C: line x (d,e,1).
    let tau = [
        zero.clone() - dd.clone() - e.clone() * cross.clone(),
        zero - de.clone() + d.clone() * cross.clone(),
        e * de + d * dd,
    ];
    // L = center + t*tau on the plane d'x + e'y + z = d'a' + e'b' + c', t = N/q.
    let normal_gap = d2.clone() * (a2 - a) + e2.clone() * (b2 - b) + (c_2 - c);
    let q = d2 * tau[0].clone() + e2 * tau[1].clone() + tau[2].clone();
    let offset = std::array::from_fn(|i| normal_gap.clone() * tau[i].clone());
    Foot { line, tau, q, offset }
}

fn p4_from_foot<T: KernelRing>(r: &T, ft: &Foot<T>) -> T {
    sq(r) * sq(&ft.q) - (sq(&ft.offset[0]) + sq(&ft.offset[1]) + sq(&ft.offset[2]))
}

/// Builds the kernel for circles `c1 = (a,b,c,d,e,r)` and `c2 = (a',...,r')`.
pub fn kernel<T: KernelRing>(c1: &[T; 6], c2: &[T; 6]) -> LinkKernel<T> {
    let ft = foot(c1, c2);
    let q = ft.q.clone();
    let p: [T; 3] = std::array::from_fn(|i| q.clone() * c1[i].clone() + ft.offset[i].clone());
    let p4 = p4_from_foot(&c1[5], &ft);
    let rel: [T; 3] = std::array::from_fn(|i| p[i].clone() - q.clone() * c2[i].clone());
    let line = &ft.line;
    let w = rel[0].clone() * line[0].clone() + rel[1].clone() * line[1].clone() + rel[2].clone() * line[2].clone();
    let mut v = a_neg(&(sq(&q) * q.clone() * sq(&c2[5])));
    for i in 0..3 {
        v = v + q.clone() * sq(&rel[i]) + p4.clone() * sq(&line[i]);
    }
    let f = q.konst(4) * p4.clone() * q.clone() * sq(&w) - sq(&v);
    LinkKernel {
        q,
        tau: ft.tau,
        p,
        p4,
        w,
        v,
        f,
    }
}

fn a_neg<T: KernelRing>(x: &T) -> T {
    x.konst(0) - x.clone()
}

/// Kernel for unit circles `(a,b,c,d,e)`.
pub fn unit_kernel<T: KernelRing>(c1: &[T; 5], c2: &[T; 5]) -> LinkKernel<T> {
    let one = c1[0].konst(1);
    let ext = |c: &[T; 5]| -> [T; 6] { [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone(), c[4].clone(), one.clone()] };
    kernel(&ext(c1), &ext(c2))
}

fn split6(x: &[Rat]) -> ([Rat; 6], [Rat; 6]) {
    (std::array::from_fn(|i| x[i].clone()), std::array::from_fn(|i| x[6 + i].clone()))
}

fn split5(x: &[Rat]) -> ([Rat; 5], [Rat; 5]) {
    (std::array::from_fn(|i| x[i].clone()), std::array::from_fn(|i| x[5 + i].clone()))
}

fn symbolic_full() -> &'static LinkKernel<Polynomial> {
    static CELL: OnceLock<LinkKernel<Polynomial>> = OnceLock::new();
    CELL.get_or_init(|| {
        let v = |i| Polynomial::var(12, i);
        kernel(&std::array::from_fn(v), &std::array::from_fn(|i| v(6 + i)))
    })
}

fn symbolic_unit() -> &'static LinkKernel<Polynomial> {
    static CELL: OnceLock<LinkKernel<Polynomial>> = OnceLock::new();
    CELL.get_or_init(|| {
        let v = |i| Polynomial::var(10, i);
        unit_kernel(&std::array::from_fn(v), &std::array::from_fn(|i| v(5 + i)))
    })
}

/// Expanded `q` over the 12 circle variables.
pub fn q_polynomial() -> Polynomial {
    let v = |i| Polynomial::var(12, i);
    foot(&std::array::from_fn(v), &std::array::from_fn(|i| v(6 + i))).q
}

fn eval_p4_full(x: &[Rat]) -> Rat {
    let (c1, c2) = split6(x);
    kernel(&c1, &c2).p4
}

fn eval_f_full(x: &[Rat]) -> Rat {
    let (c1, c2) = split6(x);
    kernel(&c1, &c2).f
}

fn eval_p4_unit(x: &[Rat]) -> Rat {
    let (c1, c2) = split5(x);
    unit_kernel(&c1, &c2).p4
}

fn eval_f_unit(x: &[Rat]) -> Rat {
    let (c1, c2) = split5(x);
    unit_kernel(&c1, &c2).f
}

fn expand_p4_full() -> &'static Polynomial {
    // p4 alone is small; avoid forcing the large F expansion.
    static CELL: OnceLock<Polynomial> = OnceLock::new();
    CELL.get_or_init(|| {
        let v = |i| Polynomial::var(12, i);
        partial_p4(&std::array::from_fn(v), &std::array::from_fn(|i| v(6 + i)))
    })
}

fn expand_p4_unit() -> &'static Polynomial {
    static CELL: OnceLock<Polynomial> = OnceLock::new();
    CELL.get_or_init(|| {
        let v = |i| Polynomial::var(10, i);
        let one = Polynomial::constant(10, rat(1));
        let ext = |off: usize| -> [Polynomial; 6] { std::array::from_fn(|i| if i < 5 { v(off + i) } else { one.clone() }) };
        partial_p4(&ext(0), &ext(5))
    })
}

/// `p4` computed without the `W`, `V`, `F` stages.
fn partial_p4(c1: &[Polynomial; 6], c2: &[Polynomial; 6]) -> Polynomial {
    p4_from_foot(&c1[5], &foot(c1, c2))
}

fn expand_f_full() -> &'static Polynomial {
    &symbolic_full().f
}

fn expand_f_unit() -> &'static Polynomial {
    &symbolic_unit().f
}

pub static P4_FULL: KernelPredicate = KernelPredicate {
    name: "p4",
    num_vars: 12,
    degree: 10,
    eval: eval_p4_full,
    expand: expand_p4_full,
};

pub static F_FULL: KernelPredicate = KernelPredicate {
    name: "F",
    num_vars: 12,
    degree: 28,
    eval: eval_f_full,
    expand: expand_f_full,
};

pub static P4_UNIT: KernelPredicate = KernelPredicate {
    name: "p4",
    num_vars: 10,
    degree: 10,
    eval: eval_p4_unit,
    expand: expand_p4_unit,
};

pub static F_UNIT: KernelPredicate = KernelPredicate {
    name: "F",
    num_vars: 10,
    degree: 28,
    eval: eval_f_unit,
    expand: expand_f_unit,
};

/// A circle `(a, b, c, d, e, r)` with `r > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleSpec {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
    pub e: Rat,
    pub r: Rat,
}

impl CircleSpec {
    pub fn from_point(p: &[Rat]) -> Option<Self> {
        if p.len() != 6 || p[5] <= rat(0) {
            return None;
        }
        Some(CircleSpec {
            a: p[0].clone(),
            b: p[1].clone(),
            c: p[2].clone(),
            d: p[3].clone(),
            e: p[4].clone(),
            r: p[5].clone(),
        })
    }

    pub fn to_point(&self) -> Point {
        vec![
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
            self.e.clone(),
            self.r.clone(),
        ]
    }

    fn array(&self) -> [Rat; 6] {
        [
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
            self.e.clone(),
            self.r.clone(),
        ]
    }
}

/// Outcome of the sign-condition test, with the four signs it used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDecision {
    pub linked: bool,
    /// Signs of `d - d'`, `e - e'`, `p4`, `F`.
    pub signs: [Sign; 4],
    /// Some of the four values vanished; the circles touch, share a plane
    /// direction in one slope, or the common line is tangent to `C`.
    pub boundary: bool,
}

/// Decides linking from the signs of `d - d'`, `e - e'`, `p4`, `F`.
pub fn link_from_signs(signs: &[Sign]) -> bool {
    let parallel = signs[0] == Sign::Zero && signs[1] == Sign::Zero;
    !parallel && signs[2] == Sign::Plus && signs[3] == Sign::Plus
}

pub fn linking_predicate(c1: &CircleSpec, c2: &CircleSpec) -> LinkDecision {
    let k = kernel(&c1.array(), &c2.array());
    let signs = [sign_of(&(&c1.d - &c2.d)), sign_of(&(&c1.e - &c2.e)), sign_of(&k.p4), sign_of(&k.f)];
    LinkDecision {
        linked: link_from_signs(&signs),
        signs,
        boundary: signs.contains(&Sign::Zero),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{point, ratio};

    fn circle(v: &[i64]) -> CircleSpec {
        CircleSpec::from_point(&point(v)).unwrap()
    }

    #[test]
    fn q_matches_closed_form() {
        let v = |i| Polynomial::var(12, i);
        let dd = &v(3) - &v(9);
        let de = &v(4) - &v(10);
        let cr = &(&v(3) * &v(10)) - &(&v(9) * &v(4));
        let closed = &(&(&dd * &dd) + &(&de * &de)) + &(&cr * &cr);
        assert_eq!(q_polynomial(), closed);
    }

    #[test]
    fn worked_examples() {
        let c = circle(&[0, 0, 0, 0, 0, 1]);
        let linked = linking_predicate(&c, &circle(&[1, 0, 0, 0, 1, 1]));
        assert!(linked.linked);
        // d = d' here, so the first sign is zero even though the planes meet.
        assert_eq!(linked.signs, [Sign::Zero, Sign::Minus, Sign::Plus, Sign::Plus]);
        assert!(linked.boundary);
        assert!(!linking_predicate(&c, &circle(&[100, 0, 0, 0, 1, 1])).linked);
        assert!(!linking_predicate(&c, &circle(&[0, 0, 1, 0, 0, 2])).linked);
    }

    #[test]
    fn p4_expansion_matches_structured_eval() {
        let x: Vec<Rat> = (0..12).map(|i| ratio(i * 7 % 11 - 5, 1 + i % 3)).collect();
        assert_eq!(expand_p4_full().eval(&x).unwrap(), eval_p4_full(&x));
        assert_eq!(expand_p4_full().degree(), Some(P4_FULL.degree));
        let y: Vec<Rat> = x[..10].to_vec();
        assert_eq!(expand_p4_unit().eval(&y).unwrap(), eval_p4_unit(&y));
    }

    #[test]
    fn unit_kernel_is_full_kernel_with_unit_radii() {
        let x: Vec<Rat> = (0..10).map(|i| ratio(3 * i - 13, 2 + i % 4)).collect();
        let mut full = x[..5].to_vec();
        full.push(rat(1));
        full.extend_from_slice(&x[5..]);
        full.push(rat(1));
        assert_eq!(eval_f_unit(&x), eval_f_full(&full));
        assert_eq!(eval_p4_unit(&x), eval_p4_full(&full));
    }
}
