//! Small exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::poly::Rat;

/// Row-major square or rectangular matrix.
pub type Matrix = Vec<Vec<Rat>>;

/// Scales each row to integers (row-wise lcm of denominators). Returns the
/// integer rows and the product of the scale factors.
fn integer_rows(m: &Matrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut total = BigInt::one();
    let rows = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            total *= &l;
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    (rows, total)
}

/// Fraction-free (Bareiss) elimination in place. Returns the rank and the
/// sign change caused by row swaps.
fn bareiss(a: &mut [Vec<BigInt>]) -> (usize, bool) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut swapped = false;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swapped = !swapped;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[i][j] * &a[r][c] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    (r, swapped)
}

/// Exact determinant of a square matrix.
pub fn determinant(m: &Matrix) -> Rat {
    let n = m.len();
    if n == 0 {
        return Rat::one();
    }
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    let (mut a, scale) = integer_rows(m);
    let (rank, swapped) = bareiss(&mut a);
    if rank < n {
        return Rat::zero();
    }
    let det = a[n - 1][n - 1].clone();
    let det = if swapped { -det } else { det };
    Rat::new(det, scale)
}

/// Exact rank.
pub fn rank(m: &Matrix) -> usize {
    if m.is_empty() {
        return 0;
    }
    let (mut a, _) = integer_rows(m);
    bareiss(&mut a).0
}

/// Exact inverse by Gauss-Jordan; `None` if singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "inverse of a non-square matrix");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(p, c);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &piv;
        }
        let pivot_row = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(m: &Matrix, v: &[Rat]) -> Vec<Rat> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn column(m: &Matrix, j: usize) -> Vec<Rat> {
    m.iter().map(|r| r[j].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{point, rat, ratio};

    #[test]
    fn determinant_small() {
        let m = vec![point(&[-4, 0, -4]), point(&[0, -4, -4]), point(&[4, 0, -4])];
        assert_eq!(determinant(&m), rat(-128));
        let s = vec![point(&[1, 2]), point(&[2, 4])];
        assert_eq!(determinant(&s), rat(0));
        let f = vec![vec![ratio(1, 2), rat(1)], vec![rat(0), ratio(2, 3)]];
        assert_eq!(determinant(&f), ratio(1, 3));
    }

    #[test]
    fn determinant_with_swaps() {
        let m = vec![point(&[0, 1]), point(&[1, 0])];
        assert_eq!(determinant(&m), rat(-1));
        let m = vec![point(&[0, 0, 1]), point(&[0, 1, 0]), point(&[1, 0, 0])];
        assert_eq!(determinant(&m), rat(-1));
    }

    #[test]
    fn rank_counts() {
        assert_eq!(rank(&vec![point(&[1, 2, 3]), point(&[2, 4, 6])]), 1);
        assert_eq!(rank(&vec![point(&[1, 2, 3]), point(&[0, 0, 1])]), 2);
        assert_eq!(rank(&vec![point(&[0, 0])]), 0);
    }

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![ratio(1, 2), rat(3)], vec![rat(-1), ratio(5, 7)]];
        let inv = inverse(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let v: Rat = (0..2).map(|k| &m[i][k] * &inv[k][j]).sum();
                assert_eq!(v, if i == j { rat(1) } else { rat(0) });
            }
        }
        assert!(inverse(&vec![point(&[1, 1]), point(&[2, 2])]).is_none());
    }
}
