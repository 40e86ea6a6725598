//! Small dense linear algebra over F_p and Z/p^k, plus inversion in finite
//! Z/p^k-algebras through their regular representation.

use crate::error::{Error, Result};

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub(crate) fn submod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

/// Inverse of a unit modulo `m` (extended Euclid); `None` if not a unit.
pub(crate) fn invmod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// p-adic valuation of `x mod p^k`, with `k` for zero.
pub(crate) fn val_p(x: u64, p: u64, k: u32) -> u32 {
    if x == 0 {
        return k;
    }
    let (mut x, mut v) = (x, 0);
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Solves `mat * y = rhs` over F_p, `mat` given row-major and square.
/// Returns `None` when the matrix is singular.
pub(crate) fn solve_mod_p(mut mat: Vec<Vec<u64>>, mut rhs: Vec<u64>, p: u64) -> Option<Vec<u64>> {
    let n = mat.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !mat[r][col].is_multiple_of(p))?;
        mat.swap(col, piv);
        rhs.swap(col, piv);
        let inv = invmod(mat[col][col] % p, p)?;
        for j in col..n {
            mat[col][j] = mat[col][j] * inv % p;
        }
        rhs[col] = rhs[col] * inv % p;
        for r in 0..n {
            if r != col && !mat[r][col].is_multiple_of(p) {
                let f = mat[r][col] % p;
                for j in col..n {
                    mat[r][j] = (mat[r][j] + p * p - f * mat[col][j] % p) % p;
                }
                rhs[r] = (rhs[r] + p * p - f * rhs[col] % p) % p;
            }
        }
    }
    Some(rhs)
}

/// Determinant over Z/m with m = p^k, by elimination choosing in each column
/// a pivot of least valuation.
pub(crate) fn det_mod_pk(mut mat: Vec<Vec<u64>>, p: u64, k: u32) -> u64 {
    let m = p.pow(k);
    let n = mat.len();
    let mut det = 1u64;
    for col in 0..n {
        let piv = (col..n).min_by_key(|&r| val_p(mat[r][col] % m, p, k)).unwrap();
        let v = val_p(mat[piv][col] % m, p, k);
        if v >= k {
            return 0;
        }
        if piv != col {
            mat.swap(col, piv);
            det = submod(0, det, m);
        }
        let pv = mat[col][col] % m;
        det = mulmod(det, pv, m);
        let pp = p.pow(v);
        let unit_inv = invmod((pv / pp) % m, m).expect("unit part");
        for r in col + 1..n {
            let e = mat[r][col] % m;
            if e == 0 {
                continue;
            }
            // e is divisible by p^v
            let f = mulmod(e / pp, unit_inv, m);
            for j in col..n {
                let t = mulmod(f, mat[col][j], m);
                mat[r][j] = submod(mat[r][j] % m, t, m);
            }
        }
    }
    det
}

/// A finite free Z/p^k-algebra with a distinguished basis.
pub trait FiniteAlgebra: Clone {
    fn dim(&self) -> usize;
    fn coord_vec(&self) -> Vec<u64>;
    fn with_coords(&self, c: Vec<u64>) -> Self;
    fn alg_mul(&self, other: &Self) -> Self;
    fn alg_one(&self) -> Self;
    fn prime(&self) -> u64;
    fn precision(&self) -> u32;
}

/// Inverts `x` by solving the regular representation mod p and lifting with
/// Newton's iteration `y <- y(2 - xy)`. `NotUnit` iff the matrix of
/// multiplication by `x` is singular mod p.
pub fn invert_regular<A: FiniteAlgebra>(x: &A) -> Result<A> {
    let (n, p, k) = (x.dim(), x.prime(), x.precision());
    let m = p.pow(k);
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0u64; n];
        e[j] = 1;
        cols.push(x.alg_mul(&x.with_coords(e)).coord_vec());
    }
    let mat: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| cols[j][i] % p).collect()).collect();
    let one = x.alg_one();
    let rhs: Vec<u64> = one.coord_vec().iter().map(|c| c % p).collect();
    let y0 = solve_mod_p(mat, rhs, p).ok_or(Error::NotUnit)?;
    let mut y = x.with_coords(y0);
    let two: Vec<u64> = one.coord_vec().iter().map(|c| addmod(*c, *c, m)).collect();
    let two = x.with_coords(two);
    let mut prec = 1;
    while prec < k {
        let xy = x.alg_mul(&y).coord_vec();
        let corr: Vec<u64> = two.coord_vec().iter().zip(&xy).map(|(a, b)| submod(*a, *b, m)).collect();
        y = y.alg_mul(&x.with_coords(corr));
        prec *= 2;
    }
    debug_assert_eq!(x.alg_mul(&y).coord_vec(), one.coord_vec());
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_mod_prime_power() {
        // det [[2,1],[4,3]] = 2
        assert_eq!(det_mod_pk(vec![vec![2, 1], vec![4, 3]], 2, 5), 2);
        // det [[3,9],[1,6]] = 18 - 9 = 9 mod 27
        assert_eq!(det_mod_pk(vec![vec![3, 9], vec![1, 6]], 3, 3), 9);
        assert_eq!(det_mod_pk(vec![vec![0, 1], vec![1, 0]], 5, 2), 24);
    }

    #[test]
    fn solve_over_fp() {
        let y = solve_mod_p(vec![vec![1, 2], vec![3, 4]], vec![1, 0], 5).unwrap();
        assert_eq!((y[0] + 2 * y[1]) % 5, 1);
        assert_eq!((3 * y[0] + 4 * y[1]) % 5, 0);
        assert!(solve_mod_p(vec![vec![1, 2], vec![2, 4]], vec![1, 0], 5).is_none());
    }

    #[test]
    fn modular_inverse() {
        assert_eq!(invmod(11, 16), Some(3));
        assert_eq!(invmod(4, 16), None);
    }
}
