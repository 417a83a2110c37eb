//! Small exact linear algebra kernel over arbitrary-precision rationals.
//!
//! Everything in the geometric core of the crate runs on [`Q`]
//! (arbitrary-precision rationals); this module provides the handful of
//! dense routines the rest of the crate needs: Gaussian elimination,
//! determinants, ranks, kernels and the integer (gcd-based) utilities used
//! for primitive normal vectors and lattice projections.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Z = BigInt;
pub type Q = BigRational;

/// Rational from an integer literal.
pub fn qi(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

/// Rational from numerator and denominator literals.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(Z::from(n), Z::from(d))
}

/// Integer vector promoted to rationals.
pub fn to_q_vec(v: &[Z]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// Integer-literal vector promoted to rationals.
pub fn qvec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| qi(x)).collect()
}

/// Integer-literal vector.
pub fn zvec(v: &[i64]) -> Vec<Z> {
    v.iter().map(|&x| Z::from(x)).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    assert_eq!(a.len(), b.len(), "dot: length mismatch");
    let mut acc = Q::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn dot_zq(a: &[Z], b: &[Q]) -> Q {
    assert_eq!(a.len(), b.len(), "dot_zq: length mismatch");
    let mut acc = Q::zero();
    for (x, y) in a.iter().zip(b) {
        acc += Q::from_integer(x.clone()) * y;
    }
    acc
}

pub fn dot_zz(a: &[Z], b: &[Z]) -> Z {
    assert_eq!(a.len(), b.len(), "dot_zz: length mismatch");
    let mut acc = Z::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn vec_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_scale(a: &[Q], s: &Q) -> Vec<Q> {
    a.iter().map(|x| x * s).collect()
}

pub fn vec_neg(a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Determinant by fraction-aware Gaussian elimination with partial pivoting
/// on exact entries (any nonzero pivot works, we take the first).
pub fn det(mat: &[Vec<Q>]) -> Q {
    let n = mat.len();
    if n == 0 {
        return Q::one();
    }
    assert!(mat.iter().all(|r| r.len() == n), "det: matrix not square");
    let mut m: Vec<Vec<Q>> = mat.to_vec();
    let mut result = Q::one();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !m[r][col].is_zero());
        let pr = match pivot_row {
            Some(r) => r,
            None => return Q::zero(),
        };
        if pr != col {
            m.swap(pr, col);
            result = -result;
        }
        let pivot = m[col][col].clone();
        result *= &pivot;
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    result
}

/// Row-echelon reduction in place; returns the rank and the pivot columns.
fn row_echelon(m: &mut Vec<Vec<Q>>) -> (usize, Vec<usize>) {
    let rows = m.len();
    if rows == 0 {
        return (0, vec![]);
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot_row = (rank..rows).find(|&r| !m[r][col].is_zero());
        let pr = match pivot_row {
            Some(r) => r,
            None => continue,
        };
        m.swap(pr, rank);
        let pivot = m[rank][col].clone();
        for c in col..cols {
            m[rank][c] = &m[rank][c] / &pivot;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let delta = &factor * &m[rank][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    (rank, pivots)
}

pub fn rank(mat: &[Vec<Q>]) -> usize {
    let mut m = mat.to_vec();
    row_echelon(&mut m).0
}

/// Solve `A x = b` for square nonsingular `A`.
pub fn solve_square(a: &[Vec<Q>], b: &[Q]) -> Result<Vec<Q>> {
    let n = a.len();
    if n == 0 {
        return Ok(vec![]);
    }
    if a.iter().any(|r| r.len() != n) || b.len() != n {
        return Err(Error::DimensionMismatch("solve_square shape".into()));
    }
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (rank, pivots) = row_echelon(&mut m);
    if rank < n || pivots.iter().any(|&p| p >= n) {
        return Err(Error::DimensionMismatch("singular system".into()));
    }
    Ok((0..n).map(|r| m[r][n].clone()).collect())
}

/// Solve `A x = b` for a (possibly non-square) consistent system with
/// full column rank; returns `None` when inconsistent or rank-deficient.
pub fn solve_full_col_rank(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (_, pivots) = row_echelon(&mut m);
    if pivots.iter().any(|&p| p == cols) {
        return None; // inconsistent: pivot in the augmented column
    }
    if pivots.len() < cols {
        return None; // rank-deficient
    }
    let mut x = vec![Q::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = m[r][cols].clone();
    }
    Some(x)
}

/// Any solution of a consistent system `A x = b` (free variables set to
/// zero); `None` when inconsistent.
pub fn solve_any(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (_, pivots) = row_echelon(&mut m);
    if pivots.iter().any(|&p| p == cols) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = m[r][cols].clone();
    }
    Some(x)
}

/// Basis of the (right) kernel of `A`.
pub fn kernel_basis(a: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m = a.to_vec();
    let (_, pivots) = row_echelon(&mut m);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Scale a rational vector to a primitive integer vector (clear denominators,
/// divide by the gcd of the entries), preserving direction.  Errors on zero.
pub fn primitive_integer(v: &[Q]) -> Result<Vec<Z>> {
    if is_zero_vec(v) {
        return Err(Error::DimensionMismatch(
            "primitive_integer of zero vector".into(),
        ));
    }
    let mut lcm = Z::one();
    for x in v {
        lcm = num::integer::lcm(lcm, x.denom().clone());
    }
    let ints: Vec<Z> = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let mut g = Z::zero();
    for x in &ints {
        g = num::integer::gcd(g, x.abs());
    }
    Ok(ints.iter().map(|x| x / &g).collect())
}

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b)`, `g >= 0`.
pub fn egcd(a: &Z, b: &Z) -> (Z, Z, Z) {
    if b.is_zero() {
        if a.is_negative() {
            return (-a.clone(), Z::from(-1), Z::zero());
        }
        return (a.clone(), Z::one(), Z::zero());
    }
    let (q, r) = (a / b, a % b);
    let (g, s, t) = egcd(b, &r);
    // g = s*b + t*r = s*b + t*(a - q*b)
    let new_t = s - &q * &t;
    (g, t, new_t)
}

/// For a primitive integer vector `v` of length `n`, produce a unimodular
/// completion: an `n x n` integer matrix `U` (columns) whose first column
/// `g` satisfies `<v, g> = 1` and whose remaining columns span the lattice
/// kernel of `v`.  The construction is an iterated extended gcd and is
/// deterministic in the input.
pub fn unimodular_completion(v: &[Z]) -> Result<Vec<Vec<Z>>> {
    let n = v.len();
    // Columns of the identity matrix, transformed so that v^T * U has the
    // form (g, 0, ..., 0).
    let mut cols: Vec<Vec<Z>> = (0..n)
        .map(|i| {
            let mut c = vec![Z::zero(); n];
            c[i] = Z::one();
            c
        })
        .collect();
    let mut vals: Vec<Z> = v.to_vec();
    // Fold column i into column 0 via the extended gcd, keeping the
    // transform unimodular.
    for i in 1..n {
        if vals[i].is_zero() {
            continue;
        }
        let (g, s, t) = egcd(&vals[0], &vals[i]);
        let (a, b) = (vals[0].clone(), vals[i].clone());
        // New col0 = s*col0 + t*coli ; new coli = -(b/g)*col0 + (a/g)*coli.
        let c0 = cols[0].clone();
        let ci = cols[i].clone();
        for r in 0..n {
            cols[0][r] = &s * &c0[r] + &t * &ci[r];
            cols[i][r] = -(&b / &g) * &c0[r] + (&a / &g) * &ci[r];
        }
        vals[0] = g;
        vals[i] = Z::zero();
    }
    if vals[0] == Z::from(-1) {
        for x in cols[0].iter_mut() {
            *x = -x.clone();
        }
        vals[0] = Z::one();
    }
    if vals[0] != Z::one() {
        return Err(Error::DimensionMismatch(
            "unimodular_completion requires a primitive vector".into(),
        ));
    }
    Ok(cols)
}

/// Inverse of a square rational matrix.
pub fn inverse(mat: &[Vec<Q>]) -> Result<Vec<Vec<Q>>> {
    let n = mat.len();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![Q::zero(); n];
        e[i] = Q::one();
        cols.push(solve_square(mat, &e)?);
    }
    // cols[i] is the i-th column of the inverse; transpose into rows.
    Ok((0..n)
        .map(|r| (0..n).map(|c| cols[c][r].clone()).collect())
        .collect())
}
