//! Exact rational arithmetic and integer lattice linear algebra.
//!
//! Everything above this layer is written against [`Scalar`], an ordered
//! exact field. The arbitrary-precision [`BigRational`] is the default; the
//! fixed-width `Ratio<i64>` / `Ratio<i128>` are available for small inputs
//! where speed matters more than headroom. Floating point types do not
//! implement [`Scalar`] since every comparison in this crate is an exact
//! equality or sign test.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::{BigInt, ToBigInt};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero vector has no primitive representative")]
    ZeroVector,
    #[error("value {0} does not fit the scalar type")]
    Overflow(String),
}

/// An ordered exact field usable as the coordinate type of polytopes.
pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + Signed + Send + Sync + 'static
{
    fn from_i64(value: i64) -> Self;
    /// `None` when the value does not fit a fixed-width representation.
    fn from_bigint(value: &BigInt) -> Option<Self>;
    fn from_big_rational(value: &BigRational) -> Option<Self>;
    fn to_big_rational(&self) -> BigRational;
    fn is_integral(&self) -> bool;
    fn numer_big(&self) -> BigInt;
    fn denom_big(&self) -> BigInt;
}

impl Scalar for BigRational {
    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }
    fn from_bigint(value: &BigInt) -> Option<Self> {
        Some(BigRational::from_integer(value.clone()))
    }
    fn from_big_rational(value: &BigRational) -> Option<Self> {
        Some(value.clone())
    }
    fn to_big_rational(&self) -> BigRational {
        self.clone()
    }
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
    fn numer_big(&self) -> BigInt {
        self.numer().clone()
    }
    fn denom_big(&self) -> BigInt {
        self.denom().clone()
    }
}

macro_rules! fixed_width_scalar {
    ($int:ty, $conv:ident) => {
        impl Scalar for Ratio<$int> {
            fn from_i64(value: i64) -> Self {
                Ratio::from_integer(value as $int)
            }
            fn from_bigint(value: &BigInt) -> Option<Self> {
                value.$conv().map(Ratio::from_integer)
            }
            fn from_big_rational(value: &BigRational) -> Option<Self> {
                Some(Ratio::new(value.numer().$conv()?, value.denom().$conv()?))
            }
            fn to_big_rational(&self) -> BigRational {
                BigRational::new(self.numer().to_bigint().unwrap(), self.denom().to_bigint().unwrap())
            }
            fn is_integral(&self) -> bool {
                self.is_integer()
            }
            fn numer_big(&self) -> BigInt {
                self.numer().to_bigint().unwrap()
            }
            fn denom_big(&self) -> BigInt {
                self.denom().to_bigint().unwrap()
            }
        }
    };
}

fixed_width_scalar!(i64, to_i64);
fixed_width_scalar!(i128, to_i128);

/// A point of an integer lattice (an element of `M` or `N`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LatticeVector(pub Vec<BigInt>);

impl LatticeVector {
    pub fn from_i64s(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn to_scalars<S: Scalar>(&self) -> Option<Vec<S>> {
        self.0.iter().map(S::from_bigint).collect()
    }
}

impl Display for LatticeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn scale<S: Scalar>(v: &[S], k: &S) -> Vec<S> {
    v.iter().map(|x| x.clone() * k.clone()).collect()
}

pub fn is_integral_vector<S: Scalar>(v: &[S]) -> bool {
    v.iter().all(Scalar::is_integral)
}

/// Integer coordinates of an integral vector.
pub fn to_lattice<S: Scalar>(v: &[S]) -> Option<LatticeVector> {
    if !is_integral_vector(v) {
        return None;
    }
    Some(LatticeVector(v.iter().map(Scalar::numer_big).collect()))
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref<S: Scalar>(m: &mut [Vec<S>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = S::one() / m[row][col].clone();
        for x in m[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..m[r].len() {
                    let delta = factor.clone() * m[row][c].clone();
                    m[r][c] = m[r][c].clone() - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Solves `a · x = b` for square `a`.
pub fn solve_linear<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Vec<S>, ExactError> {
    let n = a.len();
    if b.len() != n {
        return Err(ExactError::DimensionMismatch { expected: n, got: b.len() });
    }
    if let Some(row) = a.iter().find(|row| row.len() != n) {
        return Err(ExactError::NotSquare { rows: n, cols: row.len() });
    }
    let mut aug: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, n);
    if pivots.len() < n {
        return Err(ExactError::Singular);
    }
    Ok(aug.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    let Some(cols) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut m = rows.to_vec();
    rref(&mut m, cols).len()
}

/// Basis of the right null space `{x : rows · x = 0}` in `Q^cols`.
pub fn kernel<S: Scalar>(rows: &[Vec<S>], cols: usize) -> Vec<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![S::zero(); cols];
            x[f] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -m[r][f].clone();
            }
            x
        })
        .collect()
}

/// The primitive lattice vector on the open ray through `v`.
pub fn primitive<S: Scalar>(v: &[S]) -> Result<LatticeVector, ExactError> {
    if v.iter().all(Zero::is_zero) {
        return Err(ExactError::ZeroVector);
    }
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(&x.denom_big()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer_big() * (&lcm / x.denom_big()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    Ok(LatticeVector(ints.into_iter().map(|x| x / &g).collect()))
}

/// Determinant of the square matrix whose rows are `vectors` (Bareiss).
pub fn det_lattice(vectors: &[LatticeVector]) -> BigInt {
    let n = vectors.len();
    assert!(
        vectors.iter().all(|v| v.len() == n),
        "det_lattice needs n vectors of length n"
    );
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = vectors.iter().map(|v| v.0.clone()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// Only the nonzero rows are returned. Pivots are positive and entries above
/// a pivot are reduced into `[0, pivot)`.
pub fn hermite_normal_form(rows: &[LatticeVector], cols: usize) -> Vec<LatticeVector> {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.0.clone()).collect();
    let mut pivot_row = 0;
    let mut pivot_cols = Vec::new();
    for col in 0..cols {
        if pivot_row == m.len() {
            break;
        }
        // Euclid on the column below pivot_row until one nonzero remains.
        loop {
            let nonzero: Vec<usize> = (pivot_row..m.len()).filter(|&r| !m[r][col].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let best = *nonzero
                .iter()
                .min_by(|&&a, &&b| m[a][col].abs().cmp(&m[b][col].abs()))
                .unwrap();
            m.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..m.len() {
                if !m[r][col].is_zero() {
                    let q = m[r][col].div_floor(&m[pivot_row][col]);
                    for c in col..cols {
                        let t = &q * &m[pivot_row][c];
                        m[r][c] -= t;
                    }
                    if !m[r][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m.len() && !m[pivot_row][col].is_zero() {
            if m[pivot_row][col].is_negative() {
                for c in col..cols {
                    m[pivot_row][c] = -m[pivot_row][c].clone();
                }
            }
            for r in 0..pivot_row {
                let q = m[r][col].div_floor(&m[pivot_row][col]);
                if !q.is_zero() {
                    for c in col..cols {
                        let t = &q * &m[pivot_row][c];
                        m[r][c] -= t;
                    }
                }
            }
            pivot_cols.push(col);
            pivot_row += 1;
        }
    }
    m.truncate(pivot_row);
    m.into_iter().map(LatticeVector).collect()
}

/// Rank of the lattice spanned by `gens`, and its index in `Z^cols` when
/// the rank is full.
pub fn lattice_rank_index(gens: &[LatticeVector], cols: usize) -> (usize, Option<BigInt>) {
    let h = hermite_normal_form(gens, cols);
    let rank = h.len();
    if rank < cols {
        return (rank, None);
    }
    let index = h
        .iter()
        .map(|row| row.0.iter().find(|x| !x.is_zero()).unwrap().clone())
        .fold(BigInt::one(), |acc, p| acc * p);
    (rank, Some(index))
}

/// Basis of the saturated lattice `{x ∈ Z^cols : rows · x = 0}`.
pub fn integer_kernel(rows: &[LatticeVector], cols: usize) -> Vec<LatticeVector> {
    let m = rows.len();
    // Row-reduce [Aᵀ | I]; the rows whose Aᵀ part vanishes span the kernel.
    let aug: Vec<LatticeVector> = (0..cols)
        .map(|c| {
            let mut r: Vec<BigInt> = rows.iter().map(|row| row.0[c].clone()).collect();
            r.extend((0..cols).map(|k| if k == c { BigInt::one() } else { BigInt::zero() }));
            LatticeVector(r)
        })
        .collect();
    let reduced = hermite_normal_form(&aug, m + cols);
    reduced
        .into_iter()
        .filter(|r| r.0[..m].iter().all(Zero::is_zero))
        .map(|r| LatticeVector(r.0[m..].to_vec()))
        .collect()
}

/// True iff the sublattices spanned by `groups` form a direct sum equal to
/// `Z^n`.
pub fn sublattice_direct_sum(groups: &[Vec<LatticeVector>], n: usize) -> bool {
    let rank_sum: usize = groups
        .iter()
        .map(|g| lattice_rank_index(g, n).0)
        .sum();
    let all: Vec<LatticeVector> = groups.iter().flatten().cloned().collect();
    let (rank, index) = lattice_rank_index(&all, n);
    rank == n && rank_sum == n && index.is_some_and(|i| i.is_one())
}
