//! Exact linear algebra for the guesser: find the first column of a rational
//! matrix that depends on the columns before it, and the dependency.
//!
//! Columns are scaled to integers (one lcm per column) and eliminated
//! fraction-free (Bareiss), so no tolerance ever enters. A rank computation
//! modulo a few word-sized primes gives a cheap lower bound on the first
//! dependent column; a full-rank result modulo any prime certifies full
//! rank over ℚ outright.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coeff::Rational;

/// 61-bit primes used for the modular rank bound.
const PRIMES: [u64; 3] = [
    2_305_843_009_213_693_951,
    2_305_843_009_213_693_921,
    2_305_843_009_213_693_907,
];

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn reduce(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

/// Index of the first column dependent on its predecessors modulo `p`,
/// `Some(ncols)` if the columns are independent, `None` if some denominator
/// vanishes modulo `p`.
fn first_free_column_mod(cols: &[Vec<Rational>], nrows: usize, p: u64) -> Option<usize> {
    let ncols = cols.len();
    // row-major residues
    let mut m = vec![vec![0u64; ncols]; nrows];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let d = reduce(v.denom(), p);
            if d == 0 {
                return None;
            }
            m[i][j] = mulmod(reduce(v.numer(), p), powmod(d, p - 2, p), p);
        }
    }
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..nrows).find(|&r| m[r][col] != 0) else {
            return Some(col);
        };
        m.swap(rank, piv);
        let inv = powmod(m[rank][col], p - 2, p);
        for r in rank + 1..nrows {
            if m[r][col] == 0 {
                continue;
            }
            let factor = mulmod(m[r][col], inv, p);
            for c in col..ncols {
                let sub = mulmod(factor, m[rank][c], p);
                m[r][c] = (m[r][c] + p - sub) % p;
            }
        }
        rank += 1;
    }
    Some(ncols)
}

/// Scale a column to coprime integers; returns the scale factor used
/// (column_int = factor · column).
fn integer_column(col: &[Rational]) -> (Vec<BigInt>, Rational) {
    let lcm = col
        .iter()
        .filter(|v| !v.is_zero())
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = col
        .iter()
        .map(|v| (v * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return (ints, Rational::from_integer(lcm));
    }
    let ints = ints.into_iter().map(|v| v / &g).collect();
    (ints, Rational::new(lcm, g))
}

/// Bareiss elimination on the leading columns `0..ncols`. Returns the first
/// column found to depend on its predecessors together with the dependency
/// `x` (indexed like the columns, `x[first] = 1`), or `None` if all columns
/// are independent.
fn exact_first_dependency(cols: &[Vec<Rational>], nrows: usize) -> Option<(usize, Vec<Rational>)> {
    let ncols = cols.len();
    let mut scales = Vec::with_capacity(ncols);
    let mut m = vec![vec![BigInt::zero(); ncols]; nrows];
    for (j, col) in cols.iter().enumerate() {
        let (ints, s) = integer_column(col);
        for (i, v) in ints.into_iter().enumerate() {
            m[i][j] = v;
        }
        scales.push(s);
    }
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        // smallest non-zero pivot keeps intermediate entries short
        let piv = (rank..nrows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].bits());
        let Some(piv) = piv else {
            // dependent: back-substitute U·x = −u_col on the pivot rows
            let mut x = vec![Rational::zero(); ncols];
            x[col] = Rational::one();
            for r in (0..rank).rev() {
                let mut s = Rational::from_integer(m[r][col].clone());
                for c in r + 1..rank {
                    if !x[c].is_zero() {
                        s += Rational::from_integer(m[r][c].clone()) * &x[c];
                    }
                }
                x[r] = -s / Rational::from_integer(m[r][r].clone());
            }
            // undo the integer scaling: original = x_j · scale_j
            for (xj, s) in x.iter_mut().zip(&scales) {
                *xj *= s;
            }
            return Some((col, x));
        };
        m.swap(rank, piv);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            let lead = row[col].clone();
            for c in col + 1..ncols {
                let v = &pivot_row[col] * &row[c] - &lead * &pivot_row[c];
                row[c] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot_row[col].clone();
        rank += 1;
    }
    None
}

/// The first column depending on its predecessors and a kernel vector whose
/// last non-zero entry sits in that column, or `None` for full column rank.
///
/// Because later columns never enter, the returned vector is the unique (up
/// to scaling) kernel element supported on the shortest possible prefix.
pub fn first_dependency(cols: &[Vec<Rational>], nrows: usize) -> Option<(usize, Vec<Rational>)> {
    let ncols = cols.len();
    let mut lower = 0;
    for &p in &PRIMES {
        match first_free_column_mod(cols, nrows, p) {
            Some(c) if c == ncols => return None,
            Some(c) => lower = lower.max(c),
            None => continue,
        }
    }
    // Columns before `lower` are independent over ℚ. Eliminate exactly on a
    // prefix reaching `lower`; widen it in the (unlikely) case that column
    // turns out independent over ℚ too.
    let mut end = lower + 1;
    loop {
        if let Some((c, mut x)) = exact_first_dependency(&cols[..end.min(ncols)], nrows) {
            x.resize(ncols, Rational::zero());
            return Some((c, x));
        }
        if end >= ncols {
            return None;
        }
        end = (end * 2).min(ncols);
    }
}

/// Scale a rational vector to coprime integers with a positive last
/// non-zero entry.
pub fn normalize(x: &[Rational]) -> Vec<BigInt> {
    let lcm = x
        .iter()
        .filter(|v| !v.is_zero())
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut ints: Vec<BigInt> = x
        .iter()
        .map(|v| (v * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() {
        for v in ints.iter_mut() {
            *v /= &g;
        }
    }
    if ints
        .iter()
        .rev()
        .find(|v| !v.is_zero())
        .is_some_and(|v| v.is_negative())
    {
        for v in ints.iter_mut() {
            *v = -&*v;
        }
    }
    ints
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    fn cols(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        let ncols = rows[0].len();
        (0..ncols)
            .map(|j| rows.iter().map(|r| rat(r[j], 1)).collect())
            .collect()
    }

    #[test]
    fn full_rank() {
        let c = cols(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(first_dependency(&c, 3), None);
        assert_eq!(exact_first_dependency(&c, 3), None);
    }

    #[test]
    fn finds_first_dependency() {
        // col2 = col0 + 2·col1, col3 arbitrary
        let c = cols(&[&[1, 0, 1, 5], &[0, 1, 2, 7], &[1, 1, 3, 1], &[2, 0, 2, 0]]);
        let (k, x) = first_dependency(&c, 4).unwrap();
        assert_eq!(k, 2);
        assert_eq!(
            normalize(&x),
            vec![(-1).into(), (-2).into(), 1.into(), 0.into()]
        );
    }

    #[test]
    fn zero_column_is_dependent() {
        let c = cols(&[&[0, 1], &[0, 2]]);
        let (k, x) = first_dependency(&c, 2).unwrap();
        assert_eq!(k, 0);
        assert_eq!(x[0], rat(1, 1));
    }

    #[test]
    fn rational_entries() {
        let c: Vec<Vec<Rational>> = vec![
            vec![rat(1, 3), rat(1, 5), rat(2, 7)],
            vec![rat(2, 9), rat(2, 15), rat(4, 21)],
        ];
        let (k, x) = first_dependency(&c, 3).unwrap();
        assert_eq!(k, 1);
        assert_eq!(normalize(&x), vec![(-2).into(), 3.into()]);
    }

    #[test]
    fn modular_and_exact_agree() {
        let c = cols(&[&[3, 1, 4, 1], &[5, 9, 2, 6], &[5, 3, 5, 8], &[9, 7, 9, 3]]);
        assert_eq!(first_free_column_mod(&c, 4, PRIMES[0]), Some(4));
        assert_eq!(exact_first_dependency(&c, 4), None);
    }
}
