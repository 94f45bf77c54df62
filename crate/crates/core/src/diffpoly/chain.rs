//! Chain-rule families obtained by differentiating Julia's equation.
//!
//! With `X` standing for `f'`, repeated differentiation of
//! `φ(f) = f'·φ` gives
//!
//! ```text
//! φ^{(j)}(f)·(f')^{2j−1} = Σ_{i≤j} A_ij(f')·φ^{(i)}
//! ```
//!
//! and raising these to the exponents of a multi-index `j` gives
//!
//! ```text
//! φ^j(f)·(f')^{2‖j‖−|j|} = Σ_{|i|=|j|, i≤j} B_ij(f')·φ^i.
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::{DiffPolynomial, MultiIndex};

type IntPoly = DiffPolynomial<BigInt>;

/// `A_ij` for `0 ≤ i ≤ j ≤ upper`.
#[derive(Debug, Clone)]
pub struct ChainFamilyA {
    upper: usize,
    // rows[j][i] = A_ij
    rows: Vec<Vec<IntPoly>>,
}

impl ChainFamilyA {
    pub fn upper(&self) -> usize {
        self.upper
    }

    /// `A_ij`; zero outside `i ≤ j`.
    pub fn get(&self, i: usize, j: usize) -> IntPoly {
        self.rows
            .get(j)
            .and_then(|row| row.get(i))
            .cloned()
            .unwrap_or_else(IntPoly::zero)
    }

    pub fn row(&self, j: usize) -> &[IntPoly] {
        &self.rows[j]
    }
}

/// Build `A_ij` by
/// `A_{i,j+1} = X·A_ij' + X·A_{i−1,j} − (2j−1)·X'·A_ij`, starting at `A_00 = 1`.
///
/// Differentiating `L_j = φ^{(j)}(f)(f')^{2j−1}` gives
/// `L_{j+1} = f'·L_j' − (2j−1)·f''·L_j`, which is the recurrence above
/// after expanding `L_j` in the `φ^{(i)}`.
pub fn chain_a(upper: usize) -> ChainFamilyA {
    let x = IntPoly::derivative_var(0);
    let dx = IntPoly::derivative_var(1);
    let mut rows = vec![vec![IntPoly::one()]];
    for j in 0..upper {
        let prev = &rows[j];
        let c = BigInt::from(2 * j as i64 - 1);
        let mut next = Vec::with_capacity(j + 2);
        for i in 0..=j + 1 {
            let cur = prev.get(i).cloned().unwrap_or_else(IntPoly::zero);
            let lower = if i > 0 {
                prev[i - 1].clone()
            } else {
                IntPoly::zero()
            };
            let a = x
                .mul(&cur.derive())
                .add(&x.mul(&lower))
                .sub(&dx.mul(&cur).scale(&c));
            next.push(a);
        }
        rows.push(next);
    }
    ChainFamilyA { upper, rows }
}

/// All `B_ij` for the given `j`, keyed by `i`. Only non-zero entries are kept.
pub fn chain_b(j: &MultiIndex) -> BTreeMap<MultiIndex, IntPoly> {
    let r = j.order().unwrap_or(0);
    let fam = chain_a(r);
    // product of (Σ_i A_ik·φ^{(i)})^{j_k}, as a map φ-index → coefficient in ℤ{X}
    let mut acc: BTreeMap<MultiIndex, IntPoly> = BTreeMap::new();
    acc.insert(MultiIndex::zero(), IntPoly::one());
    for k in 0..=r {
        let factor: Vec<(MultiIndex, IntPoly)> = (0..=k)
            .map(|i| (MultiIndex::unit(i), fam.get(i, k)))
            .filter(|(_, a)| !a.is_zero())
            .collect();
        for _ in 0..j.get(k) {
            let mut next: BTreeMap<MultiIndex, IntPoly> = BTreeMap::new();
            for (m, c) in &acc {
                for (u, a) in &factor {
                    let key = m.add(u);
                    let prod = c.mul(a);
                    let slot = next.entry(key).or_default();
                    *slot = slot.add(&prod);
                }
            }
            next.retain(|_, v| !v.is_zero());
            acc = next;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn ip(terms: &[(i64, &[u32])]) -> IntPoly {
        DiffPolynomial::from_terms(terms.iter().map(|(c, i)| (mi(i), BigInt::from(*c))))
    }

    #[test]
    fn first_rows() {
        let a = chain_a(2);
        assert_eq!(a.get(0, 0), IntPoly::one());
        // differentiate φ(f) = f'φ once: φ'(f) f' = f''φ + f'φ'
        assert_eq!(a.get(0, 1), ip(&[(1, &[0, 1])]));
        assert_eq!(a.get(1, 1), ip(&[(1, &[1])]));
        // twice, clearing denominators
        assert_eq!(a.get(0, 2), ip(&[(1, &[1, 0, 1]), (-1, &[0, 2])]));
        assert_eq!(a.get(1, 2), ip(&[(1, &[1, 1])]));
        assert_eq!(a.get(2, 2), ip(&[(1, &[2])]));
        assert_eq!(a.get(0, 2).rank().unwrap(), &mi(&[1, 0, 1]));
        assert_eq!(a.get(1, 2).degree_weight().unwrap(), (2, 1));
    }

    #[test]
    fn b_square_of_first_row() {
        let b = chain_b(&mi(&[0, 2]));
        assert_eq!(b.len(), 3);
        assert_eq!(b[&mi(&[2])], ip(&[(1, &[0, 2])]));
        assert_eq!(b[&mi(&[1, 1])], ip(&[(2, &[1, 1])]));
        assert_eq!(b[&mi(&[0, 2])], ip(&[(1, &[2])]));
    }

    #[test]
    fn b_diagonal_and_pure_powers() {
        let j = mi(&[0, 1, 1]);
        assert_eq!(chain_b(&j)[&j], ip(&[(1, &[3])]));
        let b = chain_b(&mi(&[4]));
        assert_eq!(b.len(), 1);
        assert_eq!(b[&mi(&[4])], IntPoly::one());
    }
}
