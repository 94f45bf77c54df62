use std::cmp::Ordering;
use std::fmt;

/// Exponent pattern `(i_0, …, i_r)` of a differential monomial
/// `Y^{i_0} (Y')^{i_1} ⋯ (Y^{(r)})^{i_r}`.
///
/// Trailing zeros are stripped, so `(1, 0)` and `(1)` are the same index.
/// Ordering is anti-lexicographic: indices are compared from the highest
/// position down.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(mut entries: Vec<u32>) -> Self {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        MultiIndex(entries)
    }

    /// The all-zero index (the monomial `1`).
    pub fn zero() -> Self {
        MultiIndex(Vec::new())
    }

    /// `e_k`: the single factor `Y^{(k)}`.
    pub fn unit(k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = 1;
        MultiIndex(v)
    }

    /// `(n)`: the pure power `Y^n`.
    pub fn power(n: u32) -> Self {
        MultiIndex::new(vec![n])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Highest derivative occurring, `None` for the zero index.
    pub fn order(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// `|i| = i_0 + … + i_r`
    pub fn abs(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `‖i‖ = i_1 + 2 i_2 + … + r i_r`
    pub fn wt(&self) -> u32 {
        self.0.iter().enumerate().map(|(k, &e)| k as u32 * e).sum()
    }

    /// Exponent-wise sum (the index of a product of monomials).
    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        MultiIndex::new((0..n).map(|k| self.get(k) + other.get(k)).collect())
    }

    /// Lower `i_from` by one and raise `i_to` by one.
    pub(crate) fn moved(&self, from: usize, to: usize) -> Self {
        let n = self.0.len().max(to + 1);
        let mut v: Vec<u32> = (0..n).map(|k| self.get(k)).collect();
        v[from] -= 1;
        v[to] += 1;
        MultiIndex::new(v)
    }

    /// All indices with `order ≤ max_order` and `|i| ≤ max_degree`, in
    /// ascending anti-lexicographic order.
    pub fn enumerate(max_order: usize, max_degree: u32) -> Vec<MultiIndex> {
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if pos == cur.len() {
                out.push(MultiIndex::new(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur[pos] = e;
                rec(pos + 1, left - e, cur, out);
            }
            cur[pos] = 0;
        }
        let mut out = Vec::new();
        rec(0, max_degree, &mut vec![0; max_order + 1], &mut out);
        out.sort();
        out
    }
}

/// Anti-lexicographic comparison: `i < j` iff at the highest position where
/// they differ, `i` has the smaller entry.
pub fn compare_antilex(i: &MultiIndex, j: &MultiIndex) -> Ordering {
    let n = i.0.len().max(j.0.len());
    for k in (0..n).rev() {
        match i.get(k).cmp(&j.get(k)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_antilex(self, other)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
