use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

/// Exponent vector `α = (α₁,…,αₙ)`. Ordered graded-lexicographically:
/// total degree first, then componentwise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, axis: usize) -> Self {
        let mut v = vec![0; n];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// |α|
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn decrement(&self, axis: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[axis] -= 1;
        MultiIndex(v)
    }

    /// α! = Π αⱼ!
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// All multi-indices of dimension `n` with |α| = `degree`, ascending.
    pub fn of_degree(n: usize, degree: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fill(&mut out, &mut cur, 0, degree);
        out.sort();
        out
    }
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, axis: usize, left: u32) {
    if axis + 1 == cur.len() {
        cur[axis] = left;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    for e in 0..=left {
        cur[axis] = e;
        fill(out, cur, axis + 1, left - e);
    }
}

pub fn factorial(a: u32) -> BigInt {
    (1..=a).fold(BigInt::one(), |acc, v| acc * BigInt::from(v))
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Index `(i, α)` of the derivative `(t∂t)^i (∂x)^α u`, i.e. of the
/// variable `z_{i,α}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZIndex {
    pub i: u32,
    pub alpha: MultiIndex,
}

impl ZIndex {
    pub fn new(i: u32, alpha: MultiIndex) -> Self {
        ZIndex { i, alpha }
    }

    pub fn order(&self) -> u32 {
        self.i + self.alpha.degree()
    }
}

impl Ord for ZIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.i.cmp(&other.i))
            .then_with(|| self.alpha.cmp(&other.alpha))
    }
}

impl PartialOrd for ZIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ZIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{:?})", self.i, self.alpha)
    }
}

impl fmt::Display for ZIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_{{{},{:?}}}", self.i, self.alpha)
    }
}

/// The index set Λ = {(i, α) : i + |α| ≤ m, i < m}, sorted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lambda {
    m: u32,
    n: usize,
    entries: Vec<ZIndex>,
}

impl Lambda {
    pub fn new(m: u32, n: usize) -> Self {
        let mut entries = Vec::new();
        for i in 0..m {
            for d in 0..=(m - i) {
                for alpha in MultiIndex::of_degree(n, d) {
                    entries.push(ZIndex::new(i, alpha));
                }
            }
        }
        entries.sort();
        Lambda { m, n, entries }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// N = #Λ
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ZIndex] {
        &self.entries
    }

    pub fn get(&self, pos: usize) -> &ZIndex {
        &self.entries[pos]
    }

    pub fn position(&self, z: &ZIndex) -> Option<usize> {
        self.entries.binary_search(z).ok()
    }

    pub fn contains(&self, z: &ZIndex) -> bool {
        z.i < self.m && z.order() <= self.m && z.alpha.dim() == self.n
    }
}

/// Exponents `ν = {ν_{i,α}}` over Λ, stored densely in Λ order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ZPowers(Vec<u32>);

impl ZPowers {
    pub fn zero(len: usize) -> Self {
        ZPowers(vec![0; len])
    }

    pub fn unit(len: usize, pos: usize) -> Self {
        let mut v = vec![0; len];
        v[pos] = 1;
        ZPowers(v)
    }

    pub fn from_vec(v: Vec<u32>) -> Self {
        ZPowers(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// |ν|
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, pos: usize) -> u32 {
        self.0[pos]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &ZPowers) -> ZPowers {
        ZPowers(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn decrement(&self, pos: usize) -> ZPowers {
        let mut v = self.0.clone();
        v[pos] -= 1;
        ZPowers(v)
    }

    /// Positions with a nonzero exponent, ascending (hence in Λ order).
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(p, _)| p)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_for_second_order() {
        let l1 = Lambda::new(2, 1);
        assert_eq!(l1.len(), 5);
        let l2 = Lambda::new(2, 2);
        assert_eq!(l2.len(), 9);
        assert_eq!(l2.get(0), &ZIndex::new(0, MultiIndex::zero(2)));
        assert!(l2.entries().windows(2).all(|w| w[0] < w[1]));
        for z in l2.entries() {
            assert!(z.i < 2 && z.order() <= 2);
        }
        assert_eq!(Lambda::new(1, 3).len(), 4);
    }

    #[test]
    fn graded_order() {
        let a = MultiIndex::new(vec![2, 0]);
        let b = MultiIndex::new(vec![0, 1]);
        assert!(b < a);
        assert_eq!(MultiIndex::of_degree(2, 2).len(), 3);
        assert_eq!(MultiIndex::new(vec![2, 3]).factorial(), BigInt::from(12));
        let z01 = ZIndex::new(0, MultiIndex::new(vec![1]));
        let z10 = ZIndex::new(1, MultiIndex::zero(1));
        assert!(z01 < z10);
    }
}
