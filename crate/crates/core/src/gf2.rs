//! Sparse vectors over `𝔽₂` on interned `u32` coordinates, with an echelon
//! basis whose pivots are leading (largest) coordinates.

use std::collections::{BTreeSet, HashMap};

/// Sorted, duplicate-free coordinate list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SVec(Vec<u32>);

impl SVec {
    pub fn zero() -> SVec {
        SVec(Vec::new())
    }

    pub fn unit(k: u32) -> SVec {
        SVec(vec![k])
    }

    /// From arbitrary coordinates; repeated coordinates cancel in pairs.
    pub fn from_coords<I: IntoIterator<Item = u32>>(it: I) -> SVec {
        let mut v: Vec<u32> = it.into_iter().collect();
        v.sort_unstable();
        let mut out: Vec<u32> = Vec::with_capacity(v.len());
        for k in v {
            if out.last() == Some(&k) {
                out.pop();
            } else {
                out.push(k);
            }
        }
        SVec(out)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lead(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn contains(&self, k: u32) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    pub fn xor(&self, other: &SVec) -> SVec {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        SVec(out)
    }

    /// Drops every coordinate for which `keep` is false.
    pub fn filter(&self, keep: impl Fn(u32) -> bool) -> SVec {
        SVec(self.0.iter().copied().filter(|&k| keep(k)).collect())
    }

    /// Number of shared coordinates mod 2.
    pub fn dot(&self, other: &SVec) -> bool {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j, mut c) = (0, 0, 0usize);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    c += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        c % 2 == 1
    }
}

/// Echelon basis: each stored vector's largest coordinate is its pivot and
/// pivots are distinct.
#[derive(Clone, Debug, Default)]
pub struct Basis {
    rows: HashMap<u32, SVec>,
}

impl Basis {
    pub fn new() -> Basis {
        Basis::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// The unique representative of `v + span` with no pivot coordinate.
    pub fn reduce(&self, v: &SVec) -> SVec {
        if self.rows.is_empty() {
            return v.clone();
        }
        let mut work: BTreeSet<u32> = v.0.iter().copied().collect();
        let mut cursor = u32::MAX;
        loop {
            let next = work.range(..=cursor).rev().find(|k| self.rows.contains_key(k)).copied();
            let Some(k) = next else { break };
            for &c in &self.rows[&k].0 {
                if !work.remove(&c) {
                    work.insert(c);
                }
            }
            if k == 0 {
                break;
            }
            cursor = k - 1;
        }
        SVec(work.into_iter().collect())
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &SVec) -> bool {
        let mut r = v.clone();
        while let Some(k) = r.lead() {
            match self.rows.get(&k) {
                Some(row) => r = r.xor(row),
                None => {
                    self.rows.insert(k, r);
                    return true;
                }
            }
        }
        false
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_and_dot() {
        let a = SVec::from_coords([1, 3, 5]);
        let b = SVec::from_coords([3, 4]);
        assert_eq!(a.xor(&b), SVec::from_coords([1, 4, 5]));
        assert!(a.dot(&b));
        assert_eq!(SVec::from_coords([2, 2, 7]), SVec::unit(7));
    }

    #[test]
    fn reduction_is_canonical() {
        let mut basis = Basis::new();
        assert!(basis.insert(&SVec::from_coords([0, 5])));
        assert!(basis.insert(&SVec::from_coords([0, 3])));
        assert!(!basis.insert(&SVec::from_coords([3, 5])));
        let x = SVec::from_coords([5, 7]);
        let y = x.xor(&SVec::from_coords([3, 5]));
        assert_eq!(basis.reduce(&x), basis.reduce(&y));
        assert!(basis.contains(&SVec::from_coords([0, 3])));
        assert!(!basis.contains(&SVec::unit(7)));
    }
}
