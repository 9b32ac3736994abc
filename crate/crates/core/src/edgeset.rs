//! Fixed-width bitset over edge ids. 448 bits covers `Q_7` (448 edges),
//! the largest cube the search-level code handles.

pub(crate) const EDGE_WORDS: usize = 7;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct EdgeBits {
    w: [u64; EDGE_WORDS],
}

impl EdgeBits {
    pub const EMPTY: EdgeBits = EdgeBits { w: [0; EDGE_WORDS] };

    #[inline]
    pub fn insert(&mut self, id: u32) {
        self.w[(id / 64) as usize] |= 1 << (id % 64);
    }

    #[inline]
    pub fn remove(&mut self, id: u32) {
        self.w[(id / 64) as usize] &= !(1 << (id % 64));
    }

    #[inline]
    pub fn contains(&self, id: u32) -> bool {
        self.w[(id / 64) as usize] >> (id % 64) & 1 == 1
    }

    #[inline]
    pub fn is_subset_of(&self, other: &EdgeBits) -> bool {
        self.w.iter().zip(&other.w).all(|(a, b)| a & !b == 0)
    }

    pub fn count(&self) -> u32 {
        self.w.iter().map(|w| w.count_ones()).sum()
    }

    pub fn iter_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.w.iter().enumerate().flat_map(|(i, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros();
                word &= word - 1;
                Some(i as u32 * 64 + bit)
            })
        })
    }

    /// Ascending-id-list comparison for sets of equal cardinality: the
    /// smaller set is the one containing the lowest id where they differ.
    #[inline]
    pub fn lt_same_len(&self, other: &EdgeBits) -> bool {
        for i in 0..EDGE_WORDS {
            let diff = self.w[i] ^ other.w[i];
            if diff != 0 {
                let low = diff & diff.wrapping_neg();
                return self.w[i] & low != 0;
            }
        }
        false
    }

    pub fn from_ids<I: IntoIterator<Item = u32>>(ids: I) -> EdgeBits {
        let mut s = EdgeBits::EMPTY;
        for id in ids {
            s.insert(id);
        }
        s
    }
}

impl std::fmt::Debug for EdgeBits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.iter_ids()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascending_order_comparison() {
        // {0, 5} vs {0, 3}: as sorted lists [0,5] > [0,3]
        let a = EdgeBits::from_ids([0, 5]);
        let b = EdgeBits::from_ids([0, 3]);
        assert!(b.lt_same_len(&a));
        assert!(!a.lt_same_len(&b));
        assert!(!a.lt_same_len(&a));
    }

    #[test]
    fn subset_and_iteration() {
        let a = EdgeBits::from_ids([1, 64, 447]);
        let b = EdgeBits::from_ids([1, 7, 64, 130, 447]);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert_eq!(a.iter_ids().collect::<Vec<_>>(), vec![1, 64, 447]);
        assert_eq!(b.count(), 5);
    }
}
