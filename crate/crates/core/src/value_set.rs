use std::fmt;

/// Largest range a variable may declare. Sets of range positions are stored as bitmasks.
pub const MAX_RANGE: usize = 64;

/// A set of positions within a variable's range.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueSet(u64);

impl ValueSet {
    pub const fn empty() -> Self {
        ValueSet(0)
    }

    pub fn singleton(v: usize) -> Self {
        debug_assert!(v < MAX_RANGE);
        ValueSet(1 << v)
    }

    /// All values `0..n`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_RANGE);
        if n == MAX_RANGE {
            ValueSet(u64::MAX)
        } else {
            ValueSet((1u64 << n) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        ValueSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn contains(self, v: usize) -> bool {
        v < MAX_RANGE && self.0 & (1 << v) != 0
    }

    pub fn union(self, other: ValueSet) -> ValueSet {
        ValueSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: ValueSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_singleton(self) -> bool {
        self.0.is_power_of_two()
    }

    /// The only element, if the set has exactly one.
    pub fn single(self) -> Option<usize> {
        self.is_singleton().then(|| self.0.trailing_zeros() as usize)
    }

    /// Elements in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(v)
        })
    }
}

impl FromIterator<usize> for ValueSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ValueSet::empty();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_operations() {
        let a: ValueSet = [0, 2].into_iter().collect();
        let b = ValueSet::singleton(2);
        assert!(b.is_subset(a));
        assert!(!a.is_subset(b));
        assert_eq!(a.len(), 2);
        assert_eq!(b.single(), Some(2));
        assert_eq!(a.single(), None);
        assert_eq!(a.union(ValueSet::singleton(1)), ValueSet::full(3));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 2]);
        assert!(ValueSet::empty().is_empty());
        assert_eq!(ValueSet::full(64).len(), 64);
    }
}
