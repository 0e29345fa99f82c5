use std::fmt;

use serde::{Deserialize, Serialize};

/// A named random variable of the C-RAN system. Indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    /// Auxiliary (Marton) variable of user `k`.
    User(usize),
    /// Transmit signal of base station `l`.
    Bs(usize),
    /// Received signal of user `k`.
    Output(usize),
    /// Any other variable a builder needs, e.g. the DPC streams.
    Aux(usize),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::User(k) => write!(f, "U{}", k + 1),
            Symbol::Bs(l) => write!(f, "X{}", l + 1),
            Symbol::Output(k) => write!(f, "Y{}", k + 1),
            Symbol::Aux(i) => write!(f, "A{}", i + 1),
        }
    }
}

/// Bitmask over the symbol positions of one distribution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolSet(u64);

impl SymbolSet {
    pub const EMPTY: SymbolSet = SymbolSet(0);

    pub fn from_bits(bits: u64) -> Self {
        SymbolSet(bits)
    }

    pub fn singleton(pos: usize) -> Self {
        assert!(pos < 64, "symbol position {pos} out of range");
        SymbolSet(1 << pos)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, pos: usize) -> bool {
        pos < 64 && self.0 & (1 << pos) != 0
    }

    pub fn union(self, other: SymbolSet) -> Self {
        SymbolSet(self.0 | other.0)
    }

    pub fn intersection(self, other: SymbolSet) -> Self {
        SymbolSet(self.0 & other.0)
    }

    pub fn difference(self, other: SymbolSet) -> Self {
        SymbolSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: SymbolSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: SymbolSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Positions in increasing order.
    pub fn positions(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |&i| bits & (1 << i) != 0)
    }
}

impl std::ops::BitOr for SymbolSet {
    type Output = SymbolSet;
    fn bitor(self, rhs: SymbolSet) -> SymbolSet {
        self.union(rhs)
    }
}

impl std::ops::BitOrAssign for SymbolSet {
    fn bitor_assign(&mut self, rhs: SymbolSet) {
        self.0 |= rhs.0;
    }
}

impl FromIterator<SymbolSet> for SymbolSet {
    fn from_iter<I: IntoIterator<Item = SymbolSet>>(iter: I) -> Self {
        iter.into_iter().fold(SymbolSet::EMPTY, |acc, s| acc | s)
    }
}

/// Iterate over the members of a small index bitmask (users or base stations).
pub fn mask_members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&i| mask & (1 << i) != 0)
}

/// Mask with the lowest `n` bits set.
pub fn full_mask(n: usize) -> u32 {
    assert!(n <= 31, "ground set too large for a u32 mask");
    (1u32 << n) - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = SymbolSet::singleton(0) | SymbolSet::singleton(3);
        let b = SymbolSet::singleton(3) | SymbolSet::singleton(5);
        assert_eq!(a.intersection(b), SymbolSet::singleton(3));
        assert_eq!(a.difference(b), SymbolSet::singleton(0));
        assert!(!a.is_disjoint(b));
        assert_eq!(a.union(b).positions().collect::<Vec<_>>(), vec![0, 3, 5]);
        assert!(SymbolSet::singleton(3).is_subset(a));
        assert_eq!(mask_members(0b1010).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(full_mask(3), 0b111);
    }

    #[test]
    fn display() {
        assert_eq!(Symbol::User(0).to_string(), "U1");
        assert_eq!(Symbol::Bs(1).to_string(), "X2");
        assert_eq!(Symbol::Output(2).to_string(), "Y3");
    }
}
