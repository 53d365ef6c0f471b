use std::fmt;

use serde::{Deserialize, Serialize};

/// The five motif families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MotifCategory {
    #[serde(rename = "TWO_NODE")]
    TwoNode,
    #[serde(rename = "OUTWARD_STAR")]
    OutwardStar,
    #[serde(rename = "INWARD_STAR")]
    InwardStar,
    #[serde(rename = "MIXED_STAR")]
    MixedStar,
    #[serde(rename = "TRIANGLE")]
    Triangle,
}

impl MotifCategory {
    pub const ALL: [MotifCategory; 5] = [
        MotifCategory::TwoNode,
        MotifCategory::OutwardStar,
        MotifCategory::InwardStar,
        MotifCategory::MixedStar,
        MotifCategory::Triangle,
    ];

    /// Categories normalised together in role proportions.
    pub const THREE_NODE: [MotifCategory; 4] = [
        MotifCategory::OutwardStar,
        MotifCategory::InwardStar,
        MotifCategory::MixedStar,
        MotifCategory::Triangle,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MotifCategory::TwoNode => "TWO_NODE",
            MotifCategory::OutwardStar => "OUTWARD_STAR",
            MotifCategory::InwardStar => "INWARD_STAR",
            MotifCategory::MixedStar => "MIXED_STAR",
            MotifCategory::Triangle => "TRIANGLE",
        }
    }
}

impl fmt::Display for MotifCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Isomorphism-and-order class of a time-ordered edge triple.
///
/// Nodes are renamed to slots 0, 1, 2 in order of first appearance, so the
/// first edge is always `0 -> 1` and later edges are expressed relative to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MotifSignature {
    edges: [(u8, u8); 3],
}

impl MotifSignature {
    /// Canonical signature of three time-ordered directed edges, or `None` if
    /// they span more than three nodes or contain a self-loop.
    pub fn of<T: PartialEq + Copy>(edges: [(T, T); 3]) -> Option<Self> {
        let mut slots: Vec<T> = Vec::with_capacity(3);
        let mut slot = |n: T| -> Option<u8> {
            if let Some(i) = slots.iter().position(|&s| s == n) {
                return Some(i as u8);
            }
            if slots.len() == 3 {
                return None;
            }
            slots.push(n);
            Some(slots.len() as u8 - 1)
        };
        let mut out = [(0u8, 0u8); 3];
        for (i, (a, b)) in edges.into_iter().enumerate() {
            if a == b {
                return None;
            }
            out[i] = (slot(a)?, slot(b)?);
        }
        Some(Self { edges: out })
    }

    pub fn edges(&self) -> [(u8, u8); 3] {
        self.edges
    }

    pub fn node_count(&self) -> usize {
        self.edges
            .iter()
            .map(|(a, b)| (*a).max(*b) as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// The slot incident to every edge, for three-node motifs.
    pub fn centre(&self) -> Option<u8> {
        if self.node_count() != 3 {
            return None;
        }
        (0..3u8).find(|&s| self.edges.iter().all(|(a, b)| *a == s || *b == s))
    }

    pub fn category(&self) -> MotifCategory {
        if self.node_count() == 2 {
            return MotifCategory::TwoNode;
        }
        match self.centre() {
            None => MotifCategory::Triangle,
            Some(c) => {
                let out = self.edges.iter().filter(|(a, _)| *a == c).count();
                match out {
                    3 => MotifCategory::OutwardStar,
                    0 => MotifCategory::InwardStar,
                    _ => MotifCategory::MixedStar,
                }
            }
        }
    }

    /// Every distinct signature, sorted.
    pub fn all() -> Vec<MotifSignature> {
        let pairs: Vec<(u8, u8)> = (0..3u8)
            .flat_map(|a| (0..3u8).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        let mut out: Vec<MotifSignature> = pairs
            .iter()
            .flat_map(|&e2| pairs.iter().map(move |&e3| [(0u8, 1u8), e2, e3]))
            .filter_map(MotifSignature::of)
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for MotifSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.edges;
        write!(f, "{}{}-{}{}-{}{}", a.0, a.1, b.0, b.1, c.0, c.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirty_six_signatures() {
        let all = MotifSignature::all();
        assert_eq!(all.len(), 36);
        let count = |c| all.iter().filter(|s| s.category() == c).count();
        assert_eq!(count(MotifCategory::TwoNode), 4);
        assert_eq!(count(MotifCategory::OutwardStar), 3);
        assert_eq!(count(MotifCategory::InwardStar), 3);
        assert_eq!(count(MotifCategory::MixedStar), 18);
        assert_eq!(count(MotifCategory::Triangle), 8);
    }

    #[test]
    fn first_edge_is_reference() {
        for s in MotifSignature::all() {
            assert_eq!(s.edges()[0], (0, 1));
        }
    }

    #[test]
    fn examples() {
        let s = MotifSignature::of([('a', 'b'), ('a', 'c'), ('a', 'b')]).unwrap();
        assert_eq!(s.category(), MotifCategory::OutwardStar);
        let s = MotifSignature::of([('a', 'b'), ('b', 'c'), ('c', 'a')]).unwrap();
        assert_eq!(s.category(), MotifCategory::Triangle);
        let s = MotifSignature::of([('a', 'b'), ('b', 'a'), ('a', 'b')]).unwrap();
        assert_eq!(s.category(), MotifCategory::TwoNode);
        let s = MotifSignature::of([('b', 'a'), ('c', 'a'), ('b', 'a')]).unwrap();
        assert_eq!(s.category(), MotifCategory::InwardStar);
        let s = MotifSignature::of([('a', 'b'), ('c', 'a'), ('a', 'c')]).unwrap();
        assert_eq!(s.category(), MotifCategory::MixedStar);
        assert!(MotifSignature::of([('a', 'b'), ('c', 'd'), ('a', 'b')]).is_none());
    }

    #[test]
    fn relabelling_keeps_signature() {
        let a = MotifSignature::of([(1, 2), (2, 3), (1, 3)]).unwrap();
        let b = MotifSignature::of([(9, 4), (4, 7), (9, 7)]).unwrap();
        assert_eq!(a, b);
    }
}
