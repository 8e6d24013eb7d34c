//! Clopen subsets of the Cantor set `{0,1}^N`.
//!
//! A clopen set is a finite union of cylinders `[w]` (all sequences with
//! prefix `w`). Sets are stored as a reduced binary trie: a node is empty,
//! full, or split on the next bit, and a split whose children are both
//! empty or both full is collapsed. Reduced tries are unique per point
//! set, so structural equality is set equality.

use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
enum Node {
    Empty,
    Full,
    Split(Box<Node>, Box<Node>),
}

fn split(zero: Node, one: Node) -> Node {
    match (zero, one) {
        (Node::Empty, Node::Empty) => Node::Empty,
        (Node::Full, Node::Full) => Node::Full,
        (zero, one) => Node::Split(Box::new(zero), Box::new(one)),
    }
}

fn union(a: &Node, b: &Node) -> Node {
    match (a, b) {
        (Node::Full, _) | (_, Node::Full) => Node::Full,
        (Node::Empty, x) | (x, Node::Empty) => x.clone(),
        (Node::Split(a0, a1), Node::Split(b0, b1)) => split(union(a0, b0), union(a1, b1)),
    }
}

fn intersection(a: &Node, b: &Node) -> Node {
    match (a, b) {
        (Node::Empty, _) | (_, Node::Empty) => Node::Empty,
        (Node::Full, x) | (x, Node::Full) => x.clone(),
        (Node::Split(a0, a1), Node::Split(b0, b1)) => {
            split(intersection(a0, b0), intersection(a1, b1))
        }
    }
}

fn complement(a: &Node) -> Node {
    match a {
        Node::Empty => Node::Full,
        Node::Full => Node::Empty,
        Node::Split(a0, a1) => split(complement(a0), complement(a1)),
    }
}

fn depth(a: &Node) -> usize {
    match a {
        Node::Empty | Node::Full => 0,
        Node::Split(a0, a1) => 1 + depth(a0).max(depth(a1)),
    }
}

fn collect_words(a: &Node, prefix: &mut String, out: &mut Vec<String>) {
    match a {
        Node::Empty => {}
        Node::Full => out.push(prefix.clone()),
        Node::Split(a0, a1) => {
            prefix.push('0');
            collect_words(a0, prefix, out);
            prefix.pop();
            prefix.push('1');
            collect_words(a1, prefix, out);
            prefix.pop();
        }
    }
}

/// Returns true when `word` is a non-empty-or-empty string over `{0,1}`.
pub fn is_binary_word(word: &str) -> bool {
    word.bytes().all(|b| b == b'0' || b == b'1')
}

/// A clopen subset of the Cantor set in canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClopenSet {
    root: Node,
}

impl ClopenSet {
    pub fn empty() -> Self {
        ClopenSet { root: Node::Empty }
    }

    pub fn full() -> Self {
        ClopenSet { root: Node::Full }
    }

    /// The cylinder `[word]`. Panics if `word` is not binary.
    pub fn cylinder(word: &str) -> Self {
        assert!(is_binary_word(word), "not a binary word: {word:?}");
        let mut node = Node::Full;
        for bit in word.bytes().rev() {
            node = if bit == b'0' {
                split(node, Node::Empty)
            } else {
                split(Node::Empty, node)
            };
        }
        ClopenSet { root: node }
    }

    /// Union of the given cylinders, canonicalized.
    pub fn from_cylinders<I, W>(words: I) -> Self
    where
        I: IntoIterator<Item = W>,
        W: AsRef<str>,
    {
        words
            .into_iter()
            .fold(ClopenSet::empty(), |acc, w| acc.union(&ClopenSet::cylinder(w.as_ref())))
    }

    pub fn union(&self, other: &Self) -> Self {
        ClopenSet { root: union(&self.root, &other.root) }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        ClopenSet { root: intersection(&self.root, &other.root) }
    }

    pub fn complement(&self) -> Self {
        ClopenSet { root: complement(&self.root) }
    }

    pub fn difference(&self, other: &Self) -> Self {
        ClopenSet { root: intersection(&self.root, &complement(&other.root)) }
    }

    pub fn is_empty(&self) -> bool {
        self.root == Node::Empty
    }

    pub fn is_full(&self) -> bool {
        self.root == Node::Full
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    /// Length of the longest word in the canonical cylinder list.
    pub fn depth(&self) -> usize {
        depth(&self.root)
    }

    /// Canonical cylinder words: no word is a prefix of another and no two
    /// sibling words `w0`, `w1` both occur. Sorted lexicographically.
    pub fn cylinders(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_words(&self.root, &mut String::new(), &mut out);
        out
    }

    /// Membership of the eventually-zero sequence `word·000…`.
    pub fn contains_word(&self, word: &str) -> bool {
        let mut bits = word.bytes();
        let mut node = &self.root;
        loop {
            match node {
                Node::Empty => return false,
                Node::Full => return true,
                Node::Split(zero, one) => {
                    node = match bits.next() {
                        Some(b'1') => one,
                        _ => zero,
                    };
                }
            }
        }
    }

    /// Membership of the all-zeros sequence.
    pub fn contains_zero_sequence(&self) -> bool {
        self.contains_word("")
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClopenSet{:?}", self.cylinders())
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.cylinders().iter().map(|w| format!("{w:?}")).collect();
        write!(f, "clopen({})", words.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn word() -> impl Strategy<Value = String> {
        "[01]{0,5}"
    }

    fn words() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(word(), 0..5)
    }

    /// All points w·000… with |w| = n; separates every set of depth <= n
    /// except for the single class [0^n] which also contains 0^n·1·000….
    fn brute_members(set: &ClopenSet, n: usize) -> Vec<bool> {
        (0..1u32 << n)
            .map(|i| {
                let w: String = (0..n).rev().map(|b| if i >> b & 1 == 1 { '1' } else { '0' }).collect();
                set.contains_word(&w)
            })
            .collect()
    }

    #[test]
    fn sibling_merge_and_prefix_absorption() {
        let s = ClopenSet::from_cylinders(["00", "01", "1"]);
        assert!(s.is_full());
        let s = ClopenSet::from_cylinders(["0", "01", "011"]);
        assert_eq!(s.cylinders(), vec!["0"]);
        assert_eq!(ClopenSet::from_cylinders([""; 0]).cylinders(), Vec::<String>::new());
        assert_eq!(ClopenSet::full().cylinders(), vec![""]);
    }

    #[test]
    fn membership_of_eventually_zero_sequences() {
        let s = ClopenSet::from_cylinders(["01", "110"]);
        assert!(s.contains_word("01"));
        assert!(s.contains_word("0111"));
        assert!(!s.contains_word("0"));
        assert!(!s.contains_zero_sequence());
        assert!(s.contains_word("11"));
        assert!(!s.contains_word("111"));
        assert!(ClopenSet::cylinder("000").contains_zero_sequence());
    }

    #[test]
    fn depth_is_longest_canonical_word() {
        assert_eq!(ClopenSet::from_cylinders(["0", "101"]).depth(), 3);
        assert_eq!(ClopenSet::full().depth(), 0);
        assert_eq!(ClopenSet::cylinder("1").complement(), ClopenSet::cylinder("0"));
    }

    proptest! {
        #[test]
        fn canonical_form_is_idempotent(ws in words()) {
            let s = ClopenSet::from_cylinders(&ws);
            prop_assert_eq!(ClopenSet::from_cylinders(s.cylinders()), s.clone());
            let cyl = s.cylinders();
            for (i, a) in cyl.iter().enumerate() {
                for (j, b) in cyl.iter().enumerate() {
                    if i != j {
                        prop_assert!(!b.starts_with(a.as_str()));
                    }
                }
            }
        }

        #[test]
        fn equal_point_sets_have_equal_forms(a in words(), b in words()) {
            let (sa, sb) = (ClopenSet::from_cylinders(&a), ClopenSet::from_cylinders(&b));
            let same = brute_members(&sa, 6) == brute_members(&sb, 6);
            prop_assert_eq!(same, sa == sb);
        }

        #[test]
        fn boolean_operations_are_pointwise(a in words(), b in words()) {
            let (sa, sb) = (ClopenSet::from_cylinders(&a), ClopenSet::from_cylinders(&b));
            let (ma, mb) = (brute_members(&sa, 6), brute_members(&sb, 6));
            let zip = |f: fn(bool, bool) -> bool| ma.iter().zip(&mb).map(|(x, y)| f(*x, *y)).collect::<Vec<_>>();
            prop_assert_eq!(brute_members(&sa.union(&sb), 6), zip(|x, y| x || y));
            prop_assert_eq!(brute_members(&sa.intersection(&sb), 6), zip(|x, y| x && y));
            prop_assert_eq!(brute_members(&sa.difference(&sb), 6), zip(|x, y| x && !y));
            prop_assert_eq!(sa.is_subset(&sb), zip(|x, y| !x || y).into_iter().all(|v| v));
        }
    }
}
