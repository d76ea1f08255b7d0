//! Ground-set combinatorics: groupcast labels, message index families,
//! superposition orders and their down-set / up-set lattices.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{bail, Result};

/// Largest supported number of receivers.
pub const MAX_RECEIVERS: u8 = 16;

/// Largest supported number of labels in one family.
pub const MAX_FAMILY: usize = 128;

/// A nonempty subset of the receivers `[1:K]`, stored as a bitmask
/// (bit `j-1` set when receiver `j` belongs to the label).
///
/// Labels are ordered by cardinality first, then lexicographically by their
/// sorted members, which matches the `E = {1,2,12,123}` listing convention.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Label(u16);

impl Label {
    pub fn from_mask(mask: u16) -> Option<Label> {
        (mask != 0).then_some(Label(mask))
    }

    pub fn from_members(members: &[u8]) -> Result<Label> {
        let mut mask = 0u16;
        for &j in members {
            if j == 0 || j > MAX_RECEIVERS {
                bail!(Domain, "receiver index {j} outside [1:{MAX_RECEIVERS}]");
            }
            mask |= 1 << (j - 1);
        }
        match Label::from_mask(mask) {
            Some(l) => Ok(l),
            None => bail!(Domain, "labels must be nonempty"),
        }
    }

    pub fn singleton(j: u8) -> Result<Label> {
        Label::from_members(&[j])
    }

    #[inline]
    pub fn mask(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn contains(self, j: u8) -> bool {
        j >= 1 && j <= MAX_RECEIVERS && self.0 & (1 << (j - 1)) != 0
    }

    #[inline]
    pub fn is_subset(self, other: Label) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_proper_subset(self, other: Label) -> bool {
        self != other && self.is_subset(other)
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    /// Largest receiver index in the label.
    pub fn max_receiver(self) -> u8 {
        16 - self.0.leading_zeros() as u8
    }

    pub fn members(self) -> impl Iterator<Item = u8> {
        (1..=MAX_RECEIVERS).filter(move |&j| self.contains(j))
    }

    /// Parses the compact string form: `"124"`, or dot-separated (`"1.10"`)
    /// when some receiver index exceeds 9.
    pub fn parse(s: &str) -> Result<Label> {
        let mut members = Vec::new();
        if s.contains('.') {
            for part in s.split('.') {
                match part.parse::<u8>() {
                    Ok(j) => members.push(j),
                    Err(_) => bail!(Parse, "bad label `{s}`"),
                }
            }
        } else {
            for c in s.chars() {
                match c.to_digit(10) {
                    Some(d) => members.push(d as u8),
                    None => bail!(Parse, "bad label `{s}`"),
                }
            }
        }
        Label::from_members(&members)
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                // the lowest differing receiver belongs to `self`
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.max_receiver() > 9;
        for (i, j) in self.members().enumerate() {
            if wide && i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{j}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{self}")
    }
}

/// A subset of a [`Family`], as a bitset over the family's label indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, Debug)]
pub struct LabelSet(u128);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn full(n: usize) -> LabelSet {
        debug_assert!(n <= MAX_FAMILY);
        if n == MAX_FAMILY {
            LabelSet(u128::MAX)
        } else {
            LabelSet((1u128 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> LabelSet {
        LabelSet(1u128 << i)
    }

    pub fn from_bits(bits: u128) -> LabelSet {
        LabelSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u128 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u128 << i);
    }

    pub fn union(self, o: LabelSet) -> LabelSet {
        LabelSet(self.0 | o.0)
    }

    pub fn intersection(self, o: LabelSet) -> LabelSet {
        LabelSet(self.0 & o.0)
    }

    pub fn difference(self, o: LabelSet) -> LabelSet {
        LabelSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: LabelSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Cardinality first, then lexicographic on member indices.
    pub fn canonical_cmp(self, o: LabelSet) -> Ordering {
        self.len().cmp(&o.len()).then_with(|| {
            let diff = self.0 ^ o.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

/// A message index family: distinct labels over `[1:K]`, kept in canonical
/// label order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Family {
    k: u8,
    labels: Vec<Label>,
}

impl Family {
    pub fn new(k: u8, labels: impl IntoIterator<Item = Label>) -> Result<Family> {
        if k == 0 || k > MAX_RECEIVERS {
            bail!(Domain, "K = {k} outside [1:{MAX_RECEIVERS}]");
        }
        let mut labels: Vec<Label> = labels.into_iter().collect();
        labels.sort();
        let before = labels.len();
        labels.dedup();
        if labels.len() != before {
            bail!(Domain, "duplicate labels in family");
        }
        if labels.len() > MAX_FAMILY {
            bail!(Resource, "family of {} labels exceeds {MAX_FAMILY}", labels.len());
        }
        if let Some(bad) = labels.iter().find(|l| l.max_receiver() > k) {
            bail!(Domain, "label {bad} is not a subset of [1:{k}]");
        }
        Ok(Family { k, labels })
    }

    /// Parses labels written in the compact string form.
    pub fn parse(k: u8, labels: &[&str]) -> Result<Family> {
        let labels = labels.iter().map(|s| Label::parse(s)).collect::<Result<Vec<_>>>()?;
        Family::new(k, labels)
    }

    /// All `2^K - 1` nonempty subsets of `[1:K]`.
    pub fn full(k: u8) -> Result<Family> {
        if k == 0 || k > MAX_RECEIVERS {
            bail!(Domain, "K = {k} outside [1:{MAX_RECEIVERS}]");
        }
        let top = (1u32 << k) - 1;
        Family::new(k, (1..=top).map(|m| Label(m as u16)))
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn index_of(&self, l: Label) -> Option<usize> {
        self.labels.binary_search(&l).ok()
    }

    pub fn contains(&self, l: Label) -> bool {
        self.index_of(l).is_some()
    }

    pub fn all(&self) -> LabelSet {
        LabelSet::full(self.labels.len())
    }

    /// Converts labels to a [`LabelSet`] over this family.
    pub fn set_of(&self, labels: &[Label]) -> Result<LabelSet> {
        let mut s = LabelSet::EMPTY;
        for &l in labels {
            match self.index_of(l) {
                Some(i) => s.insert(i),
                None => bail!(Domain, "label {l} is not in the family"),
            }
        }
        Ok(s)
    }

    pub fn labels_of(&self, set: LabelSet) -> Vec<Label> {
        set.iter().map(|i| self.labels[i]).collect()
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.labels.iter().all(|&l| other.contains(l))
    }

    /// The labels of the family containing receiver `j`.
    pub fn receiver_window(&self, j: u8) -> Result<Family> {
        Ok(Family { k: self.k, labels: self.labels_of(self.window_set(j)?) })
    }

    /// [`Family::receiver_window`] as a set over this family.
    pub fn window_set(&self, j: u8) -> Result<LabelSet> {
        if j == 0 || j > self.k {
            bail!(Domain, "receiver {j} outside [1:{}]", self.k);
        }
        let mut s = LabelSet::EMPTY;
        for (i, l) in self.labels.iter().enumerate() {
            if l.contains(j) {
                s.insert(i);
            }
        }
        Ok(s)
    }

    pub fn format_set(&self, set: LabelSet) -> String {
        let mut out = String::from("{");
        for (n, i) in set.iter().enumerate() {
            if n > 0 {
                out.push(',');
            }
            out.push_str(&alloc::format!("{}", self.labels[i]));
        }
        out.push('}');
        out
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_set(self.all()))
    }
}

/// How an order was specified; kept so that orders serialize the way they
/// were written.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OrderKind {
    Inclusion,
    Discrete,
    Explicit,
}

/// A superposition order on a family: a partial order in which `S <= S'`
/// with `S != S'` forces `S ⊂ S'`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Order {
    family: Family,
    kind: OrderKind,
    /// `up[i]` holds every `j` with `i <= j`, including `i`.
    up: Vec<LabelSet>,
    /// `down[i]` holds every `j` with `j <= i`, including `i`.
    down: Vec<LabelSet>,
}

impl Order {
    /// The order of set inclusion.
    pub fn inclusion(family: Family) -> Order {
        let labels = family.labels.clone();
        Order::from_relation_unchecked(family, OrderKind::Inclusion, |a, b| {
            labels[a].is_subset(labels[b])
        })
    }

    /// The discrete order: distinct labels are incomparable.
    pub fn discrete(family: Family) -> Order {
        Order::from_relation_unchecked(family, OrderKind::Discrete, |a, b| a == b)
    }

    /// The reflexive-transitive closure of `pairs`, each read as `S <= S'`.
    pub fn explicit(family: Family, pairs: &[(Label, Label)]) -> Result<Order> {
        let n = family.len();
        let mut up: Vec<LabelSet> = (0..n).map(LabelSet::singleton).collect();
        for &(s, t) in pairs {
            let (Some(a), Some(b)) = (family.index_of(s), family.index_of(t)) else {
                bail!(Domain, "pair ({s},{t}) uses a label outside the family");
            };
            if a == b {
                continue;
            }
            if !s.is_proper_subset(t) {
                bail!(OrderLaw, "{s} <= {t} but {s} is not a subset of {t}");
            }
            up[a].insert(b);
        }
        // transitive closure; inclusion-compatible edges go from smaller to
        // larger cardinality, so processing in reverse canonical order suffices
        for a in (0..n).rev() {
            let mut acc = up[a];
            for b in up[a].iter() {
                if b != a {
                    acc = acc.union(up[b]);
                }
            }
            up[a] = acc;
        }
        for a in 0..n {
            for b in up[a].iter() {
                if a != b && up[b].contains(a) {
                    bail!(NotAntisymmetric, "{} and {}", family.label(a), family.label(b));
                }
            }
        }
        Ok(Order::from_up(family, OrderKind::Explicit, up))
    }

    fn from_relation_unchecked(
        family: Family,
        kind: OrderKind,
        le: impl Fn(usize, usize) -> bool,
    ) -> Order {
        let n = family.len();
        let up = (0..n)
            .map(|a| {
                let mut s = LabelSet::EMPTY;
                for b in 0..n {
                    if le(a, b) {
                        s.insert(b);
                    }
                }
                s
            })
            .collect();
        Order::from_up(family, kind, up)
    }

    fn from_up(family: Family, kind: OrderKind, up: Vec<LabelSet>) -> Order {
        let n = family.len();
        let mut down = vec_of(n, LabelSet::EMPTY);
        for (a, s) in up.iter().enumerate() {
            for b in s.iter() {
                down[b].insert(a);
            }
        }
        Order { family, kind, up, down }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn le_idx(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn le(&self, a: Label, b: Label) -> bool {
        match (self.family.index_of(a), self.family.index_of(b)) {
            (Some(i), Some(j)) => self.le_idx(i, j),
            _ => false,
        }
    }

    /// `↑{S}`, including `S`.
    pub fn up_of(&self, i: usize) -> LabelSet {
        self.up[i]
    }

    /// `↓{S}`, including `S`.
    pub fn down_of(&self, i: usize) -> LabelSet {
        self.down[i]
    }

    /// `↑{S} \ {S}`: the labels whose codewords `S` is superposed on.
    pub fn strict_up_of(&self, i: usize) -> LabelSet {
        let mut s = self.up[i];
        s.remove(i);
        s
    }

    /// Every strict pair `(S, S')` with `S < S'`.
    pub fn strict_pairs(&self) -> Vec<(Label, Label)> {
        let mut out = Vec::new();
        for a in 0..self.family.len() {
            for b in self.strict_up_of(a).iter() {
                out.push((self.family.label(a), self.family.label(b)));
            }
        }
        out
    }

    /// Smallest up-set containing `q`.
    pub fn up_closure(&self, q: LabelSet) -> LabelSet {
        q.iter().fold(LabelSet::EMPTY, |acc, i| acc.union(self.up[i]))
    }

    /// Smallest down-set containing `q`.
    pub fn down_closure(&self, q: LabelSet) -> LabelSet {
        q.iter().fold(LabelSet::EMPTY, |acc, i| acc.union(self.down[i]))
    }

    /// Down-closure inside the order induced on `within`.
    pub fn down_closure_within(&self, q: LabelSet, within: LabelSet) -> LabelSet {
        self.down_closure(q).intersection(within)
    }

    /// Label-based [`Order::up_closure`].
    pub fn up_closure_labels(&self, q: &[Label]) -> Result<Vec<Label>> {
        let s = self.family.set_of(q)?;
        Ok(self.family.labels_of(self.up_closure(s)))
    }

    /// Label-based [`Order::down_closure`].
    pub fn down_closure_labels(&self, q: &[Label]) -> Result<Vec<Label>> {
        let s = self.family.set_of(q)?;
        Ok(self.family.labels_of(self.down_closure(s)))
    }

    pub fn is_down_set_within(&self, b: LabelSet, within: LabelSet) -> bool {
        b.is_subset(within) && self.down_closure_within(b, within) == b
    }

    pub fn is_up_set_within(&self, b: LabelSet, within: LabelSet) -> bool {
        b.is_subset(within) && self.up_closure(b).intersection(within) == b
    }

    pub fn is_up_set(&self, b: LabelSet) -> bool {
        self.up_closure(b) == b
    }

    pub fn is_down_set(&self, b: LabelSet) -> bool {
        self.down_closure(b) == b
    }

    /// The largest up-set contained in `g`.
    pub fn max_up_subset(&self, g: LabelSet) -> LabelSet {
        let mut s = LabelSet::EMPTY;
        for i in g.iter() {
            if self.up[i].is_subset(g) {
                s.insert(i);
            }
        }
        s
    }

    /// All down-sets of the order induced on `within`.
    pub fn down_sets(&self, within: LabelSet) -> Result<LatticeFamily> {
        self.enumerate(within, Flavor::Down)
    }

    /// All up-sets of the order induced on `within`.
    pub fn up_sets(&self, within: LabelSet) -> Result<LatticeFamily> {
        self.enumerate(within, Flavor::Up)
    }

    fn enumerate(&self, within: LabelSet, flavor: Flavor) -> Result<LatticeFamily> {
        if !within.is_subset(self.family.all()) {
            bail!(Domain, "restriction is not a subset of the family");
        }
        // canonical label order is a linear extension of any superposition
        // order: S < S' implies |S| < |S'|
        let mut seq: Vec<usize> = within.iter().collect();
        let preds: Vec<LabelSet> = match flavor {
            Flavor::Down => seq
                .iter()
                .map(|&i| self.down[i].intersection(within).difference(LabelSet::singleton(i)))
                .collect(),
            Flavor::Up => {
                seq.reverse();
                seq.iter()
                    .map(|&i| self.up[i].intersection(within).difference(LabelSet::singleton(i)))
                    .collect()
            }
        };
        let mut members = Vec::new();
        fn walk(
            pos: usize,
            cur: LabelSet,
            seq: &[usize],
            preds: &[LabelSet],
            out: &mut Vec<LabelSet>,
        ) {
            if pos == seq.len() {
                out.push(cur);
                return;
            }
            walk(pos + 1, cur, seq, preds, out);
            if preds[pos].is_subset(cur) {
                let mut next = cur;
                next.insert(seq[pos]);
                walk(pos + 1, next, seq, preds, out);
            }
        }
        walk(0, LabelSet::EMPTY, &seq, &preds, &mut members);
        members.sort_by(|a, b| a.canonical_cmp(*b));
        Ok(LatticeFamily { flavor, ground: within, members })
    }

    /// The order induced on a subfamily.
    pub fn restrict(&self, sub: &Family) -> Result<Order> {
        if !sub.is_subfamily_of(&self.family) {
            bail!(Domain, "{sub} is not a subfamily of {}", self.family);
        }
        let idx: Vec<usize> = sub.labels().iter().map(|&l| self.family.index_of(l).unwrap()).collect();
        let kind = self.kind;
        Ok(Order::from_relation_unchecked(sub.clone(), kind, |a, b| self.le_idx(idx[a], idx[b])))
    }
}

fn vec_of<T: Clone>(n: usize, v: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    out.resize(n, v);
    out
}

/// Whether a lattice collects down-sets or up-sets.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Flavor {
    Down,
    Up,
}

/// The down-set (or up-set) lattice of an induced order, with members in
/// canonical order (cardinality, then lexicographic).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LatticeFamily {
    pub flavor: Flavor,
    pub ground: LabelSet,
    pub members: Vec<LabelSet>,
}

impl LatticeFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: LabelSet) -> bool {
        self.members.binary_search_by(|m| m.canonical_cmp(s)).is_ok()
    }

    /// The nonempty members.
    pub fn nonempty(&self) -> impl Iterator<Item = LabelSet> + '_ {
        self.members.iter().copied().filter(|m| !m.is_empty())
    }

    /// Checks closure under pairwise union and intersection.
    pub fn is_lattice(&self) -> bool {
        self.members.iter().all(|&a| {
            self.members
                .iter()
                .all(|&b| self.contains(a.union(b)) && self.contains(a.intersection(b)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(k: u8, ls: &[&str]) -> Family {
        Family::parse(k, ls).unwrap()
    }

    fn set(f: &Family, ls: &[&str]) -> LabelSet {
        let labels: Vec<Label> = ls.iter().map(|s| Label::parse(s).unwrap()).collect();
        f.set_of(&labels).unwrap()
    }

    #[test]
    fn label_order_and_display() {
        let f = fam(3, &["123", "12", "2", "1", "13", "23", "3"]);
        let names: Vec<String> = f.labels().iter().map(|l| alloc::format!("{l}")).collect();
        assert_eq!(names, ["1", "2", "3", "12", "13", "23", "123"]);
        let wide = Label::from_members(&[1, 10]).unwrap();
        assert_eq!(alloc::format!("{wide}"), "1.10");
        assert_eq!(Label::parse("1.10").unwrap(), wide);
        assert!(Label::from_members(&[]).is_err());
        assert!(Label::from_members(&[17]).is_err());
    }

    #[test]
    fn receiver_windows() {
        let e = fam(3, &["1", "2", "12", "123"]);
        assert_eq!(e.receiver_window(1).unwrap(), fam(3, &["1", "12", "123"]));
        assert_eq!(e.receiver_window(3).unwrap(), fam(3, &["123"]));
        assert!(fam(2, &["2"]).receiver_window(1).unwrap().is_empty());
        assert!(e.receiver_window(4).is_err());
        assert!(e.receiver_window(0).is_err());
    }

    #[test]
    fn family_rejects_bad_labels() {
        assert!(Family::parse(2, &["13"]).is_err());
        assert!(Family::parse(2, &["1", "1"]).is_err());
    }

    #[test]
    fn inclusion_chain() {
        let f = fam(3, &["1", "13", "123"]);
        let o = Order::inclusion(f.clone());
        let pairs = o.strict_pairs();
        assert_eq!(pairs.len(), 3);
        assert!(o.le(Label::parse("1").unwrap(), Label::parse("123").unwrap()));
        assert_eq!(o.up_closure(set(&f, &["1"])), f.all());
        let downs = o.down_sets(f.all()).unwrap();
        assert_eq!(downs.len(), 4);
        assert_eq!(downs.members[1], set(&f, &["1"]));
        assert_eq!(downs.members[2], set(&f, &["1", "13"]));
        assert_eq!(o.up_sets(f.all()).unwrap().len(), 4);
    }

    #[test]
    fn discrete_order() {
        let f = fam(2, &["1", "2", "12"]);
        let o = Order::discrete(f.clone());
        assert!(o.strict_pairs().is_empty());
        let q = set(&f, &["1", "12"]);
        assert_eq!(o.up_closure(q), q);
        let g = fam(3, &["1", "12", "123"]);
        let d = Order::discrete(g.clone());
        assert_eq!(d.down_sets(g.all()).unwrap().len(), 8);
        assert_eq!(d.up_sets(g.all()).unwrap().len(), 8);
    }

    #[test]
    fn explicit_pairs() {
        let f = fam(2, &["1", "2", "12"]);
        let twelve = Label::parse("12").unwrap();
        let one = Label::parse("1").unwrap();
        assert!(matches!(Order::explicit(f.clone(), &[(twelve, one)]), Err(crate::Error::OrderLaw(_))));
        let o = Order::explicit(f.clone(), &[(one, twelve)]).unwrap();
        assert!(o.le(one, twelve));
        assert!(!o.le(Label::parse("2").unwrap(), twelve));
    }

    #[test]
    fn closures_in_inclusion_order() {
        let f = fam(2, &["1", "2", "12"]);
        let o = Order::inclusion(f.clone());
        assert_eq!(o.down_closure(set(&f, &["12"])), f.all());
        assert_eq!(
            o.down_closure_labels(&[Label::parse("12").unwrap()]).unwrap().len(),
            3
        );
        assert!(o.up_closure_labels(&[Label::parse("13").unwrap()]).is_err());
    }

    #[test]
    fn v_shaped_poset_lattices() {
        // {1} <= {12}, {2} <= {12}; values checked by brute force below
        let f = fam(2, &["1", "2", "12"]);
        let o = Order::inclusion(f.clone());
        let downs = o.down_sets(f.all()).unwrap();
        let expect_down = [
            LabelSet::EMPTY,
            set(&f, &["1"]),
            set(&f, &["2"]),
            set(&f, &["1", "2"]),
            f.all(),
        ];
        assert_eq!(downs.members, expect_down);
        let ups = o.up_sets(f.all()).unwrap();
        let expect_up = [
            LabelSet::EMPTY,
            set(&f, &["12"]),
            set(&f, &["1", "12"]),
            set(&f, &["2", "12"]),
            f.all(),
        ];
        assert_eq!(ups.members, expect_up);
        assert!(downs.is_lattice() && ups.is_lattice());
        // brute force
        let brute_down: Vec<u128> = (0u128..8)
            .filter(|&b| {
                let b = LabelSet::from_bits(b);
                b.iter().all(|i| o.down_of(i).is_subset(b))
            })
            .collect();
        assert_eq!(brute_down.len(), 5);
    }

    #[test]
    fn max_up_subset_examples() {
        let f = fam(2, &["1", "2", "12"]);
        let o = Order::inclusion(f.clone());
        assert_eq!(o.max_up_subset(set(&f, &["1", "12"])), set(&f, &["1", "12"]));
        assert_eq!(o.max_up_subset(set(&f, &["1"])), LabelSet::EMPTY);
        assert_eq!(o.max_up_subset(f.all()), f.all());
    }

    #[test]
    fn induced_down_sets_ignore_outside_labels() {
        // window of receiver 2 in {1,2,12}: {2,12}; induced chain 2 <= 12
        let f = fam(2, &["1", "2", "12"]);
        let o = Order::inclusion(f.clone());
        let w = f.window_set(2).unwrap();
        let downs = o.down_sets(w).unwrap();
        assert_eq!(downs.members, [LabelSet::EMPTY, set(&f, &["2"]), w]);
    }

    #[test]
    fn restrict_keeps_relation() {
        let f = fam(3, &["1", "13", "123"]);
        let o = Order::inclusion(f);
        let sub = fam(3, &["13", "123"]);
        let r = o.restrict(&sub).unwrap();
        assert!(r.le(Label::parse("13").unwrap(), Label::parse("123").unwrap()));
        assert!(o.restrict(&fam(3, &["2"])).is_err());
    }
}
