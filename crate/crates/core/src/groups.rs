//! Finite groups given by total multiplication tables.
//!
//! Elements are indices `0..order`, with the identity always at index 0.
//! Everything here is immutable once built and cheap to share across
//! threads.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Largest group accepted unless a caller raises the cap.
pub const DEFAULT_ORDER_CAP: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("group order exceeds cap of {cap} elements")]
    OrderCapExceeded { cap: usize },
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("map is not injective: {0}")]
    NotInjective(String),
    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("map is not a bijection: {0}")]
    NotBijective(String),
}

/// A finite group as a validated Cayley table.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl FiniteGroup {
    /// Builds a group from a square table, rejecting anything that is not a
    /// group with identity at index 0.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Self, GroupError> {
        Self::from_table_capped(table, DEFAULT_ORDER_CAP)
    }

    pub fn from_table_capped(table: &[Vec<usize>], cap: usize) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::NotAGroup("empty table".into()));
        }
        if n > cap {
            return Err(GroupError::OrderCapExceeded { cap });
        }
        let mut flat = Vec::with_capacity(n * n);
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::NotAGroup(format!(
                    "row {a} has length {}, expected {n}",
                    row.len()
                )));
            }
            for (b, &x) in row.iter().enumerate() {
                if x >= n {
                    return Err(GroupError::NotAGroup(format!(
                        "entry [{a}][{b}] = {x} out of range"
                    )));
                }
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(n, flat)
    }

    fn from_flat(n: usize, table: Vec<usize>) -> Result<Self, GroupError> {
        let at = |a: usize, b: usize| table[a * n + b];
        for x in 0..n {
            if at(0, x) != x || at(x, 0) != x {
                return Err(GroupError::NotAGroup(format!(
                    "element 0 is not an identity (fails at {x})"
                )));
            }
        }
        let inverse = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| at(a, b) == 0 && at(b, a) == 0)
                    .ok_or_else(|| GroupError::NotAGroup(format!("element {a} has no inverse")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(GroupError::NotAGroup(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            order: n,
            table,
            inverse,
        })
    }

    /// Closure of a set of permutations of `{0..m-1}`.
    ///
    /// Elements are numbered in breadth-first discovery order: the identity
    /// first, then for each discovered element `e` (in order) the products
    /// `e * g` for each generator `g` in the given order. Composition is
    /// `(p * q)(x) = p(q(x))`.
    pub fn from_permutations(generators: &[Vec<usize>]) -> Result<Self, GroupError> {
        Self::from_permutations_capped(generators, DEFAULT_ORDER_CAP)
    }

    pub fn from_permutations_capped(
        generators: &[Vec<usize>],
        cap: usize,
    ) -> Result<Self, GroupError> {
        let degree = generators.first().map_or(0, Vec::len);
        for (i, g) in generators.iter().enumerate() {
            if g.len() != degree {
                return Err(GroupError::NotAPermutation(format!(
                    "generator {i} acts on {} points, expected {degree}",
                    g.len()
                )));
            }
            let mut seen = vec![false; degree];
            for &x in g {
                if x >= degree || seen[x] {
                    return Err(GroupError::NotAPermutation(format!(
                        "generator {i} is not a bijection of 0..{degree}"
                    )));
                }
                seen[x] = true;
            }
        }
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&x| p[x]).collect() };

        let identity: Vec<usize> = (0..degree).collect();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for g in generators {
                let p = compose(&elements[e], g);
                if !index.contains_key(&p) {
                    if elements.len() == cap {
                        return Err(GroupError::OrderCapExceeded { cap });
                    }
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                }
            }
        }
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                table.push(index[&compose(a, b)]);
            }
        }
        // Closed by construction; `from_flat` re-validates the axioms.
        Self::from_flat(n, table)
    }

    /// Cyclic group `Z/n` with element `k` standing for `k mod n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order zero");
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        let inverse = (0..n).map(|k| (n - k) % n).collect();
        Self {
            order: n,
            table,
            inverse,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn contains(&self, a: usize) -> bool {
        a < self.order
    }

    /// The table as nested rows, suitable for serialization.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Subgroup generated by `seed`, in ascending index order.
    pub fn subgroup_closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut members = BTreeSet::from([0usize]);
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &s in seed {
                let y = self.mul(x, s);
                if members.insert(y) {
                    frontier.push(y);
                }
            }
        }
        members.into_iter().collect()
    }

    pub fn is_subgroup(&self, sub: &[usize]) -> bool {
        let set: BTreeSet<usize> = sub.iter().copied().collect();
        set.contains(&0)
            && set.iter().all(|&a| a < self.order)
            && set
                .iter()
                .all(|&a| set.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    /// Left cosets `g * sub`. The transversal holds the least index of each
    /// coset; the identity coset comes first.
    pub fn left_cosets(&self, sub: &[usize]) -> Result<(Vec<Vec<usize>>, Vec<usize>), GroupError> {
        if !self.is_subgroup(sub) {
            return Err(GroupError::NotASubgroup(format!("{sub:?}")));
        }
        let mut assigned = vec![false; self.order];
        let mut partition = Vec::new();
        let mut transversal = Vec::new();
        for g in 0..self.order {
            if assigned[g] {
                continue;
            }
            let mut coset: Vec<usize> = sub.iter().map(|&s| self.mul(g, s)).collect();
            coset.sort_unstable();
            coset.dedup();
            for &x in &coset {
                assigned[x] = true;
            }
            transversal.push(g);
            partition.push(coset);
        }
        Ok((partition, transversal))
    }

    /// Conjugacy classes, each sorted, ordered by least element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for x in 0..self.order {
            if seen[x] {
                continue;
            }
            let class: BTreeSet<usize> = (0..self.order).map(|g| self.conjugate(g, x)).collect();
            for &y in &class {
                seen[y] = true;
            }
            classes.push(class.into_iter().collect());
        }
        classes
    }

    pub fn center_order(&self) -> usize {
        (0..self.order)
            .filter(|&z| (0..self.order).all(|g| self.mul(g, z) == self.mul(z, g)))
            .count()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let mut histogram = BTreeMap::new();
        for a in 0..self.order {
            *histogram.entry(self.element_order(a)).or_insert(0) += 1;
        }
        let center_order = self.center_order();
        let abelian = center_order == self.order;
        let name = guess_name(self.order, &histogram, center_order).unwrap_or_else(|| {
            format!(
                "order-{} group (fingerprint {:08x})",
                self.order,
                fingerprint_hash(self.order, &histogram, center_order)
            )
        });
        Fingerprint {
            order: self.order,
            element_orders: histogram,
            center_order,
            abelian,
            name,
        }
    }
}

/// Isomorphism invariants used to label groups in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub order: usize,
    pub element_orders: BTreeMap<usize, usize>,
    pub center_order: usize,
    pub abelian: bool,
    pub name: String,
}

impl Fingerprint {
    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }
}

fn guess_name(order: usize, histogram: &BTreeMap<usize, usize>, center: usize) -> Option<String> {
    if order == 1 {
        return Some("1".into());
    }
    if histogram.contains_key(&order) {
        return Some(format!("Z/{order}"));
    }
    let hist: Vec<(usize, usize)> = histogram.iter().map(|(&k, &v)| (k, v)).collect();
    let name = match (order, hist.as_slice(), center) {
        (4, [(1, 1), (2, 3)], 4) => "Z/2 x Z/2",
        (6, [(1, 1), (2, 3), (3, 2)], 1) => "S3",
        (8, [(1, 1), (2, 7)], 8) => "Z/2 x Z/2 x Z/2",
        (8, [(1, 1), (2, 3), (4, 4)], 8) => "Z/2 x Z/4",
        (8, [(1, 1), (2, 5), (4, 2)], 2) => "D4",
        (8, [(1, 1), (2, 1), (4, 6)], 2) => "Q8",
        (9, [(1, 1), (3, 8)], 9) => "Z/3 x Z/3",
        (10, [(1, 1), (2, 5), (5, 4)], 1) => "D5",
        (12, [(1, 1), (2, 3), (3, 2), (6, 6)], 12) => "Z/2 x Z/6",
        (12, [(1, 1), (2, 7), (3, 2), (6, 2)], 2) => "D6",
        (12, [(1, 1), (2, 3), (3, 8)], 1) => "A4",
        (12, [(1, 1), (2, 1), (3, 2), (4, 6), (6, 2)], 2) => "Dic3",
        _ => return None,
    };
    Some(name.into())
}

// FNV-1a over the invariants; stable across platforms and runs.
fn fingerprint_hash(order: usize, histogram: &BTreeMap<usize, usize>, center: usize) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    let mut feed = |x: usize| {
        for b in (x as u64).to_le_bytes() {
            h ^= u32::from(b);
            h = h.wrapping_mul(0x0100_0193);
        }
    };
    feed(order);
    for (&k, &v) in histogram {
        feed(k);
        feed(v);
    }
    feed(center);
    h
}

/// An injective homomorphism between two finite groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomorphism {
    map: Vec<usize>,
}

impl Monomorphism {
    pub fn new(source: &FiniteGroup, target: &FiniteGroup, map: &[usize]) -> Result<Self, GroupError> {
        if map.len() != source.order() {
            return Err(GroupError::NotHomomorphism(format!(
                "map has {} entries, source has order {}",
                map.len(),
                source.order()
            )));
        }
        if let Some(&x) = map.iter().find(|&&x| x >= target.order()) {
            return Err(GroupError::NotHomomorphism(format!(
                "image {x} is not an element of the target"
            )));
        }
        for a in 0..source.order() {
            for b in 0..source.order() {
                if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                    return Err(GroupError::NotHomomorphism(format!(
                        "map({a}*{b}) != map({a})*map({b})"
                    )));
                }
            }
        }
        let distinct: BTreeSet<usize> = map.iter().copied().collect();
        if distinct.len() != map.len() {
            return Err(GroupError::NotInjective(format!("{map:?}")));
        }
        Ok(Self { map: map.to_vec() })
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// Image of the source, ascending.
    pub fn image(&self) -> Vec<usize> {
        let mut image = self.map.clone();
        image.sort_unstable();
        image
    }
}

/// A bijective endomorphism of a finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    map: Vec<usize>,
}

impl Automorphism {
    pub fn new(group: &FiniteGroup, map: &[usize]) -> Result<Self, GroupError> {
        let mut sorted = map.to_vec();
        sorted.sort_unstable();
        if sorted != (0..group.order()).collect::<Vec<_>>() {
            return Err(GroupError::NotBijective(format!("{map:?}")));
        }
        Monomorphism::new(group, group, map)?;
        Ok(Self { map: map.to_vec() })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Order of the automorphism under composition.
    pub fn order(&self) -> usize {
        let mut current = self.map.clone();
        let mut k = 1;
        while current.iter().enumerate().any(|(i, &x)| i != x) {
            current = current.iter().map(|&x| self.map[x]).collect();
            k += 1;
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(&[vec![1, 0, 2], vec![1, 2, 0]]).unwrap()
    }

    #[test]
    fn z2_table() {
        let g = FiniteGroup::from_table(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.inv(1), 1);
    }

    #[test]
    fn missing_inverse_rejected() {
        let err = FiniteGroup::from_table(&[vec![0, 1], vec![1, 1]]).unwrap_err();
        assert!(matches!(err, GroupError::NotAGroup(_)));
    }

    #[test]
    fn identity_must_be_zero() {
        let err = FiniteGroup::from_table(&[vec![1, 0], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, GroupError::NotAGroup(_)));
    }

    #[test]
    fn non_associative_latin_square_rejected() {
        // A loop of order 5 that is not a group.
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = FiniteGroup::from_table(&t).unwrap_err();
        assert!(matches!(err, GroupError::NotAGroup(ref m) if m.contains("associativity")));
    }

    #[test]
    fn permutation_closures() {
        assert_eq!(FiniteGroup::from_permutations(&[vec![1, 2, 3, 0]]).unwrap().order(), 4);
        assert_eq!(FiniteGroup::from_permutations(&[]).unwrap().order(), 1);
        assert_eq!(s3().order(), 6);
    }

    #[test]
    fn bad_permutations() {
        assert!(matches!(
            FiniteGroup::from_permutations(&[vec![0, 0]]),
            Err(GroupError::NotAPermutation(_))
        ));
        assert!(matches!(
            FiniteGroup::from_permutations(&[vec![0, 1], vec![0, 1, 2]]),
            Err(GroupError::NotAPermutation(_))
        ));
    }

    #[test]
    fn order_cap() {
        let s4 = [vec![1, 0, 2, 3], vec![1, 2, 3, 0]];
        assert!(matches!(
            FiniteGroup::from_permutations_capped(&s4, 10),
            Err(GroupError::OrderCapExceeded { cap: 10 })
        ));
        assert_eq!(FiniteGroup::from_permutations_capped(&s4, 24).unwrap().order(), 24);
        let z3 = FiniteGroup::cyclic(3).rows();
        assert!(FiniteGroup::from_table_capped(&z3, 2).is_err());
    }

    #[test]
    fn closures_and_cosets() {
        let z4 = FiniteGroup::cyclic(4);
        assert_eq!(z4.subgroup_closure(&[2]), vec![0, 2]);
        assert_eq!(z4.subgroup_closure(&[]), vec![0]);
        let (parts, reps) = z4.left_cosets(&[0, 2]).unwrap();
        assert_eq!(parts, vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(reps, vec![0, 1]);
        let (parts, reps) = z4.left_cosets(&[0, 1, 2, 3]).unwrap();
        assert_eq!((parts.len(), reps), (1, vec![0]));
        let (_, reps) = FiniteGroup::cyclic(6).left_cosets(&[0, 3]).unwrap();
        assert_eq!(reps, vec![0, 1, 2]);
        assert!(matches!(z4.left_cosets(&[0, 1]), Err(GroupError::NotASubgroup(_))));
    }

    #[test]
    fn monomorphisms() {
        let z2 = FiniteGroup::cyclic(2);
        let z4 = FiniteGroup::cyclic(4);
        assert!(Monomorphism::new(&z2, &z4, &[0, 2]).is_ok());
        assert!(matches!(
            Monomorphism::new(&z2, &z4, &[0, 1]),
            Err(GroupError::NotHomomorphism(_))
        ));
        assert!(Monomorphism::new(&z2, &FiniteGroup::cyclic(6), &[0, 3]).is_ok());
        assert!(matches!(
            Monomorphism::new(&z4, &z2, &[0, 1, 0, 1]),
            Err(GroupError::NotInjective(_))
        ));
    }

    #[test]
    fn automorphisms() {
        let z3 = FiniteGroup::cyclic(3);
        let neg = Automorphism::new(&z3, &[0, 2, 1]).unwrap();
        assert_eq!(neg.order(), 2);
        assert!(!neg.is_identity());
        assert!(Automorphism::new(&z3, &[0, 1, 1]).is_err());
    }

    #[test]
    fn classes() {
        assert_eq!(FiniteGroup::cyclic(4).conjugacy_classes().len(), 4);
        assert_eq!(FiniteGroup::cyclic(1).conjugacy_classes(), vec![vec![0]]);
        let mut sizes: Vec<usize> = s3().conjugacy_classes().iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
    }

    #[test]
    fn names() {
        assert_eq!(FiniteGroup::cyclic(2).fingerprint().name, "Z/2");
        assert_eq!(FiniteGroup::cyclic(1).fingerprint().name, "1");
        assert_eq!(s3().fingerprint().name, "S3");
        let klein =
            FiniteGroup::from_permutations(&[vec![1, 0, 3, 2], vec![2, 3, 0, 1]]).unwrap();
        assert_eq!(klein.fingerprint().name, "Z/2 x Z/2");
        let d4 = FiniteGroup::from_permutations(&[vec![1, 2, 3, 0], vec![3, 2, 1, 0]]).unwrap();
        assert_eq!(d4.fingerprint().name, "D4");
        let a4 = FiniteGroup::from_permutations(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]]).unwrap();
        assert_eq!(a4.fingerprint().name, "A4");
        let s4 = FiniteGroup::from_permutations(&[vec![1, 0, 2, 3], vec![1, 2, 3, 0]]).unwrap();
        assert!(s4.fingerprint().name.starts_with("order-24 group (fingerprint "));
    }
}
