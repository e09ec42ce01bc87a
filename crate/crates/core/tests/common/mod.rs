//! Independent oracles shared by the integration and acceptance tests.
//!
//! Nothing here calls the library's multiplication, tree or dynamics code:
//! the oracle reads the raw group tables and embeddings and rebuilds
//! everything from brute force.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::PathBuf;

use nilsplit::amalgam::{AmalgamSpec, Letter, LetterGroup, NormalForm, Side, Syllable};
use nilsplit::cli::SpecFile;
use nilsplit::groups::{FiniteGroup, DEFAULT_ORDER_CAP};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SAMPLES: [&str; 3] = ["dinfinity", "psl2z", "sl2z"];

pub fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(format!("{name}.json"))
}

pub fn sample(name: &str) -> AmalgamSpec {
    SpecFile::read(&spec_path(name))
        .unwrap()
        .build(DEFAULT_ORDER_CAP)
        .unwrap()
}

pub fn samples() -> Vec<AmalgamSpec> {
    SAMPLES.iter().map(|s| sample(s)).collect()
}

pub fn word(spec: &AmalgamSpec, s: &str) -> NormalForm {
    spec.reduce(&Letter::parse_word(s).unwrap()).unwrap()
}

// ---------------------------------------------------------------------------
// Finite groups

/// Order of `x` by repeated multiplication against the raw table.
pub fn brute_element_order(table: &[Vec<usize>], x: usize) -> usize {
    let mut y = x;
    let mut n = 1;
    while y != 0 {
        y = table[y][x];
        n += 1;
    }
    n
}

/// Closure of a set of permutations under composition `(p q)(i) = p(q(i))`.
pub fn brute_permutation_closure(generators: &[Vec<usize>], degree: usize) -> BTreeSet<Vec<usize>> {
    let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
    set.insert((0..degree).collect());
    loop {
        let current: Vec<Vec<usize>> = set.iter().cloned().collect();
        let before = set.len();
        for p in &current {
            for q in generators {
                set.insert(q.iter().map(|&i| p[i]).collect());
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

/// Left cosets `xS` as sorted element sets.
pub fn brute_left_cosets(g: &FiniteGroup, sub: &[usize]) -> BTreeSet<BTreeSet<usize>> {
    (0..g.order())
        .map(|x| sub.iter().map(|&s| g.mul(x, s)).collect())
        .collect()
}

pub fn brute_conjugacy_classes(g: &FiniteGroup) -> BTreeSet<BTreeSet<usize>> {
    (0..g.order())
        .map(|x| (0..g.order()).map(|y| g.mul(g.mul(y, x), g.inv(y))).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// Amalgam arithmetic

/// An element as (alternating syllables, H-tail).
pub type Elt = (Vec<(Side, usize)>, usize);

pub struct Oracle {
    groups: [FiniteGroup; 2],
    h: FiniteGroup,
    emb: [Vec<usize>; 2],
    /// Least element of the left coset `x emb(H)`.
    coset_min: [Vec<usize>; 2],
    /// The `h` with `x = coset_min(x) emb(h)`.
    coset_h: [Vec<usize>; 2],
}

fn idx(side: Side) -> usize {
    match side {
        Side::One => 0,
        Side::Two => 1,
    }
}

impl Oracle {
    pub fn new(spec: &AmalgamSpec) -> Self {
        let groups = [spec.group(Side::One).clone(), spec.group(Side::Two).clone()];
        let h = (*spec.h).clone();
        let emb = [
            spec.factor(Side::One).embedding.as_slice().to_vec(),
            spec.factor(Side::Two).embedding.as_slice().to_vec(),
        ];
        let mut coset_min = [Vec::new(), Vec::new()];
        let mut coset_h = [Vec::new(), Vec::new()];
        for i in 0..2 {
            let g = &groups[i];
            for x in 0..g.order() {
                let m = (0..h.order()).map(|k| g.mul(x, emb[i][k])).min().unwrap();
                let hk = (0..h.order()).find(|&k| g.mul(m, emb[i][k]) == x).unwrap();
                coset_min[i].push(m);
                coset_h[i].push(hk);
            }
        }
        Self {
            groups,
            h,
            emb,
            coset_min,
            coset_h,
        }
    }

    pub fn group(&self, side: Side) -> &FiniteGroup {
        &self.groups[idx(side)]
    }

    pub fn h_order(&self) -> usize {
        self.h.order()
    }

    /// Pushes `h` rightwards through the syllables and into the tail.
    fn push_h(&self, mut h: usize, syllables: &[(Side, usize)], tail: usize) -> Elt {
        let mut out = Vec::with_capacity(syllables.len());
        for &(side, s) in syllables {
            let i = idx(side);
            let y = self.groups[i].mul(self.emb[i][h], s);
            out.push((side, self.coset_min[i][y]));
            h = self.coset_h[i][y];
        }
        (out, self.h.mul(h, tail))
    }

    /// Multiplies a single letter onto the left.
    pub fn prepend(&self, letter: &Letter, e: &Elt) -> Elt {
        let (syllables, tail) = e;
        match letter.group {
            LetterGroup::H => self.push_h(letter.element, syllables, *tail),
            LetterGroup::Factor(side) => {
                let i = idx(side);
                let (y, rest) = match syllables.first() {
                    Some(&(s, r)) if s == side => (self.groups[i].mul(letter.element, r), &syllables[1..]),
                    _ => (letter.element, &syllables[..]),
                };
                let (m, hk) = (self.coset_min[i][y], self.coset_h[i][y]);
                let (pushed, tail) = self.push_h(hk, rest, *tail);
                if m == 0 {
                    (pushed, tail)
                } else {
                    let mut out = vec![(side, m)];
                    out.extend(pushed);
                    (out, tail)
                }
            }
        }
    }

    /// Right-to-left reduction of a letter sequence.
    pub fn reduce(&self, letters: &[Letter]) -> Elt {
        letters
            .iter()
            .rev()
            .fold((Vec::new(), 0), |e, l| self.prepend(l, &e))
    }

    pub fn letters(&self, e: &Elt) -> Vec<Letter> {
        let mut out: Vec<Letter> = e
            .0
            .iter()
            .map(|&(side, r)| match side {
                Side::One => Letter::g1(r),
                Side::Two => Letter::g2(r),
            })
            .collect();
        out.push(Letter::h(e.1));
        out
    }

    pub fn mul(&self, a: &Elt, b: &Elt) -> Elt {
        let mut l = self.letters(a);
        l.extend(self.letters(b));
        self.reduce(&l)
    }

    pub fn inv(&self, a: &Elt) -> Elt {
        let mut l = vec![Letter::h(self.h.inv(a.1))];
        for &(side, r) in a.0.iter().rev() {
            let g = &self.groups[idx(side)];
            l.push(match side {
                Side::One => Letter::g1(g.inv(r)),
                Side::Two => Letter::g2(g.inv(r)),
            });
        }
        self.reduce(&l)
    }

    pub fn pow(&self, a: &Elt, k: i64) -> Elt {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        (0..k.unsigned_abs()).fold((Vec::new(), 0), |acc, _| self.mul(&acc, &base))
    }

    /// `x g x^-1`.
    pub fn conj(&self, g: &Elt, x: &Elt) -> Elt {
        self.mul(&self.mul(x, g), &self.inv(x))
    }

    pub fn factor_elt(&self, side: Side, x: usize) -> Elt {
        self.reduce(&[match side {
            Side::One => Letter::g1(x),
            Side::Two => Letter::g2(x),
        }])
    }

    /// Every element with at most `n` syllables, built from coset data
    /// rather than by reduction.
    pub fn elements_up_to(&self, n: usize) -> Vec<Elt> {
        let reps: [Vec<usize>; 2] = [0, 1].map(|i| {
            let set: BTreeSet<usize> = self.coset_min[i].iter().copied().filter(|&m| m != 0).collect();
            set.into_iter().collect()
        });
        let mut words: Vec<Vec<(Side, usize)>> = vec![Vec::new()];
        let mut frontier = words.clone();
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &frontier {
                for side in Side::BOTH {
                    if w.last().map(|l| l.0) == Some(side) {
                        continue;
                    }
                    for &r in &reps[idx(side)] {
                        let mut v = w.clone();
                        v.push((side, r));
                        next.push(v);
                    }
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        let mut out: Vec<Elt> = words
            .into_iter()
            .flat_map(|w| (0..self.h.order()).map(move |t| (w.clone(), t)))
            .collect();
        out.sort();
        out
    }

    pub fn random_letters(&self, rng: &mut ChaCha8Rng, max_len: usize) -> Vec<Letter> {
        let len = rng.gen_range(0..=max_len);
        (0..len)
            .map(|_| match rng.gen_range(0..5) {
                0 => Letter::h(rng.gen_range(0..self.h.order())),
                1 | 2 => Letter::g1(rng.gen_range(0..self.groups[0].order())),
                _ => Letter::g2(rng.gen_range(0..self.groups[1].order())),
            })
            .collect()
    }

    pub fn random_elt(&self, rng: &mut ChaCha8Rng, max_len: usize) -> Elt {
        let l = self.random_letters(rng, max_len);
        self.reduce(&l)
    }

    // -----------------------------------------------------------------------
    // Tree

    /// Canonical key of the vertex `a G_side`: the least element of the coset.
    pub fn vertex_key(&self, side: Side, a: &Elt) -> (Side, Elt) {
        let g = &self.groups[idx(side)];
        let least = (0..g.order())
            .map(|x| self.mul(a, &self.factor_elt(side, x)))
            .min()
            .unwrap();
        (side, least)
    }

    /// `d(a G_i, b G_j)`: with `c = a^-1 b` shortened on the left by `G_i`
    /// and on the right by `G_j` to `m` syllables, the geodesic has `m + 1`
    /// edges, or `[i != j]` when `m = 0`.
    pub fn distance(&self, (i, a): (Side, &Elt), (j, b): (Side, &Elt)) -> usize {
        let c = self.mul(&self.inv(a), b);
        let (gi, gj) = (self.group(i), self.group(j));
        let mut m = usize::MAX;
        for x in 0..gi.order() {
            let xc = self.mul(&self.factor_elt(i, x), &c);
            for y in 0..gj.order() {
                m = m.min(self.mul(&xc, &self.factor_elt(j, y)).0.len());
            }
        }
        if m == 0 {
            usize::from(i != j)
        } else {
            m + 1
        }
    }

    /// Vertices within `radius` of `G1`, by breadth-first search over
    /// canonical keys.
    pub fn ball(&self, radius: usize) -> Vec<(Side, Elt)> {
        let start = self.vertex_key(Side::One, &(Vec::new(), 0));
        let mut seen: BTreeMap<(Side, Elt), usize> = BTreeMap::new();
        seen.insert(start.clone(), 0);
        let mut queue = VecDeque::from([start]);
        while let Some((side, a)) = queue.pop_front() {
            let d = seen[&(side, a.clone())];
            if d == radius {
                continue;
            }
            let other = match side {
                Side::One => Side::Two,
                Side::Two => Side::One,
            };
            for x in 0..self.group(side).order() {
                let key = self.vertex_key(other, &self.mul(&a, &self.factor_elt(side, x)));
                if !seen.contains_key(&key) {
                    seen.insert(key.clone(), d + 1);
                    queue.push_back(key);
                }
            }
        }
        seen.into_keys().collect()
    }

    pub fn displacement(&self, g: &Elt, (side, a): &(Side, Elt)) -> usize {
        self.distance((*side, a), (*side, &self.mul(g, a)))
    }

    pub fn min_displacement(&self, g: &Elt, ball: &[(Side, Elt)]) -> usize {
        ball.iter().map(|v| self.displacement(g, v)).min().unwrap()
    }

    /// Number of classes of hyperbolic elements under "some powers are
    /// conjugate": `x g^a x^-1 = h^(+-b)` with `1 <= a, b <= max_power` and
    /// `x` ranging over `conjugators`.
    pub fn commensurability_classes(&self, hyperbolic: &[Elt], conjugators: &[Elt], max_power: i64) -> usize {
        let mut powers: HashMap<Elt, Vec<usize>> = HashMap::new();
        for (j, h) in hyperbolic.iter().enumerate() {
            for b in 1..=max_power {
                for e in [self.pow(h, b), self.pow(h, -b)] {
                    powers.entry(e).or_default().push(j);
                }
            }
        }
        let mut parent: Vec<usize> = (0..hyperbolic.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, g) in hyperbolic.iter().enumerate() {
            let gp: Vec<Elt> = (1..=max_power).map(|a| self.pow(g, a)).collect();
            for x in conjugators {
                let xi = self.inv(x);
                for ga in &gp {
                    let y = self.mul(&self.mul(x, ga), &xi);
                    if let Some(js) = powers.get(&y) {
                        for &j in js {
                            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                            parent[ri] = rj;
                        }
                    }
                }
            }
        }
        (0..parent.len())
            .filter(|&i| find(&mut parent, i) == i)
            .count()
    }
}

pub fn to_nf(e: &Elt) -> NormalForm {
    NormalForm {
        syllables: e.0.iter().map(|&(side, rep)| Syllable { side, rep }).collect(),
        tail: e.1,
    }
}

pub fn from_nf(nf: &NormalForm) -> Elt {
    (nf.syllables.iter().map(|s| (s.side, s.rep)).collect(), nf.tail)
}
