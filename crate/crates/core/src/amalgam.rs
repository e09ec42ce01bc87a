//! Element arithmetic in an amalgamated product `G1 *_H G2` of finite groups.
//!
//! Every element has a unique normal form `s1 s2 ... sn * h` where the
//! syllables `si` are non-trivial left-coset representatives of the embedded
//! copy of `H`, alternating between the two factors, and `h` is an element of
//! `H`. Syllables sit on the left and the `H`-tail on the right, so the
//! cosets `gG1`, `gG2`, `gH` read off as prefixes of the syllable list.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::groups::{FiniteGroup, GroupError, Monomorphism};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmalgamError {
    #[error("degenerate amalgam: [G{side} : H] = 1")]
    DegenerateAmalgam { side: u8 },
    #[error("invalid letter: {0}")]
    InvalidLetter(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// One of the two vertex groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Side::One => 1,
            Side::Two => 2,
        }
    }

    pub const BOTH: [Side; 2] = [Side::One, Side::Two];
}

/// A non-trivial coset representative from one factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Syllable {
    pub side: Side,
    pub rep: usize,
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}:{}", self.side.number(), self.rep)
    }
}

/// Reduced form of an element of the amalgam.
///
/// The derived ordering is lexicographic on syllables (side, then
/// representative index) and then the tail; the identity is the least
/// element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NormalForm {
    pub syllables: Vec<Syllable>,
    pub tail: usize,
}

impl NormalForm {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty() && self.tail == 0
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// The element `s1 ... sn` with the tail dropped.
    pub fn from_syllables(syllables: &[Syllable]) -> Self {
        Self {
            syllables: syllables.to_vec(),
            tail: 0,
        }
    }

    /// Word syntax accepted by [`Letter::parse_word`]; empty for the identity.
    pub fn to_word(&self) -> String {
        let mut parts: Vec<String> = self.syllables.iter().map(Syllable::to_string).collect();
        if self.tail != 0 {
            parts.push(format!("h:{}", self.tail));
        }
        parts.join(" ")
    }

    /// Length first, then the derived lexicographic order.
    pub fn shortlex_cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.cmp(other))
    }
}

impl serde::Serialize for NormalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            f.write_str("1")
        } else {
            f.write_str(&self.to_word())
        }
    }
}

/// Which group a word letter is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LetterGroup {
    H,
    Factor(Side),
}

/// A single generator-level letter of an input word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub group: LetterGroup,
    pub element: usize,
}

impl Letter {
    pub fn g1(element: usize) -> Self {
        Self {
            group: LetterGroup::Factor(Side::One),
            element,
        }
    }

    pub fn g2(element: usize) -> Self {
        Self {
            group: LetterGroup::Factor(Side::Two),
            element,
        }
    }

    pub fn h(element: usize) -> Self {
        Self {
            group: LetterGroup::H,
            element,
        }
    }

    /// Parses whitespace-separated letters `g1:<k>`, `g2:<k>`, `h:<k>`.
    pub fn parse_word(s: &str) -> Result<Vec<Letter>, AmalgamError> {
        s.split_whitespace().map(str::parse).collect()
    }
}

impl FromStr for Letter {
    type Err = AmalgamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (group, index) = s
            .split_once(':')
            .ok_or_else(|| AmalgamError::InvalidLetter(format!("`{s}` is not of the form <group>:<k>")))?;
        let group = match group {
            "g1" => LetterGroup::Factor(Side::One),
            "g2" => LetterGroup::Factor(Side::Two),
            "h" => LetterGroup::H,
            other => {
                return Err(AmalgamError::InvalidLetter(format!(
                    "unknown group `{other}` in `{s}`"
                )))
            }
        };
        let element = index
            .parse()
            .map_err(|_| AmalgamError::InvalidLetter(format!("bad element index in `{s}`")))?;
        Ok(Letter { group, element })
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.group {
            LetterGroup::H => write!(f, "h:{}", self.element),
            LetterGroup::Factor(side) => write!(f, "g{}:{}", side.number(), self.element),
        }
    }
}

/// Per-factor data: the group, the embedding of `H`, and the coset
/// decomposition `x = t * emb(h)` for every element `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorData {
    pub group: Arc<FiniteGroup>,
    pub embedding: Monomorphism,
    pub transversal: Vec<usize>,
    decomposition: Vec<(usize, usize)>,
    preimage: Vec<Option<usize>>,
}

impl FactorData {
    fn new(group: Arc<FiniteGroup>, h: &FiniteGroup, embedding: Monomorphism) -> Result<Self, GroupError> {
        let (_, transversal) = group.left_cosets(&embedding.image())?;
        let mut decomposition = vec![(0, 0); group.order()];
        for &t in &transversal {
            for k in 0..h.order() {
                decomposition[group.mul(t, embedding.apply(k))] = (t, k);
            }
        }
        let mut preimage = vec![None; group.order()];
        for k in 0..h.order() {
            preimage[embedding.apply(k)] = Some(k);
        }
        Ok(Self {
            group,
            embedding,
            transversal,
            decomposition,
            preimage,
        })
    }

    /// `x = t * emb(h)` with `t` in the transversal.
    #[inline]
    pub fn decompose(&self, x: usize) -> (usize, usize) {
        self.decomposition[x]
    }

    /// The element of `H` mapping to `x`, if any.
    pub fn preimage(&self, x: usize) -> Option<usize> {
        self.preimage[x]
    }

    pub fn index(&self) -> usize {
        self.transversal.len()
    }

    /// Non-identity transversal entries, i.e. the possible syllables.
    pub fn syllable_reps(&self) -> &[usize] {
        &self.transversal[1..]
    }
}

/// An amalgamated product `G1 *_H G2` of finite groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamSpec {
    pub name: String,
    pub h: Arc<FiniteGroup>,
    factors: [FactorData; 2],
}

impl AmalgamSpec {
    pub fn new(
        name: impl Into<String>,
        g1: FiniteGroup,
        g2: FiniteGroup,
        h: FiniteGroup,
        emb1: &[usize],
        emb2: &[usize],
    ) -> Result<Self, AmalgamError> {
        let e1 = Monomorphism::new(&h, &g1, emb1)?;
        let e2 = Monomorphism::new(&h, &g2, emb2)?;
        let h = Arc::new(h);
        let f1 = FactorData::new(Arc::new(g1), &h, e1)?;
        let f2 = FactorData::new(Arc::new(g2), &h, e2)?;
        for (side, f) in [(1, &f1), (2, &f2)] {
            if f.index() < 2 {
                return Err(AmalgamError::DegenerateAmalgam { side });
            }
        }
        Ok(Self {
            name: name.into(),
            h,
            factors: [f1, f2],
        })
    }

    pub fn factor(&self, side: Side) -> &FactorData {
        match side {
            Side::One => &self.factors[0],
            Side::Two => &self.factors[1],
        }
    }

    pub fn group(&self, side: Side) -> &FiniteGroup {
        &self.factor(side).group
    }

    /// `([G1 : H], [G2 : H])`.
    pub fn indices(&self) -> (usize, usize) {
        (self.factors[0].index(), self.factors[1].index())
    }

    pub fn h_order(&self) -> usize {
        self.h.order()
    }

    fn check_letter(&self, letter: &Letter) -> Result<(), AmalgamError> {
        let order = match letter.group {
            LetterGroup::H => self.h.order(),
            LetterGroup::Factor(side) => self.group(side).order(),
        };
        if letter.element >= order {
            return Err(AmalgamError::InvalidLetter(format!(
                "{letter}: element index out of range (order {order})"
            )));
        }
        Ok(())
    }

    /// Normal form of a product of letters.
    ///
    /// Letters are absorbed one at a time at the right end: the current tail
    /// is folded into the incoming letter through the embedding, merged with
    /// the last syllable when it lies in the same factor, and split back
    /// into a transversal element and a new tail. No cascades are needed.
    pub fn reduce(&self, word: &[Letter]) -> Result<NormalForm, AmalgamError> {
        let mut nf = NormalForm::identity();
        for letter in word {
            self.check_letter(letter)?;
            self.absorb(&mut nf, *letter);
        }
        Ok(nf)
    }

    fn absorb(&self, nf: &mut NormalForm, letter: Letter) {
        match letter.group {
            LetterGroup::H => nf.tail = self.h.mul(nf.tail, letter.element),
            LetterGroup::Factor(side) => self.absorb_factor(nf, side, letter.element),
        }
    }

    fn absorb_factor(&self, nf: &mut NormalForm, side: Side, x: usize) {
        let f = self.factor(side);
        let g = &f.group;
        let mut y = g.mul(f.embedding.apply(nf.tail), x);
        if let Some(last) = nf.syllables.last() {
            if last.side == side {
                y = g.mul(last.rep, y);
                nf.syllables.pop();
            }
        }
        let (t, h) = f.decompose(y);
        if t != 0 {
            nf.syllables.push(Syllable { side, rep: t });
        }
        nf.tail = h;
    }

    /// Letters spelling out a normal form.
    pub fn letters(nf: &NormalForm) -> Vec<Letter> {
        let mut out: Vec<Letter> = nf
            .syllables
            .iter()
            .map(|s| Letter {
                group: LetterGroup::Factor(s.side),
                element: s.rep,
            })
            .collect();
        if nf.tail != 0 {
            out.push(Letter::h(nf.tail));
        }
        out
    }

    /// The element `emb(h)` viewed in the amalgam.
    pub fn from_h(&self, h: usize) -> NormalForm {
        NormalForm {
            syllables: Vec::new(),
            tail: h,
        }
    }

    /// The element `x` of factor `side` viewed in the amalgam.
    pub fn from_factor(&self, side: Side, x: usize) -> NormalForm {
        let mut nf = NormalForm::identity();
        self.absorb_factor(&mut nf, side, x);
        nf
    }

    pub fn multiply(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        let mut nf = a.clone();
        for s in &b.syllables {
            self.absorb_factor(&mut nf, s.side, s.rep);
        }
        nf.tail = self.h.mul(nf.tail, b.tail);
        nf
    }

    pub fn inverse(&self, a: &NormalForm) -> NormalForm {
        let mut nf = self.from_h(self.h.inv(a.tail));
        for s in a.syllables.iter().rev() {
            let g = self.group(s.side);
            self.absorb_factor(&mut nf, s.side, g.inv(s.rep));
        }
        nf
    }

    /// `x * g * x^-1`.
    pub fn conjugate(&self, g: &NormalForm, x: &NormalForm) -> NormalForm {
        self.multiply(&self.multiply(x, g), &self.inverse(x))
    }

    pub fn pow(&self, g: &NormalForm, k: i64) -> NormalForm {
        let base = if k < 0 { self.inverse(g) } else { g.clone() };
        let mut acc = NormalForm::identity();
        for _ in 0..k.unsigned_abs() {
            acc = self.multiply(&acc, &base);
        }
        acc
    }

    /// Returns `(core, conjugator)` with `g = conjugator * core * conjugator^-1`
    /// and `core` cyclically reduced: at most one syllable, or first and last
    /// syllables in different factors.
    pub fn cyclic_reduce(&self, g: &NormalForm) -> (NormalForm, NormalForm) {
        let mut core = g.clone();
        let mut conjugator = NormalForm::identity();
        while core.len() >= 2 && core.syllables[0].side == core.syllables[core.len() - 1].side {
            let first = NormalForm::from_syllables(&core.syllables[..1]);
            core = self.conjugate(&core, &self.inverse(&first));
            conjugator = self.multiply(&conjugator, &first);
        }
        (core, conjugator)
    }

    /// Every normal form with exactly `len` syllables, in transversal order:
    /// starting side, then representatives left to right, then tail.
    pub fn normal_forms_of_length(&self, len: usize) -> Vec<NormalForm> {
        let mut out = Vec::new();
        let starts: &[Side] = if len == 0 { &[Side::One] } else { &Side::BOTH };
        for &start in starts {
            let mut prefixes: Vec<Vec<Syllable>> = vec![Vec::new()];
            let mut side = start;
            for _ in 0..len {
                let reps = self.factor(side).syllable_reps();
                prefixes = prefixes
                    .into_iter()
                    .flat_map(|p| {
                        reps.iter().map(move |&rep| {
                            let mut q = p.clone();
                            q.push(Syllable { side, rep });
                            q
                        })
                    })
                    .collect();
                side = side.other();
            }
            for syllables in prefixes {
                for tail in 0..self.h.order() {
                    out.push(NormalForm {
                        syllables: syllables.clone(),
                        tail,
                    });
                }
            }
        }
        out
    }

    /// Every normal form with at most `max_len` syllables.
    pub fn normal_forms_up_to(&self, max_len: usize) -> Vec<NormalForm> {
        (0..=max_len).flat_map(|n| self.normal_forms_of_length(n)).collect()
    }

    /// Checks that a normal form is valid for this amalgam.
    pub fn is_valid(&self, nf: &NormalForm) -> bool {
        nf.tail < self.h.order()
            && nf.syllables.windows(2).all(|w| w[0].side != w[1].side)
            && nf.syllables.iter().all(|s| {
                let f = self.factor(s.side);
                s.rep != 0 && f.transversal.binary_search(&s.rep).is_ok()
            })
    }
}
