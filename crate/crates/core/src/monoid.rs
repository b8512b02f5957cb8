//! Quasi-lattice ordered monoids: `N^k` and free products of copies of `N`.
//!
//! All order computations are phrased divisor-style (`a <= b` iff some
//! `c` has `a c = b`), so elements of the enveloping group outside the
//! positive cone are never materialised.

use std::fmt;

use crate::error::{Error, Result};

/// Which family the monoid belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monoid {
    /// `N^k` with coordinatewise addition.
    FreeAbelian { rank: usize },
    /// The free product of `components` copies of `N`.
    FreeProduct { components: usize },
}

/// A maximal run of a single component inside a reduced word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub component: usize,
    pub exponent: u64,
}

/// An element of the monoid.
///
/// Free abelian elements are exponent vectors; free-product elements are
/// reduced words of blocks (adjacent blocks have distinct components and
/// every exponent is at least 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonoidElement {
    Exponents(Vec<u64>),
    Word(Vec<Block>),
}

impl MonoidElement {
    /// Total degree: the sum of all exponents.
    pub fn word_length(&self) -> u64 {
        match self {
            MonoidElement::Exponents(v) => v.iter().sum(),
            MonoidElement::Word(blocks) => blocks.iter().map(|b| b.exponent).sum(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.word_length() == 0
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonoidElement::Exponents(v) => {
                write!(f, "(")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
            MonoidElement::Word(blocks) => {
                if blocks.is_empty() {
                    return write!(f, "e");
                }
                for (i, b) in blocks.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{}{}", component_letter(b.component), b.exponent)?;
                }
                Ok(())
            }
        }
    }
}

/// Display letter for free-product component `i`: x, y, z, then `g3`, `g4`, ...
pub fn component_letter(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        _ => format!("g{i}"),
    }
}

/// The result of a join: a least upper bound or no common upper bound at all.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Join {
    Element(MonoidElement),
    Infinity,
}

impl Join {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Join::Infinity)
    }

    pub fn element(&self) -> Option<&MonoidElement> {
        match self {
            Join::Element(e) => Some(e),
            Join::Infinity => None,
        }
    }
}

impl fmt::Display for Join {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Join::Element(e) => write!(f, "{e}"),
            Join::Infinity => write!(f, "INFINITY"),
        }
    }
}

impl Monoid {
    /// Number of generators: `k` for `N^k`, one per component for free products.
    pub fn generator_count(&self) -> usize {
        match self {
            Monoid::FreeAbelian { rank } => *rank,
            Monoid::FreeProduct { components } => *components,
        }
    }

    pub fn identity(&self) -> MonoidElement {
        match self {
            Monoid::FreeAbelian { rank } => MonoidElement::Exponents(vec![0; *rank]),
            Monoid::FreeProduct { .. } => MonoidElement::Word(Vec::new()),
        }
    }

    /// The `g`-th generator (unit exponent).
    pub fn generator(&self, g: usize) -> MonoidElement {
        match self {
            Monoid::FreeAbelian { rank } => {
                assert!(g < *rank);
                let mut v = vec![0; *rank];
                v[g] = 1;
                MonoidElement::Exponents(v)
            }
            Monoid::FreeProduct { components } => {
                assert!(g < *components);
                MonoidElement::Word(vec![Block { component: g, exponent: 1 }])
            }
        }
    }

    /// Checks that `a` is well-formed for this monoid.
    pub fn validate(&self, a: &MonoidElement) -> Result<()> {
        match (self, a) {
            (Monoid::FreeAbelian { rank }, MonoidElement::Exponents(v)) => {
                if v.len() == *rank {
                    Ok(())
                } else {
                    Err(Error::DescriptorMismatch(format!(
                        "expected rank {rank}, got vector of length {}",
                        v.len()
                    )))
                }
            }
            (Monoid::FreeProduct { components }, MonoidElement::Word(blocks)) => {
                for (i, b) in blocks.iter().enumerate() {
                    if b.component >= *components {
                        return Err(Error::DescriptorMismatch(format!(
                            "component index {} out of range (m = {components})",
                            b.component
                        )));
                    }
                    if b.exponent == 0 {
                        return Err(Error::DescriptorMismatch("zero-exponent block".into()));
                    }
                    if i > 0 && blocks[i - 1].component == b.component {
                        return Err(Error::DescriptorMismatch(
                            "word is not reduced: adjacent blocks share a component".into(),
                        ));
                    }
                }
                Ok(())
            }
            _ => Err(Error::DescriptorMismatch(
                "element kind does not match the monoid family".into(),
            )),
        }
    }

    /// The reduced product `a b`.
    pub fn multiply(&self, a: &MonoidElement, b: &MonoidElement) -> Result<MonoidElement> {
        self.validate(a)?;
        self.validate(b)?;
        match (a, b) {
            (MonoidElement::Exponents(x), MonoidElement::Exponents(y)) => {
                let mut out = Vec::with_capacity(x.len());
                for (p, q) in x.iter().zip(y) {
                    out.push(p.checked_add(*q).ok_or(Error::ExponentOverflow)?);
                }
                Ok(MonoidElement::Exponents(out))
            }
            (MonoidElement::Word(x), MonoidElement::Word(y)) => {
                let mut out = x.clone();
                for b in y {
                    match out.last_mut() {
                        Some(last) if last.component == b.component => {
                            last.exponent = last
                                .exponent
                                .checked_add(b.exponent)
                                .ok_or(Error::ExponentOverflow)?;
                        }
                        _ => out.push(*b),
                    }
                }
                Ok(MonoidElement::Word(out))
            }
            _ => unreachable!("validate rejects mixed kinds"),
        }
    }

    /// Left divisibility: true iff some `c` has `a c = b`.
    pub fn leq(&self, a: &MonoidElement, b: &MonoidElement) -> Result<bool> {
        Ok(self.left_quotient(a, b)?.is_some())
    }

    /// The unique `c` with `a c = b`, when it exists.
    pub fn left_quotient(
        &self,
        a: &MonoidElement,
        b: &MonoidElement,
    ) -> Result<Option<MonoidElement>> {
        self.validate(a)?;
        self.validate(b)?;
        match (a, b) {
            (MonoidElement::Exponents(x), MonoidElement::Exponents(y)) => {
                let mut out = Vec::with_capacity(x.len());
                for (p, q) in x.iter().zip(y) {
                    match q.checked_sub(*p) {
                        Some(d) => out.push(d),
                        None => return Ok(None),
                    }
                }
                Ok(Some(MonoidElement::Exponents(out)))
            }
            (MonoidElement::Word(x), MonoidElement::Word(y)) => {
                Ok(word_quotient(x, y).map(MonoidElement::Word))
            }
            _ => unreachable!("validate rejects mixed kinds"),
        }
    }

    /// Least common upper bound of `a` and `b`.
    pub fn join(&self, a: &MonoidElement, b: &MonoidElement) -> Result<Join> {
        self.validate(a)?;
        self.validate(b)?;
        match (a, b) {
            (MonoidElement::Exponents(x), MonoidElement::Exponents(y)) => {
                let v = x.iter().zip(y).map(|(p, q)| (*p).max(*q)).collect();
                Ok(Join::Element(MonoidElement::Exponents(v)))
            }
            (MonoidElement::Word(x), MonoidElement::Word(y)) => Ok(match word_join(x, y) {
                Some(w) => Join::Element(MonoidElement::Word(w)),
                None => Join::Infinity,
            }),
            _ => unreachable!("validate rejects mixed kinds"),
        }
    }

    /// Least upper bound of a finite set; the empty set yields the identity
    /// and an infinite partial join is absorbing.
    pub fn sigma<'a, I>(&self, elems: I) -> Result<Join>
    where
        I: IntoIterator<Item = &'a MonoidElement>,
    {
        let mut acc = self.identity();
        for e in elems {
            match self.join(&acc, e)? {
                Join::Element(j) => acc = j,
                Join::Infinity => return Ok(Join::Infinity),
            }
        }
        Ok(Join::Element(acc))
    }

    /// All left divisors of `a` (finite in both families).
    pub fn left_divisors(&self, a: &MonoidElement) -> Result<Vec<MonoidElement>> {
        self.validate(a)?;
        match a {
            MonoidElement::Exponents(v) => {
                let mut out = vec![Vec::new()];
                for &e in v {
                    let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
                    for prefix in &out {
                        for q in 0..=e {
                            let mut p = prefix.clone();
                            p.push(q);
                            next.push(p);
                        }
                    }
                    out = next;
                }
                Ok(out.into_iter().map(MonoidElement::Exponents).collect())
            }
            MonoidElement::Word(blocks) => {
                let mut out = vec![MonoidElement::Word(Vec::new())];
                for k in 0..blocks.len() {
                    for q in 1..=blocks[k].exponent {
                        let mut w = blocks[..k].to_vec();
                        w.push(Block { component: blocks[k].component, exponent: q });
                        out.push(MonoidElement::Word(w));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Canonical homomorphism of a free product onto `N^m`: per-component
    /// exponent sums.
    pub fn theta(&self, a: &MonoidElement) -> Result<MonoidElement> {
        let m = match self {
            Monoid::FreeProduct { components } => *components,
            Monoid::FreeAbelian { .. } => return Err(Error::NotFreeProduct),
        };
        self.validate(a)?;
        let MonoidElement::Word(blocks) = a else { unreachable!() };
        let mut v = vec![0u64; m];
        for b in blocks {
            v[b.component] = v[b.component]
                .checked_add(b.exponent)
                .ok_or(Error::ExponentOverflow)?;
        }
        Ok(MonoidElement::Exponents(v))
    }

    /// Target monoid of [`Monoid::theta`].
    pub fn theta_target(&self) -> Result<Monoid> {
        match self {
            Monoid::FreeProduct { components } => Ok(Monoid::FreeAbelian { rank: *components }),
            Monoid::FreeAbelian { .. } => Err(Error::NotFreeProduct),
        }
    }

    /// All elements of word length at most `l`, sorted by (length, lexicographic).
    pub fn elements_up_to(&self, l: u64) -> Vec<MonoidElement> {
        let mut out = match self {
            Monoid::FreeAbelian { rank } => {
                let mut acc = Vec::new();
                let mut cur = vec![0u64; *rank];
                enumerate_vectors(&mut cur, 0, l, &mut acc);
                acc
            }
            Monoid::FreeProduct { components } => {
                let mut acc = vec![MonoidElement::Word(Vec::new())];
                let mut word: Vec<Block> = Vec::new();
                enumerate_words(*components, &mut word, l, &mut acc);
                acc
            }
        };
        out.sort_by(|a, b| (a.word_length(), a).cmp(&(b.word_length(), b)));
        out
    }
}

fn enumerate_vectors(cur: &mut Vec<u64>, pos: usize, budget: u64, acc: &mut Vec<MonoidElement>) {
    if pos == cur.len() {
        acc.push(MonoidElement::Exponents(cur.clone()));
        return;
    }
    for e in 0..=budget {
        cur[pos] = e;
        enumerate_vectors(cur, pos + 1, budget - e, acc);
    }
    cur[pos] = 0;
}

fn enumerate_words(m: usize, word: &mut Vec<Block>, budget: u64, acc: &mut Vec<MonoidElement>) {
    for c in 0..m {
        if word.last().map(|b| b.component) == Some(c) {
            continue;
        }
        for e in 1..=budget {
            word.push(Block { component: c, exponent: e });
            acc.push(MonoidElement::Word(word.clone()));
            enumerate_words(m, word, budget - e, acc);
            word.pop();
        }
    }
}

/// Prefix quotient on reduced words: the `c` with `a c = b`, if any.
fn word_quotient(a: &[Block], b: &[Block]) -> Option<Vec<Block>> {
    if a.is_empty() {
        return Some(b.to_vec());
    }
    if b.is_empty() {
        return None;
    }
    let (x, y) = (a[0], b[0]);
    if x.component != y.component || x.exponent > y.exponent {
        return None;
    }
    if x.exponent == y.exponent {
        word_quotient(&a[1..], &b[1..])
    } else if a.len() == 1 {
        let mut rest = vec![Block { component: y.component, exponent: y.exponent - x.exponent }];
        rest.extend_from_slice(&b[1..]);
        Some(rest)
    } else {
        None
    }
}

/// Least common upper bound of reduced words; `None` when no common upper
/// bound exists.
fn word_join(a: &[Block], b: &[Block]) -> Option<Vec<Block>> {
    if a.is_empty() {
        return Some(b.to_vec());
    }
    if b.is_empty() {
        return Some(a.to_vec());
    }
    let (x, y) = (a[0], b[0]);
    if x.component != y.component {
        return None;
    }
    if x.exponent == y.exponent {
        let tail = word_join(&a[1..], &b[1..])?;
        // The tails start in other components, so prepending keeps the word reduced.
        let mut out = vec![x];
        out.extend(tail);
        Some(out)
    } else if x.exponent < y.exponent {
        if a.len() == 1 {
            Some(b.to_vec())
        } else {
            None
        }
    } else if b.len() == 1 {
        Some(a.to_vec())
    } else {
        None
    }
}
