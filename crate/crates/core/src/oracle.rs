//! Brute-force reference implementations of the order operations.
//!
//! These enumerate candidates exhaustively and exist only to cross-check
//! the algorithmic versions in [`crate::monoid`]; they share the monoid
//! multiplication but none of the order logic.

use crate::monoid::{Join, Monoid, MonoidElement};

/// True iff some `c` with `a c = b` exists, found by exhaustive search over
/// all elements of length at most `|b|`.
pub fn leq_brute(m: &Monoid, a: &MonoidElement, b: &MonoidElement) -> bool {
    if a.word_length() > b.word_length() {
        return false;
    }
    m.elements_up_to(b.word_length())
        .iter()
        .any(|c| m.multiply(a, c).map(|p| &p == b).unwrap_or(false))
}

/// Least common upper bound by exhaustive enumeration of all elements of
/// length at most `|a| + |b|`.
pub fn join_brute(m: &Monoid, a: &MonoidElement, b: &MonoidElement) -> Join {
    let bound = a.word_length() + b.word_length();
    let ubs: Vec<MonoidElement> = m
        .elements_up_to(bound)
        .into_iter()
        .filter(|r| leq_brute(m, a, r) && leq_brute(m, b, r))
        .collect();
    if ubs.is_empty() {
        return Join::Infinity;
    }
    let least = ubs
        .iter()
        .find(|j| ubs.iter().all(|r| leq_brute(m, j, r)))
        .expect("common upper bounds exist but no least one; (QL2) violated");
    Join::Element(least.clone())
}

/// Least upper bound of a finite set by exhaustive enumeration.
pub fn sigma_brute(m: &Monoid, elems: &[MonoidElement]) -> Join {
    let bound: u64 = elems.iter().map(|e| e.word_length()).sum();
    let ubs: Vec<MonoidElement> = m
        .elements_up_to(bound)
        .into_iter()
        .filter(|r| elems.iter().all(|a| leq_brute(m, a, r)))
        .collect();
    if ubs.is_empty() {
        return Join::Infinity;
    }
    let least = ubs
        .iter()
        .find(|j| ubs.iter().all(|r| leq_brute(m, j, r)))
        .expect("common upper bounds exist but no least one; (QL2) violated");
    Join::Element(least.clone())
}
