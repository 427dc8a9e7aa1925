//! Exhaustive search for short relations: freely reduced words over the
//! generators that evaluate to the identity (or to minus the identity,
//! which would become a relation after squaring). Finding none up to a
//! length certifies the pair is free "up to that length"; it is not a
//! freeness proof.

use super::word::{Letter, LETTERS};
use super::{Mat2K, MatGroupError, ReducedWord};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct RelationSearch {
    pub max_len: usize,
    /// Shortest freely reduced word evaluating to the identity, if any.
    pub shortest_identity: Option<ReducedWord>,
    /// Shortest freely reduced word evaluating to minus the identity.
    pub shortest_neg_identity: Option<ReducedWord>,
    pub words_checked: u64,
}

impl RelationSearch {
    /// True when no word of length <= max_len hits +-identity.
    pub fn passed(&self) -> bool {
        self.shortest_identity.is_none() && self.shortest_neg_identity.is_none()
    }
}

/// Search all freely reduced words of length 1..=max_len over a, A, b, B.
/// The DFS shares prefix products, and once a relation of length L is found
/// only strictly shorter candidates are explored further.
pub fn search_short_relations<S: Scalar>(
    a: &Mat2K<S>,
    b: &Mat2K<S>,
    max_len: usize,
) -> Result<RelationSearch, MatGroupError> {
    let a_inv = a.inv()?;
    let b_inv = b.inv()?;
    Ok(search_with_inverses(a, &a_inv, b, &b_inv, max_len))
}

pub(super) fn search_with_inverses<S: Scalar>(
    a: &Mat2K<S>,
    a_inv: &Mat2K<S>,
    b: &Mat2K<S>,
    b_inv: &Mat2K<S>,
    max_len: usize,
) -> RelationSearch {
    let gens = [a, a_inv, b, b_inv];
    let mut state = SearchState {
        max_len,
        best_id: None,
        best_neg: None,
        words_checked: 0,
        prefix: Vec::with_capacity(max_len),
    };
    if max_len >= 1 {
        for first in LETTERS {
            state.prefix.push(first);
            visit(&mut state, &gens, gens[first.index()].clone());
            state.prefix.pop();
        }
    }
    RelationSearch {
        max_len,
        shortest_identity: state.best_id,
        shortest_neg_identity: state.best_neg,
        words_checked: state.words_checked,
    }
}

struct SearchState {
    max_len: usize,
    best_id: Option<ReducedWord>,
    best_neg: Option<ReducedWord>,
    words_checked: u64,
    prefix: Vec<Letter>,
}

impl SearchState {
    fn interesting_depth(&self) -> usize {
        let id_limit = self
            .best_id
            .as_ref()
            .map_or(self.max_len, |w| w.len().saturating_sub(1));
        let neg_limit = self
            .best_neg
            .as_ref()
            .map_or(self.max_len, |w| w.len().saturating_sub(1));
        id_limit.max(neg_limit)
    }
}

fn visit<S: Scalar>(state: &mut SearchState, gens: &[&Mat2K<S>; 4], current: Mat2K<S>) {
    state.words_checked += 1;
    let len = state.prefix.len();
    if current.is_identity() {
        if state.best_id.as_ref().map_or(true, |w| len < w.len()) {
            state.best_id = Some(ReducedWord::new(state.prefix.clone()).expect("reduced"));
        }
    } else if current.is_neg_identity() {
        if state.best_neg.as_ref().map_or(true, |w| len < w.len()) {
            state.best_neg = Some(ReducedWord::new(state.prefix.clone()).expect("reduced"));
        }
    }
    if len >= state.interesting_depth() {
        return;
    }
    let banned = state.prefix.last().unwrap().inverse();
    for next in LETTERS {
        if next == banned {
            continue;
        }
        let m = current.mul(gens[next.index()]).expect("same field");
        state.prefix.push(next);
        visit(state, gens, m);
        state.prefix.pop();
    }
}
