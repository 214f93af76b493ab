//! Finite information systems with witnesses.
//!
//! A system is a tuple (A, Con, ⊢, Δ): a token universe, a consistency
//! predicate pairing a witness token with each finite consistent set, an
//! entailment relation from witnessed pairs to tokens, and a distinguished
//! always-true token Δ. Construction checks well-formedness only; the
//! axioms are decided separately (see `axioms`).

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::token::{Token, TokenSet};

/// A witnessed consistent pair (i, X): the set X is consistent as seen by
/// the witness token i.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConsPair {
    pub witness: Token,
    pub set: TokenSet,
}

impl ConsPair {
    pub fn new(witness: Token, set: TokenSet) -> ConsPair {
        ConsPair { witness, set }
    }
}

impl fmt::Debug for ConsPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{})", self.witness, self.set)
    }
}

impl fmt::Display for ConsPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Finite information system with witnesses, stored extensionally: `con`
/// enumerates every witnessed pair and `entail` is a total map on it.
pub struct InfoSystem {
    name: String,
    tokens: TokenSet,
    delta: Token,
    pairs: Vec<ConsPair>,
    entail: Vec<TokenSet>,
    pair_index: HashMap<ConsPair, usize>,
    by_witness: HashMap<Token, Vec<usize>>,
    /// For each set X appearing as a query, the partition of
    /// `{a : X ∈ Con(a)}` into chain-connected components.
    equiv_cache: Mutex<HashMap<TokenSet, HashMap<Token, u32>>>,
}

impl PartialEq for InfoSystem {
    fn eq(&self, other: &InfoSystem) -> bool {
        self.tokens == other.tokens
            && self.delta == other.delta
            && self.pairs == other.pairs
            && self.entail == other.entail
    }
}

impl Eq for InfoSystem {}

impl Clone for InfoSystem {
    fn clone(&self) -> InfoSystem {
        InfoSystem {
            name: self.name.clone(),
            tokens: self.tokens.clone(),
            delta: self.delta.clone(),
            pairs: self.pairs.clone(),
            entail: self.entail.clone(),
            pair_index: self.pair_index.clone(),
            by_witness: self.by_witness.clone(),
            equiv_cache: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for InfoSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "InfoSystem({}, |A|={}, |Con|={})",
            self.name,
            self.tokens.len(),
            self.pairs.len()
        )
    }
}

/// Builds a system after checking well-formedness: delta and all pair
/// components lie in the universe, and every entailment entry is keyed by a
/// member of `con`. Pairs without an entailment entry get the empty set, so
/// ⊢'s domain is exactly `con`. Axioms are not required here.
pub fn build_system(
    name: &str,
    tokens: TokenSet,
    delta: Token,
    con: Vec<ConsPair>,
    entail: Vec<(ConsPair, TokenSet)>,
) -> Result<InfoSystem> {
    if !tokens.contains(&delta) {
        return Err(Error::UnknownToken(delta));
    }
    let mut pairs = con;
    pairs.sort();
    pairs.dedup();
    for p in &pairs {
        if !tokens.contains(&p.witness) {
            return Err(Error::UnknownToken(p.witness.clone()));
        }
        if let Some(t) = p.set.iter().find(|t| !tokens.contains(t)) {
            return Err(Error::UnknownToken(t.clone()));
        }
    }
    let mut pair_index = HashMap::new();
    for (k, p) in pairs.iter().enumerate() {
        pair_index.insert(p.clone(), k);
    }
    let mut entail_vec = vec![TokenSet::empty(); pairs.len()];
    for (p, ts) in entail {
        let Some(&k) = pair_index.get(&p) else {
            return Err(Error::DanglingEntail {
                witness: p.witness,
                set: p.set,
            });
        };
        if let Some(t) = ts.iter().find(|t| !tokens.contains(t)) {
            return Err(Error::UnknownToken(t.clone()));
        }
        entail_vec[k] = entail_vec[k].union(&ts);
    }
    let mut by_witness: HashMap<Token, Vec<usize>> = HashMap::new();
    for (k, p) in pairs.iter().enumerate() {
        by_witness.entry(p.witness.clone()).or_default().push(k);
    }
    Ok(InfoSystem {
        name: name.to_string(),
        tokens,
        delta,
        pairs,
        entail: entail_vec,
        pair_index,
        by_witness,
        equiv_cache: Mutex::new(HashMap::new()),
    })
}

impl InfoSystem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tokens(&self) -> &TokenSet {
        &self.tokens
    }

    pub fn delta(&self) -> &Token {
        &self.delta
    }

    pub fn pairs(&self) -> &[ConsPair] {
        &self.pairs
    }

    pub fn pair(&self, idx: usize) -> &ConsPair {
        &self.pairs[idx]
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair_idx(&self, p: &ConsPair) -> Option<usize> {
        self.pair_index.get(p).copied()
    }

    pub fn is_con(&self, p: &ConsPair) -> bool {
        self.pair_index.contains_key(p)
    }

    pub fn is_con_parts(&self, witness: &Token, set: &TokenSet) -> bool {
        self.is_con(&ConsPair::new(witness.clone(), set.clone()))
    }

    /// Indices of all pairs whose witness is `w`.
    pub fn pairs_of_witness(&self, w: &Token) -> &[usize] {
        self.by_witness.get(w).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Entailed set by pair index.
    pub fn entailed_idx(&self, idx: usize) -> &TokenSet {
        &self.entail[idx]
    }

    /// The set [X]_i = {a : (i,X) ⊢ a}. Errors on pairs outside Con.
    pub fn entailed_set(&self, p: &ConsPair) -> Result<TokenSet> {
        match self.pair_idx(p) {
            Some(k) => Ok(self.entail[k].clone()),
            None => Err(Error::NotConsistent {
                witness: p.witness.clone(),
                set: p.set.clone(),
            }),
        }
    }

    /// (i,X) ⊢ a, false when (i,X) ∉ Con.
    pub fn entails(&self, p: &ConsPair, a: &Token) -> bool {
        self.pair_idx(p).is_some_and(|k| self.entail[k].contains(a))
    }

    /// (i,X) ⊢ Y: every member of Y is entailed.
    pub fn entails_set(&self, p: &ConsPair, ys: &TokenSet) -> bool {
        self.pair_idx(p)
            .is_some_and(|k| ys.is_subset(&self.entail[k]))
    }

    /// (i,X) ⊢ (j,Y): the witness and every member of Y are entailed.
    pub fn entails_pair(&self, p: &ConsPair, q: &ConsPair) -> bool {
        self.entails(p, &q.witness) && self.entails_set(p, &q.set)
    }

    /// {i} ∈ Con(j).
    pub fn singleton_con(&self, i: &Token, j: &Token) -> bool {
        self.is_con_parts(j, &TokenSet::singleton(i.clone()))
    }

    /// Pairs (j,V) with (j,V) ⊢ (j,V).
    pub fn reflexive_pairs(&self) -> Vec<ConsPair> {
        self.pairs
            .iter()
            .filter(|p| self.entails_pair(p, p))
            .cloned()
            .collect()
    }

    /// Chain equivalence of witnesses i and j relative to the set X: equal
    /// tokens are always equivalent; otherwise both must see X as consistent
    /// and be linked by a chain a_0..a_n inside `{a : X ∈ Con(a)}` where
    /// adjacent links share a witness k with {a_{v-1}}, {a_v} ∈ Con(k).
    pub fn witness_equiv(&self, i: &Token, j: &Token, x: &TokenSet) -> bool {
        if i == j {
            return true;
        }
        let mut cache = self.equiv_cache.lock().unwrap();
        let comp = cache
            .entry(x.clone())
            .or_insert_with(|| self.equiv_components(x));
        match (comp.get(i), comp.get(j)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    fn equiv_components(&self, x: &TokenSet) -> HashMap<Token, u32> {
        let nodes: Vec<Token> = self
            .tokens
            .iter()
            .filter(|t| self.is_con_parts(t, x))
            .cloned()
            .collect();
        // Union-find over the node list.
        let mut parent: Vec<usize> = (0..nodes.len()).collect();
        fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
            while parent[a] != a {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            a
        }
        for a in 0..nodes.len() {
            for b in a + 1..nodes.len() {
                let linked = self.tokens.iter().any(|k| {
                    self.singleton_con(&nodes[a], k) && self.singleton_con(&nodes[b], k)
                });
                if linked {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        let mut out = HashMap::new();
        for a in 0..nodes.len() {
            let r = find(&mut parent, a) as u32;
            out.insert(nodes[a].clone(), r);
        }
        out
    }

    /// All distinct sets X occurring in Con (used by sweeps that quantify
    /// over "X with (i,X),(j,X) ∈ Con").
    pub fn con_sets(&self) -> Vec<TokenSet> {
        let mut v: Vec<TokenSet> = self.pairs.iter().map(|p| p.set.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Serialization-order view of (pair, entailed set).
    pub fn entail_rows(&self) -> impl Iterator<Item = (&ConsPair, &TokenSet)> {
        self.pairs.iter().zip(self.entail.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::toks;

    fn delta_pair() -> ConsPair {
        ConsPair::new(Token::new("d"), TokenSet::empty())
    }

    #[test]
    fn build_rejects_dangling_entail() {
        let err = build_system(
            "bad",
            toks(&["a", "b", "d"]),
            Token::new("d"),
            vec![delta_pair()],
            vec![(
                ConsPair::new(Token::new("a"), toks(&["b"])),
                toks(&["d"]),
            )],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DanglingEntail { .. }));
    }

    #[test]
    fn build_rejects_unknown_token() {
        let err = build_system(
            "bad",
            toks(&["d"]),
            Token::new("d"),
            vec![ConsPair::new(Token::new("z"), TokenSet::empty())],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err, Error::UnknownToken(Token::new("z")));
    }

    #[test]
    fn vacuous_system_builds() {
        let sys = build_system("empty", toks(&["d"]), Token::new("d"), vec![], vec![]).unwrap();
        assert_eq!(sys.pair_count(), 0);
        assert!(!sys.is_con(&delta_pair()));
    }

    #[test]
    fn entailed_set_errors_outside_con() {
        let sys = build_system(
            "one",
            toks(&["d"]),
            Token::new("d"),
            vec![delta_pair()],
            vec![(delta_pair(), toks(&["d"]))],
        )
        .unwrap();
        assert_eq!(sys.entailed_set(&delta_pair()).unwrap(), toks(&["d"]));
        let missing = ConsPair::new(Token::new("d"), toks(&["d"]));
        assert!(matches!(
            sys.entailed_set(&missing),
            Err(Error::NotConsistent { .. })
        ));
    }
}
