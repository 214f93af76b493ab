//! Associates: the first components of function-space tokens. An associate
//! of a pair family collects, level by level, one consistency witness for
//! each maximal subfamily, relative to a fixed system of representatives of
//! the witness pools. The representative function here is canonical: the
//! least token of each equivalence class, with the two forced cases (the
//! unit token for the empty family, the pair's own witness for singletons).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::system::{ConsPair, InfoSystem};
use crate::token::{Token, TokenSet};
use crate::witness::{
    canon_cpts, cl, family_pairs, is_v_maximal, union_of_sets, wit_set, Cpt,
};

/// A function-space token: an associate paired with the family it
/// witnesses.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ExpToken {
    pub w: Vec<Cpt>,
    pub v: Vec<Cpt>,
}

impl ExpToken {
    pub fn new(w: Vec<Cpt>, v: Vec<Cpt>) -> ExpToken {
        ExpToken {
            w: canon_cpts(w),
            v: canon_cpts(v),
        }
    }
}

/// The canonical representative set of the witness pool of `pairs`,
/// relative to equivalence over the union of their sets: least token of
/// each class, with the forced empty and singleton cases.
pub fn reps(sys: &InfoSystem, pairs: &[ConsPair]) -> TokenSet {
    if pairs.is_empty() {
        return TokenSet::singleton(sys.delta().clone());
    }
    if pairs.len() == 1 {
        return TokenSet::singleton(pairs[0].witness.clone());
    }
    let pool = wit_set(sys, pairs);
    let t = union_of_sets(pairs);
    let mut reps: Vec<Token> = Vec::new();
    for a in &pool {
        if !reps.iter().any(|r| sys.witness_equiv(r, a, &t)) {
            reps.push(a.clone());
        }
    }
    // Tokens are visited in ascending order, so each class keeps its least
    // member.
    reps.into_iter().collect()
}

/// Internal: one required entry of an associate under construction.
#[derive(Clone, Debug)]
struct Slot {
    level: usize,
    witness: Token,
    set: TokenSet,
    /// Right-hand tokens of the family activated at this slot.
    base: TokenSet,
}

/// The construction plan for a family: every (subfamily, representative)
/// pair that demands an entry, grouped by level.
struct Plan {
    slots: Vec<Slot>,
    /// Entry forced at level zero, when the empty subfamily is maximal for
    /// the unit token.
    zero: bool,
}

fn make_plan(src: &InfoSystem, tgt: &InfoSystem, v: &[Cpt]) -> Plan {
    let n = v.len();
    assert!(n <= 16, "family size beyond the construction budget");
    let zero = is_v_maximal(src, src.delta(), &[], v)
        && src.is_con_parts(src.delta(), &TokenSet::empty());
    let _ = tgt;
    let mut slots = Vec::new();
    let mut rep_cache: BTreeMap<Vec<ConsPair>, TokenSet> = BTreeMap::new();
    for mask in 1u32..1 << n {
        let sel: Vec<Cpt> = (0..n)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| v[k].clone())
            .collect();
        let pairs = family_pairs(&sel);
        let t = union_of_sets(&pairs);
        let r = rep_cache
            .entry(pairs.clone())
            .or_insert_with(|| reps(src, &pairs))
            .clone();
        for e in &r {
            if is_v_maximal(src, e, &sel, v) {
                let base: TokenSet = v
                    .iter()
                    .filter(|c| {
                        c.pair.set.is_subset(&t)
                            && src.witness_equiv(e, &c.pair.witness, &c.pair.set)
                    })
                    .map(|c| c.tok.clone())
                    .collect();
                slots.push(Slot {
                    level: sel.len(),
                    witness: e.clone(),
                    set: t.clone(),
                    base,
                });
            }
        }
    }
    slots.sort_by(|a, b| {
        (a.level, &a.witness, &a.set).cmp(&(b.level, &b.witness, &b.set))
    });
    // Distinct slots never share a first component; the subfamily is
    // determined by it.
    for win in slots.windows(2) {
        assert!(
            (&win[0].witness, &win[0].set) != (&win[1].witness, &win[1].set),
            "two maximal subfamilies produced the same entry head"
        );
    }
    Plan { slots, zero }
}

/// The consistency set a slot's witness token must cover: the activated
/// right-hand tokens plus every token chosen at an earlier level whose
/// entry head sits inside this slot's set and is equivalent to its witness.
fn slot_requirement(
    src: &InfoSystem,
    slot: &Slot,
    acc: &BTreeMap<(Token, TokenSet), Token>,
) -> TokenSet {
    let mut s = slot.base.clone();
    for ((a, t), tok) in acc {
        if t.is_subset(&slot.set) && src.witness_equiv(a, &slot.witness, t) {
            s = s.insert(tok.clone());
        }
    }
    s
}

/// Decides membership in the canonical associate set of `v`.
pub fn is_associate(src: &InfoSystem, tgt: &InfoSystem, w: &[Cpt], v: &[Cpt]) -> bool {
    let w = canon_cpts(w.to_vec());
    let v = canon_cpts(v.to_vec());
    let plan = make_plan(src, tgt, &v);
    let mut acc: BTreeMap<(Token, TokenSet), Token> = BTreeMap::new();
    if plan.zero {
        let key = (src.delta().clone(), TokenSet::empty());
        let entry = Cpt::new(
            ConsPair::new(key.0.clone(), key.1.clone()),
            tgt.delta().clone(),
        );
        if !w.contains(&entry) {
            return false;
        }
        acc.insert(key, tgt.delta().clone());
    }
    let mut level = 1;
    let mut pending: Vec<&Slot> = plan.slots.iter().collect();
    while !pending.is_empty() {
        let (now, later): (Vec<&Slot>, Vec<&Slot>) =
            pending.into_iter().partition(|s| s.level == level);
        let mut new_entries = Vec::new();
        for slot in now {
            let need = slot_requirement(src, slot, &acc);
            let matches: Vec<&Cpt> = w
                .iter()
                .filter(|c| c.pair.witness == slot.witness && c.pair.set == slot.set)
                .collect();
            if matches.len() != 1 {
                return false;
            }
            let j = &matches[0].tok;
            if !tgt.is_con_parts(j, &need) {
                return false;
            }
            new_entries.push(((slot.witness.clone(), slot.set.clone()), j.clone()));
        }
        acc.extend(new_entries);
        pending = later;
        level += 1;
    }
    // No entries beyond the required ones.
    w.len() == acc.len()
        && w.iter().all(|c| {
            acc.get(&(c.pair.witness.clone(), c.pair.set.clone())) == Some(&c.tok)
        })
}

/// All canonical associates of `v`, produced by level-wise backtracking
/// over the admissible witness token at each slot.
pub fn enumerate_associates(
    src: &InfoSystem,
    tgt: &InfoSystem,
    v: &[Cpt],
    max_branches: usize,
) -> Result<Vec<Vec<Cpt>>> {
    let v = canon_cpts(v.to_vec());
    let plan = make_plan(src, tgt, &v);
    let mut partial: Vec<BTreeMap<(Token, TokenSet), Token>> = vec![BTreeMap::new()];
    if plan.zero {
        partial[0].insert(
            (src.delta().clone(), TokenSet::empty()),
            tgt.delta().clone(),
        );
    }
    let max_level = plan.slots.iter().map(|s| s.level).max().unwrap_or(0);
    for level in 1..=max_level {
        let slots: Vec<&Slot> = plan.slots.iter().filter(|s| s.level == level).collect();
        if slots.is_empty() {
            continue;
        }
        let mut next = Vec::new();
        for acc in &partial {
            // Choices at one level are independent of each other: each
            // slot's requirement only reads earlier levels.
            let mut branches: Vec<BTreeMap<(Token, TokenSet), Token>> = vec![acc.clone()];
            for slot in &slots {
                let need = slot_requirement(src, slot, acc);
                let admissible: Vec<&Token> = tgt
                    .tokens()
                    .iter()
                    .filter(|j| tgt.is_con_parts(j, &need))
                    .collect();
                let mut grown = Vec::new();
                for b in &branches {
                    for j in &admissible {
                        let mut b2 = b.clone();
                        b2.insert((slot.witness.clone(), slot.set.clone()), (*j).clone());
                        grown.push(b2);
                    }
                }
                branches = grown;
                if branches.is_empty() {
                    break;
                }
            }
            next.extend(branches);
            if next.len() > max_branches {
                return Err(Error::BudgetExceeded(format!(
                    "associate enumeration past {max_branches} branches"
                )));
            }
        }
        partial = next;
    }
    let out: Vec<Vec<Cpt>> = partial
        .into_iter()
        .map(|acc| {
            canon_cpts(
                acc.into_iter()
                    .map(|((a, t), j)| Cpt::new(ConsPair::new(a, t), j))
                    .collect(),
            )
        })
        .collect();
    for w in &out {
        debug_assert!(is_associate(src, tgt, w, &v));
    }
    Ok(out)
}

/// The two-entry associate of a one-pair family: the family maps one pair
/// to each token of `z`; the associate records a covering witness `b`,
/// preceded by the unit entry when the pair's set is non-empty.
pub fn singleton_associate(
    src: &InfoSystem,
    tgt: &InfoSystem,
    p: &ConsPair,
    z: &TokenSet,
    b: &Token,
) -> Result<ExpToken> {
    if !src.is_con(p) {
        return Err(Error::NotConsistent {
            witness: p.witness.clone(),
            set: p.set.clone(),
        });
    }
    let need = if p.set.is_empty() {
        z.clone()
    } else {
        z.insert(tgt.delta().clone())
    };
    if !tgt.is_con_parts(b, &need) {
        return Err(Error::WitnessInvalid(format!(
            "{need} is not consistent for {b}"
        )));
    }
    let v: Vec<Cpt> = z.iter().map(|d| Cpt::new(p.clone(), d.clone())).collect();
    let mut w = vec![Cpt::new(p.clone(), b.clone())];
    if !p.set.is_empty() {
        w.push(Cpt::new(
            ConsPair::new(src.delta().clone(), TokenSet::empty()),
            tgt.delta().clone(),
        ));
    }
    let tok = ExpToken::new(w, v);
    if !is_associate(src, tgt, &tok.w, &tok.v) {
        return Err(Error::WitnessInvalid(
            "construction is not an associate of its family".into(),
        ));
    }
    Ok(tok)
}

/// The unit function-space token.
pub fn delta_exp(src: &InfoSystem, tgt: &InfoSystem) -> ExpToken {
    ExpToken::new(
        vec![Cpt::new(
            ConsPair::new(src.delta().clone(), TokenSet::empty()),
            tgt.delta().clone(),
        )],
        vec![],
    )
}

/// Result of resolving an anchor against an associate: the unique entry
/// covering the anchored closure of the family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssocLookup {
    /// Entry witness (equivalent to the anchor's witness over `t`).
    pub e: Token,
    /// Union of the sets of the closure members.
    pub t: TokenSet,
    /// The consistency witness the entry records.
    pub j: Token,
    /// The closure members themselves.
    pub m: Vec<ConsPair>,
}

/// Finds the unique entry of `tok.w` matching the closure of `tok.v` under
/// `anchor`. Zero or several matches indicate a non-associate or a bug.
pub fn associate_lookup(
    src: &InfoSystem,
    tgt: &InfoSystem,
    tok: &ExpToken,
    anchor: &ConsPair,
) -> Result<AssocLookup> {
    let m = cl(src, anchor, &family_pairs(&tok.v));
    let t = union_of_sets(&m);
    let pool = wit_set(src, &m);
    let rs: TokenSet = tok
        .v
        .iter()
        .filter(|c| m.contains(&c.pair))
        .map(|c| c.tok.clone())
        .collect();
    let hits: Vec<&Cpt> = tok
        .w
        .iter()
        .filter(|c| {
            c.pair.set == t
                && pool.contains(&c.pair.witness)
                && src.witness_equiv(&anchor.witness, &c.pair.witness, &t)
                && tgt.is_con_parts(&c.tok, &rs)
        })
        .collect();
    if hits.len() != 1 {
        return Err(Error::LookupNotUnique {
            witness: anchor.witness.clone(),
            set: anchor.set.clone(),
            found: hits.len(),
        });
    }
    Ok(AssocLookup {
        e: hits[0].pair.witness.clone(),
        t,
        j: hits[0].tok.clone(),
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{flat2, term};
    use crate::token::{toks, TokenSet};

    fn cp(sys: &InfoSystem, w: &str, set: &[&str]) -> ConsPair {
        let p = ConsPair::new(Token::new(w), toks(set));
        assert!(sys.is_con(&p), "{p} must be consistent");
        p
    }

    #[test]
    fn empty_family_has_exactly_the_unit_associate() {
        let t = term();
        let assoc = enumerate_associates(&t, &t, &[], 100).unwrap();
        assert_eq!(assoc.len(), 1);
        assert_eq!(
            assoc[0],
            vec![Cpt::new(
                ConsPair::new(Token::new("d"), TokenSet::empty()),
                Token::new("d")
            )]
        );
        assert!(is_associate(&t, &t, &assoc[0], &[]));
        let d = delta_exp(&t, &t);
        assert!(is_associate(&t, &t, &d.w, &d.v));
    }

    #[test]
    fn enumerate_matches_powerset_filter_on_terminal_pair() {
        let t = term();
        let cpts: Vec<Cpt> = t
            .pairs()
            .iter()
            .map(|p| Cpt::new(p.clone(), Token::new("d")))
            .collect();
        // Every family over Con x A' of the terminal pair.
        for mask in 0u32..1 << cpts.len() {
            let v: Vec<Cpt> = (0..cpts.len())
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| cpts[k].clone())
                .collect();
            let listed = enumerate_associates(&t, &t, &v, 1000).unwrap();
            // Oracle: filter all subsets of Con x A' through the decision
            // procedure.
            let mut expect = Vec::new();
            for wmask in 0u32..1 << cpts.len() {
                let w: Vec<Cpt> = (0..cpts.len())
                    .filter(|k| wmask >> k & 1 == 1)
                    .map(|k| cpts[k].clone())
                    .collect();
                if is_associate(&t, &t, &w, &v) {
                    expect.push(canon_cpts(w));
                }
            }
            let mut got = listed.clone();
            got.sort();
            expect.sort();
            expect.dedup();
            assert_eq!(got, expect, "family {v:?}");
            assert!(!listed.is_empty(), "terminal-pair families all have associates");
        }
    }

    #[test]
    fn singleton_associate_flat2_example() {
        let f = flat2();
        let p = cp(&f, "a", &["a"]);
        let tok = singleton_associate(&f, &f, &p, &toks(&["a"]), &Token::new("a")).unwrap();
        // The associate records the unit entry plus the covering witness.
        assert_eq!(tok.w.len(), 2);
        assert!(tok.w.contains(&Cpt::new(
            ConsPair::new(Token::new("bot"), TokenSet::empty()),
            Token::new("bot")
        )));
        assert!(tok.w.contains(&Cpt::new(p.clone(), Token::new("a"))));
        assert!(is_associate(&f, &f, &tok.w, &tok.v));
    }

    #[test]
    fn singleton_associate_degenerate_and_invalid_inputs() {
        let t = term();
        let p = ConsPair::new(Token::new("d"), TokenSet::empty());
        let tok = singleton_associate(&t, &t, &p, &TokenSet::empty(), &Token::new("d")).unwrap();
        assert_eq!(tok.w.len(), 1);
        assert!(tok.v.is_empty());
        let f = flat2();
        // b cannot witness {a} in the flat system.
        let q = cp(&f, "a", &["a"]);
        assert!(singleton_associate(&f, &f, &q, &toks(&["a"]), &Token::new("b")).is_err());
    }

    #[test]
    fn singleton_associates_match_enumeration() {
        let f = flat2();
        for p in f.pairs() {
            for z in f.tokens().clone().subsets() {
                let v: Vec<Cpt> = z.iter().map(|d| Cpt::new(p.clone(), d.clone())).collect();
                let all = enumerate_associates(&f, &f, &v, 10_000).unwrap();
                for b in f.tokens() {
                    if let Ok(tok) = singleton_associate(&f, &f, p, &z, b) {
                        assert!(all.contains(&tok.w), "{tok:?} missing from enumeration");
                    }
                }
            }
        }
    }

    #[test]
    fn lookup_on_unit_token() {
        let t = term();
        let d = delta_exp(&t, &t);
        let anchor = ConsPair::new(Token::new("d"), TokenSet::empty());
        let got = associate_lookup(&t, &t, &d, &anchor).unwrap();
        assert_eq!(got.e, Token::new("d"));
        assert_eq!(got.j, Token::new("d"));
        assert!(got.t.is_empty());
        assert!(got.m.is_empty());
    }

    #[test]
    fn lookup_fails_on_a_non_associate() {
        let f = flat2();
        let p = cp(&f, "a", &["a"]);
        // A family with no matching entry in w.
        let tok = ExpToken::new(vec![], vec![Cpt::new(p, Token::new("a"))]);
        let anchor = ConsPair::new(Token::new("a"), toks(&["a"]));
        assert!(matches!(
            associate_lookup(&f, &f, &tok, &anchor),
            Err(Error::LookupNotUnique { found: 0, .. })
        ));
    }

    #[test]
    fn lookup_exists_for_every_anchor_on_flat2_families() {
        let f = flat2();
        let p1 = cp(&f, "a", &["a"]);
        let p2 = cp(&f, "b", &["b", "bot"]);
        let v = vec![
            Cpt::new(p1, Token::new("a")),
            Cpt::new(p2, Token::new("b")),
        ];
        for w in enumerate_associates(&f, &f, &v, 10_000).unwrap() {
            let tok = ExpToken::new(w, v.clone());
            for anchor in f.pairs() {
                let got = associate_lookup(&f, &f, &tok, anchor);
                assert!(got.is_ok(), "anchor {anchor} on {tok:?}: {got:?}");
                let got = got.unwrap();
                assert!(f.witness_equiv(&anchor.witness, &got.e, &got.t));
            }
        }
    }
}
