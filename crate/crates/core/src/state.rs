//! States of an information system and the poset they form: enumeration,
//! the approximation relation, witness-dependent local joins, and the
//! local-lub domain check.

use std::fmt;

use crate::error::{Error, Result};
use crate::system::{ConsPair, InfoSystem};
use crate::token::{Token, TokenSet};

/// An entailment-closed, finitely consistent, derivable token set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(pub TokenSet);

impl State {
    pub fn members(&self) -> &TokenSet {
        &self.0
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Outcome of the three defining conditions plus their combined form.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct StateVerdict {
    pub finitely_consistent: bool,
    pub entail_closed: bool,
    pub derivable: bool,
    pub combined: bool,
}

impl StateVerdict {
    pub fn is_state(&self) -> bool {
        self.finitely_consistent && self.entail_closed && self.derivable
    }
}

/// Literal evaluation of the three conditions and of the combined form
/// (one witnessed consistent subset entailing each finite part). Asserts
/// the equivalence of the combined form with conditions one and three.
pub fn is_state(sys: &InfoSystem, x: &TokenSet) -> StateVerdict {
    let finitely_consistent = x
        .subsets()
        .all(|f| x.iter().any(|i| sys.is_con_parts(i, &f)));
    let entail_closed = sys.pairs().iter().enumerate().all(|(k, p)| {
        !(x.contains(&p.witness) && p.set.is_subset(x)) || sys.entailed_idx(k).is_subset(x)
    });
    let derivable = x.iter().all(|a| {
        sys.pairs()
            .iter()
            .enumerate()
            .any(|(k, p)| {
                x.contains(&p.witness) && p.set.is_subset(x) && sys.entailed_idx(k).contains(a)
            })
    });
    let combined = x.subsets().all(|f| {
        sys.pairs().iter().enumerate().any(|(k, p)| {
            x.contains(&p.witness) && p.set.is_subset(x) && f.is_subset(sys.entailed_idx(k))
        })
    });
    let v = StateVerdict {
        finitely_consistent,
        entail_closed,
        derivable,
        combined,
    };
    assert_eq!(
        v.combined,
        v.finitely_consistent && v.derivable,
        "combined state condition must agree with conditions one and three"
    );
    v
}

/// Fast state test used by enumeration sweeps. Valid on systems that pass
/// the axioms: one witnessed pair covering the whole of x stands in for the
/// quantification over its finite subsets.
fn is_state_fast(sys: &InfoSystem, x: &TokenSet) -> bool {
    let combined = sys.pairs().iter().enumerate().any(|(k, p)| {
        x.contains(&p.witness) && p.set.is_subset(x) && x.is_subset(sys.entailed_idx(k))
    });
    if !combined {
        return false;
    }
    sys.pairs().iter().enumerate().all(|(k, p)| {
        !(x.contains(&p.witness) && p.set.is_subset(x)) || sys.entailed_idx(k).is_subset(x)
    })
}

/// The states of a system under inclusion, with the bottom state attached.
pub struct StatePoset {
    states: Vec<State>,
    le: Vec<Vec<bool>>,
    bottom: usize,
}

impl fmt::Debug for StatePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StatePoset({} states)", self.states.len())
    }
}

impl StatePoset {
    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn bottom(&self) -> &State {
        &self.states[self.bottom]
    }

    pub fn index(&self, x: &State) -> Option<usize> {
        self.states.iter().position(|s| s == x)
    }

    pub fn le_idx(&self, a: usize, b: usize) -> bool {
        self.le[a][b]
    }

    pub fn le(&self, a: &State, b: &State) -> bool {
        a.0.is_subset(&b.0)
    }

    /// View as a finite poset over synthesized element names s0, s1, ...
    /// (canonical state order), for order-isomorphism comparisons.
    pub fn as_poset(&self) -> crate::poset::FinitePoset {
        let elems: TokenSet = (0..self.len())
            .map(|i| Token::new(&format!("s{i}")))
            .collect();
        let mut pairs = Vec::new();
        for a in 0..self.len() {
            for b in 0..self.len() {
                if self.le[a][b] {
                    pairs.push((
                        Token::new(&format!("s{a}")),
                        Token::new(&format!("s{b}")),
                    ));
                }
            }
        }
        crate::poset::FinitePoset::new(elems, &pairs).expect("state inclusion is a poset")
    }
}

/// Enumerates all states by subset sweep. Errors when the universe exceeds
/// the enumeration budget.
pub fn enumerate_states(sys: &InfoSystem, max_tokens: usize) -> Result<StatePoset> {
    let n = sys.tokens().len();
    if n > max_tokens {
        return Err(Error::BudgetExceeded(format!(
            "state enumeration over {n} tokens (budget {max_tokens})"
        )));
    }
    let mut states: Vec<State> = sys
        .tokens()
        .clone()
        .subsets()
        .filter(|x| is_state_fast(sys, x))
        .map(State)
        .collect();
    states.sort();
    let bottom_set = sys
        .entailed_set(&ConsPair::new(sys.delta().clone(), TokenSet::empty()))
        .map_err(|_| Error::PreconditionViolated("system lacks the bottom pair".into()))?;
    let bottom = states
        .iter()
        .position(|s| s.0 == bottom_set)
        .ok_or_else(|| Error::PreconditionViolated("bottom entailment is not a state".into()))?;
    let le = states
        .iter()
        .map(|a| states.iter().map(|b| a.0.is_subset(&b.0)).collect())
        .collect();
    let sp = StatePoset { states, le, bottom };
    for s in sp.states() {
        assert!(
            sp.bottom().0.is_subset(&s.0),
            "bottom state must sit below every state"
        );
    }
    Ok(sp)
}

/// The principal state [X]_i of a witnessed pair.
pub fn principal_state(sys: &InfoSystem, p: &ConsPair) -> Result<State> {
    let set = sys.entailed_set(p)?;
    let v = is_state(sys, &set);
    assert!(v.is_state(), "entailed set of {p} must be a state");
    Ok(State(set))
}

/// x approximates y, characterised through entailment: some witnessed pair
/// inside y entails all of x. Asserted equal to inclusion (the two coincide
/// on finite state posets) and, on small posets, to the literal
/// directed-set definition.
pub fn way_below(sys: &InfoSystem, sp: &StatePoset, x: &State, y: &State) -> bool {
    let by_entailment = sys.pairs().iter().enumerate().any(|(k, p)| {
        y.0.contains(&p.witness) && p.set.is_subset(&y.0) && x.0.is_subset(sys.entailed_idx(k))
    });
    assert_eq!(
        by_entailment,
        x.0.is_subset(&y.0),
        "entailment characterisation of approximation must match inclusion"
    );
    if sp.len() <= 8 {
        let pos = sp.as_poset();
        let (i, j) = (sp.index(x).unwrap(), sp.index(y).unwrap());
        debug_assert_eq!(by_entailment, pos.way_below_literal(i, j));
    }
    by_entailment
}

/// Least upper bound of x and y inside the principal ideal of z, computed
/// by the union formula over witnessed pairs drawn from z. Asserts
/// minimality against a brute-force scan.
pub fn local_lub(
    sys: &InfoSystem,
    sp: &StatePoset,
    x: &State,
    y: &State,
    z: &State,
) -> Result<State> {
    if !x.0.is_subset(&z.0) || !y.0.is_subset(&z.0) {
        return Err(Error::NotBounded(format!("{x} or {y} not below {z}")));
    }
    let xy = x.0.union(&y.0);
    let mut out = TokenSet::empty();
    for (k, p) in sys.pairs().iter().enumerate() {
        if z.0.contains(&p.witness) && p.set.is_subset(&xy) {
            out = out.union(sys.entailed_idx(k));
        }
    }
    let lub = State(out);
    // Oracle: the minimum of all upper bounds of {x,y} below z.
    let bounds: Vec<&State> = sp
        .states()
        .iter()
        .filter(|s| x.0.is_subset(&s.0) && y.0.is_subset(&s.0) && s.0.is_subset(&z.0))
        .collect();
    assert!(bounds.contains(&&lub), "union formula must be a bound");
    for b in &bounds {
        assert!(
            lub.0.is_subset(&b.0),
            "union formula must be the least bound below {z}"
        );
    }
    Ok(lub)
}

/// Report of the local-lub domain check over a state poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdomainReport {
    pub pointed: bool,
    pub local_lubs: bool,
    pub basis: bool,
    /// Semantic bounded completeness of the poset (not the syntactic
    /// witness-independence condition; the two may differ in one direction).
    pub bounded_complete: bool,
}

impl LdomainReport {
    pub fn is_ldomain(&self) -> bool {
        self.pointed && self.local_lubs && self.basis
    }
}

/// Verifies pointedness, existence of least upper bounds below every upper
/// bound, and the basis property: every state is the directed union of the
/// principal states it contains.
pub fn check_ldomain(sys: &InfoSystem, sp: &StatePoset) -> LdomainReport {
    let pointed = sp.states().iter().all(|s| sp.bottom().0.is_subset(&s.0));
    let mut local_lubs = true;
    'outer: for z in sp.states() {
        for x in sp.states() {
            for y in sp.states() {
                if x.0.is_subset(&z.0) && y.0.is_subset(&z.0) {
                    let bounds: Vec<&State> = sp
                        .states()
                        .iter()
                        .filter(|s| {
                            x.0.is_subset(&s.0) && y.0.is_subset(&s.0) && s.0.is_subset(&z.0)
                        })
                        .collect();
                    if !bounds
                        .iter()
                        .any(|m| bounds.iter().all(|b| m.0.is_subset(&b.0)))
                    {
                        local_lubs = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    let mut basis = true;
    for z in sp.states() {
        let inside: Vec<usize> = sys
            .pairs()
            .iter()
            .enumerate()
            .filter(|(_, p)| z.0.contains(&p.witness) && p.set.is_subset(&z.0))
            .map(|(k, _)| k)
            .collect();
        let union = inside
            .iter()
            .fold(TokenSet::empty(), |acc, &k| acc.union(sys.entailed_idx(k)));
        if union != z.0 {
            basis = false;
            break;
        }
        // Directedness of the family of principal states inside z.
        for &a in &inside {
            for &b in &inside {
                let ea = sys.entailed_idx(a);
                let eb = sys.entailed_idx(b);
                if !inside.iter().any(|&c| {
                    ea.is_subset(sys.entailed_idx(c)) && eb.is_subset(sys.entailed_idx(c))
                }) {
                    basis = false;
                }
            }
        }
    }
    let bounded_complete = sp.as_poset().is_bounded_complete();
    LdomainReport {
        pointed,
        local_lubs,
        basis,
        bounded_complete,
    }
}

/// States x with x ≪ x. Asserts that the principal state of every
/// reflexive pair is among them.
pub fn compact_states(sys: &InfoSystem, sp: &StatePoset) -> Vec<State> {
    let out: Vec<State> = sp
        .states()
        .iter()
        .filter(|x| way_below(sys, sp, x, x))
        .cloned()
        .collect();
    for p in sys.reflexive_pairs() {
        let s = principal_state(sys, &p).expect("reflexive pair is consistent");
        assert!(out.contains(&s), "principal state of a reflexive pair is compact");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{bfly, bfly_poset, flat2, flat2_poset, term};
    use crate::poset::order_iso;
    use crate::token::{toks, TokenSet};

    #[test]
    fn term_has_one_state() {
        let t = term();
        assert!(is_state(&t, &toks(&["d"])).is_state());
        let empty = is_state(&t, &TokenSet::empty());
        assert!(!empty.is_state());
        assert!(!empty.finitely_consistent);
        let sp = enumerate_states(&t, 16).unwrap();
        assert_eq!(sp.len(), 1);
    }

    #[test]
    fn flat2_states_mirror_the_poset() {
        let f = flat2();
        assert!(!is_state(&f, &toks(&["a", "b", "bot"])).is_state());
        let sp = enumerate_states(&f, 16).unwrap();
        let sets: Vec<TokenSet> = sp.states().iter().map(|s| s.0.clone()).collect();
        assert_eq!(
            sets,
            vec![toks(&["a", "bot"]), toks(&["b", "bot"]), toks(&["bot"])]
        );
        assert!(order_iso(&sp.as_poset(), &flat2_poset()).is_some());
    }

    #[test]
    fn fast_state_test_agrees_with_literal_on_fixtures() {
        for sys in [term(), flat2(), bfly()] {
            for x in sys.tokens().clone().subsets() {
                assert_eq!(
                    is_state(&sys, &x).is_state(),
                    is_state_fast(&sys, &x),
                    "disagreement at {x} in {}",
                    sys.name()
                );
            }
        }
    }

    #[test]
    fn bfly_states_mirror_the_butterfly() {
        let b = bfly();
        let sp = enumerate_states(&b, 16).unwrap();
        assert_eq!(sp.len(), 5);
        assert!(order_iso(&sp.as_poset(), &bfly_poset()).is_some());
    }

    #[test]
    fn principal_states() {
        let b = bfly();
        let p = ConsPair::new(Token::new("p"), toks(&["x", "y"]));
        assert_eq!(
            principal_state(&b, &p).unwrap().0,
            toks(&["bot", "p", "x", "y"])
        );
        let f = flat2();
        let a0 = ConsPair::new(Token::new("a"), TokenSet::empty());
        assert_eq!(principal_state(&f, &a0).unwrap().0, toks(&["bot"]));
        assert!(principal_state(&f, &ConsPair::new(Token::new("a"), toks(&["b"]))).is_err());
    }

    #[test]
    fn way_below_properties_hold_on_fixtures() {
        for sys in [term(), flat2(), bfly()] {
            let sp = enumerate_states(&sys, 16).unwrap();
            for x in sp.states() {
                assert!(way_below(&sys, &sp, sp.bottom(), x));
                for y in sp.states() {
                    if way_below(&sys, &sp, x, y) {
                        assert!(x.0.is_subset(&y.0));
                    }
                    for z in sp.states() {
                        // Transitivity and upward closure on the right.
                        if way_below(&sys, &sp, x, y) && y.0.is_subset(&z.0) {
                            assert!(way_below(&sys, &sp, x, z));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn flat2_way_below_bottom_under_a() {
        let f = flat2();
        let sp = enumerate_states(&f, 16).unwrap();
        let bot = State(toks(&["bot"]));
        let a = State(toks(&["a", "bot"]));
        assert!(way_below(&f, &sp, &bot, &a));
    }

    #[test]
    fn bfly_local_lubs_depend_on_the_bound() {
        let b = bfly();
        let sp = enumerate_states(&b, 16).unwrap();
        let x = State(toks(&["bot", "x"]));
        let y = State(toks(&["bot", "y"]));
        let zp = State(toks(&["bot", "p", "x", "y"]));
        let zq = State(toks(&["bot", "q", "x", "y"]));
        let lp = local_lub(&b, &sp, &x, &y, &zp).unwrap();
        let lq = local_lub(&b, &sp, &x, &y, &zq).unwrap();
        assert_eq!(lp, zp);
        assert_eq!(lq, zq);
        assert_ne!(lp, lq);
        // Bottom is neutral.
        let got = local_lub(&b, &sp, &x, sp.bottom(), &zp).unwrap();
        assert_eq!(got, x);
        assert!(local_lub(&b, &sp, &zp, &zq, &zp).is_err());
    }

    #[test]
    fn ldomain_reports() {
        let cases = [
            (term(), true),
            (flat2(), true),
            (bfly(), false),
        ];
        for (sys, bc) in cases {
            let sp = enumerate_states(&sys, 16).unwrap();
            let rep = check_ldomain(&sys, &sp);
            assert!(rep.is_ldomain(), "{} must be a local-lub domain", sys.name());
            assert_eq!(rep.bounded_complete, bc, "{}", sys.name());
        }
    }

    #[test]
    fn all_states_compact_on_finite_fixtures() {
        for sys in [term(), flat2(), bfly()] {
            let sp = enumerate_states(&sys, 16).unwrap();
            assert_eq!(compact_states(&sys, &sp).len(), sp.len());
        }
    }
}
