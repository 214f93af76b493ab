//! Witness-equivalence machinery underlying the function-space tokens:
//! anchored closures of pair families, witness pools, maximal subfamilies,
//! spectra, and the activated-image operator.

use std::fmt;

use crate::system::{ConsPair, InfoSystem};
use crate::token::{Token, TokenSet};

/// One entry of a pair family: a witnessed consistent pair of the source
/// system together with a token of the target system.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cpt {
    pub pair: ConsPair,
    pub tok: Token,
}

impl Cpt {
    pub fn new(pair: ConsPair, tok: Token) -> Cpt {
        Cpt { pair, tok }
    }
}

impl fmt::Debug for Cpt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}↦{})", self.pair, self.tok)
    }
}

/// Canonical family form: sorted, deduplicated.
pub fn canon_cpts(mut v: Vec<Cpt>) -> Vec<Cpt> {
    v.sort();
    v.dedup();
    v
}

/// Distinct source pairs of a family.
pub fn family_pairs(v: &[Cpt]) -> Vec<ConsPair> {
    let mut out: Vec<ConsPair> = v.iter().map(|c| c.pair.clone()).collect();
    out.sort();
    out.dedup();
    out
}

/// Union of the sets held by a slice of pairs.
pub fn union_of_sets(pairs: &[ConsPair]) -> TokenSet {
    pairs
        .iter()
        .fold(TokenSet::empty(), |acc, p| acc.union(&p.set))
}

/// i ~ j [X] re-exported at the operation level.
pub fn witness_equiv(sys: &InfoSystem, i: &Token, j: &Token, x: &TokenSet) -> bool {
    sys.witness_equiv(i, j, x)
}

/// Members of `xs` whose pair is reachable from the anchor: some
/// equivalent witness j has both j and the set entailed by the anchor.
pub fn cl(sys: &InfoSystem, anchor: &ConsPair, xs: &[ConsPair]) -> Vec<ConsPair> {
    xs.iter()
        .filter(|p| {
            sys.tokens().iter().any(|j| {
                sys.witness_equiv(&p.witness, j, &p.set)
                    && sys.entails(anchor, j)
                    && sys.entails_set(anchor, &p.set)
            })
        })
        .cloned()
        .collect()
}

/// Union of {j} ∪ X over all entries of `xs` reachable through an
/// equivalent witness j entailed by the anchor.
pub fn ucl(sys: &InfoSystem, anchor: &ConsPair, xs: &[ConsPair]) -> TokenSet {
    let mut out = TokenSet::empty();
    for p in xs {
        for j in sys.tokens() {
            if sys.witness_equiv(j, &p.witness, &p.set)
                && sys.entails(anchor, j)
                && sys.entails_set(anchor, &p.set)
            {
                out = out.union(&p.set).insert(j.clone());
            }
        }
    }
    out
}

/// The witness pool of a pair family: tokens seeing the union of all sets
/// as consistent and equivalent to every member's witness over its set.
pub fn wit_set(sys: &InfoSystem, xs: &[ConsPair]) -> TokenSet {
    let union = union_of_sets(xs);
    sys.tokens()
        .iter()
        .filter(|a| {
            sys.is_con_parts(a, &union)
                && xs.iter().all(|p| sys.witness_equiv(a, &p.witness, &p.set))
        })
        .cloned()
        .collect()
}

/// (a, u) is maximal within v: a is in the witness pool of u's pairs, and
/// every entry of v whose set is covered by u's sets and whose witness is
/// equivalent to a already belongs to u.
pub fn is_v_maximal(sys: &InfoSystem, a: &Token, u: &[Cpt], v: &[Cpt]) -> bool {
    debug_assert!(u.iter().all(|c| v.contains(c)), "u must be a subfamily of v");
    if !wit_set(sys, &family_pairs(u)).contains(a) {
        return false;
    }
    let covered = union_of_sets(&family_pairs(u));
    v.iter().all(|entry| {
        !(entry.pair.set.is_subset(&covered)
            && sys.witness_equiv(a, &entry.pair.witness, &entry.pair.set))
            || u.contains(entry)
    })
}

/// The part of a family activated by an anchor without entailment: entries
/// whose witness is equivalent to the anchor's and whose set is contained
/// in the anchor's set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    pub sp: Vec<Cpt>,
    pub ds: Vec<ConsPair>,
    pub rs: TokenSet,
}

pub fn spectrum(sys: &InfoSystem, anchor: &ConsPair, v: &[Cpt]) -> Spectrum {
    let sp: Vec<Cpt> = v
        .iter()
        .filter(|c| {
            sys.witness_equiv(&anchor.witness, &c.pair.witness, &c.pair.set)
                && c.pair.set.is_subset(&anchor.set)
        })
        .cloned()
        .collect();
    let ds = family_pairs(&sp);
    let rs = sp.iter().map(|c| c.tok.clone()).collect();
    Spectrum { sp, ds, rs }
}

/// Target tokens produced by the entries of v reachable from the anchor.
pub fn ap(sys: &InfoSystem, anchor: &ConsPair, v: &[Cpt]) -> TokenSet {
    let reach = cl(sys, anchor, &family_pairs(v));
    v.iter()
        .filter(|c| reach.contains(&c.pair))
        .map(|c| c.tok.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{bfly, flat2, term};
    use crate::token::{toks, TokenSet};

    fn cp(w: &str, set: &[&str]) -> ConsPair {
        ConsPair::new(Token::new(w), toks(set))
    }

    #[test]
    fn every_token_is_equivalent_to_delta_over_the_empty_set() {
        for sys in [term(), flat2(), bfly()] {
            for i in sys.tokens() {
                assert!(sys.witness_equiv(i, sys.delta(), &TokenSet::empty()));
            }
        }
    }

    #[test]
    fn bfly_equivalences() {
        let b = bfly();
        assert!(b.witness_equiv(&Token::new("p"), &Token::new("q"), &toks(&["bot"])));
        assert!(!b.witness_equiv(&Token::new("p"), &Token::new("q"), &toks(&["x", "y"])));
        assert!(b.witness_equiv(&Token::new("p"), &Token::new("x"), &toks(&["x"])));
    }

    #[test]
    fn equivalence_is_partial_equivalence_and_respects_entailment() {
        for sys in [term(), flat2(), bfly()] {
            for x in sys.con_sets() {
                for i in sys.tokens() {
                    for j in sys.tokens() {
                        let ij = sys.witness_equiv(i, j, &x);
                        assert_eq!(ij, sys.witness_equiv(j, i, &x), "symmetry");
                        if ij {
                            // Equivalent witnesses entail the same tokens.
                            let pi = ConsPair::new(i.clone(), x.clone());
                            let pj = ConsPair::new(j.clone(), x.clone());
                            assert_eq!(
                                sys.entailed_set(&pi).unwrap_or_default(),
                                sys.entailed_set(&pj).unwrap_or_default()
                            );
                        }
                        for k in sys.tokens() {
                            if ij && sys.witness_equiv(j, k, &x) {
                                assert!(sys.witness_equiv(i, k, &x), "transitivity");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn equivalence_restricts_and_transports() {
        let b = bfly();
        for x in b.con_sets() {
            for u in x.subsets() {
                for i in b.tokens() {
                    for j in b.tokens() {
                        if b.witness_equiv(i, j, &x) && b.is_con_parts(i, &x) {
                            assert!(b.witness_equiv(i, j, &u), "restriction to {u} from {x}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cl_on_empty_family_is_empty() {
        let b = bfly();
        assert!(cl(&b, &cp("p", &["x", "y"]), &[]).is_empty());
        assert!(ucl(&b, &cp("p", &["x", "y"]), &[]).is_empty());
    }

    #[test]
    fn cl_bfly_example() {
        let b = bfly();
        let anchor = cp("p", &["x", "y"]);
        let xs = vec![cp("x", &["x"]), cp("q", &["y"])];
        let got = cl(&b, &anchor, &xs);
        // Oracle: literal quantifier evaluation.
        let expect: Vec<ConsPair> = xs
            .iter()
            .filter(|p| {
                b.tokens().iter().any(|j| {
                    b.witness_equiv(&p.witness, j, &p.set)
                        && b.entails(&anchor, j)
                        && b.entails_set(&anchor, &p.set)
                })
            })
            .cloned()
            .collect();
        assert_eq!(got, expect);
        // Both entries are reachable: x via itself, q via the equivalent
        // witness y.
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn cl_is_monotone_along_anchor_entailment() {
        let b = bfly();
        let families: Vec<Vec<ConsPair>> = vec![
            vec![cp("x", &["x"])],
            vec![cp("x", &["x"]), cp("q", &["y"])],
            vec![cp("p", &[]), cp("y", &["bot", "y"])],
        ];
        for a in b.pairs() {
            for c in b.pairs() {
                if b.entails_set(a, &c.set) && b.witness_equiv(&a.witness, &c.witness, &c.set) {
                    for xs in &families {
                        let small = cl(&b, c, xs);
                        let big = cl(&b, a, xs);
                        for p in &small {
                            assert!(big.contains(p), "{c} ⊑ {a} must not shrink the closure");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn anchor_entails_its_own_ucl() {
        let b = bfly();
        let families: Vec<Vec<ConsPair>> = vec![
            vec![cp("x", &["x"])],
            vec![cp("x", &["x"]), cp("q", &["y"])],
        ];
        for a in b.pairs() {
            for xs in &families {
                let u = ucl(&b, a, xs);
                assert!(b.entails_set(a, &u), "anchor {a} must entail its closure {u}");
            }
        }
    }

    #[test]
    fn wit_set_examples() {
        let b = bfly();
        // The empty family is witnessed by every token, delta included.
        assert_eq!(wit_set(&b, &[]), b.tokens().clone());
        // A singleton family is witnessed by its own witness.
        let fam = [cp("x", &["x"])];
        assert!(wit_set(&b, &fam).contains(&Token::new("x")));
        // The two wings of the butterfly force a top witness.
        let fam = [cp("x", &["x"]), cp("y", &["y"])];
        assert_eq!(wit_set(&b, &fam), toks(&["p", "q"]));
    }

    #[test]
    fn maximality_examples() {
        let b = bfly();
        let d = Cpt::new(cp("x", &["x"]), Token::new("d'"));
        // u = v is always maximal when the witness is in the pool.
        assert!(is_v_maximal(
            &b,
            &Token::new("x"),
            std::slice::from_ref(&d),
            std::slice::from_ref(&d)
        ));
        // The empty subfamily is maximal against a family whose sets are
        // all non-empty (nothing is covered by the empty union).
        assert!(is_v_maximal(&b, &Token::new("bot"), &[], std::slice::from_ref(&d)));
        // It is not maximal once the family contains an empty-set entry.
        let e = Cpt::new(cp("x", &[]), Token::new("d'"));
        assert!(!is_v_maximal(&b, &Token::new("bot"), &[], std::slice::from_ref(&e)));
    }

    #[test]
    fn maximality_transports_along_equivalence() {
        let b = bfly();
        let v = vec![
            Cpt::new(cp("x", &["x"]), Token::new("r")),
            Cpt::new(cp("y", &["y"]), Token::new("s")),
        ];
        let u = v.clone();
        for a in &wit_set(&b, &family_pairs(&u)) {
            if is_v_maximal(&b, a, &u, &v) {
                let covered = union_of_sets(&family_pairs(&u));
                for c in &wit_set(&b, &family_pairs(&u)) {
                    if b.witness_equiv(c, a, &covered) {
                        assert!(is_v_maximal(&b, c, &u, &v));
                    }
                }
            }
        }
    }

    #[test]
    fn spectrum_and_ap_examples() {
        let b = bfly();
        let anchor = cp("p", &["x", "y"]);
        assert_eq!(spectrum(&b, &anchor, &[]).sp, vec![]);
        assert_eq!(ap(&b, &anchor, &[]), TokenSet::empty());
        let v = vec![
            Cpt::new(cp("x", &["x"]), Token::new("r")),
            Cpt::new(cp("q", &["y"]), Token::new("s")),
            Cpt::new(cp("p", &["bot", "x", "y"]), Token::new("t")),
        ];
        let spec = spectrum(&b, &anchor, &v);
        // Only entries with sets inside {x,y} and a p-equivalent witness.
        assert_eq!(spec.rs, toks(&["r", "s"]));
        // ap goes through the anchored closure instead; the third entry's
        // set is not a subset of the anchor's set but is still entailed.
        let image = ap(&b, &anchor, &v);
        assert_eq!(image, toks(&["r", "s", "t"]));
        // Anchors with empty sets only activate empty-set entries in the
        // spectrum.
        let spec0 = spectrum(&b, &cp("p", &[]), &v);
        assert!(spec0.sp.is_empty());
    }

    #[test]
    fn ap_is_monotone_along_anchor_entailment() {
        let b = bfly();
        let v = vec![
            Cpt::new(cp("x", &["x"]), Token::new("r")),
            Cpt::new(cp("q", &["y"]), Token::new("s")),
        ];
        for a in b.pairs() {
            for c in b.pairs() {
                if b.entails_set(a, &c.set) && b.witness_equiv(&a.witness, &c.witness, &c.set) {
                    assert!(ap(&b, c, &v).is_subset(&ap(&b, a, &v)));
                }
            }
        }
    }
}
