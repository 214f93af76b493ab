//! Canonical fixtures used throughout the test suites and shipped with the
//! command-line tool: the one-point terminal system, the flat two-point
//! domain, the five-element butterfly (the smallest local-lub domain that is
//! not bounded-complete), and a small hand-built system whose entailment is
//! deliberately non-interpolating.

use crate::poset::{info_from_domain, FinitePoset};
use crate::system::{build_system, ConsPair, InfoSystem};
use crate::token::{toks, Token, TokenSet};

/// The one-point system: a single always-true token `d`, consistent with
/// itself, entailed by everything.
pub fn term() -> InfoSystem {
    let d = Token::new("d");
    let p0 = ConsPair::new(d.clone(), TokenSet::empty());
    let p1 = ConsPair::new(d.clone(), TokenSet::singleton(d.clone()));
    build_system(
        "TERM",
        toks(&["d"]),
        d.clone(),
        vec![p0.clone(), p1.clone()],
        vec![
            (p0, TokenSet::singleton(d.clone())),
            (p1, TokenSet::singleton(d)),
        ],
    )
    .expect("terminal fixture is well-formed")
}

/// Flat two-point poset: bot below the incomparable a and b.
pub fn flat2_poset() -> FinitePoset {
    FinitePoset::new(
        toks(&["a", "b", "bot"]),
        &[
            (Token::new("bot"), Token::new("a")),
            (Token::new("bot"), Token::new("b")),
        ],
    )
    .expect("flat two-point poset is valid")
}

/// The butterfly: bot below x and y, which sit below the incomparable upper
/// bounds p and q. {x,y} has two different local joins, p and q.
pub fn bfly_poset() -> FinitePoset {
    FinitePoset::new(
        toks(&["bot", "p", "q", "x", "y"]),
        &[
            (Token::new("bot"), Token::new("x")),
            (Token::new("bot"), Token::new("y")),
            (Token::new("x"), Token::new("p")),
            (Token::new("x"), Token::new("q")),
            (Token::new("y"), Token::new("p")),
            (Token::new("y"), Token::new("q")),
        ],
    )
    .expect("butterfly poset is valid")
}

/// The canonical system of the flat two-point poset.
pub fn flat2() -> InfoSystem {
    info_from_domain("FLAT2", &flat2_poset()).expect("flat2 is a local-lub domain")
}

/// The canonical system of the butterfly poset.
pub fn bfly() -> InfoSystem {
    info_from_domain("BFLY", &bfly_poset()).expect("butterfly is a local-lub domain")
}

/// A three-token system satisfying the basic and witness-interplay
/// conditions but not entailment interpolation: (u,{u}) entails w, yet no
/// consistent set below it re-derives w. Used to exercise failing
/// interpolation verdicts, which no single-edit mutation of the canonical
/// fixtures can produce.
pub fn gipfail() -> InfoSystem {
    let d = Token::new("d");
    let u = Token::new("u");
    let w = Token::new("w");
    let e = TokenSet::empty();
    let sd = TokenSet::singleton(d.clone());
    let sw = TokenSet::singleton(w.clone());
    let su = TokenSet::singleton(u.clone());
    let dw = toks(&["d", "w"]);
    let pairs: Vec<ConsPair> = vec![
        ConsPair::new(d.clone(), e.clone()),
        ConsPair::new(d.clone(), sd.clone()),
        ConsPair::new(w.clone(), e.clone()),
        ConsPair::new(w.clone(), sd.clone()),
        ConsPair::new(w.clone(), sw.clone()),
        ConsPair::new(w.clone(), dw.clone()),
        ConsPair::new(u.clone(), e.clone()),
        ConsPair::new(u.clone(), sd.clone()),
        ConsPair::new(u.clone(), sw.clone()),
        ConsPair::new(u.clone(), dw.clone()),
        ConsPair::new(u.clone(), su.clone()),
    ];
    let entail: Vec<(ConsPair, TokenSet)> = pairs
        .iter()
        .map(|p| {
            let out = if p.witness == u && p.set == su {
                dw.clone()
            } else {
                sd.clone()
            };
            (p.clone(), out)
        })
        .collect();
    build_system("GIPFAIL", toks(&["d", "u", "w"]), d, pairs, entail)
        .expect("gipfail fixture is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{check_axioms, check_bc, check_gip, AxiomId};

    #[test]
    fn term_fixture_shape() {
        let t = term();
        assert_eq!(t.pair_count(), 2);
        assert!(t
            .entails(&ConsPair::new(Token::new("d"), TokenSet::empty()), &Token::new("d")));
    }

    #[test]
    fn flat2_fixture_shape() {
        let f = flat2();
        assert_eq!(f.tokens().len(), 3);
        assert_eq!(f.pair_count(), 10);
        assert_eq!(f.delta(), &Token::new("bot"));
        // Derived from the poset oracle: (a,{a}) entails exactly {bot,a}.
        let p = ConsPair::new(Token::new("a"), toks(&["a"]));
        assert_eq!(f.entailed_set(&p).unwrap(), toks(&["a", "bot"]));
        let p0 = ConsPair::new(Token::new("a"), TokenSet::empty());
        assert_eq!(f.entailed_set(&p0).unwrap(), toks(&["bot"]));
    }

    #[test]
    fn bfly_fixture_shape() {
        let b = bfly();
        assert_eq!(b.tokens().len(), 5);
        assert_eq!(b.pair_count(), 2 + 4 + 4 + 16 + 16);
        let p = ConsPair::new(Token::new("p"), toks(&["x", "y"]));
        assert_eq!(b.entailed_set(&p).unwrap(), toks(&["bot", "p", "x", "y"]));
        let q = ConsPair::new(Token::new("q"), toks(&["x", "y"]));
        assert!(!b.entails(&q, &Token::new("p")));
    }

    #[test]
    fn gipfail_passes_everything_but_interpolation() {
        let g = gipfail();
        let report = check_axioms(&g);
        for (id, v) in &report.verdicts {
            match id {
                AxiomId::EntailInterpolation => assert!(!v.passed(), "{id} should fail"),
                _ => assert!(v.passed(), "{id} unexpectedly failed: {v}"),
            }
        }
        let gip = check_gip(&g).unwrap();
        assert!(!gip.passed());
        assert!(check_bc(&g).passed());
    }
}
