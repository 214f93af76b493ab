//! Property tests: serialization round trips on arbitrary well-formed
//! systems, pair-name escaping, and canonical set laws.

use proptest::prelude::*;

use isw_core::product::{pair_token, split_pair};
use isw_core::system::{build_system, ConsPair, InfoSystem};
use isw_core::textio::{parse_system, serialize_system};
use isw_core::token::{Token, TokenSet};

fn token_name() -> impl Strategy<Value = String> {
    "[a-d][a-z0-9_']{0,3}"
}

fn small_universe() -> impl Strategy<Value = Vec<String>> {
    proptest::collection::btree_set(token_name(), 1..5).prop_map(|s| s.into_iter().collect())
}

prop_compose! {
    fn arb_system()(names in small_universe())(
        con_picks in proptest::collection::vec(
            (0..names.len(), proptest::collection::btree_set(0..names.len(), 0..3)),
            0..12,
        ),
        entail_picks in proptest::collection::vec(
            proptest::collection::btree_set(0..names.len(), 0..3),
            0..12,
        ),
        names in Just(names),
    ) -> InfoSystem {
        let toks: Vec<Token> = names.iter().map(|n| Token::new(n)).collect();
        let universe: TokenSet = toks.iter().cloned().collect();
        let delta = toks[0].clone();
        let con: Vec<ConsPair> = con_picks
            .iter()
            .map(|(w, set)| {
                ConsPair::new(
                    toks[*w].clone(),
                    set.iter().map(|&i| toks[i].clone()).collect(),
                )
            })
            .collect();
        let entail: Vec<(ConsPair, TokenSet)> = con
            .iter()
            .zip(entail_picks)
            .map(|(p, set)| {
                (p.clone(), set.iter().map(|&i| toks[i].clone()).collect())
            })
            .collect();
        build_system("RND", universe, delta, con, entail).expect("well-formed by construction")
    }
}

proptest! {
    #[test]
    fn serialization_round_trips(sys in arb_system()) {
        let text = serialize_system(&sys);
        let back = parse_system(&text).unwrap();
        prop_assert_eq!(back, sys);
    }

    #[test]
    fn pair_names_split_back(l in "[a-z.\\\\]{1,6}", r in "[a-z.\\\\]{1,6}") {
        let lt = Token::new(&l);
        let rt = Token::new(&r);
        let joined = pair_token(&lt, &rt);
        prop_assert_eq!(split_pair(&joined), Some((lt, rt)));
    }

    #[test]
    fn token_set_laws(
        a in proptest::collection::vec(token_name(), 0..6),
        b in proptest::collection::vec(token_name(), 0..6),
    ) {
        let sa: TokenSet = a.iter().map(|n| Token::new(n)).collect();
        let sb: TokenSet = b.iter().map(|n| Token::new(n)).collect();
        let u = sa.union(&sb);
        prop_assert!(sa.is_subset(&u) && sb.is_subset(&u));
        prop_assert_eq!(u.clone(), sb.union(&sa));
        prop_assert_eq!(u.union(&sa), u.clone());
        prop_assert_eq!(sa.is_subset(&sb) && sb.is_subset(&sa), sa == sb);
    }
}
