//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines; any failure panics with the offending instance.

use std::sync::Arc;
use std::time::Instant;

use isw_core::approx::{check_approx, compose, enumerate_mappings, ApproxMapping};
use isw_core::associate::{enumerate_associates, is_associate, ExpToken};
use isw_core::axioms::{check_alg, check_axioms, check_bc, check_gip, recheck, Verdict};
use isw_core::closure::{
    check_ccc, exp_states, fct_st_iso, roundtrips, ExpState,
};
use isw_core::error::Error;
use isw_core::expcheck::{check_alg_exp, check_axioms_exp, check_bc_exp, check_gip_exp};
use isw_core::expspace::{materialize, ExpBudget, ExpSpace};
use isw_core::fixtures::{bfly, flat2, term};
use isw_core::poset::{
    check_lpo, info_from_domain, order_iso, pointed_posets_up_to,
};
use isw_core::product::{
    pairing, product, terminal, terminal_mediator, terminal_mediator_unique, UniquenessEvidence,
};
use isw_core::state::{
    check_ldomain, compact_states, enumerate_states, is_state, local_lub, way_below, State,
};
use isw_core::system::{build_system, ConsPair, InfoSystem};
use isw_core::token::{toks, Token, TokenSet};
use isw_core::witness::Cpt;

fn fixtures() -> Vec<InfoSystem> {
    vec![term(), flat2(), bfly()]
}

/// All single-edit mutations of a system: dropping one witnessed pair
/// (with its entailment row) and emptying one entailment row.
fn single_edit_mutations(sys: &InfoSystem) -> Vec<InfoSystem> {
    let mut out = Vec::new();
    for drop in 0..sys.pair_count() {
        let con: Vec<ConsPair> = sys
            .pairs()
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != drop)
            .map(|(_, p)| p.clone())
            .collect();
        let entail: Vec<(ConsPair, TokenSet)> = sys
            .entail_rows()
            .enumerate()
            .filter(|(k, _)| *k != drop)
            .map(|(_, (p, e))| (p.clone(), e.clone()))
            .collect();
        out.push(
            build_system(
                &format!("{}_nopair{drop}", sys.name()),
                sys.tokens().clone(),
                sys.delta().clone(),
                con,
                entail,
            )
            .expect("mutation stays well-formed"),
        );
    }
    for wipe in 0..sys.pair_count() {
        let entail: Vec<(ConsPair, TokenSet)> = sys
            .entail_rows()
            .enumerate()
            .map(|(k, (p, e))| {
                let row = if k == wipe { TokenSet::empty() } else { e.clone() };
                (p.clone(), row)
            })
            .collect();
        out.push(
            build_system(
                &format!("{}_norow{wipe}", sys.name()),
                sys.tokens().clone(),
                sys.delta().clone(),
                sys.pairs().to_vec(),
                entail,
            )
            .expect("mutation stays well-formed"),
        );
    }
    out
}

#[test]
fn criterion_1_axiom_suite_and_mutations() {
    let started = Instant::now();
    for sys in fixtures() {
        let report = check_axioms(&sys);
        assert!(report.passed(), "{}:\n{report}", sys.name());
        assert!(check_gip(&sys).unwrap().passed(), "{}", sys.name());
    }
    for sys in fixtures() {
        let mutations = single_edit_mutations(&sys);
        // TERM only admits four single edits; the larger fixtures supply at
        // least twenty each.
        if sys.pair_count() >= 10 {
            assert!(mutations.len() >= 20, "{}", sys.name());
        }
        for m in mutations.iter().take(20) {
            let report = check_axioms(m);
            assert!(!report.passed(), "{} should fail some axiom", m.name());
            for (id, v) in &report.verdicts {
                if let Verdict::Fail(cx) = v {
                    assert!(
                        !recheck(m, *id, cx),
                        "{}: counterexample for {id} must refute the axiom",
                        m.name()
                    );
                }
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("criterion 1 (axiom suite + mutations): pass in {elapsed:?}");
}

#[test]
fn criterion_2_small_poset_sweep() {
    let started = Instant::now();
    let mut verified = 0;
    for p in pointed_posets_up_to(5) {
        if check_lpo(&p).is_err() {
            continue;
        }
        let sys = Arc::new(info_from_domain("D", &p).unwrap());
        let report = check_axioms(&sys);
        assert!(report.passed(), "{} elements:\n{report}", p.len());
        assert!(check_gip(&sys).unwrap().passed());
        assert!(check_alg(&sys).passed());
        let sp = enumerate_states(&sys, 16).unwrap();
        assert!(
            order_iso(&p, &sp.as_poset()).is_some(),
            "state order must mirror the poset ({} elements)",
            p.len()
        );
        assert_eq!(
            check_bc(&sys).passed(),
            p.is_bounded_complete(),
            "witness independence must match bounded completeness"
        );
        verified += 1;
    }
    assert_eq!(verified, 25, "pointed posets up to five elements");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("criterion 2 (poset sweep, {verified} posets): pass in {elapsed:?}");
}

#[test]
fn criterion_3_state_spaces_are_local_lub_domains() {
    let started = Instant::now();
    let mut systems: Vec<InfoSystem> = fixtures();
    for p in pointed_posets_up_to(5) {
        if check_lpo(&p).is_ok() {
            systems.push(info_from_domain("D", &p).unwrap());
        }
    }
    for sys in &systems {
        let sp = enumerate_states(sys, 16).unwrap();
        let rep = check_ldomain(sys, &sp);
        assert!(rep.is_ldomain(), "{}", sys.name());
        // way_below internally asserts the entailment characterisation
        // against the order-theoretic relation on every pair.
        for x in sp.states() {
            for y in sp.states() {
                let _ = way_below(sys, &sp, x, y);
            }
        }
        compact_states(sys, &sp);
    }
    // The butterfly has two distinct local joins for its wings.
    let b = bfly();
    let sp = enumerate_states(&b, 16).unwrap();
    let x = State(toks(&["bot", "x"]));
    let y = State(toks(&["bot", "y"]));
    let zp = State(toks(&["bot", "p", "x", "y"]));
    let zq = State(toks(&["bot", "q", "x", "y"]));
    let jp = local_lub(&b, &sp, &x, &y, &zp).unwrap();
    let jq = local_lub(&b, &sp, &x, &y, &zq).unwrap();
    assert_ne!(jp, jq, "local joins must depend on the bound");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("criterion 3 (state spaces): pass in {elapsed:?}");
}

fn the_pairs() -> Vec<(InfoSystem, InfoSystem)> {
    vec![(term(), term()), (term(), flat2()), (flat2(), term())]
}

fn space_of(a: &InfoSystem, b: &InfoSystem) -> ExpSpace {
    materialize(
        &Arc::new(a.clone()),
        &Arc::new(b.clone()),
        &ExpBudget::default(),
    )
    .unwrap()
}

#[test]
fn criterion_4_function_spaces_pass_all_axioms() {
    let started = Instant::now();
    for (a, b) in the_pairs() {
        let space = space_of(&a, &b);
        let report = check_axioms_exp(&space);
        assert!(report.passed(), "{} -> {}:\n{report}", a.name(), b.name());
        assert!(
            check_gip_exp(&space).passed(),
            "{} -> {}",
            a.name(),
            b.name()
        );
    }
    // Exceeding the budget fails loudly rather than truncating.
    let f = Arc::new(flat2());
    let tight = ExpBudget {
        max_cpts: 4,
        ..ExpBudget::default()
    };
    assert!(matches!(
        materialize(&f, &f, &tight),
        Err(Error::BudgetExceeded(_))
    ));
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!("criterion 4 (function-space conditions): pass in {elapsed:?}");
}

#[test]
fn criterion_5_state_mapping_round_trips() {
    let started = Instant::now();
    let expected = [(1, 1), (3, 3), (1, 1)];
    for ((a, b), exp_counts) in the_pairs().into_iter().zip(expected) {
        let space = space_of(&a, &b);
        let r = roundtrips(&space, 24).unwrap();
        assert_eq!((r.states, r.mappings), exp_counts, "{} -> {}", a.name(), b.name());
    }
    let elapsed = started.elapsed();
    println!("criterion 5 (round trips): pass in {elapsed:?}");
}

#[test]
fn criterion_6_function_space_isomorphism() {
    let started = Instant::now();
    let expected = [(1, 1), (3, 3), (1, 1)];
    for ((a, b), counts) in the_pairs().into_iter().zip(expected) {
        let space = space_of(&a, &b);
        let iso = fct_st_iso(&space, 24).unwrap();
        assert_eq!(
            (iso.states, iso.functions),
            counts,
            "{} -> {}",
            a.name(),
            b.name()
        );
    }
    let elapsed = started.elapsed();
    println!("criterion 6 (order isomorphism): pass in {elapsed:?}");
}

#[test]
fn criterion_7_alg_and_bc_inheritance() {
    let started = Instant::now();
    for (a, b) in the_pairs() {
        assert!(check_alg(&a).passed() && check_alg(&b).passed());
        let space = space_of(&a, &b);
        assert!(
            check_alg_exp(&space).passed(),
            "reflexive interpolation must be inherited by {} -> {}",
            a.name(),
            b.name()
        );
        if check_bc(&b).passed() {
            assert!(
                check_bc_exp(&space).passed(),
                "witness independence must be inherited by {} -> {}",
                a.name(),
                b.name()
            );
        }
    }
    let elapsed = started.elapsed();
    println!("criterion 7 (inheritance): pass in {elapsed:?}");
}

#[test]
fn criterion_8_terminal_products_and_exponent_equations() {
    let started = Instant::now();
    let t = Arc::new(terminal());
    // Terminal mediators: existence and uniqueness per fixture.
    for sys in fixtures() {
        let a = Arc::new(sys);
        let bang = terminal_mediator(&a, &t);
        assert!(check_approx(&bang).passed(), "{}", a.name());
        let ev = terminal_mediator_unique(&a, &t, 20).unwrap();
        match a.name() {
            "BFLY" => assert_eq!(ev, UniquenessEvidence::ForcedClosure),
            _ => assert!(matches!(ev, UniquenessEvidence::Powerset { valid: 1, .. })),
        }
    }
    // Product universal property for (FLAT2, TERM) and (TERM, TERM).
    let f = Arc::new(flat2());
    for (a1, a2) in [(f.clone(), t.clone()), (t.clone(), t.clone())] {
        let prod = product(&a1, &a2, 16).unwrap();
        assert!(check_axioms(&prod.sys).passed());
        assert!(check_gip(&prod.sys).unwrap().passed());
        assert!(check_approx(&prod.pr1).passed());
        assert!(check_approx(&prod.pr2).passed());
        for c in [t.clone(), f.clone()] {
            let fs = all_mappings(&c, &a1);
            let gs = all_mappings(&c, &a2);
            // Candidate mediators: exhaustive when the pool is small,
            // through monotone state functions otherwise.
            let cand_bits = (c.pair_count() * prod.sys.tokens().len()) as u32;
            let candidates: Vec<ApproxMapping> = if cand_bits <= 20 {
                enumerate_mappings(&c, &prod.sys, 20).unwrap()
            } else {
                let csp = enumerate_states(&c, 16).unwrap();
                let psp = enumerate_states(&prod.sys, 16).unwrap();
                isw_core::closure::monotone_state_maps(&csp, &psp)
                    .iter()
                    .map(|g| isw_core::closure::h_of_g(&c, &prod.sys, g))
                    .collect()
            };
            for fmap in &fs {
                for gmap in &gs {
                    let m = pairing(fmap, gmap, &prod).unwrap();
                    assert!(check_approx(&m).passed());
                    let back1 = compose(&m, &prod.pr1).unwrap();
                    let back2 = compose(&m, &prod.pr2).unwrap();
                    assert_eq!(back1.images(), fmap.images());
                    assert_eq!(back2.images(), gmap.images());
                    let solutions: Vec<&ApproxMapping> = candidates
                        .iter()
                        .filter(|cand| {
                            compose(cand, &prod.pr1).unwrap().images() == fmap.images()
                                && compose(cand, &prod.pr2).unwrap().images() == gmap.images()
                        })
                        .collect();
                    assert_eq!(
                        solutions.len(),
                        1,
                        "pairing must be the unique mediator among {} candidates",
                        candidates.len()
                    );
                    assert_eq!(solutions[0].images(), m.images());
                }
            }
        }
    }
    // Exponent equations on the two triples, for every approximable
    // mapping out of the product.
    for (a, b, c) in [
        (term(), term(), flat2()),
        (flat2(), term(), term()),
    ] {
        let sa = Arc::new(a);
        let sb = Arc::new(b);
        let sc = Arc::new(c);
        let space = Arc::new(materialize(&sb, &sc, &ExpBudget::default()).unwrap());
        let prod = product(&sa, &sb, 16).unwrap();
        let report = check_ccc(&sa, &sb, &space, &prod, 24).unwrap();
        assert!(report.mappings_checked >= 1);
        assert!(report.curried_candidates >= 1);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!("criterion 8 (terminal, products, exponent equations): pass in {elapsed:?}");
}

#[test]
fn criterion_9_oracle_cross_checks() {
    let started = Instant::now();
    // Associates against the powerset filter: every family of the
    // one-point pair, and families of at most two entries over
    // (FLAT2, TERM).
    let tt = Arc::new(term());
    let cpts_tt: Vec<Cpt> = tt
        .pairs()
        .iter()
        .map(|p| Cpt::new(p.clone(), tt.delta().clone()))
        .collect();
    assert_associates_match_powerset(&tt, &tt, &cpts_tt, usize::MAX);
    let f = Arc::new(flat2());
    let cpts_ft: Vec<Cpt> = f
        .pairs()
        .iter()
        .map(|p| Cpt::new(p.clone(), tt.delta().clone()))
        .collect();
    assert_associates_match_powerset(&f, &tt, &cpts_ft, 2);
    // State enumeration through st against the literal subset sweep on the
    // extensional one-point function space.
    let space = space_of(&term(), &term());
    let ext = space.to_info_system(&ExpBudget::default()).unwrap();
    assert!(check_axioms(&ext).passed());
    assert!(check_gip(&ext).unwrap().passed());
    let via_st: Vec<ExpState> = exp_states(&space, 24).unwrap();
    let direct: Vec<TokenSet> = ext
        .tokens()
        .clone()
        .subsets()
        .filter(|x| is_state(&ext, x).is_state())
        .collect();
    let via_st_names: Vec<TokenSet> = via_st
        .iter()
        .map(|f| {
            f.0.iter()
                .map(|&i| Token::new(&space.token_name(i)))
                .collect()
        })
        .collect();
    assert_eq!(via_st_names, direct);
    // The whole consistency and entailment quotient agrees with the
    // extensional tabulation.
    let n = space.token_count();
    for head in 0..n {
        for mask in 0u32..1 << n {
            let members: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
            let set: TokenSet = members
                .iter()
                .map(|&k| Token::new(&space.token_name(k)))
                .collect();
            let p = ConsPair::new(Token::new(&space.token_name(head)), set);
            assert_eq!(space.con_members(head, &members), ext.is_con(&p));
            if ext.is_con(&p) {
                for rhs in 0..n {
                    assert_eq!(
                        space.entails_members(head, &members, rhs),
                        ext.entails(&p, &Token::new(&space.token_name(rhs)))
                    );
                }
            }
        }
    }
    let elapsed = started.elapsed();
    println!("criterion 9 (oracle cross-checks): pass in {elapsed:?}");
}

/// Every approximable mapping between two systems: by powerset filtering
/// when the candidate pool is small, through monotone state functions
/// otherwise (the correspondence is itself verified by criterion 6 and the
/// round trips in closure's unit tests).
fn all_mappings(c: &Arc<InfoSystem>, target: &Arc<InfoSystem>) -> Vec<ApproxMapping> {
    let bits = (c.pair_count() * target.tokens().len()) as u32;
    if bits <= 24 {
        return enumerate_mappings(c, target, 24).unwrap();
    }
    let csp = enumerate_states(c, 16).unwrap();
    let tsp = enumerate_states(target, 16).unwrap();
    isw_core::closure::monotone_state_maps(&csp, &tsp)
        .iter()
        .map(|g| isw_core::closure::h_of_g(c, target, g))
        .collect()
}

fn assert_associates_match_powerset(
    src: &Arc<InfoSystem>,
    tgt: &Arc<InfoSystem>,
    cpts: &[Cpt],
    max_family: usize,
) {
    for mask in 0u32..1 << cpts.len() {
        if (mask.count_ones() as usize) > max_family {
            continue;
        }
        let v: Vec<Cpt> = (0..cpts.len())
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| cpts[k].clone())
            .collect();
        let mut listed = enumerate_associates(src, tgt, &v, 100_000).unwrap();
        listed.sort();
        // Oracle: filter all subsets of Con x A' through the membership
        // decision.
        let mut expect = Vec::new();
        for wmask in 0u32..1 << cpts.len() {
            let w: Vec<Cpt> = (0..cpts.len())
                .filter(|k| wmask >> k & 1 == 1)
                .map(|k| cpts[k].clone())
                .collect();
            if is_associate(src, tgt, &w, &v) {
                expect.push(w);
            }
        }
        expect.sort();
        expect.dedup();
        assert_eq!(listed, expect, "family {v:?}");
        // Every token built from these families validates.
        for w in &listed {
            let tok = ExpToken::new(w.clone(), v.clone());
            assert!(is_associate(src, tgt, &tok.w, &tok.v));
        }
    }
}
