//! Exhaustive condition checking for function spaces.
//!
//! Consistency and entailment of a function space depend on a token family
//! only through (a) each member on its own and (b) the pointwise union of
//! the members' activated images. Every universally quantified condition is
//! therefore decided by sweeping token behaviour classes and achievable
//! profile unions instead of raw finite families; the sweep is equivalent
//! to the literal one (each abstract failure is materialised as a concrete
//! family and re-checked against the plain decision procedures before it is
//! reported). `tests/acceptance.rs` additionally cross-validates the whole
//! quotient against a fully extensional materialisation of the smallest
//! space.

use crate::axioms::{AxiomId, AxiomReport, Counterexample, CxItem, Verdict, ALL_AXIOMS};
use crate::expspace::{profile_le, ExpSpace, Profile};
use crate::token::{Token, TokenSet};

fn name_set(space: &ExpSpace, fam: &[usize]) -> TokenSet {
    fam.iter()
        .map(|&i| Token::new(&space.token_name(i)))
        .collect()
}

fn tok(space: &ExpSpace, i: usize) -> Token {
    Token::new(&space.token_name(i))
}

fn fail(items: Vec<CxItem>) -> Verdict {
    Verdict::Fail(Counterexample(items))
}

/// Profile of a single token set of tokens drawn from `fam`.
fn fam_union(space: &ExpSpace, fam: &[usize]) -> (Profile, u32) {
    space.union_profile(fam)
}

fn check_one(space: &ExpSpace, id: AxiomId) -> Verdict {
    let n = space.token_count();
    let classes = space.behaviour_classes();
    match id {
        AxiomId::SelfConsistent => {
            for i in 0..n {
                if !space.con_members(i, &[i]) {
                    return fail(vec![CxItem::Tok(tok(space, i))]);
                }
            }
            Verdict::Pass
        }
        AxiomId::SubsetClosure => {
            for (h, _) in &classes {
                let reach = space.con_classes(*h);
                for (p, _, fam) in &reach {
                    for (q, qid, fam_sub) in space.reachable(*h).iter().map(|(pid, f)| {
                        (space.profile_by_id(*pid), *pid, f.clone())
                    }) {
                        if profile_le(&q, p) && !space.ok2(*h, &q, qid) {
                            let mut big = fam.clone();
                            big.extend_from_slice(&fam_sub);
                            debug_assert!(space.con_members(*h, &big));
                            debug_assert!(!space.con_members(*h, &fam_sub));
                            return fail(vec![
                                CxItem::Tok(tok(space, *h)),
                                CxItem::Set(name_set(space, &big)),
                                CxItem::Set(name_set(space, &fam_sub)),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::DeltaEntailment => {
            let d = space.delta_idx();
            for (h, _) in &classes {
                if !space.con_members(*h, &[]) || !space.entails_members(*h, &[], d) {
                    return fail(vec![CxItem::Tok(tok(space, *h))]);
                }
            }
            Verdict::Pass
        }
        AxiomId::EntailConsistency => {
            for (h, _) in &classes {
                for (p, pid, fam) in space.con_classes(*h) {
                    let entailed = space.entailed_of(*h, &p, pid);
                    for &t in entailed.iter() {
                        if !space.ok1(*h, t) {
                            debug_assert!(!space.con_members(*h, &[t]));
                            return fail(vec![
                                CxItem::Tok(tok(space, *h)),
                                CxItem::Set(name_set(space, &fam)),
                                CxItem::Set(name_set(space, &[t])),
                            ]);
                        }
                    }
                    for (_, qid, fam_q) in space.closure_of(&entailed) {
                        let q = space.profile_by_id(qid);
                        if !space.ok2(*h, &q, qid) {
                            debug_assert!(!space.con_members(*h, &fam_q));
                            return fail(vec![
                                CxItem::Tok(tok(space, *h)),
                                CxItem::Set(name_set(space, &fam)),
                                CxItem::Set(name_set(space, &fam_q)),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::Monotonicity => {
            for (h, _) in &classes {
                let cc = space.con_classes(*h);
                for (p, pid, fam) in &cc {
                    for (p2, pid2, fam2) in &cc {
                        if !profile_le(p, p2) {
                            continue;
                        }
                        let ea = space.entailed_of(*h, p, *pid);
                        let eb = space.entailed_of(*h, p2, *pid2);
                        if let Some(&t) = ea.iter().find(|t| !eb.contains(t)) {
                            let mut big = fam.clone();
                            big.extend_from_slice(fam2);
                            debug_assert!(space.entails_members(*h, fam, t));
                            debug_assert!(!space.entails_members(*h, &big, t));
                            return fail(vec![
                                CxItem::Tok(tok(space, *h)),
                                CxItem::Set(name_set(space, fam)),
                                CxItem::Set(name_set(space, &big)),
                                CxItem::Tok(tok(space, t)),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::Transitivity => {
            for (h, _) in &classes {
                for (p, pid, fam) in space.con_classes(*h) {
                    let entailed = space.entailed_of(*h, &p, pid);
                    let pool: Vec<usize> = entailed
                        .iter()
                        .copied()
                        .filter(|&t| space.ok1(*h, t))
                        .collect();
                    for (q, qid, fam_q) in space.closure_of(&pool) {
                        if !space.ok2(*h, &q, qid) {
                            continue;
                        }
                        let via = space.entailed_of(*h, &q, qid);
                        if let Some(&t) = via.iter().find(|t| !entailed.contains(t)) {
                            debug_assert!(space.entails_members(*h, &fam_q, t));
                            debug_assert!(!space.entails_members(*h, &fam, t));
                            return fail(vec![
                                CxItem::Tok(tok(space, *h)),
                                CxItem::Set(name_set(space, &fam)),
                                CxItem::Set(name_set(space, &fam_q)),
                                CxItem::Tok(tok(space, t)),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::WitnessSubsumption
        | AxiomId::WitnessTransfer
        | AxiomId::WitnessConservativity => check_witness_pair_axiom(space, id, &classes),
        AxiomId::EntailInterpolation => {
            for (h, _) in &classes {
                for (p, pid, fam) in space.con_classes(*h) {
                    let entailed = space.entailed_of(*h, &p, pid);
                    let pool: Vec<usize> = entailed
                        .iter()
                        .copied()
                        .filter(|&t| space.ok1(*h, t))
                        .collect();
                    let interp: Vec<(Profile, u32, Vec<usize>)> = space
                        .closure_of(&pool)
                        .into_iter()
                        .filter(|(q, qid, _)| space.ok2(*h, q, *qid))
                        .collect();
                    for &t in entailed.iter() {
                        let found = interp
                            .iter()
                            .any(|(q, qid, _)| space.entails_profile(*h, q, *qid, t));
                        if !found {
                            return fail(vec![
                                CxItem::Tok(tok(space, *h)),
                                CxItem::Set(name_set(space, &fam)),
                                CxItem::Tok(tok(space, t)),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::WitnessGeneration => {
            for (h, _) in &classes {
                for (p, pid, fam) in space.con_classes(*h) {
                    let entailed = space.entailed_of(*h, &p, pid);
                    for (q, qid, _) in space.closure_of(&entailed) {
                        // The hardest set with this profile: every entailed
                        // token whose profile it covers.
                        let ymax: Vec<usize> = entailed
                            .iter()
                            .copied()
                            .filter(|&t| profile_le(space.profile_of(t), &q))
                            .collect();
                        let found = entailed.iter().any(|&e| {
                            ymax.iter().all(|&t| space.ok1(e, t)) && space.ok2(e, &q, qid)
                        });
                        if !found {
                            debug_assert!({
                                let all_fail = entailed
                                    .iter()
                                    .all(|&e| !space.con_members(e, &ymax));
                                all_fail
                            });
                            return fail(vec![
                                CxItem::Tok(tok(space, *h)),
                                CxItem::Set(name_set(space, &fam)),
                                CxItem::Set(name_set(space, &ymax)),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
    }
}

/// The three conditions relating two heads h, h' with {h} consistent for
/// h'. Quantification over head pairs collapses to behaviour-class pairs.
fn check_witness_pair_axiom(
    space: &ExpSpace,
    id: AxiomId,
    classes: &[(usize, Vec<usize>)],
) -> Verdict {
    for (h, _) in classes {
        for (h2, _) in classes {
            // Guard: {h} in Con(h2).
            if !space.con_members(*h2, &[*h]) {
                continue;
            }
            let pool_h = space.pool(*h);
            let pool_h2 = space.pool(*h2);
            let missing: Vec<usize> = pool_h
                .iter()
                .copied()
                .filter(|m| !pool_h2.contains(m))
                .collect();
            for (p, pid, fam) in space.con_classes(*h) {
                let bad_member = missing
                    .iter()
                    .copied()
                    .find(|&m| profile_le(space.profile_of(m), &p));
                match id {
                    AxiomId::WitnessSubsumption => {
                        if let Some(m) = bad_member {
                            let mut x = fam.clone();
                            x.push(m);
                            debug_assert!(space.con_members(*h, &x));
                            debug_assert!(!space.con_members(*h2, &x));
                            return fail(vec![
                                CxItem::Tok(tok(space, *h)),
                                CxItem::Tok(tok(space, *h2)),
                                CxItem::Set(name_set(space, &x)),
                            ]);
                        }
                        if !space.ok2(*h2, &p, pid) {
                            debug_assert!(!space.con_members(*h2, &fam));
                            return fail(vec![
                                CxItem::Tok(tok(space, *h)),
                                CxItem::Tok(tok(space, *h2)),
                                CxItem::Set(name_set(space, &fam)),
                            ]);
                        }
                    }
                    AxiomId::WitnessTransfer => {
                        let entailed = space.entailed_of(*h, &p, pid);
                        if entailed.is_empty() {
                            continue;
                        }
                        let bad = bad_member.is_some() || !space.ok2(*h2, &p, pid);
                        if bad {
                            let mut x = fam.clone();
                            x.extend(bad_member);
                            let t = entailed[0];
                            debug_assert!(space.entails_members(*h, &x, t));
                            debug_assert!(!space.con_members(*h2, &x));
                            return fail(vec![
                                CxItem::Tok(tok(space, *h)),
                                CxItem::Tok(tok(space, *h2)),
                                CxItem::Set(name_set(space, &x)),
                                CxItem::Tok(tok(space, t)),
                            ]);
                        }
                        let e2 = space.entailed_of(*h2, &p, pid);
                        if let Some(&t) = entailed.iter().find(|t| !e2.contains(t)) {
                            return fail(vec![
                                CxItem::Tok(tok(space, *h)),
                                CxItem::Tok(tok(space, *h2)),
                                CxItem::Set(name_set(space, &fam)),
                                CxItem::Tok(tok(space, t)),
                            ]);
                        }
                    }
                    AxiomId::WitnessConservativity => {}
                    _ => unreachable!(),
                }
            }
            if id == AxiomId::WitnessConservativity {
                // X must be consistent with both heads; sweep profiles
                // achievable from the common pool.
                let common: Vec<usize> = pool_h
                    .iter()
                    .copied()
                    .filter(|m| pool_h2.contains(m))
                    .collect();
                for (q, qid, fam_q) in space.closure_of(&common) {
                    if !space.ok2(*h, &q, qid) || !space.ok2(*h2, &q, qid) {
                        continue;
                    }
                    let eh = space.entailed_of(*h, &q, qid);
                    let eh2 = space.entailed_of(*h2, &q, qid);
                    if let Some(&t) = eh2.iter().find(|t| !eh.contains(t)) {
                        debug_assert!(space.entails_members(*h2, &fam_q, t));
                        debug_assert!(!space.entails_members(*h, &fam_q, t));
                        return fail(vec![
                            CxItem::Tok(tok(space, *h)),
                            CxItem::Tok(tok(space, *h2)),
                            CxItem::Set(name_set(space, &fam_q)),
                            CxItem::Tok(tok(space, t)),
                        ]);
                    }
                }
            }
        }
    }
    Verdict::Pass
}

/// Decides the eleven conditions on a function space.
pub fn check_axioms_exp(space: &ExpSpace) -> AxiomReport {
    AxiomReport {
        verdicts: ALL_AXIOMS
            .iter()
            .map(|&id| (id, check_one(space, id)))
            .collect(),
    }
}

/// Global interpolation on a function space. One entailed-set-sized goal
/// suffices: entailment of a token set is memberwise, so an interpolant for
/// the whole entailed set serves every smaller goal.
pub fn check_gip_exp(space: &ExpSpace) -> Verdict {
    for (h, _) in space.behaviour_classes() {
        for (p, pid, fam) in space.con_classes(h) {
            let entailed = space.entailed_of(h, &p, pid);
            let mut found = false;
            'search: for &g in entailed.iter() {
                let pool: Vec<usize> = entailed
                    .iter()
                    .copied()
                    .filter(|&m| space.ok1(g, m))
                    .collect();
                for (q, qid, _) in space.closure_of(&pool) {
                    if space.ok2(g, &q, qid) {
                        let through = space.entailed_of(g, &q, qid);
                        if entailed.iter().all(|t| through.contains(t)) {
                            found = true;
                            break 'search;
                        }
                    }
                }
            }
            if !found {
                return fail(vec![
                    CxItem::Tok(tok(space, h)),
                    CxItem::Set(name_set(space, &fam)),
                ]);
            }
        }
    }
    Verdict::Pass
}

/// Algebraicity: interpolation through a reflexive head-family pair. Also
/// evaluates the same-witness single-token form and asserts agreement.
pub fn check_alg_exp(space: &ExpSpace) -> Verdict {
    let mut alg = Verdict::Pass;
    'alg: for (h, _) in space.behaviour_classes() {
        for (p, pid, fam) in space.con_classes(h) {
            let entailed = space.entailed_of(h, &p, pid);
            let mut found = false;
            'search: for &g in entailed.iter() {
                let pool: Vec<usize> = entailed
                    .iter()
                    .copied()
                    .filter(|&m| space.ok1(g, m))
                    .collect();
                // Largest profiles first: the interpolant is usually found
                // at or near the top of the closure.
                let mut cands = space.closure_of(&pool);
                cands.sort_by_key(|(q, _, _)| {
                    std::cmp::Reverse(q.iter().map(|s| s.len()).sum::<usize>())
                });
                for (q, qid, _) in cands {
                    if !space.ok2(g, &q, qid) {
                        continue;
                    }
                    if !space.entails_profile(g, &q, qid, g) {
                        continue;
                    }
                    let through = space.entailed_of(g, &q, qid);
                    if !entailed.iter().all(|t| through.contains(t)) {
                        continue;
                    }
                    // Realize the family by every candidate member the
                    // profile covers that the head re-derives.
                    let real: Vec<usize> = pool
                        .iter()
                        .copied()
                        .filter(|&t| {
                            profile_le(space.profile_of(t), &q)
                                && space.entails_profile(g, &q, qid, t)
                        })
                        .collect();
                    let (rq, _) = fam_union(space, &real);
                    if rq != q {
                        continue;
                    }
                    found = true;
                    break 'search;
                }
            }
            if !found {
                alg = fail(vec![
                    CxItem::Tok(tok(space, h)),
                    CxItem::Set(name_set(space, &fam)),
                ]);
                break 'alg;
            }
        }
    }
    let mut salg = true;
    'salg: for (h, _) in space.behaviour_classes() {
        for (p, pid, _) in space.con_classes(h) {
            let entailed = space.entailed_of(h, &p, pid);
            let pool: Vec<usize> = entailed
                .iter()
                .copied()
                .filter(|&m| space.ok1(h, m))
                .collect();
            let mut cands = space.closure_of(&pool);
            cands.sort_by_key(|(q, _, _)| {
                std::cmp::Reverse(q.iter().map(|s| s.len()).sum::<usize>())
            });
            // The self-entailing candidates do not depend on the goal.
            let mut selfing: Vec<(Profile, u32)> = Vec::new();
            for (q, qid, _) in cands {
                if !space.ok2(h, &q, qid) {
                    continue;
                }
                let real: Vec<usize> = pool
                    .iter()
                    .copied()
                    .filter(|&t| {
                        profile_le(space.profile_of(t), &q)
                            && space.entails_profile(h, &q, qid, t)
                    })
                    .collect();
                let (rq, _) = fam_union(space, &real);
                if rq == q {
                    selfing.push((q, qid));
                }
            }
            for &a in entailed.iter() {
                let found = selfing
                    .iter()
                    .any(|(q, qid)| space.entails_profile(h, q, *qid, a));
                if !found {
                    salg = false;
                    break 'salg;
                }
            }
        }
    }
    assert_eq!(
        alg.passed(),
        salg,
        "reflexive interpolation must agree with its single-token form on function spaces"
    );
    alg
}

/// Witness independence: any two heads consistent for the same family
/// entail the same tokens from it.
pub fn check_bc_exp(space: &ExpSpace) -> Verdict {
    let classes = space.behaviour_classes();
    for (h, _) in &classes {
        for (h2, _) in &classes {
            let pool_h = space.pool(*h);
            let pool_h2 = space.pool(*h2);
            let common: Vec<usize> = pool_h
                .iter()
                .copied()
                .filter(|m| pool_h2.contains(m))
                .collect();
            for (q, qid, fam) in space.closure_of(&common) {
                if !space.ok2(*h, &q, qid) || !space.ok2(*h2, &q, qid) {
                    continue;
                }
                let ea = space.entailed_of(*h, &q, qid);
                let eb = space.entailed_of(*h2, &q, qid);
                if ea != eb {
                    debug_assert!(space.con_members(*h, &fam) && space.con_members(*h2, &fam));
                    return fail(vec![
                        CxItem::Tok(tok(space, *h)),
                        CxItem::Tok(tok(space, *h2)),
                        CxItem::Set(name_set(space, &fam)),
                    ]);
                }
            }
        }
    }
    Verdict::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expspace::{materialize, ExpBudget};
    use crate::fixtures::{flat2, term};
    use std::sync::Arc;

    #[test]
    fn terminal_space_passes_everything() {
        let s = materialize(
            &Arc::new(term()),
            &Arc::new(term()),
            &ExpBudget::default(),
        )
        .unwrap();
        let rep = check_axioms_exp(&s);
        assert!(rep.passed(), "{rep}");
        assert!(check_gip_exp(&s).passed());
        assert!(check_alg_exp(&s).passed());
        assert!(check_bc_exp(&s).passed());
    }

    #[test]
    fn term_to_flat2_space_passes_everything() {
        let s = materialize(
            &Arc::new(term()),
            &Arc::new(flat2()),
            &ExpBudget::default(),
        )
        .unwrap();
        let rep = check_axioms_exp(&s);
        assert!(rep.passed(), "{rep}");
        assert!(check_gip_exp(&s).passed());
        assert!(check_alg_exp(&s).passed());
        assert!(check_bc_exp(&s).passed());
    }
}
