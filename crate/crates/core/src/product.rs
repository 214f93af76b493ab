//! Terminal object and binary products, with projection mappings, the
//! pairing mediator, and universal-property evidence.

use std::sync::Arc;

use crate::approx::{check_approx, enumerate_mappings, ApproxMapping};
use crate::error::{Error, Result};
use crate::system::{build_system, ConsPair, InfoSystem};
use crate::token::{Token, TokenSet};

/// Joins component names into a pair-token name; `.` separates, `\` escapes
/// both characters, so splitting is unambiguous even for nested products.
pub fn pair_token(l: &Token, r: &Token) -> Token {
    fn esc(s: &str) -> String {
        s.chars()
            .flat_map(|c| match c {
                '.' | '\\' => vec!['\\', c],
                _ => vec![c],
            })
            .collect()
    }
    Token::new(&format!("{}.{}", esc(l.name()), esc(r.name())))
}

/// Splits a pair-token name at its unescaped separator.
pub fn split_pair(t: &Token) -> Option<(Token, Token)> {
    let s = t.name();
    let mut left = String::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => left.push(chars.next()?),
            '.' => {
                let mut right = String::new();
                let mut rest = chars.clone();
                while let Some(c) = rest.next() {
                    match c {
                        '\\' => right.push(rest.next()?),
                        '.' => return None,
                        _ => right.push(c),
                    }
                }
                if left.is_empty() || right.is_empty() {
                    return None;
                }
                return Some((Token::new(&left), Token::new(&right)));
            }
            _ => left.push(c),
        }
    }
    None
}

fn project(x: &TokenSet, side: usize) -> TokenSet {
    x.iter()
        .map(|t| {
            let (l, r) = split_pair(t).expect("product token");
            if side == 0 {
                l
            } else {
                r
            }
        })
        .collect()
}

/// The one-point system: the terminal object.
pub fn terminal() -> InfoSystem {
    crate::fixtures::term()
}

/// A product system together with its projection mappings.
pub struct ProductSystem {
    pub sys: Arc<InfoSystem>,
    pub pr1: ApproxMapping,
    pub pr2: ApproxMapping,
}

/// Binary product: pair tokens, coordinatewise consistency and entailment.
/// Errors when the pair universe exceeds the budget.
pub fn product(
    a1: &Arc<InfoSystem>,
    a2: &Arc<InfoSystem>,
    max_tokens: usize,
) -> Result<ProductSystem> {
    let n = a1.tokens().len() * a2.tokens().len();
    if n > max_tokens {
        return Err(Error::BudgetExceeded(format!(
            "product over {n} pair tokens (budget {max_tokens})"
        )));
    }
    let tokens: TokenSet = a1
        .tokens()
        .iter()
        .flat_map(|l| a2.tokens().iter().map(move |r| pair_token(l, r)))
        .collect();
    let delta = pair_token(a1.delta(), a2.delta());
    let mut con = Vec::new();
    let mut entail = Vec::new();
    for i in a1.tokens() {
        for j in a2.tokens() {
            let w = pair_token(i, j);
            for x in tokens.subsets() {
                let x1 = project(&x, 0);
                let x2 = project(&x, 1);
                if !a1.is_con_parts(i, &x1) || !a2.is_con_parts(j, &x2) {
                    continue;
                }
                let p = ConsPair::new(w.clone(), x.clone());
                let e1 = a1
                    .entailed_set(&ConsPair::new(i.clone(), x1))
                    .expect("checked consistent");
                let e2 = a2
                    .entailed_set(&ConsPair::new(j.clone(), x2))
                    .expect("checked consistent");
                let ent: TokenSet = e1
                    .iter()
                    .flat_map(|l| e2.iter().map(move |r| pair_token(l, r)))
                    .collect();
                con.push(p.clone());
                entail.push((p, ent));
            }
        }
    }
    let name = format!("{}__x__{}", a1.name(), a2.name());
    let sys = Arc::new(build_system(&name, tokens, delta, con, entail)?);
    let mk_pr = |side: usize, tgt: &Arc<InfoSystem>| -> ApproxMapping {
        let rel = (0..sys.pair_count())
            .map(|k| {
                let p = sys.pair(k);
                let (l, r) = split_pair(&p.witness).expect("product witness");
                let w = if side == 0 { l } else { r };
                let x = project(&p.set, side);
                tgt.entailed_set(&ConsPair::new(w, x)).unwrap_or_default()
            })
            .collect();
        ApproxMapping::from_images(
            &format!("pr{}", side + 1),
            sys.clone(),
            tgt.clone(),
            rel,
        )
    };
    let pr1 = mk_pr(0, a1);
    let pr2 = mk_pr(1, a2);
    Ok(ProductSystem { sys, pr1, pr2 })
}

/// The pairing mediator: (i,X) relates to a pair exactly when it relates to
/// both components through f and g.
pub fn pairing(f: &ApproxMapping, g: &ApproxMapping, prod: &ProductSystem) -> Result<ApproxMapping> {
    if *f.source != *g.source {
        return Err(Error::SystemMismatch(
            "pairing needs a common source".into(),
        ));
    }
    let rel = (0..f.source.pair_count())
        .map(|k| {
            f.image_idx(k)
                .iter()
                .flat_map(|l| g.image_idx(k).iter().map(move |r| pair_token(l, r)))
                .collect()
        })
        .collect();
    Ok(ApproxMapping::from_images(
        &format!("<{},{}>", f.name, g.name),
        f.source.clone(),
        prod.sys.clone(),
        rel,
    ))
}

/// Product of morphisms: coordinatewise action on a product source.
pub fn product_map(
    f: &ApproxMapping,
    g: &ApproxMapping,
    src: &ProductSystem,
    tgt: &ProductSystem,
) -> ApproxMapping {
    let rel = (0..src.sys.pair_count())
        .map(|k| {
            let p = src.sys.pair(k);
            let (i, j) = split_pair(&p.witness).expect("product witness");
            let p1 = ConsPair::new(i, project(&p.set, 0));
            let p2 = ConsPair::new(j, project(&p.set, 1));
            let (fi, gi) = (f.image(&p1), g.image(&p2));
            fi.iter()
                .flat_map(|l| gi.iter().map(move |r| pair_token(l, r)))
                .collect()
        })
        .collect();
    ApproxMapping::from_images(
        &format!("{}x{}", f.name, g.name),
        src.sys.clone(),
        tgt.sys.clone(),
        rel,
    )
}

/// The mediator into the terminal system: everything relates to the unit
/// token.
pub fn terminal_mediator(a: &Arc<InfoSystem>, t: &Arc<InfoSystem>) -> ApproxMapping {
    let rel = vec![TokenSet::singleton(t.delta().clone()); a.pair_count()];
    ApproxMapping::from_images("bang", a.clone(), t.clone(), rel)
}

/// How uniqueness of the terminal mediator was established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniquenessEvidence {
    /// Every candidate relation was enumerated and filtered; the count of
    /// valid mappings is recorded.
    Powerset { candidates: u64, valid: usize },
    /// The candidate space is too large to sweep; instead the least
    /// relation containing the forced unit entry and closed under the
    /// derivation rules every valid mapping obeys was computed. When that
    /// closure is already the full relation, the full relation is the only
    /// valid mapping.
    ForcedClosure,
}

/// Establishes that the terminal mediator is unique, by powerset filtering
/// when the pool is small and by the forced-closure argument otherwise.
pub fn terminal_mediator_unique(
    a: &Arc<InfoSystem>,
    t: &Arc<InfoSystem>,
    max_bits: u32,
) -> Result<UniquenessEvidence> {
    let bits = (a.pair_count() * t.tokens().len()) as u32;
    if bits <= max_bits {
        let all = enumerate_mappings(a, t, max_bits)?;
        if all.len() != 1 {
            return Err(Error::PreconditionViolated(format!(
                "expected one mediator, found {}",
                all.len()
            )));
        }
        return Ok(UniquenessEvidence::Powerset {
            candidates: 1u64 << bits,
            valid: 1,
        });
    }
    // Every valid mapping contains ((delta, {}), delta') and is closed under
    // witness transfer and set monotonicity; compute the least such
    // relation. If it is already everything, the full relation is the only
    // candidate, and it is valid.
    let mut present = vec![false; a.pair_count()];
    let d0 = ConsPair::new(a.delta().clone(), TokenSet::empty());
    present[a.pair_idx(&d0).ok_or_else(|| {
        Error::PreconditionViolated("source lacks the bottom pair".into())
    })?] = true;
    loop {
        let mut changed = false;
        for k in 0..a.pair_count() {
            if present[k] {
                continue;
            }
            let p = a.pair(k);
            // Set monotonicity: a present pair with the same witness and a
            // smaller set forces this one.
            let forced_mono = a
                .pairs_of_witness(&p.witness)
                .iter()
                .any(|&k2| present[k2] && a.pair(k2).set.is_subset(&p.set));
            // Witness transfer: a present pair with the same set and a
            // witness consistent with this one forces it.
            let forced_transfer = (0..a.pair_count()).any(|k2| {
                present[k2] && {
                    let q = a.pair(k2);
                    q.set == p.set && a.singleton_con(&q.witness, &p.witness)
                }
            });
            if forced_mono || forced_transfer {
                present[k] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if present.iter().all(|&b| b) {
        let full = terminal_mediator(a, t);
        assert!(check_approx(&full).passed());
        Ok(UniquenessEvidence::ForcedClosure)
    } else {
        Err(Error::PreconditionViolated(
            "forced closure did not reach the full relation".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{compose, identity};
    use crate::axioms::{check_axioms, gip_verdict};
    use crate::fixtures::{bfly, flat2, flat2_poset, term};
    use crate::poset::{order_iso, product_poset};
    use crate::state::enumerate_states;

    fn arc(s: InfoSystem) -> Arc<InfoSystem> {
        Arc::new(s)
    }

    #[test]
    fn pair_token_round_trip_with_escapes() {
        let l = Token::new("a.b");
        let r = Token::new("c\\d");
        let t = pair_token(&l, &r);
        assert_eq!(split_pair(&t), Some((l, r)));
        let plain = pair_token(&Token::new("x"), &Token::new("y"));
        assert_eq!(plain.name(), "x.y");
    }

    #[test]
    fn terminal_passes_axioms_and_has_one_state() {
        let t = terminal();
        assert!(check_axioms(&t).passed());
        assert!(gip_verdict(&t).passed());
        let sp = enumerate_states(&t, 16).unwrap();
        assert_eq!(sp.len(), 1);
    }

    #[test]
    fn terminal_mediator_exists_uniquely_for_each_fixture() {
        let t = arc(terminal());
        for sys in [term(), flat2()] {
            let a = arc(sys);
            let bang = terminal_mediator(&a, &t);
            assert!(check_approx(&bang).passed());
            let ev = terminal_mediator_unique(&a, &t, 20).unwrap();
            assert!(matches!(ev, UniquenessEvidence::Powerset { valid: 1, .. }));
        }
        // The butterfly's pool is too large to sweep; the forced-closure
        // argument applies.
        let b = arc(bfly());
        let ev = terminal_mediator_unique(&b, &t, 20).unwrap();
        assert_eq!(ev, UniquenessEvidence::ForcedClosure);
    }

    #[test]
    fn product_with_terminal_is_the_system_itself() {
        let t = arc(terminal());
        let f = arc(flat2());
        let p = product(&f, &t, 16).unwrap();
        assert!(check_axioms(&p.sys).passed());
        assert!(check_approx(&p.pr1).passed());
        assert!(check_approx(&p.pr2).passed());
        let sp = enumerate_states(&p.sys, 16).unwrap();
        let fp = enumerate_states(&f, 16).unwrap();
        assert!(order_iso(&sp.as_poset(), &fp.as_poset()).is_some());
    }

    #[test]
    fn product_of_terminals_is_terminal() {
        let t = arc(terminal());
        let p = product(&t, &t, 16).unwrap();
        assert!(check_axioms(&p.sys).passed());
        let sp = enumerate_states(&p.sys, 16).unwrap();
        assert_eq!(sp.len(), 1);
    }

    #[test]
    fn flat2_squared_states_match_the_product_poset() {
        let f = arc(flat2());
        let p = product(&f, &f, 16).unwrap();
        assert!(check_axioms(&p.sys).passed());
        assert!(gip_verdict(&p.sys).passed());
        let sp = enumerate_states(&p.sys, 16).unwrap();
        let oracle = product_poset(&flat2_poset(), &flat2_poset());
        assert!(order_iso(&sp.as_poset(), &oracle).is_some());
    }

    #[test]
    fn pairing_satisfies_the_projection_equations() {
        let f = arc(flat2());
        let t = arc(terminal());
        let p = product(&f, &t, 16).unwrap();
        let idf = identity(&f);
        let bang = terminal_mediator(&f, &t);
        let m = pairing(&idf, &bang, &p).unwrap();
        assert!(check_approx(&m).passed());
        let back1 = compose(&m, &p.pr1).unwrap();
        let back2 = compose(&m, &p.pr2).unwrap();
        assert_eq!(back1.images(), idf.images());
        assert_eq!(back2.images(), bang.images());
    }

    #[test]
    fn pairing_of_identities_recovers_identity_through_projections() {
        let t = arc(terminal());
        let p = product(&t, &t, 16).unwrap();
        let idt = identity(&t);
        let m = pairing(&idt, &idt, &p).unwrap();
        assert!(check_approx(&m).passed());
        let back = compose(&m, &p.pr1).unwrap();
        assert_eq!(back.images(), idt.images());
    }
}
