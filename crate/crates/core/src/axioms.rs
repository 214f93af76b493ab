//! Decision procedures for the defining conditions of an information system
//! with witnesses, plus the global interpolation property, the derived
//! entailment rules, and the algebraicity / bounded-completeness conditions.
//!
//! Every universally quantified condition is decided by exhaustive
//! enumeration over the stored Con, the token universe, and subsets of
//! entailed sets (sound for conditions whose hypothesis bounds the set, as
//! all of them here do). A failed verdict carries the lexicographically
//! first counterexample; `recheck` re-evaluates the condition at that point.

use std::fmt;

use crate::error::{Error, Result};
use crate::system::{ConsPair, InfoSystem};
use crate::token::{Token, TokenSet};

/// The eleven conditions, numbered by family: 1-6 fix the witness, 7-9
/// govern the interplay between witnesses, 10-11 are interpolation.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub enum AxiomId {
    SelfConsistent = 1,
    SubsetClosure = 2,
    DeltaEntailment = 3,
    EntailConsistency = 4,
    Monotonicity = 5,
    Transitivity = 6,
    WitnessSubsumption = 7,
    WitnessTransfer = 8,
    WitnessConservativity = 9,
    EntailInterpolation = 10,
    WitnessGeneration = 11,
}

pub const ALL_AXIOMS: [AxiomId; 11] = [
    AxiomId::SelfConsistent,
    AxiomId::SubsetClosure,
    AxiomId::DeltaEntailment,
    AxiomId::EntailConsistency,
    AxiomId::Monotonicity,
    AxiomId::Transitivity,
    AxiomId::WitnessSubsumption,
    AxiomId::WitnessTransfer,
    AxiomId::WitnessConservativity,
    AxiomId::EntailInterpolation,
    AxiomId::WitnessGeneration,
];

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            AxiomId::SelfConsistent => "self-consistency",
            AxiomId::SubsetClosure => "subset closure",
            AxiomId::DeltaEntailment => "delta entailment",
            AxiomId::EntailConsistency => "entailed sets consistent",
            AxiomId::Monotonicity => "monotonicity",
            AxiomId::Transitivity => "transitivity",
            AxiomId::WitnessSubsumption => "witness subsumption",
            AxiomId::WitnessTransfer => "witness transfer",
            AxiomId::WitnessConservativity => "witness conservativity",
            AxiomId::EntailInterpolation => "entailment interpolation",
            AxiomId::WitnessGeneration => "witness generation",
        };
        write!(f, "axiom {} ({})", *self as u8, name)
    }
}

/// The quantifier tuple a failed condition was falsified at.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CxItem {
    Tok(Token),
    Set(TokenSet),
    Pair(ConsPair),
}

impl fmt::Display for CxItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CxItem::Tok(t) => write!(f, "{t}"),
            CxItem::Set(s) => write!(f, "{s}"),
            CxItem::Pair(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Counterexample(pub Vec<CxItem>);

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at (")?;
        for (k, it) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{it}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Pass,
    Fail(Counterexample),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    fn fail(items: Vec<CxItem>) -> Verdict {
        Verdict::Fail(Counterexample(items))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail(cx) => write!(f, "FAIL {cx}"),
        }
    }
}

/// Verdicts for the eleven conditions.
#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub verdicts: Vec<(AxiomId, Verdict)>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| v.passed())
    }

    pub fn verdict(&self, id: AxiomId) -> &Verdict {
        &self.verdicts.iter().find(|(a, _)| *a == id).unwrap().1
    }

    pub fn failing(&self) -> Vec<AxiomId> {
        self.verdicts
            .iter()
            .filter(|(_, v)| !v.passed())
            .map(|(a, _)| *a)
            .collect()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, v) in &self.verdicts {
            writeln!(f, "{id}: {v}")?;
        }
        Ok(())
    }
}

fn pair(i: &Token, x: &TokenSet) -> ConsPair {
    ConsPair::new(i.clone(), x.clone())
}

fn check_one(sys: &InfoSystem, id: AxiomId) -> Verdict {
    match id {
        AxiomId::SelfConsistent => {
            for i in sys.tokens() {
                if !sys.is_con_parts(i, &TokenSet::singleton(i.clone())) {
                    return Verdict::fail(vec![CxItem::Tok(i.clone())]);
                }
            }
            Verdict::Pass
        }
        AxiomId::SubsetClosure => {
            for p in sys.pairs() {
                for y in p.set.subsets() {
                    if !sys.is_con_parts(&p.witness, &y) {
                        return Verdict::fail(vec![CxItem::Pair(p.clone()), CxItem::Set(y)]);
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::DeltaEntailment => {
            for i in sys.tokens() {
                if !sys.entails(&pair(i, &TokenSet::empty()), sys.delta()) {
                    return Verdict::fail(vec![CxItem::Tok(i.clone())]);
                }
            }
            Verdict::Pass
        }
        AxiomId::EntailConsistency => {
            for (k, p) in sys.pairs().iter().enumerate() {
                for y in sys.entailed_idx(k).clone().subsets() {
                    if !sys.is_con_parts(&p.witness, &y) {
                        return Verdict::fail(vec![CxItem::Pair(p.clone()), CxItem::Set(y)]);
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::Monotonicity => {
            for (k, p) in sys.pairs().iter().enumerate() {
                for &k2 in sys.pairs_of_witness(&p.witness) {
                    let q = sys.pair(k2);
                    if p.set.is_subset(&q.set) {
                        if let Some(a) = sys
                            .entailed_idx(k)
                            .iter()
                            .find(|a| !sys.entailed_idx(k2).contains(a))
                        {
                            return Verdict::fail(vec![
                                CxItem::Pair(p.clone()),
                                CxItem::Pair(q.clone()),
                                CxItem::Tok(a.clone()),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::Transitivity => {
            for (k, p) in sys.pairs().iter().enumerate() {
                let entailed = sys.entailed_idx(k).clone();
                for y in entailed.subsets() {
                    let q = pair(&p.witness, &y);
                    if let Some(k2) = sys.pair_idx(&q) {
                        if let Some(a) = sys
                            .entailed_idx(k2)
                            .iter()
                            .find(|a| !entailed.contains(a))
                        {
                            return Verdict::fail(vec![
                                CxItem::Pair(p.clone()),
                                CxItem::Set(y),
                                CxItem::Tok(a.clone()),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::WitnessSubsumption => {
            for i in sys.tokens() {
                for j in sys.tokens() {
                    if !sys.singleton_con(i, j) {
                        continue;
                    }
                    for &k in sys.pairs_of_witness(i) {
                        let x = &sys.pair(k).set;
                        if !sys.is_con_parts(j, x) {
                            return Verdict::fail(vec![
                                CxItem::Tok(i.clone()),
                                CxItem::Tok(j.clone()),
                                CxItem::Set(x.clone()),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::WitnessTransfer | AxiomId::WitnessConservativity => {
            for i in sys.tokens() {
                for j in sys.tokens() {
                    if !sys.singleton_con(i, j) {
                        continue;
                    }
                    for &k in sys.pairs_of_witness(i) {
                        let x = &sys.pair(k).set;
                        let pi = sys.pair(k);
                        let pj = pair(j, x);
                        let (from, to) = if id == AxiomId::WitnessTransfer {
                            (pi.clone(), pj.clone())
                        } else {
                            (pj.clone(), pi.clone())
                        };
                        let entailed_from = sys.entailed_set(&from).unwrap_or_default();
                        if let Some(a) = entailed_from.iter().find(|a| !sys.entails(&to, a)) {
                            return Verdict::fail(vec![
                                CxItem::Tok(i.clone()),
                                CxItem::Tok(j.clone()),
                                CxItem::Set(x.clone()),
                                CxItem::Tok(a.clone()),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::EntailInterpolation => {
            for (k, p) in sys.pairs().iter().enumerate() {
                let entailed = sys.entailed_idx(k);
                for a in entailed {
                    let found = sys.pairs_of_witness(&p.witness).iter().any(|&k2| {
                        let z = &sys.pair(k2).set;
                        z.is_subset(entailed) && sys.entailed_idx(k2).contains(a)
                    });
                    if !found {
                        return Verdict::fail(vec![CxItem::Pair(p.clone()), CxItem::Tok(a.clone())]);
                    }
                }
            }
            Verdict::Pass
        }
        AxiomId::WitnessGeneration => {
            for (k, p) in sys.pairs().iter().enumerate() {
                for y in sys.entailed_idx(k).clone().subsets() {
                    let found = sys
                        .entailed_idx(k)
                        .iter()
                        .any(|e| sys.is_con_parts(e, &y));
                    if !found {
                        return Verdict::fail(vec![CxItem::Pair(p.clone()), CxItem::Set(y)]);
                    }
                }
            }
            Verdict::Pass
        }
    }
}

/// Decides all eleven conditions.
pub fn check_axioms(sys: &InfoSystem) -> AxiomReport {
    AxiomReport {
        verdicts: ALL_AXIOMS.iter().map(|&id| (id, check_one(sys, id))).collect(),
    }
}

/// Re-evaluates one condition at a recorded counterexample; used to confirm
/// that every failure is a genuine falsifying instance.
pub fn recheck(sys: &InfoSystem, id: AxiomId, cx: &Counterexample) -> bool {
    use CxItem::*;
    let it = &cx.0;
    match (id, it.as_slice()) {
        (AxiomId::SelfConsistent, [Tok(i)]) => {
            sys.is_con_parts(i, &TokenSet::singleton(i.clone()))
        }
        (AxiomId::SubsetClosure, [Pair(p), Set(y)]) => {
            !(sys.is_con(p) && y.is_subset(&p.set)) || sys.is_con_parts(&p.witness, y)
        }
        (AxiomId::DeltaEntailment, [Tok(i)]) => {
            sys.entails(&pair(i, &TokenSet::empty()), sys.delta())
        }
        (AxiomId::EntailConsistency, [Pair(p), Set(y)]) => {
            !(sys.is_con(p) && sys.entails_set(p, y)) || sys.is_con_parts(&p.witness, y)
        }
        (AxiomId::Monotonicity, [Pair(p), Pair(q), Tok(a)]) => {
            !(sys.is_con(p)
                && sys.is_con(q)
                && p.witness == q.witness
                && p.set.is_subset(&q.set)
                && sys.entails(p, a))
                || sys.entails(q, a)
        }
        (AxiomId::Transitivity, [Pair(p), Set(y), Tok(a)]) => {
            let q = pair(&p.witness, y);
            !(sys.is_con(p) && sys.entails_set(p, y) && sys.entails(&q, a)) || sys.entails(p, a)
        }
        (AxiomId::WitnessSubsumption, [Tok(i), Tok(j), Set(x)]) => {
            !(sys.singleton_con(i, j) && sys.is_con_parts(i, x)) || sys.is_con_parts(j, x)
        }
        (AxiomId::WitnessTransfer, [Tok(i), Tok(j), Set(x), Tok(a)]) => {
            !(sys.singleton_con(i, j) && sys.is_con_parts(i, x) && sys.entails(&pair(i, x), a))
                || sys.entails(&pair(j, x), a)
        }
        (AxiomId::WitnessConservativity, [Tok(i), Tok(j), Set(x), Tok(a)]) => {
            !(sys.singleton_con(i, j) && sys.is_con_parts(i, x) && sys.entails(&pair(j, x), a))
                || sys.entails(&pair(i, x), a)
        }
        (AxiomId::EntailInterpolation, [Pair(p), Tok(a)]) => {
            !(sys.is_con(p) && sys.entails(p, a))
                || sys.pairs_of_witness(&p.witness).iter().any(|&k| {
                    let z = &sys.pair(k).set;
                    sys.entails_set(p, z) && sys.entailed_idx(k).contains(a)
                })
        }
        (AxiomId::WitnessGeneration, [Pair(p), Set(y)]) => {
            !(sys.is_con(p) && sys.entails_set(p, y))
                || sys
                    .entailed_set(p)
                    .unwrap_or_default()
                    .iter()
                    .any(|e| sys.is_con_parts(e, y))
        }
        _ => panic!("counterexample shape does not match {id}"),
    }
}

/// Global interpolation: (i,X) ⊢ F implies some (j,Y) ∈ Con with
/// (i,X) ⊢ (j,Y) and (j,Y) ⊢ F. Requires axioms 4, 5, 7-9 as a
/// precondition; also asserts the equivalence with axioms 10 and 11.
pub fn check_gip(sys: &InfoSystem) -> Result<Verdict> {
    let needed = [
        AxiomId::EntailConsistency,
        AxiomId::Monotonicity,
        AxiomId::WitnessSubsumption,
        AxiomId::WitnessTransfer,
        AxiomId::WitnessConservativity,
    ];
    for id in needed {
        if !check_one(sys, id).passed() {
            return Err(Error::PreconditionViolated(format!(
                "global interpolation requires {id}"
            )));
        }
    }
    let verdict = gip_verdict(sys);
    let local = check_one(sys, AxiomId::EntailInterpolation).passed()
        && check_one(sys, AxiomId::WitnessGeneration).passed();
    assert_eq!(
        verdict.passed(),
        local,
        "global interpolation must agree with axioms 10 and 11"
    );
    Ok(verdict)
}

pub(crate) fn gip_verdict(sys: &InfoSystem) -> Verdict {
    for (k, p) in sys.pairs().iter().enumerate() {
        for f in sys.entailed_idx(k).clone().subsets() {
            let found = sys
                .pairs()
                .iter()
                .any(|q| sys.entails_pair(p, q) && sys.entails_set(q, &f));
            if !found {
                return Verdict::fail(vec![CxItem::Pair(p.clone()), CxItem::Set(f)]);
            }
        }
    }
    Verdict::Pass
}

/// The two derived entailment rules: the set form of interpolation
/// ((i,X) ⊢ F implies some Z ∈ Con(i) with (i,X) ⊢ Z and (i,Z) ⊢ F) and
/// the strengthened transitivity ((i,X) ⊢ (j,Y) and (j,Y) ⊢ a imply
/// (i,X) ⊢ a). Both must hold on validated systems.
pub fn check_derived_rules(sys: &InfoSystem) -> Verdict {
    for (k, p) in sys.pairs().iter().enumerate() {
        for f in sys.entailed_idx(k).clone().subsets() {
            let found = sys.pairs_of_witness(&p.witness).iter().any(|&k2| {
                let z = &sys.pair(k2).set;
                sys.entails_set(p, z) && f.is_subset(sys.entailed_idx(k2))
            });
            if !found {
                return Verdict::fail(vec![CxItem::Pair(p.clone()), CxItem::Set(f)]);
            }
        }
    }
    for p in sys.pairs() {
        for (q, ent_q) in sys.entail_rows() {
            if sys.entails_pair(p, q) {
                if let Some(a) = ent_q.iter().find(|a| !sys.entails(p, a)) {
                    return Verdict::fail(vec![
                        CxItem::Pair(p.clone()),
                        CxItem::Pair(q.clone()),
                        CxItem::Tok(a.clone()),
                    ]);
                }
            }
        }
    }
    Verdict::Pass
}

/// Algebraicity: interpolation through a reflexive pair. Also evaluates the
/// single-token form (interpolation through a self-entailing set with the
/// same witness) and asserts the two verdicts agree.
pub fn check_alg(sys: &InfoSystem) -> Verdict {
    let refl = sys.reflexive_pairs();
    let mut alg = Verdict::Pass;
    'outer: for (k, p) in sys.pairs().iter().enumerate() {
        for f in sys.entailed_idx(k).clone().subsets() {
            let found = refl
                .iter()
                .any(|q| sys.entails_pair(p, q) && sys.entails_set(q, &f));
            if !found {
                alg = Verdict::fail(vec![CxItem::Pair(p.clone()), CxItem::Set(f)]);
                break 'outer;
            }
        }
    }
    let mut salg = true;
    'souter: for (k, p) in sys.pairs().iter().enumerate() {
        for a in sys.entailed_idx(k) {
            let found = sys.pairs_of_witness(&p.witness).iter().any(|&k2| {
                let q = sys.pair(k2);
                sys.entails_set(p, &q.set)
                    && sys.entails_set(q, &q.set)
                    && sys.entailed_idx(k2).contains(a)
            });
            if !found {
                salg = false;
                break 'souter;
            }
        }
    }
    assert_eq!(
        alg.passed(),
        salg,
        "reflexive interpolation must agree with its single-token form"
    );
    alg
}

/// Bounded completeness condition: two witnesses for the same set entail
/// the same tokens.
pub fn check_bc(sys: &InfoSystem) -> Verdict {
    for x in sys.con_sets() {
        let mut witnesses: Vec<&ConsPair> = sys.pairs().iter().filter(|p| p.set == x).collect();
        witnesses.sort();
        for a in 0..witnesses.len() {
            for b in a + 1..witnesses.len() {
                let ea = sys.entailed_set(witnesses[a]).unwrap();
                let eb = sys.entailed_set(witnesses[b]).unwrap();
                if ea != eb {
                    return Verdict::fail(vec![
                        CxItem::Pair(witnesses[a].clone()),
                        CxItem::Pair(witnesses[b].clone()),
                    ]);
                }
            }
        }
    }
    Verdict::Pass
}
