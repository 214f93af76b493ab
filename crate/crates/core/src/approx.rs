//! Approximable mappings: the morphisms between information systems with
//! witnesses. A mapping relates witnessed consistent pairs of the source to
//! tokens of the target and must satisfy nine conditions; the module decides
//! them, evaluates the combined interpolation rules, and provides identity
//! and composition.

use std::fmt;
use std::sync::Arc;

use crate::axioms::{Counterexample, CxItem, Verdict};
use crate::error::{Error, Result};
use crate::system::{ConsPair, InfoSystem};
use crate::token::{Token, TokenSet};

/// The nine defining conditions, in presentation order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MapCondition {
    DeltaPair = 1,
    SetMonotone = 2,
    SourceCut = 3,
    LeftInterpolation = 4,
    TargetCut = 5,
    RightInterpolation = 6,
    WitnessGeneration = 7,
    WitnessTransfer = 8,
    WitnessConservativity = 9,
}

pub const ALL_CONDITIONS: [MapCondition; 9] = [
    MapCondition::DeltaPair,
    MapCondition::SetMonotone,
    MapCondition::SourceCut,
    MapCondition::LeftInterpolation,
    MapCondition::TargetCut,
    MapCondition::RightInterpolation,
    MapCondition::WitnessGeneration,
    MapCondition::WitnessTransfer,
    MapCondition::WitnessConservativity,
];

impl fmt::Display for MapCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MapCondition::DeltaPair => "delta pair",
            MapCondition::SetMonotone => "set monotonicity",
            MapCondition::SourceCut => "source cut",
            MapCondition::LeftInterpolation => "left interpolation",
            MapCondition::TargetCut => "target cut",
            MapCondition::RightInterpolation => "right interpolation",
            MapCondition::WitnessGeneration => "witness generation",
            MapCondition::WitnessTransfer => "witness transfer",
            MapCondition::WitnessConservativity => "witness conservativity",
        };
        write!(f, "condition {} ({})", *self as u8, name)
    }
}

/// A mapping with its full image map stored extensionally.
#[derive(Clone)]
pub struct ApproxMapping {
    pub name: String,
    pub source: Arc<InfoSystem>,
    pub target: Arc<InfoSystem>,
    /// Image per source pair index.
    rel: Vec<TokenSet>,
}

impl PartialEq for ApproxMapping {
    fn eq(&self, other: &ApproxMapping) -> bool {
        *self.source == *other.source && *self.target == *other.target && self.rel == other.rel
    }
}

impl Eq for ApproxMapping {}

impl fmt::Debug for ApproxMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ApproxMapping({})", self.name)
    }
}

impl ApproxMapping {
    pub fn new(
        name: &str,
        source: Arc<InfoSystem>,
        target: Arc<InfoSystem>,
        entries: Vec<(ConsPair, TokenSet)>,
    ) -> Result<ApproxMapping> {
        let mut rel = vec![TokenSet::empty(); source.pair_count()];
        for (p, ts) in entries {
            let Some(k) = source.pair_idx(&p) else {
                return Err(Error::NotConsistent {
                    witness: p.witness,
                    set: p.set,
                });
            };
            if let Some(t) = ts.iter().find(|t| !target.tokens().contains(t)) {
                return Err(Error::UnknownToken(t.clone()));
            }
            rel[k] = rel[k].union(&ts);
        }
        Ok(ApproxMapping {
            name: name.to_string(),
            source,
            target,
            rel,
        })
    }

    pub fn from_images(
        name: &str,
        source: Arc<InfoSystem>,
        target: Arc<InfoSystem>,
        rel: Vec<TokenSet>,
    ) -> ApproxMapping {
        assert_eq!(rel.len(), source.pair_count());
        ApproxMapping {
            name: name.to_string(),
            source,
            target,
            rel,
        }
    }

    /// Image of a source pair by index.
    pub fn image_idx(&self, k: usize) -> &TokenSet {
        &self.rel[k]
    }

    pub fn image(&self, p: &ConsPair) -> TokenSet {
        self.source
            .pair_idx(p)
            .map(|k| self.rel[k].clone())
            .unwrap_or_default()
    }

    /// (i,X) H b.
    pub fn relates(&self, p: &ConsPair, b: &Token) -> bool {
        self.source
            .pair_idx(p)
            .is_some_and(|k| self.rel[k].contains(b))
    }

    /// (i,X) H Y: every member of Y is in the image.
    pub fn relates_set(&self, p: &ConsPair, ys: &TokenSet) -> bool {
        self.source
            .pair_idx(p)
            .is_some_and(|k| ys.is_subset(&self.rel[k]))
    }

    /// (i,X) H (k,Y): the witness and all of Y are in the image.
    pub fn relates_pair(&self, p: &ConsPair, q: &ConsPair) -> bool {
        self.relates(p, &q.witness) && self.relates_set(p, &q.set)
    }

    pub fn images(&self) -> &[TokenSet] {
        &self.rel
    }
}

/// Full report: per-condition verdicts, the combined interpolation rules,
/// and the strengthened target-cut rule.
#[derive(Clone, Debug)]
pub struct MapReport {
    pub verdicts: Vec<(MapCondition, Verdict)>,
    pub combined_left: Verdict,
    pub combined_right: Verdict,
    pub combined_both: Verdict,
    pub strengthened: Verdict,
}

impl MapReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| v.passed())
    }

    pub fn verdict(&self, c: MapCondition) -> &Verdict {
        &self.verdicts.iter().find(|(x, _)| *x == c).unwrap().1
    }
}

impl fmt::Display for MapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, v) in &self.verdicts {
            writeln!(f, "{c}: {v}")?;
        }
        writeln!(f, "combined left rule: {}", self.combined_left)?;
        writeln!(f, "combined right rule: {}", self.combined_right)?;
        writeln!(f, "combined two-sided rule: {}", self.combined_both)?;
        writeln!(f, "strengthened target cut: {}", self.strengthened)
    }
}

fn check_condition(h: &ApproxMapping, c: MapCondition) -> Verdict {
    let src = &*h.source;
    let tgt = &*h.target;
    let fail = |items: Vec<CxItem>| Verdict::Fail(Counterexample(items));
    match c {
        MapCondition::DeltaPair => {
            let p = ConsPair::new(src.delta().clone(), TokenSet::empty());
            if h.relates(&p, tgt.delta()) {
                Verdict::Pass
            } else {
                fail(vec![CxItem::Pair(p)])
            }
        }
        MapCondition::SetMonotone => {
            for (k, p) in src.pairs().iter().enumerate() {
                for &k2 in src.pairs_of_witness(&p.witness) {
                    let q = src.pair(k2);
                    if p.set.is_subset(&q.set) {
                        if let Some(b) = h.rel[k].iter().find(|b| !h.rel[k2].contains(b)) {
                            return fail(vec![
                                CxItem::Pair(p.clone()),
                                CxItem::Pair(q.clone()),
                                CxItem::Tok(b.clone()),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        MapCondition::SourceCut => {
            for (k, p) in src.pairs().iter().enumerate() {
                for &k2 in src.pairs_of_witness(&p.witness) {
                    let q = src.pair(k2);
                    if src.entails_set(p, &q.set) {
                        if let Some(b) = h.rel[k2].iter().find(|b| !h.rel[k].contains(b)) {
                            return fail(vec![
                                CxItem::Pair(p.clone()),
                                CxItem::Pair(q.clone()),
                                CxItem::Tok(b.clone()),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        MapCondition::LeftInterpolation => {
            for (k, p) in src.pairs().iter().enumerate() {
                for b in &h.rel[k] {
                    let found = src.pairs_of_witness(&p.witness).iter().any(|&k2| {
                        src.entails_set(p, &src.pair(k2).set) && h.rel[k2].contains(b)
                    });
                    if !found {
                        return fail(vec![CxItem::Pair(p.clone()), CxItem::Tok(b.clone())]);
                    }
                }
            }
            Verdict::Pass
        }
        MapCondition::TargetCut => {
            for (k, p) in src.pairs().iter().enumerate() {
                for q in tgt.pairs() {
                    if h.rel[k].contains(&q.witness) && q.set.is_subset(&h.rel[k]) {
                        let ent = tgt.entailed_set(q).unwrap();
                        if let Some(b) = ent.iter().find(|b| !h.rel[k].contains(b)) {
                            return fail(vec![
                                CxItem::Pair(p.clone()),
                                CxItem::Pair(q.clone()),
                                CxItem::Tok(b.clone()),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
        MapCondition::RightInterpolation => {
            for (k, p) in src.pairs().iter().enumerate() {
                for b in &h.rel[k] {
                    let found = tgt.pairs().iter().any(|q| {
                        h.rel[k].contains(&q.witness)
                            && q.set.is_subset(&h.rel[k])
                            && tgt.entails(q, b)
                    });
                    if !found {
                        return fail(vec![CxItem::Pair(p.clone()), CxItem::Tok(b.clone())]);
                    }
                }
            }
            Verdict::Pass
        }
        MapCondition::WitnessGeneration => {
            for (k, p) in src.pairs().iter().enumerate() {
                for f in h.rel[k].clone().subsets() {
                    let found = h.rel[k].iter().any(|e| tgt.is_con_parts(e, &f));
                    if !found {
                        return fail(vec![CxItem::Pair(p.clone()), CxItem::Set(f)]);
                    }
                }
            }
            Verdict::Pass
        }
        MapCondition::WitnessTransfer | MapCondition::WitnessConservativity => {
            for i in src.tokens() {
                for j in src.tokens() {
                    if !src.singleton_con(i, j) {
                        continue;
                    }
                    for &k in src.pairs_of_witness(i) {
                        let x = &src.pair(k).set;
                        let pi = src.pair(k).clone();
                        let pj = ConsPair::new(j.clone(), x.clone());
                        let (from, to) = if c == MapCondition::WitnessTransfer {
                            (pi, pj)
                        } else {
                            (pj, pi)
                        };
                        let img = h.image(&from);
                        if let Some(b) = img.iter().find(|b| !h.relates(&to, b)) {
                            return fail(vec![
                                CxItem::Tok(i.clone()),
                                CxItem::Tok(j.clone()),
                                CxItem::Set(x.clone()),
                                CxItem::Tok(b.clone()),
                            ]);
                        }
                    }
                }
            }
            Verdict::Pass
        }
    }
}

/// (i,X) H F implies a source pair entailed by (i,X) whose image covers F.
fn combined_left(h: &ApproxMapping) -> Verdict {
    let src = &*h.source;
    for (k, p) in src.pairs().iter().enumerate() {
        for f in h.rel[k].clone().subsets() {
            let found = src
                .pairs()
                .iter()
                .enumerate()
                .any(|(k2, q)| src.entails_pair(p, q) && f.is_subset(&h.rel[k2]));
            if !found {
                return Verdict::Fail(Counterexample(vec![
                    CxItem::Pair(p.clone()),
                    CxItem::Set(f),
                ]));
            }
        }
    }
    Verdict::Pass
}

/// (i,X) H F implies a target pair inside the image entailing F.
fn combined_right(h: &ApproxMapping) -> Verdict {
    let src = &*h.source;
    let tgt = &*h.target;
    for (k, p) in src.pairs().iter().enumerate() {
        for f in h.rel[k].clone().subsets() {
            let found = tgt.pairs().iter().any(|q| {
                h.rel[k].contains(&q.witness)
                    && q.set.is_subset(&h.rel[k])
                    && tgt.entails_set(q, &f)
            });
            if !found {
                return Verdict::Fail(Counterexample(vec![
                    CxItem::Pair(p.clone()),
                    CxItem::Set(f),
                ]));
            }
        }
    }
    Verdict::Pass
}

/// The two-sided rule chaining both interpolations.
fn combined_both(h: &ApproxMapping) -> Verdict {
    let src = &*h.source;
    let tgt = &*h.target;
    for (k, p) in src.pairs().iter().enumerate() {
        for f in h.rel[k].clone().subsets() {
            let found = src.pairs().iter().enumerate().any(|(k2, c)| {
                src.entails_pair(p, c)
                    && tgt.pairs().iter().any(|e| {
                        h.rel[k2].contains(&e.witness)
                            && e.set.is_subset(&h.rel[k2])
                            && tgt.entails_set(e, &f)
                    })
            });
            if !found {
                return Verdict::Fail(Counterexample(vec![
                    CxItem::Pair(p.clone()),
                    CxItem::Set(f),
                ]));
            }
        }
    }
    Verdict::Pass
}

/// (i,X) ⊢ (j,Y) and (j,Y) H b imply (i,X) H b.
fn strengthened(h: &ApproxMapping) -> Verdict {
    let src = &*h.source;
    for p in src.pairs() {
        for (k2, q) in src.pairs().iter().enumerate() {
            if src.entails_pair(p, q) {
                if let Some(b) = h.rel[k2].iter().find(|b| !h.relates(p, b)) {
                    return Verdict::Fail(Counterexample(vec![
                        CxItem::Pair(p.clone()),
                        CxItem::Pair(q.clone()),
                        CxItem::Tok(b.clone()),
                    ]));
                }
            }
        }
    }
    Verdict::Pass
}

/// Decides all nine conditions and the combined rules, asserting the
/// equivalences between them: the left rule matches left interpolation plus
/// conservativity (given set monotonicity, source cut and witness
/// transfer), the right rule matches right interpolation plus witness
/// generation, and the two-sided rule matches the conjunction of both.
pub fn check_approx(h: &ApproxMapping) -> MapReport {
    let verdicts: Vec<(MapCondition, Verdict)> = ALL_CONDITIONS
        .iter()
        .map(|&c| (c, check_condition(h, c)))
        .collect();
    let get = |c: MapCondition| verdicts.iter().find(|(x, _)| *x == c).unwrap().1.passed();
    let cl = combined_left(h);
    let cr = combined_right(h);
    let cb = combined_both(h);
    if get(MapCondition::SetMonotone)
        && get(MapCondition::SourceCut)
        && get(MapCondition::WitnessTransfer)
    {
        assert_eq!(
            cl.passed(),
            get(MapCondition::LeftInterpolation) && get(MapCondition::WitnessConservativity),
            "combined left rule must match left interpolation plus conservativity"
        );
    }
    assert_eq!(
        cr.passed(),
        get(MapCondition::RightInterpolation) && get(MapCondition::WitnessGeneration),
        "combined right rule must match right interpolation plus witness generation"
    );
    if cl.passed() && cr.passed() {
        assert!(
            cb.passed(),
            "one-sided rules must chain into the two-sided rule"
        );
    }
    // The converse needs cut and transfer as background, exactly like the
    // left rule needs its background conditions.
    if get(MapCondition::SourceCut)
        && get(MapCondition::TargetCut)
        && get(MapCondition::WitnessTransfer)
    {
        assert_eq!(
            cb.passed(),
            cl.passed() && cr.passed(),
            "two-sided rule must match the conjunction of the one-sided rules"
        );
    }
    let st = strengthened(h);
    let all9 = verdicts.iter().all(|(_, v)| v.passed());
    if all9 {
        assert!(
            st.passed(),
            "strengthened target cut must hold on valid mappings"
        );
    }
    MapReport {
        verdicts,
        combined_left: cl,
        combined_right: cr,
        combined_both: cb,
        strengthened: st,
    }
}

/// Entailment as a mapping of a system into itself.
pub fn identity(a: &Arc<InfoSystem>) -> ApproxMapping {
    let rel = (0..a.pair_count())
        .map(|k| a.entailed_idx(k).clone())
        .collect();
    ApproxMapping::from_images(&format!("id_{}", a.name()), a.clone(), a.clone(), rel)
}

/// Relational composition in diagram order: (i,X) relates to c when some
/// target pair of h is covered by h's image and relates to c through g.
pub fn compose(h: &ApproxMapping, g: &ApproxMapping) -> Result<ApproxMapping> {
    if *h.target != *g.source {
        return Err(Error::SystemMismatch(format!(
            "cannot compose {} with {}",
            h.name, g.name
        )));
    }
    let mid = &*h.target;
    let rel = (0..h.source.pair_count())
        .map(|k| {
            let p = h.source.pair(k);
            g.target
                .tokens()
                .iter()
                .filter(|c| {
                    mid.pairs()
                        .iter()
                        .any(|q| h.relates_pair(p, q) && g.relates(q, c))
                })
                .cloned()
                .collect()
        })
        .collect();
    Ok(ApproxMapping::from_images(
        &format!("{}.{}", h.name, g.name),
        h.source.clone(),
        g.target.clone(),
        rel,
    ))
}

/// Entailment transports along witness equivalence: i ~ j [X] and
/// (i,X) H b imply (j,X) H b. Verified for all instances.
pub fn transport_along_equiv(h: &ApproxMapping) -> Verdict {
    let src = &*h.source;
    for x in src.con_sets() {
        for i in src.tokens() {
            for j in src.tokens() {
                if !src.witness_equiv(i, j, &x) {
                    continue;
                }
                let pi = ConsPair::new(i.clone(), x.clone());
                let pj = ConsPair::new(j.clone(), x.clone());
                if let Some(b) = h.image(&pi).iter().find(|b| !h.relates(&pj, b)) {
                    return Verdict::Fail(Counterexample(vec![
                        CxItem::Tok(i.clone()),
                        CxItem::Tok(j.clone()),
                        CxItem::Set(x.clone()),
                        CxItem::Tok(b.clone()),
                    ]));
                }
            }
        }
    }
    Verdict::Pass
}

/// All approximable mappings between two systems, by powerset filtering of
/// candidate relations. The pool is |Con| x |A'| bits; errors above the
/// budget.
pub fn enumerate_mappings(
    a: &Arc<InfoSystem>,
    b: &Arc<InfoSystem>,
    max_bits: u32,
) -> Result<Vec<ApproxMapping>> {
    let bits = (a.pair_count() * b.tokens().len()) as u32;
    if bits > max_bits {
        return Err(Error::BudgetExceeded(format!(
            "mapping enumeration over {bits} bits (budget {max_bits})"
        )));
    }
    let toks: Vec<Token> = b.tokens().iter().cloned().collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << bits {
        let rel: Vec<TokenSet> = (0..a.pair_count())
            .map(|k| {
                toks.iter()
                    .enumerate()
                    .filter(|(t, _)| mask >> (k * toks.len() + t) & 1 == 1)
                    .map(|(_, tok)| tok.clone())
                    .collect()
            })
            .collect();
        let h = ApproxMapping::from_images(&format!("cand{mask}"), a.clone(), b.clone(), rel);
        if check_approx(&h).passed() {
            out.push(h);
        }
    }
    Ok(out)
}
