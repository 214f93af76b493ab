//! States of a function space as approximable mappings: the two-way
//! translation between them, the order isomorphism with the monotone map
//! space, the evaluation mapping, currying, and the equations that make
//! the whole category Cartesian closed — all verified instance-wise.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::approx::{check_approx, enumerate_mappings, ApproxMapping};
use crate::error::{Error, Result};
use crate::expspace::{profile_le, ExpSpace, Profile};
use crate::product::{pair_token, split_pair, ProductSystem};
use crate::state::{enumerate_states, is_state, State, StatePoset};
use crate::system::{ConsPair, InfoSystem};
use crate::token::{Token, TokenSet};

/// A state of a function space, as sorted token indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ExpState(pub Vec<usize>);

impl ExpState {
    fn new(mut v: Vec<usize>) -> ExpState {
        v.sort_unstable();
        v.dedup();
        ExpState(v)
    }

    pub fn contains(&self, t: usize) -> bool {
        self.0.binary_search(&t).is_ok()
    }

    pub fn le(&self, other: &ExpState) -> bool {
        self.0.iter().all(|t| other.contains(*t))
    }
}

/// Statehood of a token set of the function space. Finite consistency
/// instantiates at the set itself (it is its own largest finite subset),
/// derivability uses the whole set as the witnessing subset (lossless by
/// set monotonicity of entailment), and entailment closure sweeps the
/// achievable sub-profiles.
pub fn is_exp_state(space: &ExpSpace, f: &ExpState) -> bool {
    let members = &f.0;
    let (union, pid) = space.union_profile(members);
    // Heads of the set able to witness the whole of it.
    let witnesses: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&i| {
            members.iter().all(|&m| space.ok1(i, m)) && space.ok2(i, &union, pid)
        })
        .collect();
    if witnesses.is_empty() {
        return false;
    }
    let derivable = members.iter().all(|&t| {
        witnesses
            .iter()
            .any(|&i| space.entails_profile(i, &union, pid, t))
    });
    if !derivable {
        return false;
    }
    for &i in members {
        let pool: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&m| space.ok1(i, m))
            .collect();
        for (p, qid, _) in space.closure_of(&pool) {
            if !space.ok2(i, &p, qid) {
                continue;
            }
            if space.entailed_of(i, &p, qid).iter().any(|t| !f.contains(*t)) {
                return false;
            }
        }
    }
    true
}

/// The mapping carried by a state: the union of the families of its tokens.
pub fn am(space: &ExpSpace, f: &ExpState) -> ApproxMapping {
    let mut rel = vec![TokenSet::empty(); space.src.pair_count()];
    for &t in &f.0 {
        for c in &space.token(t).v {
            let k = space.src.pair_idx(&c.pair).expect("family pair in Con");
            rel[k] = rel[k].insert(c.tok.clone());
        }
    }
    ApproxMapping::from_images("am", space.src.clone(), space.tgt.clone(), rel)
}

/// The state carried by a mapping: every token whose family sits inside the
/// mapping and whose associate entries the mapping matches up to
/// equivalence over the activated right-hand tokens.
pub fn st(space: &ExpSpace, h: &ApproxMapping) -> ExpState {
    let picked: Vec<usize> = (0..space.token_count())
        .filter(|&t| {
            let tok = space.token(t);
            tok.v.iter().all(|c| h.relates(&c.pair, &c.tok))
                && tok.w.iter().all(|c| {
                    let spec = crate::witness::spectrum(&space.src, &c.pair, &tok.v);
                    space.tgt.tokens().iter().any(|j| {
                        h.relates(&c.pair, j) && space.tgt.witness_equiv(j, &c.tok, &spec.rs)
                    })
                })
        })
        .collect();
    ExpState::new(picked)
}

/// All states of the function space, enumerated through the mappings they
/// correspond to.
pub fn exp_states(space: &ExpSpace, max_bits: u32) -> Result<Vec<ExpState>> {
    let maps = enumerate_mappings(&space.src, &space.tgt, max_bits)?;
    let mut out: Vec<ExpState> = maps.iter().map(|h| st(space, h)).collect();
    out.sort();
    out.dedup();
    assert_eq!(out.len(), maps.len(), "distinct mappings give distinct states");
    for f in &out {
        assert!(is_exp_state(space, f), "carried set must be a state");
    }
    Ok(out)
}

/// Round-trip evidence between states and mappings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundtripReport {
    pub states: usize,
    pub mappings: usize,
}

/// Verifies both round trips on every state and every mapping of the pair.
pub fn roundtrips(space: &ExpSpace, max_bits: u32) -> Result<RoundtripReport> {
    let maps = enumerate_mappings(&space.src, &space.tgt, max_bits)?;
    let states = exp_states(space, max_bits)?;
    for h in &maps {
        let f = st(space, h);
        let back = am(space, &f);
        if back.images() != h.images() {
            return Err(Error::PreconditionViolated(format!(
                "mapping round trip failed for {}",
                h.name
            )));
        }
    }
    for f in &states {
        let h = am(space, f);
        if &st(space, &h) != f {
            return Err(Error::PreconditionViolated("state round trip failed".into()));
        }
    }
    Ok(RoundtripReport {
        states: states.len(),
        mappings: maps.len(),
    })
}

/// The state function of a mapping: x collects every target token some
/// witnessed pair inside x relates to.
pub fn l_of_h(h: &ApproxMapping, x: &State) -> State {
    let out: TokenSet = h
        .source
        .pairs()
        .iter()
        .enumerate()
        .filter(|(_, p)| x.0.contains(&p.witness) && p.set.is_subset(&x.0))
        .fold(TokenSet::empty(), |acc, (k, _)| acc.union(h.image_idx(k)));
    let s = State(out);
    debug_assert!(is_state(&h.target, &s.0).is_state());
    s
}

/// A monotone map between two state posets, tabulated.
pub type StateMap = BTreeMap<State, State>;

/// The mapping of a monotone state function: (i,X) relates to b exactly
/// when b lies in the image of the principal state of (i,X).
pub fn h_of_g(a: &Arc<InfoSystem>, b: &Arc<InfoSystem>, g: &StateMap) -> ApproxMapping {
    let rel = (0..a.pair_count())
        .map(|k| {
            let principal = State(a.entailed_idx(k).clone());
            g[&principal].0.clone()
        })
        .collect();
    ApproxMapping::from_images("h_of_g", a.clone(), b.clone(), rel)
}

/// All monotone maps between two state posets.
pub fn monotone_state_maps(sp: &StatePoset, tq: &StatePoset) -> Vec<StateMap> {
    let n = sp.len();
    let m = tq.len();
    let mut out = Vec::new();
    let mut counter = vec![0usize; n];
    loop {
        let monotone = (0..n).all(|i| {
            (0..n).all(|j| {
                !sp.le_idx(i, j)
                    || tq.states()[counter[i]].0.is_subset(&tq.states()[counter[j]].0)
            })
        });
        if monotone {
            out.push(
                (0..n)
                    .map(|i| (sp.states()[i].clone(), tq.states()[counter[i]].clone()))
                    .collect(),
            );
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            counter[i] += 1;
            if counter[i] < m {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

/// The monotone state function of a function-space state.
pub fn fct(space: &ExpSpace, f: &ExpState, sp: &StatePoset) -> StateMap {
    let h = am(space, f);
    sp.states()
        .iter()
        .map(|x| (x.clone(), l_of_h(&h, x)))
        .collect()
}

/// The function-space state of a monotone state function.
pub fn st_of_mono(space: &ExpSpace, g: &StateMap) -> ExpState {
    st(space, &h_of_g(&space.src, &space.tgt, g))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoReport {
    pub states: usize,
    pub functions: usize,
}

/// fct and st are mutually inverse order isomorphisms between the
/// function-space states and the pointwise-ordered monotone maps; includes
/// monotonicity of st and preservation of joins of chains.
pub fn fct_st_iso(space: &ExpSpace, max_bits: u32) -> Result<IsoReport> {
    let sp = enumerate_states(&space.src, 16)?;
    let tq = enumerate_states(&space.tgt, 16)?;
    let states = exp_states(space, max_bits)?;
    let monos = monotone_state_maps(&sp, &tq);
    let mapped: Vec<StateMap> = states.iter().map(|f| fct(space, f, &sp)).collect();
    for g in &monos {
        if !mapped.contains(g) {
            return Err(Error::PreconditionViolated(
                "a monotone function is not in the image of fct".into(),
            ));
        }
        if &fct(space, &st_of_mono(space, g), &sp) != g {
            return Err(Error::PreconditionViolated(
                "fct of st does not recover the function".into(),
            ));
        }
    }
    for (f, g) in states.iter().zip(&mapped) {
        if &st_of_mono(space, g) != f {
            return Err(Error::PreconditionViolated(
                "st of fct does not recover the state".into(),
            ));
        }
    }
    let le_fun =
        |g1: &StateMap, g2: &StateMap| g1.iter().all(|(x, y)| y.0.is_subset(&g2[x].0));
    for (f1, g1) in states.iter().zip(&mapped) {
        for (f2, g2) in states.iter().zip(&mapped) {
            assert_eq!(f1.le(f2), le_fun(g1, g2), "fct must be an order isomorphism");
        }
    }
    for g1 in &monos {
        for g2 in &monos {
            if le_fun(g1, g2) {
                let lo = st_of_mono(space, g1);
                let hi = st_of_mono(space, g2);
                assert!(lo.le(&hi), "st must be monotone");
                // A finite chain's join is its top; st preserves it.
                let both = ExpState::new(lo.0.iter().chain(hi.0.iter()).copied().collect());
                assert_eq!(both, hi, "st must preserve joins of chains");
            }
        }
    }
    Ok(IsoReport {
        states: states.len(),
        functions: monos.len(),
    })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// An abstract family over the product of a function space with its source
/// system: the source-token part as a set, the function-space part as a
/// profile with one realizing family. A set of pairs has both projections
/// empty or both non-empty; `realizable` captures that side condition.
#[derive(Clone, Debug)]
struct ZAbs {
    s: TokenSet,
    fam: Vec<usize>,
    profile: Profile,
    pid: u32,
}

fn realizable(z: &ZAbs, has_empty_profile: bool) -> bool {
    if z.s.is_empty() {
        z.fam.is_empty()
    } else {
        !z.fam.is_empty() || has_empty_profile
    }
}

/// The evaluation relation of a function space: source is the product of
/// the space with its own source system, target is the space's target.
pub struct EvMap {
    pub exp: Arc<ExpSpace>,
}

impl fmt::Debug for EvMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EvMap({:?})", self.exp)
    }
}

pub fn ev_mapping(exp: &Arc<ExpSpace>) -> EvMap {
    EvMap { exp: exp.clone() }
}

impl EvMap {
    /// Ev at head (g, a) against an abstract family: the head token's
    /// lookup witness at (a, pr2) entails b from the activated image union.
    fn value(&self, g: usize, a: &Token, z: &ZAbs, b: &Token) -> bool {
        let anchor = ConsPair::new(a.clone(), z.s.clone());
        let Some(k) = self.exp.src.pair_idx(&anchor) else {
            return false;
        };
        let head = ConsPair::new(self.exp.lookup_witness(g, k), z.profile[k].clone());
        self.exp.tgt.entails(&head, b)
    }

    fn consistent(&self, g: usize, a: &Token, z: &ZAbs) -> bool {
        self.exp.src.is_con_parts(a, &z.s)
            && z.fam.iter().all(|&m| self.exp.ok1(g, m))
            && self.exp.ok2(g, &z.profile, z.pid)
    }

    /// Whether the head's pool offers a member with an all-empty profile
    /// (needed to realize a non-empty family with the empty profile).
    fn has_empty_profile(&self, pool: &[usize]) -> bool {
        pool.iter()
            .any(|&m| self.exp.profile_of(m).iter().all(|s| s.is_empty()))
    }

    /// All realizable abstract families consistent with head (g, a).
    fn z_abstracts(&self, g: usize, a: &Token) -> Vec<ZAbs> {
        let pool = self.exp.pool(g);
        let has_empty = self.has_empty_profile(&pool);
        let mut out = Vec::new();
        for &k in self.exp.src.pairs_of_witness(a) {
            let s = self.exp.src.pair(k).set.clone();
            for (p, pid, fam) in self.exp.closure_of(&pool) {
                if !self.exp.ok2(g, &p, pid) {
                    continue;
                }
                let z = ZAbs {
                    s: s.clone(),
                    fam,
                    profile: p,
                    pid,
                };
                if realizable(&z, has_empty) {
                    out.push(z);
                }
            }
        }
        out
    }

    /// Concrete evaluation on explicit pairs: z is a finite set of
    /// (space token, source token) pairs.
    pub fn relates(
        &self,
        g: &crate::associate::ExpToken,
        a: &Token,
        z: &[(crate::associate::ExpToken, Token)],
        b: &Token,
    ) -> Result<bool> {
        let gi = self
            .exp
            .token_idx(g)
            .ok_or_else(|| Error::WitnessInvalid("unknown head token".into()))?;
        let mut fam = Vec::new();
        let mut s = TokenSet::empty();
        for (t, x) in z {
            fam.push(
                self.exp
                    .token_idx(t)
                    .ok_or_else(|| Error::WitnessInvalid("unknown member token".into()))?,
            );
            s = s.insert(x.clone());
        }
        let (profile, pid) = self.exp.union_profile(&fam);
        let zabs = ZAbs { s, fam, profile, pid };
        if !self.consistent(gi, a, &zabs) {
            return Ok(false);
        }
        Ok(self.value(gi, a, &zabs, b))
    }

    /// Materialises the evaluation relation on an extensional product of
    /// the (extensionalised) function space with the source system; used to
    /// cross-check the abstract machinery on tiny instances.
    pub fn as_mapping_on(&self, prod: &ProductSystem) -> Result<ApproxMapping> {
        let exp = &self.exp;
        let rel = (0..prod.sys.pair_count())
            .map(|pk| {
                let p = prod.sys.pair(pk);
                let (gname, a) = split_pair(&p.witness).expect("product witness");
                let g = name_to_idx(exp, &gname)?;
                let mut fam = Vec::new();
                let mut s = TokenSet::empty();
                for t in &p.set {
                    let (tn, x) = split_pair(t).expect("product token");
                    fam.push(name_to_idx(exp, &tn)?);
                    s = s.insert(x);
                }
                let (profile, pid) = exp.union_profile(&fam);
                let z = ZAbs { s, fam, profile, pid };
                Ok(exp
                    .tgt
                    .tokens()
                    .iter()
                    .filter(|b| self.value(g, &a, &z, b))
                    .cloned()
                    .collect())
            })
            .collect::<Result<Vec<TokenSet>>>()?;
        Ok(ApproxMapping::from_images(
            "ev",
            prod.sys.clone(),
            exp.tgt.clone(),
            rel,
        ))
    }
}

fn name_to_idx(exp: &ExpSpace, name: &Token) -> Result<usize> {
    let s = name.name();
    s.strip_prefix('e')
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|&i| i < exp.token_count())
        .ok_or_else(|| Error::WitnessInvalid(format!("{s} is not a space token name")))
}

/// Verifies the nine mapping conditions for the evaluation relation, over
/// abstract families on its product source.
pub fn check_ev(ev: &EvMap) -> Result<()> {
    let exp = &ev.exp;
    let asys = &exp.src;
    let tgt = &exp.tgt;
    // Unit entry.
    {
        let empty = exp.empty_profile();
        let pid = exp.intern_profile(&empty);
        let z = ZAbs {
            s: TokenSet::empty(),
            fam: vec![],
            profile: empty,
            pid,
        };
        if !ev.value(exp.delta_idx(), asys.delta(), &z, tgt.delta()) {
            return Err(Error::PreconditionViolated(
                "evaluation misses the unit entry".into(),
            ));
        }
    }
    let heads: Vec<(usize, Token)> = exp
        .behaviour_classes()
        .iter()
        .flat_map(|(g, _)| asys.tokens().iter().map(move |a| (*g, a.clone())))
        .collect();
    for (g, a) in &heads {
        let zs = ev.z_abstracts(*g, a);
        // Set monotonicity.
        for z1 in &zs {
            for z2 in &zs {
                if z1.s.is_subset(&z2.s) && profile_le(&z1.profile, &z2.profile) {
                    for b in tgt.tokens() {
                        if ev.value(*g, a, z1, b) && !ev.value(*g, a, z2, b) {
                            return Err(Error::PreconditionViolated(format!(
                                "evaluation not monotone at head ({}, {a})",
                                exp.token_name(*g)
                            )));
                        }
                    }
                }
            }
        }
        for z in &zs {
            let image: TokenSet = tgt
                .tokens()
                .iter()
                .filter(|b| ev.value(*g, a, z, b))
                .cloned()
                .collect();
            // The entailed rectangle of ((g,a), z).
            let k = asys
                .pair_idx(&ConsPair::new(a.clone(), z.s.clone()))
                .expect("abstract families are consistent");
            let e_src = asys.entailed_idx(k).clone();
            let e_exp = exp.entailed_of(*g, &z.profile, z.pid);
            // Families inside the rectangle, consistent with (g, a) or any
            // entailed head.
            let interp_heads: Vec<(usize, Token)> = e_exp
                .iter()
                .flat_map(|&g2| e_src.iter().map(move |a2| (g2, a2.clone())))
                .collect();
            let sub_zs = |g2: usize| -> Vec<(TokenSet, Vec<usize>, Profile, u32)> {
                let pool: Vec<usize> = e_exp
                    .iter()
                    .copied()
                    .filter(|&m| exp.ok1(g2, m))
                    .collect();
                let has_empty = ev.has_empty_profile(&pool);
                let mut out = Vec::new();
                for (p2, pid2, fam2) in exp.closure_of(&pool) {
                    if !exp.ok2(g2, &p2, pid2) {
                        continue;
                    }
                    for a2k in asys.pairs() {
                        if !e_src.contains(&a2k.witness) || !a2k.set.is_subset(&e_src) {
                            continue;
                        }
                        let z2 = ZAbs {
                            s: a2k.set.clone(),
                            fam: fam2.clone(),
                            profile: p2.clone(),
                            pid: pid2,
                        };
                        if realizable(&z2, has_empty) {
                            out.push((a2k.set.clone(), fam2.clone(), p2.clone(), pid2));
                        }
                    }
                }
                out
            };
            // Source cut: an entailed family over the same head derives
            // nothing new.
            for (s2, fam2, p2, pid2) in sub_zs(*g) {
                let z2 = ZAbs {
                    s: s2,
                    fam: fam2,
                    profile: p2,
                    pid: pid2,
                };
                // The same witness pair (g, a) anchors z2.
                if !asys.is_con_parts(a, &z2.s) {
                    continue;
                }
                for b in tgt.tokens() {
                    if ev.value(*g, a, &z2, b) && !image.contains(b) {
                        return Err(Error::PreconditionViolated(format!(
                            "source cut fails for evaluation at ({}, {a})",
                            exp.token_name(*g)
                        )));
                    }
                }
            }
            // Left interpolation: some entailed head covers the image.
            let mut interp_ok = image.is_empty();
            'li: for (g2, a2) in &interp_heads {
                for (s2, fam2, p2, pid2) in sub_zs(*g2) {
                    if !asys.is_con_parts(a2, &s2) {
                        continue;
                    }
                    let z2 = ZAbs {
                        s: s2,
                        fam: fam2,
                        profile: p2,
                        pid: pid2,
                    };
                    if ev.consistent(*g2, a2, &z2)
                        && image.iter().all(|b| ev.value(*g2, a2, &z2, b))
                    {
                        interp_ok = true;
                        break 'li;
                    }
                }
            }
            if !interp_ok {
                return Err(Error::PreconditionViolated(format!(
                    "left interpolation fails for evaluation at ({}, {a})",
                    exp.token_name(*g)
                )));
            }
            // Target side: right interpolation, witness generation and
            // target cut against the extensional target.
            for f in image.subsets() {
                let right = tgt.pairs().iter().any(|q| {
                    image.contains(&q.witness)
                        && q.set.is_subset(&image)
                        && tgt.entails_set(q, &f)
                });
                if !right {
                    return Err(Error::PreconditionViolated(format!(
                        "right interpolation fails for evaluation at ({}, {a})",
                        exp.token_name(*g)
                    )));
                }
                if !image.iter().any(|e| tgt.is_con_parts(e, &f)) {
                    return Err(Error::PreconditionViolated(format!(
                        "witness generation fails for evaluation at ({}, {a})",
                        exp.token_name(*g)
                    )));
                }
            }
            for q in tgt.pairs() {
                if image.contains(&q.witness) && q.set.is_subset(&image) {
                    let ent = tgt.entailed_set(q).unwrap();
                    if !ent.is_subset(&image) {
                        return Err(Error::PreconditionViolated(format!(
                            "target cut fails for evaluation at ({}, {a})",
                            exp.token_name(*g)
                        )));
                    }
                }
            }
        }
    }
    // Witness transfer and conservativity across product heads.
    for (g, a) in &heads {
        for (g2, a2) in &heads {
            if !(exp.con_members(*g2, &[*g]) && asys.singleton_con(a, a2)) {
                continue;
            }
            for z in &ev.z_abstracts(*g, a) {
                let z2_ok = ev.consistent(*g2, a2, z);
                for b in tgt.tokens() {
                    if ev.value(*g, a, z, b) && !(z2_ok && ev.value(*g2, a2, z, b)) {
                        return Err(Error::PreconditionViolated(format!(
                            "witness transfer fails between ({}, {a}) and ({}, {a2})",
                            exp.token_name(*g),
                            exp.token_name(*g2)
                        )));
                    }
                    if z2_ok && ev.value(*g2, a2, z, b) && !ev.value(*g, a, z, b) {
                        return Err(Error::PreconditionViolated(format!(
                            "witness conservativity fails between ({}, {a}) and ({}, {a2})",
                            exp.token_name(*g),
                            exp.token_name(*g2)
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Currying
// ---------------------------------------------------------------------------

/// A mapping whose target is a function space, stored extensionally over
/// the source pairs as sets of space token indices.
pub struct ExpTargetMapping {
    pub name: String,
    pub source: Arc<InfoSystem>,
    pub exp: Arc<ExpSpace>,
    rel: Vec<Vec<usize>>,
}

impl PartialEq for ExpTargetMapping {
    fn eq(&self, other: &ExpTargetMapping) -> bool {
        *self.source == *other.source && self.rel == other.rel
    }
}

impl Eq for ExpTargetMapping {}

impl fmt::Debug for ExpTargetMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExpTargetMapping({})", self.name)
    }
}

impl ExpTargetMapping {
    pub fn images(&self) -> &[Vec<usize>] {
        &self.rel
    }
}

/// Builds the product pair ((a,i'), S x X).
fn prod_pair(a: &Token, s: &TokenSet, i2: &Token, x: &TokenSet) -> ConsPair {
    let set: TokenSet = s
        .iter()
        .flat_map(|l| x.iter().map(move |r| pair_token(l, r)))
        .collect();
    ConsPair::new(pair_token(a, i2), set)
}

/// The currying of a mapping out of a product: (a,S) relates to a token of
/// the function space over (A', A'') when the mapping validates the token's
/// family pointwise and covers each associate entry up to equivalence over
/// its activated right-hand tokens.
pub fn lambda(
    h: &ApproxMapping,
    a: &Arc<InfoSystem>,
    aprime: &Arc<InfoSystem>,
    exp: &Arc<ExpSpace>,
) -> ExpTargetMapping {
    let a2 = &exp.tgt;
    let rel = (0..a.pair_count())
        .map(|k| {
            let p = a.pair(k);
            (0..exp.token_count())
                .filter(|&t| {
                    let tok = exp.token(t);
                    tok.v.iter().all(|c| {
                        h.relates(
                            &prod_pair(&p.witness, &p.set, &c.pair.witness, &c.pair.set),
                            &c.tok,
                        )
                    }) && tok.w.iter().all(|c| {
                        let spec = crate::witness::spectrum(aprime, &c.pair, &tok.v);
                        let pp = prod_pair(&p.witness, &p.set, &c.pair.witness, &c.pair.set);
                        a2.tokens()
                            .iter()
                            .any(|j| h.relates(&pp, j) && a2.witness_equiv(j, &c.tok, &spec.rs))
                    })
                })
                .collect()
        })
        .collect();
    ExpTargetMapping {
        name: format!("lambda({})", h.name),
        source: a.clone(),
        exp: exp.clone(),
        rel,
    }
}

/// Nine-condition check for a mapping into a function space; source-side
/// conditions are extensional, target-side ones sweep achievable abstract
/// families inside each image.
pub fn check_exp_target(m: &ExpTargetMapping) -> Result<()> {
    let src = &m.source;
    let exp = &m.exp;
    let d0 = ConsPair::new(src.delta().clone(), TokenSet::empty());
    let k0 = src
        .pair_idx(&d0)
        .ok_or_else(|| Error::PreconditionViolated("source lacks the bottom pair".into()))?;
    if !m.rel[k0].contains(&exp.delta_idx()) {
        return Err(Error::PreconditionViolated(
            "currying misses the unit entry".into(),
        ));
    }
    for (k, p) in src.pairs().iter().enumerate() {
        for &k2 in src.pairs_of_witness(&p.witness) {
            let q = src.pair(k2);
            if p.set.is_subset(&q.set) && m.rel[k].iter().any(|t| !m.rel[k2].contains(t)) {
                return Err(Error::PreconditionViolated(format!(
                    "set monotonicity fails at {p} vs {q}"
                )));
            }
            if src.entails_set(p, &q.set) && m.rel[k2].iter().any(|t| !m.rel[k].contains(t)) {
                return Err(Error::PreconditionViolated(format!(
                    "source cut fails at {p} vs {q}"
                )));
            }
        }
        for &t in &m.rel[k] {
            let found = src
                .pairs_of_witness(&p.witness)
                .iter()
                .any(|&k2| src.entails_set(p, &src.pair(k2).set) && m.rel[k2].contains(&t));
            if !found {
                return Err(Error::PreconditionViolated(format!(
                    "left interpolation fails at {p} on {}",
                    exp.token_name(t)
                )));
            }
        }
        for &g in &m.rel[k] {
            let pool: Vec<usize> = m.rel[k]
                .iter()
                .copied()
                .filter(|&t| exp.ok1(g, t))
                .collect();
            for (pp, pid, _) in exp.closure_of(&pool) {
                if !exp.ok2(g, &pp, pid) {
                    continue;
                }
                if let Some(&t) = exp
                    .entailed_of(g, &pp, pid)
                    .iter()
                    .find(|t| !m.rel[k].contains(t))
                {
                    return Err(Error::PreconditionViolated(format!(
                        "target cut fails at {p} on {}",
                        exp.token_name(t)
                    )));
                }
            }
        }
        for &t in &m.rel[k] {
            let mut found = false;
            'ri: for &g in &m.rel[k] {
                let pool: Vec<usize> = m.rel[k]
                    .iter()
                    .copied()
                    .filter(|&u| exp.ok1(g, u))
                    .collect();
                for (pp, pid, _) in exp.closure_of(&pool) {
                    if exp.ok2(g, &pp, pid) && exp.entails_profile(g, &pp, pid, t) {
                        found = true;
                        break 'ri;
                    }
                }
            }
            if !found {
                return Err(Error::PreconditionViolated(format!(
                    "right interpolation fails at {p} on {}",
                    exp.token_name(t)
                )));
            }
        }
        if !m.rel[k].is_empty() && !m.rel[k].iter().any(|&e| exp.con_members(e, &m.rel[k])) {
            return Err(Error::PreconditionViolated(format!(
                "witness generation fails at {p}"
            )));
        }
    }
    for i in src.tokens() {
        for j in src.tokens() {
            if !src.singleton_con(i, j) {
                continue;
            }
            for &k in src.pairs_of_witness(i) {
                let x = &src.pair(k).set;
                let kj = src.pair_idx(&ConsPair::new(j.clone(), x.clone()));
                let img_j: &[usize] = kj.map(|k2| m.rel[k2].as_slice()).unwrap_or(&[]);
                if m.rel[k].iter().any(|t| !img_j.contains(t)) {
                    return Err(Error::PreconditionViolated(format!(
                        "witness transfer fails between {i} and {j} over {x}"
                    )));
                }
                if img_j.iter().any(|t| !m.rel[k].contains(t)) {
                    return Err(Error::PreconditionViolated(format!(
                        "witness conservativity fails between {i} and {j} over {x}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The composite (F x Id) . Ev as a plain mapping out of the product:
/// decided by searching the image rectangle of each product pair for an
/// intermediate head and abstract family.
pub fn compose_map_id_ev(f: &ExpTargetMapping, prod: &ProductSystem, ev: &EvMap) -> ApproxMapping {
    let exp = &ev.exp;
    let aprime = &exp.src;
    let a2 = &exp.tgt;
    let rel: Vec<TokenSet> = (0..prod.sys.pair_count())
        .map(|pk| {
            let p = prod.sys.pair(pk);
            let (i, i2) = split_pair(&p.witness).expect("product witness");
            let x1: TokenSet = p.set.iter().map(|t| split_pair(t).unwrap().0).collect();
            let x2: TokenSet = p.set.iter().map(|t| split_pair(t).unwrap().1).collect();
            let g_pool: Vec<usize> = f
                .source
                .pair_idx(&ConsPair::new(i.clone(), x1))
                .map(|k| f.rel[k].clone())
                .unwrap_or_default();
            let b_pool: TokenSet = aprime
                .entailed_set(&ConsPair::new(i2.clone(), x2))
                .unwrap_or_default();
            a2.tokens()
                .iter()
                .filter(|c| {
                    g_pool.iter().any(|&g| {
                        let inner: Vec<usize> = g_pool
                            .iter()
                            .copied()
                            .filter(|&t| exp.ok1(g, t))
                            .collect();
                        let has_empty = ev.has_empty_profile(&inner);
                        let closures = exp.closure_of(&inner);
                        b_pool.iter().any(|b2| {
                            aprime.pairs_of_witness(b2).iter().any(|&k2| {
                                let s2 = &aprime.pair(k2).set;
                                s2.is_subset(&b_pool)
                                    && closures.iter().any(|(pp, pid, fam)| {
                                        let z = ZAbs {
                                            s: s2.clone(),
                                            fam: fam.clone(),
                                            profile: pp.clone(),
                                            pid: *pid,
                                        };
                                        realizable(&z, has_empty)
                                            && exp.ok2(g, pp, *pid)
                                            && ev.value(g, b2, &z, c)
                                    })
                            })
                        })
                    })
                })
                .cloned()
                .collect()
        })
        .collect();
    ApproxMapping::from_images(
        &format!("({}xid).ev", f.name),
        prod.sys.clone(),
        a2.clone(),
        rel,
    )
}

/// Evidence from one Cartesian-closure run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CccReport {
    pub mappings_checked: usize,
    pub curried_candidates: usize,
}

/// Enumerates the candidate curried mappings out of `a` into the function
/// space: one per monotone map from the states of `a` to the space's
/// states, through the verified state correspondence.
pub fn curried_candidates(
    a: &Arc<InfoSystem>,
    exp: &Arc<ExpSpace>,
    max_bits: u32,
) -> Result<Vec<ExpTargetMapping>> {
    let sp = enumerate_states(a, 16)?;
    let estates = exp_states(exp, max_bits)?;
    let n = sp.len();
    let m = estates.len();
    let mut out = Vec::new();
    let mut counter = vec![0usize; n];
    loop {
        let monotone = (0..n).all(|i| {
            (0..n).all(|j| !sp.le_idx(i, j) || estates[counter[i]].le(&estates[counter[j]]))
        });
        if monotone {
            let rel = (0..a.pair_count())
                .map(|k| {
                    let principal = State(a.entailed_idx(k).clone());
                    let i = sp.index(&principal).expect("principal state");
                    estates[counter[i]].0.clone()
                })
                .collect();
            out.push(ExpTargetMapping {
                name: format!("cand{}", out.len()),
                source: a.clone(),
                exp: exp.clone(),
                rel,
            });
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            counter[i] += 1;
            if counter[i] < m {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

/// Verifies, over every approximable mapping out of the product and every
/// candidate curried mapping, the two exponent equations and the
/// uniqueness of the curried mediator among the candidates.
pub fn check_ccc(
    a: &Arc<InfoSystem>,
    aprime: &Arc<InfoSystem>,
    exp: &Arc<ExpSpace>,
    prod: &ProductSystem,
    max_bits: u32,
) -> Result<CccReport> {
    let ev = ev_mapping(exp);
    let hs = enumerate_mappings(&prod.sys, &exp.tgt, max_bits)?;
    let gs = curried_candidates(a, exp, max_bits)?;
    for g in &gs {
        check_exp_target(g)?;
    }
    for h in &hs {
        let lam = lambda(h, a, aprime, exp);
        check_exp_target(&lam)?;
        let back = compose_map_id_ev(&lam, prod, &ev);
        if back.images() != h.images() {
            return Err(Error::PreconditionViolated(format!(
                "uncurrying the currying of {} does not recover it",
                h.name
            )));
        }
        let solutions: Vec<&ExpTargetMapping> = gs
            .iter()
            .filter(|g| compose_map_id_ev(g, prod, &ev).images() == h.images())
            .collect();
        if solutions.len() != 1 || solutions[0].rel != lam.rel {
            return Err(Error::PreconditionViolated(format!(
                "curried mediator for {} is not unique among {} candidates",
                h.name,
                gs.len()
            )));
        }
    }
    for g in &gs {
        let h2 = compose_map_id_ev(g, prod, &ev);
        assert!(check_approx(&h2).passed(), "composite must be approximable");
        let lam = lambda(&h2, a, aprime, exp);
        if lam.rel != g.rel {
            return Err(Error::PreconditionViolated(format!(
                "currying the uncurrying of {} does not recover it",
                g.name
            )));
        }
    }
    Ok(CccReport {
        mappings_checked: hs.len(),
        curried_candidates: gs.len(),
    })
}
