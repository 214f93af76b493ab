//! The function-space system of two information systems with witnesses,
//! kept intensional: tokens are enumerated, while consistency and
//! entailment stay decision procedures.
//!
//! Both procedures factor through a token's resolved data: the per-anchor
//! lookup witness and the per-anchor activated image (its profile). A
//! finite set of tokens enters them only through the members individually
//! and the pointwise union of their profiles. The exhaustive checks in
//! `expcheck` exploit exactly that factoring: instead of sweeping all
//! finite token sets (the consistency predicate of a function space is far
//! too wide to tabulate), they sweep heads and achievable profile unions,
//! materialising a concrete witness family whenever a verdict fails. The
//! factoring is cross-validated against a fully extensional
//! materialisation on the smallest pair.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::associate::{associate_lookup, delta_exp, enumerate_associates, ExpToken};
use crate::error::{Error, Result};
use crate::system::{build_system, ConsPair, InfoSystem};
use crate::token::{Token, TokenSet};
use crate::witness::{spectrum, Cpt};

/// Enumeration budgets for function-space work.
#[derive(Clone, Copy, Debug)]
pub struct ExpBudget {
    /// Cap on |Con x A'|, the bit-width of family enumeration.
    pub max_cpts: usize,
    /// Cap on associate-enumeration branches per family.
    pub max_branches: usize,
    /// Cap on token count for fully extensional materialisation.
    pub max_extensional: usize,
}

impl Default for ExpBudget {
    fn default() -> ExpBudget {
        ExpBudget {
            max_cpts: 12,
            max_branches: 100_000,
            max_extensional: 12,
        }
    }
}

/// One entry of a token's associate, resolved for entailment checks.
#[derive(Clone, Debug)]
pub(crate) struct WSlot {
    /// Index of the entry's head (a, Z) in the source pair list.
    pub anchor: usize,
    /// The entry's witness token in the target system.
    pub b: Token,
    /// Right-hand tokens of the family activated at (a, Z).
    pub rs: TokenSet,
    /// Distinct source pairs activated at (a, Z), as pair indices.
    pub ds: Vec<usize>,
}

/// Per-token resolved data.
pub(crate) struct TokData {
    /// Lookup witness per source pair index.
    pub jvec: Vec<Token>,
    /// Activated image per source pair index.
    pub profile: Vec<TokenSet>,
    /// Family entries as (source pair index, target token).
    pub v_entries: Vec<(usize, Token)>,
    pub w_slots: Vec<WSlot>,
    /// Tokens with equal lookup vectors behave identically as entailment
    /// heads; identical lookups and profiles behave identically everywhere.
    pub jclass: u32,
    pub pid: u32,
}

/// A profile: one target token set per source pair, pointwise ordered.
pub type Profile = Vec<TokenSet>;

pub(crate) fn profile_le(a: &Profile, b: &Profile) -> bool {
    a.iter().zip(b).all(|(x, y)| x.is_subset(y))
}

pub(crate) fn profile_union(a: &Profile, b: &Profile) -> Profile {
    a.iter().zip(b).map(|(x, y)| x.union(y)).collect()
}

#[derive(Default)]
struct Memo {
    ok1: HashMap<(u32, usize), bool>,
    ok2: HashMap<(u32, u32, u32), bool>,
    entails: HashMap<(u32, u32, usize), bool>,
    entailed_set: HashMap<(u32, u32), Arc<Vec<usize>>>,
    pool: HashMap<u32, Arc<Vec<usize>>>,
    reachable: HashMap<u32, Arc<Vec<(u32, Vec<usize>)>>>,
    profile_ids: HashMap<Profile, u32>,
    profiles: Vec<Profile>,
    closure_core: HashMap<Vec<u32>, Arc<Vec<(u32, Vec<u32>)>>>,
}

impl Memo {
    fn intern(&mut self, p: &Profile) -> u32 {
        if let Some(&i) = self.profile_ids.get(p) {
            return i;
        }
        let id = self.profiles.len() as u32;
        self.profile_ids.insert(p.clone(), id);
        self.profiles.push(p.clone());
        id
    }
}

/// The function space of a pair of systems with all tokens enumerated.
pub struct ExpSpace {
    pub src: Arc<InfoSystem>,
    pub tgt: Arc<InfoSystem>,
    tokens: Vec<ExpToken>,
    pub(crate) data: Vec<TokData>,
    index: HashMap<ExpToken, usize>,
    delta_idx: usize,
    memo: Mutex<Memo>,
}

impl fmt::Debug for ExpSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ExpSpace({} -> {}, {} tokens)",
            self.src.name(),
            self.tgt.name(),
            self.tokens.len()
        )
    }
}

/// Enumerates every token of the function space: all families over
/// Con x A' within budget, and all canonical associates of each.
pub fn materialize(
    src: &Arc<InfoSystem>,
    tgt: &Arc<InfoSystem>,
    budget: &ExpBudget,
) -> Result<ExpSpace> {
    let cpts: Vec<Cpt> = src
        .pairs()
        .iter()
        .flat_map(|p| tgt.tokens().iter().map(move |t| Cpt::new(p.clone(), t.clone())))
        .collect();
    if cpts.len() > budget.max_cpts {
        return Err(Error::BudgetExceeded(format!(
            "function space over {} family entries (budget {})",
            cpts.len(),
            budget.max_cpts
        )));
    }
    let mut tokens = Vec::new();
    for mask in 0u32..1 << cpts.len() {
        let v: Vec<Cpt> = (0..cpts.len())
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| cpts[k].clone())
            .collect();
        for w in enumerate_associates(src, tgt, &v, budget.max_branches)? {
            tokens.push(ExpToken::new(w, v.clone()));
        }
    }
    tokens.sort();
    tokens.dedup();
    let mut memo = Memo::default();
    let mut jvecs: HashMap<Vec<Token>, u32> = HashMap::new();
    let mut data = Vec::with_capacity(tokens.len());
    for tok in &tokens {
        let mut jvec = Vec::with_capacity(src.pair_count());
        let mut profile = Vec::with_capacity(src.pair_count());
        for p in src.pairs() {
            let lk = associate_lookup(src, tgt, tok, p)?;
            jvec.push(lk.j);
            profile.push(crate::witness::ap(src, p, &tok.v));
        }
        let v_entries: Vec<(usize, Token)> = tok
            .v
            .iter()
            .map(|c| (src.pair_idx(&c.pair).expect("family pair in Con"), c.tok.clone()))
            .collect();
        let w_slots: Vec<WSlot> = tok
            .w
            .iter()
            .map(|c| {
                let spec = spectrum(src, &c.pair, &tok.v);
                WSlot {
                    anchor: src.pair_idx(&c.pair).expect("entry head in Con"),
                    b: c.tok.clone(),
                    rs: spec.rs,
                    ds: spec
                        .ds
                        .iter()
                        .map(|p| src.pair_idx(p).expect("spectrum pair in Con"))
                        .collect(),
                }
            })
            .collect();
        let next = jvecs.len() as u32;
        let jclass = *jvecs.entry(jvec.clone()).or_insert(next);
        let pid = memo.intern(&profile);
        data.push(TokData {
            jvec,
            profile,
            v_entries,
            w_slots,
            jclass,
            pid,
        });
    }
    let index: HashMap<ExpToken, usize> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let delta_idx = index[&delta_exp(src, tgt)];
    Ok(ExpSpace {
        src: src.clone(),
        tgt: tgt.clone(),
        tokens,
        data,
        index,
        delta_idx,
        memo: Mutex::new(memo),
    })
}

impl ExpSpace {
    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn tokens(&self) -> &[ExpToken] {
        &self.tokens
    }

    pub fn token(&self, i: usize) -> &ExpToken {
        &self.tokens[i]
    }

    pub fn token_idx(&self, t: &ExpToken) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn delta_idx(&self) -> usize {
        self.delta_idx
    }

    /// Display name of a token, stable under the canonical order.
    pub fn token_name(&self, i: usize) -> String {
        format!("e{i}")
    }

    pub fn profile_of(&self, i: usize) -> &Profile {
        &self.data[i].profile
    }

    /// The lookup witness of token `tok` at source pair `anchor`.
    pub fn lookup_witness(&self, tok: usize, anchor: usize) -> Token {
        self.data[tok].jvec[anchor].clone()
    }

    pub(crate) fn empty_profile(&self) -> Profile {
        vec![TokenSet::empty(); self.src.pair_count()]
    }

    pub(crate) fn intern_profile(&self, p: &Profile) -> u32 {
        self.memo.lock().unwrap().intern(p)
    }

    /// Per-member condition of function-space consistency: at every anchor
    /// the member's lookup witness has an equivalent token consistent for
    /// the head's lookup witness.
    pub(crate) fn ok1(&self, head: usize, member: usize) -> bool {
        let key = (self.data[head].jclass, member);
        if let Some(&v) = self.memo.lock().unwrap().ok1.get(&key) {
            return v;
        }
        let hd = &self.data[head];
        let md = &self.data[member];
        let v = (0..self.src.pair_count()).all(|k| {
            self.tgt.tokens().iter().any(|kk| {
                self.tgt.witness_equiv(&md.jvec[k], kk, &md.profile[k])
                    && self
                        .tgt
                        .is_con_parts(&hd.jvec[k], &TokenSet::singleton(kk.clone()))
            })
        });
        self.memo.lock().unwrap().ok1.insert(key, v);
        v
    }

    /// Aggregate condition: equivalence of any target token with the head's
    /// lookup witness over the head's own image survives restriction to the
    /// family's union image.
    pub(crate) fn ok2(&self, head: usize, union: &Profile, union_pid: u32) -> bool {
        let hd = &self.data[head];
        let key = (hd.jclass, hd.pid, union_pid);
        if let Some(&v) = self.memo.lock().unwrap().ok2.get(&key) {
            return v;
        }
        let v = (0..self.src.pair_count()).all(|k| {
            self.tgt.tokens().iter().all(|r| {
                !self.tgt.witness_equiv(r, &hd.jvec[k], &hd.profile[k])
                    || self.tgt.witness_equiv(r, &hd.jvec[k], &union[k])
            })
        });
        self.memo.lock().unwrap().ok2.insert(key, v);
        v
    }

    /// Union profile of a member family, with an interned id.
    pub(crate) fn union_profile(&self, members: &[usize]) -> (Profile, u32) {
        let union = members.iter().fold(self.empty_profile(), |acc, &m| {
            profile_union(&acc, &self.data[m].profile)
        });
        let pid = self.intern_profile(&union);
        (union, pid)
    }

    /// Consistency of a concrete family with a head.
    pub fn con_members(&self, head: usize, members: &[usize]) -> bool {
        if !members.iter().all(|&m| self.ok1(head, m)) {
            return false;
        }
        let (union, pid) = self.union_profile(members);
        self.ok2(head, &union, pid)
    }

    /// Entailment of a token from a head with a given union profile.
    pub(crate) fn entails_profile(
        &self,
        head: usize,
        union: &Profile,
        union_pid: u32,
        rhs: usize,
    ) -> bool {
        let hd = &self.data[head];
        let key = (hd.jclass, union_pid, rhs);
        if let Some(&v) = self.memo.lock().unwrap().entails.get(&key) {
            return v;
        }
        let rd = &self.data[rhs];
        let mut v = rd.v_entries.iter().all(|(k, f)| {
            self.tgt
                .entails(&ConsPair::new(hd.jvec[*k].clone(), union[*k].clone()), f)
        });
        if v {
            v = rd.w_slots.iter().all(|slot| {
                let u = slot
                    .ds
                    .iter()
                    .fold(TokenSet::empty(), |acc, &d| acc.union(&union[d]));
                let anchor = ConsPair::new(hd.jvec[slot.anchor].clone(), u);
                self.tgt.tokens().iter().any(|kk| {
                    self.tgt.witness_equiv(&slot.b, kk, &slot.rs)
                        && self.tgt.entails(&anchor, kk)
                        && self.tgt.entails_set(&anchor, &slot.rs)
                })
            });
        }
        self.memo.lock().unwrap().entails.insert(key, v);
        v
    }

    /// Entailment from a concrete family; the consistency precondition is
    /// the caller's to enforce (see `exp_entail`).
    pub fn entails_members(&self, head: usize, members: &[usize], rhs: usize) -> bool {
        let (union, pid) = self.union_profile(members);
        self.entails_profile(head, &union, pid, rhs)
    }

    pub(crate) fn entailed_of(&self, head: usize, union: &Profile, union_pid: u32) -> Arc<Vec<usize>> {
        let jc = self.data[head].jclass;
        if let Some(v) = self.memo.lock().unwrap().entailed_set.get(&(jc, union_pid)) {
            return v.clone();
        }
        let v: Arc<Vec<usize>> = Arc::new(
            (0..self.tokens.len())
                .filter(|&t| self.entails_profile(head, union, union_pid, t))
                .collect(),
        );
        self.memo
            .lock()
            .unwrap()
            .entailed_set
            .insert((jc, union_pid), v.clone());
        v
    }

    /// Tokens that can join a family under this head.
    pub(crate) fn pool(&self, head: usize) -> Arc<Vec<usize>> {
        let jc = self.data[head].jclass;
        if let Some(v) = self.memo.lock().unwrap().pool.get(&jc) {
            return v.clone();
        }
        let v: Arc<Vec<usize>> =
            Arc::new((0..self.tokens.len()).filter(|&m| self.ok1(head, m)).collect());
        self.memo.lock().unwrap().pool.insert(jc, v.clone());
        v
    }

    /// Union closure of the profiles of a token pool: every profile a
    /// family over the pool can have, each with one witnessing family drawn
    /// from the pool. Structure is memoized on the pool's distinct profile
    /// ids; families are resolved against the given pool.
    pub(crate) fn closure_of(&self, pool: &[usize]) -> Vec<(Profile, u32, Vec<usize>)> {
        let mut by_pid: HashMap<u32, usize> = HashMap::new();
        for &m in pool {
            by_pid.entry(self.data[m].pid).or_insert(m);
        }
        let mut pids: Vec<u32> = by_pid.keys().copied().collect();
        pids.sort_unstable();
        let core = {
            if let Some(c) = self.memo.lock().unwrap().closure_core.get(&pids) {
                Some(c.clone())
            } else {
                None
            }
        };
        let core = core.unwrap_or_else(|| {
            let mut out: Vec<(Profile, u32, Vec<u32>)> = Vec::new();
            let empty = self.empty_profile();
            let pid0 = self.intern_profile(&empty);
            out.push((empty, pid0, Vec::new()));
            let mut frontier = vec![0usize];
            while let Some(i) = frontier.pop() {
                let (p, _, fam) = out[i].clone();
                for &mp in &pids {
                    let q = profile_union(&p, &self.profile_by_id(mp));
                    if out.iter().any(|(r, _, _)| *r == q) {
                        continue;
                    }
                    let qid = self.intern_profile(&q);
                    let mut fam2 = fam.clone();
                    fam2.push(mp);
                    frontier.push(out.len());
                    out.push((q, qid, fam2));
                }
            }
            let core: Arc<Vec<(u32, Vec<u32>)>> =
                Arc::new(out.into_iter().map(|(_, qid, fam)| (qid, fam)).collect());
            self.memo
                .lock()
                .unwrap()
                .closure_core
                .insert(pids.clone(), core.clone());
            core
        });
        core.iter()
            .map(|(qid, fam_pids)| {
                let fam: Vec<usize> = fam_pids.iter().map(|mp| by_pid[mp]).collect();
                (self.profile_by_id(*qid), *qid, fam)
            })
            .collect()
    }

    /// Cached closure per head behaviour class.
    pub(crate) fn reachable(&self, head: usize) -> Arc<Vec<(u32, Vec<usize>)>> {
        let jc = self.data[head].jclass;
        if let Some(v) = self.memo.lock().unwrap().reachable.get(&jc) {
            return v.clone();
        }
        let pool = self.pool(head);
        let v: Arc<Vec<(u32, Vec<usize>)>> = Arc::new(
            self.closure_of(&pool)
                .into_iter()
                .map(|(_, pid, fam)| (pid, fam))
                .collect(),
        );
        self.memo.lock().unwrap().reachable.insert(jc, v.clone());
        v
    }

    pub(crate) fn profile_by_id(&self, pid: u32) -> Profile {
        self.memo.lock().unwrap().profiles[pid as usize].clone()
    }

    /// Consistent abstract families per head: achievable profiles passing
    /// the aggregate condition, each with a witnessing family.
    pub(crate) fn con_classes(&self, head: usize) -> Vec<(Profile, u32, Vec<usize>)> {
        self.reachable(head)
            .iter()
            .map(|(pid, fam)| (self.profile_by_id(*pid), *pid, fam.clone()))
            .filter(|(p, pid, _)| self.ok2(head, p, *pid))
            .collect()
    }

    /// One representative token index per behaviour class, with all tokens
    /// of the class.
    pub(crate) fn behaviour_classes(&self) -> Vec<(usize, Vec<usize>)> {
        let mut seen: HashMap<(u32, u32), usize> = HashMap::new();
        let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
        for i in 0..self.tokens.len() {
            let key = (self.data[i].jclass, self.data[i].pid);
            match seen.get(&key) {
                Some(&slot) => out[slot].1.push(i),
                None => {
                    seen.insert(key, out.len());
                    out.push((i, vec![i]));
                }
            }
        }
        out
    }

    /// Fully extensional materialisation: tokens become plain symbols
    /// e0, e1, ..., consistency and entailment are tabulated by sweeping
    /// all subsets. Only possible for tiny function spaces.
    pub fn to_info_system(&self, budget: &ExpBudget) -> Result<InfoSystem> {
        let n = self.tokens.len();
        if n > budget.max_extensional {
            return Err(Error::BudgetExceeded(format!(
                "extensional function space over {n} tokens (budget {})",
                budget.max_extensional
            )));
        }
        let names: Vec<Token> = (0..n).map(|i| Token::new(&self.token_name(i))).collect();
        let universe: TokenSet = names.iter().cloned().collect();
        let mut con = Vec::new();
        let mut entail = Vec::new();
        for head in 0..n {
            for mask in 0u32..1 << n {
                let members: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
                if !self.con_members(head, &members) {
                    continue;
                }
                let set: TokenSet = members.iter().map(|&k| names[k].clone()).collect();
                let p = ConsPair::new(names[head].clone(), set);
                let entailed: TokenSet = (0..n)
                    .filter(|&t| self.entails_members(head, &members, t))
                    .map(|t| names[t].clone())
                    .collect();
                con.push(p.clone());
                entail.push((p, entailed));
            }
        }
        build_system(
            &format!("{}__to__{}", self.src.name(), self.tgt.name()),
            universe,
            names[self.delta_idx].clone(),
            con,
            entail,
        )
    }
}

/// Membership of a family in the consistency predicate at a head, on
/// explicit tokens. Tokens must already be known to the space.
pub fn exp_con(space: &ExpSpace, head: &ExpToken, set: &[ExpToken]) -> Result<bool> {
    let h = space
        .token_idx(head)
        .ok_or_else(|| Error::WitnessInvalid("head is not a token of the space".into()))?;
    let mut members = Vec::with_capacity(set.len());
    for t in set {
        members.push(
            space
                .token_idx(t)
                .ok_or_else(|| Error::WitnessInvalid("member is not a token of the space".into()))?,
        );
    }
    Ok(space.con_members(h, &members))
}

/// Entailment on explicit tokens; errors when the family is not consistent
/// with the head.
pub fn exp_entail(
    space: &ExpSpace,
    head: &ExpToken,
    set: &[ExpToken],
    rhs: &ExpToken,
) -> Result<bool> {
    if !exp_con(space, head, set)? {
        return Err(Error::PreconditionViolated(
            "family is not consistent with the head".into(),
        ));
    }
    let h = space.token_idx(head).unwrap();
    let members: Vec<usize> = set.iter().map(|t| space.token_idx(t).unwrap()).collect();
    let r = space
        .token_idx(rhs)
        .ok_or_else(|| Error::WitnessInvalid("right-hand side is not a token".into()))?;
    Ok(space.entails_members(h, &members, r))
}
