//! Finite pointed posets: the concrete side of the story and the
//! independent brute-force oracle for everything the state spaces are
//! checked against. Also hosts the canonical construction that turns a
//! finite local-lub poset into an information system with witnesses.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::system::{build_system, ConsPair, InfoSystem};
use crate::token::{Token, TokenSet};

/// A finite poset with a least element, stored as an explicit order matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoset {
    elems: TokenSet,
    /// leq[a][b] == true iff elem a ≤ elem b (indices into `elems`).
    leq: Vec<Vec<bool>>,
    bottom: usize,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinitePoset({} elems)", self.elems.len())
    }
}

impl FinitePoset {
    /// Builds from the full order relation. Rejects relations that are not
    /// reflexive, antisymmetric and transitive, or that lack a least element.
    pub fn new(elems: TokenSet, pairs: &[(Token, Token)]) -> Result<FinitePoset> {
        let n = elems.len();
        let idx = |t: &Token| elems.iter().position(|e| e == t);
        let mut leq = vec![vec![false; n]; n];
        for k in 0..n {
            leq[k][k] = true;
        }
        for (a, b) in pairs {
            let (Some(i), Some(j)) = (idx(a), idx(b)) else {
                return Err(Error::UnknownToken(if idx(a).is_none() {
                    a.clone()
                } else {
                    b.clone()
                }));
            };
            leq[i][j] = true;
        }
        // Transitive closure; callers may pass covering pairs only.
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][m] && leq[m][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::PosetInvalid(format!(
                        "antisymmetry breaks between {} and {}",
                        self_elem(&elems, i),
                        self_elem(&elems, j)
                    )));
                }
            }
        }
        let bottom = (0..n)
            .find(|&b| (0..n).all(|j| leq[b][j]))
            .ok_or_else(|| Error::PosetInvalid("no least element".into()))?;
        Ok(FinitePoset { elems, leq, bottom })
    }

    pub fn elems(&self) -> &TokenSet {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn bottom(&self) -> &Token {
        &self.elems.as_slice()[self.bottom]
    }

    pub fn index(&self, t: &Token) -> Option<usize> {
        self.elems.iter().position(|e| e == t)
    }

    pub fn elem(&self, i: usize) -> &Token {
        &self.elems.as_slice()[i]
    }

    pub fn le_idx(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn le(&self, a: &Token, b: &Token) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.leq[i][j],
            _ => false,
        }
    }

    /// The principal ideal of b, as indices.
    pub fn below(&self, b: usize) -> Vec<usize> {
        (0..self.len()).filter(|&a| self.leq[a][b]).collect()
    }

    fn upper_bounds(&self, set: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&u| set.iter().all(|&a| self.leq[a][u]))
            .collect()
    }

    /// Least upper bound of `set` inside the principal ideal of `z`, if one
    /// exists (brute force over candidates).
    fn least_ub_below(&self, set: &[usize], z: usize) -> Option<usize> {
        let cands: Vec<usize> = self
            .upper_bounds(set)
            .into_iter()
            .filter(|&u| self.leq[u][z])
            .collect();
        cands
            .iter()
            .copied()
            .find(|&m| cands.iter().all(|&u| self.leq[m][u]))
    }

    /// The approximation relation evaluated literally from its definition
    /// (quantifying over all directed subsets). Exponential; meant for the
    /// desk-scale assertion that it coincides with ≤ on finite posets.
    pub fn way_below_literal(&self, a: usize, b: usize) -> bool {
        let n = self.len();
        assert!(n <= 16, "literal approximation check on a large poset");
        'sets: for mask in 1u32..1 << n {
            let s: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
            for &u in &s {
                for &v in &s {
                    if !s.iter().any(|&w| self.leq[u][w] && self.leq[v][w]) {
                        continue 'sets;
                    }
                }
            }
            // Directed, so (finitely) it has a greatest element = its lub.
            let top = s
                .iter()
                .copied()
                .find(|&m| s.iter().all(|&u| self.leq[u][m]))
                .expect("finite directed set has a greatest element");
            if self.leq[b][top] && !s.iter().any(|&u| self.leq[a][u]) {
                return false;
            }
        }
        true
    }

    /// a ≪ b. On finite posets this coincides with ≤; the equivalence is
    /// asserted against the literal definition rather than assumed.
    pub fn way_below(&self, a: &Token, b: &Token) -> bool {
        let (i, j) = (self.index(a).unwrap(), self.index(b).unwrap());
        let fast = self.leq[i][j];
        if self.len() <= 8 {
            debug_assert_eq!(fast, self.way_below_literal(i, j));
        }
        fast
    }

    /// Covering pairs (a ⋖ b), in canonical element order.
    pub fn covers(&self) -> Vec<(Token, Token)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq[a][b] {
                    let between = (0..n)
                        .any(|m| m != a && m != b && self.leq[a][m] && self.leq[m][b]);
                    if !between {
                        out.push((self.elem(a).clone(), self.elem(b).clone()));
                    }
                }
            }
        }
        out
    }

    /// Semantic bounded completeness: every subset with an upper bound has a
    /// least upper bound.
    pub fn is_bounded_complete(&self) -> bool {
        let n = self.len();
        for mask in 0u32..1 << n {
            let s: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
            let ubs = self.upper_bounds(&s);
            if ubs.is_empty() {
                continue;
            }
            if !ubs.iter().any(|&m| ubs.iter().all(|&u| self.leq[m][u])) {
                return false;
            }
        }
        true
    }
}

fn self_elem(elems: &TokenSet, i: usize) -> Token {
    elems.as_slice()[i].clone()
}

/// Local-lub check: pointed, and every pair bounded by z has a least upper
/// bound inside the principal ideal of z. Returns the offending triple on
/// failure.
pub fn check_lpo(p: &FinitePoset) -> std::result::Result<(), (Token, Token, Token)> {
    let n = p.len();
    for z in 0..n {
        for a in 0..n {
            for b in 0..n {
                if p.leq[a][z] && p.leq[b][z] && p.least_ub_below(&[a, b], z).is_none() {
                    return Err((p.elem(a).clone(), p.elem(b).clone(), p.elem(z).clone()));
                }
            }
        }
    }
    Ok(())
}

/// Least upper bound of `set` within the principal ideal of `z`.
pub fn local_join(p: &FinitePoset, set: &TokenSet, z: &Token) -> Result<Token> {
    let zi = p
        .index(z)
        .ok_or_else(|| Error::UnknownToken(z.clone()))?;
    let mut idxs = Vec::new();
    for t in set {
        let ti = p.index(t).ok_or_else(|| Error::UnknownToken(t.clone()))?;
        if !p.leq[ti][zi] {
            return Err(Error::NotBounded(format!("{t} is not below {z}")));
        }
        idxs.push(ti);
    }
    p.least_ub_below(&idxs, zi)
        .map(|m| p.elem(m).clone())
        .ok_or_else(|| Error::NotLDomain(format!("{set} has no least upper bound below {z}")))
}

/// The canonical information system of a finite local-lub poset: all
/// elements serve as the basis, (i, X) is consistent when X sits below i,
/// and (i, X) entails a when a approximates the join of X taken below i.
pub fn info_from_domain(name: &str, p: &FinitePoset) -> Result<InfoSystem> {
    if let Err((a, b, z)) = check_lpo(p) {
        return Err(Error::NotLDomain(format!(
            "{{{a},{b}}} bounded by {z} has no least local upper bound"
        )));
    }
    let mut con = Vec::new();
    let mut entail = Vec::new();
    for i in 0..p.len() {
        let below: Vec<Token> = p.below(i).iter().map(|&k| p.elem(k).clone()).collect();
        let below = TokenSet::from_vec(below);
        for x in below.subsets() {
            let pr = ConsPair::new(p.elem(i).clone(), x.clone());
            let join = local_join(p, &x, p.elem(i))?;
            let entailed: TokenSet = p
                .elems()
                .iter()
                .filter(|a| p.way_below(a, &join))
                .cloned()
                .collect();
            con.push(pr.clone());
            entail.push((pr, entailed));
        }
    }
    build_system(name, p.elems().clone(), p.bottom().clone(), con, entail)
}

/// Searches for an order isomorphism by backtracking; `None` when the
/// posets are not isomorphic.
pub fn order_iso(p: &FinitePoset, q: &FinitePoset) -> Option<Vec<(Token, Token)>> {
    if p.len() != q.len() {
        return None;
    }
    let n = p.len();
    let deg = |po: &FinitePoset, i: usize| -> (usize, usize) {
        (
            (0..n).filter(|&j| po.leq[j][i]).count(),
            (0..n).filter(|&j| po.leq[i][j]).count(),
        )
    };
    let pdeg: Vec<_> = (0..n).map(|i| deg(p, i)).collect();
    let qdeg: Vec<_> = (0..n).map(|i| deg(q, i)).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        p: &FinitePoset,
        q: &FinitePoset,
        pdeg: &[(usize, usize)],
        qdeg: &[(usize, usize)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        i: usize,
    ) -> bool {
        let n = p.len();
        if i == n {
            return true;
        }
        for c in 0..n {
            if used[c] || pdeg[i] != qdeg[c] {
                continue;
            }
            let ok = (0..i).all(|j| {
                p.leq[i][j] == q.leq[c][map[j]] && p.leq[j][i] == q.leq[map[j]][c]
            });
            if ok {
                map[i] = c;
                used[c] = true;
                if go(p, q, pdeg, qdeg, map, used, i + 1) {
                    return true;
                }
                used[c] = false;
                map[i] = usize::MAX;
            }
        }
        false
    }
    if go(p, q, &pdeg, &qdeg, &mut map, &mut used, 0) {
        Some(
            (0..n)
                .map(|i| (p.elem(i).clone(), q.elem(map[i]).clone()))
                .collect(),
        )
    } else {
        None
    }
}

/// A monotone function between two finite posets, given by its full table.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct MonoFunction {
    pub table: BTreeMap<Token, Token>,
}

impl MonoFunction {
    pub fn apply(&self, x: &Token) -> &Token {
        &self.table[x]
    }

    pub fn is_monotone(&self, p: &FinitePoset, q: &FinitePoset) -> bool {
        p.elems().iter().all(|a| {
            p.elems()
                .iter()
                .all(|b| !p.le(a, b) || q.le(self.apply(a), self.apply(b)))
        })
    }

    /// Pointwise order.
    pub fn le(&self, other: &MonoFunction, q: &FinitePoset) -> bool {
        self.table
            .iter()
            .all(|(x, fx)| q.le(fx, other.apply(x)))
    }
}

/// All monotone maps p → q, the finite stand-in for the continuous
/// function space. Errors when the table space exceeds the budget.
pub fn monotone_functions(p: &FinitePoset, q: &FinitePoset) -> Result<Vec<MonoFunction>> {
    let np = p.len();
    let nq = q.len();
    let total = (nq as u64).checked_pow(np as u32).unwrap_or(u64::MAX);
    if total > 2_000_000 {
        return Err(Error::BudgetExceeded(format!(
            "{nq}^{np} candidate tables"
        )));
    }
    let mut out = Vec::new();
    let mut counter = vec![0usize; np];
    loop {
        let table: BTreeMap<Token, Token> = (0..np)
            .map(|i| (p.elem(i).clone(), q.elem(counter[i]).clone()))
            .collect();
        let f = MonoFunction { table };
        if f.is_monotone(p, q) {
            out.push(f);
        }
        let mut i = 0;
        loop {
            if i == np {
                out.sort();
                return Ok(out);
            }
            counter[i] += 1;
            if counter[i] < nq {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

/// The single-step function (d ↘ d'): x maps to d' when d approximates x,
/// and to the bottom of the target otherwise.
pub fn single_step(p: &FinitePoset, q: &FinitePoset, d: &Token, d2: &Token) -> MonoFunction {
    let table: BTreeMap<Token, Token> = p
        .elems()
        .iter()
        .map(|x| {
            let v = if p.way_below(d, x) { d2.clone() } else { q.bottom().clone() };
            (x.clone(), v)
        })
        .collect();
    let f = MonoFunction { table };
    assert!(f.is_monotone(p, q), "single-step function must be monotone");
    f
}

/// Pointwise join, taken below f, of a family of single-step functions that
/// each sit below f: at x the value is the join of the active right-hand
/// sides inside the principal ideal of f(x).
pub fn step_join_below(
    p: &FinitePoset,
    q: &FinitePoset,
    f: &MonoFunction,
    steps: &[(Token, Token)],
) -> Result<MonoFunction> {
    for (d, d2) in steps {
        let s = single_step(p, q, d, d2);
        if !s.le(f, q) {
            let bad = p
                .elems()
                .iter()
                .find(|x| !q.le(s.apply(x), f.apply(x)))
                .unwrap();
            return Err(Error::NotBelow(bad.clone()));
        }
    }
    let mut table = BTreeMap::new();
    for x in p.elems() {
        let active: TokenSet = steps
            .iter()
            .filter(|(d, _)| p.way_below(d, x))
            .map(|(_, d2)| d2.clone())
            .collect();
        table.insert(x.clone(), local_join(q, &active, f.apply(x))?);
    }
    Ok(MonoFunction { table })
}

/// Componentwise product of two posets, over pair tokens.
pub fn product_poset(p: &FinitePoset, q: &FinitePoset) -> FinitePoset {
    let elems: TokenSet = p
        .elems()
        .iter()
        .flat_map(|a| {
            q.elems()
                .iter()
                .map(move |b| crate::product::pair_token(a, b))
        })
        .collect();
    let mut pairs = Vec::new();
    for a1 in p.elems() {
        for b1 in q.elems() {
            for a2 in p.elems() {
                for b2 in q.elems() {
                    if p.le(a1, a2) && q.le(b1, b2) {
                        pairs.push((
                            crate::product::pair_token(a1, b1),
                            crate::product::pair_token(a2, b2),
                        ));
                    }
                }
            }
        }
    }
    FinitePoset::new(elems, &pairs).expect("product of posets is a poset")
}

/// The pointwise-ordered poset of all monotone maps p → q, with elements
/// named g0, g1, ... in canonical table order.
pub fn function_poset(p: &FinitePoset, q: &FinitePoset) -> Result<(FinitePoset, Vec<MonoFunction>)> {
    let fns = monotone_functions(p, q)?;
    let elems: TokenSet = (0..fns.len()).map(|i| Token::new(&format!("g{i}"))).collect();
    let mut pairs = Vec::new();
    for (i, f) in fns.iter().enumerate() {
        for (j, g) in fns.iter().enumerate() {
            if f.le(g, q) {
                pairs.push((Token::new(&format!("g{i}")), Token::new(&format!("g{j}"))));
            }
        }
    }
    Ok((FinitePoset::new(elems, &pairs)?, fns))
}

/// All pointed posets with up to `max_n` elements, one per isomorphism
/// class. Elements are named x0..x{n-1}; candidates are generated as
/// upper-triangular strict orders (every finite poset admits such a
/// labelling) and deduplicated by the lexicographically least relation
/// matrix over all permutations.
pub fn pointed_posets_up_to(max_n: usize) -> Vec<FinitePoset> {
    assert!(max_n <= 6, "sweep size is desk-scale only");
    let mut out = Vec::new();
    for n in 1..=max_n {
        let names: Vec<Token> = (0..n).map(|i| Token::new(&format!("x{i}"))).collect();
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let mut seen: HashSet<Vec<bool>> = HashSet::new();
        for mask in 0u32..1 << edges.len() {
            let mut lt = vec![vec![false; n]; n];
            for (k, &(i, j)) in edges.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    lt[i][j] = true;
                }
            }
            // Transitivity of the strict part.
            let transitive = (0..n).all(|i| {
                (0..n).all(|j| {
                    (0..n).all(|k| !(lt[i][j] && lt[j][k]) || lt[i][k])
                })
            });
            if !transitive {
                continue;
            }
            let has_bottom =
                (0..n).any(|b| (0..n).all(|j| j == b || lt[b][j]));
            if !has_bottom {
                continue;
            }
            // Canonical form: least flattened matrix over all relabellings.
            let mut perm: Vec<usize> = (0..n).collect();
            let mut best: Option<Vec<bool>> = None;
            permute(&mut perm, 0, &mut |pm| {
                let mut flat = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        flat.push(lt[pm[i]][pm[j]]);
                    }
                }
                if best.as_ref().is_none_or(|b| flat < *b) {
                    best = Some(flat);
                }
            });
            let canon = best.unwrap();
            if !seen.insert(canon) {
                continue;
            }
            let pairs: Vec<(Token, Token)> = (0..n)
                .flat_map(|i| {
                    let names = &names;
                    let lt = &lt;
                    (0..n).filter_map(move |j| {
                        (lt[i][j]).then(|| (names[i].clone(), names[j].clone()))
                    })
                })
                .collect();
            let elems: TokenSet = names.iter().cloned().collect();
            out.push(FinitePoset::new(elems, &pairs).expect("generated relation is a poset"));
        }
    }
    out
}

fn permute(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, f);
        perm.swap(k, i);
    }
}
