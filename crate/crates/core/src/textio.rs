//! Line-oriented text formats for systems, posets and mappings, plus DOT
//! export of state posets. UTF-8, `#` starts a comment, tokens are drawn
//! from `[A-Za-z0-9_']` with `.` and `\` reserved for constructed pair
//! names.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::approx::ApproxMapping;
use crate::error::{Error, Result};
use crate::poset::FinitePoset;
use crate::state::StatePoset;
use crate::system::{build_system, ConsPair, InfoSystem};
use crate::token::{Token, TokenSet};

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn is_token_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '.' || c == '\\'
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(k) => &line[..k],
        None => line,
    }
}

struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        let items = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, strip_comment(l).trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Lines { items, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let it = self.items.get(self.pos).copied();
        self.pos += 1;
        it
    }
}

fn parse_token(line: usize, word: &str) -> Result<Token> {
    if word.is_empty() || !word.chars().all(is_token_char) {
        return Err(perr(line, 1, format!("invalid token name `{word}`")));
    }
    Ok(Token::new(word))
}

fn check_declared(line: usize, universe: &TokenSet, t: &Token) -> Result<()> {
    if universe.contains(t) {
        Ok(())
    } else {
        Err(perr(line, 1, format!("token `{t}` used before declaration")))
    }
}

/// Parses a `(TOK ; TOK,...)` group, returning the witness and the set.
fn parse_pair_group(line: usize, s: &str) -> Result<(Token, TokenSet, usize)> {
    let open = s
        .find('(')
        .ok_or_else(|| perr(line, 1, "expected `(` opening a pair"))?;
    let close = s
        .find(')')
        .ok_or_else(|| perr(line, 1, "expected `)` closing a pair"))?;
    let inner = &s[open + 1..close];
    let (w, set_part) = inner
        .split_once(';')
        .ok_or_else(|| perr(line, open + 1, "expected `;` inside a pair"))?;
    let witness = parse_token(line, w.trim())?;
    let set = parse_set_list(line, set_part)?;
    Ok((witness, set, close + 1))
}

fn parse_set_list(line: usize, s: &str) -> Result<TokenSet> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(parse_token(line, part)?);
    }
    Ok(TokenSet::from_vec(out))
}

fn parse_braced_set(line: usize, s: &str) -> Result<TokenSet> {
    let inner = s
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| perr(line, 1, "expected `{...}`"))?;
    parse_set_list(line, inner)
}

/// Parses a system file.
pub fn parse_system(text: &str) -> Result<InfoSystem> {
    let mut lines = Lines::new(text);
    let (ln, first) = lines
        .next()
        .ok_or_else(|| perr(1, 1, "empty input"))?;
    let name = first
        .strip_prefix("system")
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| perr(ln, 1, "expected `system NAME`"))?;
    let mut delta: Option<Token> = None;
    let mut tokens = TokenSet::empty();
    let mut con: Vec<ConsPair> = Vec::new();
    let mut entail: Vec<(ConsPair, TokenSet)> = Vec::new();
    while let Some((ln, line)) = lines.next() {
        if let Some(rest) = line.strip_prefix("delta ") {
            delta = Some(parse_token(ln, rest.trim())?);
        } else if let Some(rest) = line.strip_prefix("tokens ") {
            for w in rest.split_whitespace() {
                tokens = tokens.insert(parse_token(ln, w)?);
            }
        } else if let Some(rest) = line.strip_prefix("con ") {
            let (w, sets_part) = rest
                .split_once(':')
                .ok_or_else(|| perr(ln, 1, "expected `con TOK : {..} ..`"))?;
            let witness = parse_token(ln, w.trim())?;
            check_declared(ln, &tokens, &witness)?;
            let mut rest = sets_part.trim();
            if rest.is_empty() {
                return Err(perr(ln, 1, "expected at least one set after `:`"));
            }
            while !rest.is_empty() {
                let close = rest
                    .find('}')
                    .ok_or_else(|| perr(ln, 1, "expected `}`"))?;
                let set = parse_braced_set(ln, rest[..=close].trim())?;
                for t in &set {
                    check_declared(ln, &tokens, t)?;
                }
                con.push(ConsPair::new(witness.clone(), set));
                rest = rest[close + 1..].trim();
            }
        } else if let Some(rest) = line.strip_prefix("entail ") {
            let (witness, set, used) = parse_pair_group(ln, rest)?;
            check_declared(ln, &tokens, &witness)?;
            for t in &set {
                check_declared(ln, &tokens, t)?;
            }
            let tail = rest[used..].trim();
            let rhs = tail
                .strip_prefix("->")
                .ok_or_else(|| perr(ln, 1, "expected `->` after the pair"))?;
            let mut out = Vec::new();
            for w in rhs.split_whitespace() {
                let t = parse_token(ln, w)?;
                check_declared(ln, &tokens, &t)?;
                out.push(t);
            }
            entail.push((ConsPair::new(witness, set), TokenSet::from_vec(out)));
        } else {
            return Err(perr(ln, 1, format!("unrecognised line `{line}`")));
        }
    }
    let delta = delta.ok_or_else(|| perr(1, 1, "missing `delta` line"))?;
    build_system(name, tokens, delta, con, entail)
}

/// Serialises a system; parsing the output reproduces the system exactly.
pub fn serialize_system(sys: &InfoSystem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system {}", sys.name());
    let _ = writeln!(out, "delta {}", sys.delta());
    let toks: Vec<String> = sys.tokens().iter().map(|t| t.name().to_string()).collect();
    let _ = writeln!(out, "tokens {}", toks.join(" "));
    for w in sys.tokens() {
        let idxs = sys.pairs_of_witness(w);
        if idxs.is_empty() {
            continue;
        }
        let sets: Vec<String> = idxs
            .iter()
            .map(|&k| {
                let names: Vec<String> = sys
                    .pair(k)
                    .set
                    .iter()
                    .map(|t| t.name().to_string())
                    .collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        let _ = writeln!(out, "con {} : {}", w, sets.join(" "));
    }
    for (p, ent) in sys.entail_rows() {
        if ent.is_empty() {
            continue;
        }
        let set_names: Vec<String> = p.set.iter().map(|t| t.name().to_string()).collect();
        let rhs: Vec<String> = ent.iter().map(|t| t.name().to_string()).collect();
        let _ = writeln!(
            out,
            "entail ({} ; {}) -> {}",
            p.witness,
            set_names.join(","),
            rhs.join(" ")
        );
    }
    out
}

/// Parses a poset file; `le` lines may give covering or full pairs, the
/// parser closes them transitively and reports antisymmetry breaks.
pub fn parse_poset(text: &str) -> Result<FinitePoset> {
    let mut lines = Lines::new(text);
    let (ln, first) = lines.next().ok_or_else(|| perr(1, 1, "empty input"))?;
    if !first.starts_with("poset") {
        return Err(perr(ln, 1, "expected `poset NAME`"));
    }
    let mut bottom: Option<Token> = None;
    let mut elems = TokenSet::empty();
    let mut pairs: Vec<(Token, Token)> = Vec::new();
    while let Some((ln, line)) = lines.next() {
        if let Some(rest) = line.strip_prefix("bottom ") {
            bottom = Some(parse_token(ln, rest.trim())?);
        } else if let Some(rest) = line.strip_prefix("elems ") {
            for w in rest.split_whitespace() {
                elems = elems.insert(parse_token(ln, w)?);
            }
        } else if let Some(rest) = line.strip_prefix("le ") {
            let ws: Vec<&str> = rest.split_whitespace().collect();
            if ws.len() != 2 {
                return Err(perr(ln, 1, "expected `le TOK TOK`"));
            }
            let a = parse_token(ln, ws[0])?;
            let b = parse_token(ln, ws[1])?;
            check_declared(ln, &elems, &a)?;
            check_declared(ln, &elems, &b)?;
            pairs.push((a, b));
        } else {
            return Err(perr(ln, 1, format!("unrecognised line `{line}`")));
        }
    }
    let p = FinitePoset::new(elems, &pairs)?;
    if let Some(b) = bottom {
        if p.bottom() != &b {
            return Err(Error::PosetInvalid(format!(
                "declared bottom {b} is not the least element"
            )));
        }
    }
    Ok(p)
}

pub fn serialize_poset(name: &str, p: &FinitePoset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "poset {name}");
    let _ = writeln!(out, "bottom {}", p.bottom());
    let elems: Vec<String> = p.elems().iter().map(|t| t.name().to_string()).collect();
    let _ = writeln!(out, "elems {}", elems.join(" "));
    for (a, b) in p.covers() {
        let _ = writeln!(out, "le {a} {b}");
    }
    out
}

/// Parsed mapping file: name, source and target system names, entries.
pub struct MapFile {
    pub name: String,
    pub src: String,
    pub dst: String,
    pub entries: Vec<(ConsPair, TokenSet)>,
}

pub fn parse_map(text: &str) -> Result<MapFile> {
    let mut lines = Lines::new(text);
    let (ln, first) = lines.next().ok_or_else(|| perr(1, 1, "empty input"))?;
    let rest = first
        .strip_prefix("map ")
        .ok_or_else(|| perr(ln, 1, "expected `map NAME : SRC -> DST`"))?;
    let (name, arrow) = rest
        .split_once(':')
        .ok_or_else(|| perr(ln, 1, "expected `:`"))?;
    let (src, dst) = arrow
        .split_once("->")
        .ok_or_else(|| perr(ln, 1, "expected `->`"))?;
    let mut entries = Vec::new();
    while let Some((ln, line)) = lines.next() {
        let rest = line
            .strip_prefix("rel ")
            .ok_or_else(|| perr(ln, 1, format!("unrecognised line `{line}`")))?;
        let (witness, set, used) = parse_pair_group(ln, rest)?;
        let tail = rest[used..].trim();
        let rhs = tail
            .strip_prefix("->")
            .ok_or_else(|| perr(ln, 1, "expected `->` after the pair"))?;
        let mut out = Vec::new();
        for w in rhs.split_whitespace() {
            out.push(parse_token(ln, w)?);
        }
        entries.push((ConsPair::new(witness, set), TokenSet::from_vec(out)));
    }
    Ok(MapFile {
        name: name.trim().to_string(),
        src: src.trim().to_string(),
        dst: dst.trim().to_string(),
        entries,
    })
}

pub fn serialize_map(h: &ApproxMapping) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "map {} : {} -> {}",
        h.name,
        h.source.name(),
        h.target.name()
    );
    for (k, p) in h.source.pairs().iter().enumerate() {
        let img = h.image_idx(k);
        if img.is_empty() {
            continue;
        }
        let set_names: Vec<String> = p.set.iter().map(|t| t.name().to_string()).collect();
        let rhs: Vec<String> = img.iter().map(|t| t.name().to_string()).collect();
        let _ = writeln!(
            out,
            "rel ({} ; {}) -> {}",
            p.witness,
            set_names.join(","),
            rhs.join(" ")
        );
    }
    out
}

/// Resolves a map file against its systems.
pub fn map_from_file(
    mf: &MapFile,
    src: Arc<InfoSystem>,
    dst: Arc<InfoSystem>,
) -> Result<ApproxMapping> {
    if src.name() != mf.src {
        return Err(Error::SystemMismatch(format!(
            "map expects source `{}`, got `{}`",
            mf.src,
            src.name()
        )));
    }
    if dst.name() != mf.dst {
        return Err(Error::SystemMismatch(format!(
            "map expects target `{}`, got `{}`",
            mf.dst,
            dst.name()
        )));
    }
    ApproxMapping::new(&mf.name, src, dst, mf.entries.clone())
}

/// DOT rendering of a state poset's covering relation, nodes in canonical
/// state order.
pub fn export_dot(sp: &StatePoset) -> String {
    let pos = sp.as_poset();
    let mut out = String::new();
    out.push_str("digraph states {\n  rankdir=BT;\n");
    for (i, s) in sp.states().iter().enumerate() {
        let _ = writeln!(out, "  s{i} [label=\"{}\"];", s.members());
    }
    for (a, b) in pos.covers() {
        let ia = a.name().strip_prefix('s').unwrap().to_string();
        let ib = b.name().strip_prefix('s').unwrap().to_string();
        let _ = writeln!(out, "  s{ia} -> s{ib};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{bfly, flat2, term};
    use crate::state::enumerate_states;

    #[test]
    fn system_round_trip_on_fixtures() {
        for sys in [term(), flat2(), bfly()] {
            let text = serialize_system(&sys);
            let back = parse_system(&text).unwrap();
            assert_eq!(back, sys, "round trip of {}", sys.name());
        }
    }

    #[test]
    fn parse_reports_undeclared_tokens() {
        let text = "system X\ndelta d\ntokens d\ncon e : {}\n";
        let err = parse_system(text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_system("nope").is_err());
        assert!(parse_system("system X\nwible\n").is_err());
    }

    #[test]
    fn poset_round_trip_and_antisymmetry_diagnostic() {
        let p = crate::fixtures::bfly_poset();
        let text = serialize_poset("BF", &p);
        let back = parse_poset(&text).unwrap();
        assert!(crate::poset::order_iso(&p, &back).is_some());
        let cyc = "poset C\nbottom a\nelems a b\nle a b\nle b a\n";
        assert!(matches!(parse_poset(cyc), Err(Error::PosetInvalid(_))));
    }

    #[test]
    fn map_round_trip() {
        let f = Arc::new(flat2());
        let id = crate::approx::identity(&f);
        let text = serialize_map(&id);
        let mf = parse_map(&text).unwrap();
        let back = map_from_file(&mf, f.clone(), f.clone()).unwrap();
        assert_eq!(back.images(), id.images());
    }

    #[test]
    fn dot_output_shapes() {
        let term_dot = export_dot(&enumerate_states(&term(), 16).unwrap());
        assert_eq!(term_dot.matches("label=").count(), 1);
        assert_eq!(term_dot.matches("->").count(), 0);
        let flat_dot = export_dot(&enumerate_states(&flat2(), 16).unwrap());
        assert_eq!(flat_dot.matches("label=").count(), 3);
        assert_eq!(flat_dot.matches("->").count(), 2);
        // Derived from the poset oracle: the butterfly's state order has
        // six covering edges.
        let bfly_dot = export_dot(&enumerate_states(&bfly(), 16).unwrap());
        assert_eq!(bfly_dot.matches("label=").count(), 5);
        assert_eq!(bfly_dot.matches("->").count(), 6);
    }
}
