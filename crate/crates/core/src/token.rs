//! Tokens and canonical finite token sets.
//!
//! A token is an atomic statement about a computation. Tokens are ordered
//! lexicographically by name; every place in the crate that needs a canonical
//! choice (counterexample minimality, representative selection, file output)
//! relies on this single global order.

use std::fmt;
use std::sync::Arc;

/// An interned symbol. Plain token names are drawn from `[A-Za-z0-9_']`;
/// constructed tokens (pair tokens of product systems) additionally use
/// `.` as a separator and `\` as an escape.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Token(Arc<str>);

impl Token {
    /// Creates a token. Panics on an empty name; character-level validation
    /// is the parser's job so that constructed names stay representable.
    pub fn new(name: &str) -> Token {
        assert!(!name.is_empty(), "token name must be non-empty");
        Token(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl PartialOrd for Token {
    fn partial_cmp(&self, other: &Token) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Token {
    fn cmp(&self, other: &Token) -> std::cmp::Ordering {
        self.0.as_ref().cmp(other.0.as_ref())
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Token {
    fn from(s: &str) -> Token {
        Token::new(s)
    }
}

/// A finite set of tokens in canonical form: strictly ascending under the
/// global order, no duplicates. Set equality is sequence equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TokenSet(Vec<Token>);

impl TokenSet {
    pub fn empty() -> TokenSet {
        TokenSet(Vec::new())
    }

    pub fn from_vec(mut v: Vec<Token>) -> TokenSet {
        v.sort();
        v.dedup();
        TokenSet(v)
    }

    pub fn singleton(t: Token) -> TokenSet {
        TokenSet(vec![t])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, t: &Token) -> bool {
        self.0.binary_search(t).is_ok()
    }

    pub fn is_subset(&self, other: &TokenSet) -> bool {
        self.0.iter().all(|t| other.contains(t))
    }

    pub fn union(&self, other: &TokenSet) -> TokenSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        TokenSet::from_vec(v)
    }

    pub fn insert(&self, t: Token) -> TokenSet {
        if self.contains(&t) {
            self.clone()
        } else {
            let mut v = self.0.clone();
            v.push(t);
            TokenSet::from_vec(v)
        }
    }

    pub fn remove(&self, t: &Token) -> TokenSet {
        TokenSet(self.0.iter().filter(|x| *x != t).cloned().collect())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Token] {
        &self.0
    }

    /// All subsets, in mask order; each subset is canonical. Intended for
    /// desk-scale sets only.
    pub fn subsets(&self) -> impl Iterator<Item = TokenSet> + '_ {
        let n = self.0.len();
        assert!(n < 26, "subset enumeration of a set this large is a bug");
        (0u32..1 << n).map(move |mask| {
            TokenSet(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, t)| t.clone())
                    .collect(),
            )
        })
    }
}

impl FromIterator<Token> for TokenSet {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> TokenSet {
        TokenSet::from_vec(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a TokenSet {
    type Item = &'a Token;
    type IntoIter = std::slice::Iter<'a, Token>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for TokenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, t) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for TokenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Convenience constructor used pervasively in tests.
pub fn toks(names: &[&str]) -> TokenSet {
    TokenSet::from_vec(names.iter().map(|n| Token::new(n)).collect())
}
