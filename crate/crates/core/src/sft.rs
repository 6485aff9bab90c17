//! Subshifts of finite type.
//!
//! Symbols are stored 0-based (`0..alphabet`) and printed 1-based, so the
//! word written `1,2,1` is stored as `[0, 1, 0]`. Bi-infinite sequences are
//! only ever seen through finite anchored windows ([`Word`]) or through
//! periodic points ([`CyclicWord`]); both implement [`SymbolSource`].

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u16;

/// Default cap on the number of words produced by an enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Anything that can answer "which symbol sits at position `i`".
pub trait SymbolSource {
    fn symbol_at(&self, position: isize) -> Option<Symbol>;

    /// Symbols at `from..=to`, or the first missing position.
    fn symbols_in(&self, from: isize, to: isize) -> Result<Vec<Symbol>> {
        (from..=to)
            .map(|p| {
                self.symbol_at(p)
                    .ok_or(Error::WindowTooShort { position: p })
            })
            .collect()
    }
}

/// A finite window of a bi-infinite sequence. `anchor` is the index in
/// `symbols` of position 0; it may lie outside the slice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    symbols: Vec<Symbol>,
    anchor: isize,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>, anchor: isize) -> Self {
        Self { symbols, anchor }
    }

    /// Window whose first symbol sits at position 0.
    pub fn from_start(symbols: Vec<Symbol>) -> Self {
        Self::new(symbols, 0)
    }

    /// Window of odd length `2n+1` centred at position 0.
    pub fn centered(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "a centred window needs odd length, got {}",
                symbols.len()
            )));
        }
        let anchor = (symbols.len() / 2) as isize;
        Ok(Self::new(symbols, anchor))
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn anchor(&self) -> isize {
        self.anchor
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Lowest and highest covered positions, if any.
    pub fn position_range(&self) -> Option<(isize, isize)> {
        if self.symbols.is_empty() {
            None
        } else {
            Some((-self.anchor, self.symbols.len() as isize - 1 - self.anchor))
        }
    }

    /// Largest `R` such that all positions `|i| <= R` are covered.
    pub fn radius(&self) -> Option<usize> {
        let (lo, hi) = self.position_range()?;
        if lo > 0 || hi < 0 {
            return None;
        }
        Some((-lo).min(hi) as usize)
    }

    /// The sub-window on positions `from..=to`, re-anchored.
    pub fn slice(&self, from: isize, to: isize) -> Result<Word> {
        let symbols = self.symbols_in(from, to)?;
        Ok(Word::new(symbols, -from))
    }

    /// This window shifted so that position `offset` becomes position 0.
    pub fn shifted(&self, offset: isize) -> Word {
        Word::new(self.symbols.clone(), self.anchor + offset)
    }
}

impl SymbolSource for Word {
    fn symbol_at(&self, position: isize) -> Option<Symbol> {
        let idx = self.anchor + position;
        if idx < 0 {
            return None;
        }
        self.symbols.get(idx as usize).copied()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_symbols(f, &self.symbols)
    }
}

/// A periodic point, given by one period of its symbol sequence. Position 0
/// is the first symbol; positions wrap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    symbols: Vec<Symbol>,
}

impl CyclicWord {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParameter("cyclic word must be non-empty".into()));
        }
        Ok(Self { symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn period(&self) -> usize {
        self.symbols.len()
    }

    /// The same periodic orbit seen from position `k`.
    pub fn rotated(&self, k: isize) -> CyclicWord {
        let n = self.symbols.len() as isize;
        let start = k.rem_euclid(n) as usize;
        let mut symbols = Vec::with_capacity(self.symbols.len());
        symbols.extend_from_slice(&self.symbols[start..]);
        symbols.extend_from_slice(&self.symbols[..start]);
        CyclicWord { symbols }
    }
}

impl SymbolSource for CyclicWord {
    fn symbol_at(&self, position: isize) -> Option<Symbol> {
        let n = self.symbols.len() as isize;
        Some(self.symbols[position.rem_euclid(n) as usize])
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_symbols(f, &self.symbols)
    }
}

fn write_symbols(f: &mut fmt::Formatter<'_>, symbols: &[Symbol]) -> fmt::Result {
    for (i, s) in symbols.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{}", *s as usize + 1)?;
    }
    Ok(())
}

/// Parse a 1-based symbol list. Commas separate symbols; without commas each
/// character is one decimal digit, so `"121"` and `"1,2,1"` are the same.
pub fn parse_symbols(text: &str) -> Result<Vec<Symbol>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let parse_one = |tok: &str| -> Result<Symbol> {
        let v: usize = tok
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad symbol {tok:?} in {text:?}")))?;
        if v == 0 || v > Symbol::MAX as usize {
            return Err(Error::Parse(format!("symbol {v} out of range in {text:?}")));
        }
        Ok((v - 1) as Symbol)
    };
    if text.contains(',') {
        text.split(',').map(parse_one).collect()
    } else {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| parse_one(&c.to_string()))
            .collect()
    }
}

/// Format 0-based symbols as a 1-based comma-separated list.
pub fn format_symbols(symbols: &[Symbol]) -> String {
    symbols
        .iter()
        .map(|s| (*s as usize + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// On-disk form of a shift space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftFile {
    pub alphabet: usize,
    pub transition: Vec<Vec<i64>>,
}

/// A transitive subshift of finite type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSpace {
    alphabet: usize,
    transition: Vec<Vec<bool>>,
    closing_constant: usize,
    // connectors[i][j]: shortest, then lexicographically smallest, word c
    // with i -> c -> j admissible.
    connectors: Vec<Vec<Vec<Symbol>>>,
}

impl ShiftSpace {
    /// Build from a 0/1 matrix; rejects non-transitive graphs.
    pub fn new(transition: &[Vec<i64>]) -> Result<Self> {
        let m = transition.len();
        if m == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if m > Symbol::MAX as usize {
            return Err(Error::InvalidParameter(format!("alphabet of size {m} is too large")));
        }
        let mut q = vec![vec![false; m]; m];
        for (i, row) in transition.iter().enumerate() {
            if row.len() != m {
                return Err(Error::NotSquare { rows: m, row: i, cols: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                q[i][j] = match v {
                    0 => false,
                    1 => true,
                    _ => return Err(Error::NonBinary { row: i, col: j, value: v }),
                };
            }
        }

        let mut connectors = vec![vec![Vec::new(); m]; m];
        let mut closing_constant = 0;
        for to in 0..m {
            let dist = distances_to(&q, to);
            for from in 0..m {
                if dist[from] == usize::MAX {
                    return Err(Error::NonTransitive { from: from + 1, to: to + 1 });
                }
                let c = greedy_connector(&q, &dist, from, to);
                closing_constant = closing_constant.max(c.len());
                connectors[from][to] = c;
            }
        }

        Ok(Self { alphabet: m, transition: q, closing_constant, connectors })
    }

    pub fn from_file(file: &ShiftFile) -> Result<Self> {
        if file.alphabet != file.transition.len() {
            return Err(Error::DimensionMismatch {
                expected: file.alphabet,
                got: file.transition.len(),
            });
        }
        Self::new(&file.transition)
    }

    /// The full shift on `m` symbols.
    pub fn full(m: usize) -> Result<Self> {
        Self::new(&vec![vec![1; m]; m])
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    /// Maximal connector length needed to close any word.
    pub fn closing_constant(&self) -> usize {
        self.closing_constant
    }

    pub fn allows(&self, from: Symbol, to: Symbol) -> bool {
        self.transition[from as usize][to as usize]
    }

    /// Allowed successors of `s`, in increasing order.
    pub fn successors(&self, s: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        self.transition[s as usize]
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(j, _)| j as Symbol)
    }

    pub fn transition_matrix(&self) -> Vec<Vec<i64>> {
        self.transition
            .iter()
            .map(|row| row.iter().map(|&b| b as i64).collect())
            .collect()
    }

    pub fn to_file(&self) -> ShiftFile {
        ShiftFile { alphabet: self.alphabet, transition: self.transition_matrix() }
    }

    /// Shortest connector from `from` back to `to`.
    pub fn connector(&self, from: Symbol, to: Symbol) -> &[Symbol] {
        &self.connectors[from as usize][to as usize]
    }

    fn check_symbols(&self, symbols: &[Symbol]) -> Result<()> {
        match symbols.iter().find(|&&s| s as usize >= self.alphabet) {
            Some(&s) => Err(Error::SymbolOutOfRange { symbol: s as usize + 1, alphabet: self.alphabet }),
            None => Ok(()),
        }
    }

    fn first_forbidden(&self, symbols: &[Symbol]) -> Option<(Symbol, Symbol)> {
        symbols
            .windows(2)
            .find(|w| !self.allows(w[0], w[1]))
            .map(|w| (w[0], w[1]))
    }

    /// Whether every adjacent pair of the symbol sequence is allowed.
    pub fn is_admissible(&self, symbols: &[Symbol]) -> Result<bool> {
        self.check_symbols(symbols)?;
        Ok(self.first_forbidden(symbols).is_none())
    }

    pub fn is_admissible_word(&self, w: &Word) -> Result<bool> {
        self.is_admissible(w.symbols())
    }

    /// Adjacent pairs and the wrap-around pair must all be allowed.
    pub fn is_admissible_cyclic(&self, w: &CyclicWord) -> Result<bool> {
        let s = w.symbols();
        Ok(self.is_admissible(s)? && self.allows(s[s.len() - 1], s[0]))
    }

    /// Like [`is_admissible`](Self::is_admissible) but reports the offending pair.
    pub fn require_admissible(&self, symbols: &[Symbol]) -> Result<()> {
        self.check_symbols(symbols)?;
        match self.first_forbidden(symbols) {
            Some((a, b)) => Err(Error::Inadmissible { from: a as usize + 1, to: b as usize + 1 }),
            None => Ok(()),
        }
    }

    /// Complete an admissible word to a periodic one by appending the
    /// shortest (then lexicographically smallest) connector back to its
    /// first symbol.
    pub fn close_word(&self, w: &Word) -> Result<CyclicWord> {
        if w.is_empty() {
            return Err(Error::InvalidParameter("cannot close an empty word".into()));
        }
        self.require_admissible(w.symbols())?;
        let s = w.symbols();
        let mut symbols = s.to_vec();
        symbols.extend_from_slice(self.connector(s[s.len() - 1], s[0]));
        CyclicWord::new(symbols)
    }

    /// `trace(Q^n)`, saturating at `u128::MAX`.
    pub fn periodic_count(&self, n: usize) -> u128 {
        let m = self.alphabet;
        let mut acc: Vec<Vec<u128>> = (0..m)
            .map(|i| (0..m).map(|j| (i == j) as u128).collect())
            .collect();
        for _ in 0..n {
            let mut next = vec![vec![0u128; m]; m];
            for i in 0..m {
                for k in 0..m {
                    if acc[i][k] == 0 {
                        continue;
                    }
                    for j in 0..m {
                        if self.transition[k][j] {
                            next[i][j] = next[i][j].saturating_add(acc[i][k]);
                        }
                    }
                }
            }
            acc = next;
        }
        (0..m).fold(0u128, |t, i| t.saturating_add(acc[i][i]))
    }

    /// All admissible cyclic words of length exactly `n`, sorted
    /// lexicographically. Words whose least period divides `n` are included.
    pub fn enumerate_periodic(&self, n: usize, cap: u128) -> Result<Vec<CyclicWord>> {
        if n == 0 {
            return Err(Error::InvalidParameter("period must be at least 1".into()));
        }
        let count = self.periodic_count(n);
        if count > cap {
            return Err(Error::PeriodTooLarge { count, cap });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut stack = Vec::with_capacity(n);
        for first in 0..self.alphabet as Symbol {
            stack.clear();
            stack.push(first);
            self.extend_cyclic(n, &mut stack, &mut out);
        }
        Ok(out)
    }

    fn extend_cyclic(&self, n: usize, stack: &mut Vec<Symbol>, out: &mut Vec<CyclicWord>) {
        let last = *stack.last().expect("non-empty stack");
        if stack.len() == n {
            if self.allows(last, stack[0]) {
                out.push(CyclicWord { symbols: stack.clone() });
            }
            return;
        }
        for next in 0..self.alphabet as Symbol {
            if self.allows(last, next) {
                stack.push(next);
                self.extend_cyclic(n, stack, out);
                stack.pop();
            }
        }
    }

    /// All admissible words of length exactly `len`, sorted lexicographically.
    pub fn enumerate_words(&self, len: usize, cap: u128) -> Result<Vec<Vec<Symbol>>> {
        if len == 0 {
            return Ok(vec![Vec::new()]);
        }
        // number of paths with len-1 edges = sum of entries of Q^{len-1}
        let mut counts = vec![1u128; self.alphabet];
        for _ in 1..len {
            let mut next = vec![0u128; self.alphabet];
            for (i, row) in self.transition.iter().enumerate() {
                for (j, &a) in row.iter().enumerate() {
                    if a {
                        next[i] = next[i].saturating_add(counts[j]);
                    }
                }
            }
            counts = next;
        }
        let total = counts.iter().fold(0u128, |t, c| t.saturating_add(*c));
        if total > cap {
            return Err(Error::PeriodTooLarge { count: total, cap });
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut stack = Vec::with_capacity(len);
        for first in 0..self.alphabet as Symbol {
            stack.push(first);
            self.extend_linear(len, &mut stack, &mut out);
            stack.pop();
        }
        Ok(out)
    }

    fn extend_linear(&self, len: usize, stack: &mut Vec<Symbol>, out: &mut Vec<Vec<Symbol>>) {
        if stack.len() == len {
            out.push(stack.clone());
            return;
        }
        let last = *stack.last().expect("non-empty stack");
        for next in 0..self.alphabet as Symbol {
            if self.allows(last, next) {
                stack.push(next);
                self.extend_linear(len, stack, out);
                stack.pop();
            }
        }
    }
}

// Number of edges on a shortest path from each vertex to `target` (>= 1).
fn distances_to(q: &[Vec<bool>], target: usize) -> Vec<usize> {
    let m = q.len();
    let mut dist = vec![usize::MAX; m];
    let mut queue = VecDeque::new();
    for v in 0..m {
        if q[v][target] {
            dist[v] = 1;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for v in 0..m {
            if q[v][u] && dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn greedy_connector(q: &[Vec<bool>], dist: &[usize], from: usize, to: usize) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(dist[from] - 1);
    let mut cur = from;
    while dist[cur] > 1 {
        let next = (0..q.len())
            .find(|&v| q[cur][v] && dist[v] == dist[cur] - 1)
            .expect("BFS distances are consistent");
        out.push(next as Symbol);
        cur = next;
    }
    debug_assert!(q[cur][to]);
    out
}

/// Result of comparing two windows in the shift metric `d = e^{-N}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftDistance {
    pub value: f64,
    /// The windows agree on their whole common range; `value` is then the
    /// upper bound `e^{-(R+1)}`.
    pub truncated: bool,
}

/// Shift-metric distance between two windows, compared on the largest
/// symmetric range `|n| <= R` both of them cover.
pub fn shift_distance(a: &Word, b: &Word) -> Result<ShiftDistance> {
    let ra = a.radius().ok_or(Error::DisjointRanges)?;
    let rb = b.radius().ok_or(Error::DisjointRanges)?;
    let r = ra.min(rb) as isize;
    for n in 0..=r {
        for p in [n, -n] {
            if a.symbol_at(p) != b.symbol_at(p) {
                return Ok(ShiftDistance { value: (-(n as f64)).exp(), truncated: false });
            }
        }
    }
    Ok(ShiftDistance { value: (-((r + 1) as f64)).exp(), truncated: true })
}
