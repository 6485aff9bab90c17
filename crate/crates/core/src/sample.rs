//! Orbit samples: every periodic orbit up to a period, plus seeded random
//! admissible windows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sft::{CyclicWord, ShiftSpace, Symbol, SymbolSource, Word};

/// Hard cap on the total number of symbols in an exhaustive periodic
/// enumeration (sum of periods over all orbits).
pub const ORBIT_SYMBOL_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    /// All periodic orbits of period `1..=max_period` (0 disables).
    pub max_period: usize,
    /// Number of random admissible windows.
    pub random_windows: usize,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(max_period: usize, random_windows: usize, seed: u64) -> Self {
        Self { max_period, random_windows, seed }
    }
}

/// A sampled point of the shift.
#[derive(Debug, Clone, PartialEq)]
pub enum Orbit {
    Periodic(CyclicWord),
    Window(Word),
}

impl Orbit {
    pub fn label(&self) -> String {
        match self {
            Orbit::Periodic(p) => format!("periodic:{p}"),
            Orbit::Window(w) => format!("window:{w}@{}", w.anchor()),
        }
    }
}

impl SymbolSource for Orbit {
    fn symbol_at(&self, position: isize) -> Option<Symbol> {
        match self {
            Orbit::Periodic(p) => p.symbol_at(position),
            Orbit::Window(w) => w.symbol_at(position),
        }
    }
}

/// Every admissible cyclic word of length `1..=max_period`, by period then
/// lexicographically. Refuses when the total symbol count exceeds
/// [`ORBIT_SYMBOL_CAP`].
pub fn periodic_orbits(shift: &ShiftSpace, max_period: usize) -> Result<Vec<CyclicWord>> {
    let mut symbols: u128 = 0;
    for n in 1..=max_period {
        symbols = symbols.saturating_add(shift.periodic_count(n).saturating_mul(n as u128));
        if symbols > ORBIT_SYMBOL_CAP {
            return Err(Error::PeriodTooLarge { count: symbols, cap: ORBIT_SYMBOL_CAP });
        }
    }
    let mut out = Vec::new();
    for n in 1..=max_period {
        out.extend(shift.enumerate_periodic(n, ORBIT_SYMBOL_CAP)?);
    }
    Ok(out)
}

/// A uniform random walk on the transition graph covering positions
/// `-before..after`. The first symbol is uniform over the alphabet; each
/// later symbol is uniform over the allowed successors.
pub fn random_window<R: Rng>(shift: &ShiftSpace, before: usize, after: usize, rng: &mut R) -> Word {
    let len = before + after;
    let mut symbols = Vec::with_capacity(len);
    if len > 0 {
        symbols.push(rng.random_range(0..shift.alphabet_size()) as Symbol);
    }
    while symbols.len() < len {
        let last = *symbols.last().expect("non-empty");
        let next: Vec<Symbol> = shift.successors(last).collect();
        symbols.push(next[rng.random_range(0..next.len())]);
    }
    Word::new(symbols, before as isize)
}

/// `count` seeded random windows, each covering `-before..after`.
pub fn random_windows(shift: &ShiftSpace, count: usize, before: usize, after: usize, seed: u64) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_window(shift, before, after, &mut rng)).collect()
}

/// The orbits described by `spec`; random windows cover `-before..after`.
pub fn sample_orbits(shift: &ShiftSpace, spec: &SampleSpec, before: usize, after: usize) -> Result<Vec<Orbit>> {
    let mut out: Vec<Orbit> = periodic_orbits(shift, spec.max_period)?
        .into_iter()
        .map(Orbit::Periodic)
        .collect();
    out.extend(
        random_windows(shift, spec.random_windows, before, after, spec.seed)
            .into_iter()
            .map(Orbit::Window),
    );
    if out.is_empty() {
        return Err(Error::InsufficientSamples("sample specification selects no orbits".into()));
    }
    Ok(out)
}
