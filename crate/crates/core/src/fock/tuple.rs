use crate::error::{Error, Result};
use crate::modespace::{Character, ModeSpace};
use crate::num::factorial;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Character content `(P, Q, R)` of a multi-polariton label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl Signature {
    pub const fn new(p: usize, q: usize, r: usize) -> Self {
        Self { p, q, r }
    }

    pub fn total(&self) -> usize {
        self.p + self.q + self.r
    }

    pub fn is_s_only(&self) -> bool {
        self.q == 0 && self.r == 0
    }

    pub fn count(&self, ch: Character) -> usize {
        match ch {
            Character::S => self.p,
            Character::E => self.q,
            Character::M => self.r,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.q, self.r)
    }
}

/// Multi-polariton label: global mode indices grouped by character.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PolaritonTuple {
    pub s: Vec<usize>,
    pub e: Vec<usize>,
    pub m: Vec<usize>,
}

impl PolaritonTuple {
    pub fn new(s: Vec<usize>, e: Vec<usize>, m: Vec<usize>) -> Self {
        Self { s, e, m }
    }

    pub fn s_only(s: Vec<usize>) -> Self {
        Self { s, e: Vec::new(), m: Vec::new() }
    }

    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.s.len(), self.e.len(), self.m.len())
    }

    pub fn len(&self) -> usize {
        self.s.len() + self.e.len() + self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn group(&self, ch: Character) -> &[usize] {
        match ch {
            Character::S => &self.s,
            Character::E => &self.e,
            Character::M => &self.m,
        }
    }

    /// Concatenation `s ++ e ++ m`.
    pub fn labels(&self) -> impl Iterator<Item = usize> + '_ {
        self.s.iter().chain(&self.e).chain(&self.m).copied()
    }

    pub fn canonical(&self) -> Self {
        let mut t = self.clone();
        t.s.sort_unstable();
        t.e.sort_unstable();
        t.m.sort_unstable();
        t
    }

    pub fn is_canonical(&self) -> bool {
        [&self.s, &self.e, &self.m].iter().all(|g| g.windows(2).all(|w| w[0] <= w[1]))
    }

    /// `(P!/prod n_i!) (Q!/prod n_j!) (R!/prod n_k!)`: number of distinct
    /// orderings within each character group.
    pub fn multiplicity(&self) -> u64 {
        [&self.s, &self.e, &self.m].iter().map(|g| group_multiplicity(g)).product()
    }

    /// Check every label exists and carries the character of its group.
    pub fn validate(&self, space: &ModeSpace) -> Result<()> {
        for ch in Character::ALL {
            for &idx in self.group(ch) {
                match space.character_of(idx) {
                    Some(c) if c == ch => {}
                    Some(c) => {
                        return Err(Error::InvalidLabel(format!(
                            "mode {idx} has character {c} but sits in the {ch} group"
                        )))
                    }
                    None => return Err(Error::InvalidLabel(format!("mode {idx} out of range"))),
                }
            }
        }
        Ok(())
    }

    /// Sorted list of sector tags over all labels.
    pub fn sector_tags(&self, space: &ModeSpace) -> Vec<usize> {
        let mut tags: Vec<usize> = self.labels().filter_map(|i| space.sector_of(i)).collect();
        tags.sort_unstable();
        tags
    }
}

impl fmt::Display for PolaritonTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{:?} e{:?} m{:?}", self.s, self.e, self.m)
    }
}

fn group_multiplicity(g: &[usize]) -> u64 {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in g {
        *counts.entry(i).or_default() += 1;
    }
    factorial(g.len()) / counts.values().map(|&c| factorial(c)).product::<u64>()
}

/// Sparse occupation numbers over global mode indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OccupationState {
    counts: BTreeMap<usize, usize>,
    total: usize,
}

impl OccupationState {
    pub fn new(counts: BTreeMap<usize, usize>) -> Self {
        let counts: BTreeMap<usize, usize> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        let total = counts.values().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &BTreeMap<usize, usize> {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn get(&self, mode: usize) -> usize {
        self.counts.get(&mode).copied().unwrap_or(0)
    }

    /// `prod_i n_i!`.
    pub fn factorial_product(&self) -> u64 {
        self.counts.values().map(|&c| factorial(c)).product()
    }
}

pub fn tuple_to_occupation(t: &PolaritonTuple) -> OccupationState {
    let mut counts = BTreeMap::new();
    for i in t.labels() {
        *counts.entry(i).or_default() += 1;
    }
    OccupationState::new(counts)
}

/// Canonical tuple of an occupation state together with its multiplicity.
pub fn occupation_to_tuples(o: &OccupationState, space: &ModeSpace) -> Result<(u64, PolaritonTuple)> {
    let mut t = PolaritonTuple::default();
    for (&mode, &count) in o.counts() {
        let group = match space.character_of(mode) {
            Some(Character::S) => &mut t.s,
            Some(Character::E) => &mut t.e,
            Some(Character::M) => &mut t.m,
            None => return Err(Error::InvalidLabel(format!("mode {mode} out of range"))),
        };
        group.extend(std::iter::repeat_n(mode, count));
    }
    Ok((t.multiplicity(), t))
}

/// All signatures with `P + Q + R = n` that the mode space can host.
pub fn enumerate_sectors(n: usize, space: &ModeSpace) -> Vec<Signature> {
    let has_e = space.count(Character::E) > 0;
    let has_m = space.count(Character::M) > 0;
    let mut out = Vec::new();
    for p in (0..=n).rev() {
        for q in (0..=n - p).rev() {
            let r = n - p - q;
            if (q > 0 && !has_e) || (r > 0 && !has_m) {
                continue;
            }
            out.push(Signature::new(p, q, r));
        }
    }
    out
}

/// Sorted multisets of size `k` drawn from `modes`, in lexicographic order.
pub fn multisets(modes: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(modes: &[usize], start: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..modes.len() {
            cur.push(modes[i]);
            rec(modes, i, k, cur, out);
            cur.pop();
        }
    }
    rec(modes, 0, k, &mut cur, &mut out);
    out
}

/// Every canonical tuple of a signature, ordered lexicographically.
pub fn canonical_tuples(sig: Signature, space: &ModeSpace) -> Vec<PolaritonTuple> {
    let ss = multisets(space.modes(Character::S), sig.p);
    let es = multisets(space.modes(Character::E), sig.q);
    let ms = multisets(space.modes(Character::M), sig.r);
    let mut out = Vec::with_capacity(ss.len() * es.len() * ms.len());
    for s in &ss {
        for e in &es {
            for m in &ms {
                out.push(PolaritonTuple::new(s.clone(), e.clone(), m.clone()));
            }
        }
    }
    out
}

/// Distinct orderings of a multiset (input need not be sorted).
pub fn distinct_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = items.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    loop {
        // next lexicographic permutation
        let n = cur.len();
        if n < 2 {
            break;
        }
        let mut i = n - 1;
        while i > 0 && cur[i - 1] >= cur[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while cur[j] <= cur[i - 1] {
            j -= 1;
        }
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
    out
}
