//! Discrete polariton channels grouped by frequency sector and character.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Character {
    S,
    E,
    M,
}

impl Character {
    pub const ALL: [Character; 3] = [Character::S, Character::E, Character::M];

    pub fn index(self) -> usize {
        match self {
            Character::S => 0,
            Character::E => 1,
            Character::M => 2,
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Character::S => "s",
            Character::E => "e",
            Character::M => "m",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencySector {
    pub frequency: f64,
    pub n_s: usize,
    pub n_e: usize,
    pub n_m: usize,
}

impl FrequencySector {
    pub fn new(frequency: f64, n_s: usize, n_e: usize, n_m: usize) -> Self {
        Self { frequency, n_s, n_e, n_m }
    }

    pub fn count(&self, ch: Character) -> usize {
        match ch {
            Character::S => self.n_s,
            Character::E => self.n_e,
            Character::M => self.n_m,
        }
    }

    pub fn size(&self) -> usize {
        self.n_s + self.n_e + self.n_m
    }

    /// Offset of the character block inside the sector.
    fn block_offset(&self, ch: Character) -> usize {
        match ch {
            Character::S => 0,
            Character::E => self.n_s,
            Character::M => self.n_s + self.n_e,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeLabel {
    pub sector: usize,
    pub character: Character,
    pub channel: usize,
}

impl ModeLabel {
    pub fn new(sector: usize, character: Character, channel: usize) -> Self {
        Self { sector, character, channel }
    }
}

/// Registry of all channels. Global indices are sector-major, then s, e, m,
/// then channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpace {
    sectors: Vec<FrequencySector>,
    offsets: Vec<usize>,
    total_modes: usize,
    by_character: [Vec<usize>; 3],
    labels: Vec<ModeLabel>,
    local: Vec<usize>,
}

impl ModeSpace {
    pub fn new(sectors: Vec<FrequencySector>) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::InvalidLabel("mode space needs at least one sector".into()));
        }
        for (k, sec) in sectors.iter().enumerate() {
            if !(sec.frequency.is_finite() && sec.frequency > 0.0) {
                return Err(Error::InvalidLabel(format!(
                    "sector {k}: frequency must be positive, got {}",
                    sec.frequency
                )));
            }
            if sec.n_s == 0 {
                return Err(Error::InvalidLabel(format!("sector {k}: n_s must be at least 1")));
            }
            if k > 0 && sec.frequency <= sectors[k - 1].frequency {
                return Err(Error::InvalidLabel(format!(
                    "sector {k}: frequencies must be strictly increasing"
                )));
            }
        }
        let mut offsets = Vec::with_capacity(sectors.len());
        let mut labels = Vec::new();
        let mut by_character: [Vec<usize>; 3] = Default::default();
        let mut local = Vec::new();
        let mut total = 0;
        for (k, sec) in sectors.iter().enumerate() {
            offsets.push(total);
            for ch in Character::ALL {
                for channel in 0..sec.count(ch) {
                    let idx = total + sec.block_offset(ch) + channel;
                    debug_assert_eq!(idx, labels.len());
                    labels.push(ModeLabel::new(k, ch, channel));
                    local.push(by_character[ch.index()].len());
                    by_character[ch.index()].push(idx);
                }
            }
            total += sec.size();
        }
        Ok(Self { sectors, offsets, total_modes: total, by_character, labels, local })
    }

    /// Single sector with the given channel counts at unit frequency.
    pub fn single(n_s: usize, n_e: usize, n_m: usize) -> Result<Self> {
        Self::new(vec![FrequencySector::new(1.0, n_s, n_e, n_m)])
    }

    pub fn sectors(&self) -> &[FrequencySector] {
        &self.sectors
    }

    pub fn total_modes(&self) -> usize {
        self.total_modes
    }

    pub fn sector_range(&self, sector: usize) -> Range<usize> {
        let start = self.offsets[sector];
        start..start + self.sectors[sector].size()
    }

    pub fn flatten(&self, label: ModeLabel) -> Result<usize> {
        let sec = self.sectors.get(label.sector).ok_or_else(|| {
            Error::InvalidLabel(format!("sector {} out of range", label.sector))
        })?;
        if label.channel >= sec.count(label.character) {
            return Err(Error::InvalidLabel(format!(
                "channel {} out of range for character {} in sector {}",
                label.channel, label.character, label.sector
            )));
        }
        Ok(self.offsets[label.sector] + sec.block_offset(label.character) + label.channel)
    }

    pub fn unflatten(&self, index: usize) -> Result<ModeLabel> {
        self.labels
            .get(index)
            .copied()
            .ok_or_else(|| Error::InvalidLabel(format!("global index {index} out of range")))
    }

    pub fn label(&self, index: usize) -> Option<ModeLabel> {
        self.labels.get(index).copied()
    }

    pub fn character_of(&self, index: usize) -> Option<Character> {
        self.labels.get(index).map(|l| l.character)
    }

    pub fn sector_of(&self, index: usize) -> Option<usize> {
        self.labels.get(index).map(|l| l.sector)
    }

    /// Global indices of every channel of one character, in global order.
    pub fn modes(&self, ch: Character) -> &[usize] {
        &self.by_character[ch.index()]
    }

    pub fn count(&self, ch: Character) -> usize {
        self.by_character[ch.index()].len()
    }

    /// Position of a global index inside [`ModeSpace::modes`] of its character.
    pub fn local_index(&self, index: usize) -> Option<usize> {
        self.local.get(index).copied()
    }
}
