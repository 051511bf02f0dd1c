//! Rank matrices and the closure order.
//!
//! For a graded nilpotent `f = (f_t: W_t → W_{t+1})` on one line with exponents
//! in `[e_min, e_max]`, entry `(i, j)` (1-based, `i ≤ j`) is the rank of
//! `f_{e_max−i} ∘ ⋯ ∘ f_{e_max−j}`, the composite from `W_{e_max−j}` to
//! `W_{e_max−i+1}`. A segment `[b, e]` contributes 1 exactly on the window
//! `e_max − e + 1 ≤ i ≤ j ≤ e_max − b`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::halfint::HalfInt;
use crate::model::{LParameter, LineKey, MultiSegment};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankMatrix {
    pub e_min: HalfInt,
    pub e_max: HalfInt,
    /// Row-major `l × l`, zeros below the diagonal.
    pub entries: Vec<Vec<u32>>,
}

impl RankMatrix {
    pub fn zero(e_min: HalfInt, e_max: HalfInt) -> Result<Self> {
        let l = e_max
            .int_diff(e_min)
            .filter(|&l| l >= 0)
            .ok_or_else(|| CoreError::AnchorMismatch(e_min.to_string(), e_max.to_string()))?
            as usize;
        Ok(RankMatrix { e_min, e_max, entries: vec![vec![0; l]; l] })
    }

    /// `e_max − e_min`.
    pub fn l(&self) -> usize {
        self.entries.len()
    }

    /// 1-based entry `r_{ij}`.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i - 1][j - 1]
    }

    fn anchors(&self) -> String {
        format!("{}, {}", self.e_min, self.e_max)
    }

    fn check_anchors(&self, other: &RankMatrix) -> Result<()> {
        if self.e_min == other.e_min && self.e_max == other.e_max {
            Ok(())
        } else {
            Err(CoreError::AnchorMismatch(self.anchors(), other.anchors()))
        }
    }

    /// Entrywise `≤`: the orbit of `self` lies in the closure of the orbit of `other`.
    pub fn leq(&self, other: &RankMatrix) -> Result<bool> {
        self.check_anchors(other)?;
        Ok(self
            .entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .all(|(a, b)| a <= b))
    }

    pub fn add(&self, other: &RankMatrix) -> Result<RankMatrix> {
        self.check_anchors(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + b).collect())
            .collect();
        Ok(RankMatrix { e_min: self.e_min, e_max: self.e_max, entries })
    }

    /// Extends to the window `[e_min, e_max] ⊇` the current one; new entries are zero.
    pub fn pad(&self, e_min: HalfInt, e_max: HalfInt) -> Result<RankMatrix> {
        let mismatch = || CoreError::AnchorMismatch(self.anchors(), format!("{e_min}, {e_max}"));
        let off = e_max.int_diff(self.e_max).filter(|&d| d >= 0).ok_or_else(mismatch)? as usize;
        if self.e_min.int_diff(e_min).filter(|&d| d >= 0).is_none() {
            return Err(mismatch());
        }
        let mut out = RankMatrix::zero(e_min, e_max)?;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                out.entries[i + off][j + off] = v;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for RankMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| format!("[{}]", r.iter().map(u32::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "({}..{}) [{}]", self.e_min, self.e_max, rows.join(","))
    }
}

/// Rank matrix of a multi-segment supported on one GL line.
pub fn rank_matrix(m: &MultiSegment) -> Result<RankMatrix> {
    m.single_gl_line()?;
    let e_max = m.max_end().ok_or(CoreError::Empty)?;
    let e_min = m.min_begin().ok_or(CoreError::Empty)?;
    let mut out = RankMatrix::zero(e_min, e_max)?;
    for (s, k) in m.iter() {
        let lo = e_max.int_diff(s.e()).expect("same grid") as usize + 1;
        let hi = e_max.int_diff(s.b()).expect("same grid") as usize;
        for i in lo..=hi {
            for j in i..=hi {
                out.entries[i - 1][j - 1] += k as u32;
            }
        }
    }
    Ok(out)
}

/// Rank matrix per GL line.
pub fn rank_matrices(m: &MultiSegment) -> Result<BTreeMap<LineKey, RankMatrix>> {
    m.decompose_gl_lines().into_iter().map(|(k, part)| Ok((k, rank_matrix(&part)?))).collect()
}

/// `p1 ≤_C p2`: the orbit of `p1` lies in the closure of the orbit of `p2`.
pub fn closure_leq(p1: &LParameter, p2: &LParameter) -> Result<bool> {
    if p1.group != p2.group {
        return Err(CoreError::GroupMismatch(p1.group.to_string(), p2.group.to_string()));
    }
    if p1.infinitesimal() != p2.infinitesimal() {
        return Err(CoreError::InfinitesimalMismatch);
    }
    let r1 = rank_matrices(&p1.mseg)?;
    let r2 = rank_matrices(&p2.mseg)?;
    for (key, a) in &r1 {
        let b = r2.get(key).ok_or(CoreError::InfinitesimalMismatch)?;
        let lo = a.e_min.min(b.e_min);
        let hi = a.e_max.max(b.e_max);
        if !a.pad(lo, hi)?.leq(&b.pad(lo, hi)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}
