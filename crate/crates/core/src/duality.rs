//! Dualization algorithms on multi-segments.
//!
//! * [`mw_dual`]: Mœglin–Waldspurger, for GL lines, good-parity lines and the
//!   halves of non-self-dual pairs.
//! * [`az_bad`]: Lanard–Mínguez, for bad-parity lines. It extracts the same
//!   kind of chain as Mœglin–Waldspurger, but a candidate whose contragredient
//!   is already in the chain is only eligible if it occurs at least twice, and
//!   every chosen segment is removed together with its contragredient.
//! * [`pyasetskii_dual`]: per-line dispatch on the parity of each line.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::halfint::HalfInt;
use crate::model::{line_parity, GroupType, LParameter, LineKey, MultiSegment, Parity, RhoClass, Segment};

/// One extraction step: the maximal end `d`, the chain `Δ_{i_0} ≻ ⋯ ≻ Δ_{i_r}`,
/// and the remainder `m^#` the recursion continues on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractionTrace {
    pub d: HalfInt,
    pub chain: Vec<Segment>,
    pub remainder: MultiSegment,
}

impl ExtractionTrace {
    /// Length of the chain minus one.
    pub fn r(&self) -> usize {
        self.chain.len() - 1
    }

    /// The segment `[d − r, d]` this step contributes.
    pub fn output(&self) -> Segment {
        let rho = self.chain[0].rho().clone();
        Segment::new(rho, self.d.shift(-(self.r() as i64)), self.d).expect("nonempty")
    }
}

/// Chooses the chain. `eligible(candidate, chain)` adds extra conditions beyond
/// precedence and the end constraint.
fn extract_chain(m: &MultiSegment, eligible: impl Fn(&Segment, &[Segment]) -> bool) -> Result<(HalfInt, Vec<Segment>)> {
    m.single_gl_line()?;
    let d = m.max_end().ok_or(CoreError::Empty)?;
    // Canonical order is e descending then b descending: the first segment with
    // end d has maximal b.
    let first = m.iter().map(|(s, _)| s).find(|s| s.e() == d).expect("max end attained").clone();
    let mut chain = vec![first];
    loop {
        let prev = chain.last().expect("nonempty");
        let target = prev.e().shift(-1);
        let next = m
            .iter()
            .map(|(s, _)| s)
            .filter(|s| s.e() == target && s.precedes(prev) && eligible(s, &chain))
            .max_by_key(|s| s.b());
        match next {
            Some(s) => chain.push(s.clone()),
            None => break,
        }
    }
    Ok((d, chain))
}

/// One Mœglin–Waldspurger step on a nonempty single-line multi-segment.
pub fn mw_step(m: &MultiSegment) -> Result<ExtractionTrace> {
    let (d, chain) = extract_chain(m, |_, _| true)?;
    let mut remainder = m.clone();
    for s in &chain {
        remainder.remove(s, 1)?;
        remainder.insert_opt(s.minus());
    }
    Ok(ExtractionTrace { d, chain, remainder })
}

/// Mœglin–Waldspurger dual of a single-line multi-segment (possibly empty).
pub fn mw_dual(m: &MultiSegment) -> Result<MultiSegment> {
    Ok(mw_dual_traced(m)?.0)
}

pub fn mw_dual_traced(m: &MultiSegment) -> Result<(MultiSegment, Vec<ExtractionTrace>)> {
    let mut out = MultiSegment::new();
    let mut steps = Vec::new();
    let mut cur = m.clone();
    while !cur.is_empty() {
        let step = mw_step(&cur)?;
        out.insert(step.output(), 1);
        cur = step.remainder.clone();
        steps.push(step);
    }
    Ok((out, steps))
}

/// One Lanard–Mínguez step on a nonempty bad-parity line.
pub fn az_bad_step(m: &MultiSegment) -> Result<ExtractionTrace> {
    m.is_bad_parity_multiset()?;
    let (d, chain) = extract_chain(m, |cand, chain| {
        let dual = cand.dual();
        !chain.contains(&dual) || m.mult(cand) >= 2
    })?;
    let mut remainder = m.clone();
    for s in &chain {
        let dual = s.dual();
        remainder.remove(s, 1)?;
        remainder.remove(&dual, 1)?;
    }
    for s in &chain {
        remainder.insert_opt(s.minus());
        remainder.insert_opt(s.dual().preminus());
    }
    Ok(ExtractionTrace { d, chain, remainder })
}

/// Lanard–Mínguez dual of a bad-parity line (possibly empty).
pub fn az_bad(m: &MultiSegment) -> Result<MultiSegment> {
    Ok(az_bad_traced(m)?.0)
}

pub fn az_bad_traced(m: &MultiSegment) -> Result<(MultiSegment, Vec<ExtractionTrace>)> {
    let mut out = MultiSegment::new();
    let mut steps = Vec::new();
    let mut cur = m.clone();
    while !cur.is_empty() {
        let step = az_bad_step(&cur)?;
        let seg = step.output();
        out.insert(seg.dual(), 1);
        out.insert(seg, 1);
        cur = step.remainder.clone();
        steps.push(step);
    }
    Ok((out, steps))
}

/// Splits `m = m1 + dual(m1)` with `m1` on the smaller label of a non-self-dual pair.
fn split_pair(m: &MultiSegment) -> Result<(MultiSegment, Option<RhoClass>)> {
    if m.is_empty() {
        return Ok((MultiSegment::new(), None));
    }
    let key = m.single_line().map_err(|_| CoreError::NotPaired)?;
    if key.rho.is_self_dual() {
        return Err(CoreError::NotPaired);
    }
    let m1 = m.filter(|s| *s.rho() == key.rho);
    if m1.union(&m1.dual()) != *m {
        return Err(CoreError::NotPaired);
    }
    Ok((m1, Some(key.rho)))
}

/// Dual on a non-self-dual line `m1 + dual(m1)`: `mw_dual(m1) + dual(mw_dual(m1))`.
pub fn dual_nonselfdual(m: &MultiSegment) -> Result<MultiSegment> {
    Ok(dual_nonselfdual_traced(m)?.0)
}

pub fn dual_nonselfdual_traced(m: &MultiSegment) -> Result<(MultiSegment, Vec<ExtractionTrace>)> {
    let (m1, _) = split_pair(m)?;
    let (d1, steps) = mw_dual_traced(&m1)?;
    Ok((d1.union(&d1.dual()), steps))
}

/// Dual on a self-dual line of good parity: the Mœglin–Waldspurger dual, which is again self-dual.
pub fn dual_good(m: &MultiSegment) -> Result<MultiSegment> {
    Ok(dual_good_traced(m)?.0)
}

pub fn dual_good_traced(m: &MultiSegment) -> Result<(MultiSegment, Vec<ExtractionTrace>)> {
    if !m.is_self_dual() {
        return Err(CoreError::NotSelfDualLine);
    }
    let (out, steps) = mw_dual_traced(m)?;
    if !out.is_self_dual() {
        return Err(CoreError::Invariant(format!("MW dual {out} of good-parity line {m} is not self-dual")));
    }
    Ok((out, steps))
}

/// Which algorithm handled a line.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineAlgorithm {
    MoeglinWaldspurger,
    NonSelfDual,
    GoodParity,
    BadParity,
}

#[derive(Clone, Debug)]
pub struct LineDual {
    pub line: LineKey,
    pub algorithm: LineAlgorithm,
    pub input: MultiSegment,
    pub output: MultiSegment,
    pub steps: Vec<ExtractionTrace>,
}

/// Dual of every line of a valid parameter, with traces.
pub fn pyasetskii_dual_lines(p: &LParameter) -> Result<Vec<LineDual>> {
    p.validate()?;
    let mut out = Vec::new();
    if !p.group.is_classical() {
        for (line, m) in p.mseg.decompose_gl_lines() {
            let (d, steps) = mw_dual_traced(&m)?;
            out.push(LineDual { line, algorithm: LineAlgorithm::MoeglinWaldspurger, input: m, output: d, steps });
        }
        return Ok(out);
    }
    for (line, m) in p.mseg.decompose_lines() {
        let (algorithm, (d, steps)) = match line_parity(&line, &p.group)? {
            Parity::NonSelfDual => (LineAlgorithm::NonSelfDual, dual_nonselfdual_traced(&m)?),
            Parity::Good => (LineAlgorithm::GoodParity, dual_good_traced(&m)?),
            Parity::Bad => (LineAlgorithm::BadParity, az_bad_traced(&m)?),
        };
        out.push(LineDual { line, algorithm, input: m, output: d, steps });
    }
    Ok(out)
}

/// The Pyasetskii involution on a valid parameter.
pub fn pyasetskii_dual(p: &LParameter) -> Result<LParameter> {
    let mut mseg = MultiSegment::new();
    for line in pyasetskii_dual_lines(p)? {
        mseg.extend_from(&line.output);
    }
    Ok(LParameter::new(p.group, mseg))
}

/// Replaces the class of a self-dual line by the trivial class and returns the
/// split group whose dual preserves the resulting `ε·ε_{ρ^u}`-symmetric form.
pub fn unramify(m: &MultiSegment, group: &GroupType) -> Result<(MultiSegment, GroupType)> {
    let eps = group.form_sign().ok_or_else(|| CoreError::NotClassical(group.to_string()))?;
    if m.is_empty() {
        return Err(CoreError::Empty);
    }
    let key = m.single_line()?;
    let eps_rho = key.rho.selfdual().sign().ok_or(CoreError::NotSelfDualLine)?;
    let triv = RhoClass::trivial();
    let ur = m.relabel(&triv);
    let dim: usize = ur.segments().map(Segment::len).sum();
    Ok((ur, GroupType::classical_for_form(eps * eps_rho, dim)?))
}

/// Per-line outputs keyed by GL line, handy for comparisons.
pub fn dual_by_gl_line(p: &LParameter) -> Result<BTreeMap<LineKey, MultiSegment>> {
    Ok(pyasetskii_dual(p)?.mseg.decompose_gl_lines())
}
