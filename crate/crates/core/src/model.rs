//! Segments, multi-segments, supercuspidal classes, group types and parameters.
//!
//! A multi-segment is the combinatorial form of an L-parameter: the summand
//! `ρ|·|^x ⊗ S_a` corresponds to the segment `[x − (a−1)/2, x + (a−1)/2]_ρ`.
//! Segments over a fixed unitary class whose endpoints lie on a common grid
//! `δ + ℤ` form a *line*; all algorithms in this crate act line by line.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::halfint::HalfInt;

/// Self-duality type of a unitary supercuspidal class.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SelfDuality {
    None,
    Orthogonal,
    Symplectic,
}

impl SelfDuality {
    /// ε_{ρ^u}; `None` for non-self-dual classes.
    pub fn sign(self) -> Option<i32> {
        match self {
            SelfDuality::None => None,
            SelfDuality::Orthogonal => Some(1),
            SelfDuality::Symplectic => Some(-1),
        }
    }
}

/// Opaque descriptor of a unitary supercuspidal class ρ^u.
///
/// Ordering is by label first, which is the order used for canonical storage.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RhoClass {
    label: Arc<str>,
    dim: u32,
    selfdual: SelfDuality,
    dual_label: Arc<str>,
}

impl RhoClass {
    pub fn self_dual(label: &str, dim: u32, kind: SelfDuality) -> Result<Self> {
        if kind == SelfDuality::None || dim == 0 {
            return Err(CoreError::Invariant(format!(
                "class {label}: self-dual classes need a sign and positive dimension"
            )));
        }
        let label: Arc<str> = Arc::from(label);
        Ok(RhoClass { dual_label: label.clone(), label, dim, selfdual: kind })
    }

    pub fn non_self_dual(label: &str, dual_label: &str, dim: u32) -> Result<Self> {
        if label == dual_label || dim == 0 {
            return Err(CoreError::Invariant(format!(
                "class {label}: a non-self-dual class needs a distinct dual label and positive dimension"
            )));
        }
        Ok(RhoClass {
            label: Arc::from(label),
            dim,
            selfdual: SelfDuality::None,
            dual_label: Arc::from(dual_label),
        })
    }

    /// The trivial character of `W_F`, label `"1"`.
    pub fn trivial() -> Self {
        RhoClass::self_dual("1", 1, SelfDuality::Orthogonal).expect("valid")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn selfdual(&self) -> SelfDuality {
        self.selfdual
    }

    pub fn dual_label(&self) -> &str {
        &self.dual_label
    }

    pub fn is_self_dual(&self) -> bool {
        self.selfdual != SelfDuality::None
    }

    /// ρ^∨. A non-self-dual class's dual has the same dimension with labels swapped.
    pub fn dual(&self) -> RhoClass {
        if self.is_self_dual() {
            self.clone()
        } else {
            RhoClass {
                label: self.dual_label.clone(),
                dim: self.dim,
                selfdual: SelfDuality::None,
                dual_label: self.label.clone(),
            }
        }
    }

    /// Representative of the pair {ρ, ρ^∨}: the one with the smaller label.
    pub fn pair_representative(&self) -> RhoClass {
        if self.is_self_dual() || *self.label <= *self.dual_label {
            self.clone()
        } else {
            self.dual()
        }
    }
}

impl fmt::Display for RhoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// A segment `[b, e]_ρ` with `e − b ∈ ℤ_{≥0}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    rho: RhoClass,
    b: HalfInt,
    e: HalfInt,
}

impl Segment {
    pub fn new(rho: RhoClass, b: HalfInt, e: HalfInt) -> Result<Self> {
        match e.int_diff(b) {
            Some(d) if d >= 0 => Ok(Segment { rho, b, e }),
            _ => Err(CoreError::InvalidSegment { b: b.to_string(), e: e.to_string() }),
        }
    }

    /// Segment with endpoints given as twice their values.
    pub fn from_twice(rho: &RhoClass, b2: i64, e2: i64) -> Result<Self> {
        Segment::new(rho.clone(), HalfInt::from_twice(b2), HalfInt::from_twice(e2))
    }

    pub fn rho(&self) -> &RhoClass {
        &self.rho
    }

    pub fn b(&self) -> HalfInt {
        self.b
    }

    pub fn e(&self) -> HalfInt {
        self.e
    }

    #[allow(clippy::len_without_is_empty)] // never empty
    /// Number of exponents, `e − b + 1`.
    pub fn len(&self) -> usize {
        (self.e.int_diff(self.b).expect("segment invariant") + 1) as usize
    }

    /// Exponents `b, b+1, …, e`.
    pub fn exponents(&self) -> impl Iterator<Item = HalfInt> {
        let b = self.b;
        (0..self.len() as i64).map(move |k| b.shift(k))
    }

    pub fn contains(&self, a: HalfInt) -> bool {
        matches!(a.int_diff(self.b), Some(k) if k >= 0) && a <= self.e
    }

    /// `[−e, −b]` over ρ^∨.
    pub fn dual(&self) -> Segment {
        Segment { rho: self.rho.dual(), b: -self.e, e: -self.b }
    }

    /// `[b, e−1]`, absent when that is empty.
    pub fn minus(&self) -> Option<Segment> {
        (self.e > self.b).then(|| Segment { rho: self.rho.clone(), b: self.b, e: self.e.shift(-1) })
    }

    /// `[b+1, e]`, absent when that is empty.
    pub fn preminus(&self) -> Option<Segment> {
        (self.e > self.b).then(|| Segment { rho: self.rho.clone(), b: self.b.shift(1), e: self.e })
    }

    /// `self ≺ other`: same class and grid, `b < b'`, `e < e'`, `b' ≤ e + 1`.
    pub fn precedes(&self, other: &Segment) -> bool {
        self.rho == other.rho
            && self.b.int_diff(other.b).is_some()
            && self.b < other.b
            && self.e < other.e
            && other.b <= self.e.shift(1)
    }

    /// `[b, e]` with `b = −e` over a self-dual class.
    pub fn is_self_centered(&self) -> bool {
        self.rho.is_self_dual() && self.b == -self.e
    }

    /// Same segment over a different class.
    pub fn with_rho(&self, rho: RhoClass) -> Segment {
        Segment { rho, b: self.b, e: self.e }
    }

    /// Key of the (paired) line this segment lies on.
    pub fn line_key(&self) -> LineKey {
        LineKey { rho: self.rho.pair_representative(), delta: self.b.grid_offset() }
    }

    /// Key of the GL line: the class itself, not paired with its dual.
    pub fn gl_line_key(&self) -> LineKey {
        LineKey { rho: self.rho.clone(), delta: self.b.grid_offset() }
    }
}

impl Ord for Segment {
    /// Canonical order: class label, then `e` descending, then `b` descending.
    fn cmp(&self, other: &Self) -> Ordering {
        self.rho
            .cmp(&other.rho)
            .then_with(|| other.e.cmp(&self.e))
            .then_with(|| other.b.cmp(&self.b))
    }
}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]_{}", self.b, self.e, self.rho)
    }
}

/// A finite multiset of segments in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiSegment {
    entries: BTreeMap<Segment, usize>,
}

impl MultiSegment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, s: Segment, mult: usize) {
        if mult > 0 {
            *self.entries.entry(s).or_insert(0) += mult;
        }
    }

    pub fn insert_opt(&mut self, s: Option<Segment>) {
        if let Some(s) = s {
            self.insert(s, 1);
        }
    }

    /// Removes `mult` copies of `s`; fails without modifying on underflow.
    pub fn remove(&mut self, s: &Segment, mult: usize) -> Result<()> {
        let have = self.mult(s);
        if have < mult {
            return Err(CoreError::MultiplicityUnderflow(s.clone()));
        }
        if have == mult {
            self.entries.remove(s);
        } else {
            self.entries.insert(s.clone(), have - mult);
        }
        Ok(())
    }

    pub fn mult(&self, s: &Segment) -> usize {
        self.entries.get(s).copied().unwrap_or(0)
    }

    /// Distinct segments with multiplicities, in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Segment, usize)> {
        self.entries.iter().map(|(s, &m)| (s, m))
    }

    /// All segments repeated by multiplicity, in canonical order.
    pub fn segments(&self) -> impl Iterator<Item = &Segment> {
        self.entries.iter().flat_map(|(s, &m)| std::iter::repeat_n(s, m))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of segments counted with multiplicity.
    pub fn len(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn distinct_len(&self) -> usize {
        self.entries.len()
    }

    pub fn union(&self, other: &MultiSegment) -> MultiSegment {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn extend_from(&mut self, other: &MultiSegment) {
        for (s, m) in other.iter() {
            self.insert(s.clone(), m);
        }
    }

    /// Segment-wise contragredient.
    pub fn dual(&self) -> MultiSegment {
        self.iter().map(|(s, m)| (s.dual(), m)).collect()
    }

    pub fn is_self_dual(&self) -> bool {
        self.iter().all(|(s, m)| self.mult(&s.dual()) == m)
    }

    /// Σ dim(ρ)·(e − b + 1).
    pub fn total_dim(&self) -> usize {
        self.iter().map(|(s, m)| m * s.rho.dim as usize * s.len()).sum()
    }

    pub fn max_end(&self) -> Option<HalfInt> {
        self.entries.keys().map(Segment::e).max()
    }

    pub fn min_begin(&self) -> Option<HalfInt> {
        self.entries.keys().map(Segment::b).min()
    }

    /// Sub-multiset of segments satisfying `pred`.
    pub fn filter(&self, pred: impl Fn(&Segment) -> bool) -> MultiSegment {
        self.iter().filter(|(s, _)| pred(s)).map(|(s, m)| (s.clone(), m)).collect()
    }

    /// Same multiset with every class replaced by `rho`.
    pub fn relabel(&self, rho: &RhoClass) -> MultiSegment {
        self.iter().map(|(s, m)| (s.with_rho(rho.clone()), m)).collect()
    }

    /// λ_m: every lattice point of every segment, with multiplicity.
    pub fn infinitesimal(&self) -> InfinitesimalParameter {
        let mut out = InfinitesimalParameter::default();
        for (s, m) in self.iter() {
            for a in s.exponents() {
                out.insert(s.rho.clone(), a, m);
            }
        }
        out
    }

    /// Partition by paired line key (ρ and ρ^∨ grouped together).
    pub fn decompose_lines(&self) -> BTreeMap<LineKey, MultiSegment> {
        self.decompose_by(Segment::line_key)
    }

    /// Partition by GL line key (each class separately).
    pub fn decompose_gl_lines(&self) -> BTreeMap<LineKey, MultiSegment> {
        self.decompose_by(Segment::gl_line_key)
    }

    fn decompose_by(&self, key: impl Fn(&Segment) -> LineKey) -> BTreeMap<LineKey, MultiSegment> {
        let mut out: BTreeMap<LineKey, MultiSegment> = BTreeMap::new();
        for (s, m) in self.iter() {
            out.entry(key(s)).or_default().insert(s.clone(), m);
        }
        out
    }

    /// The unique GL line key, or an error for empty or mixed input.
    pub fn single_gl_line(&self) -> Result<LineKey> {
        single_key(self, Segment::gl_line_key)
    }

    /// The unique paired line key, or an error for empty or mixed input.
    pub fn single_line(&self) -> Result<LineKey> {
        single_key(self, Segment::line_key)
    }

    /// Even multiplicity for each self-centered segment, and self-duality.
    pub fn is_bad_parity_multiset(&self) -> Result<()> {
        for (s, m) in self.iter() {
            let ok = if s.is_self_centered() { m % 2 == 0 } else { self.mult(&s.dual()) == m };
            if !ok {
                return Err(CoreError::InvalidBadParity(s.clone()));
            }
        }
        Ok(())
    }
}

fn single_key(m: &MultiSegment, key: impl Fn(&Segment) -> LineKey) -> Result<LineKey> {
    let mut it = m.entries.keys().map(key);
    let first = it.next().ok_or(CoreError::Empty)?;
    if it.all(|k| k == first) {
        Ok(first)
    } else {
        Err(CoreError::MixedLine)
    }
}

impl FromIterator<(Segment, usize)> for MultiSegment {
    fn from_iter<T: IntoIterator<Item = (Segment, usize)>>(iter: T) -> Self {
        let mut m = MultiSegment::new();
        for (s, k) in iter {
            m.insert(s, k);
        }
        m
    }
}

impl FromIterator<Segment> for MultiSegment {
    fn from_iter<T: IntoIterator<Item = Segment>>(iter: T) -> Self {
        iter.into_iter().map(|s| (s, 1)).collect()
    }
}

impl fmt::Display for MultiSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (s, m)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            if m == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}x{m}")?;
            }
        }
        f.write_str("}")
    }
}

/// Isotypic line: a class (paired with its dual when not self-dual) and a grid offset δ ∈ {0, ½}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineKey {
    pub rho: RhoClass,
    pub delta: HalfInt,
}

impl fmt::Display for LineKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.rho, self.delta)
    }
}

/// Multiset of `(ρ, a)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct InfinitesimalParameter {
    support: BTreeMap<(RhoClass, HalfInt), usize>,
}

impl InfinitesimalParameter {
    pub fn insert(&mut self, rho: RhoClass, a: HalfInt, mult: usize) {
        if mult > 0 {
            *self.support.entry((rho, a)).or_insert(0) += mult;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RhoClass, HalfInt, usize)> {
        self.support.iter().map(|((r, a), &m)| (r, *a, m))
    }

    pub fn len(&self) -> usize {
        self.support.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (r, a, m) in other.iter() {
            out.insert(r.clone(), a, m);
        }
        out
    }

    /// `(ρ, a) ↦ (ρ^∨, −a)`.
    pub fn dual(&self) -> Self {
        let mut out = Self::default();
        for (r, a, m) in self.iter() {
            out.insert(r.dual(), -a, m);
        }
        out
    }

    pub fn total_dim(&self) -> usize {
        self.iter().map(|(r, _, m)| r.dim() as usize * m).sum()
    }

    /// Exponent multisets grouped by GL line.
    pub fn gl_lines(&self) -> BTreeMap<LineKey, BTreeMap<HalfInt, usize>> {
        let mut out: BTreeMap<LineKey, BTreeMap<HalfInt, usize>> = BTreeMap::new();
        for (r, a, m) in self.iter() {
            let key = LineKey { rho: r.clone(), delta: a.grid_offset() };
            *out.entry(key).or_default().entry(a).or_insert(0) += m;
        }
        out
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupKind {
    /// GL_n
    Gl,
    /// SO_{2n+1}, dual Sp_{2n}(ℂ)
    SoOdd,
    /// Sp_{2n}, dual SO_{2n+1}(ℂ)
    Sp,
    /// O_{2n}, dual O_{2n}(ℂ)
    OEven,
}

/// A group `G_n` together with its rank parameter `n`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupType {
    pub kind: GroupKind,
    pub n: u32,
}

impl GroupType {
    pub fn gl(n: u32) -> Self {
        GroupType { kind: GroupKind::Gl, n }
    }

    pub fn so_odd(n: u32) -> Self {
        GroupType { kind: GroupKind::SoOdd, n }
    }

    pub fn sp(n: u32) -> Self {
        GroupType { kind: GroupKind::Sp, n }
    }

    pub fn o_even(n: u32) -> Self {
        GroupType { kind: GroupKind::OEven, n }
    }

    /// Dimension N of the standard representation of the dual group.
    pub fn std_dim(&self) -> usize {
        let n = self.n as usize;
        match self.kind {
            GroupKind::Gl => n,
            GroupKind::SoOdd | GroupKind::OEven => 2 * n,
            GroupKind::Sp => 2 * n + 1,
        }
    }

    /// Sign ε of the bilinear form preserved by the dual group; `None` for GL.
    pub fn form_sign(&self) -> Option<i32> {
        match self.kind {
            GroupKind::Gl => None,
            GroupKind::SoOdd => Some(-1),
            GroupKind::Sp | GroupKind::OEven => Some(1),
        }
    }

    pub fn is_classical(&self) -> bool {
        self.kind != GroupKind::Gl
    }

    /// Smallest classical group whose dual preserves an `sign`-symmetric form on `dim`-space.
    pub fn classical_for_form(sign: i32, dim: usize) -> Result<Self> {
        let n = (dim / 2) as u32;
        match (sign, dim % 2) {
            (-1, 0) => Ok(GroupType::so_odd(n)),
            (1, 0) => Ok(GroupType::o_even(n)),
            (1, 1) => Ok(GroupType::sp(n)),
            _ => Err(CoreError::Invariant(format!(
                "no nondegenerate {sign}-symmetric form in dimension {dim}"
            ))),
        }
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Gl => write!(f, "GL_{}", self.n),
            GroupKind::SoOdd => write!(f, "SO_{}", 2 * self.n + 1),
            GroupKind::Sp => write!(f, "Sp_{}", 2 * self.n),
            GroupKind::OEven => write!(f, "O_{}", 2 * self.n),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Good,
    Bad,
    NonSelfDual,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Good => "good",
            Parity::Bad => "bad",
            Parity::NonSelfDual => "nonselfdual",
        })
    }
}

/// Parity of a line inside a classical group: good iff `ε(G)·ε_{ρ^u}·(−1)^{2δ} = 1`.
pub fn line_parity(key: &LineKey, group: &GroupType) -> Result<Parity> {
    let eps_g = group.form_sign().ok_or_else(|| CoreError::NotClassical(group.to_string()))?;
    let Some(eps_rho) = key.rho.selfdual().sign() else {
        return Ok(Parity::NonSelfDual);
    };
    let eps_class = if key.delta.is_integer() { eps_rho } else { -eps_rho };
    Ok(if eps_g * eps_class == 1 { Parity::Good } else { Parity::Bad })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DimensionMismatch { expected: usize, found: usize },
    NotSelfDual,
    BadLineOddMultiplicity { line: LineKey, segment: Segment, mult: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch { expected, found } => {
                write!(f, "dimension-mismatch: expected {expected}, found {found}")
            }
            Violation::NotSelfDual => f.write_str("not-selfdual"),
            Violation::BadLineOddMultiplicity { line, segment, mult } => write!(
                f,
                "bad-line-odd-multiplicity: {segment} occurs {mult} times on bad-parity line {line}"
            ),
        }
    }
}

/// An L-parameter: a group and a multi-segment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LParameter {
    pub group: GroupType,
    pub mseg: MultiSegment,
}

impl LParameter {
    pub fn new(group: GroupType, mseg: MultiSegment) -> Self {
        LParameter { group, mseg }
    }

    /// All violated parameter invariants; empty means valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let found = self.mseg.total_dim();
        let expected = self.group.std_dim();
        if found != expected {
            out.push(Violation::DimensionMismatch { expected, found });
        }
        if !self.group.is_classical() {
            return out;
        }
        if !self.mseg.is_self_dual() {
            out.push(Violation::NotSelfDual);
        }
        for (line, m) in self.mseg.decompose_lines() {
            if line_parity(&line, &self.group) != Ok(Parity::Bad) {
                continue;
            }
            for (s, k) in m.iter() {
                if s.is_self_centered() && k % 2 == 1 {
                    out.push(Violation::BadLineOddMultiplicity {
                        line: line.clone(),
                        segment: s.clone(),
                        mult: k,
                    });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CoreError::Validation(v))
        }
    }

    pub fn infinitesimal(&self) -> InfinitesimalParameter {
        self.mseg.infinitesimal()
    }
}

impl fmt::Display for LParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.group, self.mseg)
    }
}
