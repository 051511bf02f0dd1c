//! Concrete model of one line: the graded space `W = ⊕ ℂΔ_i(a)`, the base
//! point `f` and, for bad-parity lines, the matrix `J` of the bilinear form.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::{Field, Mat};
use crate::error::{CoreError, Result};
use crate::halfint::HalfInt;
use crate::model::{MultiSegment, Segment};
use crate::rankmat::{rank_matrix, RankMatrix};

#[derive(Clone, Debug)]
pub struct Realization {
    pub mseg: MultiSegment,
    pub field: Field,
    /// One entry per copy of each segment, in canonical order.
    pub instances: Vec<Segment>,
    /// `i ↦ i^∨`; only with a form.
    pub pairing: Option<Vec<usize>>,
    /// `ε(i)`; only with a form.
    pub signs: Option<Vec<i32>>,
    pub delta: HalfInt,
    /// `(−1)^{2δ+1}`.
    pub epsilon: i32,
    /// `(instance, a)` for each basis vector.
    pub basis: Vec<(usize, HalfInt)>,
    index: BTreeMap<(usize, HalfInt), usize>,
    /// Basis indices of each graded piece `W_a`.
    grades: BTreeMap<HalfInt, Vec<usize>>,
    pub e_min: HalfInt,
    pub e_max: HalfInt,
    pub f: Mat,
    pub j: Option<Mat>,
}

/// Outcome of the construction identities, reported rather than asserted so
/// callers can print them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    /// `ᵀfJ + Jf = 0`
    pub f_in_lie_algebra: bool,
    /// `ᵀJ = εJ`
    pub j_symmetry: bool,
    /// `εJ·J = 1`
    pub j_inverse: bool,
    /// rank matrix of `f` equals `rank_matrix(mseg)`
    pub f_rank_matrix: bool,
}

impl InvariantReport {
    pub fn all(&self) -> bool {
        self.f_in_lie_algebra && self.j_symmetry && self.j_inverse && self.f_rank_matrix
    }
}

/// Pairs each instance with one carrying the contragredient segment.
fn pair_instances(instances: &[Segment]) -> Result<Vec<usize>> {
    let mut by_seg: BTreeMap<&Segment, Vec<usize>> = BTreeMap::new();
    for (i, s) in instances.iter().enumerate() {
        by_seg.entry(s).or_default().push(i);
    }
    let mut pairing = vec![usize::MAX; instances.len()];
    for (s, ids) in &by_seg {
        let dual = s.dual();
        if **s == dual {
            if ids.len() % 2 == 1 {
                return Err(CoreError::InvalidBadParity((*s).clone()));
            }
            for c in ids.chunks(2) {
                pairing[c[0]] = c[1];
                pairing[c[1]] = c[0];
            }
        } else {
            let partners = by_seg.get(&dual).filter(|p| p.len() == ids.len());
            let partners = partners.ok_or_else(|| CoreError::InvalidBadParity((*s).clone()))?;
            for (&i, &k) in ids.iter().zip(partners) {
                pairing[i] = k;
            }
        }
    }
    Ok(pairing)
}

/// `ε(i)`: `+1` on `I^+`, `−1` on `I^−`. Self-centered pairs are split by the seed.
fn split_signs(instances: &[Segment], pairing: &[usize], split_seed: u64) -> Vec<i32> {
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed);
    let mut signs = vec![0; instances.len()];
    for (i, s) in instances.iter().enumerate() {
        let centre = s.b().twice() + s.e().twice();
        if centre != 0 {
            signs[i] = centre.signum() as i32;
        } else if i < pairing[i] {
            let plus = rng.gen_bool(0.5);
            signs[i] = if plus { 1 } else { -1 };
            signs[pairing[i]] = -signs[i];
        }
    }
    signs
}

/// Builds the realization of a single-line multi-segment. With `with_form` the
/// line must be a bad-parity multiset; its class label is ignored, so callers
/// unramify first.
pub fn build_realization(m: &MultiSegment, with_form: bool, split_seed: u64, field: Field) -> Result<Realization> {
    m.single_gl_line()?;
    let e_min = m.min_begin().ok_or(CoreError::Empty)?;
    let e_max = m.max_end().ok_or(CoreError::Empty)?;
    let delta = e_min.grid_offset();
    let epsilon = if delta.is_integer() { -1 } else { 1 };

    let instances: Vec<Segment> =
        m.iter().flat_map(|(s, k)| std::iter::repeat_n(s.clone(), k)).collect();
    let mut basis = Vec::new();
    let mut index = BTreeMap::new();
    let mut grades: BTreeMap<HalfInt, Vec<usize>> = BTreeMap::new();
    for (i, s) in instances.iter().enumerate() {
        for a in s.exponents() {
            index.insert((i, a), basis.len());
            grades.entry(a).or_default().push(basis.len());
            basis.push((i, a));
        }
    }
    let dim = basis.len();

    let mut f = Mat::zeros(dim, dim);
    for (col, &(i, a)) in basis.iter().enumerate() {
        if let Some(&row) = index.get(&(i, a.shift(1))) {
            f[(row, col)] = 1;
        }
    }

    let (pairing, signs, j) = if with_form {
        m.is_bad_parity_multiset()?;
        let pairing = pair_instances(&instances)?;
        let signs = split_signs(&instances, &pairing, split_seed);
        let mut j = Mat::zeros(dim, dim);
        for (col, &(i, a)) in basis.iter().enumerate() {
            let iv = pairing[i];
            let row = index[&(iv, -a)];
            // (−1)^{−a−δ}; −a−δ is an integer on this grid
            let exp = (-a - delta).twice() / 2;
            let sign = signs[iv] * if exp.rem_euclid(2) == 0 { 1 } else { -1 };
            j[(row, col)] = field.from_i64(sign as i64);
        }
        (Some(pairing), Some(signs), Some(j))
    } else {
        (None, None, None)
    };

    let r = Realization {
        mseg: m.clone(),
        field,
        instances,
        pairing,
        signs,
        delta,
        epsilon,
        basis,
        index,
        grades,
        e_min,
        e_max,
        f,
        j,
    };
    let inv = r.invariants()?;
    if !inv.all() {
        return Err(CoreError::Invariant(format!("realization of {m} fails construction identities: {inv:?}")));
    }
    Ok(r)
}

impl Realization {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn has_form(&self) -> bool {
        self.j.is_some()
    }

    /// Basis index of `Δ_i(a)`.
    pub fn basis_index(&self, instance: usize, a: HalfInt) -> Option<usize> {
        self.index.get(&(instance, a)).copied()
    }

    pub fn grade(&self, a: HalfInt) -> &[usize] {
        self.grades.get(&a).map_or(&[], Vec::as_slice)
    }

    /// Basis positions `(row, col)` of degree-`k` endomorphisms.
    pub fn degree_positions(&self, k: i64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (&a, cols) in &self.grades {
            for &row in self.grade(a.shift(k)) {
                for &col in cols {
                    out.push((row, col));
                }
            }
        }
        out
    }

    /// `ᵀxJ + Jx`; zero iff `x` preserves the form infinitesimally.
    pub fn form_defect(&self, x: &Mat) -> Option<Mat> {
        let j = self.j.as_ref()?;
        let k = &self.field;
        Some(x.transpose().mul(j, k).add(&j.mul(x, k), k))
    }

    /// Composition ranks of a degree-`+1` endomorphism.
    pub fn rank_matrix_of(&self, x: &Mat) -> RankMatrix {
        let k = &self.field;
        let mut out = RankMatrix::zero(self.e_min, self.e_max).expect("same grid");
        let l = out.l();
        let mut powers = vec![x.clone()];
        for s in 1..l {
            let next = powers[s - 1].mul(x, k);
            powers.push(next);
        }
        for i in 1..=l {
            for j in i..=l {
                let src = self.e_max.shift(-(j as i64));
                let dst = self.e_max.shift(1 - i as i64);
                let block = powers[j - i].select(self.grade(dst), self.grade(src));
                out.entries[i - 1][j - 1] = block.rank(k) as u32;
            }
        }
        out
    }

    pub fn invariants(&self) -> Result<InvariantReport> {
        let f_rank_matrix = self.rank_matrix_of(&self.f) == rank_matrix(&self.mseg)?;
        let Some(j) = &self.j else {
            return Ok(InvariantReport { f_in_lie_algebra: true, j_symmetry: true, j_inverse: true, f_rank_matrix });
        };
        let k = &self.field;
        let eps = k.from_i64(self.epsilon as i64);
        let ej = j.scale(eps, k);
        Ok(InvariantReport {
            f_in_lie_algebra: self.form_defect(&self.f).expect("form").is_zero(),
            j_symmetry: j.transpose() == ej,
            j_inverse: ej.mul(j, k) == Mat::identity(self.dim()),
            f_rank_matrix,
        })
    }
}
