//! Graded commutants of the base point, solved as exact kernels, plus the
//! α-parametrized construction they are cross-checked against.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::linalg::{span_rank, Field, Mat};
use super::realization::Realization;
use crate::rankmat::RankMatrix;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Gl,
    Classical,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Gl => "gl",
            Mode::Classical => "classical",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CommutantSpace {
    pub mode: Mode,
    pub degree: i64,
    pub basis: Vec<Mat>,
}

impl CommutantSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Random linear combination of the basis.
    pub fn sample(&self, rng: &mut ChaCha8Rng, k: &Field, n: usize) -> Mat {
        let mut x = Mat::zeros(n, n);
        for b in &self.basis {
            x = x.add(&b.scale(k.random(rng), k), k);
        }
        x
    }

    /// Whether both spaces have the same span.
    pub fn same_span(&self, other: &CommutantSpace, k: &Field) -> bool {
        let a: Vec<Vec<u64>> = self.basis.iter().map(|m| m.flatten().to_vec()).collect();
        let b: Vec<Vec<u64>> = other.basis.iter().map(|m| m.flatten().to_vec()).collect();
        let ra = span_rank(&a, k);
        let both: Vec<Vec<u64>> = a.iter().chain(&b).cloned().collect();
        ra == span_rank(&b, k) && ra == span_rank(&both, k)
    }
}

/// Kernel of a linear map on degree-`k` endomorphisms, one unknown per graded entry.
fn solve(r: &Realization, degree: i64, conditions: impl Fn(&Mat) -> Vec<Mat>) -> Vec<Mat> {
    let k = &r.field;
    let n = r.dim();
    let positions = r.degree_positions(degree);
    let columns: Vec<Vec<u64>> = positions
        .iter()
        .map(|&(i, j)| {
            let mut e = Mat::zeros(n, n);
            e[(i, j)] = 1;
            conditions(&e).iter().flat_map(|c| c.flatten().to_vec()).collect()
        })
        .collect();
    let Some(height) = columns.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut system = Mat::zeros(height, positions.len());
    for (c, col) in columns.iter().enumerate() {
        for (row, &v) in col.iter().enumerate() {
            system[(row, c)] = v;
        }
    }
    system
        .kernel(k)
        .into_iter()
        .map(|v| {
            let mut x = Mat::zeros(n, n);
            for (&(i, j), c) in positions.iter().zip(v) {
                x[(i, j)] = c;
            }
            x
        })
        .collect()
}

fn mode_of(r: &Realization) -> Mode {
    if r.has_form() {
        Mode::Classical
    } else {
        Mode::Gl
    }
}

/// Degree-`+1` maps `x` with `[x, ᵀf] = 0`, and `ᵀxJ + Jx = 0` when the realization has a form.
pub fn dual_commutant_space(r: &Realization) -> CommutantSpace {
    let k = &r.field;
    let tf = r.f.transpose();
    let basis = solve(r, 1, |x| {
        let mut c = vec![x.mul(&tf, k).sub(&tf.mul(x, k), k)];
        c.extend(r.form_defect(x));
        c
    });
    CommutantSpace { mode: mode_of(r), degree: 1, basis }
}

/// Degree-`−1` maps `g` with `[f, g] = 0`, and `ᵀgJ + Jg = 0` with a form: `V*_λ ∩ C(f)`.
pub fn commutant_of_f(r: &Realization) -> CommutantSpace {
    let k = &r.field;
    let basis = solve(r, -1, |g| {
        let mut c = vec![r.f.mul(g, k).sub(&g.mul(&r.f, k), k)];
        c.extend(r.form_defect(g));
        c
    });
    CommutantSpace { mode: mode_of(r), degree: -1, basis }
}

/// `G_{i,j}: Δ_i(a) ↦ Δ_j(a − 1)` wherever both sides exist.
fn elementary(r: &Realization, i: usize, j: usize) -> Mat {
    let n = r.dim();
    let mut g = Mat::zeros(n, n);
    for a in r.instances[i].exponents() {
        if let Some(row) = r.basis_index(j, a.shift(-1)) {
            g[(row, r.basis_index(i, a).expect("in segment"))] = 1;
        }
    }
    g
}

/// Ordered instance pairs `(i, j)` with `Δ_j ≺ Δ_i`.
fn preceding_pairs(r: &Realization) -> Vec<(usize, usize)> {
    let n = r.instances.len();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| r.instances[j].precedes(&r.instances[i]))
        .collect()
}

/// `V*_λ ∩ C(f)` from its parametrization: one `α_{i,j}` per pair with `Δ_j ≺ Δ_i`,
/// constant along the segment, tied to `α_{j^∨,i^∨}` by `ε(i^∨)ε(j^∨)` under a form.
pub fn structured_commutant(r: &Realization) -> CommutantSpace {
    let k = &r.field;
    let pairs = preceding_pairs(r);
    let (Some(pairing), Some(signs)) = (&r.pairing, &r.signs) else {
        let basis = pairs.iter().map(|&(i, j)| elementary(r, i, j)).collect();
        return CommutantSpace { mode: Mode::Gl, degree: -1, basis };
    };
    let mut basis = Vec::new();
    for &(i, j) in &pairs {
        let partner = (pairing[j], pairing[i]);
        if partner == (i, j) {
            // α_{i,i^∨} = −α_{i,i^∨}
            continue;
        }
        if partner < (i, j) {
            continue;
        }
        let sign = k.from_i64((signs[pairing[i]] * signs[pairing[j]]) as i64);
        basis.push(elementary(r, i, j).add(&elementary(r, partner.0, partner.1).scale(sign, k), k));
    }
    CommutantSpace { mode: Mode::Classical, degree: -1, basis }
}

/// Number of independent α-parameters: `P` without a form, `(P − F)/2` with one,
/// where `F` counts instances with `Δ_{i^∨} ≺ Δ_i`.
pub fn structured_dim(r: &Realization) -> usize {
    let p = preceding_pairs(r).len();
    match &r.pairing {
        None => p,
        Some(pairing) => {
            let fixed = (0..r.instances.len()).filter(|&i| r.instances[pairing[i]].precedes(&r.instances[i])).count();
            (p - fixed) / 2
        }
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn entrywise_max(acc: &mut RankMatrix, x: &RankMatrix) {
    for (ra, rx) in acc.entries.iter_mut().zip(&x.entries) {
        for (a, &b) in ra.iter_mut().zip(rx) {
            *a = (*a).max(b);
        }
    }
}

/// Entrywise max over `trials` generic elements of the dual commutant of their composition ranks.
pub fn oracle_dual_rank_matrix(r: &Realization, trials: u32, seed: u64) -> RankMatrix {
    let space = dual_commutant_space(r);
    max_rank_over_samples(r, &space, trials, seed, false)
}

/// Same quantity through `V*_λ ∩ C(f)`: ranks of `ᵀg` for generic `g`.
pub fn oracle_dual_rank_matrix_transposed(r: &Realization, trials: u32, seed: u64) -> RankMatrix {
    let space = commutant_of_f(r);
    max_rank_over_samples(r, &space, trials, seed, true)
}

fn max_rank_over_samples(r: &Realization, space: &CommutantSpace, trials: u32, seed: u64, transpose: bool) -> RankMatrix {
    let mut acc = RankMatrix::zero(r.e_min, r.e_max).expect("same grid");
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let x = space.sample(&mut rng, &r.field, r.dim());
        let x = if transpose { x.transpose() } else { x };
        entrywise_max(&mut acc, &r.rank_matrix_of(&x));
    }
    acc
}

/// `g^{r+1}(Δ_{i_0}(d)) = 0` for generic `g ∈ V*_λ ∩ C(f)`, with `i_0` any copy
/// of the first segment of the bad-parity chain and `r + 1` its length.
pub fn nilpotency_check(r: &Realization, trials: u32, seed: u64) -> crate::error::Result<bool> {
    let step = crate::duality::az_bad_step(&r.mseg)?;
    let k = &r.field;
    let space = commutant_of_f(r);
    let starts: Vec<usize> = (0..r.instances.len())
        .filter(|&i| r.instances[i] == step.chain[0])
        .map(|i| r.basis_index(i, step.d).expect("end of segment"))
        .collect();
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let g = space.sample(&mut rng, k, r.dim());
        let mut power = Mat::identity(r.dim());
        for _ in 0..=step.r() {
            power = g.mul(&power, k);
        }
        if starts.iter().any(|&c| (0..r.dim()).any(|row| power[(row, c)] != 0)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::{az_bad, mw_dual};
    use crate::oracle::linalg::DEFAULT_PRIME;
    use crate::oracle::realization::build_realization;
    use crate::rankmat::rank_matrix;
    use crate::testutil::*;
    use proptest::prelude::*;

    fn field() -> Field {
        Field::new(DEFAULT_PRIME).unwrap()
    }

    fn bad(m: &crate::model::MultiSegment, seed: u64) -> Realization {
        build_realization(m, true, seed, field()).unwrap()
    }

    #[test]
    fn kernel_dimensions() {
        let t = triv();
        assert_eq!(dual_commutant_space(&bad(&ms(&[seg(&t, 0, 0), seg(&t, 0, 0)]), 0)).dim(), 0);

        // f = 0: the raw degree +1 space is W_0→W_1 (2) plus W_{-1}→W_0 (2), the form ties the blocks.
        let m = ms(&[seg(&t, 1, 1), seg(&t, -1, -1), seg(&t, 0, 0), seg(&t, 0, 0)]);
        let r = bad(&m, 0);
        assert!(r.f.is_zero());
        assert_eq!(r.degree_positions(1).len(), 4);
        assert_eq!(dual_commutant_space(&r).dim(), 2);

        let gl = build_realization(&ms(&[seg(&t, 0, 1)]), false, 0, field()).unwrap();
        assert_eq!(dual_commutant_space(&gl).dim(), 0);
        assert_eq!(commutant_of_f(&gl).dim(), 0);
        // {[0,0],[1,1]}: the dual commutant is spanned by Δ(0) ↦ Δ(1)
        let gl = build_realization(&ms(&[seg(&t, 0, 0), seg(&t, 1, 1)]), false, 0, field()).unwrap();
        assert_eq!(dual_commutant_space(&gl).dim(), 1);
    }

    #[test]
    fn oracle_examples() {
        let r = bad(&phi_upper_1(), 0);
        assert_eq!(oracle_dual_rank_matrix(&r, 5, 0).entries, vec![vec![0, 0], vec![0, 0]]);
        let r = bad(&phi_upper_4(), 0);
        assert_eq!(oracle_dual_rank_matrix(&r, 5, 0).entries, vec![vec![1, 0], vec![0, 1]]);
        let t = triv();
        let gl = build_realization(&ms(&[seg(&t, 0, 1)]), false, 0, field()).unwrap();
        assert_eq!(oracle_dual_rank_matrix(&gl, 5, 0).entries, vec![vec![0]]);
        assert_eq!(rank_matrix(&mw_dual(&ms(&[seg(&t, 0, 1)])).unwrap()).unwrap().entries, vec![vec![0]]);
    }

    #[test]
    fn nilpotency_examples() {
        let t = triv();
        for m in [ms(&[seg(&t, 0, 0), seg(&t, 0, 0)]), phi_upper_1(), phi_upper_4()] {
            assert!(nilpotency_check(&bad(&m, 0), 5, 0).unwrap(), "{m}");
        }
    }

    #[test]
    fn nilpotency_is_not_vacuous() {
        // one step short of the chain length, a generic g does not kill the start vector
        let r = bad(&phi_upper_4(), 0);
        let space = commutant_of_f(&r);
        let g = space.sample(&mut trial_rng(0, 0), &r.field, r.dim());
        let start = r.basis_index(0, crate::halfint::HalfInt::ONE).unwrap();
        assert_eq!(r.instances[0], seg(&t(), 1, 1));
        assert!((0..r.dim()).any(|row| g[(row, start)] != 0));
    }

    fn t() -> crate::model::RhoClass {
        triv()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn gl_oracle_matches_mw(m in arb_line(4)) {
            let r = build_realization(&m, false, 0, field()).unwrap();
            let want = rank_matrix(&mw_dual(&m).unwrap()).unwrap();
            prop_assert_eq!(oracle_dual_rank_matrix(&r, 3, 1), want.clone());
            prop_assert_eq!(oracle_dual_rank_matrix_transposed(&r, 3, 1), want);
            prop_assert_eq!(structured_dim(&r), commutant_of_f(&r).dim());
            prop_assert!(structured_commutant(&r).same_span(&commutant_of_f(&r), &r.field));
        }

        #[test]
        fn bad_oracle_matches_az(half in arb_line(3), centered in proptest::collection::vec(0i64..3, 0..3), seed in 0u64..50) {
            let tr = triv();
            let mut m = half.union(&half.dual());
            for c in centered {
                m.insert(seg(&tr, -c, c), 2);
            }
            let r = bad(&m, seed);
            let want = rank_matrix(&az_bad(&m).unwrap()).unwrap();
            prop_assert_eq!(oracle_dual_rank_matrix(&r, 5, seed), want);
            let lower = commutant_of_f(&r);
            prop_assert_eq!(structured_dim(&r), lower.dim());
            prop_assert!(structured_commutant(&r).same_span(&lower, &r.field));
            let upper = dual_commutant_space(&r);
            let transposed = CommutantSpace { mode: upper.mode, degree: -1, basis: upper.basis.iter().map(Mat::transpose).collect() };
            prop_assert!(transposed.same_span(&lower, &r.field));
            prop_assert!(nilpotency_check(&r, 3, seed).unwrap());
        }
    }
}
