//! End-to-end comparison of the combinatorial dual with the oracle, line by line.

use serde::Serialize;

use super::commutant::{oracle_dual_rank_matrix, oracle_dual_rank_matrix_transposed, Mode};
use super::linalg::{Field, DEFAULT_PRIME};
use super::realization::build_realization;
use crate::duality::{pyasetskii_dual_lines, unramify, LineAlgorithm};
use crate::error::{CoreError, Result};
use crate::model::{LParameter, MultiSegment};
use crate::rankmat::{rank_matrix, RankMatrix};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub trials: u32,
    pub seed: u64,
    pub prime: u64,
    /// Seed for the `I^+/I^−` split of self-centered pairs.
    pub split_seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { trials: 5, seed: 0, prime: DEFAULT_PRIME, split_seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LineReport {
    pub line: String,
    pub mode: &'static str,
    pub algorithm_rank_matrix: RankMatrix,
    pub oracle_rank_matrix: RankMatrix,
    /// Oracle computed through `V*_λ ∩ C(f)` and transposed.
    pub transposed_rank_matrix: RankMatrix,
    #[serde(rename = "match")]
    pub matches: bool,
    pub trials: u32,
    pub seed: u64,
    pub prime: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub lines: Vec<LineReport>,
}

impl VerifyReport {
    pub fn all_match(&self) -> bool {
        self.lines.iter().all(|l| l.matches)
    }
}

fn check_line(
    label: String,
    input: &MultiSegment,
    output: &MultiSegment,
    with_form: bool,
    cfg: &OracleConfig,
    field: Field,
) -> Result<LineReport> {
    let r = build_realization(input, with_form, cfg.split_seed, field)?;
    let algorithm = rank_matrix(output)?;
    let oracle = oracle_dual_rank_matrix(&r, cfg.trials, cfg.seed);
    let transposed = oracle_dual_rank_matrix_transposed(&r, cfg.trials, cfg.seed);
    let mode = if with_form { Mode::Classical } else { Mode::Gl };
    Ok(LineReport {
        line: label,
        mode: mode.as_str(),
        matches: algorithm == oracle && oracle == transposed,
        algorithm_rank_matrix: algorithm,
        oracle_rank_matrix: oracle,
        transposed_rank_matrix: transposed,
        trials: cfg.trials,
        seed: cfg.seed,
        prime: cfg.prime,
    })
}

/// Bad-parity lines go through the form on the unramified line; every other
/// line is checked one GL class at a time without a form.
pub fn verify_dual(p: &LParameter, cfg: &OracleConfig) -> Result<VerifyReport> {
    let field = Field::new(cfg.prime).ok_or_else(|| CoreError::Invariant(format!("{} is not an odd prime below 2^63", cfg.prime)))?;
    let mut lines = Vec::new();
    for ld in pyasetskii_dual_lines(p)? {
        if ld.algorithm == LineAlgorithm::BadParity {
            let (input, _) = unramify(&ld.input, &p.group)?;
            let (output, _) = unramify(&ld.output, &p.group)?;
            lines.push(check_line(ld.line.to_string(), &input, &output, true, cfg, field)?);
            continue;
        }
        let outputs = ld.output.decompose_gl_lines();
        for (key, input) in ld.input.decompose_gl_lines() {
            let output = outputs.get(&key).cloned().unwrap_or_default();
            lines.push(check_line(key.to_string(), &input, &output, false, cfg, field)?);
        }
    }
    Ok(VerifyReport { lines })
}
