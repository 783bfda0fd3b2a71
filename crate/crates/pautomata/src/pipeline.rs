//! End-to-end construction and verification.
//!
//! From a specification `(p, k, m, N, sigma)` with `r = p^k` and `sigma` of
//! order `p^m`, the pipeline builds `M = pN + C`, constructs the carry
//! automaton, verifies its state group is the expected exponentiation,
//! embeds that group into the p-regular tree, re-expresses the automaton
//! over the p-letter alphabet, certifies the p-automaton property, checks
//! the encoded action and the defining relations, and records finite-level
//! p-group witnesses. Every stage emits its artifact before the next runs,
//! so failures leave partial artifacts behind.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::affine::AffineAutomaton;
use crate::closure::group_closure;
use crate::dot;
use crate::error::{Error, Result};
use crate::jsonio;
use crate::matrix::{permutation_matrix, IntMatrix};
use crate::minimizer::{self, EmbeddingData, MinimizedAutomaton};
use crate::perm::Permutation;
use crate::relations::{
    level_group_is_p_group_at, verify_hnn_relations, verify_states_exponentiation, LevelWitness,
    RelationReport, StatesExpReport,
};
use crate::sylow::{sylow_tree_embedding, TreeEmbedding};
use crate::transducer::PAutomatonCert;
use crate::words;

fn default_minimization_depth() -> usize {
    4
}
fn default_level_witness_depth() -> usize {
    3
}
fn default_cap() -> usize {
    1_000_000
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Depths {
    #[serde(default = "default_minimization_depth")]
    pub minimization: usize,
    #[serde(default = "default_level_witness_depth")]
    pub level_witness: usize,
}

impl Default for Depths {
    fn default() -> Self {
        Depths {
            minimization: default_minimization_depth(),
            level_witness: default_level_witness_depth(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Caps {
    #[serde(default = "default_cap")]
    pub closure: usize,
    #[serde(default = "default_cap")]
    pub level_points: usize,
    #[serde(default = "default_cap")]
    pub states: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            closure: default_cap(),
            level_points: default_cap(),
            states: default_cap(),
        }
    }
}

/// Input specification, read from a JSON file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub p: usize,
    pub k: u32,
    pub m: u32,
    #[serde(rename = "N")]
    pub n_matrix: IntMatrix,
    pub sigma: Permutation,
    #[serde(default)]
    pub depths: Depths,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub emit_dot: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

impl PipelineSpec {
    pub fn from_file(path: &Path) -> Result<Self> {
        let spec: PipelineSpec = serde_json::from_str(&fs::read_to_string(path)?)?;
        spec.validate()?;
        Ok(spec)
    }

    /// `r = p^k`.
    pub fn rank(&self) -> Result<usize> {
        self.p
            .checked_pow(self.k)
            .ok_or_else(|| Error::InvalidInput(format!("{}^{} overflows", self.p, self.k)))
    }

    pub fn validate(&self) -> Result<()> {
        if !words::is_prime(self.p) {
            return Err(Error::InvalidInput(format!("p = {} is not prime", self.p)));
        }
        if self.k < 1 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        let r = self.rank()?;
        if self.n_matrix.rows() != r || self.n_matrix.cols() != r {
            return Err(Error::InvalidInput(format!(
                "N must be {r}x{r}, got {}x{}",
                self.n_matrix.rows(),
                self.n_matrix.cols()
            )));
        }
        if self.sigma.len() != r {
            return Err(Error::InvalidInput(format!(
                "sigma must act on {r} points, got {}",
                self.sigma.len()
            )));
        }
        let expected_order = (self.p as u64)
            .checked_pow(self.m)
            .ok_or_else(|| Error::InvalidInput("p^m overflows".into()))?;
        if self.sigma.order() != expected_order {
            return Err(Error::InvalidInput(format!(
                "sigma has order {}, expected p^m = {expected_order}",
                self.sigma.order()
            )));
        }
        Ok(())
    }
}

/// `M = pN + C`, validated: determinant coprime to `p` and infinite order.
///
/// The specification does not by itself guarantee infinite order (take
/// `N = 0`); the hypothesis gap is surfaced as an error rather than silently
/// accepted.
pub fn build_matrix(spec: &PipelineSpec) -> Result<IntMatrix> {
    spec.validate()?;
    let c = permutation_matrix(&spec.sigma);
    let m = spec.n_matrix.scalar_mul(spec.p as i64).add(&c);
    use num_traits::{Signed, Zero};
    let det = m.det();
    if det.is_zero() {
        return Err(Error::DegenerateMatrix);
    }
    use num_integer::Integer;
    if det.abs().gcd(&num_bigint::BigInt::from(spec.p)) != num_bigint::BigInt::from(1) {
        return Err(Error::DetNotCoprime);
    }
    if !m.has_infinite_order()? {
        return Err(Error::FiniteOrderMatrix);
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SylowSummary {
    pub depth: usize,
    pub points: usize,
    pub group_order: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimizationSummary {
    pub depth: usize,
    pub encoded_action: bool,
    pub freeze: bool,
}

/// The verification report; serialized byte-identically for identical spec
/// and seed (timings are written to a separate file).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema_version: u32,
    pub p: usize,
    pub k: u32,
    pub m: u32,
    pub matrix: IntMatrix,
    pub n: usize,
    pub states: usize,
    pub b_states: usize,
    pub b_state_formula_ok: bool,
    pub b_permutational: bool,
    pub freeze_unreachable: bool,
    pub exponentiation: StatesExpReport,
    pub sylow: SylowSummary,
    pub p_automaton: PAutomatonCert,
    pub minimization: MinimizationSummary,
    pub relations: RelationReport,
    pub level_witnesses: Vec<LevelWitness>,
    pub seed: u64,
    pub success: bool,
}

/// Wall-clock stage timings, reported separately so the main report is
/// reproducible byte for byte.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageTimings {
    pub stages: Vec<(String, u128)>,
}

/// Everything the pipeline produced, including handles for further work.
pub struct PipelineOutput {
    pub report: PipelineReport,
    pub timings: StageTimings,
    pub automaton: AffineAutomaton,
    pub embedding: TreeEmbedding,
    pub embedding_data: EmbeddingData,
    pub minimized: MinimizedAutomaton,
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::VerificationFailed { what: what.into() })
    }
}

/// Runs every stage, writing `a.json`, `pi.json`, `b.json`, `report.json`
/// and `timings.json` (plus DOT files when requested) into `out_dir`.
pub fn run_pipeline(spec: &PipelineSpec, out_dir: &Path) -> Result<PipelineOutput> {
    fs::create_dir_all(out_dir)?;
    let mut timings: Vec<(String, u128)> = Vec::new();
    let mut timed = |name: &str, start: Instant| {
        timings.push((name.to_string(), start.elapsed().as_millis()));
    };

    let t = Instant::now();
    let matrix = build_matrix(spec).map_err(|e| e.in_stage("build-matrix"))?;
    timed("build-matrix", t);

    let t = Instant::now();
    let am = AffineAutomaton::build_capped(matrix.clone(), spec.p, spec.caps.states)
        .map_err(|e| e.in_stage("build-am"))?;
    jsonio::write_automaton(
        &out_dir.join("a.json"),
        am.automaton(),
        Some(am.zero_state()),
        Some(&matrix),
        Some(spec.p),
    )?;
    timed("build-am", t);

    let t = Instant::now();
    let exponentiation = verify_states_exponentiation(&am, spec.p, &spec.sigma)
        .map_err(|e| e.in_stage("verify-exponentiation"))?;
    require(exponentiation.passed(), "state group is not the exponentiation")
        .map_err(|e| e.in_stage("verify-exponentiation"))?;
    timed("verify-exponentiation", t);

    let t = Instant::now();
    let mut state_perms = am
        .automaton()
        .states_group()
        .map_err(|e| e.in_stage("state-closure"))?;
    state_perms.sort_unstable();
    state_perms.dedup();
    let state_closure = group_closure(&state_perms, spec.caps.closure);
    require(state_closure.complete, "state-group closure hit the cap")
        .map_err(|e| e.in_stage("state-closure"))?;
    timed("state-closure", t);

    let t = Instant::now();
    let embedding = sylow_tree_embedding(&state_perms, spec.p, spec.caps.closure)
        .map_err(|e| e.in_stage("sylow-embed"))?;
    jsonio::write_embedding(&out_dir.join("pi.json"), &embedding)?;
    timed("sylow-embed", t);

    let t = Instant::now();
    let embedding_data = minimizer::embedding_from_tree(&embedding, am.automaton())
        .map_err(|e| e.in_stage("embed-data"))?;
    timed("embed-data", t);

    let t = Instant::now();
    let minimized = minimizer::build_b(am.automaton(), &embedding_data)
        .map_err(|e| e.in_stage("build-b"))?;
    jsonio::write_automaton(
        &out_dir.join("b.json"),
        minimized.automaton(),
        Some(minimized.section_state(am.zero_state())),
        None,
        None,
    )?;
    let r = embedding_data.r();
    let expected_b = am.state_count() * (words::count(spec.p, r).unwrap() - 1) / (spec.p - 1);
    let b_state_formula_ok = minimized.state_count() == expected_b;
    require(b_state_formula_ok, "minimized state count formula")
        .map_err(|e| e.in_stage("build-b"))?;
    let b_permutational = minimized.is_permutational();
    require(b_permutational, "minimized automaton must be permutational")
        .map_err(|e| e.in_stage("build-b"))?;
    let freeze_unreachable = minimizer::freeze_unreachable(&minimized, &embedding_data);
    require(freeze_unreachable, "freeze branches reachable despite bijective encoding")
        .map_err(|e| e.in_stage("build-b"))?;
    timed("build-b", t);

    let t = Instant::now();
    let cert = minimized
        .automaton()
        .is_p_automaton(spec.p)
        .map_err(|e| e.in_stage("p-automaton"))?
        .ok_or(Error::VerificationFailed {
            what: "p-automaton certificate".into(),
        })
        .map_err(|e| e.in_stage("p-automaton"))?;
    timed("p-automaton", t);

    let t = Instant::now();
    let min_check = minimizer::verify_minimization(
        am.automaton(),
        &minimized,
        &embedding_data,
        spec.depths.minimization,
    )
    .map_err(|e| e.in_stage("verify-minimization"))?;
    require(min_check.passed(), "encoded action mismatch")
        .map_err(|e| e.in_stage("verify-minimization"))?;
    timed("verify-minimization", t);

    let t = Instant::now();
    let relations = verify_hnn_relations(&am).map_err(|e| e.in_stage("verify-relations"))?;
    timed("verify-relations", t);

    let t = Instant::now();
    let section_states: Vec<usize> = (0..am.state_count())
        .map(|q| minimized.section_state(q))
        .collect();
    let mut level_witnesses = Vec::new();
    for d in 1..=spec.depths.level_witness {
        let witness = level_group_is_p_group_at(
            minimized.automaton(),
            &section_states,
            d,
            spec.p,
            spec.caps.level_points,
        )
        .map_err(|e| e.in_stage("level-witnesses"))?;
        require(witness.p_power, "level group is not a p-group")
            .map_err(|e| e.in_stage("level-witnesses"))?;
        level_witnesses.push(witness);
    }
    timed("level-witnesses", t);

    if spec.emit_dot {
        fs::write(
            out_dir.join("a.dot"),
            dot::automaton_dot(am.automaton(), Some(am.zero_state())),
        )?;
        fs::write(
            out_dir.join("b.dot"),
            dot::automaton_dot(minimized.automaton(), Some(minimized.section_state(am.zero_state()))),
        )?;
        for d in 1..=spec.depths.level_witness {
            let mut perms: Vec<Permutation> = section_states
                .iter()
                .map(|&q| {
                    minimized
                        .automaton()
                        .pointed(q)
                        .level_permutation_capped(d, spec.caps.level_points)
                })
                .collect::<Result<_>>()?;
            perms.sort_unstable();
            perms.dedup();
            let names: Vec<String> = words::words_of_length(spec.p, d)
                .map(|w| w.iter().map(|x| x.to_string()).collect())
                .collect();
            fs::write(
                out_dir.join(format!("level_{d}.dot")),
                dot::schreier_dot(&perms, &names),
            )?;
        }
    }

    let report = PipelineReport {
        schema_version: 1,
        p: spec.p,
        k: spec.k,
        m: spec.m,
        matrix,
        n: spec.p,
        states: am.state_count(),
        b_states: minimized.state_count(),
        b_state_formula_ok,
        b_permutational,
        freeze_unreachable,
        exponentiation,
        sylow: SylowSummary {
            depth: embedding.k(),
            points: embedding.len(),
            group_order: state_closure.order(),
        },
        p_automaton: cert,
        minimization: MinimizationSummary {
            depth: spec.depths.minimization,
            encoded_action: min_check.encoded_action,
            freeze: min_check.freeze,
        },
        relations,
        level_witnesses,
        seed: spec.seed,
        success: true,
    };
    fs::write(
        out_dir.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    let timings = StageTimings { stages: timings };
    fs::write(
        out_dir.join("timings.json"),
        serde_json::to_string_pretty(&timings)?,
    )?;

    Ok(PipelineOutput {
        report,
        timings,
        automaton: am,
        embedding,
        embedding_data,
        minimized,
    })
}

/// Convenience: the spec for `p = 2, k = m = 1` with the classic matrix
/// `[[2,1],[1,0]]`.
pub fn example_spec_p2() -> PipelineSpec {
    PipelineSpec {
        p: 2,
        k: 1,
        m: 1,
        n_matrix: IntMatrix::from_rows_i64(&[vec![1, 0], vec![0, 0]]).unwrap(),
        sigma: Permutation::new(vec![1, 0]).unwrap(),
        depths: Depths::default(),
        caps: Caps::default(),
        seed: 0,
        emit_dot: false,
        out_dir: None,
    }
}

/// Convenience: the spec for `p = 3, k = m = 1` with `N = I`.
pub fn example_spec_p3() -> PipelineSpec {
    PipelineSpec {
        p: 3,
        k: 1,
        m: 1,
        n_matrix: IntMatrix::identity(3),
        sigma: Permutation::new(vec![1, 2, 0]).unwrap(),
        depths: Depths::default(),
        caps: Caps::default(),
        seed: 0,
        emit_dot: false,
        out_dir: None,
    }
}
