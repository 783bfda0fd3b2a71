//! File-level JSON encodings shared by the library and the CLI.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::perm::Permutation;
use crate::sylow::TreeEmbedding;
use crate::transducer::{PermAutomaton, StateDto};

/// Automaton file: the plain schema plus optional carry-automaton metadata
/// (matrix and modulus), which the generic loader ignores.
#[derive(Serialize, Deserialize)]
struct AutomatonDto {
    alphabet: usize,
    states: Vec<StateDto>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    start: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    matrix: Option<IntMatrix>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    n: Option<usize>,
}

/// A loaded automaton file.
pub struct AutomatonFile {
    pub automaton: PermAutomaton,
    pub start: Option<usize>,
    pub matrix: Option<IntMatrix>,
    pub n: Option<usize>,
}

pub fn automaton_to_json(
    automaton: &PermAutomaton,
    start: Option<usize>,
    matrix: Option<&IntMatrix>,
    n: Option<usize>,
) -> String {
    let dto = AutomatonDto {
        alphabet: automaton.alphabet(),
        states: automaton.to_state_dtos(),
        start: start.map(|q| automaton.state_id(q).to_string()),
        matrix: matrix.cloned(),
        n,
    };
    serde_json::to_string_pretty(&dto).expect("automaton serializes")
}

pub fn automaton_from_json(text: &str) -> Result<AutomatonFile> {
    let dto: AutomatonDto = serde_json::from_str(text)?;
    let automaton = PermAutomaton::from_state_dtos(dto.alphabet, &dto.states)?;
    let start = match &dto.start {
        Some(id) => Some(
            automaton
                .state_index(id)
                .ok_or_else(|| Error::UnknownState { id: id.clone() })?,
        ),
        None => None,
    };
    Ok(AutomatonFile {
        automaton,
        start,
        matrix: dto.matrix,
        n: dto.n,
    })
}

pub fn write_automaton(
    path: &Path,
    automaton: &PermAutomaton,
    start: Option<usize>,
    matrix: Option<&IntMatrix>,
    n: Option<usize>,
) -> Result<()> {
    fs::write(path, automaton_to_json(automaton, start, matrix, n))?;
    Ok(())
}

pub fn read_automaton(path: &Path) -> Result<AutomatonFile> {
    automaton_from_json(&fs::read_to_string(path)?)
}

pub fn read_matrix(path: &Path) -> Result<IntMatrix> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_matrix(path: &Path, matrix: &IntMatrix) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(matrix)?)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct GeneratorsDto {
    generators: Vec<Permutation>,
}

pub fn read_generators(path: &Path) -> Result<Vec<Permutation>> {
    let dto: GeneratorsDto = serde_json::from_str(&fs::read_to_string(path)?)?;
    if dto.generators.is_empty() {
        return Err(Error::InvalidFile("no generators".into()));
    }
    Ok(dto.generators)
}

pub fn write_generators(path: &Path, generators: &[Permutation]) -> Result<()> {
    let dto = GeneratorsDto {
        generators: generators.to_vec(),
    };
    fs::write(path, serde_json::to_string_pretty(&dto)?)?;
    Ok(())
}

pub fn read_embedding(path: &Path) -> Result<TreeEmbedding> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_embedding(path: &Path, embedding: &TreeEmbedding) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(embedding)?)?;
    Ok(())
}
