use std::fs;
use std::path::Path;

use fptcov::formats::{parse_colored_cnf, parse_matroid_spec, parse_set_system};
use fptcov::{CnfInstance, CoverageInstance, MatroidSpec};

use crate::Failure;

pub enum Loaded {
    Sets(CoverageInstance),
    Cnf(CnfInstance),
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: fptcov::Error) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

/// JSON documents are set systems, anything else is colored CNF.
pub fn instance(path: &Path) -> Result<Loaded, Failure> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        parse_set_system(&text).map(Loaded::Sets).map_err(|e| located(path, e))
    } else {
        parse_colored_cnf(&text).map(Loaded::Cnf).map_err(|e| located(path, e))
    }
}

pub fn cnf(path: &Path) -> Result<CnfInstance, Failure> {
    match instance(path)? {
        Loaded::Cnf(phi) => Ok(phi),
        Loaded::Sets(_) => Err(Failure::Usage(format!("{}: expected colored CNF, found a set system", path.display()))),
    }
}

pub fn matroid(path: &Path) -> Result<MatroidSpec, Failure> {
    parse_matroid_spec(&read(path)?).map_err(|e| located(path, e))
}

/// Instance id: the file stem.
pub fn id(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

#[derive(serde::Deserialize)]
struct SolutionDoc {
    solution: Option<Vec<usize>>,
}

/// Reads the `solution` field of a report, or of any JSON object carrying one.
pub fn solution(path: &Path) -> Result<Vec<usize>, Failure> {
    let doc: SolutionDoc =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    doc.solution.ok_or_else(|| Failure::Data(format!("{}: no solution recorded", path.display())))
}
