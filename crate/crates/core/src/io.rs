//! JSON file formats: arrangements, translation vectors, presentations and
//! audit reports. Parse failures carry the byte offset of the problem.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::classify::{AuditReport, AUDIT_SCOPE_NOTE};
use crate::discriminantal::TranslationVector;
use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::scalar::Scalar;
use crate::subset::Subset;

/// `{"k": int, "normals": [[str, ...], ...]}`, one inner list per normal in
/// ground-set order, rationals as `"p/q"` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementFile {
    pub k: usize,
    pub normals: Vec<Vec<Scalar>>,
}

impl From<&Arrangement> for ArrangementFile {
    fn from(a: &Arrangement) -> Self {
        ArrangementFile {
            k: a.k(),
            normals: a.normals().to_vec(),
        }
    }
}

impl ArrangementFile {
    pub fn to_arrangement(&self) -> Result<Arrangement> {
        Arrangement::new(self.k, self.normals.clone())
    }
}

/// Byte offset of a 1-based line and column reported by the JSON parser.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

pub fn arrangement_to_json(a: &Arrangement) -> String {
    to_json(&ArrangementFile::from(a))
}

pub fn arrangement_from_json(text: &str) -> Result<Arrangement> {
    parse_json::<ArrangementFile>(text)?.to_arrangement()
}

pub fn translation_to_json(t: &TranslationVector) -> String {
    to_json(t)
}

pub fn translation_from_json(text: &str) -> Result<TranslationVector> {
    parse_json(text)
}

/// Sorted lists of sorted indices, e.g. `[[1,2,3],[1,5,6]]`.
pub fn presentation_to_json(t: &Presentation) -> String {
    to_json(t)
}

pub fn presentation_from_json(text: &str, n: usize, k: usize) -> Result<Presentation> {
    let lists: Vec<Vec<usize>> = parse_json(text)?;
    let members = lists
        .iter()
        .map(|l| Subset::from_indices(l.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    Presentation::new(n, k, members)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitRecord {
    pub family: String,
    pub labels: Vec<usize>,
    pub r: usize,
    pub rank: usize,
    pub presentation: Vec<Vec<usize>>,
}

/// `{"arrangement": {...}, "field": "Q" | "Fp", "hits": [...]}` plus the
/// search bound and the scope note.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub arrangement: ArrangementFile,
    pub field: String,
    pub nprime_max: usize,
    pub hits: Vec<HitRecord>,
    pub note: String,
}

impl ReportFile {
    pub fn new(a: &Arrangement, report: &AuditReport) -> Self {
        ReportFile {
            arrangement: ArrangementFile::from(a),
            field: report.field.tag().to_string(),
            nprime_max: report.nprime_max,
            hits: report
                .hits
                .iter()
                .map(|h| HitRecord {
                    family: h.family.clone(),
                    labels: h.labels.clone(),
                    r: h.r,
                    rank: h.rank,
                    presentation: h.presentation.to_lists(),
                })
                .collect(),
            note: AUDIT_SCOPE_NOTE.to_string(),
        }
    }
}

pub fn report_to_json(a: &Arrangement, report: &AuditReport) -> String {
    to_json(&ReportFile::new(a, report))
}

pub fn report_from_json(text: &str) -> Result<ReportFile> {
    parse_json(text)
}
