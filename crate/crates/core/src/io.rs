//! JSON interchange for spaces, projections, and reports.
//!
//! Classical files carry exact rationals as `"p/q"` strings and never
//! accept floats. Quantum files carry row-major complex matrices as
//! `[re, im]` pairs of IEEE doubles. All emitted documents use ordered
//! maps so identical inputs serialize byte-identically.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::classical_completion::{CompletionReport, VerificationMode};
use crate::error::CcError;
use crate::event_algebra::{AtomicSpace, Event};
use crate::quantum_completion::QEmbedding;
use crate::quantum_space::{C64, CMat, CVec, Projection, QuantumSpace, Tolerances};
use crate::rational::{format_rat, parse_rat};
use crate::reichenbach::CcType;

#[derive(Debug)]
pub struct ClassicalFile {
    pub space: AtomicSpace,
    pub events: BTreeMap<String, Event>,
}

pub struct QuantumFile {
    pub space: QuantumSpace,
    pub projections: BTreeMap<String, Projection>,
}

pub enum SpaceFile {
    Classical(ClassicalFile),
    Quantum(QuantumFile),
}

fn parse_err(detail: impl Into<String>) -> CcError {
    CcError::ParseError { detail: detail.into() }
}

fn as_object(v: &Value, what: &str) -> Result<Map<String, Value>, CcError> {
    v.as_object().cloned().ok_or_else(|| parse_err(format!("{what} must be an object")))
}

/// Parses a classical space document:
/// `{"atoms":[{"name":..,"weight":"p/q"},..],"events":{"A":["w1",..],..}}`.
/// A document with a top-level `"extended_space"` (a completion report)
/// is accepted by descending into it.
pub fn parse_classical(text: &str) -> Result<ClassicalFile, CcError> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    parse_classical_value(&root)
}

pub fn parse_classical_value(root: &Value) -> Result<ClassicalFile, CcError> {
    let obj = as_object(root, "document")?;
    for wrapper in ["report", "extended_space"] {
        if let Some(inner) = obj.get(wrapper) {
            return parse_classical_value(inner);
        }
    }
    let atoms_json = obj
        .get("atoms")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("missing \"atoms\" array"))?;
    let mut atoms = Vec::with_capacity(atoms_json.len());
    for entry in atoms_json {
        let entry = as_object(entry, "atom")?;
        let name = entry
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| parse_err("atom missing \"name\""))?;
        let weight = entry
            .get("weight")
            .and_then(Value::as_str)
            .ok_or_else(|| parse_err(format!("atom {name:?}: weight must be a rational string")))?;
        atoms.push((name.to_string(), parse_rat(weight)?));
    }
    let space = AtomicSpace::new(atoms)?;

    let mut events = BTreeMap::new();
    if let Some(events_json) = obj.get("events") {
        let events_json = as_object(events_json, "\"events\"")?;
        for (name, members) in &events_json {
            let members = members
                .as_array()
                .ok_or_else(|| parse_err(format!("event {name:?} must be a name array")))?;
            let names = members
                .iter()
                .map(|m| {
                    m.as_str()
                        .ok_or_else(|| parse_err(format!("event {name:?} has a non-string member")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            events.insert(name.clone(), space.event_from_names(names)?);
        }
    }
    Ok(ClassicalFile { space, events })
}

fn matrix_from_json(v: &Value, what: &str) -> Result<CMat, CcError> {
    let rows = v
        .as_array()
        .ok_or_else(|| parse_err(format!("{what} must be an array of rows")))?;
    let dim = rows.len();
    let mut m = CMat::zeros(dim, dim);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| parse_err(format!("{what} row {i} must be an array")))?;
        if row.len() != dim {
            return Err(parse_err(format!("{what} is not square")));
        }
        for (j, z) in row.iter().enumerate() {
            let pair = z
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| parse_err(format!("{what}[{i}][{j}] must be [re, im]")))?;
            let re = pair[0].as_f64().ok_or_else(|| parse_err("non-numeric entry"))?;
            let im = pair[1].as_f64().ok_or_else(|| parse_err("non-numeric entry"))?;
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

/// Parses a quantum space document:
/// `{"dim":N,"density":[[[re,im],..],..],"projections":{"A":..}}`.
pub fn parse_quantum(text: &str, tol: &Tolerances) -> Result<QuantumFile, CcError> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    parse_quantum_value(&root, tol)
}

pub fn parse_quantum_value(root: &Value, tol: &Tolerances) -> Result<QuantumFile, CcError> {
    let obj = as_object(root, "document")?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| parse_err("missing integer \"dim\""))? as usize;
    let density = matrix_from_json(
        obj.get("density").ok_or_else(|| parse_err("missing \"density\""))?,
        "density",
    )?;
    if density.nrows() != dim {
        return Err(parse_err(format!(
            "density is {}x{} but dim is {dim}",
            density.nrows(),
            density.ncols()
        )));
    }
    let space = QuantumSpace::new(density, tol)?;

    let mut projections = BTreeMap::new();
    if let Some(projs) = obj.get("projections") {
        for (name, pj) in &as_object(projs, "\"projections\"")? {
            let m = matrix_from_json(pj, name)?;
            if m.nrows() != dim {
                return Err(parse_err(format!("projection {name:?} has wrong dimension")));
            }
            projections.insert(name.clone(), Projection::new(m, tol)?);
        }
    }
    Ok(QuantumFile { space, projections })
}

/// Auto-detects the space kind by its top-level keys. Report documents
/// wrapping a space (under `"report"` / `"extended_space"`) are unwrapped.
pub fn parse_space(text: &str, tol: &Tolerances) -> Result<SpaceFile, CcError> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    let mut doc = &root;
    loop {
        let obj = as_object(doc, "document")?;
        if obj.contains_key("atoms") {
            return Ok(SpaceFile::Classical(parse_classical_value(doc)?));
        }
        if obj.contains_key("density") {
            return Ok(SpaceFile::Quantum(parse_quantum_value(doc, tol)?));
        }
        match doc.get("report").or_else(|| doc.get("extended_space")) {
            Some(inner) => doc = inner,
            None => {
                return Err(parse_err(
                    "expected \"atoms\" (classical) or \"density\" (quantum) at top level",
                ))
            }
        }
    }
}

// ---- emission ------------------------------------------------------------

pub fn event_to_names(space: &AtomicSpace, e: &Event) -> Vec<String> {
    e.bits().iter().map(|i| space.atom_name(i).to_string()).collect()
}

pub fn classical_space_to_json(
    space: &AtomicSpace,
    events: &BTreeMap<String, Event>,
) -> Value {
    let atoms: Vec<Value> = (0..space.atom_count())
        .map(|i| json!({"name": space.atom_name(i), "weight": format_rat(space.atom_weight(i))}))
        .collect();
    let events: Map<String, Value> = events
        .iter()
        .map(|(name, e)| (name.clone(), json!(event_to_names(space, e))))
        .collect();
    json!({"atoms": atoms, "events": events})
}

pub fn matrix_to_json(m: &CMat) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| {
            let row: Vec<Value> =
                (0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

fn vector_to_json(v: &CVec) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

pub fn quantum_space_to_json(
    space: &QuantumSpace,
    projections: &BTreeMap<String, Projection>,
) -> Value {
    let projs: Map<String, Value> = projections
        .iter()
        .map(|(name, p)| (name.clone(), matrix_to_json(p.matrix())))
        .collect();
    json!({
        "dim": space.dim(),
        "density": matrix_to_json(space.density()),
        "projections": projs,
    })
}

/// Extended quantum space with its embedding section.
pub fn quantum_extension_to_json(
    space: &QuantumSpace,
    emb: &QEmbedding,
    projections: &BTreeMap<String, Projection>,
) -> Value {
    let mut doc = quantum_space_to_json(space, projections);
    let embedding = json!({
        "source_dim": emb.source_dim(),
        "block_weights": emb.block_weights(),
        "block_vectors": emb.block_vectors().iter().map(vector_to_json).collect::<Vec<_>>(),
    });
    doc.as_object_mut().unwrap().insert("embedding".into(), embedding);
    doc
}

pub fn cctype_to_json(ct: &CcType) -> Value {
    json!({
        "r_c": format_rat(&ct.r_c),
        "r_a_given_c": format_rat(&ct.r_a_given_c),
        "r_b_given_c": format_rat(&ct.r_b_given_c),
        "r_a_given_cperp": format_rat(&ct.r_a_given_cperp),
        "r_b_given_cperp": format_rat(&ct.r_b_given_cperp),
    })
}

/// Completion report document: the extended space in the standard
/// classical format (with the embedded pair events and constructed
/// causes as named events), the atom image map, and per-request verdicts.
pub fn completion_report_to_json(
    source: &AtomicSpace,
    report: &CompletionReport,
    named_events: &BTreeMap<String, Event>,
) -> Value {
    let ext = &report.extended_space;
    let mut events: BTreeMap<String, Event> = BTreeMap::new();
    for (name, e) in named_events {
        if let Ok(mapped) = report.embedding.map_event(e) {
            events.insert(name.clone(), mapped);
        }
    }
    for entry in &report.common_causes {
        let mut name = format!("C{}", entry.pair_index + 1);
        while events.contains_key(&name) {
            name.insert(0, '_');
        }
        events.insert(name, entry.event.clone());
    }

    let atom_image: Map<String, Value> = (0..source.atom_count())
        .map(|i| {
            (
                source.atom_name(i).to_string(),
                json!(event_to_names(ext, &report.embedding.atom_image()[i])),
            )
        })
        .collect();

    let causes: Vec<Value> = report
        .common_causes
        .iter()
        .map(|entry| {
            json!({
                "pair_index": entry.pair_index,
                "cause": event_to_names(ext, &entry.event),
                "requested_type": cctype_to_json(&entry.requested),
                "measured_type": cctype_to_json(&entry.measured),
                "verdict": entry.verdict,
            })
        })
        .collect();

    let verification = match report.extension_check.mode {
        VerificationMode::Exhaustive => json!({
            "mode": "exhaustive",
            "ok": report.extension_check.ok,
            "diagnostics": report.extension_check.diagnostics,
        }),
        VerificationMode::SpotCheck { samples, seed } => json!({
            "mode": "spot_check",
            "samples": samples,
            "seed": seed,
            "ok": report.extension_check.ok,
            "diagnostics": report.extension_check.diagnostics,
        }),
    };

    json!({
        "extended_space": classical_space_to_json(ext, &events),
        "atom_image": atom_image,
        "common_causes": causes,
        "extension_verification": verification,
    })
}
