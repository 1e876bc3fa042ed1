//! The on-disk JSON schemas: coefficient files, spectral-data files, the
//! matrix-measure export, and the continuity manifest. All carry the
//! version tag "weyl-jacobi/1"; complex numbers are [re, im] pairs.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};
use weyl_jacobi_core::direct::{Atom, SpectralData};
use weyl_jacobi_core::jacobi::JacobiCoefficients;
use weyl_jacobi_core::measure::DiscreteMatrixMeasure;

use crate::report::{complex, num, render};
use crate::CliError;

pub const FORMAT_TAG: &str = "weyl-jacobi/1";

/// A parsed continuity manifest: a limit operator, the approximating
/// sequence, and an optional truncation size.
pub struct Manifest {
    pub limit: JacobiCoefficients,
    pub sequence: Vec<JacobiCoefficients>,
    pub n: Option<usize>,
}

pub fn read_json_file(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: malformed JSON: {e}", path.display())))
}

pub fn write_text_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json_file(path: &Path, v: &Value) -> Result<(), CliError> {
    write_text_file(path, &render(v))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, CliError> {
    v.as_object()
        .ok_or_else(|| CliError::Input(format!("{what} must be a JSON object")))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value, CliError> {
    m.get(key)
        .ok_or_else(|| CliError::Input(format!("{what} is missing the \"{key}\" field")))
}

fn finite(v: &Value, what: &str) -> Result<f64, CliError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Input(format!("{what} must be a finite number")))
}

fn complex_pair(v: &Value, what: &str) -> Result<Complex64, CliError> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| CliError::Input(format!("{what} must be a [re, im] pair")))?;
    Ok(Complex64::new(
        finite(&arr[0], what)?,
        finite(&arr[1], what)?,
    ))
}

fn check_format(m: &Map<String, Value>, what: &str) -> Result<(), CliError> {
    let tag = field(m, "format", what)?;
    if tag.as_str() != Some(FORMAT_TAG) {
        return Err(CliError::Input(format!(
            "{what} has format {tag}, expected \"{FORMAT_TAG}\""
        )));
    }
    Ok(())
}

/// The a/b arrays of a coefficient object (used bare inside manifests).
pub fn parse_coefficient_body(
    m: &Map<String, Value>,
    what: &str,
) -> Result<JacobiCoefficients, CliError> {
    let a_raw = field(m, "a", what)?
        .as_array()
        .ok_or_else(|| CliError::Input(format!("{what}: \"a\" must be an array")))?;
    let mut a = Vec::with_capacity(a_raw.len());
    for (k, v) in a_raw.iter().enumerate() {
        a.push(finite(v, &format!("{what}: a[{k}]"))?);
    }
    let b_raw = field(m, "b", what)?
        .as_array()
        .ok_or_else(|| CliError::Input(format!("{what}: \"b\" must be an array")))?;
    let mut b = Vec::with_capacity(b_raw.len());
    for (k, v) in b_raw.iter().enumerate() {
        b.push(complex_pair(v, &format!("{what}: b[{k}]"))?);
    }
    JacobiCoefficients::new(a, b).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

pub fn parse_coefficients(v: &Value, what: &str) -> Result<JacobiCoefficients, CliError> {
    let m = object(v, what)?;
    check_format(m, what)?;
    parse_coefficient_body(m, what)
}

pub fn parse_spectral(v: &Value, what: &str) -> Result<SpectralData, CliError> {
    let m = object(v, what)?;
    check_format(m, what)?;
    let raw = field(m, "atoms", what)?
        .as_array()
        .ok_or_else(|| CliError::Input(format!("{what}: \"atoms\" must be an array")))?;
    let mut atoms = Vec::with_capacity(raw.len());
    for (k, v) in raw.iter().enumerate() {
        let ctx = format!("{what}: atoms[{k}]");
        let am = object(v, &ctx)?;
        let s = finite(field(am, "s", &ctx)?, &format!("{ctx}.s"))?;
        let weight = finite(field(am, "weight", &ctx)?, &format!("{ctx}.weight"))?;
        let psi = complex_pair(field(am, "psi", &ctx)?, &format!("{ctx}.psi"))?;
        if psi.norm() > 1.0 + 1e-10 {
            return Err(CliError::Input(format!(
                "{ctx}: phase modulus {} exceeds 1",
                psi.norm()
            )));
        }
        atoms.push(Atom { s, weight, psi });
    }
    let sd = SpectralData { atoms };
    sd.validate().map_err(|e| CliError::Input(format!("{what}: {e}")))?;
    Ok(sd)
}

pub fn parse_manifest(v: &Value, what: &str) -> Result<Manifest, CliError> {
    let m = object(v, what)?;
    check_format(m, what)?;
    let limit = parse_coefficient_body(
        object(field(m, "limit", what)?, &format!("{what}: limit"))?,
        &format!("{what}: limit"),
    )?;
    let seq_raw = field(m, "sequence", what)?
        .as_array()
        .ok_or_else(|| CliError::Input(format!("{what}: \"sequence\" must be an array")))?;
    let mut sequence = Vec::with_capacity(seq_raw.len());
    for (k, v) in seq_raw.iter().enumerate() {
        let ctx = format!("{what}: sequence[{k}]");
        sequence.push(parse_coefficient_body(object(v, &ctx)?, &ctx)?);
    }
    let n = match m.get("n") {
        None => None,
        Some(v) => Some(
            v.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| CliError::Input(format!("{what}: \"n\" must be an integer")))?,
        ),
    };
    Ok(Manifest { limit, sequence, n })
}

pub fn coefficients_value(c: &JacobiCoefficients) -> Value {
    json!({
        "format": FORMAT_TAG,
        "a": Value::Array(c.a().iter().map(|&x| num(x)).collect()),
        "b": Value::Array(c.b().iter().map(|&z| complex(z)).collect()),
    })
}

pub fn spectral_value(sd: &SpectralData) -> Value {
    let atoms: Vec<Value> = sd
        .atoms
        .iter()
        .map(|atom| {
            json!({
                "s": num(atom.s),
                "weight": num(atom.weight),
                "psi": complex(atom.psi),
            })
        })
        .collect();
    json!({"format": FORMAT_TAG, "atoms": Value::Array(atoms)})
}

pub fn measure_value(m: &DiscreteMatrixMeasure) -> Value {
    let atoms: Vec<Value> = m
        .atoms
        .iter()
        .map(|atom| {
            let rows: Vec<Value> = (0..2)
                .map(|i| Value::Array((0..2).map(|j| complex(atom.w.e[i][j])).collect()))
                .collect();
            json!({"x": num(atom.x), "W": Value::Array(rows)})
        })
        .collect();
    json!({"format": FORMAT_TAG, "atoms": Value::Array(atoms)})
}
