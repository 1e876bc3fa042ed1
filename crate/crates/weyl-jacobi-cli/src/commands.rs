//! Subcommand implementations. Each reads its inputs, runs the library,
//! prints one deterministic JSON report to stdout (the weyl grid prints
//! CSV instead when no output file is given), and returns the exit code.

use std::path::Path;

use num_complex::Complex64;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use serde_json::{json, Value};
use weyl_jacobi_core::analysis::{
    borg_marchenko_fit, classify, continuity_check, log_spaced, standard_bank,
};
use weyl_jacobi_core::direct::{direct_map, direct_map_with_info, weyl_m, SpectralData};
use weyl_jacobi_core::error::{Error, Tolerances};
use weyl_jacobi_core::inverse::{inverse_map, weyl_r, LanczosTermination};
use weyl_jacobi_core::jacobi::JacobiCoefficients;
use weyl_jacobi_core::matops::Mat2;
use weyl_jacobi_core::measure::to_matrix_measure;

use crate::gfmt::g17;
use crate::report::{num, render};
use crate::schema::{
    coefficients_value, measure_value, parse_coefficients, parse_manifest, parse_spectral,
    read_json_file, spectral_value, write_json_file, write_text_file, FORMAT_TAG,
};
use crate::CliError;

fn numeric(e: Error) -> CliError {
    CliError::Numeric(e.to_string())
}

fn tolerances_value(t: &Tolerances) -> Value {
    json!({
        "atom_tol": num(t.atom_tol),
        "cluster_tol": num(t.cluster_tol),
        "eig_tol": num(t.eig_tol),
        "gauge_tol": num(t.gauge_tol),
        "pole_tol": num(t.pole_tol),
        "rank_tol": num(t.rank_tol),
        "tol_herm": num(t.tol_herm),
    })
}

fn termination_value(t: &LanczosTermination) -> Value {
    match t {
        LanczosTermination::ReachedDepth => json!({"kind": "reached_depth"}),
        LanczosTermination::TerminatedAtRank { step } => {
            json!({"kind": "terminated_at_rank", "step": step})
        }
    }
}

fn emit(report: &Value) {
    print!("{}", render(report));
}

fn max_or_zero(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |acc, &x| acc.max(x))
}

/// Check a requested truncation size against the available coefficients.
fn check_depth(n: usize, available: usize, what: &str) -> Result<(), CliError> {
    if n == 0 || n > available {
        return Err(CliError::Input(format!(
            "{what}: depth {n} out of range 1..={available}"
        )));
    }
    Ok(())
}

// ---------- seeded instances ----------

fn uniform(rng: &mut ChaCha12Rng) -> f64 {
    // 53 uniform mantissa bits in [0, 1).
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

fn range(rng: &mut ChaCha12Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Draw a size-n coefficient set: Re b and Im b ∈ [−2, 2) for the n
/// diagonal entries first (real part before imaginary), then the n − 1
/// off-diagonals a ∈ [0.5, 2).
pub fn seeded_coefficients(rng: &mut ChaCha12Rng, n: usize) -> JacobiCoefficients {
    let b: Vec<Complex64> = (0..n)
        .map(|_| {
            let re = range(rng, -2.0, 2.0);
            let im = range(rng, -2.0, 2.0);
            Complex64::new(re, im)
        })
        .collect();
    let a: Vec<f64> = (0..n.saturating_sub(1)).map(|_| range(rng, 0.5, 2.0)).collect();
    JacobiCoefficients::new(a, b).expect("seeded coefficients are valid by construction")
}

// ---------- radii grids ----------

/// Parse a radii grid spec "r0:r1:count:log" (or ":lin").
pub fn parse_radii(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Input(format!("radii spec \"{spec}\": {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 {
        return Err(bad("expected r0:r1:count:log|lin"));
    }
    let r0: f64 = parts[0].parse().map_err(|_| bad("r0 is not a number"))?;
    let r1: f64 = parts[1].parse().map_err(|_| bad("r1 is not a number"))?;
    let count: usize = parts[2].parse().map_err(|_| bad("count is not an integer"))?;
    if !(r0.is_finite() && r1.is_finite()) || r0 <= 0.0 || r1 < r0 {
        return Err(bad("need finite 0 < r0 <= r1"));
    }
    if count == 0 {
        return Err(bad("count must be at least 1"));
    }
    match parts[3] {
        "log" => Ok(log_spaced(r0, r1, count)),
        "lin" => {
            if count == 1 {
                return Ok(vec![r0]);
            }
            Ok((0..count)
                .map(|i| r0 + (r1 - r0) * i as f64 / (count - 1) as f64)
                .collect())
        }
        other => Err(bad(&format!("unknown spacing \"{other}\""))),
    }
}

// ---------- direct ----------

pub fn cmd_direct(
    coefficients: &Path,
    depth: Option<usize>,
    out: Option<&Path>,
    measure_out: Option<&Path>,
) -> Result<i32, CliError> {
    let what = coefficients.display().to_string();
    let c = parse_coefficients(&read_json_file(coefficients)?, &what)?;
    let n = depth.unwrap_or(c.n());
    check_depth(n, c.n(), &what)?;
    let tol = Tolerances::default();
    let (sd, info) = direct_map_with_info(&c, n, &tol).map_err(numeric)?;

    let payload = spectral_value(&sd);
    if let Some(path) = out {
        write_json_file(path, &payload)?;
    }
    if let Some(path) = measure_out {
        write_json_file(path, &measure_value(&to_matrix_measure(&sd)))?;
    }
    let weight_sum: f64 = sd.atoms.iter().map(|a| a.weight).sum();
    emit(&json!({
        "command": "direct",
        "inputs": {"coefficients": what, "size": c.n()},
        "outputs": {"spectral": payload},
        "residuals": {"weight_sum_defect": num((weight_sum - 1.0).abs())},
        "metadata": {
            "depth": n,
            "format": FORMAT_TAG,
            "guards": {
                "clamped_psi_count": info.clamped_psi_count,
                "dropped_mass": num(info.dropped_mass),
                "max_psi_excess": num(info.max_psi_excess),
                "zero_snap_count": info.zero_snap_count,
            },
            "tolerances": tolerances_value(&tol),
        },
    }));
    Ok(0)
}

// ---------- inverse ----------

pub fn cmd_inverse(
    spectral: &Path,
    depth: Option<usize>,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let what = spectral.display().to_string();
    let sd = parse_spectral(&read_json_file(spectral)?, &what)?;
    let n = depth.unwrap_or(sd.atoms.len());
    if n == 0 {
        return Err(CliError::Input(format!("{what}: depth must be at least 1")));
    }
    let tol = Tolerances::default();
    let res = inverse_map(&sd, n, &tol).map_err(numeric)?;

    let payload = coefficients_value(&res.coefficients);
    if let Some(path) = out {
        write_json_file(path, &payload)?;
    }
    emit(&json!({
        "command": "inverse",
        "inputs": {"spectral": what, "atoms": sd.atoms.len()},
        "outputs": {"coefficients": payload},
        "residuals": {
            "max_antidiagonality_defect": num(max_or_zero(&res.trace.antidiagonality_defects)),
            "max_conjugacy_defect": num(max_or_zero(&res.trace.conjugacy_defects)),
            "max_gauge_defect": num(res.trace.max_defect()),
            "max_scalar_polar_defect": num(max_or_zero(&res.trace.scalar_polar_defects)),
        },
        "metadata": {
            "depth": n,
            "format": FORMAT_TAG,
            "termination": termination_value(&res.termination),
            "tolerances": tolerances_value(&tol),
        },
    }));
    Ok(0)
}

// ---------- roundtrip ----------

fn rel_err_f(got: Option<&f64>, want: f64) -> f64 {
    match got {
        Some(&g) => (g - want).abs() / want.abs().max(1.0),
        None => f64::INFINITY,
    }
}

fn rel_err_c(got: Option<&Complex64>, want: Complex64) -> f64 {
    match got {
        Some(&g) => (g - want).norm() / want.norm().max(1.0),
        None => f64::INFINITY,
    }
}

pub fn cmd_roundtrip(
    coefficients: Option<&Path>,
    seed: Option<u64>,
    depth: Option<usize>,
    tol_pass: f64,
    corrupt: bool,
) -> Result<i32, CliError> {
    let (c, n, inputs) = match (coefficients, seed) {
        (Some(path), None) => {
            let what = path.display().to_string();
            let c = parse_coefficients(&read_json_file(path)?, &what)?;
            let n = depth.unwrap_or(c.n());
            check_depth(n, c.n(), &what)?;
            let inputs = json!({"coefficients": what});
            (c, n, inputs)
        }
        (None, Some(seed)) => {
            let n = depth.ok_or_else(|| {
                CliError::Input("--seed needs --depth to fix the instance size".to_owned())
            })?;
            if n == 0 {
                return Err(CliError::Input("depth must be at least 1".to_owned()));
            }
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let c = seeded_coefficients(&mut rng, n);
            let inputs = json!({"seed": seed, "size": n});
            (c, n, inputs)
        }
        _ => {
            return Err(CliError::Input(
                "provide exactly one of a coefficients file or --seed".to_owned(),
            ))
        }
    };

    let tol = Tolerances::default();
    let mut sd = direct_map(&c, n, &tol).map_err(numeric)?;
    if corrupt {
        // Test hook: damage the spectral intermediate while keeping it a
        // valid probability measure, so the mismatch must be caught by the
        // residuals rather than by validation.
        sd.atoms[0].weight *= 2.0;
        let total: f64 = sd.atoms.iter().map(|a| a.weight).sum();
        for atom in &mut sd.atoms {
            atom.weight /= total;
        }
    }
    let res = inverse_map(&sd, n, &tol).map_err(numeric)?;
    let rec = &res.coefficients;

    let err_a = (0..n.saturating_sub(1))
        .map(|k| rel_err_f(rec.a().get(k), c.a()[k]))
        .fold(0.0f64, f64::max);
    let err_b = (0..n)
        .map(|k| rel_err_c(rec.b().get(k), c.b()[k]))
        .fold(0.0f64, f64::max);
    let err = err_a.max(err_b);
    let pass = err <= tol_pass;

    emit(&json!({
        "command": "roundtrip",
        "inputs": inputs,
        "outputs": {"pass": pass, "recovered": coefficients_value(rec)},
        "residuals": {
            "max_rel_error": num(err),
            "max_rel_error_a": num(err_a),
            "max_rel_error_b": num(err_b),
        },
        "metadata": {
            "corrupt": corrupt,
            "depth": n,
            "format": FORMAT_TAG,
            "termination": termination_value(&res.termination),
            "tol": num(tol_pass),
            "tolerances": tolerances_value(&tol),
        },
    }));
    Ok(if pass { 0 } else { 1 })
}

// ---------- weyl grid ----------

const CSV_HEADER: &str = "z_re,z_im,w_re,w_im,m00_re,m00_im,m01_re,m01_im,m10_re,m10_im,\
m11_re,m11_im,r00_re,r00_im,r01_re,r01_im,r10_re,r10_im,r11_re,r11_im,\
diag_identity_residual,map_residual,flag";

fn csv_push_complex(fields: &mut Vec<String>, z: Complex64) {
    fields.push(g17(z.re));
    fields.push(g17(z.im));
}

fn csv_push_mat(fields: &mut Vec<String>, m: Option<&Mat2>) {
    match m {
        Some(m) => {
            for i in 0..2 {
                for j in 0..2 {
                    csv_push_complex(fields, m.e[i][j]);
                }
            }
        }
        None => fields.extend(core::iter::repeat("nan".to_owned()).take(8)),
    }
}

pub fn cmd_weyl(
    spectral: &Path,
    radii_spec: &str,
    ray_angle: f64,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let what = spectral.display().to_string();
    let sd = parse_spectral(&read_json_file(spectral)?, &what)?;
    let radii = parse_radii(radii_spec)?;
    if !ray_angle.is_finite() {
        return Err(CliError::Input("--ray-angle must be finite".to_owned()));
    }
    let m = to_matrix_measure(&sd);
    let tol = Tolerances::default();

    let mut csv = String::from(CSV_HEADER);
    csv.push_str("\r\n");
    let mut flagged = 0usize;
    let mut max_diag = f64::NAN;
    let mut max_map = f64::NAN;
    for &r in &radii {
        let w = Complex64::from_polar(r, ray_angle);
        let z = Complex64::from_polar(r.sqrt(), ray_angle / 2.0);
        let mut fields: Vec<String> = Vec::with_capacity(23);
        csv_push_complex(&mut fields, z);
        csv_push_complex(&mut fields, w);
        match (weyl_m(&sd, w, &tol), weyl_r(&m, z, &tol)) {
            (Ok(mw), Ok(rz)) => {
                let lhs = z * mw.e[0][0];
                let rhs = (mw.e[1][1] - Complex64::ONE) / z;
                let diag = (lhs - rhs).norm() / (1.0 + lhs.norm() + rhs.norm());
                let mapped = Mat2::new([[lhs, mw.e[0][1]], [mw.e[1][0], lhs]]);
                let map_res = (mapped - rz).frobenius() / (1.0 + rz.frobenius());
                csv_push_mat(&mut fields, Some(&mw));
                csv_push_mat(&mut fields, Some(&rz));
                fields.push(g17(diag));
                fields.push(g17(map_res));
                fields.push("ok".to_owned());
                max_diag = if max_diag.is_nan() { diag } else { max_diag.max(diag) };
                max_map = if max_map.is_nan() { map_res } else { max_map.max(map_res) };
            }
            _ => {
                // A grid point too close to the spectrum: flag the row and
                // keep going.
                csv_push_mat(&mut fields, None);
                csv_push_mat(&mut fields, None);
                fields.push("nan".to_owned());
                fields.push("nan".to_owned());
                fields.push("pole".to_owned());
                flagged += 1;
            }
        }
        csv.push_str(&fields.join(","));
        csv.push_str("\r\n");
    }

    match out {
        None => {
            print!("{csv}");
        }
        Some(path) => {
            write_text_file(path, &csv)?;
            emit(&json!({
                "command": "weyl",
                "inputs": {"spectral": what, "atoms": sd.atoms.len()},
                "outputs": {
                    "csv": path.display().to_string(),
                    "flagged_rows": flagged,
                    "rows": radii.len(),
                },
                "residuals": {
                    "max_diag_identity_residual": num(max_diag),
                    "max_map_residual": num(max_map),
                },
                "metadata": {
                    "format": FORMAT_TAG,
                    "radii": Value::Array(radii.iter().map(|&r| num(r)).collect()),
                    "ray_angle": num(ray_angle),
                    "tolerances": tolerances_value(&tol),
                },
            }));
        }
    }
    Ok(0)
}

// ---------- borg-marchenko ----------

pub fn cmd_borg_marchenko(
    coefficients1: &Path,
    coefficients2: &Path,
    depth: Option<usize>,
    radii_spec: &str,
    ray_angle: f64,
) -> Result<i32, CliError> {
    let what1 = coefficients1.display().to_string();
    let what2 = coefficients2.display().to_string();
    let c1 = parse_coefficients(&read_json_file(coefficients1)?, &what1)?;
    let c2 = parse_coefficients(&read_json_file(coefficients2)?, &what2)?;
    let n1 = depth.unwrap_or(c1.n());
    let n2 = depth.unwrap_or(c2.n());
    check_depth(n1, c1.n(), &what1)?;
    check_depth(n2, c2.n(), &what2)?;
    let radii = parse_radii(radii_spec)?;
    let tol = Tolerances::default();

    let sd1 = direct_map(&c1, n1, &tol).map_err(numeric)?;
    let sd2 = direct_map(&c2, n2, &tol).map_err(numeric)?;
    let fit = borg_marchenko_fit(&sd1, &sd2, ray_angle, &radii, &tol).map_err(|e| match e {
        Error::DegenerateFit => CliError::Input(
            "radii grid is too sparse or narrow for a decay fit (need 4 points over 2 decades)"
                .to_owned(),
        ),
        other => numeric(other),
    })?;

    emit(&json!({
        "command": "borg-marchenko",
        "inputs": {"coefficients1": what1, "coefficients2": what2},
        "outputs": {
            "intercept": num(fit.intercept),
            "kept_count": fit.radii.len(),
            "kept_radii": Value::Array(fit.radii.iter().map(|&r| num(r)).collect()),
            "slope": num(fit.slope),
        },
        "residuals": {"fit_max_deviation": num(fit.max_deviation)},
        "metadata": {
            "depth": [n1, n2],
            "format": FORMAT_TAG,
            "radii_requested": Value::Array(radii.iter().map(|&r| num(r)).collect()),
            "ray_angle": num(fit.ray_angle),
            "tolerances": tolerances_value(&tol),
        },
    }));
    Ok(0)
}

// ---------- classify ----------

pub fn cmd_classify(spectral: &Path, tol_class: f64) -> Result<i32, CliError> {
    let what = spectral.display().to_string();
    let sd = parse_spectral(&read_json_file(spectral)?, &what)?;
    let cls = classify(&sd, tol_class);
    emit(&json!({
        "command": "classify",
        "inputs": {"spectral": what, "atoms": sd.atoms.len()},
        "outputs": {
            "free_diagonal": cls.free_diagonal,
            "self_adjoint": cls.self_adjoint,
        },
        "residuals": {
            "max_abs_psi": num(cls.max_abs_psi),
            "max_im_psi": num(cls.max_im_psi),
        },
        "metadata": {"format": FORMAT_TAG, "tol": num(tol_class)},
    }));
    Ok(0)
}

// ---------- continuity ----------

pub fn cmd_continuity(manifest: &Path, depth: Option<usize>) -> Result<i32, CliError> {
    let what = manifest.display().to_string();
    let man = parse_manifest(&read_json_file(manifest)?, &what)?;
    if man.sequence.is_empty() {
        return Err(CliError::Input(format!("{what}: sequence must be nonempty")));
    }
    let n = depth.or(man.n).unwrap_or(man.limit.n());
    let available = man
        .sequence
        .iter()
        .map(|c| c.n())
        .chain([man.limit.n()])
        .min()
        .expect("nonempty");
    check_depth(n, available, &what)?;
    let tol = Tolerances::default();
    let res = continuity_check(&man.sequence, &man.limit, &standard_bank(), n, &tol)
        .map_err(numeric)?;

    let members: Vec<Value> = res
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "index": i,
                "nu_residual": num(r.nu_residual),
                "psi_residual": num(r.psi_residual),
                "strong_surrogate": num(r.strong_surrogate),
            })
        })
        .collect();
    let last = res.last().expect("nonempty");
    emit(&json!({
        "command": "continuity",
        "inputs": {"manifest": what, "members": man.sequence.len()},
        "outputs": {"members": Value::Array(members)},
        "residuals": {
            "final_nu_residual": num(last.nu_residual),
            "final_psi_residual": num(last.psi_residual),
        },
        "metadata": {
            "bank_size": standard_bank().len(),
            "depth": n,
            "format": FORMAT_TAG,
            "tolerances": tolerances_value(&tol),
        },
    }));
    Ok(0)
}

// ---------- helpers under test ----------

/// The spectral data of a seeded instance, exposed for the test harness.
pub fn seeded_spectral(seed: u64, n: usize) -> Result<SpectralData, CliError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let c = seeded_coefficients(&mut rng, n);
    direct_map(&c, n, &Tolerances::default()).map_err(numeric)
}
