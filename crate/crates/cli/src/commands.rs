use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use ndarray::Array2;

use cagmps::analysis::{fit_central_charge, CentralChargeFit};
use cagmps::clifford::GateSet;
use cagmps::{ed, run, ModelSpec, RunOutput, SweepConfig, C64};

use crate::config::{ExperimentConfig, Reference, HIGH_CHI};
use crate::output::{emit, float};
use crate::CliError;

/// Local solves whose residual ends above this are treated as failures.
pub const RESIDUAL_LIMIT: f64 = 1e-6;

pub const RUN_HEADER: [&str; 13] = [
    "model",
    "L",
    "chi",
    "method",
    "sweeps",
    "seed",
    "energy",
    "reference_energy",
    "energy_error",
    "mid_entropy",
    "mean_entropy",
    "wall_time_s",
    "entropies",
];

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementPoint {
    pub l: usize,
    pub chi: usize,
    pub method: &'static str,
    pub energy: f64,
    pub reference: f64,
    pub energy_error: f64,
    /// Entropy at the cut after site `b + 1`, for every bond `b`.
    pub entropies: Vec<f64>,
    pub mid_entropy: f64,
    pub wall_time: f64,
}

impl MeasurementPoint {
    pub fn mean_entropy(&self) -> f64 {
        self.entropies.iter().sum::<f64>() / self.entropies.len() as f64
    }
}

pub fn method_name(clifford: bool) -> &'static str {
    if clifford {
        "cagmps"
    } else {
        "gmps"
    }
}

/// Entropy at the cut with `⌊L/2⌋` sites on the left.
pub fn mid_entropy(entropies: &[f64]) -> f64 {
    entropies[entropies.len().div_ceil(2) - 1]
}

fn solve(model: &ModelSpec, chi: usize, sweeps: usize, clifford: bool, seed: u64) -> Result<RunOutput, CliError> {
    let config = SweepConfig { chi_max: chi, n_sweeps: sweeps, clifford_enabled: clifford, ..Default::default() };
    let out = run(model, &config, seed)?;
    if out.report.max_residual > RESIDUAL_LIMIT {
        return Err(CliError::Numerical(format!(
            "local eigensolver residual {:e} exceeds {RESIDUAL_LIMIT:e} (chi {chi}, {})",
            out.report.max_residual,
            method_name(clifford)
        )));
    }
    Ok(out)
}

pub fn reference_energy(config: &ExperimentConfig) -> Result<f64, CliError> {
    match config.reference {
        Reference::Ed => Ok(ed::ground_energy(&config.model)?),
        Reference::HighChi => Ok(solve(&config.model, HIGH_CHI, config.sweeps, true, config.seed)?.report.energy),
    }
}

/// Every (χ, method) pair of the configuration; rows are also written as CSV
/// to `config.out` (stdout when unset).
pub fn cmd_run(config: &ExperimentConfig) -> Result<Vec<MeasurementPoint>, CliError> {
    config.validate()?;
    let reference = reference_energy(config)?;
    let mut points = Vec::new();
    for &chi in &config.chis {
        for &clifford in config.methods.flags() {
            let t0 = Instant::now();
            let out = solve(&config.model, chi, config.sweeps, clifford, config.seed)?;
            let entropies = out.report.entropies.clone();
            let p = MeasurementPoint {
                l: config.model.l,
                chi,
                method: method_name(clifford),
                energy: out.report.energy,
                reference,
                energy_error: out.report.energy - reference,
                mid_entropy: mid_entropy(&entropies),
                entropies,
                wall_time: t0.elapsed().as_secs_f64(),
            };
            eprintln!("chi {chi:>4} {:<6} E {:.12} err {:.3e} ({:.1}s)", p.method, p.energy, p.energy_error, p.wall_time);
            points.push(p);
        }
    }
    emit(config.out.as_deref(), &run_csv(config, &points)?)?;
    Ok(points)
}

pub fn run_csv(config: &ExperimentConfig, points: &[MeasurementPoint]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(RUN_HEADER)?;
    for p in points {
        let ent: Vec<String> = p.entropies.iter().map(|&s| float(s)).collect();
        w.write_record([
            config.model.kind.to_string(),
            p.l.to_string(),
            p.chi.to_string(),
            p.method.to_string(),
            config.sweeps.to_string(),
            config.seed.to_string(),
            float(p.energy),
            float(p.reference),
            float(p.energy_error),
            float(p.mid_entropy),
            float(p.mean_entropy()),
            format!("{:.3}", p.wall_time),
            ent.join(";"),
        ])?;
    }
    w.into_inner().map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitRow {
    pub method: String,
    pub points: usize,
    pub fit: CentralChargeFit,
}

/// Fit `S = (c/6) ln L + a + b/L` to a CSV with `L` and `mid_entropy` columns,
/// one fit per value of an optional `method` column.
pub fn cmd_fit_c(input: &Path, out: Option<&Path>) -> Result<Vec<FitRow>, CliError> {
    let mut r = csv::Reader::from_path(input)?;
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (l_col, s_col) = match (col("L"), col("mid_entropy")) {
        (Some(l), Some(s)) => (l, s),
        _ => return Err(CliError::Config(format!("{} needs L and mid_entropy columns", input.display()))),
    };
    let m_col = col("method");
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |k: usize| {
            rec.get(k)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| CliError::Config(format!("row {}: bad number in column {}", n + 1, &headers[k])))
        };
        let method = m_col.and_then(|k| rec.get(k)).unwrap_or("all").to_string();
        groups.entry(method).or_default().push((num(l_col)?, num(s_col)?));
    }
    if groups.is_empty() {
        return Err(CliError::Config(format!("{} has no data rows", input.display())));
    }
    let mut rows = Vec::new();
    for (method, pts) in groups {
        let fit = fit_central_charge(&pts)?;
        rows.push(FitRow { method, points: pts.len(), fit });
    }
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["method", "points", "c", "a", "b", "rms_residual"])?;
    for row in &rows {
        w.write_record([
            row.method.clone(),
            row.points.to_string(),
            float(row.fit.c),
            float(row.fit.a),
            float(row.fit.b),
            float(row.fit.rms),
        ])?;
    }
    emit(out, &w.into_inner().map_err(|e| CliError::Config(e.to_string()))?)?;
    Ok(rows)
}

const UNITARITY_TOL: f64 = 1e-12;

/// Run the enumeration pipeline and write counts, words, matrices and
/// conjugation tables of the 12 gates.
pub fn cmd_gates(out: Option<&Path>) -> Result<String, CliError> {
    let set = GateSet::compute()?;
    let mut s = String::new();
    writeln!(s, "# stage counts: group,sign_positive,even,classes").unwrap();
    writeln!(s, "{}", set.counts).unwrap();
    for (id, gate) in set.gates.iter().enumerate() {
        let m = gate.matrix();
        let dev = m.t().mapv(|z| z.conj()).dot(&m) - Array2::<C64>::eye(4);
        let dev = dev.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > UNITARITY_TOL {
            return Err(CliError::SelfCheck(format!("gate {id} deviates from unitarity by {dev:e}")));
        }
        if !gate.tableau.is_permutation() {
            return Err(CliError::SelfCheck(format!("gate {id} tableau is not a signed permutation")));
        }
        writeln!(s, "\ngate {id}").unwrap();
        writeln!(s, "word: {}", gate.word).unwrap();
        writeln!(s, "matrix (re,im per entry):").unwrap();
        for row in m.rows() {
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.12},{:+.12}", clean(z.re), clean(z.im))).collect();
            writeln!(s, "  {}", cells.join("  ")).unwrap();
        }
        writeln!(s, "conjugation:").unwrap();
        for (from, to, phase) in gate.tableau.rows() {
            writeln!(s, "  {}{} -> {} {}{}", from.0, from.1, phase, to.0, to.1).unwrap();
        }
    }
    emit(out, s.as_bytes())?;
    Ok(s)
}

/// Round-off below 1e-14 printed as an unsigned zero.
fn clean(x: f64) -> f64 {
    if x.abs() < 1e-14 {
        0.0
    } else {
        x
    }
}

/// Exact spectrum: ground energy plus up to 16 lowest eigenvalues.
pub fn cmd_ed(model: &ModelSpec, out: Option<&Path>) -> Result<Vec<f64>, CliError> {
    if model.l > ed::MAX_SITES {
        return Err(CliError::Config(format!("ed needs L <= {} (got {})", ed::MAX_SITES, model.l)));
    }
    let mut spec = ed::spectrum(model)?;
    spec.truncate(16);
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["k", "energy"])?;
    for (k, e) in spec.iter().enumerate() {
        w.write_record([k.to_string(), float(*e)])?;
    }
    emit(out, &w.into_inner().map_err(|e| CliError::Config(e.to_string()))?)?;
    Ok(spec)
}
