//! Two-site DMRG on Grassmann MPS with an optional Clifford disentangling step
//! at every bond.

use std::io::{Read, Write};

use crate::clifford::{canonical_gates, CliffordGate, ConjugationTable, GateSet};
use crate::env::Environments;
use crate::error::{Error, Result};
use crate::gmps::{entropy_unchecked, read_u32, read_u64, Gmps};
use crate::grassmann::{GrassmannTensor, C64};
use crate::lanczos::{local_ground_state, EigenOptions};
use crate::models::ModelSpec;
use crate::pauli::{Hamiltonian, PauliLabel, PauliString};

/// Bond dimension of the random starting state.
pub const INIT_CHI: usize = 16;
pub const WARMUP_SWEEPS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntanglementMeasure {
    VonNeumann,
    Renyi2,
}

impl EntanglementMeasure {
    pub fn of(self, s: &[f64]) -> f64 {
        match self {
            EntanglementMeasure::VonNeumann => entropy_unchecked(s),
            EntanglementMeasure::Renyi2 => {
                let w: f64 = s.iter().map(|x| x * x).sum();
                if w <= 0.0 {
                    return 0.0;
                }
                let h = -s.iter().map(|x| (x * x / w).powi(2)).sum::<f64>().ln();
                if h > 0.0 {
                    h
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub chi_max: usize,
    pub cutoff: f64,
    pub n_sweeps: usize,
    pub clifford_enabled: bool,
    pub eig_tol: f64,
    pub eig_max_iter: usize,
    pub entropy_gain_threshold: f64,
    pub measure: EntanglementMeasure,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            chi_max: 64,
            cutoff: 1e-12,
            n_sweeps: 40,
            clifford_enabled: true,
            eig_tol: 1e-10,
            eig_max_iter: 200,
            entropy_gain_threshold: 1e-12,
            measure: EntanglementMeasure::VonNeumann,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.chi_max == 0 || self.n_sweeps == 0 {
            return Err(Error::InvalidArgument("chi_max and n_sweeps must be at least 1".into()));
        }
        if !(self.cutoff >= 0.0 && self.eig_tol > 0.0 && self.entropy_gain_threshold >= 0.0) {
            return Err(Error::InvalidArgument("tolerances must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateLogEntry {
    pub sweep: usize,
    pub bond: usize,
    pub gate: usize,
    pub entropy_before: f64,
    pub entropy_after: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GateLog {
    pub entries: Vec<GateLogEntry>,
}

impl GateLog {
    /// Entries that applied a gate other than the identity.
    pub fn applied(&self) -> impl Iterator<Item = &GateLogEntry> {
        self.entries.iter().filter(|e| e.gate != 0)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepReport {
    /// `⟨ψ|H|ψ⟩` after every half sweep (post truncation).
    pub energies: Vec<f64>,
    /// Largest discarded weight of every half sweep.
    pub truncation: Vec<f64>,
    /// Final bond entropies (natural log).
    pub entropies: Vec<f64>,
    pub gate_log: GateLog,
    /// Local solves that stopped at the iteration limit.
    pub unconverged: usize,
    pub max_residual: f64,
    /// `⟨ψ|H|ψ⟩` of the final state in the final frame.
    pub energy: f64,
}

impl SweepReport {
    /// Whole-sweep energies never rise by more than `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        let full: Vec<f64> = self.energies.iter().skip(1).step_by(2).copied().collect();
        full.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

/// Result of the gate search at one bond.
#[derive(Clone, Debug)]
pub struct Disentangled {
    pub gate: usize,
    pub theta: GrassmannTensor,
    pub entropy_before: f64,
    pub entropy_after: f64,
}

/// `θ ⋆ C†` on the two physical legs of a two-site tensor.
pub fn apply_gate(theta: &GrassmannTensor, adjoint: &GrassmannTensor) -> Result<GrassmannTensor> {
    GrassmannTensor::contract_pairs(theta, adjoint, &[(1, 0), (2, 1)])?.sign_permute(&[0, 3, 2, 1])
}

/// Try every gate and keep the one with the lowest bond entanglement; the
/// identity (gate 0) wins unless beaten by more than `threshold`.
pub fn disentangle(
    theta: &GrassmannTensor,
    gates: &[CliffordGate],
    adjoints: &[GrassmannTensor],
    threshold: f64,
    measure: EntanglementMeasure,
) -> Result<Disentangled> {
    let before = measure.of(&theta.singular_values(&[0, 1])?);
    let mut best: Option<(usize, f64, GrassmannTensor)> = None;
    for (g, adj) in adjoints.iter().enumerate().skip(1) {
        let t = apply_gate(theta, adj)?;
        let s = measure.of(&t.singular_values(&[0, 1])?);
        if best.as_ref().is_none_or(|b| s < b.1) {
            best = Some((g, s, t));
        }
    }
    debug_assert_eq!(gates.len(), adjoints.len());
    match best {
        Some((g, s, t)) if s < before - threshold => {
            Ok(Disentangled { gate: g, theta: t, entropy_before: before, entropy_after: s })
        }
        _ => Ok(Disentangled { gate: 0, theta: theta.clone(), entropy_before: before, entropy_after: before }),
    }
}

#[derive(Clone, Debug)]
pub struct Truncation {
    pub left: GrassmannTensor,
    pub spectrum: Vec<f64>,
    pub right: GrassmannTensor,
    pub error: f64,
    weights: Vec<f64>,
}

impl Truncation {
    /// `U · diag(s)`.
    pub fn left_weighted(&self) -> GrassmannTensor {
        let last = self.left.rank() - 1;
        self.left.scale_axis(last, &self.weights)
    }

    /// `diag(s) · V`.
    pub fn right_weighted(&self) -> GrassmannTensor {
        self.right.scale_axis(0, &self.weights)
    }
}

/// Parity-blocked SVD of a two-site tensor across the (j | j+1) cut, with the
/// kept spectrum renormalized to unit 2-norm.
pub fn truncate_split(theta: &GrassmannTensor, chi_max: usize, cutoff: f64) -> Result<Truncation> {
    let svd = theta.svd(&[0, 1], chi_max, cutoff)?;
    let kept: f64 = svd.s.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(kept > 0.0) {
        return Err(Error::EmptySpectrum);
    }
    let weights: Vec<f64> = svd.s.iter().map(|x| x / kept).collect();
    let mut spectrum: Vec<f64> = weights.iter().copied().filter(|&x| x > 0.0).collect();
    spectrum.sort_by(|a, b| b.total_cmp(a));
    Ok(Truncation { left: svd.u, spectrum, right: svd.v, error: svd.discarded_weight, weights })
}

/// `H → C H C†` for the pair of sites (j, j+1).
pub fn conjugate_hamiltonian(h: &Hamiltonian, table: &ConjugationTable, j: usize) -> Hamiltonian {
    let mut out = h.clone();
    for term in out.terms_mut() {
        let pair = (term.labels[j], term.labels[j + 1]);
        if pair == (PauliLabel::Id, PauliLabel::Id) {
            continue;
        }
        let ((a, b), phase) = table.image(pair);
        term.labels[j] = a;
        term.labels[j + 1] = b;
        term.coeff = phase.apply(term.coeff);
    }
    out
}

/// Undo every logged gate, newest first.
pub fn restore_frame(h: &Hamiltonian, log: &GateLog, gates: &GateSet) -> Hamiltonian {
    let mut out = h.clone();
    for e in log.applied().collect::<Vec<_>>().into_iter().rev() {
        out = conjugate_hamiltonian(&out, &gates.gates[e.gate].tableau.inverse(), e.bond);
    }
    out
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: SweepReport,
    pub state: Gmps,
    /// Hamiltonian in the final (rotated) frame.
    pub hamiltonian: Hamiltonian,
}

/// Sweeping engine holding the state, the current-frame Hamiltonian and the
/// environments.
pub struct Dmrg {
    state: Gmps,
    h: Hamiltonian,
    envs: Environments,
    config: SweepConfig,
    gates: &'static GateSet,
    adjoints: Vec<GrassmannTensor>,
    report: SweepReport,
    sweep: usize,
}

impl Dmrg {
    pub fn new(mut state: Gmps, h: Hamiltonian, config: SweepConfig) -> Result<Dmrg> {
        config.validate()?;
        if state.len() < 2 || h.n_sites() != state.len() {
            return Err(Error::InvalidArgument("need at least two sites and a matching Hamiltonian".into()));
        }
        state.move_center(0)?;
        state.normalize()?;
        let gates = canonical_gates()?;
        let adjoints = gates.gates.iter().map(|g| g.adjoint()).collect();
        let envs = Environments::new(&state, &h)?;
        Ok(Dmrg { state, h, envs, config, gates, adjoints, report: SweepReport::default(), sweep: 0 })
    }

    pub fn state(&self) -> &Gmps {
        &self.state
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.h
    }

    pub fn report(&self) -> &SweepReport {
        &self.report
    }

    fn update_bond(&mut self, j: usize, rightward: bool) -> Result<f64> {
        let theta = GrassmannTensor::contract(self.state.site(j), 2, self.state.site(j + 1), 0)?;
        let opts = EigenOptions { tol: self.config.eig_tol, max_iter: self.config.eig_max_iter, ..Default::default() };
        let eig = {
            let op = self.envs.bond_operator(&self.h, j)?;
            let mask = op.live_mask().to_vec();
            local_ground_state(|t| op.apply(t), &theta, &mask, opts)?
        };
        if !eig.converged {
            self.report.unconverged += 1;
        }
        self.report.max_residual = self.report.max_residual.max(eig.residual);
        let mut theta = eig.vector;
        if self.config.clifford_enabled {
            let d = disentangle(
                &theta,
                &self.gates.gates,
                &self.adjoints,
                self.config.entropy_gain_threshold,
                self.config.measure,
            )?;
            if d.gate != 0 {
                self.h = conjugate_hamiltonian(&self.h, &self.gates.gates[d.gate].tableau, j);
            }
            self.report.gate_log.entries.push(GateLogEntry {
                sweep: self.sweep,
                bond: j,
                gate: d.gate,
                entropy_before: d.entropy_before,
                entropy_after: d.entropy_after,
            });
            theta = d.theta;
        }
        let tr = truncate_split(&theta, self.config.chi_max, self.config.cutoff)?;
        if rightward {
            self.state.set_pair(j, tr.left.clone(), tr.right_weighted(), j + 1);
            self.envs.update_left(&self.state, &self.h, j)?;
        } else {
            self.state.set_pair(j, tr.left_weighted(), tr.right.clone(), j);
            self.envs.update_right(&self.state, &self.h, j + 1)?;
        }
        Ok(tr.error)
    }

    /// One full sweep: left to right, then right to left.
    pub fn sweep(&mut self) -> Result<()> {
        let n = self.state.len();
        for rightward in [true, false] {
            let bonds: Vec<usize> = if rightward { (0..n - 1).collect() } else { (0..n - 1).rev().collect() };
            let mut trunc: f64 = 0.0;
            for j in bonds {
                trunc = trunc.max(self.update_bond(j, rightward)?);
            }
            self.report.energies.push(self.state.expectation(&self.h)?);
            self.report.truncation.push(trunc);
        }
        self.sweep += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<RunOutput> {
        self.report.energy = self.state.expectation(&self.h)?;
        self.report.entropies = self.state.entropies()?;
        Ok(RunOutput { report: self.report, state: self.state, hamiltonian: self.h })
    }
}

/// Sweep `config.n_sweeps` times from the given state.
pub fn run_from(state: Gmps, h: Hamiltonian, config: &SweepConfig) -> Result<RunOutput> {
    let mut d = Dmrg::new(state, h, config.clone())?;
    for _ in 0..config.n_sweeps {
        d.sweep()?;
    }
    d.finish()
}

/// Ground state of a model from a seeded random start in the half-filled
/// parity sector. The start is first relaxed by [`WARMUP_SWEEPS`] plain sweeps
/// at the same bond dimension, so gate choices are never made against a
/// random environment; the warm-up is not part of the report.
pub fn run(spec: &ModelSpec, config: &SweepConfig, seed: u64) -> Result<RunOutput> {
    config.validate()?;
    let h = spec.hamiltonian()?;
    let state = Gmps::random_init(spec.l, config.chi_max.min(INIT_CHI), spec.ground_parity(), seed)?;
    let warm = SweepConfig { n_sweeps: WARMUP_SWEEPS, clifford_enabled: false, ..config.clone() };
    let state = run_from(state, h.clone(), &warm)?.state;
    run_from(state, h, config)
}

const CHECKPOINT_MAGIC: &[u8; 8] = b"CAGMPSRN";
const CHECKPOINT_VERSION: u32 = 1;

/// State, rotated Hamiltonian and gate history in one file.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub state: Gmps,
    pub hamiltonian: Hamiltonian,
    pub gate_log: GateLog,
}

impl Checkpoint {
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(CHECKPOINT_MAGIC)?;
        w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        self.state.write_to(w)?;
        let h = &self.hamiltonian;
        w.write_all(&(h.n_sites() as u64).to_le_bytes())?;
        w.write_all(&(h.len() as u64).to_le_bytes())?;
        for t in h.terms() {
            w.write_all(&t.coeff.re.to_le_bytes())?;
            w.write_all(&t.coeff.im.to_le_bytes())?;
            let labels: Vec<u8> = t.labels.iter().map(|l| l.index() as u8).collect();
            w.write_all(&labels)?;
        }
        w.write_all(&(self.gate_log.entries.len() as u64).to_le_bytes())?;
        for e in &self.gate_log.entries {
            for x in [e.sweep, e.bond, e.gate] {
                w.write_all(&(x as u64).to_le_bytes())?;
            }
            w.write_all(&e.entropy_before.to_le_bytes())?;
            w.write_all(&e.entropy_after.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Checkpoint> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(Error::Format("bad checkpoint header".into()));
        }
        let v = read_u32(r)?;
        if v != CHECKPOINT_VERSION {
            return Err(Error::Format(format!("unsupported checkpoint version {v}")));
        }
        let state = Gmps::read_from(r)?;
        let n = read_u64(r)? as usize;
        let m = read_u64(r)? as usize;
        if n != state.len() || m > 1 << 24 {
            return Err(Error::Format("Hamiltonian header does not match the state".into()));
        }
        let mut terms = Vec::with_capacity(m);
        for _ in 0..m {
            let re = read_f64(r)?;
            let im = read_f64(r)?;
            let mut raw = vec![0u8; n];
            r.read_exact(&mut raw)?;
            if raw.iter().any(|&b| b > 3) {
                return Err(Error::Format("bad Pauli label".into()));
            }
            let labels = raw.into_iter().map(|b| PauliLabel::from_index(b as usize)).collect();
            terms.push(PauliString::new(C64::new(re, im), labels));
        }
        let hamiltonian = Hamiltonian::new(n, terms)?;
        let k = read_u64(r)? as usize;
        if k > 1 << 28 {
            return Err(Error::Format("gate log too long".into()));
        }
        let mut entries = Vec::with_capacity(k);
        for _ in 0..k {
            let sweep = read_u64(r)? as usize;
            let bond = read_u64(r)? as usize;
            let gate = read_u64(r)? as usize;
            if gate >= 12 || bond + 1 >= n {
                return Err(Error::Format("bad gate log entry".into()));
            }
            let entropy_before = read_f64(r)?;
            let entropy_after = read_f64(r)?;
            entries.push(GateLogEntry { sweep, bond, gate, entropy_before, entropy_after });
        }
        Ok(Checkpoint { state, hamiltonian, gate_log: GateLog { entries } })
    }
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
