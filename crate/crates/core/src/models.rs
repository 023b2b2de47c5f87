//! Benchmark Hamiltonians as Pauli-string lists.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grassmann::{Parity, C64};
use crate::pauli::{Hamiltonian, PauliLabel, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Tv,
    TightBinding,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Tv => "tv",
            ModelKind::TightBinding => "tight-binding",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tv" | "t-v" => Ok(ModelKind::Tv),
            "tight-binding" | "tight_binding" | "tb" => Ok(ModelKind::TightBinding),
            _ => Err(Error::InvalidArgument(format!("unknown model `{s}`"))),
        }
    }
}

/// Open spinless-fermion chain
/// `H = -t Σ (c†_i c_{i+1} + h.c.) + V Σ (n_i - ½)(n_{i+1} - ½)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub l: usize,
    pub t: f64,
    pub v: f64,
}

impl ModelSpec {
    pub fn tv(l: usize, t: f64, v: f64) -> ModelSpec {
        ModelSpec { kind: ModelKind::Tv, l, t, v }
    }

    pub fn tight_binding(l: usize, t: f64) -> ModelSpec {
        ModelSpec { kind: ModelKind::TightBinding, l, t, v: 0.0 }
    }

    /// Interaction actually used by the model (zero for tight binding).
    pub fn interaction(&self) -> f64 {
        match self.kind {
            ModelKind::Tv => self.v,
            ModelKind::TightBinding => 0.0,
        }
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        match self.kind {
            ModelKind::Tv => build_tv(self.l, self.t, self.v),
            ModelKind::TightBinding => build_tight_binding(self.l, self.t),
        }
    }

    /// Fermion parity of the half-filled sector, `⌊L/2⌋ mod 2`, where the
    /// particle–hole symmetric chain has its ground state.
    pub fn ground_parity(&self) -> Parity {
        Parity::from_bit((self.l / 2) as u32)
    }
}

/// Per bond: `(−it/2) ς^x ς^y`, `(+it/2) ς^y ς^x` and `(V/4) ς^z ς^z`; strings
/// with zero coefficient are dropped.
pub fn build_tv(l: usize, t: f64, v: f64) -> Result<Hamiltonian> {
    use PauliLabel::*;
    if l < 2 {
        return Err(Error::InvalidArgument(format!("chain length {l} < 2")));
    }
    let mut terms = Vec::with_capacity(3 * (l - 1));
    for i in 0..l - 1 {
        if t != 0.0 {
            terms.push(PauliString::local(l, i, C64::new(0.0, -t / 2.0), &[X, Y]));
            terms.push(PauliString::local(l, i, C64::new(0.0, t / 2.0), &[Y, X]));
        }
        if v != 0.0 {
            terms.push(PauliString::local(l, i, C64::new(v / 4.0, 0.0), &[Z, Z]));
        }
    }
    let h = Hamiltonian::new(l, terms)?;
    h.check_hermitian()?;
    Ok(h)
}

pub fn build_tight_binding(l: usize, t: f64) -> Result<Hamiltonian> {
    build_tv(l, t, 0.0)
}
