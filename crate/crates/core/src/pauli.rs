//! Grassmann Pauli operators ς^μ, fermion operators and Pauli-string Hamiltonians.

use std::fmt;

use ndarray::{Array2, ArrayD, IxDyn};

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannTensor, Leg, Parity, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLabel {
    Id,
    X,
    Y,
    Z,
}

impl PauliLabel {
    pub const ALL: [PauliLabel; 4] = [PauliLabel::Id, PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> PauliLabel {
        PauliLabel::ALL[k]
    }

    /// x and y are Grassmann-odd.
    pub fn parity(self) -> Parity {
        match self {
            PauliLabel::X | PauliLabel::Y => Parity::Odd,
            _ => Parity::Even,
        }
    }

    pub fn matrix(self) -> [[C64; 2]; 2] {
        let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        match self {
            PauliLabel::Id => [[l, o], [o, l]],
            PauliLabel::X => [[o, l], [l, o]],
            PauliLabel::Y => [[o, -i], [i, o]],
            PauliLabel::Z => [[l, o], [o, -l]],
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PauliLabel::Id => "id",
            PauliLabel::X => "x",
            PauliLabel::Y => "y",
            PauliLabel::Z => "z",
        }
    }

    pub fn from_symbol(s: &str) -> Option<PauliLabel> {
        PauliLabel::ALL.into_iter().find(|l| l.symbol() == s)
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Rank-(1,1) tensor on legs (φ†, ψ) from a 2×2 matrix.
pub fn single_site_operator(m: [[C64; 2]; 2]) -> GrassmannTensor {
    let data = vec![m[0][0], m[0][1], m[1][0], m[1][1]];
    let coeffs = ArrayD::from_shape_vec(IxDyn(&[2, 2]), data).expect("2x2");
    let even = m[0][1] == C64::new(0.0, 0.0) && m[1][0] == C64::new(0.0, 0.0);
    GrassmannTensor::new(vec![Leg::dagger(1), Leg::plain(1)], coeffs, even).expect("valid operator")
}

/// ς^μ: coefficients are the Pauli matrix σ^μ on legs (φ†, ψ).
pub fn make_pauli(mu: PauliLabel) -> GrassmannTensor {
    single_site_operator(mu.matrix())
}

/// Operator product `a · b` of two single-site operators: `a`'s ψ contracted
/// with `b`'s φ†.
pub fn compose(a: &GrassmannTensor, b: &GrassmannTensor) -> Result<GrassmannTensor> {
    GrassmannTensor::contract(a, a.rank() - 1, b, 0)
}

#[derive(Clone, Debug)]
pub struct FermionOps {
    pub c: GrassmannTensor,
    pub c_dag: GrassmannTensor,
    pub n: GrassmannTensor,
}

/// c = ½(ς^x + iς^y), c† = ½(ς^x − iς^y), n = ½(ς^id − ς^z).
pub fn make_fermion_ops() -> FermionOps {
    let half = C64::new(0.5, 0.0);
    let i = C64::new(0.0, 1.0);
    let (x, y, z, id) = (
        make_pauli(PauliLabel::X),
        make_pauli(PauliLabel::Y),
        make_pauli(PauliLabel::Z),
        make_pauli(PauliLabel::Id),
    );
    let mut c = x.scale(half);
    c.add_scaled(half * i, &y).expect("same legs");
    let mut c_dag = x.scale(half);
    c_dag.add_scaled(-half * i, &y).expect("same legs");
    let mut n = id.scale(half);
    n.add_scaled(-half, &z).expect("same legs");
    FermionOps { c, c_dag, n: n.with_even_declared(true).expect("n is even") }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    pub coeff: C64,
    pub labels: Vec<PauliLabel>,
}

impl PauliString {
    pub fn new(coeff: C64, labels: Vec<PauliLabel>) -> PauliString {
        PauliString { coeff, labels }
    }

    /// String with `labels` placed from `site` on, identity elsewhere.
    pub fn local(n: usize, site: usize, coeff: C64, labels: &[PauliLabel]) -> PauliString {
        let mut all = vec![PauliLabel::Id; n];
        all[site..site + labels.len()].copy_from_slice(labels);
        PauliString { coeff, labels: all }
    }

    /// First and last non-identity site; `(0, 0)` for the all-identity string.
    pub fn support(&self) -> (usize, usize) {
        let lo = self.labels.iter().position(|&l| l != PauliLabel::Id);
        let hi = self.labels.iter().rposition(|&l| l != PauliLabel::Id);
        match (lo, hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => (0, 0),
        }
    }

    pub fn odd_count(&self) -> usize {
        self.labels.iter().filter(|l| l.parity().is_odd()).count()
    }

    /// Whether `coeff · string` equals its own adjoint. Reversing a product of
    /// `k` odd factors gives `(-1)^{k(k-1)/2}`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let k = self.odd_count();
        let s = if (k * k.saturating_sub(1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        (self.coeff - self.coeff.conj() * s).norm() <= tol * self.coeff.norm().max(1.0)
    }
}

/// Parity of a string: count of x/y labels mod 2.
pub fn string_parity(s: &PauliString) -> Parity {
    Parity::from_bit(s.odd_count() as u32)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    n_sites: usize,
    terms: Vec<PauliString>,
}

impl Hamiltonian {
    /// Validates lengths and even parity of every term.
    pub fn new(n_sites: usize, terms: Vec<PauliString>) -> Result<Hamiltonian> {
        for (k, t) in terms.iter().enumerate() {
            if t.labels.len() != n_sites {
                return Err(Error::InvalidArgument(format!(
                    "term {k} has {} labels for {n_sites} sites",
                    t.labels.len()
                )));
            }
            if string_parity(t) == Parity::Odd {
                return Err(Error::OddTerm(k));
            }
        }
        Ok(Hamiltonian { n_sites, terms })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn terms_mut(&mut self) -> &mut [PauliString] {
        &mut self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn check_hermitian(&self) -> Result<()> {
        match self.terms.iter().position(|t| !t.is_hermitian(1e-12)) {
            Some(index) => Err(Error::NonHermitian { index }),
            None => Ok(()),
        }
    }
}

/// Grassmann product ς^{μ_1}(φ†_1,ψ_1) ς^{μ_2}(φ†_2,ψ_2) … of one string,
/// without its coefficient.
pub fn string_tensor(labels: &[PauliLabel]) -> GrassmannTensor {
    let mut t = GrassmannTensor::scalar(C64::new(1.0, 0.0));
    for &l in labels {
        t = GrassmannTensor::outer(&t, &make_pauli(l));
    }
    t
}

/// Dense `2^n × 2^n` matrix of a string operator. Rows join (φ†_1 … φ†_n) and
/// columns join (ψ_n … ψ_1), so site 1 is the most significant bit on both
/// sides and operator composition is matrix multiplication.
pub fn dense_string(labels: &[PauliLabel]) -> Result<Array2<C64>> {
    let n = labels.len();
    if n > 12 {
        return Err(Error::SizeLimit(format!("{n} sites (limit 12)")));
    }
    let t = string_tensor(labels);
    let rows: Vec<usize> = (0..n).map(|k| 2 * k).collect();
    let cols: Vec<usize> = (0..n).rev().map(|k| 2 * k + 1).collect();
    t.joined_matrix(&rows, &cols)
}

/// Dense matrix of `Σ a_i P^{(i)}`; see [`dense_string`].
pub fn dense_operator(h: &Hamiltonian) -> Result<Array2<C64>> {
    let n = h.n_sites();
    if n > 12 {
        return Err(Error::SizeLimit(format!("{n} sites (limit 12)")));
    }
    let d = 1usize << n;
    let mut m = Array2::<C64>::zeros((d, d));
    for term in h.terms() {
        let s = dense_string(&term.labels)?;
        m.scaled_add(term.coeff, &s);
    }
    Ok(m)
}
