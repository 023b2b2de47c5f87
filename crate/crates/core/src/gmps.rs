//! Grassmann matrix product states.
//!
//! Site `a` carries a Grassmann-even tensor with signature (φ†_{a−1}, ψ_a, φ_a).
//! The two boundary legs keep one generator each: the left one is pinned to
//! index 0 and the right one to the parity `p` of the state, so a chain of even
//! tensors can represent either parity sector.

use std::io::{Read, Write};

use ndarray::Dimension;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::env::Environments;
use crate::error::{Error, Result};
use crate::grassmann::{GrassmannTensor, Leg, Parity, C64};
use crate::pauli::Hamiltonian;

pub const MAX_DENSE_SITES: usize = 12;
const CANONICAL_CUTOFF: f64 = 1e-14;
const MAGIC: &[u8; 8] = b"GMPSCHK\0";
const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Gmps {
    sites: Vec<GrassmannTensor>,
    center: usize,
    parity: Parity,
}

fn site_legs(left: u32, right: u32) -> Vec<Leg> {
    vec![Leg::dagger(left), Leg::plain(1), Leg::plain(right)]
}

impl Gmps {
    /// Assemble from site tensors. Checks signatures and evenness only.
    pub fn from_sites(sites: Vec<GrassmannTensor>, center: usize, parity: Parity) -> Result<Gmps> {
        if sites.is_empty() || center >= sites.len() {
            return Err(Error::InvalidArgument("empty chain or center out of range".into()));
        }
        for (a, t) in sites.iter().enumerate() {
            let l = t.legs();
            if l.len() != 3 || !l[0].conjugated || l[1] != Leg::plain(1) || l[2].conjugated {
                return Err(Error::InvalidArgument(format!("site {a} has signature {l:?}")));
            }
            if !t.is_even_declared() {
                return Err(Error::NotEven);
            }
            if a > 0 && sites[a - 1].leg(2).dual() != l[0] {
                return Err(Error::GeneratorMismatch(sites[a - 1].leg(2).generators, l[0].generators));
            }
        }
        if sites[0].leg(0).generators != 1 || sites[sites.len() - 1].leg(2).generators != 1 {
            return Err(Error::InvalidArgument("boundary legs must carry one generator".into()));
        }
        Ok(Gmps { sites, center, parity })
    }

    /// Occupation-number product state, bond dimension 1.
    pub fn product_init(occupations: &[u8]) -> Result<Gmps> {
        if occupations.iter().map(|&o| o as u32).sum::<u32>() % 2 == 1 {
            return Err(Error::InvalidArgument("odd total occupation".into()));
        }
        Gmps::occupation_state(occupations)
    }

    /// Product state in whichever parity sector the occupations fall in.
    pub fn occupation_state(occupations: &[u8]) -> Result<Gmps> {
        if occupations.is_empty() || occupations.iter().any(|&o| o > 1) {
            return Err(Error::InvalidArgument("occupations must be a nonempty 0/1 sequence".into()));
        }
        let mut sites = Vec::with_capacity(occupations.len());
        let mut prev = 0usize;
        for &o in occupations {
            let next = prev ^ o as usize;
            let idx = [prev, o as usize, next];
            let t = GrassmannTensor::from_fn(site_legs(1, 1), true, |ix| {
                if ix == idx {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })?;
            sites.push(t);
            prev = next;
        }
        Gmps::from_sites(sites, 0, Parity::from_bit(prev as u32))
    }

    /// Random even-parity state with bond dimension at most `chi`.
    pub fn random_even_init(n: usize, chi: usize, seed: u64) -> Result<Gmps> {
        Gmps::random_init(n, chi, Parity::Even, seed)
    }

    /// Random state in the given parity sector, normalized, center at site 0.
    /// Bond `a` gets `min(⌈log2 χ⌉, a, n−a)` generators (at least one).
    pub fn random_init(n: usize, chi: usize, parity: Parity, seed: u64) -> Result<Gmps> {
        if n == 0 || chi == 0 {
            return Err(Error::InvalidArgument("need n ≥ 1 and chi ≥ 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = (chi.next_power_of_two().trailing_zeros()).max(1);
        let bond_gens = |a: usize| -> u32 {
            if a == 0 || a == n {
                1
            } else {
                g.min(a as u32).min((n - a) as u32).max(1)
            }
        };
        let mut sites = Vec::with_capacity(n);
        for a in 0..n {
            let mut t = GrassmannTensor::random(site_legs(bond_gens(a), bond_gens(a + 1)), true, &mut rng);
            let pin = |ix: &[usize]| (a == 0 && ix[0] != 0) || (a + 1 == n && ix[2] != parity.bit());
            for (ix, c) in t.coeffs_mut().indexed_iter_mut() {
                if pin(ix.slice()) {
                    *c = C64::new(0.0, 0.0);
                }
            }
            sites.push(t);
        }
        let mut state = Gmps::from_sites(sites, n - 1, parity)?;
        state.move_center(0)?;
        state.normalize()?;
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn sites(&self) -> &[GrassmannTensor] {
        &self.sites
    }

    pub fn site(&self, a: usize) -> &GrassmannTensor {
        &self.sites[a]
    }

    /// Replace two neighbouring sites and set the center. Used by the sweep.
    pub(crate) fn set_pair(&mut self, j: usize, left: GrassmannTensor, right: GrassmannTensor, center: usize) {
        self.sites[j] = left;
        self.sites[j + 1] = right;
        self.center = center;
    }

    /// Leg dimensions of the internal bonds.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.len() - 1].iter().map(|t| t.leg(2).dim()).collect()
    }

    /// Largest number of nonzero singular values any bond can hold.
    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Move the orthogonality center by successive parity-blocked SVDs.
    pub fn move_center(&mut self, target: usize) -> Result<()> {
        if target >= self.len() {
            return Err(Error::InvalidArgument(format!("center {target} outside chain of {}", self.len())));
        }
        while self.center < target {
            let c = self.center;
            let svd = self.sites[c].svd(&[0, 1], usize::MAX, CANONICAL_CUTOFF)?;
            let next = GrassmannTensor::contract(&svd.sv(), 1, &self.sites[c + 1], 0)?;
            self.sites[c] = svd.u;
            self.sites[c + 1] = next;
            self.center += 1;
        }
        while self.center > target {
            let c = self.center;
            let svd = self.sites[c].svd(&[0], usize::MAX, CANONICAL_CUTOFF)?;
            let prev = GrassmannTensor::contract(&self.sites[c - 1], 2, &svd.us(), 0)?;
            self.sites[c] = svd.v;
            self.sites[c - 1] = prev;
            self.center -= 1;
        }
        Ok(())
    }

    /// Norm of the center tensor (the state norm when canonical).
    pub fn center_norm(&self) -> f64 {
        self.sites[self.center].norm()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.center_norm();
        if !(n > 0.0) {
            return Err(Error::Unnormalized(n));
        }
        self.sites[self.center].scale_in_place(C64::new(1.0 / n, 0.0));
        Ok(())
    }

    /// `⟨ψ|ψ⟩` by contracting the whole chain with its bra, ignoring the gauge.
    pub fn norm_squared_by_contraction(&self) -> Result<f64> {
        let h = Hamiltonian::new(self.len(), vec![crate::pauli::PauliString::new(
            C64::new(1.0, 0.0),
            vec![crate::pauli::PauliLabel::Id; self.len()],
        )])?;
        let v = Environments::full_left(self, &h)?;
        Ok(v.re)
    }

    /// Coefficient tensor `A_{ψ₁⋯ψₙ}` with every virtual leg integrated out.
    pub fn dense_state(&self) -> Result<GrassmannTensor> {
        let n = self.len();
        if n > MAX_DENSE_SITES {
            return Err(Error::SizeLimit(format!("{n} sites (limit {MAX_DENSE_SITES})")));
        }
        let mut acc = self.sites[0].project_end_leg(0, 0)?;
        for a in 1..n {
            acc = GrassmannTensor::contract(&acc, a, &self.sites[a], 0)?;
        }
        acc.project_end_leg(n, self.parity.bit())
    }

    /// Amplitudes in the occupation basis with site 1 as the most significant
    /// bit, matching [`crate::pauli::dense_operator`]: `⟨ψ|O|ψ⟩ = v†·O·v`.
    pub fn dense_vector(&self) -> Result<Vec<C64>> {
        let a = self.dense_state()?;
        let n = a.rank();
        let rev: Vec<usize> = (0..n).rev().collect();
        let m = a.joined_matrix(&[], &rev)?;
        Ok(m.iter().map(|z| z.conj()).collect())
    }

    /// `Σ_i a_i ⟨ψ|P^{(i)}|ψ⟩` for a normalized state.
    pub fn expectation(&self, h: &Hamiltonian) -> Result<f64> {
        if h.n_sites() != self.len() {
            return Err(Error::InvalidArgument("Hamiltonian and state lengths differ".into()));
        }
        let v = Environments::full_left(self, h)?;
        if v.im.abs() > 1e-10 * v.re.abs().max(1.0) {
            return Err(Error::ComplexExpectation(v.im));
        }
        Ok(v.re)
    }

    /// Von Neumann entropy (natural log) at the bond between sites `bond` and
    /// `bond + 1`; the center must sit on one of those two sites.
    pub fn bond_entropy(&self, bond: usize) -> Result<f64> {
        if bond + 1 >= self.len() {
            return Err(Error::InvalidArgument(format!("bond {bond} outside chain")));
        }
        let s = if self.center == bond {
            self.sites[bond].singular_values(&[0, 1])?
        } else if self.center == bond + 1 {
            self.sites[bond + 1].singular_values(&[0])?
        } else {
            return Err(Error::InvalidArgument(format!("center {} not adjacent to bond {bond}", self.center)));
        };
        entropy(&s)
    }

    /// Entropies at every bond, from a left-to-right canonical pass over a copy.
    pub fn entropies(&self) -> Result<Vec<f64>> {
        let mut st = self.clone();
        st.move_center(0)?;
        let mut out = Vec::with_capacity(self.len().saturating_sub(1));
        for b in 0..self.len().saturating_sub(1) {
            out.push(st.bond_entropy(b)?);
            st.move_center(b + 1)?;
        }
        Ok(out)
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        w.write_all(&(self.center as u64).to_le_bytes())?;
        w.write_all(&[self.parity.bit() as u8])?;
        for t in &self.sites {
            write_tensor(w, t)?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Gmps> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic header".into()));
        }
        let version = read_u32(r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let n = read_u64(r)? as usize;
        let center = read_u64(r)? as usize;
        let mut p = [0u8; 1];
        r.read_exact(&mut p)?;
        if n == 0 || n > 1 << 20 || p[0] > 1 {
            return Err(Error::Format("bad chain header".into()));
        }
        let sites = (0..n).map(|_| read_tensor(r)).collect::<Result<Vec<_>>>()?;
        Gmps::from_sites(sites, center, Parity::from_bit(p[0] as u32))
    }
}

/// `−Σ λ² ln λ²` of a spectrum normalized to unit 2-norm.
pub fn entropy(s: &[f64]) -> Result<f64> {
    let w: f64 = s.iter().map(|x| x * x).sum();
    if (w - 1.0).abs() > 1e-8 {
        return Err(Error::Unnormalized(w.sqrt()));
    }
    Ok(entropy_unchecked(s))
}

/// Entropy of `s` after normalizing it.
pub fn entropy_unchecked(s: &[f64]) -> f64 {
    let w: f64 = s.iter().map(|x| x * x).sum();
    if w <= 0.0 {
        return 0.0;
    }
    let h: f64 = s.iter().map(|x| x * x / w).filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum();
    // a pure state gives -0.0 or a rounding-level negative
    if h > 0.0 {
        h
    } else {
        0.0
    }
}

pub(crate) fn write_tensor(w: &mut impl Write, t: &GrassmannTensor) -> Result<()> {
    w.write_all(&(t.rank() as u32).to_le_bytes())?;
    for l in t.legs() {
        w.write_all(&l.generators.to_le_bytes())?;
        w.write_all(&[l.conjugated as u8])?;
    }
    w.write_all(&[t.is_even_declared() as u8])?;
    for c in t.data() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_tensor(r: &mut impl Read) -> Result<GrassmannTensor> {
    let rank = read_u32(r)? as usize;
    if rank > 16 {
        return Err(Error::Format(format!("rank {rank}")));
    }
    let mut legs = Vec::with_capacity(rank);
    let mut total = 0u32;
    for _ in 0..rank {
        let g = read_u32(r)?;
        let mut c = [0u8; 1];
        r.read_exact(&mut c)?;
        total += g;
        if g == 0 || total > 24 || c[0] > 1 {
            return Err(Error::Format("bad leg metadata".into()));
        }
        legs.push(Leg::new(g, c[0] == 1));
    }
    let mut e = [0u8; 1];
    r.read_exact(&mut e)?;
    let dims: Vec<usize> = legs.iter().map(|l| l.dim()).collect();
    let len: usize = dims.iter().product();
    let mut data = Vec::with_capacity(len);
    let mut buf = [0u8; 16];
    for _ in 0..len {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
        data.push(C64::new(re, im));
    }
    let coeffs = ndarray::ArrayD::from_shape_vec(ndarray::IxDyn(&dims), data).expect("length checked");
    GrassmannTensor::new(legs, coeffs, e[0] == 1)
}

pub(crate) fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub(crate) fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

