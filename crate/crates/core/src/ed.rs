//! Exact references built from second-quantized operators on the occupation
//! basis, independent of the Grassmann machinery.
//!
//! Basis states are bit strings with site 0 as the most significant bit. The
//! annihilator carries a Jordan–Wigner string over lower sites,
//! `c_i = Z_0 ⋯ Z_{i-1} a_i`.

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};

use crate::error::{Error, Result};
use crate::models::ModelSpec;

pub const MAX_SITES: usize = 12;
const MAX_OPERATOR_SITES: usize = 8;

fn bit(l: usize, i: usize) -> usize {
    1 << (l - 1 - i)
}

/// `c_i |s⟩ = sign |s'⟩`, or `None` when site `i` is empty.
pub fn apply_c(l: usize, i: usize, s: usize) -> Option<(f64, usize)> {
    let b = bit(l, i);
    if s & b == 0 {
        return None;
    }
    Some((jw_sign(l, i, s), s ^ b))
}

/// `c†_i |s⟩ = sign |s'⟩`, or `None` when site `i` is occupied.
pub fn apply_c_dag(l: usize, i: usize, s: usize) -> Option<(f64, usize)> {
    let b = bit(l, i);
    if s & b != 0 {
        return None;
    }
    Some((jw_sign(l, i, s), s ^ b))
}

fn jw_sign(l: usize, i: usize, s: usize) -> f64 {
    let lower = if i == 0 { 0 } else { s >> (l - i) };
    if lower.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn occupied(l: usize, i: usize, s: usize) -> bool {
    s & bit(l, i) != 0
}

/// Dense `c_i`, `c†_i`, `n_i` for every site.
#[derive(Clone, Debug)]
pub struct DenseFermionOps {
    pub c: Vec<Array2<f64>>,
    pub c_dag: Vec<Array2<f64>>,
    pub n: Vec<Array2<f64>>,
}

impl DenseFermionOps {
    pub fn new(l: usize) -> Result<DenseFermionOps> {
        if l == 0 || l > MAX_OPERATOR_SITES {
            return Err(Error::SizeLimit(format!("{l} sites (operator limit {MAX_OPERATOR_SITES})")));
        }
        let d = 1usize << l;
        let mut ops = DenseFermionOps { c: vec![], c_dag: vec![], n: vec![] };
        for i in 0..l {
            let mut c = Array2::zeros((d, d));
            let mut n = Array2::zeros((d, d));
            for s in 0..d {
                if let Some((sign, t)) = apply_c(l, i, s) {
                    c[[t, s]] = sign;
                }
                if occupied(l, i, s) {
                    n[[s, s]] = 1.0;
                }
            }
            ops.c_dag.push(c.t().to_owned());
            ops.c.push(c);
            ops.n.push(n);
        }
        Ok(ops)
    }
}

fn tv_element_action(spec: &ModelSpec, s: usize, mut emit: impl FnMut(usize, f64)) {
    let l = spec.l;
    let (t, v) = (spec.t, spec.interaction());
    let mut diag = 0.0;
    for i in 0..l.saturating_sub(1) {
        let j = i + 1;
        if t != 0.0 {
            // −t c†_i c_j and −t c†_j c_i
            for (a, b) in [(i, j), (j, i)] {
                if let Some((s1, u)) = apply_c(l, b, s) {
                    if let Some((s2, w)) = apply_c_dag(l, a, u) {
                        emit(w, -t * s1 * s2);
                    }
                }
            }
        }
        let ni = if occupied(l, i, s) { 0.5 } else { -0.5 };
        let nj = if occupied(l, j, s) { 0.5 } else { -0.5 };
        diag += v * ni * nj;
    }
    emit(s, diag);
}

/// Full `2^L` matrix of the model.
pub fn dense_hamiltonian(spec: &ModelSpec) -> Result<Array2<f64>> {
    check_size(spec.l)?;
    let d = 1usize << spec.l;
    let mut h = Array2::zeros((d, d));
    for s in 0..d {
        tv_element_action(spec, s, |row, val| h[[row, s]] += val);
    }
    Ok(h)
}

/// Block of the Hamiltonian with exactly `particles` fermions, with its basis.
pub fn sector_hamiltonian(spec: &ModelSpec, particles: usize) -> Result<(Vec<usize>, Array2<f64>)> {
    check_size(spec.l)?;
    let basis: Vec<usize> = (0..1usize << spec.l)
        .filter(|s| s.count_ones() as usize == particles)
        .collect();
    let mut pos = vec![usize::MAX; 1 << spec.l];
    for (k, &s) in basis.iter().enumerate() {
        pos[s] = k;
    }
    let mut h = Array2::zeros((basis.len(), basis.len()));
    for (k, &s) in basis.iter().enumerate() {
        tv_element_action(spec, s, |row, val| h[[pos[row], k]] += val);
    }
    Ok((basis, h))
}

/// Every eigenvalue of the model, ascending. Solved per particle-number block,
/// which the Hamiltonian conserves.
pub fn spectrum(spec: &ModelSpec) -> Result<Vec<f64>> {
    check_size(spec.l)?;
    let mut all = Vec::with_capacity(1 << spec.l);
    for n in 0..=spec.l {
        let (_, h) = sector_hamiltonian(spec, n)?;
        let (w, _) = h.eigh(UPLO::Lower)?;
        all.extend(w.iter().copied());
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}

pub fn ground_energy(spec: &ModelSpec) -> Result<f64> {
    Ok(spectrum(spec)?[0])
}

/// Hopping matrix of the single-particle problem.
pub fn single_particle_matrix(l: usize, t: f64) -> Array2<f64> {
    let mut h = Array2::zeros((l, l));
    for i in 0..l.saturating_sub(1) {
        h[[i, i + 1]] = -t;
        h[[i + 1, i]] = -t;
    }
    h
}

/// Σ_k min(ε_k, 0) with ε_k = −2t cos(kπ/(L+1)).
pub fn free_fermion_energy(l: usize, t: f64) -> f64 {
    (1..=l)
        .map(|k| -2.0 * t * (k as f64 * std::f64::consts::PI / (l as f64 + 1.0)).cos())
        // zero modes (odd L) evaluate to ±1e-16; they contribute nothing
        .filter(|&e| e < -1e-12 * t.abs())
        .sum()
}

fn check_size(l: usize) -> Result<()> {
    if l == 0 || l > MAX_SITES {
        return Err(Error::SizeLimit(format!("{l} sites (limit {MAX_SITES})")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray_linalg::Eigh;

    fn eig(h: &Array2<f64>) -> Vec<f64> {
        let (w, _) = h.eigh(UPLO::Lower).unwrap();
        w.to_vec()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn anticommutation() {
        for l in 1..=6 {
            let ops = DenseFermionOps::new(l).unwrap();
            let id = Array2::<f64>::eye(1 << l);
            for i in 0..l {
                for j in 0..l {
                    let a = ops.c[i].dot(&ops.c_dag[j]) + ops.c_dag[j].dot(&ops.c[i]);
                    let want = if i == j { id.clone() } else { Array2::zeros(id.raw_dim()) };
                    assert_eq!(a, want);
                    let b = ops.c[i].dot(&ops.c[j]) + ops.c[j].dot(&ops.c[i]);
                    assert!(b.iter().all(|&x| x == 0.0));
                }
                assert_eq!(ops.c_dag[i].dot(&ops.c[i]), ops.n[i]);
            }
        }
    }

    #[test]
    fn hamiltonian_from_operator_matrices() {
        let spec = ModelSpec::tv(5, 1.0, 2.0);
        let ops = DenseFermionOps::new(5).unwrap();
        let id = Array2::<f64>::eye(32);
        let mut h = Array2::<f64>::zeros((32, 32));
        for i in 0..4 {
            h = h - (ops.c_dag[i].dot(&ops.c[i + 1]) - ops.c[i].dot(&ops.c_dag[i + 1]));
            h = h + 2.0 * (&ops.n[i] - &(0.5 * &id)).dot(&(&ops.n[i + 1] - &(0.5 * &id)));
        }
        let d = dense_hamiltonian(&spec).unwrap();
        assert!((&h - &d).iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn two_site_spectra() {
        let w = eig(&dense_hamiltonian(&ModelSpec::tv(2, 1.0, 0.0)).unwrap());
        assert!(close(&w, &[-1.0, 0.0, 0.0, 1.0], 1e-14));
        let w = eig(&dense_hamiltonian(&ModelSpec::tv(2, 0.0, 4.0)).unwrap());
        assert!(close(&w, &[-1.0, -1.0, 1.0, 1.0], 1e-14));
        assert!((ground_energy(&ModelSpec::tv(2, 1.0, 0.0)).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn free_fermion_values() {
        assert_eq!(free_fermion_energy(1, 1.0), 0.0);
        assert!((free_fermion_energy(2, 1.0) + 1.0).abs() < 1e-14);
        assert!((free_fermion_energy(4, 1.0) + 5f64.sqrt()).abs() < 1e-14);
        assert!((ground_energy(&ModelSpec::tight_binding(4, 1.0)).unwrap() + 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn block_spectrum_matches_full_matrix() {
        let spec = ModelSpec::tv(6, 1.0, 2.0);
        let full = eig(&dense_hamiltonian(&spec).unwrap());
        assert!(close(&full, &spectrum(&spec).unwrap(), 1e-10));
    }

    #[test]
    fn conserves_particle_number_and_parity() {
        let spec = ModelSpec::tv(6, 1.0, 2.0);
        let h = dense_hamiltonian(&spec).unwrap();
        let d = h.nrows();
        let num = Array2::from_shape_fn((d, d), |(a, b)| if a == b { a.count_ones() as f64 } else { 0.0 });
        let par = Array2::from_shape_fn((d, d), |(a, b)| match (a == b, a.count_ones() % 2) {
            (false, _) => 0.0,
            (true, 0) => 1.0,
            (true, _) => -1.0,
        });
        assert!((h.dot(&num) - num.dot(&h)).iter().all(|x| x.abs() < 1e-12));
        assert!((h.dot(&par) - par.dot(&h)).iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn particle_hole_symmetric_levels() {
        let w = eig(&single_particle_matrix(9, 1.0));
        for k in 0..9 {
            assert!((w[k] + w[8 - k]).abs() < 1e-12);
        }
    }

    #[test]
    fn size_limits() {
        assert!(matches!(dense_hamiltonian(&ModelSpec::tv(13, 1.0, 2.0)), Err(Error::SizeLimit(_))));
        assert!(ground_energy(&ModelSpec::tv(13, 1.0, 2.0)).is_err());
        assert!(DenseFermionOps::new(9).is_err());
    }
}
