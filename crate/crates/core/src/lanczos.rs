//! Lowest eigenpair of a Hermitian operator on Grassmann tensors.

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannTensor, C64};

const KRYLOV_DIM: usize = 40;

#[derive(Clone, Debug)]
pub struct EigenResult {
    pub energy: f64,
    pub vector: GrassmannTensor,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Solve densely when the live subspace is at most this large.
    pub dense_limit: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-10, max_iter: 200, dense_limit: 256 }
    }
}

fn project(t: &mut GrassmannTensor, mask: &[bool]) {
    for (c, &m) in t.data_mut().iter_mut().zip(mask) {
        if !m {
            *c = C64::new(0.0, 0.0);
        }
    }
}

fn combine(basis: &[GrassmannTensor], y: &[f64]) -> GrassmannTensor {
    let mut x = basis[0].scale(C64::new(y[0], 0.0));
    for (v, &c) in basis.iter().zip(y).skip(1) {
        x.add_scaled(C64::new(c, 0.0), v).expect("same signature");
    }
    x
}

fn lowest_of_tridiagonal(alpha: &[f64], beta: &[f64]) -> Result<(f64, Vec<f64>)> {
    let k = alpha.len();
    let t = Array2::from_shape_fn((k, k), |(i, j)| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let (w, v) = t.eigh(UPLO::Lower)?;
    Ok((w[0], v.column(0).to_vec()))
}

/// Lowest eigenpair of `apply` restricted to the entries where `mask` is set
/// (even parity, live bond slots). Lanczos with full reorthogonalization and
/// restarts from the current Ritz vector; small problems are diagonalized
/// densely.
pub fn local_ground_state(
    apply: impl Fn(&GrassmannTensor) -> Result<GrassmannTensor>,
    guess: &GrassmannTensor,
    mask: &[bool],
    opts: EigenOptions,
) -> Result<EigenResult> {
    let live = mask.iter().filter(|&&m| m).count();
    if live == 0 {
        return Err(Error::InvalidArgument("no live entries in the two-site block".into()));
    }
    if live <= opts.dense_limit {
        return dense_ground_state(&apply, guess, mask);
    }
    let mut x = guess.clone();
    project(&mut x, mask);
    let mut nrm = x.norm();
    if !(nrm > 1e-300) {
        for (c, &m) in x.data_mut().iter_mut().zip(mask) {
            if m {
                *c = C64::new(1.0, 0.0);
            }
        }
        nrm = x.norm();
    }
    x.scale_in_place(C64::new(1.0 / nrm, 0.0));

    let mut iterations = 0;
    let mut energy = f64::NAN;
    let mut residual = f64::INFINITY;
    loop {
        let mut basis = vec![x.clone()];
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        let mut ritz = vec![1.0];
        let mut stop = false;
        for k in 0..KRYLOV_DIM {
            let mut w = apply(&basis[k])?;
            project(&mut w, mask);
            iterations += 1;
            let a = basis[k].dot(&w).re;
            alpha.push(a);
            for _ in 0..2 {
                for v in &basis {
                    let c = v.dot(&w);
                    w.add_scaled(-c, v)?;
                }
            }
            let b = w.norm();
            let (e, y) = lowest_of_tridiagonal(&alpha, &beta)?;
            energy = e;
            residual = b * y[k].abs();
            ritz = y;
            let scale = energy.abs().max(1.0);
            if residual <= opts.tol * scale || b <= 1e-14 * scale {
                stop = true;
                break;
            }
            if iterations >= opts.max_iter {
                break;
            }
            if k + 1 < KRYLOV_DIM {
                beta.push(b);
                w.scale_in_place(C64::new(1.0 / b, 0.0));
                basis.push(w);
            }
        }
        x = combine(&basis[..ritz.len()], &ritz);
        let n = x.norm();
        x.scale_in_place(C64::new(1.0 / n, 0.0));
        if stop || iterations >= opts.max_iter {
            let converged = stop;
            return Ok(EigenResult { energy, vector: x.with_even_declared(true)?, residual, iterations, converged });
        }
    }
}

fn dense_ground_state(
    apply: &impl Fn(&GrassmannTensor) -> Result<GrassmannTensor>,
    guess: &GrassmannTensor,
    mask: &[bool],
) -> Result<EigenResult> {
    let idx: Vec<usize> = mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect();
    let d = idx.len();
    let mut h = Array2::<C64>::zeros((d, d));
    let mut e = GrassmannTensor::zeros(guess.legs().to_vec(), true);
    for (col, &i) in idx.iter().enumerate() {
        e.data_mut()[i] = C64::new(1.0, 0.0);
        let w = apply(&e)?;
        e.data_mut()[i] = C64::new(0.0, 0.0);
        for (row, &r) in idx.iter().enumerate() {
            h[[row, col]] = w.data()[r];
        }
    }
    let h = (&h + &h.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
    // eigh reads its input column-major, so hand it H in Fortran order or the
    // eigenvectors come back conjugated
    let h = h.reversed_axes().as_standard_layout().reversed_axes().to_owned();
    let (w, v) = h.eigh(UPLO::Lower)?;
    let mut x = GrassmannTensor::zeros(guess.legs().to_vec(), true);
    for (row, &r) in idx.iter().enumerate() {
        x.data_mut()[r] = v[[row, 0]];
    }
    let mut hx = apply(&x)?;
    hx.add_scaled(C64::new(-w[0], 0.0), &x)?;
    Ok(EigenResult { energy: w[0], vector: x, residual: hx.norm(), iterations: d, converged: true })
}
