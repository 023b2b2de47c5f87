//! GMPS reconstruction, expectation values, entropies and the two-site
//! effective Hamiltonian checked against dense state vectors.

use cagmps::env::Environments;
use cagmps::gmps::{entropy, Gmps};
use cagmps::{dense_operator, GrassmannTensor, ModelSpec, Parity, C64};
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use proptest::prelude::*;

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Chain with site-dependent couplings, so mirror-image mistakes show up.
fn uneven_chain(n: usize) -> cagmps::Hamiltonian {
    use cagmps::{PauliLabel::*, PauliString};
    let mut terms = Vec::new();
    for i in 0..n - 1 {
        let t = 1.0 + 0.3 * i as f64;
        let v = 0.5 + 0.7 * (i * i) as f64 / n as f64;
        terms.push(PauliString::local(n, i, C64::new(0.0, -t / 2.0), &[X, Y]));
        terms.push(PauliString::local(n, i, C64::new(0.0, t / 2.0), &[Y, X]));
        terms.push(PauliString::local(n, i, C64::new(v / 4.0, 0.0), &[Z, Z]));
        terms.push(PauliString::local(n, i, C64::new(0.1 * i as f64, 0.0), &[Z]));
    }
    cagmps::Hamiltonian::new(n, terms).unwrap()
}

fn dense_expectation(v: &[C64], m: &Array2<C64>) -> C64 {
    let d = v.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += v[i].conj() * m[[i, j]] * v[j];
        }
    }
    acc
}

fn parity_of_state(v: &[C64]) -> (f64, f64) {
    let mut w = (0.0, 0.0);
    for (i, z) in v.iter().enumerate() {
        if i.count_ones() % 2 == 0 {
            w.0 += z.norm_sqr();
        } else {
            w.1 += z.norm_sqr();
        }
    }
    w
}

/// Entropy of the reduced density matrix of the first `l` sites.
fn dense_entropy(v: &[C64], n: usize, l: usize) -> f64 {
    let (da, db) = (1usize << l, 1usize << (n - l));
    let psi = Array2::from_shape_fn((da, db), |(a, b)| v[a * db + b]);
    let rho = psi.dot(&psi.t().mapv(|z| z.conj()));
    let (w, _) = rho.eigh(UPLO::Lower).unwrap();
    w.iter().filter(|&&p| p > 1e-15).map(|&p| -p * p.ln()).sum()
}

#[test]
fn product_states() {
    let s = Gmps::product_init(&[0, 0]).unwrap();
    let a = s.dense_state().unwrap();
    assert_eq!(a.coeffs()[[0, 0]], C64::new(1.0, 0.0));
    assert_eq!(a.norm(), 1.0);
    let s = Gmps::product_init(&[1, 1]).unwrap();
    let a = s.dense_state().unwrap();
    assert_eq!(a.coeffs()[[1, 1]], C64::new(1.0, 0.0));
    assert_eq!(a.norm(), 1.0);
    let s = Gmps::product_init(&[1, 0, 1, 0]).unwrap();
    assert!((s.norm_squared_by_contraction().unwrap() - 1.0).abs() < 1e-15);
    assert!(s.entropies().unwrap().iter().all(|&e| e.abs() < 1e-14));
    assert!(Gmps::product_init(&[1, 0, 0]).is_err());
}

#[test]
fn single_interaction_term_on_product_state() {
    // (n₁−½)(n₂−½) with V = 1 on |10⟩
    let s = Gmps::occupation_state(&[1, 0]).unwrap();
    let h = ModelSpec::tv(2, 0.0, 1.0).hamiltonian().unwrap();
    let e = s.expectation(&h).unwrap();
    assert!((e + 0.25).abs() < 1e-15, "{e}");
    let s = Gmps::product_init(&[1, 0, 0, 1]).unwrap();
    let h = ModelSpec::tv(4, 0.0, 1.0).hamiltonian().unwrap();
    assert!((s.expectation(&h).unwrap() + 0.25).abs() < 1e-15);
    let h = cagmps::Hamiltonian::new(4, vec![]).unwrap();
    assert_eq!(s.expectation(&h).unwrap(), 0.0);
}

#[test]
fn random_states_are_deterministic_and_normalized() {
    let a = Gmps::random_even_init(7, 8, 3).unwrap();
    let b = Gmps::random_even_init(7, 8, 3).unwrap();
    assert_eq!(a, b);
    assert!((a.center_norm() - 1.0).abs() < 1e-12);
    assert!((norm2(&a.dense_vector().unwrap()) - 1.0).abs() < 1e-12);
}

#[test]
fn dense_reconstruction_stays_in_its_parity_sector() {
    for (n, p) in [(6, Parity::Even), (6, Parity::Odd), (8, Parity::Even), (5, Parity::Odd)] {
        let s = Gmps::random_init(n, 16, p, 11).unwrap();
        let (even, odd) = parity_of_state(&s.dense_vector().unwrap());
        match p {
            Parity::Even => assert!(odd == 0.0 && (even - 1.0).abs() < 1e-12),
            Parity::Odd => assert!(even == 0.0 && (odd - 1.0).abs() < 1e-12),
        }
    }
}

#[test]
fn two_site_split_reassembles() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
    use cagmps::Leg;
    let theta = GrassmannTensor::random(vec![Leg::dagger(1), Leg::plain(1), Leg::plain(1), Leg::plain(1)], true, &mut rng);
    let mut theta = theta;
    for (ix, c) in theta.coeffs_mut().indexed_iter_mut() {
        if ix[0] != 0 || ix[3] != 0 {
            *c = C64::new(0.0, 0.0);
        }
    }
    let svd = theta.svd(&[0, 1], 64, 0.0).unwrap();
    let s = Gmps::from_sites(vec![svd.u.clone(), svd.sv()], 1, Parity::Even).unwrap();
    let a = s.dense_state().unwrap();
    let want = theta.project_end_leg(0, 0).unwrap().project_end_leg(2, 0).unwrap();
    assert!(a.max_abs_diff(&want) <= 1e-12);
}

#[test]
fn norms_by_independent_orders() {
    for p in [Parity::Even, Parity::Odd] {
        let mut s = Gmps::random_init(6, 8, p, 2).unwrap();
        s.move_center(3).unwrap();
        s.normalize().unwrap();
        let d = s.dense_state().unwrap().norm();
        let c = s.norm_squared_by_contraction().unwrap();
        assert!((d * d - c).abs() < 1e-12, "{p:?}: {d} vs {c}");
    }
}

#[test]
fn expectation_matches_dense_oracle() {
    for (seed, p) in [(1, Parity::Even), (2, Parity::Odd), (3, Parity::Even)] {
        let s = Gmps::random_init(6, 8, p, seed).unwrap();
        let h = uneven_chain(6);
        let v = s.dense_vector().unwrap();
        let want = dense_expectation(&v, &dense_operator(&h).unwrap());
        let got = s.expectation(&h).unwrap();
        assert!(want.im.abs() < 1e-12);
        assert!((got - want.re).abs() < 1e-10, "{p:?}: {got} vs {want}");
    }
}

#[test]
fn gauge_invariance_and_round_trip() {
    let s = Gmps::random_init(7, 8, Parity::Odd, 9).unwrap();
    let h = ModelSpec::tv(7, 1.0, 2.0).hamiltonian().unwrap();
    let e0 = s.expectation(&h).unwrap();
    let v0 = s.dense_vector().unwrap();
    let dims0 = s.bond_dims();
    let mut t = s.clone();
    t.move_center(0).unwrap();
    assert_eq!(t, s);
    for c in (0..7).chain((0..7).rev()) {
        t.move_center(c).unwrap();
        assert!((t.expectation(&h).unwrap() - e0).abs() < 1e-10);
        assert!(t.bond_dims().iter().zip(&dims0).all(|(a, b)| a <= b));
    }
    let v1 = t.dense_vector().unwrap();
    let overlap: C64 = v0.iter().zip(&v1).map(|(a, b)| a.conj() * b).sum();
    assert!((overlap.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn entropies_match_reduced_density_matrix() {
    for p in [Parity::Even, Parity::Odd] {
        let s = Gmps::random_init(6, 8, p, 4).unwrap();
        let v = s.dense_vector().unwrap();
        let ent = s.entropies().unwrap();
        for (b, e) in ent.iter().enumerate() {
            let want = dense_entropy(&v, 6, b + 1);
            assert!((e - want).abs() < 1e-10, "bond {b}: {e} vs {want}");
            let bound = ((b + 1).min(5 - b) as f64 * 2f64.ln()).min(8f64.ln());
            assert!(*e >= 0.0 && *e <= bound + 1e-12);
        }
    }
}

#[test]
fn bell_pair_entropy() {
    assert!((entropy(&[0.5f64.sqrt(), 0.5f64.sqrt()]).unwrap() - 2f64.ln()).abs() < 1e-15);
    assert!(entropy(&[1.0, 0.1]).is_err());
}

#[test]
fn isometries_about_the_center() {
    let mut s = Gmps::random_init(6, 8, Parity::Odd, 6).unwrap();
    s.move_center(3).unwrap();
    let id = cagmps::Hamiltonian::new(6, vec![]).unwrap();
    // left environments of an identity string are identities on live slots
    let mut env = cagmps::env::left_boundary();
    for c in 0..3 {
        env = cagmps::env::extend_left(&env, s.site(c), c, &id, &cagmps::env::PauliTensors::new()).unwrap();
        let e = &env.identity;
        let d = e.shape()[0];
        for a in 0..d {
            for b in 0..d {
                let z = e.coeffs()[[a, b]];
                let want = if a == b && z.norm() > 1e-8 { 1.0 } else { 0.0 };
                assert!((z.norm() - want).abs() < 1e-10, "left {c} ({a},{b}) = {z}");
            }
        }
    }
    let mut env = cagmps::env::right_boundary(Parity::Odd);
    for c in (4..6).rev() {
        env = cagmps::env::extend_right(&env, s.site(c), c, &id, &cagmps::env::PauliTensors::new()).unwrap();
        let e = &env.identity;
        let d = e.shape()[0];
        for a in 0..d {
            for b in 0..d {
                let z = e.coeffs()[[a, b]];
                let want = if a == b && z.norm() > 1e-8 { 1.0 } else { 0.0 };
                assert!((z.norm() - want).abs() < 1e-10, "right {c} ({a},{b}) = {z}");
            }
        }
    }
}

fn two_site(s: &Gmps, j: usize) -> GrassmannTensor {
    GrassmannTensor::contract(s.site(j), 2, s.site(j + 1), 0).unwrap()
}

#[test]
fn effective_hamiltonian_reproduces_energy_at_every_bond() {
    for p in [Parity::Even, Parity::Odd] {
        let mut s = Gmps::random_init(5, 8, p, 8).unwrap();
        let h = uneven_chain(5);
        let e0 = s.expectation(&h).unwrap();
        let mut envs = Environments::new(&s, &h).unwrap();
        for j in 0..4 {
            let theta = two_site(&s, j);
            let op = envs.bond_operator(&h, j).unwrap();
            let e = op.energy(&theta).unwrap();
            assert!((e - e0).abs() < 1e-10, "{p:?} bond {j}: {e} vs {e0}");
            s.move_center(j + 1).unwrap();
            envs.update_left(&s, &h, j).unwrap();
        }
    }
}

#[test]
fn two_site_chain_effective_hamiltonian_is_the_dense_operator() {
    let s = Gmps::random_init(2, 2, Parity::Even, 1).unwrap();
    let h = uneven_chain(2);
    let envs = Environments::new(&s, &h).unwrap();
    let theta = two_site(&s, 0);
    let out = envs.bond_operator(&h, 0).unwrap().apply(&theta).unwrap();
    let pack = |t: &GrassmannTensor| -> Vec<C64> {
        let st = Gmps::from_sites(
            {
                let svd = t.svd(&[0, 1], 8, 0.0).unwrap();
                vec![svd.u.clone(), svd.sv()]
            },
            1,
            Parity::Even,
        )
        .unwrap();
        st.dense_vector().unwrap()
    };
    let v = pack(&theta);
    let w = pack(&out);
    let m = dense_operator(&h).unwrap();
    for i in 0..4 {
        let want: C64 = (0..4).map(|k| m[[i, k]] * v[k]).sum();
        assert!((w[i] - want).norm() < 1e-12, "{i}: {} vs {want}", w[i]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn effective_hamiltonian_is_hermitian(seed in 0u64..1000, j in 0usize..5, odd in any::<bool>()) {
        let p = if odd { Parity::Odd } else { Parity::Even };
        let mut s = Gmps::random_init(6, 8, p, seed).unwrap();
        let h = uneven_chain(6);
        let mut envs = Environments::new(&s, &h).unwrap();
        for c in 0..j {
            s.move_center(c + 1).unwrap();
            envs.update_left(&s, &h, c).unwrap();
        }
        let op = envs.bond_operator(&h, j).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed + 7);
        let theta = two_site(&s, j);
        let mask = |t: GrassmannTensor| {
            let mut t = t;
            for (c, &l) in t.data_mut().iter_mut().zip(op.live_mask()) {
                if !l { *c = C64::new(0.0, 0.0); }
            }
            t
        };
        let a = mask(GrassmannTensor::random(theta.legs().to_vec(), true, &mut rng));
        let b = mask(GrassmannTensor::random(theta.legs().to_vec(), true, &mut rng));
        let lhs = a.dot(&op.apply(&b).unwrap());
        let rhs = b.dot(&op.apply(&a).unwrap()).conj();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
    }
}
