//! Symbolic exterior-algebra evaluator that expands every monomial and performs
//! the Gaussian Berezin integrals term by term.

use std::collections::BTreeMap;

use cagmps::{GrassmannTensor, Leg, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Symbol `2q` is θ_q, `2q+1` is θ†_q.
type Monomial = Vec<u32>;

#[derive(Default, Debug, Clone)]
pub struct Poly(BTreeMap<Monomial, C64>);

fn normalize(mut m: Monomial) -> Option<(Monomial, f64)> {
    let mut sign = 1.0;
    for i in 0..m.len() {
        for j in 0..m.len() - 1 - i {
            if m[j] > m[j + 1] {
                m.swap(j, j + 1);
                sign = -sign;
            } else if m[j] == m[j + 1] {
                return None;
            }
        }
    }
    if m.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((m, sign))
}

impl Poly {
    fn add(&mut self, m: Monomial, c: C64) {
        if let Some((m, s)) = normalize(m) {
            *self.0.entry(m).or_default() += c * s;
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let mut m = ma.clone();
                m.extend(mb);
                out.add(m, ca * cb);
            }
        }
        out
    }

    /// ∫ dθ†_q dθ_q e^{-θ†_q θ_q} F
    fn integrate(&self, q: u32) -> Poly {
        let (th, thd) = (2 * q, 2 * q + 1);
        let mut with_kernel = self.clone();
        for (m, c) in &self.0 {
            let mut k = vec![thd, th];
            k.extend(m);
            with_kernel.add(k, -c);
        }
        let mut out = Poly::default();
        for (m, c) in &with_kernel.0 {
            let (Some(p), Some(_)) = (m.iter().position(|&s| s == th), m.iter().position(|&s| s == thd)) else {
                continue;
            };
            let mut rest = m.clone();
            let mut sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            rest.remove(p);
            let pd = rest.iter().position(|&s| s == thd).unwrap();
            if pd % 2 == 1 {
                sign = -sign;
            }
            rest.remove(pd);
            out.add(rest, c * sign);
        }
        out
    }
}

fn leg_monomial(leg: Leg, base: u32, index: usize) -> Monomial {
    let g = leg.generators;
    let bits: Vec<u32> = (0..g).filter(|k| index >> k & 1 == 1).collect();
    if leg.conjugated {
        bits.iter().rev().map(|k| 2 * (base + k) + 1).collect()
    } else {
        bits.iter().map(|k| 2 * (base + k)).collect()
    }
}

fn to_poly(t: &GrassmannTensor, bases: &[u32]) -> Poly {
    let mut p = Poly::default();
    for (ix, c) in t.coeffs().indexed_iter() {
        if *c == C64::new(0.0, 0.0) {
            continue;
        }
        let mut m = Vec::new();
        for (k, &leg) in t.legs().iter().enumerate() {
            m.extend(leg_monomial(leg, bases[k], ix[k]));
        }
        p.add(m, *c);
    }
    p
}

fn max_diff(a: &Poly, b: &Poly) -> f64 {
    let mut d: f64 = 0.0;
    for (m, c) in &a.0 {
        d = d.max((c - b.0.get(m).copied().unwrap_or_default()).norm());
    }
    for (m, c) in &b.0 {
        d = d.max((c - a.0.get(m).copied().unwrap_or_default()).norm());
    }
    d
}

#[derive(Debug, Clone)]
pub struct Case {
    pub a_legs: Vec<Leg>,
    pub b_legs: Vec<Leg>,
    pub pairs: Vec<(usize, usize)>,
    pub seed: u64,
}

fn leg_strategy() -> impl Strategy<Value = Leg> {
    (1u32..=2, any::<bool>()).prop_map(|(g, c)| Leg::new(g, c))
}

pub fn case_strategy() -> impl Strategy<Value = Case> {
    (
        prop::collection::vec(leg_strategy(), 1..=3),
        prop::collection::vec(leg_strategy(), 0..=2),
        any::<u64>(),
        any::<u64>(),
    )
        .prop_flat_map(|(a_legs, b_extra, shuffle, seed)| {
            let ra = a_legs.len();
            (Just(a_legs), Just(b_extra), Just(shuffle), Just(seed), 1..=ra.min(3))
        })
        .prop_map(|(a_legs, b_extra, shuffle, seed, k)| {
            // choose k distinct legs of a and place their duals at shuffled positions of b
            let ra = a_legs.len();
            let mut chosen: Vec<usize> = (0..ra).collect();
            let mut s = shuffle;
            for i in (1..ra).rev() {
                let j = (s % (i as u64 + 1)) as usize;
                s /= i as u64 + 1;
                chosen.swap(i, j);
            }
            chosen.truncate(k);
            let rb = b_extra.len() + k;
            let mut slots: Vec<usize> = (0..rb).collect();
            for i in (1..rb).rev() {
                let j = (s % (i as u64 + 1)) as usize;
                s /= i as u64 + 1;
                slots.swap(i, j);
            }
            let mut b_legs = vec![Leg::plain(1); rb];
            let mut pairs = Vec::new();
            for (r, &x) in chosen.iter().enumerate() {
                b_legs[slots[r]] = a_legs[x].dual();
                pairs.push((x, slots[r]));
            }
            for (e, leg) in b_extra.iter().enumerate() {
                b_legs[slots[k + e]] = *leg;
            }
            Case { a_legs, b_legs, pairs, seed }
        })
}

/// Largest coefficient difference between `contract_pairs` and the symbolic
/// evaluation of the same contraction.
pub fn check(case: &Case) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
    let a = GrassmannTensor::random(case.a_legs.clone(), false, &mut rng);
    let b = GrassmannTensor::random(case.b_legs.clone(), false, &mut rng);
    let mut next = 0u32;
    let a_bases: Vec<u32> = case
        .a_legs
        .iter()
        .map(|l| {
            let base = next;
            next += l.generators;
            base
        })
        .collect();
    let mut b_bases = vec![u32::MAX; case.b_legs.len()];
    for &(x, y) in &case.pairs {
        b_bases[y] = a_bases[x];
    }
    for (y, l) in case.b_legs.iter().enumerate() {
        if b_bases[y] == u32::MAX {
            b_bases[y] = next;
            next += l.generators;
        }
    }
    let mut product = to_poly(&a, &a_bases).mul(&to_poly(&b, &b_bases));
    for &(x, _) in &case.pairs {
        for k in 0..case.a_legs[x].generators {
            product = product.integrate(a_bases[x] + k);
        }
    }

    let c = GrassmannTensor::contract_pairs(&a, &b, &case.pairs).unwrap();
    let mut c_bases = Vec::new();
    for x in 0..case.a_legs.len() {
        if !case.pairs.iter().any(|p| p.0 == x) {
            c_bases.push(a_bases[x]);
        }
    }
    for y in 0..case.b_legs.len() {
        if !case.pairs.iter().any(|p| p.1 == y) {
            c_bases.push(b_bases[y]);
        }
    }
    max_diff(&to_poly(&c, &c_bases), &product)
}
