//! Per-string environments and the matrix-free two-site effective Hamiltonian.
//!
//! The left environment at cut `c` covers sites `< c` and has legs (φ, φ̄†);
//! the right environment at cut `c` covers sites `≥ c` and has legs (φ†, φ̄).
//! Each holds the identity-string environment, the summed environments of
//! strings already complete on its side (coefficients included), and one
//! environment per string that crosses the cut.

use crate::error::{Error, Result};
use crate::gmps::Gmps;
use crate::grassmann::{GrassmannTensor, Leg, Parity, C64};
use crate::pauli::{make_pauli, Hamiltonian, PauliLabel};

#[derive(Clone, Debug)]
pub struct Env {
    pub identity: GrassmannTensor,
    pub block: Option<GrassmannTensor>,
    /// (string index, environment), ascending by string index.
    pub partial: Vec<(usize, GrassmannTensor)>,
}

impl Env {
    fn partial_of(&self, s: usize) -> Option<&GrassmannTensor> {
        self.partial
            .binary_search_by_key(&s, |e| e.0)
            .ok()
            .map(|k| &self.partial[k].1)
    }
}

#[derive(Clone, Debug)]
pub struct PauliTensors([GrassmannTensor; 4]);

impl PauliTensors {
    pub fn new() -> PauliTensors {
        PauliTensors(PauliLabel::ALL.map(make_pauli))
    }

    pub fn get(&self, l: PauliLabel) -> Option<&GrassmannTensor> {
        (l != PauliLabel::Id).then(|| &self.0[l.index()])
    }
}

impl Default for PauliTensors {
    fn default() -> Self {
        PauliTensors::new()
    }
}

fn one_entry(legs: Vec<Leg>, at: usize) -> GrassmannTensor {
    GrassmannTensor::from_fn(legs, true, |ix| {
        if ix[0] == at && ix[1] == at {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
    .expect("diagonal entry is even")
}

pub fn left_boundary() -> Env {
    Env { identity: one_entry(vec![Leg::plain(1), Leg::dagger(1)], 0), block: None, partial: vec![] }
}

pub fn right_boundary(parity: Parity) -> Env {
    Env { identity: one_entry(vec![Leg::dagger(1), Leg::plain(1)], parity.bit()), block: None, partial: vec![] }
}

/// Absorb site tensor `m` (with operator `p` on its physical leg) into a left
/// environment.
pub fn transfer_left(
    e: &GrassmannTensor,
    m: &GrassmannTensor,
    m_bar: &GrassmannTensor,
    p: Option<&GrassmannTensor>,
) -> Result<GrassmannTensor> {
    let x = GrassmannTensor::contract(e, 0, m, 0)?;
    match p {
        Some(p) => {
            let y = GrassmannTensor::contract(&x, 1, p, 0)?;
            GrassmannTensor::contract_pairs(&y, m_bar, &[(2, 1), (0, 2)])
        }
        None => GrassmannTensor::contract_pairs(&x, m_bar, &[(1, 1), (0, 2)]),
    }
}

/// Absorb site tensor `m` into a right environment.
pub fn transfer_right(
    e: &GrassmannTensor,
    m: &GrassmannTensor,
    m_bar: &GrassmannTensor,
    p: Option<&GrassmannTensor>,
) -> Result<GrassmannTensor> {
    // (m · m̄) · e, evaluated as m · (m̄ · e) to keep intermediates at rank 3
    let z = GrassmannTensor::contract(m_bar, 0, e, 1)?;
    match p {
        Some(p) => {
            let x = GrassmannTensor::contract(m, 1, p, 0)?;
            GrassmannTensor::contract_pairs(&x, &z, &[(2, 0), (1, 2)])
        }
        None => GrassmannTensor::contract_pairs(m, &z, &[(1, 0), (2, 2)]),
    }
}

fn accumulate(acc: &mut Option<GrassmannTensor>, coeff: C64, t: &GrassmannTensor) -> Result<()> {
    match acc {
        Some(a) => a.add_scaled(coeff, t),
        None => {
            *acc = Some(t.scale(coeff));
            Ok(())
        }
    }
}

/// Left environment at cut `c + 1` from the one at cut `c` and site `c`.
pub fn extend_left(env: &Env, m: &GrassmannTensor, c: usize, h: &Hamiltonian, paulis: &PauliTensors) -> Result<Env> {
    let m_bar = m.bar();
    let mut block = None;
    if let Some(b) = &env.block {
        block = Some(transfer_left(b, m, &m_bar, None)?);
    }
    let mut partial = Vec::new();
    let mut prev = env.partial.iter().peekable();
    for (s, term) in h.terms().iter().enumerate() {
        let (lo, hi) = term.support();
        let source = if lo < c && c <= hi {
            match prev.next_if(|e| e.0 == s) {
                Some((_, e)) => e,
                None => return Err(Error::StaleEnvironment(c)),
            }
        } else if lo == c {
            &env.identity
        } else {
            continue;
        };
        let t = transfer_left(source, m, &m_bar, paulis.get(term.labels[c]))?;
        if hi == c {
            accumulate(&mut block, term.coeff, &t)?;
        } else {
            partial.push((s, t));
        }
    }
    let identity = transfer_left(&env.identity, m, &m_bar, None)?;
    Ok(Env { identity, block, partial })
}

/// Right environment at cut `c` from the one at cut `c + 1` and site `c`.
pub fn extend_right(env: &Env, m: &GrassmannTensor, c: usize, h: &Hamiltonian, paulis: &PauliTensors) -> Result<Env> {
    let m_bar = m.bar();
    let mut block = None;
    if let Some(b) = &env.block {
        block = Some(transfer_right(b, m, &m_bar, None)?);
    }
    let mut partial = Vec::new();
    let mut prev = env.partial.iter().peekable();
    for (s, term) in h.terms().iter().enumerate() {
        let (lo, hi) = term.support();
        let source = if lo <= c && c < hi {
            match prev.next_if(|e| e.0 == s) {
                Some((_, e)) => e,
                None => return Err(Error::StaleEnvironment(c + 1)),
            }
        } else if hi == c {
            &env.identity
        } else {
            continue;
        };
        let t = transfer_right(source, m, &m_bar, paulis.get(term.labels[c]))?;
        if lo == c {
            accumulate(&mut block, term.coeff, &t)?;
        } else {
            partial.push((s, t));
        }
    }
    let identity = transfer_right(&env.identity, m, &m_bar, None)?;
    Ok(Env { identity, block, partial })
}

fn close_with_boundary(e: &GrassmannTensor, parity: Parity) -> Result<C64> {
    let r = right_boundary(parity).identity;
    let v = GrassmannTensor::contract_pairs(e, &r, &[(0, 0), (1, 1)])?;
    Ok(v.scalar_value().expect("all legs contracted"))
}

/// Environments of a state under a Hamiltonian, built lazily as the center moves.
#[derive(Clone, Debug)]
pub struct Environments {
    left: Vec<Option<Env>>,
    right: Vec<Option<Env>>,
    paulis: PauliTensors,
}

impl Environments {
    /// Build the left boundary and every right environment; the state's
    /// center must be at site 0.
    pub fn new(state: &Gmps, h: &Hamiltonian) -> Result<Environments> {
        let n = state.len();
        if state.center() != 0 {
            return Err(Error::InvalidArgument("environments need the center at site 0".into()));
        }
        let mut envs = Environments { left: vec![None; n + 1], right: vec![None; n + 1], paulis: PauliTensors::new() };
        envs.left[0] = Some(left_boundary());
        envs.right[n] = Some(right_boundary(state.parity()));
        for c in (2..n).rev() {
            envs.update_right(state, h, c)?;
        }
        Ok(envs)
    }

    pub fn paulis(&self) -> &PauliTensors {
        &self.paulis
    }

    pub fn left(&self, c: usize) -> Result<&Env> {
        self.left.get(c).and_then(Option::as_ref).ok_or(Error::StaleEnvironment(c))
    }

    pub fn right(&self, c: usize) -> Result<&Env> {
        self.right.get(c).and_then(Option::as_ref).ok_or(Error::StaleEnvironment(c))
    }

    /// Rebuild the left environment at cut `c + 1` from cut `c` and site `c`.
    pub fn update_left(&mut self, state: &Gmps, h: &Hamiltonian, c: usize) -> Result<()> {
        let e = extend_left(self.left(c)?, state.site(c), c, h, &self.paulis)?;
        self.left[c + 1] = Some(e);
        Ok(())
    }

    /// Rebuild the right environment at cut `c` from cut `c + 1` and site `c`.
    pub fn update_right(&mut self, state: &Gmps, h: &Hamiltonian, c: usize) -> Result<()> {
        let e = extend_right(self.right(c + 1)?, state.site(c), c, h, &self.paulis)?;
        self.right[c] = Some(e);
        Ok(())
    }

    /// `Σ_i a_i ⟨ψ|P^{(i)}|ψ⟩` by a single left-to-right pass (any gauge).
    pub fn full_left(state: &Gmps, h: &Hamiltonian) -> Result<C64> {
        let paulis = PauliTensors::new();
        let mut env = left_boundary();
        for c in 0..state.len() {
            env = extend_left(&env, state.site(c), c, h, &paulis)?;
        }
        match &env.block {
            Some(b) => close_with_boundary(b, state.parity()),
            None => Ok(C64::new(0.0, 0.0)),
        }
    }

    /// Two-site effective Hamiltonian at bond (j, j+1).
    pub fn bond_operator<'a>(&'a self, h: &'a Hamiltonian, j: usize) -> Result<BondOperator<'a>> {
        BondOperator::new(self.left(j)?, self.right(j + 2)?, h, j, &self.paulis)
    }
}

/// Action of a pair of physical operators on a two-site tensor: maps
/// `x(l, ψ_j, ψ_{j+1}, φ)` to `y(l, φ, ψ'_j, ψ'_{j+1})`. Grassmann signs only
/// see the parities of the outer indices, so the map is a 4×4 matrix per
/// parity pair `(p(l), p(φ))`.
#[derive(Clone, Copy, Debug)]
struct PhysicalMap([[[[C64; 4]; 4]; 2]; 2]);

impl PhysicalMap {
    fn zero() -> PhysicalMap {
        PhysicalMap([[[[C64::new(0.0, 0.0); 4]; 4]; 2]; 2])
    }

    /// Probe `apply_physical ∘ apply_physical` on single-generator outer legs.
    fn probe(p1: Option<&GrassmannTensor>, p2: Option<&GrassmannTensor>, outer: (Leg, Leg)) -> Result<PhysicalMap> {
        let legs = vec![Leg::new(1, outer.0.conjugated), Leg::plain(1), Leg::plain(1), Leg::new(1, outer.1.conjugated)];
        let mut map = PhysicalMap::zero();
        let mut x = GrassmannTensor::zeros(legs, false);
        for a in 0..2 {
            for b in 0..2 {
                for st in 0..4 {
                    let at = ((a * 4) + st) * 2 + b;
                    x.data_mut()[at] = C64::new(1.0, 0.0);
                    let y = apply_physical(&apply_physical(&x, p1)?, p2)?;
                    x.data_mut()[at] = C64::new(0.0, 0.0);
                    for out in 0..4 {
                        map.0[a][b][out][st] = y.coeffs()[[a, b, out >> 1, out & 1]];
                    }
                }
            }
        }
        Ok(map)
    }

    fn add_scaled(&mut self, c: C64, other: &PhysicalMap) {
        for (x, y) in self.0.iter_mut().flatten().flatten().flatten().zip(other.0.iter().flatten().flatten().flatten()) {
            *x += c * y;
        }
    }

    /// `acc += map(x)`, creating `acc` with the output signature if empty.
    fn apply_into(&self, x: &GrassmannTensor, acc: &mut Option<GrassmannTensor>) {
        let (dl, dr) = (x.shape()[0], x.shape()[3]);
        let out = acc.get_or_insert_with(|| {
            GrassmannTensor::zeros(vec![x.leg(0), x.leg(3), Leg::plain(1), Leg::plain(1)], false)
        });
        let src = x.data();
        let dst = out.data_mut();
        for a in 0..dl {
            let pa = (a.count_ones() & 1) as usize;
            for b in 0..dr {
                let m = &self.0[pa][(b.count_ones() & 1) as usize];
                let v = [src[(a * 4) * dr + b], src[(a * 4 + 1) * dr + b], src[(a * 4 + 2) * dr + b], src[(a * 4 + 3) * dr + b]];
                if v.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                    continue;
                }
                let o = &mut dst[(a * dr + b) * 4..(a * dr + b) * 4 + 4];
                for (row, slot) in m.iter().zip(o.iter_mut()) {
                    *slot += row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
                }
            }
        }
    }
}

/// Terms sharing a left and a right environment, with their physical maps
/// summed.
struct Group<'a> {
    left: Option<&'a GrassmannTensor>,
    right: Option<&'a GrassmannTensor>,
    map: PhysicalMap,
}

/// `H_eff` on two-site tensors with legs (φ†_{j−1}, ψ_j, ψ_{j+1}, φ_{j+1}).
pub struct BondOperator<'a> {
    left: &'a Env,
    right: &'a Env,
    groups: Vec<Group<'a>>,
    live: Vec<bool>,
    shape: Vec<usize>,
}

fn apply_physical(x: &GrassmannTensor, p: Option<&GrassmannTensor>) -> Result<GrassmannTensor> {
    match p {
        Some(p) => GrassmannTensor::contract(x, 1, p, 0),
        None => x.sign_permute(&[0, 2, 3, 1]),
    }
}

fn same(a: Option<&GrassmannTensor>, b: Option<&GrassmannTensor>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => std::ptr::eq(x, y),
        _ => false,
    }
}

impl<'a> BondOperator<'a> {
    fn new(left: &'a Env, right: &'a Env, h: &'a Hamiltonian, j: usize, paulis: &'a PauliTensors) -> Result<Self> {
        // outer legs seen by the physical maps: L's open leg and θ's right bond
        let outer = (left.identity.leg(1), right.identity.leg(0).dual());
        let mut maps: Vec<((PauliLabel, PauliLabel), PhysicalMap)> = Vec::new();
        let mut map_of = |l1: PauliLabel, l2: PauliLabel| -> Result<PhysicalMap> {
            if let Some((_, m)) = maps.iter().find(|(k, _)| *k == (l1, l2)) {
                return Ok(*m);
            }
            let m = PhysicalMap::probe(paulis.get(l1), paulis.get(l2), outer)?;
            maps.push(((l1, l2), m));
            Ok(m)
        };
        let mut groups: Vec<Group<'a>> = Vec::new();
        let mut add = |l: Option<&'a GrassmannTensor>, r: Option<&'a GrassmannTensor>, c: C64, m: &PhysicalMap| {
            match groups.iter_mut().find(|g| same(g.left, l) && same(g.right, r)) {
                Some(g) => g.map.add_scaled(c, m),
                None => {
                    let mut map = PhysicalMap::zero();
                    map.add_scaled(c, m);
                    groups.push(Group { left: l, right: r, map });
                }
            }
        };
        let one = C64::new(1.0, 0.0);
        let id = map_of(PauliLabel::Id, PauliLabel::Id)?;
        if let Some(b) = &left.block {
            add(Some(b), None, one, &id);
        }
        if let Some(b) = &right.block {
            add(None, Some(b), one, &id);
        }
        for (s, term) in h.terms().iter().enumerate() {
            let (lo, hi) = term.support();
            if hi < j || lo > j + 1 {
                continue;
            }
            let l = if lo < j {
                Some(left.partial_of(s).ok_or(Error::StaleEnvironment(j))?)
            } else {
                None
            };
            let r = if hi > j + 1 {
                Some(right.partial_of(s).ok_or(Error::StaleEnvironment(j + 2))?)
            } else {
                None
            };
            let m = map_of(term.labels[j], term.labels[j + 1])?;
            add(l, r, term.coeff, &m);
        }
        let dl = left.identity.shape()[0];
        let dr = right.identity.shape()[0];
        let live_l: Vec<bool> = (0..dl).map(|a| left.identity.coeffs()[[a, a]].norm() > 1e-8).collect();
        let live_r: Vec<bool> = (0..dr).map(|b| right.identity.coeffs()[[b, b]].norm() > 1e-8).collect();
        let mut live = Vec::with_capacity(dl * 4 * dr);
        for a in 0..dl {
            for s in 0..4usize {
                for b in 0..dr {
                    let odd = (a.count_ones() + s.count_ones() + b.count_ones()) % 2 == 1;
                    live.push(live_l[a] && live_r[b] && !odd);
                }
            }
        }
        Ok(BondOperator { left, right, groups, live, shape: vec![dl, 2, 2, dr] })
    }

    /// Even-parity entries on non-padded bond slots.
    pub fn live_mask(&self) -> &[bool] {
        &self.live
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn apply(&self, theta: &GrassmannTensor) -> Result<GrassmannTensor> {
        // L · θ once per distinct left environment
        let mut lefts: Vec<(Option<&GrassmannTensor>, GrassmannTensor)> = Vec::new();
        for g in &self.groups {
            if !lefts.iter().any(|(l, _)| same(*l, g.left)) {
                let l = g.left.unwrap_or(&self.left.identity);
                lefts.push((g.left, GrassmannTensor::contract(l, 0, theta, 0)?));
            }
        }
        // physical maps, bucketed by right environment
        let mut buckets: Vec<(Option<&GrassmannTensor>, Option<GrassmannTensor>)> = Vec::new();
        for g in &self.groups {
            let x = &lefts.iter().find(|(l, _)| same(*l, g.left)).expect("left computed").1;
            let k = match buckets.iter().position(|(r, _)| same(*r, g.right)) {
                Some(k) => k,
                None => {
                    buckets.push((g.right, None));
                    buckets.len() - 1
                }
            };
            g.map.apply_into(x, &mut buckets[k].1);
        }
        let mut out: Option<GrassmannTensor> = None;
        for (r, y) in &buckets {
            let y = y.as_ref().expect("bucket filled");
            let z = GrassmannTensor::contract(y, 1, r.unwrap_or(&self.right.identity), 0)?;
            accumulate(&mut out, C64::new(1.0, 0.0), &z)?;
        }
        match out {
            Some(z) => {
                let mut z = z.twist(&[0]);
                for (c, &l) in z.data_mut().iter_mut().zip(&self.live) {
                    if !l {
                        *c = C64::new(0.0, 0.0);
                    }
                }
                Ok(z.with_even_declared(true)?)
            }
            None => Ok(GrassmannTensor::zeros(theta.legs().to_vec(), true)),
        }
    }

    /// `⟨θ|H_eff|θ⟩` (real part).
    pub fn energy(&self, theta: &GrassmannTensor) -> Result<f64> {
        Ok(theta.dot(&self.apply(theta)?).re)
    }
}
