//! Two-site Grassmann Clifford gates: generators, group enumeration and the
//! reduction to the canonical disentangling set.
//!
//! Gate tensors have signature (φ†₁, φ†₂, ψ₂, ψ₁). Joining (φ†₁, φ†₂) and
//! (ψ₂, ψ₁) gives a 4×4 matrix with index `2·i₁ + i₂`, and operator composition
//! is matrix multiplication in that joined frame.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use ndarray::{Array2, ArrayD, IxDyn};

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannTensor, Leg, SplitPlan, C64};
use crate::pauli::{string_tensor, PauliLabel};

const ENUMERATION_BOUND: usize = 50_000;
const KEY_SCALE: f64 = 1e9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    H0,
    S0,
    H1,
    S1,
    Cnot01,
    Cnot10,
}

impl Generator {
    pub const ALL: [Generator; 6] =
        [Generator::H0, Generator::S0, Generator::H1, Generator::S1, Generator::Cnot01, Generator::Cnot10];

    pub fn name(self) -> &'static str {
        match self {
            Generator::H0 => "H0",
            Generator::S0 => "S0",
            Generator::H1 => "H1",
            Generator::S1 => "S1",
            Generator::Cnot01 => "CNOT01",
            Generator::Cnot10 => "CNOT10",
        }
    }

    /// The 4×4 matrix in the basis `|i₁ i₂⟩`, index `2·i₁ + i₂`.
    pub fn matrix(self) -> Array2<C64> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let i = C64::new(0.0, 1.0);
        let one = C64::new(1.0, 0.0);
        let re = |rows: [[f64; 4]; 4], s: f64| Array2::from_shape_fn((4, 4), |(a, b)| C64::new(rows[a][b] * s, 0.0));
        match self {
            Generator::H0 => re([[1., 0., 1., 0.], [0., 1., 0., 1.], [1., 0., -1., 0.], [0., 1., 0., -1.]], r),
            Generator::H1 => re([[1., 1., 0., 0.], [1., -1., 0., 0.], [0., 0., 1., 1.], [0., 0., 1., -1.]], r),
            Generator::S0 => Array2::from_diag(&ndarray::arr1(&[one, one, i, i])),
            Generator::S1 => Array2::from_diag(&ndarray::arr1(&[one, i, one, i])),
            Generator::Cnot01 => re([[1., 0., 0., 0.], [0., 1., 0., 0.], [0., 0., 0., 1.], [0., 0., 1., 0.]], 1.0),
            Generator::Cnot10 => re([[1., 0., 0., 0.], [0., 0., 0., 1.], [0., 0., 1., 0.], [0., 1., 0., 0.]], 1.0),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown generator `{s}`")))
    }
}

/// Product `g₁ · g₂ · … · g_k` of generators; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateWord(pub Vec<Generator>);

impl GateWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Shorter words first, then lexicographic on generator ids.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    pub fn tensor(&self) -> GrassmannTensor {
        let mut t = gate_from_matrix(&Array2::eye(4));
        for &g in &self.0 {
            t = compose_gates(&t, &generator_tensor(g));
        }
        t
    }
}

impl fmt::Display for GateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        let names: Vec<&str> = self.0.iter().map(|g| g.name()).collect();
        f.write_str(&names.join(" "))
    }
}

impl FromStr for GateWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "I" {
            return Ok(GateWord::default());
        }
        s.split_whitespace().map(str::parse).collect::<Result<Vec<_>>>().map(GateWord)
    }
}

/// Quarter-turn phase `i^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn value(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    /// Multiplies exactly (component swap and negation only).
    pub fn apply(self, z: C64) -> C64 {
        match self.0 {
            0 => z,
            1 => C64::new(-z.im, z.re),
            2 => -z,
            _ => C64::new(z.im, -z.re),
        }
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn inverse(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn nearest(z: C64, tol: f64) -> Option<Phase> {
        (0..4).map(Phase).find(|p| (p.value() - z).norm() <= tol)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

pub type PauliPair = (PauliLabel, PauliLabel);

pub fn pair_index(p: PauliPair) -> usize {
    4 * p.0.index() + p.1.index()
}

pub fn pair_from_index(k: usize) -> PauliPair {
    (PauliLabel::from_index(k / 4), PauliLabel::from_index(k % 4))
}

/// Images `C (μ,ν) C† = phase · (μ′,ν′)` of all 16 two-site Pauli pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugationTable {
    images: [(PauliPair, Phase); 16],
}

impl ConjugationTable {
    pub fn identity() -> ConjugationTable {
        let mut images = [((PauliLabel::Id, PauliLabel::Id), Phase::ONE); 16];
        for (k, slot) in images.iter_mut().enumerate() {
            *slot = (pair_from_index(k), Phase::ONE);
        }
        ConjugationTable { images }
    }

    pub fn image(&self, p: PauliPair) -> (PauliPair, Phase) {
        self.images[pair_index(p)]
    }

    pub fn rows(&self) -> impl Iterator<Item = (PauliPair, PauliPair, Phase)> + '_ {
        self.images.iter().enumerate().map(|(k, &(q, s))| (pair_from_index(k), q, s))
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &ConjugationTable) -> ConjugationTable {
        let mut images = inner.images;
        for slot in images.iter_mut() {
            let (q, s) = self.image(slot.0);
            *slot = (q, s.mul(slot.1));
        }
        ConjugationTable { images }
    }

    pub fn inverse(&self) -> ConjugationTable {
        let mut images = self.images;
        for (k, &(q, s)) in self.images.iter().enumerate() {
            images[pair_index(q)] = (pair_from_index(k), s.inverse());
        }
        ConjugationTable { images }
    }

    /// Images of the 16 pairs are pairwise distinct.
    pub fn is_permutation(&self) -> bool {
        let mut seen = [false; 16];
        for &(q, _) in &self.images {
            let k = pair_index(q);
            if seen[k] {
                return false;
            }
            seen[k] = true;
        }
        true
    }
}

#[derive(Clone, Debug)]
pub struct CliffordGate {
    pub tensor: GrassmannTensor,
    pub word: GateWord,
    pub tableau: ConjugationTable,
}

impl CliffordGate {
    pub fn from_tensor(tensor: GrassmannTensor, word: GateWord) -> Result<CliffordGate> {
        let tableau = tableau_of(&tensor)?;
        Ok(CliffordGate { tensor, word, tableau })
    }

    pub fn matrix(&self) -> Array2<C64> {
        gate_matrix(&self.tensor)
    }

    pub fn adjoint(&self) -> GrassmannTensor {
        adjoint(&self.tensor)
    }
}

/// A group element found by enumeration.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub tensor: GrassmannTensor,
    pub word: GateWord,
}

fn gate_legs() -> Vec<Leg> {
    vec![Leg::dagger(1), Leg::dagger(1), Leg::plain(1), Leg::plain(1)]
}

fn split_plan() -> &'static SplitPlan {
    static PLAN: OnceLock<SplitPlan> = OnceLock::new();
    PLAN.get_or_init(|| {
        let template = GrassmannTensor::zeros(gate_legs(), false);
        template.join_legs(&[vec![0, 1], vec![2, 3]]).expect("valid groups").1
    })
}

/// Embed a 4×4 matrix as `Σ M_{IJ} Φ^{†I} Ψ^J` on two-generator legs and split
/// both legs into single-generator legs (φ†₁, φ†₂) and (ψ₂, ψ₁).
pub fn gate_from_matrix(m: &Array2<C64>) -> GrassmannTensor {
    assert_eq!(m.dim(), (4, 4));
    let joined = GrassmannTensor::new(
        vec![Leg::dagger(2), Leg::plain(2)],
        m.clone().into_dyn().as_standard_layout().into_owned(),
        false,
    )
    .expect("4x4");
    let t = joined.split_legs(split_plan()).expect("plan matches");
    let even = t.odd_weight() == 0.0;
    t.with_even_declared(even).expect("checked")
}

/// Joined 4×4 matrix of a two-site operator tensor.
pub fn gate_matrix(t: &GrassmannTensor) -> Array2<C64> {
    t.joined_matrix(&[0, 1], &[2, 3]).expect("two-site operator")
}

/// Operator product `a · b` of two-site operators.
pub fn compose_gates(a: &GrassmannTensor, b: &GrassmannTensor) -> GrassmannTensor {
    GrassmannTensor::contract_pairs(a, b, &[(3, 0), (2, 1)]).expect("two-site operators")
}

/// Operator adjoint (conjugate transpose in the joined frame).
pub fn adjoint(t: &GrassmannTensor) -> GrassmannTensor {
    let m = gate_matrix(t);
    let mut a = gate_from_matrix(&m.t().mapv(|z| z.conj()));
    if t.is_even_declared() {
        a = a.with_even_declared(true).expect("adjoint of an even operator is even");
    }
    a
}

/// The faithful Grassmann product ς^μ(φ†₁,ψ₁) ς^ν(φ†₂,ψ₂) in gate signature.
pub fn pauli_pair_tensor(p: PauliPair) -> GrassmannTensor {
    string_tensor(&[p.0, p.1]).sign_permute(&[0, 2, 3, 1]).expect("valid order")
}

/// Kronecker product σ^μ ⊗ σ^ν in the joined frame, embedded like a gate.
pub fn embedded_pair_matrix(p: PauliPair) -> Array2<C64> {
    let (a, b) = (p.0.matrix(), p.1.matrix());
    Array2::from_shape_fn((4, 4), |(r, c)| a[r / 2][c / 2] * b[r % 2][c % 2])
}

pub fn build_generator(g: Generator) -> Result<CliffordGate> {
    CliffordGate::from_tensor(generator_tensor(g), GateWord(vec![g]))
}

fn generator_tensor(g: Generator) -> GrassmannTensor {
    gate_from_matrix(&g.matrix())
}

fn match_phase(x: &Array2<C64>, p: &Array2<C64>, tol: f64) -> Option<(Phase, f64)> {
    let overlap: C64 = p.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum::<C64>() / 4.0;
    let phase = Phase::nearest(overlap, 1e-6)?;
    let resid = x
        .iter()
        .zip(p.iter())
        .map(|(a, b)| (a - phase.value() * b).norm())
        .fold(0.0, f64::max);
    (resid <= tol).then_some((phase, resid))
}

/// Faithful conjugation table: `C (ς^μ ς^ν) C†` matched against
/// `phase · ς^{μ′} ς^{ν′}` for every pair.
pub fn tableau_of(gate: &GrassmannTensor) -> Result<ConjugationTable> {
    let c_dag = adjoint(gate);
    let refs: Vec<Array2<C64>> = (0..16).map(|k| gate_matrix(&pauli_pair_tensor(pair_from_index(k)))).collect();
    let mut images = [((PauliLabel::Id, PauliLabel::Id), Phase::ONE); 16];
    for (k, slot) in images.iter_mut().enumerate() {
        let f = pauli_pair_tensor(pair_from_index(k));
        let x = gate_matrix(&compose_gates(&compose_gates(gate, &f), &c_dag));
        let mut best = f64::INFINITY;
        let mut found = None;
        for (q, r) in refs.iter().enumerate() {
            if let Some((phase, _)) = match_phase(&x, r, 1e-10) {
                found = Some((pair_from_index(q), phase));
                break;
            }
            let d = x.iter().zip(r.iter()).map(|(a, b)| (a.norm() - b.norm()).abs()).fold(0.0, f64::max);
            best = best.min(d);
        }
        *slot = found.ok_or(Error::NotClifford(best))?;
    }
    Ok(ConjugationTable { images })
}

/// Joined-frame signs `M (σ^μ⊗σ^ν) M† = ±(σ^{μ′}⊗σ^{ν′})`.
fn embedded_image(m: &Array2<C64>, p: PauliPair) -> Result<(PauliPair, Phase)> {
    let x = m.dot(&embedded_pair_matrix(p)).dot(&m.t().mapv(|z| z.conj()));
    for q in 0..16 {
        if let Some((phase, _)) = match_phase(&x, &embedded_pair_matrix(pair_from_index(q)), 1e-9) {
            return Ok((pair_from_index(q), phase));
        }
    }
    Err(Error::NotClifford(f64::NAN))
}

type Key = [i64; 32];

/// Rotate the first nonzero coefficient to positive real.
fn canonical_phase(t: &GrassmannTensor) -> GrassmannTensor {
    let first = t.data().iter().find(|c| c.norm() > 1e-9).copied().unwrap_or(C64::new(1.0, 0.0));
    let mut out = t.scale(first.conj() / first.norm());
    for c in out.data_mut() {
        if c.re.abs() < 1e-13 {
            c.re = 0.0;
        }
        if c.im.abs() < 1e-13 {
            c.im = 0.0;
        }
    }
    out
}

fn key_of(t: &GrassmannTensor) -> Key {
    let mut k = [0i64; 32];
    for (j, c) in t.data().iter().enumerate() {
        k[2 * j] = (c.re * KEY_SCALE).round() as i64;
        k[2 * j + 1] = (c.im * KEY_SCALE).round() as i64;
    }
    k
}

struct Lookup {
    map: HashMap<Key, usize>,
}

impl Lookup {
    fn new(elems: &[GroupElement]) -> Lookup {
        Lookup { map: elems.iter().enumerate().map(|(i, e)| (key_of(&e.tensor), i)).collect() }
    }

    /// Index of the element equal to `t` up to phase, confirmed entrywise.
    fn find(&self, elems: &[GroupElement], t: &GrassmannTensor) -> Option<usize> {
        let c = canonical_phase(t);
        let i = *self.map.get(&key_of(&c))?;
        (elems[i].tensor.max_abs_diff(&c) < 1e-8).then_some(i)
    }
}

/// Breadth-first closure of the identity under right-multiplication by the
/// six generators, deduplicated up to global phase.
pub fn enumerate_group() -> Result<Vec<GroupElement>> {
    let gens: Vec<GrassmannTensor> = Generator::ALL.iter().map(|&g| generator_tensor(g)).collect();
    let id = canonical_phase(&gate_from_matrix(&Array2::eye(4)));
    let mut elems = vec![GroupElement { tensor: id, word: GateWord::default() }];
    let mut seen: HashMap<Key, usize> = HashMap::new();
    seen.insert(key_of(&elems[0].tensor), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (gi, g) in gens.iter().enumerate() {
            let t = canonical_phase(&compose_gates(&elems[i].tensor, g));
            let key = key_of(&t);
            if let Some(&j) = seen.get(&key) {
                if elems[j].tensor.max_abs_diff(&t) > 1e-8 {
                    return Err(Error::Enumeration("hash collision between distinct gates".into()));
                }
                continue;
            }
            let mut word = elems[i].word.clone();
            word.0.push(Generator::ALL[gi]);
            seen.insert(key, elems.len());
            queue.push_back(elems.len());
            elems.push(GroupElement { tensor: t, word });
            if elems.len() > ENUMERATION_BOUND {
                return Err(Error::Enumeration(format!("closure exceeded {ENUMERATION_BOUND} elements")));
            }
        }
    }
    Ok(elems)
}

/// Closure re-check: every product with a generator is already in the set.
pub fn is_closed(elems: &[GroupElement]) -> bool {
    let lookup = Lookup::new(elems);
    let gens: Vec<GrassmannTensor> = Generator::ALL.iter().map(|&g| generator_tensor(g)).collect();
    elems
        .iter()
        .all(|e| gens.iter().all(|g| lookup.find(elems, &compose_gates(&e.tensor, g)).is_some()))
}

const STABILIZER_GENERATORS: [PauliPair; 4] = [
    (PauliLabel::X, PauliLabel::Id),
    (PauliLabel::Z, PauliLabel::Id),
    (PauliLabel::Id, PauliLabel::X),
    (PauliLabel::Id, PauliLabel::Z),
];

fn generator_signs(m: &Array2<C64>) -> Result<[(PauliPair, Phase); 4]> {
    let mut out = [((PauliLabel::Id, PauliLabel::Id), Phase::ONE); 4];
    for (slot, &g) in out.iter_mut().zip(&STABILIZER_GENERATORS) {
        *slot = embedded_image(m, g)?;
    }
    Ok(out)
}

/// Whether two Pauli pairs commute (as Kronecker products).
fn pairs_commute(a: PauliPair, b: PauliPair) -> bool {
    let anti = |x: PauliLabel, y: PauliLabel| x != PauliLabel::Id && y != PauliLabel::Id && x != y;
    (anti(a.0, b.0) as u8 + anti(a.1, b.1) as u8).is_multiple_of(2)
}

/// Keep the gates that map the four generators x⊗1, z⊗1, 1⊗x, 1⊗z to
/// plus-signed Pauli pairs. Every coset `{P·C}` of the Pauli group must hold
/// exactly one such gate, and it must be in the result.
pub fn quotient_pauli(set: &[GroupElement]) -> Result<Vec<GroupElement>> {
    let mut signs = Vec::with_capacity(set.len());
    for e in set {
        signs.push(generator_signs(&gate_matrix(&e.tensor))?);
    }
    let kept: Vec<GroupElement> = set
        .iter()
        .zip(&signs)
        .filter(|(_, s)| s.iter().all(|&(_, p)| p == Phase::ONE))
        .map(|(e, _)| e.clone())
        .collect();
    let lookup = Lookup::new(&kept);
    for (e, s) in set.iter().zip(&signs) {
        let positive: Vec<PauliPair> = (0..16)
            .map(pair_from_index)
            .filter(|&p| {
                s.iter().all(|&(img, phase)| {
                    let flip = if pairs_commute(p, img) { Phase::ONE } else { Phase::MINUS_ONE };
                    phase.mul(flip) == Phase::ONE
                })
            })
            .collect();
        if positive.len() != 1 {
            return Err(Error::Enumeration(format!(
                "coset of {} has {} sign-positive members",
                e.word,
                positive.len()
            )));
        }
        let rep = gate_from_matrix(&embedded_pair_matrix(positive[0]).dot(&gate_matrix(&e.tensor)));
        if lookup.find(&kept, &rep).is_none() {
            return Err(Error::Enumeration(format!("coset representative of {} missing", e.word)));
        }
    }
    Ok(kept)
}

fn even_projection(t: &GrassmannTensor) -> Option<GrassmannTensor> {
    (t.odd_weight() < 1e-18).then(|| {
        let dims = t.shape().to_vec();
        let data: Vec<C64> = t
            .data()
            .iter()
            .zip(crate::grassmann::total_parities(&dims))
            .map(|(&c, odd)| if odd { C64::new(0.0, 0.0) } else { c })
            .collect();
        let coeffs = ArrayD::from_shape_vec(IxDyn(&dims), data).expect("shape");
        GrassmannTensor::new(t.legs().to_vec(), coeffs, true).expect("even by construction")
    })
}

/// Keep the Grassmann-even gates (no weight on odd-parity entries).
pub fn filter_even(set: &[GroupElement]) -> Vec<GroupElement> {
    set.iter()
        .filter_map(|e| even_projection(&e.tensor).map(|tensor| GroupElement { tensor, word: e.word.clone() }))
        .collect()
}

fn is_local(m: &Array2<C64>) -> bool {
    // rank one after regrouping (i₁ j₁),(i₂ j₂)
    let r = Array2::from_shape_fn((4, 4), |(a, b)| {
        let (i1, j1, i2, j2) = (a / 2, a % 2, b / 2, b % 2);
        m[[2 * i1 + i2, 2 * j1 + j2]]
    });
    for a in 0..4 {
        for c in a + 1..4 {
            for b in 0..4 {
                for d in b + 1..4 {
                    if (r[[a, b]] * r[[c, d]] - r[[a, d]] * r[[c, b]]).norm() > 1e-9 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Grassmann-even products of single-site gates that occur in the group.
pub fn even_local_elements(group: &[GroupElement]) -> Vec<GroupElement> {
    filter_even(group).into_iter().filter(|e| is_local(&gate_matrix(&e.tensor))).collect()
}

/// One equivalence class under left multiplication by even local gates.
#[derive(Clone, Debug)]
pub struct GateClass {
    pub representative: GroupElement,
    pub members: Vec<GroupElement>,
}

/// Partition `set` into classes `C₁ ~ G·C₂` with `G` from `local`; classes are
/// ordered by their representatives (shortest word, then generator ids).
pub fn dedupe_left_local(set: &[GroupElement], local: &[GroupElement]) -> Vec<GateClass> {
    let n = set.len();
    let lookup = Lookup::new(set);
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for g in local {
            if let Some(j) = lookup.find(set, &compose_gates(&g.tensor, &set[i].tensor)) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut classes: Vec<GateClass> = groups
        .into_values()
        .map(|idx| {
            let members: Vec<GroupElement> = idx.iter().map(|&i| set[i].clone()).collect();
            let representative = members
                .iter()
                .min_by(|a, b| a.word.canonical_cmp(&b.word))
                .expect("nonempty class")
                .clone();
            GateClass { representative, members }
        })
        .collect();
    classes.sort_by(|a, b| a.representative.word.canonical_cmp(&b.representative.word));
    classes
}

/// Element counts at each reduction stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageCounts {
    pub group: usize,
    pub sign_positive: usize,
    pub even: usize,
    pub classes: usize,
}

impl fmt::Display for StageCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.group, self.sign_positive, self.even, self.classes)
    }
}

pub const EXPECTED_COUNTS: StageCounts = StageCounts { group: 11520, sign_positive: 720, even: 32, classes: 12 };

/// The canonical disentangling gates; gate id = position, id 0 is the identity.
#[derive(Clone, Debug)]
pub struct GateSet {
    pub gates: Vec<CliffordGate>,
    pub classes: Vec<GateClass>,
    pub local: Vec<GroupElement>,
    pub counts: StageCounts,
}

impl GateSet {
    /// Run the full pipeline; fails unless the counts are 11520/720/32/12.
    pub fn compute() -> Result<GateSet> {
        let group = enumerate_group()?;
        let positive = quotient_pauli(&group)?;
        let even = filter_even(&positive);
        let local = even_local_elements(&group);
        let classes = dedupe_left_local(&even, &local);
        let counts = StageCounts {
            group: group.len(),
            sign_positive: positive.len(),
            even: even.len(),
            classes: classes.len(),
        };
        if counts != EXPECTED_COUNTS {
            return Err(Error::Enumeration(format!("stage counts {counts}, expected {EXPECTED_COUNTS}")));
        }
        let gates = classes
            .iter()
            .map(|c| CliffordGate::from_tensor(c.representative.tensor.clone(), c.representative.word.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(GateSet { gates, classes, local, counts })
    }

    /// Class index of an arbitrary group element: left-multiply by the Pauli
    /// pair that makes it sign-positive, then look it up among class members.
    pub fn class_of(&self, t: &GrassmannTensor) -> Option<usize> {
        let m = gate_matrix(t);
        for p in 0..16 {
            let cand = gate_from_matrix(&embedded_pair_matrix(pair_from_index(p)).dot(&m));
            let cand = canonical_phase(&cand);
            for (ci, class) in self.classes.iter().enumerate() {
                if class.members.iter().any(|e| e.tensor.max_abs_diff(&cand) < 1e-8) {
                    return Some(ci);
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

/// Gate set computed once per process.
pub fn canonical_gates() -> Result<&'static GateSet> {
    static SET: OnceLock<std::result::Result<GateSet, String>> = OnceLock::new();
    SET.get_or_init(|| GateSet::compute().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::Enumeration(e.clone()))
}

/// The gate words listed with the published gate set.
pub const PUBLISHED_WORDS: [&str; 12] = [
    "I",
    "CNOT01 S1 CNOT01",
    "CNOT10 CNOT01 CNOT10",
    "S0 CNOT01 H0 CNOT01",
    "H0 CNOT01 CNOT10 H1",
    "S0 CNOT10 H1 CNOT10",
    "CNOT10 S1 CNOT01 H1 CNOT10",
    "CNOT01 S0 CNOT10 H0 CNOT01",
    "CNOT01 S0 H0 S0 CNOT01",
    "S0 CNOT10 H1 CNOT10 S0",
    "S1 CNOT01 H0 CNOT10 S0 CNOT01",
    "CNOT01 CNOT10 S0 H0 S0 CNOT01",
];
