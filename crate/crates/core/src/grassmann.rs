//! Grassmann tensors: dense coefficient arrays over Grassmann monomials.
//!
//! A leg with `g` generators carries composite indices `0..2^g`; bit `k` of an
//! index is the exponent of generator `θ_{k+1}`. Non-conjugated legs write their
//! monomial ascending (`θ_1^{i_1} θ_2^{i_2} …`), conjugated legs descending
//! (`θ_g^{†i_g} … θ_1^{†i_1}`). The tensor's monomial is the product of its
//! legs' monomials in leg order.

use std::borrow::Cow;

use ndarray::{Array2, ArrayD, ArrayView2, Dimension, IxDyn};
use ndarray_linalg::{JobSvd, SVDDC};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Leg {
    pub generators: u32,
    pub conjugated: bool,
}

impl Leg {
    pub fn new(generators: u32, conjugated: bool) -> Leg {
        assert!((1..=24).contains(&generators), "a leg carries 1..=24 generators");
        Leg { generators, conjugated }
    }

    /// Non-conjugated leg (ψ or φ).
    pub fn plain(generators: u32) -> Leg {
        Leg::new(generators, false)
    }

    /// Conjugated leg (ψ† or φ†).
    pub fn dagger(generators: u32) -> Leg {
        Leg::new(generators, true)
    }

    pub fn dim(self) -> usize {
        1usize << self.generators
    }

    pub fn dual(self) -> Leg {
        Leg { generators: self.generators, conjugated: !self.conjugated }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: u32) -> Parity {
        if bit & 1 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn bit(self) -> usize {
        self as usize
    }

    /// Parity of a product.
    pub fn combine(self, other: Parity) -> Parity {
        Parity::from_bit((self.bit() ^ other.bit()) as u32)
    }
}

/// Grassmann parity of a composite index.
pub fn parity_of(index: usize) -> Parity {
    Parity::from_bit(index.count_ones())
}

/// Parity of every row-major multi-index of `shape`, all axes summed.
pub fn total_parities(shape: &[usize]) -> Vec<bool> {
    let total: usize = shape.iter().product();
    let mut out = Vec::with_capacity(total);
    visit_masks(shape, |_, mask| out.push(mask.count_ones() & 1 == 1));
    out
}

/// Walk a row-major array of `shape`, passing the flat offset and a mask whose
/// bit `k` is the parity of the index along axis `k`.
fn visit_masks(shape: &[usize], mut f: impl FnMut(usize, u32)) {
    let total: usize = shape.iter().product();
    if total == 0 {
        return;
    }
    let rank = shape.len();
    let mut idx = vec![0usize; rank];
    let mut mask = 0u32;
    for flat in 0..total {
        f(flat, mask);
        let mut ax = rank;
        while ax > 0 {
            ax -= 1;
            idx[ax] += 1;
            if idx[ax] < shape[ax] {
                let bit = idx[ax].count_ones() & 1;
                mask = (mask & !(1 << ax)) | (bit << ax);
                break;
            }
            idx[ax] = 0;
            mask &= !(1 << ax);
        }
    }
}

/// Sign rule evaluated on axis-parity masks: odd when
/// `Σ_pairs p_x p_y + Σ_singles p_x` is odd.
struct SignRule {
    partner: Vec<u32>,
    singles: u32,
    table: Option<Vec<bool>>,
}

impl SignRule {
    fn new(rank: usize, pairs: &[(usize, usize)], singles: &[usize]) -> SignRule {
        let mut partner = vec![0u32; rank];
        for &(x, y) in pairs {
            partner[x.min(y)] |= 1 << x.max(y);
        }
        let singles = singles.iter().fold(0u32, |m, &x| m ^ (1 << x));
        let mut rule = SignRule { partner, singles, table: None };
        if rank <= 16 {
            let table = (0..1u32 << rank).map(|m| rule.odd_direct(m)).collect();
            rule.table = Some(table);
        }
        rule
    }

    fn is_trivial(&self) -> bool {
        self.singles == 0 && self.partner.iter().all(|&p| p == 0)
    }

    fn odd_direct(&self, mask: u32) -> bool {
        let mut n = (mask & self.singles).count_ones();
        for (x, &p) in self.partner.iter().enumerate() {
            if mask >> x & 1 == 1 {
                n += (p & mask).count_ones();
            }
        }
        n & 1 == 1
    }

    fn odd(&self, mask: u32) -> bool {
        match &self.table {
            Some(t) => t[mask as usize],
            None => self.odd_direct(mask),
        }
    }
}

/// Copy `src` so that output axis `k` is source axis `axes[k]`, negating entries
/// for which the sign rule (on output axes) is odd.
fn signed_transpose(
    src: &ArrayD<C64>,
    axes: &[usize],
    pairs: &[(usize, usize)],
    singles: &[usize],
) -> ArrayD<C64> {
    signed_transpose_cow(src, axes, pairs, singles).into_owned()
}

/// As [`signed_transpose`], borrowing `src` when nothing moves.
fn signed_transpose_cow<'a>(
    src: &'a ArrayD<C64>,
    axes: &[usize],
    pairs: &[(usize, usize)],
    singles: &[usize],
) -> Cow<'a, ArrayD<C64>> {
    let rule = SignRule::new(axes.len(), pairs, singles);
    let identity = axes.iter().enumerate().all(|(k, &a)| k == a);
    if identity && rule.is_trivial() && src.is_standard_layout() {
        return Cow::Borrowed(src);
    }
    let owned;
    let src = if src.is_standard_layout() {
        src
    } else {
        owned = src.as_standard_layout().into_owned();
        &owned
    };
    let data = src.as_slice().expect("standard layout");
    let rank = axes.len();
    let shape: Vec<usize> = axes.iter().map(|&a| src.shape()[a]).collect();
    let total: usize = shape.iter().product();
    let mut out = Vec::with_capacity(total);
    if total > 0 && rank == 0 {
        out.push(if rule.odd(0) { -data[0] } else { data[0] });
    } else if total > 0 {
        let mut src_strides = vec![1usize; rank];
        for k in (0..rank.saturating_sub(1)).rev() {
            src_strides[k] = src_strides[k + 1] * src.shape()[k + 1];
        }
        let stride: Vec<usize> = axes.iter().map(|&a| src_strides[a]).collect();
        let last = rank - 1;
        let (n_last, s_last) = (shape[last], stride[last]);
        let lead: usize = total / n_last;
        let mut idx = vec![0usize; rank];
        let (mut base, mut mask) = (0usize, 0u32);
        for _ in 0..lead {
            for i in 0..n_last {
                let z = data[base + i * s_last];
                let m = mask | ((i.count_ones() & 1) << last);
                out.push(if rule.odd(m) { -z } else { z });
            }
            let mut ax = last;
            while ax > 0 {
                ax -= 1;
                idx[ax] += 1;
                base += stride[ax];
                if idx[ax] < shape[ax] {
                    mask = (mask & !(1 << ax)) | ((idx[ax].count_ones() & 1) << ax);
                    break;
                }
                base -= stride[ax] * shape[ax];
                idx[ax] = 0;
                mask &= !(1 << ax);
            }
        }
    }
    Cow::Owned(ArrayD::from_shape_vec(IxDyn(&shape), out).expect("shape matches"))
}

/// Pairs of positions in `order` whose original legs appear inverted.
fn inversions(order: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for x in 0..order.len() {
        for y in x + 1..order.len() {
            if order[x] > order[y] {
                out.push((x, y));
            }
        }
    }
    out
}

fn is_permutation(order: &[usize], rank: usize) -> bool {
    if order.len() != rank {
        return false;
    }
    let mut seen = vec![false; rank];
    for &k in order {
        if k >= rank || seen[k] {
            return false;
        }
        seen[k] = true;
    }
    true
}

fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Recipe for undoing [`GrassmannTensor::join_legs`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPlan {
    order: Vec<usize>,
    groups: Vec<Vec<Leg>>,
}

impl SplitPlan {
    pub fn groups(&self) -> &[Vec<Leg>] {
        &self.groups
    }
}

/// Parity-blocked singular value decomposition `t = U · diag(s) · V`.
///
/// `s[k]` is the singular value carried by slot `k` of the new bond leg; unused
/// slots hold zero and the matching columns of `U` and rows of `V` vanish.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: GrassmannTensor,
    pub s: Vec<f64>,
    pub v: GrassmannTensor,
    pub discarded_weight: f64,
    /// Leg order of `t` that `U · diag(s) · V` reproduces (row legs, then the rest).
    pub order: Vec<usize>,
}

impl Svd {
    /// Nonzero singular values, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.s.iter().copied().filter(|&x| x > 0.0).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// `diag(s) · V`.
    pub fn sv(&self) -> GrassmannTensor {
        self.v.scale_axis(0, &self.s)
    }

    /// `U · diag(s)`.
    pub fn us(&self) -> GrassmannTensor {
        let last = self.u.rank() - 1;
        self.u.scale_axis(last, &self.s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannTensor {
    legs: Vec<Leg>,
    coeffs: ArrayD<C64>,
    even: bool,
}

impl GrassmannTensor {
    /// Build a tensor, validating the shape and, if declared even, the parity support.
    pub fn new(legs: Vec<Leg>, coeffs: ArrayD<C64>, even_declared: bool) -> Result<Self> {
        let expected: Vec<usize> = legs.iter().map(|l| l.dim()).collect();
        if coeffs.shape() != expected.as_slice() {
            return Err(Error::ShapeMismatch { expected, got: coeffs.shape().to_vec() });
        }
        let t = GrassmannTensor { legs, coeffs: coeffs.as_standard_layout().into_owned(), even: even_declared };
        if even_declared && t.odd_weight() > 0.0 {
            return Err(Error::NotEven);
        }
        Ok(t)
    }

    pub(crate) fn from_parts(legs: Vec<Leg>, coeffs: ArrayD<C64>, even: bool) -> Self {
        debug_assert!(coeffs.is_standard_layout());
        debug_assert_eq!(
            coeffs.shape(),
            legs.iter().map(|l| l.dim()).collect::<Vec<_>>().as_slice()
        );
        GrassmannTensor { legs, coeffs, even }
    }

    pub fn zeros(legs: Vec<Leg>, even_declared: bool) -> Self {
        let dims: Vec<usize> = legs.iter().map(|l| l.dim()).collect();
        GrassmannTensor { legs, coeffs: ArrayD::zeros(IxDyn(&dims)), even: even_declared }
    }

    pub fn from_fn(legs: Vec<Leg>, even_declared: bool, f: impl Fn(&[usize]) -> C64) -> Result<Self> {
        let dims: Vec<usize> = legs.iter().map(|l| l.dim()).collect();
        let coeffs = ArrayD::from_shape_fn(IxDyn(&dims), |ix| f(ix.slice()));
        GrassmannTensor::new(legs, coeffs, even_declared)
    }

    /// Rank-0 tensor holding a single number.
    pub fn scalar(value: C64) -> Self {
        GrassmannTensor { legs: vec![], coeffs: ArrayD::from_elem(IxDyn(&[]), value), even: true }
    }

    /// Rank-(1,1) identity on legs (φ†, ψ): Kronecker-delta coefficients.
    pub fn identity(generators: u32) -> Self {
        let d = 1usize << generators;
        let coeffs = ArrayD::from_shape_fn(IxDyn(&[d, d]), |ix| {
            if ix[0] == ix[1] {
                C64::new(1.0, 0.0)
            } else {
                ZERO
            }
        });
        GrassmannTensor::from_parts(vec![Leg::dagger(generators), Leg::plain(generators)], coeffs, true)
    }

    /// Random tensor with standard-normal complex entries; odd-parity entries
    /// are zero when `even` is set.
    pub fn random<R: Rng + ?Sized>(legs: Vec<Leg>, even: bool, rng: &mut R) -> Self {
        let dims: Vec<usize> = legs.iter().map(|l| l.dim()).collect();
        let parities = total_parities(&dims);
        let data: Vec<C64> = parities
            .iter()
            .map(|&odd| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                if even && odd {
                    ZERO
                } else {
                    C64::new(re, im)
                }
            })
            .collect();
        let coeffs = ArrayD::from_shape_vec(IxDyn(&dims), data).expect("shape");
        GrassmannTensor::from_parts(legs, coeffs, even)
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn leg(&self, k: usize) -> Leg {
        self.legs[k]
    }

    pub fn rank(&self) -> usize {
        self.legs.len()
    }

    pub fn coeffs(&self) -> &ArrayD<C64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut ArrayD<C64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> ArrayD<C64> {
        self.coeffs
    }

    pub fn shape(&self) -> &[usize] {
        self.coeffs.shape()
    }

    pub fn is_even_declared(&self) -> bool {
        self.even
    }

    pub fn with_even_declared(mut self, even: bool) -> Result<Self> {
        if even && self.odd_weight() > 0.0 {
            return Err(Error::NotEven);
        }
        self.even = even;
        Ok(self)
    }

    pub fn data(&self) -> &[C64] {
        self.coeffs.as_slice().expect("standard layout")
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        self.coeffs.as_slice_mut().expect("standard layout")
    }

    /// Value of a rank-0 tensor.
    pub fn scalar_value(&self) -> Option<C64> {
        if self.legs.is_empty() {
            self.coeffs.iter().next().copied()
        } else {
            None
        }
    }

    /// Sum of squared magnitudes on odd-total-parity entries.
    pub fn odd_weight(&self) -> f64 {
        let mut w = 0.0;
        let data = self.coeffs.as_slice().expect("standard layout");
        visit_masks(self.coeffs.shape(), |flat, mask| {
            if mask.count_ones() & 1 == 1 {
                w += data[flat].norm_sqr();
            }
        });
        w
    }

    /// Reorder legs: output leg `k` is input leg `new_order[k]`. Coefficients pick
    /// up `(-1)^{pq}` for every pair of legs whose relative order flips.
    pub fn sign_permute(&self, new_order: &[usize]) -> Result<Self> {
        if !is_permutation(new_order, self.rank()) {
            return Err(Error::InvalidPermutation { rank: self.rank(), order: new_order.to_vec() });
        }
        let coeffs = signed_transpose(&self.coeffs, new_order, &inversions(new_order), &[]);
        let legs = new_order.iter().map(|&k| self.legs[k]).collect();
        Ok(GrassmannTensor::from_parts(legs, coeffs, self.even))
    }

    /// Berezin contraction of leg `leg_a` of `a` with leg `leg_b` of `b`.
    pub fn contract(a: &Self, leg_a: usize, b: &Self, leg_b: usize) -> Result<Self> {
        Self::contract_pairs(a, b, &[(leg_a, leg_b)])
    }

    /// Berezin contraction of several dual leg pairs at once: the integral of the
    /// product `a · b` over every listed pair. Result legs are `a`'s remaining
    /// legs followed by `b`'s, each in original order.
    pub fn contract_pairs(a: &Self, b: &Self, pairs: &[(usize, usize)]) -> Result<Self> {
        let (ra, rb) = (a.rank(), b.rank());
        let mut used_a = vec![false; ra];
        let mut used_b = vec![false; rb];
        for &(x, y) in pairs {
            if x >= ra {
                return Err(Error::LegOutOfRange(x, ra));
            }
            if y >= rb {
                return Err(Error::LegOutOfRange(y, rb));
            }
            if used_a[x] || used_b[y] {
                return Err(Error::InvalidArgument("a leg appears in two contraction pairs".into()));
            }
            used_a[x] = true;
            used_b[y] = true;
            let (la, lb) = (a.legs[x], b.legs[y]);
            if la.generators != lb.generators {
                return Err(Error::GeneratorMismatch(la.generators, lb.generators));
            }
            if la.conjugated == lb.conjugated {
                return Err(Error::ConjugationMismatch);
            }
        }
        let k = pairs.len();
        let rest_a: Vec<usize> = (0..ra).filter(|&x| !used_a[x]).collect();
        let rest_b: Vec<usize> = (0..rb).filter(|&y| !used_b[y]).collect();

        // a: remaining legs, then contracted legs in pair order.
        let mut order_a = rest_a.clone();
        order_a.extend(pairs.iter().map(|p| p.0));
        let singles: Vec<usize> = pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| a.legs[p.0].conjugated)
            .map(|(r, _)| rest_a.len() + r)
            .collect();
        let ca = signed_transpose_cow(&a.coeffs, &order_a, &inversions(&order_a), &singles);

        // b: contracted legs nested (reverse pair order) for the signs, stored in
        // pair order so the summed index lines up with a's.
        let mut grass_b: Vec<usize> = pairs.iter().rev().map(|p| p.1).collect();
        grass_b.extend(rest_b.iter().copied());
        let mut store_b: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        store_b.extend(rest_b.iter().copied());
        let mut pos_store = vec![0usize; rb];
        for (s, &leg) in store_b.iter().enumerate() {
            pos_store[leg] = s;
        }
        let pairs_b: Vec<(usize, usize)> = inversions(&grass_b)
            .into_iter()
            .map(|(x, y)| (pos_store[grass_b[x]], pos_store[grass_b[y]]))
            .collect();
        let cb = signed_transpose_cow(&b.coeffs, &store_b, &pairs_b, &[]);

        let m: usize = rest_a.iter().map(|&x| a.legs[x].dim()).product();
        let kk: usize = pairs.iter().map(|p| a.legs[p.0].dim()).product();
        let n: usize = rest_b.iter().map(|&y| b.legs[y].dim()).product();
        let a2 = ca.view().into_shape_with_order((m, kk)).expect("contiguous");
        let b2 = cb.view().into_shape_with_order((kk, n)).expect("contiguous");
        let c2 = if k == 0 && kk == 1 {
            outer_2d(&a2, &b2)
        } else {
            let dims_of = |t: &Self, legs: &mut dyn Iterator<Item = usize>| -> Vec<usize> { legs.map(|x| t.legs[x].dim()).collect() };
            let pr = total_parities(&dims_of(a, &mut rest_a.iter().copied()));
            let pk = total_parities(&dims_of(a, &mut pairs.iter().map(|p| p.0)));
            let pc = total_parities(&dims_of(b, &mut rest_b.iter().copied()));
            blocked_matmul(&a2, &b2, &pr, &pk, &pc)
        };

        let mut legs: Vec<Leg> = rest_a.iter().map(|&x| a.legs[x]).collect();
        legs.extend(rest_b.iter().map(|&y| b.legs[y]));
        let dims: Vec<usize> = legs.iter().map(|l| l.dim()).collect();
        let c2 = if c2.is_standard_layout() { c2 } else { c2.as_standard_layout().into_owned() };
        let coeffs = c2
            .into_shape_with_order(IxDyn(&dims))
            .expect("result shape");
        Ok(GrassmannTensor::from_parts(legs, coeffs, a.even && b.even))
    }

    /// Product `a · b` with no contraction: legs of `a` followed by legs of `b`.
    pub fn outer(a: &Self, b: &Self) -> Self {
        Self::contract_pairs(a, b, &[]).expect("no pairs to validate")
    }

    /// Merge each group of legs into a single leg. Groups are taken in the given
    /// order; the tensor is first sign-permuted so each group is contiguous.
    /// A merged non-conjugated leg holds its first member's generators lowest;
    /// a merged conjugated leg holds its first member's generators highest, so
    /// the merged monomial keeps the canonical ascending/descending form.
    pub fn join_legs(&self, groups: &[Vec<usize>]) -> Result<(Self, SplitPlan)> {
        let order: Vec<usize> = groups.iter().flatten().copied().collect();
        if !is_permutation(&order, self.rank()) || groups.iter().any(|g| g.is_empty()) {
            return Err(Error::InvalidPermutation { rank: self.rank(), order });
        }
        let mut storage = Vec::with_capacity(order.len());
        let mut new_legs = Vec::with_capacity(groups.len());
        let mut plan_groups = Vec::with_capacity(groups.len());
        for g in groups {
            let conj = self.legs[g[0]].conjugated;
            if g.iter().any(|&k| self.legs[k].conjugated != conj) {
                return Err(Error::MixedConjugation);
            }
            let gens: u32 = g.iter().map(|&k| self.legs[k].generators).sum();
            if gens > 24 {
                return Err(Error::SizeLimit(format!("joined leg with {gens} generators")));
            }
            new_legs.push(Leg::new(gens, conj));
            plan_groups.push(g.iter().map(|&k| self.legs[k]).collect());
            if conj {
                storage.extend(g.iter().copied());
            } else {
                storage.extend(g.iter().rev().copied());
            }
        }
        let mut pos_store = vec![0usize; self.rank()];
        for (s, &leg) in storage.iter().enumerate() {
            pos_store[leg] = s;
        }
        let pairs: Vec<(usize, usize)> = inversions(&order)
            .into_iter()
            .map(|(x, y)| (pos_store[order[x]], pos_store[order[y]]))
            .collect();
        let coeffs = signed_transpose(&self.coeffs, &storage, &pairs, &[]);
        let dims: Vec<usize> = new_legs.iter().map(|l| l.dim()).collect();
        let coeffs = coeffs.into_shape_with_order(IxDyn(&dims)).expect("join shape");
        Ok((
            GrassmannTensor::from_parts(new_legs, coeffs, self.even),
            SplitPlan { order, groups: plan_groups },
        ))
    }

    /// Inverse of [`join_legs`](Self::join_legs).
    pub fn split_legs(&self, plan: &SplitPlan) -> Result<Self> {
        if plan.groups.len() != self.rank() {
            return Err(Error::InconsistentPlan(format!(
                "{} groups for a rank-{} tensor",
                plan.groups.len(),
                self.rank()
            )));
        }
        let mut storage_legs: Vec<Leg> = Vec::new();
        let mut storage_ids: Vec<usize> = Vec::new();
        let mut cursor = 0usize;
        for (g, leg) in plan.groups.iter().zip(&self.legs) {
            let gens: u32 = g.iter().map(|l| l.generators).sum();
            if gens != leg.generators || g.iter().any(|l| l.conjugated != leg.conjugated) {
                return Err(Error::InconsistentPlan("group does not match merged leg".into()));
            }
            let ids: Vec<usize> = (cursor..cursor + g.len()).collect();
            cursor += g.len();
            if leg.conjugated {
                storage_legs.extend(g.iter().copied());
                storage_ids.extend(ids.iter().map(|&i| plan.order[i]));
            } else {
                storage_legs.extend(g.iter().rev().copied());
                storage_ids.extend(ids.iter().rev().map(|&i| plan.order[i]));
            }
        }
        let rank = storage_legs.len();
        let dims: Vec<usize> = storage_legs.iter().map(|l| l.dim()).collect();
        let arr = self
            .coeffs
            .clone()
            .into_shape_with_order(IxDyn(&dims))
            .expect("split shape");
        // storage axis holding each original leg
        let mut axis_of = vec![0usize; rank];
        for (s, &leg) in storage_ids.iter().enumerate() {
            axis_of[leg] = s;
        }
        let mut legs = vec![Leg::plain(1); rank];
        for (s, &leg) in storage_ids.iter().enumerate() {
            legs[leg] = storage_legs[s];
        }
        let mut pos_grass = vec![0usize; rank];
        for (x, &leg) in plan.order.iter().enumerate() {
            pos_grass[leg] = x;
        }
        let mut pairs = Vec::new();
        for u in 0..rank {
            for v in u + 1..rank {
                if pos_grass[u] > pos_grass[v] {
                    pairs.push((u, v));
                }
            }
        }
        let coeffs = signed_transpose(&arr, &axis_of, &pairs, &[]);
        Ok(GrassmannTensor::from_parts(legs, coeffs, self.even))
    }

    /// Grassmann involution: reverse the signature, flip every conjugation
    /// flag and complex-conjugate the coefficients. This is the bra layer of a
    /// `⟨ψ|…|ψ⟩` network.
    pub fn bar(&self) -> Self {
        let rev: Vec<usize> = (0..self.rank()).rev().collect();
        let coeffs = self
            .coeffs
            .view()
            .permuted_axes(IxDyn(&rev))
            .as_standard_layout()
            .mapv(|c| c.conj());
        let legs = self.legs.iter().rev().map(|l| l.dual()).collect();
        GrassmannTensor::from_parts(legs, coeffs, self.even)
    }

    /// Conjugate tensor: [`bar`](Self::bar) with an extra `(-1)^{p(I)}` on every
    /// leg that was conjugated in `self`, so that contracting all legs of `t`
    /// with `conj(t)` gives `Σ|t|²`. `conj(conj(t)) = t` for even tensors and
    /// `-t` for odd ones.
    pub fn conj(&self) -> Self {
        let r = self.rank();
        let singles: Vec<usize> = (0..r).filter(|&k| self.legs[k].conjugated).map(|k| r - 1 - k).collect();
        let mut t = self.bar();
        if !singles.is_empty() {
            let axes: Vec<usize> = (0..r).collect();
            t.coeffs = signed_transpose(&t.coeffs, &axes, &[], &singles);
        }
        t
    }

    /// Multiply by `(-1)^{p}` of the index on each listed leg.
    pub fn twist(&self, legs: &[usize]) -> Self {
        let axes: Vec<usize> = (0..self.rank()).collect();
        let coeffs = signed_transpose(&self.coeffs, &axes, &[], legs);
        GrassmannTensor::from_parts(self.legs.clone(), coeffs, self.even)
    }

    /// Euclidean norm of the coefficients (equals `sqrt(t ⋆ conj(t))`).
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference; infinite when signatures differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.legs != other.legs {
            return f64::INFINITY;
        }
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Euclidean inner product `Σ conj(self) · other`.
    pub fn dot(&self, other: &Self) -> C64 {
        self.data().iter().zip(other.data()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        GrassmannTensor::from_parts(self.legs.clone(), self.coeffs.mapv(|c| c * s), self.even)
    }

    pub fn scale_in_place(&mut self, s: C64) {
        self.coeffs.mapv_inplace(|c| c * s);
    }

    /// `self += s · other`; signatures must match.
    pub fn add_scaled(&mut self, s: C64, other: &Self) -> Result<()> {
        if self.legs != other.legs {
            return Err(Error::InvalidArgument("adding tensors with different signatures".into()));
        }
        self.coeffs.scaled_add(s, &other.coeffs);
        self.even &= other.even;
        Ok(())
    }

    /// Multiply slice `k` of `axis` by `w[k]`.
    pub fn scale_axis(&self, axis: usize, w: &[f64]) -> Self {
        let mut c = self.coeffs.clone();
        for (k, mut lane) in c.axis_iter_mut(ndarray::Axis(axis)).enumerate() {
            let f = w[k];
            lane.mapv_inplace(|x| x * f);
        }
        GrassmannTensor::from_parts(self.legs.clone(), c, self.even)
    }

    /// Fix leg `k` to index `value` and drop it. Only legs at either end of the
    /// signature are accepted, where removal needs no reordering sign.
    pub fn project_end_leg(&self, k: usize, value: usize) -> Result<Self> {
        if k != 0 && k + 1 != self.rank() {
            return Err(Error::InvalidArgument("only an end leg can be projected".into()));
        }
        if value >= self.legs[k].dim() {
            return Err(Error::InvalidArgument("projected index out of range".into()));
        }
        let coeffs = self
            .coeffs
            .index_axis(ndarray::Axis(k), value)
            .as_standard_layout()
            .into_owned();
        let mut legs = self.legs.clone();
        legs.remove(k);
        let even = self.even && parity_of(value) == Parity::Even;
        Ok(GrassmannTensor::from_parts(legs, coeffs, even))
    }

    /// Attach a new end leg fixed at index `value` (inverse of
    /// [`project_end_leg`](Self::project_end_leg)).
    pub fn attach_end_leg(&self, front: bool, leg: Leg, value: usize) -> Self {
        let mut dims: Vec<usize> = self.shape().to_vec();
        let mut legs = self.legs.clone();
        let axis = if front { 0 } else { dims.len() };
        dims.insert(axis, leg.dim());
        legs.insert(axis, leg);
        let mut coeffs = ArrayD::zeros(IxDyn(&dims));
        coeffs
            .index_axis_mut(ndarray::Axis(axis), value)
            .assign(&self.coeffs);
        let even = self.even && parity_of(value) == Parity::Even;
        GrassmannTensor::from_parts(legs, coeffs, even)
    }

    /// Dense matrix of the tensor: sign-permute to `row_legs ++ col_legs`, then
    /// join each side into a single leg. Rows and columns follow the joined
    /// composite index. Limited to 8 generators in total.
    pub fn to_dense_matrix(&self, row_legs: &[usize], col_legs: &[usize]) -> Result<Array2<C64>> {
        let gens: u32 = self.legs.iter().map(|l| l.generators).sum();
        if gens > 8 {
            return Err(Error::SizeLimit(format!("{gens} generators (limit 8)")));
        }
        self.joined_matrix(row_legs, col_legs)
    }

    pub(crate) fn joined_matrix(&self, row_legs: &[usize], col_legs: &[usize]) -> Result<Array2<C64>> {
        let mut groups = Vec::new();
        if !row_legs.is_empty() {
            groups.push(row_legs.to_vec());
        }
        if !col_legs.is_empty() {
            groups.push(col_legs.to_vec());
        }
        let (j, _) = self.join_legs(&groups)?;
        let rows = if row_legs.is_empty() { 1 } else { j.legs[0].dim() };
        let cols = if col_legs.is_empty() { 1 } else { j.legs[groups.len() - 1].dim() };
        Ok(j.coeffs.into_shape_with_order((rows, cols)).expect("matrix shape"))
    }

    /// Parity-blocked SVD. Row legs (in the given order) go to `U`, the other
    /// legs (original order) to `V`; `U` gets a new trailing non-conjugated bond
    /// leg and `V` a leading conjugated one.
    ///
    /// Singular values are kept greedily in descending order while at most
    /// `chi_max` are kept in total, at most `2^(⌈log2 chi_max⌉-1)` per parity
    /// sector, and each exceeds `cutoff · max`. The bond leg gets the fewest
    /// generators whose even and odd slot counts hold the kept values; leftover
    /// slots are zero.
    pub fn svd(&self, row_legs: &[usize], chi_max: usize, cutoff: f64) -> Result<Svd> {
        if !self.even {
            return Err(Error::NotEven);
        }
        if chi_max == 0 {
            return Err(Error::InvalidArgument("chi_max must be at least 1".into()));
        }
        let (mat, order, nrows) = self.matricize(row_legs)?;
        let row_dims: Vec<usize> = order[..nrows].iter().map(|&k| self.legs[k].dim()).collect();
        let col_dims: Vec<usize> = order[nrows..].iter().map(|&k| self.legs[k].dim()).collect();
        let row_par = total_parities(&row_dims);
        let col_par = total_parities(&col_dims);

        struct Block {
            rows: Vec<usize>,
            cols: Vec<usize>,
            u: Array2<C64>,
            s: Vec<f64>,
            vt: Array2<C64>,
        }
        let mut blocks = Vec::with_capacity(2);
        for parity in [false, true] {
            let rows: Vec<usize> = (0..row_par.len()).filter(|&r| row_par[r] == parity).collect();
            let cols: Vec<usize> = (0..col_par.len()).filter(|&c| col_par[c] == parity).collect();
            if rows.is_empty() || cols.is_empty() {
                blocks.push(Block { rows, cols, u: Array2::zeros((0, 0)), s: vec![], vt: Array2::zeros((0, 0)) });
                continue;
            }
            let sub = Array2::from_shape_fn((rows.len(), cols.len()), |(i, j)| mat[[rows[i], cols[j]]]);
            let (u, s, vt) = sub.svddc(JobSvd::Some)?;
            blocks.push(Block { rows, cols, u: u.expect("u"), s: s.to_vec(), vt: vt.expect("vt") });
        }

        let mut cand: Vec<(f64, usize, usize)> = Vec::new();
        for (p, b) in blocks.iter().enumerate() {
            cand.extend(b.s.iter().enumerate().map(|(k, &v)| (v, p, k)));
        }
        cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let smax = cand.first().map(|c| c.0).unwrap_or(0.0);
        if !(smax > 0.0) {
            return Err(Error::EmptySpectrum);
        }
        let cap = 1usize << (ceil_log2(chi_max).max(1) - 1);
        let mut kept: [Vec<(f64, usize)>; 2] = [vec![], vec![]];
        let mut discarded = 0.0;
        for &(v, p, k) in &cand {
            let total = kept[0].len() + kept[1].len();
            if total < chi_max && kept[p].len() < cap && v > cutoff * smax {
                kept[p].push((v, k));
            } else {
                discarded += v * v;
            }
        }
        let kmax = kept[0].len().max(kept[1].len());
        let g = (ceil_log2(kmax) + 1).max(1);
        let bond = 1usize << g;
        let slots: [Vec<usize>; 2] = [
            (0..bond).filter(|&x| x.count_ones() % 2 == 0).collect(),
            (0..bond).filter(|&x| x.count_ones() % 2 == 1).collect(),
        ];
        let nr: usize = row_dims.iter().product();
        let nc: usize = col_dims.iter().product();
        let mut u = Array2::<C64>::zeros((nr, bond));
        let mut vt = Array2::<C64>::zeros((bond, nc));
        let mut s = vec![0.0; bond];
        for p in 0..2 {
            let b = &blocks[p];
            for (slot_k, &(v, k)) in kept[p].iter().enumerate() {
                let slot = slots[p][slot_k];
                s[slot] = v;
                for (i, &r) in b.rows.iter().enumerate() {
                    u[[r, slot]] = b.u[[i, k]];
                }
                for (j, &c) in b.cols.iter().enumerate() {
                    vt[[slot, c]] = b.vt[[k, j]];
                }
            }
        }
        let mut u_dims = row_dims.clone();
        u_dims.push(bond);
        let mut v_dims = vec![bond];
        v_dims.extend(col_dims.iter().copied());
        let mut u_legs: Vec<Leg> = order[..nrows].iter().map(|&k| self.legs[k]).collect();
        u_legs.push(Leg::plain(g));
        let mut v_legs = vec![Leg::dagger(g)];
        v_legs.extend(order[nrows..].iter().map(|&k| self.legs[k]));
        let u = GrassmannTensor::from_parts(u_legs, u.into_shape_with_order(IxDyn(&u_dims)).expect("u"), true);
        let v = GrassmannTensor::from_parts(v_legs, vt.into_shape_with_order(IxDyn(&v_dims)).expect("v"), true);
        Ok(Svd { u, s, v, discarded_weight: discarded, order })
    }

    /// All singular values across the `row_legs` split (both parity blocks),
    /// descending, without computing vectors.
    pub fn singular_values(&self, row_legs: &[usize]) -> Result<Vec<f64>> {
        let (mat, order, nrows) = self.matricize(row_legs)?;
        let row_dims: Vec<usize> = order[..nrows].iter().map(|&k| self.legs[k].dim()).collect();
        let col_dims: Vec<usize> = order[nrows..].iter().map(|&k| self.legs[k].dim()).collect();
        let row_par = total_parities(&row_dims);
        let col_par = total_parities(&col_dims);
        let mut out = Vec::new();
        for parity in [false, true] {
            let rows: Vec<usize> = (0..row_par.len()).filter(|&r| row_par[r] == parity).collect();
            let cols: Vec<usize> = (0..col_par.len()).filter(|&c| col_par[c] == parity).collect();
            if rows.is_empty() || cols.is_empty() {
                continue;
            }
            let sub = Array2::from_shape_fn((rows.len(), cols.len()), |(i, j)| mat[[rows[i], cols[j]]]);
            let (_, s, _) = sub.svddc(JobSvd::None)?;
            out.extend(s.iter().copied());
        }
        out.sort_by(|a, b| b.total_cmp(a));
        Ok(out)
    }

    /// Sign-permute to `row_legs ++ rest` and reshape to a matrix.
    fn matricize(&self, row_legs: &[usize]) -> Result<(Array2<C64>, Vec<usize>, usize)> {
        let r = self.rank();
        let mut is_row = vec![false; r];
        for &k in row_legs {
            if k >= r {
                return Err(Error::LegOutOfRange(k, r));
            }
            if is_row[k] {
                return Err(Error::BadRowLegs);
            }
            is_row[k] = true;
        }
        if row_legs.is_empty() || row_legs.len() == r {
            return Err(Error::BadRowLegs);
        }
        let mut order = row_legs.to_vec();
        order.extend((0..r).filter(|&k| !is_row[k]));
        let p = self.sign_permute(&order)?;
        let nr: usize = row_legs.iter().map(|&k| self.legs[k].dim()).product();
        let nc = p.coeffs.len() / nr;
        let mat = p.coeffs.into_shape_with_order((nr, nc)).expect("matrix");
        Ok((mat, order, row_legs.len()))
    }
}

/// Parity of a matrix whose entry `(r, c)` carries parity `pr[r] ^ pc[c]`,
/// or `None` when both parities occur.
fn matrix_parity(m: &ArrayView2<C64>, pr: &[bool], pc: &[bool]) -> Option<bool> {
    let data = m.as_slice()?;
    let n = pc.len();
    let mut seen = [false; 2];
    for (r, row) in data.chunks_exact(n).enumerate() {
        let flip = pr[r];
        for (z, &p) in row.iter().zip(pc) {
            if *z != ZERO {
                seen[(flip ^ p) as usize] = true;
            }
        }
        if seen[0] && seen[1] {
            return None;
        }
    }
    Some(seen[1])
}

/// `a · b` for matrices of definite parity: only the two blocks with matching
/// contracted-index parity contribute. Falls back to a dense product when
/// either factor mixes parities.
fn blocked_matmul(a: &ArrayView2<C64>, b: &ArrayView2<C64>, pr: &[bool], pk: &[bool], pc: &[bool]) -> Array2<C64> {
    const MIN_FLOPS: usize = 1 << 16;
    if pk.len() < 8 || a.nrows() * pk.len() * b.ncols() < MIN_FLOPS {
        return a.dot(b);
    }
    let (Some(qa), Some(qb)) = (matrix_parity(a, pr, pk), matrix_parity(b, pk, pc)) else {
        return a.dot(b);
    };
    let split = |p: &[bool], want: bool| -> Vec<usize> { (0..p.len()).filter(|&i| p[i] == want).collect() };
    let mut c = Array2::<C64>::zeros((a.nrows(), b.ncols()));
    for q in [false, true] {
        let (rows, ks, cols) = (split(pr, qa ^ q), split(pk, q), split(pc, qb ^ q));
        if rows.is_empty() || ks.is_empty() || cols.is_empty() {
            continue;
        }
        let ab = a.select(ndarray::Axis(0), &rows).select(ndarray::Axis(1), &ks);
        let bb = b.select(ndarray::Axis(0), &ks).select(ndarray::Axis(1), &cols);
        let cb = ab.dot(&bb);
        for (i, &r) in rows.iter().enumerate() {
            for (j, &col) in cols.iter().enumerate() {
                c[[r, col]] = cb[[i, j]];
            }
        }
    }
    c
}

fn outer_2d(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    let (m, n) = (a.nrows(), b.ncols());
    Array2::from_shape_fn((m, n), |(i, j)| a[[i, 0]] * b[[0, j]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity_of(0), Parity::Even);
        assert_eq!(parity_of(0b101), Parity::Even);
        assert_eq!(parity_of(0b001), Parity::Odd);
    }

    #[test]
    fn identity_permutation_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = GrassmannTensor::random(vec![Leg::plain(2), Leg::dagger(1), Leg::plain(1)], false, &mut rng);
        assert_eq!(t.sign_permute(&[0, 1, 2]).unwrap(), t);
    }

    #[test]
    fn swapping_two_odd_legs_negates_odd_odd_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = GrassmannTensor::random(vec![Leg::plain(1), Leg::plain(1)], false, &mut rng);
        let s = t.sign_permute(&[1, 0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == 1 && j == 1 { -t.coeffs()[[i, j]] } else { t.coeffs()[[i, j]] };
                assert_eq!(s.coeffs()[[j, i]], want);
            }
        }
    }

    #[test]
    fn invalid_permutation_is_rejected() {
        let t = GrassmannTensor::identity(1);
        assert!(matches!(t.sign_permute(&[0]), Err(Error::InvalidPermutation { .. })));
        assert!(t.sign_permute(&[0, 0]).is_err());
    }

    #[test]
    fn single_generator_orthogonality() {
        let a = GrassmannTensor::new(
            vec![Leg::plain(1)],
            ArrayD::from_shape_vec(IxDyn(&[2]), vec![c(2.0, 0.0), c(3.0, 1.0)]).unwrap(),
            false,
        )
        .unwrap();
        let b = GrassmannTensor::new(
            vec![Leg::dagger(1)],
            ArrayD::from_shape_vec(IxDyn(&[2]), vec![c(5.0, 0.0), c(-1.0, 2.0)]).unwrap(),
            false,
        )
        .unwrap();
        let r = GrassmannTensor::contract(&a, 0, &b, 0).unwrap();
        let want = c(2.0, 0.0) * c(5.0, 0.0) + c(3.0, 1.0) * c(-1.0, 2.0);
        assert!((r.scalar_value().unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn contraction_with_identity_keeps_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = GrassmannTensor::random(vec![Leg::dagger(2), Leg::plain(1), Leg::plain(2)], false, &mut rng);
        let id = GrassmannTensor::identity(2);
        let r = GrassmannTensor::contract(&t, 2, &id, 0).unwrap();
        assert!(r.max_abs_diff(&t) < 1e-15);
    }

    #[test]
    fn mismatched_contractions_fail() {
        let a = GrassmannTensor::identity(1);
        let b = GrassmannTensor::identity(2);
        assert!(matches!(GrassmannTensor::contract(&a, 1, &b, 0), Err(Error::GeneratorMismatch(1, 2))));
        assert!(matches!(GrassmannTensor::contract(&a, 1, &a, 1), Err(Error::ConjugationMismatch)));
    }

    #[test]
    fn singleton_join_is_identity_and_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = GrassmannTensor::random(
            vec![Leg::plain(1), Leg::dagger(2), Leg::plain(2), Leg::dagger(1)],
            false,
            &mut rng,
        );
        let (j, plan) = t.join_legs(&[vec![0], vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(j, t);
        assert_eq!(j.split_legs(&plan).unwrap(), t);
        let (j, plan) = t.join_legs(&[vec![2, 0], vec![3, 1]]).unwrap();
        assert_eq!(j.legs(), &[Leg::plain(3), Leg::dagger(3)]);
        assert_eq!(j.split_legs(&plan).unwrap(), t);
    }

    #[test]
    fn mixed_group_is_rejected() {
        let t = GrassmannTensor::identity(1);
        assert!(matches!(t.join_legs(&[vec![0, 1]]), Err(Error::MixedConjugation)));
    }

    #[test]
    fn identity_norm_and_double_conjugation() {
        assert!((GrassmannTensor::identity(1).norm() - 2f64.sqrt()).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = GrassmannTensor::random(vec![Leg::dagger(1), Leg::plain(2), Leg::plain(1)], true, &mut rng);
        assert_eq!(t.conj().conj(), t);
        let full = GrassmannTensor::contract_pairs(&t, &t.conj(), &[(2, 0), (1, 1), (0, 2)]).unwrap();
        assert!((full.scalar_value().unwrap() - t.norm().powi(2)).norm() < 1e-12);
    }

    #[test]
    fn conj_of_odd_tensor_flips_sign_twice() {
        let t = GrassmannTensor::new(
            vec![Leg::dagger(1), Leg::plain(1)],
            ArrayD::from_shape_vec(IxDyn(&[2, 2]), vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)])
                .unwrap(),
            false,
        )
        .unwrap();
        assert_eq!(t.conj().conj(), t.scale(c(-1.0, 0.0)));
    }

    #[test]
    fn svd_of_rank_one_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = GrassmannTensor::random(vec![Leg::plain(2)], true, &mut rng);
        let b = GrassmannTensor::random(vec![Leg::dagger(2)], true, &mut rng);
        let t = GrassmannTensor::outer(&a, &b);
        let svd = t.svd(&[0], 8, 1e-14).unwrap();
        let s = svd.spectrum();
        assert_eq!(s.len(), 1);
        assert!((s[0] - t.norm()).abs() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_and_conserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = GrassmannTensor::random(
            vec![Leg::dagger(2), Leg::plain(1), Leg::plain(1), Leg::plain(2)],
            true,
            &mut rng,
        );
        let svd = t.svd(&[0, 1], 64, 1e-14).unwrap();
        assert_eq!(svd.discarded_weight, 0.0);
        let r = GrassmannTensor::contract(&svd.us(), 2, &svd.v, 0).unwrap();
        assert!(r.max_abs_diff(&t) < 1e-12);
        let w: f64 = svd.s.iter().map(|x| x * x).sum();
        assert!((w - t.norm().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn svd_truncation_respects_sector_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = GrassmannTensor::random(vec![Leg::dagger(3), Leg::plain(3)], true, &mut rng);
        let svd = t.svd(&[0], 4, 0.0).unwrap();
        assert_eq!(svd.spectrum().len(), 4);
        let even = (0..svd.s.len()).filter(|&k| svd.s[k] > 0.0 && k.count_ones() % 2 == 0).count();
        assert_eq!(even, 2);
        assert_eq!(svd.u.leg(1), Leg::plain(2));
        let all = t.singular_values(&[0]).unwrap();
        let dropped: f64 = all.iter().map(|x| x * x).sum::<f64>() - svd.s.iter().map(|x| x * x).sum::<f64>();
        assert!((dropped - svd.discarded_weight).abs() < 1e-10);
    }

    #[test]
    fn svd_rejects_odd_and_bad_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = GrassmannTensor::random(vec![Leg::dagger(1), Leg::plain(1)], false, &mut rng);
        assert!(matches!(t.svd(&[0], 4, 0.0), Err(Error::NotEven)));
        let e = GrassmannTensor::identity(1);
        assert!(matches!(e.svd(&[], 4, 0.0), Err(Error::BadRowLegs)));
        assert!(matches!(e.svd(&[0, 1], 4, 0.0), Err(Error::BadRowLegs)));
        let z = GrassmannTensor::zeros(vec![Leg::dagger(1), Leg::plain(1)], true);
        assert!(matches!(z.svd(&[0], 4, 0.0), Err(Error::EmptySpectrum)));
    }

    #[test]
    fn dense_matrix_limit() {
        let t = GrassmannTensor::zeros(vec![Leg::dagger(5), Leg::plain(4)], true);
        assert!(matches!(t.to_dense_matrix(&[0], &[1]), Err(Error::SizeLimit(_))));
    }
}
