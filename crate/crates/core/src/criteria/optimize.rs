//! Exact optimizers for the per-coordinate criterion quantities.
//!
//! All functions take one weight vector μ over ⟦0, m−1⟧.

use std::cmp::Ordering;

use num_integer::Integer;
use serde::Serialize;

use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    ClosedForm,
    Dp,
    BruteForce,
    BranchAndBound,
    /// node budget exhausted; the value is the best set found, a lower bound
    SearchLowerBound,
}

impl Optimizer {
    pub fn tag(self) -> &'static str {
        match self {
            Optimizer::ClosedForm => "closed-form",
            Optimizer::Dp => "dp",
            Optimizer::BruteForce => "brute-force",
            Optimizer::BranchAndBound => "branch-and-bound",
            Optimizer::SearchLowerBound => "search-lower-bound",
        }
    }
}

/// η = max weight.
pub fn eta<S: Scalar>(mu: &[S]) -> S {
    mu.iter().cloned().fold(S::zero(), S::max_of)
}

/// δ = min weight.
pub fn delta<S: Scalar>(mu: &[S]) -> S {
    mu.iter().cloned().reduce(S::min_of).unwrap_or_else(S::zero)
}

fn shifted(j: usize, k: u64, m: usize) -> usize {
    (j + (k % m as u64) as usize) % m
}

/// sup_D μ(D) − μ(D+k) for a fixed shift, addition mod m. The optimal D
/// collects every j with μ(j) > μ(j+k).
pub fn theta_shift<S: Scalar>(mu: &[S], k: u64) -> S {
    let m = mu.len();
    let mut s = S::zero();
    for j in 0..m {
        let d = mu[j].clone() - mu[shifted(j, k, m)].clone();
        if d > S::zero() {
            s += d;
        }
    }
    s
}

/// The maximizing set of [`theta_shift`].
pub fn drop_set<S: Scalar>(mu: &[S], k: u64) -> Vec<bool> {
    let m = mu.len();
    (0..m).map(|j| mu[j] > mu[shifted(j, k, m)]).collect()
}

/// θ = max over k ∈ ⟦1, m−1⟧ of [`theta_shift`], with the first maximizing k.
pub fn theta<S: Scalar>(mu: &[S]) -> (S, u64) {
    let mut best = (S::zero(), 1);
    for k in 1..mu.len() as u64 {
        let v = theta_shift(mu, k);
        if v > best.0 {
            best = (v, k);
        }
    }
    best
}

/// θ exactly with its shift for m ≤ `limit`; above it, the best of a few
/// candidate shifts (a lower bound, flagged by `false`).
pub fn theta_pick<S: Scalar>(mu: &[S], limit: u64) -> (S, u64, bool) {
    let m = mu.len() as u64;
    if m <= limit {
        let (v, k) = theta(mu);
        return (v, k, true);
    }
    let argmax = (0..mu.len()).fold(0, |a, j| if mu[j] > mu[a] { j } else { a }) as u64;
    let argmin = (0..mu.len()).fold(0, |a, j| if mu[j] < mu[a] { j } else { a }) as u64;
    let mut best = (S::zero(), 1, false);
    for k in [1, m - 1, m / 2, (argmin + m - argmax) % m] {
        if k % m == 0 {
            continue;
        }
        let v = theta_shift(mu, k);
        if v > best.0 {
            best = (v, k, false);
        }
    }
    best
}

/// Max-weight independent set on a path; returns the weight and the chosen positions.
pub fn path_mwis<S: Scalar>(w: &[S]) -> (S, Vec<bool>) {
    let n = w.len();
    if n == 0 {
        return (S::zero(), Vec::new());
    }
    // best[i] = optimum over w[..i]
    let mut best = vec![S::zero(); n + 1];
    best[1] = w[0].clone();
    for i in 2..=n {
        let take = best[i - 2].clone() + w[i - 1].clone();
        best[i] = S::max_of(best[i - 1].clone(), take);
    }
    let mut chosen = vec![false; n];
    let mut i = n;
    while i >= 1 {
        let take = if i >= 2 { best[i - 2].clone() } else { S::zero() } + w[i - 1].clone();
        if take >= best[i - 1] && take == best[i] {
            chosen[i - 1] = true;
            i = i.saturating_sub(2);
        } else {
            i -= 1;
        }
    }
    (best[n].clone(), chosen)
}

/// Heaviest D ⊂ ⟦0, m−1⟧ with (D+j) ∩ D = ∅, addition in ℤ₊: the vertices
/// split into chains r, r+j, r+2j, … and each chain is a path.
pub fn disjoint_set_zplus<S: Scalar>(mu: &[S], j: u64) -> (S, Vec<bool>) {
    let m = mu.len();
    let j = j as usize;
    assert!(j >= 1, "shift must be positive");
    let mut total = S::zero();
    let mut set = vec![false; m];
    for r in 0..j.min(m) {
        let chain: Vec<usize> = (r..m).step_by(j).collect();
        let w: Vec<S> = chain.iter().map(|&x| mu[x].clone()).collect();
        let (v, pick) = path_mwis(&w);
        total += v;
        for (x, p) in chain.into_iter().zip(pick) {
            set[x] = p;
        }
    }
    (total, set)
}

/// κ = min over j ∈ ⟦1, m−1⟧ of [`disjoint_set_zplus`], with the minimizing j.
pub fn kappa<S: Scalar>(mu: &[S]) -> (S, u64) {
    let mut best: Option<(S, u64)> = None;
    for j in 1..mu.len() as u64 {
        let (v, _) = disjoint_set_zplus(mu, j);
        if best.as_ref().map_or(true, |(b, _)| v < *b) {
            best = Some((v, j));
        }
    }
    best.unwrap_or((S::zero(), 1))
}

/// Max-weight independent set on a cycle given in traversal order.
fn cycle_mwis<S: Scalar>(w: &[S]) -> (S, Vec<bool>) {
    let n = w.len();
    match n {
        0 => (S::zero(), Vec::new()),
        // a self-loop: the vertex meets its own translate
        1 => (S::zero(), vec![false]),
        2 => {
            if w[0] >= w[1] {
                (w[0].clone(), vec![true, false])
            } else {
                (w[1].clone(), vec![false, true])
            }
        }
        _ => {
            // either vertex 0 is skipped, or it is taken and both neighbours are skipped
            let (skip_v, skip_pick) = path_mwis(&w[1..]);
            let (inner_v, inner_pick) = path_mwis(&w[2..n - 1]);
            let take_v = w[0].clone() + inner_v;
            if take_v > skip_v {
                let mut pick = vec![false; n];
                pick[0] = true;
                for (k, p) in inner_pick.into_iter().enumerate() {
                    pick[k + 2] = p;
                }
                (take_v, pick)
            } else {
                let mut pick = vec![false; n];
                for (k, p) in skip_pick.into_iter().enumerate() {
                    pick[k + 1] = p;
                }
                (skip_v, pick)
            }
        }
    }
}

/// Heaviest D with (D+n) ∩ D = ∅, addition mod m: the circulant graph is a
/// union of gcd(n, m) cycles of length m / gcd(n, m).
pub fn disjoint_set_cyclic<S: Scalar>(mu: &[S], n: u64) -> (S, Vec<bool>) {
    let m = mu.len() as u64;
    let step = n % m;
    let mut set = vec![false; m as usize];
    if step == 0 {
        return (S::zero(), set);
    }
    let g = step.gcd(&m);
    let len = m / g;
    let mut total = S::zero();
    for r in 0..g {
        let order: Vec<usize> = (0..len).map(|t| ((r + t * step) % m) as usize).collect();
        let w: Vec<S> = order.iter().map(|&x| mu[x].clone()).collect();
        let (v, pick) = cycle_mwis(&w);
        total += v;
        for (x, p) in order.into_iter().zip(pick) {
            set[x] = p;
        }
    }
    (total, set)
}

/// α_{·,n}.
pub fn alpha<S: Scalar>(mu: &[S], n: u64) -> S {
    disjoint_set_cyclic(mu, n).0
}

/// β = max over n ∈ ⟦1, m−1⟧ of α, with the first maximizing n.
pub fn beta<S: Scalar>(mu: &[S]) -> (S, u64) {
    let mut best = (S::zero(), 1);
    for n in 1..mu.len() as u64 {
        let v = alpha(mu, n);
        if v > best.0 {
            best = (v, n);
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct GammaChoice<S: Scalar> {
    pub value: S,
    pub shift: u64,
    /// D; the value is min(μ(D), 1 − μ(D+shift)) with addition mod m
    pub set: Vec<bool>,
    pub optimizer: Optimizer,
}

/// Alphabets up to this size are searched exhaustively.
pub const GAMMA_BRUTE_LIMIT: usize = 16;
/// Node budget of the branch-and-bound search, shared by all shifts of one
/// alphabet. Geometric weights (subset sums of powers of two) defeat the LP
/// bound, and the search then stops with a certified lower bound.
pub const GAMMA_NODE_BUDGET: u64 = 1_000_000;

fn gamma_value<S: Scalar>(mu: &[S], set: &[bool], j: u64) -> S {
    let m = mu.len();
    let mut a = S::zero();
    let mut b = S::zero();
    for x in 0..m {
        if set[x] {
            a += mu[x].clone();
            b += mu[shifted(x, j, m)].clone();
        }
    }
    S::min_of(a, S::one() - b)
}

/// γ for a single shift j.
pub fn gamma_for_shift<S: Scalar>(mu: &[S], j: u64) -> GammaChoice<S> {
    if mu.len() <= GAMMA_BRUTE_LIMIT {
        gamma_exhaustive(mu, j)
    } else {
        gamma_search(mu, j, GAMMA_NODE_BUDGET)
    }
}

/// γ = max over j ∈ ⟦1, m−1⟧ and D of min(μ(D), 1 − μ(D+j)), addition mod m.
pub fn gamma_odometer<S: Scalar>(mu: &[S]) -> GammaChoice<S> {
    let mut best: Option<GammaChoice<S>> = None;
    let mut certified = true;
    let per_shift = (GAMMA_NODE_BUDGET / mu.len().max(2) as u64).max(1000);
    for j in 1..mu.len() as u64 {
        let c = if mu.len() <= GAMMA_BRUTE_LIMIT { gamma_exhaustive(mu, j) } else { gamma_search(mu, j, per_shift) };
        certified &= c.optimizer != Optimizer::SearchLowerBound;
        if best.as_ref().map_or(true, |b| c.value > b.value) {
            best = Some(c);
        }
    }
    let mut best = best.expect("alphabet has at least two symbols");
    if !certified {
        best.optimizer = Optimizer::SearchLowerBound;
    }
    best
}

/// Exhaustive search over all 2^m subsets. Candidates are screened in
/// double precision and the survivors re-evaluated exactly.
pub fn gamma_exhaustive<S: Scalar>(mu: &[S], j: u64) -> GammaChoice<S> {
    let m = mu.len();
    assert!(m <= 24, "exhaustive γ limited to small alphabets");
    let w: Vec<f64> = mu.iter().map(|x| x.as_f64()).collect();
    let full = (1u32 << m) - 1;
    let mut sums = vec![0.0f64; 1 << m];
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        sums[mask as usize] = sums[(mask & (mask - 1)) as usize] + w[low];
    }
    let r = (j % m as u64) as u32;
    let rotate = |mask: u32| ((mask << r) | (mask >> (m as u32 - r))) & full;
    let approx = |mask: u32| sums[mask as usize].min(1.0 - sums[rotate(mask) as usize]);
    let top = (0..=full).map(approx).fold(f64::NEG_INFINITY, f64::max);
    let mut best: Option<(S, u32)> = None;
    for mask in 0..=full {
        if approx(mask) < top - 1e-9 {
            continue;
        }
        let set: Vec<bool> = (0..m).map(|x| mask >> x & 1 == 1).collect();
        let v = gamma_value(mu, &set, j);
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, mask));
        }
    }
    let (value, mask) = best.expect("the empty set is always a candidate");
    GammaChoice { value, shift: j, set: (0..m).map(|x| mask >> x & 1 == 1).collect(), optimizer: Optimizer::BruteForce }
}

/// Items with identical (μ(x), μ(x+j)) are interchangeable, so the search
/// branches on how many members of each such group to take.
struct Group<S: Scalar> {
    a: S,
    b: S,
    af: f64,
    bf: f64,
    members: Vec<usize>,
}

/// Margin above double-precision rounding of sums of at most a few
/// thousand terms in [0, 1].
const SCREEN_MARGIN: f64 = 1e-9;

struct Search<'a, S: Scalar> {
    groups: &'a [Group<S>],
    best: S,
    best_f: f64,
    best_take: Vec<usize>,
    take: Vec<usize>,
    nodes: u64,
    budget: u64,
}

/// LP relaxation over the undecided groups, taken greedily in ratio order
/// until A reaches 1 − B. Written once for both precisions.
macro_rules! lp_bound {
    ($groups:expr, $a0:expr, $b0:expr, $one:expr, $count:expr, $ga:ident, $gb:ident) => {{
        let mut a = $a0;
        let mut b = $b0;
        if a >= $one - b.clone() {
            $one - b
        } else {
            let mut out = None;
            for g in $groups {
                let n = $count(g.members.len());
                let na = a.clone() + g.$ga.clone() * n.clone();
                let nb = b.clone() + g.$gb.clone() * n;
                if na <= $one - nb.clone() {
                    a = na;
                    b = nb;
                } else {
                    let t = ($one - b.clone() - a.clone()) / (g.$ga.clone() + g.$gb.clone());
                    out = Some(a.clone() + t * g.$ga.clone());
                    break;
                }
            }
            out.unwrap_or(a)
        }
    }};
}

impl<S: Scalar> Search<'_, S> {
    fn visit(&mut self, depth: usize, a: S, b: S, af: f64, bf: f64) {
        self.nodes += 1;
        let here_f = af.min(1.0 - bf);
        if here_f > self.best_f - SCREEN_MARGIN {
            let here = S::min_of(a.clone(), S::one() - b.clone());
            if here > self.best {
                self.best_f = here.as_f64();
                self.best = here;
                self.best_take = self.take.clone();
            }
        }
        if depth == self.groups.len() || self.nodes > self.budget {
            return;
        }
        let rest = &self.groups[depth..];
        let bound_f: f64 = lp_bound!(rest, af, bf, 1.0, |n: usize| n as f64, af, bf);
        if bound_f < self.best_f - SCREEN_MARGIN {
            return;
        }
        if bound_f <= self.best_f + SCREEN_MARGIN {
            // near a tie: settle it exactly
            let bound: S = lp_bound!(rest, a.clone(), b.clone(), S::one(), |n: usize| S::from_int(n as i64), a, b);
            if bound <= self.best {
                return;
            }
        }
        let g = &self.groups[depth];
        let (ga, gb, gaf, gbf, size) = (g.a.clone(), g.b.clone(), g.af, g.bf, g.members.len());
        for c in (0..=size).rev() {
            let n = S::from_int(c as i64);
            self.take[depth] = c;
            self.visit(
                depth + 1,
                a.clone() + ga.clone() * n.clone(),
                b.clone() + gb.clone() * n,
                af + gaf * c as f64,
                bf + gbf * c as f64,
            );
        }
        self.take[depth] = 0;
    }
}

/// Branch and bound for a fixed shift. Groups are sorted by μ(x)/μ(x+j);
/// the incumbent starts from the best prefix of that order. Pruning is
/// screened in double precision and decided exactly near ties.
pub fn gamma_search<S: Scalar>(mu: &[S], j: u64, budget: u64) -> GammaChoice<S> {
    let m = mu.len();
    let mut groups: Vec<Group<S>> = Vec::new();
    for x in 0..m {
        let (a, b) = (mu[x].clone(), mu[shifted(x, j, m)].clone());
        match groups.iter_mut().find(|g| g.a == a && g.b == b) {
            Some(g) => g.members.push(x),
            None => groups.push(Group { af: a.as_f64(), bf: b.as_f64(), a, b, members: vec![x] }),
        }
    }
    groups.sort_by(|p, q| {
        let lhs = p.a.clone() * q.b.clone();
        let rhs = q.a.clone() * p.b.clone();
        rhs.partial_cmp(&lhs).unwrap_or(Ordering::Equal)
    });
    // incumbent: best prefix of the ratio order, item by item
    let mut best = S::zero();
    let mut best_take = vec![0; groups.len()];
    let mut take = vec![0; groups.len()];
    let (mut sa, mut sb) = (S::zero(), S::zero());
    for (gi, g) in groups.iter().enumerate() {
        for _ in 0..g.members.len() {
            sa += g.a.clone();
            sb += g.b.clone();
            take[gi] += 1;
            let v = S::min_of(sa.clone(), S::one() - sb.clone());
            if v > best {
                best = v;
                best_take = take.clone();
            }
        }
    }
    let mut search =
        Search { groups: &groups, best_f: best.as_f64(), best, best_take, take: vec![0; groups.len()], nodes: 0, budget };
    search.visit(0, S::zero(), S::zero(), 0.0, 0.0);
    let optimizer = if search.nodes > budget { Optimizer::SearchLowerBound } else { Optimizer::BranchAndBound };
    let mut set = vec![false; m];
    for (g, &c) in groups.iter().zip(&search.best_take) {
        for &x in &g.members[..c] {
            set[x] = true;
        }
    }
    GammaChoice { value: search.best, shift: j, set, optimizer }
}

/// μ of the integer interval ⟦⌈lower⌉, m−1⟧ clipped to the alphabet.
pub fn tail_weight<S: Scalar>(mu: &[S], lower: &Rational) -> S {
    let m = mu.len() as i64;
    let start = lower.ceil().to_integer();
    let start: i64 = if start < 0.into() {
        0
    } else if start >= m.into() {
        return S::zero();
    } else {
        i64::try_from(start).unwrap_or(m)
    };
    mu[start as usize..].iter().cloned().fold(S::zero(), |s, x| s + x)
}

/// ω(κ) = μ(⟦m − 1 − κ m m_next, m − 1⟧).
pub fn omega<S: Scalar>(mu: &[S], m_next: u64, kappa: &Rational) -> S {
    let m = mu.len() as i64;
    let lower = Rational::from_integer((m - 1).into()) - kappa * Rational::from_integer((m as i128 * m_next as i128).into());
    tail_weight(mu, &lower)
}

/// sup over I of (Σ_{i∈I} θ_i)² / #I: for each size t the t largest values
/// are optimal, so a prefix scan of the sorted values suffices. Returns the
/// value and the chosen positions.
pub fn gamma_tilde<S: Scalar>(values: &[S]) -> (S, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&x, &y| values[y].partial_cmp(&values[x]).unwrap_or(Ordering::Equal));
    let mut best = S::zero();
    let mut best_t = 0;
    let mut sum = S::zero();
    for (t, &x) in order.iter().enumerate() {
        sum += values[x].clone();
        let v = sum.clone() * sum.clone() / S::from_int(t as i64 + 1);
        if v > best {
            best = v;
            best_t = t + 1;
        }
    }
    let mut chosen: Vec<usize> = order[..best_t].to_vec();
    chosen.sort_unstable();
    (best, chosen)
}
