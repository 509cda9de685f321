//! Index sequences (i_s) for the Hoeffding transitivity construction.
//!
//! A prefix i_1 < … < i_n is usable at level ε when the carry bands
//! E_s = {x_i = m_i − 1 for i_s < i < i_{s+1}} have total mass below ε and
//! exp(−(2/9n)(Σ θ_{i_s})²) < ε, i.e. (Σθ)²/n > 4.5 ln(1/ε).

use serde::Serialize;

/// (Σθ)²/n must exceed this for the tail bound exp(−(2/9n)(Σθ)²) < ε.
pub fn hoeffding_threshold(epsilon: f64) -> f64 {
    4.5 * (1.0 / epsilon).ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct Strategy {
    /// how the indices were chosen, e.g. "power 1.40 from s=8"
    pub rule: String,
    pub indices: Vec<usize>,
    pub thetas: Vec<f64>,
    /// Σ_{s<n} ∏_{i_s<i<i_{s+1}} μ_i(m_i − 1)
    pub gap_sum: f64,
    /// (Σθ)²/n
    pub statistic: f64,
}

/// Per-index data the search needs, 1-based in the accessors.
#[derive(Debug, Clone)]
pub struct StrategyInput {
    /// prefix[k] = Σ_{i≤k} ln μ_i(m_i − 1)
    prefix: Vec<f64>,
    theta: Vec<f64>,
}

impl StrategyInput {
    /// `last[i-1]` = μ_i(m_i − 1), `theta[i-1]` = θ_i.
    pub fn new(last: &[f64], theta: &[f64]) -> Self {
        assert_eq!(last.len(), theta.len());
        let mut prefix = vec![0.0; last.len() + 1];
        for (k, l) in last.iter().enumerate() {
            prefix[k + 1] = prefix[k] + l.ln();
        }
        StrategyInput { prefix, theta: theta.to_vec() }
    }

    pub fn horizon(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.theta[i - 1]
    }

    /// ∏_{a<i<b} μ_i(m_i − 1); 1 for adjacent indices.
    pub fn gap(&self, a: usize, b: usize) -> f64 {
        debug_assert!(a < b);
        (self.prefix[b - 1] - self.prefix[a]).exp()
    }

    pub fn evaluate(&self, rule: String, indices: Vec<usize>) -> Strategy {
        let thetas: Vec<f64> = indices.iter().map(|&i| self.theta(i)).collect();
        let gap_sum = indices.windows(2).map(|w| self.gap(w[0], w[1])).sum();
        let total: f64 = thetas.iter().sum();
        let statistic = if indices.is_empty() { 0.0 } else { total * total / indices.len() as f64 };
        Strategy { rule, indices, thetas, gap_sum, statistic }
    }
}

impl Strategy {
    pub fn feasible(&self, epsilon: f64) -> bool {
        self.gap_sum < epsilon && self.statistic > hoeffding_threshold(epsilon)
    }
}

/// Shortest usable prefix of `candidates`, scanning prefix lengths in order.
fn first_feasible_prefix(input: &StrategyInput, candidates: &[usize], epsilon: f64) -> Option<usize> {
    let threshold = hoeffding_threshold(epsilon);
    let mut gap_sum = 0.0;
    let mut total = 0.0;
    for (n, &i) in candidates.iter().enumerate() {
        if n > 0 {
            gap_sum += input.gap(candidates[n - 1], i);
            if gap_sum >= epsilon {
                return None;
            }
        }
        total += input.theta(i);
        if total * total / (n + 1) as f64 > threshold {
            return Some(n + 1);
        }
    }
    None
}

/// i_s = ⌊s^β⌋ for s ≥ s0, capped at the horizon.
pub fn power_indices(beta: f64, s0: usize, horizon: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut s = s0.max(1);
    loop {
        let i = (s as f64).powf(beta).floor() as usize;
        if i > horizon {
            break;
        }
        if out.last().map_or(true, |&l| i > l) {
            out.push(i);
        }
        s += 1;
    }
    out
}

/// Starting points tried per rule.
const MAX_STARTS: usize = 256;

/// Power sequences over a β grid and every start s0, then a greedy rule that
/// keeps the s-th carry band below ε·2^{−s−1} while taking the next index
/// whose θ clears a floor. Returns the usable strategy with the fewest indices.
pub fn search(input: &StrategyInput, epsilon: f64) -> Option<Strategy> {
    let h = input.horizon();
    let starts = h.min(MAX_STARTS);
    let mut best: Option<(usize, String, Vec<usize>)> = None;
    let consider = |rule: String, candidates: Vec<usize>, best: &mut Option<(usize, String, Vec<usize>)>| {
        if let Some(n) = first_feasible_prefix(input, &candidates, epsilon) {
            if best.as_ref().map_or(true, |(b, _, _)| n < *b) {
                *best = Some((n, rule, candidates[..n].to_vec()));
            }
        }
    };
    for step in 0..=20 {
        let beta = 1.0 + step as f64 * 0.05;
        for s0 in 1..=starts {
            let first = (s0 as f64).powf(beta).floor() as usize;
            if first > h {
                break;
            }
            consider(format!("power {beta:.2} from s={s0}"), power_indices(beta, s0, h), &mut best);
        }
    }
    let max_theta = input.theta.iter().cloned().fold(0.0, f64::max);
    for floor in [0.0, 0.25, 0.5, 0.75].map(|f| f * max_theta) {
        for start in 1..=starts {
            if input.theta(start) <= floor || input.theta(start) == 0.0 {
                continue;
            }
            let mut picks = vec![start];
            let mut i = start + 1;
            while i <= h {
                let s = picks.len();
                let last = *picks.last().unwrap();
                if input.theta(i) > floor && input.gap(last, i) <= epsilon * 0.5f64.powi(s as i32 + 1) {
                    picks.push(i);
                }
                i += 1;
            }
            consider(format!("greedy floor {floor:.4} from i={start}"), picks, &mut best);
        }
    }
    best.map(|(_, rule, indices)| input.evaluate(rule, indices))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_products_skip_the_endpoints() {
        let input = StrategyInput::new(&[0.5, 0.25, 0.5, 0.1], &[0.0; 4]);
        assert!((input.gap(1, 4) - 0.125).abs() < 1e-15);
        assert_eq!(input.gap(2, 3), 1.0);
    }

    #[test]
    fn constant_drop_is_eventually_usable() {
        // binary weights (3/4, 1/4): θ = 1/2 everywhere, bands of mass 4^{-gap}
        let h = 400;
        let input = StrategyInput::new(&vec![0.25; h], &vec![0.5; h]);
        let s = search(&input, 0.1).expect("a strategy exists");
        assert!(s.feasible(0.1));
        assert!(s.indices.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn zero_drop_is_never_usable() {
        let input = StrategyInput::new(&vec![0.5; 100], &vec![0.0; 100]);
        assert!(search(&input, 0.1).is_none());
    }
}
