//! Frequent hypercyclicity of weighted shifts: F finite, E = ⋃_{k≤κd} (F + n + k),
//! B = E + dℤ. For every 0 ≤ k ≤ κd: (B − k) ∩ F = ∅ and F ⊂ B − (n + k).

use serde_json::json;

use super::*;
use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::shift::{total_mass, PeriodicSet, WindowSet};
use crate::spec::ShiftSpec;

#[derive(Debug, Clone)]
pub struct ShiftFhcParams {
    /// F = ⟦lo, hi⟧ ∩ index set
    pub f_lo: i64,
    pub f_hi: i64,
    pub period: u64,
    pub kappa: Rational,
    pub n: u64,
    /// materialized window ⟦lo, hi⟧; default covers every translate used
    pub window: Option<(i64, i64)>,
}

impl Default for ShiftFhcParams {
    fn default() -> Self {
        ShiftFhcParams { f_lo: -3, f_hi: 3, period: 200, kappa: crate::scalar::rat(3, 20), n: 90, window: None }
    }
}

pub fn shift_fhc_witness<S: Scalar>(spec: &ShiftSpec, p: &ShiftFhcParams) -> Result<WitnessReport> {
    let f = WindowSet::interval(p.f_lo, p.f_hi).translate(0, spec.index);
    if f.is_empty() {
        return Err(Error::Domain("F is empty inside the index set".into()));
    }
    let d = p.period as i64;
    let kd: i64 = (Rational::from_integer(d.into()) * &p.kappa).floor().to_integer().try_into().unwrap_or(0);
    let n = p.n as i64;
    let e = (0..=kd).fold(WindowSet::default(), |acc, k| acc.union(&f.translate(n + k, spec.index)));
    let b = PeriodicSet::generated(&e, p.period, spec.index);
    let (f_min, f_max) = (f.min().unwrap(), f.max().unwrap());
    let needed = (f_min, f_max + n + kd);
    let (lo, hi) = p.window.unwrap_or((needed.0 - d, needed.1 + d));
    if lo > needed.0 || hi < needed.1 {
        return Err(Error::WindowTooSmall(format!("window [{lo}, {hi}] must contain [{}, {}]", needed.0, needed.1)));
    }

    let kappa = S::from_rational(&p.kappa);
    let d_s = S::from_int(d);
    let n_s = S::from_int(n);
    let mut checks = vec![
        Check::compare("kappa < 1/6", &kappa, Relation::Lt, &S::from_ratio(1, 6), Method::Exact),
        Check::compare("3 kappa d <= n", &(S::from_int(3) * kappa.clone() * d_s.clone()), Relation::Le, &n_s, Method::Exact),
        Check::compare("n <= 4 kappa d", &n_s, Relation::Le, &(S::from_int(4) * kappa * d_s), Method::Exact),
    ];

    // route 1: residue arithmetic on the periodic set
    let (mut hit, mut miss) = (0u64, 0u64);
    for k in 0..=kd {
        for &x in &f.0 {
            hit += b.contains_preimage(x, k) as u64;
            miss += (!b.contains_preimage(x, n + k)) as u64;
        }
    }
    checks.push(Check::no_violations("(B - k) and F disjoint, residue test", hit, Method::Exact));
    checks.push(Check::no_violations("F inside B - (n+k), residue test", miss, Method::Exact));

    // route 2: materialize B on the window and translate explicitly
    let window = b.window(lo, hi);
    let (mut hit_w, mut miss_w) = (0u64, 0u64);
    for k in 0..=kd {
        hit_w += window.translate(-k, spec.index).intersect(&f).len() as u64;
        miss_w += (!f.is_subset(&window.translate(-(n + k), spec.index))) as u64;
    }
    checks.push(Check::no_violations("(B - k) and F disjoint, window", hit_w, Method::Exact));
    checks.push(Check::no_violations("F inside B - (n+k), window", miss_w, Method::Exact));

    let mut params = json!({
        "F": [f_min, f_max],
        "d": d,
        "kappa": p.kappa.to_string(),
        "kappa_d": kd,
        "n": n,
        "E": [e.min(), e.max(), e.len()],
        "residues": b.residues.len(),
        "window": [lo, hi],
    });
    // with geometric weights every measure has a closed form
    if let Some(total) = total_mass::<S>(spec) {
        let outside = total - f.measure::<S>(spec);
        let mut worst_in = S::zero();
        let mut worst_full = None::<S>;
        for k in [0, kd] {
            if let (Some(a), Some(c)) = (b.preimage_measure::<S>(spec, k), b.preimage_measure::<S>(spec, n + k)) {
                worst_in = S::max_of(worst_in, a);
                worst_full = Some(match worst_full {
                    Some(w) => S::min_of(w, c),
                    None => c,
                });
            }
        }
        checks.push(Check::compare("mu(B - k) <= mu(Omega \\ F) at k = 0, kappa d", &worst_in, Relation::Le, &outside, Method::Exact));
        if let Some(w) = worst_full {
            let f_mass = f.measure::<S>(spec);
            checks.push(Check::compare("mu(B - (n+k)) >= mu(F) at k = 0, kappa d", &w, Relation::Ge, &f_mass, Method::Exact));
        }
        params["mu_outside_f"] = json!(outside.render());
    }
    Ok(WitnessReport::new("shift-fhc", params, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::spec::{IndexSet, ShiftWeights};

    fn two_sided() -> ShiftSpec {
        ShiftSpec { index: IndexSet::Z, weights: ShiftWeights::Geometric { base: rat(1, 2) } }
    }

    #[test]
    fn default_parameters_pass_on_both_routes() {
        let rep = shift_fhc_witness::<Rational>(&two_sided(), &ShiftFhcParams::default()).unwrap();
        assert!(rep.pass, "{:?}", rep.failed());
        assert_eq!(rep.params["mu_outside_f"], "1/4");
    }

    #[test]
    fn short_shift_breaks_the_construction() {
        // n far below 3κd: B − k meets F
        let p = ShiftFhcParams { n: 2, ..Default::default() };
        let rep = shift_fhc_witness::<Rational>(&two_sided(), &p).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn narrow_window_is_rejected() {
        let p = ShiftFhcParams { window: Some((-3, 50)), ..Default::default() };
        assert!(matches!(shift_fhc_witness::<f64>(&two_sided(), &p), Err(Error::WindowTooSmall(_))));
    }
}
