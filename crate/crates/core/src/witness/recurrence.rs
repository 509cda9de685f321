//! Runaway sets for supercyclicity: μ(φ^n B) μ(φ^{-n} B) < ε with
//! μ(Ω ∖ B) < ε, and the finite-measure form B ∩ φ^n(B) = ∅.

use num_bigint::BigInt;
use serde_json::json;

use super::*;
use crate::criteria::optimize;
use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::spec::SystemSpec;
use crate::transport::ProductView;

/// μ(φ^n B) · μ(φ^{-n} B) for a product set given by masks.
pub fn src_evaluate<S: Scalar>(view: &ProductView<S>, masks: &[Vec<bool>], n: &BigInt) -> Result<S> {
    Ok(view.forward_image_measure(masks, n)? * view.preimage_measure(masks, n)?)
}

/// Prefix intervals, suffix intervals, drop sets and ℤ₊-disjoint sets of
/// one coordinate, without duplicates.
fn coordinate_family<S: Scalar>(mu: &[S]) -> Vec<Vec<bool>> {
    let m = mu.len();
    let mut out: Vec<Vec<bool>> = Vec::new();
    let mut push = |mask: Vec<bool>| {
        if mask.iter().any(|b| *b) && !out.contains(&mask) {
            out.push(mask);
        }
    };
    for a in 0..m {
        push((0..m).map(|x| x <= a).collect());
        push((0..m).map(|x| x >= a).collect());
    }
    for k in 1..m as u64 {
        push(optimize::drop_set(mu, k));
        push(optimize::disjoint_set_zplus(mu, k).1);
    }
    out
}

/// Scans single-coordinate cylinders and adjacent pairs over the first
/// `depth` coordinates, for 1 ≤ n ≤ `horizon`.
pub fn src_search<S: Scalar>(spec: &SystemSpec, epsilon: &Rational, depth: usize, horizon: u64) -> Result<WitnessReport> {
    let view = ProductView::<S>::new(spec, depth)?;
    let eps = S::from_rational(epsilon);
    let floor = S::one() - eps.clone();
    let families: Vec<Vec<Vec<bool>>> = view.coords.iter().map(|mu| coordinate_family(mu)).collect();
    let mut candidates: Vec<(Vec<Vec<bool>>, S)> = Vec::new();
    let full = |i: usize| vec![true; view.radices[i] as usize];
    for i in 0..depth {
        for set in &families[i] {
            let w = mask_measure(&view.coords[i], set);
            if w > floor {
                let mut masks: Vec<Vec<bool>> = (0..i).map(full).collect();
                masks.push(set.clone());
                candidates.push((masks, w));
            }
        }
        if i + 1 < depth {
            for a in &families[i] {
                for b in &families[i + 1] {
                    let w = mask_measure(&view.coords[i], a) * mask_measure(&view.coords[i + 1], b);
                    if w > floor && a.iter().any(|x| !x) && b.iter().any(|x| !x) {
                        let mut masks: Vec<Vec<bool>> = (0..i).map(full).collect();
                        masks.push(a.clone());
                        masks.push(b.clone());
                        candidates.push((masks, w));
                    }
                }
            }
        }
    }
    let zero = BigInt::from(0);
    let tried = candidates.len();
    for n in 1..=horizon {
        let nb = BigInt::from(n);
        for (masks, w) in &candidates {
            let overlap = view.boolean_measure(&[(zero.clone(), masks), (nb.clone(), masks)], |b| b == 3)?;
            if !overlap.is_zero() {
                continue;
            }
            let product = src_evaluate(&view, masks, &nb)?;
            let outside = S::one() - w.clone();
            let checks = vec![
                Check::compare("mu(Omega \\ B) < eps", &outside, Relation::Lt, &eps, Method::Exact),
                Check::compare("mu(phi^n B) mu(phi^-n B) < eps", &product, Relation::Lt, &eps, Method::Exact),
                Check::compare("mu(B and phi^-n B) = 0", &overlap, Relation::Eq, &S::zero(), Method::Exact),
            ];
            let sets: Vec<_> = masks.iter().map(|m| if m.iter().all(|b| *b) { json!("full") } else { json!(mask_members(m)) }).collect();
            let params = json!({"epsilon": epsilon.to_string(), "n": n, "B": sets, "candidates": tried});
            return Ok(WitnessReport::new("runaway-set", params, checks));
        }
    }
    Err(Error::NotFoundWithinHorizon(format!("{tried} product cylinders over {depth} coordinates, n <= {horizon}")))
}
