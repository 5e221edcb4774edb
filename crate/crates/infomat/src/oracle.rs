//! Brute-force information quantities from explicit small joints.
//!
//! Everything here works by direct summation over a dense probability
//! table, which keeps this module independent of the estimators it is used
//! to check. Values are in nats.

use crate::error::{Error, Result};
use crate::generators::JointPMF;
use crate::infomat::{InfoMat, InfoMatMeta, Provenance};

/// Entropy of the marginal on `coords` (indices into `[0, 2m)`, x block
/// first), with `0 ln 0 = 0` and `H` over no coordinates defined as 0.
pub fn pmf_entropy(pmf: &JointPMF, coords: &[usize]) -> Result<f64> {
    if pmf.probs().is_empty() {
        return Err(Error::InvalidArgument("empty probability table".into()));
    }
    for &c in coords {
        if c >= 2 * pmf.m() {
            return Err(Error::InvalidArgument(format!(
                "coordinate {c} out of range for m = {}",
                pmf.m()
            )));
        }
    }
    if coords.is_empty() {
        return Ok(0.0);
    }
    let mut span = 1usize;
    for &c in coords {
        span *= pmf.card(c);
    }
    let mut marginal = vec![0.0f64; span];
    for (cell, &p) in pmf.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut key = 0usize;
        for &c in coords {
            key = key * pmf.card(c) + pmf.digit(cell, c);
        }
        marginal[key] += p;
    }
    Ok(marginal
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum())
}

fn x_prefix(_pmf: &JointPMF, i: usize) -> Vec<usize> {
    (0..i).collect()
}

fn y_prefix(pmf: &JointPMF, j: usize) -> Vec<usize> {
    (pmf.m()..pmf.m() + j).collect()
}

/// `I(X_i; Y_j | X^{i-1}, Y^{j-1})` via the four-entropy decomposition,
/// `i`, `j` 1-based; empty histories contribute nothing.
pub fn pmf_cmi(pmf: &JointPMF, i: usize, j: usize) -> Result<f64> {
    let m = pmf.m();
    if !(1..=m).contains(&i) || !(1..=m).contains(&j) {
        return Err(Error::InvalidArgument(format!(
            "(i, j) = ({i}, {j}) out of range for m = {m}"
        )));
    }
    let join = |a: &[usize], b: &[usize]| -> Vec<usize> {
        a.iter().chain(b).copied().collect()
    };
    let (hx, hy) = (x_prefix(pmf, i - 1), y_prefix(pmf, j - 1));
    let (xi, yj) = (x_prefix(pmf, i), y_prefix(pmf, j));
    Ok(pmf_entropy(pmf, &join(&xi, &hy))? + pmf_entropy(pmf, &join(&hx, &yj))?
        - pmf_entropy(pmf, &join(&hx, &hy))?
        - pmf_entropy(pmf, &join(&xi, &yj))?)
}

/// Exact InfoMat of the joint, entrywise via [`pmf_cmi`].
pub fn pmf_infomat(pmf: &JointPMF) -> Result<InfoMat> {
    let m = pmf.m();
    let mut entries = Vec::with_capacity(m * m);
    for i in 1..=m {
        for j in 1..=m {
            entries.push(pmf_cmi(pmf, i, j)?);
        }
    }
    InfoMat::new(m, entries, Provenance::ExactPmf, InfoMatMeta::default())
}

/// `I(X^m; Y^m)` as a single KL-style double sum of the joint against the
/// product of its block marginals; the independent route for chain-rule
/// checks.
pub fn pmf_total_mi(pmf: &JointPMF) -> f64 {
    let m = pmf.m();
    let x_span = pmf.card_x().pow(m as u32);
    let y_span = pmf.card_y().pow(m as u32);
    let mut px = vec![0.0f64; x_span];
    let mut py = vec![0.0f64; y_span];
    for (cell, &p) in pmf.probs().iter().enumerate() {
        px[cell / y_span] += p;
        py[cell % y_span] += p;
    }
    let mut mi = 0.0;
    for (cell, &p) in pmf.probs().iter().enumerate() {
        if p > 0.0 {
            mi += p * (p / (px[cell / y_span] * py[cell % y_span])).ln();
        }
    }
    mi
}
