//! The information matrix: an `m x m` grid whose entry `(i, j)` is the
//! conditional mutual information `I(X_i; Y_j | X^{i-1}, Y^{j-1})` in nats.
//! Its entries sum to `I(X^m; Y^m)`, so region sums of the matrix recover
//! the classical sequential information measures.
//!
//! Three constructors are provided: exact evaluation on a Gaussian model,
//! the sample-covariance Gaussian estimator, and a plug-in histogram
//! estimator for discrete data. Entry computations are independent and run
//! in parallel.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::datasets::WindowedDataset;
use crate::error::{Error, Result};
use crate::gauss::{gaussian_cmi, sample_covariance, CovarianceEstimate, JointGaussianModel};

/// How an InfoMat was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ExactGaussian,
    EstimatedGaussian,
    PluginDiscrete,
    ExactPmf,
}

impl Provenance {
    pub fn tag(&self) -> &'static str {
        match self {
            Provenance::ExactGaussian => "exact-gaussian",
            Provenance::EstimatedGaussian => "estimated-gaussian",
            Provenance::PluginDiscrete => "plugin-discrete",
            Provenance::ExactPmf => "exact-pmf",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "exact-gaussian" => Ok(Provenance::ExactGaussian),
            "estimated-gaussian" => Ok(Provenance::EstimatedGaussian),
            "plugin-discrete" => Ok(Provenance::PluginDiscrete),
            "exact-pmf" => Ok(Provenance::ExactPmf),
            other => Err(Error::InvalidArgument(format!("unknown provenance {other:?}"))),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Provenance::ExactGaussian | Provenance::ExactPmf)
    }
}

/// Estimation parameters recorded alongside a matrix.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InfoMatMeta {
    pub n_windows: Option<usize>,
    pub stride: Option<usize>,
    pub ridge: Option<f64>,
    pub truncation: Option<(usize, usize)>,
}

/// The m x m matrix of conditional MI values, in nats, row-major with
/// row 1 first. Public indexing is 1-based to match the usual notation.
#[derive(Debug, Clone)]
pub struct InfoMat {
    m: usize,
    entries: Vec<f64>,
    provenance: Provenance,
    meta: InfoMatMeta,
}

impl InfoMat {
    pub fn new(
        m: usize,
        entries: Vec<f64>,
        provenance: Provenance,
        meta: InfoMatMeta,
    ) -> Result<Self> {
        if m == 0 || entries.len() != m * m {
            return Err(Error::InvalidArgument(format!(
                "entry count {} does not match m = {m}",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("entries must be finite".into()));
        }
        if provenance.is_exact() {
            if let Some(k) = entries.iter().position(|&v| v < -1e-9) {
                return Err(Error::InvalidArgument(format!(
                    "exact entry ({}, {}) is negative: {}",
                    k / m + 1,
                    k % m + 1,
                    entries[k]
                )));
            }
        }
        Ok(InfoMat {
            m,
            entries,
            provenance,
            meta,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
    pub fn meta(&self) -> &InfoMatMeta {
        &self.meta
    }
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Entry `(i, j)`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        assert!(
            (1..=self.m).contains(&i) && (1..=self.m).contains(&j),
            "entry ({i}, {j}) out of range for m = {}",
            self.m
        );
        self.entries[(i - 1) * self.m + (j - 1)]
    }

    /// Sum of all entries in row-major order; equals `I(X^m; Y^m)` for the
    /// exact provenances.
    pub fn total_mi(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Warnings worth surfacing to a user, currently strongly negative
    /// entries in estimated matrices (estimation noise should stay small).
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.provenance.is_exact() {
            for (k, &v) in self.entries.iter().enumerate() {
                if v < -0.05 {
                    out.push(format!(
                        "entry ({}, {}) = {v:.4} is more negative than -0.05; the estimate may be unreliable",
                        k / self.m + 1,
                        k % self.m + 1
                    ));
                }
            }
        }
        out
    }

    // --- CSV persistence ---------------------------------------------------

    /// Writes the matrix in the plain-text format: four `#` header lines
    /// followed by `m` comma-separated rows at full precision.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path)?;
        writeln!(f, "# infomat v1")?;
        writeln!(f, "# m={}", self.m)?;
        writeln!(f, "# units=nats")?;
        writeln!(f, "# provenance={}", self.provenance.tag())?;
        for i in 0..self.m {
            let row: Vec<String> = (0..self.m)
                .map(|j| format!("{}", self.entries[i * self.m + j]))
                .collect();
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<InfoMat> {
        let mut text = String::new();
        File::open(path)?.read_to_string(&mut text)?;
        let mut header_m: Option<usize> = None;
        let mut provenance = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("m=") {
                    header_m = Some(v.trim().parse().map_err(|_| {
                        Error::InvalidArgument(format!("line {}: bad m", lineno + 1))
                    })?);
                } else if let Some(v) = rest.strip_prefix("provenance=") {
                    provenance = Some(Provenance::from_tag(v.trim())?);
                } else if let Some(v) = rest.strip_prefix("units=") {
                    if v.trim() != "nats" {
                        return Err(Error::InvalidArgument(format!(
                            "line {}: only nats storage is supported, found {v:?}",
                            lineno + 1
                        )));
                    }
                }
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|s| {
                    s.trim().parse().map_err(|_| {
                        Error::InvalidArgument(format!("line {}: bad number {s:?}", lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidArgument("no data rows".into()));
        }
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        if let Some(hm) = header_m {
            if hm != m {
                return Err(Error::InvalidArgument(format!(
                    "header says m={hm} but found {m} rows"
                )));
            }
        }
        let provenance = provenance
            .ok_or_else(|| Error::InvalidArgument("missing provenance header".into()))?;
        InfoMat::new(
            m,
            rows.into_iter().flatten().collect(),
            provenance,
            InfoMatMeta::default(),
        )
    }
}

// --- Exact Gaussian constructor ------------------------------------------

/// Exact InfoMat of a jointly Gaussian block: entry `(i, j)` evaluates the
/// covariance log-determinant form on the model's principal sub-blocks.
pub fn infomat_from_gaussian_model(model: &JointGaussianModel) -> Result<InfoMat> {
    let m = model.m();
    let k = CovarianceEstimate::exact(model.cov().clone())?;
    let entries = par_entries(m, |i, j| {
        gaussian_cmi(
            &k,
            &model.coords_x(i),
            &model.coords_y(j),
            &model.coords_history(i, j),
        )
    })?;
    InfoMat::new(m, entries, Provenance::ExactGaussian, InfoMatMeta::default())
}

// --- Gaussian sample estimator ----------------------------------------------

/// Gaussian InfoMat estimate from windows: one sample covariance over the
/// full stacked block `(X^m, Y^m)`, with every entry evaluated on its four
/// nested principal sub-blocks so the determinants stay mutually
/// consistent.
pub fn estimate_gaussian(ds: &WindowedDataset) -> Result<InfoMat> {
    if ds.kind().is_discrete() {
        return Err(Error::InvalidArgument(
            "the Gaussian estimator needs continuous data".into(),
        ));
    }
    let m = ds.m();
    let (d_x, d_y) = (ds.d_x(), ds.d_y());
    let needed = m * d_x.max(d_y) + 2;
    if ds.n_windows() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: ds.n_windows(),
            detail: format!("entry ({m}, {m}) conditions on the full history"),
        });
    }
    let k = sample_covariance(&ds.stacked_vectors(), ds.centered())?;
    let coords_x = |i: usize| -> Vec<usize> { ((i - 1) * d_x..i * d_x).collect() };
    let coords_y =
        |j: usize| -> Vec<usize> { (m * d_x + (j - 1) * d_y..m * d_x + j * d_y).collect() };
    let history = |i: usize, j: usize| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..(i - 1) * d_x).collect();
        idx.extend(m * d_x..m * d_x + (j - 1) * d_y);
        idx
    };
    let ridge = k.ridge();
    let entries = par_entries(m, |i, j| {
        gaussian_cmi(&k, &coords_x(i), &coords_y(j), &history(i, j))
    })?;
    InfoMat::new(
        m,
        entries,
        Provenance::EstimatedGaussian,
        InfoMatMeta {
            n_windows: Some(ds.n_windows()),
            stride: Some(ds.stride()),
            ridge: Some(ridge),
            truncation: None,
        },
    )
}

// --- Discrete plug-in estimator ----------------------------------------------

/// History truncation for the plug-in estimator: keep only the last
/// `l_x` / `l_y` symbols of each conditioning history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Full,
    Last(usize, usize),
}

const PLUGIN_CELL_LIMIT: f64 = (1u64 << 26) as f64;

/// Plug-in InfoMat for discrete windows: each entry combines four
/// empirical-histogram entropies,
/// `H(X^i, Y^{j-1}) + H(X^{i-1}, Y^j) - H(X^{i-1}, Y^{j-1}) - H(X^i, Y^j)`.
/// Under truncation the histories shrink to their most recent symbols and
/// the result is a truncated InfoMat (recorded in the metadata).
pub fn estimate_plugin_discrete(ds: &WindowedDataset, truncation: Truncation) -> Result<InfoMat> {
    let alphabet = match ds.kind() {
        crate::datasets::Kind::Discrete { alphabet_size } => alphabet_size as usize,
        _ => {
            return Err(Error::InvalidArgument(
                "the plug-in estimator needs discrete data".into(),
            ))
        }
    };
    let m = ds.m();
    let (d_x, d_y) = (ds.d_x(), ds.d_y());
    let (l_x, l_y) = match truncation {
        Truncation::Full => (m, m),
        Truncation::Last(l_x, l_y) => (l_x, l_y),
    };

    // refuse key spaces that a histogram cannot hold
    let worst_coords = (l_x.min(m - 1) + 1) * d_x + (l_y.min(m - 1) + 1) * d_y;
    if (alphabet as f64).powi(worst_coords as i32) > PLUGIN_CELL_LIMIT {
        return Err(Error::Config(format!(
            "alphabet {alphabet} over {worst_coords} coordinates exceeds 2^26 histogram cells; \
             truncate the histories (smaller --truncation) or reduce m"
        )));
    }

    let entries = par_entries(m, |i, j| Ok(plugin_entry(ds, alphabet, l_x, l_y, i, j)))?;
    InfoMat::new(
        m,
        entries,
        Provenance::PluginDiscrete,
        InfoMatMeta {
            n_windows: Some(ds.n_windows()),
            stride: Some(ds.stride()),
            ridge: None,
            truncation: match truncation {
                Truncation::Full => None,
                Truncation::Last(a, b) => Some((a, b)),
            },
        },
    )
}

fn plugin_entry(
    ds: &WindowedDataset,
    alphabet: usize,
    l_x: usize,
    l_y: usize,
    i: usize,
    j: usize,
) -> f64 {
    // 0-based time indices of the (possibly truncated) histories
    let hx: Vec<usize> = ((i - 1).saturating_sub(l_x)..(i - 1)).collect();
    let hy: Vec<usize> = ((j - 1).saturating_sub(l_y)..(j - 1)).collect();
    let mut xi = hx.clone();
    xi.push(i - 1);
    let mut yj = hy.clone();
    yj.push(j - 1);

    let h = |x_times: &[usize], y_times: &[usize]| empirical_entropy(ds, alphabet, x_times, y_times);
    h(&xi, &hy) + h(&hx, &yj) - h(&hx, &hy) - h(&xi, &yj)
}

/// Maximum-likelihood entropy of the empirical law of the given time
/// indices. Counts are summed in sorted order so the value is literally
/// invariant under any relabeling of the alphabet.
fn empirical_entropy(
    ds: &WindowedDataset,
    alphabet: usize,
    x_times: &[usize],
    y_times: &[usize],
) -> f64 {
    if x_times.is_empty() && y_times.is_empty() {
        return 0.0;
    }
    let (d_x, d_y) = (ds.d_x(), ds.d_y());
    let mut hist: HashMap<u64, u64> = HashMap::new();
    for w in 0..ds.n_windows() {
        let mut key: u64 = 0;
        for &t in x_times {
            for c in 0..d_x {
                key = key * alphabet as u64 + ds.x_at(w, t, c) as u64;
            }
        }
        for &t in y_times {
            for c in 0..d_y {
                key = key * alphabet as u64 + ds.y_at(w, t, c) as u64;
            }
        }
        *hist.entry(key).or_insert(0) += 1;
    }
    let n = ds.n_windows() as f64;
    let mut counts: Vec<u64> = hist.into_values().collect();
    counts.sort_unstable();
    let sum_c_ln_c: f64 = counts.iter().map(|&c| (c as f64) * (c as f64).ln()).sum();
    n.ln() - sum_c_ln_c / n
}

/// Evaluates all entries in parallel, preserving row-major order.
fn par_entries<F>(m: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize, usize) -> Result<f64> + Sync,
{
    (0..m * m)
        .into_par_iter()
        .map(|k| f(k / m + 1, k % m + 1))
        .collect()
}
