//! Region algebra over the InfoMat and the conservation-law verifiers.
//!
//! Directed information, its delayed variants, transfer entropy sums and
//! instantaneous information are all sums over fixed index regions of the
//! matrix. The verifier checks the classical decompositions of the block
//! mutual information as residuals of such region sums.
//!
//! Identities that mix both directions need the InfoMat of the swapped
//! pair `(Y, X)`, built by re-running the constructor with roles
//! exchanged; transposing is wrong because the conditioning sets differ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infomat::InfoMat;

/// Named index regions (1-based, matching the usual notation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionKind {
    /// Upper triangle with the diagonal: directed information X to Y.
    Di,
    /// Cells with `j - i >= k`: directed information delayed by `k`.
    DelayedDi(usize),
    /// Column `i + 1`, rows `1..=i`: the transfer entropy term at time `i+1`.
    TeColumn(usize),
    /// Row `i + 1`, columns `1..=i`: the reverse-direction transfer entropy.
    TeRow(usize),
    /// The main diagonal: instantaneous information.
    Diagonal,
    /// Cells with `j - i = k`.
    Superdiagonal(usize),
    Custom,
}

/// A boolean subset of the `m x m` index grid.
#[derive(Debug, Clone)]
pub struct RegionMask {
    m: usize,
    cells: Vec<bool>,
    kind: RegionKind,
}

impl RegionMask {
    pub fn new(kind: RegionKind, m: usize) -> Result<RegionMask> {
        if m == 0 {
            return Err(Error::InvalidArgument("mask needs m >= 1".into()));
        }
        let in_range = |p: usize, hi: usize| -> Result<()> {
            if p > hi {
                Err(Error::InvalidArgument(format!(
                    "region parameter {p} out of range [0, {hi}]"
                )))
            } else {
                Ok(())
            }
        };
        match kind {
            RegionKind::DelayedDi(k) | RegionKind::Superdiagonal(k) => in_range(k, m)?,
            RegionKind::TeColumn(i) | RegionKind::TeRow(i) => in_range(i, m - 1)?,
            _ => {}
        }
        let selected = |i: usize, j: usize| -> bool {
            match kind {
                RegionKind::Di => j >= i,
                RegionKind::DelayedDi(k) => j >= i + k,
                RegionKind::TeColumn(p) => j == p + 1 && i <= p,
                RegionKind::TeRow(p) => i == p + 1 && j <= p,
                RegionKind::Diagonal => i == j,
                RegionKind::Superdiagonal(k) => j == i + k,
                RegionKind::Custom => false,
            }
        };
        let mut cells = vec![false; m * m];
        for i in 1..=m {
            for j in 1..=m {
                cells[(i - 1) * m + (j - 1)] = selected(i, j);
            }
        }
        Ok(RegionMask { m, cells, kind })
    }

    /// Mask from an explicit cell list (1-based pairs).
    pub fn custom(m: usize, selected: &[(usize, usize)]) -> Result<RegionMask> {
        let mut cells = vec![false; m * m];
        for &(i, j) in selected {
            if !(1..=m).contains(&i) || !(1..=m).contains(&j) {
                return Err(Error::InvalidArgument(format!(
                    "cell ({i}, {j}) out of range for m = {m}"
                )));
            }
            cells[(i - 1) * m + (j - 1)] = true;
        }
        Ok(RegionMask {
            m,
            cells,
            kind: RegionKind::Custom,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }
    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }
    /// Membership of cell `(i, j)`, 1-based.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.cells[(i - 1) * self.m + (j - 1)]
    }
}

/// Sum of the masked entries, in row-major order.
pub fn region_sum(mat: &InfoMat, mask: &RegionMask) -> Result<f64> {
    if mat.m() != mask.m {
        return Err(Error::InvalidArgument(format!(
            "matrix m = {} does not match mask m = {}",
            mat.m(),
            mask.m
        )));
    }
    Ok(mat
        .entries()
        .iter()
        .zip(&mask.cells)
        .filter(|(_, &sel)| sel)
        .map(|(v, _)| v)
        .sum())
}

/// Directed information `I(X^m -> Y^m)`: upper triangle with diagonal.
pub fn directed_information(mat: &InfoMat) -> f64 {
    region_sum(mat, &RegionMask::new(RegionKind::Di, mat.m()).unwrap()).unwrap()
}

/// Delayed directed information `I(D^k X^m -> Y^m)`: the triangle shrunk
/// to side `m - k`.
pub fn delayed_di(mat: &InfoMat, k: usize) -> Result<f64> {
    region_sum(mat, &RegionMask::new(RegionKind::DelayedDi(k), mat.m())?)
}

/// Instantaneous information: the trace.
pub fn instantaneous(mat: &InfoMat) -> f64 {
    region_sum(mat, &RegionMask::new(RegionKind::Diagonal, mat.m()).unwrap()).unwrap()
}

/// Transfer entropy sum `T^{X -> Y}_{i+1}(i, i)`: the length-`i` column
/// above the diagonal in column `i + 1`.
pub fn te_sum(mat: &InfoMat, i: usize) -> Result<f64> {
    region_sum(mat, &RegionMask::new(RegionKind::TeColumn(i), mat.m())?)
}

/// One verified identity: the residual that should vanish and whether it
/// does at the given tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityCheck {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> IdentityCheck {
        IdentityCheck {
            name: name.into(),
            residual,
            tolerance,
            pass: residual.abs() <= tolerance,
        }
    }
}

/// Machine-readable verification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub m: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Verifies the conservation laws on an InfoMat pair built from the same
/// joint: `mat_xy` for `(X, Y)` and `mat_yx` for the swapped `(Y, X)`.
/// Every term is computed from its own matrix; the two lower/upper
/// triangles agree only at the level of sums.
pub fn verify_identities(mat_xy: &InfoMat, mat_yx: &InfoMat, tol: f64) -> Result<IdentityReport> {
    let m = mat_xy.m();
    if mat_yx.m() != m {
        return Err(Error::InvalidArgument(format!(
            "matrix sizes differ: {m} vs {}",
            mat_yx.m()
        )));
    }
    let mut checks = Vec::new();
    let total = mat_xy.total_mi();

    // I(X;Y) = I(X -> Y) + I(D^1 Y -> X)
    checks.push(IdentityCheck::new(
        "massey_conservation",
        total - directed_information(mat_xy) - delayed_di(mat_yx, 1)?,
        tol,
    ));

    // I(X;Y) = I(D^1 X -> Y) + I(D^1 Y -> X) + I_inst
    checks.push(IdentityCheck::new(
        "amblard_decomposition",
        total - delayed_di(mat_xy, 1)? - delayed_di(mat_yx, 1)? - instantaneous(mat_xy),
        tol,
    ));

    // same, with the delayed terms expanded into transfer entropy sums
    let te_fwd: f64 = (1..m).map(|i| te_sum(mat_xy, i).unwrap()).sum();
    let te_rev: f64 = (1..m).map(|i| te_sum(mat_yx, i).unwrap()).sum();
    checks.push(IdentityCheck::new(
        "transfer_entropy_conservation",
        total - te_fwd - te_rev - instantaneous(mat_xy),
        tol,
    ));

    // delayed DI telescopes through superdiagonal sums; k = 0 reads
    // I(X -> Y) = I(D^1 X -> Y) + trace
    for k in 0..m {
        let super_k = region_sum(mat_xy, &RegionMask::new(RegionKind::Superdiagonal(k), m)?)?;
        checks.push(IdentityCheck::new(
            format!("di_chain_rule_k{k}"),
            delayed_di(mat_xy, k)? - delayed_di(mat_xy, k + 1)? - super_k,
            tol,
        ));
    }

    Ok(IdentityReport { m, checks })
}

/// Decomposes a delayed directed information into shifted sub-column sums:
/// `I(D^k X -> Y) = sum over columns c > k of the cells (r, c), r <= c-k`.
/// A pure regrouping of identical addends, used by the identity suites.
pub fn delayed_di_via_columns(mat: &InfoMat, k: usize) -> Result<f64> {
    let m = mat.m();
    if k > m {
        return Err(Error::InvalidArgument(format!("delay {k} out of range [0, {m}]")));
    }
    let mut sum = 0.0;
    for c in (k + 1).max(1)..=m {
        for r in 1..=(c - k) {
            sum += mat.entry(r, c);
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::JointPMF;
    use crate::infomat::{InfoMat, InfoMatMeta, Provenance};
    use crate::oracle::{pmf_infomat, pmf_total_mi};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat_from(m: usize, entries: Vec<f64>) -> InfoMat {
        InfoMat::new(m, entries, Provenance::ExactPmf, InfoMatMeta::default()).unwrap()
    }

    #[test]
    fn di_mask_counts_triangular_cells() {
        let mask = RegionMask::new(RegionKind::Di, 3).unwrap();
        assert_eq!(mask.count(), 6);
        for (i, j) in [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)] {
            assert!(mask.contains(i, j));
        }
        assert!(!mask.contains(2, 1));
    }

    #[test]
    fn delayed_mask_shrinks_triangle() {
        let mask = RegionMask::new(RegionKind::DelayedDi(1), 3).unwrap();
        assert_eq!(mask.count(), 3);
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            assert!(mask.contains(i, j));
        }
    }

    #[test]
    fn te_column_mask_matches_table() {
        let mask = RegionMask::new(RegionKind::TeColumn(2), 4).unwrap();
        assert_eq!(mask.count(), 2);
        assert!(mask.contains(1, 3));
        assert!(mask.contains(2, 3));
    }

    #[test]
    fn te_row_mask_is_the_mirror() {
        let mask = RegionMask::new(RegionKind::TeRow(2), 4).unwrap();
        assert_eq!(mask.count(), 2);
        assert!(mask.contains(3, 1));
        assert!(mask.contains(3, 2));
    }

    #[test]
    fn out_of_range_parameters_rejected() {
        assert!(RegionMask::new(RegionKind::DelayedDi(4), 3).is_err());
        assert!(RegionMask::new(RegionKind::TeColumn(3), 3).is_err());
    }

    #[test]
    fn region_sums_on_diagonal_matrix() {
        let mat = mat_from(3, vec![1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        assert_eq!(directed_information(&mat), 6.0);
        assert_eq!(instantaneous(&mat), 6.0);
        assert_eq!(delayed_di(&mat, 1).unwrap(), 0.0);
        let full = RegionMask::custom(
            3,
            &(1..=3)
                .flat_map(|i| (1..=3).map(move |j| (i, j)))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(region_sum(&mat, &full).unwrap(), mat.total_mi());
        let empty = RegionMask::custom(3, &[]).unwrap();
        assert_eq!(region_sum(&mat, &empty).unwrap(), 0.0);
    }

    #[test]
    fn size_mismatch_rejected() {
        let mat = mat_from(2, vec![0.0; 4]);
        let mask = RegionMask::new(RegionKind::Di, 3).unwrap();
        assert!(region_sum(&mat, &mask).is_err());
    }

    #[test]
    fn masks_partition_the_grid() {
        let m = 5;
        let diag = RegionMask::new(RegionKind::Diagonal, m).unwrap();
        let upper = RegionMask::new(RegionKind::DelayedDi(1), m).unwrap();
        let mut lower_cells = Vec::new();
        for i in 1..=m {
            for j in 1..=m {
                if i > j {
                    lower_cells.push((i, j));
                }
            }
        }
        let lower = RegionMask::custom(m, &lower_cells).unwrap();
        for i in 1..=m {
            for j in 1..=m {
                let hits = [diag.contains(i, j), upper.contains(i, j), lower.contains(i, j)]
                    .iter()
                    .filter(|&&b| b)
                    .count();
                assert_eq!(hits, 1, "cell ({i}, {j}) covered {hits} times");
            }
        }
    }

    #[test]
    fn superdiagonals_tile_the_delayed_triangles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pmf = JointPMF::random_dirichlet(4, 2, 2, &mut rng).unwrap();
        let mat = pmf_infomat(&pmf).unwrap();
        for k in 0..4 {
            let lhs = delayed_di(&mat, k).unwrap();
            let rhs = delayed_di(&mat, k + 1).unwrap()
                + region_sum(&mat, &RegionMask::new(RegionKind::Superdiagonal(k), 4).unwrap())
                    .unwrap();
            assert!((lhs - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn prop1_regrouping_all_delays() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pmf = JointPMF::random_dirichlet(4, 2, 2, &mut rng).unwrap();
        let mat = pmf_infomat(&pmf).unwrap();
        // k = 1 is the transfer-entropy decomposition of delayed DI
        let te_total: f64 = (1..4).map(|i| te_sum(&mat, i).unwrap()).sum();
        assert!((delayed_di(&mat, 1).unwrap() - te_total).abs() <= 1e-12);
        for k in 1..4 {
            let regrouped = delayed_di_via_columns(&mat, k).unwrap();
            assert!((delayed_di(&mat, k).unwrap() - regrouped).abs() <= 1e-12);
        }
    }

    #[test]
    fn identities_hold_on_random_exact_joints() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..25 {
            let pmf = JointPMF::random_dirichlet(3, 2, 2, &mut rng).unwrap();
            let mat_xy = pmf_infomat(&pmf).unwrap();
            let mat_yx = pmf_infomat(&pmf.swapped()).unwrap();
            let report = verify_identities(&mat_xy, &mat_yx, 1e-9).unwrap();
            assert!(report.all_pass(), "failing report: {report:?}");
            // the two totals agree as well
            assert!((mat_xy.total_mi() - pmf_total_mi(&pmf)).abs() <= 1e-9);
        }
    }

    #[test]
    fn independent_streams_have_all_zero_terms() {
        let probs = {
            let mut v = Vec::new();
            for _x in 0..4 {
                for _y in 0..4 {
                    v.push(1.0 / 16.0);
                }
            }
            v
        };
        let pmf = JointPMF::from_probs(2, 2, 2, probs).unwrap();
        let mat_xy = pmf_infomat(&pmf).unwrap();
        let mat_yx = pmf_infomat(&pmf.swapped()).unwrap();
        assert!(directed_information(&mat_xy).abs() < 1e-12);
        assert!(instantaneous(&mat_xy).abs() < 1e-12);
        let report = verify_identities(&mat_xy, &mat_yx, 1e-12).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn report_serializes_to_json() {
        let mat = mat_from(2, vec![0.5, 0.1, 0.0, 0.4]);
        let report = verify_identities(&mat, &mat, 1e-6).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("massey_conservation"));
        assert!(json.contains("residual"));
    }
}
