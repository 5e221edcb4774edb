//! Data generators: Gaussian autoregressive pairs, nonlinear/cyclic-shift
//! transforms, and the binary Ising channel driven by pluggable input
//! policies. Every sampler is deterministic per `(seed, window)` so output
//! does not depend on thread count.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::datasets::{Kind, Window, WindowedDataset};
use crate::error::{Error, Result};
use crate::gauss::JointGaussianModel;

fn window_rng(seed: u64, w: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(w as u64);
    rng
}

// --- Gaussian autoregressive model ----------------------------------------

/// Linear recursion over a length-`m` horizon:
///
/// ```text
/// X_t = sum_k alpha_x[k] X_{t-k} + alpha_y[k] Y_{t-k} + N^X_t
/// Y_t = sum_k beta_x[k]  X_{t-k} + beta_y[k]  Y_{t-k} + N^Y_t
/// ```
///
/// Out-of-range terms (`t-k < 1`) drop out. Lag-0 self weights are
/// forbidden and at most one lag-0 cross weight may be nonzero, which
/// fixes a forward-substitution order within each step.
#[derive(Debug, Clone)]
pub struct GaussianARModel {
    pub m: usize,
    pub alpha_x: Vec<f64>,
    pub alpha_y: Vec<f64>,
    pub beta_x: Vec<f64>,
    pub beta_y: Vec<f64>,
    pub noise_x: DMatrix<f64>,
    pub noise_y: DMatrix<f64>,
}

impl GaussianARModel {
    /// Univariate model with unit-variance noises and all weights zero.
    pub fn zero(m: usize) -> Self {
        GaussianARModel {
            m,
            alpha_x: vec![0.0; m],
            alpha_y: vec![0.0; m],
            beta_x: vec![0.0; m],
            beta_y: vec![0.0; m],
            noise_x: DMatrix::identity(1, 1),
            noise_y: DMatrix::identity(1, 1),
        }
    }

    /// Univariate i.i.d. pairs with per-step correlation `rho`:
    /// `Y_t = rho X_t + N`, `Var N = 1 - rho^2`, unit marginal variances.
    pub fn iid_correlated(m: usize, rho: f64) -> Self {
        let mut model = Self::zero(m);
        model.beta_x[0] = rho;
        model.noise_y[(0, 0)] = 1.0 - rho * rho;
        model
    }

    pub fn d_x(&self) -> usize {
        self.noise_x.nrows()
    }
    pub fn d_y(&self) -> usize {
        self.noise_y.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidModel("horizon m must be positive".into()));
        }
        for (name, w) in [
            ("alpha_x", &self.alpha_x),
            ("alpha_y", &self.alpha_y),
            ("beta_x", &self.beta_x),
            ("beta_y", &self.beta_y),
        ] {
            if w.len() != self.m {
                return Err(Error::InvalidModel(format!(
                    "{name} has {} weights, expected m = {}",
                    w.len(),
                    self.m
                )));
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidModel(format!("{name} contains non-finite weights")));
            }
        }
        if self.alpha_x[0] != 0.0 || self.beta_y[0] != 0.0 {
            return Err(Error::InvalidModel(
                "lag-0 self weights alpha_x[0], beta_y[0] must be zero".into(),
            ));
        }
        if self.alpha_y[0] != 0.0 && self.beta_x[0] != 0.0 {
            return Err(Error::InvalidModel(
                "at most one of alpha_y[0], beta_x[0] may be nonzero".into(),
            ));
        }
        for (name, k) in [("noise_x", &self.noise_x), ("noise_y", &self.noise_y)] {
            if k.nrows() != k.ncols() || k.nrows() == 0 {
                return Err(Error::InvalidModel(format!("{name} must be square and nonempty")));
            }
        }
        Ok(())
    }

    /// True when `Y_t` must be produced before `X_t` within a step.
    fn y_first(&self) -> bool {
        self.alpha_y[0] != 0.0
    }
}

/// On-disk AR model (JSON). Weights shorter than `m` are zero-padded;
/// noises are univariate variances.
#[derive(Debug, Serialize, Deserialize)]
pub struct ArModelFile {
    pub m: Option<usize>,
    #[serde(default)]
    pub alpha_x: Vec<f64>,
    #[serde(default)]
    pub alpha_y: Vec<f64>,
    #[serde(default)]
    pub beta_x: Vec<f64>,
    #[serde(default)]
    pub beta_y: Vec<f64>,
    #[serde(default = "one")]
    pub noise_var_x: f64,
    #[serde(default = "one")]
    pub noise_var_y: f64,
}

fn one() -> f64 {
    1.0
}

impl ArModelFile {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Resolves the file into a model with horizon `m` (argument wins over
    /// the file's own `m` when both are present).
    pub fn into_model(self, m_override: Option<usize>) -> Result<GaussianARModel> {
        let m = m_override
            .or(self.m)
            .ok_or_else(|| Error::InvalidModel("no horizon m given".into()))?;
        let pad = |mut w: Vec<f64>| -> Result<Vec<f64>> {
            if w.len() > m {
                return Err(Error::InvalidModel(format!(
                    "{} weights exceed horizon m = {m}",
                    w.len()
                )));
            }
            w.resize(m, 0.0);
            Ok(w)
        };
        let model = GaussianARModel {
            m,
            alpha_x: pad(self.alpha_x)?,
            alpha_y: pad(self.alpha_y)?,
            beta_x: pad(self.beta_x)?,
            beta_y: pad(self.beta_y)?,
            noise_x: DMatrix::from_element(1, 1, self.noise_var_x),
            noise_y: DMatrix::from_element(1, 1, self.noise_var_y),
        };
        model.validate()?;
        Ok(model)
    }
}

fn cholesky_factor(k: &DMatrix<f64>, name: &str) -> Result<DMatrix<f64>> {
    k.clone()
        .cholesky()
        .map(|c| c.l())
        .ok_or_else(|| Error::InvalidModel(format!("{name} covariance is not positive definite")))
}

/// Draws `n_windows` independent length-`m` windows of the AR recursion.
/// Window `w` consumes the RNG stream keyed by `(seed, w)`.
pub fn ar_sample(model: &GaussianARModel, n_windows: usize, seed: u64) -> Result<WindowedDataset> {
    model.validate()?;
    if n_windows == 0 {
        return Err(Error::InvalidArgument("need at least one window".into()));
    }
    let (d_x, d_y, m) = (model.d_x(), model.d_y(), model.m);
    let l_nx = cholesky_factor(&model.noise_x, "noise_x")?;
    let l_ny = cholesky_factor(&model.noise_y, "noise_y")?;
    let y_first = model.y_first();

    let windows: Vec<Window> = (0..n_windows)
        .map(|w| {
            let mut rng = window_rng(seed, w);
            let mut x = vec![0.0; m * d_x];
            let mut y = vec![0.0; m * d_y];
            let mut nx = vec![0.0; d_x];
            let mut ny = vec![0.0; d_y];
            for t in 0..m {
                draw_noise(&mut rng, &l_nx, &mut nx);
                draw_noise(&mut rng, &l_ny, &mut ny);
                if y_first {
                    step_y(model, &x, &mut y, t, &ny, false);
                    step_x(model, &mut x, &y, t, &nx, true);
                } else {
                    step_x(model, &mut x, &y, t, &nx, false);
                    step_y(model, &x, &mut y, t, &ny, true);
                }
            }
            Window { x, y }
        })
        .collect();
    WindowedDataset::from_windows(windows, m, m, d_x, d_y, Kind::Continuous)
}

fn draw_noise(rng: &mut ChaCha8Rng, l: &DMatrix<f64>, out: &mut [f64]) {
    let d = out.len();
    let mut z = vec![0.0; d];
    for zi in z.iter_mut() {
        *zi = StandardNormal.sample(rng);
    }
    for i in 0..d {
        let mut v = 0.0;
        for (j, zj) in z.iter().enumerate().take(i + 1) {
            v += l[(i, j)] * zj;
        }
        out[i] = v;
    }
}

fn step_x(
    model: &GaussianARModel,
    x: &mut [f64],
    y: &[f64],
    t: usize,
    noise: &[f64],
    cross_lag0: bool,
) {
    let (d_x, d_y) = (model.d_x(), model.d_y());
    for c in 0..d_x {
        x[t * d_x + c] = noise[c];
    }
    for k in 1..=t {
        let (ax, ay) = (model.alpha_x[k], model.alpha_y[k]);
        for c in 0..d_x {
            x[t * d_x + c] += ax * x[(t - k) * d_x + c];
        }
        if ay != 0.0 {
            for c in 0..d_x.min(d_y) {
                x[t * d_x + c] += ay * y[(t - k) * d_y + c];
            }
        }
    }
    if cross_lag0 && model.alpha_y[0] != 0.0 {
        for c in 0..d_x.min(d_y) {
            x[t * d_x + c] += model.alpha_y[0] * y[t * d_y + c];
        }
    }
}

fn step_y(
    model: &GaussianARModel,
    x: &[f64],
    y: &mut [f64],
    t: usize,
    noise: &[f64],
    cross_lag0: bool,
) {
    let (d_x, d_y) = (model.d_x(), model.d_y());
    for c in 0..d_y {
        y[t * d_y + c] = noise[c];
    }
    for k in 1..=t {
        let (bx, by) = (model.beta_x[k], model.beta_y[k]);
        if bx != 0.0 {
            for c in 0..d_y.min(d_x) {
                y[t * d_y + c] += bx * x[(t - k) * d_x + c];
            }
        }
        for c in 0..d_y {
            y[t * d_y + c] += by * y[(t - k) * d_y + c];
        }
    }
    if cross_lag0 && model.beta_x[0] != 0.0 {
        for c in 0..d_y.min(d_x) {
            y[t * d_y + c] += model.beta_x[0] * x[t * d_x + c];
        }
    }
}

/// Unrolls the recursion exactly: the stacked block satisfies
/// `Z = L e` with `L` unit-lower-triangular in causal order, so
/// `K = L diag(noise) L^T` to machine precision.
pub fn ar_joint_covariance(model: &GaussianARModel) -> Result<JointGaussianModel> {
    model.validate()?;
    let (d_x, d_y, m) = (model.d_x(), model.d_y(), model.m);
    let dim = m * (d_x + d_y);
    let y_first = model.y_first();

    // causal coordinate order: per step, first then second variable
    // causal_of_block[b] = causal position of block-ordered coordinate b
    let block_x = |t: usize, c: usize| t * d_x + c;
    let block_y = |t: usize, c: usize| m * d_x + t * d_y + c;
    let mut causal_of_block = vec![0usize; dim];
    let mut pos = 0usize;
    for t in 0..m {
        let (first_is_x, fdim) = if y_first { (false, d_y) } else { (true, d_x) };
        for c in 0..fdim {
            let b = if first_is_x { block_x(t, c) } else { block_y(t, c) };
            causal_of_block[b] = pos;
            pos += 1;
        }
        let sdim = if y_first { d_x } else { d_y };
        for c in 0..sdim {
            let b = if y_first { block_x(t, c) } else { block_y(t, c) };
            causal_of_block[b] = pos;
            pos += 1;
        }
    }

    // rows of L over causal noise coordinates; sigma = block-diag noise
    let mut l = DMatrix::<f64>::zeros(dim, dim);
    let mut sigma = DMatrix::<f64>::zeros(dim, dim);
    let mut place_noise = |rows: &[usize], k: &DMatrix<f64>| {
        for (a, &ra) in rows.iter().enumerate() {
            for (b, &rb) in rows.iter().enumerate() {
                sigma[(ra, rb)] = k[(a, b)];
            }
        }
    };

    // accumulate each variable's row as weights over earlier causal rows
    for t in 0..m {
        let steps: [bool; 2] = if y_first { [false, true] } else { [true, false] };
        for &is_x in &steps {
            let d = if is_x { d_x } else { d_y };
            let rows: Vec<usize> = (0..d)
                .map(|c| causal_of_block[if is_x { block_x(t, c) } else { block_y(t, c) }])
                .collect();
            // own noise enters with identity coefficient
            for (c, &r) in rows.iter().enumerate() {
                l[(r, r)] = 1.0;
                let _ = c;
            }
            place_noise(&rows, if is_x { &model.noise_x } else { &model.noise_y });

            let mut add_dep = |weight: f64, src_is_x: bool, lag: usize| {
                if weight == 0.0 || lag > t {
                    return;
                }
                let sd = if src_is_x { d_x } else { d_y };
                for c in 0..d.min(sd) {
                    let src = causal_of_block[if src_is_x {
                        block_x(t - lag, c)
                    } else {
                        block_y(t - lag, c)
                    }];
                    let dst = rows[c];
                    // row(dst) += weight * row(src)
                    for j in 0..dim {
                        let v = l[(src, j)];
                        if v != 0.0 {
                            l[(dst, j)] += weight * v;
                        }
                    }
                }
            };
            let start = if is_x {
                // lag-0 cross only when Y precedes X
                usize::from(!y_first)
            } else {
                usize::from(y_first)
            };
            for k in start..=t {
                if is_x {
                    add_dep(model.alpha_x[k], true, k);
                    add_dep(model.alpha_y[k], false, k);
                } else {
                    add_dep(model.beta_x[k], true, k);
                    add_dep(model.beta_y[k], false, k);
                }
            }
        }
    }

    let k_causal = &l * sigma * l.transpose();
    // permute causal order into block order (X_1..X_m, Y_1..Y_m)
    let cov = DMatrix::from_fn(dim, dim, |r, c| {
        k_causal[(causal_of_block[r], causal_of_block[c])]
    });
    JointGaussianModel::new(m, d_x, d_y, (&cov + cov.transpose()) * 0.5)
}

// --- Nonlinear transforms ---------------------------------------------------

/// Monotone per-coordinate maps usable in the shift experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneMap {
    Identity,
    /// `x -> sign(x) ln(1+|x|)`, a monotone bijection defined on all reals.
    SignedLog,
    Cube,
}

impl MonotoneMap {
    pub fn apply(&self, v: f64) -> f64 {
        match self {
            MonotoneMap::Identity => v,
            MonotoneMap::SignedLog => v.signum() * v.abs().ln_1p(),
            MonotoneMap::Cube => v * v * v,
        }
    }
}

impl std::str::FromStr for MonotoneMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(MonotoneMap::Identity),
            "signed-log" => Ok(MonotoneMap::SignedLog),
            "cube" => Ok(MonotoneMap::Cube),
            other => Err(Error::InvalidArgument(format!(
                "unknown map {other:?}; registered maps: identity, signed-log, cube"
            ))),
        }
    }
}

/// Within each window, cyclically rotates the y sequence by `t_shift`
/// (`Y'_t = Y_{t - t_shift}`, indices mod `m`), then applies the monotone
/// maps per coordinate.
pub fn nonlinear_shift(
    ds: &WindowedDataset,
    t_shift: usize,
    map_x: MonotoneMap,
    map_y: MonotoneMap,
) -> Result<WindowedDataset> {
    if ds.kind().is_discrete() {
        return Err(Error::InvalidArgument(
            "nonlinear transforms apply to continuous data".into(),
        ));
    }
    let m = ds.m();
    if t_shift >= m {
        return Err(Error::InvalidArgument(format!(
            "shift {t_shift} must be smaller than m = {m}"
        )));
    }
    let (d_x, d_y) = (ds.d_x(), ds.d_y());
    let windows = ds
        .windows()
        .iter()
        .map(|w| {
            let x = w.x.iter().map(|&v| map_x.apply(v)).collect();
            let mut y = vec![0.0; m * d_y];
            for t in 0..m {
                let src = (t + m - t_shift) % m;
                for c in 0..d_y {
                    y[t * d_y + c] = map_y.apply(w.y[src * d_y + c]);
                }
            }
            Window { x, y }
        })
        .collect();
    WindowedDataset::from_windows(windows, m, ds.stride(), d_x, d_y, Kind::Continuous)
}

// --- Ising channel -----------------------------------------------------------

/// Input policy for the Ising channel: symbols either i.i.d. uniform or
/// emitted by a probabilistic finite-state machine that observes its own
/// state `q`, the channel state `s` (previous input), and the fed-back
/// output `y`.
#[derive(Debug, Clone)]
pub enum IsingPolicy {
    IidUniform,
    Fsm(FsmPolicy),
}

/// Finite-state input policy: `delta[q][s][y]` is the next state and
/// `pi[q][s]` the probability of emitting `x = 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FsmPolicy {
    pub states: usize,
    pub q0: usize,
    pub delta: Vec<Vec<Vec<usize>>>,
    pub pi: Vec<Vec<f64>>,
}

impl FsmPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.states == 0 {
            return Err(Error::InvalidPolicy("need at least one state".into()));
        }
        if self.q0 >= self.states {
            return Err(Error::InvalidPolicy(format!(
                "initial state {} out of range",
                self.q0
            )));
        }
        if self.delta.len() != self.states || self.pi.len() != self.states {
            return Err(Error::InvalidPolicy(
                "delta and pi must have one row per state".into(),
            ));
        }
        for q in 0..self.states {
            if self.delta[q].len() != 2 || self.pi[q].len() != 2 {
                return Err(Error::InvalidPolicy(format!(
                    "state {q}: tables must be indexed by s in {{0,1}}"
                )));
            }
            for s in 0..2 {
                if self.delta[q][s].len() != 2 {
                    return Err(Error::InvalidPolicy(format!(
                        "state {q}, s={s}: delta must be indexed by y in {{0,1}}"
                    )));
                }
                for y in 0..2 {
                    if self.delta[q][s][y] >= self.states {
                        return Err(Error::InvalidPolicy(format!(
                            "delta[{q}][{s}][{y}] = {} out of range",
                            self.delta[q][s][y]
                        )));
                    }
                }
                let p = self.pi[q][s];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidPolicy(format!(
                        "pi[{q}][{s}] = {p} is not a probability"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let policy: FsmPolicy = serde_json::from_str(&text)?;
        policy.validate()?;
        Ok(policy)
    }
}

impl IsingPolicy {
    /// Parses either the literal `iid` or a path to a policy JSON file.
    pub fn from_spec(spec: &str) -> Result<Self> {
        if spec == "iid" {
            Ok(IsingPolicy::IidUniform)
        } else {
            Ok(IsingPolicy::Fsm(FsmPolicy::load(std::path::Path::new(spec))?))
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            IsingPolicy::IidUniform => Ok(()),
            IsingPolicy::Fsm(f) => f.validate(),
        }
    }

    fn q0(&self) -> usize {
        match self {
            IsingPolicy::IidUniform => 0,
            IsingPolicy::Fsm(f) => f.q0,
        }
    }
    fn p_one(&self, q: usize, s: u8) -> f64 {
        match self {
            IsingPolicy::IidUniform => 0.5,
            IsingPolicy::Fsm(f) => f.pi[q][s as usize],
        }
    }
    fn next_state(&self, q: usize, s: u8, y: u8) -> usize {
        match self {
            IsingPolicy::IidUniform => 0,
            IsingPolicy::Fsm(f) => f.delta[q][s as usize][y as usize],
        }
    }
}

/// Samples windows of the Ising channel: `s_1 ~ Ber(1/2)`, then per step
/// `x_t ~ pi(.|q_t, s_t)`, `y_t = x_t` when `x_t = s_t` and otherwise a
/// fair coin over `{x_t, s_t}`, `q_{t+1} = delta(q_t, s_t, y_t)`,
/// `s_{t+1} = x_t`.
pub fn ising_sample(
    policy: &IsingPolicy,
    n_windows: usize,
    m: usize,
    seed: u64,
) -> Result<WindowedDataset> {
    policy.validate()?;
    if m == 0 || n_windows == 0 {
        return Err(Error::InvalidArgument("need m >= 1 and at least one window".into()));
    }
    let windows: Vec<Window> = (0..n_windows)
        .map(|w| {
            let mut rng = window_rng(seed, w);
            let mut x = Vec::with_capacity(m);
            let mut y = Vec::with_capacity(m);
            let mut s: u8 = rng.random_bool(0.5) as u8;
            let mut q = policy.q0();
            for _ in 0..m {
                let xt: u8 = rng.random_bool(policy.p_one(q, s)) as u8;
                let yt: u8 = if xt == s {
                    xt
                } else if rng.random_bool(0.5) {
                    xt
                } else {
                    s
                };
                x.push(xt as f64);
                y.push(yt as f64);
                q = policy.next_state(q, s, yt);
                s = xt;
            }
            Window { x, y }
        })
        .collect();
    WindowedDataset::from_windows(
        windows,
        m,
        m,
        1,
        1,
        Kind::Discrete { alphabet_size: 2 },
    )
}

/// Exact joint law of `(X^m, Y^m)` under a policy, marginalizing the
/// initial channel state and the FSM state via forward recursion.
pub fn ising_joint_pmf(policy: &IsingPolicy, m: usize) -> Result<JointPMF> {
    policy.validate()?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if m > 8 {
        return Err(Error::Resource(format!(
            "exact Ising enumeration holds 4^m cells; m = {m} exceeds the m <= 8 limit"
        )));
    }
    let cells = 1usize << (2 * m);
    let mut probs = vec![0.0f64; cells];
    // digits of `path`: x_1..x_m then y_1..y_m, big-endian within blocks
    for path in 0..cells {
        let digit = |k: usize| ((path >> (2 * m - 1 - k)) & 1) as u8;
        let mut total = 0.0;
        for s1 in 0..2u8 {
            let mut p = 0.5;
            let mut s = s1;
            let mut q = policy.q0();
            for t in 0..m {
                let xt = digit(t);
                let yt = digit(m + t);
                let px = if xt == 1 {
                    policy.p_one(q, s)
                } else {
                    1.0 - policy.p_one(q, s)
                };
                let py = if xt == s {
                    if yt == xt {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    0.5
                };
                p *= px * py;
                if p == 0.0 {
                    break;
                }
                q = policy.next_state(q, s, yt);
                s = xt;
            }
            total += p;
        }
        probs[path] = total;
    }
    JointPMF::from_probs(m, 2, 2, probs)
}

// --- Explicit joint distributions ---------------------------------------------

/// Dense probability table over `(x^m, y^m)` with per-step alphabets
/// `card_x`, `card_y`. Coordinate `k < m` is `X_{k+1}`; coordinate
/// `m + k` is `Y_{k+1}`. The flat index runs big-endian over the x digits
/// then the y digits.
#[derive(Debug, Clone)]
pub struct JointPMF {
    m: usize,
    card_x: usize,
    card_y: usize,
    probs: Vec<f64>,
}

impl JointPMF {
    pub fn from_probs(m: usize, card_x: usize, card_y: usize, probs: Vec<f64>) -> Result<Self> {
        if m == 0 || card_x == 0 || card_y == 0 {
            return Err(Error::InvalidArgument("empty table shape".into()));
        }
        let cells = card_x
            .checked_pow(m as u32)
            .zip(card_y.checked_pow(m as u32))
            .and_then(|(a, b)| a.checked_mul(b))
            .ok_or_else(|| Error::Resource("table size overflows".into()))?;
        if cells > 1 << 26 {
            return Err(Error::Resource(format!(
                "table of {cells} cells exceeds the 2^26 limit"
            )));
        }
        if probs.len() != cells {
            return Err(Error::InvalidArgument(format!(
                "table has {} cells, expected {cells}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| *p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidArgument("probabilities must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(JointPMF {
            m,
            card_x,
            card_y,
            probs,
        })
    }

    /// Dirichlet(1)-distributed random joint, for oracle-backed testing.
    pub fn random_dirichlet<R: Rng>(m: usize, card_x: usize, card_y: usize, rng: &mut R) -> Result<Self> {
        let cells = card_x.pow(m as u32) * card_y.pow(m as u32);
        let mut probs: Vec<f64> = (0..cells)
            .map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln())
            .collect();
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        // renormalize exactly enough for the 1e-12 gate
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        Self::from_probs(m, card_x, card_y, probs)
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn card_x(&self) -> usize {
        self.card_x
    }
    pub fn card_y(&self) -> usize {
        self.card_y
    }
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
    /// Cardinality of coordinate `k` in `[0, 2m)`.
    pub fn card(&self, coord: usize) -> usize {
        if coord < self.m {
            self.card_x
        } else {
            self.card_y
        }
    }

    /// Digit of `cell` at coordinate `coord` (x digits precede y digits,
    /// each block big-endian).
    pub fn digit(&self, cell: usize, coord: usize) -> usize {
        let y_span = self.card_y.pow(self.m as u32);
        if coord < self.m {
            let xs = cell / y_span;
            let shift = self.card_x.pow((self.m - 1 - coord) as u32);
            (xs / shift) % self.card_x
        } else {
            let ys = cell % y_span;
            let shift = self.card_y.pow((2 * self.m - 1 - coord) as u32);
            (ys / shift) % self.card_y
        }
    }

    /// The same joint with the roles of X and Y exchanged.
    pub fn swapped(&self) -> JointPMF {
        let cells = self.probs.len();
        let y_span = self.card_y.pow(self.m as u32);
        let x_span = self.card_x.pow(self.m as u32);
        let mut probs = vec![0.0; cells];
        for (cell, &p) in self.probs.iter().enumerate() {
            let xs = cell / y_span;
            let ys = cell % y_span;
            probs[ys * x_span + xs] = p;
        }
        JointPMF {
            m: self.m,
            card_x: self.card_y,
            card_y: self.card_x,
            probs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{gaussian_cmi, sample_covariance, CovarianceEstimate};

    #[test]
    fn zero_weights_give_iid_standard_normal() {
        let model = GaussianARModel::zero(4);
        let cov = ar_joint_covariance(&model).unwrap();
        let identity = DMatrix::<f64>::identity(8, 8);
        assert!((cov.cov() - &identity).abs().max() < 1e-14);

        let ds = ar_sample(&model, 50_000, 3).unwrap();
        let k = sample_covariance(&ds.stacked_vectors(), false).unwrap();
        assert!((k.matrix() - &identity).abs().max() < 0.05);
    }

    #[test]
    fn gamma_model_second_moments() {
        // Y_t = 0.5 X_t + N: Cov(X_t, Y_t) = 0.5, Var(Y_t) = 1.25
        let mut model = GaussianARModel::zero(3);
        model.beta_x[0] = 0.5;
        let cov = ar_joint_covariance(&model).unwrap();
        let k = cov.cov();
        assert!((k[(0, 3)] - 0.5).abs() < 1e-14);
        assert!((k[(3, 3)] - 1.25).abs() < 1e-14);
        assert!(k[(0, 4)].abs() < 1e-14);
    }

    #[test]
    fn sample_covariance_matches_exact_unrolling() {
        let mut model = GaussianARModel::zero(4);
        model.alpha_x[1] = 0.3;
        model.alpha_y[1] = 0.3;
        model.beta_x[1] = 0.3;
        model.beta_y[1] = 0.3;
        model.beta_x[0] = 0.3;
        let exact = ar_joint_covariance(&model).unwrap();
        let ds = ar_sample(&model, 400_000, 11).unwrap();
        let k = sample_covariance(&ds.stacked_vectors(), false).unwrap();
        let max_dev = (k.matrix() - exact.cov()).abs().max();
        assert!(max_dev < 0.02, "max deviation {max_dev}");
    }

    #[test]
    fn y_first_instantaneous_coupling() {
        let mut model = GaussianARModel::zero(2);
        model.alpha_y[0] = 0.7; // X_t depends on Y_t
        let cov = ar_joint_covariance(&model).unwrap();
        let k = cov.cov();
        assert!((k[(0, 2)] - 0.7).abs() < 1e-14);
        assert!((k[(0, 0)] - 1.49).abs() < 1e-14);
        let ds = ar_sample(&model, 200_000, 5).unwrap();
        let ks = sample_covariance(&ds.stacked_vectors(), false).unwrap();
        assert!((ks.matrix()[(0, 2)] - 0.7).abs() < 0.02);
    }

    #[test]
    fn invalid_models_rejected() {
        let mut model = GaussianARModel::zero(2);
        model.alpha_x[0] = 0.5;
        assert!(matches!(model.validate(), Err(Error::InvalidModel(_))));
        let mut model = GaussianARModel::zero(2);
        model.alpha_y[0] = 0.5;
        model.beta_x[0] = 0.5;
        assert!(matches!(model.validate(), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn shift_zero_identity_is_noop() {
        let model = GaussianARModel::iid_correlated(4, 0.9);
        let ds = ar_sample(&model, 10, 1).unwrap();
        let out = nonlinear_shift(&ds, 0, MonotoneMap::Identity, MonotoneMap::Identity).unwrap();
        for (a, b) in ds.windows().iter().zip(out.windows()) {
            assert_eq!(a.x, b.x);
            assert_eq!(a.y, b.y);
        }
    }

    #[test]
    fn shift_moves_hot_pair() {
        // y'_t = y_{t-2}: the pair (X_1, Y'_3) is the correlated one
        let model = GaussianARModel::iid_correlated(4, 0.9);
        let ds = ar_sample(&model, 5, 1).unwrap();
        let out = nonlinear_shift(&ds, 2, MonotoneMap::Identity, MonotoneMap::Identity).unwrap();
        for (w, orig) in out.windows().iter().zip(ds.windows()) {
            assert_eq!(w.y[2], orig.y[0]);
            assert_eq!(w.y[0], orig.y[2]);
        }
        assert!(nonlinear_shift(&ds, 4, MonotoneMap::Identity, MonotoneMap::Identity).is_err());
    }

    #[test]
    fn signed_log_is_odd_and_monotone() {
        let f = MonotoneMap::SignedLog;
        assert_eq!(f.apply(0.0), 0.0);
        assert!((f.apply(1.0) - 2.0f64.ln()).abs() < 1e-15);
        assert_eq!(f.apply(-1.0), -f.apply(1.0));
        assert!(f.apply(2.0) > f.apply(1.0));
    }

    #[test]
    fn ising_iid_single_step_pmf() {
        // marginalizing s_1: P(y = x | x) = 3/4
        let pmf = ising_joint_pmf(&IsingPolicy::IidUniform, 1).unwrap();
        // cells: (x, y) = (0,0), (0,1), (1,0), (1,1)
        assert!((pmf.probs()[0] - 0.375).abs() < 1e-15);
        assert!((pmf.probs()[1] - 0.125).abs() < 1e-15);
        assert!((pmf.probs()[2] - 0.125).abs() < 1e-15);
        assert!((pmf.probs()[3] - 0.375).abs() < 1e-15);
    }

    #[test]
    fn ising_pmf_normalized_for_random_policy() {
        let policy = IsingPolicy::Fsm(FsmPolicy {
            states: 2,
            q0: 0,
            delta: vec![
                vec![vec![1, 0], vec![0, 1]],
                vec![vec![0, 0], vec![1, 1]],
            ],
            pi: vec![vec![0.3, 0.8], vec![0.6, 0.1]],
        });
        let pmf = ising_joint_pmf(&policy, 5).unwrap();
        let total: f64 = pmf.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ising_sample_matches_exact_pmf() {
        let m = 3;
        let pmf = ising_joint_pmf(&IsingPolicy::IidUniform, m).unwrap();
        let ds = ising_sample(&IsingPolicy::IidUniform, 400_000, m, 9).unwrap();
        let mut freq = vec![0.0; pmf.probs().len()];
        for w in ds.windows() {
            let mut cell = 0usize;
            for t in 0..m {
                cell = cell * 2 + w.x[t] as usize;
            }
            for t in 0..m {
                cell = cell * 2 + w.y[t] as usize;
            }
            freq[cell] += 1.0;
        }
        let n = ds.n_windows() as f64;
        let tv: f64 = freq
            .iter()
            .zip(pmf.probs())
            .map(|(f, p)| (f / n - p).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.005, "total variation {tv}");
    }

    #[test]
    fn always_zero_policy_is_deterministic() {
        let policy = IsingPolicy::Fsm(FsmPolicy {
            states: 1,
            q0: 0,
            delta: vec![vec![vec![0, 0], vec![0, 0]]],
            pi: vec![vec![0.0, 0.0]],
        });
        let ds = ising_sample(&policy, 100, 4, 2).unwrap();
        assert!(ds.windows().iter().all(|w| w.x.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn pmf_digit_round_trip() {
        let pmf = JointPMF::from_probs(2, 2, 3, {
            let mut v = vec![0.0; 4 * 9];
            v[0] = 1.0;
            v
        })
        .unwrap();
        // cell index for digits x=(1,0), y=(2,1): (1*2+0)*9 + (2*3+1) = 25
        assert_eq!(pmf.digit(25, 0), 1);
        assert_eq!(pmf.digit(25, 1), 0);
        assert_eq!(pmf.digit(25, 2), 2);
        assert_eq!(pmf.digit(25, 3), 1);
    }

    #[test]
    fn swapped_pmf_reindexes() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let pmf = JointPMF::random_dirichlet(2, 2, 2, &mut rng).unwrap();
        let sw = pmf.swapped();
        for cell in 0..pmf.probs().len() {
            let x = (pmf.digit(cell, 0), pmf.digit(cell, 1));
            let y = (pmf.digit(cell, 2), pmf.digit(cell, 3));
            let sw_cell = (y.0 * 2 + y.1) * 4 + (x.0 * 2 + x.1);
            assert_eq!(pmf.probs()[cell], sw.probs()[sw_cell]);
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let model = GaussianARModel::iid_correlated(3, 0.5);
        let a = ar_sample(&model, 4, 42).unwrap();
        let b = ar_sample(&model, 4, 42).unwrap();
        for (wa, wb) in a.windows().iter().zip(b.windows()) {
            assert_eq!(wa.x, wb.x);
            assert_eq!(wa.y, wb.y);
        }
        let c = ar_sample(&model, 4, 43).unwrap();
        assert_ne!(a.windows()[0].x, c.windows()[0].x);
    }

    #[test]
    fn gaussian_cmi_of_gamma_model_diag() {
        // rho^2 = 0.25/1.25 = 0.2 -> entry = -ln(0.8)/2
        let mut model = GaussianARModel::zero(2);
        model.beta_x[0] = 0.5;
        let joint = ar_joint_covariance(&model).unwrap();
        let k = CovarianceEstimate::exact(joint.cov().clone()).unwrap();
        let cmi = gaussian_cmi(&k, &[0], &[2], &[]).unwrap();
        assert!((cmi - (-0.5 * 0.8f64.ln())).abs() < 1e-12);
        assert!((cmi - 0.1116).abs() < 1e-4);
    }
}
