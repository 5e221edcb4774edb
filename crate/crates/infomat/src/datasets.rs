//! Paired sequential sample data: windowing, centering, and persistence.
//!
//! A [`SequencePair`] is a raw recording of two interacting sequences; a
//! [`WindowedDataset`] slices it into length-`m` windows that estimators
//! treat as i.i.d. draws of the joint block `(X^m, Y^m)`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Sample kind: continuous real values or discrete symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Continuous,
    /// Symbols in `[0, alphabet_size)`, one alphabet shared per dimension.
    Discrete { alphabet_size: u16 },
}

impl Kind {
    pub fn is_discrete(&self) -> bool {
        matches!(self, Kind::Discrete { .. })
    }
}

/// Two aligned sequences `x: [n_steps x d_x]` and `y: [n_steps x d_y]`,
/// stored row-major by time step.
#[derive(Debug, Clone)]
pub struct SequencePair {
    x: Vec<f64>,
    y: Vec<f64>,
    n_steps: usize,
    d_x: usize,
    d_y: usize,
    kind: Kind,
}

impl SequencePair {
    pub fn new(
        x: Vec<f64>,
        y: Vec<f64>,
        n_steps: usize,
        d_x: usize,
        d_y: usize,
        kind: Kind,
    ) -> Result<Self> {
        if d_x == 0 || d_y == 0 {
            return Err(Error::InvalidArgument(
                "per-step dimensions must be positive".into(),
            ));
        }
        if x.len() != n_steps * d_x || y.len() != n_steps * d_y {
            return Err(Error::InvalidArgument(format!(
                "data length mismatch: x has {} values (expected {}), y has {} (expected {})",
                x.len(),
                n_steps * d_x,
                y.len(),
                n_steps * d_y
            )));
        }
        let pair = SequencePair {
            x,
            y,
            n_steps,
            d_x,
            d_y,
            kind,
        };
        pair.validate_values()?;
        Ok(pair)
    }

    fn validate_values(&self) -> Result<()> {
        match self.kind {
            Kind::Continuous => {
                if self.x.iter().chain(self.y.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "continuous data contains NaN or infinity".into(),
                    ));
                }
            }
            Kind::Discrete { alphabet_size } => {
                let a = alphabet_size as f64;
                for v in self.x.iter().chain(self.y.iter()) {
                    if v.fract() != 0.0 || *v < 0.0 || *v >= a {
                        return Err(Error::InvalidArgument(format!(
                            "discrete symbol {v} outside [0, {alphabet_size})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }
    pub fn d_x(&self) -> usize {
        self.d_x
    }
    pub fn d_y(&self) -> usize {
        self.d_y
    }
    pub fn kind(&self) -> Kind {
        self.kind
    }
    pub fn x(&self) -> &[f64] {
        &self.x
    }
    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

/// One length-`m` slice of a pair, row-major by time step.
#[derive(Debug, Clone)]
pub struct Window {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// N windows of paired length-`m` sequences, the substrate of every
/// estimator in this crate.
#[derive(Debug, Clone)]
pub struct WindowedDataset {
    windows: Vec<Window>,
    m: usize,
    stride: usize,
    centered: bool,
    d_x: usize,
    d_y: usize,
    kind: Kind,
}

impl WindowedDataset {
    pub fn from_windows(
        windows: Vec<Window>,
        m: usize,
        stride: usize,
        d_x: usize,
        d_y: usize,
        kind: Kind,
    ) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::InvalidArgument("dataset needs at least one window".into()));
        }
        for w in &windows {
            if w.x.len() != m * d_x || w.y.len() != m * d_y {
                return Err(Error::InvalidArgument("window length mismatch".into()));
            }
        }
        Ok(WindowedDataset {
            windows,
            m,
            stride,
            centered: false,
            d_x,
            d_y,
            kind,
        })
    }

    pub fn n_windows(&self) -> usize {
        self.windows.len()
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn stride(&self) -> usize {
        self.stride
    }
    pub fn centered(&self) -> bool {
        self.centered
    }
    pub fn d_x(&self) -> usize {
        self.d_x
    }
    pub fn d_y(&self) -> usize {
        self.d_y
    }
    pub fn kind(&self) -> Kind {
        self.kind
    }
    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    /// Value of coordinate `c` of X at time `t` (0-based) in window `w`.
    pub fn x_at(&self, w: usize, t: usize, c: usize) -> f64 {
        self.windows[w].x[t * self.d_x + c]
    }
    /// Value of coordinate `c` of Y at time `t` (0-based) in window `w`.
    pub fn y_at(&self, w: usize, t: usize, c: usize) -> f64 {
        self.windows[w].y[t * self.d_y + c]
    }

    /// Stacks each window into one vector ordered `(X_1..X_m, Y_1..Y_m)`,
    /// the coordinate layout shared with [`crate::gauss::JointGaussianModel`].
    pub fn stacked_vectors(&self) -> Vec<Vec<f64>> {
        self.windows
            .iter()
            .map(|w| {
                let mut v = Vec::with_capacity(w.x.len() + w.y.len());
                v.extend_from_slice(&w.x);
                v.extend_from_slice(&w.y);
                v
            })
            .collect()
    }

    /// Exchanges the roles of X and Y in every window.
    pub fn swapped(&self) -> WindowedDataset {
        WindowedDataset {
            windows: self
                .windows
                .iter()
                .map(|w| Window {
                    x: w.y.clone(),
                    y: w.x.clone(),
                })
                .collect(),
            m: self.m,
            stride: self.stride,
            centered: self.centered,
            d_x: self.d_y,
            d_y: self.d_x,
            kind: self.kind,
        }
    }

    /// Concatenates the windows back into a single pair of length `N*m`.
    pub fn to_sequence_pair(&self) -> Result<SequencePair> {
        let n = self.n_windows() * self.m;
        let mut x = Vec::with_capacity(n * self.d_x);
        let mut y = Vec::with_capacity(n * self.d_y);
        for w in &self.windows {
            x.extend_from_slice(&w.x);
            y.extend_from_slice(&w.y);
        }
        SequencePair::new(x, y, n, self.d_x, self.d_y, self.kind)
    }
}

/// Slices `pair` into windows of length `m` taken at offsets
/// `0, stride, 2*stride, ...`; a trailing partial window is discarded.
pub fn window(pair: &SequencePair, m: usize, stride: usize) -> Result<WindowedDataset> {
    if m == 0 || m > pair.n_steps {
        return Err(Error::InvalidArgument(format!(
            "window length {} must be in [1, {}]",
            m, pair.n_steps
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be positive".into()));
    }
    let n_windows = (pair.n_steps - m) / stride + 1;
    let mut windows = Vec::with_capacity(n_windows);
    for w in 0..n_windows {
        let start = w * stride;
        windows.push(Window {
            x: pair.x[start * pair.d_x..(start + m) * pair.d_x].to_vec(),
            y: pair.y[start * pair.d_y..(start + m) * pair.d_y].to_vec(),
        });
    }
    WindowedDataset::from_windows(windows, m, stride, pair.d_x, pair.d_y, pair.kind)
}

/// Removes, per time index and coordinate, the sample mean across windows.
///
/// Each time index is a distinct coordinate of the block `(X^m, Y^m)`, so
/// the mean is taken across windows rather than globally.
pub fn center(ds: &WindowedDataset) -> Result<WindowedDataset> {
    if ds.kind.is_discrete() {
        return Err(Error::InvalidArgument(
            "centering is meaningless for discrete symbols".into(),
        ));
    }
    let n = ds.n_windows() as f64;
    let mut mean_x = vec![0.0; ds.m * ds.d_x];
    let mut mean_y = vec![0.0; ds.m * ds.d_y];
    for w in &ds.windows {
        for (acc, v) in mean_x.iter_mut().zip(&w.x) {
            *acc += v;
        }
        for (acc, v) in mean_y.iter_mut().zip(&w.y) {
            *acc += v;
        }
    }
    for v in mean_x.iter_mut().chain(mean_y.iter_mut()) {
        *v /= n;
    }
    let windows = ds
        .windows
        .iter()
        .map(|w| Window {
            x: w.x.iter().zip(&mean_x).map(|(v, mu)| v - mu).collect(),
            y: w.y.iter().zip(&mean_y).map(|(v, mu)| v - mu).collect(),
        })
        .collect();
    Ok(WindowedDataset {
        windows,
        m: ds.m,
        stride: ds.stride,
        centered: true,
        d_x: ds.d_x,
        d_y: ds.d_y,
        kind: ds.kind,
    })
}

// --- SPD1 binary persistence ---------------------------------------------

const SPD1_MAGIC: &[u8; 4] = b"SPD1";
const SPD1_HEADER_LEN: u64 = 24;

/// Writes a pair in the SPD1 binary format (little-endian).
pub fn write_dataset(pair: &SequencePair, path: &Path) -> Result<()> {
    let (kind_byte, alphabet_byte) = match pair.kind {
        Kind::Continuous => (0u8, 0u8),
        Kind::Discrete { alphabet_size } => {
            if alphabet_size > 255 {
                return Err(Error::InvalidArgument(format!(
                    "SPD1 stores the alphabet size in one byte; {alphabet_size} does not fit"
                )));
            }
            (1u8, alphabet_size as u8)
        }
    };
    let mut f = File::create(path)?;
    f.write_all(SPD1_MAGIC)?;
    f.write_all(&1u32.to_le_bytes())?;
    f.write_all(&(pair.n_steps as u32).to_le_bytes())?;
    f.write_all(&(pair.d_x as u32).to_le_bytes())?;
    f.write_all(&(pair.d_y as u32).to_le_bytes())?;
    f.write_all(&[kind_byte, alphabet_byte, 0, 0])?;
    let mut buf = Vec::new();
    for t in 0..pair.n_steps {
        for c in 0..pair.d_x {
            push_value(&mut buf, pair.x[t * pair.d_x + c], kind_byte);
        }
        for c in 0..pair.d_y {
            push_value(&mut buf, pair.y[t * pair.d_y + c], kind_byte);
        }
    }
    f.write_all(&buf)?;
    Ok(())
}

fn push_value(buf: &mut Vec<u8>, v: f64, kind_byte: u8) {
    if kind_byte == 0 {
        buf.extend_from_slice(&v.to_le_bytes());
    } else {
        buf.push(v as u8);
    }
}

/// Reads a pair from the SPD1 binary format, reporting the byte offset of
/// any malformed field.
pub fn read_dataset(path: &Path) -> Result<SequencePair> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < SPD1_HEADER_LEN as usize {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            message: format!("header truncated: {} of {} bytes", bytes.len(), SPD1_HEADER_LEN),
        });
    }
    if &bytes[0..4] != SPD1_MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: format!("bad magic {:?}, expected \"SPD1\"", &bytes[0..4]),
        });
    }
    let read_u32 = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let version = read_u32(4);
    if version != 1 {
        return Err(Error::Format {
            offset: 4,
            message: format!("unsupported version {version}"),
        });
    }
    let n_steps = read_u32(8) as usize;
    let d_x = read_u32(12) as usize;
    let d_y = read_u32(16) as usize;
    let kind_byte = bytes[20];
    let alphabet = bytes[21];
    let kind = match kind_byte {
        0 => Kind::Continuous,
        1 => Kind::Discrete {
            alphabet_size: alphabet as u16,
        },
        k => {
            return Err(Error::Format {
                offset: 20,
                message: format!("unknown kind byte {k}"),
            })
        }
    };
    let elem = if kind_byte == 0 { 8 } else { 1 };
    let expected = n_steps * (d_x + d_y) * elem;
    let payload = &bytes[SPD1_HEADER_LEN as usize..];
    if payload.len() < expected {
        return Err(Error::Format {
            offset: SPD1_HEADER_LEN + payload.len() as u64,
            message: format!(
                "payload truncated: header promises {expected} bytes, found {}",
                payload.len()
            ),
        });
    }
    let mut x = Vec::with_capacity(n_steps * d_x);
    let mut y = Vec::with_capacity(n_steps * d_y);
    let mut at = 0usize;
    for _ in 0..n_steps {
        for _ in 0..d_x {
            x.push(parse_value(payload, &mut at, kind_byte));
        }
        for _ in 0..d_y {
            y.push(parse_value(payload, &mut at, kind_byte));
        }
    }
    SequencePair::new(x, y, n_steps, d_x, d_y, kind).map_err(|e| match e {
        Error::InvalidArgument(message) => Error::Format {
            offset: SPD1_HEADER_LEN,
            message,
        },
        other => other,
    })
}

fn parse_value(payload: &[u8], at: &mut usize, kind_byte: u8) -> f64 {
    if kind_byte == 0 {
        let v = f64::from_le_bytes(payload[*at..*at + 8].try_into().unwrap());
        *at += 8;
        v
    } else {
        let v = payload[*at] as f64;
        *at += 1;
        v
    }
}

/// Imports a pair from CSV: one row per time step, `d_x` x-columns then
/// `d_y` y-columns; lines starting with `#` are ignored.
pub fn read_csv_pair(path: &Path, d_x: usize, d_y: usize, kind: Kind) -> Result<SequencePair> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut n_steps = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != d_x + d_y {
            return Err(Error::InvalidArgument(format!(
                "line {}: expected {} columns, found {}",
                lineno + 1,
                d_x + d_y,
                fields.len()
            )));
        }
        for (k, field) in fields.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::InvalidArgument(format!("line {}: bad number {field:?}", lineno + 1))
            })?;
            if k < d_x {
                x.push(v);
            } else {
                y.push(v);
            }
        }
        n_steps += 1;
    }
    SequencePair::new(x, y, n_steps, d_x, d_y, kind)
}
