//! Quantized feedback and the per-TX distributed channel estimates.
//!
//! A [`CsitAllocation`] says, for every transmitter `j` and every channel row
//! `i` (the channels from all TXs to RX `i`), how precisely TX `j` knows that
//! row and which column blocks of it are covered. [`build_distributed_csit`]
//! turns a true channel and an allocation into one [`LocalEstimate`] per TX.

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{AntennaConfig, ChannelRealization, CMatrix, C64};
use crate::rng::{complex_normal, rng_for};

/// Largest RVQ codebook we are willing to materialize (2^16 codewords).
pub const RVQ_MAX_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    Exact,
    Bits(u32),
    None,
}

impl Precision {
    /// `false` for `None` and for zero-bit feedback.
    pub fn is_informative(self) -> bool {
        !matches!(self, Precision::None | Precision::Bits(0))
    }

    pub fn bits(self) -> u64 {
        match self {
            Precision::Bits(b) => u64::from(b),
            _ => 0,
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Precision::Exact => f.write_str("exact"),
            Precision::Bits(b) => write!(f, "bits:{b}"),
            Precision::None => f.write_str("none"),
        }
    }
}

impl FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(Precision::Exact),
            "none" => Ok(Precision::None),
            _ => s
                .strip_prefix("bits:")
                .and_then(|b| b.parse().ok())
                .map(Precision::Bits)
                .ok_or_else(|| format!("unknown precision `{s}`")),
        }
    }
}

/// Leading `rows × cols` corner of a channel block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BlockShape {
    pub rows: usize,
    pub cols: usize,
}

impl BlockShape {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }
    pub fn is_empty(self) -> bool {
        self.rows == 0 || self.cols == 0
    }
    pub fn scalars(self) -> u64 {
        (self.rows * self.cols) as u64
    }
}

/// What one TX knows about one channel row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowCsit {
    pub precision: Precision,
    /// Covered corner of each block `H[i][k]`, indexed by `k`.
    pub support: Vec<BlockShape>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AllocationSize {
    pub scalars: u64,
    pub bits: u64,
}

impl std::ops::Add for AllocationSize {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { scalars: self.scalars + o.scalars, bits: self.bits + o.bits }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsitAllocation {
    config: AntennaConfig,
    rows: Vec<RowCsit>,
}

impl CsitAllocation {
    /// Nobody knows anything.
    pub fn none(config: &AntennaConfig) -> Self {
        let k = config.users();
        let row = RowCsit {
            precision: Precision::None,
            support: vec![BlockShape::default(); k],
        };
        Self { config: config.clone(), rows: vec![row; k * k] }
    }

    /// Every TX knows the whole network channel exactly.
    pub fn complete(config: &AntennaConfig) -> Self {
        Self::from_fn(config, |_, _| Precision::Exact)
    }

    /// Full-row allocation with precision `f(tx, row)`.
    pub fn from_fn(config: &AntennaConfig, f: impl Fn(usize, usize) -> Precision) -> Self {
        let mut a = Self::none(config);
        for j in 0..config.users() {
            for i in 0..config.users() {
                a.set_row(j, i, f(j, i));
            }
        }
        a
    }

    pub fn config(&self) -> &AntennaConfig {
        &self.config
    }

    pub fn users(&self) -> usize {
        self.config.users()
    }

    pub fn entry(&self, tx: usize, row: usize) -> &RowCsit {
        &self.rows[tx * self.users() + row]
    }

    fn entry_mut(&mut self, tx: usize, row: usize) -> &mut RowCsit {
        let k = self.users();
        &mut self.rows[tx * k + row]
    }

    /// Sets the precision of a whole row (all blocks fully covered, or none).
    pub fn set_row(&mut self, tx: usize, row: usize, precision: Precision) {
        let c = self.config.clone();
        let e = self.entry_mut(tx, row);
        e.precision = precision;
        for (k, s) in e.support.iter_mut().enumerate() {
            *s = if precision == Precision::None {
                BlockShape::default()
            } else {
                BlockShape::new(c.n_rx(row), c.n_tx(k))
            };
        }
    }

    /// Gives TX `tx` exact knowledge of the leading `shape` corner of `H[row][from]`.
    pub fn set_exact_block(&mut self, tx: usize, row: usize, from: usize, shape: BlockShape) {
        let e = self.entry_mut(tx, row);
        e.precision = Precision::Exact;
        e.support[from] = shape;
    }

    /// Covered corner of `H[row][from]` at TX `tx` (empty if uninformative).
    pub fn known_block(&self, tx: usize, row: usize, from: usize) -> BlockShape {
        let e = self.entry(tx, row);
        if e.precision.is_informative() {
            e.support[from]
        } else {
            BlockShape::default()
        }
    }

    pub fn size(&self) -> AllocationSize {
        allocation_size(self)
    }

    /// Per-TX share of the allocation size.
    pub fn size_at(&self, tx: usize) -> AllocationSize {
        (0..self.users())
            .map(|i| row_size(self.entry(tx, i)))
            .fold(AllocationSize::default(), |a, b| a + b)
    }

    /// True when some TX lacks part of the network channel.
    pub fn is_strictly_incomplete(&self) -> bool {
        self.size().scalars < CsitAllocation::complete(&self.config).size().scalars
    }

    /// Merges two allocations whose informative rows do not overlap.
    pub fn union(&self, other: &CsitAllocation) -> Result<CsitAllocation> {
        if self.config != other.config {
            return Err(Error::DimensionMismatch("allocations over different networks".into()));
        }
        let mut out = self.clone();
        for (idx, (a, b)) in self.rows.iter().zip(&other.rows).enumerate() {
            match (a.precision.is_informative(), b.precision.is_informative()) {
                (true, true) => {
                    let k = self.users();
                    return Err(Error::DimensionMismatch(format!(
                        "allocations overlap at tx {}, row {}",
                        idx / k,
                        idx % k
                    )));
                }
                (false, true) => out.rows[idx] = b.clone(),
                _ => {}
            }
        }
        Ok(out)
    }

    /// Plain-text table, one line per `(tx, row)`:
    ///
    /// ```text
    /// # tx row precision support
    /// 0 1 bits:14 *
    /// 2 0 exact 1:2x1,2:2x3
    /// 1 1 none -
    /// ```
    ///
    /// `*` covers the full row, `-` nothing, otherwise a comma-separated list
    /// of `block:rowsxcols` corners.
    pub fn to_table(&self) -> String {
        let c = &self.config;
        let mut out = String::from("# tx row precision support\n");
        for j in 0..self.users() {
            for i in 0..self.users() {
                let e = self.entry(j, i);
                let full = e
                    .support
                    .iter()
                    .enumerate()
                    .all(|(k, s)| *s == BlockShape::new(c.n_rx(i), c.n_tx(k)));
                let support = if e.support.iter().all(|s| s.is_empty()) {
                    "-".to_string()
                } else if full {
                    "*".to_string()
                } else {
                    e.support
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| !s.is_empty())
                        .map(|(k, s)| format!("{k}:{}x{}", s.rows, s.cols))
                        .collect::<Vec<_>>()
                        .join(",")
                };
                let _ = writeln!(out, "{j} {i} {} {support}", e.precision);
            }
        }
        out
    }

    pub fn from_table(config: &AntennaConfig, text: &str) -> Result<CsitAllocation> {
        let k = config.users();
        let mut out = Self::none(config);
        let mut seen = vec![false; k * k];
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(err(format!("expected 4 fields, found {}", fields.len())));
            }
            let index = |s: &str| -> Result<usize> {
                let v: usize = s.parse().map_err(|_| err(format!("bad index `{s}`")))?;
                if v >= k {
                    return Err(err(format!("index {v} out of range")));
                }
                Ok(v)
            };
            let (j, i) = (index(fields[0])?, index(fields[1])?);
            if std::mem::replace(&mut seen[j * k + i], true) {
                return Err(err(format!("duplicate entry for tx {j}, row {i}")));
            }
            let precision: Precision = fields[2].parse().map_err(err)?;
            match fields[3] {
                "*" => out.set_row(j, i, precision),
                "-" => {
                    let e = out.entry_mut(j, i);
                    e.precision = precision;
                }
                list => {
                    let e = out.entry_mut(j, i);
                    e.precision = precision;
                    for item in list.split(',') {
                        let parsed = item.split_once(':').and_then(|(b, s)| {
                            let (r, c) = s.split_once('x')?;
                            Some((b.parse::<usize>().ok()?, r.parse().ok()?, c.parse().ok()?))
                        });
                        let (b, r, c) = parsed.ok_or_else(|| err(format!("bad block `{item}`")))?;
                        if b >= k || r > config.n_rx(i) || c > config.n_tx(b) {
                            return Err(err(format!("block `{item}` out of range")));
                        }
                        e.support[b] = BlockShape::new(r, c);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Parse { line: 0, msg: "missing (tx, row) entries".into() });
        }
        Ok(out)
    }
}

fn row_size(e: &RowCsit) -> AllocationSize {
    if !e.precision.is_informative() {
        return AllocationSize::default();
    }
    AllocationSize {
        scalars: e.support.iter().map(|s| s.scalars()).sum(),
        bits: e.precision.bits(),
    }
}

/// Scalars: complex coefficients covered by an informative entry, summed over
/// all TXs. Bits: sum of all `Bits` values.
pub fn allocation_size(alloc: &CsitAllocation) -> AllocationSize {
    alloc
        .rows
        .iter()
        .map(row_size)
        .fold(AllocationSize::default(), |a, b| a + b)
}

/// CSI scaling coefficients `alpha[row][tx]` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingAllocation {
    users: usize,
    alpha: Vec<f64>,
}

impl ScalingAllocation {
    /// `alpha` is row-major: `alpha[i * users + j]` is the coefficient of row
    /// `i` at TX `j`.
    pub fn new(users: usize, alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != users * users {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {users} users",
                alpha.len()
            )));
        }
        if let Some(a) = alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::Domain(format!("scaling coefficient {a} outside [0, 1]")));
        }
        Ok(Self { users, alpha })
    }

    pub fn uniform(users: usize, alpha: f64) -> Result<Self> {
        Self::new(users, vec![alpha; users * users])
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn alpha(&self, row: usize, tx: usize) -> f64 {
        self.alpha[row * self.users + tx]
    }

    pub fn min_alpha(&self) -> f64 {
        self.alpha.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Estimate error variance `P^(-alpha)` for a CSI scaling coefficient.
pub fn scaling_to_variance(alpha: f64, p: f64) -> f64 {
    p.powf(-alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizerKind {
    /// Random vector quantization with an explicit seeded codebook.
    Rvq,
    /// Additive complex Gaussian error of per-entry variance `2^(-B/m)`.
    Surrogate,
}

/// Random unit-norm codebook.
#[derive(Debug, Clone)]
pub struct RvqCodebook {
    dim: usize,
    words: Vec<Vec<C64>>,
}

impl RvqCodebook {
    pub fn random<R: Rng + ?Sized>(dim: usize, bits: u32, rng: &mut R) -> Result<Self> {
        if bits > RVQ_MAX_BITS {
            return Err(Error::CodebookTooLarge(bits));
        }
        let words = (0..1usize << bits)
            .map(|_| {
                let v: Vec<C64> = (0..dim).map(|_| complex_normal(rng, 1.0)).collect();
                let n = norm(&v);
                v.into_iter().map(|z| z / n).collect()
            })
            .collect();
        Ok(Self { dim, words })
    }

    /// Codebook from explicit words (normalized on the way in).
    pub fn from_words(words: Vec<Vec<C64>>) -> Result<Self> {
        let dim = words.first().map_or(0, |w| w.len());
        if words.iter().any(|w| w.len() != dim) {
            return Err(Error::DimensionMismatch("codewords of unequal length".into()));
        }
        let words = words
            .into_iter()
            .map(|w| {
                let n = norm(&w);
                w.into_iter().map(|z| z / n).collect()
            })
            .collect();
        Ok(Self { dim, words })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The codeword best aligned with `h`, rescaled to `|h|` and phase-aligned
    /// with it.
    pub fn quantize(&self, h: &[C64]) -> Result<Vec<C64>> {
        if h.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a {}-dimensional codebook",
                h.len(),
                self.dim
            )));
        }
        let hn = norm(h);
        let best = self
            .words
            .iter()
            .map(|w| inner(w, h))
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(idx, ip)| (idx, ip));
        let Some((idx, ip)) = best else {
            return Ok(vec![C64::new(0.0, 0.0); self.dim]);
        };
        let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { C64::new(1.0, 0.0) };
        Ok(self.words[idx].iter().map(|&w| w * phase * hn).collect())
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `a^H b`
fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Quantizes `h` with `bits` bits. Only the nonzero entries of `h` are
/// quantized; structural zeros stay zero. Returns `None` (no information) for
/// zero bits.
pub fn quantize_vector<R: Rng + ?Sized>(
    h: &[C64],
    bits: u32,
    kind: QuantizerKind,
    rng: &mut R,
) -> Result<Option<Vec<C64>>> {
    if kind == QuantizerKind::Rvq && bits > RVQ_MAX_BITS {
        return Err(Error::CodebookTooLarge(bits));
    }
    if bits == 0 {
        return Ok(None);
    }
    let support: Vec<usize> = (0..h.len()).filter(|&n| h[n] != C64::new(0.0, 0.0)).collect();
    let m = support.len();
    let mut out = h.to_vec();
    if m == 0 {
        return Ok(Some(out));
    }
    match kind {
        QuantizerKind::Surrogate => {
            let var = (-(bits as f64) / m as f64).exp2();
            for &n in &support {
                out[n] += complex_normal(rng, var);
            }
        }
        QuantizerKind::Rvq => {
            let restricted: Vec<C64> = support.iter().map(|&n| h[n]).collect();
            let book = RvqCodebook::random(m, bits, rng)?;
            let q = book.quantize(&restricted)?;
            for (&n, z) in support.iter().zip(q) {
                out[n] = z;
            }
        }
    }
    Ok(Some(out))
}

/// One TX's view of the network channel.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalEstimate {
    values: CMatrix,
    known: DMatrix<bool>,
}

impl LocalEstimate {
    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    pub fn is_known(&self, r: usize, c: usize) -> bool {
        self.known[(r, c)]
    }

    pub fn known_mask(&self) -> &DMatrix<bool> {
        &self.known
    }

    /// Estimate with unknown entries replaced by zero.
    pub fn zero_filled(&self) -> CMatrix {
        CMatrix::from_fn(self.values.nrows(), self.values.ncols(), |r, c| {
            if self.known[(r, c)] {
                self.values[(r, c)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// The family of per-TX estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributedCsit {
    config: AntennaConfig,
    snr: f64,
    estimates: Vec<LocalEstimate>,
}

impl DistributedCsit {
    pub fn config(&self) -> &AntennaConfig {
        &self.config
    }
    pub fn snr(&self) -> f64 {
        self.snr
    }
    pub fn estimate(&self, tx: usize) -> &LocalEstimate {
        &self.estimates[tx]
    }
    pub fn estimates(&self) -> &[LocalEstimate] {
        &self.estimates
    }
}

#[derive(Debug, Clone, Copy)]
pub enum CsitSource<'a> {
    Allocation(&'a CsitAllocation),
    Scaling(&'a ScalingAllocation),
}

/// Builds every TX's estimate from the true channel. Noise and codebooks are
/// drawn independently for each `(tx, row)` pair, so two TXs quantizing the
/// same row end up with different estimates.
pub fn build_distributed_csit(
    h: &ChannelRealization,
    source: CsitSource<'_>,
    kind: QuantizerKind,
    seed: u64,
) -> Result<DistributedCsit> {
    let config = h.config();
    let k = config.users();
    match source {
        CsitSource::Allocation(a) if a.config() != config => {
            return Err(Error::DimensionMismatch(
                "allocation and channel describe different networks".into(),
            ))
        }
        CsitSource::Scaling(s) if s.users() != k => {
            return Err(Error::DimensionMismatch(format!(
                "scaling allocation for {} users, channel has {k}",
                s.users()
            )))
        }
        _ => {}
    }
    let (nr, nc) = (config.total_rx(), config.total_tx());
    let full = h.matrix();
    let mut estimates = Vec::with_capacity(k);
    for j in 0..k {
        let mut values = CMatrix::zeros(nr, nc);
        let mut known = DMatrix::from_element(nr, nc, false);
        for i in 0..k {
            let mut rng = rng_for(seed, &[j as u64, i as u64]);
            let r0 = config.rx_offset(i);
            match source {
                CsitSource::Scaling(s) => {
                    let var = scaling_to_variance(s.alpha(i, j), h.snr());
                    for r in r0..r0 + config.n_rx(i) {
                        for c in 0..nc {
                            let z = full[(r, c)];
                            values[(r, c)] = if z != C64::new(0.0, 0.0) {
                                z + complex_normal(&mut rng, var)
                            } else {
                                z
                            };
                            known[(r, c)] = true;
                        }
                    }
                }
                CsitSource::Allocation(a) => {
                    let e = a.entry(j, i);
                    // Covered coordinates of the row, block by block.
                    let coords: Vec<(usize, usize)> = (0..k)
                        .flat_map(|b| {
                            let s = e.support[b];
                            let c0 = config.tx_offset(b);
                            (0..s.rows).flat_map(move |dr| (0..s.cols).map(move |dc| (r0 + dr, c0 + dc)))
                        })
                        .collect();
                    let est = match e.precision {
                        Precision::None => None,
                        Precision::Exact => Some(coords.iter().map(|&rc| full[rc]).collect()),
                        Precision::Bits(b) => {
                            let v: Vec<C64> = coords.iter().map(|&rc| full[rc]).collect();
                            quantize_vector(&v, b, kind, &mut rng)?
                        }
                    };
                    if let Some(est) = est {
                        for (&rc, z) in coords.iter().zip(est) {
                            values[rc] = z;
                            known[rc] = true;
                        }
                    }
                }
            }
        }
        estimates.push(LocalEstimate { values, known });
    }
    Ok(DistributedCsit { config: config.clone(), snr: h.snr(), estimates })
}

/// Wraps already-built estimates (used by tests and by callers that produce
/// estimates through another channel model).
pub fn distributed_csit_from_parts(
    config: &AntennaConfig,
    snr: f64,
    parts: Vec<(CMatrix, DMatrix<bool>)>,
) -> Result<DistributedCsit> {
    if parts.len() != config.users() {
        return Err(Error::DimensionMismatch("one estimate per TX required".into()));
    }
    let shape = (config.total_rx(), config.total_tx());
    let mut estimates = Vec::with_capacity(parts.len());
    for (values, known) in parts {
        if values.shape() != shape || known.shape() != shape {
            return Err(Error::DimensionMismatch("estimate shape".into()));
        }
        estimates.push(LocalEstimate { values, known });
    }
    Ok(DistributedCsit { config: config.clone(), snr, estimates })
}
