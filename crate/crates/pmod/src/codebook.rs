//! Rate-adapted codebook construction.
//!
//! Out of the `M` Gray-ordered arrangements of an initial vector, the
//! codebook keeps `N = ceil(2^(n R))` spread as evenly as possible along
//! the listing: the first `N - N0` selected positions step by
//! `ceil(M/N)`, the remaining `N0` by `floor(M/N)`, with `N0` the
//! smallest count that fits the tail inside `{0, ..., M-1}`. Message
//! indices map to Gray positions through [`SelectionPlan::gray_index`];
//! the real-valued inverse [`SelectionPlan::message_estimate`] is what
//! the candidate decoder rounds.
//!
//! Codewords are unit norm: the initial vector values are divided by the
//! template norm once, at build time.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // f64 math comes from the trait under no_std
use num_traits::{Float, ToPrimitive};

use crate::ivp::{self, InitialVector, IvpError};
use crate::mperm::{self, GrayRank, Lex2GrayTable, MpermError, SymbolSequence};

const CODEBOOK_MAGIC: &[u8; 4] = b"PMOD";
const FORMAT_VERSION: u32 = 1;

/// Guard for exact pairwise distance scans.
pub const DISTANCE_SCAN_GUARD: u64 = 100_000;

/// Errors from codebook construction, encoding, and the file format.
#[derive(Debug, Clone, PartialEq)]
pub enum CodebookError {
    /// `N` exceeds the number of available arrangements.
    RateTooHigh { needed: u64, available: u64 },
    /// Plan sizes must be at least 1.
    EmptySelection,
    /// The initial vector has zero norm (all values zero).
    ZeroNorm,
    /// Message index outside `{0, ..., N-1}`.
    MessageOutOfRange { message: u64, size: u64 },
    /// Pairwise scan requested beyond [`DISTANCE_SCAN_GUARD`].
    ScanTooLarge { size: u64 },
    /// A serialized codebook failed validation.
    BadFormat(&'static str),
    /// Underlying combinatorics error.
    Mperm(MpermError),
    /// Underlying initial vector error.
    Ivp(IvpError),
}

impl fmt::Display for CodebookError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodebookError::RateTooHigh { needed, available } => write!(
                f,
                "rate too high for this initial vector: need {needed} codewords, have {available}"
            ),
            CodebookError::EmptySelection => {
                write!(f, "selection must keep at least one codeword")
            }
            CodebookError::ZeroNorm => write!(f, "initial vector has zero norm"),
            CodebookError::MessageOutOfRange { message, size } => {
                write!(f, "message {message} out of range for code size {size}")
            }
            CodebookError::ScanTooLarge { size } => {
                write!(f, "pairwise scan over {size} codewords exceeds the guard")
            }
            CodebookError::BadFormat(reason) => write!(f, "bad codebook data: {reason}"),
            CodebookError::Mperm(e) => write!(f, "{e}"),
            CodebookError::Ivp(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CodebookError {}

impl From<MpermError> for CodebookError {
    fn from(e: MpermError) -> Self {
        CodebookError::Mperm(e)
    }
}

impl From<IvpError> for CodebookError {
    fn from(e: IvpError) -> Self {
        CodebookError::Ivp(e)
    }
}

/// Equidistant selection of `size` Gray positions out of `total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionPlan {
    /// Number of arrangements in the full listing (`M`).
    pub total: u64,
    /// Number of selected codewords (`N`).
    pub size: u64,
    /// Head spacing, `ceil(total/size)`.
    pub wide: u64,
    /// Tail spacing, `floor(total/size)`.
    pub narrow: u64,
    /// Number of tail selections (`N0`).
    pub tail_count: u64,
    /// Gray position where the tail begins (`n0`), the last head selection.
    pub tail_start: u64,
}

impl SelectionPlan {
    /// Builds the plan for `size` codewords out of `total` arrangements.
    ///
    /// `tail_count` is the smallest value in `{0, ..., size}` for which
    /// `wide*(size - tail_count - 1) + narrow*tail_count <= total - 1`;
    /// with that choice the selection spreads maximally and its last
    /// index lands on `total - 1` whenever the bound is met with equality.
    pub fn build(total: u64, size: u64) -> Result<SelectionPlan, CodebookError> {
        if size == 0 || total == 0 {
            return Err(CodebookError::EmptySelection);
        }
        if size > total {
            return Err(CodebookError::RateTooHigh { needed: size, available: total });
        }
        let wide = total.div_ceil(size);
        let narrow = total / size;
        let spread = wide * (size - 1);
        let tail_count = spread.saturating_sub(total - 1);
        debug_assert!(tail_count <= size);
        debug_assert!(wide * (size - tail_count - 1) + narrow * tail_count < total);
        let tail_start = wide * (size - tail_count - 1);
        Ok(SelectionPlan { total, size, wide, narrow, tail_count, tail_start })
    }

    /// Gray position of message `i`: head messages step by `wide`, tail
    /// messages continue from `tail_start` stepping by `narrow`. Injective
    /// and strictly increasing in `i`.
    pub fn gray_index(&self, message: u64) -> GrayRank {
        assert!(message < self.size, "message {message} out of range");
        let head_last = self.size - self.tail_count - 1;
        if message <= head_last {
            GrayRank(message * self.wide)
        } else {
            GrayRank(self.tail_start + (message - head_last) * self.narrow)
        }
    }

    /// Piecewise-affine inverse of [`Self::gray_index`] over the reals.
    ///
    /// Exact on selected positions; elsewhere it interpolates, and the
    /// caller rounds to the nearest message. Inputs are clamped to
    /// `[0, total-1]`.
    pub fn message_estimate(&self, gray: f64) -> f64 {
        let gray = gray.clamp(0.0, (self.total - 1) as f64);
        let head_last = (self.size - self.tail_count - 1) as f64;
        if gray <= self.tail_start as f64 {
            gray / self.wide as f64
        } else {
            head_last + (gray - self.tail_start as f64) / self.narrow as f64
        }
    }

    /// The selected Gray positions, strictly increasing.
    pub fn selected_indices(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.size).map(|i| self.gray_index(i).0)
    }
}

/// A built `(N, n)` code: normalized template, selection plan, Gray
/// listing, and the lex-to-Gray table.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    initial: InitialVector,
    unit_values: Vec<f64>,
    plan: SelectionPlan,
    listing: Vec<SymbolSequence>,
    table: Lex2GrayTable,
}

impl Codebook {
    /// Builds the code of `size` codewords over the arrangements of `initial`.
    pub fn with_size(initial: InitialVector, size: u64) -> Result<Codebook, CodebookError> {
        let unit_values = normalized_values(&initial)?;
        let total = mperm::multiset_count(initial.multiplicities());
        let total = total.to_u64().ok_or(MpermError::CountOverflow)?;
        let plan = SelectionPlan::build(total, size)?;
        let listing = mperm::gray_list(initial.multiplicities())?;
        let table = mperm::build_lex2gray_from(initial.multiplicities(), &listing)?;
        Ok(Codebook { initial, unit_values, plan, listing, table })
    }

    /// Builds the code for a target rate: `size = ceil(2^(n * rate))`.
    pub fn for_rate(initial: InitialVector, target_rate: f64) -> Result<Codebook, CodebookError> {
        let size = ivp::required_code_size(initial.n(), target_rate)?;
        Codebook::with_size(initial, size)
    }

    pub fn initial(&self) -> &InitialVector {
        &self.initial
    }

    /// Values of the unit-norm template, one per symbol.
    pub fn unit_values(&self) -> &[f64] {
        &self.unit_values
    }

    pub fn plan(&self) -> &SelectionPlan {
        &self.plan
    }

    /// Full Gray listing of all `M` arrangements.
    pub fn listing(&self) -> &[SymbolSequence] {
        &self.listing
    }

    pub fn table(&self) -> &Lex2GrayTable {
        &self.table
    }

    /// Code size `N`.
    pub fn size(&self) -> u64 {
        self.plan.size
    }

    /// Sequence length `n`.
    pub fn dim(&self) -> usize {
        self.initial.n()
    }

    /// Number of distinct symbols `k`.
    pub fn symbol_count(&self) -> usize {
        self.initial.k()
    }

    /// Multiplicity vector `m`.
    pub fn multiplicities(&self) -> &[u32] {
        self.initial.multiplicities()
    }

    /// Symbol sequence of message `i`.
    pub fn message_sequence(&self, message: u64) -> Result<&SymbolSequence, CodebookError> {
        if message >= self.plan.size {
            return Err(CodebookError::MessageOutOfRange { message, size: self.plan.size });
        }
        Ok(&self.listing[self.plan.gray_index(message).0 as usize])
    }

    /// Unit-norm codeword of message `i`.
    pub fn encode(&self, message: u64) -> Result<Vec<f64>, CodebookError> {
        let seq = self.message_sequence(message)?;
        Ok(seq.symbols().iter().map(|&s| self.unit_values[s as usize]).collect())
    }

    /// Squared distance between `y` and `scale * codeword(message)`,
    /// without materializing the codeword.
    pub fn distance_sq(&self, y: &[f64], scale: f64, message: u64) -> f64 {
        let seq = &self.listing[self.plan.gray_index(message).0 as usize];
        debug_assert_eq!(y.len(), seq.len());
        seq.symbols()
            .iter()
            .zip(y)
            .map(|(&s, &v)| {
                let d = v - scale * self.unit_values[s as usize];
                d * d
            })
            .sum()
    }

    /// Exact minimum pairwise distance over the `N` selected codewords.
    pub fn min_distance(&self) -> Result<f64, CodebookError> {
        if self.plan.size > DISTANCE_SCAN_GUARD {
            return Err(CodebookError::ScanTooLarge { size: self.plan.size });
        }
        let seqs: Vec<&SymbolSequence> =
            self.plan.selected_indices().map(|g| &self.listing[g as usize]).collect();
        Ok(self.min_distance_over(&seqs))
    }

    /// Exact minimum pairwise distance over all `M` arrangements, i.e. the
    /// full permutation modulation the code was carved from.
    pub fn full_min_distance(&self) -> Result<f64, CodebookError> {
        if self.plan.total > DISTANCE_SCAN_GUARD {
            return Err(CodebookError::ScanTooLarge { size: self.plan.total });
        }
        let seqs: Vec<&SymbolSequence> = self.listing.iter().collect();
        Ok(self.min_distance_over(&seqs))
    }

    fn min_distance_over(&self, seqs: &[&SymbolSequence]) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..seqs.len() {
            for j in i + 1..seqs.len() {
                let d: f64 = seqs[i]
                    .symbols()
                    .iter()
                    .zip(seqs[j].symbols())
                    .map(|(&a, &b)| {
                        let d = self.unit_values[a as usize] - self.unit_values[b as usize];
                        d * d
                    })
                    .sum();
                if d < best {
                    best = d;
                }
            }
        }
        best.sqrt()
    }

    /// Serializes the codebook: header (magic, format version, `n`, `k`,
    /// `N`), the raw values, multiplicities, the embedded lex-to-Gray
    /// table, and the trailing ordering version tag.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(CODEBOOK_MAGIC);
        bytes.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        bytes.extend_from_slice(&(self.dim() as u32).to_le_bytes());
        bytes.extend_from_slice(&(self.symbol_count() as u32).to_le_bytes());
        bytes.extend_from_slice(&(self.plan.size as u32).to_le_bytes());
        for &v in self.initial.values() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        for &m in self.initial.multiplicities() {
            bytes.extend_from_slice(&m.to_le_bytes());
        }
        bytes.extend_from_slice(&self.table.to_bytes());
        bytes.extend_from_slice(&self.table.ordering_version().to_le_bytes());
        bytes
    }

    /// Parses a serialized codebook and rebuilds the listing.
    ///
    /// The Gray listing is regenerated from the multiplicities under the
    /// pinned ordering; the stored table must match the rebuilt one
    /// bit for bit, so decoders can only load codebooks whose ordering
    /// version they implement.
    pub fn from_bytes(bytes: &[u8]) -> Result<Codebook, CodebookError> {
        let mut pos = 0usize;
        let magic = get(bytes, &mut pos, 4)?;
        if magic != CODEBOOK_MAGIC {
            return Err(CodebookError::BadFormat("bad magic"));
        }
        let version = get_u32(bytes, &mut pos)?;
        if version != FORMAT_VERSION {
            return Err(CodebookError::BadFormat("unsupported format version"));
        }
        let n = get_u32(bytes, &mut pos)? as usize;
        let k = get_u32(bytes, &mut pos)? as usize;
        if k == 0 || k > mperm::MAX_SYMBOLS {
            return Err(CodebookError::BadFormat("bad symbol count"));
        }
        let size = u64::from(get_u32(bytes, &mut pos)?);
        let mut values = Vec::with_capacity(k);
        for _ in 0..k {
            let raw = get(bytes, &mut pos, 8)?;
            values.push(f64::from_le_bytes(raw.try_into().unwrap()));
        }
        let mut multiplicities = Vec::with_capacity(k);
        for _ in 0..k {
            multiplicities.push(get_u32(bytes, &mut pos)?);
        }
        let initial = InitialVector::new(values, multiplicities)
            .map_err(|_| CodebookError::BadFormat("bad initial vector"))?;
        if initial.n() != n {
            return Err(CodebookError::BadFormat("dimension disagrees with multiplicities"));
        }
        let (stored_table, used) = Lex2GrayTable::from_bytes(&bytes[pos..])?;
        pos += used;
        let trailing = get_u32(bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(CodebookError::BadFormat("trailing bytes"));
        }
        if trailing != stored_table.ordering_version() || trailing != mperm::ORDERING_VERSION {
            return Err(CodebookError::BadFormat("unsupported ordering version"));
        }
        if stored_table.multiplicity() != initial.multiplicities() {
            return Err(CodebookError::BadFormat("table multiplicity disagrees"));
        }
        let codebook = Codebook::with_size(initial, size)?;
        if codebook.table != stored_table {
            return Err(CodebookError::BadFormat("table disagrees with pinned ordering"));
        }
        Ok(codebook)
    }
}

/// Unit-norm template values: each value divided by `sqrt(energy)`.
pub fn normalized_values(iv: &InitialVector) -> Result<Vec<f64>, CodebookError> {
    let norm = iv.energy().sqrt();
    if norm == 0.0 {
        return Err(CodebookError::ZeroNorm);
    }
    Ok(iv.values().iter().map(|&v| v / norm).collect())
}

fn get<'a>(bytes: &'a [u8], pos: &mut usize, len: usize) -> Result<&'a [u8], CodebookError> {
    let end = pos.checked_add(len).ok_or(CodebookError::BadFormat("truncated"))?;
    let slice = bytes.get(*pos..end).ok_or(CodebookError::BadFormat("truncated"))?;
    *pos = end;
    Ok(slice)
}

fn get_u32(bytes: &[u8], pos: &mut usize) -> Result<u32, CodebookError> {
    let slice = get(bytes, pos, 4)?;
    Ok(u32::from_le_bytes(slice.try_into().unwrap()))
}
