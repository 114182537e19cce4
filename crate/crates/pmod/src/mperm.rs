//! Multiset permutation combinatorics.
//!
//! A multiset with symbol multiplicities `m = (m_1, ..., m_k)` has
//! `M = n!/(m_1!...m_k!)` distinct arrangements (`n = m_1 + ... + m_k`).
//! This module provides the three primitives the codec is built on:
//!
//! - [`gray_list`] -- a deterministic listing of all `M` arrangements in
//!   which consecutive entries differ by exactly one transposition of two
//!   positions holding distinct symbols,
//! - [`lex_rank`] / [`lex_unrank`] -- the position of an arrangement in
//!   lexicographic order and its inverse, in `O(n k)` integer arithmetic,
//! - [`build_lex2gray`] -- the table translating lexicographic ranks into
//!   positions in the Gray listing.
//!
//! The Gray listing is produced by a block-interchange recursion: the
//! arrangements are grouped by their first symbol, each group is listed
//! recursively on the suffix, and neighbouring groups are joined by
//! swapping the leading position with the leftmost suffix occurrence of
//! the next group's symbol. Every emitted step is therefore a single
//! transposition. The recursion is pinned as ordering version
//! [`ORDERING_VERSION`]; encoders and decoders must agree on it, so the
//! version is embedded in every serialized [`Lex2GrayTable`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

/// Identifier of the pinned Gray listing algorithm.
///
/// Bump only when the listing produced by [`gray_list`] changes; stored
/// codebooks carry the version they were built with and refuse to load
/// under a different one.
pub const ORDERING_VERSION: u32 = 1;

/// Maximum number of distinct symbols (symbols are stored as `u8`).
pub const MAX_SYMBOLS: usize = 255;

/// Default memory budget for materializing a Gray listing, in bytes.
pub const DEFAULT_LIST_BUDGET: usize = 256 << 20;

const TABLE_MAGIC: &[u8; 4] = b"L2GT";

/// Errors from the combinatorial layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MpermError {
    /// Multiplicity vector is empty.
    EmptyMultiplicity,
    /// A multiplicity entry is zero.
    ZeroMultiplicity { index: usize },
    /// More distinct symbols than the `u8` symbol representation allows.
    TooManySymbols { count: usize },
    /// Symbol counts of a sequence do not match the multiplicity vector.
    CountMismatch,
    /// Rank is outside `{0, ..., M-1}`.
    RankOutOfRange { rank: u64 },
    /// The permutation count does not fit the rank arithmetic (`u64`).
    CountOverflow,
    /// Materializing the listing would exceed the memory budget.
    ListingTooLarge { needed_bytes: u128, budget: usize },
    /// A serialized table failed validation.
    BadTable(&'static str),
}

impl fmt::Display for MpermError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MpermError::EmptyMultiplicity => write!(f, "multiplicity vector is empty"),
            MpermError::ZeroMultiplicity { index } => {
                write!(f, "multiplicity {index} is zero")
            }
            MpermError::TooManySymbols { count } => {
                write!(f, "{count} distinct symbols exceed the supported {MAX_SYMBOLS}")
            }
            MpermError::CountMismatch => {
                write!(f, "symbol counts do not match the multiplicity vector")
            }
            MpermError::RankOutOfRange { rank } => write!(f, "rank {rank} out of range"),
            MpermError::CountOverflow => {
                write!(f, "permutation count exceeds 64-bit rank arithmetic")
            }
            MpermError::ListingTooLarge { needed_bytes, budget } => {
                write!(f, "listing needs {needed_bytes} bytes, over the {budget} byte budget")
            }
            MpermError::BadTable(reason) => write!(f, "bad lex2gray table: {reason}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MpermError {}

/// One arrangement of the multiset, as symbol indices `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolSequence {
    symbols: Vec<u8>,
}

impl SymbolSequence {
    /// Builds a sequence and checks it against the multiplicity vector.
    pub fn new(symbols: Vec<u8>, multiplicity: &[u32]) -> Result<Self, MpermError> {
        validate_multiplicity(multiplicity)?;
        let seq = SymbolSequence { symbols };
        if !seq.matches(multiplicity) {
            return Err(MpermError::CountMismatch);
        }
        Ok(seq)
    }

    pub(crate) fn from_raw(symbols: Vec<u8>) -> Self {
        SymbolSequence { symbols }
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// True when the per-symbol counts equal the multiplicity vector.
    pub fn matches(&self, multiplicity: &[u32]) -> bool {
        let mut counts = vec![0u32; multiplicity.len()];
        for &s in &self.symbols {
            match counts.get_mut(s as usize) {
                Some(c) => *c += 1,
                None => return false,
            }
        }
        counts == multiplicity
    }
}

/// Position in lexicographic order, in `{0, ..., M-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexRank(pub u64);

/// Position in the Gray listing, in `{0, ..., M-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GrayRank(pub u64);

fn validate_multiplicity(multiplicity: &[u32]) -> Result<(), MpermError> {
    if multiplicity.is_empty() {
        return Err(MpermError::EmptyMultiplicity);
    }
    if multiplicity.len() > MAX_SYMBOLS {
        return Err(MpermError::TooManySymbols { count: multiplicity.len() });
    }
    for (index, &m) in multiplicity.iter().enumerate() {
        if m == 0 {
            return Err(MpermError::ZeroMultiplicity { index });
        }
    }
    Ok(())
}

/// Total length `n` of the arrangements of `multiplicity`.
pub fn total_length(multiplicity: &[u32]) -> usize {
    multiplicity.iter().map(|&m| m as usize).sum()
}

/// Number of distinct arrangements `M = n!/(m_1!...m_k!)`, exactly.
pub fn multiset_count(multiplicity: &[u32]) -> BigUint {
    let mut count = BigUint::from(1u32);
    let mut total = 0u64;
    for &m in multiplicity {
        for j in 1..=u64::from(m) {
            total += 1;
            count = count * total / j;
        }
    }
    count
}

/// `multiset_count` in `u128`, or `None` on overflow.
fn multiset_count_u128(multiplicity: &[u32]) -> Option<u128> {
    let mut count = 1u128;
    let mut total = 0u128;
    for &m in multiplicity {
        for j in 1..=u128::from(m) {
            total += 1;
            // count * total is a multinomial numerator; division is exact.
            count = count.checked_mul(total)? / j;
        }
    }
    Some(count)
}

fn checked_count(multiplicity: &[u32]) -> Result<u128, MpermError> {
    validate_multiplicity(multiplicity)?;
    match multiset_count_u128(multiplicity) {
        Some(c) if c <= u64::MAX as u128 => Ok(c),
        _ => Err(MpermError::CountOverflow),
    }
}

/// All `M` arrangements in Gray order, under [`DEFAULT_LIST_BUDGET`].
///
/// The first entry is the sorted (non-decreasing) arrangement and every
/// consecutive pair differs by exactly one transposition of two positions
/// holding distinct symbols.
pub fn gray_list(multiplicity: &[u32]) -> Result<Vec<SymbolSequence>, MpermError> {
    gray_list_budgeted(multiplicity, DEFAULT_LIST_BUDGET)
}

/// [`gray_list`] with an explicit memory budget in bytes.
pub fn gray_list_budgeted(
    multiplicity: &[u32],
    budget: usize,
) -> Result<Vec<SymbolSequence>, MpermError> {
    validate_multiplicity(multiplicity)?;
    let count = multiset_count_u128(multiplicity).unwrap_or(u128::MAX);
    let n = total_length(multiplicity);
    let needed = count.saturating_mul(n as u128);
    if needed > budget as u128 {
        return Err(MpermError::ListingTooLarge { needed_bytes: needed, budget });
    }
    let count = count as usize;

    let mut cur: Vec<u8> = Vec::with_capacity(n);
    for (sym, &m) in multiplicity.iter().enumerate() {
        cur.extend(core::iter::repeat_n(sym as u8, m as usize));
    }
    let mut counts = multiplicity.to_vec();
    let mut out = Vec::with_capacity(count);
    out.push(SymbolSequence::from_raw(cur.clone()));
    walk(&mut cur, 0, &mut counts, &mut out);
    debug_assert_eq!(out.len(), count);
    Ok(out)
}

/// Emits every arrangement of `cur[lo..]` (first symbol groups joined by
/// boundary swaps), leaving `cur` at the last arrangement. `counts` holds
/// the multiset of `cur[lo..]` and is restored on return.
fn walk(cur: &mut [u8], lo: usize, counts: &mut [u32], out: &mut Vec<SymbolSequence>) {
    if cur.len() - lo <= 1 {
        return;
    }
    let first = cur[lo];
    counts[first as usize] -= 1;
    walk(cur, lo + 1, counts, out);
    counts[first as usize] += 1;
    for sym in 0..counts.len() as u8 {
        if sym == first || counts[sym as usize] == 0 {
            continue;
        }
        // Leftmost suffix occurrence; exists because counts[sym] > 0.
        let at = cur[lo + 1..].iter().position(|&s| s == sym).unwrap() + lo + 1;
        cur.swap(lo, at);
        out.push(SymbolSequence::from_raw(cur.to_vec()));
        counts[sym as usize] -= 1;
        walk(cur, lo + 1, counts, out);
        counts[sym as usize] += 1;
    }
}

/// Lexicographic rank of `seq` among all arrangements of `multiplicity`.
pub fn lex_rank(seq: &SymbolSequence, multiplicity: &[u32]) -> Result<LexRank, MpermError> {
    let mut remaining = checked_count(multiplicity)?;
    if !seq.matches(multiplicity) {
        return Err(MpermError::CountMismatch);
    }
    let mut counts = multiplicity.to_vec();
    let mut left = seq.len() as u128;
    let mut rank = 0u128;
    for &sym in seq.symbols() {
        for &count in &counts[..sym as usize] {
            if count > 0 {
                // Arrangements of the remaining multiset starting here.
                rank += remaining * u128::from(count) / left;
            }
        }
        remaining = remaining * u128::from(counts[sym as usize]) / left;
        counts[sym as usize] -= 1;
        left -= 1;
    }
    Ok(LexRank(rank as u64))
}

/// Inverse of [`lex_rank`]: the arrangement at lexicographic position `rank`.
pub fn lex_unrank(rank: LexRank, multiplicity: &[u32]) -> Result<SymbolSequence, MpermError> {
    let mut remaining = checked_count(multiplicity)?;
    if u128::from(rank.0) >= remaining {
        return Err(MpermError::RankOutOfRange { rank: rank.0 });
    }
    let n = total_length(multiplicity);
    let mut counts = multiplicity.to_vec();
    let mut r = u128::from(rank.0);
    let mut left = n as u128;
    let mut symbols = Vec::with_capacity(n);
    for _ in 0..n {
        for (v, count) in counts.iter_mut().enumerate() {
            if *count == 0 {
                continue;
            }
            let with_v = remaining * u128::from(*count) / left;
            if r < with_v {
                symbols.push(v as u8);
                remaining = with_v;
                *count -= 1;
                break;
            }
            r -= with_v;
        }
        left -= 1;
    }
    Ok(SymbolSequence::from_raw(symbols))
}

/// Translation table from lexicographic rank to Gray position.
///
/// `entries[lex] = gray` for the pinned listing; the table is a bijection
/// on `{0, ..., M-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lex2GrayTable {
    entries: Vec<u32>,
    multiplicity: Vec<u32>,
    ordering_version: u32,
}

impl Lex2GrayTable {
    pub fn lookup(&self, rank: LexRank) -> GrayRank {
        GrayRank(u64::from(self.entries[rank.0 as usize]))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn multiplicity(&self) -> &[u32] {
        &self.multiplicity
    }

    pub fn ordering_version(&self) -> u32 {
        self.ordering_version
    }

    /// Binary layout: magic, ordering version, `k`, `m` (all `u32` LE),
    /// then the `M` entries as `u32` LE.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::with_capacity(12 + 4 * (self.multiplicity.len() + self.entries.len()));
        bytes.extend_from_slice(TABLE_MAGIC);
        bytes.extend_from_slice(&self.ordering_version.to_le_bytes());
        bytes.extend_from_slice(&(self.multiplicity.len() as u32).to_le_bytes());
        for &m in &self.multiplicity {
            bytes.extend_from_slice(&m.to_le_bytes());
        }
        for &e in &self.entries {
            bytes.extend_from_slice(&e.to_le_bytes());
        }
        bytes
    }

    /// Parses and validates a serialized table, returning it and the number
    /// of bytes consumed.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Self, usize), MpermError> {
        let mut pos = 0usize;
        let magic = take(bytes, &mut pos, 4)?;
        if magic != TABLE_MAGIC {
            return Err(MpermError::BadTable("bad magic"));
        }
        let ordering_version = read_u32(bytes, &mut pos)?;
        let k = read_u32(bytes, &mut pos)? as usize;
        if k == 0 || k > MAX_SYMBOLS {
            return Err(MpermError::BadTable("bad symbol count"));
        }
        let mut multiplicity = Vec::with_capacity(k);
        for _ in 0..k {
            multiplicity.push(read_u32(bytes, &mut pos)?);
        }
        validate_multiplicity(&multiplicity)
            .map_err(|_| MpermError::BadTable("bad multiplicity"))?;
        let count = multiset_count_u128(&multiplicity)
            .filter(|&c| c <= u32::MAX as u128)
            .ok_or(MpermError::BadTable("count does not fit u32 entries"))?
            as usize;
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            entries.push(read_u32(bytes, &mut pos)?);
        }
        let table = Lex2GrayTable { entries, multiplicity, ordering_version };
        if !table.is_bijection() {
            return Err(MpermError::BadTable("entries are not a bijection"));
        }
        Ok((table, pos))
    }

    fn is_bijection(&self) -> bool {
        let m = self.entries.len();
        let mut seen = vec![false; m];
        for &e in &self.entries {
            let Some(slot) = seen.get_mut(e as usize) else {
                return false;
            };
            if *slot {
                return false;
            }
            *slot = true;
        }
        true
    }
}

fn take<'a>(bytes: &'a [u8], pos: &mut usize, len: usize) -> Result<&'a [u8], MpermError> {
    let end = pos.checked_add(len).ok_or(MpermError::BadTable("truncated"))?;
    let slice = bytes.get(*pos..end).ok_or(MpermError::BadTable("truncated"))?;
    *pos = end;
    Ok(slice)
}

fn read_u32(bytes: &[u8], pos: &mut usize) -> Result<u32, MpermError> {
    let slice = take(bytes, pos, 4)?;
    Ok(u32::from_le_bytes(slice.try_into().unwrap()))
}

/// Builds the lex-to-Gray table for `multiplicity` by ranking the pinned
/// Gray listing, `O(M n k)`.
pub fn build_lex2gray(multiplicity: &[u32]) -> Result<Lex2GrayTable, MpermError> {
    let listing = gray_list(multiplicity)?;
    build_lex2gray_from(multiplicity, &listing)
}

/// Builds the table from an already materialized Gray listing.
pub fn build_lex2gray_from(
    multiplicity: &[u32],
    listing: &[SymbolSequence],
) -> Result<Lex2GrayTable, MpermError> {
    if listing.len() > u32::MAX as usize {
        return Err(MpermError::CountOverflow);
    }
    let mut entries = vec![0u32; listing.len()];
    for (gray, seq) in listing.iter().enumerate() {
        let lex = lex_rank(seq, multiplicity)?;
        entries[lex.0 as usize] = gray as u32;
    }
    Ok(Lex2GrayTable {
        entries,
        multiplicity: multiplicity.to_vec(),
        ordering_version: ORDERING_VERSION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seqs(raw: &[&[u8]]) -> Vec<SymbolSequence> {
        raw.iter().map(|s| SymbolSequence::from_raw(s.to_vec())).collect()
    }

    /// Positions differing between consecutive sequences must number exactly
    /// two and hold swapped, distinct symbols.
    fn assert_transposition_adjacent(list: &[SymbolSequence]) {
        for (i, pair) in list.windows(2).enumerate() {
            let (a, b) = (pair[0].symbols(), pair[1].symbols());
            let diff: Vec<usize> = (0..a.len()).filter(|&p| a[p] != b[p]).collect();
            assert_eq!(diff.len(), 2, "entries {i} and {} differ in {diff:?}", i + 1);
            assert_eq!(a[diff[0]], b[diff[1]]);
            assert_eq!(a[diff[1]], b[diff[0]]);
            assert_ne!(a[diff[0]], a[diff[1]]);
        }
    }

    #[test]
    fn count_matches_small_cases() {
        assert_eq!(multiset_count(&[1, 1]), BigUint::from(2u32));
        assert_eq!(multiset_count(&[2, 1]), BigUint::from(3u32));
        assert_eq!(multiset_count(&[1, 23, 1]), BigUint::from(600u32));
        assert_eq!(multiset_count(&[1, 48, 1]), BigUint::from(2450u32));
        assert_eq!(multiset_count(&[1, 98, 1]), BigUint::from(9900u32));
        assert_eq!(multiset_count(&[25]), BigUint::from(1u32));
    }

    #[test]
    fn gray_list_two_symbols() {
        let list = gray_list(&[1, 1]).unwrap();
        assert_eq!(list, seqs(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn gray_list_three_of_two_kinds() {
        let list = gray_list(&[2, 1]).unwrap();
        assert_eq!(list, seqs(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]));
        assert_transposition_adjacent(&list);
    }

    #[test]
    fn gray_list_code1_multiset() {
        let list = gray_list(&[1, 23, 1]).unwrap();
        assert_eq!(list.len(), 600);
        assert_transposition_adjacent(&list);
        let mut dedup = list.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 600);
    }

    #[test]
    fn gray_list_starts_sorted() {
        let list = gray_list(&[2, 3, 1]).unwrap();
        assert_eq!(list[0].symbols(), &[0, 0, 1, 1, 1, 2]);
        assert_transposition_adjacent(&list);
    }

    #[test]
    fn gray_list_single_symbol() {
        let list = gray_list(&[4]).unwrap();
        assert_eq!(list, seqs(&[&[0, 0, 0, 0]]));
    }

    #[test]
    fn gray_list_budget_is_enforced() {
        let err = gray_list_budgeted(&[1, 23, 1], 100).unwrap_err();
        assert!(matches!(err, MpermError::ListingTooLarge { .. }));
    }

    #[test]
    fn lex_rank_examples() {
        let m = [1, 1, 1];
        let first = SymbolSequence::new(vec![0, 1, 2], &m).unwrap();
        assert_eq!(lex_rank(&first, &m).unwrap(), LexRank(0));
        let last = SymbolSequence::new(vec![2, 1, 0], &m).unwrap();
        assert_eq!(lex_rank(&last, &m).unwrap(), LexRank(5));

        let m = [2, 1];
        let seq = SymbolSequence::new(vec![1, 0, 0], &m).unwrap();
        assert_eq!(lex_rank(&seq, &m).unwrap(), LexRank(2));
    }

    #[test]
    fn lex_unrank_examples() {
        assert_eq!(lex_unrank(LexRank(0), &[1, 1, 1]).unwrap().symbols(), &[0, 1, 2]);
        assert_eq!(lex_unrank(LexRank(2), &[2, 1]).unwrap().symbols(), &[1, 0, 0]);
        assert!(matches!(
            lex_unrank(LexRank(3), &[2, 1]),
            Err(MpermError::RankOutOfRange { rank: 3 })
        ));
    }

    #[test]
    fn rank_mismatch_is_rejected() {
        let err = SymbolSequence::new(vec![0, 0, 1], &[1, 1, 1]).unwrap_err();
        assert_eq!(err, MpermError::CountMismatch);
        let seq = SymbolSequence::from_raw(vec![0, 0, 1]);
        assert_eq!(lex_rank(&seq, &[1, 1, 1]).unwrap_err(), MpermError::CountMismatch);
    }

    #[test]
    fn round_trip_code1() {
        let m = [1, 23, 1];
        for r in 0..600u64 {
            let seq = lex_unrank(LexRank(r), &m).unwrap();
            assert_eq!(lex_rank(&seq, &m).unwrap(), LexRank(r));
        }
    }

    #[test]
    fn lex2gray_small_tables() {
        let table = build_lex2gray(&[1, 1]).unwrap();
        assert_eq!(table.entries(), &[0, 1]);
        let table = build_lex2gray(&[2, 1]).unwrap();
        assert_eq!(table.entries(), &[0, 1, 2]);
    }

    #[test]
    fn lex2gray_code1_is_bijection() {
        let table = build_lex2gray(&[1, 23, 1]).unwrap();
        assert_eq!(table.len(), 600);
        assert!(table.is_bijection());
        let listing = gray_list(&[1, 23, 1]).unwrap();
        for (gray, seq) in listing.iter().enumerate() {
            let lex = lex_rank(seq, &[1, 23, 1]).unwrap();
            assert_eq!(table.lookup(lex), GrayRank(gray as u64));
        }
    }

    #[test]
    fn table_bytes_round_trip() {
        let table = build_lex2gray(&[2, 2, 1]).unwrap();
        let bytes = table.to_bytes();
        let (parsed, used) = Lex2GrayTable::from_bytes(&bytes).unwrap();
        assert_eq!(used, bytes.len());
        assert_eq!(parsed, table);
    }

    #[test]
    fn table_bytes_reject_corruption() {
        let table = build_lex2gray(&[2, 1]).unwrap();
        let mut bytes = table.to_bytes();
        let last = bytes.len() - 4;
        bytes[last..].copy_from_slice(&5u32.to_le_bytes());
        assert!(matches!(Lex2GrayTable::from_bytes(&bytes), Err(MpermError::BadTable(_))));
    }
}
