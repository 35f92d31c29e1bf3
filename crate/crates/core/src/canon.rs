//! Edge bitmaps of induced traversals, canonical relabeling, and the
//! bitmap → pattern-id dictionary.
//!
//! A traversal `v0, v1, ..., v(k-1)` stores the edges of vertex `vi` towards
//! its prefix `v0..vi` in a group of `i` bits starting at
//! `i(i-1)/2 - 1`. The `(v0, v1)` edge is implicit: every traversal is
//! connected, so `v1` is always adjacent to `v0`. For `k = 4` that leaves
//! five stored bits.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};

/// Dictionary entry for bitmaps no traversal can produce.
pub const SENTINEL: u32 = u32::MAX;

/// Smallest subgraph size handled by the applications.
pub const MIN_K: usize = 3;
/// Largest dictionary built without an explicit opt-in (2^20 entries).
pub const MAX_DICTIONARY_K: usize = 7;
/// Largest dictionary supported at all (2^27 entries, ~512 MiB).
pub const MAX_LARGE_DICTIONARY_K: usize = 8;
/// Largest traversal whose edges fit in a 64-bit bitmap.
pub const MAX_EDGE_K: usize = 11;

const MAGIC: &[u8; 4] = b"DMCD";
const FORMAT_VERSION: u8 = 0x01;

/// Number of stored bits for a traversal of `k` vertices.
pub const fn stored_bits(k: usize) -> usize {
    if k < 2 {
        0
    } else {
        k * (k - 1) / 2 - 1
    }
}

/// First bit of the group holding vertex `i`'s edges (`i >= 2`).
pub const fn group_offset(i: usize) -> usize {
    i * (i - 1) / 2 - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeBitmap {
    bits: u64,
    k: u8,
}

impl EdgeBitmap {
    pub fn new(bits: u64, k: usize) -> Result<Self> {
        if k == 0 || k > MAX_EDGE_K {
            return Err(Error::UnsupportedSize { k, min: 1, max: MAX_EDGE_K });
        }
        let width = stored_bits(k);
        if width < 64 && bits >> width != 0 {
            return Err(Error::Contract(format!("bitmap {bits:#x} wider than {width} bits")));
        }
        Ok(EdgeBitmap { bits, k: k as u8 })
    }

    /// Bitmap of a single-vertex traversal.
    pub const fn root() -> Self {
        EdgeBitmap { bits: 0, k: 1 }
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k as usize
    }

    /// Appends a vertex whose adjacency to positions `0..k` is `adjacency`.
    pub fn extend(self, adjacency: u64) -> Result<Self> {
        let k = self.k();
        if adjacency == 0 {
            return Err(Error::Contract("appended vertex has no neighbor in the traversal".into()));
        }
        if adjacency >> k != 0 {
            return Err(Error::Contract(format!("adjacency {adjacency:#b} wider than {k} positions")));
        }
        if k + 1 > MAX_EDGE_K {
            return Err(Error::UnsupportedSize { k: k + 1, min: 1, max: MAX_EDGE_K });
        }
        if k == 1 {
            return Ok(EdgeBitmap { bits: 0, k: 2 });
        }
        Ok(EdgeBitmap { bits: self.bits | (adjacency << group_offset(k)), k: self.k + 1 })
    }

    /// Adjacency of position `i` towards positions `0..i`.
    #[inline]
    pub fn group(&self, i: usize) -> u64 {
        match i {
            0 => 0,
            1 => 1,
            _ => (self.bits >> group_offset(i)) & ((1u64 << i) - 1),
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        hi != lo && self.group(hi) >> lo & 1 == 1
    }

    /// True when every appended vertex is adjacent to its prefix, i.e. the
    /// bitmap is something a traversal can produce.
    pub fn is_traversal_encoding(&self) -> bool {
        (2..self.k()).all(|i| self.group(i) != 0)
    }

    /// Symmetric adjacency masks, one per position.
    pub fn adjacency(&self) -> [u16; 16] {
        let mut adj = [0u16; 16];
        for i in 1..self.k() {
            let mut g = self.group(i);
            while g != 0 {
                let j = g.trailing_zeros() as usize;
                g &= g - 1;
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
        adj
    }

    /// Inverse of [`adjacency`](Self::adjacency); `None` unless the masks
    /// describe a valid traversal encoding in this vertex order.
    pub fn from_adjacency(adj: &[u16], k: usize) -> Option<Self> {
        if k >= 2 && adj[1] & 1 == 0 {
            return None;
        }
        let mut bits = 0u64;
        for (i, &mask) in adj.iter().enumerate().take(k).skip(2) {
            let group = u64::from(mask) & ((1u64 << i) - 1);
            if group == 0 {
                return None;
            }
            bits |= group << group_offset(i);
        }
        Some(EdgeBitmap { bits, k: k as u8 })
    }

    /// Relabels position `i` to `perm[i]`. `None` when the image is not a
    /// valid traversal encoding.
    pub fn permuted(&self, perm: &[usize]) -> Option<Self> {
        permute_adjacency(&self.adjacency(), perm).and_then(|adj| Self::from_adjacency(&adj, self.k()))
    }
}

fn permute_adjacency(adj: &[u16; 16], perm: &[usize]) -> Option<[u16; 16]> {
    let mut out = [0u16; 16];
    for (i, &mask) in adj.iter().enumerate().take(perm.len()) {
        let mut m = mask;
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            m &= m - 1;
            out[perm[i]] |= 1 << perm[j];
        }
    }
    // a valid image needs position 1 adjacent to position 0
    (out[1] & 1 == 1).then_some(out)
}

/// Appends a vertex to the traversal described by `bitmap`.
pub fn encode_extension(bitmap: EdgeBitmap, adjacency_bits: u64) -> Result<EdgeBitmap> {
    bitmap.extend(adjacency_bits)
}

/// Minimum bitmap over all relabelings of `bitmap` that are themselves
/// traversal encodings. Runs the full `k!` sweep.
pub fn canonical_form(bitmap: EdgeBitmap) -> Result<EdgeBitmap> {
    if !bitmap.is_traversal_encoding() {
        return Err(Error::InvalidEncoding { bits: bitmap.bits, k: bitmap.k() });
    }
    let k = bitmap.k();
    let adj = bitmap.adjacency();
    let best = (0..k)
        .permutations(k)
        .filter_map(|perm| {
            permute_adjacency(&adj, &perm).and_then(|a| EdgeBitmap::from_adjacency(&a, k))
        })
        .min()
        .expect("identity permutation is always valid");
    Ok(best)
}

/// Canonical-candidate rule for extending `tr` with `u`: `u` must exceed the
/// first vertex, and every vertex after `u`'s first neighbor in `tr`.
pub fn is_canonical_candidate(tr: &[VertexId], u: VertexId, graph: &CsrGraph) -> bool {
    let mask = tr
        .iter()
        .enumerate()
        .filter(|&(_, &t)| graph.has_edge(t, u))
        .fold(0u64, |m, (j, _)| m | 1 << j);
    is_canonical_with_mask(tr, u, mask)
}

/// Same rule with `u`'s adjacency to `tr` precomputed as a bit mask.
#[inline]
pub fn is_canonical_with_mask(tr: &[VertexId], u: VertexId, mask: u64) -> bool {
    if mask == 0 || tr.is_empty() || u <= tr[0] {
        return false;
    }
    let first = mask.trailing_zeros() as usize;
    tr[first + 1..].iter().all(|&t| u > t)
}

/// Maps every traversal bitmap of size `k` to a contiguous pattern id.
/// Ids follow the ascending order of canonical bitmaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalDictionary {
    k: usize,
    table: Vec<u32>,
    canonical: Vec<u64>,
}

impl CanonicalDictionary {
    /// Builds the dictionary for `3 <= k <= 7`.
    pub fn build(k: usize) -> Result<Self> {
        Self::build_with_limit(k, false)
    }

    /// As [`build`](Self::build); `allow_large` admits `k = 8`.
    pub fn build_with_limit(k: usize, allow_large: bool) -> Result<Self> {
        let max = if allow_large { MAX_LARGE_DICTIONARY_K } else { MAX_DICTIONARY_K };
        if !(MIN_K..=max).contains(&k) {
            return Err(Error::UnsupportedSize { k, min: MIN_K, max });
        }
        let size = 1usize << stored_bits(k);
        let mut table = vec![SENTINEL; size];
        let mut canonical = Vec::new();
        let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();

        // Scanning ascending, the first unseen valid bitmap of each orbit is
        // its minimum; stamping the whole orbit keeps later members skipped.
        for bits in 0..size as u64 {
            if table[bits as usize] != SENTINEL {
                continue;
            }
            let bitmap = EdgeBitmap { bits, k: k as u8 };
            if !bitmap.is_traversal_encoding() {
                continue;
            }
            let id = canonical.len() as u32;
            canonical.push(bits);
            let adj = bitmap.adjacency();
            for perm in &perms {
                if let Some(img) = permute_adjacency(&adj, perm).and_then(|a| EdgeBitmap::from_adjacency(&a, k)) {
                    table[img.bits as usize] = id;
                }
            }
        }
        Ok(CanonicalDictionary { k, table, canonical })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn pattern_count(&self) -> usize {
        self.canonical.len()
    }

    /// Canonical bitmaps in ascending order; the index is the pattern id.
    pub fn canonical_bitmaps(&self) -> &[u64] {
        &self.canonical
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// Raw table entry, [`SENTINEL`] for unreachable encodings.
    #[inline]
    pub fn lookup(&self, bitmap: EdgeBitmap) -> u32 {
        debug_assert_eq!(bitmap.k(), self.k);
        self.table[bitmap.bits as usize]
    }

    /// Pattern id of an engine-produced bitmap; a sentinel hit means the
    /// engine built a disconnected traversal.
    pub fn pattern_id(&self, bitmap: EdgeBitmap) -> Result<u32> {
        if bitmap.k() != self.k {
            return Err(Error::Dictionary(format!(
                "bitmap for k={} looked up in dictionary for k={}",
                bitmap.k(),
                self.k
            )));
        }
        match self.table[bitmap.bits as usize] {
            SENTINEL => Err(Error::Internal(format!(
                "bitmap {:#x} (k={}) maps to no pattern",
                bitmap.bits, self.k
            ))),
            id => Ok(id),
        }
    }

    /// Id of a canonical bitmap, if it is one.
    pub fn id_of_canonical(&self, bits: u64) -> Option<u32> {
        self.canonical.binary_search(&bits).ok().map(|i| i as u32)
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        out.write_all(MAGIC)?;
        out.write_all(&[FORMAT_VERSION, self.k as u8])?;
        out.write_all(&(self.table.len() as u64).to_le_bytes())?;
        for &entry in &self.table {
            out.write_all(&entry.to_le_bytes())?;
        }
        out.write_all(&(self.canonical.len() as u32).to_le_bytes())?;
        for &bits in &self.canonical {
            out.write_all(&bits.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(source: R) -> Result<Self> {
        let mut src = BufReader::new(source);
        let bad = |m: &str| Error::DictionaryFormat(m.to_string());

        let mut header = [0u8; 6];
        src.read_exact(&mut header).map_err(|_| bad("truncated header"))?;
        if &header[..4] != MAGIC {
            return Err(bad("bad magic"));
        }
        if header[4] != FORMAT_VERSION {
            return Err(Error::DictionaryFormat(format!("unsupported version {:#04x}", header[4])));
        }
        let k = header[5] as usize;
        if !(MIN_K..=MAX_LARGE_DICTIONARY_K).contains(&k) {
            return Err(Error::DictionaryFormat(format!("unsupported k={k}")));
        }

        let mut word = [0u8; 8];
        src.read_exact(&mut word).map_err(|_| bad("truncated table length"))?;
        let len = u64::from_le_bytes(word);
        if len != 1u64 << stored_bits(k) {
            return Err(Error::DictionaryFormat(format!("table length {len} inconsistent with k={k}")));
        }
        let mut raw = vec![0u8; len as usize * 4];
        src.read_exact(&mut raw).map_err(|_| bad("truncated table"))?;
        let table: Vec<u32> = raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();

        let mut count = [0u8; 4];
        src.read_exact(&mut count).map_err(|_| bad("truncated pattern count"))?;
        let count = u32::from_le_bytes(count) as usize;
        let mut canonical = Vec::with_capacity(count);
        for _ in 0..count {
            src.read_exact(&mut word).map_err(|_| bad("truncated canonical bitmaps"))?;
            canonical.push(u64::from_le_bytes(word));
        }
        if src.read(&mut [0u8; 1])? != 0 {
            return Err(bad("trailing bytes"));
        }

        if canonical.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("canonical bitmaps not strictly ascending"));
        }
        if table.iter().any(|&e| e != SENTINEL && e as usize >= count) {
            return Err(bad("table entry exceeds pattern count"));
        }
        for (id, &bits) in canonical.iter().enumerate() {
            if bits as usize >= table.len() || table[bits as usize] != id as u32 {
                return Err(bad("canonical bitmap does not map to its own id"));
            }
        }
        Ok(CanonicalDictionary { k, table, canonical })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(File::open(path)?)
    }
}

#[cfg(test)]
#[allow(clippy::unusual_byte_groupings)]
mod tests {
    use super::*;

    fn bm(bits: u64, k: usize) -> EdgeBitmap {
        EdgeBitmap::new(bits, k).unwrap()
    }

    #[test]
    fn layout_offsets() {
        assert_eq!(stored_bits(4), 5);
        assert_eq!(group_offset(2), 0);
        assert_eq!(group_offset(3), 2);
        assert_eq!(group_offset(4), 5);
    }

    #[test]
    fn encode_examples() {
        let k2 = EdgeBitmap::root().extend(1).unwrap();
        assert_eq!((k2.bits(), k2.k()), (0, 2));
        let tri = k2.extend(0b11).unwrap();
        assert_eq!(tri.bits(), 0b11);
        // G1 traversal [0, 1, 3]: vertex 3 touches v1 only
        assert_eq!(k2.extend(0b10).unwrap().bits(), 0b10);
        let k4 = tri.extend(0b111).unwrap();
        assert_eq!((k4.bits(), k4.k()), (0b111_11, 4));
    }

    #[test]
    fn encode_rejects_isolated_vertex() {
        assert!(matches!(bm(0b11, 3).extend(0), Err(Error::Contract(_))));
        assert!(bm(0b11, 3).extend(0b1000).is_err());
    }

    #[test]
    fn canonical_form_small() {
        assert_eq!(canonical_form(bm(0b10, 3)).unwrap().bits(), 0b01);
        assert_eq!(canonical_form(bm(0b11, 3)).unwrap().bits(), 0b11);
        assert!(matches!(canonical_form(bm(0b00, 3)), Err(Error::InvalidEncoding { .. })));
    }

    #[test]
    fn star_and_paw_differ() {
        // star: center v0, leaves v1, v2, v3
        let star = bm(0b001_01, 4);
        // paw: triangle v0 v1 v2 plus v3 hanging off v2
        let paw = bm(0b100_11, 4);
        assert_ne!(canonical_form(star).unwrap(), canonical_form(paw).unwrap());
    }

    #[test]
    fn dictionary_k3() {
        let d = CanonicalDictionary::build(3).unwrap();
        assert_eq!(d.pattern_count(), 2);
        assert_eq!(d.table(), &[SENTINEL, 0, 0, 1]);
        assert_eq!(d.lookup(bm(0b01, 3)), 0);
        assert_eq!(d.lookup(bm(0b11, 3)), 1);
        assert_eq!(d.lookup(bm(0b00, 3)), SENTINEL);
        assert!(matches!(d.pattern_id(bm(0b00, 3)), Err(Error::Internal(_))));
    }

    #[test]
    fn dictionary_k4() {
        let d = CanonicalDictionary::build(4).unwrap();
        assert_eq!(d.table().len(), 32);
        assert_eq!(d.pattern_count(), 6);
    }

    #[test]
    fn dictionary_size_guard() {
        assert!(CanonicalDictionary::build(2).is_err());
        assert!(CanonicalDictionary::build(8).is_err());
    }

    #[test]
    fn candidate_rule_on_running_example() {
        let g = CsrGraph::from_edges(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        assert!(is_canonical_candidate(&[0], 1, &g));
        assert!(!is_canonical_candidate(&[1], 0, &g));
        assert!(!is_canonical_candidate(&[0, 2], 1, &g));
        assert!(is_canonical_candidate(&[0, 1], 2, &g));
    }

    #[test]
    fn file_round_trip_and_validation() {
        let d = CanonicalDictionary::build(4).unwrap();
        let mut buf = Vec::new();
        d.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"DMCD");
        assert_eq!(buf[4], 1);
        assert_eq!(buf[5], 4);
        assert_eq!(buf.len(), 6 + 8 + 32 * 4 + 4 + 6 * 8);
        assert_eq!(CanonicalDictionary::read_from(buf.as_slice()).unwrap(), d);

        let mut wrong = buf.clone();
        wrong[0] = b'X';
        assert!(CanonicalDictionary::read_from(wrong.as_slice()).is_err());
        let mut wrong = buf.clone();
        wrong[4] = 2;
        assert!(CanonicalDictionary::read_from(wrong.as_slice()).is_err());
        let mut wrong = buf.clone();
        wrong[6] = 31;
        assert!(CanonicalDictionary::read_from(wrong.as_slice()).is_err());
        assert!(CanonicalDictionary::read_from(&buf[..buf.len() - 1]).is_err());
        let mut longer = buf.clone();
        longer.push(0);
        assert!(CanonicalDictionary::read_from(longer.as_slice()).is_err());
    }
}
