use std::fmt::Write as _;
use std::io::{self, Write};
use std::sync::{Arc, OnceLock};

use sha2::{Digest, Sha256};

use super::product::ProductStructure;
use super::simplex::{face_of_ref, SimplexRef, MAX_DIM};
use crate::error::{Error, Result};

/// Sets up to this size get an exhaustive simplicial-identity check on construction.
pub const VALIDATE_LIMIT: usize = 100_000;

/// A finite simplicial set stored by its nondegenerate simplices.
///
/// Dimension `d` holds `counts[d]` simplices with ids `0..counts[d]`; the faces
/// of simplex `j` are `faces[d][j*(d+1) ..= j*(d+1)+d]`.
#[derive(Clone, Debug)]
pub struct SimplicialSet {
    label: String,
    counts: Vec<usize>,
    faces: Vec<Vec<SimplexRef>>,
    nominal_dim: usize,
    product: Option<Arc<ProductStructure>>,
    digest: OnceLock<[u8; 32]>,
}

impl SimplicialSet {
    /// Builds from raw face tables; `faces[0]` must be empty.
    pub fn from_faces(label: impl Into<String>, counts: Vec<usize>, faces: Vec<Vec<SimplexRef>>) -> Result<Self> {
        let s = Self::new_unchecked(label.into(), counts, faces);
        s.validate()?;
        Ok(s)
    }

    /// Like [`Self::from_faces`], but the simplicial identities are only
    /// checked exhaustively on sets of at most [`VALIDATE_LIMIT`] simplices.
    pub(crate) fn assemble(label: impl Into<String>, counts: Vec<usize>, faces: Vec<Vec<SimplexRef>>) -> Result<Self> {
        let s = Self::new_unchecked(label.into(), counts, faces);
        if s.total() <= VALIDATE_LIMIT {
            s.validate()?;
        } else {
            s.validate_references()?;
        }
        Ok(s)
    }

    pub(crate) fn new_unchecked(label: String, mut counts: Vec<usize>, mut faces: Vec<Vec<SimplexRef>>) -> Self {
        while counts.len() > 1 && *counts.last().unwrap() == 0 {
            counts.pop();
            faces.pop();
        }
        let nominal_dim = counts.len().saturating_sub(1);
        SimplicialSet { label, counts, faces, nominal_dim, product: None, digest: OnceLock::new() }
    }

    pub(crate) fn with_product(mut self, p: ProductStructure, nominal_dim: usize) -> Self {
        self.product = Some(Arc::new(p));
        self.nominal_dim = nominal_dim;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Largest dimension carrying nondegenerate simplices.
    pub fn dim(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    /// Dimension of the space the model stands for. Exceeds [`Self::dim`] for
    /// products materialized only up to a lower dimension.
    pub fn nominal_dim(&self) -> usize {
        self.nominal_dim
    }

    pub fn is_truncated(&self) -> bool {
        self.nominal_dim > self.dim()
    }

    pub fn count(&self, d: usize) -> usize {
        self.counts.get(d).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.count(0) == 0
    }

    pub fn product(&self) -> Option<&ProductStructure> {
        self.product.as_deref()
    }

    /// Stored faces of the nondegenerate simplex `(d, id)`.
    pub fn faces(&self, d: usize, id: u32) -> &[SimplexRef] {
        let start = id as usize * (d + 1);
        &self.faces[d][start..start + d + 1]
    }

    pub fn face_of(&self, d: usize, id: u32, i: usize) -> SimplexRef {
        self.faces[d][id as usize * (d + 1) + i]
    }

    /// `d_i` of an arbitrary canonical reference.
    pub fn face(&self, r: SimplexRef, i: usize) -> SimplexRef {
        let base = r.base_dim();
        face_of_ref(r, i, |v| self.face_of(base, r.id, v))
    }

    /// Restriction of `r` to the sorted vertex list `verts`.
    pub fn restrict(&self, r: SimplexRef, verts: &[usize]) -> SimplexRef {
        if let Some(p) = &self.product {
            if let Some(hit) = p.restrict(r, verts) {
                return hit;
            }
        }
        let mut out = r;
        let mut keep = verts.iter().rev().peekable();
        for j in (0..=r.dim()).rev() {
            if keep.peek() == Some(&&j) {
                keep.next();
            } else {
                out = self.face(out, j);
            }
        }
        out
    }

    /// Restriction to the contiguous vertex range `lo..=hi`.
    pub fn interval(&self, r: SimplexRef, lo: usize, hi: usize) -> SimplexRef {
        let verts: Vec<usize> = (lo..=hi).collect();
        self.restrict(r, &verts)
    }

    /// Checks face ranges, canonical words and the simplicial identities.
    pub fn validate(&self) -> Result<()> {
        self.validate_references()?;
        for d in 2..self.counts.len() {
            for id in 0..self.counts[d] as u32 {
                let x = SimplexRef::nondegenerate(d, id);
                for j in 1..=d {
                    let dj = self.face(x, j);
                    for i in 0..j {
                        if self.face(dj, i) != self.face(self.face(x, i), j - 1) {
                            return Err(Error::Parse(format!(
                                "simplicial identity d_{i} d_{j} fails on simplex {id} of dimension {d}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_references(&self) -> Result<()> {
        if self.counts.len() > MAX_DIM + 1 {
            return Err(Error::Unsupported(format!("dimension above {MAX_DIM}")));
        }
        if self.faces.len() != self.counts.len() || !self.faces.first().is_none_or(Vec::is_empty) {
            return Err(Error::Shape("face tables do not match the dimension list".into()));
        }
        for d in 1..self.counts.len() {
            if self.faces[d].len() != self.counts[d] * (d + 1) {
                return Err(Error::Shape(format!("dimension {d}: wrong number of faces")));
            }
            for f in &self.faces[d] {
                let ok = f.dim() == d - 1
                    && (f.mask as u32) < (1u32 << (d - 1))
                    && (f.id as usize) < self.count(f.base_dim());
                if !ok {
                    return Err(Error::Parse(format!("dimension {d}: invalid face reference {f}")));
                }
            }
        }
        Ok(())
    }

    /// The sub-simplicial set of simplices of dimension at most `d`.
    pub fn skeleton(&self, d: usize) -> SimplicialSet {
        let keep = (d + 1).min(self.counts.len());
        let mut s = Self::new_unchecked(
            format!("skeleton({},{d})", self.label),
            self.counts[..keep].to_vec(),
            self.faces[..keep].to_vec(),
        );
        if self.product.is_none() {
            s.nominal_dim = self.nominal_dim.min(d).max(s.dim());
        }
        s
    }

    /// Serializes in the `sset v1` text format.
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "sset v1")?;
        let mut line = String::new();
        for d in 0..self.counts.len() {
            writeln!(w, "dim {d} {}", self.counts[d])?;
            for id in 0..self.counts[d] as u32 {
                line.clear();
                let _ = write!(line, "{id}");
                if d > 0 {
                    for f in self.faces(d, id) {
                        let _ = write!(line, " {f}");
                    }
                }
                writeln!(w, "{line}")?;
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn from_text(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some("sset v1") {
            return Err(Error::Parse("missing 'sset v1' header".into()));
        }
        let mut counts = Vec::new();
        let mut faces: Vec<Vec<SimplexRef>> = Vec::new();
        let mut lines = lines.peekable();
        while let Some(header) = lines.next() {
            let parts: Vec<&str> = header.split_whitespace().collect();
            let (d, n) = match parts.as_slice() {
                ["dim", d, n] => (parse_num(d)?, parse_num(n)?),
                _ => return Err(Error::Parse(format!("expected 'dim d count', found '{header}'"))),
            };
            if d != counts.len() {
                return Err(Error::Parse(format!("dimension {d} out of order")));
            }
            let mut table = Vec::with_capacity(if d == 0 { 0 } else { n * (d + 1) });
            for id in 0..n {
                let line = lines.next().ok_or_else(|| Error::Parse(format!("dimension {d}: missing simplices")))?;
                let mut toks = line.split_whitespace();
                if parse_num(toks.next().unwrap_or(""))? != id {
                    return Err(Error::Parse(format!("dimension {d}: expected simplex id {id}")));
                }
                let fs: Vec<&str> = toks.collect();
                if fs.len() != if d == 0 { 0 } else { d + 1 } {
                    return Err(Error::Parse(format!("dimension {d}, simplex {id}: wrong number of faces")));
                }
                for f in fs {
                    table.push(parse_face(f, d - 1)?);
                }
            }
            counts.push(n);
            faces.push(table);
        }
        if counts.is_empty() {
            return Err(Error::Parse("no dimensions".into()));
        }
        Self::from_faces(label, counts, faces)
    }

    /// SHA-256 of the text serialization.
    pub fn digest(&self) -> [u8; 32] {
        *self.digest.get_or_init(|| {
            let mut h = HashWriter(Sha256::new());
            self.write_text(&mut h).expect("hashing");
            h.0.finalize().into()
        })
    }

    /// Short numeric identity used to tag cochains.
    pub fn space_id(&self) -> u64 {
        u64::from_le_bytes(self.digest()[..8].try_into().unwrap())
    }
}

struct HashWriter(Sha256);

impl Write for HashWriter {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.update(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

fn parse_num(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("expected a number, found '{s}'")))
}

fn parse_face(s: &str, dim: usize) -> Result<SimplexRef> {
    let (id, word) = s.split_once(':').ok_or_else(|| Error::Parse(format!("face '{s}' lacks ':'")))?;
    let id = parse_num(id)? as u32;
    let word: Vec<usize> = if word.is_empty() {
        vec![]
    } else {
        word.split(',').map(parse_num).collect::<Result<_>>()?
    };
    SimplexRef::from_word(dim, id, &word).ok_or_else(|| Error::Parse(format!("face '{s}' has a non-canonical word")))
}
