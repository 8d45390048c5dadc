//! Little-endian binary index file.
//!
//! ```text
//! magic "IDFAWEIX" | version u32 | N u64 | avgdl f64 | vocabulary u64
//! doc table:  N × (id_len u32, id bytes, length u32)
//! postings:   vocabulary × (term_len u32, term bytes, df u32, df × (doc u32, tf u32))
//! forward:    N × (count u32, count × term_id u32)
//! crc32 u32 over everything above
//! ```

use std::fs;
use std::path::Path;

use super::{DocEntry, InvertedIndex, Posting, TermId};
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"IDFAWEIX";
pub const FORMAT_VERSION: u32 = 1;

pub fn save_index(index: &InvertedIndex, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode(index))?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<InvertedIndex> {
    decode(&fs::read(path)?)
}

fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    put_u32(buf, s.len() as u32);
    buf.extend_from_slice(s.as_bytes());
}

/// Serializes the index into the on-disk byte layout.
pub fn encode(index: &InvertedIndex) -> Vec<u8> {
    let (docs, terms, postings, forward) = index.parts();
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    put_u32(&mut buf, FORMAT_VERSION);
    buf.extend_from_slice(&(docs.len() as u64).to_le_bytes());
    buf.extend_from_slice(&index.avgdl().to_le_bytes());
    buf.extend_from_slice(&(terms.len() as u64).to_le_bytes());
    for d in docs {
        put_str(&mut buf, &d.doc_id);
        put_u32(&mut buf, d.length);
    }
    for (term, list) in terms.iter().zip(postings) {
        put_str(&mut buf, term);
        put_u32(&mut buf, list.len() as u32);
        for p in list {
            put_u32(&mut buf, p.doc);
            put_u32(&mut buf, p.tf);
        }
    }
    for ids in forward {
        put_u32(&mut buf, ids.len() as u32);
        for &id in ids {
            put_u32(&mut buf, id);
        }
    }
    let crc = crc32fast::hash(&buf);
    put_u32(&mut buf, crc);
    buf
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::CorruptIndex("unexpected end of data".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        String::from_utf8(self.take(len)?.to_vec())
            .map_err(|_| Error::CorruptIndex("string is not UTF-8".into()))
    }

    fn count(&mut self, limit: usize, what: &str) -> Result<usize> {
        let n = self.u64()?;
        usize::try_from(n)
            .ok()
            .filter(|&n| n <= limit)
            .ok_or_else(|| Error::CorruptIndex(format!("implausible {what} count {n}")))
    }
}

/// Parses and verifies bytes produced by [`encode`].
pub fn decode(bytes: &[u8]) -> Result<InvertedIndex> {
    if bytes.len() < MAGIC.len() + 4 + 4 {
        return Err(Error::Checksum);
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    if &body[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic);
    }
    if crc32fast::hash(body) != u32::from_le_bytes(trailer.try_into().unwrap()) {
        return Err(Error::Checksum);
    }

    let mut r = Reader {
        bytes: body,
        pos: MAGIC.len(),
    };
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let n_docs = r.count(body.len(), "document")?;
    let stored_avgdl = r.f64()?;
    let n_terms = r.count(body.len(), "term")?;

    let mut docs = Vec::with_capacity(n_docs);
    for _ in 0..n_docs {
        let doc_id = r.string()?;
        let length = r.u32()?;
        docs.push(DocEntry { doc_id, length });
    }
    let mut terms = Vec::with_capacity(n_terms);
    let mut postings = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let term = r.string()?;
        let df = r.u32()? as usize;
        if df > n_docs {
            return Err(Error::CorruptIndex(format!("df {df} of `{term}` exceeds N")));
        }
        let mut list = Vec::with_capacity(df);
        for _ in 0..df {
            let doc = r.u32()?;
            let tf = r.u32()?;
            let increasing = list.last().is_none_or(|p: &Posting| p.doc < doc);
            if doc as usize >= n_docs || tf == 0 || !increasing {
                return Err(Error::CorruptIndex(format!("bad posting for `{term}`")));
            }
            list.push(Posting { doc, tf });
        }
        terms.push(term);
        postings.push(list);
    }
    let mut forward = Vec::with_capacity(n_docs);
    for d in &docs {
        let count = r.u32()?;
        if count != d.length {
            return Err(Error::CorruptIndex(format!("length mismatch for `{}`", d.doc_id)));
        }
        let ids = (0..count)
            .map(|_| {
                let id: TermId = r.u32()?;
                if id as usize >= n_terms {
                    return Err(Error::CorruptIndex("term id out of range".into()));
                }
                Ok(id)
            })
            .collect::<Result<Vec<_>>>()?;
        forward.push(ids);
    }
    if r.pos != body.len() {
        return Err(Error::CorruptIndex("trailing bytes".into()));
    }

    let index = InvertedIndex::from_parts(docs, terms, postings, forward);
    if index.avgdl().to_bits() != stored_avgdl.to_bits() {
        return Err(Error::CorruptIndex("stored avgdl disagrees with doc table".into()));
    }
    Ok(index)
}
