//! Versioned on-disk formats for corpora and model banks.
//!
//! Corpus binary: magic `CRTC`, u32 version, three vocabularies (u64 count,
//! then u32-length-prefixed UTF-8 labels), u64 triple count, triples as
//! three u32 each. Corpus TSV: `#queries`, `#users`, `#items` sections of
//! `index<TAB>label`, then `#triples` of `query<TAB>user<TAB>item` indices.
//!
//! Bank binary: magic `CRTB`, u32 version, u8 kind, u64 `|Q| |U| |A| n`,
//! then every matrix row-major as little-endian f64 (LCR: S V T U; ILCR adds
//! A; PITF: user, query, item/user, item/query; NMF: W then H).

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::corpus::{Corpus, Interaction, Vocabularies, Vocabulary};
use crate::error::{Error, Result};
use crate::models::{Dims, Model, ModelKind, NmfModel, ParamBank, PitfBank};

const CORPUS_MAGIC: &[u8; 4] = b"CRTC";
const BANK_MAGIC: &[u8; 4] = b"CRTB";
pub const FORMAT_VERSION: u32 = 1;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(self.bad("truncated"));
        };
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| self.bad("size overflow"))
    }

    fn f64s(&mut self, len: usize) -> Result<Vec<f64>> {
        let bytes = self.take(len.checked_mul(8).ok_or_else(|| self.bad("size overflow"))?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        if self.take(4)? != magic {
            return Err(self.bad("wrong magic"));
        }
        let version = self.u32()?;
        if version != FORMAT_VERSION {
            return Err(self.bad(&format!("unsupported version {version}")));
        }
        Ok(())
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(self.bad("trailing bytes"));
        }
        Ok(())
    }

    fn bad(&self, message: &str) -> Error {
        Error::Snapshot {
            path: self.path.to_owned(),
            message: message.to_owned(),
        }
    }
}

fn put_f64s(out: &mut Vec<u8>, values: &[f64]) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn put_vocab(out: &mut Vec<u8>, vocab: &Vocabulary) {
    out.extend_from_slice(&(vocab.len() as u64).to_le_bytes());
    for label in vocab.labels() {
        out.extend_from_slice(&(label.len() as u32).to_le_bytes());
        out.extend_from_slice(label.as_bytes());
    }
}

pub fn encode_corpus(corpus: &Corpus) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(CORPUS_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    let vocab = corpus.vocab();
    for v in [&vocab.queries, &vocab.users, &vocab.items] {
        put_vocab(&mut out, v);
    }
    out.extend_from_slice(&(corpus.len() as u64).to_le_bytes());
    for t in corpus.interactions() {
        for x in [t.query, t.user, t.item] {
            out.extend_from_slice(&(x as u32).to_le_bytes());
        }
    }
    out
}

pub fn decode_corpus(bytes: &[u8], path: &Path) -> Result<Corpus> {
    let mut r = Reader { bytes, pos: 0, path };
    r.header(CORPUS_MAGIC)?;
    let mut vocabs = Vec::with_capacity(3);
    for _ in 0..3 {
        let len = r.usize()?;
        let mut vocab = Vocabulary::new();
        for _ in 0..len {
            let n = r.u32()? as usize;
            let label = std::str::from_utf8(r.take(n)?).map_err(|_| r.bad("label is not UTF-8"))?;
            vocab.intern(label);
        }
        if vocab.len() != len {
            return Err(r.bad("duplicate vocabulary label"));
        }
        vocabs.push(vocab);
    }
    let items = vocabs.pop().unwrap();
    let users = vocabs.pop().unwrap();
    let queries = vocabs.pop().unwrap();
    let n = r.usize()?;
    let mut triples = Vec::with_capacity(n.min(bytes.len() / 12));
    for _ in 0..n {
        let q = r.u32()? as usize;
        let u = r.u32()? as usize;
        let a = r.u32()? as usize;
        triples.push(Interaction::new(q, u, a));
    }
    r.finish()?;
    let vocab = Vocabularies { queries, users, items };
    Corpus::from_interactions(Arc::new(vocab), triples)
}

pub fn write_corpus_tsv<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    let vocab = corpus.vocab();
    for (name, v) in [("queries", &vocab.queries), ("users", &vocab.users), ("items", &vocab.items)] {
        writeln!(out, "#{name}")?;
        for (i, label) in v.labels().iter().enumerate() {
            writeln!(out, "{i}\t{label}")?;
        }
    }
    writeln!(out, "#triples")?;
    for t in corpus.interactions() {
        writeln!(out, "{}\t{}\t{}", t.query, t.user, t.item)?;
    }
    out.flush()
}

pub fn read_corpus_tsv<R: Read>(input: R, path: &Path) -> Result<Corpus> {
    let bad = |line: usize, message: &str| Error::Parse {
        path: path.to_owned(),
        line,
        message: message.to_owned(),
    };
    let mut section = "";
    let mut vocab = Vocabularies::default();
    let mut triples = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = i + 1;
        if let Some(name) = line.strip_prefix('#') {
            section = match name {
                "queries" => "queries",
                "users" => "users",
                "items" => "items",
                "triples" => "triples",
                _ => return Err(bad(lineno, "unknown section")),
            };
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match section {
            "queries" | "users" | "items" => {
                let [index, label] = fields[..] else {
                    return Err(bad(lineno, "expected index and label"));
                };
                let v = match section {
                    "queries" => &mut vocab.queries,
                    "users" => &mut vocab.users,
                    _ => &mut vocab.items,
                };
                let index: usize = index.parse().map_err(|_| bad(lineno, "bad index"))?;
                if index != v.len() || v.intern(label) != index {
                    return Err(bad(lineno, "vocabulary out of order or duplicated"));
                }
            }
            "triples" => {
                let [q, u, a] = fields[..] else {
                    return Err(bad(lineno, "expected three indices"));
                };
                let parse = |s: &str| s.parse::<usize>().map_err(|_| bad(lineno, "bad index"));
                triples.push(Interaction::new(parse(q)?, parse(u)?, parse(a)?));
            }
            _ => return Err(bad(lineno, "data before first section")),
        }
    }
    Corpus::from_interactions(Arc::new(vocab), triples)
}

fn is_tsv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "tsv" || e == "txt")
}

/// Writes TSV for `.tsv`/`.txt` paths, binary otherwise.
pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    if is_tsv(path) {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        write_corpus_tsv(corpus, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
    } else {
        fs::write(path, encode_corpus(corpus)).map_err(|e| Error::io(path, e))
    }
}

pub fn load_corpus(path: &Path) -> Result<Corpus> {
    if is_tsv(path) {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        read_corpus_tsv(file, path)
    } else {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        decode_corpus(&bytes, path)
    }
}

pub fn encode_model(model: &Model) -> Vec<u8> {
    let dims = crate::models::Scorer::dims(model);
    let mut out = Vec::new();
    out.extend_from_slice(BANK_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(model.kind().code());
    for d in [dims.n_queries, dims.n_users, dims.n_items, dims.n] {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for p in model.parameters() {
        put_f64s(&mut out, p);
    }
    out
}

pub fn decode_model(bytes: &[u8], path: &Path) -> Result<Model> {
    let mut r = Reader { bytes, pos: 0, path };
    r.header(BANK_MAGIC)?;
    let code = r.u8()?;
    let kind = ModelKind::from_code(code).ok_or_else(|| r.bad(&format!("unknown model code {code}")))?;
    let dims = Dims::new(r.usize()?, r.usize()?, r.usize()?, r.usize()?);
    let (nq, nu, na, n) = (dims.n_queries, dims.n_users, dims.n_items, dims.n);
    let model = match kind {
        ModelKind::Lcr | ModelKind::Ilcr => {
            let s = r.f64s(nq * n)?;
            let v = r.f64s(nu * n)?;
            let t = r.f64s(na * n)?;
            let u = r.f64s(nu * n * n)?;
            let a = if kind == ModelKind::Ilcr { Some(r.f64s(na * n * n)?) } else { None };
            Model::Latent(ParamBank::from_parts(kind, dims, s, v, t, u, a)?)
        }
        ModelKind::Pitf => {
            let u = r.f64s(nu * n)?;
            let q = r.f64s(nq * n)?;
            let iu = r.f64s(na * n)?;
            let iq = r.f64s(na * n)?;
            Model::Pitf(PitfBank::from_parts(dims, u, q, iu, iq)?)
        }
        ModelKind::Nmf => {
            let w = r.f64s(nq * n)?;
            let h = r.f64s(n * na)?;
            Model::Nmf(NmfModel::from_parts(dims, w, h)?)
        }
    };
    r.finish()?;
    Ok(model)
}

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    fs::write(path, encode_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Model> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CorpusBuilder;
    use crate::models::init_bank;
    use proptest::prelude::*;

    fn labeled_corpus(rows: &[(String, String, String)]) -> Corpus {
        let mut b = CorpusBuilder::new();
        for (q, u, a) in rows {
            b.push(q, u, a);
        }
        b.build()
    }

    proptest! {
        #[test]
        fn corpus_round_trips(rows in prop::collection::vec(("[a-z]{1,3}", "[a-z ]{1,4}", "[a-z0-9]{1,3}"), 0..40)) {
            let corpus = labeled_corpus(&rows);
            let path = Path::new("mem");
            let bin = decode_corpus(&encode_corpus(&corpus), path).unwrap();
            prop_assert_eq!(&bin, &corpus);
            let mut text = Vec::new();
            write_corpus_tsv(&corpus, &mut text).unwrap();
            let tsv = read_corpus_tsv(text.as_slice(), path).unwrap();
            prop_assert_eq!(&tsv, &corpus);
        }
    }

    #[test]
    fn models_round_trip() {
        let dims = Dims::new(2, 3, 4, 2);
        for kind in [ModelKind::Lcr, ModelKind::Ilcr, ModelKind::Pitf] {
            let model = init_bank(kind, dims, -1.0, 1.0, 7).unwrap();
            let back = decode_model(&encode_model(&model), Path::new("mem")).unwrap();
            assert_eq!(back, model);
        }
        let nmf = Model::Nmf(NmfModel::from_parts(dims, vec![0.5; 4], vec![0.25; 8]).unwrap());
        assert_eq!(decode_model(&encode_model(&nmf), Path::new("mem")).unwrap(), nmf);
    }

    #[test]
    fn corrupt_inputs_rejected() {
        let model = init_bank(ModelKind::Lcr, Dims::new(1, 1, 2, 1), -1.0, 1.0, 0).unwrap();
        let mut bytes = encode_model(&model);
        bytes.pop();
        assert!(matches!(decode_model(&bytes, Path::new("x")), Err(Error::Snapshot { .. })));
        assert!(decode_corpus(b"CRTB\x01\0\0\0", Path::new("x")).is_err());
        let mut bytes = encode_model(&model);
        bytes[4] = 9;
        assert!(decode_model(&bytes, Path::new("x")).is_err());
    }
}
