//! Text formats for contexts, tagged corpora and id lists.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::corpus::{Context, Document, DOC_MARKER};
use crate::error::{Error, Result};

/// Writes the vertical tagged format. Empty sentences are skipped.
pub fn write_tagged_corpus(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        out.push_str(DOC_MARKER);
        out.push('\n');
        for sentence in doc.sentences.iter().filter(|s| !s.is_empty()) {
            for t in sentence {
                let _ = writeln!(out, "{}\t{}\t{}", t.surface, t.lemma, t.pos);
            }
            out.push('\n');
        }
    }
    out
}

/// Contexts file: a `#target=<lemma>` header, then one
/// `context_id<TAB>document_id[<TAB>lemma]...` line per context.
pub fn write_contexts(target: &str, contexts: &[Context]) -> String {
    let mut out = format!("#target={target}\n");
    for c in contexts {
        let _ = write!(out, "{}\t{}", c.id, c.document_id);
        for l in &c.lemmas {
            out.push('\t');
            out.push_str(l);
        }
        out.push('\n');
    }
    out
}

pub fn read_contexts<R: BufRead>(reader: R) -> Result<(String, Vec<Context>)> {
    const NAME: &str = "contexts";
    let mut lines = reader.lines().enumerate();
    let target = match lines.next() {
        Some((_, line)) => line?
            .strip_prefix("#target=")
            .map(str::to_string)
            .filter(|t| !t.is_empty())
            .ok_or_else(|| Error::parse(NAME, 1, "expected #target=<lemma> header"))?,
        None => return Err(Error::parse(NAME, 1, "empty contexts file")),
    };
    let mut contexts: Vec<Context> = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let mut num = |what: &str| -> Result<u64> {
            let f = fields.next().unwrap_or("");
            f.parse()
                .map_err(|_| Error::parse(NAME, idx + 1, format!("bad {what} {f:?}")))
        };
        let id = num("context id")?;
        let document_id = num("document id")?;
        if contexts.last().is_some_and(|c| c.id >= id) {
            return Err(Error::parse(NAME, idx + 1, "context ids must be strictly increasing"));
        }
        let lemmas: Vec<String> = fields.filter(|f| !f.is_empty()).map(str::to_string).collect();
        if lemmas.contains(&target) {
            return Err(Error::parse(NAME, idx + 1, "context contains its own target"));
        }
        contexts.push(Context::new(id, document_id, target.clone(), lemmas));
    }
    Ok((target, contexts))
}

pub fn write_ids(ids: &[u64]) -> String {
    ids.iter().map(|id| format!("{id}\n")).collect()
}

pub fn read_ids<R: BufRead>(reader: R) -> Result<Vec<u64>> {
    let mut ids = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        ids.push(
            line.parse()
                .map_err(|_| Error::parse("ids", idx + 1, format!("bad id {line:?}")))?,
        );
    }
    Ok(ids)
}
