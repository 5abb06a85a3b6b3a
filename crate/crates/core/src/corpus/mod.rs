//! Documents, term-document matrices and topic relevance models.
//!
//! On disk a corpus is a directory of UTF-8 `.txt` files (the file stem is
//! the document id) with an optional `topics.tsv` holding
//! `doc_id<TAB>topic_id[<TAB>weight]` lines.

mod synth;
mod text;
mod topics;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

pub use synth::{
    parse_distribution, primary_term, shared_term, synthesize_collection, SynthSpec, TWO_TOPIC_TYPES,
};
pub use text::{
    build_matrix, default_stopwords, load_stopwords, parse_stopwords, terms_of, tokenize, Stopwords,
    TermDocumentMatrix,
};
pub use topics::{
    default_doc_ids, default_topic_ids, intra_topic_pairs, similarity_matrix, PairSet, SimilarityMatrix,
    TopicModel,
};

use crate::error::{Error, Result};

pub const TOPICS_FILE: &str = "topics.tsv";

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub text: String,
    /// Judged topics with their raw (unnormalized) relevance.
    pub topic_labels: Option<BTreeMap<String, f64>>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            topic_labels: None,
        }
    }
}

/// A loaded corpus: documents sorted by id, plus the topic model when every
/// document carries labels.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub topics: Option<TopicModel>,
}

pub fn load_corpus_dir(dir: &Path) -> Result<Corpus> {
    let mut documents = Vec::new();
    let entries = std::fs::read_dir(dir)
        .map_err(|e| std::io::Error::new(e.kind(), format!("corpus directory {}: {e}", dir.display())))?;
    for entry in entries {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") {
            continue;
        }
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::Format(format!("non-UTF-8 file name {}", path.display())))?
            .to_owned();
        let text = std::fs::read_to_string(&path)?;
        documents.push(Document::new(id, text));
    }
    if documents.is_empty() {
        return Err(Error::Format(format!("no .txt documents in {}", dir.display())));
    }
    documents.sort_by(|a, b| a.id.cmp(&b.id));

    let labels_path = dir.join(TOPICS_FILE);
    let topics = if labels_path.exists() {
        let judgments = parse_topics_tsv(&std::fs::read_to_string(&labels_path)?)?;
        for d in &mut documents {
            d.topic_labels = judgments
                .get(&d.id)
                .map(|js| js.iter().cloned().collect::<BTreeMap<_, _>>());
        }
        let ids: Vec<String> = documents.iter().map(|d| d.id.clone()).collect();
        Some(TopicModel::from_judgments(&ids, &judgments)?)
    } else {
        None
    };
    Ok(Corpus { documents, topics })
}

/// Parses `doc<TAB>topic[<TAB>weight]` lines; a doc may span several lines.
pub fn parse_topics_tsv(text: &str) -> Result<BTreeMap<String, Vec<(String, f64)>>> {
    let mut out: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let (doc, topic, weight) = match fields.as_slice() {
            [d, t] => (*d, *t, 1.0),
            [d, t, w] => {
                let w = w.parse::<f64>().map_err(|e| {
                    Error::Format(format!("{TOPICS_FILE} line {}: {e}", lineno + 1))
                })?;
                (*d, *t, w)
            }
            _ => {
                return Err(Error::Format(format!(
                    "{TOPICS_FILE} line {}: expected doc_id<TAB>topic_id",
                    lineno + 1
                )))
            }
        };
        out.entry(doc.to_owned()).or_default().push((topic.to_owned(), weight));
    }
    Ok(out)
}

/// Writes one `.txt` per document and `topics.tsv` from the topic model.
pub fn write_corpus_dir(dir: &Path, docs: &[Document], tm: &TopicModel) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for d in docs {
        std::fs::write(dir.join(format!("{}.txt", d.id)), &d.text)?;
    }
    let mut tsv = String::new();
    for (j, id) in tm.doc_ids().iter().enumerate() {
        for (t, topic) in tm.topic_ids().iter().enumerate() {
            let r = tm.relevance()[(t, j)];
            if r > 0.0 {
                if r == 1.0 {
                    let _ = writeln!(tsv, "{id}\t{topic}");
                } else {
                    let _ = writeln!(tsv, "{id}\t{topic}\t{r}");
                }
            }
        }
    }
    std::fs::write(dir.join(TOPICS_FILE), tsv)?;
    Ok(())
}
