//! Expert review sheets: TSV `id  text  tag  verdict` with a header row.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::corpus::Corpus;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReviewError {
    #[error("review sheet line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("review sheet lists unknown sentence id `{0}`")]
    UnknownId(String),
    #[error("review sheet lists `{0}` twice")]
    DuplicateId(String),
    #[error("{0} sentence(s) are unreviewed, e.g. `{1}`; review them or keep unreviewed sentences explicitly")]
    Unreviewed(usize, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Verdict {
    Accept,
    Reject,
    #[default]
    Unreviewed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
            Verdict::Unreviewed => "unreviewed",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "accept" => Ok(Verdict::Accept),
            "reject" => Ok(Verdict::Reject),
            "unreviewed" | "" => Ok(Verdict::Unreviewed),
            other => Err(format!("unknown verdict `{other}` (accept, reject, unreviewed)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewRow {
    pub id: String,
    pub text: String,
    /// Comma-separated tags carried by the sentence, or `none`.
    pub tag: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReviewSheet {
    pub rows: Vec<ReviewRow>,
}

const HEADER: &str = "id\ttext\ttag\tverdict";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

/// One unreviewed row per sentence, in corpus order.
pub fn export_review_sheet(corpus: &Corpus) -> ReviewSheet {
    let rows = corpus
        .sentences
        .iter()
        .map(|s| {
            let tags: BTreeSet<&str> = s.spans.iter().map(|sp| sp.tag.as_str()).collect();
            ReviewRow {
                id: s.id.clone(),
                text: s.text.clone(),
                tag: if tags.is_empty() {
                    "none".into()
                } else {
                    tags.into_iter().collect::<Vec<_>>().join(",")
                },
                verdict: Verdict::Unreviewed,
            }
        })
        .collect();
    ReviewSheet { rows }
}

impl ReviewSheet {
    pub fn to_tsv(&self) -> String {
        let mut out = format!("{HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", escape(&r.id), escape(&r.text), escape(&r.tag), r.verdict));
        }
        out
    }

    pub fn from_tsv(content: &str) -> Result<Self, ReviewError> {
        let mut rows = Vec::new();
        for (i, raw) in content.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || (i == 0 && line.starts_with("id\t")) {
                continue;
            }
            let err = |message: String| ReviewError::Malformed { line: i + 1, message };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(err(format!("expected 4 tab-separated columns, found {}", cols.len())));
            }
            let verdict = cols[3].parse().map_err(err)?;
            rows.push(ReviewRow {
                id: unescape(cols[0]),
                text: unescape(cols[1]),
                tag: unescape(cols[2]),
                verdict,
            });
        }
        Ok(ReviewSheet { rows })
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.rows.iter().filter(|r| r.verdict == verdict).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReviewSummary {
    pub accepted: usize,
    pub rejected: usize,
    pub unreviewed_kept: usize,
}

/// Drops rejected sentences. Sentences without a verdict (unreviewed, or
/// absent from the sheet) are an error unless `keep_unreviewed` is set, in
/// which case they are kept.
pub fn apply_review(corpus: &Corpus, sheet: &ReviewSheet, keep_unreviewed: bool) -> Result<(Corpus, ReviewSummary), ReviewError> {
    let ids: HashSet<&str> = corpus.sentences.iter().map(|s| s.id.as_str()).collect();
    let mut verdicts: HashMap<&str, Verdict> = HashMap::new();
    for r in &sheet.rows {
        if !ids.contains(r.id.as_str()) {
            return Err(ReviewError::UnknownId(r.id.clone()));
        }
        if verdicts.insert(r.id.as_str(), r.verdict).is_some() {
            return Err(ReviewError::DuplicateId(r.id.clone()));
        }
    }
    let verdict_of = |id: &str| verdicts.get(id).copied().unwrap_or_default();
    let unreviewed: Vec<&str> = corpus
        .sentences
        .iter()
        .map(|s| s.id.as_str())
        .filter(|id| verdict_of(id) == Verdict::Unreviewed)
        .collect();
    if !unreviewed.is_empty() && !keep_unreviewed {
        return Err(ReviewError::Unreviewed(unreviewed.len(), unreviewed[0].to_string()));
    }
    let mut summary = ReviewSummary::default();
    let sentences = corpus
        .sentences
        .iter()
        .filter(|s| match verdict_of(&s.id) {
            Verdict::Accept => {
                summary.accepted += 1;
                true
            }
            Verdict::Reject => {
                summary.rejected += 1;
                false
            }
            Verdict::Unreviewed => {
                summary.unreviewed_kept += 1;
                true
            }
        })
        .cloned()
        .collect();
    Ok((
        Corpus {
            sentences,
            provenance: corpus.provenance.clone(),
        },
        summary,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotatedSentence, ErrorTag, Source, Span};

    fn corpus(n: usize) -> Corpus {
        Corpus::new(
            (0..n)
                .map(|i| AnnotatedSentence::new(format!("gen-{i:06}"), format!("Generated sentence {i}."), Source::Llm))
                .collect(),
        )
    }

    #[test]
    fn thirty_eight_of_forty() {
        let c = corpus(40);
        let mut sheet = export_review_sheet(&c);
        for (i, r) in sheet.rows.iter_mut().enumerate() {
            r.verdict = if i == 7 || i == 23 { Verdict::Reject } else { Verdict::Accept };
        }
        let (kept, summary) = apply_review(&c, &sheet, false).unwrap();
        assert_eq!(kept.len(), 38);
        assert_eq!(summary.rejected, 2);
        assert!(kept.get("gen-000007").is_none());
    }

    #[test]
    fn unreviewed_needs_flag() {
        let c = corpus(3);
        let sheet = export_review_sheet(&c);
        assert!(matches!(apply_review(&c, &sheet, false), Err(ReviewError::Unreviewed(3, _))));
        let (kept, s) = apply_review(&c, &sheet, true).unwrap();
        assert_eq!((kept.len(), s.unreviewed_kept), (3, 3));
    }

    #[test]
    fn empty_sheet_empty_corpus() {
        let (kept, _) = apply_review(&Corpus::default(), &ReviewSheet::default(), false).unwrap();
        assert!(kept.is_empty());
    }

    #[test]
    fn unknown_and_duplicate_ids() {
        let c = corpus(1);
        let mut sheet = export_review_sheet(&c);
        sheet.rows.push(ReviewRow { id: "zzz".into(), text: String::new(), tag: "none".into(), verdict: Verdict::Accept });
        assert_eq!(apply_review(&c, &sheet, true), Err(ReviewError::UnknownId("zzz".into())));
        let mut sheet = export_review_sheet(&c);
        sheet.rows.push(sheet.rows[0].clone());
        assert!(matches!(apply_review(&c, &sheet, true), Err(ReviewError::DuplicateId(_))));
    }

    #[test]
    fn tsv_round_trip() {
        let c = Corpus::new(vec![AnnotatedSentence::new("a", "Tab\there and a \\ slash", Source::Llm)
            .with_spans(vec![Span::new(0, 3, ErrorTag::Synonyms, None), Span::new(4, 8, ErrorTag::CopyingExpression, None)])]);
        let mut sheet = export_review_sheet(&c);
        assert_eq!(sheet.rows[0].tag, "CopyingExpression,Synonyms");
        sheet.rows[0].verdict = Verdict::Reject;
        let tsv = sheet.to_tsv();
        assert!(tsv.starts_with("id\ttext\ttag\tverdict\n"));
        assert_eq!(ReviewSheet::from_tsv(&tsv).unwrap(), sheet);
        assert!(ReviewSheet::from_tsv("id\ttext\ttag\tverdict\na\tb\tc\tmaybe\n").is_err());
    }
}
