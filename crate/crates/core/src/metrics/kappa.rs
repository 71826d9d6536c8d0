use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::hash::Hash;

use serde::Serialize;

use super::MetricsError;
use crate::corpus::Corpus;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaStats {
    pub kappa: f64,
    pub p_o: f64,
    pub p_e: f64,
}

/// Cohen's kappa with observed and chance agreement.
pub fn kappa_stats<T: Eq + Hash + Clone + ToString>(a: &[T], b: &[T]) -> Result<KappaStats, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = a.len() as f64;
    let mut ma: HashMap<&T, usize> = HashMap::new();
    let mut mb: HashMap<&T, usize> = HashMap::new();
    let mut agree = 0usize;
    for (x, y) in a.iter().zip(b) {
        *ma.entry(x).or_default() += 1;
        *mb.entry(y).or_default() += 1;
        if x == y {
            agree += 1;
        }
    }
    if ma.len() == 1 && mb.len() == 1 && a[0] == b[0] {
        return Err(MetricsError::Undefined(a[0].to_string()));
    }
    let p_o = agree as f64 / n;
    let p_e = ma
        .iter()
        .map(|(label, ca)| *ca as f64 * mb.get(label).copied().unwrap_or(0) as f64)
        .sum::<f64>()
        / (n * n);
    Ok(KappaStats {
        kappa: (p_o - p_e) / (1.0 - p_e),
        p_o,
        p_e,
    })
}

pub fn cohen_kappa<T: Eq + Hash + Clone + ToString>(a: &[T], b: &[T]) -> Result<f64, MetricsError> {
    kappa_stats(a, b).map(|s| s.kappa)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairAgreement {
    pub a: usize,
    pub b: usize,
    /// `None` when both annotators used one and the same label throughout.
    pub kappa: Option<f64>,
    pub p_o: f64,
    pub p_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub annotators: Vec<String>,
    pub items: usize,
    /// Symmetric; `None` where kappa is undefined.
    pub matrix: Vec<Vec<Option<f64>>>,
    /// Every unordered pair, `a < b`.
    pub pairs: Vec<PairAgreement>,
}

impl AgreementReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let width = self.annotators.iter().map(|a| a.chars().count()).max().unwrap_or(0).max(6) + 2;
        let mut out = format!("{:<width$}", "");
        for a in &self.annotators {
            let _ = write!(out, "{a:>width$}");
        }
        out.push('\n');
        for (i, row) in self.matrix.iter().enumerate() {
            let _ = write!(out, "{:<width$}", self.annotators[i]);
            for v in row {
                match v {
                    Some(k) => {
                        let _ = write!(out, "{k:>width$.3}");
                    }
                    None => {
                        let _ = write!(out, "{:>width$}", "n/a");
                    }
                }
            }
            out.push('\n');
        }
        let defined: Vec<f64> = self.pairs.iter().filter_map(|p| p.kappa).collect();
        if let (Some(lo), Some(hi)) = (
            defined.iter().copied().reduce(f64::min),
            defined.iter().copied().reduce(f64::max),
        ) {
            let _ = writeln!(out, "pairwise kappa range: {lo:.3} .. {hi:.3} over {} items", self.items);
        }
        out
    }
}

/// Kappa for every pair of annotators. Each entry of `annotations` is
/// `(name, labels)`; all label sequences must have the same length.
pub fn pairwise_kappa<T: Eq + Hash + Clone + ToString>(annotations: &[(String, Vec<T>)]) -> Result<AgreementReport, MetricsError> {
    if annotations.len() < 2 {
        return Err(MetricsError::TooFew {
            what: "annotators",
            needed: 2,
            got: annotations.len(),
        });
    }
    let items = annotations[0].1.len();
    for (_, labels) in annotations {
        if labels.len() != items {
            return Err(MetricsError::LengthMismatch(items, labels.len()));
        }
    }
    if items == 0 {
        return Err(MetricsError::Empty);
    }
    let k = annotations.len();
    let mut matrix = vec![vec![None; k]; k];
    let mut pairs = Vec::new();
    for i in 0..k {
        let distinct: std::collections::HashSet<&T> = annotations[i].1.iter().collect();
        matrix[i][i] = (distinct.len() > 1).then_some(1.0);
        for j in i + 1..k {
            let pair = match kappa_stats(&annotations[i].1, &annotations[j].1) {
                Ok(s) => PairAgreement { a: i, b: j, kappa: Some(s.kappa), p_o: s.p_o, p_e: s.p_e },
                Err(MetricsError::Undefined(_)) => PairAgreement { a: i, b: j, kappa: None, p_o: 1.0, p_e: 1.0 },
                Err(e) => return Err(e),
            };
            matrix[i][j] = pair.kappa;
            matrix[j][i] = pair.kappa;
            pairs.push(pair);
        }
    }
    Ok(AgreementReport {
        annotators: annotations.iter().map(|(n, _)| n.clone()).collect(),
        items,
        matrix,
        pairs,
    })
}

/// How a sentence's spans become one agreement label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelMode {
    /// The alphabetically first tag present, or `none`.
    #[default]
    FirstTag,
    /// The whole set of tags present, joined with `+`, or `none`.
    TagSet,
}

/// One label per sentence per annotator, in the order of the first corpus.
/// Every annotator must cover exactly the same sentence ids.
pub fn iaa_labels(annotators: &[Corpus], mode: LabelMode) -> Result<Vec<Vec<String>>, MetricsError> {
    let Some(first) = annotators.first() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(annotators.len());
    for (k, c) in annotators.iter().enumerate() {
        if c.len() != first.len() {
            return Err(MetricsError::LengthMismatch(first.len(), c.len()));
        }
        let by_id: HashMap<&str, &crate::corpus::AnnotatedSentence> = c.sentences.iter().map(|s| (s.id.as_str(), s)).collect();
        let mut labels = Vec::with_capacity(first.len());
        for s in &first.sentences {
            let Some(t) = by_id.get(s.id.as_str()) else {
                return Err(MetricsError::MissingSentence { annotator: k, id: s.id.clone() });
            };
            let tags: BTreeSet<&str> = t.spans.iter().map(|sp| sp.tag.as_str()).collect();
            labels.push(match (mode, tags.first()) {
                (_, None) => "none".to_string(),
                (LabelMode::FirstTag, Some(t)) => t.to_string(),
                (LabelMode::TagSet, Some(_)) => tags.into_iter().collect::<Vec<_>>().join("+"),
            });
        }
        out.push(labels);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotatedSentence, ErrorTag, Source, Span};

    #[test]
    fn identical_annotators() {
        let a = ["x", "y", "x", "z"];
        assert_eq!(cohen_kappa(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn chance_level() {
        let s = kappa_stats(&["x", "x", "y", "y"], &["x", "y", "x", "y"]).unwrap();
        assert!((s.p_o - 0.5).abs() < 1e-12);
        assert!((s.p_e - 0.5).abs() < 1e-12);
        assert!(s.kappa.abs() < 1e-9);
    }

    #[test]
    fn degenerate_and_malformed() {
        assert_eq!(cohen_kappa(&["x", "x"], &["x", "x"]), Err(MetricsError::Undefined("x".into())));
        assert_eq!(cohen_kappa(&["x"], &["x", "y"]), Err(MetricsError::LengthMismatch(1, 2)));
        assert_eq!(cohen_kappa::<&str>(&[], &[]), Err(MetricsError::Empty));
        // Constant but different labels: p_e = 0, kappa = 0.
        assert_eq!(cohen_kappa(&["x", "x"], &["y", "y"]).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_three_annotators() {
        // a vs b: p_o = 5/6; marginals a {x:3, y:3}, b {x:2, y:4} → p_e = (6 + 12)/36 = 0.5
        // kappa = (5/6 - 1/2) / (1/2) = 2/3
        let a = vec!["x", "x", "x", "y", "y", "y"];
        let b = vec!["x", "x", "y", "y", "y", "y"];
        let c = vec!["y", "y", "y", "x", "x", "x"];
        let r = pairwise_kappa(&[("a".to_string(), a), ("b".to_string(), b), ("c".to_string(), c)]).unwrap();
        assert!((r.matrix[0][1].unwrap() - 2.0 / 3.0).abs() < 1e-9);
        // a vs c: p_o = 0, p_e = 0.5 → -1
        assert!((r.matrix[0][2].unwrap() + 1.0).abs() < 1e-9);
        // b vs c: p_o = 1/6, marginals b {x:2,y:4}, c {x:3,y:3} → p_e = 0.5 → -2/3
        assert!((r.matrix[1][2].unwrap() + 2.0 / 3.0).abs() < 1e-9);
        assert_eq!(r.matrix[2][1], r.matrix[1][2]);
        assert_eq!(r.matrix[0][0], Some(1.0));
        assert_eq!(r.pairs.len(), 3);
    }

    #[test]
    fn needs_two_annotators() {
        assert!(matches!(pairwise_kappa(&[("a".to_string(), vec!["x"])]), Err(MetricsError::TooFew { .. })));
    }

    #[test]
    fn sentence_labels() {
        let s = |spans: Vec<Span>| AnnotatedSentence::new("s", "abcdefgh", Source::Realec).with_spans(spans);
        let a = Corpus::new(vec![s(vec![
            Span::new(0, 2, ErrorTag::TenseSemantics, None),
            Span::new(3, 5, ErrorTag::Synonyms, None),
        ])]);
        let b = Corpus::new(vec![s(vec![])]);
        assert_eq!(iaa_labels(&[a.clone(), b.clone()], LabelMode::FirstTag).unwrap(), vec![vec!["Synonyms"], vec!["none"]]);
        assert_eq!(iaa_labels(&[a], LabelMode::TagSet).unwrap(), vec![vec!["Synonyms+TenseSemantics"]]);
    }
}
