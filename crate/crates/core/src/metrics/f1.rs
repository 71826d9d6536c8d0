use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::Serialize;

use super::{harmonic, pct, MetricsError};
use crate::corpus::{Corpus, ErrorTag, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    /// Identical start, end and tag.
    #[default]
    Strict,
    /// Same tag and at least one shared character.
    Overlap,
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchMode::Strict => "strict",
            MatchMode::Overlap => "overlap",
        })
    }
}

impl FromStr for MatchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(MatchMode::Strict),
            "overlap" => Ok(MatchMode::Overlap),
            other => Err(format!("unknown match mode `{other}` (strict, overlap)")),
        }
    }
}

/// Counts and percentages for one tag (or the micro total).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TagScore {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub gold: usize,
    pub pred: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl TagScore {
    fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = pct(tp, tp + fp);
        let recall = pct(tp, tp + fn_);
        TagScore {
            tp,
            fp,
            fn_,
            gold: tp + fn_,
            pred: tp + fp,
            precision,
            recall,
            f1: harmonic(precision, recall),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub mode: MatchMode,
    pub per_tag: BTreeMap<ErrorTag, TagScore>,
    /// Tags with at least one gold span; the macro average runs over these.
    pub macro_tags: Vec<ErrorTag>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub micro: TagScore,
}

impl EvalReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("match mode: {}\n", self.mode);
        let _ = writeln!(
            out,
            "{:<22}{:>8}{:>8}{:>8}{:>7}{:>7}{:>7}",
            "tag", "P", "R", "F1", "TP", "FP", "FN"
        );
        let row = |out: &mut String, name: &str, s: &TagScore| {
            let _ = writeln!(
                out,
                "{:<22}{:>8.2}{:>8.2}{:>8.2}{:>7}{:>7}{:>7}",
                name, s.precision, s.recall, s.f1, s.tp, s.fp, s.fn_
            );
        };
        for (tag, s) in &self.per_tag {
            row(&mut out, tag.as_str(), s);
        }
        let _ = writeln!(
            out,
            "{:<22}{:>8.2}{:>8.2}{:>8.2}",
            format!("macro ({} tags)", self.macro_tags.len()),
            self.macro_precision,
            self.macro_recall,
            self.macro_f1
        );
        row(&mut out, "micro", &self.micro);
        out
    }
}

/// Kuhn's augmenting path from gold `g`.
fn augment(g: usize, adj: &[Vec<usize>], seen: &mut [bool], pred_match: &mut [Option<usize>]) -> bool {
    for &p in &adj[g] {
        if seen[p] {
            continue;
        }
        seen[p] = true;
        if pred_match[p].is_none() || augment(pred_match[p].unwrap(), adj, seen, pred_match) {
            pred_match[p] = Some(g);
            return true;
        }
    }
    false
}

/// One-to-one matches between same-tag span lists. Identical spans pair
/// first; overlap mode then adds a maximum matching over the rest, visiting
/// golds by ascending start.
fn count_matches(gold: &[&Span], pred: &[&Span], mode: MatchMode) -> usize {
    let mut gold_used = vec![false; gold.len()];
    let mut pred_used = vec![false; pred.len()];
    let mut tp = 0;
    for (gi, g) in gold.iter().enumerate() {
        if let Some(pi) = (0..pred.len()).find(|&pi| !pred_used[pi] && pred[pi].start == g.start && pred[pi].end == g.end) {
            gold_used[gi] = true;
            pred_used[pi] = true;
            tp += 1;
        }
    }
    if mode == MatchMode::Strict {
        return tp;
    }
    let mut golds: Vec<usize> = (0..gold.len()).filter(|&i| !gold_used[i]).collect();
    golds.sort_by_key(|&i| (gold[i].start, gold[i].end));
    let mut preds: Vec<usize> = (0..pred.len()).filter(|&i| !pred_used[i]).collect();
    preds.sort_by_key(|&i| (pred[i].start, pred[i].end));
    let adj: Vec<Vec<usize>> = golds
        .iter()
        .map(|&gi| {
            (0..preds.len())
                .filter(|&k| gold[gi].overlaps(pred[preds[k]].start, pred[preds[k]].end))
                .collect()
        })
        .collect();
    let mut pred_match = vec![None; preds.len()];
    for g in 0..golds.len() {
        let mut seen = vec![false; preds.len()];
        if augment(g, &adj, &mut seen, &mut pred_match) {
            tp += 1;
        }
    }
    tp
}

/// Per-tag precision, recall and F1 (percent) of `pred` against `gold`.
/// Sentences are aligned by id; gold sentences without a prediction count as
/// predicting nothing.
pub fn span_f1(gold: &Corpus, pred: &Corpus, mode: MatchMode) -> Result<EvalReport, MetricsError> {
    let gold_by_id: HashMap<&str, &[Span]> = gold.sentences.iter().map(|s| (s.id.as_str(), s.spans.as_slice())).collect();
    let mut pred_by_id: HashMap<&str, &[Span]> = HashMap::new();
    for s in &pred.sentences {
        if !gold_by_id.contains_key(s.id.as_str()) {
            return Err(MetricsError::UnknownPredId(s.id.clone()));
        }
        pred_by_id.insert(s.id.as_str(), s.spans.as_slice());
    }
    let mut counts: BTreeMap<ErrorTag, (usize, usize, usize)> = ErrorTag::ALL.iter().map(|t| (*t, (0, 0, 0))).collect();
    for g in &gold.sentences {
        let gs = g.spans.as_slice();
        let ps = pred_by_id.get(g.id.as_str()).copied().unwrap_or(&[]);
        for tag in ErrorTag::ALL {
            let gt: Vec<&Span> = gs.iter().filter(|s| s.tag == tag).collect();
            let pt: Vec<&Span> = ps.iter().filter(|s| s.tag == tag).collect();
            if gt.is_empty() && pt.is_empty() {
                continue;
            }
            let tp = count_matches(&gt, &pt, mode);
            let c = counts.get_mut(&tag).unwrap();
            c.0 += tp;
            c.1 += pt.len() - tp;
            c.2 += gt.len() - tp;
        }
    }
    let per_tag: BTreeMap<ErrorTag, TagScore> = counts
        .iter()
        .map(|(t, (tp, fp, fn_))| (*t, TagScore::from_counts(*tp, *fp, *fn_)))
        .collect();
    let macro_tags: Vec<ErrorTag> = per_tag.iter().filter(|(_, s)| s.gold > 0).map(|(t, _)| *t).collect();
    let mean = |f: fn(&TagScore) -> f64| {
        if macro_tags.is_empty() {
            0.0
        } else {
            macro_tags.iter().map(|t| f(&per_tag[t])).sum::<f64>() / macro_tags.len() as f64
        }
    };
    let (tp, fp, fn_) = counts
        .values()
        .fold((0, 0, 0), |a, c| (a.0 + c.0, a.1 + c.1, a.2 + c.2));
    Ok(EvalReport {
        mode,
        macro_precision: mean(|s| s.precision),
        macro_recall: mean(|s| s.recall),
        macro_f1: mean(|s| s.f1),
        macro_tags,
        per_tag,
        micro: TagScore::from_counts(tp, fp, fn_),
    })
}
