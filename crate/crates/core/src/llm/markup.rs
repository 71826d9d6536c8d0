//! Inline error markup: `<err tag="TAG" corr="CORRECTION">surface</err>`.

use crate::corpus::{AnnotatedSentence, ErrorTag, Source, Span};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MarkupError {
    #[error("char {pos}: <err> opened inside another <err>")]
    Nested { pos: usize },
    #[error("char {pos}: </err> without a matching <err>")]
    UnexpectedClose { pos: usize },
    #[error("char {pos}: <err> is never closed")]
    Unclosed { pos: usize },
    #[error("char {pos}: unterminated tag")]
    UnterminatedTag { pos: usize },
    #[error("char {pos}: malformed attribute: {message}")]
    Attribute { pos: usize, message: String },
    #[error("char {pos}: <err> has no `tag` attribute")]
    MissingTag { pos: usize },
    #[error("char {pos}: empty <err> span")]
    EmptySpan { pos: usize },
    #[error("spans [{0}, {1}) and [{2}, {3}) overlap and cannot be rendered inline")]
    Overlap(usize, usize, usize, usize),
    #[error("span [{0}, {1}) is out of range")]
    OutOfRange(usize, usize),
}

/// Markup-free text with the spans found in it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Annotation {
    pub text: String,
    pub spans: Vec<Span>,
    /// Labels of `<err>` elements whose tag is not in the scheme; their
    /// content is kept as plain text.
    pub unknown_tags: Vec<String>,
}

impl Annotation {
    pub fn into_sentence(self, id: impl Into<String>, source: Source) -> AnnotatedSentence {
        AnnotatedSentence::new(id, self.text, source).with_spans(self.spans)
    }
}

const OPEN: &str = "<err";
const CLOSE: &str = "</err>";

fn starts_with_at(chars: &[char], i: usize, pat: &str) -> bool {
    pat.chars().enumerate().all(|(n, p)| chars.get(i + n) == Some(&p))
}

fn decode_entity(chars: &[char], i: usize) -> Option<(char, usize)> {
    let end = (i + 1..chars.len().min(i + 12)).find(|&k| chars[k] == ';')?;
    let name: String = chars[i + 1..end].iter().collect();
    let c = match name.as_str() {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        _ => {
            let code = if let Some(hex) = name.strip_prefix("#x").or_else(|| name.strip_prefix("#X")) {
                u32::from_str_radix(hex, 16).ok()?
            } else {
                name.strip_prefix('#')?.parse().ok()?
            };
            char::from_u32(code)?
        }
    };
    Some((c, end + 1 - i))
}

fn unescape(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '&' {
            if let Some((c, used)) = decode_entity(&chars, i) {
                out.push(c);
                i += used;
                continue;
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

/// Parses `name="value"` pairs up to the closing `>` of an opening tag.
/// Returns the attributes and the index just past `>`.
fn parse_attributes(chars: &[char], mut i: usize, tag_pos: usize) -> Result<(Vec<(String, String)>, usize), MarkupError> {
    let mut attrs = Vec::new();
    loop {
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        match chars.get(i) {
            None => return Err(MarkupError::UnterminatedTag { pos: tag_pos }),
            Some('>') => return Ok((attrs, i + 1)),
            Some('/') if chars.get(i + 1) == Some(&'>') => {
                return Err(MarkupError::EmptySpan { pos: tag_pos });
            }
            _ => {}
        }
        let name_start = i;
        while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
            i += 1;
        }
        if i == name_start {
            return Err(MarkupError::Attribute {
                pos: i,
                message: format!("unexpected `{}`", chars[i]),
            });
        }
        let name: String = chars[name_start..i].iter().collect();
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        if chars.get(i) != Some(&'=') {
            return Err(MarkupError::Attribute {
                pos: i,
                message: format!("`{name}` has no value"),
            });
        }
        i += 1;
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        let quote = match chars.get(i) {
            Some(q @ ('"' | '\'')) => *q,
            _ => {
                return Err(MarkupError::Attribute {
                    pos: i,
                    message: format!("value of `{name}` must be quoted"),
                })
            }
        };
        let value_start = i + 1;
        let value_end = (value_start..chars.len())
            .find(|&k| chars[k] == quote)
            .ok_or(MarkupError::UnterminatedTag { pos: tag_pos })?;
        let raw: String = chars[value_start..value_end].iter().collect();
        attrs.push((name, unescape(&raw)));
        i = value_end + 1;
    }
}

struct Open {
    pos: usize,
    start: usize,
    tag: String,
    corr: Option<String>,
}

/// Strips `<err>` markup, producing spans in offsets of the stripped text.
/// Other `<` characters are ordinary text; entities are decoded.
pub fn parse_annotated_output(model_text: &str) -> Result<Annotation, MarkupError> {
    let chars: Vec<char> = model_text.chars().collect();
    let mut out = Annotation::default();
    let mut len = 0usize;
    let mut open: Option<Open> = None;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '<' && starts_with_at(&chars, i, OPEN) && chars.get(i + OPEN.len()).is_some_and(|n| n.is_whitespace() || *n == '>' || *n == '/') {
            if open.is_some() {
                return Err(MarkupError::Nested { pos: i });
            }
            let (attrs, next) = parse_attributes(&chars, i + OPEN.len(), i)?;
            let tag = attrs
                .iter()
                .find(|(k, _)| k == "tag")
                .map(|(_, v)| v.trim().to_string())
                .ok_or(MarkupError::MissingTag { pos: i })?;
            let corr = attrs.iter().find(|(k, _)| k == "corr").map(|(_, v)| v.clone());
            open = Some(Open { pos: i, start: len, tag, corr });
            i = next;
            continue;
        }
        if c == '<' && starts_with_at(&chars, i, CLOSE) {
            let o = open.take().ok_or(MarkupError::UnexpectedClose { pos: i })?;
            if len == o.start {
                return Err(MarkupError::EmptySpan { pos: o.pos });
            }
            match o.tag.parse::<ErrorTag>() {
                Ok(tag) => out.spans.push(Span::new(o.start, len, tag, o.corr)),
                Err(_) => out.unknown_tags.push(o.tag),
            }
            i += CLOSE.len();
            continue;
        }
        if c == '&' {
            if let Some((decoded, used)) = decode_entity(&chars, i) {
                out.text.push(decoded);
                len += 1;
                i += used;
                continue;
            }
        }
        out.text.push(c);
        len += 1;
        i += 1;
    }
    if let Some(o) = open {
        return Err(MarkupError::Unclosed { pos: o.pos });
    }
    out.spans.sort_by_key(|a| (a.start, a.end));
    Ok(out)
}

fn escape_text(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
}

fn escape_attr(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("&quot;"),
            _ => escape_text(c.encode_utf8(&mut [0; 4]), out),
        }
    }
}

/// Inverse of [`parse_annotated_output`] for non-overlapping spans.
pub fn render_markup(text: &str, spans: &[Span]) -> Result<String, MarkupError> {
    let chars: Vec<char> = text.chars().collect();
    let mut sorted: Vec<&Span> = spans.iter().collect();
    sorted.sort_by_key(|s| (s.start, s.end));
    for w in sorted.windows(2) {
        if w[1].start < w[0].end {
            return Err(MarkupError::Overlap(w[0].start, w[0].end, w[1].start, w[1].end));
        }
    }
    let mut out = String::with_capacity(text.len() + 40 * spans.len());
    let mut pos = 0;
    for s in sorted {
        if s.end > chars.len() || s.start >= s.end {
            return Err(MarkupError::OutOfRange(s.start, s.end));
        }
        escape_text(&chars[pos..s.start].iter().collect::<String>(), &mut out);
        out.push_str("<err tag=\"");
        out.push_str(s.tag.as_str());
        out.push('"');
        if let Some(c) = &s.correction {
            out.push_str(" corr=\"");
            escape_attr(c, &mut out);
            out.push('"');
        }
        out.push('>');
        escape_text(&chars[s.start..s.end].iter().collect::<String>(), &mut out);
        out.push_str(CLOSE);
        pos = s.end;
    }
    escape_text(&chars[pos..].iter().collect::<String>(), &mut out);
    Ok(out)
}
