//! Helpers for Unicode scalar-value offsets.
//!
//! Every offset stored in the corpus counts `char`s, not bytes.

/// Number of scalar values in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Byte index of the `char_idx`-th scalar value (or `s.len()` at the end).
pub fn byte_index(s: &str, char_idx: usize) -> Option<usize> {
    if char_idx == 0 {
        return Some(0);
    }
    let mut count = 0;
    for (b, _) in s.char_indices() {
        if count == char_idx {
            return Some(b);
        }
        count += 1;
    }
    (count == char_idx).then_some(s.len())
}

/// Substring `[start, end)` in char offsets; `None` when out of range.
pub fn char_slice(s: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let b0 = byte_index(s, start)?;
    let b1 = b0 + byte_index(&s[b0..], end - start)?;
    Some(&s[b0..b1])
}

/// Replaces the char range `[start, end)` of `s` with `replacement`.
pub fn replace_range(s: &str, start: usize, end: usize, replacement: &str) -> Option<String> {
    let b0 = byte_index(s, start)?;
    let b1 = b0 + byte_index(&s[b0..], end.checked_sub(start)?)?;
    let mut out = String::with_capacity(s.len() + replacement.len());
    out.push_str(&s[..b0]);
    out.push_str(replacement);
    out.push_str(&s[b1..]);
    Some(out)
}

/// Uppercases the first scalar value of `s`.
pub fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn starts_uppercase(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slices_by_scalar_values() {
        let s = "в кассу now";
        assert_eq!(char_len(s), 11);
        assert_eq!(char_slice(s, 2, 7), Some("кассу"));
        assert_eq!(char_slice(s, 8, 11), Some("now"));
        assert_eq!(char_slice(s, 8, 12), None);
        assert_eq!(char_slice(s, 11, 11), Some(""));
    }

    #[test]
    fn replaces_ranges() {
        assert_eq!(replace_range("abc def", 4, 7, "xy").as_deref(), Some("abc xy"));
        assert_eq!(replace_range("касса", 0, 1, "k").as_deref(), Some("kасса"));
        assert_eq!(replace_range("abc", 2, 1, "k"), None);
    }

    #[test]
    fn capitalizes() {
        assert_eq!(capitalize("kassa"), "Kassa");
        assert_eq!(capitalize(""), "");
        assert!(starts_uppercase("In"));
        assert!(!starts_uppercase("1999"));
    }
}
