//! Test patterns and pattern sets.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("line {line}: invalid pattern character '{ch}'")]
    BadCharacter { line: usize, ch: char },
    #[error("line {line}: pattern width {got} does not match {expected}")]
    WidthMismatch { line: usize, expected: usize, got: usize },
}

/// A complete binary assignment to every primary and pseudo primary input,
/// in declaration order (primary inputs first, then scan points).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TestPattern {
    bits: Vec<bool>,
}

impl TestPattern {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Pattern for enumeration index `idx` with the first input as the most
    /// significant bit, so ascending indices enumerate in lexicographic order.
    pub fn from_index(idx: u64, width: usize) -> Self {
        let bits = (0..width).map(|i| (idx >> (width - 1 - i)) & 1 != 0).collect();
        Self { bits }
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl fmt::Display for TestPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Ordered collection of equal-width patterns with a source label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<TestPattern>,
    source: String,
}

impl PatternSet {
    pub fn new(patterns: Vec<TestPattern>, source: impl Into<String>) -> Self {
        Self { patterns, source: source.into() }
    }

    /// All 2^width patterns in lexicographic order.
    pub fn exhaustive(width: usize) -> Self {
        assert!(width <= 24, "exhaustive pattern sets are capped at 24 inputs");
        let patterns = (0..1u64 << width)
            .map(|i| TestPattern::from_index(i, width))
            .collect();
        Self { patterns, source: "exhaustive".into() }
    }

    pub fn patterns(&self) -> &[TestPattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn width(&self) -> Option<usize> {
        self.patterns.first().map(|p| p.width())
    }
}

/// Parse a pattern file: one pattern per line, characters 0/1, `#` comments.
/// Position i is the i-th declared primary input, then the pseudo inputs in
/// scan order. All lines must have the same width.
pub fn parse_pattern_file(text: &str, source: &str) -> Result<PatternSet, PatternError> {
    let mut patterns = Vec::new();
    let mut width: Option<usize> = None;
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let code = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let code = code.trim();
        if code.is_empty() {
            continue;
        }
        let mut bits = Vec::with_capacity(code.len());
        for ch in code.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(PatternError::BadCharacter { line, ch: other }),
            }
        }
        if let Some(w) = width {
            if bits.len() != w {
                return Err(PatternError::WidthMismatch { line, expected: w, got: bits.len() });
            }
        } else {
            width = Some(bits.len());
        }
        patterns.push(TestPattern::new(bits));
    }
    Ok(PatternSet::new(patterns, source))
}
