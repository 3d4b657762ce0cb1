//! Headline tokenization and token-level alignment.
//!
//! Tokens compare case-insensitively everywhere in this module; the original
//! casing is kept for display and for reconstructing the target side of a
//! script.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levenshtein::{self, OpKind};

/// Contractions split off the end of a word, Penn Treebank style.
const CLITICS: [&str; 7] = ["n't", "'s", "'re", "'ve", "'ll", "'d", "'m"];

/// A tokenized headline.
#[derive(Debug, Clone)]
pub struct TokenSequence {
    source_text: String,
    tokens: Vec<String>,
    folded: Vec<String>,
}

impl TokenSequence {
    /// Tokenizes `text`; see [`tokenize`].
    pub fn new(text: &str) -> Self {
        tokenize(text)
    }

    /// Builds a sequence from pre-split tokens. The source text becomes the
    /// tokens joined by single spaces.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let source_text = tokens.join(" ");
        Self::with_source(source_text, tokens)
    }

    fn with_source(source_text: String, tokens: Vec<String>) -> Self {
        let folded = tokens.iter().map(|t| fold(t)).collect();
        TokenSequence {
            source_text,
            tokens,
            folded,
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Case-folded tokens, index-aligned with [`tokens`](Self::tokens).
    pub fn folded(&self) -> &[String] {
        &self.folded
    }

    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Equality under case folding.
    pub fn eq_ignore_case(&self, other: &TokenSequence) -> bool {
        self.folded == other.folded
    }
}

/// Exact token equality (casing included); the source text is ignored.
impl PartialEq for TokenSequence {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
    }
}

impl Eq for TokenSequence {}

impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens.join(" "))
    }
}

pub(crate) fn fold(token: &str) -> String {
    token.to_lowercase()
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

fn normalize_apostrophe(c: char) -> char {
    match c {
        '\u{2019}' | '\u{2018}' => '\'',
        other => other,
    }
}

/// Splits `text` into word and punctuation tokens.
///
/// Words are whitespace-delimited. Leading and trailing punctuation is split
/// off (runs of one repeated mark such as `...` stay together), an
/// abbreviation such as `U.S.` keeps its final period, and the contractions
/// `n't 's 're 've 'll 'd 'm` become separate tokens. Word-internal marks
/// (hyphens, apostrophes, decimal points) stay inside the word.
pub fn tokenize(text: &str) -> TokenSequence {
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        split_word(word, &mut tokens);
    }
    TokenSequence::with_source(text.to_string(), tokens)
}

fn split_word(word: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = word.chars().collect();
    let mut start = 0;
    let mut end = chars.len();

    // Leading marks.
    while start < end && is_punct(chars[start]) {
        let run = run_len(&chars[start..end], chars[start]);
        out.push(chars[start..start + run].iter().collect());
        start += run;
    }

    // Trailing marks, collected right to left.
    let mut trailing: Vec<String> = Vec::new();
    while end > start && is_punct(chars[end - 1]) {
        let c = chars[end - 1];
        let mut run = 1;
        while end - run > start && chars[end - run - 1] == c {
            run += 1;
        }
        trailing.push(chars[end - run..end].iter().collect());
        end -= run;
    }
    if let Some(last) = trailing.last_mut() {
        // "U.S." keeps its final period when the word already contains one.
        if last.starts_with('.') && chars[start..end].contains(&'.') {
            last.remove(0);
            end += 1;
            if last.is_empty() {
                trailing.pop();
            }
        }
    }

    if start < end {
        let core = &chars[start..end];
        match clitic_split(core) {
            Some(at) => {
                out.push(core[..at].iter().collect());
                out.push(core[at..].iter().collect());
            }
            None => out.push(core.iter().collect()),
        }
    }
    out.extend(trailing.into_iter().rev());
}

fn run_len(chars: &[char], c: char) -> usize {
    chars.iter().take_while(|&&x| x == c).count()
}

fn clitic_split(core: &[char]) -> Option<usize> {
    let lowered: Vec<char> = core
        .iter()
        .map(|&c| normalize_apostrophe(c).to_ascii_lowercase())
        .collect();
    CLITICS.iter().find_map(|clitic| {
        let clitic: Vec<char> = clitic.chars().collect();
        let n = clitic.len();
        (lowered.len() > n && lowered.ends_with(&clitic)).then(|| lowered.len() - n)
    })
}

/// One step of a token-level edit script.
///
/// `source` is the token read from the first sequence (absent for inserts)
/// and `target` the token written to the second (absent for deletes).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditOp {
    pub kind: OpKind,
    pub position_a: usize,
    pub position_b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

/// An optimal alignment between two token sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
    pub distance: usize,
}

impl EditScript {
    /// The non-`Match` steps.
    pub fn edits(&self) -> impl Iterator<Item = &EditOp> {
        self.ops.iter().filter(|op| op.kind.is_edit())
    }

    pub fn count(&self, kind: OpKind) -> usize {
        self.ops.iter().filter(|op| op.kind == kind).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub distance: usize,
    pub similarity: f64,
    pub script: EditScript,
}

/// Unit-cost token edit distance, case-insensitive.
pub fn edit_distance(a: &TokenSequence, b: &TokenSequence) -> usize {
    levenshtein::distance_by(a.folded(), b.folded(), |x, y| x == y)
}

/// One optimal edit script from `a` to `b`, with ties resolved during
/// traceback in the order match, substitute, delete, insert.
pub fn edit_script(a: &TokenSequence, b: &TokenSequence) -> EditScript {
    let (distance, steps) = levenshtein::script_by(a.folded(), b.folded(), |x, y| x == y);
    let ops = steps
        .into_iter()
        .map(|step| {
            let source = match step.kind {
                OpKind::Insert => None,
                _ => Some(a.tokens()[step.position_a].clone()),
            };
            let target = match step.kind {
                OpKind::Delete => None,
                _ => Some(b.tokens()[step.position_b].clone()),
            };
            EditOp {
                kind: step.kind,
                position_a: step.position_a,
                position_b: step.position_b,
                source,
                target,
            }
        })
        .collect();
    EditScript { ops, distance }
}

/// `1 - d(a, b) / max(|a|, |b|)`; two empty sequences are fully similar.
pub fn similarity(a: &TokenSequence, b: &TokenSequence) -> f64 {
    similarity_from_distance(edit_distance(a, b), a.len(), b.len())
}

pub fn similarity_from_distance(distance: usize, len_a: usize, len_b: usize) -> f64 {
    let longest = len_a.max(len_b);
    if longest == 0 {
        return 1.0;
    }
    1.0 - distance as f64 / longest as f64
}

/// Distance, similarity and canonical script in one pass.
pub fn align(a: &TokenSequence, b: &TokenSequence) -> AlignmentResult {
    let script = edit_script(a, b);
    AlignmentResult {
        distance: script.distance,
        similarity: similarity_from_distance(script.distance, a.len(), b.len()),
        script,
    }
}

/// Replays `script` against `a`, producing the target sequence.
pub fn apply_script(a: &TokenSequence, script: &EditScript) -> Result<TokenSequence> {
    let mut out: Vec<String> = Vec::with_capacity(a.len());
    let mut cursor = 0usize;

    for (n, op) in script.ops.iter().enumerate() {
        let mismatch = |what: &str| Error::Alignment(format!("op {n} ({}): {what}", op.kind.as_str()));
        if op.position_a != cursor || op.position_b != out.len() {
            return Err(mismatch(&format!(
                "expected positions ({cursor}, {}), found ({}, {})",
                out.len(),
                op.position_a,
                op.position_b
            )));
        }
        let consumes = op.kind != OpKind::Insert;
        if consumes {
            let Some(current) = a.tokens().get(cursor) else {
                return Err(mismatch("runs past the end of the sequence"));
            };
            if let Some(source) = &op.source {
                if fold(source) != a.folded()[cursor] {
                    return Err(mismatch(&format!("expected `{source}`, found `{current}`")));
                }
            }
        }
        match op.kind {
            OpKind::Match => {
                let token = op.target.clone().unwrap_or_else(|| a.tokens()[cursor].clone());
                if fold(&token) != a.folded()[cursor] {
                    return Err(mismatch("match between unequal tokens"));
                }
                out.push(token);
            }
            OpKind::Substitute | OpKind::Insert => {
                let token = op.target.clone().ok_or_else(|| mismatch("missing target token"))?;
                out.push(token);
            }
            OpKind::Delete => {}
        }
        if consumes {
            cursor += 1;
        }
    }

    if cursor != a.len() {
        return Err(Error::Alignment(format!(
            "script consumed {cursor} of {} tokens",
            a.len()
        )));
    }
    let edits = script.ops.iter().filter(|op| op.kind.is_edit()).count();
    if edits != script.distance {
        return Err(Error::Alignment(format!(
            "script declares distance {} but carries {edits} edits",
            script.distance
        )));
    }
    Ok(TokenSequence::from_tokens(out))
}
