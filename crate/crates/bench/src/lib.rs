//! Seeded synthetic inputs shared by the benchmarks.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unfun_core::TokenSequence;

const WORDS: [&str; 24] = [
    "area", "man", "wins", "lottery", "local", "dog", "elected", "mayor", "nation", "mourns", "loss", "of", "senate",
    "passes", "budget", "with", "new", "report", "finds", "the", "in", "city", "council", "votes",
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn headline(rng: &mut ChaCha8Rng, len: usize) -> TokenSequence {
    TokenSequence::from_tokens((0..len).map(|_| WORDS[rng.random_range(0..WORDS.len())]))
}

/// `original` with `edits` random token substitutions, insertions or
/// deletions applied.
pub fn edited(rng: &mut ChaCha8Rng, original: &TokenSequence, edits: usize) -> TokenSequence {
    let mut tokens: Vec<String> = original.tokens().to_vec();
    for _ in 0..edits {
        let word = WORDS[rng.random_range(0..WORDS.len())].to_string();
        match rng.random_range(0..3) {
            0 if !tokens.is_empty() => {
                let i = rng.random_range(0..tokens.len());
                tokens[i] = word;
            }
            1 if !tokens.is_empty() => {
                tokens.remove(rng.random_range(0..tokens.len()));
            }
            _ => tokens.insert(rng.random_range(0..=tokens.len()), word),
        }
    }
    TokenSequence::from_tokens(tokens)
}

/// Ratings in `[0, 1]` on the 0.01 grid the game's sliders produce.
pub fn ratings(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0..=100) as f64 / 100.0).collect()
}
