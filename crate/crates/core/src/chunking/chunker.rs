//! Rule-based grouping of tagged tokens into phrases.

use super::tagger::{PosTag, PosTaggedToken};
use super::{Chunk, ChunkLabel, ChunkSequence};

/// Groups tagged tokens into chunks.
///
/// Noun clusters (optionally introduced by determiners, numbers and
/// adjectives) become `NP`, verb clusters with their modals, particles and
/// infinitival `to` become `VP`, prepositions `PP`, adjective clusters
/// without a noun head `ADJP`, adverb runs `ADVP`; every other token is an
/// `O` chunk of its own. The chunks always partition the input.
pub fn chunk(tagged: &[PosTaggedToken]) -> ChunkSequence {
    let tags: Vec<PosTag> = tagged.iter().map(|t| t.tag).collect();
    let mut chunks = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        let (label, end) = next_chunk(&tags, i);
        debug_assert!(end > i);
        chunks.push(Chunk::new(
            label,
            tagged[i..end].iter().map(|t| t.token.clone()).collect(),
        ));
        i = end;
    }
    ChunkSequence::new(chunks)
}

fn is_determiner(tag: PosTag) -> bool {
    matches!(tag, PosTag::Dt | PosTag::Pdt | PosTag::PrpPoss | PosTag::WpPoss)
}

fn is_nominal_modifier(tag: PosTag) -> bool {
    tag.is_adjective() || tag.is_noun() || matches!(tag, PosTag::Cd | PosTag::Pos)
}

fn is_head(tag: PosTag) -> bool {
    tag.is_noun() || tag == PosTag::Cd
}

/// Label and exclusive end of the chunk starting at `start`.
fn next_chunk(tags: &[PosTag], start: usize) -> (ChunkLabel, usize) {
    let tag = tags[start];

    if matches!(tag, PosTag::Prp | PosTag::Ex | PosTag::Wp) {
        return (ChunkLabel::Np, start + 1);
    }

    if is_determiner(tag) || is_nominal_modifier(tag) {
        return nominal(tags, start);
    }

    if tag.is_adverb() {
        let mut j = start;
        while j < tags.len() && tags[j].is_adverb() {
            j += 1;
        }
        if j < tags.len() && (tags[j].is_adjective() || tags[j] == PosTag::Cd) {
            // "very angry (man)": the adverb belongs to what follows.
            let (label, end) = nominal(tags, j);
            if matches!(label, ChunkLabel::Np | ChunkLabel::Adjp) {
                return (label, end);
            }
        }
        if j < tags.len() && tags[j].is_verb() {
            return verbal(tags, start);
        }
        return (ChunkLabel::Advp, j);
    }

    if tag.is_verb() || (tag == PosTag::To && tags.get(start + 1).is_some_and(|t| *t == PosTag::Vb)) {
        return verbal(tags, start);
    }

    if matches!(tag, PosTag::In | PosTag::To) {
        let mut j = start + 1;
        while j < tags.len() && tags[j] == PosTag::In {
            j += 1;
        }
        return (ChunkLabel::Pp, j);
    }

    if tag == PosTag::Rp {
        return (ChunkLabel::Advp, start + 1);
    }

    (ChunkLabel::O, start + 1)
}

/// Determiners, then modifiers; the chunk ends at the last noun or number.
fn nominal(tags: &[PosTag], start: usize) -> (ChunkLabel, usize) {
    let mut j = start;
    while j < tags.len() && is_determiner(tags[j]) {
        j += 1;
    }
    let after_determiners = j;

    let mut last_head = None;
    let mut last_adjective = None;
    while j < tags.len() {
        let tag = tags[j];
        let participle_modifier = matches!(tag, PosTag::Vbg | PosTag::Vbn)
            && j > start
            && (is_determiner(tags[j - 1]) || tags[j - 1].is_adjective())
            && tags.get(j + 1).is_some_and(|t| t.is_noun());
        if tag.is_adverb() && tags.get(j + 1).is_some_and(|t| t.is_adjective()) && j >= after_determiners {
            j += 1;
            continue;
        }
        if !(is_nominal_modifier(tag) || participle_modifier) {
            break;
        }
        if tag == PosTag::Pos && !tags.get(j + 1).is_some_and(|t| is_nominal_modifier(*t)) {
            // Trailing possessive closes the phrase.
            last_head = Some(j);
            break;
        }
        if is_head(tag) {
            last_head = Some(j);
        } else if tag.is_adjective() {
            last_adjective = Some(j);
        }
        j += 1;
    }

    match (last_head, last_adjective) {
        (Some(head), _) => (ChunkLabel::Np, head + 1),
        (None, Some(adj)) if start == after_determiners => (ChunkLabel::Adjp, adj + 1),
        // "the best": a determiner with an adjective head is nominal.
        (None, Some(adj)) => (ChunkLabel::Np, adj + 1),
        (None, None) if after_determiners > start => (ChunkLabel::Np, after_determiners),
        (None, None) => (ChunkLabel::O, start + 1),
    }
}

/// Modals, auxiliaries, main verbs, infinitival `to`, verb-internal adverbs
/// and particles.
fn verbal(tags: &[PosTag], start: usize) -> (ChunkLabel, usize) {
    let mut j = start;
    let mut end = start;
    while j < tags.len() {
        let tag = tags[j];
        let continues_verb = |k: usize| {
            let mut k = k;
            while k < tags.len() && tags[k].is_adverb() {
                k += 1;
            }
            k < tags.len() && (tags[k].is_verb() || tags[k] == PosTag::To && tags.get(k + 1) == Some(&PosTag::Vb))
        };
        if tag.is_verb() {
            j += 1;
            end = j;
        } else if tag == PosTag::To && tags.get(j + 1) == Some(&PosTag::Vb) {
            j += 1;
        } else if tag.is_adverb() && continues_verb(j) {
            j += 1;
        } else if tag == PosTag::Rp && end == j {
            j += 1;
            end = j;
        } else {
            break;
        }
    }
    (ChunkLabel::Vp, end.max(start + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::tokenize;
    use crate::chunking::tagger::pos_tag;

    fn bracketed(text: &str) -> String {
        chunk(&pos_tag(&tokenize(text))).to_string()
    }

    fn tagged(pairs: &[(&str, PosTag)]) -> Vec<PosTaggedToken> {
        pairs.iter().map(|(w, t)| PosTaggedToken::new(*w, *t)).collect()
    }

    #[test]
    fn running_example() {
        assert_eq!(
            bracketed("Bob Dylan diagnosed with bipolar disorder"),
            "[NP Bob Dylan] [VP diagnosed] [PP with] [NP bipolar disorder]"
        );
        assert_eq!(
            bracketed("God diagnosed with bipolar disorder"),
            "[NP God] [VP diagnosed] [PP with] [NP bipolar disorder]"
        );
    }

    #[test]
    fn empty_input() {
        assert!(chunk(&[]).is_empty());
    }

    #[test]
    fn verb_clusters_and_infinitives() {
        let t = tagged(&[
            ("Congress", PosTag::Nnp),
            ("will", PosTag::Md),
            ("not", PosTag::Rb),
            ("try", PosTag::Vb),
            ("to", PosTag::To),
            ("stop", PosTag::Vb),
            ("it", PosTag::Prp),
        ]);
        assert_eq!(chunk(&t).to_string(), "[NP Congress] [VP will not try to stop] [NP it]");
    }

    #[test]
    fn adjective_without_noun_is_adjp() {
        let t = tagged(&[("Nation", PosTag::Nn), ("is", PosTag::Vbz), ("very", PosTag::Rb), ("angry", PosTag::Jj)]);
        assert_eq!(chunk(&t).to_string(), "[NP Nation] [VP is] [ADJP very angry]");
    }

    #[test]
    fn determiners_and_possessives() {
        let t = tagged(&[
            ("the", PosTag::Dt),
            ("mayor", PosTag::Nn),
            ("'s", PosTag::Pos),
            ("new", PosTag::Jj),
            ("dog", PosTag::Nn),
            ("barks", PosTag::Vbz),
            (".", PosTag::Punct),
        ]);
        assert_eq!(chunk(&t).to_string(), "[NP the mayor 's new dog] [VP barks] [O .]");
    }

    #[test]
    fn particles_join_the_verb() {
        let t = tagged(&[("Man", PosTag::Nn), ("gives", PosTag::Vbz), ("up", PosTag::Rp)]);
        assert_eq!(chunk(&t).to_string(), "[NP Man] [VP gives up]");
    }

    #[test]
    fn prepositions_and_adverbs() {
        let t = tagged(&[
            ("out", PosTag::In),
            ("of", PosTag::In),
            ("town", PosTag::Nn),
            ("again", PosTag::Rb),
            ("and", PosTag::Cc),
        ]);
        assert_eq!(chunk(&t).to_string(), "[PP out of] [NP town] [ADVP again] [O and]");
    }

    #[test]
    fn title_case_headline() {
        assert_eq!(
            bracketed("Area Man Loves His Dog More Than Wife"),
            "[NP Area Man] [VP Loves] [NP His Dog] [ADVP More] [PP Than] [NP Wife]"
        );
    }
}
