//! Lexicon + suffix part-of-speech tagger tuned for headline text.
//!
//! The tagger is deliberately small: a closed-class lexicon, a short list of
//! open-class words that headlines lean on, suffix rules, and a handful of
//! contextual repairs. Corpora with gold chunk annotations bypass it.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::alignment::TokenSequence;
use crate::error::Error;

macro_rules! pos_tags {
    ($($variant:ident => $name:literal),+ $(,)?) => {
        /// Penn Treebank part-of-speech tags; all punctuation collapses into `Punct`.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum PosTag { $($variant),+ }

        impl PosTag {
            pub const ALL: &'static [PosTag] = &[$(PosTag::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $(PosTag::$variant => $name),+ }
            }
        }

        impl FromStr for PosTag {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok(PosTag::$variant),)+
                    other => Err(Error::invalid("part-of-speech tag", other)),
                }
            }
        }
    };
}

pos_tags! {
    Cc => "CC", Cd => "CD", Dt => "DT", Ex => "EX", Fw => "FW", In => "IN",
    Jj => "JJ", Jjr => "JJR", Jjs => "JJS", Md => "MD",
    Nn => "NN", Nns => "NNS", Nnp => "NNP", Nnps => "NNPS",
    Pdt => "PDT", Pos => "POS", Prp => "PRP", PrpPoss => "PRP$",
    Rb => "RB", Rbr => "RBR", Rbs => "RBS", Rp => "RP", Sym => "SYM", To => "TO", Uh => "UH",
    Vb => "VB", Vbd => "VBD", Vbg => "VBG", Vbn => "VBN", Vbp => "VBP", Vbz => "VBZ",
    Wdt => "WDT", Wp => "WP", WpPoss => "WP$", Wrb => "WRB", Punct => "PUNCT",
}

impl PosTag {
    pub fn is_noun(self) -> bool {
        matches!(self, PosTag::Nn | PosTag::Nns | PosTag::Nnp | PosTag::Nnps | PosTag::Fw)
    }

    pub fn is_verb(self) -> bool {
        matches!(
            self,
            PosTag::Vb | PosTag::Vbd | PosTag::Vbg | PosTag::Vbn | PosTag::Vbp | PosTag::Vbz | PosTag::Md
        )
    }

    fn is_finite_verb(self) -> bool {
        matches!(self, PosTag::Vbd | PosTag::Vbp | PosTag::Vbz | PosTag::Md)
    }

    pub fn is_adjective(self) -> bool {
        matches!(self, PosTag::Jj | PosTag::Jjr | PosTag::Jjs)
    }

    pub fn is_adverb(self) -> bool {
        matches!(self, PosTag::Rb | PosTag::Rbr | PosTag::Rbs | PosTag::Wrb)
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for PosTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for PosTag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosTaggedToken {
    pub token: String,
    pub tag: PosTag,
}

impl PosTaggedToken {
    pub fn new(token: impl Into<String>, tag: PosTag) -> Self {
        PosTaggedToken {
            token: token.into(),
            tag,
        }
    }
}

/// Anything that can assign one tag per token.
pub trait Tagger {
    fn tag(&self, tokens: &TokenSequence) -> Vec<PosTaggedToken>;
}

/// The built-in heuristic tagger.
#[derive(Debug, Default, Clone, Copy)]
pub struct HeuristicTagger;

impl Tagger for HeuristicTagger {
    fn tag(&self, tokens: &TokenSequence) -> Vec<PosTaggedToken> {
        pos_tag(tokens)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Evidence {
    Lexicon,
    Suffix,
    Guess,
}

const LEXICON: &[(PosTag, &str)] = &[
    (PosTag::Dt, "the a an this that these those every each some any no another either neither"),
    (PosTag::Pdt, "all both half"),
    (PosTag::PrpPoss, "my your his her its our their"),
    (
        PosTag::Prp,
        "i you he she it we they me him us them myself yourself himself herself itself ourselves themselves",
    ),
    (
        PosTag::In,
        "about above across after against along amid among amongst around as at before behind below beneath \
         beside besides between beyond by despite during except for from in inside into near of off on onto \
         out outside over per since than through throughout toward towards under underneath until upon via \
         with within without because while although though whether unless if amid",
    ),
    (PosTag::To, "to"),
    (PosTag::Cc, "and or but nor plus &"),
    (PosTag::Md, "can could will would shall should may might must 'll wo ca 'd"),
    (PosTag::Vbz, "is has does 's"),
    (PosTag::Vbp, "are am have do 're 've 'm"),
    (PosTag::Vbd, "was were had did"),
    (PosTag::Vb, "be"),
    (PosTag::Vbn, "been done"),
    (PosTag::Vbg, "being having doing"),
    (PosTag::Wdt, "which whatever whichever"),
    (PosTag::Wp, "who whom what whoever"),
    (PosTag::WpPoss, "whose"),
    (PosTag::Wrb, "when where why how"),
    (PosTag::Ex, "there"),
    (
        PosTag::Rb,
        "not n't never very too also just still now again even only already finally really here almost soon \
         ever once always nearly yet so back away anymore instead together apparently reportedly actually \
         somehow suddenly quietly officially",
    ),
    (PosTag::Rbr, "more less"),
    (PosTag::Rbs, "most least"),
    (
        PosTag::Cd,
        "one two three four five six seven eight nine ten eleven twelve thirteen fifteen twenty thirty forty \
         fifty hundred thousand million billion trillion dozen",
    ),
    (PosTag::Uh, "oh yes wow hey please"),
    (
        PosTag::Jj,
        "new old good bad great big small little large local national bipolar entire first last next other real \
         same whole own free young long high low top hot cold full major best-selling public late early \
         former certain several many few much annual single sure able nearby",
    ),
    (PosTag::Jjr, "better worse bigger smaller older younger newer"),
    (PosTag::Jjs, "best worst biggest largest oldest newest"),
    (PosTag::Nnp, "god jesus obama trump congress america"),
    (
        PosTag::Vbd,
        "said found made told took gave became came went got left thought brought began sent built bought \
         caught won lost held kept met paid ran sold spent stood wrote fell felt led knew grew threw drew \
         chose ate broke drove forgot hid stole flew swore",
    ),
    (
        PosTag::Vbn,
        "written given taken shown seen known eaten chosen driven forgotten hidden stolen broken spoken \
         begun drawn grown thrown flown sworn",
    ),
    (
        PosTag::Vbz,
        "says announces reports claims unveils wins loses finds makes takes gets asks calls tells wants plans \
         vows urges warns admits denies launches releases reveals introduces receives returns thinks knows \
         hopes fears gives demands refuses tries",
    ),
    (
        PosTag::Vbp,
        "say announce claim unveil find make take get ask call tell want plan vow urge warn admit deny \
         reveal think know hope fear give demand refuse try",
    ),
    (
        PosTag::Nn,
        "area man woman nation report study family supply rally ally reply belly jelly bully news series \
         government president child world year week day time life",
    ),
    (PosTag::Nns, "people children men women"),
];

fn lexicon() -> &'static HashMap<&'static str, PosTag> {
    static LEX: OnceLock<HashMap<&'static str, PosTag>> = OnceLock::new();
    LEX.get_or_init(|| {
        let mut map = HashMap::new();
        for (tag, words) in LEXICON {
            for word in words.split_whitespace() {
                // First listing wins, so closed-class entries take precedence.
                map.entry(word).or_insert(*tag);
            }
        }
        map
    })
}

fn is_numeric(token: &str) -> bool {
    token.chars().any(|c| c.is_ascii_digit())
        && token
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '-' | '/' | ':'))
}

fn starts_upper(token: &str) -> bool {
    token.chars().next().is_some_and(char::is_uppercase)
}

fn is_word(token: &str) -> bool {
    token.chars().any(char::is_alphabetic)
}

/// Headlines written in title case carry no proper-noun signal in their
/// capitalization.
fn is_title_case(tokens: &[String]) -> bool {
    let words: Vec<&String> = tokens.iter().filter(|t| is_word(t)).collect();
    if words.len() < 3 {
        return false;
    }
    let upper = words.iter().filter(|t| starts_upper(t)).count();
    upper * 4 >= words.len() * 3
}

fn suffix_tag(lower: &str) -> Option<PosTag> {
    let n = lower.chars().count();
    if n > 4 && lower.ends_with("ing") {
        return Some(PosTag::Vbg);
    }
    if n > 3 && lower.ends_with("ed") {
        return Some(PosTag::Vbn);
    }
    if n > 3 && lower.ends_with("ly") {
        return Some(PosTag::Rb);
    }
    const ADJ: [&str; 8] = ["ous", "ful", "ive", "able", "ible", "ical", "less", "ish"];
    if n > 5 && ADJ.iter().any(|s| lower.ends_with(s)) {
        return Some(PosTag::Jj);
    }
    const NOUN: [&str; 7] = ["tion", "ment", "ness", "ity", "ism", "ist", "ship"];
    if n > 4 && NOUN.iter().any(|s| lower.ends_with(s)) {
        return Some(PosTag::Nn);
    }
    if n > 3 && lower.ends_with('s') && !lower.ends_with("ss") && !lower.ends_with("us") && !lower.ends_with("is") {
        return Some(PosTag::Nns);
    }
    None
}

/// Assigns one tag per token. Deterministic.
pub fn pos_tag(tokens: &TokenSequence) -> Vec<PosTaggedToken> {
    let toks = tokens.tokens();
    let folded = tokens.folded();
    let title_case = is_title_case(toks);
    let lex = lexicon();

    let mut tags: Vec<(PosTag, Evidence)> = Vec::with_capacity(toks.len());
    for (i, (token, lower)) in toks.iter().zip(folded).enumerate() {
        let lower = lower.replace('\u{2019}', "'");
        let tag = if !is_word(token) && !is_numeric(token) {
            let tag = match token.as_str() {
                "&" => PosTag::Cc,
                "$" | "%" | "#" | "+" | "=" => PosTag::Sym,
                _ => PosTag::Punct,
            };
            (tag, Evidence::Lexicon)
        } else if is_numeric(token) {
            (PosTag::Cd, Evidence::Lexicon)
        } else if let Some(&tag) = lex.get(lower.as_str()) {
            (tag, Evidence::Lexicon)
        } else if !title_case && starts_upper(token) && (i > 0 || toks.get(1).is_some_and(|t| starts_upper(t))) {
            (PosTag::Nnp, Evidence::Lexicon)
        } else if let Some(tag) = suffix_tag(&lower) {
            (tag, Evidence::Suffix)
        } else {
            (PosTag::Nn, Evidence::Guess)
        };
        tags.push(tag);
    }

    repair_in_context(&mut tags, folded);

    toks.iter()
        .zip(tags)
        .map(|(token, (tag, _))| PosTaggedToken::new(token.clone(), tag))
        .collect()
}

fn repair_in_context(tags: &mut [(PosTag, Evidence)], folded: &[String]) {
    let n = tags.len();
    let mut seen_finite = false;
    for i in 0..n {
        let prev = i.checked_sub(1).map(|p| tags[p].0);
        let next = tags.get(i + 1).map(|t| t.0);
        let (tag, evidence) = tags[i];
        let after_subject = prev.is_some_and(|p| p.is_noun() || p == PosTag::Prp);

        let repaired = match (tag, evidence) {
            // "Area Man Loves Dog": a plural-looking word right after the
            // subject, before any verb, is the verb.
            (PosTag::Nns, Evidence::Suffix) if after_subject && !seen_finite && next != Some(PosTag::Punct) && i + 1 < n => {
                PosTag::Vbz
            }
            // "Man killed wife" vs "Man killed in crash".
            (PosTag::Vbn, Evidence::Suffix)
                if after_subject
                    && !seen_finite
                    && next.is_some_and(|t| matches!(t, PosTag::Dt | PosTag::PrpPoss | PosTag::Prp | PosTag::Cd)) =>
            {
                PosTag::Vbd
            }
            (PosTag::Nn | PosTag::Nns, Evidence::Guess | Evidence::Suffix)
                if prev.is_some_and(|p| matches!(p, PosTag::Md | PosTag::To)) =>
            {
                PosTag::Vb
            }
            (PosTag::Vbz, Evidence::Lexicon) if folded[i] == "'s" || folded[i] == "\u{2019}s" => {
                if prev.is_some_and(|p| matches!(p, PosTag::Prp | PosTag::Wp | PosTag::Ex | PosTag::Wdt)) {
                    PosTag::Vbz
                } else {
                    PosTag::Pos
                }
            }
            (PosTag::In, Evidence::Lexicon)
                if matches!(folded[i].as_str(), "out" | "off" | "over" | "on")
                    && prev.is_some_and(PosTag::is_verb)
                    && next.is_none_or(|t| matches!(t, PosTag::In | PosTag::To | PosTag::Punct | PosTag::Cc)) =>
            {
                PosTag::Rp
            }
            (PosTag::Ex, Evidence::Lexicon) if !next.is_some_and(PosTag::is_verb) => PosTag::Rb,
            (PosTag::Dt, Evidence::Lexicon)
                if folded[i] == "that" && next.is_none_or(|t| t.is_verb() || matches!(t, PosTag::Prp | PosTag::Dt)) =>
            {
                PosTag::Wdt
            }
            _ => tag,
        };
        tags[i].0 = repaired;
        if repaired.is_finite_verb() {
            seen_finite = true;
        }
    }
}
