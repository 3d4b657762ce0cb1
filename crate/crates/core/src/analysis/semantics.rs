//! Script-opposition annotations and the false-analogy template.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AbstractClass {
    PossibleImpossible,
    NormalAbnormal,
    ActualNonactual,
}

impl AbstractClass {
    pub const ALL: [AbstractClass; 3] = [
        AbstractClass::PossibleImpossible,
        AbstractClass::NormalAbnormal,
        AbstractClass::ActualNonactual,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AbstractClass::PossibleImpossible => "POSSIBLE_IMPOSSIBLE",
            AbstractClass::NormalAbnormal => "NORMAL_ABNORMAL",
            AbstractClass::ActualNonactual => "ACTUAL_NONACTUAL",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExplicitSide {
    Good,
    Bad,
}

pub const FALSE_ANALOGY: &str = "FALSE_ANALOGY";

fn default_mechanism() -> String {
    FALSE_ANALOGY.to_string()
}

/// Manual semantic labels for one aligned pair; one line of the
/// annotation sidecar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairAnnotation {
    pub pair_id: String,
    pub oppositions: BTreeSet<String>,
    pub abstract_class: AbstractClass,
    #[serde(default = "default_mechanism")]
    pub mechanism: String,
    pub explicit_side: ExplicitSide,
}

/// Subtype labels are written `parent: subtype`.
pub const SUBTYPE_SEPARATOR: &str = ": ";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opposition {
    pub name: String,
    #[serde(default)]
    pub subtypes: Vec<String>,
}

/// The opposition labels annotators may use. Editable data, not code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OppositionTaxonomy {
    pub oppositions: Vec<Opposition>,
}

pub const HIGH_LOW_STATURE: &str = "high/low stature";
pub const NON_OBSCENE_OBSCENE: &str = "non-obscene/obscene";

impl Default for OppositionTaxonomy {
    fn default() -> Self {
        let plain = |name: &str| Opposition {
            name: name.into(),
            subtypes: vec![],
        };
        OppositionTaxonomy {
            oppositions: vec![
                Opposition {
                    name: HIGH_LOW_STATURE.into(),
                    subtypes: vec!["sublime/mundane".into()],
                },
                plain("life/death"),
                plain(NON_OBSCENE_OBSCENE),
                plain("religion/no religion"),
                plain("human/animal"),
                plain("other"),
            ],
        }
    }
}

impl OppositionTaxonomy {
    /// Splits a label into its top-level opposition and optional subtype,
    /// rejecting anything the taxonomy does not list.
    pub fn resolve<'a>(&self, label: &'a str) -> Result<(&'a str, Option<&'a str>)> {
        let (top, sub) = match label.split_once(SUBTYPE_SEPARATOR) {
            Some((top, sub)) => (top.trim(), Some(sub.trim())),
            None => (label.trim(), None),
        };
        let entry = self
            .oppositions
            .iter()
            .find(|o| o.name == top)
            .ok_or_else(|| Error::invalid("opposition", label))?;
        if let Some(sub) = sub {
            if !entry.subtypes.iter().any(|s| s == sub) {
                return Err(Error::invalid("opposition subtype", label));
            }
        }
        Ok((top, sub))
    }

    pub fn validate(&self, annotation: &PairAnnotation) -> Result<()> {
        if annotation.oppositions.is_empty() {
            return Err(Error::invalid(
                "annotation",
                format!("pair `{}` carries no opposition", annotation.pair_id),
            ));
        }
        for label in &annotation.oppositions {
            self.resolve(label)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OppositionStats {
    pub annotated_pairs: usize,
    /// Share of pairs carrying each label. Top-level entries also count
    /// pairs labeled only with one of their subtypes.
    pub oppositions: BTreeMap<String, f64>,
    pub abstract_classes: BTreeMap<AbstractClass, f64>,
    pub mechanisms: BTreeMap<String, f64>,
}

pub fn opposition_stats(annotations: &[PairAnnotation], taxonomy: &OppositionTaxonomy) -> Result<OppositionStats> {
    if annotations.is_empty() {
        return Err(Error::domain("opposition statistics over zero annotations"));
    }
    let n = annotations.len() as f64;
    let mut labels: BTreeMap<String, usize> = BTreeMap::new();
    let mut classes: BTreeMap<AbstractClass, usize> = AbstractClass::ALL.iter().map(|&c| (c, 0)).collect();
    let mut mechanisms: BTreeMap<String, usize> = BTreeMap::new();
    for a in annotations {
        taxonomy.validate(a)?;
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for label in &a.oppositions {
            let (top, sub) = taxonomy.resolve(label)?;
            seen.insert(top.to_string());
            if let Some(sub) = sub {
                seen.insert(format!("{top}{SUBTYPE_SEPARATOR}{sub}"));
            }
        }
        for label in seen {
            *labels.entry(label).or_default() += 1;
        }
        *classes.entry(a.abstract_class).or_default() += 1;
        *mechanisms.entry(a.mechanism.clone()).or_default() += 1;
    }
    let frac = |c: usize| c as f64 / n;
    Ok(OppositionStats {
        annotated_pairs: annotations.len(),
        oppositions: labels.into_iter().map(|(k, c)| (k, frac(c))).collect(),
        abstract_classes: classes.into_iter().map(|(k, c)| (k, frac(c))).collect(),
        mechanisms: mechanisms.into_iter().map(|(k, c)| (k, frac(c))).collect(),
    })
}

/// Entities `x` (satirical side) and `x_prime` (serious side) sharing the
/// property `property_p`, and a headline template `H` with one entity slot
/// `{E}`. Wording that must change along with the entity is written as a
/// paired slot `{serious wording|satirical wording}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FalseAnalogyFrame {
    pub x: String,
    pub x_prime: String,
    pub property_p: String,
    pub headline_template_h: String,
}

enum Piece<'a> {
    Text(&'a str),
    Entity,
    Paired { serious: &'a str, satirical: &'a str },
}

fn parse_template(template: &str) -> Result<Vec<Piece<'_>>> {
    let mut pieces = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find(['{', '}']) {
        if rest[open..].starts_with('}') {
            return Err(Error::Template(format!("unmatched `}}` in `{template}`")));
        }
        pieces.push(Piece::Text(&rest[..open]));
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or_else(|| Error::Template(format!("unclosed `{{` in `{template}`")))?;
        let slot = &after[..close];
        if slot.contains('{') {
            return Err(Error::Template(format!("nested slot in `{template}`")));
        }
        pieces.push(match slot.split_once('|') {
            None if slot.trim() == "E" => Piece::Entity,
            Some((serious, satirical)) if !satirical.contains('|') => Piece::Paired { serious, satirical },
            _ => return Err(Error::Template(format!("unknown slot `{{{slot}}}` in `{template}`"))),
        });
        rest = &after[close + 1..];
    }
    pieces.push(Piece::Text(rest));
    let entities = pieces.iter().filter(|p| matches!(p, Piece::Entity)).count();
    if entities != 1 {
        return Err(Error::Template(format!(
            "template must contain exactly one {{E}} slot, found {entities} in `{template}`"
        )));
    }
    Ok(pieces)
}

/// Fills the template: with `x_prime` for the serious candidate and with
/// `x` for the satirical one. Returns `(serious, satirical)`.
pub fn instantiate_false_analogy(frame: &FalseAnalogyFrame) -> Result<(String, String)> {
    let pieces = parse_template(&frame.headline_template_h)?;
    let render = |serious: bool| {
        pieces
            .iter()
            .map(|p| match p {
                Piece::Text(t) => *t,
                Piece::Entity if serious => frame.x_prime.as_str(),
                Piece::Entity => frame.x.as_str(),
                Piece::Paired { serious: s, .. } if serious => s,
                Piece::Paired { satirical, .. } => satirical,
            })
            .collect::<String>()
    };
    Ok((render(true), render(false)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annotation(id: &str, labels: &[&str], class: AbstractClass) -> PairAnnotation {
        PairAnnotation {
            pair_id: id.into(),
            oppositions: labels.iter().map(|s| s.to_string()).collect(),
            abstract_class: class,
            mechanism: FALSE_ANALOGY.into(),
            explicit_side: ExplicitSide::Bad,
        }
    }

    #[test]
    fn running_example_frame() {
        let frame = FalseAnalogyFrame {
            x: "God".into(),
            x_prime: "Bob Dylan".into(),
            property_p: "is unpredictable".into(),
            headline_template_h: "{E} diagnosed with bipolar disorder".into(),
        };
        let (serious, satirical) = instantiate_false_analogy(&frame).unwrap();
        assert_eq!(serious, "Bob Dylan diagnosed with bipolar disorder");
        assert_eq!(satirical, "God diagnosed with bipolar disorder");
    }

    #[test]
    fn paired_slot_frame() {
        let frame = FalseAnalogyFrame {
            x: "Pepsi".into(),
            x_prime: "Bordeaux".into(),
            property_p: "is a popular drink".into(),
            headline_template_h: "2018 {E} vintage benefits from outstanding {grape|high-fructose corn} harvest".into(),
        };
        let (serious, satirical) = instantiate_false_analogy(&frame).unwrap();
        assert_eq!(serious, "2018 Bordeaux vintage benefits from outstanding grape harvest");
        assert_eq!(satirical, "2018 Pepsi vintage benefits from outstanding high-fructose corn harvest");
    }

    #[test]
    fn template_errors() {
        let frame = |t: &str| FalseAnalogyFrame {
            x: "a".into(),
            x_prime: "b".into(),
            property_p: String::new(),
            headline_template_h: t.into(),
        };
        for bad in ["no slot here", "{E} and {E}", "{E", "E}", "{X} {E}", "{a|b|c} {E}", "{{E}}"] {
            assert!(
                matches!(instantiate_false_analogy(&frame(bad)), Err(Error::Template(_))),
                "accepted `{bad}`"
            );
        }
    }

    #[test]
    fn single_label_stats() {
        let tax = OppositionTaxonomy::default();
        let stats = opposition_stats(&[annotation("p", &["life/death"], AbstractClass::NormalAbnormal)], &tax).unwrap();
        assert_eq!(stats.oppositions.len(), 1);
        assert_eq!(stats.oppositions["life/death"], 1.0);
        assert_eq!(stats.abstract_classes[&AbstractClass::NormalAbnormal], 1.0);
        assert_eq!(stats.abstract_classes.values().sum::<f64>(), 1.0);
    }

    #[test]
    fn subtypes_roll_up() {
        let tax = OppositionTaxonomy::default();
        let anns = [
            annotation("a", &["high/low stature: sublime/mundane"], AbstractClass::PossibleImpossible),
            annotation("b", &["high/low stature", "life/death"], AbstractClass::PossibleImpossible),
            annotation("c", &["non-obscene/obscene"], AbstractClass::ActualNonactual),
            annotation("d", &["life/death"], AbstractClass::NormalAbnormal),
        ];
        let stats = opposition_stats(&anns, &tax).unwrap();
        assert_eq!(stats.oppositions[HIGH_LOW_STATURE], 0.5);
        assert_eq!(stats.oppositions["high/low stature: sublime/mundane"], 0.25);
        assert_eq!(stats.oppositions[NON_OBSCENE_OBSCENE], 0.25);
        assert_eq!(stats.abstract_classes[&AbstractClass::PossibleImpossible], 0.5);
        assert_eq!(stats.mechanisms[FALSE_ANALOGY], 1.0);
    }

    #[test]
    fn unknown_or_empty_labels_rejected() {
        let tax = OppositionTaxonomy::default();
        assert!(opposition_stats(&[annotation("a", &["tall/short"], AbstractClass::NormalAbnormal)], &tax).is_err());
        assert!(opposition_stats(&[annotation("a", &[], AbstractClass::NormalAbnormal)], &tax).is_err());
        assert!(opposition_stats(&[], &tax).is_err());
        assert!(tax.resolve("high/low stature: rich/poor").is_err());
    }

    #[test]
    fn sidecar_line_parses() {
        let line = r#"{"pair_id":"abc","oppositions":["high/low stature"],"abstract_class":"POSSIBLE_IMPOSSIBLE","mechanism":"FALSE_ANALOGY","explicit_side":"BAD"}"#;
        let a: PairAnnotation = serde_json::from_str(line).unwrap();
        assert_eq!(a.abstract_class, AbstractClass::PossibleImpossible);
        assert_eq!(a.explicit_side, ExplicitSide::Bad);
        let defaulted: PairAnnotation = serde_json::from_str(
            r#"{"pair_id":"x","oppositions":["other"],"abstract_class":"NORMAL_ABNORMAL","explicit_side":"GOOD"}"#,
        )
        .unwrap();
        assert_eq!(defaulted.mechanism, FALSE_ANALOGY);
    }
}
