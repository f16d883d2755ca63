//! Assessment documents: the JSON file format consumed by the CLI and the
//! browser demo.
//!
//! ```json
//! {
//!   "space_size": 3,
//!   "labels": ["x", "y", "z"],
//!   "gambles": [
//!     { "values": [0.0, 1.0, 0.5], "lower": 0.46, "label": "f1" }
//!   ]
//! }
//! ```
//!
//! `labels` (state names) and per-gamble `label` are optional. Strict
//! parsing (the default) rejects unknown keys; lenient parsing ignores
//! them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamble::{Assessment, Gamble};

/// One judgement of the document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GambleEntry {
    pub values: Vec<f64>,
    pub lower: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// The on-disk document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessmentDoc {
    pub space_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub gambles: Vec<GambleEntry>,
}

#[derive(Deserialize)]
struct LenientGambleEntry {
    values: Vec<f64>,
    lower: f64,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Deserialize)]
struct LenientAssessmentDoc {
    space_size: usize,
    #[serde(default)]
    labels: Option<Vec<String>>,
    gambles: Vec<LenientGambleEntry>,
}

impl AssessmentDoc {
    /// Parses a document. `strict` rejects unknown keys (with the line and
    /// column of the offender, courtesy of the JSON parser).
    pub fn parse(text: &str, strict: bool) -> Result<AssessmentDoc> {
        if strict {
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
        } else {
            let doc: LenientAssessmentDoc =
                serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(AssessmentDoc {
                space_size: doc.space_size,
                labels: doc.labels,
                gambles: doc
                    .gambles
                    .into_iter()
                    .map(|g| GambleEntry {
                        values: g.values,
                        lower: g.lower,
                        label: g.label,
                    })
                    .collect(),
            })
        }
    }

    /// Validates the document and converts it to an [`Assessment`].
    pub fn to_assessment(&self) -> Result<Assessment> {
        if self.space_size == 0 {
            return Err(Error::Parse("space_size must be >= 1".into()));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.space_size {
                return Err(Error::Parse(format!(
                    "labels has {} entries, space_size is {}",
                    labels.len(),
                    self.space_size
                )));
            }
        }
        let mut items = Vec::with_capacity(self.gambles.len());
        for (i, entry) in self.gambles.iter().enumerate() {
            if entry.values.len() != self.space_size {
                return Err(Error::Parse(format!(
                    "gamble #{i} has {} values, space_size is {}",
                    entry.values.len(),
                    self.space_size
                )));
            }
            let gamble = Gamble::new(entry.values.clone())
                .map_err(|e| Error::Parse(format!("gamble #{i}: {e}")))?;
            if !entry.lower.is_finite() {
                return Err(Error::Parse(format!("gamble #{i}: non-finite lower bound")));
            }
            items.push((gamble, entry.lower));
        }
        Assessment::new(self.space_size, items)
    }

    /// Name for state `x`: the label when present, else `x<i>`.
    pub fn state_name(&self, x: usize) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.get(x).cloned())
            .unwrap_or_else(|| format!("x{x}"))
    }

    /// Name for gamble `i`: the label when present, else `f<i+1>`.
    pub fn gamble_name(&self, i: usize) -> String {
        self.gambles
            .get(i)
            .and_then(|g| g.label.clone())
            .unwrap_or_else(|| format!("f{}", i + 1))
    }

    pub fn from_assessment(a: &Assessment) -> AssessmentDoc {
        AssessmentDoc {
            space_size: a.space_size(),
            labels: None,
            gambles: a
                .items()
                .iter()
                .map(|(g, l)| GambleEntry {
                    values: g.values().to_vec(),
                    lower: *l,
                    label: None,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// Reads and validates an assessment in one call.
pub fn parse_assessment(text: &str, strict: bool) -> Result<(AssessmentDoc, Assessment)> {
    let doc = AssessmentDoc::parse(text, strict)?;
    let assessment = doc.to_assessment()?;
    Ok((doc, assessment))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "space_size": 3,
        "labels": ["x", "y", "z"],
        "gambles": [
            { "values": [0.0, 1.0, 0.5], "lower": 0.46, "label": "f1" },
            { "values": [0.0, 0.5, 1.0], "lower": 0.4 }
        ]
    }"#;

    #[test]
    fn parses_and_converts() {
        let (doc, a) = parse_assessment(SAMPLE, true).unwrap();
        assert_eq!(a.space_size(), 3);
        assert_eq!(a.items().len(), 2);
        assert_eq!(doc.gamble_name(0), "f1");
        assert_eq!(doc.gamble_name(1), "f2");
        assert_eq!(doc.state_name(2), "z");
    }

    #[test]
    fn strict_rejects_unknown_keys() {
        let text = r#"{ "space_size": 2, "gambles": [], "comment": "hi" }"#;
        let err = AssessmentDoc::parse(text, true).unwrap_err();
        assert!(err.to_string().contains("comment"), "{err}");
        assert!(AssessmentDoc::parse(text, false).is_ok());
    }

    #[test]
    fn reports_line_and_column_for_syntax_errors() {
        let text = "{\n  \"space_size\": 3,,\n}";
        let err = AssessmentDoc::parse(text, true).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn validation_failures() {
        let bad_len = r#"{ "space_size": 3, "gambles": [ { "values": [1.0], "lower": 0.0 } ] }"#;
        assert!(parse_assessment(bad_len, true).is_err());
        let bad_labels = r#"{ "space_size": 3, "labels": ["a"], "gambles": [] }"#;
        assert!(parse_assessment(bad_labels, true).is_err());
        let nan = r#"{ "space_size": 1, "gambles": [ { "values": [1.0], "lower": 1e999 } ] }"#;
        assert!(parse_assessment(nan, true).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let (doc, a) = parse_assessment(SAMPLE, true).unwrap();
        let again = AssessmentDoc::parse(&doc.to_json(), true).unwrap();
        assert_eq!(again.to_assessment().unwrap(), a);
    }
}
