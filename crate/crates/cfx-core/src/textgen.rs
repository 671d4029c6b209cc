//! Template-based textual explanations.
//!
//! Renders only the actionable changes — features the search actually
//! substituted — in raw units: continuous values are denormalized through
//! the schema bounds and shown with four significant digits, categorical
//! values by category name. The default wording avoids causal claims; a
//! discovered relationship is not a causal one.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::counterfactual::CounterfactualResult;
use crate::schema::{FeatureKind, Instance, Schema};

/// A rendered change in raw units.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChangeRecord {
    pub feature: String,
    pub from: String,
    pub to: String,
}

/// Rendered explanation: a header naming the outcomes, one line per changed
/// feature, and a closing outcome sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExplanationText {
    pub lines: Vec<String>,
    pub raw_changes: Vec<ChangeRecord>,
}

impl ExplanationText {
    pub fn text(&self) -> String {
        self.lines.join("\n")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TextGenError {
    BadTemplate(String),
}

impl fmt::Display for TextGenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TextGenError::BadTemplate(msg) => write!(f, "bad template: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TextGenError {}

const PLACEHOLDERS: [&str; 5] = ["feature", "old", "new", "outcome_from", "outcome_to"];

/// Render a counterfactual as text.
///
/// `template`, when given, replaces the default per-change line; it may
/// reference `{feature}`, `{old}`, `{new}`, `{outcome_from}` and
/// `{outcome_to}`. The default line reads `increase <feature> from <old> to
/// <new>` with `decrease`/`change` chosen by direction and feature kind.
pub fn render(
    result: &CounterfactualResult,
    query: &Instance,
    schema: &Schema,
    template: Option<&str>,
) -> Result<ExplanationText, TextGenError> {
    assert!(!result.changed_features.is_empty(), "counterfactual with no changes");
    if let Some(t) = template {
        validate_template(t)?;
    }
    let outcome_from = schema.class_labels[result.query_class].clone();
    let outcome_to = schema.class_labels[result.new_class].clone();

    let mut lines = Vec::with_capacity(result.n_changes + 2);
    lines.push(format!(
        "To change the outcome from '{outcome_from}' to '{outcome_to}':"
    ));
    let mut raw_changes = Vec::with_capacity(result.n_changes);
    for change in &result.changed_features {
        debug_assert_eq!(query.values[change.feature], change.from);
        let feat = &schema.features[change.feature];
        let (old, new, verb) = match &feat.kind {
            FeatureKind::Continuous { .. } => {
                let old_raw = schema.denormalize_value(change.feature, change.from);
                let new_raw = schema.denormalize_value(change.feature, change.to);
                let verb = if new_raw > old_raw { "increase" } else { "decrease" };
                (format_sig4(old_raw), format_sig4(new_raw), verb)
            }
            FeatureKind::Categorical { categories } => (
                categories[change.from as usize].clone(),
                categories[change.to as usize].clone(),
                "change",
            ),
        };
        lines.push(match template {
            Some(t) => fill_template(t, &feat.name, &old, &new, &outcome_from, &outcome_to),
            None => format!("{verb} {} from {old} to {new}", feat.name),
        });
        raw_changes.push(ChangeRecord { feature: feat.name.clone(), from: old, to: new });
    }
    lines.push(format!("The predicted outcome is then '{outcome_to}'."));
    Ok(ExplanationText { lines, raw_changes })
}

/// Recover the `(feature, from, to)` triples from a default rendering.
/// Returns `None` when the lines do not look like [`render`]'s output.
pub fn parse_default_rendering(lines: &[String]) -> Option<Vec<ChangeRecord>> {
    if lines.len() < 3 {
        return None;
    }
    let mut out = Vec::with_capacity(lines.len() - 2);
    for line in &lines[1..lines.len() - 1] {
        let rest = line
            .strip_prefix("increase ")
            .or_else(|| line.strip_prefix("decrease "))
            .or_else(|| line.strip_prefix("change "))?;
        let (head, to) = rest.rsplit_once(" to ")?;
        let (feature, from) = head.rsplit_once(" from ")?;
        out.push(ChangeRecord {
            feature: feature.to_string(),
            from: from.to_string(),
            to: to.to_string(),
        });
    }
    Some(out)
}

fn validate_template(template: &str) -> Result<(), TextGenError> {
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        let tail = &rest[start + 1..];
        let end = tail
            .find('}')
            .ok_or_else(|| TextGenError::BadTemplate("unterminated '{'".into()))?;
        let name = &tail[..end];
        if !PLACEHOLDERS.contains(&name) {
            return Err(TextGenError::BadTemplate(format!("unknown placeholder '{{{name}}}'")));
        }
        rest = &tail[end + 1..];
    }
    Ok(())
}

fn fill_template(
    template: &str,
    feature: &str,
    old: &str,
    new: &str,
    outcome_from: &str,
    outcome_to: &str,
) -> String {
    template
        .replace("{feature}", feature)
        .replace("{old}", old)
        .replace("{new}", new)
        .replace("{outcome_from}", outcome_from)
        .replace("{outcome_to}", outcome_to)
}

/// Shortest decimal form of `x` rounded to four significant digits.
pub fn format_sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = Float::floor(Float::log10(Float::abs(x)));
    let decimals = 3.0 - magnitude;
    let rounded = if decimals >= 0.0 {
        let scale = Float::powi(10.0f64, decimals as i32);
        Float::round(x * scale) / scale
    } else {
        let scale = Float::powi(10.0f64, (-decimals) as i32);
        Float::round(x / scale) * scale
    };
    format!("{rounded}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterfactual::FeatureChange;
    use crate::neighbours::NunResult;
    use crate::schema::Feature;
    use alloc::vec;

    fn hours_schema() -> Schema {
        Schema::new(
            vec![
                Feature::continuous("hours-per-week", 0.0, 100.0),
                Feature::categorical("workclass", &["private", "government"]),
            ],
            "income",
            vec!["<=50K".into(), ">50K".into()],
        )
        .unwrap()
    }

    fn result_with(changes: Vec<FeatureChange>, counterfactual: Instance) -> CounterfactualResult {
        CounterfactualResult {
            nun_used: NunResult {
                nun: counterfactual.clone(),
                nun_class: 1,
                distance: 0.0,
                case_index: 0,
            },
            counterfactual,
            query_class: 0,
            new_class: 1,
            n_changes: changes.len(),
            amount: changes.iter().map(|c| c.delta).sum(),
            changed_features: changes,
        }
    }

    #[test]
    fn renders_the_working_hours_example() {
        let schema = hours_schema();
        let query = Instance::new(vec![0.4, 0.0]);
        let r = result_with(
            vec![FeatureChange { feature: 0, from: 0.4, to: 0.5, delta: 0.1 }],
            Instance::new(vec![0.5, 0.0]),
        );
        let text = render(&r, &query, &schema, None).unwrap();
        assert_eq!(text.lines.len(), 3);
        assert_eq!(text.lines[1], "increase hours-per-week from 40 to 50");
        assert_eq!(text.lines[0], "To change the outcome from '<=50K' to '>50K':");
        assert_eq!(text.lines[2], "The predicted outcome is then '>50K'.");
    }

    #[test]
    fn only_changed_features_are_listed() {
        let schema = hours_schema();
        let query = Instance::new(vec![0.4, 0.0]);
        let r = result_with(
            vec![
                FeatureChange { feature: 0, from: 0.4, to: 0.2, delta: 0.2 },
                FeatureChange { feature: 1, from: 0.0, to: 1.0, delta: 1.0 },
            ],
            Instance::new(vec![0.2, 1.0]),
        );
        let text = render(&r, &query, &schema, None).unwrap();
        assert_eq!(text.lines.len(), 4, "header + 2 changes + outcome");
        assert_eq!(text.lines[1], "decrease hours-per-week from 40 to 20");
        assert_eq!(text.lines[2], "change workclass from private to government");
    }

    #[test]
    fn default_rendering_round_trips() {
        let schema = hours_schema();
        let query = Instance::new(vec![0.437, 1.0]);
        let r = result_with(
            vec![
                FeatureChange { feature: 0, from: 0.437, to: 0.91, delta: 0.473 },
                FeatureChange { feature: 1, from: 1.0, to: 0.0, delta: 1.0 },
            ],
            Instance::new(vec![0.91, 0.0]),
        );
        let text = render(&r, &query, &schema, None).unwrap();
        let parsed = parse_default_rendering(&text.lines).unwrap();
        assert_eq!(parsed, text.raw_changes);
    }

    #[test]
    fn custom_template_substitutes_placeholders() {
        let schema = hours_schema();
        let query = Instance::new(vec![0.4, 0.0]);
        let r = result_with(
            vec![FeatureChange { feature: 0, from: 0.4, to: 0.5, delta: 0.1 }],
            Instance::new(vec![0.5, 0.0]),
        );
        let text = render(
            &r,
            &query,
            &schema,
            Some("set {feature} to {new} (was {old}) for '{outcome_to}'"),
        )
        .unwrap();
        assert_eq!(text.lines[1], "set hours-per-week to 50 (was 40) for '>50K'");
    }

    #[test]
    fn unknown_placeholder_is_rejected() {
        let schema = hours_schema();
        let query = Instance::new(vec![0.4, 0.0]);
        let r = result_with(
            vec![FeatureChange { feature: 0, from: 0.4, to: 0.5, delta: 0.1 }],
            Instance::new(vec![0.5, 0.0]),
        );
        let err = render(&r, &query, &schema, Some("{bogus}")).unwrap_err();
        assert_eq!(err, TextGenError::BadTemplate("unknown placeholder '{bogus}'".into()));
    }

    #[test]
    fn different_change_sets_render_differently() {
        let schema = hours_schema();
        let q = Instance::new(vec![0.4, 0.0]);
        let a = render(
            &result_with(
                vec![FeatureChange { feature: 0, from: 0.4, to: 0.5, delta: 0.1 }],
                Instance::new(vec![0.5, 0.0]),
            ),
            &q,
            &schema,
            None,
        )
        .unwrap();
        let b = render(
            &result_with(
                vec![FeatureChange { feature: 1, from: 0.0, to: 1.0, delta: 1.0 }],
                Instance::new(vec![0.4, 1.0]),
            ),
            &q,
            &schema,
            None,
        )
        .unwrap();
        assert_ne!(a.lines, b.lines);
    }

    #[test]
    fn four_significant_digits() {
        assert_eq!(format_sig4(40.0), "40");
        assert_eq!(format_sig4(0.123456), "0.1235");
        assert_eq!(format_sig4(123456.0), "123500");
        assert_eq!(format_sig4(-2.71828), "-2.718");
        assert_eq!(format_sig4(0.0), "0");
        assert_eq!(format_sig4(99.995), "100");
    }
}
