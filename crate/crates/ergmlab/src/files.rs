//! On-disk model format: JSON with graph patterns embedded in the plain
//! `n m` / `u v` text format, integer weights as JSON numbers, and optional
//! construction metadata carried alongside the features so downstream
//! commands can decode digits or recover windows without re-deriving
//! parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{ErgmModel, Feature, FeatureKind};
use crate::reductions::{GapParams, ReplacementParams, TrifreeParams};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureSpec {
    LabeledIndicator {
        pattern: String,
        vertices: Vec<usize>,
        weight: i64,
    },
    IsoCount {
        pattern: String,
        weight: i64,
    },
}

/// Metadata recorded by the builders; absent fields mean the model did not
/// come from that construction.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ModelMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trifree: Option<TrifreeParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replacement: Option<ReplacementParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matching: Option<MatchingMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapParams>,
}

impl ModelMeta {
    pub fn is_empty(&self) -> bool {
        self.trifree.is_none()
            && self.replacement.is_none()
            && self.matching.is_none()
            && self.gap.is_none()
    }
}

/// Digit parameters of a matching model: digits of Z in base
/// `2^base_exponent` census matchings by size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingMeta {
    pub base_exponent: u64,
    pub max_size: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub features: Vec<FeatureSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<ModelMeta>,
}

impl ModelFile {
    pub fn from_model(model: &ErgmModel, meta: Option<ModelMeta>) -> ModelFile {
        let features = model
            .features()
            .iter()
            .map(|f| match &f.kind {
                FeatureKind::LabeledIndicator { pattern, vertices } => {
                    FeatureSpec::LabeledIndicator {
                        pattern: pattern.to_text(),
                        vertices: vertices.clone(),
                        weight: f.weight,
                    }
                }
                FeatureKind::IsoCount { pattern } => FeatureSpec::IsoCount {
                    pattern: pattern.to_text(),
                    weight: f.weight,
                },
            })
            .collect();
        ModelFile {
            n: model.n(),
            features,
            meta: meta.filter(|m| !m.is_empty()),
        }
    }

    pub fn into_model(self) -> Result<(ErgmModel, Option<ModelMeta>)> {
        let features = self
            .features
            .into_iter()
            .map(|spec| -> Result<Feature> {
                Ok(match spec {
                    FeatureSpec::LabeledIndicator {
                        pattern,
                        vertices,
                        weight,
                    } => Feature::indicator(Graph::from_text(&pattern)?, vertices, weight),
                    FeatureSpec::IsoCount { pattern, weight } => {
                        Feature::iso_count(Graph::from_text(&pattern)?, weight)
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let model = ErgmModel::new(self.n, features)?;
        if let Some(trifree) = self.meta.as_ref().and_then(|m| m.trifree.as_ref()) {
            validate_trifree_meta(&model, trifree)?;
        }
        Ok((model, self.meta))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files serialize")
    }

    pub fn from_json(text: &str) -> Result<ModelFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("model file: {e}")))
    }
}

// A file claiming to be a trifree model must actually satisfy the
// construction's invariants; a corrupted weight is rejected by name.
fn validate_trifree_meta(
    model: &ErgmModel,
    p: &crate::reductions::TrifreeParams,
) -> Result<()> {
    let c = crate::graph::pair_count(model.n()) as i64;
    let expect_beta = -c * p.alpha - c - 1;
    if p.beta != expect_beta {
        return Err(Error::InvalidInput(format!(
            "trifree metadata violated: beta = {} but -C(n,2)*alpha - C(n,2) - 1 = {expect_beta}",
            p.beta
        )));
    }
    if p.source.n() != model.n() {
        return Err(Error::InvalidInput(
            "trifree metadata violated: source graph size differs from the model".into(),
        ));
    }
    for (idx, f) in model.features().iter().enumerate() {
        let ok = match &f.kind {
            FeatureKind::LabeledIndicator { .. } => f.weight == p.alpha || f.weight == p.beta,
            FeatureKind::IsoCount { .. } => f.weight == p.beta,
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "trifree metadata violated: feature {idx} has weight {}, expected alpha = {} or beta = {}",
                f.weight, p.alpha, p.beta
            )));
        }
    }
    Ok(())
}

/// Serializes a model with metadata.
pub fn model_to_json(model: &ErgmModel, meta: Option<ModelMeta>) -> String {
    ModelFile::from_model(model, meta).to_json()
}

/// Parses a model file.
pub fn model_from_json(text: &str) -> Result<(ErgmModel, Option<ModelMeta>)> {
    ModelFile::from_json(text)?.into_model()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::shapes;
    use crate::reductions::build_trifree_ergm;

    #[test]
    fn model_json_roundtrip() {
        let (model, params) = build_trifree_ergm(&shapes::k3(), 4).unwrap();
        let meta = ModelMeta {
            trifree: Some(params.clone()),
            ..Default::default()
        };
        let json = model_to_json(&model, Some(meta));
        let (back, meta) = model_from_json(&json).unwrap();
        assert_eq!(back.n(), model.n());
        assert_eq!(back.features(), model.features());
        assert_eq!(meta.unwrap().trifree.unwrap(), params);
    }

    #[test]
    fn bad_model_files_error() {
        assert!(model_from_json("not json").is_err());
        // vertex out of range
        let bad = r#"{"n":2,"features":[{"kind":"labeled_indicator","pattern":"2 1\n0 1\n","vertices":[0,5],"weight":1}]}"#;
        assert!(model_from_json(bad).is_err());
    }

    #[test]
    fn corrupted_trifree_beta_is_rejected_by_name() {
        let (model, params) = build_trifree_ergm(&shapes::k3(), 4).unwrap();
        let meta = ModelMeta {
            trifree: Some(params),
            ..Default::default()
        };
        let json = model_to_json(&model, Some(meta));
        let corrupted = json.replace("-16", "-15");
        let err = model_from_json(&corrupted).unwrap_err();
        assert!(
            err.to_string().contains("beta"),
            "error should name the violated invariant: {err}"
        );
    }
}
