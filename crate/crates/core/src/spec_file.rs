//! Theory specification files: a JSON document naming a built-in
//! instance or describing a custom polytopic one (vertices, effects,
//! group, composite rule). Parsing reports the offending field on
//! semantic errors; JSON syntax errors carry line/column from the parser.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{GroupKind, GroupSpec, NamedGroup};
use crate::instances;
use crate::space::{CompositeRule, EffectPolicy, StateSpaceDescriptor, TheoryInstance};
use crate::state::{Effect, LinearMap, StateVector};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheorySpecFile {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomSpec>,
}

fn default_schema() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CustomSpec {
    pub dim: usize,
    /// Vertex coordinates including the leading 1.
    pub vertices: Vec<Vec<f64>>,
    /// `"all"`, or an explicit list of effect duals.
    pub effects: EffectsSpec,
    pub group: GroupSpecFile,
    /// `"classical" | "quantum" | "min" | "max"`.
    pub composite: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EffectsSpec {
    Keyword(String),
    List(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpecFile {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub named: Option<String>,
}

impl TheorySpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::domain(format!("theory spec parse error: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        crate::report::to_json_string(self)
    }

    /// Builds the theory instance this file describes, validating every
    /// field.
    pub fn build(&self) -> Result<TheoryInstance> {
        match (&self.builtin, &self.custom) {
            (Some(name), None) => instances::by_name(name),
            (None, Some(custom)) => custom.build(&self.name),
            (Some(_), Some(_)) => Err(Error::domain(
                "fields 'builtin' and 'custom' are mutually exclusive",
            )),
            (None, None) => Err(Error::domain(
                "theory spec needs either 'builtin' or 'custom'",
            )),
        }
    }

    /// Canonical export of a built-in or custom instance: polytopic
    /// spaces with finite groups export their full data; continuous
    /// instances export by name.
    pub fn from_instance(instance: &TheoryInstance) -> Result<Self> {
        let exportable_custom = instance.space.vertices().is_some() && instance.group.is_finite();
        if !exportable_custom {
            return Ok(TheorySpecFile {
                schema: 1,
                name: instance.name.clone(),
                builtin: Some(instance.name.clone()),
                custom: None,
            });
        }
        let vertices: Vec<Vec<f64>> = instance
            .space
            .vertices()
            .unwrap()
            .iter()
            .map(|v| v.coords().iter().copied().collect())
            .collect();
        let elements: Vec<Vec<f64>> = instance
            .group
            .enumerate()?
            .iter()
            .map(|g| {
                let m = g.matrix();
                let mut row_major = Vec::with_capacity(m.nrows() * m.ncols());
                for r in 0..m.nrows() {
                    for c in 0..m.ncols() {
                        row_major.push(m[(r, c)]);
                    }
                }
                row_major
            })
            .collect();
        let effects = match &instance.effect_policy {
            EffectPolicy::AllEffects => EffectsSpec::Keyword("all".into()),
            EffectPolicy::GeneratedByLocalProducts => {
                EffectsSpec::Keyword("generated-by-local-products".into())
            }
            EffectPolicy::ExplicitList(list) => EffectsSpec::List(
                list.iter()
                    .map(|e| e.dual().iter().copied().collect())
                    .collect(),
            ),
        };
        let composite = match instance.composite_rule {
            CompositeRule::Classical => "classical",
            CompositeRule::Quantum => "quantum",
            CompositeRule::LocalTomographyMin => "min",
            CompositeRule::LocalTomographyMax => "max",
        };
        Ok(TheorySpecFile {
            schema: 1,
            name: instance.name.clone(),
            builtin: None,
            custom: Some(CustomSpec {
                dim: instance.space.dim(),
                vertices,
                effects,
                group: GroupSpecFile {
                    kind: "finite".into(),
                    elements: Some(elements),
                    generators: None,
                    cap: None,
                    named: None,
                },
                composite: composite.into(),
            }),
        })
    }
}

impl CustomSpec {
    fn build(&self, name: &str) -> Result<TheoryInstance> {
        let width = self.dim + 1;
        if self.vertices.is_empty() {
            return Err(Error::domain("custom.vertices: must be non-empty"));
        }
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (i, row) in self.vertices.iter().enumerate() {
            if row.len() != width {
                return Err(Error::domain(format!(
                    "custom.vertices[{i}]: expected {width} coordinates, found {}",
                    row.len()
                )));
            }
            if row[0] != 1.0 {
                return Err(Error::domain(format!(
                    "custom.vertices[{i}][0]: leading component must be 1, found {}",
                    row[0]
                )));
            }
            vertices.push(StateVector::new(DVector::from_row_slice(row))?);
        }
        let space = StateSpaceDescriptor::vertex_list(vertices)?;

        let effect_policy = match &self.effects {
            EffectsSpec::Keyword(k) if k == "all" => EffectPolicy::AllEffects,
            EffectsSpec::Keyword(k) if k == "generated-by-local-products" => {
                EffectPolicy::GeneratedByLocalProducts
            }
            EffectsSpec::Keyword(k) => {
                return Err(Error::domain(format!(
                    "custom.effects: unknown keyword '{k}' (expected \"all\")"
                )))
            }
            EffectsSpec::List(rows) => {
                let mut effects = Vec::with_capacity(rows.len());
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != width {
                        return Err(Error::domain(format!(
                            "custom.effects[{i}]: expected {width} entries, found {}",
                            row.len()
                        )));
                    }
                    let e = Effect::new(DVector::from_row_slice(row));
                    if !space.effect_within_bounds(&e, 1e-9)? {
                        return Err(Error::domain(format!(
                            "custom.effects[{i}]: takes values outside [0,1] on the space"
                        )));
                    }
                    effects.push(e);
                }
                EffectPolicy::ExplicitList(effects)
            }
        };

        let group = self.group.build(width, &space)?;
        let composite_rule = match self.composite.as_str() {
            "classical" => CompositeRule::Classical,
            "quantum" => CompositeRule::Quantum,
            "min" => CompositeRule::LocalTomographyMin,
            "max" => CompositeRule::LocalTomographyMax,
            other => {
                return Err(Error::domain(format!(
                    "custom.composite: unknown rule '{other}'"
                )))
            }
        };
        Ok(TheoryInstance {
            name: name.to_string(),
            space,
            effect_policy,
            group,
            composite_rule,
        })
    }
}

impl GroupSpecFile {
    fn build(&self, width: usize, space: &StateSpaceDescriptor) -> Result<GroupSpec> {
        let parse_matrices = |rows: &Vec<Vec<f64>>, field: &str| -> Result<Vec<LinearMap>> {
            let mut out = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                if row.len() != width * width {
                    return Err(Error::domain(format!(
                        "custom.group.{field}[{i}]: expected {} entries (row-major {width}x{width}), found {}",
                        width * width,
                        row.len()
                    )));
                }
                out.push(LinearMap::new(DMatrix::from_row_slice(width, width, row)));
            }
            Ok(out)
        };
        let spec = match self.kind.as_str() {
            "finite" => {
                let elements = self
                    .elements
                    .as_ref()
                    .ok_or_else(|| Error::domain("custom.group.elements: required for kind 'finite'"))?;
                GroupSpec::finite(parse_matrices(elements, "elements")?)
            }
            "generated" => {
                let generators = self.generators.as_ref().ok_or_else(|| {
                    Error::domain("custom.group.generators: required for kind 'generated'")
                })?;
                GroupSpec::generated(
                    parse_matrices(generators, "generators")?,
                    self.cap.unwrap_or(1024),
                )
            }
            "named" => {
                let named = self
                    .named
                    .as_ref()
                    .ok_or_else(|| Error::domain("custom.group.named: required for kind 'named'"))?;
                GroupSpec::named(parse_named_group(named)?, 0)
            }
            other => {
                return Err(Error::domain(format!(
                    "custom.group.kind: unknown kind '{other}'"
                )))
            }
        };
        // validation: finite lists must be closed under products and every
        // element must preserve the space
        if let GroupKind::FiniteList(elements) = &spec.kind {
            let key = |m: &nalgebra::DMatrix<f64>| -> Vec<i64> {
                m.iter().map(|v| (v * 1e9).round() as i64).collect()
            };
            let table: std::collections::HashSet<Vec<i64>> =
                elements.iter().map(|g| key(g.matrix())).collect();
            for (i, g) in elements.iter().enumerate() {
                for (j, h) in elements.iter().enumerate() {
                    let prod = g.compose(h);
                    if !table.contains(&key(prod.matrix())) {
                        return Err(Error::domain(format!(
                            "custom.group.elements: not closed under products \
                             (elements[{i}] * elements[{j}] is missing)"
                        )));
                    }
                }
            }
            if let Some(vertices) = space.vertices() {
                for (i, g) in elements.iter().enumerate() {
                    for v in vertices {
                        let img = v.apply(g).map_err(|e| {
                            Error::domain(format!("custom.group.elements[{i}]: {e}"))
                        })?;
                        if !space.is_member(&img, 1e-7)? {
                            return Err(Error::domain(format!(
                                "custom.group.elements[{i}]: maps a vertex outside the space"
                            )));
                        }
                    }
                }
            }
        }
        Ok(spec)
    }
}

fn parse_named_group(name: &str) -> Result<NamedGroup> {
    let lower = name.to_ascii_lowercase();
    if let Some(rest) = lower.strip_prefix("so(").and_then(|s| s.strip_suffix(')')) {
        let n = rest
            .parse()
            .map_err(|_| Error::domain(format!("custom.group.named: bad dimension in '{name}'")))?;
        return Ok(NamedGroup::SpecialOrthogonal(n));
    }
    if let Some(rest) = lower.strip_prefix("o(").and_then(|s| s.strip_suffix(')')) {
        let n = rest
            .parse()
            .map_err(|_| Error::domain(format!("custom.group.named: bad dimension in '{name}'")))?;
        return Ok(NamedGroup::Orthogonal(n));
    }
    if let Some(rest) = lower.strip_prefix("su(").and_then(|s| s.strip_suffix(')')) {
        let n = rest
            .parse()
            .map_err(|_| Error::domain(format!("custom.group.named: bad dimension in '{name}'")))?;
        return Ok(NamedGroup::SuConjugation(n));
    }
    if lower == "su3-block" {
        return Ok(NamedGroup::Su3Block);
    }
    Err(Error::domain(format!(
        "custom.group.named: unknown group '{name}'"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_round_trip() {
        let spec = TheorySpecFile {
            schema: 1,
            name: "quantum:2".into(),
            builtin: Some("quantum:2".into()),
            custom: None,
        };
        let inst = spec.build().unwrap();
        assert_eq!(inst.space.dim(), 3);
        let text = spec.to_json().unwrap();
        let parsed = TheorySpecFile::parse(&text).unwrap();
        assert_eq!(parsed.build().unwrap().name, "quantum:2");
    }

    #[test]
    fn custom_square_parses() {
        let text = r#"{
            "schema": 1,
            "name": "square",
            "custom": {
                "dim": 2,
                "vertices": [[1,0,0],[1,1,0],[1,0,1],[1,1,1]],
                "effects": "all",
                "group": {"kind": "finite", "elements": [[1,0,0, 0,1,0, 0,0,1]]},
                "composite": "min"
            }
        }"#;
        let spec = TheorySpecFile::parse(text).unwrap();
        let inst = spec.build().unwrap();
        assert_eq!(inst.space.dim(), 2);
        assert_eq!(inst.space.vertices().unwrap().len(), 4);
    }

    #[test]
    fn field_precise_errors() {
        let bad_vertex = r#"{"name":"x","custom":{"dim":2,"vertices":[[0.5,0,0]],
            "effects":"all","group":{"kind":"finite","elements":[]},"composite":"min"}}"#;
        let err = TheorySpecFile::parse(bad_vertex).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("vertices[0]"), "{err}");

        let bad_effect = r#"{"name":"x","custom":{"dim":1,"vertices":[[1,0],[1,1]],
            "effects":[[0,5]],"group":{"kind":"finite","elements":[]},"composite":"min"}}"#;
        let err = TheorySpecFile::parse(bad_effect).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("effects[0]"), "{err}");

        let bad_group = r#"{"name":"x","custom":{"dim":1,"vertices":[[1,0],[1,1]],
            "effects":"all","group":{"kind":"mystery"},"composite":"min"}}"#;
        let err = TheorySpecFile::parse(bad_group).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("group.kind"), "{err}");
    }

    #[test]
    fn export_classical_as_custom() {
        let inst = instances::classical(3).unwrap();
        let spec = TheorySpecFile::from_instance(&inst).unwrap();
        let custom = spec.custom.as_ref().expect("classical exports fully");
        assert_eq!(custom.vertices.len(), 3);
        assert_eq!(custom.group.elements.as_ref().unwrap().len(), 6);
        let rebuilt = spec.build().unwrap();
        assert_eq!(rebuilt.space.dim(), 2);
    }

    #[test]
    fn non_closed_group_rejected() {
        // a single transposition without the identity is not closed
        let text = r#"{"name":"x","custom":{"dim":1,"vertices":[[1,0],[1,1]],
            "effects":"all","group":{"kind":"finite","elements":[[1,0,1,-1]]},"composite":"min"}}"#;
        let err = TheorySpecFile::parse(text).unwrap().build().unwrap_err();
        assert!(err.to_string().contains("not closed"), "{err}");
    }

    #[test]
    fn export_ball_as_builtin_reference() {
        let inst = instances::ball_gbit(3).unwrap();
        let spec = TheorySpecFile::from_instance(&inst).unwrap();
        assert_eq!(spec.builtin.as_deref(), Some("ball:3"));
    }
}
