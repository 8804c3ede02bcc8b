//! JSON instance files: schema, validation and conversion to oracles and
//! constraint families.
//!
//! Elements are always referred to by 0-based index; labels, when given,
//! are only used for display.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::families::{
    ComplementOfParts, ComplementOfRings, ConstraintFamily, ExplicitFamily, Membership, RingFamily,
    Unconstrained,
};
use crate::functions::{CoverageSystem, ModularShift, TableFunction, WeightedGraph};
use crate::ground::{GroundSet, Mask, MAX_ELEMENTS};
use crate::oracle::SubmodularOracle;

pub const INSTANCE_SCHEMA: &str = "hsfm-instance/1";

fn default_schema() -> String {
    INSTANCE_SCHEMA.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroundSpec {
    Count(usize),
    Labels(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Cut {
        #[serde(default)]
        directed: bool,
        edges: Vec<(usize, usize, i64)>,
    },
    Coverage {
        universe_weights: Vec<i64>,
        incidence: Vec<Vec<usize>>,
    },
    Table {
        values: Vec<i64>,
    },
    ModularShift {
        base: Box<FunctionSpec>,
        weights: Vec<i64>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    #[serde(default)]
    pub forced_in: Mask,
    /// Defaults to the whole ground set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed: Option<Mask>,
    #[serde(default)]
    pub arcs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintSpec {
    #[default]
    None,
    ComplementOfRings {
        rings: Vec<RingSpec>,
    },
    ComplementOfIntersecting {
        members: Vec<Mask>,
    },
    ComplementOfCrossing {
        members: Vec<Mask>,
    },
    /// Complement of a k-hierarchical lattice given by its parts `F_1..F_k`.
    Explicit {
        parts: Vec<Vec<Mask>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_set: Option<GroundSpec>,
    pub function: FunctionSpec,
    #[serde(default)]
    pub constraint: ConstraintSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        if file.schema != INSTANCE_SCHEMA {
            return Err(Error::Parse(format!(
                "unsupported schema {:?}, expected {INSTANCE_SCHEMA:?}",
                file.schema
            )));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("instance serializes");
        text.push('\n');
        text
    }

    /// Hex SHA-256 of the compact serialization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("instance serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Oracle built from a [`FunctionSpec`].
#[derive(Clone, Debug)]
pub enum Function {
    Cut(WeightedGraph),
    Coverage(CoverageSystem),
    Table(TableFunction),
    Shift(Box<ModularShift<Function>>),
}

impl SubmodularOracle for Function {
    fn n(&self) -> usize {
        match self {
            Function::Cut(g) => g.n(),
            Function::Coverage(c) => c.n(),
            Function::Table(t) => t.n(),
            Function::Shift(s) => s.n(),
        }
    }

    fn evaluate(&self, x: Mask) -> i64 {
        match self {
            Function::Cut(g) => g.evaluate(x),
            Function::Coverage(c) => c.evaluate(x),
            Function::Table(t) => t.evaluate(x),
            Function::Shift(s) => s.evaluate(x),
        }
    }

    fn value_bound(&self) -> Option<i64> {
        match self {
            Function::Cut(g) => g.value_bound(),
            Function::Coverage(c) => c.value_bound(),
            Function::Table(t) => t.value_bound(),
            Function::Shift(s) => s.value_bound(),
        }
    }
}

fn build_function(spec: &FunctionSpec, n: usize) -> Result<Function> {
    let f = match spec {
        FunctionSpec::Cut { directed, edges } => {
            Function::Cut(WeightedGraph::new(n, *directed, edges.clone())?)
        }
        FunctionSpec::Coverage {
            universe_weights,
            incidence,
        } => {
            if incidence.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "coverage incidence has {} rows for {n} elements",
                    incidence.len()
                )));
            }
            Function::Coverage(CoverageSystem::new(universe_weights.clone(), incidence.clone())?)
        }
        FunctionSpec::Table { values } => Function::Table(TableFunction::new(n, values.clone())?),
        FunctionSpec::ModularShift { base, weights } => Function::Shift(Box::new(ModularShift::new(
            build_function(base, n)?,
            weights.clone(),
        )?)),
    };
    Ok(f)
}

/// Constraint built from a [`ConstraintSpec`]. For the intersecting and
/// crossing kinds this is the excluded family `G` itself.
#[derive(Clone, Debug)]
pub enum Constraint {
    None(Unconstrained),
    Rings(ComplementOfRings),
    Intersecting(ExplicitFamily),
    Crossing(ExplicitFamily),
    Explicit(ComplementOfParts),
}

impl Constraint {
    pub fn hierarchy_bound(&self) -> usize {
        match self {
            Constraint::None(_) => 0,
            Constraint::Rings(r) => r.hierarchy_bound(),
            Constraint::Intersecting(_) | Constraint::Crossing(_) => 2,
            Constraint::Explicit(p) => p.hierarchy_bound(),
        }
    }

    /// Membership in the feasible family `F`.
    pub fn feasible(&self, x: Mask) -> bool {
        match self {
            Constraint::None(_) => true,
            Constraint::Rings(r) => r.contains(x),
            Constraint::Intersecting(g) | Constraint::Crossing(g) => !g.contains(x),
            Constraint::Explicit(p) => p.contains(x),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Constraint::None(_) => "none",
            Constraint::Rings(_) => "complement_of_rings",
            Constraint::Intersecting(_) => "complement_of_intersecting",
            Constraint::Crossing(_) => "complement_of_crossing",
            Constraint::Explicit(_) => "explicit",
        }
    }
}

fn check_masks(masks: &[Mask], n: usize, what: &str) -> Result<()> {
    match masks.iter().find(|m| !m.fits(n)) {
        Some(&mask) => Err(Error::InvalidInstance(format!(
            "{what}: {mask:?} uses an element outside 0..{n}"
        ))),
        None => Ok(()),
    }
}

fn build_constraint(spec: &ConstraintSpec, n: usize) -> Result<Constraint> {
    let c = match spec {
        ConstraintSpec::None => Constraint::None(Unconstrained { n }),
        ConstraintSpec::ComplementOfRings { rings } => {
            let rings = rings
                .iter()
                .map(|r| {
                    let allowed = r.allowed.unwrap_or(Mask::full(n));
                    check_masks(&[r.forced_in, allowed], n, "ring bounds")?;
                    RingFamily::new(n, r.forced_in, allowed, r.arcs.clone())
                })
                .collect::<Result<Vec<_>>>()?;
            Constraint::Rings(ComplementOfRings::new(n, rings)?)
        }
        ConstraintSpec::ComplementOfIntersecting { members } => {
            check_masks(members, n, "intersecting family")?;
            Constraint::Intersecting(ExplicitFamily::new(n, members.iter().copied()))
        }
        ConstraintSpec::ComplementOfCrossing { members } => {
            check_masks(members, n, "crossing family")?;
            Constraint::Crossing(ExplicitFamily::new(n, members.iter().copied()))
        }
        ConstraintSpec::Explicit { parts } => {
            let mut seen = std::collections::HashSet::new();
            let mut built = Vec::with_capacity(parts.len());
            for part in parts {
                check_masks(part, n, "explicit part")?;
                let family = ExplicitFamily::new(n, part.iter().copied());
                if let Some(&x) = family.members().iter().find(|&&x| !seen.insert(x)) {
                    return Err(Error::OverlappingParts(x));
                }
                built.push(family);
            }
            Constraint::Explicit(ComplementOfParts::new(built))
        }
    };
    Ok(c)
}

/// A validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub ground: GroundSet,
    pub function: Function,
    pub constraint: Constraint,
    pub k: usize,
    pub value_bound: i64,
    pub seed: Option<u64>,
    pub digest: String,
}

impl Instance {
    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        let ground = match (file.ground_set.as_ref(), file.n) {
            (None, None) => return Err(Error::InvalidInstance("missing n or ground_set".into())),
            (Some(GroundSpec::Labels(labels)), n) => {
                let g = GroundSet::new(labels.clone())?;
                if n.is_some_and(|n| n != g.len()) {
                    return Err(Error::InvalidInstance(format!(
                        "n = {} but {} labels",
                        n.unwrap_or_default(),
                        g.len()
                    )));
                }
                g
            }
            (Some(&GroundSpec::Count(c)), Some(n)) if c != n => {
                return Err(Error::InvalidInstance(format!("n = {n} but ground_set = {c}")))
            }
            (Some(&GroundSpec::Count(n)), _) | (None, Some(n)) => {
                if n > MAX_ELEMENTS {
                    return Err(Error::GroundSetTooLarge {
                        n,
                        max: MAX_ELEMENTS,
                    });
                }
                GroundSet::indexed(n)?
            }
        };
        let n = ground.len();
        let function = build_function(&file.function, n)?;
        let constraint = build_constraint(&file.constraint, n)?;
        let k = constraint.hierarchy_bound();
        if let Some(declared) = file.k.filter(|&d| d != k) {
            return Err(Error::InvalidInstance(format!(
                "declared k = {declared} but a {} constraint has k = {k}",
                constraint.kind()
            )));
        }
        let value_bound = match file.value_bound.or_else(|| function.value_bound()) {
            Some(b) if b >= 0 => b,
            Some(b) => return Err(Error::InvalidInstance(format!("negative value_bound {b}"))),
            None => return Err(Error::InvalidInstance("missing value_bound".into())),
        };
        Ok(Instance {
            ground,
            function,
            constraint,
            k,
            value_bound,
            seed: file.seed,
            digest: file.digest(),
        })
    }

    pub fn n(&self) -> usize {
        self.ground.len()
    }

    /// Labels of the elements of `x`.
    pub fn labels_of(&self, x: Mask) -> Vec<String> {
        x.elements()
            .map(|i| self.ground.labels()[i].clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Instance> {
        Instance::from_file(&InstanceFile::from_json(text)?)
    }

    #[test]
    fn minimal_instance() {
        let inst = parse(
            r#"{"n":2,"function":{"kind":"cut","directed":false,"edges":[[0,1,1]]},
                "constraint":{"kind":"none"},"k":0}"#,
        )
        .unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.k, 0);
        assert_eq!(inst.function.evaluate(Mask::singleton(0)), 1);
        assert_eq!(inst.value_bound, 1);
    }

    #[test]
    fn rings_set_the_bound() {
        let inst = parse(
            r#"{"n":3,"function":{"kind":"cut","edges":[[0,1,1],[1,2,1],[0,2,1]]},
                "constraint":{"kind":"complement_of_rings","rings":[
                    {"forced_in":[],"allowed":[]},
                    {"forced_in":[0,1,2]}]},
                "k":2}"#,
        )
        .unwrap();
        assert_eq!(inst.constraint.hierarchy_bound(), 2);
        assert!(!inst.constraint.feasible(Mask::EMPTY));
        assert!(!inst.constraint.feasible(Mask::full(3)));
        assert!(inst.constraint.feasible(Mask::singleton(1)));
    }

    #[test]
    fn table_and_labels() {
        let inst = parse(
            r#"{"ground_set":["a","b","c"],
                "function":{"kind":"table","values":[0,1,1,2,1,2,2,3]}}"#,
        )
        .unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.function.evaluate(Mask::full(3)), 3);
        assert_eq!(inst.labels_of(Mask::from_elements([0, 2])), vec!["a", "c"]);
    }

    #[test]
    fn rejections() {
        let bad = [
            r#"{"n":65,"function":{"kind":"cut","edges":[]}}"#,
            r#"{"n":2,"function":{"kind":"cut","edges":[[0,2,1]]}}"#,
            r#"{"n":2,"function":{"kind":"cut","edges":[[0,1,-1]]}}"#,
            r#"{"n":2,"function":{"kind":"table","values":[0,1,2]}}"#,
            r#"{"n":2,"function":{"kind":"cut","edges":[]},
                "constraint":{"kind":"complement_of_rings","rings":[{"forced_in":[0],"allowed":[1]}]}}"#,
            r#"{"n":2,"function":{"kind":"cut","edges":[]},"constraint":{"kind":"none"},"k":1}"#,
            r#"{"n":2,"function":{"kind":"cut","edges":[]},"constraint":{"kind":"mystery"}}"#,
            r#"{"n":2,"function":{"kind":"cut","edges":[]},"extra":1}"#,
            r#"{"schema":"other/9","n":2,"function":{"kind":"cut","edges":[]}}"#,
            r#"{"function":{"kind":"cut","edges":[]}}"#,
            r#"{"n":2,"function":{"kind":"cut","edges":[]},
                "constraint":{"kind":"explicit","parts":[[[0]],[[0],[1]]]}}"#,
        ];
        for text in bad {
            assert!(parse(text).is_err(), "accepted {text}");
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = InstanceFile::from_json("{\n  \"n\": 2,\n  \"function\": 7\n}").unwrap_err();
        let Error::Parse(msg) = err else {
            panic!("expected a parse error")
        };
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn round_trip_and_digest() {
        let text = r#"{"n":3,"function":{"kind":"modular_shift",
            "base":{"kind":"coverage","universe_weights":[2,3],"incidence":[[0],[1],[0,1]]},
            "weights":[-1,0,2]},
            "constraint":{"kind":"complement_of_crossing","members":[[0,1],[1,2]]},
            "k":2,"value_bound":8,"seed":4}"#;
        let file = InstanceFile::from_json(text).unwrap();
        let again = InstanceFile::from_json(&file.to_json()).unwrap();
        assert_eq!(file, again);
        assert_eq!(file.digest(), again.digest());
        assert_eq!(file.digest().len(), 64);
        let inst = Instance::from_file(&file).unwrap();
        assert_eq!(inst.value_bound, 8);
        assert_eq!(inst.seed, Some(4));
    }
}
