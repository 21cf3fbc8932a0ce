//! JSON and CSV file formats.

use std::fs;
use std::io::Write;
use std::path::Path;

use quadmorph_core::birrt::BirrtResult;
use quadmorph_core::oracle::Classification;
use quadmorph_core::plan::{HopPlan, Plan, PlanReport};
use quadmorph_core::validate::{ActionStep, StepKind};
use quadmorph_core::{Configuration, Dir, Edge, ModuleId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid configuration: {0}")]
    Configuration(quadmorph_core::Error),
    #[error("invalid step: {0}")]
    Step(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub id: ModuleId,
    pub cell: [i32; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub modules: Vec<ModuleJson>,
}

impl From<&Configuration> for ConfigJson {
    fn from(c: &Configuration) -> Self {
        let modules = (0..c.n()).map(|i| ModuleJson { id: c.id(i), cell: [c.cell(i).0, c.cell(i).1] }).collect();
        ConfigJson { modules }
    }
}

impl TryFrom<&ConfigJson> for Configuration {
    type Error = ParseError;

    fn try_from(j: &ConfigJson) -> Result<Self, ParseError> {
        if j.modules.iter().any(|m| m.id == 0) {
            return Err(ParseError::Configuration(quadmorph_core::Error::InvalidConfiguration("module ids must be positive")));
        }
        Configuration::new(j.modules.iter().map(|m| (m.id, (m.cell[0], m.cell[1])))).map_err(ParseError::Configuration)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub kind: String,
    pub edge: [ModuleId; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<ModuleId>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub compensation: bool,
}

impl StepJson {
    pub fn from_step(s: &ActionStep, c: &Configuration) -> StepJson {
        let e = s.edge;
        let connect = s.kind == StepKind::Connect;
        StepJson {
            kind: if connect { "connect" } else { "disconnect" }.to_string(),
            edge: [c.id(e.u), c.id(e.v)],
            slots: connect.then(|| [e.su.name().to_string(), e.sv.name().to_string()]),
            cycle: s.cycle.as_ref().map(|cy| cy.iter().map(|&m| c.id(m)).collect()),
            compensation: s.compensation,
        }
    }

    pub fn to_step(&self, c: &Configuration) -> Result<ActionStep, ParseError> {
        let idx = |id: ModuleId| c.index_of(id).ok_or_else(|| ParseError::Step(format!("unknown module {id}")));
        let (a, b) = (idx(self.edge[0])?, idx(self.edge[1])?);
        let slot = |s: &str| Dir::from_name(s).ok_or_else(|| ParseError::Step(format!("unknown slot {s}")));
        let step = match self.kind.as_str() {
            "connect" => {
                let [sa, sb] = self.slots.as_ref().ok_or_else(|| ParseError::Step("connect without slots".into()))?;
                let cycle = match &self.cycle {
                    Some(cy) => cy.iter().map(|&id| idx(id)).collect::<Result<Vec<_>, _>>()?,
                    None => return Err(ParseError::Step("connect without cycle".into())),
                };
                ActionStep::connect(Edge::new(a, slot(sa)?, b, slot(sb)?), cycle)
            }
            // a disconnect only names the pair
            "disconnect" => ActionStep::disconnect(Edge::new(a, Dir::Left, b, Dir::Left)),
            other => return Err(ParseError::Step(format!("unknown kind {other}"))),
        };
        Ok(if self.compensation { step.compensating() } else { step })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopJson {
    pub from: ConfigJson,
    pub to: ConfigJson,
    pub s_con: usize,
    pub s_discon: usize,
    pub compensations: usize,
    pub steps: Vec<StepJson>,
}

impl From<&HopPlan> for HopJson {
    fn from(h: &HopPlan) -> Self {
        HopJson {
            from: (&h.from).into(),
            to: (&h.to).into(),
            s_con: h.s_con,
            s_discon: h.s_discon,
            compensations: h.compensations,
            steps: h.steps.iter().map(|s| StepJson::from_step(s, &h.from)).collect(),
        }
    }
}

impl TryFrom<&HopJson> for HopPlan {
    type Error = ParseError;

    fn try_from(j: &HopJson) -> Result<Self, ParseError> {
        let from = Configuration::try_from(&j.from)?;
        let to = Configuration::try_from(&j.to)?;
        let steps = j.steps.iter().map(|s| s.to_step(&from)).collect::<Result<Vec<_>, _>>()?;
        Ok(HopPlan { from, to, steps, s_con: j.s_con, s_discon: j.s_discon, compensations: j.compensations })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanJson {
    pub algorithm: String,
    pub start: ConfigJson,
    pub goal: ConfigJson,
    /// Start module id, goal module id.
    pub assignment: Vec<[ModuleId; 2]>,
    pub steps: usize,
    pub intermediates: usize,
    pub samples: usize,
    pub hops: Vec<HopJson>,
}

impl PlanJson {
    pub fn from_plan(p: &Plan) -> PlanJson {
        PlanJson {
            algorithm: "planner".into(),
            start: (&p.start).into(),
            goal: (&p.goal).into(),
            assignment: p.assignment.iter().map(|&(a, b)| [a, b]).collect(),
            steps: p.step_count(),
            intermediates: p.hops.len().saturating_sub(1),
            samples: p.samples,
            hops: p.hops.iter().map(HopJson::from).collect(),
        }
    }

    pub fn from_birrt(start: &Configuration, goal: &Configuration, r: &BirrtResult) -> PlanJson {
        PlanJson {
            algorithm: "birrt".into(),
            start: start.into(),
            goal: goal.into(),
            assignment: r.assignment.iter().map(|&(a, b)| [a, b]).collect(),
            steps: r.hops.iter().map(|h| h.steps.len()).sum(),
            intermediates: r.states.len().saturating_sub(2),
            samples: r.iterations,
            hops: r.hops.iter().map(HopJson::from).collect(),
        }
    }

    pub fn hops(&self) -> Result<Vec<HopPlan>, ParseError> {
        self.hops.iter().map(HopPlan::try_from).collect()
    }

    pub fn assignment(&self) -> Vec<(ModuleId, ModuleId)> {
        self.assignment.iter().map(|&[a, b]| (a, b)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepVerdict {
    pub index: usize,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loop_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub ok: bool,
    pub failing_hop: Option<usize>,
    pub failing_step: Option<usize>,
    pub reason: Option<String>,
    pub steps: Vec<StepVerdict>,
}

impl From<&PlanReport> for ReportJson {
    fn from(r: &PlanReport) -> Self {
        ReportJson {
            ok: r.ok,
            failing_hop: r.failing_hop,
            failing_step: r.failing_step,
            reason: r.reason.map(|f| f.name().to_string()),
            steps: r
                .checks
                .iter()
                .map(|c| StepVerdict { index: c.index, ok: c.ok, loop_len: c.loop_len, reason: c.reason.map(|f| f.name().to_string()) })
                .collect(),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ParseError> {
    let text = fs::read_to_string(path).map_err(|source| ParseError::Io { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_config(path: &Path) -> Result<Configuration, ParseError> {
    Configuration::try_from(&read_json::<ConfigJson>(path)?)
}

#[derive(Debug, Serialize)]
struct ClassRecord {
    n: usize,
    canonical_form: String,
    #[serde(rename = "S")]
    s: usize,
    component_id: usize,
}

/// Rows `n,canonical_form,S,component_id`, one per free shape.
pub fn write_classes<W: Write>(c: &Classification, w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in &c.rows {
        out.serialize(ClassRecord { n: c.n, canonical_form: r.shape.code(), s: r.s, component_id: r.component })?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configuration_round_trip() {
        let text = r#"{"modules":[{"id":1,"cell":[0,0]},{"id":7,"cell":[1,0]}]}"#;
        let j: ConfigJson = serde_json::from_str(text).unwrap();
        let c = Configuration::try_from(&j).unwrap();
        assert_eq!(c.ids(), &[1, 7]);
        assert_eq!(serde_json::to_string(&ConfigJson::from(&c)).unwrap(), text);
    }

    #[test]
    fn zero_and_duplicate_ids_are_rejected() {
        let zero: ConfigJson = serde_json::from_str(r#"{"modules":[{"id":0,"cell":[0,0]}]}"#).unwrap();
        assert!(Configuration::try_from(&zero).is_err());
        let dup: ConfigJson = serde_json::from_str(r#"{"modules":[{"id":1,"cell":[0,0]},{"id":1,"cell":[1,0]}]}"#).unwrap();
        assert!(Configuration::try_from(&dup).is_err());
    }

    #[test]
    fn step_json_shape() {
        let c = Configuration::from_cells(&[(0, 0), (1, 0), (1, 1)]).unwrap();
        let s = ActionStep::connect(Edge::new(0, Dir::Top, 2, Dir::Right), vec![0, 1, 2]);
        let j = StepJson::from_step(&s, &c);
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            r#"{"kind":"connect","edge":[1,3],"slots":["Top","Right"],"cycle":[1,2,3]}"#
        );
        assert_eq!(j.to_step(&c).unwrap(), s);
        let d = StepJson::from_step(&ActionStep::disconnect(c.graph().edge(0, 1).unwrap()), &c);
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"kind":"disconnect","edge":[1,2]}"#);
    }
}
