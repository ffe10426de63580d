//! Named flows the campaigns run on.

use std::f64::consts::{PI, TAU};

use braidflow::geometry::{BlendEntry, HamiltonianSpec, Preset, RadialBump, Surface};
use braidflow::{Isotopy64, RadialBump64, Surface64};
use serde::Serialize;

use crate::HarnessError;

pub const SCENARIO_NAMES: [&str; 12] = [
    "identity",
    "rotation",
    "twist",
    "offcenter",
    "wide",
    "blend",
    "torus-wave",
    "torus-bump",
    "sphere-rotation",
    "sphere-bump",
    "calabi-trio",
    "zk3",
];

/// Single-flow scenarios on the disc, swept by the Lipschitz check.
pub const DISC_FLOWS: [&str; 6] = ["identity", "rotation", "twist", "offcenter", "wide", "blend"];

#[derive(Clone, Debug, PartialEq)]
pub struct Flow {
    pub label: String,
    pub spec: HamiltonianSpec<f64>,
    pub duration: f64,
    /// Set when the flow is a single radial twist.
    pub bump: Option<RadialBump64>,
}

impl Flow {
    fn bump(label: &str, surface: &Surface64, chart: [f64; 2], r_in: f64, r_out: f64, amp: f64) -> Self {
        let b = RadialBump::new(&surface.point_from_chart(chart), r_in, r_out, amp);
        Flow { label: label.into(), spec: HamiltonianSpec::RadialBump(b), duration: 1.0, bump: Some(b) }
    }

    fn preset(label: &str, p: Preset, duration: f64) -> Self {
        Flow { label: label.into(), spec: HamiltonianSpec::Preset(p), duration, bump: None }
    }

    pub fn isotopy(&self, surface: Surface64, steps_per_unit: usize) -> Isotopy64 {
        let steps = ((self.duration * steps_per_unit as f64).round() as usize).max(1);
        Isotopy64::new(surface, self.spec.clone(), 0.0, self.duration, steps).expect("positive duration")
    }

    /// Twist centre in the plane, for bumps on the disc.
    pub fn planar_center(&self) -> Option<[f64; 2]> {
        self.bump.map(|b| [b.center[0], b.center[1]])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub surface: Surface64,
    pub flows: Vec<Flow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioEcho {
    pub name: String,
    pub description: String,
    pub surface: String,
    pub flows: Vec<String>,
}

impl Scenario {
    pub fn echo(&self) -> ScenarioEcho {
        ScenarioEcho {
            name: self.name.clone(),
            description: self.description.clone(),
            surface: surface_name(&self.surface),
            flows: self.flows.iter().map(|f| f.label.clone()).collect(),
        }
    }

    pub fn is_disc(&self) -> bool {
        self.surface == Surface::UnitDisc
    }

    /// The one flow of a single-flow scenario.
    pub fn single(&self) -> Result<&Flow, HarnessError> {
        match self.flows.as_slice() {
            [f] => Ok(f),
            _ => Err(HarnessError::Config(format!("scenario `{}` is a family; this subcommand needs a single flow", self.name))),
        }
    }

    pub fn require_disc(&self) -> Result<(), HarnessError> {
        if self.is_disc() {
            Ok(())
        } else {
            Err(HarnessError::Config(format!("scenario `{}` is not on the disc; braid averages need the disc", self.name)))
        }
    }
}

pub fn surface_name(s: &Surface64) -> String {
    match s {
        Surface::UnitDisc => "unit-disc".into(),
        Surface::FlatTorus { sides } => format!("flat-torus({}x{})", sides[0], sides[1]),
        Surface::RoundSphere { radius } => format!("round-sphere({radius})"),
    }
}

fn twist(s: &Surface64) -> Flow {
    Flow::bump("twist", s, [0.0, 0.0], 0.5, 0.7, TAU)
}

fn offcenter(s: &Surface64) -> Flow {
    Flow::bump("offcenter", s, [0.2, 0.1], 0.3, 0.6, 2.0 * TAU)
}

fn wide(s: &Surface64) -> Flow {
    Flow::bump("wide", s, [0.0, 0.0], 0.3, 0.9, TAU)
}

pub fn lookup(name: &str) -> Result<Scenario, HarnessError> {
    let disc = Surface::UnitDisc;
    let torus = Surface::flat_torus(1.0, 1.5);
    let sphere = Surface::round_sphere(1.0);
    let (description, surface, flows): (&str, Surface64, Vec<Flow>) = match name {
        "identity" => ("constant isotopy of the disc", disc, vec![Flow::preset("identity", Preset::Zero, 1.0)]),
        "rotation" => ("rigid rotation of the disc by one radian", disc, vec![Flow::preset("rotation", Preset::DiscRotation, 1.0)]),
        "twist" => ("one full turn inside radius 0.5, fading out by 0.7", disc, vec![twist(&disc)]),
        "offcenter" => ("two turns about (0.2, 0.1) inside radius 0.3, fading out by 0.6", disc, vec![offcenter(&disc)]),
        "wide" => ("one full turn inside radius 0.3, fading out by 0.9", disc, vec![wide(&disc)]),
        "blend" => {
            let entries = vec![
                BlendEntry { spec: twist(&disc).spec, start: 0.0, end: 0.5, weight: 1.0 },
                BlendEntry { spec: offcenter(&disc).spec, start: 0.5, end: 1.0, weight: -1.0 },
            ];
            let f = Flow { label: "blend".into(), spec: HamiltonianSpec::TimeDependentBlend(entries), duration: 1.0, bump: None };
            ("twist for half a unit, then the reversed off-centre twist", disc, vec![f])
        }
        "torus-wave" => ("shear of the flat torus", torus, vec![Flow::preset("torus-wave", Preset::TorusWave, 1.0)]),
        "torus-bump" => ("one full turn in a small ball on the flat torus", torus, vec![Flow::bump("torus-bump", &torus, [0.5, 0.75], 0.2, 0.4, TAU)]),
        "sphere-rotation" => ("rotation of the unit sphere by one radian", sphere, vec![Flow::preset("sphere-rotation", Preset::SphereRotation, 1.0)]),
        "sphere-bump" => ("one full turn about the north pole", sphere, vec![Flow::bump("sphere-bump", &sphere, [0.0, 1.0], 0.4, 0.8, TAU)]),
        "calabi-trio" => ("three twists of different shape", disc, vec![twist(&disc), offcenter(&disc), wide(&disc)]),
        "zk3" => {
            let flows = (0..3)
                .map(|i| {
                    let a = TAU * i as f64 / 3.0 + PI / 6.0;
                    Flow::bump(&format!("zk{}", i + 1), &disc, [0.55 * a.cos(), 0.55 * a.sin()], 0.15, 0.25, TAU)
                })
                .collect();
            ("three commuting twists with disjoint supports", disc, flows)
        }
        other => {
            return Err(HarnessError::Config(format!(
                "unknown scenario `{other}` (known: {})",
                SCENARIO_NAMES.join(", ")
            )))
        }
    };
    Ok(Scenario { name: name.into(), description: description.into(), surface, flows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for n in SCENARIO_NAMES {
            let s = lookup(n).unwrap();
            assert!(!s.flows.is_empty());
        }
        assert!(lookup("nope").is_err());
    }

    #[test]
    fn zk_supports_are_disjoint_and_inside() {
        let s = lookup("zk3").unwrap();
        let c: Vec<[f64; 2]> = s.flows.iter().map(|f| f.planar_center().unwrap()).collect();
        for (i, a) in c.iter().enumerate() {
            assert!(a[0].hypot(a[1]) + 0.25 < 1.0);
            for b in &c[i + 1..] {
                assert!((a[0] - b[0]).hypot(a[1] - b[1]) > 0.5);
            }
        }
    }
}
