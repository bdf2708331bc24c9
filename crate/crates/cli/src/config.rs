//! Experiment config file: a sectioned TOML document.
//!
//! Unknown keys are rejected with the offending name. Section seeds default
//! to deterministic offsets of the top-level seed, so one `seed` line pins an
//! entire experiment; the summary written by `run` echoes the full config and
//! re-parses to an equal value.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use allocnet::graph::{assign_weights, generate, GraphModel, GraphModelSpec, WeightedGraph};
use allocnet::maps::NonlinearMap;
use allocnet::objective::{
    sample_quad_logexp, sample_quadratics, BoxBounds, LocalObjective, ParamRanges,
};
use allocnet::sim::{DropMode, DropSchedule, RunConfig};

use crate::error::{single_line, CliError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub graph: GraphSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsSection>,
    pub objectives: ObjectivesSection,
    #[serde(default, skip_serializing_if = "MapsSection::is_default")]
    pub maps: MapsSection,
    pub dynamics: DynamicsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drops: Option<DropsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    /// `er`, `sw`, `sf`, `grid`, or `file`.
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    /// Edge-list path for `model = "file"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub low: f64,
    pub high: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectivesSection {
    /// `quadratic` or `quad-logexp`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_range: Option<[f64; 2]>,
    /// Box `[m, M]`, also used by the feasible initialisation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_bounds: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct MapsSection {
    #[serde(default)]
    pub g_n: MapSpec,
    #[serde(default)]
    pub g_l: MapSpec,
}

impl MapsSection {
    fn is_default(&self) -> bool {
        *self == MapsSection::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    /// `identity`, `cubic`, `signum-power`, `log-quantizer`, `uniform-quantizer`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v2: Option<f64>,
}

impl Default for MapSpec {
    fn default() -> Self {
        MapSpec { kind: "identity".into(), rho: None, v1: None, v2: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    pub eta: f64,
    pub demand: f64,
    pub max_iters: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feas_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DropsSection {
    /// `homogeneous`, `heterogeneous`, or `scheduled`.
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_d: Option<f64>,
    /// Scheduled: the drop-rate list; heterogeneous: one rate per edge in
    /// canonical edge order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSection {
    pub window: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub enabled: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Also write the full state trajectory (`states.csv`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<bool>,
}

fn bad(section: &str, key: &str, reason: impl AsRef<str>) -> CliError {
    CliError::Config(format!("[{section}] {key}: {}", reason.as_ref()))
}

fn require<T: Copy>(opt: Option<T>, section: &str, key: &str, ctx: &str) -> Result<T, CliError> {
    opt.ok_or_else(|| bad(section, key, format!("required for {ctx}")))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(single_line(&e.to_string())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn graph_seed(&self) -> u64 {
        self.graph.seed.unwrap_or(self.seed)
    }

    fn weights_seed(&self) -> u64 {
        self.weights.as_ref().and_then(|w| w.seed).unwrap_or(self.seed.wrapping_add(1))
    }

    fn objectives_seed(&self) -> u64 {
        self.objectives.seed.unwrap_or(self.seed.wrapping_add(2))
    }

    fn drops_seed(&self) -> u64 {
        self.drops.as_ref().and_then(|d| d.seed).unwrap_or(self.seed.wrapping_add(3))
    }

    pub fn build_graph(&self) -> Result<WeightedGraph, CliError> {
        let s = &self.graph;
        let sec = "graph";
        let base = match s.model.as_str() {
            "er" => generate(&GraphModelSpec {
                model: GraphModel::ErdosRenyi {
                    n: require(s.n, sec, "n", "the er model")?,
                    p: require(s.p, sec, "p", "the er model")?,
                },
                seed: self.graph_seed(),
            })?,
            "sw" => generate(&GraphModelSpec {
                model: GraphModel::SmallWorld {
                    n: require(s.n, sec, "n", "the sw model")?,
                    m: require(s.m, sec, "m", "the sw model")?,
                    theta: require(s.theta, sec, "theta", "the sw model")?,
                },
                seed: self.graph_seed(),
            })?,
            "sf" => generate(&GraphModelSpec {
                model: GraphModel::ScaleFree {
                    n: require(s.n, sec, "n", "the sf model")?,
                    sigma: require(s.sigma, sec, "sigma", "the sf model")?,
                    min_degree: require(s.min_degree, sec, "min_degree", "the sf model")?,
                },
                seed: self.graph_seed(),
            })?,
            "grid" => generate(&GraphModelSpec {
                model: GraphModel::SquareGrid {
                    rows: require(s.rows, sec, "rows", "the grid model")?,
                    cols: require(s.cols, sec, "cols", "the grid model")?,
                },
                seed: self.graph_seed(),
            })?,
            "file" => {
                let path = s
                    .path
                    .as_ref()
                    .ok_or_else(|| bad(sec, "path", "required for model = \"file\""))?;
                let text = fs::read_to_string(path)
                    .map_err(|e| bad(sec, "path", format!("{path}: {e}")))?;
                allocnet::graph::io::read_edge_list(text.as_bytes())?
            }
            other => {
                return Err(bad(sec, "model", format!("unknown model `{other}` (er, sw, sf, grid, file)")))
            }
        };
        match &self.weights {
            Some(w) => Ok(assign_weights(&base, w.low, w.high, self.weights_seed())?),
            None => Ok(base),
        }
    }

    pub fn box_bounds(&self) -> Result<Option<BoxBounds>, CliError> {
        match self.objectives.box_bounds {
            Some([lo, hi]) => Ok(Some(
                BoxBounds::new(lo, hi)
                    .map_err(|e| bad("objectives", "box_bounds", e.to_string()))?,
            )),
            None => Ok(None),
        }
    }

    pub fn build_objectives(&self, n: usize) -> Result<Vec<LocalObjective>, CliError> {
        let o = &self.objectives;
        let defaults = ParamRanges::default();
        let pick = |r: Option<[f64; 2]>, d: (f64, f64)| r.map(|[a, b]| (a, b)).unwrap_or(d);
        let ranges = ParamRanges {
            a: pick(o.a_range, defaults.a),
            c: pick(o.c_range, defaults.c),
            l: pick(o.l_range, defaults.l),
            d: pick(o.d_range, defaults.d),
        };
        let boxed = self.box_bounds()?.map(|b| (b, o.gamma.unwrap_or(1.0)));
        let seed = self.objectives_seed();
        let objs = match o.kind.as_str() {
            "quadratic" => sample_quadratics(n, &ranges, boxed, seed),
            "quad-logexp" => sample_quad_logexp(n, &ranges, boxed, seed),
            other => {
                return Err(bad(
                    "objectives",
                    "kind",
                    format!("unknown kind `{other}` (quadratic, quad-logexp)"),
                ))
            }
        };
        objs.map_err(|e| bad("objectives", "a_range", e.to_string()))
    }

    pub fn build_map(spec: &MapSpec, which: &str) -> Result<NonlinearMap, CliError> {
        let need_rho = || {
            spec.rho.ok_or_else(|| bad("maps", &format!("{which}.rho"), "required for quantizers"))
        };
        let map = match spec.kind.as_str() {
            "identity" => NonlinearMap::Identity,
            "cubic" => NonlinearMap::CubicPlusLinear,
            "signum-power" => NonlinearMap::SignumPower {
                v1: spec
                    .v1
                    .ok_or_else(|| bad("maps", &format!("{which}.v1"), "required for signum-power"))?,
                v2: spec
                    .v2
                    .ok_or_else(|| bad("maps", &format!("{which}.v2"), "required for signum-power"))?,
            },
            "log-quantizer" => NonlinearMap::LogQuantizer { rho: need_rho()? },
            "uniform-quantizer" => NonlinearMap::UniformQuantizer { rho: need_rho()? },
            other => {
                return Err(bad(
                    "maps",
                    &format!("{which}.kind"),
                    format!("unknown map `{other}`"),
                ))
            }
        };
        map.validate().map_err(|e| bad("maps", &format!("{which}.kind"), e.to_string()))?;
        Ok(map)
    }

    pub fn build_drops(&self, edge_count: usize) -> Result<DropSchedule, CliError> {
        let sec = "drops";
        let schedule = match &self.drops {
            None => DropSchedule::reliable(),
            Some(d) => {
                let mode = match d.mode.as_str() {
                    "homogeneous" => DropMode::Homogeneous {
                        p_d: require(d.p_d, sec, "p_d", "homogeneous mode")?,
                    },
                    "heterogeneous" => DropMode::Heterogeneous {
                        rates: d
                            .rates
                            .clone()
                            .ok_or_else(|| bad(sec, "rates", "required for heterogeneous mode"))?,
                    },
                    "scheduled" => DropMode::Scheduled {
                        rates: d
                            .rates
                            .clone()
                            .ok_or_else(|| bad(sec, "rates", "required for scheduled mode"))?,
                        period: require(d.period, sec, "period", "scheduled mode")?,
                    },
                    other => {
                        return Err(bad(
                            sec,
                            "mode",
                            format!("unknown mode `{other}` (homogeneous, heterogeneous, scheduled)"),
                        ))
                    }
                };
                DropSchedule { mode, seed: self.drops_seed() }
            }
        };
        schedule
            .validate(edge_count)
            .map_err(|e| bad(sec, "rates", e.to_string()))?;
        Ok(schedule)
    }

    /// Assemble the full simulator configuration.
    pub fn build_run(&self) -> Result<RunConfig, CliError> {
        let graph = self.build_graph()?;
        let n = graph.node_count();
        let objectives = self.build_objectives(n)?;
        let g_n = Self::build_map(&self.maps.g_n, "g_n")?;
        let g_l = Self::build_map(&self.maps.g_l, "g_l")?;
        let drops = self.build_drops(graph.edge_count())?;
        let d = &self.dynamics;
        // Negated form so NaN fails the check as well.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(d.eta > 0.0) {
            return Err(bad("dynamics", "eta", "must be positive"));
        }
        if d.max_iters < 1 {
            return Err(bad("dynamics", "max_iters", "must be at least 1"));
        }

        let init_bounds = self.box_bounds()?.map(|b| vec![b; n]);
        let oracle_tol = match &self.oracle {
            Some(o) if !o.enabled => None,
            Some(o) => Some(o.tol.unwrap_or(1e-10)),
            None => Some(1e-10),
        };

        Ok(RunConfig {
            graph,
            objectives,
            g_n,
            g_l,
            eta: d.eta,
            demand: d.demand,
            init_bounds,
            drops,
            max_iters: d.max_iters,
            feas_tol: d.feas_tol.unwrap_or(1e-9),
            dispersion_tol: d.dispersion_tol.unwrap_or(0.0),
            audit_window: self.audit.as_ref().map(|a| a.window),
            record_states: self.output.as_ref().and_then(|o| o.states).unwrap_or(false),
            oracle_tol,
            seed: self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 7

[graph]
model = "er"
n = 10
p = 0.5

[objectives]
kind = "quadratic"

[dynamics]
eta = 0.001
demand = 50.0
max_iters = 100
"#;

    #[test]
    fn minimal_config_builds() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        let rc = cfg.build_run().unwrap();
        assert_eq!(rc.graph.node_count(), 10);
        assert_eq!(rc.objectives.len(), 10);
        assert_eq!(rc.max_iters, 100);
        assert!(rc.oracle_tol.is_some());
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let text = MINIMAL.replace("[dynamics]", "[dynamics]\nbogus_key = 3");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err.message().contains("bogus_key"), "{}", err.message());
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_model_parameters_name_section_and_key() {
        let text = MINIMAL.replace("p = 0.5\n", "");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        let err = cfg.build_run().unwrap_err();
        assert!(err.message().contains("[graph] p"), "{}", err.message());
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        let echoed = ExperimentConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, echoed);
    }
}
