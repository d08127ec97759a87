//! Flat key-value experiment plan files.
//!
//! One `key = value` per line, `#` comments, comma-separated lists. The
//! `kind` key selects the experiment family; scenario keys accept lists
//! and expand to their cross product.

use std::collections::BTreeMap;
use std::path::Path;

use flrm_core::dgp::{DgpSpec, ErrorMode, SpectrumConvention};
use flrm_core::flrm::TuningChoice;
use flrm_core::harness::{
    BiasPlan, CltPlan, ExperimentPlan, Method, PowerPlan, ScenarioSpec, TuningPolicy,
};
use flrm_core::hypothesis::StatisticKind;

use crate::errors::{CliError, CliResult};

#[derive(Debug)]
pub enum Plan {
    Coverage(ExperimentPlan),
    Bias(BiasPlan),
    Power(PowerPlan),
    Clt(CltPlan),
}

pub fn load_plan(path: &Path, seed_override: Option<u64>) -> CliResult<Plan> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    parse_plan(&text, seed_override).map_err(|e| {
        CliError::data(format!("{}: {}", path.display(), e.message))
    })
}

struct Keys {
    map: BTreeMap<String, String>,
}

impl Keys {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn req(&self, key: &str) -> CliResult<&str> {
        self.get(key)
            .ok_or_else(|| CliError::data(format!("missing required key '{key}'")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::data(format!("bad value '{v}' for '{key}'"))),
        }
    }

    fn parse_req<T: std::str::FromStr>(&self, key: &str) -> CliResult<T> {
        let v = self.req(key)?;
        v.parse()
            .map_err(|_| CliError::data(format!("bad value '{v}' for '{key}'")))
    }

    fn list<T: std::str::FromStr>(&self, key: &str, default: Vec<T>) -> CliResult<Vec<T>> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .map_err(|_| CliError::data(format!("bad list item '{s}' for '{key}'")))
                })
                .collect(),
        }
    }
}

fn parse_keys(text: &str) -> CliResult<Keys> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::data(format!("line {}: expected 'key = value'", idx + 1))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(Keys { map })
}

fn parse_nu(s: &str) -> CliResult<Option<f64>> {
    match s {
        "inf" | "infinity" | "gaussian" => Ok(None),
        other => other
            .parse::<f64>()
            .map(Some)
            .map_err(|_| CliError::data(format!("bad degrees of freedom '{other}'"))),
    }
}

fn parse_error_mode(s: &str) -> CliResult<ErrorMode> {
    match s {
        "homoscedastic" => Ok(ErrorMode::HomoscedasticChiSq),
        "heteroscedastic" => Ok(ErrorMode::HeteroscedasticChiSq),
        "none" => Ok(ErrorMode::None),
        other => Err(CliError::data(format!("unknown error mode '{other}'"))),
    }
}

fn base_dgp(keys: &Keys) -> CliResult<DgpSpec> {
    let spectrum = match keys.get("spectrum").unwrap_or("gap_faithful") {
        "gap_faithful" => SpectrumConvention::GapFaithful,
        "literal_gamma1" => SpectrumConvention::LiteralGammaOne,
        other => return Err(CliError::data(format!("unknown spectrum convention '{other}'"))),
    };
    Ok(DgpSpec {
        n: keys.parse("n", 100usize)?,
        j_basis: keys.parse("j", 15usize)?,
        a: keys.parse("a", 2.5f64)?,
        b: keys.parse("b", 5.5f64)?,
        slope_scale: keys.parse("slope_scale", 3.0f64)?,
        nu: parse_nu(keys.get("nu").unwrap_or("inf"))?,
        error_mode: parse_error_mode(keys.get("error_mode").unwrap_or("homoscedastic"))?,
        grid_size: keys.parse("grid", 100usize)?,
        standardize_xi: keys.parse("standardize_xi", true)?,
        slope_signs_seed: keys.parse("signs_seed", 1u64)?,
        hypothesis_p: None,
        spectrum,
    })
}

fn scenarios(keys: &Keys) -> CliResult<Vec<ScenarioSpec>> {
    let base = base_dgp(keys)?;
    let n_list: Vec<usize> = keys.list("n", vec![base.n])?;
    let a_list: Vec<f64> = keys.list("a", vec![base.a])?;
    let b_list: Vec<f64> = keys.list("b", vec![base.b])?;
    let nu_list: Vec<Option<f64>> = match keys.get("nu") {
        None => vec![base.nu],
        Some(v) => v
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(parse_nu)
            .collect::<CliResult<Vec<_>>>()?,
    };
    let mode_list: Vec<ErrorMode> = match keys.get("error_mode") {
        None => vec![base.error_mode],
        Some(v) => v
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(parse_error_mode)
            .collect::<CliResult<Vec<_>>>()?,
    };
    let mut out = Vec::new();
    for &n in &n_list {
        for &a in &a_list {
            for &b in &b_list {
                for &nu in &nu_list {
                    for &error_mode in &mode_list {
                        let dgp = DgpSpec {
                            n,
                            a,
                            b,
                            nu,
                            error_mode,
                            ..base.clone()
                        };
                        let nu_label = nu.map_or("inf".to_string(), |v| format!("{v}"));
                        out.push(ScenarioSpec {
                            label: format!(
                                "n{n}_a{a}_b{b}_nu{nu_label}_{}",
                                error_mode.as_str()
                            ),
                            dgp,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn tuning_policy(keys: &Keys) -> CliResult<TuningPolicy> {
    match keys.get("tuning").unwrap_or("rule_of_thumb") {
        "rule_of_thumb" => Ok(TuningPolicy::RuleOfThumb {
            fixed_k: match keys.get("k") {
                None => None,
                Some(v) => Some(v.parse().map_err(|_| {
                    CliError::data(format!("bad value '{v}' for 'k'"))
                })?),
            },
        }),
        "explicit" => {
            let k: usize = keys.parse_req("k")?;
            let g: usize = keys.parse_req("g")?;
            let h_list: Vec<usize> = keys.list("h_list", vec![])?;
            let h_list = if h_list.is_empty() {
                vec![keys.parse_req::<usize>("h")?]
            } else {
                h_list
            };
            Ok(TuningPolicy::Explicit(
                h_list.into_iter().map(|h| TuningChoice::new(k, h, g)).collect(),
            ))
        }
        other => Err(CliError::data(format!("unknown tuning policy '{other}'"))),
    }
}

pub fn parse_plan(text: &str, seed_override: Option<u64>) -> CliResult<Plan> {
    let keys = parse_keys(text)?;
    let seed = match seed_override {
        Some(s) => s,
        None => keys.parse("seed", 0u64)?,
    };
    let reps: usize = keys.parse("reps", 500usize)?;
    let b_boot: usize = keys.parse("bootstrap", 500usize)?;
    let level: f64 = keys.parse("level", 0.95f64)?;
    match keys.req("kind")? {
        "coverage" => {
            let methods = keys
                .list::<String>("methods", vec!["pb_std".into(), "rb".into()])?
                .iter()
                .map(|s| {
                    Method::parse(s).ok_or_else(|| CliError::data(format!("unknown method '{s}'")))
                })
                .collect::<CliResult<Vec<Method>>>()?;
            Ok(Plan::Coverage(ExperimentPlan {
                scenarios: scenarios(&keys)?,
                methods,
                tuning: tuning_policy(&keys)?,
                reps,
                b_boot,
                level,
                master_seed: seed,
            }))
        }
        "bias" => {
            let g: usize = keys.parse_req("g")?;
            let k: usize = keys.parse("k", g)?;
            let h_list: Vec<usize> = keys.list("h_list", vec![])?;
            if h_list.is_empty() {
                return Err(CliError::data("bias plan needs 'h_list'"));
            }
            Ok(Plan::Bias(BiasPlan {
                dgp: base_dgp(&keys)?,
                tunings: h_list.into_iter().map(|h| TuningChoice::new(k, h, g)).collect(),
                reps,
                master_seed: seed,
            }))
        }
        "power" => {
            let statistic = match keys.get("statistic").unwrap_or("max") {
                "max" => StatisticKind::Max,
                "l2" => StatisticKind::L2,
                other => return Err(CliError::data(format!("unknown statistic '{other}'"))),
            };
            let enforce: Vec<bool> = keys.list("enforce", vec![true])?;
            Ok(Plan::Power(PowerPlan {
                dgp: base_dgp(&keys)?,
                p_grid: keys.list("p_list", vec![0.0, 0.5, 1.0])?,
                enforce,
                statistic,
                tuning: tuning_policy(&keys)?,
                reps,
                b_boot,
                level: keys.parse("test_level", 0.05f64)?,
                master_seed: seed,
            }))
        }
        "clt" => Ok(Plan::Clt(CltPlan {
            scenarios: scenarios(&keys)?,
            tuning: tuning_policy(&keys)?,
            reps,
            master_seed: seed,
        })),
        other => Err(CliError::data(format!("unknown experiment kind '{other}'"))),
    }
}
