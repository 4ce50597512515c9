//! Named verification suites with desk-scale default parameters, shared by
//! the command line and the acceptance tests.

use crate::correspondences as corr;
use crate::report::CheckOutcome;
use crate::spaces::SpaceError;
use std::collections::BTreeMap;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("missing parameter `{0}`")]
    MissingParam(&'static str),
    #[error("parameter `{key}` has invalid value `{value}`")]
    BadParam { key: String, value: String },
    #[error("engine error: {0}")]
    Engine(#[from] SpaceError),
}

/// A check outcome together with the wall time of the computation that
/// produced it.
#[derive(Debug, Clone)]
pub struct SuiteItem {
    pub outcome: CheckOutcome,
    pub millis: u128,
}

pub type Params = BTreeMap<String, String>;

fn get_u32(params: &Params, key: &'static str) -> Result<Option<u32>, SuiteError> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<u32>()
            .map(Some)
            .map_err(|_| SuiteError::BadParam { key: key.into(), value: v.clone() }),
    }
}

fn require_u32(params: &Params, key: &'static str) -> Result<u32, SuiteError> {
    get_u32(params, key)?.ok_or(SuiteError::MissingParam(key))
}

fn timed<F>(f: F) -> Result<Vec<SuiteItem>, SuiteError>
where
    F: FnOnce() -> Result<Vec<CheckOutcome>, SpaceError>,
{
    let start = Instant::now();
    let outcomes = f()?;
    let millis = start.elapsed().as_millis();
    Ok(outcomes.into_iter().map(|outcome| SuiteItem { outcome, millis }).collect())
}

/// The names accepted by [`run_suite`], besides the meta-suite `all`.
pub fn suite_names() -> &'static [&'static str] {
    &[
        "projector_orthogonality",
        "cotangent_twist",
        "flip_convolution",
        "virtual_flips",
        "cayley_gamma",
        "blowup_key_formula",
        "blowup_fidelity",
        "projectivization_instance",
        "hom_space",
        "flip_structure",
        "flip_vanishing",
    ]
}

/// Runs one named suite. Unknown keys in `params` are ignored; missing keys
/// fall back to the defaults from the acceptance criteria.
pub fn run_suite(name: &str, params: &Params) -> Result<Vec<SuiteItem>, SuiteError> {
    match name {
        "projector_orthogonality" => {
            let r = require_u32(params, "r")?;
            let m = get_u32(params, "m")?.unwrap_or(0);
            let d = get_u32(params, "d")?.unwrap_or(r + m + 4);
            timed(|| corr::projector_orthogonality(r, m, d))
        }
        "cotangent_twist" => {
            let r = get_u32(params, "r")?.unwrap_or(6);
            timed(|| corr::cotangent_twist(r))
        }
        "flip_convolution" => {
            let n = require_u32(params, "n")?;
            let m = require_u32(params, "m")?;
            let d = get_u32(params, "d")?.unwrap_or(n + m + 2);
            timed(|| corr::flip_convolution(n, m, d))
        }
        "virtual_flips" => {
            let r = require_u32(params, "r")?;
            let i = get_u32(params, "i")?.unwrap_or(0);
            let d = get_u32(params, "d")?.unwrap_or((r + i) + i + 2);
            timed(|| corr::virtual_flip(r, i, d))
        }
        "cayley_gamma" => {
            let r = require_u32(params, "r")?;
            let d = get_u32(params, "d")?.unwrap_or(r + 3);
            timed(|| corr::cayley_gamma(r, d))
        }
        "blowup_key_formula" => match params.get("example") {
            Some(example) => {
                let example = example.clone();
                timed(move || corr::blowup_key_formula(&example))
            }
            None => {
                let mut items = Vec::new();
                for example in ["bl_pt_p2", "bl_pt_p3", "bl_line_p3"] {
                    items.extend(timed(|| corr::blowup_key_formula(example))?);
                }
                Ok(items)
            }
        },
        "blowup_fidelity" => timed(corr::blowup_fidelity),
        "projectivization_instance" => timed(corr::projectivization_instance),
        "hom_space" => match (get_u32(params, "m")?, get_u32(params, "n")?) {
            (Some(m), Some(n)) => timed(|| corr::hom_space(m, n)),
            _ => {
                let mut items = Vec::new();
                for (m, n) in [(1, 2), (2, 3), (2, 4)] {
                    items.extend(timed(|| corr::hom_space(m, n))?);
                }
                Ok(items)
            }
        },
        "flip_structure" => {
            let n = require_u32(params, "n")?;
            let m = require_u32(params, "m")?;
            let d = get_u32(params, "d")?.unwrap_or(n + m + 2);
            timed(|| corr::flip_structure(n, m, d))
        }
        "flip_vanishing" => {
            let n = require_u32(params, "n")?;
            let m = require_u32(params, "m")?;
            let d = get_u32(params, "d")?.unwrap_or(8);
            timed(|| corr::flip_vanishing(n, m, d))
        }
        other => Err(SuiteError::UnknownSuite(other.to_string())),
    }
}

/// The `verify all` plan: every suite at the acceptance-criteria defaults.
pub fn default_plan() -> Vec<(String, Params)> {
    let mut plan = Vec::new();
    let p = |pairs: &[(&str, String)]| -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    };
    for r in 1..=5u32 {
        for m in 0..=3u32 {
            plan.push((
                "projector_orthogonality".to_string(),
                p(&[("r", r.to_string()), ("m", m.to_string())]),
            ));
        }
    }
    plan.push(("cotangent_twist".to_string(), p(&[("r", "6".into())])));
    for n in 0..=4u32 {
        for m in 0..=n {
            plan.push((
                "flip_convolution".to_string(),
                p(&[("n", n.to_string()), ("m", m.to_string())]),
            ));
        }
    }
    for (r, i) in [(1, 0), (1, 1), (2, 0), (2, 1), (3, 0)] {
        plan.push((
            "virtual_flips".to_string(),
            p(&[("r", r.to_string()), ("i", i.to_string())]),
        ));
    }
    for r in 2..=6u32 {
        plan.push(("cayley_gamma".to_string(), p(&[("r", r.to_string())])));
    }
    plan.push(("blowup_fidelity".to_string(), Params::new()));
    plan.push(("projectivization_instance".to_string(), Params::new()));
    plan.push(("hom_space".to_string(), Params::new()));
    for n in 1..=4u32 {
        for m in 0..=n.min(3) {
            plan.push((
                "flip_structure".to_string(),
                p(&[("n", n.to_string()), ("m", m.to_string())]),
            ));
        }
    }
    for (n, m) in [(1, 0), (2, 1), (3, 2)] {
        plan.push((
            "flip_vanishing".to_string(),
            p(&[("n", n.to_string()), ("m", m.to_string())]),
        ));
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(
            run_suite("no_such_suite", &Params::new()),
            Err(SuiteError::UnknownSuite(_))
        ));
    }

    #[test]
    fn missing_required_param() {
        assert!(matches!(
            run_suite("flip_convolution", &Params::new()),
            Err(SuiteError::MissingParam("n"))
        ));
    }

    #[test]
    fn cayley_suite_reports_sign() {
        let mut params = Params::new();
        params.insert("r".into(), "4".into());
        let items = run_suite("cayley_gamma", &params).unwrap();
        assert_eq!(items.len(), 1);
        assert!(items[0].outcome.passed);
        assert_eq!(items[0].outcome.sign, Some(-1));
        assert!(items[0].outcome.flag.is_some());
    }
}
