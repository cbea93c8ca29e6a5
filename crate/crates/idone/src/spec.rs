//! Experiment description, read from a flat TOML file.
//!
//! | key                | meaning                                              | default             |
//! |--------------------|------------------------------------------------------|---------------------|
//! | `problem`          | `convex-binary`, `tsp` or `tsp4`                     | required            |
//! | `d`                | dimension of `convex-binary`                         | required for it     |
//! | `instance`         | TSPLIB file for `tsp`, relative to the spec file     | required for it     |
//! | `solvers`          | any of `idone-basic`, `idone-advanced`, `rs`, `sa`   | all four            |
//! | `replications`     | number of seeds                                      | 1                   |
//! | `base_seed`        | replication `r` uses seed `base_seed + r`            | 0                   |
//! | `budget`           | evaluations per run                                  | required            |
//! | `sa_t0`, `sa_tf`   | annealing schedule                                   | 1, 0.95 (binary); 4.48, 0.996 (routes) |
//! | `lambda`           | regularization of the model fit                      | 0.001               |
//! | `p_explore`        | exploration probability per coordinate               | `1 / d`             |
//! | `max_model_iters`  | iteration cap of the model minimizer                 | `20 * d`            |
//! | `noise`            | add measurement noise                                | true                |
//! | `noise_high`       | upper end of the per-edge route noise                | 1.0 (`tsp`), 0 (`tsp4`) |
//! | `tsp_replications` | noisy replays per route evaluation                   | 100 (`tsp`), 1 (`tsp4`) |
//! | `timing`           | record wall-clock time per iteration                 | false               |
//!
//! With `timing = false` every `time_ms` is written as 0 so that repeated runs
//! produce identical files.

use std::fs;
use std::path::{Path, PathBuf};

use idone_core::fitting::DEFAULT_LAMBDA;
use idone_core::solver::{BINARY_SA_T0, BINARY_SA_TF, TSP_SA_T0, TSP_SA_TF};
use idone_core::SolverKind;
use serde::Deserialize;

use crate::error::{HarnessError, IoContext, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    ConvexBinary,
    Tsp,
    Tsp4,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::ConvexBinary,
        ProblemKind::Tsp,
        ProblemKind::Tsp4,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ProblemKind::ConvexBinary => "convex-binary",
            ProblemKind::Tsp => "tsp",
            ProblemKind::Tsp4 => "tsp4",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ProblemKind::ConvexBinary => {
                "noisy convex quadratic over {0,1}^d; a fresh instance per replication (needs `d`)"
            }
            ProblemKind::Tsp => {
                "worst case over noisy replays of an asymmetric route from a TSPLIB file (needs `instance`)"
            }
            ProblemKind::Tsp4 => "the 4-city route example, 2 variables, noiseless by default",
        }
    }

    fn is_route(self) -> bool {
        !matches!(self, ProblemKind::ConvexBinary)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub problem: ProblemKind,
    pub d: Option<usize>,
    pub instance: Option<PathBuf>,
    #[serde(default = "all_solvers")]
    pub solvers: Vec<String>,
    #[serde(default = "one")]
    pub replications: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub budget: usize,
    pub sa_t0: Option<f64>,
    pub sa_tf: Option<f64>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    pub p_explore: Option<f64>,
    pub max_model_iters: Option<usize>,
    #[serde(default = "yes")]
    pub noise: bool,
    pub noise_high: Option<f64>,
    pub tsp_replications: Option<usize>,
    #[serde(default)]
    pub timing: bool,
}

fn all_solvers() -> Vec<String> {
    SolverKind::ALL.iter().map(|k| k.id().to_string()).collect()
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn default_lambda() -> f64 {
    DEFAULT_LAMBDA
}

impl ExperimentSpec {
    /// Parses and validates; a relative `instance` is resolved against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut spec: ExperimentSpec = toml::from_str(text)?;
        if let Some(path) = &spec.instance {
            if path.is_relative() {
                spec.instance = Some(base_dir.join(path));
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).at(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Spec(m));
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.budget == 0 {
            return bad("budget must be at least 1".into());
        }
        if self.solvers.is_empty() {
            return bad("solvers must not be empty".into());
        }
        self.solver_kinds()?;
        match self.problem {
            ProblemKind::ConvexBinary => match self.d {
                Some(d) if d >= 1 => {}
                _ => return bad("convex-binary needs `d` >= 1".into()),
            },
            ProblemKind::Tsp => {
                if self.instance.is_none() {
                    return bad("tsp needs `instance`".into());
                }
            }
            ProblemKind::Tsp4 => {}
        }
        if self.problem.is_route() && self.d.is_some() {
            return bad(format!("`d` does not apply to {}", self.problem.id()));
        }
        if !self.problem.is_route()
            && (self.noise_high.is_some() || self.tsp_replications.is_some())
        {
            return bad("`noise_high` and `tsp_replications` only apply to routes".into());
        }
        if let Some(v) = self.noise_high {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!(
                    "noise_high must be finite and non-negative, got {v}"
                ));
            }
        }
        let (t0, tf) = self.sa_schedule();
        if !(t0 > 0.0) || !(tf > 0.0 && tf < 1.0) {
            return bad(format!(
                "annealing needs sa_t0 > 0 and 0 < sa_tf < 1, got {t0}, {tf}"
            ));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if let Some(p) = self.p_explore {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("p_explore must lie in [0, 1], got {p}"));
            }
        }
        Ok(())
    }

    pub fn solver_kinds(&self) -> Result<Vec<SolverKind>> {
        let mut kinds = Vec::with_capacity(self.solvers.len());
        for id in &self.solvers {
            let kind = SolverKind::from_id(id).ok_or_else(|| {
                HarnessError::Spec(format!(
                    "unknown solver {id:?}; expected one of {}",
                    all_solvers().join(", ")
                ))
            })?;
            if kinds.contains(&kind) {
                return Err(HarnessError::Spec(format!("solver {id:?} listed twice")));
            }
            kinds.push(kind);
        }
        Ok(kinds)
    }

    pub fn sa_schedule(&self) -> (f64, f64) {
        let (t0, tf) = if self.problem.is_route() {
            (TSP_SA_T0, TSP_SA_TF)
        } else {
            (BINARY_SA_T0, BINARY_SA_TF)
        };
        (self.sa_t0.unwrap_or(t0), self.sa_tf.unwrap_or(tf))
    }

    /// Upper end of the per-edge route noise, after `noise = false`.
    pub fn route_noise_high(&self) -> f64 {
        if !self.noise {
            return 0.0;
        }
        self.noise_high.unwrap_or(match self.problem {
            ProblemKind::Tsp4 => 0.0,
            _ => idone_core::problems::tsp::DEFAULT_NOISE_HIGH,
        })
    }

    pub fn route_replications(&self) -> usize {
        self.tsp_replications.unwrap_or(match self.problem {
            ProblemKind::Tsp4 => 1,
            _ => idone_core::problems::tsp::DEFAULT_REPLICATIONS,
        })
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.replications as u64).map(move |r| self.base_seed + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentSpec> {
        ExperimentSpec::from_toml(text, Path::new("/specs"))
    }

    #[test]
    fn defaults() {
        let s = parse("problem = \"convex-binary\"\nd = 10\nbudget = 50\n").unwrap();
        assert_eq!(s.solvers, vec!["idone-advanced", "idone-basic", "rs", "sa"]);
        assert_eq!(s.replications, 1);
        assert_eq!(s.sa_schedule(), (1.0, 0.95));
        assert!(s.noise && !s.timing);
        assert_eq!(s.seeds().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn route_defaults_and_paths() {
        let s = parse("problem = \"tsp\"\ninstance = \"br17.atsp\"\nbudget = 5\nbase_seed = 3\nreplications = 2\n").unwrap();
        assert_eq!(s.instance.as_deref(), Some(Path::new("/specs/br17.atsp")));
        assert_eq!(s.sa_schedule(), (4.48, 0.996));
        assert_eq!((s.route_noise_high(), s.route_replications()), (1.0, 100));
        assert_eq!(s.seeds().collect::<Vec<_>>(), vec![3, 4]);
        let s = parse("problem = \"tsp4\"\nbudget = 5\n").unwrap();
        assert_eq!((s.route_noise_high(), s.route_replications()), (0.0, 1));
    }

    #[test]
    fn rejects_bad_specs() {
        for text in [
            "problem = \"convex-binary\"\nbudget = 5\n",
            "problem = \"tsp\"\nbudget = 5\n",
            "problem = \"tsp4\"\nbudget = 0\n",
            "problem = \"tsp4\"\nbudget = 5\nreplications = 0\n",
            "problem = \"tsp4\"\nbudget = 5\nsolvers = [\"bo\"]\n",
            "problem = \"tsp4\"\nbudget = 5\nsolvers = [\"rs\", \"rs\"]\n",
            "problem = \"tsp4\"\nbudget = 5\nsa_tf = 1.5\n",
            "problem = \"tsp4\"\nbudget = 5\nbogus = 1\n",
            "problem = \"knapsack\"\nbudget = 5\n",
        ] {
            assert!(parse(text).is_err(), "{text}");
        }
    }
}
