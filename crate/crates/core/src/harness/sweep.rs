use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duality::{
    check_two_particle_sum, DualityOptions, DualityReport, RelationId, ScenarioAnalysis, Tolerances,
};
use crate::error::{Error, Result};
use crate::random::{substream, substream_key};

use super::sampler::{sample_scenario_with, sample_two_particle_with};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorDim {
    /// `d_D = N`
    MatchN,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub seed: u64,
    /// Scenarios per `(N, d_B)` cell.
    pub count: usize,
    pub n_values: Vec<usize>,
    pub d_b_values: Vec<usize>,
    pub d_d: DetectorDim,
    pub relations: Vec<RelationId>,
    pub tol: Tolerances,
    pub random_povms: usize,
    pub accessible_restarts: usize,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub serial: bool,
    /// Record wall time per row; off keeps output byte-deterministic.
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: 1000,
            n_values: vec![2, 3, 4, 5],
            d_b_values: vec![1, 2, 3, 4],
            d_d: DetectorDim::MatchN,
            relations: RelationId::ALL.to_vec(),
            tol: Tolerances::default(),
            random_povms: 4,
            accessible_restarts: 1,
            jobs: None,
            serial: false,
            timing: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        if self.n_values.is_empty() || self.d_b_values.is_empty() {
            return bad("need at least one N and one d_B".into());
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return bad(format!("N must be at least 2, got {n}"));
        }
        if self.d_b_values.contains(&0) {
            return bad("d_B must be at least 1".into());
        }
        if self.d_d == DetectorDim::Fixed(0) {
            return bad("d_D must be at least 1".into());
        }
        if self.relations.is_empty() {
            return bad("no relations selected".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        Ok(())
    }

    /// `(N, d_B)` per cell, `N` outermost.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        self.n_values
            .iter()
            .flat_map(|&n| self.d_b_values.iter().map(move |&d| (n, d)))
            .collect()
    }

    fn d_d_for(&self, n: usize) -> usize {
        match self.d_d {
            DetectorDim::MatchN => n,
            DetectorDim::Fixed(d) => d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// `seed-cell-index`
    pub scenario_id: String,
    pub seed: u64,
    pub cell: usize,
    pub index: usize,
    pub relation: RelationId,
    pub n: usize,
    pub d_b: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub certified: bool,
    pub ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    Violation = 1,
    InputError = 2,
    Uncertified = 3,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }

    /// Violations outrank certification failures.
    pub fn of_reports<'a>(reports: impl IntoIterator<Item = (bool, bool)> + 'a) -> Self {
        let mut status = ExitStatus::Ok;
        for (satisfied, certified) in reports {
            if !satisfied {
                return ExitStatus::Violation;
            }
            if !certified {
                status = ExitStatus::Uncertified;
            }
        }
        status
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepSummary {
    pub rows: usize,
    pub violations: usize,
    pub uncertified: usize,
}

impl SweepSummary {
    pub fn of(rows: &[SweepRow]) -> Self {
        Self {
            rows: rows.len(),
            violations: rows.iter().filter(|r| !r.satisfied).count(),
            uncertified: rows.iter().filter(|r| !r.certified).count(),
        }
    }

    pub fn status(&self) -> ExitStatus {
        if self.violations > 0 {
            ExitStatus::Violation
        } else if self.uncertified > 0 {
            ExitStatus::Uncertified
        } else {
            ExitStatus::Ok
        }
    }
}

struct Task {
    cell: usize,
    index: usize,
    n: usize,
    d_b: usize,
}

/// Rows for every `(cell, scenario, relation)` triple that applies, in
/// that order whatever the thread count.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut relations = config.relations.clone();
    relations.sort();
    relations.dedup();
    let tasks: Vec<Task> = config
        .cells()
        .into_iter()
        .enumerate()
        .flat_map(|(cell, (n, d_b))| {
            (0..config.count).map(move |index| Task { cell, index, n, d_b })
        })
        .collect();
    let run = |t: &Task| run_task(config, &relations, t);

    let per_task: Vec<Result<Vec<SweepRow>>> = if config.serial {
        tasks.iter().map(run).collect()
    } else if let Some(j) = config.jobs {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        pool.install(|| tasks.par_iter().map(run).collect())
    } else {
        tasks.par_iter().map(run).collect()
    };
    let mut rows = Vec::new();
    for r in per_task {
        rows.extend(r?);
    }
    Ok(rows)
}

fn run_task(config: &SweepConfig, relations: &[RelationId], t: &Task) -> Result<Vec<SweepRow>> {
    let path = [t.cell as u64, t.index as u64];
    let d_d = config.d_d_for(t.n);
    let spec = sample_scenario_with(&mut substream(config.seed, &path), t.n, t.d_b, d_d);
    let opts = DualityOptions {
        tol: config.tol,
        random_povms: config.random_povms,
        accessible_restarts: config.accessible_restarts,
        seed: substream_key(config.seed, &path),
        ..DualityOptions::default()
    };
    let analysis = ScenarioAnalysis::new(&spec, opts)?;
    let row = |relation: RelationId, d_b: usize, report: &DualityReport, ms: f64| SweepRow {
        scenario_id: format!("{}-{}-{}", config.seed, t.cell, t.index),
        seed: config.seed,
        cell: t.cell,
        index: t.index,
        relation,
        n: t.n,
        d_b,
        lhs: report.lhs,
        rhs: report.rhs,
        slack: report.slack,
        satisfied: report.satisfied,
        certified: report.solver_certified,
        ms,
    };

    let mut rows = Vec::with_capacity(relations.len());
    for &relation in relations {
        let start = Instant::now();
        let (report, d_b) = if relation == RelationId::TwoParticleSum {
            let mut rng = substream(config.seed, &[t.cell as u64, t.index as u64, 2]);
            let tp = sample_two_particle_with(&mut rng, t.n, d_d);
            (check_two_particle_sum(&tp, &opts)?, t.n)
        } else if relation.applies_to(&spec) {
            (analysis.evaluate(relation)?, t.d_b)
        } else {
            continue;
        };
        let ms = if config.timing {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        rows.push(row(relation, d_b, &report, ms));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepConfig {
        SweepConfig {
            seed: 5,
            count: 3,
            n_values: vec![2, 3],
            d_b_values: vec![1, 2],
            random_povms: 1,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            SweepConfig { count: 0, ..small() },
            SweepConfig { n_values: vec![1], ..small() },
            SweepConfig { d_b_values: vec![0], ..small() },
            SweepConfig { relations: vec![], ..small() },
            SweepConfig { jobs: Some(0), ..small() },
        ];
        for c in bad {
            assert!(matches!(run_sweep(&c), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn serial_and_parallel_agree() {
        let serial = run_sweep(&SweepConfig { serial: true, ..small() }).unwrap();
        let parallel = run_sweep(&SweepConfig { jobs: Some(3), ..small() }).unwrap();
        assert_eq!(serial, parallel);
        assert!(serial.iter().all(|r| r.satisfied));
    }

    #[test]
    fn relations_filtered_by_applicability() {
        let rows = run_sweep(&small()).unwrap();
        assert!(rows
            .iter()
            .filter(|r| r.relation == RelationId::L1NoMemory)
            .all(|r| r.d_b == 1));
        assert!(rows
            .iter()
            .filter(|r| r.relation == RelationId::TwoPathEquality)
            .all(|r| r.n == 2));
        assert_eq!(rows.iter().filter(|r| r.relation == RelationId::L1Memory).count(), 12);
    }

    #[test]
    fn exit_status_precedence() {
        assert_eq!(ExitStatus::of_reports([(true, true)]), ExitStatus::Ok);
        assert_eq!(ExitStatus::of_reports([(true, false), (true, true)]), ExitStatus::Uncertified);
        assert_eq!(ExitStatus::of_reports([(true, false), (false, true)]), ExitStatus::Violation);
    }
}
