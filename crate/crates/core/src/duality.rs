//! Both sides of every coherence / path-information duality relation.
//!
//! Each check returns a [`DualityReport`] with `slack = rhs - lhs`; a
//! relation holds when the slack is non-negative up to tolerance (or, for
//! equalities, when it vanishes up to tolerance). Intermediate steps of the
//! derivations are recorded as auxiliary checks.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coherence::{conditional_entropy, normalized_x, rel_ent_coherence};
use crate::discrimination::{
    accessible_info_search, helstrom, holevo, min_error_solve, mutual_information,
    pairwise_bound, DiscriminationResult, Ensemble, Povm, SolverOptions,
};
use crate::error::{Error, Result};
use crate::interferometer::{
    analyze, build_mixed_no_memory, check_unit_vectors, PureState, ReducedSet, ScenarioSpec,
};
use crate::linalg::{
    inner, purity, shannon_entropy, von_neumann_entropy, ComplexMatrix, DensityMatrix, DimsLabel,
    NORM_TOL, ZERO,
};
use crate::random::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RelationId {
    L1Memory,
    L1NoMemory,
    TwoPathEquality,
    MixedState,
    EntropicNoMemory,
    EntropicMemory,
    Accessible,
    TwoParticleSum,
    WitnessPurity,
    WitnessCondEnt,
}

impl RelationId {
    pub const ALL: [RelationId; 10] = [
        RelationId::L1Memory,
        RelationId::L1NoMemory,
        RelationId::TwoPathEquality,
        RelationId::MixedState,
        RelationId::EntropicNoMemory,
        RelationId::EntropicMemory,
        RelationId::Accessible,
        RelationId::TwoParticleSum,
        RelationId::WitnessPurity,
        RelationId::WitnessCondEnt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationId::L1Memory => "L1_MEMORY",
            RelationId::L1NoMemory => "L1_NO_MEMORY",
            RelationId::TwoPathEquality => "TWO_PATH_EQUALITY",
            RelationId::MixedState => "MIXED_STATE",
            RelationId::EntropicNoMemory => "ENTROPIC_NO_MEMORY",
            RelationId::EntropicMemory => "ENTROPIC_MEMORY",
            RelationId::Accessible => "ACCESSIBLE",
            RelationId::TwoParticleSum => "TWO_PARTICLE_SUM",
            RelationId::WitnessPurity => "WITNESS_PURITY",
            RelationId::WitnessCondEnt => "WITNESS_COND_ENT",
        }
    }

    pub fn is_equality(self) -> bool {
        self == RelationId::TwoPathEquality
    }

    /// Whether the relation is defined for a single-particle scenario.
    pub fn applies_to(self, spec: &ScenarioSpec) -> bool {
        match self {
            RelationId::TwoPathEquality => spec.n() == 2,
            RelationId::L1NoMemory | RelationId::EntropicNoMemory => spec.d_b() == 1,
            RelationId::TwoParticleSum => false,
            _ => true,
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        RelationId::ALL
            .into_iter()
            .find(|r| r.as_str() == key)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown relation `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Slack floor for inequalities.
    pub inequality: f64,
    /// Largest `|slack|` accepted for equalities.
    pub equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            inequality: 1e-7,
            equality: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DualityReport {
    pub relation: RelationId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub components: BTreeMap<String, f64>,
    /// False when a minimum-error solve behind `lhs` missed its certificate.
    pub solver_certified: bool,
    /// Intermediate steps of the derivation, each expected to hold.
    pub aux_checks: BTreeMap<String, bool>,
}

impl DualityReport {
    fn new(relation: RelationId, lhs: f64, rhs: f64, tol: &Tolerances) -> Self {
        let slack = rhs - lhs;
        let satisfied = if relation.is_equality() {
            slack.abs() <= tol.equality
        } else {
            slack >= -tol.inequality
        };
        Self {
            relation,
            lhs,
            rhs,
            slack,
            satisfied,
            components: BTreeMap::new(),
            solver_certified: true,
            aux_checks: BTreeMap::new(),
        }
    }

    fn with(mut self, name: &str, value: f64) -> Self {
        self.components.insert(name.to_string(), value);
        self
    }

    fn aux(mut self, name: &str, ok: bool) -> Self {
        self.aux_checks.insert(name.to_string(), ok);
        self
    }

    fn certified_by(mut self, r: &DiscriminationResult) -> Self {
        self.solver_certified &= r.certified();
        self
    }

    pub fn aux_ok(&self) -> bool {
        self.aux_checks.values().all(|&ok| ok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityOptions {
    pub tol: Tolerances,
    pub solver: SolverOptions,
    /// Extra random POVMs tried by the entropic checks.
    pub random_povms: usize,
    pub accessible_restarts: usize,
    pub seed: u64,
}

impl Default for DualityOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            solver: SolverOptions::default(),
            random_povms: 4,
            accessible_restarts: 1,
            seed: 0,
        }
    }
}

/// `(1 - 1/N)²`
pub fn memoryless_bound(n: usize) -> f64 {
    let nf = n as f64;
    (1.0 - 1.0 / nf).powi(2)
}

/// `2(N-1)/N²`
pub fn purity_weight(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * (nf - 1.0) / (nf * nf)
}

fn path_info(p_s: f64, n: usize) -> f64 {
    (p_s - 1.0 / n as f64).powi(2)
}

/// One scenario with its reduced states and (lazily) its optimal detector
/// measurement, shared by all checks on that scenario.
pub struct ScenarioAnalysis<'a> {
    spec: &'a ScenarioSpec,
    opts: DualityOptions,
    reduced: ReducedSet,
    ensemble: Ensemble,
    solved: OnceCell<DiscriminationResult>,
}

impl<'a> ScenarioAnalysis<'a> {
    pub fn new(spec: &'a ScenarioSpec, opts: DualityOptions) -> Result<Self> {
        let (_, reduced) = analyze(spec)?;
        Ok(Self {
            spec,
            opts,
            reduced,
            ensemble: Ensemble::from_scenario(spec),
            solved: OnceCell::new(),
        })
    }

    pub fn spec(&self) -> &ScenarioSpec {
        self.spec
    }

    pub fn reduced(&self) -> &ReducedSet {
        &self.reduced
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    /// Optimal detector measurement: closed form for two paths, the
    /// iterative solver otherwise.
    pub fn solved(&self) -> &DiscriminationResult {
        self.solved.get_or_init(|| {
            if self.ensemble.len() == 2 {
                helstrom(&self.ensemble).expect("two-member ensemble")
            } else {
                min_error_solve(&self.ensemble, self.opts.solver)
            }
        })
    }

    pub fn evaluate(&self, relation: RelationId) -> Result<DualityReport> {
        match relation {
            RelationId::L1Memory => Ok(self.l1_memory()),
            RelationId::L1NoMemory => self.l1_no_memory(),
            RelationId::TwoPathEquality => self.two_path_equality(),
            RelationId::MixedState => self.mixed_state(),
            RelationId::EntropicNoMemory => self.entropic_sweep(RelationId::EntropicNoMemory),
            RelationId::EntropicMemory => self.entropic_sweep(RelationId::EntropicMemory),
            RelationId::Accessible => Ok(self.accessible()),
            RelationId::WitnessPurity => Ok(self.witness_purity()),
            RelationId::WitnessCondEnt => Ok(self.witness_cond_ent()),
            RelationId::TwoParticleSum => Err(Error::Precondition(
                "TWO_PARTICLE_SUM needs a two-particle scenario".into(),
            )),
        }
    }

    /// Every relation that applies to this scenario, in canonical order.
    pub fn evaluate_all(&self) -> Result<Vec<DualityReport>> {
        RelationId::ALL
            .into_iter()
            .filter(|r| r.applies_to(self.spec))
            .map(|r| self.evaluate(r))
            .collect()
    }

    fn n(&self) -> usize {
        self.spec.n()
    }

    fn x_a(&self) -> f64 {
        normalized_x(&self.reduced.rho_a, self.n()).expect("ρ_A lives on the paths")
    }

    fn l1_memory(&self) -> DualityReport {
        let n = self.n();
        let tol = &self.opts.tol;
        let solved = self.solved();
        let x = self.x_a();
        let pur_a = purity(&self.reduced.rho_a);
        let pur_ab = purity(&self.reduced.rho_ab);
        let pur_d = purity(&self.reduced.rho_d);
        let base = memoryless_bound(n);
        let k = purity_weight(n);

        let lhs = path_info(solved.p_success, n) + x * x;
        let rhs = base + k * (pur_a - pur_ab);
        let bound = pairwise_bound(&self.ensemble);
        let pairwise_chain = path_info(bound, n) + x * x;
        let detector_form = base - k * (pur_d - pur_a);
        let strict_ok = pur_a - pur_ab >= -1e-6 || rhs < base - 1e-8;

        DualityReport::new(RelationId::L1Memory, lhs, rhs, tol)
            .with("p_s", solved.p_success)
            .with("x_a", x)
            .with("purity_a", pur_a)
            .with("purity_ab", pur_ab)
            .with("purity_d", pur_d)
            .with("pairwise_bound", bound)
            .with("pairwise_chain", pairwise_chain)
            .with("detector_form_rhs", detector_form)
            .with("certificate_gap", solved.certificate_gap)
            .aux("lhs_le_pairwise_chain", lhs <= pairwise_chain + tol.inequality)
            .aux("pairwise_chain_le_detector_form", pairwise_chain <= detector_form + tol.inequality)
            .aux("rhs_le_memoryless", rhs <= base + 1e-12)
            .aux("entangled_implies_strict", strict_ok)
            .certified_by(solved)
    }

    fn l1_no_memory(&self) -> Result<DualityReport> {
        if self.spec.d_b() != 1 {
            return Err(Error::Precondition(format!(
                "L1_NO_MEMORY needs d_B = 1, scenario has d_B = {}",
                self.spec.d_b()
            )));
        }
        let n = self.n();
        let solved = self.solved();
        let x = self.x_a();
        let lhs = path_info(solved.p_success, n) + x * x;
        Ok(
            DualityReport::new(RelationId::L1NoMemory, lhs, memoryless_bound(n), &self.opts.tol)
                .with("p_s", solved.p_success)
                .with("x_a", x)
                .with("certificate_gap", solved.certificate_gap)
                .certified_by(solved),
        )
    }

    fn two_path_equality(&self) -> Result<DualityReport> {
        if self.n() != 2 {
            return Err(Error::Precondition(format!(
                "TWO_PATH_EQUALITY needs N = 2, scenario has N = {}",
                self.n()
            )));
        }
        let h = helstrom(&self.ensemble)?;
        let x = self.x_a();
        let pur_a = purity(&self.reduced.rho_a);
        let pur_ab = purity(&self.reduced.rho_ab);
        let lhs = path_info(h.p_success, 2) + x * x;
        let rhs = 0.25 + 0.5 * (pur_a - pur_ab);
        let p = &self.reduced.probabilities;
        let phi = self.reduced.detector_overlaps[(0, 1)].norm_sqr();
        let u = self.reduced.memory_overlaps[(0, 1)].norm_sqr();
        let closed_form = 0.25 - p[0] * p[1] * phi * (1.0 - u);
        Ok(DualityReport::new(RelationId::TwoPathEquality, lhs, rhs, &self.opts.tol)
            .with("p_s", h.p_success)
            .with("x_a", x)
            .with("purity_a", pur_a)
            .with("purity_ab", pur_ab)
            .with("overlap_form", closed_form)
            .aux("overlap_form_matches", (closed_form - rhs).abs() <= self.opts.tol.equality))
    }

    fn mixed_state(&self) -> Result<DualityReport> {
        let n = self.n();
        let mixed = build_mixed_no_memory(self.spec)?;
        let solved = self.solved();
        let x = normalized_x(&mixed.rho_a, n)?;
        let pur_a = purity(&mixed.rho_a);
        let pur_d = purity(&mixed.rho_d);
        let base = memoryless_bound(n);
        let lhs = path_info(solved.p_success, n) + x * x;
        let rhs = base + purity_weight(n) * (pur_a - pur_d);
        Ok(DualityReport::new(RelationId::MixedState, lhs, rhs, &self.opts.tol)
            .with("p_s", solved.p_success)
            .with("x_a", x)
            .with("purity_a", pur_a)
            .with("purity_d", pur_d)
            .with("purity_initial", purity(&mixed.rho0_a))
            .aux("rhs_le_memoryless", rhs <= base + 1e-12)
            .certified_by(solved))
    }

    /// Entropic relation for one POVM on the detector.
    pub fn entropic(&self, relation: RelationId, povm: &Povm) -> Result<DualityReport> {
        let with_memory = match relation {
            RelationId::EntropicMemory => true,
            RelationId::EntropicNoMemory => {
                if self.spec.d_b() != 1 {
                    return Err(Error::Precondition(format!(
                        "ENTROPIC_NO_MEMORY needs d_B = 1, scenario has d_B = {}",
                        self.spec.d_b()
                    )));
                }
                false
            }
            other => {
                return Err(Error::Precondition(format!("{other} is not an entropic relation")))
            }
        };
        let info = mutual_information(&self.ensemble, povm)?;
        let c_r = rel_ent_coherence(&self.reduced.rho_a);
        let h_p = shannon_entropy(&self.reduced.probabilities);
        let s_a = von_neumann_entropy(&self.reduced.rho_a);
        let s_ab = von_neumann_entropy(&self.reduced.rho_ab);
        let s_d = von_neumann_entropy(&self.reduced.rho_d);
        let cond = s_ab - s_a;
        let lhs = info + c_r;
        let rhs = if with_memory { h_p + cond } else { h_p };
        let tol = &self.opts.tol;
        let mut report = DualityReport::new(relation, lhs, rhs, tol)
            .with("mutual_information", info)
            .with("c_rel_ent", c_r)
            .with("shannon_p", h_p)
            .with("s_a", s_a)
            .with("s_ab", s_ab)
            .with("s_d", s_d)
            .with("cond_entropy_b_given_a", cond)
            .with("holevo", s_d)
            .aux("mutual_info_le_holevo", info <= s_d + 1e-9);
        if with_memory {
            report = report.aux("lhs_le_holevo_form", lhs <= h_p - s_a + s_d + 1e-9);
        }
        Ok(report)
    }

    /// Worst case over the min-error POVM and the configured random POVMs.
    fn entropic_sweep(&self, relation: RelationId) -> Result<DualityReport> {
        let solved = self.solved();
        let mut worst = self.entropic(relation, &solved.povm)?;
        let mut rng = substream(self.opts.seed, &[0xe27, relation as u64]);
        for _ in 0..self.opts.random_povms {
            let povm = Povm::random(&mut rng, self.n(), self.spec.d_d());
            let r = self.entropic(relation, &povm)?;
            if r.slack < worst.slack {
                worst = r;
            }
        }
        Ok(worst
            .with("povms_tested", (1 + self.opts.random_povms) as f64)
            .certified_by(solved))
    }

    fn accessible(&self) -> DualityReport {
        let acc = accessible_info_search(
            &self.ensemble,
            self.opts.accessible_restarts,
            self.opts.seed,
        );
        let c_r = rel_ent_coherence(&self.reduced.rho_a);
        let h_p = shannon_entropy(&self.reduced.probabilities);
        let cond = von_neumann_entropy(&self.reduced.rho_ab) - von_neumann_entropy(&self.reduced.rho_a);
        let chi = holevo(&self.ensemble);
        let lhs = acc.value + c_r;
        let rhs = h_p + cond;
        let tol = self.opts.tol.inequality;
        DualityReport::new(RelationId::Accessible, lhs, rhs, &self.opts.tol)
            .with("accessible_lower", acc.value)
            .with("holevo", chi)
            .with("c_rel_ent", c_r)
            .with("shannon_p", h_p)
            .with("cond_entropy_b_given_a", cond)
            .with("holevo_dominance_slack", rhs - (chi + c_r))
            .aux("holevo_dominance", chi + c_r <= rhs + tol)
            .aux("best_found", lhs <= rhs + tol)
            .aux("accessible_le_holevo", acc.value <= chi + 1e-9)
    }

    fn witness_purity(&self) -> DualityReport {
        let pur_a = purity(&self.reduced.rho_a);
        let pur_ab = purity(&self.reduced.rho_ab);
        let pur_d = purity(&self.reduced.rho_d);
        DualityReport::new(RelationId::WitnessPurity, pur_a, pur_ab, &self.opts.tol)
            .with("purity_witness", pur_a - pur_ab)
            .with("purity_d", pur_d)
            .aux("purity_ab_equals_purity_d", (pur_ab - pur_d).abs() <= 1e-12)
    }

    fn witness_cond_ent(&self) -> DualityReport {
        let s_a = von_neumann_entropy(&self.reduced.rho_a);
        let s_ab = von_neumann_entropy(&self.reduced.rho_ab);
        let s_d = von_neumann_entropy(&self.reduced.rho_d);
        DualityReport::new(RelationId::WitnessCondEnt, s_ab, s_a, &self.opts.tol)
            .with("cond_entropy_b_given_a", s_ab - s_a)
            .with("s_d", s_d)
            .aux("s_ab_equals_s_d", (s_ab - s_d).abs() <= 1e-9)
    }
}

pub fn check_l1_memory(spec: &ScenarioSpec) -> Result<DualityReport> {
    ScenarioAnalysis::new(spec, DualityOptions::default())?.evaluate(RelationId::L1Memory)
}

pub fn check_l1_no_memory(spec: &ScenarioSpec) -> Result<DualityReport> {
    ScenarioAnalysis::new(spec, DualityOptions::default())?.evaluate(RelationId::L1NoMemory)
}

pub fn check_two_path_equality(spec: &ScenarioSpec) -> Result<DualityReport> {
    ScenarioAnalysis::new(spec, DualityOptions::default())?.evaluate(RelationId::TwoPathEquality)
}

pub fn check_mixed_state(spec: &ScenarioSpec) -> Result<DualityReport> {
    ScenarioAnalysis::new(spec, DualityOptions::default())?.evaluate(RelationId::MixedState)
}

pub fn check_entropic_no_memory(spec: &ScenarioSpec, povm: &Povm) -> Result<DualityReport> {
    ScenarioAnalysis::new(spec, DualityOptions::default())?
        .entropic(RelationId::EntropicNoMemory, povm)
}

pub fn check_entropic_memory(spec: &ScenarioSpec, povm: &Povm) -> Result<DualityReport> {
    ScenarioAnalysis::new(spec, DualityOptions::default())?
        .entropic(RelationId::EntropicMemory, povm)
}

pub fn check_accessible_relation(spec: &ScenarioSpec) -> Result<DualityReport> {
    ScenarioAnalysis::new(spec, DualityOptions::default())?.evaluate(RelationId::Accessible)
}

/// `(Tr ρ_A² - Tr ρ_AB², S(B|A))`; negative values certify entanglement.
pub fn entanglement_witnesses(rho_ab: &DensityMatrix, dims: &DimsLabel) -> Result<(f64, f64)> {
    if dims.len() != 2 {
        return Err(Error::InvalidDims(format!(
            "witnesses need a bipartite state, got {} subsystems",
            dims.len()
        )));
    }
    let first = dims.names().next().expect("two subsystems").to_string();
    let rho_a = crate::linalg::partial_trace(rho_ab, dims, &[first.as_str()])?;
    Ok((
        purity(&rho_a) - purity(rho_ab),
        conditional_entropy(rho_ab, dims)?,
    ))
}

/// Two entangled particles, each sent through its own `N`-path
/// interferometer with its own which-path detector.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticleScenario {
    amplitudes: ComplexMatrix,
    detector_a: Vec<Vec<Complex64>>,
    detector_b: Vec<Vec<Complex64>>,
}

pub const PARTICLE_A: &str = "A";
pub const PARTICLE_B: &str = "B";
pub const DETECTOR_A: &str = "DA";
pub const DETECTOR_B: &str = "DB";

impl TwoParticleScenario {
    /// `amplitudes[i][j]` is the amplitude of `|i⟩_A |j⟩_B`.
    pub fn new(
        amplitudes: ComplexMatrix,
        detector_a: Vec<Vec<Complex64>>,
        detector_b: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let n = amplitudes.rows();
        if amplitudes.cols() != n {
            return Err(Error::InvalidScenario(format!(
                "joint amplitudes must be N x N, got {}x{}",
                n,
                amplitudes.cols()
            )));
        }
        if n < 2 {
            return Err(Error::InvalidScenario(format!("need at least 2 paths, got {n}")));
        }
        let total: f64 = amplitudes.data().iter().map(|z| z.norm_sqr()).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                what: "joint amplitudes".into(),
                norm: total.sqrt(),
            });
        }
        check_unit_vectors(&detector_a, n, "detector A state")?;
        check_unit_vectors(&detector_b, n, "detector B state")?;
        Ok(Self {
            amplitudes,
            detector_a,
            detector_b,
        })
    }

    pub fn n(&self) -> usize {
        self.amplitudes.rows()
    }

    pub fn amplitudes(&self) -> &ComplexMatrix {
        &self.amplitudes
    }

    pub fn detector_a(&self) -> &[Vec<Complex64>] {
        &self.detector_a
    }

    pub fn detector_b(&self) -> &[Vec<Complex64>] {
        &self.detector_b
    }

    pub fn dims(&self) -> DimsLabel {
        DimsLabel::new([
            (PARTICLE_A, self.n()),
            (PARTICLE_B, self.n()),
            (DETECTOR_A, self.detector_a[0].len()),
            (DETECTOR_B, self.detector_b[0].len()),
        ])
        .expect("positive dimensions")
    }

    /// `Σ_ij c_ij |i⟩_A |j⟩_B |φ_i⟩_DA |χ_j⟩_DB`
    pub fn state(&self) -> PureState {
        let n = self.n();
        let (da, db) = (self.detector_a[0].len(), self.detector_b[0].len());
        let mut psi = vec![ZERO; n * n * da * db];
        for i in 0..n {
            for j in 0..n {
                let c = self.amplitudes[(i, j)];
                for (a, fa) in self.detector_a[i].iter().enumerate() {
                    for (b, fb) in self.detector_b[j].iter().enumerate() {
                        psi[((i * n + j) * da + a) * db + b] = c * fa * fb;
                    }
                }
            }
        }
        PureState::new(self.dims(), psi).expect("normalized by construction")
    }

    pub fn probabilities_a(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.amplitudes[(i, j)].norm_sqr()).sum())
            .collect()
    }

    pub fn probabilities_b(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|j| (0..n).map(|i| self.amplitudes[(i, j)].norm_sqr()).sum())
            .collect()
    }

    pub fn ensemble_a(&self) -> Ensemble {
        Ensemble::new(self.probabilities_a(), self.detector_a.clone())
            .unwrap_or_else(|_| renormalized(self.probabilities_a(), self.detector_a.clone()))
    }

    pub fn ensemble_b(&self) -> Ensemble {
        Ensemble::new(self.probabilities_b(), self.detector_b.clone())
            .unwrap_or_else(|_| renormalized(self.probabilities_b(), self.detector_b.clone()))
    }
}

fn renormalized(mut probs: Vec<f64>, states: Vec<Vec<Complex64>>) -> Ensemble {
    let s: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= s);
    Ensemble::new(probs, states).expect("renormalized ensemble")
}

/// Sum of the two single-particle relations, with the joint purity
/// `Tr ρ_AB²` of both particles after their detectors.
///
/// `tight_rhs` instead charges each particle with the purity of its own
/// detector (equivalently of its full complement), which is the form that
/// follows term-by-term from the single-particle relation and is an
/// equality at `N = 2`.
pub fn check_two_particle_sum(
    tp: &TwoParticleScenario,
    opts: &DualityOptions,
) -> Result<DualityReport> {
    let n = tp.n();
    let state = tp.state();
    let rho_a = state.reduced(&[PARTICLE_A])?;
    let rho_b = state.reduced(&[PARTICLE_B])?;
    let rho_ab = state.reduced(&[PARTICLE_A, PARTICLE_B])?;
    let rho_da = state.reduced(&[DETECTOR_A])?;
    let rho_db = state.reduced(&[DETECTOR_B])?;
    let sol_a = min_error_solve(&tp.ensemble_a(), opts.solver);
    let sol_b = min_error_solve(&tp.ensemble_b(), opts.solver);
    let x_a = normalized_x(&rho_a, n)?;
    let x_b = normalized_x(&rho_b, n)?;
    let (pa, pb, pab) = (purity(&rho_a), purity(&rho_b), purity(&rho_ab));
    let (pda, pdb) = (purity(&rho_da), purity(&rho_db));
    let k = purity_weight(n);
    let base = 2.0 * memoryless_bound(n);

    let lhs = path_info(sol_a.p_success, n) + path_info(sol_b.p_success, n) + x_a * x_a + x_b * x_b;
    let rhs = base + k * (pa + pb - 2.0 * pab);
    let tight_rhs = base + k * (pa + pb - pda - pdb);
    Ok(DualityReport::new(RelationId::TwoParticleSum, lhs, rhs, &opts.tol)
        .with("p_s_a", sol_a.p_success)
        .with("p_s_b", sol_b.p_success)
        .with("x_a", x_a)
        .with("x_b", x_b)
        .with("purity_a", pa)
        .with("purity_b", pb)
        .with("purity_ab", pab)
        .with("purity_da", pda)
        .with("purity_db", pdb)
        .with("tight_rhs", tight_rhs)
        .with("tight_slack", tight_rhs - lhs)
        .aux("tight_form_holds", tight_rhs - lhs >= -opts.tol.inequality)
        .aux("tight_rhs_le_rhs", tight_rhs <= rhs + 1e-12)
        .certified_by(&sol_a)
        .certified_by(&sol_b))
}

/// `|⟨a|b⟩|`
pub fn overlap_modulus(a: &[Complex64], b: &[Complex64]) -> f64 {
    inner(a, b).norm()
}
