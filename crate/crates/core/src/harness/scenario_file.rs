//! TOML scenario files. Complex numbers are always `[re, im]` pairs.
//!
//! ```toml
//! kind = "scenario"                # or "two_particle", "ensemble"
//! amplitudes = [[[0.5, 0.0], [0.5, 0.0]],
//!               [[0.5, 0.0], [0.0, 0.5]]]   # N rows x d_B columns
//!
//! [detector]
//! gram = [[[1.0, 0.0], [0.6, 0.0]],
//!         [[0.6, 0.0], [1.0, 0.0]]]          # or: vectors = [...]
//! ```
//!
//! A memoryless scenario may give `probabilities = [...]` instead of
//! `amplitudes`. Two-particle files use an `N x N` amplitude table and
//! `[detector_a]` / `[detector_b]`; ensemble files give `probabilities`
//! and `states`.

use std::ops::Range;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::discrimination::Ensemble;
use crate::duality::TwoParticleScenario;
use crate::error::{Error, Result};
use crate::interferometer::{gram_to_states, ScenarioSpec};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioFile {
    Scenario(ScenarioSpec),
    TwoParticle(TwoParticleScenario),
    Ensemble(Ensemble),
}

type Pairs = Vec<[f64; 2]>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    kind: Option<Spanned<String>>,
    amplitudes: Option<Spanned<Vec<Pairs>>>,
    probabilities: Option<Spanned<Vec<f64>>>,
    states: Option<Spanned<Vec<Pairs>>>,
    detector: Option<Spanned<RawDetector>>,
    detector_a: Option<Spanned<RawDetector>>,
    detector_b: Option<Spanned<RawDetector>>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    #[serde(skip_serializing_if = "Option::is_none")]
    vectors: Option<Vec<Pairs>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gram: Option<Vec<Pairs>>,
}

struct Ctx<'a> {
    origin: &'a str,
    text: &'a str,
}

impl Ctx<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn err(&self, span: Range<usize>, field: &str, e: impl ToString) -> Error {
        Error::Parse {
            context: format!("{}:{} (field `{field}`)", self.origin, self.line(span)),
            message: e.to_string(),
        }
    }

    fn missing(&self, field: &str) -> Error {
        Error::Parse {
            context: self.origin.to_string(),
            message: format!("missing field `{field}`"),
        }
    }
}

fn complex(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn vectors(rows: &[Pairs]) -> Vec<Vec<Complex64>> {
    rows.iter().map(|r| r.iter().map(complex).collect()).collect()
}

fn matrix(rows: &[Pairs]) -> std::result::Result<ComplexMatrix, Error> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(Error::InvalidScenario("empty table".into()));
    }
    if let Some(bad) = rows.iter().position(|row| row.len() != c) {
        return Err(Error::InvalidScenario(format!(
            "row {bad} has {} entries, row 0 has {c}",
            rows[bad].len()
        )));
    }
    ComplexMatrix::new(r, c, rows.iter().flatten().map(complex).collect())
}

fn detector(ctx: &Ctx, raw: &Spanned<RawDetector>, field: &str) -> Result<Vec<Vec<Complex64>>> {
    let span = raw.span();
    match (&raw.get_ref().vectors, &raw.get_ref().gram) {
        (Some(v), None) => Ok(vectors(v)),
        (None, Some(g)) => {
            let g = matrix(g).map_err(|e| ctx.err(span.clone(), &format!("{field}.gram"), e))?;
            gram_to_states(&g).map_err(|e| ctx.err(span, &format!("{field}.gram"), e))
        }
        _ => Err(ctx.err(span, field, "give exactly one of `vectors` or `gram`")),
    }
}

pub fn parse_scenario(path: &Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario_str(&text, &path.display().to_string())
}

/// Parses and validates file contents; `origin` names the source in errors.
pub fn parse_scenario_str(text: &str, origin: &str) -> Result<ScenarioFile> {
    let ctx = Ctx { origin, text };
    let raw: RawFile = toml::from_str(text).map_err(|e| Error::Parse {
        context: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let kind = raw
        .kind
        .as_ref()
        .map_or("scenario", |k| k.get_ref().as_str());
    match kind {
        "scenario" => scenario(&ctx, &raw).map(ScenarioFile::Scenario),
        "two_particle" => two_particle(&ctx, &raw).map(ScenarioFile::TwoParticle),
        "ensemble" => ensemble(&ctx, &raw).map(ScenarioFile::Ensemble),
        other => Err(ctx.err(
            raw.kind.as_ref().expect("kind present").span(),
            "kind",
            format!("unknown kind `{other}` (expected scenario, two_particle or ensemble)"),
        )),
    }
}

fn scenario(ctx: &Ctx, raw: &RawFile) -> Result<ScenarioSpec> {
    let det = raw.detector.as_ref().ok_or_else(|| ctx.missing("detector"))?;
    let states = detector(ctx, det, "detector")?;
    match (&raw.amplitudes, &raw.probabilities) {
        (Some(a), None) => {
            let m = matrix(a.get_ref()).map_err(|e| ctx.err(a.span(), "amplitudes", e))?;
            ScenarioSpec::new(m, states).map_err(|e| ctx.err(a.span(), "amplitudes", e))
        }
        (None, Some(p)) => ScenarioSpec::memoryless(p.get_ref(), states)
            .map_err(|e| ctx.err(p.span(), "probabilities", e)),
        (Some(a), Some(_)) => Err(ctx.err(
            a.span(),
            "amplitudes",
            "give either `amplitudes` or `probabilities`, not both",
        )),
        (None, None) => Err(ctx.missing("amplitudes")),
    }
}

fn two_particle(ctx: &Ctx, raw: &RawFile) -> Result<TwoParticleScenario> {
    let a = raw.amplitudes.as_ref().ok_or_else(|| ctx.missing("amplitudes"))?;
    let da = raw.detector_a.as_ref().ok_or_else(|| ctx.missing("detector_a"))?;
    let db = raw.detector_b.as_ref().ok_or_else(|| ctx.missing("detector_b"))?;
    let m = matrix(a.get_ref()).map_err(|e| ctx.err(a.span(), "amplitudes", e))?;
    let da = detector(ctx, da, "detector_a")?;
    let db = detector(ctx, db, "detector_b")?;
    TwoParticleScenario::new(m, da, db).map_err(|e| ctx.err(a.span(), "amplitudes", e))
}

fn ensemble(ctx: &Ctx, raw: &RawFile) -> Result<Ensemble> {
    let p = raw.probabilities.as_ref().ok_or_else(|| ctx.missing("probabilities"))?;
    let s = raw.states.as_ref().ok_or_else(|| ctx.missing("states"))?;
    Ensemble::new(p.get_ref().clone(), vectors(s.get_ref()))
        .map_err(|e| ctx.err(s.span(), "states", e))
}

#[derive(Serialize)]
struct OutFile {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    probabilities: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<Pairs>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<Vec<Pairs>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detector: Option<RawDetector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detector_a: Option<RawDetector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detector_b: Option<RawDetector>,
}

fn pairs(v: &[Complex64]) -> Pairs {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn table(m: &ComplexMatrix) -> Vec<Pairs> {
    m.data().chunks(m.cols()).map(pairs).collect()
}

fn detector_out(states: &[Vec<Complex64>]) -> Option<RawDetector> {
    Some(RawDetector {
        vectors: Some(states.iter().map(|v| pairs(v)).collect()),
        gram: None,
    })
}

/// Serializes to the file format; floats are written round-trip exact.
pub fn to_toml(file: &ScenarioFile) -> String {
    let out = match file {
        ScenarioFile::Scenario(s) => OutFile {
            kind: "scenario",
            probabilities: None,
            amplitudes: Some(table(s.amplitudes())),
            states: None,
            detector: detector_out(s.detector_states()),
            detector_a: None,
            detector_b: None,
        },
        ScenarioFile::TwoParticle(t) => OutFile {
            kind: "two_particle",
            probabilities: None,
            amplitudes: Some(table(t.amplitudes())),
            states: None,
            detector: None,
            detector_a: detector_out(t.detector_a()),
            detector_b: detector_out(t.detector_b()),
        },
        ScenarioFile::Ensemble(e) => OutFile {
            kind: "ensemble",
            probabilities: Some(e.probs().to_vec()),
            amplitudes: None,
            states: Some(e.states().iter().map(|v| pairs(v)).collect()),
            detector: None,
            detector_a: None,
            detector_b: None,
        },
    };
    toml::to_string(&out).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
probabilities = [0.5, 0.5]

[detector]
vectors = [[[1, 0], [0, 0]],
           [[0, 0], [1, 0]]]
"#;

    #[test]
    fn minimal_memoryless_file() {
        let ScenarioFile::Scenario(s) = parse_scenario_str(MINIMAL, "min.toml").unwrap() else {
            panic!("expected a scenario");
        };
        assert_eq!((s.n(), s.d_b(), s.d_d()), (2, 1, 2));
        assert!((s.probabilities()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gram_identity_gives_orthonormal_states() {
        let text = r#"
amplitudes = [[[0.6, 0.0]], [[0.0, 0.8]]]
[detector]
gram = [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
"#;
        let ScenarioFile::Scenario(s) = parse_scenario_str(text, "g.toml").unwrap() else {
            panic!("expected a scenario");
        };
        let g = s.detector_overlaps();
        assert!(g.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn errors_carry_line_and_field() {
        let text = "\n\namplitudes = [[[0.6, 0.0]], [[0.0, 0.9]]]\n[detector]\nvectors = [[[1,0]],[[1,0]]]\n";
        let err = parse_scenario_str(text, "bad.toml").unwrap_err().to_string();
        assert!(err.contains("bad.toml:3") && err.contains("amplitudes"), "{err}");

        let text = "probabilities = [0.5, 0.5]\n[detector]\ngram = [[[1,0],[2,0]],[[2,0],[1,0]]]\n";
        let err = parse_scenario_str(text, "g.toml").unwrap_err().to_string();
        assert!(err.contains("detector.gram"), "{err}");

        let err = parse_scenario_str("amplitudes = [[[1, 0]]]\nfoo = 1\n", "x").unwrap_err();
        assert!(err.to_string().contains("foo"), "{err}");
        assert!(parse_scenario_str("kind = \"what\"", "x").is_err());
        assert!(parse_scenario_str("probabilities = [1.0]", "x").is_err());
    }

    #[test]
    fn ensemble_and_two_particle_round_trip() {
        let t = crate::harness::sample_two_particle(3, 2, 3);
        let file = ScenarioFile::TwoParticle(t);
        assert_eq!(parse_scenario_str(&to_toml(&file), "t").unwrap(), file);

        let text = "kind = \"ensemble\"\nprobabilities = [0.25, 0.75]\nstates = [[[1,0],[0,0]], [[0.6,0],[0,0.8]]]\n";
        let file = parse_scenario_str(text, "e").unwrap();
        assert!(matches!(file, ScenarioFile::Ensemble(ref e) if e.len() == 2));
        assert_eq!(parse_scenario_str(&to_toml(&file), "e").unwrap(), file);
    }
}
