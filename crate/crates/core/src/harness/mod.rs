//! Front-end plumbing: scenario files, seeded sampling, sweeps and output.

pub mod emit;
pub mod sampler;
pub mod scenario_file;
pub mod sweep;

pub use emit::{emit, read_jsonl, write_csv, write_jsonl, OutputFormat, CSV_HEADER};
pub use sampler::{sample_scenario, sample_scenario_with, sample_two_particle, sample_two_particle_with};
pub use scenario_file::{parse_scenario, parse_scenario_str, to_toml, ScenarioFile};
pub use sweep::{run_sweep, DetectorDim, ExitStatus, SweepConfig, SweepRow, SweepSummary};
