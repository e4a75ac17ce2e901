//! Scenario files, the co-simulation runner, measurements and trace export.

pub mod check;
pub mod export;
pub mod measure;
pub mod run;
pub mod scenario;

pub use check::{
    check_dir, load_dir, load_scenario, render_summary, run_all, run_one, CheckError, TraceOutput,
};
pub use export::{parse_vcd, to_csv, to_vcd, write_traces, TraceFormat, VcdError};
pub use run::{
    evaluate, run_scenario, stroke_peaks, Bench, BenchError, CheckOutcome, Halt, RunReport,
    ANGLE_SAMPLE, AO, DO, HEAVY, SERVO_ANGLE, SERVO_PWM, WIRING,
};
pub use scenario::{parse_scenario, Check, Scenario, ScenarioError, Tolerance};
