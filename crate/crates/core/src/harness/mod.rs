//! Monte Carlo driver, table sweeps and report output.

mod experiment;
mod parallel;
mod report;
mod stats;
mod table;

pub use experiment::{run_experiment, theory_pair, ExperimentReport, ExperimentSpec, Mode};
pub use parallel::{map_trials, map_trials_with_threads, thread_count, THREADS_ENV};
pub use report::{emit_report, format_g6, render_csv, render_json, OutputFormat, ReportRow, CSV_HEADER};
pub use stats::{neumaier_sum, Summary};
pub use table::{reproduce_table, Table, TableId, TableOptions, TableRow};
