use serde::{Deserialize, Serialize};

use super::experiment::{run_experiment, ExperimentReport, ExperimentSpec, Mode};
use super::report::ReportRow;
use crate::error::{Error, Result};
use crate::primal::SolverConfig;
use crate::problem::{proportional_count, ObjectiveSpec, ShapeConfig};

const TABLE1_ALPHA2: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
const TABLE2_BETA: [f64; 7] = [0.42, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableId {
    /// `f = Σxᵢ`, `α₁ = 0.5`, sweeping `α₂`.
    Table1,
    /// Split objective, `α₁ = α₂ = 0.5`, sweeping `β`.
    Table2,
}

impl TableId {
    pub fn from_number(which: u8) -> Result<Self> {
        match which {
            1 => Ok(Self::Table1),
            2 => Ok(Self::Table2),
            other => Err(Error::config(format!("unknown table {other}; expected 1 or 2"))),
        }
    }

    pub fn params(self) -> &'static [f64] {
        match self {
            Self::Table1 => &TABLE1_ALPHA2,
            Self::Table2 => &TABLE2_BETA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableOptions {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Sample the auxiliary program instead of solving the original one.
    pub aux: bool,
    pub solver: SolverConfig,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            n: 200,
            trials: 200,
            seed: 1,
            aux: false,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub param: f64,
    pub report: ExperimentReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub which: TableId,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn report_rows(&self) -> Vec<ReportRow> {
        self.rows.iter().map(|r| ReportRow::from_report(r.param, &r.report)).collect()
    }
}

/// One experiment per column of the requested table.
pub fn reproduce_table(which: TableId, opts: &TableOptions) -> Result<Table> {
    let mode = if opts.aux { Mode::AuxSim } else { Mode::PrimalSim };
    let rows = which
        .params()
        .iter()
        .map(|&param| {
            let (shape, objective) = match which {
                TableId::Table1 => (ShapeConfig::new(opts.n, 0.5, param), ObjectiveSpec::PurelyLinear),
                TableId::Table2 => (
                    ShapeConfig::new(opts.n, 0.5, 0.5).with_beta(param),
                    ObjectiveSpec::BpSplit {
                        k: proportional_count(param, opts.n),
                    },
                ),
            };
            let mut spec = ExperimentSpec::new(mode, shape, objective, opts.trials, opts.seed);
            spec.solver = opts.solver;
            Ok(TableRow {
                param,
                report: run_experiment(&spec)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { which, rows })
}
