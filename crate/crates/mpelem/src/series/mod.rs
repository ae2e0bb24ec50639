//! Taylor series kernels with rectangular splitting and collected
//! denominators, plus the denominator tables they use.

pub mod denom;
pub mod eval;

pub use denom::{DenomKind, DenomTable, TableLimb};
pub use eval::{
    eval_atan_series, eval_atanh_series, eval_exp_series, eval_exp_series_probed, eval_odd_series_probed,
    eval_sin_cos_series, eval_sin_cos_series_probed, eval_sinh_series, eval_sinh_series_probed, power_table, splitting_param, NoProbe, Point, Probe, Want,
};

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    Atan,
    Atanh,
    Exp,
    Sin,
    Cos,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 5] = [
        SeriesKind::Atan,
        SeriesKind::Atanh,
        SeriesKind::Exp,
        SeriesKind::Sin,
        SeriesKind::Cos,
    ];

    pub fn table_kind(self) -> DenomKind {
        match self {
            SeriesKind::Atan | SeriesKind::Atanh => DenomKind::Odd,
            _ => DenomKind::Factorial,
        }
    }

    pub fn alternating(self) -> bool {
        matches!(self, SeriesKind::Atan | SeriesKind::Sin | SeriesKind::Cos)
    }

    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::Atan => "atan",
            SeriesKind::Atanh => "atanh",
            SeriesKind::Exp => "exp",
            SeriesKind::Sin => "sin",
            SeriesKind::Cos => "cos",
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeriesKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        SeriesKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown series kind `{s}`"))
    }
}
