use std::fmt;
use std::str::FromStr;

/// The fourteen process metrics, in feature-column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricId {
    Comm,
    Adev,
    Ddev,
    Add,
    Del,
    Own,
    Oexp,
    Exp,
    Minor,
    Sctr,
    Ncomm,
    Nadev,
    Nddev,
    Nsctr,
}

impl MetricId {
    pub const ALL: [MetricId; 14] = [
        MetricId::Comm,
        MetricId::Adev,
        MetricId::Ddev,
        MetricId::Add,
        MetricId::Del,
        MetricId::Own,
        MetricId::Oexp,
        MetricId::Exp,
        MetricId::Minor,
        MetricId::Sctr,
        MetricId::Ncomm,
        MetricId::Nadev,
        MetricId::Nddev,
        MetricId::Nsctr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricId::Comm => "COMM",
            MetricId::Adev => "ADEV",
            MetricId::Ddev => "DDEV",
            MetricId::Add => "ADD",
            MetricId::Del => "DEL",
            MetricId::Own => "OWN",
            MetricId::Oexp => "OEXP",
            MetricId::Exp => "EXP",
            MetricId::Minor => "MINOR",
            MetricId::Sctr => "SCTR",
            MetricId::Ncomm => "NCOMM",
            MetricId::Nadev => "NADEV",
            MetricId::Nddev => "NDDEV",
            MetricId::Nsctr => "NSCTR",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// The metric a neighbourhood metric aggregates, if any.
    pub fn neighborhood_base(self) -> Option<MetricId> {
        match self {
            MetricId::Ncomm => Some(MetricId::Comm),
            MetricId::Nadev => Some(MetricId::Adev),
            MetricId::Nddev => Some(MetricId::Ddev),
            MetricId::Nsctr => Some(MetricId::Sctr),
            _ => None,
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricId::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}
