use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::board_gen::{BoardRecord, BoardType};

/// Evaluation task. Each one fixes which boards are used and which gold
/// form the model must produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    PropertyComp,
    FuncCompSequences,
    FuncCompOptimal,
    FuncRepeat,
}

impl TaskKind {
    pub const ALL: [TaskKind; 4] =
        [TaskKind::PropertyComp, TaskKind::FuncCompSequences, TaskKind::FuncCompOptimal, TaskKind::FuncRepeat];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::PropertyComp => "property_comp",
            TaskKind::FuncCompSequences => "func_comp_sequences",
            TaskKind::FuncCompOptimal => "func_comp_optimal",
            TaskKind::FuncRepeat => "func_repeat",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            TaskKind::PropertyComp => "Property Compositionality",
            TaskKind::FuncCompSequences => "Function Compositionality (Using sequences of first-order code)",
            TaskKind::FuncCompOptimal => "Function Compositionality (Using optimal higher-order code)",
            TaskKind::FuncRepeat => "Function Repeatability",
        }
    }

    pub fn board_type(self) -> BoardType {
        match self {
            TaskKind::FuncRepeat => BoardType::Regular,
            _ => BoardType::Simple,
        }
    }

    pub fn applies_to(self, record: &BoardRecord) -> bool {
        record.board_type == self.board_type()
    }

    /// The gold program a model is scored against.
    pub fn gold(self, record: &BoardRecord) -> &str {
        match self {
            TaskKind::PropertyComp => &record.gold.first_order,
            TaskKind::FuncCompSequences => &record.gold.higher_order,
            TaskKind::FuncCompOptimal | TaskKind::FuncRepeat => &record.gold.optimal,
        }
    }

    /// Whether the prompt asks for a reusable function.
    pub fn wants_function(self) -> bool {
        !matches!(self, TaskKind::PropertyComp)
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| format!("unknown task '{s}'"))
    }
}
