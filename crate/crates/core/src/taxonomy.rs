//! Error taxonomy shared by the simulator, the interpreter and the scorer.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Every way a candidate program can fail to reconstruct a target board.
///
/// The first group are execution failures (the program could not run to
/// completion). The `Mismatch*` group are reported when the program ran but
/// produced a different board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    Syntax,
    Key,
    Name,
    Value,
    Type,
    Resource,
    DimensionsMismatch,
    DepthMismatch,
    BridgePlacement,
    SameShapeStacking,
    SameShapeAlternateLevels,
    NotOnTopOfScrew,
    SameColorStacking,
    MismatchLocation,
    MismatchColor,
    MismatchShape,
    MismatchCount,
    /// The model endpoint never produced a response.
    Transport,
}

impl ErrorCategory {
    pub const ALL: [ErrorCategory; 18] = [
        ErrorCategory::Syntax,
        ErrorCategory::Key,
        ErrorCategory::Name,
        ErrorCategory::Value,
        ErrorCategory::Type,
        ErrorCategory::Resource,
        ErrorCategory::DimensionsMismatch,
        ErrorCategory::DepthMismatch,
        ErrorCategory::BridgePlacement,
        ErrorCategory::SameShapeStacking,
        ErrorCategory::SameShapeAlternateLevels,
        ErrorCategory::NotOnTopOfScrew,
        ErrorCategory::SameColorStacking,
        ErrorCategory::MismatchLocation,
        ErrorCategory::MismatchColor,
        ErrorCategory::MismatchShape,
        ErrorCategory::MismatchCount,
        ErrorCategory::Transport,
    ];

    /// Label used in the error breakdown tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ErrorCategory::Syntax => "Syntax Error",
            ErrorCategory::Key => "Key Error",
            ErrorCategory::Name => "Name Error",
            ErrorCategory::Value => "Value Error",
            ErrorCategory::Type => "Type Error",
            ErrorCategory::Resource => "Resource Error",
            ErrorCategory::DimensionsMismatch => "Dimensions Mismatch",
            ErrorCategory::DepthMismatch => "Depth Mismatch",
            ErrorCategory::BridgePlacement => "Bridge Placement",
            ErrorCategory::SameShapeStacking => "Same Shape Stacking",
            ErrorCategory::SameShapeAlternateLevels => "Same Shape At Alternate Levels",
            ErrorCategory::NotOnTopOfScrew => "Not On Top Of Screw",
            ErrorCategory::SameColorStacking => "Same Color Stacking",
            ErrorCategory::MismatchLocation => "Mismatch Location",
            ErrorCategory::MismatchColor => "Mismatch Color",
            ErrorCategory::MismatchShape => "Mismatch Shape",
            ErrorCategory::MismatchCount => "Mismatch Count",
            ErrorCategory::Transport => "Transport Error",
        }
    }

    pub fn is_mismatch(self) -> bool {
        matches!(
            self,
            ErrorCategory::MismatchLocation
                | ErrorCategory::MismatchColor
                | ErrorCategory::MismatchShape
                | ErrorCategory::MismatchCount
        )
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}
