use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Label attached to a boundary segment of a mesh or a shape outline.
///
/// `Root` marks the dry part of the component surface (outside the shroud),
/// where the fluid load is extended by zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryTag {
    Inlet,
    Outlet,
    Wall,
    Component,
    Clamp,
    Root,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 6] = [
        BoundaryTag::Inlet,
        BoundaryTag::Outlet,
        BoundaryTag::Wall,
        BoundaryTag::Component,
        BoundaryTag::Clamp,
        BoundaryTag::Root,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Inlet => "inlet",
            BoundaryTag::Outlet => "outlet",
            BoundaryTag::Wall => "wall",
            BoundaryTag::Component => "component",
            BoundaryTag::Clamp => "clamp",
            BoundaryTag::Root => "root",
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownTag(pub String);

impl fmt::Display for UnknownTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown boundary tag `{}`", self.0)
    }
}

impl std::error::Error for UnknownTag {}

impl FromStr for BoundaryTag {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundaryTag::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownTag(s.to_string()))
    }
}
