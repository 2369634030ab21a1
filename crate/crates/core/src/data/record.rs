use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// Section identifier. Purely numeric identifiers order numerically, all
/// others after them in lexical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SectionId(pub String);

impl SectionId {
    fn numeric(&self) -> Option<u64> {
        self.0.parse().ok()
    }
}

impl Ord for SectionId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeric(), other.numeric()) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for SectionId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for SectionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SectionId {
    fn from(s: &str) -> Self {
        SectionId(s.to_string())
    }
}

/// Attributes of a section that do not vary with traffic: geometry,
/// control and land-use indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionAttributes {
    /// Miles.
    pub section_length: f64,
    pub shoulder: bool,
    /// mph.
    pub speed_limit: f64,
    pub on_street_parking: bool,
    pub one_way: bool,
    pub num_lanes: u32,
    pub road_class: String,
    pub median: bool,
    /// Feet.
    pub lane_width: f64,
    pub cbd: bool,
}

/// One section in one year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawObservation {
    pub section_number: SectionId,
    pub year: i32,
    pub crash_count: u32,
    /// Vehicles per day per lane.
    pub aadt_per_lane: f64,
    pub attributes: SectionAttributes,
}

/// One section with crash count and AADT averaged over its observed years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatedSection {
    pub section_number: SectionId,
    pub years_observed: u32,
    pub crash_count: f64,
    pub aadt_per_lane: f64,
    /// Taken from the latest observed year.
    pub attributes: SectionAttributes,
    /// Set when the static attributes differed between years.
    pub conflict: bool,
}
