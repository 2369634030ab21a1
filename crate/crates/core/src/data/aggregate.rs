use std::collections::BTreeMap;

use super::record::{AggregatedSection, RawObservation, SectionId};
use crate::{Error, Result};

/// Collapses section-year records into one record per section.
///
/// Crash count and AADT are averaged over the observed years. The remaining
/// attributes come from the latest year; `conflict` marks sections whose
/// attributes changed over time. Output is ordered by section number.
pub fn aggregate_sections(records: &[RawObservation]) -> Result<Vec<AggregatedSection>> {
    if records.is_empty() {
        return Err(Error::invalid("cannot aggregate an empty record list"));
    }

    let mut groups: BTreeMap<&SectionId, Vec<&RawObservation>> = BTreeMap::new();
    for r in records {
        groups.entry(&r.section_number).or_default().push(r);
    }

    let sections = groups
        .into_values()
        .map(|mut years| {
            years.sort_by_key(|r| r.year);
            let latest = years[years.len() - 1];
            let n = years.len() as f64;
            let crash_count = years.iter().map(|r| r.crash_count as f64).sum::<f64>() / n;
            let aadt_per_lane = years.iter().map(|r| r.aadt_per_lane).sum::<f64>() / n;
            let conflict = years.iter().any(|r| r.attributes != latest.attributes);
            AggregatedSection {
                section_number: latest.section_number.clone(),
                years_observed: years.len() as u32,
                crash_count,
                aadt_per_lane,
                attributes: latest.attributes.clone(),
                conflict,
            }
        })
        .collect();
    Ok(sections)
}

/// Turns aggregated sections back into single-year records. Only lossless
/// when every mean crash count is integral.
pub fn disaggregate(sections: &[AggregatedSection], year: i32) -> Vec<RawObservation> {
    sections
        .iter()
        .map(|s| RawObservation {
            section_number: s.section_number.clone(),
            year,
            crash_count: s.crash_count.round().max(0.0) as u32,
            aadt_per_lane: s.aadt_per_lane,
            attributes: s.attributes.clone(),
        })
        .collect()
}
