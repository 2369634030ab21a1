//! Section-level crash records and the datasets built from them.

mod aggregate;
mod dataset;
mod ingest;
mod rate;
mod record;
mod synthetic;

pub use aggregate::{aggregate_sections, disaggregate};
pub use dataset::{
    make_dataset, split_indices, train_test_split, Dataset, DatasetOptions, Feature, FeatureKind,
    FeatureMeta, ResponseMode,
};
pub use ingest::{
    ingest_csv, write_csv, ColumnMap, DropCounts, Ingested, IngestionReport, RowError,
};
pub use rate::{crash_rate, RateParameters};
pub use record::{AggregatedSection, RawObservation, SectionAttributes, SectionId};
pub use synthetic::{
    generate_synthetic, generate_synthetic_with_truth, GeneratorTruth, LaneWidthEffect,
    SectionTruth, SyntheticConfig, SyntheticData,
};
