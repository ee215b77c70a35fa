//! Responsibility-Sensitive Safety: safe distances, danger flags and
//! proper-response labels for the vehicle under test.

mod distance;
mod params;
mod response;

pub use distance::{safe_lat_distance, safe_lon_distance_opposite, safe_lon_distance_same_dir};
pub use params::RssParams;
pub use response::{
    classify_danger, classify_pair, classify_response, classify_sut, front_agent_response_ok,
    improper_fraction, write_classification_csv, DangerLabel, ResponseLabel, StepClassification,
    CLASSIFICATION_HEADER, RULE_SLACK,
};
