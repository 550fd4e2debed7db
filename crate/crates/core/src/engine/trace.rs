//! Event records, one JSON object per line.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum EventType {
    I,
    II,
    III,
    IV,
    Split,
    Restart,
}

impl EventType {
    pub fn name(self) -> &'static str {
        match self {
            EventType::I => "type1",
            EventType::II => "type2",
            EventType::III => "type3",
            EventType::IV => "type4",
            EventType::Split => "splits",
            EventType::Restart => "restarts",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EventRecord {
    pub seq: u64,
    pub d: f64,
    #[serde(rename = "type")]
    pub kind: EventType,
    pub payload: serde_json::Value,
    pub counters: BTreeMap<String, u64>,
}

impl EventRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("event record serializes")
    }
}
