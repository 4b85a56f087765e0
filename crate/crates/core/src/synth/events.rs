use serde::{Deserialize, Serialize};

/// A timestamped detection with a non-negative weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub weight: f64,
}

/// Events sorted by non-decreasing time.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EventList {
    events: Vec<Event>,
}

impl<'de> Deserialize<'de> for EventList {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            events: Vec<Event>,
        }
        let repr = Repr::deserialize(deserializer)?;
        EventList::from_events(repr.events).ok_or_else(|| {
            serde::de::Error::custom("events need finite times and finite non-negative weights")
        })
    }
}

impl EventList {
    /// Sorts by time (stable). `None` when a value is not finite or a weight is negative.
    pub fn from_events(mut events: Vec<Event>) -> Option<Self> {
        if events
            .iter()
            .any(|e| !e.time.is_finite() || !e.weight.is_finite() || e.weight < 0.0)
        {
            return None;
        }
        events.sort_by(|a, b| a.time.total_cmp(&b.time));
        Some(EventList { events })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn times(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.time).collect()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn max_weight(&self) -> f64 {
        self.events.iter().map(|e| e.weight).fold(0.0, f64::max)
    }
}
