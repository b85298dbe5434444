use serde::{Deserialize, Serialize};

/// Negative values above this are roundoff and clamp to zero.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// How a reported value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    MonteCarlo,
    Transvectant,
    Zhou,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantEntry {
    pub index: String,
    pub value: f64,
    pub degree: usize,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    /// Magnitude of a clamped negative value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clamped: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl InvariantEntry {
    pub fn new(index: impl Into<String>, value: f64, degree: usize, method: Method) -> Self {
        let (value, clamped) = if (-CLAMP_TOLERANCE..0.0).contains(&value) {
            (0.0, Some(-value))
        } else {
            (value, None)
        };
        Self {
            index: index.into(),
            value,
            degree,
            method,
            std_error: None,
            clamped,
            note: None,
        }
    }

    pub fn with_std_error(mut self, se: f64) -> Self {
        self.std_error = Some(se);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub entries: Vec<InvariantEntry>,
}

impl InvariantReport {
    pub fn push(&mut self, entry: InvariantEntry) {
        self.entries.push(entry);
    }

    pub fn get(&self, index: &str, method: Method) -> Option<&InvariantEntry> {
        self.entries
            .iter()
            .find(|e| e.index == index && e.method == method)
    }
}
