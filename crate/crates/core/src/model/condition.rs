/// Verdict of a property check, with a minimal counterexample when it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport<W> {
    pub verdict: bool,
    pub witness: Option<W>,
    pub details: String,
}

impl<W> ConditionReport<W> {
    pub fn pass(details: impl Into<String>) -> Self {
        ConditionReport {
            verdict: true,
            witness: None,
            details: details.into(),
        }
    }

    pub fn fail(witness: W, details: impl Into<String>) -> Self {
        ConditionReport {
            verdict: false,
            witness: Some(witness),
            details: details.into(),
        }
    }

    pub fn map_witness<V>(self, f: impl FnOnce(W) -> V) -> ConditionReport<V> {
        ConditionReport {
            verdict: self.verdict,
            witness: self.witness.map(f),
            details: self.details,
        }
    }
}
