use crate::expr::{is_zero, Expr, Verdict, ZeroCheck, ZeroTest};

/// A named quantity whose vanishing is being tested.
#[derive(Debug, Clone)]
pub struct Residual {
    pub name: String,
    /// Human-readable definition, e.g. `K0 + K1'/2`.
    pub formula: String,
    pub expr: Expr,
    pub check: ZeroCheck,
    /// Caveat attached to the verdict, if any.
    pub note: Option<String>,
}

impl Residual {
    pub fn new(name: impl Into<String>, formula: impl Into<String>, expr: Expr, test: &ZeroTest) -> Self {
        let check = is_zero(&expr, test);
        Residual {
            name: name.into(),
            formula: formula.into(),
            expr,
            check,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn verdict(&self) -> Verdict {
        self.check.verdict
    }

    pub fn is_zero(&self) -> bool {
        self.check.is_zero()
    }
}
