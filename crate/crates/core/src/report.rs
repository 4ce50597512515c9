//! Outcome records produced by the verification routines.

/// Result of one named check. `witness` explains a failure by pointing at the
/// first differing coefficient; `sign` and `flag` are used by the sign-report
/// checks that compare a computed scalar against the literature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
    pub sign: Option<i64>,
    pub flag: Option<String>,
}

impl CheckOutcome {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckOutcome { name: name.into(), passed: true, witness: None, sign: None, flag: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: false,
            witness: Some(witness.into()),
            sign: None,
            flag: None,
        }
    }

    pub fn with_sign(mut self, sign: i64) -> Self {
        self.sign = Some(sign);
        self
    }

    pub fn with_flag(mut self, flag: impl Into<String>) -> Self {
        self.flag = Some(flag.into());
        self
    }
}

/// Folds a list of equality comparisons into one outcome, keeping the first
/// failure witness.
pub fn all_equal<I, T: PartialEq + std::fmt::Display>(
    name: impl Into<String>,
    cases: I,
) -> CheckOutcome
where
    I: IntoIterator<Item = (String, T, T)>,
{
    let name = name.into();
    for (label, got, want) in cases {
        if got != want {
            return CheckOutcome::fail(name, format!("{label}: got {got}, want {want}"));
        }
    }
    CheckOutcome::pass(name)
}
