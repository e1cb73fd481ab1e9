use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabelSyntaxError {
    #[error("transition label `{0}` has no trigger")]
    EmptyTrigger(String),
    #[error("transition label `{0}` has an unbalanced guard bracket")]
    UnbalancedBracket(String),
    #[error("transition label `{0}` has an empty guard")]
    EmptyGuard(String),
    #[error("transition label `{0}` has an empty action")]
    EmptyAction(String),
    #[error("unexpected `{found}` in transition label `{label}`")]
    Unexpected { label: String, found: String },
}

/// The three parts of a `Trigger [Guard] / Action` label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionLabel {
    pub trigger: String,
    pub guard: Option<String>,
    pub action: Option<String>,
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.trigger)?;
        if let Some(g) = &self.guard {
            write!(f, " [{g}]")?;
        }
        if let Some(a) = &self.action {
            write!(f, " / {a}")?;
        }
        Ok(())
    }
}

/// Parses `Trigger [Guard] / Action`; guard and action are optional and
/// surrounding whitespace is ignored.
pub fn parse_transition_label(text: &str) -> Result<TransitionLabel, LabelSyntaxError> {
    let label = || text.to_string();
    let (head, guard, tail) = match text.find('[') {
        Some(open) => {
            let close =
                text[open..].find(']').map(|i| open + i).ok_or_else(|| LabelSyntaxError::UnbalancedBracket(label()))?;
            let guard = text[open + 1..close].trim();
            if guard.is_empty() {
                return Err(LabelSyntaxError::EmptyGuard(label()));
            }
            if guard.contains('[') {
                return Err(LabelSyntaxError::UnbalancedBracket(label()));
            }
            let tail = text[close + 1..].trim();
            if !tail.is_empty() && !tail.starts_with('/') {
                return Err(LabelSyntaxError::Unexpected { label: label(), found: tail.to_string() });
            }
            (&text[..open], Some(guard.to_string()), tail)
        }
        None => match text.find('/') {
            Some(slash) => (&text[..slash], None, &text[slash..]),
            None => (text, None, ""),
        },
    };
    if head.contains(']') || tail.contains('[') || tail.contains(']') {
        return Err(LabelSyntaxError::UnbalancedBracket(label()));
    }
    let trigger = head.trim();
    if trigger.is_empty() {
        return Err(LabelSyntaxError::EmptyTrigger(label()));
    }
    if trigger.contains('/') {
        return Err(LabelSyntaxError::Unexpected { label: label(), found: "/".into() });
    }
    let action = match tail.strip_prefix('/') {
        Some(a) if a.trim().is_empty() => return Err(LabelSyntaxError::EmptyAction(label())),
        Some(a) => Some(a.trim().to_string()),
        None => None,
    };
    Ok(TransitionLabel { trigger: trigger.to_string(), guard, action })
}
