use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::label::{parse_transition_label, LabelSyntaxError, TransitionLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Initial,
    Intermediate,
    Final,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct StateDef {
    pub name: String,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry_action: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit_action: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_activity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_activity: Option<String>,
}

impl StateDef {
    pub fn new(name: impl Into<String>, kind: StateKind) -> StateDef {
        StateDef {
            name: name.into(),
            kind,
            entry_action: None,
            exit_action: None,
            initial_activity: None,
            final_activity: None,
        }
    }
}

/// A transition. In a machine file it is written either with a `label` in
/// `Trigger [Guard] / Action` form or with separate fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TransitionDoc", into = "TransitionDoc")]
pub struct TransitionDef {
    pub from: String,
    pub to: String,
    pub trigger: String,
    pub guard: Option<String>,
    pub action: Option<String>,
}

impl TransitionDef {
    /// Builds a transition from a `Trigger [Guard] / Action` label.
    pub fn labeled(from: &str, to: &str, label: &str) -> Result<TransitionDef, LabelSyntaxError> {
        let TransitionLabel { trigger, guard, action } = parse_transition_label(label)?;
        Ok(TransitionDef { from: from.into(), to: to.into(), trigger, guard, action })
    }

    pub fn label(&self) -> TransitionLabel {
        TransitionLabel { trigger: self.trigger.clone(), guard: self.guard.clone(), action: self.action.clone() }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionDoc {
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trigger: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    guard: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    action: Option<String>,
}

impl TryFrom<TransitionDoc> for TransitionDef {
    type Error = String;

    fn try_from(d: TransitionDoc) -> Result<TransitionDef, String> {
        match (d.label, d.trigger) {
            (Some(label), None) if d.guard.is_none() && d.action.is_none() => {
                TransitionDef::labeled(&d.from, &d.to, &label).map_err(|e| e.to_string())
            }
            (None, Some(trigger)) => {
                Ok(TransitionDef { from: d.from, to: d.to, trigger, guard: d.guard, action: d.action })
            }
            _ => Err(format!("transition {} -> {} needs either `label` or `trigger` (not both)", d.from, d.to)),
        }
    }
}

impl From<TransitionDef> for TransitionDoc {
    fn from(t: TransitionDef) -> TransitionDoc {
        let label = t.label().to_string();
        TransitionDoc { from: t.from, to: t.to, label: Some(label), trigger: None, guard: None, action: None }
    }
}

/// A state machine as data: states plus labelled transitions. Guards and
/// actions are ids bound to code through [`Behaviors`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateMachineDef {
    #[serde(default)]
    pub name: String,
    pub states: Vec<StateDef>,
    pub transitions: Vec<TransitionDef>,
}

impl StateMachineDef {
    pub fn from_json(text: &str) -> Result<StateMachineDef, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("machine serializes");
        s.push('\n');
        s
    }

    pub fn state(&self, name: &str) -> Option<&StateDef> {
        self.states.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MachineError {
    #[error("machine has no initial state")]
    NoInitialState,
    #[error("machine has several initial states: {}", .0.join(", "))]
    MultipleInitialStates(Vec<String>),
    #[error("machine has no final state")]
    NoFinalState,
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("transition {index} refers to undeclared state `{state}`")]
    UnknownState { index: usize, state: String },
    #[error("transition {index} has an empty trigger")]
    EmptyTrigger { index: usize },
    #[error("{kind:?} state `{state}` cannot carry `{field}`")]
    MisplacedAction { state: String, kind: StateKind, field: &'static str },
    #[error("state `{from}` has several transitions on `{trigger}` with guard {}", guard.as_deref().unwrap_or("(none)"))]
    Nondeterminism { from: String, trigger: String, guard: Option<String> },
    #[error("state `{0}` is unreachable from the initial state")]
    Unreachable(String),
}

/// A machine that passed [`validate_machine`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedMachine {
    def: StateMachineDef,
    initial: usize,
}

impl ValidatedMachine {
    pub fn def(&self) -> &StateMachineDef {
        &self.def
    }

    pub fn initial(&self) -> &StateDef {
        &self.def.states[self.initial]
    }

    fn state(&self, name: &str) -> &StateDef {
        self.def.state(name).expect("validated machine names only declared states")
    }
}

/// Checks the structural invariants, determinism and reachability. Two
/// transitions out of one state on one trigger conflict when their guards
/// are identical or both absent; distinct guards are assumed disjoint.
pub fn validate_machine(def: StateMachineDef) -> Result<ValidatedMachine, Vec<MachineError>> {
    let mut errors = Vec::new();
    let mut names = BTreeSet::new();
    for s in &def.states {
        if !names.insert(s.name.as_str()) {
            errors.push(MachineError::DuplicateState(s.name.clone()));
        }
        let misplaced = |field: &'static str, present: bool| {
            present.then(|| MachineError::MisplacedAction { state: s.name.clone(), kind: s.kind, field })
        };
        let checks = match s.kind {
            StateKind::Initial => [
                misplaced("entryAction", s.entry_action.is_some()),
                misplaced("exitAction", s.exit_action.is_some()),
                misplaced("finalActivity", s.final_activity.is_some()),
            ],
            StateKind::Final => [
                misplaced("entryAction", s.entry_action.is_some()),
                misplaced("exitAction", s.exit_action.is_some()),
                misplaced("initialActivity", s.initial_activity.is_some()),
            ],
            StateKind::Intermediate => [
                misplaced("initialActivity", s.initial_activity.is_some()),
                misplaced("finalActivity", s.final_activity.is_some()),
                None,
            ],
        };
        errors.extend(checks.into_iter().flatten());
    }
    let initials: Vec<usize> =
        def.states.iter().enumerate().filter(|(_, s)| s.kind == StateKind::Initial).map(|(i, _)| i).collect();
    match initials.len() {
        0 => errors.push(MachineError::NoInitialState),
        1 => {}
        _ => errors
            .push(MachineError::MultipleInitialStates(initials.iter().map(|&i| def.states[i].name.clone()).collect())),
    }
    if !def.states.iter().any(|s| s.kind == StateKind::Final) {
        errors.push(MachineError::NoFinalState);
    }
    let mut seen = BTreeSet::new();
    for (index, t) in def.transitions.iter().enumerate() {
        for end in [&t.from, &t.to] {
            if !names.contains(end.as_str()) {
                errors.push(MachineError::UnknownState { index, state: end.clone() });
            }
        }
        if t.trigger.trim().is_empty() {
            errors.push(MachineError::EmptyTrigger { index });
        }
        if !seen.insert((&t.from, &t.trigger, &t.guard)) {
            let e = MachineError::Nondeterminism {
                from: t.from.clone(),
                trigger: t.trigger.clone(),
                guard: t.guard.clone(),
            };
            if !errors.contains(&e) {
                errors.push(e);
            }
        }
    }
    if let [initial] = initials.as_slice() {
        let mut reached = BTreeSet::from([def.states[*initial].name.as_str()]);
        let mut queue = VecDeque::from([def.states[*initial].name.as_str()]);
        while let Some(s) = queue.pop_front() {
            for t in def.transitions.iter().filter(|t| t.from == s) {
                if reached.insert(t.to.as_str()) {
                    queue.push_back(&t.to);
                }
            }
        }
        for s in &def.states {
            if !reached.contains(s.name.as_str()) {
                errors.push(MachineError::Unreachable(s.name.clone()));
            }
        }
    }
    if errors.is_empty() {
        let initial = initials[0];
        Ok(ValidatedMachine { def, initial })
    } else {
        Err(errors)
    }
}

type Guard<C> = Box<dyn Fn(&C) -> Result<bool, String> + Send + Sync>;
type Action<C> = Box<dyn Fn(&mut C) -> Result<(), String> + Send + Sync>;

/// Host callables bound to the guard and action ids a machine mentions.
pub struct Behaviors<C> {
    guards: BTreeMap<String, Guard<C>>,
    actions: BTreeMap<String, Action<C>>,
}

impl<C> Default for Behaviors<C> {
    fn default() -> Self {
        Behaviors { guards: BTreeMap::new(), actions: BTreeMap::new() }
    }
}

impl<C> fmt::Debug for Behaviors<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Behaviors")
            .field("guards", &self.guards.keys().collect::<Vec<_>>())
            .field("actions", &self.actions.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl<C> Behaviors<C> {
    pub fn new() -> Behaviors<C> {
        Behaviors::default()
    }

    pub fn guard(mut self, id: &str, f: impl Fn(&C) -> Result<bool, String> + Send + Sync + 'static) -> Self {
        self.guards.insert(id.to_string(), Box::new(f));
        self
    }

    pub fn action(mut self, id: &str, f: impl Fn(&mut C) -> Result<(), String> + Send + Sync + 'static) -> Self {
        self.actions.insert(id.to_string(), Box::new(f));
        self
    }

    fn eval_guard(&self, id: &str, ctx: &C) -> Result<bool, StepError> {
        let g = self.guards.get(id).ok_or_else(|| StepError::UnboundGuard(id.to_string()))?;
        g(ctx).map_err(|message| StepError::GuardEval { guard: id.to_string(), message })
    }

    fn fire(&self, id: &str, ctx: &mut C) -> Result<(), StepError> {
        let a = self.actions.get(id).ok_or_else(|| StepError::UnboundAction(id.to_string()))?;
        a(ctx).map_err(|message| StepError::ActionFailed { action: id.to_string(), message })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("no transition from `{state}` on `{event}`")]
    NoTransition { state: String, event: String },
    #[error("several transitions from `{state}` on `{event}` are enabled")]
    AmbiguousTransition { state: String, event: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("guard `{guard}` failed: {message}")]
    GuardEval { guard: String, message: String },
    #[error("action `{action}` failed: {message}")]
    ActionFailed { action: String, message: String },
    #[error("guard `{0}` is not bound")]
    UnboundGuard(String),
    #[error("action `{0}` is not bound")]
    UnboundAction(String),
    #[error("final state `{state}` reached with {remaining} event(s) left")]
    LeftoverEvents { state: String, remaining: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub next: String,
    /// Ids fired, in order: exit action, transition action, entry action.
    pub actions: Vec<String>,
}

/// Takes the single enabled transition out of `current` on `event`.
pub fn step<C>(
    machine: &ValidatedMachine,
    current: &str,
    event: &str,
    ctx: &mut C,
    behaviors: &Behaviors<C>,
) -> Result<Step, StepError> {
    let from = machine.def.state(current).ok_or_else(|| StepError::UnknownState(current.to_string()))?;
    let mut enabled = Vec::new();
    for t in machine.def.transitions.iter().filter(|t| t.from == current && t.trigger == event) {
        let open = match &t.guard {
            Some(g) => behaviors.eval_guard(g, ctx)?,
            None => true,
        };
        if open {
            enabled.push(t);
        }
    }
    let t = match enabled.as_slice() {
        [t] => *t,
        [] => return Err(StepError::NoTransition { state: current.to_string(), event: event.to_string() }),
        _ => return Err(StepError::AmbiguousTransition { state: current.to_string(), event: event.to_string() }),
    };
    let to = machine.state(&t.to);
    let mut actions = Vec::new();
    for id in [&from.exit_action, &t.action, &to.entry_action].into_iter().flatten() {
        behaviors.fire(id, ctx)?;
        actions.push(id.clone());
    }
    Ok(Step { next: t.to.clone(), actions })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub state: String,
    /// Event that led here; `None` for the initial entry.
    pub event: Option<String>,
    /// Exit, transition and entry actions fired on the way in.
    pub actions: Vec<String>,
    /// Initial or final activity fired in this state.
    pub activity: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Finished,
    Stuck,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub entries: Vec<TraceEntry>,
    pub status: RunStatus,
    pub error: Option<StepError>,
}

impl RunTrace {
    pub fn final_state(&self) -> &str {
        &self.entries.last().expect("trace starts at the initial state").state
    }

    /// All fired ids in order, activities included.
    pub fn fired(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.extend(e.actions.iter().map(String::as_str));
            out.extend(e.activity.as_deref());
        }
        out
    }
}

/// Fires the initial activity, then steps through `events`. Reaching a final
/// state fires its final activity and ends the run; events left over at that
/// point are an error. Running out of events elsewhere leaves the run stuck.
pub fn run<C, E: AsRef<str>>(
    machine: &ValidatedMachine,
    events: &[E],
    ctx: &mut C,
    behaviors: &Behaviors<C>,
) -> RunTrace {
    let initial = machine.initial();
    let mut trace = RunTrace {
        entries: vec![TraceEntry { state: initial.name.clone(), event: None, actions: Vec::new(), activity: None }],
        status: RunStatus::Stuck,
        error: None,
    };
    let fail = |mut trace: RunTrace, e: StepError| {
        trace.status = RunStatus::Error;
        trace.error = Some(e);
        trace
    };
    if let Some(a) = &initial.initial_activity {
        if let Err(e) = behaviors.fire(a, ctx) {
            return fail(trace, e);
        }
        trace.entries[0].activity = Some(a.clone());
    }
    let mut current = initial.name.clone();
    for (i, event) in events.iter().enumerate() {
        let event = event.as_ref();
        let s = match step(machine, &current, event, ctx, behaviors) {
            Ok(s) => s,
            Err(e) => return fail(trace, e),
        };
        trace.entries.push(TraceEntry {
            state: s.next.clone(),
            event: Some(event.to_string()),
            actions: s.actions,
            activity: None,
        });
        current = s.next;
        let state = machine.state(&current);
        if state.kind == StateKind::Final {
            if let Some(a) = &state.final_activity {
                if let Err(e) = behaviors.fire(a, ctx) {
                    return fail(trace, e);
                }
                trace.entries.last_mut().expect("just pushed").activity = Some(a.clone());
            }
            let remaining = events.len() - i - 1;
            if remaining > 0 {
                return fail(trace, StepError::LeftoverEvents { state: current, remaining });
            }
            trace.status = RunStatus::Finished;
            return trace;
        }
    }
    trace
}
