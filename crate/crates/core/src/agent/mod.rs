//! Guarded state machines (`Trigger [Guard] / Action` transitions with entry,
//! exit, initial and final actions) and the discovery agent built on them.

mod discovery;
mod label;
mod machine;

pub use discovery::{
    discover, discover_source, discover_traced, discoverable_files, discovery_machine, DiscoveryError, DISCOVERY_EVENTS,
};
pub use label::{parse_transition_label, LabelSyntaxError, TransitionLabel};
pub use machine::{
    run, step, validate_machine, Behaviors, MachineError, RunStatus, RunTrace, StateDef, StateKind, StateMachineDef,
    Step, StepError, TraceEntry, TransitionDef, ValidatedMachine,
};
