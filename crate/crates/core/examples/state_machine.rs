//! A turnstile as a guarded state machine.

use dataspace::agent::{run, validate_machine, Behaviors, StateDef, StateKind, StateMachineDef, TransitionDef};

#[derive(Default)]
struct Turnstile {
    coins: u32,
    passed: u32,
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut closed = StateDef::new("closed", StateKind::Final);
    closed.final_activity = Some("report".into());
    let def = StateMachineDef {
        name: "turnstile".into(),
        states: vec![
            StateDef::new("locked", StateKind::Initial),
            StateDef::new("unlocked", StateKind::Intermediate),
            closed,
        ],
        transitions: vec![
            TransitionDef::labeled("locked", "unlocked", "coin / count")?,
            TransitionDef::labeled("unlocked", "locked", "push / pass")?,
            TransitionDef::labeled("locked", "closed", "close [empty]")?,
        ],
    };
    let machine = validate_machine(def).map_err(|errs| format!("{errs:?}"))?;
    let behaviors = Behaviors::new()
        .guard("empty", |t: &Turnstile| Ok(t.coins == t.passed))
        .action("count", |t: &mut Turnstile| {
            t.coins += 1;
            Ok(())
        })
        .action("pass", |t: &mut Turnstile| {
            t.passed += 1;
            Ok(())
        })
        .action("report", |t: &mut Turnstile| {
            println!("closing after {} passes", t.passed);
            Ok(())
        });

    let mut ctx = Turnstile::default();
    let trace = run(&machine, &["coin", "push", "coin", "push", "close"], &mut ctx, &behaviors);
    for e in &trace.entries {
        println!("{:<10} via {:<6} fired {:?}", e.state, e.event.as_deref().unwrap_or("-"), e.actions);
    }
    println!("status {:?}, fired {:?}", trace.status, trace.fired());

    let trace = run(&machine, &["push"], &mut Turnstile::default(), &behaviors);
    println!("push while locked: {}", trace.error.unwrap());
    Ok(())
}
