//! The stimulation policy on its own: how long to wait, which strategy a
//! curiosity profile gets, and what the prompts look like.
//!
//!     cargo run --example stimulation

use curious_companion::fcm::ConceptId;
use curious_companion::policy::{
    classify_profile, mean_action_interval, render_prompt, strategy_for, wait_duration, CuriosityProfile, EventKind,
    InputEvent, ProfileThresholds, PromptSubject, StrategyTable, TemplateKind,
};

fn main() -> curious_companion::Result<()> {
    let events: Vec<InputEvent> = [
        (0, EventKind::KeyPress),
        (400, EventKind::MouseMove),
        (900, EventKind::MouseLeft),
    ]
    .into_iter()
    .chain([(1500, EventKind::KeyPress), (3300, EventKind::KeyPress)])
    .map(|(t, kind)| InputEvent { t, kind })
    .collect();
    let t = mean_action_interval(&events, 2000.0);
    println!("mean interval T = {t:.1} ms (mouse moves ignored)");
    for n in [1, 3, 5] {
        println!("  n = {n}: wait {} ms", wait_duration(t, n)?);
    }

    let subject = PromptSubject {
        concept_id: ConceptId(7),
        concept_name: "osmosis",
        activity_id: "a2",
        activity_name: "water molecule activity",
    };
    for responses in [vec![1, 2, 2, 3], vec![4, 4, 3, 5], vec![6, 7, 5, 6]] {
        let profile = CuriosityProfile::new(responses)?;
        let class = classify_profile(&profile, &ProfileThresholds::default());
        let ss = strategy_for(class, &StrategyTable::default());
        let prompt = render_prompt(TemplateKind::SurprisingConcept, subject, &ss, 0)?;
        println!("\nprofile mean {:.2} -> {class:?}, {ss:?}", profile.mean());
        println!("  {}", prompt.full_text());
    }

    let new = PromptSubject {
        concept_id: ConceptId(9),
        concept_name: "transpiration",
        activity_id: "a3",
        activity_name: "Leaf Lab",
    };
    let ss = strategy_for(
        classify_profile(&CuriosityProfile::new(vec![4])?, &ProfileThresholds::default()),
        &StrategyTable::default(),
    );
    println!(
        "\n{}",
        render_prompt(TemplateKind::NewConcept, new, &ss, 0)?.full_text()
    );
    Ok(())
}
