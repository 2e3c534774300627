//! Membership degrees and signed fuzzy labels for a sweep of weights.
//!
//!     cargo run --example fuzzify

use curious_companion::fcm::{fuzzify_weight, membership};

fn main() -> curious_companion::Result<()> {
    println!("{:>6}  {:>6} {:>6} {:>6}  label", "w", "low", "medium", "high");
    for k in -10..=10 {
        let w = f64::from(k) / 10.0;
        let m = membership(w.abs())?;
        println!(
            "{w:>6.2}  {:>6.3} {:>6.3} {:>6.3}  {}",
            m.beta,
            m.theta,
            m.gamma,
            fuzzify_weight(w)?
        );
    }
    // boundary points sit in two sets with equal degree; the lower one wins
    for w in [0.35, 1.0 / 3.0, 0.65] {
        println!("{w:.4} -> {}", fuzzify_weight(w)?);
    }
    Ok(())
}
