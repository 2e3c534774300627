//! Welch's t on published group summaries, under both readings of the
//! spread column.
//!
//!     cargo run --example welch

use curious_companion::sim::{improvement_pct, welch_t, SpreadKind, SurveySample};

fn main() -> curious_companion::Result<()> {
    let band = (-1.997, 1.997);
    for kind in [SpreadKind::Sd, SpreadKind::Variance] {
        let without = SurveySample {
            n: 33,
            mean: 4.45,
            spread: 1.351,
            spread_kind: kind,
        };
        let with = SurveySample {
            n: 30,
            mean: 5.60,
            spread: 1.753,
            spread_kind: kind,
        };
        let r = welch_t(&without, &with, band)?;
        let verdict = if r.significant {
            "Significant"
        } else {
            "Not significant"
        };
        println!("spread as {kind:?}: t = {:.3} ({verdict})", r.t);
    }
    println!("improvement: {:.1}%", improvement_pct(4.45, 5.60)?);
    Ok(())
}
