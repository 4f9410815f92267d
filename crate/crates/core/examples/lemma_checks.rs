//! Pointwise identities, gradient bounds and the ball lemmas over the
//! default space set, summarized per claim.

use std::collections::BTreeMap;

use rank1_neumann::run::default_lemma_spaces;
use rank1_neumann::verifier::{check_lemmas, LemmaGrids, Summary};

fn main() -> rank1_neumann::Result<()> {
    let spaces = default_lemma_spaces();
    let checks = check_lemmas(&spaces, &LemmaGrids::default())?;
    let mut worst: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for c in &checks {
        let claim = c.id.split('[').next().unwrap().to_string();
        let e = worst.entry(claim).or_insert((f64::INFINITY, 0));
        e.0 = e.0.min(c.margin);
        e.1 += 1;
    }
    for (claim, (margin, n)) in &worst {
        println!("{claim:<24} {n:>4} checks, smallest margin {margin:.3e}");
    }
    let s = Summary::of(&checks);
    println!("{} spaces: {} passed, {} failed", spaces.len(), s.passed, s.failed);
    Ok(())
}
