//! Candidate spectra of geodesic annuli from angular modes 0 and 1, and the
//! conservative main-inequality check they support.

use rank1_neumann::radial::solve_annulus;
use rank1_neumann::verifier::{check_main_inequality, CheckInputs, Provenance};
use rank1_neumann::Space;

fn main() -> rank1_neumann::Result<()> {
    for name in ["K1_n3_nc", "K2_n2_nc"] {
        let space: Space = name.parse()?;
        let c = space.theorem_count();
        for (r_in, r_out) in [(0.5, 1.5), (1.0, 2.0)] {
            let ann = solve_annulus(&space, r_in, r_out, &[0, 1], c + 2)?;
            let modes: Vec<String> = ann
                .modes
                .iter()
                .map(|m| format!("{:.5}(mode {}, x{})", m.eigenvalue, m.mode, m.multiplicity))
                .collect();
            println!("{name} ({r_in}, {r_out}): {}", modes.join(" "));
            let inputs = CheckInputs { space: name.into(), domain_hash: String::new(), h: None, solver_tags: vec![] };
            let (check, info) = check_main_inequality(&space, ann.volume()?, &ann.candidate_spectrum(), Provenance::AnnulusCandidate, false, &inputs)?;
            println!("  sum 1/mu_i = {:.6} vs {}/mu1(B) = {:.6}: {:?}", info.sum, c, info.bound, check.status);
        }
    }
    Ok(())
}
