//! PATH: from the convex solution toward the concave relaxation.

use graphmatch::frame::SeedSet;
use graphmatch::models::{sample_correlated_gnp_pair, CorrGnpParams, PairOptions};
use graphmatch::relax::{gm_path, ObjectiveKind, PathConfig, RelaxProblem};
use graphmatch::rng;

fn main() -> graphmatch::Result<()> {
    let n = 40;
    let perm = rng::permutation(n, &mut rng::rng(4));
    let params = CorrGnpParams {
        options: PairOptions { permutation: Some(perm.clone()), ..PairOptions::default() },
        ..CorrGnpParams::new(n, 0.3, 0.8)
    };
    let (a, b) = sample_correlated_gnp_pair(&params, 11)?;

    let problem = RelaxProblem::new(&a, &b, SeedSet::empty(), None, ObjectiveKind::Path { lambda: 0.0 })?;
    for step in [0.1, 0.02] {
        let config = PathConfig { lambda_step: step, ..PathConfig::default() };
        let m = gm_path(&problem, &config)?;
        let hits = m.corr().iter().filter(|&&(i, j)| perm[i] == j).count();
        println!(
            "lambda step {step}: {hits}/{n} correct, stopped at lambda {} after {} steps",
            m.details["lambda"], m.details["lambda_steps"]
        );
    }
    Ok(())
}
