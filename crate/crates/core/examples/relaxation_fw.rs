//! Frank-Wolfe on the indefinite and convex relaxations, with different starts.

use graphmatch::frame::{nonseed_matches, SeedSet};
use graphmatch::models::{sample_correlated_gnp_pair, CorrGnpParams, PairOptions};
use graphmatch::relax::{gm_fw, FwConfig, FwStart, ObjectiveKind, RelaxProblem};
use graphmatch::rng;

fn main() -> graphmatch::Result<()> {
    let n = 80;
    let perm = rng::permutation(n, &mut rng::rng(1));
    let params = CorrGnpParams {
        options: PairOptions { permutation: Some(perm.clone()), ..PairOptions::default() },
        ..CorrGnpParams::new(n, 0.2, 0.8)
    };
    let (a, b) = sample_correlated_gnp_pair(&params, 7)?;
    let seeds = SeedSet::new((0..5).map(|v| (v, perm[v])).collect(), n, n)?;

    let runs = [
        ("indefinite, barycenter", ObjectiveKind::Indefinite, FwStart::Bari),
        ("indefinite, random start", ObjectiveKind::Indefinite, FwStart::Rds),
        ("indefinite, convex start", ObjectiveKind::Indefinite, FwStart::Convex),
        ("convex, barycenter", ObjectiveKind::Convex, FwStart::Bari),
    ];
    for (label, kind, start) in runs {
        let problem = RelaxProblem::new(&a, &b, seeds.clone(), None, kind)?;
        let config = FwConfig { start, max_iter: 30, rng_seed: 3, ..FwConfig::default() };
        let m = gm_fw(&problem, &config)?;
        let free = nonseed_matches(&m);
        let hits = free.iter().filter(|&&(i, j)| perm[i] == j).count();
        println!(
            "{label:<26} precision {:.3}  iterations {}  objective {:.1}",
            hits as f64 / free.len() as f64,
            m.details["iter"],
            m.details["objective"].as_f64().unwrap_or(f64::NAN),
        );
    }
    Ok(())
}
