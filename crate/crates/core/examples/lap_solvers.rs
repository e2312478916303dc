//! Dense and sparse linear assignment.

use graphmatch::lap::{do_lap, solve_lap_dense, CostMatrix, LapMethod, Sense};
use nalgebra::DMatrix;

fn main() -> graphmatch::Result<()> {
    let c = DMatrix::from_row_slice(4, 4, &[
        4.0, 1.0, 3.0, 2.0,
        2.0, 0.0, 5.0, 3.0,
        3.0, 2.0, 2.0, 4.0,
        1.0, 3.0, 4.0, 0.0,
    ]);
    let min = solve_lap_dense(&CostMatrix::dense(c.clone()), Sense::Min)?;
    let max = solve_lap_dense(&CostMatrix::dense(c.clone()), Sense::Max)?;
    println!("min {:?} -> {}", min.mapping, min.objective);
    println!("max {:?} -> {}", max.mapping, max.objective);

    // wide matrices: every row gets a distinct column
    let wide = DMatrix::from_row_slice(2, 4, &[5.0, 1.0, 7.0, 3.0, 2.0, 1.0, 9.0, 8.0]);
    let a = solve_lap_dense(&CostMatrix::dense(wide), Sense::Min)?;
    println!("2x4 {:?} -> {}", a.mapping, a.objective);

    // only stored entries are allowed
    let sparse = CostMatrix::sparse(3, 3, [(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 2, 4.0), (2, 1, 3.0), (2, 2, 1.0)])?;
    for method in [LapMethod::Sparse, LapMethod::Dense, LapMethod::Auto] {
        let a = do_lap(&sparse, method, Sense::Min)?;
        println!("{method}: {:?} -> {} (ran {})", a.mapping, a.objective, a.method);
    }

    let stuck = CostMatrix::sparse(2, 2, [(0, 0, 1.0), (1, 0, 1.0)])?;
    match do_lap(&stuck, LapMethod::Sparse, Sense::Min) {
        Ok(a) => println!("unexpected {:?}", a.mapping),
        Err(e) => println!("infeasible: {e}"),
    }
    Ok(())
}
