//! Monte Carlo checks of how well random sampling preserves the energy of
//! incoherent matrices, and of the isometry constant of a Gaussian map.

use svp::analysis::{check_concentration, check_rip_incoherent, rip_density};
use svp::matrix::DenseMatrix;
use svp::operators::{estimate_isometry_constant, gaussian_ensemble};

fn main() -> svp::Result<()> {
    let (n, k, mu, delta) = (100, 2, 2.0, 0.5);
    println!("density needed by the bound: {:.3}", rip_density(n, n, k, mu, delta, 1.0));
    for p in [0.05, 0.2] {
        let report = check_rip_incoherent(n, n, k, mu, p, delta, 200, 1)?;
        println!(
            "p = {p}: {} of {} trials outside 1 +- {delta}, worst ratio {:.3}",
            report.violations, report.trials, report.worst_ratio
        );
    }

    let ones = DenseMatrix::from_fn(40, 40, |_, _| 1.0);
    let report = check_concentration(&ones, 0.2, 2000, 2)?;
    for level in &report.levels {
        println!(
            "deviation {:.2}: frequency {:.4}, bound {:.4}",
            level.delta,
            level.frequency(report.trials),
            level.bound
        );
    }

    let map = gaussian_ensemble(30, 30, 6 * 2 * 30, 3)?;
    println!("Gaussian map, rank-4 isometry estimate {:.3}", estimate_isometry_constant(&map, 4, 200, 4));
    Ok(())
}
