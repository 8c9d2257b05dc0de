//! Held-out RMSE on a ratings file (`user,item,rating` or `user::item::rating`).
//! Without an argument a synthetic file is generated first.
//!
//! cargo run --release --example ratings -- path/to/ratings.dat

use svp::baselines::{als_solve, AlsConfig};
use svp::harness::experiments::surrogate_ratings;
use svp::harness::fixtures::rmse_on;
use svp::harness::{ingest_ratings, write_predictions};
use svp::solver::{svp_complete_entries, SolverConfig, StepPolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir();
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => {
            let data = surrogate_ratings(300, 400, 5, 0.2, 0.8, 1)?;
            let text: String = data
                .ratings
                .iter()
                .map(|&(u, i, r)| format!("{}::{}::{r}::0\n", data.users[u], data.items[i]))
                .collect();
            let path = dir.join("svp-ratings.dat");
            std::fs::write(&path, text)?;
            path
        }
    };
    let data = ingest_ratings(&path, None, 0.8, 2)?;
    let (train, test) = (data.train()?, data.test()?);
    println!("{} users, {} items, {} train, {} test", data.rows(), data.cols(), train.len(), test.len());

    let k = 5;
    let cfg = SolverConfig::new(k, StepPolicy::Decaying { c: 5.0 }).with_max_iterations(100);
    let (x, _) = svp_complete_entries(&train, &cfg)?;
    let (als, _) = als_solve(&train, &AlsConfig::new(k))?;
    println!("test RMSE: SVP {:.4}, ALS {:.4}", rmse_on(&x, &test), rmse_on(&als, &test));

    let out = dir.join("svp-predictions.csv");
    write_predictions(&data, &x, &out)?;
    println!("predictions written to {}", out.display());
    Ok(())
}
