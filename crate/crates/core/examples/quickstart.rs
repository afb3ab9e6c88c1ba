//! Minimise 2D Rastrigin with PAO and compare against PSO on the same seed.

use pao::{make_problem, run_pao, OptimizerId, PaoConfig, Registry};

fn main() -> pao::Result<()> {
    let problem = make_problem("rastrigin", 2)?;
    let record = run_pao(&problem, 100, 100, &PaoConfig::default(), 42)?;
    println!(
        "pao: best {:.3e} after {} evaluations",
        record.final_shifted_best().unwrap_or(f64::NAN),
        record.evals
    );

    let registry = Registry::with_defaults();
    let pso = registry
        .get(OptimizerId::Pso)
        .expect("registered by default");
    let record = pso.run(&problem, 100, 100, 42)?;
    println!(
        "pso: best {:.3e}",
        record.final_shifted_best().unwrap_or(f64::NAN)
    );
    Ok(())
}
