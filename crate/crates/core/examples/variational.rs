// The defining infimum over decompositions f = f1 - f2, solved
// numerically and compared with the closed form.

use cstar_seminorms::algebra::BlockStructure;
use cstar_seminorms::random::{generate_positive, random_functional, rng_from_seed, GeneratorSpec, SpectrumSpec};
use cstar_seminorms::seminorms::{r_closed_form, r_variational, r_variational_with, Solver, VariationalOptions};
use cstar_seminorms::{Element, HermitianFunctional};

fn main() -> cstar_seminorms::Result<()> {
    let a = Element::diagonal(&[4.0, 1.0])?;
    let f = HermitianFunctional::diagonal(&[1.0, -1.0])?;
    let sol = r_variational(&a, &f, 1e-9)?;
    println!(
        "anchor: value {:.10} after {} Newton steps, residual {:.1e}",
        sol.value, sol.iterations, sol.residual
    );
    println!("  f1 diag {:?}", diag(&sol.f1));
    println!("  f2 diag {:?}", diag(&sol.f2));

    let spec = GeneratorSpec::new(vec![2, 3], SpectrumSpec::WithKernel { rank_deficiency: 1 }, 11);
    let a = generate_positive(&spec)?;
    let structure = BlockStructure::new(vec![2, 3])?;
    let f = random_functional(&structure, &mut rng_from_seed(5));
    let closed = r_closed_form(&a, &f)?;
    let barrier = r_variational(&a, &f, 1e-7)?;
    let gradient = r_variational_with(
        &a,
        &f,
        &VariationalOptions {
            solver: Solver::ProjectedGradient,
            max_iterations: 5_000,
            ..VariationalOptions::with_tol(1e-7)
        },
    );
    println!("singular a on (2,3): closed form {closed:.10}");
    println!("  barrier            {:.10} ({} steps)", barrier.value, barrier.iterations);
    match gradient {
        Ok(sol) => println!("  projected gradient {:.10} ({} steps)", sol.value, sol.iterations),
        Err(e) => println!("  projected gradient: {e}"),
    }
    assert!((barrier.value - closed).abs() <= 1e-5 * closed.max(1.0));
    Ok(())
}

fn diag(f: &HermitianFunctional) -> Vec<f64> {
    f.rep().iter().flat_map(|b| (0..b.dim()).map(move |i| b[(i, i)].re)).collect()
}
