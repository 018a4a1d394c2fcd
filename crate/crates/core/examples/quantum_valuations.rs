//! Valuations induced by a pure state, a density matrix and a partial
//! value assignment on the two-dimensional family A = diag(1, 2),
//! P = diag(0, 1), I.

use toposval::fixtures;
use toposval::linalg::{gq, int, rat, Matrix};
use toposval::quantum::{verify_generalised_valuation, DensityMatrix, StateVector};
use toposval::GeneralisedValuation;

fn main() -> toposval::Result<()> {
    let q3 = fixtures::q3();
    let (g, _) = q3.coarse_graining_presheaf();
    let (a, one) = q3.proposition("A", &[int(1)])?;
    let show = |nu: &GeneralisedValuation| nu.value(a, one as usize).display(q3.category()).to_string();

    for (name, v) in [("e0", [1, 0]), ("e1", [0, 1]), ("plus", [1, 1])] {
        let psi = StateVector::ray(v.iter().map(|&x| gq(int(x))).collect(), 0.0)?;
        let nu = q3.nu_psi(&g, &psi)?;
        println!("ν^ψ  ψ = {name:<5} A in {{1}} ↦ {}", show(&nu));
    }

    let half = gq(rat(1, 2));
    let mixed = DensityMatrix::new(Matrix::identity(2).scale(&half), 0.0)?;
    let nu = q3.nu_rho(&g, &mixed)?;
    println!("ν^ρ  ρ = 1/2    A in {{1}} ↦ {}", show(&nu));

    let v = q3.partial_valuation(&[("P", int(0)), ("I", int(1))])?;
    let nu = q3.nu_from_partial_valuation(&g, &v)?;
    println!("ν^V  V(P) = 0   A in {{1}} ↦ {}", show(&nu));
    println!("verification: {} violation(s)", verify_generalised_valuation(&q3, &nu).len());

    println!("\nfull table of ν^V:");
    for (obj, prop, sieve) in nu.table() {
        println!("  {obj} in {prop:<6} ↦ {{{}}}", sieve.join(", "));
    }
    Ok(())
}
