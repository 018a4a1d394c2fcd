//! A sieve-valued valuation is a natural transformation into Ω exactly when
//! it obeys functional composition. Breaking one value breaks both.

use toposval::fixtures;
use toposval::genval::nat_trans_of_valuation;
use toposval::linalg::int;
use toposval::Sieve;

fn main() -> toposval::Result<()> {
    let q3 = fixtures::q3();
    let (g, _) = q3.coarse_graining_presheaf();
    let v = q3.partial_valuation(&[("P", int(0)), ("I", int(1))])?;
    let nu = q3.nu_from_partial_valuation(&g, &v)?;
    report("ν^V", &nu);

    let cat = q3.category();
    let (i, top) = (q3.object("I")?, g.top(q3.object("I")?));
    let broken = nu.with_value(i, top, Sieve::empty(cat, i));
    report("ν^V with ν(I, top) = ∅", &broken);
    Ok(())
}

fn report(name: &str, nu: &toposval::GeneralisedValuation) {
    let func = nu.check_func();
    println!("{name}: FUNC violations = {}", func.len());
    for v in &func.violations {
        println!("  {v}");
    }
    match nat_trans_of_valuation(nu) {
        Ok(_) => println!("  natural transformation G → Ω: yes"),
        Err(w) => println!("  natural transformation G → Ω: no ({:?} at {} / {:?} / {})", w.kind, w.object, w.morphism, w.element),
    }
}
