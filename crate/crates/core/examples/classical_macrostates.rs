//! Classical valuations on three states: a microstate, a macrostate, the
//! partial valuation a macrostate determines, and a probability measure.

use toposval::classical::ClassicalMeasure;
use toposval::fixtures;
use toposval::linalg::{int, rat};

fn main() -> toposval::Result<()> {
    let c3 = fixtures::c3();
    let (g, _) = c3.coarse_graining_presheaf();
    let cat = c3.category();
    let (a, one_three) = c3.proposition("A", &[int(1), int(3)])?;
    let show = |nu: &toposval::GeneralisedValuation| nu.value(a, one_three as usize).display(cat).to_string();

    for s in c3.space().states() {
        println!("ν^{s:<3} A in {{1,3}} ↦ {}", show(&c3.nu_microstate(&g, s)?));
    }
    let r13 = c3.space().macrostate(&["s1", "s3"])?;
    println!("ν^R   R = {{s1,s3}} A in {{1,3}} ↦ {}", show(&c3.nu_macrostate(&g, &r13)?));
    let v = c3.partial_valuation_from_macrostate(&r13);
    println!("ν^V   V from R    A in {{1,3}} ↦ {}", show(&c3.nu_from_partial_valuation(&g, &v)?));

    let half = ClassicalMeasure::new(vec![rat(1, 2), rat(1, 2), int(0)])?;
    let (a, one) = c3.proposition("A", &[int(1)])?;
    println!("ν^ρ   ρ = (1/2, 1/2, 0) A in {{1}} ↦ {}", c3.nu_measure(&g, &half)?.value(a, one as usize).display(cat));

    let sections = c3.value_presheaf().global_sections();
    println!("global sections of the value presheaf: {}", sections.len());
    for s in &sections {
        println!("  {:?}", s.labels(&c3.value_presheaf()));
    }
    Ok(())
}
