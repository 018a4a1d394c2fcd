//! The spectral presheaf of Cabello's 18 rays in C⁴ has no global section;
//! a qubit family has one.

use toposval::fixtures;
use toposval::quantum::KsOutcome;

fn main() {
    let ks = fixtures::ks18();
    println!("18-ray family: {} operators, {} morphisms", ks.category().object_count(), ks.category().morphism_count());
    match ks.ks_section_search() {
        KsOutcome::Exhausted(stats) => {
            println!("no global section: search exhausted after {} nodes, {} dead ends", stats.nodes, stats.dead_ends)
        }
        KsOutcome::Section(s) => println!("unexpected section {:?}", s.labels(&ks.spectral_presheaf())),
    }
    let partial = ks.spectral_presheaf().maximal_partial_elements();
    let largest = partial.iter().map(|s| s.domain().count()).max().unwrap_or(0);
    println!("{} maximal partial elements, the largest defined on {largest} operators", partial.len());

    let qubit = fixtures::qubit();
    if let KsOutcome::Section(s) = qubit.ks_section_search() {
        println!("qubit family section: {:?}", s.labels(&qubit.spectral_presheaf()));
    }
}
