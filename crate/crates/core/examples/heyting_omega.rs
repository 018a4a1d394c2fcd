//! Truth values at each stage of a small category and their Heyting
//! operations.

use std::sync::Arc;

use toposval::fixtures;
use toposval::Omega;

fn main() -> toposval::Result<()> {
    for (name, cat) in [("P2", fixtures::p2()), ("Q3", fixtures::q3_category())] {
        let omega = Omega::new(Arc::new(cat));
        let cat = omega.base();
        println!("{name}");
        for a in cat.objects() {
            let at = omega.at(a);
            let listed: Vec<String> = at.sieves().iter().map(|s| s.display(cat).to_string()).collect();
            println!("  Ω({}) = [{}]", cat.object_label(a), listed.join(", "));
        }
    }

    let omega = Omega::new(Arc::new(fixtures::p2()));
    let cat = omega.base();
    let a = cat.object_by_label("A")?;
    let at = omega.at(a);
    let f_only = cat.sieve_from_labels(a, &["f"])?;
    let show = |s: &toposval::Sieve| s.display(cat).to_string();
    println!("P2 at A:");
    println!("  ↓A ⇒ {{f}} = {}", show(&at.implies(at.top(), &f_only)?));
    println!("  ¬{{f}}     = {}", show(&at.neg(&f_only)?));
    println!("  ¬¬{{f}}    = {}", show(&at.neg(&at.neg(&f_only)?)?));
    println!("  {{f}} ∨ ¬{{f}} = {} (excluded middle fails)", show(&at.join(&f_only, &at.neg(&f_only)?)?));
    Ok(())
}
