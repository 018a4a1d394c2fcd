//! Characteristic morphisms of sub-presheaves and the round trip back.

use std::sync::Arc;

use toposval::fixtures;
use toposval::{Omega, Subobject};

fn main() -> toposval::Result<()> {
    let x = fixtures::x2();
    let omega = Omega::new(Arc::new(fixtures::p2()));
    let cat = x.base();
    let k = Subobject::from_labels(x.clone(), &[("A", vec!["x"]), ("B", vec!["z"])])?;
    let chi = k.characteristic_morphism(&omega)?;
    for a in cat.objects() {
        for d in 0..x.size(a) {
            let s = omega.at(a).sieve(chi.apply(a, d));
            println!("χ_{}({}) = {}", cat.object_label(a), x.element_label(a, d), s.display(cat));
        }
    }
    let back = Subobject::from_characteristic(&chi, &omega)?;
    println!("round trip recovers K: {}", back == k);

    let not_closed = Subobject::from_labels(x, &[("A", vec!["x"])]);
    println!("K(A) = {{x}}, K(B) = {{}}: {}", not_closed.unwrap_err());
    Ok(())
}
