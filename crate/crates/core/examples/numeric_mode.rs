//! Floating-point operators: spectral decomposition with a tolerance and
//! the functional relations it detects.

use toposval::linalg::{Complex64, Matrix};
use toposval::quantum::{spectral_decompose, BuildOptions, OperatorCategory, StateVector};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn main() -> toposval::Result<()> {
    let eps = 1e-9;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // A rotated by 45 degrees: eigenvalues 1 and 3 on (1, 1) and (1, -1)
    let a = Matrix::from_rows(vec![vec![c(2.0), c(-1.0)], vec![c(-1.0), c(2.0)]]).unwrap();
    let a2 = a.mul(&a);
    let ops = vec![
        spectral_decompose("A", &a, eps)?,
        spectral_decompose("A2", &a2, eps)?,
        spectral_decompose("I", &Matrix::identity(2), eps)?,
    ];
    for op in &ops {
        println!("{} eigenvalues {:?}", op.name(), op.eigenvalue_labels());
    }
    let cat = OperatorCategory::build(ops, &BuildOptions { epsilon: eps, ..BuildOptions::default() })?;
    for m in cat.category().morphisms().filter(|&m| !cat.category().is_identity(m)) {
        println!("{}", cat.category().label(m));
    }
    let (g, _) = cat.coarse_graining_presheaf();
    let psi = StateVector::new(vec![c(h), c(h)], eps)?;
    let nu = cat.nu_psi(&g, &psi)?;
    let (a, one) = cat.proposition("A", &[1.0])?;
    println!("ψ = (1,1)/√2: A in {{1}} ↦ {}", nu.value(a, one as usize).display(cat.category()));
    Ok(())
}
