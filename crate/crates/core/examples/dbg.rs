use betti_core::dec::{build_hodge_system, MeasureMode};
use betti_core::generate::Shape;
use nalgebra::DMatrix;

fn main() {
    let k = Shape::Torus(8, 8).generate().unwrap();
    let sys = build_hodge_system(&k, 1, MeasureMode::Uniform).unwrap();
    let a = sys.a.as_ref().unwrap().to_dense();
    let svd = a.clone().svd(true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let sig = DMatrix::from_diagonal(&svd.singular_values);
    let recon = &u * sig * &vt;
    println!("nalgebra SVD reconstruction error: {:.3e}", (recon - &a).amax());
    println!("U orthogonality: {:.3e}", (u.transpose() * &u - DMatrix::<f64>::identity(128, 128)).amax());
    // symmetric eigen route
    let eig = nalgebra::SymmetricEigen::new(a.clone());
    let recon = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues) * eig.eigenvectors.transpose();
    println!("SymmetricEigen reconstruction error: {:.3e}", (recon - &a).amax());
}
