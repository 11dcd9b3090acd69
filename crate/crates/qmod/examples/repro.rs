use num::complex::Complex;
use qmod::linalg;
use qmod::CMat;

fn main() {
    let ax = Complex::new(0.4, -0.2);
    let ay = Complex::new(0.7, 0.1);
    let bx = Complex::new(0.5345224838248503, -0.2672612419124252);
    let by = Complex::new(0.9354143466934844, 0.1336306209562126);
    // intertwining system for phi = (phi1, phi2): columns [phi1, phi2]
    let u = CMat::from_row_slice(2, 2, &[-bx, ax, -by, ay]);
    let det = ax * by - bx * ay;
    println!("det = {det:?}  |det| = {:.3e}", det.norm());
    let svd = nalgebra::SVD::new_unordered(u.clone(), false, false);
    println!("sigma (unordered): {:?}", svd.singular_values.as_slice());
    let ns = linalg::null_space(&u, None);
    println!("null space cols: {}", ns.ncols());
}
