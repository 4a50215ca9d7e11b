//! One test per acceptance criterion. Run with `--nocapture` to see the
//! PASS/FAIL lines.

use soft_theta::verify::run_criterion;

fn check(id: u32) {
    let r = run_criterion(id).expect("criterion id is valid");
    println!("{r}");
    assert!(r.passed, "{r}");
}

#[test]
fn criterion_01_jacobi_duality() {
    check(1);
}

#[test]
fn criterion_02_dirac_reduction() {
    check(2);
}

#[test]
fn criterion_03_gaussian_oracle() {
    check(3);
}

#[test]
fn criterion_04_planar_lattice_minimum() {
    check(4);
}

#[test]
fn criterion_05_triangular_barycentres() {
    check(5);
}

#[test]
fn criterion_06_honeycomb_centre() {
    check(6);
}

#[test]
fn criterion_07_orthorhombic_centre() {
    check(7);
}

#[test]
fn criterion_08_cubic_criticality() {
    check(8);
}

#[test]
fn criterion_09_bcc_fcc_alpha_scan() {
    check(9);
}

#[test]
fn criterion_10_deep_holes() {
    check(10);
}

#[test]
fn criterion_11_duality_transfer() {
    check(11);
}

#[test]
fn criterion_12_laplace_bridge() {
    check(12);
}

#[test]
fn criterion_13_scale_limit() {
    check(13);
}

#[test]
fn criterion_14_kernel_calibration() {
    check(14);
}
