//! Eigenvectors of the truncated weak-field coupling are harmonic-oscillator
//! functions: the doubly dressed states |i λ⟩ = Σ_n φ_n(λ/√2) |n⟩.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, SymmetricEigen};

use dressed_rf::dressed_spectrum::{oscillator_phi, selection_rule, truncated_coupling_matrix, Manifold};

fn main() {
    let (k, g) = (60, 0.5);
    let m = DMatrix::from_row_slice(k, k, &truncated_coupling_matrix(Manifold::One, k, g));
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].abs().total_cmp(&eig.eigenvalues[b].abs()));

    for &j in order.iter().take(4) {
        let lambda = eig.eigenvalues[j] / g;
        let v: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
        let expect: Vec<f64> = (0..k).map(|n| oscillator_phi(n as u32, lambda / SQRT_2)).collect();
        let norm = expect.iter().map(|c| c * c).sum::<f64>().sqrt();
        let sign = v[0].signum() * expect[0].signum();
        let err = (0..k).map(|n| (sign * v[n] - expect[n] / norm).abs()).fold(0.0, f64::max);
        println!("λ = {lambda:>8.4}: max |eigenvector − φ_n(λ/√2)| = {err:.2e}");
    }

    println!("\n⟨1 λ|S₊|2 −λ⟩ {:?}", selection_rule(Manifold::One, 0.8, Manifold::Two, -0.8));
    println!("⟨2 λ|S₊|2 λ⟩  {:?}", selection_rule(Manifold::Two, 0.8, Manifold::Two, 0.8));
    println!("⟨1 λ|S₊|2 λ⟩  {:?}", selection_rule(Manifold::One, 0.8, Manifold::Two, 0.8));
}
