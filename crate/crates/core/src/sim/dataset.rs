//! Gaussian dataset generation in the covariance eigenbasis.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectrum::SpectralDensity;

/// Per-coordinate eigenvalues for dimension d.
///
/// Coordinates are allocated to the spectral atoms by the largest
/// remainder rule: each atom gets floor(w_i d) coordinates, and the
/// leftover ones go to the atoms with the largest fractional parts
/// (ties resolved toward the lower atom index). The allocation is a
/// pure function of (spectrum, d), so datasets are reproducible and
/// weights that do not split d evenly are never an error.
pub fn coordinate_eigenvalues(spectrum: &SpectralDensity<f64>, d: u32) -> Vec<f64> {
    let atoms = spectrum.atoms();
    let mut counts: Vec<u32> = Vec::with_capacity(atoms.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(atoms.len());
    let mut assigned = 0u32;
    for (idx, &(_, w)) in atoms.iter().enumerate() {
        let exact = w * d as f64;
        let floor = exact.floor() as u32;
        counts.push(floor);
        assigned += floor;
        remainders.push((idx, exact - exact.floor()));
    }
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut leftover = d - assigned;
    for &(idx, _) in remainders.iter().cycle() {
        if leftover == 0 {
            break;
        }
        counts[idx] += 1;
        leftover -= 1;
    }
    let mut eigenvalues = Vec::with_capacity(d as usize);
    for (idx, &(lambda, _)) in atoms.iter().enumerate() {
        eigenvalues.extend(std::iter::repeat(lambda).take(counts[idx] as usize));
    }
    debug_assert_eq!(eigenvalues.len(), d as usize);
    eigenvalues
}

/// One point with independent coordinates of variance λ_j.
pub fn sample_point(eigenvalues: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    eigenvalues
        .iter()
        .map(|&l| {
            let z: f64 = StandardNormal.sample(rng);
            z * l.sqrt()
        })
        .collect()
}

/// n points, row-major n×d.
pub fn sample_points(eigenvalues: &[f64], n: u64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = eigenvalues.len();
    let mut out = Vec::with_capacity(n as usize * d);
    for _ in 0..n {
        for &l in eigenvalues {
            let z: f64 = StandardNormal.sample(rng);
            out.push(z * l.sqrt());
        }
    }
    out
}
