//! Small dense gate matrices and Pauli-transfer utilities.
//!
//! These are the circuit-model oracles the numerical engine is checked
//! against; they are built from explicit 2x2 blocks, independent of the
//! bitmask algebra.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub type C64 = Complex64;
pub type Gate2 = Matrix2<Complex64>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity2() -> Gate2 {
    Gate2::identity()
}

pub fn hadamard() -> Gate2 {
    let s = 1.0 / 2.0f64.sqrt();
    Gate2::new(c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.))
}

pub fn pauli_x() -> Gate2 {
    Gate2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
}

pub fn pauli_y() -> Gate2 {
    Gate2::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
}

pub fn pauli_z() -> Gate2 {
    Gate2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
}

/// `U(θ) = exp(−iθZ/2)`.
pub fn u_z(theta: f64) -> Gate2 {
    Gate2::new(
        C64::from_polar(1.0, -theta / 2.0),
        c(0., 0.),
        c(0., 0.),
        C64::from_polar(1.0, theta / 2.0),
    )
}

/// The per-step chain primitive `U(θ)·H` (Hadamard first, then the rotation).
pub fn step_gate(theta: f64) -> Gate2 {
    u_z(theta) * hadamard()
}

/// `CZ` on two qubits, first factor most significant.
pub fn cz() -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::identity(4, 4);
    m[(3, 3)] = c(-1., 0.);
    m
}

/// `(H⊗H)·CZ`, the two-qubit gate-set element.
pub fn czh_element() -> DMatrix<C64> {
    let h = DMatrix::from_row_slice(2, 2, hadamard().as_slice());
    // nalgebra stores column-major; H is symmetric so the slice order is fine.
    h.kronecker(&h) * cz()
}

/// `(H⊗H)·CZ·(H⊗H)`, the gate enacted by the raw six-qubit block.
pub fn h2_block_gate() -> DMatrix<C64> {
    let h = DMatrix::from_row_slice(2, 2, hadamard().as_slice());
    let hh = h.kronecker(&h);
    &hh * cz() * &hh
}

/// Embeds a single-qubit gate at `target` (0-based, qubit 0 most significant)
/// into an `m`-qubit unitary.
pub fn embed_single(gate: &Gate2, m: usize, target: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(2, 2, |r, q| gate[(r, q)]);
    let eye = DMatrix::<C64>::identity(2, 2);
    let mut out = DMatrix::<C64>::identity(1, 1);
    for q in 0..m {
        out = out.kronecker(if q == target { &g } else { &eye });
    }
    out
}

/// Embeds a two-qubit gate on (a, b) into an `m`-qubit unitary by index
/// arithmetic; `a` supplies the more significant gate bit.
pub fn embed_two(gate: &DMatrix<C64>, m: usize, a: usize, b: usize) -> DMatrix<C64> {
    assert!(a < m && b < m && a != b);
    let dim = 1usize << m;
    let bit = |idx: usize, q: usize| (idx >> (m - 1 - q)) & 1;
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for col in 0..dim {
        let ga = bit(col, a);
        let gb = bit(col, b);
        let gcol = ga * 2 + gb;
        for grow in 0..4 {
            let coeff = gate[(grow, gcol)];
            if coeff == c(0., 0.) {
                continue;
            }
            let mut row = col;
            let ra = grow >> 1;
            let rb = grow & 1;
            row = (row & !(1 << (m - 1 - a))) | (ra << (m - 1 - a));
            row = (row & !(1 << (m - 1 - b))) | (rb << (m - 1 - b));
            out[(row, col)] += coeff;
        }
    }
    out
}

/// Pauli-transfer row of a single-qubit unitary: expands `g σ g†` over
/// (X, Y, Z). Rows are indexed by the source axis in the same order.
pub fn transfer_matrix(g: &Gate2) -> [[f64; 3]; 3] {
    let sigmas = [pauli_x(), pauli_y(), pauli_z()];
    let mut out = [[0.0; 3]; 3];
    for (i, s) in sigmas.iter().enumerate() {
        let conj = g * s * g.adjoint();
        for (j, t) in sigmas.iter().enumerate() {
            // tr(t† conj)/2 is real for unitary conjugation of Hermitian input.
            let tr = (t.adjoint() * conj).trace();
            out[i][j] = tr.re / 2.0;
        }
    }
    out
}

/// Expands a Hermitian traceless 2x2 matrix over (X, Y, Z).
pub fn pauli_components(a: &Gate2) -> [f64; 3] {
    let sigmas = [pauli_x(), pauli_y(), pauli_z()];
    let mut out = [0.0; 3];
    for (j, s) in sigmas.iter().enumerate() {
        out[j] = (s.adjoint() * a).trace().re / 2.0;
    }
    out
}

/// Dense matrix of a Pauli word on its own qubits (oracle-grade, built by
/// Kronecker products with qubit 1 most significant).
pub fn dense_pauli(word: &PauliString) -> DMatrix<C64> {
    let x = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
    let z = DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
    let eye = DMatrix::<C64>::identity(2, 2);
    let mut m = DMatrix::<C64>::identity(1, 1);
    for site in 1..=word.n_qubits() {
        let bit = 1u64 << (site - 1);
        let mut f = eye.clone();
        if word.x_mask() & bit != 0 {
            f = x.clone();
        }
        if word.z_mask() & bit != 0 {
            f = &f * &z;
        }
        m = m.kronecker(&f);
    }
    m * word.phase().value()
}

/// Reconstructs the Clifford unitary (up to global phase) on `k` qubits whose
/// conjugation maps `X_j -> images[j].0` and `Z_j -> images[j].1`.
///
/// The images are signed Pauli words on `k` qubits. Columns are built as
/// `|s⟩ = Π X̄_j^{s_j} |0…0⟩` with `|0…0⟩` the joint +1 eigenvector of the
/// Z̄-images, so the result conjugates Paulis exactly as prescribed.
pub fn clifford_from_images(k: usize, images: &[(PauliString, PauliString)]) -> Result<DMatrix<C64>> {
    if images.len() != k {
        return Err(Error::DimensionMismatch {
            left: k,
            right: images.len(),
        });
    }
    let dim = 1usize << k;
    // Joint +1 projector of the Z-images applied to a scan of basis vectors.
    let mut v0 = None;
    for seed in 0..dim {
        let mut v = DMatrix::<C64>::zeros(dim, 1);
        v[(seed, 0)] = c(1., 0.);
        for (_, z_img) in images {
            let zm = dense_pauli(z_img);
            v = (&v + &zm * &v) * c(0.5, 0.);
        }
        let norm = v.norm();
        if norm > 1e-9 {
            v /= c(norm, 0.);
            v0 = Some(v);
            break;
        }
    }
    let v0 = v0.ok_or(Error::DegeneracyMismatch {
        expected: 1,
        found: 0,
    })?;
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for s in 0..dim {
        let mut v = v0.clone();
        for (j, (x_img, _)) in images.iter().enumerate() {
            if (s >> (k - 1 - j)) & 1 == 1 {
                v = dense_pauli(x_img) * v;
            }
        }
        out.set_column(s, &v.column(0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;

    #[test]
    fn hadamard_transfer_swaps_x_and_z() {
        let t = transfer_matrix(&hadamard());
        assert!((t[0][2] - 1.0).abs() < 1e-14); // X -> Z
        assert!((t[2][0] - 1.0).abs() < 1e-14); // Z -> X
        assert!((t[1][1] + 1.0).abs() < 1e-14); // Y -> -Y
    }

    #[test]
    fn u_z_rotates_x_toward_y() {
        let t = transfer_matrix(&u_z(0.4));
        assert!((t[0][0] - 0.4f64.cos()).abs() < 1e-14);
        assert!((t[0][1] - 0.4f64.sin()).abs() < 1e-14);
        assert!((t[2][2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn czh_element_matches_kron_arithmetic() {
        let direct = czh_element();
        let via_embed = embed_two(&direct, 2, 0, 1);
        assert!((direct - via_embed).norm() < 1e-14);
    }

    #[test]
    fn clifford_reconstruction_recovers_hadamard() {
        // H: X -> Z, Z -> X.
        let images = vec![(
            PauliString::single(1, 1, Axis::Z),
            PauliString::single(1, 1, Axis::X),
        )];
        let u = clifford_from_images(1, &images).unwrap();
        let h = embed_single(&hadamard(), 1, 0);
        // Compare up to global phase via |tr(h† u)|/2.
        let overlap = (h.adjoint() * &u).trace().norm() / 2.0;
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clifford_reconstruction_recovers_the_block_gate() {
        // (H⊗H)CZ(H⊗H): X_a -> X_a, Z_a -> Z_a X_b and mirrored.
        let n = 2;
        let images = vec![
            (
                PauliString::single(n, 1, Axis::X),
                PauliString::from_factors(n, &[(1, Axis::Z), (2, Axis::X)]),
            ),
            (
                PauliString::single(n, 2, Axis::X),
                PauliString::from_factors(n, &[(1, Axis::X), (2, Axis::Z)]),
            ),
        ];
        let u = clifford_from_images(2, &images).unwrap();
        let target = h2_block_gate();
        let overlap = (target.adjoint() * &u).trace().norm() / 4.0;
        assert!((overlap - 1.0).abs() < 1e-12);
    }
}
