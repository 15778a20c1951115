//! Cluster Hamiltonians as Pauli-sum programs: matrix-free application,
//! dense materialization, spectra and symmetry-sector restriction.
//!
//! Every constructor returns a Hermitian spec whose terms are canonical
//! Hermitian words with real coefficients. The matrix-free kernel applies a
//! term `c·i^k X^u Z^v` to a state vector through bitmask index transforms;
//! no `2^n x 2^n` matrix is materialized unless a dense path is requested,
//! and the dense path is capped (default 12 qubits, `ACSQC_DENSE_CAP`
//! overrides).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dense_cap;
use crate::error::{Error, Result};
use crate::pauli::{z_rotate_conjugate, Axis, PauliString, RotationProfile};

type C64 = Complex64;

/// A Hermitian Pauli-sum Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    n_qubits: usize,
    delta: f64,
    terms: Vec<(f64, PauliString)>,
}

impl HamiltonianSpec {
    /// Builds a spec from real-weighted Hermitian words; merges duplicates.
    pub fn from_terms(
        n_qubits: usize,
        delta: f64,
        terms: Vec<(f64, PauliString)>,
    ) -> Result<HamiltonianSpec> {
        let mut canonical: Vec<(f64, PauliString)> = Vec::new();
        for (coeff, word) in terms {
            if word.n_qubits() != n_qubits {
                return Err(Error::QubitCountMismatch {
                    left: n_qubits,
                    right: word.n_qubits(),
                });
            }
            let (rel, w) = word.canonical_pair();
            if rel.im != 0.0 || !w.is_hermitian() {
                return Err(Error::NonHermitian {
                    reason: format!("term {word} is not Hermitian"),
                });
            }
            let c = coeff * rel.re;
            if c == 0.0 {
                continue;
            }
            let key = (w.x_mask(), w.z_mask());
            match canonical.binary_search_by_key(&key, |(_, t)| (t.x_mask(), t.z_mask())) {
                Ok(i) => {
                    canonical[i].0 += c;
                    if canonical[i].0 == 0.0 {
                        canonical.remove(i);
                    }
                }
                Err(i) => canonical.insert(i, (c, w)),
            }
        }
        Ok(HamiltonianSpec {
            n_qubits,
            delta,
            terms: canonical,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// True when all terms commute pairwise (stabilizer property).
    pub fn terms_commute(&self) -> bool {
        for (i, (_, a)) in self.terms.iter().enumerate() {
            for (_, b) in self.terms.iter().skip(i + 1) {
                if !a.commutes_with(b).unwrap_or(false) {
                    return false;
                }
            }
        }
        true
    }

    /// `H·v` computed term by term; the result is unnormalized.
    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if v.len() != 1usize << self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: v.len(),
                right: 1usize << self.n_qubits,
            });
        }
        let mut out = DVector::zeros(v.len());
        for (c, w) in &self.terms {
            CompiledTerm::new(*c, w).accumulate(1.0, v.as_slice(), out.as_mut_slice());
        }
        Ok(out)
    }

    /// Hermitian `2^n x 2^n` dense matrix (capped).
    pub fn dense_matrix(&self) -> Result<DMatrix<C64>> {
        let cap = dense_cap();
        if self.n_qubits > cap {
            return Err(Error::DenseCapExceeded {
                n_qubits: self.n_qubits,
                cap,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for (coeff, word) in &self.terms {
            let t = CompiledTerm::new(*coeff, word);
            for col in 0..dim {
                let (row, value) = t.column_action(col);
                m[(row, col)] += value;
            }
        }
        Ok(m)
    }

    /// `k` smallest eigenvalues in ascending order, dense path.
    pub fn low_spectrum(&self, k: usize, want_vectors: bool) -> Result<Spectrum> {
        let dim = 1usize << self.n_qubits;
        if k > dim {
            return Err(Error::TooManyEigenvalues { requested: k, dim });
        }
        let m = self.dense_matrix()?;
        Ok(spectrum_of(&m, k, want_vectors))
    }

    /// Restricts to the ±1 eigenspace of a commuting Pauli symmetry.
    pub fn sector_restrict(
        &self,
        symmetry: &PauliString,
        eigenvalue: i8,
    ) -> Result<SectorHamiltonian> {
        assert!(eigenvalue == 1 || eigenvalue == -1);
        for (_, w) in &self.terms {
            if !w.commutes_with(symmetry)? {
                return Err(Error::SymmetryDoesNotCommute);
            }
        }
        Ok(SectorHamiltonian {
            base: self.clone(),
            symmetry: symmetry.clone(),
            sign: eigenvalue,
        })
    }
}

/// A term precompiled to index masks for the matrix-free kernel.
#[derive(Debug, Clone)]
pub struct CompiledTerm {
    coeff: C64,
    flip: usize,
    sign_mask: usize,
}

impl CompiledTerm {
    pub fn new(coeff: f64, word: &PauliString) -> CompiledTerm {
        let n = word.n_qubits();
        CompiledTerm {
            coeff: word.phase().value() * coeff,
            flip: site_mask_to_index_mask(word.x_mask(), n),
            sign_mask: site_mask_to_index_mask(word.z_mask(), n),
        }
    }

    /// For column `b`: the word maps `|b⟩` to `value · |row⟩`.
    #[inline]
    pub fn column_action(&self, b: usize) -> (usize, C64) {
        let sign = if ((self.sign_mask & b).count_ones() & 1) == 1 {
            -1.0
        } else {
            1.0
        };
        (b ^ self.flip, self.coeff * sign)
    }

    /// `out += weight · (term · input)`.
    #[inline]
    pub fn accumulate(&self, weight: f64, input: &[C64], out: &mut [C64]) {
        let q = self.coeff * weight;
        let flip = self.flip;
        let sign_mask = self.sign_mask;
        for (b, amp) in input.iter().enumerate() {
            let v = if ((sign_mask & b).count_ones() & 1) == 1 {
                -q * amp
            } else {
                q * amp
            };
            out[b ^ flip] += v;
        }
    }
}

/// Qubit 1 is the most significant bit of the basis index, so a site mask
/// (bit i-1 for site i) maps to a bit-reversed index mask.
pub fn site_mask_to_index_mask(site_mask: u64, n: usize) -> usize {
    let mut out = 0usize;
    for site in 1..=n {
        if site_mask & (1u64 << (site - 1)) != 0 {
            out |= 1usize << (n - site);
        }
    }
    out
}

/// Eigenvalues (ascending) with optional eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub states: Vec<DVector<C64>>,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Multiplicity of the lowest eigenvalue at tolerance `tol`.
    pub fn ground_degeneracy(&self, tol: f64) -> usize {
        let e0 = self.energies[0];
        self.energies.iter().take_while(|&&e| e - e0 <= tol).count()
    }

    /// Gap between the ground manifold (resolved at `tol`) and the level above.
    pub fn manifold_gap(&self, tol: f64) -> Option<f64> {
        let d = self.ground_degeneracy(tol);
        self.energies.get(d).map(|e| e - self.energies[0])
    }
}

pub(crate) fn spectrum_of(m: &DMatrix<C64>, k: usize, want_vectors: bool) -> Spectrum {
    if want_vectors {
        let eig = m.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let energies = order.iter().take(k).map(|&i| eig.eigenvalues[i]).collect();
        let states = order
            .iter()
            .take(k)
            .map(|&i| DVector::from_column_slice(eig.eigenvectors.column(i).as_slice()))
            .collect();
        Spectrum { energies, states }
    } else {
        let mut vals: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.truncate(k);
        Spectrum {
            energies: vals,
            states: Vec::new(),
        }
    }
}

/// Operator handle for a symmetry sector of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    base: HamiltonianSpec,
    symmetry: PauliString,
    sign: i8,
}

impl SectorHamiltonian {
    pub fn base(&self) -> &HamiltonianSpec {
        &self.base
    }

    /// Applies `Π H Π` with `Π = (I ± S)/2`, matrix-free.
    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        let projected = self.project(v)?;
        let applied = self.base.apply(&projected)?;
        self.project(&applied)
    }

    pub fn project(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        let term = CompiledTerm::new(self.sign as f64, &self.symmetry);
        let mut out = v.clone();
        term.accumulate(1.0, v.as_slice(), out.as_mut_slice());
        Ok(out * C64::new(0.5, 0.0))
    }

    /// Orthonormal isometry onto the sector, built exactly from basis pairs.
    pub fn isometry(&self) -> Result<DMatrix<C64>> {
        let n = self.base.n_qubits();
        let cap = dense_cap();
        if n > cap {
            return Err(Error::DenseCapExceeded { n_qubits: n, cap });
        }
        let dim = 1usize << n;
        let t = CompiledTerm::new(1.0, &self.symmetry);
        let sign = self.sign as f64;
        let mut cols: Vec<DVector<C64>> = Vec::new();
        let mut seen = vec![false; dim];
        for b in 0..dim {
            if seen[b] {
                continue;
            }
            let (partner, value) = t.column_action(b);
            if partner == b {
                // Diagonal action: keep the basis state iff the sign matches.
                seen[b] = true;
                if (value.re - sign).abs() < 1e-12 {
                    let mut v = DVector::zeros(dim);
                    v[b] = C64::new(1.0, 0.0);
                    cols.push(v);
                }
            } else {
                seen[b] = true;
                seen[partner] = true;
                // (|b⟩ + s·S|b⟩)/√2 lies in the sector.
                let mut v = DVector::zeros(dim);
                v[b] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                v[partner] = value * sign * std::f64::consts::FRAC_1_SQRT_2;
                cols.push(v);
            }
        }
        let mut m = DMatrix::zeros(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            m.set_column(j, col);
        }
        Ok(m)
    }

    /// `k` smallest eigenvalues within the sector.
    pub fn low_spectrum(&self, k: usize, want_vectors: bool) -> Result<Spectrum> {
        let v = self.isometry()?;
        let h = self.base.dense_matrix()?;
        let reduced = v.adjoint() * h * &v;
        if k > reduced.nrows() {
            return Err(Error::TooManyEigenvalues {
                requested: k,
                dim: reduced.nrows(),
            });
        }
        let mut spec = spectrum_of(&reduced, k, want_vectors);
        if want_vectors {
            spec.states = spec.states.iter().map(|s| &v * s).collect();
        }
        Ok(spec)
    }
}

/// `H_0 = -Δ Σ_{i=1}^{n-1} S_i`, the degenerate chain Hamiltonian.
pub fn build_chain_h0(n: usize, delta: f64) -> Result<HamiltonianSpec> {
    if n < 2 {
        return Err(Error::ChainTooShort { n });
    }
    let terms = (1..n)
        .map(|i| (-delta, crate::frame::chain_stabilizer(n, i)))
        .collect();
    HamiltonianSpec::from_terms(n, delta, terms)
}

/// The rotated-stabilizer chain `-Δ Σ T_i`; reduces to `build_chain_h0` when
/// every angle is zero.
pub fn build_twisted_chain(
    n: usize,
    delta: f64,
    thetas: &RotationProfile,
) -> Result<HamiltonianSpec> {
    if n < 2 {
        return Err(Error::ChainTooShort { n });
    }
    if thetas.len() != n {
        return Err(Error::InvalidProfile {
            reason: format!("profile has {} entries for n={n}", thetas.len()),
        });
    }
    let mut terms = Vec::new();
    for i in 1..n {
        let theta = if i <= n - 2 { thetas.theta(i + 1) } else { 0.0 };
        for (coeff, word) in twisted_stabilizer_terms(n, i, theta) {
            terms.push((-delta * coeff, word));
        }
    }
    HamiltonianSpec::from_terms(n, delta, terms)
}

/// The flat terms of `T_i`: the interior X conjugated by `U(θ_{i+1})`.
pub fn twisted_stabilizer_terms(n: usize, i: usize, theta: f64) -> Vec<(f64, PauliString)> {
    let s = crate::frame::chain_stabilizer(n, i);
    if i > n.saturating_sub(2) || theta == 0.0 {
        return vec![(1.0, s)];
    }
    let sum = z_rotate_conjugate(&s, i + 1, theta).expect("site in range");
    sum.terms()
        .iter()
        .map(|(c, w)| {
            debug_assert!(c.im == 0.0);
            (c.re, w.clone())
        })
        .collect()
}

/// `H_0' = H_0 - Δ·S_0` with `S_0 = X_1 Z_2`: the full cluster-state
/// Hamiltonian with a unique ground state.
pub fn build_prep_chain(n: usize, delta: f64) -> Result<HamiltonianSpec> {
    if n < 2 {
        return Err(Error::ChainTooShort { n });
    }
    let mut terms = vec![(
        -delta,
        PauliString::from_factors(n, &[(1, Axis::X), (2, Axis::Z)]),
    )];
    terms.extend((1..n).map(|i| (-delta, crate::frame::chain_stabilizer(n, i))));
    HamiltonianSpec::from_terms(n, delta, terms)
}

/// The six-qubit two-wire Hamiltonian with two qubits of degeneracy.
pub fn build_two_qubit_h2(delta: f64) -> Result<HamiltonianSpec> {
    let frame = crate::frame::two_qubit_frame()?;
    let terms = frame
        .generators()
        .iter()
        .map(|g| (-delta, g.clone()))
        .collect();
    HamiltonianSpec::from_terms(6, delta, terms)
}

/// Local field `-Δ·M(-θ)` with `M(θ) = cosθ·X + sinθ·Y`.
pub fn local_field_term(n: usize, site: usize, theta: f64, delta: f64) -> Result<HamiltonianSpec> {
    if site < 1 || site > n {
        return Err(Error::SiteOutOfRange { site, n_qubits: n });
    }
    let x = PauliString::single(n, site, Axis::X);
    let y = PauliString::single(n, site, Axis::Y);
    HamiltonianSpec::from_terms(
        n,
        delta,
        vec![(-delta * theta.cos(), x), (delta * theta.sin(), y)],
    )
}

/// A normalized `2^n` state vector; qubit 1 is the most significant index bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: DVector<C64>,
}

impl StateVector {
    pub const NORM_TOL: f64 = 1e-10;

    pub fn new(n_qubits: usize, amps: DVector<C64>) -> Result<StateVector> {
        if amps.len() != 1usize << n_qubits {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: 1usize << n_qubits,
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NormDriftExceeded {
                drift: (norm - 1.0).abs(),
                budget: Self::NORM_TOL,
            });
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Computational basis state `|b⟩`.
    pub fn basis_state(n_qubits: usize, index: usize) -> StateVector {
        let mut amps = DVector::zeros(1usize << n_qubits);
        amps[index] = C64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Real expectation value of a Hermitian word.
    pub fn expectation(&self, word: &PauliString) -> Result<f64> {
        if word.n_qubits() != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: word.n_qubits(),
                right: self.n_qubits,
            });
        }
        let t = CompiledTerm::new(1.0, word);
        let mut acc = C64::new(0.0, 0.0);
        for b in 0..self.amps.len() {
            let (row, value) = t.column_action(b);
            acc += self.amps[row].conj() * value * self.amps[b];
        }
        Ok(acc.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> DVector<C64> {
        let dim = 1usize << n;
        let mut v = DVector::from_fn(dim, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let norm = v.norm();
        v /= c(norm, 0.0);
        v
    }

    #[test]
    fn chain_h0_examples() {
        let h = build_chain_h0(3, 1.0).unwrap();
        assert_eq!(h.term_count(), 2);
        let h2 = build_chain_h0(2, 1.5).unwrap();
        assert_eq!(h2.term_count(), 1);
        assert_eq!(h2.terms()[0].0, -1.5);
        assert!(build_chain_h0(1, 1.0).is_err());
    }

    #[test]
    fn chain_h0_n3_spectrum_from_dense_oracle() {
        let h = build_chain_h0(3, 1.0).unwrap();
        let spec = h.low_spectrum(8, false).unwrap();
        let expect = [-2.0, -2.0, 0.0, 0.0, 0.0, 0.0, 2.0, 2.0];
        for (got, want) in spec.energies.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        assert_eq!(spec.ground_degeneracy(1e-10), 2);
    }

    #[test]
    fn h0_n2_dense_matches_hand_multiplication() {
        // -Δ Z1 X2 on the basis |q1 q2⟩, index = 2*q1 + q2.
        let h = build_chain_h0(2, 1.0).unwrap();
        let m = h.dense_matrix().unwrap();
        let mut expect = DMatrix::<C64>::zeros(4, 4);
        expect[(1, 0)] = c(-1., 0.);
        expect[(0, 1)] = c(-1., 0.);
        expect[(3, 2)] = c(1., 0.);
        expect[(2, 3)] = c(1., 0.);
        assert!((m - expect).norm() < 1e-14);
    }

    #[test]
    fn twisted_chain_reduces_and_contains_rotated_term() {
        let n = 3;
        let zero = RotationProfile::untwisted(n);
        let plain = build_chain_h0(n, 1.0).unwrap();
        let twisted0 = build_twisted_chain(n, 1.0, &zero).unwrap();
        assert_eq!(plain, twisted0);

        let theta = std::f64::consts::FRAC_PI_4;
        let prof = RotationProfile::from_interior(n, &[theta]).unwrap();
        let h = build_twisted_chain(n, 1.0, &prof).unwrap();
        // Contains -cos(θ)·Z1X2Z3 and -sin(θ)·Z1Y2Z3.
        let zxz = PauliString::from_factors(n, &[(1, Z), (2, X), (3, Z)]);
        let zyz = PauliString::from_factors(n, &[(1, Z), (2, Y), (3, Z)]);
        let coeff_of = |w: &PauliString| {
            h.terms()
                .iter()
                .find(|(_, t)| t == w)
                .map(|(c, _)| *c)
                .unwrap()
        };
        assert!((coeff_of(&zxz) + theta.cos()).abs() < 1e-14);
        assert!((coeff_of(&zyz) + theta.sin()).abs() < 1e-14);
    }

    #[test]
    fn twisted_chain_is_isospectral_to_untwisted() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [3usize, 4, 5] {
            let interior: Vec<f64> = (0..n - 2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let prof = RotationProfile::from_interior(n, &interior).unwrap();
            let twisted = build_twisted_chain(n, 1.0, &prof).unwrap();
            let plain = build_chain_h0(n, 1.0).unwrap();
            let a = twisted.low_spectrum(1 << n, false).unwrap();
            let b = plain.low_spectrum(1 << n, false).unwrap();
            for (x, y) in a.energies.iter().zip(b.energies.iter()) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn prep_chain_is_gapped_and_stabilized() {
        let h = build_prep_chain(4, 1.0).unwrap();
        assert_eq!(h.term_count(), 4);
        let spec = h.low_spectrum(3, true).unwrap();
        assert_eq!(spec.ground_degeneracy(1e-10), 1);
        assert!((spec.manifold_gap(1e-10).unwrap() - 2.0).abs() < 1e-10);

        // The ground state satisfies <S_i> = +1 for every generator.
        let ground = StateVector::new(4, spec.states[0].clone()).unwrap();
        for g in crate::frame::prep_frame(4).unwrap().generators() {
            assert!((ground.expectation(g).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn h2_spectrum_and_commutation() {
        let h = build_two_qubit_h2(1.0).unwrap();
        assert_eq!(h.term_count(), 4);
        assert!(h.terms_commute());
        let spec = h.low_spectrum(5, false).unwrap();
        assert_eq!(spec.ground_degeneracy(1e-10), 4);
        for e in &spec.energies[..4] {
            assert!((e + 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn all_constructor_terms_commute() {
        assert!(build_chain_h0(6, 1.0).unwrap().terms_commute());
        assert!(build_prep_chain(5, 1.0).unwrap().terms_commute());

        // The twisted chain commutes at the level of the T_i units; the cos
        // and sin halves of one unit anticommute word-wise by construction.
        let n = 5;
        let prof = RotationProfile::from_interior(n, &[0.3, 1.1, -0.4]).unwrap();
        let units: Vec<crate::pauli::PauliSum> = (1..n)
            .map(|i| {
                let theta = if i <= n - 2 { prof.theta(i + 1) } else { 0.0 };
                let mut sum = crate::pauli::PauliSum::zero(n);
                for (coeff, word) in twisted_stabilizer_terms(n, i, theta) {
                    sum.add_term(c(coeff, 0.0), &word);
                }
                sum
            })
            .collect();
        for (i, a) in units.iter().enumerate() {
            for b in units.iter().skip(i + 1) {
                let comm = a
                    .mul(b)
                    .unwrap()
                    .add(&b.mul(a).unwrap().scaled(c(-1.0, 0.0)))
                    .unwrap();
                assert!(comm.is_zero() || comm.max_coeff_diff(&crate::pauli::PauliSum::zero(n)) < 1e-14);
            }
            // Each unit squares to the identity.
            let sq = a.mul(a).unwrap();
            assert!(sq.max_coeff_diff(&crate::pauli::PauliSum::identity(n)) < 1e-14);
        }
    }

    #[test]
    fn local_field_examples() {
        let coeff_of = |h: &HamiltonianSpec, w: &PauliString| -> f64 {
            h.terms()
                .iter()
                .find(|(_, t)| t == w)
                .map(|(c, _)| *c)
                .unwrap_or(0.0)
        };
        let x1 = PauliString::single(2, 1, X);
        let y1 = PauliString::single(2, 1, Y);

        let f0 = local_field_term(2, 1, 0.0, 1.0).unwrap();
        assert_eq!(f0.terms(), &[(-1.0, x1.clone())]);

        // θ = π/2 points the field along +Y (up to float roundoff in cos).
        let fpi2 = local_field_term(2, 1, std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        assert!((coeff_of(&fpi2, &y1) - 1.0).abs() < 1e-15);
        assert!(coeff_of(&fpi2, &x1).abs() < 1e-15);

        // θ = π flips the sign of the X field.
        let fpi = local_field_term(2, 1, std::f64::consts::PI, 1.0).unwrap();
        assert!((coeff_of(&fpi, &x1) - 1.0).abs() < 1e-12);
        assert!(coeff_of(&fpi, &y1).abs() < 1e-12);

        assert!(local_field_term(2, 3, 0.0, 1.0).is_err());
    }

    #[test]
    fn apply_flips_the_most_significant_bit() {
        let n = 3;
        let h =
            HamiltonianSpec::from_terms(n, 1.0, vec![(-1.0, PauliString::single(n, 1, X))])
                .unwrap();
        let v = StateVector::basis_state(n, 0);
        let out = h.apply(v.amplitudes()).unwrap();
        assert!((out[0b100] - c(-1., 0.)).norm() < 1e-15);
        assert!(out
            .iter()
            .enumerate()
            .all(|(i, a)| i == 0b100 || a.norm() < 1e-15));
    }

    #[test]
    fn apply_matches_dense_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let prof = RotationProfile::from_interior(4, &[0.7, -1.2]).unwrap();
        let specs = vec![
            build_chain_h0(4, 1.0).unwrap(),
            build_twisted_chain(4, 1.0, &prof).unwrap(),
            build_prep_chain(4, 1.0).unwrap(),
            build_two_qubit_h2(1.0).unwrap(),
            local_field_term(3, 2, 0.9, 1.0).unwrap(),
        ];
        for h in specs {
            let dense = h.dense_matrix().unwrap();
            for _ in 0..10 {
                let v = random_state(&mut rng, h.n_qubits());
                let fast = h.apply(&v).unwrap();
                let slow = &dense * &v;
                assert!((fast - slow).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn apply_is_linear_and_ground_state_is_an_eigenvector() {
        let h = build_chain_h0(3, 1.0).unwrap();
        let spec = h.low_spectrum(1, true).unwrap();
        let g = &spec.states[0];
        let hg = h.apply(g).unwrap();
        assert!((hg - g * c(-2.0, 0.0)).norm() < 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random_state(&mut rng, 3);
        let w = random_state(&mut rng, 3);
        let a = c(0.3, -0.2);
        let b = c(-0.8, 0.5);
        let lhs = h.apply(&(&v * a + &w * b)).unwrap();
        let rhs = h.apply(&v).unwrap() * a + h.apply(&w).unwrap() * b;
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn dense_is_hermitian() {
        let h = build_two_qubit_h2(1.0).unwrap();
        let m = h.dense_matrix().unwrap();
        assert!((&m - m.adjoint()).norm() < 1e-14);
    }

    #[test]
    fn single_site_field_spectrum() {
        let h = local_field_term(1, 1, 0.0, 1.0).unwrap();
        let spec = h.low_spectrum(2, false).unwrap();
        assert!((spec.energies[0] + 1.0).abs() < 1e-14);
        assert!((spec.energies[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sector_restriction_examples() {
        // -Δ X1 restricted by Z2 = +1 keeps the full {-Δ, +Δ} spectrum.
        let h =
            HamiltonianSpec::from_terms(2, 1.0, vec![(-1.0, PauliString::single(2, 1, X))])
                .unwrap();
        let sym = PauliString::single(2, 2, Z);
        let sector = h.sector_restrict(&sym, 1).unwrap();
        let spec = sector.low_spectrum(2, false).unwrap();
        assert!((spec.energies[0] + 1.0).abs() < 1e-12);
        assert!((spec.energies[1] - 1.0).abs() < 1e-12);

        // Anticommuting symmetry is rejected.
        let bad = PauliString::single(2, 1, Z);
        assert!(matches!(
            h.sector_restrict(&bad, 1),
            Err(Error::SymmetryDoesNotCommute)
        ));
    }

    #[test]
    fn sector_isometry_is_orthonormal_and_consistent_with_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = build_prep_chain(4, 1.0).unwrap();
        let sym = PauliString::from_factors(4, &[(1, X), (3, X), (4, Z)]);
        let sector = h.sector_restrict(&sym, 1).unwrap();
        let iso = sector.isometry().unwrap();
        assert_eq!(iso.ncols(), 8);
        assert!((iso.adjoint() * &iso - DMatrix::<C64>::identity(8, 8)).norm() < 1e-12);

        // Π H Π v computed matrix-free equals V (V† H V) V† v.
        let dense = h.dense_matrix().unwrap();
        let reduced = iso.adjoint() * &dense * &iso;
        for _ in 0..5 {
            let v = random_state(&mut rng, 4);
            let via_apply = sector.apply(&v).unwrap();
            let via_iso = &iso * (&reduced * (iso.adjoint() * &v));
            assert!((via_apply - via_iso).norm() < 1e-12);
        }

        // A symmetry with a Y factor exercises the complex pair amplitudes.
        let hy =
            HamiltonianSpec::from_terms(2, 1.0, vec![(-1.0, PauliString::single(2, 2, Z))])
                .unwrap();
        let ysym = PauliString::from_factors(2, &[(1, Y), (2, Z)]);
        let ysec = hy.sector_restrict(&ysym, -1).unwrap();
        let yiso = ysec.isometry().unwrap();
        assert!((yiso.adjoint() * &yiso - DMatrix::<C64>::identity(2, 2)).norm() < 1e-12);
        let hyd = hy.dense_matrix().unwrap();
        let yred = yiso.adjoint() * &hyd * &yiso;
        for _ in 0..5 {
            let v = random_state(&mut rng, 2);
            let via_apply = ysec.apply(&v).unwrap();
            let via_iso = &yiso * (&yred * (yiso.adjoint() * &v));
            assert!((via_apply - via_iso).norm() < 1e-12, "Y-symmetry sector");
        }
    }

    #[test]
    fn state_vector_checks_norm_and_dimension() {
        let bad = DVector::from_element(4, c(1.0, 0.0));
        assert!(StateVector::new(2, bad).is_err());
        let good = StateVector::basis_state(2, 3);
        assert!((good.norm() - 1.0).abs() < 1e-15);
        assert!(StateVector::new(3, good.amplitudes().clone()).is_err());
    }
}
