//! Signed Pauli words and complex-weighted sums of them.
//!
//! A [`PauliString`] is stored as two site bitmasks plus a fourth-root-of-unity
//! phase: the word is `i^k · X^x · Z^z` with X factors written to the left of
//! Z factors on every site. A site present in both masks carries a Y up to the
//! tracked phase (`Y = i·X·Z`). Every group operation reduces to mask logic
//! and popcounts, so products, commutators and Clifford conjugations are exact.
//!
//! Sites are 1-based throughout, matching the `[P]_i` notation used by the
//! rest of the crate.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap from the `u64` mask representation.
pub const MAX_QUBITS: usize = 64;

/// A single-site Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Phase as an exponent of `i`, modulo 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn new(exponent: u8) -> Phase {
        Phase(exponent & 3)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) & 3)
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) & 3)
    }

    pub fn is_real(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn value(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

/// A signed Pauli word on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    phase: Phase,
    x_mask: u64,
    z_mask: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> PauliString {
        assert!((1..=MAX_QUBITS).contains(&n_qubits));
        PauliString {
            n_qubits,
            phase: Phase::PLUS_ONE,
            x_mask: 0,
            z_mask: 0,
        }
    }

    /// Single-site Pauli, e.g. `PauliString::single(4, 2, Axis::Z)` is `[Z]_2`.
    pub fn single(n_qubits: usize, site: usize, axis: Axis) -> PauliString {
        let mut p = PauliString::identity(n_qubits);
        assert!(site >= 1 && site <= n_qubits, "site {site} out of range");
        let bit = 1u64 << (site - 1);
        match axis {
            Axis::X => p.x_mask = bit,
            Axis::Z => p.z_mask = bit,
            Axis::Y => {
                // Y = i·X·Z
                p.x_mask = bit;
                p.z_mask = bit;
                p.phase = Phase::PLUS_I;
            }
        }
        p
    }

    /// Product of single-site factors, e.g. `from_factors(4, &[(1, X), (2, Z)])`
    /// is `[X]_1 [Z]_2`. Factors must sit on distinct sites.
    pub fn from_factors(n_qubits: usize, factors: &[(usize, Axis)]) -> PauliString {
        let mut p = PauliString::identity(n_qubits);
        for &(site, axis) in factors {
            let f = PauliString::single(n_qubits, site, axis);
            assert!(
                p.x_mask & f.x_mask == 0 && p.z_mask & f.z_mask == 0,
                "duplicate site {site}"
            );
            p = p.mul(&f).expect("equal qubit counts");
        }
        p
    }

    pub fn from_masks(n_qubits: usize, phase: Phase, x_mask: u64, z_mask: u64) -> PauliString {
        assert!((1..=MAX_QUBITS).contains(&n_qubits));
        let limit = mask_for(n_qubits);
        assert!(x_mask & !limit == 0 && z_mask & !limit == 0, "mask overflow");
        PauliString {
            n_qubits,
            phase,
            x_mask,
            z_mask,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    /// Sites acted on non-trivially.
    pub fn support(&self) -> u64 {
        self.x_mask | self.z_mask
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity_word(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// The axis at `site`, if any.
    pub fn axis_at(&self, site: usize) -> Option<Axis> {
        let bit = 1u64 << (site - 1);
        match (self.x_mask & bit != 0, self.z_mask & bit != 0) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (false, true) => Some(Axis::Z),
            (true, true) => Some(Axis::Y),
        }
    }

    fn check_size(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Exact group product `self · other`.
    #[allow(clippy::should_implement_trait)]
    ///
    /// Moving `Z^z` of the left factor past `X^x` of the right one costs
    /// `(-1)^{|z ∧ x|}`, which is the only phase bookkeeping needed in the
    /// X-left-of-Z normal form.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        self.check_size(other)?;
        let swaps = (self.z_mask & other.x_mask).count_ones();
        let mut phase = self.phase.mul(other.phase);
        if swaps & 1 == 1 {
            phase = phase.mul(Phase::MINUS_ONE);
        }
        Ok(PauliString {
            n_qubits: self.n_qubits,
            phase,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
        })
    }

    /// True iff `self · other == other · self` (symplectic inner product).
    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        self.check_size(other)?;
        let cross = (self.x_mask & other.z_mask).count_ones()
            + (self.z_mask & other.x_mask).count_ones();
        Ok(cross & 1 == 0)
    }

    /// Hermitian iff the phase parity matches the number of Y sites.
    pub fn is_hermitian(&self) -> bool {
        let ys = (self.x_mask & self.z_mask).count_ones() as u8;
        (self.phase.exponent() & 1) == (ys & 1)
    }

    pub fn adjoint(&self) -> PauliString {
        let swaps = (self.x_mask & self.z_mask).count_ones();
        let mut phase = self.phase.conj();
        if swaps & 1 == 1 {
            phase = phase.mul(Phase::MINUS_ONE);
        }
        PauliString {
            n_qubits: self.n_qubits,
            phase,
            x_mask: self.x_mask,
            z_mask: self.z_mask,
        }
    }

    pub fn negated(&self) -> PauliString {
        PauliString {
            phase: self.phase.mul(Phase::MINUS_ONE),
            ..self.clone()
        }
    }

    /// Splits into `(c, w)` with `self = c · w`, where `w` is the canonical
    /// Hermitian representative of the masks (each Y site carries its `i`).
    pub fn canonical_pair(&self) -> (Complex64, PauliString) {
        let ys = (self.x_mask & self.z_mask).count_ones() as u8;
        let canonical_phase = Phase::new(ys);
        let relative = Phase::new(self.phase.exponent().wrapping_sub(canonical_phase.exponent()));
        (
            relative.value(),
            PauliString {
                n_qubits: self.n_qubits,
                phase: canonical_phase,
                x_mask: self.x_mask,
                z_mask: self.z_mask,
            },
        )
    }

    fn site_bit(&self, site: usize) -> Result<u64> {
        if site < 1 || site > self.n_qubits {
            return Err(Error::SiteOutOfRange {
                site,
                n_qubits: self.n_qubits,
            });
        }
        Ok(1u64 << (site - 1))
    }
}

/// All-ones mask over the first `n` sites.
pub fn mask_for(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// The Clifford generators needed by the dragging algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Cz(usize, usize),
}

/// Conjugation `U p U†` by a single Clifford gate, phase-exact.
pub fn conj_by_clifford(p: &PauliString, gate: CliffordGate) -> Result<PauliString> {
    let mut out = p.clone();
    match gate {
        CliffordGate::H(site) => {
            let bit = p.site_bit(site)?;
            let x = p.x_mask & bit != 0;
            let z = p.z_mask & bit != 0;
            // H swaps X and Z; Y picks up a sign.
            if x {
                out.x_mask &= !bit;
                out.z_mask |= bit;
            } else {
                out.z_mask &= !bit;
            }
            if z {
                out.x_mask |= bit;
            }
            if x && z {
                out.x_mask |= bit;
                out.z_mask |= bit;
                out.phase = out.phase.mul(Phase::MINUS_ONE);
            }
        }
        CliffordGate::S(site) => {
            let bit = p.site_bit(site)?;
            let x = p.x_mask & bit != 0;
            let z = p.z_mask & bit != 0;
            // S: X -> Y, Y -> -X, Z -> Z. In XZ-form both cases toggle the
            // Z bit and multiply by i.
            if x {
                out.z_mask ^= bit;
                out.phase = out.phase.mul(Phase::PLUS_I);
                let _ = z;
            }
        }
        CliffordGate::Cz(a, b) => {
            let bit_a = p.site_bit(a)?;
            let bit_b = p.site_bit(b)?;
            if a == b {
                return Err(Error::SiteOutOfRange {
                    site: b,
                    n_qubits: p.n_qubits,
                });
            }
            let xa = p.x_mask & bit_a != 0;
            let xb = p.x_mask & bit_b != 0;
            if xa {
                out.z_mask ^= bit_b;
            }
            if xb {
                out.z_mask ^= bit_a;
            }
            if xa && xb {
                out.phase = out.phase.mul(Phase::MINUS_ONE);
            }
        }
    }
    Ok(out)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (coeff, word) = self.canonical_pair();
        let prefix = if coeff.re > 0.5 {
            "+"
        } else if coeff.re < -0.5 {
            "-"
        } else if coeff.im > 0.5 {
            "+i"
        } else {
            "-i"
        };
        write!(f, "{prefix}")?;
        if word.is_identity_word() {
            return write!(f, "I");
        }
        let mut first = true;
        for site in 1..=self.n_qubits {
            if let Some(axis) = word.axis_at(site) {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                let letter = match axis {
                    Axis::X => 'X',
                    Axis::Y => 'Y',
                    Axis::Z => 'Z',
                };
                write!(f, "{letter}{site}")?;
            }
        }
        Ok(())
    }
}

/// A complex-weighted sum of Pauli words with equal qubit count.
///
/// Terms are kept in a canonical form: every word is the Hermitian mask
/// representative (its phase folded into the coefficient), terms are sorted by
/// `(x_mask, z_mask)` and exact-zero coefficients are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> PauliSum {
        PauliSum {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> PauliSum {
        PauliSum::from_word(Complex64::new(1.0, 0.0), &PauliString::identity(n_qubits))
    }

    pub fn from_word(coeff: Complex64, word: &PauliString) -> PauliSum {
        let mut sum = PauliSum::zero(word.n_qubits());
        sum.add_term(coeff, word);
        sum
    }

    pub fn from_terms(n_qubits: usize, terms: &[(Complex64, PauliString)]) -> Result<PauliSum> {
        let mut sum = PauliSum::zero(n_qubits);
        for (c, w) in terms {
            if w.n_qubits() != n_qubits {
                return Err(Error::QubitCountMismatch {
                    left: n_qubits,
                    right: w.n_qubits(),
                });
            }
            sum.add_term(*c, w);
        }
        Ok(sum)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff · word`, merging into the canonical term list.
    pub fn add_term(&mut self, coeff: Complex64, word: &PauliString) {
        assert_eq!(word.n_qubits(), self.n_qubits);
        let (rel, canonical) = word.canonical_pair();
        let c = coeff * rel;
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let key = (canonical.x_mask(), canonical.z_mask());
        match self
            .terms
            .binary_search_by_key(&key, |(_, w)| (w.x_mask(), w.z_mask()))
        {
            Ok(idx) => {
                self.terms[idx].0 += c;
                if self.terms[idx].0 == Complex64::new(0.0, 0.0) {
                    self.terms.remove(idx);
                }
            }
            Err(idx) => self.terms.insert(idx, (c, canonical)),
        }
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut out = self.clone();
        for (c, w) in &other.terms {
            out.add_term(*c, w);
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: Complex64) -> PauliSum {
        let mut out = PauliSum::zero(self.n_qubits);
        for (c, w) in &self.terms {
            out.add_term(c * factor, w);
        }
        out
    }

    /// Group product, distributing over both term lists.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut out = PauliSum::zero(self.n_qubits);
        for (ca, wa) in &self.terms {
            for (cb, wb) in &other.terms {
                let w = wa.mul(wb)?;
                out.add_term(ca * cb, &w);
            }
        }
        Ok(out)
    }

    /// True when all coefficients are real (words are already Hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(c, _)| c.im.abs() <= tol)
    }

    /// Drops terms with |coeff| below `tol`.
    pub fn pruned(&self, tol: f64) -> PauliSum {
        let mut out = PauliSum::zero(self.n_qubits);
        for (c, w) in &self.terms {
            if c.norm() > tol {
                out.add_term(*c, w);
            }
        }
        out
    }

    /// Largest |coefficient difference| between two sums, matching terms by word.
    pub fn max_coeff_diff(&self, other: &PauliSum) -> f64 {
        let mut diff: f64 = 0.0;
        let mut i = 0;
        let mut j = 0;
        let key = |t: &(Complex64, PauliString)| (t.1.x_mask(), t.1.z_mask());
        while i < self.terms.len() || j < other.terms.len() {
            let next = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => key(a).cmp(&key(b)),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => break,
            };
            match next {
                std::cmp::Ordering::Less => {
                    diff = diff.max(self.terms[i].0.norm());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    diff = diff.max(other.terms[j].0.norm());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    diff = diff.max((self.terms[i].0 - other.terms[j].0).norm());
                    i += 1;
                    j += 1;
                }
            }
        }
        diff
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (c, w)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)·{}", c.re, c.im, strip_sign(w))?;
        }
        Ok(())
    }
}

fn strip_sign(w: &PauliString) -> String {
    let s = w.to_string();
    s.trim_start_matches(['+', '-', 'i']).trim().to_string()
}

/// `U(θ) p U(θ)†` with `U(θ) = exp(−iθZ_site/2)`.
///
/// Returns `p` unchanged when it commutes with `Z_site`; otherwise the exact
/// two-term expansion `cosθ·p + sinθ·(−i·Z_site·p)`, so that
/// `U(θ) X U(θ)† = cosθ·X + sinθ·Y`.
pub fn z_rotate_conjugate(p: &PauliString, site: usize, theta: f64) -> Result<PauliSum> {
    let z = PauliString::single(p.n_qubits(), site, Axis::Z);
    p.site_bit(site)?;
    if p.commutes_with(&z)? {
        return Ok(PauliSum::from_word(Complex64::new(1.0, 0.0), p));
    }
    let rotated = z.mul(p)?;
    let mut sum = PauliSum::zero(p.n_qubits());
    sum.add_term(Complex64::new(theta.cos(), 0.0), p);
    sum.add_term(Complex64::new(0.0, -theta.sin()), &rotated);
    Ok(sum)
}

/// Per-site rotation angles with pinned `θ_1 = θ_n = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationProfile {
    thetas: Vec<f64>,
}

impl RotationProfile {
    pub fn new(thetas: Vec<f64>) -> Result<RotationProfile> {
        if thetas.len() < 2 {
            return Err(Error::InvalidProfile {
                reason: format!("need at least 2 sites, got {}", thetas.len()),
            });
        }
        if thetas[0] != 0.0 {
            return Err(Error::InvalidProfile {
                reason: "θ_1 must be 0".into(),
            });
        }
        if *thetas.last().unwrap() != 0.0 {
            return Err(Error::InvalidProfile {
                reason: "θ_n must be 0".into(),
            });
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidProfile {
                reason: "angles must be finite".into(),
            });
        }
        Ok(RotationProfile { thetas })
    }

    /// All-zero profile (the untwisted chain).
    pub fn untwisted(n: usize) -> RotationProfile {
        RotationProfile {
            thetas: vec![0.0; n],
        }
    }

    /// Interior angles only; boundaries forced to zero.
    pub fn from_interior(n: usize, interior: &[f64]) -> Result<RotationProfile> {
        if interior.len() != n.saturating_sub(2) {
            return Err(Error::InvalidProfile {
                reason: format!(
                    "expected {} interior angles for n={n}, got {}",
                    n.saturating_sub(2),
                    interior.len()
                ),
            });
        }
        let mut thetas = vec![0.0];
        thetas.extend_from_slice(interior);
        thetas.push(0.0);
        RotationProfile::new(thetas)
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Angle at 1-based site `i`.
    pub fn theta(&self, site: usize) -> f64 {
        self.thetas[site - 1]
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn is_untwisted(&self) -> bool {
        self.thetas.iter().all(|&t| t == 0.0)
    }
}
