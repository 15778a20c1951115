//! The coefficient-operator recursion for the rotated chain.
//!
//! Stage `i` stores nine coefficient operators `P^{α,β}_i`, each a sum of
//! X-words on sites `j < i`, such that the encoded operator is
//! `ᾱ_i = Σ_β P^{α,β}_i · E_i(β)` with the controlled-phase-conjugated basis
//! `E_i(X) = X_i Z_{i+1}`, `E_i(Y) = Y_i Z_{i+1}`, `E_i(Z) = Z_i`.
//!
//! A step to stage `i+1` is carried out by the algebra itself rather than by
//! transcribed formulas: the `Y` and `Z` basis terms are left-multiplied by
//! the rotated stabilizer `T_i`, the products are expanded exactly and the
//! result is re-decomposed over `E_{i+1}`. The displayed X-row recurrences
//! then fall out as a theorem the test suite checks, and the same procedure
//! yields the Y and Z rows without hand transcription.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::{self, Gate2};
use crate::pauli::{mask_for, Axis, PauliString, PauliSum, RotationProfile};

type C64 = Complex64;

const AXES: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

/// The conjugated single-site basis at stage `i`.
fn encoding(n: usize, i: usize, beta: Axis) -> PauliString {
    match beta {
        Axis::X if i < n => PauliString::from_factors(n, &[(i, Axis::X), (i + 1, Axis::Z)]),
        Axis::Y if i < n => PauliString::from_factors(n, &[(i, Axis::Y), (i + 1, Axis::Z)]),
        _ => PauliString::single(n, i, beta),
    }
}

/// `T_i` as a Pauli sum, twisted by `theta` at site `i+1`.
fn t_operator(n: usize, i: usize, theta: f64) -> PauliSum {
    let terms = crate::hamiltonian::twisted_stabilizer_terms(n, i, theta);
    let mut sum = PauliSum::zero(n);
    for (c, w) in terms {
        sum.add_term(C64::new(c, 0.0), &w);
    }
    sum
}

/// The nine coefficient operators at one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    n_qubits: usize,
    site: usize,
    /// `rows[α][β] = P^{α,β}`, axes ordered (X, Y, Z).
    rows: [[PauliSum; 3]; 3],
}

impl CoefficientTable {
    /// Base case at site 1: `P^{α,β} = δ_{α,β}·I`.
    pub fn base(n_qubits: usize) -> CoefficientTable {
        let zero = PauliSum::zero(n_qubits);
        let mut rows: [[PauliSum; 3]; 3] = [
            [zero.clone(), zero.clone(), zero.clone()],
            [zero.clone(), zero.clone(), zero.clone()],
            [zero.clone(), zero.clone(), zero],
        ];
        for (a, row) in rows.iter_mut().enumerate() {
            row[a] = PauliSum::identity(n_qubits);
        }
        CoefficientTable {
            n_qubits,
            site: 1,
            rows,
        }
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entry(&self, alpha: Axis, beta: Axis) -> &PauliSum {
        &self.rows[axis_index(alpha)][axis_index(beta)]
    }

    /// Reconstructs `ᾱ_i` as an explicit Pauli sum.
    pub fn bar(&self, alpha: Axis) -> Result<PauliSum> {
        let mut out = PauliSum::zero(self.n_qubits);
        for beta in AXES {
            let basis = PauliSum::from_word(
                C64::new(1.0, 0.0),
                &encoding(self.n_qubits, self.site, beta),
            );
            out = out.add(&self.entry(alpha, beta).mul(&basis)?)?;
        }
        Ok(out)
    }

    /// Advances the table one site by left-multiplication with `T_i`.
    pub fn step(&self, theta_next: f64) -> Result<CoefficientTable> {
        let n = self.n_qubits;
        let i = self.site;
        if i + 1 > n - 1 {
            return Err(Error::SiteOverflow {
                site: i + 1,
                n_qubits: n,
            });
        }
        let t_i = t_operator(n, i, theta_next);
        let zero = PauliSum::zero(n);
        let mut new_rows: [[PauliSum; 3]; 3] = [
            [zero.clone(), zero.clone(), zero.clone()],
            [zero.clone(), zero.clone(), zero.clone()],
            [zero.clone(), zero.clone(), zero],
        ];
        for alpha in AXES {
            // Keep the X term, left-multiply the Y and Z terms by T_i.
            let mut total = self.entry(alpha, Axis::X).mul(&PauliSum::from_word(
                C64::new(1.0, 0.0),
                &encoding(n, i, Axis::X),
            ))?;
            for beta in [Axis::Y, Axis::Z] {
                let term = self.entry(alpha, beta).mul(&PauliSum::from_word(
                    C64::new(1.0, 0.0),
                    &encoding(n, i, beta),
                ))?;
                total = total.add(&t_i.mul(&term)?)?;
            }
            // Re-decompose over the stage-(i+1) basis.
            for (coeff, word) in total.terms() {
                let beta = classify(word, i + 1, n)?;
                let residual = word.mul(&encoding(n, i + 1, beta))?;
                validate_x_word(&residual, i + 1)?;
                new_rows[axis_index(alpha)][axis_index(beta)].add_term(*coeff, &residual);
            }
        }
        let table = CoefficientTable {
            n_qubits: n,
            site: i + 1,
            rows: new_rows,
        };
        table.validate()?;
        Ok(table)
    }

    /// Checks the support restriction: every entry is an X-word sum on
    /// sites `< site` with real coefficients.
    pub fn validate(&self) -> Result<()> {
        for alpha in AXES {
            for beta in AXES {
                for (c, w) in self.entry(alpha, beta).terms() {
                    if c.im.abs() > 1e-12 {
                        return Err(Error::NonHermitian {
                            reason: format!("coefficient {c} of {w} is not real"),
                        });
                    }
                    validate_x_word(w, self.site)?;
                }
            }
        }
        Ok(())
    }

    /// Scalar coefficient table after restricting every X-word to +1.
    pub fn restricted(&self) -> Result<[[f64; 3]; 3]> {
        let sites: Vec<usize> = (1..self.site).collect();
        let mut out = [[0.0; 3]; 3];
        for alpha in AXES {
            for beta in AXES {
                let reduced = restrict_plus_x(self.entry(alpha, beta), &sites)?;
                let value = match reduced.terms() {
                    [] => 0.0,
                    [(c, w)] if w.is_identity_word() => c.re,
                    _ => {
                        return Err(Error::RestrictedSiteNotX { site: self.site });
                    }
                };
                out[axis_index(alpha)][axis_index(beta)] = value;
            }
        }
        Ok(out)
    }
}

fn axis_index(a: Axis) -> usize {
    match a {
        Axis::X => 0,
        Axis::Y => 1,
        Axis::Z => 2,
    }
}

/// Splits a word into its stage basis slot by the factors at sites `i`, `i+1`.
fn classify(word: &PauliString, i: usize, n: usize) -> Result<Axis> {
    let at_i = word.axis_at(i);
    let at_next = if i < n { word.axis_at(i + 1) } else { None };
    match (at_i, at_next) {
        (Some(Axis::X), Some(Axis::Z)) => Ok(Axis::X),
        (Some(Axis::Y), Some(Axis::Z)) => Ok(Axis::Y),
        (Some(Axis::Z), z) if z != Some(Axis::Z) => Ok(Axis::Z),
        _ => Err(Error::InvalidFrame {
            reason: format!("word {word} does not fit the stage-{i} basis"),
        }),
    }
}

fn validate_x_word(word: &PauliString, stage: usize) -> Result<()> {
    let allowed = mask_for(stage - 1);
    if word.z_mask() != 0 || word.x_mask() & !allowed != 0 {
        return Err(Error::InvalidFrame {
            reason: format!("residual {word} is not an X-word below site {stage}"),
        });
    }
    Ok(())
}

/// Replaces each X factor on the listed sites by the scalar +1.
///
/// Errors if any word carries a Z or Y factor on a restricted site.
pub fn restrict_plus_x(sum: &PauliSum, sites: &[usize]) -> Result<PauliSum> {
    let mut mask = 0u64;
    for &s in sites {
        if s < 1 || s > sum.n_qubits() {
            return Err(Error::SiteOutOfRange {
                site: s,
                n_qubits: sum.n_qubits(),
            });
        }
        mask |= 1u64 << (s - 1);
    }
    let mut out = PauliSum::zero(sum.n_qubits());
    for (c, w) in sum.terms() {
        if w.z_mask() & mask != 0 {
            let site = (w.z_mask() & mask).trailing_zeros() as usize + 1;
            return Err(Error::RestrictedSiteNotX { site });
        }
        let stripped = PauliString::from_masks(
            sum.n_qubits(),
            w.phase(),
            w.x_mask() & !mask,
            w.z_mask(),
        );
        out.add_term(*c, &stripped);
    }
    Ok(out)
}

/// The three encoded operators `X̄_i, Ȳ_i, Z̄_i` at one stage, as explicit
/// Pauli sums.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalBar {
    pub site: usize,
    /// Ordered (X̄, Ȳ, Z̄).
    pub bars: [PauliSum; 3],
}

impl LogicalBar {
    pub fn from_table(table: &CoefficientTable) -> Result<LogicalBar> {
        Ok(LogicalBar {
            site: table.site(),
            bars: [
                table.bar(Axis::X)?,
                table.bar(Axis::Y)?,
                table.bar(Axis::Z)?,
            ],
        })
    }

    pub fn bar(&self, alpha: Axis) -> &PauliSum {
        &self.bars[axis_index(alpha)]
    }
}

/// Tables for every stage `1..=n-1` of a rotation profile.
pub fn tables_for_profile(profile: &RotationProfile) -> Result<Vec<CoefficientTable>> {
    let n = profile.len();
    let mut tables = vec![CoefficientTable::base(n)];
    for i in 1..n - 1 {
        let next = tables.last().unwrap().step(profile.theta(i + 1))?;
        tables.push(next);
    }
    Ok(tables)
}

/// Compares the restricted stage-(i+1) coefficients against conjugating the
/// restricted stage-i content with `U(θ_{i+1})·H` on the 2x2 oracle side.
/// Returns the maximum absolute coefficient discrepancy.
pub fn frame_gate_check(i: usize, profile: &RotationProfile) -> Result<f64> {
    let n = profile.len();
    if i < 1 || i > n.saturating_sub(2) {
        return Err(Error::SiteOutOfRange {
            site: i,
            n_qubits: n,
        });
    }
    let tables = tables_for_profile(profile)?;
    let p = tables[i - 1].restricted()?;
    let q = tables[i].restricted()?;
    let g = gates::step_gate(profile.theta(i + 1));
    let mut max_disc = 0.0f64;
    for (a, p_row) in p.iter().enumerate() {
        let content: Gate2 = gates::pauli_x() * C64::new(p_row[0], 0.0)
            + gates::pauli_y() * C64::new(p_row[1], 0.0)
            + gates::pauli_z() * C64::new(p_row[2], 0.0);
        let conjugated = g * content * g.adjoint();
        let expect = gates::pauli_components(&conjugated);
        for b in 0..3 {
            max_disc = max_disc.max((q[a][b] - expect[b]).abs());
        }
    }
    Ok(max_disc)
}

/// The net single-qubit gate of a full dragging run, derived as the
/// chronological product of the per-step gates `U(θ_{k+1})·H` (with
/// `θ_n = 0`, the information lands unrotated on the last qubit).
pub fn net_gate(profile: &RotationProfile) -> Gate2 {
    let n = profile.len();
    let mut gate = Gate2::identity();
    for k in 1..n {
        gate = gates::step_gate(profile.theta(k + 1)) * gate;
    }
    gate
}

/// Pauli images of the full run from the final coefficient table: the encoded
/// `α` ends, on the last qubit, as `p^{αX}·Z_n − p^{αY}·Y_n + p^{αZ}·X_n`.
pub fn final_action(profile: &RotationProfile) -> Result<[[f64; 3]; 3]> {
    let n = profile.len();
    if n < 3 {
        // A 2-site chain has a single plain-Hadamard step.
        let t = gates::transfer_matrix(&gates::hadamard());
        return Ok(t);
    }
    let tables = tables_for_profile(profile)?;
    let p = tables.last().unwrap().restricted()?;
    let mut out = [[0.0; 3]; 3];
    for a in 0..3 {
        out[a][0] = p[a][2]; // X_n picks up P^{α,Z}
        out[a][1] = -p[a][1]; // Y_n picks up -P^{α,Y}
        out[a][2] = p[a][0]; // Z_n picks up P^{α,X}
    }
    Ok(out)
}
