//! Stabilizer frames and the symbolic dragging-update rule.
//!
//! A [`StabilizerFrame`] holds the generators whose joint +1 eigenspace the
//! state occupies, plus logical operator pairs for the encoded qubits. A
//! dragging step that turns on a local field while turning off the
//! anticommuting generator is replayed symbolically by [`StabilizerFrame::dragging_update`]:
//! every other tracked operator that anticommutes with the field is multiplied
//! by the consumed generator (this is the rewriting `Z̄ → Z̄·S_1` and, in the
//! multi-anticommuting preparation case, the source of conserved generator
//! products), then the consumed generator is replaced by the field.

use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::{Axis, PauliString};

/// An anticommuting (X̄, Z̄) pair acting on the code space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalPair {
    pub x_op: PauliString,
    pub z_op: PauliString,
}

/// Generator set plus logical pairs; the symbolic state of a dragging run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerFrame {
    n_qubits: usize,
    generators: Vec<PauliString>,
    logicals: Vec<LogicalPair>,
}

impl StabilizerFrame {
    /// Validates and builds a frame.
    ///
    /// Generators must be Hermitian, pairwise commuting and independent under
    /// the symplectic rank check; each logical pair must anticommute within
    /// itself and commute with every generator and every other pair.
    pub fn new(
        n_qubits: usize,
        generators: Vec<PauliString>,
        logicals: Vec<LogicalPair>,
    ) -> Result<StabilizerFrame> {
        let fail = |reason: String| Error::InvalidFrame { reason };
        for g in &generators {
            if g.n_qubits() != n_qubits {
                return Err(fail(format!("generator {g} has wrong qubit count")));
            }
            if !g.is_hermitian() {
                return Err(fail(format!("generator {g} is not Hermitian")));
            }
            if g.is_identity_word() {
                return Err(fail("identity cannot be a generator".into()));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in generators.iter().skip(i + 1) {
                if !a.commutes_with(b)? {
                    return Err(fail(format!("generators {a} and {b} anticommute")));
                }
            }
        }
        if symplectic_rank(&generators) != generators.len() {
            return Err(fail("generators are not independent".into()));
        }
        if generators.len() + 2 * logicals.len() > 2 * n_qubits {
            return Err(fail("too many generators and logicals".into()));
        }
        for (k, pair) in logicals.iter().enumerate() {
            for (name, op) in [("X̄", &pair.x_op), ("Z̄", &pair.z_op)] {
                if op.n_qubits() != n_qubits || !op.is_hermitian() {
                    return Err(fail(format!("logical {name} {op} invalid")));
                }
                for g in &generators {
                    if !op.commutes_with(g)? {
                        return Err(fail(format!("logical {op} anticommutes with generator {g}")));
                    }
                }
            }
            if pair.x_op.commutes_with(&pair.z_op)? {
                return Err(fail(format!(
                    "logical pair ({}, {}) does not anticommute",
                    pair.x_op, pair.z_op
                )));
            }
            for other in logicals.iter().skip(k + 1) {
                for a in [&pair.x_op, &pair.z_op] {
                    for b in [&other.x_op, &other.z_op] {
                        if !a.commutes_with(b)? {
                            return Err(fail(format!(
                                "logicals {a} and {b} from different pairs anticommute"
                            )));
                        }
                    }
                }
            }
        }
        Ok(StabilizerFrame {
            n_qubits,
            generators,
            logicals,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn logicals(&self) -> &[LogicalPair] {
        &self.logicals
    }

    pub fn n_logical_qubits(&self) -> usize {
        self.logicals.len()
    }

    /// One dragging step: consume generator `consumed` in favor of `field`.
    ///
    /// Any other generator or logical component anticommuting with the field
    /// is repaired by one multiplication with the consumed generator; the
    /// result is re-validated before it is returned.
    pub fn dragging_update(&self, consumed: usize, field: &PauliString) -> Result<StabilizerFrame> {
        if consumed >= self.generators.len() {
            return Err(Error::InvalidFrame {
                reason: format!("consumed index {consumed} out of range"),
            });
        }
        let old = &self.generators[consumed];
        if field.commutes_with(old)? {
            return Err(Error::FieldCommutesWithConsumed);
        }
        let repair = |op: &PauliString, which: &str| -> Result<PauliString> {
            if op.commutes_with(field)? {
                return Ok(op.clone());
            }
            let fixed = op.mul(old)?;
            if !fixed.commutes_with(field)? {
                return Err(Error::UnrepairableOperator {
                    which: which.to_string(),
                });
            }
            Ok(fixed)
        };

        let mut generators = Vec::with_capacity(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            if i == consumed {
                generators.push(field.clone());
            } else {
                generators.push(repair(g, &g.to_string())?);
            }
        }
        let mut logicals = Vec::with_capacity(self.logicals.len());
        for pair in &self.logicals {
            logicals.push(LogicalPair {
                x_op: repair(&pair.x_op, &pair.x_op.to_string())?,
                z_op: repair(&pair.z_op, &pair.z_op.to_string())?,
            });
        }
        StabilizerFrame::new(self.n_qubits, generators, logicals)
    }

    /// Minimal-support representative of `op · ⟨generators⟩`.
    ///
    /// Ties on Hamming weight break by lexicographically smallest
    /// `(x_mask, z_mask)`. Errors if `op` is outside the normalizer.
    pub fn canonicalize_logical(&self, op: &PauliString) -> Result<PauliString> {
        for (i, g) in self.generators.iter().enumerate() {
            if !op.commutes_with(g)? {
                return Err(Error::AnticommutesWithGenerator { index: i });
            }
        }
        let g = self.generators.len();
        assert!(g <= 24, "generator enumeration too large");
        let mut best = op.clone();
        let mut best_key = (op.weight(), op.x_mask(), op.z_mask());
        // Gray-code walk over all 2^g products of generators.
        let mut current = op.clone();
        let mut prev_code = 0u64;
        for k in 1u64..(1u64 << g) {
            let code = k ^ (k >> 1);
            let flipped = (code ^ prev_code).trailing_zeros() as usize;
            prev_code = code;
            current = current.mul(&self.generators[flipped])?;
            let key = (current.weight(), current.x_mask(), current.z_mask());
            if key < best_key {
                best_key = key;
                best = current.clone();
            }
        }
        Ok(best)
    }

    /// Canonicalizes every logical pair in place.
    pub fn with_canonical_logicals(&self) -> Result<StabilizerFrame> {
        let logicals = self
            .logicals
            .iter()
            .map(|pair| {
                Ok(LogicalPair {
                    x_op: self.canonicalize_logical(&pair.x_op)?,
                    z_op: self.canonicalize_logical(&pair.z_op)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        StabilizerFrame::new(self.n_qubits, self.generators.clone(), logicals)
    }
}

impl fmt::Display for StabilizerFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "generators: [")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "]")?;
        if !self.logicals.is_empty() {
            write!(f, " logicals: [")?;
            for (i, pair) in self.logicals.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "(X̄={}, Z̄={})", pair.x_op, pair.z_op)?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Rank of the words' (x|z) rows over GF(2).
fn symplectic_rank(words: &[PauliString]) -> usize {
    let mut rows: Vec<u128> = words
        .iter()
        .map(|w| ((w.x_mask() as u128) << 64) | w.z_mask() as u128)
        .collect();
    let mut rank = 0;
    for bit in (0..128).rev() {
        let mask = 1u128 << bit;
        if let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] & mask != 0) {
            rows.swap(rank, pivot);
            for r in 0..rows.len() {
                if r != rank && rows[r] & mask != 0 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Cluster-chain stabilizers `S_i = Z_i X_{i+1} Z_{i+2}` with the
/// `S_{n-1} = Z_{n-1} X_n` boundary form.
pub fn chain_stabilizer(n: usize, i: usize) -> PauliString {
    assert!(i >= 1 && i < n);
    if i <= n.saturating_sub(2) {
        PauliString::from_factors(n, &[(i, Axis::Z), (i + 1, Axis::X), (i + 2, Axis::Z)])
    } else {
        PauliString::from_factors(n, &[(n - 1, Axis::Z), (n, Axis::X)])
    }
}

/// The degenerate chain code: generators `S_1..S_{n-1}`, one encoded qubit
/// with `X̄ = X_1 Z_2`, `Z̄ = Z_1`.
pub fn chain_frame(n: usize) -> Result<StabilizerFrame> {
    if n < 2 {
        return Err(Error::ChainTooShort { n });
    }
    let generators = (1..n).map(|i| chain_stabilizer(n, i)).collect();
    let x_op = if n >= 2 {
        PauliString::from_factors(n, &[(1, Axis::X), (2, Axis::Z)])
    } else {
        PauliString::single(n, 1, Axis::X)
    };
    let logicals = vec![LogicalPair {
        x_op,
        z_op: PauliString::single(n, 1, Axis::Z),
    }];
    StabilizerFrame::new(n, generators, logicals)
}

/// The full (non-degenerate) cluster code: `S_0 = X_1 Z_2` joins the chain
/// generators and no logical qubit remains.
pub fn prep_frame(n: usize) -> Result<StabilizerFrame> {
    if n < 2 {
        return Err(Error::ChainTooShort { n });
    }
    let mut generators = vec![PauliString::from_factors(n, &[(1, Axis::X), (2, Axis::Z)])];
    generators.extend((1..n).map(|i| chain_stabilizer(n, i)));
    StabilizerFrame::new(n, generators, Vec::new())
}

/// Flat site index for the two-wire block: wire a = sites 1..3, wire b = 4..6.
pub fn two_qubit_site(wire: usize, column: usize) -> usize {
    wire * 3 + column
}

/// The six-qubit two-coupled-chains code with two qubits of degeneracy.
pub fn two_qubit_frame() -> Result<StabilizerFrame> {
    let n = 6;
    let site = two_qubit_site;
    let generators = vec![
        // Z_{1,a} X_{2,a} Z_{3,a} Z_{2,b}  and the same with a<->b
        PauliString::from_factors(
            n,
            &[
                (site(0, 1), Axis::Z),
                (site(0, 2), Axis::X),
                (site(0, 3), Axis::Z),
                (site(1, 2), Axis::Z),
            ],
        ),
        PauliString::from_factors(n, &[(site(0, 2), Axis::Z), (site(0, 3), Axis::X)]),
        PauliString::from_factors(
            n,
            &[
                (site(1, 1), Axis::Z),
                (site(1, 2), Axis::X),
                (site(1, 3), Axis::Z),
                (site(0, 2), Axis::Z),
            ],
        ),
        PauliString::from_factors(n, &[(site(1, 2), Axis::Z), (site(1, 3), Axis::X)]),
    ];
    let logicals = (0..2)
        .map(|wire| LogicalPair {
            x_op: PauliString::from_factors(
                n,
                &[(site(wire, 1), Axis::X), (site(wire, 2), Axis::Z)],
            ),
            z_op: PauliString::single(n, site(wire, 1), Axis::Z),
        })
        .collect();
    StabilizerFrame::new(n, generators, logicals)
}
