//! Piecewise adiabatic dragging programs.
//!
//! A [`DraggingPlan`] owns one flat term table; each step names the term
//! indices it ramps off and on, all with the shared interpolation
//! `H(s) = (active) + f(s)·(off) + g(s)·(on)`. The plan can be replayed
//! symbolically when every ramped unit is a single Pauli word, which is how
//! the frame predictions for the numerical engine are produced.

use crate::error::{Error, Result};
use crate::frame::{chain_frame, prep_frame, two_qubit_frame, LogicalPair, StabilizerFrame};
use crate::hamiltonian::{
    build_chain_h0, build_prep_chain, build_twisted_chain, build_two_qubit_h2, local_field_term,
    HamiltonianSpec,
};
use crate::pauli::{Axis, PauliString, RotationProfile};

/// Interpolation shape on `s ∈ [0,1]` with `f(0)=g(1)=1`, `f(1)=g(0)=0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleShape {
    Linear,
    Smooth,
}

impl ScheduleShape {
    pub fn name(self) -> &'static str {
        match self {
            ScheduleShape::Linear => "linear",
            ScheduleShape::Smooth => "smooth",
        }
    }
}

impl std::str::FromStr for ScheduleShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<ScheduleShape> {
        match s {
            "linear" => Ok(ScheduleShape::Linear),
            "smooth" => Ok(ScheduleShape::Smooth),
            other => Err(Error::InvalidPlan {
                reason: format!("unknown schedule shape '{other}'"),
            }),
        }
    }
}

/// Interpolation functions plus the per-step duration in units of 1/Δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub shape: ScheduleShape,
    pub t_step: f64,
}

impl Schedule {
    pub fn new(shape: ScheduleShape, t_step: f64) -> Result<Schedule> {
        if t_step <= 0.0 || !t_step.is_finite() {
            return Err(Error::InvalidPlan {
                reason: format!("t_step must be positive and finite, got {t_step}"),
            });
        }
        Ok(Schedule { shape, t_step })
    }

    /// Weight of the terms being turned off.
    pub fn f(&self, s: f64) -> f64 {
        match self.shape {
            ScheduleShape::Linear => 1.0 - s,
            ScheduleShape::Smooth => {
                let c = (std::f64::consts::FRAC_PI_2 * s).cos();
                c * c
            }
        }
    }

    /// Weight of the terms being turned on.
    pub fn g(&self, s: f64) -> f64 {
        match self.shape {
            ScheduleShape::Linear => s,
            ScheduleShape::Smooth => {
                let c = (std::f64::consts::FRAC_PI_2 * s).sin();
                c * c
            }
        }
    }
}

/// One dragging step: term indices to ramp off and on together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub turn_off: Vec<usize>,
    pub turn_on: Vec<usize>,
}

/// A validated piecewise dragging program over a flat term table.
#[derive(Debug, Clone, PartialEq)]
pub struct DraggingPlan {
    n_qubits: usize,
    delta: f64,
    terms: Vec<(f64, PauliString)>,
    initially_active: Vec<usize>,
    steps: Vec<PlanStep>,
    schedule: Schedule,
}

impl DraggingPlan {
    /// Validates step invariants: off-terms active before their step, on-terms
    /// absent, and every term outside a step commuting with its ramping terms.
    pub fn new(
        n_qubits: usize,
        delta: f64,
        terms: Vec<(f64, PauliString)>,
        initially_active: Vec<usize>,
        steps: Vec<PlanStep>,
        schedule: Schedule,
    ) -> Result<DraggingPlan> {
        let invalid = |reason: String| Error::InvalidPlan { reason };
        for (_, w) in &terms {
            if w.n_qubits() != n_qubits {
                return Err(Error::QubitCountMismatch {
                    left: n_qubits,
                    right: w.n_qubits(),
                });
            }
        }
        let mut active = vec![false; terms.len()];
        for &i in &initially_active {
            if i >= terms.len() {
                return Err(invalid(format!("initial term index {i} out of range")));
            }
            if active[i] {
                return Err(invalid(format!("initial term index {i} repeated")));
            }
            active[i] = true;
        }
        for (k, step) in steps.iter().enumerate() {
            for &i in &step.turn_off {
                if i >= terms.len() || !active[i] {
                    return Err(invalid(format!("step {k} turns off inactive term {i}")));
                }
            }
            for &i in &step.turn_on {
                if i >= terms.len() || active[i] {
                    return Err(invalid(format!("step {k} turns on active term {i}")));
                }
            }
            // Spectator terms must commute with everything that ramps.
            let ramping: Vec<usize> = step
                .turn_off
                .iter()
                .chain(step.turn_on.iter())
                .copied()
                .collect();
            for (i, is_active) in active.iter().enumerate() {
                if !is_active || step.turn_off.contains(&i) {
                    continue;
                }
                for &r in &ramping {
                    if !terms[i].1.commutes_with(&terms[r].1)? {
                        return Err(invalid(format!(
                            "step {k}: spectator term {} anticommutes with ramping term {}",
                            terms[i].1, terms[r].1
                        )));
                    }
                }
            }
            for &i in &step.turn_off {
                active[i] = false;
            }
            for &i in &step.turn_on {
                active[i] = true;
            }
        }
        Ok(DraggingPlan {
            n_qubits,
            delta,
            terms,
            initially_active,
            steps,
            schedule,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn with_schedule(&self, schedule: Schedule) -> DraggingPlan {
        DraggingPlan {
            schedule,
            ..self.clone()
        }
    }

    pub fn steps(&self) -> &[PlanStep] {
        &self.steps
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// Term indices active just before `step` (or all steps when `step`
    /// equals `steps().len()`).
    pub fn active_before(&self, step: usize) -> Vec<usize> {
        let mut active = vec![false; self.terms.len()];
        for &i in &self.initially_active {
            active[i] = true;
        }
        for s in &self.steps[..step] {
            for &i in &s.turn_off {
                active[i] = false;
            }
            for &i in &s.turn_on {
                active[i] = true;
            }
        }
        (0..self.terms.len()).filter(|&i| active[i]).collect()
    }

    /// The instantaneous Hamiltonian at `s ∈ [0,1]` within `step`.
    pub fn hamiltonian_at(&self, step: usize, s: f64) -> Result<HamiltonianSpec> {
        let active = self.active_before(step);
        let st = &self.steps[step];
        let f = self.schedule.f(s);
        let g = self.schedule.g(s);
        let mut terms = Vec::new();
        for &i in &active {
            let weight = if st.turn_off.contains(&i) { f } else { 1.0 };
            terms.push((self.terms[i].0 * weight, self.terms[i].1.clone()));
        }
        for &i in &st.turn_on {
            terms.push((self.terms[i].0 * g, self.terms[i].1.clone()));
        }
        HamiltonianSpec::from_terms(self.n_qubits, self.delta, terms)
    }

    pub fn initial_hamiltonian(&self) -> Result<HamiltonianSpec> {
        let terms = self
            .active_before(0)
            .into_iter()
            .map(|i| self.terms[i].clone())
            .collect();
        HamiltonianSpec::from_terms(self.n_qubits, self.delta, terms)
    }

    pub fn final_hamiltonian(&self) -> Result<HamiltonianSpec> {
        let terms = self
            .active_before(self.steps.len())
            .into_iter()
            .map(|i| self.terms[i].clone())
            .collect();
        HamiltonianSpec::from_terms(self.n_qubits, self.delta, terms)
    }

    /// Replays the plan symbolically from `start`, one frame per step.
    ///
    /// Each ramped-off term must be a single Pauli generator of the running
    /// frame and each ramped-on term a single Pauli field. Within a step the
    /// fields are processed in listed order; each consumes the last-listed
    /// off-generator (still unconsumed) that anticommutes with it. Off-terms
    /// left unconsumed survive as conserved products through the usual repair
    /// multiplications.
    pub fn replay_symbolic(&self, start: &StabilizerFrame) -> Result<Vec<StabilizerFrame>> {
        let mut frame = start.clone();
        let mut out = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let off_words: Vec<PauliString> = step
                .turn_off
                .iter()
                .map(|&i| designated_generator(&self.terms[i]))
                .collect();
            let mut consumed = vec![false; off_words.len()];
            for &on_idx in &step.turn_on {
                let field = designated_generator(&self.terms[on_idx]);
                let candidate = (0..off_words.len())
                    .rev()
                    .find(|&j| !consumed[j] && !field.commutes_with(&off_words[j]).unwrap_or(true));
                let j = candidate.ok_or_else(|| Error::NotSymbolic {
                    reason: format!("field {field} has no anticommuting off-generator"),
                })?;
                consumed[j] = true;
                let gen_idx = frame
                    .generators()
                    .iter()
                    .position(|g| g == &off_words[j])
                    .ok_or_else(|| Error::NotSymbolic {
                        reason: format!("off-term {} is not a frame generator", off_words[j]),
                    })?;
                frame = frame.dragging_update(gen_idx, &field)?;
            }
            out.push(frame.clone());
        }
        Ok(out)
    }
}

/// The +1-designated generator of a Hamiltonian term `c·W`: the ground state
/// of `c·W` has `sign(-c)·W = +1`.
fn designated_generator(term: &(f64, PauliString)) -> PauliString {
    if term.0 <= 0.0 {
        term.1.clone()
    } else {
        term.1.negated()
    }
}

/// Field style for chain plans.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainStyle {
    /// Untwisted stabilizers, plain `-Δ X_i` fields.
    Plain,
    /// Rotated stabilizers `T_i`, plain `-Δ X_i` fields.
    Twisted(RotationProfile),
    /// Untwisted stabilizers, rotated fields `-Δ M(-θ_i)_i`.
    RotatedFields(RotationProfile),
}

/// Builds the sequential chain plan: step `i` turns off the stabilizer
/// anticommuting with the site-`i` field and turns that field on.
pub fn chain_plan(
    n: usize,
    delta: f64,
    style: &ChainStyle,
    schedule: Schedule,
) -> Result<DraggingPlan> {
    let base = match style {
        ChainStyle::Plain => build_chain_h0(n, delta)?,
        ChainStyle::Twisted(prof) => build_twisted_chain(n, delta, prof)?,
        ChainStyle::RotatedFields(_) => build_chain_h0(n, delta)?,
    };
    let mut terms: Vec<(f64, PauliString)> = base.terms().to_vec();
    let initially_active: Vec<usize> = (0..terms.len()).collect();

    // Term indices of each stabilizer unit T_i (1 or 2 flat terms).
    let unit_of = |i: usize, terms: &[(f64, PauliString)]| -> Vec<usize> {
        let s = crate::frame::chain_stabilizer(n, i);
        terms
            .iter()
            .enumerate()
            .filter(|(_, (_, w))| {
                w.x_mask() == s.x_mask() && (w.z_mask() | s.x_mask()) == (s.z_mask() | s.x_mask())
            })
            .map(|(idx, _)| idx)
            .collect()
    };

    let mut steps = Vec::new();
    for i in 1..n {
        let off = unit_of(i, &terms);
        if off.is_empty() {
            return Err(Error::InvalidPlan {
                reason: format!("no stabilizer unit found for site {i}"),
            });
        }
        let field = match style {
            ChainStyle::Plain | ChainStyle::Twisted(_) => local_field_term(n, i, 0.0, delta)?,
            ChainStyle::RotatedFields(prof) => local_field_term(n, i, prof.theta(i), delta)?,
        };
        let mut on = Vec::new();
        for t in field.terms() {
            on.push(terms.len());
            terms.push(t.clone());
        }
        steps.push(PlanStep {
            turn_off: off,
            turn_on: on,
        });
    }
    DraggingPlan::new(n, delta, terms, initially_active, steps, schedule)
}

/// The two-step preparation plan: `(off S_1, on X_1)` then
/// `(off {S_0, S_2}, on X_2)`.
pub fn prep_plan(n: usize, delta: f64, schedule: Schedule) -> Result<DraggingPlan> {
    if n < 4 {
        return Err(Error::ChainTooShort { n });
    }
    let base = build_prep_chain(n, delta)?;
    let mut terms: Vec<(f64, PauliString)> = base.terms().to_vec();
    let initially_active: Vec<usize> = (0..terms.len()).collect();
    let find = |w: &PauliString, terms: &[(f64, PauliString)]| -> usize {
        terms.iter().position(|(_, t)| t == w).expect("term present")
    };
    let s0 = PauliString::from_factors(n, &[(1, Axis::X), (2, Axis::Z)]);
    let s1 = crate::frame::chain_stabilizer(n, 1);
    let s2 = crate::frame::chain_stabilizer(n, 2);

    let x1 = terms.len();
    terms.push((-delta, PauliString::single(n, 1, Axis::X)));
    let x2 = terms.len();
    terms.push((-delta, PauliString::single(n, 2, Axis::X)));

    let steps = vec![
        PlanStep {
            turn_off: vec![find(&s1, &terms)],
            turn_on: vec![x1],
        },
        PlanStep {
            turn_off: vec![find(&s0, &terms), find(&s2, &terms)],
            turn_on: vec![x2],
        },
    ];
    DraggingPlan::new(n, delta, terms, initially_active, steps, schedule)
}

/// The six-qubit two-wire plan: one step turning on all four fields while
/// turning off all four stabilizers.
pub fn h2_plan(delta: f64, schedule: Schedule) -> Result<DraggingPlan> {
    let base = build_two_qubit_h2(delta)?;
    let mut terms: Vec<(f64, PauliString)> = base.terms().to_vec();
    let initially_active: Vec<usize> = (0..terms.len()).collect();
    let turn_off = initially_active.clone();
    let mut turn_on = Vec::new();
    // Fields in the listed order X_{1,a}, X_{1,b}, X_{2,a}, X_{2,b}.
    for site in [1usize, 4, 2, 5] {
        turn_on.push(terms.len());
        terms.push((-delta, PauliString::single(6, site, Axis::X)));
    }
    DraggingPlan::new(
        6,
        delta,
        terms,
        initially_active,
        vec![PlanStep { turn_off, turn_on }],
        schedule,
    )
}

/// In/out frames for a chain plan with the standard endpoint encoding.
pub fn chain_frames(n: usize) -> Result<(StabilizerFrame, StabilizerFrame)> {
    let input = chain_frame(n)?;
    let generators = (1..n)
        .map(|i| PauliString::single(n, i, Axis::X))
        .collect();
    let logicals = vec![LogicalPair {
        x_op: PauliString::single(n, n, Axis::X),
        z_op: PauliString::single(n, n, Axis::Z),
    }];
    let output = StabilizerFrame::new(n, generators, logicals)?;
    Ok((input, output))
}

/// In/out frames for the twisted-chain plan: the twisted code is not a Pauli
/// frame, so only the logical pairs are carried (they are untouched by the
/// twist thanks to `θ_1 = θ_n = 0`).
pub fn chain_frames_logical_only(n: usize) -> Result<(StabilizerFrame, StabilizerFrame)> {
    let input = StabilizerFrame::new(
        n,
        Vec::new(),
        vec![LogicalPair {
            x_op: PauliString::from_factors(n, &[(1, Axis::X), (2, Axis::Z)]),
            z_op: PauliString::single(n, 1, Axis::Z),
        }],
    )?;
    let output = StabilizerFrame::new(
        n,
        Vec::new(),
        vec![LogicalPair {
            x_op: PauliString::single(n, n, Axis::X),
            z_op: PauliString::single(n, n, Axis::Z),
        }],
    )?;
    Ok((input, output))
}

/// In/out frames for the six-qubit plan.
pub fn h2_frames() -> Result<(StabilizerFrame, StabilizerFrame)> {
    let input = two_qubit_frame()?;
    let n = 6;
    let generators = [1usize, 2, 4, 5]
        .iter()
        .map(|&s| PauliString::single(n, s, Axis::X))
        .collect();
    let logicals = (0..2)
        .map(|wire| LogicalPair {
            x_op: PauliString::single(n, wire * 3 + 3, Axis::X),
            z_op: PauliString::single(n, wire * 3 + 3, Axis::Z),
        })
        .collect();
    let output = StabilizerFrame::new(n, generators, logicals)?;
    Ok((input, output))
}

/// In frame for the preparation plan (no logical qubits).
pub fn prep_frames(n: usize) -> Result<StabilizerFrame> {
    prep_frame(n)
}
