//! Time-dependent Schrödinger integration, gap scans and logical-unitary
//! extraction for dragging plans.
//!
//! The integrator is fixed-step classical Runge-Kutta on `i·dψ/dt = H(t)ψ`
//! with the substep count chosen per dragging step from the norm-drift budget
//! (RK4 loses norm at rate `(λ·dt)^6/144` per substep for spectral radius λ,
//! bounded here by the sum of active coefficient magnitudes). Norm drift over
//! the whole run is the accuracy diagnostic: exceeding the budget is an error,
//! never silently renormalized away.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::StabilizerFrame;
use crate::hamiltonian::{CompiledTerm, HamiltonianSpec, StateVector};
use crate::pauli::PauliString;
use crate::schedule::DraggingPlan;

type C64 = Complex64;

/// Tolerance separating true degeneracy from numerical splitting.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    /// Norm-drift budget for the full run.
    pub drift_budget: f64,
    /// Hard cap on the substep size (resolves the schedule shape).
    pub max_dt: f64,
    /// Minimum substeps per dragging step.
    pub min_substeps: usize,
    /// Safety factor on the drift-derived substep size.
    pub safety: f64,
    /// Keep the state after every dragging step.
    pub record_step_states: bool,
}

impl Default for IntegratorOptions {
    fn default() -> IntegratorOptions {
        IntegratorOptions {
            drift_budget: 1e-9,
            max_dt: 0.05,
            min_substeps: 2000,
            safety: 0.7,
            record_step_states: false,
        }
    }
}

/// Outcome of one plan execution.
#[derive(Debug, Clone)]
pub struct EvolutionReport {
    pub final_state: StateVector,
    /// State after each dragging step (normalized copies), when requested.
    pub step_states: Vec<StateVector>,
    /// |norm - 1| accumulated over the full run.
    pub norm_drift: f64,
    pub substeps_per_step: Vec<usize>,
    pub wall_ms: f64,
}

struct WeightedTerm {
    term: CompiledTerm,
    /// 0 = steady, 1 = turning off (weight f), 2 = turning on (weight g).
    role: u8,
}

fn step_terms(plan: &DraggingPlan, step: usize) -> Vec<WeightedTerm> {
    let active = plan.active_before(step);
    let st = &plan.steps()[step];
    let mut out = Vec::new();
    for &i in &active {
        let (c, w) = &plan.terms()[i];
        let role = if st.turn_off.contains(&i) { 1 } else { 0 };
        out.push(WeightedTerm {
            term: CompiledTerm::new(*c, w),
            role,
        });
    }
    for &i in &st.turn_on {
        let (c, w) = &plan.terms()[i];
        out.push(WeightedTerm {
            term: CompiledTerm::new(*c, w),
            role: 2,
        });
    }
    out
}

fn coeff_magnitude_bound(plan: &DraggingPlan, step: usize) -> f64 {
    let active = plan.active_before(step);
    let st = &plan.steps()[step];
    let mut total = 0.0;
    for &i in &active {
        total += plan.terms()[i].0.abs();
    }
    for &i in &st.turn_on {
        total += plan.terms()[i].0.abs();
    }
    total
}

/// Substeps for one dragging step so its share of the drift budget holds.
fn substeps_for(duration: f64, lambda: f64, budget: f64, opts: &IntegratorOptions) -> usize {
    // drift ≈ duration · λ^6 · dt^5 / 144 ≤ budget
    let dt_drift = if lambda > 0.0 {
        (144.0 * budget / (duration * lambda.powi(6))).powf(0.2) * opts.safety
    } else {
        opts.max_dt
    };
    let dt = dt_drift.min(opts.max_dt);
    ((duration / dt).ceil() as usize).max(opts.min_substeps)
}

/// Integrates the plan from `initial`, one RK4 pass per dragging step.
pub fn evolve_state(
    plan: &DraggingPlan,
    initial: &StateVector,
    opts: &IntegratorOptions,
) -> Result<EvolutionReport> {
    if initial.n_qubits() != plan.n_qubits() {
        return Err(Error::QubitCountMismatch {
            left: initial.n_qubits(),
            right: plan.n_qubits(),
        });
    }
    let started = std::time::Instant::now();
    let n_steps = plan.steps().len().max(1);
    let step_budget = opts.drift_budget / n_steps as f64;
    let duration = plan.schedule().t_step / plan.delta();

    let dim = initial.amplitudes().len();
    let mut psi = initial.amplitudes().clone();
    let mut k1 = DVector::<C64>::zeros(dim);
    let mut k2 = DVector::<C64>::zeros(dim);
    let mut k3 = DVector::<C64>::zeros(dim);
    let mut k4 = DVector::<C64>::zeros(dim);
    let mut scratch = DVector::<C64>::zeros(dim);

    let mut step_states = Vec::new();
    let mut substeps_per_step = Vec::new();

    for step in 0..plan.steps().len() {
        let terms = step_terms(plan, step);
        let lambda = coeff_magnitude_bound(plan, step);
        let substeps = substeps_for(duration, lambda, step_budget, opts);
        substeps_per_step.push(substeps);
        let dt = duration / substeps as f64;
        let schedule = *plan.schedule();

        // out = -i · H(s) · input
        let rhs = |s: f64, input: &DVector<C64>, out: &mut DVector<C64>| {
            out.fill(C64::new(0.0, 0.0));
            let f = schedule.f(s);
            let g = schedule.g(s);
            for wt in &terms {
                let weight = match wt.role {
                    0 => 1.0,
                    1 => f,
                    _ => g,
                };
                if weight != 0.0 {
                    wt.term
                        .accumulate(weight, input.as_slice(), out.as_mut_slice());
                }
            }
            for v in out.iter_mut() {
                *v = C64::new(v.im, -v.re);
            }
        };

        for k in 0..substeps {
            let t = k as f64 * dt;
            let s0 = t / duration;
            let s_half = (t + 0.5 * dt) / duration;
            let s1 = (t + dt) / duration;

            rhs(s0, &psi, &mut k1);
            scratch.copy_from(&psi);
            scratch.axpy(C64::new(0.5 * dt, 0.0), &k1, C64::new(1.0, 0.0));
            rhs(s_half, &scratch, &mut k2);
            scratch.copy_from(&psi);
            scratch.axpy(C64::new(0.5 * dt, 0.0), &k2, C64::new(1.0, 0.0));
            rhs(s_half, &scratch, &mut k3);
            scratch.copy_from(&psi);
            scratch.axpy(C64::new(dt, 0.0), &k3, C64::new(1.0, 0.0));
            rhs(s1, &scratch, &mut k4);

            let sixth = dt / 6.0;
            for idx in 0..dim {
                psi[idx] +=
                    C64::new(sixth, 0.0) * (k1[idx] + k2[idx] * 2.0 + k3[idx] * 2.0 + k4[idx]);
            }
        }

        if opts.record_step_states {
            let mut snapshot = psi.clone();
            let norm = snapshot.norm();
            snapshot /= C64::new(norm, 0.0);
            step_states.push(StateVector::new(plan.n_qubits(), snapshot)?);
        }
    }

    let norm = psi.norm();
    let drift = (norm - 1.0).abs();
    if drift > opts.drift_budget {
        return Err(Error::NormDriftExceeded {
            drift,
            budget: opts.drift_budget,
        });
    }
    psi /= C64::new(norm, 0.0);
    Ok(EvolutionReport {
        final_state: StateVector::new(plan.n_qubits(), psi)?,
        step_states,
        norm_drift: drift,
        substeps_per_step,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// One `(step, s, gap)` sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapPoint {
    pub step: usize,
    pub s: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct GapScan {
    pub points: Vec<GapPoint>,
    /// Refined minimum gap per step.
    pub per_step_min: Vec<f64>,
}

impl GapScan {
    pub fn min_gap(&self) -> f64 {
        self.per_step_min
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Instantaneous gap between the ground manifold (degeneracy-resolved) and
/// the first level above it, optionally within a symmetry sector.
fn gap_at(
    plan: &DraggingPlan,
    step: usize,
    s: f64,
    sector: Option<&(PauliString, i8)>,
) -> Result<f64> {
    let h = plan.hamiltonian_at(step, s)?;
    let energies = match sector {
        None => h.low_spectrum(1 << plan.n_qubits(), false)?.energies,
        Some((sym, sign)) => {
            let restricted = h.sector_restrict(sym, *sign)?;
            let dim = restricted.isometry()?.ncols();
            restricted.low_spectrum(dim, false)?.energies
        }
    };
    let e0 = energies[0];
    let d = energies
        .iter()
        .take_while(|&&e| e - e0 <= DEGENERACY_TOL)
        .count();
    Ok(energies.get(d).map(|e| e - e0).unwrap_or(f64::INFINITY))
}

/// Samples the instantaneous gap over every step and refines each per-step
/// minimum by ternary search (a coarse grid alone cannot certify the minimum
/// to the tolerances the chain tests demand).
pub fn gap_scan(
    plan: &DraggingPlan,
    samples_per_step: usize,
    sector: Option<&(PauliString, i8)>,
) -> Result<GapScan> {
    let samples = samples_per_step.max(2);
    let mut points = Vec::new();
    let mut per_step_min = Vec::new();
    for step in 0..plan.steps().len() {
        let mut best = (0usize, f64::INFINITY);
        for j in 0..samples {
            let s = j as f64 / (samples - 1) as f64;
            let gap = gap_at(plan, step, s, sector)?;
            points.push(GapPoint { step, s, gap });
            if gap < best.1 {
                best = (j, gap);
            }
        }
        // Ternary refinement between the best sample's neighbors.
        let lo_j = best.0.saturating_sub(1);
        let hi_j = (best.0 + 1).min(samples - 1);
        let mut lo = lo_j as f64 / (samples - 1) as f64;
        let mut hi = hi_j as f64 / (samples - 1) as f64;
        let mut min_gap = best.1;
        for _ in 0..60 {
            if hi - lo < 1e-10 {
                break;
            }
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            let g1 = gap_at(plan, step, m1, sector)?;
            let g2 = gap_at(plan, step, m2, sector)?;
            min_gap = min_gap.min(g1).min(g2);
            if g1 < g2 {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        per_step_min.push(min_gap);
    }
    Ok(GapScan {
        points,
        per_step_min,
    })
}

/// Orthonormal, logically labeled basis of the lowest eigenspace.
#[derive(Debug, Clone)]
pub struct GroundBasis {
    pub energy: f64,
    /// `vectors[m]` is the logical computational basis state `|m⟩`, labels
    /// ordered with the first logical pair as the most significant bit.
    pub vectors: Vec<DVector<C64>>,
}

/// Builds the labeled ground basis of `h` for the logical pairs of `frame`.
///
/// The logical `|0…0⟩` is the ground-space vector in the joint +1 eigenspace
/// of the Z̄ operators (deterministic seed scan and phase convention); the
/// other basis states are generated by the X̄ words so the logical Pauli
/// representations hold exactly. Expected dimension is `2^(#pairs)`.
pub fn ground_space_basis(h: &HamiltonianSpec, frame: &StabilizerFrame) -> Result<GroundBasis> {
    let expected = 1usize << frame.n_logical_qubits();
    let n = h.n_qubits();
    if frame.n_qubits() != n {
        return Err(Error::QubitCountMismatch {
            left: frame.n_qubits(),
            right: n,
        });
    }
    let dim = 1usize << n;

    // Stabilizer fast path: commuting independent terms pin the ground space
    // exactly, so it can be projected out without any diagonalization.
    if let Some(basis) = stabilizer_ground_basis(h, frame, expected)? {
        return Ok(basis);
    }

    let spec = h.low_spectrum(dim, true)?;
    let found = spec.ground_degeneracy(DEGENERACY_TOL);
    if found != expected {
        return Err(Error::DegeneracyMismatch { expected, found });
    }
    let energy = spec.energies[0];
    // Project the joint Z̄ = +1 component out of the eigenvectors.
    let mut best: Option<DVector<C64>> = None;
    let mut best_norm = 0.0;
    for v in spec.states.iter().take(found) {
        let mut w = v.clone();
        for pair in frame.logicals() {
            w = project_plus(&w, &pair.z_op);
        }
        let norm = w.norm();
        if norm > best_norm + 1e-12 {
            best_norm = norm;
            best = Some(w);
        }
    }
    let mut v0 = best.ok_or(Error::DegeneracyMismatch { expected, found: 0 })?;
    if best_norm < 1e-6 {
        return Err(Error::DegeneracyMismatch { expected, found });
    }
    v0 /= C64::new(best_norm, 0.0);
    fix_phase(&mut v0);
    build_labeled_basis(h, frame, v0, energy, expected)
}

fn stabilizer_ground_basis(
    h: &HamiltonianSpec,
    frame: &StabilizerFrame,
    expected: usize,
) -> Result<Option<GroundBasis>> {
    let n = h.n_qubits();
    if !h.terms_commute() {
        return Ok(None);
    }
    let generators: Vec<PauliString> = h
        .terms()
        .iter()
        .map(|(c, w)| if *c <= 0.0 { w.clone() } else { w.negated() })
        .collect();
    // The frame validator carries the independence rank check.
    if StabilizerFrame::new(n, generators.clone(), Vec::new()).is_err() {
        return Ok(None);
    }
    if 1usize << (n - generators.len()) != expected {
        return Err(Error::DegeneracyMismatch {
            expected,
            found: 1usize << (n - generators.len()),
        });
    }
    for pair in frame.logicals() {
        for op in [&pair.x_op, &pair.z_op] {
            for g in &generators {
                if !op.commutes_with(g)? {
                    return Ok(None);
                }
            }
        }
    }
    let energy: f64 = h.terms().iter().map(|(c, _)| -c.abs()).sum();
    let dim = 1usize << n;
    let mut v0 = None;
    for seed in 0..dim {
        let mut v = DVector::<C64>::zeros(dim);
        v[seed] = C64::new(1.0, 0.0);
        for g in &generators {
            v = project_plus(&v, g);
        }
        for pair in frame.logicals() {
            v = project_plus(&v, &pair.z_op);
        }
        let norm = v.norm();
        if norm > 1e-9 {
            v /= C64::new(norm, 0.0);
            fix_phase(&mut v);
            v0 = Some(v);
            break;
        }
    }
    let v0 = v0.ok_or(Error::DegeneracyMismatch { expected, found: 0 })?;
    Ok(Some(build_labeled_basis(h, frame, v0, energy, expected)?))
}

fn build_labeled_basis(
    h: &HamiltonianSpec,
    frame: &StabilizerFrame,
    v0: DVector<C64>,
    energy: f64,
    expected: usize,
) -> Result<GroundBasis> {
    let k = frame.n_logical_qubits();
    let mut vectors = Vec::with_capacity(expected);
    for label in 0..expected {
        let mut v = v0.clone();
        for (j, pair) in frame.logicals().iter().enumerate() {
            if (label >> (k - 1 - j)) & 1 == 1 {
                v = apply_word(&pair.x_op, &v);
            }
        }
        // The labeled state must still be a ground state.
        let hv = h.apply(&v)?;
        let residual = (&hv - &v * C64::new(energy, 0.0)).norm();
        if residual > 1e-7 {
            return Err(Error::DegeneracyMismatch {
                expected,
                found: label,
            });
        }
        vectors.push(v);
    }
    Ok(GroundBasis { energy, vectors })
}

fn apply_word(word: &PauliString, v: &DVector<C64>) -> DVector<C64> {
    let t = CompiledTerm::new(1.0, word);
    let mut out = DVector::zeros(v.len());
    t.accumulate(1.0, v.as_slice(), out.as_mut_slice());
    out
}

fn project_plus(v: &DVector<C64>, word: &PauliString) -> DVector<C64> {
    let mut out = v.clone();
    CompiledTerm::new(1.0, word).accumulate(1.0, v.as_slice(), out.as_mut_slice());
    out * C64::new(0.5, 0.0)
}

/// Deterministic phase convention: the largest-magnitude amplitude is made
/// real positive (ties break toward the lowest index).
fn fix_phase(v: &mut DVector<C64>) {
    let mut best_idx = 0;
    let mut best_mag = 0.0;
    for (i, a) in v.iter().enumerate() {
        let m = a.norm();
        if m > best_mag + 1e-12 {
            best_mag = m;
            best_idx = i;
        }
    }
    if best_mag > 0.0 {
        let rot = v[best_idx].conj() / C64::new(best_mag, 0.0);
        *v *= rot;
    }
}

/// The induced logical matrix plus its leakage.
#[derive(Debug, Clone)]
pub struct InducedGate {
    /// `matrix[i, j] = ⟨out_i | U_plan | in_j⟩`.
    pub matrix: DMatrix<C64>,
    /// `1 - σ_min(matrix)²`: population escaping the target ground space.
    pub leakage: f64,
    pub norm_drift: f64,
    /// One report per evolved logical basis state.
    pub reports: Vec<EvolutionReport>,
}

/// Evolves every labeled logical basis state of the input frame and projects
/// onto the output logical basis. The matrix is meaningful up to one global
/// phase; compare with [`process_fidelity`]. High leakage is reported, never
/// normalized away.
pub fn induced_logical_unitary(
    plan: &DraggingPlan,
    in_frame: &StabilizerFrame,
    out_frame: &StabilizerFrame,
    opts: &IntegratorOptions,
) -> Result<InducedGate> {
    let h_init = plan.initial_hamiltonian()?;
    let h_final = plan.final_hamiltonian()?;
    let in_basis = ground_space_basis(&h_init, in_frame)?;
    let out_basis = ground_space_basis(&h_final, out_frame)?;
    let d_in = in_basis.vectors.len();
    let d_out = out_basis.vectors.len();

    let reports: Vec<EvolutionReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = in_basis
            .vectors
            .iter()
            .map(|v| {
                let start = StateVector::new(plan.n_qubits(), v.clone());
                scope.spawn(move || evolve_state(plan, &start?, opts))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evolution worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut matrix = DMatrix::<C64>::zeros(d_out, d_in);
    for (j, report) in reports.iter().enumerate() {
        let psi = report.final_state.amplitudes();
        for (i, out_vec) in out_basis.vectors.iter().enumerate() {
            matrix[(i, j)] = out_vec.dotc(psi);
        }
    }
    let svd = matrix.clone().svd(false, false);
    let sigma_min = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let leakage = (1.0 - sigma_min * sigma_min).max(0.0);
    let norm_drift = reports.iter().map(|r| r.norm_drift).fold(0.0f64, f64::max);
    Ok(InducedGate {
        matrix,
        leakage,
        norm_drift,
        reports,
    })
}

/// `|tr(v† u)|² / d²`, invariant under a global phase of either argument.
pub fn process_fidelity(u: &DMatrix<C64>, v: &DMatrix<C64>) -> Result<f64> {
    if u.nrows() != u.ncols() || v.nrows() != v.ncols() || u.nrows() != v.nrows() {
        return Err(Error::DimensionMismatch {
            left: u.nrows(),
            right: v.nrows(),
        });
    }
    let d = u.nrows() as f64;
    let tr = (v.adjoint() * u).trace();
    Ok((tr.norm() / d).powi(2))
}

/// Fidelity for equal-shape isometry blocks (`d_out x d_in`), normalized by
/// the input dimension; reduces to [`process_fidelity`] for square inputs and
/// to state fidelity for single-column inputs.
pub fn isometry_fidelity(u: &DMatrix<C64>, v: &DMatrix<C64>) -> Result<f64> {
    if u.nrows() != v.nrows() || u.ncols() != v.ncols() {
        return Err(Error::DimensionMismatch {
            left: u.nrows() * u.ncols(),
            right: v.nrows() * v.ncols(),
        });
    }
    let d = u.ncols() as f64;
    let tr = (v.adjoint() * u).trace();
    Ok((tr.norm() / d).powi(2))
}
