//! Maps small logical circuits onto cluster layouts and dragging plans, and
//! verifies the executed plan against a circuit-model oracle.
//!
//! Compilation accounting: consuming a site enacts `U(θ_next)·H` on its wire,
//! and a vertical edge enacts a CZ as the information crosses it. A wire
//! whose first element already starts with a Hadamard maps one gate to one
//! site; a leading rotation needs an inserted Hadamard pair, and a leading
//! two-qubit block on an unprepared wire leaves a recorded input-side
//! Hadamard parity instead (keeping the bare block exactly the six-qubit
//! pattern). Prepared wires are always compiled exactly so the prepared
//! `|+⟩` carries through the user's circuit unchanged.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::dense_cap;
use crate::error::{Error, Result};
use crate::evolve::{
    gap_scan, induced_logical_unitary, isometry_fidelity, IntegratorOptions,
};
use crate::frame::{LogicalPair, StabilizerFrame};
use crate::gates;
use crate::pauli::{z_rotate_conjugate, Axis, PauliString};
use crate::schedule::{DraggingPlan, PlanStep, Schedule};

type C64 = Complex64;

/// One logical gate of the input language.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Gate {
    H { qubit: usize },
    HRot { theta: f64, qubit: usize },
    CzBlock { a: usize, b: usize },
}

/// A parsed logical circuit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitIR {
    pub m: usize,
    pub gates: Vec<Gate>,
    /// Wires prepared in the +1 eigenstate of X.
    pub prepared: Vec<bool>,
}

/// Parses the line-oriented circuit format.
///
/// Grammar (one instruction per line, `#` starts a comment):
///
/// ```text
/// qubits 2          # optional, must precede instructions
/// prepx q0
/// h q0
/// hrot 0.785398 q1
/// czh q0 q1
/// ```
///
/// Without a `qubits` directive the count is inferred from the largest index.
pub fn parse_circuit(text: &str) -> Result<CircuitIR> {
    let mut declared_m: Option<usize> = None;
    let mut gates = Vec::new();
    let mut prep_sites: Vec<usize> = Vec::new();
    let mut max_index = 0usize;
    let mut saw_instruction = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| Error::ParseError {
            line: lineno + 1,
            reason,
        };
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap();
        let mut qubit_arg = |tok: Option<&str>| -> Result<usize> {
            let tok = tok.ok_or_else(|| err("missing qubit argument".into()))?;
            let idx: usize = tok
                .strip_prefix('q')
                .ok_or_else(|| err(format!("expected qN, got '{tok}'")))?
                .parse()
                .map_err(|_| err(format!("bad qubit index '{tok}'")))?;
            if let Some(m) = declared_m {
                if idx >= m {
                    return Err(err(format!("qubit q{idx} out of range for {m} qubits")));
                }
            }
            max_index = max_index.max(idx);
            Ok(idx)
        };
        match head {
            "qubits" => {
                if saw_instruction {
                    return Err(err("'qubits' must precede instructions".into()));
                }
                let m: usize = parts
                    .next()
                    .ok_or_else(|| err("missing count".into()))?
                    .parse()
                    .map_err(|_| err("bad qubit count".into()))?;
                if m == 0 {
                    return Err(err("qubit count must be positive".into()));
                }
                declared_m = Some(m);
            }
            "prepx" => {
                saw_instruction = true;
                prep_sites.push(qubit_arg(parts.next())?);
            }
            "h" => {
                saw_instruction = true;
                gates.push(Gate::H {
                    qubit: qubit_arg(parts.next())?,
                });
            }
            "hrot" => {
                saw_instruction = true;
                let theta: f64 = parts
                    .next()
                    .ok_or_else(|| err("missing angle".into()))?
                    .parse()
                    .map_err(|_| err("bad angle".into()))?;
                if !theta.is_finite() {
                    return Err(err("angle must be finite".into()));
                }
                gates.push(Gate::HRot {
                    theta,
                    qubit: qubit_arg(parts.next())?,
                });
            }
            "czh" => {
                saw_instruction = true;
                let a = qubit_arg(parts.next())?;
                let b = qubit_arg(parts.next())?;
                if a == b {
                    return Err(err("czh needs two distinct qubits".into()));
                }
                gates.push(Gate::CzBlock { a, b });
            }
            other => return Err(err(format!("unknown instruction '{other}'"))),
        }
        if parts.next().is_some() {
            return Err(err("trailing tokens".into()));
        }
    }
    let m = declared_m.unwrap_or(max_index + 1);
    let mut prepared = vec![false; m];
    for q in prep_sites {
        prepared[q] = true;
    }
    Ok(CircuitIR { m, gates, prepared })
}

/// Per-wire layout data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WireLayout {
    /// Field angle per site (the terminal site always carries 0).
    pub angles: Vec<f64>,
    /// Flat 1-based id of this wire's first site.
    pub first_site: usize,
    pub prepared: bool,
    /// 1 when the realized wire word is the intended word times a leading
    /// (input-side) Hadamard; folded into the verification target.
    pub input_hadamard_parity: u8,
}

impl WireLayout {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn site(&self, column: usize) -> usize {
        self.first_site + column - 1
    }

    pub fn landing_site(&self) -> usize {
        self.first_site + self.len() - 1
    }
}

/// A compiled cluster layout: graph, angles and turn-on order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterLayout {
    pub n_qubits: usize,
    pub wires: Vec<WireLayout>,
    /// Vertical CZ edges between flat sites (horizontal chain links are
    /// implicit between column neighbors).
    pub edges: Vec<(usize, usize)>,
    /// Consumed flat sites per step, in execution order.
    pub turn_on_order: Vec<Vec<usize>>,
    /// Logical qubit -> flat landing site.
    pub wire_end_map: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Emission {
    Had,
    Rot(f64),
    CzEdge { block: usize },
}

/// Compiles the IR onto wires: one site per Hadamard-bearing element, pad
/// pairs where a leading rotation or a prepared leading block demands them,
/// and the six-qubit pattern for each `czh`.
pub fn compile_layout(ir: &CircuitIR) -> Result<ClusterLayout> {
    for g in &ir.gates {
        let qubits: &[usize] = match g {
            Gate::H { qubit } | Gate::HRot { qubit, .. } => std::slice::from_ref(qubit),
            Gate::CzBlock { a, b } => {
                if a == b {
                    return Err(Error::InvalidPlan {
                        reason: "czh needs two distinct qubits".into(),
                    });
                }
                // Checked below via the same loop body.
                &[]
            }
        };
        for &q in qubits {
            if q >= ir.m {
                return Err(Error::SiteOutOfRange {
                    site: q,
                    n_qubits: ir.m,
                });
            }
        }
        if let Gate::CzBlock { a, b } = g {
            if *a >= ir.m || *b >= ir.m {
                return Err(Error::SiteOutOfRange {
                    site: (*a).max(*b),
                    n_qubits: ir.m,
                });
            }
        }
    }

    // Chronological emissions per wire.
    let mut emissions: Vec<Vec<Emission>> = vec![Vec::new(); ir.m];
    for (gate_idx, gate) in ir.gates.iter().enumerate() {
        match gate {
            Gate::H { qubit } => emissions[*qubit].push(Emission::Had),
            Gate::HRot { theta, qubit } => {
                emissions[*qubit].push(Emission::Rot(*theta));
                emissions[*qubit].push(Emission::Had);
            }
            Gate::CzBlock { a, b } => {
                for w in [*a, *b] {
                    emissions[w].push(Emission::CzEdge { block: gate_idx });
                    emissions[w].push(Emission::Had);
                }
            }
        }
    }

    // Padding per wire.
    let count_hads = |ems: &[Emission]| ems.iter().filter(|e| matches!(e, Emission::Had)).count();
    let mut parities = vec![0u8; ir.m];
    let mut pads_inserted = vec![0usize; ir.m];
    for (w, ems) in emissions.iter_mut().enumerate() {
        match ems.first() {
            None | Some(Emission::Had) => {}
            Some(Emission::Rot(_)) => {
                ems.insert(0, Emission::Had);
                ems.insert(0, Emission::Had);
                pads_inserted[w] += 2;
            }
            Some(Emission::CzEdge { .. }) => {
                if ir.prepared[w] {
                    ems.insert(0, Emission::Had);
                    ems.insert(0, Emission::Had);
                    pads_inserted[w] += 2;
                } else {
                    ems.insert(0, Emission::Had);
                    pads_inserted[w] += 1;
                    parities[w] = 1;
                }
            }
        }
        // A prepared wire needs its start stabilizer turned off mid-chain
        // (the degeneracy-raising step consumes site 2), so it must be at
        // least two steps long; identity pairs pad it out.
        if ir.prepared[w] {
            while count_hads(ems) < 2 {
                ems.insert(0, Emission::Had);
                ems.insert(0, Emission::Had);
                pads_inserted[w] += 2;
            }
        }
    }

    // Walk: assign sites, angles and edge columns.
    struct WireBuild {
        angles: Vec<f64>,
        /// Consumption ordinal of each gate's Hadamard on this wire.
        had_of_gate: Vec<(usize, usize)>, // (gate_idx or usize::MAX for pads, ordinal)
        edge_cols: Vec<(usize, usize)>, // (block id, column)
    }
    let mut builds: Vec<WireBuild> = Vec::new();
    for ems in &emissions {
        let mut angles = vec![0.0f64];
        let mut had_of_gate = Vec::new();
        let mut edge_cols = Vec::new();
        let mut k = 0usize;
        for e in ems {
            match e {
                Emission::Had => {
                    k += 1;
                    if angles.len() < k + 1 {
                        angles.push(0.0);
                    }
                    had_of_gate.push((usize::MAX, k));
                }
                Emission::Rot(theta) => {
                    while angles.len() < k + 2 {
                        angles.push(0.0);
                    }
                    angles[k + 1 - 1] = *theta;
                }
                Emission::CzEdge { block } => {
                    edge_cols.push((*block, k + 1));
                }
            }
        }
        builds.push(WireBuild {
            angles,
            had_of_gate,
            edge_cols,
        });
    }

    // Tag gate Hadamards with their gate index (pads keep usize::MAX).
    {
        let mut cursor = vec![0usize; ir.m];
        for (gate_idx, gate) in ir.gates.iter().enumerate() {
            let wires: Vec<usize> = match gate {
                Gate::H { qubit } | Gate::HRot { qubit, .. } => vec![*qubit],
                Gate::CzBlock { a, b } => vec![*a, *b],
            };
            for w in wires {
                // Pads were all inserted at the front, so gate Hadamards
                // follow them in gate order.
                let slot = pads_inserted[w] + cursor[w];
                builds[w].had_of_gate[slot].0 = gate_idx;
                cursor[w] += 1;
            }
        }
    }

    // Flat numbering, wire-major.
    let mut first_site = Vec::with_capacity(ir.m);
    let mut next = 1usize;
    for b in &builds {
        first_site.push(next);
        next += b.angles.len();
    }
    let n_qubits = next - 1;
    let cap = dense_cap();
    if n_qubits > cap {
        return Err(Error::SizeBudgetExceeded {
            needed: n_qubits,
            cap,
        });
    }

    // Vertical edges, paired per block.
    let mut edges = Vec::new();
    for (gate_idx, gate) in ir.gates.iter().enumerate() {
        if let Gate::CzBlock { a, b } = gate {
            let col_a = builds[*a]
                .edge_cols
                .iter()
                .find(|(blk, _)| *blk == gate_idx)
                .map(|(_, c)| *c)
                .expect("edge recorded");
            let col_b = builds[*b]
                .edge_cols
                .iter()
                .find(|(blk, _)| *blk == gate_idx)
                .map(|(_, c)| *c)
                .expect("edge recorded");
            edges.push((first_site[*a] + col_a - 1, first_site[*b] + col_b - 1));
        }
    }

    // Step schedule: per-wire sequential consumption, czh blocks grouped.
    let mut turn_on_order: Vec<Vec<usize>> = Vec::new();
    let mut next_col = vec![1usize; ir.m];
    let flat = |w: usize, col: usize| first_site[w] + col - 1;
    for (gate_idx, gate) in ir.gates.iter().enumerate() {
        match gate {
            Gate::H { qubit } | Gate::HRot { qubit, .. } => {
                let w = *qubit;
                let target = builds[w]
                    .had_of_gate
                    .iter()
                    .find(|(g, _)| *g == gate_idx)
                    .map(|(_, k)| *k)
                    .expect("gate tagged");
                while next_col[w] <= target {
                    turn_on_order.push(vec![flat(w, next_col[w])]);
                    next_col[w] += 1;
                }
            }
            Gate::CzBlock { a, b } => {
                let mut block_sites = Vec::new();
                let mut columns = Vec::new();
                for w in [*a, *b] {
                    let edge_col = builds[w]
                        .edge_cols
                        .iter()
                        .find(|(blk, _)| *blk == gate_idx)
                        .map(|(_, c)| *c)
                        .expect("edge recorded");
                    // Individual steps strictly before the block pair.
                    while next_col[w] + 1 < edge_col {
                        turn_on_order.push(vec![flat(w, next_col[w])]);
                        next_col[w] += 1;
                    }
                    columns.push((w, edge_col));
                }
                // Column-major field order: both pre-columns, then both edges.
                for &(w, edge_col) in &columns {
                    if next_col[w] == edge_col - 1 {
                        block_sites.push(flat(w, edge_col - 1));
                        next_col[w] += 1;
                    }
                }
                for &(w, edge_col) in &columns {
                    debug_assert_eq!(next_col[w], edge_col);
                    block_sites.push(flat(w, edge_col));
                    next_col[w] += 1;
                }
                turn_on_order.push(block_sites);
            }
        }
    }
    // Remaining sites before each landing are pads only when a wire had no
    // gates at all; every other Hadamard was claimed above.
    for (w, b) in builds.iter().enumerate() {
        let total_consumed = b.angles.len() - 1;
        while next_col[w] <= total_consumed {
            turn_on_order.push(vec![flat(w, next_col[w])]);
            next_col[w] += 1;
        }
    }

    let wires: Vec<WireLayout> = builds
        .iter()
        .enumerate()
        .map(|(w, b)| WireLayout {
            angles: b.angles.clone(),
            first_site: first_site[w],
            prepared: ir.prepared[w],
            input_hadamard_parity: parities[w],
        })
        .collect();
    let wire_end_map = wires.iter().map(|w| w.landing_site()).collect();
    Ok(ClusterLayout {
        n_qubits,
        wires,
        edges,
        turn_on_order,
        wire_end_map,
    })
}

/// Cluster stabilizer of a flat site: `X_v · Π Z_neighbors`, twisted by the
/// site angle.
fn k_operator_terms(
    layout: &ClusterLayout,
    wire: usize,
    column: usize,
    delta: f64,
) -> Vec<(f64, PauliString)> {
    let n = layout.n_qubits;
    let w = &layout.wires[wire];
    let v = w.site(column);
    let mut factors = vec![(v, Axis::X)];
    if column > 1 {
        factors.push((w.site(column - 1), Axis::Z));
    }
    if column < w.len() {
        factors.push((w.site(column + 1), Axis::Z));
    }
    for &(a, b) in &layout.edges {
        if a == v {
            factors.push((b, Axis::Z));
        } else if b == v {
            factors.push((a, Axis::Z));
        }
    }
    let base = PauliString::from_factors(n, &factors);
    let theta = w.angles[column - 1];
    if theta == 0.0 {
        return vec![(-delta, base)];
    }
    let sum = z_rotate_conjugate(&base, v, theta).expect("site in range");
    sum.terms()
        .iter()
        .map(|(c, word)| (-delta * c.re, word.clone()))
        .collect()
}

/// Emits the initial Hamiltonian, dragging plan and in/out frames (with
/// logical pairs for unprepared wires in, all wires out).
pub fn emit_plan(
    layout: &ClusterLayout,
    delta: f64,
    schedule: Schedule,
) -> Result<(DraggingPlan, StabilizerFrame, StabilizerFrame)> {
    let n = layout.n_qubits;
    // Stabilizer units: every non-start site; prepared wires add their
    // start-site stabilizer.
    struct Unit {
        term_ids: Vec<usize>,
        words: Vec<PauliString>,
    }
    let mut terms: Vec<(f64, PauliString)> = Vec::new();
    let mut units: Vec<Unit> = Vec::new();
    for (w, wire) in layout.wires.iter().enumerate() {
        let columns: Vec<usize> = if wire.prepared {
            (1..=wire.len()).collect()
        } else {
            (2..=wire.len()).collect()
        };
        for col in columns {
            let unit_terms = k_operator_terms(layout, w, col, delta);
            let mut ids = Vec::new();
            let mut words = Vec::new();
            for (c, word) in unit_terms {
                ids.push(terms.len());
                words.push(word.clone());
                terms.push((c, word));
            }
            units.push(Unit {
                term_ids: ids,
                words,
            });
        }
    }
    let initially_active: Vec<usize> = (0..terms.len()).collect();

    // Fields in turn-on order.
    let mut steps = Vec::new();
    let mut unit_active = vec![true; units.len()];
    for step_sites in &layout.turn_on_order {
        let mut turn_on = Vec::new();
        let mut fields = Vec::new();
        for &site in step_sites {
            let word = PauliString::single(n, site, Axis::X);
            fields.push(word.clone());
            turn_on.push(terms.len());
            terms.push((-delta, word));
        }
        let mut turn_off = Vec::new();
        for (u, unit) in units.iter().enumerate() {
            if !unit_active[u] {
                continue;
            }
            let anticommutes = unit.words.iter().any(|uw| {
                fields
                    .iter()
                    .any(|f| !uw.commutes_with(f).unwrap_or(true))
            });
            if anticommutes {
                unit_active[u] = false;
                turn_off.extend(unit.term_ids.iter().copied());
            }
        }
        steps.push(PlanStep { turn_off, turn_on });
    }
    let plan = DraggingPlan::new(n, delta, terms, initially_active, steps, schedule)?;

    // In-frame: logical pairs for unprepared wires.
    let mut in_logicals = Vec::new();
    for wire in &layout.wires {
        if wire.prepared {
            continue;
        }
        let s1 = wire.site(1);
        let x_op = if wire.len() >= 2 {
            PauliString::from_factors(n, &[(s1, Axis::X), (wire.site(2), Axis::Z)])
        } else {
            PauliString::single(n, s1, Axis::X)
        };
        in_logicals.push(LogicalPair {
            x_op,
            z_op: PauliString::single(n, s1, Axis::Z),
        });
    }
    let in_frame = StabilizerFrame::new(n, Vec::new(), in_logicals)?;

    // Out-frame: landing-site logicals on every wire.
    let out_logicals = layout
        .wires
        .iter()
        .map(|wire| LogicalPair {
            x_op: PauliString::single(n, wire.landing_site(), Axis::X),
            z_op: PauliString::single(n, wire.landing_site(), Axis::Z),
        })
        .collect();
    let out_frame = StabilizerFrame::new(n, Vec::new(), out_logicals)?;
    Ok((plan, in_frame, out_frame))
}

/// The circuit-model oracle: the product of the gate matrices in IR order
/// (`hrot θ` is `H·U(θ)`, `czh` is `(H⊗H)·CZ`), for up to three logical
/// qubits.
pub fn predicted_unitary(ir: &CircuitIR) -> Result<DMatrix<C64>> {
    if ir.m > 3 {
        return Err(Error::SizeBudgetExceeded {
            needed: ir.m,
            cap: 3,
        });
    }
    let dim = 1usize << ir.m;
    let mut u = DMatrix::<C64>::identity(dim, dim);
    for gate in &ir.gates {
        let g = match gate {
            Gate::H { qubit } => gates::embed_single(&gates::hadamard(), ir.m, *qubit),
            Gate::HRot { theta, qubit } => {
                gates::embed_single(&(gates::hadamard() * gates::u_z(*theta)), ir.m, *qubit)
            }
            Gate::CzBlock { a, b } => gates::embed_two(&gates::czh_element(), ir.m, *a, *b),
        };
        u = g * u;
    }
    Ok(u)
}

/// The verification target for a compiled layout: the oracle with the
/// recorded input-side Hadamard parities applied first, restricted to the
/// prepared wires' `|+⟩` inputs.
pub fn verification_target(ir: &CircuitIR, layout: &ClusterLayout) -> Result<DMatrix<C64>> {
    let oracle = predicted_unitary(ir)?;
    let m = ir.m;
    let mut wrapped = oracle;
    for (w, wire) in layout.wires.iter().enumerate() {
        if wire.input_hadamard_parity == 1 {
            wrapped *= gates::embed_single(&gates::hadamard(), m, w);
        }
    }
    // Columns over the unprepared wires' logical labels; prepared wires are
    // injected as |+⟩.
    let unprepared: Vec<usize> = (0..m).filter(|&w| !ir.prepared[w]).collect();
    let d_in = 1usize << unprepared.len();
    let dim = 1usize << m;
    let mut injection = DMatrix::<C64>::zeros(dim, d_in);
    let sqrt_half = std::f64::consts::FRAC_1_SQRT_2;
    for label in 0..d_in {
        // Build the product state column.
        let mut col = vec![C64::new(1.0, 0.0)];
        for w in 0..m {
            let factor: [C64; 2] = if ir.prepared[w] {
                [C64::new(sqrt_half, 0.0), C64::new(sqrt_half, 0.0)]
            } else {
                let pos = unprepared.iter().position(|&u| u == w).unwrap();
                let bit = (label >> (unprepared.len() - 1 - pos)) & 1;
                if bit == 0 {
                    [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
                } else {
                    [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
                }
            };
            let mut next = Vec::with_capacity(col.len() * 2);
            for amp in &col {
                next.push(amp * factor[0]);
                next.push(amp * factor[1]);
            }
            col = next;
        }
        for (row, amp) in col.iter().enumerate() {
            injection[(row, label)] = *amp;
        }
    }
    Ok(wrapped * injection)
}

/// Results of executing and checking a compiled plan.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub n_qubits: usize,
    pub fidelity: f64,
    pub leakage: f64,
    pub norm_drift: f64,
    /// Refined per-step minimum gaps (filled for small layouts).
    pub min_gaps: Vec<f64>,
}

/// Cap (in qubits) under which `verify_plan` also scans gaps.
const GAP_SCAN_CAP: usize = 9;

/// Runs the plan through the engine and compares against the oracle target.
pub fn verify_plan(
    plan: &DraggingPlan,
    in_frame: &StabilizerFrame,
    out_frame: &StabilizerFrame,
    target: &DMatrix<C64>,
    opts: &IntegratorOptions,
) -> Result<VerificationReport> {
    let induced = induced_logical_unitary(plan, in_frame, out_frame, opts)?;
    let fidelity = isometry_fidelity(&induced.matrix, target)?;
    let min_gaps = if plan.n_qubits() <= GAP_SCAN_CAP {
        gap_scan(plan, 9, None)?.per_step_min
    } else {
        Vec::new()
    };
    Ok(VerificationReport {
        n_qubits: plan.n_qubits(),
        fidelity,
        leakage: induced.leakage,
        norm_drift: induced.norm_drift,
        min_gaps,
    })
}

/// Convenience pipeline: parse → compile → emit → verify.
pub fn verify_circuit(
    text: &str,
    delta: f64,
    schedule: Schedule,
    opts: &IntegratorOptions,
) -> Result<(CircuitIR, ClusterLayout, VerificationReport)> {
    let ir = parse_circuit(text)?;
    let layout = compile_layout(&ir)?;
    let (plan, in_frame, out_frame) = emit_plan(&layout, delta, schedule)?;
    let target = verification_target(&ir, &layout)?;
    let report = verify_plan(&plan, &in_frame, &out_frame, &target, opts)?;
    Ok((ir, layout, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::ScheduleShape;

    fn sched(t: f64) -> Schedule {
        Schedule::new(ScheduleShape::Linear, t).unwrap()
    }

    fn fast_opts() -> IntegratorOptions {
        IntegratorOptions {
            min_substeps: 500,
            ..Default::default()
        }
    }

    #[test]
    fn parse_examples() {
        let ir = parse_circuit("prepx q0\nh q0\n").unwrap();
        assert_eq!(ir.m, 1);
        assert_eq!(ir.gates.len(), 1);
        assert!(ir.prepared[0]);

        let ir = parse_circuit("prepx q0\nprepx q1\nczh q0 q1\n").unwrap();
        assert_eq!(ir.m, 2);
        assert_eq!(ir.gates, vec![Gate::CzBlock { a: 0, b: 1 }]);

        let err = parse_circuit("qubits 2\nh q5\n");
        assert!(matches!(err, Err(Error::ParseError { line: 2, .. })));

        assert!(parse_circuit("flip q0\n").is_err());
        assert!(parse_circuit("hrot abc q0\n").is_err());
        assert!(parse_circuit("czh q0 q0\n").is_err());

        // Comments and blank lines are fine.
        let ir = parse_circuit("# a comment\n\nh q0 # trailing\n").unwrap();
        assert_eq!(ir.gates.len(), 1);
    }

    #[test]
    fn two_hadamards_compile_to_a_three_site_chain() {
        let ir = parse_circuit("h q0\nh q0\n").unwrap();
        let layout = compile_layout(&ir).unwrap();
        assert_eq!(layout.n_qubits, 3);
        assert_eq!(layout.wires[0].angles, vec![0.0, 0.0, 0.0]);
        assert_eq!(layout.wires[0].input_hadamard_parity, 0);
        assert_eq!(
            layout.turn_on_order,
            vec![vec![1], vec![2]],
        );
    }

    #[test]
    fn hrot_after_h_places_the_angle_on_site_two() {
        let theta = 0.7;
        let ir = parse_circuit(&format!("h q0\nhrot {theta} q0\n")).unwrap();
        let layout = compile_layout(&ir).unwrap();
        assert_eq!(layout.n_qubits, 3);
        assert_eq!(layout.wires[0].angles, vec![0.0, theta, 0.0]);
    }

    #[test]
    fn leading_hrot_gets_a_pad_pair() {
        let ir = parse_circuit("hrot 0.5 q0\n").unwrap();
        let layout = compile_layout(&ir).unwrap();
        assert_eq!(layout.wires[0].angles, vec![0.0, 0.0, 0.5, 0.0]);
        assert_eq!(layout.wires[0].input_hadamard_parity, 0);
    }

    #[test]
    fn bare_czh_compiles_to_the_six_qubit_pattern() {
        let ir = parse_circuit("czh q0 q1\n").unwrap();
        let layout = compile_layout(&ir).unwrap();
        assert_eq!(layout.n_qubits, 6);
        assert_eq!(layout.wires[0].len(), 3);
        assert_eq!(layout.wires[1].len(), 3);
        assert_eq!(layout.edges, vec![(2, 5)]);
        assert_eq!(layout.wires[0].input_hadamard_parity, 1);
        assert_eq!(layout.wires[1].input_hadamard_parity, 1);
        // One simultaneous four-field step.
        assert_eq!(layout.turn_on_order, vec![vec![1, 4, 2, 5]]);
    }

    #[test]
    fn qubit_count_is_the_sum_of_wire_lengths() {
        let ir = parse_circuit("h q0\nhrot 0.785 q1\nczh q0 q1\n").unwrap();
        let layout = compile_layout(&ir).unwrap();
        let total: usize = layout.wires.iter().map(|w| w.len()).sum();
        assert_eq!(layout.n_qubits, total);
        assert_eq!(layout.n_qubits, 3 + 5);
    }

    #[test]
    fn layout_bytes_are_deterministic() {
        let text = "h q0\nhrot 0.785 q1\nczh q0 q1\nh q1\n";
        let a = serde_json::to_string(&compile_layout(&parse_circuit(text).unwrap()).unwrap())
            .unwrap();
        let b = serde_json::to_string(&compile_layout(&parse_circuit(text).unwrap()).unwrap())
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn emit_plan_structures() {
        // Prepared 3-site wire: prep-chain plan with the two-off step.
        let ir = parse_circuit("prepx q0\nh q0\nh q0\n").unwrap();
        let layout = compile_layout(&ir).unwrap();
        let (plan, in_frame, _) = emit_plan(&layout, 1.0, sched(50.0)).unwrap();
        assert_eq!(plan.steps().len(), 2);
        assert_eq!(plan.steps()[1].turn_off.len(), 2);
        assert_eq!(in_frame.n_logical_qubits(), 0);

        // Unprepared wire: the degenerate-code plan.
        let ir = parse_circuit("h q0\nh q0\n").unwrap();
        let layout = compile_layout(&ir).unwrap();
        let (plan, in_frame, out_frame) = emit_plan(&layout, 1.0, sched(50.0)).unwrap();
        assert_eq!(plan.steps().len(), 2);
        assert_eq!(plan.steps()[0].turn_off.len(), 1);
        assert_eq!(in_frame.n_logical_qubits(), 1);
        assert_eq!(out_frame.n_logical_qubits(), 1);

        // The czh layout contains the simultaneous four-field step.
        let ir = parse_circuit("czh q0 q1\n").unwrap();
        let layout = compile_layout(&ir).unwrap();
        let (plan, _, _) = emit_plan(&layout, 1.0, sched(50.0)).unwrap();
        assert_eq!(plan.steps().len(), 1);
        assert_eq!(plan.steps()[0].turn_on.len(), 4);
        assert_eq!(plan.steps()[0].turn_off.len(), 4);
    }

    #[test]
    fn predicted_unitary_examples() {
        let h = predicted_unitary(&parse_circuit("h q0\n").unwrap()).unwrap();
        let expect = gates::embed_single(&gates::hadamard(), 1, 0);
        assert!((h - expect).norm() < 1e-14);

        let czh = predicted_unitary(&parse_circuit("czh q0 q1\n").unwrap()).unwrap();
        assert!((czh - gates::czh_element()).norm() < 1e-14);

        let theta = std::f64::consts::FRAC_PI_4;
        let hrot =
            predicted_unitary(&parse_circuit(&format!("hrot {theta} q0\n")).unwrap()).unwrap();
        let expect = gates::embed_single(&(gates::hadamard() * gates::u_z(theta)), 1, 0);
        assert!((hrot - expect).norm() < 1e-14);

        let big = parse_circuit("qubits 4\nh q3\n").unwrap();
        assert!(predicted_unitary(&big).is_err());
    }

    #[test]
    fn identity_circuit_verifies() {
        let (_, layout, report) =
            verify_circuit("h q0\nh q0\n", 1.0, sched(50.0), &fast_opts()).unwrap();
        assert_eq!(layout.n_qubits, 3);
        assert!(report.fidelity >= 0.999, "fidelity {}", report.fidelity);
        assert!(!report.min_gaps.is_empty());
    }

    #[test]
    fn bare_czh_verifies_with_parity_wrapping() {
        let (ir, layout, report) = verify_circuit("czh q0 q1\n", 1.0, sched(50.0), &fast_opts())
            .unwrap();
        assert!(report.fidelity >= 0.999, "fidelity {}", report.fidelity);
        // With both parities recorded, the target is (H⊗H)CZ(H⊗H).
        let target = verification_target(&ir, &layout).unwrap();
        assert!((target - gates::h2_block_gate()).norm() < 1e-12);
    }

    #[test]
    fn prepared_single_wire_verifies_as_a_state() {
        let (_, _, report) =
            verify_circuit("prepx q0\nh q0\n", 1.0, sched(50.0), &fast_opts()).unwrap();
        assert!(report.fidelity >= 0.999, "fidelity {}", report.fidelity);
    }

    #[test]
    fn wrong_oracle_is_rejected() {
        let text = "h q0\nh q0\nh q0\n"; // net H
        let ir = parse_circuit(text).unwrap();
        let layout = compile_layout(&ir).unwrap();
        let (plan, in_frame, out_frame) = emit_plan(&layout, 1.0, sched(50.0)).unwrap();
        let wrong = DMatrix::from_fn(2, 2, |r, c| gates::pauli_x()[(r, c)]);
        let report = verify_plan(&plan, &in_frame, &out_frame, &wrong, &fast_opts()).unwrap();
        assert!(report.fidelity < 0.6, "fidelity {}", report.fidelity);
    }
}
