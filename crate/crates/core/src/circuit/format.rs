//! Line-oriented circuit files.
//!
//! Raw files hold one gate per line: `KIND t0 [t1 ...] ID [params...]`.
//! Optimized files are a sequence of records, each a count `k` on its own
//! line followed by `k` lines: either a single `SQS m o1..om i1..im`, a single
//! `CSQS m l1..lm r1..rm`, or the gates of one block. Fused gates are written
//! `Dk t0..t(k-1) re0 im0 re1 im1 ...` without an id. `#` starts a comment in
//! optimized files.

use std::collections::HashSet;
use std::fmt::Write;

use num_complex::Complex64;

use super::error::{ParseError, ParseErrorKind};
use super::gate::{Gate, GateKind, Params};
use super::{Instruction, LayoutParams, OptimizedCircuit, RawCircuit};

fn number<T: std::str::FromStr>(token: &str, line: usize) -> Result<T, ParseError> {
    token.parse().map_err(|_| ParseError::new(line, ParseErrorKind::InvalidNumber(token.to_string())))
}

fn parse_gate_line(tokens: &[&str], line: usize, num_qubits: usize) -> Result<Gate, ParseError> {
    let kind = GateKind::from_symbol(tokens[0])
        .ok_or_else(|| ParseError::new(line, ParseErrorKind::UnknownGate(tokens[0].to_string())))?;
    let arity = kind.arity();
    let rest = &tokens[1..];
    let token_count = |expected: String| {
        ParseError::new(line, ParseErrorKind::TokenCount { kind: kind.to_string(), expected, found: tokens.len() })
    };

    let fused = matches!(kind, GateKind::D(_));
    let fixed = arity + usize::from(!fused);
    if rest.len() < fixed {
        return Err(token_count(format!("at least {}", fixed + 1)));
    }

    let mut targets = Vec::with_capacity(arity);
    for tok in &rest[..arity] {
        let q: usize = number(tok, line)?;
        if q >= num_qubits {
            return Err(ParseError::new(line, ParseErrorKind::QubitOutOfRange { qubit: q, limit: num_qubits }));
        }
        if targets.contains(&q) {
            return Err(ParseError::new(line, ParseErrorKind::RepeatedTarget(q)));
        }
        targets.push(q);
    }

    if fused {
        let values = &rest[arity..];
        let expected = 2 << arity;
        if values.len() != expected {
            return Err(token_count(format!("{}", 1 + arity + expected)));
        }
        let mut entries = Vec::with_capacity(expected / 2);
        for pair in values.chunks(2) {
            entries.push(Complex64::new(number(pair[0], line)?, number(pair[1], line)?));
        }
        return Ok(Gate::fused(targets, entries));
    }

    let id: usize = number(rest[arity], line)?;
    let params = &rest[arity + 1..];
    let angles = kind.angle_count();
    if !(params.is_empty() || params.len() == angles) {
        let expected =
            if angles == 0 { format!("{}", 2 + arity) } else { format!("{} or {}", 2 + arity, 2 + arity + angles) };
        return Err(token_count(expected));
    }
    let angles = params.iter().map(|t| number::<f64>(t, line)).collect::<Result<Vec<_>, _>>()?;
    Ok(Gate::with_angles(kind, targets, id, angles))
}

fn write_gate(out: &mut String, gate: &Gate) {
    out.push_str(&gate.kind.to_string());
    for q in &gate.targets {
        let _ = write!(out, " {q}");
    }
    match &gate.params {
        Params::Diagonal(d) => {
            for z in d {
                let _ = write!(out, " {} {}", z.re, z.im);
            }
        }
        Params::Angles(a) => {
            let _ = write!(out, " {}", gate.id);
            for x in a {
                let _ = write!(out, " {x}");
            }
        }
    }
    out.push('\n');
}

/// Parses a raw circuit on `num_qubits` qubits.
pub fn parse_raw(text: &str, num_qubits: usize) -> Result<RawCircuit, ParseError> {
    let mut circuit = RawCircuit::new(num_qubits);
    let mut seen = HashSet::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens: Vec<&str> = raw_line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let gate = parse_gate_line(&tokens, line, num_qubits)?;
        if gate.is_fused() {
            return Err(ParseError::new(line, ParseErrorKind::FusedInRaw));
        }
        if !seen.insert(gate.id) {
            return Err(ParseError::new(line, ParseErrorKind::DuplicateId(gate.id)));
        }
        let expected = circuit.gates.len();
        if gate.id != expected {
            return Err(ParseError::new(line, ParseErrorKind::IdOutOfSequence { expected, found: gate.id }));
        }
        circuit.gates.push(gate);
    }
    Ok(circuit)
}

pub fn serialize_raw(circuit: &RawCircuit) -> String {
    let mut out = String::new();
    for g in &circuit.gates {
        write_gate(&mut out, g);
    }
    out
}

fn parse_swap(tokens: &[&str], line: usize, layout: &LayoutParams) -> Result<Instruction, ParseError> {
    let op: &'static str = if tokens[0] == "SQS" { "SQS" } else { "CSQS" };
    let invalid = |reason: String| ParseError::new(line, ParseErrorKind::InvalidSwap { op, reason });
    if tokens.len() < 2 {
        return Err(ParseError::new(line, ParseErrorKind::SwapArity { op, expected: 2, found: tokens.len() }));
    }
    let m: usize = number(tokens[1], line)?;
    let expected = 2 + 2 * m;
    if tokens.len() != expected {
        return Err(ParseError::new(line, ParseErrorKind::SwapArity { op, expected, found: tokens.len() }));
    }
    let values = tokens[2..].iter().map(|t| number::<usize>(t, line)).collect::<Result<Vec<_>, _>>()?;
    let (first, second) = values.split_at(m);
    let mut all: Vec<usize> = values.clone();
    all.sort_unstable();
    all.dedup();
    if all.len() != values.len() {
        return Err(invalid("operand sets must be distinct and disjoint".into()));
    }
    let local = layout.local_qubits();
    if op == "SQS" {
        if let Some(q) = values.iter().find(|&&q| q >= local) {
            return Err(invalid(format!("bit {q} is not below N - R = {local}")));
        }
        Ok(Instruction::InMemSwap { out_set: first.to_vec(), in_set: second.to_vec() })
    } else {
        if let Some(q) = first.iter().find(|&&q| q >= local || q < local.saturating_sub(m)) {
            return Err(invalid(format!("local bit {q} is not among the top {m} local bits")));
        }
        if let Some(q) = second.iter().find(|&&q| q < local || q >= layout.total_qubits) {
            return Err(invalid(format!("bit {q} is not a rank bit")));
        }
        Ok(Instruction::CrossRankSwap { local_set: first.to_vec(), rank_set: second.to_vec() })
    }
}

/// Parses an optimized circuit for `layout`.
pub fn parse_optimized(text: &str, layout: &LayoutParams) -> Result<OptimizedCircuit, ParseError> {
    let mut lines = text.lines().enumerate().filter_map(|(idx, l)| {
        let content = l.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        (!tokens.is_empty()).then_some((idx + 1, tokens))
    });
    let local = layout.local_qubits();
    let mut instructions = Vec::new();
    while let Some((line, tokens)) = lines.next() {
        if tokens.len() != 1 {
            return Err(ParseError::new(line, ParseErrorKind::ExpectedCount(tokens.join(" "))));
        }
        let count: usize = tokens[0]
            .parse()
            .map_err(|_| ParseError::new(line, ParseErrorKind::ExpectedCount(tokens[0].to_string())))?;
        let mut body = Vec::with_capacity(count);
        for found in 0..count {
            match lines.next() {
                Some(entry) => body.push(entry),
                None => return Err(ParseError::new(line, ParseErrorKind::CountMismatch { expected: count, found })),
            }
        }
        let is_swap = |t: &[&str]| matches!(t.first(), Some(&"SQS") | Some(&"CSQS"));
        if body.iter().any(|(_, t)| is_swap(t)) {
            if count != 1 {
                return Err(ParseError::new(line, ParseErrorKind::SwapNotAlone(count)));
            }
            let (l, t) = &body[0];
            instructions.push(parse_swap(t, *l, layout)?);
            continue;
        }
        let mut gates = Vec::with_capacity(count);
        for (l, t) in &body {
            let gate = parse_gate_line(t, *l, local)?;
            if count > 1 {
                if let Some(&q) = gate.targets.iter().find(|&&q| q >= layout.chunk_qubits) {
                    return Err(ParseError::new(
                        *l,
                        ParseErrorKind::OutsideChunk { qubit: q, chunk: layout.chunk_qubits },
                    ));
                }
            }
            if gate.is_fused() {
                gate.matrix().map_err(|e| ParseError::new(*l, ParseErrorKind::Gate(e)))?;
            }
            gates.push(gate);
        }
        instructions.push(Instruction::GateBlock(gates));
    }
    Ok(OptimizedCircuit::new(*layout, instructions))
}

pub fn serialize_optimized(circuit: &OptimizedCircuit) -> String {
    let mut out = String::new();
    let write_set = |out: &mut String, op: &str, a: &[usize], b: &[usize]| {
        let _ = write!(out, "1\n{op} {}", a.len());
        for q in a.iter().chain(b) {
            let _ = write!(out, " {q}");
        }
        out.push('\n');
    };
    for inst in &circuit.instructions {
        match inst {
            Instruction::GateBlock(gates) => {
                let _ = writeln!(out, "{}", gates.len());
                for g in gates {
                    write_gate(&mut out, g);
                }
            }
            Instruction::InMemSwap { out_set, in_set } => write_set(&mut out, "SQS", out_set, in_set),
            Instruction::CrossRankSwap { local_set, rank_set } => write_set(&mut out, "CSQS", local_set, rank_set),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::DEFAULT_ANGLE;

    #[test]
    fn parses_simple_lines() {
        let c = parse_raw("H 0 0\nRZZ 2 4 1\n", 10).unwrap();
        assert_eq!(c.gates[0], Gate::new(GateKind::H, vec![0], 0));
        assert_eq!(c.gates[1].kind, GateKind::RZZ);
        assert_eq!(c.gates[1].targets, vec![2, 4]);
        assert_eq!(c.gates[1].angle(0), DEFAULT_ANGLE);
    }

    #[test]
    fn out_of_range_qubit() {
        let err = parse_raw("H 99 0", 10).unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.to_string().contains("qubit index out of range"));
    }

    #[test]
    fn raw_errors_name_the_line() {
        let err = parse_raw("H 0 0\nT 1 1", 4).unwrap_err();
        assert_eq!(err, ParseError::new(2, ParseErrorKind::UnknownGate("T".into())));
        let err = parse_raw("H 0 0\nCX 1 1", 4).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(err.kind, ParseErrorKind::TokenCount { .. }));
        let err = parse_raw("H 0 0\nH 1 0", 4).unwrap_err();
        assert_eq!(err, ParseError::new(2, ParseErrorKind::DuplicateId(0)));
        let err = parse_raw("U 0 0 1.0", 4).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::TokenCount { .. }));
        let err = parse_raw("CX 1 1 0", 4).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::RepeatedTarget(1));
        let err = parse_raw("H 0 x", 4).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::InvalidNumber("x".into()));
    }

    #[test]
    fn serializes_and_round_trips() {
        assert_eq!(serialize_raw(&RawCircuit::new(3)), "");
        let text = "H 0 0\nU 1 1 0.5 -1.25 3\nCP 0 2 2 0.1\nRZZ 2 1 3\n";
        let c = parse_raw(text, 3).unwrap();
        assert_eq!(serialize_raw(&c), text);
    }

    #[test]
    fn parses_swap_records() {
        let layout = LayoutParams::new(10, 2, 4);
        let c = parse_optimized("1\nSQS 1 3 5", &layout).unwrap();
        assert_eq!(c.instructions, vec![Instruction::InMemSwap { out_set: vec![3], in_set: vec![5] }]);
        let c = parse_optimized("1\nCSQS 2 6 7 8 9", &layout).unwrap();
        assert_eq!(c.instructions, vec![Instruction::CrossRankSwap { local_set: vec![6, 7], rank_set: vec![8, 9] }]);
        assert_eq!(c.final_permutation.phys_to_log(), &[0, 1, 2, 3, 4, 5, 8, 9, 6, 7]);
    }

    #[test]
    fn parses_gate_block_with_comments() {
        let layout = LayoutParams::new(10, 2, 4);
        let c = parse_optimized("2 # Gate Block Size\nH 0 0\nH 1 1\n", &layout).unwrap();
        assert_eq!(
            c.instructions,
            vec![Instruction::GateBlock(vec![Gate::new(GateKind::H, vec![0], 0), Gate::new(GateKind::H, vec![1], 1)])]
        );
    }

    #[test]
    fn optimized_errors() {
        let layout = LayoutParams::new(10, 2, 4);
        let err = parse_optimized("3\nH 0 0\nH 1 1", &layout).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::CountMismatch { expected: 3, found: 2 }));
        let err = parse_optimized("1\nSQS 2 0 1 4", &layout).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::SwapArity { expected: 6, found: 5, .. }));
        let err = parse_optimized("2\nH 0 0\nH 5 1", &layout).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(matches!(err.kind, ParseErrorKind::OutsideChunk { qubit: 5, chunk: 4 }));
        let err = parse_optimized("1\nCSQS 1 5 8", &layout).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::InvalidSwap { .. }));
        let err = parse_optimized("1\nSQS 1 3 3", &layout).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::InvalidSwap { .. }));
        let err = parse_optimized("1\nH 8 0", &layout).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::QubitOutOfRange { qubit: 8, limit: 8 }));
    }

    #[test]
    fn single_gate_block_may_leave_the_chunk() {
        let layout = LayoutParams::new(10, 2, 4);
        let c = parse_optimized("1\nH 6 0", &layout).unwrap();
        assert_eq!(c.block_count(), 1);
    }

    #[test]
    fn fused_gate_round_trip() {
        let layout = LayoutParams::new(4, 0, 4);
        let entries: Vec<Complex64> = (0..4).map(|i| Complex64::cis(0.1 * i as f64)).collect();
        let circuit = OptimizedCircuit::new(
            layout,
            vec![Instruction::GateBlock(vec![Gate::fused(vec![0, 2], entries), Gate::new(GateKind::H, vec![1], 3)])],
        );
        let text = serialize_optimized(&circuit);
        assert!(text.starts_with("2\nD2 0 2 1 0 "));
        assert_eq!(parse_optimized(&text, &layout).unwrap(), circuit);
    }
}
