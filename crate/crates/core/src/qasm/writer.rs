use std::fmt::Write;

use crate::circuit::{Circuit, GateKind, ParamExpr};

fn angle(p: &ParamExpr) -> String {
    match p.symbol_name() {
        None => format!("{:?}", p.offset()),
        Some(name) => {
            let mut s = if p.coeff() == 1.0 {
                name.to_string()
            } else {
                format!("{:?}*{name}", p.coeff())
            };
            if p.offset() != 0.0 {
                write!(s, " + {:?}", p.offset()).unwrap();
            }
            s
        }
    }
}

/// Render a circuit in the text format; `parse(&serialize(c)) == c` for every valid `c`.
pub fn serialize(c: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\n");
    if c.name != "circuit" {
        writeln!(out, "//@name {}", c.name).unwrap();
    }
    if let Some(layout) = &c.layout {
        let ids: Vec<String> = layout.iter().map(|p| p.to_string()).collect();
        writeln!(out, "//@layout {}", ids.join(" ")).unwrap();
    }
    writeln!(out, "qreg q[{}];", c.num_qubits).unwrap();
    if c.num_clbits > 0 {
        writeln!(out, "creg c[{}];", c.num_clbits).unwrap();
    }
    for g in &c.gates {
        let qs: Vec<String> = g.qubits.iter().map(|q| format!("q[{q}]")).collect();
        match &g.kind {
            GateKind::Measure => {
                writeln!(out, "measure {} -> c[{}];", qs[0], g.clbit.unwrap_or(0)).unwrap()
            }
            kind => match kind.param() {
                Some(p) => {
                    writeln!(out, "{}({}) {};", kind.name(), angle(p), qs.join(",")).unwrap()
                }
                None => writeln!(out, "{} {};", kind.name(), qs.join(",")).unwrap(),
            },
        }
    }
    out
}
