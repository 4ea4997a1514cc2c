//! Graphviz output for the matrix graph, its condensation and the critical graph.

use std::fmt::Write;

use crate::algebra::{Matrix, Semiring, Tolerance};
use crate::error::{Error, Result};
use crate::graphs::{digraph_of, Digraph};
use crate::report::round_sig;
use crate::spectral::{critical_graph, spectral_classes, CriticalGraph};

fn header(out: &mut String, name: &str) {
    writeln!(out, "digraph {name} {{").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
}

/// `digraph_of(A)` with edge weights.
pub fn matrix_dot(name: &str, a: &Matrix, tol: &Tolerance) -> String {
    let g = digraph_of(a, tol);
    let mut out = String::new();
    header(&mut out, name);
    for i in 0..g.node_count() {
        writeln!(out, "  {i};").unwrap();
    }
    for (i, j) in g.edges() {
        writeln!(out, "  {i} -> {j} [label=\"{}\"];", round_sig(a.get(i, j))).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Unweighted digraph.
pub fn digraph_dot(name: &str, g: &Digraph) -> String {
    let mut out = String::new();
    header(&mut out, name);
    for i in 0..g.node_count() {
        writeln!(out, "  {i};").unwrap();
    }
    for (i, j) in g.edges() {
        writeln!(out, "  {i} -> {j};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Reduced graph of the Frobenius classes; spectral classes are drawn doubled.
pub fn condensation_dot(name: &str, a: &Matrix, sr: Semiring, tol: &Tolerance) -> String {
    let (fnf, classes) = spectral_classes(a, tol);
    let mut out = String::new();
    header(&mut out, name);
    out.push_str("  node [shape=box];\n");
    for c in &classes {
        let nodes: Vec<String> = c.nodes.iter().map(|v| v.to_string()).collect();
        let shape = if c.is_spectral(sr) { ", peripheries=2" } else { "" };
        writeln!(
            out,
            "  c{} [label=\"{{{}}}\\nρ={}\"{shape}];",
            c.class_id,
            nodes.join(","),
            round_sig(c.rho(sr))
        )
        .unwrap();
    }
    for &(mu, nu) in &fnf.reduced_edges {
        writeln!(out, "  c{mu} -> c{nu};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Critical nodes and edges, one cluster per component.
pub fn critical_dot(name: &str, cg: &CriticalGraph) -> String {
    let mut out = String::new();
    header(&mut out, name);
    writeln!(out, "  label=\"λ={}\";", round_sig(cg.lambda)).unwrap();
    for (k, comp) in cg.components.iter().enumerate() {
        writeln!(out, "  subgraph cluster_{k} {{").unwrap();
        writeln!(out, "    label=\"σ={}\";", comp.cyclic.sigma).unwrap();
        for v in &comp.nodes {
            writeln!(out, "    {v};").unwrap();
        }
        out.push_str("  }\n");
    }
    for (i, j) in &cg.edges {
        writeln!(out, "  {i} -> {j};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Matrix graph, condensation and (max-times, non-nilpotent) critical graph.
pub fn analysis_dot(a: &Matrix, sr: Semiring, tol: &Tolerance) -> Result<String> {
    let mut out = matrix_dot("matrix", a, tol);
    out.push_str(&condensation_dot("condensation", a, sr, tol));
    if sr != Semiring::PlusTimes {
        match critical_graph(a, tol) {
            Ok(cg) => out.push_str(&critical_dot("critical", &cg)),
            Err(Error::NoCriticalGraph) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_output() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0], vec![0.5, 0.0]], Semiring::MaxTimes).unwrap();
        let tol = Tolerance::default();
        let text = analysis_dot(&a, Semiring::MaxTimes, &tol).unwrap();
        assert_eq!(text.matches("digraph ").count(), 3);
        assert!(text.contains("0 -> 1 [label=\"2\"];"));
        assert!(text.contains("1 -> 0 [label=\"0.5\"];"));
        assert!(text.contains("label=\"σ=2\";"));
        assert_eq!(text.matches('{').count(), text.matches('}').count());
    }

    #[test]
    fn nilpotent_has_no_critical_graph() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]], Semiring::MaxTimes).unwrap();
        let text = analysis_dot(&a, Semiring::MaxTimes, &Tolerance::default()).unwrap();
        assert_eq!(text.matches("digraph ").count(), 2);
    }
}
