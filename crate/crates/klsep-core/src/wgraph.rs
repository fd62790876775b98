//! The W-graph of a Coxeter system: vertices are group elements labeled with
//! their descent sets, edges are pairs `{x, y}` with `mu(x,y) != 0`, labeled
//! by that value.
//!
//! Together with the multiplication tables this is the only input the
//! separated-element pass needs. The graph can be serialized to a small text
//! format (`WG1`) so the pass can also be run on externally produced graphs.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::coxeter::{CoxeterSpec, Elt, Family, GroupTable, Side};
use crate::hecke::KlTable;

/// A single W-graph vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub word: Vec<u8>,
    pub ldesc: u32,
    pub rdesc: u32,
}

/// Descent-labeled vertices plus mu-labeled edges, stored with the Bruhat
/// orientation `x < y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WGraph {
    pub spec: CoxeterSpec,
    pub vertices: Vec<Vertex>,
    /// `(x, y, mu)` with `x < y` in Bruhat order, ordered by
    /// `(l(y), y, x)`.
    pub edges: Vec<(Elt, Elt, i32)>,
    /// For each y, the `(x, mu)` with `x < y`; derived from `edges`.
    below: Vec<Vec<(Elt, i32)>>,
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum WGraphError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unknown format version: {0}")]
    UnknownVersion(String),
    #[error("edge references unknown vertex: {0}")]
    DanglingVertex(String),
    #[error("edge with non-positive mu: {0}")]
    NonPositiveMu(String),
    #[error("malformed line: {0}")]
    MalformedLine(String),
    #[error("io error: {0}")]
    Io(String),
}

impl WGraph {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn descent_bits(&self, w: Elt, side: Side) -> u32 {
        let v = &self.vertices[w as usize];
        match side {
            Side::Left => v.ldesc,
            Side::Right => v.rdesc,
        }
    }

    pub fn is_descent(&self, w: Elt, s: usize, side: Side) -> bool {
        self.descent_bits(w, side) >> s & 1 == 1
    }

    /// mu-edges from `y` down into the Bruhat order.
    pub fn edges_below(&self, y: Elt) -> &[(Elt, i32)] {
        &self.below[y as usize]
    }

    /// KL-support of `h_s h_w` (Left) or `h_w h_s` (Right) read off the graph:
    /// `{w}` if `s` is a descent of `w`, otherwise `{sw}` plus the lower
    /// mu-neighbors of `w` of which `s` is a descent.
    pub fn product_support(
        &self,
        g: &GroupTable,
        w: Elt,
        s: usize,
        side: Side,
    ) -> Vec<Elt> {
        if self.is_descent(w, s, side) {
            return vec![w];
        }
        let mut out = vec![g.mult_gen(w, s, side)];
        for &(x, _) in self.edges_below(w) {
            if self.is_descent(x, s, side) {
                out.push(x);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Materialize the W-graph from a computed KL table.
pub fn build_wgraph(g: &GroupTable, t: &KlTable) -> WGraph {
    let vertices: Vec<Vertex> = g
        .elements()
        .map(|w| Vertex {
            word: g.word(w).to_vec(),
            ldesc: g.descent_bits(w, Side::Left),
            rdesc: g.descent_bits(w, Side::Right),
        })
        .collect();
    let mut edges = Vec::new();
    for y in g.elements() {
        for &(x, mu) in t.mu_edges_below(y) {
            edges.push((x, y, mu));
        }
    }
    // mu_edges_below is sorted by x and y runs in (length, lex) order, so the
    // required (l(y), y, x) edge order falls out of the loop order.
    let below = split_below(vertices.len(), &edges);
    WGraph { spec: g.spec, vertices, edges, below }
}

fn split_below(size: usize, edges: &[(Elt, Elt, i32)]) -> Vec<Vec<(Elt, i32)>> {
    let mut below = vec![Vec::new(); size];
    for &(x, y, mu) in edges {
        below[y as usize].push((x, mu));
    }
    for b in &mut below {
        b.sort_by_key(|&(x, _)| x);
    }
    below
}

/// Write the graph in the WG1 text format:
///
/// ```text
/// WG1 <family> <rank> [m]
/// V <index> <word> <dL-bits> <dR-bits>
/// E <x> <y> <mu>
/// ```
///
/// Words are letter aliases (`e` for the identity), bitsets decimal.
pub fn write_wg1<W: Write>(wg: &WGraph, out: &mut W) -> Result<(), WGraphError> {
    let io = |e: std::io::Error| WGraphError::Io(e.to_string());
    match wg.spec.family {
        Family::I2 => writeln!(out, "WG1 I2 2 {}", wg.spec.m.unwrap()).map_err(io)?,
        f => writeln!(out, "WG1 {} {}", f, wg.spec.rank).map_err(io)?,
    }
    for (i, v) in wg.vertices.iter().enumerate() {
        let word: String = if v.word.is_empty() {
            "e".into()
        } else {
            v.word.iter().map(|&s| wg.spec.letter(s as usize)).collect()
        };
        writeln!(out, "V {} {} {} {}", i, word, v.ldesc, v.rdesc).map_err(io)?;
    }
    for &(x, y, mu) in &wg.edges {
        writeln!(out, "E {} {} {}", x, y, mu).map_err(io)?;
    }
    Ok(())
}

pub fn read_wg1<R: BufRead>(input: R) -> Result<WGraph, WGraphError> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| WGraphError::MalformedHeader("empty input".into()))?
        .map_err(|e| WGraphError::Io(e.to_string()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    match toks.first() {
        Some(&"WG1") => {}
        Some(v) if v.starts_with("WG") => {
            return Err(WGraphError::UnknownVersion(v.to_string()))
        }
        _ => return Err(WGraphError::MalformedHeader(header.clone())),
    }
    let spec = parse_spec_toks(&toks[1..])
        .ok_or_else(|| WGraphError::MalformedHeader(header.clone()))?;

    let mut vertices: Vec<Vertex> = Vec::new();
    let mut edges: Vec<(Elt, Elt, i32)> = Vec::new();
    for line in lines {
        let line = line.map_err(|e| WGraphError::Io(e.to_string()))?;
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first() {
            Some(&"V") if toks.len() == 5 => {
                let idx: usize = toks[1]
                    .parse()
                    .map_err(|_| WGraphError::MalformedLine(line.clone()))?;
                if idx != vertices.len() {
                    return Err(WGraphError::MalformedLine(format!(
                        "vertex {} out of order",
                        idx
                    )));
                }
                let word = if toks[2] == "e" {
                    Vec::new()
                } else {
                    toks[2]
                        .chars()
                        .map(|ch| spec.letter_index(ch).map(|i| i as u8))
                        .collect::<Option<Vec<u8>>>()
                        .ok_or_else(|| WGraphError::MalformedLine(line.clone()))?
                };
                let ldesc = toks[3]
                    .parse()
                    .map_err(|_| WGraphError::MalformedLine(line.clone()))?;
                let rdesc = toks[4]
                    .parse()
                    .map_err(|_| WGraphError::MalformedLine(line.clone()))?;
                vertices.push(Vertex { word, ldesc, rdesc });
            }
            Some(&"E") if toks.len() == 4 => {
                let x: i64 = toks[1]
                    .parse()
                    .map_err(|_| WGraphError::MalformedLine(line.clone()))?;
                let y: i64 = toks[2]
                    .parse()
                    .map_err(|_| WGraphError::MalformedLine(line.clone()))?;
                let mu: i64 = toks[3]
                    .parse()
                    .map_err(|_| WGraphError::MalformedLine(line.clone()))?;
                if x < 0 || y < 0 || x as usize >= vertices.len() || y as usize >= vertices.len()
                {
                    return Err(WGraphError::DanglingVertex(line.clone()));
                }
                if mu <= 0 {
                    return Err(WGraphError::NonPositiveMu(line.clone()));
                }
                edges.push((x as Elt, y as Elt, mu as i32));
            }
            _ => return Err(WGraphError::MalformedLine(line.clone())),
        }
    }
    let below = split_below(vertices.len(), &edges);
    Ok(WGraph { spec, vertices, edges, below })
}

fn parse_spec_toks(toks: &[&str]) -> Option<CoxeterSpec> {
    let family = match *toks.first()? {
        "A" => Family::A,
        "B" => Family::B,
        "D" => Family::D,
        "F4" => Family::F4,
        "G2" => Family::G2,
        "I2" => Family::I2,
        _ => return None,
    };
    let rank: usize = toks.get(1)?.parse().ok()?;
    let m = match family {
        Family::I2 => Some(toks.get(2)?.parse().ok()?),
        _ => {
            if toks.len() > 2 {
                return None;
            }
            None
        }
    };
    let spec = CoxeterSpec { family, rank, m };
    spec.validate().ok()?;
    Some(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{build_group, CoxeterSpec};
    use crate::hecke::{kl_basis, kl_product_support};

    fn graph(spec: CoxeterSpec) -> (GroupTable, KlTable, WGraph) {
        let g = build_group(spec).unwrap();
        let t = kl_basis(&g);
        let wg = build_wgraph(&g, &t);
        (g, t, wg)
    }

    #[test]
    fn a1_graph() {
        let (_, _, wg) = graph(CoxeterSpec::a(1));
        assert_eq!(wg.size(), 2);
        assert_eq!(wg.edges, vec![(0, 1, 1)]);
    }

    #[test]
    fn a2_edges_are_the_bruhat_covers() {
        let (g, _, wg) = graph(CoxeterSpec::a(2));
        assert_eq!(wg.size(), 6);
        assert_eq!(wg.edges.len(), 8);
        for &(x, y, mu) in &wg.edges {
            assert_eq!(mu, 1);
            assert_eq!(g.length(y), g.length(x) + 1);
            assert!(g.bruhat_leq(x, y));
        }
    }

    #[test]
    fn i2_4_counts() {
        let (_, _, wg) = graph(CoxeterSpec::i2(4));
        assert_eq!(wg.size(), 8);
        // All KL polynomials are 1 in a dihedral group, so the mu-edges are
        // exactly the Bruhat covers: 1*2 + 2*2 + 2*2 + 2*1 between strata.
        assert_eq!(wg.edges.len(), 12);
    }

    #[test]
    fn edge_invariants() {
        let (g, _, wg) = graph(CoxeterSpec::b(3));
        for &(x, y, mu) in &wg.edges {
            assert!(mu >= 1);
            assert!(g.bruhat_leq(x, y) && x != y);
            assert_eq!((g.length(y) - g.length(x)) % 2, 1, "odd length difference");
        }
        for w in g.elements() {
            assert_eq!(wg.descent_bits(w, Side::Left), g.descent_bits(w, Side::Left));
            assert_eq!(wg.descent_bits(w, Side::Right), g.descent_bits(w, Side::Right));
        }
    }

    #[test]
    fn graph_support_matches_kl_table_support() {
        let (g, t, wg) = graph(CoxeterSpec::b(3));
        for w in g.elements() {
            for s in 0..g.n {
                for side in [Side::Left, Side::Right] {
                    assert_eq!(
                        wg.product_support(&g, w, s, side),
                        kl_product_support(&g, &t, w, s, side)
                    );
                }
            }
        }
    }

    #[test]
    fn wg1_round_trip() {
        let (_, _, wg) = graph(CoxeterSpec::b(3));
        let mut buf = Vec::new();
        write_wg1(&wg, &mut buf).unwrap();
        let parsed = read_wg1(&buf[..]).unwrap();
        assert_eq!(parsed, wg);
        // Byte-for-byte stable re-serialization.
        let mut buf2 = Vec::new();
        write_wg1(&parsed, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn wg1_parse_errors_are_distinct() {
        let ok = "WG1 A 1\nV 0 e 0 0\nV 1 s 1 1\nE 0 1 1\n";
        assert!(read_wg1(ok.as_bytes()).is_ok());

        let bad_header = "WGX A 1\n";
        assert!(matches!(
            read_wg1(bad_header.as_bytes()),
            Err(WGraphError::UnknownVersion(_))
        ));
        let no_header = "hello\n";
        assert!(matches!(
            read_wg1(no_header.as_bytes()),
            Err(WGraphError::MalformedHeader(_))
        ));
        let dangling = "WG1 A 1\nV 0 e 0 0\nV 1 s 1 1\nE 0 7 1\n";
        assert!(matches!(
            read_wg1(dangling.as_bytes()),
            Err(WGraphError::DanglingVertex(_))
        ));
        let bad_mu = "WG1 A 1\nV 0 e 0 0\nV 1 s 1 1\nE 0 1 0\n";
        assert!(matches!(
            read_wg1(bad_mu.as_bytes()),
            Err(WGraphError::NonPositiveMu(_))
        ));
        let junk = "WG1 A 1\nV 0 e 0 0\nQ what\n";
        assert!(matches!(
            read_wg1(junk.as_bytes()),
            Err(WGraphError::MalformedLine(_))
        ));
    }
}
