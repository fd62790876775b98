//! Python bindings: `klsep._native`.
//!
//! Elements cross the boundary as letter words ("e", "stu", ...), Laurent
//! polynomials and Hecke expansions as display strings, and reports as
//! plain dicts, so the Python side needs no wrapper types of its own.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use klsep_core::bott_samelson::{bb_cell_dim, fiber_fixed_points, subword_product, Word};
use klsep_core::coxeter::{build_group, CoxeterSpec, Elt, GroupTable, Side};
use klsep_core::hecke::{kl_basis, kl_product_support, KlTable};
use klsep_core::separation::{compute_fw, propagate, sigma_report, CharStatus, FwTable};
use klsep_core::torsion::{cokernel_torsion, euler_class_d4, mult_matrix, smith_normal_form};
use klsep_core::wgraph::{build_wgraph, WGraph};

fn value_err(msg: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(msg.to_string())
}

fn parse_side(side: &str) -> PyResult<Side> {
    match side {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(value_err(format!("side must be 'left' or 'right', got {:?}", other))),
    }
}

/// A fully enumerated finite Coxeter group.
#[pyclass(frozen)]
struct Group {
    g: Arc<GroupTable>,
}

impl Group {
    fn elt(&self, word: &str) -> PyResult<Elt> {
        self.g.parse_letters(word).map_err(value_err)
    }
}

#[pymethods]
impl Group {
    #[new]
    #[pyo3(signature = (family, rank=None, m=None))]
    fn new(family: &str, rank: Option<usize>, m: Option<usize>) -> PyResult<Self> {
        let spec = match family.to_uppercase().as_str() {
            "A" => CoxeterSpec::a(rank.ok_or_else(|| value_err("rank required"))?),
            "B" => CoxeterSpec::b(rank.ok_or_else(|| value_err("rank required"))?),
            "D" => CoxeterSpec::d(rank.ok_or_else(|| value_err("rank required"))?),
            "F4" => CoxeterSpec::f4(),
            "G2" => CoxeterSpec::g2(),
            "I2" => CoxeterSpec::i2(m.ok_or_else(|| value_err("m required for I2"))?),
            other => return Err(value_err(format!("unknown family {:?}", other))),
        };
        let g = build_group(spec).map_err(value_err)?;
        Ok(Group { g: Arc::new(g) })
    }

    #[getter]
    fn spec(&self) -> String {
        self.g.spec.to_string()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.g.n
    }

    #[getter]
    fn order(&self) -> usize {
        self.g.size()
    }

    /// All elements as ShortLex letter words, in (length, lex) order.
    fn elements(&self) -> Vec<String> {
        self.g.elements().map(|x| self.g.letters(x)).collect()
    }

    fn length(&self, word: &str) -> PyResult<usize> {
        Ok(self.g.length(self.elt(word)?))
    }

    fn product(&self, x: &str, y: &str) -> PyResult<String> {
        Ok(self.g.letters(self.g.mult(self.elt(x)?, self.elt(y)?)))
    }

    fn inverse(&self, x: &str) -> PyResult<String> {
        Ok(self.g.letters(self.g.inverse(self.elt(x)?)))
    }

    fn descents(&self, x: &str, side: &str) -> PyResult<String> {
        let side = parse_side(side)?;
        let x = self.elt(x)?;
        Ok(self
            .g
            .descents(x, side)
            .iter()
            .map(|&i| self.g.spec.letter(i))
            .collect())
    }

    fn bruhat_leq(&self, x: &str, w: &str) -> PyResult<bool> {
        Ok(self.g.bruhat_leq(self.elt(x)?, self.elt(w)?))
    }

    fn longest(&self) -> String {
        self.g.letters(self.g.longest())
    }

    /// One-line notation (type A only).
    fn one_line(&self, x: &str) -> PyResult<Vec<u8>> {
        self.g.one_line(self.elt(x)?).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("Group({}, order={})", self.g.spec, self.g.size())
    }
}

/// The KL basis, W-graph and separated-element pass of one group.
#[pyclass(frozen)]
struct Basis {
    g: Arc<GroupTable>,
    t: KlTable,
    wg: WGraph,
    f: FwTable,
}

#[pymethods]
impl Basis {
    #[new]
    fn new(group: &Group) -> Self {
        let g = Arc::clone(&group.g);
        let t = kl_basis(&g);
        let wg = build_wgraph(&g, &t);
        let f = compute_fw(&g, &wg);
        Basis { g, t, wg, f }
    }

    /// `h_w` rendered against the standard basis, e.g. "H_s + v^-1 H_e".
    fn h(&self, w: &str) -> PyResult<String> {
        let w = self.g.parse_letters(w).map_err(value_err)?;
        let mut entries: Vec<(Elt, klsep_core::LaurentPoly)> = self.t.row(w).iter().collect();
        entries.sort_by_key(|&(x, _)| std::cmp::Reverse((self.g.length(x), x)));
        let parts: Vec<String> = entries
            .iter()
            .map(|(x, p)| {
                let name = format!("H_{}", self.g.letters(*x));
                if p.coeff(0) == 1 && p.min_exp() == Some(0) && p.max_exp() == Some(0) {
                    name
                } else if p.iter().count() == 1 && p.coeff(p.min_exp().unwrap()) == 1 {
                    format!("v^{} {}", p.min_exp().unwrap(), name)
                } else {
                    format!("({}) {}", p, name)
                }
            })
            .collect();
        Ok(parts.join(" + "))
    }

    /// The KL polynomial coefficient row {x: "h_{x,w}"}.
    fn row(&self, w: &str) -> PyResult<BTreeMap<String, String>> {
        let w = self.g.parse_letters(w).map_err(value_err)?;
        Ok(self
            .t
            .row(w)
            .iter()
            .map(|(x, p)| (self.g.letters(x), p.to_string()))
            .collect())
    }

    fn mu(&self, x: &str, w: &str) -> PyResult<i64> {
        let x = self.g.parse_letters(x).map_err(value_err)?;
        let w = self.g.parse_letters(w).map_err(value_err)?;
        Ok(self.t.mu(x, w))
    }

    /// KL-support of `h_s h_w` (left) or `h_w h_s` (right).
    fn product_support(&self, w: &str, s: &str, side: &str) -> PyResult<Vec<String>> {
        let w = self.g.parse_letters(w).map_err(value_err)?;
        let s = self
            .g
            .spec
            .letter_index(s.chars().next().unwrap_or(' '))
            .ok_or_else(|| value_err("unknown generator letter"))?;
        let side = parse_side(side)?;
        Ok(kl_product_support(&self.g, &self.t, w, s, side)
            .into_iter()
            .map(|x| self.g.letters(x))
            .collect())
    }

    /// `f(x)` as a list of words, or None where f is undefined.
    fn f(&self, x: &str) -> PyResult<Option<Vec<String>>> {
        let x = self.g.parse_letters(x).map_err(value_err)?;
        Ok(self
            .f
            .defined_set(x)
            .map(|set| set.iter().map(|&y| self.g.letters(y)).collect()))
    }

    fn is_separated(&self, x: &str) -> PyResult<bool> {
        let x = self.g.parse_letters(x).map_err(value_err)?;
        Ok(self.f.is_separated(x))
    }

    /// The SIGMA1 report as a dict.
    fn sigma_report<'py>(&self, py: Python<'py>, include_fw: bool) -> PyResult<Bound<'py, PyDict>> {
        let report = sigma_report(&self.g, &self.f, include_fw);
        let d = PyDict::new_bound(py);
        d.set_item("format", &report.format)?;
        d.set_item("spec", self.g.spec.to_string())?;
        d.set_item("order", report.order)?;
        d.set_item("undefined", &report.undefined)?;
        d.set_item("nonSeparated", &report.non_separated)?;
        d.set_item("sigmaSize", report.sigma_size)?;
        if let Some(fw) = &report.fw {
            d.set_item("fw", fw.clone())?;
        }
        Ok(d)
    }

    /// Spread character marks; assumptions map words to "eq"/"neq".
    /// Returns the non-separated elements' final marks.
    fn propagate(
        &self,
        assumptions: BTreeMap<String, String>,
    ) -> PyResult<BTreeMap<String, String>> {
        let mut assume = BTreeMap::new();
        for (word, status) in assumptions {
            let x = self.g.parse_letters(&word).map_err(value_err)?;
            let st = match status.as_str() {
                "eq" => CharStatus::CharEq,
                "neq" => CharStatus::CharNeq,
                other => return Err(value_err(format!("unknown status {:?}", other))),
            };
            assume.insert(x, st);
        }
        let marks = propagate(&self.g, &self.wg, &self.f, &assume).map_err(value_err)?;
        Ok(self
            .g
            .elements()
            .filter(|&x| !self.f.is_separated(x))
            .map(|x| {
                let st = match marks[x as usize] {
                    CharStatus::CharEq => "eq",
                    CharStatus::CharNeq => "neq",
                    CharStatus::Unknown => "unknown",
                };
                (self.g.letters(x), st.to_string())
            })
            .collect())
    }

    /// W-graph edges as (x, y, mu) word triples.
    fn wgraph_edges(&self) -> Vec<(String, String, i32)> {
        self.wg
            .edges
            .iter()
            .map(|&(x, y, mu)| (self.g.letters(x), self.g.letters(y), mu))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Basis({})", self.g.spec)
    }
}

/// Torus-fixed points of a Bott-Samelson fiber with cell dimensions:
/// a list of {"mask", "totalDim", "fiberDim", "product"} dicts.
#[pyfunction]
fn fiber<'py>(
    py: Python<'py>,
    group: &Group,
    word: &str,
    base: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let g = &group.g;
    let letters: Result<Vec<usize>, char> = word
        .chars()
        .map(|c| g.spec.letter_index(c).ok_or(c))
        .collect();
    let w = Word(letters.map_err(|c| value_err(format!("unknown letter {:?}", c)))?);
    let y = g.parse_letters(base).map_err(value_err)?;
    let fixed = fiber_fixed_points(g, &w, y).map_err(value_err)?;
    fixed
        .iter()
        .map(|&eps| {
            let (total, fib) = bb_cell_dim(g, &w, eps);
            let d = PyDict::new_bound(py);
            d.set_item("mask", eps.to_bit_string())?;
            d.set_item("totalDim", total)?;
            d.set_item("fiberDim", fib)?;
            d.set_item("product", g.letters(subword_product(g, &w, eps)))?;
            Ok(d)
        })
        .collect()
}

/// The full rank-4 fork-group torsion certificate as a dict.
#[pyfunction]
fn torsion_d4(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let g = build_group(CoxeterSpec::d(4)).map_err(value_err)?;
    let (_, class) = euler_class_d4(&g).map_err(value_err)?;
    let m = mult_matrix(&class, 1).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let s = smith_normal_form(&m);
    let d = PyDict::new_bound(py);
    d.set_item("eulerClass", class.to_string())?;
    let rows: Vec<Vec<i64>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| m.get(i, j)).collect())
        .collect();
    d.set_item("matrix", rows)?;
    d.set_item("det", m.det())?;
    d.set_item("smithInvariants", &s.invariants)?;
    d.set_item("torsionPrimes", cokernel_torsion(&s.invariants))?;
    Ok(d)
}

#[pymodule]
fn _native(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_class::<Basis>()?;
    m.add_function(wrap_pyfunction!(fiber, m)?)?;
    m.add_function(wrap_pyfunction!(torsion_d4, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
