//! The Hecke algebra in the standard basis, the Kazhdan-Lusztig basis, the
//! mu-coefficients and the bar involution.
//!
//! Conventions (Soergel normalization): the standard basis {H_w} satisfies
//! `H_s H_w = H_{sw}` when `sw > w` and `H_s H_w = (v - v^-1) H_w + H_{sw}`
//! when `sw < w`; `h_s = H_s + v^-1 H_id`; the KL basis element `h_w` is the
//! unique bar-self-dual element in `H_w + sum_{x<w} v^-1 Z[v^-1] H_x`.
//! `mu(x,w)` is the coefficient of `v^-1` in `h_{x,w}`.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::coxeter::{CoxeterSpec, Elt, Family, GroupTable, Side};
use crate::laurent::LaurentPoly;

/// A Hecke algebra element in standard-basis coordinates.
///
/// Entries are kept sorted by element index with no zero coordinates.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct HeckeElt {
    entries: Vec<(Elt, LaurentPoly)>,
}

impl HeckeElt {
    pub fn zero() -> Self {
        HeckeElt::default()
    }

    /// The basis element `H_w`.
    pub fn basis(w: Elt) -> Self {
        HeckeElt { entries: vec![(w, LaurentPoly::one())] }
    }

    pub fn from_entries(mut entries: Vec<(Elt, LaurentPoly)>) -> Self {
        entries.retain(|(_, p)| !p.is_zero());
        entries.sort_by_key(|&(x, _)| x);
        HeckeElt { entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn coeff(&self, x: Elt) -> LaurentPoly {
        match self.entries.binary_search_by_key(&x, |&(e, _)| e) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => LaurentPoly::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Elt, &LaurentPoly)> {
        self.entries.iter().map(|(x, p)| (*x, p))
    }

    pub fn add_scaled(&self, other: &HeckeElt, scale: i64, shift: i32) -> HeckeElt {
        let mut map: HashMap<Elt, LaurentPoly> =
            self.entries.iter().cloned().collect();
        for (x, p) in &other.entries {
            map.entry(*x).or_default().add_scaled(p, scale, shift);
        }
        HeckeElt::from_entries(map.into_iter().collect())
    }

    pub fn scale(&self, by: &LaurentPoly) -> HeckeElt {
        HeckeElt::from_entries(
            self.entries.iter().map(|(x, p)| (*x, p.mul(by))).collect(),
        )
    }
}

/// Multiply by the standard generator `H_s` on the given side.
pub fn mult_by_hs(g: &GroupTable, h: &HeckeElt, s: usize, side: Side) -> HeckeElt {
    let mut map: HashMap<Elt, LaurentPoly> = HashMap::with_capacity(h.entries.len() * 2);
    for (x, p) in &h.entries {
        let sx = g.mult_gen(*x, s, side);
        if g.length(sx) > g.length(*x) {
            map.entry(sx).or_default().add_scaled(p, 1, 0);
        } else {
            // H_s H_x = (v - v^-1) H_x + H_{sx}.
            map.entry(sx).or_default().add_scaled(p, 1, 0);
            let e = map.entry(*x).or_default();
            e.add_scaled(p, 1, 1);
            e.add_scaled(p, -1, -1);
        }
    }
    HeckeElt::from_entries(map.into_iter().collect())
}

/// Multiply by the KL generator `h_s = H_s + v^-1` on the given side.
pub fn mult_by_kl_hs(g: &GroupTable, h: &HeckeElt, s: usize, side: Side) -> HeckeElt {
    mult_by_hs(g, h, s, side).add_scaled(h, 1, -1)
}

/// Precomputed images `bar(H_w)` for a whole group.
///
/// Building this is quadratic in the group order, so it is meant for oracle
/// checks on small groups, not for the production KL pass.
pub struct BarTable {
    rows: Vec<HeckeElt>,
}

impl BarTable {
    pub fn new(g: &GroupTable) -> Self {
        let mut rows: Vec<HeckeElt> = Vec::with_capacity(g.size());
        rows.push(HeckeElt::basis(g.id()));
        for w in 1..g.size() as Elt {
            // w = y * s with s the last letter of the ShortLex word:
            // bar(H_w) = bar(H_y) * H_s^-1, H_s^-1 = H_s - (v - v^-1).
            let word = g.word(w);
            let s = *word.last().unwrap() as usize;
            let y = g.right_mult(w, s);
            let prev = &rows[y as usize];
            let mut out = mult_by_hs(g, prev, s, Side::Right);
            out = out.add_scaled(prev, -1, 1);
            out = out.add_scaled(prev, 1, -1);
            rows.push(out);
        }
        BarTable { rows }
    }

    /// The bar involution: `v -> v^-1`, `H_w -> H_{w^-1}^-1`.
    pub fn bar(&self, h: &HeckeElt) -> HeckeElt {
        let mut acc = HeckeElt::zero();
        for (x, p) in h.iter() {
            acc = acc_add_scaled_poly(acc, &self.rows[x as usize], &p.negate_exponents());
        }
        acc
    }
}

fn acc_add_scaled_poly(acc: HeckeElt, row: &HeckeElt, by: &LaurentPoly) -> HeckeElt {
    acc.add_scaled(&row.scale(by), 1, 0)
}

#[derive(Error, Debug)]
pub enum KlError {
    #[error("KL coefficient overflows the table storage at w={0}, x={1}")]
    CoeffOverflow(Elt, Elt),
    #[error("KLT1 parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One KL basis element `h_w` in standard coordinates, stored compactly:
/// parallel arrays over the support, with a shared coefficient pool.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KlRow {
    elems: Vec<Elt>,
    min_exps: Vec<i16>,
    offs: Vec<u32>,
    coeffs: Vec<i32>,
}

impl KlRow {
    fn push(&mut self, x: Elt, min_exp: i16, coeffs: &[i32]) {
        if self.offs.is_empty() {
            self.offs.push(0);
        }
        self.elems.push(x);
        self.min_exps.push(min_exp);
        self.coeffs.extend_from_slice(coeffs);
        self.offs.push(self.coeffs.len() as u32);
    }

    pub fn support(&self) -> &[Elt] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    fn band(&self, i: usize) -> (i16, &[i32]) {
        let lo = self.offs[i] as usize;
        let hi = self.offs[i + 1] as usize;
        (self.min_exps[i], &self.coeffs[lo..hi])
    }

    pub fn entry(&self, x: Elt) -> LaurentPoly {
        match self.elems.binary_search(&x) {
            Ok(i) => self.poly(i),
            Err(_) => LaurentPoly::zero(),
        }
    }

    pub fn poly(&self, i: usize) -> LaurentPoly {
        let (min, band) = self.band(i);
        let mut p = LaurentPoly::zero();
        for (k, &c) in band.iter().enumerate() {
            p.add_scaled(&LaurentPoly::monomial(min as i32 + k as i32, c as i64), 1, 0);
        }
        p
    }

    pub fn iter(&self) -> impl Iterator<Item = (Elt, LaurentPoly)> + '_ {
        (0..self.len()).map(move |i| (self.elems[i], self.poly(i)))
    }

    pub fn to_hecke(&self) -> HeckeElt {
        HeckeElt::from_entries(self.iter().collect())
    }
}

/// Which left descent the recursion peels off; used to verify that the
/// computed basis is independent of the choice.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DescentChoice {
    SmallestLeft,
    LargestLeft,
}

/// The full Kazhdan-Lusztig table of a group: every `h_w` plus mu-edge
/// adjacency.
pub struct KlTable {
    pub spec: CoxeterSpec,
    rows: Vec<KlRow>,
    /// For each w: the list of `(x, mu(x, w))` with `x < w`, `mu != 0`,
    /// sorted by x.
    mu_down: Vec<Vec<(Elt, i32)>>,
}

impl KlTable {
    pub fn row(&self, w: Elt) -> &KlRow {
        &self.rows[w as usize]
    }

    pub fn mu_edges_below(&self, w: Elt) -> &[(Elt, i32)] {
        &self.mu_down[w as usize]
    }

    /// `mu(x, w)` for `x < w` (0 in every other case).
    pub fn mu(&self, x: Elt, w: Elt) -> i64 {
        self.mu_down[w as usize]
            .binary_search_by_key(&x, |&(e, _)| e)
            .map(|i| self.mu_down[w as usize][i].1 as i64)
            .unwrap_or(0)
    }

    pub fn h(&self, w: Elt) -> HeckeElt {
        self.row(w).to_hecke()
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }
}

/// Compute the KL basis for the whole group.
pub fn kl_basis(g: &GroupTable) -> KlTable {
    kl_basis_with_choice(g, DescentChoice::SmallestLeft)
        .expect("KL coefficients of desk-scale groups fit i32")
}

pub fn kl_basis_with_choice(
    g: &GroupTable,
    choice: DescentChoice,
) -> Result<KlTable, KlError> {
    let size = g.size();
    let mut rows: Vec<KlRow> = Vec::with_capacity(size);
    let mut mu_down: Vec<Vec<(Elt, i32)>> = Vec::with_capacity(size);

    // Group elements by length; the table order is length-monotone.
    let mut strata: Vec<std::ops::Range<usize>> = Vec::new();
    {
        let mut start = 0usize;
        for w in 0..=size {
            if w == size || (w > 0 && g.length(w as Elt) != g.length(start as Elt)) {
                strata.push(start..w);
                start = w;
            }
        }
    }

    for stratum in strata {
        // Rows of any shorter length are finalized; elements of one length
        // never reference each other, so the stratum can run in parallel.
        let computed: Vec<Result<(KlRow, Vec<(Elt, i32)>), KlError>> = stratum
            .clone()
            .into_par_iter()
            .map(|wi| {
                let w = wi as Elt;
                if g.length(w) == 0 {
                    let mut r = KlRow::default();
                    r.push(w, 0, &[1]);
                    return Ok((r, Vec::new()));
                }
                let dl = g.descent_bits(w, Side::Left);
                let s = match choice {
                    DescentChoice::SmallestLeft => dl.trailing_zeros() as usize,
                    DescentChoice::LargestLeft => 31 - dl.leading_zeros() as usize,
                };
                let y = g.left_mult(s, w);
                compute_row(g, &rows, &mu_down, w, s, y)
            })
            .collect();
        for r in computed {
            let (row, mu) = r?;
            rows.push(row);
            mu_down.push(mu);
        }
    }

    Ok(KlTable { spec: g.spec, rows, mu_down })
}

/// h_w = (H_s + v^-1) h_y - sum_{x: mu(x,y) != 0, sx < x} mu(x,y) h_x,
/// where y = sw < w.
fn compute_row(
    g: &GroupTable,
    rows: &[KlRow],
    mu_down: &[Vec<(Elt, i32)>],
    w: Elt,
    s: usize,
    y: Elt,
) -> Result<(KlRow, Vec<(Elt, i32)>), KlError> {
    // Scratch accumulation: x -> small dense band keyed by exponent.
    let mut acc: HashMap<Elt, LaurentPoly> = HashMap::new();
    {
        let ry = &rows[y as usize];
        for i in 0..ry.len() {
            let x = ry.elems[i];
            let p = ry.poly(i);
            let sx = g.left_mult(s, x);
            let e = acc.entry(sx).or_default();
            e.add_scaled(&p, 1, 0);
            let shift = if g.length(sx) > g.length(x) { -1 } else { 1 };
            acc.entry(x).or_default().add_scaled(&p, 1, shift);
        }
    }
    for &(x, m) in &mu_down[y as usize] {
        if !g.is_descent(x, s, Side::Left) {
            continue;
        }
        let rx = &rows[x as usize];
        for i in 0..rx.len() {
            let p = rx.poly(i);
            acc.entry(rx.elems[i]).or_default().add_scaled(&p, -(m as i64), 0);
        }
    }

    let mut entries: Vec<(Elt, LaurentPoly)> =
        acc.into_iter().filter(|(_, p)| !p.is_zero()).collect();
    entries.sort_by_key(|&(x, _)| x);

    let mut row = KlRow::default();
    let mut mu = Vec::new();
    for (x, p) in entries {
        if x == w {
            debug_assert!(p == LaurentPoly::one(), "diagonal of h_w must be 1");
        } else {
            debug_assert!(
                p.all_exponents_negative() && p.all_coeffs_positive(),
                "triangularity/positivity violated at ({}, {}): {}",
                x,
                w,
                p
            );
            let m = p.coeff(-1);
            if m != 0 {
                let m32 =
                    i32::try_from(m).map_err(|_| KlError::CoeffOverflow(w, x))?;
                mu.push((x, m32));
            }
        }
        let min = p.min_exp().unwrap();
        let min16 = i16::try_from(min).map_err(|_| KlError::CoeffOverflow(w, x))?;
        let band: Result<Vec<i32>, _> = (min..=p.max_exp().unwrap())
            .map(|e| i32::try_from(p.coeff(e)))
            .collect();
        let band = band.map_err(|_| KlError::CoeffOverflow(w, x))?;
        row.push(x, min16, &band);
    }
    Ok((row, mu))
}

/// Expand a standard-basis element in the KL basis (unitriangular
/// back-substitution).
pub fn expand_in_kl(g: &GroupTable, t: &KlTable, h: &HeckeElt) -> Vec<(Elt, LaurentPoly)> {
    let mut rem: HashMap<Elt, LaurentPoly> =
        h.iter().map(|(x, p)| (x, p.clone())).collect();
    let mut out: Vec<(Elt, LaurentPoly)> = Vec::new();
    loop {
        rem.retain(|_, p| !p.is_zero());
        let Some(&w) = rem.keys().max_by_key(|&&x| (g.length(x), x)) else {
            break;
        };
        let c = rem.remove(&w).unwrap();
        let rw = t.row(w);
        for i in 0..rw.len() {
            let x = rw.elems[i];
            if x == w {
                continue;
            }
            let p = rw.poly(i);
            rem.entry(x).or_default().add_scaled(&p.mul(&c), -1, 0);
        }
        out.push((w, c));
    }
    out.sort_by_key(|&(x, _)| x);
    out
}

/// KL-support of `h_w * h_s` (Right) or `h_s * h_w` (Left), computed purely
/// from mu-edges and descent bits — no polynomial arithmetic.
///
/// If `s` is already a descent of `w` on that side the product is
/// `(v + v^-1) h_w` with support `{w}`; otherwise the support is
/// `{ws} ∪ {x < w : mu(x,w) != 0, s a descent of x}`.
pub fn kl_product_support(
    g: &GroupTable,
    t: &KlTable,
    w: Elt,
    s: usize,
    side: Side,
) -> Vec<Elt> {
    if g.is_descent(w, s, side) {
        return vec![w];
    }
    let mut out = vec![g.mult_gen(w, s, side)];
    for &(x, _) in t.mu_edges_below(w) {
        if g.is_descent(x, s, side) {
            out.push(x);
        }
    }
    out.sort_unstable();
    out
}

// ---------------------------------------------------------------------------
// KLT1 on-disk format
//
//   KLT1 <family> <rank> [m]
//   N <size>
//   R <w> <k>  x1 min1 c... ; x2 min2 c... ; ...
//
// One `R` line per element, entries separated by `;`, each entry an element
// index, the minimal exponent and the coefficient band. The mu table is
// reconstructed while parsing.
// ---------------------------------------------------------------------------

pub fn write_klt1<W: Write>(t: &KlTable, out: &mut W) -> Result<(), KlError> {
    let spec = t.spec;
    match spec.family {
        Family::I2 => writeln!(out, "KLT1 I2 2 {}", spec.m.unwrap())?,
        f => writeln!(out, "KLT1 {} {}", f, spec.rank)?,
    }
    writeln!(out, "N {}", t.size())?;
    for w in 0..t.size() {
        let row = &t.rows[w];
        write!(out, "R {} {} ", w, row.len())?;
        for i in 0..row.len() {
            let (min, band) = row.band(i);
            if i > 0 {
                write!(out, " ; ")?;
            }
            write!(out, "{} {}", row.elems[i], min)?;
            for c in band {
                write!(out, " {}", c)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_klt1<R: BufRead>(expect_spec: CoxeterSpec, input: R) -> Result<KlTable, KlError> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| KlError::Parse("empty file".into()))??;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.first() != Some(&"KLT1") {
        return Err(KlError::Parse(format!("bad header: {}", header)));
    }
    if toks.len() < 3 || toks.len() > 4 {
        return Err(KlError::Parse("bad header arity".into()));
    }
    let fam_ok = toks[1] == expect_spec.family.to_string();
    let rank_ok = toks[2].parse() == Ok(expect_spec.rank);
    let m_ok = match (expect_spec.family, toks.get(3)) {
        (Family::I2, Some(m)) => m.parse().ok() == expect_spec.m,
        (Family::I2, None) => false,
        (_, None) => true,
        _ => false,
    };
    if !(fam_ok && rank_ok && m_ok) {
        return Err(KlError::Parse(format!(
            "cached table header '{}' does not match requested spec {}",
            header, expect_spec
        )));
    }
    let nline = lines
        .next()
        .ok_or_else(|| KlError::Parse("missing N line".into()))??;
    let size: usize = nline
        .strip_prefix("N ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| KlError::Parse(format!("bad N line: {}", nline)))?;

    let mut rows = Vec::with_capacity(size);
    let mut mu_down = Vec::with_capacity(size);
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let body = line
            .strip_prefix("R ")
            .ok_or_else(|| KlError::Parse(format!("bad row line: {}", line)))?;
        let (head, rest) = body
            .split_once(' ')
            .and_then(|(w, r)| r.split_once(' ').map(|(k, rest)| ((w, k), rest)))
            .ok_or_else(|| KlError::Parse(format!("bad row line: {}", line)))?;
        let w: usize = head
            .0
            .parse()
            .map_err(|_| KlError::Parse(format!("bad element index: {}", head.0)))?;
        if w != rows.len() {
            return Err(KlError::Parse(format!("row {} out of order", w)));
        }
        let mut row = KlRow::default();
        let mut mu: Vec<(Elt, i32)> = Vec::new();
        for entry in rest.split(" ; ") {
            let nums: Result<Vec<i64>, _> =
                entry.split_whitespace().map(|t| t.parse::<i64>()).collect();
            let nums = nums.map_err(|_| KlError::Parse(format!("bad entry: {}", entry)))?;
            if nums.len() < 3 {
                return Err(KlError::Parse(format!("short entry: {}", entry)));
            }
            let x = nums[0] as Elt;
            let min = nums[1] as i16;
            let band: Vec<i32> = nums[2..].iter().map(|&c| c as i32).collect();
            if x != w as Elt {
                let idx = -1 - min as i32;
                if idx >= 0 && (idx as usize) < band.len() && band[idx as usize] != 0 {
                    mu.push((x, band[idx as usize]));
                }
            }
            row.push(x, min, &band);
        }
        mu.sort_by_key(|&(x, _)| x);
        rows.push(row);
        mu_down.push(mu);
    }
    if rows.len() != size {
        return Err(KlError::Parse(format!(
            "expected {} rows, found {}",
            size,
            rows.len()
        )));
    }
    Ok(KlTable { spec: expect_spec, rows, mu_down })
}
