//! Finite Coxeter groups: exact enumeration, length/descent/Bruhat queries,
//! integral root actions and type-A permutation utilities.
//!
//! Elements are dense indices into a [`GroupTable`], ordered by
//! (length, ShortLex word). Crystallographic families are enumerated through
//! the geometric representation over the integers (each element is the matrix
//! of its action on the simple roots), which gives exact normal forms and
//! cheap hashing; dihedral groups `I2(m)` use closed-form alternating words so
//! that non-crystallographic orders of `st` need no irrational arithmetic.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Element index inside a [`GroupTable`].
pub type Elt = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Family {
    A,
    B,
    D,
    F4,
    G2,
    I2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::D => "D",
            Family::F4 => "F4",
            Family::G2 => "G2",
            Family::I2 => "I2",
        };
        write!(f, "{}", s)
    }
}

/// Which finite Coxeter group to build.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CoxeterSpec {
    pub family: Family,
    pub rank: usize,
    /// Order of `st`; only meaningful for `I2`.
    pub m: Option<usize>,
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("unsupported spec: {0}")]
    UnsupportedSpec(String),
    #[error("no integral root datum for {0}")]
    NoRootDatum(String),
    #[error("operation requires a type A group, got {0}")]
    NotTypeA(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
}

impl CoxeterSpec {
    pub fn a(rank: usize) -> Self {
        CoxeterSpec { family: Family::A, rank, m: None }
    }
    pub fn b(rank: usize) -> Self {
        CoxeterSpec { family: Family::B, rank, m: None }
    }
    pub fn d(rank: usize) -> Self {
        CoxeterSpec { family: Family::D, rank, m: None }
    }
    pub fn f4() -> Self {
        CoxeterSpec { family: Family::F4, rank: 4, m: None }
    }
    pub fn g2() -> Self {
        CoxeterSpec { family: Family::G2, rank: 2, m: None }
    }
    pub fn i2(m: usize) -> Self {
        CoxeterSpec { family: Family::I2, rank: 2, m: Some(m) }
    }

    pub fn validate(&self) -> Result<(), CoxeterError> {
        let ok = match self.family {
            // Rank 8 is where the letter aliases end and well past where the
            // KL pass is feasible on a desk.
            Family::A => (1..=8).contains(&self.rank) && self.m.is_none(),
            Family::B => (2..=8).contains(&self.rank) && self.m.is_none(),
            Family::D => (4..=8).contains(&self.rank) && self.m.is_none(),
            Family::F4 => self.rank == 4 && self.m.is_none(),
            Family::G2 => self.rank == 2 && self.m.is_none(),
            Family::I2 => self.rank == 2 && self.m.map_or(false, |m| m >= 2),
        };
        if ok {
            Ok(())
        } else {
            Err(CoxeterError::UnsupportedSpec(self.to_string()))
        }
    }

    /// Classical order of the group.
    pub fn order(&self) -> usize {
        fn fact(n: usize) -> usize {
            (1..=n).product()
        }
        match self.family {
            Family::A => fact(self.rank + 1),
            Family::B => (1 << self.rank) * fact(self.rank),
            Family::D => (1 << (self.rank - 1)) * fact(self.rank),
            Family::F4 => 1152,
            Family::G2 => 12,
            Family::I2 => 2 * self.m.unwrap(),
        }
    }

    /// Cartan matrix `C` with `s_i(a_j) = a_j - C[i][j] a_i`, or `None` for
    /// non-crystallographic dihedral orders.
    pub fn cartan(&self) -> Option<Vec<Vec<i64>>> {
        let n = self.rank;
        let mut c = vec![vec![0i64; n]; n];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 2;
        }
        let link = |c: &mut Vec<Vec<i64>>, i: usize, j: usize| {
            c[i][j] = -1;
            c[j][i] = -1;
        };
        match self.family {
            Family::A => {
                for i in 0..n.saturating_sub(1) {
                    link(&mut c, i, i + 1);
                }
            }
            Family::B => {
                // Short root last: the double bond points from s_{n-1} to s_n.
                for i in 0..n - 1 {
                    link(&mut c, i, i + 1);
                }
                c[n - 1][n - 2] = -2;
            }
            Family::D => {
                // Chain s_1..s_{n-2}, fork s_{n-1}, s_n both joined to s_{n-2}.
                for i in 0..n.saturating_sub(3) {
                    link(&mut c, i, i + 1);
                }
                link(&mut c, n - 3, n - 2);
                link(&mut c, n - 3, n - 1);
            }
            Family::F4 => {
                link(&mut c, 0, 1);
                link(&mut c, 1, 2);
                link(&mut c, 2, 3);
                c[2][1] = -2;
            }
            Family::G2 => {
                c[0][1] = -1;
                c[1][0] = -3;
            }
            Family::I2 => {
                match self.m.unwrap() {
                    2 => {}
                    3 => link(&mut c, 0, 1),
                    4 => {
                        c[0][1] = -1;
                        c[1][0] = -2;
                    }
                    6 => {
                        c[0][1] = -1;
                        c[1][0] = -3;
                    }
                    _ => return None,
                }
            }
        }
        Some(c)
    }

    /// Order of `s_i s_j` in the group (the Coxeter matrix entry).
    pub fn coxeter_m(&self, i: usize, j: usize) -> usize {
        if i == j {
            return 1;
        }
        if self.family == Family::I2 {
            return self.m.unwrap();
        }
        let c = self.cartan().expect("non-I2 specs are crystallographic");
        match c[i][j] * c[j][i] {
            0 => 2,
            1 => 3,
            2 => 4,
            3 => 6,
            _ => unreachable!("finite Cartan entries"),
        }
    }

    /// Letter alias for generator `i`, as used in the published element lists
    /// (e.g. D4's `s, t, u, v`).
    pub fn letter(&self, i: usize) -> char {
        const LETTERS: &[u8] = b"stuvwxyz";
        LETTERS[i] as char
    }

    pub fn letter_index(&self, ch: char) -> Option<usize> {
        "stuvwxyz"[..self.rank].find(ch)
    }
}

impl fmt::Display for CoxeterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::I2 => write!(f, "I2({})", self.m.unwrap_or(0)),
            Family::F4 | Family::G2 => write!(f, "{}", self.family),
            _ => write!(f, "{}{}", self.family, self.rank),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
}

/// A fully enumerated finite Coxeter group.
///
/// Immutable after construction; all queries are read-only.
pub struct GroupTable {
    pub spec: CoxeterSpec,
    /// Number of generators.
    pub n: usize,
    /// ShortLex-minimal reduced word of each element (generator indices).
    words: Vec<Vec<u8>>,
    /// `lmult[w][s] = s*w`, `rmult[w][s] = w*s`.
    lmult: Vec<Vec<Elt>>,
    rmult: Vec<Vec<Elt>>,
    ldesc: Vec<u32>,
    rdesc: Vec<u32>,
    inverse: Vec<Elt>,
}

impl GroupTable {
    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn length(&self, w: Elt) -> usize {
        self.words[w as usize].len()
    }

    pub fn word(&self, w: Elt) -> &[u8] {
        &self.words[w as usize]
    }

    pub fn left_mult(&self, s: usize, w: Elt) -> Elt {
        self.lmult[w as usize][s]
    }

    pub fn right_mult(&self, w: Elt, s: usize) -> Elt {
        self.rmult[w as usize][s]
    }

    pub fn mult_gen(&self, w: Elt, s: usize, side: Side) -> Elt {
        match side {
            Side::Left => self.left_mult(s, w),
            Side::Right => self.right_mult(w, s),
        }
    }

    /// Descent set as a generator bitset.
    pub fn descent_bits(&self, w: Elt, side: Side) -> u32 {
        match side {
            Side::Left => self.ldesc[w as usize],
            Side::Right => self.rdesc[w as usize],
        }
    }

    pub fn is_descent(&self, w: Elt, s: usize, side: Side) -> bool {
        self.descent_bits(w, side) >> s & 1 == 1
    }

    pub fn descents(&self, w: Elt, side: Side) -> Vec<usize> {
        (0..self.n).filter(|&s| self.is_descent(w, s, side)).collect()
    }

    pub fn inverse(&self, w: Elt) -> Elt {
        self.inverse[w as usize]
    }

    pub fn id(&self) -> Elt {
        0
    }

    pub fn longest(&self) -> Elt {
        (self.size() - 1) as Elt
    }

    /// Elements in table order (length-increasing, ShortLex within a length).
    pub fn elements(&self) -> impl Iterator<Item = Elt> {
        0..self.size() as Elt
    }

    /// Group product of two elements.
    pub fn mult(&self, x: Elt, y: Elt) -> Elt {
        self.word(y)
            .iter()
            .fold(x, |w, &s| self.right_mult(w, s as usize))
    }

    /// Product of an arbitrary generator word.
    pub fn word_to_element(&self, word: &[u8]) -> Elt {
        word.iter().fold(self.id(), |w, &s| self.right_mult(w, s as usize))
    }

    /// Parse a letter word like `"stsuts"` (empty string or `"e"` is the
    /// identity).
    pub fn parse_letters(&self, s: &str) -> Result<Elt, CoxeterError> {
        if s == "e" || s.is_empty() {
            return Ok(self.id());
        }
        let mut w = self.id();
        for ch in s.chars() {
            let i = self
                .spec
                .letter_index(ch)
                .ok_or_else(|| CoxeterError::UnknownElement(s.to_string()))?;
            w = self.right_mult(w, i);
        }
        Ok(w)
    }

    /// Letter-alias rendering of the ShortLex word (identity prints as `e`).
    pub fn letters(&self, w: Elt) -> String {
        if w == self.id() {
            return "e".to_string();
        }
        self.word(w).iter().map(|&s| self.spec.letter(s as usize)).collect()
    }

    /// Bruhat order by the descent recursion.
    pub fn bruhat_leq(&self, x: Elt, w: Elt) -> bool {
        if x == self.id() {
            return true;
        }
        if self.length(x) > self.length(w) {
            return false;
        }
        // Any left descent of w works; take the first.
        let s = self.descent_bits(w, Side::Left).trailing_zeros() as usize;
        let sw = self.left_mult(s, w);
        let sx = self.left_mult(s, x);
        if self.length(sx) < self.length(x) {
            self.bruhat_leq(sx, sw)
        } else {
            self.bruhat_leq(x, sw)
        }
    }

    /// Brute-force Bruhat oracle via the subword property (test use only):
    /// `x <= w` iff some subword of the ShortLex word of `w` multiplies to `x`
    /// with the right length.
    pub fn bruhat_leq_subword_oracle(&self, x: Elt, w: Elt) -> bool {
        let word = self.word(w);
        let lx = self.length(x);
        // Enumerate subwords of length l(x).
        fn rec(g: &GroupTable, word: &[u8], need: usize, acc: Elt, x: Elt) -> bool {
            if need == 0 {
                return acc == x;
            }
            if word.len() < need {
                return false;
            }
            rec(g, &word[1..], need - 1, g.right_mult(acc, word[0] as usize), x)
                || rec(g, &word[1..], need, acc, x)
        }
        rec(self, word, lx, self.id(), x)
    }

    /// Apply `w` to a vector in simple-root coordinates.
    pub fn act_on_root(&self, w: Elt, r: &[i64]) -> Result<Vec<i64>, CoxeterError> {
        let c = self
            .spec
            .cartan()
            .ok_or_else(|| CoxeterError::NoRootDatum(self.spec.to_string()))?;
        let mut v = r.to_vec();
        // w = s_1 ... s_L acts right-to-left.
        for &a in self.word(w).iter().rev() {
            let i = a as usize;
            let pairing: i64 = (0..self.n).map(|j| c[i][j] * v[j]).sum();
            v[i] -= pairing;
        }
        Ok(v)
    }

    /// One-line notation (type A only): the permutation of `1..=rank+1`.
    pub fn one_line(&self, w: Elt) -> Result<Vec<u8>, CoxeterError> {
        if self.spec.family != Family::A {
            return Err(CoxeterError::NotTypeA(self.spec.to_string()));
        }
        let mut p: Vec<u8> = (1..=self.n as u8 + 1).collect();
        for &a in self.word(w) {
            p.swap(a as usize, a as usize + 1);
        }
        Ok(p)
    }

    /// Inverse of [`GroupTable::one_line`].
    pub fn parse_one_line(&self, p: &[u8]) -> Result<Elt, CoxeterError> {
        if self.spec.family != Family::A {
            return Err(CoxeterError::NotTypeA(self.spec.to_string()));
        }
        let mut sorted: Vec<u8> = p.to_vec();
        sorted.sort_unstable();
        let expect: Vec<u8> = (1..=self.n as u8 + 1).collect();
        if sorted != expect {
            return Err(CoxeterError::UnknownElement(format!("{:?}", p)));
        }
        // Bubble-sort back to the identity, recording the swaps.
        let mut v = p.to_vec();
        let mut word = Vec::new();
        loop {
            match (0..v.len() - 1).find(|&i| v[i] > v[i + 1]) {
                Some(i) => {
                    v.swap(i, i + 1);
                    word.push(i as u8);
                }
                None => break,
            }
        }
        word.reverse();
        Ok(self.word_to_element(&word))
    }
}

/// Pattern containment for one-line permutations: does `w` contain `y`?
pub fn contains_pattern(w: &[u8], y: &[u8]) -> bool {
    fn rec(w: &[u8], y: &[u8], chosen: &mut Vec<u8>) -> bool {
        if chosen.len() == y.len() {
            // Check relative order.
            let m = y.len();
            return (0..m).all(|i| {
                (0..m).all(|j| (chosen[i] < chosen[j]) == (y[i] < y[j]))
            });
        }
        if w.len() < y.len() - chosen.len() {
            return false;
        }
        chosen.push(w[0]);
        if rec(&w[1..], y, chosen) {
            chosen.pop();
            return true;
        }
        chosen.pop();
        rec(&w[1..], y, chosen)
    }
    rec(w, y, &mut Vec::new())
}

/// Enumerate the group described by `spec`.
pub fn build_group(spec: CoxeterSpec) -> Result<GroupTable, CoxeterError> {
    spec.validate()?;
    let g = match spec.cartan() {
        Some(c) => build_crystallographic(spec, &c),
        None => build_dihedral(spec),
    };
    debug_assert_eq!(g.size(), spec.order());
    Ok(g)
}

fn build_crystallographic(spec: CoxeterSpec, cartan: &[Vec<i64>]) -> GroupTable {
    let n = spec.rank;
    // Element key: matrix of the action on simple roots, rows = images, stored
    // flattened. Right multiplication by s_i is a column update, left
    // multiplication a row update.
    let rmul = |m: &[i64], i: usize| -> Vec<i64> {
        let mut out = m.to_vec();
        for r in 0..n {
            let mri = m[r * n + i];
            for c in 0..n {
                if c == i {
                    out[r * n + c] = -mri;
                } else {
                    out[r * n + c] -= cartan[i][c] * mri;
                }
            }
        }
        out
    };
    let lmul = |m: &[i64], i: usize| -> Vec<i64> {
        let mut out = m.to_vec();
        for c in 0..n {
            let pairing: i64 = (0..n).map(|k| cartan[i][k] * m[k * n + c]).sum();
            out[i * n + c] = m[i * n + c] - pairing;
        }
        out
    };

    let id: Vec<i64> = (0..n * n).map(|k| if k % (n + 1) == 0 { 1 } else { 0 }).collect();
    let mut index: HashMap<Vec<i64>, Elt> = HashMap::new();
    index.insert(id.clone(), 0);
    let mut mats = vec![id];
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    // BFS in table order: parents in ShortLex order and generators ascending
    // make the first discovery of an element its ShortLex-minimal word.
    let mut head = 0usize;
    while head < mats.len() {
        for s in 0..n {
            let m2 = rmul(&mats[head], s);
            if !index.contains_key(&m2) {
                let idx = mats.len() as Elt;
                index.insert(m2.clone(), idx);
                let mut w = words[head].clone();
                w.push(s as u8);
                mats.push(m2);
                words.push(w);
            }
        }
        head += 1;
    }

    let size = mats.len();
    let mut rmult = vec![vec![0 as Elt; n]; size];
    let mut lmult = vec![vec![0 as Elt; n]; size];
    for (w, m) in mats.iter().enumerate() {
        for s in 0..n {
            rmult[w][s] = index[&rmul(m, s)];
            lmult[w][s] = index[&lmul(m, s)];
        }
    }
    let inverse = invert_via_words(&words, &lmult);
    finish_table(spec, n, words, lmult, rmult, inverse)
}

/// Closed-form dihedral group: alternating words, no root arithmetic.
fn build_dihedral(spec: CoxeterSpec) -> GroupTable {
    let m = spec.m.unwrap();
    // Table order: id; then for each length k in 1..m the s-initial word
    // before the t-initial word; then the longest element (index 2m-1).
    let size = 2 * m;
    let idx = |len: usize, start: usize| -> Elt {
        match len {
            0 => 0,
            l if l == m => (2 * m - 1) as Elt,
            l => (2 * l - 1 + start) as Elt,
        }
    };
    let alt_word = |len: usize, start: usize| -> Vec<u8> {
        (0..len).map(|i| ((start + i) % 2) as u8).collect()
    };
    let mut words = vec![Vec::new(); size];
    for len in 1..m {
        for start in 0..2 {
            words[idx(len, start) as usize] = alt_word(len, start);
        }
    }
    words[2 * m - 1] = alt_word(m, 0);

    let mut lmult = vec![vec![0 as Elt; 2]; size];
    let mut rmult = vec![vec![0 as Elt; 2]; size];
    for len in 0..=m {
        for start in 0..if len == 0 || len == m { 1 } else { 2 } {
            let w = idx(len, start);
            let last = (start + len + 1) % 2; // last letter of the word
            for u in 0..2usize {
                // Right multiplication.
                rmult[w as usize][u] = if len == 0 {
                    idx(1, u)
                } else if u == last {
                    idx(len - 1, start)
                } else {
                    idx(len + 1, start)
                };
                // Left multiplication.
                lmult[w as usize][u] = if len == 0 {
                    idx(1, u)
                } else if u == start {
                    idx(len - 1, (start + 1) % 2)
                } else {
                    idx(len + 1, u)
                };
            }
        }
    }
    // The longest element needs both starts folded onto index 2m-1; the loop
    // above already wrote it once with start = 0, but its descents go down on
    // both sides.
    let w0 = (2 * m - 1) as usize;
    for u in 0..2usize {
        // w0 * u drops the last letter of the alternating word of length m
        // ending in u; that word starts with (u + m + 1) % 2.
        rmult[w0][u] = idx(m - 1, (u + m + 1) % 2);
        lmult[w0][u] = idx(m - 1, (u + 1) % 2);
    }
    let inverse = invert_via_words(&words, &lmult);
    finish_table(spec, 2, words, lmult, rmult, inverse)
}

fn invert_via_words(words: &[Vec<u8>], lmult: &[Vec<Elt>]) -> Vec<Elt> {
    // w^-1 = reverse word of w, evaluated by left-multiplying in order.
    words
        .iter()
        .map(|w| w.iter().fold(0 as Elt, |acc, &s| lmult[acc as usize][s as usize]))
        .collect()
}

fn finish_table(
    spec: CoxeterSpec,
    n: usize,
    words: Vec<Vec<u8>>,
    lmult: Vec<Vec<Elt>>,
    rmult: Vec<Vec<Elt>>,
    inverse: Vec<Elt>,
) -> GroupTable {
    let size = words.len();
    let mut ldesc = vec![0u32; size];
    let mut rdesc = vec![0u32; size];
    for w in 0..size {
        for s in 0..n {
            if words[lmult[w][s] as usize].len() < words[w].len() {
                ldesc[w] |= 1 << s;
            }
            if words[rmult[w][s] as usize].len() < words[w].len() {
                rdesc[w] |= 1 << s;
            }
        }
    }
    GroupTable { spec, n, words, lmult, rmult, ldesc, rdesc, inverse }
}
