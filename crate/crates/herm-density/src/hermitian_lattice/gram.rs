//! Hermitian Gram matrices over `F` with exact entries.

use super::felement::FElement;
use crate::arith::{parse_rat, rat_string, sign_pow, Rat};
use crate::error::{Error, Result};
use serde_json::{json, Value};

/// Square hermitian matrix of `F`-elements; `(v, w) = v^T T conj(w)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GramMatrix {
    entries: Vec<Vec<FElement>>,
    p: u64,
}

impl GramMatrix {
    pub fn new(entries: Vec<Vec<FElement>>, p: u64) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("Gram matrix is not square".into()));
        }
        let g = GramMatrix { entries, p };
        if !g.is_hermitian() {
            return Err(Error::InvalidInput("Gram matrix is not hermitian".into()));
        }
        Ok(g)
    }

    pub(crate) fn new_unchecked(entries: Vec<Vec<FElement>>, p: u64) -> Self {
        GramMatrix { entries, p }
    }

    /// Block diagonal sum.
    pub fn orthogonal_sum(&self, other: &GramMatrix) -> GramMatrix {
        let (n, m) = (self.dim(), other.dim());
        let mut e = vec![vec![FElement::zero(self.p); n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                e[i][j] = self.entries[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                e[n + i][n + j] = other.entries[i][j].clone();
            }
        }
        GramMatrix::new_unchecked(e, self.p)
    }

    pub fn diagonal(values: &[FElement], p: u64) -> GramMatrix {
        let n = values.len();
        let mut e = vec![vec![FElement::zero(p); n]; n];
        for (i, v) in values.iter().enumerate() {
            e[i][i] = v.clone();
        }
        GramMatrix::new_unchecked(e, p)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn entry(&self, i: usize, j: usize) -> &FElement {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<FElement>] {
        &self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.entries[j][i] == self.entries[i][j].conj()))
    }

    /// `(v, w)` for coordinate vectors.
    pub fn pair(&self, v: &[FElement], w: &[FElement]) -> FElement {
        let mut acc = FElement::zero(self.p);
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, wj) in w.iter().enumerate() {
                let t = &self.entries[i][j];
                if wj.is_zero() || t.is_zero() {
                    continue;
                }
                acc = &acc + &(&(vi * t) * &wj.conj());
            }
        }
        acc
    }

    /// Gram matrix of the vectors `rows` (coordinates in this basis).
    pub fn restrict(&self, rows: &[Vec<FElement>]) -> GramMatrix {
        let k = rows.len();
        let mut e = vec![vec![FElement::zero(self.p); k]; k];
        for i in 0..k {
            for j in i..k {
                let v = self.pair(&rows[i], &rows[j]);
                e[j][i] = v.conj();
                e[i][j] = v;
            }
        }
        GramMatrix::new_unchecked(e, self.p)
    }

    /// Minimal valuation among all entries (the first fundamental invariant).
    pub fn min_entry_val(&self) -> Option<i64> {
        self.entries.iter().flatten().filter_map(|x| x.val()).min()
    }

    pub fn det(&self) -> FElement {
        determinant(self.entries.clone(), self.p)
    }

    /// Fundamental invariants from minimal valuations of `i×i` minors.
    /// Exponential in the dimension; used as an independent check.
    pub fn invariants_from_minors(&self) -> Result<Vec<i64>> {
        let n = self.dim();
        let mut partial = vec![0i64; n + 1];
        for (i, slot) in partial.iter_mut().enumerate().skip(1) {
            let mut best: Option<i64> = None;
            for rows in subsets(n, i) {
                for cols in subsets(n, i) {
                    let m: Vec<Vec<FElement>> = rows
                        .iter()
                        .map(|&r| cols.iter().map(|&c| self.entries[r][c].clone()).collect())
                        .collect();
                    if let Some(v) = determinant(m, self.p).val() {
                        best = Some(best.map_or(v, |b: i64| b.min(v)));
                    }
                }
            }
            *slot = best.ok_or(Error::Degenerate)?;
        }
        Ok((1..=n).map(|i| partial[i] - partial[i - 1]).collect())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|r| {
                    Value::Array(
                        r.iter()
                            .map(|x| json!({"a": rat_string(&x.a), "b": rat_string(&x.b)}))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    /// Parse an `n×n` array of `{"a": "p/q", "b": "p/q"}`.
    pub fn from_json(v: &Value, p: u64) -> Result<Self> {
        let rows = v.as_array().ok_or_else(|| Error::Parse("Gram must be an array".into()))?;
        let mut entries = Vec::new();
        for r in rows {
            let cells = r.as_array().ok_or_else(|| Error::Parse("Gram row must be an array".into()))?;
            let mut row = Vec::new();
            for c in cells {
                let get = |k: &str| -> Result<Rat> {
                    match c.get(k) {
                        None => Ok(Rat::from_integer(0.into())),
                        Some(Value::String(s)) => parse_rat(s).ok_or_else(|| Error::Parse(format!("bad rational {s:?}"))),
                        Some(Value::Number(n)) => parse_rat(&n.to_string()).ok_or_else(|| Error::Parse(format!("bad number {n}"))),
                        Some(other) => Err(Error::Parse(format!("bad entry {other}"))),
                    }
                };
                row.push(FElement::new(get("a")?, get("b")?, p));
            }
            entries.push(row);
        }
        GramMatrix::new(entries, p)
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Determinant by Gaussian elimination over `F`.
pub fn determinant(mut m: Vec<Vec<FElement>>, p: u64) -> FElement {
    let n = m.len();
    let mut det = FElement::one(p);
    let mut swaps = 0;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return FElement::zero(p);
        };
        if piv != c {
            m.swap(piv, c);
            swaps += 1;
        }
        let inv = m[c][c].inv();
        det = &det * &m[c][c];
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] * &inv;
            for cc in c..n {
                let t = &f * &m[c][cc];
                m[r][cc] = &m[r][cc] - &t;
            }
        }
    }
    if sign_pow(swaps) < 0 {
        -&det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn minors_examples() {
        let p = 5;
        let one = GramMatrix::diagonal(&[FElement::one(p)], p);
        assert_eq!(one.invariants_from_minors().unwrap(), vec![0]);
        let pim = FElement::pi_pow(-1, p);
        let h = GramMatrix::new(
            vec![vec![FElement::zero(p), pim.clone()], vec![pim.conj(), FElement::zero(p)]],
            p,
        )
        .unwrap();
        assert_eq!(h.invariants_from_minors().unwrap(), vec![-1, -1]);
        let d = GramMatrix::diagonal(&[FElement::one(p), FElement::one(p), FElement::from_int(15, p)], p);
        assert_eq!(d.invariants_from_minors().unwrap(), vec![0, 0, 2]);
        assert_eq!(d.det().a, rat(15));
    }

    #[test]
    fn json_roundtrip() {
        let v: Value = serde_json::from_str(r#"[[{"a":"1","b":"0"},{"a":"0","b":"1"}],[{"a":"0","b":"-1"},{"a":"3","b":"0"}]]"#).unwrap();
        let g = GramMatrix::from_json(&v, 3).unwrap();
        assert_eq!(GramMatrix::from_json(&g.to_json(), 3).unwrap(), g);
        let bad: Value = serde_json::from_str(r#"[[{"a":"1","b":"0"},{"a":"0","b":"1"}],[{"a":"0","b":"1"},{"a":"3","b":"0"}]]"#).unwrap();
        assert!(GramMatrix::from_json(&bad, 3).is_err());
    }
}
