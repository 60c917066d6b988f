//! Jordan splitting of a hermitian Gram matrix over `O_F`.
//!
//! Repeatedly split off an entry of minimal valuation: a diagonal entry gives a
//! rank one block, an off-diagonal entry of odd valuation gives a hyperbolic
//! plane, and an off-diagonal entry of even valuation is first moved onto the
//! diagonal by `e_i <- e_i + e_j`. All basis changes have determinant one.

use super::felement::FElement;
use super::genus::{BlockKind, GenusSymbol, JordanBlock};
use super::gram::GramMatrix;
use crate::arith::{int, legendre_int, legendre_minus_one, sign_pow, Rat};
use crate::error::{Error, Result};
use num_traits::Zero;

/// One orthogonal summand of the splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanPiece {
    /// Positions of the piece in the reordered basis (one or two entries).
    pub indices: Vec<usize>,
    pub scale: i64,
}

#[derive(Clone, Debug)]
pub struct JordanDecomposition {
    /// New basis vectors, in coordinates of the input basis.
    pub basis: Vec<Vec<FElement>>,
    /// Block diagonal Gram of the new basis.
    pub gram: GramMatrix,
    /// Pieces sorted by scale.
    pub pieces: Vec<JordanPiece>,
    pub symbol: GenusSymbol,
}

impl JordanDecomposition {
    /// Scale attached to each basis coordinate.
    pub fn coordinate_scales(&self) -> Vec<i64> {
        let mut out = vec![0; self.basis.len()];
        for pc in &self.pieces {
            for &i in &pc.indices {
                out[i] = pc.scale;
            }
        }
        out
    }
}

pub fn jordan_decompose(g: &GramMatrix) -> Result<JordanDecomposition> {
    let n = g.dim();
    let p = g.p();
    let mut t: Vec<Vec<FElement>> = g.rows().to_vec();
    let mut b: Vec<Vec<FElement>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { FElement::one(p) } else { FElement::zero(p) }).collect())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut raw: Vec<(Vec<usize>, i64)> = Vec::new();

    while !active.is_empty() {
        let mut best: Option<(i64, usize, usize)> = None;
        for &i in &active {
            for &j in &active {
                if let Some(v) = t[i][j].val() {
                    let better = match best {
                        None => true,
                        // prefer diagonal entries at equal valuation
                        Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                    };
                    if better {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, i, j) = best.ok_or(Error::Degenerate)?;
        let idx: Vec<usize> = if i == j {
            vec![i]
        } else if v.rem_euclid(2) == 0 {
            // e_i <- e_i + e_j puts valuation v on the diagonal
            for c in 0..n {
                let x = &t[i][c] + &t[j][c];
                t[i][c] = x;
            }
            for r in 0..n {
                let x = &t[r][i] + &t[r][j];
                t[r][i] = x;
            }
            for c in 0..n {
                let x = &b[i][c] + &b[j][c];
                b[i][c] = x;
            }
            if t[i][i].val() != Some(v) {
                return Err(Error::Consistency("diagonalization step failed".into()));
            }
            vec![i]
        } else {
            vec![i.min(j), i.max(j)]
        };
        split(&mut t, &mut b, &idx, &active);
        active.retain(|x| !idx.contains(x));
        raw.push((idx, v));
    }

    // Reorder by scale, keeping discovery order within a scale.
    raw.sort_by_key(|(_, v)| *v);
    let mut order = Vec::new();
    let mut pieces = Vec::new();
    for (idx, v) in &raw {
        let start = order.len();
        order.extend(idx.iter().copied());
        pieces.push(JordanPiece { indices: (start..start + idx.len()).collect(), scale: *v });
    }
    let basis: Vec<Vec<FElement>> = order.iter().map(|&i| b[i].clone()).collect();
    let gram_rows: Vec<Vec<FElement>> = order
        .iter()
        .map(|&i| order.iter().map(|&j| t[i][j].clone()).collect())
        .collect();
    let gram = GramMatrix::new_unchecked(gram_rows, p);
    let symbol = symbol_of_pieces(&gram, &pieces)?;
    Ok(JordanDecomposition { basis, gram, pieces, symbol })
}

/// Make every active vector outside `idx` orthogonal to the block `idx`.
fn split(t: &mut [Vec<FElement>], b: &mut [Vec<FElement>], idx: &[usize], active: &[usize]) {
    let p = t[idx[0]][idx[0]].p();
    let n = t.len();
    // inverse of the block
    let pinv: Vec<Vec<FElement>> = if idx.len() == 1 {
        vec![vec![t[idx[0]][idx[0]].inv()]]
    } else {
        let (i, j) = (idx[0], idx[1]);
        let det = &(&t[i][i] * &t[j][j]) - &(&t[i][j] * &t[j][i]);
        let di = det.inv();
        vec![
            vec![&t[j][j] * &di, -&(&t[i][j] * &di)],
            vec![-&(&t[j][i] * &di), &t[i][i] * &di],
        ]
    };
    let rest: Vec<usize> = active.iter().copied().filter(|x| !idx.contains(x)).collect();
    // coefficients c_k = T[k][idx] * P^{-1}
    let coeffs: Vec<Vec<FElement>> = rest
        .iter()
        .map(|&k| {
            (0..idx.len())
                .map(|l| {
                    let mut acc = FElement::zero(p);
                    for (m, &im) in idx.iter().enumerate() {
                        if !t[k][im].is_zero() {
                            acc = &acc + &(&t[k][im] * &pinv[m][l]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    for (ci, &k) in rest.iter().enumerate() {
        if coeffs[ci].iter().all(|c| c.is_zero()) {
            continue;
        }
        for c in 0..n {
            let mut x = b[k][c].clone();
            for (m, &im) in idx.iter().enumerate() {
                if !coeffs[ci][m].is_zero() && !b[im][c].is_zero() {
                    x = &x - &(&coeffs[ci][m] * &b[im][c]);
                }
            }
            b[k][c] = x;
        }
    }
    for (ci, &k) in rest.iter().enumerate() {
        if coeffs[ci].iter().all(|c| c.is_zero()) {
            continue;
        }
        for &l in &rest {
            let mut x = t[k][l].clone();
            for (m, &im) in idx.iter().enumerate() {
                if !coeffs[ci][m].is_zero() && !t[im][l].is_zero() {
                    x = &x - &(&coeffs[ci][m] * &t[im][l]);
                }
            }
            t[k][l] = x;
        }
    }
    for &k in &rest {
        for &im in idx {
            t[k][im] = FElement::zero(p);
            t[im][k] = FElement::zero(p);
        }
    }
}

fn symbol_of_pieces(gram: &GramMatrix, pieces: &[JordanPiece]) -> Result<GenusSymbol> {
    let p = gram.p();
    let mut blocks = Vec::new();
    let mut k = 0;
    while k < pieces.len() {
        let scale = pieces[k].scale;
        let mut same = Vec::new();
        while k < pieces.len() && pieces[k].scale == scale {
            same.push(&pieces[k]);
            k += 1;
        }
        if scale.rem_euclid(2) == 1 {
            blocks.push(JordanBlock { scale, kind: BlockKind::Hyperbolic { planes: same.len() as u32 } });
        } else {
            let r = same.len() as i64;
            let mut det_unit = Rat::from_integer(1.into());
            for pc in &same {
                if pc.indices.len() != 1 {
                    return Err(Error::Consistency("even-scale plane left in splitting".into()));
                }
                let x = gram.entry(pc.indices[0], pc.indices[0]);
                det_unit *= &x.a / crate::arith::qpow(p, scale / 2);
            }
            debug_assert!(!det_unit.is_zero());
            let twist = legendre_int(&int(sign_pow(r * (r - 1) / 2) as i64), p);
            let sign = twist * crate::arith::legendre_rat(&det_unit, p);
            blocks.push(JordanBlock { scale, kind: BlockKind::Diagonal { rank: r as u32, sign } });
        }
    }
    GenusSymbol::from_blocks(blocks, p)
}

/// Fundamental invariants of a Gram matrix.
pub fn fundamental_invariants(g: &GramMatrix) -> Result<Vec<i64>> {
    Ok(jordan_decompose(g)?.symbol.invariants())
}

pub fn genus_from_gram(g: &GramMatrix) -> Result<GenusSymbol> {
    Ok(jordan_decompose(g)?.symbol)
}

/// `χ((-1)^{n(n-1)/2} det g)` computed from the determinant.
pub fn chi_from_gram(g: &GramMatrix) -> Result<i32> {
    let p = g.p();
    let det = g.det();
    if det.is_zero() {
        return Err(Error::Degenerate);
    }
    let n = g.dim() as i64;
    let v = crate::arith::vp(&det.a, p).expect("nonzero");
    let x = FElement::from_rat(det.a.clone() * Rat::from_integer(sign_pow(n * (n - 1) / 2).into()), p);
    let lm = legendre_minus_one(p);
    Ok(x.unit_legendre() * if v.rem_euclid(2) == 1 { lm } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::super::genus::enumerate_symbols;
    use super::*;

    #[test]
    fn symbol_roundtrip_through_gram() {
        for p in [3, 5] {
            for r in 1..=4 {
                for s in enumerate_symbols(r, -2, 3) {
                    let g = s.gram(p);
                    let d = jordan_decompose(&g).unwrap();
                    assert_eq!(d.symbol, s, "p={p}");
                    assert_eq!(chi_from_gram(&g).unwrap(), s.chi(p), "{s}");
                }
            }
        }
    }

    #[test]
    fn mixed_basis_is_recovered() {
        let p = 3;
        let f = |a: i64, b: i64| FElement::new(Rat::from_integer(a.into()), Rat::from_integer(b.into()), p);
        // hermitian, not in normal form
        let g = GramMatrix::new(
            vec![
                vec![f(3, 0), f(1, 1), f(0, 1)],
                vec![f(1, -1), f(6, 0), f(2, 0)],
                vec![f(0, -1), f(2, 0), f(9, 0)],
            ],
            p,
        )
        .unwrap();
        let d = jordan_decompose(&g).unwrap();
        assert_eq!(d.symbol.invariants(), g.invariants_from_minors().unwrap());
        assert_eq!(d.gram, g.restrict(&d.basis));
        assert_eq!(chi_from_gram(&g).unwrap(), d.symbol.chi(p));
        assert_eq!(g.det(), d.gram.det());
    }

    #[test]
    fn degenerate_rejected() {
        let p = 3;
        let g = GramMatrix::diagonal(&[FElement::one(p), FElement::zero(p)], p);
        assert_eq!(jordan_decompose(&g).unwrap_err(), Error::Degenerate);
    }
}
