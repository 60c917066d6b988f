//! Coset counts `μ⁺, μ⁰, μ⁻` of a full type lattice.
//!
//! With `L° = {x ∈ L : val(x) >= 0}` and `L°° = {x : val(x) > 0}`:
//! `μ⁺ = |(πL^♯)°°/L|`, `μ⁰ = |((πL^♯)° − (πL^♯)°°)/L|`,
//! `μ⁻ = |((L^♯)° − (πL^♯)°)/L|`, and `μ^{0,ν}` splits `μ⁰` by `χ((u,u)) = ν`.

use super::lattice::{dual_coset_representatives, AmbientLattice, NormalFrame};
use crate::arith::vp;
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub struct MuCounts {
    pub plus: u64,
    pub zero: u64,
    pub minus: u64,
    pub zero_plus: u64,
    pub zero_minus: u64,
}

pub fn mu_counts(l: &AmbientLattice) -> Result<MuCounts> {
    mu_counts_frame(&l.frame()?)
}

pub fn mu_counts_frame(frame: &NormalFrame) -> Result<MuCounts> {
    if frame.scales.iter().any(|&a| a < 1) {
        return Err(Error::NotFullType);
    }
    let p = frame.p;
    let mut m = MuCounts::default();
    for x in dual_coset_representatives(frame, 0)? {
        let in_pi_dual = x
            .iter()
            .zip(&frame.scales)
            .all(|(c, &a)| c.val_at_least(1 - a));
        let norm = frame.gram.pair(&x, &x);
        let v = vp(&norm.a, p);
        let nonneg = v.map_or(true, |v| v >= 0);
        let pos = v.map_or(true, |v| v > 0);
        if in_pi_dual {
            if pos {
                m.plus += 1;
            } else if nonneg {
                m.zero += 1;
                if norm.unit_legendre() == 1 {
                    m.zero_plus += 1;
                } else {
                    m.zero_minus += 1;
                }
            }
        } else if nonneg {
            m.minus += 1;
        }
    }
    Ok(m)
}
