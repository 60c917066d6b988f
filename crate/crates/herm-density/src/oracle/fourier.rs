//! Exact counting through characters of the value group.
//!
//! The Gram values `p^s (x_i, x_j)`, `i <= j`, of a map `L → M` are a sum of
//! contributions of the orthogonal blocks of `M`, so the number of maps
//! hitting the target `T` is
//! `|G|^{-1} Σ_t ψ_t(-T) Π_blocks S_b(t)` with `S_b(t) = Σ_x ψ_t(value_b(x))`.
//! Generic blocks are histogrammed by enumeration and transformed with a
//! radix-`p` DFT modulo word-sized primes (one run per prime, combined by
//! CRT). A block `[[0, g], [conj g, 0]]` has values bilinear in its two
//! coordinates, so its `S_b(t)` is `|O/π^e|^n` times the size of a kernel,
//! read off from elementary divisors.

use super::modular::{crt, dft_radix, mul_mod, ntt_primes, pow_mod, NttPrime};
use super::{CountSetup, CANDIDATE_LIMIT};
use crate::arith::Int;
use crate::error::{Error, Result};
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

/// Largest value group handled in memory.
const GROUP_LIMIT: u64 = 1 << 26;

/// Cyclic decomposition of the group of possible Gram values.
struct Layout {
    p: u64,
    big_d: u32,
    /// `p`-adic valuation shared by all diagonal values.
    v: u32,
    /// `π`-adic valuation shared by all off-diagonal values.
    w: u32,
    exps: Vec<u32>,
    strides: Vec<usize>,
    size: usize,
    emax: u32,
    /// Pairs `(i, j)`, `i <= j`, with the index of their first component.
    pairs: Vec<(usize, usize, usize)>,
}

impl Layout {
    fn new(setup: &CountSetup) -> Result<Self> {
        let mut v = u32::MAX;
        let mut w = u32::MAX;
        for (k, row) in setup.vals.iter().enumerate() {
            for (l, val) in row.iter().enumerate() {
                let Some(val) = *val else { continue };
                let val = val as u32;
                w = w.min(val);
                v = v.min(if k == l { val / 2 } else { val.div_ceil(2) });
            }
        }
        let big_d = setup.d + setup.s;
        let (v, w) = (v.min(big_d), w.min(2 * big_d));
        let mut exps = Vec::new();
        let mut pairs = Vec::new();
        for i in 0..setup.n {
            for j in i..setup.n {
                pairs.push((i, j, exps.len()));
                if i == j {
                    exps.push(big_d - v);
                } else {
                    let r = 2 * big_d - w;
                    exps.push(r.div_ceil(2));
                    exps.push(r / 2);
                }
            }
        }
        let total: u32 = exps.iter().sum();
        let size = setup.p.checked_pow(total).filter(|&x| x <= GROUP_LIMIT).ok_or(Error::Budget {
            needed: format!("value group of order {}^{}", setup.p, total),
            limit: GROUP_LIMIT.to_string(),
        })? as usize;
        let mut strides = vec![1usize; exps.len()];
        for c in (0..exps.len().saturating_sub(1)).rev() {
            strides[c] = strides[c + 1] * setup.p.pow(exps[c + 1]) as usize;
        }
        let emax = exps.iter().copied().max().unwrap_or(0);
        Ok(Layout { p: setup.p, big_d, v, w, exps, strides, size, emax, pairs })
    }

    fn div_p(&self, x: u64, k: u32) -> Option<u64> {
        if k >= self.big_d {
            return Some(0);
        }
        let pk = self.p.pow(k);
        (x % pk == 0).then_some(x / pk)
    }

    /// Components of one Gram value, or `None` if it lies outside the group.
    fn encode_pair(&self, diag: bool, val: (u64, u64), out: &mut [u64], first: usize) -> Option<()> {
        let (a, b) = val;
        if diag {
            if b != 0 {
                return None;
            }
            out[first] = self.div_p(a, self.v)? % self.p.pow(self.exps[first]);
        } else {
            let u = self.w / 2;
            let (x, y) = if self.w % 2 == 0 {
                (self.div_p(a, u)?, self.div_p(b, u)?)
            } else {
                (self.div_p(b, u)?, self.div_p(a, u + 1)?)
            };
            out[first] = x % self.p.pow(self.exps[first]);
            out[first + 1] = y % self.p.pow(self.exps[first + 1]);
        }
        Some(())
    }

    fn encode(&self, vals: &[(u64, u64)]) -> Option<Vec<u64>> {
        let mut out = vec![0u64; self.exps.len()];
        for (pi, &(i, j, first)) in self.pairs.iter().enumerate() {
            self.encode_pair(i == j, vals[pi], &mut out, first)?;
        }
        Some(out)
    }

    fn index(&self, comps: &[u64]) -> usize {
        comps.iter().zip(&self.strides).map(|(&c, &s)| c as usize * s).sum()
    }

    fn decode(&self, mut idx: usize, out: &mut [u64]) {
        for c in 0..self.exps.len() {
            out[c] = (idx / self.strides[c]) as u64;
            idx %= self.strides[c];
        }
    }

    /// `<t, g>` in `Z/p^{emax}`.
    fn pairing(&self, t: &[u64], g: &[u64]) -> u64 {
        let pe = self.p.pow(self.emax);
        t.iter()
            .zip(g)
            .zip(&self.exps)
            .fold(0u64, |acc, ((&x, &y), &e)| (acc + (x * y % pe) * self.p.pow(self.emax - e)) % pe)
    }
}

/// Connected components of the nonzero pattern of the target Gram.
fn blocks(setup: &CountSetup) -> Vec<Vec<usize>> {
    let m = setup.m;
    let mut seen = vec![false; m];
    let mut out = Vec::new();
    for start in 0..m {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < comp.len() {
            let k = comp[head];
            head += 1;
            for l in 0..m {
                if !seen[l] && !setup.zero_pattern[k][l] {
                    seen[l] = true;
                    comp.push(l);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn is_kernel_block(setup: &CountSetup, idx: &[usize]) -> bool {
    idx.len() == 2 && setup.zero_pattern[idx[0]][idx[0]] && setup.zero_pattern[idx[1]][idx[1]]
}

fn pair_values(setup: &CountSetup, layout: &Layout, idx: &[usize], x: &[Vec<(u64, u64)>]) -> Vec<(u64, u64)> {
    layout.pairs.iter().map(|&(i, j, _)| setup.pair_on(idx, &x[i], &x[j])).collect()
}

/// Histogram of encoded values over all `x ∈ (O/π^e)^{|idx| × n}`.
fn histogram(setup: &CountSetup, layout: &Layout, idx: &[usize]) -> Result<Vec<u64>> {
    let b = idx.len();
    let per = setup.coord_size();
    let total = per
        .checked_pow((b * setup.n) as u32)
        .filter(|&x| x <= CANDIDATE_LIMIT)
        .ok_or_else(|| Error::Budget { needed: format!("{per}^{}", b * setup.n), limit: CANDIDATE_LIMIT.to_string() })?;
    let hist: Vec<AtomicU64> = (0..layout.size).map(|_| AtomicU64::new(0)).collect();
    (0..total).into_par_iter().try_for_each(|mut code| {
        let x: Vec<Vec<(u64, u64)>> = (0..setup.n)
            .map(|_| {
                (0..b)
                    .map(|_| {
                        let c = setup.coord(code % per);
                        code /= per;
                        c
                    })
                    .collect()
            })
            .collect();
        let vals = pair_values(setup, layout, idx, &x);
        let comps = layout
            .encode(&vals)
            .ok_or_else(|| Error::Consistency("block value outside the value group".into()))?;
        hist[layout.index(&comps)].fetch_add(1, Ordering::Relaxed);
        Ok(())
    })?;
    Ok(hist.into_iter().map(|a| a.into_inner()).collect())
}

/// Sum of `(E - v_i)` over the elementary divisors `p^{v_i}` of `k` over `Z/p^E`,
/// i.e. `log_p` of the size of its image.
fn image_log(mut k: Vec<Vec<u64>>, p: u64, e: u32) -> u32 {
    let pe = p.pow(e);
    let val = |x: u64| -> u32 {
        if x % pe == 0 {
            return e;
        }
        let (mut x, mut v) = (x, 0);
        while x % p == 0 {
            x /= p;
            v += 1;
        }
        v
    };
    let mut total = 0;
    while !k.is_empty() && !k[0].is_empty() {
        let mut best = (e, 0, 0);
        for (r, row) in k.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                let v = val(x);
                if v < best.0 {
                    best = (v, r, c);
                }
            }
        }
        let (v, r0, c0) = best;
        if v == e {
            break;
        }
        total += e - v;
        let pv = p.pow(v);
        let unit = k[r0][c0] / pv;
        // the unit group of Z/p^E has order p^{E-1}(p-1)
        let inv = pow_mod(unit, pe / p * (p - 1) - 1, pe);
        let prow = k[r0].clone();
        for (r, row) in k.iter_mut().enumerate() {
            if r == r0 {
                continue;
            }
            let f = mul_mod(row[c0] / pv, inv, pe);
            for (c, x) in row.iter_mut().enumerate() {
                *x = (*x + pe - mul_mod(f, prow[c], pe)) % pe;
            }
        }
        // remaining entries of the pivot row are multiples of p^v and drop out with it
        k.remove(r0);
        for row in k.iter_mut() {
            row.remove(c0);
        }
    }
    total
}

/// `log_p S_b(t)` for a block `[[0, g], [conj g, 0]]`, for every character `t`.
fn kernel_exponents(setup: &CountSetup, layout: &Layout, idx: &[usize]) -> Result<Vec<u32>> {
    let n = setup.n;
    let unit = |slot: usize, which: usize| -> Vec<(u64, u64)> {
        let mut v = vec![(0u64, 0u64); n];
        v[slot] = if which == 0 { (1, 0) } else { (0, 1) };
        v
    };
    // enc[a][g]: encoded values for alpha = a-th unit coordinate, beta = g-th generator
    let gens: Vec<Vec<(u64, u64)>> = (0..n).flat_map(|s| [unit(s, 0), unit(s, 1)]).collect();
    let mut enc = vec![vec![Vec::new(); 2 * n]; 2 * n];
    for (a, alpha) in gens.iter().enumerate() {
        for (g, beta) in gens.iter().enumerate() {
            let x: Vec<Vec<(u64, u64)>> = (0..n).map(|i| vec![alpha[i], beta[i]]).collect();
            let vals = pair_values(setup, layout, idx, &x);
            enc[a][g] = layout
                .encode(&vals)
                .ok_or_else(|| Error::Consistency("hyperbolic block value outside the value group".into()))?;
        }
    }
    let e = setup.e;
    let base = 2 * e * n as u32;
    let emax = layout.emax;
    Ok((0..layout.size)
        .into_par_iter()
        .map_init(
            || vec![0u64; layout.exps.len()],
            |t, ti| {
                layout.decode(ti, t);
                let k: Vec<Vec<u64>> =
                    (0..2 * n).map(|g| (0..2 * n).map(|a| layout.pairing(t, &enc[a][g])).collect()).collect();
                base - if emax == 0 { 0 } else { image_log(k, layout.p, emax) }
            },
        )
        .collect())
}

/// In-place multidimensional DFT over all components.
fn transform(layout: &Layout, data: &mut [u64], prime: &NttPrime) {
    let m = prime.modulus;
    for (c, &ec) in layout.exps.iter().enumerate() {
        if ec == 0 {
            continue;
        }
        let len = layout.p.pow(ec) as usize;
        let omega = pow_mod(prime.root, prime.order / len as u64, m);
        let st = layout.strides[c];
        data.par_chunks_mut(len * st).for_each(|chunk| {
            let mut buf = vec![0u64; len];
            for lo in 0..st {
                for g in 0..len {
                    buf[g] = chunk[g * st + lo];
                }
                dft_radix(&mut buf, omega, layout.p as usize, m);
                for g in 0..len {
                    chunk[g * st + lo] = buf[g];
                }
            }
        });
    }
}

pub(crate) fn herm_count_fourier(setup: &CountSetup) -> Result<Int> {
    let Some(target) = &setup.target else { return Ok(Int::zero()) };
    if setup.n == 0 {
        return Ok(Int::from(1));
    }
    let layout = Layout::new(setup)?;
    let tvals: Vec<(u64, u64)> = layout.pairs.iter().map(|&(i, j, _)| target[i][j]).collect();
    let Some(tcomps) = layout.encode(&tvals) else { return Ok(Int::zero()) };

    // group identical blocks
    let mut kinds: BTreeMap<(bool, Vec<Vec<(u64, u64)>>), (Vec<usize>, u32)> = BTreeMap::new();
    for idx in blocks(setup) {
        let key_gram = idx.iter().map(|&k| idx.iter().map(|&l| setup.gram[k][l]).collect()).collect();
        let key = (is_kernel_block(setup, &idx), key_gram);
        kinds.entry(key).or_insert((idx, 0)).1 += 1;
    }
    let hist_kinds: Vec<_> = kinds.iter().filter(|(k, _)| !k.0).map(|(_, v)| v.clone()).collect();
    let kernel_kinds: Vec<_> = kinds.iter().filter(|(k, _)| k.0).map(|(_, v)| v.clone()).collect();

    let bound_bits = (setup.e as f64) * (setup.m * setup.n) as f64 * (setup.p as f64).log2();
    let nprimes = ((bound_bits + 2.0) / 61.0).ceil().max(1.0) as usize;
    let axis_work: u64 = layout.exps.iter().map(|&e| setup.p * e as u64).sum::<u64>().max(1);
    let work = layout.size as u64 * (axis_work * hist_kinds.len() as u64 * nprimes as u64 + 64 * kernel_kinds.len() as u64);
    if work > CANDIDATE_LIMIT {
        return Err(Error::Budget { needed: work.to_string(), limit: CANDIDATE_LIMIT.to_string() });
    }

    let hists: Vec<(Vec<u64>, u32)> =
        hist_kinds.iter().map(|(idx, mult)| Ok((histogram(setup, &layout, idx)?, *mult))).collect::<Result<_>>()?;
    let mut kexp = vec![0u32; layout.size];
    for (idx, mult) in &kernel_kinds {
        for (acc, x) in kexp.iter_mut().zip(kernel_exponents(setup, &layout, idx)?) {
            *acc += x * mult;
        }
    }

    let order = setup.p.pow(layout.emax);
    let primes = ntt_primes(order, setup.p, nprimes);
    let mut residues = Vec::with_capacity(primes.len());
    for prime in &primes {
        let m = prime.modulus;
        let mut prod: Vec<u64> = kexp.par_iter().map(|&x| pow_mod(setup.p, x as u64, m)).collect();
        for (h, mult) in &hists {
            let mut data: Vec<u64> = h.iter().map(|&x| x % m).collect();
            transform(&layout, &mut data, prime);
            prod.par_iter_mut().zip(data.par_iter()).for_each(|(acc, &x)| *acc = mul_mod(*acc, pow_mod(x, *mult as u64, m), m));
        }
        let powers: Vec<u64> = {
            let mut v = Vec::with_capacity(order as usize);
            let mut z = 1u64;
            for _ in 0..order {
                v.push(z);
                z = mul_mod(z, prime.root, m);
            }
            v
        };
        let sum = prod
            .par_iter()
            .enumerate()
            .map_init(
                || vec![0u64; layout.exps.len()],
                |t, (ti, &val)| {
                    layout.decode(ti, t);
                    let x = layout.pairing(t, &tcomps);
                    mul_mod(powers[((order - x) % order) as usize], val, m)
                },
            )
            .reduce(|| 0, |a, b| (a + b) % m);
        let inv_size = pow_mod(layout.size as u64 % m, m - 2, m);
        residues.push((mul_mod(sum, inv_size, m), m));
    }
    let (count, modulus) = crt(&residues);
    let bound = num_traits::pow(Int::from(setup.coord_size()), setup.m * setup.n);
    if count > bound || count.clone() * 2 > modulus {
        return Err(Error::Consistency(format!("character sum {count} exceeds the candidate bound")));
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::super::herm_count_enumerate;
    use super::*;
    use crate::hermitian_lattice::{GenusSymbol, GramMatrix};
    use crate::oracle::with_hyperbolic;
    use crate::q_combinatorics::QValue;

    fn gram(s: &str) -> GramMatrix {
        s.parse::<GenusSymbol>().unwrap().gram(3)
    }

    fn both(l: &GramMatrix, m: &GramMatrix, d: u32) -> (Int, Int) {
        let s = CountSetup::new(l, m, d, QValue::new(3).unwrap()).unwrap();
        (herm_count_fourier(&s).unwrap(), herm_count_enumerate(&s, false).unwrap())
    }

    #[test]
    fn fourier_matches_enumeration() {
        for (l, m, k, d) in [
            ("0^1+", "0^1+", 0, 2),
            ("0^1+", "0^1-", 0, 1),
            ("2^1+", "0^2+", 0, 2),
            ("0^2-", "0^2+", 0, 1),
            ("1H^1", "0^2+", 0, 1),
            ("0^1+", "0^1+", 1, 1),
            ("0^1-", "0^1+", 1, 1),
            ("2^1-", "0^1+", 1, 1),
        ] {
            let (f, e) = both(&gram(l), &with_hyperbolic(&gram(m), k), d);
            assert_eq!(f, e, "{l} -> {m} + H^{k} at d={d}");
        }
    }

    #[test]
    fn elementary_divisors() {
        // diag(1, 3, 0) over Z/27: image of size 27 * 9
        let k = vec![vec![1, 0, 0], vec![0, 3, 0], vec![0, 0, 0]];
        assert_eq!(image_log(k, 3, 3), 5);
        let k = vec![vec![3, 6], vec![6, 12]];
        assert_eq!(image_log(k, 3, 3), 2);
    }
}
