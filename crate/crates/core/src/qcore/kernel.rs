//! Local operator kernels. Every output row is produced by exactly one task in
//! a fixed arithmetic order, so results do not depend on the thread count.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::matrix::ComplexMatrix;
use super::pauli::Pauli;
use crate::error::{Error, Result};

const PAR_DIM: usize = 128;

pub(crate) fn check_targets(n: usize, targets: &[usize], arity: usize) -> Result<()> {
    if targets.len() != arity {
        return Err(Error::Targets(format!("expected {arity} targets, got {}", targets.len())));
    }
    for (k, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::Targets(format!("target {t} out of range for {n} qubits")));
        }
        if targets[..k].contains(&t) {
            return Err(Error::Targets(format!("duplicate target {t}")));
        }
    }
    Ok(())
}

fn bitpos(n: usize, q: usize) -> usize {
    n - 1 - q
}

/// For each basis index: (index with target bits cleared, local sub-index).
/// Plus the scatter offset of each local sub-index.
struct Layout {
    base: Vec<usize>,
    sub: Vec<usize>,
    offs: Vec<usize>,
}

fn layout(n: usize, targets: &[usize]) -> Layout {
    let dim = 1usize << n;
    let k = targets.len();
    let offs: Vec<usize> = (0..1usize << k)
        .map(|j| {
            targets
                .iter()
                .enumerate()
                .map(|(b, &t)| ((j >> (k - 1 - b)) & 1) << bitpos(n, t))
                .sum()
        })
        .collect();
    let tmask: usize = targets.iter().map(|&t| 1usize << bitpos(n, t)).sum();
    let mut base = Vec::with_capacity(dim);
    let mut sub = Vec::with_capacity(dim);
    for idx in 0..dim {
        base.push(idx & !tmask);
        let mut s = 0;
        for &t in targets {
            s = (s << 1) | ((idx >> bitpos(n, t)) & 1);
        }
        sub.push(s);
    }
    Layout { base, sub, offs }
}

fn rows_mut(data: &mut [C64], dim: usize) -> impl IndexedParallelIterator<Item = (usize, &mut [C64])> {
    data.par_chunks_mut(dim).with_min_len(if dim >= PAR_DIM { 1 } else { dim }).enumerate()
}

/// (op on targets) · m
pub(crate) fn left(m: &ComplexMatrix, op: &ComplexMatrix, targets: &[usize]) -> ComplexMatrix {
    let n = m.qubits();
    let dim = m.dim();
    let lay = layout(n, targets);
    let src = m.data();
    let mut out = ComplexMatrix::zeros(dim);
    rows_mut(out.data_mut(), dim).for_each(|(r, row)| {
        let i = lay.sub[r];
        let b = lay.base[r];
        for (j, &off) in lay.offs.iter().enumerate() {
            let w = op[(i, j)];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            let srow = &src[(b + off) * dim..(b + off + 1) * dim];
            for (o, s) in row.iter_mut().zip(srow) {
                *o += w * s;
            }
        }
    });
    out
}

/// m · (op on targets)
pub(crate) fn right(m: &ComplexMatrix, op: &ComplexMatrix, targets: &[usize]) -> ComplexMatrix {
    let n = m.qubits();
    let dim = m.dim();
    let lay = layout(n, targets);
    let src = m.data();
    let mut out = ComplexMatrix::zeros(dim);
    rows_mut(out.data_mut(), dim).for_each(|(r, row)| {
        let srow = &src[r * dim..(r + 1) * dim];
        for (c, o) in row.iter_mut().enumerate() {
            let i = lay.sub[c];
            let b = lay.base[c];
            let mut acc = C64::new(0.0, 0.0);
            for (j, &off) in lay.offs.iter().enumerate() {
                acc += srow[b + off] * op[(j, i)];
            }
            *o = acc;
        }
    });
    out
}

/// U m U^dag on targets.
pub(crate) fn conjugate(m: &ComplexMatrix, u: &ComplexMatrix, targets: &[usize]) -> ComplexMatrix {
    right(&left(m, u, targets), &u.adjoint(), targets)
}

/// P m P^dag for a Pauli string on targets. Pauli conjugation is a signed
/// permutation of entries; global phases cancel.
pub(crate) fn conjugate_pauli(m: &ComplexMatrix, letters: &[Pauli], targets: &[usize]) -> ComplexMatrix {
    let n = m.qubits();
    let dim = m.dim();
    let mut xmask = 0usize;
    let mut zmask = 0usize;
    for (&p, &t) in letters.iter().zip(targets) {
        let bit = 1usize << bitpos(n, t);
        if p.flips() {
            xmask |= bit;
        }
        if p.signs() {
            zmask |= bit;
        }
    }
    let src = m.data();
    let sign = |b: usize| if (b & zmask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    let mut out = ComplexMatrix::zeros(dim);
    rows_mut(out.data_mut(), dim).for_each(|(r, row)| {
        let r0 = r ^ xmask;
        let sr = sign(r0);
        let srow = &src[r0 * dim..(r0 + 1) * dim];
        for (c, o) in row.iter_mut().enumerate() {
            let c0 = c ^ xmask;
            *o = srow[c0] * (sr * sign(c0));
        }
    });
    out
}

/// Partial trace keeping `keep` (ascending order of the original indices).
pub(crate) fn partial_trace(m: &ComplexMatrix, keep: &[usize]) -> ComplexMatrix {
    let n = m.qubits();
    let dim = m.dim();
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let scatter = |qs: &[usize], v: usize| -> usize {
        let k = qs.len();
        qs.iter().enumerate().map(|(b, &q)| ((v >> (k - 1 - b)) & 1) << bitpos(n, q)).sum()
    };
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    let kidx: Vec<usize> = (0..kd).map(|v| scatter(&keep, v)).collect();
    let tidx: Vec<usize> = (0..td).map(|v| scatter(&traced, v)).collect();
    let src = m.data();
    let mut out = ComplexMatrix::zeros(kd);
    rows_mut(out.data_mut(), kd).for_each(|(i, row)| {
        for (j, o) in row.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &tidx {
                acc += src[(kidx[i] | t) * dim + (kidx[j] | t)];
            }
            *o = acc;
        }
    });
    out
}
