//! Matrix products from matrix triples: one round regardless of shape.

use crate::dealer::MatrixTriple;
use crate::engine::{RevealTicket, Session};
use crate::error::{Error, Result};
use crate::par::{self, ExecMode};
use crate::ring::Ring;
use crate::sharing::{PartyId, Scale, ShareVector, Shared};

use super::{check_mask, lockstep, product_scale, raw_sub, rescale_opened};

/// A shared row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedMatrix<R> {
    pub rows: usize,
    pub cols: usize,
    pub data: Shared<R>,
}

impl<R: Ring> SharedMatrix<R> {
    pub fn new(rows: usize, cols: usize, data: Shared<R>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} elements for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(SharedMatrix { rows, cols, data })
    }

    /// A column vector.
    pub fn column(data: Shared<R>) -> Self {
        SharedMatrix {
            rows: data.len(),
            cols: 1,
            data,
        }
    }

    pub fn frac_bits(&self) -> u32 {
        self.data.frac_bits()
    }
}

/// Row-major `c = a·b` for `(m, k, n)` shapes.
pub(crate) fn matmul_ring<R: Ring>(
    exec: ExecMode,
    a: &[R],
    b: &[R],
    (m, k, n): (usize, usize, usize),
) -> Vec<R> {
    let rows = par::map_range(exec, m, |i| {
        let mut row = vec![R::ZERO; n];
        for t in 0..k {
            let x = a[i * k + t];
            for (j, r) in row.iter_mut().enumerate() {
                *r += x * b[t * n + j];
            }
        }
        row
    });
    rows.concat()
}

pub struct PendingMatmul<R: Ring> {
    ticket: RevealTicket,
    dims: (usize, usize, usize),
    shifts: [u32; 2],
    triple: MatrixTriple<R>,
    scale: Scale,
}

fn dims_of<R: Ring>(x: &SharedMatrix<R>, y: &SharedMatrix<R>) -> Result<(usize, usize, usize)> {
    if x.cols != y.rows {
        return Err(Error::Shape(format!(
            "cannot multiply {}x{} by {}x{}",
            x.rows, x.cols, y.rows, y.cols
        )));
    }
    Ok((x.rows, x.cols, y.cols))
}

/// Queues the reveal of `X − A` and `Y − B` as one message.
pub fn begin_matmul<R: Ring>(
    s: &mut Session<R>,
    x: &SharedMatrix<R>,
    y: &SharedMatrix<R>,
    out_frac: u32,
) -> Result<PendingMatmul<R>> {
    let dims = dims_of(x, y)?;
    let shifts = [x.data.scale().deferred_bits, y.data.scale().deferred_bits];
    let triple = s.matrix_triple(dims, shifts)?;
    begin_with(s, x, y, triple, out_frac)
}

fn begin_with<R: Ring>(
    s: &mut Session<R>,
    x: &SharedMatrix<R>,
    y: &SharedMatrix<R>,
    triple: MatrixTriple<R>,
    out_frac: u32,
) -> Result<PendingMatmul<R>> {
    let dims = dims_of(x, y)?;
    if triple.dims != dims {
        return Err(Error::Shape(format!(
            "matrix triple for {:?} used on {:?}",
            triple.dims, dims
        )));
    }
    let scale = product_scale::<R>(&[x.frac_bits(), y.frac_bits()], out_frac)?;
    let shifts = [x.data.scale().deferred_bits, y.data.scale().deferred_bits];
    for (i, d) in shifts.iter().enumerate() {
        check_mask(triple.id, i, *d, triple.wide[i].is_some())?;
    }
    s.consume(triple.id)?;
    let e = raw_sub(&x.data, triple.reveal_mask(0));
    let f = raw_sub(&y.data, triple.reveal_mask(1));
    let ticket = s.defer_reveal(&Shared::concat(&[&e, &f])?)?;
    Ok(PendingMatmul {
        ticket,
        dims,
        shifts,
        triple,
        scale,
    })
}

impl<R: Ring> PendingMatmul<R> {
    /// `Z_p = [p = 0]·E·F + E·B_p + A_p·F + C_p`.
    pub fn finish(self, s: &mut Session<R>) -> Result<SharedMatrix<R>> {
        let opened = s.redeem(self.ticket)?;
        let (m, k, n) = self.dims;
        let e = rescale_opened(&opened[..m * k], self.shifts[0]);
        let f = rescale_opened(&opened[m * k..], self.shifts[1]);
        let exec = s.exec();
        let ef = matmul_ring(exec, &e, &f, self.dims);
        let t = &self.triple;
        let parts: Vec<ShareVector<R>> = (0..s.n_parties())
            .map(|p| {
                let eb = matmul_ring(exec, &e, &t.b.part(p).data, self.dims);
                let af = matmul_ring(exec, &t.a.part(p).data, &f, self.dims);
                let c = &t.c.part(p).data;
                let data = (0..m * n)
                    .map(|i| {
                        let base = eb[i] + af[i] + c[i];
                        if p == 0 {
                            base + ef[i]
                        } else {
                            base
                        }
                    })
                    .collect();
                ShareVector::new(PartyId(p), data, self.scale)
            })
            .collect();
        SharedMatrix::new(m, n, Shared::from_parts_unchecked(parts))
    }
}

fn out_frac<R: Ring>(x: &SharedMatrix<R>, y: &SharedMatrix<R>) -> u32 {
    x.frac_bits().max(y.frac_bits())
}

/// Shared matrix product: one round.
pub fn matmul<R: Ring>(
    s: &mut Session<R>,
    x: &SharedMatrix<R>,
    y: &SharedMatrix<R>,
) -> Result<SharedMatrix<R>> {
    Ok(matmul_batch(s, &[(x, y)])?.remove(0))
}

/// Matrix product with a caller-supplied triple (single use).
pub fn matmul_with<R: Ring>(
    s: &mut Session<R>,
    x: &SharedMatrix<R>,
    y: &SharedMatrix<R>,
    triple: MatrixTriple<R>,
) -> Result<SharedMatrix<R>> {
    let p = begin_with(s, x, y, triple, out_frac(x, y))?;
    s.flush()?;
    p.finish(s)
}

/// Independent matrix products in lockstep.
pub fn matmul_batch<R: Ring>(
    s: &mut Session<R>,
    pairs: &[(&SharedMatrix<R>, &SharedMatrix<R>)],
) -> Result<Vec<SharedMatrix<R>>> {
    lockstep(
        s,
        pairs,
        |s, (x, y)| begin_matmul(s, x, y, out_frac(x, y)),
        |s, p| p.finish(s),
    )
}
