//! Matrix sampling and the smallest-singular-value pipeline.
//!
//! Each sample fills an M x N matrix with independent complex Gaussians
//! (real and imaginary parts of variance 1/2, so the matrix density is
//! proportional to exp(-Tr X^H X)), reduces it to real bidiagonal form by
//! complex Householder reflections from both sides, and extracts the
//! smallest singular value by bisection on the Golub-Kahan tridiagonal.
//! lambda_min is the square of that singular value; the Gram matrix
//! W = X^H X is never formed, which keeps the condition number at kappa(X)
//! rather than kappa(X)^2.
//!
//! Determinism: sample i uses an RNG derived from (seed, i) alone (one
//! ChaCha12 stream per sample index), so the value set is independent of
//! how samples are partitioned across worker threads. The normal
//! generator below is part of that contract: changing it would change the
//! sample map and must bump the dump RNG scheme id.

use std::sync::OnceLock;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::{McError, SamplerConfig};
use crate::montecarlo::ecdf::EmpiricalCDF;

/// Bisection stops when the bracket is this narrow relative to its top;
/// the squared midpoint then carries about twice this relative error,
/// comfortably inside the 1e-10 accuracy contract.
const BISECT_REL_TOL: f64 = 5e-12;
/// Far beyond the ~60 halvings any admissible matrix needs.
const BISECT_MAX_ITERS: usize = 240;

/// Rightmost layer edge of the 256-layer ziggurat for exp(-x^2/2).
const ZIG_R: f64 = 3.654152885361008772;
/// Common layer area; R and V together make the 256 layers plus the tail
/// tile the area under exp(-x^2/2) exactly.
const ZIG_V: f64 = 4.92867323399e-3;
const ZIG_SCALE: f64 = 1.0 / (1u64 << 53) as f64;

/// Layer edges x (descending, x[0] is the virtual base width V/f(R),
/// x[256] = 0) and heights y = exp(-x^2/2).
struct ZigTables {
    x: [f64; 257],
    y: [f64; 257],
}

fn zig_tables() -> &'static ZigTables {
    static TABLES: OnceLock<ZigTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let f = |t: f64| (-0.5 * t * t).exp();
        let mut x = [0.0f64; 257];
        x[0] = ZIG_V / f(ZIG_R);
        x[1] = ZIG_R;
        for k in 1..255 {
            let height = f(x[k]) + ZIG_V / x[k];
            x[k + 1] = (-2.0 * height.ln()).sqrt();
        }
        x[256] = 0.0;
        let mut y = [0.0f64; 257];
        for k in 0..257 {
            y[k] = f(x[k]);
        }
        y[0] = 1.0;
        ZigTables { x, y }
    })
}

/// Buffered view of the ChaCha12 byte stream, read as little-endian u64.
/// A block RNG emits its words in order as little-endian bytes, so this
/// yields exactly the `next_u64` sequence while skipping the per-call
/// dispatch. Each sample owns its stream, so the unread tail of the last
/// refill is simply discarded.
struct U64Stream<'a> {
    rng: &'a mut ChaCha12Rng,
    buf: [u8; 4096],
    pos: usize,
}

impl<'a> U64Stream<'a> {
    fn new(rng: &'a mut ChaCha12Rng) -> Self {
        U64Stream { rng, buf: [0u8; 4096], pos: 4096 }
    }

    #[inline]
    fn next(&mut self) -> u64 {
        if self.pos == self.buf.len() {
            self.rng.fill_bytes(&mut self.buf);
            self.pos = 0;
        }
        let bits = u64::from_le_bytes(
            self.buf[self.pos..self.pos + 8].try_into().expect("8-byte slice"),
        );
        self.pos += 8;
        bits
    }

    #[inline]
    fn unit_uniform(&mut self) -> f64 {
        // Strictly positive so callers may take logarithms.
        loop {
            let u = (self.next() >> 11) as f64 * ZIG_SCALE;
            if u > 0.0 {
                return u;
            }
        }
    }
}

/// One standard normal by the 256-layer ziggurat: a single u64 supplies
/// the layer index (8 bits), the sign (1 bit), and a 53-bit uniform, and
/// all but ~2% of draws accept immediately.
#[inline]
fn draw_normal(stream: &mut U64Stream<'_>, t: &ZigTables) -> f64 {
    loop {
        let bits = stream.next();
        let k = (bits & 0xFF) as usize;
        let sign = if bits & 0x100 == 0 { 1.0 } else { -1.0 };
        let u = (bits >> 11) as f64 * ZIG_SCALE;
        let x = u * t.x[k];
        if x < t.x[k + 1] {
            return sign * x;
        }
        if k == 0 {
            // Exact sample from the tail beyond R.
            loop {
                let e1 = -stream.unit_uniform().ln() / ZIG_R;
                let e2 = -stream.unit_uniform().ln();
                if 2.0 * e2 >= e1 * e1 {
                    return sign * (ZIG_R + e1);
                }
            }
        }
        // Wedge between the layer rectangle and the density.
        let u2 = (stream.next() >> 11) as f64 * ZIG_SCALE;
        let y = t.y[k] + u2 * (t.y[k + 1] - t.y[k]);
        if y < (-0.5 * x * x).exp() {
            return sign * x;
        }
    }
}

/// Reusable per-thread buffers. The matrix is stored column-major with
/// split real/imaginary planes so the reflector sweeps run over contiguous
/// f64 slices.
pub(crate) struct Workspace {
    pub(crate) xr: Vec<f64>,
    pub(crate) xi: Vec<f64>,
    vr: Vec<f64>,
    vi: Vec<f64>,
    wr: Vec<f64>,
    wi: Vec<f64>,
    /// Bidiagonal moduli interleaved as d0, e0, d1, e1, ..., d_{n-1}.
    band: Vec<f64>,
}

impl Workspace {
    pub(crate) fn new(m: usize, n: usize) -> Self {
        let longest = m.max(n);
        Workspace {
            xr: vec![0.0; m * n],
            xi: vec![0.0; m * n],
            vr: vec![0.0; longest],
            vi: vec![0.0; longest],
            wr: vec![0.0; longest],
            wi: vec![0.0; longest],
            band: vec![0.0; 2 * n - 1],
        }
    }
}

/// Fill the workspace matrix column by column; each complex entry uses two
/// consecutive normals, scaled to variance 1/2 per component.
pub(crate) fn fill_matrix(rng: &mut ChaCha12Rng, ws: &mut Workspace) {
    let tables = zig_tables();
    let mut stream = U64Stream::new(rng);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    for (re, im) in ws.xr.iter_mut().zip(ws.xi.iter_mut()) {
        *re = draw_normal(&mut stream, tables) * scale;
        *im = draw_normal(&mut stream, tables) * scale;
    }
}

/// Conjugate dot sum(conj(v) * x) over split planes, unrolled into four
/// independent accumulators combined in a fixed order: the value is
/// bit-reproducible while the dependency chain is a quarter as long.
#[inline]
fn conj_dot(vr: &[f64], vi: &[f64], xr: &[f64], xi: &[f64]) -> (f64, f64) {
    // Re-slicing to a common length lets the compiler drop per-access
    // bounds checks in the hot loops; same below.
    let len = vr.len();
    let (vi, xr, xi) = (&vi[..len], &xr[..len], &xi[..len]);
    let mut sr = [0.0f64; 4];
    let mut si = [0.0f64; 4];
    let mut q = 0;
    while q + 4 <= len {
        sr[0] += vr[q] * xr[q] + vi[q] * xi[q];
        si[0] += vr[q] * xi[q] - vi[q] * xr[q];
        sr[1] += vr[q + 1] * xr[q + 1] + vi[q + 1] * xi[q + 1];
        si[1] += vr[q + 1] * xi[q + 1] - vi[q + 1] * xr[q + 1];
        sr[2] += vr[q + 2] * xr[q + 2] + vi[q + 2] * xi[q + 2];
        si[2] += vr[q + 2] * xi[q + 2] - vi[q + 2] * xr[q + 2];
        sr[3] += vr[q + 3] * xr[q + 3] + vi[q + 3] * xi[q + 3];
        si[3] += vr[q + 3] * xi[q + 3] - vi[q + 3] * xr[q + 3];
        q += 4;
    }
    let mut tr = (sr[0] + sr[1]) + (sr[2] + sr[3]);
    let mut ti = (si[0] + si[1]) + (si[2] + si[3]);
    while q < len {
        tr += vr[q] * xr[q] + vi[q] * xi[q];
        ti += vr[q] * xi[q] - vi[q] * xr[q];
        q += 1;
    }
    (tr, ti)
}

/// Conjugate dots of one v against four columns in a single pass: the four
/// accumulator chains are independent, and v is loaded once per element
/// instead of four times.
#[inline]
fn conj_dot4(
    vr: &[f64],
    vi: &[f64],
    c: [(&[f64], &[f64]); 4],
) -> [(f64, f64); 4] {
    let len = vr.len();
    let [(x0r, x0i), (x1r, x1i), (x2r, x2i), (x3r, x3i)] = c;
    let vi = &vi[..len];
    let (x0r, x0i) = (&x0r[..len], &x0i[..len]);
    let (x1r, x1i) = (&x1r[..len], &x1i[..len]);
    let (x2r, x2i) = (&x2r[..len], &x2i[..len]);
    let (x3r, x3i) = (&x3r[..len], &x3i[..len]);
    let mut s = [(0.0f64, 0.0f64); 4];
    for q in 0..len {
        let a = vr[q];
        let b = vi[q];
        s[0].0 += a * x0r[q] + b * x0i[q];
        s[0].1 += a * x0i[q] - b * x0r[q];
        s[1].0 += a * x1r[q] + b * x1i[q];
        s[1].1 += a * x1i[q] - b * x1r[q];
        s[2].0 += a * x2r[q] + b * x2i[q];
        s[2].1 += a * x2i[q] - b * x2r[q];
        s[3].0 += a * x3r[q] + b * x3i[q];
        s[3].1 += a * x3i[q] - b * x3r[q];
    }
    s
}

/// Rank-one update of four columns, x_j -= v * f_j, in a single pass.
#[inline]
fn update4(
    vr: &[f64],
    vi: &[f64],
    f: [(f64, f64); 4],
    c: [(&mut [f64], &mut [f64]); 4],
) {
    let len = vr.len();
    let [(x0r, x0i), (x1r, x1i), (x2r, x2i), (x3r, x3i)] = c;
    let vi = &vi[..len];
    let (x0r, x0i) = (&mut x0r[..len], &mut x0i[..len]);
    let (x1r, x1i) = (&mut x1r[..len], &mut x1i[..len]);
    let (x2r, x2i) = (&mut x2r[..len], &mut x2i[..len]);
    let (x3r, x3i) = (&mut x3r[..len], &mut x3i[..len]);
    let [(f0r, f0i), (f1r, f1i), (f2r, f2i), (f3r, f3i)] = f;
    for q in 0..len {
        let a = vr[q];
        let b = vi[q];
        x0r[q] -= a * f0r - b * f0i;
        x0i[q] -= a * f0i + b * f0r;
        x1r[q] -= a * f1r - b * f1i;
        x1i[q] -= a * f1i + b * f1r;
        x2r[q] -= a * f2r - b * f2i;
        x2i[q] -= a * f2i + b * f2r;
        x3r[q] -= a * f3r - b * f3i;
        x3i[q] -= a * f3i + b * f3r;
    }
}

/// Accumulate w += sum_t x_t * u_t over four columns in a single pass, so
/// the read-modify-write traffic on w is paid once per four columns.
#[inline]
fn accumulate4(
    wr: &mut [f64],
    wi: &mut [f64],
    u: [(f64, f64); 4],
    c: [(&[f64], &[f64]); 4],
) {
    let len = wr.len();
    let [(x0r, x0i), (x1r, x1i), (x2r, x2i), (x3r, x3i)] = c;
    let wi = &mut wi[..len];
    let (x0r, x0i) = (&x0r[..len], &x0i[..len]);
    let (x1r, x1i) = (&x1r[..len], &x1i[..len]);
    let (x2r, x2i) = (&x2r[..len], &x2i[..len]);
    let (x3r, x3i) = (&x3r[..len], &x3i[..len]);
    let [(u0r, u0i), (u1r, u1i), (u2r, u2i), (u3r, u3i)] = u;
    for q in 0..len {
        let acc_r = (x0r[q] * u0r - x0i[q] * u0i) + (x1r[q] * u1r - x1i[q] * u1i);
        let acc_r2 = (x2r[q] * u2r - x2i[q] * u2i) + (x3r[q] * u3r - x3i[q] * u3i);
        let acc_i = (x0r[q] * u0i + x0i[q] * u0r) + (x1r[q] * u1i + x1i[q] * u1r);
        let acc_i2 = (x2r[q] * u2i + x2i[q] * u2r) + (x3r[q] * u3i + x3i[q] * u3r);
        wr[q] += acc_r + acc_r2;
        wi[q] += acc_i + acc_i2;
    }
}

/// Update four columns as x_t -= w * conj(u_t) in a single pass over w.
#[inline]
fn rank_update4(
    wr: &[f64],
    wi: &[f64],
    u: [(f64, f64); 4],
    c: [(&mut [f64], &mut [f64]); 4],
) {
    let len = wr.len();
    let [(x0r, x0i), (x1r, x1i), (x2r, x2i), (x3r, x3i)] = c;
    let wi = &wi[..len];
    let (x0r, x0i) = (&mut x0r[..len], &mut x0i[..len]);
    let (x1r, x1i) = (&mut x1r[..len], &mut x1i[..len]);
    let (x2r, x2i) = (&mut x2r[..len], &mut x2i[..len]);
    let (x3r, x3i) = (&mut x3r[..len], &mut x3i[..len]);
    let [(u0r, u0i), (u1r, u1i), (u2r, u2i), (u3r, u3i)] = u;
    for q in 0..len {
        let a = wr[q];
        let b = wi[q];
        x0r[q] -= a * u0r - b * u0i;
        x0i[q] -= a * u0i + b * u0r;
        x1r[q] -= a * u1r - b * u1i;
        x1i[q] -= a * u1i + b * u1r;
        x2r[q] -= a * u2r - b * u2i;
        x2i[q] -= a * u2i + b * u2r;
        x3r[q] -= a * u3r - b * u3i;
        x3i[q] -= a * u3i + b * u3r;
    }
}

/// Squared Euclidean norm over split planes, same unrolling scheme as
/// [`conj_dot`].
#[inline]
fn norm_sq(xr: &[f64], xi: &[f64]) -> f64 {
    let len = xr.len();
    let xi = &xi[..len];
    let mut s = [0.0f64; 4];
    let mut q = 0;
    while q + 4 <= len {
        s[0] += xr[q] * xr[q] + xi[q] * xi[q];
        s[1] += xr[q + 1] * xr[q + 1] + xi[q + 1] * xi[q + 1];
        s[2] += xr[q + 2] * xr[q + 2] + xi[q + 2] * xi[q + 2];
        s[3] += xr[q + 3] * xr[q + 3] + xi[q + 3] * xi[q + 3];
        q += 4;
    }
    let mut total = (s[0] + s[1]) + (s[2] + s[3]);
    while q < len {
        total += xr[q] * xr[q] + xi[q] * xi[q];
        q += 1;
    }
    total
}

/// Split rows `first..m` of four adjacent columns starting at column
/// offset `base` out of one column-major plane.
#[inline]
fn four_cols_mut(
    plane: &mut [f64],
    base: usize,
    first: usize,
    m: usize,
) -> [&mut [f64]; 4] {
    let (c0, rest) = plane[base + first..base + 4 * m].split_at_mut(m - first);
    let (c1, rest) = rest.split_at_mut(m);
    let (c2, c3) = rest.split_at_mut(m);
    [c0, &mut c1[first..], &mut c2[first..], &mut c3[first..]]
}

/// Householder bidiagonalization, recording only the moduli of the
/// bidiagonal entries (diagonal unitary rescalings preserve singular
/// values, so the moduli carry them all). Entries that later steps never
/// read are left stale instead of being zeroed. Reflectors are stored
/// pre-scaled by sqrt(tau), so H = I - v v^H without a separate scale, and
/// trailing columns are processed four at a time for instruction-level
/// parallelism.
fn bidiagonalize(ws: &mut Workspace, m: usize, n: usize) {
    let Workspace { xr, xi, vr, vi, wr, wi, band } = ws;
    for k in 0..n {
        // Left reflector: column k, rows k..m, onto the diagonal.
        let ck = k * m;
        let norm = norm_sq(&xr[ck + k..ck + m], &xi[ck + k..ck + m]).sqrt();
        band[2 * k] = norm;
        if norm > 0.0 && k + 1 < n {
            let ar = xr[ck + k];
            let ai = xi[ck + k];
            let r0 = (ar * ar + ai * ai).sqrt();
            let (pr, pi) = if r0 > 0.0 { (ar / r0, ai / r0) } else { (1.0, 0.0) };
            // |v|^2 = 2 norm (norm + r0), so sqrt(tau) v has norm sqrt(2)
            // and the reflector is exactly I - v v^H.
            let rt = 1.0 / (norm * (norm + r0)).sqrt();
            for q in k..m {
                vr[q] = rt * xr[ck + q];
                vi[q] = rt * xi[ck + q];
            }
            vr[k] += rt * pr * norm;
            vi[k] += rt * pi * norm;
            let (vhr, vhi) = (&vr[k..m], &vi[k..m]);
            let mut j = k + 1;
            while j + 4 <= n {
                let cj = j * m;
                let f = conj_dot4(
                    vhr,
                    vhi,
                    [
                        (&xr[cj + k..cj + m], &xi[cj + k..cj + m]),
                        (&xr[cj + m + k..cj + 2 * m], &xi[cj + m + k..cj + 2 * m]),
                        (&xr[cj + 2 * m + k..cj + 3 * m], &xi[cj + 2 * m + k..cj + 3 * m]),
                        (&xr[cj + 3 * m + k..cj + 4 * m], &xi[cj + 3 * m + k..cj + 4 * m]),
                    ],
                );
                let [c0r, c1r, c2r, c3r] = four_cols_mut(xr, cj, k, m);
                let [c0i, c1i, c2i, c3i] = four_cols_mut(xi, cj, k, m);
                update4(vhr, vhi, f, [(c0r, c0i), (c1r, c1i), (c2r, c2i), (c3r, c3i)]);
                j += 4;
            }
            while j < n {
                let cj = j * m;
                let (sr, si) = conj_dot(vhr, vhi, &xr[cj + k..cj + m], &xi[cj + k..cj + m]);
                let cr = &mut xr[cj + k..cj + m];
                let ci = &mut xi[cj + k..cj + m];
                for (((r, i), &a), &b) in cr.iter_mut().zip(ci.iter_mut()).zip(vhr).zip(vhi) {
                    *r -= a * sr - b * si;
                    *i -= a * si + b * sr;
                }
                j += 1;
            }
        }

        // Right reflector: row k, columns k+1..n, onto the superdiagonal.
        if k + 1 < n {
            let mut nrm2 = 0.0;
            for j in k + 1..n {
                let idx = j * m + k;
                nrm2 += xr[idx] * xr[idx] + xi[idx] * xi[idx];
            }
            let norm = nrm2.sqrt();
            band[2 * k + 1] = norm;
            if norm > 0.0 {
                // Build the reflector from the conjugated row tail, then
                // update the remaining rows as X <- X - (X u) u^H with u
                // pre-scaled by sqrt(tau) as on the left.
                let i0 = (k + 1) * m + k;
                let ar = xr[i0];
                let ai = -xi[i0];
                let r0 = (ar * ar + ai * ai).sqrt();
                let (pr, pi) = if r0 > 0.0 { (ar / r0, ai / r0) } else { (1.0, 0.0) };
                let rt = 1.0 / (norm * (norm + r0)).sqrt();
                for (t, j) in (k + 1..n).enumerate() {
                    let idx = j * m + k;
                    vr[t] = rt * xr[idx];
                    vi[t] = -rt * xi[idx];
                }
                vr[0] += rt * pr * norm;
                vi[0] += rt * pi * norm;
                let rows = k + 1;
                let cols = n - k - 1;
                wr[rows..m].fill(0.0);
                wi[rows..m].fill(0.0);
                let mut t = 0;
                while t + 4 <= cols {
                    let cj = (rows + t) * m;
                    accumulate4(
                        &mut wr[rows..m],
                        &mut wi[rows..m],
                        [
                            (vr[t], vi[t]),
                            (vr[t + 1], vi[t + 1]),
                            (vr[t + 2], vi[t + 2]),
                            (vr[t + 3], vi[t + 3]),
                        ],
                        [
                            (&xr[cj + rows..cj + m], &xi[cj + rows..cj + m]),
                            (&xr[cj + m + rows..cj + 2 * m], &xi[cj + m + rows..cj + 2 * m]),
                            (
                                &xr[cj + 2 * m + rows..cj + 3 * m],
                                &xi[cj + 2 * m + rows..cj + 3 * m],
                            ),
                            (
                                &xr[cj + 3 * m + rows..cj + 4 * m],
                                &xi[cj + 3 * m + rows..cj + 4 * m],
                            ),
                        ],
                    );
                    t += 4;
                }
                while t < cols {
                    let cj = (rows + t) * m;
                    let ur = vr[t];
                    let ui = vi[t];
                    let cr = &xr[cj + rows..cj + m];
                    let ci = &xi[cj + rows..cj + m];
                    for (((w_r, w_i), &a), &b) in
                        wr[rows..m].iter_mut().zip(wi[rows..m].iter_mut()).zip(cr).zip(ci)
                    {
                        *w_r += a * ur - b * ui;
                        *w_i += a * ui + b * ur;
                    }
                    t += 1;
                }
                let mut t = 0;
                while t + 4 <= cols {
                    let cj = (rows + t) * m;
                    let [c0r, c1r, c2r, c3r] = four_cols_mut(xr, cj, rows, m);
                    let [c0i, c1i, c2i, c3i] = four_cols_mut(xi, cj, rows, m);
                    rank_update4(
                        &wr[rows..m],
                        &wi[rows..m],
                        [
                            (vr[t], -vi[t]),
                            (vr[t + 1], -vi[t + 1]),
                            (vr[t + 2], -vi[t + 2]),
                            (vr[t + 3], -vi[t + 3]),
                        ],
                        [(c0r, c0i), (c1r, c1i), (c2r, c2i), (c3r, c3i)],
                    );
                    t += 4;
                }
                while t < cols {
                    let cj = (rows + t) * m;
                    let ur = vr[t];
                    let ui = -vi[t];
                    let cr = &mut xr[cj + rows..cj + m];
                    let ci = &mut xi[cj + rows..cj + m];
                    for (((r, i), &a), &b) in
                        cr.iter_mut().zip(ci.iter_mut()).zip(&wr[rows..m]).zip(&wi[rows..m])
                    {
                        *r -= a * ur - b * ui;
                        *i -= a * ui + b * ur;
                    }
                    t += 1;
                }
            }
        }
    }
}

/// Negative-pivot count of the LDL^T factorization of T - s I, where T is
/// the Golub-Kahan tridiagonal (zero diagonal, off-diagonals `band`). T has
/// eigenvalues +-sigma_i, so for s > 0 the count exceeds n by the number of
/// singular values below s. Working on T instead of B^T B keeps tiny
/// singular values at full relative accuracy.
fn negcount(band: &[f64], s: f64, pivmin: f64) -> usize {
    let mut neg = 0usize;
    let mut p = -s;
    if p.abs() < pivmin {
        p = -pivmin;
    }
    if p < 0.0 {
        neg += 1;
    }
    for &c in band {
        p = -s - c * c / p;
        if p.abs() < pivmin {
            p = -pivmin;
        }
        if p < 0.0 {
            neg += 1;
        }
    }
    neg
}

/// Smallest singular value of the bidiagonal with moduli `band` by
/// bisection, to relative accuracy [`BISECT_REL_TOL`].
fn smallest_sigma(band: &[f64], n: usize) -> Result<f64, McError> {
    debug_assert_eq!(band.len(), 2 * n - 1);
    let mut hi = 0.0f64;
    for j in 0..=band.len() {
        let left = if j == 0 { 0.0 } else { band[j - 1] };
        let right = if j == band.len() { 0.0 } else { band[j] };
        hi = hi.max(left + right);
    }
    if hi == 0.0 {
        return Ok(0.0);
    }
    let max_sq = band.iter().fold(0.0f64, |acc, &b| acc.max(b * b));
    let pivmin = f64::MIN_POSITIVE * max_sq.max(1.0);
    hi *= 1.0 + 4.0 * f64::EPSILON;
    let mut lo = 0.0f64;
    for _ in 0..BISECT_MAX_ITERS {
        if hi - lo <= BISECT_REL_TOL * hi {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if negcount(band, mid, pivmin) > n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(McError::NonConvergence { size: n })
}

/// lambda_min of the current workspace matrix (destroys the matrix).
pub(crate) fn lambda_min(ws: &mut Workspace, m: usize, n: usize) -> Result<f64, McError> {
    bidiagonalize(ws, m, n);
    let sigma = smallest_sigma(&ws.band, n)?;
    Ok(sigma * sigma)
}

fn stream_worker(
    base: &ChaCha12Rng,
    start: usize,
    slab: &mut [f64],
    m: usize,
    n: usize,
) -> Result<(), McError> {
    let mut ws = Workspace::new(m, n);
    for (offset, slot) in slab.iter_mut().enumerate() {
        let mut rng = base.clone();
        rng.set_stream((start + offset) as u64);
        fill_matrix(&mut rng, &mut ws);
        *slot = lambda_min(&mut ws, m, n)?;
    }
    Ok(())
}

/// All lambda_min samples in sample-index order. The order, like the
/// values, depends only on (seed, index); `n_streams` merely partitions
/// the index range across threads.
pub fn draw_samples(cfg: &SamplerConfig) -> Result<Vec<f64>, McError> {
    cfg.validate()?;
    let total = cfg.n_samples as usize;
    let m = cfg.m as usize;
    let n = cfg.n as usize;
    let mut out = vec![0.0f64; total];
    let base = ChaCha12Rng::seed_from_u64(cfg.seed);
    let streams = (cfg.n_streams as usize).min(total);
    if streams <= 1 {
        stream_worker(&base, 0, &mut out, m, n)?;
    } else {
        let chunk = total.div_ceil(streams);
        let results: Vec<Result<(), McError>> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (ci, slab) in out.chunks_mut(chunk).enumerate() {
                let base = base.clone();
                handles.push(scope.spawn(move || stream_worker(&base, ci * chunk, slab, m, n)));
            }
            handles
                .into_iter()
                .map(|h| h.join().expect("stream worker panicked"))
                .collect()
        });
        for r in results {
            r?;
        }
    }
    Ok(out)
}

/// Sample the smallest-eigenvalue distribution into an empirical CDF.
pub fn sample_min_eig(cfg: &SamplerConfig) -> Result<EmpiricalCDF, McError> {
    EmpiricalCDF::from_samples(draw_samples(cfg)?)
}

#[doc(hidden)]
pub fn profile_phases(cfg: &SamplerConfig) -> Result<(f64, f64, f64), McError> {
    use std::time::Instant;
    cfg.validate()?;
    let m = cfg.m as usize;
    let n = cfg.n as usize;
    let total = cfg.n_samples as usize;
    let base = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut ws = Workspace::new(m, n);
    let (mut t_fill, mut t_bidiag, mut t_bisect) = (0.0, 0.0, 0.0);
    let mut sink = 0.0;
    for i in 0..total {
        let mut rng = base.clone();
        rng.set_stream(i as u64);
        let t0 = Instant::now();
        fill_matrix(&mut rng, &mut ws);
        let t1 = Instant::now();
        bidiagonalize(&mut ws, m, n);
        let t2 = Instant::now();
        let sigma = smallest_sigma(&ws.band, n)?;
        let t3 = Instant::now();
        sink += sigma;
        t_fill += (t1 - t0).as_secs_f64();
        t_bidiag += (t2 - t1).as_secs_f64();
        t_bisect += (t3 - t2).as_secs_f64();
    }
    assert!(sink > 0.0);
    let c = total as f64;
    Ok((t_fill / c, t_bidiag / c, t_bisect / c))
}
