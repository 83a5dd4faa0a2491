//! Dense layers, multilayer perceptrons and the complex activations.
//!
//! All layers compute `out = in W^T + b` over a batch of rows and, on the
//! backward pass, accumulate exact gradients of a real loss with respect to
//! every stored real scalar. For complex tensors the cotangent convention is
//! `g = dL/dRe + j dL/dIm`.

use rand::Rng;

use crate::linalg::{gemm, MatMut, MatRef};
use crate::params::{glorot_bound, BlockId, ModelParams};
use crate::tensor::{CMat, Kind, RMat, Tensor};

/// Real dense layer, weight `[out, in]`.
#[derive(Debug, Clone)]
pub struct Dense {
    pub weight: BlockId,
    pub bias: BlockId,
    pub fan_in: usize,
    pub fan_out: usize,
}

impl Dense {
    pub fn new(params: &mut ModelParams, name: &str, fan_in: usize, fan_out: usize, rng: &mut impl Rng) -> Self {
        let bound = glorot_bound(fan_in, fan_out);
        let weight = params.add_uniform(format!("{name}.weight"), &[fan_out, fan_in], Kind::Real, bound, rng);
        let bias = params.add(format!("{name}.bias"), Tensor::zeros(&[fan_out], Kind::Real));
        Self {
            weight,
            bias,
            fan_in,
            fan_out,
        }
    }

    pub fn forward(&self, params: &ModelParams, x: &RMat) -> RMat {
        assert_eq!(x.cols, self.fan_in, "dense input width");
        let w = params.value(self.weight);
        let b = params.value(self.bias);
        let mut y = RMat::zeros(x.rows, self.fan_out);
        for r in 0..x.rows {
            y.data[r * self.fan_out..(r + 1) * self.fan_out].copy_from_slice(b);
        }
        gemm(
            1.0,
            MatRef::dense(&x.data, x.rows, x.cols),
            MatRef::dense(w, self.fan_out, self.fan_in).t(),
            1.0,
            MatMut::dense(&mut y.data, x.rows, self.fan_out),
        );
        y
    }

    /// Accumulates weight/bias gradients; returns `dL/dx` when asked.
    pub fn backward(&self, params: &mut ModelParams, x: &RMat, g: &RMat, need_dx: bool) -> Option<RMat> {
        let (fi, fo) = (self.fan_in, self.fan_out);
        {
            let (_, dw) = params.split(self.weight);
            gemm(
                1.0,
                MatRef::dense(&g.data, g.rows, fo).t(),
                MatRef::dense(&x.data, x.rows, fi),
                1.0,
                MatMut::dense(dw, fo, fi),
            );
        }
        {
            let (_, db) = params.split(self.bias);
            for r in 0..g.rows {
                for (d, v) in db.iter_mut().zip(g.row(r)) {
                    *d += v;
                }
            }
        }
        need_dx.then(|| {
            let mut dx = RMat::zeros(g.rows, fi);
            gemm(
                1.0,
                MatRef::dense(&g.data, g.rows, fo),
                MatRef::dense(params.value(self.weight), fo, fi),
                0.0,
                MatMut::dense(&mut dx.data, g.rows, fi),
            );
            dx
        })
    }
}

/// Complex dense layer with interleaved `[out, in]` weight and `[out]` bias.
#[derive(Debug, Clone)]
pub struct ComplexDense {
    pub weight: BlockId,
    pub bias: BlockId,
    pub fan_in: usize,
    pub fan_out: usize,
}

fn re_view(w: &[f64], rows: usize, cols: usize) -> MatRef<'_> {
    MatRef {
        data: w,
        rows,
        cols,
        rs: 2 * cols,
        cs: 2,
    }
}

fn im_view(w: &[f64], rows: usize, cols: usize) -> MatRef<'_> {
    MatRef {
        data: &w[1..],
        rows,
        cols,
        rs: 2 * cols,
        cs: 2,
    }
}

impl ComplexDense {
    /// Real and imaginary parts uniform in `±scale * sqrt(6 / (in + out)) / sqrt(2)`.
    pub fn new(
        params: &mut ModelParams,
        name: &str,
        fan_in: usize,
        fan_out: usize,
        scale: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let bound = scale * glorot_bound(fan_in, fan_out) / std::f64::consts::SQRT_2;
        let weight = params.add_uniform(format!("{name}.weight"), &[fan_out, fan_in], Kind::Complex, bound, rng);
        let bias = params.add(format!("{name}.bias"), Tensor::zeros(&[fan_out], Kind::Complex));
        Self {
            weight,
            bias,
            fan_in,
            fan_out,
        }
    }

    pub fn forward(&self, params: &ModelParams, x: &CMat) -> CMat {
        assert_eq!(x.cols, self.fan_in, "complex dense input width");
        let (fi, fo, n) = (self.fan_in, self.fan_out, x.rows);
        let w = params.value(self.weight);
        let b = params.value(self.bias);
        let mut y = CMat::zeros(n, fo);
        for r in 0..n {
            for o in 0..fo {
                y.re[r * fo + o] = b[2 * o];
                y.im[r * fo + o] = b[2 * o + 1];
            }
        }
        let xr = MatRef::dense(&x.re, n, fi);
        let xi = MatRef::dense(&x.im, n, fi);
        let wr = re_view(w, fo, fi).t();
        let wi = im_view(w, fo, fi).t();
        gemm(1.0, xr, wr, 1.0, MatMut::dense(&mut y.re, n, fo));
        gemm(-1.0, xi, wi, 1.0, MatMut::dense(&mut y.re, n, fo));
        gemm(1.0, xr, wi, 1.0, MatMut::dense(&mut y.im, n, fo));
        gemm(1.0, xi, wr, 1.0, MatMut::dense(&mut y.im, n, fo));
        y
    }

    pub fn backward(&self, params: &mut ModelParams, x: &CMat, g: &CMat, need_dx: bool) -> Option<CMat> {
        let (fi, fo, n) = (self.fan_in, self.fan_out, x.rows);
        let xr = MatRef::dense(&x.re, n, fi);
        let xi = MatRef::dense(&x.im, n, fi);
        let gr = MatRef::dense(&g.re, n, fo);
        let gi = MatRef::dense(&g.im, n, fo);
        {
            let (_, dw) = params.split(self.weight);
            fn out(dw: &mut [f64], off: usize, fo: usize, fi: usize) -> MatMut<'_> {
                MatMut {
                    data: &mut dw[off..],
                    rows: fo,
                    cols: fi,
                    rs: 2 * fi,
                    cs: 2,
                }
            }
            // dWr = Gr^T Xr + Gi^T Xi ; dWi = Gi^T Xr - Gr^T Xi
            gemm(1.0, gr.t(), xr, 1.0, out(dw, 0, fo, fi));
            gemm(1.0, gi.t(), xi, 1.0, out(dw, 0, fo, fi));
            gemm(1.0, gi.t(), xr, 1.0, out(dw, 1, fo, fi));
            gemm(-1.0, gr.t(), xi, 1.0, out(dw, 1, fo, fi));
        }
        {
            let (_, db) = params.split(self.bias);
            for r in 0..n {
                for o in 0..fo {
                    db[2 * o] += g.re[r * fo + o];
                    db[2 * o + 1] += g.im[r * fo + o];
                }
            }
        }
        need_dx.then(|| {
            let w = params.value(self.weight);
            let wr = re_view(w, fo, fi);
            let wi = im_view(w, fo, fi);
            let mut dx = CMat::zeros(n, fi);
            // dXr = Gr Wr + Gi Wi ; dXi = Gi Wr - Gr Wi
            gemm(1.0, gr, wr, 0.0, MatMut::dense(&mut dx.re, n, fi));
            gemm(1.0, gi, wi, 1.0, MatMut::dense(&mut dx.re, n, fi));
            gemm(1.0, gi, wr, 0.0, MatMut::dense(&mut dx.im, n, fi));
            gemm(-1.0, gr, wi, 1.0, MatMut::dense(&mut dx.im, n, fi));
            dx
        })
    }
}

pub fn relu_in_place(v: &mut [f64]) {
    for x in v {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

/// `ReLU(Re z) + j ReLU(Im z)`.
pub fn relu_c(z: &CMat) -> CMat {
    let mut out = z.clone();
    relu_in_place(&mut out.re);
    relu_in_place(&mut out.im);
    out
}

/// Masks a cotangent by the positive parts of an activation output; the
/// subgradient at zero is zero.
pub fn relu_backward(activated: &[f64], g: &mut [f64]) {
    for (gv, &a) in g.iter_mut().zip(activated) {
        if a <= 0.0 {
            *gv = 0.0;
        }
    }
}

/// Softmax of the moduli of `z`.
pub fn softmax_c(z_re: &[f64], z_im: &[f64]) -> Vec<f64> {
    let m: Vec<f64> = z_re.iter().zip(z_im).map(|(a, b)| a.hypot(*b)).collect();
    softmax(&m)
}

pub fn softmax(m: &[f64]) -> Vec<f64> {
    let max = m.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = m.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Cotangent of `z` through `p = softmax(|z|)` given `dL/dp`; zero where `z = 0`.
pub fn softmax_c_backward(z_re: &[f64], z_im: &[f64], p: &[f64], dp: &[f64], dz_re: &mut [f64], dz_im: &mut [f64]) {
    let s: f64 = p.iter().zip(dp).map(|(a, b)| a * b).sum();
    for i in 0..p.len() {
        let dm = p[i] * (dp[i] - s);
        let r = z_re[i].hypot(z_im[i]);
        if r > 0.0 {
            dz_re[i] += dm * z_re[i] / r;
            dz_im[i] += dm * z_im[i] / r;
        }
    }
}

/// Three-layer (or deeper) real MLP with ReLU between layers.
#[derive(Debug, Clone)]
pub struct RealMlp {
    pub layers: Vec<Dense>,
}

/// Layer inputs recorded by a forward pass.
pub struct RealTrace {
    pub inputs: Vec<RMat>,
    pub output: RMat,
}

impl RealMlp {
    pub fn new(params: &mut ModelParams, name: &str, widths: &[usize], rng: &mut impl Rng) -> Self {
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(l, w)| Dense::new(params, &format!("{name}.{l}"), w[0], w[1], rng))
            .collect();
        Self { layers }
    }

    pub fn forward(&self, params: &ModelParams, x: &RMat) -> RealTrace {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut cur = x.clone();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut y = layer.forward(params, &cur);
            if l + 1 < self.layers.len() {
                relu_in_place(&mut y.data);
            }
            inputs.push(cur);
            cur = y;
        }
        RealTrace { inputs, output: cur }
    }

    pub fn backward(&self, params: &mut ModelParams, trace: &RealTrace, g: RMat) {
        let mut g = g;
        for l in (0..self.layers.len()).rev() {
            let dx = self.layers[l].backward(params, &trace.inputs[l], &g, l > 0);
            if let Some(mut dx) = dx {
                relu_backward(&trace.inputs[l].data, &mut dx.data);
                g = dx;
            }
        }
    }
}

/// Complex MLP with `ReLU_C` between layers.
#[derive(Debug, Clone)]
pub struct ComplexMlp {
    pub layers: Vec<ComplexDense>,
}

pub struct ComplexTrace {
    pub inputs: Vec<CMat>,
    pub output: CMat,
}

impl ComplexMlp {
    /// `final_scale` multiplies the initialisation bound of the last layer.
    pub fn new(params: &mut ModelParams, name: &str, widths: &[usize], final_scale: f64, rng: &mut impl Rng) -> Self {
        let n = widths.len() - 1;
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(l, w)| {
                let scale = if l + 1 == n { final_scale } else { 1.0 };
                ComplexDense::new(params, &format!("{name}.{l}"), w[0], w[1], scale, rng)
            })
            .collect();
        Self { layers }
    }

    pub fn forward(&self, params: &ModelParams, x: &CMat) -> ComplexTrace {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut cur = x.clone();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut y = layer.forward(params, &cur);
            if l + 1 < self.layers.len() {
                relu_in_place(&mut y.re);
                relu_in_place(&mut y.im);
            }
            inputs.push(cur);
            cur = y;
        }
        ComplexTrace { inputs, output: cur }
    }

    /// Returns `dL/dx` when `need_dx`.
    pub fn backward(&self, params: &mut ModelParams, trace: &ComplexTrace, g: CMat, need_dx: bool) -> Option<CMat> {
        let mut g = g;
        for l in (0..self.layers.len()).rev() {
            let want = l > 0 || need_dx;
            let dx = self.layers[l].backward(params, &trace.inputs[l], &g, want);
            match dx {
                Some(mut dx) if l > 0 => {
                    relu_backward(&trace.inputs[l].re, &mut dx.re);
                    relu_backward(&trace.inputs[l].im, &mut dx.im);
                    g = dx;
                }
                other => return other,
            }
        }
        None
    }
}
