//! Model-based network: neural weights, SVs and FRVs plugged into a fixed
//! planar-wavefront dictionary.
//!
//! For a location `x` the network produces
//!
//! ```text
//! H(x)[j, k] = sum_i w_i(x) psi_i(x) A(x)[j, i] F(x)[k, i]
//! psi_i(x)   = exp(-j k_r u_i . x)
//! F[k, i]    = exp(-j 2 pi (f_k - f_r) tau_i(x)),  tau_i = tau_max |o_i(x)|
//! ```
//!
//! where `w` comes from a complex weight net followed by the sparsifier and
//! `o` from a real FRV net. The SV matrix `A` is either the raw output of a
//! complex SV net ([`MbVariant::FullSteering`]) or steering vectors of learned
//! departure angles `theta_i = net_i(x) + 2 pi i / D` ([`MbVariant::Departures`]).

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use wavefield_core::dictionary::ComplexMatrix;
use wavefield_core::Location;

use super::{ChannelModel, LossFn, ModelConfig, ModelGeometry, ModelKind};
use crate::layers::{softmax_c, softmax_c_backward, ComplexMlp, ComplexTrace, RealMlp, RealTrace};
use crate::params::ModelParams;
use crate::tensor::{CMat, RMat};

/// How raw weight-net outputs become dictionary weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sparsifier {
    /// `w = D softmax(|z|) z`.
    #[default]
    Ponderation,
    /// `w = z`.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbVariant {
    /// The SV net outputs every entry of the `Na x D` SV matrix.
    FullSteering,
    /// The SV net outputs one departure angle per atom.
    Departures,
}

enum SteeringNet {
    Full(ComplexMlp),
    Departures(RealMlp),
}

/// Per-sample dictionary quantities, exposed for inspection and tests.
#[derive(Debug, Clone)]
pub struct MbParts {
    /// Sparsified weights `w_i`.
    pub weights: Vec<Complex64>,
    /// Planar wavefronts `psi_i(x)`.
    pub wavefronts: Vec<Complex64>,
    /// `Na x D` SV matrix.
    pub steering: ComplexMatrix,
    /// `Ns x D` FRV matrix.
    pub frequency: ComplexMatrix,
    pub delays: Vec<f64>,
    /// Unit departure directions; `None` for the full-steering variant.
    pub departures: Option<Vec<Location>>,
}

pub struct ModelBased {
    kind: ModelKind,
    variant: MbVariant,
    geometry: ModelGeometry,
    params: ModelParams,
    weight_net: ComplexMlp,
    frv_net: RealMlp,
    sv_net: SteeringNet,
    sparsifier: Sparsifier,
    atoms: usize,
    spatial: Vec<Location>,
    base_angles: Vec<f64>,
}

/// Everything the backward pass needs from a forward pass.
struct Trace {
    inputs: RMat,
    weight: ComplexTrace,
    /// `D softmax(|z|)`, or ones under the identity sparsifier.
    scale: Vec<f64>,
    w: CMat,
    frv: RealTrace,
    /// `[B, Ns * D]` FRV planes.
    f: CMat,
    sv: SvTrace,
    /// `[B, Na * D]` SV planes.
    a: CMat,
    /// `[B, D]` planar wavefronts.
    psi: CMat,
}

enum SvTrace {
    Full(ComplexTrace),
    Departures { trace: RealTrace, theta: RMat },
}

impl ModelBased {
    pub fn new(config: &ModelConfig, variant: MbVariant, geometry: ModelGeometry, rng: &mut impl Rng) -> Self {
        let d = config.atoms;
        let na = geometry.antennas();
        let mut params = ModelParams::new();
        let weight_net = ComplexMlp::new(&mut params, "weight", &[2, config.t1, config.t1, d], 1.0, rng);
        let frv_net = RealMlp::new(&mut params, "frv", &[2, config.t2, config.t3, d], rng);
        let sv_net = match variant {
            MbVariant::FullSteering => SteeringNet::Full(ComplexMlp::new(
                &mut params,
                "sv",
                &[2, config.t4, config.t4, na * d],
                config.sv_output_scale,
                rng,
            )),
            MbVariant::Departures => {
                SteeringNet::Departures(RealMlp::new(&mut params, "dod", &[2, config.t5, config.t6, d], rng))
            }
        };
        let base_angles: Vec<f64> = (0..d).map(|i| TAU * i as f64 / d as f64).collect();
        let spatial = base_angles.iter().map(|&a| Location::from_angle(a)).collect();
        Self {
            kind: match variant {
                MbVariant::FullSteering => ModelKind::MbPsiA,
                MbVariant::Departures => ModelKind::MbU,
            },
            variant,
            geometry,
            params,
            weight_net,
            frv_net,
            sv_net,
            sparsifier: config.sparsifier,
            atoms: d,
            spatial,
            base_angles,
        }
    }

    pub fn variant(&self) -> MbVariant {
        self.variant
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    /// Fixed spatial frequencies `u_i` of the wavefront dictionary.
    pub fn spatial_frequencies(&self) -> &[Location] {
        &self.spatial
    }

    fn wave_number(&self) -> f64 {
        TAU / self.geometry.reference_wavelength
    }

    fn forward(&self, xs: &[Location]) -> (CMat, Trace) {
        let b = xs.len();
        let d = self.atoms;
        let na = self.geometry.antennas();
        let ns = self.geometry.frequencies();
        let inputs = self.geometry.normalized_inputs(xs);

        let weight = self.weight_net.forward(&self.params, &CMat::from_real(&inputs));
        let z = &weight.output;
        let mut scale = vec![1.0; b * d];
        let mut w = z.clone();
        if self.sparsifier == Sparsifier::Ponderation {
            for s in 0..b {
                let r = s * d..(s + 1) * d;
                let p = softmax_c(&z.re[r.clone()], &z.im[r.clone()]);
                for (i, pi) in p.into_iter().enumerate() {
                    let t = s * d + i;
                    scale[t] = d as f64 * pi;
                    w.re[t] *= scale[t];
                    w.im[t] *= scale[t];
                }
            }
        }

        let k = self.wave_number();
        let mut psi = CMat::zeros(b, d);
        for (s, x) in xs.iter().enumerate() {
            for (i, u) in self.spatial.iter().enumerate() {
                let (sin, cos) = (-k * u.dot(*x)).sin_cos();
                psi.re[s * d + i] = cos;
                psi.im[s * d + i] = sin;
            }
        }

        let frv = self.frv_net.forward(&self.params, &inputs);
        let tau_max = self.geometry.max_delay;
        let mut f = CMat::zeros(b, ns * d);
        for s in 0..b {
            for (kk, df) in self.geometry.frequency_offsets.iter().enumerate() {
                for i in 0..d {
                    let tau = tau_max * frv.output.data[s * d + i].abs();
                    let (sin, cos) = (-TAU * df * tau).sin_cos();
                    f.re[(s * ns + kk) * d + i] = cos;
                    f.im[(s * ns + kk) * d + i] = sin;
                }
            }
        }

        let (sv, a) = match &self.sv_net {
            SteeringNet::Full(net) => {
                let trace = net.forward(&self.params, &CMat::from_real(&inputs));
                let a = trace.output.clone();
                (SvTrace::Full(trace), a)
            }
            SteeringNet::Departures(net) => {
                let trace = net.forward(&self.params, &inputs);
                let mut theta = trace.output.clone();
                for s in 0..b {
                    for i in 0..d {
                        theta.data[s * d + i] += self.base_angles[i];
                    }
                }
                let mut a = CMat::zeros(b, na * d);
                for s in 0..b {
                    for (j, off) in self.geometry.antenna_offsets.iter().enumerate() {
                        for i in 0..d {
                            let (st, ct) = theta.data[s * d + i].sin_cos();
                            let (sin, cos) = (k * (ct * off.x + st * off.y)).sin_cos();
                            a.re[(s * na + j) * d + i] = cos;
                            a.im[(s * na + j) * d + i] = sin;
                        }
                    }
                }
                (SvTrace::Departures { trace, theta }, a)
            }
        };

        let mut h = CMat::zeros(b, na * ns);
        let mut cr = vec![0.0; d];
        let mut ci = vec![0.0; d];
        for s in 0..b {
            for i in 0..d {
                let t = s * d + i;
                cr[i] = w.re[t] * psi.re[t] - w.im[t] * psi.im[t];
                ci[i] = w.re[t] * psi.im[t] + w.im[t] * psi.re[t];
            }
            for j in 0..na {
                let arow = (s * na + j) * d;
                for kk in 0..ns {
                    let frow = (s * ns + kk) * d;
                    let (mut hr, mut hi) = (0.0, 0.0);
                    for i in 0..d {
                        let (ar, ai) = (a.re[arow + i], a.im[arow + i]);
                        let gr = ar * cr[i] - ai * ci[i];
                        let gi = ar * ci[i] + ai * cr[i];
                        let (fr, fi) = (f.re[frow + i], f.im[frow + i]);
                        hr += gr * fr - gi * fi;
                        hi += gr * fi + gi * fr;
                    }
                    h.re[(s * na + j) * ns + kk] = hr;
                    h.im[(s * na + j) * ns + kk] = hi;
                }
            }
        }

        let trace = Trace {
            inputs,
            weight,
            scale,
            w,
            frv,
            f,
            sv,
            a,
            psi,
        };
        (h, trace)
    }

    fn backward(&mut self, trace: Trace, dh: &CMat) {
        let b = trace.inputs.rows;
        let d = self.atoms;
        let na = self.geometry.antennas();
        let ns = self.geometry.frequencies();
        let k = self.wave_number();
        let Trace {
            inputs: _,
            weight,
            scale,
            w,
            frv,
            f,
            sv,
            a,
            psi,
        } = trace;

        let mut da = CMat::zeros(b, na * d);
        let mut dphi = vec![0.0; b * ns * d];
        let mut dw = CMat::zeros(b, d);
        let mut cr = vec![0.0; d];
        let mut ci = vec![0.0; d];
        let mut dg_r = vec![0.0; na * d];
        let mut dg_i = vec![0.0; na * d];
        for s in 0..b {
            for i in 0..d {
                let t = s * d + i;
                cr[i] = w.re[t] * psi.re[t] - w.im[t] * psi.im[t];
                ci[i] = w.re[t] * psi.im[t] + w.im[t] * psi.re[t];
            }
            dg_r.iter_mut().for_each(|v| *v = 0.0);
            dg_i.iter_mut().for_each(|v| *v = 0.0);
            for j in 0..na {
                let arow = (s * na + j) * d;
                for kk in 0..ns {
                    let frow = (s * ns + kk) * d;
                    let ghr = dh.re[(s * na + j) * ns + kk];
                    let ghi = dh.im[(s * na + j) * ns + kk];
                    for i in 0..d {
                        let (fr, fi) = (f.re[frow + i], f.im[frow + i]);
                        // dG = dH conj(F)
                        dg_r[j * d + i] += ghr * fr + ghi * fi;
                        dg_i[j * d + i] += ghi * fr - ghr * fi;
                        // dF = dH^T conj(G), folded straight into dphi
                        let (ar, ai) = (a.re[arow + i], a.im[arow + i]);
                        let gr = ar * cr[i] - ai * ci[i];
                        let gi = ar * ci[i] + ai * cr[i];
                        let dfr = ghr * gr + ghi * gi;
                        let dfi = ghi * gr - ghr * gi;
                        dphi[frow + i] += -dfr * fi + dfi * fr;
                    }
                }
            }
            let mut dcr = vec![0.0; d];
            let mut dci = vec![0.0; d];
            for j in 0..na {
                let arow = (s * na + j) * d;
                for i in 0..d {
                    let (gr, gi) = (dg_r[j * d + i], dg_i[j * d + i]);
                    let (ar, ai) = (a.re[arow + i], a.im[arow + i]);
                    // dA = dG conj(c)
                    da.re[arow + i] = gr * cr[i] + gi * ci[i];
                    da.im[arow + i] = gi * cr[i] - gr * ci[i];
                    // dc = sum_j dG conj(A)
                    dcr[i] += gr * ar + gi * ai;
                    dci[i] += gi * ar - gr * ai;
                }
            }
            for i in 0..d {
                let t = s * d + i;
                // dw = dc conj(psi)
                dw.re[t] = dcr[i] * psi.re[t] + dci[i] * psi.im[t];
                dw.im[t] = dci[i] * psi.re[t] - dcr[i] * psi.im[t];
            }
        }

        let z = &weight.output;
        let mut dz = CMat::zeros(b, d);
        for (t, &c) in scale.iter().enumerate() {
            dz.re[t] = c * dw.re[t];
            dz.im[t] = c * dw.im[t];
        }
        if self.sparsifier == Sparsifier::Ponderation {
            for s in 0..b {
                let r = s * d..(s + 1) * d;
                let p: Vec<f64> = scale[r.clone()].iter().map(|v| v / d as f64).collect();
                let dp: Vec<f64> = r
                    .clone()
                    .map(|t| d as f64 * (dw.re[t] * z.re[t] + dw.im[t] * z.im[t]))
                    .collect();
                let (dzr, dzi) = (&mut dz.re[r.clone()], &mut dz.im[r.clone()]);
                softmax_c_backward(&z.re[r.clone()], &z.im[r], &p, &dp, dzr, dzi);
            }
        }
        self.weight_net.backward(&mut self.params, &weight, dz, false);

        let tau_max = self.geometry.max_delay;
        let mut d_o = RMat::zeros(b, d);
        for s in 0..b {
            for (kk, df) in self.geometry.frequency_offsets.iter().enumerate() {
                for i in 0..d {
                    d_o.data[s * d + i] += dphi[(s * ns + kk) * d + i] * (-TAU * df);
                }
            }
            for i in 0..d {
                let o = frv.output.data[s * d + i];
                d_o.data[s * d + i] *= tau_max * sign(o);
            }
        }
        self.frv_net.backward(&mut self.params, &frv, d_o);

        match (&self.sv_net, sv) {
            (SteeringNet::Full(net), SvTrace::Full(trace)) => {
                net.backward(&mut self.params, &trace, da, false);
            }
            (SteeringNet::Departures(net), SvTrace::Departures { trace, theta }) => {
                let mut dtheta = RMat::zeros(b, d);
                for s in 0..b {
                    for (j, off) in self.geometry.antenna_offsets.iter().enumerate() {
                        for i in 0..d {
                            let t = (s * na + j) * d + i;
                            let dalpha = -da.re[t] * a.im[t] + da.im[t] * a.re[t];
                            let (st, ct) = theta.data[s * d + i].sin_cos();
                            dtheta.data[s * d + i] += dalpha * k * (-st * off.x + ct * off.y);
                        }
                    }
                }
                net.backward(&mut self.params, &trace, dtheta);
            }
            _ => unreachable!("steering trace matches its net"),
        }
    }

    /// Weights, wavefronts, SVs and FRVs the network produces at each location.
    pub fn parts(&self, xs: &[Location]) -> Vec<MbParts> {
        let (_, trace) = self.forward(xs);
        let d = self.atoms;
        let na = self.geometry.antennas();
        let ns = self.geometry.frequencies();
        let tau_max = self.geometry.max_delay;
        (0..xs.len())
            .map(|s| {
                let c = |m: &CMat, t: usize| Complex64::new(m.re[t], m.im[t]);
                MbParts {
                    weights: (0..d).map(|i| c(&trace.w, s * d + i)).collect(),
                    wavefronts: (0..d).map(|i| c(&trace.psi, s * d + i)).collect(),
                    steering: ComplexMatrix::from_fn(na, d, |j, i| c(&trace.a, (s * na + j) * d + i)),
                    frequency: ComplexMatrix::from_fn(ns, d, |kk, i| c(&trace.f, (s * ns + kk) * d + i)),
                    delays: (0..d).map(|i| tau_max * trace.frv.output.data[s * d + i].abs()).collect(),
                    departures: match &trace.sv {
                        SvTrace::Departures { theta, .. } => {
                            Some((0..d).map(|i| Location::from_angle(theta.data[s * d + i])).collect())
                        }
                        SvTrace::Full(_) => None,
                    },
                }
            })
            .collect()
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl ChannelModel for ModelBased {
    fn kind(&self) -> ModelKind {
        self.kind
    }

    fn geometry(&self) -> &ModelGeometry {
        &self.geometry
    }

    fn params(&self) -> &ModelParams {
        &self.params
    }

    fn params_mut(&mut self) -> &mut ModelParams {
        &mut self.params
    }

    fn predict(&self, xs: &[Location]) -> CMat {
        self.forward(xs).0
    }

    fn forward_backward(&mut self, xs: &[Location], loss: &mut LossFn<'_>) -> f64 {
        let (h, trace) = self.forward(xs);
        let (value, dh) = loss(&h);
        self.backward(trace, &dh);
        value
    }
}
