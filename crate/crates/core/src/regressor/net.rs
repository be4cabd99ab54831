//! Dense feed-forward network with manual backpropagation.
//!
//! All parameters of a net live in one flat buffer so the optimizer can
//! treat them as a single vector. Each layer owns a contiguous slice laid
//! out as the row-major `outputs × inputs` weight matrix followed by the
//! bias.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::real::Real;

/// Negative-side slope of the leaky ReLU.
pub const LEAKY_SLOPE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    LeakyRelu,
}

impl Activation {
    fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::Identity => z,
            Activation::LeakyRelu => {
                if z > T::zero() {
                    z
                } else {
                    z * T::lit(LEAKY_SLOPE)
                }
            }
        }
    }

    fn derivative<T: Real>(self, z: T) -> T {
        match self {
            Activation::Identity => T::one(),
            Activation::LeakyRelu => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::lit(LEAKY_SLOPE)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerShape {
    pub inputs: usize,
    pub outputs: usize,
    pub activation: Activation,
    offset: usize,
}

impl LayerShape {
    pub fn param_count(&self) -> usize {
        self.outputs * (self.inputs + 1)
    }
}

/// How a net's parameters were initialised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitRecord {
    GlorotUniform { seed: u64 },
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet<T: Real> {
    layers: Vec<LayerShape>,
    params: Vec<T>,
    init: InitRecord,
}

/// Activations recorded by [`DenseNet::forward_trace`]: `pre[l]` is the
/// affine output of layer `l` and `post[l]` its input (`post[0]` is the net
/// input, the last entry is the net output).
#[derive(Debug, Clone)]
pub struct Trace<T> {
    pre: Vec<Vec<T>>,
    post: Vec<Vec<T>>,
}

impl<T: Real> Trace<T> {
    pub fn output(&self) -> &[T] {
        self.post.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    /// Same layout as [`DenseNet::params`].
    pub params: Vec<T>,
    pub input: Vec<T>,
}

fn layout(dims: &[usize], hidden: Activation, output: Activation) -> Result<Vec<LayerShape>> {
    if dims.len() < 2 {
        return Err(invalid("a net needs at least an input and an output size"));
    }
    if dims.contains(&0) {
        return Err(invalid(format!("zero-width layer in {dims:?}")));
    }
    let mut offset = 0;
    let n = dims.len() - 1;
    Ok((0..n)
        .map(|i| {
            let shape = LayerShape {
                inputs: dims[i],
                outputs: dims[i + 1],
                activation: if i + 1 == n { output } else { hidden },
                offset,
            };
            offset += shape.param_count();
            shape
        })
        .collect())
}

impl<T: Real> DenseNet<T> {
    /// Glorot-uniform weights and zero biases. `dims` lists every layer
    /// width including input and output.
    pub fn new(dims: &[usize], hidden: Activation, output: Activation, seed: u64) -> Result<Self> {
        let layers = layout(dims, hidden, output)?;
        let total = layers.iter().map(LayerShape::param_count).sum();
        let mut params = vec![T::zero(); total];
        let mut rng = crate::seed::task_rng("glorot", seed);
        for l in &layers {
            let limit = (6.0 / (l.inputs + l.outputs) as f64).sqrt();
            for w in &mut params[l.offset..l.offset + l.inputs * l.outputs] {
                *w = T::lit(rng.gen_range(-limit..=limit));
            }
        }
        Ok(Self {
            layers,
            params,
            init: InitRecord::GlorotUniform { seed },
        })
    }

    /// Builds a net from explicit `(weights, bias, activation)` triples,
    /// weights row-major `outputs × inputs`.
    pub fn from_layers(layers: &[(Vec<T>, Vec<T>, Activation)]) -> Result<Self> {
        let mut shapes = Vec::with_capacity(layers.len());
        let mut params = Vec::new();
        for (i, (w, b, act)) in layers.iter().enumerate() {
            if b.is_empty() || w.len() % b.len() != 0 || w.is_empty() {
                return Err(invalid(format!(
                    "layer {i}: {} weights do not fit {} biases",
                    w.len(),
                    b.len()
                )));
            }
            let shape = LayerShape {
                inputs: w.len() / b.len(),
                outputs: b.len(),
                activation: *act,
                offset: params.len(),
            };
            if let Some(prev) = shapes.last() {
                let prev: &LayerShape = prev;
                if prev.outputs != shape.inputs {
                    return Err(invalid(format!(
                        "layer {i} takes {} inputs but the previous layer emits {}",
                        shape.inputs, prev.outputs
                    )));
                }
            }
            params.extend_from_slice(w);
            params.extend_from_slice(b);
            shapes.push(shape);
        }
        if shapes.is_empty() {
            return Err(invalid("a net needs at least one layer"));
        }
        let net = Self {
            layers: shapes,
            params,
            init: InitRecord::Explicit,
        };
        net.check_finite()?;
        Ok(net)
    }

    pub fn layers(&self) -> &[LayerShape] {
        &self.layers
    }

    pub fn init_record(&self) -> InitRecord {
        self.init
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.params.iter().all(|p| p.is_finite()) {
            Ok(())
        } else {
            Err(invalid("net has non-finite parameters"))
        }
    }

    pub fn forward(&self, input: &[T]) -> Result<Vec<T>> {
        self.check_input(input)?;
        let mut a = input.to_vec();
        for l in &self.layers {
            a = self
                .affine(l, &a)
                .into_iter()
                .map(|z| l.activation.apply(z))
                .collect();
        }
        Ok(a)
    }

    pub fn forward_trace(&self, input: &[T]) -> Result<Trace<T>> {
        self.check_input(input)?;
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post = Vec::with_capacity(self.layers.len() + 1);
        post.push(input.to_vec());
        for l in &self.layers {
            let z = self.affine(l, &post[post.len() - 1]);
            post.push(z.iter().map(|&z| l.activation.apply(z)).collect());
            pre.push(z);
        }
        Ok(Trace { pre, post })
    }

    /// Gradients of a scalar loss given `upstream = ∂loss/∂output`.
    pub fn backward(&self, input: &[T], upstream: &[T]) -> Result<Gradients<T>> {
        let trace = self.forward_trace(input)?;
        let mut params = vec![T::zero(); self.params.len()];
        let input = self.backward_trace(&trace, upstream, &mut params)?;
        Ok(Gradients { params, input })
    }

    /// Accumulates parameter gradients into `acc` and returns the input
    /// gradient.
    pub fn backward_trace(&self, trace: &Trace<T>, upstream: &[T], acc: &mut [T]) -> Result<Vec<T>> {
        if upstream.len() != self.output_dim() {
            return Err(invalid(format!(
                "upstream gradient has {} values, net emits {}",
                upstream.len(),
                self.output_dim()
            )));
        }
        if acc.len() != self.params.len() || trace.pre.len() != self.layers.len() {
            return Err(invalid("gradient buffer or trace does not match the net"));
        }
        let mut g = upstream.to_vec();
        for (i, l) in self.layers.iter().enumerate().rev() {
            let z = &trace.pre[i];
            let a = &trace.post[i];
            let dz: Vec<T> = g
                .iter()
                .zip(z)
                .map(|(&g, &z)| g * l.activation.derivative(z))
                .collect();
            let w = &self.params[l.offset..l.offset + l.inputs * l.outputs];
            let (gw, gb) = acc[l.offset..l.offset + l.param_count()].split_at_mut(l.inputs * l.outputs);
            let mut da = vec![T::zero(); l.inputs];
            for (o, &d) in dz.iter().enumerate() {
                gb[o] += d;
                if d == T::zero() {
                    continue;
                }
                let row = &w[o * l.inputs..(o + 1) * l.inputs];
                let grow = &mut gw[o * l.inputs..(o + 1) * l.inputs];
                for k in 0..l.inputs {
                    grow[k] += d * a[k];
                    da[k] += d * row[k];
                }
            }
            g = da;
        }
        Ok(g)
    }

    fn check_input(&self, input: &[T]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(invalid(format!(
                "input has {} values, net expects {}",
                input.len(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    fn affine(&self, l: &LayerShape, a: &[T]) -> Vec<T> {
        let w = &self.params[l.offset..l.offset + l.inputs * l.outputs];
        let b = &self.params[l.offset + l.inputs * l.outputs..l.offset + l.param_count()];
        (0..l.outputs)
            .map(|o| {
                let row = &w[o * l.inputs..(o + 1) * l.inputs];
                row.iter().zip(a).fold(b[o], |s, (&w, &x)| s + w * x)
            })
            .collect()
    }
}
