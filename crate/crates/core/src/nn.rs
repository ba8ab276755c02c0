//! Fixed-architecture feedforward Q-network.
//!
//! All parameters live in one flat vector ([`PolicyGenome`]) with the layout
//!
//! ```text
//! W1, b1, W2, b2, ..., WL, bL
//! ```
//!
//! where each `Wl` is a `fan_out x fan_in` matrix stored row-major, so row
//! `i` holds the incoming weights of unit `i` and pairs with bias entry `i`.
//! Hidden layers use ReLU; the output layer is linear.

use rand::Rng;
use rand_distr::{Distribution, Uniform};

use crate::error::{Error, Result};

/// Layer widths of a network: input, hidden layers, output.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetworkShape {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub output_dim: usize,
}

/// Offsets of one dense layer inside a flat genome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpan {
    pub fan_in: usize,
    pub fan_out: usize,
    pub weight_offset: usize,
    pub bias_offset: usize,
}

impl LayerSpan {
    pub fn weight_len(&self) -> usize {
        self.fan_in * self.fan_out
    }

    pub fn end(&self) -> usize {
        self.bias_offset + self.fan_out
    }
}

/// Where a flat parameter index lives in the structured view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamLocation {
    Weight { layer: usize, row: usize, col: usize },
    Bias { layer: usize, row: usize },
}

impl NetworkShape {
    pub fn new(input_dim: usize, hidden_dims: Vec<usize>, output_dim: usize) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 || hidden_dims.iter().any(|&h| h == 0) {
            return Err(Error::invalid("network dimensions must all be at least 1"));
        }
        Ok(NetworkShape {
            input_dim,
            hidden_dims,
            output_dim,
        })
    }

    /// Two hidden layers of 80 units.
    pub fn dialogue_default(input_dim: usize, output_dim: usize) -> Result<Self> {
        Self::new(input_dim, vec![80, 80], output_dim)
    }

    pub fn num_layers(&self) -> usize {
        self.hidden_dims.len() + 1
    }

    fn widths(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.input_dim)
            .chain(self.hidden_dims.iter().copied())
            .chain(std::iter::once(self.output_dim))
    }

    pub fn layers(&self) -> Vec<LayerSpan> {
        let widths: Vec<usize> = self.widths().collect();
        let mut offset = 0;
        widths
            .windows(2)
            .map(|w| {
                let span = LayerSpan {
                    fan_in: w[0],
                    fan_out: w[1],
                    weight_offset: offset,
                    bias_offset: offset + w[0] * w[1],
                };
                offset = span.end();
                span
            })
            .collect()
    }

    /// Number of scalar parameters: sum over layers of `fan_in * fan_out + fan_out`.
    pub fn genome_len(&self) -> usize {
        let widths: Vec<usize> = self.widths().collect();
        widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn locate(&self, index: usize) -> Option<ParamLocation> {
        for (layer, span) in self.layers().into_iter().enumerate() {
            if index < span.bias_offset {
                let k = index - span.weight_offset;
                return Some(ParamLocation::Weight {
                    layer,
                    row: k / span.fan_in,
                    col: k % span.fan_in,
                });
            }
            if index < span.end() {
                return Some(ParamLocation::Bias {
                    layer,
                    row: index - span.bias_offset,
                });
            }
        }
        None
    }
}

/// Structured copy of one dense layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows x cols`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Flat parameter vector of a Q-network.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyGenome {
    shape: NetworkShape,
    params: Vec<f64>,
}

/// Gradient with the same layout as [`PolicyGenome`] parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector(pub Vec<f64>);

impl GradientVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    /// Rescale in place so the L2 norm is at most `max_norm`.
    pub fn clip_norm(&mut self, max_norm: f64) {
        let norm = self.norm();
        if norm > max_norm && norm.is_finite() {
            let scale = max_norm / norm;
            self.0.iter_mut().for_each(|g| *g *= scale);
        }
    }
}

/// One supervised regression target for a single action's Q-value.
#[derive(Debug, Clone, Copy)]
pub struct QSample<'a> {
    pub obs: &'a [f64],
    pub action: usize,
    pub target: f64,
}

impl PolicyGenome {
    pub fn zeros(shape: NetworkShape) -> Self {
        let params = vec![0.0; shape.genome_len()];
        PolicyGenome { shape, params }
    }

    pub fn from_params(shape: NetworkShape, params: Vec<f64>) -> Result<Self> {
        if params.len() != shape.genome_len() {
            return Err(Error::DimensionMismatch {
                context: "genome parameters",
                expected: shape.genome_len(),
                actual: params.len(),
            });
        }
        Ok(PolicyGenome { shape, params })
    }

    /// Weights uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`, biases zero.
    pub fn random<R: Rng + ?Sized>(shape: NetworkShape, rng: &mut R) -> Self {
        let mut genome = Self::zeros(shape);
        for span in genome.shape.layers() {
            let bound = 1.0 / (span.fan_in as f64).sqrt();
            let dist = Uniform::new_inclusive(-bound, bound).expect("finite bound");
            for w in &mut genome.params[span.weight_offset..span.bias_offset] {
                *w = dist.sample(rng);
            }
        }
        genome
    }

    /// Assemble a genome from structured layers (the inverse of [`unflatten`](Self::unflatten)).
    pub fn flatten(shape: NetworkShape, layers: &[LayerParams]) -> Result<Self> {
        let spans = shape.layers();
        if spans.len() != layers.len() {
            return Err(Error::DimensionMismatch {
                context: "layer count",
                expected: spans.len(),
                actual: layers.len(),
            });
        }
        let mut params = Vec::with_capacity(shape.genome_len());
        for (span, layer) in spans.iter().zip(layers) {
            if layer.rows != span.fan_out
                || layer.cols != span.fan_in
                || layer.weights.len() != span.weight_len()
                || layer.bias.len() != span.fan_out
            {
                return Err(Error::invalid(format!(
                    "layer is {}x{} but shape expects {}x{}",
                    layer.rows, layer.cols, span.fan_out, span.fan_in
                )));
            }
            params.extend_from_slice(&layer.weights);
            params.extend_from_slice(&layer.bias);
        }
        Ok(PolicyGenome { shape, params })
    }

    pub fn unflatten(&self) -> Vec<LayerParams> {
        self.shape
            .layers()
            .into_iter()
            .map(|span| LayerParams {
                rows: span.fan_out,
                cols: span.fan_in,
                weights: self.params[span.weight_offset..span.bias_offset].to_vec(),
                bias: self.params[span.bias_offset..span.end()].to_vec(),
            })
            .collect()
    }

    pub fn shape(&self) -> &NetworkShape {
        &self.shape
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Equality of every parameter's bit pattern.
    pub fn bit_eq(&self, other: &PolicyGenome) -> bool {
        self.shape == other.shape
            && self
                .params
                .iter()
                .zip(&other.params)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// Overwrite this genome's parameters with `other`'s.
    pub fn copy_from(&mut self, other: &PolicyGenome) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::invalid("cannot copy between genomes of different shape"));
        }
        self.params.copy_from_slice(&other.params);
        Ok(())
    }

    pub fn forward(&self, obs: &[f64]) -> Result<Vec<f64>> {
        self.check_obs(obs)?;
        Ok(self.forward_unchecked(obs))
    }

    fn check_obs(&self, obs: &[f64]) -> Result<()> {
        if obs.len() != self.shape.input_dim {
            return Err(Error::DimensionMismatch {
                context: "observation",
                expected: self.shape.input_dim,
                actual: obs.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn forward_unchecked(&self, obs: &[f64]) -> Vec<f64> {
        let spans = self.shape.layers();
        let last = spans.len() - 1;
        let mut input = obs.to_vec();
        for (l, span) in spans.iter().enumerate() {
            let w = &self.params[span.weight_offset..span.bias_offset];
            let b = &self.params[span.bias_offset..span.end()];
            let mut out: Vec<f64> = w
                .chunks_exact(span.fan_in)
                .zip(b)
                .map(|(row, bias)| bias + dot(row, &input))
                .collect();
            if l != last {
                out.iter_mut().for_each(|z| *z = z.max(0.0));
            }
            input = out;
        }
        input
    }

    /// Q-values for a batch of observations, one output vector per row.
    pub fn forward_batch(&self, obs: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
        for o in obs {
            self.check_obs(o)?;
        }
        let n = obs.len();
        let acts = BatchActivations::compute(self, obs);
        let out = acts.values.last().expect("at least one layer");
        let dim = self.shape.output_dim;
        Ok((0..n)
            .map(|b| (0..dim).map(|i| out[i * n + b]).collect())
            .collect())
    }

    /// Mean squared TD error over `batch` and its gradient.
    ///
    /// Only the output unit of each sample's chosen action receives error.
    pub fn loss_and_gradient(&self, batch: &[QSample<'_>]) -> Result<(f64, GradientVector)> {
        if batch.is_empty() {
            return Err(Error::invalid("loss requires a non-empty batch"));
        }
        for s in batch {
            self.check_obs(s.obs)?;
            if s.action >= self.shape.output_dim {
                return Err(Error::invalid(format!(
                    "action {} out of range for {} outputs",
                    s.action, self.shape.output_dim
                )));
            }
            if !s.target.is_finite() {
                return Err(Error::invalid("regression target must be finite"));
            }
        }

        let n = batch.len();
        let obs: Vec<&[f64]> = batch.iter().map(|s| s.obs).collect();
        let acts = BatchActivations::compute(self, &obs);
        let spans = self.shape.layers();
        let out = acts.values.last().expect("at least one layer");

        // dL/dz at the output layer, unit-major like the activations.
        let mut delta = vec![0.0; self.shape.output_dim * n];
        let mut loss = 0.0;
        for (b, s) in batch.iter().enumerate() {
            let residual = out[s.action * n + b] - s.target;
            loss += residual * residual;
            delta[s.action * n + b] = 2.0 * residual / n as f64;
        }
        loss /= n as f64;

        let mut grad = vec![0.0; self.params.len()];
        for l in (0..spans.len()).rev() {
            let span = spans[l];
            let input = if l == 0 { &acts.input } else { &acts.values[l - 1] };
            let gw = &mut grad[span.weight_offset..span.bias_offset];
            for i in 0..span.fan_out {
                let d = &delta[i * n..(i + 1) * n];
                for j in 0..span.fan_in {
                    gw[i * span.fan_in + j] = dot(d, &input[j * n..(j + 1) * n]);
                }
            }
            let gb = &mut grad[span.bias_offset..span.end()];
            for (i, g) in gb.iter_mut().enumerate() {
                *g = delta[i * n..(i + 1) * n].iter().sum();
            }
            if l == 0 {
                break;
            }
            let w = &self.params[span.weight_offset..span.bias_offset];
            let mut prev = vec![0.0; span.fan_in * n];
            for i in 0..span.fan_out {
                let d = &delta[i * n..(i + 1) * n];
                for j in 0..span.fan_in {
                    let wij = w[i * span.fan_in + j];
                    if wij != 0.0 {
                        axpy(wij, d, &mut prev[j * n..(j + 1) * n]);
                    }
                }
            }
            // ReLU derivative: the stored activation is positive iff the unit was active.
            for (p, a) in prev.iter_mut().zip(input.iter()) {
                if *a <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
        Ok((loss, GradientVector(grad)))
    }

    /// `params -= lr * grad`, element-wise.
    pub fn sgd_step(&mut self, grad: &GradientVector, lr: f64) -> Result<()> {
        if grad.len() != self.params.len() {
            return Err(Error::DimensionMismatch {
                context: "gradient",
                expected: self.params.len(),
                actual: grad.len(),
            });
        }
        if !(lr > 0.0) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        axpy(-lr, &grad.0, &mut self.params);
        Ok(())
    }
}

/// Per-layer activations for a batch, stored unit-major: entry `i * n + b`
/// is unit `i` of sample `b`. Hidden layers are post-ReLU, the last is linear.
struct BatchActivations {
    input: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl BatchActivations {
    fn compute(genome: &PolicyGenome, obs: &[&[f64]]) -> Self {
        let n = obs.len();
        let in_dim = genome.shape.input_dim;
        let mut input = vec![0.0; in_dim * n];
        for (b, o) in obs.iter().enumerate() {
            for (j, &x) in o.iter().enumerate() {
                input[j * n + b] = x;
            }
        }
        let spans = genome.shape.layers();
        let last = spans.len() - 1;
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(spans.len());
        for (l, span) in spans.iter().enumerate() {
            let prev = if l == 0 { &input } else { &values[l - 1] };
            let w = &genome.params[span.weight_offset..span.bias_offset];
            let bias = &genome.params[span.bias_offset..span.end()];
            let mut out = vec![0.0; span.fan_out * n];
            for i in 0..span.fan_out {
                let row = &mut out[i * n..(i + 1) * n];
                row.iter_mut().for_each(|z| *z = bias[i]);
                for j in 0..span.fan_in {
                    let wij = w[i * span.fan_in + j];
                    if wij != 0.0 {
                        axpy(wij, &prev[j * n..(j + 1) * n], row);
                    }
                }
                if l != last {
                    row.iter_mut().for_each(|z| *z = z.max(0.0));
                }
            }
            values.push(out);
        }
        BatchActivations { input, values }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::stream;
    use rand::Rng;
    use proptest::prelude::*;

    fn tiny() -> NetworkShape {
        NetworkShape::new(3, vec![4, 4], 2).unwrap()
    }

    // Reference forward pass written against the structured view.
    fn oracle_forward(layers: &[LayerParams], obs: &[f64]) -> Vec<f64> {
        let mut x = obs.to_vec();
        for (l, layer) in layers.iter().enumerate() {
            let mut z = vec![0.0; layer.rows];
            for r in 0..layer.rows {
                let mut acc = layer.bias[r];
                for c in 0..layer.cols {
                    acc += layer.weights[r * layer.cols + c] * x[c];
                }
                z[r] = if l + 1 < layers.len() { acc.max(0.0) } else { acc };
            }
            x = z;
        }
        x
    }

    #[test]
    fn zero_genome_outputs_zero() {
        let g = PolicyGenome::zeros(tiny());
        assert_eq!(g.forward(&[0.3, -1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn unit_chain_hand_computed() {
        let shape = NetworkShape::new(1, vec![1, 1], 1).unwrap();
        // W1, b1, W2, b2, W3, b3
        let g = PolicyGenome::from_params(shape, vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(g.forward(&[1.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn forward_matches_oracle() {
        let mut rng = stream(11, 0);
        let shape = NetworkShape::new(10, vec![80, 80], 12).unwrap();
        let g = PolicyGenome::random(shape, &mut rng);
        let obs: Vec<f64> = (0..10).map(|_| rng.random::<f64>()).collect();
        let q = g.forward(&obs).unwrap();
        let expected = oracle_forward(&g.unflatten(), &obs);
        for (a, b) in q.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let others: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..10).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let mut inputs: Vec<&[f64]> = others.iter().map(|o| o.as_slice()).collect();
        inputs.insert(2, &obs);
        let batch = g.forward_batch(&inputs).unwrap();
        assert_eq!(batch.len(), 6);
        for (row, input) in batch.iter().zip(&inputs) {
            let expected = oracle_forward(&g.unflatten(), input);
            for (a, b) in row.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn forward_rejects_wrong_dimension() {
        let g = PolicyGenome::zeros(tiny());
        assert!(matches!(
            g.forward(&[1.0]),
            Err(Error::DimensionMismatch { expected: 3, actual: 1, .. })
        ));
    }

    #[test]
    fn genome_len_of_dialogue_network() {
        let shape = NetworkShape::new(10, vec![80, 80], 12).unwrap();
        // 10*80+80 + 80*80+80 + 80*12+12
        assert_eq!(shape.genome_len(), 880 + 6480 + 972);
        assert_eq!(PolicyGenome::zeros(shape).len(), 8332);
    }

    #[test]
    fn flat_index_maps_to_documented_entry() {
        let shape = tiny();
        let base = PolicyGenome::zeros(shape.clone());
        let mut covered = 0;
        for k in 0..shape.genome_len() {
            let mut g = base.clone();
            g.params_mut()[k] = 1.0;
            let layers = g.unflatten();
            // Layout formula: layers are laid out back to back as W then b.
            let mut offset = 0;
            let mut expected = None;
            for (l, layer) in layers.iter().enumerate() {
                let wl = layer.rows * layer.cols;
                if k < offset + wl {
                    let r = (k - offset) / layer.cols;
                    let c = (k - offset) % layer.cols;
                    expected = Some(ParamLocation::Weight { layer: l, row: r, col: c });
                    assert_eq!(layer.weights[r * layer.cols + c], 1.0);
                    break;
                }
                offset += wl;
                if k < offset + layer.rows {
                    let r = k - offset;
                    expected = Some(ParamLocation::Bias { layer: l, row: r });
                    assert_eq!(layer.bias[r], 1.0);
                    break;
                }
                offset += layer.rows;
            }
            assert_eq!(shape.locate(k), expected);
            let nonzero: usize = layers
                .iter()
                .map(|l| l.weights.iter().chain(&l.bias).filter(|&&v| v != 0.0).count())
                .sum();
            assert_eq!(nonzero, 1);
            covered += 1;
        }
        assert_eq!(covered, 3 * 4 + 4 + 4 * 4 + 4 + 4 * 2 + 2);
        assert_eq!(shape.locate(shape.genome_len()), None);
    }

    #[test]
    fn matching_prediction_gives_zero_loss_and_gradient() {
        let mut rng = stream(3, 0);
        let g = PolicyGenome::random(tiny(), &mut rng);
        let obs = [0.2, 0.5, 0.9];
        let q = g.forward(&obs).unwrap();
        let (loss, grad) = g
            .loss_and_gradient(&[QSample { obs: &obs, action: 1, target: q[1] }])
            .unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_genome_unit_target_loss_one() {
        let g = PolicyGenome::zeros(tiny());
        let (loss, _) = g
            .loss_and_gradient(&[QSample { obs: &[1.0, 1.0, 1.0], action: 0, target: 1.0 }])
            .unwrap();
        assert_eq!(loss, 1.0);
    }

    #[test]
    fn empty_batch_rejected() {
        let g = PolicyGenome::zeros(tiny());
        assert!(g.loss_and_gradient(&[]).is_err());
    }

    #[test]
    fn sgd_arithmetic() {
        let shape = NetworkShape::new(1, vec![], 1).unwrap();
        let mut g = PolicyGenome::from_params(shape, vec![1.0, 1.0]).unwrap();
        g.sgd_step(&GradientVector(vec![1.0, -1.0]), 0.001).unwrap();
        assert_eq!(g.params(), &[0.999, 1.001]);
        let before = g.clone();
        g.sgd_step(&GradientVector(vec![0.0, 0.0]), 0.001).unwrap();
        assert!(g.bit_eq(&before));
        assert!(g.sgd_step(&GradientVector(vec![0.0]), 0.001).is_err());
    }

    #[test]
    fn repeated_sgd_decreases_loss() {
        let mut rng = stream(5, 0);
        let mut g = PolicyGenome::random(tiny(), &mut rng);
        let data: Vec<([f64; 3], usize, f64)> = (0..8)
            .map(|i| {
                let obs = [rng.random(), rng.random(), rng.random()];
                (obs, i % 2, rng.random_range(-2.0..2.0))
            })
            .collect();
        let batch: Vec<QSample<'_>> = data
            .iter()
            .map(|(o, a, t)| QSample { obs: o, action: *a, target: *t })
            .collect();
        let mut prev = f64::INFINITY;
        for _ in 0..20 {
            let (loss, grad) = g.loss_and_gradient(&batch).unwrap();
            assert!(loss < prev, "{loss} !< {prev}");
            prev = loss;
            g.sgd_step(&grad, 0.001).unwrap();
        }
    }

    #[test]
    fn clip_norm_bounds_gradient() {
        let mut g = GradientVector(vec![30.0, 40.0]);
        g.clip_norm(10.0);
        assert!((g.norm() - 10.0).abs() < 1e-12);
        assert_eq!(g.0, vec![6.0, 8.0]);
        let mut small = GradientVector(vec![0.3, 0.4]);
        small.clip_norm(10.0);
        assert_eq!(small.0, vec![0.3, 0.4]);
    }

    #[test]
    fn default_init_keeps_hidden_units_alive() {
        let mut rng = stream(9, 0);
        let shape = NetworkShape::new(33, vec![80, 80], 11).unwrap();
        let g = PolicyGenome::random(shape, &mut rng);
        let layers = g.unflatten();
        let l = &layers[0];
        let mut active = 0;
        for _ in 0..100 {
            let obs: Vec<f64> = (0..33).map(|_| rng.random()).collect();
            for r in 0..80 {
                let z: f64 =
                    l.bias[r] + (0..33).map(|c| l.weights[r * 33 + c] * obs[c]).sum::<f64>();
                if z > 0.0 {
                    active += 1;
                }
            }
        }
        assert!(active > 0);
        assert!(active < 100 * 80);
    }

    proptest! {
        #[test]
        fn flatten_roundtrip_is_bit_exact(seed in any::<u64>(), hidden in 1usize..6) {
            let shape = NetworkShape::new(3, vec![hidden, hidden + 1], 2).unwrap();
            let g = PolicyGenome::random(shape.clone(), &mut stream(seed, 0));
            let back = PolicyGenome::flatten(shape, &g.unflatten()).unwrap();
            prop_assert!(back.bit_eq(&g));
        }

        #[test]
        fn forward_is_deterministic(seed in any::<u64>()) {
            let mut rng = stream(seed, 1);
            let g = PolicyGenome::random(tiny(), &mut rng);
            let obs = [rng.random::<f64>(), rng.random(), rng.random()];
            let round = PolicyGenome::flatten(tiny(), &g.unflatten()).unwrap();
            let a = g.forward(&obs).unwrap();
            prop_assert_eq!(&a, &g.forward(&obs).unwrap());
            prop_assert_eq!(&a, &round.forward(&obs).unwrap());
        }
    }
}
