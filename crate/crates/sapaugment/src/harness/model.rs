//! Multinomial logistic regression over time-averaged log-mel features.

/// Linear softmax classifier with built-in feature standardization.
#[derive(Debug, Clone)]
pub struct TinyModel {
    /// K×F weight matrix, row-major.
    weights: Vec<f64>,
    bias: Vec<f64>,
    feat_mean: Vec<f64>,
    feat_scale: Vec<f64>,
    num_features: usize,
    num_classes: usize,
}

impl TinyModel {
    /// Zero-initialized model. `feat_mean`/`feat_scale` standardize inputs
    /// before the linear layer and are frozen for the model's lifetime.
    pub fn new(
        num_features: usize,
        num_classes: usize,
        feat_mean: Vec<f64>,
        feat_scale: Vec<f64>,
    ) -> Self {
        assert_eq!(feat_mean.len(), num_features);
        assert_eq!(feat_scale.len(), num_features);
        TinyModel {
            weights: vec![0.0; num_classes * num_features],
            bias: vec![0.0; num_classes],
            feat_mean,
            feat_scale,
            num_features,
            num_classes,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    fn standardize(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .zip(&self.feat_mean)
            .zip(&self.feat_scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn logits(&self, features: &[f64]) -> Vec<f64> {
        let x = self.standardize(features);
        (0..self.num_classes)
            .map(|k| {
                let row = &self.weights[k * self.num_features..(k + 1) * self.num_features];
                self.bias[k] + row.iter().zip(&x).map(|(w, xi)| w * xi).sum::<f64>()
            })
            .collect()
    }

    /// Softmax probabilities; sums to 1 within 1e-6.
    pub fn probabilities(&self, features: &[f64]) -> Vec<f64> {
        softmax(&self.logits(features))
    }

    /// Cross-entropy of the true class.
    pub fn loss(&self, features: &[f64], label: usize) -> f64 {
        let logits = self.logits(features);
        log_sum_exp(&logits) - logits[label]
    }

    pub fn predict(&self, features: &[f64]) -> usize {
        let logits = self.logits(features);
        logits
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.total_cmp(b))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    pub fn parameters(&self) -> (&[f64], &[f64]) {
        (&self.weights, &self.bias)
    }

    pub fn set_parameters(&mut self, weights: Vec<f64>, bias: Vec<f64>) {
        assert_eq!(weights.len(), self.weights.len());
        assert_eq!(bias.len(), self.bias.len());
        self.weights = weights;
        self.bias = bias;
    }

    /// One SGD step on a mini-batch; returns the mean loss before the
    /// update. Gradient: (softmax − onehot) ⊗ x̃, averaged over the batch.
    pub fn sgd_step(&mut self, batch: &[(Vec<f64>, usize)], learning_rate: f64) -> f64 {
        if batch.is_empty() {
            return 0.0;
        }
        let scale = 1.0 / batch.len() as f64;
        let mut grad_w = vec![0.0; self.weights.len()];
        let mut grad_b = vec![0.0; self.bias.len()];
        let mut total_loss = 0.0;

        for (features, label) in batch {
            let x = self.standardize(features);
            let logits: Vec<f64> = (0..self.num_classes)
                .map(|k| {
                    let row = &self.weights[k * self.num_features..(k + 1) * self.num_features];
                    self.bias[k] + row.iter().zip(&x).map(|(w, xi)| w * xi).sum::<f64>()
                })
                .collect();
            total_loss += log_sum_exp(&logits) - logits[*label];
            let probs = softmax(&logits);
            for k in 0..self.num_classes {
                let delta = probs[k] - if k == *label { 1.0 } else { 0.0 };
                grad_b[k] += delta;
                let row = &mut grad_w[k * self.num_features..(k + 1) * self.num_features];
                for (g, xi) in row.iter_mut().zip(&x) {
                    *g += delta * xi;
                }
            }
        }

        for (w, g) in self.weights.iter_mut().zip(&grad_w) {
            *w -= learning_rate * scale * g;
        }
        for (b, g) in self.bias.iter_mut().zip(&grad_b) {
            *b -= learning_rate * scale * g;
        }
        total_loss * scale
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|e| e / total).collect()
}

fn log_sum_exp(logits: &[f64]) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}
