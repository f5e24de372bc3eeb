//! Weighted C-SVC with an RBF kernel, trained by SMO with second-order
//! working-set selection.
//!
//! Dual: minimise `½ αᵀQα − eᵀα` subject to `0 ≤ α_i ≤ C_i`, `yᵀα = 0`,
//! with `Q_ij = y_i y_j K(x_i, x_j)` and `K(a, b) = exp(−γ‖a − b‖²)`.

/// KKT violation at which the solver stops.
pub const SMO_TOLERANCE: f64 = 1e-3;
pub const SMO_MAX_ITERATIONS: usize = 1_000_000;

/// Full kernel matrices are cached up to this many training points.
const DENSE_KERNEL_LIMIT: usize = 2000;

const TAU: f64 = 1e-12;

pub fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// A trained binary classifier; `decision > 0` means "good".
#[derive(Debug, Clone, PartialEq)]
pub struct Svm {
    pub gamma: f64,
    pub c: f64,
    pub bias: f64,
    /// `(α_i y_i, x_i)` for every support vector.
    pub support: Vec<(f64, Vec<f64>)>,
}

impl Svm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support.iter().map(|(coef, sv)| coef * rbf(self.gamma, sv, x)).sum::<f64>() + self.bias
    }
}

struct Kernel<'a> {
    x: &'a [Vec<f64>],
    gamma: f64,
    dense: Option<Vec<f64>>,
}

impl<'a> Kernel<'a> {
    fn new(x: &'a [Vec<f64>], gamma: f64) -> Self {
        let n = x.len();
        let dense = (n <= DENSE_KERNEL_LIMIT).then(|| {
            let mut k = vec![0.0; n * n];
            for i in 0..n {
                k[i * n + i] = 1.0;
                for j in i + 1..n {
                    let v = rbf(gamma, &x[i], &x[j]);
                    k[i * n + j] = v;
                    k[j * n + i] = v;
                }
            }
            k
        });
        Kernel { x, gamma, dense }
    }

    fn row(&self, i: usize, out: &mut [f64]) {
        let n = self.x.len();
        match &self.dense {
            Some(k) => out.copy_from_slice(&k[i * n..(i + 1) * n]),
            None => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = rbf(self.gamma, &self.x[i], &self.x[j]);
                }
            }
        }
    }
}

/// Train on `x` with labels `y` (`true` = positive) and per-sample weights
/// scaling the box constraint. Both classes must be present.
pub fn train_svm(x: &[Vec<f64>], y: &[bool], weights: &[f64], c: f64, gamma: f64) -> Svm {
    let n = x.len();
    debug_assert!(y.iter().any(|&v| v) && y.iter().any(|&v| !v));
    let ys: Vec<f64> = y.iter().map(|&v| if v { 1.0 } else { -1.0 }).collect();
    let cap: Vec<f64> = weights.iter().map(|w| c * w).collect();
    let kernel = Kernel::new(x, gamma);
    let mut alpha = vec![0.0f64; n];
    let mut grad = vec![-1.0f64; n];
    let mut ki = vec![0.0; n];
    let mut kj = vec![0.0; n];

    let upper = |a: &[f64], t: usize| a[t] >= cap[t];
    let lower = |a: &[f64], t: usize| a[t] <= 0.0;

    for _ in 0..SMO_MAX_ITERATIONS {
        // i: maximal violating index among I_up.
        let mut g_max = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            let in_up = if ys[t] > 0.0 { !upper(&alpha, t) } else { !lower(&alpha, t) };
            if in_up && -ys[t] * grad[t] >= g_max {
                g_max = -ys[t] * grad[t];
                i = t;
            }
        }
        if i == usize::MAX {
            break;
        }
        kernel.row(i, &mut ki);
        // j: second-order choice among I_low.
        let mut g_max2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            let in_low = if ys[t] > 0.0 { !lower(&alpha, t) } else { !upper(&alpha, t) };
            if !in_low {
                continue;
            }
            let v = ys[t] * grad[t];
            g_max2 = g_max2.max(v);
            let b = g_max + v;
            if b > 0.0 {
                let a = (2.0 - 2.0 * ki[t]).max(TAU);
                let obj = -(b * b) / a;
                if obj <= best_obj {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if g_max + g_max2 < SMO_TOLERANCE || j == usize::MAX {
            break;
        }
        kernel.row(j, &mut kj);

        let (ci, cj) = (cap[i], cap[j]);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = ys[i] * ys[j] * ki[j];
        if ys[i] != ys[j] {
            let quad = (2.0 + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let quad = (2.0 - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += ys[t] * (ys[i] * ki[t] * di + ys[j] * kj[t] * dj);
        }
    }

    // Offset: mean of y·G over free vectors, else the midpoint of the
    // feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut free_sum) = (0usize, 0.0);
    for t in 0..n {
        let yg = ys[t] * grad[t];
        if upper(&alpha, t) {
            if ys[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(&alpha, t) {
            if ys[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 { free_sum / free as f64 } else { (ub + lb) / 2.0 };
    let support = (0..n).filter(|&t| alpha[t] > 0.0).map(|t| (alpha[t] * ys[t], x[t].clone())).collect();
    Svm { gamma, c, bias: -rho, support }
}
