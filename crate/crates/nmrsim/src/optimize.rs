//! Derivative-free minimization: Nelder-Mead simplex with seeded
//! multi-start.
//!
//! Restarts run independently (callers parallelize) and the best result is
//! reduced in fixed restart order, so multi-start searches are
//! bit-reproducible for a given seed.

/// Options for one Nelder-Mead run.
#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Stop when the simplex function-value spread falls below this.
    pub tolerance: f64,
    /// Hard cap on objective evaluations.
    pub max_evaluations: usize,
    /// Initial simplex step per dimension.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            tolerance: 1e-6,
            max_evaluations: 5000,
            initial_step: 0.5,
        }
    }
}

/// Result of one run.
#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub fmin: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimize `f` from `x0` with the standard reflection/expansion/contraction
/// coefficients (α=1, γ=2, β=½, δ=½).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> MinimizeResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    // initial simplex: x0 plus a step along each axis
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for d in 0..n {
        let mut v = x0.to_vec();
        v[d] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();

    let mut converged = false;
    while evals < opts.max_evaluations {
        // order ascending by value
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let ordered: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let ordered_vals: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
        simplex = ordered;
        values = ordered_vals;

        if values[n] - values[0] < opts.tolerance {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; n];
        for v in simplex.iter().take(n) {
            for d in 0..n {
                centroid[d] += v[d] / n as f64;
            }
        }

        let worst = simplex[n].clone();
        let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(&x, &y)| x + t * (y - x)).collect()
        };

        let reflected = lerp(&centroid, &worst, -1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < values[0] {
            let expanded = lerp(&centroid, &worst, -2.0);
            let fe = eval(&expanded, &mut evals);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let contracted = if fr < values[n] {
                lerp(&centroid, &worst, -0.5)
            } else {
                lerp(&centroid, &worst, 0.5)
            };
            let fc = eval(&contracted, &mut evals);
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                // shrink toward the best vertex
                for i in 1..=n {
                    simplex[i] = lerp(&simplex[0], &simplex[i], 0.5);
                    values[i] = eval(&simplex[i], &mut evals);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    MinimizeResult {
        x: simplex[best].clone(),
        fmin: values[best],
        evaluations: evals,
        converged,
    }
}
