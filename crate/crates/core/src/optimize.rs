//! Derivative-free Nelder–Mead simplex minimisation.
//!
//! Uses the dimension-adaptive coefficients of Gao & Han, which behave
//! better than the textbook ones beyond a handful of parameters. A run ends
//! when both the spread of objective values and the simplex diameter fall
//! below their tolerances, or when the iteration budget is spent.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iters: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Fresh simplices built around the incumbent after convergence.
    pub polish_rounds: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iters: 2000,
            f_tol: 1e-10,
            x_tol: 1e-8,
            initial_step: 0.4,
            polish_rounds: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

struct Coefficients {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coefficients {
    fn adaptive(n: usize) -> Self {
        let n = n as f64;
        Coefficients {
            reflect: 1.0,
            expand: 1.0 + 2.0 / n,
            contract: 0.75 - 1.0 / (2.0 * n),
            shrink: 1.0 - 1.0 / n,
        }
    }
}

/// Minimises `f` from `x0`.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &SimplexOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    assert!(!x0.is_empty(), "nothing to optimise");
    let mut best = run(&f, x0, opts, opts.max_iters);
    let mut iterations = best.iterations;
    let mut evaluations = best.evaluations;
    for _ in 0..opts.polish_rounds {
        if iterations >= opts.max_iters {
            break;
        }
        let next = run(&f, &best.x, opts, opts.max_iters - iterations);
        iterations += next.iterations;
        evaluations += next.evaluations;
        let improved = best.value - next.value > opts.f_tol;
        if next.value < best.value {
            best = next;
        }
        if !improved {
            break;
        }
    }
    best.iterations = iterations;
    best.evaluations = evaluations;
    best
}

fn run<F>(f: &F, x0: &[f64], opts: &SimplexOptions, budget: usize) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let coef = Coefficients::adaptive(n.max(2));
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| eval(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < budget {
        // Stable sort keeps ties in insertion order.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        points = order.iter().map(|&i| points[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let f_spread = values[n] - values[0];
        let x_spread = points[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&points[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= opts.f_tol && x_spread <= opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| points[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&points[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(coef.reflect);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(coef.reflect * coef.expand);
            let fe = eval(&xe);
            if fe < fr {
                points[n] = xe;
                values[n] = fe;
            } else {
                points[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            points[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(coef.reflect * coef.contract);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-coef.contract);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            points[n] = xc;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            let p: Vec<f64> = points[0]
                .iter()
                .zip(&points[i])
                .map(|(b, x)| b + coef.shrink * (x - b))
                .collect();
            values[i] = eval(&p);
            points[i] = p;
        }
    }

    let best = (0..=n)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap_or(0);
    Minimum {
        x: points[best].clone(),
        value: values[best],
        iterations,
        evaluations,
        converged,
    }
}
