//! Small projected-gradient solver over intersections of boxes, halfspaces
//! and hyperplanes, with Dykstra's algorithm for the projections.
//!
//! Problem sizes here are tiny (≤ 50 variables), so the implementation
//! favors robustness and determinism over speed.

/// A convex constraint set in `R^n`.
#[derive(Clone, Debug)]
pub enum ConvexSet {
    /// `lo ≤ x ≤ hi` componentwise.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `normal · x ≥ offset`.
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// `normal · x = offset`.
    Hyperplane { normal: Vec<f64>, offset: f64 },
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ConvexSet {
    fn project(&self, x: &mut [f64]) {
        match self {
            ConvexSet::Box { lo, hi } => {
                for ((v, &l), &h) in x.iter_mut().zip(lo).zip(hi) {
                    *v = v.clamp(l, h);
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let n2 = dot(normal, normal);
                if n2 > 0.0 {
                    let gap = offset - dot(normal, x);
                    if gap > 0.0 {
                        for (v, &c) in x.iter_mut().zip(normal) {
                            *v += gap * c / n2;
                        }
                    }
                }
            }
            ConvexSet::Hyperplane { normal, offset } => {
                let n2 = dot(normal, normal);
                if n2 > 0.0 {
                    let gap = offset - dot(normal, x);
                    for (v, &c) in x.iter_mut().zip(normal) {
                        *v += gap * c / n2;
                    }
                }
            }
        }
    }

    /// How far `x` is from satisfying this constraint (0 when inside).
    pub fn violation(&self, x: &[f64]) -> f64 {
        match self {
            ConvexSet::Box { lo, hi } => x
                .iter()
                .zip(lo)
                .zip(hi)
                .map(|((&v, &l), &h)| (l - v).max(v - h).max(0.0))
                .fold(0.0, f64::max),
            ConvexSet::Halfspace { normal, offset } => {
                let n2 = dot(normal, normal).sqrt();
                if n2 == 0.0 {
                    0.0
                } else {
                    ((offset - dot(normal, x)) / n2).max(0.0)
                }
            }
            ConvexSet::Hyperplane { normal, offset } => {
                let n2 = dot(normal, normal).sqrt();
                if n2 == 0.0 {
                    0.0
                } else {
                    ((offset - dot(normal, x)) / n2).abs()
                }
            }
        }
    }
}

/// Why the solver could not return an optimum.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexFailure {
    /// The constraint intersection is (numerically) empty; `gap` is the
    /// residual distance that could not be closed.
    Infeasible { gap: f64 },
    /// Iteration budget exhausted before the tolerances were met.
    Undetermined,
}

pub fn max_violation(x: &[f64], sets: &[ConvexSet]) -> f64 {
    sets.iter().map(|s| s.violation(x)).fold(0.0, f64::max)
}

/// Project onto the intersection of `sets` by Dykstra's algorithm.
///
/// Returns the projected point, or `Infeasible` when the alternating
/// projections stabilize at a positive gap (the sets do not intersect).
pub fn project_intersection(
    x0: &[f64],
    sets: &[ConvexSet],
    max_sweeps: usize,
    feas_tol: f64,
) -> Result<Vec<f64>, ConvexFailure> {
    if sets.is_empty() {
        return Ok(x0.to_vec());
    }
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut corrections = vec![vec![0.0; n]; sets.len()];
    let mut last_change = f64::INFINITY;
    for _ in 0..max_sweeps {
        let before = x.clone();
        for (set, p) in sets.iter().zip(corrections.iter_mut()) {
            let mut y: Vec<f64> = x.iter().zip(p.iter()).map(|(v, c)| v + c).collect();
            set.project(&mut y);
            for i in 0..n {
                p[i] = x[i] + p[i] - y[i];
            }
            x = y;
        }
        last_change = x
            .iter()
            .zip(&before)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if last_change < 1e-14 {
            break;
        }
    }
    let gap = max_violation(&x, sets);
    if gap > feas_tol {
        if last_change < 1e-12 {
            // converged to a fixed point that violates some set: empty intersection
            return Err(ConvexFailure::Infeasible { gap });
        }
        return Err(ConvexFailure::Undetermined);
    }
    Ok(x)
}

#[derive(Clone, Debug)]
pub struct MinimizeOptions {
    pub grad_tol: f64,
    pub max_iters: usize,
    pub feas_tol: f64,
    pub projection_sweeps: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iters: 100_000,
            feas_tol: 1e-7,
            projection_sweeps: 400,
        }
    }
}

/// Projected-gradient descent with backtracking line search.
///
/// `objective` must be convex on the constraint set; the result is then the
/// global constrained minimum within tolerance. Deterministic for fixed
/// inputs.
pub fn convex_minimize(
    objective: &dyn Fn(&[f64]) -> f64,
    gradient: &dyn Fn(&[f64]) -> Vec<f64>,
    sets: &[ConvexSet],
    x0: &[f64],
    opts: &MinimizeOptions,
) -> Result<(f64, Vec<f64>), ConvexFailure> {
    let mut x = project_intersection(x0, sets, 20_000, opts.feas_tol)?;
    let mut fx = objective(&x);
    let mut step = 1.0f64;
    for _ in 0..opts.max_iters {
        let g = gradient(&x);
        let mut improved = false;
        let mut t = step;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(v, gi)| v - t * gi).collect();
            let y = match project_intersection(&trial, sets, opts.projection_sweeps, opts.feas_tol)
            {
                Ok(y) => y,
                Err(_) => {
                    t *= 0.5;
                    continue;
                }
            };
            let fy = objective(&y);
            let move_sq: f64 = y.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum();
            if fy <= fx - 1e-4 * move_sq / t.max(1e-300) {
                // gradient-mapping convergence test
                let mapping = (move_sq).sqrt() / t.max(1e-300);
                x = y;
                fx = fy;
                step = (t * 2.0).min(1.0);
                improved = true;
                if mapping < opts.grad_tol {
                    return Ok((fx, x));
                }
                break;
            }
            t *= 0.5;
        }
        if !improved {
            // no descent direction at any step size: stationary point
            return Ok((fx, x));
        }
    }
    Err(ConvexFailure::Undetermined)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_on_simplex_plane() {
        // min sum x^2 subject to sum x = 1
        let sets = vec![ConvexSet::Hyperplane {
            normal: vec![1.0, 1.0, 1.0],
            offset: 1.0,
        }];
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let g = |x: &[f64]| x.iter().map(|v| 2.0 * v).collect::<Vec<_>>();
        let (val, arg) = convex_minimize(
            &f,
            &g,
            &sets,
            &[0.9, 0.05, 0.05],
            &MinimizeOptions::default(),
        )
        .unwrap();
        assert!((val - 1.0 / 3.0).abs() < 1e-9);
        for v in arg {
            assert!((v - 1.0 / 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn empty_intersection_detected() {
        let sets = vec![
            ConvexSet::Box {
                lo: vec![0.0],
                hi: vec![1.0],
            },
            ConvexSet::Halfspace {
                normal: vec![1.0],
                offset: 2.0,
            },
        ];
        let r = project_intersection(&[0.5], &sets, 20_000, 1e-7);
        assert!(matches!(r, Err(ConvexFailure::Infeasible { .. })));
    }

    #[test]
    fn box_and_halfspace_projection() {
        let sets = vec![
            ConvexSet::Box {
                lo: vec![0.0, 0.0],
                hi: vec![1.0, 1.0],
            },
            ConvexSet::Halfspace {
                normal: vec![1.0, 1.0],
                offset: 1.5,
            },
        ];
        let p = project_intersection(&[0.0, 0.0], &sets, 20_000, 1e-9).unwrap();
        assert!(max_violation(&p, &sets) < 1e-9);
        assert!((p[0] + p[1] - 1.5).abs() < 1e-8);
    }
}
