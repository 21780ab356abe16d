//! Nelder–Mead simplex search with a projection applied to every trial point.
//!
//! Coefficients follow the dimension-adaptive choice of Gao and Han, which keeps
//! the simplex from collapsing in problems with a few dozen variables. When the
//! simplex converges it is rebuilt around the best vertex; the search stops once
//! a rebuilt simplex no longer improves the best value by more than `f_tol`.

use crate::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMead {
    /// Upper bound on simplex iterations across all rebuilds.
    pub max_iters: usize,
    /// Convergence threshold on the spread of simplex values.
    pub f_tol: f64,
    /// Edge length of each freshly built simplex.
    pub initial_step: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

struct Counted<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

impl NelderMead {
    pub fn minimize<F, P>(&self, f: F, project: P, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
        P: Fn(&mut [f64]),
    {
        let mut obj = Counted { f, evals: 0 };
        let mut best_x = x0.to_vec();
        project(&mut best_x);
        let mut best_v = obj.eval(&best_x);
        let mut iterations = 0;
        let mut converged = false;
        let mut step = self.initial_step;

        while iterations < self.max_iters {
            let (x, v, used, done) = self.run_simplex(
                &mut obj,
                &project,
                &best_x,
                best_v,
                step,
                self.max_iters - iterations,
            );
            iterations += used;
            let improvement = best_v - v;
            if v < best_v {
                best_x = x;
                best_v = v;
            }
            if !done {
                break;
            }
            if !(improvement > self.f_tol) {
                converged = true;
                break;
            }
            step = (step * 0.5).max(self.initial_step * 1e-3);
        }

        Minimum {
            x: best_x,
            value: best_v,
            iterations,
            evaluations: obj.evals,
            converged,
        }
    }

    fn run_simplex<F, P>(
        &self,
        obj: &mut Counted<F>,
        project: &P,
        x0: &[f64],
        v0: f64,
        step: f64,
        budget: usize,
    ) -> (Vec<f64>, f64, usize, bool)
    where
        F: FnMut(&[f64]) -> f64,
        P: Fn(&mut [f64]),
    {
        let dim = x0.len();
        let d = dim as f64;
        let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / d, 0.75 - 0.5 / d, 1.0 - 1.0 / d);

        let mut verts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
        let mut vals: Vec<f64> = Vec::with_capacity(dim + 1);
        verts.push(x0.to_vec());
        vals.push(v0);
        for i in 0..dim {
            let mut x = x0.to_vec();
            x[i] += step;
            project(&mut x);
            vals.push(obj.eval(&x));
            verts.push(x);
        }

        let mut order: Vec<usize> = (0..=dim).collect();
        let mut centroid = vec![0.0; dim];
        let mut trial = vec![0.0; dim];
        let mut iters = 0;
        loop {
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
            let (best, worst, second) = (order[0], order[dim], order[dim - 1]);
            let spread = vals[worst] - vals[best];
            if spread.is_finite() && spread <= self.f_tol {
                return (verts[best].clone(), vals[best], iters, true);
            }
            if iters >= budget {
                return (verts[best].clone(), vals[best], iters, false);
            }
            iters += 1;

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for &i in &order[..dim] {
                for (c, x) in centroid.iter_mut().zip(&verts[i]) {
                    *c += x / d;
                }
            }

            let point = |coef: f64, out: &mut Vec<f64>| {
                for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&verts[worst]) {
                    *o = c + coef * (c - w);
                }
                project(out);
            };

            point(alpha, &mut trial);
            let fr = obj.eval(&trial);
            if fr < vals[best] {
                let reflected = trial.clone();
                point(alpha * beta, &mut trial);
                let fe = obj.eval(&trial);
                if fe < fr {
                    verts[worst].copy_from_slice(&trial);
                    vals[worst] = fe;
                } else {
                    verts[worst] = reflected;
                    vals[worst] = fr;
                }
                continue;
            }
            if fr < vals[second] {
                verts[worst].copy_from_slice(&trial);
                vals[worst] = fr;
                continue;
            }
            let outside = fr < vals[worst];
            point(if outside { alpha * gamma } else { -gamma }, &mut trial);
            let fc = obj.eval(&trial);
            let accept = if outside { fc <= fr } else { fc < vals[worst] };
            if accept {
                verts[worst].copy_from_slice(&trial);
                vals[worst] = fc;
                continue;
            }
            // shrink towards the best vertex
            let anchor = verts[best].clone();
            for &i in &order[1..] {
                for (x, a) in verts[i].iter_mut().zip(&anchor) {
                    *x = a + delta * (*x - a);
                }
                project(&mut verts[i]);
                vals[i] = obj.eval(&verts[i]);
            }
        }
    }
}

/// Scales `x` to unit Euclidean norm; the zero vector is left untouched.
pub fn project_unit_sphere(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let nm = NelderMead {
            max_iters: 20_000,
            f_tol: 1e-14,
            initial_step: 0.5,
        };
        let f = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (i as f64 + 1.0) * (v - 1.0).powi(2))
                .sum::<f64>()
        };
        let m = nm.minimize(f, |_| {}, &[0.0; 6]);
        assert!(m.converged);
        assert!(m.value < 1e-10, "{}", m.value);
        assert!(m.x.iter().all(|v| (v - 1.0).abs() < 1e-4));
    }

    #[test]
    fn rosenbrock() {
        let nm = NelderMead {
            max_iters: 50_000,
            f_tol: 1e-16,
            initial_step: 0.5,
        };
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let m = nm.minimize(f, |_| {}, &[-1.2, 1.0]);
        assert!(
            (m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5,
            "{:?}",
            m.x
        );
    }

    #[test]
    fn projected_to_circle() {
        // minimize x + 2y on the unit circle: optimum at -(1,2)/sqrt(5)
        let nm = NelderMead {
            max_iters: 10_000,
            f_tol: 1e-15,
            initial_step: 0.3,
        };
        let m = nm.minimize(
            |x: &[f64]| x[0] + 2.0 * x[1],
            project_unit_sphere,
            &[1.0, 0.0],
        );
        assert!((m.value + 5f64.sqrt()).abs() < 1e-7, "{}", m.value);
    }

    #[test]
    fn escapes_infinite_start() {
        let nm = NelderMead {
            max_iters: 5_000,
            f_tol: 1e-12,
            initial_step: 0.2,
        };
        let f = |x: &[f64]| {
            if x[0] == 0.0 {
                f64::INFINITY
            } else {
                (x[0] - 0.5).powi(2) + x[1] * x[1]
            }
        };
        let m = nm.minimize(f, |_| {}, &[0.0, 0.0]);
        assert!(m.value < 1e-8);
    }

    #[test]
    fn never_above_start() {
        let nm = NelderMead {
            max_iters: 3,
            f_tol: 0.0,
            initial_step: 10.0,
        };
        let f = |x: &[f64]| x[0].abs() + x[1].abs();
        let m = nm.minimize(f, |_| {}, &[0.1, 0.1]);
        assert!(m.value <= 0.2);
        assert!(!m.converged);
    }
}
