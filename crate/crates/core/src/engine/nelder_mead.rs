//! Derivative-free simplex minimization.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop once `max f - min f` over the simplex drops below this.
    pub tolerance: f64,
    pub max_evaluations: usize,
    /// Offset of each non-base vertex along its coordinate axis.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            tolerance: 1e-8,
            max_evaluations: 5000,
            initial_step: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` from the axis-aligned simplex at `x0`.
///
/// Errors from `f` abort the search and are returned as-is.
pub fn minimize<T: Real, E>(
    mut f: impl FnMut(&[T]) -> Result<T, E>,
    x0: &[T],
    options: &NelderMeadOptions,
) -> Result<Minimum<T>, E> {
    let dim = x0.len();
    let (alpha, gamma, rho, sigma) =
        (T::lit(options.reflection), T::lit(options.expansion), T::lit(options.contraction), T::lit(options.shrink));
    let evaluations = std::cell::Cell::new(0usize);
    let mut eval = |x: &[T]| {
        evaluations.set(evaluations.get() + 1);
        f(x)
    };

    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), eval(x0)?));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += T::lit(options.initial_step);
        let v = eval(&x)?;
        simplex.push((x, v));
    }

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let (best, worst) = (simplex[0].1, simplex[dim].1);
        if (worst - best).as_f64() < options.tolerance {
            converged = true;
            break;
        }
        if evaluations.get() >= options.max_evaluations {
            break;
        }

        let mut centroid = vec![T::zero(); dim];
        for (x, _) in &simplex[..dim] {
            centroid.iter_mut().zip(x).for_each(|(c, &xi)| *c += xi);
        }
        let inv = T::one() / T::count(dim);
        centroid.iter_mut().for_each(|c| *c *= inv);
        let toward = |from: &[T], scale: T| -> Vec<T> {
            centroid.iter().zip(from).map(|(&c, &x)| c + scale * (x - c)).collect()
        };

        let xr = toward(&simplex[dim].0, -alpha);
        let fr = eval(&xr)?;
        let second_worst = simplex[dim - 1].1;
        if fr < best {
            let xe = toward(&xr, gamma);
            let fe = eval(&xe)?;
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < second_worst {
            simplex[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst {
            let xc = toward(&xr, rho);
            let fc = eval(&xc)?;
            (xc, fc)
        } else {
            let xc = toward(&simplex[dim].0, rho);
            let fc = eval(&xc)?;
            (xc, fc)
        };
        if fc < fr.min(worst) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let base = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<T> = base.iter().zip(&vertex.0).map(|(&b, &x)| b + sigma * (x - b)).collect();
            let v = eval(&x)?;
            *vertex = (x, v);
        }
    }

    let (x, value) = simplex.swap_remove(0);
    Ok(Minimum { x, value, evaluations: evaluations.get(), converged })
}
