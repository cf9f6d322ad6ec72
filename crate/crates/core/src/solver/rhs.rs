//! Pseudospectral evaluation of the nonlinear forcing `(f, g)`.
//!
//! Derivatives are taken in Fourier space; products and compositions are
//! formed on the padded product grid and truncated back.

use rayon::prelude::*;

use super::model::{CoefficientModel, DerivedSeries};
use crate::bony::{compose_samples, PowerSeries};
use crate::error::{Error, Result};
use crate::linear::LinearParams;
use crate::spectral::{laplacian, partial, ProductEngine, SpectralField, State};

/// `f` and `g = g1 + ... + g5`, with the parts kept for inspection.
#[derive(Clone, Debug)]
pub struct NonlinearTerms {
    pub f: SpectralField,
    pub g: Vec<SpectralField>,
    /// `[g1, g2, g3, g4, g5]`, each a velocity-shaped vector.
    pub parts: [Vec<SpectralField>; 5],
    /// Largest dropped series tail `sum_{n > M} |c_n| sup|a|^n`.
    pub truncation_tail: f64,
}

/// Precomputed series and engine for repeated evaluation on one grid.
#[derive(Clone, Debug)]
pub struct NonlinearOperator {
    engine: ProductEngine,
    params: LinearParams,
    derived: DerivedSeries,
    truncation: usize,
}

fn pointwise(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.par_iter().zip(y.par_iter()).map(|(a, b)| a * b).collect()
}

impl NonlinearOperator {
    pub fn new(engine: ProductEngine, params: LinearParams, model: &CoefficientModel) -> Result<Self> {
        if !engine.is_padded() {
            return Err(Error::Unpadded);
        }
        params.validate()?;
        model.validate()?;
        Ok(NonlinearOperator {
            engine,
            params,
            derived: model.derived(),
            truncation: model.truncation,
        })
    }

    pub fn engine(&self) -> &ProductEngine {
        &self.engine
    }

    /// `F(a)` on the product grid, or `None` when `F` vanishes identically.
    fn compose(&self, series: &PowerSeries, a: &[f64], tail: &mut f64) -> Result<Option<Vec<f64>>> {
        if series.is_zero() {
            return Ok(None);
        }
        let (values, sup) = compose_samples(series, a, self.truncation)?;
        *tail = tail.max(series.tail_bound(sup, self.truncation));
        Ok(Some(values))
    }

    pub fn evaluate(&self, state: &State) -> Result<NonlinearTerms> {
        let grid = state.grid().clone();
        if *self.engine.grid() != grid {
            return Err(Error::GridMismatch("state and product engine use different grids".into()));
        }
        let d = grid.dim();
        let e = &self.engine;
        let (mu, lambda, kappa) = (self.params.shear, self.params.bulk, self.params.capillarity);
        let zero = || SpectralField::zeros(&grid);

        let a_ph = e.to_physical(&state.a);
        let u_ph: Vec<Vec<f64>> = state.u.iter().map(|c| e.to_physical(c)).collect();
        let grad_u: Vec<Vec<SpectralField>> = state
            .u
            .iter()
            .map(|c| (0..d).map(|j| partial(c, j)).collect())
            .collect();
        let grad_u_ph: Vec<Vec<Vec<f64>>> = grad_u
            .iter()
            .map(|row| row.iter().map(|c| e.to_physical(c)).collect())
            .collect();
        let grad_a: Vec<SpectralField> = (0..d).map(|j| partial(&state.a, j)).collect();
        let grad_a_ph: Vec<Vec<f64>> = grad_a.iter().map(|c| e.to_physical(c)).collect();
        let div_u = (0..d).fold(zero(), |acc, i| acc.add(&grad_u[i][i]));
        let div_u_ph = e.to_physical(&div_u);

        let mut tail: f64 = 0.0;
        let ds = &self.derived;
        let inertia = self.compose(&ds.inertia, &a_ph, &mut tail)?;
        let pressure = self.compose(&ds.pressure, &a_ph, &mut tail)?;
        let mu_t = self.compose(&ds.mu_tilde, &a_ph, &mut tail)?;
        let lambda_t = self.compose(&ds.lambda_tilde, &a_ph, &mut tail)?;
        let kappa_t = self.compose(&ds.kappa_tilde, &a_ph, &mut tail)?;
        let kappa_tp = self.compose(&ds.kappa_tilde_prime, &a_ph, &mut tail)?;

        // f = -div(a u).
        let f = (0..d).fold(zero(), |acc, j| {
            let flux = e.from_physical(&pointwise(&a_ph, &u_ph[j]));
            acc.sub(&partial(&flux, j))
        });

        // g1 = -u.grad u.
        let g1: Vec<SpectralField> = (0..d)
            .map(|i| {
                let mut acc = vec![0.0; a_ph.len()];
                for j in 0..d {
                    for (s, (x, y)) in acc.iter_mut().zip(u_ph[j].iter().zip(&grad_u_ph[i][j])) {
                        *s -= x * y;
                    }
                }
                e.from_physical(&acc)
            })
            .collect();

        // g2 = (1 - I(a)) (2 mu div(mu~(a) Du) + lambda grad(lambda~(a) div u)).
        let g2: Vec<SpectralField> = if mu_t.is_none() && lambda_t.is_none() {
            (0..d).map(|_| zero()).collect()
        } else {
            (0..d)
                .map(|i| {
                    let mut bracket = zero();
                    if let Some(m) = &mu_t {
                        for j in 0..d {
                            let strain: Vec<f64> = grad_u_ph[i][j]
                                .iter()
                                .zip(&grad_u_ph[j][i])
                                .zip(m)
                                .map(|((x, y), w)| 2.0 * mu * w * 0.5 * (x + y))
                                .collect();
                            bracket.add_assign(&partial(&e.from_physical(&strain), j));
                        }
                    }
                    if let Some(l) = &lambda_t {
                        let s = e.from_physical(&pointwise(l, &div_u_ph));
                        bracket.add_assign(&partial(&s, i).scaled(lambda));
                    }
                    let b_ph = e.to_physical(&bracket);
                    let vals: Vec<f64> = match &inertia {
                        Some(iv) => b_ph.iter().zip(iv).map(|(b, w)| (1.0 - w) * b).collect(),
                        None => b_ph,
                    };
                    e.from_physical(&vals)
                })
                .collect()
        };

        // g3 = -I(a) A u with A u = mu Lap u + (mu + lambda) grad div u.
        let g3: Vec<SpectralField> = (0..d)
            .map(|i| match &inertia {
                None => zero(),
                Some(iv) => {
                    let au = laplacian(&state.u[i]).scaled(mu).add(&partial(&div_u, i).scaled(mu + lambda));
                    let vals: Vec<f64> = e.to_physical(&au).iter().zip(iv).map(|(x, w)| -w * x).collect();
                    e.from_physical(&vals)
                }
            })
            .collect();

        // g4 = J(a) grad a.
        let g4: Vec<SpectralField> = (0..d)
            .map(|i| match &pressure {
                None => zero(),
                Some(jv) => e.from_physical(&pointwise(jv, &grad_a_ph[i])),
            })
            .collect();

        // g5 = kappa grad(kappa~(a) Lap a + kappa~'(a) |grad a|^2 / 2).
        let g5: Vec<SpectralField> = match (&kappa_t, &kappa_tp) {
            (None, None) => (0..d).map(|_| zero()).collect(),
            _ => {
                let lap_ph = e.to_physical(&laplacian(&state.a));
                let mut scalar = vec![0.0; a_ph.len()];
                if let Some(k) = &kappa_t {
                    for (s, (w, l)) in scalar.iter_mut().zip(k.iter().zip(&lap_ph)) {
                        *s += w * l;
                    }
                }
                if let Some(kp) = &kappa_tp {
                    for j in 0..d {
                        for (s, (w, g)) in scalar.iter_mut().zip(kp.iter().zip(&grad_a_ph[j])) {
                            *s += 0.5 * w * g * g;
                        }
                    }
                }
                let s = e.from_physical(&scalar);
                (0..d).map(|i| partial(&s, i).scaled(kappa)).collect()
            }
        };

        let g = (0..d)
            .map(|i| {
                let mut acc = g1[i].clone();
                for part in [&g2, &g3, &g4, &g5] {
                    acc.add_assign(&part[i]);
                }
                acc
            })
            .collect();
        Ok(NonlinearTerms {
            f,
            g,
            parts: [g1, g2, g3, g4, g5],
            truncation_tail: tail,
        })
    }
}

/// One-shot evaluation; builds a padded engine for the state's grid.
pub fn nonlinear_rhs(state: &State, params: &LinearParams, model: &CoefficientModel) -> Result<NonlinearTerms> {
    NonlinearOperator::new(ProductEngine::padded(state.grid()), *params, model)?.evaluate(state)
}
