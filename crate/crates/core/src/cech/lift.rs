//! Logarithm lifts of transition data: functions `theta_ij` with
//! `r_ij = e^{2 pi i theta_ij}`, chosen on the principal branch at the first
//! sample of each component and continued along the path.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::num;

use super::nerve::PairKey;
use super::transition::TransitionData;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Lifted exponents, keyed like the transition data they came from.
/// Complex-valued in general; for unitary data the imaginary part vanishes.
#[derive(Clone, Debug)]
pub struct LogLift {
    values: BTreeMap<PairKey, Vec<Vec<Complex64>>>,
}

impl LogLift {
    /// `theta_ab` at a sample, with `theta_ba = -theta_ab` built in.
    pub fn theta(&self, a: usize, b: usize, component: usize, index: usize) -> Result<Complex64> {
        let (key, inverted) = PairKey::oriented(a, b);
        let v = self
            .values
            .get(&key)
            .and_then(|comps| comps.get(component))
            .and_then(|vals| vals.get(index))
            .copied()
            .ok_or_else(|| Error::MissingKeys {
                keys: vec![format!("({a}, {b}) component {component} sample {index}")],
            })?;
        Ok(if inverted { -v } else { v })
    }

    /// Shift whole components by integers. Any such shift is another valid
    /// lift of the same data; the induced Cech cocycle moves by an integer
    /// coboundary.
    pub fn with_integer_offsets<F>(&self, offset: F) -> LogLift
    where
        F: Fn(PairKey, usize) -> i64,
    {
        let values = self
            .values
            .iter()
            .map(|(k, comps)| {
                (
                    *k,
                    comps
                        .iter()
                        .enumerate()
                        .map(|(c, vals)| {
                            let shift = Complex64::new(offset(*k, c) as f64, 0.0);
                            vals.iter().map(|&v| v + shift).collect()
                        })
                        .collect(),
                )
            })
            .collect();
        LogLift { values }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&PairKey, &Vec<Vec<Complex64>>)> {
        self.values.iter()
    }
}

/// Lift every component path: principal branch at the first sample, then
/// argument continuation; consecutive increments at or beyond pi are
/// rejected as aliased, naming the offending component.
pub fn lift_logs(t: &TransitionData) -> Result<LogLift> {
    let mut values = BTreeMap::new();
    for (key, comps) in t.pairs() {
        let mut lifted_comps = Vec::with_capacity(comps.len());
        for (c, vals) in comps.iter().enumerate() {
            let mut lifted = Vec::with_capacity(vals.len());
            let first = vals[0];
            let mut arg = num::principal_arg(first);
            lifted.push(theta_of(arg, first.norm()));
            for (s, pair) in vals.windows(2).enumerate() {
                let inc = num::arg_increment(pair[0], pair[1]).map_err(|e| match e {
                    Error::Aliasing { increment, .. } => Error::Aliasing {
                        location: format!(
                            "overlap ({}, {}) component {c}, samples {s} -> {}",
                            key.0,
                            key.1,
                            s + 1
                        ),
                        increment,
                    },
                    other => other,
                })?;
                arg += inc;
                lifted.push(theta_of(arg, pair[1].norm()));
            }
            lifted_comps.push(lifted);
        }
        values.insert(*key, lifted_comps);
    }
    Ok(LogLift { values })
}

fn theta_of(arg: f64, modulus: f64) -> Complex64 {
    Complex64::new(arg / TWO_PI, -modulus.ln() / TWO_PI)
}

/// Exponentiate a lifted value back: `e^{2 pi i theta}`.
pub fn unlift(theta: Complex64) -> Complex64 {
    (Complex64::new(0.0, TWO_PI) * theta).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::nerve::tests_support::circle_path_nerve;
    use crate::cech::transition::transitions_from_fn;
    use crate::symplectic::Field;

    #[test]
    fn constant_one_lifts_to_zero() {
        let nerve = circle_path_nerve(24);
        let t = transitions_from_fn(&nerve, Field::Complex, |_, _| Complex64::new(1.0, 0.0))
            .unwrap();
        let lift = lift_logs(&t).unwrap();
        for idx in [0, 7, 23] {
            assert!((lift.theta(0, 1, 0, idx).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn unit_circle_walk_gains_one() {
        // r walks once around the unit circle along the component path.
        let nerve = circle_path_nerve(64);
        let t = transitions_from_fn(&nerve, Field::Complex, |_, p| p).unwrap();
        let lift = lift_logs(&t).unwrap();
        let start = lift.theta(0, 1, 0, 0).unwrap();
        let end = lift.theta(0, 1, 0, 63).unwrap();
        assert!((end - start - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn constant_minus_one_lifts_to_half() {
        let nerve = circle_path_nerve(8);
        let t = transitions_from_fn(&nerve, Field::Complex, |_, _| Complex64::new(-1.0, 0.0))
            .unwrap();
        let lift = lift_logs(&t).unwrap();
        let v = lift.theta(0, 1, 0, 3).unwrap();
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lift_inverts_through_exponential() {
        let nerve = circle_path_nerve(48);
        let t = transitions_from_fn(&nerve, Field::Complex, |_, p| {
            p * Complex64::new(2.0, 0.3)
        })
        .unwrap();
        let lift = lift_logs(&t).unwrap();
        for idx in [0, 17, 31, 47] {
            let r = t.value(0, 1, 0, idx).unwrap();
            let theta = lift.theta(0, 1, 0, idx).unwrap();
            assert!((unlift(theta) - r).norm() < 1e-12);
            // Antisymmetry.
            assert!((lift.theta(1, 0, 0, idx).unwrap() + theta).norm() < 1e-15);
        }
    }

    #[test]
    fn aliasing_is_detected_and_named() {
        // Sample points alternate between +1 and -1: every increment is pi.
        let points: Vec<Complex64> = (0..6)
            .map(|k| Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        let nerve = crate::cech::nerve::tests_support::path_nerve(points);
        let t = transitions_from_fn(&nerve, Field::Complex, |_, p| p).unwrap();
        match lift_logs(&t) {
            Err(Error::Aliasing { location, .. }) => {
                assert!(location.contains("overlap (0, 1) component 0"));
            }
            other => panic!("expected aliasing error, got {other:?}"),
        }
    }
}
