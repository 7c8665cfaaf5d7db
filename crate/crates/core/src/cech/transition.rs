//! Scalar transition functions sampled on overlap paths: the concrete
//! representation of a line bundle over a covered base.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::num::COCYCLE_TOL;
use crate::symplectic::Field;

use super::nerve::{CoverNerve, PairKey};

/// Nonzero scalars `r_ij` sampled along each overlap component, stored for
/// the canonical pair orientation; the reversed pair reads the reciprocal.
#[derive(Clone, Debug)]
pub struct TransitionData {
    field: Field,
    values: BTreeMap<PairKey, Vec<Vec<Complex64>>>,
}

/// Outcome of checking `r_ij r_jk r_ki = 1` over all triple samples.
#[derive(Clone, Debug)]
pub struct CocycleReport {
    pub pass: bool,
    pub max_deviation: f64,
    /// Key of the worst triple sample, as `"(i,j,k) component c sample s"`.
    pub worst: Option<String>,
    pub samples_checked: usize,
}

impl TransitionData {
    /// Validate against a nerve: every pair overlap needs a matching value
    /// path, and every value must be nonzero.
    pub fn new(
        nerve: &CoverNerve,
        field: Field,
        values: BTreeMap<PairKey, Vec<Vec<Complex64>>>,
    ) -> Result<TransitionData> {
        let mut missing = Vec::new();
        for (key, comps) in nerve.pair_overlaps() {
            match values.get(key) {
                None => missing.push(format!("({}, {})", key.0, key.1)),
                Some(vcomps) => {
                    if vcomps.len() != comps.len() {
                        missing.push(format!("({}, {}) component count", key.0, key.1));
                        continue;
                    }
                    for (c, (vals, comp)) in vcomps.iter().zip(comps).enumerate() {
                        if vals.len() != comp.samples.len() {
                            missing.push(format!("({}, {}) component {c} length", key.0, key.1));
                        }
                    }
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::MissingKeys { keys: missing });
        }
        for (key, comps) in &values {
            for (c, vals) in comps.iter().enumerate() {
                for (s, v) in vals.iter().enumerate() {
                    if v.norm() == 0.0 {
                        return Err(Error::ZeroValue {
                            context: format!(
                                "transition value at ({}, {}) component {c} sample {s}",
                                key.0, key.1
                            ),
                        });
                    }
                }
            }
        }
        Ok(TransitionData { field, values })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&PairKey, &Vec<Vec<Complex64>>)> {
        self.values.iter()
    }

    /// `r_ab` at a sample; antisymmetry `r_ba = 1 / r_ab` is built in.
    pub fn value(&self, a: usize, b: usize, component: usize, index: usize) -> Result<Complex64> {
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
        Ok(if inverted { v.inv() } else { v })
    }

    /// Max deviation of the triple products from 1 over all triple samples.
    pub fn check_cocycle(&self, nerve: &CoverNerve) -> Result<CocycleReport> {
        let mut max_deviation = 0.0f64;
        let mut worst = None;
        let mut samples_checked = 0;
        for (key, comps) in nerve.triple_overlaps() {
            let [i, j, k] = key.0;
            for (c, comp) in comps.iter().enumerate() {
                for (s, sample) in comp.iter().enumerate() {
                    let rij = self.value(i, j, sample.refs[0].component, sample.refs[0].index)?;
                    let rjk = self.value(j, k, sample.refs[1].component, sample.refs[1].index)?;
                    let rki = self.value(k, i, sample.refs[2].component, sample.refs[2].index)?;
                    let dev = (rij * rjk * rki - Complex64::new(1.0, 0.0)).norm();
                    samples_checked += 1;
                    if dev > max_deviation {
                        max_deviation = dev;
                        worst = Some(format!("({i}, {j}, {k}) component {c} sample {s}"));
                    }
                }
            }
        }
        Ok(CocycleReport {
            pass: max_deviation < COCYCLE_TOL,
            max_deviation,
            worst,
            samples_checked,
        })
    }

    /// Replace every value by its unit part `r / |r|`.
    pub fn unitarize(&self) -> TransitionData {
        self.map(|v| v / Complex64::new(v.norm(), 0.0))
    }

    /// Pointwise product; the represented bundles tensor.
    pub fn tensor(&self, other: &TransitionData) -> Result<TransitionData> {
        if !same_shape(&self.values, &other.values) {
            return Err(Error::MissingKeys {
                keys: vec!["operands have different key sets".into()],
            });
        }
        let mut values = self.values.clone();
        for (key, comps) in values.iter_mut() {
            let rhs = &other.values[key];
            for (c, vals) in comps.iter_mut().enumerate() {
                for (s, v) in vals.iter_mut().enumerate() {
                    *v *= rhs[c][s];
                }
            }
        }
        Ok(TransitionData {
            field: self.field,
            values,
        })
    }

    /// Pointwise reciprocal; the dual bundle.
    pub fn inverse(&self) -> TransitionData {
        self.map(|v| v.inv())
    }

    /// Pointwise square; the tensor square.
    pub fn square(&self) -> TransitionData {
        self.map(|v| v * v)
    }

    /// Integer tensor power (negative powers through the dual).
    pub fn power(&self, d: i64) -> TransitionData {
        self.map(|v| v.powi(d as i32))
    }

    /// Conjugate by per-set scalars: `r'_ij = b_i r_ij b_j^{-1}` with `b`
    /// evaluated at each sample point. Coboundary perturbations leave the
    /// represented class unchanged.
    pub fn perturb_by_coboundary<F>(&self, nerve: &CoverNerve, b: F) -> Result<TransitionData>
    where
        F: Fn(usize, Complex64) -> Complex64,
    {
        let mut values = self.values.clone();
        for (key, comps) in values.iter_mut() {
            let paths = &nerve.pair_overlaps()[key];
            for (c, vals) in comps.iter_mut().enumerate() {
                for (s, v) in vals.iter_mut().enumerate() {
                    let point = paths[c].samples[s];
                    let bi = b(key.0, point);
                    let bj = b(key.1, point);
                    if bi.norm() == 0.0 || bj.norm() == 0.0 {
                        return Err(Error::ZeroValue {
                            context: format!(
                                "coboundary value at ({}, {}) component {c} sample {s}",
                                key.0, key.1
                            ),
                        });
                    }
                    *v = bi * *v / bj;
                }
            }
        }
        Ok(TransitionData {
            field: self.field,
            values,
        })
    }

    fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> TransitionData {
        let values = self
            .values
            .iter()
            .map(|(k, comps)| {
                (
                    *k,
                    comps
                        .iter()
                        .map(|vals| vals.iter().map(|&v| f(v)).collect())
                        .collect(),
                )
            })
            .collect();
        TransitionData {
            field: self.field,
            values,
        }
    }
}

fn same_shape(
    a: &BTreeMap<PairKey, Vec<Vec<Complex64>>>,
    b: &BTreeMap<PairKey, Vec<Vec<Complex64>>>,
) -> bool {
    a.len() == b.len()
        && a.iter().zip(b.iter()).all(|((ka, ca), (kb, cb))| {
            ka == kb
                && ca.len() == cb.len()
                && ca.iter().zip(cb).all(|(x, y)| x.len() == y.len())
        })
}

/// All-ones transition data over a nerve: the trivial bundle.
pub fn trivial_transitions(nerve: &CoverNerve, field: Field) -> TransitionData {
    let values = nerve
        .pair_overlaps()
        .iter()
        .map(|(k, comps)| {
            (
                *k,
                comps
                    .iter()
                    .map(|c| vec![Complex64::new(1.0, 0.0); c.samples.len()])
                    .collect(),
            )
        })
        .collect();
    TransitionData { field, values }
}

/// Build transition data by evaluating a function of (pair, sample point).
pub fn transitions_from_fn<F>(nerve: &CoverNerve, field: Field, f: F) -> Result<TransitionData>
where
    F: Fn(PairKey, Complex64) -> Complex64,
{
    let values = nerve
        .pair_overlaps()
        .iter()
        .map(|(k, comps)| {
            (
                *k,
                comps
                    .iter()
                    .map(|c| c.samples.iter().map(|&p| f(*k, p)).collect())
                    .collect(),
            )
        })
        .collect();
    TransitionData::new(nerve, field, values)
}
