//! Triple-indexed Cech 2-cocycles with values in Z or in a subgroup of the
//! unit complex numbers, plus the integer Chern cocycle built from a
//! logarithm lift and evaluation against a fundamental 2-cycle.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::num::{snap_root_of_unity, INTEGRALITY_TOL};

use super::lift::LogLift;
use super::nerve::{permutation_sign, CoverNerve, TripleKey};

/// Coefficient group of a cocycle: needs the group operations and a
/// sign-power for oriented evaluation.
pub trait CechGroup: Copy + PartialEq + fmt::Debug {
    fn identity() -> Self;
    fn combine(self, other: Self) -> Self;
    fn inverse(self) -> Self;

    fn by_sign(self, sign: i32) -> Self {
        if sign >= 0 {
            self
        } else {
            self.inverse()
        }
    }
}

/// The integers, written additively.
impl CechGroup for i64 {
    fn identity() -> Self {
        0
    }
    fn combine(self, other: Self) -> Self {
        self + other
    }
    fn inverse(self) -> Self {
        -self
    }
}

/// A unit complex number, written multiplicatively. Values are snapped to
/// roots of unity at construction, so equality is exact.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Unit(pub Complex64);

impl Unit {
    pub fn snapped(z: Complex64, order: u32) -> Result<Unit> {
        Ok(Unit(snap_root_of_unity(z, order)?))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im == 0.0 {
            write!(f, "{:+}", self.0.re)
        } else {
            write!(f, "{:+}{:+}i", self.0.re, self.0.im)
        }
    }
}

impl CechGroup for Unit {
    fn identity() -> Self {
        Unit(Complex64::new(1.0, 0.0))
    }
    fn combine(self, other: Self) -> Self {
        Unit(self.0 * other.0)
    }
    fn inverse(self) -> Self {
        Unit(self.0.conj() / Complex64::new(self.0.norm_sqr(), 0.0))
    }
}

/// A 2-cocycle: one group element per (sorted triple, component), read back
/// through any index ordering with the permutation sign.
#[derive(Clone, Debug)]
pub struct CechCocycle<G> {
    values: BTreeMap<(TripleKey, usize), G>,
}

impl<G: CechGroup> CechCocycle<G> {
    pub fn from_values(values: BTreeMap<(TripleKey, usize), G>) -> CechCocycle<G> {
        CechCocycle { values }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(TripleKey, usize), &G)> {
        self.values.iter()
    }

    /// Value on an ordered triple: the stored canonical value, inverted for
    /// odd permutations (total antisymmetry).
    pub fn value(&self, ids: [usize; 3], component: usize) -> Result<G> {
        let key = TripleKey::sorted(ids);
        let sign = permutation_sign(ids);
        let v = self
            .values
            .get(&(key, component))
            .copied()
            .ok_or_else(|| Error::MissingKeys {
                keys: vec![format!(
                    "triple ({}, {}, {}) component {component}",
                    ids[0], ids[1], ids[2]
                )],
            })?;
        Ok(v.by_sign(sign))
    }

    /// The single value a triple takes across all of its components;
    /// ambiguous (multi-valued) triples are rejected.
    fn uniform_value(&self, key: TripleKey) -> Result<G> {
        let mut found: Option<G> = None;
        for ((k, _), v) in self.values.iter().filter(|((k, _), _)| *k == key) {
            match found {
                None => found = Some(*v),
                Some(prev) if prev == *v => {}
                Some(prev) => {
                    return Err(Error::NonConstant {
                        key: format!("({}, {}, {})", k.0[0], k.0[1], k.0[2]),
                        a: format!("{prev:?}"),
                        b: format!("{v:?}"),
                    })
                }
            }
        }
        found.ok_or_else(|| Error::MissingKeys {
            keys: vec![format!("triple ({}, {}, {})", key.0[0], key.0[1], key.0[2])],
        })
    }

    /// Pair the cocycle with the nerve's oriented face cycle: the signed
    /// group combination of the face values.
    pub fn evaluate_fundamental(&self, nerve: &CoverNerve) -> Result<G> {
        if nerve.oriented_faces().is_empty() {
            return Err(Error::NoFundamentalCycle);
        }
        let mut total = G::identity();
        for face in nerve.oriented_faces() {
            let key = TripleKey::sorted(face.ids);
            let v = self.uniform_value(key)?;
            let oriented = v.by_sign(permutation_sign(face.ids));
            total = total.combine(oriented.by_sign(face.sign));
        }
        Ok(total)
    }
}

/// The integer Chern cocycle `c_ijk = theta_ij + theta_jk + theta_ki` of a
/// lift: at every triple sample the sum is an integer (within tolerance) and
/// constant along each component; the rounded integers are returned.
pub fn chern_cocycle(lift: &LogLift, nerve: &CoverNerve) -> Result<CechCocycle<i64>> {
    let mut values = BTreeMap::new();
    for (key, comps) in nerve.triple_overlaps() {
        let [i, j, k] = key.0;
        for (c, comp) in comps.iter().enumerate() {
            let mut current: Option<i64> = None;
            for (s, sample) in comp.iter().enumerate() {
                let sum = lift.theta(i, j, sample.refs[0].component, sample.refs[0].index)?
                    + lift.theta(j, k, sample.refs[1].component, sample.refs[1].index)?
                    + lift.theta(k, i, sample.refs[2].component, sample.refs[2].index)?;
                let rounded = sum.re.round();
                if sum.im.abs() > INTEGRALITY_TOL || (sum.re - rounded).abs() > INTEGRALITY_TOL {
                    return Err(Error::NonIntegerSum {
                        key: format!("({i}, {j}, {k}) component {c} sample {s}"),
                        value: sum,
                        tol: INTEGRALITY_TOL,
                    });
                }
                let value = rounded as i64;
                match current {
                    None => current = Some(value),
                    Some(prev) if prev == value => {}
                    Some(prev) => {
                        return Err(Error::NonConstant {
                            key: format!("({i}, {j}, {k}) component {c}"),
                            a: prev.to_string(),
                            b: value.to_string(),
                        })
                    }
                }
            }
            values.insert((*key, c), current.expect("components are nonempty"));
        }
    }
    Ok(CechCocycle::from_values(values))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::cech::nerve::{Face, OverlapComponent, PairKey, PathRef, TripleSample};
    use std::collections::BTreeMap as Map;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    /// Boundary-of-a-3-simplex nerve with trivial one-point overlaps; the
    /// face list is the standard oriented one.
    pub(crate) fn tetrahedral_point_nerve() -> CoverNerve {
        let mut pairs = Map::new();
        for a in 0..4usize {
            for b in (a + 1)..4 {
                pairs.insert(
                    PairKey(a, b),
                    vec![OverlapComponent {
                        samples: vec![one()],
                    }],
                );
            }
        }
        let mut triples = Map::new();
        for t in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            triples.insert(
                TripleKey(t),
                vec![vec![TripleSample {
                    point: one(),
                    refs: [
                        PathRef { component: 0, index: 0 },
                        PathRef { component: 0, index: 0 },
                        PathRef { component: 0, index: 0 },
                    ],
                }]],
            );
        }
        let faces = vec![
            Face { ids: [1, 2, 3], sign: 1 },
            Face { ids: [0, 3, 2], sign: 1 },
            Face { ids: [0, 1, 3], sign: 1 },
            Face { ids: [0, 2, 1], sign: 1 },
        ];
        CoverNerve::new(
            vec!["0".into(), "1".into(), "2".into(), "3".into()],
            pairs,
            triples,
            faces,
        )
        .unwrap()
    }

    #[test]
    fn antisymmetry_through_orientation() {
        let mut values = Map::new();
        values.insert((TripleKey([0, 1, 2]), 0), 5i64);
        let c = CechCocycle::from_values(values);
        assert_eq!(c.value([0, 1, 2], 0).unwrap(), 5);
        assert_eq!(c.value([0, 2, 1], 0).unwrap(), -5);
        assert_eq!(c.value([2, 0, 1], 0).unwrap(), 5);
        assert_eq!(c.value([1, 0, 2], 0).unwrap(), -5);
    }

    #[test]
    fn identity_values_evaluate_to_identity() {
        let nerve = tetrahedral_point_nerve();
        let mut values = Map::new();
        for t in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            values.insert((TripleKey(t), 0), Unit::identity());
        }
        let c = CechCocycle::from_values(values);
        assert_eq!(c.evaluate_fundamental(&nerve).unwrap(), Unit::identity());
    }

    #[test]
    fn four_minus_ones_multiply_to_plus_one() {
        let nerve = tetrahedral_point_nerve();
        let minus = Unit(Complex64::new(-1.0, 0.0));
        let mut values = Map::new();
        for t in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            values.insert((TripleKey(t), 0), minus);
        }
        let c = CechCocycle::from_values(values);
        assert_eq!(
            c.evaluate_fundamental(&nerve).unwrap(),
            Unit(Complex64::new(1.0, 0.0))
        );
    }

    #[test]
    fn empty_face_list_is_an_error() {
        let nerve = crate::cech::nerve::tests_support::circle_path_nerve(8);
        let c: CechCocycle<i64> = CechCocycle::from_values(Map::new());
        assert!(matches!(
            c.evaluate_fundamental(&nerve),
            Err(Error::NoFundamentalCycle)
        ));
    }

    #[test]
    fn exact_quarter_sums_round_to_one() {
        // theta_ij = 1/4, theta_jk = 1/2, theta_ki = 1/4 at a sample.
        use crate::cech::transition::TransitionData;
        use crate::symplectic::Field;
        let nerve = crate::cech::transition::tests::tiny_triple_nerve();
        let mut values: Map<PairKey, Vec<Vec<Complex64>>> = Map::new();
        let quarter = Complex64::new(0.0, 1.0); // e^{2 pi i / 4}
        let half = Complex64::new(-1.0, 0.0); // e^{2 pi i / 2}
        values.insert(PairKey(0, 1), vec![vec![quarter, quarter]]);
        values.insert(PairKey(1, 2), vec![vec![half, half]]);
        // r_ki = e^{2 pi i /4} means r_ik = e^{-2 pi i/4}: stored canonically.
        values.insert(PairKey(0, 2), vec![vec![-quarter, -quarter]]);
        let t = TransitionData::new(&nerve, Field::Complex, values).unwrap();
        let lift = super::super::lift::lift_logs(&t).unwrap();
        // Principal branches: 1/4, 1/2, and theta_20 = -theta_02 = 1/4.
        let c = chern_cocycle(&lift, &nerve).unwrap();
        assert_eq!(c.value([0, 1, 2], 0).unwrap(), 1);
    }

    /// Four sets sharing one point: the alternating quadruple sum of the
    /// Chern cocycle vanishes (it is a simplicial cocycle).
    #[test]
    fn quadruple_alternating_sum_vanishes() {
        use crate::cech::transition::TransitionData;
        use crate::symplectic::Field;
        let nerve = tetrahedral_point_nerve();
        // Transitions from genuine per-set scalars v_i at the common point:
        // r_ij = v_j / v_i satisfies every identity by construction.
        let v = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-0.7, 0.4),
            Complex64::new(0.3, -1.1),
        ];
        let mut values = Map::new();
        for a in 0..4usize {
            for b in (a + 1)..4 {
                values.insert(PairKey(a, b), vec![vec![v[b] / v[a]]]);
            }
        }
        let t = TransitionData::new(&nerve, Field::Complex, values).unwrap();
        let lift = super::super::lift::lift_logs(&t).unwrap();
        let c = chern_cocycle(&lift, &nerve).unwrap();
        let total = c.value([1, 2, 3], 0).unwrap() - c.value([0, 2, 3], 0).unwrap()
            + c.value([0, 1, 3], 0).unwrap()
            - c.value([0, 1, 2], 0).unwrap();
        assert_eq!(total, 0);
    }

    #[test]
    fn trivial_lift_gives_zero_cocycle() {
        use crate::cech::transition::trivial_transitions;
        use crate::symplectic::Field;
        let nerve = crate::cech::transition::tests::tiny_triple_nerve();
        let t = trivial_transitions(&nerve, Field::Complex);
        let lift = super::super::lift::lift_logs(&t).unwrap();
        let c = chern_cocycle(&lift, &nerve).unwrap();
        assert_eq!(c.value([0, 1, 2], 0).unwrap(), 0);
    }
}
