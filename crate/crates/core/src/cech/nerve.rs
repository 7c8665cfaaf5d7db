//! Finite covers as combinatorial nerves: set ids, pairwise overlap
//! components carrying ordered sample paths, triple-overlap samples tied
//! back into the pair paths, and an oriented face list forming the
//! fundamental 2-cycle when the base is a closed oriented surface.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Canonically ordered pair of set indices (`0 < 1`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct PairKey(pub usize, pub usize);

impl PairKey {
    /// Canonicalize; the flag records whether the input was reversed.
    pub fn oriented(a: usize, b: usize) -> (PairKey, bool) {
        if a <= b {
            (PairKey(a, b), false)
        } else {
            (PairKey(b, a), true)
        }
    }
}

/// Canonically sorted triple of set indices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct TripleKey(pub [usize; 3]);

impl TripleKey {
    pub fn sorted(ids: [usize; 3]) -> TripleKey {
        let mut s = ids;
        s.sort_unstable();
        TripleKey(s)
    }

    /// The three pair keys of the sorted triple, in the fixed order
    /// `(i,j), (j,k), (i,k)`.
    pub fn pairs(&self) -> [PairKey; 3] {
        let [i, j, k] = self.0;
        [PairKey(i, j), PairKey(j, k), PairKey(i, k)]
    }
}

/// Parity of the permutation taking `ids` to sorted order: `1` for even,
/// `-1` for odd.
pub fn permutation_sign(ids: [usize; 3]) -> i32 {
    let mut s = ids;
    let mut sign = 1;
    if s[0] > s[1] {
        s.swap(0, 1);
        sign = -sign;
    }
    if s[1] > s[2] {
        s.swap(1, 2);
        sign = -sign;
    }
    if s[0] > s[1] {
        sign = -sign;
    }
    sign
}

/// Position of a sample inside one pair overlap's component path.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PathRef {
    pub component: usize,
    pub index: usize,
}

/// A point of a triple overlap, tied into the three pairwise sample paths.
/// `refs[r]` indexes the path of `TripleKey::pairs()[r]`.
#[derive(Clone, Debug)]
pub struct TripleSample {
    pub point: Complex64,
    pub refs: [PathRef; 3],
}

/// One connected component of a pairwise overlap: an ordered sample path.
#[derive(Clone, Debug)]
pub struct OverlapComponent {
    pub samples: Vec<Complex64>,
}

/// An oriented 2-simplex of the nerve with a multiplicity sign.
#[derive(Clone, Copy, Debug)]
pub struct Face {
    pub ids: [usize; 3],
    pub sign: i32,
}

/// Abstract finite cover with overlap combinatorics.
#[derive(Clone, Debug)]
pub struct CoverNerve {
    set_ids: Vec<String>,
    pair_overlaps: BTreeMap<PairKey, Vec<OverlapComponent>>,
    triple_overlaps: BTreeMap<TripleKey, Vec<Vec<TripleSample>>>,
    oriented_faces: Vec<Face>,
}

/// Tolerance for a triple sample agreeing with the pair-path points it
/// references.
const POINT_TOL: f64 = 1e-9;

impl CoverNerve {
    pub fn new(
        set_ids: Vec<String>,
        pair_overlaps: BTreeMap<PairKey, Vec<OverlapComponent>>,
        triple_overlaps: BTreeMap<TripleKey, Vec<Vec<TripleSample>>>,
        oriented_faces: Vec<Face>,
    ) -> Result<CoverNerve> {
        let n = set_ids.len();
        for (key, comps) in &pair_overlaps {
            if key.0 >= key.1 || key.1 >= n {
                return Err(Error::InvalidNerve(format!(
                    "pair key ({}, {}) out of range or not canonical",
                    key.0, key.1
                )));
            }
            for (c, comp) in comps.iter().enumerate() {
                if comp.samples.is_empty() {
                    return Err(Error::InvalidNerve(format!(
                        "pair ({}, {}) component {c} has no samples",
                        key.0, key.1
                    )));
                }
            }
        }
        for (key, comps) in &triple_overlaps {
            let [i, j, k] = key.0;
            if !(i < j && j < k && k < n) {
                return Err(Error::InvalidNerve(format!(
                    "triple key ({i}, {j}, {k}) out of range or not sorted"
                )));
            }
            for comp in comps {
                for sample in comp {
                    // Every triple sample must lie on all three pair paths.
                    for (r, pair) in key.pairs().iter().enumerate() {
                        let pref = sample.refs[r];
                        let path = pair_overlaps
                            .get(pair)
                            .and_then(|cs| cs.get(pref.component))
                            .ok_or_else(|| {
                                Error::InvalidNerve(format!(
                                    "triple ({i}, {j}, {k}) references missing overlap \
                                     ({}, {}) component {}",
                                    pair.0, pair.1, pref.component
                                ))
                            })?;
                        let pt = path.samples.get(pref.index).ok_or_else(|| {
                            Error::InvalidNerve(format!(
                                "triple ({i}, {j}, {k}) reference index {} out of range",
                                pref.index
                            ))
                        })?;
                        if (pt - sample.point).norm() > POINT_TOL {
                            return Err(Error::InvalidNerve(format!(
                                "triple ({i}, {j}, {k}) sample at {} disagrees with pair \
                                 ({}, {}) path point {}",
                                sample.point, pair.0, pair.1, pt
                            )));
                        }
                    }
                }
            }
        }
        for face in &oriented_faces {
            let [a, b, c] = face.ids;
            if a == b || b == c || a == c || a >= n || b >= n || c >= n {
                return Err(Error::InvalidNerve(format!(
                    "face ({a}, {b}, {c}) is degenerate or out of range"
                )));
            }
            let key = TripleKey::sorted(face.ids);
            if !triple_overlaps.contains_key(&key) {
                return Err(Error::InvalidNerve(format!(
                    "face ({a}, {b}, {c}) has no triple-overlap data"
                )));
            }
        }
        // Boundary closure: every oriented edge of the face multiset cancels.
        if !oriented_faces.is_empty() {
            let mut edge_counts: BTreeMap<PairKey, i64> = BTreeMap::new();
            for face in &oriented_faces {
                let [a, b, c] = face.ids;
                for (u, v) in [(a, b), (b, c), (c, a)] {
                    let (key, inverted) = PairKey::oriented(u, v);
                    let orient = if inverted { -1 } else { 1 };
                    *edge_counts.entry(key).or_insert(0) += i64::from(face.sign * orient);
                }
            }
            if let Some((key, count)) = edge_counts.iter().find(|(_, &c)| c != 0) {
                return Err(Error::InvalidNerve(format!(
                    "oriented faces are not a cycle: edge ({}, {}) has net count {count}",
                    key.0, key.1
                )));
            }
        }
        Ok(CoverNerve {
            set_ids,
            pair_overlaps,
            triple_overlaps,
            oriented_faces,
        })
    }

    pub fn set_ids(&self) -> &[String] {
        &self.set_ids
    }

    pub fn set_index(&self, id: &str) -> Result<usize> {
        self.set_ids
            .iter()
            .position(|s| s == id)
            .ok_or_else(|| Error::UnknownSet(id.to_string()))
    }

    pub fn pair_overlaps(&self) -> &BTreeMap<PairKey, Vec<OverlapComponent>> {
        &self.pair_overlaps
    }

    pub fn triple_overlaps(&self) -> &BTreeMap<TripleKey, Vec<Vec<TripleSample>>> {
        &self.triple_overlaps
    }

    pub fn oriented_faces(&self) -> &[Face] {
        &self.oriented_faces
    }

    pub fn component(&self, pair: PairKey, component: usize) -> Result<&OverlapComponent> {
        self.pair_overlaps
            .get(&pair)
            .and_then(|cs| cs.get(component))
            .ok_or_else(|| {
                Error::InvalidNerve(format!(
                    "missing overlap ({}, {}) component {component}",
                    pair.0, pair.1
                ))
            })
    }

    /// Find the triple sample (if any) whose references include both given
    /// path positions; used to tie chart switches to triple points.
    pub fn triple_sample_linking(
        &self,
        triple: TripleKey,
        a: (PairKey, PathRef),
        b: (PairKey, PathRef),
    ) -> Option<(&TripleSample, usize)> {
        let comps = self.triple_overlaps.get(&triple)?;
        let pairs = triple.pairs();
        for (ci, comp) in comps.iter().enumerate() {
            for sample in comp {
                let mut hit_a = false;
                let mut hit_b = false;
                for (r, pair) in pairs.iter().enumerate() {
                    if *pair == a.0 && sample.refs[r] == a.1 {
                        hit_a = true;
                    }
                    if *pair == b.0 && sample.refs[r] == b.1 {
                        hit_b = true;
                    }
                }
                if hit_a && hit_b {
                    return Some((sample, ci));
                }
            }
        }
        None
    }
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    /// Two-set nerve whose single overlap component carries the given path.
    pub(crate) fn path_nerve(samples: Vec<Complex64>) -> CoverNerve {
        let mut pairs = BTreeMap::new();
        pairs.insert(PairKey(0, 1), vec![OverlapComponent { samples }]);
        CoverNerve::new(
            vec!["U0".into(), "U1".into()],
            pairs,
            BTreeMap::new(),
            vec![],
        )
        .unwrap()
    }

    /// Path nerve whose samples walk the unit circle once.
    pub(crate) fn circle_path_nerve(n: usize) -> CoverNerve {
        path_nerve(
            (0..n)
                .map(|k| {
                    Complex64::from_polar(
                        1.0,
                        2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64,
                    )
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(permutation_sign([0, 1, 2]), 1);
        assert_eq!(permutation_sign([0, 2, 1]), -1);
        assert_eq!(permutation_sign([2, 0, 1]), 1);
        assert_eq!(permutation_sign([2, 1, 0]), -1);
        assert_eq!(permutation_sign([1, 2, 0]), 1);
        assert_eq!(permutation_sign([1, 0, 2]), -1);
    }

    #[test]
    fn face_cycle_must_close() {
        let mut pairs = BTreeMap::new();
        for key in [PairKey(0, 1), PairKey(0, 2), PairKey(1, 2)] {
            pairs.insert(
                key,
                vec![OverlapComponent {
                    samples: vec![z(0.0, 0.0)],
                }],
            );
        }
        let mut triples = BTreeMap::new();
        triples.insert(
            TripleKey([0, 1, 2]),
            vec![vec![TripleSample {
                point: z(0.0, 0.0),
                refs: [
                    PathRef { component: 0, index: 0 },
                    PathRef { component: 0, index: 0 },
                    PathRef { component: 0, index: 0 },
                ],
            }]],
        );
        let ids = vec!["a".into(), "b".into(), "c".into()];
        // A single face in a three-set nerve cannot cancel its edges.
        let err = CoverNerve::new(
            ids.clone(),
            pairs.clone(),
            triples.clone(),
            vec![Face { ids: [0, 1, 2], sign: 1 }],
        );
        assert!(matches!(err, Err(Error::InvalidNerve(_))));
        // The same face with both orientations does cancel.
        let ok = CoverNerve::new(
            ids,
            pairs,
            triples,
            vec![
                Face { ids: [0, 1, 2], sign: 1 },
                Face { ids: [0, 2, 1], sign: 1 },
            ],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn triple_refs_must_hit_path_points() {
        let mut pairs = BTreeMap::new();
        for key in [PairKey(0, 1), PairKey(0, 2), PairKey(1, 2)] {
            pairs.insert(
                key,
                vec![OverlapComponent {
                    samples: vec![z(1.0, 0.0)],
                }],
            );
        }
        let mut triples = BTreeMap::new();
        triples.insert(
            TripleKey([0, 1, 2]),
            vec![vec![TripleSample {
                point: z(0.0, 0.0), // disagrees with the paths
                refs: [
                    PathRef { component: 0, index: 0 },
                    PathRef { component: 0, index: 0 },
                    PathRef { component: 0, index: 0 },
                ],
            }]],
        );
        let err = CoverNerve::new(
            vec!["a".into(), "b".into(), "c".into()],
            pairs,
            triples,
            vec![],
        );
        assert!(matches!(err, Err(Error::InvalidNerve(_))));
    }

    #[test]
    fn path_nerve_builds() {
        let nerve = tests_support::circle_path_nerve(16);
        assert_eq!(nerve.set_ids().len(), 2);
        assert_eq!(nerve.pair_overlaps()[&PairKey(0, 1)][0].samples.len(), 16);
    }
}
