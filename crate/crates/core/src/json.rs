//! Wire formats. Complex entries are always `[re, im]` pairs; real data
//! carries a zero imaginary part.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cech::{
    CoverNerve, Face, OverlapComponent, PairKey, PathRef, TransitionData, TripleKey, TripleSample,
};
use crate::error::{Error, Result};
use crate::symplectic::{Field, LagrangianFrame, LagrangianLoop, SymplecticSpace};

fn field_name(field: Field) -> &'static str {
    match field {
        Field::Real => "real",
        Field::Complex => "complex",
    }
}

fn parse_field(name: &str) -> Result<Field> {
    match name {
        "real" => Ok(Field::Real),
        "complex" => Ok(Field::Complex),
        other => Err(Error::InvalidReference(format!(
            "unknown field tag {other:?}; expected \"real\" or \"complex\""
        ))),
    }
}

fn pack(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpack(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

/// Frames and loops: `samples` holds row-major `2n x n` matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopJson {
    pub field: String,
    pub n: usize,
    pub samples: Vec<Vec<[f64; 2]>>,
    pub closed: bool,
}

impl LoopJson {
    pub fn from_loop(lp: &LagrangianLoop) -> LoopJson {
        LoopJson {
            field: field_name(lp.space().field()).to_string(),
            n: lp.space().n(),
            samples: lp.samples().iter().map(sample_entries).collect(),
            closed: true,
        }
    }

    pub fn from_frame(frame: &LagrangianFrame) -> LoopJson {
        LoopJson {
            field: field_name(frame.space().field()).to_string(),
            n: frame.space().n(),
            samples: vec![sample_entries(frame)],
            closed: true,
        }
    }

    pub fn to_loop(&self) -> Result<LagrangianLoop> {
        if !self.closed {
            return Err(Error::InvalidReference(
                "loop file must set \"closed\": true".into(),
            ));
        }
        let space = self.space()?;
        let samples = self
            .samples
            .iter()
            .map(|entries| self.frame_from_entries(space, entries))
            .collect::<Result<Vec<_>>>()?;
        LagrangianLoop::new(samples)
    }

    pub fn to_frame(&self) -> Result<LagrangianFrame> {
        if self.samples.len() != 1 {
            return Err(Error::InvalidReference(format!(
                "expected a single-sample frame file, got {} samples",
                self.samples.len()
            )));
        }
        let space = self.space()?;
        self.frame_from_entries(space, &self.samples[0])
    }

    fn space(&self) -> Result<SymplecticSpace> {
        SymplecticSpace::standard(self.n, parse_field(&self.field)?)
    }

    fn frame_from_entries(
        &self,
        space: SymplecticSpace,
        entries: &[[f64; 2]],
    ) -> Result<LagrangianFrame> {
        let rows = 2 * self.n;
        if entries.len() != rows * self.n {
            return Err(Error::ShapeMismatch {
                expected: format!("{} row-major entries", rows * self.n),
                got: format!("{}", entries.len()),
            });
        }
        let z = DMatrix::from_fn(rows, self.n, |r, c| unpack(entries[r * self.n + c]));
        LagrangianFrame::new(space, z)
    }
}

fn sample_entries(frame: &LagrangianFrame) -> Vec<[f64; 2]> {
    let z = frame.matrix();
    let n = frame.space().n();
    let mut out = Vec::with_capacity(2 * n * n);
    for r in 0..2 * n {
        for c in 0..n {
            out.push(pack(z[(r, c)]));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OverlapJson {
    pub pair: [String; 2],
    pub component: usize,
    pub samples: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefJson {
    pub pair: [String; 2],
    pub component: usize,
    pub index: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TripleSampleJson {
    pub point: [f64; 2],
    pub refs: Vec<RefJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TripleJson {
    pub ids: [String; 3],
    pub component: usize,
    pub samples: Vec<TripleSampleJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaceJson {
    pub ids: [String; 3],
    pub sign: i32,
}

/// Nerve wire format: sets by string id, overlaps and triples per component.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NerveJson {
    pub sets: Vec<String>,
    pub overlaps: Vec<OverlapJson>,
    pub triples: Vec<TripleJson>,
    pub faces: Vec<FaceJson>,
}

impl NerveJson {
    pub fn from_nerve(nerve: &CoverNerve) -> NerveJson {
        let ids = nerve.set_ids();
        let overlaps = nerve
            .pair_overlaps()
            .iter()
            .flat_map(|(key, comps)| {
                comps.iter().enumerate().map(move |(c, comp)| OverlapJson {
                    pair: [ids[key.0].clone(), ids[key.1].clone()],
                    component: c,
                    samples: comp.samples.iter().map(|&p| pack(p)).collect(),
                })
            })
            .collect();
        let triples = nerve
            .triple_overlaps()
            .iter()
            .flat_map(|(key, comps)| {
                let pairs = key.pairs();
                comps.iter().enumerate().map(move |(c, comp)| TripleJson {
                    ids: [
                        ids[key.0[0]].clone(),
                        ids[key.0[1]].clone(),
                        ids[key.0[2]].clone(),
                    ],
                    component: c,
                    samples: comp
                        .iter()
                        .map(|s| TripleSampleJson {
                            point: pack(s.point),
                            refs: (0..3)
                                .map(|r| RefJson {
                                    pair: [ids[pairs[r].0].clone(), ids[pairs[r].1].clone()],
                                    component: s.refs[r].component,
                                    index: s.refs[r].index,
                                })
                                .collect(),
                        })
                        .collect(),
                })
            })
            .collect();
        let faces = nerve
            .oriented_faces()
            .iter()
            .map(|f| FaceJson {
                ids: [
                    ids[f.ids[0]].clone(),
                    ids[f.ids[1]].clone(),
                    ids[f.ids[2]].clone(),
                ],
                sign: f.sign,
            })
            .collect();
        NerveJson {
            sets: ids.to_vec(),
            overlaps,
            triples,
            faces,
        }
    }

    pub fn to_nerve(&self) -> Result<CoverNerve> {
        let index_of = |id: &str| -> Result<usize> {
            self.sets
                .iter()
                .position(|s| s == id)
                .ok_or_else(|| Error::UnknownSet(id.to_string()))
        };
        let mut pair_overlaps: BTreeMap<PairKey, Vec<(usize, OverlapComponent)>> = BTreeMap::new();
        for o in &self.overlaps {
            let a = index_of(&o.pair[0])?;
            let b = index_of(&o.pair[1])?;
            let (key, inverted) = PairKey::oriented(a, b);
            if inverted {
                return Err(Error::InvalidNerve(format!(
                    "overlap pair [{}, {}] must list the lower-indexed set first",
                    o.pair[0], o.pair[1]
                )));
            }
            pair_overlaps.entry(key).or_default().push((
                o.component,
                OverlapComponent {
                    samples: o.samples.iter().map(|&v| unpack(v)).collect(),
                },
            ));
        }
        let mut pairs_sorted: BTreeMap<PairKey, Vec<OverlapComponent>> = BTreeMap::new();
        for (key, mut comps) in pair_overlaps {
            comps.sort_by_key(|(c, _)| *c);
            if comps.iter().enumerate().any(|(want, (got, _))| want != *got) {
                return Err(Error::InvalidNerve(format!(
                    "overlap ({}, {}) components are not numbered 0..{}",
                    key.0,
                    key.1,
                    comps.len()
                )));
            }
            pairs_sorted.insert(key, comps.into_iter().map(|(_, c)| c).collect());
        }

        let mut triples: BTreeMap<TripleKey, Vec<(usize, Vec<TripleSample>)>> = BTreeMap::new();
        for t in &self.triples {
            let ids = [
                index_of(&t.ids[0])?,
                index_of(&t.ids[1])?,
                index_of(&t.ids[2])?,
            ];
            let key = TripleKey::sorted(ids);
            let expected_pairs = key.pairs();
            let mut samples = Vec::with_capacity(t.samples.len());
            for s in &t.samples {
                if s.refs.len() != 3 {
                    return Err(Error::InvalidNerve(
                        "each triple sample needs exactly three path references".into(),
                    ));
                }
                let mut refs: [Option<PathRef>; 3] = [None; 3];
                for r in &s.refs {
                    let a = index_of(&r.pair[0])?;
                    let b = index_of(&r.pair[1])?;
                    let (pk, _) = PairKey::oriented(a, b);
                    let slot = expected_pairs.iter().position(|p| *p == pk).ok_or_else(|| {
                        Error::InvalidNerve(format!(
                            "triple [{}, {}, {}] reference names pair ({}, {}) outside the triple",
                            t.ids[0], t.ids[1], t.ids[2], r.pair[0], r.pair[1]
                        ))
                    })?;
                    refs[slot] = Some(PathRef {
                        component: r.component,
                        index: r.index,
                    });
                }
                let refs = [
                    refs[0].ok_or_else(|| missing_ref(&t.ids))?,
                    refs[1].ok_or_else(|| missing_ref(&t.ids))?,
                    refs[2].ok_or_else(|| missing_ref(&t.ids))?,
                ];
                samples.push(TripleSample {
                    point: unpack(s.point),
                    refs,
                });
            }
            triples.entry(key).or_default().push((t.component, samples));
        }
        let mut triples_sorted: BTreeMap<TripleKey, Vec<Vec<TripleSample>>> = BTreeMap::new();
        for (key, mut comps) in triples {
            comps.sort_by_key(|(c, _)| *c);
            triples_sorted.insert(key, comps.into_iter().map(|(_, s)| s).collect());
        }

        let faces = self
            .faces
            .iter()
            .map(|f| {
                Ok(Face {
                    ids: [
                        index_of(&f.ids[0])?,
                        index_of(&f.ids[1])?,
                        index_of(&f.ids[2])?,
                    ],
                    sign: f.sign,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        CoverNerve::new(self.sets.clone(), pairs_sorted, triples_sorted, faces)
    }
}

fn missing_ref(ids: &[String; 3]) -> Error {
    Error::InvalidNerve(format!(
        "triple [{}, {}, {}] is missing a reference for one of its pairs",
        ids[0], ids[1], ids[2]
    ))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransitionPairJson {
    pub pair: [String; 2],
    pub component: usize,
    pub samples: Vec<[f64; 2]>,
}

/// Transition values keyed parallel to the nerve's overlap samples.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransitionJson {
    pub field: String,
    pub values: Vec<TransitionPairJson>,
}

impl TransitionJson {
    pub fn from_data(nerve: &CoverNerve, data: &TransitionData) -> TransitionJson {
        let ids = nerve.set_ids();
        let values = data
            .pairs()
            .flat_map(|(key, comps)| {
                comps
                    .iter()
                    .enumerate()
                    .map(move |(c, vals)| TransitionPairJson {
                        pair: [ids[key.0].clone(), ids[key.1].clone()],
                        component: c,
                        samples: vals.iter().map(|&v| pack(v)).collect(),
                    })
            })
            .collect();
        TransitionJson {
            field: field_name(data.field()).to_string(),
            values,
        }
    }

    pub fn to_data(&self, nerve: &CoverNerve) -> Result<TransitionData> {
        let field = parse_field(&self.field)?;
        let mut grouped: BTreeMap<PairKey, Vec<(usize, Vec<Complex64>)>> = BTreeMap::new();
        for v in &self.values {
            let a = nerve.set_index(&v.pair[0])?;
            let b = nerve.set_index(&v.pair[1])?;
            let (key, inverted) = PairKey::oriented(a, b);
            let samples: Vec<Complex64> = v
                .samples
                .iter()
                .map(|&x| {
                    let z = unpack(x);
                    if inverted {
                        z.inv()
                    } else {
                        z
                    }
                })
                .collect();
            grouped.entry(key).or_default().push((v.component, samples));
        }
        let mut values: BTreeMap<PairKey, Vec<Vec<Complex64>>> = BTreeMap::new();
        for (key, mut comps) in grouped {
            comps.sort_by_key(|(c, _)| *c);
            values.insert(key, comps.into_iter().map(|(_, v)| v).collect());
        }
        TransitionData::new(nerve, field, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::build_cp1_maslov_cover;
    use crate::symplectic::rotation_line_loop;

    #[test]
    fn loop_roundtrip() {
        let lp = rotation_line_loop(2, 64).unwrap();
        let json = LoopJson::from_loop(&lp);
        let text = serde_json::to_string(&json).unwrap();
        let back: LoopJson = serde_json::from_str(&text).unwrap();
        let lp2 = back.to_loop().unwrap();
        assert_eq!(lp2.len(), lp.len());
        assert_eq!(crate::charts::maslov_index(&lp2).unwrap(), 2);
    }

    #[test]
    fn open_paths_are_rejected() {
        let lp = rotation_line_loop(1, 60).unwrap();
        let mut json = LoopJson::from_loop(&lp);
        json.closed = false;
        assert!(json.to_loop().is_err());
        json.closed = true;
        json.samples.pop();
        assert!(json.to_loop().is_err());
    }

    #[test]
    fn frame_files_are_single_sample() {
        let lp = rotation_line_loop(1, 60).unwrap();
        let json = LoopJson::from_loop(&lp);
        assert!(json.to_frame().is_err());
        let frame_json = LoopJson::from_frame(&lp.samples()[0]);
        let f = frame_json.to_frame().unwrap();
        assert!(f.same_span(&lp.samples()[0]));
    }

    #[test]
    fn nerve_and_transition_roundtrip() {
        let cover = build_cp1_maslov_cover().unwrap();
        let nerve_json = NerveJson::from_nerve(&cover.nerve);
        let text = serde_json::to_string(&nerve_json).unwrap();
        let back: NerveJson = serde_json::from_str(&text).unwrap();
        let nerve2 = back.to_nerve().unwrap();
        assert_eq!(nerve2.set_ids(), cover.nerve.set_ids());
        assert_eq!(
            nerve2.pair_overlaps().len(),
            cover.nerve.pair_overlaps().len()
        );

        let tj = TransitionJson::from_data(&cover.nerve, &cover.transitions);
        let text = serde_json::to_string(&tj).unwrap();
        let back: TransitionJson = serde_json::from_str(&text).unwrap();
        let data2 = back.to_data(&nerve2).unwrap();
        let report = data2.check_cocycle(&nerve2).unwrap();
        assert!(report.pass);
        // Same values through the accessor.
        let a = cover.transitions.value(0, 1, 0, 7).unwrap();
        let b = data2.value(0, 1, 0, 7).unwrap();
        assert!((a - b).norm() < 1e-15);
    }
}
