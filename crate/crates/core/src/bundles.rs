//! The two headline objects: parallel transport in the flat Z4 line bundle
//! over the real grassmannian of lines, with explicit chart-switch factors,
//! and the Z2 gerbe over the grassmannian of complex lagrangian lines,
//! realized on a fixed four-set cover of the sphere and evaluated through
//! two independent routes.

use num_complex::Complex64;
use std::collections::BTreeMap;

use crate::cech::{
    chern_cocycle, lift_logs, CocycleReport, CoverNerve, Face, OverlapComponent, PairKey,
    PathRef, TransitionData, TripleKey, TripleSample,
};
use crate::charts::{maslov_index, slope_coords, Chart};
use crate::error::{Error, Result};
use crate::gerbe::{
    build_hemisphere_objects, giraud_cocycle, sqrt_gerbe_isos, verify_equator_theorem,
    EquatorLoop, EquatorStep, GerbeIsos, GerbeObject,
};
use crate::num::Z4;
use crate::symplectic::{loop_from_angles, Field, LagrangianLoop};

/// Choice of square root of -1 used for the transition factor on the
/// negative-slope component; the positive branch is fixed at +1. Flipping
/// the convention conjugates every holonomy value.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum BranchConvention {
    #[default]
    PlusI,
    MinusI,
}

impl BranchConvention {
    /// The square root of `arg(a)` on the component of the sign of `a`.
    pub fn sqrt_arg(self, slope_negative: bool) -> Z4 {
        if !slope_negative {
            Z4::ONE
        } else {
            match self {
                BranchConvention::PlusI => Z4::I,
                BranchConvention::MinusI => Z4::MINUS_I,
            }
        }
    }
}

/// One chart switch during transport.
#[derive(Clone, Copy, Debug)]
pub struct JumpEvent {
    pub at_sample: usize,
    pub from: Chart,
    pub to: Chart,
    pub slope_negative: bool,
    pub factor: Z4,
}

/// Net transport result with the applied chart-switch factors.
#[derive(Clone, Debug)]
pub struct HolonomyResult {
    pub value: Z4,
    pub jumps: Vec<JumpEvent>,
}

impl HolonomyResult {
    /// The logged factors multiply to the value (transport bookkeeping).
    pub fn factors_consistent(&self) -> bool {
        let product = self.jumps.iter().fold(Z4::ONE, |acc, j| acc * j.factor);
        product == self.value
    }
}

/// Switch away from a chart once the coordinate magnitude exceeds this;
/// with the loop step bound this always happens strictly inside the chart
/// overlap, away from the coordinate axes.
const CHART_SWITCH_THRESHOLD: f64 = 2.0;

/// Transport a section coefficient of the square-root bundle around a loop
/// of lines, applying `sqrt(arg(a))^{+-1}` whenever the representation
/// switches between the slope and inverse-slope charts. The net factor is
/// a power of i; where switches happen inside an overlap component does not
/// matter because the factor is constant on each component.
pub fn maslov_holonomy(
    lp: &LagrangianLoop,
    convention: BranchConvention,
) -> Result<HolonomyResult> {
    transport(lp, CHART_SWITCH_THRESHOLD, |negative| {
        convention.sqrt_arg(negative)
    })
}

/// The same transport with the un-square-rooted factor `arg(a) = sign(a)`:
/// the holonomy of the underlying unit bundle, which is the square of the
/// square-root transport.
pub fn arg_transport_holonomy(lp: &LagrangianLoop) -> Result<HolonomyResult> {
    transport(lp, CHART_SWITCH_THRESHOLD, |negative| {
        if negative {
            Z4::MINUS_ONE
        } else {
            Z4::ONE
        }
    })
}

fn transport<F>(lp: &LagrangianLoop, threshold: f64, factor_of_sign: F) -> Result<HolonomyResult>
where
    F: Fn(bool) -> Z4,
{
    if lp.space().field() != Field::Real {
        return Err(Error::ComplexFieldUnsupported);
    }
    if lp.space().n() != 1 {
        return Err(Error::ShapeMismatch {
            expected: "a loop of lines (n = 1)".into(),
            got: format!("n = {}", lp.space().n()),
        });
    }
    // Chart data per sample: (slope valid, slope value, inverse valid, inverse value).
    let mut coords = Vec::with_capacity(lp.len());
    for s in lp.samples() {
        let (a, b) = slope_coords(s)?;
        coords.push((a.valid, a.value.re, b.valid, b.value.re));
    }
    let chart_of = |idx: usize, preferred: Chart| -> Result<Chart> {
        let (aok, a, bok, _b) = coords[idx];
        match preferred {
            Chart::Slope if aok && a.abs() <= threshold => Ok(Chart::Slope),
            Chart::InverseSlope if bok && (!aok || a.abs() >= 1.0 / threshold) => {
                Ok(Chart::InverseSlope)
            }
            _ => {
                if aok && a.abs() <= 1.0 {
                    Ok(Chart::Slope)
                } else if bok {
                    Ok(Chart::InverseSlope)
                } else if aok {
                    Ok(Chart::Slope)
                } else {
                    Err(Error::NoValidChart { index: idx })
                }
            }
        }
    };
    let slope_sign_near = |idx: usize| -> Result<bool> {
        // Sign of the slope at the switch point; fall back to the previous
        // sample when the current one sits exactly on a chart axis.
        let (aok, a, ..) = coords[idx];
        if aok && a.abs() > 1e-14 {
            return Ok(a < 0.0);
        }
        if idx > 0 {
            let (paok, pa, ..) = coords[idx - 1];
            if paok && pa.abs() > 1e-14 {
                return Ok(pa < 0.0);
            }
        }
        Err(Error::NoValidChart { index: idx })
    };

    let start_chart = chart_of(0, Chart::Slope)?;
    let mut chart = start_chart;
    let mut kappa = Z4::ONE;
    let mut jumps = Vec::new();
    let apply_switch = |idx: usize,
                            from: Chart,
                            to: Chart,
                            kappa: &mut Z4,
                            jumps: &mut Vec<JumpEvent>|
     -> Result<()> {
        let negative = slope_sign_near(idx)?;
        let base = factor_of_sign(negative);
        // Slope -> inverse uses the inverse transition factor; the reverse
        // switch uses the factor itself.
        let factor = match (from, to) {
            (Chart::Slope, Chart::InverseSlope) => base.inverse(),
            (Chart::InverseSlope, Chart::Slope) => base,
            _ => Z4::ONE,
        };
        *kappa = *kappa * factor;
        jumps.push(JumpEvent {
            at_sample: idx,
            from,
            to,
            slope_negative: negative,
            factor,
        });
        Ok(())
    };

    for (idx, &(aok, a, bok, b)) in coords.iter().enumerate().skip(1) {
        let stay = match chart {
            Chart::Slope => aok && a.abs() <= threshold,
            Chart::InverseSlope => bok && b.abs() <= threshold,
        };
        if !stay {
            let to = match chart {
                Chart::Slope => Chart::InverseSlope,
                Chart::InverseSlope => Chart::Slope,
            };
            // The target chart must hold at this sample.
            let ok = match to {
                Chart::Slope => aok,
                Chart::InverseSlope => bok,
            };
            if !ok {
                return Err(Error::StepBound {
                    index: idx - 1,
                    angle: std::f64::consts::FRAC_PI_2,
                    bound: crate::num::STEP_BOUND,
                });
            }
            apply_switch(idx, chart, to, &mut kappa, &mut jumps)?;
            chart = to;
        }
    }
    // The loop is closed; return to the starting representation so the
    // coefficient comparison is chart-to-chart.
    if chart != start_chart {
        let last = lp.len() - 1;
        apply_switch(last, chart, start_chart, &mut kappa, &mut jumps)?;
    }
    Ok(HolonomyResult {
        value: kappa,
        jumps,
    })
}

/// Holonomy for closed real loops in any dimension: `i` raised to the
/// Maslov index (conjugated under the opposite branch convention). For
/// loops of lines this agrees exactly with the chart transport.
pub fn maslov_holonomy_general(
    lp: &LagrangianLoop,
    convention: BranchConvention,
) -> Result<HolonomyResult> {
    let index = maslov_index(lp)?;
    let exponent = match convention {
        BranchConvention::PlusI => index,
        BranchConvention::MinusI => -index,
    };
    Ok(HolonomyResult {
        value: Z4::from_exponent(exponent),
        jumps: Vec::new(),
    })
}

/// The fixed four-set cover of the grassmannian of complex lagrangian
/// lines, identified with the sphere: one southern set containing the lower
/// half of the slope coordinate, three northern sectors with a common
/// vertex at the pole, overlap sample paths along the real-slope equator
/// and along radial segments to the pole, and the oriented face list of the
/// boundary of a 3-simplex.
pub struct Cp1Cover {
    pub nerve: CoverNerve,
    pub transitions: TransitionData,
    pub equator: EquatorLoop,
    /// Line angle of each equator step, for building the real loop.
    pub equator_angles: Vec<f64>,
}

/// A point of the sphere is labeled by `w`; the lagrangian line it names is
/// spanned by `(1 - w, i (1 + w))`, so the real lines sit at `|w| = 1` via
/// `w = -e^{2 i phi}` for the line at angle `phi`, the north pole `w = 0`
/// is the line of slope `i`, and `w = infinity` (never sampled) would be
/// the line of slope `-i`.
fn frame_component_values(w: Complex64) -> [Complex64; 4] {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    // Trivializing covectors per set: dq + i dp, dq, dp, dq evaluated on
    // the spanning vector of the line labeled w.
    [
        Complex64::new(-2.0, 0.0) * w,
        one - w,
        i * (one + w),
        one - w,
    ]
}

fn transition_at(pair: PairKey, w: Complex64) -> Complex64 {
    let v = frame_component_values(w);
    v[pair.1] / v[pair.0]
}

fn equator_label(phi_deg: f64) -> Complex64 {
    let phi = phi_deg.to_radians();
    -Complex64::from_polar(1.0, 2.0 * phi)
}

/// Build the cover at the default resolution: 240 equator steps between
/// consecutive vertices (720 around, matching the default loop sampling)
/// and 81 samples per radial path.
pub fn build_cp1_maslov_cover() -> Result<Cp1Cover> {
    build_cp1_maslov_cover_sampled(240, 81)
}

/// Build the cover at a chosen resolution. Arc paths run one margin past
/// the three equator vertices at line angles 0, 60, 120; radial paths join
/// each vertex to the pole. Every headline value is sampling-independent.
pub fn build_cp1_maslov_cover_sampled(
    steps_per_arc: usize,
    radial_samples: usize,
) -> Result<Cp1Cover> {
    if steps_per_arc < 24 || radial_samples < 9 {
        return Err(Error::TooFewSamples {
            need: 24,
            got: steps_per_arc.min(radial_samples),
        });
    }
    let arc_step_deg = 60.0 / steps_per_arc as f64;
    let arc_margin_steps = steps_per_arc.div_ceil(12);
    let arc_vertex_span_steps = steps_per_arc;
    let radial = radial_samples;

    let arc_len = arc_vertex_span_steps + 2 * arc_margin_steps + 1;
    let margin_deg = arc_margin_steps as f64 * arc_step_deg;
    let arc_start_deg = [-margin_deg, 60.0 - margin_deg, 120.0 - margin_deg];
    let vertex_low = arc_margin_steps; // index of the arc's first vertex
    let vertex_high = arc_margin_steps + arc_vertex_span_steps;

    let mut pairs: BTreeMap<PairKey, Vec<OverlapComponent>> = BTreeMap::new();
    // Southern overlaps (0, i): equator arc bands.
    for (i, start) in arc_start_deg.iter().enumerate() {
        let samples: Vec<Complex64> = (0..arc_len)
            .map(|k| equator_label(start + k as f64 * arc_step_deg))
            .collect();
        pairs.insert(PairKey(0, i + 1), vec![OverlapComponent { samples }]);
    }
    // Northern overlaps: radial segments from each vertex to the pole.
    let vertex_w = [
        equator_label(0.0),   // vertex shared by sectors 1 and 3
        equator_label(60.0),  // sectors 1 and 2
        equator_label(120.0), // sectors 2 and 3
    ];
    let radial_path = |w0: Complex64| -> Vec<Complex64> {
        (0..radial)
            .map(|k| w0 * (1.0 - k as f64 / (radial - 1) as f64))
            .collect()
    };
    pairs.insert(PairKey(1, 2), vec![OverlapComponent { samples: radial_path(vertex_w[1]) }]);
    pairs.insert(PairKey(2, 3), vec![OverlapComponent { samples: radial_path(vertex_w[2]) }]);
    pairs.insert(PairKey(1, 3), vec![OverlapComponent { samples: radial_path(vertex_w[0]) }]);

    let mut triples: BTreeMap<TripleKey, Vec<Vec<TripleSample>>> = BTreeMap::new();
    // Sorted triple (0,1,2) at the vertex between sectors 1 and 2; refs are
    // ordered for the pairs (0,1), (1,2), (0,2).
    triples.insert(
        TripleKey([0, 1, 2]),
        vec![vec![TripleSample {
            point: vertex_w[1],
            refs: [
                PathRef { component: 0, index: vertex_high },
                PathRef { component: 0, index: 0 },
                PathRef { component: 0, index: vertex_low },
            ],
        }]],
    );
    triples.insert(
        TripleKey([0, 2, 3]),
        vec![vec![TripleSample {
            point: vertex_w[2],
            refs: [
                PathRef { component: 0, index: vertex_high },
                PathRef { component: 0, index: 0 },
                PathRef { component: 0, index: vertex_low },
            ],
        }]],
    );
    triples.insert(
        TripleKey([0, 1, 3]),
        vec![vec![TripleSample {
            point: vertex_w[0],
            refs: [
                PathRef { component: 0, index: vertex_low },
                PathRef { component: 0, index: 0 },
                PathRef { component: 0, index: vertex_high },
            ],
        }]],
    );
    // The pole, where all three radial paths end.
    triples.insert(
        TripleKey([1, 2, 3]),
        vec![vec![TripleSample {
            point: Complex64::new(0.0, 0.0),
            refs: [
                PathRef { component: 0, index: radial - 1 },
                PathRef { component: 0, index: radial - 1 },
                PathRef { component: 0, index: radial - 1 },
            ],
        }]],
    );

    let faces = vec![
        Face { ids: [1, 2, 3], sign: 1 },
        Face { ids: [0, 3, 2], sign: 1 },
        Face { ids: [0, 1, 3], sign: 1 },
        Face { ids: [0, 2, 1], sign: 1 },
    ];

    let nerve = CoverNerve::new(
        vec!["U0".into(), "U1".into(), "U2".into(), "U3".into()],
        pairs,
        triples,
        faces,
    )?;
    let transitions = crate::cech::transitions_from_fn(&nerve, Field::Complex, transition_at)?;

    // Equator walk: vertex to vertex along each southern arc, oriented by
    // increasing line angle, wrapping through the angle-0 vertex.
    let mut steps = Vec::new();
    let mut equator_angles = Vec::new();
    for (i, start) in arc_start_deg.iter().enumerate() {
        for idx in vertex_low..=vertex_high {
            steps.push(EquatorStep {
                pair: PairKey(0, i + 1),
                component: 0,
                index: idx,
            });
            equator_angles.push((start + idx as f64 * arc_step_deg).to_radians());
        }
    }
    Ok(Cp1Cover {
        nerve,
        transitions,
        equator: EquatorLoop { steps },
        equator_angles,
    })
}

/// The closed loop of real lines traced by the equator walk.
pub fn equator_line_loop(cover: &Cp1Cover) -> Result<LagrangianLoop> {
    loop_from_angles(&cover.equator_angles)
}

/// Full report of the gerbe-class computation on the shipped cover, with
/// both evaluation routes and the relation to the Z4 transport.
#[derive(Clone, Debug)]
pub struct GerbeClassReport {
    pub cocycle_check: CocycleReport,
    /// Chern cocycle value on each oriented face.
    pub chern_faces: Vec<([usize; 3], i64)>,
    pub chern_evaluation: i64,
    /// Giraud cocycle value on each oriented face.
    pub giraud_faces: Vec<([usize; 3], Complex64)>,
    pub giraud_evaluation: Complex64,
    pub equator_holonomy: Complex64,
    pub routes_equal: bool,
    /// Z4 transport around the equator line loop.
    pub z4_holonomy: Z4,
    /// Does the ratio holonomy equal the squared Z4 transport?
    pub square_relation_holds: bool,
    pub jump_log: Vec<JumpEvent>,
    /// The class value, from the Giraud route.
    pub value: Complex64,
    pub consistent: bool,
}

/// Run the full pipeline on the shipped cover: transition cocycle check,
/// Chern evaluation, Giraud evaluation, equator-transport holonomy, and the
/// square relation against the Z4 line-bundle transport.
pub fn maslov_gerbe_class(convention: BranchConvention) -> Result<GerbeClassReport> {
    let cover = build_cp1_maslov_cover()?;
    gerbe_class_on(&cover, &cover.transitions, convention)
}

/// Same pipeline on the shipped nerve with substituted transition data
/// (used for synthetic tensor powers of the tautological-dual bundle).
pub fn synthetic_gerbe_report(degree: i64) -> Result<GerbeClassReport> {
    let cover = build_cp1_maslov_cover()?;
    let transitions = cover.transitions.power(degree);
    gerbe_class_on(&cover, &transitions, BranchConvention::default())
}

fn gerbe_class_on(
    cover: &Cp1Cover,
    transitions: &TransitionData,
    convention: BranchConvention,
) -> Result<GerbeClassReport> {
    let nerve = &cover.nerve;
    let cocycle_check = transitions.check_cocycle(nerve)?;
    let lift = lift_logs(transitions)?;
    let chern = chern_cocycle(&lift, nerve)?;
    let chern_evaluation = chern.evaluate_fundamental(nerve)?;
    let chern_faces = nerve
        .oriented_faces()
        .iter()
        .map(|f| Ok((f.ids, chern.value(f.ids, 0)?)))
        .collect::<Result<Vec<_>>>()?;

    let isos = sqrt_gerbe_isos(&lift);
    let gamma = giraud_cocycle(&isos, nerve)?;
    let giraud_evaluation = gamma.evaluate_fundamental(nerve)?.value();
    let giraud_faces = nerve
        .oriented_faces()
        .iter()
        .map(|f| Ok((f.ids, gamma.value(f.ids, 0)?.value())))
        .collect::<Result<Vec<_>>>()?;

    let (plus, minus) = build_hemisphere_objects(transitions, nerve, &[1, 2, 3], 0)?;
    let report = verify_equator_theorem(nerve, transitions, &isos, &plus, &minus, &cover.equator)?;

    let line_loop = equator_line_loop(cover)?;
    let z4 = maslov_holonomy(&line_loop, convention)?;
    let squared = z4.value.squared().to_complex();
    let square_relation_holds = (squared - report.equator_holonomy).norm() < 1e-9;

    let consistent = cocycle_check.pass && report.equal && square_relation_holds;
    Ok(GerbeClassReport {
        cocycle_check,
        chern_faces,
        chern_evaluation,
        giraud_faces,
        giraud_evaluation,
        equator_holonomy: report.equator_holonomy,
        routes_equal: report.equal,
        z4_holonomy: z4.value,
        square_relation_holds,
        jump_log: z4.jumps,
        value: giraud_evaluation,
        consistent,
    })
}

/// Re-gauge both the isomorphisms and the hemisphere objects at random and
/// re-run the two routes; used by the verification suite.
pub fn regauged_equator_report<R: rand::Rng>(
    cover: &Cp1Cover,
    transitions: &TransitionData,
    isos: &GerbeIsos,
    plus: &GerbeObject,
    minus: &GerbeObject,
    rng: &mut R,
) -> Result<crate::gerbe::EquatorReport> {
    let isos = isos.regauged(rng);
    let plus = plus.regauged(rng);
    verify_equator_theorem(&cover.nerve, transitions, &isos, &plus, minus, &cover.equator)
}
