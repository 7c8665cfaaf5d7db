//! Charts and scalar maps on the lagrangian grassmannian: slope coordinates
//! on lines in the plane, the squared-determinant circle map whose winding
//! number is the Maslov index of a closed loop, and the determinant-bundle
//! section that vanishes exactly on the non-transverse locus.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::num::{self, INTEGRALITY_TOL, RANK_REL_TOL, SECTION_ZERO_TOL};
use crate::symplectic::{Field, LagrangianFrame, LagrangianLoop};

/// Which coordinate chart on the grassmannian of lines.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Chart {
    /// Lines `p = a q`, coordinate `a`.
    Slope,
    /// Lines `q = b p`, coordinate `b`.
    InverseSlope,
}

/// A chart coordinate together with its validity flag.
#[derive(Clone, Copy, Debug)]
pub struct ChartValue {
    pub chart: Chart,
    pub value: Complex64,
    pub valid: bool,
}

/// Slope and inverse-slope coordinates of a line in the plane. The slope is
/// valid iff the line is not vertical, the inverse slope iff not horizontal;
/// where both are valid they are reciprocal.
pub fn slope_coords(frame: &LagrangianFrame) -> Result<(ChartValue, ChartValue)> {
    if frame.space().n() != 1 {
        return Err(Error::ShapeMismatch {
            expected: "a frame in a 2-dimensional space".into(),
            got: format!("n = {}", frame.space().n()),
        });
    }
    let z = frame.matrix();
    let (zq, zp) = (z[(0, 0)], z[(1, 0)]);
    let scale = (zq.norm().powi(2) + zp.norm().powi(2)).sqrt();
    let q_ok = zq.norm() > 1e-12 * scale;
    let p_ok = zp.norm() > 1e-12 * scale;
    let slope = ChartValue {
        chart: Chart::Slope,
        value: if q_ok { zp / zq } else { Complex64::new(0.0, 0.0) },
        valid: q_ok,
    };
    let inverse = ChartValue {
        chart: Chart::InverseSlope,
        value: if p_ok { zq / zp } else { Complex64::new(0.0, 0.0) },
        valid: p_ok,
    };
    Ok((slope, inverse))
}

/// The unit scalar `det(X + iY)^2` of an orthonormalized real frame.
///
/// Orthonormalization makes `U = X + iY` unitary; right gauge factors
/// contribute `det(O)^2 = 1` for orthogonal `O`, so the value depends only
/// on the subspace.
pub fn det_squared(frame: &LagrangianFrame) -> Result<Complex64> {
    if frame.space().field() != Field::Real {
        return Err(Error::ComplexFieldUnsupported);
    }
    let n = frame.space().n();
    let q = orthonormal_real(&frame.real_matrix())?;
    let u = DMatrix::from_fn(n, n, |r, c| Complex64::new(q[(r, c)], q[(n + r, c)]));
    let det = u.determinant();
    let norm = det.norm();
    if norm < 0.5 {
        // A unitary determinant has modulus 1; anything else is a rank failure.
        return Err(Error::RankDeficient { rank: 0, expected: n });
    }
    let det = det / Complex64::new(norm, 0.0);
    Ok(det * det)
}

fn orthonormal_real(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let ncols = m.ncols();
    let svd = m.clone().svd(true, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_REL_TOL * smax)
        .count();
    if rank < ncols {
        return Err(Error::RankDeficient {
            rank,
            expected: ncols,
        });
    }
    let u = svd.u.expect("SVD with U requested");
    Ok(u.columns(0, ncols).into_owned())
}

/// Maslov index of a closed loop in a real space: the winding number of
/// `det^2` along the samples, accumulated through principal-branch argument
/// increments. The loop's step bound keeps every increment under pi/2, so
/// the lift is unique; increments at pi are rejected as aliased.
pub fn maslov_index(lp: &LagrangianLoop) -> Result<i64> {
    if lp.space().field() != Field::Real {
        return Err(Error::ComplexFieldUnsupported);
    }
    let values: Vec<Complex64> = lp
        .samples()
        .iter()
        .map(det_squared)
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for (i, pair) in values.windows(2).enumerate() {
        let inc = num::arg_increment(pair[0], pair[1]).map_err(|e| match e {
            Error::Aliasing { increment, .. } => Error::Aliasing {
                location: format!("samples {i} -> {}", i + 1),
                increment,
            },
            other => other,
        })?;
        total += inc;
    }
    let winding = total / (2.0 * std::f64::consts::PI);
    let rounded = winding.round();
    if (winding - rounded).abs() > INTEGRALITY_TOL {
        return Err(Error::NonIntegerWinding {
            value: winding,
            tol: INTEGRALITY_TOL,
        });
    }
    Ok(rounded as i64)
}

/// A value of the determinant-bundle section, with the scale used to decide
/// vanishing. Gauge changes multiply the value by the gauge determinant;
/// whether it vanishes does not depend on the gauge.
#[derive(Clone, Debug)]
pub struct SectionValue {
    pub value: Complex64,
    pub scale: f64,
}

impl SectionValue {
    pub fn vanishes(&self) -> bool {
        self.value.norm() < SECTION_ZERO_TOL * self.scale
    }
}

/// A reference covector: a basis of functionals annihilating a fixed
/// lagrangian `L0`, represented as the rows of an `n x 2n` matrix.
#[derive(Clone, Debug)]
pub struct ReferenceCovector {
    phi: DMatrix<Complex64>,
}

impl ReferenceCovector {
    /// The default choice: an orthonormal basis of the annihilator of `L0`
    /// (the complementary coordinate projections when `L0` is a coordinate
    /// plane).
    pub fn annihilating(l0: &LagrangianFrame) -> ReferenceCovector {
        // Kernel vectors of Z0^T become the rows of phi:
        // phi_r Z0 = (Z0^T k_r)^T = 0.
        let kernel = crate::linalg::null_space_basis(&l0.matrix().transpose());
        ReferenceCovector {
            phi: kernel.transpose(),
        }
    }

    /// Wrap a user-supplied functional matrix, checking it annihilates `L0`.
    pub fn new(phi: DMatrix<Complex64>, l0: &LagrangianFrame) -> Result<ReferenceCovector> {
        let n = l0.space().n();
        let dim = l0.space().dim();
        if phi.nrows() != n || phi.ncols() != dim {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{dim}"),
                got: format!("{}x{}", phi.nrows(), phi.ncols()),
            });
        }
        let residual = &phi * l0.matrix();
        let defect = residual.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = phi.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        if defect > 1e-9 * scale {
            return Err(Error::InvalidReference(format!(
                "phi does not annihilate L0 (defect {defect:.3e})"
            )));
        }
        Ok(ReferenceCovector { phi })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.phi
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Pull the reference covector back to `L`: the determinant of `phi * Z_L`.
/// Vanishes exactly when `L` meets `L0` nontrivially.
pub fn maslov_section(
    l: &LagrangianFrame,
    l0: &LagrangianFrame,
    phi: &ReferenceCovector,
) -> Result<SectionValue> {
    if l.space() != l0.space() {
        return Err(Error::FieldMismatch);
    }
    let m = phi.matrix() * l.matrix();
    let value = m.determinant();
    let col_norms: f64 = l.matrix().column_iter().map(|c| c.norm()).product();
    let scale = (col_norms * phi.frobenius_norm()).max(1e-300);
    Ok(SectionValue { value, scale })
}

/// Dimension of `L (cap) L0`, computed from the numerical rank of the
/// concatenated orthonormal bases: `dim(L + L0) = rank`, and the defect is
/// `2n - rank`.
pub fn transversality_defect(l: &LagrangianFrame, l0: &LagrangianFrame) -> Result<usize> {
    if l.space() != l0.space() {
        return Err(Error::FieldMismatch);
    }
    let qa = l.orthonormal_basis();
    let qb = l0.orthonormal_basis();
    let n = l.space().n();
    let dim = l.space().dim();
    let mut stacked = DMatrix::<Complex64>::zeros(dim, 2 * n);
    stacked.columns_mut(0, n).copy_from(&qa);
    stacked.columns_mut(n, n).copy_from(&qb);
    Ok(dim - crate::linalg::numerical_rank(&stacked))
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::symplectic::{
        line_at_angle, random_lagrangian_containing, random_lagrangian_frame, rotation_line_loop,
        sp_graph_loop, standard_space, LagrangianLoop,
    };
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent winding oracle: the loop of lines at angles `phi_j` has
    /// `det^2 = e^{2 i phi}` in closed form, so the index is the accumulated
    /// angle divided by pi. No frames or determinants involved.
    fn winding_oracle(angles: &[f64]) -> i64 {
        let total: f64 = angles.windows(2).map(|w| w[1] - w[0]).sum();
        (total / std::f64::consts::PI).round() as i64
    }

    #[test]
    fn slope_chart_values() {
        let space = standard_space(1, Field::Real).unwrap();
        let mk = |q: f64, p: f64| {
            LagrangianFrame::from_real(space, &DMatrix::from_column_slice(2, 1, &[q, p])).unwrap()
        };
        let (a, b) = slope_coords(&mk(1.0, 3.0)).unwrap();
        assert!(a.valid && b.valid);
        assert!((a.value.re - 3.0).abs() < 1e-15);
        assert!((b.value.re - 1.0 / 3.0).abs() < 1e-15);

        let (a, b) = slope_coords(&mk(0.0, 1.0)).unwrap();
        assert!(!a.valid);
        assert!(b.valid && b.value.norm() < 1e-15);

        let (a, b) = slope_coords(&mk(1.0, 0.0)).unwrap();
        assert!(a.valid && a.value.norm() < 1e-15);
        assert!(!b.valid);
    }

    #[test]
    fn det_squared_closed_form() {
        // Identity case: the q-plane.
        let space = standard_space(2, Field::Real).unwrap();
        let z = DMatrix::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let f = LagrangianFrame::from_real(space, &z).unwrap();
        assert!((det_squared(&f).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        // Lines: det^2 at angle theta is e^{2 i theta} (closed-form oracle).
        for &theta in &[0.3, 1.1, 2.0, std::f64::consts::FRAC_PI_2] {
            let f = line_at_angle(theta);
            let expected = Complex64::from_polar(1.0, 2.0 * theta);
            assert!((det_squared(&f).unwrap() - expected).norm() < 1e-12);
        }

        // p-plane in n=1: theta = pi/2 gives -1.
        let f = line_at_angle(std::f64::consts::FRAC_PI_2);
        assert!((det_squared(&f).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn det_squared_is_gauge_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let space = standard_space(3, Field::Real).unwrap();
        for _ in 0..20 {
            let f = random_lagrangian_frame(space, &mut rng);
            let g = DMatrix::from_fn(3, 3, |_, _| {
                Complex64::new(rng.random::<f64>() * 2.0 - 1.0, 0.0)
            }) + DMatrix::identity(3, 3) * Complex64::new(2.0, 0.0);
            let fg = f.gauge(&g).unwrap();
            assert!((det_squared(&f).unwrap() - det_squared(&fg).unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn index_matches_winding_oracle_for_rotations() {
        for k in -5..=5i64 {
            let m = 64.max(crate::symplectic::rotation_loop_min_samples(k));
            let lp = rotation_line_loop(k, m).unwrap();
            let angles: Vec<f64> = (0..m)
                .map(|j| k as f64 * std::f64::consts::PI * j as f64 / (m - 1) as f64)
                .collect();
            assert_eq!(winding_oracle(&angles), k);
            assert_eq!(maslov_index(&lp).unwrap(), k);
        }
    }

    #[test]
    fn constant_loop_has_index_zero() {
        let lp = rotation_line_loop(0, 8).unwrap();
        assert_eq!(maslov_index(&lp).unwrap(), 0);
    }

    #[test]
    fn sp_graph_loop_doubles_the_generator() {
        let lp = sp_graph_loop(128).unwrap();
        assert_eq!(maslov_index(&lp).unwrap(), 2);
    }

    #[test]
    fn index_invariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let lp = rotation_line_loop(2, 120).unwrap();
        let base = maslov_index(&lp).unwrap();
        assert_eq!(base, 2);

        // Reversal negates.
        assert_eq!(maslov_index(&lp.reversed()).unwrap(), -2);

        // Cyclic rotation of the sample list.
        for k in [1, 17, 63] {
            assert_eq!(maslov_index(&lp.rotated_start(k)).unwrap(), base);
        }

        // Resampling (doubling m).
        assert_eq!(maslov_index(&lp.refined().unwrap()).unwrap(), base);

        // Gauge change of every sample.
        let gauged: Vec<LagrangianFrame> = lp
            .samples()
            .iter()
            .map(|f| {
                let scale = 0.5 + rng.random::<f64>() * 2.0;
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let g = DMatrix::from_element(1, 1, Complex64::new(sign * scale, 0.0));
                f.gauge(&g).unwrap()
            })
            .collect();
        let gauged_loop = LagrangianLoop::new(gauged).unwrap();
        assert_eq!(maslov_index(&gauged_loop).unwrap(), base);

        // Concatenation adds; k then -k is nullhomotopic.
        let inv = rotation_line_loop(-2, 120).unwrap();
        let concat = lp.concat(&inv).unwrap();
        assert_eq!(maslov_index(&concat).unwrap(), 0);
    }

    /// Four planes rotating at once: the index adds up, and the
    /// dimension-aware step bound rejects sampling that would alias the
    /// accumulated winding.
    #[test]
    fn simultaneous_rotations_in_higher_dimension() {
        let space = standard_space(4, Field::Real).unwrap();
        let frame_at = |phi: f64| {
            let mut z = DMatrix::<f64>::zeros(8, 4);
            for c in 0..4 {
                z[(c, c)] = phi.cos();
                z[(4 + c, c)] = phi.sin();
            }
            LagrangianFrame::from_real(space, &z).unwrap()
        };
        let m = 16;
        let fine: Vec<LagrangianFrame> = (0..=m)
            .map(|j| frame_at(std::f64::consts::PI * j as f64 / m as f64))
            .collect();
        let lp = LagrangianLoop::new(fine).unwrap();
        assert_eq!(maslov_index(&lp).unwrap(), 4);

        // Steps of ~0.39 rad are fine for lines but rotate det^2 by more
        // than pi here; the loop constructor refuses them.
        let coarse: Vec<LagrangianFrame> = (0..=8)
            .map(|j| frame_at(std::f64::consts::PI * j as f64 / 8.0))
            .collect();
        assert!(matches!(
            LagrangianLoop::new(coarse),
            Err(Error::StepBound { .. })
        ));
    }

    #[test]
    fn complex_loops_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let space = standard_space(1, Field::Complex).unwrap();
        let f = random_lagrangian_frame(space, &mut rng);
        let lp = LagrangianLoop::new(vec![f.clone(), f]).unwrap();
        assert!(matches!(
            maslov_index(&lp),
            Err(Error::ComplexFieldUnsupported)
        ));
    }

    #[test]
    fn section_small_cases() {
        let space = standard_space(1, Field::Real).unwrap();
        let p_axis =
            LagrangianFrame::from_real(space, &DMatrix::from_column_slice(2, 1, &[0.0, 1.0]))
                .unwrap();
        let phi = ReferenceCovector::annihilating(&p_axis);

        // L = L0 vanishes.
        let v = maslov_section(&p_axis, &p_axis, &phi).unwrap();
        assert!(v.vanishes());

        // L = span{(1, a)}: the projection to the q-line sends it to 1
        // (up to the normalization of phi).
        let base = maslov_section(
            &LagrangianFrame::from_real(space, &DMatrix::from_column_slice(2, 1, &[1.0, 0.0]))
                .unwrap(),
            &p_axis,
            &phi,
        )
        .unwrap();
        for a in [-2.0, 0.5, 3.0] {
            let l = LagrangianFrame::from_real(
                space,
                &DMatrix::from_column_slice(2, 1, &[1.0, a]),
            )
            .unwrap();
            let v = maslov_section(&l, &p_axis, &phi).unwrap();
            assert!((v.value - base.value).norm() < 1e-12);
            assert!(!v.vanishes());
        }

        // L = span{(b, 1)}: value proportional to b, vanishing exactly at b = 0.
        for b in [-1.0, -0.25, 0.25, 2.0] {
            let l = LagrangianFrame::from_real(
                space,
                &DMatrix::from_column_slice(2, 1, &[b, 1.0]),
            )
            .unwrap();
            let v = maslov_section(&l, &p_axis, &phi).unwrap();
            assert!((v.value - base.value * Complex64::new(b, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn phi_must_annihilate_base() {
        let space = standard_space(1, Field::Real).unwrap();
        let p_axis =
            LagrangianFrame::from_real(space, &DMatrix::from_column_slice(2, 1, &[0.0, 1.0]))
                .unwrap();
        let bad = DMatrix::from_row_slice(1, 2, &[0.3, 1.0]).map(|x| Complex64::new(x, 0.0));
        assert!(ReferenceCovector::new(bad, &p_axis).is_err());
        let good = DMatrix::from_row_slice(1, 2, &[2.0, 0.0]).map(|x| Complex64::new(x, 0.0));
        assert!(ReferenceCovector::new(good, &p_axis).is_ok());
    }

    #[test]
    fn transversality_small_cases() {
        let s2 = standard_space(2, Field::Real).unwrap();
        let q_plane = LagrangianFrame::from_real(
            s2,
            &DMatrix::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
        )
        .unwrap();
        let p_plane = LagrangianFrame::from_real(
            s2,
            &DMatrix::from_column_slice(4, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
        )
        .unwrap();
        assert_eq!(transversality_defect(&q_plane, &q_plane).unwrap(), 2);
        assert_eq!(transversality_defect(&q_plane, &p_plane).unwrap(), 0);

        // span{q1, p2} versus span{q1, q2}: they share the q1-axis.
        let l = LagrangianFrame::from_real(
            s2,
            &DMatrix::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
        )
        .unwrap();
        assert_eq!(transversality_defect(&l, &q_plane).unwrap(), 1);
    }

    #[test]
    fn section_zero_locus_matches_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in 1..=3 {
            for field in [Field::Real, Field::Complex] {
                let space = standard_space(n, field).unwrap();
                let l0 = random_lagrangian_frame(space, &mut rng);
                let phi = ReferenceCovector::annihilating(&l0);
                for trial in 0..50 {
                    let l = if trial % 2 == 0 {
                        random_lagrangian_frame(space, &mut rng)
                    } else {
                        let cols = l0.matrix();
                        let mut v = cols.column(0).into_owned();
                        if n > 1 {
                            v += cols.column(1) * Complex64::new(0.7, 0.0);
                        }
                        random_lagrangian_containing(&v, space, &mut rng).unwrap()
                    };
                    let defect = transversality_defect(&l, &l0).unwrap();
                    let section = maslov_section(&l, &l0, &phi).unwrap();
                    assert_eq!(
                        section.vanishes(),
                        defect > 0,
                        "n={n} field={field:?} trial={trial}: |s|={:.3e} scale={:.3e} defect={defect}",
                        section.value.norm(),
                        section.scale
                    );
                }
            }
        }
    }

    /// Crossing-parity cross-check: along a closed loop of lines, the
    /// section against a generic base line changes sign at each transverse
    /// crossing of the non-transverse locus, so the number of sign changes
    /// has the parity of the index.
    #[test]
    fn crossing_parity_matches_index() {
        let l0 = line_at_angle(1.234);
        let phi = ReferenceCovector::annihilating(&l0);
        for k in [-3i64, -1, 1, 2, 5] {
            let m = 64.max(crate::symplectic::rotation_loop_min_samples(k));
            let lp = rotation_line_loop(k, m).unwrap();
            let mut crossings = 0usize;
            let mut last_sign = 0i8;
            for s in lp.samples() {
                let v = maslov_section(s, &l0, &phi).unwrap();
                let sign = if v.value.re > 0.0 { 1i8 } else { -1i8 };
                if last_sign != 0 && sign != last_sign {
                    crossings += 1;
                }
                last_sign = sign;
            }
            let index = maslov_index(&lp).unwrap();
            assert_eq!(
                crossings as i64 % 2,
                index.rem_euclid(2),
                "k = {k}: crossings {crossings} vs index {index}"
            );
        }
    }

    #[test]
    fn chart_consistency_on_many_lines() {
        let mut rng = ChaCha8Rng::seed_from_u64(500);
        let mut checked = 0;
        while checked < 500 {
            let phi = rng.random::<f64>() * std::f64::consts::PI;
            let f = line_at_angle(phi);
            let (a, b) = slope_coords(&f).unwrap();
            if !(a.valid && b.valid) || a.value.norm() < 1e-6 {
                continue;
            }
            let rel = (b.value - a.value.inv()).norm() / a.value.inv().norm();
            assert!(rel < 1e-12, "phi = {phi}: relative error {rel:.3e}");
            checked += 1;
        }
    }

    proptest! {
        /// Chart consistency: reciprocal coordinates wherever both are valid.
        #[test]
        fn slope_reciprocity(angle in 0.02f64..1.55f64, flip in any::<bool>()) {
            let phi = if flip { angle + std::f64::consts::FRAC_PI_2 } else { angle };
            let f = line_at_angle(phi);
            let (a, b) = slope_coords(&f).unwrap();
            prop_assume!(a.valid && b.valid);
            let product = a.value * b.value;
            prop_assert!((product - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }

        /// Winding accumulation of synthetic unit-circle walks is exact.
        #[test]
        fn winding_of_unit_walks(k in -4i64..=4, m in 48usize..96) {
            let values: Vec<Complex64> = (0..m)
                .map(|j| Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * k as f64 * j as f64 / (m - 1) as f64,
                ))
                .collect();
            let mut total = 0.0;
            for w in values.windows(2) {
                total += num::arg_increment(w[0], w[1]).unwrap();
            }
            let winding = (total / (2.0 * std::f64::consts::PI)).round() as i64;
            prop_assert_eq!(winding, k);
        }
    }
}
