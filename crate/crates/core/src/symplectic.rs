//! Symplectic vector spaces in standard coordinates, lagrangian frames, and
//! sampled loops of lagrangian subspaces.
//!
//! Frames are the working representation of points of the lagrangian
//! grassmannian: a subspace is the column span of a full-rank `2n x n`
//! matrix, and two frames are the same point when their spans agree up to
//! principal angles. Everything downstream (winding numbers, section values,
//! holonomy) is gauge-covariant, so the right `GL(n)` action on frames drops
//! out of closed-loop quantities.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::num::{ISOTROPY_TOL, SPAN_TOL, STEP_BOUND};

/// Scalar field of the ambient symplectic space.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Field {
    Real,
    Complex,
}

/// The standard symplectic space of dimension `2n` with coordinates
/// `(q_1..q_n, p_1..p_n)` and form matrix `J = [[0, I], [-I, 0]]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SymplecticSpace {
    n: usize,
    field: Field,
}

impl SymplecticSpace {
    pub fn standard(n: usize, field: Field) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(SymplecticSpace { n, field })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// The form matrix in standard coordinates.
    pub fn form(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            j[(k, n + k)] = 1.0;
            j[(n + k, k)] = -1.0;
        }
        j
    }

    fn form_complex(&self) -> DMatrix<Complex64> {
        self.form().map(|x| Complex64::new(x, 0.0))
    }
}

/// Construct the standard space; rejects `n = 0`.
pub fn standard_space(n: usize, field: Field) -> Result<SymplecticSpace> {
    SymplecticSpace::standard(n, field)
}

/// Validation report for a candidate lagrangian frame.
#[derive(Clone, Copy, Debug)]
pub struct LagrangianDiagnostic {
    pub rank: usize,
    pub isotropy_defect: f64,
    pub is_lagrangian: bool,
}

use crate::linalg::{null_space_basis, numerical_rank, orthonormal_columns, principal_cosines};

fn max_imag(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Check whether `z` spans a lagrangian subspace of `space`: full numerical
/// rank and `Z^T J Z = 0` entrywise (transpose, not adjoint — the form is
/// bilinear over both fields). Returns the verdict plus a diagnostic.
pub fn is_lagrangian(
    z: &DMatrix<Complex64>,
    space: &SymplecticSpace,
) -> Result<(bool, LagrangianDiagnostic)> {
    if z.nrows() != space.dim() || z.ncols() != space.n() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", space.dim(), space.n()),
            got: format!("{}x{}", z.nrows(), z.ncols()),
        });
    }
    // Unit-normalize columns so the isotropy tolerance is scale-free.
    let mut zn = z.clone();
    for mut col in zn.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= Complex64::new(norm, 0.0);
        }
    }
    let j = space.form_complex();
    let skew = zn.transpose() * &j * &zn;
    let defect = skew.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rank = numerical_rank(z);
    let diag = LagrangianDiagnostic {
        rank,
        isotropy_defect: defect,
        is_lagrangian: rank == space.n() && defect < ISOTROPY_TOL,
    };
    Ok((diag.is_lagrangian, diag))
}

/// A full-rank `2n x n` frame spanning a lagrangian subspace.
///
/// Real-field frames are stored with complex entries whose imaginary parts
/// vanish; construction enforces this.
#[derive(Clone, Debug)]
pub struct LagrangianFrame {
    space: SymplecticSpace,
    z: DMatrix<Complex64>,
}

impl LagrangianFrame {
    pub fn new(space: SymplecticSpace, z: DMatrix<Complex64>) -> Result<Self> {
        if space.field == Field::Real {
            let mi = max_imag(&z);
            if mi > 1e-12 {
                return Err(Error::NotReal { max_imag: mi });
            }
        }
        let (ok, diag) = is_lagrangian(&z, &space)?;
        if !ok {
            if diag.rank < space.n() {
                return Err(Error::RankDeficient {
                    rank: diag.rank,
                    expected: space.n(),
                });
            }
            return Err(Error::NotIsotropic {
                defect: diag.isotropy_defect,
            });
        }
        Ok(LagrangianFrame { space, z })
    }

    pub fn from_real(space: SymplecticSpace, z: &DMatrix<f64>) -> Result<Self> {
        LagrangianFrame::new(space, z.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn space(&self) -> SymplecticSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.z
    }

    pub fn real_matrix(&self) -> DMatrix<f64> {
        self.z.map(|z| z.re)
    }

    /// Orthonormal basis of the column span (thin SVD factor).
    pub fn orthonormal_basis(&self) -> DMatrix<Complex64> {
        orthonormal_columns(&self.z)
    }

    /// Right-multiply by an invertible gauge factor; the span is unchanged.
    pub fn gauge(&self, g: &DMatrix<Complex64>) -> Result<Self> {
        if g.nrows() != self.space.n() || g.ncols() != self.space.n() {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0}", self.space.n()),
                got: format!("{}x{}", g.nrows(), g.ncols()),
            });
        }
        LagrangianFrame::new(self.space, &self.z * g)
    }

    pub fn same_span(&self, other: &LagrangianFrame) -> bool {
        self.space == other.space && principal_angle_distance(self, other) < SPAN_TOL
    }
}

/// Largest principal angle between the spans of two frames, in radians.
pub fn principal_angle_distance(a: &LagrangianFrame, b: &LagrangianFrame) -> f64 {
    let qa = a.orthonormal_basis();
    let qb = b.orthonormal_basis();
    let cmin = principal_cosines(&qa, &qb)
        .into_iter()
        .fold(1.0f64, f64::min);
    cmin.acos()
}

/// A closed sampled path of lagrangian frames.
///
/// Invariants enforced at construction: at least two samples, consecutive
/// spans within the step bound, and first/last samples spanning the same
/// subspace.
#[derive(Clone, Debug)]
pub struct LagrangianLoop {
    space: SymplecticSpace,
    samples: Vec<LagrangianFrame>,
}

/// Per-step principal-angle bound. [`STEP_BOUND`] governs up to n = 3; in
/// higher dimensions the bound tightens to pi/(2n) so the total winding of
/// the squared determinant stays under pi per step (a step can rotate every
/// principal angle at once).
pub fn loop_step_bound(n: usize) -> f64 {
    STEP_BOUND.min(0.999 * std::f64::consts::PI / (2.0 * n as f64))
}

impl LagrangianLoop {
    pub fn new(samples: Vec<LagrangianFrame>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooFewSamples {
                need: 2,
                got: samples.len(),
            });
        }
        let space = samples[0].space();
        for s in &samples {
            if s.space() != space {
                return Err(Error::FieldMismatch);
            }
        }
        let bound = loop_step_bound(space.n());
        for (i, pair) in samples.windows(2).enumerate() {
            let angle = principal_angle_distance(&pair[0], &pair[1]);
            if angle >= bound {
                return Err(Error::StepBound {
                    index: i,
                    angle,
                    bound,
                });
            }
        }
        let closure = principal_angle_distance(&samples[0], &samples[samples.len() - 1]);
        if closure >= SPAN_TOL {
            return Err(Error::NotClosed { angle: closure });
        }
        Ok(LagrangianLoop { space, samples })
    }

    pub fn space(&self) -> SymplecticSpace {
        self.space
    }

    pub fn samples(&self) -> &[LagrangianFrame] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn reversed(&self) -> LagrangianLoop {
        let mut samples = self.samples.clone();
        samples.reverse();
        LagrangianLoop {
            space: self.space,
            samples,
        }
    }

    /// Cyclic rotation of the sample list by `k` positions. The duplicated
    /// endpoint is dropped before rotating and restored afterwards.
    pub fn rotated_start(&self, k: usize) -> LagrangianLoop {
        let m = self.samples.len() - 1;
        let k = k % m;
        let mut samples: Vec<LagrangianFrame> = (0..m)
            .map(|i| self.samples[(i + k) % m].clone())
            .collect();
        samples.push(samples[0].clone());
        LagrangianLoop {
            space: self.space,
            samples,
        }
    }

    /// Concatenate two loops based at the same subspace.
    pub fn concat(&self, other: &LagrangianLoop) -> Result<LagrangianLoop> {
        if self.space != other.space {
            return Err(Error::FieldMismatch);
        }
        let junction =
            principal_angle_distance(self.samples.last().unwrap(), &other.samples[0]);
        if junction >= SPAN_TOL {
            return Err(Error::NotClosed { angle: junction });
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples[1..]);
        Ok(LagrangianLoop {
            space: self.space,
            samples,
        })
    }

    /// Insert midpoint samples between every consecutive pair (by averaging
    /// orthonormal representatives); doubles the resolution.
    pub fn refined(&self) -> Result<LagrangianLoop> {
        let mut samples = Vec::with_capacity(2 * self.samples.len());
        for pair in self.samples.windows(2) {
            samples.push(pair[0].clone());
            let mid = pair[0].orthonormal_basis() + pair[1].orthonormal_basis();
            if let Ok(f) = LagrangianFrame::new(self.space, mid) {
                samples.push(f);
            }
        }
        samples.push(self.samples.last().unwrap().clone());
        LagrangianLoop::new(samples)
    }
}

/// The line through the origin at angle `phi` in the standard plane.
pub fn line_at_angle(phi: f64) -> LagrangianFrame {
    let space = SymplecticSpace::standard(1, Field::Real).expect("n = 1");
    let z = DMatrix::from_column_slice(2, 1, &[phi.cos(), phi.sin()]);
    LagrangianFrame::from_real(space, &z).expect("a line in the plane is lagrangian")
}

/// Closed loop of lines from a closed angle path (`phi_last = phi_first` mod pi).
pub fn loop_from_angles(angles: &[f64]) -> Result<LagrangianLoop> {
    LagrangianLoop::new(angles.iter().map(|&phi| line_at_angle(phi)).collect())
}

/// Minimal sample count for `rotation_line_loop`: both the documented floor
/// `4|k| + 2` and the step-bound requirement must hold.
pub fn rotation_loop_min_samples(k: i64) -> usize {
    let ka = k.unsigned_abs() as usize;
    if ka == 0 {
        return 2;
    }
    let floor = 4 * ka + 2;
    let by_step = (ka as f64 * std::f64::consts::PI / STEP_BOUND).floor() as usize + 2;
    floor.max(by_step)
}

/// The line `span{(cos(k pi t), sin(k pi t))}` sampled at `m` values of
/// `t` in `[0, 1]`; `k` counterclockwise half-turns, closed because a line
/// is invariant under rotation by pi. Negative `k` reverses orientation.
pub fn rotation_line_loop(k: i64, m: usize) -> Result<LagrangianLoop> {
    let need = rotation_loop_min_samples(k);
    if m < need {
        return Err(Error::TooFewSamples { need, got: m });
    }
    let angles: Vec<f64> = (0..m)
        .map(|j| k as f64 * std::f64::consts::PI * j as f64 / (m - 1) as f64)
        .collect();
    loop_from_angles(&angles)
}

/// Direct sum of a moving line in the standard plane with a fixed lagrangian
/// subspace of another space over the same field. Frames are block-diagonal
/// up to the (q.., p..) coordinate interleaving of the sum.
pub fn direct_sum_loop(
    planar: &LagrangianLoop,
    fixed: &LagrangianFrame,
) -> Result<LagrangianLoop> {
    if planar.space().n() != 1 {
        return Err(Error::ShapeMismatch {
            expected: "planar loop in a 2-dimensional space".into(),
            got: format!("n = {}", planar.space().n()),
        });
    }
    if planar.space().field() != fixed.space().field() {
        return Err(Error::FieldMismatch);
    }
    let nf = fixed.space().n();
    let n = 1 + nf;
    let sum_space = SymplecticSpace::standard(n, planar.space().field())?;
    let fz = fixed.matrix();
    let mut samples = Vec::with_capacity(planar.len());
    for frame in planar.samples() {
        let pz = frame.matrix();
        let mut z = DMatrix::<Complex64>::zeros(2 * n, n);
        z[(0, 0)] = pz[(0, 0)];
        z[(n, 0)] = pz[(1, 0)];
        for col in 0..nf {
            for row in 0..nf {
                z[(1 + row, 1 + col)] = fz[(row, col)];
                z[(n + 1 + row, 1 + col)] = fz[(nf + row, col)];
            }
        }
        samples.push(LagrangianFrame::new(sum_space, z)?);
    }
    LagrangianLoop::new(samples)
}

/// Loop of graphs of plane rotations inside `Lag(V (+) V-bar)`, where the
/// second summand carries the opposite form. The identification with the
/// standard 4-dimensional space sends `(q_w, p_w)` of the barred summand to
/// `(Q_2, P_2) = (p_w, q_w)`, and the rotation family is traversed so that
/// the loop winds twice around the generator with positive sign.
pub fn sp_graph_loop(m: usize) -> Result<LagrangianLoop> {
    if m < 8 {
        return Err(Error::TooFewSamples { need: 8, got: m });
    }
    let space = SymplecticSpace::standard(2, Field::Real)?;
    let mut samples = Vec::with_capacity(m);
    for j in 0..m {
        let tau = 2.0 * std::f64::consts::PI * j as f64 / (m - 1) as f64;
        let (s, c) = tau.sin_cos();
        // Columns are the images of the basis of V under v -> (v, A v) with
        // A the clockwise rotation by tau, written in standard coordinates.
        let z = DMatrix::from_column_slice(4, 2, &[1.0, -s, 0.0, c, 0.0, c, 1.0, s]);
        samples.push(LagrangianFrame::from_real(space, &z)?);
    }
    LagrangianLoop::new(samples)
}

/// Random lagrangian frame: in the real case the stacked real/imaginary
/// parts of a Haar-ish unitary; in the complex case the graph of a random
/// symmetric matrix, optionally swapped through `J` to leave the graph chart.
pub fn random_lagrangian_frame<R: Rng>(space: SymplecticSpace, rng: &mut R) -> LagrangianFrame {
    let n = space.n();
    match space.field() {
        Field::Real => {
            let g = DMatrix::from_fn(n, n, |_, _| {
                Complex64::new(gaussian(rng), gaussian(rng))
            });
            let q = g.qr().q();
            let mut z = DMatrix::<Complex64>::zeros(2 * n, n);
            for c in 0..n {
                for r in 0..n {
                    z[(r, c)] = Complex64::new(q[(r, c)].re, 0.0);
                    z[(n + r, c)] = Complex64::new(q[(r, c)].im, 0.0);
                }
            }
            LagrangianFrame::new(space, z).expect("stacked unitary parts are lagrangian")
        }
        Field::Complex => {
            let mut s = DMatrix::from_fn(n, n, |_, _| {
                Complex64::new(gaussian(rng), gaussian(rng))
            });
            s = (s.clone() + s.transpose()) * Complex64::new(0.5, 0.0);
            let mut z = DMatrix::<Complex64>::zeros(2 * n, n);
            for c in 0..n {
                z[(c, c)] = Complex64::new(1.0, 0.0);
                for r in 0..n {
                    z[(n + r, c)] = s[(r, c)];
                }
            }
            if rng.random_bool(0.5) {
                let j = space.form().map(|x| Complex64::new(x, 0.0));
                z = j * z;
            }
            LagrangianFrame::new(space, z).expect("graph of a symmetric matrix is lagrangian")
        }
    }
}

/// Random lagrangian frame whose span contains the given vector. Built by
/// completing `v` with vectors drawn from the kernel of the accumulated
/// form constraints.
pub fn random_lagrangian_containing<R: Rng>(
    v: &DVector<Complex64>,
    space: SymplecticSpace,
    rng: &mut R,
) -> Result<LagrangianFrame> {
    let n = space.n();
    let dim = space.dim();
    if v.nrows() != dim {
        return Err(Error::ShapeMismatch {
            expected: format!("{dim}x1"),
            got: format!("{}x1", v.nrows()),
        });
    }
    let j = space.form().map(|x| Complex64::new(x, 0.0));
    let mut cols: Vec<DVector<Complex64>> = vec![v.clone() / Complex64::new(v.norm(), 0.0)];
    let mut attempts = 0;
    while cols.len() < n {
        attempts += 1;
        if attempts > 200 {
            return Err(Error::InvalidReference(
                "failed to complete an isotropic basis".into(),
            ));
        }
        // Constraints: omega(c_j, x) = 0 for all accepted columns.
        let mut constraints = DMatrix::<Complex64>::zeros(cols.len(), dim);
        for (r, c) in cols.iter().enumerate() {
            let w = (&j * c).transpose();
            constraints.row_mut(r).copy_from(&w);
        }
        let kernel = null_space_basis(&constraints);
        let mut x = DVector::<Complex64>::zeros(dim);
        for kcol in 0..kernel.ncols() {
            let coeff = Complex64::new(gaussian(rng), {
                if space.field() == Field::Real {
                    0.0
                } else {
                    gaussian(rng)
                }
            });
            x += kernel.column(kcol) * coeff;
        }
        if space.field() == Field::Real {
            x = x.map(|z| Complex64::new(z.re, 0.0));
        }
        let norm = x.norm();
        if norm < 1e-8 {
            continue;
        }
        x /= Complex64::new(norm, 0.0);
        let mut candidate = DMatrix::<Complex64>::zeros(dim, cols.len() + 1);
        for (i, c) in cols.iter().enumerate() {
            candidate.column_mut(i).copy_from(c);
        }
        candidate.column_mut(cols.len()).copy_from(&x);
        if numerical_rank(&candidate) == cols.len() + 1 {
            cols.push(x);
        }
    }
    let mut z = DMatrix::<Complex64>::zeros(dim, n);
    for (i, c) in cols.iter().enumerate() {
        z.column_mut(i).copy_from(c);
    }
    LagrangianFrame::new(space, z)
}

/// Random closed loop of lines: an angle random walk closed up to the
/// nearest multiple of pi. Returns the loop and its net half-turn count.
pub fn random_walk_line_loop<R: Rng>(rng: &mut R, steps: usize) -> (LagrangianLoop, i64) {
    let max_step = 0.3;
    let mut angles = vec![0.0f64];
    let mut phi = 0.0;
    for _ in 0..steps {
        phi += (rng.random::<f64>() * 2.0 - 1.0) * max_step;
        angles.push(phi);
    }
    // Close up to the nearest multiple of pi.
    let target = (phi / std::f64::consts::PI).round() * std::f64::consts::PI;
    let mut remaining = target - phi;
    while remaining.abs() > max_step {
        let inc = remaining.signum() * max_step;
        phi += inc;
        remaining -= inc;
        angles.push(phi);
    }
    angles.push(target);
    let winding = (target / std::f64::consts::PI).round() as i64;
    let lp = loop_from_angles(&angles).expect("random walk respects the step bound");
    (lp, winding)
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; plenty for test data.
    let u1: f64 = rng.random::<f64>().max(1e-12);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn standard_space_small_cases() {
        let s = standard_space(1, Field::Real).unwrap();
        let j = s.form();
        assert_eq!(j[(0, 1)], 1.0);
        assert_eq!(j[(1, 0)], -1.0);
        assert!(standard_space(0, Field::Real).is_err());

        let s2 = standard_space(2, Field::Complex).unwrap();
        let j2 = s2.form();
        let jj = &j2 * &j2;
        assert_eq!(jj, -DMatrix::<f64>::identity(4, 4));

        let s1c = standard_space(1, Field::Complex).unwrap();
        assert_eq!(s1c.form(), s.form());
    }

    #[test]
    fn lagrangian_membership() {
        let s1 = standard_space(1, Field::Real).unwrap();
        let q_axis = DMatrix::from_column_slice(2, 1, &[1.0, 0.0])
            .map(|x| Complex64::new(x, 0.0));
        assert!(is_lagrangian(&q_axis, &s1).unwrap().0);

        let s2 = standard_space(2, Field::Real).unwrap();
        // span{q1-axis, p2-axis}
        let z = DMatrix::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])
            .map(|x| Complex64::new(x, 0.0));
        assert!(is_lagrangian(&z, &s2).unwrap().0);

        // span{q1-axis, p1-axis}: omega(q1, p1) = 1.
        let z = DMatrix::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0])
            .map(|x| Complex64::new(x, 0.0));
        let (ok, diag) = is_lagrangian(&z, &s2).unwrap();
        assert!(!ok);
        assert!(diag.isotropy_defect > 0.5);

        // Shape mismatch is rejected, not reported.
        let bad = DMatrix::<Complex64>::zeros(3, 1);
        assert!(is_lagrangian(&bad, &s1).is_err());
    }

    #[test]
    fn rotation_loop_construction() {
        let lp = rotation_line_loop(0, 4).unwrap();
        assert_eq!(lp.len(), 4);
        assert!(lp.samples()[0].same_span(&lp.samples()[3]));

        let lp = rotation_line_loop(1, 100).unwrap();
        assert!(lp.samples()[0].same_span(lp.samples().last().unwrap()));

        let lp2 = rotation_line_loop(2, 200).unwrap();
        assert_eq!(lp2.len(), 200);

        assert!(matches!(
            rotation_line_loop(1, 5),
            Err(Error::TooFewSamples { .. })
        ));
        // 4|k|+2 samples alone are not enough once the step bound applies.
        assert!(rotation_line_loop(3, 14).is_err());
        assert!(rotation_line_loop(3, rotation_loop_min_samples(3)).is_ok());
    }

    #[test]
    fn every_generated_sample_is_lagrangian() {
        let lp = sp_graph_loop(64).unwrap();
        for s in lp.samples() {
            let (ok, _) = is_lagrangian(s.matrix(), &s.space()).unwrap();
            assert!(ok);
        }
        let lp = rotation_line_loop(2, 64).unwrap();
        for s in lp.samples() {
            let (ok, _) = is_lagrangian(s.matrix(), &s.space()).unwrap();
            assert!(ok);
        }
    }

    #[test]
    fn sp_graph_starts_at_diagonal_image() {
        let lp = sp_graph_loop(64).unwrap();
        // At t = 0 the graph of the identity maps to span{(1,0,0,1),(0,1,1,0)}.
        let expected = DMatrix::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0]);
        let f = LagrangianFrame::from_real(lp.space(), &expected).unwrap();
        assert!(lp.samples()[0].same_span(&f));
    }

    #[test]
    fn direct_sum_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let planar = rotation_line_loop(1, 60).unwrap();
        let fixed_space = standard_space(2, Field::Real).unwrap();
        let fixed = random_lagrangian_frame(fixed_space, &mut rng);
        let sum = direct_sum_loop(&planar, &fixed).unwrap();
        assert_eq!(sum.space().n(), 3);
        for s in sum.samples() {
            let (ok, _) = is_lagrangian(s.matrix(), &s.space()).unwrap();
            assert!(ok);
        }

        // Constant planar loop stays constant in the sum.
        let constant = rotation_line_loop(0, 4).unwrap();
        let sum = direct_sum_loop(&constant, &fixed).unwrap();
        assert!(sum.samples()[0].same_span(&sum.samples()[2]));

        // Field mismatch rejected.
        let cfixed = random_lagrangian_frame(standard_space(1, Field::Complex).unwrap(), &mut rng);
        assert!(matches!(
            direct_sum_loop(&planar, &cfixed),
            Err(Error::FieldMismatch)
        ));
    }

    #[test]
    fn random_frames_are_lagrangian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            for field in [Field::Real, Field::Complex] {
                let space = standard_space(n, field).unwrap();
                for _ in 0..20 {
                    let f = random_lagrangian_frame(space, &mut rng);
                    let (ok, _) = is_lagrangian(f.matrix(), &space).unwrap();
                    assert!(ok);
                }
            }
        }
    }

    #[test]
    fn containing_frame_contains_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let space = standard_space(3, Field::Real).unwrap();
        let l0 = random_lagrangian_frame(space, &mut rng);
        let v = l0.matrix().column(0).into_owned();
        let l = random_lagrangian_containing(&v, space, &mut rng).unwrap();
        // v must lie in the span of l: residual of least squares is zero.
        let q = l.orthonormal_basis();
        let proj = &q * (q.adjoint() * &v);
        assert!((proj - &v).norm() < 1e-9);
    }

    #[test]
    fn step_bound_violations_are_rejected() {
        let a = line_at_angle(0.0);
        let b = line_at_angle(0.9);
        let c = line_at_angle(0.0);
        assert!(matches!(
            LagrangianLoop::new(vec![a, b, c]),
            Err(Error::StepBound { index: 0, .. })
        ));

        let open = vec![line_at_angle(0.0), line_at_angle(0.3), line_at_angle(0.6)];
        assert!(matches!(
            LagrangianLoop::new(open),
            Err(Error::NotClosed { .. })
        ));
    }

    #[test]
    fn random_walk_loops_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (lp, _w) = random_walk_line_loop(&mut rng, 40);
            assert!(lp.samples()[0].same_span(lp.samples().last().unwrap()));
        }
    }
}
