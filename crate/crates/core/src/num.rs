//! Shared numeric conventions: tolerances, fourth roots of unity, and
//! snapping of unit scalars.

use num_complex::Complex64;
use std::fmt;

use crate::error::Error;

/// Relative singular-value threshold for numerical rank decisions.
pub const RANK_REL_TOL: f64 = 1e-8;

/// Max entry of `Z^T J Z` allowed for a unit-column frame to count as isotropic.
pub const ISOTROPY_TOL: f64 = 1e-9;

/// Principal-angle bound between consecutive loop samples. Keeps argument
/// increments of squared determinants well under pi/2, so branch tracking
/// is unambiguous.
pub const STEP_BOUND: f64 = 0.4;

/// Principal-angle tolerance for "these frames span the same subspace".
pub const SPAN_TOL: f64 = 1e-7;

/// Allowed deviation of a transition triple product from 1.
pub const COCYCLE_TOL: f64 = 1e-9;

/// How close a Cech sum must be to an integer before rounding.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// How close a scalar must be to a root of unity to snap onto it.
pub const SNAP_TOL: f64 = 1e-6;

/// Relative threshold under which a section value counts as vanishing.
pub const SECTION_ZERO_TOL: f64 = 1e-9;

/// Argument increments at or above this magnitude are treated as aliased.
pub const ALIASING_BOUND: f64 = std::f64::consts::PI * (1.0 - 1e-9);

/// Principal argument with the branch pinned on the negative real axis:
/// exactly-real negatives give +pi regardless of the sign of the zero
/// imaginary part, so branch choices cannot flip on a -0.0.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.im == 0.0 {
        f64::atan2(0.0, z.re)
    } else {
        z.arg()
    }
}

/// An element of the multiplicative group {1, i, -1, -i}, stored as the
/// exponent of i modulo 4.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Z4(u8);

impl Z4 {
    pub const ONE: Z4 = Z4(0);
    pub const I: Z4 = Z4(1);
    pub const MINUS_ONE: Z4 = Z4(2);
    pub const MINUS_I: Z4 = Z4(3);

    pub fn from_exponent(k: i64) -> Z4 {
        Z4(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn inverse(self) -> Z4 {
        Z4((4 - self.0) % 4)
    }

    /// The square, landing in {1, -1}.
    pub fn squared(self) -> Z4 {
        self * self
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn from_complex(z: Complex64) -> Result<Z4, Error> {
        for k in 0..4u8 {
            if (z - Z4(k).to_complex()).norm() < SNAP_TOL {
                return Ok(Z4(k));
            }
        }
        Err(Error::SnapFailed {
            value: z,
            order: 4,
        })
    }
}

impl std::ops::Mul for Z4 {
    type Output = Z4;

    fn mul(self, other: Z4) -> Z4 {
        Z4((self.0 + other.0) % 4)
    }
}

impl fmt::Display for Z4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.0 {
            0 => "1",
            1 => "i",
            2 => "-1",
            _ => "-i",
        };
        write!(f, "{s}")
    }
}

/// Snap a near-unit scalar onto the nearest k'th root of unity. Roots at
/// multiples of a quarter turn come back bit-exact, so snapped values can
/// be compared with `==`.
pub fn snap_root_of_unity(z: Complex64, order: u32) -> Result<Complex64, Error> {
    if (z.norm() - 1.0).abs() > SNAP_TOL {
        return Err(Error::SnapFailed { value: z, order });
    }
    let step = 2.0 * std::f64::consts::PI / order as f64;
    let k = (principal_arg(z) / step).round() as i64;
    let k = k.rem_euclid(order as i64);
    let quarters = 4 * k;
    let snapped = if quarters % order as i64 == 0 {
        Z4::from_exponent(quarters / order as i64).to_complex()
    } else {
        Complex64::from_polar(1.0, k as f64 * step)
    };
    if (z - snapped).norm() < SNAP_TOL {
        Ok(snapped)
    } else {
        Err(Error::SnapFailed { value: z, order })
    }
}

/// Exact sign snap: 1 or -1.
pub fn snap_sign(z: Complex64) -> Result<f64, Error> {
    let s = snap_root_of_unity(z, 2)?;
    Ok(s.re)
}

/// Principal-branch argument increment from `a` to `b`, with an aliasing
/// guard: increments of magnitude >= pi cannot be distinguished from their
/// wrap-around and are rejected.
pub fn arg_increment(a: Complex64, b: Complex64) -> Result<f64, Error> {
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Err(Error::ZeroValue {
            context: "argument increment of zero scalar".into(),
        });
    }
    let d = principal_arg(b / a);
    if d.abs() >= ALIASING_BOUND {
        return Err(Error::Aliasing {
            location: String::new(),
            increment: d,
        });
    }
    Ok(d)
}
