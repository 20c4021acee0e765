use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type underlying all computations.
///
/// Everything in this crate works over `Complex<T>` entries with `T: Real`;
/// `f64` and `f32` both qualify. Tolerances documented as `f64` constants are
/// converted with [`Real::tol`], which floors them at `100 * epsilon` of the
/// target type so that the `f32` instantiation keeps meaningful (if looser)
/// guarantees.
pub trait Real: RealField + FromPrimitive + ToPrimitive + Copy + Send + Sync {
    /// Convert an `f64` tolerance, flooring at `100 * epsilon` of `Self`.
    fn tol(t: f64) -> Self {
        let floor = Self::default_epsilon() * Self::from_f64(100.0).unwrap();
        let t = Self::from_f64(t).unwrap();
        if t < floor {
            floor
        } else {
            t
        }
    }

    /// Plain conversion from `f64` (panics only for non-finite inputs on
    /// exotic types; total for `f32`/`f64`).
    fn from64(v: f64) -> Self {
        Self::from_f64(v).unwrap()
    }

    /// Lossy conversion to `f64` for reporting.
    fn to64(self) -> f64 {
        self.to_f64().unwrap()
    }
}

impl<T> Real for T where T: RealField + FromPrimitive + ToPrimitive + Copy + Send + Sync {}
