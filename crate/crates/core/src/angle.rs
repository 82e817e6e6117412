//! Measurement angles as multiples of pi/4.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// e^{i k pi/4} for k = 0..8, written out so that the axis-aligned angles are exact.
const PHASES: [Complex64; 8] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Complex64::new(0.0, 1.0),
    Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Complex64::new(-1.0, 0.0),
    Complex64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    Complex64::new(0.0, -1.0),
    Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
];

/// An element of Z8 standing for the angle `k * pi / 4`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AngleIndex(u8);

impl AngleIndex {
    pub const ZERO: AngleIndex = AngleIndex(0);
    pub const HALF_PI: AngleIndex = AngleIndex(2);
    pub const PI: AngleIndex = AngleIndex(4);
    pub const ALL: [AngleIndex; 8] = [
        AngleIndex(0),
        AngleIndex(1),
        AngleIndex(2),
        AngleIndex(3),
        AngleIndex(4),
        AngleIndex(5),
        AngleIndex(6),
        AngleIndex(7),
    ];

    /// Reduces any integer into Z8.
    pub fn new(k: i64) -> Self {
        AngleIndex(k.rem_euclid(8) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// `pi` if the bit is set, zero otherwise.
    pub fn pi_if(bit: bool) -> Self {
        if bit {
            Self::PI
        } else {
            Self::ZERO
        }
    }

    /// Negates the angle when `bit` is set.
    pub fn signed(self, bit: bool) -> Self {
        if bit {
            -self
        } else {
            self
        }
    }

    /// e^{i k pi/4}.
    pub fn phase(self) -> Complex64 {
        PHASES[self.0 as usize]
    }

    pub fn radians(self) -> f64 {
        f64::from(self.0) * std::f64::consts::FRAC_PI_4
    }
}

impl fmt::Debug for AngleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}π/4", self.0)
    }
}

impl fmt::Display for AngleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for AngleIndex {
    type Output = AngleIndex;
    fn add(self, rhs: AngleIndex) -> AngleIndex {
        AngleIndex((self.0 + rhs.0) & 7)
    }
}

impl AddAssign for AngleIndex {
    fn add_assign(&mut self, rhs: AngleIndex) {
        *self = *self + rhs;
    }
}

impl Sub for AngleIndex {
    type Output = AngleIndex;
    fn sub(self, rhs: AngleIndex) -> AngleIndex {
        AngleIndex((self.0 + 8 - rhs.0) & 7)
    }
}

impl Neg for AngleIndex {
    type Output = AngleIndex;
    fn neg(self) -> AngleIndex {
        AngleIndex((8 - self.0) & 7)
    }
}

impl Serialize for AngleIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.0)
    }
}

impl<'de> Deserialize<'de> for AngleIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let k = u8::deserialize(deserializer)?;
        if k < 8 {
            Ok(AngleIndex(k))
        } else {
            Err(serde::de::Error::custom(format!(
                "angle index {k} is outside 0..8"
            )))
        }
    }
}
