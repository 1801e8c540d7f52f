use core::fmt;

/// An RGB color with each channel normalized to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RgbColor {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl RgbColor {
    pub const BLACK: RgbColor = RgbColor::new(0.0, 0.0, 0.0);
    pub const WHITE: RgbColor = RgbColor::new(1.0, 1.0, 1.0);

    pub const fn new(r: f64, g: f64, b: f64) -> Self {
        RgbColor { r, g, b }
    }

    /// Lift an 8-bit triple; each channel becomes exactly `v / 255`.
    pub fn from_u8(rgb: [u8; 3]) -> Self {
        RgbColor {
            r: f64::from(rgb[0]) / 255.0,
            g: f64::from(rgb[1]) / 255.0,
            b: f64::from(rgb[2]) / 255.0,
        }
    }

    /// Nearest 8-bit triple. Exact inverse of [`RgbColor::from_u8`].
    pub fn to_u8(self) -> [u8; 3] {
        let q = |v: f64| libm::round(v.clamp(0.0, 1.0) * 255.0) as u8;
        [q(self.r), q(self.g), q(self.b)]
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    pub fn from_array(c: [f64; 3]) -> Self {
        RgbColor::new(c[0], c[1], c[2])
    }

    pub fn is_valid(&self) -> bool {
        [self.r, self.g, self.b]
            .iter()
            .all(|v| v.is_finite() && (0.0..=1.0).contains(v))
    }

    pub fn distance_sq(&self, other: &RgbColor) -> f64 {
        let dr = self.r - other.r;
        let dg = self.g - other.g;
        let db = self.b - other.b;
        dr * dr + dg * dg + db * db
    }
}

impl fmt::Display for RgbColor {
    /// Five decimals per channel, the precision used in reports.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.5}, {:.5}, {:.5})", self.r, self.g, self.b)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for RgbColor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for RgbColor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let c = <[f64; 3]>::deserialize(d)?;
        let color = RgbColor::from_array(c);
        if !color.is_valid() {
            return Err(serde::de::Error::custom(
                "color components must lie in [0, 1]",
            ));
        }
        Ok(color)
    }
}
