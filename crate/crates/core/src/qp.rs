use core::fmt;

use crate::error::{Error, Result};

/// An H.264 quantization parameter in `[0, 51]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "u8", into = "u8"))]
pub struct Qp(u8);

impl Qp {
    pub const MIN: Qp = Qp(0);
    pub const MAX: Qp = Qp(51);
    /// Lowest QP that was actually encoded; everything below shows the source.
    pub const LOWEST_CODED: Qp = Qp(8);
    /// Highest QP that was actually encoded; everything above shows this clip.
    pub const HIGHEST_CODED: Qp = Qp(47);

    pub fn new(value: i64) -> Result<Self> {
        if (0..=51).contains(&value) {
            Ok(Qp(value as u8))
        } else {
            Err(Error::QpOutOfRange(value))
        }
    }

    /// Callers guarantee `value <= 51`.
    pub(crate) const fn from_raw(value: u8) -> Self {
        debug_assert!(value <= 51);
        Qp(value)
    }

    pub const fn get(self) -> u8 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

impl TryFrom<u8> for Qp {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        Qp::new(i64::from(value))
    }
}

impl From<Qp> for u8 {
    fn from(qp: Qp) -> u8 {
        qp.0
    }
}

impl fmt::Display for Qp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Maps a QP on the full `[0, 51]` ladder to the QP of the clip that is shown.
///
/// QPs 1..=7 are substituted by the source (QP 0) and QPs 48..=51 by the QP 47 clip.
pub fn clip_for_qp(qp: Qp) -> Qp {
    match qp.0 {
        0..=7 => Qp::MIN,
        48..=51 => Qp::HIGHEST_CODED,
        _ => qp,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(v: i64) -> Qp {
        Qp::new(v).unwrap()
    }

    #[test]
    fn ladder_examples() {
        assert_eq!(clip_for_qp(qp(5)), qp(0));
        assert_eq!(clip_for_qp(qp(50)), qp(47));
        assert_eq!(clip_for_qp(qp(30)), qp(30));
        assert_eq!(clip_for_qp(qp(0)), qp(0));
        assert_eq!(clip_for_qp(qp(7)), qp(0));
        assert_eq!(clip_for_qp(qp(8)), qp(8));
        assert_eq!(clip_for_qp(qp(47)), qp(47));
        assert_eq!(clip_for_qp(qp(48)), qp(47));
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert_eq!(Qp::new(52), Err(Error::QpOutOfRange(52)));
        assert_eq!(Qp::new(-1), Err(Error::QpOutOfRange(-1)));
        assert!(Qp::try_from(60u8).is_err());
    }

    #[test]
    fn ladder_is_idempotent_and_monotone() {
        let mut prev = Qp::MIN;
        for v in 0..=51 {
            let c = clip_for_qp(qp(v));
            assert_eq!(clip_for_qp(c), c);
            assert!(c >= prev);
            prev = c;
        }
    }
}
