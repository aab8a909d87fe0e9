use std::cmp::Ordering;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// 8-connected step cost `axis + diagonal * sqrt(2)`, kept as integer step
/// counts so comparisons and sums are exact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OctileCost {
    pub axis: u32,
    pub diagonal: u32,
}

impl OctileCost {
    pub const ZERO: OctileCost = OctileCost { axis: 0, diagonal: 0 };
    pub const AXIS: OctileCost = OctileCost { axis: 1, diagonal: 0 };
    pub const DIAGONAL: OctileCost = OctileCost { axis: 0, diagonal: 1 };

    /// Octile distance between two cells offset by `(dc, dr)`.
    pub fn octile(dc: usize, dr: usize) -> Self {
        let (lo, hi) = if dc < dr { (dc, dr) } else { (dr, dc) };
        OctileCost {
            axis: (hi - lo) as u32,
            diagonal: lo as u32,
        }
    }

    pub fn value(self) -> f64 {
        self.axis as f64 + self.diagonal as f64 * std::f64::consts::SQRT_2
    }
}

impl Add for OctileCost {
    type Output = OctileCost;
    fn add(self, rhs: OctileCost) -> OctileCost {
        OctileCost {
            axis: self.axis + rhs.axis,
            diagonal: self.diagonal + rhs.diagonal,
        }
    }
}

impl Ord for OctileCost {
    /// Sign of `(a1 - a2) - (d2 - d1) * sqrt(2)`, decided with integers.
    fn cmp(&self, other: &Self) -> Ordering {
        let x = self.axis as i128 - other.axis as i128;
        let y = other.diagonal as i128 - self.diagonal as i128;
        match (x.cmp(&0), y.cmp(&0)) {
            (Ordering::Equal, Ordering::Equal) => Ordering::Equal,
            (Ordering::Greater | Ordering::Equal, Ordering::Less | Ordering::Equal) => {
                Ordering::Greater
            }
            (Ordering::Less | Ordering::Equal, Ordering::Greater | Ordering::Equal) => {
                Ordering::Less
            }
            // Same strict sign: compare magnitudes x^2 against 2 y^2 (never equal).
            (Ordering::Greater, Ordering::Greater) => (x * x).cmp(&(2 * y * y)),
            (Ordering::Less, Ordering::Less) => (2 * y * y).cmp(&(x * x)),
        }
    }
}

impl PartialOrd for OctileCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn order_agrees_with_real_value(a1 in 0u32..5000, d1 in 0u32..5000, a2 in 0u32..5000, d2 in 0u32..5000) {
            let p = OctileCost { axis: a1, diagonal: d1 };
            let q = OctileCost { axis: a2, diagonal: d2 };
            if (a1, d1) == (a2, d2) {
                prop_assert_eq!(p.cmp(&q), Ordering::Equal);
            } else {
                prop_assert_ne!(p.cmp(&q), Ordering::Equal);
                prop_assert_eq!(p.cmp(&q), p.value().partial_cmp(&q.value()).unwrap());
            }
        }
    }

    #[test]
    fn octile_distance() {
        assert_eq!(OctileCost::octile(2, 2).value(), 2.0 * std::f64::consts::SQRT_2);
        assert_eq!(OctileCost::octile(0, 4), OctileCost { axis: 4, diagonal: 0 });
        assert_eq!(OctileCost::octile(5, 2), OctileCost { axis: 3, diagonal: 2 });
    }
}
