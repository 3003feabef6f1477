use crate::error::{HarnessError, Result};
use serde::{Deserialize, Serialize};

pub const CAP_BASE: usize = 6;
pub const CAP_FIBRE_ORDER: usize = 64;
pub const CAP_RING: usize = 12;
pub const CAP_TEST_ORDER: usize = 24;

/// Size limits for generated instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    /// Largest base space.
    pub max_base: usize,
    /// Largest order of a fibre group or fibre module.
    pub max_fibre_order: usize,
    /// Largest `n` for coefficient rings `Z/n`.
    pub max_ring: usize,
    /// Largest test object used as a probe.
    pub max_test_order: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_base: 4, max_fibre_order: 24, max_ring: 12, max_test_order: 12 }
    }
}

impl Bounds {
    /// Rejects bounds outside the safety caps.
    pub fn validate(&self) -> Result<()> {
        for (name, value, cap) in [
            ("max_base", self.max_base, CAP_BASE),
            ("max_fibre_order", self.max_fibre_order, CAP_FIBRE_ORDER),
            ("max_ring", self.max_ring, CAP_RING),
            ("max_test_order", self.max_test_order, CAP_TEST_ORDER),
        ] {
            if value > cap {
                return Err(HarnessError::BoundTooLarge { name, value, cap });
            }
            if value == 0 {
                return Err(HarnessError::BoundTooSmall(name));
            }
        }
        if self.max_ring < 2 {
            return Err(HarnessError::BoundTooSmall("max_ring"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps() {
        assert!(Bounds::default().validate().is_ok());
        let b = Bounds { max_base: 7, ..Bounds::default() };
        assert!(matches!(b.validate(), Err(HarnessError::BoundTooLarge { name: "max_base", .. })));
        let b = Bounds { max_fibre_order: 65, ..Bounds::default() };
        assert!(b.validate().is_err());
        let b = Bounds { max_ring: 13, ..Bounds::default() };
        assert!(b.validate().is_err());
        let b = Bounds { max_test_order: 25, ..Bounds::default() };
        assert!(b.validate().is_err());
        let b = Bounds { max_base: 6, max_fibre_order: 64, max_ring: 12, max_test_order: 24 };
        assert!(b.validate().is_ok());
    }
}
