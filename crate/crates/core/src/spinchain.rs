//! Infinite spin-½ chains in the blocked representation used for sector
//! demos: two neighbouring spins are fused into one 4-dimensional factor so
//! that the alternating pattern has a constant tail.

use serde::{Deserialize, Serialize};

use crate::linalg::LocalVector;
use crate::product::{ProductState, TailSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinPattern {
    /// `|↑↑↑⋯⟩`
    Up,
    /// `|↓↓↓⋯⟩`
    Down,
    /// `|↑↓↑↓⋯⟩`
    Mixed,
}

impl SpinPattern {
    pub fn spin_up_at(self, site: usize) -> bool {
        match self {
            SpinPattern::Up => true,
            SpinPattern::Down => false,
            SpinPattern::Mixed => site.is_multiple_of(2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpinPattern::Up => "psi_up",
            SpinPattern::Down => "psi_down",
            SpinPattern::Mixed => "psi_mixed",
        }
    }
}

fn spin(up: bool) -> LocalVector {
    if up {
        LocalVector::up()
    } else {
        LocalVector::down()
    }
}

/// The chain with the given pattern and the spins at `flips` (0-based
/// sites) reversed. Repeated flips of one site cancel.
pub fn spin_state(pattern: SpinPattern, flips: &[usize]) -> ProductState {
    let is_up = |site: usize| pattern.spin_up_at(site) ^ (flips.iter().filter(|&&f| f == site).count() % 2 == 1);
    let blocks = flips.iter().map(|&f| f / 2 + 1).max().unwrap_or(0);
    let prefix = (0..blocks).map(|b| spin(is_up(2 * b)).kron(&spin(is_up(2 * b + 1)))).collect();
    let tail = spin(pattern.spin_up_at(0)).kron(&spin(pattern.spin_up_at(1)));
    ProductState::new(prefix, TailSpec::constant(tail)).expect("basis vectors are normalized")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocked_layout() {
        let s = spin_state(SpinPattern::Mixed, &[]);
        assert_eq!(s.factor(0), LocalVector::basis(4, 1).unwrap());
        let f = spin_state(SpinPattern::Up, &[3]);
        assert_eq!(f.prefix().len(), 2);
        assert_eq!(f.factor(1), LocalVector::basis(4, 1).unwrap());
        assert_eq!(f.factor(0), LocalVector::basis(4, 0).unwrap());
        assert_eq!(spin_state(SpinPattern::Down, &[2, 2]).factor(1), LocalVector::basis(4, 3).unwrap());
    }
}
