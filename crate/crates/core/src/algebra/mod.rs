//! Exact homological algebra: Smith normal form, ℤ₂ elimination, chain
//! complex reduction, (co)homology groups with representatives and induced
//! maps.

pub mod chain;
pub mod homology;
pub mod reduce;
pub mod snf;
pub mod z2;

use serde::{Deserialize, Serialize};

pub use chain::{ChainComplex, Csc};
pub use homology::{cohomology, homology, CohomologyPresentation, HomologyGroup, ReducedComplex};
pub use snf::{smith_invariants, smith_normal_form, SparseIntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coeff {
    Z,
    /// ℤ/p for a prime p < 2³¹.
    Zp(u32),
}

pub const Z2: Coeff = Coeff::Zp(2);

impl Coeff {
    pub fn parse(s: &str) -> crate::Result<Coeff> {
        match s.trim() {
            "Z" | "z" => Ok(Coeff::Z),
            "Z2" | "z2" => Ok(Z2),
            t => {
                let p = t
                    .trim_start_matches(['Z', 'z'])
                    .parse::<u32>()
                    .map_err(|_| crate::Error::arg(format!("unknown coefficients `{s}`")))?;
                if p < 2 || p >= 1 << 31 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
                    return Err(crate::Error::arg(format!("{p} is not a supported prime")));
                }
                Ok(Coeff::Zp(p))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Coeff::Z => "Z".into(),
            Coeff::Zp(p) => format!("Z{p}"),
        }
    }
}

/// Default incidence budget: 5·10⁷ entries.
pub const DEFAULT_BUDGET: usize = 50_000_000;
