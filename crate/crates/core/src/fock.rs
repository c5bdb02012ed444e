//! Truncated bosonic Fock basis `D^(M) = D_0 ⊕ … ⊕ D_M`.
//!
//! States are stored sector-major (ascending total occupation) and
//! lexicographically ascending inside each sector. This makes the basis for
//! cutoff `M` an exact prefix of the basis for any larger cutoff, so the
//! compression `P_M B P_M` of an operator built at a larger cutoff is just its
//! leading square block.

use std::collections::HashMap;
use std::ops::Range;

use crate::error::{Error, Result};

/// Default limit on the number of basis states (dense eigensolve feasibility).
pub const DEFAULT_DIMENSION_CAP: usize = 20_000;

/// Occupation numbers `(n_1,…,n_L)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationState(pub Vec<u16>);

impl OccupationState {
    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub fn squares(&self) -> usize {
        self.0.iter().map(|&n| (n as usize) * (n as usize)).sum()
    }
}

impl From<Vec<u16>> for OccupationState {
    fn from(v: Vec<u16>) -> Self {
        Self(v)
    }
}

/// Binomial coefficient, `None` on overflow.
fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Number of occupation states on `sites` sites with total exactly `total`:
/// `C(total + sites − 1, sites − 1)`.
pub fn sector_dim(sites: usize, total: usize) -> u128 {
    assert!(sites >= 1, "need at least one site");
    binomial((total + sites - 1) as u128, (sites - 1) as u128).unwrap_or(u128::MAX)
}

/// `dim D^(M) = C(M + L, L)`.
pub fn truncated_dim(sites: usize, cutoff: usize) -> u128 {
    assert!(sites >= 1, "need at least one site");
    binomial((cutoff + sites) as u128, sites as u128).unwrap_or(u128::MAX)
}

#[derive(Debug, Clone)]
pub struct TruncatedBasis {
    sites: usize,
    cutoff: usize,
    occupations: Vec<u16>,
    lookup: HashMap<Box<[u16]>, usize>,
    sector_starts: Vec<usize>,
}

impl TruncatedBasis {
    /// Enumerate `D^(M)` with the default dimension cap.
    pub fn new(sites: usize, cutoff: usize) -> Result<Self> {
        Self::with_cap(sites, cutoff, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(sites: usize, cutoff: usize, cap: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidParameter("basis needs at least one site".into()));
        }
        if cutoff > u16::MAX as usize {
            return Err(Error::InvalidParameter(format!("cutoff {cutoff} too large")));
        }
        let dim = truncated_dim(sites, cutoff);
        if dim > cap as u128 {
            return Err(Error::DimensionCap { dim, cap });
        }
        let dim = dim as usize;

        let mut occupations = Vec::with_capacity(dim * sites);
        let mut sector_starts = Vec::with_capacity(cutoff + 2);
        let mut scratch = vec![0u16; sites];
        for total in 0..=cutoff {
            sector_starts.push(occupations.len() / sites);
            push_compositions(&mut scratch, 0, total, &mut occupations);
        }
        sector_starts.push(occupations.len() / sites);
        debug_assert_eq!(occupations.len(), dim * sites);

        let lookup = occupations
            .chunks_exact(sites)
            .enumerate()
            .map(|(i, s)| (Box::from(s), i))
            .collect();

        Ok(Self {
            sites,
            cutoff,
            occupations,
            lookup,
            sector_starts,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.occupations.len() / self.sites
    }

    /// Occupations of the state at `index`.
    pub fn state(&self, index: usize) -> &[u16] {
        &self.occupations[index * self.sites..(index + 1) * self.sites]
    }

    pub fn state_at(&self, index: usize) -> OccupationState {
        OccupationState(self.state(index).to_vec())
    }

    pub fn total(&self, index: usize) -> usize {
        self.state(index).iter().map(|&n| n as usize).sum()
    }

    /// Index range of the fixed-total sector `D_m`.
    pub fn sector_range(&self, m: usize) -> Range<usize> {
        assert!(m <= self.cutoff, "sector {m} above cutoff {}", self.cutoff);
        self.sector_starts[m]..self.sector_starts[m + 1]
    }

    /// Number of states with total at most `m` (`dim D^(m)`), for `m ≤ M`.
    pub fn prefix_dim(&self, m: usize) -> usize {
        self.sector_range(m).end
    }

    pub fn index_of(&self, state: &[u16]) -> Result<usize> {
        if state.len() != self.sites {
            return Err(Error::StateLength {
                got: state.len(),
                expected: self.sites,
            });
        }
        let total: usize = state.iter().map(|&n| n as usize).sum();
        if total > self.cutoff {
            return Err(Error::OutOfTruncation {
                total,
                cutoff: self.cutoff,
            });
        }
        Ok(self.lookup[state])
    }

    /// Index of `state`, or `None` when it leaves the truncation.
    pub fn try_index(&self, state: &[u16]) -> Option<usize> {
        self.lookup.get(state).copied()
    }

    pub fn states(&self) -> impl Iterator<Item = &[u16]> {
        self.occupations.chunks_exact(self.sites)
    }
}

/// Append all compositions of `remaining` into `slots[pos..]` in
/// lexicographically ascending order.
fn push_compositions(slots: &mut [u16], pos: usize, remaining: usize, out: &mut Vec<u16>) {
    if pos + 1 == slots.len() {
        slots[pos] = remaining as u16;
        out.extend_from_slice(slots);
        return;
    }
    for n in 0..=remaining {
        slots[pos] = n as u16;
        push_compositions(slots, pos + 1, remaining - n, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every vector in `{0..=m}^L`, filtered by total; independent of the
    /// recursive enumeration.
    fn brute_force(sites: usize, cutoff: usize) -> Vec<Vec<u16>> {
        let mut out = Vec::new();
        let base = cutoff + 1;
        for code in 0..base.pow(sites as u32) {
            let mut v = vec![0u16; sites];
            let mut c = code;
            for slot in v.iter_mut().rev() {
                *slot = (c % base) as u16;
                c /= base;
            }
            if v.iter().map(|&n| n as usize).sum::<usize>() <= cutoff {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn small_dimensions() {
        assert_eq!(TruncatedBasis::new(2, 2).unwrap().dim(), 6);
        assert_eq!(brute_force(2, 2).len(), 6);
        let single = TruncatedBasis::new(1, 5).unwrap();
        assert_eq!(single.dim(), 6);
        for n in 0..=5u16 {
            assert_eq!(single.state(n as usize), &[n]);
        }
        let vac = TruncatedBasis::new(3, 0).unwrap();
        assert_eq!(vac.dim(), 1);
        assert_eq!(vac.state(0), &[0, 0, 0]);
    }

    #[test]
    fn sector_dims() {
        let oracle = brute_force(3, 2).iter().filter(|s| s.iter().sum::<u16>() == 2).count();
        assert_eq!(oracle, 6);
        assert_eq!(sector_dim(3, 2), 6);
        for l in 1..6 {
            assert_eq!(sector_dim(l, 0), 1);
        }
        for m in 0..10 {
            assert_eq!(sector_dim(1, m), 1);
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for l in 1..=6 {
            for m in 0..=8 {
                if (m + 1usize).pow(l as u32) > 2_000_000 {
                    continue;
                }
                let basis = TruncatedBasis::new(l, m).unwrap();
                let mut brute = brute_force(l, m);
                assert_eq!(basis.dim() as u128, truncated_dim(l, m));
                assert_eq!(basis.dim(), brute.len(), "L={l} M={m}");
                brute.sort_by_key(|s| (s.iter().map(|&n| n as usize).sum::<usize>(), s.clone()));
                let ours: Vec<Vec<u16>> = basis.states().map(|s| s.to_vec()).collect();
                assert_eq!(ours, brute);
            }
        }
    }

    #[test]
    fn dimension_formula_up_to_six_sites() {
        for l in 1..=6 {
            for m in 0..=8 {
                let basis = TruncatedBasis::new(l, m).unwrap();
                assert_eq!(basis.dim() as u128, truncated_dim(l, m));
                let by_sector: usize = (0..=m).map(|k| basis.sector_range(k).len()).sum();
                assert_eq!(by_sector, basis.dim());
                for k in 0..=m {
                    assert_eq!(basis.sector_range(k).len() as u128, sector_dim(l, k));
                }
            }
        }
    }

    #[test]
    fn sectors_are_contiguous_and_ordered() {
        let basis = TruncatedBasis::new(3, 4).unwrap();
        let mut next = 0;
        for m in 0..=4 {
            let r = basis.sector_range(m);
            assert_eq!(r.start, next);
            for i in r.clone() {
                assert_eq!(basis.total(i), m);
            }
            next = r.end;
        }
        assert_eq!(next, basis.dim());
    }

    #[test]
    fn index_lookup() {
        let basis = TruncatedBasis::new(3, 3).unwrap();
        assert_eq!(basis.index_of(&[0, 0, 0]).unwrap(), 0);
        assert!(matches!(
            basis.index_of(&[2, 1, 1]),
            Err(Error::OutOfTruncation { total: 4, cutoff: 3 })
        ));
        assert!(matches!(basis.index_of(&[1, 1]), Err(Error::StateLength { .. })));
        for i in 0..basis.dim() {
            assert_eq!(basis.index_of(basis.state(i)).unwrap(), i);
        }
    }

    #[test]
    fn prefix_stability() {
        for l in 1..=4 {
            let big = TruncatedBasis::new(l, 6).unwrap();
            for m in 0..6 {
                let small = TruncatedBasis::new(l, m).unwrap();
                assert_eq!(small.dim(), big.prefix_dim(m));
                for i in 0..small.dim() {
                    assert_eq!(small.state(i), big.state(i));
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = TruncatedBasis::with_cap(4, 10, 100).unwrap_err();
        assert!(matches!(err, Error::DimensionCap { dim: 1001, cap: 100 }));
        assert!(TruncatedBasis::new(9, 20).is_err());
    }
}
