//! Dense many-qudit states with oriented sites.
//!
//! A state lives on an ordered list of named sites, each a `k`-level
//! qudit carrying an orientation: `Ket` sites index vector legs, `Bra`
//! sites index dual legs (amplitudes are stored in the dual basis).
//! Amplitudes are exact [`CycScalar`]s in row-major order with the
//! first listed site slowest.
//!
//! Orientation conventions: [`DenseState::dual`] conjugates every
//! amplitude and flips all flags, [`DenseState::contract_pair`] pairs a
//! `Bra` leg with a `Ket` leg directly on matching basis values, and
//! the charge conjugation `j ↦ j* = −j mod k` enters only through
//! [`DenseState::reverse_site`], which converts a leg between the two
//! orientations the way regluing after an orientation reversal demands.

use crate::cyclo::{proportional, CycScalar, Level};
use crate::error::{Error, Result};

/// Which side of the pairing a site indexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// A vector leg, written `+` in text form.
    Ket,
    /// A dual leg, written `-` in text form.
    Bra,
}

impl Orientation {
    /// The opposite orientation.
    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::Ket => Orientation::Bra,
            Orientation::Bra => Orientation::Ket,
        }
    }
}

/// A named, oriented qudit site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    pub name: String,
    pub orientation: Orientation,
}

impl Site {
    pub fn ket(name: impl Into<String>) -> Site {
        Site {
            name: name.into(),
            orientation: Orientation::Ket,
        }
    }

    pub fn bra(name: impl Into<String>) -> Site {
        Site {
            name: name.into(),
            orientation: Orientation::Bra,
        }
    }
}

/// Dense state on `n` sites: `k^n` exact amplitudes, row-major, first
/// site slowest. States are in general unnormalized; every comparison
/// the crate makes is either exact or explicitly up to a scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    level: Level,
    sites: Vec<Site>,
    amps: Vec<CycScalar>,
}

impl DenseState {
    /// Builds a state from explicit amplitudes. The amplitude vector
    /// must have length `k^n` and site names must be distinct.
    pub fn new(level: Level, sites: Vec<Site>, amps: Vec<CycScalar>) -> Result<DenseState> {
        let expect = (level.k() as usize).pow(sites.len() as u32);
        if amps.len() != expect {
            return Err(Error::ArityMismatch {
                expected: expect,
                got: amps.len(),
            });
        }
        for (i, s) in sites.iter().enumerate() {
            if sites[..i].iter().any(|t| t.name == s.name) {
                return Err(Error::DuplicateName(s.name.clone()));
            }
        }
        for a in &amps {
            if a.level() != level {
                return Err(Error::LevelMismatch(level.k(), a.level().k()));
            }
        }
        Ok(DenseState { level, sites, amps })
    }

    /// The all-zeros amplitude state (useful as an accumulator).
    pub fn null(level: Level, sites: Vec<Site>) -> Result<DenseState> {
        let n = sites.len() as u32;
        let amps = vec![CycScalar::zero(level); (level.k() as usize).pow(n)];
        DenseState::new(level, sites, amps)
    }

    /// Computational basis ket `|values⟩` on `Ket` sites of the given
    /// names.
    pub fn basis(level: Level, names: &[&str], values: &[u64]) -> Result<DenseState> {
        if names.len() != values.len() {
            return Err(Error::ArityMismatch {
                expected: names.len(),
                got: values.len(),
            });
        }
        let sites = names.iter().map(|n| Site::ket(*n)).collect();
        let mut s = DenseState::null(level, sites)?;
        let vals: Vec<u64> = values.iter().map(|&v| v % level.k()).collect();
        let idx = s.index_of(&vals);
        s.amps[idx] = CycScalar::one(level);
        Ok(s)
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn amps(&self) -> &[CycScalar] {
        &self.amps
    }

    pub(crate) fn amp_mut(&mut self, index: usize) -> &mut CycScalar {
        &mut self.amps[index]
    }

    /// Position of a named site.
    pub fn site_position(&self, name: &str) -> Result<usize> {
        self.sites
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSite(name.to_string()))
    }

    /// Row-major index of a value assignment (first site slowest).
    pub fn index_of(&self, values: &[u64]) -> usize {
        debug_assert_eq!(values.len(), self.sites.len());
        let k = self.level.k() as usize;
        values
            .iter()
            .fold(0usize, |acc, &v| acc * k + (v as usize % k))
    }

    /// Decodes a row-major index into per-site values.
    pub fn values_at(&self, mut index: usize) -> Vec<u64> {
        let k = self.level.k() as usize;
        let mut out = vec![0u64; self.sites.len()];
        for slot in out.iter_mut().rev() {
            *slot = (index % k) as u64;
            index /= k;
        }
        out
    }

    /// Amplitude at a value assignment.
    pub fn amp(&self, values: &[u64]) -> &CycScalar {
        &self.amps[self.index_of(values)]
    }

    /// True when every amplitude vanishes.
    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|a| a.is_zero())
    }

    /// `⟨s|s⟩ = Σ conj(ψ)·ψ`, an exact nonnegative scalar.
    pub fn norm_sq(&self) -> CycScalar {
        let mut acc = CycScalar::zero(self.level);
        for a in &self.amps {
            if !a.is_zero() {
                acc += &(&a.conj() * a);
            }
        }
        acc
    }

    /// Rescales every amplitude by an exact scalar.
    pub fn scaled(&self, c: &CycScalar) -> DenseState {
        let amps = self.amps.iter().map(|a| a * c).collect();
        DenseState {
            level: self.level,
            sites: self.sites.clone(),
            amps,
        }
    }

    /// Renames one site.
    pub fn renamed(&self, old: &str, new: &str) -> Result<DenseState> {
        let pos = self.site_position(old)?;
        if self.sites.iter().any(|s| s.name == new) {
            return Err(Error::DuplicateName(new.to_string()));
        }
        let mut s = self.clone();
        s.sites[pos].name = new.to_string();
        Ok(s)
    }

    /// Reorders the sites to the given name order (a permutation of
    /// the current names), relocating amplitudes accordingly.
    pub fn permuted(&self, order: &[&str]) -> Result<DenseState> {
        if order.len() != self.sites.len() {
            return Err(Error::ArityMismatch {
                expected: self.sites.len(),
                got: order.len(),
            });
        }
        let mut from = Vec::with_capacity(order.len());
        for name in order {
            let p = self.site_position(name)?;
            if from.contains(&p) {
                return Err(Error::DuplicateName(name.to_string()));
            }
            from.push(p);
        }
        let sites: Vec<Site> = from.iter().map(|&p| self.sites[p].clone()).collect();
        let mut out = DenseState::null(self.level, sites)?;
        for idx in 0..self.amps.len() {
            if self.amps[idx].is_zero() {
                continue;
            }
            let vals = self.values_at(idx);
            let new_vals: Vec<u64> = from.iter().map(|&p| vals[p]).collect();
            let nidx = out.index_of(&new_vals);
            *out.amp_mut(nidx) = self.amps[idx].clone();
        }
        Ok(out)
    }

    /// Entrywise sum; layouts must agree exactly.
    pub fn checked_add(&self, other: &DenseState) -> Result<DenseState> {
        self.check_layout(other)?;
        let amps = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a + b)
            .collect();
        Ok(DenseState {
            level: self.level,
            sites: self.sites.clone(),
            amps,
        })
    }

    fn check_layout(&self, other: &DenseState) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level.k(), other.level.k()));
        }
        if self.sites != other.sites {
            return Err(Error::ArityMismatch {
                expected: self.sites.len(),
                got: other.sites.len(),
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩` over identical site layouts.
    pub fn inner(&self, other: &DenseState) -> Result<CycScalar> {
        self.check_layout(other)?;
        let mut acc = CycScalar::zero(self.level);
        for (a, b) in self.amps.iter().zip(&other.amps) {
            if !a.is_zero() && !b.is_zero() {
                acc += &(&a.conj() * b);
            }
        }
        Ok(acc)
    }

    /// Whether the two states agree up to a nonzero scalar (layouts
    /// must match exactly).
    pub fn proportional_to(&self, other: &DenseState) -> Result<bool> {
        self.check_layout(other)?;
        Ok(proportional(&self.amps, &other.amps))
    }

    /// Tensor product; site names must not collide.
    pub fn tensor_product(&self, other: &DenseState) -> Result<DenseState> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level.k(), other.level.k()));
        }
        for s in &other.sites {
            if self.sites.iter().any(|t| t.name == s.name) {
                return Err(Error::DuplicateName(s.name.clone()));
            }
        }
        let mut sites = self.sites.clone();
        sites.extend(other.sites.iter().cloned());
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(DenseState {
            level: self.level,
            sites,
            amps,
        })
    }

    /// Passes to the dual vector: conjugates all amplitudes and flips
    /// every orientation flag, leaving basis values untouched.
    pub fn dual(&self) -> DenseState {
        let sites = self
            .sites
            .iter()
            .map(|s| Site {
                name: s.name.clone(),
                orientation: s.orientation.flipped(),
            })
            .collect();
        let amps = self.amps.iter().map(|a| a.conj()).collect();
        DenseState {
            level: self.level,
            sites,
            amps,
        }
    }

    /// Reverses the orientation of one site geometrically: flips its
    /// flag and relabels its basis value by the charge conjugation
    /// `j ↦ −j mod k`. Composing a gluing with this reversal is what
    /// turns `Σ_j |j⟩⟨j|` into the maximally entangled `Σ_j |j, j*⟩`.
    pub fn reverse_site(&self, name: &str) -> Result<DenseState> {
        let pos = self.site_position(name)?;
        let k = self.level.k();
        let mut out = self.clone();
        out.sites[pos].orientation = out.sites[pos].orientation.flipped();
        for (idx, amp) in self.amps.iter().enumerate() {
            let mut vals = self.values_at(idx);
            vals[pos] = (k - vals[pos]) % k;
            let new_idx = self.index_of(&vals);
            out.amps[new_idx] = amp.clone();
        }
        Ok(out)
    }

    /// Contracts a `Bra` site against a `Ket` site (in either order):
    /// `Σ_j` over the pair with basis values matched directly. Both
    /// sites are consumed.
    pub fn contract_pair(&self, a: &str, b: &str) -> Result<DenseState> {
        let pa = self.site_position(a)?;
        let pb = self.site_position(b)?;
        if pa == pb {
            return Err(Error::UnknownSite(format!("{a} paired with itself")));
        }
        let (oa, ob) = (self.sites[pa].orientation, self.sites[pb].orientation);
        if oa == ob {
            return Err(Error::OrientationMismatch(b.to_string()));
        }
        let k = self.level.k();
        let keep: Vec<usize> = (0..self.sites.len())
            .filter(|&i| i != pa && i != pb)
            .collect();
        let sites: Vec<Site> = keep.iter().map(|&i| self.sites[i].clone()).collect();
        let mut out = DenseState::null(self.level, sites)?;
        let mut full = vec![0u64; self.sites.len()];
        for idx in 0..out.amps.len() {
            let rest = out.values_at(idx);
            for (slot, &i) in keep.iter().enumerate() {
                full[i] = rest[slot];
            }
            let mut acc = CycScalar::zero(self.level);
            for j in 0..k {
                full[pa] = j;
                full[pb] = j;
                let a = &self.amps[self.index_of(&full)];
                if !a.is_zero() {
                    acc += a;
                }
            }
            out.amps[idx] = acc;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(k: u64) -> Level {
        Level::new(k).unwrap()
    }

    /// `Σ_j |j⟩_a |j⟩_b`, the diagonal pair state.
    fn diagonal_pair(level: Level) -> DenseState {
        let k = level.k();
        let mut s = DenseState::null(level, vec![Site::ket("a"), Site::ket("b")]).unwrap();
        for j in 0..k {
            let idx = s.index_of(&[j, j]);
            s.amps[idx] = CycScalar::one(level);
        }
        s
    }

    #[test]
    fn indexing_is_row_major_first_site_slowest() {
        let level = lv(3);
        let s = DenseState::basis(level, &["a", "b"], &[1, 2]).unwrap();
        assert_eq!(s.index_of(&[1, 2]), 5);
        assert_eq!(s.values_at(5), vec![1, 2]);
        assert!(s.amp(&[1, 2]).is_int(1));
        assert!(s.amp(&[2, 1]).is_zero());
    }

    #[test]
    fn teleport_through_diagonal_pair() {
        // Contracting Σ_j |j,j⟩ against ⟨1| on the first leg leaves |1⟩.
        let level = lv(3);
        let pair = diagonal_pair(level);
        let probe = DenseState::basis(level, &["p"], &[1]).unwrap().dual();
        let joint = pair.tensor_product(&probe).unwrap();
        let out = joint.contract_pair("p", "a").unwrap();
        let expect = DenseState::basis(level, &["b"], &[1]).unwrap();
        assert_eq!(out.amps(), expect.amps());
        assert_eq!(out.sites()[0].name, "b");
    }

    #[test]
    fn contract_requires_opposite_orientation() {
        let level = lv(3);
        let pair = diagonal_pair(level);
        let probe = DenseState::basis(level, &["p"], &[1]).unwrap();
        let joint = pair.tensor_product(&probe).unwrap();
        assert!(matches!(
            joint.contract_pair("p", "a"),
            Err(Error::OrientationMismatch(_))
        ));
    }

    #[test]
    fn dual_is_an_involution() {
        let level = lv(5);
        let mut s = DenseState::null(level, vec![Site::ket("x"), Site::ket("y")]).unwrap();
        for (i, a) in s.amps.iter_mut().enumerate() {
            *a = CycScalar::omega_power(level, i as i64);
        }
        let d = s.dual();
        assert_eq!(d.sites()[0].orientation, Orientation::Bra);
        assert_eq!(d.dual(), s);
        // dual conjugates amplitudes
        assert_eq!(d.amps()[1], CycScalar::omega_power(level, -1));
    }

    #[test]
    fn reverse_site_negates_basis_value() {
        let level = lv(5);
        let s = DenseState::basis(level, &["x"], &[2]).unwrap();
        let r = s.reverse_site("x").unwrap();
        assert_eq!(r.sites()[0].orientation, Orientation::Bra);
        assert!(r.amp(&[3]).is_int(1));
        assert!(r.amp(&[2]).is_zero());
        assert_eq!(r.reverse_site("x").unwrap(), s);
    }

    #[test]
    fn norm_of_diagonal_pair_is_k() {
        for k in [3, 7] {
            let level = lv(k);
            assert!(diagonal_pair(level).norm_sq().is_int(k as i64));
        }
    }

    #[test]
    fn tensor_product_rejects_name_collisions() {
        let level = lv(3);
        let a = DenseState::basis(level, &["a"], &[0]).unwrap();
        let b = DenseState::basis(level, &["a"], &[1]).unwrap();
        assert!(matches!(
            a.tensor_product(&b),
            Err(Error::DuplicateName(_))
        ));
    }

    #[test]
    fn proportionality_of_scaled_states() {
        let level = lv(5);
        let s = diagonal_pair(level);
        let t = s.scaled(&CycScalar::omega_power(level, 3).scale(2));
        assert!(s.proportional_to(&t).unwrap());
        let basis = DenseState::basis(level, &["a", "b"], &[0, 0]).unwrap();
        assert!(!s.proportional_to(&basis).unwrap());
    }

    #[test]
    fn zero_site_state_is_a_scalar() {
        let level = lv(3);
        let s = DenseState::new(level, vec![], vec![CycScalar::from_int(level, 4)]).unwrap();
        assert_eq!(s.amps().len(), 1);
        assert!(s.norm_sq().is_int(16));
    }

    #[test]
    fn permuted_relocates_amplitudes() {
        let level = lv(3);
        let s = DenseState::basis(level, &["a", "b"], &[1, 2]).unwrap();
        let p = s.permuted(&["b", "a"]).unwrap();
        assert_eq!(p.sites()[0].name, "b");
        assert!(p.amp(&[2, 1]).is_int(1));
        assert!(p.amp(&[1, 2]).is_zero());
        let back = p.permuted(&["a", "b"]).unwrap();
        assert_eq!(back.amps(), s.amps());
        assert!(s.permuted(&["a", "a"]).is_err());
    }
}
