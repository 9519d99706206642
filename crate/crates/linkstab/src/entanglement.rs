//! Replica formulas for entanglement data of exact states: the
//! flat-spectrum entropy `S(A) = -log(Z_2 / Z_1^2)` from a two-copy
//! swap, and the tripartite GHZ count
//! `g = S(A) + S(B) + S(C) + log(Z_3 / Z_1^3)` from a three-copy
//! cyclic twist. Both are evaluated in exact cyclotomic arithmetic and
//! cross-checkable against the stabilizer-tableau rank formula.

use crate::cyclo::{CycScalar, Level};
use crate::error::{Error, Result};
use crate::gates::GateMatrix;
use crate::stabilizer;
use crate::state::DenseState;

/// Copy permutation applied to one region; `Cycle` sends copy
/// `c` to `c+1 (mod 3)` and `CycleInv` is its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perm {
    Id,
    Swap,
    Cycle,
    CycleInv,
}

impl Perm {
    fn table(self, m: usize) -> Result<Vec<usize>> {
        let needs = match self {
            Perm::Id => m,
            Perm::Swap => 2,
            Perm::Cycle | Perm::CycleInv => 3,
        };
        if needs != m {
            return Err(Error::ArityMismatch {
                expected: needs,
                got: m,
            });
        }
        Ok(match self {
            Perm::Id => (0..m).collect(),
            Perm::Swap => vec![1, 0],
            Perm::Cycle => vec![1, 2, 0],
            Perm::CycleInv => vec![2, 0, 1],
        })
    }
}

/// A permutation-twisted pairing of `m` copies of a state: each listed
/// region carries a copy permutation, and sites in no region keep the
/// identity pairing.
#[derive(Debug, Clone)]
pub struct ReplicaSpec {
    m: usize,
    regions: Vec<(Vec<String>, Perm)>,
}

impl ReplicaSpec {
    /// `m` copies, at most three.
    pub fn new(m: usize) -> Result<ReplicaSpec> {
        if !(1..=3).contains(&m) {
            return Err(Error::ArityMismatch { expected: 3, got: m });
        }
        Ok(ReplicaSpec {
            m,
            regions: Vec::new(),
        })
    }

    pub fn copies(&self) -> usize {
        self.m
    }

    pub fn add_region(&mut self, sites: &[&str], perm: Perm) -> Result<()> {
        perm.table(self.m)?;
        self.regions
            .push((sites.iter().map(|s| s.to_string()).collect(), perm));
        Ok(())
    }
}

/// The twisted pairing `⟨s|^⊗m P |s⟩^⊗m`, with `P` permuting the `m`
/// copies of each site by its region's permutation. Evaluated exactly
/// by enumerating support tuples; the permutation operator is never
/// materialized. With `m = 1` this is the squared norm `⟨s|s⟩`.
pub fn replica_z(s: &DenseState, spec: &ReplicaSpec) -> Result<CycScalar> {
    let level = s.level();
    let n = s.site_count();
    let m = spec.m;
    let mut sigma: Vec<Vec<usize>> = vec![(0..m).collect(); n];
    let mut claimed = vec![false; n];
    for (sites, perm) in &spec.regions {
        let table = perm.table(m)?;
        for name in sites {
            let pos = s.site_position(name)?;
            if claimed[pos] {
                return Err(Error::RegionOverlap(name.clone()));
            }
            claimed[pos] = true;
            sigma[pos] = table.clone();
        }
    }
    let amps = s.amps();
    let support: Vec<usize> = (0..amps.len()).filter(|&i| !amps[i].is_zero()).collect();
    let svals: Vec<Vec<u64>> = support.iter().map(|&i| s.values_at(i)).collect();
    let conj_amps: Vec<CycScalar> = support.iter().map(|&i| amps[i].conj()).collect();
    let mut total = CycScalar::zero(level);
    if support.is_empty() {
        return Ok(total);
    }
    let mut idx = vec![0usize; m];
    let mut zvals = vec![0u64; n];
    loop {
        // Copy c of the twisted side reads site i from copy
        // sigma_i(c) of the direct side.
        let mut twisted: Vec<&CycScalar> = Vec::with_capacity(m);
        'copies: for c in 0..m {
            for i in 0..n {
                zvals[i] = svals[idx[sigma[i][c]]][i];
            }
            let a = &amps[s.index_of(&zvals)];
            if a.is_zero() {
                twisted.clear();
                break 'copies;
            }
            twisted.push(a);
        }
        if twisted.len() == m {
            let mut term = conj_amps[idx[0]].clone();
            for &i in &idx[1..] {
                term = &term * &conj_amps[i];
            }
            for a in twisted {
                term = &term * a;
            }
            total += &term;
        }
        // Advance the odometer over support^m.
        let mut c = 0;
        loop {
            if c == m {
                return Ok(total);
            }
            idx[c] += 1;
            if idx[c] < support.len() {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

/// An entropy, reported in dits and nats; `exact_dits` is set when the
/// defining ratio of partition values is exactly a power of `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyValue {
    pub dits: f64,
    pub nats: f64,
    pub exact_dits: Option<i64>,
}

impl EntropyValue {
    fn exact(level: Level, t: i64) -> EntropyValue {
        let dits = t as f64;
        EntropyValue {
            dits,
            nats: dits * (level.k() as f64).ln(),
            exact_dits: Some(t),
        }
    }
}

/// Entanglement entropy of `region` from the two-copy swap:
/// `S(A) = -log(Z_2 / Z_1^2)`, exact on states with a flat
/// entanglement spectrum (all stabilizer states), with a float
/// fallback for display on other inputs.
pub fn flat_entropy(s: &DenseState, region: &[&str]) -> Result<EntropyValue> {
    if s.is_zero() {
        return Err(Error::IllDefined("the zero state has no entropy".into()));
    }
    let level = s.level();
    let n = s.site_count();
    let z1 = replica_z(s, &ReplicaSpec::new(1)?)?;
    let mut spec = ReplicaSpec::new(2)?;
    spec.add_region(region, Perm::Swap)?;
    let z2 = replica_z(s, &spec)?;
    let z1sq = &z1 * &z1;
    for t in 0..=n {
        if z1sq == z2.mul_k_pow(t as i32) {
            return Ok(EntropyValue::exact(level, t as i64));
        }
    }
    let ratio = z2.to_complex().re / z1.to_complex().re.powi(2);
    let nats = -ratio.ln();
    Ok(EntropyValue {
        dits: nats / (level.k() as f64).ln(),
        nats,
        exact_dits: None,
    })
}

fn exact_entropy(s: &DenseState, region: &[&str]) -> Result<i64> {
    let e = flat_entropy(s, region)?;
    e.exact_dits.ok_or(Error::NonInteger(e.dits))
}

/// Number of GHZ triples across the partition `(a, b, c)` of all
/// sites: `g = S(A) + S(B) + S(C) + log(Z_3 / Z_1^3)`, where `Z_3`
/// carries a 3-cycle on `A`, the inverse cycle on `B`, and the
/// identity on `C`. Requires a stabilizer state, where `g` counts the
/// extractable GHZ factors exactly.
pub fn ghz_count(s: &DenseState, a: &[&str], b: &[&str], c: &[&str]) -> Result<i64> {
    if s.is_zero() {
        return Err(Error::IllDefined("the zero state has no GHZ count".into()));
    }
    let n = s.site_count();
    let mut claimed = vec![false; n];
    for region in [a, b, c] {
        for name in region {
            let pos = s.site_position(name)?;
            if claimed[pos] {
                return Err(Error::RegionOverlap((*name).to_string()));
            }
            claimed[pos] = true;
        }
    }
    let covered = claimed.iter().filter(|&&x| x).count();
    if covered != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: covered,
        });
    }
    if !stabilizer::is_stabilizer(s)? {
        return Err(Error::NotStabilizer);
    }
    let sa = exact_entropy(s, a)?;
    let sb = exact_entropy(s, b)?;
    let sc = exact_entropy(s, c)?;
    let z1 = replica_z(s, &ReplicaSpec::new(1)?)?;
    let mut spec = ReplicaSpec::new(3)?;
    spec.add_region(a, Perm::Cycle)?;
    spec.add_region(b, Perm::CycleInv)?;
    spec.add_region(c, Perm::Id)?;
    let z3 = replica_z(s, &spec)?;
    let z1cu = &(&z1 * &z1) * &z1;
    let bound = 3 * n as i32;
    for t in -bound..=bound {
        if z1cu == z3.mul_k_pow(t) {
            return Ok(sa + sb + sc - t as i64);
        }
    }
    let ratio = z3.to_complex().re / z1.to_complex().re.powi(3);
    Err(Error::NonInteger(
        (sa + sb + sc) as f64 + ratio.ln() / (s.level().k() as f64).ln(),
    ))
}

/// Reduced density matrix on `region` (rows and columns ordered by the
/// given site order), as an exact matrix.
pub fn reduced_density_matrix(s: &DenseState, region: &[&str]) -> Result<GateMatrix> {
    let level = s.level();
    let k = level.k() as usize;
    let n = s.site_count();
    let mut inside = Vec::with_capacity(region.len());
    let mut claimed = vec![false; n];
    for name in region {
        let pos = s.site_position(name)?;
        if claimed[pos] {
            return Err(Error::RegionOverlap((*name).to_string()));
        }
        claimed[pos] = true;
        inside.push(pos);
    }
    let outside: Vec<usize> = (0..n).filter(|i| !claimed[*i]).collect();
    let env = k.pow(outside.len() as u32);
    let mut vals = vec![0u64; n];
    Ok(GateMatrix::from_fn(
        level,
        inside.len(),
        inside.len(),
        move |row, col| {
            let mut acc = CycScalar::zero(level);
            for e in 0..env {
                let mut rem = e;
                for &p in outside.iter().rev() {
                    vals[p] = (rem % k) as u64;
                    rem /= k;
                }
                for (i, &p) in inside.iter().enumerate() {
                    vals[p] = row[i];
                }
                let ket = s.amps()[s.index_of(&vals)].clone();
                if ket.is_zero() {
                    continue;
                }
                for (i, &p) in inside.iter().enumerate() {
                    vals[p] = col[i];
                }
                let bra = &s.amps()[s.index_of(&vals)];
                if !bra.is_zero() {
                    acc += &(&ket * &bra.conj());
                }
            }
            acc
        },
    ))
}

/// Exactly decides whether the reduced state on `region` has a flat
/// spectrum, via `tr(ρ_A²) · rank(ρ_A) = (tr ρ_A)²`; the rank is the
/// Schmidt rank, computed by fraction-free elimination.
pub fn flat_spectrum_check(s: &DenseState, region: &[&str]) -> Result<bool> {
    if s.is_zero() {
        return Err(Error::IllDefined(
            "the zero state has no entanglement spectrum".into(),
        ));
    }
    let level = s.level();
    let k = level.k() as usize;
    let n = s.site_count();
    let mut inside = Vec::with_capacity(region.len());
    let mut claimed = vec![false; n];
    for name in region {
        let pos = s.site_position(name)?;
        if claimed[pos] {
            return Err(Error::RegionOverlap((*name).to_string()));
        }
        claimed[pos] = true;
        inside.push(pos);
    }
    let outside: Vec<usize> = (0..n).filter(|i| !claimed[*i]).collect();
    let rows = k.pow(inside.len() as u32);
    let cols = k.pow(outside.len() as u32);
    let mut vals = vec![0u64; n];
    let mut matrix = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut rem = r;
        for &p in inside.iter().rev() {
            vals[p] = (rem % k) as u64;
            rem /= k;
        }
        let mut rowv = Vec::with_capacity(cols);
        for c in 0..cols {
            let mut rem = c;
            for &p in outside.iter().rev() {
                vals[p] = (rem % k) as u64;
                rem /= k;
            }
            rowv.push(s.amps()[s.index_of(&vals)].clone());
        }
        matrix.push(rowv);
    }
    let rank = exact_rank(matrix);
    let z1 = replica_z(s, &ReplicaSpec::new(1)?)?;
    let mut spec = ReplicaSpec::new(2)?;
    spec.add_region(region, Perm::Swap)?;
    let z2 = replica_z(s, &spec)?;
    Ok(z2.scale(rank as i64) == &z1 * &z1)
}

/// Rank over the cyclotomic field, by fraction-free row elimination
/// with integer-content normalization to keep coefficients small.
fn exact_rank(mut m: Vec<Vec<CycScalar>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let piv = m[row][col].clone();
        for r in row + 1..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..cols {
                m[r][c] = &(&m[r][c] * &piv) - &(&m[row][c] * &f);
            }
            normalize_row(&mut m[r]);
        }
        row += 1;
        rank += 1;
    }
    rank
}

/// Scales a row by a positive rational so denominators clear and the
/// integer content drops to one; rank is unaffected.
fn normalize_row(row: &mut [CycScalar]) {
    let shift = row.iter().map(|e| e.kden()).max().unwrap_or(0);
    if shift > 0 {
        for e in row.iter_mut() {
            *e = e.mul_k_pow(shift as i32);
        }
    }
    let mut g: i64 = 0;
    for e in row.iter() {
        let c = e.coeff_content();
        let (mut a, mut b) = (g, c);
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
        }
        g = a;
    }
    if g > 1 {
        for e in row.iter_mut() {
            *e = e.div_int_exact(g);
        }
    }
}
