//! Exact gates and distinguished tensors: the modular gates `S`, `T`,
//! the Weyl pair `X`, `Z`, the phase gate `P = Z^((k−1)/2)·T`, the
//! fusion vertex and its adjoint, and the composites built from them
//! (basis copy, controlled add, and the four-leg perfect tensor).
//!
//! A [`GateMatrix`] maps `nin` qudit legs to `nout` qudit legs with
//! exact entries; `1/√k` factors are exact thanks to the Gauss sum, so
//! `S†S = 1` holds literally. The composites are produced by
//! contracting their defining vertex networks (composition of fusion,
//! its adjoint, and Fourier rotations), never by transcribing a closed
//! form, and the closed forms are recovered in tests up to the overall
//! `√k` factors the path integral leaves behind.

use crate::cyclo::{proportional, CycScalar, Level};
use crate::error::{Error, Result};
use crate::state::{DenseState, Orientation, Site};

/// Exact linear map from `nin` to `nout` qudit legs. Entries are
/// row-major over out-leg values (slowest) then in-leg values.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    level: Level,
    nout: usize,
    nin: usize,
    entries: Vec<CycScalar>,
}

impl GateMatrix {
    /// Builds a gate from a closure over (out values, in values).
    pub fn from_fn(
        level: Level,
        nout: usize,
        nin: usize,
        mut f: impl FnMut(&[u64], &[u64]) -> CycScalar,
    ) -> GateMatrix {
        let k = level.k() as usize;
        let rows = k.pow(nout as u32);
        let cols = k.pow(nin as u32);
        let mut entries = Vec::with_capacity(rows * cols);
        let mut ov = vec![0u64; nout];
        let mut iv = vec![0u64; nin];
        for r in 0..rows {
            decode(level, r, &mut ov);
            for c in 0..cols {
                decode(level, c, &mut iv);
                entries.push(f(&ov, &iv));
            }
        }
        GateMatrix {
            level,
            nout,
            nin,
            entries,
        }
    }

    /// Identity on `n` legs.
    pub fn identity(level: Level, n: usize) -> GateMatrix {
        GateMatrix::from_fn(level, n, n, |o, i| {
            if o == i {
                CycScalar::one(level)
            } else {
                CycScalar::zero(level)
            }
        })
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn nin(&self) -> usize {
        self.nin
    }

    pub fn nout(&self) -> usize {
        self.nout
    }

    pub fn entries(&self) -> &[CycScalar] {
        &self.entries
    }

    /// Entry at explicit out/in values.
    pub fn entry(&self, out: &[u64], inp: &[u64]) -> &CycScalar {
        let k = self.level.k() as usize;
        let r = out.iter().fold(0usize, |a, &v| a * k + v as usize % k);
        let c = inp.iter().fold(0usize, |a, &v| a * k + v as usize % k);
        &self.entries[r * k.pow(self.nin as u32) + c]
    }

    /// `self ∘ rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &GateMatrix) -> Result<GateMatrix> {
        if self.level != rhs.level {
            return Err(Error::LevelMismatch(self.level.k(), rhs.level.k()));
        }
        if self.nin != rhs.nout {
            return Err(Error::ArityMismatch {
                expected: self.nin,
                got: rhs.nout,
            });
        }
        let k = self.level.k() as usize;
        let rows = k.pow(self.nout as u32);
        let mid = k.pow(self.nin as u32);
        let cols = k.pow(rhs.nin as u32);
        let mut entries = vec![CycScalar::zero(self.level); rows * cols];
        for r in 0..rows {
            for m in 0..mid {
                let a = &self.entries[r * mid + m];
                if a.is_zero() {
                    continue;
                }
                for c in 0..cols {
                    let b = &rhs.entries[m * cols + c];
                    if !b.is_zero() {
                        entries[r * cols + c] += &(a * b);
                    }
                }
            }
        }
        Ok(GateMatrix {
            level: self.level,
            nout: self.nout,
            nin: rhs.nin,
            entries,
        })
    }

    /// Tensor product of gates, `self` legs first.
    pub fn kron(&self, rhs: &GateMatrix) -> Result<GateMatrix> {
        if self.level != rhs.level {
            return Err(Error::LevelMismatch(self.level.k(), rhs.level.k()));
        }
        let k = self.level.k() as usize;
        let (ra, ca) = (k.pow(self.nout as u32), k.pow(self.nin as u32));
        let (rb, cb) = (k.pow(rhs.nout as u32), k.pow(rhs.nin as u32));
        let mut entries = Vec::with_capacity(ra * ca * rb * cb);
        for oa in 0..ra {
            for ob in 0..rb {
                for ia in 0..ca {
                    for ib in 0..cb {
                        entries.push(&self.entries[oa * ca + ia] * &rhs.entries[ob * cb + ib]);
                    }
                }
            }
        }
        Ok(GateMatrix {
            level: self.level,
            nout: self.nout + rhs.nout,
            nin: self.nin + rhs.nin,
            entries,
        })
    }

    /// Adjoint: conjugate transpose, in/out legs swapped.
    pub fn dagger(&self) -> GateMatrix {
        let k = self.level.k() as usize;
        let rows = k.pow(self.nout as u32);
        let cols = k.pow(self.nin as u32);
        let mut entries = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                entries.push(self.entries[r * cols + c].conj());
            }
        }
        GateMatrix {
            level: self.level,
            nout: self.nin,
            nin: self.nout,
            entries,
        }
    }

    /// Reorders legs: new out-leg `i` reads old out-leg `out_perm[i]`,
    /// and likewise for in-legs.
    pub fn permute_legs(&self, out_perm: &[usize], in_perm: &[usize]) -> Result<GateMatrix> {
        if out_perm.len() != self.nout || in_perm.len() != self.nin {
            return Err(Error::ArityMismatch {
                expected: self.nout + self.nin,
                got: out_perm.len() + in_perm.len(),
            });
        }
        let level = self.level;
        Ok(GateMatrix::from_fn(
            level,
            self.nout,
            self.nin,
            |o, i| {
                let ov: Vec<u64> = out_perm.iter().map(|&p| o[p]).collect();
                let iv: Vec<u64> = in_perm.iter().map(|&p| i[p]).collect();
                self.entry(&ov, &iv).clone()
            },
        ))
    }

    /// Views the gate as a state: out legs become `Ket` sites, in legs
    /// `Bra` sites, listed in that order.
    pub fn as_state(&self, out_names: &[&str], in_names: &[&str]) -> Result<DenseState> {
        if out_names.len() != self.nout || in_names.len() != self.nin {
            return Err(Error::ArityMismatch {
                expected: self.nout + self.nin,
                got: out_names.len() + in_names.len(),
            });
        }
        let mut sites: Vec<Site> = out_names.iter().map(|n| Site::ket(*n)).collect();
        sites.extend(in_names.iter().map(|n| Site::bra(*n)));
        DenseState::new(self.level, sites, self.entries.clone())
    }

    /// Whether two gates of identical shape agree up to a nonzero
    /// scalar.
    pub fn proportional_to(&self, other: &GateMatrix) -> Result<bool> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level.k(), other.level.k()));
        }
        if self.nout != other.nout || self.nin != other.nin {
            return Err(Error::ArityMismatch {
                expected: self.nout + self.nin,
                got: other.nout + other.nin,
            });
        }
        Ok(proportional(&self.entries, &other.entries))
    }

    /// Applies the gate to the named `Ket` sites of a state (leg order
    /// follows the target list). When the gate changes arity, the
    /// first `min(nin, nout)` target names survive and any extra out
    /// legs get `~p` suffixes.
    pub fn apply(&self, state: &DenseState, targets: &[&str]) -> Result<DenseState> {
        if targets.len() != self.nin {
            return Err(Error::ArityMismatch {
                expected: self.nin,
                got: targets.len(),
            });
        }
        if self.level != state.level() {
            return Err(Error::LevelMismatch(state.level().k(), self.level.k()));
        }
        let mut tpos = Vec::with_capacity(targets.len());
        for t in targets {
            let p = state.site_position(t)?;
            if state.sites()[p].orientation != Orientation::Ket {
                return Err(Error::OrientationMismatch(t.to_string()));
            }
            if tpos.contains(&p) {
                return Err(Error::DuplicateName(t.to_string()));
            }
            tpos.push(p);
        }
        let level = self.level;
        let k = level.k() as usize;
        // Output site list: non-targets keep their slots; the block of
        // new out legs sits where the first target was.
        let first = *tpos.iter().min().unwrap_or(&0);
        let mut out_sites: Vec<Site> = Vec::new();
        let mut out_block = Vec::new();
        for leg in 0..self.nout {
            let name = if leg < self.nin {
                targets[leg].to_string()
            } else {
                if targets.is_empty() { format!("leg~{leg}") } else { format!("{}~{leg}", targets[0]) }
            };
            out_block.push(Site::ket(name));
        }
        for (i, s) in state.sites().iter().enumerate() {
            if i == first {
                out_sites.extend(out_block.iter().cloned());
            }
            if !tpos.contains(&i) {
                out_sites.push(s.clone());
            }
        }
        if state.sites().is_empty() || first >= state.sites().len() {
            out_sites.extend(out_block.iter().cloned());
        }
        let mut out = DenseState::null(level, out_sites)?;
        let keep: Vec<usize> = (0..state.sites().len())
            .filter(|i| !tpos.contains(i))
            .collect();
        let cols = k.pow(self.nin as u32);
        let rows = k.pow(self.nout as u32);
        let out_n = out.sites().len();
        let mut in_vals = vec![0u64; state.sites().len()];
        let mut out_vals = vec![0u64; out_n];
        let mut gate_out = vec![0u64; self.nout];
        let mut gate_in = vec![0u64; self.nin];
        let keep_out_slots: Vec<usize> = (0..out_n)
            .filter(|&i| i < first || i >= first + self.nout)
            .collect();
        let rest_count = k.pow(keep.len() as u32);
        let mut rest_vals = vec![0u64; keep.len()];
        for rest in 0..rest_count {
            decode(level, rest, &mut rest_vals);
            for (slot, &src) in keep.iter().enumerate() {
                in_vals[src] = rest_vals[slot];
            }
            for (slot, &dst) in keep_out_slots.iter().enumerate() {
                out_vals[dst] = rest_vals[slot];
            }
            for r in 0..rows {
                decode(level, r, &mut gate_out);
                for (leg, &v) in gate_out.iter().enumerate() {
                    out_vals[first + leg] = v;
                }
                let mut acc = CycScalar::zero(level);
                for c in 0..cols {
                    let e = &self.entries[r * cols + c];
                    if e.is_zero() {
                        continue;
                    }
                    decode(level, c, &mut gate_in);
                    for (leg, &v) in gate_in.iter().enumerate() {
                        in_vals[tpos[leg]] = v;
                    }
                    let a = state.amp(&in_vals);
                    if !a.is_zero() {
                        acc += &(e * a);
                    }
                }
                let idx = out.index_of(&out_vals);
                if !acc.is_zero() {
                    *out.amp_mut(idx) = acc;
                }
            }
        }
        Ok(out)
    }
}

fn decode(level: Level, mut index: usize, out: &mut [u64]) {
    let k = level.k() as usize;
    for slot in out.iter_mut().rev() {
        *slot = (index % k) as u64;
        index /= k;
    }
}

/// Modular `S`: `S[j,j'] = ω^(j j') / √k`, exactly unitary.
pub fn s_gate(level: Level) -> GateMatrix {
    let inv = CycScalar::inv_sqrt_k(level);
    GateMatrix::from_fn(level, 1, 1, |o, i| {
        &inv * &CycScalar::omega_power(level, (o[0] * i[0]) as i64)
    })
}

/// Modular `T`: diagonal `ω^(j(j+k)/2)`, the framing twist.
pub fn t_gate(level: Level) -> GateMatrix {
    let k = level.k();
    GateMatrix::from_fn(level, 1, 1, |o, i| {
        if o[0] == i[0] {
            let j = o[0];
            CycScalar::omega_power(level, (j * (j + k) / 2) as i64)
        } else {
            CycScalar::zero(level)
        }
    })
}

/// Charge shift `X |j⟩ = |j+1⟩`.
pub fn x_gate(level: Level) -> GateMatrix {
    let k = level.k();
    GateMatrix::from_fn(level, 1, 1, |o, i| {
        if o[0] == (i[0] + 1) % k {
            CycScalar::one(level)
        } else {
            CycScalar::zero(level)
        }
    })
}

/// Charge phase `Z |j⟩ = ω^j |j⟩`.
pub fn z_gate(level: Level) -> GateMatrix {
    GateMatrix::from_fn(level, 1, 1, |o, i| {
        if o[0] == i[0] {
            CycScalar::omega_power(level, o[0] as i64)
        } else {
            CycScalar::zero(level)
        }
    })
}

/// Quadratic phase gate `P = Z^((k−1)/2) · T`, acting as
/// `P |j⟩ = ω^(j(j−1)/2) |j⟩`. Built by composition, as stated.
pub fn p_gate(level: Level) -> GateMatrix {
    let z = z_gate(level);
    let mut p = t_gate(level);
    for _ in 0..(level.k() - 1) / 2 {
        p = z.compose(&p).expect("shape fixed");
    }
    p
}

/// Fusion vertex as a two-to-one map: `N[j₃; j₁ j₂] = δ(j₃ = j₁+j₂)`.
pub fn fusion_tensor(level: Level) -> GateMatrix {
    let k = level.k();
    GateMatrix::from_fn(level, 1, 2, |o, i| {
        if o[0] == (i[0] + i[1]) % k {
            CycScalar::one(level)
        } else {
            CycScalar::zero(level)
        }
    })
}

/// Adjoint of the fusion vertex (one leg in, two out). Copies in the
/// Fourier-rotated basis: `N† (S†|j⟩) ∝ (S†|j⟩) ⊗ (S†|j⟩)`.
pub fn cofusion_tensor(level: Level) -> GateMatrix {
    fusion_tensor(level).dagger()
}

/// Basis copy, contracted from its defining network: the cofusion
/// vertex conjugated by Fourier rotations, `(S ⊗ S) ∘ N† ∘ S†`.
/// Proportional to `Σ_j |j,j⟩⟨j|` (the leftover scalar is `√k`).
pub fn copy_tensor(level: Level) -> GateMatrix {
    let s = s_gate(level);
    let ss = s.kron(&s).expect("same level");
    let inner = cofusion_tensor(level)
        .compose(&s.dagger())
        .expect("shape fixed");
    ss.compose(&inner).expect("shape fixed")
}

/// Controlled add on (control, target), contracted from its defining
/// network: a copy vertex on the control feeding a fusion vertex on
/// the target. Proportional to `Σ |j, ℓ+j⟩⟨j, ℓ|`.
pub fn c_add(level: Level) -> GateMatrix {
    let id = GateMatrix::identity(level, 1);
    let left = copy_tensor(level).kron(&id).expect("same level");
    let right = id.kron(&fusion_tensor(level)).expect("same level");
    right.compose(&left).expect("shape fixed")
}

/// The four-leg perfect tensor, contracted as two controlled adds with
/// alternating control legs. Proportional to
/// `Σ_{i,j} |i+j, i+2j⟩⟨i, j|`, and every balanced bipartition of its
/// four legs is unitary up to a scalar.
pub fn perfect_tensor(level: Level) -> GateMatrix {
    let ca = c_add(level);
    let swap: Vec<usize> = vec![1, 0];
    let reversed = ca.permute_legs(&swap, &swap).expect("two legs");
    ca.compose(&reversed).expect("shape fixed")
}
