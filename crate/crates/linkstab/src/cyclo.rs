//! Exact scalar arithmetic for level-`k` theories.
//!
//! Amplitudes at odd prime level `k` live in the cyclotomic ring
//! `Z[ζ]` with `ζ = exp(2πi/4k)`, localized at `k`: every scalar is a
//! polynomial in `ζ` with integer coefficients divided by a power of `k`.
//! This ring contains everything the calculus needs in exact form:
//!
//! * `ω = ζ^4`, the primitive `k`-th root of unity carried by charges,
//! * `i = ζ^k`, needed for levels `k ≡ 3 (mod 4)`,
//! * `√k`, via the quadratic Gauss sum `G = Σ_m ω^(m²)`, so the
//!   `1/√k` in the modular S-matrix is exact.
//!
//! Elements are kept in canonical form: coefficients on the power basis
//! `1, ζ, …, ζ^(2k−3)` reduced modulo the `4k`-th cyclotomic polynomial
//! `Φ_4k(x) = Σ_j (−x²)^j`, with the power of `k` in the denominator
//! minimal. Equality of canonical forms is therefore literal equality
//! of scalars, and a scalar is zero exactly when its coefficient vector
//! is zero.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Level of the theory: an odd prime `k`.
///
/// Copyable handle; the reduction and evaluation tables for each level
/// are built once and shared process-wide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Level {
    k: u64,
}

impl Level {
    /// Validates that `k` is an odd prime and returns the level.
    pub fn new(k: u64) -> Result<Level> {
        if k < 3 || k % 2 == 0 || !is_prime(k) {
            return Err(Error::InvalidLevel(k));
        }
        Ok(Level { k })
    }

    /// The qudit dimension `k`.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// `k mod 4`, which is 1 or 3 and controls whether `√k` or `i√k`
    /// equals the Gauss sum.
    pub fn residue_mod_4(&self) -> u64 {
        self.k % 4
    }

    /// Degree of the ring over the integers: `φ(4k) = 2(k−1)`.
    pub(crate) fn dim(&self) -> usize {
        2 * (self.k as usize - 1)
    }

    /// Reduces an integer to a canonical residue in `0..k`.
    pub(crate) fn residue(&self, e: i64) -> u64 {
        e.rem_euclid(self.k as i64) as u64
    }

    /// Multiplicative inverse mod `k` of a nonzero residue.
    pub(crate) fn inv_mod(&self, a: u64) -> u64 {
        debug_assert!(a % self.k != 0);
        pow_mod(a % self.k, self.k - 2, self.k)
    }

    /// Legendre symbol of `a` mod `k` as `+1`, `-1`, or `0`.
    pub(crate) fn legendre(&self, a: u64) -> i64 {
        let r = pow_mod(a % self.k, (self.k - 1) / 2, self.k);
        if r == 0 {
            0
        } else if r == 1 {
            1
        } else {
            -1
        }
    }

    fn tables(&self) -> Arc<Tables> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Tables>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        map.entry(self.k)
            .or_insert_with(|| Arc::new(Tables::build(self.k)))
            .clone()
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Per-level lookup tables: canonical coordinates of every power of `ζ`
/// and the complex values of those powers.
struct Tables {
    dim: usize,
    /// `red[e]` is the canonical coefficient vector of `ζ^e`, `e < 4k`.
    /// Entries are always −1, 0, or +1.
    red: Vec<Vec<i64>>,
    /// `exp2pi[e] = exp(2πi e / 4k)` for `e < 4k`.
    exp2pi: Vec<Complex64>,
}

impl Tables {
    fn build(k: u64) -> Tables {
        let k = k as usize;
        let n = 4 * k;
        let dim = 2 * (k - 1);
        let mut red: Vec<Vec<i64>> = Vec::with_capacity(n);
        for e in 0..dim {
            let mut v = vec![0i64; dim];
            v[e] = 1;
            red.push(v);
        }
        // ζ^(2k−2) = Σ_{j<k−1} (−1)^(j+1) ζ^(2j), from Φ_4k(ζ) = 0,
        // and the same relation shifted by one for ζ^(2k−1).
        for shift in 0..2 {
            let mut v = vec![0i64; dim];
            for j in 0..k - 1 {
                v[2 * j + shift] = if j % 2 == 0 { -1 } else { 1 };
            }
            red.push(v);
        }
        // ζ^(2k) = −1 handles the upper half.
        for e in 2 * k..n {
            let v = red[e - 2 * k].iter().map(|c| -c).collect();
            red.push(v);
        }
        let exp2pi = (0..n)
            .map(|e| {
                let t = 2.0 * std::f64::consts::PI * e as f64 / n as f64;
                Complex64::new(t.cos(), t.sin())
            })
            .collect();
        Tables { dim, red, exp2pi }
    }
}

/// Exact scalar over a fixed level: an element of `Z[ζ_4k]` divided by
/// `k^kden`, held in canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct CycScalar {
    k: u64,
    kden: u32,
    coeffs: Vec<i64>,
}

impl CycScalar {
    /// The zero scalar.
    pub fn zero(level: Level) -> CycScalar {
        CycScalar {
            k: level.k,
            kden: 0,
            coeffs: vec![0; level.dim()],
        }
    }

    /// The scalar one.
    pub fn one(level: Level) -> CycScalar {
        CycScalar::from_int(level, 1)
    }

    /// An ordinary integer as a scalar.
    pub fn from_int(level: Level, n: i64) -> CycScalar {
        let mut s = CycScalar::zero(level);
        s.coeffs[0] = n;
        s.canonicalize();
        s
    }

    /// `ω^e` where `ω = exp(2πi/k)`; the exponent is reduced mod `k`.
    pub fn omega_power(level: Level, e: i64) -> CycScalar {
        CycScalar::root_power(level, 4 * level.residue(e) as i64)
    }

    /// The imaginary unit `i = ζ^k`.
    pub fn i_unit(level: Level) -> CycScalar {
        CycScalar::root_power(level, level.k as i64)
    }

    /// `ζ^e` for the underlying `4k`-th root of unity.
    pub fn root_power(level: Level, e: i64) -> CycScalar {
        let t = level.tables();
        let idx = e.rem_euclid(4 * level.k as i64) as usize;
        CycScalar {
            k: level.k,
            kden: 0,
            coeffs: t.red[idx].clone(),
        }
    }

    /// The quadratic Gauss sum `G = Σ_{m mod k} ω^(m²)`, evaluated by
    /// direct summation. `G·conj(G) = k`, and `G` equals `√k` or `i√k`
    /// according to `k mod 4`.
    pub fn gauss_sum(level: Level) -> CycScalar {
        let t = level.tables();
        let k = level.k;
        let mut coeffs = vec![0i64; level.dim()];
        for m in 0..k {
            let e = (4 * (m * m % k)) as usize;
            for (c, r) in coeffs.iter_mut().zip(&t.red[e]) {
                *c += r;
            }
        }
        let mut s = CycScalar {
            k,
            kden: 0,
            coeffs,
        };
        s.canonicalize();
        s
    }

    /// `√k` exactly: the Gauss sum times a fourth root of unity chosen
    /// by `k mod 4`.
    pub fn sqrt_k(level: Level) -> CycScalar {
        let g = CycScalar::gauss_sum(level);
        match level.residue_mod_4() {
            1 => g,
            _ => &g * &CycScalar::root_power(level, 3 * level.k as i64), // −i·G
        }
    }

    /// `1/√k` exactly, as `√k / k`.
    pub fn inv_sqrt_k(level: Level) -> CycScalar {
        let mut s = CycScalar::sqrt_k(level);
        s.kden += 1;
        s.canonicalize();
        s
    }

    /// `Σ_{m mod k} ω^(a m² + b m)` in closed form: for `a ≠ 0` this is
    /// `(a|k) G ω^(−b² (4a)^(−1))` with `(a|k)` the Legendre symbol;
    /// for `a = 0` it is `k` when `b = 0` and zero otherwise.
    pub fn quadratic_gauss_sum(level: Level, a: i64, b: i64) -> CycScalar {
        let k = level.k;
        let ar = level.residue(a);
        let br = level.residue(b);
        if ar == 0 {
            return if br == 0 {
                CycScalar::from_int(level, k as i64)
            } else {
                CycScalar::zero(level)
            };
        }
        let inv4a = level.inv_mod(4 % k * ar % k);
        let shift = (br * br % k) * inv4a % k;
        let mut s = &CycScalar::gauss_sum(level) * &CycScalar::omega_power(level, -(shift as i64));
        if level.legendre(ar) < 0 {
            s = -&s;
        }
        s
    }

    /// The level this scalar belongs to.
    pub fn level(&self) -> Level {
        Level { k: self.k }
    }

    /// Power of `k` in the denominator (minimal in canonical form).
    pub fn kden(&self) -> u32 {
        self.kden
    }

    /// Coefficients on the power basis `1, ζ, …, ζ^(2k−3)` of the
    /// numerator.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// True exactly for the zero scalar.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Whether this scalar is the integer `n`.
    pub fn is_int(&self, n: i64) -> bool {
        self.kden == 0
            && self.coeffs[0] == n
            && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Complex conjugate, exact: `ζ ↦ ζ^(−1)`.
    pub fn conj(&self) -> CycScalar {
        let level = self.level();
        let t = level.tables();
        let n = 4 * self.k as usize;
        let mut coeffs = vec![0i64; t.dim];
        for (e, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let idx = (n - e) % n;
            for (o, r) in coeffs.iter_mut().zip(&t.red[idx]) {
                *o += c * r;
            }
        }
        let mut s = CycScalar {
            k: self.k,
            kden: self.kden,
            coeffs,
        };
        s.canonicalize();
        s
    }

    /// Scale by an integer.
    pub fn scale(&self, n: i64) -> CycScalar {
        let mut s = self.clone();
        for c in &mut s.coeffs {
            *c = c
                .checked_mul(n)
                .expect("coefficient overflow in CycScalar::scale");
        }
        s.canonicalize();
        s
    }

    /// Greatest common divisor of the numerator coefficients; zero for
    /// the zero scalar.
    pub(crate) fn coeff_content(&self) -> i64 {
        let mut g: i64 = 0;
        for &c in &self.coeffs {
            let mut a = g;
            let mut b = c.abs();
            while b != 0 {
                let r = a % b;
                a = b;
                b = r;
            }
            g = a;
        }
        g
    }

    /// Divides every numerator coefficient by `d`, which must divide
    /// all of them exactly.
    pub(crate) fn div_int_exact(&self, d: i64) -> CycScalar {
        debug_assert!(d != 0);
        let mut s = self.clone();
        for c in &mut s.coeffs {
            debug_assert!(*c % d == 0);
            *c /= d;
        }
        s.canonicalize();
        s
    }

    /// Multiply by `k^m` (for `m < 0`, this divides and the division
    /// must be exact, which canonicalization guarantees by adjusting
    /// the stored denominator).
    pub fn mul_k_pow(&self, m: i32) -> CycScalar {
        let mut s = self.clone();
        if m >= 0 {
            let kk = self.k as i128;
            let mut f = 1i128;
            for _ in 0..m {
                f *= kk;
            }
            for c in &mut s.coeffs {
                *c = i128_to_i64(*c as i128 * f);
            }
        } else {
            s.kden += (-m) as u32;
        }
        s.canonicalize();
        s
    }

    /// Floating-point image of the scalar.
    pub fn to_complex(&self) -> Complex64 {
        let t = self.level().tables();
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                acc += t.exp2pi[e].scale(c as f64);
            }
        }
        acc / (self.k as f64).powi(self.kden as i32)
    }

    /// Verifies the operand lives over the same level.
    fn check_level(&self, other: &CycScalar) {
        assert_eq!(
            self.k, other.k,
            "level mismatch in scalar arithmetic: {} vs {}",
            self.k, other.k
        );
    }

    /// Restores canonical form: removes common factors of `k` against
    /// the denominator. Divisibility of the value by `k` is exactly
    /// divisibility of every basis coefficient, because the power basis
    /// is an integral basis.
    fn canonicalize(&mut self) {
        let k = self.k as i64;
        while self.kden > 0 && self.coeffs.iter().all(|&c| c % k == 0) {
            for c in &mut self.coeffs {
                *c /= k;
            }
            self.kden -= 1;
        }
        if self.kden > 0 && self.is_zero() {
            self.kden = 0;
        }
    }

    fn add_signed(&self, other: &CycScalar, sign: i64) -> CycScalar {
        self.check_level(other);
        let kden = self.kden.max(other.kden);
        let k = self.k as i128;
        let mut fa = 1i128;
        for _ in 0..kden - self.kden {
            fa *= k;
        }
        let mut fb = 1i128;
        for _ in 0..kden - other.kden {
            fb *= k;
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| i128_to_i64(a as i128 * fa + sign as i128 * b as i128 * fb))
            .collect();
        let mut s = CycScalar {
            k: self.k,
            kden,
            coeffs,
        };
        s.canonicalize();
        s
    }

    fn mul_impl(&self, other: &CycScalar) -> CycScalar {
        self.check_level(other);
        if self.is_zero() || other.is_zero() {
            return CycScalar::zero(self.level());
        }
        let level = self.level();
        let t = level.tables();
        let dim = t.dim;
        // Convolve the numerators, then fold exponents ≥ dim back onto
        // the basis through the reduction table.
        let mut conv = vec![0i128; 2 * dim - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let a = a as i128;
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b != 0 {
                    conv[i + j] += a * b as i128;
                }
            }
        }
        let mut coeffs = vec![0i128; dim];
        for (e, &c) in conv.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if e < dim {
                coeffs[e] += c;
            } else {
                for (o, &r) in coeffs.iter_mut().zip(&t.red[e]) {
                    *o += c * r as i128;
                }
            }
        }
        let mut s = CycScalar {
            k: self.k,
            kden: self.kden + other.kden,
            coeffs: coeffs.into_iter().map(i128_to_i64).collect(),
        };
        s.canonicalize();
        s
    }
}

fn i128_to_i64(v: i128) -> i64 {
    i64::try_from(v).expect("coefficient overflow in exact scalar arithmetic")
}

impl std::ops::Add for &CycScalar {
    type Output = CycScalar;
    fn add(self, rhs: &CycScalar) -> CycScalar {
        self.add_signed(rhs, 1)
    }
}

impl std::ops::Sub for &CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: &CycScalar) -> CycScalar {
        self.add_signed(rhs, -1)
    }
}

impl std::ops::Mul for &CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: &CycScalar) -> CycScalar {
        self.mul_impl(rhs)
    }
}

impl std::ops::Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        let mut s = self.clone();
        for c in &mut s.coeffs {
            *c = -*c;
        }
        s
    }
}

impl std::ops::AddAssign<&CycScalar> for CycScalar {
    fn add_assign(&mut self, rhs: &CycScalar) {
        *self = self.add_signed(rhs, 1);
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.unsigned_abs();
            match e {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    if e == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{e}")?;
                    }
                }
            }
        }
        if self.kden > 0 {
            write!(f, " /{}^{}", self.k, self.kden)?;
        }
        Ok(())
    }
}

/// Whether `u = c·v` for some nonzero scalar `c`, decided exactly.
///
/// The ring is an integral domain, so pivot cross-ratios decide the
/// question: with `p` the first nonzero position of `v`, the vectors
/// are proportional exactly when `u[p] ≠ 0` and
/// `u[i]·v[p] = u[p]·v[i]` for every `i`. The all-zero vector is
/// proportional only to the all-zero vector.
///
/// Panics if the slices differ in length or level.
pub fn proportional(u: &[CycScalar], v: &[CycScalar]) -> bool {
    assert_eq!(u.len(), v.len(), "proportionality needs equal lengths");
    let pu = u.iter().position(|a| !a.is_zero());
    let pv = v.iter().position(|a| !a.is_zero());
    match (pu, pv) {
        (None, None) => true,
        (Some(_), None) | (None, Some(_)) => false,
        (Some(_), Some(p)) => {
            if u[p].is_zero() {
                return false;
            }
            u.iter()
                .zip(v)
                .all(|(ui, vi)| &(ui * &v[p]) == &(&u[p] * vi))
        }
    }
}
