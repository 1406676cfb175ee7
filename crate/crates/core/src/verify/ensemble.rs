//! Seeded random matrix ensembles with prescribed structure.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::classify::is_core_ep;
use crate::error::{GenInvError, Result};
use crate::numkernel::{CMatrix, Tolerance, C64};

pub const MAX_SIZE: usize = 16;
const CORE_EP_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleClass {
    /// Complex gaussian entries.
    Generic,
    /// Product of `n×r` and `r×n` gaussian factors.
    FixedRank(usize),
    /// `U (C ⊕ J_k(0)) U*` with `U` unitary.
    FixedIndex(usize),
    /// `U (C ⊕ N) U*` with `N` strictly upper triangular.
    CoreEp,
    /// `U (C ⊕ 0) U*`
    Ep,
    /// EP and nilpotent samples, alternating at random.
    KEp,
    /// Unitary conjugate of a strictly upper triangular matrix.
    Nilpotent,
    /// Real integer entries in `[-3, 3]`.
    IntegerSmall,
    /// `U (I_r ⊕ N) U*`, so that `A^{k+1} = A^k`.
    IdempotentCore,
    /// `S (C ⊕ J_k(0)) S⁻¹` with `S` well conditioned but not unitary.
    SimilarIndex(usize),
}

impl fmt::Display for EnsembleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnsembleClass::Generic => write!(f, "generic"),
            EnsembleClass::FixedRank(r) => write!(f, "fixed_rank({r})"),
            EnsembleClass::FixedIndex(k) => write!(f, "fixed_index({k})"),
            EnsembleClass::CoreEp => write!(f, "core_ep"),
            EnsembleClass::Ep => write!(f, "ep"),
            EnsembleClass::KEp => write!(f, "k_ep"),
            EnsembleClass::Nilpotent => write!(f, "nilpotent"),
            EnsembleClass::IntegerSmall => write!(f, "integer_small"),
            EnsembleClass::IdempotentCore => write!(f, "idempotent_core"),
            EnsembleClass::SimilarIndex(k) => write!(f, "similar_index({k})"),
        }
    }
}

/// Accepts `fixed_rank(3)`, `fixed_rank:3` and `fixed_rank=3` for the
/// parameterized classes.
impl FromStr for EnsembleClass {
    type Err = GenInvError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.find(['(', ':', '=']) {
            Some(i) => (&s[..i], Some(s[i + 1..].trim_end_matches(')'))),
            None => (s, None),
        };
        let num = || -> Result<usize> {
            arg.and_then(|a| a.trim().parse().ok())
                .ok_or_else(|| GenInvError::InvalidSpec(format!("class {name} needs an integer parameter")))
        };
        let plain = |c: EnsembleClass| -> Result<EnsembleClass> {
            match arg {
                None => Ok(c),
                Some(_) => Err(GenInvError::InvalidSpec(format!("class {name} takes no parameter"))),
            }
        };
        match name {
            "generic" => plain(EnsembleClass::Generic),
            "fixed_rank" => Ok(EnsembleClass::FixedRank(num()?)),
            "fixed_index" => Ok(EnsembleClass::FixedIndex(num()?)),
            "core_ep" => plain(EnsembleClass::CoreEp),
            "ep" => plain(EnsembleClass::Ep),
            "k_ep" => plain(EnsembleClass::KEp),
            "nilpotent" => plain(EnsembleClass::Nilpotent),
            "integer_small" => plain(EnsembleClass::IntegerSmall),
            "idempotent_core" => plain(EnsembleClass::IdempotentCore),
            "similar_index" => Ok(EnsembleClass::SimilarIndex(num()?)),
            _ => Err(GenInvError::InvalidSpec(format!("unknown ensemble class {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub size: usize,
    pub count: usize,
    pub seed: u64,
    pub class: EnsembleClass,
}

impl EnsembleSpec {
    pub fn new(size: usize, count: usize, seed: u64, class: EnsembleClass) -> Result<Self> {
        let spec = Self {
            size,
            count,
            seed,
            class,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GenInvError::InvalidSpec(m));
        if self.size == 0 || self.size > MAX_SIZE {
            return bad(format!("size must be in 1..={MAX_SIZE}, got {}", self.size));
        }
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        match self.class {
            EnsembleClass::FixedRank(r) if r > self.size => bad(format!("rank {r} exceeds size {}", self.size)),
            EnsembleClass::FixedIndex(k) | EnsembleClass::SimilarIndex(k) if k > self.size => {
                bad(format!("index {k} exceeds size {}", self.size))
            }
            _ => Ok(()),
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of sample `i` of a run seeded with `seed`.
pub fn sample_seed(seed: u64, i: usize) -> u64 {
    splitmix64(splitmix64(seed) ^ (i as u64))
}

pub fn sample_rng(seed: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sample_seed(seed, i))
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| C64::new(normal(rng) * s, normal(rng) * s))
}

/// Haar-like unitary from Gram-Schmidt on a gaussian matrix.
pub fn unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    loop {
        let g = gaussian(n, n, rng);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut v: Vec<C64> = (0..n).map(|i| g.get(i, j)).collect();
            for _ in 0..2 {
                for c in &cols {
                    let dot: C64 = c.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi -= dot * ci;
                    }
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
        if ok {
            return CMatrix::from_fn(n, n, |i, j| cols[j][i]);
        }
    }
}

fn conditioned_values(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.5..2.0)).collect()
}

/// `W diag(s) V*` with singular values in `[0.5, 2)`.
fn nonsingular(n: usize, rng: &mut impl Rng) -> CMatrix {
    let w = unitary(n, rng);
    let v = unitary(n, rng);
    &(&w * &CMatrix::diag_real(&conditioned_values(n, rng))) * &v.conj_transpose()
}

/// `S` and `S⁻¹` with singular values of `S` in `[0.5, 2)`.
fn similarity(n: usize, rng: &mut impl Rng) -> (CMatrix, CMatrix) {
    let w = unitary(n, rng);
    let v = unitary(n, rng);
    let s = conditioned_values(n, rng);
    let inv: Vec<f64> = s.iter().map(|x| 1.0 / x).collect();
    let fwd = &(&w * &CMatrix::diag_real(&s)) * &v.conj_transpose();
    let back = &(&v * &CMatrix::diag_real(&inv)) * &w.conj_transpose();
    (fwd, back)
}

fn strictly_upper(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian(n, n, rng);
    CMatrix::from_fn(n, n, |i, j| if j > i { g.get(i, j) * 0.5 } else { C64::new(0.0, 0.0) })
}

fn jordan_zero(k: usize) -> CMatrix {
    CMatrix::from_fn(k, k, |i, j| C64::new(if j == i + 1 { 1.0 } else { 0.0 }, 0.0))
}

fn conjugate(u: &CMatrix, m: &CMatrix) -> CMatrix {
    &(u * m) * &u.conj_transpose()
}

fn core_plus(
    n: usize,
    nil: usize,
    rng: &mut ChaCha8Rng,
    tail: impl FnOnce(usize, &mut ChaCha8Rng) -> CMatrix,
) -> CMatrix {
    let c = nonsingular(n - nil, rng);
    let t = tail(nil, rng);
    let u = unitary(n, rng);
    conjugate(&u, &CMatrix::block_diag(&c, &t))
}

fn ep(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let r = rng.random_range(1..=n);
    core_plus(n, n - r, rng, |m, _| CMatrix::zeros(m, m))
}

fn nilpotent(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let u = unitary(n, rng);
    conjugate(&u, &strictly_upper(n, rng))
}

/// One sample of `class`, drawn from `rng`.
pub fn sample(class: EnsembleClass, n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    match class {
        EnsembleClass::Generic => gaussian(n, n, rng),
        EnsembleClass::FixedRank(r) => &gaussian(n, r, rng) * &gaussian(r, n, rng),
        EnsembleClass::FixedIndex(k) => core_plus(n, k, rng, |m, _| jordan_zero(m)),
        EnsembleClass::CoreEp => {
            let nil = rng.random_range(1..=n);
            core_plus(n, nil, rng, |m, r| strictly_upper(m, r))
        }
        EnsembleClass::Ep => ep(n, rng),
        EnsembleClass::KEp => {
            if rng.random_bool(0.5) {
                ep(n, rng)
            } else {
                nilpotent(n, rng)
            }
        }
        EnsembleClass::Nilpotent => nilpotent(n, rng),
        EnsembleClass::IntegerSmall => {
            CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-3i32..=3) as f64, 0.0))
        }
        EnsembleClass::IdempotentCore => {
            let r = rng.random_range(1..=n);
            let t = strictly_upper(n - r, rng);
            let u = unitary(n, rng);
            conjugate(&u, &CMatrix::block_diag(&CMatrix::identity(r), &t))
        }
        EnsembleClass::SimilarIndex(k) => {
            let c = nonsingular(n - k, rng);
            let (s, si) = similarity(n, rng);
            &(&s * &CMatrix::block_diag(&c, &jordan_zero(k))) * &si
        }
    }
}

/// Deterministic sample sequence of `spec`. Sample `i` depends only on
/// `(spec.seed, i)`.
pub fn gen(spec: &EnsembleSpec) -> Result<Vec<CMatrix>> {
    spec.validate()?;
    (0..spec.count).map(|i| gen_at(spec, i)).collect()
}

pub fn gen_at(spec: &EnsembleSpec, i: usize) -> Result<CMatrix> {
    let mut rng = sample_rng(spec.seed, i);
    if spec.class != EnsembleClass::CoreEp {
        return Ok(sample(spec.class, spec.size, &mut rng));
    }
    let tol = Tolerance::default();
    for _ in 0..CORE_EP_ATTEMPTS {
        let a = sample(spec.class, spec.size, &mut rng);
        if is_core_ep(&a, &tol)?.holds {
            return Ok(a);
        }
    }
    Err(GenInvError::InvalidSpec(format!(
        "could not draw a core-EP sample of size {} (sample {i})",
        spec.size
    )))
}
