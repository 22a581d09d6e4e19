//! Finite commutative rings of the form `R_1 × … × R_m` with each `R_i` local.
//!
//! Two kinds of local factor are supported: residue rings `Z_{p^k}` and
//! Galois fields `GF(p^k)` given by a monic irreducible polynomial. Every
//! coordinate of a [`RingElement`] is stored as an integer in `[0, |R_i|)`;
//! for Galois fields that integer packs the coefficient vector in base `p`
//! (constant term in the lowest digit).
//!
//! A third, non-local pseudo-factor exists only for `Z_n` with `n` even. It
//! is produced by [`RingSpec::zn_even`] and rejected by every construction
//! that needs the odd-order hypothesis.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;
use thiserror::Error;

/// Largest Galois field order accepted.
pub const MAX_FIELD_ORDER: u32 = 343;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("local factors must have odd characteristic, got p = {0}")]
    EvenCharacteristic(u64),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("ring order {0} is even; only zn:<even> is supported for even orders")]
    EvenOrder(u64),
    #[error("ring order {0} is odd; the even constructor needs an even n")]
    OddOrder(u64),
    #[error("n must be at least {min}, got {n}")]
    TooSmall { n: u64, min: u64 },
    #[error("ring order overflows: {0}")]
    Overflow(String),
    #[error("GF({p}^{k}) exceeds the supported field order {MAX_FIELD_ORDER}")]
    FieldTooLarge { p: u32, k: u32 },
    #[error("polynomial {0:?} is not monic of the stated degree")]
    NotMonic(Vec<u32>),
    #[error("polynomial {0:?} is reducible over the prime field")]
    Reducible(Vec<u32>),
    #[error("coefficient {coef} out of range for p = {p}")]
    Coefficient { coef: u32, p: u32 },
    #[error("element has {got} coordinates, ring has {expected} factors")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {value} out of range for factor of size {size}")]
    CoordinateRange { value: u32, size: u32 },
    #[error("the pseudo-factor Z_{0} is not a local ring")]
    NotLocal(u32),
    #[error("malformed ring descriptor {0:?}: {1}")]
    Descriptor(String, String),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .map(|(p, k)| (p - 1) * p.pow(k - 1))
        .product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactorKind {
    PrimePowerResidue,
    GaloisField,
    /// `Z_n` for even `n`; not local, only reachable through [`RingSpec::zn_even`].
    EvenCyclic,
}

/// Addition, negation and multiplicative structure of a small Galois field.
#[derive(Debug)]
struct FieldTables {
    order: u32,
    add: Vec<u16>,
    neg: Vec<u16>,
    /// `exp[i] = g^i` for a fixed generator `g`, `i` in `0..order-1`.
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl FieldTables {
    fn build(p: u32, k: u32, poly: &[u32]) -> Self {
        let order = p.pow(k);
        let digits = |x: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(k as usize);
            let mut x = x;
            for _ in 0..k {
                v.push(x % p);
                x /= p;
            }
            v
        };
        let pack = |d: &[u32]| -> u32 { d.iter().rev().fold(0, |acc, &c| acc * p + c) };

        let q = order as usize;
        let mut add = vec![0u16; q * q];
        let mut neg = vec![0u16; q];
        for a in 0..order {
            let da = digits(a);
            let dn: Vec<u32> = da.iter().map(|&c| (p - c) % p).collect();
            neg[a as usize] = pack(&dn) as u16;
            for b in 0..order {
                let db = digits(b);
                let ds: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                add[a as usize * q + b as usize] = pack(&ds) as u16;
            }
        }

        let mul = |a: u32, b: u32| -> u32 {
            let (da, db) = (digits(a), digits(b));
            let mut prod = vec![0u32; 2 * k as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            // reduce by the monic modulus, highest degree first
            for deg in (k as usize..2 * k as usize).rev() {
                let c = prod[deg];
                if c != 0 {
                    for (t, &pc) in poly.iter().enumerate().take(k as usize) {
                        let idx = deg - k as usize + t;
                        prod[idx] = (prod[idx] + (p - c) * pc) % p;
                    }
                    prod[deg] = 0;
                }
            }
            pack(&prod[..k as usize])
        };

        let mut exp = Vec::new();
        for g in 2..order {
            exp.clear();
            let mut x = 1;
            loop {
                exp.push(x as u16);
                x = mul(x, g);
                if x == 1 {
                    break;
                }
            }
            if exp.len() == q - 1 {
                break;
            }
        }
        assert_eq!(exp.len(), q - 1, "multiplicative group of a field is cyclic");
        let mut log = vec![0u16; q];
        for (i, &e) in exp.iter().enumerate() {
            log[e as usize] = i as u16;
        }
        FieldTables {
            order,
            add,
            neg,
            exp,
            log,
        }
    }
}

fn poly_rem(mut num: Vec<u32>, den: &[u32], p: u32) -> Vec<u32> {
    // den is monic
    let dd = den.len() - 1;
    while num.len() > dd {
        let c = *num.last().unwrap();
        let shift = num.len() - 1 - dd;
        if c != 0 {
            for (i, &d) in den.iter().enumerate() {
                num[shift + i] = (num[shift + i] + (p - c) * d % p) % p;
            }
        }
        num.pop();
    }
    num
}

/// Exhaustive irreducibility test: no monic factor of degree `1..=k/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let k = poly.len() - 1;
    for deg in 1..=k / 2 {
        let count = (p as u64).pow(deg as u32);
        for low in 0..count {
            let mut cand = Vec::with_capacity(deg + 1);
            let mut x = low;
            for _ in 0..deg {
                cand.push((x % p as u64) as u32);
                x /= p as u64;
            }
            cand.push(1);
            if poly_rem(poly.to_vec(), &cand, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// First monic irreducible polynomial of degree `k` over `F_p`, lower
/// coefficients enumerated as a base-`p` counter (constant term fastest).
pub fn default_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = p.pow(k);
    for low in 0..count {
        let mut poly = Vec::with_capacity(k as usize + 1);
        let mut x = low;
        for _ in 0..k {
            poly.push(x % p);
            x /= p;
        }
        poly.push(1);
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

/// One local factor `R_i` (or the even pseudo-factor).
#[derive(Debug, Clone)]
pub struct LocalFactor {
    kind: FactorKind,
    p: u32,
    k: u32,
    size: u32,
    poly: Vec<u32>,
    field: Option<Arc<FieldTables>>,
}

impl PartialEq for LocalFactor {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.p == other.p && self.k == other.k && self.poly == other.poly
    }
}

impl Eq for LocalFactor {}

impl LocalFactor {
    /// `Z_{p^k}`.
    pub fn prime_power(p: u32, k: u32) -> Result<Self, RingError> {
        if !is_prime(p as u64) {
            return Err(RingError::NotPrime(p as u64));
        }
        if p == 2 {
            return Err(RingError::EvenCharacteristic(2));
        }
        if k == 0 {
            return Err(RingError::ZeroExponent);
        }
        let size = (p as u64)
            .checked_pow(k)
            .filter(|&s| s <= u32::MAX as u64)
            .ok_or_else(|| RingError::Overflow(format!("{p}^{k}")))? as u32;
        Ok(LocalFactor {
            kind: FactorKind::PrimePowerResidue,
            p,
            k,
            size,
            poly: Vec::new(),
            field: None,
        })
    }

    /// `GF(p^k)` with the default irreducible polynomial.
    pub fn galois_field(p: u32, k: u32) -> Result<Self, RingError> {
        Self::check_field_params(p, k)?;
        Self::galois_field_with(p, k, default_irreducible(p, k))
    }

    /// `GF(p^k) = F_p[x]/(poly)`, coefficients low-to-high including the leading 1.
    pub fn galois_field_with(p: u32, k: u32, poly: Vec<u32>) -> Result<Self, RingError> {
        Self::check_field_params(p, k)?;
        if poly.len() != k as usize + 1 || poly.last() != Some(&1) {
            return Err(RingError::NotMonic(poly));
        }
        if let Some(&coef) = poly.iter().find(|&&c| c >= p) {
            return Err(RingError::Coefficient { coef, p });
        }
        if !is_irreducible(&poly, p) {
            return Err(RingError::Reducible(poly));
        }
        let field = Arc::new(FieldTables::build(p, k, &poly));
        Ok(LocalFactor {
            kind: FactorKind::GaloisField,
            p,
            k,
            size: field.order,
            poly,
            field: Some(field),
        })
    }

    fn check_field_params(p: u32, k: u32) -> Result<(), RingError> {
        if !is_prime(p as u64) {
            return Err(RingError::NotPrime(p as u64));
        }
        if p == 2 {
            return Err(RingError::EvenCharacteristic(2));
        }
        if k == 0 {
            return Err(RingError::ZeroExponent);
        }
        match (p as u64).checked_pow(k) {
            Some(q) if q <= MAX_FIELD_ORDER as u64 => Ok(()),
            _ => Err(RingError::FieldTooLarge { p, k }),
        }
    }

    fn even_cyclic(n: u32) -> Self {
        LocalFactor {
            kind: FactorKind::EvenCyclic,
            p: 2,
            k: 1,
            size: n,
            poly: Vec::new(),
            field: None,
        }
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.k
    }

    pub fn polynomial(&self) -> &[u32] {
        &self.poly
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn is_local(&self) -> bool {
        self.kind != FactorKind::EvenCyclic
    }

    /// `|M_i|`.
    pub fn maximal_ideal_size(&self) -> Result<u32, RingError> {
        match self.kind {
            FactorKind::PrimePowerResidue => Ok(self.size / self.p),
            FactorKind::GaloisField => Ok(1),
            FactorKind::EvenCyclic => Err(RingError::NotLocal(self.size)),
        }
    }

    /// `q_i = |R_i / M_i|`.
    pub fn residue_field_size(&self) -> Result<u32, RingError> {
        match self.kind {
            FactorKind::PrimePowerResidue => Ok(self.p),
            FactorKind::GaloisField => Ok(self.size),
            FactorKind::EvenCyclic => Err(RingError::NotLocal(self.size)),
        }
    }

    pub fn unit_count(&self) -> u64 {
        match self.kind {
            FactorKind::EvenCyclic => euler_phi(self.size as u64),
            _ => (self.size - self.maximal_ideal_size().unwrap()) as u64,
        }
    }

    pub fn zero(&self) -> u32 {
        0
    }

    /// Multiplicative identity; packs to 1 for fields as well.
    pub fn one(&self) -> u32 {
        1 % self.size
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.field {
            Some(f) => f.add[a as usize * f.order as usize + b as usize] as u32,
            None => ((a as u64 + b as u64) % self.size as u64) as u32,
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        match &self.field {
            Some(f) => f.neg[a as usize] as u32,
            None => (self.size - a) % self.size,
        }
    }

    pub fn is_unit(&self, a: u32) -> bool {
        match self.kind {
            FactorKind::PrimePowerResidue => a % self.p != 0,
            FactorKind::GaloisField => a != 0,
            FactorKind::EvenCyclic => a.gcd(&self.size) == 1,
        }
    }

    /// Whether `a + b` is a unit, without materializing the sum.
    #[inline]
    pub fn sum_is_unit(&self, a: u32, b: u32) -> bool {
        match &self.field {
            Some(f) => f.neg[b as usize] as u32 != a,
            None => self.is_unit(((a as u64 + b as u64) % self.size as u64) as u32),
        }
    }

    /// The quotient map `R_i → R_i/M_i`.
    pub fn quotient_residue(&self, a: u32) -> Result<u32, RingError> {
        match self.kind {
            FactorKind::PrimePowerResidue => Ok(a % self.p),
            FactorKind::GaloisField => Ok(a),
            FactorKind::EvenCyclic => Err(RingError::NotLocal(self.size)),
        }
    }

    /// Elements of the residue field in a fixed enumeration order: `1, 2, …`
    /// for `Z_p`, generator powers `g^0, g^1, …` for a Galois field. Zero is
    /// excluded.
    pub fn residue_field_units_ordered(&self) -> Result<Vec<u32>, RingError> {
        match (&self.kind, &self.field) {
            (FactorKind::PrimePowerResidue, _) => Ok((1..self.p).collect()),
            (FactorKind::GaloisField, Some(f)) => Ok(f.exp.iter().map(|&x| x as u32).collect()),
            _ => Err(RingError::NotLocal(self.size)),
        }
    }

    /// Field product, only for Galois-field factors.
    pub fn field_mul(&self, a: u32, b: u32) -> Option<u32> {
        let f = self.field.as_ref()?;
        if a == 0 || b == 0 {
            return Some(0);
        }
        let e = (f.log[a as usize] as usize + f.log[b as usize] as usize) % (f.order as usize - 1);
        Some(f.exp[e] as u32)
    }

    /// Coefficients (low to high) of a packed Galois-field element.
    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        let mut x = a;
        (0..self.k)
            .map(|_| {
                let c = x % self.p;
                x /= self.p;
                c
            })
            .collect()
    }

    fn order_key(&self) -> (u32, FactorKind, &[u32]) {
        (self.size, self.kind, &self.poly)
    }
}

impl fmt::Display for LocalFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FactorKind::PrimePowerResidue if self.k == 1 => write!(f, "{}", self.p),
            FactorKind::PrimePowerResidue => write!(f, "{}^{}", self.p, self.k),
            FactorKind::GaloisField => {
                let coefs: Vec<String> = self.poly.iter().map(u32::to_string).collect();
                write!(f, "gf({},{};{})", self.p, self.k, coefs.join(","))
            }
            FactorKind::EvenCyclic => write!(f, "Z{}", self.size),
        }
    }
}

/// A vertex of `U(R)`: one canonical residue per factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement(Vec<u32>);

impl RingElement {
    pub fn new(coords: Vec<u32>) -> Self {
        RingElement(coords)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Indexing {
    /// Last factor varies fastest.
    MixedRadix,
    /// Vertex `i` is the CRT image of the integer `i` (rings built from `zn:<n>`).
    Crt { n: u64, idempotents: Vec<u64> },
}

/// The ring `R = R_1 × … × R_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSpec {
    factors: Vec<LocalFactor>,
    order: u64,
    indexing: Indexing,
}

impl RingSpec {
    /// Product of local factors, reordered by ascending size (ties: kind, then polynomial).
    pub fn product(mut factors: Vec<LocalFactor>) -> Result<Self, RingError> {
        if factors.is_empty() {
            return Err(RingError::Descriptor(String::new(), "no factors".into()));
        }
        if let Some(f) = factors.iter().find(|f| !f.is_local()) {
            return Err(RingError::EvenOrder(f.size as u64));
        }
        factors.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        let order = Self::checked_order(&factors)?;
        Ok(RingSpec {
            factors,
            order,
            indexing: Indexing::MixedRadix,
        })
    }

    /// `Z_n ≅ Z_{p_1^{k_1}} × … × Z_{p_m^{k_m}}` for odd `n ≥ 3`, factors in
    /// ascending prime order, vertices indexed by the integers `0..n`.
    pub fn zn(n: u64) -> Result<Self, RingError> {
        if n < 3 {
            return Err(RingError::TooSmall { n, min: 3 });
        }
        if n % 2 == 0 {
            return Err(RingError::EvenOrder(n));
        }
        if n > u32::MAX as u64 {
            return Err(RingError::Overflow(n.to_string()));
        }
        let factors: Vec<LocalFactor> = factorize(n)
            .into_iter()
            .map(|(p, k)| LocalFactor::prime_power(p as u32, k))
            .collect::<Result<_, _>>()?;
        let idempotents = factors
            .iter()
            .map(|f| {
                let m = f.size as i64;
                let rest = n as i64 / m;
                // rest * inv(rest mod m) ≡ 1 (mod m), ≡ 0 (mod rest)
                let inv = rest.extended_gcd(&m).x.rem_euclid(m);
                ((rest as i128 * inv as i128) % n as i128) as u64
            })
            .collect();
        Ok(RingSpec {
            factors,
            order: n,
            indexing: Indexing::Crt { n, idempotents },
        })
    }

    /// `Z_n` for even `n ≥ 2` as a single non-local pseudo-factor.
    pub fn zn_even(n: u64) -> Result<Self, RingError> {
        if n < 2 {
            return Err(RingError::TooSmall { n, min: 2 });
        }
        if n % 2 == 1 {
            return Err(RingError::OddOrder(n));
        }
        if n > u32::MAX as u64 {
            return Err(RingError::Overflow(n.to_string()));
        }
        Ok(RingSpec {
            factors: vec![LocalFactor::even_cyclic(n as u32)],
            order: n,
            indexing: Indexing::MixedRadix,
        })
    }

    /// `zn:<n>` dispatching on parity.
    pub fn integers_mod(n: u64) -> Result<Self, RingError> {
        if n % 2 == 0 {
            Self::zn_even(n)
        } else {
            Self::zn(n)
        }
    }

    fn checked_order(factors: &[LocalFactor]) -> Result<u64, RingError> {
        factors
            .iter()
            .try_fold(1u64, |acc, f| acc.checked_mul(f.size as u64))
            .filter(|&n| n <= u32::MAX as u64)
            .ok_or_else(|| RingError::Overflow("product of factor sizes".into()))
    }

    pub fn factors(&self) -> &[LocalFactor] {
        &self.factors
    }

    /// Number of local factors `m`.
    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_odd_order(&self) -> bool {
        self.order % 2 == 1
    }

    /// Whether this ring came from `zn:<n>` (odd or even).
    pub fn is_zn(&self) -> bool {
        matches!(self.indexing, Indexing::Crt { .. })
            || self.factors[0].kind == FactorKind::EvenCyclic
    }

    /// `|R^*| = ∏ (|R_i| − |M_i|)`.
    pub fn unit_count(&self) -> u64 {
        self.factors.iter().map(LocalFactor::unit_count).product()
    }

    pub fn zero(&self) -> RingElement {
        RingElement(vec![0; self.m()])
    }

    pub fn one(&self) -> RingElement {
        RingElement(self.factors.iter().map(LocalFactor::one).collect())
    }

    pub fn check(&self, x: &RingElement) -> Result<(), RingError> {
        if x.0.len() != self.m() {
            return Err(RingError::DimensionMismatch {
                expected: self.m(),
                got: x.0.len(),
            });
        }
        for (&v, f) in x.0.iter().zip(&self.factors) {
            if v >= f.size {
                return Err(RingError::CoordinateRange {
                    value: v,
                    size: f.size,
                });
            }
        }
        Ok(())
    }

    pub fn add(&self, x: &RingElement, y: &RingElement) -> Result<RingElement, RingError> {
        self.check(x)?;
        self.check(y)?;
        Ok(RingElement(
            self.factors
                .iter()
                .zip(x.0.iter().zip(&y.0))
                .map(|(f, (&a, &b))| f.add(a, b))
                .collect(),
        ))
    }

    pub fn neg(&self, x: &RingElement) -> Result<RingElement, RingError> {
        self.check(x)?;
        Ok(RingElement(
            self.factors
                .iter()
                .zip(&x.0)
                .map(|(f, &a)| f.neg(a))
                .collect(),
        ))
    }

    /// Unit iff no coordinate lies in its factor's maximal ideal.
    pub fn is_unit(&self, x: &RingElement) -> bool {
        x.0.len() == self.m() && self.factors.iter().zip(&x.0).all(|(f, &a)| f.is_unit(a))
    }

    /// Vertex `index` in the fixed enumeration order.
    pub fn element(&self, index: usize) -> RingElement {
        debug_assert!((index as u64) < self.order);
        match &self.indexing {
            Indexing::Crt { .. } => RingElement(
                self.factors
                    .iter()
                    .map(|f| (index as u64 % f.size as u64) as u32)
                    .collect(),
            ),
            Indexing::MixedRadix => {
                let mut rest = index as u64;
                let mut coords = vec![0; self.m()];
                for (c, f) in coords.iter_mut().zip(&self.factors).rev() {
                    *c = (rest % f.size as u64) as u32;
                    rest /= f.size as u64;
                }
                RingElement(coords)
            }
        }
    }

    /// Inverse of [`RingSpec::element`].
    pub fn index_of(&self, x: &RingElement) -> Result<usize, RingError> {
        self.check(x)?;
        Ok(match &self.indexing {
            Indexing::Crt { n, idempotents } => {
                let sum: u128 = x
                    .0
                    .iter()
                    .zip(idempotents)
                    .map(|(&a, &e)| a as u128 * e as u128)
                    .sum();
                (sum % *n as u128) as usize
            }
            Indexing::MixedRadix => x
                .0
                .iter()
                .zip(&self.factors)
                .fold(0u64, |acc, (&a, f)| acc * f.size as u64 + a as u64)
                as usize,
        })
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElement> + '_ {
        (0..self.order as usize).map(move |i| self.element(i))
    }

    /// Canonical text descriptor, parseable by [`FromStr`].
    pub fn descriptor(&self) -> String {
        if self.is_zn() {
            return format!("zn:{}", self.order);
        }
        let parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        format!("prod:{}", parts.join(","))
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// Quotient map for a single factor.
pub fn quotient_residue(factor: &LocalFactor, x: u32) -> Result<u32, RingError> {
    factor.quotient_residue(x)
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_factor(token: &str, whole: &str) -> Result<LocalFactor, RingError> {
    let bad = |msg: &str| RingError::Descriptor(whole.to_string(), msg.to_string());
    let num = |s: &str| -> Result<u32, RingError> {
        s.trim()
            .parse::<u32>()
            .map_err(|_| bad(&format!("expected integer, found {s:?}")))
    };
    let token = token.trim();
    if let Some(inner) = token.strip_prefix("gf(").and_then(|t| t.strip_suffix(')')) {
        let (head, poly) = match inner.split_once(';') {
            Some((h, p)) => (h, Some(p)),
            None => (inner, None),
        };
        let (p, k) = head
            .split_once(',')
            .ok_or_else(|| bad("gf factor needs gf(p,k)"))?;
        let (p, k) = (num(p)?, num(k)?);
        match poly {
            None => LocalFactor::galois_field(p, k),
            Some(coefs) => {
                let poly = coefs.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
                LocalFactor::galois_field_with(p, k, poly)
            }
        }
    } else if let Some((p, k)) = token.split_once('^') {
        LocalFactor::prime_power(num(p)?, num(k)?)
    } else {
        LocalFactor::prime_power(num(token)?, 1)
    }
}

impl FromStr for RingSpec {
    type Err = RingError;

    /// `zn:<n>` or `prod:<factor>,<factor>,…` where a factor is `p`, `p^k`,
    /// `gf(p,k)` or `gf(p,k;c_0,…,c_k)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(n) = s.strip_prefix("zn:") {
            let n: u64 = n
                .trim()
                .parse()
                .map_err(|_| RingError::Descriptor(s.into(), "expected zn:<n>".into()))?;
            return RingSpec::integers_mod(n);
        }
        if let Some(body) = s.strip_prefix("prod:") {
            let factors = split_top_level(body)
                .into_iter()
                .map(|t| parse_factor(t, s))
                .collect::<Result<Vec<_>, _>>()?;
            return RingSpec::product(factors);
        }
        Err(RingError::Descriptor(
            s.into(),
            "expected zn:<n> or prod:<factors>".into(),
        ))
    }
}

impl PartialOrd for LocalFactor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LocalFactor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}
