//! Dense 8×8 operator and state kernel for three qubits.
//!
//! Basis states are labelled `|ijk⟩` with index `4i + 2j + k`; qubit 1 is the
//! most significant bit. `σ_z` has eigenvalue `+1` on `|1⟩` and `-1` on `|0⟩`,
//! so the summed dispersive shift of `|111⟩` is `+3χ` and that of `|000⟩` is
//! `-3χ`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{SMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DIM: usize = 8;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `(-1)^(i+j+k)`: `+1` for even, `-1` for odd.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// A computational basis label `|ijk⟩`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel(u8);

impl BasisLabel {
    pub fn new(i: u8, j: u8, k: u8) -> Result<Self> {
        if i > 1 || j > 1 || k > 1 {
            return Err(Error::InvalidBasisBits(i, j, k));
        }
        Ok(Self(4 * i + 2 * j + k))
    }

    pub fn from_index(index: usize) -> Result<Self> {
        if index >= DIM {
            return Err(Error::InvalidBasisIndex(index));
        }
        Ok(Self(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn bits(self) -> [u8; 3] {
        [(self.0 >> 2) & 1, (self.0 >> 1) & 1, self.0 & 1]
    }

    /// Bit of qubit `q` (1-based).
    pub fn bit(self, q: usize) -> Result<u8> {
        check_qubit(q)?;
        Ok(self.bits()[q - 1])
    }

    pub fn parity(self) -> Parity {
        if self.0.count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `σ_z` eigenvalue of qubit `q` (1-based) in this basis state.
    pub fn z(self, q: usize) -> Result<f64> {
        Ok(if self.bit(q)? == 1 { 1.0 } else { -1.0 })
    }

    /// `⟨ijk| Σ_j w_j σ_z^(j) |ijk⟩`.
    pub fn weighted_z(self, weights: &[f64; 3]) -> f64 {
        self.bits().iter().zip(weights).map(|(&b, w)| if b == 1 { *w } else { -*w }).sum()
    }

    pub fn all() -> impl Iterator<Item = BasisLabel> {
        (0..DIM as u8).map(BasisLabel)
    }

    /// Labels of one parity sector, in index order.
    pub fn sector(parity: Parity) -> impl Iterator<Item = BasisLabel> {
        Self::all().filter(move |l| l.parity() == parity)
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [i, j, k] = self.bits();
        write!(f, "{i}{j}{k}")
    }
}

impl fmt::Debug for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}⟩")
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('|').trim_end_matches('⟩').trim_end_matches('>');
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::BadLabel(s.to_string())),
            })
            .collect::<Result<_>>()?;
        match bits.as_slice() {
            [i, j, k] => BasisLabel::new(*i, *j, *k),
            _ => Err(Error::BadLabel(s.to_string())),
        }
    }
}

fn check_qubit(q: usize) -> Result<()> {
    if (1..=3).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidQubit(q))
    }
}

/// Dense 8×8 complex operator, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Operator8(pub [[C64; DIM]; DIM]);

impl Operator8 {
    pub fn zeros() -> Self {
        Self([[ZERO; DIM]; DIM])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..DIM {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn diagonal(d: &[C64; DIM]) -> Self {
        let mut m = Self::zeros();
        for i in 0..DIM {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn real_diagonal(d: &[f64; DIM]) -> Self {
        Self::diagonal(&d.map(C64::from))
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &[C64; DIM], b: &[C64; DIM]) -> Self {
        let mut m = Self::zeros();
        for r in 0..DIM {
            for c in 0..DIM {
                m.0[r][c] = a[r] * b[c].conj();
            }
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for r in 0..DIM {
            for c in 0..DIM {
                m.0[c][r] = self.0[r][c].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..DIM).map(|i| self.0[i][i]).sum()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A†|` over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..DIM {
            for c in r..DIM {
                worst = worst.max((self.0[r][c] - self.0[c][r].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn apply(&self, v: &[C64; DIM]) -> [C64; DIM] {
        let mut out = [ZERO; DIM];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..DIM).map(|c| self.0[r][c] * v[c]).sum();
        }
        out
    }

    /// `⟨v|A|v⟩`
    pub fn sandwich(&self, v: &[C64; DIM]) -> C64 {
        let av = self.apply(v);
        v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= k);
        m
    }

    pub(crate) fn to_nalgebra(self) -> SMatrix<C64, DIM, DIM> {
        SMatrix::from_fn(|r, c| self.0[r][c])
    }
}

impl fmt::Debug for Operator8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator8 [")?;
        for row in &self.0 {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Operator8 {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.0[r][c]
    }
}

impl IndexMut<(usize, usize)> for Operator8 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.0[r][c]
    }
}

impl Add for Operator8 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for Operator8 {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
    }
}

impl Sub for Operator8 {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Operator8 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mul for Operator8 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for r in 0..DIM {
            for k in 0..DIM {
                let a = self.0[r][k];
                if a == ZERO {
                    continue;
                }
                for c in 0..DIM {
                    out.0[r][c] += a * rhs.0[k][c];
                }
            }
        }
        out
    }
}

impl Mul<C64> for Operator8 {
    type Output = Self;
    fn mul(self, k: C64) -> Self {
        self.scale(k)
    }
}

impl Mul<f64> for Operator8 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(C64::from(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliKind {
    Z,
    Minus,
}

/// Single-qubit `σ_z` or `σ_-` on qubit `q` (1-based), identity elsewhere.
pub fn embed_pauli(kind: PauliKind, q: usize) -> Result<Operator8> {
    check_qubit(q)?;
    let mut m = Operator8::zeros();
    for label in BasisLabel::all() {
        let col = label.index();
        let bit = label.bits()[q - 1];
        match kind {
            PauliKind::Z => m.0[col][col] = C64::from(if bit == 1 { 1.0 } else { -1.0 }),
            PauliKind::Minus => {
                if bit == 1 {
                    let row = col & !(1 << (3 - q));
                    m.0[row][col] = ONE;
                }
            }
        }
    }
    Ok(m)
}

/// Projector onto a single basis state.
pub fn basis_projector(label: BasisLabel) -> Operator8 {
    let mut m = Operator8::zeros();
    m.0[label.index()][label.index()] = ONE;
    m
}

/// `(Π_+, Π_-)`, the projectors onto the even and odd sectors.
pub fn parity_projectors() -> (Operator8, Operator8) {
    let even: [f64; DIM] = std::array::from_fn(|i| {
        let l = BasisLabel(i as u8);
        if l.parity() == Parity::Even {
            1.0
        } else {
            0.0
        }
    });
    let odd = even.map(|e| 1.0 - e);
    (Operator8::real_diagonal(&even), Operator8::real_diagonal(&odd))
}

/// Lindblad dissipator `cρc† - ½(c†cρ + ρc†c)`; trace-free for any `c`.
pub fn dissipator(c: &Operator8, rho: &DensityMatrix) -> Operator8 {
    let cd = c.dagger();
    let cdc = cd * *c;
    let r = rho.0;
    *c * r * cd - (cdc * r + r * cdc) * 0.5
}

/// Homodyne back-action `cρ + ρc† - ⟨c + c†⟩ρ`; trace-free whenever `tr ρ = 1`.
pub fn meas_superop(c: &Operator8, rho: &DensityMatrix) -> Operator8 {
    let r = rho.0;
    let cd = c.dagger();
    let expect = (*c * r).trace() + (cd * r).trace();
    *c * r + r * cd - r * expect
}

/// A normalized pure state of the three qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState([C64; DIM]);

impl PureState {
    /// Accepts amplitudes normalized to within `1e-12`.
    pub fn new(amplitudes: [C64; DIM]) -> Result<Self> {
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(amplitudes))
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amplitudes: [C64; DIM]) -> Result<Self> {
        let norm = norm_sqr(&amplitudes);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm });
        }
        let s = 1.0 / norm.sqrt();
        Ok(Self(amplitudes.map(|a| a * s)))
    }

    pub fn basis(label: BasisLabel) -> Self {
        let mut a = [ZERO; DIM];
        a[label.index()] = ONE;
        Self(a)
    }

    /// Uniform superposition of all eight basis states.
    pub fn psi_pre() -> Self {
        Self([C64::from(1.0 / 8f64.sqrt()); DIM])
    }

    /// Uniform superposition over one parity sector.
    pub fn sector_uniform(parity: Parity) -> Self {
        let mut a = [ZERO; DIM];
        for l in BasisLabel::sector(parity) {
            a[l.index()] = C64::from(0.5);
        }
        Self(a)
    }

    pub fn psi_plus() -> Self {
        Self::sector_uniform(Parity::Even)
    }

    pub fn psi_minus() -> Self {
        Self::sector_uniform(Parity::Odd)
    }

    pub fn amplitudes(&self) -> &[C64; DIM] {
        &self.0
    }

    pub fn probabilities(&self) -> [f64; DIM] {
        self.0.map(|a| a.norm_sqr())
    }
}

fn norm_sqr(a: &[C64; DIM]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Three-qubit density matrix. Mutating methods keep it Hermitian; the trace
/// is restored by [`DensityMatrix::renormalize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub(crate) Operator8);

impl DensityMatrix {
    pub fn from_pure(psi: &PureState) -> Self {
        Self(Operator8::outer(&psi.0, &psi.0))
    }

    pub fn maximally_mixed() -> Self {
        Self(Operator8::identity() * (1.0 / DIM as f64))
    }

    /// Checks Hermiticity (`1e-10`) and unit trace (`1e-10`).
    pub fn from_operator(op: Operator8) -> Result<Self> {
        let deviation = op.hermiticity_defect();
        if deviation > 1e-10 {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = op.trace();
        if (tr - ONE).norm() > 1e-10 {
            return Err(Error::NotNormalized { norm: tr.re });
        }
        Ok(Self(op))
    }

    /// No checks; the caller vouches for the invariants.
    pub fn from_operator_unchecked(op: Operator8) -> Self {
        Self(op)
    }

    pub fn as_operator(&self) -> &Operator8 {
        &self.0
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0 .0[r][c]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    pub fn population(&self, label: BasisLabel) -> f64 {
        self.get(label.index(), label.index()).re
    }

    pub fn parity_population(&self, parity: Parity) -> f64 {
        BasisLabel::sector(parity).map(|l| self.population(l)).sum()
    }

    /// `tr(Aρ)`
    pub fn expectation(&self, a: &Operator8) -> C64 {
        (*a * self.0).trace()
    }

    /// `ρ ← (ρ + ρ†)/2`
    pub fn hermitize(&mut self) {
        let m = &mut self.0 .0;
        for r in 0..DIM {
            m[r][r].im = 0.0;
            for c in (r + 1)..DIM {
                let avg = (m[r][c] + m[c][r].conj()) * 0.5;
                m[r][c] = avg;
                m[c][r] = avg.conj();
            }
        }
    }

    /// Divides by the trace and returns the trace that was removed.
    pub fn renormalize(&mut self) -> Result<f64> {
        let tr = self.trace();
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::NotNormalized { norm: tr });
        }
        let s = 1.0 / tr;
        self.0 .0.iter_mut().flatten().for_each(|z| *z *= s);
        Ok(tr)
    }

    pub fn is_finite(&self) -> bool {
        self.0 .0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let mut h = *self;
        h.hermitize();
        SymmetricEigen::new(h.0.to_nalgebra()).eigenvalues.min()
    }

    /// `½ ‖ρ - σ‖₁`
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let mut diff = Self(self.0 - other.0);
        diff.hermitize();
        let eig = SymmetricEigen::new(diff.0.to_nalgebra()).eigenvalues;
        0.5 * eig.iter().map(|e| e.abs()).sum::<f64>()
    }

    /// Weighted sum of states, normalized by the total weight.
    pub fn weighted_mean<'a>(states: impl IntoIterator<Item = (&'a DensityMatrix, f64)>) -> Option<Self> {
        let mut acc = Operator8::zeros();
        let mut total = 0.0;
        for (s, w) in states {
            acc += s.0 * w;
            total += w;
        }
        (total > 0.0).then(|| Self(acc * (1.0 / total)))
    }

    pub fn mean<'a>(states: impl IntoIterator<Item = &'a DensityMatrix>) -> Option<Self> {
        Self::weighted_mean(states.into_iter().map(|s| (s, 1.0)))
    }
}

impl From<PureState> for DensityMatrix {
    fn from(psi: PureState) -> Self {
        Self::from_pure(&psi)
    }
}

/// `tr ρ²`
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = &rho.0 .0;
    let mut acc = 0.0;
    for r in 0..DIM {
        for c in 0..DIM {
            // tr(ρρ) = Σ ρ_rc ρ_cr = Σ |ρ_rc|² for Hermitian ρ
            acc += (m[r][c] * m[c][r]).re;
        }
    }
    acc
}

/// `√⟨ψ|ρ|ψ⟩`, clamped to `[0, 1]`.
pub fn overlap_fidelity(target: &PureState, rho: &DensityMatrix) -> f64 {
    rho.0.sandwich(&target.0).re.clamp(0.0, 1.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn label(s: &str) -> BasisLabel {
        s.parse().unwrap()
    }

    fn ket(s: &str) -> [C64; DIM] {
        *PureState::basis(label(s)).amplitudes()
    }

    #[test]
    fn label_index_bijection() {
        let mut seen = [false; DIM];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let l = BasisLabel::new(i, j, k).unwrap();
                    assert_eq!(l.index(), (4 * i + 2 * j + k) as usize);
                    assert_eq!(l.bits(), [i, j, k]);
                    seen[l.index()] = true;
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert!(BasisLabel::new(2, 0, 0).is_err());
        assert!(BasisLabel::from_index(8).is_err());
    }

    #[test]
    fn even_labels() {
        let even: Vec<String> = BasisLabel::sector(Parity::Even).map(|l| l.to_string()).collect();
        assert_eq!(even, ["000", "011", "101", "110"]);
    }

    #[test]
    fn label_parsing() {
        assert_eq!(label("|101⟩").index(), 5);
        assert_eq!(label("011").index(), 3);
        assert!("0110".parse::<BasisLabel>().is_err());
        assert!("012".parse::<BasisLabel>().is_err());
    }

    #[test]
    fn sigma_z_convention() {
        let z1 = embed_pauli(PauliKind::Z, 1).unwrap();
        assert_eq!(z1.apply(&ket("100")), ket("100"));
        let out = z1.apply(&ket("011"));
        assert_eq!(out[3], C64::from(-1.0));
    }

    #[test]
    fn sigma_minus_lowers() {
        let m2 = embed_pauli(PauliKind::Minus, 2).unwrap();
        assert_eq!(m2.apply(&ket("010")), ket("000"));
        assert_eq!(m2.apply(&ket("101")), [ZERO; DIM]);
    }

    #[test]
    fn invalid_qubit() {
        assert!(matches!(embed_pauli(PauliKind::Z, 0), Err(Error::InvalidQubit(0))));
        assert!(embed_pauli(PauliKind::Minus, 4).is_err());
    }

    #[test]
    fn summed_shift_of_111() {
        let chi = 0.7;
        let total = (1..=3).map(|q| embed_pauli(PauliKind::Z, q).unwrap() * chi).fold(Operator8::zeros(), |a, b| a + b);
        let v = total.sandwich(&ket("111"));
        assert_abs_diff_eq!(v.re, 3.0 * chi, epsilon = 1e-15);
    }

    #[test]
    fn z_sum_spectrum() {
        let total = (1..=3).map(|q| embed_pauli(PauliKind::Z, q).unwrap()).fold(Operator8::zeros(), |a, b| a + b);
        let mut counts = std::collections::BTreeMap::new();
        for i in 0..DIM {
            *counts.entry(total[(i, i)].re as i32).or_insert(0) += 1;
        }
        assert_eq!(counts, [(-3, 1), (-1, 3), (1, 3), (3, 1)].into_iter().collect());
        for a in 1..=3 {
            for b in 1..=3 {
                let za = embed_pauli(PauliKind::Z, a).unwrap();
                let zb = embed_pauli(PauliKind::Z, b).unwrap();
                assert_eq!(za.commutator(&zb).max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn dissipator_of_zero_is_zero() {
        let rho = DensityMatrix::from_pure(&PureState::psi_pre());
        assert_eq!(dissipator(&Operator8::zeros(), &rho).max_abs(), 0.0);
    }

    #[test]
    fn dissipator_decay_oracle() {
        // Direct evaluation: σ|100⟩⟨100|σ† = |000⟩⟨000|, σ†σ|100⟩⟨100| = |100⟩⟨100|.
        let c = embed_pauli(PauliKind::Minus, 1).unwrap();
        let rho = DensityMatrix::from_pure(&PureState::basis(label("100")));
        let got = dissipator(&c, &rho);
        let mut want = Operator8::zeros();
        want[(0, 0)] = ONE;
        want[(4, 4)] = -ONE;
        assert_abs_diff_eq!((got - want).max_abs(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn meas_superop_identity_vanishes() {
        let rho = DensityMatrix::from_pure(&PureState::psi_pre());
        let c = Operator8::identity() * C64::new(0.3, -1.2);
        assert!(meas_superop(&c, &rho).max_abs() < 1e-15);
    }

    #[test]
    fn meas_superop_parity_on_psi_pre() {
        // With c = Π_+ - Π_- and ⟨c⟩ = 0 on ψ_pre, the increment is
        // ρ_μν (s_μ + s_ν) = ±2/8 on same-parity entries and 0 across sectors.
        let (pp, pm) = parity_projectors();
        let c = pp - pm;
        let rho = DensityMatrix::from_pure(&PureState::psi_pre());
        let inc = meas_superop(&c, &rho);
        for a in BasisLabel::all() {
            for b in BasisLabel::all() {
                let want = if a.parity() != b.parity() { 0.0 } else { a.parity().sign() * 0.25 };
                assert_abs_diff_eq!(inc[(a.index(), b.index())].re, want, epsilon = 1e-15);
                assert_abs_diff_eq!(inc[(a.index(), b.index())].im, 0.0, epsilon = 1e-15);
            }
        }
        assert_abs_diff_eq!(inc.trace().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn fidelity_cases() {
        let psi = PureState::psi_plus();
        let rho = DensityMatrix::from_pure(&psi);
        assert_abs_diff_eq!(overlap_fidelity(&psi, &rho), 1.0, epsilon = 1e-14);
        let odd = DensityMatrix::from_pure(&PureState::psi_minus());
        assert_eq!(overlap_fidelity(&psi, &odd), 0.0);
        let (pp, _) = parity_projectors();
        let mixed_even = DensityMatrix::from_operator(pp * 0.25).unwrap();
        assert_abs_diff_eq!(overlap_fidelity(&psi, &mixed_even), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn purity_cases() {
        assert_abs_diff_eq!(purity(&DensityMatrix::from_pure(&PureState::psi_pre())), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(purity(&DensityMatrix::maximally_mixed()), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn projector_algebra() {
        let (pp, pm) = parity_projectors();
        assert_eq!((pp * pm).max_abs(), 0.0);
        assert_eq!((pp + pm - Operator8::identity()).max_abs(), 0.0);
        assert_eq!((pp * pp - pp).max_abs(), 0.0);
        assert_abs_diff_eq!(pp.trace().re, 4.0);
        assert_abs_diff_eq!(pm.trace().re, 4.0);
        assert!(pp.is_hermitian(0.0) && pm.is_hermitian(0.0));
    }

    #[test]
    fn pure_state_validation() {
        assert!(PureState::new([C64::from(1.0); DIM]).is_err());
        assert!(PureState::normalized([ZERO; DIM]).is_err());
        let p = PureState::normalized([C64::from(2.0); DIM]).unwrap();
        assert_eq!(p, PureState::psi_pre());
    }

    #[test]
    fn trace_distance_and_eigen() {
        let a = DensityMatrix::from_pure(&PureState::psi_plus());
        let b = DensityMatrix::from_pure(&PureState::psi_minus());
        assert_abs_diff_eq!(a.trace_distance(&b), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.trace_distance(&a), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.min_eigenvalue(), 0.0, epsilon = 1e-12);
    }
}
