use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pointer::{FieldSample, PointerTable, SystemParams};
use crate::qubit::{BasisLabel, DensityMatrix, Operator8, DIM};

pub(crate) type Mat8 = [[C64; DIM]; DIM];

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Field-dependent part of the effective qubit generator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldDephasing {
    /// `D[Π_Σ]ρ − i[ε Re Π_Σ, ρ]`: measurement-induced dephasing at
    /// `½|Σ_μ − Σ_ν|²` plus the drive-dependent phase between labels.
    #[default]
    Polaron,
    /// Shift-weighted field products within each mode plus the cross-mode
    /// terms acting only between labels that differ in all three bits.
    Printed,
}

/// Precomputed, time-independent pieces of the generator.
///
/// The action on `ρ` is elementwise apart from the `σ_-` jump terms:
/// `L[ρ]_μν = (K_μν + Λ_μν(t)) ρ_μν + Σ_q γ_q ρ_{μ+q, ν+q}`, with
/// `K_μν = d_μ + d_ν* + J_μν`.
#[derive(Debug, Clone)]
pub struct Generator {
    /// `−i h_μ − ½ Σ_k (L_k†L_k)_μμ` for the frame rotation and qubit noise.
    diag: [C64; DIM],
    /// Elementwise pure-dephasing jump term `Σ_q (γ_φq/2) z_q(μ) z_q(ν)`.
    dephase_jump: Mat8,
    relax: [f64; 3],
    model: FieldDephasing,
    shift_a: [f64; DIM],
    shift_b: [f64; DIM],
    cross: f64,
}

/// Bit of qubit `q` (0-based, qubit 1 is the most significant).
fn mask(q: usize) -> usize {
    4 >> q
}

impl Generator {
    pub fn new(params: &SystemParams, model: FieldDephasing) -> Self {
        let labels: [BasisLabel; DIM] = std::array::from_fn(|l| BasisLabel::from_index(l).expect("index < 8"));
        let relax: [f64; 3] = std::array::from_fn(|q| params.relaxation_rate(q));
        let zs: [[f64; 3]; DIM] = labels.map(|l| [0, 1, 2].map(|q| l.z(q + 1).expect("valid qubit")));
        let excited = |m: usize, q: usize| if m & mask(q) != 0 { 1.0 } else { 0.0 };
        let diag = std::array::from_fn(|m| {
            let h: f64 = (0..3).map(|q| 0.5 * params.omega_frame[q] * zs[m][q]).sum();
            let loss: f64 = (0..3).map(|q| relax[q] * excited(m, q) + 0.5 * params.gamma_phi[q]).sum();
            C64::new(-0.5 * loss, -h)
        });
        let dephase_jump = std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                C64::from((0..3).map(|q| 0.5 * params.gamma_phi[q] * zs[m][q] * zs[n][q]).sum::<f64>())
            })
        });
        Self {
            diag,
            dephase_jump,
            relax,
            model,
            shift_a: labels.map(|l| params.shift_a(l)),
            shift_b: labels.map(|l| params.shift_b(l)),
            cross: (params.kappa_a * params.kappa_b).sqrt() / 2.0,
        }
    }

    pub fn model(&self) -> FieldDephasing {
        self.model
    }

    pub(crate) fn diag(&self) -> &[C64; DIM] {
        &self.diag
    }

    pub(crate) fn dephase_jump(&self) -> &Mat8 {
        &self.dephase_jump
    }

    /// Field-dependent coefficient `Λ(t)`.
    pub fn field_terms(&self, fields: &FieldSample) -> Mat8 {
        let mut out = [[C64::default(); DIM]; DIM];
        match self.model {
            FieldDephasing::Polaron => {
                let s = fields.sigma();
                let eps = fields.drive;
                for m in 0..DIM {
                    for n in 0..DIM {
                        out[m][n] = s[m] * s[n].conj()
                            - 0.5 * (s[m].norm_sqr() + s[n].norm_sqr())
                            - I * eps * (s[m].re - s[n].re);
                    }
                }
            }
            FieldDephasing::Printed => {
                let (a, b) = (&fields.alpha, &fields.beta);
                let re_ab: [f64; DIM] = std::array::from_fn(|m| (a[m].conj() * b[m]).re);
                for m in 0..DIM {
                    for n in 0..DIM {
                        let mut l = -I
                            * ((self.shift_a[m] - self.shift_a[n]) * a[m] * a[n].conj()
                                + (self.shift_b[m] - self.shift_b[n]) * b[m] * b[n].conj());
                        if m ^ n == DIM - 1 {
                            l += self.cross * (a[m] * b[n].conj() + b[m] * a[n].conj() - re_ab[m] - re_ab[n]);
                        }
                        out[m][n] = l;
                    }
                }
            }
        }
        out
    }

    /// Elementwise coefficient `K + Λ(t)`.
    pub fn coefficients(&self, fields: &FieldSample) -> Mat8 {
        let mut out = self.field_terms(fields);
        for m in 0..DIM {
            for n in 0..DIM {
                out[m][n] += self.diag[m] + self.diag[n].conj() + self.dephase_jump[m][n];
            }
        }
        out
    }

    /// Adds `dt · Σ_q γ_q σ_-^(q) ρ σ_+^(q)` to `out`.
    #[inline]
    pub(crate) fn add_jumps(&self, rho: &Mat8, dt: f64, out: &mut Mat8) {
        for q in 0..3 {
            let g = self.relax[q] * dt;
            if g == 0.0 {
                continue;
            }
            let b = mask(q);
            for m in (0..DIM).filter(|m| m & b == 0) {
                for n in (0..DIM).filter(|n| n & b == 0) {
                    out[m][n] += rho[m | b][n | b] * g;
                }
            }
        }
    }

    /// As [`Self::add_jumps`] but only for `μ ≤ ν`.
    #[inline]
    pub(crate) fn add_jumps_upper(&self, rho: &Mat8, dt: f64, out: &mut Mat8) {
        for q in 0..3 {
            let g = self.relax[q] * dt;
            if g == 0.0 {
                continue;
            }
            let b = mask(q);
            for m in (0..DIM).filter(|m| m & b == 0) {
                for n in (m..DIM).filter(|n| n & b == 0) {
                    out[m][n] += rho[m | b][n | b] * g;
                }
            }
        }
    }

    /// `L[ρ]` with the given fields.
    pub fn apply(&self, rho: &Mat8, fields: &FieldSample) -> Mat8 {
        let k = self.coefficients(fields);
        let mut out = [[C64::default(); DIM]; DIM];
        for m in 0..DIM {
            for n in 0..DIM {
                out[m][n] = k[m][n] * rho[m][n];
            }
        }
        self.add_jumps(rho, 1.0, &mut out);
        out
    }
}

/// Deterministic part of the effective master equation at grid time `t`.
pub fn deterministic_generator(
    rho: &DensityMatrix,
    t: f64,
    table: &PointerTable,
    params: &SystemParams,
    model: FieldDephasing,
) -> Result<Operator8> {
    let n = table.index_of(t)?;
    let g = Generator::new(params, model);
    Ok(Operator8(g.apply(&rho.as_operator().0, &table.at(n))))
}
