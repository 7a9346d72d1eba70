//! The graded dimensions of `C*(PL)` through degree 11 and its module
//! structure over `A(2)`.
//!
//! Dimensions are assembled as `𝒱 ⊗ H(𝒦)` with `𝒱 = V⁽¹⁾ ⊗ Γ(T)`, where
//! `Γ(T) = H(𝒦₁) // E(R[2])` is computed by exact series division. The
//! `V⁽¹⁾` factor is the tensor algebra on the suspension of
//! `K[3] ⊕ R⟨4⟩`, whose `K[3]` part is known only through zero ranges.

use serde::{Deserialize, Serialize};

use crate::graded::{
    ext_alg_dims, k1_factors, k_factors, poly_dims, product_em_dims, series_quotient, tensor_dims,
    Generator, GeneratorSet, GradedDims, InconsistencyReport,
};
use crate::module::{FPModule, ModuleError};

/// Highest degree the bookkeeping supports.
pub const CPL_MAX_DEGREE: u32 = 11;

const CPL_MODULE_TOML: &str = include_str!("../data/cpl_module.toml");
const V1_BOUNDS_TOML: &str = include_str!("../data/v1_bounds.toml");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CplError {
    #[error("degree {0} is beyond the supported range 0..={CPL_MAX_DEGREE}")]
    UnsupportedRange(u32),
    #[error("no recorded bound for {factor} in degree {degree}")]
    MissingBound { factor: String, degree: u32 },
    #[error(transparent)]
    Inconsistent(#[from] InconsistencyReport),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// `ξ_{ik}` for `1 <= i <= k`, of degree `2^{k-i}(2^i - 1)`.
pub fn rk_generator_degrees(k: u32) -> GeneratorSet {
    assert!(k >= 1, "R[k] needs k >= 1");
    GeneratorSet(
        (1..=k)
            .map(|i| Generator {
                degree: (1 << (k - i)) * ((1 << i) - 1),
                label: format!("ξ{i}{k}"),
            })
            .collect(),
    )
}

/// Dimensions of `R[k]`, the dual of the polynomial algebra on `ξ_{ik}`.
pub fn rk_dims(k: u32, max: u32) -> GradedDims {
    poly_dims(&rk_generator_degrees(k), max)
}

/// A range of degrees in which a factor is recorded as zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroRange {
    pub factor: String,
    pub from: u32,
    pub to: u32,
    pub provenance: String,
}

#[derive(Debug, Deserialize)]
struct BoundsFile {
    zero_range: Vec<ZeroRange>,
}

pub fn v1_zero_ranges() -> Vec<ZeroRange> {
    let file: BoundsFile = toml::from_str(V1_BOUNDS_TOML).expect("bundled bounds parse");
    file.zero_range
}

fn covered<'a>(ranges: &'a [ZeroRange], factor: &str, degree: u32) -> Option<&'a ZeroRange> {
    ranges
        .iter()
        .find(|r| r.factor == factor && r.from <= degree && degree <= r.to)
}

/// The factors of the decomposition of `C*(PL)` through `max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VDecomposition {
    pub max: u32,
    /// `K[3] ⊕ R⟨4⟩` in positive degrees.
    pub generators: GradedDims,
    /// `V⁽¹⁾(K[3] ⊕ R⟨4⟩)`.
    pub v1: GradedDims,
    pub h_k1: GradedDims,
    pub e_r2: GradedDims,
    pub gamma: GradedDims,
    /// `𝒱 = V⁽¹⁾ ⊗ Γ(T)`.
    pub v: GradedDims,
    pub h_k: GradedDims,
    /// Zero ranges the `V⁽¹⁾` computation relied on.
    pub provenance: Vec<ZeroRange>,
}

/// Dimensions of the tensor algebra on a positively graded space.
fn tensor_algebra_dims(gens: &GradedDims, max: u32) -> GradedDims {
    let mut out = GradedDims::unit(max);
    for d in 1..=max {
        let mut c = 0;
        for j in 1..=d {
            c += gens.get(j) * out.get(d - j);
        }
        out.set(d, c);
    }
    out
}

pub fn v_dims(max: u32) -> Result<VDecomposition, CplError> {
    if max > CPL_MAX_DEGREE {
        return Err(CplError::UnsupportedRange(max));
    }
    let ranges = v1_zero_ranges();
    let mut used = Vec::new();
    // K[3] ⊕ R⟨4⟩ is needed through max - 1 because of the suspension.
    let mut generators = GradedDims::zeros(max);
    for d in 1..max {
        let k3 = covered(&ranges, "K[3]", d).ok_or_else(|| CplError::MissingBound {
            factor: "K[3]".into(),
            degree: d,
        })?;
        if !used.contains(k3) {
            used.push(k3.clone());
        }
        let mut r4 = 0;
        for k in 4.. {
            if (1u32 << (k - 1)) > d {
                break;
            }
            r4 += rk_dims(k, d).get(d);
        }
        generators.set(d, r4);
    }
    let mut suspended = GradedDims::zeros(max);
    for d in 1..max {
        suspended.set(d + 1, generators.get(d));
    }
    for d in 1..=max {
        let f = covered(&ranges, "F", d).ok_or_else(|| CplError::MissingBound {
            factor: "F".into(),
            degree: d,
        })?;
        if !used.contains(f) {
            used.push(f.clone());
        }
    }
    let v1 = tensor_algebra_dims(&suspended, max);

    let h_k1 = product_em_dims(&k1_factors(max), max);
    let mut r2 = rk_dims(2, max);
    r2.set(0, 0);
    let e_r2 = ext_alg_dims(&r2, max);
    let gamma = series_quotient(&h_k1, &e_r2, max)?;
    let v = tensor_dims(&v1, &gamma, max);
    let h_k = product_em_dims(&k_factors(max), max);
    Ok(VDecomposition {
        max,
        generators,
        v1,
        h_k1,
        e_r2,
        gamma,
        v,
        h_k,
        provenance: used,
    })
}

/// `dim C^i(PL)` for `0 <= i <= max`.
pub fn cpl_dims(max: u32) -> Result<GradedDims, CplError> {
    let dec = v_dims(max)?;
    Ok(tensor_dims(&dec.v, &dec.h_k, max))
}

/// `C^{>0}(PL)` through degree 11 over `A(2)`, truncated above 11.
pub fn cpl_module(truncation: u32) -> Result<FPModule, CplError> {
    if truncation != CPL_MAX_DEGREE {
        return Err(CplError::UnsupportedRange(truncation));
    }
    Ok(FPModule::from_toml(CPL_MODULE_TOML)?)
}

/// `C*(PL)` including the unit in degree 0.
pub fn cpl_module_with_unit() -> Result<FPModule, CplError> {
    Ok(cpl_module(CPL_MAX_DEGREE)?.with_unit()?)
}
