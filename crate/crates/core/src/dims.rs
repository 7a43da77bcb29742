//! Closed-form dimensions for a g-dimensional abelian variety `A`.
//!
//! `H^q(A, Ω^p)` is `∧^p H^0(Ω^1) ⊗ ∧^q H^1(O)` with both factors of dimension
//! `g`, so every Hodge number is a product of two binomials. Hochschild
//! cohomology is read off through HKR, which needs the characteristic to be
//! zero or larger than `g`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::exact_seq::{ExactSequenceSpec, MapClaim, Property};

/// Largest supported dimension; `C(2g, g)` must fit in a `u128`.
pub const MAX_G: u32 = 60;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimError {
    #[error("g must be positive, got {0}")]
    NonpositiveG(i64),
    #[error("g = {0} exceeds the supported maximum {MAX_G} (binomials would overflow)")]
    GTooLarge(i64),
}

/// A validated dimension `1 <= g <= MAX_G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Genus(u32);

impl Genus {
    pub fn new(g: i64) -> Result<Self, DimError> {
        if g <= 0 {
            Err(DimError::NonpositiveG(g))
        } else if g > MAX_G as i64 {
            Err(DimError::GTooLarge(g))
        } else {
            Ok(Genus(g as u32))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// `C(n, k)`, zero outside `0 <= k <= n`. Exact for `n <= 2 * MAX_G`.
pub fn binomial(n: u32, k: i64) -> u128 {
    if k < 0 || k > n as i64 {
        return 0;
    }
    let k = (k as u32).min(n - k as u32);
    // each partial product is itself a binomial, so the division is exact
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `dim H^q(A, Ω^p) = C(g, p) · C(g, q)`.
pub fn hodge_dim(g: i64, p: i64, q: i64) -> Result<u128, DimError> {
    let g = Genus::new(g)?.get();
    Ok(binomial(g, p) * binomial(g, q))
}

/// `dim HH^n(A) = Σ_{p+q=n} C(g, p) · C(g, q)`.
pub fn hochschild_dim(g: i64, n: i64) -> Result<u128, DimError> {
    let g = Genus::new(g)?.get();
    if n < 0 {
        return Ok(0);
    }
    Ok((0..=n).map(|p| binomial(g, p) * binomial(g, n - p)).sum())
}

/// HKR holds when the characteristic is 0 or exceeds `g`.
pub fn hkr_valid(g: Genus, characteristic: u64) -> bool {
    characteristic == 0 || characteristic > g.get() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeformationDims {
    /// `dim H^1(A, T_A) = g^2`.
    pub formal_def_dim: u64,
    /// Local moduli of polarized lifts, `g(g+1)/2`.
    pub polarized_def_dim: u64,
    /// `H^0` of the graph's normal bundle, which is free of rank `g`.
    pub aut_tangent_dim: u64,
    /// `H^1` of the same bundle, `g · g`.
    pub aut_obstruction_dim: u64,
}

pub fn deformation_dims(g: i64) -> Result<DeformationDims, DimError> {
    let g = Genus::new(g)?.get() as u64;
    Ok(DeformationDims {
        formal_def_dim: g * g,
        polarized_def_dim: g * (g + 1) / 2,
        aut_tangent_dim: g,
        aut_obstruction_dim: g * g,
    })
}

/// Dimension of `H^1(A, O_A)`, the part of `Ext^1` acting on lifts of the
/// graph's structure sheaf over a fixed lift of the base.
pub fn extra_lift_tangent_dim(g: i64) -> Result<u64, DimError> {
    Ok(Genus::new(g)?.get() as u64)
}

/// The deformation-obstruction sequence of the graph of an automorphism,
///
/// `0 -> H^0(N) -> Ext^1 -> H^1(O) -> H^1(N) -> Ext^2 -> ...`
///
/// with dimensions `[g, 2g, g, g^2, 2g^2 - g]`. With `use_paper_display` the
/// fourth term is `2g` instead of `g^2`, as in the printed general display;
/// the two differ for every `g >= 3`. At `g = 1` the printed sequence is the
/// elliptic one, `[1, 2, 1, 1, 1]`, so the flag has no effect there.
pub fn graph_les(g: i64, use_paper_display: bool) -> Result<ExactSequenceSpec, DimError> {
    let g = Genus::new(g)?.get() as usize;
    let fourth = if use_paper_display && g > 1 { 2 * g } else { g * g };
    let dims = vec![g, 2 * g, g, fourth, 2 * g * g - g];
    Ok(ExactSequenceSpec::new(dims, true, true).expect("five terms"))
}

/// Names of the maps of [`graph_les`], by index.
pub const GRAPH_LES_MAP_LABELS: [&str; 4] = ["H0(N)->Ext1", "alpha", "beta", "gamma"];

/// Recovers `(g, use_paper_display)` when `spec` is one of the sequences built
/// by [`graph_les`]. At `g <= 2` both variants coincide and the self-consistent
/// one is reported.
pub fn recognize_graph_les(spec: &ExactSequenceSpec) -> Option<(Genus, bool)> {
    let g = Genus::new(*spec.dims().first()? as i64).ok()?;
    [false, true]
        .into_iter()
        .find(|&flag| graph_les(g.get() as i64, flag).ok().as_ref() == Some(spec))
        .map(|flag| (g, flag))
}

/// What the lifting argument states about the maps of [`graph_les`].
///
/// For elliptic curves: alpha surjective, beta zero, gamma injective. For
/// `g >= 2` it states instead that alpha need not be surjective and gamma need
/// not be injective.
pub fn graph_les_claims(g: Genus) -> Vec<MapClaim> {
    let claim = |map: usize, property, forced| MapClaim {
        map,
        label: GRAPH_LES_MAP_LABELS[map].to_string(),
        property,
        forced,
    };
    if g.get() == 1 {
        vec![
            claim(1, Property::Surjective, true),
            claim(2, Property::Zero, true),
            claim(3, Property::Injective, true),
        ]
    } else {
        vec![
            claim(1, Property::Surjective, false),
            claim(3, Property::Injective, false),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimReport {
    pub g: Genus,
    /// Keyed by `(p, q)`; serialized as `"p,q"`.
    #[serde(serialize_with = "serialize_hodge")]
    pub hodge: BTreeMap<(u32, u32), u128>,
    /// `HH^0 ... HH^{2g}`.
    pub hochschild: Vec<u128>,
    #[serde(flatten)]
    pub deformation: DeformationDims,
    pub extra_lift_tangent_dim: u64,
    /// Present only when a characteristic was supplied.
    pub hkr_valid: Option<bool>,
}

fn serialize_hodge<S: serde::Serializer>(table: &BTreeMap<(u32, u32), u128>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(table.len()))?;
    for ((p, q), v) in table {
        map.serialize_entry(&format!("{p},{q}"), v)?;
    }
    map.end()
}

pub fn dim_report(g: i64, characteristic: Option<u64>) -> Result<DimReport, DimError> {
    let genus = Genus::new(g)?;
    let gu = genus.get();
    let mut hodge = BTreeMap::new();
    for p in 0..=gu {
        for q in 0..=gu {
            hodge.insert((p, q), hodge_dim(g, p as i64, q as i64)?);
        }
    }
    let hochschild = (0..=2 * gu as i64)
        .map(|n| hochschild_dim(g, n))
        .collect::<Result<_, _>>()?;
    Ok(DimReport {
        g: genus,
        hodge,
        hochschild,
        deformation: deformation_dims(g)?,
        extra_lift_tangent_dim: extra_lift_tangent_dim(g)?,
        hkr_valid: characteristic.map(|p| hkr_valid(genus, p)),
    })
}
