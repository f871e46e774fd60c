//! Registry of named triples: families certified by a bracket or curvature
//! argument, families with explicit commuting witnesses, the transitive
//! sphere actions with positive-dimensional isotropy, and metadata-only
//! items that either reduce to a realized core triple or need an exceptional
//! ambient algebra.
//!
//! Entry grammar for the CLI: `id` or `id:p=<int>`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebras::{
    g2_sp2_frame, make_sp, make_su, quat_expand, skew_hermitian_basis, sp2_in_su4, sp_basis, su4_as_so6,
};
use crate::error::{Error, Result};
use crate::linalg::{LieSubspace, MatrixElement, DEFAULT_TOL};
use crate::octonion::{left_mult, triality_frame, Octonion};
use crate::triple::{Triple, TripleMeta, STRUCTURE_TOL};

/// What the condition module is expected to report for an entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    BracketCertificate,
    CurvatureCertificate,
    Violation,
    SequenceViolation,
    /// Neither certificate applies; only a numerical estimate is reported.
    Estimate,
    /// A transitive sphere action `k/h` (`s = 0`), used for decomposition data.
    SphereAction,
    /// Nothing to compute: a classification statement or quotient decoration.
    Metadata,
}

impl Expected {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "bracket-certificate" => Self::BracketCertificate,
            "curvature-certificate" => Self::CurvatureCertificate,
            "violation" => Self::Violation,
            "sequence-violation" => Self::SequenceViolation,
            "estimate" => Self::Estimate,
            "sphere-action" => Self::SphereAction,
            "metadata" => Self::Metadata,
            _ => return None,
        })
    }

    pub fn is_certified(self) -> bool {
        matches!(self, Self::BracketCertificate | Self::CurvatureCertificate)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "target", rename_all = "kebab-case")]
pub enum Availability {
    Realized,
    /// Checked on the core triple with this id.
    ReducesTo(&'static str),
    /// Not built here; the note says why.
    OutOfScope(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ParamRange {
    pub min: i64,
    pub max: Option<i64>,
    pub default: i64,
}

impl ParamRange {
    const fn from(min: i64) -> Self {
        Self {
            min,
            max: None,
            default: min,
        }
    }

    const fn between(min: i64, max: i64) -> Self {
        Self {
            min,
            max: Some(max),
            default: min,
        }
    }

    pub fn contains(&self, p: i64) -> bool {
        p >= self.min && self.max.is_none_or(|m| p <= m)
    }

    pub fn describe(&self) -> String {
        match self.max {
            Some(m) => format!("{}..={}", self.min, m),
            None => format!("p >= {}", self.min),
        }
    }
}

/// Expected dimensions of a realized triple and its decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedDims {
    pub g: usize,
    pub k: usize,
    pub h: usize,
    pub m: usize,
    pub s: usize,
    pub m1: usize,
}

type DimsFn = fn(i64) -> ExpectedDims;
type BuildFn = fn(i64) -> Result<Triple>;

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    /// Rank of the disk bundle, `dim m + 1`; `None` for pure metadata.
    pub rank: Option<usize>,
    pub params: Option<ParamRange>,
    pub expected: Expected,
    pub availability: Availability,
    /// A closed-form commuting pair is available for this family.
    pub witness: bool,
    #[serde(skip)]
    dims: Option<DimsFn>,
    #[serde(skip)]
    builder: Option<BuildFn>,
}

impl CatalogEntry {
    pub fn realizable(&self) -> bool {
        self.availability == Availability::Realized
    }

    pub fn expected_dims(&self, p: i64) -> Option<ExpectedDims> {
        self.dims.map(|f| f(p))
    }

    /// Parameter values valid for this entry, capped at `limit` per family.
    pub fn sample_params(&self, limit: usize) -> Vec<i64> {
        match self.params {
            None => vec![0],
            Some(r) => {
                let hi = r.max.unwrap_or(r.min + limit as i64 - 1);
                (r.min..=hi).take(limit).collect()
            }
        }
    }

    fn check_param(&self, p: Option<i64>) -> Result<i64> {
        match (self.params, p) {
            (None, None) => Ok(0),
            (None, Some(p)) => Err(Error::OutOfRange {
                id: self.id.into(),
                p,
                range: "no parameter".into(),
            }),
            (Some(r), None) => Ok(r.default),
            (Some(r), Some(p)) if r.contains(p) => Ok(p),
            (Some(r), Some(p)) => Err(Error::OutOfRange {
                id: self.id.into(),
                p,
                range: r.describe(),
            }),
        }
    }
}

fn so_dim(n: i64) -> usize {
    (n * (n - 1) / 2) as usize
}

fn su_dim(n: i64) -> usize {
    (n * n - 1) as usize
}

fn sp_dim(n: i64) -> usize {
    (n * (2 * n + 1)) as usize
}

fn dims(g: usize, k: usize, h: usize, m1: usize) -> ExpectedDims {
    ExpectedDims {
        g,
        k,
        h,
        m: k - h,
        s: g - k,
        m1,
    }
}

#[allow(clippy::too_many_arguments)]
const fn entry(
    id: &'static str,
    description: &'static str,
    rank: Option<usize>,
    params: Option<ParamRange>,
    expected: Expected,
    witness: bool,
    dims: DimsFn,
    builder: BuildFn,
) -> CatalogEntry {
    CatalogEntry {
        id,
        description,
        rank,
        params,
        expected,
        availability: Availability::Realized,
        witness,
        dims: Some(dims),
        builder: Some(builder),
    }
}

const fn meta_entry(
    id: &'static str,
    description: &'static str,
    rank: Option<usize>,
    expected: Expected,
    availability: Availability,
) -> CatalogEntry {
    CatalogEntry {
        id,
        description,
        rank,
        params: None,
        expected,
        availability,
        witness: false,
        dims: None,
        builder: None,
    }
}

static ENTRIES: &[CatalogEntry] = &[
    // certified by [s,s] ∩ [m,m] = 0
    entry(
        "spin7-so8",
        "spin(7) (spin representation) < so(8) < so(9+p), p in 0..=2",
        Some(8),
        Some(ParamRange::between(0, 2)),
        Expected::BracketCertificate,
        false,
        |p| dims(so_dim(9 + p), 28, 21, 7),
        |p| spin7_so8(p, "spin7-so8"),
    ),
    entry(
        "g2-so0-7-in-so8",
        "g2 < so(7) (vector representation) < so(8+p), p in 0..=1",
        Some(8),
        Some(ParamRange::between(0, 1)),
        Expected::BracketCertificate,
        false,
        |p| dims(so_dim(8 + p), 21, 14, 7),
        |p| g2_so7(false, 8 + p as usize, "g2-so0-7-in-so8"),
    ),
    entry(
        "su3-su4-spin7",
        "su(3) < su(4) = so(6) < so(7)",
        Some(8),
        None,
        Expected::BracketCertificate,
        false,
        |_| dims(21, 15, 8, 6),
        |_| su3_su4_spin7(),
    ),
    entry(
        "sp2-su4-su5",
        "sp(2) = so(5) < su(4) = so(6) < su(5)",
        Some(6),
        None,
        Expected::BracketCertificate,
        false,
        |_| dims(24, 15, 10, 5),
        |_| sp2_su4_su5(),
    ),
    // certified through a positively curved sphere G/H
    entry(
        "sp-series-rank4",
        "sp(p) < sp(1) + sp(p) < sp(p+1); G/H is the round-type sphere S^(4p+3)",
        Some(4),
        Some(ParamRange::from(1)),
        Expected::CurvatureCertificate,
        false,
        |p| dims(sp_dim(p + 1), 3 + sp_dim(p), sp_dim(p), 0),
        |p| sp_series(p, false),
    ),
    entry(
        "sp-series",
        "u(1) + sp(p) < sp(1) + sp(p) < sp(p+1); h enlarges the rank-4 family by a circle",
        Some(3),
        Some(ParamRange::from(1)),
        Expected::CurvatureCertificate,
        false,
        |p| dims(sp_dim(p + 1), 3 + sp_dim(p), 1 + sp_dim(p), 2),
        |p| sp_series(p, true),
    ),
    entry(
        "g2-so4-rank4",
        "su(2)_1 < so(4) < g2",
        Some(4),
        None,
        Expected::Estimate,
        false,
        |_| dims(14, 6, 3, 0),
        |_| g2_so4(false),
    ),
    entry(
        "g2-so4-rank3",
        "su(2)_1 + u(1) < so(4) < g2, the circle inside su(2)_3",
        Some(3),
        None,
        Expected::Estimate,
        false,
        |_| dims(14, 6, 4, 2),
        |_| g2_so4(true),
    ),
    // explicit commuting witnesses
    entry(
        "spin-octonion-case1",
        "g2 < spin(7) (spin representation) < so(9+p), p >= 0",
        Some(8),
        Some(ParamRange::from(0)),
        Expected::Violation,
        true,
        |p| dims(so_dim(9 + p), 21, 14, 7),
        |p| g2_so7(true, 9 + p as usize, "spin-octonion-case1"),
    ),
    entry(
        "spin-octonion-case2",
        "g2 < so(7) (vector representation) < so(9+p), p >= 1",
        Some(8),
        Some(ParamRange::from(1)),
        Expected::Violation,
        true,
        |p| dims(so_dim(9 + p), 21, 14, 7),
        |p| g2_so7(false, 9 + p as usize, "spin-octonion-case2"),
    ),
    entry(
        "spin8-case4",
        "spin(7) (spin representation) < so(8) < so(9+p), p >= 3",
        Some(8),
        Some(ParamRange::from(3)),
        Expected::Violation,
        true,
        |p| dims(so_dim(9 + p), 28, 21, 7),
        |p| spin7_so8(p, "spin8-case4"),
    ),
    meta_entry(
        "f4-case",
        "g2 < spin(7) < f4",
        Some(8),
        Expected::Violation,
        Availability::OutOfScope("needs a matrix realization of f4"),
    ),
    entry(
        "su3-long-root",
        "sp(1) < sp(2) < sp(p+2); commuting pair from su(3) < sp(3)",
        Some(8),
        Some(ParamRange::from(1)),
        Expected::Violation,
        true,
        |p| dims(sp_dim(p + 2), 10, 3, 4),
        su3_long_root,
    ),
    entry(
        "t-su2-su",
        "u(1) < su(2) < su(p+2), symmetric space SU(p+2)/S(U(2)U(p))",
        Some(3),
        Some(ParamRange::from(1)),
        Expected::Violation,
        true,
        |p| dims(su_dim(p + 2), 3, 1, 2),
        t_su2_su,
    ),
    entry(
        "su2-so4-so",
        "u(1) < su(2) < so(p+4), su(2) an ideal of so(4), p >= 2",
        Some(3),
        Some(ParamRange::from(2)),
        Expected::Violation,
        true,
        |p| dims(so_dim(p + 4), 3, 1, 2),
        su2_so4_so,
    ),
    entry(
        "su2-long-root-g2",
        "u(1) < su(2)_1 < g2, symmetric space G2/SO(4) with the long-root su(2)",
        Some(3),
        None,
        Expected::Violation,
        true,
        |_| dims(14, 3, 1, 2),
        |_| su2_long_root_g2(),
    ),
    entry(
        "su(p+4)-su3",
        "su(3) < su(4) < su(p+4), p >= 1",
        Some(8),
        Some(ParamRange::from(1)),
        Expected::Violation,
        true,
        |p| dims(su_dim(p + 4), 15, 8, 6),
        su_p4_su3,
    ),
    entry(
        "su(p+4)-su3-pair",
        "sp(2) < su(4) < su(p+4), p >= 2; paired witness in su(3) + su(3)",
        Some(6),
        Some(ParamRange::from(2)),
        Expected::Violation,
        true,
        |p| dims(su_dim(p + 4), 15, 10, 5),
        su_p4_sp2,
    ),
    entry(
        "su3-so6-n0",
        "su(3) < so(6) < so(6+p), p >= 2",
        Some(8),
        Some(ParamRange::from(2)),
        Expected::Violation,
        true,
        |p| dims(so_dim(6 + p), 15, 8, 6),
        su3_so6,
    ),
    entry(
        "g2-su2-sequence",
        "diagonal su(2) < su(2) + su(2)_3 < g2 + su(2); only a sequence of pairs violates",
        Some(4),
        None,
        Expected::SequenceViolation,
        false,
        |_| dims(17, 6, 3, 0),
        |_| g2_pair(),
    ),
    // transitive sphere actions with positive-dimensional isotropy
    entry(
        "sphere-so",
        "so(p) < so(p+1) on S^p, p >= 2",
        None,
        Some(ParamRange::from(2)),
        Expected::SphereAction,
        false,
        |p| {
            let n = p as usize;
            dims(so_dim(p + 1), so_dim(p + 1), so_dim(p), n)
        },
        |p| {
            let n = p as usize + 1;
            let k = LieSubspace::so(n);
            let h = LieSubspace::so(n - 1).embed(n, 1)?;
            finish("sphere-so", k.clone(), k, h, TripleMeta::default())
        },
    ),
    entry(
        "sphere-su",
        "su(p) < su(p+1) on S^(2p+1), p >= 2; the torus factor is taken trivial",
        None,
        Some(ParamRange::from(2)),
        Expected::SphereAction,
        false,
        |p| dims(su_dim(p + 1), su_dim(p + 1), su_dim(p), 2 * p as usize),
        |p| {
            let n = p as usize + 1;
            let k = make_su(n)?.subspace;
            let idx: Vec<usize> = (1..n).collect();
            let h = LieSubspace::span(2 * n, &skew_hermitian_basis(n, &idx, true), DEFAULT_TOL);
            finish("sphere-su", k.clone(), k, h, TripleMeta::default())
        },
    ),
    entry(
        "sphere-sp",
        "sp(p) < sp(p+1) on S^(4p+3), p >= 1; the torus factor is taken trivial",
        None,
        Some(ParamRange::from(1)),
        Expected::SphereAction,
        false,
        |p| dims(sp_dim(p + 1), sp_dim(p + 1), sp_dim(p), 4 * p as usize),
        |p| {
            let n = p as usize + 1;
            let k = make_sp(n)?.subspace;
            let idx: Vec<usize> = (1..n).collect();
            let h = LieSubspace::span(4 * n, &sp_basis(n, &idx), DEFAULT_TOL);
            finish("sphere-sp", k.clone(), k, h, TripleMeta::default())
        },
    ),
    entry(
        "sphere-g2",
        "su(3) < g2 on S^6",
        None,
        None,
        Expected::SphereAction,
        false,
        |_| dims(14, 14, 8, 6),
        |_| {
            let k = g2_sp2_frame().g2.clone();
            let h = g2_su3();
            finish("sphere-g2", k.clone(), k, h, TripleMeta::default())
        },
    ),
    entry(
        "sphere-spin7",
        "g2 < spin(7) (spin representation) on S^7",
        None,
        None,
        Expected::SphereAction,
        false,
        |_| dims(21, 21, 14, 7),
        |_| {
            let f = triality_frame();
            finish(
                "sphere-spin7",
                f.so7_plus.clone(),
                f.so7_plus.clone(),
                f.g2.clone(),
                TripleMeta::default(),
            )
        },
    ),
    entry(
        "sphere-spin9",
        "spin(7) < spin(9) on S^15, with h1 = spin(8)",
        None,
        None,
        Expected::SphereAction,
        false,
        |_| dims(36, 36, 21, 8),
        |_| {
            let k = LieSubspace::so(9);
            let h = triality_frame().so7_plus.embed(9, 0)?;
            finish("sphere-spin9", k.clone(), k, h, TripleMeta::default())
        },
    ),
    // quotients reduce to the core triple
    meta_entry(
        "spin7-so8-quotients",
        "(Spin(p+9) G') x (Spin(8) H') R^8, p in 1..=2",
        Some(8),
        Expected::Metadata,
        Availability::ReducesTo("spin7-so8"),
    ),
    meta_entry(
        "g2-so0-7-quotients",
        "(Spin(9) G') x (Spin(7) H') R^8",
        Some(8),
        Expected::Metadata,
        Availability::ReducesTo("g2-so0-7-in-so8"),
    ),
    meta_entry(
        "su3-su4-spin7-quotients",
        "(Spin(7) G') x (Spin(6) S^1 H') C^4",
        Some(8),
        Expected::Metadata,
        Availability::ReducesTo("su3-su4-spin7"),
    ),
    meta_entry(
        "sp2-su4-su5-quotients",
        "(SU(5) G') x (SU(4) H') R^6",
        Some(6),
        Expected::Metadata,
        Availability::ReducesTo("sp2-su4-su5"),
    ),
    meta_entry(
        "g2-so4-rank4-quotients",
        "(G2 x G') x (SO(4) x SU(2)') H/{1,-1}",
        Some(4),
        Expected::Metadata,
        Availability::ReducesTo("g2-so4-rank4"),
    ),
    meta_entry(
        "sp-series-rank4-quotients",
        "(Sp(p+1) x G') x (Sp(1) x Sp(p) x Sp(1)') H",
        Some(4),
        Expected::Metadata,
        Availability::ReducesTo("sp-series-rank4"),
    ),
    meta_entry(
        "sp-series-quotients",
        "(Sp(p+1) G') x (Sp(1) H') sp(1) with H' < Sp(p) G'",
        Some(3),
        Expected::Metadata,
        Availability::ReducesTo("sp-series"),
    ),
    meta_entry(
        "rank-restriction",
        "essentially non-trivial bundles with such metrics have rank in {2, 3, 4, 6, 8}",
        None,
        Expected::Metadata,
        Availability::OutOfScope("classification statement, nothing to realize"),
    ),
    meta_entry(
        "sym-so4-so-p1",
        "SO(5)/(SO(4) SO(1)) with su(2) < so(4); so(5) = sp(2) is handled by the sp families",
        Some(3),
        Expected::Metadata,
        Availability::ReducesTo("su3-long-root"),
    ),
    meta_entry(
        "sym-g2-su2-3",
        "G2/SO(4) with L = SU(2)_3",
        Some(4),
        Expected::Metadata,
        Availability::ReducesTo("g2-su2-sequence"),
    ),
    meta_entry(
        "sym-f4-sp3",
        "F4/(SU(2) Sp(3))",
        Some(3),
        Expected::Violation,
        Availability::OutOfScope("needs a matrix realization of f4"),
    ),
    meta_entry(
        "sym-e6-su6",
        "E6/(SU(2) SU(6))",
        Some(3),
        Expected::Violation,
        Availability::OutOfScope("needs a matrix realization of e6"),
    ),
    meta_entry(
        "sym-e7-so12",
        "E7/(SU(2) Spin(12))",
        Some(3),
        Expected::Violation,
        Availability::OutOfScope("needs a matrix realization of e7"),
    ),
    meta_entry(
        "sym-e8-e7",
        "E8/(SU(2) E7)",
        Some(3),
        Expected::Violation,
        Availability::OutOfScope("needs a matrix realization of e8"),
    ),
    meta_entry(
        "sym-f4-spin9",
        "F4/Spin(9) with L = Spin(9)",
        Some(16),
        Expected::Violation,
        Availability::OutOfScope("needs a matrix realization of f4"),
    ),
    meta_entry(
        "sym-e6-spin10",
        "E6/(Spin(10) U(1))",
        Some(10),
        Expected::Violation,
        Availability::OutOfScope("needs a matrix realization of e6"),
    ),
    meta_entry(
        "sym-e7-spin12",
        "E7/(Spin(12) SU(2))",
        Some(12),
        Expected::Violation,
        Availability::OutOfScope("needs a matrix realization of e7"),
    ),
    meta_entry(
        "sym-e8-spin16",
        "E8/Spin(16)",
        Some(16),
        Expected::Violation,
        Availability::OutOfScope("needs a matrix realization of e8"),
    ),
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn find(id: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownEntry(id.to_string()))
}

/// Filter on rank, realizability and expected verdict.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Filter {
    pub rank: Option<usize>,
    pub realizable: Option<bool>,
    pub expected: Option<Expected>,
    pub certified: Option<bool>,
}

impl Filter {
    /// Parses tags of the form `rank=8`, `realizable=true`, `expected=violation`, `certified=true`.
    pub fn parse(tags: &[&str]) -> Result<Self> {
        let mut f = Filter::default();
        for tag in tags {
            let (key, value) = tag.split_once('=').ok_or_else(|| bad_tag(tag))?;
            match key.trim() {
                "rank" => f.rank = Some(value.trim().parse().map_err(|_| bad_tag(tag))?),
                "realizable" => f.realizable = Some(value.trim().parse().map_err(|_| bad_tag(tag))?),
                "certified" => f.certified = Some(value.trim().parse().map_err(|_| bad_tag(tag))?),
                "expected" => {
                    let v = value.trim();
                    if v == "certified" {
                        f.certified = Some(true);
                    } else {
                        f.expected = Some(Expected::parse(v).ok_or_else(|| bad_tag(tag))?);
                    }
                }
                _ => return Err(bad_tag(tag)),
            }
        }
        Ok(f)
    }

    pub fn matches(&self, e: &CatalogEntry) -> bool {
        self.rank.is_none_or(|r| e.rank == Some(r))
            && self.realizable.is_none_or(|r| e.realizable() == r)
            && self.expected.is_none_or(|x| e.expected == x)
            && self.certified.is_none_or(|c| e.expected.is_certified() == c)
    }
}

fn bad_tag(tag: &str) -> Error {
    Error::Config {
        field: "filter".into(),
        msg: format!("unknown tag `{tag}` (use rank=N, realizable=BOOL, certified=BOOL or expected=KIND)"),
    }
}

/// Entries matching `filter`, in registry order.
pub fn list_entries(filter: &Filter) -> Vec<&'static CatalogEntry> {
    ENTRIES.iter().filter(|e| filter.matches(e)).collect()
}

/// Splits `id[:p=N]` into the id and the optional parameter.
pub fn parse_spec(spec: &str) -> Result<(&str, Option<i64>)> {
    let spec = spec.trim();
    match spec.split_once(':') {
        None => Ok((spec, None)),
        Some((id, rest)) => {
            let value = rest.trim().strip_prefix("p=").ok_or_else(|| Error::Config {
                field: "entry".into(),
                msg: format!("expected `{id}:p=<int>`, got `{spec}`"),
            })?;
            let p = value.trim().parse::<i64>().map_err(|_| Error::Config {
                field: "entry".into(),
                msg: format!("`{value}` is not an integer"),
            })?;
            Ok((id.trim(), Some(p)))
        }
    }
}

/// Builds a realizable entry; `p = None` picks the family default.
pub fn build(id: &str, p: Option<i64>) -> Result<Triple> {
    let e = find(id)?;
    match e.availability {
        Availability::Realized => {}
        Availability::ReducesTo(core) => {
            return Err(Error::Unrealizable {
                id: id.into(),
                note: format!("quotient or reduction of `{core}`; check that entry instead"),
            })
        }
        Availability::OutOfScope(note) => {
            return Err(Error::Unrealizable {
                id: id.into(),
                note: note.into(),
            })
        }
    }
    let p = e.check_param(p)?;
    let builder = e
        .builder
        .ok_or_else(|| Error::Internal(format!("{id} has no builder")))?;
    let mut t = builder(p)?;
    t.name = match e.params {
        Some(_) => format!("{id}:p={p}"),
        None => id.to_string(),
    };
    Ok(t)
}

/// Resolves the parameter an entry would be built with.
pub fn resolve_param(id: &str, p: Option<i64>) -> Result<i64> {
    find(id)?.check_param(p)
}

pub fn build_spec(spec: &str) -> Result<Triple> {
    let (id, p) = parse_spec(spec)?;
    build(id, p)
}

#[derive(Serialize)]
struct ExportEntry<'a> {
    #[serde(flatten)]
    entry: &'a CatalogEntry,
    realizable: bool,
    default_dims: Option<ExpectedDims>,
}

/// The full registry as JSON.
pub fn export_json() -> serde_json::Value {
    let items: Vec<ExportEntry> = ENTRIES
        .iter()
        .map(|e| ExportEntry {
            entry: e,
            realizable: e.realizable(),
            default_dims: e.expected_dims(e.params.map_or(0, |r| r.default)),
        })
        .collect();
    serde_json::to_value(items).expect("catalog serializes")
}

fn finish(name: &str, g: LieSubspace, k: LieSubspace, h: LieSubspace, meta: TripleMeta) -> Result<Triple> {
    Ok(Triple::new(name, g, k, h)?.with_meta(meta))
}

fn spin7_so8(p: i64, name: &str) -> Result<Triple> {
    let n = 9 + p as usize;
    let f = triality_frame();
    let h = f.so7_plus.embed(n, 0)?;
    let k = LieSubspace::so(8).embed(n, 0)?;
    finish(name, LieSubspace::so(n), k, h, TripleMeta::default())
}

/// `g2 < so7 < so(n)` with `so7` the spin copy (`plus`) or the vector copy.
fn g2_so7(plus: bool, n: usize, name: &str) -> Result<Triple> {
    let f = triality_frame();
    let k = if plus { &f.so7_plus } else { &f.so7_0 };
    finish(
        name,
        LieSubspace::so(n),
        k.embed(n, 0)?,
        f.g2.embed(n, 0)?,
        TripleMeta::default(),
    )
}

fn su3_su4_spin7() -> Result<Triple> {
    let (su4, map) = su4_as_so6();
    let su3 = LieSubspace::span(8, &skew_hermitian_basis(4, &[0, 1, 2], true), DEFAULT_TOL);
    let h = map.apply_subspace(&su3)?.embed(7, 0)?;
    let k = su4.subspace.embed(7, 0)?;
    finish("su3-su4-spin7", LieSubspace::so(7), k, h, TripleMeta::default())
}

fn sp2_su4_su5() -> Result<Triple> {
    let g = make_su(5)?.subspace;
    let k = LieSubspace::span(10, &skew_hermitian_basis(5, &[0, 1, 2, 3], true), DEFAULT_TOL);
    let h = sp2_in_su4(5, [0, 1, 2, 3]);
    finish("sp2-su4-su5", g, k, h, TripleMeta::default())
}

/// Circle of left multiplication by `i` on quaternion coordinate `c` of `H^n`.
pub(crate) fn sp_circle(n: usize, c: usize) -> MatrixElement {
    let mut z = vec![vec![[0.0; 4]; n]; n];
    z[c][c] = [0.0, 1.0, 0.0, 0.0];
    MatrixElement::skew_part(&quat_expand(&z))
}

fn sp_series(p: i64, circle: bool) -> Result<Triple> {
    let n = p as usize + 1;
    let g = make_sp(n)?.subspace;
    let rest: Vec<usize> = (1..n).collect();
    let sp_p = LieSubspace::span(4 * n, &sp_basis(n, &rest), DEFAULT_TOL);
    let k = LieSubspace::span(4 * n, &sp_basis(n, &[0]), DEFAULT_TOL).sum(&sp_p, DEFAULT_TOL);
    let (h, sphere) = if circle {
        let t = LieSubspace::span(4 * n, &[sp_circle(n, 0)], DEFAULT_TOL);
        (
            t.sum(&sp_p, DEFAULT_TOL),
            "inside the positively curved sphere Sp(p+1)/Sp(p)",
        )
    } else {
        (sp_p, "Sp(p+1)/Sp(p) = S^(4p+3)")
    };
    let meta = TripleMeta {
        positively_curved: Some(sphere.into()),
        notes: Vec::new(),
    };
    finish(if circle { "sp-series" } else { "sp-series-rank4" }, g, k, h, meta)
}

fn g2_so4(circle: bool) -> Result<Triple> {
    let f = g2_sp2_frame();
    let h = if circle {
        f.su2_1.sum(
            &LieSubspace::span(7, std::slice::from_ref(&f.a0), DEFAULT_TOL),
            DEFAULT_TOL,
        )
    } else {
        f.su2_1.clone()
    };
    let r = f.su2_1.bracket_residual(&f.su2_3, &LieSubspace::zero(7));
    if r > STRUCTURE_TOL {
        return Err(Error::Internal(format!(
            "su(2)_1 and su(2)_3 do not commute (residual {r:e})"
        )));
    }
    let name = if circle { "g2-so4-rank3" } else { "g2-so4-rank4" };
    finish(name, f.g2.clone(), f.so4.clone(), h, TripleMeta::default())
}

/// `su(3) < g2 < so(7)` as the stabilizer of the unit `i` (coordinate 0).
fn g2_su3() -> LieSubspace {
    g2_sp2_frame()
        .g2
        .kernel_of(|a| a.entries().column(0).iter().copied().collect(), DEFAULT_TOL)
}

/// Unitary frame `(c1, i c1, c2, i c2, c3, i c3)` of `Im O ⊖ R i = C^3`, with
/// complex structure `L_i`, such that `su(2)_1` acts on `span(c1, c2)` and
/// fixes `c3`. Columns of the returned `7 x 6` matrix.
pub(crate) fn g2_su3_frame() -> DMatrix<f64> {
    let li8 = left_mult(&Octonion::I).expect("imaginary").into_inner();
    let li = li8.view((1, 1), (7, 7)).into_owned();
    let unit = |i: usize| DVector::from_fn(7, |r, _| if r == i { 1.0 } else { 0.0 });
    let c1 = unit(3);
    let ic1 = &li * &c1;
    // the εH coordinates are 3..7; pick the first one orthogonal to c1, i c1
    let c2 = (3..7)
        .map(unit)
        .map(|v| &v - &c1 * c1.dot(&v) - &ic1 * ic1.dot(&v))
        .find(|v| v.norm() > 0.5)
        .expect("two complex dimensions in εH");
    let c2 = c2.normalize();
    let ic2 = &li * &c2;
    let c3 = unit(1);
    let ic3 = &li * &c3;
    let mut b = DMatrix::zeros(7, 6);
    for (j, v) in [c1, ic1, c2, ic2, c3, ic3].iter().enumerate() {
        b.column_mut(j).copy_from(v);
    }
    b
}

/// Real form in `so(7)` of a complex `3 x 3` skew-Hermitian matrix in the frame above.
pub(crate) fn g2_from_complex(z: &DMatrix<crate::algebras::C64>) -> MatrixElement {
    let b = g2_su3_frame();
    MatrixElement::skew_part(&(&b * crate::algebras::realify(z) * b.transpose()))
}

fn su2_long_root_g2() -> Result<Triple> {
    use crate::algebras::C64;
    let f = g2_sp2_frame();
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let zero = C64::new(0.0, 0.0);
    let mk = |entries: &[(usize, usize, C64)]| {
        let mut z = DMatrix::from_element(3, 3, zero);
        for &(r, c, v) in entries {
            z[(r, c)] = v;
        }
        g2_from_complex(&z)
    };
    let su2 = [
        mk(&[(0, 1, one), (1, 0, -one)]),
        mk(&[(0, 1, i), (1, 0, i)]),
        mk(&[(0, 0, i), (1, 1, -i)]),
    ];
    let k = LieSubspace::span(7, &su2, DEFAULT_TOL);
    let r = k.containment_residual(&f.su2_1).max(f.su2_1.containment_residual(&k));
    if r > 1e-8 {
        return Err(Error::Internal(format!(
            "su(2) on span(c1, c2) is not su(2)_1 (residual {r:e})"
        )));
    }
    let h = LieSubspace::span(7, &su2[2..], DEFAULT_TOL);
    finish("su2-long-root-g2", f.g2.clone(), k, h, TripleMeta::default())
}

fn su3_long_root(p: i64) -> Result<Triple> {
    let n = p as usize + 2;
    let g = make_sp(n)?.subspace;
    let k = LieSubspace::span(4 * n, &sp_basis(n, &[0, 1]), DEFAULT_TOL);
    let h = LieSubspace::span(4 * n, &sp_basis(n, &[1]), DEFAULT_TOL);
    finish("su3-long-root", g, k, h, TripleMeta::default())
}

fn complex_diag_circle(n: usize, a: usize, b: usize) -> MatrixElement {
    use crate::algebras::C64;
    let mut z = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    z[(a, a)] = C64::new(0.0, 1.0);
    z[(b, b)] = C64::new(0.0, -1.0);
    MatrixElement::skew_part(&crate::algebras::realify(&z))
}

fn t_su2_su(p: i64) -> Result<Triple> {
    let n = p as usize + 2;
    let g = make_su(n)?.subspace;
    let k = LieSubspace::span(2 * n, &skew_hermitian_basis(n, &[0, 1], true), DEFAULT_TOL);
    let h = LieSubspace::span(2 * n, &[complex_diag_circle(n, 0, 1)], DEFAULT_TOL);
    finish("t-su2-su", g, k, h, TripleMeta::default())
}

/// Real embedding of `C^3` into `R^n` on the first six coordinates.
pub(crate) fn realified_into(n: usize, z: &DMatrix<crate::algebras::C64>) -> MatrixElement {
    let r = crate::algebras::realify(z);
    let mut m = DMatrix::zeros(n, n);
    m.view_mut((0, 0), (r.nrows(), r.ncols())).copy_from(&r);
    MatrixElement::skew_part(&m)
}

fn su2_so4_so(p: i64) -> Result<Triple> {
    use crate::algebras::C64;
    let n = p as usize + 4;
    let su2: Vec<MatrixElement> = skew_hermitian_basis(2, &[0, 1], true)
        .into_iter()
        .map(|b| b.embed(n, 0))
        .collect::<Result<_>>()?;
    let k = LieSubspace::span(n, &su2, DEFAULT_TOL);
    let mut z = DMatrix::from_element(2, 2, C64::new(0.0, 0.0));
    z[(0, 0)] = C64::new(0.0, 1.0);
    z[(1, 1)] = C64::new(0.0, -1.0);
    let h = LieSubspace::span(n, &[realified_into(n, &z)], DEFAULT_TOL);
    finish("su2-so4-so", LieSubspace::so(n), k, h, TripleMeta::default())
}

fn su_p4_su3(p: i64) -> Result<Triple> {
    let n = p as usize + 4;
    let g = make_su(n)?.subspace;
    let k = LieSubspace::span(2 * n, &skew_hermitian_basis(n, &[0, 1, 2, 3], true), DEFAULT_TOL);
    let h = LieSubspace::span(2 * n, &skew_hermitian_basis(n, &[0, 1, 2], true), DEFAULT_TOL);
    finish("su(p+4)-su3", g, k, h, TripleMeta::default())
}

fn su_p4_sp2(p: i64) -> Result<Triple> {
    let n = p as usize + 4;
    let g = make_su(n)?.subspace;
    let k = LieSubspace::span(2 * n, &skew_hermitian_basis(n, &[0, 1, 2, 3], true), DEFAULT_TOL);
    let h = sp2_in_su4(n, [0, 1, 2, 3]);
    finish("su(p+4)-su3-pair", g, k, h, TripleMeta::default())
}

/// Complex structure `E12 + E34 + E56` on `R^6`.
pub(crate) fn so6_complex_structure(n: usize) -> MatrixElement {
    MatrixElement::e(n, 0, 1) + MatrixElement::e(n, 2, 3) + MatrixElement::e(n, 4, 5)
}

fn su3_so6(p: i64) -> Result<Triple> {
    let n = 6 + p as usize;
    let j = so6_complex_structure(6);
    let so6 = LieSubspace::so(6);
    let h6 = so6.kernel_of(
        |a| {
            let mut v: Vec<f64> = a.bracket(&j).as_slice().to_vec();
            v.push(a.q(&j));
            v
        },
        DEFAULT_TOL,
    );
    let h = h6.embed(n, 0)?;
    finish(
        "su3-so6-n0",
        LieSubspace::so(n),
        so6.embed(n, 0)?,
        h,
        TripleMeta::default(),
    )
}

/// Ambient `so(14)`: `g2` on `0..7`, a copy of `su(2)_1` on `7..14`.
fn g2_pair() -> Result<Triple> {
    let f = g2_sp2_frame();
    let n = 14;
    let g2 = f.g2.embed(n, 0)?;
    let copy = f.su2_1.embed(n, 7)?;
    let g = g2.sum(&copy, DEFAULT_TOL);
    let diag: Vec<MatrixElement> = f
        .su2_1
        .basis()
        .iter()
        .map(|b| Ok(b.embed(n, 0)? + b.embed(n, 7)?))
        .collect::<Result<_>>()?;
    let h = LieSubspace::span(n, &diag, DEFAULT_TOL);
    let k = h.sum(&f.su2_3.embed(n, 0)?, DEFAULT_TOL);
    finish("g2-su2-sequence", g, k, h, TripleMeta::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::decompose;

    fn check_dims(id: &str, p: Option<i64>) {
        let e = find(id).unwrap();
        let t = build(id, p).unwrap();
        let d = decompose(&t, DEFAULT_TOL).unwrap();
        let want = e.expected_dims(resolve_param(id, p).unwrap()).unwrap();
        let got = ExpectedDims {
            g: t.g.dim(),
            k: t.k.dim(),
            h: t.h.dim(),
            m: d.m.dim(),
            s: d.s.dim(),
            m1: d.m1.dim(),
        };
        assert_eq!(got, want, "{id} p={p:?}");
    }

    #[test]
    fn ids_are_unique() {
        let mut ids: Vec<&str> = entries().iter().map(|e| e.id).collect();
        ids.sort_unstable();
        let n = ids.len();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn reductions_point_at_realized_entries() {
        for e in entries() {
            if let Availability::ReducesTo(core) = e.availability {
                assert!(find(core).unwrap().realizable(), "{} -> {core}", e.id);
            }
        }
    }

    #[test]
    fn small_entries_round_trip_dims() {
        for id in [
            "g2-so0-7-in-so8",
            "su3-su4-spin7",
            "sp2-su4-su5",
            "g2-so4-rank4",
            "g2-so4-rank3",
            "su2-long-root-g2",
            "g2-su2-sequence",
            "sphere-g2",
            "sphere-spin7",
        ] {
            check_dims(id, None);
        }
        for (id, p) in [
            ("sp-series", 1),
            ("sp-series-rank4", 1),
            ("sp-series", 2),
            ("t-su2-su", 1),
            ("su2-so4-so", 2),
            ("su3-long-root", 1),
            ("sphere-so", 2),
            ("sphere-so", 3),
            ("sphere-su", 2),
            ("sphere-sp", 1),
        ] {
            check_dims(id, Some(p));
        }
    }

    #[test]
    fn rank_eight_filter() {
        let f = Filter::parse(&["rank=8", "realizable=true"]).unwrap();
        let ids: Vec<&str> = list_entries(&f).iter().map(|e| e.id).collect();
        for id in ["g2-so0-7-in-so8", "spin7-so8", "su3-su4-spin7"] {
            assert!(ids.contains(&id), "{id}");
        }
        assert!(!ids.contains(&"f4-case"));
    }

    #[test]
    fn violation_filter_and_unrealizable() {
        let v = list_entries(&Filter::parse(&["expected=violation"]).unwrap());
        for id in ["spin-octonion-case1", "spin-octonion-case2", "spin8-case4", "f4-case"] {
            assert!(v.iter().any(|e| e.id == id), "{id}");
        }
        let off = list_entries(&Filter::parse(&["realizable=false"]).unwrap());
        assert!(off.iter().any(|e| e.id == "f4-case"));
        assert!(off.iter().any(|e| e.id == "sym-e8-spin16"));
        assert!(Filter::parse(&["color=red"]).is_err());
        assert!(Filter::parse(&["expected=maybe"]).is_err());
    }

    #[test]
    fn grammar_and_ranges() {
        assert_eq!(parse_spec("sp-series:p=3").unwrap(), ("sp-series", Some(3)));
        assert_eq!(parse_spec("su3-su4-spin7").unwrap(), ("su3-su4-spin7", None));
        assert!(parse_spec("sp-series:q=3").is_err());
        assert!(parse_spec("sp-series:p=x").is_err());
        assert!(matches!(build("spin8-case4", Some(1)), Err(Error::OutOfRange { .. })));
        assert!(matches!(build("su3-su4-spin7", Some(1)), Err(Error::OutOfRange { .. })));
        assert!(matches!(build("f4-case", None), Err(Error::Unrealizable { .. })));
        assert!(matches!(build("nope", None), Err(Error::UnknownEntry(_))));
        assert_eq!(build("spin8-case4", None).unwrap().name, "spin8-case4:p=3");
    }

    #[test]
    fn export_lists_every_entry() {
        let v = export_json();
        assert_eq!(v.as_array().unwrap().len(), entries().len());
        assert_eq!(v[0]["id"], "spin7-so8");
        assert_eq!(v[0]["default_dims"]["m1"], 7);
    }
}
