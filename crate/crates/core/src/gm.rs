//! One entry point for every matching method, built-in or user-supplied.
//!
//! A method is anything implementing [`MatchMethod`]. The built-ins are the variants of
//! [`Method`]; closures with the matching signature work as well, which is how custom
//! algorithms plug in. Whatever the method, [`gm`] checks that the result belongs to the input
//! graphs and keeps the hard seeds.

use std::fmt;

use nalgebra::DMatrix;

use crate::frame::{MatchResult, SeedSet};
use crate::graph::Layers;
use crate::lap::LapMethod;
use crate::percolation::{gm_expand_when_stuck, gm_percolation, DEFAULT_R};
use crate::relax::{gm_fw, gm_path, FwConfig, ObjectiveKind, PathConfig, RelaxProblem};
use crate::spectral::{gm_isorank, gm_umeyama, IsoRankConfig};
use crate::{Error, Result};

/// A graph matching algorithm.
pub trait MatchMethod {
    fn run(
        &self,
        a: &Layers,
        b: &Layers,
        seeds: &SeedSet,
        similarity: Option<&DMatrix<f64>>,
    ) -> Result<MatchResult>;
}

impl<F> MatchMethod for F
where
    F: Fn(&Layers, &Layers, &SeedSet, Option<&DMatrix<f64>>) -> Result<MatchResult>,
{
    fn run(
        &self,
        a: &Layers,
        b: &Layers,
        seeds: &SeedSet,
        similarity: Option<&DMatrix<f64>>,
    ) -> Result<MatchResult> {
        self(a, b, seeds, similarity)
    }
}

/// Built-in methods with their settings.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Indefinite(FwConfig),
    Convex(FwConfig),
    Path(PathConfig),
    Percolation { r: f64 },
    ExpandWhenStuck { r: f64 },
    IsoRank(IsoRankConfig),
    Umeyama { lap_method: LapMethod },
}

impl Method {
    pub const NAMES: [&'static str; 7] =
        ["indefinite", "convex", "path", "percolation", "expand", "isorank", "umeyama"];

    /// The method called `name`, with default settings.
    pub fn from_name(name: &str) -> Result<Method> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "indefinite" => Method::Indefinite(FwConfig::default()),
            "convex" => Method::Convex(FwConfig::default()),
            "path" => Method::Path(PathConfig::default()),
            "percolation" => Method::Percolation { r: DEFAULT_R },
            "expand" | "expandwhenstuck" | "expand_when_stuck" => Method::ExpandWhenStuck { r: DEFAULT_R },
            "isorank" => Method::IsoRank(IsoRankConfig::default()),
            "umeyama" => Method::Umeyama { lap_method: LapMethod::Dense },
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown method '{name}' (expected one of {})",
                    Method::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Indefinite(_) => "indefinite",
            Method::Convex(_) => "convex",
            Method::Path(_) => "path",
            Method::Percolation { .. } => "percolation",
            Method::ExpandWhenStuck { .. } => "expand",
            Method::IsoRank(_) => "isorank",
            Method::Umeyama { .. } => "umeyama",
        }
    }

    /// Whether results carry a soft matrix.
    pub fn has_soft(&self) -> bool {
        !matches!(self, Method::Percolation { .. } | Method::ExpandWhenStuck { .. })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl MatchMethod for Method {
    fn run(
        &self,
        a: &Layers,
        b: &Layers,
        seeds: &SeedSet,
        similarity: Option<&DMatrix<f64>>,
    ) -> Result<MatchResult> {
        let relax = |kind| RelaxProblem::new(a.clone(), b.clone(), seeds.clone(), similarity.cloned(), kind);
        match self {
            Method::Indefinite(c) => gm_fw(&relax(ObjectiveKind::Indefinite)?, c),
            Method::Convex(c) => gm_fw(&relax(ObjectiveKind::Convex)?, c),
            Method::Path(c) => gm_path(&relax(ObjectiveKind::Path { lambda: 0.0 })?, c),
            Method::Percolation { r } => gm_percolation(a.clone(), b.clone(), seeds, similarity, *r),
            Method::ExpandWhenStuck { r } => {
                gm_expand_when_stuck(a.clone(), b.clone(), seeds, similarity, *r)
            }
            Method::IsoRank(c) => gm_isorank(a.clone(), b.clone(), seeds, similarity, c),
            Method::Umeyama { lap_method } => {
                gm_umeyama(a.clone(), b.clone(), seeds, similarity, *lap_method)
            }
        }
    }
}

/// Matches `a` to `b` with `method`.
pub fn gm(
    a: impl Into<Layers>,
    b: impl Into<Layers>,
    seeds: &SeedSet,
    similarity: Option<&DMatrix<f64>>,
    method: &dyn MatchMethod,
) -> Result<MatchResult> {
    let (a, b) = (a.into(), b.into());
    a.validate("A")?;
    b.validate("B")?;
    let (na, nb) = (a.n(), b.n());
    for &(i, j) in seeds.pairs() {
        if i >= na {
            return Err(Error::VertexOutOfRange { vertex: i, n: na });
        }
        if j >= nb {
            return Err(Error::VertexOutOfRange { vertex: j, n: nb });
        }
    }
    let m = method.run(&a, &b, seeds, similarity)?;
    if m.nnodes() != (na, nb) {
        return Err(Error::InvalidArgument(format!(
            "method returned a match for orders {:?}, expected ({na}, {nb})",
            m.nnodes()
        )));
    }
    let kept = m.seeds();
    if seeds.pairs().iter().any(|&p| !kept.contains(p)) {
        return Err(Error::InvalidArgument(
            "method result does not keep the hard seeds".into(),
        ));
    }
    Ok(m)
}
