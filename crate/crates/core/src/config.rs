//! Experiment configuration: a TOML document with strict validation and
//! registry lookups for metrics, weights and domains.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bergman::PlanarDomain;
use crate::error::{Error, Result};
use crate::field::{AffineRe, Constant, NormSquared, SharedScalar};
use crate::linalg::{c, C64};
use crate::metric::SharedMetric;
use crate::models::{Conformal, Euclidean, FubiniStudy, HopfChart, HopfMetric, ProductMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    GeometryVerify,
    DfSweep,
    Bkmkh,
    Bergman,
    Twisted,
    Detraz,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::GeometryVerify => "geometry-verify",
            Self::DfSweep => "df-sweep",
            Self::Bkmkh => "bkmkh",
            Self::Bergman => "bergman",
            Self::Twisted => "twisted",
            Self::Detraz => "detraz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A registry name plus its parameters. Which parameters are allowed depends
/// on the name; see [`resolve_metric`], [`resolve_weight`] and the domain
/// resolvers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistrySpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Hopf dilation factor as `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_in: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_out: Option<f64>,
    /// Conformal factor `e^{scale |z|²}`, or the scale of a weight.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Coefficients `[re, im]` of `Re(Σ a_j z_j)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<RegistrySpec>>,
}

impl RegistrySpec {
    pub fn named(name: &str) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    fn allow(&self, what: &str, keys: &[&str]) -> Result<()> {
        let present = [
            ("n", self.n.is_some()),
            ("a", self.a.is_some()),
            ("radius", self.radius.is_some()),
            ("r_in", self.r_in.is_some()),
            ("r_out", self.r_out.is_some()),
            ("scale", self.scale.is_some()),
            ("coeffs", self.coeffs.is_some()),
            ("factors", self.factors.is_some()),
        ];
        for (k, set) in present {
            if set && !keys.contains(&k) {
                return Err(Error::Schema(format!("{what} `{}` does not take `{k}`", self.name)));
            }
        }
        Ok(())
    }

    fn dim(&self, default: usize) -> Result<usize> {
        match self.n.unwrap_or(default) {
            0 => Err(Error::Schema(format!("`{}` needs n >= 1", self.name))),
            n => Ok(n),
        }
    }
}

/// Tolerances; unset entries take the defaults of the experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub differential: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commutator: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decrease: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factorization: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<f64>,
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, Option<f64>); 10] {
        [
            ("closed_form", self.closed_form),
            ("torsion", self.torsion),
            ("positivity", self.positivity),
            ("differential", self.differential),
            ("commutator", self.commutator),
            ("residual", self.residual),
            ("decrease", self.decrease),
            ("projection", self.projection),
            ("factorization", self.factorization),
            ("stability", self.stability),
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<RegistrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<RegistrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<RegistrySpec>,
    /// Weights of the commutator matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<RegistrySpec>>,
    /// Random points for pointwise checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Points for the finite-difference identities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_points: Option<usize>,
    /// Grid points per axis of a df sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hopf_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolutions: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub etas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_values: Option<Vec<f64>>,
    /// Polynomial degree of the truncated holomorphic space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_size: Option<usize>,
    /// Exponents `m` of the holomorphic data `z^m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomials: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u32>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    /// Minimal configuration of a kind; everything else takes defaults.
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            seed: 0,
            slack: None,
            metric: None,
            domain: None,
            weight: None,
            weights: None,
            points: None,
            check_points: None,
            grid: None,
            hopf_points: None,
            resolutions: None,
            etas: None,
            s_values: None,
            degree: None,
            family_size: None,
            monomials: None,
            m_max: None,
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Schema(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Schema(e.to_string()))
    }

    /// Checks values and registry names without running anything.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.tolerances.entries() {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Schema(format!("tolerance `{name}` must be positive, got {v}")));
                }
            }
        }
        if let Some(s) = self.slack {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::Schema(format!("slack must be non-negative, got {s}")));
            }
        }
        if let Some(etas) = &self.etas {
            if etas.is_empty() || etas.iter().any(|e| !(0.0..=1.0).contains(e)) {
                return Err(Error::Schema("etas must be a non-empty list in [0, 1]".into()));
            }
        }
        if let Some(s) = &self.s_values {
            if s.is_empty() || s.iter().any(|s| !(*s > 0.0 && *s < 0.5)) {
                return Err(Error::Schema("s_values must be a non-empty list in (0, 1/2)".into()));
            }
        }
        if let Some(r) = &self.resolutions {
            if r.is_empty() || r.iter().any(|&r| r < 4) {
                return Err(Error::Schema("resolutions must be a non-empty list of values >= 4".into()));
            }
        }
        for (name, v) in [
            ("points", self.points),
            ("check_points", self.check_points),
            ("grid", self.grid),
            ("hopf_points", self.hopf_points),
            ("degree", self.degree),
            ("family_size", self.family_size),
        ] {
            if v == Some(0) {
                return Err(Error::Schema(format!("`{name}` must be positive")));
            }
        }
        if let Some(m) = &self.metric {
            resolve_metric(m)?;
        }
        if let Some(w) = &self.weight {
            let n = self.metric.as_ref().map(|m| metric_dim(m)).transpose()?.unwrap_or(1);
            resolve_weight(w, n)?;
        }
        if let Some(ws) = &self.weights {
            let n = self.metric.as_ref().map(|m| metric_dim(m)).transpose()?.unwrap_or(1);
            for w in ws {
                resolve_weight(w, n)?;
            }
        }
        if let Some(d) = &self.domain {
            match self.kind {
                ExperimentKind::Bergman | ExperimentKind::Twisted | ExperimentKind::Detraz => {
                    resolve_planar_domain(d)?;
                }
                _ => {
                    resolve_defining(d)?;
                }
            }
        }
        Ok(())
    }
}

/// Complex dimension of a metric entry.
pub fn metric_dim(spec: &RegistrySpec) -> Result<usize> {
    match spec.name.as_str() {
        "product" => {
            let f = spec.factors.as_deref().unwrap_or_default();
            f.iter().map(metric_dim).sum()
        }
        "euclidean" | "hopf" | "fubini-study" | "conformal" => spec.dim(2),
        other => Err(Error::UnknownRegistryEntry(format!("metric `{other}`"))),
    }
}

/// `euclidean{n}`, `hopf{n, a}`, `fubini-study{n}`, `conformal{n, scale}`
/// (`e^{scale |z|²} I`) and `product{factors}`.
pub fn resolve_metric(spec: &RegistrySpec) -> Result<SharedMetric> {
    match spec.name.as_str() {
        "euclidean" => {
            spec.allow("metric", &["n"])?;
            Ok(Arc::new(Euclidean::new(spec.dim(2)?)))
        }
        "hopf" => {
            spec.allow("metric", &["n", "a"])?;
            hopf_chart(spec)?;
            Ok(Arc::new(HopfMetric::new(spec.dim(2)?)))
        }
        "fubini-study" => {
            spec.allow("metric", &["n"])?;
            Ok(Arc::new(FubiniStudy::new(spec.dim(2)?)))
        }
        "conformal" => {
            spec.allow("metric", &["n", "scale"])?;
            let n = spec.dim(2)?;
            let phi: SharedScalar = Arc::new(ScaledNormSquared { n, scale: spec.scale.unwrap_or(1.0) });
            Ok(Arc::new(Conformal::new(phi)))
        }
        "product" => {
            spec.allow("metric", &["factors"])?;
            let factors = spec.factors.as_deref().unwrap_or_default();
            if factors.is_empty() {
                return Err(Error::Schema("product metric needs at least one factor".into()));
            }
            let resolved = factors.iter().map(resolve_metric).collect::<Result<Vec<_>>>()?;
            Ok(Arc::new(ProductMetric::new(resolved)))
        }
        other => Err(Error::UnknownRegistryEntry(format!("metric `{other}`"))),
    }
}

/// Fundamental annulus of a Hopf entry.
pub fn hopf_chart(spec: &RegistrySpec) -> Result<HopfChart> {
    let n = spec.dim(2)?;
    match spec.a {
        None => Ok(HopfChart::standard(n)),
        Some([re, im]) => HopfChart::new(n, c(re, im)).map_err(|e| Error::Schema(e.to_string())),
    }
}

/// `zero`, `norm-squared{scale}` (`scale |z|²`) and `re-linear{coeffs}`
/// (`Re(Σ a_j z_j)`).
pub fn resolve_weight(spec: &RegistrySpec, n: usize) -> Result<SharedScalar> {
    match spec.name.as_str() {
        "zero" => {
            spec.allow("weight", &[])?;
            Ok(Arc::new(Constant::new(n, 0.0)))
        }
        "norm-squared" => {
            spec.allow("weight", &["scale"])?;
            match spec.scale {
                None => Ok(Arc::new(NormSquared::new(n))),
                Some(scale) => Ok(Arc::new(ScaledNormSquared { n, scale })),
            }
        }
        "re-linear" => {
            spec.allow("weight", &["coeffs"])?;
            let coeffs: Vec<C64> = spec.coeffs.as_deref().unwrap_or_default().iter().map(|[a, b]| c(*a, *b)).collect();
            if coeffs.len() != n {
                return Err(Error::Schema(format!("re-linear weight needs {n} coefficients, got {}", coeffs.len())));
            }
            Ok(Arc::new(AffineRe::new(coeffs, 0.0)))
        }
        other => Err(Error::UnknownRegistryEntry(format!("weight `{other}`"))),
    }
}

/// Domains of the df sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum DefiningDomain {
    /// `D × ℍ^{n−1}`.
    Product { n: usize },
    Ball { n: usize, radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
    /// The planar square with the Lipschitz defining function.
    Square,
}

pub fn resolve_defining(spec: &RegistrySpec) -> Result<DefiningDomain> {
    match spec.name.as_str() {
        "product" => {
            spec.allow("domain", &["n"])?;
            let n = spec.dim(2)?;
            if n < 2 {
                return Err(Error::Schema("product domain needs n >= 2".into()));
            }
            Ok(DefiningDomain::Product { n })
        }
        "ball" => {
            spec.allow("domain", &["n", "radius"])?;
            let radius = spec.radius.unwrap_or(1.0);
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::Schema(format!("ball radius must be positive, got {radius}")));
            }
            Ok(DefiningDomain::Ball { n: spec.dim(2)?, radius })
        }
        "annulus" => {
            spec.allow("domain", &["r_in", "r_out"])?;
            let (r_in, r_out) = (spec.r_in.unwrap_or(0.5), spec.r_out.unwrap_or(1.0));
            if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) {
                return Err(Error::Schema(format!("annulus needs 0 < r_in < r_out, got {r_in}, {r_out}")));
            }
            Ok(DefiningDomain::Annulus { r_in, r_out })
        }
        "square-domain" => {
            spec.allow("domain", &[])?;
            Ok(DefiningDomain::Square)
        }
        other => Err(Error::UnknownRegistryEntry(format!("domain `{other}`"))),
    }
}

/// `disc{radius}` and `square`.
pub fn resolve_planar_domain(spec: &RegistrySpec) -> Result<PlanarDomain> {
    match spec.name.as_str() {
        "disc" => {
            spec.allow("domain", &["radius"])?;
            let radius = spec.radius.unwrap_or(1.0);
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::Schema(format!("disc radius must be positive, got {radius}")));
            }
            Ok(PlanarDomain::Disc { radius })
        }
        "square" => {
            spec.allow("domain", &[])?;
            Ok(PlanarDomain::Square)
        }
        other => Err(Error::UnknownRegistryEntry(format!("domain `{other}`"))),
    }
}

/// `scale · |z|²`.
#[derive(Debug, Clone)]
struct ScaledNormSquared {
    n: usize,
    scale: f64,
}

impl crate::field::ScalarField for ScaledNormSquared {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[C64]) -> Result<C64> {
        Ok(crate::linalg::cr(self.scale * z.iter().map(|v| v.norm_sqr()).sum::<f64>()))
    }
    fn gradient(&self, z: &[C64]) -> Option<Result<crate::field::Gradient>> {
        Some(Ok(crate::field::Gradient {
            dz: z.iter().map(|v| v.conj() * self.scale).collect(),
            dzbar: z.iter().map(|v| v * self.scale).collect(),
        }))
    }
    fn hessian(&self, _z: &[C64]) -> Option<Result<crate::linalg::CMat>> {
        Some(Ok(crate::linalg::CMat::identity(self.n, self.n) * crate::linalg::cr(self.scale)))
    }
    fn label(&self) -> String {
        format!("{}|z|^2", self.scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let cfg = ExperimentConfig::from_toml_str("kind = \"geometry-verify\"\nmetric = { name = \"hopf\", n = 3 }\n").unwrap();
        assert_eq!(cfg.kind, ExperimentKind::GeometryVerify);
        assert_eq!(metric_dim(cfg.metric.as_ref().unwrap()).unwrap(), 3);
        let err = ExperimentConfig::from_toml_str("kind = \"geometry-verify\"\nmetric = { name = \"kerr\" }\n").unwrap_err();
        assert!(matches!(err, Error::UnknownRegistryEntry(_)));
        let err = ExperimentConfig::from_toml_str("kind = \"bergman\"\ncolour = 3\n").unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
        let err = ExperimentConfig::from_toml_str("kind = \"bergman\"\n[tolerances]\nresidual = 0.0\n").unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
        let err = ExperimentConfig::from_toml_str("kind = \"bergman\"\ndomain = { name = \"disc\", n = 2 }\n").unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
