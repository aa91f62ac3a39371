//! TOML run configuration.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{
    self, approximate, Atom, DirectionAtom, JumpModulator, LevyData, LevyMeasure, Modulator, RadialProduct,
    RadialProfile, SphereModulator, SphericalMeasure,
};
use crate::mc::{GaussianProblem, JumpProblem, XRule};
use crate::spectral::SampledField;
use crate::symbol::{GridSpec, Preset, SymbolSpec};

use super::files::read_field;

/// Complex number written as [re, im].
pub type Cx = [f64; 2];

fn cx(v: Cx) -> C64 {
    C64::new(v[0], v[1])
}

fn one() -> Cx {
    [1.0, 0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub z: Vec<f64>,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionConfig {
    pub theta: Vec<f64>,
    pub weight: f64,
}

fn default_r_max() -> f64 {
    levy::STABLE_R_MAX
}

fn default_order() -> usize {
    16
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureConfig {
    #[default]
    Zero,
    Atoms { atoms: Vec<AtomConfig> },
    /// Isotropic α-stable measure.
    Stable { alpha: f64 },
    Power {
        scale: f64,
        exponent: f64,
        directions: Vec<DirectionConfig>,
        #[serde(default)]
        inner: f64,
        #[serde(default = "default_r_max")]
        r_max: f64,
        #[serde(default = "default_order")]
        order: usize,
    },
    Tempered {
        scale: f64,
        alpha: f64,
        rate: f64,
        directions: Vec<DirectionConfig>,
        #[serde(default)]
        inner: f64,
        #[serde(default = "default_r_max")]
        r_max: f64,
        #[serde(default = "default_order")]
        order: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhiConfig {
    Constant { value: Cx },
    Sign {
        #[serde(default)]
        axis: usize,
    },
    HalfSpace { normal: Vec<f64> },
    Ball { radius: f64 },
    Phase { k: i32 },
    /// One value per atom, in the order of the measure's atoms.
    Table { values: Vec<Cx> },
}

impl Default for PhiConfig {
    fn default() -> Self {
        PhiConfig::Constant { value: one() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PsiConfig {
    Constant { value: Cx },
    Sign {
        #[serde(default)]
        axis: usize,
    },
    Phase { k: i32 },
    Table { values: Vec<Cx> },
}

impl Default for PsiConfig {
    fn default() -> Self {
        PsiConfig::Constant { value: one() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulatorConfig {
    #[serde(default)]
    pub phi: PhiConfig,
    #[serde(default)]
    pub psi: PsiConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolForm {
    #[default]
    Q,
    Integral,
    Limit,
    Gaussian,
    GaussianLimit,
    Stable,
    Log,
    Riesz,
}

fn unit() -> f64 {
    1.0
}

fn axis_one() -> usize {
    1
}

fn axis_two() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolConfig {
    #[serde(default)]
    pub form: SymbolForm,
    /// Scaling of both exponents in the q-form.
    #[serde(default = "unit")]
    pub u: f64,
    /// Variance scale of the Gaussian symbol.
    #[serde(default = "unit")]
    pub scale: f64,
    /// Real and imaginary parts of K, row-major; empty means the identity.
    #[serde(default)]
    pub k_re: Vec<Vec<f64>>,
    #[serde(default)]
    pub k_im: Vec<Vec<f64>>,
    /// α of the stable closed form; taken from a stable measure when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// 1-based axes of the presets.
    #[serde(default = "axis_one")]
    pub j: usize,
    #[serde(default = "axis_two")]
    pub k: usize,
    /// Replace ν, μ, φ, ψ by their ε-approximation before evaluating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl Default for SymbolConfig {
    fn default() -> Self {
        Self {
            form: SymbolForm::Q,
            u: 1.0,
            scale: 1.0,
            k_re: Vec::new(),
            k_im: Vec::new(),
            alpha: None,
            j: 1,
            k: 2,
            eps: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Box side lengths; empty means 16 on every axis.
    #[serde(default)]
    pub lengths: Vec<f64>,
    /// Points per axis; empty means 128 in one dimension and 32 otherwise.
    #[serde(default)]
    pub points: Vec<usize>,
}

fn default_ps() -> Vec<f64> {
    vec![1.25, 1.5, 2.0, 3.0, 4.0]
}

fn default_trials() -> usize {
    500
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(default = "default_ps")]
    pub p: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            p: default_ps(),
            trials: default_trials(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XRuleConfig {
    #[default]
    Subgrid,
    Spectral,
}

fn default_paths() -> usize {
    200_000
}

fn default_nodes() -> usize {
    crate::mc::DEFAULT_NODES
}

fn default_stride() -> usize {
    4
}

fn default_check_paths() -> usize {
    10_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    #[serde(default = "default_paths")]
    pub paths: usize,
    /// Paths for the martingale, isometry, subordination and moment checks.
    #[serde(default = "default_check_paths")]
    pub check_paths: usize,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub x_rule: XRuleConfig,
    /// ε for measures that are not atomic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: default_paths(),
            check_paths: default_check_paths(),
            nodes: default_nodes(),
            stride: default_stride(),
            x_rule: XRuleConfig::Subgrid,
            eps: None,
        }
    }
}

fn default_bm_paths() -> usize {
    10_000
}

fn default_steps() -> usize {
    2000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrownianConfig {
    #[serde(default = "default_bm_paths")]
    pub paths: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

impl Default for BrownianConfig {
    fn default() -> Self {
        Self {
            paths: default_bm_paths(),
            steps: default_steps(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldConfig {
    /// e^{−|x−center|²/(2σ²)}; an empty center means the origin.
    Gaussian {
        #[serde(default)]
        center: Vec<f64>,
        sigma: f64,
    },
    /// An LMFIELD1 file.
    File { path: String },
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig::Gaussian {
            center: Vec::new(),
            sigma: 1.0,
        }
    }
}

fn default_out() -> String {
    "out".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub d: usize,
    pub n: usize,
    /// d × n, as a list of rows.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    /// Drift; empty means zero.
    #[serde(default)]
    pub gamma: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: String,
    #[serde(default)]
    pub measure: MeasureConfig,
    /// Directions of the Gaussian part μ.
    #[serde(default)]
    pub gaussian: Vec<DirectionConfig>,
    #[serde(default)]
    pub modulator: ModulatorConfig,
    #[serde(default)]
    pub symbol: SymbolConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub probe: ProbeConfig,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub brownian: BrownianConfig,
    #[serde(default)]
    pub f: FieldConfig,
    #[serde(default)]
    pub g: FieldConfig,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

/// Parses, fills defaults and validates.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map(|s| line_column(text, s.start)).unwrap_or((0, 0));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    cfg.fill_defaults();
    cfg.validate().map_err(|e| match e {
        Error::Validation(_) => e,
        other => Error::Validation(Box::new(other)),
    })?;
    Ok(cfg)
}

/// TOML text that parses back to `cfg`.
pub fn emit_config(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("config serializes")
}

fn matrix(rows: &[Vec<f64>], r: usize, c: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(Error::shape(format!("{what} must have {r} rows of length {c}")));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn directions(list: &[DirectionConfig]) -> Vec<DirectionAtom> {
    list.iter().map(|d| DirectionAtom::new(d.theta.clone(), d.weight)).collect()
}

impl RunConfig {
    pub fn fill_defaults(&mut self) {
        if self.gamma.is_empty() {
            self.gamma = vec![0.0; self.n];
        }
        if self.grid.lengths.is_empty() {
            self.grid.lengths = vec![16.0; self.d];
        }
        if self.grid.points.is_empty() {
            self.grid.points = vec![if self.d == 1 { 128 } else { 32 }; self.d];
        }
        for f in [&mut self.f, &mut self.g] {
            if let FieldConfig::Gaussian { center, .. } = f {
                if center.is_empty() {
                    *center = vec![0.0; self.d];
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let data = self.levy_data()?;
        data.validate()?;
        self.modulator()?.validate(&data)?;
        self.grid()?;
        self.symbol_spec()?.validate()?;
        Ok(())
    }

    pub fn measure(&self) -> Result<LevyMeasure> {
        Ok(match &self.measure {
            MeasureConfig::Zero => LevyMeasure::zero(),
            MeasureConfig::Atoms { atoms } => {
                LevyMeasure::Atoms(atoms.iter().map(|a| Atom::new(a.z.clone(), a.w)).collect())
            }
            MeasureConfig::Stable { alpha } => LevyMeasure::ClosedFormStable {
                alpha: *alpha,
                dim: self.n,
            },
            MeasureConfig::Power {
                scale,
                exponent,
                directions: dirs,
                inner,
                r_max,
                order,
            } => LevyMeasure::RadialProduct(RadialProduct {
                profile: RadialProfile::Power {
                    scale: *scale,
                    exponent: *exponent,
                },
                directions: directions(dirs),
                inner: *inner,
                r_max: *r_max,
                order: *order,
            }),
            MeasureConfig::Tempered {
                scale,
                alpha,
                rate,
                directions: dirs,
                inner,
                r_max,
                order,
            } => LevyMeasure::RadialProduct(RadialProduct {
                profile: RadialProfile::Tempered {
                    scale: *scale,
                    alpha: *alpha,
                    rate: *rate,
                },
                directions: directions(dirs),
                inner: *inner,
                r_max: *r_max,
                order: *order,
            }),
        })
    }

    pub fn matrix_a(&self) -> Result<DMatrix<f64>> {
        matrix(&self.a, self.d, self.n, "A")
    }

    pub fn matrix_b(&self) -> Result<DMatrix<f64>> {
        matrix(&self.b, self.d, self.n, "B")
    }

    pub fn levy_data(&self) -> Result<LevyData> {
        let mut data = LevyData::with_measure(self.n, self.measure()?);
        data.d = self.d;
        data.a = self.matrix_a()?;
        data.b = self.matrix_b()?;
        data.gamma = self.gamma.clone();
        data.mu = SphericalMeasure::new(directions(&self.gaussian));
        Ok(data)
    }

    pub fn modulator(&self) -> Result<Modulator> {
        let phi = match &self.modulator.phi {
            PhiConfig::Constant { value } => JumpModulator::Constant(cx(*value)),
            PhiConfig::Sign { axis } => JumpModulator::Sign { axis: *axis },
            PhiConfig::HalfSpace { normal } => JumpModulator::HalfSpace { normal: normal.clone() },
            PhiConfig::Ball { radius } => JumpModulator::Ball { radius: *radius },
            PhiConfig::Phase { k } => JumpModulator::Phase { k: *k },
            PhiConfig::Table { values } => JumpModulator::Table {
                values: values.iter().map(|v| cx(*v)).collect(),
                elsewhere: None,
            },
        };
        let psi = match &self.modulator.psi {
            PsiConfig::Constant { value } => SphereModulator::Constant(cx(*value)),
            PsiConfig::Sign { axis } => SphereModulator::Sign { axis: *axis },
            PsiConfig::Phase { k } => SphereModulator::Phase { k: *k },
            PsiConfig::Table { values } => SphereModulator::Table(values.iter().map(|v| cx(*v)).collect()),
        };
        Ok(Modulator { phi, psi })
    }

    pub fn grid(&self) -> Result<GridSpec> {
        if self.grid.lengths.len() != self.d || self.grid.points.len() != self.d {
            return Err(Error::shape(format!("grid needs {} lengths and point counts", self.d)));
        }
        GridSpec::new(self.grid.lengths.clone(), self.grid.points.clone())
    }

    /// K, identity when not given.
    pub fn k_matrix(&self) -> Result<DMatrix<C64>> {
        let n = self.n;
        let s = &self.symbol;
        if s.k_re.is_empty() && s.k_im.is_empty() {
            return Ok(DMatrix::identity(n, n));
        }
        let re = if s.k_re.is_empty() { DMatrix::zeros(n, n) } else { matrix(&s.k_re, n, n, "k_re")? };
        let im = if s.k_im.is_empty() { DMatrix::zeros(n, n) } else { matrix(&s.k_im, n, n, "k_im")? };
        Ok(DMatrix::from_fn(n, n, |i, j| C64::new(re[(i, j)], im[(i, j)])))
    }

    /// Data and modulator after the optional ε-approximation.
    pub fn effective(&self, eps: Option<f64>) -> Result<(LevyData, Modulator)> {
        let data = self.levy_data()?;
        let modulator = self.modulator()?;
        match eps {
            None => Ok((data, modulator)),
            Some(e) => {
                let ap = approximate(&data, &modulator, e)?;
                Ok((ap.data, ap.modulator))
            }
        }
    }

    pub fn symbol_spec(&self) -> Result<SymbolSpec> {
        let s = &self.symbol;
        let spec = match s.form {
            SymbolForm::Q | SymbolForm::Integral | SymbolForm::Limit => {
                let (data, modulator) = self.effective(s.eps)?;
                match s.form {
                    SymbolForm::Q => SymbolSpec::QForm { data, modulator, u: s.u },
                    SymbolForm::Integral => SymbolSpec::IntegralForm { data, modulator },
                    _ => SymbolSpec::LimitForm { data, modulator },
                }
            }
            SymbolForm::Gaussian => SymbolSpec::GaussianForm {
                a: self.matrix_a()?,
                b: self.matrix_b()?,
                k: self.k_matrix()?,
                scale: s.scale,
            },
            SymbolForm::GaussianLimit => SymbolSpec::GaussianLimitForm {
                a: self.matrix_a()?,
                k: self.k_matrix()?,
            },
            SymbolForm::Stable => {
                let alpha = match (s.alpha, &self.measure) {
                    (Some(a), _) => a,
                    (None, MeasureConfig::Stable { alpha }) => *alpha,
                    _ => return Err(Error::invalid("stable symbol needs symbol.alpha or a stable measure")),
                };
                SymbolSpec::StableClosedForm { alpha }
            }
            SymbolForm::Log => SymbolSpec::NamedPreset {
                preset: Preset::Log,
                d: self.d,
                j: s.j,
                k: s.k,
            },
            SymbolForm::Riesz => SymbolSpec::NamedPreset {
                preset: Preset::Riesz,
                d: self.d,
                j: s.j,
                k: s.k,
            },
        };
        Ok(spec)
    }

    fn field(&self, which: &FieldConfig) -> Result<SampledField> {
        let grid = self.grid()?;
        match which {
            FieldConfig::Gaussian { center, sigma } => {
                if center.len() != self.d {
                    return Err(Error::shape("field center must have d coordinates"));
                }
                SampledField::gaussian(grid, center, *sigma)
            }
            FieldConfig::File { path } => {
                let f = read_field(std::fs::File::open(path)?)?;
                grid.ensure_same(&f.grid)?;
                Ok(f)
            }
        }
    }

    pub fn field_f(&self) -> Result<SampledField> {
        self.field(&self.f)
    }

    pub fn field_g(&self) -> Result<SampledField> {
        self.field(&self.g)
    }

    pub fn x_rule(&self) -> XRule {
        match self.mc.x_rule {
            XRuleConfig::Subgrid => XRule::SubGrid { stride: self.mc.stride },
            XRuleConfig::Spectral => XRule::Spectral,
        }
    }

    /// Atomic problem for the jump simulation; non-atomic measures are
    /// replaced by their ε-approximation (mc.eps, else symbol.eps).
    pub fn jump_problem(&self) -> Result<JumpProblem> {
        let atomic = matches!(self.measure, MeasureConfig::Atoms { .. } | MeasureConfig::Zero) && self.gaussian.is_empty();
        let eps = if atomic { None } else { self.mc.eps.or(self.symbol.eps) };
        if !atomic && eps.is_none() {
            return Err(Error::RequiresFiniteMeasure);
        }
        let (data, modulator) = self.effective(eps)?;
        if !matches!(data.nu, LevyMeasure::Atoms(_)) {
            return Err(Error::RequiresFiniteMeasure);
        }
        Ok(JumpProblem {
            data,
            phi: modulator.phi,
            f: self.field_f()?,
            g: self.field_g()?,
        })
    }

    pub fn gaussian_problem(&self) -> Result<GaussianProblem> {
        Ok(GaussianProblem {
            a: self.matrix_a()?,
            b: self.matrix_b()?,
            k: self.k_matrix()?,
            f: self.field_f()?,
            g: self.field_g()?,
        })
    }
}
