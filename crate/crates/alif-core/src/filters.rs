//! Averaging filters `k` and window-length functions `L`.
//!
//! A filter is an even, nonnegative function supported on `[-1, 1]`; the
//! length function gives the (grid-units) window width per position in
//! `[0, 1]`. Together they define every iteration matrix: row `i` applies the
//! rescaled kernel `k(. / L(x_i)) / L(x_i)`.
//!
//! Uniform, triangular, and piecewise-linear constructions carry an exact
//! rational evaluation path alongside the `f64` one, so the tabulated fixture
//! filters reproduce their node values bit-for-bit.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::fmath;
use crate::rational::Ratio;

/// Validation grid size on `[-1, 1]` (also used for quadrature fallbacks and
/// for bounding continuous length functions).
pub const VALIDATION_GRID: usize = 10_001;

#[derive(Clone, Debug, PartialEq)]
pub enum FilterError {
    EmptyNodes,
    UnsortedNodes,
    NegativeNodeValue,
    NodeOutOfRange,
    /// A node at abscissa 1 must carry value 0 (support boundary).
    SupportEndpointNotZero,
    ZeroMass,
    NonpositiveLength,
    UnsortedBreakpoints,
    BreakpointOutOfRange,
    LengthCountMismatch,
    TooFewExtrema,
    NotRepresentable,
}

impl fmt::Display for FilterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            FilterError::EmptyNodes => "node list is empty",
            FilterError::UnsortedNodes => "node abscissas must be strictly increasing",
            FilterError::NegativeNodeValue => "node values must be nonnegative",
            FilterError::NodeOutOfRange => "node abscissas must lie in [0, 1]",
            FilterError::SupportEndpointNotZero => "a node at abscissa 1 must have value 0",
            FilterError::ZeroMass => "filter has zero L1 mass",
            FilterError::NonpositiveLength => "length values must be strictly positive",
            FilterError::UnsortedBreakpoints => "breakpoints must be strictly increasing",
            FilterError::BreakpointOutOfRange => "breakpoints must lie in (0, 1)",
            FilterError::LengthCountMismatch => "need exactly one more value than breakpoints",
            FilterError::TooFewExtrema => "signal needs at least 2 strict extrema",
            FilterError::NotRepresentable => "value not representable as an exact rational",
        };
        f.write_str(msg)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FilterError {}

/// One node of a piecewise-linear filter, stored exactly and mirrored in f64.
#[derive(Clone, Debug, PartialEq)]
pub struct PwlNode {
    pub x: Ratio,
    pub v: Ratio,
    pub xf: f64,
    pub vf: f64,
}

#[derive(Clone)]
enum FilterShape {
    /// Indicator of `[-1/2, 1/2]` (endpoints included).
    Uniform,
    /// `max(1 - |y|, 0)`.
    Triangular,
    /// Even extension of a piecewise-linear interpolant on `[0, 1]`,
    /// zero outside `[-1, 1]`. Nodes cover `[0, 1]` with `v(1) = 0`.
    Pwl(Arc<Vec<PwlNode>>),
    /// Arbitrary evaluable; no exact path, mass by trapezoid quadrature.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Construction metadata, sufficient to rebuild the filter for the
/// serializable shapes (piecewise-linear nodes carry the scale folded in).
#[derive(Clone, Debug, PartialEq)]
pub enum FilterDescriptor {
    Uniform { scale: f64 },
    Triangular { scale: f64 },
    PiecewiseLinear { nodes: Vec<(f64, f64)> },
    Custom,
}

impl FilterDescriptor {
    /// Rebuild the filter this descriptor came from. `None` for opaque
    /// custom evaluables.
    pub fn build(&self) -> Option<Filter> {
        match self {
            FilterDescriptor::Uniform { scale } => Some(Filter::uniform().scaled(*scale)),
            FilterDescriptor::Triangular { scale } => Some(Filter::triangular().scaled(*scale)),
            FilterDescriptor::PiecewiseLinear { nodes } => Filter::piecewise_linear(nodes).ok(),
            FilterDescriptor::Custom => None,
        }
    }
}

/// An even, nonnegative kernel supported on `[-1, 1]`.
#[derive(Clone)]
pub struct Filter {
    shape: FilterShape,
    /// Multiplicative factor applied to the shape (1 unless rescaled).
    scale: f64,
    scale_exact: Option<Ratio>,
    sup_abs: f64,
    l1_mass: f64,
    l1_mass_exact: Option<Ratio>,
    normalized: bool,
}

impl fmt::Debug for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Filter")
            .field("descriptor", &self.descriptor())
            .field("scale", &self.scale)
            .field("sup_abs", &self.sup_abs)
            .field("l1_mass", &self.l1_mass)
            .field("normalized", &self.normalized)
            .finish()
    }
}

impl Filter {
    /// The indicator of `[-1/2, 1/2]`: unit mass, `k(0) = 1`.
    pub fn uniform() -> Filter {
        Filter {
            shape: FilterShape::Uniform,
            scale: 1.0,
            scale_exact: Some(Ratio::ONE),
            sup_abs: 1.0,
            l1_mass: 1.0,
            l1_mass_exact: Some(Ratio::ONE),
            normalized: true,
        }
    }

    /// The hat kernel `max(1 - |y|, 0)`: unit mass, `k(0) = 1`, `k(+-1) = 0`.
    pub fn triangular() -> Filter {
        Filter {
            shape: FilterShape::Triangular,
            scale: 1.0,
            scale_exact: Some(Ratio::ONE),
            sup_abs: 1.0,
            l1_mass: 1.0,
            l1_mass_exact: Some(Ratio::ONE),
            normalized: true,
        }
    }

    /// Piecewise-linear filter through the given `(abscissa, value)` nodes on
    /// `[0, 1]`, extended evenly to `[-1, 0]` and by zero outside `[-1, 1]`.
    ///
    /// The interpolant passes through `(0, v_first)` (flat prepend when the
    /// first abscissa is positive) and `(1, 0)` (appended when absent). Every
    /// finite `f64` is dyadic, so node arithmetic stays exact.
    pub fn piecewise_linear(nodes: &[(f64, f64)]) -> Result<Filter, FilterError> {
        let exact: Result<Vec<(Ratio, Ratio)>, FilterError> = nodes
            .iter()
            .map(|&(x, v)| match (Ratio::from_f64(x), Ratio::from_f64(v)) {
                (Some(xr), Some(vr)) => Ok((xr, vr)),
                _ => Err(FilterError::NotRepresentable),
            })
            .collect();
        Filter::piecewise_linear_exact(&exact?)
    }

    /// Exact-rational variant of [`Filter::piecewise_linear`]; the fixture
    /// tables go through here so nodes like `357/190` stay exact.
    pub fn piecewise_linear_exact(nodes: &[(Ratio, Ratio)]) -> Result<Filter, FilterError> {
        if nodes.is_empty() {
            return Err(FilterError::EmptyNodes);
        }
        for w in nodes.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(FilterError::UnsortedNodes);
            }
        }
        let one = Ratio::ONE;
        for &(x, v) in nodes {
            if x.is_negative() || x > one {
                return Err(FilterError::NodeOutOfRange);
            }
            if v.is_negative() {
                return Err(FilterError::NegativeNodeValue);
            }
            if x == one && !v.is_zero() {
                return Err(FilterError::SupportEndpointNotZero);
            }
        }

        let mut full: Vec<(Ratio, Ratio)> = Vec::with_capacity(nodes.len() + 2);
        if !nodes[0].0.is_zero() {
            full.push((Ratio::ZERO, nodes[0].1));
        }
        full.extend_from_slice(nodes);
        if full.last().unwrap().0 != one {
            full.push((one, Ratio::ZERO));
        }

        let nodes: Vec<PwlNode> = full
            .into_iter()
            .map(|(x, v)| PwlNode {
                x,
                v,
                xf: x.to_f64(),
                vf: v.to_f64(),
            })
            .collect();

        // Half-mass by exact trapezoids on [0, 1]; the even extension doubles it.
        let mut half = Ratio::ZERO;
        for w in nodes.windows(2) {
            let width = w[1].x - w[0].x;
            let avg = (w[0].v + w[1].v) / Ratio::from_integer(2);
            half = half + width * avg;
        }
        let mass = Ratio::from_integer(2) * half;
        let sup = nodes.iter().map(|n| n.v).max().unwrap_or(Ratio::ZERO);

        if mass.is_zero() {
            return Err(FilterError::ZeroMass);
        }
        let massf = mass.to_f64();
        Ok(Filter {
            shape: FilterShape::Pwl(Arc::new(nodes)),
            scale: 1.0,
            scale_exact: Some(Ratio::ONE),
            sup_abs: sup.to_f64(),
            l1_mass: massf,
            l1_mass_exact: Some(mass),
            normalized: fmath::abs(massf - 1.0) <= 1e-6,
        })
    }

    /// Filter from an arbitrary evaluable. The caller is responsible for
    /// evenness/support; [`Filter::validate`] reports violations. Mass is
    /// estimated by composite trapezoid on the fixed validation grid.
    pub fn custom(eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>) -> Result<Filter, FilterError> {
        let mut mass = 0.0;
        let mut sup: f64 = 0.0;
        let h = 2.0 / (VALIDATION_GRID - 1) as f64;
        for i in 0..VALIDATION_GRID {
            let y = -1.0 + h * i as f64;
            let v = eval(y);
            sup = sup.max(fmath::abs(v));
            let w = if i == 0 || i == VALIDATION_GRID - 1 {
                0.5
            } else {
                1.0
            };
            mass += w * v;
        }
        mass *= h;
        if !(mass > 0.0) {
            return Err(FilterError::ZeroMass);
        }
        Ok(Filter {
            shape: FilterShape::Custom(eval),
            scale: 1.0,
            scale_exact: Some(Ratio::ONE),
            sup_abs: sup,
            l1_mass: mass,
            l1_mass_exact: None,
            normalized: fmath::abs(mass - 1.0) <= 1e-6,
        })
    }

    /// Evaluate `k(y)`. Zero whenever `|y| >= 1` (support containment).
    pub fn evaluate(&self, y: f64) -> f64 {
        let a = fmath::abs(y);
        if a > 1.0 {
            return 0.0;
        }
        let raw = match &self.shape {
            FilterShape::Uniform => {
                if a <= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            FilterShape::Triangular => (1.0 - a).max(0.0),
            FilterShape::Pwl(nodes) => pwl_eval_f64(nodes, a),
            FilterShape::Custom(f) => {
                if a >= 1.0 {
                    0.0
                } else {
                    f(y)
                }
            }
        };
        raw * self.scale
    }

    /// Exact-rational evaluation, available for the uniform, triangular, and
    /// piecewise-linear shapes (with exact scale).
    pub fn evaluate_rational(&self, y: &Ratio) -> Option<Ratio> {
        let scale = self.scale_exact?;
        let a = y.abs();
        let one = Ratio::ONE;
        if a >= one {
            return Some(Ratio::ZERO);
        }
        let raw = match &self.shape {
            FilterShape::Uniform => {
                if a <= Ratio::new(1, 2) {
                    Ratio::ONE
                } else {
                    Ratio::ZERO
                }
            }
            FilterShape::Triangular => one - a,
            FilterShape::Pwl(nodes) => pwl_eval_exact(nodes, &a)?,
            FilterShape::Custom(_) => return None,
        };
        Some(raw * scale)
    }

    /// Cached `||k||_inf`.
    pub fn sup_abs(&self) -> f64 {
        self.sup_abs * self.scale
    }

    /// Cached `||k||_1`.
    pub fn l1_mass(&self) -> f64 {
        self.l1_mass * self.scale
    }

    /// Exact `||k||_1` when the construction admits one.
    pub fn l1_mass_exact(&self) -> Option<Ratio> {
        Some(self.l1_mass_exact? * self.scale_exact?)
    }

    /// Whether the construction was flagged normalized (`| ||k||_1 - 1 | <= 1e-6`).
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn descriptor(&self) -> FilterDescriptor {
        match &self.shape {
            FilterShape::Uniform => FilterDescriptor::Uniform { scale: self.scale },
            FilterShape::Triangular => FilterDescriptor::Triangular { scale: self.scale },
            FilterShape::Pwl(nodes) => FilterDescriptor::PiecewiseLinear {
                nodes: nodes.iter().map(|n| (n.xf, n.vf * self.scale)).collect(),
            },
            FilterShape::Custom(_) => FilterDescriptor::Custom,
        }
    }

    /// Exact piecewise-linear nodes on `[0, 1]`, including the scale factor,
    /// when the shape is piecewise-linear.
    pub fn exact_nodes(&self) -> Option<Vec<(Ratio, Ratio)>> {
        let scale = self.scale_exact?;
        match &self.shape {
            FilterShape::Pwl(nodes) => Some(nodes.iter().map(|n| (n.x, n.v * scale)).collect()),
            _ => None,
        }
    }

    /// Rescale to unit mass: `k'(y) = k(y) / ||k||_1`. Exactness is preserved
    /// when the mass is exact.
    pub fn normalized(&self) -> Result<Filter, FilterError> {
        let mass = self.l1_mass();
        if !(mass > 0.0) {
            return Err(FilterError::ZeroMass);
        }
        let mut out = self.clone();
        out.scale = self.scale / mass;
        // Effective mass is shape_mass * scale, so the normalizing scale is
        // 1 / shape_mass regardless of the current scale.
        out.scale_exact = self.scale_exact.and(self.l1_mass_exact).map(|m| m.recip());
        out.normalized = true;
        Ok(out)
    }

    /// Rescale by an arbitrary positive factor (test helper for scaled kernels).
    pub fn scaled(&self, factor: f64) -> Filter {
        let mut out = self.clone();
        out.scale = self.scale * factor;
        out.scale_exact = self
            .scale_exact
            .and_then(|s| Ratio::from_f64(factor).map(|f| s * f));
        let mass = out.l1_mass();
        out.normalized = fmath::abs(mass - 1.0) <= 1e-6;
        out
    }

    /// Check the filter axioms on the fixed deterministic grid
    /// (10001 equispaced points on `[-1, 1]`), each to tolerance `tol`.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        assert!(tol > 0.0, "tolerance must be positive");
        let n = VALIDATION_GRID;
        let h = 2.0 / (n - 1) as f64;
        let mut max_even_defect: f64 = 0.0;
        let mut min_value = f64::INFINITY;
        let mut max_outside: f64 = 0.0;
        for i in 0..n {
            let y = -1.0 + h * i as f64;
            let v = self.evaluate(y);
            let v_neg = self.evaluate(-y);
            max_even_defect = max_even_defect.max(fmath::abs(v - v_neg));
            min_value = min_value.min(v);
            if fmath::abs(y) >= 1.0 {
                max_outside = max_outside.max(fmath::abs(v));
            }
        }
        let mass = self.l1_mass();
        ValidationReport {
            even: max_even_defect <= tol,
            nonnegative: min_value >= -tol,
            supported: max_outside <= tol,
            normalized: fmath::abs(mass - 1.0) <= tol,
            max_even_defect,
            min_value,
            max_outside,
            l1_mass: mass,
        }
    }
}

fn pwl_eval_f64(nodes: &[PwlNode], a: f64) -> f64 {
    // a in [0, 1]; nodes cover [0, 1] with strictly increasing abscissas.
    if a <= nodes[0].xf {
        return nodes[0].vf;
    }
    let last = nodes.len() - 1;
    if a >= nodes[last].xf {
        return nodes[last].vf;
    }
    let hi = nodes.partition_point(|n| n.xf <= a);
    let lo = hi - 1;
    let (x0, v0) = (nodes[lo].xf, nodes[lo].vf);
    let (x1, v1) = (nodes[hi].xf, nodes[hi].vf);
    let t = (a - x0) / (x1 - x0);
    v0 + t * (v1 - v0)
}

fn pwl_eval_exact(nodes: &[PwlNode], a: &Ratio) -> Option<Ratio> {
    if *a <= nodes[0].x {
        return Some(nodes[0].v);
    }
    let last = nodes.len() - 1;
    if *a >= nodes[last].x {
        return Some(nodes[last].v);
    }
    let hi = nodes.partition_point(|n| n.x <= *a);
    let lo = hi - 1;
    let t = (*a - nodes[lo].x) / (nodes[hi].x - nodes[lo].x);
    Some(nodes[lo].v + t * (nodes[hi].v - nodes[lo].v))
}

/// Outcome of [`Filter::validate`]: per-axiom flags plus the offending
/// magnitudes, so failures are inspectable.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub even: bool,
    pub nonnegative: bool,
    pub supported: bool,
    pub normalized: bool,
    pub max_even_defect: f64,
    pub min_value: f64,
    pub max_outside: f64,
    pub l1_mass: f64,
}

impl ValidationReport {
    /// Evenness, nonnegativity, and support containment (normalization is a
    /// separate flag; the divergence fixture is deliberately unnormalized).
    pub fn is_structurally_valid(&self) -> bool {
        self.even && self.nonnegative && self.supported
    }
}

/// Kind tag for [`LengthFunction`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LengthKind {
    Step,
    Continuous,
    Tabulated,
}

#[derive(Clone)]
enum LengthShape {
    /// Right-continuous step function: `values[i]` on the i-th interval.
    Step {
        breaks: Vec<f64>,
        values: Vec<f64>,
        exact: Option<(Vec<Ratio>, Vec<Ratio>)>,
    },
    /// Piecewise-linear through `(xs[i], ys[i])`, flat outside the node span.
    Tabulated {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
    Continuous(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Construction metadata for a length function.
#[derive(Clone, Debug, PartialEq)]
pub enum LengthDescriptor {
    Constant {
        value: f64,
    },
    Step {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    Tabulated {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
    Continuous,
}

impl LengthDescriptor {
    /// Rebuild the length function this descriptor came from. `None` for
    /// opaque continuous evaluables.
    pub fn build(&self) -> Option<LengthFunction> {
        match self {
            LengthDescriptor::Constant { value } => LengthFunction::constant(*value).ok(),
            LengthDescriptor::Step {
                breakpoints,
                values,
            } => LengthFunction::step(breakpoints, values).ok(),
            LengthDescriptor::Tabulated { xs, ys } => LengthFunction::tabulated(xs, ys).ok(),
            LengthDescriptor::Continuous => None,
        }
    }
}

/// The strictly positive window-width function `L(x)` on `[0, 1]`.
#[derive(Clone)]
pub struct LengthFunction {
    shape: LengthShape,
    kind: LengthKind,
    lower_bound: f64,
    upper_bound: f64,
}

impl fmt::Debug for LengthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LengthFunction")
            .field("descriptor", &self.descriptor())
            .field("kind", &self.kind)
            .field("lower_bound", &self.lower_bound)
            .field("upper_bound", &self.upper_bound)
            .finish()
    }
}

impl LengthFunction {
    /// Constant width `L(x) = c`.
    pub fn constant(c: f64) -> Result<LengthFunction, FilterError> {
        LengthFunction::step(&[], &[c])
    }

    pub fn constant_exact(c: Ratio) -> Result<LengthFunction, FilterError> {
        LengthFunction::step_exact(&[], &[c])
    }

    /// Right-continuous step function: `values[i]` on the i-th interval cut
    /// by `breakpoints` (so `L(b) = values[i+1]` at breakpoint `b`).
    pub fn step(breakpoints: &[f64], values: &[f64]) -> Result<LengthFunction, FilterError> {
        let b: Option<Vec<Ratio>> = breakpoints.iter().map(|&x| Ratio::from_f64(x)).collect();
        let v: Option<Vec<Ratio>> = values.iter().map(|&x| Ratio::from_f64(x)).collect();
        match (b, v) {
            (Some(b), Some(v)) => LengthFunction::step_exact(&b, &v),
            _ => Err(FilterError::NotRepresentable),
        }
    }

    pub fn step_exact(
        breakpoints: &[Ratio],
        values: &[Ratio],
    ) -> Result<LengthFunction, FilterError> {
        if values.len() != breakpoints.len() + 1 {
            return Err(FilterError::LengthCountMismatch);
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(FilterError::UnsortedBreakpoints);
            }
        }
        for b in breakpoints {
            if !(Ratio::ZERO < *b && *b < Ratio::ONE) {
                return Err(FilterError::BreakpointOutOfRange);
            }
        }
        for v in values {
            if *v <= Ratio::ZERO {
                return Err(FilterError::NonpositiveLength);
            }
        }
        let breaks: Vec<f64> = breakpoints.iter().map(|b| b.to_f64()).collect();
        let vals: Vec<f64> = values.iter().map(|v| v.to_f64()).collect();
        let lower = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let upper = vals.iter().cloned().fold(0.0f64, f64::max);
        Ok(LengthFunction {
            shape: LengthShape::Step {
                breaks,
                values: vals,
                exact: Some((breakpoints.to_vec(), values.to_vec())),
            },
            kind: LengthKind::Step,
            lower_bound: lower,
            upper_bound: upper,
        })
    }

    /// Piecewise-linear through `(xs[i], ys[i])`, extended flat beyond the
    /// node span. Abscissas strictly increasing, values strictly positive.
    pub fn tabulated(xs: &[f64], ys: &[f64]) -> Result<LengthFunction, FilterError> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(FilterError::LengthCountMismatch);
        }
        for w in xs.windows(2) {
            if w[0] >= w[1] {
                return Err(FilterError::UnsortedBreakpoints);
            }
        }
        if ys.iter().any(|&y| !(y > 0.0)) {
            return Err(FilterError::NonpositiveLength);
        }
        let lower = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let upper = ys.iter().cloned().fold(0.0f64, f64::max);
        Ok(LengthFunction {
            shape: LengthShape::Tabulated {
                xs: xs.to_vec(),
                ys: ys.to_vec(),
            },
            kind: LengthKind::Tabulated,
            lower_bound: lower,
            upper_bound: upper,
        })
    }

    /// Arbitrary continuous width. Bounds are estimated on the fixed
    /// 10001-point grid; the function must be strictly positive there.
    pub fn continuous(
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    ) -> Result<LengthFunction, FilterError> {
        let n = VALIDATION_GRID;
        let mut lower = f64::INFINITY;
        let mut upper = 0.0f64;
        for i in 0..n {
            let x = i as f64 / (n - 1) as f64;
            let v = eval(x);
            lower = lower.min(v);
            upper = upper.max(v);
        }
        if !(lower > 0.0) {
            return Err(FilterError::NonpositiveLength);
        }
        Ok(LengthFunction {
            shape: LengthShape::Continuous(eval),
            kind: LengthKind::Continuous,
            lower_bound: lower,
            upper_bound: upper,
        })
    }

    /// Width from the spacing of a signal's strict extrema:
    /// `L(x_i) = max(1, multiplier * distance between the two extrema nearest
    /// to i)`, tabulated per sample and interpolated linearly in between.
    /// A pluggable default; nothing in the method pins this choice.
    pub fn from_signal_extrema(
        signal: &[f64],
        multiplier: f64,
    ) -> Result<LengthFunction, FilterError> {
        if !(multiplier > 0.0) {
            return Err(FilterError::NonpositiveLength);
        }
        let ext = strict_extrema_indices(signal);
        if ext.len() < 2 {
            return Err(FilterError::TooFewExtrema);
        }
        let n = signal.len();
        let mut ys = Vec::with_capacity(n);
        for i in 0..n {
            // Two extrema nearest to i (ties resolved toward smaller index).
            let pos = ext.partition_point(|&e| e < i);
            let mut candidates: Vec<usize> = Vec::with_capacity(4);
            if pos >= 2 {
                candidates.push(ext[pos - 2]);
            }
            if pos >= 1 {
                candidates.push(ext[pos - 1]);
            }
            if pos < ext.len() {
                candidates.push(ext[pos]);
            }
            if pos + 1 < ext.len() {
                candidates.push(ext[pos + 1]);
            }
            candidates.sort_by_key(|&e| (e.abs_diff(i), e));
            let dist = candidates[0].abs_diff(candidates[1]);
            ys.push((multiplier * dist as f64).max(1.0));
        }
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        LengthFunction::tabulated(&xs, &ys)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match &self.shape {
            LengthShape::Step { breaks, values, .. } => {
                let idx = breaks.partition_point(|&b| b <= x);
                values[idx]
            }
            LengthShape::Tabulated { xs, ys } => {
                if x <= xs[0] {
                    return ys[0];
                }
                let last = xs.len() - 1;
                if x >= xs[last] {
                    return ys[last];
                }
                let hi = xs.partition_point(|&p| p <= x);
                let lo = hi - 1;
                if x == xs[lo] {
                    return ys[lo];
                }
                let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
                ys[lo] + t * (ys[hi] - ys[lo])
            }
            LengthShape::Continuous(f) => f(x),
        }
    }

    /// Exact evaluation for step shapes built from rationals.
    pub fn evaluate_rational(&self, x: &Ratio) -> Option<Ratio> {
        match &self.shape {
            LengthShape::Step { exact, .. } => {
                let (breaks, values) = exact.as_ref()?;
                let idx = breaks.partition_point(|b| b <= x);
                Some(values[idx])
            }
            _ => None,
        }
    }

    pub fn kind(&self) -> LengthKind {
        self.kind
    }

    /// The positive lower bound `L_*`.
    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    /// `sup L` (exact for step shapes, grid-sampled for continuous ones).
    pub fn upper_bound(&self) -> f64 {
        self.upper_bound
    }

    pub fn descriptor(&self) -> LengthDescriptor {
        match &self.shape {
            LengthShape::Step { breaks, values, .. } => {
                if breaks.is_empty() {
                    LengthDescriptor::Constant { value: values[0] }
                } else {
                    LengthDescriptor::Step {
                        breakpoints: breaks.clone(),
                        values: values.clone(),
                    }
                }
            }
            LengthShape::Tabulated { xs, ys } => LengthDescriptor::Tabulated {
                xs: xs.clone(),
                ys: ys.clone(),
            },
            LengthShape::Continuous(_) => LengthDescriptor::Continuous,
        }
    }
}

/// Indices `j` in `1..len-1` where the sequence attains a strict local
/// maximum or minimum (plateaus do not count).
pub fn strict_extrema_indices(samples: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    for j in 1..samples.len().saturating_sub(1) {
        let (a, b, c) = (samples[j - 1], samples[j], samples[j + 1]);
        if (b > a && b > c) || (b < a && b < c) {
            out.push(j);
        }
    }
    out
}
