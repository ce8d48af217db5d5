//! Hessian metrics from radial and polytope potentials, and verification
//! that solutions of the reduced ODE satisfy the original fourth-order PDE
//! sum_jk d_j d_k g^jk = -kappa.
//!
//! A radial potential with f = g' generates the Hessian pair
//!
//! * G = (f/r) Id + ((f' r - f)/r^3) x x^T, eigenvalues f/r ((n-1)-fold,
//!   tangential) and f' (radial);
//! * G^{-1} = (r/f) Id + (1/(r^2 f') - 1/(r f)) x x^T;
//!
//! positive definite exactly when f/r and f' are both positive (f' alone
//! for n = 1). Moment-polytope potentials g = 1/2 sum_l l_l log l_l supply
//! an independent non-radial family whose Hessian is available in closed
//! form.
//!
//! The PDE check differentiates nothing analytically: it applies central
//! second differences to the inverse-Hessian field of any
//! [`InverseHessianField`] implementor and sums them, so a residual near
//! zero ties the ODE-side solution to the PDE it came from through an
//! independent code path. Shell sweeps and curvature scans run in parallel
//! when the `parallel` feature is enabled.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::integrate::Trajectory;
use crate::linalg::{least_squares, Mat};
use crate::par;
use crate::{Error, Result};

/// Hessian and inverse Hessian of a radial potential at one point, with the
/// eigenvalues implied by the rank-one structure.
#[derive(Debug, Clone)]
pub struct HessianPair {
    pub g: Mat,
    pub g_inv: Mat,
    /// Tangential eigenvalue f/r, (n-1)-fold for n >= 2.
    pub tangential: f64,
    /// Radial eigenvalue f'.
    pub radial: f64,
    dim: usize,
}

impl HessianPair {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The metric reading: G is positive definite iff both eigenvalues are
    /// positive (only the radial one exists for n = 1).
    pub fn is_positive_definite(&self) -> bool {
        if self.dim == 1 {
            self.radial > 0.0
        } else {
            self.tangential > 0.0 && self.radial > 0.0
        }
    }
}

/// Builds the Hessian pair of a radial potential at the point `x`, given
/// f = g'(|x|) and f' there.
pub fn hessian_from_radial(f: f64, fp: f64, x: &[f64]) -> Result<HessianPair> {
    let n = x.len();
    if n == 0 {
        return Err(Error::InvalidParams("point must have at least one coordinate".into()));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r <= 0.0 {
        return Err(Error::NonPositiveRadius { r });
    }
    if f == 0.0 {
        return Err(Error::ZeroF { r });
    }
    if fp == 0.0 {
        return Err(Error::ZeroFPrime { r, context: "the inverse Hessian divides by f'" });
    }
    let diag = f / r;
    let rank1 = (fp * r - f) / (r * r * r);
    let g = Mat::from_fn(n, |j, k| {
        let d = if j == k { diag } else { 0.0 };
        d + rank1 * x[j] * x[k]
    });
    let inv_diag = r / f;
    let inv_rank1 = 1.0 / (r * r * fp) - 1.0 / (r * f);
    let g_inv = Mat::from_fn(n, |j, k| {
        let d = if j == k { inv_diag } else { 0.0 };
        d + inv_rank1 * x[j] * x[k]
    });
    Ok(HessianPair { g, g_inv, tangential: diag, radial: fp, dim: n })
}

/// Anything that can produce the inverse Hessian g^jk at a point. The PDE
/// verifier differentiates this field numerically.
pub trait InverseHessianField: Sync {
    fn dim(&self) -> usize;
    fn inverse_hessian(&self, x: &[f64]) -> Result<Mat>;
}

/// Inverse-Hessian field of a radial profile r -> (f, f'). For dim = 1 the
/// profile is evaluated on the signed coordinate, since one-dimensional
/// potentials need not be even.
pub struct RadialField<F> {
    dim: usize,
    profile: F,
}

impl<F: Fn(f64) -> Result<(f64, f64)> + Sync> RadialField<F> {
    pub fn new(dim: usize, profile: F) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("field dimension must be >= 1".into()));
        }
        Ok(RadialField { dim, profile })
    }
}

impl<F: Fn(f64) -> Result<(f64, f64)> + Sync> InverseHessianField for RadialField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn inverse_hessian(&self, x: &[f64]) -> Result<Mat> {
        if x.len() != self.dim {
            return Err(Error::InvalidParams(format!(
                "point has {} coordinates, field has dimension {}",
                x.len(),
                self.dim
            )));
        }
        if self.dim == 1 {
            let (_, fp) = (self.profile)(x[0])?;
            if fp == 0.0 {
                return Err(Error::ZeroFPrime {
                    r: x[0],
                    context: "the inverse Hessian divides by f'",
                });
            }
            return Ok(Mat::from_fn(1, |_, _| 1.0 / fp));
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (f, fp) = (self.profile)(r)?;
        Ok(hessian_from_radial(f, fp, x)?.g_inv)
    }
}

/// The inverse-Hessian field carried by an integrated trajectory.
pub fn trajectory_field(
    traj: &Trajectory,
) -> RadialField<impl Fn(f64) -> Result<(f64, f64)> + Sync + '_> {
    RadialField::new(traj.params.n as usize, move |r| traj.eval(r))
        .expect("trajectory dimension is validated at construction")
}

/// Moment-polytope potential g = 1/2 sum_l l_l(x) log l_l(x) over affine
/// facet functions l_l(x) = c_l . x + d_l, positive on the interior.
#[derive(Debug, Clone)]
pub struct PolytopePotential {
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    dim: usize,
}

impl PolytopePotential {
    pub fn new(dim: usize, facets: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("polytope dimension must be >= 1".into()));
        }
        if facets.is_empty() {
            return Err(Error::InvalidParams("polytope needs at least one facet".into()));
        }
        let mut normals = Vec::with_capacity(facets.len());
        let mut offsets = Vec::with_capacity(facets.len());
        for (i, (c, d)) in facets.into_iter().enumerate() {
            if c.len() != dim {
                return Err(Error::InvalidParams(format!(
                    "facet {i} normal has {} coordinates, expected {dim}",
                    c.len()
                )));
            }
            if c.iter().all(|v| *v == 0.0) {
                return Err(Error::InvalidParams(format!("facet {i} has a zero normal")));
            }
            normals.push(c);
            offsets.push(d);
        }
        Ok(PolytopePotential { normals, offsets, dim })
    }

    /// Axis-aligned cuboid prod_j (a_j, b_j) with facets x_j - a_j and
    /// b_j - x_j.
    pub fn cuboid(bounds: &[(f64, f64)]) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidParams("cuboid needs at least one axis".into()));
        }
        let dim = bounds.len();
        let mut facets = Vec::with_capacity(2 * dim);
        for (j, &(a, b)) in bounds.iter().enumerate() {
            if !(b > a) {
                return Err(Error::InvalidParams(format!(
                    "cuboid axis {j} needs b > a, got [{a}, {b}]"
                )));
            }
            let mut lo = vec![0.0; dim];
            lo[j] = 1.0;
            facets.push((lo, -a));
            let mut hi = vec![0.0; dim];
            hi[j] = -1.0;
            facets.push((hi, b));
        }
        Self::new(dim, facets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facet_count(&self) -> usize {
        self.normals.len()
    }

    /// Facet values l_l(x); the interior is where all are positive.
    pub fn facet_values(&self, x: &[f64]) -> Vec<f64> {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(c, d)| c.iter().zip(x).map(|(ci, xi)| ci * xi).sum::<f64>() + d)
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && self.facet_values(x).iter().all(|v| *v > 0.0)
    }

    /// Hessian G_jk = 1/2 sum_l c_lj c_lk / l_l(x) at an interior point.
    pub fn hessian(&self, x: &[f64]) -> Result<Mat> {
        if x.len() != self.dim {
            return Err(Error::InvalidParams(format!(
                "point has {} coordinates, polytope has dimension {}",
                x.len(),
                self.dim
            )));
        }
        let values = self.facet_values(x);
        for (facet, value) in values.iter().enumerate() {
            if !(*value > 0.0) {
                return Err(Error::OutsidePolytope { facet, value: *value });
            }
        }
        Ok(Mat::from_fn(self.dim, |j, k| {
            self.normals.iter().zip(&values).map(|(c, l)| 0.5 * c[j] * c[k] / l).sum()
        }))
    }
}

impl InverseHessianField for PolytopePotential {
    fn dim(&self) -> usize {
        self.dim
    }

    fn inverse_hessian(&self, x: &[f64]) -> Result<Mat> {
        self.hessian(x)?.inverse()
    }
}

/// Central-difference approximation of sum_jk d_j d_k g^jk(x) with step h.
/// Diagonal terms use the three-point second difference; off-diagonal pairs
/// use the four-corner cross difference and enter twice by symmetry.
pub fn pde_sum_at<F: InverseHessianField + ?Sized>(field: &F, x: &[f64], h: f64) -> Result<f64> {
    let n = field.dim();
    if x.len() != n {
        return Err(Error::InvalidParams(format!(
            "point has {} coordinates, field has dimension {n}",
            x.len()
        )));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParams(format!("finite-difference step must be > 0, got {h}")));
    }
    let center = field.inverse_hessian(x)?;
    let mut xs = x.to_vec();
    let mut sum = 0.0;
    for j in 0..n {
        xs[j] = x[j] + h;
        let plus = field.inverse_hessian(&xs)?[(j, j)];
        xs[j] = x[j] - h;
        let minus = field.inverse_hessian(&xs)?[(j, j)];
        xs[j] = x[j];
        sum += (plus - 2.0 * center[(j, j)] + minus) / (h * h);
        for k in (j + 1)..n {
            xs[j] = x[j] + h;
            xs[k] = x[k] + h;
            let pp = field.inverse_hessian(&xs)?[(j, k)];
            xs[k] = x[k] - h;
            let pm = field.inverse_hessian(&xs)?[(j, k)];
            xs[j] = x[j] - h;
            let mm = field.inverse_hessian(&xs)?[(j, k)];
            xs[k] = x[k] + h;
            let mp = field.inverse_hessian(&xs)?[(j, k)];
            xs[j] = x[j];
            xs[k] = x[k];
            sum += 2.0 * (pp - pm - mp + mm) / (4.0 * h * h);
        }
    }
    Ok(sum)
}

/// Scalar curvature S = -sum_jk d_j d_k g^jk at x, by finite differences.
pub fn scalar_curvature<F: InverseHessianField + ?Sized>(
    field: &F,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    Ok(-pde_sum_at(field, x, h)?)
}

/// Shell sweep specification for [`pde_residual_radial`]: radii to test, how
/// many random unit directions to add to the 2n axis directions (n >= 2
/// only), the finite-difference step as a fraction of each radius, and the
/// RNG seed making the directions reproducible.
#[derive(Debug, Clone)]
pub struct ShellSpec {
    pub radii: Vec<f64>,
    pub extra_directions: usize,
    pub h_rel: f64,
    pub seed: u64,
}

impl ShellSpec {
    pub fn new(radii: Vec<f64>) -> Self {
        ShellSpec { radii, extra_directions: 10, h_rel: 1e-3, seed: 7 }
    }
}

/// Worst PDE residual |sum_jk d_j d_k g^jk + kappa| over shells of points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeCheck {
    pub max_residual: f64,
    pub worst_r: f64,
    pub points: usize,
}

/// Evaluates the PDE residual on every shell point (axis directions plus
/// seeded random ones) and reports the maximum.
pub fn pde_residual_radial<F: InverseHessianField>(
    kappa: f64,
    field: &F,
    spec: &ShellSpec,
) -> Result<PdeCheck> {
    let n = field.dim();
    if spec.radii.is_empty() {
        return Err(Error::InvalidParams("shell sweep needs at least one radius".into()));
    }
    if !(spec.h_rel > 0.0) {
        return Err(Error::InvalidParams(format!(
            "relative finite-difference step must be > 0, got {}",
            spec.h_rel
        )));
    }
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        let mut plus = vec![0.0; n];
        plus[j] = 1.0;
        dirs.push(plus);
        let mut minus = vec![0.0; n];
        minus[j] = -1.0;
        dirs.push(minus);
    }
    if n >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        while dirs.len() < 2 * n + spec.extra_directions {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue;
            }
            dirs.push(v.into_iter().map(|c| c / norm).collect());
        }
    }
    let mut tasks: Vec<(f64, Vec<f64>)> = Vec::with_capacity(spec.radii.len() * dirs.len());
    for &r in &spec.radii {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius { r });
        }
        for d in &dirs {
            tasks.push((r, d.iter().map(|c| c * r).collect()));
        }
    }
    let results = par::map_collect(&tasks, |(r, x)| {
        pde_sum_at(field, x, spec.h_rel * r).map(|s| (s + kappa).abs())
    });
    let mut check = PdeCheck { max_residual: 0.0, worst_r: f64::NAN, points: tasks.len() };
    for ((r, _), res) in tasks.iter().zip(results) {
        let residual = res?;
        if residual >= check.max_residual {
            check.max_residual = residual;
            check.worst_r = *r;
        }
    }
    Ok(check)
}

/// Scalar curvature sampled over points, with the best affine model
/// S ~ c0 + sum_j c_j x_j and the worst deviation from it.
#[derive(Debug, Clone)]
pub struct CurvatureScan {
    pub values: Vec<f64>,
    pub affine: Vec<f64>,
    pub max_affine_deviation: f64,
}

/// Samples S at each point and fits the affine model (the extremal
/// condition): a small `max_affine_deviation` certifies extremality on the
/// sampled set.
pub fn curvature_scan<F: InverseHessianField>(
    field: &F,
    points: &[Vec<f64>],
    h: f64,
) -> Result<CurvatureScan> {
    let n = field.dim();
    if points.len() < n + 2 {
        return Err(Error::BadWindow(format!(
            "affine curvature fit needs >= {} points, got {}",
            n + 2,
            points.len()
        )));
    }
    let results = par::map_collect(points, |x| scalar_curvature(field, x, h));
    let mut values = Vec::with_capacity(points.len());
    for res in results {
        values.push(res?);
    }
    let ones = vec![1.0; points.len()];
    let mut cols: Vec<Vec<f64>> = vec![ones];
    for j in 0..n {
        cols.push(points.iter().map(|x| x[j]).collect());
    }
    let col_refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    let affine = least_squares(&col_refs, &values)?;
    let max_affine_deviation = points
        .iter()
        .zip(&values)
        .map(|(x, s)| {
            let model = affine[0] + x.iter().zip(&affine[1..]).map(|(xi, ci)| xi * ci).sum::<f64>();
            (s - model).abs()
        })
        .fold(0.0f64, f64::max);
    Ok(CurvatureScan { values, affine, max_affine_deviation })
}

/// Observed order of the finite-difference scheme: slope of log error
/// against log h, with the error measured against a known reference value
/// of the PDE sum.
pub fn fd_order_estimate<F: InverseHessianField>(
    field: &F,
    x: &[f64],
    reference: f64,
    h_values: &[f64],
) -> Result<f64> {
    let mut logs: Vec<(f64, f64)> = Vec::with_capacity(h_values.len());
    for &h in h_values {
        let err = (pde_sum_at(field, x, h)? - reference).abs();
        if err > 0.0 {
            logs.push((h.ln(), err.ln()));
        }
    }
    if logs.len() < 2 {
        return Err(Error::Inconclusive(
            "finite-difference errors vanished at every step size; order unmeasurable".into(),
        ));
    }
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}
