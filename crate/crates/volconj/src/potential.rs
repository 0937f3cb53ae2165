//! Potential functions of the link families, their analytic derivatives,
//! critical points and the volumes read off from critical values.
//!
//! A potential is stored term by term: a list of signed dilogarithms
//! `±(1/2πi)·Li₂(e^{2πi·a(z)})` of affine arguments `a`, a quadratic
//! polynomial part, and separately the Fourier shift `2πi·Σ kⱼ zⱼ` whose
//! addition turns the potential into the function whose critical points
//! govern the asymptotics.  Throughout, `Li(w)` abbreviates `Li₂(e^{2πiw})`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jones::argmax_envelope_g;
use crate::links::{simplicial_volume, LinkFamily, VolumeConstants};
use crate::numeric::{pi, Cx, EvalPoint};
use crate::special::{dilog_c64, lobachevsky};

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// Working radius `|1 − s| < DEFORMATION_RADIUS` for deformed volumes.
pub const DEFORMATION_RADIUS: f64 = 0.1;

/// Number of continuation steps used to follow the deformed branch.
pub const BRANCH_STEPS: usize = 64;

/// Newton stops once `‖∇‖∞` drops below this.
const NEWTON_TARGET: f64 = 1e-13;
/// A returned critical point always satisfies `‖∇‖∞ ≤ CRITICAL_RESIDUAL`.
pub const CRITICAL_RESIDUAL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 100;

/// Exact rational coefficient, serialized as `[numerator, denominator]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational(pub i64, pub i64);

impl Rational {
    pub fn integer(n: i64) -> Self {
        Self(n, 1)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// `offset + Σ coeffs[j]·z_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub offset: Complex64,
    pub coeffs: Vec<Rational>,
}

impl Affine {
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.coeffs.iter().zip(z).fold(self.offset, |acc, (c, zj)| acc + zj * c.to_f64())
    }
}

/// `sign·(1/2πi)·Li₂(e^{2πi·arg(z)})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilogTerm {
    pub sign: i8,
    pub arg: Affine,
}

/// `coeff·z_i·z_j` with `i ≤ j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadTerm {
    pub i: usize,
    pub j: usize,
    pub coeff: Complex64,
}

/// Polynomial part `Σ quadratic + Σ linear[j]·z_j + constant`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyPart {
    pub quadratic: Vec<QuadTerm>,
    pub linear: Vec<Complex64>,
    pub constant: Complex64,
}

/// Colour ratios `s_i = M_i/(N+½)`, one per component.  Single-colour
/// families take one ratio; two-component families take `(s1, s2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deformation {
    pub ratios: Vec<f64>,
}

impl Deformation {
    pub fn new(ratios: Vec<f64>) -> Self {
        Self { ratios }
    }

    pub fn complete(components: usize) -> Self {
        Self { ratios: vec![1.0; components] }
    }

    fn is_complete(&self) -> bool {
        self.ratios.iter().all(|&s| s == 1.0)
    }
}

/// Sign branch of the `W^α_β` potential (the `I±` decomposition).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: LinkFamily,
    pub branch: Branch,
    pub dim: usize,
    /// Human-readable variable names, e.g. `z1`, `z'2`, `zζ`.
    pub labels: Vec<String>,
    /// The geometric critical point of the complete structure (real),
    /// used as the default Newton start.
    pub reference: Vec<f64>,
    pub dilog_terms: Vec<DilogTerm>,
    pub poly: PolyPart,
    /// Fourier shift `2πi·Σ fourier_shift[j]·z_j`.
    pub fourier_shift: Vec<i64>,
    pub deformation: Option<Deformation>,
}

/// Critical point of `Φ + shift` with everything read off there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalGeometry {
    pub point: Vec<Complex64>,
    pub critical_value: Complex64,
    /// Row-major Hessian.
    pub hessian: Vec<Vec<Complex64>>,
    /// `2π·Re(critical_value)`.
    pub volume: f64,
    /// `2π·Im(critical_value)`, reported raw.
    pub cs_imag: f64,
    pub hess_det: Complex64,
    /// `‖∇(Φ + shift)‖∞` at `point`.
    pub residual: f64,
    pub iterations: usize,
}

impl CriticalGeometry {
    pub fn hessian_matrix(&self) -> DMatrix<Complex64> {
        let n = self.hessian.len();
        DMatrix::from_fn(n, n, |i, j| self.hessian[i][j])
    }
}

// ---------------------------------------------------------------------------
// Construction

/// Real affine form `c + Σ k·z_i` used while assembling potentials.
#[derive(Clone, Debug)]
struct Lin {
    c: f64,
    t: Vec<(usize, i64)>,
}

impl Lin {
    fn var(i: usize) -> Self {
        Self { c: 0.0, t: vec![(i, 1)] }
    }

    fn konst(c: f64) -> Self {
        Self { c, t: Vec::new() }
    }

    fn plus(&self, other: &Lin) -> Self {
        let mut t = self.t.clone();
        t.extend_from_slice(&other.t);
        Self { c: self.c + other.c, t }
    }

    fn minus(&self, other: &Lin) -> Self {
        self.plus(&other.scaled(-1))
    }

    fn scaled(&self, k: i64) -> Self {
        Self { c: self.c * k as f64, t: self.t.iter().map(|&(i, a)| (i, a * k)).collect() }
    }

    fn add_const(&self, c: f64) -> Self {
        Self { c: self.c + c, t: self.t.clone() }
    }
}

struct Builder {
    dim: usize,
    terms: Vec<DilogTerm>,
    quad: BTreeMap<(usize, usize), Complex64>,
    linear: Vec<Complex64>,
    constant: Complex64,
}

impl Builder {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
            quad: BTreeMap::new(),
            linear: vec![Complex64::default(); dim],
            constant: Complex64::default(),
        }
    }

    /// `sign·(1/2πi)·Li(a)`.
    fn li(&mut self, sign: i8, a: &Lin) {
        let mut coeffs = vec![0i64; self.dim];
        for &(i, k) in &a.t {
            coeffs[i] += k;
        }
        let coeffs = coeffs.into_iter().map(Rational::integer).collect();
        self.terms.push(DilogTerm { sign, arg: Affine { offset: Complex64::new(a.c, 0.0), coeffs } });
    }

    /// `scale·a·b`.
    fn product(&mut self, scale: Complex64, a: &Lin, b: &Lin) {
        self.constant += scale * a.c * b.c;
        for &(i, k) in &b.t {
            self.linear[i] += scale * (a.c * k as f64);
        }
        for &(i, k) in &a.t {
            self.linear[i] += scale * (b.c * k as f64);
        }
        for &(i, ki) in &a.t {
            for &(j, kj) in &b.t {
                *self.quad.entry((i.min(j), i.max(j))).or_default() += scale * (ki * kj) as f64;
            }
        }
    }

    /// `(1/2πi)[−(2πi e)(2πi(y+w)) + Li(e−y−w) − Li(e−w) + Li(w) − Li(y+w) + Li(y)]`,
    /// the Whitehead-link building block; `e` is `2x − 1` for an interior
    /// clasp and `s − 1` for the top one.
    fn whitehead_block(&mut self, e: &Lin, y: usize, w: usize) {
        let (y, w) = (Lin::var(y), Lin::var(w));
        let yw = y.plus(&w);
        self.product(-TWO_PI_I, e, &yw);
        self.li(1, &e.minus(&yw));
        self.li(-1, &e.minus(&w));
        self.li(1, &w);
        self.li(-1, &yw);
        self.li(1, &y);
    }

    /// `8πi x² + whitehead_block(2x − 1, y, w)`, i.e. `Ψ(WL; 2x, y, w)`.
    fn interior_clasp(&mut self, x: &Lin, y: usize, w: usize) {
        self.product(4.0 * TWO_PI_I, x, x);
        self.whitehead_block(&x.scaled(2).add_const(-1.0), y, w);
    }

    /// `Ψ(4₁; x, z) = (1/2πi)[Li(2x − z) − Li(2x + z)] − 4πi x z`.
    fn figure_eight_tail(&mut self, x: &Lin, z: usize) {
        let z = Lin::var(z);
        let x2 = x.scaled(2);
        self.li(1, &x2.minus(&z));
        self.li(-1, &x2.plus(&z));
        self.product(-2.0 * TWO_PI_I, x, &z);
    }

    /// `κ(x, w) = (1/2πi)[−Li(x+w) + Li(w) − Li(−w) + Li(−x−w) − Li(−x)]`.
    fn mirrored_block(&mut self, x: usize, w: usize) {
        let (x, w) = (Lin::var(x), Lin::var(w));
        let xw = x.plus(&w);
        self.li(-1, &xw);
        self.li(1, &w);
        self.li(-1, &w.scaled(-1));
        self.li(1, &xw.scaled(-1));
        self.li(-1, &x.scaled(-1));
    }

    fn finish(
        self,
        family: &LinkFamily,
        branch: Branch,
        labels: Vec<String>,
        reference: Vec<f64>,
        fourier_shift: Vec<i64>,
        deformation: Option<Deformation>,
    ) -> PotentialSpec {
        let quadratic = self
            .quad
            .into_iter()
            .filter(|(_, c)| *c != Complex64::default())
            .map(|((i, j), coeff)| QuadTerm { i, j, coeff })
            .collect();
        PotentialSpec {
            family: family.clone(),
            branch,
            dim: self.dim,
            labels,
            reference,
            dilog_terms: self.terms,
            poly: PolyPart { quadratic, linear: self.linear, constant: self.constant },
            fourier_shift,
            deformation,
        }
    }
}

fn ratios(link: &LinkFamily, deformation: Option<&Deformation>) -> Result<Vec<f64>> {
    let n = link.components() as usize;
    let r = deformation.map_or_else(|| vec![1.0; n], |d| d.ratios.clone());
    if r.len() != n {
        return Err(Error::InvalidInput(format!("{link} takes {n} colour ratio(s), got {}", r.len())));
    }
    if let Some(s) = r.iter().find(|s| !s.is_finite() || **s <= 0.0 || **s > 1.0) {
        return Err(Error::Domain(format!("colour ratio {s} outside (0, 1]")));
    }
    Ok(r)
}

/// The potential of `link` with its Fourier shift, on the `+` branch for
/// `W^α_β`.
pub fn build_potential(link: &LinkFamily, deformation: Option<&Deformation>) -> Result<PotentialSpec> {
    build_potential_branch(link, deformation, Branch::Plus)
}

/// [`build_potential`] with an explicit sign branch (relevant for
/// `W^α_β` only).
pub fn build_potential_branch(
    link: &LinkFamily,
    deformation: Option<&Deformation>,
    branch: Branch,
) -> Result<PotentialSpec> {
    link.validate()?;
    let s = ratios(link, deformation)?;
    let stored = deformation.filter(|d| !d.is_complete()).cloned();
    match *link {
        LinkFamily::FigureEight => {
            // Ψ(4₁; s/2, z) + 2πi z.
            let mut b = Builder::new(1);
            b.figure_eight_tail(&Lin::konst(s[0] / 2.0), 0);
            Ok(b.finish(link, branch, vec!["z".into()], vec![5.0 / 6.0], vec![1], stored))
        }
        LinkFamily::WhiteheadLink => {
            // Φ^{(s)}(WL; z1, z2) with s the ratio of the clasp colour M₂.
            if s[0] != 1.0 {
                return Err(Error::Unsupported("Whitehead link deformations only in the clasp colour".into()));
            }
            let mut b = Builder::new(2);
            b.whitehead_block(&Lin::konst(s[1] - 1.0), 0, 1);
            Ok(b.finish(link, branch, labels("z", 2), vec![0.5, 0.25], vec![0, 0], stored))
        }
        LinkFamily::WhiteheadChainCabledFigEight { a, c, d } => {
            if stored.is_some() {
                return Err(Error::Unsupported("cabled chains have no deformed potential".into()));
            }
            let (c, d) = (c as usize, d as usize);
            let dim = c + d + 2;
            let mut b = Builder::new(dim);
            let z1 = Lin::var(0);
            let centered = z1.add_const(-0.5);
            b.product(TWO_PI_I * a as f64, &centered, &centered);
            for j in 1..=c {
                b.whitehead_block(&Lin::konst(0.0), 0, j);
            }
            for j in c + 1..=c + d {
                b.mirrored_block(0, j);
            }
            b.figure_eight_tail(&z1, dim - 1);
            let mut reference = vec![0.25; dim];
            reference[0] = 0.5;
            reference[dim - 1] = 5.0 / 6.0;
            let mut shift = vec![0; dim];
            shift[0] = 1;
            shift[dim - 1] = 1;
            Ok(b.finish(link, branch, labels("z", dim), reference, shift, None))
        }
        LinkFamily::IteratedDoubleFigEight { p } => {
            let p = p as usize;
            let dim = 2 * p + 3;
            let mut b = Builder::new(dim);
            b.whitehead_block(&Lin::konst(s[0] - 1.0), 0, 1);
            for g in 1..=p {
                b.interior_clasp(&Lin::var(2 * g - 2), 2 * g, 2 * g + 1);
            }
            b.figure_eight_tail(&Lin::var(2 * p), dim - 1);
            let mut reference: Vec<f64> = (0..dim).map(|j| if j % 2 == 0 { 0.5 } else { 0.25 }).collect();
            reference[dim - 1] = 5.0 / 6.0;
            let mut shift = vec![0; dim];
            for g in 1..=p {
                shift[2 * g - 2] = -3;
            }
            shift[2 * p] += 1;
            shift[dim - 1] = 1;
            Ok(b.finish(link, branch, labels("z", dim), reference, shift, stored))
        }
        LinkFamily::WAlphaBeta { alpha, beta } => {
            if alpha == 0 && beta == 0 {
                return Err(Error::Unsupported("W^0_0 has no clasp".into()));
            }
            // W^α_β and W^β_α differ by exchanging the components.
            let (alpha, beta, s1, s2) = if alpha == 0 { (beta, alpha, s[1], s[0]) } else { (alpha, beta, s[0], s[1]) };
            let (al, be) = (alpha as usize, beta as usize);
            let left = 2 * al - 2;
            let right = 2 * be;
            let dim = left + right + 2;
            let (zeta, zeta1) = (dim - 2, dim - 1);
            let mut b = Builder::new(dim);
            let mut shift = vec![0; dim];
            let mut reference = vec![0.0; dim];
            let mut names = Vec::with_capacity(dim);
            for j in 0..left {
                names.push(format!("z{}", j + 1));
                reference[j] = if j % 2 == 0 { 0.5 } else { 0.25 };
            }
            for j in 0..right {
                names.push(format!("z'{}", j + 1));
                reference[left + j] = if j % 2 == 0 { 0.5 } else { 0.25 };
            }
            names.push("zζ".into());
            names.push("zζ+1".into());
            reference[zeta] = 0.5;
            reference[zeta1] = 0.25;

            if al >= 2 {
                b.whitehead_block(&Lin::konst(s1 - 1.0), 0, 1);
                for g in 2..al {
                    b.interior_clasp(&Lin::var(2 * g - 4), 2 * g - 2, 2 * g - 1);
                    shift[2 * g - 4] = -3;
                }
                shift[2 * al - 4] = 1;
            }
            if be >= 1 {
                b.whitehead_block(&Lin::konst(s2 - 1.0), left, left + 1);
                for g in 2..=be {
                    b.interior_clasp(&Lin::var(left + 2 * g - 4), left + 2 * g - 2, left + 2 * g - 1);
                    shift[left + 2 * g - 4] = -3;
                }
                shift[left + 2 * be - 2] = -4;
            }
            // Ξ±(x', x, zζ, zζ+1).
            let xp = if be >= 1 { Lin::var(left + 2 * be - 2) } else { Lin::konst(s2 / 2.0) };
            let x = if al >= 2 { Lin::var(2 * al - 4) } else { Lin::konst(s1 / 2.0) };
            let sign = if branch == Branch::Plus { 1.0 } else { -1.0 };
            b.product(4.0 * TWO_PI_I, &xp, &xp);
            b.product(TWO_PI_I * sign, &xp.scaled(2).add_const(-1.0), &Lin::var(zeta).add_const(-0.5));
            b.whitehead_block(&x.scaled(2).add_const(-1.0), zeta, zeta1);
            Ok(b.finish(link, branch, names, reference, shift, stored))
        }
        LinkFamily::Unknot | LinkFamily::HopfUnion { .. } => {
            Err(Error::Unsupported(format!("no potential function for {link}")))
        }
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("{prefix}{j}")).collect()
}

// ---------------------------------------------------------------------------
// Evaluation

/// `e^{2πi a}` for a dilogarithm argument, rejecting the cut `[1, ∞)` of
/// `Li₂` and of `log(1 − ·)`.
fn exp_arg(a: Complex64) -> Result<Complex64> {
    let x = (TWO_PI_I * a).exp();
    let tol = 1e-14 * x.norm().max(1.0);
    if x.im.abs() <= tol && x.re >= 1.0 - tol {
        return Err(Error::BranchCut(format!("e^(2πi·({a})) = {x} lies on [1, ∞)")));
    }
    Ok(x)
}

fn check_dim(spec: &PotentialSpec, z: &[Complex64]) -> Result<()> {
    if z.len() != spec.dim {
        return Err(Error::InvalidInput(format!("expected {} coordinates, got {}", spec.dim, z.len())));
    }
    Ok(())
}

impl PotentialSpec {
    /// The potential `Φ(z)` without the Fourier shift.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        check_dim(self, z)?;
        let mut acc = self.poly.constant;
        for t in &self.dilog_terms {
            let x = exp_arg(t.arg.eval(z))?;
            acc += dilog_c64(x) / TWO_PI_I * f64::from(t.sign);
        }
        for q in &self.poly.quadratic {
            acc += q.coeff * z[q.i] * z[q.j];
        }
        for (c, zj) in self.poly.linear.iter().zip(z) {
            acc += c * zj;
        }
        Ok(acc)
    }

    /// The Fourier shift `2πi·Σ k_j z_j`.
    pub fn shift(&self, z: &[Complex64]) -> Complex64 {
        self.fourier_shift.iter().zip(z).fold(Complex64::default(), |acc, (&k, zj)| acc + TWO_PI_I * k as f64 * zj)
    }

    /// `Φ(z) + shift(z)`.
    pub fn eval_shifted(&self, z: &[Complex64]) -> Result<Complex64> {
        Ok(self.eval(z)? + self.shift(z))
    }

    /// `∇Φ(z)`, using `d/dw (1/2πi)Li(w) = −log(1 − e^{2πiw})`.
    pub fn grad(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self, z)?;
        let mut g = self.poly.linear.clone();
        for t in &self.dilog_terms {
            let x = exp_arg(t.arg.eval(z))?;
            let d = -(Complex64::new(1.0, 0.0) - x).ln() * f64::from(t.sign);
            for (gj, c) in g.iter_mut().zip(&t.arg.coeffs) {
                if !c.is_zero() {
                    *gj += d * c.to_f64();
                }
            }
        }
        for q in &self.poly.quadratic {
            g[q.i] += q.coeff * z[q.j];
            g[q.j] += q.coeff * z[q.i];
        }
        Ok(g)
    }

    /// `∇(Φ + shift)(z)`.
    pub fn grad_shifted(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut g = self.grad(z)?;
        for (gj, &k) in g.iter_mut().zip(&self.fourier_shift) {
            *gj += TWO_PI_I * k as f64;
        }
        Ok(g)
    }

    /// The Hessian of `Φ` (the shift is linear and does not contribute).
    pub fn hess(&self, z: &[Complex64]) -> Result<DMatrix<Complex64>> {
        check_dim(self, z)?;
        let n = self.dim;
        let mut h = DMatrix::<Complex64>::zeros(n, n);
        for t in &self.dilog_terms {
            let x = exp_arg(t.arg.eval(z))?;
            let d = TWO_PI_I * x / (Complex64::new(1.0, 0.0) - x) * f64::from(t.sign);
            let c: Vec<f64> = t.arg.coeffs.iter().map(|c| c.to_f64()).collect();
            for i in 0..n {
                if c[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    if c[j] != 0.0 {
                        h[(i, j)] += d * (c[i] * c[j]);
                    }
                }
            }
        }
        for q in &self.poly.quadratic {
            h[(q.i, q.j)] += q.coeff;
            h[(q.j, q.i)] += q.coeff;
        }
        Ok(h)
    }

    pub fn reference_point(&self) -> Vec<Complex64> {
        self.reference.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }
}

/// `Φ(z)` without the Fourier shift.
pub fn eval_potential(spec: &PotentialSpec, z: &[Complex64]) -> Result<Complex64> {
    spec.eval(z)
}

/// `∇Φ(z)`.
pub fn grad(spec: &PotentialSpec, z: &[Complex64]) -> Result<Vec<Complex64>> {
    spec.grad(z)
}

/// `Hess Φ(z)`.
pub fn hess(spec: &PotentialSpec, z: &[Complex64]) -> Result<DMatrix<Complex64>> {
    spec.hess(z)
}

fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Damped Newton iteration on `∇(Φ + shift) = 0` from `start`.
pub fn find_critical_point(spec: &PotentialSpec, start: &[Complex64]) -> Result<CriticalGeometry> {
    check_dim(spec, start)?;
    let mut z = start.to_vec();
    let mut g = spec.grad_shifted(&z)?;
    let mut res = sup_norm(&g);
    let mut iterations = 0;
    while res > NEWTON_TARGET && iterations < NEWTON_MAX_ITER {
        iterations += 1;
        let h = spec.hess(&z)?;
        let rhs = DVector::from_iterator(spec.dim, g.iter().map(|x| -x));
        let step = h.lu().solve(&rhs).ok_or_else(|| Error::Singular(format!("Hessian singular at {z:?}")))?;
        let mut lambda = 1.0;
        let mut improved = None;
        while lambda > 1e-6 {
            let trial: Vec<Complex64> = z.iter().zip(step.iter()).map(|(a, d)| a + d * lambda).collect();
            if let Ok(tg) = spec.grad_shifted(&trial) {
                let tr = sup_norm(&tg);
                if tr < res {
                    improved = Some((trial, tg, tr));
                    break;
                }
            }
            lambda /= 2.0;
        }
        match improved {
            Some((nz, ng, nr)) => {
                z = nz;
                g = ng;
                res = nr;
            }
            // No decrease possible at machine precision: stop and judge the residual.
            None => break,
        }
    }
    if res > CRITICAL_RESIDUAL {
        return Err(Error::NoConvergence(format!("residual {res:.3e} after {iterations} Newton steps")));
    }
    let h = spec.hess(&z)?;
    let hess_det = h.clone().lu().determinant();
    let critical_value = spec.eval_shifted(&z)?;
    let n = spec.dim;
    Ok(CriticalGeometry {
        hessian: (0..n).map(|i| (0..n).map(|j| h[(i, j)]).collect()).collect(),
        point: z,
        critical_value,
        volume: 2.0 * PI * critical_value.re,
        cs_imag: 2.0 * PI * critical_value.im,
        hess_det,
        residual: res,
        iterations,
    })
}

/// [`find_critical_point`] started from the potential's reference point.
pub fn critical_geometry(spec: &PotentialSpec) -> Result<CriticalGeometry> {
    find_critical_point(spec, &spec.reference_point())
}

// ---------------------------------------------------------------------------
// Closed-form Hessian determinant of the cabled chain

/// Which transcription of the arrow-matrix determinant to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetVariant {
    /// Corner entry `a₃ = 2 + √3 i`, diagonal `a₁ = (c+d)i − (c−d)/2 + 2a`.
    PrintedFinalLine,
    /// Corner entry `a₃ = 2 + 2√3 i`, same `a₁`.
    PrintedMatrix,
    /// The Hessian computed from the potential: `a₃ = 0` and
    /// `a₁ = (c+d)i − (c−d)/2 + 2a + 4√3 i`.
    Analytic,
}

/// `(2πi)^{n+2} a₄^{n−1}(a₁a₄a₅ − n a₂² a₅ − a₃² a₄)` with `n = c + d`,
/// `a₂ = i`, `a₄ = 2i`, `a₅ = √3 i`, for the arrow-shaped Hessian of the
/// cabled chain at its geometric critical point.
pub fn hess_det_closed_form(a: i64, c: u32, d: u32, variant: DetVariant) -> Complex64 {
    let i = Complex64::i();
    let s3 = 3f64.sqrt();
    let n = f64::from(c + d);
    let base = i * n - (f64::from(c) - f64::from(d)) / 2.0 + 2.0 * a as f64;
    let (a1, a3) = match variant {
        DetVariant::PrintedFinalLine => (base, Complex64::new(2.0, s3)),
        DetVariant::PrintedMatrix => (base, Complex64::new(2.0, 2.0 * s3)),
        DetVariant::Analytic => (base + i * 4.0 * s3, Complex64::default()),
    };
    let (a2, a4, a5) = (i, 2.0 * i, s3 * i);
    let inner = a1 * a4 * a5 - n * a2 * a2 * a5 - a3 * a3 * a4;
    TWO_PI_I.powi((c + d + 2) as i32) * a4.powi((c + d) as i32 - 1) * inner
}

// ---------------------------------------------------------------------------
// Deformed Whitehead clasp

/// Roots of `Z² + (1 − B)Z + B = 0`.
fn quadratic_roots(b: Complex64) -> [Complex64; 2] {
    let one = Complex64::new(1.0, 0.0);
    let p = one - b;
    let disc = (p * p - 4.0 * b).sqrt();
    [(-p + disc) / 2.0, (-p - disc) / 2.0]
}

/// `Z₂(s)` with `B = e^{2πis}`, followed from `Z₂(1) = i` by continuation.
pub fn deformed_branch_root(s: f64) -> Result<Complex64> {
    if !s.is_finite() || (1.0 - s).abs() >= 0.25 {
        return Err(Error::Domain(format!("deformation ratio {s} outside |1 − s| < 1/4")));
    }
    let mut z = Complex64::i();
    for k in 1..=BRANCH_STEPS {
        let sk = 1.0 + (s - 1.0) * k as f64 / BRANCH_STEPS as f64;
        let b = (TWO_PI_I * sk).exp();
        let [r1, r2] = quadratic_roots(b);
        let (d1, d2) = ((r1 - z).norm(), (r2 - z).norm());
        // The roots must stay well separated relative to the step taken.
        if (r1 - r2).norm() < 4.0 * d1.min(d2) {
            return Err(Error::NoConvergence(format!("branch tracking lost near s = {sk}")));
        }
        z = if d1 <= d2 { r1 } else { r2 };
    }
    Ok(z)
}

/// [`deformed_branch_root`] at `bits` of precision: the branch is selected
/// in double precision, then both roots are recomputed exactly and the one
/// nearer the tracked value is returned.
pub fn deformed_branch_root_hp(s: f64, bits: u32) -> Result<Cx> {
    let approx = Cx::from_c64(bits, deformed_branch_root(s)?);
    let b = Cx::cis(&(Float::with_val(bits, pi(bits) * 2u32) * s));
    let one = Cx::one(bits);
    let p = &one - &b;
    let four_b = &b * &Cx::from_int(bits, 4);
    let disc = (&(&p * &p) - &four_b).sqrt();
    let half = Cx::from_f64(bits, 0.5, 0.0);
    let r1 = &(&disc - &p) * &half;
    let r2 = &(-(&p + &disc)) * &half;
    Ok(if r1.abs_diff(&approx) <= r2.abs_diff(&approx) { r1 } else { r2 })
}

/// `z₂(s) = log Z₂(s) / 2πi` on the branch with `z₂(1) = ¼`.
pub fn deformed_branch_z2(s: f64) -> Result<Complex64> {
    Ok(deformed_branch_root(s)?.ln() / TWO_PI_I)
}

fn check_deformation_radius(s: f64) -> Result<()> {
    if !s.is_finite() || (1.0 - s).abs() >= DEFORMATION_RADIUS {
        return Err(Error::Domain(format!("deformation ratio {s} outside |1 − s| < {DEFORMATION_RADIUS}")));
    }
    Ok(())
}

/// `2π·Re Φ^{(s)}(WL; ½, z₂(s))`, the volume of the Whitehead link
/// complement with the clasp cusp deformed by `u = 2πi(1 − s)`.
pub fn deformed_volume_wl(s: f64) -> Result<f64> {
    check_deformation_radius(s)?;
    let spec = build_potential(&LinkFamily::WhiteheadLink, Some(&Deformation::new(vec![1.0, s])))?;
    let z = [Complex64::new(0.5, 0.0), deformed_branch_z2(s)?];
    Ok(2.0 * PI * spec.eval(&z)?.re)
}

/// Predicted limit of the growth rate under colour ratios `deformation`.
///
/// Iterated doubles: `Vol(WL; s) + p·vol_wl + vol_fig8`;
/// `W^α_β`: `Vol(WL; s₁) + Vol(WL; s₂) + (α+β−2)·vol_wl`.  At the
/// complete structure every family reduces to its simplicial volume.
pub fn geometry_prediction(link: &LinkFamily, deformation: Option<&Deformation>) -> Result<f64> {
    link.validate()?;
    let vc = VolumeConstants::new();
    let s = ratios(link, deformation)?;
    if s.iter().all(|&x| x == 1.0) {
        return Ok(simplicial_volume(link, &vc));
    }
    match *link {
        LinkFamily::IteratedDoubleFigEight { p } => {
            Ok(deformed_volume_wl(s[0])? + f64::from(p) * vc.vol_wl + vc.vol_fig8)
        }
        LinkFamily::WAlphaBeta { alpha, beta } => match alpha + beta {
            1 => {
                // W¹₀ is the Whitehead link whose clasp carries the first colour.
                let clasp = if alpha == 1 { s[0] } else { s[1] };
                let other = if alpha == 1 { s[1] } else { s[0] };
                if other != 1.0 {
                    return Err(Error::Unsupported("W^1_0 deformations only in the clasp colour".into()));
                }
                deformed_volume_wl(clasp)
            }
            n => Ok(deformed_volume_wl(s[0])? + deformed_volume_wl(s[1])? + f64::from(n - 2) * vc.vol_wl),
        },
        LinkFamily::WhiteheadLink if s[0] == 1.0 => deformed_volume_wl(s[1]),
        _ => Err(Error::Unsupported(format!("no deformed volume formula for {link}"))),
    }
}

// ---------------------------------------------------------------------------
// Saddle-point ingredients and the growth envelope

/// The amplitude factor `E(z₁, z₂, z₃)` of the iterated double `p = 0`:
/// `exp(L(−z₁−z₂) − L(−z₂) − ½L(z₂) + ½L(z₁+z₂) − ½L(z₁) − ½L(2z₁−z₃)
/// + 3/2·L(2z₁+z₃))` with `L(x) = log(1 − e^{2πix})`.
pub fn e_factor(z: &[Complex64]) -> Result<Complex64> {
    if z.len() != 3 {
        return Err(Error::InvalidInput(format!("E-factor takes 3 coordinates, got {}", z.len())));
    }
    let l = |x: Complex64| -> Result<Complex64> { Ok((Complex64::new(1.0, 0.0) - exp_arg(x)?).ln()) };
    let (z1, z2, z3) = (z[0], z[1], z[2]);
    let e = l(-z1 - z2)? - l(-z2)? - 0.5 * l(z2)? + 0.5 * l(z1 + z2)? - 0.5 * l(z1)? - 0.5 * l(2.0 * z1 - z3)?
        + 1.5 * l(2.0 * z1 + z3)?;
    Ok(e.exp())
}

/// Empirical check of the normalization in the growth bound for
/// `g_M(k) = |(t)_{M+k}/(t)_{M−k−1}|` at `M = N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCalibration {
    pub n: u32,
    /// Maximizing `k`.
    pub k: i64,
    /// `(1/(N+½))·log max_k g_N(k)`.
    pub observed: f64,
    /// `−(1/2π)(Λ(π(k_s−1)) + Λ(π(k_s+1)))` at `k_s = 5/6`, Milnor's `Λ`.
    pub milnor: f64,
    /// The same expression with `Λ` doubled.
    pub doubled: f64,
}

impl EnvelopeCalibration {
    /// Whether the observed rate is closer to the doubled normalization.
    pub fn prefers_doubled(&self) -> bool {
        (self.observed - self.doubled).abs() < (self.observed - self.milnor).abs()
    }
}

pub fn envelope_calibration(ep: &EvalPoint) -> Result<EnvelopeCalibration> {
    let n = ep.N();
    let (k, v) = argmax_envelope_g(n, ep)?;
    let h = f64::from(n) + 0.5;
    let ks = 5.0 / 6.0;
    let milnor = -(lobachevsky(PI * (ks - 1.0)) + lobachevsky(PI * (ks + 1.0))) / (2.0 * PI);
    Ok(EnvelopeCalibration { n, k, observed: v.ln() / h, milnor, doubled: 2.0 * milnor })
}
