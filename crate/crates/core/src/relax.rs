//! Frank-Wolfe over the doubly stochastic relaxations, and the PATH continuation.
//!
//! With seeds first, `P = I ⊕ D` and every objective becomes a quadratic in the non-seed block
//! `D`. Objectives are kept as weighted sums of three term shapes so that value, gradient and
//! the exact line-search coefficients all come from the same code.

use nalgebra::DMatrix;
use serde_json::json;

use crate::error::{Error, Result};
use crate::frame::{
    ds_deviation, init_start, make_match, sinkhorn, Details, MatchResult, Partition, SeedSet,
    StartKind,
};
use crate::graph::Layers;
use crate::lap::{do_lap, CostMatrix, LapMethod, Sense};
use crate::matrix::{CsrMatrix, Matrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveKind {
    /// Maximize `Σ trace(Aᵀ P B Pᵀ) + <S, P>`.
    Indefinite,
    /// Minimize `Σ ||AP − PB||² − <S, P>`.
    Convex,
    /// Minimize `(1 − λ)·F0 + λ·F1 − <S, P>`, `F0` the convex and `F1` the concave relaxation.
    Path { lambda: f64 },
}

impl ObjectiveKind {
    fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::Indefinite => "indefinite",
            ObjectiveKind::Convex => "convex",
            ObjectiveKind::Path { .. } => "path",
        }
    }
}

/// Two graphs (any number of layers), seeds and optional similarity, padded to a common order.
#[derive(Debug, Clone)]
pub struct RelaxProblem {
    a: Layers,
    b: Layers,
    nnodes: (usize, usize),
    seeds: SeedSet,
    part: Partition,
    /// Non-seed block of the similarity, rows in A order, columns in B order.
    similarity: Option<DMatrix<f64>>,
    /// `Σ S[a, b]` over seed pairs, when the full similarity was given.
    similarity_seeded: f64,
    kind: ObjectiveKind,
}

impl RelaxProblem {
    /// `similarity` is either `n_a × n_b` (restricted internally to non-seeds) or already the
    /// `(n − s) × (n − s)` non-seed block.
    pub fn new(
        a: impl Into<Layers>,
        b: impl Into<Layers>,
        seeds: SeedSet,
        similarity: Option<DMatrix<f64>>,
        kind: ObjectiveKind,
    ) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        a.validate("A")?;
        b.validate("B")?;
        if a.len() != b.len() {
            return Err(Error::Dimension(format!(
                "A has {} layers but B has {}",
                a.len(),
                b.len()
            )));
        }
        let nnodes = (a.n(), b.n());
        let n = nnodes.0.max(nnodes.1);
        for &(sa, sb) in seeds.pairs() {
            if sa >= nnodes.0 {
                return Err(Error::VertexOutOfRange { vertex: sa, n: nnodes.0 });
            }
            if sb >= nnodes.1 {
                return Err(Error::VertexOutOfRange { vertex: sb, n: nnodes.1 });
            }
        }
        let part = Partition::new(&seeds, n);
        let m = part.n_free();
        let mut similarity_seeded = 0.0;
        let similarity = match similarity {
            None => None,
            Some(s) => {
                if s.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument("similarity has non-finite entries".into()));
                }
                if s.nrows() == nnodes.0 && s.ncols() == nnodes.1 {
                    similarity_seeded = seeds.pairs().iter().map(|&(a, b)| s[(a, b)]).sum();
                    let mut full = DMatrix::zeros(n, n);
                    full.view_mut((0, 0), (s.nrows(), s.ncols())).copy_from(&s);
                    Some(full.select_rows(&part.free_a).select_columns(&part.free_b))
                } else if s.nrows() == m && s.ncols() == m {
                    Some(s)
                } else {
                    return Err(Error::Dimension(format!(
                        "similarity is {}x{}, expected {}x{} or {m}x{m}",
                        s.nrows(),
                        s.ncols(),
                        nnodes.0,
                        nnodes.1
                    )));
                }
            }
        };
        if let ObjectiveKind::Path { lambda } = kind {
            if !(0.0..=1.0).contains(&lambda) {
                return Err(Error::InvalidArgument(format!("lambda {lambda} outside [0, 1]")));
            }
            if a.len() != 1 || !a.is_symmetric() || !b.is_symmetric() {
                return Err(Error::Precondition(
                    "PATH needs single-layer undirected graphs".into(),
                ));
            }
        }
        Ok(RelaxProblem {
            a: a.padded(n),
            b: b.padded(n),
            nnodes,
            seeds,
            part,
            similarity,
            similarity_seeded,
            kind,
        })
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn with_kind(&self, kind: ObjectiveKind) -> Result<Self> {
        if let ObjectiveKind::Path { .. } = kind {
            if self.a.len() != 1 || !self.a.is_symmetric() || !self.b.is_symmetric() {
                return Err(Error::Precondition(
                    "PATH needs single-layer undirected graphs".into(),
                ));
            }
        }
        Ok(RelaxProblem { kind, ..self.clone() })
    }

    /// Padded order.
    pub fn n(&self) -> usize {
        self.part.free_a.len() + self.seeds.len()
    }

    /// Size of the non-seed block.
    pub fn n_free(&self) -> usize {
        self.part.n_free()
    }

    pub fn seeds(&self) -> &SeedSet {
        &self.seeds
    }

    fn objective(&self) -> Objective {
        let sim_weight = match self.kind {
            ObjectiveKind::Indefinite => 1.0,
            _ => -1.0,
        };
        let mut obj = match self.kind {
            ObjectiveKind::Indefinite => self.indefinite_terms(),
            ObjectiveKind::Convex => self.convex_terms(),
            ObjectiveKind::Path { lambda } => {
                let mut f0 = self.convex_terms();
                f0.scale(1.0 - lambda);
                let mut f1 = self.concave_terms();
                f1.scale(lambda);
                f0.extend(f1);
                f0
            }
        };
        if let Some(s) = &self.similarity {
            obj.terms.push((sim_weight, Term::Linear(s.clone())));
            obj.constant += sim_weight * self.similarity_seeded;
        }
        obj
    }

    fn blocks(&self, m: &Matrix) -> Blocks {
        let p = &self.part;
        (
            m.submatrix(&p.seeds_a, &p.seeds_a),
            m.submatrix(&p.seeds_a, &p.free_a),
            m.submatrix(&p.free_a, &p.seeds_a),
            m.submatrix(&p.free_a, &p.free_a),
        )
    }

    fn blocks_b(&self, m: &Matrix) -> Blocks {
        let p = &self.part;
        (
            m.submatrix(&p.seeds_b, &p.seeds_b),
            m.submatrix(&p.seeds_b, &p.free_b),
            m.submatrix(&p.free_b, &p.seeds_b),
            m.submatrix(&p.free_b, &p.free_b),
        )
    }

    /// `Σ trace(Aᵀ P B Pᵀ)` restricted to `P = I ⊕ D`.
    fn bilinear_terms(&self, a: &Matrix, b: &Matrix) -> Objective {
        let mut obj = Objective::new(Sense::Max);
        let (a11, a12, a21, a22) = self.blocks(a);
        let (b11, b12, b21, b22) = self.blocks_b(b);
        if !self.seeds.is_empty() {
            obj.constant += a11.to_dense().component_mul(&b11.to_dense()).sum();
            let lin = a21.mul(&b21.to_dense().transpose()) + a12.tr_mul(&b12.to_dense());
            obj.terms.push((1.0, Term::Linear(lin)));
        }
        obj.terms.push((1.0, Term::Bilinear { a: a22, b: b22 }));
        obj
    }

    fn indefinite_terms(&self) -> Objective {
        let mut obj = Objective::new(Sense::Max);
        for (a, b) in self.a.iter().zip(self.b.iter()) {
            obj.extend(self.bilinear_terms(a, b));
        }
        obj
    }

    /// `Σ ||AP − PB||²` restricted to `P = I ⊕ D`.
    fn convex_terms(&self) -> Objective {
        let mut obj = Objective::new(Sense::Min);
        let m = self.n_free();
        for (a, b) in self.a.iter().zip(self.b.iter()) {
            let (a11, a12, a21, a22) = self.blocks(a);
            let (b11, b12, b21, b22) = self.blocks_b(b);
            if !self.seeds.is_empty() {
                obj.constant += (a11.to_dense() - b11.to_dense()).norm_squared();
                obj.terms.push((
                    1.0,
                    Term::Residual { left: Some(a12), right: None, target: b12.to_dense() },
                ));
                obj.terms.push((
                    1.0,
                    Term::Residual { left: None, right: Some(b21), target: -a21.to_dense() },
                ));
            }
            obj.terms.push((
                1.0,
                Term::Residual { left: Some(a22), right: Some(b22), target: DMatrix::zeros(m, m) },
            ));
        }
        obj
    }

    /// `−<Δ, P> − 2·trace(L_Aᵀ P L_B Pᵀ)` restricted to `P = I ⊕ D`.
    fn concave_terms(&self) -> Objective {
        let (a, b) = (&self.a.0[0], &self.b.0[0]);
        let (la, deg_a) = laplacian(a);
        let (lb, deg_b) = laplacian(b);
        let delta = DMatrix::from_fn(deg_a.len(), deg_b.len(), |i, j| (deg_a[i] - deg_b[j]).powi(2));
        let p = &self.part;
        let mut lap = self.bilinear_terms(&la, &lb);
        lap.scale(-2.0);
        lap.sense = Sense::Min;
        lap.constant -= p.seeds_a.iter().zip(&p.seeds_b).map(|(&i, &j)| delta[(i, j)]).sum::<f64>();
        let d22 = delta.select_rows(&p.free_a).select_columns(&p.free_b);
        lap.terms.push((-1.0, Term::Linear(d22)));
        lap
    }
}

type Blocks = (Matrix, Matrix, Matrix, Matrix);

/// Laplacian `Deg − A` and the degree vector (row sums).
fn laplacian(a: &Matrix) -> (Matrix, Vec<f64>) {
    let csr = a.to_csr();
    let deg = csr.row_sums();
    let n = csr.nrows();
    let trips = csr
        .iter()
        .map(|(i, j, w)| (i, j, -w))
        .chain((0..n).map(|i| (i, i, deg[i])));
    let l = CsrMatrix::from_triplets(n, n, trips.collect::<Vec<_>>()).expect("finite entries");
    (Matrix::Sparse(l), deg)
}

#[derive(Debug, Clone)]
enum Term {
    /// `<M, D>`
    Linear(DMatrix<f64>),
    /// `trace(aᵀ D b Dᵀ)`
    Bilinear { a: Matrix, b: Matrix },
    /// `||left·D − D·right − target||²`, either product optional.
    Residual { left: Option<Matrix>, right: Option<Matrix>, target: DMatrix<f64> },
}

fn inner(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    x.dot(y)
}

fn residual_map(left: &Option<Matrix>, right: &Option<Matrix>, d: &DMatrix<f64>) -> DMatrix<f64> {
    match (left, right) {
        (Some(l), Some(r)) => l.mul(d) - r.left_mul(d),
        (Some(l), None) => l.mul(d),
        (None, Some(r)) => -r.left_mul(d),
        (None, None) => d.clone(),
    }
}

fn residual_adjoint(left: &Option<Matrix>, right: &Option<Matrix>, y: &DMatrix<f64>) -> DMatrix<f64> {
    match (left, right) {
        (Some(l), Some(r)) => l.tr_mul(y) - r.left_mul_tr(y),
        (Some(l), None) => l.tr_mul(y),
        (None, Some(r)) => -r.left_mul_tr(y),
        (None, None) => y.clone(),
    }
}

impl Term {
    fn value(&self, d: &DMatrix<f64>) -> f64 {
        match self {
            Term::Linear(m) => inner(m, d),
            Term::Bilinear { a, b } => inner(d, &a.mul(&b.left_mul_tr(d))),
            Term::Residual { left, right, target } => {
                (residual_map(left, right, d) - target).norm_squared()
            }
        }
    }

    fn gradient(&self, d: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Term::Linear(m) => m.clone(),
            Term::Bilinear { a, b } => a.mul(&b.left_mul_tr(d)) + a.tr_mul(&b.left_mul(d)),
            Term::Residual { left, right, target } => {
                let r = residual_map(left, right, d) - target;
                residual_adjoint(left, right, &r) * 2.0
            }
        }
    }

    /// Second-order coefficient of the term along direction `r`.
    fn curvature(&self, r: &DMatrix<f64>) -> f64 {
        match self {
            Term::Linear(_) => 0.0,
            Term::Bilinear { .. } => self.value(r),
            Term::Residual { left, right, .. } => residual_map(left, right, r).norm_squared(),
        }
    }
}

#[derive(Debug, Clone)]
struct Objective {
    terms: Vec<(f64, Term)>,
    constant: f64,
    sense: Sense,
}

impl Objective {
    fn new(sense: Sense) -> Self {
        Objective { terms: Vec::new(), constant: 0.0, sense }
    }

    fn scale(&mut self, w: f64) {
        self.constant *= w;
        for t in &mut self.terms {
            t.0 *= w;
        }
    }

    fn extend(&mut self, other: Objective) {
        self.constant += other.constant;
        self.terms.extend(other.terms);
    }

    fn value(&self, d: &DMatrix<f64>) -> f64 {
        self.constant + self.terms.iter().map(|(w, t)| w * t.value(d)).sum::<f64>()
    }

    fn gradient(&self, d: &DMatrix<f64>) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(d.nrows(), d.ncols());
        for (w, t) in &self.terms {
            g += t.gradient(d) * *w;
        }
        g
    }

    fn curvature(&self, r: &DMatrix<f64>) -> f64 {
        self.terms.iter().map(|(w, t)| w * t.curvature(r)).sum()
    }

    /// Best step on `d + α(q − d)`, `α ∈ [0, 1]`, given the gradient at `d`.
    fn step(&self, grad: &DMatrix<f64>, d: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
        let r = q - d;
        let a = self.curvature(&r);
        let b = inner(grad, &r);
        best_alpha(a, b, self.sense)
    }
}

/// Optimizer of `aα² + bα` on `[0, 1]`; ties go to the larger step.
fn best_alpha(a: f64, b: f64, sense: Sense) -> f64 {
    let sign = if sense == Sense::Max { 1.0 } else { -1.0 };
    let g = |x: f64| sign * (a * x * x + b * x);
    let mut cands = vec![1.0];
    if a != 0.0 {
        let x = -b / (2.0 * a);
        if x > 0.0 && x < 1.0 {
            cands.push(x);
        }
    }
    cands.push(0.0);
    let scale = a.abs() + b.abs();
    let mut best = cands[0];
    for &c in &cands[1..] {
        if g(c) > g(best) + 1e-14 * scale {
            best = c;
        }
    }
    best
}

/// Gradient of the problem's objective with respect to the non-seed block `d`.
pub fn gradient(problem: &RelaxProblem, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_block(problem, d)?;
    Ok(problem.objective().gradient(d))
}

/// Objective value at `P = I ⊕ d`, seed-only parts included.
pub fn objective_value(problem: &RelaxProblem, d: &DMatrix<f64>) -> Result<f64> {
    check_block(problem, d)?;
    Ok(problem.objective().value(d))
}

/// Exact step along the segment from `d` to `q`: maximizes for the indefinite objective,
/// minimizes otherwise.
pub fn line_search(problem: &RelaxProblem, d: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<f64> {
    check_block(problem, d)?;
    check_block(problem, q)?;
    let obj = problem.objective();
    Ok(obj.step(&obj.gradient(d), d, q))
}

fn check_block(problem: &RelaxProblem, d: &DMatrix<f64>) -> Result<()> {
    let m = problem.n_free();
    if d.nrows() != m || d.ncols() != m {
        return Err(Error::Dimension(format!(
            "expected a {m}x{m} non-seed block, got {}x{}",
            d.nrows(),
            d.ncols()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum FwStart {
    Bari,
    Rds,
    /// Solve the convex relaxation from the barycenter and start from its solution.
    Convex,
    /// A given non-seed block; balanced with Sinkhorn if it is not doubly stochastic.
    Explicit(DMatrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FwConfig {
    pub start: FwStart,
    pub max_iter: usize,
    /// Threshold on `||D_i − D_{i−1}||²_F`.
    pub tol: f64,
    pub lap_method: LapMethod,
    pub rng_seed: u64,
}

impl Default for FwConfig {
    fn default() -> Self {
        FwConfig {
            start: FwStart::Bari,
            max_iter: 20,
            tol: 1e-5,
            lap_method: LapMethod::Dense,
            rng_seed: 0,
        }
    }
}

impl FwConfig {
    fn check(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Largest margin deviation tolerated before an iterate is re-balanced.
const DRIFT_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
struct FwRun {
    d: DMatrix<f64>,
    iter: usize,
    converged: bool,
    trace: Vec<f64>,
    renormalizations: usize,
}

fn frank_wolfe(obj: &Objective, d0: DMatrix<f64>, cfg: &FwConfig) -> Result<FwRun> {
    let mut d = d0;
    let mut trace = vec![obj.value(&d)];
    let mut renormalizations = 0;
    let mut converged = false;
    let mut iter = 0;
    let m = d.nrows();
    while iter < cfg.max_iter && m > 0 {
        iter += 1;
        let grad = obj.gradient(&d);
        let lap = do_lap(&CostMatrix::Dense(grad.clone()), cfg.lap_method, obj.sense)?;
        let mut q = DMatrix::zeros(m, m);
        for (i, &j) in lap.mapping.iter().enumerate() {
            q[(i, j)] = 1.0;
        }
        let alpha = obj.step(&grad, &d, &q);
        let step = (&q - &d) * alpha;
        d += &step;
        if ds_deviation(&d) > DRIFT_TOL {
            d = sinkhorn(&d.map(|v| v.max(0.0)), 1e-10, 10_000)?;
            renormalizations += 1;
        }
        trace.push(obj.value(&d));
        if step.norm_squared() < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(FwRun { d, iter, converged, trace, renormalizations })
}

fn start_block(problem: &RelaxProblem, cfg: &FwConfig) -> Result<DMatrix<f64>> {
    let m = problem.n_free();
    let ns = problem.seeds.len();
    let none = SeedSet::empty();
    let ds = match &cfg.start {
        FwStart::Bari => init_start(&StartKind::Bari, m, ns, &none, cfg.rng_seed)?,
        FwStart::Rds => init_start(&StartKind::Rds, m, ns, &none, cfg.rng_seed)?,
        FwStart::Explicit(x) => {
            if x.nrows() == m && x.ncols() == m && ds_deviation(x) <= crate::frame::DS_TOL {
                return Ok(x.clone());
            }
            init_start(&StartKind::Matrix(x.clone()), m, ns, &none, cfg.rng_seed)?
        }
        FwStart::Convex => {
            let convex = problem.with_kind(ObjectiveKind::Convex)?;
            let inner = FwConfig { start: FwStart::Bari, ..cfg.clone() };
            let bari = start_block(&convex, &inner)?;
            return Ok(frank_wolfe(&convex.objective(), bari, &inner)?.d);
        }
    };
    Ok(ds.into_matrix())
}

/// Projects the block onto a permutation and assembles the result.
fn finish(
    problem: &RelaxProblem,
    d: &DMatrix<f64>,
    method: LapMethod,
    mut details: Details,
) -> Result<MatchResult> {
    let p = &problem.part;
    let mut corr: Vec<(usize, usize)> = problem.seeds.pairs().to_vec();
    if d.nrows() > 0 {
        let a = do_lap(&CostMatrix::Dense(d.clone()), method, Sense::Max)?;
        corr.extend(a.mapping.iter().enumerate().map(|(i, &j)| (p.free_a[i], p.free_b[j])));
    }
    let n = problem.n();
    let mut soft = DMatrix::zeros(n, n);
    for &(a, b) in problem.seeds.pairs() {
        soft[(a, b)] = 1.0;
    }
    for (bi, &i) in p.free_a.iter().enumerate() {
        for (bj, &j) in p.free_b.iter().enumerate() {
            soft[(i, j)] = d[(bi, bj)];
        }
    }
    details.insert("lap_method".into(), json!(method.to_string()));
    make_match(corr, problem.nnodes, &problem.seeds, Some(soft), details)
}

/// Frank-Wolfe on the problem's relaxation, then projection to the nearest permutation.
pub fn gm_fw(problem: &RelaxProblem, config: &FwConfig) -> Result<MatchResult> {
    config.check()?;
    let d0 = start_block(problem, config)?;
    let run = frank_wolfe(&problem.objective(), d0, config)?;
    let mut details = Details::new();
    details.insert("method".into(), json!(problem.kind.name()));
    details.insert("iter".into(), json!(run.iter));
    details.insert("converged".into(), json!(run.converged));
    details.insert("max_iter".into(), json!(config.max_iter));
    details.insert("tol".into(), json!(config.tol));
    details.insert("objective".into(), json!(run.trace.last()));
    details.insert("objective_trace".into(), json!(run.trace));
    details.insert("renormalizations".into(), json!(run.renormalizations));
    finish(problem, &run.d, config.lap_method, details)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathConfig {
    pub lambda_step: f64,
    /// The continuation stops once `||D − P||²_F < epsilon` for the permutation `P` nearest `D`.
    pub epsilon: f64,
    pub fw: FwConfig,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig { lambda_step: 0.01, epsilon: 1.0, fw: FwConfig::default() }
    }
}

fn distance_to_permutation(d: &DMatrix<f64>, method: LapMethod) -> Result<f64> {
    let a = do_lap(&CostMatrix::Dense(d.clone()), method, Sense::Max)?;
    // ||D − P||² = ||D||² − 2<D, P> + m
    Ok(d.norm_squared() - 2.0 * a.objective + d.nrows() as f64)
}

/// PATH: convex solution first, then Frank-Wolfe along `F_λ` for increasing `λ`.
pub fn gm_path(problem: &RelaxProblem, config: &PathConfig) -> Result<MatchResult> {
    config.fw.check()?;
    if !(config.lambda_step > 0.0 && config.lambda_step <= 1.0) {
        return Err(Error::InvalidArgument("lambda_step must lie in (0, 1]".into()));
    }
    let convex = problem.with_kind(ObjectiveKind::Path { lambda: 0.0 })?;
    let cfg = &config.fw;
    let d0 = start_block(&convex.with_kind(ObjectiveKind::Convex)?, cfg)?;
    let mut run = frank_wolfe(&convex.objective(), d0, cfg)?;
    let mut total_iter = run.iter;
    let mut lambda = 0.0;
    let mut steps = 0usize;
    let mut renorm = run.renormalizations;
    while lambda < 1.0 {
        if distance_to_permutation(&run.d, cfg.lap_method)? < config.epsilon && lambda > 0.0 {
            break;
        }
        steps += 1;
        lambda = (steps as f64 * config.lambda_step).min(1.0);
        let obj = problem.with_kind(ObjectiveKind::Path { lambda })?.objective();
        run = frank_wolfe(&obj, run.d, cfg)?;
        total_iter += run.iter;
        renorm += run.renormalizations;
    }
    let mut details = Details::new();
    details.insert("method".into(), json!("path"));
    details.insert("iter".into(), json!(total_iter));
    details.insert("lambda".into(), json!(lambda));
    details.insert("lambda_steps".into(), json!(steps));
    details.insert("max_iter".into(), json!(cfg.max_iter));
    details.insert("tol".into(), json!(cfg.tol));
    details.insert("epsilon".into(), json!(config.epsilon));
    details.insert("renormalizations".into(), json!(renorm));
    finish(problem, &run.d, cfg.lap_method, details)
}
