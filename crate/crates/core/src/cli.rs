//! Command-line front end: sampling, matching, evaluation and the experiment recipes.
//!
//! Every command is deterministic given its flags, including `--seed`. Reports go to stdout
//! as JSON carrying `schema_version` (rankings are CSV); artifacts go to files named after
//! `--out`. Errors map to exit codes through [`Error::exit_code`].

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::frame::{init_start, MatchResult, Partition, SeedSet, StartKind};
use crate::gm::{gm, Method};
use crate::graph::{center_graph, CenterScheme, LayeredGraph, Layers};
use crate::io::{self, EdgeListOptions};
use crate::lap::{do_lap, CostMatrix, LapMethod, Sense};
use crate::matrix::Matrix;
use crate::metrics::{
    best_matches, discrepancy, edge_correctness, lccs_size, map_at_k, match_summary_with,
    BestMatchOptions, Counting, Measure, DEFAULT_N_MC,
};
use crate::models::{
    sample_correlated_gnp_pair, sample_correlated_ieg_pair, sample_correlated_rdpg_pair,
    sample_correlated_sbm_pair, CorrGnpParams, PairOptions,
};
use crate::relax::{FwConfig, FwStart};
use crate::rng;
use crate::spectral::Extraction;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

fn parse_from_str<T: FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "graphmatch", version, about = "Seeded graph matching and match diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Match two graphs and write the correspondence.
    Match(MatchCmd),
    /// Solve a linear assignment problem from a cost matrix.
    Lap(LapCmd),
    /// Sample a correlated graph pair.
    Sample(SampleCmd),
    /// Edge summary of a correspondence.
    Summary(SummaryCmd),
    /// Rank non-seed matches by a vertex statistic.
    BestMatches(BestMatchesCmd),
    /// Re-match with the best-ranked pairs as hard or soft seeds.
    AdaptiveSeeds(AdaptiveCmd),
    /// Precision and MAP@k of a soft matching.
    MapAtK(MapAtKCmd),
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Edge list of graph A.
    #[arg(long)]
    pub a: PathBuf,
    /// Edge list of graph B.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub loops: bool,
    /// Vertex indices in all input and output files start at 1.
    #[arg(long)]
    pub one_based: bool,
    /// Column (1-based) holding layer labels.
    #[arg(long, default_value_t = 4)]
    pub layer_column: usize,
    /// Order of A, when it has isolated vertices past the last listed one.
    #[arg(long)]
    pub n_a: Option<usize>,
    #[arg(long)]
    pub n_b: Option<usize>,
}

impl GraphArgs {
    fn load(&self) -> Result<(LayeredGraph, LayeredGraph)> {
        let opts = |n| EdgeListOptions {
            directed: self.directed,
            loops: self.loops,
            one_based: self.one_based,
            n,
            layer_column: self.layer_column,
        };
        let a = io::read_edge_list(&self.a, &opts(self.n_a))?.into_layers();
        let b = io::read_edge_list(&self.b, &opts(self.n_b))?.into_layers();
        Ok((a, b))
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct PriorArgs {
    /// Hard seeds, CSV of `a,b` pairs.
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// Similarity as a dense CSV (rows A, columns B).
    #[arg(long)]
    pub similarity: Option<PathBuf>,
    /// Similarity as `a,b,value` triplets.
    #[arg(long, conflicts_with = "similarity")]
    pub similarity_triplets: Option<PathBuf>,
    /// Similarity from candidate pairs `a,b`: each row spreads `scale` evenly over its candidates.
    #[arg(long, conflicts_with_all = ["similarity", "similarity_triplets"])]
    pub similarity_from_candidates: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

impl PriorArgs {
    fn load(&self, one_based: bool, na: usize, nb: usize) -> Result<(SeedSet, Option<DMatrix<f64>>)> {
        let seeds = match &self.seeds {
            Some(p) => io::parse_seeds(&io::read_text(p)?, &p.display().to_string(), one_based, na, nb)?,
            None => SeedSet::empty(),
        };
        let name = |p: &Path| p.display().to_string();
        let sim = if let Some(p) = &self.similarity {
            Some(io::parse_dense(&io::read_text(p)?, &name(p))?)
        } else if let Some(p) = &self.similarity_triplets {
            let t = io::parse_triplets(&io::read_text(p)?, &name(p), one_based)?;
            Some(io::triplets_to_dense(&t, na, nb)?)
        } else if let Some(p) = &self.similarity_from_candidates {
            let pairs: Vec<_> = io::parse_pairs(&io::read_text(p)?, &name(p), one_based)?
                .into_iter()
                .map(|r| r.0)
                .collect();
            Some(io::similarity_from_candidates(&pairs, na, nb, self.scale)?)
        } else {
            None
        };
        Ok((seeds, sim))
    }
}

#[derive(Args, Debug, Clone)]
pub struct MethodArgs {
    /// indefinite, convex, path, percolation, expand, isorank or umeyama.
    #[arg(long, default_value = "indefinite")]
    pub method: String,
    /// Frank-Wolfe start: bari, rds or convex.
    #[arg(long, default_value = "bari")]
    pub start: String,
    /// Soft seeds, CSV of `a,b` pairs placed in the start matrix.
    #[arg(long)]
    pub soft_seeds: Option<PathBuf>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// dense, sparse or auto.
    #[arg(long, value_parser = parse_from_str::<LapMethod>)]
    pub lap_method: Option<LapMethod>,
    #[arg(long)]
    pub lambda_step: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Percolation threshold.
    #[arg(long)]
    pub r: Option<f64>,
    /// IsoRank extraction: lap or greedy.
    #[arg(long, value_parser = parse_from_str::<Extraction>)]
    pub extraction: Option<Extraction>,
    /// Centering applied to both graphs before matching: center, naive or a rank.
    #[arg(long)]
    pub center: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_center(s: &str) -> Result<CenterScheme> {
    match s {
        "center" => Ok(CenterScheme::Center),
        "naive" => Ok(CenterScheme::Naive),
        _ => s
            .parse::<usize>()
            .map(CenterScheme::Rank)
            .map_err(|_| Error::InvalidArgument(format!("unknown centering '{s}'"))),
    }
}

/// Soft seeds as a start block over the non-seed vertices of the padded problem.
fn soft_start(soft: &[(usize, usize)], hard: &SeedSet, n: usize, rng_seed: u64) -> Result<DMatrix<f64>> {
    let part = Partition::new(hard, n);
    let pos = |free: &[usize], v: usize| free.iter().position(|&x| x == v);
    let mut pairs = Vec::new();
    for &(a, b) in soft {
        match (pos(&part.free_a, a), pos(&part.free_b, b)) {
            (Some(i), Some(j)) => pairs.push((i, j)),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "soft seed ({a}, {b}) overlaps a hard seed"
                )))
            }
        }
    }
    let nns = part.n_free();
    let set = SeedSet::new(pairs, nns, nns)?;
    Ok(init_start(&StartKind::Bari, nns, 0, &set, rng_seed)?.into_matrix())
}

impl MethodArgs {
    fn build(&self, soft: &[(usize, usize)], hard: &SeedSet, n: usize) -> Result<Method> {
        let mut method = Method::from_name(&self.method)?;
        let fw = |c: &mut FwConfig| -> Result<()> {
            c.start = match self.start.as_str() {
                "bari" => FwStart::Bari,
                "rds" => FwStart::Rds,
                "convex" => FwStart::Convex,
                s => return Err(Error::InvalidArgument(format!("unknown start '{s}'"))),
            };
            if !soft.is_empty() {
                c.start = FwStart::Explicit(soft_start(soft, hard, n, self.seed)?);
            }
            if let Some(v) = self.max_iter {
                c.max_iter = v;
            }
            if let Some(v) = self.tol {
                c.tol = v;
            }
            if let Some(v) = self.lap_method {
                c.lap_method = v;
            }
            c.rng_seed = self.seed;
            Ok(())
        };
        match &mut method {
            Method::Indefinite(c) | Method::Convex(c) => fw(c)?,
            Method::Path(p) => {
                fw(&mut p.fw)?;
                if let Some(v) = self.lambda_step {
                    p.lambda_step = v;
                }
                if let Some(v) = self.epsilon {
                    p.epsilon = v;
                }
            }
            Method::Percolation { r } | Method::ExpandWhenStuck { r } => {
                if let Some(v) = self.r {
                    *r = v;
                }
            }
            Method::IsoRank(c) => {
                if let Some(v) = self.max_iter {
                    c.max_iter = v;
                }
                if let Some(v) = self.tol {
                    c.tol = v;
                }
                if let Some(v) = self.extraction {
                    c.extraction = v;
                }
                if let Some(v) = self.lap_method {
                    c.lap_method = v;
                }
            }
            Method::Umeyama { lap_method } => {
                if let Some(v) = self.lap_method {
                    *lap_method = v;
                }
            }
        }
        if !soft.is_empty() && !matches!(method, Method::Indefinite(_) | Method::Convex(_) | Method::Path(_)) {
            return Err(Error::InvalidArgument(format!(
                "soft seeds need a Frank-Wolfe method, not {}",
                method.name()
            )));
        }
        Ok(method)
    }

    fn operands(&self, g: &LayeredGraph) -> Result<Layers> {
        match &self.center {
            None => Ok(g.into()),
            Some(s) => {
                let scheme = parse_center(s)?;
                let layers = g
                    .layers()
                    .iter()
                    .map(|l| center_graph(l, scheme).map(Matrix::Splr))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Layers(layers))
            }
        }
    }
}

/// Loaded inputs of a matching run.
struct Problem {
    a: LayeredGraph,
    b: LayeredGraph,
    seeds: SeedSet,
    similarity: Option<DMatrix<f64>>,
    soft: Vec<(usize, usize)>,
    one_based: bool,
}

impl Problem {
    fn load(g: &GraphArgs, prior: &PriorArgs, method: &MethodArgs) -> Result<Problem> {
        let (a, b) = g.load()?;
        let (seeds, similarity) = prior.load(g.one_based, a.n(), b.n())?;
        let soft = match &method.soft_seeds {
            Some(p) => io::parse_pairs(&io::read_text(p)?, &p.display().to_string(), g.one_based)?
                .into_iter()
                .map(|r| r.0)
                .collect(),
            None => Vec::new(),
        };
        Ok(Problem { a, b, seeds, similarity, soft, one_based: g.one_based })
    }

    fn n(&self) -> usize {
        self.a.n().max(self.b.n())
    }

    fn run(&self, args: &MethodArgs, seeds: &SeedSet, soft: &[(usize, usize)]) -> Result<MatchResult> {
        let method = args.build(soft, seeds, self.n())?;
        gm(
            args.operands(&self.a)?,
            args.operands(&self.b)?,
            seeds,
            self.similarity.as_ref(),
            &method,
        )
    }

    fn truth(&self, path: &Option<PathBuf>) -> Result<Option<Vec<usize>>> {
        path.as_ref()
            .map(|p| {
                io::parse_truth(&io::read_text(p)?, &p.display().to_string(), self.one_based, self.a.n(), self.b.n())
            })
            .transpose()
    }
}

#[derive(Args, Debug)]
pub struct MatchCmd {
    #[command(flatten)]
    pub graphs: GraphArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Output prefix: writes PREFIX.corr.csv and PREFIX.details.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the soft matrix to PREFIX.soft.csv.
    #[arg(long)]
    pub emit_soft: bool,
    /// True correspondence, for the report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn summary_json(
    m: &MatchResult,
    a: &LayeredGraph,
    b: &LayeredGraph,
    truth: Option<&[usize]>,
    counting: Counting,
) -> Result<Value> {
    let s = match_summary_with(m, a, b, truth, counting)?;
    let ec = edge_correctness(&s).ok();
    Ok(json!({
        "summary": s,
        "edge_correctness": ec,
        "lccs": lccs_size(m, a, b)?,
    }))
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Numerical(e.to_string()))?;
    stdout_result(writeln!(out, "{text}"))
}

/// A reader that stopped early (`| head`) is not an error.
fn stdout_result(r: std::io::Result<()>) -> Result<()> {
    match r {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(Error::Io { path: "stdout".into(), msg: e.to_string() })
        }
        _ => Ok(()),
    }
}

fn cmd_match(c: &MatchCmd, out: &mut dyn Write) -> Result<()> {
    let p = Problem::load(&c.graphs, &c.prior, &c.method)?;
    let m = p.run(&c.method, &p.seeds, &p.soft)?;
    let corr_path = with_suffix(&c.out, ".corr.csv");
    let details_path = with_suffix(&c.out, ".details.json");
    io::write_text(&corr_path, &io::format_correspondence(&m, p.one_based))?;
    let details = json!({
        "schema_version": SCHEMA_VERSION,
        "method": c.method.method,
        "nnodes": m.nnodes(),
        "details": m.details,
    });
    io::write_text(&details_path, &serde_json::to_string_pretty(&details).expect("json values"))?;
    let mut files = vec![corr_path.display().to_string(), details_path.display().to_string()];
    if c.emit_soft {
        let soft = m.soft.as_ref().ok_or_else(|| {
            Error::Precondition(format!("method {} produces no soft matrix", c.method.method))
        })?;
        let path = with_suffix(&c.out, ".soft.csv");
        io::write_text(&path, &io::format_dense(soft))?;
        files.push(path.display().to_string());
    }
    let truth = p.truth(&c.truth)?;
    let mut report = summary_json(&m, &p.a, &p.b, truth.as_deref(), Counting::Standard)?;
    report["schema_version"] = json!(SCHEMA_VERSION);
    report["command"] = json!("match");
    report["method"] = json!(c.method.method);
    report["files"] = json!(files);
    emit(out, &report)
}

#[derive(Args, Debug)]
pub struct LapCmd {
    /// Dense cost CSV.
    #[arg(long)]
    pub cost: Option<PathBuf>,
    /// Sparse cost as `row,col,value` triplets; absent entries are forbidden.
    #[arg(long, conflicts_with = "cost")]
    pub cost_triplets: Option<PathBuf>,
    #[arg(long)]
    pub nrows: Option<usize>,
    #[arg(long)]
    pub ncols: Option<usize>,
    #[arg(long, default_value = "dense", value_parser = parse_from_str::<LapMethod>)]
    pub lap_method: LapMethod,
    #[arg(long)]
    pub maximize: bool,
    #[arg(long)]
    pub one_based: bool,
}

fn cmd_lap(c: &LapCmd, out: &mut dyn Write) -> Result<()> {
    let cost = if let Some(p) = &c.cost {
        CostMatrix::dense(io::parse_dense(&io::read_text(p)?, &p.display().to_string())?)
    } else if let Some(p) = &c.cost_triplets {
        let t = io::parse_triplets(&io::read_text(p)?, &p.display().to_string(), c.one_based)?;
        let nr = c.nrows.unwrap_or_else(|| t.iter().map(|e| e.0 + 1).max().unwrap_or(0));
        let nc = c.ncols.unwrap_or_else(|| t.iter().map(|e| e.1 + 1).max().unwrap_or(0));
        CostMatrix::sparse(nr, nc, t)?
    } else {
        return Err(Error::InvalidArgument("give --cost or --cost-triplets".into()));
    };
    let sense = if c.maximize { Sense::Max } else { Sense::Min };
    let a = do_lap(&cost, c.lap_method, sense)?;
    let off = c.one_based as usize;
    let pairs: Vec<[usize; 2]> = a
        .mapping
        .iter()
        .enumerate()
        .map(|(i, &j)| [i + off, j + off])
        .collect();
    emit(
        out,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "lap",
            "objective": a.objective,
            "lap_method": a.method,
            "mapping": pairs,
        }),
    )
}

#[derive(Args, Debug)]
pub struct SampleCmd {
    /// gnp, sbm, ieg or rdpg.
    #[arg(long, default_value = "gnp")]
    pub model: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub corr: f64,
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub loops: bool,
    /// Vertices below this index are correlated, the rest are junk.
    #[arg(long)]
    pub ncore: Option<usize>,
    /// Block sizes for sbm, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub block_sizes: Vec<usize>,
    /// Core block sizes for sbm, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub core_block_sizes: Vec<usize>,
    /// Block preference matrix (sbm), edge probabilities (ieg) or latent positions (rdpg), dense CSV.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Per-entry correlations for ieg, dense CSV; `--corr` everywhere when absent.
    #[arg(long)]
    pub corr_matrix: Option<PathBuf>,
    /// identity or shuffle.
    #[arg(long, default_value = "identity")]
    pub permutation: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub one_based: bool,
    /// Output prefix: writes PREFIX.a.tsv, PREFIX.b.tsv and PREFIX.truth.csv.
    #[arg(long)]
    pub out: PathBuf,
}

fn cmd_sample(c: &SampleCmd, out: &mut dyn Write) -> Result<()> {
    let matrix = |what: &str| -> Result<DMatrix<f64>> {
        let p = c
            .matrix
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("--matrix ({what}) is required for {}", c.model)))?;
        io::parse_dense(&io::read_text(p)?, &p.display().to_string())
    };
    let n = match c.model.as_str() {
        "gnp" => c.n.ok_or_else(|| Error::InvalidArgument("--n is required for gnp".into()))?,
        "sbm" => c.block_sizes.iter().sum(),
        "ieg" | "rdpg" => matrix("size")?.nrows(),
        m => return Err(Error::InvalidArgument(format!("unknown model '{m}'"))),
    };
    let permutation = match c.permutation.as_str() {
        "identity" => None,
        // stream 1 keeps the relabeling independent of the edge draws
        "shuffle" => Some(rng::permutation(n, &mut rng::stream(c.seed, 1))),
        s => return Err(Error::InvalidArgument(format!("unknown permutation '{s}'"))),
    };
    let opts = PairOptions {
        directed: c.directed,
        loops: c.loops,
        ncore: c.ncore,
        permutation: permutation.clone(),
    };
    let (a, b) = match c.model.as_str() {
        "gnp" => {
            let p = c.p.ok_or_else(|| Error::InvalidArgument("--p is required for gnp".into()))?;
            let params = CorrGnpParams { options: opts, ..CorrGnpParams::new(n, p, c.corr) };
            sample_correlated_gnp_pair(&params, c.seed)?
        }
        "sbm" => {
            let core = (!c.core_block_sizes.is_empty()).then_some(c.core_block_sizes.as_slice());
            sample_correlated_sbm_pair(&c.block_sizes, &matrix("preference")?, c.corr, core, &opts, c.seed)?
        }
        "ieg" => {
            let p = matrix("probabilities")?;
            let cm = match &c.corr_matrix {
                Some(f) => io::parse_dense(&io::read_text(f)?, &f.display().to_string())?,
                None => DMatrix::from_element(p.nrows(), p.ncols(), c.corr),
            };
            sample_correlated_ieg_pair(&p, &cm, &opts, c.seed)?
        }
        _ => sample_correlated_rdpg_pair(&matrix("latent positions")?, c.corr, &opts, c.seed)?,
    };
    let write_graph = |suffix: &str, g: crate::graph::Graph| -> Result<String> {
        let path = with_suffix(&c.out, suffix);
        let text = format!("# n = {}\n{}", g.n(), io::format_edge_list(&LayeredGraph::new(vec![g])?, c.one_based));
        io::write_text(&path, &text)?;
        Ok(path.display().to_string())
    };
    let files = [write_graph(".a.tsv", a)?, write_graph(".b.tsv", b)?];
    let off = c.one_based as usize;
    let perm = permutation.unwrap_or_else(|| (0..n).collect());
    let mut truth = String::from("corr_A,corr_B,seed\n");
    for (i, &j) in perm.iter().enumerate() {
        truth.push_str(&format!("{},{},0\n", i + off, j + off));
    }
    let truth_path = with_suffix(&c.out, ".truth.csv");
    io::write_text(&truth_path, &truth)?;
    emit(
        out,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "sample",
            "model": c.model,
            "n": n,
            "files": [files[0], files[1], truth_path.display().to_string()],
        }),
    )
}

#[derive(Args, Debug)]
pub struct SummaryCmd {
    #[command(flatten)]
    pub graphs: GraphArgs,
    /// Correspondence CSV.
    #[arg(long)]
    pub corr: PathBuf,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// standard or literal.
    #[arg(long, default_value = "standard")]
    pub counting: String,
    /// Write the per-layer discrepancy matrix (0 none, 1 common, 2 only in A, 3 only in B)
    /// to this CSV; layers after the first get a `.layerK` suffix.
    #[arg(long)]
    pub emit_discrepancy: Option<PathBuf>,
}

fn load_match(g: &GraphArgs, corr: &Path, a: &LayeredGraph, b: &LayeredGraph) -> Result<MatchResult> {
    io::parse_correspondence(&io::read_text(corr)?, &corr.display().to_string(), g.one_based, (a.n(), b.n()))
}

fn cmd_summary(c: &SummaryCmd, out: &mut dyn Write) -> Result<()> {
    let (a, b) = c.graphs.load()?;
    let m = load_match(&c.graphs, &c.corr, &a, &b)?;
    let counting = match c.counting.as_str() {
        "standard" => Counting::Standard,
        "literal" => Counting::Literal,
        s => return Err(Error::InvalidArgument(format!("unknown counting '{s}'"))),
    };
    let truth = match &c.truth {
        Some(p) => Some(io::parse_truth(&io::read_text(p)?, &p.display().to_string(), c.graphs.one_based, a.n(), b.n())?),
        None => None,
    };
    let mut report = summary_json(&m, &a, &b, truth.as_deref(), counting)?;
    if let Some(path) = &c.emit_discrepancy {
        for (l, d) in discrepancy(&m, &a, &b)?.iter().enumerate() {
            let p = if l == 0 { path.clone() } else { with_suffix(path, &format!(".layer{}", l + 1)) };
            io::write_text(&p, &io::format_dense(d))?;
        }
    }
    report["schema_version"] = json!(SCHEMA_VERSION);
    report["command"] = json!("summary");
    emit(out, &report)
}

#[derive(Args, Debug)]
pub struct BestMatchesCmd {
    #[command(flatten)]
    pub graphs: GraphArgs,
    #[arg(long)]
    pub corr: PathBuf,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// row_diff, row_cor, row_perm_stat or row_perm_cor.
    #[arg(long, default_value = "row_perm_stat", value_parser = parse_from_str::<Measure>)]
    pub measure: Measure,
    #[arg(long)]
    pub num: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_N_MC)]
    pub n_mc: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn cmd_best_matches(c: &BestMatchesCmd, out: &mut dyn Write) -> Result<()> {
    let (a, b) = c.graphs.load()?;
    let m = load_match(&c.graphs, &c.corr, &a, &b)?;
    let truth = match &c.truth {
        Some(p) => Some(io::parse_truth(&io::read_text(p)?, &p.display().to_string(), c.graphs.one_based, a.n(), b.n())?),
        None => None,
    };
    let opts = BestMatchOptions { measure: c.measure, num: c.num, n_mc: c.n_mc, rng_seed: c.seed };
    let rows = best_matches(&m, &a, &b, &opts, truth.as_deref())?;
    let off = c.graphs.one_based as usize;
    let mut text = String::from(if truth.is_some() {
        "A_best,B_best,measure_value,precision\n"
    } else {
        "A_best,B_best,measure_value\n"
    });
    for r in rows {
        let v = r.measure_value.map_or("NA".to_string(), io::fmt_real);
        text.push_str(&format!("{},{},{v}", r.a_vertex + off, r.b_vertex + off));
        if let Some(p) = r.precision {
            text.push_str(&format!(",{}", io::fmt_real(p)));
        }
        text.push('\n');
    }
    stdout_result(out.write_all(text.as_bytes()))
}

#[derive(Args, Debug)]
pub struct AdaptiveCmd {
    #[command(flatten)]
    pub graphs: GraphArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Numbers of top-ranked pairs to promote, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub ns: Vec<usize>,
    /// Promote pairs to soft seeds in the start matrix instead of hard seeds.
    #[arg(long)]
    pub soft: bool,
    #[arg(long, default_value = "row_perm_stat", value_parser = parse_from_str::<Measure>)]
    pub measure: Measure,
    #[arg(long, default_value_t = DEFAULT_N_MC)]
    pub n_mc: usize,
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

/// One row of the adaptive-seeding table.
pub fn adaptive_row(
    ns: usize,
    m: &MatchResult,
    a: &LayeredGraph,
    b: &LayeredGraph,
    truth: Option<&[usize]>,
    promoted: &[(usize, usize)],
) -> Result<Value> {
    let s = match_summary_with(m, a, b, None, Counting::Standard)?;
    let sum = |f: fn(&crate::metrics::LayerSummary) -> f64| s.layers.iter().map(f).sum::<f64>();
    let precision = truth.map(|t| {
        let hits = m.corr().iter().filter(|&&(i, j)| t[i] == j).count();
        hits as f64 / m.len().max(1) as f64
    });
    let seed_precision = truth.filter(|_| !promoted.is_empty()).map(|t| {
        promoted.iter().filter(|&&(i, j)| t[i] == j).count() as f64 / promoted.len() as f64
    });
    Ok(json!({
        "ns": ns,
        "precision": precision,
        "seed_precision": seed_precision,
        "common_edges": sum(|l| l.common_edges),
        "missing_edges": sum(|l| l.missing_edges),
        "extra_edges": sum(|l| l.extra_edges),
        "edge_correctness": edge_correctness(&s).ok(),
    }))
}

fn cmd_adaptive(c: &AdaptiveCmd, out: &mut dyn Write) -> Result<()> {
    let p = Problem::load(&c.graphs, &c.prior, &c.method)?;
    let truth = p.truth(&c.truth)?;
    let first = p.run(&c.method, &p.seeds, &p.soft)?;
    let opts = BestMatchOptions { measure: c.measure, num: None, n_mc: c.n_mc, rng_seed: c.method.seed };
    let ranking = best_matches(&first, &p.a, &p.b, &opts, None)?;
    let mut rows = Vec::new();
    for &ns in &c.ns {
        if ns > ranking.len() {
            return Err(Error::InvalidArgument(format!(
                "ns = {ns} exceeds the {} ranked matches",
                ranking.len()
            )));
        }
        let promoted: Vec<(usize, usize)> = ranking[..ns].iter().map(|r| (r.a_vertex, r.b_vertex)).collect();
        let m = if ns == 0 {
            first.clone()
        } else if c.soft {
            let mut soft = p.soft.clone();
            soft.extend(&promoted);
            p.run(&c.method, &p.seeds, &soft)?
        } else {
            let mut hard = p.seeds.pairs().to_vec();
            hard.extend(&promoted);
            let hard = SeedSet::new(hard, p.a.n(), p.b.n())?;
            p.run(&c.method, &hard, &p.soft)?
        };
        rows.push(adaptive_row(ns, &m, &p.a, &p.b, truth.as_deref(), &promoted)?);
    }
    emit(
        out,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "adaptive-seeds",
            "mode": if c.soft { "soft" } else { "hard" },
            "method": c.method.method,
            "rows": rows,
        }),
    )
}

#[derive(Args, Debug)]
pub struct MapAtKCmd {
    #[command(flatten)]
    pub graphs: GraphArgs,
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
}

fn cmd_map_at_k(c: &MapAtKCmd, out: &mut dyn Write) -> Result<()> {
    let p = Problem::load(&c.graphs, &c.prior, &c.method)?;
    let truth = p.truth(&Some(c.truth.clone()))?.expect("truth path given");
    let method = c.method.build(&p.soft, &p.seeds, p.n())?;
    if !method.has_soft() {
        return Err(Error::Precondition(format!("method {} produces no soft matrix", method.name())));
    }
    let m = p.run(&c.method, &p.seeds, &p.soft)?;
    let s = map_at_k(&m, &truth, c.k)?;
    emit(
        out,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "map-at-k",
            "method": c.method.method,
            "k": s.k,
            "precision": s.precision,
            "map_at_k": s.map_at_k,
            "evaluated": s.evaluated,
        }),
    )
}

/// Runs a parsed command, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Match(c) => cmd_match(c, out),
        Command::Lap(c) => cmd_lap(c, out),
        Command::Sample(c) => cmd_sample(c, out),
        Command::Summary(c) => cmd_summary(c, out),
        Command::BestMatches(c) => cmd_best_matches(c, out),
        Command::AdaptiveSeeds(c) => cmd_adaptive(c, out),
        Command::MapAtK(c) => cmd_map_at_k(c, out),
    }
}
