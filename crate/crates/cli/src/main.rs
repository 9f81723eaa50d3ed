use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use glpsh_core::character::{linear_characters, Pair};
use glpsh_core::classfn::ClassFunction;
use glpsh_core::context::{parse_group_spec, Caps, Context};
use glpsh_core::graded::{m_plus, m_r, m_star_plus, GradedRPlus};
use glpsh_core::group::{shape_label, Group};
use glpsh_core::hyperhecke::{hh_comul, join, HHElement, HHMatrix, Hecke, Triple};
use glpsh_core::indmod::LineSystem;
use glpsh_core::matrix::Mat;
use glpsh_core::rplus::{brauer_induction, MonomialSum, PairBasis};
use glpsh_core::verify::{central_pair, verify_all, Format, RunConfig, CHECKS};

#[derive(Parser, Debug)]
#[command(name = "glpsh", version, about = "Monomial rings, PSH structure and hyperHecke algebras of GL(n, q)")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Group specifier, e.g. gl:2:3 or gl:1:3,gl:1:3.
    #[arg(long, global = true, env = "GLPSH_GROUP")]
    group: Option<String>,
    /// Largest group that is ever enumerated.
    #[arg(long, global = true, env = "GLPSH_CAP_ORDER", default_value_t = Caps::default().order)]
    cap_order: usize,
    /// Largest group whose subgroups are enumerated.
    #[arg(long, global = true, env = "GLPSH_CAP_SUBGROUPS", default_value_t = Caps::default().subgroups)]
    cap_subgroups: usize,
    /// Largest field order.
    #[arg(long, global = true, env = "GLPSH_CAP_FIELD", default_value_t = Caps::default().field)]
    cap_field: u32,
    /// Restrict to pairs extending a character of the centre: `trivial` or
    /// an index into the linear characters of Z(G).
    #[arg(long, global = true, env = "GLPSH_CENTRAL")]
    central: Option<String>,
    /// Replace U by U meet SL in validity conditions.
    #[arg(long, global = true, env = "GLPSH_SL_INTERSECT")]
    sl_intersect: bool,
    /// Use the block diagonal pair in the R_+ product instead of the inflated one.
    #[arg(long, global = true, env = "GLPSH_LITERAL_MPLUS")]
    literal_mplus: bool,
    #[arg(long, global = true, env = "GLPSH_FORMAT", value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    /// Write output here instead of stdout.
    #[arg(long, global = true, env = "GLPSH_OUT")]
    out: Option<String>,
    /// Comma separated check names.
    #[arg(long, global = true, env = "GLPSH_CHECKS", value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// Field orders for the harness.
    #[arg(long, global = true, env = "GLPSH_FIELDS", value_delimiter = ',', default_value = "2,3")]
    fields: Vec<u32>,
    #[arg(long, global = true, env = "GLPSH_MAX_DEGREE", default_value_t = 3)]
    max_degree: usize,
    #[arg(long, global = true, env = "GLPSH_HH_DEGREE", default_value_t = 2)]
    hh_degree: usize,
    /// Sampled quadruples per shape in the square check.
    #[arg(long, global = true, env = "GLPSH_SAMPLES", default_value_t = 32)]
    samples: usize,
    #[arg(long, global = true, env = "GLPSH_SEED", default_value_t = 0)]
    seed: u64,
    /// Add per-record timings (breaks byte-identical output).
    #[arg(long, global = true, env = "GLPSH_TIMING")]
    timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// List the basis pairs (H, phi) of R_+(G), one per conjugacy class.
    Enumerate {
        /// Also list every group element with its index.
        #[arg(long)]
        elements: bool,
    },
    /// Run every selected check and stream the records.
    VerifyAll,
    #[command(subcommand)]
    Rplus(RplusCmd),
    #[command(subcommand)]
    Psh(PshCmd),
    #[command(subcommand)]
    Hh(HhCmd),
}

#[derive(Subcommand, Debug)]
enum RplusCmd {
    /// Product of two pairs.
    Mul {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Induced character of a pair.
    Bmap {
        #[arg(long)]
        x: String,
    },
    /// The bilinear form [x, y].
    Form {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Explicit Brauer induction of `trivial`, `regular` or `b:<pair>`.
    Brauer {
        #[arg(long)]
        rho: String,
    },
}

#[derive(Subcommand, Debug)]
enum PshCmd {
    /// Product of a pair of G(a) and a pair of G(b) in R_+.
    Mul {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        x: String,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        y: String,
    },
    /// Line-orbit coproduct of a pair of G(a).
    Comul {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        x: String,
    },
    #[command(subcommand)]
    Verify(PshVerify),
}

#[derive(Subcommand, Debug)]
enum PshVerify {
    Hopf {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    Bcompat {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        alpha: usize,
    },
}

#[derive(Subcommand, Debug)]
enum HhCmd {
    /// x . y for triples `src:g:tgt` (basis indices and an element index).
    Compose {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    Normalize {
        #[arg(long)]
        x: String,
    },
    /// Coproduct of a triple of G(a) for the split (alpha, a - alpha).
    Comul {
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        x: String,
    },
    /// Join of a triple of the left group with one of the right group, in
    /// `--group` (default: the block product of the two).
    Join {
        #[arg(long)]
        left: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        y: String,
    },
    #[command(subcommand)]
    Verify(HhVerify),
}

#[derive(Subcommand, Debug)]
enum HhVerify {
    Hom {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        alpha: Option<usize>,
    },
    Square {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
    },
}

impl Global {
    fn caps(&self) -> Caps {
        Caps { order: self.cap_order, subgroups: self.cap_subgroups, field: self.cap_field }
    }

    fn context(&self) -> Context {
        Context::new(self.caps()).with_sl_intersect(self.sl_intersect)
    }

    fn central_index(&self) -> Result<Option<usize>> {
        match self.central.as_deref() {
            None => Ok(None),
            Some("trivial") => Ok(Some(0)),
            Some(s) => s.parse().map(Some).map_err(|_| anyhow!("--central expects `trivial` or an index, got {s}")),
        }
    }

    fn run_config(&self) -> Result<RunConfig> {
        if self.cap_order == 0 || self.cap_subgroups == 0 || self.cap_field == 0 {
            bail!("caps must be positive");
        }
        Ok(RunConfig {
            fields: self.fields.clone(),
            max_degree: self.max_degree,
            hh_degree: self.hh_degree,
            caps: self.caps(),
            central: self.central_index()?,
            sl_intersect: self.sl_intersect,
            literal_mplus: self.literal_mplus,
            checks: self.checks.as_ref().map(|v| v.iter().filter(|c| !c.is_empty()).cloned().collect()),
            split: None,
            seed: self.seed,
            samples: self.samples,
            timing: self.timing,
            format: match self.format {
                OutFormat::Json => Format::Json,
                OutFormat::Csv => Format::Csv,
            },
        })
    }

    fn group_spec(&self) -> Result<(u32, Vec<usize>)> {
        let spec = self.group.as_deref().ok_or_else(|| anyhow!("--group is required"))?;
        Ok(parse_group_spec(spec)?)
    }

    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {p}"))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

/// Errors are configuration or input errors and exit with 2; failing checks
/// exit with 1.
fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::VerifyAll => run_verify(g, g.run_config()?),
        Cmd::Psh(PshCmd::Verify(v)) => {
            let mut cfg = g.run_config()?;
            let (q, a, b, check) = match *v {
                PshVerify::Hopf { q, a, b } => (q, a, b, "hopf"),
                PshVerify::Bcompat { q, a, alpha } => {
                    if alpha == 0 || alpha >= a {
                        bail!("--alpha must lie strictly between 0 and {a}");
                    }
                    (q, alpha, a - alpha, "bcompat_mul")
                }
            };
            cfg.fields = vec![q];
            cfg.max_degree = a + b;
            cfg.split = Some((a, b));
            cfg.checks = Some(vec![check.into()]);
            run_verify(g, cfg)
        }
        Cmd::Hh(HhCmd::Verify(v)) => {
            let mut cfg = g.run_config()?;
            match *v {
                HhVerify::Hom { q, a, alpha } => {
                    cfg.fields = vec![q];
                    cfg.hh_degree = a;
                    cfg.split = alpha.map(|al| (al, a.saturating_sub(al)));
                    cfg.checks = Some(vec!["hh_comul_hom".into()]);
                }
                HhVerify::Square { q, a, b } => {
                    cfg.fields = vec![q];
                    if let (Some(a), Some(b)) = (a, b) {
                        cfg.max_degree = cfg.max_degree.max(a + b);
                        cfg.split = Some((a, b));
                    }
                    cfg.checks = Some(vec!["hh_square".into()]);
                }
            }
            run_verify(g, cfg)
        }
        cmd => {
            if matches!(g.format, OutFormat::Csv) {
                bail!("csv output is only available for verification reports");
            }
            let v = match cmd {
                Cmd::Enumerate { elements } => enumerate(g, *elements)?,
                Cmd::Rplus(c) => rplus(g, c)?,
                Cmd::Psh(c) => psh(g, c)?,
                Cmd::Hh(c) => hh(g, c)?,
                Cmd::VerifyAll => unreachable!(),
            };
            let mut w = g.writer()?;
            writeln!(w, "{}", serde_json::to_string(&v)?)?;
            w.flush()?;
            Ok(0)
        }
    }
}

fn run_verify(g: &Global, cfg: RunConfig) -> Result<u8> {
    if let Some(list) = &cfg.checks {
        for n in list {
            if !CHECKS.iter().any(|c| c.name == n) {
                let known: Vec<&str> = CHECKS.iter().map(|c| c.name).collect();
                bail!("unknown check {n}; known checks: {}", known.join(", "));
            }
        }
    }
    let mut w = g.writer()?;
    let summary = verify_all(&cfg, &mut w)?;
    w.flush()?;
    if summary.all_skipped() {
        eprintln!("warning: every record was skipped; the caps admit no instance");
    }
    eprintln!(
        "pass {} fail {} vacuous {} skipped {} experimental-fail {}",
        summary.pass, summary.fail, summary.vacuous, summary.skipped, summary.experimental_fail
    );
    Ok(summary.exit_code() as u8)
}

fn matrix_json(group: &Group, x: u32) -> Value {
    json!(group.elem(x).rows())
}

fn pair_json(basis: Option<&PairBasis>, group: &Group, p: &Pair) -> Value {
    let gens: Vec<Value> = group.generators_of(&p.set).iter().map(|&x| matrix_json(group, x)).collect();
    let mut v = json!({
        "order": p.set.len(),
        "gens": gens,
        "chi": p.chi.exps(),
        "chi_order": p.chi.order(),
    });
    if let Some(b) = basis {
        if let Ok(i) = b.canonicalize(p) {
            v["class"] = json!(b.key(i));
            v["index"] = json!(i);
            v["is_basis_rep"] = json!(b.pair(i) == p);
        }
    }
    v
}

fn sum_json(s: &MonomialSum) -> Value {
    let b = s.basis();
    Value::Array(
        s.terms()
            .iter()
            .map(|(&i, c)| json!({ "index": i, "key": b.key(i), "coeff": c.to_string() }))
            .collect(),
    )
}

fn class_function_json(f: &ClassFunction) -> Value {
    let g = f.group();
    let cl = g.classes();
    Value::Array(
        cl.reps
            .iter()
            .enumerate()
            .map(|(c, &r)| json!({ "rep": r, "size": cl.size(c), "value": f.at(r).to_string() }))
            .collect(),
    )
}

/// A basis index, or `{"gens": [matrix, ...], "char": k}` with `k` indexing
/// the linear characters of the generated subgroup.
fn parse_pair(basis: &PairBasis, spec: &str) -> Result<Pair> {
    let spec = spec.trim();
    if let Ok(i) = spec.parse::<usize>() {
        if i >= basis.len() {
            bail!("pair index {i} out of range ({} basis pairs)", basis.len());
        }
        return Ok(basis.pair(i).clone());
    }
    let v: Value = serde_json::from_str(spec).with_context(|| format!("pair specifier {spec}"))?;
    let g = basis.group();
    let mut gens = Vec::new();
    for m in v["gens"].as_array().ok_or_else(|| anyhow!("pair specifier needs a gens array"))? {
        let entries: Vec<u32> = m
            .as_array()
            .ok_or_else(|| anyhow!("matrix must be an array of rows"))?
            .iter()
            .flat_map(|row| row.as_array().cloned().unwrap_or_default())
            .map(|e| e.as_u64().map(|e| e as u32).ok_or_else(|| anyhow!("entries are field indices")))
            .collect::<Result<_>>()?;
        let mat = Mat::from_entries(g.field(), &entries)?;
        gens.push(g.index_of(&mat)?);
    }
    let set = g.closure(&gens);
    let k = v["char"].as_u64().unwrap_or(0) as usize;
    let chars = linear_characters(g, &set);
    let chi = chars.get(k).cloned().ok_or_else(|| anyhow!("character {k} of a subgroup with {} of them", chars.len()))?;
    Ok(Pair::new(set, chi))
}

fn selected(g: &Global, basis: &PairBasis) -> Result<Vec<usize>> {
    Ok(match g.central_index()? {
        None => (0..basis.len()).collect(),
        Some(c) => basis.central_indices(&central_pair(basis.group(), c)?),
    })
}

fn enumerate(g: &Global, elements: bool) -> Result<Value> {
    let (q, shape) = g.group_spec()?;
    let ctx = g.context();
    let basis = ctx.basis(q, &shape)?;
    let group = basis.group();
    let pairs: Vec<Value> = selected(g, &basis)?
        .into_iter()
        .map(|i| {
            let mut v = pair_json(None, group, basis.pair(i));
            v["index"] = json!(i);
            v["key"] = json!(basis.key(i));
            v
        })
        .collect();
    let mut out = json!({
        "group": shape_label(q, &shape),
        "order": group.order(),
        "subgroups": basis.lattice().len(),
        "count": pairs.len(),
        "pairs": pairs,
    });
    if elements {
        out["elements"] = Value::Array((0..group.order() as u32).map(|x| matrix_json(group, x)).collect());
    }
    Ok(out)
}

fn group_basis(g: &Global) -> Result<(Context, Arc<PairBasis>)> {
    let (q, shape) = g.group_spec()?;
    let ctx = g.context();
    let basis = ctx.basis(q, &shape)?;
    Ok((ctx, basis))
}

fn element_of(basis: &Arc<PairBasis>, spec: &str) -> Result<MonomialSum> {
    let p = parse_pair(basis, spec)?;
    Ok(MonomialSum::of_pair(basis.clone(), &p)?)
}

fn rplus(g: &Global, cmd: &RplusCmd) -> Result<Value> {
    let (_ctx, basis) = group_basis(g)?;
    Ok(match cmd {
        RplusCmd::Mul { x, y } => {
            let p = element_of(&basis, x)?.mul(&element_of(&basis, y)?)?;
            json!({ "product": sum_json(&p) })
        }
        RplusCmd::Bmap { x } => {
            let f = element_of(&basis, x)?.b_map();
            json!({ "degree": f.degree()?.to_string(), "values": class_function_json(&f) })
        }
        RplusCmd::Form { x, y } => {
            let v = element_of(&basis, x)?.form(&element_of(&basis, y)?)?;
            json!({ "form": v.to_string() })
        }
        RplusCmd::Brauer { rho } => {
            let group = basis.group().clone();
            let f = match rho.as_str() {
                "trivial" => ClassFunction::trivial(group),
                "regular" => ClassFunction::regular(group),
                s => match s.strip_prefix("b:") {
                    Some(p) => element_of(&basis, p)?.b_map(),
                    None => bail!("--rho expects trivial, regular or b:<pair>"),
                },
            };
            let idx = selected(g, &basis)?;
            let res = brauer_induction(&basis, &f, Some(&idx))?;
            json!({ "result": sum_json(&res.result), "reproduces": res.reproduces, "integral": res.integral })
        }
    })
}

fn graded_json(x: &GradedRPlus) -> Value {
    Value::Array(x.comps.iter().map(|(d, s)| json!({ "degree": d, "terms": sum_json(s) })).collect())
}

fn psh(g: &Global, cmd: &PshCmd) -> Result<Value> {
    let ctx = g.context();
    Ok(match cmd {
        PshCmd::Mul { q, a, x, b, y } => {
            let (ba, bb) = (ctx.basis(*q, &[*a])?, ctx.basis(*q, &[*b])?);
            let x = GradedRPlus::single(*q, vec![*a], element_of(&ba, x)?);
            let y = GradedRPlus::single(*q, vec![*b], element_of(&bb, y)?);
            let p = m_plus(&ctx, &x, &y, g.literal_mplus)?;
            let compatible = p.b_map() == m_r(&ctx, &x.b_map(), &y.b_map())?;
            json!({ "product": graded_json(&p), "literal": g.literal_mplus, "b_compatible": compatible })
        }
        PshCmd::Comul { q, a, x } => {
            let basis = ctx.basis(*q, &[*a])?;
            let x = GradedRPlus::single(*q, vec![*a], element_of(&basis, x)?);
            json!({ "coproduct": graded_json(&m_star_plus(&ctx, &x)?) })
        }
        PshCmd::Verify(_) => unreachable!(),
    })
}

/// `src:g:tgt` with basis indices and an element index.
fn parse_triple(hecke: &Hecke, basis: &PairBasis, spec: &str) -> Result<Triple> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [s, x, t] = parts.as_slice() else { bail!("triple specifier {spec} is not src:g:tgt") };
    let src = parse_pair(basis, s)?;
    let tgt = parse_pair(basis, t)?;
    let x: u32 = x.parse().with_context(|| format!("element index {x}"))?;
    if x as usize >= hecke.group().order() {
        bail!("element index {x} out of range");
    }
    Ok(hecke.make(&src, x, &tgt)?)
}

fn triple_json(basis: Option<&PairBasis>, group: &Group, t: &Triple) -> Value {
    json!({
        "src": pair_json(basis, group, &t.src),
        "g": t.g,
        "g_matrix": matrix_json(group, t.g),
        "tgt": pair_json(basis, group, &t.tgt),
    })
}

fn element_json(basis: Option<&PairBasis>, group: &Group, x: &HHElement) -> Value {
    Value::Array(
        x.terms()
            .iter()
            .map(|(t, c)| json!({ "coeff": c.to_string(), "triple": triple_json(basis, group, t) }))
            .collect(),
    )
}

fn hh_matrix_json(group: &Group, m: &HHMatrix) -> Value {
    let pairs = |v: &[Pair]| -> Value { v.iter().map(|p| pair_json(None, group, p)).collect() };
    json!({
        "rows": pairs(&m.rows),
        "cols": pairs(&m.cols),
        "entries": m.entries.iter().map(|(&(r, c), e)| json!({ "row": r, "col": c, "value": element_json(None, group, e) })).collect::<Vec<_>>(),
    })
}

fn hh(g: &Global, cmd: &HhCmd) -> Result<Value> {
    let ctx = g.context();
    Ok(match cmd {
        HhCmd::Compose { x, y } => {
            let (_, basis) = group_basis(g)?;
            let hecke = Hecke::new(basis.group().clone());
            let (tx, ty) = (parse_triple(&hecke, &basis, x)?, parse_triple(&hecke, &basis, y)?);
            let group = basis.group();
            match hecke.compose_triples(&tx, &ty) {
                None => json!({ "composable": false }),
                Some((s, t)) => {
                    json!({ "composable": true, "scalar": s.to_string(), "triple": triple_json(Some(&basis), group, &t) })
                }
            }
        }
        HhCmd::Normalize { x } => {
            let (_, basis) = group_basis(g)?;
            let hecke = Hecke::new(basis.group().clone());
            let t = parse_triple(&hecke, &basis, x)?;
            let (s, n) = hecke.normalize(&t);
            let group = basis.group();
            json!({
                "input": triple_json(Some(&basis), group, &t),
                "scalar": s.to_string(),
                "normal": triple_json(Some(&basis), group, &n),
            })
        }
        HhCmd::Comul { alpha, x } => {
            let (q, shape) = g.group_spec()?;
            let [a] = shape[..] else { bail!("hh comul needs a single block group gl:a:q") };
            if *alpha == 0 || *alpha >= a {
                bail!("--alpha must lie strictly between 0 and {a}");
            }
            let basis = ctx.basis(q, &shape)?;
            let hecke = Hecke::new(basis.group().clone());
            let t = parse_triple(&hecke, &basis, x)?;
            let par = ctx.parabolic_2(q, a, *alpha)?;
            let src = LineSystem::new(hecke.module(&t.src)?, par.clone())?;
            let tgt = LineSystem::new(hecke.module(&t.tgt)?, par.clone())?;
            let levi = Hecke::new(par.levi().clone());
            let m = hh_comul(&levi, &hecke, &t, &src, &tgt)?;
            json!({ "split": [alpha, a - alpha], "matrix": hh_matrix_json(par.levi(), &m) })
        }
        HhCmd::Join { left, x, right, y } => {
            let (ql, sl) = parse_group_spec(left)?;
            let (qr, sr) = parse_group_spec(right)?;
            if ql != qr {
                bail!("left and right groups are over different fields");
            }
            let (q, shape) = match &g.group {
                Some(_) => g.group_spec()?,
                None => (ql, sl.iter().chain(&sr).copied().collect()),
            };
            if q != ql {
                bail!("target group is over a different field");
            }
            let (bl, br) = (ctx.basis(ql, &sl)?, ctx.basis(qr, &sr)?);
            let (hl, hr) = (Hecke::new(bl.group().clone()), Hecke::new(br.group().clone()));
            let target = Hecke::new(ctx.group(q, &shape)?);
            let (tx, ty) = (parse_triple(&hl, &bl, x)?, parse_triple(&hr, &br, y)?);
            let joined = join(&target, &hl, &tx, &hr, &ty)?;
            let (s, n) = target.normalize(&joined);
            let tg = target.group();
            json!({
                "target": shape_label(q, &shape),
                "join": triple_json(None, tg, &joined),
                "scalar": s.to_string(),
                "normal": triple_json(None, tg, &n),
            })
        }
        HhCmd::Verify(_) => unreachable!(),
    })
}
