//! The verification harness. Every registered check runs over the groups
//! selected by a [`RunConfig`] and produces one [`Record`] per instance.
//! Records are computed in parallel and written in a fixed order, so two runs
//! with the same configuration produce identical output.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::character::{linear_characters, Pair};
use crate::context::{Caps, Context};
use crate::error::{Error, Result};
use crate::graded::{
    coassociativity_plus, degree_one, hopf_sides, m_plus, m_r, restrict_split, GradedR, GradedRPlus,
};
use crate::group::{shape_label, Group};
use crate::hyperhecke::{
    comul_realizes, condition_gaps, disjoint_supports, hh_comul, join_map_is_tensor, reverse_gaps,
    square_routes, HHMatrix, Hecke, Triple,
};
use crate::indmod::{fixed_subspace, InducedModule, LineSystem};
use crate::rplus::{brauer_induction, cyclic_pair_classes, MonomialSum, PairBasis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub check: &'static str,
    pub instance: String,
    pub status: Status,
    pub experimental: bool,
    /// Present exactly when the status is `fail`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    /// Reason for a skip.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Field orders to run over.
    pub fields: Vec<u32>,
    /// Largest total degree `a` (or `a + b`) for the ring checks.
    pub max_degree: usize,
    /// Largest degree for the hyperHecke checks.
    pub hh_degree: usize,
    pub caps: Caps,
    /// Restrict to pairs extending this character of the centre (an index
    /// into the linear characters of `Z(G)`; 0 is the trivial one).
    pub central: Option<usize>,
    pub sl_intersect: bool,
    pub literal_mplus: bool,
    /// Check names to run; all of them when `None`.
    pub checks: Option<Vec<String>>,
    /// Restrict the checks indexed by a degree split `(a, b)` to this one.
    pub split: Option<(usize, usize)>,
    pub seed: u64,
    /// Quadruples drawn per shape in the sampled square check.
    pub samples: usize,
    pub timing: bool,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fields: vec![2, 3],
            max_degree: 3,
            hh_degree: 2,
            caps: Caps::default(),
            central: None,
            sl_intersect: false,
            literal_mplus: false,
            checks: None,
            split: None,
            seed: 0,
            samples: 32,
            timing: false,
            format: Format::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub vacuous: usize,
    pub skipped: usize,
    /// Failures of experimental checks; these do not affect the exit code.
    pub experimental_fail: usize,
}

impl Summary {
    fn add(&mut self, r: &Record) {
        match (r.status, r.experimental) {
            (Status::Pass, _) => self.pass += 1,
            (Status::Fail, false) => self.fail += 1,
            (Status::Fail, true) => self.experimental_fail += 1,
            (Status::Vacuous, _) => self.vacuous += 1,
            (Status::Skipped, _) => self.skipped += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.vacuous + self.skipped + self.experimental_fail
    }

    pub fn all_skipped(&self) -> bool {
        self.skipped > 0 && self.skipped == self.total()
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.fail > 0)
    }
}

pub struct CheckInfo {
    pub name: &'static str,
    pub experimental: bool,
    pub about: &'static str,
}

pub const CHECKS: &[CheckInfo] = &[
    CheckInfo { name: "mackey", experimental: false, about: "b(x y) = b(x) b(y) on all basis pairs" },
    CheckInfo { name: "adjunction", experimental: false, about: "[tau, a(rho)] = <b(tau), rho> and b(a(rho)) = rho" },
    CheckInfo { name: "hopf", experimental: false, about: "m* m = m (m* x m*) through the shuffle" },
    CheckInfo { name: "coassoc_r", experimental: false, about: "two-step and direct Harish-Chandra restriction agree" },
    CheckInfo { name: "bcompat_mul", experimental: false, about: "b(m_plus(x, y)) = m(b x, b y)" },
    CheckInfo { name: "fixed_subspace", experimental: false, about: "three routes to the U-fixed Levi character agree" },
    CheckInfo { name: "line_orbits", experimental: false, about: "orbit counts match line and double coset counts" },
    CheckInfo { name: "hh_relations", experimental: false, about: "normal form relations, maps, factorization, faithfulness" },
    CheckInfo { name: "hh_compose", experimental: false, about: "composition of triples is composition of maps" },
    CheckInfo { name: "hh_comul_support", experimental: false, about: "coproduct matrix realizes the projected line map" },
    CheckInfo { name: "hh_comul_hom", experimental: false, about: "coproduct of a composition is the matrix product" },
    CheckInfo { name: "hh_join_tensor", experimental: false, about: "map of a join is the tensor of the maps" },
    CheckInfo { name: "hh_square", experimental: false, about: "compose then join equals join then compose" },
    CheckInfo { name: "coassoc_plus", experimental: true, about: "coassociativity of the line-orbit coproduct on R_+" },
    CheckInfo { name: "hh_condition", experimental: true, about: "valid source lines map to valid target lines" },
];

enum Outcome {
    Pass,
    Fail(Value),
    Vacuous,
}

fn is_cap(e: &Error) -> bool {
    matches!(e, Error::SubgroupCap { .. } | Error::OrderCap { .. } | Error::FieldCap { .. })
}

fn info(name: &str) -> &'static CheckInfo {
    CHECKS.iter().find(|c| c.name == name).expect("registered check")
}

fn skipped(check: &'static CheckInfo, instance: String, e: &Error) -> Record {
    Record {
        check: check.name,
        instance,
        status: Status::Skipped,
        experimental: check.experimental,
        witness: None,
        note: Some(e.to_string()),
        timing_ms: None,
    }
}

fn failures(bad: Vec<Value>, key: &str) -> Outcome {
    if bad.is_empty() {
        Outcome::Pass
    } else {
        Outcome::Fail(json!({ key: bad }))
    }
}

struct Env<'a> {
    cfg: &'a RunConfig,
    ctx: Context,
}

/// Groups small enough to enumerate every pair, rather than one pair per
/// conjugacy class.
const ALL_PAIRS_BELOW: usize = 48;

struct HHSetup {
    label: String,
    hecke: Arc<Hecke>,
    pairs: Vec<Pair>,
    keys: Vec<String>,
}

impl HHSetup {
    fn index(&self, p: &Pair) -> usize {
        self.pairs.iter().position(|x| x == p).expect("pair in setup")
    }

    fn triples(&self) -> Vec<Triple> {
        let h = &self.hecke;
        self.pairs.iter().flat_map(|s| self.pairs.iter().flat_map(move |t| h.triples_between(s, t))).collect()
    }

    fn key(&self, t: &Triple) -> String {
        format!("{} -{}-> {}", self.keys[self.index(&t.src)], t.g, self.keys[self.index(&t.tgt)])
    }

    /// Composable pairs `(x, y)` with `x . y` defined, as indices.
    fn composable(&self, triples: &[Triple]) -> Vec<(usize, usize)> {
        let mut by_tgt: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (n, t) in triples.iter().enumerate() {
            by_tgt.entry(self.index(&t.tgt)).or_default().push(n);
        }
        let mut out = Vec::new();
        for (n, x) in triples.iter().enumerate() {
            for &m in by_tgt.get(&self.index(&x.src)).map(Vec::as_slice).unwrap_or(&[]) {
                out.push((n, m));
            }
        }
        out
    }
}

impl<'a> Env<'a> {
    fn groups(&self, min: usize, max: usize) -> Vec<(u32, usize)> {
        self.cfg.fields.iter().flat_map(|&q| (min..=max).map(move |a| (q, a))).collect()
    }

    fn timed(&self, check: &'static CheckInfo, instance: String, f: impl FnOnce() -> Result<Outcome>) -> Record {
        let start = Instant::now();
        let res = f();
        let timing_ms = self.cfg.timing.then(|| start.elapsed().as_secs_f64() * 1000.0);
        let (status, witness, note) = match res {
            Ok(Outcome::Pass) => (Status::Pass, None, None),
            Ok(Outcome::Vacuous) => (Status::Vacuous, None, None),
            Ok(Outcome::Fail(w)) => (Status::Fail, Some(w), None),
            Err(e) if is_cap(&e) => (Status::Skipped, None, Some(e.to_string())),
            Err(e) => (Status::Fail, Some(json!({ "error": e.to_string() })), None),
        };
        Record { check: check.name, instance, status, experimental: check.experimental, witness, note, timing_ms }
    }

    /// Basis of `G(shape)` and the selected indices (all, or the pairs
    /// extending the chosen central character).
    fn setup(&self, check: &'static CheckInfo, q: u32, shape: &[usize]) -> std::result::Result<(Arc<PairBasis>, Vec<usize>), Record> {
        let label = shape_label(q, shape);
        let basis = self.ctx.basis(q, shape).map_err(|e| self.error_record(check, label.clone(), e))?;
        let idx = match self.cfg.central {
            None => (0..basis.len()).collect(),
            Some(c) => {
                let phi_bar = self.central_pair(&basis, c).map_err(|e| self.error_record(check, label, e))?;
                basis.central_indices(&phi_bar)
            }
        };
        Ok((basis, idx))
    }

    fn central_pair(&self, basis: &PairBasis, c: usize) -> Result<Pair> {
        central_pair(basis.group(), c)
    }

    fn error_record(&self, check: &'static CheckInfo, instance: String, e: Error) -> Record {
        if is_cap(&e) {
            skipped(check, instance, &e)
        } else {
            self.timed(check, instance, || Err(e))
        }
    }

    fn hh_setup(&self, check: &'static CheckInfo, q: u32, shape: &[usize]) -> std::result::Result<HHSetup, Record> {
        let label = shape_label(q, shape);
        let err = |e| self.error_record(check, label.clone(), e);
        let g = self.ctx.group(q, shape).map_err(err)?;
        let hecke = Arc::new(Hecke::new(g.clone()));
        if g.order() < ALL_PAIRS_BELOW && self.cfg.central.is_none() {
            let lat = self.ctx.lattice(q, shape).map_err(err)?;
            let mut pairs = Vec::new();
            let mut keys = Vec::new();
            for (s, h) in lat.subgroups.iter().enumerate() {
                for chi in linear_characters(&g, h) {
                    let exps: Vec<String> = chi.exps().iter().map(u32::to_string).collect();
                    keys.push(format!("S{}#{}:{}[{}]", h.len(), s, chi.order(), exps.join(",")));
                    pairs.push(Pair::new(h.clone(), chi));
                }
            }
            return Ok(HHSetup { label, hecke, pairs, keys });
        }
        let (basis, idx) = self.setup(check, q, shape)?;
        Ok(HHSetup {
            label,
            hecke,
            pairs: idx.iter().map(|&i| basis.pair(i).clone()).collect(),
            keys: idx.iter().map(|&i| basis.key(i)).collect(),
        })
    }
}

/// The `c`-th linear character of the centre of `g`, as a pair.
pub fn central_pair(g: &Group, c: usize) -> Result<Pair> {
    let z = g.center();
    let chars = linear_characters(g, &z);
    let chi = chars.get(c).cloned().ok_or_else(|| {
        Error::Parse(format!("central character {c} of {} (it has {})", g.label(), chars.len()))
    })?;
    Ok(Pair::new(z, chi))
}

fn be(basis: &Arc<PairBasis>, i: usize) -> MonomialSum {
    MonomialSum::basis_element(basis.clone(), i)
}

fn mackey(env: &Env) -> Vec<Record> {
    let c = info("mackey");
    let mut out = Vec::new();
    for (q, a) in env.groups(1, env.cfg.max_degree) {
        let (basis, idx) = match env.setup(c, q, &[a]) {
            Ok(x) => x,
            Err(r) => {
                out.push(r);
                continue;
            }
        };
        let label = shape_label(q, &[a]);
        out.par_extend(idx.par_iter().map(|&i| {
            env.timed(c, format!("{label} x={}", basis.key(i)), || {
                let mut bad = Vec::new();
                for &j in &idx {
                    let lhs = be(&basis, i).mul(&be(&basis, j))?.b_map();
                    if lhs != basis.induced(i).tensor(basis.induced(j))? {
                        bad.push(json!(basis.key(j)));
                    }
                }
                Ok(failures(bad, "y"))
            })
        }).collect::<Vec<_>>());
    }
    out
}

fn adjunction(env: &Env) -> Vec<Record> {
    let c = info("adjunction");
    let mut out = Vec::new();
    for (q, a) in env.groups(1, env.cfg.max_degree) {
        let (basis, idx) = match env.setup(c, q, &[a]) {
            Ok(x) => x,
            Err(r) => {
                out.push(r);
                continue;
            }
        };
        let label = shape_label(q, &[a]);
        let sols: Vec<_> = idx.par_iter().map(|&s| brauer_induction(&basis, basis.induced(s), Some(&idx))).collect();
        out.par_extend(idx.par_iter().map(|&t| {
            env.timed(c, format!("{label} tau={}", basis.key(t)), || {
                let mut bad = Vec::new();
                for (pos, &s) in idx.iter().enumerate() {
                    let sol = sols[pos].as_ref().map_err(Clone::clone)?;
                    let form = be(&basis, t).form(&sol.result)?;
                    let inner = basis.induced(t).inner(basis.induced(s))?.to_rational()?;
                    if form != inner || !sol.reproduces {
                        bad.push(json!({
                            "rho": basis.key(s),
                            "form": form.to_string(),
                            "inner": inner.to_string(),
                            "reproduces": sol.reproduces,
                        }));
                    }
                }
                Ok(failures(bad, "rho"))
            })
        }).collect::<Vec<_>>());
    }
    out
}

fn degree_pairs(max: usize) -> Vec<(usize, usize)> {
    (1..max).flat_map(|a| (1..=max - a).map(move |b| (a, b))).collect()
}

impl Env<'_> {
    fn splits(&self, max: usize) -> Vec<(usize, usize)> {
        degree_pairs(max).into_iter().filter(|&s| self.wants(s)).collect()
    }

    fn wants(&self, split: (usize, usize)) -> bool {
        self.cfg.split.map_or(true, |s| s == split)
    }
}

fn differing(l: &GradedR, r: &GradedR) -> Vec<Value> {
    let keys: BTreeSet<&Vec<usize>> = l.comps.keys().chain(r.comps.keys()).collect();
    keys.into_iter().filter(|k| l.comps.get(*k) != r.comps.get(*k)).map(|k| json!(k)).collect()
}

fn hopf(env: &Env) -> Vec<Record> {
    let c = info("hopf");
    let mut out = Vec::new();
    for &q in &env.cfg.fields {
        for (a, b) in env.splits(env.cfg.max_degree) {
            let (ba, ia) = match env.setup(c, q, &[a]) {
                Ok(x) => x,
                Err(r) => {
                    out.push(r);
                    continue;
                }
            };
            let (bb, ib) = match env.setup(c, q, &[b]) {
                Ok(x) => x,
                Err(r) => {
                    out.push(r);
                    continue;
                }
            };
            if let Err(e) = env.ctx.group(q, &[a + b]) {
                out.push(env.error_record(c, format!("{} x {}", shape_label(q, &[a]), shape_label(q, &[b])), e));
                continue;
            }
            let grid: Vec<(usize, usize)> = ia.iter().flat_map(|&i| ib.iter().map(move |&j| (i, j))).collect();
            out.par_extend(grid.par_iter().map(|&(i, j)| {
                let inst = format!("{} x={} {} y={}", shape_label(q, &[a]), ba.key(i), shape_label(q, &[b]), bb.key(j));
                env.timed(c, inst, || {
                    let x = degree_one(q, a, ba.induced(i).clone());
                    let y = degree_one(q, b, bb.induced(j).clone());
                    let (l, r) = hopf_sides(&env.ctx, &x, &y)?;
                    Ok(failures(differing(&l, &r), "components"))
                })
            }).collect::<Vec<_>>());
        }
    }
    out
}

fn compositions3(a: usize) -> Vec<[usize; 3]> {
    (0..=a).flat_map(|x| (0..=a - x).map(move |y| [x, y, a - x - y])).collect()
}

fn coassoc_r(env: &Env) -> Vec<Record> {
    let c = info("coassoc_r");
    let mut out = Vec::new();
    for (q, a) in env.groups(2, env.cfg.max_degree) {
        let (basis, idx) = match env.setup(c, q, &[a]) {
            Ok(x) => x,
            Err(r) => {
                out.push(r);
                continue;
            }
        };
        let label = shape_label(q, &[a]);
        out.par_extend(idx.par_iter().map(|&i| {
            env.timed(c, format!("{label} f=b({})", basis.key(i)), || {
                let ctx = &env.ctx;
                let f = basis.induced(i);
                let mut bad = Vec::new();
                for [x, y, z] in compositions3(a) {
                    let direct = restrict_split(ctx, q, f, &[vec![x, y, z]])?;
                    let l1 = restrict_split(ctx, q, f, &[vec![x + y, z]])?;
                    let left = restrict_split(ctx, q, &l1, &[vec![x, y], vec![z]])?;
                    let r1 = restrict_split(ctx, q, f, &[vec![x, y + z]])?;
                    let right = restrict_split(ctx, q, &r1, &[vec![x], vec![y, z]])?;
                    if left != direct || right != direct {
                        bad.push(json!({ "split": [x, y, z], "left": left == direct, "right": right == direct }));
                    }
                }
                Ok(failures(bad, "splits"))
            })
        }).collect::<Vec<_>>());
    }
    out
}

fn bcompat_mul(env: &Env) -> Vec<Record> {
    let c = info("bcompat_mul");
    let mut out = Vec::new();
    for &q in &env.cfg.fields {
        for (a, b) in env.splits(env.cfg.max_degree) {
            let head = format!("{} x {}", shape_label(q, &[a]), shape_label(q, &[b]));
            let (ba, ia) = match env.setup(c, q, &[a]) {
                Ok(x) => x,
                Err(r) => {
                    out.push(r);
                    continue;
                }
            };
            let (bb, ib) = match env.setup(c, q, &[b]) {
                Ok(x) => x,
                Err(r) => {
                    out.push(r);
                    continue;
                }
            };
            if let Err(e) = env.ctx.basis(q, &[a + b]) {
                out.push(env.error_record(c, head, e));
                continue;
            }
            let grid: Vec<(usize, usize)> = ia.iter().flat_map(|&i| ib.iter().map(move |&j| (i, j))).collect();
            out.par_extend(grid.par_iter().map(|&(i, j)| {
                env.timed(c, format!("{head} x={} y={}", ba.key(i), bb.key(j)), || {
                    let x = GradedRPlus::single(q, vec![a], be(&ba, i));
                    let y = GradedRPlus::single(q, vec![b], be(&bb, j));
                    let p = m_plus(&env.ctx, &x, &y, env.cfg.literal_mplus)?;
                    let rhs = m_r(&env.ctx, &x.b_map(), &y.b_map())?;
                    let lhs = p.b_map();
                    if lhs == rhs {
                        return Ok(Outcome::Pass);
                    }
                    let dims = |g: &GradedR| -> Vec<String> {
                        g.comps.values().map(|f| f.degree().map(|d| d.to_string()).unwrap_or_default()).collect()
                    };
                    Ok(Outcome::Fail(json!({
                        "literal": env.cfg.literal_mplus,
                        "b_of_product_degree": dims(&lhs),
                        "product_of_b_degree": dims(&rhs),
                    })))
                })
            }).collect::<Vec<_>>());
        }
    }
    out
}

struct LineInstance {
    label: String,
    basis: Arc<PairBasis>,
    idx: Vec<usize>,
    alpha: usize,
    a: usize,
    q: u32,
}

fn line_instances(env: &Env, c: &'static CheckInfo, out: &mut Vec<Record>) -> Vec<LineInstance> {
    let mut v = Vec::new();
    for (q, a) in env.groups(2, env.cfg.max_degree) {
        let (basis, idx) = match env.setup(c, q, &[a]) {
            Ok(x) => x,
            Err(r) => {
                out.push(r);
                continue;
            }
        };
        for alpha in (1..a).filter(|&al| env.wants((al, a - al))) {
            v.push(LineInstance { label: shape_label(q, &[a]), basis: basis.clone(), idx: idx.clone(), alpha, a, q });
        }
    }
    v
}

fn lines_of(env: &Env, li: &LineInstance, i: usize) -> Result<LineSystem> {
    let par = env.ctx.parabolic_2(li.q, li.a, li.alpha)?;
    let module = Arc::new(InducedModule::new(li.basis.group().clone(), li.basis.pair(i).clone())?);
    LineSystem::new(module, par)
}

fn fixed(env: &Env) -> Vec<Record> {
    let c = info("fixed_subspace");
    let mut out = Vec::new();
    for li in line_instances(env, c, &mut out) {
        out.par_extend(li.idx.par_iter().map(|&i| {
            env.timed(c, format!("{} alpha={} {}", li.label, li.alpha, li.basis.key(i)), || {
                let ls = lines_of(env, &li, i)?;
                let hc = li.basis.induced(i).hc_restrict(ls.parabolic())?;
                let fx = fixed_subspace(&ls)?;
                let r3 = ls.line_span_fixed_character()?;
                let ok = [hc == fx.character, hc == r3, fx.invalid_nonzero.is_empty(), fx.valid_zero.is_empty()];
                if ok.iter().all(|&b| b) {
                    return Ok(Outcome::Pass);
                }
                Ok(Outcome::Fail(json!({
                    "hc_eq_fixed": ok[0],
                    "hc_eq_line_span_fixed": ok[1],
                    "invalid_nonzero": fx.invalid_nonzero,
                    "valid_zero": fx.valid_zero,
                    "hc_degree": hc.degree().map(|d| d.to_string()).unwrap_or_default(),
                    "fixed_dim": fx.dim(),
                })))
            })
        }).collect::<Vec<_>>());
    }
    out
}

fn line_orbits(env: &Env) -> Vec<Record> {
    let c = info("line_orbits");
    let mut out = Vec::new();
    for li in line_instances(env, c, &mut out) {
        let levi_basis = match env.ctx.basis(li.q, &[li.alpha, li.a - li.alpha]) {
            Ok(b) => b,
            Err(e) => {
                out.push(env.error_record(c, format!("{} alpha={}", li.label, li.alpha), e));
                continue;
            }
        };
        out.par_extend(li.idx.par_iter().map(|&i| {
            env.timed(c, format!("{} alpha={} {}", li.label, li.alpha, li.basis.key(i)), || {
                let ls = lines_of(env, &li, i)?;
                let fx = fixed_subspace(&ls)?;
                let levi_order = ls.parabolic().levi().order();
                let mult = ls.multiplicities(&levi_basis)?;
                let weighted: usize = mult.iter().map(|(&k, &m)| m * levi_order / levi_basis.pair(k).order()).sum();
                let lines = ls.line_count();
                let ok = weighted == lines
                    && ls.orbit_stabilizer_total() == lines
                    && fx.dim() == ls.valid_count()
                    && ls.validity_is_well_defined()
                    && ls.unipotent_acts_by_permutation()
                    && ls.orbit_sum(&levi_basis)?.b_map() == ls.line_span_character();
                if ok {
                    return Ok(Outcome::Pass);
                }
                Ok(Outcome::Fail(json!({
                    "lines": lines,
                    "weighted_orbit_sum": weighted,
                    "orbit_stabilizer_total": ls.orbit_stabilizer_total(),
                    "fixed_dim": fx.dim(),
                    "valid_double_cosets": ls.valid_count(),
                    "validity_well_defined": ls.validity_is_well_defined(),
                    "unipotent_permutes_lines": ls.unipotent_acts_by_permutation(),
                })))
            })
        }).collect::<Vec<_>>());
    }
    out
}

fn hh_relations(env: &Env) -> Vec<Record> {
    let c = info("hh_relations");
    let mut out = Vec::new();
    for (q, a) in env.groups(1, env.cfg.hh_degree) {
        let s = match env.hh_setup(c, q, &[a]) {
            Ok(s) => s,
            Err(r) => {
                out.push(r);
                continue;
            }
        };
        let n = s.pairs.len();
        let grid: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        out.par_extend(grid.par_iter().map(|&(i, j)| {
            env.timed(c, format!("{} {} -> {}", s.label, s.keys[i], s.keys[j]), || {
                let hk = &s.hecke;
                let g = hk.group();
                let (src, tgt) = (&s.pairs[i], &s.pairs[j]);
                let canon = hk.triples_between(src, tgt);
                if canon.is_empty() {
                    return Ok(Outcome::Vacuous);
                }
                let mut bad = Vec::new();
                for t in &canon {
                    if !hk.is_equivariant(t)? {
                        bad.push(json!({ "g": t.g, "equivariant": false }));
                    }
                    // the relations verbatim on every translate h g k
                    let m0 = hk.map(t)?;
                    for &h in tgt.set.elems() {
                        for &k in src.set.elems() {
                            let x = g.mul(g.mul(h, t.g), k);
                            let expect = tgt.value(g.inv(h)).unwrap().mul(src.value(g.inv(k)).unwrap());
                            let (sc, nt) = hk.normalize(&Triple { src: src.clone(), g: x, tgt: tgt.clone() });
                            if nt != *t || sc != expect {
                                bad.push(json!({ "g0": t.g, "h": h, "k": k, "scalar": sc.to_string(), "expected": expect.to_string() }));
                            } else if hk.map(&nt)? != m0 {
                                bad.push(json!({ "g0": t.g, "map_of_canonical": false }));
                            }
                        }
                    }
                }
                for x in 0..g.order() as u32 {
                    let Ok(t) = hk.make(src, x, tgt) else { continue };
                    let (sc, nt) = hk.normalize(&t);
                    if !canon.contains(&nt) || hk.map(&t)? != hk.map(&nt)?.scale(sc) {
                        bad.push(json!({ "g": x, "relation_on_maps": false }));
                    }
                    if hk.normalize(&nt) != (crate::cyclo::Root::ONE, nt.clone()) {
                        bad.push(json!({ "g": x, "idempotent": false }));
                    }
                    let (l, r) = hk.factorization(&t)?;
                    if hk.compose(&hk.element(&l), &hk.element(&r)) != hk.element(&t) {
                        bad.push(json!({ "g": x, "factorization": false }));
                    }
                }
                if !disjoint_supports(hk, &canon)? {
                    bad.push(json!({ "faithful": false }));
                }
                Ok(failures(bad, "failures"))
            })
        }).collect::<Vec<_>>());
    }
    out
}

fn hh_compose(env: &Env) -> Vec<Record> {
    let c = info("hh_compose");
    let mut out = Vec::new();
    for (q, a) in env.groups(1, env.cfg.hh_degree) {
        let s = match env.hh_setup(c, q, &[a]) {
            Ok(s) => s,
            Err(r) => {
                out.push(r);
                continue;
            }
        };
        let triples = s.triples();
        let pairs = s.composable(&triples);
        let mut by_mid: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for &(x, y) in &pairs {
            by_mid.entry(s.index(&triples[x].src)).or_default().push((x, y));
        }
        let mids: Vec<usize> = (0..s.pairs.len()).collect();
        out.par_extend(mids.par_iter().map(|&m| {
            env.timed(c, format!("{} via {}", s.label, s.keys[m]), || {
                let list = by_mid.get(&m).map(Vec::as_slice).unwrap_or(&[]);
                if list.is_empty() {
                    return Ok(Outcome::Vacuous);
                }
                let hk = &s.hecke;
                let mut bad = Vec::new();
                for &(x, y) in list {
                    let (tx, ty) = (&triples[x], &triples[y]);
                    let (sc, t) = hk.compose_triples(tx, ty).expect("composable");
                    if hk.map(tx)?.compose(&hk.map(ty)?)? != hk.map(&t)?.scale(sc) {
                        bad.push(json!({ "x": s.key(tx), "y": s.key(ty) }));
                    }
                }
                Ok(failures(bad, "pairs"))
            })
        }).collect::<Vec<_>>());
    }
    out
}

/// Line systems of every pair of a setup for a split, plus the Levi algebra.
struct ComulSetup {
    levi: Hecke,
    lines: Vec<LineSystem>,
}

fn comul_setup(env: &Env, s: &HHSetup, q: u32, a: usize, alpha: usize) -> Result<ComulSetup> {
    let par = env.ctx.parabolic_2(q, a, alpha)?;
    let lines =
        s.pairs.par_iter().map(|p| LineSystem::new(s.hecke.module(p)?, par.clone())).collect::<Result<Vec<_>>>()?;
    Ok(ComulSetup { levi: Hecke::new(par.levi().clone()), lines })
}

fn comul_groups(env: &Env, c: &'static CheckInfo, out: &mut Vec<Record>) -> Vec<(HHSetup, usize, ComulSetup)> {
    let mut v = Vec::new();
    for (q, a) in env.groups(2, env.cfg.hh_degree) {
        for alpha in (1..a).filter(|&al| env.wants((al, a - al))) {
            let s = match env.hh_setup(c, q, &[a]) {
                Ok(s) => s,
                Err(r) => {
                    out.push(r);
                    continue;
                }
            };
            match comul_setup(env, &s, q, a, alpha) {
                Ok(cs) => v.push((s, alpha, cs)),
                Err(e) => out.push(env.error_record(c, format!("{} alpha={alpha}", s.label), e)),
            }
        }
    }
    v
}

fn hh_comul_support(env: &Env) -> Vec<Record> {
    let c = info("hh_comul_support");
    let mut out = Vec::new();
    for (s, alpha, cs) in comul_groups(env, c, &mut out) {
        let triples = s.triples();
        out.par_extend(triples.par_iter().map(|t| {
            env.timed(c, format!("{} alpha={alpha} {}", s.label, s.key(t)), || {
                let (src, tgt) = (&cs.lines[s.index(&t.src)], &cs.lines[s.index(&t.tgt)]);
                let m = hh_comul(&cs.levi, &s.hecke, t, src, tgt)?;
                let realizes = comul_realizes(&s.hecke, t, &m, src, tgt)?;
                let reverse = reverse_gaps(&s.hecke, t, src, tgt)?;
                if realizes && reverse.is_empty() {
                    return Ok(Outcome::Pass);
                }
                Ok(Outcome::Fail(json!({
                    "realizes": realizes,
                    "invalid_source_to_valid_target": reverse.iter().map(|g| [g.source_line, g.image_line]).collect::<Vec<_>>(),
                })))
            })
        }).collect::<Vec<_>>());
    }
    out
}

fn hh_comul_hom(env: &Env) -> Vec<Record> {
    let c = info("hh_comul_hom");
    let mut out = Vec::new();
    for (s, alpha, cs) in comul_groups(env, c, &mut out) {
        let triples = s.triples();
        let comul = |t: &Triple| -> Result<HHMatrix> {
            hh_comul(&cs.levi, &s.hecke, t, &cs.lines[s.index(&t.src)], &cs.lines[s.index(&t.tgt)])
        };
        let mats: Vec<Result<HHMatrix>> = triples.par_iter().map(comul).collect();
        let pairs = s.composable(&triples);
        let mut by_mid: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for &(x, y) in &pairs {
            by_mid.entry(s.index(&triples[x].src)).or_default().push((x, y));
        }
        let mids: Vec<usize> = (0..s.pairs.len()).collect();
        out.par_extend(mids.par_iter().map(|&m| {
            env.timed(c, format!("{} alpha={alpha} via {}", s.label, s.keys[m]), || {
                let list = by_mid.get(&m).map(Vec::as_slice).unwrap_or(&[]);
                if list.is_empty() {
                    return Ok(Outcome::Vacuous);
                }
                let mut bad = Vec::new();
                for &(x, y) in list {
                    let (sc, t) = s.hecke.compose_triples(&triples[x], &triples[y]).expect("composable");
                    let lhs = comul(&t)?.scale(&sc.to_cyclotomic());
                    let mx = mats[x].as_ref().map_err(Clone::clone)?;
                    let my = mats[y].as_ref().map_err(Clone::clone)?;
                    if lhs != mx.mul(&cs.levi, my)? {
                        bad.push(json!({ "x": s.key(&triples[x]), "y": s.key(&triples[y]) }));
                    }
                }
                Ok(failures(bad, "pairs"))
            })
        }).collect::<Vec<_>>());
    }
    out
}

fn hh_condition(env: &Env) -> Vec<Record> {
    let c = info("hh_condition");
    let mut out = Vec::new();
    for (s, alpha, cs) in comul_groups(env, c, &mut out) {
        let triples = s.triples();
        out.par_extend(triples.par_iter().map(|t| {
            env.timed(c, format!("{} alpha={alpha} {}", s.label, s.key(t)), || {
                let (src, tgt) = (&cs.lines[s.index(&t.src)], &cs.lines[s.index(&t.tgt)]);
                if src.valid_count() == 0 {
                    return Ok(Outcome::Vacuous);
                }
                let gaps = condition_gaps(&s.hecke, t, src, tgt)?;
                let coset_t = |ls: &LineSystem, line: u32| ls.cosets()[ls.coset_index(line)].t;
                let bad = gaps
                    .iter()
                    .map(|gap| {
                        json!({
                            "source_line": gap.source_line,
                            "source_t": coset_t(src, gap.source_line),
                            "image_line": gap.image_line,
                            "image_t": coset_t(tgt, gap.image_line),
                        })
                    })
                    .collect();
                Ok(failures(bad, "valid_source_to_invalid_target"))
            })
        }).collect::<Vec<_>>());
    }
    out
}

fn hh_join_tensor(env: &Env) -> Vec<Record> {
    let c = info("hh_join_tensor");
    let mut out = Vec::new();
    for &q in &env.cfg.fields {
        let s = match env.hh_setup(c, q, &[1]) {
            Ok(s) => s,
            Err(r) => {
                out.push(r);
                continue;
            }
        };
        let target = match env.ctx.group(q, &[1, 1]) {
            Ok(g) => Hecke::new(g),
            Err(e) => {
                out.push(env.error_record(c, shape_label(q, &[1, 1]), e));
                continue;
            }
        };
        let triples = s.triples();
        let grid: Vec<(usize, usize)> =
            (0..triples.len()).flat_map(|i| (0..triples.len()).map(move |j| (i, j))).collect();
        out.par_extend(grid.par_iter().map(|&(i, j)| {
            let inst = format!("{} {} x {}", shape_label(q, &[1, 1]), s.key(&triples[i]), s.key(&triples[j]));
            env.timed(c, inst, || {
                let ok = join_map_is_tensor(&target, &s.hecke, &triples[i], &s.hecke, &triples[j])?;
                Ok(if ok { Outcome::Pass } else { Outcome::Fail(json!({ "tensor": false })) })
            })
        }).collect::<Vec<_>>());
    }
    out
}

fn square_outcome(target: &Hecke, left: &HHSetup, right: &HHSetup, quad: [&Triple; 4]) -> Result<Option<Value>> {
    let (r1, r2) = square_routes(target, &left.hecke, &right.hecke, quad)?;
    if r1 == r2 {
        return Ok(None);
    }
    Ok(Some(json!({
        "x1": left.key(quad[0]),
        "x2": left.key(quad[1]),
        "x3": right.key(quad[2]),
        "x4": right.key(quad[3]),
        "compose_then_join_terms": r1.terms().len(),
        "join_then_compose_terms": r2.terms().len(),
    })))
}

fn hh_square(env: &Env) -> Vec<Record> {
    let c = info("hh_square");
    let mut out = Vec::new();
    for &q in &env.cfg.fields {
        if env.wants((1, 1)) {
            // exhaustive over G(1), joined into G(1) x G(1)
            let s = match env.hh_setup(c, q, &[1]) {
                Ok(s) => s,
                Err(r) => {
                    out.push(r);
                    continue;
                }
            };
            let target = match env.ctx.group(q, &[1, 1]) {
                Ok(g) => Hecke::new(g),
                Err(e) => {
                    out.push(env.error_record(c, shape_label(q, &[1, 1]), e));
                    continue;
                }
            };
            let triples = s.triples();
            let comp = s.composable(&triples);
            let label = shape_label(q, &[1, 1]);
            out.par_extend(comp.par_iter().map(|&(x1, x2)| {
                let inst = format!("{label} x1={} x2={}", s.key(&triples[x1]), s.key(&triples[x2]));
                env.timed(c, inst, || {
                    let mut bad = Vec::new();
                    for &(x3, x4) in &comp {
                        let quad = [&triples[x1], &triples[x2], &triples[x3], &triples[x4]];
                        if let Some(w) = square_outcome(&target, &s, &s, quad)? {
                            bad.push(w);
                        }
                    }
                    Ok(failures(bad, "quadruples"))
                })
            }).collect::<Vec<_>>());
        }

        // sampled, joined into G(a + b)
        for (a, b) in env.splits(env.cfg.max_degree) {
            let head = format!("{} x {} -> {}", shape_label(q, &[a]), shape_label(q, &[b]), shape_label(q, &[a + b]));
            let (sa, sb) = match (env.hh_setup(c, q, &[a]), env.hh_setup(c, q, &[b])) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(r), _) | (_, Err(r)) => {
                    out.push(r);
                    continue;
                }
            };
            let target = match env.ctx.group(q, &[a + b]) {
                Ok(g) => Hecke::new(g),
                Err(e) => {
                    out.push(env.error_record(c, head, e));
                    continue;
                }
            };
            let (ta, tb) = (sa.triples(), sb.triples());
            let (ca, cb) = (sa.composable(&ta), sb.composable(&tb));
            if ca.is_empty() || cb.is_empty() {
                out.push(env.timed(c, head, || Ok(Outcome::Vacuous)));
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(env.cfg.seed ^ ((q as u64) << 32 | (a as u64) << 16 | b as u64));
            let draws: Vec<(usize, usize)> =
                (0..env.cfg.samples).map(|_| (rng.gen_range(0..ca.len()), rng.gen_range(0..cb.len()))).collect();
            out.par_extend(draws.par_iter().enumerate().map(|(n, &(i, j))| {
                env.timed(c, format!("{head} sample={n}"), || {
                    let quad = [&ta[ca[i].0], &ta[ca[i].1], &tb[cb[j].0], &tb[cb[j].1]];
                    Ok(match square_outcome(&target, &sa, &sb, quad)? {
                        None => Outcome::Pass,
                        Some(w) => Outcome::Fail(w),
                    })
                })
            }).collect::<Vec<_>>());
        }
    }
    out
}

/// Cyclic pairs of `G(a)` when its subgroups are out of reach but the group
/// itself is within the order cap. Keys start with `cyclic:`.
fn cyclic_fallback(env: &Env, q: u32, a: usize) -> Option<Vec<(String, Pair)>> {
    if env.cfg.central.is_some() {
        return None;
    }
    let g = env.ctx.group(q, &[a]).ok()?;
    Some(
        cyclic_pair_classes(&g)
            .into_iter()
            .map(|p| {
                let exps: Vec<String> = p.chi.exps().iter().map(u32::to_string).collect();
                let gen = g.generators_of(&p.set).first().copied().unwrap_or(g.identity());
                (format!("cyclic:C{}<{gen}>:{}[{}]", p.order(), p.chi.order(), exps.join(",")), p)
            })
            .collect(),
    )
}

fn coassoc_plus(env: &Env) -> Vec<Record> {
    let c = info("coassoc_plus");
    let mut out = Vec::new();
    for (q, a) in env.groups(1, env.cfg.max_degree) {
        let label = shape_label(q, &[a]);
        let pairs: Vec<(String, Pair)> = match env.setup(c, q, &[a]) {
            Ok((basis, idx)) => idx.iter().map(|&i| (basis.key(i), basis.pair(i).clone())).collect(),
            Err(r) => {
                out.push(r);
                // past the subgroup cap, fall back to the pairs on cyclic subgroups
                match cyclic_fallback(env, q, a) {
                    Some(p) => p,
                    None => continue,
                }
            }
        };
        let grid: Vec<(usize, [usize; 3])> =
            (0..pairs.len()).flat_map(|i| compositions3(a).into_iter().map(move |s| (i, s))).collect();
        out.par_extend(grid.par_iter().map(|&(i, split)| {
            env.timed(c, format!("{label} {} split={split:?}", pairs[i].0), || {
                let r = coassociativity_plus(&env.ctx, q, a, &pairs[i].1, split)?;
                if r.left.is_zero() && r.right.is_zero() && r.direct.is_zero() {
                    return Ok(Outcome::Vacuous);
                }
                if r.left == r.direct && r.right == r.direct {
                    return Ok(Outcome::Pass);
                }
                let terms = |s: &MonomialSum| -> Value {
                    s.terms().iter().map(|(&k, v)| (s.basis().key(k), json!(v.to_string()))).collect()
                };
                Ok(Outcome::Fail(json!({
                    "two_step_left": terms(&r.left),
                    "two_step_right": terms(&r.right),
                    "direct": terms(&r.direct),
                    "b_degrees": [r.left.b_degree().to_string(), r.right.b_degree().to_string(), r.direct.b_degree().to_string()],
                })))
            })
        }).collect::<Vec<_>>());
    }
    out
}

fn run_check(name: &str, env: &Env) -> Vec<Record> {
    match name {
        "mackey" => mackey(env),
        "adjunction" => adjunction(env),
        "hopf" => hopf(env),
        "coassoc_r" => coassoc_r(env),
        "bcompat_mul" => bcompat_mul(env),
        "fixed_subspace" => fixed(env),
        "line_orbits" => line_orbits(env),
        "hh_relations" => hh_relations(env),
        "hh_compose" => hh_compose(env),
        "hh_comul_support" => hh_comul_support(env),
        "hh_comul_hom" => hh_comul_hom(env),
        "hh_join_tensor" => hh_join_tensor(env),
        "hh_square" => hh_square(env),
        "coassoc_plus" => coassoc_plus(env),
        "hh_condition" => hh_condition(env),
        _ => unreachable!("unknown checks are rejected up front"),
    }
}

/// Names of the checks a configuration selects, in registry order.
pub fn selected_checks(cfg: &RunConfig) -> Result<Vec<&'static str>> {
    match &cfg.checks {
        None => Ok(CHECKS.iter().map(|c| c.name).collect()),
        Some(list) => {
            for n in list {
                if !CHECKS.iter().any(|c| c.name == n) {
                    return Err(Error::Parse(format!("unknown check {n}")));
                }
            }
            Ok(CHECKS.iter().map(|c| c.name).filter(|n| list.iter().any(|x| x == n)).collect())
        }
    }
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if cfg.caps.order == 0 || cfg.caps.subgroups == 0 || cfg.caps.field == 0 {
        return Err(Error::Parse("caps must be positive".into()));
    }
    for &q in &cfg.fields {
        if crate::context::prime_power(q).is_none() {
            return Err(Error::UnsupportedField(q as u64));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    check: &'a str,
    instance: &'a str,
    status: Status,
    experimental: bool,
    witness: String,
    note: &'a str,
    timing_ms: String,
}

/// Run every selected check and write the records. Configuration errors are
/// returned; failing checks are data.
pub fn verify_all(cfg: &RunConfig, out: &mut dyn Write) -> Result<Summary> {
    validate(cfg)?;
    let names = selected_checks(cfg)?;
    let env = Env { cfg, ctx: Context::new(cfg.caps).with_sl_intersect(cfg.sl_intersect) };
    let io = |e: std::io::Error| Error::Io(e.to_string());
    let mut summary = Summary::default();
    let mut header = true;
    for name in names {
        let records = run_check(name, &env);
        for r in &records {
            summary.add(r);
            match cfg.format {
                Format::Json => {
                    let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
                    writeln!(out, "{line}").map_err(io)?;
                }
                Format::Csv => {
                    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(Vec::new());
                    header = false;
                    w.serialize(CsvRow {
                        check: r.check,
                        instance: &r.instance,
                        status: r.status,
                        experimental: r.experimental,
                        witness: r.witness.as_ref().map(Value::to_string).unwrap_or_default(),
                        note: r.note.as_deref().unwrap_or(""),
                        timing_ms: r.timing_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
                    })
                    .map_err(|e| Error::Io(e.to_string()))?;
                    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
                    out.write_all(&bytes).map_err(io)?;
                }
            }
        }
        out.flush().map_err(io)?;
    }
    Ok(summary)
}
