use std::collections::{BTreeMap, VecDeque};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fields::{is_closed, Classification, ClosednessReport, FieldOneForm, Rect};

use super::{Atlas, ChartId, PotentialSet};

pub const DEFAULT_OVERLAP_SAMPLES: usize = 32;
/// Tolerance on overlap constancy and on the triple-overlap identity.
pub const CONSTANCY_TOL: f64 = 1e-7;
/// A cycle period below this counts as zero.
pub const PERIOD_TOL: f64 = 1e-7;

/// Overlap constants `c_ij = V_i − V_j` over the nerve of an atlas.
#[derive(Debug, Clone, PartialEq)]
pub struct CechCocycle {
    charts: Vec<ChartId>,
    entries: BTreeMap<(ChartId, ChartId), f64>,
    spreads: BTreeMap<(ChartId, ChartId), f64>,
    triples: Vec<(ChartId, ChartId, ChartId)>,
    samples: usize,
    tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CocycleEntry {
    pub i: ChartId,
    pub j: ChartId,
    pub c: f64,
    pub spread: f64,
}

impl CechCocycle {
    /// Builds a cocycle from the values on edges `i < j`; the diagonal and
    /// the reversed entries are filled in.
    pub fn from_edges(
        charts: Vec<ChartId>,
        edges: &[(ChartId, ChartId, f64)],
        triples: Vec<(ChartId, ChartId, ChartId)>,
        tol: f64,
    ) -> Result<CechCocycle> {
        let mut cc = CechCocycle {
            charts,
            entries: BTreeMap::new(),
            spreads: BTreeMap::new(),
            triples,
            samples: 0,
            tol,
        };
        cc.charts.sort();
        cc.charts.dedup();
        for &i in &cc.charts {
            cc.entries.insert((i, i), 0.0);
            cc.spreads.insert((i, i), 0.0);
        }
        for &(i, j, c) in edges {
            if !cc.charts.contains(&i) || !cc.charts.contains(&j) {
                return Err(Error::invalid(format!("cocycle edge ({i},{j}) names an unknown chart")));
            }
            if i == j {
                return Err(Error::invalid(format!("cocycle edge ({i},{i}) is diagonal")));
            }
            cc.insert(i, j, c, 0.0);
        }
        Ok(cc)
    }

    fn insert(&mut self, i: ChartId, j: ChartId, c: f64, spread: f64) {
        self.entries.insert((i, j), c);
        self.entries.insert((j, i), -c);
        self.spreads.insert((i, j), spread);
        self.spreads.insert((j, i), spread);
    }

    pub fn charts(&self) -> &[ChartId] {
        &self.charts
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn triples(&self) -> &[(ChartId, ChartId, ChartId)] {
        &self.triples
    }

    pub fn get(&self, i: ChartId, j: ChartId) -> Option<f64> {
        self.entries.get(&(i, j)).copied()
    }

    pub fn c(&self, i: ChartId, j: ChartId) -> Result<f64> {
        self.get(i, j).ok_or(Error::MissingOverlap { i, j })
    }

    pub fn spread(&self, i: ChartId, j: ChartId) -> Option<f64> {
        self.spreads.get(&(i, j)).copied()
    }

    /// Nerve edges `i < j`.
    pub fn edges(&self) -> Vec<(ChartId, ChartId)> {
        self.entries.keys().filter(|(i, j)| i < j).copied().collect()
    }

    /// Entries for `i < j`.
    pub fn rows(&self) -> Vec<CocycleEntry> {
        self.edges()
            .into_iter()
            .map(|(i, j)| CocycleEntry {
                i,
                j,
                c: self.entries[&(i, j)],
                spread: self.spreads[&(i, j)],
            })
            .collect()
    }

    pub fn max_spread(&self) -> f64 {
        self.spreads.values().copied().fold(0.0, f64::max)
    }

    /// Re-checks `c_ii = 0`, `c_ij = −c_ji` and `c_ij + c_jk = c_ik` on
    /// triple overlaps.
    pub fn verify(&self) -> Result<()> {
        for &i in &self.charts {
            if self.get(i, i) != Some(0.0) {
                return Err(Error::invalid(format!("c_{i}{i} is not zero")));
            }
        }
        for (&(i, j), &c) in &self.entries {
            if self.get(j, i) != Some(-c) {
                return Err(Error::invalid(format!("c_{i}{j} and c_{j}{i} are not opposite")));
            }
        }
        for &(i, j, k) in &self.triples {
            let residual = (self.c(i, j)? + self.c(j, k)? - self.c(i, k)?).abs();
            if residual > self.tol {
                return Err(Error::TripleOverlap { i, j, k, residual });
            }
        }
        Ok(())
    }

    /// `c_ij ↦ c_ij + a_i − a_j`, with `a` indexed like `charts()`.
    pub fn gauge_shift(&self, a: &[f64]) -> Result<CechCocycle> {
        if a.len() != self.charts.len() {
            return Err(Error::invalid(format!(
                "expected {} gauge offsets, got {}",
                self.charts.len(),
                a.len()
            )));
        }
        let idx = |id: ChartId| self.charts.binary_search(&id).expect("chart of an entry");
        let mut out = self.clone();
        for ((i, j), c) in out.entries.iter_mut() {
            if i != j {
                *c = *c + a[idx(*i)] - a[idx(*j)];
            }
        }
        // keep antisymmetry exact after rounding
        for (i, j) in self.edges() {
            let c = out.entries[&(i, j)];
            out.entries.insert((j, i), -c);
        }
        Ok(out)
    }

    /// `Σ c` along consecutive charts of a closed chart cycle.
    pub fn cycle_sum(&self, cycle: &[ChartId]) -> Result<f64> {
        check_cycle(cycle)?;
        let mut s = 0.0;
        for w in cycle.windows(2) {
            s += self.c(w[0], w[1])?;
        }
        Ok(s)
    }
}

pub(crate) fn check_cycle(cycle: &[ChartId]) -> Result<()> {
    if cycle.len() < 2 || cycle.first() != cycle.last() {
        return Err(Error::invalid("a chart cycle must start and end at the same chart"));
    }
    Ok(())
}

impl Serialize for CechCocycle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CechCocycle", 5)?;
        st.serialize_field("charts", &self.charts)?;
        st.serialize_field("entries", &self.rows())?;
        st.serialize_field("triples", &self.triples)?;
        st.serialize_field("samples", &self.samples)?;
        st.serialize_field("tol", &self.tol)?;
        st.end()
    }
}

/// Computes `c_ij` as the mean of `V_i − V_j` over `k` samples of each
/// nonempty overlap.
pub fn cocycle(ps: &PotentialSet, at: &Atlas, k: usize, tol: f64) -> Result<CechCocycle> {
    if k == 0 {
        return Err(Error::invalid("cocycle needs at least one overlap sample"));
    }
    let mut cc = CechCocycle::from_edges(at.ids(), &[], at.triple_overlaps()?, tol)?;
    cc.samples = k;
    for (i, j) in at.nerve_edges()? {
        let pts = at.overlap_samples(i, j, k)?;
        if pts.len() < k {
            return Err(Error::invalid(format!(
                "overlap ({i},{j}) yielded only {} of {k} samples",
                pts.len()
            )));
        }
        let vi = ps.get(i)?;
        let vj = ps.get(j)?;
        let mut sum = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &q in &pts {
            let d = vi.eval(q)? - vj.eval(q)?;
            sum += d;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let spread = hi - lo;
        if spread > tol {
            return Err(Error::NonConstantDifference { i, j, spread, tol });
        }
        cc.insert(i, j, sum / pts.len() as f64, spread);
    }
    cc.verify()?;
    Ok(cc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclePeriod {
    pub cycle: Vec<ChartId>,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactnessReport {
    pub exact: bool,
    pub tol: f64,
    pub charts: Vec<ChartId>,
    /// `a_i` with `c_ij = a_i − a_j` on the spanning tree (root at 0);
    /// `gauge_shift(−a)` zeroes an exact cocycle.
    pub offsets: Vec<f64>,
    pub tree_edges: Vec<(ChartId, ChartId)>,
    /// One period per non-tree edge: independent cycles of the nerve.
    pub periods: Vec<CyclePeriod>,
}

impl ExactnessReport {
    pub fn zeroing_offsets(&self) -> Vec<f64> {
        self.offsets.iter().map(|a| -a).collect()
    }
}

/// Solves `c = δa` on a BFS spanning tree of the nerve; every non-tree
/// edge closes one independent cycle whose sum is its period.
pub fn exactness_test(cc: &CechCocycle) -> Result<ExactnessReport> {
    let ids = cc.charts.clone();
    let n = ids.len();
    let idx = |id: ChartId| ids.binary_search(&id).expect("known chart");
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in cc.edges() {
        adj[idx(i)].push(idx(j));
        adj[idx(j)].push(idx(i));
    }
    for a in &mut adj {
        a.sort_unstable();
    }

    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut offsets = vec![0.0; n];
    let mut tree_edges = Vec::new();
    let mut components = Vec::new();
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        let mut comp = vec![ids[root]];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = Some(u);
                    offsets[v] = offsets[u] - cc.c(ids[u], ids[v])?;
                    tree_edges.push((ids[u].min(ids[v]), ids[u].max(ids[v])));
                    comp.push(ids[v]);
                    queue.push_back(v);
                }
            }
        }
        comp.sort();
        components.push(comp);
    }
    if components.len() > 1 {
        return Err(Error::DisconnectedNerve { components });
    }

    let mut periods = Vec::new();
    for (i, j) in cc.edges() {
        let (u, v) = (idx(i), idx(j));
        if parent[v] == Some(u) || parent[u] == Some(v) {
            continue;
        }
        // i → j, then up from j and down to i through their common ancestor
        let (mut a, mut b) = (v, u);
        let mut up = vec![v];
        let mut down = vec![u];
        while a != b {
            if depth[a] >= depth[b] {
                a = parent[a].expect("non-root");
                up.push(a);
            } else {
                b = parent[b].expect("non-root");
                down.push(b);
            }
        }
        down.pop();
        down.reverse();
        let mut cycle: Vec<ChartId> = std::iter::once(u).chain(up).chain(down).map(|k| ids[k]).collect();
        cycle.pop();
        let start = (0..cycle.len()).min_by_key(|&k| cycle[k]).expect("nonempty cycle");
        cycle.rotate_left(start);
        cycle.push(cycle[0]);
        let period = cc.cycle_sum(&cycle)?;
        periods.push(CyclePeriod { cycle, period });
    }
    Ok(ExactnessReport {
        exact: periods.iter().all(|p| p.period.abs() < PERIOD_TOL),
        tol: PERIOD_TOL,
        charts: ids,
        offsets,
        tree_edges,
        periods,
    })
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub regions: Vec<Rect>,
    pub grid: usize,
    pub h: f64,
    pub tol: f64,
    pub samples: usize,
}

impl Default for ClassifyOptions {
    fn default() -> ClassifyOptions {
        ClassifyOptions {
            regions: vec![
                Rect::new(0.25, 0.25, 2.0, 2.0),
                Rect::new(-2.0, 0.25, -0.25, 2.0),
                Rect::new(-2.0, -2.0, -0.25, -0.25),
                Rect::new(0.25, -2.0, 2.0, -0.25),
            ],
            grid: 20,
            h: 1e-5,
            tol: 1e-5,
            samples: DEFAULT_OVERLAP_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub field: String,
    pub classification: Classification,
    pub closedness: Vec<ClosednessReport>,
    pub cocycle: Option<CechCocycle>,
    pub exactness: Option<ExactnessReport>,
}

/// Closedness on sample regions, then the cocycle exactness test.
pub fn classify(f: &FieldOneForm, at: &Atlas, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    let closedness = opts
        .regions
        .iter()
        .map(|&r| is_closed(f, r, opts.grid, opts.h, opts.tol))
        .collect::<Result<Vec<_>>>()?;
    if closedness.iter().any(|r| !r.pass) {
        return Ok(ClassificationReport {
            field: f.name.clone(),
            classification: Classification::NotClosed,
            closedness,
            cocycle: None,
            exactness: None,
        });
    }
    let ps = PotentialSet::build(f, at);
    let cc = cocycle(&ps, at, opts.samples, CONSTANCY_TOL)?;
    let ex = exactness_test(&cc)?;
    Ok(ClassificationReport {
        field: f.name.clone(),
        classification: if ex.exact {
            Classification::Exact
        } else {
            Classification::ClosedNotExact
        },
        closedness,
        cocycle: Some(cc),
        exactness: Some(ex),
    })
}
