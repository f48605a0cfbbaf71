//! Synthetic directed networks with prescribed in/out degree structure.
//!
//! Everything here is a pure function of its inputs and seed.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::zeta::{hurwitz, power_sum};
use crate::distributions::{DegreeSequence, Direction};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, DropCounts};
use crate::metrics::{hierarchy_degree, scc_decompose};

/// Survival values kept in the lookup table before falling back to a
/// zeta-based search.
const TABLE_LEN: u64 = 1 << 16;

fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Inverse-transform sampler for p(k) ∝ k^-γ on [k_min, cutoff].
struct PowerLawSampler {
    gamma: f64,
    k_min: u64,
    cutoff: Option<u64>,
    /// Normalizer Σ_{k_min..=cutoff} k^-γ.
    norm: f64,
    /// Tail mass Σ_{k > cutoff} k^-γ (0 when unbounded).
    beyond: f64,
    /// survival[i] = P(K >= k_min + i).
    survival: Vec<f64>,
}

impl PowerLawSampler {
    fn new(gamma: f64, k_min: u64, cutoff: Option<u64>) -> Self {
        let beyond = cutoff.map_or(0.0, |c| hurwitz(gamma, c as f64 + 1.0));
        let norm = power_sum(gamma, k_min, cutoff);
        let last = match cutoff {
            Some(c) => c.min(k_min + TABLE_LEN - 1),
            None => k_min + TABLE_LEN - 1,
        };
        let len = (last - k_min + 1) as usize;
        let mut survival = vec![0.0; len];
        // Mass at or above `last`, then accumulate downward.
        let mut acc = power_sum(gamma, last, cutoff);
        survival[len - 1] = acc;
        for i in (0..len - 1).rev() {
            acc += ((k_min + i as u64) as f64).powf(-gamma);
            survival[i] = acc;
        }
        for s in survival.iter_mut() {
            *s /= norm;
        }
        survival[0] = 1.0;
        PowerLawSampler {
            gamma,
            k_min,
            cutoff,
            norm,
            beyond,
            survival,
        }
    }

    fn survival_at(&self, k: u64) -> f64 {
        if self.cutoff.is_some_and(|c| k > c) {
            return 0.0;
        }
        (hurwitz(self.gamma, k as f64) - self.beyond) / self.norm
    }

    /// Largest k with P(K >= k) >= u, for u in (0, 1].
    fn quantile(&self, u: f64) -> u64 {
        let table_hits = self.survival.partition_point(|&s| s >= u);
        if table_hits < self.survival.len() {
            return self.k_min + table_hits as u64 - 1;
        }
        // Beyond the table: exponential search, then bisection on survival.
        let mut lo = self.k_min + self.survival.len() as u64 - 1;
        let mut step = lo.max(1);
        let mut hi = lo.saturating_add(step);
        while self.survival_at(hi) >= u {
            lo = hi;
            step = step.saturating_mul(2);
            hi = hi.saturating_add(step);
            if hi == u64::MAX {
                return hi;
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.survival_at(mid) >= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        // gen::<f64>() is in [0, 1); shift to (0, 1].
        self.quantile(1.0 - rng.gen::<f64>())
    }
}

fn check_law(gamma: f64, k_min: u64, cutoff: Option<u64>) -> Result<()> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must exceed 1, got {gamma}")));
    }
    if k_min == 0 {
        return Err(Error::InvalidParameter("k_min must be >= 1".into()));
    }
    if let Some(c) = cutoff {
        if c < k_min {
            return Err(Error::InvalidParameter(format!("cutoff {c} below k_min {k_min}")));
        }
    }
    Ok(())
}

/// `n` independent draws from the discrete power law p(k) ∝ k^-γ on
/// [k_min, cutoff] (`None` for no upper bound).
pub fn sample_degree_sequence(
    n: usize,
    gamma: f64,
    k_min: u64,
    cutoff: Option<u64>,
    seed: u64,
) -> Result<DegreeSequence> {
    check_law(gamma, k_min, cutoff)?;
    if cutoff == Some(k_min) {
        return Ok(DegreeSequence::new(None, vec![k_min; n]));
    }
    let sampler = PowerLawSampler::new(gamma, k_min, cutoff);
    let mut rng = rng_from(seed);
    let values = (0..n).map(|_| sampler.sample(&mut rng)).collect();
    Ok(DegreeSequence::new(None, values))
}

/// Exact P(K >= k) of the law sampled by [`sample_degree_sequence`].
pub fn power_law_survival(gamma: f64, k_min: u64, cutoff: Option<u64>, k: u64) -> f64 {
    if k <= k_min {
        return 1.0;
    }
    if cutoff.is_some_and(|c| k > c) {
        return 0.0;
    }
    power_sum(gamma, k, cutoff) / power_sum(gamma, k_min, cutoff)
}

/// Decrements uniformly chosen entries above `k_floor` in whichever sequence
/// has the larger sum until the sums agree.
pub fn balance_sequences(
    in_seq: &DegreeSequence,
    out_seq: &DegreeSequence,
    k_floor: u64,
    seed: u64,
) -> Result<(DegreeSequence, DegreeSequence)> {
    if in_seq.is_empty() || out_seq.is_empty() {
        return Err(Error::InvalidParameter("sequences must be nonempty".into()));
    }
    let mut ins = in_seq.clone();
    let mut outs = out_seq.clone();
    let (sum_in, sum_out) = (ins.sum(), outs.sum());
    if sum_in == sum_out {
        return Ok((ins, outs));
    }
    let (larger, excess) = if sum_in > sum_out {
        (&mut ins, sum_in - sum_out)
    } else {
        (&mut outs, sum_out - sum_in)
    };

    let mut eligible: Vec<usize> = (0..larger.values.len())
        .filter(|&i| larger.values[i] > k_floor)
        .collect();
    let room: u64 = eligible.iter().map(|&i| larger.values[i] - k_floor).sum();
    if room < excess {
        return Err(Error::CannotBalance { floor: k_floor });
    }

    let mut rng = rng_from(seed);
    for _ in 0..excess {
        let slot = rng.gen_range(0..eligible.len());
        let i = eligible[slot];
        larger.values[i] -= 1;
        if larger.values[i] == k_floor {
            eligible.swap_remove(slot);
        }
    }
    Ok((ins, outs))
}

/// Requested versus realized structure of an erased configuration model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationReport {
    pub stubs: u64,
    pub self_loops_erased: usize,
    pub duplicates_erased: usize,
    pub realized_in: Vec<u64>,
    pub realized_out: Vec<u64>,
}

impl ConfigurationReport {
    pub fn drop_fraction(&self) -> f64 {
        if self.stubs == 0 {
            return 0.0;
        }
        (self.self_loops_erased + self.duplicates_erased) as f64 / self.stubs as f64
    }
}

/// Uniform stub matching of out-stubs against in-stubs, followed by erasure
/// of self-loops and duplicate edges.
pub fn configuration_model(
    in_seq: &DegreeSequence,
    out_seq: &DegreeSequence,
    seed: u64,
) -> Result<(DirectedGraph, ConfigurationReport)> {
    if in_seq.len() != out_seq.len() {
        return Err(Error::InvalidParameter(format!(
            "sequence lengths differ: in={} out={}",
            in_seq.len(),
            out_seq.len()
        )));
    }
    let (sum_in, sum_out) = (in_seq.sum(), out_seq.sum());
    if sum_in != sum_out {
        return Err(Error::SumMismatch {
            in_sum: sum_in,
            out_sum: sum_out,
        });
    }
    let stubs = |seq: &DegreeSequence| -> Vec<usize> {
        seq.values
            .iter()
            .enumerate()
            .flat_map(|(v, &k)| std::iter::repeat_n(v, k as usize))
            .collect()
    };
    let out_stubs = stubs(out_seq);
    let mut in_stubs = stubs(in_seq);
    let mut rng = rng_from(seed);
    in_stubs.shuffle(&mut rng);

    let (graph, drops): (DirectedGraph, DropCounts) = DirectedGraph::with_anonymous_nodes(
        in_seq.len(),
        out_stubs.into_iter().zip(in_stubs),
    )?;
    let report = ConfigurationReport {
        stubs: sum_out,
        self_loops_erased: drops.self_loops_rejected,
        duplicates_erased: drops.duplicates_dropped,
        realized_in: graph.nodes().map(|v| graph.in_degree(v) as u64).collect(),
        realized_out: graph.nodes().map(|v| graph.out_degree(v) as u64).collect(),
    };
    Ok((graph, report))
}

/// Parameters of [`generate_asymmetric_network`].
///
/// A `k_min` of 0 draws from the shifted law p(k) ∝ (k+1)^-γ, k >= 0, so
/// zero-degree nodes can occur; `None` picks it automatically (see
/// [`GeneratorSpec::resolved_k_min`]). Cutoffs are inclusive upper bounds;
/// `None` leaves the law untruncated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub gamma_in: f64,
    pub gamma_out: f64,
    pub k_min_in: Option<u64>,
    pub k_min_out: Option<u64>,
    pub cutoff_in: Option<u64>,
    pub cutoff_out: Option<u64>,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Spec with automatic k_min and cutoffs at n − 1, the largest degree a
    /// simple digraph on n nodes can realize.
    pub fn new(n: usize, gamma_in: f64, gamma_out: f64, seed: u64) -> Self {
        let cap = (n.max(2) - 1) as u64;
        GeneratorSpec {
            n,
            gamma_in,
            gamma_out,
            k_min_in: None,
            k_min_out: None,
            cutoff_in: Some(cap),
            cutoff_out: Some(cap),
            seed,
        }
    }

    pub fn with_cutoff_in(mut self, cutoff: Option<u64>) -> Self {
        self.cutoff_in = cutoff;
        self
    }

    pub fn with_cutoff_out(mut self, cutoff: Option<u64>) -> Self {
        self.cutoff_out = cutoff;
        self
    }

    pub fn with_k_min(mut self, k_min_in: u64, k_min_out: u64) -> Self {
        self.k_min_in = Some(k_min_in);
        self.k_min_out = Some(k_min_out);
        self
    }

    /// k_min per direction. Unset values are chosen so both laws have nearly
    /// the same mean, which keeps balancing to a handful of decrements: the
    /// direction with the larger mean at k_min = 1 (or the one given) stays
    /// put and the other k_min rises while that brings its mean closer.
    pub fn resolved_k_min(&self) -> (u64, u64) {
        let law_in = (self.gamma_in, self.cutoff_in);
        let law_out = (self.gamma_out, self.cutoff_out);
        match (self.k_min_in, self.k_min_out) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, match_mean(law_out, shifted_mean(law_in, a))),
            (None, Some(b)) => (match_mean(law_in, shifted_mean(law_out, b)), b),
            (None, None) => {
                let (mi, mo) = (law_mean(law_in, 1), law_mean(law_out, 1));
                if mi >= mo {
                    (1, match_mean(law_out, mi))
                } else {
                    (match_mean(law_in, mo), 1)
                }
            }
        }
    }

    /// Both directions follow the same law.
    pub fn is_symmetric(&self) -> bool {
        let (a, b) = self.resolved_k_min();
        self.gamma_in == self.gamma_out && a == b && self.cutoff_in == self.cutoff_out
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        for gamma in [self.gamma_in, self.gamma_out] {
            if !(gamma > 1.0 && gamma.is_finite()) {
                return Err(Error::InvalidParameter(format!("gamma must exceed 1, got {gamma}")));
            }
        }
        let (k_min_in, k_min_out) = self.resolved_k_min();
        if k_min_in == 0 && k_min_out == 0 {
            return Err(Error::InvalidParameter(
                "at least one of k_min_in, k_min_out must be >= 1".into(),
            ));
        }
        for (gamma, k_min, cutoff) in [
            (self.gamma_in, k_min_in, self.cutoff_in),
            (self.gamma_out, k_min_out, self.cutoff_out),
        ] {
            check_law(gamma, k_min.max(1), cutoff.map(|c| c + u64::from(k_min == 0)))?;
        }
        Ok(())
    }

    /// One line per field, for provenance headers.
    pub fn describe(&self) -> Vec<String> {
        let cut = |c: Option<u64>| c.map_or_else(|| "unbounded".to_string(), |c| c.to_string());
        let (k_min_in, k_min_out) = self.resolved_k_min();
        let auto = |set: Option<u64>, k: u64| match set {
            Some(_) => k.to_string(),
            None => format!("{k}(auto)"),
        };
        vec![
            "generator: erased configuration model, power-law in/out degrees".to_string(),
            format!("n={}", self.n),
            format!("gamma_in={} gamma_out={}", self.gamma_in, self.gamma_out),
            format!("k_min_in={} k_min_out={}", auto(self.k_min_in, k_min_in), auto(self.k_min_out, k_min_out)),
            format!("cutoff_in={} cutoff_out={}", cut(self.cutoff_in), cut(self.cutoff_out)),
            format!("seed={}", self.seed),
        ]
    }
}

/// Mean of p(k) ∝ k^-γ on [k_min, cutoff]; infinite when it diverges.
fn law_mean((gamma, cutoff): (f64, Option<u64>), k_min: u64) -> f64 {
    const DIRECT: u64 = 1 << 21;
    match cutoff {
        Some(c) if c < k_min => f64::NAN,
        Some(c) if c - k_min < DIRECT => {
            let (mut num, mut den) = (0.0, 0.0);
            for k in (k_min..=c).rev() {
                let w = (k as f64).powf(-gamma);
                num += k as f64 * w;
                den += w;
            }
            num / den
        }
        Some(c) if (gamma - 2.0).abs() > 1e-9 => {
            power_sum(gamma - 1.0, k_min, Some(c)) / power_sum(gamma, k_min, Some(c))
        }
        Some(c) => ((c as f64 + 0.5) / (k_min as f64 - 0.5)).ln() / power_sum(gamma, k_min, Some(c)),
        None if gamma <= 2.0 => f64::INFINITY,
        None => hurwitz(gamma - 1.0, k_min as f64) / hurwitz(gamma, k_min as f64),
    }
}

/// Mean of the law as sampled for `k_min`, including the k_min = 0 shift.
fn shifted_mean(law: (f64, Option<u64>), k_min: u64) -> f64 {
    if k_min == 0 {
        law_mean((law.0, law.1.map(|c| c + 1)), 1) - 1.0
    } else {
        law_mean(law, k_min)
    }
}

/// Smallest-distance k_min >= 1 whose mean approaches `target`.
fn match_mean(law: (f64, Option<u64>), target: f64) -> u64 {
    let mut k = 1;
    if !target.is_finite() {
        return k;
    }
    let mut gap = (law_mean(law, k) - target).abs();
    while law.1.is_none_or(|c| k < c) {
        let next = (law_mean(law, k + 1) - target).abs();
        if next.partial_cmp(&gap) != Some(std::cmp::Ordering::Less) {
            break;
        }
        k += 1;
        gap = next;
    }
    k
}

fn sample_shifted(n: usize, gamma: f64, k_min: u64, cutoff: Option<u64>, seed: u64) -> Result<DegreeSequence> {
    if k_min > 0 {
        return sample_degree_sequence(n, gamma, k_min, cutoff, seed);
    }
    let mut seq = sample_degree_sequence(n, gamma, 1, cutoff.map(|c| c + 1), seed)?;
    for v in seq.values.iter_mut() {
        *v -= 1;
    }
    Ok(seq)
}

#[derive(Clone, Debug)]
pub struct GeneratedNetwork {
    pub graph: DirectedGraph,
    pub spec: GeneratorSpec,
    /// Balanced sequences handed to the stub matcher.
    pub requested_in: DegreeSequence,
    pub requested_out: DegreeSequence,
    pub configuration: ConfigurationReport,
    /// Sequence pairs sampled before one was accepted.
    pub draws: usize,
}

/// Largest accepted |Σ in − Σ out| relative to the smaller sum.
pub const BALANCE_TOLERANCE: f64 = 0.1;
/// Sequence pairs tried before settling for the best-matched one.
pub const MAX_DRAWS: usize = 64;

/// Sample, balance, and wire a network per `spec`.
///
/// Symmetric specs reuse one sampled multiset for both directions (randomly
/// reassigned for out-degrees), so the two marginals start identical.
/// Pairs whose sums differ by more than [`BALANCE_TOLERANCE`] are redrawn
/// (up to [`MAX_DRAWS`] times, keeping the closest pair), since balancing
/// a heavy-tailed excess would flatten most of one sequence onto its floor.
/// Balancing then decrements the larger-sum sequence down to its own k_min.
pub fn generate_asymmetric_network(spec: &GeneratorSpec) -> Result<GeneratedNetwork> {
    spec.validate()?;
    let mut master = rng_from(spec.seed);
    let seed_balance = master.next_u64();
    let seed_match = master.next_u64();

    let (k_min_in, k_min_out) = spec.resolved_k_min();
    let mut best: Option<(f64, DegreeSequence, DegreeSequence)> = None;
    let mut draws = 0;
    while draws < MAX_DRAWS {
        draws += 1;
        let seed_in = master.next_u64();
        let seed_out = master.next_u64();
        let ins = sample_shifted(spec.n, spec.gamma_in, k_min_in, spec.cutoff_in, seed_in)?;
        let outs = if spec.is_symmetric() {
            let mut values = ins.values.clone();
            values.shuffle(&mut rng_from(seed_out));
            DegreeSequence::new(None, values)
        } else {
            sample_shifted(spec.n, spec.gamma_out, k_min_out, spec.cutoff_out, seed_out)?
        };
        let (a, b) = (ins.sum(), outs.sum());
        let mismatch = a.abs_diff(b) as f64 / a.min(b).max(1) as f64;
        if best.as_ref().is_none_or(|(m, _, _)| mismatch < *m) {
            best = Some((mismatch, ins, outs));
        }
        if mismatch <= BALANCE_TOLERANCE {
            break;
        }
    }
    let (_, mut ins, mut outs) = best.expect("at least one draw");
    let floor = if ins.sum() > outs.sum() { k_min_in } else { k_min_out };
    (ins, outs) = balance_sequences(&ins, &outs, floor, seed_balance)?;
    ins.direction = Some(Direction::In);
    outs.direction = Some(Direction::Out);

    let (graph, configuration) = configuration_model(&ins, &outs, seed_match)?;
    Ok(GeneratedNetwork {
        graph,
        spec: spec.clone(),
        requested_in: ins,
        requested_out: outs,
        configuration,
        draws,
    })
}

/// Adds back-edges v → u along random directed paths u ⇝ v of length >= 2
/// until the hierarchy degree is at most `target_h`. Returns the new graph
/// and the achieved hierarchy degree, which may stay above the target when
/// no eligible path remains.
pub fn inject_cycles(dag: &DirectedGraph, target_h: f64, seed: u64) -> Result<(DirectedGraph, f64)> {
    if !(0.0..=1.0).contains(&target_h) {
        return Err(Error::InvalidParameter(format!("target_h must lie in [0, 1], got {target_h}")));
    }
    let scc = scc_decompose(dag);
    if scc.component_sizes.iter().any(|&s| s > 1) {
        return Err(Error::InvalidParameter("input graph is not acyclic".into()));
    }
    let mut h = hierarchy_degree(dag)?;
    let labels = dag.labels().to_vec();
    let mut edges: Vec<(usize, usize)> = dag.edges().map(|e| (e.source.0, e.target.0)).collect();
    let mut graph = dag.clone();
    let mut rng = rng_from(seed);
    let n = graph.node_count();
    let mut first = true;

    while h > target_h {
        let comp = scc_decompose(&graph).component_of;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);

        let mut chosen = None;
        let mut fallback = None;
        for &u in &order {
            let dist = bfs_hops(&graph, u);
            let mut far: Vec<usize> = (0..n)
                .filter(|&v| dist[v] != usize::MAX && dist[v] >= 2)
                .filter(|&v| !graph.has_edge(crate::graph::NodeId(v), crate::graph::NodeId(u)))
                .collect();
            if far.is_empty() {
                continue;
            }
            let open: Vec<usize> = far.iter().copied().filter(|&v| comp[v] != comp[u]).collect();
            if !open.is_empty() {
                chosen = Some((open[rng.gen_range(0..open.len())], u));
                break;
            }
            if fallback.is_none() {
                far.sort_unstable();
                fallback = Some((far[rng.gen_range(0..far.len())], u));
            }
        }
        let Some((v, u)) = chosen.or(fallback) else {
            if first {
                return Err(Error::NoLongPath);
            }
            break;
        };
        first = false;
        edges.push((v, u));
        graph = DirectedGraph::from_edges(labels.clone(), edges.iter().copied())?.0;
        h = hierarchy_degree(&graph)?;
    }
    Ok((graph, h))
}

fn bfs_hops(graph: &DirectedGraph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; graph.node_count()];
    let mut queue = std::collections::VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for w in graph.successors(crate::graph::NodeId(v)) {
            if dist[w.0] == usize::MAX {
                dist[w.0] = dist[v] + 1;
                queue.push_back(w.0);
            }
        }
    }
    dist
}
