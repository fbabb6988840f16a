use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{modularity, Partition};
use crate::csng::{symmetrize, Csng};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LouvainConfig {
    pub resolution: f64,
    /// Maximum number of move-and-coarsen rounds.
    pub max_passes: usize,
    /// A round that improves modularity by less than this ends the run.
    pub min_gain: f64,
    pub seed: u64,
    /// Independent runs with derived seeds; the best modularity is kept.
    pub restarts: usize,
    /// Perturb-and-rerun steps applied to the best partition. Zero gives
    /// plain Louvain.
    pub perturbations: usize,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        Self {
            resolution: 1.0,
            max_passes: 20,
            min_gain: 1e-7,
            seed: 0,
            restarts: 1,
            perturbations: 64,
        }
    }
}

impl LouvainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "resolution must be positive, got {}",
                self.resolution
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidConfig("max_passes must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if !(self.min_gain.is_finite() && self.min_gain >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "min_gain must be non-negative, got {}",
                self.min_gain
            )));
        }
        Ok(())
    }
}

/// Modularity after each completed round, starting with the singleton
/// partition.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LouvainTrace {
    pub modularity: Vec<f64>,
    pub moves: Vec<usize>,
}

/// Symmetric weighted graph in CSR form with the diagonal kept separately.
/// `loops[i]` is the adjacency entry `A_ii`.
struct Work {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    loops: Vec<f64>,
    degree: Vec<f64>,
}

impl Work {
    fn from_csng(g: &Csng) -> Self {
        let n = g.n_nodes();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(g.n_entries());
        let mut weights = Vec::with_capacity(g.n_entries());
        offsets.push(0);
        for i in 0..n {
            for (&t, &w) in g.neighbors(i).iter().zip(g.weights(i)) {
                targets.push(t as usize);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        let degree = (0..n).map(|i| g.weighted_degree(i)).collect();
        Self {
            offsets,
            targets,
            weights,
            loops: vec![0.0; n],
            degree,
        }
    }

    fn len(&self) -> usize {
        self.loops.len()
    }

    fn two_w(&self) -> f64 {
        self.degree.iter().sum()
    }

    fn modularity(&self, comm: &[usize], gamma: f64) -> f64 {
        let two_w = self.two_w();
        let n_comm = comm.iter().copied().max().map_or(0, |m| m + 1);
        let mut inside = vec![0.0; n_comm];
        let mut total = vec![0.0; n_comm];
        for i in 0..self.len() {
            let c = comm[i];
            total[c] += self.degree[i];
            inside[c] += self.loops[i];
            for e in self.offsets[i]..self.offsets[i + 1] {
                if comm[self.targets[e]] == c {
                    inside[c] += self.weights[e];
                }
            }
        }
        inside
            .iter()
            .zip(&total)
            .map(|(&si, &st)| si / two_w - gamma * (st / two_w) * (st / two_w))
            .sum()
    }

    /// Collapses each community into one node.
    fn coarsen(&self, comm: &[usize], n_comm: usize) -> Work {
        let mut loops = vec![0.0; n_comm];
        let mut degree = vec![0.0; n_comm];
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_comm];
        for (i, &c) in comm.iter().enumerate() {
            members[c].push(i);
            loops[c] += self.loops[i];
            degree[c] += self.degree[i];
        }
        let mut acc = vec![0.0; n_comm];
        let mut touched = Vec::new();
        let mut offsets = Vec::with_capacity(n_comm + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for (c, nodes) in members.iter().enumerate() {
            for &i in nodes {
                for e in self.offsets[i]..self.offsets[i + 1] {
                    let d = comm[self.targets[e]];
                    if d == c {
                        loops[c] += self.weights[e];
                    } else {
                        if acc[d] == 0.0 {
                            touched.push(d);
                        }
                        acc[d] += self.weights[e];
                    }
                }
            }
            touched.sort_unstable();
            for &d in &touched {
                targets.push(d);
                weights.push(acc[d]);
                acc[d] = 0.0;
            }
            touched.clear();
            offsets.push(targets.len());
        }
        Work {
            offsets,
            targets,
            weights,
            loops,
            degree,
        }
    }
}

/// Runs Louvain and returns the final partition.
pub fn louvain(g: &Csng, config: &LouvainConfig) -> Result<Partition> {
    louvain_traced(g, config).map(|(p, _)| p)
}

/// Runs Louvain and also reports the modularity after every round of the
/// run that was kept.
///
/// A graph without edges yields the singleton partition with modularity 0.
pub fn louvain_traced(g: &Csng, config: &LouvainConfig) -> Result<(Partition, LouvainTrace)> {
    config.validate()?;
    let owned;
    let g = if g.is_directed() {
        owned = symmetrize(g);
        &owned
    } else {
        g
    };
    let n = g.n_nodes();
    let gamma = config.resolution;
    let base = Work::from_csng(g);
    if base.two_w() <= 0.0 {
        let singletons: Vec<usize> = (0..n).collect();
        let part = Partition::from_labels(g.level(), &singletons, 0.0);
        return Ok((part, LouvainTrace::default()));
    }

    let runs: Vec<Run> = (0..config.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(config.seed, r));
            multilevel(&base, (0..n).collect(), config, &mut rng)
        })
        .collect();
    let mut best = runs
        .into_iter()
        .reduce(|a, b| if b.q > a.q { b } else { a })
        .expect("at least one restart");

    let mut rng = ChaCha8Rng::seed_from_u64(mix(config.seed, u64::MAX));
    for _ in 0..config.perturbations {
        let start = perturb(&base, &best.comm, &mut rng);
        let run = multilevel(&base, start, config, &mut rng);
        if run.q > best.q + 1e-12 * best.q.abs().max(1.0) {
            best.trace.modularity.push(run.q);
            best.trace.moves.push(run.trace.moves.iter().sum());
            best.comm = run.comm;
            best.q = run.q;
        }
    }

    let (assignment, _) = super::densify(&best.comm);
    let q = modularity(g, &assignment, gamma)?;
    Ok((Partition::from_labels(g.level(), &assignment, q), best.trace))
}

struct Run {
    comm: Vec<usize>,
    q: f64,
    trace: LouvainTrace,
}

fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Kicks `comm` out of its local optimum: either moves random nodes into a
/// neighboring community, splits one community in two at random, or merges
/// two adjacent communities.
fn perturb(work: &Work, comm: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = work.len();
    let n_comm = comm.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = comm.to_vec();
    match rng.random_range(0..3) {
        0 => {
            for (i, o) in out.iter_mut().enumerate().take(n) {
                let deg = work.offsets[i + 1] - work.offsets[i];
                if deg > 0 && rng.random_bool(0.2) {
                    let e = work.offsets[i] + rng.random_range(0..deg);
                    *o = comm[work.targets[e]];
                }
            }
        }
        1 => {
            let c = comm[rng.random_range(0..n)];
            for (i, &ci) in comm.iter().enumerate() {
                if ci == c && rng.random_bool(0.5) {
                    out[i] = n_comm;
                }
            }
        }
        _ => {
            let i = rng.random_range(0..n);
            let deg = work.offsets[i + 1] - work.offsets[i];
            if deg > 0 {
                let (a, b) = (comm[i], comm[work.targets[work.offsets[i] + rng.random_range(0..deg)]]);
                for c in out.iter_mut() {
                    if *c == b {
                        *c = a;
                    }
                }
            }
        }
    }
    super::densify(&out).0
}

/// One move-and-coarsen run starting from `init` on the finest level,
/// followed by refinement.
fn multilevel(base: &Work, init: Vec<usize>, config: &LouvainConfig, rng: &mut ChaCha8Rng) -> Run {
    let gamma = config.resolution;
    let n = base.len();
    let mut trace = LouvainTrace {
        modularity: vec![base.modularity(&(0..n).collect::<Vec<_>>(), gamma)],
        moves: Vec::new(),
    };
    // Level 0 is `base`, level l > 0 is coarse[l - 1]; maps[l] sends the
    // nodes of level l to the nodes of level l + 1.
    let mut coarse: Vec<Work> = Vec::new();
    let mut maps: Vec<Vec<usize>> = Vec::new();
    let mut init = Some(init);
    for _ in 0..config.max_passes {
        let work = if maps.is_empty() { base } else { &coarse[maps.len() - 1] };
        let start = init.take().unwrap_or_else(|| (0..work.len()).collect());
        let seeded = start.iter().enumerate().any(|(i, &c)| i != c);
        let (comm, moves) = move_nodes(work, gamma, start, rng);
        if moves == 0 && !seeded {
            break;
        }
        let (comm, n_comm) = super::densify(&comm);
        let q = work.modularity(&comm, gamma);
        let prev = *trace.modularity.last().unwrap();
        trace.modularity.push(q);
        trace.moves.push(moves);
        let done = q - prev < config.min_gain || n_comm == 1 || n_comm == work.len();
        let next = (!done).then(|| work.coarsen(&comm, n_comm));
        maps.push(comm);
        match next {
            Some(w) => coarse.push(w),
            None => break,
        }
    }
    if maps.is_empty() {
        let comm: Vec<usize> = (0..n).collect();
        let q = base.modularity(&comm, gamma);
        return Run { comm, q, trace };
    }
    let levels: Vec<&Work> = std::iter::once(base).chain(&coarse).take(maps.len()).collect();
    let comm = refine(&levels, &maps, gamma, rng);
    let q = base.modularity(&comm, gamma);
    if q > *trace.modularity.last().unwrap() {
        trace.modularity.push(q);
        trace.moves.push(1);
    }
    Run { comm, q, trace }
}

/// Projects the coarsest partition back down one level at a time and lets
/// single nodes move again at every level.
fn refine(levels: &[&Work], maps: &[Vec<usize>], gamma: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let top = levels.len() - 1;
    let mut comm = maps[top].clone();
    for l in (0..=top).rev() {
        if l < top {
            comm = maps[l].iter().map(|&c| comm[c]).collect();
        }
        comm = move_nodes(levels[l], gamma, comm, rng).0;
    }
    super::densify(&comm).0
}

/// Local moving phase starting from `comm`. Returns the community of every
/// node and the number of moves made.
fn move_nodes(
    work: &Work,
    gamma: f64,
    mut comm: Vec<usize>,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, usize) {
    let n = work.len();
    let two_w = work.two_w();
    let mut tot = vec![0.0; n];
    for (i, &c) in comm.iter().enumerate() {
        tot[c] += work.degree[i];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut acc = vec![0.0; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut total_moves = 0;
    loop {
        let mut moves = 0;
        for &i in &order {
            let own = comm[i];
            let ki = work.degree[i];
            for e in work.offsets[i]..work.offsets[i + 1] {
                let d = comm[work.targets[e]];
                if !seen[d] {
                    seen[d] = true;
                    touched.push(d);
                }
                acc[d] += work.weights[e];
            }
            tot[own] -= ki;
            let gain = |d: usize, k_in: f64| k_in - gamma * tot[d] * ki / two_w;
            let own_gain = gain(own, acc[own]);
            let mut best = own;
            let mut best_gain = own_gain;
            for &d in &touched {
                let gd = gain(d, acc[d]);
                if gd > best_gain || (gd == best_gain && d < best) {
                    best = d;
                    best_gain = gd;
                }
            }
            let tol = 1e-12 * (1.0 + ki);
            if best != own && best_gain - own_gain > tol {
                comm[i] = best;
                moves += 1;
            } else {
                best = own;
            }
            tot[best] += ki;
            for &d in &touched {
                acc[d] = 0.0;
                seen[d] = false;
            }
            touched.clear();
        }
        total_moves += moves;
        if moves == 0 {
            break;
        }
    }
    (comm, total_moves)
}
