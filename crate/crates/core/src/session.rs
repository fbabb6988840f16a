//! Interactive exploration state: a community tree over segments refined by
//! split, merge and collapse commands, with a replayable command log.

use std::collections::{btree_map, BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::amcs::{build_amcs, Amcs, AmcsOrdering};
use crate::community::{louvain, LouvainConfig, Partition};
use crate::csng::{aggregate_to_streamlines, build_csng, symmetrize, Csng, CsngConfig};
use crate::metrics::{community_stats, segment_labels, weighted_jaccard, CommunityStats};
use crate::neighbor::NeighborQueryConfig;
use crate::streamline::StreamlineSet;
use crate::{Error, Level, Result};

pub type NodeId = u64;

/// How a split re-detects communities inside one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub level: Level,
    pub louvain: LouvainConfig,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            level: Level::Segment,
            louvain: LouvainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    #[serde(flatten)]
    pub neighbor: NeighborQueryConfig,
    #[serde(default = "default_subcurve_len")]
    pub subcurve_len: usize,
    /// Level of the initial detection.
    #[serde(default = "default_level")]
    pub level: Level,
    /// At streamline level, detect on the relationship-strength aggregation
    /// of the segment graph instead of a streamline-level graph.
    #[serde(default)]
    pub aggregate: bool,
    #[serde(default)]
    pub louvain: LouvainConfig,
    #[serde(default)]
    pub split: SplitConfig,
}

fn default_subcurve_len() -> usize {
    8
}

fn default_level() -> Level {
    Level::Streamline
}

impl SessionConfig {
    pub fn new(neighbor: NeighborQueryConfig, level: Level) -> Self {
        Self {
            neighbor,
            subcurve_len: default_subcurve_len(),
            level,
            aggregate: false,
            louvain: LouvainConfig::default(),
            split: SplitConfig::default(),
        }
    }

    pub fn csng_config(&self) -> CsngConfig {
        CsngConfig {
            neighbor: self.neighbor,
            subcurve_len: self.subcurve_len,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.neighbor.validate()?;
        self.louvain.validate()?;
        self.split.louvain.validate()?;
        if self.subcurve_len == 0 {
            return Err(Error::InvalidConfig("subcurve_len must be at least 1".into()));
        }
        if self.aggregate && self.level != Level::Streamline {
            return Err(Error::InvalidConfig("aggregation applies to streamline level only".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Detected,
    SplitChild,
    Merged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityNode {
    pub node_id: NodeId,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Sorted segment ids.
    pub members: Vec<usize>,
    pub origin: Origin,
    pub expanded: bool,
}

impl CommunityNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "snake_case")]
pub enum Command {
    Split {
        node: NodeId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        config: Option<SplitConfig>,
    },
    Merge {
        nodes: Vec<NodeId>,
    },
    Collapse {
        node: NodeId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum CommandOutcome {
    Split { children: Vec<NodeId> },
    /// The split found a single community; nothing changed.
    SplitNoop,
    Merged { node: NodeId },
    Collapsed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryNode {
    pub node_id: NodeId,
    pub size: usize,
    pub parent: Option<NodeId>,
    /// The node is a child of an expanded split node.
    pub grouped: bool,
    pub stats: CommunityStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEdge {
    pub a: NodeId,
    pub b: NodeId,
    pub cross_edge_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityGraphSummary {
    pub nodes: Vec<SummaryNode>,
    pub edges: Vec<SummaryEdge>,
}

/// Serializable configuration plus command log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub config: SessionConfig,
    pub history: Vec<Command>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionMetrics {
    /// Weighted Jaccard of the leaves against segment labels inherited from
    /// their streamlines.
    pub segment_weighted_jaccard: f64,
    /// Weighted Jaccard at streamline level; present when every streamline
    /// lies inside one leaf.
    pub streamline_weighted_jaccard: Option<f64>,
    pub n_leaves: usize,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    dataset: Arc<StreamlineSet>,
    config: SessionConfig,
    csngs: BTreeMap<Level, Arc<Csng>>,
    root_partition: Partition,
    nodes: BTreeMap<NodeId, CommunityNode>,
    roots: Vec<NodeId>,
    next_id: NodeId,
    history: Vec<Command>,
}

/// Source of CSNGs, so callers can share graphs between sessions.
pub type GraphSource<'a> = dyn FnMut(Level, &CsngConfig) -> Result<Arc<Csng>> + 'a;

impl Session {
    /// Builds the graphs, runs the initial detection and creates one root
    /// leaf per community.
    pub fn create(id: impl Into<String>, dataset: Arc<StreamlineSet>, config: SessionConfig) -> Result<Self> {
        let set = Arc::clone(&dataset);
        Self::create_with(id, dataset, config, &mut |level, cfg| {
            build_csng(&set, level, cfg).map(Arc::new)
        })
    }

    pub fn create_with(
        id: impl Into<String>,
        dataset: Arc<StreamlineSet>,
        config: SessionConfig,
        source: &mut GraphSource<'_>,
    ) -> Result<Self> {
        config.validate()?;
        let cfg = config.csng_config();
        let mut csngs = BTreeMap::new();
        csngs.insert(Level::Segment, source(Level::Segment, &cfg)?);
        let partition = if config.aggregate {
            let rel = aggregate_to_streamlines(&csngs[&Level::Segment], &dataset)?;
            louvain(&rel.graph, &config.louvain)?
        } else {
            if let btree_map::Entry::Vacant(e) = csngs.entry(config.level) {
                e.insert(source(config.level, &cfg)?);
            }
            louvain(&symmetrize(&csngs[&config.level]), &config.louvain)?
        };
        if config.split.level != Level::Segment && !csngs.contains_key(&config.split.level) {
            csngs.insert(config.split.level, source(config.split.level, &cfg)?);
        }

        let owners = dataset.segment_owners(partition.level, config.subcurve_len);
        let mut members = vec![Vec::new(); partition.n_communities];
        for (seg, &owner) in owners.iter().enumerate() {
            members[partition.assignment[owner]].push(seg);
        }
        let mut nodes = BTreeMap::new();
        let mut roots = Vec::new();
        for (c, m) in members.into_iter().enumerate() {
            let node_id = c as NodeId;
            nodes.insert(
                node_id,
                CommunityNode {
                    node_id,
                    parent: None,
                    children: Vec::new(),
                    members: m,
                    origin: Origin::Detected,
                    expanded: false,
                },
            );
            roots.push(node_id);
        }
        Ok(Self {
            id: id.into(),
            dataset,
            config,
            csngs,
            next_id: roots.len() as NodeId,
            root_partition: partition,
            nodes,
            roots,
            history: Vec::new(),
        })
    }

    /// Recreates a session from a transcript by replaying its commands.
    pub fn replay(id: impl Into<String>, dataset: Arc<StreamlineSet>, transcript: &SessionTranscript) -> Result<Self> {
        let mut s = Self::create(id, dataset, transcript.config.clone())?;
        for cmd in &transcript.history {
            s.apply(cmd.clone())?;
        }
        Ok(s)
    }

    pub fn transcript(&self) -> SessionTranscript {
        SessionTranscript {
            config: self.config.clone(),
            history: self.history.clone(),
        }
    }

    pub fn export_json(&self) -> String {
        serde_json::to_string_pretty(&self.transcript()).expect("transcript serializes")
    }

    pub fn import_json(id: impl Into<String>, dataset: Arc<StreamlineSet>, json: &str) -> Result<Self> {
        let t: SessionTranscript =
            serde_json::from_str(json).map_err(|e| Error::MalformedInput(format!("session transcript: {e}")))?;
        Self::replay(id, dataset, &t)
    }

    pub fn dataset(&self) -> &Arc<StreamlineSet> {
        &self.dataset
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn root_partition(&self) -> &Partition {
        &self.root_partition
    }

    pub fn history(&self) -> &[Command] {
        &self.history
    }

    pub fn csng(&self, level: Level) -> Option<&Arc<Csng>> {
        self.csngs.get(&level)
    }

    pub fn node(&self, id: NodeId) -> Result<&CommunityNode> {
        self.nodes.get(&id).ok_or(Error::InvalidNode(id))
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    /// All live nodes keyed by id.
    pub fn nodes(&self) -> &BTreeMap<NodeId, CommunityNode> {
        &self.nodes
    }

    /// Leaves in tree order.
    pub fn leaves(&self) -> Vec<&CommunityNode> {
        let mut out = Vec::new();
        let mut stack: Vec<NodeId> = self.roots.iter().rev().copied().collect();
        while let Some(id) = stack.pop() {
            let n = &self.nodes[&id];
            if n.is_leaf() {
                out.push(n);
            } else {
                stack.extend(n.children.iter().rev());
            }
        }
        out
    }

    /// Leaf node id for every segment.
    pub fn element_colors(&self) -> Vec<NodeId> {
        let mut out = vec![0; self.dataset.segments().len()];
        for leaf in self.leaves() {
            for &s in &leaf.members {
                out[s] = leaf.node_id;
            }
        }
        out
    }

    /// Leaf communities as a segment-level partition, numbered in leaf order.
    pub fn leaf_partition(&self) -> Partition {
        let mut labels = vec![0; self.dataset.segments().len()];
        for (c, leaf) in self.leaves().iter().enumerate() {
            for &s in &leaf.members {
                labels[s] = c;
            }
        }
        let g = &self.csngs[&Level::Segment];
        let q = crate::community::modularity(g, &labels, self.config.louvain.resolution).unwrap_or(0.0);
        Partition::from_labels(Level::Segment, &labels, q)
    }

    pub fn apply(&mut self, cmd: Command) -> Result<CommandOutcome> {
        let outcome = match &cmd {
            Command::Split { node, config } => {
                let cfg = config.clone().unwrap_or_else(|| self.config.split.clone());
                self.split(*node, &cfg)?
            }
            Command::Merge { nodes } => self.merge(nodes)?,
            Command::Collapse { node } => self.collapse(*node)?,
        };
        self.history.push(cmd);
        Ok(outcome)
    }

    fn split(&mut self, id: NodeId, cfg: &SplitConfig) -> Result<CommandOutcome> {
        cfg.louvain.validate()?;
        let node = self.node(id)?;
        if !node.is_leaf() {
            return Err(Error::NotALeaf(id));
        }
        if !self.csngs.contains_key(&cfg.level) {
            let g = build_csng(&self.dataset, cfg.level, &self.config.csng_config())?;
            self.csngs.insert(cfg.level, Arc::new(g));
        }
        let node = &self.nodes[&id];
        let owners = self.dataset.segment_owners(cfg.level, self.config.subcurve_len);
        let mut elements: Vec<usize> = node.members.iter().map(|&s| owners[s]).collect();
        elements.sort_unstable();
        elements.dedup();
        if elements.len() < 2 {
            return Ok(CommandOutcome::SplitNoop);
        }
        let sub = symmetrize(&self.csngs[&cfg.level].induced_subgraph(&elements));
        let part = louvain(&sub, &cfg.louvain)?;
        if part.n_communities < 2 {
            return Ok(CommandOutcome::SplitNoop);
        }
        let local: HashMap<usize, usize> = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut groups = vec![Vec::new(); part.n_communities];
        for &s in &node.members {
            groups[part.assignment[local[&owners[s]]]].push(s);
        }
        let mut children = Vec::with_capacity(groups.len());
        for members in groups {
            let child = self.next_id;
            self.next_id += 1;
            self.nodes.insert(
                child,
                CommunityNode {
                    node_id: child,
                    parent: Some(id),
                    children: Vec::new(),
                    members,
                    origin: Origin::SplitChild,
                    expanded: false,
                },
            );
            children.push(child);
        }
        let node = self.nodes.get_mut(&id).expect("checked above");
        node.children = children.clone();
        node.expanded = true;
        Ok(CommandOutcome::Split { children })
    }

    fn merge(&mut self, ids: &[NodeId]) -> Result<CommandOutcome> {
        let mut distinct = ids.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != ids.len() || ids.len() < 2 {
            return Err(Error::InvalidOperation("merge needs at least two distinct nodes".into()));
        }
        let mut parent = None;
        for (k, &id) in ids.iter().enumerate() {
            let n = self.node(id)?;
            if !n.is_leaf() {
                return Err(Error::NotALeaf(id));
            }
            if k == 0 {
                parent = n.parent;
            } else if n.parent != parent {
                return Err(Error::NotSiblings);
            }
        }
        let siblings = match parent {
            Some(p) => &self.nodes[&p].children,
            None => &self.roots,
        };
        if let Some(p) = parent {
            if siblings.len() == ids.len() {
                self.collapse(p)?;
                return Ok(CommandOutcome::Merged { node: p });
            }
        }
        let position = siblings
            .iter()
            .position(|s| ids.contains(s))
            .expect("merged nodes are siblings");
        let mut members: Vec<usize> = ids
            .iter()
            .flat_map(|id| self.nodes[id].members.iter().copied())
            .collect();
        members.sort_unstable();
        for id in ids {
            self.nodes.remove(id);
        }
        let new_id = self.next_id;
        self.next_id += 1;
        self.nodes.insert(
            new_id,
            CommunityNode {
                node_id: new_id,
                parent,
                children: Vec::new(),
                members,
                origin: Origin::Merged,
                expanded: false,
            },
        );
        let siblings = match parent {
            Some(p) => &mut self.nodes.get_mut(&p).expect("parent is live").children,
            None => &mut self.roots,
        };
        let mut rebuilt: Vec<NodeId> = Vec::with_capacity(siblings.len() + 1 - ids.len());
        for (k, &s) in siblings.iter().enumerate() {
            if k == position {
                rebuilt.push(new_id);
            }
            if !ids.contains(&s) {
                rebuilt.push(s);
            }
        }
        *siblings = rebuilt;
        Ok(CommandOutcome::Merged { node: new_id })
    }

    fn collapse(&mut self, id: NodeId) -> Result<CommandOutcome> {
        let node = self.node(id)?;
        if node.is_leaf() {
            return Err(Error::NotInternal(id));
        }
        let mut stack = node.children.clone();
        while let Some(c) = stack.pop() {
            if let Some(n) = self.nodes.remove(&c) {
                stack.extend(n.children);
            }
        }
        let node = self.nodes.get_mut(&id).expect("checked above");
        node.children.clear();
        node.expanded = false;
        Ok(CommandOutcome::Collapsed)
    }

    /// Leaves with their statistics and the number of segment-graph edges
    /// crossing between every pair of leaves.
    pub fn summary_graph(&self) -> CommunityGraphSummary {
        let leaves = self.leaves();
        let part = self.leaf_partition();
        let g = symmetrize(&self.csngs[&Level::Segment]);
        let stats = community_stats(&g, &part).expect("leaf partition matches the segment graph");
        let mut cross: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, j, _, _) in g.entries() {
            let (a, b) = (part.assignment[i], part.assignment[j]);
            if i < j && a != b {
                *cross.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let nodes = leaves
            .iter()
            .zip(stats)
            .map(|(leaf, stats)| SummaryNode {
                node_id: leaf.node_id,
                size: leaf.members.len(),
                parent: leaf.parent,
                grouped: leaf.parent.is_some_and(|p| self.nodes[&p].expanded),
                stats,
            })
            .collect();
        let edges = cross
            .into_iter()
            .map(|((a, b), n)| SummaryEdge {
                a: leaves[a].node_id,
                b: leaves[b].node_id,
                cross_edge_count: n,
            })
            .collect();
        CommunityGraphSummary { nodes, edges }
    }

    /// AMCS of one node's segments, or of the whole dataset.
    pub fn amcs(&self, node: Option<NodeId>, ordering: AmcsOrdering) -> Result<Amcs> {
        let g = &self.csngs[&Level::Segment];
        match node {
            Some(id) => build_amcs(g, &self.dataset, &self.node(id)?.members, ordering),
            None => {
                let all: Vec<usize> = (0..g.n_nodes()).collect();
                build_amcs(g, &self.dataset, &all, ordering)
            }
        }
    }

    /// Agreement of the current leaves with per-streamline labels.
    pub fn metrics(&self, streamline_labels: &[i64]) -> Result<SessionMetrics> {
        let seg_truth = segment_labels(&self.dataset, streamline_labels)?;
        let colors = self.element_colors();
        let segment_weighted_jaccard = weighted_jaccard(&colors, &seg_truth)?;
        let mut per_line: Vec<Option<NodeId>> = vec![None; self.dataset.streamlines().len()];
        let mut whole = true;
        for (seg, &c) in self.dataset.segments().iter().zip(&colors) {
            match per_line[seg.streamline_id] {
                None => per_line[seg.streamline_id] = Some(c),
                Some(prev) if prev != c => whole = false,
                _ => {}
            }
        }
        let streamline_weighted_jaccard = if whole {
            let pred: Vec<NodeId> = per_line.iter().map(|c| c.unwrap_or(NodeId::MAX)).collect();
            Some(weighted_jaccard(&pred, streamline_labels)?)
        } else {
            None
        };
        Ok(SessionMetrics {
            segment_weighted_jaccard,
            streamline_weighted_jaccard,
            n_leaves: self.leaves().len(),
        })
    }
}

/// Stable display color for a community node.
pub fn node_color(id: NodeId) -> [u8; 3] {
    let mut z = id.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    let hue = (z % 360) as f64;
    let (s, v) = (0.65, 0.9);
    let c = v * s;
    let x = c * (1.0 - ((hue / 60.0) % 2.0 - 1.0).abs());
    let (r, g, b) = match (hue / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [r, g, b].map(|ch| ((ch + m) * 255.0).round() as u8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighbor::ProximityMeasure;
    use crate::synth::{bundles, BundleParams};

    fn two_bundles() -> Arc<StreamlineSet> {
        Arc::new(bundles(&BundleParams::default()).unwrap())
    }

    fn session() -> Session {
        let cfg = SessionConfig::new(NeighborQueryConfig::knn(3, ProximityMeasure::Longest), Level::Streamline);
        Session::create("s", two_bundles(), cfg).unwrap()
    }

    fn leaf_sets(s: &Session) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = s.leaves().iter().map(|l| l.members.clone()).collect();
        v.sort();
        v
    }

    #[test]
    fn two_bundles_give_two_leaves() {
        let s = session();
        assert_eq!(s.leaves().len(), 2);
        let m = s.metrics(s.dataset().labels().unwrap()).unwrap();
        assert_eq!(m.segment_weighted_jaccard, 1.0);
        assert_eq!(m.streamline_weighted_jaccard, Some(1.0));
        let summary = s.summary_graph();
        assert_eq!(summary.nodes.len(), 2);
        assert!(summary.edges.is_empty());
    }

    #[test]
    fn split_collapse_roundtrip() {
        let mut s = session();
        let before = s.nodes().clone();
        let out = s.apply(Command::Split { node: 0, config: None }).unwrap();
        let CommandOutcome::Split { children } = out else {
            panic!("expected a split, got {out:?}");
        };
        assert!(children.len() >= 2);
        let colors = s.element_colors();
        assert!(colors.iter().all(|c| *c != 0));
        s.apply(Command::Collapse { node: 0 }).unwrap();
        assert_eq!(s.nodes(), &before);
    }

    #[test]
    fn merge_rules() {
        let mut s = session();
        assert!(matches!(s.apply(Command::Collapse { node: 0 }), Err(Error::NotInternal(0))));
        let CommandOutcome::Split { children } = s.apply(Command::Split { node: 0, config: None }).unwrap() else {
            panic!()
        };
        assert!(matches!(
            s.apply(Command::Merge { nodes: vec![children[0], 1] }),
            Err(Error::NotSiblings)
        ));
        assert!(matches!(s.apply(Command::Merge { nodes: vec![0, 1] }), Err(Error::NotALeaf(0))));
        assert!(matches!(
            s.apply(Command::Split { node: 99, config: None }),
            Err(Error::InvalidNode(99))
        ));
        let union: Vec<usize> = {
            let mut u: Vec<usize> = children[..2]
                .iter()
                .flat_map(|c| s.node(*c).unwrap().members.clone())
                .collect();
            u.sort();
            u
        };
        let CommandOutcome::Merged { node } = s.apply(Command::Merge { nodes: children[..2].to_vec() }).unwrap() else {
            panic!()
        };
        if children.len() > 2 {
            assert_eq!(s.node(node).unwrap().members, union);
        } else {
            assert_eq!(node, 0);
            assert!(s.node(0).unwrap().is_leaf());
        }
    }

    #[test]
    fn merging_all_siblings_collapses() {
        let mut s = session();
        let before = leaf_sets(&s);
        let CommandOutcome::Split { children } = s.apply(Command::Split { node: 1, config: None }).unwrap() else {
            panic!()
        };
        s.apply(Command::Merge { nodes: children }).unwrap();
        assert_eq!(leaf_sets(&s), before);
        assert!(s.node(1).unwrap().is_leaf());
    }

    #[test]
    fn transcript_replays() {
        let mut s = session();
        s.apply(Command::Split { node: 0, config: None }).unwrap();
        let json = s.export_json();
        let r = Session::import_json("r", Arc::clone(s.dataset()), &json).unwrap();
        assert_eq!(leaf_sets(&r), leaf_sets(&s));
        assert_eq!(r.element_colors(), s.element_colors());
    }

    #[test]
    fn single_member_split_is_noop() {
        let set = Arc::new(
            StreamlineSet::from_polylines(
                vec![vec![crate::Point3::new(0.0, 0.0, 0.0), crate::Point3::new(1.0, 0.0, 0.0)]],
                None,
            )
            .unwrap()
            .0,
        );
        let cfg = SessionConfig::new(NeighborQueryConfig::knn(1, ProximityMeasure::Longest), Level::Segment);
        let mut s = Session::create("one", set, cfg).unwrap();
        assert_eq!(s.leaves().len(), 1);
        assert_eq!(s.apply(Command::Split { node: 0, config: None }).unwrap(), CommandOutcome::SplitNoop);
    }

    #[test]
    fn invalid_config_fails() {
        let cfg = SessionConfig::new(NeighborQueryConfig::knn(0, ProximityMeasure::Longest), Level::Segment);
        assert!(Session::create("x", two_bundles(), cfg).is_err());
    }

    #[test]
    fn command_json_shape() {
        let c: Command = serde_json::from_str(r#"{"op":"merge","args":{"nodes":[1,2]}}"#).unwrap();
        assert_eq!(c, Command::Merge { nodes: vec![1, 2] });
        let c: Command = serde_json::from_str(r#"{"op":"split","args":{"node":3}}"#).unwrap();
        assert_eq!(c, Command::Split { node: 3, config: None });
    }

    #[test]
    fn colors_are_stable() {
        assert_eq!(node_color(5), node_color(5));
        assert_ne!(node_color(5), node_color(6));
    }
}
