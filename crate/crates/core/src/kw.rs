//! Search trees from tree-like refutations, and the randomized game that
//! solves the induced search problem over a variable partition.
//!
//! An unsatisfiable system has, for every 0/1 assignment alpha, at least one
//! falsified axiom; the search problem is to name one. A verified tree-like
//! refutation yields a decision tree for it: internal nodes query derived
//! inequalities ("does alpha satisfy this line?"), leaves name axioms. The
//! construction walks the derivation tree keeping the invariant that the
//! current root line is falsified by alpha:
//!
//! * query a best-balancing proper descendant v of the current root;
//! * alpha falsifies v — recurse into v's derivation subtree (root v);
//! * alpha satisfies v — drop v's subtree and keep the same root, since a
//!   missing premise that was queried-and-satisfied can never be the culprit.
//!
//! When a single line remains it is falsified: an axiom line names the answer.
//! A derived line with every premise dropped cannot occur on any consistent
//! path (sound rules would force it satisfied), so that branch is dead; it is
//! closed with a fallback axiom leaf to keep the tree total. Balanced picks
//! shrink the live piece by a constant factor per query, so the depth is
//! logarithmic in the derivation size.
//!
//! `kw_play` runs the tree interactively when alpha is split between two
//! parties: each internal query is decided by one `threshold_protocol` run at
//! per-node error epsilon_total/depth, the branch outcome is broadcast (one
//! bit each way), and the reached leaf is the output.

use std::collections::{BTreeSet, HashMap};

use crate::coins::CoinSource;
use crate::cp::{
    verify_proof, LinearInequality, ParseError, Proof, Rule, System, VerifyOptions, Violation,
};
use crate::error::ProtocolError;
use crate::threshold::{threshold_protocol, threshold_walk_bound, Partition, ThresholdFunction};
use crate::transcript::{Party, ProtocolResult, Transcript};

/// A node of a search tree; children are arena indices into the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeNode {
    /// Query `query`; descend to `falsified` if alpha falsifies it, else to
    /// `satisfied`.
    Internal { query: LinearInequality, falsified: usize, satisfied: usize },
    /// Answer: alpha falsifies this axiom (1-based axiom index).
    Leaf { axiom: usize },
}

/// A decision tree for the falsified-axiom search problem over n variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchTree {
    n: usize,
    nodes: Vec<TreeNode>,
    root: usize,
}

impl SearchTree {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Internal { .. })).count()
    }

    /// Number of queries on the longest root-to-leaf path (leaves have
    /// depth 0).
    pub fn depth(&self) -> usize {
        self.depth_below(self.root)
    }

    fn depth_below(&self, id: usize) -> usize {
        match &self.nodes[id] {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { falsified, satisfied, .. } => {
                1 + self.depth_below(*falsified).max(self.depth_below(*satisfied))
            }
        }
    }
}

/// Number of proof lines reachable from the final line (the derivation size S
/// the search-tree depth is measured against; unused lines do not count).
pub fn derivation_size(proof: &Proof) -> usize {
    if proof.is_empty() {
        return 0;
    }
    let by_id: HashMap<usize, &Rule> =
        proof.lines.iter().map(|line| (line.id, &line.rule)).collect();
    let mut seen = BTreeSet::new();
    let mut stack = vec![proof.lines.last().expect("non-empty").id];
    while let Some(id) = stack.pop() {
        if seen.insert(id) {
            if let Some(rule) = by_id.get(&id) {
                stack.extend(rule.premises());
            }
        }
    }
    seen.len()
}

struct Builder<'a> {
    rules: HashMap<usize, &'a Rule>,
    stated: HashMap<usize, &'a LinearInequality>,
    fallback_axiom: usize,
    nodes: Vec<TreeNode>,
}

impl Builder<'_> {
    fn alloc(&mut self, node: TreeNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Live nodes of the derivation subtree of `id`, restricted to `live`.
    fn live_subtree(&self, id: usize, live: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            if live.contains(&cur) && out.insert(cur) {
                stack.extend(self.rules[&cur].premises());
            }
        }
        out
    }

    fn build(&mut self, root: usize, live: &BTreeSet<usize>) -> usize {
        if live.len() == 1 {
            return match self.rules[&root] {
                Rule::Axiom(j) => self.alloc(TreeNode::Leaf { axiom: *j }),
                // Every premise of this derived line was queried and found
                // satisfied on the way here, which (rules being sound) forces
                // the line itself satisfied — but the invariant says it is
                // falsified. No alpha reaches this branch; close it off.
                _ => self.alloc(TreeNode::Leaf { axiom: self.fallback_axiom }),
            };
        }
        // Best-balancing proper descendant: minimizing |2s - S| minimizes the
        // larger of the two branch sizes (s, S - s). Ties go to the smallest
        // line id, keeping the construction deterministic.
        let total = live.len();
        let (centroid, centroid_subtree) = live
            .iter()
            .filter(|&&id| id != root)
            .map(|&id| (id, self.live_subtree(id, live)))
            .min_by_key(|(id, sub)| ((2 * sub.len()).abs_diff(total), *id))
            .expect("live set of size >= 2 has a proper descendant");
        let remainder: BTreeSet<usize> = live.difference(&centroid_subtree).copied().collect();
        debug_assert!(!centroid_subtree.is_empty() && !remainder.is_empty());

        let query = self.stated[&centroid].clone();
        let falsified = self.build(centroid, &centroid_subtree);
        let satisfied = self.build(root, &remainder);
        self.alloc(TreeNode::Internal { query, falsified, satisfied })
    }
}

/// Builds the search tree of a refutation. The proof is verified first
/// (tree-likeness is required regardless of `opts`, since the construction
/// walks the derivation tree).
pub fn build_search_tree(
    proof: &Proof,
    system: &System,
    opts: &VerifyOptions,
) -> Result<SearchTree, Violation> {
    let opts = VerifyOptions { require_tree: true, ..*opts };
    verify_proof(proof, system, &opts)?;

    let fallback_axiom = proof
        .lines
        .iter()
        .find_map(|line| match line.rule {
            Rule::Axiom(j) => Some(j),
            _ => None,
        })
        .expect("a verified proof derives its first line from an axiom");

    let mut builder = Builder {
        rules: proof.lines.iter().map(|l| (l.id, &l.rule)).collect(),
        stated: proof.lines.iter().map(|l| (l.id, &l.stated)).collect(),
        fallback_axiom,
        nodes: Vec::new(),
    };
    let final_id = proof.lines.last().expect("verified proof is non-empty").id;
    let all_ids: BTreeSet<usize> = builder.rules.keys().copied().collect();
    let live = builder.live_subtree(final_id, &all_ids);
    let root = builder.build(final_id, &live);
    Ok(SearchTree { n: system.n(), nodes: builder.nodes, root })
}

/// Runs the tree on a full assignment and returns the axiom index at the
/// reached leaf.
pub fn eval_search_tree(tree: &SearchTree, alpha: &[u8]) -> Result<usize, ProtocolError> {
    if alpha.len() != tree.n {
        return Err(ProtocolError::LengthMismatch { left: tree.n, right: alpha.len() });
    }
    if alpha.iter().any(|&v| v > 1) {
        return Err(ProtocolError::InvalidParams("assignment values must be 0/1".into()));
    }
    let mut cur = tree.root;
    loop {
        match &tree.nodes[cur] {
            TreeNode::Leaf { axiom } => return Ok(*axiom),
            TreeNode::Internal { query, falsified, satisfied } => {
                cur = if query.satisfied_by(alpha) { *satisfied } else { *falsified };
            }
        }
    }
}

/// Serializes a search tree to its line format:
///
/// ```text
/// tree <n> <node_count> <root_id>
/// internal <id> <falsified_child> <satisfied_child> <a_1> .. <a_n> <c>
/// leaf <id> <axiom>
/// ```
pub fn serialize_search_tree(tree: &SearchTree) -> String {
    let mut out = format!("tree {} {} {}\n", tree.n, tree.nodes.len(), tree.root);
    for (id, node) in tree.nodes.iter().enumerate() {
        match node {
            TreeNode::Internal { query, falsified, satisfied } => {
                out.push_str(&format!(
                    "internal {id} {falsified} {satisfied} {}\n",
                    query.to_tokens()
                ));
            }
            TreeNode::Leaf { axiom } => {
                out.push_str(&format!("leaf {id} {axiom}\n"));
            }
        }
    }
    out
}

/// Parses the line format produced by [`serialize_search_tree`], checking that
/// the nodes form a proper tree: every id defined exactly once, children in
/// range, and every node reachable from the root exactly once.
pub fn parse_search_tree(text: &str) -> Result<SearchTree, ParseError> {
    let fail = |line: usize, message: String| ParseError { line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, raw)| (idx + 1, raw.split('#').next().unwrap_or("").trim()))
        .filter(|(_, content)| !content.is_empty());

    let (head_no, head) = lines
        .next()
        .ok_or_else(|| fail(1, "missing tree header".into()))?;
    let toks: Vec<&str> = head.split_whitespace().collect();
    let header: Option<(usize, usize, usize)> = match toks.as_slice() {
        ["tree", n, count, root] => {
            match (n.parse(), count.parse(), root.parse()) {
                (Ok(n), Ok(count), Ok(root)) => Some((n, count, root)),
                _ => None,
            }
        }
        _ => None,
    };
    let (n, count, root) = header
        .ok_or_else(|| fail(head_no, "header must read: tree <n> <node_count> <root_id>".into()))?;
    if n == 0 || count == 0 {
        return Err(fail(head_no, "tree must have n >= 1 and at least one node".into()));
    }
    if root >= count {
        return Err(fail(head_no, format!("root id {root} out of range 0..{count}")));
    }

    let mut nodes: Vec<Option<TreeNode>> = vec![None; count];
    for (line_no, content) in lines {
        let toks: Vec<&str> = content.split_whitespace().collect();
        let parse_id = |tok: &str| -> Result<usize, ParseError> {
            tok.parse::<usize>()
                .ok()
                .filter(|&id| id < count)
                .ok_or_else(|| fail(line_no, format!("node id {tok:?} out of range 0..{count}")))
        };
        let (id, node) = match toks.as_slice() {
            ["leaf", id, axiom] => {
                let axiom = axiom.parse::<usize>().ok().filter(|&a| a >= 1).ok_or_else(|| {
                    fail(line_no, format!("invalid axiom index {axiom:?}"))
                })?;
                (parse_id(id)?, TreeNode::Leaf { axiom })
            }
            ["internal", id, falsified, satisfied, ints @ ..] => {
                if ints.len() != n + 1 {
                    return Err(fail(
                        line_no,
                        format!("internal node needs {} integers, found {}", n + 1, ints.len()),
                    ));
                }
                let mut vals = Vec::with_capacity(n + 1);
                for tok in ints {
                    vals.push(tok.parse().map_err(|_| {
                        fail(line_no, format!("expected integer token, got {tok:?}"))
                    })?);
                }
                let bound = vals.pop().expect("n+1 >= 2 tokens");
                (
                    parse_id(id)?,
                    TreeNode::Internal {
                        query: LinearInequality::new(vals, bound),
                        falsified: parse_id(falsified)?,
                        satisfied: parse_id(satisfied)?,
                    },
                )
            }
            _ => return Err(fail(line_no, "expected an internal or leaf line".into())),
        };
        if nodes[id].is_some() {
            return Err(fail(line_no, format!("node id {id} defined twice")));
        }
        nodes[id] = Some(node);
    }

    let nodes: Vec<TreeNode> = nodes
        .into_iter()
        .enumerate()
        .map(|(id, node)| node.ok_or_else(|| fail(head_no, format!("node id {id} never defined"))))
        .collect::<Result<_, _>>()?;

    // Tree check: DFS from the root must visit every node exactly once.
    let mut seen = vec![false; count];
    let mut stack = vec![root];
    let mut visited = 0usize;
    while let Some(id) = stack.pop() {
        if seen[id] {
            return Err(fail(head_no, format!("node id {id} has two parents — not a tree")));
        }
        seen[id] = true;
        visited += 1;
        if let TreeNode::Internal { falsified, satisfied, .. } = &nodes[id] {
            stack.push(*falsified);
            stack.push(*satisfied);
        }
    }
    if visited != count {
        return Err(fail(head_no, "some nodes are unreachable from the root".into()));
    }
    Ok(SearchTree { n, nodes, root })
}

/// Plays the search game on a split assignment: Alice holds the part_A bits,
/// Bob the part_B bits, and both learn a falsified-axiom index. Each internal
/// query runs `threshold_protocol` at error epsilon_total/depth and the branch
/// outcome costs 2 broadcast bits, so the wrong leaf is reached with
/// probability at most epsilon_total (union bound over the path).
pub fn kw_play(
    tree: &SearchTree,
    part: &Partition,
    alpha_a: &[u8],
    alpha_b: &[u8],
    epsilon_total: f64,
    coins: &mut impl CoinSource,
) -> Result<ProtocolResult<usize>, ProtocolError> {
    if part.n() != tree.n {
        return Err(ProtocolError::ProjectionMismatch(format!(
            "partition is over {} variables, tree over {}",
            part.n(),
            tree.n
        )));
    }
    if !(epsilon_total > 0.0 && epsilon_total < 1.0) {
        return Err(ProtocolError::InvalidParams(format!(
            "epsilon_total must lie in (0, 1), got {epsilon_total}"
        )));
    }
    let depth = tree.depth();
    let mut transcript = Transcript::new();
    if depth == 0 {
        // The tree is a single leaf: the answer is fixed, nothing to say.
        let TreeNode::Leaf { axiom } = &tree.nodes[tree.root] else { unreachable!() };
        return Ok(ProtocolResult { output: *axiom, transcript });
    }
    let eps_node = epsilon_total / depth as f64;
    let mut cur = tree.root;
    loop {
        match &tree.nodes[cur] {
            TreeNode::Leaf { axiom } => return Ok(ProtocolResult { output: *axiom, transcript }),
            TreeNode::Internal { query, falsified, satisfied } => {
                let f = ThresholdFunction::new(query.coeffs.clone(), query.bound.clone())?;
                let r = threshold_protocol(&f, part, alpha_a, alpha_b, eps_node, coins)?;
                transcript.absorb(r.transcript);
                // both parties announce which branch they take
                transcript.charge(Party::Alice, 1);
                transcript.charge(Party::Bob, 1);
                cur = if r.output { *satisfied } else { *falsified };
            }
        }
    }
}

/// Hard transcript bound for `kw_play`: depth * (max per-node walk bound + 2).
pub fn kw_bound(tree: &SearchTree, epsilon_total: f64) -> Result<u64, ProtocolError> {
    let depth = tree.depth();
    if depth == 0 {
        return Ok(0);
    }
    let eps_node = epsilon_total / depth as f64;
    let mut per_node = 0u64;
    for node in &tree.nodes {
        if let TreeNode::Internal { query, .. } = node {
            let f = ThresholdFunction::new(query.coeffs.clone(), query.bound.clone())?;
            per_node = per_node.max(threshold_walk_bound(&f, eps_node)?);
        }
    }
    Ok(depth as u64 * (per_node + 2))
}
