//! Random-walk GreaterThan on a binary-search tree with confidence chains.
//!
//! The walk tree is the binary-search tree over index intervals [lo, hi] of
//! [1, n]; each leaf [i, i] carries a descending chain of chain_len nodes. The
//! players take m steps; every step verifies the current node with cheap
//! one-sided EQ fingerprint tests (per_check_k rounds each, error
//! 2^(-per_check_k)) and moves down on success or back up on failure:
//!
//! * internal node [lo, hi]: verify prefix [1, lo-1] equal and interval
//!   [lo, hi] unequal; if consistent, one more EQ on the left half decides the
//!   direction ("unequal" -> left, "equal" -> right), else backtrack (the root
//!   stays put);
//! * leaf [i, i]: verify prefix [1, i-1] equal (backtrack on failure), then
//!   exchange x_i and y_i (2 bits, deterministic) — descend into the chain iff
//!   they differ;
//! * chain node below leaf i: verify prefix [1, i-1] equal; descend on
//!   "equal" (the bottom stays put), backtrack on "unequal".
//!
//! One-sidedness does the heavy lifting: on the true search path every
//! equality test passes with certainty, so each on-path step advances with
//! probability >= 1 - 2^(-per_check_k), the chain below the true first
//! difference absorbs the walk, and every off-path region pushes the walk back
//! up with the same probability. Off-path leaves are guarded twice — by the
//! prefix test and by the deterministic bit exchange — so wrong chains are
//! reachable only through repeated fingerprint collisions.
//!
//! After m steps the players output "greater" iff the walk ended deeper than
//! ceil(log2 n), i.e. inside a chain below some leaf i, and x_i = 1.

use crate::bits::BitString;
use crate::coins::CoinSource;
use crate::eq::eq_rounds;
use crate::error::ProtocolError;
use crate::transcript::{Party, ProtocolResult, Transcript};
use crate::util::{ceil_log2, ceil_log2_recip};

/// Tunable constants of the walk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkParams {
    /// Target error probability in (0, 1).
    pub epsilon: f64,
    /// Chain length below each leaf, default ceil(4*log2(1/epsilon)) + 4.
    pub chain_len: usize,
    /// Number of walk steps, default 8*(ceil(log2 n) + ceil(log2(1/epsilon))) + chain_len.
    pub m: usize,
    /// Fingerprint rounds per verification test, default 2 (per-test error 1/4).
    pub per_check_k: u32,
}

impl WalkParams {
    /// Default calibration for inputs of length n at error target epsilon.
    pub fn for_inputs(n: usize, epsilon: f64) -> Result<Self, ProtocolError> {
        if n == 0 {
            return Err(ProtocolError::InvalidParams("n must be >= 1".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ProtocolError::InvalidParams(format!(
                "epsilon must lie in (0,1), got {epsilon}"
            )));
        }
        let lg_eps = ceil_log2_recip(epsilon) as usize;
        let chain_len = 4 * lg_eps + 4;
        let m = 8 * (ceil_log2(n) as usize + lg_eps) + chain_len;
        let params = WalkParams { epsilon, chain_len, m, per_check_k: 2 };
        params.validate(n)?;
        Ok(params)
    }

    /// Checks the parameter invariants for inputs of length n.
    pub fn validate(&self, n: usize) -> Result<(), ProtocolError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(ProtocolError::InvalidParams(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        if self.chain_len == 0 {
            return Err(ProtocolError::InvalidParams("chain_len must be >= 1".into()));
        }
        if self.per_check_k == 0 {
            return Err(ProtocolError::InvalidParams("per_check_k must be >= 1".into()));
        }
        if self.m < ceil_log2(n) as usize + self.chain_len {
            return Err(ProtocolError::InvalidParams(format!(
                "m = {} cannot reach chain depth: need >= ceil(log2 {n}) + {}",
                self.m, self.chain_len
            )));
        }
        Ok(())
    }

    /// Worst-case per-step charge B = 3*per_check_k + 2.
    pub fn per_step_bound(&self) -> u32 {
        3 * self.per_check_k + 2
    }

    /// Hard transcript bound B*m + 2, never exceeded by any run.
    pub fn transcript_bound(&self) -> u64 {
        u64::from(self.per_step_bound()) * self.m as u64 + 2
    }
}

/// Hard transcript bound of `gt_walk` at the default calibration.
pub fn gt_walk_bound(n: usize, epsilon: f64) -> Result<u64, ProtocolError> {
    Ok(WalkParams::for_inputs(n, epsilon)?.transcript_bound())
}

/// A position in the walk tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkNode {
    /// Binary-search state: believed-equal prefix [1, lo-1], first difference
    /// believed to lie in [lo, hi], hi > lo.
    Search { lo: usize, hi: usize, parent: Option<usize>, left: usize, right: usize, depth: usize },
    /// Candidate index i (interval [i, i]).
    Leaf { i: usize, parent: Option<usize>, chain_head: usize, depth: usize },
    /// Chain position pos (1-based) below leaf i; next = None at the bottom.
    Chain { i: usize, pos: usize, parent: usize, next: Option<usize>, depth: usize },
}

impl WalkNode {
    pub fn depth(&self) -> usize {
        match self {
            WalkNode::Search { depth, .. }
            | WalkNode::Leaf { depth, .. }
            | WalkNode::Chain { depth, .. } => *depth,
        }
    }

    /// The interval [lo, hi] of a search node or leaf.
    pub fn interval(&self) -> Option<(usize, usize)> {
        match self {
            WalkNode::Search { lo, hi, .. } => Some((*lo, *hi)),
            WalkNode::Leaf { i, .. } => Some((*i, *i)),
            WalkNode::Chain { .. } => None,
        }
    }
}

/// The full search tree with chains, built once per (n, chain_len).
#[derive(Clone, Debug)]
pub struct WalkTree {
    n: usize,
    chain_len: usize,
    nodes: Vec<WalkNode>,
    root: usize,
    leaves: Vec<usize>, // leaves[i-1] = node id of leaf [i, i]
}

/// Builds the walk tree for n-bit inputs.
pub fn build_walk_tree(n: usize, params: &WalkParams) -> WalkTree {
    WalkTree::build(n, params.chain_len)
}

impl WalkTree {
    pub fn build(n: usize, chain_len: usize) -> WalkTree {
        assert!(n >= 1 && chain_len >= 1);
        let mut tree = WalkTree { n, chain_len, nodes: Vec::new(), root: 0, leaves: vec![0; n] };
        tree.root = tree.grow(1, n, 0, None);
        tree
    }

    fn grow(&mut self, lo: usize, hi: usize, depth: usize, parent: Option<usize>) -> usize {
        if lo == hi {
            let id = self.nodes.len();
            self.nodes.push(WalkNode::Leaf { i: lo, parent, chain_head: 0, depth });
            self.leaves[lo - 1] = id;
            let mut prev = id;
            for pos in 1..=self.chain_len {
                let cid = self.nodes.len();
                self.nodes.push(WalkNode::Chain {
                    i: lo,
                    pos,
                    parent: prev,
                    next: None,
                    depth: depth + pos,
                });
                if pos == 1 {
                    if let WalkNode::Leaf { chain_head, .. } = &mut self.nodes[id] {
                        *chain_head = cid;
                    }
                } else if let WalkNode::Chain { next, .. } = &mut self.nodes[prev] {
                    *next = Some(cid);
                }
                prev = cid;
            }
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(WalkNode::Search { lo, hi, parent, left: 0, right: 0, depth });
        let mid = (lo + hi) / 2;
        let left = self.grow(lo, mid, depth + 1, Some(id));
        let right = self.grow(mid + 1, hi, depth + 1, Some(id));
        if let WalkNode::Search { left: l, right: r, .. } = &mut self.nodes[id] {
            *l = left;
            *r = right;
        }
        id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn nodes(&self) -> &[WalkNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &WalkNode {
        &self.nodes[id]
    }

    /// Node id of the leaf [i, i].
    pub fn leaf(&self, i: usize) -> usize {
        assert!((1..=self.n).contains(&i));
        self.leaves[i - 1]
    }
}

/// Verifies the walk's belief at an internal node or leaf: prefix [1, lo-1]
/// equal (skipped when lo = 1) and interval [lo, hi] unequal, each by a
/// per_check_k-round EQ test. "Consistent" requires both expectations met.
///
/// On the correct search path only the interval test can err (one-sidedly), so
/// Pr[inconsistent] <= 2^(-per_check_k); off the path a wrong prefix or an
/// all-equal interval is caught with probability >= 1 - 2^(-per_check_k).
pub fn verify_node(
    tree: &WalkTree,
    node: usize,
    x: &BitString,
    y: &BitString,
    per_check_k: u32,
    coins: &mut impl CoinSource,
) -> ProtocolResult<bool> {
    let mut transcript = Transcript::new();
    let output = verify_node_inner(tree, node, x, y, per_check_k, coins, &mut transcript);
    ProtocolResult { output, transcript }
}

fn verify_node_inner(
    tree: &WalkTree,
    node: usize,
    x: &BitString,
    y: &BitString,
    per_check_k: u32,
    coins: &mut impl CoinSource,
    transcript: &mut Transcript,
) -> bool {
    let (lo, hi) = tree
        .node(node)
        .interval()
        .expect("verify_node requires an internal node or leaf");
    let prefix_equal =
        lo == 1 || eq_rounds(x, y, 1, lo - 1, per_check_k, coins, transcript);
    let interval_equal = eq_rounds(x, y, lo, hi, per_check_k, coins, transcript);
    prefix_equal && !interval_equal
}

/// Step-by-step state trace of one walk run (instrumentation for tests).
#[derive(Clone, Debug)]
pub struct WalkTrace {
    /// Node ids visited; states[0] is the root, length m + 1.
    pub states: Vec<usize>,
    pub tree: WalkTree,
}

/// Decides x > y (unsigned) with error at most params.epsilon (at the default
/// calibration). x = y yields false with probability 1: the leaf bit exchange
/// is deterministic, so the walk can never enter a chain.
pub fn gt_walk(
    x: &BitString,
    y: &BitString,
    params: &WalkParams,
    coins: &mut impl CoinSource,
) -> Result<ProtocolResult<bool>, ProtocolError> {
    gt_walk_traced(x, y, params, coins).map(|(result, _)| result)
}

/// As `gt_walk`, also returning the visited-state trace.
pub fn gt_walk_traced(
    x: &BitString,
    y: &BitString,
    params: &WalkParams,
    coins: &mut impl CoinSource,
) -> Result<(ProtocolResult<bool>, WalkTrace), ProtocolError> {
    if x.len() != y.len() {
        return Err(ProtocolError::LengthMismatch { left: x.len(), right: y.len() });
    }
    let n = x.len();
    params.validate(n)?;
    let k = params.per_check_k;
    let tree = WalkTree::build(n, params.chain_len);
    let mut transcript = Transcript::new();
    let mut states = Vec::with_capacity(params.m + 1);
    let mut cur = tree.root();
    states.push(cur);

    for _ in 0..params.m {
        cur = match *tree.node(cur) {
            WalkNode::Search { lo, hi, parent, left, right, .. } => {
                if verify_node_inner(&tree, cur, x, y, k, coins, &mut transcript) {
                    let mid = (lo + hi) / 2;
                    let left_equal = eq_rounds(x, y, lo, mid, k, coins, &mut transcript);
                    if left_equal {
                        right
                    } else {
                        left
                    }
                } else {
                    parent.unwrap_or(cur) // backtracking at the root stays put
                }
            }
            WalkNode::Leaf { i, parent, chain_head, .. } => {
                let prefix_equal =
                    i == 1 || eq_rounds(x, y, 1, i - 1, k, coins, &mut transcript);
                if !prefix_equal {
                    parent.unwrap_or(cur)
                } else {
                    transcript.charge(Party::Alice, 1);
                    transcript.charge(Party::Bob, 1);
                    if x.get(i) != y.get(i) {
                        chain_head
                    } else {
                        parent.unwrap_or(cur)
                    }
                }
            }
            WalkNode::Chain { i, parent, next, .. } => {
                let prefix_equal =
                    i == 1 || eq_rounds(x, y, 1, i - 1, k, coins, &mut transcript);
                if prefix_equal {
                    next.unwrap_or(cur) // the chain bottom stays put
                } else {
                    parent
                }
            }
        };
        states.push(cur);
    }

    let threshold = ceil_log2(n) as usize;
    let output = match *tree.node(cur) {
        WalkNode::Chain { i, depth, .. } if depth > threshold => x.get(i) == 1,
        _ => false,
    };
    transcript.charge(Party::Alice, 1);

    debug_assert!(transcript.total_bits() <= params.transcript_bound());
    Ok((ProtocolResult { output, transcript }, WalkTrace { states, tree }))
}
