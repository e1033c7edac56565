//! Multi-alphabet coding through a binary code tree.
//!
//! Direct count tables for an alphabet of size `alpha` are hopeless (their
//! size grows like `n^(alpha+1)`), but the multinomial class of a symbol
//! sequence factors exactly into binomials along any full binary tree with
//! one leaf per symbol: each internal node sees the subsequence routed
//! through it as a binary left/right string, and the product of the nodes'
//! binomial classes equals the multinomial. So the same quantized binomial
//! table encodes every node string. The tree is a Huffman tree over the
//! block's symbol counts with total-order tie-breaking, making it a pure
//! function of the counts — the decoder rebuilds it from the transmitted
//! counts and no tree description is ever serialized.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::codec::{decode_block, encode_block, BlockCode, CodecError};
use crate::qtable::QuantTable;

/// Largest supported alphabet.
pub const MAX_ALPHABET: usize = 256;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MultiAlphaError {
    #[error("alphabet of {0} symbols is degenerate (need at least 2)")]
    DegenerateAlphabet(usize),
    #[error("alphabet of {0} symbols exceeds the supported maximum {MAX_ALPHABET}")]
    AlphabetTooLarge(usize),
    #[error("symbol counts are all zero")]
    EmptyCounts,
    #[error("symbol {0} outside the alphabet")]
    SymbolOutOfRange(u16),
    #[error("symbol counts do not match the coded data")]
    CountMismatch,
    #[error(transparent)]
    Codec(#[from] CodecError),
}

enum Node {
    Leaf { symbol: usize },
    Internal { left: usize, right: usize },
}

/// Full binary tree with one leaf per alphabet symbol, deterministic in the
/// leaf counts alone.
pub struct CodeTree {
    alpha: usize,
    counts: Vec<u64>,
    nodes: Vec<Node>,
    node_counts: Vec<u64>,
    /// Internal nodes in pre-order (root first); coding emits one block per
    /// slot in this order.
    pre_order: Vec<usize>,
    /// Pre-order slot of each internal node.
    slot_of_node: Vec<usize>,
    /// Routing path per symbol: (pre-order slot, branch bit) from the root.
    paths: Vec<Vec<(usize, u8)>>,
    root: usize,
}

/// Builds the code tree for a block's symbol counts.
///
/// Tie-breaking is total: queue entries order by (count, merged-after-leaf,
/// creation id) ascending and the smaller entry becomes the left child, so
/// identical counts always produce identical trees.
pub fn build_tree(counts: &[u64]) -> Result<CodeTree, MultiAlphaError> {
    let alpha = counts.len();
    if alpha < 2 {
        return Err(MultiAlphaError::DegenerateAlphabet(alpha));
    }
    if alpha > MAX_ALPHABET {
        return Err(MultiAlphaError::AlphabetTooLarge(alpha));
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(MultiAlphaError::EmptyCounts);
    }
    let mut nodes: Vec<Node> = (0..alpha).map(|symbol| Node::Leaf { symbol }).collect();
    let mut node_counts: Vec<u64> = counts.to_vec();

    // Key: (count, kind, creation id); leaves (kind 0) order before merged
    // nodes (kind 1) of equal count.
    let mut heap: BinaryHeap<Reverse<(u64, u8, usize)>> =
        (0..alpha).map(|i| Reverse((counts[i], 0u8, i))).collect();
    while heap.len() > 1 {
        let Reverse((ca, _, a)) = heap.pop().unwrap();
        let Reverse((cb, _, b)) = heap.pop().unwrap();
        let id = nodes.len();
        nodes.push(Node::Internal { left: a, right: b });
        node_counts.push(ca + cb);
        heap.push(Reverse((ca + cb, 1, id)));
    }
    let root = heap.pop().unwrap().0 .2;

    let mut pre_order = Vec::with_capacity(alpha - 1);
    let mut slot_of_node = vec![usize::MAX; nodes.len()];
    let mut paths: Vec<Vec<(usize, u8)>> = vec![Vec::new(); alpha];
    let mut stack: Vec<(usize, Vec<(usize, u8)>)> = vec![(root, Vec::new())];
    while let Some((id, path)) = stack.pop() {
        match nodes[id] {
            Node::Leaf { symbol } => paths[symbol] = path,
            Node::Internal { left, right } => {
                slot_of_node[id] = pre_order.len();
                let slot = pre_order.len();
                pre_order.push(id);
                let mut lp = path.clone();
                lp.push((slot, 0));
                let mut rp = path;
                rp.push((slot, 1));
                // Right pushed first so the left subtree pops first (pre-order).
                stack.push((right, rp));
                stack.push((left, lp));
            }
        }
    }

    Ok(CodeTree { alpha, counts: counts.to_vec(), nodes, node_counts, pre_order, slot_of_node, paths, root })
}

impl CodeTree {
    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Code length (branch bits) of a symbol.
    pub fn depth(&self, symbol: usize) -> usize {
        self.paths[symbol].len()
    }

    /// Binary class (m, k) of every internal node in pre-order: m is the
    /// count routed through the node, k the count taken by its right child.
    /// Fully determined by the leaf counts, so the decoder recomputes it.
    pub fn node_classes(&self) -> Vec<(usize, usize)> {
        self.pre_order
            .iter()
            .map(|&id| {
                let Node::Internal { right, .. } = self.nodes[id] else { unreachable!() };
                (self.node_counts[id] as usize, self.node_counts[right] as usize)
            })
            .collect()
    }
}

/// Encodes a symbol sequence: each symbol contributes one branch bit to every
/// internal node on its root-to-leaf path, and each node's bit string is
/// ranked with the binary block coder. Returns one code per internal node in
/// pre-order.
pub fn encode_multi(
    symbols: &[u8],
    tree: &CodeTree,
    table: &QuantTable,
) -> Result<Vec<BlockCode>, MultiAlphaError> {
    let mut seen = vec![0u64; tree.alpha];
    for &s in symbols {
        if (s as usize) >= tree.alpha {
            return Err(MultiAlphaError::SymbolOutOfRange(s as u16));
        }
        seen[s as usize] += 1;
    }
    if seen != tree.counts {
        return Err(MultiAlphaError::CountMismatch);
    }
    let mut node_bits: Vec<Vec<u8>> = tree
        .pre_order
        .iter()
        .map(|&id| Vec::with_capacity(tree.node_counts[id] as usize))
        .collect();
    for &s in symbols {
        for &(slot, bit) in &tree.paths[s as usize] {
            node_bits[slot].push(bit);
        }
    }
    node_bits
        .iter()
        .map(|bits| encode_block(bits, table).map_err(MultiAlphaError::from))
        .collect()
}

/// Decodes the pre-order node codes back into the symbol sequence. The tree
/// is rebuilt from the counts; every code's class must match the class the
/// counts dictate for its node.
pub fn decode_multi(
    codes: &[BlockCode],
    counts: &[u64],
    table: &QuantTable,
) -> Result<Vec<u8>, MultiAlphaError> {
    let tree = build_tree(counts)?;
    let classes = tree.node_classes();
    if codes.len() != classes.len() {
        return Err(MultiAlphaError::CountMismatch);
    }
    let mut node_bits = Vec::with_capacity(codes.len());
    for (code, &(m, k)) in codes.iter().zip(&classes) {
        if code.m != m || code.k != k {
            return Err(MultiAlphaError::CountMismatch);
        }
        node_bits.push(decode_block(code, table)?);
    }
    let total: u64 = counts.iter().sum();
    let mut cursors = vec![0usize; node_bits.len()];
    let mut out = Vec::with_capacity(total as usize);
    for _ in 0..total {
        let mut id = tree.root;
        loop {
            match tree.nodes[id] {
                Node::Leaf { symbol } => {
                    out.push(symbol as u8);
                    break;
                }
                Node::Internal { left, right } => {
                    let slot = tree.slot_of_node[id];
                    let bit = node_bits[slot][cursors[slot]];
                    cursors[slot] += 1;
                    id = if bit == 0 { left } else { right };
                }
            }
        }
    }
    Ok(out)
}
