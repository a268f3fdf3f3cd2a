//! Trie over symbol strings with per-depth node counts.
//!
//! Inserting a string of length `L` creates at most `L` nodes; the counter
//! at depth `l` is the number of distinct length-`l` prefixes inserted so far.

use crate::access::Symbol;

#[derive(Clone, Debug, Default)]
struct Node {
    children: Vec<(Symbol, u32)>,
}

#[derive(Clone, Debug)]
pub struct SubstringTrie {
    nodes: Vec<Node>,
    /// `depth_counts[l - 1]` = number of nodes at depth `l`.
    depth_counts: Vec<usize>,
    inserted: usize,
}

impl Default for SubstringTrie {
    fn default() -> Self {
        Self::new()
    }
}

impl SubstringTrie {
    pub fn new() -> Self {
        SubstringTrie {
            nodes: vec![Node::default()],
            depth_counts: Vec::new(),
            inserted: 0,
        }
    }

    /// Inserts `s`, creating the nodes for all of its prefixes.
    pub fn insert(&mut self, s: &[Symbol]) {
        self.inserted += 1;
        if self.depth_counts.len() < s.len() {
            self.depth_counts.resize(s.len(), 0);
        }
        let mut cur = 0usize;
        for (depth, &c) in s.iter().enumerate() {
            let children = &self.nodes[cur].children;
            cur = match children.binary_search_by_key(&c, |&(sym, _)| sym) {
                Ok(i) => children[i].1 as usize,
                Err(i) => {
                    let id = self.nodes.len();
                    self.nodes.push(Node::default());
                    self.nodes[cur].children.insert(i, (c, id as u32));
                    self.depth_counts[depth] += 1;
                    id
                }
            };
        }
    }

    /// Distinct inserted prefixes of length `ell` (0 for `ell = 0` or past
    /// the deepest insertion).
    pub fn count_at(&self, ell: usize) -> usize {
        if ell == 0 {
            return 0;
        }
        self.depth_counts.get(ell - 1).copied().unwrap_or(0)
    }

    pub fn depth_counts(&self) -> &[usize] {
        &self.depth_counts
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Nodes excluding the root.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - 1
    }
}
