//! Exhaustive minor test for very small hosts.
//!
//! Every assignment of host vertices to "unused" or one of exactly `k`
//! unlabelled blocks is enumerated; a block assignment works when each block
//! is connected and the quotient graph contains the pattern as a subgraph on
//! all `k` blocks.

use super::MinorError;
use crate::graph::Graph;

pub const BRUTE_FORCE_MAX_HOST: usize = 12;

pub fn brute_force_minor(host: &Graph, pattern: &Graph) -> Result<bool, MinorError> {
    let n = host.n();
    if n > BRUTE_FORCE_MAX_HOST {
        return Err(MinorError::HostTooLarge(n));
    }
    let k = pattern.n();
    if k == 0 {
        return Ok(true);
    }
    if k > n || pattern.edge_count() > host.edge_count() {
        return Ok(false);
    }
    let host_adj: Vec<u32> = (0..n)
        .map(|v| host.neighbors(v).iter().fold(0, |m, &w| m | 1 << w))
        .collect();
    let pat_edges = pattern.edges();
    let mut ctx = Ctx {
        n,
        k,
        host_adj,
        pat_edges,
        assign: vec![0; n],
    };
    Ok(ctx.enumerate(0, 0))
}

struct Ctx {
    n: usize,
    k: usize,
    host_adj: Vec<u32>,
    pat_edges: Vec<(usize, usize)>,
    assign: Vec<usize>,
}

impl Ctx {
    fn enumerate(&mut self, v: usize, used: usize) -> bool {
        if v == self.n {
            return used == self.k && self.check();
        }
        if used + (self.n - v) < self.k {
            return false;
        }
        for b in 1..=used {
            self.assign[v] = b;
            if self.enumerate(v + 1, used) {
                return true;
            }
        }
        if used < self.k {
            self.assign[v] = used + 1;
            if self.enumerate(v + 1, used + 1) {
                return true;
            }
        }
        self.assign[v] = 0;
        self.enumerate(v + 1, used)
    }

    fn check(&self) -> bool {
        let mut masks = vec![0u32; self.k];
        for (v, &b) in self.assign.iter().enumerate() {
            if b != 0 {
                masks[b - 1] |= 1 << v;
            }
        }
        if !masks.iter().all(|&m| self.connected(m)) {
            return false;
        }
        let mut quotient = vec![0u32; self.k];
        for i in 0..self.k {
            let mut reach = 0u32;
            for v in 0..self.n {
                if masks[i] >> v & 1 == 1 {
                    reach |= self.host_adj[v];
                }
            }
            for (j, &mask) in masks.iter().enumerate() {
                if j != i && reach & mask != 0 {
                    quotient[i] |= 1 << j;
                }
            }
        }
        let mut image = vec![usize::MAX; self.k];
        self.embed(0, 0, &quotient, &mut image)
    }

    fn connected(&self, mask: u32) -> bool {
        if mask == 0 {
            return false;
        }
        let mut seen = mask & mask.wrapping_neg();
        loop {
            let mut grow = seen;
            for v in 0..self.n {
                if seen >> v & 1 == 1 {
                    grow |= self.host_adj[v] & mask;
                }
            }
            if grow == seen {
                return seen == mask;
            }
            seen = grow;
        }
    }

    /// Injective map of pattern vertices onto blocks preserving pattern edges.
    fn embed(&self, p: usize, taken: u32, quotient: &[u32], image: &mut [usize]) -> bool {
        if p == self.k {
            return true;
        }
        for b in 0..self.k {
            if taken >> b & 1 == 1 {
                continue;
            }
            let ok = self.pat_edges.iter().all(|&(x, y)| {
                let other = if x == p {
                    y
                } else if y == p {
                    x
                } else {
                    return true;
                };
                other > p || quotient[b] >> image[other] & 1 == 1
            });
            if ok {
                image[p] = b;
                if self.embed(p + 1, taken | 1 << b, quotient, image) {
                    return true;
                }
            }
        }
        false
    }
}
