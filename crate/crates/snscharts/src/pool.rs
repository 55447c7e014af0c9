//! Order-statistic treap backing the reference pools: O(log n) insertion and
//! rank queries over a growing multiset of observations.

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    value: f64,
    dups: u32,
    size: u32,
    prio: u64,
    left: u32,
    right: u32,
}

/// Growing multiset of finite f64 values with rank queries.
#[derive(Debug, Clone)]
pub struct RankPool {
    nodes: Vec<Node>,
    root: u32,
    rng: u64,
}

impl Default for RankPool {
    fn default() -> Self {
        Self::new()
    }
}

impl RankPool {
    pub fn new() -> Self {
        RankPool {
            nodes: Vec::new(),
            root: NIL,
            rng: 0x9E37_79B9_7F4A_7C15,
        }
    }

    pub fn len(&self) -> usize {
        if self.root == NIL {
            0
        } else {
            self.nodes[self.root as usize].size as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    fn next_prio(&mut self) -> u64 {
        // xorshift64*; deterministic per pool, only used to balance the treap.
        let mut x = self.rng;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.rng = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    fn size(&self, t: u32) -> u32 {
        if t == NIL {
            0
        } else {
            self.nodes[t as usize].size
        }
    }

    fn pull(&mut self, t: u32) {
        let (l, r, d) = {
            let n = &self.nodes[t as usize];
            (n.left, n.right, n.dups)
        };
        self.nodes[t as usize].size = self.size(l) + self.size(r) + d;
    }

    fn rotate_right(&mut self, t: u32) -> u32 {
        let l = self.nodes[t as usize].left;
        self.nodes[t as usize].left = self.nodes[l as usize].right;
        self.nodes[l as usize].right = t;
        self.pull(t);
        self.pull(l);
        l
    }

    fn rotate_left(&mut self, t: u32) -> u32 {
        let r = self.nodes[t as usize].right;
        self.nodes[t as usize].right = self.nodes[r as usize].left;
        self.nodes[r as usize].left = t;
        self.pull(t);
        self.pull(r);
        r
    }

    /// Insert a finite value (zeros are normalized so -0.0 and 0.0 tie).
    pub fn insert(&mut self, x: f64) {
        debug_assert!(x.is_finite(), "RankPool requires finite values");
        let x = if x == 0.0 { 0.0 } else { x };
        let root = self.root;
        self.root = self.insert_at(root, x);
    }

    fn insert_at(&mut self, t: u32, x: f64) -> u32 {
        if t == NIL {
            let prio = self.next_prio();
            self.nodes.push(Node {
                value: x,
                dups: 1,
                size: 1,
                prio,
                left: NIL,
                right: NIL,
            });
            return (self.nodes.len() - 1) as u32;
        }
        let tv = self.nodes[t as usize].value;
        if x == tv {
            self.nodes[t as usize].dups += 1;
            self.nodes[t as usize].size += 1;
            t
        } else if x < tv {
            let l = self.nodes[t as usize].left;
            let l = self.insert_at(l, x);
            self.nodes[t as usize].left = l;
            self.pull(t);
            if self.nodes[l as usize].prio > self.nodes[t as usize].prio {
                self.rotate_right(t)
            } else {
                t
            }
        } else {
            let r = self.nodes[t as usize].right;
            let r = self.insert_at(r, x);
            self.nodes[t as usize].right = r;
            self.pull(t);
            if self.nodes[r as usize].prio > self.nodes[t as usize].prio {
                self.rotate_left(t)
            } else {
                t
            }
        }
    }

    /// Number of pooled values strictly below x and exactly equal to x.
    pub fn counts(&self, x: f64) -> (usize, usize) {
        let x = if x == 0.0 { 0.0 } else { x };
        let mut less = 0usize;
        let mut t = self.root;
        while t != NIL {
            let n = &self.nodes[t as usize];
            if x < n.value {
                t = n.left;
            } else if x > n.value {
                less += self.size(n.left) as usize + n.dups as usize;
                t = n.right;
            } else {
                less += self.size(n.left) as usize;
                return (less, n.dups as usize);
            }
        }
        (less, 0)
    }

    /// Sequential midrank of a new observation against the pool:
    /// (# below) + 1 + (# equal) / 2.
    pub fn sequential_rank(&self, x: f64) -> f64 {
        let (less, eq) = self.counts(x);
        less as f64 + 1.0 + eq as f64 / 2.0
    }
}
