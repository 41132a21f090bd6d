use std::cmp::Ordering;

use serde::Serialize;

use crate::order::HeightOrder;

const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    item: u32,
    degree: u32,
    child: u32,
    sibling: u32,
}

/// A binomial max-heap living in a shared [`HeapForest`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeapHandle {
    head: u32,
    max: u32,
    len: u32,
}

impl HeapHandle {
    pub const EMPTY: HeapHandle = HeapHandle { head: NIL, max: NIL, len: 0 };

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl Default for HeapHandle {
    fn default() -> Self {
        HeapHandle::EMPTY
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HeapOpKind {
    Insert,
    Merge,
    Delete,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HeapOp {
    pub kind: HeapOpKind,
    pub size: usize,
    pub cost: f64,
}

/// Cost of an operation on a heap of `size` elements: log2, clamped at 1.
pub fn log_cost(size: usize) -> f64 {
    (size.max(2) as f64).log2()
}

/// Arena of binomial heap nodes. Heaps are merged by splicing root lists, so
/// every heap of a run shares one allocation.
#[derive(Debug, Default)]
pub struct HeapForest {
    nodes: Vec<Node>,
    pub cost: f64,
    pub inserts: u64,
    pub merges: u64,
    pub deletes: u64,
    log: Option<Vec<HeapOp>>,
}

fn cmp_items(order: &HeightOrder, a: u32, b: u32) -> Ordering {
    if a == b {
        Ordering::Equal
    } else {
        order.compare(a, b)
    }
}

impl HeapForest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn enable_log(&mut self) {
        self.log = Some(Vec::new());
    }

    pub fn take_log(&mut self) -> Vec<HeapOp> {
        self.log.take().unwrap_or_default()
    }

    fn record(&mut self, kind: HeapOpKind, size: usize) {
        let cost = if kind == HeapOpKind::Insert { 1.0 } else { log_cost(size) };
        self.cost += cost;
        match kind {
            HeapOpKind::Insert => self.inserts += 1,
            HeapOpKind::Merge => self.merges += 1,
            HeapOpKind::Delete => self.deletes += 1,
        }
        if let Some(l) = self.log.as_mut() {
            l.push(HeapOp { kind, size, cost });
        }
    }

    pub fn peek_max(&self, h: &HeapHandle) -> Option<u32> {
        (h.max != NIL).then(|| self.nodes[h.max as usize].item)
    }

    pub fn insert(&mut self, h: &mut HeapHandle, item: u32, order: &HeightOrder) {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { item, degree: 0, child: NIL, sibling: NIL });
        let single = HeapHandle { head: id, max: id, len: 1 };
        self.record(HeapOpKind::Insert, h.len() + 1);
        *h = self.union(*h, single, order);
    }

    /// Merge two heaps; both handles are consumed.
    pub fn merge(&mut self, a: HeapHandle, b: HeapHandle, order: &HeightOrder) -> HeapHandle {
        if a.is_empty() {
            return b;
        }
        if b.is_empty() {
            return a;
        }
        self.record(HeapOpKind::Merge, a.len() + b.len());
        self.union(a, b, order)
    }

    fn union(&mut self, a: HeapHandle, b: HeapHandle, order: &HeightOrder) -> HeapHandle {
        if a.is_empty() {
            return b;
        }
        if b.is_empty() {
            return a;
        }
        let (ia, ib) = (self.nodes[a.max as usize].item, self.nodes[b.max as usize].item);
        let keep = if cmp_items(order, ia, ib) == Ordering::Less { b.max } else { a.max };
        let head = self.union_roots(a.head, b.head, keep, order);
        HeapHandle { head, max: keep, len: a.len + b.len }
    }

    fn merge_lists(&mut self, mut a: u32, mut b: u32) -> u32 {
        let mut head = NIL;
        let mut tail = NIL;
        while a != NIL || b != NIL {
            let take_a = b == NIL || (a != NIL && self.nodes[a as usize].degree <= self.nodes[b as usize].degree);
            let x = if take_a { a } else { b };
            if take_a {
                a = self.nodes[a as usize].sibling;
            } else {
                b = self.nodes[b as usize].sibling;
            }
            if tail == NIL {
                head = x;
            } else {
                self.nodes[tail as usize].sibling = x;
            }
            tail = x;
        }
        if tail != NIL {
            self.nodes[tail as usize].sibling = NIL;
        }
        head
    }

    fn link(&mut self, child: u32, parent: u32) {
        self.nodes[child as usize].sibling = self.nodes[parent as usize].child;
        self.nodes[parent as usize].child = child;
        self.nodes[parent as usize].degree += 1;
    }

    fn union_roots(&mut self, a: u32, b: u32, keep: u32, order: &HeightOrder) -> u32 {
        let mut head = self.merge_lists(a, b);
        let mut prev = NIL;
        let mut x = head;
        let mut next = self.nodes[x as usize].sibling;
        while next != NIL {
            let nx = self.nodes[next as usize];
            let same = self.nodes[x as usize].degree == nx.degree;
            let triple = nx.sibling != NIL && self.nodes[nx.sibling as usize].degree == nx.degree;
            if !same || triple {
                prev = x;
                x = next;
            } else {
                let c = cmp_items(order, self.nodes[x as usize].item, nx.item);
                let x_wins = match c {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => next != keep,
                };
                if x_wins {
                    self.nodes[x as usize].sibling = nx.sibling;
                    self.link(next, x);
                } else {
                    if prev == NIL {
                        head = next;
                    } else {
                        self.nodes[prev as usize].sibling = next;
                    }
                    self.link(x, next);
                    x = next;
                }
            }
            next = self.nodes[x as usize].sibling;
        }
        head
    }

    pub fn delete_max(&mut self, h: &mut HeapHandle, order: &HeightOrder) -> Option<u32> {
        if h.is_empty() {
            return None;
        }
        self.record(HeapOpKind::Delete, h.len());
        let m = h.max;
        let item = self.nodes[m as usize].item;
        let mut prev = NIL;
        let mut cur = h.head;
        while cur != m {
            prev = cur;
            cur = self.nodes[cur as usize].sibling;
        }
        let after = self.nodes[m as usize].sibling;
        if prev == NIL {
            h.head = after;
        } else {
            self.nodes[prev as usize].sibling = after;
        }
        let mut rev = NIL;
        let mut c = self.nodes[m as usize].child;
        while c != NIL {
            let nxt = self.nodes[c as usize].sibling;
            self.nodes[c as usize].sibling = rev;
            rev = c;
            c = nxt;
        }
        h.len -= 1;
        if h.len == 0 {
            *h = HeapHandle::EMPTY;
            return Some(item);
        }
        let mut best = NIL;
        for start in [h.head, rev] {
            let mut r = start;
            while r != NIL {
                if best == NIL
                    || cmp_items(order, self.nodes[r as usize].item, self.nodes[best as usize].item) == Ordering::Greater
                {
                    best = r;
                }
                r = self.nodes[r as usize].sibling;
            }
        }
        h.head = if h.head == NIL {
            rev
        } else if rev == NIL {
            h.head
        } else {
            self.union_roots(h.head, rev, best, order)
        };
        h.max = best;
        Some(item)
    }

    /// All items of a heap (uncounted; for audits).
    pub fn items(&self, h: &HeapHandle) -> Vec<u32> {
        let mut out = Vec::with_capacity(h.len());
        let mut stack = Vec::new();
        if h.head != NIL {
            stack.push(h.head);
        }
        while let Some(x) = stack.pop() {
            let n = self.nodes[x as usize];
            out.push(n.item);
            if n.sibling != NIL {
                stack.push(n.sibling);
            }
            if n.child != NIL {
                stack.push(n.child);
            }
        }
        out
    }
}
