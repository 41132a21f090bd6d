use std::cell::{Cell, RefCell};
use std::cmp::Ordering;

/// Symbolically perturbed height: compared lexicographically on
/// (height, rank, sub, eps). `rank` is the original vertex id, `sub` orders
/// unfolded saddle copies, `eps` places cut boundaries inside the gap next to
/// a saddle (+1/+2 above it, -1/-2 below it).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderKey {
    pub height: f64,
    pub rank: u32,
    pub sub: u32,
    pub eps: i8,
}

impl OrderKey {
    pub fn new(height: f64, rank: u32) -> Self {
        OrderKey { height, rank, sub: 0, eps: 0 }
    }

    pub fn cmp_raw(&self, other: &OrderKey) -> Ordering {
        self.height
            .total_cmp(&other.height)
            .then(self.rank.cmp(&other.rank))
            .then(self.sub.cmp(&other.sub))
            .then(self.eps.cmp(&other.eps))
    }
}

/// Counting comparator over node ids. Every height decision in the crate goes
/// through `compare`, so `count()` is the exact number of comparisons.
#[derive(Debug)]
pub struct HeightOrder {
    keys: Vec<OrderKey>,
    inverted: bool,
    count: Cell<u64>,
    log: RefCell<Option<Vec<(u32, u32)>>>,
}

impl HeightOrder {
    pub fn new(keys: Vec<OrderKey>) -> Self {
        HeightOrder { keys, inverted: false, count: Cell::new(0), log: RefCell::new(None) }
    }

    pub fn with_inversion(keys: Vec<OrderKey>, inverted: bool) -> Self {
        let mut o = Self::new(keys);
        o.inverted = inverted;
        o
    }

    pub fn inverted(&self) -> bool {
        self.inverted
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, v: u32) -> &OrderKey {
        &self.keys[v as usize]
    }

    pub fn keys(&self) -> &[OrderKey] {
        &self.keys
    }

    pub fn enable_log(&self) {
        *self.log.borrow_mut() = Some(Vec::new());
    }

    pub fn take_log(&self) -> Vec<(u32, u32)> {
        self.log.borrow_mut().take().unwrap_or_default()
    }

    pub fn count(&self) -> u64 {
        self.count.get()
    }

    /// Fold in comparisons made on a derived order (e.g. a mirrored copy).
    pub fn add_count(&self, extra: u64) {
        self.count.set(self.count.get() + extra);
    }

    pub fn reset_count(&self) {
        self.count.set(0);
    }

    /// Counted comparison. Equal only for two members of one boundary group.
    pub fn compare(&self, u: u32, v: u32) -> Ordering {
        self.count.set(self.count.get() + 1);
        if let Some(log) = self.log.borrow_mut().as_mut() {
            log.push((u, v));
        }
        self.compare_uncounted(u, v)
    }

    pub(crate) fn compare_uncounted(&self, u: u32, v: u32) -> Ordering {
        let o = self.keys[u as usize].cmp_raw(&self.keys[v as usize]);
        if self.inverted {
            o.reverse()
        } else {
            o
        }
    }

    pub fn higher(&self, u: u32, v: u32) -> bool {
        self.compare(u, v) == Ordering::Greater
    }

    pub fn lower(&self, u: u32, v: u32) -> bool {
        self.compare(u, v) == Ordering::Less
    }

    /// The higher of two ids (counted).
    pub fn max_of(&self, u: u32, v: u32) -> u32 {
        if self.compare(u, v) == Ordering::Less {
            v
        } else {
            u
        }
    }

    pub fn min_of(&self, u: u32, v: u32) -> u32 {
        if self.compare(u, v) == Ordering::Greater {
            v
        } else {
            u
        }
    }

    /// Sort ids ascending with counted comparisons (merge sort).
    pub fn sort_ascending(&self, ids: &mut [u32]) {
        ids.sort_by(|&a, &b| self.compare(a, b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_tiebreak() {
        let mut keys = vec![OrderKey::new(0.0, 0); 10];
        keys[7] = OrderKey::new(1.0, 7);
        keys[3] = OrderKey::new(2.0, 3);
        keys[2] = OrderKey::new(4.0, 2);
        keys[9] = OrderKey::new(4.0, 9);
        let o = HeightOrder::new(keys);
        assert_eq!(o.compare(7, 3), Ordering::Less);
        assert_eq!(o.compare(2, 9), Ordering::Less);
        assert_eq!(o.count(), 2);
    }

    #[test]
    fn counts_every_pair() {
        let keys = (0..3).map(|i| OrderKey::new(i as f64, i)).collect();
        let o = HeightOrder::new(keys);
        o.compare(0, 1);
        o.compare(0, 2);
        o.compare(1, 2);
        assert_eq!(o.count(), 3);
    }

    #[test]
    fn inversion_flips() {
        let keys = (0..2).map(|i| OrderKey::new(i as f64, i)).collect();
        let o = HeightOrder::with_inversion(keys, true);
        assert!(o.higher(0, 1));
    }

    #[test]
    fn sub_and_eps_nest_inside_gap() {
        let y = OrderKey { height: 3.0, rank: 5, sub: 0, eps: 0 };
        let minus = OrderKey { eps: 1, ..y };
        let plus = OrderKey { eps: 2, ..y };
        let copy = OrderKey { sub: 1, ..y };
        let next = OrderKey::new(3.0, 6);
        assert_eq!(y.cmp_raw(&minus), Ordering::Less);
        assert_eq!(minus.cmp_raw(&plus), Ordering::Less);
        assert_eq!(plus.cmp_raw(&copy), Ordering::Less);
        assert_eq!(copy.cmp_raw(&next), Ordering::Less);
    }
}
