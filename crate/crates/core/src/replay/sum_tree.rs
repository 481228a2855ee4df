//! Sum tree over slot priorities for proportional sampling.

/// Heap-layout segment tree. Capacity is rounded up to a power of two so
/// leaves sit contiguously at `size + i` and prefix intervals follow slot
/// order; padding leaves hold zero and are never sampled.
#[derive(Debug, Clone)]
pub struct SumTree {
    size: usize,
    tree: Vec<f64>,
}

impl SumTree {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        let size = capacity.next_power_of_two();
        SumTree {
            size,
            tree: vec![0.0; 2 * size],
        }
    }

    pub fn total(&self) -> f64 {
        self.tree[1]
    }

    pub fn get(&self, slot: usize) -> f64 {
        self.tree[self.size + slot]
    }

    pub fn set(&mut self, slot: usize, value: f64) {
        debug_assert!(slot < self.size);
        debug_assert!(value >= 0.0 && value.is_finite());
        let mut pos = self.size + slot;
        self.tree[pos] = value;
        while pos > 1 {
            pos /= 2;
            self.tree[pos] = self.tree[2 * pos] + self.tree[2 * pos + 1];
        }
    }

    /// Slot whose prefix-sum interval contains `target` (`0 <= target < total`).
    pub fn find(&self, mut target: f64) -> usize {
        let mut pos = 1usize;
        while pos < self.size {
            let left = 2 * pos;
            if target < self.tree[left] {
                pos = left;
            } else {
                target -= self.tree[left];
                pos = left + 1;
            }
        }
        pos - self.size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_lookup_hits_the_right_slot() {
        let mut t = SumTree::new(7); // rounds up to 8 internally
        let ps = [0.5, 0.2, 0.8, 0.3, 1.1, 2.5, 3.9];
        for (i, &p) in ps.iter().enumerate() {
            t.set(i, p);
        }
        assert!((t.total() - 9.3).abs() < 1e-12);
        assert_eq!(t.find(0.0), 0);
        assert_eq!(t.find(0.49), 0);
        assert_eq!(t.find(0.5), 1);
        assert_eq!(t.find(0.69), 1);
        assert_eq!(t.find(0.7), 2);
        assert_eq!(t.find(1.5), 3);
        assert_eq!(t.find(1.9), 4);
        assert_eq!(t.find(2.95), 5);
        assert_eq!(t.find(5.5), 6);
        assert_eq!(t.find(9.29), 6);
    }

    #[test]
    fn updates_rebuild_prefix_sums() {
        let mut t = SumTree::new(4);
        for i in 0..4 {
            t.set(i, 1.0);
        }
        t.set(1, 3.3);
        t.set(3, 0.0);
        assert!((t.total() - 5.3).abs() < 1e-12);
        assert_eq!(t.find(0.99), 0);
        assert_eq!(t.find(1.0), 1);
        assert_eq!(t.find(4.2), 1);
        assert_eq!(t.find(4.31), 2);
        assert_eq!(t.find(5.29), 2);
    }

    #[test]
    fn single_slot_tree() {
        let mut t = SumTree::new(1);
        t.set(0, 2.5);
        assert_eq!(t.total(), 2.5);
        assert_eq!(t.find(0.0), 0);
        assert_eq!(t.find(2.49), 0);
    }
}
