/// Binary max-heap over a fixed set of keys `0..n` with in-place priority updates.
#[derive(Debug, Clone, Default)]
pub struct IndexedMaxHeap {
    values: Vec<f64>,
    heap: Vec<u32>,
    pos: Vec<u32>,
}

impl IndexedMaxHeap {
    pub fn new(values: &[f64]) -> Self {
        let n = values.len();
        let mut h = Self { values: values.to_vec(), heap: (0..n as u32).collect(), pos: (0..n as u32).collect() };
        for i in (0..n / 2).rev() {
            h.sift_down(i);
        }
        h
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(key, value)` of a maximal entry.
    #[inline]
    pub fn top(&self) -> (usize, f64) {
        let k = self.heap[0] as usize;
        (k, self.values[k])
    }

    #[inline]
    pub fn max(&self) -> f64 {
        self.values[self.heap[0] as usize]
    }

    pub fn value(&self, key: usize) -> f64 {
        self.values[key]
    }

    pub fn update(&mut self, key: usize, value: f64) {
        let old = self.values[key];
        self.values[key] = value;
        let i = self.pos[key] as usize;
        if value > old {
            self.sift_up(i);
        } else if value < old {
            self.sift_down(i);
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i] as usize] = i as u32;
        self.pos[self.heap[j] as usize] = j as u32;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.values[self.heap[i] as usize] > self.values[self.heap[parent] as usize] {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            let r = l + 1;
            let mut best = i;
            if l < n && self.values[self.heap[l] as usize] > self.values[self.heap[best] as usize] {
                best = l;
            }
            if r < n && self.values[self.heap[r] as usize] > self.values[self.heap[best] as usize] {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn top_matches_linear_scan(init in prop::collection::vec(-10.0f64..10.0, 1..40),
                                   updates in prop::collection::vec((0usize..40, -10.0f64..10.0), 0..200)) {
            let mut heap = IndexedMaxHeap::new(&init);
            let mut shadow = init.clone();
            for (k, v) in updates {
                let k = k % shadow.len();
                heap.update(k, v);
                shadow[k] = v;
                let max = shadow.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert_eq!(heap.max(), max);
                prop_assert_eq!(shadow[heap.top().0], max);
            }
        }
    }
}
