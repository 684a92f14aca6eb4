//! Static k-d tree for nearest-neighbour distance queries.

use crate::geometry::PointCloud;

/// Implicit balanced tree: the median of every index range is its node.
pub(crate) struct KdTree<'a> {
    cloud: &'a PointCloud,
    order: Vec<usize>,
    axes: Vec<u8>,
}

impl<'a> KdTree<'a> {
    pub(crate) fn build(cloud: &'a PointCloud) -> Self {
        let n = cloud.len();
        let mut tree = KdTree { cloud, order: (0..n).collect(), axes: vec![0; n] };
        tree.split(0, n);
        tree
    }

    fn split(&mut self, lo: usize, hi: usize) {
        if hi - lo <= 1 {
            return;
        }
        let dim = self.cloud.dim();
        let cloud = self.cloud;
        let axis = (0..dim)
            .max_by(|&a, &b| {
                let spread = |ax: usize| {
                    let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
                    for &i in &self.order[lo..hi] {
                        let c = cloud.point(i)[ax];
                        mn = mn.min(c);
                        mx = mx.max(c);
                    }
                    mx - mn
                };
                spread(a).total_cmp(&spread(b))
            })
            .unwrap_or(0);
        let mid = lo + (hi - lo) / 2;
        self.order[lo..hi]
            .select_nth_unstable_by(mid - lo, |&a, &b| cloud.point(a)[axis].total_cmp(&cloud.point(b)[axis]));
        self.axes[mid] = axis as u8;
        self.split(lo, mid);
        self.split(mid + 1, hi);
    }

    pub(crate) fn nearest_distance(&self, query: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        self.search(0, self.order.len(), query, &mut best);
        best.sqrt()
    }

    fn search(&self, lo: usize, hi: usize, query: &[f64], best: &mut f64) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let p = self.cloud.point(self.order[mid]);
        let d2: f64 = p.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
        if d2 < *best {
            *best = d2;
        }
        if hi - lo == 1 {
            return;
        }
        let axis = self.axes[mid] as usize;
        let diff = query[axis] - p[axis];
        let (near, far) = if diff < 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.search(near.0, near.1, query, best);
        if diff * diff < *best {
            self.search(far.0, far.1, query, best);
        }
    }
}
