//! Static 2-d tree over codebook points for nearest-centre queries.

use crate::carpet::PlanePoint;

const LEAF: usize = 8;

pub(crate) struct KdTree {
    /// Point indices, permuted so that every node owns a contiguous range.
    order: Vec<usize>,
    points: Vec<PlanePoint>,
    nodes: Vec<Node>,
}

struct Node {
    lo: usize,
    hi: usize,
    axis: u8,
    split: f64,
    /// Children are stored at `left` and `left + 1`; zero for leaves.
    left: usize,
}

#[inline]
fn coord(p: &PlanePoint, axis: u8) -> f64 {
    if axis == 0 {
        p.x
    } else {
        p.y
    }
}

#[inline]
fn dist2(a: &PlanePoint, b: &PlanePoint) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    dx * dx + dy * dy
}

impl KdTree {
    pub fn new(points: &[PlanePoint]) -> Self {
        let mut tree = KdTree { order: (0..points.len()).collect(), points: points.to_vec(), nodes: Vec::new() };
        tree.nodes.push(Node { lo: 0, hi: points.len(), axis: 0, split: 0.0, left: 0 });
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let (lo, hi) = (tree.nodes[id].lo, tree.nodes[id].hi);
            if hi - lo <= LEAF {
                continue;
            }
            let slice = &tree.order[lo..hi];
            let (mut minx, mut maxx, mut miny, mut maxy) =
                (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for &i in slice {
                let p = &tree.points[i];
                minx = minx.min(p.x);
                maxx = maxx.max(p.x);
                miny = miny.min(p.y);
                maxy = maxy.max(p.y);
            }
            let axis = if maxx - minx >= maxy - miny { 0 } else { 1 };
            let mid = (hi - lo) / 2;
            let pts = &tree.points;
            tree.order[lo..hi].select_nth_unstable_by(mid, |&a, &b| {
                coord(&pts[a], axis).total_cmp(&coord(&pts[b], axis)).then(a.cmp(&b))
            });
            let split = coord(&tree.points[tree.order[lo + mid]], axis);
            let left = tree.nodes.len();
            tree.nodes.push(Node { lo, hi: lo + mid, axis: 0, split: 0.0, left: 0 });
            tree.nodes.push(Node { lo: lo + mid, hi, axis: 0, split: 0.0, left: 0 });
            let node = &mut tree.nodes[id];
            node.axis = axis;
            node.split = split;
            node.left = left;
            stack.push(left);
            stack.push(left + 1);
        }
        tree
    }

    /// Indices of the `count` nearest points, closest first; ties go to the
    /// smaller index.
    pub fn nearest(&self, q: &PlanePoint, count: usize, out: &mut Vec<(f64, usize)>) {
        out.clear();
        let count = count.min(self.points.len());
        if count == 0 {
            return;
        }
        self.search(0, q, count, out);
    }

    fn search(&self, id: usize, q: &PlanePoint, count: usize, out: &mut Vec<(f64, usize)>) {
        let node = &self.nodes[id];
        if node.left == 0 {
            for &i in &self.order[node.lo..node.hi] {
                let d = dist2(q, &self.points[i]);
                let full = out.len() == count;
                if full {
                    let worst = out[count - 1];
                    if (d, i) >= worst {
                        continue;
                    }
                    out.pop();
                }
                let pos = out.partition_point(|&e| e < (d, i));
                out.insert(pos, (d, i));
            }
            return;
        }
        let diff = coord(q, node.axis) - node.split;
        let (near, far) = if diff < 0.0 { (node.left, node.left + 1) } else { (node.left + 1, node.left) };
        self.search(near, q, count, out);
        if out.len() < count || diff * diff <= out[count - 1].0 {
            self.search(far, q, count, out);
        }
    }
}
