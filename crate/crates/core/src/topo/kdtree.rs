/// Static 3D kd-tree laid out implicitly: each subslice's middle element is
/// the splitting node for that subslice.
pub(crate) struct KdTree {
    points: Vec<[f64; 3]>,
}

impl KdTree {
    pub fn new(mut points: Vec<[f64; 3]>) -> Self {
        build(&mut points, 0);
        KdTree { points }
    }

    /// Squared distance to the nearest stored point, searching only for
    /// candidates closer than `bound_sq`. Returns `bound_sq` when none is.
    pub fn nearest_sq(&self, q: [f64; 3], bound_sq: f64) -> f64 {
        let mut best = bound_sq;
        search(&self.points, q, 0, &mut best);
        best
    }
}

fn build(points: &mut [[f64; 3]], depth: usize) {
    if points.len() <= 1 {
        return;
    }
    let axis = depth % 3;
    let mid = points.len() / 2;
    points.select_nth_unstable_by(mid, |a, b| a[axis].total_cmp(&b[axis]));
    let (left, right) = points.split_at_mut(mid);
    build(left, depth + 1);
    build(&mut right[1..], depth + 1);
}

fn search(points: &[[f64; 3]], q: [f64; 3], depth: usize, best: &mut f64) {
    if points.is_empty() {
        return;
    }
    let mid = points.len() / 2;
    let p = points[mid];
    let d = dist_sq(p, q);
    if d < *best {
        *best = d;
    }
    let axis = depth % 3;
    let delta = q[axis] - p[axis];
    let (near, far) = if delta < 0.0 {
        (&points[..mid], &points[mid + 1..])
    } else {
        (&points[mid + 1..], &points[..mid])
    };
    search(near, q, depth + 1, best);
    if delta * delta < *best {
        search(far, q, depth + 1, best);
    }
}

pub(crate) fn dist_sq(a: [f64; 3], b: [f64; 3]) -> f64 {
    let (dx, dy, dz) = (a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    dx * dx + dy * dy + dz * dz
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<[f64; 3]> = (0..500)
            .map(|_| [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(0.0..3.0)])
            .collect();
        let tree = KdTree::new(pts.clone());
        for _ in 0..200 {
            let q = [rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0), rng.gen_range(-1.0..4.0)];
            let brute = pts.iter().map(|&p| dist_sq(p, q)).fold(f64::INFINITY, f64::min);
            assert_eq!(tree.nearest_sq(q, f64::INFINITY), brute);
        }
    }

    #[test]
    fn bound_is_respected() {
        let tree = KdTree::new(vec![[0.0, 0.0, 0.0]]);
        assert_eq!(tree.nearest_sq([3.0, 4.0, 0.0], 1.0), 1.0);
        assert_eq!(tree.nearest_sq([3.0, 4.0, 0.0], 100.0), 25.0);
    }
}
