//! Tolerance clustering of points and a small disjoint-set forest.

use rayon::prelude::*;
use rstar::primitives::GeomWithData;
use rstar::RTree;

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Dense labels numbered by first appearance.
    pub fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut id = vec![usize::MAX; n];
        let mut labels = Vec::with_capacity(n);
        let mut count = 0;
        for x in 0..n {
            let r = self.find(x);
            if id[r] == usize::MAX {
                id[r] = count;
                count += 1;
            }
            labels.push(id[r]);
        }
        (labels, count)
    }
}

/// Result of snapping points to cluster centroids.
#[derive(Debug, Clone)]
pub struct Clusters<const K: usize> {
    /// Cluster id of every input point, numbered by first appearance.
    pub labels: Vec<usize>,
    pub centroids: Vec<[f64; K]>,
    /// Largest member-to-member distance over all clusters.
    pub max_diameter: f64,
}

/// Groups points transitively linked by pairs closer than `eps`.
pub fn cluster_points<const K: usize>(points: &[[f64; K]], eps: f64) -> Clusters<K>
where
    [f64; K]: rstar::Point<Scalar = f64>,
{
    let tree = RTree::bulk_load(
        points
            .iter()
            .enumerate()
            .map(|(i, p)| GeomWithData::new(*p, i))
            .collect(),
    );
    let r2 = eps * eps;
    let pairs: Vec<(usize, usize)> = points
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, p)| {
            tree.locate_within_distance(*p, r2)
                .filter(move |hit| hit.data > i)
                .map(move |hit| (i, hit.data))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut uf = UnionFind::new(points.len());
    for (a, b) in pairs {
        uf.union(a, b);
    }
    let (labels, count) = uf.labels();
    let mut sums = vec![[0.0; K]; count];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (i, &l) in labels.iter().enumerate() {
        for k in 0..K {
            sums[l][k] += points[i][k];
        }
        members[l].push(i);
    }
    let centroids: Vec<[f64; K]> = sums
        .iter()
        .zip(&members)
        .map(|(s, m)| {
            let mut c = *s;
            for v in &mut c {
                *v /= m.len() as f64;
            }
            if m.len() == 1 {
                points[m[0]]
            } else {
                c
            }
        })
        .collect();
    let dist = |a: &[f64; K], b: &[f64; K]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let max_diameter = members
        .iter()
        .zip(&centroids)
        .filter(|(m, _)| m.len() > 1)
        .map(|(m, c)| {
            if m.len() <= 64 {
                let mut d: f64 = 0.0;
                for (x, &a) in m.iter().enumerate() {
                    for &b in &m[x + 1..] {
                        d = d.max(dist(&points[a], &points[b]));
                    }
                }
                d
            } else {
                2.0 * m.iter().map(|&a| dist(&points[a], c)).fold(0.0, f64::max)
            }
        })
        .fold(0.0, f64::max);
    Clusters {
        labels,
        centroids,
        max_diameter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_points_merge() {
        let pts = [
            [0.0, 0.0],
            [1e-12, 0.0],
            [1.0, 1.0],
            [1.0, 1.0 + 5e-13],
            [3.0, 3.0],
        ];
        let c = cluster_points(&pts, 1e-9);
        assert_eq!(c.labels, vec![0, 0, 1, 1, 2]);
        assert_eq!(c.centroids.len(), 3);
        assert!(c.max_diameter < 1e-11);
        assert_eq!(c.centroids[2], [3.0, 3.0]);
    }

    #[test]
    fn many_coincident_coordinates() {
        let pts: Vec<[f64; 3]> = (0..2000).map(|i| [0.0, (i % 5) as f64, 0.0]).collect();
        let c = cluster_points(&pts, 1e-9);
        assert_eq!(c.centroids.len(), 5);
        assert_eq!(c.max_diameter, 0.0);
    }
}
