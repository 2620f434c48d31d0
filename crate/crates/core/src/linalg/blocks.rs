//! Connected components of sparsity patterns.

use super::matrix::ComplexMatrix;

/// Disjoint-set forest over `0..n`.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two distinct sets were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    /// Components as sorted index lists, ordered by their smallest member.
    pub fn components(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(i);
        }
        out
    }
}

/// Blocks of a square matrix: indices connected through entries with `|m_ij| > tol`.
pub fn pattern_blocks(m: &ComplexMatrix, tol: f64) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if m[(i, j)].norm() > tol || m[(j, i)].norm() > tol {
                uf.union(i, j);
            }
        }
    }
    uf.components()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_splits_fully() {
        let m = ComplexMatrix::from_diag(&[1.0, 2.0, 3.0]);
        assert_eq!(pattern_blocks(&m, 0.0), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn interleaved_blocks() {
        let mut m = ComplexMatrix::identity(4);
        m[(0, 2)] = 1.0.into();
        m[(3, 1)] = 1.0.into();
        assert_eq!(pattern_blocks(&m, 0.0), vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn union_find_merges_transitively() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 4));
        assert!(uf.union(4, 2));
        assert!(!uf.union(0, 2));
        assert_eq!(uf.components(), vec![vec![0, 2, 4], vec![1], vec![3]]);
    }
}
