//! Lattice geometry.
//!
//! Sites of a periodic hypercubic lattice with linear size `L` in `d`
//! dimensions are stored row-major: the site with coordinates
//! `(x_0, ..., x_{d-1})` has index `sum_k x_k * L^(d-1-k)`, so the last
//! coordinate varies fastest. Neighbour lists are precomputed in compressed
//! sparse row form; for hypercubic lattices every site lists `+e_k` before
//! `-e_k` for each axis `k` in order.
//!
//! Small explicit graphs (a single free site, an open two-site pair, the
//! occupied clusters used by the bound checks) share the same type.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Hypercubic { dim: usize, len: usize },
    Graph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeGeometry {
    shape: Shape,
    site_count: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl LatticeGeometry {
    /// Periodic hypercubic lattice, `d` in {2, 3}, `L >= 3`.
    pub fn build(dim: usize, len: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Parameter(format!("dimension must be 2 or 3, got {dim}")));
        }
        if len < 3 {
            return Err(Error::Parameter(format!("linear size must be at least 3, got {len}")));
        }
        let site_count = len.pow(dim as u32);
        let mut offsets = Vec::with_capacity(site_count + 1);
        let mut neighbors = Vec::with_capacity(site_count * 2 * dim);
        let mut coords = vec![0usize; dim];
        for site in 0..site_count {
            offsets.push(neighbors.len());
            decode(site, len, &mut coords);
            for axis in 0..dim {
                let stride = len.pow((dim - 1 - axis) as u32);
                let x = coords[axis];
                let up = (x + 1) % len;
                let down = (x + len - 1) % len;
                neighbors.push(site - x * stride + up * stride);
                neighbors.push(site - x * stride + down * stride);
            }
        }
        offsets.push(neighbors.len());
        Ok(Self { shape: Shape::Hypercubic { dim, len }, site_count, offsets, neighbors })
    }

    /// Explicit undirected graph on `site_count` vertices.
    pub fn from_edges(site_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); site_count];
        for &(a, b) in edges {
            if a >= site_count || b >= site_count {
                return Err(Error::Parameter(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::Parameter(format!("self loop at site {a}")));
            }
            if adj[a].contains(&b) {
                return Err(Error::Parameter(format!("duplicate edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut offsets = Vec::with_capacity(site_count + 1);
        let mut neighbors = Vec::new();
        for list in adj {
            offsets.push(neighbors.len());
            neighbors.extend(list);
        }
        offsets.push(neighbors.len());
        Ok(Self { shape: Shape::Graph, site_count, offsets, neighbors })
    }

    /// Single site with no bonds.
    pub fn single_site() -> Self {
        Self::from_edges(1, &[]).expect("valid")
    }

    /// Two sites joined by one bond, no periodic wrap.
    pub fn open_pair() -> Self {
        Self::from_edges(2, &[(0, 1)]).expect("valid")
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn dim(&self) -> Option<usize> {
        match self.shape {
            Shape::Hypercubic { dim, .. } => Some(dim),
            Shape::Graph => None,
        }
    }

    pub fn len(&self) -> Option<usize> {
        match self.shape {
            Shape::Hypercubic { len, .. } => Some(len),
            Shape::Graph => None,
        }
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    #[inline]
    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.neighbors[self.offsets[site]..self.offsets[site + 1]]
    }

    pub fn bond_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Every unordered nearest-neighbour pair exactly once, as `(i, j)` with
    /// `i < j`.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.bond_count());
        for i in 0..self.site_count {
            for &j in self.neighbors(i) {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Even/odd sublattices of a hypercubic lattice with even `L`.
    pub fn checkerboard_partition(&self) -> Result<[Vec<usize>; 2]> {
        let (dim, len) = match self.shape {
            Shape::Hypercubic { dim, len } => (dim, len),
            Shape::Graph => {
                return Err(Error::Parameter("checkerboard needs a hypercubic lattice".into()))
            }
        };
        if len % 2 != 0 {
            return Err(Error::Parameter(format!("checkerboard needs even L, got {len}")));
        }
        let mut sets = [Vec::new(), Vec::new()];
        let mut coords = vec![0; dim];
        for site in 0..self.site_count {
            decode(site, len, &mut coords);
            sets[coords.iter().sum::<usize>() % 2].push(site);
        }
        Ok(sets)
    }

    /// Partition of the sites into independent sets, used as the sweep
    /// order. Even hypercubic lattices use the checkerboard; anything else
    /// falls back to a greedy colouring in index order.
    pub fn color_classes(&self) -> Vec<Vec<usize>> {
        if let Ok([a, b]) = self.checkerboard_partition() {
            return vec![a, b];
        }
        let mut color = vec![usize::MAX; self.site_count];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for site in 0..self.site_count {
            let mut c = 0;
            while self.neighbors(site).iter().any(|&j| color[j] == c) {
                c += 1;
            }
            color[site] = c;
            if classes.len() <= c {
                classes.resize_with(c + 1, Vec::new);
            }
            classes[c].push(site);
        }
        classes
    }

    pub fn coords(&self, site: usize) -> Option<Vec<usize>> {
        match self.shape {
            Shape::Hypercubic { dim, len } => {
                let mut c = vec![0; dim];
                decode(site, len, &mut c);
                Some(c)
            }
            Shape::Graph => None,
        }
    }

    pub fn index(&self, coords: &[usize]) -> Option<usize> {
        match self.shape {
            Shape::Hypercubic { dim, len } if coords.len() == dim => {
                Some(coords.iter().fold(0, |acc, &x| acc * len + x % len))
            }
            _ => None,
        }
    }

    /// Site permutations generated by translations, axis permutations and
    /// axis reflections. Graphs report only the identity.
    pub fn symmetries(&self) -> Vec<Vec<usize>> {
        let (dim, len) = match self.shape {
            Shape::Hypercubic { dim, len } => (dim, len),
            Shape::Graph => return vec![(0..self.site_count).collect()],
        };
        let mut axis_perms = Vec::new();
        permutations(&mut (0..dim).collect::<Vec<_>>(), 0, &mut axis_perms);
        let mut out = Vec::new();
        let mut coords = vec![0; dim];
        let mut image = vec![0; dim];
        for shift in 0..self.site_count {
            let mut t = vec![0; dim];
            decode(shift, len, &mut t);
            for perm in &axis_perms {
                for flips in 0..(1usize << dim) {
                    let map: Vec<usize> = (0..self.site_count)
                        .map(|site| {
                            decode(site, len, &mut coords);
                            for k in 0..dim {
                                let mut x = coords[perm[k]];
                                if flips >> k & 1 == 1 {
                                    x = (len - x) % len;
                                }
                                image[k] = (x + t[k]) % len;
                            }
                            image.iter().fold(0, |acc, &x| acc * len + x)
                        })
                        .collect();
                    out.push(map);
                }
            }
        }
        out
    }

    /// Graph induced by `sites`; vertex `k` of the result is `sites[k]`.
    pub fn induced(&self, sites: &[usize]) -> LatticeGeometry {
        let mut local = vec![usize::MAX; self.site_count];
        for (k, &s) in sites.iter().enumerate() {
            local[s] = k;
        }
        let mut edges = Vec::new();
        for (k, &s) in sites.iter().enumerate() {
            for &j in self.neighbors(s) {
                let l = local[j];
                if l != usize::MAX && k < l {
                    edges.push((k, l));
                }
            }
        }
        LatticeGeometry::from_edges(sites.len(), &edges).expect("induced subgraph is simple")
    }
}

fn decode(mut site: usize, len: usize, coords: &mut [usize]) {
    for c in coords.iter_mut().rev() {
        *c = site % len;
        site /= len;
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}
