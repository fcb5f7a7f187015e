use std::collections::HashMap;
use std::sync::Arc;

use super::SurfaceError;
use crate::linalg::solve;
use crate::scalar::Scalar;

/// A finite 2-complex with a marked family of `2g` closed basis walks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nerve {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    triangles: Vec<[usize; 3]>,
    basis_walks: Vec<Vec<usize>>,
}

impl Nerve {
    pub fn new(
        vertices: usize,
        edges: Vec<(usize, usize)>,
        triangles: Vec<[usize; 3]>,
        basis_walks: Vec<Vec<usize>>,
    ) -> Result<Self, SurfaceError> {
        let invalid = |msg: String| SurfaceError::InvalidNerve(msg);
        let mut edge_index = HashMap::new();
        let mut sorted = Vec::with_capacity(edges.len());
        for (i, j) in edges {
            if i == j || i >= vertices || j >= vertices {
                return Err(invalid(format!("bad edge ({i}, {j})")));
            }
            let e = (i.min(j), i.max(j));
            if edge_index.insert(e, sorted.len()).is_some() {
                return Err(invalid(format!("duplicate edge ({i}, {j})")));
            }
            sorted.push(e);
        }
        let nerve = Nerve {
            vertices,
            edges: sorted,
            edge_index,
            triangles,
            basis_walks,
        };
        for t in &nerve.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                if nerve.edge(a, b).is_none() {
                    return Err(invalid(format!("triangle ({}, {}, {}) uses a missing edge", t[0], t[1], t[2])));
                }
            }
        }
        if nerve.basis_walks.len() < 4 || !nerve.basis_walks.len().is_multiple_of(2) {
            return Err(invalid(format!("need 2g >= 4 basis walks, got {}", nerve.basis_walks.len())));
        }
        for w in &nerve.basis_walks {
            nerve.check_walk(w)?;
        }
        Ok(nerve)
    }

    /// Subdivided `4g`-gon with sides `a_1 b_1 a_1⁻¹ b_1⁻¹ ...` identified, coned off
    /// through an inner ring so that the result is a simplicial complex.
    ///
    /// Vertex 0 is the polygon vertex; side `a_i` carries vertices
    /// `4(i-1)+1, 4(i-1)+2` and side `b_i` carries `4(i-1)+3, 4(i-1)+4`.
    pub fn polygon(genus: usize) -> Self {
        let a = |i: usize| (4 * (i - 1) + 1, 4 * (i - 1) + 2);
        let b = |i: usize| (4 * (i - 1) + 3, 4 * (i - 1) + 4);
        let mut boundary: Vec<usize> = Vec::with_capacity(12 * genus);
        for i in 1..=genus {
            let (a1, a2) = a(i);
            let (b1, b2) = b(i);
            boundary.extend([0, a1, a2, 0, b1, b2, 0, a2, a1, 0, b2, b1]);
        }
        let m = boundary.len();
        let ring = |j: usize| 1 + 4 * genus + (j % m);
        let center = 1 + 4 * genus + m;
        let mut triangles = Vec::with_capacity(3 * m);
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut add_edge = |x: usize, y: usize, edges: &mut Vec<(usize, usize)>| {
            let e = (x.min(y), x.max(y));
            if seen.insert(e) {
                edges.push(e);
            }
        };
        for j in 0..m {
            let v0 = boundary[j];
            let v1 = boundary[(j + 1) % m];
            let (r0, r1) = (ring(j), ring(j + 1));
            triangles.push([v0, v1, r0]);
            triangles.push([v1, r1, r0]);
            triangles.push([center, r0, r1]);
            for (x, y) in [(v0, v1), (v0, r0), (v1, r0), (v1, r1), (r0, r1), (center, r0)] {
                add_edge(x, y, &mut edges);
            }
        }
        let mut walks = Vec::with_capacity(2 * genus);
        for i in 1..=genus {
            let (a1, a2) = a(i);
            walks.push(vec![0, a1, a2, 0]);
        }
        for i in 1..=genus {
            let (b1, b2) = b(i);
            walks.push(vec![0, b1, b2, 0]);
        }
        Nerve::new(center + 1, edges, triangles, walks).expect("polygon nerve is valid")
    }

    pub fn genus(&self) -> usize {
        self.basis_walks.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn basis_walks(&self) -> &[Vec<usize>] {
        &self.basis_walks
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Edge index and orientation sign (+1 when `i < j`).
    pub fn edge(&self, i: usize, j: usize) -> Option<(usize, i64)> {
        let key = (i.min(j), i.max(j));
        self.edge_index
            .get(&key)
            .map(|&e| (e, if i < j { 1 } else { -1 }))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    fn check_walk(&self, walk: &[usize]) -> Result<(), SurfaceError> {
        if walk.is_empty() || walk.first() != walk.last() {
            return Err(SurfaceError::WalkNotClosed);
        }
        for w in walk.windows(2) {
            if self.edge(w[0], w[1]).is_none() {
                return Err(SurfaceError::WalkNotInNerve { from: w[0], to: w[1] });
            }
        }
        Ok(())
    }
}

/// Constant ℂ-valued 1-cocycle `(a_ij)` on a nerve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NerveCocycle {
    nerve: Arc<Nerve>,
    /// `a_ij` for each stored edge `(i, j)`, `i < j`.
    labels: Vec<Scalar>,
}

impl NerveCocycle {
    pub fn new(nerve: Arc<Nerve>, labels: Vec<Scalar>) -> Result<Self, SurfaceError> {
        if labels.len() != nerve.edges.len() {
            let (i, j) = nerve.edges[labels.len().min(nerve.edges.len().saturating_sub(1))];
            return Err(SurfaceError::MissingLabel(i, j));
        }
        let c = NerveCocycle { nerve, labels };
        for t in &c.nerve.triangles {
            let lhs = &c.label(t[0], t[1]) + &c.label(t[1], t[2]);
            if lhs != c.label(t[0], t[2]) {
                return Err(SurfaceError::NotACocycle(t[0], t[1], t[2]));
            }
        }
        Ok(c)
    }

    /// Builds from labels on oriented edges; any orientation may be given.
    pub fn from_oriented(nerve: Arc<Nerve>, labels: &[((usize, usize), Scalar)]) -> Result<Self, SurfaceError> {
        let mut out: Vec<Option<Scalar>> = vec![None; nerve.edges.len()];
        for ((i, j), v) in labels {
            let (e, sign) = nerve
                .edge(*i, *j)
                .ok_or(SurfaceError::WalkNotInNerve { from: *i, to: *j })?;
            out[e] = Some(if sign > 0 { v.clone() } else { -v });
        }
        let mut vals = Vec::with_capacity(out.len());
        for (e, v) in out.into_iter().enumerate() {
            let (i, j) = nerve.edges[e];
            vals.push(v.ok_or(SurfaceError::MissingLabel(i, j))?);
        }
        NerveCocycle::new(nerve, vals)
    }

    pub fn zero(nerve: Arc<Nerve>) -> Self {
        let n = nerve.edges.len();
        NerveCocycle {
            nerve,
            labels: vec![Scalar::zero(); n],
        }
    }

    pub fn nerve(&self) -> &Arc<Nerve> {
        &self.nerve
    }

    /// `a_ij`, antisymmetric in `(i, j)`; panics if `(i, j)` is not an edge.
    pub fn label(&self, i: usize, j: usize) -> Scalar {
        let (e, sign) = self.nerve.edge(i, j).expect("edge of the nerve");
        if sign > 0 {
            self.labels[e].clone()
        } else {
            -&self.labels[e]
        }
    }

    pub fn add(&self, other: &NerveCocycle) -> NerveCocycle {
        NerveCocycle {
            nerve: self.nerve.clone(),
            labels: self.labels.iter().zip(&other.labels).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Sum of `a_{i_p i_{p+1}}` along a closed walk.
pub fn period(c: &NerveCocycle, walk: &[usize]) -> Result<Scalar, SurfaceError> {
    c.nerve.check_walk(walk)?;
    Ok(walk.windows(2).map(|w| c.label(w[0], w[1])).sum())
}

/// `(P_A, P_B)` over the basis walks supplied.
pub fn period_map_p(c: &NerveCocycle, basis_walks: &[Vec<usize>]) -> Result<Vec<Scalar>, SurfaceError> {
    basis_walks.iter().map(|w| period(c, w)).collect()
}

/// The cocycle `a_ij = b_j - b_i`.
pub fn coboundary(nerve: Arc<Nerve>, b: &[Scalar]) -> NerveCocycle {
    let labels = nerve.edges.iter().map(|&(i, j)| &b[j] - &b[i]).collect();
    NerveCocycle { nerve, labels }
}

/// A cocycle whose periods along the nerve's basis walks are `periods`.
pub fn cocycle_with_periods(nerve: Arc<Nerve>, periods: &[Scalar]) -> Result<NerveCocycle, SurfaceError> {
    let walks = nerve.basis_walks.len();
    if periods.len() != walks {
        return Err(SurfaceError::WrongTupleSize {
            expected: walks,
            got: periods.len(),
        });
    }
    let n = nerve.edges.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let put = |row: &mut Vec<Scalar>, i: usize, j: usize, w: i64| {
        let (e, sign) = nerve.edge(i, j).expect("edge");
        row[e] = &row[e] + &Scalar::from_int(sign * w);
    };
    for t in &nerve.triangles {
        let mut row = vec![Scalar::zero(); n];
        put(&mut row, t[0], t[1], 1);
        put(&mut row, t[1], t[2], 1);
        put(&mut row, t[0], t[2], -1);
        rows.push(row);
        rhs.push(Scalar::zero());
    }
    for (w, p) in nerve.basis_walks.iter().zip(periods) {
        let mut row = vec![Scalar::zero(); n];
        for s in w.windows(2) {
            put(&mut row, s[0], s[1], 1);
        }
        rows.push(row);
        rhs.push(p.clone());
    }
    let labels = solve(&rows, &rhs, n).ok_or(SurfaceError::PeriodsNotRealizable)?;
    NerveCocycle::new(nerve, labels)
}
