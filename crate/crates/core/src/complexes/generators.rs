//! Generators for the shipped test spaces.

use super::model::{build, Budget, SimplicialModel};
use super::product::product;
use super::simplex::SimplexRef;
use super::sset::SimplicialSet;
use crate::error::{Error, Result};

fn nd(dim: usize, id: u32) -> SimplexRef {
    SimplexRef::nondegenerate(dim, id)
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::Unsupported(format!("cyclic order {n} must be at least 2")));
    }
    if n > u16::MAX as u64 {
        return Err(Error::Unsupported(format!("cyclic order {n} is too large")));
    }
    Ok(())
}

fn digits(mut code: u64, n: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0; len];
    for x in out.iter_mut() {
        *x = code % n;
        code /= n;
    }
    out
}

fn encode(ds: &[u64], n: u64) -> u64 {
    ds.iter().rev().fold(0, |acc, &x| acc * n + x)
}

/// Bar construction `W̄(Z/n)`: a `d`-simplex is `[g_1|…|g_d]`.
struct Bar {
    n: u64,
}

impl SimplicialModel for Bar {
    type Elem = u64;

    fn candidates(&self, d: usize) -> Vec<u64> {
        (0..self.candidate_count(d)).collect()
    }

    fn candidate_count(&self, d: usize) -> u64 {
        self.n.checked_pow(d as u32).unwrap_or(u64::MAX)
    }

    fn face(&self, d: usize, x: &u64, i: usize) -> u64 {
        let mut g = digits(*x, self.n, d);
        if i == 0 {
            g.remove(0);
        } else if i == d {
            g.pop();
        } else {
            g[i - 1] = (g[i - 1] + g[i]) % self.n;
            g.remove(i);
        }
        encode(&g, self.n)
    }

    fn degeneracy(&self, d: usize, x: &u64, i: usize) -> u64 {
        let mut g = digits(*x, self.n, d);
        g.insert(i, 0);
        encode(&g, self.n)
    }
}

/// `W̄(Z/n)` through dimension `dmax`, a model of `K(Z/n, 1)`.
pub fn wbar_cyclic(n: u64, dmax: usize) -> Result<SimplicialSet> {
    wbar_cyclic_with(n, dmax, Budget::default())
}

pub fn wbar_cyclic_with(n: u64, dmax: usize, budget: Budget) -> Result<SimplicialSet> {
    check_n(n)?;
    build(&Bar { n }, dmax, budget, format!("wbar:{n}:{dmax}"))
}

/// Normalized `Z/n`-valued 2-cocycles on the standard simplices.
///
/// A `d`-simplex is determined by the values `f(0,j,k)`, `0 < j < k <= d`;
/// the cocycle condition gives `f(a,b,c) = f(0,b,c) - f(0,a,c) + f(0,a,b)`.
struct Cocycles2 {
    n: u64,
}

fn pair(j: usize, k: usize) -> usize {
    (k - 1) * (k - 2) / 2 + (j - 1)
}

fn pairs(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

impl Cocycles2 {
    fn eval(&self, f: &[u64], a: usize, b: usize, c: usize) -> u64 {
        if a == 0 {
            f[pair(b, c)]
        } else {
            (f[pair(b, c)] + self.n - f[pair(a, c)] + f[pair(a, b)]) % self.n
        }
    }
}

impl SimplicialModel for Cocycles2 {
    type Elem = u64;

    fn candidates(&self, d: usize) -> Vec<u64> {
        (0..self.candidate_count(d)).collect()
    }

    fn candidate_count(&self, d: usize) -> u64 {
        u32::try_from(pairs(d)).ok().and_then(|p| self.n.checked_pow(p)).unwrap_or(u64::MAX)
    }

    fn face(&self, d: usize, x: &u64, i: usize) -> u64 {
        let f = digits(*x, self.n, pairs(d));
        let up = |u: usize| if u >= i { u + 1 } else { u };
        let mut g = vec![0; pairs(d - 1)];
        for k in 2..d {
            for j in 1..k {
                g[pair(j, k)] = self.eval(&f, up(0), up(j), up(k));
            }
        }
        encode(&g, self.n)
    }

    fn degeneracy(&self, d: usize, x: &u64, i: usize) -> u64 {
        let f = digits(*x, self.n, pairs(d));
        let down = |u: usize| if u > i { u - 1 } else { u };
        let mut g = vec![0; pairs(d + 1)];
        for k in 2..=d + 1 {
            for j in 1..k {
                let (b, c) = (down(j), down(k));
                if b != 0 && b != c {
                    g[pair(j, k)] = f[pair(b, c)];
                }
            }
        }
        encode(&g, self.n)
    }
}

/// A model of `K(Z/n, 2)` through dimension `dmax`: the simplicial set of
/// normalized 2-cocycles, isomorphic to `W̄W̄(Z/n)`.
pub fn em_space_2(n: u64, dmax: usize) -> Result<SimplicialSet> {
    em_space_2_with(n, dmax, Budget::default())
}

pub fn em_space_2_with(n: u64, dmax: usize, budget: Budget) -> Result<SimplicialSet> {
    check_n(n)?;
    build(&Cocycles2 { n }, dmax, budget, format!("em2:{n}:{dmax}"))
}

/// `M(Z/n, 1)`: a polygon with `n` triangles around a centre `c`, all outer
/// edges glued to one loop `e` at `v`.
pub fn moore_polygon(n: u64) -> Result<SimplicialSet> {
    check_n(n)?;
    let n32 = n as u32;
    let (c, v) = (0, 1);
    let mut edges = vec![nd(0, v), nd(0, v)];
    for _ in 0..n32 {
        edges.extend([nd(0, v), nd(0, c)]);
    }
    let mut triangles = Vec::new();
    for i in 0..n32 {
        triangles.extend([nd(1, 0), nd(1, 1 + (i + 1) % n32), nd(1, 1 + i)]);
    }
    SimplicialSet::from_faces(format!("moore:{n}"), vec![2, n as usize + 1, n as usize], vec![vec![], edges, triangles])
}

pub fn point() -> SimplicialSet {
    points(1).expect("one point").with_label("point")
}

pub fn points(k: usize) -> Result<SimplicialSet> {
    if k == 0 {
        return Err(Error::Unsupported("empty simplicial set".into()));
    }
    SimplicialSet::from_faces(format!("points:{k}"), vec![k], vec![vec![]])
}

/// Boundary of a triangle.
pub fn circle() -> SimplicialSet {
    let edges = vec![nd(0, 1), nd(0, 0), nd(0, 2), nd(0, 0), nd(0, 2), nd(0, 1)];
    SimplicialSet::from_faces("circle", vec![3, 3], vec![vec![], edges]).expect("valid circle")
}

/// One vertex and one loop.
pub fn circle_min() -> SimplicialSet {
    SimplicialSet::from_faces("circle-min", vec![1, 1], vec![vec![], vec![nd(0, 0), nd(0, 0)]]).expect("valid circle")
}

/// `circle-min × circle-min`: one vertex, three edges, two triangles.
pub fn torus() -> SimplicialSet {
    product(&[&circle_min(), &circle_min()], None, Budget::default())
        .expect("small product")
        .with_label("torus")
}

/// Unreduced suspension: two cones on `x` with apexes `N` and `S` placed last.
pub fn suspension(x: &SimplicialSet) -> Result<SimplicialSet> {
    if x.is_empty() {
        return Err(Error::Unsupported("suspension of the empty set".into()));
    }
    let top = x.dim() + 1;
    let old = |d: usize| x.count(d);
    let counts: Vec<usize> = (0..=top)
        .map(|d| old(d) + if d == 0 { 2 } else { 2 * old(d - 1) })
        .collect();
    let apex = |d: usize, pole: usize| -> u32 { (old(d) + pole * if d == 0 { 1 } else { old(d - 1) }) as u32 };
    let cone = |r: SimplexRef, pole: usize| -> SimplexRef {
        let base = r.base_dim();
        SimplexRef { dim: r.dim + 1, id: apex(base + 1, pole) + r.id, mask: r.mask }
    };
    let mut faces = vec![Vec::new()];
    for d in 1..=top {
        let mut table = Vec::with_capacity(counts[d] * (d + 1));
        for id in 0..old(d) as u32 {
            table.extend_from_slice(x.faces(d, id));
        }
        for pole in 0..2 {
            for id in 0..old(d - 1) as u32 {
                for i in 0..d {
                    if d == 1 {
                        table.push(nd(0, apex(0, pole)));
                    } else {
                        table.push(cone(x.face_of(d - 1, id, i), pole));
                    }
                }
                table.push(nd(d - 1, id));
            }
        }
        faces.push(table);
    }
    SimplicialSet::from_faces(format!("suspension({})", x.label()), counts, faces)
}
