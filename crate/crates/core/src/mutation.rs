//! Combinatorial mutations of Fano polygons and their duals.

use crate::fano::{self, FanoError, WeightTriple};
use crate::geom::{
    self, height_range, intersect_half_planes, is_primitive, minkowski_difference, minkowski_sum,
    HalfPlane, Polygon, RatMatrix, Vec2,
};
use crate::rational::{rat, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MutationError {
    #[error("polygon is not Fano")]
    NotFano,
    #[error("height function {0} is not a primitive lattice vector")]
    NotPrimitive(Box<Vec2>),
    #[error("invalid factor: {0}")]
    InvalidFactor(String),
    #[error("heights exceed 64-bit range")]
    Overflow,
    #[error(transparent)]
    Fano(#[from] FanoError),
}

/// A height function, a factor in its kernel and the slab polytopes at
/// negative heights. A `None` slab stands for the empty polytope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationData {
    pub w: Vec2,
    #[serde(rename = "F")]
    pub factor: Polygon,
    #[serde(rename = "Gh")]
    pub slabs: BTreeMap<i64, Option<Polygon>>,
}

/// Primitive generator of the kernel of `w`, chosen as the quarter turn
/// `(-w2, w1)`.
pub fn factor_direction(w: &Vec2) -> Vec2 {
    w.perp()
}

impl MutationData {
    /// The factor `conv(0, t * f0)` along [`factor_direction`].
    pub fn standard_factor(w: &Vec2, t: u64) -> Polygon {
        let end = factor_direction(w).scale(&Rational::from_integer(t.into()));
        Polygon::hull(vec![Vec2::zero(), end])
    }

    /// Lattice length of the factor.
    pub fn factor_length(&self) -> BigInt {
        match self.factor.vertices() {
            [a, b] => geom::primitivize(&(b - a))
                .ok()
                .map(|d| {
                    let diff = b - a;
                    if d.x.is_zero() {
                        (&diff.y / &d.y).to_integer()
                    } else {
                        (&diff.x / &d.x).to_integer()
                    }
                })
                .unwrap_or_default(),
            _ => BigInt::zero(),
        }
    }
}

fn integer_heights(p: &Polygon, w: &Vec2) -> Result<(i64, i64), MutationError> {
    let (lo, hi) = height_range(p, w);
    let conv = |r: &Rational| r.to_integer().to_i64().ok_or(MutationError::Overflow);
    Ok((conv(&lo)?, conv(&hi)?))
}

fn vertices_at<'a>(p: &'a Polygon, w: &'a Vec2, h: i64) -> impl Iterator<Item = &'a Vec2> {
    let hq = rat(h);
    p.vertices().iter().filter(move |v| w.pair(v) == hq)
}

fn check_inputs(p: &Polygon, w: &Vec2) -> Result<(), MutationError> {
    if !fano::is_fano(p) {
        return Err(MutationError::NotFano);
    }
    if !is_primitive(w) {
        return Err(MutationError::NotPrimitive(Box::new(w.clone())));
    }
    Ok(())
}

/// Slab data for `conv(0, t f0)` with maximal `G_h`, or `None` if some
/// vertex at a negative height does not fit.
fn maximal_data(p: &Polygon, w: &Vec2, t: u64) -> Result<Option<MutationData>, MutationError> {
    let (h_min, _) = integer_heights(p, w)?;
    let factor = MutationData::standard_factor(w, t);
    let mut slabs = BTreeMap::new();
    for h in h_min..0 {
        let stretched = factor.scale(&rat(-h));
        let g =
            geom::slice(p, w, &BigInt::from(h)).and_then(|s| minkowski_difference(&s, &stretched));
        let verts: Vec<&Vec2> = vertices_at(p, w, h).collect();
        if !verts.is_empty() {
            let Some(g) = &g else { return Ok(None) };
            let reach = minkowski_sum(g, &stretched);
            if !verts.iter().all(|v| reach.contains(v)) {
                return Ok(None);
            }
        }
        slabs.insert(h, g);
    }
    Ok(Some(MutationData {
        w: w.clone(),
        factor,
        slabs,
    }))
}

/// Mutation data for a given `w` and factor length `t`, with maximal slabs.
pub fn mutation_data(p: &Polygon, w: &Vec2, t: u64) -> Result<MutationData, MutationError> {
    check_inputs(p, w)?;
    maximal_data(p, w, t)?
        .ok_or_else(|| MutationError::InvalidFactor(format!("no factor of length {t} for w = {w}")))
}

/// All nontrivial factors `conv(0, t f0)`, `t = 1, 2, ...`, for the height
/// function `w`. Once some `t` fails every larger one fails too.
pub fn find_factors(p: &Polygon, w: &Vec2) -> Result<Vec<MutationData>, MutationError> {
    check_inputs(p, w)?;
    let mut out = Vec::new();
    for t in 1u64.. {
        match maximal_data(p, w, t)? {
            Some(md) => out.push(md),
            None => break,
        }
    }
    Ok(out)
}

/// Checks the sandwich condition of every slab against `p`.
pub fn validate(p: &Polygon, md: &MutationData) -> Result<(), MutationError> {
    let invalid = |msg: String| Err(MutationError::InvalidFactor(msg));
    if !is_primitive(&md.w) {
        return Err(MutationError::NotPrimitive(Box::new(md.w.clone())));
    }
    if !md.factor.is_lattice() || md.factor.dim() > 1 {
        return invalid("factor must be a lattice point or segment".into());
    }
    if md.factor.vertices().iter().any(|v| !md.w.pair(v).is_zero()) {
        return invalid("factor is not orthogonal to w".into());
    }
    let (h_min, _) = integer_heights(p, &md.w)?;
    if let Some((h, _)) = md.slabs.iter().find(|(&h, _)| h >= 0 || h < h_min) {
        return invalid(format!("slab at height {h} outside [{h_min}, -1]"));
    }
    for h in h_min..0 {
        let stretched = md.factor.scale(&rat(-h));
        let slab = md.slabs.get(&h).cloned().flatten();
        let verts: Vec<&Vec2> = vertices_at(p, &md.w, h).collect();
        let Some(g) = slab else {
            if verts.is_empty() {
                continue;
            }
            return invalid(format!("missing slab at height {h}"));
        };
        if g.vertices().iter().any(|v| md.w.pair(v) != rat(h)) {
            return invalid(format!("slab at height {h} lies off its level line"));
        }
        let reach = minkowski_sum(&g, &stretched);
        let fits =
            geom::slice(p, &md.w, &BigInt::from(h)).is_some_and(|s| s.contains_polygon(&reach));
        if !fits {
            return invalid(format!("slab at height {h} overflows the lattice slice"));
        }
        if !verts.iter().all(|v| reach.contains(v)) {
            return invalid(format!("slab at height {h} misses a vertex"));
        }
    }
    Ok(())
}

/// The mutation hull: shrunken slabs below height zero, slices fattened by
/// `hF` at heights `h >= 0`.
pub fn mutate(p: &Polygon, md: &MutationData) -> Result<Polygon, MutationError> {
    if !fano::is_fano(p) {
        return Err(MutationError::NotFano);
    }
    mutation_hull(p, md)
}

/// [`mutate`] for any lattice polygon, Fano or not; used for Newton
/// polytopes.
pub fn mutation_hull(p: &Polygon, md: &MutationData) -> Result<Polygon, MutationError> {
    if !p.is_lattice() {
        return Err(MutationError::InvalidFactor(
            "polygon is not a lattice polygon".into(),
        ));
    }
    validate(p, md)?;
    let (_, h_max) = integer_heights(p, &md.w)?;
    let mut points: Vec<Vec2> = md
        .slabs
        .values()
        .flatten()
        .flat_map(|g| g.vertices().iter().cloned())
        .collect();
    for h in 0..=h_max {
        if let Some(s) = geom::slice(p, &md.w, &BigInt::from(h)) {
            let fattened = if h == 0 {
                s
            } else {
                minkowski_sum(&s, &md.factor.scale(&rat(h)))
            };
            points.extend(fattened.vertices().iter().cloned());
        }
    }
    Ok(Polygon::hull(points))
}

/// The piecewise-linear map `u -> u - u_min w` on the dual side, where
/// `u_min` is the minimum of `u` over the factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLMap {
    pub w: Vec2,
    pub factor_vertices: Vec<Vec2>,
}

impl PLMap {
    pub fn new(md: &MutationData) -> Self {
        Self {
            w: md.w.clone(),
            factor_vertices: md.factor.vertices().to_vec(),
        }
    }

    pub fn apply(&self, u: &Vec2) -> Vec2 {
        let u_min = self
            .factor_vertices
            .iter()
            .map(|v| u.pair(v))
            .min()
            .unwrap_or_else(Rational::zero);
        u - &self.w.scale(&u_min)
    }

    /// Linear part `u -> u - <u, v> w` on the region where `v` minimises.
    fn shear(&self, v: &Vec2) -> RatMatrix {
        let (w, one, zero) = (&self.w, rat(1), Rational::zero());
        let id = |i: usize, j: usize| if i == j { one.clone() } else { zero.clone() };
        let wc = [&w.x, &w.y];
        let vc = [&v.x, &v.y];
        RatMatrix(std::array::from_fn(|i| {
            std::array::from_fn(|j| id(i, j) - wc[i] * vc[j])
        }))
    }
}

/// Image of a convex polygon under the piecewise-linear map, as the hull of
/// the images of its linearity pieces.
pub fn dual_map(pm: &PLMap, q: &Polygon) -> Polygon {
    if pm.factor_vertices.is_empty() {
        return q.clone();
    }
    let mut points = Vec::new();
    for (a, va) in pm.factor_vertices.iter().enumerate() {
        let mut cs = q.constraints();
        for (b, vb) in pm.factor_vertices.iter().enumerate() {
            if a != b {
                cs.push(HalfPlane::new(va - vb, Rational::zero()));
            }
        }
        if let Some(piece) = intersect_half_planes(&cs) {
            points.extend(piece.map_linear(&pm.shear(va)).vertices().iter().cloned());
        }
    }
    Polygon::hull(points)
}

/// Index of the unique vertex at maximal height, if there is exactly one.
pub fn apex_index(p: &Polygon, w: &Vec2) -> Option<usize> {
    let (_, hi) = height_range(p, w);
    let mut at_top = p
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| w.pair(v) == hi)
        .map(|(i, _)| i);
    let first = at_top.next()?;
    at_top.next().is_none().then_some(first)
}

/// Primitive inner normals of the edges of a full-dimensional polygon.
///
/// A nontrivial factor needs the minimum height to be attained on an edge,
/// so these are the only height functions worth scanning.
pub fn edge_normals(p: &Polygon) -> Vec<Vec2> {
    if p.dim() < 2 {
        return Vec::new();
    }
    p.edges()
        .filter_map(|(a, b)| {
            let d = b - a;
            let den = crate::rational::lcm_of_denominators([&d.x, &d.y]);
            geom::primitivize(&d.perp().scale(&Rational::from_integer(den))).ok()
        })
        .collect()
}

/// Which height functions a mutation graph scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightScan {
    /// Every edge normal; complete for finding nontrivial factors.
    EdgeNormals,
    /// Edge normals with both coordinates at most the bound in absolute
    /// value.
    Box(u64),
}

impl HeightScan {
    /// Height functions to try on `p`, sorted and deduplicated.
    pub fn candidates(&self, p: &Polygon) -> Vec<Vec2> {
        let mut ws = edge_normals(p);
        if let HeightScan::Box(bound) = self {
            let b = Rational::from_integer((*bound).into());
            ws.retain(|w| w.x.abs() <= b && w.y.abs() <= b);
        }
        ws.sort();
        ws.dedup();
        ws
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphNode {
    pub id: usize,
    pub depth: usize,
    pub representative: Polygon,
    pub weights: WeightTriple,
    pub multiplicity: u64,
}

/// One mutation of a node's representative. `data` refers to the
/// representative of `from`; `apex` indexes its vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub t: u64,
    pub apex: Option<usize>,
    pub data: MutationData,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphMetadata {
    pub depth: usize,
    pub scan: HeightScan,
    /// Mutations whose result was not a triangle; they are not nodes.
    pub non_triangle_results: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MutationGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub metadata: GraphMetadata,
}

/// Breadth-first exploration of triangles reachable by mutation, up to
/// `GL_2(Z)`. Node ids follow discovery order, which is deterministic.
pub fn mutation_graph(
    p: &Polygon,
    depth: usize,
    scan: HeightScan,
) -> Result<MutationGraph, MutationError> {
    let fake = fano::fake_plane(p)?;
    let root = geom::gl2_normal_form(p).ok_or(MutationError::NotFano)?;
    let mut index: HashMap<Polygon, usize> = HashMap::from([(root.clone(), 0)]);
    let mut nodes = vec![GraphNode {
        id: 0,
        depth: 0,
        representative: root,
        weights: fake.weights,
        multiplicity: fake.multiplicity,
    }];
    let mut edges = Vec::new();
    let mut non_triangle_results = 0;
    let mut frontier = vec![0usize];
    for level in 0..depth {
        let mut next = Vec::new();
        for &from in &frontier {
            let rep = nodes[from].representative.clone();
            for w in scan.candidates(&rep) {
                for md in find_factors(&rep, &w)? {
                    let image = mutate(&rep, &md)?;
                    if image.len() != 3 {
                        non_triangle_results += 1;
                        continue;
                    }
                    let canon = geom::gl2_normal_form(&image).ok_or(MutationError::NotFano)?;
                    let to = match index.get(&canon) {
                        Some(&id) => id,
                        None => {
                            let id = nodes.len();
                            let fake = fano::fake_plane(&canon)?;
                            index.insert(canon.clone(), id);
                            nodes.push(GraphNode {
                                id,
                                depth: level + 1,
                                representative: canon,
                                weights: fake.weights,
                                multiplicity: fake.multiplicity,
                            });
                            next.push(id);
                            id
                        }
                    };
                    let t = md.factor_length().to_u64().ok_or(MutationError::Overflow)?;
                    edges.push(GraphEdge {
                        from,
                        to,
                        t,
                        apex: apex_index(&rep, &w),
                        data: md,
                    });
                }
            }
        }
        frontier = next;
    }
    Ok(MutationGraph {
        nodes,
        edges,
        metadata: GraphMetadata {
            depth,
            scan,
            non_triangle_results,
        },
    })
}
