//! Half-relator loops, cutsets and their complements, exact component labels
//! in the cover, walls, transversality and separation counts.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::cayley::CayleyBall;
use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::gf2::{Basis, SVec};
use crate::presentation::{HalfRole, HalvedPresentation};
use crate::relhom::{HalfGroup, QVec};
use crate::words::{Letter, Word};

/// Closed vertex path at `k` reading a stored half; first = last vertex.
pub fn sigma_loop(hp: &HalvedPresentation, half: &Word, k: &Word, ball: &CayleyBall) -> Result<Vec<usize>> {
    hp.pair_index(half)?;
    let start = ball
        .locate(k)
        .ok_or_else(|| Error::Range(format!("translate {k} outside the ball")))?;
    let mut path = vec![start];
    let mut v = start;
    for &l in half.letters() {
        v = ball
            .neighbor(v, l)
            .ok_or_else(|| Error::Range(format!("loop {k}·{half} leaves the radius-{} ball", ball.radius)))?;
        path.push(v);
    }
    if v != start {
        return Err(Error::Range(format!("loop {k}·{half} does not close in the ball")));
    }
    Ok(path)
}

/// Connected components of `ball` minus the `removed` vertices.
pub fn components(ball: &CayleyBall, removed: &[bool]) -> Vec<Option<usize>> {
    let mut comp = vec![None; ball.len()];
    let mut next = 0;
    for s in 0..ball.len() {
        if removed[s] || comp[s].is_some() {
            continue;
        }
        comp[s] = Some(next);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for i in 0..2 * ball.n {
                if let Some(u) = ball.neighbor(v, Letter::from_index(i)) {
                    if !removed[u] && comp[u].is_none() {
                        comp[u] = Some(next);
                        queue.push_back(u);
                    }
                }
            }
        }
        next += 1;
    }
    comp
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// One boundary-touching component of the complement of the loops.
    Main,
    /// Two or more boundary-touching components.
    Alternative,
    /// None: the loops' complement does not reach the boundary.
    Degenerate,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutsetA {
    pub pair: usize,
    pub k: Word,
    /// Vertices of the two translated half loops.
    pub loops: Vec<usize>,
    /// Loops plus the complement components that miss the ball boundary.
    pub vertices: Vec<usize>,
    pub branch: Branch,
    /// Components of `ball − loops` that reach the boundary.
    pub infinite_components: usize,
    pub finite_components: usize,
    pub diameter: usize,
    pub max_radius: usize,
    pub finite_certified: bool,
    /// Component id of each ball vertex in `ball − vertices`.
    #[serde(skip)]
    pub comp: Vec<Option<usize>>,
    #[serde(skip)]
    pub member: Vec<bool>,
}

impl CutsetA {
    pub fn component_count(&self) -> usize {
        self.comp.iter().flatten().max().map_or(0, |m| m + 1)
    }
}

/// Largest ball distance from `from` to a vertex marked in `targets`.
fn eccentricity(ball: &CayleyBall, from: usize, targets: &[bool], count: usize) -> usize {
    let mut d: HashMap<usize, usize> = HashMap::from([(from, 0)]);
    let mut queue = VecDeque::from([from]);
    let (mut found, mut far) = (0, 0);
    while let Some(v) = queue.pop_front() {
        if targets[v] {
            found += 1;
            far = d[&v];
            if found == count {
                break;
            }
        }
        for i in 0..2 * ball.n {
            if let Some(u) = ball.neighbor(v, Letter::from_index(i)) {
                if !d.contains_key(&u) {
                    d.insert(u, d[&v] + 1);
                    queue.push_back(u);
                }
            }
        }
    }
    far
}

/// The cutset of pair `i` translated by `k`. Certified when every vertex of
/// it lies within `ball.radius − margin`.
pub fn compute_a(hp: &HalvedPresentation, i: usize, k: &Word, ball: &CayleyBall, margin: usize) -> Result<CutsetA> {
    let (r, r2) = hp.pair(i);
    let mut loops: Vec<usize> = sigma_loop(hp, r, k, ball)?;
    loops.extend(sigma_loop(hp, r2, k, ball)?);
    loops.sort_unstable();
    loops.dedup();
    let mut removed = vec![false; ball.len()];
    for &v in &loops {
        removed[v] = true;
    }
    let comp = components(ball, &removed);
    let count = comp.iter().flatten().max().map_or(0, |m| m + 1);
    let mut touches = vec![false; count];
    for v in 0..ball.len() {
        if let (Some(c), true) = (comp[v], ball.is_boundary(v)) {
            touches[c] = true;
        }
    }
    let infinite = touches.iter().filter(|&&t| t).count();
    let mut member = removed;
    for v in 0..ball.len() {
        if let Some(c) = comp[v] {
            if !touches[c] {
                member[v] = true;
            }
        }
    }
    let vertices: Vec<usize> = (0..ball.len()).filter(|&v| member[v]).collect();
    let comp = components(ball, &member);
    let max_radius = vertices.iter().map(|&v| ball.dist(v)).max().unwrap_or(0);
    let diameter = vertices
        .iter()
        .map(|&v| eccentricity(ball, v, &member, vertices.len()))
        .max()
        .unwrap_or(0);
    Ok(CutsetA {
        pair: i,
        k: k.clone(),
        loops,
        vertices,
        branch: match infinite {
            0 => Branch::Degenerate,
            1 => Branch::Main,
            _ => Branch::Alternative,
        },
        infinite_components: infinite,
        finite_components: count - infinite,
        diameter,
        max_radius,
        finite_certified: max_radius + margin <= ball.radius,
        comp,
        member,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LReport {
    /// `(κ, half index)` with `κσ_ρ` meeting the cutset.
    pub loops: BTreeSet<(Word, usize)>,
    pub certified: bool,
}

/// Translated half loops that share a vertex with the cutset.
pub fn compute_l(hp: &HalvedPresentation, a: &CutsetA, ball: &CayleyBall) -> LReport {
    let mut loops = BTreeSet::new();
    let mut certified = true;
    for &x in &a.vertices {
        for (j, rho) in hp.halves().iter().enumerate() {
            for p in 0..rho.len() {
                let kappa = ball.vertex(x).mul(&rho.slice(0, p).inverse());
                match ball.locate(&kappa) {
                    Some(kv) => {
                        let name = ball.vertex(kv).clone();
                        if sigma_loop(hp, rho, &name, ball).is_err() {
                            certified = false;
                        }
                        loops.insert((name, j));
                    }
                    None => certified = false,
                }
            }
        }
    }
    LReport { loops, certified }
}

/// Exact labels of the cover over `ball − A`: two lifts lie in one
/// component iff they get equal labels.
pub struct CoverLabels {
    pub base_comp: Vec<Option<usize>>,
    tau: Vec<SVec>,
    units: Vec<std::collections::HashSet<u32>>,
    bases: Vec<Basis>,
}

impl CoverLabels {
    pub fn compute(cover: &Cover, hp: &HalvedPresentation, a: &CutsetA) -> CoverLabels {
        let ball = cover.base();
        let nl = 2 * ball.n;
        let base_comp = a.comp.clone();
        let ncomp = a.component_count();
        let mut tau = vec![SVec::zero(); ball.len()];
        let mut tree_parent = vec![usize::MAX; ball.len()];
        let mut seen = vec![false; ball.len()];
        for s in 0..ball.len() {
            if base_comp[s].is_none() || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for i in 0..nl {
                    let l = Letter::from_index(i);
                    if let Some(u) = ball.neighbor(v, l) {
                        if base_comp[u].is_some() && !seen[u] {
                            seen[u] = true;
                            tau[u] = tau[v].xor(cover.weight_svec(v, l));
                            tree_parent[u] = v;
                            queue.push_back(u);
                        }
                    }
                }
            }
        }
        // unit coordinates whose relator loop sits inside a component
        let mut units: Vec<std::collections::HashSet<u32>> = vec![Default::default(); ncomp];
        for kv in 0..ball.len() {
            for (j, rho) in hp.halves().iter().enumerate() {
                let Some(c) = base_comp[kv] else { continue };
                let mut v = kv;
                let mut inside = true;
                for &l in rho.letters() {
                    match ball.neighbor(v, l) {
                        Some(u) if base_comp[u] == Some(c) => v = u,
                        _ => {
                            inside = false;
                            break;
                        }
                    }
                }
                if inside {
                    if let Some(id) = cover.keys.get(&(ball.vertex(kv).clone(), j / 2)) {
                        units[c].insert(id);
                    }
                }
            }
        }
        let mut bases: Vec<Basis> = vec![Basis::new(); ncomp];
        for v in 0..ball.len() {
            let Some(c) = base_comp[v] else { continue };
            for i in 0..nl {
                let l = Letter::from_index(i);
                let Some(u) = ball.neighbor(v, l) else { continue };
                if v >= u || base_comp[u] != Some(c) || tree_parent[u] == v || tree_parent[v] == u {
                    continue;
                }
                let cyc = tau[v].xor(cover.weight_svec(v, l)).xor(&tau[u]);
                let cyc = cyc.filter(|k| !units[c].contains(&k));
                if !cyc.is_zero() {
                    bases[c].insert(&cyc);
                }
            }
        }
        CoverLabels { base_comp, tau, units, bases }
    }

    /// `None` for lifts of cutset vertices.
    pub fn label(&self, cover: &Cover, id: usize) -> Option<(usize, SVec)> {
        let v = cover.projection(id);
        let c = self.base_comp[v]?;
        let f = cover.fiber_svec(id).xor(&self.tau[v]);
        let f = f.filter(|k| !self.units[c].contains(&k));
        Some((c, self.bases[c].reduce(&f)))
    }
}

/// Component ids for cover vertices (in id order of first appearance);
/// `None` on the cutset preimage.
pub fn cover_components(cover: &Cover, hp: &HalvedPresentation, a: &CutsetA) -> Vec<Option<usize>> {
    let labels = CoverLabels::compute(cover, hp, a);
    let mut ids: HashMap<(usize, SVec), usize> = HashMap::new();
    (0..cover.len())
        .map(|id| {
            labels.label(cover, id).map(|l| {
                let n = ids.len();
                *ids.entry(l).or_insert(n)
            })
        })
        .collect()
}

/// Components of the materialized cover minus the cutset preimage, by BFS
/// inside the materialized ball only (a lower bound on connectivity).
pub fn cover_components_bfs(cover: &Cover, a: &CutsetA) -> Vec<Option<usize>> {
    let n = cover.len();
    let mut comp = vec![None; n];
    let mut next = 0;
    for s in 0..n {
        if a.member[cover.projection(s)] || comp[s].is_some() {
            continue;
        }
        comp[s] = Some(next);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for i in 0..2 * cover.base().n {
                if let Some(u) = cover.neighbor(v, Letter::from_index(i)) {
                    if !a.member[cover.projection(u)] && comp[u].is_none() {
                        comp[u] = Some(next);
                        queue.push_back(u);
                    }
                }
            }
        }
        next += 1;
    }
    comp
}

/// `P` of the projection of a path between two lifts of one base vertex,
/// found by BFS in the materialized cover.
pub fn q_between(cover: &Cover, k: &HalfGroup<'_>, x: usize, y: usize) -> Result<QVec> {
    if cover.projection(x) != cover.projection(y) {
        return Err(Error::Range("q is defined for lifts of one base vertex".into()));
    }
    let path = cover_path(cover, x, y).ok_or_else(|| Error::Range(format!("no path {x} → {y} in the cover ball")))?;
    let base = cover.base();
    let word = base.vertex(cover.projection(x)).mul(&path).mul(&base.vertex(cover.projection(y)).inverse());
    k.p_of_loop(&word)
}

/// Letters of a shortest path in the materialized cover.
pub fn cover_path(cover: &Cover, x: usize, y: usize) -> Option<Word> {
    let n = cover.len();
    let mut prev: Vec<Option<(usize, Letter)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut queue = VecDeque::from([x]);
    while let Some(v) = queue.pop_front() {
        if v == y {
            break;
        }
        for i in 0..2 * cover.base().n {
            let l = Letter::from_index(i);
            if let Some(u) = cover.neighbor(v, l) {
                if !seen[u] {
                    seen[u] = true;
                    prev[u] = Some((v, l));
                    queue.push_back(u);
                }
            }
        }
    }
    if !seen[y] {
        return None;
    }
    let mut letters = Vec::new();
    let mut v = y;
    while let Some((p, l)) = prev[v] {
        letters.push(l);
        v = p;
    }
    letters.reverse();
    Some(Word::from_letters(letters))
}

/// The graph the walls live on (a Cayley ball or a materialized cover),
/// with the point set used for consistency and distances.
#[derive(Clone, Debug)]
pub struct PointGraph {
    pub adj: Vec<Vec<usize>>,
    pub names: Vec<String>,
    /// Vertices whose orientations and distances are checked.
    pub points: Vec<usize>,
}

impl PointGraph {
    pub fn from_ball(ball: &CayleyBall, inner: usize) -> PointGraph {
        let adj = (0..ball.len())
            .map(|v| (0..2 * ball.n).filter_map(|i| ball.neighbor(v, Letter::from_index(i))).collect())
            .collect();
        PointGraph {
            adj,
            names: ball.vertices().iter().map(|w| w.to_string()).collect(),
            points: ball.within(inner).collect(),
        }
    }

    pub fn from_cover(cover: &Cover, inner: usize) -> PointGraph {
        let adj = (0..cover.len())
            .map(|v| (0..2 * cover.base().n).filter_map(|i| cover.neighbor(v, Letter::from_index(i))).collect())
            .collect();
        let names = (0..cover.len())
            .map(|id| {
                let p = cover.point(id);
                let f: Vec<String> = p.fiber.iter().map(|(k, i)| format!("{k}:{i}")).collect();
                format!("{}[{}]", cover.base().vertex(p.base), f.join(" "))
            })
            .collect();
        PointGraph {
            adj,
            names,
            points: (0..cover.len()).filter(|&id| cover.dist(id) <= inner).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn distances(&self, from: usize) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.len()];
        d[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v] {
                if d[u] == usize::MAX {
                    d[u] = d[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        d
    }
}

/// A cutset as seen on a [`PointGraph`]: membership and component label per
/// graph vertex.
#[derive(Clone, Debug, Serialize)]
pub struct CutsetView {
    pub pair: usize,
    pub k: Word,
    #[serde(skip)]
    pub member: Vec<bool>,
    #[serde(skip)]
    pub comp: Vec<Option<usize>>,
    /// Distinct labels among the points.
    pub components: usize,
}

impl CutsetView {
    pub fn new(pair: usize, k: Word, member: Vec<bool>, comp: Vec<Option<usize>>, points: &[usize]) -> CutsetView {
        // renumber labels by first appearance among points
        let mut ids: HashMap<usize, usize> = HashMap::new();
        for &p in points {
            if let Some(c) = comp[p] {
                let n = ids.len();
                ids.entry(c).or_insert(n);
            }
        }
        let components = ids.len();
        let comp = comp.iter().map(|c| c.and_then(|c| ids.get(&c).copied())).collect();
        CutsetView { pair, k, member, comp, components }
    }

    pub fn from_base(a: &CutsetA, g: &PointGraph) -> CutsetView {
        CutsetView::new(a.pair, a.k.clone(), a.member.clone(), a.comp.clone(), &g.points)
    }

    pub fn from_cover(a: &CutsetA, cover: &Cover, hp: &HalvedPresentation, g: &PointGraph) -> CutsetView {
        let comp = cover_components(cover, hp, a);
        let member = (0..cover.len()).map(|id| a.member[cover.projection(id)]).collect();
        CutsetView::new(a.pair, a.k.clone(), member, comp, &g.points)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Wall {
    /// Index into the wallspace's cutsets.
    pub cutset: usize,
    /// Component labels on side `U`; the complement forms side `V`.
    pub side_u: BTreeSet<usize>,
    pub principal: bool,
}

/// Principal partitions only, above this many components.
pub const DEFAULT_WALL_CAP: usize = 6;

#[derive(Clone, Debug, Serialize)]
pub struct WallSpace {
    pub cutsets: Vec<CutsetView>,
    pub walls: Vec<Wall>,
    /// `sides[w][i]`: point `i` (index into `points`) lies on side `U`.
    #[serde(skip)]
    pub sides: Vec<Vec<bool>>,
    pub points: usize,
    pub transverse: Vec<(usize, usize)>,
    pub max_transverse: usize,
    pub capped: bool,
    /// Partitions dropped because they split the points like an earlier
    /// wall or leave one side without points.
    pub dropped: usize,
}

/// All two-sided partitions of each cutset's labels (principal ones past
/// `cap` components), sides evaluated on the points. A cutset vertex joins
/// the side holding the component with the most points. Only one wall is kept
/// per split of the points.
pub fn enumerate_walls(g: &PointGraph, cutsets: Vec<CutsetView>, cap: usize) -> WallSpace {
    let mut walls = Vec::new();
    let mut sides = Vec::new();
    let mut capped = false;
    let mut dropped = 0;
    let mut seen_splits: std::collections::HashSet<Vec<bool>> = Default::default();
    for (ci, cs) in cutsets.iter().enumerate() {
        let c = cs.components;
        if c < 2 {
            continue;
        }
        let mut sizes = vec![0usize; c];
        for &p in &g.points {
            if let Some(l) = cs.comp[p] {
                sizes[l] += 1;
            }
        }
        let largest = (0..c).max_by_key(|&l| (sizes[l], std::cmp::Reverse(l))).unwrap_or(0);
        let parts: Vec<BTreeSet<usize>> = if c > cap {
            capped = true;
            (0..c).map(|l| BTreeSet::from([l])).collect()
        } else {
            // subsets of 0..c containing label 0, excluding the full set
            (0..(1u64 << (c - 1)) - 1)
                .map(|mask| {
                    let mut s = BTreeSet::from([0]);
                    for b in 0..c - 1 {
                        if mask >> b & 1 == 1 {
                            s.insert(b + 1);
                        }
                    }
                    s
                })
                .collect()
        };
        for side_u in parts {
            let cut_on_u = side_u.contains(&largest);
            let side: Vec<bool> = g
                .points
                .iter()
                .map(|&p| match cs.comp[p] {
                    Some(l) => side_u.contains(&l),
                    None => cut_on_u,
                })
                .collect();
            let key: Vec<bool> = side.iter().map(|&b| b == side[0]).collect();
            if key.iter().all(|&b| b) || !seen_splits.insert(key) {
                dropped += 1;
                continue;
            }
            sides.push(side);
            walls.push(Wall { cutset: ci, side_u, principal: c > cap });
        }
    }
    let nw = walls.len();
    let mut transverse = Vec::new();
    for a in 0..nw {
        for b in a + 1..nw {
            let mut seen = [false; 4];
            for (x, y) in sides[a].iter().zip(&sides[b]) {
                seen[(*x as usize) * 2 + *y as usize] = true;
            }
            if seen.iter().all(|&s| s) {
                transverse.push((a, b));
            }
        }
    }
    let max_transverse = max_clique(nw, &transverse);
    WallSpace {
        cutsets,
        walls,
        sides,
        points: g.points.len(),
        transverse,
        max_transverse,
        capped,
        dropped,
    }
}

/// Size of a largest clique (Bron–Kerbosch with pivoting).
pub fn max_clique(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut nbr: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(a, b) in edges {
        nbr[a].insert(b);
        nbr[b].insert(a);
    }
    fn bk(r: usize, p: BTreeSet<usize>, mut x: BTreeSet<usize>, nbr: &[BTreeSet<usize>], best: &mut usize) {
        if p.is_empty() && x.is_empty() {
            *best = (*best).max(r);
            return;
        }
        if r + p.len() <= *best {
            return;
        }
        let pivot = p.union(&x).max_by_key(|u| nbr[**u].intersection(&p).count()).copied();
        let cands: Vec<usize> = match pivot {
            Some(u) => p.difference(&nbr[u]).copied().collect(),
            None => p.iter().copied().collect(),
        };
        let mut p = p;
        for v in cands {
            let np = p.intersection(&nbr[v]).copied().collect();
            let nx = x.intersection(&nbr[v]).copied().collect();
            bk(r + 1, np, nx, nbr, best);
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut best = 0;
    bk(0, (0..n).collect(), BTreeSet::new(), &nbr, &mut best);
    best
}

impl WallSpace {
    /// Walls with the two points (indices into `points`) on opposite sides.
    pub fn separation_count(&self, x: usize, y: usize) -> Result<usize> {
        if x >= self.points || y >= self.points {
            return Err(Error::Range(format!("point index outside 0..{}", self.points)));
        }
        Ok(self.sides.iter().filter(|s| s[x] != s[y]).count())
    }
}

pub fn role_name(r: HalfRole) -> &'static str {
    match r {
        HalfRole::First => "first",
        HalfRole::Second => "second",
    }
}
