//! The dual cube complex of a finite wallspace: consistent orientations
//! reached from principal ones by single flips, cubes, the median check and
//! the distance comparison. Also the growth witness search.

use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::walls::{CutsetView, PointGraph, WallSpace};

pub const DEFAULT_MAX_DIM: usize = 4;
pub const DEFAULT_VERTEX_BUDGET: usize = 200_000;
/// Exhaustive median check up to this many vertices.
pub const EXHAUSTIVE_MEDIAN_LIMIT: usize = 200;
pub const MEDIAN_SAMPLES: usize = 10_000;

/// One bit per wall; set = side `U`.
type Orientation = Vec<u64>;

fn bit(o: &Orientation, w: usize) -> bool {
    o[w / 64] >> (w % 64) & 1 == 1
}

fn flip(o: &mut Orientation, w: usize) {
    o[w / 64] ^= 1 << (w % 64);
}

#[derive(Clone, Debug, Serialize)]
pub struct DualComplex {
    pub walls: usize,
    #[serde(skip)]
    orientations: Vec<Orientation>,
    #[serde(skip)]
    pub adj: Vec<Vec<(usize, usize)>>,
    /// Vertex of each point (in wallspace point order).
    pub principal: Vec<usize>,
    /// `cubes[k]`: number of `k`-cubes, `k ≤ max_dim`.
    pub cubes: Vec<usize>,
    pub dim: usize,
    /// The flip closure stopped at the vertex budget.
    pub truncated: bool,
}

/// `meets[a][b]` bit `2·sa + sb`: halfspaces `(a, sa)` and `(b, sb)` share a point.
fn meets_table(ws: &WallSpace) -> Vec<Vec<u8>> {
    let nw = ws.walls.len();
    let mut t = vec![vec![0u8; nw]; nw];
    for a in 0..nw {
        for b in a..nw {
            let mut m = 0u8;
            for p in 0..ws.points {
                m |= 1 << (2 * ws.sides[a][p] as u8 + ws.sides[b][p] as u8);
            }
            t[a][b] = m;
            // transpose the bit layout
            t[b][a] = (m & 0b1001) | ((m & 0b0010) << 1) | ((m & 0b0100) >> 1);
        }
    }
    t
}

pub fn build_dual(ws: &WallSpace, max_dim: usize, budget: usize) -> Result<DualComplex> {
    if ws.points == 0 {
        return Err(Error::Complex("wallspace has no points".into()));
    }
    let nw = ws.walls.len();
    let meets = meets_table(ws);
    let consistent_flip = |o: &Orientation, w: usize| {
        let s = !bit(o, w) as u8;
        (0..nw).all(|u| u == w || meets[w][u] >> (2 * s + bit(o, u) as u8) & 1 == 1)
    };
    let mut index: HashMap<Orientation, usize> = HashMap::new();
    let mut orientations: Vec<Orientation> = Vec::new();
    let mut principal = Vec::with_capacity(ws.points);
    for p in 0..ws.points {
        let mut o: Orientation = vec![0; nw.div_ceil(64)];
        for w in (0..nw).filter(|&w| ws.sides[w][p]) {
            flip(&mut o, w);
        }
        let id = *index.entry(o.clone()).or_insert_with(|| {
            orientations.push(o);
            orientations.len() - 1
        });
        principal.push(id);
    }
    let mut truncated = false;
    let mut queue: VecDeque<usize> = (0..orientations.len()).collect();
    while let Some(v) = queue.pop_front() {
        for w in 0..nw {
            let mut o = orientations[v].clone();
            flip(&mut o, w);
            if index.contains_key(&o) || !consistent_flip(&orientations[v], w) {
                continue;
            }
            if orientations.len() >= budget {
                truncated = true;
                continue;
            }
            index.insert(o.clone(), orientations.len());
            orientations.push(o);
            queue.push_back(orientations.len() - 1);
        }
    }
    let nv = orientations.len();
    let mut adj = vec![Vec::new(); nv];
    for v in 0..nv {
        for w in 0..nw {
            let mut o = orientations[v].clone();
            flip(&mut o, w);
            if let Some(&u) = index.get(&o) {
                adj[v].push((u, w));
            }
        }
    }
    let mut cubes = vec![0usize; max_dim + 1];
    cubes[0] = nv;
    let transverse: std::collections::HashSet<(usize, usize)> = ws.transverse.iter().copied().collect();
    let cross = |a: usize, b: usize| transverse.contains(&(a.min(b), a.max(b)));
    for v in 0..nv {
        // cubes with `v` as the corner where every cube wall reads `V`
        let up: Vec<usize> = adj[v].iter().filter(|(_, w)| !bit(&orientations[v], *w)).map(|&(_, w)| w).collect();
        let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
        while let Some((set, from)) = stack.pop() {
            if set.len() == max_dim {
                continue;
            }
            for (i, &w) in up.iter().enumerate().skip(from) {
                if !set.iter().all(|&u| cross(u, w)) {
                    continue;
                }
                let mut next = set.clone();
                next.push(w);
                let all = (0u32..1 << next.len()).all(|mask| {
                    let mut o = orientations[v].clone();
                    for (b, &u) in next.iter().enumerate() {
                        if mask >> b & 1 == 1 {
                            flip(&mut o, u);
                        }
                    }
                    index.contains_key(&o)
                });
                if all {
                    cubes[next.len()] += 1;
                    stack.push((next, i + 1));
                }
            }
        }
    }
    let dim = cubes.iter().rposition(|&c| c > 0).unwrap_or(0);
    Ok(DualComplex { walls: nw, orientations, adj, principal, cubes, dim, truncated })
}

impl DualComplex {
    pub fn len(&self) -> usize {
        self.orientations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orientations.is_empty()
    }

    /// Vertex `v` picks side `U` of wall `w`.
    pub fn side(&self, v: usize, w: usize) -> bool {
        bit(&self.orientations[v], w)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn distances(&self, from: usize) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.len()];
        d[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &(u, _) in &self.adj[v] {
                if d[u] == usize::MAX {
                    d[u] = d[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        d
    }

    pub fn graph(&self) -> Vec<Vec<usize>> {
        self.adj.iter().map(|a| a.iter().map(|&(u, _)| u).collect()).collect()
    }

    pub fn is_median(&self, seed: u64) -> Result<MedianReport> {
        is_median(&self.graph(), seed)
    }

    /// Pairs of points whose complex distance differs from their wall
    /// separation count, as `(x, y, distance, separation)`.
    pub fn verify_distance(&self, ws: &WallSpace, pairs: &[(usize, usize)]) -> Result<Vec<(usize, usize, usize, usize)>> {
        let mut cache: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut bad = Vec::new();
        for &(x, y) in pairs {
            let sep = ws.separation_count(x, y)?;
            let dx = cache.entry(self.principal[x]).or_insert_with(|| self.distances(self.principal[x]));
            let d = dx[self.principal[y]];
            if d != sep {
                bad.push((x, y, d, sep));
            }
        }
        Ok(bad)
    }
}

fn bfs(adj: &[Vec<usize>], from: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if d[u] == usize::MAX {
                d[u] = d[v] + 1;
                queue.push_back(u);
            }
        }
    }
    d
}

/// Every checked triple has exactly one median. Exhaustive up to
/// [`EXHAUSTIVE_MEDIAN_LIMIT`] vertices; above that, [`MEDIAN_SAMPLES`]
/// triples drawn from a pool of 64 BFS sources.
pub fn is_median(adj: &[Vec<usize>], seed: u64) -> Result<MedianReport> {
    let nv = adj.len();
    if nv == 0 || bfs(adj, 0).contains(&usize::MAX) {
        return Err(Error::Contract("median check needs a connected nonempty graph".into()));
    }
    let exhaustive = nv <= EXHAUSTIVE_MEDIAN_LIMIT;
    let sources: Vec<usize> = if exhaustive {
        (0..nv).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut all: Vec<usize> = (0..nv).collect();
        all.shuffle(&mut rng);
        all.truncate(64);
        all
    };
    let dist: Vec<Vec<usize>> = sources.iter().map(|&s| bfs(adj, s)).collect();
    let check = |a: usize, b: usize, c: usize| -> bool {
        let (da, db, dc) = (&dist[a], &dist[b], &dist[c]);
        let (xb, xc) = (sources[b], sources[c]);
        let mut count = 0;
        for m in 0..nv {
            if da[m] + db[m] == da[xb] && db[m] + dc[m] == db[xc] && da[m] + dc[m] == da[xc] {
                count += 1;
                if count > 1 {
                    return false;
                }
            }
        }
        count == 1
    };
    let k = sources.len();
    let mut triples = Vec::new();
    if exhaustive {
        for a in 0..k {
            for b in a..k {
                for c in b..k {
                    triples.push((a, b, c));
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        triples = (0..MEDIAN_SAMPLES)
            .map(|_| (rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k)))
            .collect();
    }
    let failure = triples.iter().position(|&(a, b, c)| !check(a, b, c));
    Ok(MedianReport {
        median: failure.is_none(),
        triples: failure.map_or(triples.len(), |i| i + 1),
        exhaustive,
        failure: failure.map(|i| {
            let (a, b, c) = triples[i];
            format!("{} {} {}", sources[a], sources[b], sources[c])
        }),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MedianReport {
    pub median: bool,
    pub triples: usize,
    pub exhaustive: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthWitness {
    pub x: String,
    pub y: String,
    pub path: Vec<String>,
    /// `(translate, pair)` of each crossed cutset.
    pub translates: Vec<(String, usize)>,
    pub separation: usize,
}

/// A shortest path between two points crossing `n` pairwise disjoint
/// cutsets, each exactly once, with the endpoints in different components
/// of each. Searches one BFS path per pair of points.
pub fn growth_witness(g: &PointGraph, ws: &WallSpace, cutsets: &[usize], n: usize) -> Result<GrowthWitness> {
    let views: Vec<&CutsetView> = cutsets.iter().map(|&c| &ws.cutsets[c]).collect();
    let disjoint: Vec<Vec<bool>> = views
        .iter()
        .map(|a| views.iter().map(|b| !a.member.iter().zip(&b.member).any(|(x, y)| *x && *y)).collect())
        .collect();
    let point_index: HashMap<usize, usize> = g.points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut best = 0;
    for &x in &g.points {
        let mut prev = vec![usize::MAX; g.len()];
        prev[x] = x;
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            for &u in &g.adj[v] {
                if prev[u] == usize::MAX {
                    prev[u] = v;
                    queue.push_back(u);
                }
            }
        }
        for &y in g.points.iter().filter(|&&y| y > x && prev[y] != usize::MAX) {
            let mut path = vec![y];
            while *path.last().unwrap() != x {
                path.push(prev[*path.last().unwrap()]);
            }
            path.reverse();
            let crossed: Vec<usize> = (0..views.len())
                .filter(|&c| crosses_once(views[c], &path))
                .collect();
            let chosen = disjoint_subset(&crossed, &disjoint, n);
            best = best.max(chosen.len());
            if chosen.len() == n {
                return Ok(GrowthWitness {
                    x: g.names[x].clone(),
                    y: g.names[y].clone(),
                    path: path.iter().map(|&v| g.names[v].clone()).collect(),
                    translates: chosen.iter().map(|&c| (views[c].k.to_string(), views[c].pair)).collect(),
                    separation: ws.separation_count(point_index[&x], point_index[&y])?,
                });
            }
        }
    }
    Err(Error::Range(format!("no witness for n = {n}; largest found is {best}")))
}

fn crosses_once(c: &CutsetView, path: &[usize]) -> bool {
    let (x, y) = (path[0], path[path.len() - 1]);
    match (c.comp[x], c.comp[y]) {
        (Some(a), Some(b)) if a != b => {}
        _ => return false,
    }
    let inside: Vec<usize> = (0..path.len()).filter(|&i| c.member[path[i]]).collect();
    !inside.is_empty() && inside[inside.len() - 1] - inside[0] + 1 == inside.len()
}

/// Up to `n` pairwise disjoint members of `items`, by depth-first search.
fn disjoint_subset(items: &[usize], disjoint: &[Vec<bool>], n: usize) -> Vec<usize> {
    fn go(items: &[usize], disjoint: &[Vec<bool>], n: usize, cur: &mut Vec<usize>, best: &mut Vec<usize>) {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        if best.len() >= n {
            return;
        }
        for (i, &c) in items.iter().enumerate() {
            if cur.iter().all(|&u| disjoint[u][c]) {
                cur.push(c);
                go(&items[i + 1..], disjoint, n, cur, best);
                cur.pop();
                if best.len() >= n {
                    return;
                }
            }
        }
    }
    let mut best = Vec::new();
    go(items, disjoint, n, &mut Vec::new(), &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walls::{enumerate_walls, DEFAULT_WALL_CAP};
    use crate::words::Word;

    /// A path graph `0 - 1 - … - (len-1)` cut at the given single vertices.
    fn path_space(len: usize, cuts: &[usize]) -> (PointGraph, WallSpace) {
        let adj = (0..len)
            .map(|i| [i.checked_sub(1), (i + 1 < len).then_some(i + 1)].into_iter().flatten().collect())
            .collect();
        let g = PointGraph { adj, names: (0..len).map(|i| i.to_string()).collect(), points: (0..len).collect() };
        let views = cuts
            .iter()
            .map(|&c| {
                let member = (0..len).map(|i| i == c).collect();
                let comp = (0..len).map(|i| (i != c).then_some((i > c) as usize)).collect();
                CutsetView::new(0, Word::empty(), member, comp, &g.points)
            })
            .collect();
        let ws = enumerate_walls(&g, views, DEFAULT_WALL_CAP);
        (g, ws)
    }

    #[test]
    fn path_dual_is_a_path() {
        let (_, ws) = path_space(7, &[1, 3, 5]);
        let dc = build_dual(&ws, DEFAULT_MAX_DIM, 1000).unwrap();
        assert_eq!(dc.len(), 4);
        assert_eq!(dc.edge_count(), 3);
        assert_eq!(dc.dim, 1);
        assert!(dc.is_median(0).unwrap().median);
        let pairs: Vec<(usize, usize)> = (0..7).flat_map(|x| (0..7).map(move |y| (x, y))).collect();
        assert!(dc.verify_distance(&ws, &pairs).unwrap().is_empty());
    }

    fn cycle(n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect()
    }

    #[test]
    fn median_graphs() {
        assert!(is_median(&[vec![1], vec![0]], 0).unwrap().median);
        assert!(is_median(&cycle(4), 0).unwrap().median);
        assert!(!is_median(&cycle(5), 0).unwrap().median);
        assert!(!is_median(&cycle(6), 0).unwrap().median);
        assert!(matches!(is_median(&[vec![], vec![]], 0), Err(Error::Contract(_))));
    }

    #[test]
    fn small_duals() {
        let (_, ws) = path_space(3, &[1]);
        let dc = build_dual(&ws, DEFAULT_MAX_DIM, 100).unwrap();
        assert_eq!((dc.len(), dc.edge_count(), dc.dim), (2, 1, 1));
        let (_, ws) = path_space(5, &[1, 3]);
        let dc = build_dual(&ws, DEFAULT_MAX_DIM, 100).unwrap();
        assert_eq!((dc.len(), dc.edge_count(), dc.cubes[2]), (3, 2, 0));
        // three pairwise transverse splits of four points: four principal
        // corners, closure fills the 3-cube
        let sides = vec![
            vec![true, true, false, false],
            vec![true, false, true, false],
            vec![true, false, false, true],
        ];
        let mut ws = WallSpace {
            cutsets: vec![],
            walls: vec![],
            sides,
            points: 4,
            transverse: vec![(0, 1), (0, 2), (1, 2)],
            max_transverse: 3,
            capped: false,
            dropped: 0,
        };
        ws.walls = (0..3).map(|_| crate::walls::Wall { cutset: 0, side_u: Default::default(), principal: false }).collect();
        let dc = build_dual(&ws, DEFAULT_MAX_DIM, 100).unwrap();
        assert_eq!(dc.cubes[..4], [8, 12, 6, 1]);
        assert!(!dc.truncated);
        assert!(build_dual(&ws, DEFAULT_MAX_DIM, 4).unwrap().truncated);
    }

    #[test]
    fn witness_on_a_path() {
        let (g, ws) = path_space(7, &[1, 3, 5]);
        let w = growth_witness(&g, &ws, &[0, 1, 2], 3).unwrap();
        assert_eq!(w.separation, 3);
        assert!(matches!(growth_witness(&g, &ws, &[0, 1, 2], 4), Err(Error::Range(_))));
    }

    #[test]
    fn crossing_walls_make_a_square() {
        // 3x3 grid, cut along the middle row and the middle column
        let id = |r: usize, c: usize| 3 * r + c;
        let mut adj = vec![Vec::new(); 9];
        for r in 0..3 {
            for c in 0..3 {
                if r < 2 {
                    adj[id(r, c)].push(id(r + 1, c));
                    adj[id(r + 1, c)].push(id(r, c));
                }
                if c < 2 {
                    adj[id(r, c)].push(id(r, c + 1));
                    adj[id(r, c + 1)].push(id(r, c));
                }
            }
        }
        let g = PointGraph { adj, names: vec![String::new(); 9], points: (0..9).collect() };
        let row = CutsetView::new(
            0,
            Word::empty(),
            (0..9).map(|v| v / 3 == 1).collect(),
            (0..9).map(|v| (v / 3 != 1).then_some(v / 3 / 2)).collect(),
            &g.points,
        );
        let col = CutsetView::new(
            0,
            Word::empty(),
            (0..9).map(|v| v % 3 == 1).collect(),
            (0..9).map(|v| (v % 3 != 1).then_some(v % 3 / 2)).collect(),
            &g.points,
        );
        let ws = enumerate_walls(&g, vec![row, col], DEFAULT_WALL_CAP);
        assert_eq!(ws.max_transverse, 2);
        let dc = build_dual(&ws, DEFAULT_MAX_DIM, 1000).unwrap();
        assert_eq!(dc.cubes[..3], [4, 4, 1]);
        assert_eq!(dc.dim, 2);
        assert!(dc.is_median(1).unwrap().median);
    }
}
