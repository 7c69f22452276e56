//! The double cover of a Cayley ball of `K_R` determined by `P_{T,R}`:
//! voltages on non-tree edges, path lifting, deck translation, and a
//! materialized ball around the base lift.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::CayleyBall;
use crate::error::{Error, Result};
use crate::gf2::SVec;
use crate::relhom::{HalfGroup, QVec};
use crate::words::{Letter, Word};

/// Interned `(κ, pair)` coordinates of `Q(T,R)`.
#[derive(Clone, Debug, Default)]
pub struct KeyTable {
    ids: HashMap<(Word, usize), u32>,
    keys: Vec<(Word, usize)>,
}

impl KeyTable {
    pub fn intern(&mut self, k: &(Word, usize)) -> u32 {
        if let Some(&id) = self.ids.get(k) {
            return id;
        }
        let id = self.keys.len() as u32;
        self.ids.insert(k.clone(), id);
        self.keys.push(k.clone());
        id
    }

    pub fn get(&self, k: &(Word, usize)) -> Option<u32> {
        self.ids.get(k).copied()
    }

    pub fn key(&self, id: u32) -> &(Word, usize) {
        &self.keys[id as usize]
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// A cover vertex: base vertex id and fiber offset from the base lift.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoverPoint {
    pub base: usize,
    pub fiber: QVec,
}

#[derive(Clone, Debug)]
pub struct Cover {
    base: Arc<CayleyBall>,
    pub keys: KeyTable,
    /// Distinct voltages; id 0 is the zero vector.
    weights: Vec<SVec>,
    /// `edge_weight[v][letter index]`, meaningful where the base edge exists.
    edge_weight: Vec<Vec<u32>>,
    radius: usize,
    fibers: Vec<SVec>,
    fiber_ids: HashMap<SVec, u32>,
    verts: Vec<(u32, u32)>,
    index: HashMap<(u32, u32), u32>,
    dist: Vec<usize>,
    adj: Vec<Vec<Option<u32>>>,
}

fn is_tree_edge(ball: &CayleyBall, v: usize, u: usize, s: Letter) -> bool {
    let (wv, wu) = (ball.vertex(v), ball.vertex(u));
    (wu.len() == wv.len() + 1 && wu.last() == Some(s) && wu.starts_with(wv.letters()))
        || (wv.len() == wu.len() + 1 && wv.last() == Some(s.inverse()) && wv.starts_with(wu.letters()))
}

impl Cover {
    /// Voltages for every edge of `base`, then the cover ball of radius
    /// `radius` about `(ε, 0)`.
    pub fn build(base: Arc<CayleyBall>, k: &HalfGroup<'_>, radius: usize) -> Result<Cover> {
        let nl = 2 * base.n;
        let mut jobs: Vec<(usize, usize, usize)> = Vec::new();
        for v in 0..base.len() {
            for s in 0..nl {
                if let Some(u) = base.neighbor(v, Letter::from_index(s)) {
                    if v < u && !is_tree_edge(&base, v, u, Letter::from_index(s)) {
                        jobs.push((v, s, u));
                    }
                }
            }
        }
        let results: Vec<Result<QVec>> = jobs
            .par_iter()
            .map(|&(v, s, u)| {
                let l = Letter::from_index(s);
                let loop_word = base.vertex(v).mul_letter(l).mul(&base.vertex(u).inverse());
                k.p_of_loop(&loop_word)
                    .map_err(|e| Error::Cover(format!("edge {}·{} : {e}", base.vertex(v), Word::letter(l))))
            })
            .collect();
        let mut keys = KeyTable::default();
        let mut weights = vec![SVec::zero()];
        let mut weight_ids: HashMap<SVec, u32> = HashMap::new();
        weight_ids.insert(SVec::zero(), 0);
        let mut edge_weight = vec![vec![0u32; nl]; base.len()];
        for (&(v, s, u), r) in jobs.iter().zip(results) {
            let q = r?;
            let sv = SVec::from_coords(q.iter().map(|key| keys.intern(key)));
            let id = *weight_ids.entry(sv.clone()).or_insert_with(|| {
                weights.push(sv);
                (weights.len() - 1) as u32
            });
            edge_weight[v][s] = id;
            edge_weight[u][Letter::from_index(s).inverse().index()] = id;
        }
        let mut cover = Cover {
            base,
            keys,
            weights,
            edge_weight,
            radius,
            fibers: vec![SVec::zero()],
            fiber_ids: HashMap::from([(SVec::zero(), 0)]),
            verts: vec![(0, 0)],
            index: HashMap::from([((0, 0), 0)]),
            dist: vec![0],
            adj: vec![vec![None; nl]],
        };
        cover.materialize();
        Ok(cover)
    }

    fn materialize(&mut self) {
        let nl = 2 * self.base.n;
        let mut head = 0;
        while head < self.verts.len() {
            let (v, f) = self.verts[head];
            let d = self.dist[head];
            for s in 0..nl {
                let Some(u) = self.base.neighbor(v as usize, Letter::from_index(s)) else { continue };
                let w = &self.weights[self.edge_weight[v as usize][s] as usize];
                let fid = if w.is_zero() {
                    f
                } else {
                    let nf = self.fibers[f as usize].xor(w);
                    match self.fiber_ids.get(&nf) {
                        Some(&id) => id,
                        None => {
                            self.fibers.push(nf.clone());
                            let id = (self.fibers.len() - 1) as u32;
                            self.fiber_ids.insert(nf, id);
                            id
                        }
                    }
                };
                let key = (u as u32, fid);
                let target = match self.index.get(&key) {
                    Some(&t) => t,
                    None if d < self.radius => {
                        let t = self.verts.len() as u32;
                        self.verts.push(key);
                        self.index.insert(key, t);
                        self.dist.push(d + 1);
                        self.adj.push(vec![None; nl]);
                        t
                    }
                    None => continue,
                };
                self.adj[head][s] = Some(target);
                self.adj[target as usize][Letter::from_index(s).inverse().index()] = Some(head as u32);
            }
            head += 1;
        }
    }

    pub fn base(&self) -> &CayleyBall {
        &self.base
    }

    pub fn base_arc(&self) -> Arc<CayleyBall> {
        self.base.clone()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Number of materialized cover vertices.
    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn dist(&self, id: usize) -> usize {
        self.dist[id]
    }

    pub fn is_boundary(&self, id: usize) -> bool {
        self.dist[id] == self.radius
    }

    pub fn projection(&self, id: usize) -> usize {
        self.verts[id].0 as usize
    }

    pub fn fiber_svec(&self, id: usize) -> &SVec {
        &self.fibers[self.verts[id].1 as usize]
    }

    pub fn neighbor(&self, id: usize, l: Letter) -> Option<usize> {
        self.adj[id][l.index()].map(|t| t as usize)
    }

    pub fn weight_svec(&self, v: usize, l: Letter) -> &SVec {
        &self.weights[self.edge_weight[v][l.index()] as usize]
    }

    pub fn to_qvec(&self, v: &SVec) -> QVec {
        v.coords().iter().map(|&k| self.keys.key(k).clone()).collect()
    }

    /// `None` if `q` has a coordinate never seen on any edge.
    pub fn to_svec(&self, q: &QVec) -> Option<SVec> {
        let ids: Option<Vec<u32>> = q.iter().map(|k| self.keys.get(k)).collect();
        ids.map(SVec::from_coords)
    }

    /// Voltage of the base edge leaving `v` along `l`.
    pub fn weight(&self, v: usize, l: Letter) -> Result<QVec> {
        self.base
            .neighbor(v, l)
            .ok_or_else(|| Error::Range(format!("no edge {}·{}", self.base.vertex(v), Word::letter(l))))?;
        Ok(self.to_qvec(self.weight_svec(v, l)))
    }

    pub fn point(&self, id: usize) -> CoverPoint {
        CoverPoint {
            base: self.projection(id),
            fiber: self.to_qvec(self.fiber_svec(id)),
        }
    }

    pub fn find(&self, p: &CoverPoint) -> Option<usize> {
        let f = self.to_svec(&p.fiber)?;
        let fid = *self.fiber_ids.get(&f)?;
        self.index.get(&(p.base as u32, fid)).map(|&t| t as usize)
    }

    /// Unique lift of the base path read by `w` from `start`.
    pub fn lift_path(&self, start: &CoverPoint, w: &Word) -> Result<CoverPoint> {
        let mut v = start.base;
        let mut f = self
            .to_svec(&start.fiber)
            .ok_or_else(|| Error::Range("start fiber uses unknown coordinates".into()))?;
        for &l in w.letters() {
            let u = self.base.neighbor(v, l).ok_or_else(|| {
                Error::Range(format!("path {w} leaves the base ball at {}", self.base.vertex(v)))
            })?;
            f = f.xor(self.weight_svec(v, l));
            v = u;
        }
        Ok(CoverPoint { base: v, fiber: self.to_qvec(&f) })
    }

    pub fn deck_translate(&self, p: &CoverPoint, q: &QVec) -> CoverPoint {
        CoverPoint { base: p.base, fiber: p.fiber.add(q) }
    }

    /// Deck translation restricted to the materialized ball.
    pub fn deck_translate_id(&self, id: usize, q: &QVec) -> Result<usize> {
        let p = self.deck_translate(&self.point(id), q);
        self.find(&p)
            .ok_or_else(|| Error::Range(format!("translate of cover vertex {id} is outside the built region")))
    }

    /// Number of base vertices in the inner ball with at least one lift.
    pub fn covered_base(&self, r: usize) -> usize {
        let mut seen = vec![false; self.base.len()];
        for &(v, _) in &self.verts {
            seen[v as usize] = true;
        }
        self.base.within(r).filter(|&v| seen[v]).count()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct V {
            id: usize,
            base: String,
            fiber: Vec<(String, usize)>,
            boundary: bool,
        }
        let verts: Vec<V> = (0..self.len())
            .map(|id| V {
                id,
                base: self.base.vertex(self.projection(id)).to_string(),
                fiber: self.point(id).fiber.iter().map(|(k, i)| (k.to_string(), *i)).collect(),
                boundary: self.is_boundary(id),
            })
            .collect();
        let mut edges = Vec::new();
        for id in 0..self.len() {
            for (s, t) in self.adj[id].iter().enumerate() {
                if let (Some(t), true) = (t, Letter::from_index(s).is_positive()) {
                    edges.push((id, Word::letter(Letter::from_index(s)).to_string(), *t as usize));
                }
            }
        }
        serde_json::json!({
            "radius": self.radius,
            "base_radius": self.base.radius,
            "vertices": verts,
            "edges": edges,
        })
        .to_string()
    }

    pub fn to_dot(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::from("graph cover {\n");
        for id in 0..self.len() {
            let p = self.point(id);
            let fib: Vec<String> = p.fiber.iter().map(|(k, i)| format!("{k}:{i}")).collect();
            let _ = writeln!(s, "  {id} [label=\"{} [{}]\"];", self.base.vertex(p.base), fib.join(" "));
        }
        for id in 0..self.len() {
            for (k, t) in self.adj[id].iter().enumerate() {
                let l = Letter::from_index(k);
                if let (Some(t), true) = (t, l.is_positive()) {
                    let _ = writeln!(s, "  {id} -- {t} [label=\"{}\"];", l.to_char().unwrap_or('?'));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}
