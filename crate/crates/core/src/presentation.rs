//! Presentations, halved presentations and the halving map.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub n: usize,
    pub relators: Vec<Word>,
}

#[derive(Deserialize)]
struct PresentationFile {
    n: usize,
    relators: Vec<Word>,
    #[serde(default)]
    splits: Option<Vec<usize>>,
}

impl Presentation {
    /// Validates alphabet range, nonemptiness and distinctness.
    pub fn new(n: usize, relators: Vec<Word>) -> Result<Presentation> {
        let p = Presentation::new_allow_duplicates(n, relators)?;
        let mut seen = std::collections::HashSet::new();
        for r in &p.relators {
            if !seen.insert(r) {
                return Err(Error::Presentation(format!("duplicate relator {r}")));
            }
        }
        Ok(p)
    }

    pub(crate) fn new_allow_duplicates(n: usize, relators: Vec<Word>) -> Result<Presentation> {
        if n == 0 {
            return Err(Error::Presentation("alphabet size must be ≥ 1".into()));
        }
        for r in &relators {
            if r.is_empty() {
                return Err(Error::Presentation("empty relator".into()));
            }
            if r.max_generator() > n {
                return Err(Error::Alphabet(format!("relator {r} uses a generator beyond n={n}")));
            }
        }
        Ok(Presentation { n, relators })
    }

    /// Parses text relators such as `["abABcdCD"]`.
    pub fn parse(n: usize, relators: &[&str]) -> Result<Presentation> {
        let words = relators
            .iter()
            .map(|s| Word::parse(s, n))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(n, words)
    }

    pub fn from_json(text: &str) -> Result<Presentation> {
        let f: PresentationFile = serde_json::from_str(text)?;
        Presentation::new(f.n, f.relators)
    }

    pub fn load(path: &Path) -> Result<Presentation> {
        Presentation::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("presentation serializes")
    }

    pub fn len(&self) -> usize {
        self.relators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(|r| r.len()).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfRole {
    First,
    Second,
}

/// `T` together with a split `t_i = r_i · r_i'`. Halves are stored
/// interleaved: `halves[2i] = r_i`, `halves[2i + 1] = r_i'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalvedPresentation {
    pub base: Presentation,
    pub splits: Vec<usize>,
    halves: Vec<Word>,
    #[serde(skip)]
    index: HashMap<Word, Vec<usize>>,
}

/// Splits every relator at `⌊|t|/2⌋`.
pub fn halve(p: &Presentation) -> Result<HalvedPresentation> {
    let splits = p.relators.iter().map(|r| r.len() / 2).collect();
    halve_with(p, splits)
}

/// Splits with caller-chosen positions; each half must be nonempty and the
/// seam must not cancel.
pub fn halve_with(p: &Presentation, splits: Vec<usize>) -> Result<HalvedPresentation> {
    if splits.len() != p.relators.len() {
        return Err(Error::Halving(format!(
            "{} split positions for {} relators",
            splits.len(),
            p.relators.len()
        )));
    }
    let mut halves = Vec::with_capacity(2 * splits.len());
    for (t, &s) in p.relators.iter().zip(&splits) {
        if t.len() < 2 {
            return Err(Error::Halving(format!("relator {t} has length < 2")));
        }
        if s == 0 || s >= t.len() {
            return Err(Error::Halving(format!("split {s} leaves an empty half of {t}")));
        }
        halves.push(t.slice(0, s));
        halves.push(t.slice(s, t.len()));
    }
    let mut index: HashMap<Word, Vec<usize>> = HashMap::new();
    for (j, h) in halves.iter().enumerate() {
        index.entry(h.clone()).or_default().push(j);
    }
    Ok(HalvedPresentation {
        base: p.clone(),
        splits,
        halves,
        index,
    })
}

impl HalvedPresentation {
    pub fn from_json(text: &str) -> Result<HalvedPresentation> {
        let f: PresentationFile = serde_json::from_str(text)?;
        let p = Presentation::new(f.n, f.relators)?;
        match f.splits {
            Some(s) => halve_with(&p, s),
            None => halve(&p),
        }
    }

    pub fn load(path: &Path) -> Result<HalvedPresentation> {
        HalvedPresentation::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "n": self.base.n,
            "relators": self.base.relators,
            "splits": self.splits,
        })
        .to_string()
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    /// Number of pairs `N`.
    pub fn pairs(&self) -> usize {
        self.splits.len()
    }

    /// All `2N` halves, interleaved.
    pub fn halves(&self) -> &[Word] {
        &self.halves
    }

    pub fn half(&self, j: usize) -> &Word {
        &self.halves[j]
    }

    pub fn pair(&self, i: usize) -> (&Word, &Word) {
        (&self.halves[2 * i], &self.halves[2 * i + 1])
    }

    pub fn relator(&self, i: usize) -> &Word {
        &self.base.relators[i]
    }

    /// The half presentation `⟨S | r_1, r_1', ...⟩`; duplicates are kept.
    pub fn half_presentation(&self) -> Presentation {
        Presentation {
            n: self.base.n,
            relators: self.halves.clone(),
        }
    }

    /// Locates a stored half. For a half stored more than once, the first
    /// occurrence wins; see [`HalvedPresentation::duplicate_halves`].
    pub fn pair_index(&self, r: &Word) -> Result<(usize, HalfRole)> {
        let j = *self
            .index
            .get(r)
            .and_then(|v| v.first())
            .ok_or_else(|| Error::Lookup(r.to_string()))?;
        Ok((j / 2, if j % 2 == 0 { HalfRole::First } else { HalfRole::Second }))
    }

    pub fn partner(&self, r: &Word) -> Result<&Word> {
        let (i, role) = self.pair_index(r)?;
        Ok(match role {
            HalfRole::First => &self.halves[2 * i + 1],
            HalfRole::Second => &self.halves[2 * i],
        })
    }

    /// Halves that occur at more than one position.
    pub fn duplicate_halves(&self) -> Vec<Word> {
        let mut d: Vec<Word> = self
            .index
            .iter()
            .filter(|(_, v)| v.len() > 1)
            .map(|(w, _)| w.clone())
            .collect();
        d.sort();
        d
    }

    /// Concatenates each pair back; equals `base` for any valid split.
    pub fn reassemble(&self) -> Presentation {
        let relators = (0..self.pairs())
            .map(|i| {
                let (a, b) = self.pair(i);
                a.concat_exact(b).expect("halves come from a reduced relator")
            })
            .collect();
        Presentation {
            n: self.base.n,
            relators,
        }
    }
}
