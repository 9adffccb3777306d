//! A-mediated sets.
//!
//! For a lattice set `M`, `Ā(M)` is the set of midpoints of distinct even
//! points of `M`. `M` is A-mediated when `A ⊆ M ⊆ Ā(M) ∪ A`. The maximal
//! A-mediated set `A*` is the greatest fixpoint of deleting unmediated
//! points from the lattice points of `conv(A)`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::{Arc, OnceLock, RwLock};

use crate::geometry::{fmt_points, Simplex};
use crate::poly::Exponent;
use crate::SoncError;

/// Finite lattice set with lexicographic iteration.
pub type LatticeSet = BTreeSet<Exponent>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MediatedSet {
    trellis: Simplex,
    points: LatticeSet,
}

impl MediatedSet {
    /// Checks `A ⊆ M ⊆ Ā(M) ∪ A` before accepting `points`.
    pub fn new(trellis: Simplex, points: LatticeSet) -> Result<Self, SoncError> {
        if !trellis.is_even() {
            return Err(SoncError::InvalidSimplex("trellis must be even".into()));
        }
        if !is_mediated_set(&points, &trellis) {
            return Err(SoncError::InvalidSimplex(format!(
                "{} is not mediated for {}",
                fmt_points(&points.iter().cloned().collect::<Vec<_>>()),
                fmt_points(trellis.vertices())
            )));
        }
        Ok(MediatedSet { trellis, points })
    }

    pub fn trellis(&self) -> &Simplex {
        &self.trellis
    }

    pub fn points(&self) -> &LatticeSet {
        &self.points
    }

    pub fn contains(&self, p: &Exponent) -> bool {
        self.points.contains(p)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `Ā(M)`: midpoints of pairs of distinct even points of `M`.
pub fn averages(m: &LatticeSet) -> LatticeSet {
    let even: Vec<&Exponent> = m.iter().filter(|p| p.is_even()).collect();
    let mut out = LatticeSet::new();
    for (i, u) in even.iter().enumerate() {
        for v in &even[i + 1..] {
            if let Some(mid) = u.midpoint(v) {
                out.insert(mid);
            }
        }
    }
    out
}

/// Whether `p = (u+v)/2` for some distinct even `u, v` in `set`.
pub(crate) fn has_witness<'a, I>(
    p: &Exponent,
    even_points: I,
    contains: impl Fn(&Exponent) -> bool,
) -> bool
where
    I: IntoIterator<Item = &'a Exponent>,
{
    even_points.into_iter().any(|u| {
        u != p
            && p.reflect(u)
                .is_some_and(|v| v != *u && v.is_even() && contains(&v))
    })
}

pub fn is_mediated_set(m: &LatticeSet, trellis: &Simplex) -> bool {
    let a: HashSet<&Exponent> = trellis.vertices().iter().collect();
    if !a.iter().all(|v| m.contains(*v)) {
        return false;
    }
    let even: Vec<&Exponent> = m.iter().filter(|p| p.is_even()).collect();
    m.iter()
        .filter(|p| !a.contains(p))
        .all(|p| has_witness(p, even.iter().copied(), |v| m.contains(v)))
}

fn cache() -> &'static RwLock<HashMap<Vec<Exponent>, Arc<LatticeSet>>> {
    static CACHE: OnceLock<RwLock<HashMap<Vec<Exponent>, Arc<LatticeSet>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The maximal A-mediated set `A*`, cached per trellis.
pub fn maximal_mediated_set(trellis: &Simplex) -> Result<MediatedSet, SoncError> {
    if !trellis.is_even() {
        return Err(SoncError::InvalidSimplex("trellis must be even".into()));
    }
    let key = trellis.sorted_vertices();
    let hit = cache().read().unwrap().get(&key).cloned();
    let points = match hit {
        Some(p) => p,
        None => {
            let computed = Arc::new(compute_maximal(trellis));
            cache()
                .write()
                .unwrap()
                .entry(key)
                .or_insert(computed)
                .clone()
        }
    };
    Ok(MediatedSet {
        trellis: trellis.clone(),
        points: (*points).clone(),
    })
}

fn compute_maximal(trellis: &Simplex) -> LatticeSet {
    let all = trellis.lattice_points();
    let a: HashSet<Exponent> = trellis.vertices().iter().cloned().collect();
    let mut alive: HashSet<Exponent> = all.iter().cloned().collect();
    let mut even: BTreeSet<Exponent> = all.iter().filter(|p| p.is_even()).cloned().collect();
    let mut queue: VecDeque<Exponent> = all.iter().filter(|p| !a.contains(*p)).cloned().collect();
    let mut queued: HashSet<Exponent> = queue.iter().cloned().collect();
    while let Some(p) = queue.pop_front() {
        queued.remove(&p);
        if !alive.contains(&p) {
            continue;
        }
        if has_witness(&p, even.iter(), |v| alive.contains(v)) {
            continue;
        }
        alive.remove(&p);
        if p.is_even() {
            even.remove(&p);
            // midpoints that used p as an endpoint may have lost their witness
            for u in &even {
                if let Some(mid) = p.midpoint(u) {
                    if alive.contains(&mid) && !a.contains(&mid) && queued.insert(mid.clone()) {
                        queue.push_back(mid);
                    }
                }
            }
        }
    }
    let out: LatticeSet = alive.into_iter().collect();
    debug_assert!(out.iter().all(|p| all.binary_search(p).is_ok()));
    out
}

/// `A* = conv(A) ∩ N^n`.
pub fn is_h_trellis(trellis: &Simplex) -> Result<bool, SoncError> {
    let star = maximal_mediated_set(trellis)?;
    Ok(star.len() == trellis.lattice_points().len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[u32]) -> Exponent {
        Exponent(v.to_vec())
    }

    fn set(pts: &[&[u32]]) -> LatticeSet {
        pts.iter().map(|p| e(p)).collect()
    }

    fn simplex(pts: &[&[u32]]) -> Simplex {
        Simplex::new(pts.iter().map(|p| e(p)).collect()).unwrap()
    }

    #[test]
    fn averages_examples() {
        assert_eq!(
            averages(&set(&[&[0, 0], &[2, 0], &[0, 2]])),
            set(&[&[1, 0], &[0, 1], &[1, 1]])
        );
        assert!(averages(&set(&[&[0, 0]])).is_empty());
        let avg = averages(&set(&[&[0, 0], &[4, 0], &[0, 4], &[2, 2], &[2, 0]]));
        for p in [&[2, 2], &[1, 1], &[3, 1], &[2, 1]] {
            assert!(avg.contains(&e(p)), "{p:?}");
        }
    }

    #[test]
    fn mediated_membership() {
        let a = simplex(&[&[0, 0], &[4, 0], &[0, 4]]);
        let m = set(&[&[0, 0], &[4, 0], &[0, 4], &[2, 1], &[2, 2], &[2, 0]]);
        assert!(is_mediated_set(&m, &a));
        let bare: LatticeSet = a.vertices().iter().cloned().collect();
        assert!(is_mediated_set(&bare, &a));
        let motzkin = simplex(&[&[0, 0], &[4, 2], &[2, 4]]);
        let m = set(&[&[0, 0], &[4, 2], &[2, 4], &[2, 2]]);
        assert!(!is_mediated_set(&m, &motzkin));
    }

    #[test]
    fn maximal_sets() {
        let a = simplex(&[&[0, 0], &[2, 0], &[0, 2]]);
        assert_eq!(maximal_mediated_set(&a).unwrap().len(), 6);
        assert!(is_h_trellis(&a).unwrap());

        let motzkin = simplex(&[&[0, 0], &[4, 2], &[2, 4]]);
        let star = maximal_mediated_set(&motzkin).unwrap();
        assert_eq!(
            star.points(),
            &set(&[&[0, 0], &[4, 2], &[2, 4], &[2, 1], &[1, 2], &[3, 3]])
        );
        assert!(!star.contains(&e(&[2, 2])));
        assert!(!is_h_trellis(&motzkin).unwrap());

        let seg = simplex(&[&[0], &[2]]);
        assert_eq!(
            maximal_mediated_set(&seg).unwrap().points(),
            &set(&[&[0], &[1], &[2]])
        );
    }

    #[test]
    fn mediated_set_constructor_validates() {
        let motzkin = simplex(&[&[0, 0], &[4, 2], &[2, 4]]);
        assert!(
            MediatedSet::new(motzkin.clone(), set(&[&[0, 0], &[4, 2], &[2, 4], &[2, 2]])).is_err()
        );
        assert!(MediatedSet::new(motzkin, set(&[&[0, 0], &[4, 2], &[2, 4], &[2, 1]])).is_ok());
    }
}
