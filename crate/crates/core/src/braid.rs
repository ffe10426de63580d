//! Braid words, pure braids, linking numbers and word norms.
//!
//! Letters are signed 1-based Artin generators: `k` is `sigma_k`, `-k` its
//! inverse, so `[1, 1, -2]` is `sigma_1 sigma_1 sigma_2^-1`. Words are read
//! left to right in time. Strands are labelled by their starting position,
//! 0-based.
//!
//! Equality in the group is decided exactly through the Artin action on the
//! free group `F_n`, which is faithful. Word norms are taken with respect to
//! the band generators `A_ij` of the pure braid group.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::configspace::{min_linear_distance, COLLISION_THRESHOLD};
use crate::flow::Trajectory;
use crate::geometry::Surface;
use crate::scalar::{binomial, Real};

/// Projections closer than this at a crossing (or at the start) are treated
/// as coincident.
pub const PROJECTION_TOLERANCE: f64 = 1e-10;

/// Total free-group image length above which exact search is skipped.
const IMAGE_CAP: usize = 400_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BraidError {
    #[error("generator {letter} out of range for {n} strands")]
    GeneratorOutOfRange { letter: i32, n: usize },
    #[error("braid is not pure")]
    NotPure,
    #[error("strands {a} and {b} have coincident projections at step {step}")]
    DegenerateProjection { step: usize, a: usize, b: usize },
    #[error("strands {a} and {b} come within {distance:e} at step {step}")]
    Collision { step: usize, a: usize, b: usize, distance: f64 },
    #[error("strands must share a time grid with at least one sample")]
    InvalidStrands,
    #[error("strand counts differ ({0} vs {1})")]
    StrandCountMismatch(usize, usize),
    #[error("word-norm search budget exceeded, norm in [{}, {}]", .0.lower, .0.upper)]
    BudgetExceeded(WordNormEstimate),
    #[error("word norms are available for at most 4 strands, got {0}")]
    UnsupportedStrandCount(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    n_strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(n_strands: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        if let Some(&letter) = letters.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize >= n_strands) {
            return Err(BraidError::GeneratorOutOfRange { letter, n: n_strands });
        }
        Ok(BraidWord { n_strands, letters })
    }

    pub fn identity(n_strands: usize) -> Self {
        BraidWord { n_strands, letters: Vec::new() }
    }

    /// `sigma_k^e`.
    pub fn generator(n_strands: usize, k: i32) -> Result<Self, BraidError> {
        Self::new(n_strands, vec![k])
    }

    pub fn n_strands(&self) -> usize {
        self.n_strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn free_reduce(&self) -> Self {
        BraidWord { n_strands: self.n_strands, letters: free_reduce_letters(&self.letters) }
    }

    pub fn inverse(&self) -> Self {
        BraidWord { n_strands: self.n_strands, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    /// `self` followed by `other`, freely reduced.
    pub fn concat(&self, other: &BraidWord) -> Result<Self, BraidError> {
        if self.n_strands != other.n_strands {
            return Err(BraidError::StrandCountMismatch(self.n_strands, other.n_strands));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { n_strands: self.n_strands, letters: free_reduce_letters(&letters) })
    }

    /// `self^k`; negative powers invert.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        BraidWord { n_strands: self.n_strands, letters: free_reduce_letters(&letters) }
    }

    /// `perm[s]` is the final position of the strand starting at position `s`.
    pub fn permutation(&self) -> Vec<usize> {
        let at_pos = strands_at_positions(self.n_strands, &self.letters);
        let mut perm = vec![0; self.n_strands];
        for (pos, &s) in at_pos.iter().enumerate() {
            perm[s] = pos;
        }
        perm
    }

    pub fn is_pure(&self) -> bool {
        self.permutation().iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|l| l.signum() as i64).sum()
    }

    /// Signed crossing counts between strands `a < b`, indexed `[a][b]`.
    pub fn crossing_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.n_strands;
        let mut cross = vec![vec![0i64; n]; n];
        let mut at_pos: Vec<usize> = (0..n).collect();
        for &l in &self.letters {
            let k = l.unsigned_abs() as usize;
            let (a, b) = (at_pos[k - 1], at_pos[k]);
            cross[a.min(b)][a.max(b)] += l.signum() as i64;
            at_pos.swap(k - 1, k);
        }
        cross
    }

    /// `A_ij` for strands `i < j` (0-based):
    /// `sigma_{j-1} ... sigma_{i+1} sigma_i^2 sigma_{i+1}^-1 ... sigma_{j-1}^-1`
    /// in 1-based generator names.
    pub fn band_generator(n_strands: usize, i: usize, j: usize) -> Self {
        assert!(i < j && j < n_strands, "band generator needs i < j < n");
        let mut letters: Vec<i32> = ((i + 2)..=j).rev().map(|k| k as i32).collect();
        letters.push(i as i32 + 1);
        letters.push(i as i32 + 1);
        letters.extend(((i + 2)..=j).map(|k| -(k as i32)));
        BraidWord { n_strands, letters }
    }

    /// Exact equality in `B_n`.
    pub fn group_eq(&self, other: &BraidWord) -> bool {
        self.n_strands == other.n_strands && artin_key(self) == artin_key(other)
    }

    pub fn is_trivial(&self) -> bool {
        self.group_eq(&BraidWord::identity(self.n_strands))
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

fn free_reduce_letters<L: Copy + PartialEq + std::ops::Neg<Output = L>>(letters: &[L]) -> Vec<L> {
    let mut out: Vec<L> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn strands_at_positions(n: usize, letters: &[i32]) -> Vec<usize> {
    let mut at_pos: Vec<usize> = (0..n).collect();
    for &l in letters {
        let k = l.unsigned_abs() as usize;
        at_pos.swap(k - 1, k);
    }
    at_pos
}

/// A braid whose permutation is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PureBraid {
    word: BraidWord,
}

impl PureBraid {
    pub fn new(word: BraidWord) -> Result<Self, BraidError> {
        if word.is_pure() {
            Ok(PureBraid { word })
        } else {
            Err(BraidError::NotPure)
        }
    }

    pub fn identity(n_strands: usize) -> Self {
        PureBraid { word: BraidWord::identity(n_strands) }
    }

    pub fn band_generator(n_strands: usize, i: usize, j: usize) -> Self {
        PureBraid { word: BraidWord::band_generator(n_strands, i, j) }
    }

    pub fn word(&self) -> &BraidWord {
        &self.word
    }

    pub fn n_strands(&self) -> usize {
        self.word.n_strands
    }

    pub fn concat(&self, other: &PureBraid) -> Result<Self, BraidError> {
        Ok(PureBraid { word: self.word.concat(&other.word)? })
    }

    pub fn inverse(&self) -> Self {
        PureBraid { word: self.word.inverse() }
    }

    pub fn pow(&self, k: i64) -> Self {
        PureBraid { word: self.word.pow(k) }
    }

    /// Linking number of strands `i` and `j`: half their signed crossings.
    pub fn lk(&self, i: usize, j: usize) -> i64 {
        assert!(i != j && i.max(j) < self.n_strands(), "strand indices out of range");
        self.word.crossing_matrix()[i.min(j)][i.max(j)] / 2
    }

    /// All `lk_ij` for `i < j`, in lexicographic pair order.
    pub fn linking_numbers(&self) -> Vec<i64> {
        let n = self.n_strands();
        let cross = self.word.crossing_matrix();
        let mut out = Vec::with_capacity(binomial(n, 2));
        for (i, row) in cross.iter().enumerate() {
            out.extend(row[i + 1..].iter().map(|c| c / 2));
        }
        out
    }
}

/// Linking number of a word, rejecting non-pure input.
pub fn lk(word: &BraidWord, i: usize, j: usize) -> Result<i64, BraidError> {
    Ok(PureBraid::new(word.clone())?.lk(i, j))
}

// ---------------------------------------------------------------------------
// Extraction

/// A braid read off from planar strands, together with the strand labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractedBraid {
    pub word: BraidWord,
    /// `order[p]` is the input strand sitting at position `p` at the start.
    pub order: Vec<usize>,
}

impl ExtractedBraid {
    /// Linking number between input strands `a` and `b`.
    pub fn strand_lk(&self, a: usize, b: usize) -> Result<i64, BraidError> {
        let pos = |s: usize| self.order.iter().position(|&o| o == s).expect("strand label");
        lk(&self.word, pos(a), pos(b))
    }

    pub fn pure(&self) -> Result<PureBraid, BraidError> {
        PureBraid::new(self.word.clone())
    }
}

/// Reads a braid off `n` planar strands sampled on a common time grid.
///
/// Points move linearly between samples. Strands are ordered along
/// `u = (cos angle, sin angle)`; every exchange of neighbours is one letter,
/// positive when the strand moving up in the order has the smaller
/// coordinate along `w = (-sin angle, cos angle)`. A counterclockwise
/// exchange of two points is therefore `sigma_1`.
pub fn extract_braid<T: Real>(strands: &[Vec<[T; 2]>], angle: T) -> Result<ExtractedBraid, BraidError> {
    let n = strands.len();
    let len = strands.first().map_or(0, |s| s.len());
    if len == 0 || strands.iter().any(|s| s.len() != len) {
        return Err(BraidError::InvalidStrands);
    }
    let (c, s) = (angle.cos(), angle.sin());
    let proj = |p: &[T; 2]| (p[0] * c + p[1] * s, -p[0] * s + p[1] * c);
    let tol = T::lit(PROJECTION_TOLERANCE);
    let threshold = T::lit(COLLISION_THRESHOLD);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| proj(&strands[a][0]).0.partial_cmp(&proj(&strands[b][0]).0).expect("finite coordinates"));
    for w in order.windows(2) {
        if (proj(&strands[w[1]][0]).0 - proj(&strands[w[0]][0]).0).abs() < tol {
            return Err(BraidError::DegenerateProjection { step: 0, a: w[0], b: w[1] });
        }
    }
    let initial = order.clone();
    let mut letters = Vec::new();
    let mut events: Vec<(T, usize, usize)> = Vec::new();
    for step in 0..len.saturating_sub(1) {
        // collisions along the linear interpolation
        for a in 0..n {
            for b in (a + 1)..n {
                let d = min_linear_distance(&strands[a][step], &strands[b][step], &strands[a][step + 1], &strands[b][step + 1]);
                if d < threshold {
                    return Err(BraidError::Collision { step, a, b, distance: d.to_f64_lossy() });
                }
            }
        }
        events.clear();
        for (pl, &l) in order.iter().enumerate() {
            for &r in &order[pl + 1..] {
                let d0 = proj(&strands[r][step]).0 - proj(&strands[l][step]).0;
                let d1 = proj(&strands[r][step + 1]).0 - proj(&strands[l][step + 1]).0;
                if d1 < T::zero() {
                    let t = if d0 > T::zero() { d0 / (d0 - d1) } else { T::zero() };
                    events.push((t, l, r));
                }
            }
        }
        events.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite crossing times"));
        for &(t, l, r) in &events {
            let p = order.iter().position(|&o| o == l).expect("strand in order");
            if order.get(p + 1) != Some(&r) {
                return Err(BraidError::DegenerateProjection { step, a: l, b: r });
            }
            let at = |k: usize| {
                let (a, b) = (strands[k][step], strands[k][step + 1]);
                proj(&[a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]).1
            };
            let (wl, wr) = (at(l), at(r));
            if (wl - wr).abs() < tol {
                return Err(BraidError::DegenerateProjection { step, a: l, b: r });
            }
            let g = p as i32 + 1;
            letters.push(if wl < wr { g } else { -g });
            order.swap(p, p + 1);
        }
    }
    Ok(ExtractedBraid { word: BraidWord { n_strands: n, letters: free_reduce_letters(&letters) }, order: initial })
}

/// Braid of a closed loop of configurations, written in the angle-0 frame
/// whatever projection is used to read it.
///
/// Reading at `angle` is reading the rotated loop `R_{-angle} gamma` at angle
/// 0; the rigid rotation `delta: s -> R_{-s angle} q` of the base
/// configuration conjugates one into the other, so `delta w delta^-1` is the
/// angle-0 braid.
pub fn extract_loop_braid<T: Real>(strands: &[Vec<[T; 2]>], angle: T) -> Result<ExtractedBraid, BraidError> {
    let w = extract_braid(strands, angle)?;
    if angle == T::zero() {
        return Ok(w);
    }
    let base: Vec<[T; 2]> = strands.iter().map(|s| s[0]).collect();
    let steps = (angle.abs().to_f64_lossy() * 64.0).ceil() as usize + 2;
    let rotation: Vec<Vec<[T; 2]>> = base
        .iter()
        .map(|p| {
            (0..=steps)
                .map(|k| {
                    let a = -angle * T::lit(k as f64 / steps as f64);
                    let (c, s) = (a.cos(), a.sin());
                    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
                })
                .collect()
        })
        .collect();
    let delta = extract_braid(&rotation, T::zero())?;
    // delta's final order is the angle-`angle` order of q, which is where w starts
    debug_assert_eq!(
        strands_at_positions(base.len(), &delta.word.letters).iter().map(|&p| delta.order[p]).collect::<Vec<_>>(),
        w.order
    );
    let word = delta.word.concat(&w.word)?.concat(&delta.word.inverse())?;
    Ok(ExtractedBraid { word, order: delta.order })
}

/// Planar chart coordinates of trajectories, ready for [`extract_braid`].
///
/// On the torus and the sphere the chart is only faithful when the motion
/// stays inside one chart disc away from the seams.
pub fn planar_strands<T: Real>(_surface: &Surface<T>, trajectories: &[Trajectory<T>]) -> Vec<Vec<[T; 2]>> {
    trajectories.iter().map(|t| t.points.iter().map(|p| p.chart).collect()).collect()
}

// ---------------------------------------------------------------------------
// Artin action on the free group

/// Images of the free generators `x_1..x_n` (letters `+-1..n`).
#[derive(Clone, Debug)]
struct FreeAut {
    images: Vec<Vec<i8>>,
}

impl FreeAut {
    fn identity(n: usize) -> Self {
        FreeAut { images: (1..=n as i8).map(|x| vec![x]).collect() }
    }

    fn image_of(&self, letter: i8) -> impl Iterator<Item = i8> + '_ {
        let img = &self.images[letter.unsigned_abs() as usize - 1];
        let inv = letter < 0;
        let len = img.len();
        (0..len).map(move |i| if inv { -img[len - 1 - i] } else { img[i] })
    }

    fn substitute(&self, word: &[i8]) -> Vec<i8> {
        let mut out: Vec<i8> = Vec::new();
        for &y in word {
            for l in self.image_of(y) {
                if out.last() == Some(&-l) {
                    out.pop();
                } else {
                    out.push(l);
                }
            }
        }
        out
    }

    /// `self o rho(sigma_k^e)`.
    fn apply(&mut self, letter: i32) {
        let k = letter.unsigned_abs() as i8;
        let (a, b) = (k, k + 1);
        let (ia, ib) = if letter > 0 {
            // x_k -> x_k x_{k+1} x_k^-1, x_{k+1} -> x_k
            (self.substitute(&[a, b, -a]), self.images[a as usize - 1].clone())
        } else {
            // x_k -> x_{k+1}, x_{k+1} -> x_{k+1}^-1 x_k x_{k+1}
            (self.images[b as usize - 1].clone(), self.substitute(&[-b, a, b]))
        };
        self.images[a as usize - 1] = ia;
        self.images[b as usize - 1] = ib;
    }

    fn total_len(&self) -> usize {
        self.images.iter().map(Vec::len).sum()
    }

    fn key(&self) -> Vec<i8> {
        let mut k = Vec::with_capacity(self.total_len() + self.images.len());
        for img in &self.images {
            k.extend_from_slice(img);
            k.push(0);
        }
        k
    }
}

fn artin_aut(word: &BraidWord) -> FreeAut {
    let mut aut = FreeAut::identity(word.n_strands);
    for &l in &word.letters {
        aut.apply(l);
    }
    aut
}

fn artin_key(word: &BraidWord) -> Vec<i8> {
    artin_aut(word).key()
}

// ---------------------------------------------------------------------------
// Word norms in the band generators

/// A letter in the band generators: `A_ij` or its inverse, strands 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BandLetter {
    pub i: usize,
    pub j: usize,
    pub inverse: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordNormEstimate {
    pub lower: u64,
    pub upper: u64,
    pub exact: Option<u64>,
}

impl WordNormEstimate {
    fn exact(v: u64) -> Self {
        WordNormEstimate { lower: v, upper: v, exact: Some(v) }
    }

    pub fn midpoint(&self) -> f64 {
        (self.lower + self.upper) as f64 / 2.0
    }

    pub fn half_width(&self) -> f64 {
        (self.upper - self.lower) as f64 / 2.0
    }
}

/// Identity ball radius per strand count; `max_bfs_depth` below this only
/// looks the element up.
pub fn ball_radius(n: usize) -> usize {
    match n {
        3 => 6,
        4 => 4,
        _ => 0,
    }
}

/// Default certification depth: norms up to this are computed exactly.
pub fn default_max_depth(n: usize) -> usize {
    match n {
        3 => 10,
        4 => 7,
        _ => 0,
    }
}

// band letters are coded as +-(index + 1) into the lexicographic pair list
type Code = i16;

struct NormTables {
    n: usize,
    pairs: Vec<(usize, usize)>,
    band_words: Vec<BraidWord>,
    ball: HashMap<Vec<i8>, Vec<Code>>,
    radius: usize,
    schreier: HashMap<(Vec<usize>, i32), Vec<Code>>,
}

impl NormTables {
    fn build(n: usize) -> Self {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
            }
        }
        let band_words = pairs.iter().map(|&(i, j)| BraidWord::band_generator(n, i, j)).collect();
        let mut tables = NormTables { n, pairs, band_words, ball: HashMap::new(), radius: ball_radius(n), schreier: HashMap::new() };
        tables.build_ball();
        tables.build_schreier();
        tables
    }

    fn codes(&self) -> impl Iterator<Item = Code> {
        let m = self.pairs.len() as Code;
        (1..=m).flat_map(|c| [c, -c])
    }

    fn apply_code(&self, aut: &mut FreeAut, code: Code) {
        let w = &self.band_words[code.unsigned_abs() as usize - 1];
        if code > 0 {
            w.letters.iter().for_each(|&l| aut.apply(l));
        } else {
            w.letters.iter().rev().for_each(|&l| aut.apply(-l));
        }
    }

    fn build_ball(&mut self) {
        let id = FreeAut::identity(self.n);
        self.ball.insert(id.key(), Vec::new());
        let mut frontier = vec![(id, Vec::<Code>::new())];
        for _ in 0..self.radius {
            let mut next = Vec::new();
            for (aut, word) in &frontier {
                for c in self.codes() {
                    if word.last() == Some(&-c) {
                        continue;
                    }
                    let mut a = aut.clone();
                    self.apply_code(&mut a, c);
                    let key = a.key();
                    if !self.ball.contains_key(&key) {
                        let mut w = word.clone();
                        w.push(c);
                        self.ball.insert(key, w.clone());
                        next.push((a, w));
                    }
                }
            }
            frontier = next;
        }
    }

    /// Shortest band word for the element with automorphism `aut`, if its
    /// norm is at most `max_depth`. Stops as soon as `floor` is reached.
    fn search(&self, aut: &FreeAut, max_depth: usize, floor: usize) -> Option<Vec<Code>> {
        let depth = max_depth.saturating_sub(self.radius);
        let mut best: Option<Vec<Code>> = None;
        let mut seen: HashSet<Vec<i8>> = HashSet::new();
        seen.insert(aut.key());
        let mut frontier = vec![(aut.clone(), Vec::<Code>::new())];
        for level in 0..=depth {
            for (a, v) in &frontier {
                if let Some(u) = self.ball.get(&a.key()) {
                    let total = level + u.len();
                    if total <= max_depth && best.as_ref().is_none_or(|b| total < b.len()) {
                        // g = (g v) v^-1
                        let mut w = u.clone();
                        w.extend(v.iter().rev().map(|c| -c));
                        best = Some(w);
                    }
                }
            }
            if let Some(b) = &best {
                if b.len() <= floor || b.len() <= level + 1 {
                    break;
                }
            }
            if level == depth {
                break;
            }
            let mut next = Vec::new();
            for (a, v) in &frontier {
                for c in self.codes() {
                    if v.last() == Some(&-c) {
                        continue;
                    }
                    let mut b = a.clone();
                    self.apply_code(&mut b, c);
                    if seen.insert(b.key()) {
                        let mut w = v.clone();
                        w.push(c);
                        next.push((b, w));
                    }
                }
            }
            frontier = next;
        }
        best
    }

    fn build_schreier(&mut self) {
        let n = self.n;
        let mut entries = HashMap::new();
        for perm in permutations(n) {
            let t = transversal(&perm);
            for g in 1..n as i32 {
                for l in [g, -g] {
                    let mut after = perm.clone();
                    after.swap(g as usize - 1, g as usize);
                    let mut letters = t.clone();
                    letters.push(l);
                    letters.extend(transversal(&after).iter().rev().map(|x| -x));
                    let aut = artin_aut(&BraidWord { n_strands: n, letters });
                    let word = self
                        .search(&aut, self.radius + 4, 0)
                        .expect("every Schreier generator lies within the search radius");
                    entries.insert((perm.clone(), l), word);
                }
            }
        }
        self.schreier = entries;
    }

    fn rewrite(&self, word: &BraidWord) -> Vec<Code> {
        let mut state: Vec<usize> = (0..self.n).collect();
        let mut out = Vec::new();
        for &l in &word.letters {
            out.extend_from_slice(&self.schreier[&(state.clone(), l)]);
            let k = l.unsigned_abs() as usize;
            state.swap(k - 1, k);
        }
        free_reduce_letters(&out)
    }

    fn to_letters(&self, codes: &[Code]) -> Vec<BandLetter> {
        codes
            .iter()
            .map(|&c| {
                let (i, j) = self.pairs[c.unsigned_abs() as usize - 1];
                BandLetter { i, j, inverse: c < 0 }
            })
            .collect()
    }
}

/// Positive permutation braid taking the identity arrangement to `at_pos`.
fn transversal(at_pos: &[usize]) -> Vec<i32> {
    let mut a = at_pos.to_vec();
    let mut swaps = Vec::new();
    let mut sorted = false;
    while !sorted {
        sorted = true;
        for k in 0..a.len().saturating_sub(1) {
            if a[k] > a[k + 1] {
                a.swap(k, k + 1);
                swaps.push(k as i32 + 1);
                sorted = false;
            }
        }
    }
    swaps.reverse();
    swaps
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn tables(n: usize) -> &'static NormTables {
    static P3: OnceLock<NormTables> = OnceLock::new();
    static P4: OnceLock<NormTables> = OnceLock::new();
    match n {
        3 => P3.get_or_init(|| NormTables::build(3)),
        4 => P4.get_or_init(|| NormTables::build(4)),
        _ => unreachable!("norm tables exist for 3 and 4 strands"),
    }
}

/// `sum_{i<j} |lk_ij|`: every band generator moves exactly one linking
/// number by one.
pub fn linking_lower_bound(b: &PureBraid) -> u64 {
    b.linking_numbers().iter().map(|l| l.unsigned_abs()).sum()
}

/// Some expression of `b` in band generators (from Schreier rewriting).
pub fn band_expression(b: &PureBraid) -> Result<Vec<BandLetter>, BraidError> {
    let n = b.n_strands();
    match n {
        0 | 1 => Ok(Vec::new()),
        2 => {
            let k = b.lk(0, 1);
            Ok(vec![BandLetter { i: 0, j: 1, inverse: k < 0 }; k.unsigned_abs() as usize])
        }
        3 | 4 => {
            let t = tables(n);
            Ok(t.to_letters(&t.rewrite(&b.word)))
        }
        _ => Err(BraidError::UnsupportedStrandCount(n)),
    }
}

/// Expands band letters back into Artin generators.
pub fn band_word(n_strands: usize, letters: &[BandLetter]) -> BraidWord {
    let mut out = Vec::new();
    for l in letters {
        let a = BraidWord::band_generator(n_strands, l.i, l.j);
        let a = if l.inverse { a.inverse() } else { a };
        out.extend_from_slice(&a.letters);
    }
    BraidWord { n_strands, letters: free_reduce_letters(&out) }
}

/// Word norm `|b|` in the band generators `A_ij^{+-1}`.
///
/// Norms up to `max_bfs_depth` are exact: the element is searched
/// breadth-first towards a precomputed ball about the identity, vertices
/// being identified through the Artin action. Otherwise the error carries
/// bounds: the linking lower bound (raised past the searched depth) and the
/// length of the Schreier rewrite of the input.
pub fn word_norm(b: &PureBraid, max_bfs_depth: usize) -> Result<WordNormEstimate, BraidError> {
    let n = b.n_strands();
    let lower = linking_lower_bound(b);
    match n {
        0 | 1 => return Ok(WordNormEstimate::exact(0)),
        2 => return Ok(WordNormEstimate::exact(lower)),
        3 | 4 => {}
        _ => return Err(BraidError::UnsupportedStrandCount(n)),
    }
    let t = tables(n);
    let upper = t.rewrite(&b.word).len() as u64;
    if upper == lower {
        return Ok(WordNormEstimate::exact(lower));
    }
    let aut = artin_aut(&b.word);
    if aut.total_len() <= IMAGE_CAP {
        if let Some(w) = t.search(&aut, max_bfs_depth, lower as usize) {
            return Ok(WordNormEstimate::exact(w.len() as u64));
        }
        let mut raised = lower.max(max_bfs_depth as u64 + 1);
        // each generator changes the total linking number by one
        if raised % 2 != lower % 2 {
            raised += 1;
        }
        return Err(BraidError::BudgetExceeded(WordNormEstimate { lower: raised.min(upper), upper, exact: None }));
    }
    Err(BraidError::BudgetExceeded(WordNormEstimate { lower, upper, exact: None }))
}

/// [`word_norm`] with budget overruns folded into the returned bounds.
pub fn word_norm_bounds(b: &PureBraid, max_bfs_depth: usize) -> Result<WordNormEstimate, BraidError> {
    match word_norm(b, max_bfs_depth) {
        Err(BraidError::BudgetExceeded(e)) => Ok(e),
        r => r,
    }
}
