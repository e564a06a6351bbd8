//! `(m, n)` Dyck paths and the statistics that enter the closed formula.
//!
//! All geometry is integer: the signed distance of a lattice point to the
//! diagonal is measured by `m*y - n*x`, and every comparison against a line
//! of slope `n/m` is cross-multiplied.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{KhrError, Result};

pub fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Parameters of the `(m, n)` torus knot: `m` columns, `n` rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct KnotParams {
    m: i64,
    n: i64,
}

impl KnotParams {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m <= 0 || n <= 0 {
            return Err(KhrError::InvalidParams { m, n });
        }
        let g = gcd(m, n);
        if g != 1 {
            return Err(KhrError::LinksUnsupported { m, n, gcd: g });
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn transposed(&self) -> Self {
        Self { m: self.n, n: self.m }
    }

    /// Number of `(m, n)` Dyck paths, `C(m+n, n) / (m+n)`.
    pub fn rational_catalan(&self) -> u128 {
        let total = (self.m + self.n) as u128;
        let k = self.n.min(self.m) as u128;
        let mut binom: u128 = 1;
        for i in 0..k {
            binom = binom * (total - i) / (i + 1);
        }
        binom / total
    }

    /// All coprime pairs with `m + n <= max_sum`, ordered by `(m + n, m)`.
    pub fn coprime_pairs_up_to(max_sum: i64) -> Vec<Self> {
        let mut out = Vec::new();
        for s in 2..=max_sum {
            for m in 1..s {
                if let Ok(p) = Self::new(m, s - m) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Signed distance proxy `m*y - n*x` of `p` to the diagonal.
    pub fn distance(&self, p: Point) -> i64 {
        self.m * p.y - self.n * p.x
    }
}

impl fmt::Display for KnotParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

pub fn distance(params: KnotParams, p: Point) -> i64 {
    params.distance(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    /// Vertical step `(0, 1)`.
    N,
    /// Horizontal step `(1, 0)`.
    E,
}

/// Kind of turn the path makes at one of its interior vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    /// N then N.
    Vertical,
    /// E then E.
    Horizontal,
    /// N then E.
    Outer,
    /// E then N.
    Inner,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyckPath {
    params: KnotParams,
    steps: Vec<Step>,
}

impl DyckPath {
    pub fn new(params: KnotParams, steps: Vec<Step>) -> Result<Self> {
        let (m, n) = (params.m(), params.n());
        let ns = steps.iter().filter(|s| **s == Step::N).count() as i64;
        if ns != n || steps.len() as i64 != m + n {
            return Err(KhrError::InvalidPath(format!(
                "expected {m} E and {n} N steps, got {} steps with {ns} N",
                steps.len()
            )));
        }
        let mut p = Point::new(0, 0);
        for s in &steps {
            match s {
                Step::N => p.y += 1,
                Step::E => p.x += 1,
            }
            if params.distance(p) < 0 {
                return Err(KhrError::InvalidPath(format!("vertex {p} lies below the diagonal")));
            }
        }
        Ok(Self { params, steps })
    }

    pub fn parse(params: KnotParams, s: &str) -> Result<Self> {
        let steps = s
            .chars()
            .map(|c| match c {
                'N' => Ok(Step::N),
                'E' => Ok(Step::E),
                other => Err(KhrError::InvalidPath(format!("unexpected step '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(params, steps)
    }

    pub fn params(&self) -> KnotParams {
        self.params
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// All `m + n + 1` vertices, from `(0,0)` to `(m,n)`.
    pub fn vertices(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut p = Point::new(0, 0);
        out.push(p);
        for s in &self.steps {
            match s {
                Step::N => p.y += 1,
                Step::E => p.x += 1,
            }
            out.push(p);
        }
        out
    }

    /// Interior vertices (endpoints excluded) with their turn kind.
    pub fn interior_vertices(&self) -> Vec<(Point, VertexKind)> {
        let verts = self.vertices();
        self.steps
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let kind = match (w[0], w[1]) {
                    (Step::N, Step::N) => VertexKind::Vertical,
                    (Step::E, Step::E) => VertexKind::Horizontal,
                    (Step::N, Step::E) => VertexKind::Outer,
                    (Step::E, Step::N) => VertexKind::Inner,
                };
                (verts[i + 1], kind)
            })
            .collect()
    }

    /// Start points of the horizontal steps, i.e. the path height over each
    /// column `x` in `0..m`.
    fn column_heights(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.params.m() as usize);
        let mut y = 0;
        for s in &self.steps {
            match s {
                Step::N => y += 1,
                Step::E => out.push(y),
            }
        }
        out
    }

    /// Horizontal steps as their left endpoints and vertical steps as their
    /// bottom endpoints, in path order.
    fn segments(&self) -> Vec<(Step, Point)> {
        let verts = self.vertices();
        self.steps.iter().zip(verts).map(|(s, p)| (*s, p)).collect()
    }

    /// Whether `p` lies on the path.
    pub fn contains(&self, p: Point) -> bool {
        if p.x < 0 || p.x > self.params.m() {
            return false;
        }
        let h = self.column_heights();
        let lo = if p.x == 0 { 0 } else { h[p.x as usize - 1] };
        let hi = if p.x == self.params.m() { self.params.n() } else { h[p.x as usize] };
        (lo..=hi).contains(&p.y)
    }

    /// Whether `p` lies strictly below the path (and inside the rectangle).
    pub fn is_below(&self, p: Point) -> bool {
        if p.x < 1 || p.x > self.params.m() || p.y < 0 {
            return false;
        }
        p.y < self.column_heights()[p.x as usize - 1]
    }

    /// Unit cells lying between the path and the diagonal.
    pub fn area(&self) -> u32 {
        let params = self.params;
        self.column_heights()
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let i = i as i64;
                // cell [i, i+1] x [j, j+1] clears the diagonal iff its
                // lower-right corner does
                (0..h).filter(|&j| params.distance(Point::new(i + 1, j)) > 0).count() as u32
            })
            .sum()
    }

    /// Pairs (horizontal step, later vertical step) whose offset ranges
    /// along the diagonal direction overlap.
    pub fn hplus(&self) -> u32 {
        let params = self.params;
        let segs = self.segments();
        let mut count = 0;
        for (i, (s1, p1)) in segs.iter().enumerate() {
            if *s1 != Step::E {
                continue;
            }
            // offsets scaled by m
            let h_lo = params.distance(Point::new(p1.x + 1, p1.y));
            let h_hi = params.distance(*p1);
            for (s2, p2) in &segs[i + 1..] {
                if *s2 != Step::N {
                    continue;
                }
                let v_lo = params.distance(*p2);
                let v_hi = params.distance(Point::new(p2.x, p2.y + 1));
                let lo = h_lo.max(v_lo);
                let hi = h_hi.min(v_hi);
                debug_assert!(lo != hi, "tangential step pair in {self}");
                if lo < hi {
                    count += 1;
                }
            }
        }
        count
    }

    /// Whether any (horizontal, later vertical) step pair touches only at a
    /// single offset. Never true for coprime parameters.
    pub fn has_tangential_step_pair(&self) -> bool {
        let params = self.params;
        let segs = self.segments();
        segs.iter().enumerate().any(|(i, (s1, p1))| {
            *s1 == Step::E
                && segs[i + 1..].iter().any(|(s2, p2)| {
                    *s2 == Step::N && {
                        let lo = params.distance(Point::new(p1.x + 1, p1.y)).max(params.distance(*p2));
                        let hi = params.distance(*p1).min(params.distance(Point::new(p2.x, p2.y + 1)));
                        lo == hi
                    }
                })
        })
    }

    /// `(outer, inner)` corners: N-then-E and E-then-N vertices.
    pub fn corners(&self) -> (Vec<Point>, Vec<Point>) {
        let mut outer = Vec::new();
        let mut inner = Vec::new();
        for (p, kind) in self.interior_vertices() {
            match kind {
                VertexKind::Outer => outer.push(p),
                VertexKind::Inner => inner.push(p),
                _ => {}
            }
        }
        (outer, inner)
    }

    /// Number of steps crossed in their interior by the slope `n/m` line
    /// through `p`. Vertical and horizontal crossings are counted separately
    /// and must agree, which holds for interior points and corners; at a
    /// vertex in the middle of a straight run they differ by one and this
    /// returns an error.
    pub fn k_of(&self, p: Point) -> Result<u32> {
        let (m, n) = (self.params.m(), self.params.n());
        let (mut vertical, mut horizontal) = (0u32, 0u32);
        for (s, q) in self.segments() {
            match s {
                Step::N => {
                    // line height at x = q.x, scaled by m
                    let y = n * (q.x - p.x) + m * p.y;
                    if m * q.y < y && y < m * (q.y + 1) {
                        vertical += 1;
                    }
                }
                Step::E => {
                    // line abscissa at y = q.y, scaled by n
                    let x = n * p.x + m * (q.y - p.y);
                    if n * q.x < x && x < n * (q.x + 1) {
                        horizontal += 1;
                    }
                }
            }
        }
        if vertical != horizontal {
            return Err(KhrError::Internal(format!(
                "k({p}) on {self}: {vertical} vertical vs {horizontal} horizontal crossings"
            )));
        }
        Ok(vertical)
    }

    /// The outer corner farthest from the diagonal.
    pub fn most_distant_outer(&self) -> Result<Point> {
        let (outer, _) = self.corners();
        let best = outer
            .iter()
            .copied()
            .max_by_key(|p| self.params.distance(*p))
            .ok_or_else(|| KhrError::Internal(format!("{self} has no outer corner")))?;
        let d = self.params.distance(best);
        if outer.iter().filter(|p| self.params.distance(**p) == d).count() != 1 {
            return Err(KhrError::Internal(format!("{self}: tie in outer corner distance")));
        }
        Ok(best)
    }

    /// Outer corners without the most distant one.
    pub fn vstar(&self) -> Result<Vec<Point>> {
        let top = self.most_distant_outer()?;
        let (outer, _) = self.corners();
        Ok(outer.into_iter().filter(|p| *p != top).collect())
    }

    /// Lattice points strictly between the diagonal and the path.
    pub fn interior_points(&self) -> Vec<Point> {
        let params = self.params;
        let mut out = Vec::new();
        for (i, &h) in self.column_heights().iter().enumerate() {
            let x = i as i64 + 1;
            out.extend((0..h).map(|y| Point::new(x, y)).filter(|p| params.distance(*p) > 0));
        }
        out
    }

    /// Pairs (horizontal step, later vertical step).
    pub fn opairs(&self) -> u32 {
        let mut seen_e = 0;
        let mut count = 0;
        for s in &self.steps {
            match s {
                Step::E => seen_e += 1,
                Step::N => count += seen_e,
            }
        }
        count
    }

    pub fn stats(&self) -> Result<PathStats> {
        let (outer, inner) = self.corners();
        let vstar = self.vstar()?;
        let interior = self.interior_points();
        let mut kvals = BTreeMap::new();
        for p in interior.iter().chain(&outer).chain(&inner) {
            kvals.insert(*p, self.k_of(*p)?);
        }
        Ok(PathStats {
            area: self.area(),
            hplus: self.hplus(),
            outer,
            inner,
            vstar,
            interior,
            opairs: self.opairs(),
            kvals,
        })
    }
}

impl fmt::Display for DyckPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            f.write_str(match s {
                Step::N => "N",
                Step::E => "E",
            })?;
        }
        Ok(())
    }
}

impl Serialize for DyckPath {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses a path whose parameters are read off its step counts.
impl FromStr for DyckPath {
    type Err = KhrError;
    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().filter(|c| *c == 'N').count() as i64;
        let m = s.chars().filter(|c| *c == 'E').count() as i64;
        Self::parse(KnotParams::new(m, n)?, s)
    }
}

fn serialize_kvals<S: Serializer>(
    kvals: &BTreeMap<Point, u32>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(kvals.iter().map(|(p, k)| (p.to_string(), k)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathStats {
    pub area: u32,
    pub hplus: u32,
    pub outer: Vec<Point>,
    pub inner: Vec<Point>,
    pub vstar: Vec<Point>,
    pub interior: Vec<Point>,
    pub opairs: u32,
    #[serde(serialize_with = "serialize_kvals")]
    pub kvals: BTreeMap<Point, u32>,
}

/// All Dyck paths for `params`, in lexicographic order with `N < E`.
pub fn enumerate_paths(params: KnotParams) -> Vec<DyckPath> {
    fn extend(params: KnotParams, p: Point, steps: &mut Vec<Step>, out: &mut Vec<DyckPath>) {
        if p.x == params.m() && p.y == params.n() {
            out.push(DyckPath { params, steps: steps.clone() });
            return;
        }
        if p.y < params.n() {
            steps.push(Step::N);
            extend(params, Point::new(p.x, p.y + 1), steps, out);
            steps.pop();
        }
        let east = Point::new(p.x + 1, p.y);
        if p.x < params.m() && params.distance(east) >= 0 {
            steps.push(Step::E);
            extend(params, east, steps, out);
            steps.pop();
        }
    }
    let mut out = Vec::new();
    extend(params, Point::new(0, 0), &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kp(m: i64, n: i64) -> KnotParams {
        KnotParams::new(m, n).unwrap()
    }

    fn path(m: i64, n: i64, s: &str) -> DyckPath {
        DyckPath::parse(kp(m, n), s).unwrap()
    }

    fn pts(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    /// Every arrangement of the steps, filtered by the diagonal condition.
    fn brute_force_paths(m: i64, n: i64) -> Vec<String> {
        let len = (m + n) as u32;
        let mut out = Vec::new();
        for mask in 0u32..(1 << len) {
            if mask.count_ones() as i64 != n {
                continue;
            }
            let mut p = (0i64, 0i64);
            let mut ok = true;
            let mut s = String::new();
            for i in 0..len {
                if mask & (1 << (len - 1 - i)) != 0 {
                    p.1 += 1;
                    s.push('N');
                } else {
                    p.0 += 1;
                    s.push('E');
                }
                ok &= m * p.1 >= n * p.0;
            }
            if ok {
                out.push(s);
            }
        }
        out.sort_by(|a, b| b.cmp(a)); // 'N' > 'E' in ASCII; N-first order is descending
        out
    }

    #[test]
    fn params_validation() {
        assert!(matches!(KnotParams::new(4, 2), Err(KhrError::LinksUnsupported { gcd: 2, .. })));
        assert!(matches!(KnotParams::new(0, 3), Err(KhrError::InvalidParams { .. })));
        assert_eq!(kp(5, 3).rational_catalan(), 7);
        assert_eq!(kp(1, 1).rational_catalan(), 1);
    }

    #[test]
    fn enumerate_examples() {
        let names = |m, n| enumerate_paths(kp(m, n)).iter().map(|p| p.to_string()).collect::<Vec<_>>();
        assert_eq!(names(3, 2), ["NNEEE", "NENEE"]);
        assert_eq!(names(1, 1), ["NE"]);
        assert_eq!(names(2, 3), ["NNNEE", "NNENE"]);
        for (m, n) in [(3, 2), (2, 3), (5, 3), (4, 5), (7, 2)] {
            assert_eq!(names(m, n), brute_force_paths(m, n), "({m},{n})");
        }
    }

    #[test]
    fn catalan_counts() {
        for p in KnotParams::coprime_pairs_up_to(20) {
            assert_eq!(enumerate_paths(p).len() as u128, p.rational_catalan(), "{p}");
        }
    }

    #[test]
    fn distance_examples() {
        let p = kp(3, 2);
        assert_eq!(distance(p, Point::new(1, 1)), 1);
        assert_eq!(distance(p, Point::new(0, 2)), 6);
        assert_eq!(distance(p, Point::new(3, 2)), 0);
    }

    #[test]
    fn area_examples() {
        assert_eq!(path(3, 2, "NNEEE").area(), 1);
        assert_eq!(path(3, 2, "NENEE").area(), 0);
        assert_eq!(path(1, 4, "NNNNE").area(), 0);
    }

    #[test]
    fn hplus_examples() {
        assert_eq!(path(3, 2, "NENEE").hplus(), 1);
        assert_eq!(path(3, 2, "NNEEE").hplus(), 0);
        assert_eq!(path(2, 3, "NNENE").hplus(), 1);
    }

    #[test]
    fn corner_examples() {
        assert_eq!(path(3, 2, "NENEE").corners(), (pts(&[(0, 1), (1, 2)]), pts(&[(1, 1)])));
        assert_eq!(path(3, 2, "NNEEE").corners(), (pts(&[(0, 2)]), vec![]));
        assert_eq!(path(1, 1, "NE").corners(), (pts(&[(0, 1)]), vec![]));
    }

    #[test]
    fn k_examples() {
        assert_eq!(path(3, 2, "NENEE").k_of(Point::new(0, 1)).unwrap(), 1);
        assert_eq!(path(3, 2, "NNEEE").k_of(Point::new(1, 1)).unwrap(), 1);
        // The line through the top corner only meets the path at that corner.
        assert_eq!(path(3, 2, "NENEE").k_of(Point::new(1, 2)).unwrap(), 0);
    }

    #[test]
    fn vstar_examples() {
        assert_eq!(path(3, 2, "NNEEE").vstar().unwrap(), vec![]);
        assert_eq!(path(3, 2, "NENEE").vstar().unwrap(), pts(&[(0, 1)]));
        assert_eq!(path(1, 3, "NNNE").vstar().unwrap(), vec![]);
    }

    #[test]
    fn interior_examples() {
        assert_eq!(path(3, 2, "NNEEE").interior_points(), pts(&[(1, 1)]));
        assert_eq!(path(3, 2, "NENEE").interior_points(), vec![]);
        assert_eq!(path(1, 3, "NNNE").interior_points(), vec![]);
    }

    #[test]
    fn opairs_examples() {
        assert_eq!(path(3, 2, "NNEEE").opairs(), 0);
        assert_eq!(path(3, 2, "NENEE").opairs(), 1);
        assert_eq!(path(2, 3, "NNNEE").opairs(), 0);
    }

    #[test]
    fn invalid_paths() {
        assert!(DyckPath::parse(kp(3, 2), "ENNEE").is_err());
        assert!(DyckPath::parse(kp(3, 2), "NNEE").is_err());
        assert!(DyckPath::parse(kp(3, 2), "NNXEE").is_err());
        assert_eq!("NENEE".parse::<DyckPath>().unwrap(), path(3, 2, "NENEE"));
    }

    #[test]
    fn stats_json_field_names() {
        let s = serde_json::to_value(path(3, 2, "NENEE").stats().unwrap()).unwrap();
        assert_eq!(
            s,
            serde_json::json!({
                "area": 0, "hplus": 1,
                "outer": [[0, 1], [1, 2]], "inner": [[1, 1]],
                "vstar": [[0, 1]], "interior": [], "opairs": 1,
                "kvals": {"(0,1)": 1, "(1,1)": 1, "(1,2)": 0}
            })
        );
    }
}
