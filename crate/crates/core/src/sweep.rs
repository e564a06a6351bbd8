//! Sweep-line evaluation of a coloring.
//!
//! A coloring is a family of disjoint intervals on a line of slope slightly
//! below `n/m`. Each interval starts on the vertical grid line `x = A` and
//! ends on the horizontal grid line `y = B`. Moving the line upward, it meets
//! the lattice points in order of increasing `m*y - n*x`; at every point one
//! local rule fires:
//!
//! | rule       | configuration at `p`              | effect                      |
//! |------------|-----------------------------------|-----------------------------|
//! | Contract   | `A = x(p)`, `B = y(p)`            | interval disappears         |
//! | StartPass  | `A = x(p)`, `B > y(p)`            | none                        |
//! | EndPass    | `B = y(p)`, `A < x(p)`            | none                        |
//! | Branch     | `A < x(p)`, `B > y(p)`            | split at `p`, or keep       |
//!
//! Positions along the line are never represented numerically; the four
//! integer conditions above decide everything.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::dyck::{DyckPath, KnotParams, Point, Step, VertexKind};
use crate::error::{KhrError, Result};
use crate::laurent::{Invariant, LaurentPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    /// `x` of the vertical grid line holding the start point.
    pub start: i64,
    /// `y` of the horizontal grid line holding the end point.
    pub end: i64,
}

impl Interval {
    pub const fn new(start: i64, end: i64) -> Self {
        Self { start, end }
    }

    /// Sweep parameter at which the interval shrinks to a point.
    fn collapse_at(&self, params: KnotParams) -> i64 {
        params.distance(Point::new(self.start, self.end))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    params: KnotParams,
    intervals: Vec<Interval>,
}

impl Coloring {
    /// Intervals must be listed left to right.
    pub fn new(params: KnotParams, intervals: Vec<Interval>) -> Result<Self> {
        let c = Self { params, intervals };
        c.check_order()?;
        Ok(c)
    }

    /// The single interval from `(0, eps)` to `(m + eps, n)`.
    pub fn initial(params: KnotParams) -> Self {
        Self { params, intervals: vec![Interval::new(0, params.n())] }
    }

    pub fn params(&self) -> KnotParams {
        self.params
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Number of intervals.
    pub fn k(&self) -> usize {
        self.intervals.len()
    }

    /// Strand count of the associated braid while the line sits just past
    /// sweep parameter `d`: each interval contributes one strand plus one per
    /// vertical grid line it crosses.
    pub fn strand_count(&self, d: i64) -> i64 {
        let m = self.params.m();
        self.intervals
            .iter()
            .map(|iv| 1 + (iv.collapse_at(self.params) - d - 1).div_euclid(m))
            .sum()
    }

    fn check_order(&self) -> Result<()> {
        for w in self.intervals.windows(2) {
            if !(w[0].start < w[1].start && w[0].end < w[1].end) {
                return Err(KhrError::Internal(format!("intervals out of order: {self}")));
            }
        }
        Ok(())
    }

    /// Order plus aliveness: every interval still has positive length once
    /// the line has moved past `d`.
    fn check_invariants(&self, d: i64) -> Result<()> {
        self.check_order()?;
        if let Some(iv) = self.intervals.iter().find(|iv| iv.collapse_at(self.params) <= d) {
            return Err(KhrError::Internal(format!("dead interval {iv:?} past d = {d} in {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({},{})", iv.start, iv.end)?;
        }
        f.write_str("]")
    }
}

pub fn initial_coloring(params: KnotParams) -> Coloring {
    Coloring::initial(params)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Event {
    pub point: Point,
    pub d: i64,
}

/// Lattice points of the rectangle strictly above the diagonal, in sweep
/// order.
pub fn event_list(params: KnotParams) -> Vec<Event> {
    let mut events: Vec<Event> = (0..=params.m())
        .flat_map(|x| (0..=params.n()).map(move |y| Point::new(x, y)))
        .map(|p| Event { point: p, d: params.distance(p) })
        .filter(|e| e.d > 0)
        .collect();
    events.sort_by_key(|e| (e.d, e.point.x));
    // coprimality separates all distances in the rectangle
    assert!(
        events.windows(2).all(|w| w[0].d < w[1].d),
        "sweep events tie for {params}"
    );
    events
}

/// Which rule fires, with the index of the interval involved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Contract(usize),
    StartPass(usize),
    EndPass(usize),
    Branch(usize),
    NoOp,
}

pub fn classify(state: &Coloring, p: Point) -> Result<Rule> {
    let mut found = None;
    for (i, iv) in state.intervals.iter().enumerate() {
        let rule = match (iv.start.cmp(&p.x), iv.end.cmp(&p.y)) {
            (std::cmp::Ordering::Equal, std::cmp::Ordering::Equal) => Rule::Contract(i),
            (std::cmp::Ordering::Equal, std::cmp::Ordering::Greater) => Rule::StartPass(i),
            (std::cmp::Ordering::Less, std::cmp::Ordering::Equal) => Rule::EndPass(i),
            (std::cmp::Ordering::Less, std::cmp::Ordering::Greater) => Rule::Branch(i),
            _ => continue,
        };
        if let Some(prev) = found {
            return Err(KhrError::UnsupportedConfiguration {
                x: p.x,
                y: p.y,
                detail: format!("{prev:?} and {rule:?} both match in {state}"),
            });
        }
        found = Some(rule);
    }
    Ok(found.unwrap_or(Rule::NoOp))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RuleTag {
    Contract,
    StartPass,
    EndPass,
    Split,
    Keep,
    NoOp,
    Terminal,
}

/// Which weight of a profile an edge of the branch tree carries. The
/// argument is the interval count the profile function is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    Contract(usize),
    StartPass(usize),
    EndPass(usize),
    Split(usize),
    Keep(usize),
    One,
    Base,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Successor {
    /// `None` once the last interval has contracted.
    pub state: Option<Coloring>,
    pub tag: RuleTag,
    pub weight: Weight,
}

pub fn apply(state: &Coloring, p: Point, rule: Rule) -> Vec<Successor> {
    let k = state.k();
    let same = |tag, weight| Successor { state: Some(state.clone()), tag, weight };
    match rule {
        Rule::Contract(_) if k == 1 => {
            vec![Successor { state: None, tag: RuleTag::Terminal, weight: Weight::Base }]
        }
        Rule::Contract(i) => {
            let mut next = state.clone();
            next.intervals.remove(i);
            vec![Successor { state: Some(next), tag: RuleTag::Contract, weight: Weight::Contract(k - 1) }]
        }
        Rule::StartPass(_) => vec![same(RuleTag::StartPass, Weight::StartPass(k))],
        Rule::EndPass(_) => vec![same(RuleTag::EndPass, Weight::EndPass(k))],
        Rule::Branch(i) => {
            let iv = state.intervals[i];
            let mut split = state.clone();
            split.intervals.splice(i..=i, [Interval::new(iv.start, p.y), Interval::new(p.x, iv.end)]);
            vec![
                Successor { state: Some(split), tag: RuleTag::Split, weight: Weight::Split(k) },
                same(RuleTag::Keep, Weight::Keep(k)),
            ]
        }
        Rule::NoOp => vec![same(RuleTag::NoOp, Weight::One)],
    }
}

/// Per-rule weights of the recursion.
pub trait WeightProfile {
    fn contract(&self, k: usize) -> LaurentPoly;
    fn start_pass(&self, k: usize) -> LaurentPoly;
    fn end_pass(&self, k: usize) -> LaurentPoly;
    fn split(&self, k: usize) -> LaurentPoly;
    fn keep(&self, k: usize) -> LaurentPoly;
    /// Value of a single short interval.
    fn base(&self) -> Invariant;

    /// Edge weight; `Base` has no polynomial weight and maps to 1.
    fn weight(&self, w: Weight) -> LaurentPoly {
        match w {
            Weight::Contract(k) => self.contract(k),
            Weight::StartPass(k) => self.start_pass(k),
            Weight::EndPass(k) => self.end_pass(k),
            Weight::Split(k) => self.split(k),
            Weight::Keep(k) => self.keep(k),
            Weight::One | Weight::Base => LaurentPoly::one(),
        }
    }
}

/// Weights computing the triply graded series.
#[derive(Clone, Copy, Debug, Default)]
pub struct HhhProfile;

impl WeightProfile for HhhProfile {
    fn contract(&self, k: usize) -> LaurentPoly {
        &LaurentPoly::q_pow(k as i64) - &LaurentPoly::a()
    }
    fn start_pass(&self, _: usize) -> LaurentPoly {
        LaurentPoly::one()
    }
    fn end_pass(&self, _: usize) -> LaurentPoly {
        LaurentPoly::one()
    }
    fn split(&self, k: usize) -> LaurentPoly {
        LaurentPoly::q_pow(-(k as i64))
    }
    fn keep(&self, k: usize) -> LaurentPoly {
        &LaurentPoly::t_pow(1) * &LaurentPoly::q_pow(-(k as i64))
    }
    fn base(&self) -> Invariant {
        Invariant::unknot()
    }
}

/// Weights of the scalar evaluation `I(c)` of a coloring as a toric braid.
#[derive(Clone, Copy, Debug, Default)]
pub struct IProfile;

impl WeightProfile for IProfile {
    fn contract(&self, k: usize) -> LaurentPoly {
        &LaurentPoly::a() - &LaurentPoly::q_pow(k as i64)
    }
    fn start_pass(&self, k: usize) -> LaurentPoly {
        -LaurentPoly::q_pow(k as i64 - 1)
    }
    fn end_pass(&self, k: usize) -> LaurentPoly {
        LaurentPoly::q_pow(k as i64 - 1)
    }
    fn split(&self, _: usize) -> LaurentPoly {
        LaurentPoly::mono(0, -1, 0)
    }
    fn keep(&self, _: usize) -> LaurentPoly {
        LaurentPoly::t_pow(1)
    }
    fn base(&self) -> Invariant {
        Invariant::polynomial(&LaurentPoly::a() - &LaurentPoly::one())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaggedEvent {
    pub point: Point,
    pub tag: RuleTag,
    /// Interval count just before the event.
    pub intervals: usize,
}

/// The events of one root-to-leaf branch, in sweep order, ending with the
/// terminal contraction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BranchRecord {
    pub events: Vec<TaggedEvent>,
}

impl BranchRecord {
    pub fn tag_at(&self, p: Point) -> Option<RuleTag> {
        self.events.iter().find(|e| e.point == p).map(|e| e.tag)
    }

    pub fn points_with(&self, tag: RuleTag) -> impl Iterator<Item = Point> + '_ {
        self.events.iter().filter(move |e| e.tag == tag).map(|e| e.point)
    }
}

impl Serialize for BranchRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(self.events.iter().map(|e| (e.point.to_string(), e.tag)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub record: BranchRecord,
    pub value: Invariant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub total: Invariant,
    /// Depth-first order, split before keep.
    pub leaves: Vec<Leaf>,
}

struct Walker<'a, P: ?Sized> {
    events: &'a [Event],
    profile: &'a P,
    leaves: Vec<Leaf>,
}

impl<P: WeightProfile + ?Sized> Walker<'_, P> {
    fn walk(&mut self, idx: usize, state: Coloring, acc: LaurentPoly, record: &mut BranchRecord) -> Result<()> {
        let Some(event) = self.events.get(idx) else {
            return Err(KhrError::Internal(format!("sweep ended without terminal contraction in {state}")));
        };
        let rule = classify(&state, event.point)?;
        for succ in apply(&state, event.point, rule) {
            record.events.push(TaggedEvent { point: event.point, tag: succ.tag, intervals: state.k() });
            let acc = acc.try_mul(&self.profile.weight(succ.weight))?;
            match succ.state {
                None => {
                    let value = self.profile.base().try_mul_poly(&acc)?;
                    self.leaves.push(Leaf { record: record.clone(), value });
                }
                Some(next) => {
                    next.check_invariants(event.d)?;
                    self.walk(idx + 1, next, acc, record)?;
                }
            }
            record.events.pop();
        }
        Ok(())
    }
}

/// Explores every branch of the recursion starting from the torus-knot
/// coloring and sums the leaf values.
pub fn evaluate<P: WeightProfile + ?Sized>(params: KnotParams, profile: &P) -> Result<Evaluation> {
    evaluate_from(initial_coloring(params), profile)
}

pub fn evaluate_from<P: WeightProfile + ?Sized>(start: Coloring, profile: &P) -> Result<Evaluation> {
    let events = event_list(start.params());
    start.check_invariants(0)?;
    let mut walker = Walker { events: &events, profile, leaves: Vec::new() };
    walker.walk(0, start, LaurentPoly::one(), &mut BranchRecord::default())?;
    let mut total = Invariant::zero();
    for leaf in &walker.leaves {
        total = total.try_add(&leaf.value)?;
    }
    Ok(Evaluation { total, leaves: walker.leaves })
}

/// Tag the event at `p` must carry on the branch that traces `path`.
fn expected_tag(path: &DyckPath, vertex_kinds: &BTreeMap<Point, VertexKind>, top: Point, p: Point) -> RuleTag {
    match vertex_kinds.get(&p) {
        Some(VertexKind::Outer) if p == top => RuleTag::Terminal,
        Some(VertexKind::Outer) => RuleTag::Contract,
        Some(VertexKind::Inner) => RuleTag::Split,
        Some(VertexKind::Vertical) => RuleTag::StartPass,
        Some(VertexKind::Horizontal) => RuleTag::EndPass,
        None if path.is_below(p) => RuleTag::Keep,
        None => RuleTag::NoOp,
    }
}

/// Recovers the Dyck path bounding the region swept by the intervals of a
/// branch and checks every tag of the branch against it.
pub fn reconstruct_path(record: &BranchRecord, params: KnotParams) -> Result<DyckPath> {
    let m = params.m();
    let mut tops = vec![None::<i64>; m as usize];
    for e in &record.events {
        if e.tag != RuleTag::NoOp && e.point.x < m {
            let slot = &mut tops[e.point.x as usize];
            *slot = Some(slot.map_or(e.point.y, |y| y.max(e.point.y)));
        }
    }
    let mut steps = Vec::with_capacity((m + params.n()) as usize);
    let mut y = 0;
    for (x, top) in tops.iter().enumerate() {
        let top = top.ok_or_else(|| KhrError::Internal(format!("branch never covers column {x}")))?;
        if top < y {
            return Err(KhrError::Internal(format!("covered region is not monotone at column {x}")));
        }
        steps.extend(std::iter::repeat_n(Step::N, (top - y) as usize));
        steps.push(Step::E);
        y = top;
    }
    steps.extend(std::iter::repeat_n(Step::N, (params.n() - y) as usize));
    let path = DyckPath::new(params, steps)?;

    let kinds: BTreeMap<Point, VertexKind> = path.interior_vertices().into_iter().collect();
    let top = path.most_distant_outer()?;
    let events = event_list(params);
    if record.events.len() > events.len() {
        return Err(KhrError::Internal("record longer than the event list".into()));
    }
    for (i, ev) in events.iter().enumerate() {
        let want = expected_tag(&path, &kinds, top, ev.point);
        match record.events.get(i) {
            Some(got) if got.point != ev.point => {
                return Err(KhrError::Internal(format!("record out of sweep order at {}", got.point)));
            }
            Some(got) if got.tag != want => {
                return Err(KhrError::Internal(format!(
                    "tag mismatch at {} on {path}: recorded {:?}, path says {want:?}",
                    ev.point, got.tag
                )));
            }
            None if want != RuleTag::NoOp => {
                return Err(KhrError::Internal(format!("event {} after terminal lies on or below {path}", ev.point)));
            }
            _ => {}
        }
    }
    Ok(path)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafRow {
    pub path: DyckPath,
    pub rule_tags: BranchRecord,
    pub value: Invariant,
}

/// Leaves keyed by their Dyck paths, in path order.
pub fn leaf_table(eval: &Evaluation, params: KnotParams) -> Result<Vec<LeafRow>> {
    let mut rows = eval
        .leaves
        .iter()
        .map(|leaf| {
            Ok(LeafRow {
                path: reconstruct_path(&leaf.record, params)?,
                rule_tags: leaf.record.clone(),
                value: leaf.value.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(rows)
}
