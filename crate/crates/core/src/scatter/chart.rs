//! Finite-order scattering of rays carrying wall automorphisms.
//!
//! Each [`Line`] is a ray `base + s direction`, `s >= 0`, carrying an
//! automorphism whose corrections are powers of `m(-covector)`. A point on a
//! line is reached at time `birth + s`. Collisions are processed in order of
//! time, ties broken by the lexicographic order of the collision point. At a
//! collision of covectors `b1 ^ b2 > 0` the product `g_2 . g_1` is
//! factorized in the cone `(b1, b2)`; every factor of slope `n2/n1` strictly
//! between 0 and infinity starts a composite ray with covector
//! `primitive(n1 b1 + n2 b2)` and direction `primitive(n1 d1 + n2 d2)`, and
//! the parents continue from the collision point carrying the slope 0 and
//! slope infinity factors. Automorphisms are not transported along rays.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{factorize, primitive, ray_multiple, wedge, Cone, Covector, Slope, WallAutomorphism};
use crate::error::{Error, Result};
use crate::field::{int, Rational};
use crate::spectra::rational_vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generation {
    Initial,
    Composite,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Line {
    #[serde(with = "rational_vec")]
    pub base: Vec<Rational>,
    pub direction: Covector,
    pub covector: Covector,
    pub automorphism: WallAutomorphism,
    pub generation: Generation,
    /// Slope of the automorphism in the cone where the ray was born.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<Slope>,
    #[serde(with = "rational_str")]
    pub birth: Rational,
    /// Parameter at which the ray stops, if it was consumed by a collision.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational_str")]
    pub end: Option<Rational>,
}

impl Line {
    /// An initial ray born at time 0.
    pub fn initial(base: Vec<Rational>, direction: Covector, covector: Covector, automorphism: WallAutomorphism) -> Result<Self> {
        let line = Line {
            base,
            direction,
            covector,
            slope: automorphism.slope(),
            automorphism,
            generation: Generation::Initial,
            birth: int(0),
            end: None,
        };
        line.validate()?;
        Ok(line)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base.len() != 2 {
            return Err(Error::Dimension { expected: 2, got: self.base.len() });
        }
        if self.direction == [0, 0] || self.covector == [0, 0] {
            return Err(Error::Precondition("zero direction or covector".into()));
        }
        for (e, _) in self.automorphism.corrections() {
            if !ray_multiple(e, self.covector).is_some_and(|j| j > 0) {
                return Err(Error::Precondition(format!(
                    "correction m{e:?} is not a power of m(-{:?})",
                    self.covector
                )));
            }
        }
        Ok(())
    }

    fn point(&self, s: &Rational) -> Vec<Rational> {
        (0..2).map(|i| &self.base[i] + s * int(self.direction[i])).collect()
    }

    fn alive(&self, s: &Rational) -> bool {
        *s > int(0) && self.end.as_ref().is_none_or(|e| s < e)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Collision {
    #[serde(with = "rational_vec")]
    pub point: Vec<Rational>,
    #[serde(with = "rational_str")]
    pub time: Rational,
    /// Indices of the colliding rays, ordered so that their covectors have
    /// positive wedge.
    pub lines: [usize; 2],
    pub cone: Cone,
    /// Indices of the rays started here (continuations and composites).
    pub born: Vec<usize>,
    /// The ordered product of the outgoing factors equals the product of
    /// the incoming ones below the truncation order.
    pub consistent: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ScatteringDiagram {
    pub lines: Vec<Line>,
    #[serde(default)]
    pub collisions: Vec<Collision>,
}

impl ScatteringDiagram {
    pub fn new(lines: Vec<Line>) -> Result<Self> {
        for l in &lines {
            l.validate()?;
        }
        Ok(ScatteringDiagram { lines, collisions: Vec::new() })
    }

    pub fn composite_lines(&self) -> impl Iterator<Item = &Line> {
        self.lines.iter().filter(|l| l.generation == Generation::Composite)
    }

    /// Every collision passed the product check.
    pub fn is_consistent(&self) -> bool {
        self.collisions.iter().all(|c| c.consistent)
    }
}

struct Candidate {
    time: Rational,
    point: Vec<Rational>,
    i: usize,
    j: usize,
    s: Rational,
    r: Rational,
}

const MAX_COLLISIONS: usize = 10_000;

/// Runs every collision of `initial` (and of the rays it produces) with
/// automorphisms truncated at `order`.
pub fn scatter_chart(initial: &ScatteringDiagram, order: u32) -> Result<ScatteringDiagram> {
    let mut diagram = ScatteringDiagram::new(initial.lines.clone())?;
    diagram.collisions = initial.collisions.clone();
    let mut done: HashSet<(usize, usize)> = diagram.collisions.iter().map(|c| sorted(c.lines)).collect();
    for _ in 0..MAX_COLLISIONS {
        let Some(c) = next_collision(&diagram.lines, &done)? else {
            return Ok(diagram);
        };
        done.insert((c.i, c.j));
        process(&mut diagram, c, order)?;
    }
    Err(Error::Precondition(format!("more than {MAX_COLLISIONS} collisions")))
}

fn sorted(p: [usize; 2]) -> (usize, usize) {
    (p[0].min(p[1]), p[0].max(p[1]))
}

fn next_collision(lines: &[Line], done: &HashSet<(usize, usize)>) -> Result<Option<Candidate>> {
    let mut best: Option<Candidate> = None;
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            if done.contains(&(i, j)) {
                continue;
            }
            let Some((s, r)) = intersect(&lines[i], &lines[j])? else { continue };
            let ti = &lines[i].birth + &s;
            let tj = &lines[j].birth + &r;
            let cand = Candidate { time: ti.max(tj), point: lines[i].point(&s), i, j, s, r };
            let better = match &best {
                None => true,
                Some(b) => (&cand.time, &cand.point) < (&b.time, &b.point),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    Ok(best)
}

/// Parameters `(s, r)` of a transversal crossing inside both live segments.
fn intersect(a: &Line, b: &Line) -> Result<Option<(Rational, Rational)>> {
    let delta: Vec<Rational> = (0..2).map(|k| &b.base[k] - &a.base[k]).collect();
    let w = wedge(&a.direction, &b.direction);
    let cross = |v: &[Rational], d: &Covector| &v[0] * int(d[1]) - &v[1] * int(d[0]);
    if w == 0 {
        if cross(&delta, &a.direction) != int(0) {
            return Ok(None);
        }
        // same supporting line: compare live intervals in a's parameter
        let dd = int(a.direction[0] * a.direction[0] + a.direction[1] * a.direction[1]);
        let off = (&delta[0] * int(a.direction[0]) + &delta[1] * int(a.direction[1])) / &dd;
        let scale = int(a.direction[0] * b.direction[0] + a.direction[1] * b.direction[1]) / &dd;
        let far = |l: &Line| l.end.clone();
        let (b_lo, b_hi) = match far(b) {
            Some(e) => {
                let x = &off + &scale * e;
                if off <= x { (Some(off.clone()), Some(x)) } else { (Some(x), Some(off.clone())) }
            }
            None if scale > int(0) => (Some(off.clone()), None),
            None => (None, Some(off.clone())),
        };
        let a_lo = int(0);
        let a_hi = far(a);
        let lo = match b_lo {
            Some(x) if x > a_lo => x,
            _ => a_lo,
        };
        let hi = match (a_hi, b_hi) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        if hi.is_none_or(|h| h > lo) {
            return Err(Error::Precondition(format!(
                "collinear collision between rays with covectors {:?} and {:?}",
                a.covector, b.covector
            )));
        }
        return Ok(None);
    }
    let s = cross(&delta, &b.direction) / int(w);
    let r = cross(&delta, &a.direction) / int(w);
    Ok((a.alive(&s) && b.alive(&r)).then_some((s, r)))
}

fn process(diagram: &mut ScatteringDiagram, c: Candidate, order: u32) -> Result<()> {
    let (mut i, mut j, mut s, mut r) = (c.i, c.j, c.s.clone(), c.r.clone());
    let w = wedge(&diagram.lines[i].covector, &diagram.lines[j].covector);
    if w == 0 {
        return Err(Error::Precondition(format!(
            "collinear collision: covectors {:?} and {:?} at {:?}",
            diagram.lines[i].covector, diagram.lines[j].covector, c.point
        )));
    }
    if w < 0 {
        std::mem::swap(&mut i, &mut j);
        std::mem::swap(&mut s, &mut r);
    }
    let (l1, l2) = (&diagram.lines[i], &diagram.lines[j]);
    let cone = Cone::new(l1.covector, l2.covector, order)?;
    let g0 = l1.automorphism.with_cone(cone)?;
    let ginf = l2.automorphism.with_cone(cone)?;
    let fac = factorize(&g0, &ginf)?;
    let identity = WallAutomorphism::identity(g0.algebra(), cone)?;
    let consistent = fac.ordered_product(&identity)?.first_difference(&ginf.product(&g0)?)?.is_none();
    let births_composite = fac.factors.iter().any(|(sl, _)| !sl.is_extremal());

    let mut born = Vec::new();
    if births_composite {
        let (b1, b2, d1, d2) = (l1.covector, l2.covector, l1.direction, l2.direction);
        let mut new_lines = Vec::new();
        for (slope, aut) in &fac.factors {
            let (n1, n2) = slope.direction();
            let (n1, n2) = (n1 as i64, n2 as i64);
            let (covector, direction) = if *slope == Slope::ZERO {
                (b1, d1)
            } else if *slope == Slope::INFINITY {
                (b2, d2)
            } else {
                let cov = primitive([n1 * b1[0] + n2 * b2[0], n1 * b1[1] + n2 * b2[1]]);
                let dir = primitive([n1 * d1[0] + n2 * d2[0], n1 * d1[1] + n2 * d2[1]]);
                (cov, if dir == [0, 0] { cov } else { dir })
            };
            let generation = if slope.is_extremal() {
                diagram.lines[if *slope == Slope::ZERO { i } else { j }].generation
            } else {
                Generation::Composite
            };
            new_lines.push(Line {
                base: c.point.clone(),
                direction,
                covector,
                automorphism: aut.clone(),
                generation,
                slope: Some(*slope),
                birth: c.time.clone(),
                end: None,
            });
        }
        diagram.lines[i].end = Some(s);
        diagram.lines[j].end = Some(r);
        for l in new_lines {
            l.validate()?;
            born.push(diagram.lines.len());
            diagram.lines.push(l);
        }
    }
    diagram.collisions.push(Collision { point: c.point, time: c.time, lines: [i, j], cone, born, consistent });
    Ok(())
}

pub(crate) mod rational_str {
    use crate::field::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        crate::field::parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

mod opt_rational_str {
    use crate::field::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.collect_str(v),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| {
                crate::field::parse_rational(&s)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
            })
            .transpose()
    }
}
