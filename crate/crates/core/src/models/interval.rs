//! Intervals and interval-union events on model coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{lit, Real};

/// A real interval with independently open or closed ends. Infinite ends
/// are always open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<R> {
    pub lo: R,
    pub hi: R,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<R: Real> Interval<R> {
    pub fn new(lo: R, hi: R, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidInput("interval endpoint is NaN".into()));
        }
        if lo > hi {
            return Err(Error::InvalidInput(format!(
                "interval endpoints out of order: {lo} > {hi}"
            )));
        }
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        if lo == hi && !(lo_closed && hi_closed) {
            return Err(Error::InvalidInput(format!("empty interval at {lo}")));
        }
        Ok(Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn closed(lo: R, hi: R) -> Self {
        Self::new(lo, hi, true, true).expect("valid closed interval")
    }

    pub fn open(lo: R, hi: R) -> Self {
        Self::new(lo, hi, false, false).expect("valid open interval")
    }

    pub fn left_open(lo: R, hi: R) -> Self {
        Self::new(lo, hi, false, true).expect("valid interval")
    }

    pub fn real_line() -> Self {
        Self::open(R::neg_infinity(), R::infinity())
    }

    pub fn at_least(lo: R) -> Self {
        Self::new(lo, R::infinity(), true, false).expect("valid half-line")
    }

    pub fn greater_than(lo: R) -> Self {
        Self::open(lo, R::infinity())
    }

    pub fn at_most(hi: R) -> Self {
        Self::new(R::neg_infinity(), hi, false, true).expect("valid half-line")
    }

    pub fn contains(&self, z: R) -> bool {
        let above = if self.lo_closed {
            z >= self.lo
        } else {
            z > self.lo
        };
        let below = if self.hi_closed {
            z <= self.hi
        } else {
            z < self.hi
        };
        above && below
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn length(&self) -> R {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Open interior; `None` for a single point.
    pub fn interior(&self) -> Option<Self> {
        (!self.is_point()).then(|| Self::open(self.lo, self.hi))
    }

    pub fn closure(&self) -> Self {
        Self::new(self.lo, self.hi, true, true).expect("closure of a valid interval")
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        if lo > hi {
            return None;
        }
        Self::new(lo, hi, lo_closed, hi_closed).ok()
    }

    /// Clamps an interior probe point away from open ends.
    pub(crate) fn nudge_inside(&self, z: R) -> R {
        let span = if self.is_bounded() {
            self.length()
        } else {
            R::one()
        };
        let eps = lit::<R>(1e-9) * span.max(lit(1e-6));
        let mut out = z;
        if !self.lo_closed && self.lo.is_finite() && out <= self.lo {
            out = self.lo + eps;
        }
        if !self.hi_closed && self.hi.is_finite() && out >= self.hi {
            out = self.hi - eps;
        }
        out
    }
}

impl<R: Real> std::fmt::Display for Interval<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A finite union of intervals on the model coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelEvent<R> {
    intervals: Vec<Interval<R>>,
}

impl<R: Real> ModelEvent<R> {
    /// Builds the event, sorting and merging overlapping pieces.
    pub fn new(mut intervals: Vec<Interval<R>>) -> Self {
        intervals.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        let mut merged: Vec<Interval<R>> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            if let Some(last) = merged.last_mut() {
                let touches =
                    iv.lo < last.hi || (iv.lo == last.hi && (iv.lo_closed || last.hi_closed));
                if touches {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                        last.hi_closed = iv.hi_closed;
                    } else if iv.hi == last.hi {
                        last.hi_closed |= iv.hi_closed;
                    }
                    if iv.lo == last.lo {
                        last.lo_closed |= iv.lo_closed;
                    }
                    continue;
                }
            }
            merged.push(iv);
        }
        Self { intervals: merged }
    }

    pub fn single(iv: Interval<R>) -> Self {
        Self::new(vec![iv])
    }

    pub fn everything() -> Self {
        Self::single(Interval::real_line())
    }

    pub fn empty() -> Self {
        Self { intervals: vec![] }
    }

    pub fn intervals(&self) -> &[Interval<R>] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, z: R) -> bool {
        self.intervals.iter().any(|iv| iv.contains(z))
    }

    pub fn interior(&self) -> Self {
        Self::new(
            self.intervals
                .iter()
                .filter_map(|iv| iv.interior())
                .collect(),
        )
    }

    pub fn closure(&self) -> Self {
        Self::new(self.intervals.iter().map(|iv| iv.closure()).collect())
    }

    /// Complement within the real line.
    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cursor = R::neg_infinity();
        let mut cursor_closed = false;
        for iv in &self.intervals {
            if iv.lo > cursor || (iv.lo == cursor && cursor_closed && !iv.lo_closed) {
                if let Ok(gap) = Interval::new(cursor, iv.lo, cursor_closed, !iv.lo_closed) {
                    out.push(gap);
                }
            }
            cursor = iv.hi;
            cursor_closed = !iv.hi_closed;
        }
        if cursor < R::infinity() {
            if let Ok(gap) = Interval::new(cursor, R::infinity(), cursor_closed, false) {
                out.push(gap);
            }
        }
        Self::new(out)
    }

    /// Pieces of the event that meet `other`.
    pub fn intersect_interval(&self, other: &Interval<R>) -> Vec<Interval<R>> {
        self.intervals
            .iter()
            .filter_map(|iv| iv.intersect(other))
            .collect()
    }

    pub fn to_descriptor(&self) -> EventDescriptor {
        EventDescriptor {
            intervals: self
                .intervals
                .iter()
                .map(|iv| [Endpoint::from_real(iv.lo), Endpoint::from_real(iv.hi)])
                .collect(),
        }
    }
}

/// An interval endpoint in JSON: a number or one of `"inf"`, `"-inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Number(f64),
    Symbol(String),
}

impl Endpoint {
    pub fn value(&self) -> Result<f64> {
        match self {
            Endpoint::Number(v) => Ok(*v),
            Endpoint::Symbol(s) => match s.as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                other => Err(Error::InvalidInput(format!("unknown endpoint `{other}`"))),
            },
        }
    }

    pub fn from_real<R: Real>(x: R) -> Self {
        let v = x.to_f64().unwrap_or(f64::NAN);
        if v == f64::INFINITY {
            Endpoint::Symbol("inf".into())
        } else if v == f64::NEG_INFINITY {
            Endpoint::Symbol("-inf".into())
        } else {
            Endpoint::Number(v)
        }
    }
}

/// JSON form of a [`ModelEvent`]: closed intervals, open at infinite ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventDescriptor {
    pub intervals: Vec<[Endpoint; 2]>,
}

impl EventDescriptor {
    pub fn to_event<R: Real>(&self) -> Result<ModelEvent<R>> {
        let ivs = self
            .intervals
            .iter()
            .map(|[a, b]| Interval::new(lit(a.value()?), lit(b.value()?), true, true))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModelEvent::new(ivs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersection_respects_closedness() {
        let a = Interval::left_open(0.0_f64, 1.0);
        let b = Interval::closed(-1.0, 0.0);
        assert!(a.intersect(&b).is_none());
        let c = Interval::closed(0.0, 2.0);
        let i = a.intersect(&c).unwrap();
        assert!(!i.lo_closed && i.hi_closed);
    }

    #[test]
    fn complement_partitions_the_line() {
        let e = ModelEvent::new(vec![Interval::at_least(0.5_f64), Interval::open(-1.0, 0.0)]);
        let c = e.complement();
        for z in [-2.0, -1.0, -0.5, 0.0, 0.25, 0.5, 3.0] {
            assert!(e.contains(z) ^ c.contains(z), "z = {z}");
        }
    }

    #[test]
    fn interior_and_closure() {
        let e = ModelEvent::single(Interval::at_least(0.5_f64));
        assert!(!e.interior().contains(0.5));
        assert!(e.closure().contains(0.5));
        let p = ModelEvent::single(Interval::closed(0.0_f64, 0.0));
        assert!(p.interior().is_empty());
    }

    #[test]
    fn descriptor_parses_infinite_endpoints() {
        let d: EventDescriptor = serde_json::from_str(r#"{"intervals":[[0.5,"inf"]]}"#).unwrap();
        let e = d.to_event::<f64>().unwrap();
        assert!(e.contains(1e300) && e.contains(0.5) && !e.contains(0.49));
        assert_eq!(
            serde_json::to_string(&e.to_descriptor()).unwrap(),
            r#"{"intervals":[[0.5,"inf"]]}"#
        );
    }

    #[test]
    fn overlapping_pieces_merge() {
        let e = ModelEvent::new(vec![
            Interval::closed(0.0_f64, 1.0),
            Interval::closed(0.5, 2.0),
        ]);
        assert_eq!(e.intervals().len(), 1);
        assert_eq!(e.intervals()[0].hi, 2.0);
    }
}
