//! Finite unions of sub-intervals of `[0, 1]`.
//!
//! A [`ParamSet`] describes which interpolation parameters `λ` along a
//! segment satisfy some classification. Every set is kept normalized:
//! spans are non-empty, sorted, pairwise disjoint and never touching.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Span {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Span {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Span {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn point(at: f64) -> Self {
        Span::closed(at, at)
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, l: f64) -> bool {
        (l > self.lo || (self.lo_closed && l == self.lo))
            && (l < self.hi || (self.hi_closed && l == self.hi))
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    fn clipped(mut self) -> Self {
        // +0.0 turns a -0.0 bound into 0.0
        self.lo += 0.0;
        self.hi += 0.0;
        if self.lo < 0.0 {
            self.lo = 0.0;
            self.lo_closed = true;
        }
        if self.hi > 1.0 {
            self.hi = 1.0;
            self.hi_closed = true;
        }
        self
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            return write!(f, "{{{}}}", self.lo);
        }
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamSet {
    spans: Vec<Span>,
}

impl ParamSet {
    pub fn empty() -> Self {
        ParamSet { spans: Vec::new() }
    }

    /// The full parameter range `[0, 1]`.
    pub fn unit() -> Self {
        ParamSet {
            spans: vec![Span::closed(0.0, 1.0)],
        }
    }

    pub fn point(at: f64) -> Self {
        Self::from_spans(vec![Span::point(at)])
    }

    pub fn span(span: Span) -> Self {
        Self::from_spans(vec![span])
    }

    /// Normalizes arbitrary spans: clips to `[0, 1]`, drops empty ones and
    /// merges overlapping or touching neighbours.
    pub fn from_spans(spans: Vec<Span>) -> Self {
        let mut spans: Vec<Span> = spans
            .into_iter()
            .filter(|s| !s.lo.is_nan() && !s.hi.is_nan())
            .map(Span::clipped)
            .filter(|s| !s.is_empty())
            .collect();
        spans.sort_by(|a, b| {
            a.lo.total_cmp(&b.lo)
                .then_with(|| b.lo_closed.cmp(&a.lo_closed))
        });
        let mut out: Vec<Span> = Vec::with_capacity(spans.len());
        for s in spans {
            match out.last_mut() {
                Some(cur)
                    if s.lo < cur.hi || (s.lo == cur.hi && (cur.hi_closed || s.lo_closed)) =>
                {
                    if s.lo == cur.lo {
                        cur.lo_closed |= s.lo_closed;
                    }
                    if s.hi > cur.hi {
                        cur.hi = s.hi;
                        cur.hi_closed = s.hi_closed;
                    } else if s.hi == cur.hi {
                        cur.hi_closed |= s.hi_closed;
                    }
                }
                _ => out.push(s),
            }
        }
        ParamSet { spans: out }
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.spans.len() == 1 && self.spans[0] == Span::closed(0.0, 1.0)
    }

    pub fn contains(&self, l: f64) -> bool {
        self.spans.iter().any(|s| s.contains(l))
    }

    /// Total length of the set.
    pub fn measure(&self) -> f64 {
        self.spans.iter().map(Span::length).sum()
    }

    pub fn union(&self, other: &ParamSet) -> ParamSet {
        let mut spans = self.spans.clone();
        spans.extend_from_slice(&other.spans);
        Self::from_spans(spans)
    }

    pub fn intersect(&self, other: &ParamSet) -> ParamSet {
        let mut spans = Vec::new();
        for a in &self.spans {
            for b in &other.spans {
                let (lo, lo_closed) = if a.lo > b.lo {
                    (a.lo, a.lo_closed)
                } else if b.lo > a.lo {
                    (b.lo, b.lo_closed)
                } else {
                    (a.lo, a.lo_closed && b.lo_closed)
                };
                let (hi, hi_closed) = if a.hi < b.hi {
                    (a.hi, a.hi_closed)
                } else if b.hi < a.hi {
                    (b.hi, b.hi_closed)
                } else {
                    (a.hi, a.hi_closed && b.hi_closed)
                };
                spans.push(Span {
                    lo,
                    hi,
                    lo_closed,
                    hi_closed,
                });
            }
        }
        Self::from_spans(spans)
    }

    /// Complement within `[0, 1]`.
    pub fn complement(&self) -> ParamSet {
        let mut spans = Vec::with_capacity(self.spans.len() + 1);
        let mut lo = 0.0;
        let mut lo_closed = true;
        for s in &self.spans {
            spans.push(Span {
                lo,
                hi: s.lo,
                lo_closed,
                hi_closed: !s.lo_closed,
            });
            lo = s.hi;
            lo_closed = !s.hi_closed;
        }
        spans.push(Span {
            lo,
            hi: 1.0,
            lo_closed,
            hi_closed: true,
        });
        Self::from_spans(spans)
    }

    pub fn difference(&self, other: &ParamSet) -> ParamSet {
        self.intersect(&other.complement())
    }

    /// True when `self ⊆ other`.
    pub fn is_subset(&self, other: &ParamSet) -> bool {
        self.difference(other).is_empty()
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spans.is_empty() {
            return f.write_str("∅");
        }
        for (i, s) in self.spans.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}
