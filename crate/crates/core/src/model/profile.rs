//! Piecewise time profiles for impurity couplings.

use crate::error::{Error, Result};

/// Shape of a profile between two breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub enum SegmentKind {
    Constant(f64),
    /// `offset + slope * t`
    Linear {
        offset: f64,
        slope: f64,
    },
    /// `amplitude * cos(frequency * t + phase)`
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// Linear interpolation of a sampled table. Undefined outside the table.
    Sampled {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

impl SegmentKind {
    fn eval(&self, t: f64) -> Option<f64> {
        match self {
            SegmentKind::Constant(c) => Some(*c),
            SegmentKind::Linear { offset, slope } => Some(offset + slope * t),
            SegmentKind::Sinusoid { amplitude, frequency, phase } => Some(amplitude * (frequency * t + phase).cos()),
            SegmentKind::Sampled { times, values } => {
                let last = *times.last()?;
                if t < times[0] || t > last || !t.is_finite() {
                    return None;
                }
                let i = times.partition_point(|&s| s <= t);
                if i >= times.len() {
                    return values.last().copied();
                }
                let (t0, t1) = (times[i - 1], times[i]);
                let w = (t - t0) / (t1 - t0);
                Some(values[i - 1] * (1.0 - w) + values[i] * w)
            }
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            SegmentKind::Constant(_) => true,
            SegmentKind::Linear { slope, .. } => *slope == 0.0,
            SegmentKind::Sinusoid { amplitude, frequency, .. } => *amplitude == 0.0 || *frequency == 0.0,
            SegmentKind::Sampled { values, .. } => values.windows(2).all(|w| w[0] == w[1]),
        }
    }
}

/// A segment is active on `[start, next.start)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub kind: SegmentKind,
}

/// Right-continuous piecewise profile `t -> value`.
///
/// The first segment may start at `-inf`, which makes the profile defined for
/// every time before the protocol starts.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile {
    segments: Vec<Segment>,
}

impl TimeProfile {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidProfile("no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if s.start.is_nan() || s.start == f64::INFINITY {
                return Err(Error::InvalidProfile(format!("segment {i} has start {}", s.start)));
            }
            if i > 0 && s.start == f64::NEG_INFINITY {
                return Err(Error::InvalidProfile("only the first segment may start at -inf".into()));
            }
            if i > 0 && s.start <= segments[i - 1].start {
                return Err(Error::InvalidProfile("segment starts must increase".into()));
            }
            match &s.kind {
                SegmentKind::Sampled { times, values } => {
                    if times.len() < 2 || times.len() != values.len() {
                        return Err(Error::InvalidProfile("sampled table needs at least two (t, value) pairs".into()));
                    }
                    if times.windows(2).any(|w| w[1] <= w[0]) {
                        return Err(Error::InvalidProfile("sample times must increase".into()));
                    }
                    if times[0] > s.start {
                        return Err(Error::InvalidProfile("sampled table starts after its segment".into()));
                    }
                    if values.iter().chain(times.iter()).any(|v| !v.is_finite()) {
                        return Err(Error::InvalidProfile("non-finite sample".into()));
                    }
                }
                SegmentKind::Constant(c) if !c.is_finite() => {
                    return Err(Error::InvalidProfile("non-finite constant".into()));
                }
                _ => {}
            }
        }
        Ok(Self { segments })
    }

    pub fn constant(value: f64) -> Self {
        Self { segments: vec![Segment { start: f64::NEG_INFINITY, kind: SegmentKind::Constant(value) }] }
    }

    /// Zero before `t_switch`, `value` from `t_switch` on.
    pub fn step(t_switch: f64, value: f64) -> Self {
        Self::switch(t_switch, 0.0, value)
    }

    /// `before` for `t < t_switch`, `after` for `t >= t_switch`.
    pub fn switch(t_switch: f64, before: f64, after: f64) -> Self {
        Self {
            segments: vec![
                Segment { start: f64::NEG_INFINITY, kind: SegmentKind::Constant(before) },
                Segment { start: t_switch, kind: SegmentKind::Constant(after) },
            ],
        }
    }

    /// Linear ramp from `from` at `t_start` to `to` at `t_stop`, constant outside.
    pub fn ramp(t_start: f64, t_stop: f64, from: f64, to: f64) -> Result<Self> {
        if t_stop <= t_start {
            return Err(Error::InvalidProfile("ramp end must follow its start".into()));
        }
        let slope = (to - from) / (t_stop - t_start);
        Self::new(vec![
            Segment { start: f64::NEG_INFINITY, kind: SegmentKind::Constant(from) },
            Segment { start: t_start, kind: SegmentKind::Linear { offset: from - slope * t_start, slope } },
            Segment { start: t_stop, kind: SegmentKind::Constant(to) },
        ])
    }

    /// Switched-on drive: zero before `t_on`, then `amplitude * cos(frequency * t + phase)`.
    pub fn drive(t_on: f64, amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self {
            segments: vec![
                Segment { start: f64::NEG_INFINITY, kind: SegmentKind::Constant(0.0) },
                Segment { start: t_on, kind: SegmentKind::Sinusoid { amplitude, frequency, phase } },
            ],
        }
    }

    /// Table profile, defined on `[times[0], times[last]]` only.
    pub fn sampled(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let start = times.first().copied().unwrap_or(0.0);
        Self::new(vec![Segment { start, kind: SegmentKind::Sampled { times, values } }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Finite segment starts, in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.start).filter(|s| s.is_finite()).collect()
    }

    fn index_at(&self, t: f64) -> Option<usize> {
        let i = self.segments.partition_point(|s| s.start <= t);
        i.checked_sub(1)
    }

    /// Right-continuous value at `t`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        self.index_at(t)
            .and_then(|i| self.segments[i].kind.eval(t))
            .filter(|v| v.is_finite())
            .ok_or(Error::ProfileUndefined { t })
    }

    /// Limit from the left at `t`.
    pub fn left_limit(&self, t: f64) -> Result<f64> {
        let i = self.segments.partition_point(|s| s.start < t);
        i.checked_sub(1)
            .and_then(|i| self.segments[i].kind.eval(t))
            .filter(|v| v.is_finite())
            .ok_or(Error::ProfileUndefined { t })
    }

    /// Value approached from `side`.
    pub fn value(&self, t: f64, side: Side) -> Result<f64> {
        match side {
            Side::Right => self.evaluate(t),
            Side::Left => self.left_limit(t),
        }
    }

    /// True when the profile has no time dependence on `(a, b)`.
    pub fn is_constant_on(&self, a: f64, b: f64) -> bool {
        let Some(i) = self.index_at(a) else { return false };
        let inside = self.segments.get(i + 1).is_none_or(|s| s.start >= b);
        inside && self.segments[i].kind.is_constant()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.segments.iter().all(|s| match &s.kind {
            SegmentKind::Constant(c) => *c == 0.0,
            SegmentKind::Linear { offset, slope } => *offset == 0.0 && *slope == 0.0,
            SegmentKind::Sinusoid { amplitude, .. } => *amplitude == 0.0,
            SegmentKind::Sampled { values, .. } => values.iter().all(|v| *v == 0.0),
        })
    }
}

/// Which one-sided value to use at a discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Value at `t` itself (profiles are right-continuous).
    Right,
    /// Limit from below.
    Left,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_right_continuous() {
        let p = TimeProfile::step(1.0, 0.5);
        assert_eq!(p.evaluate(0.999).unwrap(), 0.0);
        assert_eq!(p.evaluate(1.0).unwrap(), 0.5);
        assert_eq!(p.left_limit(1.0).unwrap(), 0.0);
        assert_eq!(p.left_limit(2.0).unwrap(), 0.5);
        assert_eq!(p.breakpoints(), vec![1.0]);
    }

    #[test]
    fn ramp_interpolates() {
        let p = TimeProfile::ramp(0.0, 2.0, 1.0, 3.0).unwrap();
        assert!((p.evaluate(1.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(p.evaluate(5.0).unwrap(), 3.0);
        assert_eq!(p.evaluate(-5.0).unwrap(), 1.0);
    }

    #[test]
    fn sampled_table_is_undefined_outside_its_range() {
        let p = TimeProfile::sampled(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert!((p.evaluate(0.25).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(p.evaluate(2.0).unwrap(), 0.0);
        assert_eq!(p.evaluate(2.5), Err(Error::ProfileUndefined { t: 2.5 }));
        assert!(p.left_limit(0.0).is_err());
    }

    #[test]
    fn rejects_unordered_segments() {
        let segs = vec![
            Segment { start: 1.0, kind: SegmentKind::Constant(0.0) },
            Segment { start: 0.5, kind: SegmentKind::Constant(1.0) },
        ];
        assert!(TimeProfile::new(segs).is_err());
    }

    #[test]
    fn constancy_detection() {
        let p = TimeProfile::drive(1.0, 0.3, 2.0, 0.0);
        assert!(p.is_constant_on(0.0, 1.0));
        assert!(!p.is_constant_on(0.5, 1.5));
        assert!(!p.is_constant_on(1.0, 1.5));
    }
}
