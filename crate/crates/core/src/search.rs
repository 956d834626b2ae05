//! One round of the adaptive JND search and the helpers that chain rounds together.
//!
//! A round searches `[start, end]` against a fixed anchor at `start`. The robust
//! procedure drops only the far quarter of the interval after each answer, so a
//! single wrong answer can still be corrected later. The legacy procedure halves
//! the interval, which is faster but cannot recover from an early mistake.

use crate::error::{Error, Result};
use crate::qp::{clip_for_qp, Qp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Procedure {
    /// Quartile-dropping search.
    Robust,
    /// Halving search.
    LegacyAggressive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Response {
    Noticeable,
    Unnoticeable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchConfig {
    start: Qp,
    end: Qp,
    procedure: Procedure,
}

impl SearchConfig {
    pub fn new(start: Qp, end: Qp, procedure: Procedure) -> Result<Self> {
        if start >= end {
            return Err(Error::EmptyInterval { start, end });
        }
        Ok(SearchConfig { start, end, procedure })
    }

    /// The first-JND configuration: `[0, 51]`.
    pub fn full_range(procedure: Procedure) -> Self {
        SearchConfig {
            start: Qp::MIN,
            end: Qp::MAX,
            procedure,
        }
    }

    pub fn start(&self) -> Qp {
        self.start
    }

    pub fn end(&self) -> Qp {
        self.end
    }

    pub fn procedure(&self) -> Procedure {
        self.procedure
    }

    pub fn with_procedure(self, procedure: Procedure) -> Self {
        SearchConfig { procedure, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SearchStatus {
    Active,
    Terminated,
}

/// The pair a subject is asked to compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonRequest {
    pub anchor_qp: Qp,
    pub probe_qp: Qp,
    /// QP of the clip actually played for the anchor, after ladder substitution.
    pub anchor_clip_qp: Qp,
    pub probe_clip_qp: Qp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind", content = "qp"))]
pub enum JndResult {
    Found(Qp),
    /// No difference was ever reported inside the round's range.
    NotFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundOutcome {
    pub result: JndResult,
    pub comparisons: u32,
}

impl RoundOutcome {
    pub fn found(&self) -> Option<Qp> {
        match self.result {
            JndResult::Found(qp) => Some(qp),
            JndResult::NotFound => None,
        }
    }
}

/// State of one search round. Values are immutable; every answer produces a new state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchState {
    config: SearchConfig,
    left: Qp,
    right: Qp,
    probe: Qp,
    last_noticeable: Option<Qp>,
    comparisons: u32,
    status: SearchStatus,
}

fn floor_div(num: u32, den: u32) -> u8 {
    (num / den) as u8
}

fn ceil_div(num: u32, den: u32) -> u8 {
    num.div_ceil(den) as u8
}

impl SearchState {
    /// Starts a round with the anchor and left bound at `start` and the probe at the
    /// floor midpoint. The probe never coincides with the anchor.
    pub fn new(config: SearchConfig) -> Self {
        let (l, r) = (config.start.get(), config.end.get());
        let mid = floor_div(u32::from(l) + u32::from(r), 2).max(l + 1);
        SearchState {
            config,
            left: config.start,
            right: config.end,
            probe: Qp::from_raw(mid),
            last_noticeable: None,
            comparisons: 0,
            status: SearchStatus::Active,
        }
    }

    pub fn config(&self) -> SearchConfig {
        self.config
    }

    pub fn anchor(&self) -> Qp {
        self.config.start
    }

    pub fn left(&self) -> Qp {
        self.left
    }

    pub fn right(&self) -> Qp {
        self.right
    }

    pub fn probe(&self) -> Qp {
        self.probe
    }

    pub fn last_noticeable(&self) -> Option<Qp> {
        self.last_noticeable
    }

    pub fn comparisons_made(&self) -> u32 {
        self.comparisons
    }

    pub fn status(&self) -> SearchStatus {
        self.status
    }

    pub fn is_active(&self) -> bool {
        self.status == SearchStatus::Active
    }

    /// The comparison to present next.
    pub fn request(&self) -> Result<ComparisonRequest> {
        if !self.is_active() {
            return Err(Error::RoundTerminated);
        }
        let anchor = self.anchor();
        Ok(ComparisonRequest {
            anchor_qp: anchor,
            probe_qp: self.probe,
            anchor_clip_qp: clip_for_qp(anchor),
            probe_clip_qp: clip_for_qp(self.probe),
        })
    }

    /// Applies a response with the procedure the round was configured with.
    pub fn advance(&self, response: Response) -> Result<Self> {
        match self.config.procedure {
            Procedure::Robust => self.step(response),
            Procedure::LegacyAggressive => self.legacy_step(response),
        }
    }

    /// Quartile-dropping update: a noticeable answer moves the right bound to the
    /// third quartile of `[left, right]`, an unnoticeable answer moves the left bound
    /// to the first quartile. The new probe is the midpoint of the updated interval.
    pub fn step(&self, response: Response) -> Result<Self> {
        self.apply(response, |l, r, response| match response {
            Response::Noticeable => {
                let r = floor_div(u32::from(l) + 3 * u32::from(r), 4);
                (l, r, floor_div(u32::from(l) + u32::from(r), 2))
            }
            Response::Unnoticeable => {
                let l = ceil_div(3 * u32::from(l) + u32::from(r), 4);
                (l, r, ceil_div(u32::from(l) + u32::from(r), 2))
            }
        })
    }

    /// Halving update: the half of the interval beyond the probe is discarded.
    pub fn legacy_step(&self, response: Response) -> Result<Self> {
        let probe = self.probe.get();
        self.apply(response, move |l, r, response| match response {
            Response::Noticeable => (l, probe, floor_div(u32::from(l) + u32::from(probe), 2)),
            Response::Unnoticeable => (probe, r, ceil_div(u32::from(probe) + u32::from(r), 2)),
        })
    }

    fn apply(&self, response: Response, update: impl Fn(u8, u8, Response) -> (u8, u8, u8)) -> Result<Self> {
        if !self.is_active() {
            return Err(Error::RoundTerminated);
        }
        let mut next = *self;
        next.comparisons += 1;
        let (l, r, c) = (self.left.get(), self.right.get(), self.probe.get());
        match response {
            Response::Noticeable => {
                next.last_noticeable = Some(self.probe);
                if c - l <= 1 {
                    next.status = SearchStatus::Terminated;
                    return Ok(next);
                }
            }
            Response::Unnoticeable => {
                if r - c <= 1 {
                    // The right bound has only been confirmed noticeable if some answer
                    // was noticeable; otherwise the end of the range is still untested.
                    if self.last_noticeable.is_none() && c < r {
                        next.left = self.probe;
                        next.probe = self.right;
                    } else {
                        next.status = SearchStatus::Terminated;
                    }
                    return Ok(next);
                }
            }
        }
        let (l, r, c) = update(l, r, response);
        next.left = Qp::from_raw(l);
        next.right = Qp::from_raw(r);
        next.probe = Qp::from_raw(c);
        Ok(next)
    }

    /// The JND found by a terminated round: the last probe answered noticeable.
    pub fn round_result(&self) -> Result<RoundOutcome> {
        if self.is_active() {
            return Err(Error::RoundActive);
        }
        let result = match self.last_noticeable {
            Some(qp) => JndResult::Found(qp),
            None => JndResult::NotFound,
        };
        Ok(RoundOutcome {
            result,
            comparisons: self.comparisons,
        })
    }
}

/// Runs a full round, asking `observer` for every comparison.
pub fn run_round<F>(config: SearchConfig, mut observer: F) -> RoundOutcome
where
    F: FnMut(&ComparisonRequest) -> Response,
{
    let mut state = SearchState::new(config);
    while let Ok(request) = state.request() {
        state = state
            .advance(observer(&request))
            .expect("active state accepts a response");
    }
    state.round_result().expect("loop exits on a terminated state")
}

/// Lower nearest-rank percentile of the samples: the `ceil(percentile * n)`-th
/// smallest value. With the default quartile this is the QP that three quarters
/// of the group could not tell apart from the anchor.
pub fn anchor_from_samples(samples: &[Qp], percentile: f64) -> Result<Qp> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !(percentile > 0.0 && percentile <= 1.0) {
        return Err(Error::param("percentile", "must lie in (0, 1]"));
    }
    let mut sorted = alloc::vec::Vec::from(samples);
    sorted.sort_unstable();
    let rank = nearest_rank(sorted.len(), percentile);
    Ok(sorted[rank - 1])
}

/// One-based nearest rank `ceil(p * n)` clamped to `[1, n]`.
pub(crate) fn nearest_rank(n: usize, p: f64) -> usize {
    let k = libm::ceil(p * n as f64 - 1e-9) as usize;
    k.clamp(1, n)
}

/// The search range `[anchor, 51]` for the next JND point.
pub fn next_round_config(anchor: Qp, procedure: Procedure) -> Result<SearchConfig> {
    if anchor >= Qp::MAX {
        return Err(Error::RangeExhausted(anchor));
    }
    SearchConfig::new(anchor, Qp::MAX, procedure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn qp(v: i64) -> Qp {
        Qp::new(v).unwrap()
    }

    fn robust(start: i64, end: i64) -> SearchConfig {
        SearchConfig::new(qp(start), qp(end), Procedure::Robust).unwrap()
    }

    fn bounds(state: &SearchState) -> (u8, u8, u8) {
        (state.left().get(), state.right().get(), state.probe().get())
    }

    fn threshold_observer(t: u8) -> impl FnMut(&ComparisonRequest) -> Response {
        move |req| {
            if req.probe_qp.get() >= t {
                Response::Noticeable
            } else {
                Response::Unnoticeable
            }
        }
    }

    #[test]
    fn init_examples() {
        let s = SearchState::new(robust(0, 51));
        assert_eq!(
            (s.anchor().get(), s.left().get(), s.right().get(), s.probe().get()),
            (0, 0, 51, 25)
        );
        assert_eq!(s.last_noticeable(), None);
        assert_eq!(s.comparisons_made(), 0);
        assert!(s.is_active());
        assert_eq!(SearchState::new(robust(27, 51)).probe(), qp(39));
    }

    #[test]
    fn minimal_interval_terminates_on_first_answer() {
        let s = SearchState::new(robust(0, 1));
        assert_eq!(s.probe(), qp(1));
        let n = s.step(Response::Noticeable).unwrap();
        assert_eq!(n.round_result().unwrap().result, JndResult::Found(qp(1)));
        let u = s.step(Response::Unnoticeable).unwrap();
        assert_eq!(u.round_result().unwrap().result, JndResult::NotFound);
    }

    #[test]
    fn empty_interval_is_rejected() {
        assert!(SearchConfig::new(qp(30), qp(30), Procedure::Robust).is_err());
        assert!(SearchConfig::new(qp(31), qp(30), Procedure::Robust).is_err());
    }

    #[test]
    fn robust_step_examples() {
        let s = SearchState::new(robust(0, 51));
        let n = s.step(Response::Noticeable).unwrap();
        assert_eq!(bounds(&n), (0, 38, 19));
        assert_eq!(n.last_noticeable(), Some(qp(25)));
        assert_eq!(n.comparisons_made(), 1);
        let u = s.step(Response::Unnoticeable).unwrap();
        assert_eq!(bounds(&u), (13, 51, 32));
        assert_eq!(u.last_noticeable(), None);
    }

    #[test]
    fn noticeable_next_to_left_bound_terminates() {
        let s = SearchState {
            left: qp(24),
            right: qp(27),
            probe: qp(25),
            ..SearchState::new(robust(0, 51))
        };
        let done = s.step(Response::Noticeable).unwrap();
        assert_eq!(done.status(), SearchStatus::Terminated);
        assert_eq!(done.round_result().unwrap().result, JndResult::Found(qp(25)));
        assert_eq!(done.step(Response::Noticeable), Err(Error::RoundTerminated));
        assert_eq!(s.round_result(), Err(Error::RoundActive));
    }

    #[test]
    fn legacy_step_examples() {
        let s = SearchState::new(SearchConfig::full_range(Procedure::LegacyAggressive));
        assert_eq!(bounds(&s.legacy_step(Response::Noticeable).unwrap()), (0, 25, 12));
        assert_eq!(bounds(&s.legacy_step(Response::Unnoticeable).unwrap()), (25, 51, 38));
    }

    #[test]
    fn all_unnoticeable_is_not_found() {
        let out = run_round(robust(0, 51), |_| Response::Unnoticeable);
        assert_eq!(out.result, JndResult::NotFound);
    }

    #[test]
    fn threshold_33_is_recovered() {
        let out = run_round(robust(0, 51), threshold_observer(33));
        assert_eq!(out.result, JndResult::Found(qp(33)));
    }

    #[test]
    fn always_noticeable_finds_first_qp_above_anchor() {
        for start in [0, 20, 27, 49] {
            for proc in [Procedure::Robust, Procedure::LegacyAggressive] {
                let cfg = SearchConfig::new(qp(start), Qp::MAX, proc).unwrap();
                let out = run_round(cfg, |_| Response::Noticeable);
                assert_eq!(out.found(), Some(qp(start + 1)));
            }
        }
    }

    #[test]
    fn exhaustive_oracle_recovery_both_procedures() {
        for proc in [Procedure::Robust, Procedure::LegacyAggressive] {
            for start in 0..51u8 {
                let cfg = SearchConfig::new(Qp::from_raw(start), Qp::MAX, proc).unwrap();
                for t in (start + 1)..=51 {
                    let out = run_round(cfg, threshold_observer(t));
                    assert_eq!(out.found(), Some(Qp::from_raw(t)), "{proc:?} start={start} t={t}");
                }
                let out = run_round(cfg, threshold_observer(52));
                assert_eq!(out.result, JndResult::NotFound);
            }
        }
    }

    #[test]
    fn interval_shrinks_and_contains_probe() {
        // Every response sequence of length <= 14 over the full range.
        for bits in 0u32..(1 << 14) {
            let mut state = SearchState::new(robust(0, 51));
            let mut i = 0;
            while state.is_active() {
                assert!(i < 14, "round did not terminate");
                let resp = if bits >> i & 1 == 1 {
                    Response::Noticeable
                } else {
                    Response::Unnoticeable
                };
                let next = state.step(resp).unwrap();
                if next.is_active() {
                    assert!(next.left() <= next.probe() && next.probe() <= next.right());
                    let w_prev = state.right().get() - state.left().get();
                    let w_next = next.right().get() - next.left().get();
                    assert!(w_next < w_prev);
                }
                state = next;
                i += 1;
            }
        }
    }

    #[test]
    fn anchor_examples() {
        let q = |v: &[i64]| v.iter().map(|&x| qp(x)).collect::<Vec<_>>();
        assert_eq!(anchor_from_samples(&q(&[30, 30, 30, 30]), 0.25).unwrap(), qp(30));
        assert_eq!(
            anchor_from_samples(&q(&[22, 25, 26, 27, 28, 29, 30, 31]), 0.25).unwrap(),
            qp(25)
        );
        assert_eq!(
            anchor_from_samples(&q(&[31, 22, 30, 27, 29, 26, 28, 25]), 0.25).unwrap(),
            qp(25)
        );
        assert_eq!(anchor_from_samples(&q(&[27]), 0.25).unwrap(), qp(27));
        assert_eq!(anchor_from_samples(&[], 0.25), Err(Error::EmptySamples));
    }

    #[test]
    fn next_round_examples() {
        let c = next_round_config(qp(27), Procedure::Robust).unwrap();
        assert_eq!((c.start(), c.end()), (qp(27), qp(51)));
        assert_eq!(next_round_config(qp(0), Procedure::Robust).unwrap().start(), qp(0));
        assert_eq!(next_round_config(qp(50), Procedure::Robust).unwrap().end(), qp(51));
        assert_eq!(
            next_round_config(qp(51), Procedure::Robust),
            Err(Error::RangeExhausted(qp(51)))
        );
    }

    #[test]
    fn request_applies_ladder() {
        let s = SearchState {
            probe: qp(50),
            left: qp(49),
            ..SearchState::new(robust(0, 51))
        };
        let req = s.request().unwrap();
        assert_eq!(
            (req.anchor_clip_qp, req.probe_qp, req.probe_clip_qp),
            (qp(0), qp(50), qp(47))
        );
    }
}
