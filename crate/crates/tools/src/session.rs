//! Live JND sessions. A session is one subject searching one JND level over
//! every sequence set of one package. All mutations go through [`Event`]s, so a
//! session rebuilt from its event log is identical to the live one.

use std::collections::BTreeMap;

use jnd_core::{
    next_round_config, ComparisonRequest, JndResult, Procedure, Qp, Resolution, Response, RoundOutcome, SearchConfig,
    SearchState, SequenceId,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{shuffle, PackageAssignment};
use crate::samples::DatasetRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    InProgress,
    /// Half the sequence sets are done. Reported once; the next response
    /// resumes the session.
    Break,
    Complete,
    Abandoned,
}

impl SessionStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SessionStatus::InProgress => "in_progress",
            SessionStatus::Break => "break",
            SessionStatus::Complete => "complete",
            SessionStatus::Abandoned => "abandoned",
        }
    }
}

/// One line of a session's JSONL log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Milliseconds since the Unix epoch, strictly increasing within a session.
    pub ts: u64,
    pub session_id: String,
    pub seq_index: usize,
    #[serde(flatten)]
    pub body: EventBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum EventBody {
    Created(Created),
    Response { step: u32, response: Response },
    Replay { step: u32 },
    Abandoned {},
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Created {
    pub package_id: u32,
    pub jnd_index: u8,
    pub subject_id: u32,
    pub procedure: Procedure,
    /// Sequence sets in presentation order with their search ranges.
    pub sets: Vec<SetStart>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetStart {
    pub content_id: u32,
    pub resolution: Resolution,
    pub anchor: Qp,
}

/// Anchor QP of one sequence set, as sent by clients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anchor {
    pub content_id: u32,
    pub resolution: Resolution,
    pub qp: Qp,
}

/// Identifies the pair a response answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairToken {
    pub seq_index: usize,
    pub step: u32,
}

/// The comparison currently shown to the subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairView {
    pub session_id: String,
    pub status: SessionStatus,
    pub seq_index: usize,
    pub step: u32,
    pub content_id: u32,
    pub resolution: Resolution,
    pub anchor_qp: Qp,
    pub probe_qp: Qp,
    pub anchor_clip_qp: Qp,
    pub probe_clip_qp: Qp,
    pub anchor_uri: String,
    pub probe_uri: String,
    pub completed: usize,
    pub total: usize,
}

impl PairView {
    pub fn token(&self) -> PairToken {
        PairToken {
            seq_index: self.seq_index,
            step: self.step,
        }
    }
}

/// Result of a response submission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    pub status: SessionStatus,
    pub completed: usize,
    pub total: usize,
    /// Row emitted when the response finished a sequence set.
    pub finished: Option<DatasetRow>,
}

/// Session overview for clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub package_id: u32,
    pub jnd_index: u8,
    pub subject_id: u32,
    pub status: SessionStatus,
    pub completed: usize,
    pub total: usize,
    pub rows: Vec<DatasetRow>,
}

/// Expands `{content}`, `{resolution}` and `{qp}` in a clip URI template.
pub fn clip_uri(template: &str, sequence: SequenceId, qp: Qp) -> String {
    template
        .replace("{content}", &sequence.content.to_string())
        .replace("{resolution}", sequence.resolution.as_str())
        .replace("{qp}", &qp.get().to_string())
}

pub const DEFAULT_CLIP_TEMPLATE: &str = "clips/{content}/{resolution}/qp{qp}.mp4";

#[derive(Debug, Clone, PartialEq)]
pub struct SessionRecord {
    pub session_id: String,
    pub package_id: u32,
    pub jnd_index: u8,
    pub subject_id: u32,
    pub procedure: Procedure,
    /// Presentation order.
    pub sets: Vec<SequenceId>,
    pub states: Vec<SearchState>,
    pub outcomes: Vec<Option<RoundOutcome>>,
    pub current: usize,
    pub status: SessionStatus,
    pub break_shown: bool,
    pub events: Vec<Event>,
}

impl SessionRecord {
    /// Validates the anchors, shuffles the package's sets with `order_seed` and
    /// logs the creation.
    #[allow(clippy::too_many_arguments)]
    pub fn create(
        session_id: String,
        package: &PackageAssignment,
        jnd_index: u8,
        subject_id: u32,
        anchors: &[Anchor],
        procedure: Procedure,
        order_seed: u64,
        ts: u64,
    ) -> Result<Self> {
        if jnd_index == 0 {
            return Err(Error::Validation("jnd_index must be at least 1".into()));
        }
        let mut by_set = BTreeMap::new();
        for a in anchors {
            let seq = SequenceId::new(a.content_id, a.resolution);
            if !package.sets.contains(&seq) {
                return Err(Error::Validation(format!(
                    "anchor for {seq}, which is not in package {}",
                    package.package_id
                )));
            }
            if by_set.insert(seq, a.qp).is_some() {
                return Err(Error::Validation(format!("two anchors for {seq}")));
            }
        }
        let mut sets = package.sets.clone();
        shuffle(&mut sets, order_seed);
        let mut starts = Vec::with_capacity(sets.len());
        for &seq in &sets {
            let anchor = match (jnd_index, by_set.get(&seq)) {
                (1, None) => Qp::MIN,
                (1, Some(&qp)) if qp == Qp::MIN => qp,
                (1, Some(_)) => {
                    return Err(Error::Validation(format!("first-JND anchor for {seq} must be 0")));
                }
                (_, Some(&qp)) => qp,
                (_, None) => return Err(Error::Validation(format!("missing anchor for {seq}"))),
            };
            next_round_config(anchor, procedure)?;
            starts.push(SetStart {
                content_id: seq.content,
                resolution: seq.resolution,
                anchor,
            });
        }
        let created = Created {
            package_id: package.package_id,
            jnd_index,
            subject_id,
            procedure,
            sets: starts,
        };
        let event = Event {
            ts,
            session_id,
            seq_index: 0,
            body: EventBody::Created(created),
        };
        Self::replay(&[event])
    }

    /// Rebuilds a session from its log.
    pub fn replay(events: &[Event]) -> Result<Self> {
        let (first, rest) = events
            .split_first()
            .ok_or_else(|| Error::EventLog("empty event log".into()))?;
        let EventBody::Created(created) = &first.body else {
            return Err(Error::EventLog("log does not start with a created event".into()));
        };
        let mut sets = Vec::with_capacity(created.sets.len());
        let mut states = Vec::with_capacity(created.sets.len());
        for s in &created.sets {
            let config = if s.anchor == Qp::MIN {
                SearchConfig::full_range(created.procedure)
            } else {
                next_round_config(s.anchor, created.procedure)?
            };
            sets.push(SequenceId::new(s.content_id, s.resolution));
            states.push(SearchState::new(config));
        }
        if sets.is_empty() {
            return Err(Error::EventLog("session without sequence sets".into()));
        }
        let mut record = SessionRecord {
            session_id: first.session_id.clone(),
            package_id: created.package_id,
            jnd_index: created.jnd_index,
            subject_id: created.subject_id,
            procedure: created.procedure,
            outcomes: vec![None; sets.len()],
            sets,
            states,
            current: 0,
            status: SessionStatus::InProgress,
            break_shown: false,
            events: vec![first.clone()],
        };
        for event in rest {
            record.apply(event.clone())?;
        }
        Ok(record)
    }

    pub fn completed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.is_some()).count()
    }

    pub fn total(&self) -> usize {
        self.sets.len()
    }

    /// Strictly after the last event, and not before `now`.
    pub fn next_ts(&self, now: u64) -> u64 {
        let last = self.events.last().map_or(0, |e| e.ts);
        now.max(last + 1)
    }

    fn accepting(&self) -> Result<()> {
        match self.status {
            SessionStatus::InProgress | SessionStatus::Break => Ok(()),
            other => Err(Error::NotAccepting {
                session: self.session_id.clone(),
                status: other.as_str().into(),
            }),
        }
    }

    fn current_token(&self) -> PairToken {
        PairToken {
            seq_index: self.current,
            step: self.states[self.current].comparisons_made(),
        }
    }

    /// Applies one logged event. This is the only mutation path.
    pub fn apply(&mut self, event: Event) -> Result<()> {
        if event.session_id != self.session_id {
            return Err(Error::EventLog(format!("event for session {}", event.session_id)));
        }
        if let Some(last) = self.events.last() {
            if event.ts <= last.ts {
                return Err(Error::EventLog(format!("timestamp {} not after {}", event.ts, last.ts)));
            }
        }
        match &event.body {
            EventBody::Created(_) => return Err(Error::EventLog("duplicate created event".into())),
            EventBody::Response { step, response } => {
                self.accepting()?;
                let token = PairToken {
                    seq_index: event.seq_index,
                    step: *step,
                };
                if token != self.current_token() {
                    return Err(Error::EventLog(format!(
                        "response for {token:?}, current is {:?}",
                        self.current_token()
                    )));
                }
                if self.status == SessionStatus::Break {
                    self.status = SessionStatus::InProgress;
                }
                let next = self.states[self.current].advance(*response)?;
                self.states[self.current] = next;
                if !next.is_active() {
                    self.outcomes[self.current] = Some(next.round_result()?);
                    self.finish_set();
                }
            }
            EventBody::Replay { step } => {
                self.accepting()?;
                let token = PairToken {
                    seq_index: event.seq_index,
                    step: *step,
                };
                if token != self.current_token() {
                    return Err(Error::EventLog(format!(
                        "replay for {token:?}, current is {:?}",
                        self.current_token()
                    )));
                }
            }
            EventBody::Abandoned {} => {
                self.accepting()?;
                self.status = SessionStatus::Abandoned;
            }
        }
        self.events.push(event);
        Ok(())
    }

    fn finish_set(&mut self) {
        let (done, total) = (self.completed(), self.total());
        if done == total {
            self.status = SessionStatus::Complete;
            return;
        }
        self.current += 1;
        if !self.break_shown && total >= 2 && 2 * done >= total {
            self.break_shown = true;
            self.status = SessionStatus::Break;
        }
    }

    pub fn request(&self) -> Result<ComparisonRequest> {
        if self.status == SessionStatus::Complete || self.status == SessionStatus::Abandoned {
            return Err(Error::NoMorePairs(self.session_id.clone()));
        }
        Ok(self.states[self.current].request()?)
    }

    /// Read-only view of the current pair.
    pub fn next_pair(&self, clip_template: &str) -> Result<PairView> {
        let req = self.request()?;
        let seq = self.sets[self.current];
        Ok(PairView {
            session_id: self.session_id.clone(),
            status: self.status,
            seq_index: self.current,
            step: self.states[self.current].comparisons_made(),
            content_id: seq.content,
            resolution: seq.resolution,
            anchor_qp: req.anchor_qp,
            probe_qp: req.probe_qp,
            anchor_clip_qp: req.anchor_clip_qp,
            probe_clip_qp: req.probe_clip_qp,
            anchor_uri: clip_uri(clip_template, seq, req.anchor_clip_qp),
            probe_uri: clip_uri(clip_template, seq, req.probe_clip_qp),
            completed: self.completed(),
            total: self.total(),
        })
    }

    /// Builds the event for a response. A `token` that does not name the
    /// current pair is a repeated submission.
    pub fn response_event(
        &self,
        response: Response,
        token: Option<PairToken>,
        ts: u64,
        clip_template: &str,
    ) -> Result<Event> {
        self.accepting()?;
        let current = self.current_token();
        if token.is_some_and(|t| t != current) {
            return Err(Error::AlreadyAnswered {
                current: self.next_pair(clip_template).ok().map(Box::new),
            });
        }
        Ok(Event {
            ts,
            session_id: self.session_id.clone(),
            seq_index: current.seq_index,
            body: EventBody::Response {
                step: current.step,
                response,
            },
        })
    }

    pub fn replay_event(&self, ts: u64) -> Result<Event> {
        self.accepting()?;
        let current = self.current_token();
        Ok(Event {
            ts,
            session_id: self.session_id.clone(),
            seq_index: current.seq_index,
            body: EventBody::Replay { step: current.step },
        })
    }

    pub fn abandon_event(&self, ts: u64) -> Result<Event> {
        self.accepting()?;
        Ok(Event {
            ts,
            session_id: self.session_id.clone(),
            seq_index: self.current,
            body: EventBody::Abandoned {},
        })
    }

    /// Row of a finished sequence set. A round without a JND is stored as
    /// censored at QP 51.
    pub fn row(&self, seq_index: usize) -> Option<DatasetRow> {
        let outcome = self.outcomes.get(seq_index)?.as_ref()?;
        let seq = self.sets[seq_index];
        let (qp, censored) = match outcome.result {
            JndResult::Found(qp) => (qp, false),
            JndResult::NotFound => (Qp::MAX, true),
        };
        Some(DatasetRow {
            content_id: seq.content,
            resolution: seq.resolution,
            subject_id: self.subject_id,
            jnd_index: self.jnd_index,
            qp,
            censored,
        })
    }

    pub fn rows(&self) -> Vec<DatasetRow> {
        (0..self.sets.len()).filter_map(|i| self.row(i)).collect()
    }

    pub fn progress(&self, finished: Option<DatasetRow>) -> Progress {
        Progress {
            status: self.status,
            completed: self.completed(),
            total: self.total(),
            finished,
        }
    }

    pub fn summary(&self) -> SessionSummary {
        SessionSummary {
            session_id: self.session_id.clone(),
            package_id: self.package_id,
            jnd_index: self.jnd_index,
            subject_id: self.subject_id,
            status: self.status,
            completed: self.completed(),
            total: self.total(),
            rows: self.rows(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::synthetic_sets;
    use jnd_core::run_round;

    fn package(n: usize) -> PackageAssignment {
        PackageAssignment {
            package_id: 1,
            sets: synthetic_sets(n),
            seed: 0,
        }
    }

    fn fresh(n: usize) -> SessionRecord {
        SessionRecord::create("s1".into(), &package(n), 1, 7, &[], Procedure::Robust, 3, 1).unwrap()
    }

    fn answer(record: &mut SessionRecord, threshold: u8) -> Progress {
        let probe = record.request().unwrap().probe_qp;
        let response = if probe.get() >= threshold {
            Response::Noticeable
        } else {
            Response::Unnoticeable
        };
        let ts = record.next_ts(0);
        let event = record
            .response_event(response, None, ts, DEFAULT_CLIP_TEMPLATE)
            .unwrap();
        let seq_index = event.seq_index;
        record.apply(event).unwrap();
        record.progress(record.row(seq_index))
    }

    #[test]
    fn first_pair_matches_first_comparison() {
        let r = fresh(3);
        let pair = r.next_pair(DEFAULT_CLIP_TEMPLATE).unwrap();
        assert_eq!(pair.anchor_clip_qp.get(), 0);
        assert_eq!(pair.probe_clip_qp.get(), 25);
        assert_eq!(pair.step, 0);
        assert!(pair.probe_uri.ends_with("qp25.mp4"));
    }

    #[test]
    fn high_probe_uses_substituted_clip() {
        let pkg = package(1);
        let seq = pkg.sets[0];
        let anchors = [Anchor {
            content_id: seq.content,
            resolution: seq.resolution,
            qp: Qp::new(49).unwrap(),
        }];
        let r = SessionRecord::create("s".into(), &pkg, 2, 1, &anchors, Procedure::Robust, 0, 1).unwrap();
        let pair = r.next_pair(DEFAULT_CLIP_TEMPLATE).unwrap();
        assert_eq!(pair.probe_qp.get(), 50);
        assert_eq!(pair.probe_clip_qp.get(), 47);
    }

    #[test]
    fn anchors_are_validated() {
        let pkg = package(2);
        let seq = pkg.sets[0];
        let at = |qp: i64| Anchor {
            content_id: seq.content,
            resolution: seq.resolution,
            qp: Qp::new(qp).unwrap(),
        };
        let create =
            |jnd, anchors: &[Anchor]| SessionRecord::create("s".into(), &pkg, jnd, 1, anchors, Procedure::Robust, 0, 1);
        assert!(create(1, &[at(5)]).is_err());
        assert!(create(1, &[at(0)]).is_ok());
        assert!(create(2, &[at(27)]).is_err(), "second set has no anchor");
        let other = pkg.sets[1];
        let both = [
            at(27),
            Anchor {
                content_id: other.content,
                resolution: other.resolution,
                qp: Qp::new(30).unwrap(),
            },
        ];
        let r = create(2, &both).unwrap();
        let i = r.sets.iter().position(|s| *s == seq).unwrap();
        assert_eq!(r.states[i].left().get(), 27);
        assert_eq!(r.states[i].right().get(), 51);
        assert!(create(2, &[at(27), at(27)]).is_err());
        assert!(create(3, &[at(51), both[1]]).is_err(), "no range above 51");
    }

    #[test]
    fn walk_through_matches_search_oracle() {
        let mut r = fresh(1);
        let config = r.states[0].config();
        let expected = run_round(config, |req| {
            if req.probe_qp.get() >= 33 {
                Response::Noticeable
            } else {
                Response::Unnoticeable
            }
        });
        let mut last = None;
        while r.status != SessionStatus::Complete {
            last = answer(&mut r, 33).finished;
        }
        assert_eq!(r.outcomes[0], Some(expected));
        assert_eq!(last.unwrap().qp.get(), 33);
        assert!(matches!(r.next_pair(DEFAULT_CLIP_TEMPLATE), Err(Error::NoMorePairs(_))));
    }

    #[test]
    fn not_found_is_censored_at_51() {
        let mut r = fresh(1);
        while r.status != SessionStatus::Complete {
            answer(&mut r, 60);
        }
        let row = r.row(0).unwrap();
        assert!(row.censored);
        assert_eq!(row.qp, Qp::MAX);
    }

    #[test]
    fn break_is_flagged_once_at_half() {
        let mut r = fresh(4);
        let mut statuses = Vec::new();
        while r.status != SessionStatus::Complete {
            let p = answer(&mut r, 30);
            if p.finished.is_some() {
                statuses.push(p.status);
            }
        }
        use SessionStatus::*;
        assert_eq!(statuses, vec![InProgress, Break, InProgress, Complete]);
        assert_eq!(r.rows().len(), 4);
    }

    #[test]
    fn stale_token_is_rejected_without_change() {
        let mut r = fresh(2);
        let token = r.next_pair(DEFAULT_CLIP_TEMPLATE).unwrap().token();
        let event = r
            .response_event(Response::Noticeable, Some(token), 2, DEFAULT_CLIP_TEMPLATE)
            .unwrap();
        r.apply(event).unwrap();
        let before = r.clone();
        match r.response_event(Response::Noticeable, Some(token), 3, DEFAULT_CLIP_TEMPLATE) {
            Err(Error::AlreadyAnswered { current: Some(pair) }) => assert_eq!(pair.step, 1),
            other => panic!("{other:?}"),
        }
        assert_eq!(r, before);
    }

    #[test]
    fn completed_sessions_refuse_input() {
        let mut r = fresh(1);
        while r.status != SessionStatus::Complete {
            answer(&mut r, 20);
        }
        let before = r.clone();
        assert!(matches!(
            r.response_event(Response::Noticeable, None, 99, DEFAULT_CLIP_TEMPLATE),
            Err(Error::NotAccepting { .. })
        ));
        assert!(r.replay_event(99).is_err());
        assert_eq!(r, before);
    }

    #[test]
    fn replay_rebuilds_the_record() {
        let mut r = fresh(5);
        let ts = r.next_ts(0);
        r.apply(r.replay_event(ts).unwrap()).unwrap();
        for t in [20, 30, 45] {
            let target = r.completed() + 1;
            while r.completed() < target {
                answer(&mut r, t);
            }
        }
        assert_eq!(SessionRecord::replay(&r.events).unwrap(), r);
        for cut in 1..r.events.len() {
            let partial = SessionRecord::replay(&r.events[..cut]).unwrap();
            assert!(matches!(
                partial.status,
                SessionStatus::InProgress | SessionStatus::Break
            ));
        }
    }

    #[test]
    fn events_round_trip_through_json() {
        let mut r = fresh(2);
        answer(&mut r, 30);
        for e in &r.events {
            let line = serde_json::to_string(e).unwrap();
            let v: serde_json::Value = serde_json::from_str(&line).unwrap();
            for key in ["ts", "session_id", "seq_index", "kind", "payload"] {
                assert!(v.get(key).is_some(), "{key} missing from {line}");
            }
            assert_eq!(&serde_json::from_str::<Event>(&line).unwrap(), e);
        }
    }

    #[test]
    fn log_order_is_enforced() {
        let r = fresh(1);
        let mut bad = r
            .response_event(Response::Noticeable, None, 1, DEFAULT_CLIP_TEMPLATE)
            .unwrap();
        assert!(r.clone().apply(bad.clone()).is_err(), "timestamp must advance");
        bad.ts = 5;
        bad.body = EventBody::Response {
            step: 4,
            response: Response::Noticeable,
        };
        assert!(r.clone().apply(bad).is_err(), "step must match");
    }
}
