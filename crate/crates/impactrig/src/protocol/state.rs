//! Trial state machine: the single-run procedure as an enforced sequence,
//! with an anti-double-hit guard on the collision step.

use super::ProtocolError;
use serde::{Deserialize, Serialize};

/// Phases of one automated trial, in execution order. `Fault` is reachable
/// from any other state; `Done` and `Fault` are terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrialState {
    /// Specimen and impactor aligned at the collision point.
    Align,
    /// Motor winds the pendulum to the release angle.
    Wind,
    /// Brake holds the pendulum at the release angle.
    BrakeHold,
    /// Motor unwinds the strap so the pendulum can fall freely.
    Unwind,
    /// Brake opens; free fall toward the collision point.
    Release,
    /// Impact; instrumentation active.
    Collide,
    /// Struck pendulum caught, striker braked before a second hit.
    Catch,
    Done,
    Fault,
}

impl TrialState {
    fn successor(self) -> Option<TrialState> {
        match self {
            TrialState::Align => Some(TrialState::Wind),
            TrialState::Wind => Some(TrialState::BrakeHold),
            TrialState::BrakeHold => Some(TrialState::Unwind),
            TrialState::Unwind => Some(TrialState::Release),
            TrialState::Release => Some(TrialState::Collide),
            TrialState::Collide => Some(TrialState::Catch),
            TrialState::Catch => Some(TrialState::Done),
            TrialState::Done | TrialState::Fault => None,
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, TrialState::Done | TrialState::Fault)
    }

    /// Legal moves: one step along the chain, or into `Fault` from any
    /// other state.
    pub fn can_advance_to(self, next: TrialState) -> bool {
        if next == TrialState::Fault {
            return self != TrialState::Fault;
        }
        self.successor() == Some(next)
    }
}

/// Tracks one trial through its phases and counts collision entries so a
/// recoil can never register as a second hit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialStateMachine {
    state: TrialState,
    collide_entries: usize,
    fault_reason: Option<String>,
}

impl Default for TrialStateMachine {
    fn default() -> Self {
        Self::new()
    }
}

impl TrialStateMachine {
    pub fn new() -> Self {
        TrialStateMachine {
            state: TrialState::Align,
            collide_entries: 0,
            fault_reason: None,
        }
    }

    pub fn state(&self) -> TrialState {
        self.state
    }

    pub fn collide_entries(&self) -> usize {
        self.collide_entries
    }

    pub fn fault_reason(&self) -> Option<&str> {
        self.fault_reason.as_deref()
    }

    pub fn advance(&mut self, next: TrialState) -> Result<(), ProtocolError> {
        if !self.state.can_advance_to(next) {
            return Err(ProtocolError::IllegalTransition {
                from: self.state,
                to: next,
            });
        }
        if next == TrialState::Collide {
            self.collide_entries += 1;
            if self.collide_entries > 1 {
                // Unreachable through legal transitions; kept as a guard
                // against machine reuse.
                return Err(ProtocolError::IllegalTransition {
                    from: self.state,
                    to: next,
                });
            }
        }
        self.state = next;
        Ok(())
    }

    /// Abort the trial, recording why.
    pub fn fault(&mut self, reason: impl Into<String>) -> Result<(), ProtocolError> {
        self.advance(TrialState::Fault)?;
        self.fault_reason = Some(reason.into());
        Ok(())
    }
}
