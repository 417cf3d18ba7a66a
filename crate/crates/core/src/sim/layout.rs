//! Flat state-vector layout for the closed loop.
//!
//! The integrator sees one `Vec<f64>`. Per player (in index order) the vector
//! carries the action `x_i`, the velocity `v_i` when the plant has one, and
//! the regulator's adaptive states channel-major. The estimator block follows:
//! references `y`, stacked beliefs `z`, and, in adaptive mode, the consensus
//! gains `delta`. Every entry belongs to exactly one named segment, which is
//! how divergence reports and CSV columns name state entries.

use std::ops::Range;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub name: String,
    pub range: Range<usize>,
}

/// Shape of one player's contribution to the state vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlayerShape {
    pub dim: usize,
    pub has_velocity: bool,
    pub reg_states_per_channel: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateLayout {
    segments: Vec<Segment>,
    players: Vec<PlayerShape>,
    x_ranges: Vec<Range<usize>>,
    v_ranges: Vec<Option<Range<usize>>>,
    reg_ranges: Vec<Range<usize>>,
    y_range: Range<usize>,
    z_range: Range<usize>,
    delta_range: Option<Range<usize>>,
    total: usize,
}

impl StateLayout {
    /// `n_players` and `total_dim` describe the game; `players` may be empty
    /// for estimator-only runs. `adaptive_gains` is the gain-state length in
    /// adaptive mode.
    pub fn new(
        players: &[PlayerShape],
        n_players: usize,
        total_dim: usize,
        adaptive_gains: Option<usize>,
    ) -> Self {
        let mut segments = Vec::new();
        let mut x_ranges = Vec::new();
        let mut v_ranges = Vec::new();
        let mut reg_ranges = Vec::new();
        let mut cursor = 0;
        let mut push = |segments: &mut Vec<Segment>, name: String, len: usize| -> Range<usize> {
            let range = cursor..cursor + len;
            segments.push(Segment {
                name,
                range: range.clone(),
            });
            cursor += len;
            range
        };
        for (idx, p) in players.iter().enumerate() {
            let tag = idx + 1;
            x_ranges.push(push(&mut segments, format!("x_{tag}"), p.dim));
            v_ranges.push(if p.has_velocity {
                Some(push(&mut segments, format!("v_{tag}"), p.dim))
            } else {
                None
            });
            reg_ranges.push(push(
                &mut segments,
                format!("reg_{tag}"),
                p.dim * p.reg_states_per_channel,
            ));
        }
        let y_range = push(&mut segments, "y".into(), total_dim);
        let z_range = push(&mut segments, "z".into(), n_players * total_dim);
        let delta_range = adaptive_gains.map(|len| push(&mut segments, "delta".into(), len));
        StateLayout {
            segments,
            players: players.to_vec(),
            x_ranges,
            v_ranges,
            reg_ranges,
            y_range,
            z_range,
            delta_range,
            total: cursor,
        }
    }

    pub fn total_len(&self) -> usize {
        self.total
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn n_sim_players(&self) -> usize {
        self.players.len()
    }

    pub fn player_shape(&self, i: usize) -> PlayerShape {
        self.players[i]
    }

    pub fn x_range(&self, i: usize) -> Range<usize> {
        self.x_ranges[i].clone()
    }

    pub fn v_range(&self, i: usize) -> Option<Range<usize>> {
        self.v_ranges[i].clone()
    }

    pub fn reg_range(&self, i: usize) -> Range<usize> {
        self.reg_ranges[i].clone()
    }

    /// Adaptive states of channel `c` of player `i`.
    pub fn reg_channel_range(&self, i: usize, c: usize) -> Range<usize> {
        let per = self.players[i].reg_states_per_channel;
        let start = self.reg_ranges[i].start + c * per;
        start..start + per
    }

    pub fn y_range(&self) -> Range<usize> {
        self.y_range.clone()
    }

    pub fn z_range(&self) -> Range<usize> {
        self.z_range.clone()
    }

    pub fn delta_range(&self) -> Option<Range<usize>> {
        self.delta_range.clone()
    }

    /// Segment name owning a flat index; used by divergence reports.
    pub fn segment_of(&self, index: usize) -> &str {
        match self
            .segments
            .binary_search_by(|s| {
                if index < s.range.start {
                    std::cmp::Ordering::Greater
                } else if index >= s.range.end {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            }) {
            Ok(pos) => &self.segments[pos].name,
            Err(_) => "unknown",
        }
    }

    pub fn pack(&self, parts: &StateParts) -> Result<Vec<f64>> {
        let expect = |context: &str, expected: usize, actual: usize| -> Result<()> {
            if expected != actual {
                Err(Error::Dimension {
                    context: context.into(),
                    expected,
                    actual,
                })
            } else {
                Ok(())
            }
        };
        expect("pack players", self.players.len(), parts.x.len())?;
        let mut flat = vec![0.0; self.total];
        for i in 0..self.players.len() {
            expect(&format!("pack x_{}", i + 1), self.players[i].dim, parts.x[i].len())?;
            flat[self.x_ranges[i].clone()].copy_from_slice(&parts.x[i]);
            match (&self.v_ranges[i], &parts.v[i]) {
                (Some(range), Some(v)) => {
                    expect(&format!("pack v_{}", i + 1), range.len(), v.len())?;
                    flat[range.clone()].copy_from_slice(v);
                }
                (None, None) => {}
                _ => {
                    return Err(Error::Dimension {
                        context: format!("pack v_{}", i + 1),
                        expected: self.v_ranges[i].as_ref().map_or(0, Range::len),
                        actual: parts.v[i].as_ref().map_or(0, Vec::len),
                    });
                }
            }
            expect(
                &format!("pack reg_{}", i + 1),
                self.reg_ranges[i].len(),
                parts.regs[i].len(),
            )?;
            flat[self.reg_ranges[i].clone()].copy_from_slice(&parts.regs[i]);
        }
        expect("pack y", self.y_range.len(), parts.y.len())?;
        flat[self.y_range.clone()].copy_from_slice(&parts.y);
        expect("pack z", self.z_range.len(), parts.z.len())?;
        flat[self.z_range.clone()].copy_from_slice(&parts.z);
        match (&self.delta_range, &parts.delta) {
            (Some(range), Some(delta)) => {
                expect("pack delta", range.len(), delta.len())?;
                flat[range.clone()].copy_from_slice(delta);
            }
            (None, None) => {}
            _ => {
                return Err(Error::Dimension {
                    context: "pack delta".into(),
                    expected: self.delta_range.as_ref().map_or(0, Range::len),
                    actual: parts.delta.as_ref().map_or(0, Vec::len),
                });
            }
        }
        Ok(flat)
    }

    pub fn unpack(&self, flat: &[f64]) -> StateParts {
        assert_eq!(flat.len(), self.total, "flat state has the wrong length");
        StateParts {
            x: self
                .x_ranges
                .iter()
                .map(|r| flat[r.clone()].to_vec())
                .collect(),
            v: self
                .v_ranges
                .iter()
                .map(|r| r.as_ref().map(|r| flat[r.clone()].to_vec()))
                .collect(),
            regs: self
                .reg_ranges
                .iter()
                .map(|r| flat[r.clone()].to_vec())
                .collect(),
            y: flat[self.y_range.clone()].to_vec(),
            z: flat[self.z_range.clone()].to_vec(),
            delta: self
                .delta_range
                .as_ref()
                .map(|r| flat[r.clone()].to_vec()),
        }
    }
}

/// Named per-module views of one flat state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateParts {
    pub x: Vec<Vec<f64>>,
    pub v: Vec<Option<Vec<f64>>>,
    pub regs: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub delta: Option<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mixed_layout() -> StateLayout {
        // Player 1: first-order (2 reg states/channel), player 2: chain,
        // player 3: backstepping; plus adaptive gains.
        StateLayout::new(
            &[
                PlayerShape {
                    dim: 2,
                    has_velocity: false,
                    reg_states_per_channel: 2,
                },
                PlayerShape {
                    dim: 2,
                    has_velocity: true,
                    reg_states_per_channel: 2,
                },
                PlayerShape {
                    dim: 2,
                    has_velocity: true,
                    reg_states_per_channel: 6,
                },
            ],
            3,
            6,
            Some(18),
        )
    }

    #[test]
    fn segments_tile_the_state_vector() {
        let layout = mixed_layout();
        let mut cursor = 0;
        for seg in layout.segments() {
            assert_eq!(seg.range.start, cursor);
            cursor = seg.range.end;
        }
        assert_eq!(cursor, layout.total_len());
        // x1 2 + reg1 4 + x2 2 + v2 2 + reg2 4 + x3 2 + v3 2 + reg3 12
        // + y 6 + z 18 + delta 18
        assert_eq!(layout.total_len(), 72);
        assert_eq!(layout.segment_of(0), "x_1");
        assert_eq!(layout.segment_of(71), "delta");
        assert_eq!(layout.segment_of(layout.reg_channel_range(2, 1).start), "reg_3");
    }

    #[test]
    fn pack_rejects_mismatched_parts() {
        let layout = mixed_layout();
        let mut parts = layout.unpack(&vec![0.0; layout.total_len()]);
        parts.y.pop();
        assert!(layout.pack(&parts).is_err());
    }

    proptest! {
        /// unpack ∘ pack is the identity on the flat vector, bit for bit.
        #[test]
        fn pack_unpack_round_trip(values in proptest::collection::vec(-1e9f64..1e9, 72)) {
            let layout = mixed_layout();
            let parts = layout.unpack(&values);
            let packed = layout.pack(&parts).unwrap();
            prop_assert_eq!(packed, values);
        }
    }
}
