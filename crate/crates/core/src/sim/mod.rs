//! The grid world and its per-tick dynamics.
//!
//! Civilians of two groups random-walk inside their own region and commit
//! crimes at a constant rate. Cops move freely, either following the stigma
//! field toward past arrest sites or patrolling at random, and arrest flagged
//! civilians in their Moore neighborhood. Every arrest raises the stigma at
//! and around the arrest cell, which is what closes the feedback loop.

mod config;
mod engine;
mod world;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use config::{CopRule, SimConfig};
pub use engine::{run_sim, ArrestPair, SimRun, SimState};
pub use world::{Cell, Region, WorldGrid, MOORE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    G1,
    G2,
}

impl Group {
    pub const ALL: [Group; 2] = [Group::G1, Group::G2];

    /// Each group lives in its own region: G1 in region 1, G2 in region 2.
    pub fn region(self) -> Region {
        match self {
            Group::G1 => Region::One,
            Group::G2 => Region::Two,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Group::G1 => 0,
            Group::G2 => 1,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::G1 => "G1",
            Group::G2 => "G2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Civilian {
    pub id: u32,
    pub group: Group,
    pub pos: Cell,
    /// Set when the civilian commits a crime this tick; cleared at the start of the next.
    pub crime_flag: bool,
    pub arrest_count: u32,
    pub ever_positive_j: bool,
    pub ever_recidivist: bool,
}

impl Civilian {
    pub fn new(id: u32, group: Group, pos: Cell) -> Self {
        Self { id, group, pos, crime_flag: false, arrest_count: 0, ever_positive_j: false, ever_recidivist: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cop {
    pub id: u32,
    pub pos: Cell,
}
