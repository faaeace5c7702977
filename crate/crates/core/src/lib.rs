//! Simulation and temporal-logic verification workbench for adaptive cruise
//! control.
//!
//! The crate is organized as a pipeline:
//!
//! * [`plant`] — discrete-time longitudinal kinematics of the ego and lead
//!   vehicles.
//! * [`controller`] — the switched dual-PID ACC law (speed tracking vs.
//!   spacing recovery).
//! * [`ltl`] — linear temporal logic: formula parsing, Büchi automaton
//!   construction, and two independent checking procedures for ultimately
//!   periodic words.
//! * [`patterns`] — specification-pattern templates (universality, existence,
//!   absence, response, precedence) that compile to LTL, plus the canned
//!   stability property for the ACC.
//! * [`harness`] — scenario configs, the simulation loop, trace CSV I/O, and
//!   the verdict report over the bundled scenarios.

pub mod controller;
pub mod harness;
pub mod ltl;
pub mod patterns;
pub mod plant;
