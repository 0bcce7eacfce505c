//! Simulation and verification toolkit for hybrid round schedules that mix
//! LOCAL, CONGEST and broadcast-congested-clique rounds.

pub mod bits;
pub mod engine;
pub mod graph;
pub mod languages;
pub mod pointer;
pub mod protocols;
pub mod suite;
pub mod transforms;
pub mod twoparty;
pub mod xorlb;
