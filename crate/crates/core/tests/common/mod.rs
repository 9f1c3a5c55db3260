#![allow(dead_code)]

pub mod oracle;
pub mod quadrature;
pub mod tables;
