#![allow(dead_code)]

pub mod berezin;
