pub mod aggsign;
pub mod bench;
pub mod clpre;
pub mod costmodel;
pub mod fogsim;
pub mod homo;
pub mod lsss;
pub mod mabe;
pub mod pairing;
